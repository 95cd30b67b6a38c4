//! Benchmark cost functions, their symbolic Hamiltonians, and the
//! brute-force integer oracle.
//!
//! Phase-space problems read the solution from mean quadratures, Fock
//! problems from mean photon numbers; in both cases the objective is the
//! classical cost evaluated at those means.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::algebra::{from_xp, BosonPolynomial};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    PhaseSpace,
    FockSpace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnownOptimum {
    pub value: f64,
    pub optimizers: Vec<Vec<f64>>,
}

/// Closed-form cost evaluators for the benchmark set.
#[derive(Debug, Clone, PartialEq)]
enum CostFn {
    Rosenbrock,
    ToySixth,
    Ukp {
        values: Vec<f64>,
        weights: Vec<f64>,
        capacity: f64,
        delta: f64,
    },
    Maxclique {
        adjacency: Vec<Vec<u8>>,
        delta1: f64,
        delta2: f64,
    },
    TwoModeToy,
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub encoding: Encoding,
    pub n_vars: usize,
    cost: CostFn,
    pub hamiltonian: BosonPolynomial,
    pub known_optimum: Option<KnownOptimum>,
    pub penalties: BTreeMap<String, f64>,
}

impl ProblemSpec {
    /// The classical cost at a vector of per-mode means.
    pub fn evaluate(&self, m: &[f64]) -> f64 {
        debug_assert_eq!(m.len(), self.n_vars);
        match &self.cost {
            CostFn::Rosenbrock => (0..self.n_vars - 1)
                .map(|i| 100.0 * (m[i + 1] - m[i] * m[i]).powi(2) + (1.0 - m[i]).powi(2))
                .sum(),
            CostFn::ToySixth => {
                let cubic =
                    m[0].powi(3) + m[1].powi(3) + m[2].powi(3) - m[0] + 2.0 * m[1] - 3.0 * m[2];
                let linearly = -m[0] + m[1] + m[2];
                cubic * cubic + linearly * linearly + 0.01 * m[0] + 0.01 * m[1] + 0.01 * m[2]
            }
            CostFn::Ukp {
                values,
                weights,
                capacity,
                delta,
            } => {
                let gain: f64 = values.iter().zip(m).map(|(v, n)| v * n).sum();
                let load: f64 = weights.iter().zip(m).map(|(w, n)| w * n).sum();
                -gain + delta * (load - capacity).powi(2)
            }
            CostFn::Maxclique {
                adjacency,
                delta1,
                delta2,
            } => {
                let n = m.len();
                let mut cost: f64 = -m.iter().sum::<f64>();
                for i in 0..n {
                    for j in 0..n {
                        if i != j && adjacency[i][j] == 0 {
                            cost += delta1 * m[i] * m[j];
                        }
                    }
                    cost += delta2 * m[i] * (m[i] - 1.0);
                }
                cost
            }
            CostFn::TwoModeToy => (m[0] + m[2] - 0.75).powi(2),
        }
    }

    fn check_known_optimum(self) -> Result<Self> {
        if let Some(known) = &self.known_optimum {
            for opt in &known.optimizers {
                let got = self.evaluate(opt);
                if (got - known.value).abs() > 1e-6 {
                    return Err(Error::InvalidProblem(format!(
                        "{}: stated optimum {} evaluates to {} at {:?}",
                        self.name, known.value, got, opt
                    )));
                }
            }
        }
        Ok(self)
    }
}

/// The chained quartic valley benchmark, `N >= 2` variables.
pub fn rosenbrock(n: usize, hbar: f64) -> Result<ProblemSpec> {
    if n < 2 {
        return Err(Error::InvalidProblem(
            "rosenbrock needs at least 2 variables".into(),
        ));
    }
    let mut terms = Vec::new();
    for i in 0..n - 1 {
        // 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2
        let mut e = vec![0u32; n];
        e[i + 1] = 2;
        terms.push((e, vec![0; n], 100.0));
        let mut e = vec![0u32; n];
        e[i] = 2;
        e[i + 1] = 1;
        terms.push((e, vec![0; n], -200.0));
        let mut e = vec![0u32; n];
        e[i] = 4;
        terms.push((e, vec![0; n], 100.0));
        terms.push((vec![0; n], vec![0; n], 1.0));
        let mut e = vec![0u32; n];
        e[i] = 1;
        terms.push((e, vec![0; n], -2.0));
        let mut e = vec![0u32; n];
        e[i] = 2;
        terms.push((e, vec![0; n], 1.0));
    }
    let hamiltonian = from_xp(&terms, n, hbar)?;
    ProblemSpec {
        name: format!("rosenbrock-{n}"),
        encoding: Encoding::PhaseSpace,
        n_vars: n,
        cost: CostFn::Rosenbrock,
        hamiltonian,
        known_optimum: Some(KnownOptimum {
            value: 0.0,
            optimizers: vec![vec![1.0; n]],
        }),
        penalties: BTreeMap::new(),
    }
    .check_known_optimum()
}

/// Three-variable degree-six benchmark with correlated variables.
pub fn toy_sixth(hbar: f64) -> Result<ProblemSpec> {
    let n = 3;
    // (x1^3 + x2^3 + x3^3 - x1 + 2 x2 - 3 x3)^2 expanded term by term,
    // plus (-x1 + x2 + x3)^2 and the 0.01 linear tilts.
    let cubic: Vec<(Vec<u32>, f64)> = vec![
        (vec![3, 0, 0], 1.0),
        (vec![0, 3, 0], 1.0),
        (vec![0, 0, 3], 1.0),
        (vec![1, 0, 0], -1.0),
        (vec![0, 1, 0], 2.0),
        (vec![0, 0, 1], -3.0),
    ];
    let linear: Vec<(Vec<u32>, f64)> = vec![
        (vec![1, 0, 0], -1.0),
        (vec![0, 1, 0], 1.0),
        (vec![0, 0, 1], 1.0),
    ];
    let mut terms: Vec<(Vec<u32>, Vec<u32>, f64)> = Vec::new();
    let square_into = |factors: &[(Vec<u32>, f64)], terms: &mut Vec<(Vec<u32>, Vec<u32>, f64)>| {
        for (ea, ca) in factors {
            for (eb, cb) in factors {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                terms.push((exps, vec![0; n], ca * cb));
            }
        }
    };
    square_into(&cubic, &mut terms);
    square_into(&linear, &mut terms);
    for m in 0..n {
        let mut e = vec![0u32; n];
        e[m] = 1;
        terms.push((e, vec![0; n], 0.01));
    }
    let hamiltonian = from_xp(&terms, n, hbar)?;
    ProblemSpec {
        name: "toy-sixth".into(),
        encoding: Encoding::PhaseSpace,
        n_vars: n,
        cost: CostFn::ToySixth,
        hamiltonian,
        known_optimum: Some(KnownOptimum {
            value: -0.028457,
            optimizers: vec![vec![-1.42212, -0.127017, -1.29723]],
        }),
        penalties: BTreeMap::new(),
    }
    .check_known_optimum()
}

/// Known optima of the unbounded-knapsack instances used in the benchmarks,
/// keyed by (values, weights, capacity).
fn ukp_known(values: &[f64], weights: &[f64], capacity: f64) -> Option<KnownOptimum> {
    let rows: [(&[f64], &[f64], f64, f64, &[f64]); 2] = [
        (
            &[3.0, 4.0, 1.0],
            &[9.0, 5.0, 8.0],
            10.0,
            -8.0,
            &[0.0, 2.0, 0.0],
        ),
        (
            &[3.0, 4.0, 1.0, 3.0],
            &[2.0, 7.0, 6.0, 6.0],
            10.0,
            -15.0,
            &[5.0, 0.0, 0.0, 0.0],
        ),
    ];
    for (v, w, c, fmin, opt) in rows {
        if v == values && w == weights && c == capacity {
            return Some(KnownOptimum {
                value: fmin,
                optimizers: vec![opt.to_vec()],
            });
        }
    }
    None
}

/// Unbounded knapsack as a soft-constrained minimization:
/// `F(n) = -sum v_i n_i + delta (sum w_i n_i - C)^2`.
///
/// The penalty applies to the total load, not per item; the known optima of
/// the benchmark instances are only consistent with that reading.
pub fn ukp(values: &[f64], weights: &[f64], capacity: f64, delta: f64) -> Result<ProblemSpec> {
    let n = values.len();
    if n == 0 || weights.len() != n {
        return Err(Error::InvalidProblem(
            "knapsack needs matching non-empty value and weight lists".into(),
        ));
    }
    if weights.iter().any(|&w| w <= 0.0) {
        return Err(Error::InvalidProblem(
            "knapsack weights must be positive".into(),
        ));
    }
    if delta <= 0.0 {
        return Err(Error::InvalidProblem(
            "knapsack penalty must be positive".into(),
        ));
    }
    let mut hamiltonian = BosonPolynomial::zero(n);
    let mut load = BosonPolynomial::constant(n, Complex64::new(-capacity, 0.0));
    for i in 0..n {
        hamiltonian = hamiltonian
            .add(&BosonPolynomial::number(n, i).scale(Complex64::new(-values[i], 0.0)))?;
        load = load.add(&BosonPolynomial::number(n, i).scale(Complex64::new(weights[i], 0.0)))?;
    }
    hamiltonian = hamiltonian.add(&load.mul(&load)?.scale(Complex64::new(delta, 0.0)))?;
    let mut penalties = BTreeMap::new();
    penalties.insert("delta".into(), delta);
    ProblemSpec {
        name: format!("ukp-{n}"),
        encoding: Encoding::FockSpace,
        n_vars: n,
        cost: CostFn::Ukp {
            values: values.to_vec(),
            weights: weights.to_vec(),
            capacity,
            delta,
        },
        hamiltonian,
        known_optimum: ukp_known(values, weights, capacity),
        penalties,
    }
    .check_known_optimum()
}

/// Maximum clique with quadratic penalties:
/// `F(n) = -sum n_i + delta1 sum_{i != j} (1 - Z_ij) n_i n_j
///        + delta2 sum n_i (n_i - 1)`.
///
/// The non-edge penalty runs over ordered pairs with `i != j`; including the
/// diagonal would penalize every selected vertex and make the empty set
/// optimal. The known optimum is certified by exhaustive search over binary
/// selections at construction time.
pub fn maxclique(adjacency: &[Vec<u8>], delta1: f64, delta2: f64) -> Result<ProblemSpec> {
    let n = adjacency.len();
    if n == 0 {
        return Err(Error::InvalidProblem("empty graph".into()));
    }
    for (i, row) in adjacency.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidProblem(
                "adjacency matrix is not square".into(),
            ));
        }
        if row[i] != 0 {
            return Err(Error::InvalidProblem(format!("nonzero diagonal at {i}")));
        }
        for (j, &z) in row.iter().enumerate() {
            if z > 1 {
                return Err(Error::InvalidProblem(format!(
                    "adjacency must be 0/1, got {z} at ({i},{j})"
                )));
            }
            if adjacency[j][i] != z {
                return Err(Error::InvalidProblem(format!(
                    "adjacency not symmetric at ({i},{j})"
                )));
            }
        }
    }
    let c = |v: f64| Complex64::new(v, 0.0);
    let mut hamiltonian = BosonPolynomial::zero(n);
    for i in 0..n {
        let ni = BosonPolynomial::number(n, i);
        hamiltonian = hamiltonian.add(&ni.scale(c(-1.0)))?;
        // delta2 n_i (n_i - 1)
        hamiltonian = hamiltonian.add(&ni.mul(&ni)?.sub(&ni)?.scale(c(delta2)))?;
        for j in 0..n {
            if i != j && adjacency[i][j] == 0 {
                let nij = BosonPolynomial::number(n, i).mul(&BosonPolynomial::number(n, j))?;
                hamiltonian = hamiltonian.add(&nij.scale(c(delta1)))?;
            }
        }
    }
    let mut penalties = BTreeMap::new();
    penalties.insert("delta1".into(), delta1);
    penalties.insert("delta2".into(), delta2);
    let mut spec = ProblemSpec {
        name: format!("maxclique-{n}"),
        encoding: Encoding::FockSpace,
        n_vars: n,
        cost: CostFn::Maxclique {
            adjacency: adjacency.to_vec(),
            delta1,
            delta2,
        },
        hamiltonian,
        known_optimum: None,
        penalties,
    };
    let (best, minimizers) = brute_force_integer_min(&spec, 1)?;
    spec.known_optimum = Some(KnownOptimum {
        value: best,
        optimizers: minimizers
            .iter()
            .map(|p| p.iter().map(|&v| v as f64).collect())
            .collect(),
    });
    spec.check_known_optimum()
}

/// Builds an adjacency matrix from an edge list.
pub fn adjacency_from_edges(nodes: usize, edges: &[(usize, usize)]) -> Result<Vec<Vec<u8>>> {
    let mut z = vec![vec![0u8; nodes]; nodes];
    for &(i, j) in edges {
        if i >= nodes || j >= nodes {
            return Err(Error::InvalidProblem(format!(
                "edge ({i},{j}) out of range"
            )));
        }
        if i == j {
            return Err(Error::InvalidProblem(format!("self-loop at {i}")));
        }
        z[i][j] = 1;
        z[j][i] = 1;
    }
    Ok(z)
}

/// Five-node benchmark graph whose only maximum cliques are {0,1,3} and
/// {0,2,3}.
pub fn clique_graph_5() -> Vec<Vec<u8>> {
    adjacency_from_edges(5, &[(0, 1), (0, 2), (0, 3), (1, 3), (2, 3), (1, 4), (2, 4)])
        .expect("static graph")
}

/// Six-node variant: the five-node core plus a vertex attached to 0 and 4.
/// Those neighbors are non-adjacent, so no new triangle forms and {0,1,3},
/// {0,2,3} remain the only maximum cliques.
pub fn clique_graph_6() -> Vec<Vec<u8>> {
    adjacency_from_edges(
        6,
        &[
            (0, 1),
            (0, 2),
            (0, 3),
            (1, 3),
            (2, 3),
            (1, 4),
            (2, 4),
            (0, 5),
            (4, 5),
        ],
    )
    .expect("static graph")
}

/// The two-variable experiment objective `F(n) = (n_0 + n_2 - 0.75)^2`,
/// hosted on four simulated modes (the cost touches modes 0 and 2; the other
/// two are ancillas of the interferometer).
pub fn two_mode_toy() -> Result<ProblemSpec> {
    let n = 4;
    let c = |v: f64| Complex64::new(v, 0.0);
    let mut s = BosonPolynomial::constant(n, c(-0.75));
    s = s.add(&BosonPolynomial::number(n, 0))?;
    s = s.add(&BosonPolynomial::number(n, 2))?;
    let hamiltonian = s.mul(&s)?;
    ProblemSpec {
        name: "two-mode-toy".into(),
        encoding: Encoding::FockSpace,
        n_vars: n,
        cost: CostFn::TwoModeToy,
        hamiltonian,
        known_optimum: None,
        penalties: BTreeMap::new(),
    }
    .check_known_optimum()
}

#[cfg(test)]
pub(crate) fn fock_problem_with_hamiltonian(
    hamiltonian: BosonPolynomial,
    n_vars: usize,
) -> ProblemSpec {
    ProblemSpec {
        name: "test".into(),
        encoding: Encoding::FockSpace,
        n_vars,
        cost: CostFn::TwoModeToy,
        hamiltonian,
        known_optimum: None,
        penalties: BTreeMap::new(),
    }
}

const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

/// Exhaustive minimization of a Fock-encoded cost over integer assignments
/// `n in {0..=bound}^N`. Returns the minimum and every minimizer.
pub fn brute_force_integer_min(spec: &ProblemSpec, bound: usize) -> Result<(f64, Vec<Vec<usize>>)> {
    if spec.encoding != Encoding::FockSpace {
        return Err(Error::InvalidProblem(
            "brute-force oracle applies to Fock-encoded problems".into(),
        ));
    }
    let n = spec.n_vars;
    let points = (bound as u128 + 1).pow(n as u32);
    if points > BRUTE_FORCE_LIMIT {
        return Err(Error::SearchSpaceTooLarge {
            points,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut assignment = vec![0usize; n];
    let mut floats = vec![0.0f64; n];
    let mut best = f64::INFINITY;
    let mut minimizers: Vec<Vec<usize>> = Vec::new();
    loop {
        for (f, &v) in floats.iter_mut().zip(assignment.iter()) {
            *f = v as f64;
        }
        let cost = spec.evaluate(&floats);
        if cost < best {
            best = cost;
            minimizers.clear();
            minimizers.push(assignment.clone());
        } else if cost == best {
            minimizers.push(assignment.clone());
        }
        // odometer
        let mut i = n;
        loop {
            if i == 0 {
                return Ok((best, minimizers));
            }
            i -= 1;
            assignment[i] += 1;
            if assignment[i] <= bound {
                break;
            }
            assignment[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HBAR: f64 = 2.0;

    #[test]
    fn rosenbrock_optimum_and_origin() {
        let p = rosenbrock(4, HBAR).unwrap();
        assert_eq!(p.evaluate(&[1.0, 1.0, 1.0, 1.0]), 0.0);
        assert_eq!(p.evaluate(&[0.0, 0.0, 0.0, 0.0]), 3.0);
        let p2 = rosenbrock(2, HBAR).unwrap();
        assert_eq!(p2.evaluate(&[1.0, 1.0]), 0.0);
    }

    #[test]
    fn rosenbrock_rejects_single_variable() {
        assert!(rosenbrock(1, HBAR).is_err());
    }

    #[test]
    fn toy_sixth_matches_stated_optimum() {
        let p = toy_sixth(HBAR).unwrap();
        let got = p.evaluate(&[-1.42212, -0.127017, -1.29723]);
        assert!(
            (got - (-0.028457)).abs() < 1e-5,
            "optimum evaluates to {got}"
        );
        assert_eq!(p.evaluate(&[0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn toy_sixth_leading_power_is_six() {
        let p = toy_sixth(HBAR).unwrap();
        let t = 300.0;
        let ratio = p.evaluate(&[t, 0.0, 0.0]) / t.powi(6);
        assert!((ratio - 1.0).abs() < 0.01, "leading ratio {ratio}");
    }

    #[test]
    fn ukp_table_values() {
        let p = ukp(&[3.0, 4.0, 1.0], &[9.0, 5.0, 8.0], 10.0, 4.0).unwrap();
        assert_eq!(p.evaluate(&[0.0, 2.0, 0.0]), -8.0);
        assert_eq!(p.evaluate(&[0.0, 0.0, 0.0]), 400.0);
        let p4 = ukp(&[3.0, 4.0, 1.0, 3.0], &[2.0, 7.0, 6.0, 6.0], 10.0, 4.0).unwrap();
        assert_eq!(p4.evaluate(&[5.0, 0.0, 0.0, 0.0]), -15.0);
    }

    #[test]
    fn ukp_rejects_bad_weights() {
        assert!(ukp(&[1.0], &[0.0], 5.0, 1.0).is_err());
        assert!(ukp(&[1.0, 2.0], &[1.0], 5.0, 1.0).is_err());
    }

    #[test]
    fn maxclique_triangle_and_path() {
        let triangle = adjacency_from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let p = maxclique(&triangle, 10.0, 1.0).unwrap();
        assert_eq!(p.evaluate(&[1.0, 1.0, 1.0]), -3.0);

        let path = adjacency_from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let d1 = 10.0;
        let p = maxclique(&path, d1, 1.0).unwrap();
        // nodes 0 and 2 are non-adjacent and counted in both pair orders
        assert_eq!(p.evaluate(&[1.0, 0.0, 1.0]), -2.0 + 2.0 * d1);
    }

    #[test]
    fn maxclique_rejects_malformed_adjacency() {
        let asym = vec![vec![0, 1], vec![0, 0]];
        assert!(maxclique(&asym, 10.0, 1.0).is_err());
        let diag = vec![vec![1u8]];
        assert!(maxclique(&diag, 10.0, 1.0).is_err());
    }

    #[test]
    fn benchmark_graphs_have_the_two_degenerate_cliques() {
        for adjacency in [clique_graph_5(), clique_graph_6()] {
            let n = adjacency.len();
            let p = maxclique(&adjacency, 10.0, 1.0).unwrap();
            let known = p.known_optimum.as_ref().unwrap();
            assert_eq!(known.value, -3.0);
            let mut expected: Vec<Vec<f64>> = vec![
                {
                    let mut v = vec![0.0; n];
                    v[0] = 1.0;
                    v[1] = 1.0;
                    v[3] = 1.0;
                    v
                },
                {
                    let mut v = vec![0.0; n];
                    v[0] = 1.0;
                    v[2] = 1.0;
                    v[3] = 1.0;
                    v
                },
            ];
            expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut got = known.optimizers.clone();
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(got, expected, "graph on {n} nodes");
        }
    }

    #[test]
    fn two_mode_toy_values() {
        let p = two_mode_toy().unwrap();
        assert_eq!(p.evaluate(&[0.75, 0.0, 0.0, 0.0]), 0.0);
        assert_eq!(p.evaluate(&[0.0, 0.0, 0.0, 0.0]), 0.5625);
        assert_eq!(p.evaluate(&[0.375, 0.0, 0.375, 0.0]), 0.0);
    }

    #[test]
    fn oracle_reproduces_knapsack_optima() {
        let p = ukp(&[3.0, 4.0, 1.0], &[9.0, 5.0, 8.0], 10.0, 4.0).unwrap();
        let (best, argmins) = brute_force_integer_min(&p, 9).unwrap();
        assert_eq!(best, -8.0);
        assert_eq!(argmins, vec![vec![0, 2, 0]]);

        let p4 = ukp(&[3.0, 4.0, 1.0, 3.0], &[2.0, 7.0, 6.0, 6.0], 10.0, 4.0).unwrap();
        let (best, argmins) = brute_force_integer_min(&p4, 9).unwrap();
        assert_eq!(best, -15.0);
        assert_eq!(argmins, vec![vec![5, 0, 0, 0]]);
    }

    #[test]
    fn oracle_certifies_clique_graph() {
        let p = maxclique(&clique_graph_5(), 10.0, 1.0).unwrap();
        let (best, argmins) = brute_force_integer_min(&p, 1).unwrap();
        assert_eq!(best, -3.0);
        assert_eq!(argmins, vec![vec![1, 0, 1, 1, 0], vec![1, 1, 0, 1, 0]]);
    }

    #[test]
    fn oracle_with_zero_bound_returns_origin() {
        let p = ukp(&[3.0, 4.0, 1.0], &[9.0, 5.0, 8.0], 10.0, 4.0).unwrap();
        let (best, argmins) = brute_force_integer_min(&p, 0).unwrap();
        assert_eq!(best, 400.0);
        assert_eq!(argmins, vec![vec![0, 0, 0]]);
    }

    #[test]
    fn oracle_guards_search_space() {
        let p = ukp(&[1.0; 8], &[1.0; 8], 10.0, 4.0).unwrap();
        assert!(matches!(
            brute_force_integer_min(&p, 30),
            Err(Error::SearchSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn fock_hamiltonians_match_evaluator_on_basis_states() {
        // exhaustive over the interior grid max(n) <= D-1-deg/2 at a small
        // cutoff; the diagonal realization is exact there
        let d = 6;
        let specs = [
            ukp(&[3.0, 4.0, 1.0], &[9.0, 5.0, 8.0], 10.0, 4.0).unwrap(),
            maxclique(&clique_graph_5(), 10.0, 1.0).unwrap(),
            two_mode_toy().unwrap(),
        ];
        for spec in &specs {
            let bound = d - 1 - spec.hamiltonian.degree() / 2;
            let n = spec.n_vars;
            let mut pattern = vec![0usize; n];
            loop {
                let floats: Vec<f64> = pattern.iter().map(|&v| v as f64).collect();
                let direct = spec.evaluate(&floats);
                let symbolic = spec.hamiltonian.fock_diagonal(&pattern);
                assert!(
                    (symbolic.re - direct).abs() < 1e-8 && symbolic.im.abs() < 1e-10,
                    "{}: H({pattern:?}) = {symbolic} but F = {direct}",
                    spec.name
                );
                let mut i = n;
                let done = loop {
                    if i == 0 {
                        break true;
                    }
                    i -= 1;
                    pattern[i] += 1;
                    if pattern[i] <= bound {
                        break false;
                    }
                    pattern[i] = 0;
                };
                if done {
                    break;
                }
            }
        }
    }

    #[test]
    fn hamiltonians_are_hermitian() {
        let specs = [
            rosenbrock(3, HBAR).unwrap(),
            toy_sixth(HBAR).unwrap(),
            ukp(&[3.0, 4.0, 1.0], &[9.0, 5.0, 8.0], 10.0, 4.0).unwrap(),
            maxclique(&clique_graph_5(), 10.0, 1.0).unwrap(),
            two_mode_toy().unwrap(),
        ];
        for spec in &specs {
            assert!(
                spec.hamiltonian.is_hermitian(1e-9),
                "{} Hamiltonian not Hermitian",
                spec.name
            );
        }
    }

    #[test]
    fn local_refinement_finds_nothing_below_stated_optima() {
        // dense grid around the stated continuous optima
        for (spec, radius) in [
            (rosenbrock(4, HBAR).unwrap(), 0.02),
            (toy_sixth(HBAR).unwrap(), 0.02),
        ] {
            let known = spec.known_optimum.clone().unwrap();
            let center = &known.optimizers[0];
            let steps = [-1.0, -0.5, 0.0, 0.5, 1.0];
            let n = center.len();
            let mut idx = vec![0usize; n];
            loop {
                let probe: Vec<f64> = center
                    .iter()
                    .zip(idx.iter())
                    .map(|(c, &k)| c + steps[k] * radius)
                    .collect();
                assert!(
                    spec.evaluate(&probe) >= known.value - 1e-6,
                    "{}: point below stated optimum",
                    spec.name
                );
                let mut i = n;
                loop {
                    if i == 0 {
                        return;
                    }
                    i -= 1;
                    idx[i] += 1;
                    if idx[i] < steps.len() {
                        break;
                    }
                    idx[i] = 0;
                }
            }
        }
    }
}
