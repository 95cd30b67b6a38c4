//! Counterdiabatic operator pool from the nested-commutator gauge potential.
//!
//! The adiabatic Hamiltonian `H(lambda) = (1-lambda) H_m + lambda H_p` is
//! treated with `lambda` as a formal scalar; the order-`l` gauge potential is
//! the sum over `k = 1..l` of `i` times the `(2k-1)`-fold nested commutator
//! of `H` with `dH/dlambda = H_p - H_m`. The pool is the set of Hermitian
//! monomial families appearing in any of those terms at any power of
//! `lambda`; coefficients are discarded because each family is exponentiated
//! with its own trainable parameter.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;

use crate::algebra::{key_arity, key_dagger, key_degree, BosonPolynomial, MonomialKey};
use crate::error::{Error, Result};
use crate::gates::{GateKind, GateSpec, ParamSlot};

/// Default quadrature shifts for the mixer Hamiltonians.
///
/// The shifts must be nonzero for the pool to contain the families the
/// benchmark ansatz circuits are built from. With `x0 = p0 = 0` the Fock
/// mixer `sum_i (x_i - x0)^2 + (p_i - p0)^2` reduces to a function of the
/// total photon number and commutes with every number-encoded cost; and the
/// phase-space mixer `sum_i (p_i - p0)^2` together with a cost `F(x)` is
/// invariant under conjugation by `p -> -p`, which confines every nested
/// bracket to odd-momentum families and excludes the cubic position family.
/// The shifted linear terms break both obstructions; their values only scale
/// pool coefficients, which are absorbed into the trainable parameters, so
/// any generic nonzero choice yields the same family set.
pub const DEFAULT_MIXER_X0: f64 = 0.5;
pub const DEFAULT_MIXER_P0: f64 = 0.25;

/// Mixer for phase-space encodings: `sum_i (p_i - p0)^2`.
pub fn phase_space_mixer(modes: usize, p0: f64, hbar: f64) -> BosonPolynomial {
    let mut terms = Vec::new();
    for m in 0..modes {
        let mut p2 = vec![0u32; modes];
        p2[m] = 2;
        terms.push((vec![0; modes], p2, 1.0));
        if p0 != 0.0 {
            let mut p1 = vec![0u32; modes];
            p1[m] = 1;
            terms.push((vec![0; modes], p1, -2.0 * p0));
            terms.push((vec![0; modes], vec![0; modes], p0 * p0));
        }
    }
    crate::algebra::from_xp(&terms, modes, hbar).expect("mixer construction")
}

/// Mixer for Fock encodings: `sum_i (x_i - x0)^2 + (p_i - p0)^2`.
pub fn fock_space_mixer(modes: usize, x0: f64, p0: f64, hbar: f64) -> BosonPolynomial {
    let mut terms = Vec::new();
    for m in 0..modes {
        let mut x2 = vec![0u32; modes];
        x2[m] = 2;
        terms.push((x2, vec![0; modes], 1.0));
        let mut p2 = vec![0u32; modes];
        p2[m] = 2;
        terms.push((vec![0; modes], p2, 1.0));
        if x0 != 0.0 {
            let mut x1 = vec![0u32; modes];
            x1[m] = 1;
            terms.push((x1, vec![0; modes], -2.0 * x0));
            terms.push((vec![0; modes], vec![0; modes], x0 * x0));
        }
        if p0 != 0.0 {
            let mut p1 = vec![0u32; modes];
            p1[m] = 1;
            terms.push((vec![0; modes], p1, -2.0 * p0));
            terms.push((vec![0; modes], vec![0; modes], p0 * p0));
        }
    }
    crate::algebra::from_xp(&terms, modes, hbar).expect("mixer construction")
}

/// Component class of a Hermitian monomial family. Every coefficient
/// `c m + c* m^dag` splits exactly into `Re(c) (m + m^dag)` and
/// `Im(c) i(m - m^dag)`, so families are collected per component: the real
/// class pairs `m + m^dag`, the imaginary class pairs `i(m - m^dag)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PhaseClass {
    Real,
    Imaginary,
}

/// Mode-anonymized signature of a Hermitian monomial family: the nonzero
/// per-mode exponent pairs of the representative monomial, sorted, plus the
/// coefficient phase class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FamilySignature {
    pub pattern: Vec<(u8, u8)>,
    pub phase: PhaseClass,
}

/// One Hermitian family extracted from the gauge potential.
#[derive(Debug, Clone)]
pub struct PoolOperator {
    /// Unit-coefficient Hermitian representative on the first modes the
    /// family was seen on.
    pub generator: BosonPolynomial,
    /// Human-readable family name, stable across mode permutations.
    pub label: String,
    /// Total polynomial degree of the family.
    pub degree: usize,
    /// Number of distinct modes touched.
    pub arity: usize,
    /// Structure used for gate realization.
    pub signature: FamilySignature,
}

impl fmt::Display for PoolOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} (degree {}, arity {})",
            self.label, self.degree, self.arity
        )?;
        write!(f, "{}", self.generator)
    }
}

fn signature_of(key: &MonomialKey, phase: PhaseClass) -> FamilySignature {
    let mut pattern: Vec<(u8, u8)> = key
        .iter()
        .copied()
        .filter(|&(c, a)| c != 0 || a != 0)
        .collect();
    pattern.sort_unstable();
    FamilySignature { pattern, phase }
}

/// Family names for the structures the gate set can realize; unrecognized
/// shapes fall back to a ladder-form rendering. The quadrature names refer to
/// the leading symbol of the Hermitian pair.
fn label_of(sig: &FamilySignature) -> String {
    use PhaseClass::*;
    match (sig.pattern.as_slice(), sig.phase) {
        ([(0, 1)], Real) => "x_i".into(),
        ([(0, 1)], Imaginary) => "p_i".into(),
        ([(1, 1)], _) => "n_i".into(),
        ([(0, 2)], Real) => "x_i^2 - p_i^2".into(),
        ([(0, 2)], Imaginary) => "x_i p_i + p_i x_i".into(),
        ([(2, 2)], _) => "n_i (n_i - 1)".into(),
        ([(1, 1), (1, 1)], _) => "n_i n_j".into(),
        ([(0, 1), (0, 1)], Real) => "x_i x_j - p_i p_j".into(),
        ([(0, 1), (0, 1)], Imaginary) => "x_i p_j + p_i x_j".into(),
        ([(0, 1), (1, 0)], Real) => "x_i x_j + p_i p_j".into(),
        ([(0, 1), (1, 0)], Imaginary) => "x_i p_j - p_i x_j".into(),
        ([(0, 3)], Real) => "x_i^3".into(),
        ([(0, 3)], Imaginary) => "p_i^3".into(),
        (pattern, phase) => {
            let mut parts = Vec::new();
            for (idx, &(c, a)) in pattern.iter().enumerate() {
                let mode = (b'i' + idx as u8) as char;
                match (c, a) {
                    (0, 0) => {}
                    (0, a) => parts.push(format!("a_{mode}^{a}")),
                    (c, 0) => parts.push(format!("a_{mode}†^{c}")),
                    (c, a) => parts.push(format!("a_{mode}†^{c} a_{mode}^{a}")),
                }
            }
            let body = parts.join(" ");
            let tag = match phase {
                Real => "+ h.c.",
                Imaginary => "- h.c. (i)",
            };
            format!("{body} {tag}")
        }
    }
}

/// Polynomial in the formal scheduling scalar with operator coefficients.
type LambdaPoly = Vec<BosonPolynomial>;

fn lambda_commutator(h: &LambdaPoly, b: &LambdaPoly) -> Result<LambdaPoly> {
    let modes = h[0].modes();
    let mut out: LambdaPoly = vec![BosonPolynomial::zero(modes); h.len() + b.len() - 1];
    for (i, hi) in h.iter().enumerate() {
        if hi.is_empty() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_empty() {
                continue;
            }
            let comm = hi.commutator(bj)?;
            out[i + j] = out[i + j].add(&comm)?;
        }
    }
    Ok(out)
}

/// Computes the operator pool of the order-`l` gauge-potential expansion.
///
/// The bracket tower `[H, dH], [H, [H, dH]], ...` is evaluated up to depth
/// `2l - 1` with the scheduling scalar kept formal, and Hermitian monomial
/// families are collected from every depth. Families appearing only at even
/// depths (notably the photon-number and beamsplitter families of
/// number-encoded costs, which vanish identically at odd depths) are part of
/// the selectable pool: the expansion's own terms sit at the odd depths, and
/// the even depths are the intermediates the recursion passes through.
///
/// Errors with [`Error::DegeneratePool`] when the two Hamiltonians commute
/// symbolically. An optional degree cap drops monomials above the cap after
/// every bracket; the realizable gate set only covers low degrees, so capped
/// pools select identical ansatz circuits.
pub fn nested_pool_capped(
    h_m: &BosonPolynomial,
    h_p: &BosonPolynomial,
    l: usize,
    degree_cap: Option<usize>,
) -> Result<Vec<PoolOperator>> {
    if h_m.modes() != h_p.modes() {
        return Err(Error::ModeCountMismatch(h_m.modes(), h_p.modes()));
    }
    if l == 0 {
        return Err(Error::InvalidProblem(
            "pool expansion order must be positive".into(),
        ));
    }
    let tol = 1e-9;
    if h_m.hermitian_deviation() > tol {
        return Err(Error::NotHermitian(h_m.hermitian_deviation()));
    }
    if h_p.hermitian_deviation() > tol {
        return Err(Error::NotHermitian(h_p.hermitian_deviation()));
    }
    let comm = h_p.commutator(h_m)?;
    let comm_scale = comm.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    let input_scale = h_m.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max)
        * h_p.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    if comm_scale <= 1e-9 * input_scale.max(1.0) {
        return Err(Error::DegeneratePool);
    }

    let cap = |p: BosonPolynomial| -> BosonPolynomial {
        match degree_cap {
            None => p,
            Some(maxd) => {
                let modes = p.modes();
                let mut kept = BosonPolynomial::zero(modes);
                for (k, &c) in p.terms() {
                    if key_degree(k) <= maxd {
                        kept = kept
                            .add(&BosonPolynomial::monomial(modes, &key_to_factors(k), c))
                            .expect("same mode count");
                    }
                }
                kept
            }
        }
    };

    let h_lambda: LambdaPoly = vec![h_m.clone(), h_p.sub(h_m)?];
    let d_h = h_p.sub(h_m)?;
    let mut bracket: LambdaPoly = vec![d_h];
    let mut families: BTreeMap<FamilySignature, PoolOperator> = BTreeMap::new();

    for depth in 1..=(2 * l - 1) {
        bracket = lambda_commutator(&h_lambda, &bracket)?;
        for coeff_poly in bracket.iter_mut() {
            *coeff_poly = cap(coeff_poly.clone());
        }
        for coeff_poly in &bracket {
            // odd depths are anti-Hermitian, even depths Hermitian; collect
            // from the Hermitian version so component classes are canonical
            let hermitian = if depth % 2 == 1 {
                coeff_poly.scale(Complex64::I)
            } else {
                coeff_poly.clone()
            };
            collect_families(&hermitian, &mut families);
        }
    }

    Ok(families.into_values().collect())
}

/// The pool at expansion order `l` with no degree cap.
pub fn nested_pool(
    h_m: &BosonPolynomial,
    h_p: &BosonPolynomial,
    l: usize,
) -> Result<Vec<PoolOperator>> {
    nested_pool_capped(h_m, h_p, l, None)
}

fn key_to_factors(key: &MonomialKey) -> Vec<(usize, u8, u8)> {
    key.iter()
        .enumerate()
        .map(|(m, &(c, a))| (m, c, a))
        .collect()
}

/// Monomials below this fraction of the largest coefficient are cancellation
/// residue, not pool content.
const FAMILY_NOISE_FLOOR: f64 = 1e-9;

fn collect_families(
    hermitian_part: &BosonPolynomial,
    families: &mut BTreeMap<FamilySignature, PoolOperator>,
) {
    let modes = hermitian_part.modes();
    let scale = hermitian_part
        .terms()
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    for (key, &coeff) in hermitian_part.terms() {
        if key.iter().all(|&(c, a)| c == 0 && a == 0) {
            continue; // constants generate global phases only
        }
        if coeff.norm() < FAMILY_NOISE_FLOOR * scale {
            continue;
        }
        let adj = key_dagger(key);
        let self_adjoint = adj == *key;
        if !self_adjoint && adj < *key {
            continue; // handle each pair at its canonical representative
        }
        let mut insert = |phase: PhaseClass| {
            let sig = signature_of(key, phase);
            if families.contains_key(&sig) {
                return;
            }
            let unit = match phase {
                PhaseClass::Real => Complex64::ONE,
                PhaseClass::Imaginary => Complex64::I,
            };
            let mut generator = BosonPolynomial::monomial(modes, &key_to_factors(key), unit);
            if !self_adjoint {
                generator = generator
                    .add(&BosonPolynomial::monomial(
                        modes,
                        &key_to_factors(&adj),
                        unit.conj(),
                    ))
                    .expect("same mode count");
            }
            let label = label_of(&sig);
            families.insert(
                sig.clone(),
                PoolOperator {
                    generator,
                    label,
                    degree: key_degree(key),
                    arity: key_arity(key),
                    signature: sig,
                },
            );
        };
        if coeff.re.abs() >= FAMILY_NOISE_FLOOR * scale {
            insert(PhaseClass::Real);
        }
        if !self_adjoint && coeff.im.abs() >= FAMILY_NOISE_FLOOR * scale {
            insert(PhaseClass::Imaginary);
        }
    }
}

// Sorting for the public pool order: (degree, arity, label).
pub fn sort_pool(pool: &mut [PoolOperator]) {
    pool.sort_by(|a, b| {
        (a.degree, a.arity, &a.label, &a.signature).cmp(&(
            b.degree,
            b.arity,
            &b.label,
            &b.signature,
        ))
    });
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    NearestNeighbor,
    AllToAll,
}

/// Gate kinds able to realize a family signature, in preference order.
fn realizing_gates(sig: &FamilySignature) -> &'static [GateKind] {
    use PhaseClass::*;
    match (sig.pattern.as_slice(), sig.phase) {
        ([(0, 1)], _) => &[GateKind::X],
        ([(1, 1)], _) => &[GateKind::R],
        ([(0, 2)], _) => &[GateKind::Squeeze],
        ([(2, 2)], _) => &[GateKind::Kerr],
        ([(1, 1), (1, 1)], _) => &[GateKind::CrossKerr],
        ([(0, 1), (0, 1)], _) => &[GateKind::TwoModeSqueeze, GateKind::CZ],
        ([(0, 1), (1, 0)], _) => &[GateKind::BS, GateKind::CZ],
        ([(0, 3)], Real) => &[GateKind::CubicPhase],
        _ => &[],
    }
}

/// Selects an ansatz from the pool: families realizable by whitelisted gates
/// are instantiated per mode (single-mode kinds) or per edge under the given
/// connectivity, ordered as the first single-mode family, then all edge
/// families, then the remaining single-mode families. Each gate consumes one
/// trainable slot; phase-like second parameters are fixed to zero.
pub fn select_ansatz(
    pool: &[PoolOperator],
    whitelist: &[GateKind],
    connectivity: Connectivity,
    modes: usize,
) -> Result<Vec<GateSpec>> {
    if pool.is_empty() {
        return Err(Error::NoRealizableAnsatz);
    }
    let mut sorted: Vec<&PoolOperator> = pool.iter().collect();
    sorted.sort_by(|a, b| {
        (a.degree, a.arity, &a.label, &a.signature).cmp(&(
            b.degree,
            b.arity,
            &b.label,
            &b.signature,
        ))
    });
    let mut kinds: Vec<GateKind> = Vec::new();
    let mut seen: BTreeSet<GateKind> = BTreeSet::new();
    for family in &sorted {
        for cand in realizing_gates(&family.signature) {
            if whitelist.contains(cand) && !seen.contains(cand) {
                kinds.push(*cand);
                seen.insert(*cand);
                break;
            }
        }
    }
    if kinds.is_empty() {
        return Err(Error::NoRealizableAnsatz);
    }
    let single: Vec<GateKind> = kinds.iter().copied().filter(|k| k.arity() == 1).collect();
    let double: Vec<GateKind> = kinds.iter().copied().filter(|k| k.arity() == 2).collect();

    let edges: Vec<(usize, usize)> = match connectivity {
        Connectivity::NearestNeighbor => (0..modes.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
        Connectivity::AllToAll => {
            let mut e = Vec::new();
            for i in 0..modes {
                for j in i + 1..modes {
                    e.push((i, j));
                }
            }
            e
        }
    };

    let mut gates = Vec::new();
    let mut slot = 0usize;
    let mut push_gate = |kind: GateKind, targets: Vec<usize>, gates: &mut Vec<GateSpec>| {
        let mut params = vec![ParamSlot::Slot(slot)];
        slot += 1;
        for _ in 1..kind.param_count() {
            params.push(ParamSlot::Fixed(0.0));
        }
        gates.push(GateSpec::new(kind, targets, params));
    };

    let mut single_iter = single.iter();
    if let Some(&first) = single_iter.next() {
        for m in 0..modes {
            push_gate(first, vec![m], &mut gates);
        }
    }
    for &kind in &double {
        for &(i, j) in &edges {
            push_gate(kind, vec![i, j], &mut gates);
        }
    }
    for &kind in single_iter {
        for m in 0..modes {
            push_gate(kind, vec![m], &mut gates);
        }
    }
    Ok(gates)
}

/// Total slot count an ansatz consumes.
pub fn ansatz_param_count(gates: &[GateSpec]) -> usize {
    gates
        .iter()
        .flat_map(|g| g.params.iter())
        .filter_map(|p| match p {
            ParamSlot::Slot(s) => Some(*s + 1),
            ParamSlot::Fixed(_) => None,
        })
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HBAR: f64 = 2.0;

    #[test]
    fn single_mode_squeezing_pool() {
        // H_m = p^2, H_p = x^2, l = 1: the single bracket is proportional to
        // xp + px, so the pool is exactly that family.
        let h_m = phase_space_mixer(1, 0.0, HBAR);
        let h_p = crate::algebra::from_xp(&[(vec![2], vec![0], 1.0)], 1, HBAR).unwrap();
        let pool = nested_pool(&h_m, &h_p, 1).unwrap();
        assert_eq!(
            pool.len(),
            1,
            "pool: {:?}",
            pool.iter().map(|p| &p.label).collect::<Vec<_>>()
        );
        assert_eq!(pool[0].label, "x_i p_i + p_i x_i");
        // and verify against the dense matrices
        let d = 12;
        let m = pool[0].generator.to_matrix(d).unwrap();
        assert!(m.hermitian_deviation() < 1e-10);
    }

    #[test]
    fn commuting_inputs_are_degenerate() {
        let h_m = BosonPolynomial::number(2, 0)
            .add(&BosonPolynomial::number(2, 1))
            .unwrap();
        let h_p = BosonPolynomial::number(2, 0).scale(Complex64::new(3.0, 0.0));
        assert!(matches!(
            nested_pool(&h_m, &h_p, 2),
            Err(Error::DegeneratePool)
        ));
    }

    #[test]
    fn pool_operators_are_hermitian() {
        let h_m = phase_space_mixer(2, 0.0, HBAR);
        let h_p = crate::algebra::from_xp(
            &[
                (vec![2, 0], vec![0, 0], 1.0),
                (vec![1, 1], vec![0, 0], -0.5),
                (vec![4, 0], vec![0, 0], 0.3),
            ],
            2,
            HBAR,
        )
        .unwrap();
        let pool = nested_pool(&h_m, &h_p, 2).unwrap();
        assert!(!pool.is_empty());
        for fam in &pool {
            assert!(
                fam.generator.is_hermitian(1e-10),
                "family {} not Hermitian",
                fam.label
            );
            let m = fam.generator.to_matrix(8).unwrap();
            assert!(m.hermitian_deviation() < 1e-10);
        }
    }

    #[test]
    fn scaling_problem_does_not_change_family_set() {
        let h_m = phase_space_mixer(2, 0.0, HBAR);
        let h_p = crate::algebra::from_xp(
            &[
                (vec![2, 0], vec![0, 0], 1.0),
                (vec![1, 1], vec![0, 0], -0.5),
            ],
            2,
            HBAR,
        )
        .unwrap();
        let labels = |pool: &[PoolOperator]| -> BTreeSet<String> {
            pool.iter().map(|p| p.label.clone()).collect()
        };
        let pool1 = nested_pool(&h_m, &h_p, 2).unwrap();
        let pool2 = nested_pool(&h_m, &h_p.scale(Complex64::new(2.0, 0.0)), 2).unwrap();
        assert_eq!(labels(&pool1), labels(&pool2));
    }
}
