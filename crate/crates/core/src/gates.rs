//! The qumode gate set and parameterized circuits.
//!
//! Every gate is `exp(i s G)` of a truncated Hermitian generator, so all
//! constructed matrices are exactly unitary in the truncated space. Gate
//! conventions fixed here:
//!
//! * `R(phi) = exp(i phi n)`
//! * `Disp(alpha) = exp(alpha a^dag - alpha* a)` (positive real `alpha`
//!   displaces `<x>` by `sqrt(2 hbar) Re alpha`)
//! * `Squeeze(r, phi) = exp[(r/2)(e^{-i phi} a^2 - e^{i phi} a^dag^2)]`
//! * `BS(theta, phi) = exp[theta (e^{i phi} a_i a_j^dag - e^{-i phi} a_i^dag a_j)]`
//! * `QuadPhase P(s) = exp(i s x^2 / 2 hbar)`
//! * `CZ(s) = exp(i s x_i x_j / hbar)`
//! * `TwoModeSqueeze S2(z) = exp(z a_i^dag a_j^dag - z* a_i a_j)`
//! * `CubicPhase V(gamma) = exp(i gamma x^3 / 3 hbar)`
//! * `Kerr K(kappa) = exp(i kappa n^2)`
//! * `CrossKerr CK(kappa) = exp(i kappa n_i n_j)`
//! * `X(s) = exp(-i s p / hbar)` (shifts `<x>` by `+s`)
//! * `Pz(s) = R(-pi/2) P(s) R(pi/2) = exp(i s p^2 / 2 hbar)`
//!
//! Generator eigendecompositions are cached per (kind, phase angle, cutoff,
//! hbar); the cache is safe for concurrent readers and writes are serialized.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{ModeState, TruncatedOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    R,
    Disp,
    Squeeze,
    BS,
    QuadPhase,
    CZ,
    TwoModeSqueeze,
    CubicPhase,
    Kerr,
    CrossKerr,
    X,
    Pz,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::BS | GateKind::CZ | GateKind::TwoModeSqueeze | GateKind::CrossKerr => 2,
            _ => 1,
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            GateKind::Disp | GateKind::Squeeze | GateKind::BS | GateKind::TwoModeSqueeze => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::R => "R",
            GateKind::Disp => "D",
            GateKind::Squeeze => "S",
            GateKind::BS => "BS",
            GateKind::QuadPhase => "P",
            GateKind::CZ => "CZ",
            GateKind::TwoModeSqueeze => "S2",
            GateKind::CubicPhase => "V",
            GateKind::Kerr => "K",
            GateKind::CrossKerr => "CK",
            GateKind::X => "X",
            GateKind::Pz => "Pz",
        }
    }
}

/// A gate parameter is either a slot in the global parameter vector or a
/// constant fixed by the ansatz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamSlot {
    Slot(usize),
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub params: Vec<ParamSlot>,
}

impl GateSpec {
    pub fn new(kind: GateKind, targets: Vec<usize>, params: Vec<ParamSlot>) -> Self {
        GateSpec {
            kind,
            targets,
            params,
        }
    }

    /// Resolve slot references against a parameter vector.
    pub fn resolve(&self, theta: &[f64]) -> Result<Vec<f64>> {
        if self.params.len() != self.kind.param_count() {
            return Err(Error::ParamCount {
                expected: self.kind.param_count(),
                got: self.params.len(),
            });
        }
        self.params
            .iter()
            .map(|p| {
                let v = match *p {
                    ParamSlot::Slot(s) => *theta.get(s).ok_or(Error::SlotOutOfRange {
                        slot: s,
                        q: theta.len(),
                    })?,
                    ParamSlot::Fixed(v) => v,
                };
                if !v.is_finite() {
                    return Err(Error::NonFiniteParam);
                }
                Ok(v)
            })
            .collect()
    }
}

/// An ordered gate list over `modes` qumodes at cutoff `cutoff`, drawing its
/// free parameters from a vector of length `n_params`.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub modes: usize,
    pub cutoff: usize,
    pub gates: Vec<GateSpec>,
    pub n_params: usize,
}

impl Circuit {
    /// Validates arity/target/slot consistency: every slot below `n_params`
    /// must be referenced at least once and every target must be in range.
    pub fn new(modes: usize, cutoff: usize, gates: Vec<GateSpec>, n_params: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::NoModes);
        }
        if cutoff < 2 {
            return Err(Error::InvalidCutoff(cutoff));
        }
        let mut referenced = vec![false; n_params];
        for g in &gates {
            if g.targets.len() != g.kind.arity() {
                return Err(Error::DimensionMismatch(format!(
                    "{} gate takes {} targets, got {}",
                    g.kind.name(),
                    g.kind.arity(),
                    g.targets.len()
                )));
            }
            if g.params.len() != g.kind.param_count() {
                return Err(Error::ParamCount {
                    expected: g.kind.param_count(),
                    got: g.params.len(),
                });
            }
            for &t in &g.targets {
                if t >= modes {
                    return Err(Error::ModeOutOfRange { index: t, modes });
                }
            }
            if g.targets.len() == 2 && g.targets[0] == g.targets[1] {
                return Err(Error::DuplicateTarget(g.targets[0]));
            }
            for p in &g.params {
                if let ParamSlot::Slot(s) = *p {
                    if s >= n_params {
                        return Err(Error::SlotOutOfRange {
                            slot: s,
                            q: n_params,
                        });
                    }
                    referenced[s] = true;
                }
            }
        }
        if let Some(unused) = referenced.iter().position(|&r| !r) {
            return Err(Error::UnreferencedSlot(unused));
        }
        Ok(Circuit {
            modes,
            cutoff,
            gates,
            n_params,
        })
    }
}

/// Cached spectral data of a gate generator.
///
/// `vecs` is `None` for generators diagonal in the Fock basis; `vals` are the
/// generator eigenvalues (basis-ordered in the diagonal case).
struct Generator {
    vals: Vec<f64>,
    vecs: Option<DMatrix<Complex64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct GenKey {
    kind: GateKind,
    phase_bits: u64,
    dim: usize,
    hbar_bits: u64,
}

fn generator_cache() -> &'static RwLock<HashMap<GenKey, Arc<Generator>>> {
    static CACHE: OnceLock<RwLock<HashMap<GenKey, Arc<Generator>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn hermitian_eigen(op: &TruncatedOperator) -> Generator {
    let eig = op.entries().clone().symmetric_eigen();
    Generator {
        vals: eig.eigenvalues.iter().copied().collect(),
        vecs: Some(eig.eigenvectors),
    }
}

/// Builds the unit-scale Hermitian generator for a gate kind. `phase` carries
/// the angle parameter for the kinds whose generator depends on one.
fn build_generator(kind: GateKind, phase: f64, d: usize, hbar: f64) -> Result<Generator> {
    let a = TruncatedOperator::annihilation(d)?;
    let ad = a.adjoint();
    let i = Complex64::I;
    match kind {
        GateKind::R => Ok(Generator {
            vals: (0..d).map(|n| n as f64).collect(),
            vecs: None,
        }),
        GateKind::Kerr => Ok(Generator {
            vals: (0..d).map(|n| (n * n) as f64).collect(),
            vecs: None,
        }),
        GateKind::CrossKerr => {
            let mut vals = Vec::with_capacity(d * d);
            for ni in 0..d {
                for nj in 0..d {
                    vals.push((ni * nj) as f64);
                }
            }
            Ok(Generator { vals, vecs: None })
        }
        GateKind::X => {
            let p = TruncatedOperator::momentum(d, hbar)?;
            Ok(hermitian_eigen(&p))
        }
        GateKind::Pz => {
            let p = TruncatedOperator::momentum(d, hbar)?;
            Ok(hermitian_eigen(&p.mul(&p)?))
        }
        GateKind::QuadPhase => {
            let x = TruncatedOperator::position(d, hbar)?;
            Ok(hermitian_eigen(&x.mul(&x)?))
        }
        GateKind::CubicPhase => {
            let x = TruncatedOperator::position(d, hbar)?;
            Ok(hermitian_eigen(&x.mul(&x)?.mul(&x)?))
        }
        GateKind::CZ => {
            let x = TruncatedOperator::position(d, hbar)?;
            Ok(hermitian_eigen(&x.kron(&x)?))
        }
        GateKind::Disp => {
            // -i (e^{i phase} a^dag - e^{-i phase} a)
            let g = ad
                .scale(-i * Complex64::cis(phase))
                .add(&a.scale(i * Complex64::cis(-phase)))?;
            Ok(hermitian_eigen(&g))
        }
        GateKind::Squeeze => {
            // -(i/2) (e^{-i phase} a^2 - e^{i phase} a^dag^2)
            let a2 = a.mul(&a)?;
            let ad2 = ad.mul(&ad)?;
            let g = a2
                .scale(-i * Complex64::cis(-phase) * Complex64::new(0.5, 0.0))
                .add(&ad2.scale(i * Complex64::cis(phase) * Complex64::new(0.5, 0.0)))?;
            Ok(hermitian_eigen(&g))
        }
        GateKind::BS => {
            // -i (e^{i phase} a_i a_j^dag - e^{-i phase} a_i^dag a_j)
            let aiajd = a.kron(&ad)?;
            let adiaj = ad.kron(&a)?;
            let g = aiajd
                .scale(-i * Complex64::cis(phase))
                .add(&adiaj.scale(i * Complex64::cis(-phase)))?;
            Ok(hermitian_eigen(&g))
        }
        GateKind::TwoModeSqueeze => {
            // -i (e^{i phase} a_i^dag a_j^dag - e^{-i phase} a_i a_j)
            let adad = ad.kron(&ad)?;
            let aa = a.kron(&a)?;
            let g = adad
                .scale(-i * Complex64::cis(phase))
                .add(&aa.scale(i * Complex64::cis(-phase)))?;
            Ok(hermitian_eigen(&g))
        }
    }
}

fn cached_generator(kind: GateKind, phase: f64, d: usize, hbar: f64) -> Result<Arc<Generator>> {
    let key = GenKey {
        kind,
        phase_bits: phase.to_bits(),
        dim: d,
        hbar_bits: hbar.to_bits(),
    };
    if let Some(found) = generator_cache().read().unwrap().get(&key) {
        return Ok(Arc::clone(found));
    }
    let built = Arc::new(build_generator(kind, phase, d, hbar)?);
    let mut guard = generator_cache().write().unwrap();
    Ok(Arc::clone(guard.entry(key).or_insert(built)))
}

/// The (generator, scale) pair realizing a gate as `exp(i scale G)`.
fn gate_action(
    kind: GateKind,
    params: &[f64],
    d: usize,
    hbar: f64,
) -> Result<(Arc<Generator>, f64)> {
    let (phase, scale) = match kind {
        GateKind::R => (0.0, params[0]),
        GateKind::Kerr => (0.0, params[0]),
        GateKind::CrossKerr => (0.0, params[0]),
        GateKind::X => (0.0, -params[0] / hbar),
        GateKind::Pz => (0.0, params[0] / (2.0 * hbar)),
        GateKind::QuadPhase => (0.0, params[0] / (2.0 * hbar)),
        GateKind::CubicPhase => (0.0, params[0] / (3.0 * hbar)),
        GateKind::CZ => (0.0, params[0] / hbar),
        GateKind::Disp => {
            let alpha = Complex64::new(params[0], params[1]);
            (alpha.arg(), alpha.norm())
        }
        GateKind::Squeeze => (params[1], params[0]),
        GateKind::BS => (params[1], params[0]),
        GateKind::TwoModeSqueeze => {
            let z = Complex64::new(params[0], params[1]);
            (z.arg(), z.norm())
        }
    };
    Ok((cached_generator(kind, phase, d, hbar)?, scale))
}

/// Builds the dense unitary for one gate.
pub fn make_gate(spec: &GateSpec, theta: &[f64], d: usize, hbar: f64) -> Result<TruncatedOperator> {
    if d < 2 {
        return Err(Error::InvalidCutoff(d));
    }
    let params = spec.resolve(theta)?;
    let (gen, scale) = gate_action(spec.kind, &params, d, hbar)?;
    let dim = gen.vals.len();
    let entries = match &gen.vecs {
        None => DMatrix::from_fn(dim, dim, |r, c| {
            if r == c {
                Complex64::cis(scale * gen.vals[r])
            } else {
                Complex64::ZERO
            }
        }),
        Some(v) => {
            let mut scaled = v.clone();
            for (c, &val) in gen.vals.iter().enumerate() {
                let ph = Complex64::cis(scale * val);
                for r in 0..dim {
                    scaled[(r, c)] *= ph;
                }
            }
            scaled * v.adjoint()
        }
    };
    Ok(TruncatedOperator::from_matrix(
        entries,
        spec.kind.arity(),
        Some(hbar),
    ))
}

/// Applies one gate to the state, choosing between a prebuilt matrix and the
/// three-step eigenbasis route depending on which contraction is cheaper.
fn apply_gate_spec(state: &mut ModeState, spec: &GateSpec, theta: &[f64], hbar: f64) -> Result<()> {
    let d = state.cutoff();
    let params = spec.resolve(theta)?;
    let (gen, scale) = gate_action(spec.kind, &params, d, hbar)?;
    for &t in &spec.targets {
        if t >= state.modes() {
            return Err(Error::ModeOutOfRange {
                index: t,
                modes: state.modes(),
            });
        }
    }
    if spec.targets.len() == 2 && spec.targets[0] == spec.targets[1] {
        return Err(Error::DuplicateTarget(spec.targets[0]));
    }
    let dim = gen.vals.len();
    match &gen.vecs {
        None => {
            let phases: Vec<Complex64> = gen
                .vals
                .iter()
                .map(|&v| Complex64::cis(scale * v))
                .collect();
            match spec.kind.arity() {
                1 => state.apply_phases_single(&phases, spec.targets[0]),
                _ => state.apply_phases_pair(&phases, spec.targets[0], spec.targets[1]),
            }
        }
        Some(v) => {
            let full = state.amplitudes().len();
            if dim * dim <= full {
                // materializing the unitary costs less than a second contraction
                let mut scaled = v.clone();
                for (c, &val) in gen.vals.iter().enumerate() {
                    let ph = Complex64::cis(scale * val);
                    for r in 0..dim {
                        scaled[(r, c)] *= ph;
                    }
                }
                let u = scaled * v.adjoint();
                match spec.kind.arity() {
                    1 => state.contract_single_checked(&u, spec.targets[0], false),
                    _ => state.contract_pair_checked(&u, spec.targets[0], spec.targets[1], false),
                }
            } else {
                let phases: Vec<Complex64> = gen
                    .vals
                    .iter()
                    .map(|&v| Complex64::cis(scale * v))
                    .collect();
                match spec.kind.arity() {
                    1 => {
                        let t = spec.targets[0];
                        state.contract_single_checked(v, t, true);
                        state.apply_phases_single(&phases, t);
                        state.contract_single_checked(v, t, false);
                    }
                    _ => {
                        let (t1, t2) = (spec.targets[0], spec.targets[1]);
                        state.contract_pair_checked(v, t1, t2, true);
                        state.apply_phases_pair(&phases, t1, t2);
                        state.contract_pair_checked(v, t1, t2, false);
                    }
                }
            }
        }
    }
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > crate::fock::NORM_TOL {
        return Err(Error::NormDrift(norm));
    }
    Ok(())
}

fn check_run_inputs(circuit: &Circuit, theta: &[f64], initial: &ModeState) -> Result<()> {
    if theta.len() != circuit.n_params {
        return Err(Error::ParamVectorLength {
            expected: circuit.n_params,
            got: theta.len(),
        });
    }
    if initial.modes() != circuit.modes {
        return Err(Error::ModeCountMismatch(initial.modes(), circuit.modes));
    }
    if initial.cutoff() != circuit.cutoff {
        return Err(Error::DimensionMismatch(format!(
            "state cutoff {} vs circuit cutoff {}",
            initial.cutoff(),
            circuit.cutoff
        )));
    }
    Ok(())
}

/// Runs the circuit, returning the final state.
pub fn run_circuit(
    circuit: &Circuit,
    theta: &[f64],
    initial: &ModeState,
    hbar: f64,
) -> Result<ModeState> {
    check_run_inputs(circuit, theta, initial)?;
    let mut state = initial.clone();
    for spec in &circuit.gates {
        apply_gate_spec(&mut state, spec, theta, hbar)?;
    }
    Ok(state)
}

/// Runs the circuit recording the state after every gate; entry `k` is the
/// state with the first `k` gates applied. Used for prefix-reuse in
/// finite-difference gradients.
pub fn run_circuit_states(
    circuit: &Circuit,
    theta: &[f64],
    initial: &ModeState,
    hbar: f64,
) -> Result<Vec<ModeState>> {
    check_run_inputs(circuit, theta, initial)?;
    let mut states = Vec::with_capacity(circuit.gates.len() + 1);
    states.push(initial.clone());
    for spec in &circuit.gates {
        let mut next = states.last().unwrap().clone();
        apply_gate_spec(&mut next, spec, theta, hbar)?;
        states.push(next);
    }
    Ok(states)
}

/// Applies gates `start..` to a state that already has the first `start`
/// gates applied.
pub fn run_circuit_from(
    circuit: &Circuit,
    theta: &[f64],
    state: &ModeState,
    start: usize,
    hbar: f64,
) -> Result<ModeState> {
    if theta.len() != circuit.n_params {
        return Err(Error::ParamVectorLength {
            expected: circuit.n_params,
            got: theta.len(),
        });
    }
    let mut out = state.clone();
    for spec in &circuit.gates[start..] {
        apply_gate_spec(&mut out, spec, theta, hbar)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ModeState, TruncatedOperator};
    use proptest::prelude::*;

    const HBAR: f64 = 2.0;

    fn fixed(kind: GateKind, targets: Vec<usize>, params: Vec<f64>) -> GateSpec {
        GateSpec::new(
            kind,
            targets,
            params.into_iter().map(ParamSlot::Fixed).collect(),
        )
    }

    fn gate(kind: GateKind, targets: Vec<usize>, params: Vec<f64>, d: usize) -> TruncatedOperator {
        make_gate(&fixed(kind, targets, params), &[], d, HBAR).unwrap()
    }

    #[test]
    fn rotation_is_diagonal_phase_ladder() {
        let d = 4;
        let phi = 0.81;
        let u = gate(GateKind::R, vec![0], vec![phi], d);
        for n in 0..d {
            assert!((u.entry(n, n) - Complex64::cis(phi * n as f64)).norm() < 1e-12);
            for m in 0..d {
                if m != n {
                    assert!(u.entry(m, n).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pz_matches_rotated_quad_phase() {
        // Pz(s) must equal R(-pi/2) P(s) R(pi/2) and exp(i s p^2 / 2 hbar).
        let d = 12;
        let s = 0.63;
        let pz = gate(GateKind::Pz, vec![0], vec![s], d);

        let r_plus = gate(GateKind::R, vec![0], vec![std::f64::consts::FRAC_PI_2], d);
        let r_minus = gate(GateKind::R, vec![0], vec![-std::f64::consts::FRAC_PI_2], d);
        let p = gate(GateKind::QuadPhase, vec![0], vec![s], d);
        let conj = r_minus.mul(&p).unwrap().mul(&r_plus).unwrap();

        let pm = TruncatedOperator::momentum(d, HBAR).unwrap();
        let direct = pm
            .mul(&pm)
            .unwrap()
            .hermitian_exp(s / (2.0 * HBAR))
            .unwrap();

        let dev1 = pz
            .sub(&conj)
            .unwrap()
            .entries()
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        let dev2 = pz
            .sub(&direct)
            .unwrap()
            .entries()
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        assert!(dev1 < 1e-9, "Pz vs R P R deviation {dev1}");
        assert!(dev2 < 1e-9, "Pz vs exp(i s p^2/2hbar) deviation {dev2}");
    }

    #[test]
    fn cross_kerr_phases_products() {
        let d = 4;
        let kappa = 0.57;
        let u = gate(GateKind::CrossKerr, vec![0, 1], vec![kappa], d);
        for ni in 0..d {
            for nj in 0..d {
                let idx = ni * d + nj;
                let expected = Complex64::cis(kappa * (ni * nj) as f64);
                assert!((u.entry(idx, idx) - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn kerr_full_revolution_on_two_photons() {
        let d = 5;
        let u = gate(GateKind::Kerr, vec![0], vec![std::f64::consts::PI], d);
        // exp(i pi 4) = 1 on |2>
        assert!((u.entry(2, 2) - Complex64::ONE).norm() < 1e-12);
    }

    #[test]
    fn x_gate_displaces_position_mean() {
        let d = 20;
        let s = 0.5;
        let circuit = Circuit::new(
            1,
            d,
            vec![GateSpec::new(
                GateKind::X,
                vec![0],
                vec![ParamSlot::Slot(0)],
            )],
            1,
        )
        .unwrap();
        let out = run_circuit(&circuit, &[s], &ModeState::vacuum(1, d).unwrap(), HBAR).unwrap();
        let mean = out.mean_position(0, HBAR).unwrap();
        assert!((mean - s).abs() < 1e-9, "expected <x> = {s}, got {mean}");
    }

    #[test]
    fn displacement_sign_convention() {
        let d = 20;
        let alpha = 0.3;
        let u = gate(GateKind::Disp, vec![0], vec![alpha, 0.0], d);
        let st = ModeState::vacuum(1, d)
            .unwrap()
            .apply_gate(&u, &[0])
            .unwrap();
        let mean = st.mean_position(0, HBAR).unwrap();
        let expected = (2.0 * HBAR).sqrt() * alpha;
        assert!((mean - expected).abs() < 1e-9);
    }

    #[test]
    fn balanced_beamsplitter_splits_single_photon() {
        let d = 3;
        let u = gate(
            GateKind::BS,
            vec![0, 1],
            vec![std::f64::consts::FRAC_PI_4, 0.0],
            d,
        );
        let st = ModeState::fock_basis(&[1, 0], d)
            .unwrap()
            .apply_gate(&u, &[0, 1])
            .unwrap();
        let probs = st.fock_probabilities(1e-12).unwrap();
        assert_eq!(probs.len(), 2);
        assert!((probs[&vec![1, 0]] - 0.5).abs() < 1e-10);
        assert!((probs[&vec![0, 1]] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn empty_circuit_is_identity() {
        let d = 6;
        let circuit = Circuit::new(2, d, vec![], 0).unwrap();
        let st = ModeState::vacuum(2, d).unwrap();
        let out = run_circuit(&circuit, &[], &st, HBAR).unwrap();
        assert_eq!(out, st);
    }

    #[test]
    fn zero_params_make_identity_circuit() {
        let d = 6;
        let gates = vec![
            GateSpec::new(GateKind::X, vec![0], vec![ParamSlot::Slot(0)]),
            GateSpec::new(GateKind::X, vec![1], vec![ParamSlot::Slot(1)]),
            GateSpec::new(GateKind::CZ, vec![0, 1], vec![ParamSlot::Slot(2)]),
        ];
        let circuit = Circuit::new(2, d, gates, 3).unwrap();
        let st = ModeState::vacuum(2, d).unwrap();
        let out = run_circuit(&circuit, &[0.0, 0.0, 0.0], &st, HBAR).unwrap();
        for (a, b) in out.amplitudes().iter().zip(st.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn parameter_length_checked() {
        let circuit = Circuit::new(
            1,
            4,
            vec![GateSpec::new(
                GateKind::R,
                vec![0],
                vec![ParamSlot::Slot(0)],
            )],
            1,
        )
        .unwrap();
        let st = ModeState::vacuum(1, 4).unwrap();
        assert!(matches!(
            run_circuit(&circuit, &[0.1, 0.2], &st, HBAR),
            Err(Error::ParamVectorLength { .. })
        ));
    }

    #[test]
    fn circuit_validation_catches_unreferenced_slot() {
        let gates = vec![GateSpec::new(
            GateKind::R,
            vec![0],
            vec![ParamSlot::Slot(0)],
        )];
        assert!(matches!(
            Circuit::new(1, 4, gates, 2),
            Err(Error::UnreferencedSlot(1))
        ));
    }

    #[test]
    fn composition_matches_sequential_runs() {
        let d = 5;
        let gates = vec![
            GateSpec::new(GateKind::X, vec![0], vec![ParamSlot::Slot(0)]),
            GateSpec::new(
                GateKind::Squeeze,
                vec![1],
                vec![ParamSlot::Slot(1), ParamSlot::Fixed(0.0)],
            ),
            GateSpec::new(
                GateKind::BS,
                vec![0, 1],
                vec![ParamSlot::Slot(2), ParamSlot::Fixed(0.0)],
            ),
            GateSpec::new(GateKind::CubicPhase, vec![0], vec![ParamSlot::Slot(3)]),
        ];
        let full = Circuit::new(2, d, gates.clone(), 4).unwrap();
        let first = Circuit::new(2, d, gates[..2].to_vec(), 2).unwrap();
        let theta = [0.4, 0.2, 0.9, 0.15];
        let st = ModeState::vacuum(2, d).unwrap();
        let via_full = run_circuit(&full, &theta, &st, HBAR).unwrap();
        let mid = run_circuit(&first, &theta[..2], &st, HBAR).unwrap();
        let mut via_parts = mid;
        for spec in &gates[2..] {
            let resolved: Vec<f64> = spec
                .params
                .iter()
                .map(|p| match *p {
                    ParamSlot::Slot(s) => theta[s],
                    ParamSlot::Fixed(v) => v,
                })
                .collect();
            let g = make_gate(
                &GateSpec::new(
                    spec.kind,
                    spec.targets.clone(),
                    resolved.into_iter().map(ParamSlot::Fixed).collect(),
                ),
                &[],
                d,
                HBAR,
            )
            .unwrap();
            via_parts.apply_gate_mut(&g, &spec.targets).unwrap();
        }
        for (a, b) in via_full.amplitudes().iter().zip(via_parts.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn number_conserved_by_passive_gates() {
        let d = 6;
        let gates = vec![
            GateSpec::new(GateKind::R, vec![0], vec![ParamSlot::Slot(0)]),
            GateSpec::new(GateKind::R, vec![1], vec![ParamSlot::Slot(1)]),
            GateSpec::new(
                GateKind::BS,
                vec![0, 1],
                vec![ParamSlot::Slot(2), ParamSlot::Fixed(0.4)],
            ),
            GateSpec::new(
                GateKind::BS,
                vec![1, 2],
                vec![ParamSlot::Slot(3), ParamSlot::Fixed(0.0)],
            ),
            GateSpec::new(GateKind::R, vec![2], vec![ParamSlot::Slot(4)]),
        ];
        let circuit = Circuit::new(3, d, gates, 5).unwrap();
        let mut st = ModeState::fock_basis(&[2, 1, 0], d).unwrap();
        // also mix in some coherence
        let r = gate(GateKind::BS, vec![0, 2], vec![0.3, 0.1], d);
        st.apply_gate_mut(&r, &[0, 2]).unwrap();
        let before: f64 = (0..3).map(|m| st.mean_photon(m).unwrap()).sum();
        let out = run_circuit(&circuit, &[0.7, -0.3, 1.1, 0.5, 0.2], &st, HBAR).unwrap();
        let after: f64 = (0..3).map(|m| out.mean_photon(m).unwrap()).sum();
        assert!(
            (before - after).abs() < 1e-9,
            "total photon number drifted: {before} -> {after}"
        );
    }

    /// Covariance matrix of the quadratures in (x_0, p_0, x_1, p_1, ...) order.
    fn covariance(st: &ModeState, hbar: f64) -> DMatrix<f64> {
        let n = st.modes();
        let d = st.cutoff();
        let (x, p) = TruncatedOperator::quadratures(d, hbar).unwrap();
        let quads = [x, p];
        let mut means = vec![0.0; 2 * n];
        for m in 0..n {
            for (qi, q) in quads.iter().enumerate() {
                means[2 * m + qi] = st.expect(q, m).unwrap();
            }
        }
        let mut cov = DMatrix::zeros(2 * n, 2 * n);
        for r in 0..2 * n {
            for c in 0..2 * n {
                let (mr, qr) = (r / 2, r % 2);
                let (mc, qc) = (c / 2, c % 2);
                // <{A,B}>/2 - <A><B>
                let mut left = st.clone();
                left.apply_operator_mut(&quads[qr], &[mr]).unwrap();
                let mut right = st.clone();
                right.apply_operator_mut(&quads[qc], &[mc]).unwrap();
                let mut acc = Complex64::ZERO;
                for (a, b) in left.amplitudes().iter().zip(right.amplitudes()) {
                    acc += a.conj() * b;
                }
                cov[(r, c)] = acc.re - means[r] * means[c];
            }
        }
        // symmetrize (the anticommutator average)
        let covt = cov.transpose();
        (cov + covt) * 0.5
    }

    fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Vec<f64> {
        let n2 = cov.nrows();
        // omega in (x,p) interleaved order
        let mut omega = DMatrix::zeros(n2, n2);
        for m in 0..n2 / 2 {
            omega[(2 * m, 2 * m + 1)] = 1.0;
            omega[(2 * m + 1, 2 * m)] = -1.0;
        }
        let eig = cov.clone().symmetric_eigen();
        let sqrt_vals: Vec<f64> = eig.eigenvalues.iter().map(|&v| v.max(0.0).sqrt()).collect();
        let mut sqrt_cov = DMatrix::zeros(n2, n2);
        for (k, &sv) in sqrt_vals.iter().enumerate() {
            let col = eig.eigenvectors.column(k);
            for r in 0..n2 {
                for c in 0..n2 {
                    sqrt_cov[(r, c)] += sv * col[r] * col[c];
                }
            }
        }
        let k = &sqrt_cov * &omega * &sqrt_cov;
        // i K is Hermitian; its eigenvalues are +/- the symplectic spectrum
        let ik = DMatrix::from_fn(n2, n2, |r, c| Complex64::new(0.0, k[(r, c)]));
        let vals = ik.symmetric_eigen().eigenvalues;
        let mut nus: Vec<f64> = vals.iter().filter(|&&v| v > 0.0).copied().collect();
        nus.sort_by(f64::total_cmp);
        nus
    }

    #[test]
    fn gaussian_circuit_respects_uncertainty_bound() {
        let d = 14;
        let gates = vec![
            GateSpec::new(
                GateKind::Disp,
                vec![0],
                vec![ParamSlot::Slot(0), ParamSlot::Fixed(0.1)],
            ),
            GateSpec::new(
                GateKind::Squeeze,
                vec![1],
                vec![ParamSlot::Slot(1), ParamSlot::Fixed(0.3)],
            ),
            GateSpec::new(
                GateKind::BS,
                vec![0, 1],
                vec![ParamSlot::Slot(2), ParamSlot::Fixed(0.0)],
            ),
            GateSpec::new(GateKind::QuadPhase, vec![0], vec![ParamSlot::Slot(3)]),
            GateSpec::new(GateKind::CZ, vec![0, 1], vec![ParamSlot::Slot(4)]),
            GateSpec::new(
                GateKind::TwoModeSqueeze,
                vec![0, 1],
                vec![ParamSlot::Slot(5), ParamSlot::Fixed(0.0)],
            ),
            GateSpec::new(GateKind::X, vec![1], vec![ParamSlot::Slot(6)]),
            GateSpec::new(GateKind::Pz, vec![0], vec![ParamSlot::Slot(7)]),
            GateSpec::new(GateKind::R, vec![0], vec![ParamSlot::Slot(8)]),
        ];
        let circuit = Circuit::new(2, d, gates, 9).unwrap();
        let theta = [0.2, 0.25, 0.6, 0.3, 0.2, 0.15, 0.3, 0.25, 0.9];
        let st = ModeState::vacuum(2, d).unwrap();
        let out = run_circuit(&circuit, &theta, &st, HBAR).unwrap();
        // keep occupation low so the cutoff does not distort second moments
        let total_n: f64 = (0..2).map(|m| out.mean_photon(m).unwrap()).sum();
        assert!(total_n < 2.0, "test circuit too hot: <n> = {total_n}");
        let cov = covariance(&out, HBAR);
        let nus = symplectic_eigenvalues(&cov);
        for nu in nus {
            assert!(
                nu >= HBAR / 2.0 - 1e-6,
                "symplectic eigenvalue {nu} below hbar/2"
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn constructed_gates_are_unitary(
            kind_idx in 0usize..12,
            p0 in -1.5f64..1.5,
            p1 in -1.5f64..1.5,
        ) {
            let kinds = [
                GateKind::R, GateKind::Disp, GateKind::Squeeze, GateKind::BS,
                GateKind::QuadPhase, GateKind::CZ, GateKind::TwoModeSqueeze,
                GateKind::CubicPhase, GateKind::Kerr, GateKind::CrossKerr,
                GateKind::X, GateKind::Pz,
            ];
            let kind = kinds[kind_idx];
            let d = 7;
            let targets: Vec<usize> = (0..kind.arity()).collect();
            let params: Vec<f64> = match kind.param_count() {
                1 => vec![p0],
                _ => vec![p0, p1],
            };
            let u = gate(kind, targets, params, d);
            prop_assert!(u.unitary_deviation() < 1e-10);
        }

        #[test]
        fn random_hermitian_exp_is_unitary(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let d = 15;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut m = DMatrix::zeros(d, d);
            for r in 0..d {
                for c in r..d {
                    let re = rng.random_range(-1.0..1.0);
                    let im = if r == c { 0.0 } else { rng.random_range(-1.0..1.0) };
                    m[(r, c)] = Complex64::new(re, im);
                    m[(c, r)] = Complex64::new(re, -im);
                }
            }
            let g = TruncatedOperator::from_matrix(m, 1, None);
            let u = g.hermitian_exp(0.8).unwrap();
            prop_assert!(u.unitary_deviation() < 1e-10);
        }

        #[test]
        fn disjoint_targets_commute(
            s1 in -0.8f64..0.8,
            s2 in -0.8f64..0.8,
            k1 in 0usize..3,
            k2 in 0usize..3,
        ) {
            let d = 5;
            let kinds = [GateKind::X, GateKind::Squeeze, GateKind::CubicPhase];
            let params = |kind: GateKind, s: f64| -> Vec<f64> {
                match kind.param_count() { 1 => vec![s], _ => vec![s, 0.0] }
            };
            let u = gate(kinds[k1], vec![0], params(kinds[k1], s1), d);
            let v = gate(kinds[k2], vec![0], params(kinds[k2], s2), d);
            let st = {
                let mut st = ModeState::vacuum(2, d).unwrap();
                let w = gate(GateKind::BS, vec![0, 1], vec![0.4, 0.0], d);
                let x0 = gate(GateKind::X, vec![0], vec![0.7], d);
                st.apply_gate_mut(&x0, &[0]).unwrap();
                st.apply_gate_mut(&w, &[0, 1]).unwrap();
                st
            };
            let uv = st.apply_gate(&u, &[1]).unwrap().apply_gate(&v, &[0]).unwrap();
            let vu = st.apply_gate(&v, &[0]).unwrap().apply_gate(&u, &[1]).unwrap();
            for (a, b) in uv.amplitudes().iter().zip(vu.amplitudes()) {
                prop_assert!((a - b).norm() < 1e-11);
            }
        }

        #[test]
        fn random_circuit_probabilities_sum_to_one(
            s1 in -1.0f64..1.0,
            s2 in -1.0f64..1.0,
            s3 in -1.0f64..1.0,
        ) {
            let d = 6;
            let gates = vec![
                GateSpec::new(GateKind::X, vec![0], vec![ParamSlot::Slot(0)]),
                GateSpec::new(GateKind::TwoModeSqueeze, vec![0, 1], vec![ParamSlot::Slot(1), ParamSlot::Fixed(0.0)]),
                GateSpec::new(GateKind::CubicPhase, vec![1], vec![ParamSlot::Slot(2)]),
            ];
            let circuit = Circuit::new(2, d, gates, 3).unwrap();
            let out = run_circuit(&circuit, &[s1, s2, s3], &ModeState::vacuum(2, d).unwrap(), HBAR).unwrap();
            let probs = out.fock_probabilities(0.0).unwrap();
            let total: f64 = probs.values().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }
}
