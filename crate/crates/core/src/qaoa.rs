//! CV-QAOA baseline circuits for number-encoded quadratic costs.
//!
//! The cost unitary `exp(-i gamma F(n))` is exact for costs quadratic in the
//! photon numbers: it splits into commuting rotation, Kerr, and cross-Kerr
//! gates (all diagonal in the Fock basis), with the constant term dropped as
//! a global phase. The mixer `exp(-i beta sum_i p_i^2)` is a `Pz` gate per
//! mode. Parameters enter through a reduced map: the shared-angle variant
//! exposes one `(gamma, beta)` pair per layer, the multi-angle variant gives
//! every cost gate its own angle plus one mixer angle per layer.

use crate::error::{Error, Result};
use crate::fock::ModeState;
use crate::gates::{make_gate, Circuit, GateKind, GateSpec, ParamSlot};
use crate::problems::{Encoding, ProblemSpec};
use crate::variational::ParamMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QaoaVariant {
    SharedAngle,
    MultiAngle,
}

/// Coefficients of a cost quadratic in the photon numbers:
/// `F(n) = constant + sum a_i n_i + sum b_i n_i^2 + sum_{i<j} c_ij n_i n_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticCost {
    pub constant: f64,
    pub linear: Vec<f64>,
    pub square: Vec<f64>,
    pub cross: Vec<(usize, usize, f64)>,
}

/// Extracts the quadratic coefficients from a number-diagonal Hamiltonian.
///
/// In normal order `n^2 = a^dag^2 a^2 + a^dag a`, so the quadratic
/// coefficient is read from the quartic monomial and subtracted from the
/// bare number coefficient.
pub fn quadratic_cost(problem: &ProblemSpec) -> Result<QuadraticCost> {
    if problem.encoding != Encoding::FockSpace {
        return Err(Error::NotQuadratic("problem is not number-encoded".into()));
    }
    let n = problem.n_vars;
    let mut constant = 0.0;
    let mut raw_linear = vec![0.0; n];
    let mut square = vec![0.0; n];
    let mut cross = Vec::new();
    for (key, &coeff) in problem.hamiltonian.terms() {
        if coeff.im.abs() > 1e-10 {
            return Err(Error::NotQuadratic(format!(
                "complex coefficient {coeff} on a number monomial"
            )));
        }
        let active: Vec<(usize, u8, u8)> = key
            .iter()
            .enumerate()
            .filter(|(_, &(c, a))| c != 0 || a != 0)
            .map(|(m, &(c, a))| (m, c, a))
            .collect();
        match active.as_slice() {
            [] => constant += coeff.re,
            [(m, 1, 1)] => raw_linear[*m] += coeff.re,
            [(m, 2, 2)] => square[*m] += coeff.re,
            [(i, 1, 1), (j, 1, 1)] => cross.push((*i, *j, coeff.re)),
            _ => {
                return Err(Error::NotQuadratic(format!(
                    "monomial {key:?} is not quadratic in the photon numbers"
                )))
            }
        }
    }
    let linear: Vec<f64> = raw_linear
        .iter()
        .zip(square.iter())
        .map(|(r, b)| r - b)
        .collect();
    Ok(QuadraticCost {
        constant,
        linear,
        square,
        cross,
    })
}

/// Gate template plus the reduced-slot scale applied to its angle.
pub struct ScaledGate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub scale: f64,
}

/// Cost-unitary gate list for one layer: `R(-gamma a_i)`, `Kerr(-gamma b_i)`,
/// `CrossKerr(-gamma c_ij)` for the nonzero cross terms.
pub fn qaoa_cost_unitary(cost: &QuadraticCost) -> Vec<ScaledGate> {
    let n = cost.linear.len();
    let mut gates = Vec::new();
    for (m, &a) in cost.linear.iter().enumerate() {
        gates.push(ScaledGate {
            kind: GateKind::R,
            targets: vec![m],
            scale: -a,
        });
    }
    for (m, &b) in cost.square.iter().enumerate() {
        gates.push(ScaledGate {
            kind: GateKind::Kerr,
            targets: vec![m],
            scale: -b,
        });
    }
    for &(i, j, c) in &cost.cross {
        if c != 0.0 {
            gates.push(ScaledGate {
                kind: GateKind::CrossKerr,
                targets: vec![i, j],
                scale: -c,
            });
        }
    }
    debug_assert!(gates.len() >= n);
    gates
}

/// Mixer gate list for one layer: `Pz(-2 hbar beta)` per mode realizes
/// `exp(-i beta p^2)` on every mode.
pub fn qaoa_mixer(modes: usize, hbar: f64) -> Vec<ScaledGate> {
    (0..modes)
        .map(|m| ScaledGate {
            kind: GateKind::Pz,
            targets: vec![m],
            scale: -2.0 * hbar,
        })
        .collect()
}

/// A complete baseline build: circuit, squeezed input, and the reduced
/// parameter map.
#[derive(Debug, Clone)]
pub struct CvQaoa {
    pub circuit: Circuit,
    pub initial: ModeState,
    pub param_map: ParamMap,
    pub variant: QaoaVariant,
    pub layers: usize,
}

/// Squeezing strength of the baseline's input states.
pub const QAOA_SQUEEZE_R: f64 = 1.0;

/// Assembles the baseline for a quadratic Fock problem: `p` layers of cost
/// gates followed by the momentum mixer, acting on per-mode squeezed vacuum.
///
/// Shared-angle exposes `Q = 2p` parameters (one cost angle and one mixer
/// angle per layer). Multi-angle gives each cost gate its own parameter and
/// keeps one shared mixer angle per layer; for the three-item knapsack with
/// all-to-all cross terms that is `Q = 10p`.
pub fn build_cvqaoa(
    problem: &ProblemSpec,
    layers: usize,
    variant: QaoaVariant,
    cutoff: usize,
    hbar: f64,
) -> Result<CvQaoa> {
    if layers == 0 {
        return Err(Error::InvalidProblem("layer count must be positive".into()));
    }
    let cost = quadratic_cost(problem)?;
    let modes = problem.n_vars;
    let cost_gates = qaoa_cost_unitary(&cost);
    let mixer_gates = qaoa_mixer(modes, hbar);

    let per_layer_reduced = match variant {
        QaoaVariant::SharedAngle => 2,
        QaoaVariant::MultiAngle => cost_gates.len() + 1,
    };
    let reduced_len = layers * per_layer_reduced;

    let mut gates = Vec::new();
    let mut entries = Vec::new();
    let mut circuit_slot = 0usize;
    for layer in 0..layers {
        let base = layer * per_layer_reduced;
        for (k, template) in cost_gates.iter().enumerate() {
            let reduced_idx = match variant {
                QaoaVariant::SharedAngle => base,
                QaoaVariant::MultiAngle => base + k,
            };
            let scale = match variant {
                QaoaVariant::SharedAngle => template.scale,
                // each gate's angle is its own free parameter
                QaoaVariant::MultiAngle => 1.0,
            };
            gates.push(GateSpec::new(
                template.kind,
                template.targets.clone(),
                vec![ParamSlot::Slot(circuit_slot)],
            ));
            entries.push((reduced_idx, scale));
            circuit_slot += 1;
        }
        let mixer_idx = match variant {
            QaoaVariant::SharedAngle => base + 1,
            QaoaVariant::MultiAngle => base + cost_gates.len(),
        };
        for template in &mixer_gates {
            gates.push(GateSpec::new(
                template.kind,
                template.targets.clone(),
                vec![ParamSlot::Slot(circuit_slot)],
            ));
            entries.push((mixer_idx, template.scale));
            circuit_slot += 1;
        }
    }
    let circuit = Circuit::new(modes, cutoff, gates, circuit_slot)?;
    let param_map = ParamMap {
        entries,
        reduced_len,
    };
    param_map.validate(circuit.n_params)?;

    let mut initial = ModeState::vacuum(modes, cutoff)?;
    let squeeze = make_gate(
        &GateSpec::new(
            GateKind::Squeeze,
            vec![0],
            vec![ParamSlot::Fixed(QAOA_SQUEEZE_R), ParamSlot::Fixed(0.0)],
        ),
        &[],
        cutoff,
        hbar,
    )?;
    for m in 0..modes {
        initial.apply_gate_mut(&squeeze, &[m])?;
    }
    Ok(CvQaoa {
        circuit,
        initial,
        param_map,
        variant,
        layers,
    })
}

/// The shared-angle values that make the multi-angle circuit reproduce a
/// shared-angle evaluation at `(gamma, beta)` exactly.
pub fn tie_multi_angle(cost: &QuadraticCost, layers: usize, gamma: f64, beta: f64) -> Vec<f64> {
    let mut reduced = Vec::new();
    for _ in 0..layers {
        for &a in &cost.linear {
            reduced.push(-gamma * a);
        }
        for &b in &cost.square {
            reduced.push(-gamma * b);
        }
        for &(_, _, c) in &cost.cross {
            if c != 0.0 {
                reduced.push(-gamma * c);
            }
        }
        reduced.push(beta);
    }
    reduced
}
