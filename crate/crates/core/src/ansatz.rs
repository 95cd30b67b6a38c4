//! Fixed circuit layouts for the benchmark scenarios.
//!
//! These are the layered circuits the pool selection arrives at for the
//! benchmark problems, provided directly so runs do not depend on the
//! symbolic machinery: position displacements with nearest-neighbor
//! two-mode squeezers and cubic phases for phase-space costs, displacements
//! with nearest-neighbor controlled-phase gates for Fock costs, and the
//! rotation/beamsplitter interferometer of the chip experiment.

use crate::error::Result;
use crate::fock::ModeState;
use crate::gates::{make_gate, Circuit, GateKind, GateSpec, ParamSlot};

fn slot(s: usize) -> ParamSlot {
    ParamSlot::Slot(s)
}

/// Phase-space ansatz: per layer, `X` on every mode, real two-mode squeezing
/// on nearest-neighbor pairs, cubic phase on every mode.
/// `Q = p (3N - 1)` parameters.
pub fn pcqo_phase_ansatz(modes: usize, layers: usize, cutoff: usize) -> Result<Circuit> {
    let mut gates = Vec::new();
    let mut q = 0usize;
    for _ in 0..layers {
        for m in 0..modes {
            gates.push(GateSpec::new(GateKind::X, vec![m], vec![slot(q)]));
            q += 1;
        }
        for i in 0..modes - 1 {
            gates.push(GateSpec::new(
                GateKind::TwoModeSqueeze,
                vec![i, i + 1],
                vec![slot(q), ParamSlot::Fixed(0.0)],
            ));
            q += 1;
        }
        for m in 0..modes {
            gates.push(GateSpec::new(GateKind::CubicPhase, vec![m], vec![slot(q)]));
            q += 1;
        }
    }
    Circuit::new(modes, cutoff, gates, q)
}

/// Variant of the phase-space ansatz reading the squeezing family as
/// single-mode: `X`, then a squeezer on every mode, then cubic phases.
/// `Q = 3 p N`.
pub fn pcqo_phase_ansatz_single_squeeze(
    modes: usize,
    layers: usize,
    cutoff: usize,
) -> Result<Circuit> {
    let mut gates = Vec::new();
    let mut q = 0usize;
    for _ in 0..layers {
        for m in 0..modes {
            gates.push(GateSpec::new(GateKind::X, vec![m], vec![slot(q)]));
            q += 1;
        }
        for m in 0..modes {
            gates.push(GateSpec::new(
                GateKind::Squeeze,
                vec![m],
                vec![slot(q), ParamSlot::Fixed(0.0)],
            ));
            q += 1;
        }
        for m in 0..modes {
            gates.push(GateSpec::new(GateKind::CubicPhase, vec![m], vec![slot(q)]));
            q += 1;
        }
    }
    Circuit::new(modes, cutoff, gates, q)
}

/// Fock-encoding ansatz: per layer, `X` on every mode and `CZ` on
/// nearest-neighbor pairs. `Q = p (2N - 1)`.
pub fn pcqo_fock_ansatz(modes: usize, layers: usize, cutoff: usize) -> Result<Circuit> {
    let mut gates = Vec::new();
    let mut q = 0usize;
    for _ in 0..layers {
        for m in 0..modes {
            gates.push(GateSpec::new(GateKind::X, vec![m], vec![slot(q)]));
            q += 1;
        }
        for i in 0..modes - 1 {
            gates.push(GateSpec::new(GateKind::CZ, vec![i, i + 1], vec![slot(q)]));
            q += 1;
        }
    }
    Circuit::new(modes, cutoff, gates, q)
}

/// Squeezing strength of the experiment's input states.
pub const EXPERIMENT_SQUEEZE_R: f64 = 1.0;

/// Four-mode reduction of the chip experiment: single-mode squeezed inputs
/// on modes 0 and 2, then rotations on every mode and beamsplitters on
/// nearest-neighbor pairs. `Q = 7`.
pub fn experiment_ansatz(cutoff: usize, hbar: f64) -> Result<(Circuit, ModeState)> {
    let modes = 4;
    let mut state = ModeState::vacuum(modes, cutoff)?;
    let squeeze = make_gate(
        &GateSpec::new(
            GateKind::Squeeze,
            vec![0],
            vec![
                ParamSlot::Fixed(EXPERIMENT_SQUEEZE_R),
                ParamSlot::Fixed(0.0),
            ],
        ),
        &[],
        cutoff,
        hbar,
    )?;
    state.apply_gate_mut(&squeeze, &[0])?;
    state.apply_gate_mut(&squeeze, &[2])?;

    let mut gates = Vec::new();
    let mut q = 0usize;
    for m in 0..modes {
        gates.push(GateSpec::new(GateKind::R, vec![m], vec![slot(q)]));
        q += 1;
    }
    for i in 0..modes - 1 {
        gates.push(GateSpec::new(
            GateKind::BS,
            vec![i, i + 1],
            vec![slot(q), ParamSlot::Fixed(0.0)],
        ));
        q += 1;
    }
    let circuit = Circuit::new(modes, cutoff, gates, q)?;
    Ok((circuit, state))
}

/// Full eight-mode chip: two-mode squeezed vacuum across the mode pairs
/// (0,4) and (2,6), and the same seven-parameter interferometer applied
/// identically to modes 0..3 and 4..7 (shared slots).
pub fn experiment_ansatz_full(cutoff: usize, hbar: f64) -> Result<(Circuit, ModeState)> {
    let modes = 8;
    let mut state = ModeState::vacuum(modes, cutoff)?;
    let tms = make_gate(
        &GateSpec::new(
            GateKind::TwoModeSqueeze,
            vec![0, 1],
            vec![
                ParamSlot::Fixed(EXPERIMENT_SQUEEZE_R),
                ParamSlot::Fixed(0.0),
            ],
        ),
        &[],
        cutoff,
        hbar,
    )?;
    state.apply_gate_mut(&tms, &[0, 4])?;
    state.apply_gate_mut(&tms, &[2, 6])?;

    let mut gates = Vec::new();
    for half in [0usize, 4] {
        for m in 0..4 {
            gates.push(GateSpec::new(GateKind::R, vec![half + m], vec![slot(m)]));
        }
        for i in 0..3 {
            gates.push(GateSpec::new(
                GateKind::BS,
                vec![half + i, half + i + 1],
                vec![slot(4 + i), ParamSlot::Fixed(0.0)],
            ));
        }
    }
    let circuit = Circuit::new(modes, cutoff, gates, 7)?;
    Ok((circuit, state))
}
