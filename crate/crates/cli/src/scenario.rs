//! Builds core scenario objects from a parsed configuration.

use qumode::algebra::BosonPolynomial;
use qumode::ansatz;
use qumode::error::Result;
use qumode::fock::ModeState;
use qumode::pool::{fock_space_mixer, phase_space_mixer};
use qumode::problems::{self, Encoding, ProblemSpec};
use qumode::qaoa::{build_cvqaoa, QaoaVariant};
use qumode::variational::Scenario;

use crate::config::{AnsatzKind, ProblemKind, QaoaVariantKind, ScenarioConfig};

pub fn build_problem(config: &ScenarioConfig) -> Result<ProblemSpec> {
    match config.problem_kind {
        ProblemKind::Rosenbrock => problems::rosenbrock(config.n.unwrap_or(4), config.hbar),
        ProblemKind::ToySixth => problems::toy_sixth(config.hbar),
        ProblemKind::Ukp => problems::ukp(
            &config.values,
            &config.weights,
            config.capacity,
            config.delta,
        ),
        ProblemKind::Maxclique => {
            let adjacency = problems::adjacency_from_edges(config.nodes, &config.edges)?;
            problems::maxclique(&adjacency, config.delta1, config.delta2)
        }
        ProblemKind::TwoModeToy => problems::two_mode_toy(),
    }
}

/// The mixer Hamiltonian used for pool generation with this problem.
pub fn build_mixer(config: &ScenarioConfig, problem: &ProblemSpec) -> BosonPolynomial {
    match problem.encoding {
        Encoding::PhaseSpace => phase_space_mixer(problem.n_vars, config.mixer_p0, config.hbar),
        Encoding::FockSpace => fock_space_mixer(
            problem.n_vars,
            config.mixer_x0,
            config.mixer_p0,
            config.hbar,
        ),
    }
}

pub fn build_scenario(config: &ScenarioConfig) -> Result<Scenario> {
    let problem = build_problem(config)?;
    let d = config.cutoff;
    let hbar = config.hbar;
    match config.ansatz_kind {
        AnsatzKind::PcqoPhase => {
            let circuit = if config.single_mode_squeeze {
                ansatz::pcqo_phase_ansatz_single_squeeze(problem.n_vars, config.layers, d)?
            } else {
                ansatz::pcqo_phase_ansatz(problem.n_vars, config.layers, d)?
            };
            let initial = ModeState::vacuum(problem.n_vars, d)?;
            Scenario::new(circuit, initial, problem, hbar)
        }
        AnsatzKind::PcqoFock => {
            let circuit = ansatz::pcqo_fock_ansatz(problem.n_vars, config.layers, d)?;
            let initial = ModeState::vacuum(problem.n_vars, d)?;
            Scenario::new(circuit, initial, problem, hbar)
        }
        AnsatzKind::Experiment => {
            let (circuit, initial) = ansatz::experiment_ansatz(d, hbar)?;
            Scenario::new(circuit, initial, problem, hbar)
        }
        AnsatzKind::ExperimentFull => {
            let (circuit, initial) = ansatz::experiment_ansatz_full(d, hbar)?;
            // the eight-mode chip duplicates the four-mode problem; the cost
            // reads modes 0 and 2 either way
            let mut wide = problem;
            wide.n_vars = 8;
            Scenario::new(circuit, initial, wide, hbar)
        }
        AnsatzKind::Cvqaoa => {
            let variant = match config.variant {
                QaoaVariantKind::Shared => QaoaVariant::SharedAngle,
                QaoaVariantKind::Multi => QaoaVariant::MultiAngle,
            };
            let built = build_cvqaoa(&problem, config.layers, variant, d, hbar)?;
            Scenario::with_param_map(
                built.circuit,
                built.initial,
                problem,
                hbar,
                Some(built.param_map),
            )
        }
    }
}
