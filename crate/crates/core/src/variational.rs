//! Cost evaluation and the classical optimization loops.
//!
//! The objective is the classical cost at the circuit's per-mode means:
//! mean quadratures for phase-space problems, mean photon numbers for Fock
//! problems. Gradients are central finite differences; for circuit
//! objectives the evaluations reuse the cached prefix states of the center
//! point, which reproduces the plain central difference bit for bit while
//! skipping the gates before the varied parameter.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{ModeState, TruncatedOperator};
use crate::gates::{run_circuit, run_circuit_from, run_circuit_states, Circuit, ParamSlot};
use crate::problems::{Encoding, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptMethod {
    Adam,
    DerivativeFree,
}

#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub method: OptMethod,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub fd_step: f64,
    pub max_iterations: usize,
    pub init_scale: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            method: OptMethod::Adam,
            learning_rate: 0.05,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            fd_step: 1e-3,
            max_iterations: 500,
            init_scale: 0.1,
            seed: 0,
            restarts: 5,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 {
            return Err(Error::InvalidOptimizerConfig(
                "learning_rate must be positive".into(),
            ));
        }
        for (name, beta) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0 < beta && beta < 1.0) {
                return Err(Error::InvalidOptimizerConfig(format!(
                    "{name} must be in (0, 1)"
                )));
            }
        }
        if self.fd_step <= 0.0 {
            return Err(Error::InvalidOptimizerConfig(
                "fd_step must be positive".into(),
            ));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidOptimizerConfig(
                "restarts must be at least 1".into(),
            ));
        }
        if self.init_scale < 0.0 {
            return Err(Error::InvalidOptimizerConfig(
                "init_scale must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Linear map from a reduced parameter vector onto the circuit's gate slots:
/// gate slot `g` receives `scale_g * reduced[index_g]`. Used by the
/// shared-angle baseline where one angle drives many gates with
/// coefficient-dependent scales; the identity map is a plain circuit.
#[derive(Debug, Clone)]
pub struct ParamMap {
    pub entries: Vec<(usize, f64)>,
    pub reduced_len: usize,
}

impl ParamMap {
    pub fn identity(len: usize) -> Self {
        ParamMap {
            entries: (0..len).map(|i| (i, 1.0)).collect(),
            reduced_len: len,
        }
    }

    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        self.entries
            .iter()
            .map(|&(idx, scale)| scale * reduced[idx])
            .collect()
    }

    pub fn validate(&self, circuit_slots: usize) -> Result<()> {
        if self.entries.len() != circuit_slots {
            return Err(Error::ParamVectorLength {
                expected: circuit_slots,
                got: self.entries.len(),
            });
        }
        let mut referenced = vec![false; self.reduced_len];
        for &(idx, _) in &self.entries {
            if idx >= self.reduced_len {
                return Err(Error::SlotOutOfRange {
                    slot: idx,
                    q: self.reduced_len,
                });
            }
            referenced[idx] = true;
        }
        if let Some(unused) = referenced.iter().position(|&r| !r) {
            return Err(Error::UnreferencedSlot(unused));
        }
        Ok(())
    }
}

/// A runnable optimization scenario: circuit, input state, problem, and the
/// optional reduced parameterization.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub circuit: Circuit,
    pub initial: ModeState,
    pub problem: ProblemSpec,
    pub hbar: f64,
    pub param_map: Option<ParamMap>,
}

impl Scenario {
    pub fn new(
        circuit: Circuit,
        initial: ModeState,
        problem: ProblemSpec,
        hbar: f64,
    ) -> Result<Self> {
        Self::with_param_map(circuit, initial, problem, hbar, None)
    }

    pub fn with_param_map(
        circuit: Circuit,
        initial: ModeState,
        problem: ProblemSpec,
        hbar: f64,
        param_map: Option<ParamMap>,
    ) -> Result<Self> {
        if let Some(map) = &param_map {
            map.validate(circuit.n_params)?;
        }
        if problem.n_vars != circuit.modes {
            return Err(Error::ModeCountMismatch(problem.n_vars, circuit.modes));
        }
        Ok(Scenario {
            circuit,
            initial,
            problem,
            hbar,
            param_map,
        })
    }

    /// Number of trainable parameters (after the reduced map, if any).
    pub fn q(&self) -> usize {
        self.param_map
            .as_ref()
            .map_or(self.circuit.n_params, |m| m.reduced_len)
    }

    fn full_params(&self, reduced: &[f64]) -> Vec<f64> {
        match &self.param_map {
            Some(map) => map.expand(reduced),
            None => reduced.to_vec(),
        }
    }

    /// Per-mode means the cost function reads: mean quadratures for
    /// phase-space problems, mean photon numbers for Fock problems.
    pub fn mode_means(&self, state: &ModeState) -> Result<Vec<f64>> {
        let d = state.cutoff();
        let op = match self.problem.encoding {
            Encoding::PhaseSpace => TruncatedOperator::position(d, self.hbar)?,
            Encoding::FockSpace => TruncatedOperator::number(d)?,
        };
        (0..state.modes()).map(|m| state.expect(&op, m)).collect()
    }

    pub fn final_state(&self, params: &[f64]) -> Result<ModeState> {
        if params.len() != self.q() {
            return Err(Error::ParamVectorLength {
                expected: self.q(),
                got: params.len(),
            });
        }
        run_circuit(
            &self.circuit,
            &self.full_params(params),
            &self.initial,
            self.hbar,
        )
    }

    pub fn energy(&self, params: &[f64]) -> Result<f64> {
        let state = self.final_state(params)?;
        let means = self.mode_means(&state)?;
        Ok(self.problem.evaluate(&means))
    }

    /// First gate index whose parameters depend on a reduced slot.
    fn first_gate_for_slot(&self, reduced_slot: usize) -> usize {
        let touches = |circuit_slot: usize| -> bool {
            match &self.param_map {
                Some(map) => map.entries[circuit_slot].0 == reduced_slot,
                None => circuit_slot == reduced_slot,
            }
        };
        for (g, spec) in self.circuit.gates.iter().enumerate() {
            for p in &spec.params {
                if let ParamSlot::Slot(s) = *p {
                    if touches(s) {
                        return g;
                    }
                }
            }
        }
        self.circuit.gates.len()
    }

    /// Central-difference gradient reusing the center run's prefix states.
    pub fn gradient(&self, params: &[f64], fd_step: f64) -> Result<Vec<f64>> {
        if params.len() != self.q() {
            return Err(Error::ParamVectorLength {
                expected: self.q(),
                got: params.len(),
            });
        }
        let center_full = self.full_params(params);
        let states = run_circuit_states(&self.circuit, &center_full, &self.initial, self.hbar)?;
        let mut grad = vec![0.0; params.len()];
        let mut probe = params.to_vec();
        for i in 0..params.len() {
            let start = self.first_gate_for_slot(i);
            let mut sided = [0.0f64; 2];
            for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
                probe[i] = params[i] + sign * fd_step;
                let full = self.full_params(&probe);
                let state =
                    run_circuit_from(&self.circuit, &full, &states[start], start, self.hbar)?;
                let means = self.mode_means(&state)?;
                sided[k] = self.problem.evaluate(&means);
            }
            probe[i] = params[i];
            grad[i] = (sided[0] - sided[1]) / (2.0 * fd_step);
        }
        Ok(grad)
    }
}

/// Central-difference gradient of an arbitrary objective.
pub fn fd_gradient<F>(mut f: F, params: &[f64], fd_step: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if fd_step <= 0.0 {
        return Err(Error::InvalidOptimizerConfig(
            "fd_step must be positive".into(),
        ));
    }
    let mut probe = params.to_vec();
    let mut grad = vec![0.0; params.len()];
    for i in 0..params.len() {
        probe[i] = params[i] + fd_step;
        let plus = f(&probe)?;
        probe[i] = params[i] - fd_step;
        let minus = f(&probe)?;
        probe[i] = params[i];
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::NonFiniteEnergy(i));
        }
        grad[i] = (plus - minus) / (2.0 * fd_step);
    }
    Ok(grad)
}

/// An objective the optimizers can drive: an energy and (optionally) a
/// cheaper gradient than the generic central difference.
pub trait EnergyLandscape: Sync {
    fn dim(&self) -> usize;
    fn energy(&self, params: &[f64]) -> Result<f64>;
    fn gradient(&self, params: &[f64], fd_step: f64) -> Result<Vec<f64>> {
        fd_gradient(|p| self.energy(p), params, fd_step)
    }
}

impl EnergyLandscape for Scenario {
    fn dim(&self) -> usize {
        self.q()
    }

    fn energy(&self, params: &[f64]) -> Result<f64> {
        Scenario::energy(self, params)
    }

    fn gradient(&self, params: &[f64], fd_step: f64) -> Result<Vec<f64>> {
        Scenario::gradient(self, params, fd_step)
    }
}

/// Plain-closure landscape for optimizer tests.
pub struct FnLandscape<F: Fn(&[f64]) -> f64 + Sync> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> EnergyLandscape for FnLandscape<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn energy(&self, params: &[f64]) -> Result<f64> {
        Ok((self.f)(params))
    }
}

/// One restart's optimization trace.
#[derive(Debug, Clone)]
pub struct RestartRecord {
    pub seed: u64,
    /// Energy at the start of each iteration.
    pub energies: Vec<f64>,
    pub best_energy: f64,
    pub best_params: Vec<f64>,
    pub final_energy: f64,
    pub final_params: Vec<f64>,
    pub evaluations: usize,
    pub failure: Option<String>,
    pub notes: Vec<String>,
}

/// Per-run diagnostics of the best final state.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub encoding: Encoding,
    pub mode_means: Vec<f64>,
    pub fock_distribution: Vec<(Vec<usize>, f64)>,
    pub edge_population: f64,
    pub truncation_safe: bool,
}

/// Probability mass on the top retained Fock level above which a run is
/// flagged truncation-unsafe.
pub const EDGE_POPULATION_LIMIT: f64 = 0.05;

/// Aggregated multi-restart record.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub method: String,
    pub restarts: Vec<RestartRecord>,
    /// Pointwise mean energy over successful restarts.
    pub mean_trace: Vec<f64>,
    /// Pointwise standard error (sample std / sqrt(restarts)).
    pub stderr_trace: Vec<f64>,
    pub best_restart: usize,
    pub best_energy: f64,
    pub best_params: Vec<f64>,
    /// Minimum over restarts of the final-iteration energy.
    pub best_final_energy: f64,
    pub diagnostics: Option<Diagnostics>,
}

impl RunRecord {
    pub fn successful(&self) -> impl Iterator<Item = &RestartRecord> {
        self.restarts.iter().filter(|r| r.failure.is_none())
    }
}

fn init_params(dim: usize, scale: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim)
        .map(|_| (rng.random::<f64>() * 2.0 - 1.0) * scale)
        .collect()
}

/// Consecutive iterations above the divergence threshold before aborting.
const DIVERGENCE_PATIENCE: usize = 50;

fn divergence_threshold(initial_energy: f64) -> f64 {
    // 10x the initial energy scale, floored so near-zero starts (every
    // phase-space benchmark at vacuum) are not spuriously flagged
    10.0 * initial_energy.abs().max(1.0)
}

/// Adam with bias correction over a finite-difference gradient.
pub fn adam_optimize(
    landscape: &dyn EnergyLandscape,
    config: &OptimizerConfig,
    seed: u64,
) -> Result<RestartRecord> {
    config.validate()?;
    let dim = landscape.dim();
    let mut theta = init_params(dim, config.init_scale, seed);
    let mut m = vec![0.0; dim];
    let mut v = vec![0.0; dim];
    let mut record = RestartRecord {
        seed,
        energies: Vec::with_capacity(config.max_iterations),
        best_energy: f64::INFINITY,
        best_params: theta.clone(),
        final_energy: f64::NAN,
        final_params: theta.clone(),
        evaluations: 0,
        failure: None,
        notes: Vec::new(),
    };
    let mut threshold = f64::INFINITY;
    let mut high_streak = 0usize;
    for t in 1..=config.max_iterations {
        let energy = landscape.energy(&theta)?;
        record.evaluations += 1;
        if !energy.is_finite() {
            record.failure = Some(format!("non-finite energy at iteration {t}"));
            break;
        }
        if t == 1 {
            threshold = divergence_threshold(energy);
        }
        record.energies.push(energy);
        if energy < record.best_energy {
            record.best_energy = energy;
            record.best_params.copy_from_slice(&theta);
        }
        if energy > threshold {
            high_streak += 1;
            if high_streak >= DIVERGENCE_PATIENCE {
                record.failure = Some(format!(
                    "diverged: energy above {threshold:.3e} for {DIVERGENCE_PATIENCE} iterations"
                ));
                break;
            }
        } else {
            high_streak = 0;
        }
        let grad = landscape.gradient(&theta, config.fd_step)?;
        record.evaluations += 2 * dim;
        let bc1 = 1.0 - config.beta1.powi(t as i32);
        let bc2 = 1.0 - config.beta2.powi(t as i32);
        for i in 0..dim {
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grad[i];
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
            let m_hat = m[i] / bc1;
            let v_hat = v[i] / bc2;
            theta[i] -= config.learning_rate * m_hat / (v_hat.sqrt() + config.eps);
        }
    }
    record.final_params = theta;
    record.final_energy = *record.energies.last().unwrap_or(&f64::NAN);
    Ok(record)
}

/// Nelder-Mead simplex minimization with the standard reflection, expansion,
/// contraction, and shrink moves. Runs the full iteration budget and records
/// the best vertex after every iteration; collapsed simplices are restarted
/// around the incumbent with a seeded perturbation.
pub fn nelder_mead_optimize(
    landscape: &dyn EnergyLandscape,
    config: &OptimizerConfig,
    seed: u64,
) -> Result<RestartRecord> {
    config.validate()?;
    let dim = landscape.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let theta0 = init_params(dim, config.init_scale, seed);
    let mut record = RestartRecord {
        seed,
        energies: Vec::with_capacity(config.max_iterations),
        best_energy: f64::INFINITY,
        best_params: theta0.clone(),
        final_energy: f64::NAN,
        final_params: theta0.clone(),
        evaluations: 0,
        failure: None,
        notes: Vec::new(),
    };
    const STEP: f64 = 0.25;
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let eval = |p: &[f64], record: &mut RestartRecord| -> Result<f64> {
        record.evaluations += 1;
        let e = landscape.energy(p)?;
        Ok(e)
    };

    let build_simplex = |center: &[f64], step: f64| -> Vec<Vec<f64>> {
        let mut simplex = vec![center.to_vec()];
        for i in 0..dim {
            let mut v = center.to_vec();
            v[i] += step;
            simplex.push(v);
        }
        simplex
    };

    let mut simplex = build_simplex(&theta0, STEP);
    let mut values: Vec<f64> = Vec::with_capacity(dim + 1);
    for v in &simplex {
        values.push(eval(v, &mut record)?);
    }

    for _ in 0..config.max_iterations {
        // order ascending by value
        let mut order: Vec<usize> = (0..simplex.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let reorder_simplex: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let reorder_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = reorder_simplex;
        values = reorder_values;

        if values[0] < record.best_energy {
            record.best_energy = values[0];
            record.best_params = simplex[0].clone();
        }
        record.energies.push(values[0]);

        // collapse guard
        let spread: f64 = (0..dim)
            .map(|i| {
                let lo = simplex.iter().map(|v| v[i]).fold(f64::INFINITY, f64::min);
                let hi = simplex
                    .iter()
                    .map(|v| v[i])
                    .fold(f64::NEG_INFINITY, f64::max);
                hi - lo
            })
            .fold(0.0, f64::max);
        if spread < 1e-12 {
            record
                .notes
                .push("simplex collapsed; restarted around incumbent".into());
            let mut center = record.best_params.clone();
            for c in center.iter_mut() {
                *c += (rng.random::<f64>() * 2.0 - 1.0) * STEP * 0.1;
            }
            simplex = build_simplex(&center, STEP);
            values.clear();
            for v in &simplex {
                values.push(eval(v, &mut record)?);
            }
            continue;
        }

        let worst = dim;
        let centroid: Vec<f64> = (0..dim)
            .map(|i| simplex[..worst].iter().map(|v| v[i]).sum::<f64>() / dim as f64)
            .collect();
        let reflect: Vec<f64> = (0..dim)
            .map(|i| centroid[i] + ALPHA * (centroid[i] - simplex[worst][i]))
            .collect();
        let f_reflect = eval(&reflect, &mut record)?;

        if f_reflect < values[0] {
            let expand: Vec<f64> = (0..dim)
                .map(|i| centroid[i] + GAMMA * (reflect[i] - centroid[i]))
                .collect();
            let f_expand = eval(&expand, &mut record)?;
            if f_expand < f_reflect {
                simplex[worst] = expand;
                values[worst] = f_expand;
            } else {
                simplex[worst] = reflect;
                values[worst] = f_reflect;
            }
        } else if f_reflect < values[worst - 1] {
            simplex[worst] = reflect;
            values[worst] = f_reflect;
        } else {
            let contract_base = if f_reflect < values[worst] {
                &reflect
            } else {
                &simplex[worst]
            };
            let contract: Vec<f64> = (0..dim)
                .map(|i| centroid[i] + RHO * (contract_base[i] - centroid[i]))
                .collect();
            let f_contract = eval(&contract, &mut record)?;
            if f_contract < values[worst].min(f_reflect) {
                simplex[worst] = contract;
                values[worst] = f_contract;
            } else {
                for k in 1..simplex.len() {
                    for i in 0..dim {
                        simplex[k][i] = simplex[0][i] + SIGMA * (simplex[k][i] - simplex[0][i]);
                    }
                    values[k] = eval(&simplex[k].clone(), &mut record)?;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..simplex.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    if values[order[0]] < record.best_energy {
        record.best_energy = values[order[0]];
        record.best_params = simplex[order[0]].clone();
    }
    record.final_params = simplex[order[0]].clone();
    record.final_energy = values[order[0]];
    Ok(record)
}

fn run_single(
    landscape: &dyn EnergyLandscape,
    config: &OptimizerConfig,
    seed: u64,
) -> RestartRecord {
    let outcome = match config.method {
        OptMethod::Adam => adam_optimize(landscape, config, seed),
        OptMethod::DerivativeFree => nelder_mead_optimize(landscape, config, seed),
    };
    match outcome {
        Ok(record) => record,
        Err(err) => RestartRecord {
            seed,
            energies: Vec::new(),
            best_energy: f64::INFINITY,
            best_params: Vec::new(),
            final_energy: f64::NAN,
            final_params: Vec::new(),
            evaluations: 0,
            failure: Some(err.to_string()),
            notes: Vec::new(),
        },
    }
}

pub fn method_name(method: OptMethod) -> &'static str {
    match method {
        OptMethod::Adam => "adam",
        OptMethod::DerivativeFree => "nelder-mead",
    }
}

/// Runs `restarts` independently seeded optimizations (seeds `seed + r`) in
/// parallel and aggregates the traces. Failed restarts are kept in the
/// record but excluded from the aggregates.
pub fn multi_start(scenario: &Scenario, config: &OptimizerConfig) -> Result<RunRecord> {
    config.validate()?;
    let records: Vec<RestartRecord> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_single(scenario, config, config.seed + r as u64))
        .collect();
    let mut run = aggregate(records, config.method)?;
    if let Some(best) = run.restarts.get(run.best_restart) {
        if best.failure.is_none() {
            let state = scenario.final_state(&best.best_params)?;
            let means = scenario.mode_means(&state)?;
            let edge = state.edge_population();
            let mut fock: Vec<(Vec<usize>, f64)> =
                state.fock_probabilities(1e-3)?.into_iter().collect();
            fock.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            run.diagnostics = Some(Diagnostics {
                encoding: scenario.problem.encoding,
                mode_means: means,
                fock_distribution: fock,
                edge_population: edge,
                truncation_safe: edge < EDGE_POPULATION_LIMIT,
            });
        }
    }
    Ok(run)
}

/// Multi-restart aggregation over any landscape (used for optimizer tests
/// and by the scenario runner).
pub fn multi_start_landscape(
    landscape: &dyn EnergyLandscape,
    config: &OptimizerConfig,
) -> Result<RunRecord> {
    config.validate()?;
    let records: Vec<RestartRecord> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_single(landscape, config, config.seed + r as u64))
        .collect();
    aggregate(records, config.method)
}

fn aggregate(records: Vec<RestartRecord>, method: OptMethod) -> Result<RunRecord> {
    let ok: Vec<&RestartRecord> = records.iter().filter(|r| r.failure.is_none()).collect();
    if ok.is_empty() {
        let failures: Vec<String> = records.iter().filter_map(|r| r.failure.clone()).collect();
        return Err(Error::InvalidProblem(format!(
            "every restart failed: {}",
            failures.join("; ")
        )));
    }
    let trace_len = ok.iter().map(|r| r.energies.len()).min().unwrap_or(0);
    let n = ok.len() as f64;
    let mut mean_trace = vec![0.0; trace_len];
    let mut stderr_trace = vec![0.0; trace_len];
    for t in 0..trace_len {
        let mean: f64 = ok.iter().map(|r| r.energies[t]).sum::<f64>() / n;
        mean_trace[t] = mean;
        if ok.len() > 1 {
            let var: f64 = ok
                .iter()
                .map(|r| (r.energies[t] - mean).powi(2))
                .sum::<f64>()
                / (n - 1.0);
            stderr_trace[t] = (var / n).sqrt();
        }
    }
    let best_restart = records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.failure.is_none())
        .min_by(|a, b| a.1.best_energy.total_cmp(&b.1.best_energy))
        .map(|(i, _)| i)
        .expect("at least one successful restart");
    let best_energy = records[best_restart].best_energy;
    let best_params = records[best_restart].best_params.clone();
    let best_final_energy = ok
        .iter()
        .map(|r| r.final_energy)
        .fold(f64::INFINITY, f64::min);
    Ok(RunRecord {
        method: method_name(method).to_string(),
        restarts: records,
        mean_trace,
        stderr_trace,
        best_restart,
        best_energy,
        best_params,
        best_final_energy,
        diagnostics: None,
    })
}
