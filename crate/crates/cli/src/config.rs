//! Flat key-value scenario configuration.
//!
//! The format is one `section.key = value` assignment per line; `#` starts a
//! comment and blank lines are skipped. Keys are dotted paths, values are
//! scalars or comma-separated lists. Unknown keys are reported as errors so
//! typos never silently fall back to defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use qumode::pool::{DEFAULT_MIXER_P0, DEFAULT_MIXER_X0};
use qumode::problems::Encoding;
use qumode::variational::{OptMethod, OptimizerConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemKind {
    Rosenbrock,
    ToySixth,
    Ukp,
    Maxclique,
    TwoModeToy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnsatzKind {
    PcqoPhase,
    PcqoFock,
    Experiment,
    ExperimentFull,
    Cvqaoa,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QaoaVariantKind {
    Shared,
    Multi,
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub problem_kind: ProblemKind,
    pub n: Option<usize>,
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
    pub capacity: f64,
    pub delta: f64,
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
    pub delta1: f64,
    pub delta2: f64,
    pub expected_min: Option<f64>,
    pub expected_argmin: Option<Vec<usize>>,

    pub ansatz_kind: AnsatzKind,
    pub layers: usize,
    pub variant: QaoaVariantKind,
    pub single_mode_squeeze: bool,

    pub cutoff: usize,
    pub hbar: f64,
    pub mixer_x0: f64,
    pub mixer_p0: f64,

    pub optimizer: OptimizerConfig,

    pub pool_order: usize,
    pub pool_degree_cap: Option<usize>,
    pub oracle_bound: usize,

    pub trace_path: String,
    pub summary_path: String,
    pub distribution_path: String,
}

impl ScenarioConfig {
    pub fn encoding(&self) -> Encoding {
        match self.problem_kind {
            ProblemKind::Rosenbrock | ProblemKind::ToySixth => Encoding::PhaseSpace,
            _ => Encoding::FockSpace,
        }
    }

    /// Resolved-config echo: every effective setting, defaults included.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let kind = match self.problem_kind {
            ProblemKind::Rosenbrock => "rosenbrock",
            ProblemKind::ToySixth => "toy-sixth",
            ProblemKind::Ukp => "ukp",
            ProblemKind::Maxclique => "maxclique",
            ProblemKind::TwoModeToy => "two-mode-toy",
        };
        let _ = writeln!(out, "problem.kind = {kind}");
        match self.problem_kind {
            ProblemKind::Rosenbrock => {
                let _ = writeln!(out, "problem.n = {}", self.n.unwrap_or(4));
            }
            ProblemKind::Ukp => {
                let _ = writeln!(out, "problem.values = {}", join_f64(&self.values));
                let _ = writeln!(out, "problem.weights = {}", join_f64(&self.weights));
                let _ = writeln!(out, "problem.capacity = {}", self.capacity);
                let _ = writeln!(out, "problem.delta = {}", self.delta);
            }
            ProblemKind::Maxclique => {
                let _ = writeln!(out, "problem.nodes = {}", self.nodes);
                let edges: Vec<String> =
                    self.edges.iter().map(|(i, j)| format!("{i}-{j}")).collect();
                let _ = writeln!(out, "problem.edges = {}", edges.join(","));
                let _ = writeln!(out, "problem.delta1 = {}", self.delta1);
                let _ = writeln!(out, "problem.delta2 = {}", self.delta2);
            }
            _ => {}
        }
        if let Some(v) = self.expected_min {
            let _ = writeln!(out, "problem.expected_min = {v}");
        }
        if let Some(v) = &self.expected_argmin {
            let strs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "problem.expected_argmin = {}", strs.join(","));
        }
        let ansatz = match self.ansatz_kind {
            AnsatzKind::PcqoPhase => "pcqo-phase",
            AnsatzKind::PcqoFock => "pcqo-fock",
            AnsatzKind::Experiment => "experiment",
            AnsatzKind::ExperimentFull => "experiment-full",
            AnsatzKind::Cvqaoa => "cvqaoa",
        };
        let _ = writeln!(out, "ansatz.kind = {ansatz}");
        let _ = writeln!(out, "ansatz.layers = {}", self.layers);
        if self.ansatz_kind == AnsatzKind::Cvqaoa {
            let variant = match self.variant {
                QaoaVariantKind::Shared => "shared",
                QaoaVariantKind::Multi => "multi",
            };
            let _ = writeln!(out, "ansatz.variant = {variant}");
        }
        if self.ansatz_kind == AnsatzKind::PcqoPhase {
            let _ = writeln!(
                out,
                "ansatz.squeeze = {}",
                if self.single_mode_squeeze {
                    "single-mode"
                } else {
                    "two-mode"
                }
            );
        }
        let _ = writeln!(out, "simulation.cutoff = {}", self.cutoff);
        let _ = writeln!(out, "simulation.hbar = {}", self.hbar);
        let _ = writeln!(out, "mixer.x0 = {}", self.mixer_x0);
        let _ = writeln!(out, "mixer.p0 = {}", self.mixer_p0);
        let method = match self.optimizer.method {
            OptMethod::Adam => "adam",
            OptMethod::DerivativeFree => "nelder-mead",
        };
        let _ = writeln!(out, "optimizer.method = {method}");
        let _ = writeln!(
            out,
            "optimizer.learning_rate = {}",
            self.optimizer.learning_rate
        );
        let _ = writeln!(out, "optimizer.beta1 = {}", self.optimizer.beta1);
        let _ = writeln!(out, "optimizer.beta2 = {}", self.optimizer.beta2);
        let _ = writeln!(out, "optimizer.eps = {}", self.optimizer.eps);
        let _ = writeln!(out, "optimizer.fd_step = {}", self.optimizer.fd_step);
        let _ = writeln!(
            out,
            "optimizer.max_iterations = {}",
            self.optimizer.max_iterations
        );
        let _ = writeln!(out, "optimizer.init_scale = {}", self.optimizer.init_scale);
        let _ = writeln!(out, "optimizer.seed = {}", self.optimizer.seed);
        let _ = writeln!(out, "optimizer.restarts = {}", self.optimizer.restarts);
        let _ = writeln!(out, "pool.order = {}", self.pool_order);
        if let Some(cap) = self.pool_degree_cap {
            let _ = writeln!(out, "pool.degree_cap = {cap}");
        }
        let _ = writeln!(out, "oracle.bound = {}", self.oracle_bound);
        let _ = writeln!(out, "output.trace = {}", self.trace_path);
        let _ = writeln!(out, "output.summary = {}", self.summary_path);
        let _ = writeln!(out, "output.distribution = {}", self.distribution_path);
        out
    }
}

fn join_f64(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses the raw `key = value` lines, reporting every malformed line.
fn parse_lines(text: &str) -> Result<BTreeMap<String, (String, usize)>, Vec<String>> {
    let mut map = BTreeMap::new();
    let mut errors = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            None => errors.push(format!(
                "line {line_no}: expected `key = value`, got `{line}`"
            )),
            Some((key, value)) => {
                let key = key.trim().to_string();
                let value = value.trim().to_string();
                if key.is_empty() {
                    errors.push(format!("line {line_no}: empty key"));
                } else if map.insert(key.clone(), (value, line_no)).is_some() {
                    errors.push(format!("line {line_no}: duplicate key `{key}`"));
                }
            }
        }
    }
    if errors.is_empty() {
        Ok(map)
    } else {
        Err(errors)
    }
}

struct Reader {
    map: BTreeMap<String, (String, usize)>,
    errors: Vec<String>,
    used: Vec<String>,
}

impl Reader {
    fn take(&mut self, key: &str) -> Option<String> {
        self.used.push(key.to_string());
        self.map.get(key).map(|(v, _)| v.clone())
    }

    fn line(&self, key: &str) -> usize {
        self.map.get(key).map(|&(_, l)| l).unwrap_or(0)
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str, default: T, what: &str) -> T {
        match self.take(key) {
            None => default,
            Some(raw) => match raw.parse() {
                Ok(v) => v,
                Err(_) => {
                    self.errors.push(format!(
                        "line {}: `{key}` is not {what}: `{raw}`",
                        self.line(key)
                    ));
                    default
                }
            },
        }
    }

    fn parse_opt<T: std::str::FromStr>(&mut self, key: &str, what: &str) -> Option<T> {
        match self.take(key) {
            None => None,
            Some(raw) => match raw.parse() {
                Ok(v) => Some(v),
                Err(_) => {
                    self.errors.push(format!(
                        "line {}: `{key}` is not {what}: `{raw}`",
                        self.line(key)
                    ));
                    None
                }
            },
        }
    }

    fn parse_list_f64(&mut self, key: &str) -> Vec<f64> {
        match self.take(key) {
            None => Vec::new(),
            Some(raw) => {
                let mut out = Vec::new();
                for part in raw.split(',') {
                    match part.trim().parse() {
                        Ok(v) => out.push(v),
                        Err(_) => self.errors.push(format!(
                            "line {}: `{key}` entry `{part}` is not a number",
                            self.line(key)
                        )),
                    }
                }
                out
            }
        }
    }

    fn parse_edges(&mut self, key: &str) -> Vec<(usize, usize)> {
        match self.take(key) {
            None => Vec::new(),
            Some(raw) => {
                let mut out = Vec::new();
                for part in raw.split(',') {
                    let part = part.trim();
                    if part.is_empty() {
                        continue;
                    }
                    match part.split_once('-') {
                        Some((a, b)) => match (a.trim().parse(), b.trim().parse()) {
                            (Ok(i), Ok(j)) => out.push((i, j)),
                            _ => self.errors.push(format!(
                                "line {}: `{key}` edge `{part}` is not `i-j`",
                                self.line(key)
                            )),
                        },
                        None => self.errors.push(format!(
                            "line {}: `{key}` edge `{part}` is not `i-j`",
                            self.line(key)
                        )),
                    }
                }
                out
            }
        }
    }
}

/// Parses and validates a configuration, reporting every problem at once.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, Vec<String>> {
    let map = parse_lines(text)?;
    let mut r = Reader {
        map,
        errors: Vec::new(),
        used: Vec::new(),
    };

    let problem_kind = match r.take("problem.kind").as_deref() {
        Some("rosenbrock") => ProblemKind::Rosenbrock,
        Some("toy-sixth") | Some("toy_sixth") => ProblemKind::ToySixth,
        Some("ukp") => ProblemKind::Ukp,
        Some("maxclique") => ProblemKind::Maxclique,
        Some("two-mode-toy") | Some("two_mode_toy") => ProblemKind::TwoModeToy,
        Some(other) => {
            r.errors.push(format!(
                "problem.kind `{other}` is not one of rosenbrock, toy-sixth, ukp, maxclique, two-mode-toy"
            ));
            ProblemKind::Ukp
        }
        None => {
            r.errors.push("missing required key `problem.kind`".into());
            ProblemKind::Ukp
        }
    };

    let ansatz_kind = match r.take("ansatz.kind").as_deref() {
        Some("pcqo-phase") => AnsatzKind::PcqoPhase,
        Some("pcqo-fock") => AnsatzKind::PcqoFock,
        Some("experiment") => AnsatzKind::Experiment,
        Some("experiment-full") => AnsatzKind::ExperimentFull,
        Some("cvqaoa") => AnsatzKind::Cvqaoa,
        Some(other) => {
            r.errors.push(format!(
                "ansatz.kind `{other}` is not one of pcqo-phase, pcqo-fock, experiment, experiment-full, cvqaoa"
            ));
            AnsatzKind::PcqoFock
        }
        None => match problem_kind {
            ProblemKind::Rosenbrock | ProblemKind::ToySixth => AnsatzKind::PcqoPhase,
            ProblemKind::TwoModeToy => AnsatzKind::Experiment,
            _ => AnsatzKind::PcqoFock,
        },
    };

    let variant = match r.take("ansatz.variant").as_deref() {
        None | Some("shared") => QaoaVariantKind::Shared,
        Some("multi") => QaoaVariantKind::Multi,
        Some(other) => {
            r.errors.push(format!(
                "ansatz.variant `{other}` is not `shared` or `multi`"
            ));
            QaoaVariantKind::Shared
        }
    };

    let single_mode_squeeze = match r.take("ansatz.squeeze").as_deref() {
        None | Some("two-mode") => false,
        Some("single-mode") => true,
        Some(other) => {
            r.errors.push(format!(
                "ansatz.squeeze `{other}` is not `two-mode` or `single-mode`"
            ));
            false
        }
    };

    let method = match r.take("optimizer.method").as_deref() {
        None | Some("adam") => OptMethod::Adam,
        Some("nelder-mead") | Some("derivative-free") => OptMethod::DerivativeFree,
        Some(other) => {
            r.errors.push(format!(
                "optimizer.method `{other}` is not `adam` or `nelder-mead`"
            ));
            OptMethod::Adam
        }
    };

    let defaults = OptimizerConfig::default();
    let optimizer = OptimizerConfig {
        method,
        learning_rate: r.parse("optimizer.learning_rate", 0.1, "a number"),
        beta1: r.parse("optimizer.beta1", defaults.beta1, "a number"),
        beta2: r.parse("optimizer.beta2", defaults.beta2, "a number"),
        eps: r.parse("optimizer.eps", defaults.eps, "a number"),
        fd_step: r.parse("optimizer.fd_step", defaults.fd_step, "a number"),
        max_iterations: r.parse(
            "optimizer.max_iterations",
            defaults.max_iterations,
            "an integer",
        ),
        init_scale: r.parse("optimizer.init_scale", 1.0, "a number"),
        seed: r.parse("optimizer.seed", 0u64, "an integer"),
        restarts: r.parse("optimizer.restarts", defaults.restarts, "an integer"),
    };

    let config = ScenarioConfig {
        n: r.parse_opt("problem.n", "an integer"),
        values: r.parse_list_f64("problem.values"),
        weights: r.parse_list_f64("problem.weights"),
        capacity: r.parse("problem.capacity", 0.0, "a number"),
        delta: r.parse("problem.delta", 4.0, "a number"),
        nodes: r.parse("problem.nodes", 0usize, "an integer"),
        edges: r.parse_edges("problem.edges"),
        delta1: r.parse("problem.delta1", 10.0, "a number"),
        delta2: r.parse("problem.delta2", 1.0, "a number"),
        expected_min: r.parse_opt("problem.expected_min", "a number"),
        expected_argmin: r
            .parse_opt::<String>("problem.expected_argmin", "a list")
            .map(|raw| {
                raw.split(',')
                    .filter_map(|p| p.trim().parse().ok())
                    .collect::<Vec<usize>>()
            }),
        problem_kind,
        ansatz_kind,
        layers: r.parse("ansatz.layers", 1usize, "an integer"),
        variant,
        single_mode_squeeze,
        cutoff: r.parse("simulation.cutoff", 10usize, "an integer"),
        hbar: r.parse("simulation.hbar", 2.0, "a number"),
        mixer_x0: r.parse("mixer.x0", DEFAULT_MIXER_X0, "a number"),
        mixer_p0: r.parse("mixer.p0", DEFAULT_MIXER_P0, "a number"),
        optimizer,
        pool_order: r.parse("pool.order", 2usize, "an integer"),
        pool_degree_cap: r.parse_opt("pool.degree_cap", "an integer"),
        oracle_bound: r.parse("oracle.bound", 9usize, "an integer"),
        trace_path: r.take("output.trace").unwrap_or_else(|| "trace.csv".into()),
        summary_path: r
            .take("output.summary")
            .unwrap_or_else(|| "summary.txt".into()),
        distribution_path: r
            .take("output.distribution")
            .unwrap_or_else(|| "distribution.txt".into()),
    };

    // unknown keys
    for key in r.map.keys() {
        if !r.used.contains(key) {
            r.errors
                .push(format!("line {}: unknown key `{key}`", r.map[key].1));
        }
    }

    let mut errors = r.errors;
    validate(&config, &mut errors);
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(errors)
    }
}

fn validate(config: &ScenarioConfig, errors: &mut Vec<String>) {
    if config.cutoff < 3 {
        errors.push(format!(
            "simulation.cutoff must be at least 3, got {}",
            config.cutoff
        ));
    }
    if config.hbar <= 0.0 {
        errors.push("simulation.hbar must be positive".into());
    }
    if config.layers == 0 {
        errors.push("ansatz.layers must be at least 1".into());
    }
    if let Err(e) = config.optimizer.validate() {
        errors.push(e.to_string());
    }
    match config.problem_kind {
        ProblemKind::Rosenbrock => {
            let n = config.n.unwrap_or(4);
            if n < 2 {
                errors.push("problem.n must be at least 2 for rosenbrock".into());
            }
        }
        ProblemKind::Ukp => {
            if config.values.is_empty() {
                errors.push("ukp needs problem.values".into());
            }
            if config.weights.len() != config.values.len() {
                errors.push("problem.values and problem.weights must have equal length".into());
            }
            if config.weights.iter().any(|&w| w <= 0.0) {
                errors.push("problem.weights must be positive".into());
            }
            if config.delta <= 0.0 {
                errors.push("problem.delta must be positive".into());
            }
        }
        ProblemKind::Maxclique => {
            if config.nodes == 0 {
                errors.push("maxclique needs problem.nodes".into());
            }
            for &(i, j) in &config.edges {
                if i >= config.nodes || j >= config.nodes {
                    errors.push(format!(
                        "edge {i}-{j} out of range for {} nodes",
                        config.nodes
                    ));
                }
                if i == j {
                    errors.push(format!("self-loop at node {i}"));
                }
            }
        }
        _ => {}
    }
    // the ansatz must read the encoding the problem writes
    let fock_ansatz = matches!(
        config.ansatz_kind,
        AnsatzKind::PcqoFock
            | AnsatzKind::Experiment
            | AnsatzKind::ExperimentFull
            | AnsatzKind::Cvqaoa
    );
    let fock_problem = config.encoding() == Encoding::FockSpace;
    if fock_ansatz != fock_problem {
        errors.push(format!(
            "ansatz `{:?}` does not match the {} encoding of the problem",
            config.ansatz_kind,
            if fock_problem { "Fock" } else { "phase-space" },
        ));
    }
    if matches!(
        config.ansatz_kind,
        AnsatzKind::Experiment | AnsatzKind::ExperimentFull
    ) && config.problem_kind != ProblemKind::TwoModeToy
    {
        errors.push("the experiment ansatz is defined for the two-mode-toy problem".into());
    }
}
