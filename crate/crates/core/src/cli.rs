//! Run configurations, task execution and report emission for the
//! `wodzicki` binary.

use std::fmt::Write as _;
use std::io;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::flags::{self, Flag};
use crate::groups::{GroupModel, GroupPoint};
use crate::residue::{attach_zeta_cross_check, wodzicki_residue, NodeResidue, ResidueReport};
use crate::symbols::{MatrixSymbol, SymbolField};
use crate::weakl1::{
    estimate_slope, geometric_schedule, running_slopes, sum_series, SlopeEstimate, TraceMode, MIN_SLOPE_ENTRIES,
};
use crate::zeta::{default_cutoff_budget, zeta_residue_with_budget, ZetaResidue};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FLAGGED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Weakl1,
    Zeta,
    Residue,
    Sweep,
}

impl Task {
    pub fn as_str(&self) -> &'static str {
        match self {
            Task::Weakl1 => "weakl1",
            Task::Zeta => "zeta",
            Task::Residue => "residue",
            Task::Sweep => "sweep",
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolSpec {
    WeightPower {
        #[serde(default = "one")]
        coeff_re: f64,
        #[serde(default)]
        coeff_im: f64,
        alpha: f64,
    },
    DiagSigned {
        alpha: f64,
    },
}

impl SymbolSpec {
    pub fn order(&self) -> f64 {
        match *self {
            SymbolSpec::WeightPower { alpha, .. } | SymbolSpec::DiagSigned { alpha } => alpha,
        }
    }

    pub fn build(&self, group: GroupModel) -> Result<MatrixSymbol> {
        match *self {
            SymbolSpec::WeightPower { coeff_re, coeff_im, alpha } => {
                MatrixSymbol::weight_power(group, Complex64::new(coeff_re, coeff_im), alpha)
            }
            SymbolSpec::DiagSigned { alpha } => MatrixSymbol::diag_signed(group, alpha),
        }
    }
}

/// Scalar x-dependence a(x) multiplying the symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Modulation {
    /// Torus: a(x) = Σ_k c_k cos(k·(x₁ + … + x_n)).
    Fourier { coefficients: Vec<f64> },
    /// SU(2): a(x) = Σ_k c_k T_k(cos(θ/2)) = Σ_k c_k cos(kθ/2), θ the
    /// conjugacy angle of x.
    ClassPoly { coefficients: Vec<f64> },
}

impl Modulation {
    fn coefficients(&self) -> &[f64] {
        match self {
            Modulation::Fourier { coefficients } | Modulation::ClassPoly { coefficients } => coefficients,
        }
    }

    pub fn eval(&self, p: &GroupPoint) -> f64 {
        match (self, p) {
            (Modulation::Fourier { coefficients }, GroupPoint::Torus(x)) => {
                let phase: f64 = x.iter().sum();
                coefficients
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * (k as f64 * phase).cos())
                    .sum()
            }
            (Modulation::ClassPoly { coefficients }, p @ GroupPoint::Su2 { .. }) => {
                let t = p.su2_half_trace().unwrap_or(1.0).clamp(-1.0, 1.0);
                let (mut prev, mut cur) = (1.0, t);
                let mut acc = 0.0;
                for (k, c) in coefficients.iter().enumerate() {
                    let tk = match k {
                        0 => 1.0,
                        1 => t,
                        _ => {
                            let next = 2.0 * t * cur - prev;
                            prev = cur;
                            cur = next;
                            next
                        }
                    };
                    acc += c * tk;
                }
                acc
            }
            _ => f64::NAN,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub start: f64,
    pub factor: f64,
    pub count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub resolution: usize,
}

fn default_s_schedule() -> Vec<f64> {
    vec![0.8, 0.4, 0.2, 0.1]
}

fn default_tol() -> f64 {
    1e-6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZetaSpec {
    #[serde(default = "default_s_schedule")]
    pub s_schedule: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_cutoff: Option<f64>,
}

impl Default for ZetaSpec {
    fn default() -> Self {
        ZetaSpec { s_schedule: default_s_schedule(), tol: default_tol(), max_cutoff: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: GroupModel,
    pub symbol: SymbolSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulation: Option<Modulation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    /// Trace channel for weakl1 and sweep; defaults to abs_trace.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<TraceMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<ZetaSpec>,
    #[serde(default)]
    pub cross_check: bool,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub record_timing: bool,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Sets the task from a subcommand. A conflicting task in the file is an error.
    pub fn with_task(mut self, task: Task) -> Result<Self> {
        match self.task {
            Some(t) if t != task => Err(config_err(format!(
                "config task '{}' conflicts with subcommand '{}'",
                t.as_str(),
                task.as_str()
            ))),
            _ => {
                self.task = Some(task);
                Ok(self)
            }
        }
    }

    pub fn task(&self) -> Result<Task> {
        self.task.ok_or_else(|| config_err("no task given"))
    }

    pub fn zeta_spec(&self) -> ZetaSpec {
        self.zeta.clone().unwrap_or_default()
    }

    pub fn schedule_cutoffs(&self) -> Result<Vec<f64>> {
        let s = self.schedule.ok_or_else(|| config_err("task needs a cutoff schedule"))?;
        geometric_schedule(s.start, s.factor, s.count).map_err(|e| config_err(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let task = self.task()?;
        let n = match self.group {
            GroupModel::Torus { n } if !(1..=3).contains(&n) => {
                return Err(config_err(format!("torus dimension must be 1, 2 or 3, got {n}")));
            }
            g => g.manifold_dim() as f64,
        };
        if !self.symbol.order().is_finite() {
            return Err(config_err("symbol alpha must be finite"));
        }
        if let SymbolSpec::WeightPower { coeff_re, coeff_im, .. } = self.symbol {
            if !coeff_re.is_finite() || !coeff_im.is_finite() {
                return Err(config_err("symbol coefficients must be finite"));
            }
        }
        if let Some(m) = &self.modulation {
            if task != Task::Residue {
                return Err(config_err("modulation is only meaningful for the residue task"));
            }
            match (m, self.group) {
                (Modulation::Fourier { .. }, GroupModel::Torus { .. })
                | (Modulation::ClassPoly { .. }, GroupModel::Su2) => {}
                _ => return Err(config_err("fourier modulation needs a torus, class_poly needs su2")),
            }
            if m.coefficients().is_empty() || m.coefficients().iter().any(|c| !c.is_finite()) {
                return Err(config_err("modulation coefficients must be a non-empty list of finite numbers"));
            }
        }
        match task {
            Task::Weakl1 | Task::Residue => {
                let cutoffs = self.schedule_cutoffs()?;
                if cutoffs.len() < MIN_SLOPE_ENTRIES {
                    return Err(config_err(format!(
                        "slope tasks need at least {MIN_SLOPE_ENTRIES} cutoffs, got {}",
                        cutoffs.len()
                    )));
                }
            }
            Task::Sweep => {
                self.schedule_cutoffs()?;
            }
            Task::Zeta => {}
        }
        if matches!(task, Task::Residue | Task::Zeta) && (self.symbol.order() + n).abs() > 1e-9 {
            return Err(config_err(format!(
                "task {} needs a symbol of order -{n}, got {}",
                task.as_str(),
                self.symbol.order()
            )));
        }
        if task == Task::Residue {
            if let Some(q) = self.quadrature {
                if q.resolution == 0 {
                    return Err(config_err("quadrature resolution must be positive"));
                }
            }
            if self.cross_check && self.modulation.is_some() {
                return Err(config_err("zeta cross-check needs an unmodulated symbol"));
            }
        }
        if task == Task::Zeta || (task == Task::Residue && self.cross_check) {
            let z = self.zeta_spec();
            if z.s_schedule.len() < 3 || !(z.tol > 0.0) {
                return Err(config_err("zeta needs at least three s values and a positive tol"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckSummary {
    pub zeta_value: ComplexValue,
    pub zeta_error: f64,
    pub agreement: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config_echo: RunConfig,
    pub task: Task,
    pub value: Option<ComplexValue>,
    pub error_bar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<SlopeEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<ZetaResidue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_node: Option<Vec<NodeResidue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheckSummary>,
    pub flags: Vec<Flag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl Report {
    fn new(config: &RunConfig, task: Task) -> Self {
        Report {
            config_echo: config.clone(),
            task,
            value: None,
            error_bar: None,
            slope: None,
            zeta: None,
            series_path: None,
            quadrature_resolution: None,
            per_node: None,
            cross_check: None,
            flags: Vec::new(),
            error: None,
            wall_time_ms: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            EXIT_ERROR
        } else if !self.flags.is_empty() {
            EXIT_FLAGGED
        } else {
            EXIT_OK
        }
    }

    pub fn to_json(&self) -> String {
        emit_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::NumericalFailure(format!("unreadable report: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaskOutput {
    pub report: Report,
    /// Sweep CSV, present for the sweep task when it succeeded.
    pub csv: Option<String>,
}

/// Runs a validated configuration. Numerical failures land in the report;
/// only configuration problems are returned as errors.
pub fn run_task(config: &RunConfig) -> Result<TaskOutput> {
    config.validate()?;
    let task = config.task()?;
    let started = Instant::now();
    let mut report = Report::new(config, task);
    let mut csv = None;
    let outcome = match task {
        Task::Weakl1 => run_weakl1(config, &mut report),
        Task::Sweep => run_sweep(config, &mut report).map(|c| csv = Some(c)),
        Task::Zeta => run_zeta(config, &mut report),
        Task::Residue => run_residue(config, &mut report),
    };
    if let Err(e) = outcome {
        if let Error::BudgetExceeded(_) = e {
            flags::insert(&mut report.flags, Flag::BudgetExceeded);
        }
        if let Error::Config(_) = e {
            return Err(e);
        }
        report.error = Some(e.to_string());
    }
    if config.record_timing {
        report.wall_time_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    Ok(TaskOutput { report, csv })
}

fn run_weakl1(config: &RunConfig, report: &mut Report) -> Result<()> {
    let sym = config.symbol.build(config.group)?;
    let series = sum_series(&sym, &config.schedule_cutoffs()?, config.mode.unwrap_or(TraceMode::AbsTrace))?;
    let est = estimate_slope(&series)?;
    report.value = Some(ComplexValue { re: est.value, im: 0.0 });
    report.error_bar = Some(est.error_bar);
    if est.non_classical {
        flags::insert(&mut report.flags, Flag::NonClassical);
    }
    report.slope = Some(est);
    Ok(())
}

fn run_sweep(config: &RunConfig, report: &mut Report) -> Result<String> {
    let sym = config.symbol.build(config.group)?;
    let series = sum_series(&sym, &config.schedule_cutoffs()?, config.mode.unwrap_or(TraceMode::AbsTrace))?;
    if let Ok(est) = estimate_slope(&series) {
        report.value = Some(ComplexValue { re: est.value, im: 0.0 });
        report.error_bar = Some(est.error_bar);
        if est.non_classical {
            flags::insert(&mut report.flags, Flag::NonClassical);
        }
        report.slope = Some(est);
    }
    report.series_path = config.output.series.clone();
    Ok(emit_sweep(&series.points, &running_slopes(&series)))
}

fn zeta_budget(config: &RunConfig, spec: &ZetaSpec) -> f64 {
    spec.max_cutoff.unwrap_or_else(|| default_cutoff_budget(&config.group))
}

fn run_zeta(config: &RunConfig, report: &mut Report) -> Result<()> {
    let sym = config.symbol.build(config.group)?;
    let spec = config.zeta_spec();
    let z = zeta_residue_with_budget(&sym, &spec.s_schedule, spec.tol, zeta_budget(config, &spec))?;
    report.value = Some(z.value.into());
    report.error_bar = Some(z.error_bar);
    for &f in &z.flags {
        flags::insert(&mut report.flags, f);
    }
    report.zeta = Some(z);
    Ok(())
}

fn run_residue(config: &RunConfig, report: &mut Report) -> Result<()> {
    let sym = config.symbol.build(config.group)?;
    let resolution = config.quadrature.map_or(1, |q| q.resolution);
    let quad = Arc::new(config.group.haar_quadrature(resolution)?);
    let degree = -(config.group.manifold_dim() as f64);
    let field = match &config.modulation {
        Some(m) => SymbolField::modulated(|p| m.eval(p), &sym, quad, degree)?,
        None => SymbolField::invariant(sym, quad)?,
    };
    let mut res: ResidueReport = wodzicki_residue(&field, &config.schedule_cutoffs()?)?;
    if config.cross_check {
        let spec = config.zeta_spec();
        match attach_zeta_cross_check(&mut res, &field, &spec.s_schedule, spec.tol, zeta_budget(config, &spec)) {
            Ok(()) => {}
            Err(Error::BudgetExceeded(_)) => flags::insert(&mut res.flags, Flag::BudgetExceeded),
            Err(e) => return Err(e),
        }
    }
    report.value = Some(res.residue.into());
    report.error_bar = Some(res.total_error_bar);
    report.quadrature_resolution = Some(res.quadrature_resolution);
    report.cross_check = res.cross_check.as_ref().map(|cc| CrossCheckSummary {
        zeta_value: cc.zeta.value.into(),
        zeta_error: cc.zeta.error_bar,
        agreement: cc.agreement,
    });
    report.flags = res.flags;
    report.per_node = Some(res.per_node);
    Ok(())
}

/// Sweep CSV with header `N,logN,S,ratio,slope`. Floats use the shortest
/// round-tripping representation; undefined cells are left empty.
pub fn emit_sweep(points: &[(f64, f64)], slopes: &[Option<f64>]) -> String {
    let mut out = String::from("N,logN,S,ratio,slope\n");
    for (i, &(n, s)) in points.iter().enumerate() {
        let log_n = n.ln();
        let ratio = if log_n > 0.0 { format!("{}", s / log_n) } else { String::new() };
        let slope = slopes.get(i).copied().flatten().map_or(String::new(), |v| format!("{v}"));
        let _ = writeln!(out, "{n},{log_n},{s},{ratio},{slope}");
    }
    out
}

/// Pretty JSON with every float printed to 17 significant digits.
struct SigDigits17<'a>(PrettyFormatter<'a>);

impl Formatter for SigDigits17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn emit_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory JSON serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}
