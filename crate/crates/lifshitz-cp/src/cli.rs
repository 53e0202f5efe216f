//! Command-line front end: config schema, dispatch, and CSV/JSON emission.
//!
//! Exit codes: 0 ok, 2 config error, 3 convergence/diagnostic failure,
//! 4 i/o failure.  Output files are written atomically (temp file + rename)
//! and start with a reproducibility header recording the effective config,
//! the library version and the quadrature settings; identical configs
//! produce byte-identical files.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::audit::{AuditConfig, AuditError, NernstReport};
use crate::lifshitz::{self, EvaluationPoint, LifshitzError, QuadratureSpec};
use crate::material::{self, MaterialError};
use crate::response::{AtomModel, WallModel};

const UM_TO_CM: f64 = 1e-4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Convergence(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<MaterialError> for CliError {
    fn from(e: MaterialError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<LifshitzError> for CliError {
    fn from(e: LifshitzError) -> Self {
        match e {
            LifshitzError::NonConvergence(_) | LifshitzError::DerivativeInconsistency { .. } => {
                CliError::Convergence(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<AuditError> for CliError {
    fn from(e: AuditError) -> Self {
        match e {
            AuditError::PointFailed { .. } | AuditError::IndeterminateCarrierLimit { .. } => {
                CliError::Convergence(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

// ---------------------------------------------------------------- schema

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointJob {
    pub wall: String,
    pub atom: String,
    pub separation_um: f64,
    pub temperature_k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Sweep the separation at fixed temperature.
    A,
    /// Sweep the temperature at fixed separation.
    T,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepJob {
    pub axis: SweepAxis,
    /// Range start (um for axis = a, K for axis = t).
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    /// Wall models: file paths, or names resolved in `materials_dir`.
    pub models: Vec<String>,
    pub atom: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separation_um: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub materials_dir: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditJob {
    pub wall: String,
    pub atom: String,
    pub separation_um: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffJob {
    pub wall: String,
    pub separation_um: f64,
    pub temperature_k: f64,
    pub l: usize,
    pub y_start: f64,
    pub y_stop: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CommandConfig {
    Energy(PointJob),
    Entropy(PointJob),
    Sweep(SweepJob),
    Audit(AuditJob),
    Coeff(CoeffJob),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lmax: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy_step_frac: Option<f64>,
}

/// The full, strict run configuration; this is what `--config` files hold
/// and what the reproducibility header echoes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub quadrature: QuadOverrides,
}

impl QuadOverrides {
    fn to_spec(&self) -> QuadratureSpec {
        let mut q = QuadratureSpec::default();
        if let Some(v) = self.rel_tol {
            q.rel_tol = v;
        }
        if let Some(v) = self.lmax {
            q.lmax = Some(v);
        }
        if let Some(v) = self.node_budget {
            q.node_budget = v;
        }
        if let Some(v) = self.entropy_step_frac {
            q.entropy_step_frac = v;
        }
        q
    }
}

// ---------------------------------------------------------------- clap surface

#[derive(Parser, Debug)]
#[command(
    name = "lifshitz-cp",
    version,
    about = "Casimir-Polder free energy, entropy and Nernst audits from the Lifshitz formula"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
    /// JSON run-config file carrying the subcommand payload.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Relative tolerance of the summation/quadrature.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Explicit Matsubara term count (overrides the cutoff rule).
    #[arg(long, global = true)]
    lmax: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct PointArgs {
    /// Wall material definition file (JSON).
    #[arg(long)]
    wall: Option<PathBuf>,
    /// Atom definition file (JSON).
    #[arg(long)]
    atom: Option<PathBuf>,
    /// Separation in micrometers.
    #[arg(short = 'a', long)]
    separation: Option<f64>,
    /// Temperature in kelvin.
    #[arg(short = 'T', long)]
    temperature: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct SweepArgs {
    #[arg(long, value_enum)]
    axis: Option<SweepAxis>,
    /// Range as start:stop (um for axis = a, K for axis = t).
    #[arg(long)]
    range: Option<String>,
    #[arg(long)]
    points: Option<usize>,
    /// Comma-separated wall models (paths or names under --materials-dir).
    #[arg(long, value_delimiter = ',')]
    models: Vec<String>,
    #[arg(long)]
    atom: Option<PathBuf>,
    /// Fixed separation (um) for axis = t.
    #[arg(short = 'a', long)]
    separation: Option<f64>,
    /// Fixed temperature (K) for axis = a.
    #[arg(short = 'T', long)]
    temperature: Option<f64>,
    /// Directory where bare model names resolve to <name>.json.
    #[arg(long)]
    materials_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct AuditArgs {
    #[arg(long)]
    wall: Option<PathBuf>,
    #[arg(long)]
    atom: Option<PathBuf>,
    /// Separation in micrometers.
    #[arg(short = 'a', long)]
    separation: Option<f64>,
    /// Descending reduced-temperature grid, comma separated.
    #[arg(long, value_delimiter = ',')]
    tau_grid: Vec<f64>,
    /// Verdict threshold relative to the reference entropy scale.
    #[arg(long)]
    theta: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct CoeffArgs {
    #[arg(long)]
    wall: Option<PathBuf>,
    /// Separation in micrometers.
    #[arg(short = 'a', long)]
    separation: Option<f64>,
    /// Temperature in kelvin.
    #[arg(short = 'T', long)]
    temperature: Option<f64>,
    /// Matsubara index.
    #[arg(short = 'l', long)]
    l: Option<usize>,
    /// y range as start:stop.
    #[arg(long)]
    y_range: Option<String>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Free energy at one (separation, temperature) point.
    Energy(PointArgs),
    /// Entropy (and free energy) at one point.
    Entropy(PointArgs),
    /// Free energy and entropy along a separation or temperature sweep.
    Sweep(SweepArgs),
    /// Nernst heat-theorem audit of a wall model.
    Audit(AuditArgs),
    /// Reflection coefficients at one Matsubara index (debugging aid).
    Coeff(CoeffArgs),
}

fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| CliError::Config(format!("range `{s}` must look like start:stop")))?;
    let lo: f64 = a.trim().parse().map_err(|_| CliError::Config(format!("bad range start `{a}`")))?;
    let hi: f64 = b.trim().parse().map_err(|_| CliError::Config(format!("bad range stop `{b}`")))?;
    Ok((lo, hi))
}

fn require_flag<T>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing required flag --{name} (or use --config)")))
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn load_config_file(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}

fn config_conflict(has_inline: bool, from_config: bool) -> Result<(), CliError> {
    if has_inline && from_config {
        return Err(CliError::Config(
            "--config cannot be combined with inline payload flags".into(),
        ));
    }
    Ok(())
}

/// Builds the effective RunConfig from the parsed CLI.
fn assemble(cli: &Cli) -> Result<RunConfig, CliError> {
    let file_cfg = cli.config.as_deref().map(load_config_file).transpose()?;
    let command = match (&cli.command, file_cfg.as_ref()) {
        (CliCommand::Energy(a), cfg) => {
            let inline = a.wall.is_some() || a.atom.is_some() || a.separation.is_some()
                || a.temperature.is_some();
            config_conflict(inline, cfg.is_some())?;
            match cfg {
                Some(c) => match &c.command {
                    CommandConfig::Energy(_) => c.command.clone(),
                    _ => return Err(CliError::Config("config file is not an energy config".into())),
                },
                None => CommandConfig::Energy(PointJob {
                    wall: path_str(&require_flag(a.wall.clone(), "wall")?),
                    atom: path_str(&require_flag(a.atom.clone(), "atom")?),
                    separation_um: require_flag(a.separation, "separation")?,
                    temperature_k: require_flag(a.temperature, "temperature")?,
                }),
            }
        }
        (CliCommand::Entropy(a), cfg) => {
            let inline = a.wall.is_some() || a.atom.is_some() || a.separation.is_some()
                || a.temperature.is_some();
            config_conflict(inline, cfg.is_some())?;
            match cfg {
                Some(c) => match &c.command {
                    CommandConfig::Entropy(_) => c.command.clone(),
                    _ => return Err(CliError::Config("config file is not an entropy config".into())),
                },
                None => CommandConfig::Entropy(PointJob {
                    wall: path_str(&require_flag(a.wall.clone(), "wall")?),
                    atom: path_str(&require_flag(a.atom.clone(), "atom")?),
                    separation_um: require_flag(a.separation, "separation")?,
                    temperature_k: require_flag(a.temperature, "temperature")?,
                }),
            }
        }
        (CliCommand::Sweep(a), cfg) => {
            let inline = a.axis.is_some() || a.range.is_some() || !a.models.is_empty();
            config_conflict(inline, cfg.is_some())?;
            match cfg {
                Some(c) => match &c.command {
                    CommandConfig::Sweep(_) => c.command.clone(),
                    _ => return Err(CliError::Config("config file is not a sweep config".into())),
                },
                None => {
                    let (start, stop) = parse_range(&require_flag(a.range.clone(), "range")?)?;
                    CommandConfig::Sweep(SweepJob {
                        axis: require_flag(a.axis, "axis")?,
                        start,
                        stop,
                        points: require_flag(a.points, "points")?,
                        models: if a.models.is_empty() {
                            return Err(CliError::Config("missing required flag --models".into()));
                        } else {
                            a.models.clone()
                        },
                        atom: path_str(&require_flag(a.atom.clone(), "atom")?),
                        separation_um: a.separation,
                        temperature_k: a.temperature,
                        materials_dir: a.materials_dir.as_deref().map(path_str),
                    })
                }
            }
        }
        (CliCommand::Audit(a), cfg) => {
            let inline = a.wall.is_some() || a.atom.is_some() || a.separation.is_some();
            config_conflict(inline, cfg.is_some())?;
            match cfg {
                Some(c) => match &c.command {
                    CommandConfig::Audit(_) => c.command.clone(),
                    _ => return Err(CliError::Config("config file is not an audit config".into())),
                },
                None => CommandConfig::Audit(AuditJob {
                    wall: path_str(&require_flag(a.wall.clone(), "wall")?),
                    atom: path_str(&require_flag(a.atom.clone(), "atom")?),
                    separation_um: require_flag(a.separation, "separation")?,
                    tau_grid: if a.tau_grid.is_empty() { None } else { Some(a.tau_grid.clone()) },
                    theta: a.theta,
                }),
            }
        }
        (CliCommand::Coeff(a), cfg) => {
            let inline = a.wall.is_some() || a.y_range.is_some() || a.l.is_some();
            config_conflict(inline, cfg.is_some())?;
            match cfg {
                Some(c) => match &c.command {
                    CommandConfig::Coeff(_) => c.command.clone(),
                    _ => return Err(CliError::Config("config file is not a coeff config".into())),
                },
                None => {
                    let (y_start, y_stop) = parse_range(&require_flag(a.y_range.clone(), "y-range")?)?;
                    CommandConfig::Coeff(CoeffJob {
                        wall: path_str(&require_flag(a.wall.clone(), "wall")?),
                        separation_um: require_flag(a.separation, "separation")?,
                        temperature_k: require_flag(a.temperature, "temperature")?,
                        l: require_flag(a.l, "l")?,
                        y_start,
                        y_stop,
                        points: require_flag(a.points, "points")?,
                    })
                }
            }
        }
    };

    let mut output = file_cfg.as_ref().map(|c| c.output.clone()).unwrap_or_default();
    if let Some(out) = &cli.out {
        output.path = Some(path_str(out));
    }
    if let Some(format) = cli.format {
        output.format = format;
    }
    let mut quadrature = file_cfg.map(|c| c.quadrature).unwrap_or_default();
    if let Some(tol) = cli.tol {
        quadrature.rel_tol = Some(tol);
    }
    if let Some(lmax) = cli.lmax {
        quadrature.lmax = Some(lmax);
    }
    Ok(RunConfig { command, output, quadrature })
}

// ---------------------------------------------------------------- emission

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct Report {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    json_data: serde_json::Value,
    /// Extra human-readable text printed to stdout (audit table).
    human: Option<String>,
}

fn render(config: &RunConfig, quadrature: &QuadratureSpec, report: &Report) -> Result<String, CliError> {
    let config_json = serde_json::to_string(config)
        .map_err(|e| CliError::Io(format!("serializing config: {e}")))?;
    let quad_json = serde_json::to_string(quadrature)
        .map_err(|e| CliError::Io(format!("serializing quadrature: {e}")))?;
    match config.output.format {
        OutputFormat::Csv => {
            let mut s = String::new();
            s.push_str(&format!("# lifshitz-cp {}\n", env!("CARGO_PKG_VERSION")));
            s.push_str(&format!("# config: {config_json}\n"));
            s.push_str(&format!("# quadrature: {quad_json}\n"));
            s.push_str(&report.columns.join(","));
            s.push('\n');
            for row in &report.rows {
                s.push_str(&row.join(","));
                s.push('\n');
            }
            Ok(s)
        }
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "meta": {
                    "version": env!("CARGO_PKG_VERSION"),
                    "config": serde_json::from_str::<serde_json::Value>(&config_json).unwrap(),
                    "quadrature": serde_json::from_str::<serde_json::Value>(&quad_json).unwrap(),
                },
                "data": report.json_data,
            });
            serde_json::to_string_pretty(&doc)
                .map(|mut s| {
                    s.push('\n');
                    s
                })
                .map_err(|e| CliError::Io(format!("serializing report: {e}")))
        }
    }
}

fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let tmp = path.with_file_name(format!(
        "{}.tmp",
        path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into())
    ));
    std::fs::write(&tmp, content)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::Io(format!("renaming {} -> {}: {e}", tmp.display(), path.display())))
}

// ---------------------------------------------------------------- dispatch

fn resolve_model(name: &str, materials_dir: Option<&str>) -> PathBuf {
    let p = PathBuf::from(name);
    if p.exists() {
        return p;
    }
    let dir = materials_dir.unwrap_or("fixtures");
    PathBuf::from(dir).join(format!("{name}.json"))
}

fn model_stem(name: &str) -> String {
    Path::new(name).file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| name.into())
}

fn load_pair(wall: &str, atom: &str) -> Result<(WallModel, AtomModel), CliError> {
    Ok((material::load_wall(wall)?, material::load_atom(atom)?))
}

fn run_point(job: &PointJob, q: &QuadratureSpec, with_entropy: bool) -> Result<Report, CliError> {
    let (wall, atom) = load_pair(&job.wall, &job.atom)?;
    let pt = EvaluationPoint::new(job.separation_um * UM_TO_CM, job.temperature_k)?;
    let result = if with_entropy {
        lifshitz::entropy(&wall, &atom, &pt, q)?
    } else {
        lifshitz::free_energy(&wall, &atom, &pt, q)?
    };
    let mut columns = vec!["separation_cm", "temperature_k", "free_energy_erg"];
    let mut row = vec![
        fmt_f64(pt.separation()),
        fmt_f64(pt.temperature()),
        fmt_f64(result.free_energy),
    ];
    if with_entropy {
        columns.push("entropy_erg_per_k");
        row.push(fmt_f64(result.entropy.expect("entropy present")));
        let audit = result.diagnostics.step_audit.expect("step audit present");
        columns.push("entropy_step_k");
        row.push(fmt_f64(audit.h));
        columns.push("entropy_step_deviation");
        row.push(fmt_f64(audit.rel_deviation));
    }
    columns.extend(["l_terms", "gl_nodes", "tail_fraction"]);
    row.push(result.diagnostics.l_terms.to_string());
    row.push(result.diagnostics.gl_nodes.to_string());
    row.push(fmt_f64(result.diagnostics.tail_fraction));
    Ok(Report {
        columns,
        rows: vec![row],
        json_data: serde_json::to_value(result).unwrap(),
        human: None,
    })
}

fn run_sweep(job: &SweepJob, q: &QuadratureSpec) -> Result<Report, CliError> {
    if job.points < 2 {
        return Err(CliError::Config("sweep needs points >= 2".into()));
    }
    if !(job.start > 0.0 && job.stop > job.start) {
        return Err(CliError::Config("sweep range must be positive and ordered".into()));
    }
    if job.models.is_empty() {
        return Err(CliError::Config("sweep needs at least one model".into()));
    }
    let atom = material::load_atom(&job.atom)?;
    let walls: Vec<(String, WallModel)> = job
        .models
        .iter()
        .map(|name| {
            let path = resolve_model(name, job.materials_dir.as_deref());
            material::load_wall(&path).map(|w| (model_stem(name), w))
        })
        .collect::<Result<_, _>>()?;

    let mut columns: Vec<&'static str> = Vec::new();
    let axis_name: &'static str = match job.axis {
        SweepAxis::A => "separation_cm",
        SweepAxis::T => "temperature_k",
    };
    columns.push(axis_name);
    let mut owned_columns: Vec<String> = Vec::new();
    for (name, _) in &walls {
        owned_columns.push(format!("free_energy_erg[{name}]"));
        owned_columns.push(format!("entropy_erg_per_k[{name}]"));
    }

    let values: Vec<f64> = (0..job.points)
        .map(|i| job.start + (job.stop - job.start) * i as f64 / (job.points - 1) as f64)
        .collect();

    let mut rows = Vec::with_capacity(values.len());
    let mut data_points = Vec::with_capacity(values.len());
    for &v in &values {
        let pt = match job.axis {
            SweepAxis::A => {
                let t = job.temperature_k.ok_or_else(|| {
                    CliError::Config("axis = a needs a fixed temperature_k".into())
                })?;
                EvaluationPoint::new(v * UM_TO_CM, t)?
            }
            SweepAxis::T => {
                let a = job.separation_um.ok_or_else(|| {
                    CliError::Config("axis = t needs a fixed separation_um".into())
                })?;
                EvaluationPoint::new(a * UM_TO_CM, v)?
            }
        };
        let axis_value = match job.axis {
            SweepAxis::A => pt.separation(),
            SweepAxis::T => pt.temperature(),
        };
        let mut row = vec![fmt_f64(axis_value)];
        let mut entry = serde_json::Map::new();
        entry.insert(axis_name.into(), serde_json::json!(axis_value));
        for (name, wall) in &walls {
            let r = lifshitz::entropy(wall, &atom, &pt, q)?;
            row.push(fmt_f64(r.free_energy));
            row.push(fmt_f64(r.entropy.expect("entropy present")));
            entry.insert(format!("free_energy_erg[{name}]"), serde_json::json!(r.free_energy));
            entry.insert(format!("entropy_erg_per_k[{name}]"), serde_json::json!(r.entropy));
        }
        rows.push(row);
        data_points.push(serde_json::Value::Object(entry));
    }

    // leak the owned column names into 'static strs for the simple table
    let columns: Vec<&'static str> = columns
        .into_iter()
        .chain(owned_columns.into_iter().map(|s| &*Box::leak(s.into_boxed_str())))
        .collect();
    Ok(Report { columns, rows, json_data: serde_json::Value::Array(data_points), human: None })
}

fn run_audit_cmd(job: &AuditJob, q: &QuadratureSpec) -> Result<(Report, NernstReport), CliError> {
    let (wall, atom) = load_pair(&job.wall, &job.atom)?;
    let mut cfg = AuditConfig::new(wall, atom, job.separation_um * UM_TO_CM);
    // the audit keeps its own entropy step unless the caller overrides it
    cfg.quadrature.rel_tol = q.rel_tol;
    cfg.quadrature.node_budget = q.node_budget;
    cfg.quadrature.lmax = q.lmax;
    if let Some(grid) = &job.tau_grid {
        cfg.tau_grid = grid.clone();
    }
    if let Some(theta) = job.theta {
        cfg.theta = theta;
    }
    let report = crate::audit::run_audit(&cfg)?;
    let columns = vec!["tau", "temperature_k", "x", "entropy_erg_per_k", "uncertainty_erg_per_k"];
    let rows = report
        .points
        .iter()
        .map(|p| {
            vec![
                fmt_f64(p.tau),
                fmt_f64(p.temperature_k),
                fmt_f64(p.x),
                fmt_f64(p.entropy),
                fmt_f64(p.uncertainty),
            ]
        })
        .collect();
    let json_data = serde_json::to_value(&report).unwrap();
    let human = format!("{report}");
    Ok((Report { columns, rows, json_data, human: Some(human) }, report))
}

fn run_coeff(job: &CoeffJob, _q: &QuadratureSpec) -> Result<Report, CliError> {
    if job.points < 2 {
        return Err(CliError::Config("coeff needs points >= 2".into()));
    }
    let wall = material::load_wall(&job.wall)?;
    let pt = EvaluationPoint::new(job.separation_um * UM_TO_CM, job.temperature_k)?;
    let zeta = pt.zeta(job.l);
    if !(job.y_start >= zeta) || !(job.y_stop > job.y_start) {
        return Err(CliError::Config(format!(
            "y range must be ordered and start at or above zeta_l = {zeta}"
        )));
    }
    let columns = vec!["l", "zeta", "y", "r_tm", "r_te"];
    let mut rows = Vec::with_capacity(job.points);
    let mut data = Vec::with_capacity(job.points);
    for i in 0..job.points {
        let y = job.y_start + (job.y_stop - job.y_start) * i as f64 / (job.points - 1) as f64;
        let pair = lifshitz::reflection_pair(&wall, &pt, job.l, y)?;
        rows.push(vec![
            job.l.to_string(),
            fmt_f64(zeta),
            fmt_f64(y),
            fmt_f64(pair.tm),
            fmt_f64(pair.te),
        ]);
        data.push(serde_json::json!({
            "l": job.l, "zeta": zeta, "y": y, "r_tm": pair.tm, "r_te": pair.te,
        }));
    }
    Ok(Report { columns, rows, json_data: serde_json::Value::Array(data), human: None })
}

fn dispatch(config: &RunConfig) -> Result<(Report, QuadratureSpec), CliError> {
    let q = config.quadrature.to_spec();
    q.validate()?;
    let report = match &config.command {
        CommandConfig::Energy(job) => run_point(job, &q, false)?,
        CommandConfig::Entropy(job) => run_point(job, &q, true)?,
        CommandConfig::Sweep(job) => run_sweep(job, &q)?,
        CommandConfig::Audit(job) => run_audit_cmd(job, &q)?.0,
        CommandConfig::Coeff(job) => run_coeff(job, &q)?,
    };
    Ok((report, q))
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("LIFSHITZ_CP_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Config(format!("LIFSHITZ_CP_THREADS must be a number, got `{v}`")))?;
        if n == 0 {
            return Err(CliError::Config("LIFSHITZ_CP_THREADS must be >= 1".into()));
        }
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn run_inner(cli: &Cli) -> Result<(), CliError> {
    init_threads()?;
    let config = assemble(cli)?;
    let (report, q) = dispatch(&config)?;
    if let Some(human) = &report.human {
        println!("{human}");
    }
    let rendered = render(&config, &q, &report)?;
    match &config.output.path {
        Some(path) => write_atomic(Path::new(path), &rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}

/// CLI entry point; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with success
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_inner(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("0.5:2").unwrap(), (0.5, 2.0));
        assert!(parse_range("1-2").is_err());
        assert!(parse_range("x:2").is_err());
    }

    #[test]
    fn run_config_round_trips_strictly() {
        let cfg = RunConfig {
            command: CommandConfig::Energy(PointJob {
                wall: "fixtures/sio2.json".into(),
                atom: "fixtures/rb_atom.json".into(),
                separation_um: 1.0,
                temperature_k: 300.0,
            }),
            output: OutputConfig { path: None, format: OutputFormat::Csv },
            quadrature: QuadOverrides::default(),
        };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        // unknown keys rejected
        let bad = text.replace("\"output\"", "\"outputs\"");
        assert!(serde_json::from_str::<RunConfig>(&bad).is_err());
    }

    #[test]
    fn model_resolution() {
        assert_eq!(resolve_model("sio2", None), PathBuf::from("fixtures/sio2.json"));
        assert_eq!(resolve_model("sio2", Some("mats")), PathBuf::from("mats/sio2.json"));
        assert_eq!(model_stem("fixtures/sio2.json"), "sio2");
    }
}
