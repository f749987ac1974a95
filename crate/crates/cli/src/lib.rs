//! Batch front end for the `thermocap` library: reads channel spec files,
//! runs one pipeline and renders a JSON or CSV report.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thermocap::channel::{Channel, ChannelSpec};
use thermocap::implementation::{build_universal_implementation, Diagnostics};
use thermocap::optim::{interconversion_rate, min_entropy_gain, thermo_capacity};
use thermocap::qcore::{DensityMatrix, ThermoContext, C64};
use thermocap::sdp::DIAMOND_MAX_DIM;
use thermocap::typic::TypicalityParams;
use thermocap::{exec, random};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest n for which the diamond distance is reported.
pub const DIAMOND_MAX_COPIES: usize = 3;

pub const CSV_HEADER: [&str; 5] = ["n", "work_per_copy", "fidelity_min", "diamond", "preclip_norm"];

#[derive(Debug, Parser)]
#[command(name = "thermocap", version, about = "Thermodynamic capacity of quantum channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity T(E) with its certificate.
    Capacity(Flags),
    /// Universal implementation of E^{⊗n} for each n.
    Implement(Flags),
    /// Rate T(F) − T(E) between two channels.
    Interconvert(Flags),
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    /// Channel spec (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    /// Second channel spec, for `interconvert`.
    #[arg(long)]
    pub spec2: Option<PathBuf>,
    /// Inverse temperature; defaults to the spec's value, then 1.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Comma-separated copy numbers.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub n: Vec<usize>,
    /// Certificate tolerance of the capacity solver.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Slack coefficient c₀ in η = c₀/√n.
    #[arg(long, default_value_t = 2.0)]
    pub eta: f64,
    /// Seed for sampled test states.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Capacity,
    Implement,
    Interconvert,
}

/// Resolved configuration of one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: CommandName,
    pub spec: PathBuf,
    pub spec2: Option<PathBuf>,
    pub beta: Option<f64>,
    pub n: Vec<usize>,
    pub tol: f64,
    pub eta_coefficient: f64,
    pub seed: u64,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl From<Command> for RunConfig {
    fn from(cmd: Command) -> Self {
        let (command, f) = match cmd {
            Command::Capacity(f) => (CommandName::Capacity, f),
            Command::Implement(f) => (CommandName::Implement, f),
            Command::Interconvert(f) => (CommandName::Interconvert, f),
        };
        Self {
            command,
            spec: f.spec,
            spec2: f.spec2,
            beta: f.beta,
            n: f.n,
            tol: f.tol,
            eta_coefficient: f.eta,
            seed: f.seed,
            format: f.format,
            out: f.out,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<thermocap::Error> for CliError {
    fn from(e: thermocap::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CapacityResults {
    pub beta: f64,
    pub value: f64,
    pub certificate_gap: f64,
    pub iterations: usize,
    /// Eigenvalues of the maximizer, largest first.
    pub maximizer_spectrum: Vec<f64>,
    /// Present when both Hamiltonians vanish.
    pub min_entropy_gain: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputFidelity {
    pub input: String,
    pub fidelity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImplementRow {
    pub n: usize,
    pub work_per_copy: f64,
    pub fidelities: Vec<InputFidelity>,
    pub fidelity_min: f64,
    pub diamond: Option<f64>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImplementResults {
    pub beta: f64,
    pub rows: Vec<ImplementRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InterconvertResults {
    pub beta: f64,
    pub capacity_e: f64,
    pub capacity_f: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Results {
    Capacity(CapacityResults),
    Implement(ImplementResults),
    Interconvert(InterconvertResults),
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
    /// One entry per n for `implement`.
    pub items_seconds: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: RunConfig,
    pub config_hash: String,
    pub results: Results,
    pub timings: Timings,
}

struct Loaded {
    channel: Channel,
    beta: Option<f64>,
    text: String,
}

fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let spec = ChannelSpec::from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let beta = spec.beta;
    let channel = spec.to_channel()?;
    Ok(Loaded { channel, beta, text })
}

fn resolve_beta(flag: Option<f64>, specs: &[&Loaded]) -> Result<ThermoContext, CliError> {
    let beta = match flag {
        Some(b) => b,
        None => {
            let mut given = specs.iter().filter_map(|s| s.beta);
            let first = given.next();
            if let Some(b) = first {
                if given.any(|other| other != b) {
                    return Err(CliError::Input("specs disagree on β; pass --beta".into()));
                }
            }
            first.unwrap_or(1.0)
        }
    };
    Ok(ThermoContext::new(beta)?)
}

/// SHA-256 over the configuration and the contents of every spec file.
fn config_hash(cfg: &RunConfig, specs: &[&Loaded]) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(cfg).expect("config serializes"));
    for s in specs {
        h.update([0u8]);
        h.update(s.text.as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// The states every implementation is evaluated on.
pub fn test_inputs(d: usize, seed: u64) -> Vec<(String, DensityMatrix)> {
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut rng = random::seeded(seed);
    vec![
        ("ground".into(), DensityMatrix::basis(d, 0)),
        ("top".into(), DensityMatrix::basis(d, d - 1)),
        (
            "uniform superposition".into(),
            DensityMatrix::pure(&vec![amp; d]).expect("unit vector"),
        ),
        ("maximally mixed".into(), DensityMatrix::maximally_mixed(d)),
        (format!("random (seed {seed})"), random::mixed_state(d, &mut rng)),
    ]
}

fn capacity(cfg: &RunConfig, e: &Loaded, ctx: &ThermoContext) -> Result<CapacityResults, CliError> {
    let res = thermo_capacity(&e.channel, ctx, cfg.tol)?;
    let mut spectrum = res.maximizer.eigenvalues();
    spectrum.reverse();
    let (h_in, h_out) = e.channel.hamiltonians()?;
    let gain = if h_in.is_zero() && h_out.is_zero() {
        Some(min_entropy_gain(&e.channel, cfg.tol)?)
    } else {
        None
    };
    Ok(CapacityResults {
        beta: ctx.beta(),
        value: res.value,
        certificate_gap: res.certificate_gap,
        iterations: res.iterations,
        maximizer_spectrum: spectrum,
        min_entropy_gain: gain,
    })
}

fn implement_one(
    cfg: &RunConfig,
    ch: &Channel,
    ctx: &ThermoContext,
    n: usize,
) -> Result<(ImplementRow, f64), CliError> {
    let start = Instant::now();
    let params = TypicalityParams {
        eta_coefficient: cfg.eta_coefficient,
        ..TypicalityParams::default()
    };
    let imp = build_universal_implementation(ch, n, &params, ctx)?;
    let work = imp.work_cost(ctx)?;
    let mut fidelities = Vec::new();
    for (label, sigma) in test_inputs(ch.dim_in(), cfg.seed) {
        fidelities.push(InputFidelity {
            input: label,
            fidelity: imp.iid_accuracy(&sigma)?,
        });
    }
    let fidelity_min = fidelities.iter().map(|f| f.fidelity).fold(f64::INFINITY, f64::min);
    let joint = (ch.dim_in() * ch.dim_out()).checked_pow(n as u32);
    let diamond = match joint {
        Some(d) if n <= DIAMOND_MAX_COPIES && d <= DIAMOND_MAX_DIM => Some(imp.diamond_accuracy()?),
        _ => None,
    };
    let row = ImplementRow {
        n,
        work_per_copy: work,
        fidelities,
        fidelity_min,
        diamond,
        diagnostics: imp.diagnostics().clone(),
    };
    Ok((row, start.elapsed().as_secs_f64()))
}

/// Run the pipeline selected by `cfg`.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let start = Instant::now();
    if cfg.n.is_empty() || cfg.n.contains(&0) {
        return Err(CliError::Input("--n needs a nonempty list of positive integers".into()));
    }
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(CliError::Input(format!("--tol must be positive, got {}", cfg.tol)));
    }
    let e = load(&cfg.spec)?;
    let f = match (cfg.command, &cfg.spec2) {
        (CommandName::Interconvert, Some(p)) => Some(load(p)?),
        (CommandName::Interconvert, None) => return Err(CliError::Input("interconvert needs --spec2".into())),
        _ => None,
    };
    let specs: Vec<&Loaded> = std::iter::once(&e).chain(f.as_ref()).collect();
    let ctx = resolve_beta(cfg.beta, &specs)?;
    let hash = config_hash(cfg, &specs);

    let mut items = Vec::new();
    let results = match cfg.command {
        CommandName::Capacity => Results::Capacity(capacity(cfg, &e, &ctx)?),
        CommandName::Implement => {
            let sweep = exec::map_slice(&cfg.n, |&n| implement_one(cfg, &e.channel, &ctx, n));
            let mut rows = Vec::with_capacity(sweep.len());
            for r in sweep {
                let (row, secs) = r?;
                rows.push(row);
                items.push(secs);
            }
            Results::Implement(ImplementResults { beta: ctx.beta(), rows })
        }
        CommandName::Interconvert => {
            let f = f.as_ref().expect("loaded above");
            let capacity_e = thermo_capacity(&e.channel, &ctx, cfg.tol)?.value;
            let capacity_f = thermo_capacity(&f.channel, &ctx, cfg.tol)?.value;
            let rate = interconversion_rate(&e.channel, &f.channel, &ctx, cfg.tol)?;
            Results::Interconvert(InterconvertResults {
                beta: ctx.beta(),
                capacity_e,
                capacity_f,
                rate,
            })
        }
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        command: cfg.clone(),
        config_hash: hash,
        results,
        timings: Timings {
            total_seconds: start.elapsed().as_secs_f64(),
            items_seconds: items,
        },
    })
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Render the report in the requested format.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => match &report.results {
            Results::Implement(r) => csv_string(
                &CSV_HEADER,
                r.rows
                    .iter()
                    .map(|row| {
                        vec![
                            row.n.to_string(),
                            row.work_per_copy.to_string(),
                            row.fidelity_min.to_string(),
                            opt(row.diamond),
                            row.diagnostics.preclip_norm.to_string(),
                        ]
                    })
                    .collect(),
            ),
            Results::Capacity(r) => csv_string(
                &["beta", "value", "certificate_gap", "iterations", "min_entropy_gain"],
                vec![vec![
                    r.beta.to_string(),
                    r.value.to_string(),
                    r.certificate_gap.to_string(),
                    r.iterations.to_string(),
                    opt(r.min_entropy_gain),
                ]],
            ),
            Results::Interconvert(r) => csv_string(
                &["beta", "capacity_e", "capacity_f", "rate"],
                vec![vec![
                    r.beta.to_string(),
                    r.capacity_e.to_string(),
                    r.capacity_f.to_string(),
                    r.rate.to_string(),
                ]],
            ),
        },
    }
}

/// Parse, run and emit. Returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let cfg = RunConfig::from(cli.command);
    let outcome = run(&cfg).and_then(|report| {
        let text = render(&report, cfg.format);
        match &cfg.out {
            Some(p) => std::fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("thermocap: {e}");
            e.exit_code()
        }
    }
}
