use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use contact_tight::jacobi::{self, TraceConfig};
use contact_tight::ode::IntegratorConfig;
use contact_tight::report::SCHEMA_VERSION;
use contact_tight::riem_compare::{kleft_table, ot_table};
use contact_tight::structures::{invariants_chi_kappa, load_structure_file, validate_normalization, Profile, RadialModel, StructureSpec};
use contact_tight::tightness::{analyze_orbit, disk_boundary, write_disk_csv, AnalysisConfig, Verdict};
use contact_tight::Error;

const EXIT_VALIDATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "tightness", version, about = "Tightness radii of Reeb orbits in 3D contact sub-Riemannian structures")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the frame normalization ([f1,f2] = -f0 mod f1,f2; f0 Reeb).
    Validate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1e-6)]
        threshold: f64,
        #[arg(long, default_value_t = 64)]
        probes: usize,
    },
    /// Trace one contact Jacobi curve and write it as CSV.
    Jacobi {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        z: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = 4.0)]
        rmax: f64,
        /// Trace CSV (stdout when omitted; the jet report then goes to stderr).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Geodesic CSV r,x,y,z,p1,p2,p3,h0,h1,h2.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        #[arg(long, default_value_t = 2048)]
        samples_per_unit: usize,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Sample the annihilator circle bundle and write a JSON report.
    Analyze {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 8)]
        nz: usize,
        #[arg(long, default_value_t = 32)]
        ntheta: usize,
        #[arg(long, default_value_t = 6.0)]
        rmax: f64,
        #[arg(long, default_value_t = 256)]
        samples_per_unit: usize,
        /// Schwarzian fit range lo,hi.
        #[arg(long, value_parser = parse_pair)]
        fit_range: Option<(f64, f64)>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Disk boundary CSV, written when every sample has a singular radius.
        #[arg(long)]
        disk: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        disk_z: f64,
        #[arg(long, default_value_t = 64)]
        disk_ntheta: usize,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Print a comparison table of the tightness estimates.
    Compare {
        #[arg(long, value_enum)]
        table: Table,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    Kleft,
    Ot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Markdown,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Builtin {
    Heisenberg,
    Overtwisted,
    Kcontact,
    Radial,
    Perturbed,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ModelSource {
    /// Built-in model.
    #[arg(value_enum)]
    builtin: Option<Builtin>,
    /// Structure file (.json or .toml).
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct ModelArgs {
    #[command(flatten)]
    source: ModelSource,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    /// α(r) for the radial model, an expression in r.
    #[arg(long)]
    alpha: Option<String>,
    /// β(r) for the radial model, an expression in r.
    #[arg(long)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<f64>,
}

#[derive(Args)]
struct TolArgs {
    #[arg(long, default_value_t = 1e-10)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
}

impl TolArgs {
    fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig { rtol: self.rtol, atol: self.atol, ..IntegratorConfig::default() }
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if b > a {
        Ok((a, b))
    } else {
        Err("need lo < hi".into())
    }
}

/// Failure with its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Invalid(_) => EXIT_USAGE,
            Error::StepFailure { .. } | Error::DomainExit { .. } | Error::ImmersionFailure { .. } | Error::ComplexB { .. } => EXIT_NUMERIC,
            Error::FrameSingular { .. } | Error::ContactViolation { .. } | Error::OutsideDomain(_) | Error::NotOvertwistedWithinHorizon { .. } => {
                EXIT_VALIDATION
            }
        };
        Fail(code, e.to_string())
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Self {
        Fail(EXIT_USAGE, e.to_string())
    }
}

fn usage(msg: &str) -> Fail {
    Fail(EXIT_USAGE, msg.to_string())
}

fn build_model(m: &ModelArgs) -> Result<StructureSpec, Fail> {
    if let Some(path) = &m.source.file {
        return Ok(load_structure_file(path)?);
    }
    let b = m.source.builtin.expect("clap enforces one model source");
    let stray = |flag: &str, set: bool, allowed: bool| if set && !allowed { Err(usage(&format!("--{flag} does not apply to this model"))) } else { Ok(()) };
    stray("kappa", m.kappa.is_some(), b == Builtin::Kcontact)?;
    stray("alpha", m.alpha.is_some(), b == Builtin::Radial)?;
    stray("beta", m.beta.is_some(), b == Builtin::Radial)?;
    stray("eps", m.eps.is_some(), b == Builtin::Perturbed)?;
    Ok(match b {
        Builtin::Heisenberg => StructureSpec::heisenberg(),
        Builtin::Overtwisted => StructureSpec::overtwisted(),
        Builtin::Kcontact => StructureSpec::kcontact(m.kappa.ok_or_else(|| usage("kcontact needs --kappa"))?)?,
        Builtin::Radial => {
            let (Some(a), Some(bt)) = (&m.alpha, &m.beta) else {
                return Err(usage("radial needs --alpha and --beta"));
            };
            StructureSpec::radial(RadialModel { alpha: Profile::expr(a)?, beta: Profile::expr(bt)?, r_max: f64::INFINITY })?
        }
        Builtin::Perturbed => StructureSpec::perturbed(m.eps.ok_or_else(|| usage("perturbed needs --eps"))?),
    })
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Fail> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_validate(model: &ModelArgs, threshold: f64, probes: usize) -> Result<(), Fail> {
    let s = build_model(model)?;
    let pts = s.probe_points(probes);
    let rep = validate_normalization(&s.frame, &pts)?;
    let (chi, kappa) = invariants_chi_kappa(&s.frame, &s.orbit.base)?;
    let worst = rep.max_violation();
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "structure": s.id,
        "probes": rep.probes,
        "c12_0_plus_1": rep.c12_0,
        "c10_0_c20_0": rep.c10_c20,
        "c01_1_plus_c02_2": rep.trace,
        "max_violation": worst,
        "threshold": threshold,
        "chi_at_base": chi,
        "kappa_at_base": kappa,
        "ok": worst <= threshold,
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
    if worst <= threshold {
        Ok(())
    } else {
        let which = if rep.c12_0.max >= worst {
            ("c12^0", &rep.c12_0)
        } else if rep.c10_c20.max >= worst {
            ("c10^0/c20^0", &rep.c10_c20)
        } else {
            ("c01^1+c02^2", &rep.trace)
        };
        Err(Fail(EXIT_VALIDATION, format!("normalization violated: {} off by {:.3e} at {:?}", which.0, which.1.max, which.1.worst_probe.unwrap_or_default())))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_jacobi(model: &ModelArgs, z: f64, theta: f64, rmax: f64, out: &Option<PathBuf>, trajectory: &Option<PathBuf>, spu: usize, tol: &TolArgs) -> Result<(), Fail> {
    let s = build_model(model)?;
    let cfg = TraceConfig { samples_per_unit: spu, integrator: tol.integrator(), ..TraceConfig::default() };
    let t = jacobi::jacobi_trace(&s, &s.orbit, z, theta, rmax, &cfg)?;
    let mut w = output(out)?;
    jacobi::write_trace_csv(&t, &mut w)?;
    w.flush()?;
    if let Some(p) = trajectory {
        let mut w = BufWriter::new(File::create(p)?);
        jacobi::write_trajectory_csv(&s, &t, &mut w)?;
        w.flush()?;
    }
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "structure": s.id,
        "z": z,
        "theta": theta,
        "horizon": t.horizon,
        "domain_exit": t.exit,
        "initial_jet": jacobi::check_initial_jet(&t),
        "first_singular_radius": jacobi::first_singular_radius(&t),
        "focal_radii": jacobi::focal_radii(&t),
    });
    let text = serde_json::to_string_pretty(&doc).expect("json");
    if out.is_some() {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
    Ok(())
}

fn cmd_analyze(a: &AnalyzeArgs) -> Result<(), Fail> {
    let s = build_model(a.model)?;
    let mut cfg = AnalysisConfig { n_z: a.nz, n_theta: a.ntheta, r_max: a.rmax, fit_range: a.fit_range, ..AnalysisConfig::default() };
    cfg.trace.samples_per_unit = a.spu;
    cfg.trace.integrator = a.tol.integrator();
    let rep = analyze_orbit(&s, &s.orbit, &cfg)?;
    let mut w = output(a.out)?;
    writeln!(w, "{}", rep.to_json()?)?;
    w.flush()?;
    if let Some(p) = a.disk {
        match rep.conclusion.verdict {
            Verdict::OvertwistedDisk | Verdict::CandidateOvertwistedDisk => {
                let d = disk_boundary(&s, &s.orbit, a.disk_z, a.disk_ntheta, a.rmax, &cfg.trace)?;
                let mut w = BufWriter::new(File::create(p)?);
                write_disk_csv(&d, &mut w)?;
                w.flush()?;
                eprintln!("disk boundary: {} points, closure defect {:.3e}, simple {}", d.points.len(), d.closure_defect, d.simple);
            }
            _ => eprintln!("no disk boundary: not every sample has a singular radius below r_inj"),
        }
    }
    Ok(())
}

struct AnalyzeArgs<'a> {
    model: &'a ModelArgs,
    nz: usize,
    ntheta: usize,
    rmax: f64,
    spu: usize,
    fit_range: Option<(f64, f64)>,
    out: &'a Option<PathBuf>,
    disk: &'a Option<PathBuf>,
    disk_z: f64,
    disk_ntheta: usize,
    tol: &'a TolArgs,
}

fn cmd_compare(table: Table, format: Format) -> Result<(), Fail> {
    let t = match table {
        Table::Kleft => kleft_table()?,
        Table::Ot => ot_table()?,
    };
    let text = match format {
        Format::Markdown => t.to_markdown(),
        Format::Csv => t.to_csv(),
        Format::Json => serde_json::to_string_pretty(&t).expect("json") + "\n",
    };
    print!("{text}");
    Ok(())
}

fn configure_threads() -> Result<(), Fail> {
    if let Ok(v) = std::env::var("TIGHTNESS_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| usage("TIGHTNESS_THREADS must be a positive integer"))?;
        if n == 0 {
            return Err(usage("TIGHTNESS_THREADS must be a positive integer"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| usage(&e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Fail> {
    configure_threads()?;
    match &cli.cmd {
        Cmd::Validate { model, threshold, probes } => cmd_validate(model, *threshold, *probes),
        Cmd::Jacobi { model, z, theta, rmax, out, trajectory, samples_per_unit, tol } => {
            cmd_jacobi(model, *z, *theta, *rmax, out, trajectory, *samples_per_unit, tol)
        }
        Cmd::Analyze { model, nz, ntheta, rmax, samples_per_unit, fit_range, out, disk, disk_z, disk_ntheta, tol } => cmd_analyze(&AnalyzeArgs {
            model,
            nz: *nz,
            ntheta: *ntheta,
            rmax: *rmax,
            spu: *samples_per_unit,
            fit_range: *fit_range,
            out,
            disk,
            disk_z: *disk_z,
            disk_ntheta: *disk_ntheta,
            tol,
        }),
        Cmd::Compare { table, format } => cmd_compare(*table, *format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
