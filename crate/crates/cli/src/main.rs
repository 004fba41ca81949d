//! `eamchain` command-line driver.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use eamchain::energetics::from_csv;
use eamchain::sweep::{emit_critical, emit_sweep, linear_grid};
use eamchain::*;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "eamchain", version, about = "Lattice stability of a periodic EAM chain and its local approximations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dense generalized spectrum at the uniform state, paired with the analytic symbol.
    Spectrum(SpectrumArgs),
    /// Minimum eigenvalues of all three models over a strain grid.
    Sweep(SweepArgs),
    /// Critical strains by bisection.
    Critical(CriticalArgs),
    /// Runs the stability checks at one strain; exits 1 if any fails.
    Check(CheckArgs),
    /// Newton equilibrium under dead loads.
    Solve(SolveArgs),
}

#[derive(Args, Debug, Clone)]
struct PotentialArgs {
    /// key=value file with alpha, beta, c, rho_floor; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Morse stiffness [default: 4]
    #[arg(long)]
    alpha: Option<f64>,
    /// Density decay rate [default: 3]
    #[arg(long)]
    beta: Option<f64>,
    /// Embedding strength [default: 1]
    #[arg(long)]
    c: Option<f64>,
    /// Lower domain guard for the embedding function [default: 1e-8]
    #[arg(long = "rho-floor")]
    rho_floor: Option<f64>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write to this file [default: stdout]
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Atomistic,
    Volume,
    Recon,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Atomistic => ModelKind::Atomistic,
            ModelArg::Volume => ModelKind::VolumeLocal,
            ModelArg::Recon => ModelKind::ReconstructionLocal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Exact symbols s_k of the finite chain
    Discrete,
    /// Symbol range [0, 4]
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[command(flatten)]
    potential: PotentialArgs,
    /// Energy model
    #[arg(long, value_enum, default_value = "atomistic")]
    model: ModelArg,
    /// Half the number of atoms per period
    #[arg(long = "N", default_value_t = 64)]
    n: usize,
    /// Uniform strain
    #[arg(long = "F", default_value_t = 1.0)]
    strain: f64,
    /// Output format
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    potential: PotentialArgs,
    /// Half the number of atoms per period
    #[arg(long = "N", default_value_t = 64)]
    n: usize,
    /// First grid strain
    #[arg(long = "F-min", default_value_t = 0.8)]
    f_min: f64,
    /// Last grid strain
    #[arg(long = "F-max", default_value_t = 1.5)]
    f_max: f64,
    /// Grid intervals; the grid has steps + 1 points
    #[arg(long, default_value_t = 70)]
    steps: usize,
    /// Symbol set used for the minimum
    #[arg(long, value_enum, default_value = "discrete")]
    mode: ModeArg,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct CriticalArgs {
    #[command(flatten)]
    potential: PotentialArgs,
    /// Models to bisect, comma separated
    #[arg(long, value_enum, value_delimiter = ',', default_value = "atomistic,volume,recon")]
    model: Vec<ModelArg>,
    /// Half the number of atoms per period
    #[arg(long = "N", default_value_t = 64)]
    n: usize,
    /// Lower bracket end
    #[arg(long = "F-min", default_value_t = 0.8)]
    f_min: f64,
    /// Upper bracket end
    #[arg(long = "F-max", default_value_t = 1.5)]
    f_max: f64,
    /// Final bracket width
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Symbol set used for the minimum
    #[arg(long, value_enum, default_value = "discrete")]
    mode: ModeArg,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    potential: PotentialArgs,
    /// Half the number of atoms per period
    #[arg(long = "N", default_value_t = 64)]
    n: usize,
    /// Uniform strain
    #[arg(long = "F", default_value_t = 1.0)]
    strain: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    potential: PotentialArgs,
    /// Energy model
    #[arg(long, value_enum, default_value = "atomistic")]
    model: ModelArg,
    /// Half the number of atoms per period
    #[arg(long = "N", default_value_t = 64)]
    n: usize,
    /// Uniform strain
    #[arg(long = "F", default_value_t = 1.0)]
    strain: f64,
    /// Force per atom, one value per line in label order [default: zero loads]
    #[arg(long)]
    loads: Option<PathBuf>,
    /// Residual tolerance
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Newton iteration budget
    #[arg(long = "max-iter", default_value_t = 50)]
    max_iter: usize,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[command(flatten)]
    out: OutputArgs,
}

/// Exit 2 for bad input, exit 1 for failed checks or numerics.
enum Failure {
    Usage(anyhow::Error),
    Failed(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Failed(e)
    }
}

impl From<EamError> for Failure {
    fn from(e: EamError) -> Self {
        Failure::Failed(e.into())
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

impl PotentialArgs {
    fn params(&self) -> Result<ToyFamilyParams64, Failure> {
        let mut params = match &self.config {
            Some(path) => {
                let text =
                    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
                ToyFamilyParams::from_key_values(&text).map_err(usage)?
            }
            None => ToyFamilyParams::default(),
        };
        for (key, value) in [("alpha", self.alpha), ("beta", self.beta), ("c", self.c), ("rho_floor", self.rho_floor)] {
            if let Some(v) = value {
                params.set(key, v).map_err(usage)?;
            }
        }
        params.validate().map_err(usage)?;
        Ok(params)
    }

    fn potentials(&self) -> Result<PotentialSet64, Failure> {
        make_toy_potentials(self.params()?).map_err(usage)
    }
}

fn check_chain(n: usize, strain: f64) -> Result<(), Failure> {
    if n == 0 {
        return Err(usage(anyhow!("--N must be at least 1")));
    }
    if !(strain > 0.0 && strain.is_finite()) {
        return Err(usage(anyhow!("strain must be positive, got {strain}")));
    }
    Ok(())
}

fn mode(m: ModeArg, n: usize) -> SpectrumMode {
    match m {
        ModeArg::Discrete => SpectrumMode::Discrete(n),
        ModeArg::Continuous => SpectrumMode::Continuous,
    }
}

fn write_output(out: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &out.output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(Failure::Failed)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_spectrum(a: &SpectrumArgs) -> Result<(), Failure> {
    check_chain(a.n, a.strain)?;
    let p = a.potential.potentials()?;
    let report = verify_diagonalization(a.model.into(), &p, a.strain, a.n)?;
    let text = match a.format {
        FormatArg::Csv => report.to_csv(),
        FormatArg::Json => report.to_json() + "\n",
    };
    write_output(&a.out, &text)
}

fn run_sweep(a: &SweepArgs) -> Result<(), Failure> {
    check_chain(a.n, a.f_min)?;
    if !(a.f_max > a.f_min) || a.steps == 0 {
        return Err(usage(anyhow!("need --F-max > --F-min and --steps >= 1")));
    }
    let p = a.potential.potentials()?;
    let rows = sweep_strains(&p, &linear_grid(a.f_min, a.f_max, a.steps), mode(a.mode, a.n))?;
    write_output(&a.out, &emit_sweep(&rows, a.format.into()))
}

fn run_critical(a: &CriticalArgs) -> Result<(), Failure> {
    check_chain(a.n, a.f_min)?;
    if !(a.f_max > a.f_min) {
        return Err(usage(anyhow!("need --F-max > --F-min")));
    }
    if !(a.tol > 0.0) {
        return Err(usage(anyhow!("--tol must be positive")));
    }
    let p = a.potential.potentials()?;
    let reports = a
        .model
        .iter()
        .map(|&m| critical_strain(&p, m.into(), (a.f_min, a.f_max), a.tol, mode(a.mode, a.n)))
        .collect::<Result<Vec<_>, _>>()?;
    write_output(&a.out, &emit_critical(&reports, a.format.into()))
}

fn run_check(a: &CheckArgs) -> Result<(), Failure> {
    check_chain(a.n, a.strain)?;
    let params = a.potential.params()?;
    let p = make_toy_potentials(params).map_err(usage)?;
    let f = a.strain;
    let c = coefficients(&p, f)?;
    let mut checks = Vec::new();
    let mut record = |name: &str, pass: bool, detail: serde_json::Value| {
        checks.push(json!({ "name": name, "pass": pass, "detail": detail }));
        pass
    };

    let signs = check_assumption_signs(&p, f)?;
    let mut ok = record("assumption_signs", signs.all_hold, serde_json::to_value(signs).map_err(anyhow::Error::from)?);
    let cond1 = !signs.all_hold || c.condition1_holds();
    ok &= record("condition1", cond1, json!({ "C": c.c, "D": c.d, "applies": signs.all_hold }));

    for model in ModelKind::ALL {
        let r = verify_diagonalization(model, &p, f, a.n)?;
        let tol = 1e-9 * (1.0 + c.a.abs());
        let pass = r.max_abs_mismatch <= tol && r.multiplicity_law_holds(tol);
        ok &= record(
            &format!("diagonalization_{}", model.short_name()),
            pass,
            json!({ "max_abs_mismatch": r.max_abs_mismatch, "max_residual": r.max_residual, "tol": tol }),
        );
    }

    let verdict = |m, mode| min_eigenvalue(&c, m, mode).lambda_min;
    let vol = compare_volume(&c);
    let cont_ok = verdict(ModelKind::Atomistic, SpectrumMode::Continuous)
        <= verdict(ModelKind::VolumeLocal, SpectrumMode::Continuous) + 1e-12 * (1.0 + c.a.abs());
    ok &= record(
        "compare_volume",
        vol != OrderingVerdict::AtomisticLarger && cont_ok,
        json!({ "verdict": vol.to_string(), "B": c.b }),
    );

    let recon = compare_recon(&c);
    let oracle_a = eamchain::spectral::oracle_min_eigenvalue(ModelKind::Atomistic, &p, f, a.n)?;
    let oracle_r = eamchain::spectral::oracle_min_eigenvalue(ModelKind::ReconstructionLocal, &p, f, a.n)?;
    let band = 1e-9 * (1.0 + c.a.abs());
    let observed = if (oracle_a - oracle_r).abs() <= band {
        OrderingVerdict::Equal
    } else if oracle_a < oracle_r {
        OrderingVerdict::AtomisticSmaller
    } else {
        OrderingVerdict::AtomisticLarger
    };
    ok &= record(
        "compare_recon",
        observed == recon.verdict,
        json!({
            "verdict": recon.verdict.to_string(),
            "observed": observed.to_string(),
            "kappa": recon.kappa,
            "reliable": recon.reliable,
            "oracle_atomistic": oracle_a,
            "oracle_recon": oracle_r,
        }),
    );

    let ce = counterexample_check(&p, f, a.n)?;
    let pass = !ce.precondition_holds || ce.inequality_holds;
    ok &= record("counterexample", pass, serde_json::to_value(ce).map_err(anyhow::Error::from)?);

    let summary = json!({
        "F": f,
        "N": a.n,
        "params": { "alpha": params.alpha, "beta": params.beta, "c": params.c, "rho_floor": params.rho_floor },
        "all_pass": ok,
        "checks": checks,
    });
    write_output(&a.out, &(serde_json::to_string_pretty(&summary).map_err(anyhow::Error::from)? + "\n"))?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Failed(anyhow!("one or more checks failed")))
    }
}

fn read_loads(path: &Path, cfg: &ChainConfig64) -> Result<DeadLoads64, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
    let values = from_csv(&text).map_err(usage)?;
    DeadLoads::new(values, cfg).map_err(usage)
}

fn run_solve(a: &SolveArgs) -> Result<(), Failure> {
    check_chain(a.n, a.strain)?;
    if !(a.tol > 0.0) {
        return Err(usage(anyhow!("--tol must be positive")));
    }
    let p = a.potential.potentials()?;
    let cfg = ChainConfig::new(a.n, a.strain).map_err(usage)?;
    let loads = match &a.loads {
        Some(path) => read_loads(path, &cfg)?,
        None => DeadLoads::zeros(&cfg),
    };
    let model: ModelKind = a.model.into();
    let out = equilibrium_solve(model, &p, &loads, &Deformation::uniform(&cfg), a.tol, a.max_iter)?;
    let y = out.deformation.positions();
    let u = out.deformation.displacement();
    let text = match a.format {
        FormatArg::Csv => {
            let mut s = String::from("label,y,u\n");
            for (i, (yi, ui)) in y.iter().zip(&u).enumerate() {
                s.push_str(&format!("{},{yi:.16e},{ui:.16e}\n", cfg.label(i)));
            }
            s
        }
        FormatArg::Json => {
            let doc = json!({
                "model": model.short_name(),
                "F": a.strain,
                "N": a.n,
                "iterations": out.iterations,
                "residuals": out.residuals,
                "positions": y,
            });
            serde_json::to_string_pretty(&doc).map_err(anyhow::Error::from)? + "\n"
        }
    };
    eprintln!(
        "converged in {} iterations, residual {:.3e}",
        out.iterations,
        out.residuals.last().copied().unwrap_or(0.0)
    );
    write_output(&a.out, &text)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum(a) => run_spectrum(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Critical(a) => run_critical(a),
        Command::Check(a) => run_check(a),
        Command::Solve(a) => run_solve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Failed(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
