//! `pearchaos`: moments, chaos grades, four-moment bounds, verification
//! suites and convergence experiments for Pearson diffusions.

mod verify;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pearchaos::fourmoments::{bound, BoundOptions, TargetSpec};
use pearchaos::generator::Generator;
use pearchaos::montecarlo::{euler_maruyama, run_convergence, write_convergence_csv};
use pearchaos::rational::{fmt_rational, int, to_f64};
use pearchaos::spectral::{chaos_grade, is_chaotic};
use pearchaos::tensor::ChaosDescriptor;
use pearchaos::{ExperimentDescriptor, PearsonParams, Rational, SdeOptions, Surd};

const GAUSSIAN_SUM: &str = include_str!("../descriptors/gaussian_sum.json");
const STUDENT_SELF: &str = include_str!("../descriptors/student_t_self.json");

#[derive(Parser)]
#[command(name = "pearchaos", version, about = "Pearson diffusions, chaos grades and four-moment bounds")]
struct Cli {
    /// Render rationals as decimals.
    #[arg(long, global = true)]
    float: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Raw moments E[X^p], p = 0..=pmax, of the stationary law.
    Moments {
        /// Parameters as a JSON file path or inline JSON.
        #[arg(long)]
        params: String,
        #[arg(long, default_value_t = 4)]
        pmax: usize,
    },
    /// Chaos grade of degree n.
    Grade {
        #[arg(long)]
        params: String,
        #[arg(long)]
        n: usize,
    },
    /// Four-moment bound for a chaos element against a target law.
    Bound {
        /// Target parameters.
        #[arg(long)]
        params: String,
        /// Chaos descriptor as a JSON file path or inline JSON.
        #[arg(long)]
        chaos: String,
        #[arg(long, default_value_t = 1.0)]
        c_h: f64,
        /// Skip the exact left-hand side.
        #[arg(long)]
        no_lhs: bool,
    },
    /// Run a verification suite; exits 1 if any check fails.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Convergence experiment; writes CSV.
    Converge {
        /// Descriptor path, inline JSON, or `bundled:gaussian-sum` /
        /// `bundled:student-t-self`.
        #[arg(long)]
        descriptor: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the descriptor seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Draw from the stationary law, directly or along an Euler–Maruyama path.
    Simulate {
        #[arg(long)]
        params: String,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the SDE instead of the direct sampler.
        #[arg(long)]
        sde: bool,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 100)]
        thin: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Identities,
    Table1,
    Grades,
    Stein,
}

/// Exit status for errors in the input rather than in a verification.
struct Usage(anyhow::Error);

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> std::result::Result<ExitCode, Usage> {
    let r = Render { float: cli.float };
    let out = match &cli.command {
        Command::Moments { params, pmax } => moments(&r, params, *pmax),
        Command::Grade { params, n } => grade(&r, params, *n),
        Command::Bound { params, chaos, c_h, no_lhs } => bound_cmd(&r, params, chaos, *c_h, !no_lhs),
        Command::Verify { suite } => return Ok(verify_cmd(*suite)),
        Command::Converge { descriptor, out, seed } => converge(descriptor, out.as_deref(), *seed),
        Command::Simulate { params, n, seed, sde, dt, thin, out } => simulate(params, *n, *seed, *sde, *dt, *thin, out.as_deref()),
    };
    out.map(|_| ExitCode::SUCCESS).map_err(Usage)
}

struct Render {
    float: bool,
}

impl Render {
    fn q(&self, x: &Rational) -> String {
        if self.float {
            format!("{}", to_f64(x))
        } else {
            fmt_rational(x)
        }
    }

    fn s(&self, x: &Surd) -> String {
        if self.float {
            format!("{}", x.to_f64())
        } else {
            x.to_string()
        }
    }
}

/// A path to a JSON file, or the JSON itself.
fn json_arg(arg: &str) -> Result<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
    }
}

fn params_arg(arg: &str) -> Result<PearsonParams> {
    let text = json_arg(arg)?;
    let v: Value = serde_json::from_str(&text).context("parameters are not valid JSON")?;
    Ok(PearsonParams::from_json_value(&v)?)
}

fn moments(r: &Render, params: &str, pmax: usize) -> Result<()> {
    let p = params_arg(params)?;
    let m = p.moments(pmax)?;
    println!("{}", m.iter().map(|x| r.q(x)).collect::<Vec<_>>().join(", "));
    Ok(())
}

fn grade(r: &Render, params: &str, n: usize) -> Result<()> {
    if n == 0 {
        bail!("the degree must be at least 1");
    }
    let p = params_arg(params)?;
    let gen = Generator::new(p.clone());
    if is_chaotic(&p, n) {
        println!("eta_{n} = {}", r.q(&chaos_grade(&gen, n)?));
        println!("chaotic = yes");
    } else {
        println!("eta_{n} = undefined");
        println!("chaotic = no: not chaotic, degree {n} needs b2 < 1/{}", 4 * n - 1);
    }
    let eta_tilde = int(2) * (int(1) - p.b2());
    println!("eta_tilde = {}", r.q(&eta_tilde));
    Ok(())
}

fn bound_cmd(r: &Render, params: &str, chaos: &str, c_h: f64, exact_lhs: bool) -> Result<()> {
    let target = TargetSpec::new(params_arg(params)?)?;
    let el = ChaosDescriptor::from_json(&json_arg(chaos)?)?.build()?;
    let rep = bound(&el, &target, BoundOptions { c_h, exact_lhs })?;
    let v = json!({
        "label": rep.label,
        "eta": r.q(&rep.eta),
        "eta_tilde": r.q(&rep.eta_tilde),
        "xi": r.q(&rep.xi),
        "regime": rep.regime,
        "U_int": r.s(&rep.u_int),
        "Q2_int": r.s(&rep.q2_int),
        "lhs_exact": rep.lhs_exact.as_ref().map(|x| r.s(x)),
        "rhs_sq": r.s(&rep.rhs_sq),
        "inequality_holds": rep.inequality_holds,
        "c_h": rep.c_h,
        "bound": rep.bound,
        "theta_rescale": r.q(&rep.theta_rescale),
        "measure": rep.measure,
    });
    println!("{}", serde_json::to_string_pretty(&v)?);
    Ok(())
}

fn verify_cmd(suite: Suite) -> ExitCode {
    let checks = match suite {
        Suite::Identities => verify::identities(),
        Suite::Table1 => verify::table1(),
        Suite::Grades => verify::grades(),
        Suite::Stein => verify::stein(),
    };
    let mut failed = 0;
    for c in &checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.pass);
    }
    println!("{} checks, {} failed", checks.len(), failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn descriptor_arg(arg: &str) -> Result<ExperimentDescriptor> {
    let text = match arg {
        "bundled:gaussian-sum" => GAUSSIAN_SUM.to_string(),
        "bundled:student-t-self" => STUDENT_SELF.to_string(),
        a if a.starts_with("bundled:") => bail!("unknown bundled descriptor {a}"),
        a => json_arg(a)?,
    };
    Ok(ExperimentDescriptor::from_json(&text)?)
}

fn converge(descriptor: &str, out: Option<&Path>, seed: Option<u64>) -> Result<()> {
    let mut d = descriptor_arg(descriptor)?;
    if let Some(s) = seed {
        d.seed = s;
    }
    let rows = run_convergence(&d)?;
    match out.map(Path::to_path_buf).or_else(|| d.output.clone()) {
        Some(path) => {
            let f = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            write_convergence_csv(&rows, f)?;
        }
        None => write_convergence_csv(&rows, io::stdout().lock())?,
    }
    Ok(())
}

fn simulate(params: &str, n: usize, seed: u64, sde: bool, dt: f64, thin: usize, out: Option<&Path>) -> Result<()> {
    let p = params_arg(params)?;
    let batch = if sde {
        let opts = SdeOptions { dt, steps: n.checked_mul(thin).ok_or_else(|| anyhow!("n * thin overflows"))?, thin, chains: 1, burn_in: None };
        euler_maruyama(&p, to_f64(p.m()), &opts, seed)?
    } else {
        p.sample(seed, n)?
    };
    let mut text = String::from("value\n");
    for v in &batch.values {
        text.push_str(&format!("{v}\n"));
    }
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
