use clap::{Parser, Subcommand, ValueEnum};
use nonsplit_core::biquad::biquad_sweep;
use nonsplit_core::char_oracle::{scan, ScanMode};
use nonsplit_core::cubic::{cubic_critical_a, REFERENCE_A};
use nonsplit_core::dedekind::{residue_bound, sup_a, theorem1_exponent, CPolicy};
use nonsplit_core::incexc::ij_table;
use nonsplit_core::saddle::saddle_table;
use nonsplit_core::sigma::{default_dde_step, first_zero, solve_convolution, solve_extremal_dde};
use nonsplit_core::{Error, FieldParams, IncExcConfig, Profile};
use serde_json::{json, Value};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "nonsplit", version, about = "Least non-split primes and quadratic non-residues")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Convolution,
    Dde,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Quadratic,
    QuadraticPrime,
    Pair,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exponent for the least non-split prime from the zeta-function argument
    Bound {
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        log_disc: f64,
        #[arg(long, default_value = "quarter")]
        c: CPolicy,
    },
    /// Upper bounds for the residue of the Dedekind zeta function at s = 1
    Residue {
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        log_disc: f64,
        #[arg(long, default_value = "quarter_plus_b")]
        c: CPolicy,
    },
    /// Solve for sigma(u); CSV `u,sigma,tau`, or JSON with --first-zero
    Sigma {
        #[arg(long)]
        k: f64,
        /// `extremal` or a profile file
        #[arg(long, default_value = "extremal")]
        profile: String,
        #[arg(long)]
        umax: f64,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[arg(long)]
        first_zero: bool,
        /// Print every n-th grid point
        #[arg(long, default_value_t = 100)]
        stride: usize,
    },
    /// Saddle estimate against the delay equation; CSV `u,xi,saddle,dde`
    SaddleCompare {
        #[arg(long)]
        k: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        u: Vec<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Largest A keeping the cubic lower bound positive
    CubicOptimize {
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Also write the (A, rhs) curve as CSV to this file
        #[arg(long)]
        csv: Option<std::path::PathBuf>,
        /// Run the reference configuration and report its checks
        #[arg(long)]
        paper_check: bool,
    },
    /// Sweep over delta for biquadratic fields
    BiquadOptimize {
        #[arg(long, default_value_t = 0.001)]
        grid_step: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        csv: Option<std::path::PathBuf>,
        #[arg(long)]
        paper_check: bool,
    },
    /// Least non-residues over a range of moduli; CSV with a summary line
    Scan {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, value_enum, default_value = "quadratic")]
        mode: Mode,
    },
    /// Evaluate a profile, or with --u its I_j table; CSV
    ProfileEval {
        #[arg(long, default_value = "extremal")]
        profile: String,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        u: Vec<f64>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        unweighted: bool,
    },
}

enum Failure {
    Validation(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_)
            | Error::OutOfRange { .. }
            | Error::Profile(_)
            | Error::Parse { .. }
            | Error::StepTooCoarse { .. }
            | Error::UnsupportedOrder { .. }
            | Error::Precondition(_) => Failure::Validation(e.to_string()),
            Error::BranchCut { .. } | Error::Band { .. } | Error::Infeasible { .. } | Error::Inconsistent(_) => {
                Failure::Compute(e.to_string())
            }
        }
    }
}

type Out = Result<String, Failure>;

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn to_value<S: serde::Serialize>(s: &S) -> Value {
    serde_json::to_value(s).expect("reports serialize")
}

fn load_profile(spec: &str, k: f64, t_max: f64) -> Result<Profile, Failure> {
    if spec == "extremal" {
        return Ok(Profile::extremal(k, t_max)?);
    }
    let text = std::fs::read_to_string(spec).map_err(|e| Failure::Validation(format!("{spec}: {e}")))?;
    Ok(text.parse()?)
}

fn bound(degree: u32, log_disc: f64, c: CPolicy) -> Out {
    let fp = FieldParams::new(degree, log_disc)?;
    let rep = theorem1_exponent(&fp, c)?;
    let residue = match residue_bound(&fp, c) {
        Ok(r) => json!({
            "greedy": r.log_greedy.exp(),
            "theorem2": r.log_theorem2.exp(),
            "louboutin": r.log_louboutin.exp(),
            "log_greedy": r.log_greedy,
            "log_theorem2": r.log_theorem2,
            "log_louboutin": r.log_louboutin,
        }),
        Err(e) => json!({ "unavailable": e.to_string() }),
    };
    let (a, _) = sup_a::<f64>(degree)?;
    Ok(pretty(&json!({
        "l": degree,
        "log_dK": log_disc,
        "c_policy": c.name(),
        "A": a,
        "exponent": rep.exponent,
        "baseline": rep.baseline,
        "beats_baseline": rep.beats_baseline,
        "residue_bounds": residue,
        "constants": rep.constants,
        "notes": rep.notes,
    })))
}

fn residue(degree: u32, log_disc: f64, c: CPolicy) -> Out {
    let fp = FieldParams::new(degree, log_disc)?;
    Ok(pretty(&to_value(&residue_bound(&fp, c)?)))
}

#[allow(clippy::too_many_arguments)]
fn sigma(k: f64, profile: &str, umax: f64, step: Option<f64>, method: Option<Method>, fz: bool, stride: usize) -> Out {
    let extremal = profile == "extremal";
    let method = method.unwrap_or(if extremal { Method::Dde } else { Method::Convolution });
    let step = step.unwrap_or_else(|| if matches!(method, Method::Dde) { default_dde_step(k) } else { 1e-3 });
    let sol = match method {
        Method::Dde if !extremal => {
            return Err(Failure::Validation("the delay equation needs --profile extremal".into()));
        }
        Method::Dde => solve_extremal_dde(k, umax, step)?,
        Method::Convolution => solve_convolution(&load_profile(profile, k, umax)?, k, umax, step)?,
    };
    if fz {
        return Ok(pretty(&json!({
            "k": k,
            "umax": umax,
            "step": step,
            "provenance": format!("{:?}", sol.provenance).to_lowercase(),
            "first_zero": first_zero(&sol),
        })));
    }
    Ok(sol.to_csv(stride.max(1)))
}

fn saddle_compare(k: f64, us: &[f64], step: Option<f64>) -> Out {
    let umax = us.iter().copied().fold(1.0, f64::max);
    let step = step.unwrap_or_else(|| default_dde_step(k));
    let sol = solve_extremal_dde(k, umax, step)?;
    Ok(saddle_table(k, us, &sol)?)
}

fn write_csv(path: &Option<std::path::PathBuf>, body: &str) -> Result<(), Failure> {
    if let Some(p) = path {
        std::fs::write(p, body).map_err(|e| Failure::Compute(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn cubic(m: u32, tol: f64, csv: &Option<std::path::PathBuf>, paper_check: bool) -> Out {
    let (m, tol) = if paper_check { (2, 1e-6) } else { (m, tol) };
    let cfg = IncExcConfig::new(true, 3, tol)?;
    let rep = cubic_critical_a(&cfg, m)?;
    let mut body = String::from("A,rhs\n");
    for (a, r) in &rep.rhs_curve {
        body.push_str(&format!("{a:.6},{r:.10e}\n"));
    }
    write_csv(csv, &body)?;
    let mut v = to_value(&rep);
    if paper_check {
        v["checks"] = json!({
            "rhs_at_1_6625_positive": rep.rhs_at_reference_a > 0.0,
            "a_star_at_least_1_6625": rep.a_star >= REFERENCE_A,
            "exponent_below_baseline": rep.exponent < rep.baseline,
        });
    }
    Ok(pretty(&v))
}

fn biquad(grid_step: f64, tol: f64, csv: &Option<std::path::PathBuf>, paper_check: bool) -> Out {
    let (grid_step, tol) = if paper_check { (0.001, 1e-8) } else { (grid_step, tol) };
    let cfg = IncExcConfig::new(true, 3, tol)?;
    let rep = biquad_sweep(&cfg, grid_step)?;
    write_csv(csv, &rep.to_csv())?;
    let mut v = to_value(&rep);
    v.as_object_mut().expect("report is an object").remove("rows");
    if paper_check {
        let within = |x: f64, lo: f64, hi: f64| x >= lo && x <= hi;
        v["checks"] = json!({
            "worst_delta_in_0_05_0_075": within(rep.worst_delta, 0.05, 0.075),
            "worst_exponent_q_in_0_1415_0_1425": within(rep.worst_exponent_q, 0.1415, 0.1425),
            "exponent_q1q2_at_zero_in_0_0700_0_0710": within(rep.exponent_q1q2_at_zero, 0.07, 0.071),
            "exponent_q1q2_in_0_0725_0_0735": within(rep.exponent_q1q2, 0.0725, 0.0735),
            "subintegral_below_0_13538": rep.subintegral < 0.13538,
        });
    }
    Ok(pretty(&v))
}

fn run_scan(from: u64, to: u64, mode: Mode) -> Out {
    let mode = match mode {
        Mode::Quadratic => ScanMode::Quadratic,
        Mode::QuadraticPrime => ScanMode::QuadraticPrime,
        Mode::Pair => ScanMode::Pair,
    };
    Ok(scan(from, to, mode)?.to_csv())
}

fn profile_eval(profile: &str, k: f64, ts: &[f64], us: &[f64], tol: f64, unweighted: bool) -> Out {
    let t_max = ts.iter().chain(us).copied().fold(1.0, f64::max);
    let p = load_profile(profile, k, t_max)?;
    if !us.is_empty() {
        let cfg = IncExcConfig::new(!unweighted, 3, tol)?;
        return Ok(ij_table(&p, k, us, &cfg)?);
    }
    let mut out = String::from("t,P\n");
    for &t in ts {
        out.push_str(&format!("{t:.6},{:.12e}\n", p.eval(t)?));
    }
    Ok(out)
}

fn run(cli: Cli) -> Out {
    match cli.cmd {
        Cmd::Bound { degree, log_disc, c } => bound(degree, log_disc, c),
        Cmd::Residue { degree, log_disc, c } => residue(degree, log_disc, c),
        Cmd::Sigma { k, profile, umax, step, method, first_zero, stride } => {
            sigma(k, &profile, umax, step, method, first_zero, stride)
        }
        Cmd::SaddleCompare { k, u, step } => saddle_compare(k, &u, step),
        Cmd::CubicOptimize { m, tol, csv, paper_check } => cubic(m, tol, &csv, paper_check),
        Cmd::BiquadOptimize { grid_step, tol, csv, paper_check } => biquad(grid_step, tol, &csv, paper_check),
        Cmd::Scan { from, to, mode } => run_scan(from, to, mode),
        Cmd::ProfileEval { profile, k, t, u, tol, unweighted } => profile_eval(&profile, k, &t, &u, tol, unweighted),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(n) = std::env::var("NONSPLIT_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: NONSPLIT_THREADS must be a positive integer, got `{n}`");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
