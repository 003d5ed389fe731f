use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use ck_lax::algebra::{Assignment, MultiPoly, Scalar, Var, Window};
use ck_lax::characters::InfChar;
use ck_lax::claims::{verify_all, RunConfig, RK4_STEP_TOLERANCE};
use ck_lax::flow::{self, rk4, FlowParams, FlowTrajectory, FLOW_WINDOW};
use ck_lax::lie::AlgebraName;
use ck_lax::poisson::{self, HamiltonianAnsatz};
use ck_lax::trees::{coproduct_forest, enumerate_trees, Forest, Orientation};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Parser)]
#[command(name = "ck-lax", version, about = "Exact checks for Lax flows on the rooted-tree Hopf algebra")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Largest tree degree for Hopf checks and dumps.
    #[arg(long, global = true)]
    degree_cap: Option<usize>,
    /// Laurent window as `lo,hi`, e.g. `-12,12`.
    #[arg(long, global = true, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<Window>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every claim and write a JSON report; exits nonzero if any claim fails.
    VerifyAll {
        /// TOML file with `RunConfig` fields; command-line flags take precedence.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record per-claim wall time (makes reports differ between runs).
        #[arg(long)]
        timings: bool,
        #[arg(long, hide = true)]
        flip_coproduct: bool,
    },
    /// Print the nonzero brackets of an algebra.
    GenStructure {
        #[arg(long)]
        algebra: AlgebraName,
        /// Print structure constants as JSON instead of bracket lines.
        #[arg(long)]
        json: bool,
        /// Also write the JSON structure constants to a file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the Lax flow with `f(L) = 2λᵖL` exactly.
    Flow {
        #[arg(long)]
        algebra: AlgebraName,
        #[arg(long, allow_hyphen_values = true)]
        p: i32,
        /// `L₀` as JSON: tree code to list of `[exponent, "coefficient"]`.
        #[arg(long = "L0")]
        l0: Option<PathBuf>,
        /// Comma-separated outputs; `.json` gets the trajectory, `.csv` a sampled trace.
        #[arg(long, value_delimiter = ',')]
        emit: Vec<PathBuf>,
    },
    /// Fit a quadratic Hamiltonian to a trajectory written by `flow`.
    Fit {
        #[arg(long)]
        algebra: AlgebraName,
        #[arg(long)]
        traj: PathBuf,
    },
    /// Print the coproduct of every tree up to the degree cap.
    HopfDump,
}

fn parse_window(s: &str) -> std::result::Result<Window, String> {
    let (lo, hi) = s.split_once(',').ok_or("expected `lo,hi`")?;
    let lo: i32 = lo.trim().parse().map_err(|e| format!("lo: {e}"))?;
    let hi: i32 = hi.trim().parse().map_err(|e| format!("hi: {e}"))?;
    if lo > 0 || hi < 0 {
        return Err(format!("window [{lo}, {hi}] must contain 0"));
    }
    Ok(Window { lo, hi })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CK_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let g = cli.global;
    match cli.command {
        Command::VerifyAll { config, out, timings, flip_coproduct } => {
            let mut cfg = match &config {
                Some(path) => load_config(path)?,
                None => RunConfig::default(),
            };
            if let Some(d) = g.degree_cap {
                cfg.degree_cap = d;
            }
            if let Some(w) = g.window {
                cfg.window = w;
            }
            if let Some(s) = g.seed {
                cfg.seed = s;
            }
            cfg.timings |= timings;
            cfg.flip_coproduct |= flip_coproduct;
            let report = verify_all(&cfg);
            for c in &report.claims {
                let status = if c.status == ck_lax::claims::Status::Pass { "PASS" } else { "FAIL" };
                println!("{status} {} (criterion {})", c.claim_id, c.criterion);
                if let Some(w) = &c.witness {
                    println!("     {w}");
                }
            }
            println!("{} passed, {} failed", report.passed, report.failed);
            if let Some(path) = out {
                fs::write(&path, report.to_json_string()).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::GenStructure { algebra, json, out } => {
            let data = algebra.lie_data();
            let text = serde_json::to_string_pretty(&data.to_json())? + "\n";
            if json {
                print!("{text}");
            } else {
                print!("{data}");
            }
            if let Some(path) = out {
                fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Flow { algebra, p, l0, emit } => {
            flow::check_flow_algebra(algebra)?;
            let window = g.window.unwrap_or(FLOW_WINDOW);
            let basis = Arc::new(algebra.tree_basis(Orientation::PrunedTrunk));
            let l0 = match l0 {
                Some(path) => {
                    let v = read_json(&path)?;
                    InfChar::from_json(basis, window, &v)?
                }
                None => flow::random_l0(basis, window, &mut ChaCha8Rng::seed_from_u64(g.seed.unwrap_or(0)))?,
            };
            let params = FlowParams { p, algebra, l0, window };
            let traj = flow::solve_lax(&params)?;
            let names = algebra.lie_data().names().to_vec();
            for (name, c) in names.iter().zip(traj.beta0()) {
                println!("beta0[{name}] = {c}");
            }
            for path in &emit {
                match path.extension().and_then(|e| e.to_str()) {
                    Some("json") => {
                        let mut v = traj.to_json();
                        v["algebra"] = json!(algebra);
                        v["p"] = json!(p);
                        v["window"] = json!(window);
                        fs::write(path, serde_json::to_string_pretty(&v)? + "\n")
                            .with_context(|| format!("writing {}", path.display()))?;
                    }
                    Some("csv") => write_trace(path, &traj, &params)?,
                    _ => bail!("cannot emit {}: use a .json or .csv file", path.display()),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fit { algebra, traj } => {
            let v = read_json(&traj)?;
            let p = v["p"].as_i64().context("trajectory has no integer `p`")? as i32;
            let beta = |k: i32| -> Result<Vec<MultiPoly>> {
                let coords = v["beta"][k.to_string()].as_array();
                match coords {
                    Some(cs) => cs
                        .iter()
                        .map(|c| Ok(c.as_str().context("coordinate is not a string")?.parse::<MultiPoly>()?))
                        .collect(),
                    None => Ok(vec![MultiPoly::zero(); algebra.base().level() + 2]),
                }
            };
            let (b0, bn) = (beta(0)?, beta(1 - p)?);
            let fit = poisson::fit_hamiltonian(&b0, &bn, ansatz_for(algebra))?;
            println!("{}", fit.hamiltonian);
            Ok(ExitCode::SUCCESS)
        }
        Command::HopfDump => {
            for t in enumerate_trees(g.degree_cap.unwrap_or(4)) {
                let delta = coproduct_forest(&Forest::single(t.clone()), Orientation::PrunedTrunk);
                println!("Δ({}) = {delta}", t.code());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn ansatz_for(algebra: AlgebraName) -> HamiltonianAnsatz {
    let base = algebra.base();
    let dim = base.level() + 2;
    if base == AlgebraName::G1 {
        HamiltonianAnsatz::Diagonal { dim }
    } else {
        HamiltonianAnsatz::FullQuadratic { dim }
    }
}

fn read_json(path: &Path) -> Result<serde_json::Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg: RunConfig = toml::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    let w = cfg.window;
    if w.lo > 0 || w.hi < 0 {
        bail!("{}: window [{}, {}] must contain 0", path.display(), w.lo, w.hi);
    }
    Ok(cfg)
}

/// Rows at `t = 0, 0.1, …, 1`: exact `β̃₀` coordinates, the fitted Hamiltonian
/// (when the fit is consistent) and the RK4 values of `β̃₀`.
fn write_trace(path: &Path, traj: &FlowTrajectory, params: &FlowParams) -> Result<()> {
    let g = params.algebra.lie_data();
    let names = g.names().to_vec();
    let beta0 = traj.beta0();
    let fit = poisson::fit_hamiltonian(&beta0, &traj.beta_k(1 - params.p), ansatz_for(params.algebra)).ok();
    if fit.is_none() {
        log::warn!("no consistent Hamiltonian fit; the trace has no H column");
    }
    let h_along = fit.as_ref().map(|f| flow::evaluate_along(&f.hamiltonian, &beta0));
    let times: Vec<Scalar> = (0..=10).map(|k| Scalar::ratio(k, 10)).collect();
    let floats: Vec<f64> = times.iter().map(Scalar::re_f64).collect();
    let numeric = rk4::integrate(&g, params, &floats, RK4_STEP_TOLERANCE)?;
    // β̃₀ is the λ⁻¹ coefficient of L(t)
    let col = (-1 - params.window.lo) as usize;

    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    let mut header = vec!["t".to_string()];
    header.extend(names.iter().map(|n| format!("beta0_{n}")));
    if h_along.is_some() {
        header.push("H".into());
    }
    header.extend(names.iter().map(|n| format!("rk4_beta0_{n}")));
    w.write_record(&header)?;
    for (t, state) in times.iter().zip(&numeric) {
        let point: Assignment = [(Var::T, t.clone())].into_iter().collect();
        let mut row = vec![t.to_string()];
        for c in &beta0 {
            row.push(c.eval(&point)?.to_string());
        }
        if let Some(h) = &h_along {
            row.push(h.eval(&point)?.to_string());
        }
        row.extend(state.iter().map(|tree| format!("{:.12}", tree[col])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
