use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use arw_core::engine::{Policy, Stabilizer};
use arw_core::experiments::{
    estimate_zeta_dd, estimate_zeta_fe, hockey_curve, plateau_estimate, sweep, CriticalEstimate,
    DdParams, FeParams, HockeyParams, Method, Placement, SweepParams,
};
use arw_core::layerperc::{
    enumerate_infections, estimate_zeta_star, greedy_path, minimal_odometer, oracle, BoundaryData,
    ZetaStarEstimate,
};
use arw_core::seed::{derive, Stream};
use arw_core::snapshot::Snapshot;
use arw_core::svg::hockey_svg;
use arw_core::{ArwError, InstructionTape, Seed};

use crate::args::{
    parse_policy, CriticalArgs, HockeyArgs, LayerAction, LayerArgs, MethodArg, StabilizeArgs, SweepArgs,
};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ENGINE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub msg: String,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, msg: msg.into() }
    }
}

impl From<ArwError> for Failure {
    fn from(e: ArwError) -> Self {
        let code = match e {
            ArwError::InvalidSeed(_) | ArwError::InvalidParameter(_) | ArwError::Snapshot { .. } => EXIT_USAGE,
            ArwError::Inconclusive { .. } => EXIT_INCONCLUSIVE,
            ArwError::InfeasibleBoundary { .. } | ArwError::SearchWindowExhausted { .. } => EXIT_INFEASIBLE,
            _ => EXIT_ENGINE,
        };
        Self { code, msg: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self { code: EXIT_ENGINE, msg: e.to_string() }
    }
}

pub type Outcome = Result<Vec<PathBuf>, Failure>;

fn write(path: &Path, text: &str, files: &mut Vec<PathBuf>) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure {
        code: EXIT_ENGINE,
        msg: format!("cannot write {}: {e}", path.display()),
    })?;
    files.push(path.to_path_buf());
    Ok(())
}

fn header(command: &str, seed: &Seed, extra: &[(&str, String)]) -> String {
    let mut h = format!("# arw-lab v1, command={command}, seed={seed}");
    for (k, v) in extra {
        let _ = write!(h, ", {k}={v}");
    }
    h.push('\n');
    h
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn hockey(a: &HockeyArgs) -> Outcome {
    if a.n == 0 {
        return Err(Failure::usage("--n must be at least 1"));
    }
    let mut p = HockeyParams::new(a.n, a.lambda, a.rho_max, a.grid, a.seed.value()).mode(a.mode);
    p.budget_factor = a.budget_factor;
    let curve = hockey_curve(&p)?;
    let mut files = Vec::new();
    write(&a.out, &curve.to_csv(a.seed.as_str()), &mut files)?;
    if let Some(svg) = &a.svg {
        let zeta = a.zeta.or_else(|| curve.plateau());
        write(svg, &hockey_svg(&curve, zeta), &mut files)?;
    }
    if let Some(z) = curve.plateau() {
        println!("plateau {z:.6}");
    }
    Ok(files)
}

fn method_of(m: MethodArg) -> Method {
    match m {
        MethodArg::Fe => Method::FixedEnergyTorus,
        MethodArg::Dd => Method::DrivenDissipativeStationary,
        MethodArg::Plateau => Method::HockeyPlateau,
    }
}

pub fn critical(a: &CriticalArgs) -> Outcome {
    let seed = a.seed.value();
    let est = match a.method {
        MethodArg::Fe => estimate_zeta_fe(
            &FeParams::new(a.lambda, a.n, seed).trials(a.trials).budget_factor(a.budget_factor),
        )?,
        MethodArg::Dd => {
            let mut p = DdParams::new(a.lambda, a.n, a.burn_in, a.samples, seed);
            p.budget_factor = a.budget_factor;
            estimate_zeta_dd(&p)?
        }
        MethodArg::Plateau => plateau_estimate(a.lambda, a.n, 1.25, 0.01, seed)?,
    };
    let mut text = header("critical", &a.seed, &[]);
    text.push_str(CriticalEstimate::CSV_HEADER);
    text.push('\n');
    text.push_str(&est.csv_row(a.seed.as_str()));
    text.push('\n');
    let mut files = Vec::new();
    write(&a.out, &text, &mut files)?;
    println!("zeta_hat {:.6} +- {:.6} ({})", est.zeta_hat, est.ci_halfwidth, est.method);
    Ok(files)
}

pub fn sweep_cmd(a: &SweepArgs) -> Outcome {
    let mut p = SweepParams::new(a.lambdas.clone(), a.ns.clone(), a.replicas, a.seed.value());
    p.methods = a.methods.iter().map(|&m| method_of(m)).collect();
    p.rho_max = a.rho_max;
    p.grid_step = a.grid;
    p.fe_trials = a.trials;
    p.budget_factor = a.budget_factor;
    let table = sweep(&p);
    let failed = table.rows.iter().filter(|r| r.outcome.is_err()).count();
    if failed > 0 {
        eprintln!("warning: {failed} of {} cells failed; see the # error lines", table.rows.len());
    }
    let mut text = header("sweep", &a.seed, &[]);
    text.push_str(&table.to_csv());
    let mut files = Vec::new();
    write(&a.out, &text, &mut files)?;
    Ok(files)
}

pub fn stabilize_cmd(a: &StabilizeArgs) -> Outcome {
    let input = fs::read_to_string(&a.input)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", a.input.display())))?;
    let snap = Snapshot::parse(&input)?;
    let seed = match &a.seed {
        Some(s) => s.clone(),
        None => snap.seed.parse::<Seed>()?,
    };
    let lambda = snap.lambda_value()?;
    let policy = match a.policy.as_str() {
        "random" => Policy::Random(derive(seed.value(), Stream::Policy, 0)),
        s => parse_policy(s).map_err(Failure::usage)?,
    };
    let tape = InstructionTape::new(derive(seed.value(), Stream::Tape, 0), lambda)?;
    let before = snap.config.clone();
    let run = Stabilizer::new(&tape).policy(policy).budget(a.budget).stabilize(snap.config)?;

    let mut files = Vec::new();
    let out_snap = Snapshot::new(run.final_config.clone(), snap.lambda.clone(), seed.as_str());
    write(&with_suffix(&a.out, ".snapshot"), &out_snap.to_text(), &mut files)?;

    let n = before.n();
    let mut odo = header("stabilize", &seed, &[("lambda", snap.lambda.clone()), ("n", n.to_string())]);
    odo.push_str("site,u,lefts,rights\n");
    for v in 0..n {
        let o = &run.odometer;
        let _ = writeln!(odo, "{},{},{},{}", v + 1, o.counts()[v], o.lefts()[v], o.rights()[v]);
    }
    write(&with_suffix(&a.out, ".odometer.csv"), &odo, &mut files)?;

    let on_sites = before.total_particles();
    let (sl0, sr0) = (before.sink_left(), before.sink_right());
    let conserved = on_sites + sl0 + sr0 == run.sleeping_count + run.ejected_left + run.ejected_right;
    let mut sum = header("stabilize", &seed, &[("lambda", snap.lambda.clone()), ("n", n.to_string())]);
    let _ = writeln!(sum, "particles_in={on_sites}");
    let _ = writeln!(sum, "sink_left_in={sl0}");
    let _ = writeln!(sum, "sink_right_in={sr0}");
    let _ = writeln!(sum, "sleeping={}", run.sleeping_count);
    let _ = writeln!(sum, "ejected_left={}", run.ejected_left - sl0);
    let _ = writeln!(sum, "ejected_right={}", run.ejected_right - sr0);
    let _ = writeln!(sum, "odometer_total={}", run.odometer.total());
    let _ = writeln!(sum, "conserved={conserved}");
    write(&with_suffix(&a.out, ".summary"), &sum, &mut files)?;
    println!(
        "sleeping {} ejected_left {} ejected_right {}",
        run.sleeping_count,
        run.ejected_left - sl0,
        run.ejected_right - sr0
    );
    Ok(files)
}

/// Parses `--sigma` for an interval of length `n` (if known).
pub fn parse_sigma(text: &str, n: Option<usize>, seed: u64) -> Result<Vec<u32>, Failure> {
    let need_n = || n.ok_or_else(|| Failure::usage(format!("--sigma {text} needs --n")));
    let bad = |_| Failure::usage(format!("bad --sigma `{text}`"));
    let sigma = if text == "zero" {
        vec![0; need_n()?]
    } else if let Some(c) = text.strip_prefix("const:") {
        vec![c.parse().map_err(bad)?; need_n()?]
    } else if let Some(k) = text.strip_prefix("uniform:") {
        let k: u64 = k.parse().map_err(bad)?;
        Placement::new(derive(seed, Stream::Placement, 0), need_n()?).configuration(k).active().to_vec()
    } else {
        let v = text.split(',').map(|x| x.trim().parse::<u32>()).collect::<Result<Vec<_>, _>>().map_err(bad)?;
        if let Some(n) = n {
            if n != v.len() {
                return Err(Failure::usage(format!("--sigma lists {} sites but --n is {n}", v.len())));
            }
        }
        v
    };
    Ok(sigma)
}

fn boundary(a: &LayerArgs, n: Option<usize>) -> Result<BoundaryData, Failure> {
    let sigma = parse_sigma(&a.sigma, n, a.seed.value())?;
    Ok(BoundaryData::new(sigma, a.u0, a.f0))
}

fn layer_header(a: &LayerArgs, action: &str, bd: &BoundaryData) -> String {
    header(
        &format!("layer {action}"),
        &a.seed,
        &[
            ("lambda", a.lambda.to_string()),
            ("n", bd.n.to_string()),
            ("sigma", a.sigma.clone()),
            ("u0", a.u0.to_string()),
            ("f0", a.f0.to_string()),
        ],
    )
}

pub fn layer(action: &LayerAction) -> Outcome {
    let mut files = Vec::new();
    match action {
        LayerAction::Min(a) => {
            let bd = boundary(a, a.n)?;
            let tape = InstructionTape::new(derive(a.seed.value(), Stream::Tape, 0), a.lambda)?;
            let m = minimal_odometer(&tape, &bd)?;
            let text = layer_header(a, "min", &bd) + &m.to_csv();
            write(&a.out, &text, &mut files)?;
        }
        LayerAction::Enum(a) => {
            let bd = boundary(a, a.n)?;
            let tape = InstructionTape::new(derive(a.seed.value(), Stream::Tape, 0), a.lambda)?;
            let sets = enumerate_infections(&tape, &bd, Some(a.window_cap))?;
            if sets.truncated {
                eprintln!(
                    "warning: the window cap {} cut some candidates; infection sets may be incomplete",
                    a.window_cap
                );
            }
            if a.oracle {
                let reference = oracle::infection_sets(&tape, &bd, a.window_cap)?;
                if let Some(v) = (0..reference.len()).find(|&v| reference[v] != sets.steps[v]) {
                    return Err(Failure {
                        code: EXIT_ENGINE,
                        msg: format!("oracle disagrees with the enumeration at step {v}"),
                    });
                }
                println!("oracle: identical cell sets at all {} steps", reference.len());
            }
            let text = layer_header(a, "enum", &bd) + &sets.dump();
            write(&a.out, &text, &mut files)?;
        }
        LayerAction::Greedy(a) => {
            let n = a.n.unwrap_or(a.horizon.saturating_sub(1));
            let bd = boundary(a, Some(n))?;
            let tape = InstructionTape::new(derive(a.seed.value(), Stream::Tape, 0), a.lambda)?;
            let g = greedy_path(&tape, &bd, a.k, a.horizon)?;
            let text = layer_header(a, "greedy", &bd) + &g.records_csv();
            write(&a.out, &text, &mut files)?;
            println!("s_horizon {} rate {:.6}", g.path.last().s, g.path.last().s as f64 / a.horizon as f64);
        }
        LayerAction::ZetaStar(a) => {
            let est = estimate_zeta_star(a.seed.value(), a.lambda, a.k, a.horizon, a.replicas)?;
            let mut text = header("layer zeta-star", &a.seed, &[("lambda", a.lambda.to_string())]);
            text.push_str(ZetaStarEstimate::CSV_HEADER);
            text.push('\n');
            text.push_str(&est.csv_row());
            text.push('\n');
            write(&a.out, &text, &mut files)?;
            println!("zeta_star({}) {:.6} +- {:.6}", a.k, est.mean, est.std_err);
        }
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_specs() {
        assert_eq!(parse_sigma("zero", Some(3), 0).unwrap(), vec![0, 0, 0]);
        assert_eq!(parse_sigma("const:2", Some(2), 0).unwrap(), vec![2, 2]);
        assert_eq!(parse_sigma("1,0,3", None, 0).unwrap(), vec![1, 0, 3]);
        assert_eq!(parse_sigma("uniform:7", Some(5), 1).unwrap().iter().sum::<u32>(), 7);
        assert!(parse_sigma("zero", None, 0).is_err());
        assert!(parse_sigma("1,x", None, 0).is_err());
        assert!(parse_sigma("1,2", Some(3), 0).is_err());
    }

    #[test]
    fn error_codes() {
        assert_eq!(Failure::from(ArwError::Inconclusive { rho: 0.5, absorbing: 1, trials: 2 }).code, 3);
        assert_eq!(Failure::from(ArwError::InfeasibleBoundary { step: 2 }).code, 4);
        assert_eq!(Failure::from(ArwError::BudgetExceeded { budget: 1 }).code, 2);
        assert_eq!(Failure::from(ArwError::InvalidParameter("x".into())).code, 1);
    }
}
