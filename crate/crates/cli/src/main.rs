use std::f64::consts::FRAC_PI_4;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use bloch_synth::dynamics::{fmt17, simulate};
use bloch_synth::oracle::{min_time_brackets, OracleOptions};
use bloch_synth::suboptimal::{compare_with, strategy_report, Strategy};
use bloch_synth::synthesis::{
    curves_csv, extremal_front, refraction_test, s_grid, singular_loci, solve_synthesis_with, switching_curve,
    ExtremalFamily, SynthesisOptions,
};
use bloch_synth::verify::{run_suite, Suite};
use bloch_synth::{normalize_params, rescale_time, Bang, BlochPoint, Error, NormalizedParams, PhysicalParams};
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "bloch-synth", version, about = "Time-optimal spin-1/2 control synthesis on the Bloch sphere")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Either the normalized angles or the physical constants; with neither,
/// α = 0.25 and β = π/4.
#[derive(Args, Debug, Clone)]
struct Params {
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Defaults to π/4 when only --alpha is given.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    e: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    m1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    m2: Option<f64>,
}

impl Params {
    /// Normalized parameters with k = 1, plus the physical ones if given.
    fn resolve(&self) -> Result<(NormalizedParams, Option<PhysicalParams>), Error> {
        let angles = self.alpha.is_some() || self.beta.is_some();
        let physical = self.e.is_some() || self.m1.is_some() || self.m2.is_some();
        match (angles, physical) {
            (true, true) => Err(Error::InvalidArgument(
                "give either --alpha/--beta or --e/--m1/--m2, not both".into(),
            )),
            (false, true) => {
                let (Some(e), Some(m1), Some(m2)) = (self.e, self.m1, self.m2) else {
                    return Err(Error::InvalidArgument("--e, --m1 and --m2 go together".into()));
                };
                let phys = PhysicalParams::new(e, m1, m2)?;
                let n = normalize_params(&phys)?;
                Ok((NormalizedParams::new(n.alpha, n.beta)?, Some(phys)))
            }
            (true, false) => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| Error::InvalidArgument("--beta needs --alpha".into()))?;
                Ok((NormalizedParams::new(alpha, self.beta.unwrap_or(FRAC_PI_4))?, None))
            }
            (false, false) => Ok((NormalizedParams::symmetric(0.25)?, None)),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Optimal extremal reaching a target (JSON).
    Synth {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        target: BlochPoint,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Radius of the excluded disk around S (default 3α).
        #[arg(long)]
        exclusion: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trajectory of one extremal family member (CSV).
    Extremal {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_parser = parse_bang)]
        family: Bang,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        time: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Endpoints of all extremals at a fixed time (CSV).
    Front {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        time: f64,
        #[arg(long, default_value_t = 720)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Switching curve C_k with refraction verdicts (CSV).
    Curves {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[arg(long, value_parser = parse_bang, default_value = "pp")]
        family: Bang,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Circles carrying singular arcs (CSV).
    Loci {
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 360)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// S1 or S2 schedule from N towards S (JSON).
    Suboptimal {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_parser = parse_strategy)]
        strategy: Strategy,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Suboptimal over circle-law transfer time (JSON on stdout).
    Compare {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_parser = parse_strategy, default_value = "s1")]
        strategy: Strategy,
    },
    /// Brute-force minimum-time bracket (JSON).
    Oracle {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        target: BlochPoint,
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        eps: f64,
        /// Pruning cell size as a fraction of eps.
        #[arg(long, default_value_t = 0.25)]
        cell_fraction: f64,
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Property suites; exit status 1 if any check fails.
    Verify {
        #[arg(long, value_parser = parse_suite, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_point(s: &str) -> Result<BlochPoint, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| format!("'{c}': {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [x1, x2, x3] => BlochPoint::new(x1, x2, x3).map_err(|e| e.to_string()),
        _ => Err(format!("expected X,Y,Z, got '{s}'")),
    }
}

fn parse_bang(s: &str) -> Result<Bang, String> {
    s.parse::<Bang>().map_err(|e| e.to_string())
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse::<Strategy>().map_err(|e| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse::<Suite>().map_err(|e| e.to_string())
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn json_line(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// S1/S2 are defined for equal bounds only.
fn quarter_pi(p: &NormalizedParams) -> Result<(), Error> {
    if p.is_quarter_pi() {
        Ok(())
    } else {
        Err(Error::BetaNotQuarterPi(p.beta))
    }
}

fn run(cmd: Cmd) -> Result<ExitCode, Error> {
    match cmd {
        Cmd::Synth { params, target, tol, exclusion, out } => {
            let (p, phys) = params.resolve()?;
            let opts = SynthesisOptions { tol, exclusion, ..SynthesisOptions::default() };
            let mut r = solve_synthesis_with(&target, &p, &opts)?;
            r.physical_time = phys.map(|ph| rescale_time(r.total_time, &ph));
            emit(&out, &json_line(&r.to_json()))?;
        }
        Cmd::Extremal { params, family, s, time, dt, out } => {
            let (p, _) = params.resolve()?;
            if !(time >= 0.0) || !time.is_finite() {
                return Err(Error::InvalidDuration(time));
            }
            let fam = ExtremalFamily::new(family, s, &p)?;
            let traj = simulate(&BlochPoint::N, &fam.schedule(time), &p, dt)?;
            emit(&out, &traj.to_csv())?;
        }
        Cmd::Front { params, time, samples, out } => {
            let (p, _) = params.resolve()?;
            emit(&out, &extremal_front(time, samples, &p)?.to_csv())?;
        }
        Cmd::Curves { params, k, samples, family, out } => {
            let (p, _) = params.resolve()?;
            if samples < 2 {
                return Err(Error::InvalidArgument("need at least 2 samples".into()));
            }
            let grid = s_grid(family, samples, &p);
            let rows: Vec<_> = switching_curve(k, &grid, family, &p)?
                .into_iter()
                .map(|c| (c, refraction_test(&c, &p).ok()))
                .collect();
            emit(&out, &curves_csv(&rows))?;
        }
        Cmd::Loci { params, samples, out } => {
            let (p, _) = params.resolve()?;
            if samples < 3 {
                return Err(Error::InvalidArgument("need at least 3 samples".into()));
            }
            let mut csv = String::from("label,u1,u2,x1,x2,x3\n");
            for locus in singular_loci(&p, samples) {
                for x in &locus.points {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{}",
                        locus.label,
                        locus.u1,
                        locus.u2,
                        fmt17(x.x1),
                        fmt17(x.x2),
                        fmt17(x.x3)
                    );
                }
            }
            emit(&out, &csv)?;
        }
        Cmd::Suboptimal { params, strategy, out } => {
            let (p, _) = params.resolve()?;
            quarter_pi(&p)?;
            emit(&out, &json_line(&strategy_report(strategy, p.alpha)?.to_json()))?;
        }
        Cmd::Compare { params, strategy } => {
            let (p, _) = params.resolve()?;
            quarter_pi(&p)?;
            print!("{}", json_line(&compare_with(p.alpha, strategy)?.to_json()));
        }
        Cmd::Oracle { params, target, dt, eps, cell_fraction, max_steps, out } => {
            let (p, _) = params.resolve()?;
            let opts = OracleOptions { max_steps, cell_fraction, ..OracleOptions::new(dt, eps) };
            let r = min_time_brackets(&[target], &p, &opts)?;
            emit(&out, &json_line(&r[0].to_json()))?;
        }
        Cmd::Verify { suite, seed, out } => {
            let report = run_suite(suite, seed)?;
            emit(&out, &json_line(&report.to_json()))?;
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("FAIL {:?}: {} ({})", c.suite, c.name, c.detail);
            }
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn fail(kind: &str, message: &str) -> ExitCode {
    eprintln!("{}", serde_json::json!({ "error": kind, "message": message }));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            return fail("InvalidArgument", msg.trim_end());
        }
    };
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => fail(e.kind(), &e.to_string()),
    }
}
