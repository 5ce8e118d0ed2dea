//! Command-line front end: instance classification, profile solves, phase
//! diagram sweeps, the counterexample sampler, and the verification suites.
//!
//! Exit codes: 0 on success / verification pass, 1 on verification failure,
//! 2 on invalid input.

use clap::{Parser, Subcommand};
use pharmonic::counterexample::{e1_energy, EpsMap};
use pharmonic::geometry::{AnnulusPair, Exponent};
use pharmonic::modulus::{classify, modulus_mp};
use pharmonic::radial::{identity_energy, solve_profile, weights, RadialMinimizer};
use pharmonic::verify::run_suite;
use pharmonic::ExtReal;
use serde_json::json;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pharmonic",
    version,
    about = "Radial minimizers of the planar p-harmonic energy between annuli"
)]
struct Cli {
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap on worker threads for sweeps and verification suites.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// RNG seed, recorded in every artifact.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify an annulus pair into its phase regime (JSON).
    Phase {
        #[arg(long)]
        p: f64,
        /// Domain inner radius (0 gives the punctured disk).
        #[arg(long)]
        r: f64,
        /// Domain outer radius.
        #[arg(long = "R", default_value_t = 1.0)]
        big_r: f64,
        /// Target inner radius.
        #[arg(long = "rstar")]
        r_star: f64,
        /// Target outer radius.
        #[arg(long = "Rstar", default_value_t = 1.0)]
        big_r_star: f64,
    },
    /// Tabulate the critical modulus m_p over a log-spaced ratio grid (CSV).
    Modulus {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        xmin: f64,
        #[arg(long, default_value_t = 100.0)]
        xmax: f64,
        /// Number of grid rows.
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
    /// Solve the minimizing radial profile on a normalized instance and emit
    /// the profile with its gauge and weight columns (CSV).
    Profile {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        r: f64,
        #[arg(long = "rstar")]
        r_star: f64,
    },
    /// Solve a normalized instance and report its energy anchors (JSON).
    Energy {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        r: f64,
        #[arg(long = "rstar")]
        r_star: f64,
    },
    /// Run one verification suite and emit its JSON report.
    Verify {
        /// One of: ode, radial, curve, counterexample, fixed-boundary, duality.
        suite: String,
        /// Extra construction parameter check (counterexample suite only).
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Phase-diagram sweep over (R/r, R*/r*) ratio grids at fixed p (CSV).
    Sweep {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1.05)]
        xmin: f64,
        #[arg(long, default_value_t = 50.0)]
        xmax: f64,
        #[arg(long, default_value_t = 20)]
        nx: usize,
        #[arg(long, default_value_t = 1.05)]
        ymin: f64,
        #[arg(long, default_value_t = 50.0)]
        ymax: f64,
        #[arg(long, default_value_t = 20)]
        ny: usize,
    },
    /// Sample the free-boundary construction h^(eps) on a polar grid (CSV).
    CounterexampleSample {
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 40)]
        ns: usize,
        #[arg(long, default_value_t = 80)]
        ntheta: usize,
    },
}

fn emit(out: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1).max(1) as f64))
        .collect()
}

/// Gauge value at `s`, extended by 0 over a collapsed plateau.
fn gauge_value(m: &RadialMinimizer, s: f64) -> pharmonic::Result<f64> {
    if let Some(r0) = m.collapse_radius {
        if s <= r0 {
            return Ok(0.0);
        }
    }
    let (d0, d1) = m.gauge.domain();
    m.gauge.eval(s.clamp(d0, d1))
}

fn run(cli: &Cli) -> pharmonic::Result<ExitCode> {
    match &cli.cmd {
        Cmd::Phase {
            p,
            r,
            big_r,
            r_star,
            big_r_star,
        } => {
            let a = AnnulusPair::new(*r, *big_r, *r_star, *big_r_star)?;
            let report = classify(&a, Exponent::new(*p)?)?;
            let doc = json!({
                "seed": cli.seed,
                "p": p,
                "instance": a,
                "report": report,
            });
            emit(&cli.out, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
                .map_err(|e| pharmonic::Error::Invalid(e.to_string()))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Modulus { p, xmin, xmax, n } => {
            let pe = Exponent::new(*p)?;
            if !(*xmin >= 1.0 && *xmax > *xmin && *n >= 2) {
                return Err(pharmonic::Error::Invalid(
                    "modulus grid needs 1 <= xmin < xmax and n >= 2".into(),
                ));
            }
            let mut csv = String::from("x,m_p\n");
            for x in log_grid(*xmin, *xmax, *n) {
                let m = modulus_mp(pe, ExtReal::Finite(x))?;
                csv.push_str(&format!("{x},{m}\n"));
            }
            emit(&cli.out, &csv).map_err(|e| pharmonic::Error::Invalid(e.to_string()))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Profile { p, r, r_star } => {
            let a = AnnulusPair::new(*r, 1.0, *r_star, 1.0)?;
            let m = solve_profile(&a, Exponent::new(*p)?)?;
            let w = weights(&m)?;
            let mut csv = String::from("s,H0,g,rho1,rho2\n");
            for (i, &s) in w.rho1.nodes().iter().enumerate() {
                let h = m.profile.eval(s)?;
                let g = gauge_value(&m, s)?;
                let r1 = w.rho1.values()[i];
                let r2 = w.rho2.values()[i];
                csv.push_str(&format!("{s},{h},{g},{r1},{r2}\n"));
            }
            emit(&cli.out, &csv).map_err(|e| pharmonic::Error::Invalid(e.to_string()))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Energy { p, r, r_star } => {
            let pe = Exponent::new(*p)?;
            let a = AnnulusPair::new(*r, 1.0, *r_star, 1.0)?;
            let m = solve_profile(&a, pe)?;
            let doc = json!({
                "seed": cli.seed,
                "p": p,
                "instance": a,
                "regime": m.regime,
                "energy": m.energy,
                "identity_energy": identity_energy(pe, *r),
                "collapse_radius": m.collapse_radius,
            });
            emit(&cli.out, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
                .map_err(|e| pharmonic::Error::Invalid(e.to_string()))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { suite, eps } => {
            let mut report = run_suite(suite, cli.seed)?;
            if suite == "counterexample" {
                if let Some(eps) = eps {
                    let e1 = e1_energy(&EpsMap::new(*eps)?, 48);
                    let sqrt2pi = 2f64.sqrt() * PI;
                    let passed = e1 < sqrt2pi;
                    report.passed &= passed;
                    report.checks.push(pharmonic::verify::CheckResult {
                        name: format!("e1_below_identity_eps_{eps}"),
                        passed,
                        detail: format!("E_1 = {e1:.8} vs sqrt(2) pi = {sqrt2pi:.8}"),
                    });
                }
            }
            let doc = json!({ "seed": cli.seed, "report": report });
            emit(&cli.out, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
                .map_err(|e| pharmonic::Error::Invalid(e.to_string()))?;
            Ok(if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Sweep {
            p,
            xmin,
            xmax,
            nx,
            ymin,
            ymax,
            ny,
        } => {
            let pe = Exponent::new(*p)?;
            if !(*xmin > 1.0 && *xmax > *xmin && *ymin > 1.0 && *ymax > *ymin) {
                return Err(pharmonic::Error::Invalid(
                    "sweep ratio grids must start above 1 and increase".into(),
                ));
            }
            use rayon::prelude::*;
            let xs = log_grid(*xmin, *xmax, *nx);
            let ys = log_grid(*ymin, *ymax, *ny);
            let rows: pharmonic::Result<Vec<String>> = xs
                .par_iter()
                .map(|&x| {
                    let mut block = String::new();
                    for &y in &ys {
                        let a = AnnulusPair::new(1.0 / x, 1.0, 1.0 / y, 1.0)?;
                        let rep = classify(&a, pe)?;
                        block.push_str(&format!("{x},{y},{}\n", rep.regime.as_str()));
                    }
                    Ok(block)
                })
                .collect();
            let csv = format!("domain_ratio,target_ratio,regime\n{}", rows?.join(""));
            emit(&cli.out, &csv).map_err(|e| pharmonic::Error::Invalid(e.to_string()))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::CounterexampleSample { eps, ns, ntheta } => {
            let map = EpsMap::new(*eps)?;
            if *ns < 2 || *ntheta < 2 {
                return Err(pharmonic::Error::Invalid("grid sizes must be >= 2".into()));
            }
            let mut csv = String::from("s,theta,abs_h,arg_h\n");
            for i in 1..=*ns {
                let s = i as f64 / (*ns + 1) as f64;
                for j in 0..*ntheta {
                    let theta = 2.0 * PI * j as f64 / *ntheta as f64;
                    let (rho, alpha) = map.eval(s, theta);
                    csv.push_str(&format!("{s},{theta},{rho},{alpha}\n"));
                }
            }
            emit(&cli.out, &csv).map_err(|e| pharmonic::Error::Invalid(e.to_string()))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
