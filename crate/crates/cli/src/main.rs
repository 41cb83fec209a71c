use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use twoneuron::dynamics::{
    cycle_census, fmt17, integrate_with, CycleSearchConfig, IntegrateOptions, IntegratorConfig, LimitCycle,
    ReturnConfig,
};
use twoneuron::lyapunov::{bautin_curve, cross_check, l2bar, lyapunov_closed};
use twoneuron::portrait::{classify_portrait, is_catalogued, PortraitConfig};
use twoneuron::scan::{bautin_points, bt_points, hopf_curve, region_scan, sn_curve, write_curves_csv};
use twoneuron::{equilibria, Equilibrium, Error, Params};

/// Output paths given as relative paths are resolved against this
/// directory when it is set.
const OUT_DIR_VAR: &str = "TWONEURON_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "twoneuron",
    version,
    about = "Bifurcation toolkit for the planar two-neuron sigmoid network"
)]
#[command(allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Point {
    /// Self-excitation gain
    #[arg(short = 'a', allow_negative_numbers = true)]
    a: f64,
    /// Inhibition gain
    #[arg(short = 'b', allow_negative_numbers = true)]
    b: f64,
    /// Offset
    #[arg(short = 'c', allow_negative_numbers = true)]
    c: f64,
}

impl Point {
    fn params(&self) -> twoneuron::Result<Params> {
        Params::new(self.a, self.b, self.c)
    }
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of standard output
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

impl Output {
    fn open(&self) -> anyhow::Result<Box<dyn Write>> {
        match &self.out {
            None => Ok(Box::new(io::stdout().lock())),
            Some(path) => {
                let path = resolve(path);
                let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                Ok(Box::new(f))
            }
        }
    }
}

fn resolve(path: &PathBuf) -> PathBuf {
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.clone(),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Equilibria and their linear types (JSON)
    Equilibria {
        #[command(flatten)]
        point: Point,
        /// Residual tolerance of the equilibrium equation
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
    },
    /// Lyapunov coefficients at a Hopf point (JSON)
    Lyapunov(LyapunovArgs),
    /// Samples of the Bautin curve (CSV)
    Bautin {
        #[arg(long, default_value_t = 1e-3)]
        theta_min: f64,
        #[arg(long, default_value_t = 1e3)]
        theta_max: f64,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Limit cycles (JSON)
    Cycles {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Phase-portrait code
    Portrait {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        search: SearchArgs,
        /// Print a JSON object instead of the bare code
        #[arg(long)]
        json: bool,
    },
    /// Portrait codes on a (b, c) grid (CSV, optional JSON legend)
    Scan {
        #[arg(short = 'a', allow_negative_numbers = true)]
        a: f64,
        #[arg(long)]
        b_min: f64,
        #[arg(long)]
        b_max: f64,
        #[arg(long, allow_negative_numbers = true)]
        c_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        c_max: f64,
        /// Grid lines in b
        #[arg(long, default_value_t = 50)]
        nb: usize,
        /// Grid lines in c
        #[arg(long, default_value_t = 50)]
        nc: usize,
        /// Worker threads (0 uses every core)
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Write the legend of codes to this JSON file
        #[arg(long)]
        legend: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Saddle-node, Hopf, Bautin and Bogdanov-Takens samples at fixed a (CSV)
    Curves {
        #[arg(short = 'a', allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
        u0_min: f64,
        #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
        u0_max: f64,
        #[arg(long, default_value_t = 0.0)]
        b_min: f64,
        /// Upper end of the Hopf sweep; defaults to 10 a
        #[arg(long)]
        b_max: Option<f64>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Trajectory from (u0, v0) (CSV)
    Integrate {
        #[command(flatten)]
        point: Point,
        #[arg(long, allow_negative_numbers = true)]
        u0: f64,
        #[arg(long, allow_negative_numbers = true)]
        v0: f64,
        /// Final time
        #[arg(short = 'T', long = "t-end")]
        t_end: f64,
        #[arg(long, default_value_t = 1e-10)]
        rtol: f64,
        #[arg(long, default_value_t = 1e-12)]
        atol: f64,
        /// Uniform sample spacing; every accepted step when omitted
        #[arg(long)]
        dt: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("base").required(true).args(["theta", "u0"]))]
#[command(group = clap::ArgGroup::new("gain").required(true).args(["b", "d", "bautin"]))]
struct LyapunovArgs {
    /// exp(4 u0)
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    u0: Option<f64>,
    #[arg(short = 'b', long, allow_negative_numbers = true)]
    b: Option<f64>,
    /// a - b
    #[arg(short = 'd', long, allow_negative_numbers = true)]
    d: Option<f64>,
    /// Take a - b from the curve where the first coefficient vanishes
    #[arg(long)]
    bautin: bool,
    /// Relative tolerance of the generic/closed-form agreement check
    #[arg(long, default_value_t = 1e-8)]
    rel_tol: f64,
}

#[derive(Args, Clone, Copy)]
struct SearchArgs {
    /// Relative tolerance of the return-map integration
    #[arg(long, default_value_t = 1e-12)]
    rtol: f64,
    /// Section ray angle in radians
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    ray_angle: f64,
    /// Initial displacement grid size
    #[arg(long, default_value_t = 200)]
    grid: usize,
}

impl SearchArgs {
    fn config(&self) -> CycleSearchConfig {
        CycleSearchConfig {
            grid_points: self.grid,
            ray_angle: self.ray_angle,
            ret: ReturnConfig::with_rtol(self.rtol),
            ..CycleSearchConfig::default()
        }
    }
}

#[derive(Serialize)]
struct CycleRecord<'a> {
    around: &'static str,
    #[serde(flatten)]
    cycle: &'a LimitCycle,
}

fn print_json(value: &impl Serialize) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn equilibria_json(p: &Params, eqs: &[Equilibrium]) -> serde_json::Value {
    json!({ "params": p, "equilibria": eqs })
}

fn cmd_lyapunov(args: &LyapunovArgs) -> anyhow::Result<()> {
    let theta = match (args.theta, args.u0) {
        (Some(t), _) => t,
        (None, Some(u0)) => (4.0 * u0).exp(),
        (None, None) => unreachable!("clap requires one of theta and u0"),
    };
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "theta",
            reason: format!("must be positive and finite, got {theta}"),
        }
        .into());
    }
    let a = (1.0 + theta).powi(2) / (2.0 * theta);
    let (d, bar) = if args.bautin {
        let bp = bautin_curve(theta)?;
        (bp.d(), Some(l2bar(theta)))
    } else if let Some(b) = args.b {
        (a - b, None)
    } else {
        (args.d.expect("clap requires a gain"), None)
    };
    let closed = lyapunov_closed(theta, d)?;
    let check = cross_check(theta, d, args.rel_tol);
    let (generic, agreement, c) = match &check {
        Ok(x) => (
            Some(json!({ "l1": x.generic.l1, "l2": x.generic.l2, "l3": x.generic.l3 })),
            Some(x.agree.iter().all(|&ok| ok)),
            Some(x.params.c()),
        ),
        Err(_) => (None, None, None),
    };
    print_json(&json!({
        "theta": theta,
        "u0": 0.25 * theta.ln(),
        "a": a,
        "b": a - d,
        "c": c,
        "d": d,
        "l1": closed.l1,
        "l2": closed.l2,
        "l3": closed.l3,
        "l2bar": bar,
        "sources": {
            "closed_form": { "l1": closed.l1, "l2": closed.l2, "l3": closed.l3 },
            "generic": generic,
        },
        "agreement": agreement,
        "note": check.err().map(|e| e.to_string()),
    }))
}

fn cmd_bautin(theta_min: f64, theta_max: f64, samples: usize, output: &Output) -> anyhow::Result<()> {
    if !(theta_min > 0.0 && theta_max > theta_min) || samples < 2 {
        return Err(Error::InvalidParameter {
            name: "theta range",
            reason: "need 0 < theta_min < theta_max and at least two samples".into(),
        }
        .into());
    }
    let mut w = csv::Writer::from_writer(output.open()?);
    w.write_record(["vartheta", "a", "b", "c", "u0", "l2bar"])?;
    let ratio = (theta_max / theta_min).ln();
    for i in 0..samples {
        let t = theta_min * (ratio * i as f64 / (samples - 1) as f64).exp();
        let Ok(bp) = bautin_curve(t) else { continue };
        w.write_record([t, bp.a, bp.b, bp.c, bp.u0, bp.l2bar()].map(fmt17))?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_cycles(point: &Point, search: &SearchArgs) -> anyhow::Result<()> {
    let p = point.params()?;
    let eqs = equilibria(&p, 1e-13);
    let census = cycle_census(&p, &eqs, &search.config())?;
    let mut records = Vec::new();
    let labels: &[&str] = if eqs.len() == 1 {
        &["single"]
    } else {
        &["left", "saddle", "right"]
    };
    for (label, cycles) in labels.iter().zip(&census.around) {
        records.extend(cycles.iter().map(|c| CycleRecord {
            around: label,
            cycle: c,
        }));
    }
    records.extend(census.enclosing.iter().map(|c| CycleRecord {
        around: "enclosing",
        cycle: c,
    }));
    print_json(&json!({ "params": p, "equilibria": eqs, "cycles": records }))
}

fn cmd_portrait(point: &Point, search: &SearchArgs, as_json: bool) -> anyhow::Result<()> {
    let p = point.params()?;
    let cfg = PortraitConfig {
        search: search.config(),
        ..PortraitConfig::default()
    };
    let code = classify_portrait(&p, &cfg)?;
    if as_json {
        print_json(&json!({ "params": p, "code": code, "catalogued": is_catalogued(&code) }))
    } else {
        println!("{code}");
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    a: f64,
    b: (f64, f64),
    c: (f64, f64),
    res: (usize, usize),
    jobs: usize,
    legend: Option<&PathBuf>,
    output: &Output,
) -> anyhow::Result<()> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let map = pool.install(|| region_scan(a, b, c, res, &PortraitConfig::default()))?;
    map.write_csv(output.open()?)?;
    if let Some(path) = legend {
        let path = resolve(path);
        let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(f, &map.legend())?;
    }
    Ok(())
}

fn cmd_curves(a: f64, u0: (f64, f64), b: (f64, Option<f64>), samples: usize, output: &Output) -> anyhow::Result<()> {
    if !(a > 0.0) || samples == 0 {
        return Err(Error::InvalidParameter {
            name: "a",
            reason: "need a > 0 and a positive sample count".into(),
        }
        .into());
    }
    let mut all = sn_curve(a, u0, samples);
    match hopf_curve(a, (b.0, b.1.unwrap_or(10.0 * a)), samples) {
        Ok(h) => all.extend(h),
        Err(Error::NoHopf(_)) => {}
        Err(e) => return Err(e.into()),
    }
    all.extend(bautin_points(a));
    all.extend(bt_points(a));
    write_curves_csv(&all, output.open()?)?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Equilibria { point, tol } => {
            let p = point.params()?;
            print_json(&equilibria_json(&p, &equilibria(&p, *tol)))
        }
        Command::Lyapunov(args) => cmd_lyapunov(args),
        Command::Bautin {
            theta_min,
            theta_max,
            samples,
            output,
        } => cmd_bautin(*theta_min, *theta_max, *samples, output),
        Command::Cycles { point, search } => cmd_cycles(point, search),
        Command::Portrait { point, search, json } => cmd_portrait(point, search, *json),
        Command::Scan {
            a,
            b_min,
            b_max,
            c_min,
            c_max,
            nb,
            nc,
            jobs,
            legend,
            output,
        } => cmd_scan(
            *a,
            (*b_min, *b_max),
            (*c_min, *c_max),
            (*nb, *nc),
            *jobs,
            legend.as_ref(),
            output,
        ),
        Command::Curves {
            a,
            u0_min,
            u0_max,
            b_min,
            b_max,
            samples,
            output,
        } => cmd_curves(*a, (*u0_min, *u0_max), (*b_min, *b_max), *samples, output),
        Command::Integrate {
            point,
            u0,
            v0,
            t_end,
            rtol,
            atol,
            dt,
            output,
        } => {
            let p = point.params()?;
            let opts = IntegrateOptions {
                integrator: IntegratorConfig::with_tolerances(*rtol, *atol),
                sample_dt: *dt,
                ..IntegrateOptions::default()
            };
            let tr = integrate_with(&p, [*u0, *v0], *t_end, &opts)?;
            tr.write_csv(output.open()?)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::InvalidParameter { .. }) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
