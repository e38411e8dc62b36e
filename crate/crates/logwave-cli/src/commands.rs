//! Implementations of the four subcommands.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use logwave::certifier::{check_cbound, double_exp_bound, greedy_partition, plan_subdivision};
use logwave::config::RunConfig;
use logwave::diagnostics::{report_from_norms, DiagnosticsReport, TrajectoryNorms};
use logwave::field::{sample_initial, Profile};
use logwave::formats::{
    format_f64, read_trajectory_dump, write_certificate_csv, write_certificate_text,
    write_diagnostics_csv, write_trajectory_dump,
};
use logwave::solver::{convergence_order, evolve, ConvergenceVerdict, RunStatus, Trajectory};
use logwave::{Error, Result};

use crate::ConfigArgs;

/// Environment variable overriding the output directory (beaten only by
/// `--out`).
pub const OUTPUT_DIR_ENV: &str = "LOGWAVE_OUTPUT_DIR";

fn set_amplitude(profile: &mut Profile, value: f64) -> Result<()> {
    match profile {
        Profile::GaussianBump { amplitude, .. }
        | Profile::PolynomialBump { amplitude, .. }
        | Profile::StandingWave { amplitude, .. } => {
            *amplitude = value;
            Ok(())
        }
        _ => Err(Error::Config {
            path: "data.profile".into(),
            msg: "--amplitude needs a bump or standing-wave profile".into(),
        }),
    }
}

fn set_width(profile: &mut Profile, value: f64) -> Result<()> {
    match profile {
        Profile::GaussianBump { width, .. } | Profile::PolynomialBump { width, .. } => {
            *width = value;
            Ok(())
        }
        _ => Err(Error::Config {
            path: "data.profile".into(),
            msg: "--width needs a bump profile".into(),
        }),
    }
}

fn set_support_radius(profile: &mut Profile, value: f64) -> Result<()> {
    match profile {
        Profile::GaussianBump { support_radius, .. } => {
            *support_radius = value;
            Ok(())
        }
        _ => Err(Error::Config {
            path: "data.profile".into(),
            msg: "--support-radius needs the gaussian-bump profile".into(),
        }),
    }
}

/// Load the config file (or defaults), apply flag overrides, validate.
pub fn load_config(args: &ConfigArgs) -> Result<RunConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            RunConfig::parse_toml(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(v) = args.amplitude {
        set_amplitude(&mut config.data, v)?;
    }
    if let Some(v) = args.width {
        set_width(&mut config.data, v)?;
    }
    if let Some(v) = args.support_radius {
        set_support_radius(&mut config.data, v)?;
    }
    if let Some(v) = args.n {
        config.grid.n = v;
    }
    if let Some(v) = args.r_max {
        config.grid.r_max = v;
    }
    if let Some(v) = args.t_final {
        config.solve.t_final = v;
    }
    if let Some(v) = args.cfl {
        config.solve.cfl = v;
    }
    if let Some(v) = args.record_stride {
        config.solve.record_stride = v;
    }
    if let Some(v) = args.sigma {
        config.nonlinearity.sigma = v;
    }
    if let Some(v) = args.eps0 {
        config.certifier.eps0 = v;
    }
    if let Some(v) = args.c0 {
        config.certifier.c0 = v;
    }
    if let Some(v) = args.kappa {
        config.certifier.kappa = v;
    }
    if let Some(v) = args.kappa_b {
        config.certifier.kappa_b = v;
    }
    if let Some(v) = args.cbound_margin {
        config.certifier.cbound_margin = v;
    }
    config.validate()?;
    Ok(config)
}

fn output_dir(args: &ConfigArgs, config: &RunConfig) -> Result<PathBuf> {
    let dir = if let Some(out) = &args.out {
        out.clone()
    } else if let Ok(env_dir) = std::env::var(OUTPUT_DIR_ENV) {
        PathBuf::from(env_dir)
    } else {
        config.output.directory.clone()
    };
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn evolve_config(config: &RunConfig) -> Result<Trajectory> {
    let grid = config.radial_grid()?;
    let data = config.initial_data()?;
    let state = sample_initial(grid, config.nonlinearity, &data)?;
    evolve(&state, &config.solve_config())
}

fn write_file(path: &Path, writer: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writer(&mut out)?;
    out.flush()?;
    Ok(())
}

fn summary_lines(config: &RunConfig, traj: &Trajectory, rep: &DiagnosticsReport) -> Vec<String> {
    let constants = config.certifier_constants();
    let margins = config.certifier_margins();
    let mut lines = vec![
        format!(
            "status = {}",
            match traj.status {
                RunStatus::Completed => "completed",
                RunStatus::Overflowed => "overflowed",
            }
        ),
        format!("E = {}", format_f64(rep.energy)),
        format!("A = {}", format_f64(rep.a_total)),
        format!("B = {}", format_f64(rep.b)),
        format!("D = {}", format_f64(rep.d)),
        format!("flux = {}", format_f64(rep.morawetz_flux)),
        format!("sobolev_ratio_max = {}", format_f64(rep.sobolev_ratio_max)),
        format!("strichartz_lhs = {}", format_f64(rep.strichartz_lhs)),
        format!("strichartz_rhs = {}", format_f64(rep.strichartz_rhs)),
        format!("energy_drift = {}", format_f64(rep.energy_drift)),
        format!(
            "double_exp_bound = {}",
            format_f64(double_exp_bound(
                rep.d,
                margins.kappa_a * rep.a_total,
                &constants
            ))
        ),
    ];
    match check_cbound(rep, margins.cbound_margin) {
        Ok(c) => lines.push(format!("cbound_ratio = {}", format_f64(c.ratio))),
        Err(_) => lines.push("cbound_ratio = n/a".to_string()),
    }
    lines.push(format!("dt = {}", format_f64(traj.dt)));
    lines.push(format!("record_stride = {}", traj.record_stride));
    lines
}

pub fn run(args: &ConfigArgs) -> Result<u8> {
    let config = load_config(args)?;
    let dir = output_dir(args, &config)?;
    let traj = evolve_config(&config)?;
    let norms = TrajectoryNorms::compute(&traj);
    let rep = report_from_norms(&traj, &norms);

    write_file(&dir.join("trajectory.csv"), |out| {
        write_trajectory_dump(&traj, out)
    })?;
    write_file(&dir.join("diagnostics.csv"), |out| {
        write_diagnostics_csv(&rep, out)
    })?;
    let lines = summary_lines(&config, &traj, &rep);
    write_file(&dir.join("summary.txt"), |out| {
        for line in &lines {
            writeln!(out, "{line}")?;
        }
        Ok(())
    })?;
    for line in &lines {
        println!("{line}");
    }
    println!("artifacts: {}", dir.display());
    Ok(match traj.status {
        RunStatus::Completed => 0,
        RunStatus::Overflowed => 4,
    })
}

struct SweepRow {
    label: String,
    status: String,
    metrics: Option<SweepMetrics>,
}

struct SweepMetrics {
    energy: f64,
    a_total: f64,
    b: f64,
    d: f64,
    flux: f64,
    a_over_e2: f64,
    b_bound: f64,
    sobolev: f64,
    cbound_ratio: Option<f64>,
}

fn sweep_one(config: &RunConfig) -> SweepRow {
    let label = String::new(); // filled by the caller
    match config.validate().and_then(|()| evolve_config(config)) {
        Ok(traj) => {
            let norms = TrajectoryNorms::compute(&traj);
            let rep = report_from_norms(&traj, &norms);
            let constants = config.certifier_constants();
            let margins = config.certifier_margins();
            let metrics = SweepMetrics {
                energy: rep.energy,
                a_total: rep.a_total,
                b: rep.b,
                d: rep.d,
                flux: rep.morawetz_flux,
                a_over_e2: if rep.energy > 0.0 {
                    rep.a_total / (rep.energy * rep.energy)
                } else {
                    0.0
                },
                b_bound: double_exp_bound(rep.d, margins.kappa_a * rep.a_total, &constants),
                sobolev: rep.sobolev_ratio_max,
                cbound_ratio: check_cbound(&rep, margins.cbound_margin)
                    .ok()
                    .map(|c| c.ratio),
            };
            SweepRow {
                label,
                status: match traj.status {
                    RunStatus::Completed => "completed".into(),
                    RunStatus::Overflowed => "overflowed".into(),
                },
                metrics: Some(metrics),
            }
        }
        Err(err) => SweepRow {
            label,
            status: format!("error: {err}"),
            metrics: None,
        },
    }
}

pub fn sweep(args: &ConfigArgs, parameter: &str, values: &str) -> Result<u8> {
    let base = load_config(args)?;
    let dir = output_dir(args, &base)?;

    let mut jobs: Vec<(String, RunConfig)> = Vec::new();
    for raw in values.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let mut config = base.clone();
        match parameter {
            "amplitude" => {
                let v: f64 = raw
                    .parse()
                    .map_err(|_| Error::Config {
                        path: "sweep.values".into(),
                        msg: format!("bad amplitude {raw:?}"),
                    })?;
                set_amplitude(&mut config.data, v)?;
            }
            "n" => {
                config.grid.n = raw.parse().map_err(|_| Error::Config {
                    path: "sweep.values".into(),
                    msg: format!("bad n {raw:?}"),
                })?;
            }
            "cfl" => {
                config.solve.cfl = raw.parse().map_err(|_| Error::Config {
                    path: "sweep.values".into(),
                    msg: format!("bad cfl {raw:?}"),
                })?;
            }
            "sigma" => {
                config.nonlinearity.sigma = raw.parse().map_err(|_| Error::Config {
                    path: "sweep.values".into(),
                    msg: format!("bad sigma {raw:?}"),
                })?;
            }
            other => {
                return Err(Error::Config {
                    path: "sweep.parameter".into(),
                    msg: format!("unknown parameter {other:?}"),
                })
            }
        }
        jobs.push((raw.to_string(), config));
    }

    // Fan out over a worker pool; rows are merged in parameter order
    // regardless of completion order.
    let results: Mutex<Vec<Option<SweepRow>>> =
        Mutex::new((0..jobs.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = if base.output.sweep_workers == 0 {
        std::thread::available_parallelism()
            .map(|p| p.get())
            .unwrap_or(1)
    } else {
        base.output.sweep_workers
    }
    .clamp(1, jobs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let mut row = sweep_one(&jobs[i].1);
                row.label = jobs[i].0.clone();
                results.lock().unwrap()[i] = Some(row);
            });
        }
    });
    let rows: Vec<SweepRow> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every sweep job produces a row"))
        .collect();

    let header = format!(
        "{parameter},status,E,A,B,D,flux,A_over_E2,double_exp_bound,sobolev_ratio_max,cbound_ratio"
    );
    let mut csv = vec![header.clone()];
    println!("{header}");
    for row in &rows {
        let line = match &row.metrics {
            Some(m) => format!(
                "{},{},{},{},{},{},{},{},{},{},{}",
                row.label,
                row.status,
                format_f64(m.energy),
                format_f64(m.a_total),
                format_f64(m.b),
                format_f64(m.d),
                format_f64(m.flux),
                format_f64(m.a_over_e2),
                format_f64(m.b_bound),
                format_f64(m.sobolev),
                m.cbound_ratio.map(format_f64).unwrap_or_else(|| "n/a".into()),
            ),
            None => format!("{},{},,,,,,,,,", row.label, row.status.replace(',', ";")),
        };
        println!("{line}");
        csv.push(line);
    }
    write_file(&dir.join("sweep.csv"), |out| {
        for line in &csv {
            writeln!(out, "{line}")?;
        }
        Ok(())
    })?;
    Ok(0)
}

pub fn certify(dump: &Path, args: &ConfigArgs) -> Result<u8> {
    let config = load_config(args)?;
    let dir = output_dir(args, &config)?;
    let mut reader = BufReader::new(File::open(dump)?);
    let traj = read_trajectory_dump(&mut reader)?;
    if traj.status != RunStatus::Completed {
        return Err(Error::Degenerate(
            "dump records an overflowed run; only completed runs are certifiable".into(),
        ));
    }
    let norms = TrajectoryNorms::compute(&traj);
    let rep = report_from_norms(&traj, &norms);
    let constants = config.certifier_constants();
    let margins = config.certifier_margins();
    let cert = greedy_partition(&traj, &norms, &constants, &margins)?;
    let plan = plan_subdivision(rep.a_total, rep.d, &constants);
    let cbound = check_cbound(&rep, margins.cbound_margin).ok();

    write_file(&dir.join("certificate.txt"), |out| {
        write_certificate_text(&cert, &margins, &rep, out)
    })?;
    write_file(&dir.join("certificate.csv"), |out| {
        write_certificate_csv(&cert, out)
    })?;
    write_file(&dir.join("diagnostics.csv"), |out| {
        write_diagnostics_csv(&rep, out)
    })?;

    println!("verdict = {}", cert.verdict);
    println!("intervals = {}", cert.intervals());
    println!("planned_intervals = {}", plan.intervals);
    println!("interval_cap = {}", format_f64(plan.cap));
    match &cbound {
        Some(c) => println!(
            "cbound_ratio = {} (margin {}, {})",
            format_f64(c.ratio),
            format_f64(c.margin),
            if c.pass { "pass" } else { "fail" }
        ),
        None => println!("cbound_ratio = n/a"),
    }
    println!("certificate: {}", dir.join("certificate.txt").display());
    Ok(if cert.verdict.passed() { 0 } else { 5 })
}

pub fn convergence(args: &ConfigArgs, levels: usize) -> Result<u8> {
    let config = load_config(args)?;
    let data = config.initial_data()?;
    let spec = config.nonlinearity;

    // Closed-form reference for the linear standing wave; self-convergence
    // otherwise.
    let reference: Option<Box<dyn Fn(f64, f64) -> f64 + Sync>> = match (&config.data, spec.enabled)
    {
        (Profile::StandingWave { amplitude, mode }, false) => {
            let k = f64::from(*mode) * std::f64::consts::PI / config.grid.r_max;
            let a = *amplitude;
            Some(Box::new(move |t: f64, r: f64| {
                (k * t).cos() * (k * r).sin() * a / k
            }))
        }
        _ => None,
    };

    let report = convergence_order(
        &data,
        spec,
        config.grid.r_max,
        config.grid.n,
        levels,
        config.solve.t_final,
        config.solve.cfl,
        reference.as_deref(),
    )?;

    println!("comparison_time = {}", format_f64(report.comparison_time));
    let metric_name = if reference.is_some() { "error" } else { "difference" };
    println!("{:>8} {:>24} {:>10}", "n", metric_name, "order");
    for entry in &report.entries {
        match entry.order {
            Some(q) => println!("{:>8} {:>24} {:>10.4}", entry.n, format_f64(entry.metric), q),
            None => println!("{:>8} {:>24} {:>10}", entry.n, format_f64(entry.metric), "-"),
        }
    }
    match report.verdict {
        ConvergenceVerdict::Exact => {
            println!("observed_order = exact (differences at machine noise)");
            Ok(0)
        }
        ConvergenceVerdict::Order(q) => {
            println!("observed_order = {q:.4}");
            Ok(if q >= 1.8 { 0 } else { 1 })
        }
    }
}
