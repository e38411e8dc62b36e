//! Calibration sweep for the frozen regression constants.
//!
//! Runs the standard defocusing suite plus a wide amplitude sweep and
//! prints every empirical constant the tests freeze: per-run B/D, cbound
//! ratios, A/E², Sobolev maxima, energy drift, certificate shapes and the
//! interval-count cap. Run with `cargo run --release -p logwave --example
//! calibrate`.

use logwave::certifier::{greedy_partition, plan_subdivision, CertifierConstants, CertifierMargins};
use logwave::diagnostics::{report_from_norms, TrajectoryNorms};
use logwave::field::{sample_initial, Profile, RadialGrid};
use logwave::nonlinearity::NonlinearitySpec;
use logwave::solver::{evolve, RunStatus, SolveConfig};

fn run(
    amplitude: f64,
    n: usize,
    cfl: f64,
    t_final: f64,
    sigma: i32,
    stride: usize,
) -> Option<(f64, TrajectoryNorms, logwave::Trajectory)> {
    let grid = RadialGrid::new(8.0, n).unwrap();
    let spec = NonlinearitySpec { p: 5, c: 1, sigma, enabled: true };
    let data = Profile::GaussianBump {
        amplitude,
        width: 1.0,
        center: 0.0,
        support_radius: 3.0,
        velocity_amplitude: 0.0,
    }
    .instantiate(8.0)
    .unwrap();
    let state = sample_initial(grid, spec, &data).unwrap();
    let traj = evolve(
        &state,
        &SolveConfig::new(t_final, cfl).with_record_stride(stride),
    )
    .unwrap();
    if traj.status != RunStatus::Completed {
        println!("  amplitude {amplitude}: OVERFLOWED at t = {}", traj.last().t);
        return None;
    }
    let norms = TrajectoryNorms::compute(&traj);
    Some((amplitude, norms, traj))
}

fn main() {
    let constants = CertifierConstants::default();
    let margins = CertifierMargins {
        kappa_b: 1e9,
        cbound_margin: 1e9,
        kappa_a: 1.0,
    };

    println!("== standard suite (n=512, cfl=0.5, t_final=4) ==");
    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>10} {:>8}",
        "amp", "E", "A", "B", "D", "flux", "A/E^2", "B/D", "cbound", "sobolev", "drift"
    );
    let amps = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0, 1.5, 2.0, 3.0, 4.0];
    let mut max_bn_over_dn: f64 = 0.0;
    for &amp in &amps {
        let Some((_, norms, traj)) = run(amp, 512, 0.5, 4.0, 1, 4) else {
            continue;
        };
        let rep = report_from_norms(&traj, &norms);
        let cbound_denom = rep.d + rep.a_total.sqrt() * rep.b * (2.0 + rep.b * rep.b).ln().sqrt();
        let cert = greedy_partition(&traj, &norms, &constants, &margins);
        let cert_desc = match &cert {
            Ok(c) => {
                for k in 0..c.intervals() {
                    let ratio = c.b_values[k] / c.d_bounds[k];
                    if ratio > max_bn_over_dn {
                        max_bn_over_dn = ratio;
                    }
                }
                format!("N={} {}", c.intervals(), c.verdict)
            }
            Err(e) => format!("cert-error: {e}"),
        };
        println!(
            "{:>6} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5} {:>12.5} {:>10.5} {:>8.2e}  {}",
            amp,
            rep.energy,
            rep.a_total,
            rep.b,
            rep.d,
            rep.morawetz_flux,
            rep.a_total / (rep.energy * rep.energy),
            rep.b / rep.d,
            rep.b / cbound_denom,
            rep.sobolev_ratio_max,
            rep.energy_drift,
            cert_desc
        );
    }
    println!("max per-interval B_n/D_n across suite: {max_bn_over_dn:.4}");

    println!("\n== interval-count cap scan (A in [0,0.2], D in [0.05,50]) ==");
    let mut worst = 0.0f64;
    let mut worst_pair = (0.0, 0.0);
    for ia in 1..=60 {
        let a = 0.2 * ia as f64 / 60.0;
        for id in 0..=60 {
            let d = 0.05 * (50.0f64 / 0.05).powf(id as f64 / 60.0);
            let plan = plan_subdivision(a, d, &constants);
            let needed = (plan.intervals as f64).ln() / (a * (2.0 + d).ln());
            if needed > worst {
                worst = needed;
                worst_pair = (a, d);
            }
        }
    }
    println!(
        "max needed kappa = {worst:.2} at (A, D) = {worst_pair:?}; frozen kappa = {}",
        constants.kappa
    );

    println!("\n== acceptance certificate suite probe (n=1024, stride 2, t_final 4) ==");
    for &amp in &[0.2, 0.4, 0.6, 0.8, 0.85, 0.9, 0.95] {
        let grid = RadialGrid::new(8.0, 1024).unwrap();
        let data = Profile::GaussianBump {
            amplitude: amp,
            width: 1.0,
            center: 0.0,
            support_radius: 3.0,
            velocity_amplitude: 0.0,
        }
        .instantiate(8.0)
        .unwrap();
        let state = sample_initial(grid, NonlinearitySpec::defocusing_quintic_log(), &data)
            .unwrap();
        let traj = evolve(&state, &SolveConfig::new(4.0, 0.5).with_record_stride(2)).unwrap();
        let norms = TrajectoryNorms::compute(&traj);
        let rep = report_from_norms(&traj, &norms);
        match greedy_partition(&traj, &norms, &constants, &margins) {
            Ok(c) => {
                let plan = plan_subdivision(rep.a_total, rep.d, &constants);
                let max_bd = (0..c.intervals())
                    .map(|k| c.b_values[k] / c.d_bounds[k])
                    .fold(0.0f64, f64::max);
                println!(
                    "  amp {amp}: N={} plan={} cap={:.3e} verdict={} max B_n/D_n={:.4} A={:.4e} D={:.4}",
                    c.intervals(),
                    plan.intervals,
                    plan.cap,
                    c.verdict,
                    max_bd,
                    rep.a_total,
                    rep.d
                );
            }
            Err(e) => println!("  amp {amp}: {e}"),
        }
    }

    println!("\n== morawetz amplitude sweep (two decades from the ratio peak) ==");
    // Per-amplitude CFL from the stiffness of the nonlinear restoring term:
    // leapfrog needs dt·ω < 2 with ω² = f'(sup u); defocusing keeps
    // sup u near the initial amplitude, so dt·ω(1.3·amp) ≤ 0.5 is ample.
    let fprime = |u: f64| 5.0 * u.powi(4) * (2.0 + u * u).ln() + 2.0 * u.powi(6) / (2.0 + u * u);
    println!(
        "{:>6} {:>10} {:>12} {:>12} {:>12} {:>12} {:>10} {:>8}",
        "amp", "cfl", "E", "A", "A/E^2", "B", "sobolev", "drift"
    );
    let mut prev_max: f64 = 0.0;
    let t0 = std::time::Instant::now();
    for &amp in &[2.0, 4.0, 8.0, 20.0, 50.0, 100.0, 200.0] {
        let n = 512usize;
        let t_final = 2.0;
        let dr = 8.0 / n as f64;
        let omega = fprime(1.3 * amp).sqrt();
        let cfl = (0.5 / (omega * dr)).min(0.5);
        let steps = (t_final / (cfl * dr)).ceil() as usize;
        let stride = (steps / 200).max(2);
        let Some((_, norms, traj)) = run(amp, n, cfl, t_final, 1, stride) else {
            continue;
        };
        let rep = report_from_norms(&traj, &norms);
        let ratio = rep.a_total / (rep.energy * rep.energy);
        let monotone = if prev_max > 0.0 && ratio > 1.2 * prev_max {
            "  <-- VIOLATES 1.2x"
        } else {
            ""
        };
        prev_max = prev_max.max(ratio);
        println!(
            "{:>6} {:>10.6} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e} {:>10.5} {:>8.2e}{}",
            amp, cfl, rep.energy, rep.a_total, ratio, rep.b, rep.sobolev_ratio_max, rep.energy_drift, monotone
        );
    }
    println!("  sweep wall time: {:.1?}", t0.elapsed());

    println!("\n== focusing threshold scan (n=512, t_final=4) ==");
    for &amp in &[1.0, 1.5, 2.0, 2.5, 3.0, 4.0] {
        let grid = RadialGrid::new(8.0, 512).unwrap();
        let data = Profile::GaussianBump {
            amplitude: amp,
            width: 1.0,
            center: 0.0,
            support_radius: 3.0,
            velocity_amplitude: 0.0,
        }
        .instantiate(8.0)
        .unwrap();
        let state = sample_initial(grid, NonlinearitySpec::focusing_quintic_log(), &data).unwrap();
        let traj = evolve(&state, &SolveConfig::new(4.0, 0.5).with_record_stride(4)).unwrap();
        println!(
            "  amplitude {amp}: {:?} at t = {:.4}",
            traj.status,
            traj.last().t
        );
    }
}
