//! Discrete versions of every continuum quantity controlling radial
//! solutions: the conserved energy, the weighted spacetime integral `A`,
//! the Morawetz flux, the spacetime norm `B`, the data norm `D`, the radial
//! Sobolev ratio and the two sides of the endpoint Strichartz estimate.
//!
//! Conventions:
//!
//! * Space integrals use the radial measure `4π r² dr` with trapezoid
//!   weights. The `1/|x|` Morawetz weight is folded analytically into the
//!   integrand (net weight `4π r`), so no node is singular.
//! * Time integrals use snapshot-level trapezoid quadrature; `record_stride`
//!   therefore controls diagnostic accuracy and is surfaced in the report.
//! * For radial fields `|∇ₓu| = |∂ᵣu|`, the Hessian satisfies
//!   `|∇²ₓu|² = u_rr² + 2(u_r/r)²` (with `u_r/r → u_rr(0)` at the origin),
//!   and `∇ₓ∂ₜu = ∂ᵣ∂ₜu` is formed by spatially differentiating the stored
//!   `w`-field.
//! * Window integrals are differences of cached prefix sums, so adjacent
//!   windows tile exactly up to one final rounding.

use std::f64::consts::PI;

use crate::error::Error;
use crate::field::{derive_radial, reconstruct_radial, FieldState};
use crate::solver::Trajectory;
use crate::Result;

/// Gradient norms below this make ratio diagnostics degenerate.
const DEGENERATE_TOL: f64 = 1e-14;

/// All per-instant quantities of one snapshot.
#[derive(Debug, Clone, Copy)]
pub struct NormSnapshot {
    pub t: f64,
    /// Conserved energy `∫ ½u_t² + ½|∇u|² + F(u) dx`.
    pub energy: f64,
    /// `‖u(t)‖_∞`.
    pub sup_u: f64,
    /// `‖∂ᵣu(t)‖_∞`.
    pub sup_du: f64,
    /// `‖∇_{t,x}u(t)‖₂`.
    pub l2_grad: f64,
    /// `‖∇_{t,x}∇ₓu(t)‖₂` (time-space gradient of the spatial gradient).
    pub grad2_l2: f64,
    /// `‖∇_{t,x}u(t)‖_{H¹ₓ} = (l2_grad² + grad2_l2²)^{1/2}`.
    pub h1_grad: f64,
    /// `∫ G(u)/|x| dx` at this instant.
    pub morawetz_density: f64,
    /// `∫ |u|⁸ log(2+u²) dx` at this instant.
    pub a_density: f64,
    /// `‖f(u(t))‖₂`, the Strichartz source term.
    pub l2_f: f64,
    /// `max_{j≥1} |u_j|·√r_j / ‖∇ₓu‖₂`; `None` when the spatial gradient
    /// norm is below the degeneracy tolerance.
    pub sobolev_ratio: Option<f64>,
}

/// Compute every per-instant norm of a state in one pass.
///
/// The state must not be overflowed; diagnostics on saturated fields are
/// meaningless.
pub fn snapshot_norms(state: &FieldState) -> NormSnapshot {
    debug_assert!(!state.overflowed, "diagnostics on overflowed state");
    let grid = state.grid;
    let spec = state.spec;
    let n = grid.n();
    let u = reconstruct_radial(&state.v, grid);
    let ut = reconstruct_radial(&state.w, grid);
    let (ur, urr) = derive_radial(&u, grid);
    let (utr, _) = derive_radial(&ut, grid);

    let mut energy = 0.0;
    let mut l2_grad_sq = 0.0;
    let mut grad_x_sq = 0.0;
    let mut grad2_sq = 0.0;
    let mut a_density = 0.0;
    let mut morawetz = 0.0;
    let mut l2_f_sq = 0.0;
    let mut sup_u = 0.0f64;
    let mut sup_du = 0.0f64;
    let mut sobolev = 0.0f64;

    for j in 0..=n {
        let r = grid.r(j);
        let wgt = grid.weight(j);
        let measure = wgt * r * r;
        let uj = u[j];
        let utj = ut[j];
        let urj = ur[j];
        // u_r/r at the origin tends to u_rr(0) by smooth even extension.
        let ur_over_r = if j == 0 { urr[0] } else { urj / r };
        let hessian_sq = urr[j] * urr[j] + 2.0 * ur_over_r * ur_over_r;

        energy += measure * (0.5 * utj * utj + 0.5 * urj * urj + spec.potential(uj));
        l2_grad_sq += measure * (utj * utj + urj * urj);
        grad_x_sq += measure * urj * urj;
        grad2_sq += measure * (utr[j] * utr[j] + hessian_sq);
        a_density += measure * uj.powi(8) * (2.0 + uj * uj).ln();
        morawetz += wgt * r * spec.morawetz_weight(uj);
        let fj = spec.f(uj);
        l2_f_sq += measure * fj * fj;
        sup_u = sup_u.max(uj.abs());
        sup_du = sup_du.max(urj.abs());
        if j >= 1 {
            sobolev = sobolev.max(uj.abs() * r.sqrt());
        }
    }

    let four_pi = 4.0 * PI;
    let grad_x_norm = (four_pi * grad_x_sq).sqrt();
    let l2_grad = (four_pi * l2_grad_sq).sqrt();
    let grad2_l2 = (four_pi * grad2_sq).sqrt();
    NormSnapshot {
        t: state.t,
        energy: four_pi * energy,
        sup_u,
        sup_du,
        l2_grad,
        grad2_l2,
        h1_grad: (l2_grad * l2_grad + grad2_l2 * grad2_l2).sqrt(),
        morawetz_density: four_pi * morawetz,
        a_density: four_pi * a_density,
        l2_f: (four_pi * l2_f_sq).sqrt(),
        sobolev_ratio: if grad_x_norm > DEGENERATE_TOL {
            Some(sobolev / grad_x_norm)
        } else {
            None
        },
    }
}

/// Conserved energy of a state (see [`NormSnapshot::energy`]).
pub fn energy(state: &FieldState) -> f64 {
    snapshot_norms(state).energy
}

/// `‖∇_{t,x}u‖_{H¹ₓ}` of a state; equals `D` when evaluated on initial data.
pub fn norm_d(state: &FieldState) -> f64 {
    snapshot_norms(state).h1_grad
}

/// Radial Sobolev ratio `max_{j≥1} |u_j|√r_j / ‖∇ₓu‖₂`.
///
/// Cauchy–Schwarz bounds the continuum version by `(4π)^{−1/2} ≈ 0.2821`.
pub fn radial_sobolev_ratio(state: &FieldState) -> Result<f64> {
    snapshot_norms(state)
        .sobolev_ratio
        .ok_or_else(|| Error::Degenerate("spatial gradient norm below 1e-14".into()))
}

/// A time window over a recorded trajectory. Endpoints snap to the nearest
/// snapshot time; windows outside the recorded span are rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow {
    pub start: f64,
    pub end: f64,
}

impl TimeWindow {
    pub fn new(start: f64, end: f64) -> Self {
        TimeWindow { start, end }
    }

    /// The whole recorded span of a trajectory.
    pub fn full(traj: &Trajectory) -> Self {
        TimeWindow {
            start: traj.first().t,
            end: traj.last().t,
        }
    }
}

/// Per-snapshot norms plus prefix sums of the two accumulating integrals.
///
/// This is the cached form consumed by the certifier; computing it costs
/// one pass over every snapshot.
#[derive(Debug, Clone)]
pub struct TrajectoryNorms {
    pub snapshots: Vec<NormSnapshot>,
    /// `prefix_a[i]` = trapezoid integral of `a_density` over snapshots
    /// `0..=i`; `prefix_a[0] = 0`.
    prefix_a: Vec<f64>,
    prefix_flux: Vec<f64>,
    prefix_l1_f: Vec<f64>,
}

impl TrajectoryNorms {
    pub fn compute(traj: &Trajectory) -> Self {
        let snapshots: Vec<NormSnapshot> = traj.states.iter().map(snapshot_norms).collect();
        let trapezoid = |field: &dyn Fn(&NormSnapshot) -> f64| -> Vec<f64> {
            let mut prefix = Vec::with_capacity(snapshots.len());
            let mut acc = 0.0;
            prefix.push(0.0);
            for pair in snapshots.windows(2) {
                let dt = pair[1].t - pair[0].t;
                acc += 0.5 * dt * (field(&pair[0]) + field(&pair[1]));
                prefix.push(acc);
            }
            prefix
        };
        TrajectoryNorms {
            prefix_a: trapezoid(&|s| s.a_density),
            prefix_flux: trapezoid(&|s| s.morawetz_density),
            prefix_l1_f: trapezoid(&|s| s.l2_f),
            snapshots,
        }
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// `A` over snapshots `i0..=i1`: `∫∫ |u|⁸ log(2+u²) dx dt`.
    pub fn window_a(&self, i0: usize, i1: usize) -> f64 {
        self.prefix_a[i1] - self.prefix_a[i0]
    }

    /// Morawetz flux over snapshots `i0..=i1`: `∫∫ G(u)/|x| dx dt`.
    pub fn window_flux(&self, i0: usize, i1: usize) -> f64 {
        self.prefix_flux[i1] - self.prefix_flux[i0]
    }

    /// `‖f(u)‖_{L¹ₜL²ₓ}` over snapshots `i0..=i1`.
    pub fn window_l1_f(&self, i0: usize, i1: usize) -> f64 {
        self.prefix_l1_f[i1] - self.prefix_l1_f[i0]
    }

    /// The four-piece spacetime norm `B` over snapshots `i0..=i1`:
    /// `Σ_{j=0,1} ‖∇ʲₓu‖_{L²ₜL^∞ₓ} + ‖∇_{t,x}∇ʲₓu‖_{L^∞ₜL²ₓ}`.
    pub fn window_b(&self, i0: usize, i1: usize) -> f64 {
        let mut l2t_sup_u = 0.0;
        let mut l2t_sup_du = 0.0;
        let mut linf_l2_grad = 0.0f64;
        let mut linf_grad2 = 0.0f64;
        for i in i0..=i1 {
            let s = &self.snapshots[i];
            linf_l2_grad = linf_l2_grad.max(s.l2_grad);
            linf_grad2 = linf_grad2.max(s.grad2_l2);
            if i > i0 {
                let p = &self.snapshots[i - 1];
                let dt = s.t - p.t;
                l2t_sup_u += 0.5 * dt * (p.sup_u * p.sup_u + s.sup_u * s.sup_u);
                l2t_sup_du += 0.5 * dt * (p.sup_du * p.sup_du + s.sup_du * s.sup_du);
            }
        }
        l2t_sup_u.sqrt() + l2t_sup_du.sqrt() + linf_l2_grad + linf_grad2
    }

    /// Both sides of the radial endpoint Strichartz estimate over
    /// `i0..=i1`: `lhs = ‖u‖_{L²ₜL^∞ₓ} + ‖∇_{t,x}u‖_{L^∞ₜL²ₓ}`,
    /// `rhs = ‖∇_{t,x}u(t₀)‖₂ + ‖f(u)‖_{L¹ₜL²ₓ}`.
    pub fn window_strichartz(&self, i0: usize, i1: usize) -> (f64, f64) {
        let mut l2t_sup_u = 0.0;
        let mut linf_l2_grad = 0.0f64;
        for i in i0..=i1 {
            let s = &self.snapshots[i];
            linf_l2_grad = linf_l2_grad.max(s.l2_grad);
            if i > i0 {
                let p = &self.snapshots[i - 1];
                let dt = s.t - p.t;
                l2t_sup_u += 0.5 * dt * (p.sup_u * p.sup_u + s.sup_u * s.sup_u);
            }
        }
        let lhs = l2t_sup_u.sqrt() + linf_l2_grad;
        let rhs = self.snapshots[i0].l2_grad + self.window_l1_f(i0, i1);
        (lhs, rhs)
    }

    /// Largest Sobolev ratio over all non-degenerate snapshots.
    pub fn sobolev_ratio_max(&self) -> f64 {
        self.snapshots
            .iter()
            .filter_map(|s| s.sobolev_ratio)
            .fold(0.0, f64::max)
    }
}

fn resolve(traj: &Trajectory, window: TimeWindow) -> Result<(usize, usize)> {
    let i0 = traj.snapshot_index_at(window.start)?;
    let i1 = traj.snapshot_index_at(window.end)?;
    if i0 > i1 {
        return Err(Error::WindowOutOfRange(format!(
            "window [{}, {}] is reversed",
            window.start, window.end
        )));
    }
    Ok((i0, i1))
}

/// `A = ∫∫ |u|⁸ log(2+u²) dx dt` over a window.
pub fn accumulate_a(traj: &Trajectory, window: TimeWindow) -> Result<f64> {
    let (i0, i1) = resolve(traj, window)?;
    Ok(TrajectoryNorms::compute(traj).window_a(i0, i1))
}

/// Morawetz flux `∫∫ G(u)/|x| dx dt` over a window.
pub fn morawetz_flux(traj: &Trajectory, window: TimeWindow) -> Result<f64> {
    let (i0, i1) = resolve(traj, window)?;
    Ok(TrajectoryNorms::compute(traj).window_flux(i0, i1))
}

/// The spacetime norm `B` over a window.
pub fn norm_b(traj: &Trajectory, window: TimeWindow) -> Result<f64> {
    let (i0, i1) = resolve(traj, window)?;
    Ok(TrajectoryNorms::compute(traj).window_b(i0, i1))
}

/// Both Strichartz sides over a window (see
/// [`TrajectoryNorms::window_strichartz`]).
pub fn strichartz_sides(traj: &Trajectory, window: TimeWindow) -> Result<(f64, f64)> {
    let (i0, i1) = resolve(traj, window)?;
    Ok(TrajectoryNorms::compute(traj).window_strichartz(i0, i1))
}

/// Scalar aggregates plus per-snapshot norms for one run.
#[derive(Debug, Clone)]
pub struct DiagnosticsReport {
    pub snapshots: Vec<NormSnapshot>,
    /// `A` over the full recorded span.
    pub a_total: f64,
    /// Morawetz flux over the full span.
    pub morawetz_flux: f64,
    /// `B` over the full span.
    pub b: f64,
    /// `D = ‖∇_{t,x}u(t₀)‖_{H¹ₓ}`, the h1_grad entry of the first snapshot.
    pub d: f64,
    /// Initial energy (the conserved value).
    pub energy: f64,
    /// `max_t |E(t) − E(0)| / E(0)`, zero for zero-energy runs.
    pub energy_drift: f64,
    pub sobolev_ratio_max: f64,
    pub strichartz_lhs: f64,
    pub strichartz_rhs: f64,
    /// Snapshot spacing parameters, surfaced because they set the accuracy
    /// of every time integral above.
    pub dt: f64,
    pub record_stride: usize,
}

/// Evaluate the full report over a trajectory's recorded span.
pub fn report(traj: &Trajectory) -> DiagnosticsReport {
    let norms = TrajectoryNorms::compute(traj);
    report_from_norms(traj, &norms)
}

/// [`report`] when the per-snapshot norms are already cached.
pub fn report_from_norms(traj: &Trajectory, norms: &TrajectoryNorms) -> DiagnosticsReport {
    let last = norms.len() - 1;
    let e0 = norms.snapshots[0].energy;
    let drift = norms
        .snapshots
        .iter()
        .map(|s| (s.energy - e0).abs())
        .fold(0.0, f64::max);
    let (lhs, rhs) = norms.window_strichartz(0, last);
    DiagnosticsReport {
        snapshots: norms.snapshots.clone(),
        a_total: norms.window_a(0, last),
        morawetz_flux: norms.window_flux(0, last),
        b: norms.window_b(0, last),
        d: norms.snapshots[0].h1_grad,
        energy: e0,
        energy_drift: if e0 > 0.0 { drift / e0 } else { 0.0 },
        sobolev_ratio_max: norms.sobolev_ratio_max(),
        strichartz_lhs: lhs,
        strichartz_rhs: rhs,
        dt: traj.dt,
        record_stride: traj.record_stride,
    }
}
