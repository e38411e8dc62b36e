//! Explicit leapfrog time integration of the reduced equation
//! `∂ₜₜv = ∂ᵣᵣv − r·f(v/r)` with Dirichlet ends, CFL control, light-cone
//! safety and blow-up detection.
//!
//! The scheme is the classical three-level leapfrog (central time, central
//! space): second order, time-reversible, and near-conservative for wave
//! equations. The nonlinearity is evaluated pointwise at the current level,
//! keeping the update explicit. The first step is bootstrapped by the
//! second-order Taylor expansion
//! `v(dt) = v(0) + dt·w(0) + (dt²/2)·(∂ᵣᵣv(0) − r·f(u(0)))`, which is
//! exactly the leapfrog-consistent previous level run backwards, so the
//! bootstrap preserves both global second order and time-reversal symmetry.
//!
//! The outer boundary is homogeneous Dirichlet. Runs are only admitted when
//! the light cone of the data cannot reach it (finite speed of propagation),
//! which makes the boundary condition irrelevant; data that satisfies the
//! Dirichlet condition exactly (standing waves) may opt out of the check.

use crate::error::Error;
use crate::field::{FieldState, InitialData, RadialGrid};
use crate::nonlinearity::NonlinearitySpec;
use crate::Result;

/// Default ceiling on `max|v|`; crossing it flags the run as overflowed.
pub const DEFAULT_OVERFLOW_THRESHOLD: f64 = 1e30;

/// Time-integration parameters. `dt = cfl·dr` with `cfl ∈ (0, 1]`, the
/// stability bound of the explicit scheme on the reduced 1D equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    pub t_final: f64,
    pub cfl: f64,
    /// Store every `record_stride`-th step in the trajectory.
    pub record_stride: usize,
    /// Blow-up detector: the run stops once `max|v|` exceeds this.
    pub overflow_threshold: f64,
    /// Verify that the data support plus `t_final` stays inside the grid.
    /// Disabled for boundary-exact data such as standing waves.
    pub enforce_cone: bool,
}

impl SolveConfig {
    pub fn new(t_final: f64, cfl: f64) -> Self {
        SolveConfig {
            t_final,
            cfl,
            record_stride: 1,
            overflow_threshold: DEFAULT_OVERFLOW_THRESHOLD,
            enforce_cone: true,
        }
    }

    pub fn with_record_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::config("solve.t_final", "must be positive"));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::config("solve.cfl", "must lie in (0, 1]"));
        }
        if self.record_stride == 0 {
            return Err(Error::config("solve.record_stride", "must be at least 1"));
        }
        if !(self.overflow_threshold > 0.0) {
            return Err(Error::config("solve.overflow_threshold", "must be positive"));
        }
        Ok(())
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// Reached `t_final`.
    Completed,
    /// `max|v|` crossed the overflow threshold (numerical or genuine
    /// blow-up); the trajectory holds the snapshots recorded up to that
    /// point. Light-cone violations are rejected before stepping and never
    /// appear as a status.
    Overflowed,
}

/// Time-ordered snapshots of one run, spaced by `record_stride·dt`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<FieldState>,
    pub dt: f64,
    pub record_stride: usize,
    pub status: RunStatus,
    pub grid: RadialGrid,
    pub spec: NonlinearitySpec,
}

impl Trajectory {
    pub fn first(&self) -> &FieldState {
        &self.states[0]
    }

    pub fn last(&self) -> &FieldState {
        self.states.last().expect("trajectory has snapshots")
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(|s| s.t)
    }

    /// Index of the snapshot nearest to `t`. Errors when `t` falls outside
    /// the recorded span (with a half-spacing slack at the ends).
    pub fn snapshot_index_at(&self, t: f64) -> Result<usize> {
        let first = self.states[0].t;
        let last = self.last().t;
        let slack = 0.5 * self.dt * self.record_stride as f64 + 1e-12;
        if t < first - slack || t > last + slack {
            return Err(Error::WindowOutOfRange(format!(
                "t = {t} outside recorded span [{first}, {last}]"
            )));
        }
        let mut best = 0;
        let mut best_gap = f64::INFINITY;
        for (i, s) in self.states.iter().enumerate() {
            let gap = (s.t - t).abs();
            if gap < best_gap {
                best_gap = gap;
                best = i;
            }
        }
        Ok(best)
    }
}

/// Largest radius at which the data is (numerically) nonzero, in units of
/// `u = v/r`; zero for the zero state.
pub fn measured_support_radius(state: &FieldState) -> f64 {
    let grid = state.grid;
    for j in (1..grid.len()).rev() {
        let r = grid.r(j);
        if state.v[j].abs() > 1e-14 * r || state.w[j].abs() > 1e-14 * r {
            return r;
        }
    }
    0.0
}

/// Acceleration of the reduced variable: `a_j = ∂ᵣᵣv|_j − r_j·f(v_j/r_j)`
/// at interior nodes; the Dirichlet ends are pinned (`a_0 = a_n = 0`).
pub(crate) fn acceleration(v: &[f64], grid: RadialGrid, spec: NonlinearitySpec) -> Vec<f64> {
    let n = grid.n();
    let dr = grid.dr();
    let inv_dr2 = 1.0 / (dr * dr);
    let mut a = vec![0.0; v.len()];
    for j in 1..n {
        let r = grid.r(j);
        let lap = (v[j + 1] - 2.0 * v[j] + v[j - 1]) * inv_dr2;
        a[j] = lap - r * spec.f(v[j] / r);
    }
    a
}

fn check_overflow(v: &[f64], t: f64, threshold: f64) -> Result<()> {
    for &x in v {
        if !x.is_finite() || x.abs() > threshold {
            return Err(Error::Overflow { t, threshold });
        }
    }
    Ok(())
}

/// One leapfrog update of a `(v, w)` state.
///
/// Since a single state carries no previous level, the update is the
/// kick-drift-kick form `v⁺ = v + dt·w + (dt²/2)a(v)`,
/// `w⁺ = w + (dt/2)(a(v) + a(v⁺))`, which reproduces the three-level
/// recursion `v⁺ = 2v − v⁻ + dt²·a(v)` together with its centered-difference
/// velocity exactly.
pub fn step(state: &FieldState, dt: f64) -> Result<FieldState> {
    step_with_threshold(state, dt, DEFAULT_OVERFLOW_THRESHOLD)
}

/// [`step`] with an explicit overflow threshold.
pub fn step_with_threshold(state: &FieldState, dt: f64, threshold: f64) -> Result<FieldState> {
    let grid = state.grid;
    if state.overflowed {
        return Err(Error::Overflow {
            t: state.t,
            threshold,
        });
    }
    if !(dt > 0.0 && dt <= grid.dr()) {
        return Err(Error::config("dt", "must satisfy 0 < dt <= dr"));
    }
    let n = grid.n();
    let a = acceleration(&state.v, grid, state.spec);
    let mut v_new = vec![0.0; grid.len()];
    for j in 1..n {
        v_new[j] = state.v[j] + dt * state.w[j] + 0.5 * dt * dt * a[j];
    }
    check_overflow(&v_new, state.t + dt, threshold)?;
    let a_new = acceleration(&v_new, grid, state.spec);
    let mut w_new = vec![0.0; grid.len()];
    for j in 1..n {
        w_new[j] = state.w[j] + 0.5 * dt * (a[j] + a_new[j]);
    }
    Ok(FieldState {
        t: state.t + dt,
        v: v_new,
        w: w_new,
        grid,
        spec: state.spec,
        overflowed: false,
    })
}

/// Evolve to `t_final`, recording a snapshot every `record_stride` steps.
///
/// The step count is rounded up to a multiple of the stride, so the final
/// snapshot lands at `t ≥ t_final` and snapshots are exactly uniformly
/// spaced. Snapshot velocities are the centered differences
/// `w^m = (v^{m+1} − v^{m−1})/(2dt)`; the initial snapshot keeps its given
/// `w`. On overflow the partial trajectory recorded so far is returned with
/// [`RunStatus::Overflowed`].
pub fn evolve(initial: &FieldState, config: &SolveConfig) -> Result<Trajectory> {
    config.validate()?;
    if initial.overflowed {
        return Err(Error::Overflow {
            t: initial.t,
            threshold: config.overflow_threshold,
        });
    }
    let grid = initial.grid;
    let dt = config.cfl * grid.dr();
    if config.enforce_cone {
        let support = measured_support_radius(initial);
        if support + config.t_final > grid.r_max() + 1e-12 {
            return Err(Error::ConeViolation(format!(
                "support radius {support} + t_final {} exceeds r_max {}",
                config.t_final,
                grid.r_max()
            )));
        }
    }
    let raw_steps = ((config.t_final / dt) - 1e-9).ceil().max(1.0) as usize;
    let steps = raw_steps.div_ceil(config.record_stride) * config.record_stride;
    evolve_steps(initial, dt, steps, config)
}

/// Core loop with an explicit step count (shared by [`evolve`] and the
/// convergence study, which must compare different resolutions at exactly
/// the same physical time).
pub(crate) fn evolve_steps(
    initial: &FieldState,
    dt: f64,
    steps: usize,
    config: &SolveConfig,
) -> Result<Trajectory> {
    let grid = initial.grid;
    let spec = initial.spec;
    let n = grid.n();
    let stride = config.record_stride;
    let t0 = initial.t;
    let threshold = config.overflow_threshold;

    let mut states = Vec::with_capacity(steps / stride + 1);
    states.push(FieldState {
        overflowed: false,
        ..initial.clone()
    });

    let done = |states: Vec<FieldState>, status: RunStatus| {
        Ok(Trajectory {
            states,
            dt,
            record_stride: stride,
            status,
            grid,
            spec,
        })
    };

    // Taylor bootstrap for v¹.
    let a0 = acceleration(&initial.v, grid, spec);
    let mut prev = initial.v.clone();
    prev[0] = 0.0;
    prev[n] = 0.0;
    let mut cur = vec![0.0; grid.len()];
    for j in 1..n {
        cur[j] = prev[j] + dt * initial.w[j] + 0.5 * dt * dt * a0[j];
    }
    if check_overflow(&cur, t0 + dt, threshold).is_err() {
        return done(states, RunStatus::Overflowed);
    }

    for m in 1..=steps {
        // cur = v^m, prev = v^{m-1}; advance to v^{m+1}.
        let a = acceleration(&cur, grid, spec);
        let mut next = vec![0.0; grid.len()];
        for j in 1..n {
            next[j] = 2.0 * cur[j] - prev[j] + dt * dt * a[j];
        }
        if check_overflow(&next, t0 + (m + 1) as f64 * dt, threshold).is_err() {
            return done(states, RunStatus::Overflowed);
        }
        if m % stride == 0 {
            let inv_2dt = 1.0 / (2.0 * dt);
            let w: Vec<f64> = next
                .iter()
                .zip(prev.iter())
                .map(|(&vn, &vp)| (vn - vp) * inv_2dt)
                .collect();
            states.push(FieldState {
                t: t0 + m as f64 * dt,
                v: cur.clone(),
                w,
                grid,
                spec,
                overflowed: false,
            });
        }
        prev = std::mem::replace(&mut cur, next);
    }
    done(states, RunStatus::Completed)
}

/// Per-level entry of a refinement study.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceEntry {
    pub n: usize,
    /// Error against the reference, or difference to the previous level.
    pub metric: f64,
    /// Observed order from the ratio to the previous entry.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvergenceVerdict {
    /// All differences were at machine-noise level (e.g. zero data).
    Exact,
    Order(f64),
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    /// The common physical time at which all levels were compared.
    pub comparison_time: f64,
    pub entries: Vec<ConvergenceEntry>,
    pub verdict: ConvergenceVerdict,
}

impl ConvergenceReport {
    pub fn observed_order(&self) -> Option<f64> {
        match self.verdict {
            ConvergenceVerdict::Exact => None,
            ConvergenceVerdict::Order(q) => Some(q),
        }
    }
}

/// Refinement study: run the same problem at `n, 2n, 4n, …` and estimate
/// the observed order from Richardson ratios of final-time differences.
///
/// With a closed-form reference the order comes from error ratios and two
/// levels suffice; without one, self-convergence needs at least three.
/// The comparison time is the nearest realizable multiple of the base time
/// step, identical across levels so that time offsets cannot pollute the
/// ratios.
pub fn convergence_order(
    data: &InitialData,
    spec: NonlinearitySpec,
    r_max: f64,
    base_n: usize,
    levels: usize,
    t_final: f64,
    cfl: f64,
    reference: Option<&(dyn Fn(f64, f64) -> f64 + Sync)>,
) -> Result<ConvergenceReport> {
    let min_levels = if reference.is_some() { 2 } else { 3 };
    if levels < min_levels {
        return Err(Error::config(
            "levels",
            format!("need at least {min_levels} refinement levels"),
        ));
    }
    let base_grid = RadialGrid::new(r_max, base_n)?;
    let dt0 = cfl * base_grid.dr();
    let base_steps = (t_final / dt0).round().max(1.0) as usize;
    let comparison_time = base_steps as f64 * dt0;

    let mut finals: Vec<(usize, Vec<f64>)> = Vec::with_capacity(levels);
    for level in 0..levels {
        let n = base_n << level;
        let grid = RadialGrid::new(r_max, n)?;
        let state = crate::field::sample_initial(grid, spec, data)?;
        let config = SolveConfig {
            t_final: comparison_time,
            cfl,
            record_stride: 1,
            overflow_threshold: DEFAULT_OVERFLOW_THRESHOLD,
            enforce_cone: !data.dirichlet_exact,
        };
        if config.enforce_cone {
            let support = measured_support_radius(&state);
            if support + comparison_time > r_max + 1e-12 {
                return Err(Error::ConeViolation(format!(
                    "support radius {support} + t_final {comparison_time} exceeds r_max {r_max}"
                )));
            }
        }
        let steps = base_steps << level;
        let traj = evolve_steps(&state, cfl * grid.dr(), steps, &config)?;
        if traj.status != RunStatus::Completed {
            return Err(Error::Overflow {
                t: traj.last().t,
                threshold: DEFAULT_OVERFLOW_THRESHOLD,
            });
        }
        finals.push((n, traj.last().v.clone()));
    }

    // Weighted L2 over the base grid's nodes (shared by every level).
    let l2 = |values: &dyn Fn(usize) -> f64| -> f64 {
        let dr = base_grid.dr();
        let mut sum = 0.0;
        for j in 0..=base_n {
            let x = values(j);
            sum += base_grid.weight(j) / dr * x * x;
        }
        (sum * dr).sqrt()
    };

    let mut metrics: Vec<(usize, f64)> = Vec::new();
    match reference {
        Some(exact) => {
            for (level, (n, v)) in finals.iter().enumerate() {
                let sub = 1usize << level;
                let err = l2(&|j| v[j * sub] - exact(comparison_time, base_grid.r(j)));
                metrics.push((*n, err));
            }
        }
        None => {
            for (level, pair) in finals.windows(2).enumerate() {
                let (n_coarse, ref v_coarse) = pair[0];
                let (_, ref v_fine) = pair[1];
                let sub_coarse = 1usize << level;
                let diff = l2(&|j| v_fine[j * sub_coarse * 2] - v_coarse[j * sub_coarse]);
                metrics.push((n_coarse, diff));
            }
        }
    }

    let scale = finals
        .iter()
        .flat_map(|(_, v)| v.iter())
        .fold(0.0f64, |m, &x| m.max(x.abs()));
    if metrics.iter().all(|&(_, m)| m <= 1e-13 * scale.max(1.0)) {
        let entries = metrics
            .iter()
            .map(|&(n, metric)| ConvergenceEntry {
                n,
                metric,
                order: None,
            })
            .collect();
        return Ok(ConvergenceReport {
            comparison_time,
            entries,
            verdict: ConvergenceVerdict::Exact,
        });
    }

    let mut entries: Vec<ConvergenceEntry> = Vec::new();
    let mut last_order = None;
    for (i, &(n, metric)) in metrics.iter().enumerate() {
        let order = if i > 0 {
            let prev = metrics[i - 1].1;
            if metric > 0.0 && prev > 0.0 {
                Some((prev / metric).log2())
            } else {
                None
            }
        } else {
            None
        };
        if order.is_some() {
            last_order = order;
        }
        entries.push(ConvergenceEntry { n, metric, order });
    }
    let verdict = match last_order {
        Some(q) => ConvergenceVerdict::Order(q),
        None => ConvergenceVerdict::Exact,
    };
    Ok(ConvergenceReport {
        comparison_time,
        entries,
        verdict,
    })
}
