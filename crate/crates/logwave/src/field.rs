//! Radial mesh, field state in the reduced variable `v = r·u`, initial-data
//! profiles, and reconstruction of `u` and its radial derivatives.
//!
//! Spherically symmetric solutions are evolved through `v(t,r) = r·u(t,r)`,
//! which turns the radial Laplacian into a flat second derivative:
//! `Δu = (∂ᵣᵣv)/r`. Smoothness of `u` at the origin forces the exact
//! boundary condition `v(t,0) = 0` (odd extension of `v`), so no stencil
//! ever divides by `r = 0`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::nonlinearity::NonlinearitySpec;
use crate::Result;

/// Samples beyond the declared support radius must be below this to count
/// as compactly supported.
const SUPPORT_TOL: f64 = 1e-14;

/// Uniform mesh on `[0, r_max]` with nodes `r_j = j·dr`, `j = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    r_max: f64,
    n: usize,
}

impl RadialGrid {
    /// A grid needs at least this many cells to resolve anything.
    pub const MIN_CELLS: usize = 16;

    pub fn new(r_max: f64, n: usize) -> Result<Self> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::config("grid.r_max", "must be positive and finite"));
        }
        if n < Self::MIN_CELLS {
            return Err(Error::config(
                "grid.n",
                format!("must be at least {}", Self::MIN_CELLS),
            ));
        }
        Ok(RadialGrid { r_max, n })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Number of cells; there are `n + 1` nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dr(&self) -> f64 {
        self.r_max / self.n as f64
    }

    /// Node coordinate `r_j = j·dr`; `r(0) = 0` and `r(n) = r_max` exactly.
    pub fn r(&self, j: usize) -> f64 {
        if j == self.n {
            self.r_max
        } else {
            j as f64 * self.dr()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |j| self.r(j))
    }

    /// Trapezoid weight for node `j` (dr at interior nodes, dr/2 at ends).
    pub fn weight(&self, j: usize) -> f64 {
        if j == 0 || j == self.n {
            0.5 * self.dr()
        } else {
            self.dr()
        }
    }
}

/// The evolved pair at one instant: `v ≈ r·u` and `w ≈ ∂ₜ(r·u)`.
#[derive(Debug, Clone)]
pub struct FieldState {
    pub t: f64,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub grid: RadialGrid,
    pub spec: NonlinearitySpec,
    /// Set when the solver detected that `max|v|` crossed the overflow
    /// threshold; diagnostics refuse such states.
    pub overflowed: bool,
}

impl FieldState {
    /// All-zero state on the given grid.
    pub fn zero(grid: RadialGrid, spec: NonlinearitySpec) -> Self {
        FieldState {
            t: 0.0,
            v: vec![0.0; grid.len()],
            w: vec![0.0; grid.len()],
            grid,
            spec,
            overflowed: false,
        }
    }

    pub fn max_abs_v(&self) -> f64 {
        self.v.iter().fold(0.0, |m, &x| m.max(x.abs()))
    }
}

/// Scalar radial profile used for initial position or velocity.
pub type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Initial position and velocity for a run.
///
/// `dirichlet_exact` marks data that satisfies the outer Dirichlet
/// condition exactly (e.g. a standing wave); such data is exempt from the
/// compact-support and light-cone checks.
#[derive(Clone)]
pub struct InitialData {
    pub position: ProfileFn,
    pub velocity: ProfileFn,
    pub support_radius: f64,
    pub dirichlet_exact: bool,
}

impl InitialData {
    pub fn new(
        position: impl Fn(f64) -> f64 + Send + Sync + 'static,
        velocity: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support_radius: f64,
    ) -> Self {
        InitialData {
            position: Arc::new(position),
            velocity: Arc::new(velocity),
            support_radius,
            dirichlet_exact: false,
        }
    }

    pub fn zero() -> Self {
        InitialData::new(|_| 0.0, |_| 0.0, 0.0)
    }
}

impl std::fmt::Debug for InitialData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InitialData")
            .field("support_radius", &self.support_radius)
            .field("dirichlet_exact", &self.dirichlet_exact)
            .finish()
    }
}

/// Named initial-data profiles selectable from the run configuration.
///
/// All bump profiles are even in `r` (smooth at the origin) and vanish
/// identically beyond their support radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum Profile {
    /// `u0 = u1 = 0`.
    Zero,
    /// `amplitude·exp(−((r−center)/width)²)`, symmetrized about the origin
    /// when `center ≠ 0` and multiplied by a smooth cutoff that vanishes at
    /// `support_radius`.
    GaussianBump {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
        support_radius: f64,
        /// Same shape applied to the initial velocity, scaled by this factor.
        #[serde(default)]
        velocity_amplitude: f64,
    },
    /// `amplitude·(1 − ((r−center)/width)²)⁴` on `|r−center| < width`.
    PolynomialBump {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
        #[serde(default)]
        velocity_amplitude: f64,
    },
    /// Eigenmode of the linear reduced operator:
    /// `u0 = amplitude·sin(k·π·r/r_max)/(k·π·r/r_max)`, `u1 = 0`.
    /// Satisfies the outer Dirichlet condition exactly.
    StandingWave { amplitude: f64, mode: u32 },
    /// `(r, u0, u1)` rows from a CSV file, linearly interpolated.
    Table { path: String },
}

impl Profile {
    /// Instantiate the profile as sampled initial data. `r_max` is needed
    /// by the standing wave; `Table` reads its file here.
    pub fn instantiate(&self, r_max: f64) -> Result<InitialData> {
        match self {
            Profile::Zero => Ok(InitialData::zero()),
            Profile::GaussianBump {
                amplitude,
                width,
                center,
                support_radius,
                velocity_amplitude,
            } => {
                if !(*width > 0.0) {
                    return Err(Error::config("data.width", "must be positive"));
                }
                if !(*support_radius > 0.0) {
                    return Err(Error::config("data.support_radius", "must be positive"));
                }
                let (a, w, c, rs) = (*amplitude, *width, *center, *support_radius);
                let shape = move |r: f64| a * symmetric_gaussian(r, c, w) * cutoff(r / rs);
                let va = *velocity_amplitude;
                let vshape = move |r: f64| va * symmetric_gaussian(r, c, w) * cutoff(r / rs);
                Ok(InitialData::new(shape, vshape, rs))
            }
            Profile::PolynomialBump {
                amplitude,
                width,
                center,
                velocity_amplitude,
            } => {
                if !(*width > 0.0) {
                    return Err(Error::config("data.width", "must be positive"));
                }
                if *center < 0.0 {
                    return Err(Error::config("data.center", "must be nonnegative"));
                }
                let (a, w, c) = (*amplitude, *width, *center);
                let shape = move |r: f64| a * poly_bump(r, c, w);
                let va = *velocity_amplitude;
                let vshape = move |r: f64| va * poly_bump(r, c, w);
                Ok(InitialData::new(shape, vshape, c + w))
            }
            Profile::StandingWave { amplitude, mode } => {
                if *mode == 0 {
                    return Err(Error::config("data.mode", "must be at least 1"));
                }
                let k = f64::from(*mode) * std::f64::consts::PI / r_max;
                let a = *amplitude;
                let mut data = InitialData::new(
                    move |r: f64| {
                        if r == 0.0 {
                            a
                        } else {
                            a * (k * r).sin() / (k * r)
                        }
                    },
                    |_| 0.0,
                    r_max,
                );
                data.dirichlet_exact = true;
                Ok(data)
            }
            Profile::Table { path } => table_profile(path),
        }
    }
}

/// Even-in-`r` Gaussian: mirror image pair at `±center` so the profile has
/// vanishing slope at the origin.
fn symmetric_gaussian(r: f64, center: f64, width: f64) -> f64 {
    let a = ((r - center) / width).powi(2);
    if center == 0.0 {
        (-a).exp()
    } else {
        let b = ((r + center) / width).powi(2);
        (-a).exp() + (-b).exp()
    }
}

/// Smooth compactly supported cutoff on `[0, 1)` with `cutoff(0) = 1`.
fn cutoff(s: f64) -> f64 {
    let s2 = s * s;
    if s2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s2)).exp()
    }
}

/// `(1 − ((r−c)/w)²)⁴` on `|r − c| < w`, zero elsewhere; C³ at the edge.
fn poly_bump(r: f64, center: f64, width: f64) -> f64 {
    let s = (r - center) / width;
    let q = 1.0 - s * s;
    if q <= 0.0 {
        0.0
    } else {
        q.powi(4)
    }
}

/// Load `(r, u0, u1)` rows and wrap them in linear interpolation.
fn table_profile(path: &str) -> Result<InitialData> {
    let text = std::fs::read_to_string(path)?;
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("r,") {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(Error::Format(format!(
                "{path}:{}: expected 3 columns (r, u0, u1), got {}",
                lineno + 1,
                cols.len()
            )));
        }
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| {
                Error::Format(format!("{path}:{}: bad {what} value {s:?}", lineno + 1))
            })
        };
        rows.push((
            parse(cols[0], "r")?,
            parse(cols[1], "u0")?,
            parse(cols[2], "u1")?,
        ));
    }
    if rows.len() < 2 {
        return Err(Error::Format(format!(
            "{path}: need at least two data rows"
        )));
    }
    if !rows.windows(2).all(|w| w[0].0 < w[1].0) {
        return Err(Error::Format(format!(
            "{path}: r column must be strictly increasing"
        )));
    }
    let support_radius = rows.last().unwrap().0;
    let rows = Arc::new(rows);
    let rows_u0 = Arc::clone(&rows);
    let rows_u1 = Arc::clone(&rows);
    Ok(InitialData::new(
        move |r| interp(&rows_u0, r, 1),
        move |r| interp(&rows_u1, r, 2),
        support_radius,
    ))
}

fn interp(rows: &[(f64, f64, f64)], r: f64, col: usize) -> f64 {
    let value = |row: &(f64, f64, f64)| if col == 1 { row.1 } else { row.2 };
    if r <= rows[0].0 {
        return value(&rows[0]);
    }
    if r >= rows[rows.len() - 1].0 {
        return 0.0;
    }
    let idx = rows.partition_point(|row| row.0 <= r);
    let (lo, hi) = (&rows[idx - 1], &rows[idx]);
    let s = (r - lo.0) / (hi.0 - lo.0);
    value(lo) + s * (value(hi) - value(lo))
}

/// Sample initial data onto the grid: `v_j = r_j·u0(r_j)`, `w_j = r_j·u1(r_j)`.
///
/// Rejects data that is nonzero beyond its support radius or whose support
/// does not fit the grid; data spanning fewer than 8 cells is refused as
/// under-resolved.
pub fn sample_initial(
    grid: RadialGrid,
    spec: NonlinearitySpec,
    data: &InitialData,
) -> Result<FieldState> {
    let mut state = FieldState::zero(grid, spec);
    let mut nonzero = false;
    for j in 0..grid.len() {
        let r = grid.r(j);
        let u0 = (data.position)(r);
        let u1 = (data.velocity)(r);
        if !u0.is_finite() || !u1.is_finite() {
            return Err(Error::UnsupportedData(format!(
                "data is not finite at r = {r}"
            )));
        }
        nonzero |= u0.abs() > SUPPORT_TOL || u1.abs() > SUPPORT_TOL;
        state.v[j] = r * u0;
        state.w[j] = r * u1;
    }
    state.v[0] = 0.0;
    state.w[0] = 0.0;
    if data.dirichlet_exact || !nonzero {
        return Ok(state);
    }
    if data.support_radius >= grid.r_max() {
        return Err(Error::UnsupportedData(format!(
            "support radius {} does not fit inside r_max = {}",
            data.support_radius,
            grid.r_max()
        )));
    }
    for j in 0..grid.len() {
        let r = grid.r(j);
        if r >= data.support_radius
            && ((data.position)(r).abs() > SUPPORT_TOL || (data.velocity)(r).abs() > SUPPORT_TOL)
        {
            return Err(Error::UnsupportedData(format!(
                "data exceeds {SUPPORT_TOL:e} at r = {r} >= support radius {}",
                data.support_radius
            )));
        }
    }
    if data.support_radius < 8.0 * grid.dr() {
        return Err(Error::Resolution(format!(
            "support radius {} spans fewer than 8 cells (dr = {})",
            data.support_radius,
            grid.dr()
        )));
    }
    Ok(state)
}

/// Recover `u` from a nodal array of `v = r·u`.
///
/// `u_j = v_j/r_j` for `j ≥ 1`; at the origin the smooth limit is taken as
/// the one-sided derivative `(v_1 − v_0)/dr` (since `v(t,0) = 0` and
/// `u(t,0) = ∂ᵣv(t,0)`).
pub fn reconstruct_radial(values: &[f64], grid: RadialGrid) -> Vec<f64> {
    let mut u = vec![0.0; values.len()];
    u[0] = (values[1] - values[0]) / grid.dr();
    for j in 1..values.len() {
        u[j] = values[j] / grid.r(j);
    }
    u
}

/// [`reconstruct_radial`] applied to the position field `v`.
pub fn reconstruct_u(state: &FieldState) -> Vec<f64> {
    reconstruct_radial(&state.v, state.grid)
}

/// First and second radial derivatives of a nodal array by second-order
/// finite differences.
///
/// Interior nodes use centered stencils. The origin uses the even
/// extension `u(−r) = u(r)`, so `u_r[0] = 0` exactly and
/// `u_rr[0] = 2(u_1 − u_0)/dr²`. The outer node uses one-sided
/// second-order stencils.
pub fn derive_radial(u: &[f64], grid: RadialGrid) -> (Vec<f64>, Vec<f64>) {
    let n = grid.n();
    let dr = grid.dr();
    let mut ur = vec![0.0; u.len()];
    let mut urr = vec![0.0; u.len()];
    ur[0] = 0.0;
    urr[0] = 2.0 * (u[1] - u[0]) / (dr * dr);
    for j in 1..n {
        ur[j] = (u[j + 1] - u[j - 1]) / (2.0 * dr);
        urr[j] = (u[j + 1] - 2.0 * u[j] + u[j - 1]) / (dr * dr);
    }
    ur[n] = (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * dr);
    urr[n] = (2.0 * u[n] - 5.0 * u[n - 1] + 4.0 * u[n - 2] - u[n - 3]) / (dr * dr);
    (ur, urr)
}

/// Radial derivatives of the reconstructed `u` of a state.
pub fn radial_derivatives(state: &FieldState) -> (Vec<f64>, Vec<f64>) {
    derive_radial(&reconstruct_u(state), state.grid)
}
