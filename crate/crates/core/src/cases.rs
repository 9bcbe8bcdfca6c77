//! Experiment catalog and reference solutions.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{ModelKind, StateVector};
use crate::scalar::Scalar;
use crate::scheme::{BoundaryKind, GridSolution, SchemeConfig, SchemeKind, DEFAULT_CFL};

pub const PRESSURELESS_RIEMANN: &str = "pressureless-riemann";
pub const PRESSURELESS_POSITIVITY: &str = "pressureless-positivity";
pub const MODBURGERS_SMOOTH: &str = "modburgers-smooth";
pub const MODBURGERS_SONIC: &str = "modburgers-sonic";
pub const FURTHER_MODBURGERS_SMOOTH: &str = "further-modburgers-smooth";

pub const CASE_NAMES: [&str; 5] = [
    PRESSURELESS_RIEMANN,
    PRESSURELESS_POSITIVITY,
    MODBURGERS_SMOOTH,
    MODBURGERS_SONIC,
    FURTHER_MODBURGERS_SMOOTH,
];

/// The smooth cases steepen into a shock near this time.
pub const SHOCK_TIME: f64 = 3.0 / (2.0 * PI);

/// Latest time at which [`burgers_oracle`] answers.
pub const ORACLE_MAX_TIME: f64 = 0.3;

/// Piecewise-constant data: `left` for `x < x0`, `right` otherwise. States
/// are given in the model's natural variables: `(rho, u)` for the
/// pressureless system, `(u, v)` for modified Burgers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiemannData {
    pub x0: f64,
    pub left: [f64; 2],
    pub right: [f64; 2],
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialData {
    Riemann(RiemannData),
    /// `u = 1/2 + sin(pi x)` and its successive x-derivatives, one per component.
    SineDerivatives,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseSpec {
    pub name: &'static str,
    pub model: ModelKind,
    pub domain: (f64, f64),
    pub initial: InitialData,
    pub boundary: BoundaryKind,
    pub t_final: f64,
    /// Recommended Harten entropy-fix width for FDS-J.
    pub epsilon: f64,
}

impl CaseSpec {
    /// Initial state at position `x`.
    pub fn initial_state<T: Scalar>(&self, x: T) -> StateVector<T> {
        match self.initial {
            InitialData::Riemann(r) => {
                let [a, b] = if x.as_f64() < r.x0 { r.left } else { r.right };
                let (a, b) = (T::lit(a), T::lit(b));
                match self.model {
                    ModelKind::Pressureless => StateVector::from_slice(&[a, a * b]),
                    _ => StateVector::from_slice(&[a, b]),
                }
            }
            InitialData::SineDerivatives => {
                let pi = T::PI();
                let (s, c) = (pi * x).sin_cos();
                let all = [
                    T::lit(0.5) + s,
                    pi * c,
                    -pi * pi * s,
                    -pi * pi * pi * c,
                ];
                StateVector::from_slice(&all[..self.model.dim()])
            }
        }
    }

    /// Grid of `n_cells` cells sampled at the cell centres.
    pub fn initial_grid<T: Scalar>(&self, n_cells: usize) -> Result<GridSolution<T>> {
        GridSolution::from_fn(
            T::lit(self.domain.0),
            T::lit(self.domain.1),
            n_cells,
            self.boundary,
            |x| self.initial_state(x),
        )
    }

    /// Scheme settings for this case. The entropy fix applies to FDS-J only.
    pub fn scheme_config<T: Scalar>(&self, scheme: SchemeKind) -> SchemeConfig<T> {
        let epsilon = match scheme {
            SchemeKind::Fdsj => self.epsilon,
            SchemeKind::Llf => 0.0,
        };
        SchemeConfig {
            scheme,
            entropy_fix_epsilon: T::lit(epsilon),
            cfl: T::lit(DEFAULT_CFL),
        }
    }

    /// Replaces Riemann states, recomputing the default entropy-fix width.
    pub fn with_riemann(mut self, data: RiemannData) -> Result<Self> {
        if !matches!(self.initial, InitialData::Riemann(_)) {
            return Err(Error::InvalidInput(format!("{} has smooth initial data", self.name)));
        }
        if self.model == ModelKind::Pressureless && (data.left[0] < 0.0 || data.right[0] < 0.0) {
            return Err(Error::InvalidInput("densities must be nonnegative".into()));
        }
        self.initial = InitialData::Riemann(data);
        if self.epsilon > 0.0 {
            self.epsilon = default_epsilon(&data, self.model);
        }
        Ok(self)
    }
}

fn riemann_speed(data: &RiemannData, model: ModelKind) -> f64 {
    let speed = |s: [f64; 2]| match model {
        ModelKind::Pressureless => s[1].abs(),
        _ => s[0].abs(),
    };
    speed(data.left).max(speed(data.right))
}

/// Entropy-fix width for the cases that need one, in units of the largest
/// initial wave speed `a`.
///
/// Pressureless data with a vacuum-forming jump need `eps >= 2a`: at the
/// centre interface the mass flux vanishes, so after one step the cell next
/// to it keeps its velocity within the initial bounds only when
/// `harten_fix(0, eps) = eps / 2 >= a`. The sonic Burgers case needs only a
/// small fix, `eps = a / 10`.
fn default_epsilon(data: &RiemannData, model: ModelKind) -> f64 {
    let factor = match model {
        ModelKind::Pressureless => 2.0,
        _ => 0.1,
    };
    factor * riemann_speed(data, model)
}

/// The five named experiments.
pub fn catalog() -> Vec<CaseSpec> {
    let positivity = RiemannData {
        x0: 0.0,
        left: [1.0, -0.5],
        right: [1.0, 0.5],
    };
    let sonic = RiemannData {
        x0: 1.0,
        left: [-2.0, 1.0],
        right: [4.0, -2.0],
    };
    vec![
        CaseSpec {
            name: PRESSURELESS_RIEMANN,
            model: ModelKind::Pressureless,
            domain: (-0.5, 0.5),
            initial: InitialData::Riemann(RiemannData {
                x0: 0.0,
                left: [1.0, 1.5],
                right: [0.2, 0.0],
            }),
            boundary: BoundaryKind::Transmissive,
            t_final: 0.2,
            epsilon: 0.0,
        },
        CaseSpec {
            name: PRESSURELESS_POSITIVITY,
            model: ModelKind::Pressureless,
            domain: (-0.5, 0.5),
            initial: InitialData::Riemann(positivity),
            boundary: BoundaryKind::Transmissive,
            t_final: 0.1,
            epsilon: default_epsilon(&positivity, ModelKind::Pressureless),
        },
        CaseSpec {
            name: MODBURGERS_SMOOTH,
            model: ModelKind::ModifiedBurgers,
            domain: (0.0, 2.0),
            initial: InitialData::SineDerivatives,
            boundary: BoundaryKind::Periodic,
            t_final: SHOCK_TIME,
            epsilon: 0.0,
        },
        CaseSpec {
            name: MODBURGERS_SONIC,
            model: ModelKind::ModifiedBurgers,
            domain: (0.0, 2.0),
            initial: InitialData::Riemann(sonic),
            boundary: BoundaryKind::Transmissive,
            t_final: 0.125,
            epsilon: default_epsilon(&sonic, ModelKind::ModifiedBurgers),
        },
        CaseSpec {
            name: FURTHER_MODBURGERS_SMOOTH,
            model: ModelKind::FurtherModifiedBurgers,
            domain: (0.0, 2.0),
            initial: InitialData::SineDerivatives,
            boundary: BoundaryKind::Periodic,
            t_final: SHOCK_TIME,
            epsilon: 0.0,
        },
    ]
}

pub fn find_case(name: &str) -> Result<CaseSpec> {
    catalog()
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| Error::UnknownCase(name.to_string()))
}

/// Characteristic foot `xi = x - u t` and value `u` of the pre-shock
/// solution of `u_t + (u^2/2)_x = 0`, `u(x, 0) = 1/2 + sin(pi x)`.
fn burgers_characteristic(x: f64, t: f64, tol: f64) -> Result<(f64, f64)> {
    if !(0.0..=ORACLE_MAX_TIME).contains(&t) {
        return Err(Error::Oracle(format!(
            "t = {t} outside the pre-shock window [0, {ORACLE_MAX_TIME}]"
        )));
    }
    if !(tol > 0.0) || !x.is_finite() {
        return Err(Error::Oracle("tolerance must be positive and x finite".into()));
    }
    let residual = |u: f64| u - 0.5 - (PI * (x - u * t)).sin();
    // residual is increasing in u with slope in [1 - pi t, 1 + pi t], and
    // changes sign on [-0.5, 1.5].
    let (mut lo, mut hi) = (-0.5, 1.5);
    let mut u = 0.5 + (PI * x).sin();
    for _ in 0..200 {
        let r = residual(u);
        if r.abs() <= tol {
            return Ok((x - u * t, u));
        }
        if r > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        let slope = 1.0 + PI * t * (PI * (x - u * t)).cos();
        let newton = u - r / slope;
        u = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::Oracle(format!(
        "no convergence at x = {x}, t = {t} after 200 iterations"
    )))
}

/// Exact pre-shock Burgers solution with `u(x, 0) = 1/2 + sin(pi x)`:
/// solves `u = 1/2 + sin(pi (x - u t))` to `|residual| <= tol`.
/// Valid for `0 <= t <= 0.3`.
pub fn burgers_oracle(x: f64, t: f64, tol: f64) -> Result<f64> {
    burgers_characteristic(x, t, tol).map(|(_, u)| u)
}

/// `u_x` of [`burgers_oracle`], i.e. the exact `v` of the modified system.
pub fn burgers_oracle_slope(x: f64, t: f64, tol: f64) -> Result<f64> {
    let (xi, _) = burgers_characteristic(x, t, tol)?;
    let c = PI * (PI * xi).cos();
    Ok(c / (1.0 + t * c))
}

/// Speed of the delta shock for pressureless Riemann data `(rho, u)` with
/// `u_L >= u_R`: the square-root-density weighted mean velocity.
pub fn delta_shock_reference(left: (f64, f64), right: (f64, f64)) -> Result<f64> {
    let ((rl, ul), (rr, ur)) = (left, right);
    if ul < ur {
        return Err(Error::NotCompressive {
            u_left: ul,
            u_right: ur,
        });
    }
    if !(rl > 0.0 && rr > 0.0) {
        return Err(Error::Vacuum {
            density: rl.min(rr),
        });
    }
    if ul == ur {
        return Ok(ul);
    }
    let (sl, sr) = (rl.sqrt(), rr.sqrt());
    Ok((sl * ul + sr * ur) / (sl + sr))
}

/// Centroid of `component` weighted by its values, over the cells where it
/// exceeds `fraction` of its maximum.
pub fn spike_centroid<T: Scalar>(sol: &GridSolution<T>, component: usize, fraction: f64) -> Result<f64> {
    let vals: Vec<f64> = sol.cells.iter().map(|c| c[component].as_f64()).collect();
    let peak = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(peak > 0.0) {
        return Err(Error::Metric("no positive spike".into()));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (j, &v) in vals.iter().enumerate() {
        if v > fraction * peak {
            num += sol.cell_center(j).as_f64() * v;
            den += v;
        }
    }
    Ok(num / den)
}

/// Index `j` maximising `|c[j + 1] - c[j]|`.
fn steepest_jump(vals: &[f64]) -> Result<usize> {
    vals.windows(2)
        .enumerate()
        .max_by(|a, b| (a.1[1] - a.1[0]).abs().total_cmp(&(b.1[1] - b.1[0]).abs()))
        .map(|(j, _)| j)
        .ok_or_else(|| Error::Metric("need at least two cells".into()))
}

/// Number of cells inside the steepest jump of `component` whose value lies
/// strictly between `lo + d` and `hi - d`, `d = 0.05 (hi - lo)`. The count
/// runs over the contiguous intermediate cells around the steepest
/// neighbouring difference; both ends must reach a value outside the band.
pub fn shock_width<T: Scalar>(sol: &GridSolution<T>, component: usize, lo: f64, hi: f64) -> Result<usize> {
    if !(lo < hi) {
        return Err(Error::Metric(format!("bracket [{lo}, {hi}] is empty")));
    }
    let d = 0.05 * (hi - lo);
    let inside = |v: f64| v > lo + d && v < hi - d;
    let vals: Vec<f64> = sol.cells.iter().map(|c| c[component].as_f64()).collect();
    let j = steepest_jump(&vals)?;

    let mut count = 0;
    let mut left = j as isize;
    while left >= 0 && inside(vals[left as usize]) {
        count += 1;
        left -= 1;
    }
    let mut right = j + 1;
    while right < vals.len() && inside(vals[right]) {
        count += 1;
        right += 1;
    }
    if left < 0 || right == vals.len() {
        return Err(Error::Metric(format!(
            "jump near cell {j} is not bracketed by [{lo}, {hi}]"
        )));
    }
    Ok(count)
}

/// Position where `component` crosses `(lo + hi)/2` nearest the steepest
/// jump, by linear interpolation between cell centres.
pub fn jump_midpoint<T: Scalar>(sol: &GridSolution<T>, component: usize, lo: f64, hi: f64) -> Result<f64> {
    let mid = 0.5 * (lo + hi);
    let vals: Vec<f64> = sol.cells.iter().map(|c| c[component].as_f64()).collect();
    let j = steepest_jump(&vals)?;
    let crosses = |k: usize| (vals[k] - mid) * (vals[k + 1] - mid) <= 0.0;
    let k = (0..vals.len() - 1)
        .filter(|&k| crosses(k))
        .min_by_key(|&k| k.abs_diff(j))
        .ok_or_else(|| Error::Metric(format!("no crossing of {mid}")))?;
    let (a, b) = (vals[k], vals[k + 1]);
    let frac = if a == b { 0.5 } else { (mid - a) / (b - a) };
    let (xa, xb) = (sol.cell_center(k).as_f64(), sol.cell_center(k + 1).as_f64());
    Ok(xa + frac * (xb - xa))
}
