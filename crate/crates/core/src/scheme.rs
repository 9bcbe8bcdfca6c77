//! Interface fluxes and the explicit finite-volume update.
//!
//! With every wave speed equal to the averaged eigenvalue `u_bar`, the flux
//! difference splitting over the Jordan basis collapses to
//!
//! ```text
//! F_I = (F_L + F_R) / 2 - |u_bar| (U_R - U_L) / 2
//! ```
//!
//! so the generalized eigenvectors never enter the update. They are still
//! available through [`wave_strengths`] for inspection.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::jordan::{block_size, build_chain, DEFAULT_RANK_TOL};
use crate::model::{StateVector, SystemModel};
use crate::scalar::Scalar;

/// Default Courant number.
pub const DEFAULT_CFL: f64 = 0.45;

/// Lower bound on the wave speed used for the time-step restriction.
pub const SPEED_FLOOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// Flux difference splitting over the Jordan chain.
    Fdsj,
    /// Local Lax-Friedrichs.
    Llf,
}

impl SchemeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeKind::Fdsj => "fdsj",
            SchemeKind::Llf => "llf",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fdsj" => Ok(SchemeKind::Fdsj),
            "llf" => Ok(SchemeKind::Llf),
            other => Err(Error::InvalidInput(format!(
                "unknown scheme `{other}` (expected fdsj or llf)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeConfig<T> {
    pub scheme: SchemeKind,
    /// Harten entropy-fix width; zero disables the fix.
    pub entropy_fix_epsilon: T,
    pub cfl: T,
}

impl<T: Scalar> SchemeConfig<T> {
    pub fn new(scheme: SchemeKind, entropy_fix_epsilon: T, cfl: T) -> Result<Self> {
        let cfg = Self {
            scheme,
            entropy_fix_epsilon,
            cfl,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > T::zero() && self.cfl <= T::one()) {
            return Err(Error::InvalidInput(format!("cfl {} outside (0, 1]", self.cfl)));
        }
        if !(self.entropy_fix_epsilon >= T::zero()) || !self.entropy_fix_epsilon.is_finite() {
            return Err(Error::InvalidInput(format!(
                "entropy fix epsilon {} must be finite and nonnegative",
                self.entropy_fix_epsilon
            )));
        }
        Ok(())
    }
}

impl<T: Scalar> Default for SchemeConfig<T> {
    fn default() -> Self {
        Self {
            scheme: SchemeKind::Fdsj,
            entropy_fix_epsilon: T::zero(),
            cfl: T::lit(DEFAULT_CFL),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    Periodic,
    /// Zero-gradient ghost cells.
    Transmissive,
}

/// Cell averages on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSolution<T> {
    pub x_min: T,
    pub x_max: T,
    pub time: T,
    pub cells: Vec<StateVector<T>>,
    pub boundary: BoundaryKind,
    /// Interface evaluations that hit the vacuum floor so far.
    pub vacuum_clamps: u64,
}

impl<T: Scalar> GridSolution<T> {
    pub fn new(x_min: T, x_max: T, cells: Vec<StateVector<T>>, boundary: BoundaryKind) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidInput("grid needs at least one cell".into()));
        }
        if !(x_max > x_min) {
            return Err(Error::InvalidInput(format!("empty domain [{x_min}, {x_max}]")));
        }
        if let Some(j) = cells.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("cell {j} is not finite")));
        }
        let dim = cells[0].len();
        if let Some(c) = cells.iter().find(|c| c.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: c.len(),
            });
        }
        Ok(Self {
            x_min,
            x_max,
            time: T::zero(),
            cells,
            boundary,
            vacuum_clamps: 0,
        })
    }

    /// Samples `init` at cell centres.
    pub fn from_fn(
        x_min: T,
        x_max: T,
        n_cells: usize,
        boundary: BoundaryKind,
        init: impl Fn(T) -> StateVector<T>,
    ) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::InvalidInput("grid needs at least one cell".into()));
        }
        let dx = (x_max - x_min) / T::lit(n_cells as f64);
        let cells = (0..n_cells)
            .map(|j| init(x_min + (T::lit(j as f64) + T::lit(0.5)) * dx))
            .collect();
        Self::new(x_min, x_max, cells, boundary)
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    #[inline]
    pub fn dx(&self) -> T {
        (self.x_max - self.x_min) / T::lit(self.cells.len() as f64)
    }

    pub fn cell_center(&self, j: usize) -> T {
        self.x_min + (T::lit(j as f64) + T::lit(0.5)) * self.dx()
    }

    /// `sum_j U_j dx` per component.
    pub fn integral(&self) -> StateVector<T> {
        let dim = self.cells[0].len();
        let mut acc = StateVector::zeros(dim);
        for c in &self.cells {
            acc = acc + *c;
        }
        acc.scale(self.dx())
    }

    fn ghosts(&self) -> (StateVector<T>, StateVector<T>) {
        let n = self.cells.len();
        match self.boundary {
            BoundaryKind::Periodic => (self.cells[n - 1], self.cells[0]),
            BoundaryKind::Transmissive => (self.cells[0], self.cells[n - 1]),
        }
    }
}

/// Harten's entropy fix: `|lambda|` outside `(-eps, eps)`, the parabola
/// `(lambda^2/eps + eps)/2` inside.
pub fn harten_fix<T: Scalar>(lambda: T, epsilon: T) -> T {
    let a = lambda.abs();
    if epsilon <= T::zero() || a >= epsilon {
        a
    } else {
        T::lit(0.5) * (lambda * lambda / epsilon + epsilon)
    }
}

fn central_minus<T: Scalar>(fl: StateVector<T>, fr: StateVector<T>, du: StateVector<T>, speed: T) -> StateVector<T> {
    let half = T::lit(0.5);
    (fl + fr).scale(half) - du.scale(half * speed)
}

/// FDS-J interface flux with dissipation `harten_fix(u_bar) * dU`, plus
/// whether the vacuum floor was used in the average.
pub fn fdsj_flux_clamped<T: Scalar, M: SystemModel<T> + ?Sized>(
    model: &M,
    ul: &StateVector<T>,
    ur: &StateVector<T>,
    epsilon: T,
) -> Result<(StateVector<T>, bool)> {
    if ul == ur {
        return Ok((model.flux(ul)?, false));
    }
    let (avg, clamped) = model.average_state_clamped(ul, ur);
    let speed = harten_fix(avg.lambda_bar, epsilon);
    Ok((central_minus(model.flux(ul)?, model.flux(ur)?, *ur - *ul, speed), clamped))
}

pub fn fdsj_flux<T: Scalar, M: SystemModel<T> + ?Sized>(
    model: &M,
    ul: &StateVector<T>,
    ur: &StateVector<T>,
    cfg: &SchemeConfig<T>,
) -> Result<StateVector<T>> {
    fdsj_flux_clamped(model, ul, ur, cfg.entropy_fix_epsilon).map(|(f, _)| f)
}

/// Local Lax-Friedrichs flux with speed `max(|lambda(U_L)|, |lambda(U_R)|)`.
pub fn llf_flux<T: Scalar, M: SystemModel<T> + ?Sized>(
    model: &M,
    ul: &StateVector<T>,
    ur: &StateVector<T>,
) -> Result<StateVector<T>> {
    if ul == ur {
        return model.flux(ul);
    }
    let speed = model.eigenvalue(ul).abs().max(model.eigenvalue(ur).abs());
    Ok(central_minus(model.flux(ul)?, model.flux(ur)?, *ur - *ul, speed))
}

/// Interface flux of the configured scheme.
pub fn interface_flux<T: Scalar, M: SystemModel<T> + ?Sized>(
    model: &M,
    ul: &StateVector<T>,
    ur: &StateVector<T>,
    cfg: &SchemeConfig<T>,
) -> Result<(StateVector<T>, bool)> {
    match cfg.scheme {
        SchemeKind::Fdsj => fdsj_flux_clamped(model, ul, ur, cfg.entropy_fix_epsilon),
        SchemeKind::Llf => llf_flux(model, ul, ur).map(|f| (f, false)),
    }
}

/// Fluxes at all `n + 1` interfaces, left boundary first, and the number of
/// vacuum clamps used.
pub fn interface_fluxes<T: Scalar, M: SystemModel<T> + ?Sized>(
    model: &M,
    sol: &GridSolution<T>,
    cfg: &SchemeConfig<T>,
) -> Result<(Vec<StateVector<T>>, u64)> {
    let n = sol.n_cells();
    let (left, right) = sol.ghosts();
    let mut fluxes = Vec::with_capacity(n + 1);
    let mut clamps = 0;
    for i in 0..=n {
        let ul = if i == 0 { &left } else { &sol.cells[i - 1] };
        let ur = if i == n { &right } else { &sol.cells[i] };
        let (f, clamped) = interface_flux(model, ul, ur, cfg)?;
        clamps += u64::from(clamped);
        fluxes.push(f);
    }
    Ok((fluxes, clamps))
}

/// `cfl * dx / max_j |lambda(U_j)|`, the speed floored at [`SPEED_FLOOR`].
pub fn max_stable_dt<T: Scalar, M: SystemModel<T> + ?Sized>(model: &M, sol: &GridSolution<T>, cfl: T) -> T {
    let speed = sol
        .cells
        .iter()
        .map(|c| model.eigenvalue(c).abs())
        .fold(T::lit(SPEED_FLOOR), T::max);
    cfl * sol.dx() / speed
}

/// One forward-Euler conservative update.
pub fn step<T: Scalar, M: SystemModel<T> + ?Sized>(
    model: &M,
    sol: &GridSolution<T>,
    cfg: &SchemeConfig<T>,
    dt: T,
) -> Result<GridSolution<T>> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::InvalidInput(format!("time step {dt} must be positive")));
    }
    let (fluxes, clamps) = interface_fluxes(model, sol, cfg)?;
    let ratio = dt / sol.dx();
    let time = sol.time + dt;
    let mut cells = Vec::with_capacity(sol.n_cells());
    for (j, u) in sol.cells.iter().enumerate() {
        let next = *u - (fluxes[j + 1] - fluxes[j]).scale(ratio);
        if !next.is_finite() {
            return Err(Error::BlowUp {
                cell: j,
                time: time.as_f64(),
            });
        }
        cells.push(next);
    }
    Ok(GridSolution {
        x_min: sol.x_min,
        x_max: sol.x_max,
        time,
        cells,
        boundary: sol.boundary,
        vacuum_clamps: sol.vacuum_clamps + clamps,
    })
}

/// Advances to exactly `t_final`, shortening the last step.
pub fn run<T: Scalar, M: SystemModel<T> + ?Sized>(
    model: &M,
    sol: &GridSolution<T>,
    cfg: &SchemeConfig<T>,
    t_final: T,
) -> Result<GridSolution<T>> {
    cfg.validate()?;
    if t_final < sol.time {
        return Err(Error::InvalidInput(format!(
            "final time {t_final} precedes current time {}",
            sol.time
        )));
    }
    let mut cur = sol.clone();
    while cur.time < t_final {
        let remaining = t_final - cur.time;
        let dt = max_stable_dt(model, &cur, cfg.cfl);
        if dt >= remaining {
            cur = step(model, &cur, cfg, remaining)?;
            cur.time = t_final;
        } else {
            cur = step(model, &cur, cfg, dt)?;
        }
    }
    Ok(cur)
}

/// Runs through each requested time in ascending order and returns the
/// solution at every one of them.
pub fn run_with_snapshots<T: Scalar, M: SystemModel<T> + ?Sized>(
    model: &M,
    sol: &GridSolution<T>,
    cfg: &SchemeConfig<T>,
    times: &[T],
) -> Result<Vec<GridSolution<T>>> {
    let mut sorted = times.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite snapshot times"));
    let mut out = Vec::with_capacity(sorted.len());
    let mut cur = sol.clone();
    for t in sorted {
        cur = run(model, &cur, cfg, t)?;
        out.push(cur.clone());
    }
    Ok(out)
}

/// Coefficients of `U_R - U_L` in the Jordan basis at the averaged state:
/// solves `P alpha = dU`. Diagnostic only.
pub fn wave_strengths<T: Scalar, M: SystemModel<T> + ?Sized>(
    model: &M,
    ul: &StateVector<T>,
    ur: &StateVector<T>,
) -> Result<Vec<T>> {
    let avg = model.average_state(ul, ur)?;
    let a = model.linearized_jacobian(ul, ur)?;
    let tol = T::lit(DEFAULT_RANK_TOL);
    let s = block_size(&a, avg.lambda_bar, tol)?;
    let chain = build_chain(&a, avg.lambda_bar, s, &[], tol)?;
    chain.transform()?.solve((*ur - *ul).as_slice())
}
