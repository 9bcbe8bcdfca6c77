//! Conservation-law systems with a single shared eigenvalue.
//!
//! Three systems are provided, all weakly hyperbolic with Jacobian
//! eigenvalue `u` of full multiplicity:
//!
//! | model | state | flux |
//! |---|---|---|
//! | pressureless gas | `(rho, rho u)` | `(rho u, rho u^2)` |
//! | modified Burgers | `(u, v)` | `(u^2/2, u v)` |
//! | further-modified Burgers | `(u, v, w, z)` | `(u^2/2, u v, v^2 + u w, 3 v w + u z)` |

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::error::{Error, Result};
use crate::jordan::SmallMatrix;
use crate::scalar::Scalar;

/// Largest state dimension of any model.
pub const MAX_COMPONENTS: usize = 4;

/// Densities below this value are clamped when forming velocities and averages.
pub const VACUUM_FLOOR: f64 = 1e-12;

/// Conserved state of one cell.
#[derive(Clone, Copy, PartialEq)]
pub struct StateVector<T> {
    len: usize,
    data: [T; MAX_COMPONENTS],
}

impl<T: Scalar> StateVector<T> {
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_COMPONENTS, "state has at most {MAX_COMPONENTS} components");
        Self {
            len,
            data: [T::zero(); MAX_COMPONENTS],
        }
    }

    pub fn from_slice(values: &[T]) -> Self {
        let mut s = Self::zeros(values.len());
        s.data[..values.len()].copy_from_slice(values);
        s
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data[..self.len]
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|x| x.is_finite())
    }

    pub fn scale(mut self, c: T) -> Self {
        for x in &mut self.data[..self.len] {
            *x *= c;
        }
        self
    }

    pub fn norm_inf(&self) -> T {
        self.as_slice().iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    fn zip_with(self, rhs: Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.len, rhs.len, "state dimension mismatch");
        let mut out = self;
        for i in 0..self.len {
            out.data[i] = f(self.data[i], rhs.data[i]);
        }
        out
    }
}

impl<T: Scalar> Add for StateVector<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Scalar> Sub for StateVector<T> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<T: Scalar> Mul<T> for StateVector<T> {
    type Output = Self;

    fn mul(self, c: T) -> Self {
        self.scale(c)
    }
}

impl<T> Index<usize> for StateVector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        assert!(i < self.len, "component {i} out of range");
        &self.data[i]
    }
}

impl<T> IndexMut<usize> for StateVector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        assert!(i < self.len, "component {i} out of range");
        &mut self.data[i]
    }
}

impl<T: fmt::Debug> fmt::Debug for StateVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.data[..self.len]).finish()
    }
}

/// Result of averaging two states.
#[derive(Clone, Debug, PartialEq)]
pub struct AveragedState<T> {
    /// Averaged shared eigenvalue.
    pub lambda_bar: T,
    /// Model-specific extra averages (`rho_bar` for the pressureless system).
    pub aux: Vec<T>,
}

/// A 1-D conservation law `U_t + F(U)_x = 0` whose Jacobian has a single
/// real eigenvalue of full multiplicity.
pub trait SystemModel<T: Scalar> {
    fn name(&self) -> &'static str;

    fn dim(&self) -> usize;

    /// Column names used in output files, after `x`.
    fn output_names(&self) -> &'static [&'static str];

    /// Rejects states of the wrong size or with non-finite entries.
    fn validate(&self, u: &StateVector<T>) -> Result<()> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.len(),
            });
        }
        if !u.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite state {u:?}")));
        }
        Ok(())
    }

    fn flux(&self, u: &StateVector<T>) -> Result<StateVector<T>>;

    fn jacobian(&self, u: &StateVector<T>) -> Result<SmallMatrix<T>>;

    /// The shared eigenvalue of the Jacobian at `u`.
    fn eigenvalue(&self, u: &StateVector<T>) -> T;

    /// Averaged state between two neighbours.
    fn average_state(&self, ul: &StateVector<T>, ur: &StateVector<T>) -> Result<AveragedState<T>>;

    /// Average used by the schemes: never fails on near-vacuum states.
    /// Returns whether a floor was applied.
    fn average_state_clamped(&self, ul: &StateVector<T>, ur: &StateVector<T>) -> (AveragedState<T>, bool);

    /// Leading flux components that the averaged Jacobian reproduces exactly.
    fn roe_components(&self) -> usize;

    /// Averaged Jacobian; rows beyond `roe_components` are not meaningful.
    fn averaged_jacobian(&self, avg: &AveragedState<T>) -> Result<SmallMatrix<T>>;

    /// Jacobian linearized between two states, with eigenvalue equal to the
    /// averaged one. Defaults to the Jacobian at the arithmetic midpoint.
    fn linearized_jacobian(&self, ul: &StateVector<T>, ur: &StateVector<T>) -> Result<SmallMatrix<T>> {
        self.jacobian(&(*ul + *ur).scale(T::lit(0.5)))
    }

    /// Output variables for one cell (primitive variables where they differ).
    fn output_values(&self, u: &StateVector<T>) -> StateVector<T> {
        *u
    }
}

/// The three systems shipped with the solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Pressureless,
    ModifiedBurgers,
    FurtherModifiedBurgers,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [
        ModelKind::Pressureless,
        ModelKind::ModifiedBurgers,
        ModelKind::FurtherModifiedBurgers,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Pressureless => "pressureless",
            ModelKind::ModifiedBurgers => "modified-burgers",
            ModelKind::FurtherModifiedBurgers => "further-modified-burgers",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ModelKind::Pressureless | ModelKind::ModifiedBurgers => 2,
            ModelKind::FurtherModifiedBurgers => 4,
        }
    }

    pub fn output_names(&self) -> &'static [&'static str] {
        match self {
            ModelKind::Pressureless => &["rho", "u"],
            ModelKind::ModifiedBurgers => &["u", "v"],
            ModelKind::FurtherModifiedBurgers => &["u", "v", "w", "z"],
        }
    }
}

/// Velocity `m / rho` with the density floored at [`VACUUM_FLOOR`].
#[inline]
pub fn pressureless_velocity<T: Scalar>(u: &StateVector<T>) -> T {
    u[1] / u[0].max(T::lit(VACUUM_FLOOR))
}

fn arithmetic_mean<T: Scalar>(a: T, b: T) -> T {
    if a == b {
        a
    } else {
        (a + b) * T::lit(0.5)
    }
}

/// Square-root-density weighted velocity average and geometric mean density.
/// Equal inputs return the common state unchanged.
fn sqrt_weighted<T: Scalar>(rho_l: T, u_l: T, rho_r: T, u_r: T) -> (T, T) {
    if rho_l == rho_r && u_l == u_r {
        return (u_l, rho_l);
    }
    let (sl, sr) = (rho_l.sqrt(), rho_r.sqrt());
    let u_bar = (sl * u_l + sr * u_r) / (sl + sr);
    let u_bar = u_bar.max(u_l.min(u_r)).min(u_l.max(u_r));
    (u_bar, sl * sr)
}

impl<T: Scalar> SystemModel<T> for ModelKind {
    fn name(&self) -> &'static str {
        ModelKind::name(self)
    }

    fn dim(&self) -> usize {
        ModelKind::dim(self)
    }

    fn output_names(&self) -> &'static [&'static str] {
        ModelKind::output_names(self)
    }

    fn flux(&self, s: &StateVector<T>) -> Result<StateVector<T>> {
        SystemModel::<T>::validate(self, s)?;
        let half = T::lit(0.5);
        Ok(match self {
            ModelKind::Pressureless => {
                let vel = pressureless_velocity(s);
                StateVector::from_slice(&[s[1], s[1] * vel])
            }
            ModelKind::ModifiedBurgers => {
                let (u, v) = (s[0], s[1]);
                StateVector::from_slice(&[half * u * u, u * v])
            }
            ModelKind::FurtherModifiedBurgers => {
                let (u, v, w, z) = (s[0], s[1], s[2], s[3]);
                StateVector::from_slice(&[
                    half * u * u,
                    u * v,
                    v * v + u * w,
                    T::lit(3.0) * v * w + u * z,
                ])
            }
        })
    }

    fn jacobian(&self, s: &StateVector<T>) -> Result<SmallMatrix<T>> {
        SystemModel::<T>::validate(self, s)?;
        let (zero, one, two, three) = (T::zero(), T::one(), T::lit(2.0), T::lit(3.0));
        match self {
            ModelKind::Pressureless => {
                let u = pressureless_velocity(s);
                SmallMatrix::from_rows(&[[zero, one], [-u * u, two * u]])
            }
            ModelKind::ModifiedBurgers => {
                let (u, v) = (s[0], s[1]);
                SmallMatrix::from_rows(&[[u, zero], [v, u]])
            }
            ModelKind::FurtherModifiedBurgers => {
                let (u, v, w, z) = (s[0], s[1], s[2], s[3]);
                SmallMatrix::from_rows(&[
                    [u, zero, zero, zero],
                    [v, u, zero, zero],
                    [w, two * v, u, zero],
                    [z, three * w, three * v, u],
                ])
            }
        }
    }

    fn eigenvalue(&self, s: &StateVector<T>) -> T {
        match self {
            ModelKind::Pressureless => pressureless_velocity(s),
            ModelKind::ModifiedBurgers | ModelKind::FurtherModifiedBurgers => s[0],
        }
    }

    fn average_state(&self, ul: &StateVector<T>, ur: &StateVector<T>) -> Result<AveragedState<T>> {
        SystemModel::<T>::validate(self, ul)?;
        SystemModel::<T>::validate(self, ur)?;
        match self {
            ModelKind::Pressureless => {
                for rho in [ul[0], ur[0]] {
                    if !(rho > T::zero()) {
                        return Err(Error::Vacuum {
                            density: rho.as_f64(),
                        });
                    }
                }
                let (u_bar, rho_bar) = sqrt_weighted(ul[0], ul[1] / ul[0], ur[0], ur[1] / ur[0]);
                Ok(AveragedState {
                    lambda_bar: u_bar,
                    aux: vec![rho_bar],
                })
            }
            ModelKind::ModifiedBurgers | ModelKind::FurtherModifiedBurgers => Ok(AveragedState {
                lambda_bar: arithmetic_mean(ul[0], ur[0]),
                aux: Vec::new(),
            }),
        }
    }

    fn average_state_clamped(&self, ul: &StateVector<T>, ur: &StateVector<T>) -> (AveragedState<T>, bool) {
        match self {
            ModelKind::Pressureless => {
                let floor = T::lit(VACUUM_FLOOR);
                let clamped = ul[0] < floor || ur[0] < floor;
                let (rl, rr) = (ul[0].max(floor), ur[0].max(floor));
                let (u_bar, rho_bar) = sqrt_weighted(rl, ul[1] / rl, rr, ur[1] / rr);
                (
                    AveragedState {
                        lambda_bar: u_bar,
                        aux: vec![rho_bar],
                    },
                    clamped,
                )
            }
            _ => (
                AveragedState {
                    lambda_bar: arithmetic_mean(ul[0], ur[0]),
                    aux: Vec::new(),
                },
                false,
            ),
        }
    }

    fn roe_components(&self) -> usize {
        match self {
            ModelKind::Pressureless => 2,
            ModelKind::ModifiedBurgers | ModelKind::FurtherModifiedBurgers => 1,
        }
    }

    fn averaged_jacobian(&self, avg: &AveragedState<T>) -> Result<SmallMatrix<T>> {
        let u = avg.lambda_bar;
        let (zero, one, two) = (T::zero(), T::one(), T::lit(2.0));
        match self {
            ModelKind::Pressureless => SmallMatrix::from_rows(&[[zero, one], [-u * u, two * u]]),
            // Only the first row (u_bar) is defined; lower rows are left diagonal.
            ModelKind::ModifiedBurgers | ModelKind::FurtherModifiedBurgers => {
                Ok(SmallMatrix::<T>::identity(self.dim())?.scaled(u))
            }
        }
    }

    fn linearized_jacobian(&self, ul: &StateVector<T>, ur: &StateVector<T>) -> Result<SmallMatrix<T>> {
        match self {
            ModelKind::Pressureless => {
                let avg = SystemModel::<T>::average_state(self, ul, ur)?;
                SystemModel::<T>::averaged_jacobian(self, &avg)
            }
            _ => SystemModel::<T>::jacobian(self, &(*ul + *ur).scale(T::lit(0.5))),
        }
    }

    fn output_values(&self, s: &StateVector<T>) -> StateVector<T> {
        match self {
            ModelKind::Pressureless => StateVector::from_slice(&[s[0], pressureless_velocity(s)]),
            _ => *s,
        }
    }
}

/// `||dF - A_bar dU||_inf` over the flux components the average constrains.
pub fn roe_property_residual<T: Scalar, M: SystemModel<T> + ?Sized>(
    model: &M,
    ul: &StateVector<T>,
    ur: &StateVector<T>,
) -> Result<T> {
    let avg = model.average_state(ul, ur)?;
    let a_bar = model.averaged_jacobian(&avg)?;
    let df = model.flux(ur)? - model.flux(ul)?;
    let du = *ur - *ul;
    let adu = a_bar.mul_vec(du.as_slice())?;
    Ok((0..model.roe_components()).fold(T::zero(), |m, i| m.max((df[i] - adu[i]).abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::{numeric_rank, DEFAULT_RANK_TOL};
    use proptest::prelude::*;

    fn sv(x: &[f64]) -> StateVector<f64> {
        StateVector::from_slice(x)
    }

    /// Conserved pressureless state from (rho, u).
    fn prim(rho: f64, u: f64) -> StateVector<f64> {
        sv(&[rho, rho * u])
    }

    const P: ModelKind = ModelKind::Pressureless;
    const MB: ModelKind = ModelKind::ModifiedBurgers;
    const FMB: ModelKind = ModelKind::FurtherModifiedBurgers;

    #[test]
    fn flux_examples() {
        let f = P.flux(&sv(&[1.0, 1.5])).unwrap();
        assert_eq!(f.as_slice(), &[1.5, 2.25]);
        assert_eq!(MB.flux(&sv(&[0.0, 3.0])).unwrap().as_slice(), &[0.0, 0.0]);
        assert_eq!(
            FMB.flux(&sv(&[1.0, 1.0, 1.0, 1.0])).unwrap().as_slice(),
            &[0.5, 1.0, 2.0, 4.0]
        );
    }

    #[test]
    fn flux_rejects_wrong_dimension() {
        assert!(matches!(
            FMB.flux(&sv(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { expected: 4, got: 2 })
        ));
        assert!(P.flux(&sv(&[f64::NAN, 0.0])).is_err());
    }

    #[test]
    fn jacobian_examples() {
        let a = P.jacobian(&prim(1.0, 2.0)).unwrap();
        assert_eq!(a, SmallMatrix::from_rows(&[[0.0, 1.0], [-4.0, 4.0]]).unwrap());
        let a = MB.jacobian(&sv(&[3.0, 0.0])).unwrap();
        assert_eq!(a, SmallMatrix::from_rows(&[[3.0, 0.0], [0.0, 3.0]]).unwrap());
        let a = FMB.jacobian(&sv(&[1.0; 4])).unwrap();
        let expected = SmallMatrix::from_rows(&[
            [1.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0],
            [1.0, 3.0, 3.0, 1.0],
        ])
        .unwrap();
        assert_eq!(a, expected);
    }

    #[test]
    fn average_examples() {
        let avg = P.average_state(&prim(1.0, 1.5), &prim(0.2, 0.0)).unwrap();
        let s = 0.2f64.sqrt();
        assert!((avg.lambda_bar - 1.5 / (1.0 + s)).abs() < 1e-15);
        assert!((avg.lambda_bar - 1.03647).abs() < 1e-5);
        assert!((avg.aux[0] - 0.44721).abs() < 1e-5);

        let u = prim(0.37, -1.3);
        let avg = P.average_state(&u, &u).unwrap();
        assert_eq!(avg.lambda_bar, SystemModel::<f64>::eigenvalue(&P, &u));
        assert_eq!(avg.aux[0], 0.37);

        let avg = MB.average_state(&sv(&[-2.0, 1.0]), &sv(&[4.0, -2.0])).unwrap();
        assert_eq!(avg.lambda_bar, 1.0);
        assert!(avg.aux.is_empty());
    }

    #[test]
    fn vacuum_is_an_error_unless_clamped() {
        let err = P.average_state(&sv(&[0.0, 0.0]), &prim(1.0, 1.0));
        assert!(matches!(err, Err(Error::Vacuum { .. })));
        let (avg, clamped) = P.average_state_clamped(&sv(&[0.0, 0.0]), &prim(1.0, 1.0));
        assert!(clamped);
        assert!(avg.lambda_bar.is_finite());
        let (_, clamped) = P.average_state_clamped(&prim(1.0, 0.0), &prim(1.0, 1.0));
        assert!(!clamped);
    }

    #[test]
    fn roe_residual_examples() {
        let r = roe_property_residual(&P, &prim(1.0, 1.5), &prim(0.2, 0.0)).unwrap();
        assert!(r <= 1e-12, "{r}");
        for m in ModelKind::ALL {
            let u = StateVector::from_slice(&[0.7, 0.2, -0.1, 0.4][..m.dim()]);
            assert_eq!(roe_property_residual(&m, &u, &u).unwrap(), 0.0);
        }
    }

    #[test]
    fn pressureless_outputs_primitive_variables() {
        let out = P.output_values(&prim(2.0, 0.75));
        assert_eq!(out.as_slice(), &[2.0, 0.75]);
    }

    fn finite_difference_check(model: ModelKind, state: StateVector<f64>) {
        let h = 1e-4;
        let a = model.jacobian(&state).unwrap();
        let scale = a.norm_inf().max(1.0);
        for j in 0..state.len() {
            let mut plus = state;
            let mut minus = state;
            plus[j] += h;
            minus[j] -= h;
            let col = (model.flux(&plus).unwrap() - model.flux(&minus).unwrap()).scale(0.5 / h);
            for i in 0..state.len() {
                let err = (col[i] - a[(i, j)]).abs();
                assert!(err <= 1e-6 * scale, "{model:?} d F{i}/d U{j}: {err}");
            }
        }
    }

    fn nonzero() -> impl Strategy<Value = f64> {
        prop_oneof![-5.0f64..-0.1, 0.1f64..5.0]
    }

    proptest! {
        #[test]
        fn pressureless_roe_property(rl in 1e-3f64..10.0, ul in -5.0f64..5.0, rr in 1e-3f64..10.0, ur in -5.0f64..5.0) {
            let (a, b) = (prim(rl, ul), prim(rr, ur));
            let df = (P.flux(&b).unwrap() - P.flux(&a).unwrap()).norm_inf();
            let res = roe_property_residual(&P, &a, &b).unwrap();
            prop_assert!(res <= 1e-10 * (1.0 + df));
            let avg = P.average_state(&a, &b).unwrap();
            prop_assert!(avg.lambda_bar >= ul.min(ur) && avg.lambda_bar <= ul.max(ur));
        }

        #[test]
        fn burgers_first_component(ul in -5.0f64..5.0, vl in -5.0f64..5.0, ur in -5.0f64..5.0, vr in -5.0f64..5.0) {
            let res = roe_property_residual(&MB, &sv(&[ul, vl]), &sv(&[ur, vr])).unwrap();
            prop_assert!(res <= 1e-12 * (1.0 + ul.abs().max(ur.abs())).powi(2));
        }

        #[test]
        fn jacobian_is_defective(u in -5.0f64..5.0, v in nonzero(), w in nonzero(), z in nonzero(), rho in 1e-2f64..10.0) {
            let cases = [
                (P, prim(rho, u)),
                (MB, sv(&[u, v])),
                (FMB, sv(&[u, v, w, z])),
            ];
            for (m, s) in cases {
                let a = m.jacobian(&s).unwrap();
                let lam = SystemModel::<f64>::eigenvalue(&m, &s);
                let rank = numeric_rank(&a.shifted(lam), DEFAULT_RANK_TOL).unwrap();
                prop_assert_eq!(rank, m.dim() - 1);
            }
        }

        #[test]
        fn flux_matches_jacobian(u in -3.0f64..3.0, v in -3.0f64..3.0, w in -3.0f64..3.0, z in -3.0f64..3.0, rho in 0.1f64..5.0) {
            finite_difference_check(P, prim(rho, u));
            finite_difference_check(MB, sv(&[u, v]));
            finite_difference_check(FMB, sv(&[u, v, w, z]));
        }
    }
}
