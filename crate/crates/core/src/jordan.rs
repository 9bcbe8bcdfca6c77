//! Small dense matrices, numeric rank, and Jordan chains of generalized
//! eigenvectors for a single defective eigenvalue.
//!
//! All systems handled by the solver have Jacobians with one real eigenvalue
//! of full algebraic multiplicity. For such a matrix `A` with eigenvalue
//! `lambda`, the size of the largest Jordan block is the least `s` for which
//! `rank (A - lambda I)^s == rank (A - lambda I)^(s+1)`. When `s` equals the
//! dimension there is a single block and the chain
//!
//! ```text
//! A X_1 = lambda X_1
//! A X_k = lambda X_k + X_(k-1),   k = 2..s
//! ```
//!
//! provides a full basis `P = [X_1 | ... | X_s]` with `A P = P J`.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 8;

/// Default relative pivot tolerance for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Square matrix of dimension `1..=MAX_DIM` with stack storage.
#[derive(Clone, Copy, PartialEq)]
pub struct SmallMatrix<T> {
    dim: usize,
    data: [[T; MAX_DIM]; MAX_DIM],
}

impl<T: Scalar> SmallMatrix<T> {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidInput(format!(
                "matrix dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        Ok(Self {
            dim,
            data: [[T::zero(); MAX_DIM]; MAX_DIM],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.data[i][i] = T::one();
        }
        Ok(m)
    }

    /// Builds a matrix from its rows. Rows must form a square array of
    /// finite values.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let mut m = Self::zeros(rows.len())?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != m.dim {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    m.dim
                )));
            }
            m.data[i][..m.dim].copy_from_slice(row);
        }
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                m.data[i][j] = f(i, j);
            }
        }
        Ok(m)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns<C: AsRef<[T]>>(cols: &[C]) -> Result<Self> {
        let dim = cols.len();
        let mut m = Self::zeros(dim)?;
        for (j, col) in cols.iter().enumerate() {
            let col = col.as_ref();
            if col.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: col.len(),
                });
            }
            for (i, &x) in col.iter().enumerate() {
                m.data[i][j] = x;
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_finite(&self) -> bool {
        self.rows().all(|r| r.iter().all(|x| x.is_finite()))
    }

    fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidInput("matrix has non-finite entries".into()))
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.data[..self.dim].iter().map(move |r| &r[..self.dim])
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.dim).map(|i| self.data[i][j]).collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        self.rows()
            .map(|r| r.iter().fold(T::zero(), |acc, x| acc + x.abs()))
            .fold(T::zero(), T::max)
    }

    /// `self - shift * I`
    pub fn shifted(&self, shift: T) -> Self {
        let mut m = *self;
        for i in 0..self.dim {
            m.data[i][i] -= shift;
        }
        m
    }

    pub fn scaled(&self, c: T) -> Self {
        let mut m = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.data[i][j] *= c;
            }
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut m = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.data[i][j] -= other.data[i][j];
            }
        }
        Ok(m)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let n = self.dim;
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i][k];
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    m.data[i][j] += a * other.data[k][j];
                }
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self
            .rows()
            .map(|r| r.iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
            .collect())
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = Self::identity(self.dim)?;
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> T {
        let n = self.dim;
        let mut a = self.data;
        let mut det = T::one();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
                .unwrap();
            if a[piv][col] == T::zero() {
                return T::zero();
            }
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            det *= a[col][col];
            for r in col + 1..n {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    let v = a[col][c];
                    a[r][c] -= f * v;
                }
            }
        }
        det
    }

    /// Solves `self * x = b` for a nonsingular matrix.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        if b.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: b.len(),
            });
        }
        let mut aug = Augmented::new(self, None, Some(b));
        let threshold = T::lit(1e-14) * self.norm_inf();
        let pivots = aug.reduce(threshold);
        if pivots.len() < self.dim {
            return Err(Error::InvalidInput("singular matrix".into()));
        }
        Ok(aug.back_substitute(&pivots, self.dim, |_| T::zero()))
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            })
        }
    }
}

impl<T> Index<(usize, usize)> for SmallMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.dim && j < self.dim, "index out of bounds");
        &self.data[i][j]
    }
}

impl<T> IndexMut<(usize, usize)> for SmallMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.dim && j < self.dim, "index out of bounds");
        &mut self.data[i][j]
    }
}

impl<T: fmt::Debug> fmt::Debug for SmallMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.data[..self.dim].iter().map(|r| &r[..self.dim]))
            .finish()
    }
}

/// Row-reduction workspace: an `n x m` coefficient block with an optional
/// right-hand side column. Columns may be skipped to pin a variable.
struct Augmented<T> {
    rows: usize,
    /// Original column index for each working column.
    cols: Vec<usize>,
    a: [[T; MAX_DIM + 1]; MAX_DIM],
    has_rhs: bool,
}

impl<T: Scalar> Augmented<T> {
    fn new(m: &SmallMatrix<T>, skip_col: Option<usize>, rhs: Option<&[T]>) -> Self {
        let n = m.dim;
        let cols: Vec<usize> = (0..n).filter(|&c| Some(c) != skip_col).collect();
        let mut a = [[T::zero(); MAX_DIM + 1]; MAX_DIM];
        for i in 0..n {
            for (k, &c) in cols.iter().enumerate() {
                a[i][k] = m.data[i][c];
            }
            if let Some(b) = rhs {
                a[i][cols.len()] = b[i];
            }
        }
        Self {
            rows: n,
            cols,
            a,
            has_rhs: rhs.is_some(),
        }
    }

    /// Forward elimination with partial pivoting. Returns `(row, working
    /// column)` pairs of accepted pivots; candidates at or below `threshold`
    /// count as zero.
    fn reduce(&mut self, threshold: T) -> Vec<(usize, usize)> {
        let ncols = self.cols.len();
        let width = ncols + usize::from(self.has_rhs);
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..ncols {
            if row == self.rows {
                break;
            }
            let (piv, mag) = (row..self.rows)
                .map(|r| (r, self.a[r][col].abs()))
                .fold((row, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if mag <= threshold || mag == T::zero() {
                for r in row..self.rows {
                    self.a[r][col] = T::zero();
                }
                continue;
            }
            self.a.swap(piv, row);
            for r in row + 1..self.rows {
                let f = self.a[r][col] / self.a[row][col];
                if f == T::zero() {
                    continue;
                }
                for c in col..width {
                    let v = self.a[row][c];
                    self.a[r][c] -= f * v;
                }
                self.a[r][col] = T::zero();
            }
            pivots.push((row, col));
            row += 1;
        }
        pivots
    }

    /// Back substitution over the pivot rows. Non-pivot working columns take
    /// the value `free(working_col)`. Returns the solution in original
    /// coordinates with `dim` entries; a skipped column is left at zero.
    fn back_substitute(
        &self,
        pivots: &[(usize, usize)],
        dim: usize,
        free: impl Fn(usize) -> T,
    ) -> Vec<T> {
        let ncols = self.cols.len();
        let mut y: Vec<T> = (0..ncols).map(&free).collect();
        for &(r, c) in pivots.iter().rev() {
            let mut acc = if self.has_rhs { self.a[r][ncols] } else { T::zero() };
            for k in c + 1..ncols {
                acc -= self.a[r][k] * y[k];
            }
            y[c] = acc / self.a[r][c];
        }
        let mut x = vec![T::zero(); dim];
        for (k, &c) in self.cols.iter().enumerate() {
            x[c] = y[k];
        }
        x
    }
}

/// Number of pivots above `threshold` after row reduction.
fn rank_abs<T: Scalar>(m: &SmallMatrix<T>, threshold: T) -> usize {
    Augmented::new(m, None, None).reduce(threshold).len()
}

/// Numeric rank: pivots larger than `tol * ||m||_inf` after row reduction
/// with partial pivoting. The zero matrix has rank 0.
pub fn numeric_rank<T: Scalar>(m: &SmallMatrix<T>, tol: T) -> Result<usize> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidInput(format!("rank tolerance {tol} must be positive")));
    }
    m.check_finite()?;
    Ok(rank_abs(m, tol * m.norm_inf()))
}

/// Size of the largest Jordan block of `a` for eigenvalue `lambda`: the least
/// `s >= 1` with `rank N^s == rank N^(s+1)`, `N = a - lambda I`.
///
/// Ranks of the powers are taken against `tol * (||a|| + |lambda|)^k`, so the
/// answer does not change when `a` and `lambda` are scaled together.
pub fn block_size<T: Scalar>(a: &SmallMatrix<T>, lambda: T, tol: T) -> Result<usize> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidInput(format!("rank tolerance {tol} must be positive")));
    }
    a.check_finite()?;
    if !lambda.is_finite() {
        return Err(Error::InvalidInput("eigenvalue is not finite".into()));
    }
    let n = a.dim();
    let nil = a.shifted(lambda);
    let scale = a.norm_inf() + lambda.abs();

    let mut power = nil;
    let mut scale_k = scale;
    let mut prev = rank_abs(&power, tol * scale_k);
    if prev == n {
        return Err(Error::NotEigenvalue {
            lambda: lambda.as_f64(),
        });
    }
    for s in 1..=n + 1 {
        power = power.mul(&nil)?;
        scale_k *= scale;
        let next = rank_abs(&power, tol * scale_k);
        if next == prev {
            return Ok(s);
        }
        prev = next;
    }
    Err(Error::Internal(format!(
        "rank of powers did not stabilize within {} steps",
        n + 1
    )))
}

/// Ordered Jordan chain `X_1 .. X_s` for one eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanChain<T> {
    pub eigenvalue: T,
    pub vectors: Vec<Vec<T>>,
    pub free_params: Vec<T>,
    /// Largest residual norm over the chain relations.
    pub residual: T,
}

impl<T: Scalar> JordanChain<T> {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `P = [X_1 | ... | X_s]`
    pub fn transform(&self) -> Result<SmallMatrix<T>> {
        SmallMatrix::from_columns(&self.vectors)
    }

    /// The `s x s` Jordan block for this chain.
    pub fn jordan_block(&self) -> Result<SmallMatrix<T>> {
        jordan_block(self.eigenvalue, self.len())
    }
}

/// Upper bidiagonal block with `lambda` on the diagonal and ones above it.
pub fn jordan_block<T: Scalar>(lambda: T, s: usize) -> Result<SmallMatrix<T>> {
    SmallMatrix::from_fn(s, |i, j| {
        if i == j {
            lambda
        } else if j == i + 1 {
            T::one()
        } else {
            T::zero()
        }
    })
}

/// `max_k ||A X_k - lambda X_k - X_(k-1)||_inf` with `X_0 = 0`.
pub fn chain_residual<T: Scalar>(a: &SmallMatrix<T>, lambda: T, vectors: &[Vec<T>]) -> Result<T> {
    let mut worst = T::zero();
    for (k, x) in vectors.iter().enumerate() {
        let ax = a.mul_vec(x)?;
        for i in 0..x.len() {
            let prev = if k == 0 { T::zero() } else { vectors[k - 1][i] };
            worst = worst.max((ax[i] - lambda * x[i] - prev).abs());
        }
    }
    Ok(worst)
}

/// Builds the Jordan chain of `a` for `lambda` when there is a single block
/// (`s == dim`).
///
/// `X_1` spans the kernel of `N = a - lambda I` and is scaled so that its
/// first nonzero entry, at index `p`, is one. Each later vector solves
/// `N X_k = X_(k-1)`; the solution is unique up to multiples of `X_1`, and
/// the chosen one is the solution with entry `p` equal to zero plus
/// `free_params[k - 2] * X_1`. Missing free parameters default to zero.
pub fn build_chain<T: Scalar>(
    a: &SmallMatrix<T>,
    lambda: T,
    s: usize,
    free_params: &[T],
    tol: T,
) -> Result<JordanChain<T>> {
    let n = a.dim();
    if s != n {
        return Err(Error::Unsupported(format!(
            "chain of length {s} for a {n}x{n} matrix (only single Jordan blocks are supported)"
        )));
    }
    if free_params.len() > s - 1 {
        return Err(Error::InvalidInput(format!(
            "{} free parameters supplied, chain needs at most {}",
            free_params.len(),
            s - 1
        )));
    }
    if free_params.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("free parameters must be finite".into()));
    }
    a.check_finite()?;

    let nil = a.shifted(lambda);
    let norm = nil.norm_inf();
    let threshold = tol * (a.norm_inf() + lambda.abs());

    // Kernel vector.
    let mut aug = Augmented::new(&nil, None, None);
    let pivots = aug.reduce(threshold);
    if pivots.len() != n - 1 {
        return Err(Error::InconsistentChain {
            index: 1,
            residual: f64::NAN,
        });
    }
    let free_col = (0..n)
        .find(|c| pivots.iter().all(|&(_, pc)| pc != *c))
        .expect("one non-pivot column");
    let mut x1 = aug.back_substitute(&pivots, n, |c| if c == free_col { T::one() } else { T::zero() });
    let big = x1.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let anchor = x1
        .iter()
        .position(|x| x.abs() > T::lit(1e-8) * big)
        .expect("kernel vector is nonzero");
    let head = x1[anchor];
    for x in &mut x1 {
        *x /= head;
    }
    x1[anchor] = T::one();

    let mut vectors = vec![x1.clone()];
    let mut params = Vec::with_capacity(s - 1);
    for k in 1..s {
        let rhs = vectors[k - 1].clone();
        let mut aug = Augmented::new(&nil, Some(anchor), Some(&rhs));
        let pivots = aug.reduce(threshold);
        let mut x = aug.back_substitute(&pivots, n, |_| T::zero());
        let c = free_params.get(k - 1).copied().unwrap_or_else(T::zero);
        for (xi, &ki) in x.iter_mut().zip(&x1) {
            *xi += c * ki;
        }
        params.push(c);

        let nx = nil.mul_vec(&x)?;
        let res = nx
            .iter()
            .zip(&rhs)
            .fold(T::zero(), |m, (&l, &r)| m.max((l - r).abs()));
        let size = x.iter().fold(T::one(), |m, v| m.max(v.abs()));
        if !(res <= tol * (T::one() + norm) * size) {
            return Err(Error::InconsistentChain {
                index: k + 1,
                residual: res.as_f64(),
            });
        }
        vectors.push(x);
    }

    let residual = chain_residual(a, lambda, &vectors)?;
    Ok(JordanChain {
        eigenvalue: lambda,
        vectors,
        free_params: params,
        residual,
    })
}

/// Determinant of `[X_1 | ... | X_s]` for a full-length chain.
pub fn chain_determinant<T: Scalar>(chain: &JordanChain<T>) -> Result<T> {
    let dim = chain.vectors.first().map_or(0, Vec::len);
    if chain.len() != dim || dim == 0 {
        return Err(Error::Unsupported(format!(
            "chain of length {} in dimension {dim}",
            chain.len()
        )));
    }
    Ok(chain.transform()?.determinant())
}
