//! Dense complex matrices: a float carrier and an exact carrier over
//! cyclotomic integers.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::cyclotomic::{exp_sum_of, Cyclotomic};
use crate::error::{Error, Result};

/// Default tolerance for float unitarity and equality checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Dense complex matrix with finite double-precision entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn identity(n: usize) -> Self {
        ComplexMatrix(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(rows, cols))
    }

    /// Builds a matrix from row-major entries; rejects NaN and infinities.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidArgument(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(ComplexMatrix(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn from_nalgebra(m: DMatrix<Complex64>) -> Self {
        ComplexMatrix(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(ComplexMatrix(&self.0 * &other.0))
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(v.len(), self.cols());
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        if self.rows() != self.cols() {
            return Err(Error::DimensionMismatch(
                "power of a non-square matrix".into(),
            ));
        }
        let mut result = Self::identity(self.rows());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return f64::INFINITY;
        }
        (&self.0 - &other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `max |M*M - I| <= tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        if self.rows() != self.cols() {
            return false;
        }
        let gram = self.adjoint().mul(self).expect("square");
        gram.max_abs_diff(&Self::identity(self.rows())) <= tol
    }

    /// Eigenvalues from the complex Schur form, in no particular order.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        if self.rows() != self.cols() {
            return Err(Error::DimensionMismatch(
                "eigenvalues of a non-square matrix".into(),
            ));
        }
        // Unitary inputs have all eigenvalues on one circle, which can stall
        // the unshifted iteration; a complex diagonal shift breaks the tie.
        let n = self.rows();
        for shift in [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.37, 0.21),
            Complex64::new(-1.3, 0.7),
        ] {
            let m = &self.0 + DMatrix::<Complex64>::identity(n, n) * shift;
            if let Some(schur) = nalgebra::linalg::Schur::try_new(m, 1e-14, 5_000) {
                let (_, t) = schur.unpack();
                return Ok((0..n).map(|i| t[(i, i)] - shift).collect());
            }
        }
        Err(Error::Internal("Schur iteration did not converge".into()))
    }
}

/// Exact matrix `√scale_sq · (x_ij)` with every `x_ij ∈ Z[ζ_Q]`.
///
/// The multiplier is stored through its square so that Fourier matrices
/// (multiplier `1/√N`) and their products stay exact.
#[derive(Debug, Clone)]
pub struct RootTable {
    rows: usize,
    cols: usize,
    order: u64,
    entries: Vec<Cyclotomic>,
    scale_sq: BigRational,
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

fn big_ratio_to_f64(q: &BigRational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => f64::NAN,
    }
}

impl RootTable {
    /// Matrix `scale · (entries)` in row-major order; `scale` must be positive.
    pub fn new(
        rows: usize,
        cols: usize,
        order: u64,
        entries: Vec<Cyclotomic>,
        scale: BigRational,
    ) -> Result<Self> {
        if !scale.is_positive() {
            return Err(Error::InvalidArgument("scale must be positive".into()));
        }
        Self::with_scale_sq(rows, cols, order, entries, &scale * &scale)
    }

    /// Matrix `√scale_sq · (entries)`.
    pub fn with_scale_sq(
        rows: usize,
        cols: usize,
        order: u64,
        entries: Vec<Cyclotomic>,
        scale_sq: BigRational,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} table",
                entries.len()
            )));
        }
        if !scale_sq.is_positive() {
            return Err(Error::InvalidArgument("scale must be positive".into()));
        }
        let entries = entries
            .into_iter()
            .map(|e| {
                if !order.is_multiple_of(e.order()) {
                    return Err(Error::InvalidArgument(format!(
                        "entry of order {} in a table of order {order}",
                        e.order()
                    )));
                }
                e.lift(order)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RootTable {
            rows,
            cols,
            order,
            entries,
            scale_sq,
        })
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n * n)
            .map(|k| Cyclotomic::from_int(1, i64::from(k / n == k % n)))
            .collect();
        RootTable {
            rows: n,
            cols: n,
            order: 1,
            entries,
            scale_sq: BigRational::one(),
        }
    }

    /// 0/1 matrix with ones at `(i, perm[i])`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let entries = (0..n * n)
            .map(|k| Cyclotomic::from_int(1, i64::from(perm[k / n] == k % n)))
            .collect();
        RootTable {
            rows: n,
            cols: n,
            order: 1,
            entries,
            scale_sq: BigRational::one(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn entry(&self, i: usize, j: usize) -> &Cyclotomic {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Cyclotomic] {
        &self.entries
    }

    /// Square of the scalar multiplier.
    pub fn scale_sq(&self) -> &BigRational {
        &self.scale_sq
    }

    /// The multiplier when it is rational.
    pub fn rational_scale(&self) -> Option<BigRational> {
        rational_sqrt(&self.scale_sq)
    }

    /// Rewrites over a multiple of the current order.
    pub fn lift(&self, order: u64) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.lift(order))
            .collect::<Result<Vec<_>>>()?;
        Ok(RootTable {
            entries,
            order,
            ..self.clone()
        })
    }

    /// Canonical entries with their common integer content pulled into the scale.
    pub fn normalized(&self) -> Self {
        let entries: Vec<Cyclotomic> = self.entries.iter().map(|e| e.reduced()).collect();
        let g = entries
            .iter()
            .fold(BigInt::zero(), |g, e| g.gcd(&e.content()));
        if g.is_zero() || g.is_one() {
            return RootTable {
                entries,
                ..self.clone()
            };
        }
        let entries = entries.iter().map(|e| e.div_exact(&g)).collect();
        let g2 = BigRational::from_integer(&g * &g);
        RootTable {
            entries,
            scale_sq: &self.scale_sq * g2,
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let order = self.order.lcm(&other.order);
        let a = self.lift(order)?;
        let b = other.lift(order)?;
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Cyclotomic::zero(order);
                for k in 0..self.cols {
                    acc = acc.add(&a.entry(i, k).mul(b.entry(k, j)));
                }
                entries.push(acc);
            }
        }
        Ok(RootTable {
            rows: self.rows,
            cols: other.cols,
            order,
            entries,
            scale_sq: &self.scale_sq * &other.scale_sq,
        }
        .normalized())
    }

    pub fn adjoint(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for i in 0..self.cols {
            for j in 0..self.rows {
                entries.push(self.entry(j, i).conj());
            }
        }
        RootTable {
            rows: self.cols,
            cols: self.rows,
            order: self.order,
            entries,
            scale_sq: self.scale_sq.clone(),
        }
    }

    /// Non-negative power; negative powers need a [`UnitaryMatrix`].
    pub fn pow(&self, k: u32) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(
                "power of a non-square table".into(),
            ));
        }
        let mut result = Self::identity(self.rows);
        let mut base = self.normalized();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Exact matrix equality.
    ///
    /// Fails when the two multipliers differ by an irrational factor, a case
    /// no construction in this crate produces.
    pub fn exact_eq(&self, other: &Self) -> Result<bool> {
        if self.rows != other.rows || self.cols != other.cols {
            return Ok(false);
        }
        let ratio = &self.scale_sq / &other.scale_sq;
        let r = rational_sqrt(&ratio)
            .ok_or_else(|| Error::InvalidArgument("tables with incommensurable scales".into()))?;
        let num = r
            .numer()
            .to_i64()
            .ok_or(Error::Overflow("scale comparison"))?;
        let den = r
            .denom()
            .to_i64()
            .ok_or(Error::Overflow("scale comparison"))?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .all(|(x, y)| x.scale(num).exact_eq(&y.scale(den))))
    }

    /// Whether column `j` is exactly the canonical vector `δ_i`.
    pub fn column_is_canonical(&self, j: usize, i: usize) -> bool {
        let t = self.normalized();
        (0..t.rows).all(|r| {
            let e = t.entry(r, j);
            if r == i {
                match (e.as_integer(), rational_sqrt(&t.scale_sq)) {
                    (Some(c), Some(s)) => (BigRational::from_integer(c) * s).is_one(),
                    _ => false,
                }
            } else {
                e.is_zero()
            }
        })
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && (0..self.cols).all(|j| self.column_is_canonical(j, j))
    }

    /// Exact unitarity: distinct columns orthogonal and every column of norm one.
    pub fn is_unitary_exact(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let n = self.rows;
        let conj: Vec<Cyclotomic> = self.entries.iter().map(|e| e.conj()).collect();
        let unit = BigRational::one() / &self.scale_sq;
        for i in 0..n {
            for j in i..n {
                let mut acc = Cyclotomic::zero(self.order);
                for r in 0..n {
                    acc = acc.add(&conj[r * n + i].mul(&self.entries[r * n + j]));
                }
                if i == j {
                    match acc.as_integer() {
                        Some(c) if BigRational::from_integer(c.clone()) == unit => {}
                        _ => return false,
                    }
                } else if !exp_sum_of(&acc).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        let s = match rational_sqrt(&self.scale_sq) {
            Some(r) => big_ratio_to_f64(&r),
            None => big_ratio_to_f64(&self.scale_sq).sqrt(),
        };
        let values = self.entries.iter().map(|e| e.to_complex() * s).collect();
        ComplexMatrix::from_row_major(self.rows, self.cols, values)
            .expect("exact tables convert to finite floats")
    }
}

/// Verification mode for checks that have an exact and a float path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Exact,
    Float { tol: f64 },
}

/// Either carrier, for operations that accept both.
#[derive(Debug, Clone)]
pub enum AnyMatrix {
    Exact(RootTable),
    Float(ComplexMatrix),
}

impl AnyMatrix {
    pub fn to_complex(&self) -> ComplexMatrix {
        match self {
            AnyMatrix::Exact(t) => t.to_complex(),
            AnyMatrix::Float(m) => m.clone(),
        }
    }
}

/// Unitarity check. Exact mode requires an exact carrier; float inputs
/// under exact mode are rejected (false).
pub fn is_unitary(m: &AnyMatrix, mode: Mode) -> bool {
    match (m, mode) {
        (AnyMatrix::Exact(t), Mode::Exact) => t.is_unitary_exact(),
        (AnyMatrix::Exact(t), Mode::Float { tol }) => t.to_complex().is_unitary(tol),
        (AnyMatrix::Float(m), Mode::Float { tol }) => m.is_unitary(tol),
        (AnyMatrix::Float(_), Mode::Exact) => false,
    }
}

/// A square matrix carrying a unitarity certificate, so that negative
/// powers are available as powers of the adjoint.
#[derive(Debug, Clone)]
pub enum UnitaryMatrix {
    Exact(RootTable),
    Float { matrix: ComplexMatrix, tol: f64 },
}

impl UnitaryMatrix {
    pub fn certify_exact(table: RootTable) -> Result<Self> {
        if table.is_unitary_exact() {
            Ok(UnitaryMatrix::Exact(table.normalized()))
        } else {
            Err(Error::NotUnitary)
        }
    }

    pub fn certify_float(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if matrix.is_unitary(tol) {
            Ok(UnitaryMatrix::Float { matrix, tol })
        } else {
            Err(Error::NotUnitary)
        }
    }

    pub fn size(&self) -> usize {
        match self {
            UnitaryMatrix::Exact(t) => t.rows(),
            UnitaryMatrix::Float { matrix, .. } => matrix.rows(),
        }
    }

    /// `M^k` for any integer `k`, with `M^{-1} = M*`.
    pub fn pow(&self, k: i64) -> Self {
        let e = u32::try_from(k.unsigned_abs()).expect("exponent fits in u32");
        match self {
            UnitaryMatrix::Exact(t) => {
                let base = if k < 0 { t.adjoint() } else { t.clone() };
                UnitaryMatrix::Exact(base.pow(e).expect("square"))
            }
            UnitaryMatrix::Float { matrix, tol } => {
                let base = if k < 0 {
                    matrix.adjoint()
                } else {
                    matrix.clone()
                };
                UnitaryMatrix::Float {
                    matrix: base.pow(e).expect("square"),
                    tol: *tol,
                }
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        self.pow(-1)
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        match self {
            UnitaryMatrix::Exact(t) => t.to_complex(),
            UnitaryMatrix::Float { matrix, .. } => matrix.clone(),
        }
    }

    pub fn as_exact(&self) -> Option<&RootTable> {
        match self {
            UnitaryMatrix::Exact(t) => Some(t),
            UnitaryMatrix::Float { .. } => None,
        }
    }
}
