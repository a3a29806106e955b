//! Local translation matrices `B = F* D_Γ(1) F`, the groups
//! `U_Γ(t) = F* D_Γ(t) F`, and recovery of a spectrum from the
//! eigenvalues of `B`.

use std::collections::HashMap;
use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{CheckedMul, One, ToPrimitive};

use crate::error::{Error, Result};
use crate::numeric::{
    exponent_mod, frac_mod1, AnyMatrix, ComplexMatrix, Cyclotomic, Rational, RootTable,
    UnitaryMatrix, DEFAULT_TOL,
};
use crate::spectra::{first_nonorthogonal, fourier_matrix, rational_to_f64, IntSet, Spectrum};

/// Eigenvalues closer than this on the unit circle count as repeated.
pub const DEGENERACY_GAP: f64 = 1e-6;

/// Largest denominator tried when reading a rational off an eigenvalue phase.
pub const MAX_PHASE_DENOMINATOR: i64 = 1 << 20;

const SNAP_TOL: f64 = 1e-9;

/// A unitary matrix on `l²(A)`, optionally with the spectrum it was built from.
#[derive(Debug, Clone)]
pub struct LocalTranslationMatrix {
    b: UnitaryMatrix,
    a: IntSet,
    gamma: Option<Spectrum>,
}

impl LocalTranslationMatrix {
    /// Wraps an arbitrary matrix after checking it is unitary. The local
    /// translation identities are not checked here; see
    /// [`verify_local_translation`].
    pub fn from_matrix(a: IntSet, m: AnyMatrix, tol: f64) -> Result<Self> {
        let size = m.to_complex();
        if size.rows() != a.len() || size.cols() != a.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a set of size {}",
                size.rows(),
                size.cols(),
                a.len()
            )));
        }
        let b = match m {
            AnyMatrix::Exact(t) => UnitaryMatrix::certify_exact(t)?,
            AnyMatrix::Float(m) => UnitaryMatrix::certify_float(m, tol)?,
        };
        Ok(LocalTranslationMatrix { b, a, gamma: None })
    }

    pub fn matrix(&self) -> &UnitaryMatrix {
        &self.b
    }

    /// The exact table, when the matrix has one.
    pub fn table(&self) -> Option<&RootTable> {
        self.b.as_exact()
    }

    pub fn set(&self) -> &IntSet {
        &self.a
    }

    pub fn gamma(&self) -> Option<&Spectrum> {
        self.gamma.as_ref()
    }

    /// `B^m` for any integer `m`.
    pub fn power(&self, m: i64) -> UnitaryMatrix {
        self.b.pow(m)
    }
}

fn require_spectrum(a: &IntSet, g: &Spectrum) -> Result<()> {
    if a.len() != g.len() {
        return Err(Error::SizeMismatch {
            set: a.len(),
            spectrum: g.len(),
        });
    }
    match first_nonorthogonal(a, g.elements()) {
        Some((x, y)) => Err(Error::NotASpectrum(x, y)),
        None => Ok(()),
    }
}

/// `D_Γ(t)` exactly, for rational `t`.
pub fn diagonal_modulation(g: &Spectrum, t: &Rational) -> Result<RootTable> {
    let n = g.len();
    let phases: Vec<Rational> = g
        .elements()
        .iter()
        .map(|l| l.checked_mul(t).ok_or(Error::Overflow("modulation phase")))
        .collect::<Result<_>>()?;
    let order = phases.iter().fold(1i64, |acc, p| acc.lcm(p.denom())) as u64;
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(if i == j {
                Cyclotomic::from_terms(order, [(1, exponent_mod(&phases[i], 1, order) as i64)])
            } else {
                Cyclotomic::zero(order)
            });
        }
    }
    RootTable::with_scale_sq(n, n, order, entries, BigRational::one())
}

/// Closed form `B_{xx′} = (1/N) Σ_λ e^{2πi(x − x′ + 1)λ}`.
fn closed_form(a: &IntSet, g: &Spectrum) -> Result<RootTable> {
    let n = a.len();
    let order = g.denominator_lcm() as u64;
    let mut entries = Vec::with_capacity(n * n);
    for &x in a.elements() {
        for &y in a.elements() {
            entries.push(Cyclotomic::from_terms(
                order,
                g.elements()
                    .iter()
                    .map(|l| (1, exponent_mod(l, x - y + 1, order) as i64)),
            ));
        }
    }
    let n2 = BigInt::from(n) * BigInt::from(n);
    RootTable::with_scale_sq(n, n, order, entries, BigRational::new(One::one(), n2))
}

/// The local translation matrix `B = U_Γ(1)` of a spectral pair.
pub fn local_translation_matrix(a: &IntSet, g: &Spectrum) -> Result<LocalTranslationMatrix> {
    require_spectrum(a, g)?;
    let b = local_group_exact(a, g, &Rational::one())?;
    if !b.exact_eq(&closed_form(a, g)?)? {
        return Err(Error::Internal(
            "F*DF differs from the entrywise formula".into(),
        ));
    }
    Ok(LocalTranslationMatrix {
        b: UnitaryMatrix::certify_exact(b)?,
        a: a.clone(),
        gamma: Some(g.clone()),
    })
}

/// `U_Γ(t) = F* D_Γ(t) F` exactly, for rational `t`.
pub fn local_group_exact(a: &IntSet, g: &Spectrum, t: &Rational) -> Result<RootTable> {
    require_spectrum(a, g)?;
    let f = fourier_matrix(a, g)?;
    let d = diagonal_modulation(g, t)?;
    f.adjoint().mul(&d)?.mul(&f)
}

/// `U_Γ(t)` in floating point, entrywise `(1/N) Σ_λ e^{2πiλ(x − x′ + t)}`.
pub fn local_group(a: &IntSet, g: &Spectrum, t: f64) -> Result<ComplexMatrix> {
    require_spectrum(a, g)?;
    let n = a.len();
    let lambdas: Vec<f64> = g.elements().iter().map(rational_to_f64).collect();
    let mut entries = Vec::with_capacity(n * n);
    for &x in a.elements() {
        for &y in a.elements() {
            let s: Complex64 = lambdas
                .iter()
                .map(|l| Complex64::from_polar(1.0, TAU * l * ((x - y) as f64 + t)))
                .sum();
            entries.push(s / n as f64);
        }
    }
    ComplexMatrix::from_row_major(n, n, entries)
}

/// Outcome of [`verify_local_translation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranslationCheck {
    pub holds: bool,
    /// First ordered pair `(x, x′)` with `B^{x−x′} δ_x ≠ δ_{x′}`.
    pub witness: Option<(i64, i64)>,
}

/// Checks `B^{x − x′} δ_x = δ_{x′}` for all ordered pairs of the set.
///
/// Exact matrices are checked symbolically; float matrices against their
/// certification tolerance.
pub fn verify_local_translation(b: &LocalTranslationMatrix) -> TranslationCheck {
    let xs = b.a.elements();
    let mut powers: HashMap<i64, UnitaryMatrix> = HashMap::new();
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            let m = x - y;
            let p = powers.entry(m).or_insert_with(|| b.b.pow(m));
            if !column_is_canonical(p, i, j) {
                return TranslationCheck {
                    holds: false,
                    witness: Some((x, y)),
                };
            }
        }
    }
    TranslationCheck {
        holds: true,
        witness: None,
    }
}

fn column_is_canonical(m: &UnitaryMatrix, col: usize, row: usize) -> bool {
    match m {
        UnitaryMatrix::Exact(t) => t.column_is_canonical(col, row),
        UnitaryMatrix::Float { matrix, tol } => (0..matrix.rows()).all(|r| {
            let target = if r == row { 1.0 } else { 0.0 };
            (matrix.get(r, col) - target).norm() <= *tol
        }),
    }
}

/// For each `λ ∈ Γ`, whether `(e^{2πiλx})_{x∈A}` is an eigenvector of `B`
/// with eigenvalue `e^{2πiλ}`.
pub fn eigencheck(b: &LocalTranslationMatrix) -> Result<Vec<(Rational, bool)>> {
    let g = b
        .gamma
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("matrix carries no spectrum".into()))?;
    let xs = b.a.elements();
    g.elements()
        .iter()
        .map(|l| {
            let ok = match &b.b {
                UnitaryMatrix::Exact(t) => exact_eigenvector(t, xs, l)?,
                UnitaryMatrix::Float { matrix, tol } => {
                    let lf = rational_to_f64(l);
                    let v: Vec<Complex64> = xs
                        .iter()
                        .map(|&x| Complex64::from_polar(1.0, TAU * lf * x as f64))
                        .collect();
                    let w = matrix.mul_vec(&v);
                    let e = Complex64::from_polar(1.0, TAU * lf);
                    w.iter()
                        .zip(&v)
                        .all(|(wi, vi)| (wi - e * vi).norm() <= *tol)
                }
            };
            Ok((frac_mod1(l), ok))
        })
        .collect()
}

fn exact_eigenvector(t: &RootTable, xs: &[i64], l: &Rational) -> Result<bool> {
    let order = t.order().lcm(&(*l.denom() as u64));
    let t = t.lift(order)?;
    let scale = t
        .rational_scale()
        .ok_or_else(|| Error::Internal("local translation matrix with irrational scale".into()))?;
    let p = scale
        .numer()
        .to_i64()
        .ok_or(Error::Overflow("eigencheck scale"))?;
    let q = scale
        .denom()
        .to_i64()
        .ok_or(Error::Overflow("eigencheck scale"))?;
    let v: Vec<Cyclotomic> = xs
        .iter()
        .map(|&x| Cyclotomic::from_terms(order, [(1, exponent_mod(l, x, order) as i64)]))
        .collect();
    let e = Cyclotomic::from_terms(order, [(1, exponent_mod(l, 1, order) as i64)]);
    for i in 0..xs.len() {
        let mut acc = Cyclotomic::zero(order);
        for (j, vj) in v.iter().enumerate() {
            acc = acc.add(&t.entry(i, j).mul(vj));
        }
        let lhs = acc.scale(p);
        let rhs = e.mul(&v[i]).scale(q);
        if !lhs.exact_eq(&rhs) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Best rational approximation of `x` by continued fractions, returning the
/// first convergent within `tol`.
fn snap_phase(x: f64, max_den: i64, tol: f64) -> Option<Rational> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            return None;
        }
        if (x - h2 as f64 / k2 as f64).abs() <= tol {
            return Some(Rational::new(h2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = y - a;
        if frac.abs() < f64::EPSILON {
            return None;
        }
        y = 1.0 / frac;
    }
    None
}

/// Recovers `Γ` from a unitary local translation matrix on `A`.
///
/// Eigenvalue phases are read as rationals by continued fractions, the
/// resulting `Γ` is certified to be a spectrum of `A`, and the matrix
/// rebuilt from `Γ` is compared with the input (exactly for exact inputs,
/// within tolerance for float inputs).
pub fn spectrum_from_matrix(m: &AnyMatrix, a: &IntSet) -> Result<Spectrum> {
    let ltm = LocalTranslationMatrix::from_matrix(a.clone(), m.clone(), DEFAULT_TOL)?;
    let check = verify_local_translation(&ltm);
    if let Some((from, to)) = check.witness {
        return Err(Error::NotLocalTranslation { from, to });
    }
    let mut phases: Vec<f64> = ltm
        .b
        .to_complex()
        .eigenvalues()?
        .into_iter()
        .map(|z| (z.arg() / TAU).rem_euclid(1.0))
        .collect();
    phases.sort_by(f64::total_cmp);
    let n = phases.len();
    for i in 0..n {
        let next = if i + 1 < n {
            phases[i + 1]
        } else {
            phases[0] + 1.0
        };
        if n > 1 && next - phases[i] < DEGENERACY_GAP {
            return Err(Error::DegenerateEigenvalue(phases[i]));
        }
    }
    let lambdas = phases
        .iter()
        .map(|&p| {
            snap_phase(p, MAX_PHASE_DENOMINATOR, SNAP_TOL)
                .map(|q| frac_mod1(&q))
                .ok_or(Error::UnsnappableEigenvalue {
                    phase: p,
                    order: MAX_PHASE_DENOMINATOR as u64,
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let g = Spectrum::new(lambdas.clone()).map_err(|_| Error::DegenerateEigenvalue(phases[0]))?;
    if let Some((x, y)) = first_nonorthogonal(a, g.elements()) {
        return Err(Error::Internal(format!(
            "recovered frequencies {x} and {y} are not orthogonal"
        )));
    }
    let rebuilt = local_translation_matrix(a, &g)?;
    let same = match m {
        AnyMatrix::Exact(t) => rebuilt.table().expect("exact").exact_eq(t)?,
        AnyMatrix::Float(f) => rebuilt.b.to_complex().max_abs_diff(f) <= DEFAULT_TOL,
    };
    if !same {
        return Err(Error::Internal(
            "matrix rebuilt from recovered spectrum differs".into(),
        ));
    }
    Ok(g)
}

/// The local translation matrix of `(d·A, (1/d)·Γ)`, checked to satisfy
/// `B_{Γ/d}^d = B_Γ` exactly.
pub fn rescale(b: &LocalTranslationMatrix, d: i64) -> Result<LocalTranslationMatrix> {
    let g = b
        .gamma
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("matrix carries no spectrum".into()))?;
    if d < 1 {
        return Err(Error::InvalidArgument(format!(
            "factor {d} must be positive"
        )));
    }
    let out = local_translation_matrix(&b.a.dilate(d)?, &g.shrink(d)?)?;
    let lhs = out.table().expect("exact").pow(d as u32)?;
    let rhs = match &b.b {
        UnitaryMatrix::Exact(t) => t.clone(),
        UnitaryMatrix::Float { .. } => local_translation_matrix(&b.a, g)?
            .table()
            .expect("exact")
            .clone(),
    };
    if !lhs.exact_eq(&rhs)? {
        return Err(Error::Internal(
            "d-th power of the rescaled matrix differs".into(),
        ));
    }
    Ok(out)
}
