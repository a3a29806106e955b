//! Exact arithmetic in the group ring `Z[C_Q]` mapped onto `Z[ζ_Q]`.
//!
//! An element is stored as a coefficient vector over the exponents
//! `0..Q`, meaning `Σ c_k ζ_Q^k` with `ζ_Q = exp(2πi/Q)`. Equality and
//! zero-testing go through a canonical form: for every prime power
//! `q = p^e` exactly dividing `Q`, the relation
//! `ζ^k (1 + ζ_p + … + ζ_p^{p-1}) = 0` rewrites every exponent whose
//! `q`-coordinate lies in `[φ(q), q)` onto exponents whose coordinate lies
//! in `[0, φ(q))`. The `q`-coordinate of `k` is `k·u mod q`, where `u` is
//! the inverse of `Q/q` modulo `q`, so that `ζ_Q^k = Π ζ_q^{k·u}`. The
//! surviving exponents form the tensor product of the prime-power power
//! bases, which is a `Z`-basis of `Z[ζ_Q]`; hence the reduced vector is
//! zero iff the element is zero.
//!
//! Coefficients live in `i64` with checked arithmetic and are promoted to
//! `BigInt` transparently when an operation would overflow.

use std::f64::consts::TAU;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, ToPrimitive, Zero};

use super::rational::{factorize, mod_inverse};
use crate::error::{Error, Result};

/// `exp(2πi · exponent / order)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    order: u64,
    exponent: u64,
}

impl RootOfUnity {
    pub fn new(order: u64, exponent: i64) -> Self {
        assert!(order >= 1, "root of unity needs a positive order");
        let exponent = (exponent as i128).rem_euclid(order as i128) as u64;
        RootOfUnity { order, exponent }
    }

    pub fn one() -> Self {
        RootOfUnity {
            order: 1,
            exponent: 0,
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Same root written over a multiple of its order.
    pub fn lift(&self, order: u64) -> Result<Self> {
        if !order.is_multiple_of(self.order) {
            return Err(Error::InvalidArgument(format!(
                "cannot lift a root of order {} to order {order}",
                self.order
            )));
        }
        Ok(RootOfUnity {
            order,
            exponent: self.exponent * (order / self.order),
        })
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.lcm(&other.order);
        let a = self.exponent * (order / self.order);
        let b = other.exponent * (order / other.order);
        RootOfUnity::new(order, ((a + b) % order) as i64)
    }

    pub fn pow(&self, k: i64) -> Self {
        let e = (self.exponent as i128 * k as i128).rem_euclid(self.order as i128);
        RootOfUnity::new(self.order, e as i64)
    }

    pub fn conj(&self) -> Self {
        RootOfUnity::new(self.order, -(self.exponent as i64))
    }

    pub fn to_complex(&self) -> Complex64 {
        unit_root(self.exponent, self.order)
    }
}

/// `exp(2πi k/q)` with quarter turns returned exactly.
pub fn unit_root(k: u64, q: u64) -> Complex64 {
    let k = k % q;
    if (4 * k).is_multiple_of(q) {
        return match 4 * k / q {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let angle = TAU * (k as f64) / (q as f64);
    Complex64::new(angle.cos(), angle.sin())
}

trait Coeff: Clone + Zero + PartialEq + CheckedAdd + CheckedSub + CheckedMul {}
impl Coeff for i64 {}
impl Coeff for BigInt {}

#[derive(Debug, Clone)]
enum Coeffs {
    Small(Vec<i64>),
    Big(Vec<BigInt>),
}

impl Coeffs {
    fn len(&self) -> usize {
        match self {
            Coeffs::Small(v) => v.len(),
            Coeffs::Big(v) => v.len(),
        }
    }

    fn to_big(&self) -> Vec<BigInt> {
        match self {
            Coeffs::Small(v) => v.iter().map(|&c| BigInt::from(c)).collect(),
            Coeffs::Big(v) => v.clone(),
        }
    }

    fn demoted(v: Vec<BigInt>) -> Coeffs {
        let small: Option<Vec<i64>> = v.iter().map(|c| c.to_i64()).collect();
        match small {
            Some(s) => Coeffs::Small(s),
            None => Coeffs::Big(v),
        }
    }
}

/// Runs `small` on machine integers and falls back to `big` on overflow.
fn with_fallback(
    parts: &[&Coeffs],
    small: impl FnOnce(&[&[i64]]) -> Option<Vec<i64>>,
    big: impl FnOnce(&[&[BigInt]]) -> Option<Vec<BigInt>>,
) -> Coeffs {
    let all_small: Option<Vec<&[i64]>> = parts
        .iter()
        .map(|c| match c {
            Coeffs::Small(v) => Some(v.as_slice()),
            Coeffs::Big(_) => None,
        })
        .collect();
    if let Some(views) = all_small {
        if let Some(out) = small(&views) {
            return Coeffs::Small(out);
        }
    }
    let owned: Vec<Vec<BigInt>> = parts.iter().map(|c| c.to_big()).collect();
    let views: Vec<&[BigInt]> = owned.iter().map(|v| v.as_slice()).collect();
    Coeffs::Big(big(&views).expect("BigInt arithmetic cannot overflow"))
}

fn add_vec<T: Coeff>(a: &[T], b: &[T], subtract: bool) -> Option<Vec<T>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            if subtract {
                x.checked_sub(y)
            } else {
                x.checked_add(y)
            }
        })
        .collect()
}

fn conv_vec<T: Coeff>(a: &[T], b: &[T]) -> Option<Vec<T>> {
    let q = a.len();
    let mut out = vec![T::zero(); q];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
            let k = (i + j) % q;
            out[k] = out[k].checked_add(&x.checked_mul(y)?)?;
        }
    }
    Some(out)
}

fn scale_vec<T: Coeff>(a: &[T], s: &T) -> Option<Vec<T>> {
    a.iter().map(|x| x.checked_mul(s)).collect()
}

/// One prime-power factor of the order, with what the reduction needs.
#[derive(Debug, Clone, Copy)]
struct PrimeBlock {
    p: u64,
    q: u64,
    u: u64,
    phi: u64,
    step: u64,
}

fn prime_blocks(order: u64) -> Vec<PrimeBlock> {
    factorize(order)
        .into_iter()
        .map(|(p, e)| {
            let q = p.pow(e);
            let u = mod_inverse((order / q) % q, q).expect("cofactor is a unit mod q");
            PrimeBlock {
                p,
                q,
                u,
                phi: q - q / p,
                step: order / p,
            }
        })
        .collect()
}

#[cfg(test)]
fn is_basis_exponent(k: u64, blocks: &[PrimeBlock]) -> bool {
    blocks.iter().all(|b| (k % b.q) * b.u % b.q < b.phi)
}

fn reduce_vec<T: Coeff>(c: &mut [T], blocks: &[PrimeBlock]) -> Option<()> {
    let order = c.len() as u64;
    for b in blocks {
        for k in 0..order {
            let coord = (k % b.q) * b.u % b.q;
            if coord < b.phi || c[k as usize].is_zero() {
                continue;
            }
            let v = std::mem::replace(&mut c[k as usize], T::zero());
            for t in 1..b.p {
                let idx = ((k + order - (t * b.step) % order) % order) as usize;
                c[idx] = c[idx].checked_sub(&v)?;
            }
        }
    }
    Some(())
}

/// Element of `Z[ζ_Q]` for a fixed order `Q`.
#[derive(Debug, Clone)]
pub struct Cyclotomic {
    order: u64,
    coeffs: Coeffs,
}

impl Cyclotomic {
    pub fn zero(order: u64) -> Self {
        assert!(order >= 1);
        Cyclotomic {
            order,
            coeffs: Coeffs::Small(vec![0; order as usize]),
        }
    }

    pub fn one(order: u64) -> Self {
        Self::from_int(order, 1)
    }

    pub fn from_int(order: u64, value: i64) -> Self {
        let mut z = Self::zero(order);
        if let Coeffs::Small(v) = &mut z.coeffs {
            v[0] = value;
        }
        z
    }

    pub fn from_root(root: RootOfUnity) -> Self {
        Self::from_terms(root.order(), [(1, root.exponent() as i64)])
    }

    /// `Σ coeff · ζ_order^exponent`; exponents are taken modulo `order`.
    pub fn from_terms(order: u64, terms: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut small = vec![0i64; order as usize];
        let mut big: Option<Vec<BigInt>> = None;
        for (c, e) in terms {
            let k = (e as i128).rem_euclid(order as i128) as usize;
            match &mut big {
                Some(b) => b[k] += c,
                None => match small[k].checked_add(c) {
                    Some(s) => small[k] = s,
                    None => {
                        let mut b: Vec<BigInt> = small.iter().map(|&x| BigInt::from(x)).collect();
                        b[k] += c;
                        big = Some(b);
                    }
                },
            }
        }
        let coeffs = match big {
            Some(b) => Coeffs::Big(b),
            None => Coeffs::Small(small),
        };
        Cyclotomic { order, coeffs }
    }

    /// Builds an element from explicit big-integer coefficients over `0..order`.
    pub fn from_coefficients(order: u64, coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() as u64 != order || order == 0 {
            return Err(Error::DimensionMismatch(format!(
                "expected {order} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Cyclotomic {
            order,
            coeffs: Coeffs::demoted(coeffs),
        })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coefficients(&self) -> Vec<BigInt> {
        self.coeffs.to_big()
    }

    /// Same element written over a multiple of the order.
    pub fn lift(&self, order: u64) -> Result<Self> {
        if !order.is_multiple_of(self.order) {
            return Err(Error::InvalidArgument(format!(
                "cannot lift order {} to {order}",
                self.order
            )));
        }
        if order == self.order {
            return Ok(self.clone());
        }
        let f = (order / self.order) as usize;
        let coeffs = match &self.coeffs {
            Coeffs::Small(v) => {
                let mut out = vec![0; order as usize];
                for (k, c) in v.iter().enumerate() {
                    out[k * f] = *c;
                }
                Coeffs::Small(out)
            }
            Coeffs::Big(v) => {
                let mut out = vec![BigInt::zero(); order as usize];
                for (k, c) in v.iter().enumerate() {
                    out[k * f] = c.clone();
                }
                Coeffs::Big(out)
            }
        };
        Ok(Cyclotomic { order, coeffs })
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let order = self.order.lcm(&other.order);
        (
            self.lift(order).expect("lcm is a multiple"),
            other.lift(order).expect("lcm is a multiple"),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let coeffs = with_fallback(
            &[&a.coeffs, &b.coeffs],
            |v| add_vec(v[0], v[1], false),
            |v| add_vec(v[0], v[1], false),
        );
        Cyclotomic {
            order: a.order,
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let coeffs = with_fallback(
            &[&a.coeffs, &b.coeffs],
            |v| add_vec(v[0], v[1], true),
            |v| add_vec(v[0], v[1], true),
        );
        Cyclotomic {
            order: a.order,
            coeffs,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let coeffs = with_fallback(
            &[&a.coeffs, &b.coeffs],
            |v| conv_vec(v[0], v[1]),
            |v| conv_vec(v[0], v[1]),
        );
        Cyclotomic {
            order: a.order,
            coeffs,
        }
    }

    pub fn scale(&self, s: i64) -> Self {
        let big_s = BigInt::from(s);
        let coeffs = with_fallback(
            &[&self.coeffs],
            |v| scale_vec(v[0], &s),
            |v| scale_vec(v[0], &big_s),
        );
        Cyclotomic {
            order: self.order,
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    /// Complex conjugate: `ζ^k ↦ ζ^{-k}`.
    pub fn conj(&self) -> Self {
        let q = self.order as usize;
        let coeffs = match &self.coeffs {
            Coeffs::Small(v) => Coeffs::Small((0..q).map(|k| v[(q - k) % q]).collect()),
            Coeffs::Big(v) => Coeffs::Big((0..q).map(|k| v[(q - k) % q].clone()).collect()),
        };
        Cyclotomic {
            order: self.order,
            coeffs,
        }
    }

    /// Canonical representative: coefficients supported on the tensor basis.
    pub fn reduced(&self) -> Self {
        let blocks = prime_blocks(self.order);
        let coeffs = with_fallback(
            &[&self.coeffs],
            |v| {
                let mut c = v[0].to_vec();
                reduce_vec(&mut c, &blocks).map(|_| c)
            },
            |v| {
                let mut c = v[0].to_vec();
                reduce_vec(&mut c, &blocks).map(|_| c)
            },
        );
        let coeffs = match coeffs {
            Coeffs::Big(v) => Coeffs::demoted(v),
            small => small,
        };
        Cyclotomic {
            order: self.order,
            coeffs,
        }
    }

    /// True iff every stored coefficient is zero (no reduction applied).
    fn is_trivially_zero(&self) -> bool {
        match &self.coeffs {
            Coeffs::Small(v) => v.iter().all(|c| *c == 0),
            Coeffs::Big(v) => v.iter().all(|c| c.is_zero()),
        }
    }

    /// Exact test for `Σ c_k ζ^k = 0`.
    pub fn is_zero(&self) -> bool {
        self.is_trivially_zero() || self.reduced().is_trivially_zero()
    }

    /// Exact equality of the represented complex numbers.
    pub fn exact_eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// The element as a rational integer, if it is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        let r = self.reduced();
        let c = r.coeffs.to_big();
        c.iter().skip(1).all(|x| x.is_zero()).then(|| c[0].clone())
    }

    /// The element as a Gaussian integer `re + i·im`, if it is one.
    pub fn as_gaussian(&self) -> Option<(BigInt, BigInt)> {
        if let Some(n) = self.as_integer() {
            return Some((n, BigInt::zero()));
        }
        let approx = self.to_complex();
        if !approx.re.is_finite() || !approx.im.is_finite() {
            return None;
        }
        let re = approx.re.round() as i64;
        let im = approx.im.round() as i64;
        let order = self.order.lcm(&4);
        let candidate = Cyclotomic::from_terms(order, [(re, 0), (im, (order / 4) as i64)]);
        self.exact_eq(&candidate)
            .then(|| (BigInt::from(re), BigInt::from(im)))
    }

    /// Gcd of the absolute values of the coefficients (zero for zero).
    pub fn content(&self) -> BigInt {
        self.coeffs
            .to_big()
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides every coefficient by `d`, which must divide all of them.
    pub fn div_exact(&self, d: &BigInt) -> Self {
        let v: Vec<BigInt> = self
            .coeffs
            .to_big()
            .into_iter()
            .map(|c| {
                debug_assert!((&c % d).is_zero());
                c / d
            })
            .collect();
        Cyclotomic {
            order: self.order,
            coeffs: Coeffs::demoted(v),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let q = self.order;
        let mut acc = Complex64::new(0.0, 0.0);
        match &self.coeffs {
            Coeffs::Small(v) => {
                for (k, c) in v.iter().enumerate().filter(|(_, c)| **c != 0) {
                    acc += unit_root(k as u64, q) * (*c as f64);
                }
            }
            Coeffs::Big(v) => {
                for (k, c) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                    let c = c.to_f64().unwrap_or(f64::INFINITY);
                    acc += unit_root(k as u64, q) * c;
                }
            }
        }
        acc
    }

    /// Number of stored coefficients (the order).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        self.exact_eq(other)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.reduced();
        let mut first = true;
        for (k, c) in r.coeffs.to_big().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}·ζ{}^{k}", self.order)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Exact part of an exponential sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactSum {
    /// The sum equals `re + i·im` with integer components.
    Gaussian { re: BigInt, im: BigInt },
    /// The sum is not a Gaussian integer; only the float value is available.
    Irrational,
}

/// Result of [`exp_sum`]: an exact verdict plus an advisory float value.
#[derive(Debug, Clone)]
pub struct ExpSum {
    pub value: Complex64,
    pub exact: ExactSum,
    zero: bool,
}

impl ExpSum {
    /// Exact vanishing verdict.
    pub fn is_zero(&self) -> bool {
        self.zero
    }
}

/// Evaluates `Σ c_j · root_j` exactly, lifting all roots to the lcm order.
pub fn exp_sum(terms: &[(i64, RootOfUnity)]) -> ExpSum {
    let order = terms.iter().fold(1u64, |acc, (_, r)| acc.lcm(&r.order()));
    let element = Cyclotomic::from_terms(
        order,
        terms.iter().map(|(c, r)| {
            let lifted = r.lift(order).expect("lcm is a multiple");
            (*c, lifted.exponent() as i64)
        }),
    );
    exp_sum_of(&element)
}

/// Same as [`exp_sum`] for an already-assembled element.
pub fn exp_sum_of(element: &Cyclotomic) -> ExpSum {
    let zero = element.is_zero();
    let exact = if zero {
        ExactSum::Gaussian {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    } else {
        match element.as_gaussian() {
            Some((re, im)) => ExactSum::Gaussian { re, im },
            None => ExactSum::Irrational,
        }
    };
    ExpSum {
        value: if zero {
            Complex64::new(0.0, 0.0)
        } else {
            element.to_complex()
        },
        exact,
        zero,
    }
}

/// Exact test that `Σ_{x ∈ xs} ζ_order^{shift·x}` vanishes.
///
/// This is the inner loop of every orthogonality check, so it skips the
/// general term list.
pub fn character_sum_vanishes(xs: &[i64], shift: u64, order: u64) -> bool {
    let q = order as i128;
    let element = Cyclotomic::from_terms(
        order,
        xs.iter()
            .map(|&x| (1, ((shift as i128 * x as i128).rem_euclid(q)) as i64)),
    );
    element.is_zero()
}

#[cfg(test)]
pub(crate) fn is_basis(k: u64, order: u64) -> bool {
    is_basis_exponent(k, &prime_blocks(order))
}
