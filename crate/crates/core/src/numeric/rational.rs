//! Small helpers around `Ratio<i64>` and machine-integer number theory.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Exact rational number in lowest terms with a positive denominator.
pub type Rational = Ratio<i64>;

/// Representative of `q` modulo 1 in `[0, 1)`.
pub fn frac_mod1(q: &Rational) -> Rational {
    let den = *q.denom();
    Rational::new(q.numer().rem_euclid(den), den)
}

/// Parses `"p/q"`, `"p"` or `"-p/q"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse rational {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (
            n.trim().parse::<i64>().map_err(|_| bad())?,
            d.trim().parse::<i64>().map_err(|_| bad())?,
        ),
        None => (s.parse::<i64>().map_err(|_| bad())?, 1),
    };
    if den == 0 {
        return Err(Error::InvalidArgument(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Formats a rational as `"p/q"`, or `"p"` when it is an integer.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Least common multiple of the denominators; 1 for an empty input.
pub fn lcm_denominators<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> i64 {
    qs.into_iter().fold(1i64, |acc, q| acc.lcm(q.denom()))
}

/// Largest rational `r` with every input in `r * Z`; zero inputs are skipped.
/// Returns `None` when every input is zero.
pub fn rational_gcd<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> Option<Rational> {
    let mut num = 0i64;
    let mut den = 1i64;
    let mut any = false;
    for q in qs.into_iter().filter(|q| !q.is_zero()) {
        any = true;
        num = num.gcd(q.numer());
        den = den.lcm(q.denom());
    }
    any.then(|| Rational::new(num.abs(), den))
}

/// Prime factorization by trial division, as `(p, e)` pairs in increasing `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Inverse of `a` modulo `m` (`m >= 1`), if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let ext = (a as i128 % m as i128).extended_gcd(&(m as i128));
    (ext.gcd == 1).then(|| ext.x.rem_euclid(m as i128) as u64)
}

/// `(r * x) mod 1` expressed as an exponent over denominator `order`,
/// i.e. the `k` in `[0, order)` with `r * x ≡ k / order (mod 1)`.
/// `order` must be a multiple of the denominator of `r`.
pub fn exponent_mod(r: &Rational, x: i64, order: u64) -> u64 {
    let den = *r.denom() as i128;
    debug_assert!(order as i128 % den == 0);
    let scale = order as i128 / den;
    let k = (*r.numer() as i128) * (x as i128) * scale;
    k.rem_euclid(order as i128) as u64
}

/// Multiplicity of the prime (or integer) `base` in `n`; `n` must be nonzero.
pub fn valuation(mut n: i64, base: i64) -> u32 {
    debug_assert!(n != 0 && base >= 2);
    n = n.abs();
    let mut v = 0;
    while n % base == 0 {
        n /= base;
        v += 1;
    }
    v
}
