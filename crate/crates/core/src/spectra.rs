//! Integer sets, candidate spectra, the Hadamard-pair test and an
//! exhaustive spectrum search over a fixed denominator.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{
    character_sum_vanishes, exponent_mod, format_rational, frac_mod1, lcm_denominators,
    parse_rational, Cyclotomic, Mode, Rational, RootTable,
};

/// A nonempty finite set of integers, stored strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct IntSet(Vec<i64>);

impl TryFrom<Vec<i64>> for IntSet {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        IntSet::new(v)
    }
}

impl From<IntSet> for Vec<i64> {
    fn from(a: IntSet) -> Self {
        a.0
    }
}

impl IntSet {
    /// Sorts the input; duplicates and the empty set are rejected.
    pub fn new(mut elements: Vec<i64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidSet("set is empty".into()));
        }
        elements.sort_unstable();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidSet(format!("duplicate element {}", w[0])));
        }
        Ok(IntSet(elements))
    }

    pub fn elements(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    /// Position of `x` in sorted order.
    pub fn index_of(&self, x: i64) -> Option<usize> {
        self.0.binary_search(&x).ok()
    }

    pub fn translate(&self, c: i64) -> Self {
        IntSet(self.0.iter().map(|x| x + c).collect())
    }

    /// `d·A` for `d ≥ 1`.
    pub fn dilate(&self, d: i64) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidArgument(format!(
                "dilation factor {d} must be positive"
            )));
        }
        let v = self
            .0
            .iter()
            .map(|x| x.checked_mul(d).ok_or(Error::Overflow("set dilation")))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntSet(v))
    }
}

impl fmt::Display for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromStr for IntSet {
    type Err = Error;

    /// Comma separated integers, optionally wrapped in braces or brackets.
    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .trim_matches(|c| matches!(c, '{' | '}' | '[' | ']'));
        let v = body
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| {
                p.parse::<i64>()
                    .map_err(|_| Error::InvalidSet(format!("cannot parse integer {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        IntSet::new(v)
    }
}

/// A finite set of rational frequencies, pairwise distinct modulo 1.
///
/// [`Spectrum::new`] reduces every element into `[0, 1)`. [`Spectrum::raw`]
/// keeps the given representatives, which matters for the interpolating
/// group `U_Γ(t)` at non-integer `t` and for the minimal lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Spectrum(Vec<Rational>);

impl Spectrum {
    pub fn new(elements: Vec<Rational>) -> Result<Self> {
        Self::raw(elements.iter().map(frac_mod1).collect())
    }

    pub fn raw(mut elements: Vec<Rational>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidSpectrum("spectrum is empty".into()));
        }
        elements.sort();
        let mut classes: Vec<Rational> = elements.iter().map(frac_mod1).collect();
        classes.sort();
        if let Some(w) = classes.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidSpectrum(format!(
                "two elements congruent to {} modulo 1",
                format_rational(&w[0])
            )));
        }
        Ok(Spectrum(elements))
    }

    /// `{k / r : k ∈ ks}` reduced modulo 1.
    pub fn from_numerators(ks: &[i64], r: i64) -> Result<Self> {
        if r < 1 {
            return Err(Error::InvalidArgument(format!(
                "denominator {r} must be positive"
            )));
        }
        Self::new(ks.iter().map(|&k| Rational::new(k, r)).collect())
    }

    pub fn elements(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains_zero(&self) -> bool {
        self.0.iter().any(Zero::is_zero)
    }

    /// Whether every element already lies in `[0, 1)`.
    pub fn is_canonical(&self) -> bool {
        self.0.iter().all(|q| frac_mod1(q) == *q)
    }

    /// The same classes with `[0, 1)` representatives.
    pub fn canonical(&self) -> Self {
        Spectrum::new(self.0.clone()).expect("classes stay distinct")
    }

    /// Least common multiple of the denominators.
    pub fn denominator_lcm(&self) -> i64 {
        lcm_denominators(&self.0)
    }

    /// `Γ + q`, keeping representatives.
    pub fn shift(&self, q: Rational) -> Self {
        Spectrum::raw(self.0.iter().map(|x| x + q).collect()).expect("shift preserves classes")
    }

    /// `(1/d)·Γ`, keeping representatives.
    pub fn shrink(&self, d: i64) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidArgument(format!(
                "factor {d} must be positive"
            )));
        }
        Spectrum::raw(self.0.iter().map(|x| x / d).collect())
    }
}

impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromStr for Spectrum {
    type Err = Error;

    /// Comma separated rationals such as `0,1/8,1/2,5/8`, reduced modulo 1.
    /// A leading `raw:` keeps the representatives as written.
    fn from_str(s: &str) -> Result<Self> {
        let (raw, body) = match s.trim().strip_prefix("raw:") {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let body = body
            .trim()
            .trim_matches(|c| matches!(c, '{' | '}' | '[' | ']'));
        let v = body
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| {
                parse_rational(p).map_err(|_| Error::InvalidSpectrum(format!("cannot parse {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if raw {
            Spectrum::raw(v)
        } else {
            Spectrum::new(v)
        }
    }
}

/// Whether `Σ_{x ∈ a} e^{2πi·δ·x}` vanishes, exactly.
pub fn orthogonal(a: &IntSet, delta: &Rational) -> bool {
    let order = *delta.denom() as u64;
    let shift = exponent_mod(delta, 1, order);
    character_sum_vanishes(a.elements(), shift, order)
}

/// First pair of frequencies whose exponentials are not orthogonal on `a`.
pub fn first_nonorthogonal(a: &IntSet, freqs: &[Rational]) -> Option<(Rational, Rational)> {
    for (i, l) in freqs.iter().enumerate() {
        for m in &freqs[i + 1..] {
            if !orthogonal(a, &(l - m)) {
                return Some((*l, *m));
            }
        }
    }
    None
}

/// Hadamard-pair test: `|a| = |g|` and all distinct exponentials orthogonal.
///
/// The exact mode decides each sum symbolically. The float mode compares
/// `|Σ e^{2πi(λ−λ′)x}|` with `tol`.
pub fn is_spectrum(a: &IntSet, g: &Spectrum, mode: Mode) -> bool {
    if a.len() != g.len() {
        return false;
    }
    match mode {
        Mode::Exact => first_nonorthogonal(a, g.elements()).is_none(),
        Mode::Float { tol } => {
            let real: Vec<f64> = g.elements().iter().map(rational_to_f64).collect();
            is_spectrum_real(a, &real, tol)
        }
    }
}

/// Float-only test for arbitrary real frequencies. Not a certificate.
pub fn is_spectrum_real(a: &IntSet, g: &[f64], tol: f64) -> bool {
    if a.len() != g.len() {
        return false;
    }
    for (i, l) in g.iter().enumerate() {
        for m in &g[i + 1..] {
            let s: num_complex::Complex64 = a
                .elements()
                .iter()
                .map(|&x| {
                    num_complex::Complex64::from_polar(
                        1.0,
                        std::f64::consts::TAU * (l - m) * x as f64,
                    )
                })
                .sum();
            if s.norm() > tol {
                return false;
            }
        }
    }
    true
}

pub(crate) fn rational_to_f64(q: &Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// `F[λ][x] = N^{-1/2} e^{−2πiλx}`, rows by sorted `g`, columns by sorted `a`.
pub fn fourier_matrix(a: &IntSet, g: &Spectrum) -> Result<RootTable> {
    let n = a.len();
    if g.len() != n {
        return Err(Error::SizeMismatch {
            set: n,
            spectrum: g.len(),
        });
    }
    let order = g.denominator_lcm() as u64;
    let mut entries = Vec::with_capacity(n * n);
    for l in g.elements() {
        for &x in a.elements() {
            let k = exponent_mod(l, x, order) as i64;
            entries.push(Cyclotomic::from_terms(order, [(1, -k)]));
        }
    }
    RootTable::with_scale_sq(
        n,
        n,
        order,
        entries,
        BigRational::new(One::one(), (n as i64).into()),
    )
}

/// All spectra `Γ ⊂ (1/r)Z ∩ [0, 1)` of `a` with `0 ∈ Γ`, in lexicographic
/// order of their sorted numerators.
///
/// Only denominator `r` is searched; callers sweep `r` themselves. Since no
/// general bound on the denominators of spectra is known, an empty result
/// says nothing about other denominators.
pub fn search_spectra(a: &IntSet, r: u64) -> Vec<Spectrum> {
    assert!(r >= 1, "denominator must be positive");
    let n = a.len();
    // zero[δ]: e_{δ/r} is orthogonal to e_0 on a. Orthogonality of two
    // candidates depends only on their difference.
    let zero: Vec<bool> = (0..r)
        .map(|delta| delta != 0 && character_sum_vanishes(a.elements(), delta, r))
        .collect();
    if n == 1 {
        return vec![Spectrum::from_numerators(&[0], 1).expect("nonempty")];
    }
    let first: Vec<u64> = (1..r).filter(|&k| zero[k as usize]).collect();
    let mut found: Vec<Vec<u64>> = first
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, &k)| {
            let mut out = Vec::new();
            let mut chosen = vec![0, k];
            extend_clique(&zero, r, &first[i + 1..], n, &mut chosen, &mut out);
            out
        })
        .collect();
    found.sort();
    found
        .into_iter()
        .map(|ks| {
            let ks: Vec<i64> = ks.into_iter().map(|k| k as i64).collect();
            Spectrum::from_numerators(&ks, r as i64).expect("distinct numerators")
        })
        .collect()
}

fn extend_clique(
    zero: &[bool],
    r: u64,
    candidates: &[u64],
    n: usize,
    chosen: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
) {
    if chosen.len() == n {
        out.push(chosen.clone());
        return;
    }
    let need = n - chosen.len();
    for (i, &k) in candidates.iter().enumerate() {
        if candidates.len() - i < need {
            break;
        }
        if chosen[1..]
            .iter()
            .all(|&c| zero[((k + r - c) % r) as usize])
        {
            chosen.push(k);
            extend_clique(zero, r, &candidates[i + 1..], n, chosen, out);
            chosen.pop();
        }
    }
}

/// Smallest denominator `r ≤ max_r` admitting a spectrum, with the first
/// spectrum found there.
pub fn find_spectrum(a: &IntSet, max_r: u64) -> Option<(u64, Spectrum)> {
    (1..=max_r).find_map(|r| search_spectra(a, r).into_iter().next().map(|g| (r, g)))
}

/// Integer sets `A`, `L` with `(1/R)·L` a spectrum for `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HadamardPair {
    a: IntSet,
    l: IntSet,
    r: i64,
}

impl HadamardPair {
    pub fn a(&self) -> &IntSet {
        &self.a
    }

    pub fn l(&self) -> &IntSet {
        &self.l
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    /// `(1/R)·L` as a spectrum, keeping the representatives `l/R`.
    pub fn spectrum(&self) -> Spectrum {
        Spectrum::raw(
            self.l
                .elements()
                .iter()
                .map(|&x| Rational::new(x, self.r))
                .collect(),
        )
        .expect("verified on construction")
    }
}

pub fn make_hadamard_pair(a: IntSet, l: IntSet, r: i64) -> Result<HadamardPair> {
    if r < 1 {
        return Err(Error::InvalidArgument(format!(
            "scaling factor {r} must be positive"
        )));
    }
    if a.len() != l.len() {
        return Err(Error::SizeMismatch {
            set: a.len(),
            spectrum: l.len(),
        });
    }
    let freqs: Vec<Rational> = l.elements().iter().map(|&x| Rational::new(x, r)).collect();
    if let Some((x, y)) = first_nonorthogonal(&a, &freqs) {
        return Err(Error::NotAHadamardPair(x, y));
    }
    Ok(HadamardPair { a, l, r })
}

/// Greatest common divisor of the elements of a set.
pub(crate) fn set_gcd(a: &IntSet) -> i64 {
    a.elements().iter().fold(0i64, |g, x| g.gcd(x))
}
