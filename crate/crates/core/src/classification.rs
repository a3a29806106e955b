//! Spectral sets of size 2, 3 and 5, the 2-adic parametrization of
//! Hadamard pairs of size 4, and a spectral-versus-tile comparison on
//! cyclic groups.

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{valuation, Mode, Rational};
use crate::spectra::{
    find_spectrum, first_nonorthogonal, is_spectrum, search_spectra, set_gcd, IntSet, Spectrum,
};
use crate::tiling::find_complement_mod;

/// Verdict of [`classify_small`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallVerdict {
    pub spectral: bool,
    /// Largest `k` with `N^k` dividing every element.
    pub k: u32,
    /// `A / N^k`.
    pub reduced: IntSet,
    /// `{j / N^{k+1} : 0 ≤ j < N}` when spectral.
    pub witness: Option<Spectrum>,
    /// Denominators `1..=sweep_bound` were searched without success when
    /// the verdict is negative.
    pub sweep_bound: u64,
}

/// Decides spectrality of a set of size 2, 3 or 5 containing 0.
///
/// `A` is spectral iff `A = N^k·A₀` with `A₀` a complete residue system
/// modulo `N`. A positive verdict is certified by its witness. A negative
/// verdict rests on the classification of Hadamard matrices of prime size
/// and is cross-checked by a denominator sweep up to `N^{k+2}`.
pub fn classify_small(a: &IntSet) -> Result<SmallVerdict> {
    let n = a.len();
    if ![2, 3, 5].contains(&n) {
        return Err(Error::UnsupportedCardinality(n));
    }
    if !a.contains(0) {
        return Err(Error::HypothesisViolation("0 is not in the set".into()));
    }
    let base = n as i64;
    let k = valuation(set_gcd(a), base);
    let scale = base.pow(k);
    let reduced = IntSet::new(a.elements().iter().map(|x| x / scale).collect())?;
    let mut residues: Vec<i64> = reduced
        .elements()
        .iter()
        .map(|x| x.rem_euclid(base))
        .collect();
    residues.sort_unstable();
    residues.dedup();
    let spectral = residues.len() == n;
    let sweep_bound = (base as u64).pow(k + 2);
    if spectral {
        let witness = Spectrum::from_numerators(&(0..base).collect::<Vec<_>>(), scale * base)?;
        if !is_spectrum(a, &witness, Mode::Exact) {
            return Err(Error::Internal(format!("witness {witness} fails for {a}")));
        }
        Ok(SmallVerdict {
            spectral,
            k,
            reduced,
            witness: Some(witness),
            sweep_bound,
        })
    } else {
        if let Some((r, g)) = find_spectrum(a, sweep_bound) {
            return Err(Error::Internal(format!(
                "{a} classified non-spectral but {g} (denominator {r}) is a spectrum"
            )));
        }
        Ok(SmallVerdict {
            spectral,
            k,
            reduced,
            witness: None,
            sweep_bound,
        })
    }
}

/// Parameters of a size-4 Hadamard pair
/// `A = 2^C·{0, 2^α c₁, c₂, c₂ + 2^α c₃}`, `L = 2^M·{0, n₁, n₁ + 2^α n₂, 2^α n₃}`,
/// `R = 2^{C+M+α+1}·d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct N4Params {
    #[serde(rename = "C")]
    pub c_exp: u32,
    #[serde(rename = "M")]
    pub m_exp: u32,
    pub alpha: u32,
    pub c1: i64,
    pub c2: i64,
    pub c3: i64,
    pub n1: i64,
    pub n2: i64,
    pub n3: i64,
    pub d: i64,
}

impl N4Params {
    /// The sets and scaling factor described by the parameters.
    pub fn realize(&self) -> Result<(IntSet, IntSet, i64)> {
        let p = 1i64 << self.alpha;
        let sc = 1i64 << self.c_exp;
        let sm = 1i64 << self.m_exp;
        let a = IntSet::new(vec![
            0,
            sc * p * self.c1,
            sc * self.c2,
            sc * (self.c2 + p * self.c3),
        ])?;
        let l = IntSet::new(vec![
            0,
            sm * self.n1,
            sm * (self.n1 + p * self.n2),
            sm * p * self.n3,
        ])?;
        let r = (1i64 << (self.c_exp + self.m_exp + self.alpha + 1)) * self.d;
        Ok((a, l, r))
    }

    /// Oddness of the `c_i`, `n_i` and the divisibility conditions on `d`.
    pub fn satisfies_constraints(&self) -> bool {
        let odd = [self.c1, self.c2, self.c3, self.n1, self.n2, self.n3]
            .iter()
            .all(|x| x.rem_euclid(2) == 1);
        let c = self.c1.gcd(&self.c2).gcd(&self.c3);
        let n = self.n1.gcd(&self.n2).gcd(&self.n3);
        odd && self.alpha >= 1
            && self.d >= 1
            && [self.c1 * n, self.c3 * n, self.n2 * c, self.n3 * c]
                .iter()
                .all(|x| x % self.d == 0)
    }
}

/// Outcome of [`match_n4`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", content = "params", rename_all = "snake_case")]
pub enum N4Match {
    Match(N4Params),
    NoMatch,
}

/// Splits `X / 2^{v₂(gcd X)}` into its even element `2^α·e` and two odd
/// elements. Returns `(v₂, α, e, odd₁, odd₂)`.
fn two_adic_shape(x: &IntSet) -> Option<(u32, u32, i64, i64, i64)> {
    let g = set_gcd(x);
    if g == 0 {
        return None;
    }
    let v = valuation(g, 2);
    let y: Vec<i64> = x
        .elements()
        .iter()
        .filter(|&&e| e != 0)
        .map(|e| e >> v)
        .collect();
    let evens: Vec<i64> = y.iter().copied().filter(|e| e % 2 == 0).collect();
    let odds: Vec<i64> = y.iter().copied().filter(|e| e % 2 != 0).collect();
    if evens.len() != 1 || odds.len() != 2 {
        return None;
    }
    let alpha = valuation(evens[0], 2);
    Some((v, alpha, evens[0] >> alpha, odds[0], odds[1]))
}

/// Reads the parametrization off `(A, L, R)`, trying both labelings of
/// the odd elements, and checks every constraint.
pub fn match_n4(a: &IntSet, l: &IntSet, r: i64) -> Result<N4Match> {
    if a.len() != 4 || l.len() != 4 {
        return Err(Error::InvalidArgument(
            "match_n4 needs two sets of size 4".into(),
        ));
    }
    if !a.contains(0) || !l.contains(0) {
        return Err(Error::HypothesisViolation(
            "both sets must contain 0".into(),
        ));
    }
    let (Some((c_exp, alpha, c1, o1, o2)), Some((m_exp, beta, n3, p1, p2))) =
        (two_adic_shape(a), two_adic_shape(l))
    else {
        return Ok(N4Match::NoMatch);
    };
    if alpha != beta || alpha == 0 {
        return Ok(N4Match::NoMatch);
    }
    let shift = c_exp + m_exp + alpha + 1;
    if shift >= 62 || r <= 0 || r % (1i64 << shift) != 0 {
        return Ok(N4Match::NoMatch);
    }
    let d = r >> shift;
    let p = 1i64 << alpha;
    for (c2, other) in [(o1, o2), (o2, o1)] {
        if (other - c2) % p != 0 {
            continue;
        }
        let c3 = (other - c2) / p;
        for (n1, other_n) in [(p1, p2), (p2, p1)] {
            if (other_n - n1) % p != 0 {
                continue;
            }
            let n2 = (other_n - n1) / p;
            let params = N4Params {
                c_exp,
                m_exp,
                alpha,
                c1,
                c2,
                c3,
                n1,
                n2,
                n3,
                d,
            };
            if params.satisfies_constraints() {
                return Ok(N4Match::Match(params));
            }
        }
    }
    Ok(N4Match::NoMatch)
}

/// One set in a [`FugledeReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FugledeRecord {
    #[serde(rename = "A")]
    pub a: Vec<i64>,
    pub tiles: bool,
    pub complement: Option<Vec<i64>>,
    pub spectral: bool,
    pub spectrum: Option<Vec<String>>,
}

impl FugledeRecord {
    pub fn agrees(&self) -> bool {
        self.tiles == self.spectral
    }
}

/// Tiling of `Z_n` against spectrality with spectrum in `(1/n)·Z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FugledeReport {
    pub n: u64,
    pub max_size: usize,
    pub scope: String,
    pub checked: usize,
    pub discrepancies: Vec<FugledeRecord>,
    pub records: Vec<FugledeRecord>,
}

/// Largest modulus accepted by [`fuglede_zn`].
pub const FUGLEDE_MAX_N: u64 = 30;

/// Every `A ⊆ {0, …, n−1}` with `0 ∈ A`, `|A| ≤ max_size` and `|A|` dividing `n`.
fn candidate_sets(n: u64, max_size: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![0i64];
    fn rec(n: i64, max: usize, start: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if (n as usize).is_multiple_of(cur.len()) {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for x in start..n {
            cur.push(x);
            rec(n, max, x + 1, cur, out);
            cur.pop();
        }
    }
    rec(n as i64, max_size.max(1), 1, &mut cur, &mut out);
    out
}

/// Exhaustive comparison on `Z_n`; the spectral side only searches spectra
/// inside `(1/n)·Z`.
pub fn fuglede_zn(n: u64, max_size: usize) -> Result<FugledeReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if n > FUGLEDE_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "n = {n} exceeds {FUGLEDE_MAX_N}"
        )));
    }
    if max_size as u64 > n {
        return Err(Error::InvalidArgument(format!(
            "max_size {max_size} exceeds n = {n}"
        )));
    }
    let mut records: Vec<FugledeRecord> = candidate_sets(n, max_size)
        .into_par_iter()
        .map(|v| {
            let a = IntSet::new(v.clone()).expect("distinct");
            let complement = find_complement_mod(&a, n);
            let spectrum = search_spectra(&a, n).into_iter().next();
            FugledeRecord {
                a: v,
                tiles: complement.is_some(),
                complement: complement.map(|t| t.elements().to_vec()),
                spectral: spectrum.is_some(),
                spectrum: spectrum.map(|g| {
                    g.elements()
                        .iter()
                        .map(crate::numeric::format_rational)
                        .collect()
                }),
            }
        })
        .collect();
    records.sort_by(|x, y| (x.a.len(), &x.a).cmp(&(y.a.len(), &y.a)));
    let discrepancies = records.iter().filter(|r| !r.agrees()).cloned().collect();
    Ok(FugledeReport {
        n,
        max_size,
        scope: format!("tiling of Z_{n}; spectra restricted to (1/{n})Z"),
        checked: records.len(),
        discrepancies,
        records,
    })
}

/// Whether `(1/r)·l` is a spectrum for `a`, exactly.
pub fn is_hadamard_pair(a: &IntSet, l: &IntSet, r: i64) -> bool {
    a.len() == l.len()
        && r >= 1
        && first_nonorthogonal(
            a,
            &l.elements()
                .iter()
                .map(|&x| Rational::new(x, r))
                .collect::<Vec<_>>(),
        )
        .is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[i64]) -> IntSet {
        IntSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn small_examples() {
        let v = classify_small(&set(&[0, 1, 2])).unwrap();
        assert!(v.spectral);
        assert_eq!(v.witness.unwrap().to_string(), "{0,1/3,2/3}");
        let v = classify_small(&set(&[0, 1, 3])).unwrap();
        assert!(!v.spectral);
        assert_eq!(v.sweep_bound, 9);
        let v = classify_small(&set(&[0, 1, 2, 3, 4])).unwrap();
        assert_eq!(v.witness.unwrap().to_string(), "{0,1/5,2/5,3/5,4/5}");
    }

    #[test]
    fn small_scaled_sets() {
        let v = classify_small(&set(&[0, 3, 6])).unwrap();
        assert!(v.spectral);
        assert_eq!(v.k, 1);
        assert_eq!(v.witness.unwrap().to_string(), "{0,1/9,2/9}");
        // Complete residues without unit gcd.
        let v = classify_small(&set(&[0, 2, 4])).unwrap();
        assert!(v.spectral);
        assert_eq!(v.k, 0);
        let v = classify_small(&set(&[0, 8])).unwrap();
        assert_eq!((v.spectral, v.k), (true, 3));
        assert!(!classify_small(&set(&[0, 3, 9])).unwrap().spectral);
    }

    #[test]
    fn small_errors() {
        assert_eq!(
            classify_small(&set(&[0, 1, 2, 3])),
            Err(Error::UnsupportedCardinality(4))
        );
        assert!(matches!(
            classify_small(&set(&[1, 2])),
            Err(Error::HypothesisViolation(_))
        ));
    }

    #[test]
    fn n4_examples() {
        let m = match_n4(&set(&[0, 1, 4, 5]), &set(&[0, 1, 4, 5]), 8).unwrap();
        let N4Match::Match(p) = m else {
            panic!("expected a match")
        };
        assert_eq!((p.c_exp, p.m_exp, p.alpha, p.d), (0, 0, 2, 1));
        assert_eq!((p.c1, p.c2, p.c3, p.n1, p.n2, p.n3), (1, 1, 1, 1, 1, 1));

        let m = match_n4(&set(&[0, 1, 4, 5]), &set(&[0, 2, 8, 10]), 16).unwrap();
        let N4Match::Match(p) = m else {
            panic!("expected a match")
        };
        assert_eq!(p.m_exp, 1);
        assert!(is_hadamard_pair(
            &set(&[0, 1, 4, 5]),
            &set(&[0, 2, 8, 10]),
            16
        ));

        // The standard pair of size 4 fits the pattern with α = 1.
        let m = match_n4(&set(&[0, 1, 2, 3]), &set(&[0, 1, 2, 3]), 4).unwrap();
        let N4Match::Match(p) = m else {
            panic!("expected a match")
        };
        assert_eq!(p.alpha, 1);
        assert!(is_hadamard_pair(
            &set(&[0, 1, 2, 3]),
            &set(&[0, 1, 2, 3]),
            4
        ));
    }

    #[test]
    fn n4_non_matches_are_not_pairs() {
        let cases = [
            (vec![0, 1, 4, 5], vec![0, 1, 4, 5], 16),
            (vec![0, 1, 2, 4], vec![0, 1, 2, 3], 4),
            (vec![0, 1, 4, 5], vec![0, 1, 2, 3], 8),
        ];
        for (a, l, r) in cases {
            let (a, l) = (set(&a), set(&l));
            assert_eq!(match_n4(&a, &l, r).unwrap(), N4Match::NoMatch);
            assert!(!is_hadamard_pair(&a, &l, r));
        }
    }

    #[test]
    fn params_realize_to_their_sets() {
        let p = N4Params {
            c_exp: 1,
            m_exp: 0,
            alpha: 2,
            c1: 3,
            c2: 5,
            c3: -1,
            n1: 1,
            n2: 3,
            n3: 1,
            d: 1,
        };
        assert!(p.satisfies_constraints());
        let (a, l, r) = p.realize().unwrap();
        assert!(matches!(match_n4(&a, &l, r).unwrap(), N4Match::Match(_)));
        assert!(is_hadamard_pair(&a, &l, r));
    }

    #[test]
    fn fuglede_examples() {
        let r = fuglede_zn(4, 2).unwrap();
        assert!(r.discrepancies.is_empty());
        assert_eq!(r.checked, 1 + 3);
        let r = fuglede_zn(1, 1).unwrap();
        assert_eq!(r.records.len(), 1);
        assert!(r.records[0].tiles && r.records[0].spectral);
        let r = fuglede_zn(8, 4).unwrap();
        let rec = r.records.iter().find(|x| x.a == vec![0, 1, 4, 5]).unwrap();
        assert!(rec.tiles && rec.spectral);
        assert_eq!(rec.complement, Some(vec![0, 2]));
        assert!(r.discrepancies.is_empty());
    }
}
