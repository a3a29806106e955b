//! Minimal lattice of a spectrum, the obstruction set `Θ_B`, tiling
//! complements modulo `d`, and the periodicity test `B^d = I`.

use std::collections::BTreeSet;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local::local_translation_matrix;
use crate::numeric::{rational_gcd, Rational};
use crate::spectra::{first_nonorthogonal, IntSet, Spectrum};

/// The lattice `(r/d)·Z`, `gcd(r, d) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeDescriptor {
    pub r: i64,
    pub d: i64,
}

/// Residues modulo `d` of a `d`-periodic subset of `Z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaSet {
    pub modulus: u64,
    pub residues: BTreeSet<u64>,
}

impl ThetaSet {
    pub fn contains(&self, m: i64) -> bool {
        self.residues
            .contains(&(m.rem_euclid(self.modulus as i64) as u64))
    }

    /// Whether every integer belongs to the set.
    pub fn is_everything(&self) -> bool {
        self.residues.len() as u64 == self.modulus
    }
}

/// A claimed tiling `A ⊕ T = Z_d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingCertificate {
    pub a: IntSet,
    pub t: IntSet,
    pub d: u64,
}

/// Smallest lattice `(r/d)·Z` containing the stored representatives of `g`.
pub fn lattice_of_spectrum(g: &Spectrum) -> Result<LatticeDescriptor> {
    let q = rational_gcd(g.elements()).ok_or(Error::ZeroSpectrum)?;
    Ok(LatticeDescriptor {
        r: *q.numer(),
        d: *q.denom(),
    })
}

fn require_hypotheses(a: &IntSet, g: &Spectrum) -> Result<LatticeDescriptor> {
    if a.len() != g.len() {
        return Err(Error::SizeMismatch {
            set: a.len(),
            spectrum: g.len(),
        });
    }
    if let Some((x, y)) = first_nonorthogonal(a, g.elements()) {
        return Err(Error::NotASpectrum(x, y));
    }
    if !g.elements().iter().any(Zero::is_zero) {
        return Err(Error::HypothesisViolation(
            "0 is not in the spectrum".into(),
        ));
    }
    lattice_of_spectrum(g)
}

/// `Θ_B` as residues `{(x′ − x) mod d : x ≠ x′ ∈ A}`, where `(r/d)·Z` is the
/// minimal lattice of `g`.
///
/// The congruence description is cross-checked against the definition:
/// `m ∈ Θ_B` iff some column `x` of `B^m` is a canonical vector `δ_{x′}`
/// with `x′ ≠ x`, scanned exactly for `m = 0, …, d−1`.
pub fn theta_set(a: &IntSet, g: &Spectrum) -> Result<ThetaSet> {
    let lattice = require_hypotheses(a, g)?;
    let d = lattice.d as u64;
    let formula = theta_by_congruence(a, d);
    let scanned = theta_by_powers(a, g, d)?;
    if formula != scanned {
        return Err(Error::Internal(format!(
            "theta residues disagree: congruence {formula:?}, powers {scanned:?}"
        )));
    }
    Ok(ThetaSet {
        modulus: d,
        residues: formula,
    })
}

/// `{(x′ − x) mod d : x ≠ x′ ∈ A}`.
pub fn theta_by_congruence(a: &IntSet, d: u64) -> BTreeSet<u64> {
    let xs = a.elements();
    let mut out = BTreeSet::new();
    for &x in xs {
        for &y in xs {
            if x != y {
                out.insert((y - x).rem_euclid(d as i64) as u64);
            }
        }
    }
    out
}

/// `{m mod d : B^m has a column x equal to δ_{x′}, x′ ≠ x}` for `0 ≤ m < d`.
pub fn theta_by_powers(a: &IntSet, g: &Spectrum, d: u64) -> Result<BTreeSet<u64>> {
    let b = local_translation_matrix(a, g)?;
    let base = b.table().expect("exact").clone();
    let n = a.len();
    let mut out = BTreeSet::new();
    let mut p = crate::numeric::RootTable::identity(n);
    for m in 0..d {
        if m > 0 {
            p = p.mul(&base)?;
        }
        let hit = (0..n).any(|col| (0..n).any(|row| row != col && p.column_is_canonical(col, row)));
        if hit {
            out.insert(m);
        }
    }
    Ok(out)
}

/// Direct check that the sums `x + y mod d` hit every residue exactly once.
pub fn verify_tiling(cert: &TilingCertificate) -> bool {
    let d = cert.d;
    if d == 0 || (cert.a.len() * cert.t.len()) as u64 != d {
        return false;
    }
    let mut seen = vec![false; d as usize];
    for &x in cert.a.elements() {
        for &y in cert.t.elements() {
            let r = (x + y).rem_euclid(d as i64) as usize;
            if seen[r] {
                return false;
            }
            seen[r] = true;
        }
    }
    true
}

/// All `T ⊆ {0, …, d−1}` with `|T| = d/|A|` whose nonzero differences avoid
/// `forbidden`, sorted. With `normalize` only sets containing 0 are listed.
pub fn complements_avoiding(
    forbidden: &BTreeSet<u64>,
    size: usize,
    d: u64,
    normalize: bool,
) -> Vec<IntSet> {
    let bad: Vec<bool> = (0..d).map(|m| m != 0 && forbidden.contains(&m)).collect();
    let allowed = |chosen: &[u64], c: u64| {
        chosen.iter().all(|&t| {
            let diff = (c + d - t) % d;
            diff != 0 && !bad[diff as usize] && !bad[((d - diff) % d) as usize]
        })
    };
    let starts: Vec<u64> = if normalize { vec![0] } else { (0..d).collect() };
    let mut found: Vec<Vec<u64>> = starts
        .par_iter()
        .flat_map_iter(|&s| {
            let mut out = Vec::new();
            let mut chosen = vec![s];
            grow(&allowed, d, s + 1, size, &mut chosen, &mut out, usize::MAX);
            out
        })
        .collect();
    found.sort();
    found
        .into_iter()
        .map(|t| IntSet::new(t.into_iter().map(|x| x as i64).collect()).expect("distinct"))
        .collect()
}

fn grow(
    allowed: &impl Fn(&[u64], u64) -> bool,
    d: u64,
    from: u64,
    size: usize,
    chosen: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if chosen.len() == size {
        out.push(chosen.clone());
        return;
    }
    for c in from..d {
        if d - c < (size - chosen.len()) as u64 {
            break;
        }
        if allowed(chosen, c) {
            chosen.push(c);
            grow(allowed, d, c + 1, size, chosen, out, limit);
            chosen.pop();
        }
    }
}

/// Some `T ∋ 0` with `A ⊕ T = Z_d`, if one exists.
pub fn find_complement_mod(a: &IntSet, d: u64) -> Option<IntSet> {
    if d == 0 || !d.is_multiple_of(a.len() as u64) {
        return None;
    }
    let residues: BTreeSet<u64> = a
        .elements()
        .iter()
        .map(|x| x.rem_euclid(d as i64) as u64)
        .collect();
    if residues.len() != a.len() {
        return None;
    }
    let forbidden = theta_by_congruence(a, d);
    let bad: Vec<bool> = (0..d).map(|m| forbidden.contains(&m)).collect();
    let allowed = |chosen: &[u64], c: u64| {
        chosen.iter().all(|&t| {
            let diff = (c + d - t) % d;
            !bad[diff as usize]
        })
    };
    let mut out = Vec::new();
    let size = (d / a.len() as u64) as usize;
    grow(&allowed, d, 1, size, &mut vec![0], &mut out, 1);
    out.pop()
        .map(|t| IntSet::new(t.into_iter().map(|x| x as i64).collect()).expect("distinct"))
}

/// Tiling complements of `A` modulo the `d` of the minimal lattice of `g`,
/// each re-verified by [`verify_tiling`]. Sets are normalized to contain 0
/// unless `all_translates` is set.
pub fn tiling_complements(a: &IntSet, g: &Spectrum, all_translates: bool) -> Result<Vec<IntSet>> {
    let theta = theta_set(a, g)?;
    let d = theta.modulus;
    if d % a.len() as u64 != 0 {
        return Err(Error::NoComplementPossible {
            size: a.len(),
            modulus: d,
        });
    }
    let size = (d / a.len() as u64) as usize;
    let found = complements_avoiding(&theta.residues, size, d, !all_translates);
    for t in &found {
        let cert = TilingCertificate {
            a: a.clone(),
            t: t.clone(),
            d,
        };
        if !verify_tiling(&cert) {
            return Err(Error::Internal(format!(
                "complement {t} fails the partition check"
            )));
        }
    }
    Ok(found)
}

/// Whether `B^d = I`, computed exactly and compared with the arithmetic
/// predicate that every denominator of `g` divides `d`.
pub fn period_check(a: &IntSet, g: &Spectrum, d: u64) -> Result<bool> {
    if d == 0 {
        return Err(Error::InvalidArgument("period must be positive".into()));
    }
    let b = local_translation_matrix(a, g)?;
    let exp = u32::try_from(d).map_err(|_| Error::Overflow("period exponent"))?;
    let by_matrix = b.table().expect("exact").pow(exp)?.is_identity();
    let by_arith = g
        .elements()
        .iter()
        .all(|l: &Rational| (d as i64) % *l.denom() == 0);
    if by_matrix != by_arith {
        return Err(Error::Internal(format!(
            "B^{d} = I is {by_matrix} but the denominator test gives {by_arith}"
        )));
    }
    Ok(by_matrix)
}
