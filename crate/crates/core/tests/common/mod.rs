#![allow(dead_code)]

use spectral_tiles::numeric::Mode;
use spectral_tiles::spectra::{is_spectrum, search_spectra, IntSet, Spectrum};

pub fn set(v: &[i64]) -> IntSet {
    IntSet::new(v.to_vec()).unwrap()
}

pub fn spec(s: &str) -> Spectrum {
    s.parse().unwrap()
}

pub fn standard(n: i64) -> (IntSet, Spectrum) {
    let a = set(&(0..n).collect::<Vec<_>>());
    let g = Spectrum::from_numerators(&(0..n).collect::<Vec<_>>(), n).unwrap();
    (a, g)
}

pub fn example() -> (IntSet, Spectrum) {
    (set(&[0, 1, 4, 5]), spec("0,1/8,1/2,5/8"))
}

/// Subsets of `{0, …, max}` containing 0 with at most `size` elements.
pub fn subsets_with_zero(max: i64, size: usize) -> Vec<IntSet> {
    fn rec(max: i64, size: usize, start: i64, cur: &mut Vec<i64>, out: &mut Vec<IntSet>) {
        out.push(IntSet::new(cur.clone()).unwrap());
        if cur.len() == size {
            return;
        }
        for x in start..=max {
            cur.push(x);
            rec(max, size, x + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(max, size, 1, &mut vec![0], &mut out);
    out
}

/// Every distinct spectral pair found by `search_spectra` for subsets of
/// `{0, …, max}` containing 0, of size at most `size`, with `R ≤ max_r`.
pub fn sweep_pairs(max: i64, size: usize, max_r: u64) -> Vec<(IntSet, Spectrum)> {
    let mut out = Vec::new();
    for a in subsets_with_zero(max, size) {
        let mut seen: Vec<Spectrum> = Vec::new();
        for r in 1..=max_r {
            for g in search_spectra(&a, r) {
                if !seen.contains(&g) {
                    seen.push(g);
                }
            }
        }
        out.extend(seen.into_iter().map(|g| (a.clone(), g)));
    }
    out
}

/// A small fixed list of spectral pairs of assorted shapes.
pub fn sample_pairs() -> Vec<(IntSet, Spectrum)> {
    let pairs = vec![
        (set(&[0]), spec("0")),
        (set(&[0, 1]), spec("0,1/2")),
        (set(&[0, 3]), spec("0,1/6")),
        (set(&[0, 1, 2]), spec("0,1/3,2/3")),
        (set(&[0, 1, 4, 5]), spec("0,1/8,1/2,5/8")),
        (set(&[0, 1, 2, 3]), spec("0,1/4,1/2,3/4")),
        (set(&[0, 2, 8, 10]), spec("0,1/16,1/4,5/16")),
        (set(&[0, 1, 2, 3, 4]), spec("0,1/5,2/5,3/5,4/5")),
        (set(&[0, 1, 6, 7]), spec("0,1/4,1/2,3/4")),
        (set(&[0, 3, 4, 7]), spec("0,1/8,1/2,5/8")),
        (set(&[0, 2, 4]), spec("0,1/6,1/3")),
    ];
    for (a, g) in &pairs {
        assert!(is_spectrum(a, g, Mode::Exact), "{a} {g}");
    }
    pairs
}
