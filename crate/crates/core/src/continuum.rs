//! The group `U(t)` on `Ω = A + [0, 1]`, acting on midpoint samples by
//! `(U(t)f)(x) = B^{⌊x+t⌋} f({x+t})` branchwise.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local::local_translation_matrix;
use crate::numeric::{ComplexMatrix, Rational, RootTable};
use crate::spectra::{IntSet, Spectrum};

/// Default number of samples per unit interval.
pub const DEFAULT_RESOLUTION: usize = 256;

/// A function on `A + [0, 1]`: `values[j][k] ≈ f(a_j + (k + 1/2)/M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    a: IntSet,
    resolution: usize,
    values: Vec<Vec<Complex64>>,
}

impl SampledFunction {
    pub fn new(a: IntSet, resolution: usize, values: Vec<Vec<Complex64>>) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::InvalidArgument("resolution must be positive".into()));
        }
        if values.len() != a.len() || values.iter().any(|b| b.len() != resolution) {
            return Err(Error::DimensionMismatch(format!(
                "expected {} branches of {resolution} samples",
                a.len()
            )));
        }
        if values
            .iter()
            .flatten()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidArgument("non-finite sample".into()));
        }
        Ok(SampledFunction {
            a,
            resolution,
            values,
        })
    }

    pub fn zeros(a: IntSet, resolution: usize) -> Result<Self> {
        let values = vec![vec![Complex64::new(0.0, 0.0); resolution]; a.len()];
        Self::new(a, resolution, values)
    }

    /// Samples `f` at the midpoints of every branch.
    pub fn from_fn(a: IntSet, resolution: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = a
            .elements()
            .iter()
            .map(|&x| {
                (0..resolution)
                    .map(|k| f(x as f64 + (k as f64 + 0.5) / resolution as f64))
                    .collect()
            })
            .collect();
        Self::new(a, resolution, values)
    }

    pub fn set(&self) -> &IntSet {
        &self.a
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn values(&self) -> &[Vec<Complex64>] {
        &self.values
    }

    /// Midpoint `x` of sample `k` on branch `j`.
    pub fn point(&self, j: usize, k: usize) -> f64 {
        self.a.elements()[j] as f64 + (k as f64 + 0.5) / self.resolution as f64
    }

    /// `‖f‖² ≈ Σ |f|² / M`.
    pub fn norm_sq(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            / self.resolution as f64
    }

    /// Squared norm carried by each branch.
    pub fn branch_norms_sq(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|b| b.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.resolution as f64)
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        SampledFunction {
            values: self
                .values
                .iter()
                .map(|b| b.iter().map(|z| z * c).collect())
                .collect(),
            ..self.clone()
        }
    }
}

/// `χ_{a_j + [lo, hi)}`; both endpoints must lie on the sample grid.
pub fn indicator(
    a: &IntSet,
    resolution: usize,
    branch: i64,
    lo: Rational,
    hi: Rational,
) -> Result<SampledFunction> {
    let j = a
        .index_of(branch)
        .ok_or_else(|| Error::InvalidArgument(format!("{branch} is not an element of the set")))?;
    let zero = Rational::from_integer(0);
    let one = Rational::from_integer(1);
    if lo < zero || hi > one || lo > hi {
        return Err(Error::InvalidArgument(format!(
            "[{lo}, {hi}) is not a subinterval of [0, 1)"
        )));
    }
    let m = Rational::from_integer(resolution as i64);
    let (l, h) = (lo * m, hi * m);
    if !l.is_integer() || !h.is_integer() {
        return Err(Error::InvalidArgument(format!(
            "endpoints {lo} and {hi} are not on the grid of resolution {resolution}"
        )));
    }
    let mut f = SampledFunction::zeros(a.clone(), resolution)?;
    for k in l.to_integer() as usize..h.to_integer() as usize {
        f.values[j][k] = Complex64::new(1.0, 0.0);
    }
    Ok(f)
}

/// Integer powers of `B` for one spectral pair, computed exactly and cached
/// as floats. Powers are reduced modulo the order of `B`.
#[derive(Debug)]
pub struct ContinuumGroup {
    a: IntSet,
    gamma: Spectrum,
    b: RootTable,
    period: i64,
    cache: Mutex<HashMap<i64, Arc<ComplexMatrix>>>,
}

impl ContinuumGroup {
    pub fn new(a: &IntSet, g: &Spectrum) -> Result<Self> {
        let b = local_translation_matrix(a, g)?;
        Ok(ContinuumGroup {
            a: a.clone(),
            gamma: g.clone(),
            b: b.table().expect("exact").clone(),
            period: g.canonical().denominator_lcm(),
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn set(&self) -> &IntSet {
        &self.a
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.gamma
    }

    /// Smallest `p` with `Γ ⊂ (1/p)·Z`, so that `B^p = I`.
    pub fn period(&self) -> i64 {
        self.period
    }

    /// `B^n` as a float matrix.
    pub fn power(&self, n: i64) -> Result<Arc<ComplexMatrix>> {
        let n = n.rem_euclid(self.period);
        if let Some(m) = self.cache.lock().expect("cache lock").get(&n) {
            return Ok(Arc::clone(m));
        }
        let m = Arc::new(self.b.pow(n as u32)?.to_complex());
        self.cache
            .lock()
            .expect("cache lock")
            .insert(n, Arc::clone(&m));
        Ok(m)
    }

    /// `U(t)f`. Off-grid `t` reads the sample whose cell contains `x + t`.
    pub fn translate(&self, f: &SampledFunction, t: f64) -> Result<SampledFunction> {
        if f.a != self.a {
            return Err(Error::InvalidArgument(format!(
                "function lives on {} but the group acts on {}",
                f.a, self.a
            )));
        }
        if !t.is_finite() {
            return Err(Error::InvalidArgument("time must be finite".into()));
        }
        let m = f.resolution as i64;
        let n = self.a.len();
        let shift = t * m as f64;
        let mut out = vec![vec![Complex64::new(0.0, 0.0); f.resolution]; n];
        let mut input = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..f.resolution {
            let cell = (k as f64 + 0.5 + shift).floor() as i64;
            let power = self.power(cell.div_euclid(m))?;
            let idx = cell.rem_euclid(m) as usize;
            for (j, v) in input.iter_mut().enumerate() {
                *v = f.values[j][idx];
            }
            for (j, z) in power.mul_vec(&input).into_iter().enumerate() {
                out[j][k] = z;
            }
        }
        SampledFunction::new(self.a.clone(), f.resolution, out)
    }

    /// Frames at `steps` evenly spaced times from `t_start` to `t_end`.
    pub fn trajectory(
        &self,
        f: &SampledFunction,
        t_start: f64,
        t_end: f64,
        steps: usize,
    ) -> Result<Vec<TrajectoryFrame>> {
        if steps == 0 {
            return Err(Error::InvalidArgument("steps must be at least 1".into()));
        }
        let times: Vec<f64> = (0..steps)
            .map(|i| {
                if steps == 1 {
                    t_start
                } else {
                    t_start + (t_end - t_start) * i as f64 / (steps - 1) as f64
                }
            })
            .collect();
        times
            .par_iter()
            .map(|&t| {
                let samples = self.translate(f, t)?;
                Ok(TrajectoryFrame {
                    t,
                    norm_sq: samples.norm_sq(),
                    samples,
                })
            })
            .collect()
    }
}

/// `U(t)f` for a spectral pair `(A, g)` with `f` living on `A + [0, 1]`.
pub fn translate(f: &SampledFunction, g: &Spectrum, t: f64) -> Result<SampledFunction> {
    ContinuumGroup::new(&f.a, g)?.translate(f, t)
}

pub fn trajectory(
    f: &SampledFunction,
    g: &Spectrum,
    t_start: f64,
    t_end: f64,
    steps: usize,
) -> Result<Vec<TrajectoryFrame>> {
    ContinuumGroup::new(&f.a, g)?.trajectory(f, t_start, t_end, steps)
}

/// One time slice of a trajectory.
#[derive(Debug, Clone)]
pub struct TrajectoryFrame {
    pub t: f64,
    pub samples: SampledFunction,
    pub norm_sq: f64,
}

/// One sample of one frame, as exported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub branch: i64,
    pub x: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

pub fn trajectory_rows(frames: &[TrajectoryFrame]) -> Vec<TrajectoryRow> {
    let mut rows = Vec::new();
    for frame in frames {
        let s = &frame.samples;
        for (j, branch) in s.values.iter().enumerate() {
            for (k, z) in branch.iter().enumerate() {
                rows.push(TrajectoryRow {
                    t: frame.t,
                    branch: s.a.elements()[j],
                    x: s.point(j, k),
                    re: z.re,
                    im: z.im,
                    abs: z.norm(),
                });
            }
        }
    }
    rows
}

/// Writes frames as CSV with header `t,branch,x,re,im,abs`.
pub fn write_trajectory_csv<W: Write>(frames: &[TrajectoryFrame], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in trajectory_rows(frames) {
        w.serialize(row)
            .map_err(|e| Error::InvalidArgument(format!("csv output failed: {e}")))?;
    }
    w.flush()
        .map_err(|e| Error::InvalidArgument(format!("csv output failed: {e}")))?;
    Ok(())
}
