//! Tightness measures over series of box collections.
//!
//! * `ṽ`: mean over steps of `vol(hull(X_k))^(1/n)`.
//! * `w̃`: mean over steps and sampled unit directions of the two-sided
//!   support sum `ρ(X_k, d) + ρ(X_k, −d)`, computed on the true union.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::IntervalBox;
use crate::observer::BoxCollection;

/// Fixed set of random unit directions.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    dirs: Vec<Vec<f64>>,
    seed: u64,
}

impl DirectionSet {
    /// `count` directions from normalized standard-normal samples.
    pub fn random(n: usize, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut dirs = Vec::with_capacity(count);
        while dirs.len() < count {
            let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                dirs.push(v.into_iter().map(|x| x / norm).collect());
            }
        }
        DirectionSet { dirs, seed }
    }

    /// The default `10 n` directions.
    pub fn for_dim(n: usize, seed: u64) -> Self {
        DirectionSet::random(n, 10 * n, seed)
    }

    /// Explicit directions; each is normalized.
    pub fn from_vectors(dirs: Vec<Vec<f64>>) -> Self {
        let dirs = dirs
            .into_iter()
            .map(|d| {
                let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
                d.into_iter().map(|x| x / norm).collect()
            })
            .collect();
        DirectionSet { dirs, seed: 0 }
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.dirs.iter().map(Vec::as_slice)
    }
}

pub fn hull_of_collection(collection: &BoxCollection) -> Result<IntervalBox> {
    collection.hull().map_err(|_| Error::EmptyCollection)
}

/// `vol(hull(X))^(1/n)` for one step.
pub fn hull_volume_term(collection: &BoxCollection) -> Result<f64> {
    let hull = hull_of_collection(collection)?;
    let n = hull.dim();
    let vol = hull.volume();
    Ok(match n {
        1 => vol,
        2 => vol.sqrt(),
        _ => vol.powf(1.0 / n as f64),
    })
}

pub fn hull_volume_metric(series: &[BoxCollection]) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let total = series.iter().map(hull_volume_term).sum::<Result<f64>>()?;
    Ok(total / series.len() as f64)
}

/// Support function of a single box.
pub fn box_support(b: &IntervalBox, d: &[f64]) -> f64 {
    b.iter()
        .zip(d)
        .map(|(c, &dj)| dj * c.mid() + dj.abs() * c.radius())
        .sum()
}

/// `max_{x ∈ ∪X} d·x`, the max of the member supports.
pub fn support(collection: &BoxCollection, d: &[f64]) -> Result<f64> {
    if collection.is_empty() {
        return Err(Error::EmptyCollection);
    }
    Ok(collection
        .iter()
        .map(|b| box_support(b, d))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Mean two-sided support sum of one collection over the direction set.
pub fn width_term(collection: &BoxCollection, dirs: &DirectionSet) -> Result<f64> {
    if dirs.is_empty() {
        return Err(Error::InvalidConfig("direction set is empty".into()));
    }
    if collection.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let mut neg = vec![0.0; collection.dim()];
    let mut total = 0.0;
    for d in dirs.iter() {
        for (nj, dj) in neg.iter_mut().zip(d) {
            *nj = -dj;
        }
        total += support(collection, d)? + support(collection, &neg)?;
    }
    Ok(total / dirs.len() as f64)
}

pub fn mean_width(series: &[BoxCollection], dirs: &DirectionSet) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let total = series
        .iter()
        .map(|c| width_term(c, dirs))
        .sum::<Result<f64>>()?;
    Ok(total / series.len() as f64)
}

/// Per-run tightness and timing summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub v_tilde: f64,
    pub w_tilde: f64,
    pub hullvol_terms: Vec<f64>,
    pub width_terms: Vec<f64>,
    pub box_counts: Vec<usize>,
    pub step_ms: Vec<f64>,
}

impl MetricReport {
    /// Builds a report from per-step terms. The aggregates average steps
    /// `1..` (the initial contraction is excluded) unless only step 0 exists.
    pub fn from_terms(
        hullvol_terms: Vec<f64>,
        width_terms: Vec<f64>,
        box_counts: Vec<usize>,
        step_ms: Vec<f64>,
    ) -> Result<Self> {
        if hullvol_terms.is_empty() || hullvol_terms.len() != width_terms.len() {
            return Err(Error::EmptyCollection);
        }
        let tail = |v: &[f64]| -> f64 {
            let s = if v.len() > 1 { &v[1..] } else { v };
            s.iter().sum::<f64>() / s.len() as f64
        };
        Ok(MetricReport {
            v_tilde: tail(&hullvol_terms),
            w_tilde: tail(&width_terms),
            hullvol_terms,
            width_terms,
            box_counts,
            step_ms,
        })
    }

    pub fn mean_step_ms(&self) -> f64 {
        let s = if self.step_ms.len() > 1 {
            &self.step_ms[1..]
        } else {
            &self.step_ms[..]
        };
        if s.is_empty() {
            0.0
        } else {
            s.iter().sum::<f64>() / s.len() as f64
        }
    }
}

/// Tightness values relative to the best of a group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Normalized {
    pub v_hat: f64,
    pub w_hat: f64,
}

/// Divides every `(ṽ, w̃)` pair by the smallest value of its column.
pub fn normalize(values: &[(f64, f64)]) -> Result<Vec<Normalized>> {
    if values.is_empty() {
        return Err(Error::EmptyCollection);
    }
    for &(v, w) in values {
        for x in [v, w] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::NonpositiveMetric(x));
            }
        }
    }
    let v_min = values.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let w_min = values.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok(values
        .iter()
        .map(|&(v, w)| Normalized {
            v_hat: v / v_min,
            w_hat: w / w_min,
        })
        .collect())
}

/// [`normalize`] applied to reports.
pub fn normalize_reports(reports: &[MetricReport]) -> Result<Vec<Normalized>> {
    let pairs: Vec<(f64, f64)> = reports.iter().map(|r| (r.v_tilde, r.w_tilde)).collect();
    normalize(&pairs)
}
