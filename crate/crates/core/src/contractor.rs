//! Gauss–Seidel contraction of boxes against linear measurement strips.
//!
//! Each measurement component `i` defines the strip
//! `y_i − v̄_i ≤ C_i·x ≤ y_i − v̲_i`. For every variable `j` with `C[i][j] ≠ 0`
//! the remaining terms are enclosed as `s = Σ_{ℓ≠j} C[i][ℓ]·X_ℓ` and `x_j` is
//! intersected with `[y_i − v̄_i − s̄, y_i − v̲_i − s̲] / C[i][j]`.

use crate::dynamics::RealMatrix;
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalBox, Rounding};
use crate::observer::BoxCollection;

/// Measurement strips `{x : y − C x ∈ V}` for one time step.
#[derive(Debug, Clone)]
pub struct StripSet {
    c: RealMatrix,
    y: Vec<f64>,
    v: IntervalBox,
    /// Nonzero `(column, coefficient)` pairs per row.
    support: Vec<Vec<(usize, f64)>>,
}

impl StripSet {
    pub fn new(c: RealMatrix, y: Vec<f64>, v: IntervalBox) -> Result<Self> {
        if c.rows() == 0 {
            return Err(Error::InvalidConfig("strip set needs at least one row".into()));
        }
        if y.len() != c.rows() {
            return Err(Error::DimensionMismatch {
                expected: c.rows(),
                found: y.len(),
            });
        }
        if v.dim() != c.rows() {
            return Err(Error::DimensionMismatch {
                expected: c.rows(),
                found: v.dim(),
            });
        }
        if v.is_empty() {
            return Err(Error::EmptyBox);
        }
        let support = (0..c.rows())
            .map(|i| {
                c.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| a != 0.0)
                    .map(|(j, &a)| (j, a))
                    .collect()
            })
            .collect();
        Ok(StripSet { c, y, v, support })
    }

    pub fn rows(&self) -> usize {
        self.c.rows()
    }

    pub fn state_dim(&self) -> usize {
        self.c.cols()
    }

    pub fn c(&self) -> &RealMatrix {
        &self.c
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn noise(&self) -> &IntervalBox {
        &self.v
    }

    /// Whether a point satisfies every strip (evaluated in plain floating point).
    pub fn contains_point(&self, x: &[f64]) -> bool {
        (0..self.rows()).all(|i| {
            let cx: f64 = self.c.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
            self.v[i].contains(self.y[i] - cx)
        })
    }

    fn bounds_for(&self, i: usize, j: usize, cij: f64, x: &IntervalBox, r: Rounding) -> Result<Interval> {
        let s = self.support[i]
            .iter()
            .filter(|&&(l, _)| l != j)
            .fold(Interval::ZERO, |acc, &(l, a)| r.add(acc, r.scale(a, x[l])));
        // [y − v̄ − s̄, y − v̲ − s̲]
        let b = r.sub(r.sub(Interval::point(self.y[i]), self.v[i]), s);
        r.div(b, Interval::point(cij))
    }
}

/// Interval of values of `x_j` admitted by strip `i` given the other components of `x`.
pub fn admissible_interval(
    strips: &StripSet,
    i: usize,
    j: usize,
    x: &IntervalBox,
    r: Rounding,
) -> Result<Interval> {
    if x.dim() != strips.state_dim() {
        return Err(Error::DimensionMismatch {
            expected: strips.state_dim(),
            found: x.dim(),
        });
    }
    if x.is_empty() {
        return Err(Error::EmptyBox);
    }
    let cij = strips.c.get(i, j);
    if cij == 0.0 {
        return Err(Error::ZeroCoefficient { row: i, col: j });
    }
    strips.bounds_for(i, j, cij, x, r)
}

/// Outcome of contracting one box.
#[derive(Debug, Clone, PartialEq)]
pub enum Contraction {
    /// The tightened box and the number of sweeps performed.
    Kept(IntervalBox, usize),
    Discarded,
}

/// Gauss–Seidel sweeps on a single box, at most `i_max` of them.
///
/// Stops early after a sweep that moves no endpoint, and as soon as any
/// component becomes empty.
pub fn contract_box(
    mut x: IntervalBox,
    strips: &StripSet,
    i_max: usize,
    r: Rounding,
) -> Result<Contraction> {
    if x.dim() != strips.state_dim() {
        return Err(Error::DimensionMismatch {
            expected: strips.state_dim(),
            found: x.dim(),
        });
    }
    if x.is_empty() {
        return Ok(Contraction::Discarded);
    }
    for sweep in 1..=i_max {
        let mut changed = false;
        for i in 0..strips.rows() {
            for &(j, cij) in &strips.support[i] {
                let admissible = strips.bounds_for(i, j, cij, &x, r)?;
                let tightened = x[j].intersect(&admissible);
                if tightened.is_empty() {
                    return Ok(Contraction::Discarded);
                }
                if tightened != x[j] {
                    x[j] = tightened;
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(Contraction::Kept(x, sweep));
        }
    }
    Ok(Contraction::Kept(x, i_max))
}

/// Contracts every box of the collection, dropping the ones that become empty.
///
/// Survivors keep their relative order.
pub fn gs_contract(
    collection: BoxCollection,
    strips: &StripSet,
    i_max: usize,
    r: Rounding,
) -> Result<BoxCollection> {
    if i_max == 0 {
        return Err(Error::InvalidConfig("I_max must be at least 1".into()));
    }
    let dim = collection.dim();
    let mut kept = Vec::with_capacity(collection.len());
    for b in collection.into_boxes() {
        if let Contraction::Kept(b, _) = contract_box(b, strips, i_max, r)? {
            kept.push(b);
        }
    }
    Ok(BoxCollection::from_parts(dim, kept))
}

/// Contracts the initial enclosure against the first measurement.
pub fn contract_initial(
    x0: &IntervalBox,
    strips: &StripSet,
    i_max: usize,
    r: Rounding,
) -> Result<BoxCollection> {
    gs_contract(BoxCollection::singleton(x0.clone()), strips, i_max, r)
}
