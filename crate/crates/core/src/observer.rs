//! The divide-and-discard observer.
//!
//! The state is enclosed by a union of at most `M_max` boxes. Each step
//!
//! 1. refines the collection by bisecting boxes along their widest scaled
//!    dimension until `M_max` boxes are active,
//! 2. predicts every box with the mean-value enclosure,
//! 3. contracts the predictions against the new measurement strips and
//!    discards the ones that become empty,
//! 4. prunes boxes contained in a per-bin representative.
//!
//! Split selection and pruning use equal-width binning instead of sorting so
//! both stay linear in the number of boxes.

use serde::{Deserialize, Serialize};

use crate::contractor::{contract_initial, gs_contract, StripSet};
use crate::dynamics::{mean_value_enclosure, SystemModel};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalBox, Rounding};

/// A finite union of non-empty boxes in encounter order.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxCollection {
    dim: usize,
    boxes: Vec<IntervalBox>,
}

impl BoxCollection {
    pub fn new(dim: usize, boxes: Vec<IntervalBox>) -> Result<Self> {
        for b in &boxes {
            if b.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: b.dim(),
                });
            }
            if b.is_empty() {
                return Err(Error::EmptyBox);
            }
        }
        Ok(BoxCollection { dim, boxes })
    }

    pub(crate) fn from_parts(dim: usize, boxes: Vec<IntervalBox>) -> Self {
        debug_assert!(boxes.iter().all(|b| b.dim() == dim && !b.is_empty()));
        BoxCollection { dim, boxes }
    }

    pub fn singleton(b: IntervalBox) -> Self {
        BoxCollection {
            dim: b.dim(),
            boxes: vec![b],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn boxes(&self) -> &[IntervalBox] {
        &self.boxes
    }

    pub fn into_boxes(self) -> Vec<IntervalBox> {
        self.boxes
    }

    pub fn iter(&self) -> std::slice::Iter<'_, IntervalBox> {
        self.boxes.iter()
    }

    /// Whether `x` lies in the union.
    pub fn contains_point(&self, x: &[f64]) -> bool {
        self.boxes.iter().any(|b| b.contains_point(x))
    }

    /// Interval hull of the union.
    pub fn hull(&self) -> Result<IntervalBox> {
        let (first, rest) = self.boxes.split_first().ok_or(Error::EmptyCollection)?;
        rest.iter().try_fold(first.clone(), |h, b| h.hull(b))
    }
}

/// Tuning parameters of the observer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObserverConfig {
    /// Cap on active boxes.
    pub m_max: usize,
    /// Cap on Gauss–Seidel sweeps per box.
    pub i_max: usize,
    pub k_split: usize,
    pub k_prune: usize,
    /// Per-dimension width scaling. `None` uses the widths of the initial set.
    pub scaling: Option<Vec<f64>>,
    pub rounding: Rounding,
}

impl Default for ObserverConfig {
    fn default() -> Self {
        ObserverConfig {
            m_max: 100,
            i_max: 5,
            k_split: 20,
            k_prune: 20,
            scaling: None,
            rounding: Rounding::Fast,
        }
    }
}

impl ObserverConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("m_max", self.m_max),
            ("i_max", self.i_max),
            ("k_split", self.k_split),
            ("k_prune", self.k_prune),
        ] {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        if let Some(s) = &self.scaling {
            check_scaling(s)?;
        }
        Ok(())
    }
}

fn check_scaling(s: &[f64]) -> Result<()> {
    match s.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        Some(index) => Err(Error::NonpositiveScale {
            index,
            value: s[index],
        }),
        None => Ok(()),
    }
}

/// Scaling vector from the widths of `x0`, floored at machine epsilon.
pub fn default_scaling(x0: &IntervalBox) -> Result<Vec<f64>> {
    Ok(x0.width()?.into_iter().map(|w| w.max(f64::EPSILON)).collect())
}

/// `width_j / s_j` for every dimension.
pub fn scaled_widths(x: &IntervalBox, s: &[f64]) -> Result<Vec<f64>> {
    if s.len() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: s.len(),
        });
    }
    check_scaling(s)?;
    Ok(x.iter().zip(s).map(|(c, sj)| c.width() / sj).collect())
}

/// Index and value of the largest scaled width; ties go to the lowest index.
fn widest(x: &IntervalBox, s: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (j, (c, sj)) in x.iter().zip(s).enumerate() {
        let w = c.width() / sj;
        if w > best.1 {
            best = (j, w);
        }
    }
    best
}

/// Dimension with the largest scaled width, lowest index on ties.
pub fn widest_dim(x: &IntervalBox, s: &[f64]) -> Result<usize> {
    scaled_widths(x, s)?;
    Ok(widest(x, s).0)
}

/// Splits `x` at the midpoint of dimension `j`; the children share that face.
pub fn bisect(x: &IntervalBox, j: usize) -> Result<(IntervalBox, IntervalBox)> {
    if j >= x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: j + 1,
        });
    }
    if x.is_empty() {
        return Err(Error::EmptyBox);
    }
    let c = x[j];
    if c.width() <= 0.0 {
        return Err(Error::ZeroWidthSplit { dim: j });
    }
    let m = c.mid();
    let mut left = x.clone();
    let mut right = x.clone();
    left[j] = Interval::new(c.lo(), m);
    right[j] = Interval::new(m, c.hi());
    Ok((left, right))
}

/// Assigns each value to one of `k` equal-width bins over `[min, max]`.
///
/// Bins are half-open except the last; a degenerate range maps everything to
/// bin 0.
fn bin_indices(values: &[f64], k: usize) -> Vec<usize> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    if !(span > 0.0) || k <= 1 {
        return vec![0; values.len()];
    }
    values
        .iter()
        .map(|&v| (((v - lo) / span * k as f64) as usize).min(k - 1))
        .collect()
}

/// Bins of box indices, each in encounter order.
fn buckets(values: &[f64], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); k.max(1)];
    for (b, bin) in bin_indices(values, k).into_iter().enumerate() {
        out[bin].push(b);
    }
    out
}

fn split_marked(boxes: Vec<IntervalBox>, marks: &[Option<usize>]) -> Vec<IntervalBox> {
    let extra = marks.iter().filter(|m| m.is_some()).count();
    let mut out = Vec::with_capacity(boxes.len() + extra);
    for (b, mark) in boxes.into_iter().zip(marks) {
        match mark {
            Some(j) => {
                let (l, r) = bisect(&b, *j).expect("marked box has positive width");
                out.push(l);
                out.push(r);
            }
            None => out.push(b),
        }
    }
    out
}

/// Bisects boxes until `m_max` are active.
///
/// Full rounds split every box while the count can double within the cap.
/// The final partial round bins the widest scaled widths into `k_split` bins
/// and splits boxes from the widest bin downward, in encounter order within a
/// bin. Point boxes are never split, so the result may stay below the cap.
pub fn refine(collection: BoxCollection, m_max: usize, k_split: usize, s: &[f64]) -> Result<BoxCollection> {
    let dim = collection.dim();
    if s.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: s.len(),
        });
    }
    check_scaling(s)?;
    let mut boxes = collection.into_boxes();

    while !boxes.is_empty() && 2 * boxes.len() <= m_max {
        let marks: Vec<Option<usize>> = boxes
            .iter()
            .map(|b| {
                let (j, w) = widest(b, s);
                (w > 0.0).then_some(j)
            })
            .collect();
        if marks.iter().all(Option::is_none) {
            return Ok(BoxCollection::from_parts(dim, boxes));
        }
        boxes = split_marked(boxes, &marks);
    }

    let m = boxes.len();
    if m == 0 || m >= m_max {
        return Ok(BoxCollection::from_parts(dim, boxes));
    }
    let mut budget = m_max - m;
    let widest_all: Vec<(usize, f64)> = boxes.iter().map(|b| widest(b, s)).collect();
    let values: Vec<f64> = widest_all.iter().map(|&(_, w)| w).collect();
    let mut marks = vec![None; m];
    'select: for bin in buckets(&values, k_split).iter().rev() {
        for &b in bin {
            if budget == 0 {
                break 'select;
            }
            let (j, w) = widest_all[b];
            if w > 0.0 {
                marks[b] = Some(j);
                budget -= 1;
            }
        }
    }
    Ok(BoxCollection::from_parts(dim, split_marked(boxes, &marks)))
}

/// Removes boxes contained in their bin's representative.
///
/// Centers are binned along the dimension with the largest center spread. The
/// representative of a bin is its box with the largest widest-scaled-width
/// (earliest on ties) and is never removed. Survivors keep encounter order.
pub fn prune(collection: BoxCollection, k_prune: usize, s: &[f64]) -> Result<BoxCollection> {
    let dim = collection.dim();
    if collection.len() < 2 {
        return Ok(collection);
    }
    if s.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: s.len(),
        });
    }
    check_scaling(s)?;
    let boxes = collection.into_boxes();

    let centers: Vec<Vec<f64>> = boxes.iter().map(|b| b.midpoint()).collect::<Result<_>>()?;
    let mut j_ctr = 0;
    let mut best_spread = f64::NEG_INFINITY;
    for j in 0..dim {
        let (lo, hi) = centers.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), c| {
            (l.min(c[j]), h.max(c[j]))
        });
        if hi - lo > best_spread {
            best_spread = hi - lo;
            j_ctr = j;
        }
    }
    let keys: Vec<f64> = centers.iter().map(|c| c[j_ctr]).collect();

    let mut keep = vec![true; boxes.len()];
    for bin in buckets(&keys, k_prune) {
        let Some(&first) = bin.first() else { continue };
        let mut rep = first;
        let mut rep_w = widest(&boxes[first], s).1;
        for &b in &bin[1..] {
            let w = widest(&boxes[b], s).1;
            if w > rep_w {
                rep = b;
                rep_w = w;
            }
        }
        for &b in &bin {
            if b != rep && boxes[rep].contains_box(&boxes[b])? {
                keep[b] = false;
            }
        }
    }
    let survivors = boxes
        .into_iter()
        .zip(keep)
        .filter_map(|(b, k)| k.then_some(b))
        .collect();
    Ok(BoxCollection::from_parts(dim, survivors))
}

/// A configured observer bound to one model.
#[derive(Debug, Clone)]
pub struct Observer {
    model: SystemModel,
    cfg: ObserverConfig,
    scaling: Vec<f64>,
}

impl Observer {
    pub fn new(model: SystemModel, cfg: ObserverConfig) -> Result<Self> {
        cfg.validate()?;
        let scaling = match &cfg.scaling {
            Some(s) if s.len() != model.state_dim() => {
                return Err(Error::DimensionMismatch {
                    expected: model.state_dim(),
                    found: s.len(),
                })
            }
            Some(s) => s.clone(),
            None => default_scaling(model.initial_set())?,
        };
        Ok(Observer {
            model,
            cfg,
            scaling,
        })
    }

    pub fn model(&self) -> &SystemModel {
        &self.model
    }

    pub fn config(&self) -> &ObserverConfig {
        &self.cfg
    }

    pub fn scaling(&self) -> &[f64] {
        &self.scaling
    }

    pub fn strips(&self, y: &[f64]) -> Result<StripSet> {
        StripSet::new(self.model.c().clone(), y.to_vec(), self.model.noise().clone())
    }

    /// Contracts the initial set against `y_0`.
    pub fn initialize(&self, y0: &[f64]) -> Result<BoxCollection> {
        let out = contract_initial(
            self.model.initial_set(),
            &self.strips(y0)?,
            self.cfg.i_max,
            self.cfg.rounding,
        )?;
        if out.is_empty() {
            return Err(Error::InconsistentMeasurements);
        }
        Ok(out)
    }

    pub fn refine(&self, collection: BoxCollection) -> Result<BoxCollection> {
        refine(collection, self.cfg.m_max, self.cfg.k_split, &self.scaling)
    }

    /// Guards and predicts every box; order is preserved.
    pub fn predict(&self, collection: &BoxCollection, u: &[f64]) -> Result<BoxCollection> {
        let w = self.model.disturbance();
        let boxes = collection
            .iter()
            .map(|b| {
                let guarded = self.model.dynamics().domain_guard(b)?;
                mean_value_enclosure(&self.model, &guarded, u, w, self.cfg.rounding)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BoxCollection::from_parts(collection.dim(), boxes))
    }

    pub fn correct(&self, collection: BoxCollection, y: &[f64]) -> Result<BoxCollection> {
        gs_contract(collection, &self.strips(y)?, self.cfg.i_max, self.cfg.rounding)
    }

    pub fn prune(&self, collection: BoxCollection) -> Result<BoxCollection> {
        prune(collection, self.cfg.k_prune, &self.scaling)
    }

    /// One refine → predict → contract → prune cycle from `X_k` to `X_{k+1}`.
    pub fn step(&self, collection: BoxCollection, u: &[f64], y_next: &[f64]) -> Result<BoxCollection> {
        if collection.is_empty() {
            return Err(Error::EmptyCollection);
        }
        let refined = self.refine(collection)?;
        let predicted = self.predict(&refined, u)?;
        let corrected = self.correct(predicted, y_next)?;
        if corrected.is_empty() {
            return Err(Error::InconsistentMeasurements);
        }
        self.prune(corrected)
    }

    /// Runs the observer over `inputs` (length N) and `measurements` (length N+1).
    ///
    /// Errors carry the index of the step at which they occurred.
    pub fn run(&self, inputs: &[Vec<f64>], measurements: &[Vec<f64>]) -> Result<Vec<BoxCollection>> {
        if measurements.len() != inputs.len() + 1 {
            return Err(Error::DimensionMismatch {
                expected: inputs.len() + 1,
                found: measurements.len(),
            });
        }
        let mut out = Vec::with_capacity(measurements.len());
        out.push(self.initialize(&measurements[0]).map_err(|e| e.at_step(0))?);
        for (k, u) in inputs.iter().enumerate() {
            let current = out[k].clone();
            let next = self
                .step(current, u, &measurements[k + 1])
                .map_err(|e| e.at_step(k + 1))?;
            out.push(next);
        }
        Ok(out)
    }
}

/// Free-function form of [`Observer::run`].
pub fn run(
    model: &SystemModel,
    cfg: &ObserverConfig,
    inputs: &[Vec<f64>],
    measurements: &[Vec<f64>],
) -> Result<Vec<BoxCollection>> {
    Observer::new(model.clone(), cfg.clone())?.run(inputs, measurements)
}
