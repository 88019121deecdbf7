//! System models and the first-order mean-value predictor.
//!
//! A model advances `x⁺ = f(x, u, w)` with a known input `u` and a disturbance
//! `w` bounded by the box `W`. Prediction encloses `f` over `X × W` by
//!
//! ```text
//! f(c) + J(X × W) · ([X; W] − c),   c = (mid X, mid W)
//! ```
//!
//! where `J` is an interval enclosure of `∂f/∂[x; w]` supplied by the model.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalBox, Rounding};

/// Dense row-major real matrix.
#[derive(Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RealMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        RealMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    /// Rows of the `n × n` identity picked by `indices` (0-based).
    pub fn selection(n: usize, indices: &[usize]) -> Self {
        let mut m = RealMatrix::zeros(indices.len(), n);
        for (i, &j) in indices.iter().enumerate() {
            m.set(i, j, 1.0);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl fmt::Debug for RealMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| self.row(i)))
            .finish()
    }
}

/// Dense row-major matrix of intervals.
#[derive(Clone, PartialEq)]
pub struct IntervalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Interval>,
}

impl IntervalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntervalMatrix {
            rows,
            cols,
            entries: vec![Interval::ZERO; rows * cols],
        }
    }

    pub fn from_real(m: &RealMatrix) -> Self {
        IntervalMatrix {
            rows: m.rows,
            cols: m.cols,
            entries: m.data.iter().copied().map(Interval::point).collect(),
        }
    }

    pub fn from_rows(rows: Vec<Vec<Interval>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        IntervalMatrix {
            rows: rows.len(),
            cols,
            entries: rows.concat(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Interval {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Interval) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Interval] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Whether every entry of `self` encloses the corresponding real entry.
    pub fn encloses(&self, m: &[Vec<f64>]) -> bool {
        m.len() == self.rows
            && m.iter().enumerate().all(|(i, row)| {
                row.len() == self.cols
                    && row.iter().enumerate().all(|(j, &v)| self.get(i, j).contains(v))
            })
    }
}

impl fmt::Debug for IntervalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| self.row(i)))
            .finish()
    }
}

/// `J · v` with interval arithmetic; row `i` is `Σ_j J[i][j]·v_j` in index order.
///
/// Point-zero entries contribute nothing and are skipped.
pub fn interval_matvec(j: &IntervalMatrix, v: &IntervalBox, r: Rounding) -> Result<IntervalBox> {
    if j.cols != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: j.cols,
            found: v.dim(),
        });
    }
    let vc = v.components();
    Ok((0..j.rows)
        .map(|i| {
            j.row(i)
                .iter()
                .zip(vc)
                .filter(|(a, _)| !(a.lo() == 0.0 && a.hi() == 0.0))
                .fold(Interval::ZERO, |acc, (&a, &b)| r.add(acc, r.mul(a, b)))
        })
        .collect())
}

/// State-transition map of a discrete-time system.
///
/// `step_enclosure` is the natural interval extension of `step`; it must use the
/// same operation order so that on point boxes in fast mode both agree exactly.
pub trait Dynamics: Send + Sync + fmt::Debug {
    fn state_dim(&self) -> usize;

    fn input_dim(&self) -> usize;

    fn step(&self, x: &[f64], u: &[f64], w: &[f64]) -> Vec<f64>;

    fn step_enclosure(
        &self,
        x: &IntervalBox,
        u: &[f64],
        w: &IntervalBox,
        r: Rounding,
    ) -> Result<IntervalBox>;

    /// Enclosure of `∂f/∂[x; w]` over `X × W`, an `n × 2n` interval matrix.
    fn jacobian(
        &self,
        x: &IntervalBox,
        u: &[f64],
        w: &IntervalBox,
        r: Rounding,
    ) -> Result<IntervalMatrix>;

    /// Restricts a state box to the physical domain before prediction.
    fn domain_guard(&self, x: &IntervalBox) -> Result<IntervalBox> {
        Ok(x.clone())
    }

    /// Checks a point state against the physical domain.
    fn validate_state(&self, _x: &[f64]) -> Result<()> {
        Ok(())
    }
}

/// Dynamics together with the measurement matrix and the bounded sets.
#[derive(Clone, Debug)]
pub struct SystemModel {
    dynamics: Arc<dyn Dynamics>,
    c: RealMatrix,
    w: IntervalBox,
    v: IntervalBox,
    x0: IntervalBox,
}

impl SystemModel {
    pub fn new(
        dynamics: Arc<dyn Dynamics>,
        c: RealMatrix,
        w: IntervalBox,
        v: IntervalBox,
        x0: IntervalBox,
    ) -> Result<Self> {
        let n = dynamics.state_dim();
        let check = |expected: usize, found: usize| {
            if expected == found {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected, found })
            }
        };
        check(n, c.cols())?;
        check(n, w.dim())?;
        check(n, x0.dim())?;
        check(c.rows(), v.dim())?;
        if w.is_empty() || v.is_empty() || x0.is_empty() {
            return Err(Error::EmptyBox);
        }
        Ok(SystemModel {
            dynamics,
            c,
            w,
            v,
            x0,
        })
    }

    pub fn dynamics(&self) -> &dyn Dynamics {
        self.dynamics.as_ref()
    }

    pub fn state_dim(&self) -> usize {
        self.dynamics.state_dim()
    }

    pub fn input_dim(&self) -> usize {
        self.dynamics.input_dim()
    }

    pub fn meas_dim(&self) -> usize {
        self.c.rows()
    }

    pub fn c(&self) -> &RealMatrix {
        &self.c
    }

    pub fn disturbance(&self) -> &IntervalBox {
        &self.w
    }

    pub fn noise(&self) -> &IntervalBox {
        &self.v
    }

    pub fn initial_set(&self) -> &IntervalBox {
        &self.x0
    }

    pub fn with_sets(&self, w: IntervalBox, v: IntervalBox, x0: IntervalBox) -> Result<Self> {
        SystemModel::new(self.dynamics.clone(), self.c.clone(), w, v, x0)
    }

    pub fn step(&self, x: &[f64], u: &[f64], w: &[f64]) -> Vec<f64> {
        self.dynamics.step(x, u, w)
    }

    pub fn measure(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        self.c.mul_vec(x).iter().zip(v).map(|(a, b)| a + b).collect()
    }
}

/// Mean-value enclosure of `f` over `X × W` with the input held fixed.
///
/// `X` must already lie inside the model's domain (see [`Dynamics::domain_guard`]).
pub fn mean_value_enclosure(
    model: &SystemModel,
    x: &IntervalBox,
    u: &[f64],
    w: &IntervalBox,
    r: Rounding,
) -> Result<IntervalBox> {
    let n = model.state_dim();
    if x.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.dim(),
        });
    }
    let cx = x.midpoint()?;
    let cw = w.midpoint()?;
    let f = model.dynamics();
    let fc = f.step_enclosure(&IntervalBox::point(&cx), u, &IntervalBox::point(&cw), r)?;
    let jac = f.jacobian(x, u, w, r)?;

    let dz: IntervalBox = x
        .iter()
        .zip(&cx)
        .chain(w.iter().zip(&cw))
        .map(|(&xi, &ci)| r.sub(xi, Interval::point(ci)))
        .collect();
    let lin = interval_matvec(&jac, &dz, r)?;
    Ok(fc
        .iter()
        .zip(lin.iter())
        .map(|(&a, &b)| r.add(a, b))
        .collect())
}

/// `x⁺ = A x + w`, mainly useful as a reference model.
#[derive(Debug, Clone)]
pub struct LinearDynamics {
    a: RealMatrix,
}

impl LinearDynamics {
    pub fn new(a: RealMatrix) -> Self {
        assert_eq!(a.rows(), a.cols(), "state matrix must be square");
        LinearDynamics { a }
    }
}

impl Dynamics for LinearDynamics {
    fn state_dim(&self) -> usize {
        self.a.rows()
    }

    fn input_dim(&self) -> usize {
        0
    }

    fn step(&self, x: &[f64], _u: &[f64], w: &[f64]) -> Vec<f64> {
        self.a
            .mul_vec(x)
            .iter()
            .zip(w)
            .map(|(ax, wi)| ax + wi)
            .collect()
    }

    fn step_enclosure(
        &self,
        x: &IntervalBox,
        _u: &[f64],
        w: &IntervalBox,
        r: Rounding,
    ) -> Result<IntervalBox> {
        let ax = interval_matvec(&IntervalMatrix::from_real(&self.a), x, r)?;
        Ok(ax.iter().zip(w.iter()).map(|(&a, &b)| r.add(a, b)).collect())
    }

    fn jacobian(
        &self,
        _x: &IntervalBox,
        _u: &[f64],
        _w: &IntervalBox,
        _r: Rounding,
    ) -> Result<IntervalMatrix> {
        let n = self.a.rows();
        let mut j = IntervalMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for k in 0..n {
                j.set(i, k, Interval::point(self.a.get(i, k)));
            }
            j.set(i, n + i, Interval::point(1.0));
        }
        Ok(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation_model() -> SystemModel {
        let a = RealMatrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]);
        SystemModel::new(
            Arc::new(LinearDynamics::new(a)),
            RealMatrix::from_rows(&[vec![1.0, 0.0]]),
            IntervalBox::unit_scaled(2, 0.0),
            IntervalBox::unit_scaled(1, 0.1),
            IntervalBox::unit_scaled(2, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn matvec_examples() {
        let id = IntervalMatrix::from_real(&RealMatrix::identity(2));
        let v = IntervalBox::from_bounds(&[(-1.0, 3.0), (2.0, 5.0)]);
        assert_eq!(interval_matvec(&id, &v, Rounding::Fast).unwrap(), v);

        let j = IntervalMatrix::from_rows(vec![vec![Interval::new(0.0, 1.0)]]);
        let v = IntervalBox::from_bounds(&[(-1.0, 1.0)]);
        // endpoint products {0, 0, -1, 1}
        assert_eq!(
            interval_matvec(&j, &v, Rounding::Fast).unwrap(),
            IntervalBox::from_bounds(&[(-1.0, 1.0)])
        );

        let j = IntervalMatrix::from_rows(vec![vec![Interval::point(2.0), Interval::point(0.0)]]);
        let v = IntervalBox::from_bounds(&[(1.0, 2.0), (5.0, 9.0)]);
        assert_eq!(
            interval_matvec(&j, &v, Rounding::Fast).unwrap(),
            IntervalBox::from_bounds(&[(2.0, 4.0)])
        );

        let short = IntervalBox::from_bounds(&[(1.0, 2.0)]);
        assert!(matches!(
            interval_matvec(&j, &short, Rounding::Fast),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn linear_enclosure_equals_matvec_oracle() {
        let model = rotation_model();
        let x = IntervalBox::unit_scaled(2, 1.0);
        let got = mean_value_enclosure(&model, &x, &[], model.disturbance(), Rounding::Fast).unwrap();
        // oracle: A·X with A = [[0,1],[-1,0]] and f(c) = 0
        assert_eq!(got, IntervalBox::unit_scaled(2, 1.0));
    }

    #[test]
    fn point_box_collapses_to_point_evaluation() {
        let model = rotation_model();
        let x0 = [0.3, -0.7];
        let got = mean_value_enclosure(
            &model,
            &IntervalBox::point(&x0),
            &[],
            &IntervalBox::point(&[0.0, 0.0]),
            Rounding::Fast,
        )
        .unwrap();
        assert_eq!(got, IntervalBox::point(&model.step(&x0, &[], &[0.0, 0.0])));
    }

    #[test]
    fn empty_box_is_rejected() {
        let model = rotation_model();
        let x = IntervalBox::new(vec![Interval::EMPTY, Interval::new(0.0, 1.0)]);
        assert_eq!(
            mean_value_enclosure(&model, &x, &[], model.disturbance(), Rounding::Fast),
            Err(Error::EmptyBox)
        );
    }

    #[test]
    fn model_rejects_mismatched_sets() {
        let a = RealMatrix::identity(2);
        let err = SystemModel::new(
            Arc::new(LinearDynamics::new(a)),
            RealMatrix::from_rows(&[vec![1.0, 0.0]]),
            IntervalBox::unit_scaled(3, 0.0),
            IntervalBox::unit_scaled(1, 0.1),
            IntervalBox::unit_scaled(2, 1.0),
        )
        .unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
    }
}
