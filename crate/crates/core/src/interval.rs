//! Closed intervals and interval boxes.
//!
//! Arithmetic goes through a [`Rounding`] context. In [`Rounding::Fast`] the
//! endpoints are plain IEEE results. In [`Rounding::Rigorous`] every computed
//! endpoint is moved one ULP away from the interior with `next_down` /
//! `next_up`, which is enough to cover the half-ULP error of a correctly
//! rounded operation. Intersections and hulls only select existing endpoints
//! and are therefore exact in both modes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floating-point policy for interval endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    #[default]
    Fast,
    Rigorous,
}

/// A closed real interval `[lo, hi]`, or the empty set.
#[derive(Clone, Copy)]
pub struct Interval {
    lo: f64,
    hi: f64,
    empty: bool,
}

impl Interval {
    pub const EMPTY: Interval = Interval {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
        empty: true,
    };

    pub const ZERO: Interval = Interval {
        lo: 0.0,
        hi: 0.0,
        empty: false,
    };

    /// Panics if `lo > hi` or either bound is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
        Interval { lo, hi, empty: false }
    }

    pub fn try_new(lo: f64, hi: f64) -> Option<Self> {
        (lo <= hi).then_some(Interval { lo, hi, empty: false })
    }

    pub fn point(x: f64) -> Self {
        Interval::new(x, x)
    }

    /// `[center - radius, center + radius]`.
    pub fn centered(center: f64, radius: f64) -> Self {
        Interval::new(center - radius, center + radius)
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        (!self.empty).then_some((self.lo, self.hi))
    }

    /// Zero for the empty interval.
    pub fn width(&self) -> f64 {
        if self.empty {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn mid(&self) -> f64 {
        let m = 0.5 * (self.lo + self.hi);
        m.clamp(self.lo, self.hi)
    }

    pub fn radius(&self) -> f64 {
        0.5 * self.width()
    }

    pub fn contains(&self, x: f64) -> bool {
        !self.empty && self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// `other ⊆ self`. The empty set is a subset of everything.
    pub fn encloses(&self, other: &Interval) -> bool {
        other.empty || (!self.empty && self.lo <= other.lo && other.hi <= self.hi)
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        if self.empty || other.empty {
            return Interval::EMPTY;
        }
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo > hi {
            Interval::EMPTY
        } else {
            Interval { lo, hi, empty: false }
        }
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        match (self.empty, other.empty) {
            (true, _) => *other,
            (_, true) => *self,
            _ => Interval {
                lo: self.lo.min(other.lo),
                hi: self.hi.max(other.hi),
                empty: false,
            },
        }
    }

    /// Exact negation.
    pub fn neg(&self) -> Interval {
        if self.empty {
            Interval::EMPTY
        } else {
            Interval {
                lo: -self.hi,
                hi: -self.lo,
                empty: false,
            }
        }
    }
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        match (self.empty, other.empty) {
            (true, true) => true,
            (false, false) => self.lo == other.lo && self.hi == other.hi,
            _ => false,
        }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.empty {
            write!(f, "∅")
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

impl Rounding {
    #[inline]
    fn down(self, x: f64) -> f64 {
        match self {
            Rounding::Fast => x,
            Rounding::Rigorous => x.next_down(),
        }
    }

    #[inline]
    fn up(self, x: f64) -> f64 {
        match self {
            Rounding::Fast => x,
            Rounding::Rigorous => x.next_up(),
        }
    }

    #[inline]
    fn outward(self, lo: f64, hi: f64) -> Interval {
        Interval {
            lo: self.down(lo),
            hi: self.up(hi),
            empty: false,
        }
    }

    pub fn add(self, a: Interval, b: Interval) -> Interval {
        if a.empty || b.empty {
            return Interval::EMPTY;
        }
        self.outward(a.lo + b.lo, a.hi + b.hi)
    }

    pub fn sub(self, a: Interval, b: Interval) -> Interval {
        if a.empty || b.empty {
            return Interval::EMPTY;
        }
        self.outward(a.lo - b.hi, a.hi - b.lo)
    }

    pub fn mul(self, a: Interval, b: Interval) -> Interval {
        if a.empty || b.empty {
            return Interval::EMPTY;
        }
        let p = [a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi];
        let (lo, hi) = min_max(&p);
        self.outward(lo, hi)
    }

    /// `k * a` for a real scalar `k`.
    pub fn scale(self, k: f64, a: Interval) -> Interval {
        if a.empty {
            return Interval::EMPTY;
        }
        let (x, y) = (k * a.lo, k * a.hi);
        self.outward(x.min(y), x.max(y))
    }

    pub fn div(self, a: Interval, b: Interval) -> Result<Interval> {
        if b.contains_zero() {
            return Err(Error::DivisorContainsZero);
        }
        if a.empty || b.empty {
            return Ok(Interval::EMPTY);
        }
        let q = [a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi];
        let (lo, hi) = min_max(&q);
        Ok(self.outward(lo, hi))
    }

    pub fn sqr(self, a: Interval) -> Interval {
        if a.empty {
            return Interval::EMPTY;
        }
        let (l2, h2) = (a.lo * a.lo, a.hi * a.hi);
        if a.lo >= 0.0 {
            self.outward(l2, h2)
        } else if a.hi <= 0.0 {
            self.outward(h2, l2)
        } else {
            Interval {
                lo: 0.0,
                hi: self.up(l2.max(h2)),
                empty: false,
            }
        }
    }

    /// Square root with the lower bound clamped at zero.
    ///
    /// Callers must already have intersected with the nonnegative reals when the
    /// negative part of `a` is meaningful.
    pub fn sqrt(self, a: Interval) -> Result<Interval> {
        if a.empty {
            return Ok(Interval::EMPTY);
        }
        if a.hi < 0.0 {
            return Err(Error::NegativeDomain);
        }
        let lo = self.down(a.lo.max(0.0).sqrt()).max(0.0);
        Ok(Interval {
            lo,
            hi: self.up(a.hi.sqrt()),
            empty: false,
        })
    }
}

#[inline]
fn min_max(v: &[f64; 4]) -> (f64, f64) {
    let lo = v[0].min(v[1]).min(v[2].min(v[3]));
    let hi = v[0].max(v[1]).max(v[2].max(v[3]));
    (lo, hi)
}

/// An axis-aligned box: an interval vector.
#[derive(Clone, PartialEq)]
pub struct IntervalBox {
    components: Vec<Interval>,
}

impl IntervalBox {
    pub fn new(components: Vec<Interval>) -> Self {
        IntervalBox { components }
    }

    pub fn from_bounds(bounds: &[(f64, f64)]) -> Self {
        IntervalBox::new(bounds.iter().map(|&(l, h)| Interval::new(l, h)).collect())
    }

    pub fn point(x: &[f64]) -> Self {
        IntervalBox::new(x.iter().copied().map(Interval::point).collect())
    }

    /// `center ⊕ radius·Bⁿ`.
    pub fn centered(center: &[f64], radius: &[f64]) -> Self {
        assert_eq!(center.len(), radius.len());
        IntervalBox::new(
            center
                .iter()
                .zip(radius)
                .map(|(&c, &r)| Interval::centered(c, r))
                .collect(),
        )
    }

    /// `radius·Bⁿ`, the symmetric box around the origin.
    pub fn unit_scaled(n: usize, radius: f64) -> Self {
        IntervalBox::new(vec![Interval::new(-radius, radius); n])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.iter().any(Interval::is_empty)
    }

    #[inline]
    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    #[inline]
    pub fn components_mut(&mut self) -> &mut [Interval] {
        &mut self.components
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.components.iter()
    }

    fn require_non_empty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptyBox)
        } else {
            Ok(())
        }
    }

    fn require_dim(&self, other: &IntervalBox) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub fn midpoint(&self) -> Result<Vec<f64>> {
        self.require_non_empty()?;
        Ok(self.components.iter().map(Interval::mid).collect())
    }

    pub fn width(&self) -> Result<Vec<f64>> {
        self.require_non_empty()?;
        Ok(self.components.iter().map(Interval::width).collect())
    }

    pub fn radius(&self) -> Result<Vec<f64>> {
        self.require_non_empty()?;
        Ok(self.components.iter().map(Interval::radius).collect())
    }

    /// Smallest box enclosing both.
    pub fn hull(&self, other: &IntervalBox) -> Result<IntervalBox> {
        self.require_dim(other)?;
        self.require_non_empty()?;
        other.require_non_empty()?;
        Ok(IntervalBox::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.hull(b))
                .collect(),
        ))
    }

    pub fn intersect(&self, other: &IntervalBox) -> Result<IntervalBox> {
        self.require_dim(other)?;
        Ok(IntervalBox::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.intersect(b))
                .collect(),
        ))
    }

    /// `inner ⊆ self`, compared endpoint by endpoint.
    pub fn contains_box(&self, inner: &IntervalBox) -> Result<bool> {
        self.require_dim(inner)?;
        Ok(self
            .components
            .iter()
            .zip(&inner.components)
            .all(|(o, i)| o.encloses(i)))
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.components.iter().zip(x).all(|(c, &v)| c.contains(v))
    }

    /// Product of the component widths.
    pub fn volume(&self) -> f64 {
        self.components.iter().map(Interval::width).product()
    }
}

impl std::ops::Index<usize> for IntervalBox {
    type Output = Interval;

    fn index(&self, i: usize) -> &Interval {
        &self.components[i]
    }
}

impl std::ops::IndexMut<usize> for IntervalBox {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.components[i]
    }
}

impl FromIterator<Interval> for IntervalBox {
    fn from_iter<I: IntoIterator<Item = Interval>>(iter: I) -> Self {
        IntervalBox::new(iter.into_iter().collect())
    }
}

impl fmt::Debug for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, "×")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Box containment as a free function; see [`IntervalBox::contains_box`].
pub fn box_contains(outer: &IntervalBox, inner: &IntervalBox) -> Result<bool> {
    outer.contains_box(inner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const F: Rounding = Rounding::Fast;
    const R: Rounding = Rounding::Rigorous;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi)
    }

    #[test]
    fn add_examples() {
        assert_eq!(F.add(iv(1.0, 2.0), iv(3.0, 5.0)), iv(4.0, 7.0));
        assert_eq!(F.add(iv(0.0, 0.0), iv(-3.5, 2.25)), iv(-3.5, 2.25));
        assert_eq!(F.add(iv(-1.0, 1.0), iv(-1.0, 1.0)), iv(-2.0, 2.0));
        assert!(F.add(Interval::EMPTY, iv(0.0, 1.0)).is_empty());
    }

    #[test]
    fn mul_examples_match_endpoint_enumeration() {
        let cases = [
            (iv(-1.0, 2.0), iv(3.0, 4.0)),
            (iv(1.0, 1.0), iv(-2.5, 7.0)),
            (iv(-1.0, 1.0), iv(-1.0, 1.0)),
        ];
        for (a, b) in cases {
            let prods = [a.lo() * b.lo(), a.lo() * b.hi(), a.hi() * b.lo(), a.hi() * b.hi()];
            let lo = prods.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = prods.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(F.mul(a, b), iv(lo, hi));
        }
        assert_eq!(F.mul(iv(-1.0, 2.0), iv(3.0, 4.0)), iv(-4.0, 8.0));
        assert_eq!(F.mul(iv(-1.0, 1.0), iv(-1.0, 1.0)), iv(-1.0, 1.0));
    }

    #[test]
    fn div_examples() {
        assert_eq!(F.div(iv(2.0, 4.0), iv(2.0, 2.0)).unwrap(), iv(1.0, 2.0));
        assert_eq!(F.div(iv(0.3, 0.7), iv(-1.0, -1.0)).unwrap(), iv(-0.7, -0.3));
        assert_eq!(F.div(iv(1.0, 2.0), iv(0.0, 1.0)), Err(Error::DivisorContainsZero));
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(F.sqrt(iv(4.0, 9.0)).unwrap(), iv(2.0, 3.0));
        assert_eq!(F.sqrt(iv(0.0, 0.0)).unwrap(), iv(0.0, 0.0));
        assert_eq!(F.sqrt(iv(-0.1, 4.0)).unwrap(), iv(0.0, 2.0));
        assert_eq!(F.sqrt(iv(-2.0, -0.5)), Err(Error::NegativeDomain));
        // rigorous lower bound never drops below zero
        assert_eq!(R.sqrt(iv(0.0, 4.0)).unwrap().lo(), 0.0);
    }

    #[test]
    fn sqrt_contains_sampled_roots() {
        let r = F.sqrt(iv(-0.1, 4.0)).unwrap();
        for i in 0..=1000 {
            let x = 4.0 * i as f64 / 1000.0;
            assert!(r.contains(x.sqrt()));
        }
    }

    #[test]
    fn sqr_handles_sign_cases() {
        assert_eq!(F.sqr(iv(-3.0, 2.0)), iv(0.0, 9.0));
        assert_eq!(F.sqr(iv(-3.0, -2.0)), iv(4.0, 9.0));
        assert_eq!(F.sqr(iv(2.0, 3.0)), iv(4.0, 9.0));
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(iv(0.0, 2.0).intersect(&iv(1.0, 3.0)), iv(1.0, 2.0));
        assert!(iv(0.0, 1.0).intersect(&iv(2.0, 3.0)).is_empty());
        assert_eq!(iv(0.0, 5.0).intersect(&iv(0.0, 5.0)), iv(0.0, 5.0));
        assert_eq!(Interval::EMPTY, iv(0.0, 1.0).intersect(&iv(2.0, 3.0)));
    }

    #[test]
    fn box_contains_examples() {
        let outer = IntervalBox::from_bounds(&[(0.0, 4.0), (0.0, 4.0)]);
        let inner = IntervalBox::from_bounds(&[(1.0, 2.0), (1.0, 2.0)]);
        let over = IntervalBox::from_bounds(&[(1.0, 5.0), (1.0, 2.0)]);
        assert!(box_contains(&outer, &inner).unwrap());
        assert!(!box_contains(&outer, &over).unwrap());
        assert!(box_contains(&outer, &outer).unwrap());
        let short = IntervalBox::from_bounds(&[(0.0, 1.0)]);
        assert!(matches!(
            box_contains(&outer, &short),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn midpoint_width_hull() {
        let a = IntervalBox::from_bounds(&[(0.0, 2.0), (-1.0, 1.0)]);
        assert_eq!(a.midpoint().unwrap(), vec![1.0, 0.0]);
        assert_eq!(a.width().unwrap(), vec![2.0, 2.0]);
        let b = IntervalBox::from_bounds(&[(0.0, 1.0), (0.0, 1.0)]);
        let c = IntervalBox::from_bounds(&[(2.0, 3.0), (0.0, 1.0)]);
        assert_eq!(
            b.hull(&c).unwrap(),
            IntervalBox::from_bounds(&[(0.0, 3.0), (0.0, 1.0)])
        );
        let e = IntervalBox::new(vec![Interval::EMPTY, iv(0.0, 1.0)]);
        assert!(e.is_empty());
        assert_eq!(e.midpoint(), Err(Error::EmptyBox));
        assert_eq!(e.width(), Err(Error::EmptyBox));
    }

    fn interval() -> impl Strategy<Value = Interval> {
        (-50.0f64..50.0, 0.0f64..20.0).prop_map(|(lo, w)| Interval::new(lo, lo + w))
    }

    fn positive_interval() -> impl Strategy<Value = Interval> {
        (0.01f64..50.0, 0.0f64..20.0).prop_map(|(lo, w)| Interval::new(lo, lo + w))
    }

    /// A sub-interval of `a` chosen by two fractions.
    fn shrink(a: Interval, s: f64, t: f64) -> Interval {
        let (s, t) = (s.min(t), s.max(t));
        Interval::new(a.lo() + s * a.width(), (a.lo() + t * a.width()).min(a.hi()))
    }

    fn sample(a: Interval, t: f64) -> f64 {
        (a.lo() + t * a.width()).clamp(a.lo(), a.hi())
    }

    type BinOp = fn(Rounding, Interval, Interval) -> Interval;

    fn binary_ops() -> Vec<(&'static str, BinOp, fn(f64, f64) -> f64)> {
        vec![
            ("add", Rounding::add, |x, y| x + y),
            ("sub", Rounding::sub, |x, y| x - y),
            ("mul", Rounding::mul, |x, y| x * y),
        ]
    }

    proptest! {
        #[test]
        fn inclusion_monotone(a in interval(), b in interval(), s in 0.0f64..1.0, t in 0.0f64..1.0, u in 0.0f64..1.0, v in 0.0f64..1.0) {
            let (a_in, b_in) = (shrink(a, s, t), shrink(b, u, v));
            for rounding in [F, R] {
                for (name, op, _) in binary_ops() {
                    prop_assert!(op(rounding, a, b).encloses(&op(rounding, a_in, b_in)), "{name}");
                }
            }
        }

        #[test]
        fn div_inclusion_monotone(a in interval(), b in positive_interval(), s in 0.0f64..1.0, t in 0.0f64..1.0) {
            let b_in = shrink(b, s, t);
            let a_in = shrink(a, t, s);
            prop_assert!(F.div(a, b).unwrap().encloses(&F.div(a_in, b_in).unwrap()));
        }

        #[test]
        fn sampled_points_are_enclosed(a in interval(), b in interval(), ts in proptest::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 64)) {
            for (name, op, point) in binary_ops() {
                let r = op(R, a, b);
                for &(s, t) in &ts {
                    let (x, y) = (sample(a, s), sample(b, t));
                    prop_assert!(r.contains(point(x, y)), "{name}: {x} {y} -> {r}");
                }
            }
        }

        #[test]
        fn rigorous_encloses_fast(a in interval(), b in positive_interval()) {
            for (_, op, _) in binary_ops() {
                prop_assert!(op(R, a, b).encloses(&op(F, a, b)));
            }
            prop_assert!(R.div(a, b).unwrap().encloses(&F.div(a, b).unwrap()));
            prop_assert!(R.sqrt(b).unwrap().encloses(&F.sqrt(b).unwrap()));
            prop_assert!(R.sqr(a).encloses(&F.sqr(a)));
        }

        #[test]
        fn intersect_laws(a in interval(), b in interval(), c in interval()) {
            prop_assert_eq!(a.intersect(&b), b.intersect(&a));
            prop_assert_eq!(a.intersect(&b).intersect(&c), a.intersect(&b.intersect(&c)));
            prop_assert_eq!(a.intersect(&a), a);
            prop_assert!(a.intersect(&Interval::EMPTY).is_empty());
        }
    }

    #[test]
    fn soundness_by_sampling_ten_thousand_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let a = iv(-1.7, 2.3);
        let b = iv(0.4, 3.9);
        for _ in 0..10_000 {
            let x = rng.random_range(a.lo()..=a.hi());
            let y = rng.random_range(b.lo()..=b.hi());
            assert!(R.add(a, b).contains(x + y));
            assert!(R.sub(a, b).contains(x - y));
            assert!(R.mul(a, b).contains(x * y));
            assert!(R.div(a, b).unwrap().contains(x / y));
            assert!(R.sqr(a).contains(x * x));
            assert!(R.sqrt(b).unwrap().contains(y.sqrt()));
        }
    }
}
