//! Test oracles shared by the integration and acceptance targets.
#![allow(dead_code)]

use ddobs::benchmarks::{TankParams, VdpParams};
use ddobs::{BoxCollection, Interval, IntervalBox, SystemModel};
use rand::Rng;

/// Plain `(lo, hi)` pair, no rounding control.
pub type Iv = (f64, f64);

fn add(a: Iv, b: Iv) -> Iv {
    (a.0 + b.0, a.1 + b.1)
}

fn sub(a: Iv, b: Iv) -> Iv {
    (a.0 - b.1, a.1 - b.0)
}

fn mul(a: Iv, b: Iv) -> Iv {
    let p = [a.0 * b.0, a.0 * b.1, a.1 * b.0, a.1 * b.1];
    (
        p.iter().copied().fold(f64::INFINITY, f64::min),
        p.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    )
}

fn pt(x: f64) -> Iv {
    (x, x)
}

fn sqrt(a: Iv) -> Iv {
    (a.0.max(0.0).sqrt(), a.1.sqrt())
}

fn recip(a: Iv) -> Iv {
    assert!(a.0 > 0.0);
    (1.0 / a.1, 1.0 / a.0)
}

fn mid(a: Iv) -> f64 {
    (0.5 * (a.0 + a.1)).clamp(a.0, a.1)
}

pub enum Plant {
    Vdp(VdpParams),
    Tank(TankParams),
}

impl Plant {
    fn dim(&self) -> usize {
        match self {
            Plant::Vdp(_) => 2,
            Plant::Tank(p) => p.n,
        }
    }

    /// Point map evaluated in plain floating point.
    pub fn step(&self, x: &[f64], u: &[f64], w: &[f64]) -> Vec<f64> {
        match self {
            Plant::Vdp(p) => {
                let x1 = (x[0] + p.h * x[1]) + w[0];
                let x2 = (x[1] + p.h * ((p.mu * (1.0 - x[0] * x[0])) * x[1] - x[0])) + w[1];
                vec![x1, x2]
            }
            Plant::Tank(p) => {
                let q = (2.0 * p.g).sqrt();
                let mut inflow = vec![0.0; p.n];
                for (ch, &t) in p.inflow_tanks.iter().enumerate() {
                    inflow[t - 1] = u[ch];
                }
                (0..p.n)
                    .map(|j| {
                        let k = p.kappa[j] * q;
                        let d = if j == 0 {
                            (-k) * x[0].sqrt() + inflow[0]
                        } else {
                            k * (x[j - 1].sqrt() - x[j].sqrt()) + inflow[j]
                        };
                        (x[j] + p.h * d) + w[j]
                    })
                    .collect()
            }
        }
    }

    /// Dense n × 2n derivative enclosure over `x` (the disturbance enters additively).
    fn jacobian(&self, x: &[Iv]) -> Vec<Vec<Iv>> {
        let n = self.dim();
        let mut jac = vec![vec![pt(0.0); 2 * n]; n];
        for (i, row) in jac.iter_mut().enumerate() {
            row[n + i] = pt(1.0);
        }
        match self {
            Plant::Vdp(p) => {
                let (h, mu) = (p.h, p.mu);
                let sq = {
                    let a = x[0];
                    let (l, u) = (a.0 * a.0, a.1 * a.1);
                    if a.0 >= 0.0 {
                        (l, u)
                    } else if a.1 <= 0.0 {
                        (u, l)
                    } else {
                        (0.0, l.max(u))
                    }
                };
                let scale = |k: f64, a: Iv| mul(pt(k), a);
                jac[0][0] = pt(1.0);
                jac[0][1] = pt(h);
                jac[1][0] = scale(h, sub(scale(-2.0 * mu, mul(x[0], x[1])), pt(1.0)));
                jac[1][1] = add(pt(1.0), scale(h, scale(mu, sub(pt(1.0), sq))));
            }
            Plant::Tank(p) => {
                let q = (2.0 * p.g).sqrt();
                let d: Vec<Iv> = x
                    .iter()
                    .map(|&xj| {
                        assert!(xj.0 >= p.level_floor, "enclosure below the level floor");
                        recip(mul(pt(2.0), sqrt(xj)))
                    })
                    .collect();
                for j in 0..n {
                    let hk = p.h * (p.kappa[j] * q);
                    jac[j][j] = sub(pt(1.0), mul(pt(hk), d[j]));
                    if j > 0 {
                        jac[j][j - 1] = mul(pt(hk), d[j - 1]);
                    }
                }
            }
        }
        jac
    }
}

/// Single-set observer: one box, mean-value prediction and Gauss–Seidel correction.
pub struct SingleSet {
    pub plant: Plant,
    pub c: Vec<Vec<f64>>,
    pub w: Vec<Iv>,
    pub v: Vec<Iv>,
    pub x0: Vec<Iv>,
    pub sweeps: usize,
}

fn ivs(b: &IntervalBox) -> Vec<Iv> {
    b.iter().map(|c| (c.lo(), c.hi())).collect()
}

impl SingleSet {
    pub fn from_model(plant: Plant, model: &SystemModel, sweeps: usize) -> Self {
        let c = (0..model.meas_dim()).map(|i| model.c().row(i).to_vec()).collect();
        SingleSet {
            plant,
            c,
            w: ivs(model.disturbance()),
            v: ivs(model.noise()),
            x0: ivs(model.initial_set()),
            sweeps,
        }
    }

    fn correct(&self, mut x: Vec<Iv>, y: &[f64]) -> Vec<Iv> {
        for _ in 0..self.sweeps {
            for (i, row) in self.c.iter().enumerate() {
                for j in 0..x.len() {
                    if row[j] == 0.0 {
                        continue;
                    }
                    let mut s = pt(0.0);
                    for (l, &cl) in row.iter().enumerate() {
                        if l != j && cl != 0.0 {
                            s = add(s, mul(pt(cl), x[l]));
                        }
                    }
                    let b = sub(sub(pt(y[i]), self.v[i]), s);
                    let (p, q) = (b.0 / row[j], b.1 / row[j]);
                    let a = (p.min(q), p.max(q));
                    let lo = x[j].0.max(a.0);
                    let hi = x[j].1.min(a.1);
                    assert!(lo <= hi, "single-set observer lost the state");
                    x[j] = (lo, hi);
                }
            }
        }
        x
    }

    fn predict(&self, x: &[Iv], u: &[f64]) -> Vec<Iv> {
        let x: Vec<Iv> = match self.plant {
            Plant::Tank(_) => x.iter().map(|&(l, h)| (l.max(0.0), h)).collect(),
            Plant::Vdp(_) => x.to_vec(),
        };
        let cx: Vec<f64> = x.iter().map(|&a| mid(a)).collect();
        let cw: Vec<f64> = self.w.iter().map(|&a| mid(a)).collect();
        let fc = self.plant.step(&cx, u, &cw);
        let dz: Vec<Iv> = x
            .iter()
            .zip(&cx)
            .chain(self.w.iter().zip(&cw))
            .map(|(&a, &c)| sub(a, pt(c)))
            .collect();
        let jac = self.plant.jacobian(&x);
        jac.iter()
            .zip(&fc)
            .map(|(row, &f)| {
                let mut acc = pt(0.0);
                for (&jij, &d) in row.iter().zip(&dz) {
                    if jij != (0.0, 0.0) {
                        acc = add(acc, mul(jij, d));
                    }
                }
                add(pt(f), acc)
            })
            .collect()
    }

    pub fn run(&self, inputs: &[Vec<f64>], measurements: &[Vec<f64>]) -> Vec<Vec<Iv>> {
        let mut out = vec![self.correct(self.x0.clone(), &measurements[0])];
        for (k, u) in inputs.iter().enumerate() {
            let pred = self.predict(&out[k], u);
            out.push(self.correct(pred, &measurements[k + 1]));
        }
        out
    }
}

pub fn uniform_in(rng: &mut impl Rng, b: &IntervalBox) -> Vec<f64> {
    b.iter()
        .map(|c| if c.width() > 0.0 { rng.random_range(c.lo()..=c.hi()) } else { c.lo() })
        .collect()
}

/// Random box inside `[-range, range]^n`; a component is degenerate with probability `p_point`.
pub fn random_box(rng: &mut impl Rng, n: usize, range: f64, p_point: f64) -> IntervalBox {
    (0..n)
        .map(|_| {
            let a = rng.random_range(-range..range);
            if rng.random_bool(p_point) {
                Interval::point(a)
            } else {
                let b = rng.random_range(-range..range);
                if a == b {
                    Interval::point(a)
                } else {
                    Interval::new(a.min(b), a.max(b))
                }
            }
        })
        .collect()
}

/// Random box inside `outer`.
pub fn random_sub_box(rng: &mut impl Rng, outer: &IntervalBox) -> IntervalBox {
    outer
        .iter()
        .map(|c| {
            let a = if c.width() > 0.0 { rng.random_range(c.lo()..=c.hi()) } else { c.lo() };
            let b = if c.width() > 0.0 { rng.random_range(c.lo()..=c.hi()) } else { c.lo() };
            Interval::new(a.min(b), a.max(b))
        })
        .collect()
}

/// Random collection with some nested and some duplicated members.
pub fn random_collection(rng: &mut impl Rng, n: usize, count: usize, p_point: f64) -> BoxCollection {
    let mut boxes: Vec<IntervalBox> = Vec::with_capacity(count);
    while boxes.len() < count {
        let roll: f64 = rng.random();
        let b = if !boxes.is_empty() && roll < 0.3 {
            let parent = boxes[rng.random_range(0..boxes.len())].clone();
            random_sub_box(rng, &parent)
        } else if !boxes.is_empty() && roll < 0.35 {
            boxes[rng.random_range(0..boxes.len())].clone()
        } else {
            random_box(rng, n, 5.0, p_point)
        };
        boxes.push(b);
    }
    BoxCollection::new(n, boxes).unwrap()
}

/// Points drawn mostly from the members, plus some from the hull.
pub fn probe_points(rng: &mut impl Rng, coll: &BoxCollection, count: usize) -> Vec<Vec<f64>> {
    let hull = coll.hull().unwrap();
    (0..count)
        .map(|i| {
            if i % 4 == 0 {
                uniform_in(rng, &hull)
            } else {
                let b = &coll.boxes()[rng.random_range(0..coll.len())];
                uniform_in(rng, b)
            }
        })
        .collect()
}

pub fn same_box(a: &IntervalBox, b: &[Iv]) -> bool {
    a.dim() == b.len() && a.iter().zip(b).all(|(c, &(l, h))| c.lo() == l && c.hi() == h)
}
