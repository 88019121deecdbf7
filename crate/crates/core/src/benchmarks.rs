//! Benchmark systems: the Euler-discretized Van der Pol oscillator and a
//! cascade of tanks draining by Torricelli's law, plus truth simulation.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{interval_matvec, Dynamics, IntervalMatrix, RealMatrix, SystemModel};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalBox, Rounding};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VdpParams {
    pub mu: f64,
    /// Sampling time in seconds.
    pub h: f64,
}

impl Default for VdpParams {
    fn default() -> Self {
        VdpParams { mu: 5.0, h: 0.025 }
    }
}

#[derive(Debug, Clone)]
pub struct VanDerPol {
    params: VdpParams,
}

impl VanDerPol {
    pub fn new(params: VdpParams) -> Result<Self> {
        if !(params.mu > 0.0 && params.h > 0.0) {
            return Err(Error::InvalidConfig("Van der Pol needs mu > 0 and h > 0".into()));
        }
        Ok(VanDerPol { params })
    }
}

impl Dynamics for VanDerPol {
    fn state_dim(&self) -> usize {
        2
    }

    fn input_dim(&self) -> usize {
        0
    }

    fn step(&self, x: &[f64], _u: &[f64], w: &[f64]) -> Vec<f64> {
        let VdpParams { mu, h } = self.params;
        let x1n = (x[0] + h * x[1]) + w[0];
        let inner = (mu * (1.0 - x[0] * x[0])) * x[1] - x[0];
        let x2n = (x[1] + h * inner) + w[1];
        vec![x1n, x2n]
    }

    fn step_enclosure(
        &self,
        x: &IntervalBox,
        _u: &[f64],
        w: &IntervalBox,
        r: Rounding,
    ) -> Result<IntervalBox> {
        let VdpParams { mu, h } = self.params;
        let one = Interval::point(1.0);
        let x1n = r.add(r.add(x[0], r.scale(h, x[1])), w[0]);
        let damping = r.scale(mu, r.sub(one, r.sqr(x[0])));
        let inner = r.sub(r.mul(damping, x[1]), x[0]);
        let x2n = r.add(r.add(x[1], r.scale(h, inner)), w[1]);
        Ok(IntervalBox::new(vec![x1n, x2n]))
    }

    fn jacobian(
        &self,
        x: &IntervalBox,
        _u: &[f64],
        _w: &IntervalBox,
        r: Rounding,
    ) -> Result<IntervalMatrix> {
        let VdpParams { mu, h } = self.params;
        let one = Interval::point(1.0);
        let (x1, x2) = (x[0], x[1]);
        // h (−2μ x1 x2 − 1)
        let d21 = r.scale(h, r.sub(r.scale(-2.0 * mu, r.mul(x1, x2)), one));
        // 1 + h μ (1 − x1²)
        let d22 = r.add(one, r.scale(h, r.scale(mu, r.sub(one, r.sqr(x1)))));
        let zero = Interval::ZERO;
        Ok(IntervalMatrix::from_rows(vec![
            vec![one, Interval::point(h), one, zero],
            vec![d21, d22, zero, one],
        ]))
    }
}

/// Van der Pol model with `C = [1 0]`.
pub fn vdp_model(params: VdpParams, x0: IntervalBox, w: IntervalBox, v: IntervalBox) -> Result<SystemModel> {
    SystemModel::new(
        Arc::new(VanDerPol::new(params)?),
        RealMatrix::from_rows(&[vec![1.0, 0.0]]),
        w,
        v,
        x0,
    )
}

/// `X0 = B²`, `W = 10⁻³·B²`, `V = 0.2·B`.
pub fn vdp_default(params: VdpParams) -> Result<SystemModel> {
    vdp_model(
        params,
        IntervalBox::unit_scaled(2, 1.0),
        IntervalBox::unit_scaled(2, 1e-3),
        IntervalBox::unit_scaled(1, 0.2),
    )
}

pub const TANK30_INFLOW: [usize; 15] = [1, 4, 5, 7, 9, 10, 13, 15, 16, 19, 21, 22, 25, 27, 28];

pub const TANK30_MEASURED: [usize; 21] = [
    2, 4, 5, 7, 8, 10, 11, 13, 14, 16, 17, 19, 20, 21, 22, 23, 25, 26, 27, 28, 29,
];

/// Tank cascade parameters. Tank indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TankParams {
    pub n: usize,
    pub h: f64,
    pub g: f64,
    /// Per-tank outflow coefficients, length `n`.
    pub kappa: Vec<f64>,
    /// Tanks receiving one unit-gain input channel each.
    pub inflow_tanks: Vec<usize>,
    pub measured_tanks: Vec<usize>,
    /// Smallest level allowed inside a Jacobian evaluation.
    pub level_floor: f64,
}

impl TankParams {
    /// Defaults for an `n`-tank cascade. Inflow and measured tanks follow the
    /// 30-tank layout, truncated to the first `n` tanks.
    pub fn with_tanks(n: usize) -> Self {
        TankParams {
            n,
            h: 0.5,
            g: 9.81,
            kappa: vec![0.015; n],
            inflow_tanks: TANK30_INFLOW.iter().copied().filter(|&i| i <= n).collect(),
            measured_tanks: TANK30_MEASURED.iter().copied().filter(|&i| i <= n).collect(),
            level_floor: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n < 2 {
            return bad(format!("tank count must be at least 2, got {}", self.n));
        }
        if !(self.h > 0.0 && self.g > 0.0 && self.level_floor > 0.0) {
            return bad("tank h, g and level_floor must be positive".into());
        }
        if self.kappa.len() != self.n || self.kappa.iter().any(|&k| !(k > 0.0)) {
            return bad(format!("kappa needs {} positive entries", self.n));
        }
        if self.measured_tanks.is_empty() {
            return bad("at least one tank must be measured".into());
        }
        for &i in self.inflow_tanks.iter().chain(&self.measured_tanks) {
            if i == 0 || i > self.n {
                return bad(format!("tank index {i} outside 1..={}", self.n));
            }
        }
        Ok(())
    }

    pub fn input_matrix(&self) -> RealMatrix {
        let mut b = RealMatrix::zeros(self.n, self.inflow_tanks.len());
        for (ch, &tank) in self.inflow_tanks.iter().enumerate() {
            b.set(tank - 1, ch, 1.0);
        }
        b
    }

    pub fn measurement_matrix(&self) -> RealMatrix {
        let idx: Vec<usize> = self.measured_tanks.iter().map(|i| i - 1).collect();
        RealMatrix::selection(self.n, &idx)
    }
}

#[derive(Debug, Clone)]
pub struct TankCascade {
    params: TankParams,
    b: RealMatrix,
    b_iv: IntervalMatrix,
}

impl TankCascade {
    pub fn new(params: TankParams) -> Result<Self> {
        params.validate()?;
        let b = params.input_matrix();
        let b_iv = IntervalMatrix::from_real(&b);
        Ok(TankCascade { params, b, b_iv })
    }

    fn check_input(&self, u: &[f64]) {
        assert_eq!(u.len(), self.b.cols(), "tank input has wrong length");
    }
}

impl Dynamics for TankCascade {
    fn state_dim(&self) -> usize {
        self.params.n
    }

    fn input_dim(&self) -> usize {
        self.b.cols()
    }

    fn step(&self, x: &[f64], u: &[f64], w: &[f64]) -> Vec<f64> {
        self.check_input(u);
        let TankParams { h, g, .. } = self.params;
        let q = (2.0 * g).sqrt();
        let bu = self.b.mul_vec(u);
        let roots: Vec<f64> = x.iter().map(|v| v.sqrt()).collect();
        (0..self.params.n)
            .map(|j| {
                let k = self.params.kappa[j] * q;
                let inner = if j == 0 {
                    (-k) * roots[0] + bu[0]
                } else {
                    k * (roots[j - 1] - roots[j]) + bu[j]
                };
                (x[j] + h * inner) + w[j]
            })
            .collect()
    }

    fn step_enclosure(
        &self,
        x: &IntervalBox,
        u: &[f64],
        w: &IntervalBox,
        r: Rounding,
    ) -> Result<IntervalBox> {
        self.check_input(u);
        let TankParams { h, g, .. } = self.params;
        let q = r.sqrt(Interval::point(2.0 * g))?;
        let bu = interval_matvec(&self.b_iv, &IntervalBox::point(u), r)?;
        let roots = x.iter().map(|&v| r.sqrt(v)).collect::<Result<Vec<_>>>()?;
        Ok((0..self.params.n)
            .map(|j| {
                let k = r.mul(Interval::point(self.params.kappa[j]), q);
                let inner = if j == 0 {
                    r.add(r.mul(k.neg(), roots[0]), bu[0])
                } else {
                    r.add(r.mul(k, r.sub(roots[j - 1], roots[j])), bu[j])
                };
                r.add(r.add(x[j], r.scale(h, inner)), w[j])
            })
            .collect())
    }

    fn jacobian(
        &self,
        x: &IntervalBox,
        _u: &[f64],
        _w: &IntervalBox,
        r: Rounding,
    ) -> Result<IntervalMatrix> {
        let n = self.params.n;
        let TankParams { h, g, level_floor, .. } = self.params;
        let q = r.sqrt(Interval::point(2.0 * g))?;
        let one = Interval::point(1.0);
        // d√x/dx = 1 / (2√x), bounded only above the level floor
        let mut dsqrt = Vec::with_capacity(n);
        for (j, &xj) in x.iter().enumerate() {
            if xj.is_empty() || xj.lo() < level_floor {
                return Err(Error::DomainViolation(format!(
                    "level enclosure of tank {} reaches below the floor {level_floor}: {xj}",
                    j + 1
                )));
            }
            let xj = xj.intersect(&Interval::new(level_floor, f64::INFINITY));
            dsqrt.push(r.div(one, r.scale(2.0, r.sqrt(xj)?))?);
        }
        let mut jac = IntervalMatrix::zeros(n, 2 * n);
        for j in 0..n {
            let hk = r.scale(h, r.mul(Interval::point(self.params.kappa[j]), q));
            jac.set(j, j, r.sub(one, r.mul(hk, dsqrt[j])));
            if j > 0 {
                jac.set(j, j - 1, r.mul(hk, dsqrt[j - 1]));
            }
            jac.set(j, n + j, one);
        }
        Ok(jac)
    }

    fn domain_guard(&self, x: &IntervalBox) -> Result<IntervalBox> {
        let nonneg = Interval::new(0.0, f64::INFINITY);
        let guarded: IntervalBox = x.iter().map(|c| c.intersect(&nonneg)).collect();
        if let Some(j) = guarded.iter().position(Interval::is_empty) {
            return Err(Error::DomainViolation(format!(
                "level enclosure of tank {} lies entirely below zero: {}",
                j + 1,
                x[j]
            )));
        }
        Ok(guarded)
    }

    fn validate_state(&self, x: &[f64]) -> Result<()> {
        match x.iter().position(|&v| !(v >= 0.0)) {
            Some(j) => Err(Error::DomainViolation(format!(
                "true level of tank {} became {}",
                j + 1,
                x[j]
            ))),
            None => Ok(()),
        }
    }
}

/// Tank cascade model measuring the configured tanks.
pub fn tank_model(params: TankParams, x0: IntervalBox, w: IntervalBox, v: IntervalBox) -> Result<SystemModel> {
    let c = params.measurement_matrix();
    SystemModel::new(Arc::new(TankCascade::new(params)?), c, w, v, x0)
}

/// `X0 = 20·1 ⊕ 4·Bⁿ`, `W = 10⁻³·Bⁿ`, `V = 0.2·Bᵖ`.
pub fn tank_default(params: TankParams) -> Result<SystemModel> {
    let n = params.n;
    let p = params.measured_tanks.len();
    tank_model(
        params,
        IntervalBox::centered(&vec![20.0; n], &vec![4.0; n]),
        IntervalBox::unit_scaled(n, 1e-3),
        IntervalBox::unit_scaled(p, 0.2),
    )
}

/// Scales the radii of `W` and `V` about their centers.
pub fn scale_uncertainty(model: &SystemModel, w_factor: f64, v_factor: f64) -> Result<SystemModel> {
    if !(w_factor > 0.0 && v_factor > 0.0) {
        return Err(Error::InvalidConfig("uncertainty factors must be positive".into()));
    }
    let scale = |b: &IntervalBox, k: f64| -> IntervalBox {
        b.iter()
            .map(|c| Interval::centered(c.mid(), k * c.radius()))
            .collect()
    };
    if w_factor == 1.0 && v_factor == 1.0 {
        return Ok(model.clone());
    }
    model.with_sets(
        scale(model.disturbance(), w_factor),
        scale(model.noise(), v_factor),
        model.initial_set().clone(),
    )
}

/// A simulated trajectory with its measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthRun {
    pub states: Vec<Vec<f64>>,
    pub measurements: Vec<Vec<f64>>,
    pub inputs: Vec<Vec<f64>>,
    pub disturbances: Vec<Vec<f64>>,
    pub noises: Vec<Vec<f64>>,
    pub seed: u64,
}

fn sample_box(rng: &mut impl Rng, b: &IntervalBox) -> Vec<f64> {
    b.iter()
        .map(|c| {
            if c.width() > 0.0 {
                rng.random_range(c.lo()..=c.hi())
            } else {
                c.lo()
            }
        })
        .collect()
}

/// Simulates `len(inputs)` steps from `x0` with i.i.d. uniform `w_k ∈ W`, `v_k ∈ V`.
pub fn simulate_truth(model: &SystemModel, x0: &[f64], inputs: &[Vec<f64>], seed: u64) -> Result<TruthRun> {
    if !model.initial_set().contains_point(x0) {
        return Err(Error::InitialStateOutsideX0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dynamics = model.dynamics();
    let n = inputs.len();
    let mut states = Vec::with_capacity(n + 1);
    let mut measurements = Vec::with_capacity(n + 1);
    let mut disturbances = Vec::with_capacity(n);
    let mut noises = Vec::with_capacity(n + 1);

    let v0 = sample_box(&mut rng, model.noise());
    measurements.push(model.measure(x0, &v0));
    noises.push(v0);
    states.push(x0.to_vec());
    for (k, u) in inputs.iter().enumerate() {
        let w = sample_box(&mut rng, model.disturbance());
        let next = model.step(&states[k], u, &w);
        dynamics.validate_state(&next).map_err(|e| e.at_step(k + 1))?;
        let v = sample_box(&mut rng, model.noise());
        measurements.push(model.measure(&next, &v));
        states.push(next);
        disturbances.push(w);
        noises.push(v);
    }
    Ok(TruthRun {
        states,
        measurements,
        inputs: inputs.to_vec(),
        disturbances,
        noises,
        seed,
    })
}
