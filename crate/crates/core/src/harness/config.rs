use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::benchmarks::{scale_uncertainty, tank_default, vdp_default, TankParams, VdpParams};
use crate::dynamics::SystemModel;
use crate::error::{Error, Result};
use crate::interval::Rounding;
use crate::observer::ObserverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchmarkKind {
    Vdp,
    Tank,
}

/// Tank section of a scenario file. Unset index lists fall back to the
/// 30-tank layout truncated to `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TankSection {
    pub n: usize,
    pub h: f64,
    pub g: f64,
    pub kappa: f64,
    pub kappa_per_tank: Option<Vec<f64>>,
    /// Constant level of every input channel.
    pub inflow: f64,
    pub inflow_tanks: Option<Vec<usize>>,
    pub measured_tanks: Option<Vec<usize>>,
    pub level_floor: f64,
}

impl Default for TankSection {
    fn default() -> Self {
        let p = TankParams::with_tanks(30);
        TankSection {
            n: p.n,
            h: p.h,
            g: p.g,
            kappa: 0.015,
            kappa_per_tank: None,
            inflow: 0.1,
            inflow_tanks: None,
            measured_tanks: None,
            level_floor: p.level_floor,
        }
    }
}

impl TankSection {
    pub fn params(&self) -> TankParams {
        let base = TankParams::with_tanks(self.n);
        TankParams {
            n: self.n,
            h: self.h,
            g: self.g,
            kappa: self
                .kappa_per_tank
                .clone()
                .unwrap_or_else(|| vec![self.kappa; self.n]),
            inflow_tanks: self.inflow_tanks.clone().unwrap_or(base.inflow_tanks),
            measured_tanks: self.measured_tanks.clone().unwrap_or(base.measured_tanks),
            level_floor: self.level_floor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UncertaintyFactors {
    pub w_factor: f64,
    pub v_factor: f64,
}

impl Default for UncertaintyFactors {
    fn default() -> Self {
        UncertaintyFactors {
            w_factor: 1.0,
            v_factor: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Seeds {
    /// Seed of the first repetition; repetition `r` uses `truth + r`.
    pub truth: u64,
    pub directions: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds {
            truth: 1,
            directions: 7,
        }
    }
}

/// One experiment: benchmark, uncertainty, observer settings, horizon, seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub benchmark: BenchmarkKind,
    #[serde(default)]
    pub vdp: VdpParams,
    #[serde(default)]
    pub tank: TankSection,
    #[serde(default)]
    pub uncertainty: UncertaintyFactors,
    #[serde(default)]
    pub observer: ObserverConfig,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default)]
    pub seeds: Seeds,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    /// True initial state; the center of `X0` when unset.
    #[serde(default)]
    pub initial_state: Option<Vec<f64>>,
}

fn default_horizon() -> usize {
    100
}

fn default_repeats() -> usize {
    1
}

impl ScenarioConfig {
    /// Van der Pol with the given `mu` and `M_max = 251`.
    pub fn vdp(mu: f64) -> Self {
        ScenarioConfig {
            name: None,
            benchmark: BenchmarkKind::Vdp,
            vdp: VdpParams { mu, ..Default::default() },
            tank: TankSection::default(),
            uncertainty: UncertaintyFactors::default(),
            observer: ObserverConfig {
                m_max: 251,
                ..Default::default()
            },
            horizon: default_horizon(),
            seeds: Seeds::default(),
            repeats: 1,
            initial_state: None,
        }
    }

    /// `n`-tank cascade with `M_max = 246`.
    pub fn tank(n: usize) -> Self {
        ScenarioConfig {
            benchmark: BenchmarkKind::Tank,
            tank: TankSection {
                n,
                ..Default::default()
            },
            observer: ObserverConfig {
                m_max: 246,
                ..Default::default()
            },
            ..ScenarioConfig::vdp(5.0)
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        ScenarioConfig::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::InvalidConfig("repeats must be at least 1".into()));
        }
        self.observer.validate()?;
        if self.benchmark == BenchmarkKind::Tank {
            self.tank.params().validate()?;
        }
        let f = self.uncertainty;
        if !(f.w_factor > 0.0 && f.v_factor > 0.0) {
            return Err(Error::InvalidConfig("uncertainty factors must be positive".into()));
        }
        Ok(())
    }

    pub fn scenario_id(&self) -> String {
        if let Some(name) = &self.name {
            return name.clone();
        }
        let base = match self.benchmark {
            BenchmarkKind::Vdp => format!("vdp_mu{}", self.vdp.mu),
            BenchmarkKind::Tank => format!("tank{}", self.tank.n),
        };
        let f = self.uncertainty;
        if f.w_factor != 1.0 || f.v_factor != 1.0 {
            format!("{base}_w{}_v{}", f.w_factor, f.v_factor)
        } else {
            base
        }
    }

    pub fn set_rounding(&mut self, rounding: Rounding) {
        self.observer.rounding = rounding;
    }

    pub fn build_model(&self) -> Result<SystemModel> {
        let base = match self.benchmark {
            BenchmarkKind::Vdp => vdp_default(self.vdp)?,
            BenchmarkKind::Tank => tank_default(self.tank.params())?,
        };
        scale_uncertainty(&base, self.uncertainty.w_factor, self.uncertainty.v_factor)
    }

    /// Known inputs `u_0 .. u_{N-1}`.
    pub fn inputs(&self, model: &SystemModel) -> Vec<Vec<f64>> {
        let u = match self.benchmark {
            BenchmarkKind::Vdp => Vec::new(),
            BenchmarkKind::Tank => vec![self.tank.inflow; model.input_dim()],
        };
        vec![u; self.horizon]
    }

    pub fn initial_state(&self, model: &SystemModel) -> Result<Vec<f64>> {
        match &self.initial_state {
            Some(x) => Ok(x.clone()),
            None => model.initial_set().midpoint(),
        }
    }
}
