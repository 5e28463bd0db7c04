//! Flat JSON run configuration. Complex numbers are [re, im] pairs; unknown
//! keys are rejected so typos surface as config errors.

use dell_core::elliptic::{Modulus, SeriesControl};
use dell_core::lax::ModelParams;
use dell_core::C64;
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub tau: Option<[f64; 2]>,
    pub omega: Option<[f64; 2]>,
    pub eta: Option<[f64; 2]>,
    pub hbar: Option<[f64; 2]>,
    pub c: Option<[f64; 2]>,
    pub lambda: Option<[f64; 2]>,
    pub z: Option<[f64; 2]>,
    pub shift_cap: Option<usize>,
    pub max_index: Option<usize>,
    pub tail_tolerance: Option<f64>,
    pub domain_guard: Option<f64>,
    pub seed: Option<u64>,
    /// Particle count for eigen/classical runs.
    pub n: Option<usize>,
    /// Young diagram for eigen runs.
    pub partition: Option<Vec<usize>>,
    /// Evaluation grid for the generating parameter u.
    pub u_grid: Option<Vec<[f64; 2]>>,
    pub omega_order: Option<usize>,
    /// Hamiltonian index for classical runs.
    pub k: Option<i64>,
    pub t_horizon: Option<f64>,
    pub dt: Option<f64>,
    pub lambda_radius: Option<f64>,
    pub fourier_samples: Option<usize>,
    pub derivative_step: Option<f64>,
    /// Coordinates and momenta for classical runs.
    pub q: Option<Vec<[f64; 2]>>,
    pub p: Option<Vec<[f64; 2]>>,
    /// Substring filters selecting which checks run.
    pub suite: Option<Vec<String>>,
    pub format: Option<String>,
    pub out: Option<String>,
    /// Special function evaluated by the theta command.
    pub theta_function: Option<String>,
    /// Points for the theta command.
    pub points: Option<Vec<[f64; 2]>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config is valid")
    }
}

pub fn to_c64(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("config error: {e}"))
    }

    pub fn tau(&self) -> C64 {
        self.tau.map(to_c64).unwrap_or(C64::new(0.0, 0.8))
    }

    pub fn omega(&self) -> C64 {
        self.omega.map(to_c64).unwrap_or(C64::new(0.1, 0.0))
    }

    pub fn eta(&self) -> C64 {
        self.eta.map(to_c64).unwrap_or(C64::new(0.25, 0.0))
    }

    pub fn hbar(&self) -> C64 {
        self.hbar.map(to_c64).unwrap_or(C64::new(0.1, 0.0))
    }

    pub fn c_light(&self) -> C64 {
        self.c.map(to_c64).unwrap_or(C64::new(1.5, 0.0))
    }

    pub fn z(&self) -> C64 {
        self.z.map(to_c64).unwrap_or(C64::new(0.31, 0.17))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(42)
    }

    pub fn series_control(&self) -> Result<SeriesControl, String> {
        SeriesControl::new(
            self.max_index.unwrap_or(200),
            self.tail_tolerance.unwrap_or(1e-15),
            self.domain_guard.unwrap_or(1e-6),
        )
        .map_err(|e| format!("config error: {e}"))
    }

    pub fn modulus(&self) -> Result<Modulus, String> {
        let ctl = self.series_control()?;
        Modulus::with_guard(self.tau(), ctl.domain_guard).map_err(|e| format!("config error: {e}"))
    }

    pub fn model_params(&self) -> Result<ModelParams, String> {
        let modulus = self.modulus()?;
        let mut params = ModelParams::new(
            self.eta(),
            self.hbar(),
            self.c_light(),
            modulus,
            self.omega(),
        )
        .map_err(|e| format!("config error: {e}"))?;
        params.lambda = self.lambda.map(to_c64).unwrap_or(C64::new(0.5, 0.2));
        params.shift_cap = self.shift_cap.unwrap_or(8);
        params.control = self.series_control()?;
        Ok(params)
    }
}
