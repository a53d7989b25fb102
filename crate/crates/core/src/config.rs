//! Resolution, grids, caps and tolerances shared by criteria, memberships
//! and campaigns. Every report embeds `Config::to_json`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::{KdiamError, Result};
use crate::invariants::default_eps_grid;
use crate::real::format_rational;
use crate::seq::limits::check_resolution;
use crate::space::{default_grid, C_MAX, DEFAULT_MAX_GRADE, DEFAULT_RESOLUTION};
use crate::verdict::Resolution;

pub const TOL_EXACT: f64 = 1e-9;
pub const TOL_ESTIMATED: f64 = 1e-3;
/// Threshold below which a finite delta-coincidence value counts as zero.
pub const ZERO_THRESHOLD: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub resolution: Resolution,
    /// DN interpolation exponents.
    pub tau_grid: Vec<BigRational>,
    /// Omega interpolation exponents.
    pub theta_grid: Vec<BigRational>,
    /// `Tdot` exponents.
    pub eps_grid: Vec<BigRational>,
    /// Multipliers for condition (*).
    pub m_grid: Vec<BigRational>,
    pub c_max: f64,
    pub tol_exact: f64,
    pub tol_estimated: f64,
    pub zero_threshold: f64,
    /// `epsilon = eps_scale * epsilon(1, 2)`.
    pub eps_scale: BigRational,
    /// Step of the dense-grade refinement of D2.
    pub dense_step: BigRational,
    /// Random grade tuples per length for condition B beyond length 4.
    pub b_samples: usize,
    pub seed: u64,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Default for Config {
    fn default() -> Config {
        Config {
            resolution: Resolution::new(DEFAULT_RESOLUTION, DEFAULT_MAX_GRADE),
            tau_grid: default_grid(),
            theta_grid: default_grid(),
            eps_grid: default_eps_grid(),
            m_grid: [1, 2, 4, 8, 16].iter().map(|m| rat(*m, 1)).collect(),
            c_max: C_MAX,
            tol_exact: TOL_EXACT,
            tol_estimated: TOL_ESTIMATED,
            zero_threshold: ZERO_THRESHOLD,
            eps_scale: rat(1, 1),
            dense_step: rat(1, 4),
            b_samples: 64,
            seed: 0,
        }
    }
}

impl Config {
    pub fn with_resolution(mut self, r: Resolution) -> Config {
        self.resolution = r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_resolution(self.resolution.n)?;
        if self.resolution.kmax < 2 {
            return Err(KdiamError::Config("kmax must be at least 2".into()));
        }
        if !(self.c_max >= 1.0) {
            return Err(KdiamError::Config("c_max must be at least 1".into()));
        }
        let zero = rat(0, 1);
        if self.eps_scale <= zero || self.dense_step <= zero {
            return Err(KdiamError::Config(
                "eps_scale and dense_step must be positive".into(),
            ));
        }
        if self.m_grid.iter().any(|m| *m < zero) {
            return Err(KdiamError::Config("M grid must be non-negative".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let g = |v: &[BigRational]| v.iter().map(format_rational).collect::<Vec<_>>();
        json!({
            "resolution": self.resolution.to_json(),
            "horizon": self.resolution.horizon(),
            "tau_grid": g(&self.tau_grid),
            "theta_grid": g(&self.theta_grid),
            "eps_grid": g(&self.eps_grid),
            "m_grid": g(&self.m_grid),
            "c_max": self.c_max,
            "tol_exact": self.tol_exact,
            "tol_estimated": self.tol_estimated,
            "zero_threshold": self.zero_threshold,
            "eps_scale": format_rational(&self.eps_scale),
            "dense_step": format_rational(&self.dense_step),
            "b_samples": self.b_samples,
            "seed": self.seed,
        })
    }
}
