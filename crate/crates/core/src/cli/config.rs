//! Run settings: built-in defaults, then a config file, then `REGUDIST_TOL`, then flags.

use serde::{Deserialize, Serialize};

use crate::calculus::DEFAULT_K_MAX;
use crate::error::{Error, Result};
use crate::mollify::DEFAULT_EPSILONS;
use crate::scalar::{re, Complex, Tolerance};

use super::records::ComplexInput;

pub const TOL_ENV: &str = "REGUDIST_TOL";
pub const DEFAULT_SUITE_SIZE: usize = 10;

/// Contents of a `--config` file; every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub tolerance: Option<Tolerance>,
    pub k_max: Option<usize>,
    pub default_alpha: Option<ComplexInput>,
    pub eps_grid: Option<Vec<f64>>,
    pub suite_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub tol: Tolerance,
    pub k_max: usize,
    pub default_alpha: Complex,
    pub eps_grid: Vec<f64>,
    pub suite_size: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            tol: Tolerance::default(),
            k_max: DEFAULT_K_MAX,
            default_alpha: re(1.0),
            eps_grid: DEFAULT_EPSILONS.to_vec(),
            suite_size: DEFAULT_SUITE_SIZE,
        }
    }
}

impl Settings {
    pub fn apply(&mut self, c: &Config) {
        if let Some(t) = c.tolerance {
            self.tol = t;
        }
        if let Some(k) = c.k_max {
            self.k_max = k;
        }
        if let Some(a) = c.default_alpha {
            self.default_alpha = a.value();
        }
        if let Some(g) = &c.eps_grid {
            self.eps_grid = g.clone();
        }
        if let Some(n) = c.suite_size {
            self.suite_size = n;
        }
    }

    /// `REGUDIST_TOL` is either `rel` or `rel,abs`.
    pub fn apply_env(&mut self, value: Option<&str>) -> Result<()> {
        let Some(v) = value else { return Ok(()) };
        let nums = v
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Input(format!("{TOL_ENV} must be 'rel' or 'rel,abs', got '{v}'")))?;
        match nums.as_slice() {
            [rel] => self.tol.rel = *rel,
            [rel, abs] => self.tol = Tolerance::new(*rel, *abs),
            _ => return Err(Error::Input(format!("{TOL_ENV} must be 'rel' or 'rel,abs', got '{v}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.tol.rel) || !positive(self.tol.abs) {
            return Err(Error::Input(format!("tolerances must be positive, got rel {} abs {}", self.tol.rel, self.tol.abs)));
        }
        if self.k_max < 1 {
            return Err(Error::Input("k_max must be at least 1".into()));
        }
        if self.eps_grid.is_empty() || !self.eps_grid.iter().all(|&e| positive(e)) {
            return Err(Error::Input("the eps grid must be a non-empty list of positive numbers".into()));
        }
        if self.suite_size == 0 {
            return Err(Error::Input("suite size must be at least 1".into()));
        }
        Ok(())
    }
}

/// `default` or a comma-separated list.
pub fn parse_eps_grid(s: &str) -> Result<Vec<f64>> {
    if s.trim() == "default" {
        return Ok(DEFAULT_EPSILONS.to_vec());
    }
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Input(format!("bad eps value '{x}'"))))
        .collect()
}
