use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Which estimator produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Truncated velocity-autocorrelation series (correlated random walk).
    Crw,
    /// Persistent random walk with finite memory.
    Prw,
    /// Decay rate of approximate Markov transition matrices.
    Markov,
    /// Converged series reference.
    Exact,
    /// Monte Carlo mean-squared displacement.
    Mc,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Crw, Method::Prw, Method::Markov, Method::Exact, Method::Mc];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Crw => "crw",
            Method::Prw => "prw",
            Method::Markov => "markov",
            Method::Exact => "exact",
            Method::Mc => "mc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s.trim())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method `{s}`")))
    }
}

/// One estimate of `D(h)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionEstimate {
    pub method: Method,
    /// Memory, truncation or partition level.
    pub order: usize,
    pub h: f64,
    pub value: f64,
    /// Set when the value is certified to equal the exact coefficient.
    pub exact: bool,
    pub error_bound: Option<f64>,
}

impl DiffusionEstimate {
    pub fn new(method: Method, order: usize, h: f64, value: f64) -> Self {
        Self {
            method,
            order,
            h,
            value,
            exact: false,
            error_bound: None,
        }
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        debug_assert!(bound >= 0.0);
        self.error_bound = Some(bound);
        self
    }

    pub fn certified(mut self, exact: bool) -> Self {
        self.exact = exact;
        self
    }
}
