//! Finite-instance model: a response universe with a reference sampling
//! distribution, true and estimated rewards, and a unique optimal response.
//!
//! Responses are abstract indices `0..n`; the theory never inspects response
//! content, so the model carries no payloads. All derived quantities
//! (coverage, reward-model errors) are computed from the stored vectors.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for the probability-sum invariant. Instances come from
/// closed-form constructions, so anything looser would mask generator bugs.
pub const PROB_SUM_TOLERANCE: f64 = 1e-12;

/// One prompt's response universe.
///
/// `pi_ref[y]` is the reference policy's probability of sampling response `y`,
/// `r_star[y]` its true reward, `r_hat[y]` the reward-model estimate, and
/// `y_star` the index of the unique optimal response (`r_star[y_star] == 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub pi_ref: Vec<f64>,
    pub r_star: Vec<f64>,
    pub r_hat: Vec<f64>,
    pub y_star: usize,
}

/// A single violated invariant, naming the offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn violation(field: &'static str, message: impl Into<String>) -> Violation {
    Violation { field, message: message.into() }
}

/// Quantities derived from a valid instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedStats {
    /// Coverage coefficient `C* = 1 / pi_ref[y_star]`, always >= 1.
    pub coverage: f64,
    /// Root of the expected squared reward-model error under `pi_ref`.
    pub eps_rm: f64,
    /// Absolute reward-model error at the optimal response.
    pub eps_opt: f64,
}

impl Instance {
    /// Builds and validates an instance in one step.
    pub fn new(pi_ref: Vec<f64>, r_star: Vec<f64>, r_hat: Vec<f64>, y_star: usize) -> Result<Self> {
        let instance = Self { pi_ref, r_star, r_hat, y_star };
        let violations = instance.validate();
        if violations.is_empty() {
            Ok(instance)
        } else {
            Err(Error::InvalidInstance(violations))
        }
    }

    /// Number of responses in the universe.
    pub fn len(&self) -> usize {
        self.pi_ref.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi_ref.is_empty()
    }

    /// Checks every structural invariant and reports all violations.
    ///
    /// Validation never aborts early: the returned list holds one descriptor
    /// per violated invariant, and an empty list means the instance is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.pi_ref.len();

        if n == 0 {
            out.push(violation("pi_ref", "response universe is empty (n must be >= 1)"));
        }
        if self.r_star.len() != n {
            out.push(violation(
                "r_star",
                format!("length {} differs from pi_ref length {}", self.r_star.len(), n),
            ));
        }
        if self.r_hat.len() != n {
            out.push(violation(
                "r_hat",
                format!("length {} differs from pi_ref length {}", self.r_hat.len(), n),
            ));
        }

        let mut sum = 0.0;
        for (y, &p) in self.pi_ref.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                out.push(violation("pi_ref", format!("entry {y} = {p} outside [0, 1]")));
            }
            sum += p;
        }
        if n > 0 && (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            out.push(violation(
                "pi_ref",
                format!("sums to {sum} (must be 1 within {PROB_SUM_TOLERANCE:e})"),
            ));
        }

        for (name, values) in [("r_star", &self.r_star), ("r_hat", &self.r_hat)] {
            for (y, &r) in values.iter().enumerate() {
                if !(0.0..=1.0).contains(&r) || !r.is_finite() {
                    out.push(violation(name, format!("entry {y} = {r} outside [0, 1]")));
                }
            }
        }

        if self.y_star >= n {
            out.push(violation("y_star", format!("index {} out of range for n = {n}", self.y_star)));
            return out;
        }

        if self.r_star.len() == n {
            if self.r_star[self.y_star] != 1.0 {
                out.push(violation(
                    "r_star",
                    format!("r_star[y_star] = {} (must equal 1)", self.r_star[self.y_star]),
                ));
            }
            for (y, &r) in self.r_star.iter().enumerate() {
                if y != self.y_star && r >= 1.0 {
                    out.push(violation(
                        "r_star",
                        format!("entry {y} = {r} >= 1 makes the maximizer non-unique"),
                    ));
                }
            }
        }

        if self.pi_ref[self.y_star] <= 0.0 {
            out.push(violation(
                "pi_ref",
                format!("pi_ref[y_star] = {} (optimal response needs positive probability)", self.pi_ref[self.y_star]),
            ));
        }

        out
    }

    /// Coverage coefficient `C* = 1 / pi_ref[y_star]`.
    pub fn coverage(&self) -> Result<f64> {
        let p = *self
            .pi_ref
            .get(self.y_star)
            .ok_or_else(|| Error::DegenerateInstance(format!("y_star {} out of range", self.y_star)))?;
        if p <= 0.0 {
            return Err(Error::DegenerateInstance(
                "pi_ref[y_star] = 0; coverage is unbounded".into(),
            ));
        }
        Ok(1.0 / p)
    }

    /// Expected squared reward-model error under `pi_ref`.
    ///
    /// Plain left-to-right summation of nonnegative terms: partial sums are
    /// nondecreasing, so the total is never below the `y_star` term. That
    /// keeps `pi_ref[y_star] * eps_opt^2 <= eps_rm^2` exact in floating point.
    pub fn expected_squared_error(&self) -> f64 {
        let mut sum = 0.0;
        for y in 0..self.len() {
            let d = self.r_star[y] - self.r_hat[y];
            sum += self.pi_ref[y] * (d * d);
        }
        sum
    }

    /// `(eps_rm, eps_opt)`: the exact root-mean-square reward error and the
    /// absolute error at the optimal response.
    pub fn reward_errors(&self) -> (f64, f64) {
        let eps_rm = self.expected_squared_error().sqrt();
        let eps_opt = (1.0 - self.r_hat[self.y_star]).abs();
        (eps_rm, eps_opt)
    }

    /// Coverage and reward errors in one bundle.
    pub fn derived_stats(&self) -> Result<DerivedStats> {
        let coverage = self.coverage()?;
        let (eps_rm, eps_opt) = self.reward_errors();
        Ok(DerivedStats { coverage, eps_rm, eps_opt })
    }

    /// Serializes to the interchange JSON document.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serialization cannot fail")
    }

    /// Parses and validates an instance from its JSON document.
    ///
    /// Invalid instances are rejected with the full violation list.
    pub fn from_json(text: &str) -> Result<Self> {
        let instance: Instance = serde_json::from_str(text)?;
        let violations = instance.validate();
        if violations.is_empty() {
            Ok(instance)
        } else {
            Err(Error::InvalidInstance(violations))
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        Ok(std::fs::write(path, self.to_json())?)
    }
}
