//! Statistics reports: empirical frequencies against exact bounds, with
//! normal-approximation confidence margins and a machine-checkable verdict.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundDirection {
    /// The frequency must be at least the bound (minus the margin).
    AtLeast,
    /// The frequency must be at most the bound (plus the margin).
    AtMost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One frequency-vs-bound comparison.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub trials: u64,
    pub successes: u64,
    pub frequency: f64,
    /// The exact bound as a rational `p/q`.
    pub bound: String,
    pub bound_value: f64,
    pub direction: BoundDirection,
    pub sigma: f64,
    pub margin: f64,
    pub verdict: Verdict,
}

impl BoundCheck {
    /// Build a check from counts and an exact rational bound. The sigma is
    /// the normal approximation at the bound; the margin is `sigmas · σ`.
    pub fn new(
        name: impl Into<String>,
        successes: u64,
        trials: u64,
        bound: &BigRational,
        direction: BoundDirection,
        sigmas: f64,
    ) -> BoundCheck {
        let frequency = if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        };
        let bound_value = ratio_to_f64(bound);
        let sigma = if trials == 0 {
            0.0
        } else {
            (bound_value * (1.0 - bound_value) / trials as f64)
                .max(0.0)
                .sqrt()
        };
        let margin = sigmas * sigma;
        let pass = match direction {
            BoundDirection::AtLeast => frequency >= bound_value - margin,
            BoundDirection::AtMost => frequency <= bound_value + margin,
        };
        BoundCheck {
            name: name.into(),
            trials,
            successes,
            frequency,
            bound: format!("{}/{}", bound.numer(), bound.denom()),
            bound_value,
            direction,
            sigma,
            margin,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// The report for one experiment: a primary check, any number of secondary
/// checks, and run details.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StatsReport {
    pub kind: String,
    pub trials: u64,
    pub successes: u64,
    pub frequency: f64,
    pub bound: String,
    pub bound_value: f64,
    pub direction: BoundDirection,
    pub sigma: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub wall_clock_ms: u64,
    pub checks: Vec<BoundCheck>,
    pub details: serde_json::Value,
}

impl StatsReport {
    /// Assemble from checks; the first is the headline, the verdict covers
    /// all of them (and any extra failure noted in `details.failures`).
    pub fn from_checks(
        kind: impl Into<String>,
        checks: Vec<BoundCheck>,
        extra_pass: bool,
        details: serde_json::Value,
        wall_clock_ms: u64,
    ) -> StatsReport {
        let all_pass = extra_pass && checks.iter().all(|c| c.passed());
        let head = checks.first().cloned();
        let (trials, successes, frequency, bound, bound_value, direction, sigma, margin) =
            match head {
                Some(c) => (
                    c.trials, c.successes, c.frequency, c.bound, c.bound_value, c.direction,
                    c.sigma, c.margin,
                ),
                None => (0, 0, 0.0, "0/1".into(), 0.0, BoundDirection::AtLeast, 0.0, 0.0),
            };
        StatsReport {
            kind: kind.into(),
            trials,
            successes,
            frequency,
            bound,
            bound_value,
            direction,
            sigma,
            margin,
            verdict: if all_pass { Verdict::Pass } else { Verdict::Fail },
            wall_clock_ms,
            checks,
            details,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Canonical JSON with the wall clock zeroed: the determinism contract
    /// compares these bytes.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut clone = self.clone();
        clone.wall_clock_ms = 0;
        serde_json::to_vec(&clone).expect("serializable report")
    }

    /// CSV: header plus one row per check, same numeric content as the JSON.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "kind,check,trials,successes,frequency,bound,bound_value,direction,sigma,margin,verdict\n",
        );
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{:?},{},{},{:?}\n",
                self.kind,
                c.name,
                c.trials,
                c.successes,
                c.frequency,
                c.bound,
                c.bound_value,
                c.direction,
                c.sigma,
                c.margin,
                c.verdict
            ));
        }
        out
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable report")
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    let n: f64 = r.numer().to_string().parse().unwrap_or(f64::NAN);
    let d: f64 = r.denom().to_string().parse().unwrap_or(f64::NAN);
    n / d
}
