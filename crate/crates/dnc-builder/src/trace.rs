//! Complete run traces: every draw, assumption, refutation, restriction and
//! requirement outcome, serializable as JSON.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use bushy_core::{GrowthFn, OmegaString, WitnessTree};
use toy_computation::{BitStr, Functional};

/// One value committed to the string under construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChoiceRecord {
    pub depth: u64,
    /// Number of alternatives offered to the draw.
    #[serde(with = "bushy_core::serde_nat")]
    pub bound: BigUint,
    /// Index drawn, uniform below `bound`.
    #[serde(with = "bushy_core::serde_nat")]
    pub index: BigUint,
    /// The committed value (equals `index` for unrestricted draws).
    #[serde(with = "bushy_core::serde_nat")]
    pub value: BigUint,
    /// Set when the draw happened inside a temporary restriction.
    pub restriction: Option<usize>,
}

/// A found splitting string ρ* with its verified witness tree.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RhoRecord {
    pub requirement: usize,
    pub rho: BitStr,
    /// Stage (string length) at which the active wait was entered.
    pub k: u64,
    /// The output-length cutoff defining the split sets.
    #[serde(with = "bushy_core::serde_nat")]
    pub target_len: BigUint,
    /// Description-length bound for the search context, when one is used.
    pub r_bits: Option<u64>,
    pub witness: WitnessTree,
    pub bushiness: GrowthFn,
    /// Enumeration stage / evaluation budget of the snapshot the witness
    /// was certified against.
    pub stage: u64,
    pub gamma_budget: u64,
}

/// An assumption a requirement currently holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AssumptionDesc {
    /// The partial function diverges at `arg` (= r + d).
    PhiUndefined { arg: u64, r_bits: u64 },
    /// The set `{τ : |Γ^τ| ≥ threshold}` is `g`-small above `stem`.
    Smallness {
        stem: OmegaString,
        /// Stage at which the assumption was made.
        k: u64,
        #[serde(with = "bushy_core::serde_nat")]
        threshold: BigUint,
        g: GrowthFn,
    },
}

/// Which loop branch produced an event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// First attention.
    FirstAttention,
    /// Assumption replaced after a refutation, same kind, counter below cap.
    Reassumed,
    /// Divergence-cap reached: waited for the value, then assumed smallness.
    SmallnessAfterWait,
    /// Smallness refuted with the outer counter still below its cap: a new
    /// round of divergence assumptions begins.
    RoundRestart,
    /// Cap reached: switched to the active search for a witness.
    ActiveSearch,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum TraceEvent {
    Assume {
        stage: u64,
        requirement: usize,
        branch: Branch,
        assumption: AssumptionDesc,
    },
    Refuted {
        stage: u64,
        requirement: usize,
        /// Counter value after this refutation (inner counter for
        /// divergence assumptions).
        counter: u64,
    },
    PhiWait {
        stage: u64,
        requirement: usize,
        arg: u64,
    },
    PhiDefined {
        stage: u64,
        requirement: usize,
        arg: u64,
        #[serde(with = "bushy_core::serde_nat")]
        value: BigUint,
    },
    ActiveWait {
        stage: u64,
        requirement: usize,
        k: u64,
        #[serde(with = "bushy_core::serde_nat")]
        target_len: BigUint,
    },
    RhoFound {
        stage: u64,
        requirement: usize,
        rho_index: usize,
    },
    Walked {
        stage: u64,
        requirement: usize,
        from_depth: u64,
        to_depth: u64,
    },
    Satisfied {
        stage: u64,
        requirement: usize,
    },
    Stuck {
        stage: u64,
        requirement: usize,
    },
}

/// Final status of one requirement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ReqFinalStatus {
    /// Never attended within the budget.
    NeverAttended,
    /// Ended holding an assumption that was never refuted.
    Holding,
    /// Satisfied by reaching a leaf of a restriction witness.
    SatisfiedByRestriction { rho_index: usize },
    /// The run ended stuck in this requirement's active wait.
    Stuck,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReqSummary {
    pub label: String,
    pub gamma: Functional,
    /// The partial function, for runs that carry one (serialized form).
    pub phi: Option<serde_json::Value>,
    pub d: u64,
    pub declared_complexity_bits: u64,
    pub status: ReqFinalStatus,
    /// The assumption still held at the end, if any.
    pub final_assumption: Option<AssumptionDesc>,
    /// Caps drawn at initialization (one for the bounded algorithm; the
    /// outer cap followed by the inner round caps actually drawn for the
    /// unbounded one).
    #[serde(with = "bushy_core::serde_nat_vec")]
    pub caps: Vec<BigUint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunKind {
    Bounded,
    BoundedScaled,
    Unbounded,
}

/// The complete log of one run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunTrace {
    pub kind: RunKind,
    pub m: u64,
    pub depth: u64,
    pub width_cap: u64,
    pub gamma_budget: u64,
    pub loop_budget: u64,
    pub final_sigma: OmegaString,
    pub final_stage: u64,
    pub stuck: Option<(usize, u64)>,
    pub choices: Vec<ChoiceRecord>,
    pub events: Vec<TraceEvent>,
    pub rho_records: Vec<RhoRecord>,
    pub requirements: Vec<ReqSummary>,
}

impl RunTrace {
    pub fn is_stuck(&self) -> bool {
        self.stuck.is_some()
    }

    pub fn satisfied_by_restriction(&self, i: usize) -> bool {
        matches!(
            self.requirements[i].status,
            ReqFinalStatus::SatisfiedByRestriction { .. }
        )
    }

    /// One JSON record per line: header, then choices, events, splits,
    /// requirement summaries.
    pub fn to_jsonl(&self) -> String {
        let mut lines = Vec::new();
        let header = serde_json::json!({
            "record": "header",
            "kind": self.kind,
            "m": self.m,
            "depth": self.depth,
            "width_cap": self.width_cap,
            "gamma_budget": self.gamma_budget,
            "loop_budget": self.loop_budget,
            "final_sigma": self.final_sigma,
            "final_stage": self.final_stage,
            "stuck": self.stuck,
        });
        lines.push(header.to_string());
        for c in &self.choices {
            lines.push(wrap("choice", c));
        }
        for e in &self.events {
            lines.push(wrap("event", e));
        }
        for r in &self.rho_records {
            lines.push(wrap("split", r));
        }
        for (i, r) in self.requirements.iter().enumerate() {
            let mut v = serde_json::to_value(r).expect("serializable");
            v["record"] = "requirement".into();
            v["index"] = i.into();
            lines.push(v.to_string());
        }
        lines.join("\n")
    }

    /// Parse a trace back from the JSON-lines form.
    pub fn from_jsonl(text: &str) -> Result<RunTrace, serde_json::Error> {
        let mut header: Option<serde_json::Value> = None;
        let mut choices = Vec::new();
        let mut events = Vec::new();
        let mut rho_records = Vec::new();
        let mut requirements = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: serde_json::Value = serde_json::from_str(line)?;
            match v["record"].as_str() {
                Some("header") => header = Some(v),
                Some("choice") => choices.push(serde_json::from_value(v)?),
                Some("event") => events.push(serde_json::from_value(v)?),
                Some("split") => rho_records.push(serde_json::from_value(v)?),
                Some("requirement") => requirements.push(serde_json::from_value(v)?),
                _ => {}
            }
        }
        let h = header.ok_or_else(|| {
            serde::de::Error::custom("missing header record")
        })?;
        Ok(RunTrace {
            kind: serde_json::from_value(h["kind"].clone())?,
            m: h["m"].as_u64().unwrap_or(0),
            depth: h["depth"].as_u64().unwrap_or(0),
            width_cap: h["width_cap"].as_u64().unwrap_or(0),
            gamma_budget: h["gamma_budget"].as_u64().unwrap_or(0),
            loop_budget: h["loop_budget"].as_u64().unwrap_or(0),
            final_sigma: serde_json::from_value(h["final_sigma"].clone())?,
            final_stage: h["final_stage"].as_u64().unwrap_or(0),
            stuck: serde_json::from_value(h["stuck"].clone())?,
            choices,
            events,
            rho_records,
            requirements,
        })
    }
}

fn wrap<T: Serialize>(tag: &str, value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("serializable");
    v["record"] = tag.into();
    v.to_string()
}
