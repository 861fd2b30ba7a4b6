//! TOML scenario schema and exhaustive validation.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use waveform_algs::{AlgorithmConfig, Budget, InitStrategy, StopRule};

pub const KNOWN_ALGORITHMS: &[&str] = &[
    "su_wpt",
    "wsum",
    "wsum_s",
    "che_wsum",
    "max_min_rr",
    "max_min_rand",
    "che_max_min_rr",
    "che_max_min_randomized",
    "ass",
    "up_mrt",
    "mu_up",
    "fa_wsum",
    "tdma_wsum",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub trials: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub propagation: PropagationSection,
    pub sweep: SweepSection,
    pub algorithms: Vec<AlgorithmSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PropagationSection {
    pub f_c: f64,
    pub bandwidth: f64,
    pub pdp: String,
    pub tx_gain_db: f64,
    pub rx_gain_db: f64,
}

impl Default for PropagationSection {
    fn default() -> Self {
        Self {
            f_c: 2.4e9,
            bandwidth: 10e6,
            pdp: "tgn_model_e".into(),
            tx_gain_db: 0.0,
            rx_gain_db: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSection {
    pub m: Vec<usize>,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub distance_m: Vec<f64>,
    pub budget: Vec<BudgetSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BudgetSpec {
    /// "total_power" or "eirp".
    pub kind: String,
    #[serde(default)]
    pub watts: Option<f64>,
    #[serde(default)]
    pub dbm: Option<f64>,
}

impl BudgetSpec {
    pub fn watts_value(&self) -> Option<f64> {
        match (self.watts, self.dbm) {
            (Some(w), None) => Some(w),
            (None, Some(dbm)) => Some(10f64.powf(dbm / 10.0) / 1000.0),
            _ => None,
        }
    }

    pub fn to_budget(&self) -> Option<Budget> {
        let w = self.watts_value()?;
        match self.kind.as_str() {
            "total_power" => Some(Budget::TotalPower(w)),
            "eirp" => Some(Budget::Eirp(w)),
            _ => None,
        }
    }

}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub name: String,
    /// Distinguishes several entries of the same algorithm (different
    /// weights or candidate counts) in the output.
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub t_rand: Option<usize>,
    #[serde(default)]
    pub stop_rule: Option<String>,
    #[serde(default)]
    pub init: Option<String>,
    /// Per-user weights for the weighted-sum designs; equal when absent.
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    /// Time-share grid resolution for the tdma composition.
    #[serde(default)]
    pub shares_grid: Option<usize>,
}

impl AlgorithmSpec {
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.name.clone())
    }

    /// Concrete per-call configuration under a given budget.
    pub fn algorithm_config(&self, budget: Budget) -> AlgorithmConfig {
        let mut cfg = AlgorithmConfig {
            budget,
            ..Default::default()
        };
        if let Some(e) = self.epsilon {
            cfg.epsilon = e;
        }
        if let Some(mi) = self.max_iter {
            cfg.max_iter = mi;
        }
        if let Some(t) = self.t_rand {
            cfg.t_rand = t;
        }
        match self.stop_rule.as_deref() {
            Some("objective") => cfg.stop_rule = StopRule::Objective,
            Some("frobenius") | None => cfg.stop_rule = StopRule::Frobenius,
            Some(_) => {}
        }
        match self.init.as_deref() {
            Some("ass") => cfg.init = InitStrategy::Ass,
            Some("up_mrt") | None => cfg.init = InitStrategy::UpMrt,
            Some(_) => {}
        }
        cfg
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// Every problem in the configuration, all at once.
    pub fn validation_errors(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if self.trials == 0 {
            errs.push("trials must be at least 1".into());
        }
        if !(self.propagation.f_c > 0.0) || !(self.propagation.bandwidth > 0.0) {
            errs.push("carrier frequency and bandwidth must be positive".into());
        }
        if channel::PdpId::parse(&self.propagation.pdp).is_err() {
            errs.push(format!("unknown power delay profile {:?}", self.propagation.pdp));
        }
        for (axis, empty) in [
            ("sweep.m", self.sweep.m.is_empty()),
            ("sweep.n", self.sweep.n.is_empty()),
            ("sweep.k", self.sweep.k.is_empty()),
            ("sweep.distance_m", self.sweep.distance_m.is_empty()),
            ("sweep.budget", self.sweep.budget.is_empty()),
        ] {
            if empty {
                errs.push(format!("{axis} must not be empty"));
            }
        }
        if self.sweep.m.contains(&0) || self.sweep.n.contains(&0) {
            errs.push("antenna and tone counts must be at least 1".into());
        }
        if self.sweep.k.contains(&0) {
            errs.push("user counts must be at least 1".into());
        }
        if self.sweep.distance_m.iter().any(|&d| !(d > 0.0)) {
            errs.push("distances must be positive".into());
        }
        for (i, b) in self.sweep.budget.iter().enumerate() {
            if b.to_budget().is_none() {
                errs.push(format!(
                    "sweep.budget[{i}]: kind must be total_power or eirp with exactly one of watts/dbm"
                ));
            }
        }
        if self.algorithms.is_empty() {
            errs.push("at least one algorithm required".into());
        }
        let mut labels = std::collections::HashSet::new();
        for (i, alg) in self.algorithms.iter().enumerate() {
            if !KNOWN_ALGORITHMS.contains(&alg.name.as_str()) {
                errs.push(format!("algorithms[{i}]: unknown algorithm {:?}", alg.name));
                continue;
            }
            if !labels.insert(alg.label()) {
                errs.push(format!("algorithms[{i}]: duplicate label {:?}", alg.label()));
            }
            let single_user_only = matches!(alg.name.as_str(), "su_wpt" | "ass" | "up_mrt");
            if single_user_only && self.sweep.k.iter().any(|&k| k != 1) {
                errs.push(format!(
                    "algorithms[{i}]: {} requires k = 1 but the sweep includes k > 1",
                    alg.name
                ));
            }
            if alg.name == "max_min_rr" {
                if let Some(&bad) = self.sweep.k.iter().find(|&&k| k > 3) {
                    errs.push(format!(
                        "algorithms[{i}]: max_min_rr rejects k > 3 (sweep has k = {bad})"
                    ));
                }
            }
            if matches!(alg.name.as_str(), "tdma_wsum") && self.sweep.k.iter().any(|&k| k != 2) {
                errs.push(format!("algorithms[{i}]: tdma_wsum requires k = 2"));
            }
            if let Some(w) = &alg.weights {
                if self.sweep.k.iter().any(|&k| k != w.len()) {
                    errs.push(format!(
                        "algorithms[{i}]: weights length {} does not match every swept k",
                        w.len()
                    ));
                }
                if w.iter().any(|&x| x < 0.0) || w.iter().all(|&x| x == 0.0) {
                    errs.push(format!(
                        "algorithms[{i}]: weights must be nonnegative and not all zero"
                    ));
                }
            }
            if let Some(e) = alg.epsilon {
                if !(e > 0.0) {
                    errs.push(format!("algorithms[{i}]: epsilon must be positive"));
                }
            }
            if alg.t_rand == Some(0) {
                errs.push(format!("algorithms[{i}]: t_rand must be at least 1"));
            }
        }
        errs
    }
}
