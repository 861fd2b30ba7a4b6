//! Figure/table presets: desk-scale sweeps with published reference
//! numbers carried alongside for comparison. Trial counts here are
//! deliberately modest; `--trials` scales them up or down.

use crate::config::{AlgorithmSpec, BudgetSpec, ScenarioConfig, SweepSection};
use crate::runner::RefEntry;

pub struct Preset {
    pub id: &'static str,
    pub description: &'static str,
    pub config: ScenarioConfig,
    pub refs: Vec<RefEntry>,
}

pub const PRESET_IDS: &[&str] = &[
    "fig3a", "fig3b", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12",
    "table2", "table3",
];

fn watts(kind: &str, watts: f64) -> BudgetSpec {
    BudgetSpec {
        kind: kind.into(),
        watts: Some(watts),
        dbm: None,
    }
}

fn dbm(kind: &str, dbm: f64) -> BudgetSpec {
    BudgetSpec {
        kind: kind.into(),
        watts: None,
        dbm: Some(dbm),
    }
}

fn alg(name: &str) -> AlgorithmSpec {
    AlgorithmSpec {
        name: name.into(),
        label: None,
        epsilon: None,
        max_iter: None,
        t_rand: None,
        stop_rule: None,
        init: None,
        weights: None,
        shares_grid: None,
    }
}

fn base(
    seed: u64,
    trials: usize,
    sweep: SweepSection,
    algorithms: Vec<AlgorithmSpec>,
) -> ScenarioConfig {
    ScenarioConfig {
        seed,
        trials,
        out: None,
        propagation: Default::default(),
        sweep,
        algorithms,
    }
}

pub fn preset(id: &str) -> Option<Preset> {
    let p = match id {
        "fig3a" => Preset {
            id: "fig3a",
            description: "average voltage of the single-user design versus distance, for several array/tone sizes at 0.5 W",
            config: base(
                301,
                50,
                SweepSection {
                    m: vec![1, 4, 8],
                    n: vec![1, 4, 8],
                    k: vec![1],
                    distance_m: vec![5.0, 10.0, 15.0, 20.0, 30.0, 40.0],
                    budget: vec![watts("total_power", 0.5)],
                },
                vec![alg("su_wpt")],
            ),
            refs: vec![RefEntry {
                algorithm: "su_wpt".into(),
                m: Some(8),
                n: Some(1),
                k: None,
                metric: "vout_ref_at_10m".into(),
                value: 0.02734,
                note: "reference voltage the larger configurations should reach at longer range".into(),
            }],
        },
        "fig3b" => Preset {
            id: "fig3b",
            description: "average voltage of the single-sinewave baseline versus distance",
            config: base(
                302,
                50,
                SweepSection {
                    m: vec![1, 4, 8],
                    n: vec![1, 4, 8],
                    k: vec![1],
                    distance_m: vec![5.0, 10.0, 15.0, 20.0, 30.0, 40.0],
                    budget: vec![watts("total_power", 0.5)],
                },
                vec![alg("ass")],
            ),
            refs: vec![],
        },
        "fig4" => Preset {
            id: "fig4",
            description: "single-user design versus the joint weighted-sum design at K=1 under a 36 dBm radiated budget: the curves coincide",
            config: base(
                304,
                50,
                SweepSection {
                    m: vec![1, 4],
                    n: vec![2, 4, 8],
                    k: vec![1],
                    distance_m: vec![10.0],
                    budget: vec![dbm("eirp", 36.0)],
                },
                vec![alg("su_wpt"), alg("wsum")],
            ),
            refs: vec![],
        },
        "fig5" => Preset {
            id: "fig5",
            description: "scaling with the number of tones: single-user design, hardened weighted-sum, uniform power and single-sinewave baselines",
            config: base(
                305,
                50,
                SweepSection {
                    m: vec![4, 20],
                    n: vec![1, 2, 4, 8, 16],
                    k: vec![1],
                    distance_m: vec![10.0],
                    budget: vec![dbm("eirp", 36.0)],
                },
                vec![alg("su_wpt"), alg("che_wsum"), alg("up_mrt"), alg("ass")],
            ),
            refs: vec![],
        },
        "fig6" => Preset {
            id: "fig6",
            description: "two-user achievable voltage region at 20 m: weight sweep of the joint and hardened designs plus time-shared segments",
            config: {
                let mut algorithms = Vec::new();
                for i in 0..=10 {
                    let w1 = i as f64 / 10.0;
                    let mut a = alg("wsum");
                    a.label = Some(format!("wsum_w{w1:.1}"));
                    a.weights = Some(vec![w1, 1.0 - w1]);
                    algorithms.push(a);
                    let mut c = alg("che_wsum");
                    c.label = Some(format!("che_wsum_w{w1:.1}"));
                    c.weights = Some(vec![w1, 1.0 - w1]);
                    algorithms.push(c);
                }
                algorithms.push(alg("tdma_wsum"));
                base(
                    306,
                    1,
                    SweepSection {
                        m: vec![20],
                        n: vec![10],
                        k: vec![2],
                        distance_m: vec![20.0],
                        budget: vec![dbm("eirp", 36.0)],
                    },
                    algorithms,
                )
            },
            refs: vec![],
        },
        "fig7" => Preset {
            id: "fig7",
            description: "joint weighted-sum design versus its fixed-beamforming simplification as tones grow",
            config: base(
                307,
                50,
                SweepSection {
                    m: vec![4],
                    n: vec![2, 4, 8],
                    k: vec![1, 2],
                    distance_m: vec![10.0],
                    budget: vec![dbm("eirp", 36.0)],
                },
                vec![alg("wsum"), alg("wsum_s")],
            ),
            refs: vec![],
        },
        "fig8" => Preset {
            id: "fig8",
            description: "max-min designs at two and three users: rank reduction versus randomization with 1 and 50 candidates",
            config: {
                let mut rand1 = alg("max_min_rand");
                rand1.label = Some("max_min_rand_t1".into());
                rand1.t_rand = Some(1);
                let mut rand50 = alg("max_min_rand");
                rand50.label = Some("max_min_rand_t50".into());
                rand50.t_rand = Some(50);
                base(
                    308,
                    50,
                    SweepSection {
                        m: vec![4],
                        n: vec![4],
                        k: vec![2, 3],
                        distance_m: vec![10.0],
                        budget: vec![dbm("eirp", 36.0)],
                    },
                    vec![alg("max_min_rr"), rand1, rand50],
                )
            },
            refs: vec![],
        },
        "fig9" => Preset {
            id: "fig9",
            description: "hardened max-min designs against the exact randomized design across array sizes",
            config: base(
                309,
                30,
                SweepSection {
                    m: vec![4, 16],
                    n: vec![4, 8],
                    k: vec![2, 4],
                    distance_m: vec![10.0],
                    budget: vec![dbm("eirp", 36.0)],
                },
                vec![
                    alg("max_min_rand"),
                    alg("che_max_min_rr"),
                    alg("che_max_min_randomized"),
                ],
            ),
            refs: vec![],
        },
        "fig10" => Preset {
            id: "fig10",
            description: "fairness: distribution of the worst-user voltage under max-min, equal-weight and fairness-aware weighted-sum designs",
            config: base(
                310,
                100,
                SweepSection {
                    m: vec![8],
                    n: vec![4],
                    k: vec![4],
                    distance_m: vec![10.0],
                    budget: vec![dbm("eirp", 36.0)],
                },
                vec![
                    alg("max_min_rand"),
                    alg("wsum"),
                    alg("fa_wsum"),
                    alg("che_max_min_randomized"),
                ],
            ),
            refs: vec![],
        },
        "fig11" => Preset {
            id: "fig11",
            description: "hardened randomized max-min versus multi-user uniform power at a large array",
            config: base(
                311,
                30,
                SweepSection {
                    m: vec![16],
                    n: vec![8, 16],
                    k: vec![2, 4, 6],
                    distance_m: vec![10.0],
                    budget: vec![dbm("eirp", 36.0)],
                },
                vec![alg("che_max_min_randomized"), alg("mu_up")],
            ),
            refs: vec![],
        },
        "fig12" => Preset {
            id: "fig12",
            description: "worst-user voltage gain of the hardened randomized design over multi-user uniform power as users grow",
            config: base(
                312,
                30,
                SweepSection {
                    m: vec![16],
                    n: vec![8, 16],
                    k: vec![2, 4, 6, 8],
                    distance_m: vec![10.0],
                    budget: vec![dbm("eirp", 36.0)],
                },
                vec![alg("che_max_min_randomized"), alg("mu_up")],
            ),
            refs: vec![],
        },
        "table2" => Preset {
            id: "table2",
            description: "single-user design at M=1, N=8, P=3.98107 W with the objective stop rule: voltage, iterations, wall clock",
            config: {
                let mut a = alg("su_wpt");
                a.stop_rule = Some("objective".into());
                base(
                    320,
                    100,
                    SweepSection {
                        m: vec![1],
                        n: vec![8],
                        k: vec![1],
                        distance_m: vec![10.0],
                        budget: vec![watts("total_power", 3.98107)],
                    },
                    vec![a],
                )
            },
            refs: vec![
                RefEntry {
                    algorithm: "su_wpt".into(),
                    m: Some(1),
                    n: Some(8),
                    k: None,
                    metric: "mean_vout".into(),
                    value: 9.532e-2,
                    note: "reference average voltage; absolute levels carry the thermal-voltage calibration caveat".into(),
                },
            ],
        },
        "table3" => Preset {
            id: "table3",
            description: "energy transfer efficiency (vout per transmit watt) at N=16 under a 36 dBm radiated budget",
            config: base(
                330,
                100,
                SweepSection {
                    m: vec![1, 4, 20],
                    n: vec![16],
                    k: vec![1],
                    distance_m: vec![10.0],
                    budget: vec![dbm("eirp", 36.0)],
                },
                vec![alg("su_wpt"), alg("ass")],
            ),
            refs: vec![
                RefEntry {
                    algorithm: "su_wpt".into(),
                    m: Some(1),
                    n: Some(16),
                    k: None,
                    metric: "eta_t".into(),
                    value: 0.0397,
                    note: "reference efficiency V/W".into(),
                },
                RefEntry {
                    algorithm: "su_wpt".into(),
                    m: Some(4),
                    n: Some(16),
                    k: None,
                    metric: "eta_t".into(),
                    value: 0.0873,
                    note: "reference efficiency V/W".into(),
                },
                RefEntry {
                    algorithm: "su_wpt".into(),
                    m: Some(20),
                    n: Some(16),
                    k: None,
                    metric: "eta_t".into(),
                    value: 0.3914,
                    note: "reference efficiency V/W".into(),
                },
                RefEntry {
                    algorithm: "ass".into(),
                    m: Some(1),
                    n: Some(16),
                    k: None,
                    metric: "eta_t".into(),
                    value: 0.0242,
                    note: "reference efficiency V/W".into(),
                },
                RefEntry {
                    algorithm: "ass".into(),
                    m: Some(4),
                    n: Some(16),
                    k: None,
                    metric: "eta_t".into(),
                    value: 0.0508,
                    note: "reference efficiency V/W".into(),
                },
                RefEntry {
                    algorithm: "ass".into(),
                    m: Some(20),
                    n: Some(16),
                    k: None,
                    metric: "eta_t".into(),
                    value: 0.1894,
                    note: "reference efficiency V/W".into(),
                },
            ],
        },
        _ => return None,
    };
    Some(p)
}
