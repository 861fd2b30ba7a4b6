//! Sweep execution: expand the scenario grid, run every (point, trial)
//! job on the worker pool with derived substreams, and reduce to a
//! canonical CSV plus a JSON summary. Output bytes depend only on
//! (config, seed), never on the worker count.

use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use channel::{gen_realization, ChannelRealization, PdpId, PropagationConfig};
use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rectenna_model::{beta_coefficients, BetaCoefficients, RectifierParams};
use waveform_algs::{
    baseline_ass, baseline_mu_up, baseline_up_mrt, che_max_min_randomized, che_max_min_rr,
    che_wsum, fairness_weights, max_min_rand, max_min_rr, su_wpt, tdma_compose, wsum, wsum_s,
    AlgStatus, AlgorithmConfig, Budget, PrecoderResult,
};

use crate::config::{AlgorithmSpec, ScenarioConfig};
use crate::summary::{bootstrap_ci, mean, PointSummary, ReferenceValue, SummaryDoc};

pub const SCHEMA_VERSION: u32 = 1;
pub const WORKERS_ENV: &str = "BENCH_WORKERS";

const SEED_DOMAIN_CHANNEL: u64 = 0xC4A2;
const SEED_DOMAIN_ALGORITHM: u64 = 0xA167;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub distance_m: f64,
    pub budget_kind: String,
    pub budget_watts: f64,
}

impl SweepPoint {
    fn budget(&self) -> Budget {
        match self.budget_kind.as_str() {
            "eirp" => Budget::Eirp(self.budget_watts),
            _ => Budget::TotalPower(self.budget_watts),
        }
    }

    fn budget_label(&self) -> String {
        format!("{}:{:.6e}", self.budget_kind, self.budget_watts)
    }
}

#[derive(Debug, Clone)]
pub struct ResultRow {
    pub preset: String,
    pub algorithm: String,
    pub variant: String,
    pub point: SweepPoint,
    pub trial: usize,
    pub channel_seed: u64,
    pub status: String,
    pub iterations: usize,
    pub wall_clock_s: f64,
    pub vout_users: Vec<f64>,
}

impl ResultRow {
    pub fn vout_min(&self) -> f64 {
        self.vout_users.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn vout_sum(&self) -> f64 {
        self.vout_users.iter().sum()
    }

    fn sort_key(&self) -> (String, String, usize, usize, usize, u64, String, usize) {
        (
            self.algorithm.clone(),
            self.variant.clone(),
            self.point.m,
            self.point.n,
            self.point.k,
            self.point.distance_m.to_bits(),
            self.point.budget_label(),
            self.trial,
        )
    }
}

/// Reference numbers a preset pins next to its measured output.
#[derive(Debug, Clone)]
pub struct RefEntry {
    pub algorithm: String,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub metric: String,
    pub value: f64,
    pub note: String,
}

pub fn expand_points(cfg: &ScenarioConfig) -> Vec<SweepPoint> {
    let mut points = Vec::new();
    for &m in &cfg.sweep.m {
        for &n in &cfg.sweep.n {
            for &k in &cfg.sweep.k {
                for &d in &cfg.sweep.distance_m {
                    for b in &cfg.sweep.budget {
                        points.push(SweepPoint {
                            m,
                            n,
                            k,
                            distance_m: d,
                            budget_kind: b.kind.clone(),
                            budget_watts: b.watts_value().unwrap_or(f64::NAN),
                        });
                    }
                }
            }
        }
    }
    points
}

struct AlgOutcome {
    variant: String,
    vout_users: Vec<f64>,
    iterations: usize,
    status: String,
}

fn status_label(s: AlgStatus) -> String {
    match s {
        AlgStatus::Converged => "converged".into(),
        AlgStatus::MaxIter => "max_iter".into(),
    }
}

fn from_result(res: PrecoderResult) -> AlgOutcome {
    AlgOutcome {
        variant: String::new(),
        vout_users: res.vout_per_user.clone(),
        iterations: res.iterations().saturating_sub(1),
        status: status_label(res.status),
    }
}

fn equal_weights(k: usize) -> Vec<f64> {
    vec![1.0; k]
}

fn run_algorithm(
    spec: &AlgorithmSpec,
    ch: &ChannelRealization,
    beta: &BetaCoefficients,
    alg_cfg: &AlgorithmConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<AlgOutcome>> {
    let k = ch.n_users();
    let weights = spec.weights.clone().unwrap_or_else(|| equal_weights(k));
    let out = match spec.name.as_str() {
        "su_wpt" => vec![from_result(su_wpt(ch, beta, alg_cfg)?)],
        "wsum" => vec![from_result(wsum(ch, &weights, beta, alg_cfg)?)],
        "wsum_s" => vec![from_result(wsum_s(ch, &weights, beta, alg_cfg)?)],
        "che_wsum" => vec![from_result(che_wsum(ch, &weights, beta, alg_cfg, rng)?)],
        "max_min_rr" => vec![from_result(max_min_rr(ch, beta, alg_cfg)?)],
        "max_min_rand" => vec![from_result(max_min_rand(ch, beta, alg_cfg, rng)?)],
        "che_max_min_rr" => vec![from_result(che_max_min_rr(ch, beta, alg_cfg)?)],
        "che_max_min_randomized" => {
            vec![from_result(che_max_min_randomized(ch, beta, alg_cfg, rng)?)]
        }
        "ass" => vec![from_result(baseline_ass(ch, beta, alg_cfg)?)],
        "up_mrt" => vec![from_result(baseline_up_mrt(ch, beta, alg_cfg)?)],
        "mu_up" => vec![from_result(baseline_mu_up(ch, beta, alg_cfg)?)],
        "fa_wsum" => {
            let fw = fairness_weights(ch, beta, alg_cfg)?;
            vec![from_result(wsum(ch, &fw, beta, alg_cfg)?)]
        }
        "tdma_wsum" => {
            // dedicated-slot designs per user, composed over a share grid
            if k != 2 {
                bail!("tdma_wsum requires exactly two users");
            }
            let first = wsum(ch, &[1.0, 0.0], beta, alg_cfg)?;
            let second = wsum(ch, &[0.0, 1.0], beta, alg_cfg)?;
            let corners = [first.vout_per_user[0], second.vout_per_user[1]];
            let iters = first.iterations().saturating_sub(1) + second.iterations().saturating_sub(1);
            let grid = spec.shares_grid.unwrap_or(11).max(2);
            (0..grid)
                .map(|i| {
                    let a = i as f64 / (grid - 1) as f64;
                    let mixed = tdma_compose(&corners, &[a, 1.0 - a])?;
                    Ok(AlgOutcome {
                        variant: format!("share={a:.4}"),
                        vout_users: mixed,
                        iterations: iters,
                        status: "converged".into(),
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        other => bail!("unknown algorithm {other}"),
    };
    Ok(out)
}

fn derive_u64(master: u64, tags: &[u64]) -> u64 {
    channel::rng::derive_stream(master, tags).next_u64()
}

/// Run the whole scenario on the worker pool. Deterministic for a fixed
/// (config, seed) regardless of worker count.
pub fn run_scenario(
    cfg: &ScenarioConfig,
    preset_name: &str,
    refs: &[RefEntry],
) -> Result<(Vec<ResultRow>, SummaryDoc)> {
    let errors = cfg.validation_errors();
    if !errors.is_empty() {
        bail!("configuration invalid:\n  - {}", errors.join("\n  - "));
    }
    let beta = beta_coefficients(&RectifierParams::default())?;
    let points = expand_points(cfg);
    let pdp = PdpId::parse(&cfg.propagation.pdp).map_err(|e| anyhow!("{e}"))?;

    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..cfg.trials).map(move |t| (p, t)))
        .collect();

    let pool = build_pool()?;
    let rows_nested: Result<Vec<Vec<ResultRow>>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(pi, trial)| {
                let point = &points[pi];
                let channel_seed =
                    derive_u64(cfg.seed, &[SEED_DOMAIN_CHANNEL, pi as u64, trial as u64]);
                let prop = PropagationConfig {
                    f_c: cfg.propagation.f_c,
                    bandwidth: cfg.propagation.bandwidth,
                    n_tones: point.n,
                    n_antennas: point.m,
                    n_users: point.k,
                    distances_m: vec![point.distance_m; point.k],
                    tx_gain_db: cfg.propagation.tx_gain_db,
                    rx_gain_db: cfg.propagation.rx_gain_db,
                    pdp_id: pdp.clone(),
                    seed: channel_seed,
                };
                let ch = gen_realization(&prop)
                    .with_context(|| format!("channel generation at point {pi}"))?;
                let mut rows = Vec::new();
                for (ai, spec) in cfg.algorithms.iter().enumerate() {
                    let alg_cfg = spec.algorithm_config(point.budget());
                    let mut rng = channel::rng::derive_stream(
                        cfg.seed,
                        &[SEED_DOMAIN_ALGORITHM, pi as u64, trial as u64, ai as u64],
                    );
                    let started = Instant::now();
                    let outcomes = run_algorithm(spec, &ch, &beta, &alg_cfg, &mut rng)
                        .with_context(|| format!("algorithm {} at point {pi}", spec.label()))?;
                    let elapsed = started.elapsed().as_secs_f64();
                    for o in outcomes {
                        rows.push(ResultRow {
                            preset: preset_name.to_string(),
                            algorithm: spec.label(),
                            variant: o.variant,
                            point: point.clone(),
                            trial,
                            channel_seed,
                            status: o.status,
                            iterations: o.iterations,
                            wall_clock_s: elapsed,
                            vout_users: o.vout_users,
                        });
                    }
                }
                Ok(rows)
            })
            .collect()
    });
    let mut rows: Vec<ResultRow> = rows_nested?.into_iter().flatten().collect();
    rows.sort_by_key(|a| a.sort_key());

    let summary = summarize(cfg, preset_name, &rows, refs);
    Ok((rows, summary))
}

fn build_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let workers: usize = v
            .parse()
            .with_context(|| format!("{WORKERS_ENV} must be a positive integer"))?;
        builder = builder.num_threads(workers.max(1));
    }
    Ok(builder.build()?)
}

fn summarize(
    cfg: &ScenarioConfig,
    preset_name: &str,
    rows: &[ResultRow],
    refs: &[RefEntry],
) -> SummaryDoc {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<(String, String, usize, usize, usize, u64, String), Vec<&ResultRow>> =
        BTreeMap::new();
    for row in rows {
        groups
            .entry((
                row.algorithm.clone(),
                row.variant.clone(),
                row.point.m,
                row.point.n,
                row.point.k,
                row.point.distance_m.to_bits(),
                row.point.budget_label(),
            ))
            .or_default()
            .push(row);
    }
    let mut points = Vec::new();
    for ((alg, variant, m, n, k, dist_bits, budget), group) in groups {
        let mins: Vec<f64> = group.iter().map(|r| r.vout_min()).collect();
        let sums: Vec<f64> = group.iter().map(|r| r.vout_sum()).collect();
        let ci_seed = derive_u64(
            cfg.seed,
            &[0xB007, m as u64, n as u64, k as u64, dist_bits, fnv(&alg), fnv(&variant)],
        );
        let reference = refs
            .iter()
            .find(|r| {
                r.algorithm == alg
                    && r.m.is_none_or(|v| v == m)
                    && r.n.is_none_or(|v| v == n)
                    && r.k.is_none_or(|v| v == k)
            })
            .map(|r| ReferenceValue {
                metric: r.metric.clone(),
                value: r.value,
                note: r.note.clone(),
            });
        points.push(PointSummary {
            algorithm: alg,
            variant,
            m,
            n,
            k,
            distance_m: f64::from_bits(dist_bits),
            budget,
            trials: group.len(),
            mean_vout_min: mean(&mins),
            ci_vout_min: bootstrap_ci(&mins, ci_seed),
            mean_vout_sum: mean(&sums),
            ci_vout_sum: bootstrap_ci(&sums, ci_seed.wrapping_add(1)),
            mean_iterations: mean(&group.iter().map(|r| r.iterations as f64).collect::<Vec<_>>()),
            mean_wall_clock_s: mean(&group.iter().map(|r| r.wall_clock_s).collect::<Vec<_>>()),
            reference,
        });
    }
    SummaryDoc {
        schema_version: SCHEMA_VERSION,
        preset: preset_name.to_string(),
        seed: cfg.seed,
        points,
    }
}

fn fnv(s: &str) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for b in s.bytes() {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x1000_0000_01b3);
    }
    hash
}

/// Format a float with 17 significant digits (round-trip exact).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: std::io::Write>(rows: &[ResultRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "schema_version",
        "preset",
        "algorithm",
        "variant",
        "m",
        "n",
        "k",
        "distance_m",
        "budget_kind",
        "budget_watts",
        "power_w",
        "trial",
        "channel_seed",
        "status",
        "iterations",
        "vout_min",
        "vout_sum",
        "vout_users",
    ])?;
    for r in rows {
        let power = r.point.budget().power(r.point.m);
        let users = r
            .vout_users
            .iter()
            .map(|v| fmt_f64(*v))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            SCHEMA_VERSION.to_string(),
            r.preset.clone(),
            r.algorithm.clone(),
            r.variant.clone(),
            r.point.m.to_string(),
            r.point.n.to_string(),
            r.point.k.to_string(),
            fmt_f64(r.point.distance_m),
            r.point.budget_kind.clone(),
            fmt_f64(r.point.budget_watts),
            fmt_f64(power),
            r.trial.to_string(),
            r.channel_seed.to_string(),
            r.status.clone(),
            r.iterations.to_string(),
            fmt_f64(r.vout_min()),
            fmt_f64(r.vout_sum()),
            users,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-call wall-clock sidecar; timing is inherently nondeterministic,
/// so it stays out of the reproducible results file.
pub fn write_timings_csv<W: std::io::Write>(rows: &[ResultRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "algorithm", "variant", "m", "n", "k", "distance_m", "budget_kind", "budget_watts",
        "trial", "iterations", "wall_clock_s",
    ])?;
    for r in rows {
        w.write_record([
            r.algorithm.clone(),
            r.variant.clone(),
            r.point.m.to_string(),
            r.point.n.to_string(),
            r.point.k.to_string(),
            fmt_f64(r.point.distance_m),
            r.point.budget_kind.clone(),
            fmt_f64(r.point.budget_watts),
            r.trial.to_string(),
            r.iterations.to_string(),
            fmt_f64(r.wall_clock_s),
        ])?;
    }
    w.flush()?;
    Ok(())
}
