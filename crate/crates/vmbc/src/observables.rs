//! Spatial-average estimators of the statistics driving the limit theorems:
//! type frequencies, finite-pattern probabilities `p_t(i0...ik)`, interface
//! density and the clustering diagnostic `P(X_t(u) = X_t(v))`.
//!
//! On a torus started from a translation-invariant law, the spatial average
//! of a pattern indicator is an unbiased estimator of the pattern
//! probability at any fixed site; replica averaging then supplies standard
//! errors.

use rayon::prelude::*;

use crate::engine::{run_with_observer, InitSpec, RunOptions, StopCondition};
use crate::error::{Error, Result};
use crate::kernels::{build_kernels, VertexSet};
use crate::rates::ModelParams;
use crate::stream::stream_seed;

/// Pattern estimates are restricted to short windows.
pub const MAX_PATTERN_LEN: usize = 6;

/// A single pattern-frequency estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternStat {
    pub pattern: String,
    pub estimate: f64,
    /// Simulated time of the sample.
    pub time: f64,
}

pub(crate) fn parse_pattern(pattern: &str) -> Result<Vec<u8>> {
    if pattern.is_empty() || pattern.len() > MAX_PATTERN_LEN {
        return Err(Error::InvalidPattern(pattern.to_string()));
    }
    pattern
        .chars()
        .map(|c| match c {
            '0' => Ok(0u8),
            '1' => Ok(1u8),
            _ => Err(Error::InvalidPattern(pattern.to_string())),
        })
        .collect()
}

/// Fraction of cyclic windows matching `pattern` (indices mod L).
pub fn pattern_frequency(states: &[u8], pattern: &str) -> Result<f64> {
    Ok(pattern_frequency_bits(states, &parse_pattern(pattern)?))
}

pub fn pattern_frequency_bits(states: &[u8], pattern: &[u8]) -> f64 {
    let l = states.len();
    debug_assert!(pattern.len() <= l);
    let mut matches = 0usize;
    for i in 0..l {
        let mut ok = true;
        for (j, &p) in pattern.iter().enumerate() {
            let idx = i + j;
            let idx = if idx >= l { idx - l } else { idx };
            if states[idx] != p {
                ok = false;
                break;
            }
        }
        if ok {
            matches += 1;
        }
    }
    matches as f64 / l as f64
}

/// Fraction of cooperators.
pub fn type_frequency(states: &[u8]) -> f64 {
    states.iter().filter(|&&s| s == 1).count() as f64 / states.len() as f64
}

/// One-dimensional interface density `p(10) + p(01)`; equals twice the
/// number of cooperator clusters divided by L on the cycle.
pub fn interface_density(states: &[u8]) -> f64 {
    let l = states.len();
    let mut edges = 0usize;
    for i in 0..l {
        let j = if i + 1 == l { 0 } else { i + 1 };
        if states[i] != states[j] {
            edges += 1;
        }
    }
    edges as f64 / l as f64
}

/// Fraction of unequal nearest-neighbor (ordered, per-axis) pairs on any
/// supported graph; reduces to [`interface_density`] in one dimension.
pub fn disagreement_density(states: &[u8], vs: &VertexSet) -> f64 {
    let n = vs.size();
    debug_assert_eq!(states.len(), n);
    let mut unequal = 0usize;
    let mut pairs = 0usize;
    for u in 0..n {
        for v in vs.neighbors(u) {
            pairs += 1;
            if states[u] != states[v] {
                unequal += 1;
            }
        }
    }
    unequal as f64 / pairs as f64
}

/// Spatial-average estimate of `P(X(u) = X(u + offset))` on the cycle.
pub fn agreement_frequency(states: &[u8], offset: usize) -> f64 {
    let l = states.len();
    let mut agree = 0usize;
    for i in 0..l {
        let j = (i + offset) % l;
        if states[i] == states[j] {
            agree += 1;
        }
    }
    agree as f64 / l as f64
}

/// Replica-averaged clustering diagnostics sampled at fixed event counts.
#[derive(Debug, Clone)]
pub struct ClusteringConfig {
    /// Patterns to estimate, e.g. `["10", "01", "101", "010"]`.
    pub patterns: Vec<String>,
    /// Offset of the site pair in the agreement estimator (default adjacent).
    pub pair_offset: usize,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        ClusteringConfig {
            patterns: vec!["10".into(), "01".into(), "101".into(), "010".into()],
            pair_offset: 1,
        }
    }
}

/// Mean and standard error over replicas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

fn estimate(samples: &[f64]) -> Estimate {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = if samples.len() > 1 {
        samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Estimate {
        mean,
        std_error: (var / n).sqrt(),
    }
}

#[derive(Debug, Clone)]
pub struct ClusteringPoint {
    pub events: u64,
    pub mean_time: f64,
    /// `P(X(u) = X(u + offset))` estimate.
    pub agreement: Estimate,
    pub frequency: Estimate,
    /// One estimate per configured pattern, in order.
    pub patterns: Vec<Estimate>,
}

#[derive(Debug, Clone)]
pub struct ClusteringReport {
    pub pattern_names: Vec<String>,
    pub points: Vec<ClusteringPoint>,
}

/// Runs `replicas` independent chains and samples the configured estimators
/// at each event mark (0 marks the initial state). Runs that absorb early
/// keep their frozen configuration for the remaining marks.
pub fn clustering_diagnostic(
    params: &ModelParams,
    vs: &VertexSet,
    init: &InitSpec,
    event_marks: &[u64],
    replicas: usize,
    seed: u64,
    config: &ClusteringConfig,
) -> Result<ClusteringReport> {
    if !vs.is_one_dimensional() {
        return Err(Error::InvalidArgument(
            "pattern diagnostics are defined on one-dimensional tori".into(),
        ));
    }
    if replicas == 0 {
        return Err(Error::InvalidArgument("need at least one replica".into()));
    }
    let mut marks: Vec<u64> = event_marks.to_vec();
    marks.sort_unstable();
    marks.dedup();
    if marks.is_empty() {
        return Err(Error::InvalidArgument("need at least one event mark".into()));
    }
    let patterns: Vec<Vec<u8>> = config
        .patterns
        .iter()
        .map(|p| parse_pattern(p))
        .collect::<Result<_>>()?;
    let kernels = build_kernels(vs, params.variant())?;
    let stats_per_mark = 2 + patterns.len();
    let max_mark = *marks.last().unwrap();

    let per_replica: Vec<Result<(Vec<Vec<f64>>, Vec<f64>)>> = (0..replicas)
        .into_par_iter()
        .map(|replica| {
            let mut rows: Vec<Vec<f64>> = Vec::with_capacity(marks.len());
            let mut times: Vec<f64> = Vec::with_capacity(marks.len());
            let mut next_mark = 0usize;
            let stop = StopCondition::events(max_mark).with_absorption();
            let opts = RunOptions {
                record_events: false,
                snapshot_every: None,
            };
            let traj = run_with_observer(
                params,
                &kernels,
                init,
                &stop,
                stream_seed(seed, &[replica as u64]),
                opts,
                |events, time, cfg| {
                    while next_mark < marks.len() && events == marks[next_mark] {
                        let states = cfg.states();
                        let mut row = Vec::with_capacity(stats_per_mark);
                        row.push(agreement_frequency(states, config.pair_offset));
                        row.push(type_frequency(states));
                        for p in &patterns {
                            row.push(pattern_frequency_bits(states, p));
                        }
                        rows.push(row);
                        times.push(time);
                        next_mark += 1;
                    }
                },
            )?;
            // Freeze the final state for marks past absorption.
            while next_mark < marks.len() {
                let states = &traj.final_state;
                let mut row = Vec::with_capacity(stats_per_mark);
                row.push(agreement_frequency(states, config.pair_offset));
                row.push(type_frequency(states));
                for p in &patterns {
                    row.push(pattern_frequency_bits(states, p));
                }
                rows.push(row);
                times.push(traj.final_time);
                next_mark += 1;
            }
            Ok((rows, times))
        })
        .collect();

    let mut all_rows = Vec::with_capacity(replicas);
    for r in per_replica {
        all_rows.push(r?);
    }

    let points = marks
        .iter()
        .enumerate()
        .map(|(mi, &mark)| {
            let collect = |stat: usize| -> Vec<f64> {
                all_rows.iter().map(|(rows, _)| rows[mi][stat]).collect()
            };
            let mean_time =
                all_rows.iter().map(|(_, times)| times[mi]).sum::<f64>() / replicas as f64;
            ClusteringPoint {
                events: mark,
                mean_time,
                agreement: estimate(&collect(0)),
                frequency: estimate(&collect(1)),
                patterns: (0..patterns.len()).map(|p| estimate(&collect(2 + p))).collect(),
            }
        })
        .collect();

    Ok(ClusteringReport {
        pattern_names: config.patterns.clone(),
        points,
    })
}
