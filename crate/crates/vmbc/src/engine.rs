//! Exact event-driven simulation of the spin-flip dynamics.
//!
//! The chain holds for an exponential time with the total cached rate, picks
//! a site proportionally to its flip rate (sum-tree sampling), flips it and
//! refreshes the cache on the flipped site's dependency set. Trajectories
//! are reproducible from `(seed, params, init)` alone.

use rand::Rng;

use crate::error::{Error, Result};
use crate::kernels::KernelPair;
use crate::rates::{Configuration, ModelParams};
use crate::stream::stream_rng;

/// Initial-condition specification.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    /// Independent coin flips with cooperator probability `p`.
    Bernoulli(f64),
    /// Finitely many cooperators: `X = 1_A`.
    FiniteCooperators(Vec<usize>),
    /// Finitely many defectors: `X = 1 - 1_A`.
    FiniteDefectors(Vec<usize>),
    /// Explicit bit string.
    Explicit(Vec<u8>),
}

impl InitSpec {
    fn validate(&self, n: usize) -> Result<()> {
        match self {
            InitSpec::Bernoulli(p) => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::InvalidInit(format!(
                        "bernoulli probability must lie in [0,1], got {p}"
                    )));
                }
            }
            InitSpec::FiniteCooperators(sites) | InitSpec::FiniteDefectors(sites) => {
                if sites.is_empty() {
                    return Err(Error::InvalidInit("site set must be nonempty".into()));
                }
                if let Some(&bad) = sites.iter().find(|&&s| s >= n) {
                    return Err(Error::InvalidInit(format!(
                        "site {bad} out of range for {n} sites"
                    )));
                }
            }
            InitSpec::Explicit(bits) => {
                if bits.len() != n {
                    return Err(Error::InvalidInit(format!(
                        "explicit configuration has {} bits, expected {n}",
                        bits.len()
                    )));
                }
                if bits.iter().any(|&b| b > 1) {
                    return Err(Error::InvalidInit("explicit bits must be 0 or 1".into()));
                }
            }
        }
        Ok(())
    }
}

/// Draws an initial configuration on `n` sites.
pub fn sample_initial(spec: &InitSpec, n: usize, rng: &mut impl Rng) -> Result<Vec<u8>> {
    spec.validate(n)?;
    Ok(match spec {
        InitSpec::Bernoulli(p) => (0..n).map(|_| (rng.random::<f64>() < *p) as u8).collect(),
        InitSpec::FiniteCooperators(sites) => {
            let mut states = vec![0u8; n];
            for &s in sites {
                states[s] = 1;
            }
            states
        }
        InitSpec::FiniteDefectors(sites) => {
            let mut states = vec![1u8; n];
            for &s in sites {
                states[s] = 0;
            }
            states
        }
        InitSpec::Explicit(bits) => bits.clone(),
    })
}

/// When to stop a run. At least one bound must be set; absorption always
/// terminates the event loop regardless (an absorbed chain produces no
/// further events).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopCondition {
    pub max_events: Option<u64>,
    pub max_time: Option<f64>,
    pub stop_on_absorption: bool,
}

impl StopCondition {
    pub fn events(max_events: u64) -> Self {
        StopCondition {
            max_events: Some(max_events),
            max_time: None,
            stop_on_absorption: false,
        }
    }

    pub fn time(max_time: f64) -> Self {
        StopCondition {
            max_events: None,
            max_time: Some(max_time),
            stop_on_absorption: false,
        }
    }

    pub fn absorption() -> Self {
        StopCondition {
            max_events: None,
            max_time: None,
            stop_on_absorption: true,
        }
    }

    pub fn with_absorption(mut self) -> Self {
        self.stop_on_absorption = true;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.max_events.is_none() && self.max_time.is_none() && !self.stop_on_absorption {
            return Err(Error::InvalidStop(
                "at least one of max_events, max_time, stop_on_absorption must be set".into(),
            ));
        }
        if let Some(t) = self.max_time {
            if !(t >= 0.0) {
                return Err(Error::InvalidStop(format!("max_time must be >= 0, got {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub site: usize,
    pub new_state: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Absorption {
    None,
    All0,
    All1,
}

/// Lightweight observable sample taken every `snapshot_every` events.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub events: u64,
    pub time: f64,
    pub frequency: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub initial_state: Vec<u8>,
    /// Per-event log; empty when event recording is off.
    pub events: Vec<Event>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: Vec<u8>,
    pub absorption: Absorption,
    pub event_count: u64,
    pub final_time: f64,
    pub flips_up: u64,
    pub flips_down: u64,
}

impl Trajectory {
    pub fn final_frequency(&self) -> f64 {
        let ones = self.final_state.iter().filter(|&&s| s == 1).count();
        ones as f64 / self.final_state.len() as f64
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub record_events: bool,
    pub snapshot_every: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            record_events: true,
            snapshot_every: None,
        }
    }
}

/// Outcome of a single exact step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOutcome {
    /// Holding time and the applied flip.
    Event { dt: f64, site: usize, new_state: u8 },
    /// Total rate is zero; no further transitions exist.
    Absorbed,
}

/// One exact transition: exponential holding time at the total cached rate,
/// site chosen proportionally to its rate, flip applied and cache refreshed.
pub fn step(
    params: &ModelParams,
    kernels: &KernelPair,
    config: &mut Configuration,
    rng: &mut impl Rng,
) -> StepOutcome {
    let total = config.total_rate();
    if total <= 0.0 {
        return StepOutcome::Absorbed;
    }
    // (0,1] so the log never sees zero.
    let u: f64 = 1.0 - rng.random::<f64>();
    let dt = -u.ln() / total;
    let site = config.sample_site(rng.random::<f64>() * total);
    config.apply_flip(params, kernels, site);
    StepOutcome::Event {
        dt,
        site,
        new_state: config.state(site),
    }
}

fn classify_absorption(config: &Configuration) -> Absorption {
    if config.ones() == 0 {
        Absorption::All0
    } else if config.ones() == config.len() {
        Absorption::All1
    } else {
        Absorption::None
    }
}

/// Runs the chain from `init` until `stop` triggers; records every event.
pub fn run(
    params: &ModelParams,
    kernels: &KernelPair,
    init: &InitSpec,
    stop: &StopCondition,
    seed: u64,
) -> Result<Trajectory> {
    run_with_observer(params, kernels, init, stop, seed, RunOptions::default(), |_, _, _| {})
}

/// As [`run`], with explicit recording options and an observer called once
/// on the initial state (event count 0) and after every applied event.
pub fn run_with_observer<F>(
    params: &ModelParams,
    kernels: &KernelPair,
    init: &InitSpec,
    stop: &StopCondition,
    seed: u64,
    opts: RunOptions,
    mut observer: F,
) -> Result<Trajectory>
where
    F: FnMut(u64, f64, &Configuration),
{
    stop.validate()?;
    let mut rng = stream_rng(seed, &[]);
    let initial_state = sample_initial(init, kernels.size(), &mut rng)?;
    let mut config = Configuration::new(params, kernels, initial_state.clone());

    let mut events = Vec::new();
    let mut snapshots = Vec::new();
    let mut event_count: u64 = 0;
    let mut now = 0.0;
    let mut flips_up = 0u64;
    let mut flips_down = 0u64;

    observer(0, 0.0, &config);
    if opts.snapshot_every.is_some() {
        snapshots.push(Snapshot {
            events: 0,
            time: 0.0,
            frequency: config.frequency(),
        });
    }

    let mut absorption = classify_absorption(&config);
    if config.total_rate() > 0.0 {
        absorption = Absorption::None;
        loop {
            if let Some(max_events) = stop.max_events {
                if event_count >= max_events {
                    break;
                }
            }
            match step(params, kernels, &mut config, &mut rng) {
                StepOutcome::Absorbed => {
                    absorption = classify_absorption(&config);
                    break;
                }
                StepOutcome::Event {
                    dt,
                    site,
                    new_state,
                } => {
                    if let Some(max_time) = stop.max_time {
                        if now + dt > max_time {
                            // The flip happens after the horizon: roll it back
                            // and freeze the state at max_time.
                            config.apply_flip(params, kernels, site);
                            now = max_time;
                            break;
                        }
                    }
                    now += dt;
                    event_count += 1;
                    if new_state == 1 {
                        flips_up += 1;
                    } else {
                        flips_down += 1;
                    }
                    if opts.record_events {
                        events.push(Event {
                            time: now,
                            site,
                            new_state,
                        });
                    }
                    observer(event_count, now, &config);
                    if let Some(every) = opts.snapshot_every {
                        if every > 0 && event_count % every == 0 {
                            snapshots.push(Snapshot {
                                events: event_count,
                                time: now,
                                frequency: config.frequency(),
                            });
                        }
                    }
                    if config.total_rate() <= 0.0 {
                        absorption = classify_absorption(&config);
                        break;
                    }
                }
            }
        }
    }

    Ok(Trajectory {
        initial_state,
        events,
        snapshots,
        final_state: config.states().to_vec(),
        absorption,
        event_count,
        final_time: now,
        flips_up,
        flips_down,
    })
}
