//! Flip rates for all model variants, plus the cached-rate configuration.
//!
//! A site `u` flips at rate `c(u,X)`:
//!
//! * defector (`X(u) = 0`):
//!   `c(u,X) = sum_v a(v,u) X(v) + gamma sum_v X(v) sum_w X(w) b(w,(v,u))`
//! * cooperator (`X(u) = 1`):
//!   `c(u,X) = (1+alpha) sum_v a(v,u)(1-X(v))
//!             + gamma sum_v (1-X(v)) sum_w X(w) b(w,(v,u))`
//!
//! The kin-recognition variant drops the cooperation term from the
//! cooperator case only (cooperators help only cooperators, so they no
//! longer assist defectors in overwriting a cooperator). The biased voter
//! model replaces both rates by `(1+beta) sum_v a(v,u) X(v)` and
//! `(1+delta) sum_v a(v,u)(1-X(v))`.
//!
//! [`flip_rate_bruteforce`] transcribes the sums literally over all site
//! pairs and serves as the oracle; [`flip_rate`]/[`flip_rate_fast`] use the
//! precomputed sparse in-lists (tori, hand-built kernels) or cooperator
//! counts (complete graphs) and must agree with the oracle.

use crate::error::{Error, Result};
use crate::kernels::{KernelPair, Repr};
use crate::sumtree::SumTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Cvmbc,
    Avmbc,
    Kin,
    BiasedVoter,
}

/// Model variant with its rates. Selection `alpha` and cooperation `gamma`
/// must be nonnegative; the biased voter model takes biases
/// `beta, delta > -1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelParams {
    Cvmbc { alpha: f64, gamma: f64 },
    Avmbc { alpha: f64, gamma: f64 },
    Kin { alpha: f64, gamma: f64 },
    BiasedVoter { beta: f64, delta: f64 },
}

fn check_vmbc(alpha: f64, gamma: f64) -> Result<()> {
    if !(alpha >= 0.0) || !(gamma >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "alpha and gamma must be nonnegative, got alpha={alpha}, gamma={gamma}"
        )));
    }
    Ok(())
}

impl ModelParams {
    pub fn cvmbc(alpha: f64, gamma: f64) -> Result<Self> {
        check_vmbc(alpha, gamma)?;
        Ok(ModelParams::Cvmbc { alpha, gamma })
    }

    pub fn avmbc(alpha: f64, gamma: f64) -> Result<Self> {
        check_vmbc(alpha, gamma)?;
        Ok(ModelParams::Avmbc { alpha, gamma })
    }

    pub fn kin(alpha: f64, gamma: f64) -> Result<Self> {
        check_vmbc(alpha, gamma)?;
        Ok(ModelParams::Kin { alpha, gamma })
    }

    pub fn biased_voter(beta: f64, delta: f64) -> Result<Self> {
        if !(beta > -1.0) || !(delta > -1.0) {
            return Err(Error::InvalidParams(format!(
                "biases must exceed -1, got beta={beta}, delta={delta}"
            )));
        }
        Ok(ModelParams::BiasedVoter { beta, delta })
    }

    pub fn variant(&self) -> Variant {
        match self {
            ModelParams::Cvmbc { .. } => Variant::Cvmbc,
            ModelParams::Avmbc { .. } => Variant::Avmbc,
            ModelParams::Kin { .. } => Variant::Kin,
            ModelParams::BiasedVoter { .. } => Variant::BiasedVoter,
        }
    }

    /// Coarse per-site rate bound for row-stochastic kernels.
    pub fn rate_bound(&self) -> f64 {
        match *self {
            ModelParams::Cvmbc { alpha, gamma }
            | ModelParams::Avmbc { alpha, gamma }
            | ModelParams::Kin { alpha, gamma } => 1.0 + alpha + gamma,
            ModelParams::BiasedVoter { beta, delta } => (1.0 + beta).max(1.0 + delta),
        }
    }
}

/// Literal evaluation of the rate sums over every pair of sites; the oracle
/// the fast path is tested against. O(n^2) per call.
pub fn flip_rate_bruteforce(
    params: &ModelParams,
    kernels: &KernelPair,
    states: &[u8],
    u: usize,
) -> f64 {
    let n = kernels.size();
    debug_assert_eq!(states.len(), n);
    if states[u] == 0 {
        let mut voter = 0.0;
        for v in 0..n {
            if states[v] == 1 {
                voter += kernels.reproduction(v, u);
            }
        }
        match *params {
            ModelParams::BiasedVoter { beta, .. } => (1.0 + beta) * voter,
            ModelParams::Cvmbc { gamma, .. }
            | ModelParams::Avmbc { gamma, .. }
            | ModelParams::Kin { gamma, .. } => {
                let mut coop = 0.0;
                for v in 0..n {
                    if states[v] == 0 {
                        continue;
                    }
                    for w in 0..n {
                        if states[w] == 1 {
                            coop += kernels.cooperation(w, v, u);
                        }
                    }
                }
                voter + gamma * coop
            }
        }
    } else {
        let mut voter = 0.0;
        for v in 0..n {
            if states[v] == 0 {
                voter += kernels.reproduction(v, u);
            }
        }
        match *params {
            ModelParams::BiasedVoter { delta, .. } => (1.0 + delta) * voter,
            ModelParams::Kin { alpha, .. } => (1.0 + alpha) * voter,
            ModelParams::Cvmbc { alpha, gamma } | ModelParams::Avmbc { alpha, gamma } => {
                let mut coop = 0.0;
                for v in 0..n {
                    if states[v] == 1 {
                        continue;
                    }
                    for w in 0..n {
                        if states[w] == 1 {
                            coop += kernels.cooperation(w, v, u);
                        }
                    }
                }
                (1.0 + alpha) * voter + gamma * coop
            }
        }
    }
}

/// Fast-path rate of site `u` given the raw state and the cooperator count.
pub fn flip_rate(
    params: &ModelParams,
    kernels: &KernelPair,
    states: &[u8],
    ones: usize,
    u: usize,
) -> f64 {
    match &kernels.repr {
        Repr::Sparse {
            repro_in, coop_in, ..
        } => rate_sparse(params, &repro_in[u], &coop_in[u], states, states[u]),
        Repr::Complete { n } => rate_complete(params, *n, ones, states[u]),
    }
}

/// Fast-path rate read off a [`Configuration`]'s state.
pub fn flip_rate_fast(
    params: &ModelParams,
    kernels: &KernelPair,
    config: &Configuration,
    u: usize,
) -> f64 {
    flip_rate(params, kernels, config.states(), config.ones(), u)
}

fn rate_sparse(
    params: &ModelParams,
    repro_in: &[(usize, f64)],
    coop_in: &[(usize, usize, f64)],
    states: &[u8],
    own: u8,
) -> f64 {
    if own == 0 {
        let mut voter = 0.0;
        for &(v, weight) in repro_in {
            if states[v] == 1 {
                voter += weight;
            }
        }
        match *params {
            ModelParams::BiasedVoter { beta, .. } => (1.0 + beta) * voter,
            ModelParams::Cvmbc { gamma, .. }
            | ModelParams::Avmbc { gamma, .. }
            | ModelParams::Kin { gamma, .. } => {
                let mut coop = 0.0;
                for &(v, helper, weight) in coop_in {
                    if states[v] == 1 && states[helper] == 1 {
                        coop += weight;
                    }
                }
                voter + gamma * coop
            }
        }
    } else {
        let mut voter = 0.0;
        for &(v, weight) in repro_in {
            if states[v] == 0 {
                voter += weight;
            }
        }
        match *params {
            ModelParams::BiasedVoter { delta, .. } => (1.0 + delta) * voter,
            ModelParams::Kin { alpha, .. } => (1.0 + alpha) * voter,
            ModelParams::Cvmbc { alpha, gamma } | ModelParams::Avmbc { alpha, gamma } => {
                let mut coop = 0.0;
                for &(v, helper, weight) in coop_in {
                    if states[v] == 0 && states[helper] == 1 {
                        coop += weight;
                    }
                }
                (1.0 + alpha) * voter + gamma * coop
            }
        }
    }
}

fn rate_complete(params: &ModelParams, n: usize, ones: usize, own: u8) -> f64 {
    let nf = n as f64;
    let k = ones as f64;
    if own == 0 {
        // All cooperators are distinct from u; pairs of distinct cooperators
        // (v, w) drive the cooperation term.
        let voter = k / (nf - 1.0);
        match *params {
            ModelParams::BiasedVoter { beta, .. } => (1.0 + beta) * voter,
            ModelParams::Cvmbc { gamma, .. }
            | ModelParams::Avmbc { gamma, .. }
            | ModelParams::Kin { gamma, .. } => {
                voter + gamma * k * (k - 1.0) / ((nf - 1.0) * (nf - 2.0))
            }
        }
    } else {
        let defectors = (n - ones) as f64;
        let voter = defectors / (nf - 1.0);
        match *params {
            ModelParams::BiasedVoter { delta, .. } => (1.0 + delta) * voter,
            ModelParams::Kin { alpha, .. } => (1.0 + alpha) * voter,
            ModelParams::Cvmbc { alpha, gamma } | ModelParams::Avmbc { alpha, gamma } => {
                (1.0 + alpha) * voter
                    + gamma * defectors * (k - 1.0) / ((nf - 1.0) * (nf - 2.0))
            }
        }
    }
}

/// A `{0,1}` configuration with its per-site flip-rate cache (a sum tree, so
/// the total rate and weighted site sampling are O(log n)).
#[derive(Debug, Clone)]
pub struct Configuration {
    states: Vec<u8>,
    ones: usize,
    rates: SumTree,
}

impl Configuration {
    pub fn new(params: &ModelParams, kernels: &KernelPair, states: Vec<u8>) -> Self {
        assert_eq!(states.len(), kernels.size());
        debug_assert!(states.iter().all(|&s| s <= 1));
        let ones = states.iter().filter(|&&s| s == 1).count();
        let values: Vec<f64> = (0..states.len())
            .map(|u| flip_rate(params, kernels, &states, ones, u))
            .collect();
        Configuration {
            states,
            ones,
            rates: SumTree::new(&values),
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[u8] {
        &self.states
    }

    pub fn state(&self, u: usize) -> u8 {
        self.states[u]
    }

    pub fn ones(&self) -> usize {
        self.ones
    }

    /// Fraction of cooperators.
    pub fn frequency(&self) -> f64 {
        self.ones as f64 / self.states.len() as f64
    }

    pub fn rate(&self, u: usize) -> f64 {
        self.rates.get(u)
    }

    pub fn total_rate(&self) -> f64 {
        self.rates.total()
    }

    pub(crate) fn sample_site(&self, r: f64) -> usize {
        self.rates.sample(r)
    }

    /// Flips site `u` and refreshes the cache exactly on its dependency set.
    pub fn apply_flip(&mut self, params: &ModelParams, kernels: &KernelPair, u: usize) {
        let new_state = 1 - self.states[u];
        self.states[u] = new_state;
        if new_state == 1 {
            self.ones += 1;
        } else {
            self.ones -= 1;
        }
        match &kernels.repr {
            Repr::Sparse { deps, .. } => {
                for &s in &deps[u] {
                    let r = flip_rate(params, kernels, &self.states, self.ones, s);
                    self.rates.set(s, r);
                }
            }
            Repr::Complete { n } => {
                // Every site reads the cooperator count.
                for s in 0..*n {
                    let r = flip_rate(params, kernels, &self.states, self.ones, s);
                    self.rates.set(s, r);
                }
            }
        }
    }

    /// Rebuilds the whole cache from the fast-path rates.
    pub fn recompute_cache_full(&mut self, params: &ModelParams, kernels: &KernelPair) {
        let values: Vec<f64> = (0..self.states.len())
            .map(|u| flip_rate(params, kernels, &self.states, self.ones, u))
            .collect();
        self.rates.rebuild(&values);
    }

    /// Largest absolute difference between the cache and the brute-force
    /// oracle over all sites.
    pub fn max_cache_deviation(&self, params: &ModelParams, kernels: &KernelPair) -> f64 {
        (0..self.states.len())
            .map(|u| (self.rate(u) - flip_rate_bruteforce(params, kernels, &self.states, u)).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{build_complete_kernels, build_torus_kernels};
    use rand::Rng;
    use rand::SeedableRng;

    fn bits(s: &str) -> Vec<u8> {
        s.bytes().map(|b| b - b'0').collect()
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(ModelParams::cvmbc(-0.1, 0.0).is_err());
        assert!(ModelParams::cvmbc(0.0, -0.1).is_err());
        assert!(ModelParams::biased_voter(-1.0, 0.0).is_err());
        assert!(ModelParams::biased_voter(0.0, -1.5).is_err());
        assert!(ModelParams::biased_voter(-0.5, -0.5).is_ok());
    }

    #[test]
    fn defector_rate_with_helper_behind() {
        // X = 110000 on the 6-cycle, u = 2: voter term 1/2 from site 1,
        // cooperation term 1/2 from helper 0 pushing 1 onto 2.
        let kernels = build_torus_kernels(1, 6, Variant::Cvmbc).unwrap();
        let params = ModelParams::cvmbc(0.0, 1.0).unwrap();
        let states = bits("110000");
        assert_eq!(flip_rate_bruteforce(&params, &kernels, &states, 2), 1.0);
        assert_eq!(flip_rate(&params, &kernels, &states, 2, 2), 1.0);
    }

    #[test]
    fn all_defector_state_is_frozen() {
        let kernels = build_torus_kernels(1, 6, Variant::Avmbc).unwrap();
        let params = ModelParams::avmbc(0.5, 2.0).unwrap();
        let states = bits("000000");
        for u in 0..6 {
            assert_eq!(flip_rate_bruteforce(&params, &kernels, &states, u), 0.0);
            assert_eq!(flip_rate(&params, &kernels, &states, 0, u), 0.0);
        }
    }

    #[test]
    fn isolated_cooperator_dies_at_selection_rate() {
        let kernels = build_torus_kernels(1, 6, Variant::Cvmbc).unwrap();
        let params = ModelParams::cvmbc(0.5, 1.0).unwrap();
        let states = bits("001000");
        assert_eq!(flip_rate_bruteforce(&params, &kernels, &states, 2), 1.5);
        assert_eq!(flip_rate(&params, &kernels, &states, 1, 2), 1.5);
    }

    #[test]
    fn all_ones_cooperator_is_frozen() {
        let kernels = build_torus_kernels(1, 6, Variant::Cvmbc).unwrap();
        let params = ModelParams::cvmbc(0.25, 0.75).unwrap();
        let states = bits("111111");
        for u in 0..6 {
            assert_eq!(flip_rate(&params, &kernels, &states, 6, u), 0.0);
        }
    }

    #[test]
    fn complete_graph_defector_rate_formula() {
        let n = 50;
        let kernels = build_complete_kernels(n).unwrap();
        let gamma = 0.75;
        let params = ModelParams::cvmbc(0.5, gamma).unwrap();
        let k = 17;
        let mut states = vec![0u8; n];
        for s in states.iter_mut().take(k) {
            *s = 1;
        }
        let u = n - 1;
        let kf = k as f64;
        let nf = n as f64;
        let expected = kf / (nf - 1.0) + gamma * kf * (kf - 1.0) / ((nf - 1.0) * (nf - 2.0));
        let fast = flip_rate(&params, &kernels, &states, k, u);
        assert!((fast - expected).abs() < 1e-15);
        let brute = flip_rate_bruteforce(&params, &kernels, &states, u);
        assert!((fast - brute).abs() < 1e-12);
    }

    #[test]
    fn oracle_equality_random_configurations() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5151);
        let cases = [
            (1usize, 24usize),
            (2, 6),
        ];
        for (d, l) in cases {
            for variant in [
                Variant::Cvmbc,
                Variant::Avmbc,
                Variant::Kin,
                Variant::BiasedVoter,
            ] {
                let kernels = build_torus_kernels(d, l, variant).unwrap();
                let params = match variant {
                    Variant::Cvmbc => ModelParams::cvmbc(0.3125, 0.75).unwrap(),
                    Variant::Avmbc => ModelParams::avmbc(0.25, 1.5).unwrap(),
                    Variant::Kin => ModelParams::kin(0.5, 0.625).unwrap(),
                    Variant::BiasedVoter => ModelParams::biased_voter(0.375, 0.875).unwrap(),
                };
                let n = kernels.size();
                for _ in 0..60 {
                    let states: Vec<u8> =
                        (0..n).map(|_| rng.random::<bool>() as u8).collect();
                    let ones = states.iter().filter(|&&s| s == 1).count();
                    for _ in 0..5 {
                        let u = rng.random_range(0..n);
                        let fast = flip_rate(&params, &kernels, &states, ones, u);
                        let brute = flip_rate_bruteforce(&params, &kernels, &states, u);
                        assert!(
                            (fast - brute).abs() <= 1e-12,
                            "d={d} {variant:?} u={u}: fast={fast} brute={brute}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn avmbc_rates_equal_reparametrized_cvmbc_in_1d() {
        let l = 16;
        let avmbc_kernels = build_torus_kernels(1, l, Variant::Avmbc).unwrap();
        let cvmbc_kernels = build_torus_kernels(1, l, Variant::Cvmbc).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..200 {
            let alpha = (rng.random_range(0..8) as f64) * 0.125;
            let gamma = (rng.random_range(0..8) as f64) * 0.25;
            let pa = ModelParams::avmbc(alpha, gamma).unwrap();
            let pc = ModelParams::cvmbc(alpha + gamma / 2.0, gamma / 2.0).unwrap();
            let states: Vec<u8> = (0..l).map(|_| rng.random::<bool>() as u8).collect();
            let ones = states.iter().filter(|&&s| s == 1).count();
            for u in 0..l {
                let ra = flip_rate(&pa, &avmbc_kernels, &states, ones, u);
                let rc = flip_rate(&pc, &cvmbc_kernels, &states, ones, u);
                assert_eq!(ra, rc, "alpha={alpha} gamma={gamma} u={u}");
            }
        }
    }

    #[test]
    fn non_attractiveness_witness_on_directed_three_cycle() {
        // a(u,v) = a(v,w) = a(w,u) = 1 and b = a∘a; X = 001 <= Y = 101 but
        // c(w,X) < c(w,Y), violating the monotone-coupling condition for the
        // cooperator case.
        let repro = vec![vec![(1, 1.0)], vec![(2, 1.0)], vec![(0, 1.0)]];
        let coop = vec![
            vec![(1, 2, 1.0)],
            vec![(2, 0, 1.0)],
            vec![(0, 1, 1.0)],
        ];
        let kernels = KernelPair::from_rows(3, repro, coop);
        let alpha = 0.5;
        let gamma = 0.25;
        let params = ModelParams::cvmbc(alpha, gamma).unwrap();
        let x = bits("001");
        let y = bits("101");
        let cx = flip_rate_bruteforce(&params, &kernels, &x, 2);
        let cy = flip_rate_bruteforce(&params, &kernels, &y, 2);
        assert_eq!(cx, 1.0 + alpha);
        assert_eq!(cy, 1.0 + alpha + gamma);
        assert!(cx < cy);
        assert_eq!(flip_rate(&params, &kernels, &x, 1, 2), cx);
        assert_eq!(flip_rate(&params, &kernels, &y, 2, 2), cy);
    }

    #[test]
    fn kin_variant_dominates_cvmbc_ratewise() {
        let kernels = build_torus_kernels(1, 12, Variant::Cvmbc).unwrap();
        let pc = ModelParams::cvmbc(0.5, 1.25).unwrap();
        let pk = ModelParams::kin(0.5, 1.25).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let states: Vec<u8> = (0..12).map(|_| rng.random::<bool>() as u8).collect();
            let ones = states.iter().filter(|&&s| s == 1).count();
            for u in 0..12 {
                let rc = flip_rate(&pc, &kernels, &states, ones, u);
                let rk = flip_rate(&pk, &kernels, &states, ones, u);
                if states[u] == 1 {
                    assert!(rk <= rc);
                } else {
                    assert_eq!(rk, rc);
                }
            }
        }
    }

    #[test]
    fn configuration_cache_tracks_flips() {
        let kernels = build_torus_kernels(1, 10, Variant::Cvmbc).unwrap();
        let params = ModelParams::cvmbc(0.5, 0.75).unwrap();
        let mut cfg = Configuration::new(&params, &kernels, bits("0110010011"));
        assert_eq!(cfg.ones(), 5);
        assert_eq!(cfg.max_cache_deviation(&params, &kernels), 0.0);
        for u in [0, 3, 7, 2, 2, 9] {
            cfg.apply_flip(&params, &kernels, u);
            assert_eq!(cfg.max_cache_deviation(&params, &kernels), 0.0);
        }
        let total: f64 = (0..10).map(|u| cfg.rate(u)).sum();
        assert!((cfg.total_rate() - total).abs() < 1e-12);
    }

    #[test]
    fn single_defector_in_cooperator_sea() {
        // Defector flips back at rate 1+gamma; each flanking cooperator dies
        // at rate (1+alpha)/2 + gamma/2.
        let kernels = build_torus_kernels(1, 8, Variant::Cvmbc).unwrap();
        let alpha = 0.75;
        let gamma = 0.5;
        let params = ModelParams::cvmbc(alpha, gamma).unwrap();
        let mut states = vec![1u8; 8];
        states[3] = 0;
        let cfg = Configuration::new(&params, &kernels, states);
        assert_eq!(cfg.rate(3), 1.0 + gamma);
        assert_eq!(cfg.rate(2), (1.0 + alpha) / 2.0 + gamma / 2.0);
        assert_eq!(cfg.rate(4), (1.0 + alpha) / 2.0 + gamma / 2.0);
        for u in [0, 1, 5, 6, 7] {
            assert_eq!(cfg.rate(u), 0.0);
        }
    }
}
