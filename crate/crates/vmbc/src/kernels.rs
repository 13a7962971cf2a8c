//! Finite vertex sets and the reproduction/cooperation kernel pair.
//!
//! The model is driven by two Markov kernels on a vertex set `V`: a
//! reproduction kernel `a(u,v)` (one individual reproducing onto a
//! neighbor) and a cooperation kernel `b(u,(v,w))` (a cooperator at `u`
//! helping the individual at `v` to reproduce onto `w`). Supported graphs
//! are d-dimensional periodic tori (nearest-neighbor kernels) and complete
//! graphs (uniform kernels over distinct pairs/triples).
//!
//! On the torus, `a(u,v) = 1/(2d)` for lattice neighbors. The cooperation
//! kernel depends on the variant: the altruistic one is the plain two-step
//! kernel `b(u,(v,w)) = 1/(2d)^2`, the cooperative one excludes the helper
//! site itself, `b(u,(v,w)) = 1/(2d(2d-1))` for `w != u` (the two-step
//! kernel of a self-avoiding walk).
//!
//! Kernels are stored as per-site sparse lists. Complete-graph kernels are
//! never materialized; their rates follow from counts.

use crate::error::{Error, Result};
use crate::rates::Variant;

/// Summability/row-stochasticity report threshold.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    /// `dim`-dimensional torus with `side` sites per axis, `dim` in 1..=3.
    Torus { dim: usize, side: usize },
    /// Complete graph on `n` vertices.
    Complete { n: usize },
}

/// A finite vertex set together with its graph structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexSet {
    kind: GraphKind,
}

impl VertexSet {
    /// Periodic torus. The engine floor is `side >= 3`; experiment presets
    /// in one dimension use `side >= 5` so the cooperation kernel's second
    /// step never wraps onto the helper site.
    pub fn torus(dim: usize, side: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGraph(format!(
                "torus dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        if side < 3 {
            return Err(Error::InvalidGraph(format!(
                "torus side must be at least 3, got {side}"
            )));
        }
        Ok(VertexSet {
            kind: GraphKind::Torus { dim, side },
        })
    }

    /// Complete graph; the cooperation kernel needs three distinct sites.
    pub fn complete(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGraph(format!(
                "complete graph needs at least 3 sites, got {n}"
            )));
        }
        Ok(VertexSet {
            kind: GraphKind::Complete { n },
        })
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        match self.kind {
            GraphKind::Torus { dim, side } => side.pow(dim as u32),
            GraphKind::Complete { n } => n,
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self.kind {
            GraphKind::Torus { dim, .. } => Some(dim),
            GraphKind::Complete { .. } => None,
        }
    }

    pub fn is_one_dimensional(&self) -> bool {
        matches!(self.kind, GraphKind::Torus { dim: 1, .. })
    }

    /// Lattice neighbors of `u` (2d of them on a torus, everyone else on the
    /// complete graph).
    pub fn neighbors(&self, u: usize) -> Vec<usize> {
        match self.kind {
            GraphKind::Torus { dim, side } => {
                let mut out = Vec::with_capacity(2 * dim);
                let mut rem = u;
                let mut stride = 1;
                for _ in 0..dim {
                    let coord = rem % side;
                    let down = u - coord * stride + ((coord + side - 1) % side) * stride;
                    let up = u - coord * stride + ((coord + 1) % side) * stride;
                    out.push(down);
                    out.push(up);
                    rem /= side;
                    stride *= side;
                }
                out
            }
            GraphKind::Complete { n } => (0..n).filter(|&v| v != u).collect(),
        }
    }

    /// Site reached from `u` by the (modular) shift `z`, one entry per axis.
    pub fn translate(&self, u: usize, z: &[usize]) -> usize {
        match self.kind {
            GraphKind::Torus { dim, side } => {
                assert_eq!(z.len(), dim);
                let mut out = 0;
                let mut rem = u;
                let mut stride = 1;
                for &shift in z.iter().take(dim) {
                    let coord = (rem % side + shift) % side;
                    out += coord * stride;
                    rem /= side;
                    stride *= side;
                }
                out
            }
            GraphKind::Complete { .. } => u,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Repr {
    Sparse {
        /// Row `u`: entries `(v, a(u,v))`.
        repro_out: Vec<Vec<(usize, f64)>>,
        /// Row `u`: entries `(v, w, b(u,(v,w)))`.
        coop_out: Vec<Vec<(usize, usize, f64)>>,
        /// Target `u`: entries `(v, a(v,u))`.
        repro_in: Vec<Vec<(usize, f64)>>,
        /// Target `u`: entries `(v, w, b(w,(v,u)))` — helper `w` pushes `v`
        /// onto `u`.
        coop_in: Vec<Vec<(usize, usize, f64)>>,
        /// Sites whose flip rate reads coordinate `u` (plus `u` itself).
        deps: Vec<Vec<usize>>,
    },
    Complete {
        n: usize,
    },
}

/// The kernel pair `(a, b)` on a fixed vertex set.
///
/// Immutable after construction and safe to share across parallel replicas.
/// Builders produce row-stochastic kernels; [`KernelPair::from_rows`]
/// accepts arbitrary nonnegative weights so that rate evaluation can be
/// exercised on hand-built counterexamples.
#[derive(Debug, Clone)]
pub struct KernelPair {
    n: usize,
    pub(crate) repr: Repr,
}

impl KernelPair {
    pub fn size(&self) -> usize {
        self.n
    }

    /// Builds a kernel pair from explicit sparse rows; no stochasticity is
    /// enforced.
    pub fn from_rows(
        n: usize,
        repro_rows: Vec<Vec<(usize, f64)>>,
        coop_rows: Vec<Vec<(usize, usize, f64)>>,
    ) -> KernelPair {
        assert_eq!(repro_rows.len(), n);
        assert_eq!(coop_rows.len(), n);
        let mut repro_in = vec![Vec::new(); n];
        for (u, row) in repro_rows.iter().enumerate() {
            for &(v, weight) in row {
                repro_in[v].push((u, weight));
            }
        }
        let mut coop_in = vec![Vec::new(); n];
        for (helper, row) in coop_rows.iter().enumerate() {
            for &(v, w, weight) in row {
                coop_in[w].push((v, helper, weight));
            }
        }
        let mut reads: Vec<Vec<usize>> = vec![Vec::new(); n];
        for s in 0..n {
            for &(v, _) in &repro_in[s] {
                reads[v].push(s);
            }
            for &(v, helper, _) in &coop_in[s] {
                reads[v].push(s);
                reads[helper].push(s);
            }
        }
        let mut deps = Vec::with_capacity(n);
        for (u, mut touched) in reads.into_iter().enumerate() {
            touched.push(u);
            touched.sort_unstable();
            touched.dedup();
            deps.push(touched);
        }
        KernelPair {
            n,
            repr: Repr::Sparse {
                repro_out: repro_rows,
                coop_out: coop_rows,
                repro_in,
                coop_in,
                deps,
            },
        }
    }

    /// `a(u,v)`.
    pub fn reproduction(&self, u: usize, v: usize) -> f64 {
        match &self.repr {
            Repr::Sparse { repro_out, .. } => repro_out[u]
                .iter()
                .filter(|&&(t, _)| t == v)
                .map(|&(_, w)| w)
                .sum(),
            Repr::Complete { n } => {
                if u == v {
                    0.0
                } else {
                    1.0 / (*n as f64 - 1.0)
                }
            }
        }
    }

    /// `b(u,(v,w))`.
    pub fn cooperation(&self, u: usize, v: usize, w: usize) -> f64 {
        match &self.repr {
            Repr::Sparse { coop_out, .. } => coop_out[u]
                .iter()
                .filter(|&&(x, y, _)| x == v && y == w)
                .map(|&(_, _, weight)| weight)
                .sum(),
            Repr::Complete { n } => {
                if u != v && v != w && w != u {
                    let n = *n as f64;
                    1.0 / ((n - 1.0) * (n - 2.0))
                } else {
                    0.0
                }
            }
        }
    }

    /// All sites `s` whose flip rate depends on coordinate `u`; flipping `u`
    /// must refresh cached rates exactly on this set (which includes `u`).
    pub fn dependency_set(&self, u: usize) -> Vec<usize> {
        match &self.repr {
            Repr::Sparse { deps, .. } => deps[u].clone(),
            Repr::Complete { n } => (0..*n).collect(),
        }
    }
}

/// Nearest-neighbor kernels on a periodic torus.
///
/// The reproduction kernel is `a(u,v) = 1/(2d)` for all variants. The
/// altruistic variant uses `b(u,(v,w)) = 1/(2d)^2`; the cooperative,
/// kin-recognition and biased-voter variants carry the self-avoiding kernel
/// `b(u,(v,w)) = 1/(2d(2d-1))` for `w != u` (the biased voter model never
/// reads `b`; the kin variant reads it only for flips of defectors).
pub fn build_torus_kernels(dim: usize, side: usize, variant: Variant) -> Result<KernelPair> {
    let vs = VertexSet::torus(dim, side)?;
    let n = vs.size();
    let degree = 2 * dim;
    let a_weight = 1.0 / degree as f64;
    let mut repro_rows = Vec::with_capacity(n);
    let mut coop_rows = Vec::with_capacity(n);
    for u in 0..n {
        let nbrs = vs.neighbors(u);
        repro_rows.push(nbrs.iter().map(|&v| (v, a_weight)).collect::<Vec<_>>());
        let mut row = Vec::new();
        match variant {
            Variant::Avmbc => {
                let b_weight = 1.0 / (degree * degree) as f64;
                for &v in &nbrs {
                    for w in vs.neighbors(v) {
                        row.push((v, w, b_weight));
                    }
                }
            }
            Variant::Cvmbc | Variant::Kin | Variant::BiasedVoter => {
                let b_weight = 1.0 / (degree * (degree - 1)) as f64;
                for &v in &nbrs {
                    for w in vs.neighbors(v) {
                        if w != u {
                            row.push((v, w, b_weight));
                        }
                    }
                }
            }
        }
        coop_rows.push(row);
    }
    Ok(KernelPair::from_rows(n, repro_rows, coop_rows))
}

/// Uniform kernels on the complete graph: `a(u,v) = 1/(N-1)` and
/// `b(u,(v,w)) = 1/((N-1)(N-2))` over distinct triples. Rates are computed
/// from cooperator counts; nothing is materialized.
pub fn build_complete_kernels(n: usize) -> Result<KernelPair> {
    let vs = VertexSet::complete(n)?;
    Ok(KernelPair {
        n: vs.size(),
        repr: Repr::Complete { n },
    })
}

/// Kernels for `variant` on `vs`.
pub fn build_kernels(vs: &VertexSet, variant: Variant) -> Result<KernelPair> {
    match vs.kind() {
        GraphKind::Torus { dim, side } => build_torus_kernels(dim, side, variant),
        GraphKind::Complete { n } => build_complete_kernels(n),
    }
}

/// Row-stochasticity and summability report for a kernel pair.
#[derive(Debug, Clone)]
pub struct KernelValidation {
    /// `max_u |sum_v a(u,v) - 1|`.
    pub max_row_deviation_a: f64,
    /// `max_u |sum_(v,w) b(u,(v,w)) - 1|`.
    pub max_row_deviation_b: f64,
    /// `sum_u a(u,v)` for every `v` (finiteness side of the kernel
    /// assumption; on doubly stochastic kernels these are all 1).
    pub col_sums_a: Vec<f64>,
    /// `sum_(u,v) b(u,(v,w))` for every `w`.
    pub col_sums_b: Vec<f64>,
    /// True when both row deviations stay within [`ROW_SUM_TOLERANCE`].
    pub pass: bool,
}

/// Checks that `a` and `b` are Markov kernels and reports the column sums
/// required to stay finite. Pure report; nothing is rejected here.
pub fn validate_kernels(kernels: &KernelPair) -> KernelValidation {
    let n = kernels.size();
    let (max_dev_a, max_dev_b, col_a, col_b) = match &kernels.repr {
        Repr::Sparse {
            repro_out,
            coop_out,
            ..
        } => {
            let mut col_a = vec![0.0; n];
            let mut col_b = vec![0.0; n];
            let mut dev_a: f64 = 0.0;
            let mut dev_b: f64 = 0.0;
            for u in 0..n {
                let mut row_sum = 0.0;
                for &(v, weight) in &repro_out[u] {
                    row_sum += weight;
                    col_a[v] += weight;
                }
                dev_a = dev_a.max((row_sum - 1.0).abs());
                let mut b_sum = 0.0;
                for &(_, w, weight) in &coop_out[u] {
                    b_sum += weight;
                    col_b[w] += weight;
                }
                dev_b = dev_b.max((b_sum - 1.0).abs());
            }
            (dev_a, dev_b, col_a, col_b)
        }
        Repr::Complete { n: sites } => {
            let nf = *sites as f64;
            let row_a = (nf - 1.0) * (1.0 / (nf - 1.0));
            let row_b = ((nf - 1.0) * (nf - 2.0)) * (1.0 / ((nf - 1.0) * (nf - 2.0)));
            (
                (row_a - 1.0).abs(),
                (row_b - 1.0).abs(),
                vec![row_a; *sites],
                vec![row_b; *sites],
            )
        }
    };
    KernelValidation {
        max_row_deviation_a: max_dev_a,
        max_row_deviation_b: max_dev_b,
        col_sums_a: col_a,
        col_sums_b: col_b,
        pass: max_dev_a <= ROW_SUM_TOLERANCE && max_dev_b <= ROW_SUM_TOLERANCE,
    }
}
