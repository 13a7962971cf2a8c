//! Binary sum tree over per-site rates: O(log n) update and weighted sampling.

/// Complete binary tree stored in an array; leaf `i` lives at
/// `leaf_count + i`, internal node `k` holds the sum of its children.
#[derive(Debug, Clone)]
pub struct SumTree {
    len: usize,
    leaf_count: usize,
    data: Vec<f64>,
}

impl SumTree {
    pub fn new(values: &[f64]) -> Self {
        let leaf_count = values.len().max(1).next_power_of_two();
        let mut tree = SumTree {
            len: values.len(),
            leaf_count,
            data: vec![0.0; 2 * leaf_count],
        };
        tree.rebuild(values);
        tree
    }

    pub fn zeros(len: usize) -> Self {
        let leaf_count = len.max(1).next_power_of_two();
        SumTree {
            len,
            leaf_count,
            data: vec![0.0; 2 * leaf_count],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn total(&self) -> f64 {
        self.data[1]
    }

    pub fn get(&self, i: usize) -> f64 {
        self.data[self.leaf_count + i]
    }

    pub fn set(&mut self, i: usize, value: f64) {
        debug_assert!(i < self.len);
        let mut pos = self.leaf_count + i;
        self.data[pos] = value;
        while pos > 1 {
            pos >>= 1;
            self.data[pos] = self.data[pos << 1] + self.data[(pos << 1) | 1];
        }
    }

    pub fn rebuild(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.len);
        self.data.fill(0.0);
        self.data[self.leaf_count..self.leaf_count + values.len()].copy_from_slice(values);
        for k in (1..self.leaf_count).rev() {
            self.data[k] = self.data[k << 1] + self.data[(k << 1) | 1];
        }
    }

    /// Index of the leaf containing cumulative weight `r`, for `r` in
    /// `[0, total)`. Rounding can land on a zero leaf; the result is nudged to
    /// the nearest positive-rate leaf so a sampled index always has rate > 0.
    pub fn sample(&self, r: f64) -> usize {
        debug_assert!(r >= 0.0);
        let mut r = r;
        let mut pos = 1;
        while pos < self.leaf_count {
            let left = self.data[pos << 1];
            if r < left {
                pos <<= 1;
            } else {
                r -= left;
                pos = (pos << 1) | 1;
            }
        }
        let mut i = pos - self.leaf_count;
        if i >= self.len || self.data[self.leaf_count + i] <= 0.0 {
            // Fall back to a scan; only reachable through floating-point edge
            // cases at leaf boundaries.
            i = (0..self.len)
                .rev()
                .find(|&j| self.data[self.leaf_count + j] > 0.0)
                .expect("sample called on a tree with zero total");
        }
        i
    }
}
