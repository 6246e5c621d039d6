//! Tournament tree over the grid cells: global argmin, range rebuilds
//! after localized bump updates, and directional "first cell at the
//! minimum" descents used by the min-model center rule.

/// Segment tree on (value, index) pairs. Ties resolve to the lowest index.
#[derive(Debug, Clone)]
pub struct MinTree {
    /// Padded leaf count, power of two.
    size: usize,
    /// Number of real leaves.
    n: usize,
    min: Vec<f64>,
    arg: Vec<u32>,
}

impl MinTree {
    /// A tree over `n` cells initialized to all zeros.
    pub fn new(n: usize) -> Self {
        assert!(n > 0 && n < u32::MAX as usize);
        let size = n.next_power_of_two();
        let mut tree = MinTree {
            size,
            n,
            min: vec![f64::INFINITY; 2 * size],
            arg: vec![u32::MAX; 2 * size],
        };
        tree.rebuild_from(&vec![0.0; n]);
        tree
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Full O(n) rebuild from a value slice.
    pub fn rebuild_from(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.n);
        for i in 0..self.size {
            if i < self.n {
                self.min[self.size + i] = values[i];
                self.arg[self.size + i] = i as u32;
            } else {
                self.min[self.size + i] = f64::INFINITY;
                self.arg[self.size + i] = u32::MAX;
            }
        }
        for node in (1..self.size).rev() {
            self.pull(node);
        }
    }

    /// Recompute the tree after `values[lo..=hi]` changed.
    /// Costs O(hi - lo + log n).
    pub fn update_range_from(&mut self, values: &[f64], lo: usize, hi: usize) {
        debug_assert!(lo <= hi && hi < self.n);
        for i in lo..=hi {
            self.min[self.size + i] = values[i];
        }
        let mut a = (self.size + lo) / 2;
        let mut b = (self.size + hi) / 2;
        while a >= 1 {
            for node in a..=b {
                self.pull(node);
            }
            if a == 1 {
                break;
            }
            a /= 2;
            b /= 2;
        }
    }

    #[inline]
    fn pull(&mut self, node: usize) {
        let l = 2 * node;
        let r = 2 * node + 1;
        // <= keeps the lowest index on ties
        if self.min[l] <= self.min[r] {
            self.min[node] = self.min[l];
            self.arg[node] = self.arg[l];
        } else {
            self.min[node] = self.min[r];
            self.arg[node] = self.arg[r];
        }
    }

    /// Global minimum and the lowest cell index attaining it.
    pub fn global_min(&self) -> (f64, usize) {
        (self.min[1], self.arg[1] as usize)
    }

    /// Leftmost index in `[lo, hi]` whose value is <= `bound`.
    pub fn leftmost_leq(&self, lo: usize, hi: usize, bound: f64) -> Option<usize> {
        if lo > hi {
            return None;
        }
        self.descend(1, 0, self.size - 1, lo, hi.min(self.n - 1), bound, true)
    }

    /// Rightmost index in `[lo, hi]` whose value is <= `bound`.
    pub fn rightmost_leq(&self, lo: usize, hi: usize, bound: f64) -> Option<usize> {
        if lo > hi {
            return None;
        }
        self.descend(1, 0, self.size - 1, lo, hi.min(self.n - 1), bound, false)
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        node: usize,
        node_lo: usize,
        node_hi: usize,
        lo: usize,
        hi: usize,
        bound: f64,
        leftmost: bool,
    ) -> Option<usize> {
        if node_hi < lo || node_lo > hi || self.min[node] > bound {
            return None;
        }
        if node >= self.size {
            return Some(node - self.size);
        }
        let mid = (node_lo + node_hi) / 2;
        let first = (2 * node, node_lo, mid);
        let second = (2 * node + 1, mid + 1, node_hi);
        let order = if leftmost {
            [first, second]
        } else {
            [second, first]
        };
        for (child, clo, chi) in order {
            if let Some(i) = self.descend(child, clo, chi, lo, hi, bound, leftmost) {
                return Some(i);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan_min(values: &[f64]) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        for (i, &v) in values.iter().enumerate() {
            if v < best.0 {
                best = (v, i);
            }
        }
        best
    }

    #[test]
    fn matches_linear_scan_under_random_updates() {
        let n = 37; // deliberately not a power of two
        let mut values = vec![0.0f64; n];
        let mut tree = MinTree::new(n);
        assert_eq!(tree.global_min(), (0.0, 0));

        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for round in 0..200 {
            let lo = (next() * n as f64) as usize % n;
            let hi = (lo + (next() * 8.0) as usize).min(n - 1);
            for v in &mut values[lo..=hi] {
                *v += next() * (round as f64 + 1.0);
            }
            tree.update_range_from(&values, lo, hi);
            assert_eq!(tree.global_min(), scan_min(&values));
        }
    }

    #[test]
    fn directional_queries() {
        let values = vec![3.0, 1.0, 2.0, 1.0, 5.0, 1.0, 7.0];
        let mut tree = MinTree::new(values.len());
        tree.rebuild_from(&values);
        let (m, a) = tree.global_min();
        assert_eq!((m, a), (1.0, 1));
        assert_eq!(tree.leftmost_leq(0, 6, 1.0), Some(1));
        assert_eq!(tree.leftmost_leq(2, 6, 1.0), Some(3));
        assert_eq!(tree.rightmost_leq(0, 6, 1.0), Some(5));
        assert_eq!(tree.rightmost_leq(0, 2, 1.0), Some(1));
        assert_eq!(tree.leftmost_leq(4, 4, 1.0), None);
    }
}
