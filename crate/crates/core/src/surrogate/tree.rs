//! Least-squares CART regression tree with exact greedy splits.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    /// Features examined per split; `None` means all of them.
    pub max_features: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

/// Binary regression tree; node 0 is the root. Inputs with
/// `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<TreeNode>,
}

impl RegressionTree {
    /// Fit on the rows listed in `indices` (repeats allowed, as in a
    /// bootstrap sample). `cols[j][i]` is feature `j` of row `i`.
    pub fn fit<R: Rng + ?Sized>(
        cols: &[Vec<f64>],
        y: &[f64],
        indices: &[usize],
        params: &TreeParams,
        mut rng: Option<&mut R>,
    ) -> Self {
        let mut tree = RegressionTree { nodes: Vec::new() };
        let mut idx = indices.to_vec();
        tree.grow(cols, y, &mut idx, 0, params, &mut rng);
        tree
    }

    fn grow<R: Rng + ?Sized>(
        &mut self,
        cols: &[Vec<f64>],
        y: &[f64],
        idx: &mut [usize],
        depth: usize,
        params: &TreeParams,
        rng: &mut Option<&mut R>,
    ) -> usize {
        let me = self.nodes.len();
        let n = idx.len();
        let sum: f64 = idx.iter().map(|&i| y[i]).sum();
        let mean = if n > 0 { sum / n as f64 } else { 0.0 };
        self.nodes.push(TreeNode::Leaf { value: mean });
        let min_leaf = params.min_samples_leaf.max(1);
        if depth >= params.max_depth || n < 2 * min_leaf {
            return me;
        }

        let n_features = cols.len();
        let features: Vec<usize> = match (params.max_features, rng.as_deref_mut()) {
            (Some(m), Some(r)) if m < n_features => {
                let mut f = sample(r, n_features, m.max(1)).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..n_features).collect(),
        };

        // (gain, feature, threshold)
        let mut best: Option<(f64, usize, f64)> = None;
        let parent_term = sum * sum / n as f64;
        let mut order = idx.to_vec();
        for &f in &features {
            let col = &cols[f];
            order.sort_by(|&a, &b| col[a].total_cmp(&col[b]).then(a.cmp(&b)));
            let mut left_sum = 0.0;
            for pos in 0..n - 1 {
                left_sum += y[order[pos]];
                let n_left = pos + 1;
                let n_right = n - n_left;
                if n_left < min_leaf {
                    continue;
                }
                if n_right < min_leaf {
                    break;
                }
                let (lo, hi) = (col[order[pos]], col[order[pos + 1]]);
                if lo == hi {
                    continue;
                }
                let right_sum = sum - left_sum;
                let gain = left_sum * left_sum / n_left as f64 + right_sum * right_sum / n_right as f64 - parent_term;
                if gain > best.map_or(0.0, |b| b.0) {
                    let mut thr = 0.5 * (lo + hi);
                    if !(thr < hi) {
                        thr = lo;
                    }
                    best = Some((gain, f, thr));
                }
            }
        }
        // guard against splits that only reflect rounding noise
        let sse_scale = idx.iter().map(|&i| (y[i] - mean).powi(2)).sum::<f64>();
        let Some((gain, feature, threshold)) = best else {
            return me;
        };
        if gain <= 1e-12 * sse_scale.max(f64::MIN_POSITIVE) {
            return me;
        }

        let col = &cols[feature];
        let mut split = 0;
        for k in 0..n {
            if col[idx[k]] <= threshold {
                idx.swap(k, split);
                split += 1;
            }
        }
        let (l, r) = idx.split_at_mut(split);
        let left = self.grow(cols, y, l, depth + 1, params, rng);
        let right = self.grow(cols, y, r, depth + 1, params, rng);
        self.nodes[me] = TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        };
        me
    }

    #[inline]
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf { value } => return value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        if self.nodes.is_empty() {
            0
        } else {
            walk(&self.nodes, 0)
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, TreeNode::Leaf { .. })).count()
    }

    /// Structural sanity: children in range and every node reachable once.
    pub fn is_well_formed(&self) -> bool {
        let mut seen = vec![0u32; self.nodes.len()];
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            if i >= self.nodes.len() {
                return false;
            }
            seen[i] += 1;
            if let TreeNode::Split { left, right, threshold, .. } = self.nodes[i] {
                if !threshold.is_finite() {
                    return false;
                }
                stack.push(left);
                stack.push(right);
            }
        }
        !self.nodes.is_empty() && seen.iter().all(|&c| c == 1)
    }
}
