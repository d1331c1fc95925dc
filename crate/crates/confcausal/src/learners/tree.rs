//! Regression tree used as the base learner of the boosting loops.
//!
//! Split finding is exact: every threshold between consecutive distinct
//! sorted feature values is scored by least-squares gain on the supplied
//! targets. Leaf values are assigned by the caller (quantile or Newton
//! updates depending on the loss), so nodes are built with placeholder
//! values and patched afterwards.

#[derive(Debug, Clone)]
pub(crate) enum Node {
    Branch {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct RegressionTree {
    nodes: Vec<Node>,
}

impl RegressionTree {
    pub(crate) fn predict(&self, x: &[f64]) -> f64 {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { value } => return *value,
                Node::Branch {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if x[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub(crate) fn set_leaf_value(&mut self, node: usize, value: f64) {
        match &mut self.nodes[node] {
            Node::Leaf { value: v } => *v = value,
            Node::Branch { .. } => unreachable!("leaf index points at a branch"),
        }
    }
}

/// Tree structure plus, for each leaf, the training rows it captured.
pub(crate) struct GrownTree {
    pub(crate) tree: RegressionTree,
    pub(crate) leaves: Vec<(usize, Vec<usize>)>,
}

struct Grower<'a> {
    xs: &'a [Vec<f64>],
    targets: &'a [f64],
    min_leaf: usize,
    nodes: Vec<Node>,
    leaves: Vec<(usize, Vec<usize>)>,
}

const MIN_GAIN: f64 = 1e-12;

/// Grow a tree on `rows` by recursive binary splitting of the targets,
/// stopping at `max_depth`, at `min_leaf` rows per side, or when no split
/// improves the squared error.
pub(crate) fn grow_tree(
    xs: &[Vec<f64>],
    targets: &[f64],
    rows: &[usize],
    max_depth: usize,
    min_leaf: usize,
) -> GrownTree {
    let mut g = Grower {
        xs,
        targets,
        min_leaf,
        nodes: Vec::new(),
        leaves: Vec::new(),
    };
    g.grow(rows.to_vec(), max_depth);
    GrownTree {
        tree: RegressionTree { nodes: g.nodes },
        leaves: g.leaves,
    }
}

impl Grower<'_> {
    fn grow(&mut self, rows: Vec<usize>, depth_left: usize) -> usize {
        if depth_left == 0 || rows.len() < 2 * self.min_leaf {
            return self.make_leaf(rows);
        }
        let Some((feature, threshold)) = self.best_split(&rows) else {
            return self.make_leaf(rows);
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| self.xs[r][feature] <= threshold);
        let idx = self.nodes.len();
        self.nodes.push(Node::Branch {
            feature,
            threshold,
            left: 0,
            right: 0,
        });
        let left = self.grow(left_rows, depth_left - 1);
        let right = self.grow(right_rows, depth_left - 1);
        match &mut self.nodes[idx] {
            Node::Branch {
                left: l, right: r, ..
            } => {
                *l = left;
                *r = right;
            }
            Node::Leaf { .. } => unreachable!(),
        }
        idx
    }

    fn make_leaf(&mut self, rows: Vec<usize>) -> usize {
        let idx = self.nodes.len();
        self.nodes.push(Node::Leaf { value: 0.0 });
        self.leaves.push((idx, rows));
        idx
    }

    fn best_split(&self, rows: &[usize]) -> Option<(usize, f64)> {
        let n = rows.len();
        let d = self.xs[rows[0]].len();
        let total: f64 = rows.iter().map(|&r| self.targets[r]).sum();
        let base = total * total / n as f64;

        let mut best: Option<(f64, usize, f64)> = None;
        let mut order: Vec<usize> = Vec::with_capacity(n);
        for feature in 0..d {
            order.clear();
            order.extend_from_slice(rows);
            order.sort_by(|&a, &b| self.xs[a][feature].total_cmp(&self.xs[b][feature]));

            let mut left_sum = 0.0;
            for k in 1..n {
                left_sum += self.targets[order[k - 1]];
                if k < self.min_leaf || n - k < self.min_leaf {
                    continue;
                }
                let lo = self.xs[order[k - 1]][feature];
                let hi = self.xs[order[k]][feature];
                if lo == hi {
                    continue;
                }
                let right_sum = total - left_sum;
                let gain = left_sum * left_sum / k as f64
                    + right_sum * right_sum / (n - k) as f64
                    - base;
                if gain > MIN_GAIN && best.map_or(true, |(g, _, _)| gain > g) {
                    best = Some((gain, feature, lo + (hi - lo) / 2.0));
                }
            }
        }
        best.map(|(_, feature, threshold)| (feature, threshold))
    }
}
