use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::domain::{Dataset, Feature};

/// How a split routes an example: `true` goes left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SplitTest {
    LessEq(f64),
    Equals(u32),
}

impl SplitTest {
    fn goes_left(&self, f: Feature) -> bool {
        match (self, f) {
            (SplitTest::LessEq(thr), Feature::Num(x)) => x <= *thr,
            (SplitTest::Equals(c), Feature::Cat(x)) => x == *c,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf {
        label: usize,
    },
    Split {
        feature: usize,
        test: SplitTest,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn predict(&self, row: &[Feature]) -> usize {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { label } => return *label,
                TreeNode::Split { feature, test, left, right } => {
                    node = if test.goes_left(row[*feature]) { left } else { right };
                }
            }
        }
    }

    /// Total node count, internal nodes and leaves.
    pub fn size(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => 1 + left.size() + right.size(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitCriterion {
    /// Leaves take the cheapest label; splits maximize the cost reduction.
    Cost,
    /// Leaves take the weighted majority of each example's cheapest label;
    /// splits maximize the reduction in weighted entropy. Example `i` weighs
    /// `max_l C(i,l) − min_l C(i,l)`.
    InfoGain,
}

/// Per-label statistics of a set of examples under a criterion.
struct Stats<'a> {
    criterion: SplitCriterion,
    cost: &'a Array2<f64>,
    target: Vec<usize>,
    weight: Vec<f64>,
}

impl<'a> Stats<'a> {
    fn new(cost: &'a Array2<f64>, criterion: SplitCriterion) -> Self {
        let mut target = Vec::with_capacity(cost.nrows());
        let mut weight = Vec::with_capacity(cost.nrows());
        for row in cost.rows() {
            let mut lo = 0;
            let mut hi = row[0];
            for (l, &v) in row.iter().enumerate() {
                if v < row[lo] {
                    lo = l;
                }
                hi = hi.max(v);
            }
            target.push(lo);
            weight.push(hi - row[lo]);
        }
        Stats { criterion, cost, target, weight }
    }

    fn add(&self, acc: &mut [f64], i: usize, sign: f64) {
        match self.criterion {
            SplitCriterion::Cost => {
                for (a, c) in acc.iter_mut().zip(self.cost.row(i)) {
                    *a += sign * c;
                }
            }
            SplitCriterion::InfoGain => acc[self.target[i]] += sign * self.weight[i],
        }
    }

    fn collect(&self, examples: &[usize]) -> Vec<f64> {
        let mut acc = vec![0.0; self.cost.ncols()];
        for &i in examples {
            self.add(&mut acc, i, 1.0);
        }
        acc
    }

    /// Node impurity: cost of the best label, or weighted entropy.
    fn score(&self, acc: &[f64]) -> f64 {
        match self.criterion {
            SplitCriterion::Cost => acc.iter().cloned().fold(f64::INFINITY, f64::min),
            SplitCriterion::InfoGain => {
                let total: f64 = acc.iter().map(|v| v.max(0.0)).sum();
                if total <= 0.0 {
                    return 0.0;
                }
                let plogp: f64 = acc.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum();
                total * total.ln() - plogp
            }
        }
    }

    fn label(&self, acc: &[f64]) -> usize {
        let mut best = 0;
        for l in 1..acc.len() {
            let better = match self.criterion {
                SplitCriterion::Cost => acc[l] < acc[best],
                SplitCriterion::InfoGain => acc[l] > acc[best],
            };
            if better {
                best = l;
            }
        }
        best
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    gain: f64,
    feature: usize,
    test: SplitTest,
}

enum Work {
    Leaf { examples: Vec<usize>, label: usize, best: Option<Candidate> },
    Split { feature: usize, test: SplitTest, left: usize, right: usize },
}

fn best_split(data: &Dataset, stats: &Stats, examples: &[usize], min_gain: f64) -> Option<Candidate> {
    let k = stats.cost.ncols();
    let parent = stats.collect(examples);
    let parent_score = stats.score(&parent);
    let mut best: Option<Candidate> = None;
    let mut consider = |gain: f64, feature: usize, test: SplitTest| {
        if gain > min_gain && best.as_ref().is_none_or(|b| gain > b.gain) {
            best = Some(Candidate { gain, feature, test });
        }
    };
    for (feature, kind) in data.kinds().iter().enumerate() {
        match kind {
            crate::domain::ColumnKind::Numeric => {
                let mut sorted: Vec<(f64, usize)> = examples
                    .iter()
                    .map(|&i| match data.row(i)[feature] {
                        Feature::Num(x) => (x, i),
                        Feature::Cat(_) => unreachable!("column kinds are validated"),
                    })
                    .collect();
                sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let mut left = vec![0.0; k];
                let mut right = parent.clone();
                for w in 0..sorted.len().saturating_sub(1) {
                    let i = sorted[w].1;
                    stats.add(&mut left, i, 1.0);
                    stats.add(&mut right, i, -1.0);
                    let (a, b) = (sorted[w].0, sorted[w + 1].0);
                    if a == b {
                        continue;
                    }
                    let gain = parent_score - stats.score(&left) - stats.score(&right);
                    consider(gain, feature, SplitTest::LessEq(a + (b - a) / 2.0));
                }
            }
            crate::domain::ColumnKind::Categorical => {
                let mut cats: Vec<u32> = examples
                    .iter()
                    .filter_map(|&i| match data.row(i)[feature] {
                        Feature::Cat(c) => Some(c),
                        Feature::Num(_) => None,
                    })
                    .collect();
                cats.sort_unstable();
                cats.dedup();
                if cats.len() < 2 {
                    continue;
                }
                for c in cats {
                    let inside: Vec<usize> =
                        examples.iter().cloned().filter(|&i| data.row(i)[feature] == Feature::Cat(c)).collect();
                    let left = stats.collect(&inside);
                    let right: Vec<f64> = parent.iter().zip(&left).map(|(p, l)| p - l).collect();
                    let gain = parent_score - stats.score(&left) - stats.score(&right);
                    consider(gain, feature, SplitTest::Equals(c));
                }
            }
        }
    }
    best
}

/// Grows a binary tree best-first until it has `max_size` nodes or no split
/// improves the criterion.
pub fn greedy_tree(data: &Dataset, cost: &Array2<f64>, max_size: usize, criterion: SplitCriterion) -> TreeNode {
    let stats = Stats::new(cost, criterion);
    let scale = match criterion {
        SplitCriterion::Cost => cost.iter().fold(0.0f64, |a, v| a.max(v.abs())),
        SplitCriterion::InfoGain => stats.weight.iter().cloned().fold(0.0, f64::max),
    };
    let min_gain = 1e-12 * scale * data.m() as f64;
    let all: Vec<usize> = (0..data.m()).collect();
    let label = stats.label(&stats.collect(&all));
    let best = best_split(data, &stats, &all, min_gain);
    let mut arena = vec![Work::Leaf { examples: all, label, best }];

    while arena.len() + 2 <= max_size.max(1) {
        let mut pick: Option<(usize, f64)> = None;
        for (id, node) in arena.iter().enumerate() {
            if let Work::Leaf { best: Some(c), .. } = node {
                if pick.is_none_or(|(_, g)| c.gain > g) {
                    pick = Some((id, c.gain));
                }
            }
        }
        let Some((id, _)) = pick else { break };
        let (examples, cand) = match &arena[id] {
            Work::Leaf { examples, best: Some(c), .. } => (examples.clone(), c.clone()),
            _ => unreachable!(),
        };
        let (lhs, rhs): (Vec<usize>, Vec<usize>) =
            examples.iter().partition(|&&i| cand.test.goes_left(data.row(i)[cand.feature]));
        let child = |ex: Vec<usize>| {
            let label = stats.label(&stats.collect(&ex));
            let best = best_split(data, &stats, &ex, min_gain);
            Work::Leaf { examples: ex, label, best }
        };
        let (l, r) = (child(lhs), child(rhs));
        let left = arena.len();
        arena.push(l);
        arena.push(r);
        arena[id] = Work::Split { feature: cand.feature, test: cand.test, left, right: left + 1 };
    }
    build(&arena, 0)
}

fn build(arena: &[Work], id: usize) -> TreeNode {
    match &arena[id] {
        Work::Leaf { label, .. } => TreeNode::Leaf { label: *label },
        Work::Split { feature, test, left, right } => TreeNode::Split {
            feature: *feature,
            test: *test,
            left: Box::new(build(arena, *left)),
            right: Box::new(build(arena, *right)),
        },
    }
}

/// A single-split tree.
pub fn stump(data: &Dataset, cost: &Array2<f64>) -> TreeNode {
    greedy_tree(data, cost, 3, SplitCriterion::Cost)
}
