//! The closed-tree sparsity model.
//!
//! Trees live on the full-depth coefficient layout of a `2^J`-point (or
//! `2^J × 2^J`) grid. The scaling coefficient is the root and counts as a
//! node with weight `2^0 = 1`; it has `2^d − 1` children on level 0 (one per
//! band) and every wavelet node has `2^d` children on the next level.
//! A tree of size `s` therefore has `s − 1` wavelet nodes.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dwt::{CoeffLayout, IndexKind, MultiIndex};
use crate::error::{parameter, Error, Result};

/// Parent of a wavelet node in the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parent {
    /// The coarsest wavelet level hangs off the scaling root.
    Root,
    Node(MultiIndex),
}

/// Parent of a wavelet index: one level up, shifts halved, band kept.
pub fn parent(idx: &MultiIndex) -> Result<Parent> {
    if idx.kind == IndexKind::Scaling {
        return Err(Error::Domain(
            "parents are only defined for wavelet indices".into(),
        ));
    }
    if idx.level == 0 {
        return Ok(Parent::Root);
    }
    Ok(Parent::Node(MultiIndex {
        kind: IndexKind::Wavelet,
        level: idx.level - 1,
        shift: [idx.shift[0] / 2, idx.shift[1] / 2],
        band: idx.band,
    }))
}

/// True iff every wavelet node's parent chain lies in the set. The only
/// scaling index allowed is the root.
pub fn is_closed_tree(nodes: &BTreeSet<MultiIndex>) -> bool {
    nodes.iter().all(|n| match parent(n) {
        Err(_) => *n == MultiIndex::root(),
        Ok(Parent::Root) => true,
        Ok(Parent::Node(p)) => nodes.contains(&p),
    })
}

/// A closed tree stored as positions in the full-depth layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedTree {
    layout: CoeffLayout,
    positions: BTreeSet<usize>,
}

impl ClosedTree {
    pub fn from_positions(layout: CoeffLayout, positions: BTreeSet<usize>) -> Result<Self> {
        if layout.depth() != layout.levels() {
            return Err(parameter("closed trees need a full-depth layout"));
        }
        if let Some(&p) = positions.iter().find(|&&p| p >= layout.len()) {
            return Err(parameter(format!("position {p} outside layout")));
        }
        let tree = Self { layout, positions };
        if !is_closed_tree(&tree.nodes()) {
            return Err(parameter("node set is not closed under parents"));
        }
        Ok(tree)
    }

    pub fn layout(&self) -> CoeffLayout {
        self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn levels(&self) -> u32 {
        self.layout.levels()
    }

    pub fn arity(&self) -> usize {
        1 << self.dim()
    }

    pub fn positions(&self) -> &BTreeSet<usize> {
        &self.positions
    }

    pub fn nodes(&self) -> BTreeSet<MultiIndex> {
        self.positions
            .iter()
            .map(|&p| self.layout.index_of(p))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.positions.contains(&pos)
    }

    /// K(T) of this tree.
    pub fn k_of_t(&self) -> f64 {
        k_of_set(self.nodes().iter(), self.dim())
    }
}

/// Children of the node stored at `pos` in a full-depth layout.
pub fn children(layout: CoeffLayout, pos: usize) -> Vec<usize> {
    let idx = layout.index_of(pos);
    let levels = layout.levels();
    let dim = layout.dim();
    let kids: Vec<MultiIndex> = match idx.kind {
        IndexKind::Scaling => {
            if dim == 1 {
                vec![MultiIndex::wavelet_1d(0, 0)]
            } else {
                (1..=3)
                    .map(|b| MultiIndex::wavelet_2d(0, 0, 0, b))
                    .collect()
            }
        }
        IndexKind::Wavelet => {
            if idx.level + 1 >= levels {
                return Vec::new();
            }
            let j = idx.level + 1;
            let [k1, k2] = idx.shift;
            if dim == 1 {
                vec![
                    MultiIndex::wavelet_1d(j, 2 * k1),
                    MultiIndex::wavelet_1d(j, 2 * k1 + 1),
                ]
            } else {
                let mut v = Vec::with_capacity(4);
                for a in 0..2 {
                    for b in 0..2 {
                        v.push(MultiIndex::wavelet_2d(j, 2 * k1 + a, 2 * k2 + b, idx.band));
                    }
                }
                v
            }
        }
    };
    kids.iter()
        .map(|k| layout.position(k).expect("child lies in layout"))
        .collect()
}

/// Grows a closed tree of exactly `s` nodes (root included) by repeatedly
/// adding a uniformly chosen frontier node.
pub fn random_closed_tree(s: usize, levels: u32, dim: usize, seed: u64) -> Result<ClosedTree> {
    let layout = CoeffLayout::full(dim, levels)?;
    if s == 0 || s > layout.len() {
        return Err(parameter(format!(
            "tree size {s} outside 1..={}",
            layout.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions = BTreeSet::from([0usize]);
    let mut frontier = children(layout, 0);
    while positions.len() < s {
        let pick = rng.random_range(0..frontier.len());
        let node = frontier.swap_remove(pick);
        positions.insert(node);
        frontier.extend(children(layout, node));
    }
    Ok(ClosedTree { layout, positions })
}

/// Squared uniform norm `2^{jd}` of the atom at level `j`.
fn atom_weight(level: u32, dim: usize) -> u64 {
    1u64 << (level as usize * dim)
}

/// K of an arbitrary node set: `Σ 2^{jd}` over its members.
pub fn k_of_set<'a>(nodes: impl IntoIterator<Item = &'a MultiIndex>, dim: usize) -> f64 {
    nodes
        .into_iter()
        .map(|n| atom_weight(n.level, dim) as f64)
        .sum()
}

/// Θ², the largest squared atom norm on a `J`-level grid: `2^{d(J−1)}`.
pub fn theta_sq(levels: u32, dim: usize) -> u64 {
    atom_weight(levels - 1, dim)
}

/// Caps for exhaustive enumeration of closed trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationLimits {
    pub max_levels: u32,
    pub max_nodes: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        Self {
            max_levels: 7,
            max_nodes: 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KTreeMode {
    Exhaustive,
    /// Deepest-first frontier packing; a lower bound on the supremum.
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KTreeValue {
    pub value: f64,
    pub lower_bound_only: bool,
}

/// `K_T(s')` for every `s' = 0..=s_max` by exhaustive enumeration of closed
/// trees (d = 1 only). Entry `s'` is the supremum over trees of size
/// `≤ s'`.
pub fn k_tree_profile(s_max: usize, levels: u32, limits: EnumerationLimits) -> Result<Vec<u64>> {
    if levels > limits.max_levels || s_max > limits.max_nodes {
        return Err(Error::Resource(format!(
            "exhaustive enumeration capped at J <= {} and s <= {} (asked J = {levels}, s = {s_max})",
            limits.max_levels, limits.max_nodes
        )));
    }
    let layout = CoeffLayout::full(1, levels)?;
    let cap = s_max.min(layout.len());
    let mut best = vec![0u64; cap + 1];
    let weights: Vec<u64> = (0..layout.len())
        .map(|p| atom_weight(layout.level_of(p).1, 1))
        .collect();
    let root_children = children(layout, 0);
    enumerate(
        layout,
        &weights,
        &root_children,
        1,
        weights[0],
        cap,
        &mut best,
    );
    for s in 1..=cap {
        best[s] = best[s].max(best[s - 1]);
    }
    // sizes beyond the node count cannot grow the supremum
    best.resize(s_max + 1, best[cap]);
    Ok(best)
}

/// Visits every closed tree containing the root exactly once: each call
/// either adds `frontier[i]` and drops the candidates before it, or moves on.
fn enumerate(
    layout: CoeffLayout,
    weights: &[u64],
    frontier: &[usize],
    size: usize,
    weight: u64,
    cap: usize,
    best: &mut [u64],
) {
    if weight > best[size] {
        best[size] = weight;
    }
    if size == cap {
        return;
    }
    for (i, &node) in frontier.iter().enumerate() {
        let mut next = frontier[i + 1..].to_vec();
        next.extend(children(layout, node));
        enumerate(
            layout,
            weights,
            &next,
            size + 1,
            weight + weights[node],
            cap,
            best,
        );
    }
}

/// Greedy lower bound on `K_T(s)`: start from the root and always add the
/// heaviest (deepest) frontier node, lowest position first on ties.
pub fn k_tree_greedy(s: usize, levels: u32, dim: usize) -> Result<u64> {
    let layout = CoeffLayout::full(dim, levels)?;
    if s == 0 {
        return Ok(0);
    }
    let s = s.min(layout.len());
    let mut total = 1u64;
    let mut frontier = children(layout, 0);
    for _ in 1..s {
        let (at, _) = frontier
            .iter()
            .enumerate()
            .max_by(|(_, &a), (_, &b)| {
                let (wa, wb) = (layout.level_of(a).1, layout.level_of(b).1);
                wa.cmp(&wb).then(b.cmp(&a))
            })
            .expect("frontier non-empty below capacity");
        let node = frontier.remove(at);
        total += atom_weight(layout.level_of(node).1, dim);
        frontier.extend(children(layout, node));
    }
    Ok(total)
}

/// `K_T(s)` in the requested mode.
pub fn k_tree_sup(s: usize, levels: u32, dim: usize, mode: KTreeMode) -> Result<KTreeValue> {
    match mode {
        KTreeMode::Exhaustive => {
            if dim != 1 {
                return Err(Error::Resource(
                    "exhaustive enumeration is limited to d = 1".into(),
                ));
            }
            let profile = k_tree_profile(s, levels, EnumerationLimits::default())?;
            Ok(KTreeValue {
                value: profile[s] as f64,
                lower_bound_only: false,
            })
        }
        KTreeMode::Greedy => Ok(KTreeValue {
            value: k_tree_greedy(s, levels, dim)? as f64,
            lower_bound_only: true,
        }),
    }
}

/// K(T), K_T(s) and Θ²s for one tree of size `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TreeComplexity {
    pub k_of_t: f64,
    pub k_tree_s: f64,
    pub theta_sq_s: f64,
    pub ratio: f64,
    pub lower_bound_only: bool,
}

impl TreeComplexity {
    /// Uses exhaustive enumeration when within the default caps, the greedy
    /// bound otherwise.
    pub fn of(tree: &ClosedTree) -> Result<Self> {
        let s = tree.len();
        let (levels, dim) = (tree.levels(), tree.dim());
        let limits = EnumerationLimits::default();
        let mode = if dim == 1 && levels <= limits.max_levels && s <= limits.max_nodes {
            KTreeMode::Exhaustive
        } else {
            KTreeMode::Greedy
        };
        let sup = k_tree_sup(s, levels, dim, mode)?;
        let k_of_t = tree.k_of_t();
        // the greedy bound may undershoot this particular tree
        let k_tree_s = sup.value.max(k_of_t);
        let theta_sq_s = theta_sq(levels, dim) as f64 * s as f64;
        Ok(Self {
            k_of_t,
            k_tree_s,
            theta_sq_s,
            ratio: k_tree_s / theta_sq_s,
            lower_bound_only: sup.lower_bound_only,
        })
    }
}

/// One line of the inequality report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityRow {
    pub s: usize,
    pub k_tree: f64,
    pub theta_sq_s: f64,
    pub ratio: f64,
    pub ratio_bound: f64,
    /// `K_T(s) ≤ Θ²s`
    pub theta_ok: bool,
    /// `K_T(3s) ≥ 3 K_T(s)`, when `3s` is within range
    pub triple_ok: Option<bool>,
    /// `K_T(s)/(Θ²s) ≤ (2^d·2^{2d(J−1)} + 1)/((2^d + 1)·2^{2d(J−1)})`
    pub ratio_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub levels: u32,
    pub dim: usize,
    pub rows: Vec<InequalityRow>,
    /// `K_T(J+1) = 2^J`, when `J + 1` is within range.
    pub chain_identity_ok: Option<bool>,
}

impl InequalityReport {
    pub fn all_pass(&self) -> bool {
        self.chain_identity_ok.unwrap_or(true)
            && self
                .rows
                .iter()
                .all(|r| r.theta_ok && r.ratio_ok && r.triple_ok.unwrap_or(true))
    }
}

/// Checks the three inequality families for every `s` in `2..=s_max` by
/// exhaustive enumeration. Comparisons are exact integer arithmetic.
pub fn verify_inequalities(levels: u32, dim: usize, s_max: usize) -> Result<InequalityReport> {
    if dim != 1 {
        return Err(Error::Resource(
            "exhaustive enumeration is limited to d = 1".into(),
        ));
    }
    let layout = CoeffLayout::full(dim, levels)?;
    let s_hi = s_max.min(layout.len());
    let profile = k_tree_profile(s_hi, levels, EnumerationLimits::default())?;
    let theta2 = theta_sq(levels, dim) as u128;
    let block = 1u128 << (2 * dim * (levels as usize - 1));
    let bound_num = (1u128 << dim) * block + 1;
    let bound_den = ((1u128 << dim) + 1) * block;
    let rows = (2..=s_hi)
        .map(|s| {
            let k = profile[s] as u128;
            let ts = theta2 * s as u128;
            InequalityRow {
                s,
                k_tree: k as f64,
                theta_sq_s: ts as f64,
                ratio: k as f64 / ts as f64,
                ratio_bound: bound_num as f64 / bound_den as f64,
                theta_ok: k <= ts,
                triple_ok: (3 * s <= s_hi).then(|| profile[3 * s] >= 3 * profile[s]),
                ratio_ok: k * bound_den <= bound_num * ts,
            }
        })
        .collect();
    let chain = levels as usize + 1;
    Ok(InequalityReport {
        levels,
        dim,
        rows,
        chain_identity_ok: (chain <= s_hi).then(|| profile[chain] == 1u64 << levels),
    })
}
