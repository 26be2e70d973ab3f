//! Scenario trees, price processes, claims, strategies and trading gains.
//!
//! The filtration is the tree itself: the level-`t` nodes are the atoms of
//! `F_t` and the leaves (all at the horizon `T`) are the states of the world.
//! Nodes are stored in breadth-first order with children kept in input order,
//! so every level and every node's leaf set is a contiguous index range.

use std::collections::HashMap;
use std::ops::Range;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::linalg::dot;
use crate::rational::Rational;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub level: usize,
    leaves: Range<usize>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Positions (in leaf order) of the states below this node.
    pub fn leaves(&self) -> Range<usize> {
        self.leaves.clone()
    }
}

/// Raw tree description: node ids with parent ids in input order, and the
/// reference weight of every leaf.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TreeSpec {
    pub horizon: usize,
    pub nodes: Vec<(String, Option<String>)>,
    pub leaf_weights: Vec<(String, Rational)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventTree {
    nodes: Vec<Node>,
    horizon: usize,
    level_start: Vec<usize>,
    leaf_weights: Vec<Rational>,
    index: HashMap<String, NodeId>,
}

impl EventTree {
    pub fn build(spec: &TreeSpec) -> Result<Self> {
        if spec.horizon == 0 {
            return Err(Error::MalformedTree("horizon must be at least 1".into()));
        }
        let mut input_index = HashMap::new();
        for (i, (id, _)) in spec.nodes.iter().enumerate() {
            if input_index.insert(id.as_str(), i).is_some() {
                return Err(Error::MalformedTree(format!("duplicate node `{id}`")));
            }
        }
        let mut roots = Vec::new();
        let mut kids: Vec<Vec<usize>> = vec![Vec::new(); spec.nodes.len()];
        for (i, (id, parent)) in spec.nodes.iter().enumerate() {
            match parent {
                None => roots.push(i),
                Some(p) => {
                    let &pi = input_index.get(p.as_str()).ok_or_else(|| {
                        Error::MalformedTree(format!("node `{id}` has unknown parent `{p}`"))
                    })?;
                    kids[pi].push(i);
                }
            }
        }
        if roots.len() != 1 {
            return Err(Error::MalformedTree(format!(
                "expected exactly one root, found {}",
                roots.len()
            )));
        }

        // Breadth-first relabelling.
        let mut order = vec![roots[0]];
        let mut level = vec![0usize];
        let mut head = 0;
        while head < order.len() {
            let cur = order[head];
            let lv = level[head];
            for &k in &kids[cur] {
                order.push(k);
                level.push(lv + 1);
            }
            head += 1;
        }
        if order.len() != spec.nodes.len() {
            return Err(Error::MalformedTree(
                "some nodes are not reachable from the root".into(),
            ));
        }
        let mut new_of_old = vec![0; spec.nodes.len()];
        for (new, &old) in order.iter().enumerate() {
            new_of_old[old] = new;
        }
        let mut nodes: Vec<Node> = order
            .iter()
            .zip(&level)
            .map(|(&old, &lv)| Node {
                id: spec.nodes[old].0.clone(),
                parent: spec.nodes[old]
                    .1
                    .as_ref()
                    .map(|p| new_of_old[input_index[p.as_str()]]),
                children: kids[old].iter().map(|&k| new_of_old[k]).collect(),
                level: lv,
                leaves: 0..0,
            })
            .collect();

        for n in &nodes {
            if n.is_leaf() && n.level != spec.horizon {
                return Err(Error::NonUniformDepth {
                    leaf: n.id.clone(),
                    level: n.level,
                    horizon: spec.horizon,
                });
            }
        }

        let mut level_start = vec![0; spec.horizon + 2];
        for t in 0..=spec.horizon {
            level_start[t + 1] = level_start[t] + nodes.iter().filter(|n| n.level == t).count();
        }
        let first_leaf = level_start[spec.horizon];
        for i in (0..nodes.len()).rev() {
            let leaves = if nodes[i].is_leaf() {
                i - first_leaf..i - first_leaf + 1
            } else {
                let c = &nodes[i].children;
                nodes[c[0]].leaves.start..nodes[c[c.len() - 1]].leaves.end
            };
            nodes[i].leaves = leaves;
        }

        let index: HashMap<String, NodeId> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.clone(), i))
            .collect();

        let n_leaves = nodes.len() - first_leaf;
        let mut weights: Vec<Option<Rational>> = vec![None; n_leaves];
        for (id, w) in &spec.leaf_weights {
            let &node = index
                .get(id)
                .ok_or_else(|| Error::MalformedTree(format!("weight for unknown node `{id}`")))?;
            if !nodes[node].is_leaf() {
                return Err(Error::MalformedTree(format!(
                    "weight given for internal node `{id}`"
                )));
            }
            if !w.is_positive() {
                return Err(Error::ZeroWeight(id.clone()));
            }
            weights[node - first_leaf] = Some(w.clone());
        }
        let mut leaf_weights = Vec::with_capacity(n_leaves);
        for (k, w) in weights.into_iter().enumerate() {
            match w {
                Some(w) => leaf_weights.push(w),
                None => return Err(Error::ZeroWeight(nodes[first_leaf + k].id.clone())),
            }
        }
        let total: Rational = leaf_weights.iter().sum();
        if !total.is_one() {
            return Err(Error::WeightSum(total));
        }

        Ok(Self {
            nodes,
            horizon: spec.horizon,
            level_start,
            leaf_weights,
            index,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, n: NodeId) -> &Node {
        &self.nodes[n]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn lookup(&self, id: &str) -> Option<NodeId> {
        self.index.get(id).copied()
    }

    pub fn num_leaves(&self) -> usize {
        self.leaf_weights.len()
    }

    pub fn leaf_weights(&self) -> &[Rational] {
        &self.leaf_weights
    }

    /// Node id of the leaf at position `k`.
    pub fn leaf_node(&self, k: usize) -> NodeId {
        self.level_start[self.horizon] + k
    }

    pub fn check_time(&self, t: usize) -> Result<()> {
        if t > self.horizon {
            return Err(Error::TimeOutOfRange {
                t,
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    /// Node range of level `t`. Panics when `t > T`.
    pub fn level(&self, t: usize) -> Range<NodeId> {
        self.level_start[t]..self.level_start[t + 1]
    }

    /// The atoms of `F_t`, in deterministic (breadth-first, input) order.
    pub fn atoms_at(&self, t: usize) -> Result<Vec<NodeId>> {
        self.check_time(t)?;
        Ok(self.level(t).collect())
    }

    pub fn internal_nodes(&self) -> Range<NodeId> {
        0..self.level_start[self.horizon]
    }

    /// Ancestor of `n` at level `t ≤ level(n)`.
    pub fn ancestor_at(&self, mut n: NodeId, t: usize) -> NodeId {
        while self.nodes[n].level > t {
            n = self.nodes[n].parent.expect("non-root node has a parent");
        }
        n
    }

    /// All nodes in the subtree rooted at `n`, including `n`, in breadth-first order.
    pub fn subtree(&self, n: NodeId) -> Vec<NodeId> {
        let mut out = vec![n];
        let mut head = 0;
        while head < out.len() {
            out.extend(self.nodes[out[head]].children.iter().copied());
            head += 1;
        }
        out
    }

    /// Extends per-atom values at level `t` to an `F_t`-measurable claim.
    pub fn lift(&self, t: usize, atom_values: &[Rational]) -> Claim {
        let mut payoff = vec![Rational::zero(); self.num_leaves()];
        for (n, v) in self.level(t).zip(atom_values) {
            for k in self.nodes[n].leaves() {
                payoff[k] = v.clone();
            }
        }
        Claim::new(payoff)
    }
}

/// Node-indexed discounted prices of `d` assets.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceProcess {
    values: Vec<Vec<Rational>>,
    assets: usize,
}

impl PriceProcess {
    pub fn assets(&self) -> usize {
        self.assets
    }

    pub fn at(&self, n: NodeId) -> &[Rational] {
        &self.values[n]
    }
}

/// An event tree together with a nonnegative price process on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Market {
    pub tree: EventTree,
    pub prices: PriceProcess,
}

impl Market {
    /// `prices[n]` holds the asset prices at node `n` (breadth-first id).
    pub fn new(tree: EventTree, prices: Vec<Vec<Rational>>) -> Result<Self> {
        if prices.len() != tree.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} price vectors for {} nodes",
                prices.len(),
                tree.len()
            )));
        }
        let assets = prices[0].len();
        if assets == 0 {
            return Err(Error::ShapeMismatch("at least one asset is required".into()));
        }
        for (n, p) in prices.iter().enumerate() {
            if p.len() != assets {
                return Err(Error::ShapeMismatch(format!(
                    "node `{}` has {} prices, expected {assets}",
                    tree.node(n).id,
                    p.len()
                )));
            }
            if let Some(a) = p.iter().position(|x| x.is_negative()) {
                return Err(Error::NegativePrice {
                    node: tree.node(n).id.clone(),
                    asset: a,
                });
            }
        }
        Ok(Self {
            tree,
            prices: PriceProcess {
                values: prices,
                assets,
            },
        })
    }

    /// Builds a market from a tree description and prices keyed by node id.
    pub fn from_spec(spec: &TreeSpec, prices: &HashMap<String, Vec<Rational>>) -> Result<Self> {
        let tree = EventTree::build(spec)?;
        let mut by_node = Vec::with_capacity(tree.len());
        for n in tree.nodes() {
            let p = prices
                .get(&n.id)
                .ok_or_else(|| Error::ShapeMismatch(format!("no prices for node `{}`", n.id)))?;
            by_node.push(p.clone());
        }
        Self::new(tree, by_node)
    }

    pub fn assets(&self) -> usize {
        self.prices.assets
    }

    pub fn horizon(&self) -> usize {
        self.tree.horizon()
    }

    /// `X_child − X_parent`.
    pub fn increment(&self, child: NodeId) -> Vec<Rational> {
        let parent = self.tree.node(child).parent.expect("root has no increment");
        self.prices
            .at(child)
            .iter()
            .zip(self.prices.at(parent))
            .map(|(a, b)| a - b)
            .collect()
    }

    /// `G_t(ξ) = (ξ·X)_T − (ξ·X)_t` as a leaf-indexed claim.
    pub fn gains(&self, xi: &Strategy, t: usize) -> Result<Claim> {
        self.tree.check_time(t)?;
        self.check_strategy(xi)?;
        let mut acc = vec![Rational::zero(); self.tree.len()];
        for n in self.tree.level(t).start..self.tree.len() {
            let node = self.tree.node(n);
            if node.level <= t {
                continue;
            }
            let p = node.parent.expect("level > 0");
            acc[n] = &acc[p] + dot(xi.at(p), &self.increment(n));
        }
        Ok(Claim::new(self.tree.level(self.horizon()).map(|n| acc[n].clone()).collect()))
    }

    pub fn check_claim(&self, h: &Claim) -> Result<()> {
        if h.payoff.len() != self.tree.num_leaves() {
            return Err(Error::ShapeMismatch(format!(
                "claim has {} payoffs for {} leaves",
                h.payoff.len(),
                self.tree.num_leaves()
            )));
        }
        Ok(())
    }

    pub fn check_strategy(&self, xi: &Strategy) -> Result<()> {
        if xi.values.len() != self.tree.len() || xi.values.iter().any(|v| v.len() != self.assets()) {
            return Err(Error::ShapeMismatch("strategy shape does not match market".into()));
        }
        Ok(())
    }

    pub fn check_process(&self, v: &AdaptedProcess) -> Result<()> {
        if v.values.len() != self.tree.len() {
            return Err(Error::ShapeMismatch(format!(
                "process has {} values for {} nodes",
                v.values.len(),
                self.tree.len()
            )));
        }
        Ok(())
    }
}

/// Leaf-indexed payoff. `nonnegative` records membership in `L⁰₊`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Claim {
    pub payoff: Vec<Rational>,
    pub nonnegative: bool,
}

impl Claim {
    pub fn new(payoff: Vec<Rational>) -> Self {
        let nonnegative = payoff.iter().all(|x| !x.is_negative());
        Self { payoff, nonnegative }
    }

    pub fn constant(value: Rational, leaves: usize) -> Self {
        Self::new(vec![value; leaves])
    }

    pub fn indicator(leaf: usize, leaves: usize) -> Self {
        let mut payoff = vec![Rational::zero(); leaves];
        payoff[leaf] = Rational::one();
        Self::new(payoff)
    }

    pub fn map(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        Self::new(self.payoff.iter().map(f).collect())
    }

    pub fn zip_with(&self, other: &Claim, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        Self::new(self.payoff.iter().zip(&other.payoff).map(|(a, b)| f(a, b)).collect())
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x)
    }

    pub fn add(&self, other: &Claim) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Claim) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Claim) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        self.map(|x| x * k)
    }

    pub fn is_zero(&self) -> bool {
        self.payoff.iter().all(|x| x.is_zero())
    }

    pub fn dominates(&self, other: &Claim) -> bool {
        self.payoff.iter().zip(&other.payoff).all(|(a, b)| a >= b)
    }
}

/// Node-indexed process, `F_t`-measurable at each level by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedProcess {
    pub values: Vec<Rational>,
}

impl AdaptedProcess {
    pub fn at(&self, n: NodeId) -> &Rational {
        &self.values[n]
    }
}

/// Predictable strategy: the vector held at an internal node of level `k − 1`
/// is the position `ξ_k` carried over the next period. Leaf entries are
/// ignored and kept at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    pub values: Vec<Vec<Rational>>,
}

impl Strategy {
    pub fn zero(market: &Market) -> Self {
        Self {
            values: vec![vec![Rational::zero(); market.assets()]; market.tree.len()],
        }
    }

    pub fn at(&self, n: NodeId) -> &[Rational] {
        &self.values[n]
    }

    pub fn set(&mut self, n: NodeId, xi: Vec<Rational>) {
        self.values[n] = xi;
    }

    pub fn combine(&self, a: &Rational, other: &Strategy, b: &Rational) -> Strategy {
        Strategy {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x.iter().zip(y).map(|(u, v)| a * u + b * v).collect())
                .collect(),
        }
    }
}
