//! Seeded generators for arbitrage-free markets, claims and stopping times.
//!
//! Everything is driven by a caller-supplied RNG so runs are reproducible.

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::market::{Claim, Market, NodeId, TreeSpec};
use crate::rational::{rat, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MarketParams {
    pub max_horizon: usize,
    pub max_branching: usize,
    pub max_assets: usize,
}

impl Default for MarketParams {
    fn default() -> Self {
        Self {
            max_horizon: 3,
            max_branching: 4,
            max_assets: 2,
        }
    }
}

/// Random arbitrage-free market. At every node a strictly positive
/// transition vector with small-integer weights is drawn first and child
/// prices are then chosen so that it is a martingale transition.
pub fn market<R: Rng>(rng: &mut R, params: MarketParams) -> Market {
    let horizon = rng.gen_range(1..=params.max_horizon);
    let assets = rng.gen_range(1..=params.max_assets);
    let steps = [rat(-1, 1), rat(-1, 2), rat(0, 1), rat(1, 2), rat(1, 1), rat(2, 1), rat(1, 3)];
    let roots = [rat(1, 1), rat(2, 1), rat(3, 2)];

    let mut spec = TreeSpec {
        horizon,
        ..TreeSpec::default()
    };
    let mut prices: Vec<Vec<Rational>> = vec![(0..assets).map(|_| roots.choose(rng).unwrap().clone()).collect()];
    let mut levels = vec![0usize];
    spec.nodes.push(("n0".to_string(), None));
    let mut head = 0;
    while head < spec.nodes.len() {
        if levels[head] < horizon {
            let k = rng.gen_range(1..=params.max_branching);
            let w: Vec<Rational> = (0..k).map(|_| rat(rng.gen_range(1..=3), 1)).collect();
            let total: Rational = w.iter().sum();
            let q: Vec<Rational> = w.iter().map(|x| x / &total).collect();
            let mut child_prices = vec![Vec::with_capacity(assets); k];
            for a in 0..assets {
                let base = prices[head][a].clone();
                let mut d: Vec<Rational> = (0..k - 1).map(|_| steps.choose(rng).unwrap().clone()).collect();
                let partial: Rational = d.iter().zip(&q).map(|(x, p)| x * p).sum();
                d.push(-partial / &q[k - 1]);
                if base.is_zero() {
                    d.iter_mut().for_each(|x| *x = Rational::zero());
                }
                while d.iter().any(|x| (&base + x).is_negative()) {
                    d.iter_mut().for_each(|x| *x /= rat(2, 1));
                }
                for (c, x) in d.iter().enumerate() {
                    child_prices[c].push(&base + x);
                }
            }
            for p in child_prices {
                let id = format!("n{}", spec.nodes.len());
                spec.nodes.push((id, Some(spec.nodes[head].0.clone())));
                prices.push(p);
                levels.push(levels[head] + 1);
            }
        }
        head += 1;
    }
    let leaves: Vec<usize> = (0..spec.nodes.len()).filter(|&i| levels[i] == horizon).collect();
    let w = rat(1, leaves.len() as i64);
    spec.leaf_weights = leaves.iter().map(|&i| (spec.nodes[i].0.clone(), w.clone())).collect();
    let by_id = spec
        .nodes
        .iter()
        .zip(prices)
        .map(|((id, _), p)| (id.clone(), p))
        .collect();
    Market::from_spec(&spec, &by_id).expect("generated market is well formed")
}

fn small<R: Rng>(rng: &mut R, nonnegative: bool) -> Rational {
    let lo = if nonnegative { 0 } else { -6 };
    rat(rng.gen_range(lo..=6), rng.gen_range(1..=3))
}

/// Claim with small-denominator payoffs in `[-6, 6]` (or `[0, 6]`).
pub fn claim<R: Rng>(rng: &mut R, leaves: usize, nonnegative: bool) -> Claim {
    Claim::new((0..leaves).map(|_| small(rng, nonnegative)).collect())
}

/// `F_t`-measurable values, one per level-`t` atom.
pub fn atom_values<R: Rng>(rng: &mut R, atoms: usize, nonnegative: bool) -> Vec<Rational> {
    (0..atoms).map(|_| small(rng, nonnegative)).collect()
}

/// Random stopping time: each node stops with probability `1/3`, leaves
/// always stop.
pub fn stopping_nodes<R: Rng>(rng: &mut R, market: &Market) -> Vec<NodeId> {
    let tree = &market.tree;
    let mut out = Vec::new();
    let mut stack = vec![tree.root()];
    while let Some(n) = stack.pop() {
        if tree.node(n).is_leaf() || rng.gen_ratio(1, 3) {
            out.push(n);
        } else {
            stack.extend(tree.node(n).children.iter().copied());
        }
    }
    out.sort_unstable();
    out
}

/// A stopping time `≥ sigma`: below each node of `sigma`, keep going with
/// probability `1/2` at every step.
pub fn later_stopping_nodes<R: Rng>(rng: &mut R, market: &Market, sigma: &[NodeId]) -> Vec<NodeId> {
    let tree = &market.tree;
    let mut out = Vec::new();
    let mut stack: Vec<NodeId> = sigma.to_vec();
    while let Some(n) = stack.pop() {
        if tree.node(n).is_leaf() || rng.gen_bool(0.5) {
            out.push(n);
        } else {
            stack.extend(tree.node(n).children.iter().copied());
        }
    }
    out.sort_unstable();
    out
}
