//! Superhedging and subhedging prices as a dynamic nonlinear expectation.
//!
//! `E_t(H)` is computed by backward induction of one-step superhedging
//! programs. The global definition (a single program over all strategies
//! from time 0) is kept as an independent route in [`acceptance_oracle`] and
//! [`global_superhedge_price`].

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Sense, Status};
use crate::market::{AdaptedProcess, Claim, Market, NodeId, Strategy};
use crate::rational::Rational;

pub mod axioms;

pub use axioms::{check_axioms, check_axioms_with, Axiom, AxiomReport, Counterexample, Evaluator, Superhedging};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Super,
    Sub,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HedgeResult {
    /// Price on each level-`t` atom.
    pub price: Vec<Rational>,
    /// Hedge held from `t` on; zero at nodes above level `t`.
    pub strategy: Strategy,
    /// Hedging price at every node at or below level `t`; zero above.
    pub process: AdaptedProcess,
    pub side: Side,
    pub t: usize,
}

impl HedgeResult {
    /// `price + G_t(strategy)` as a claim.
    pub fn terminal_wealth(&self, market: &Market) -> Result<Claim> {
        let start = market.tree.lift(self.t, &self.price);
        Ok(start.add(&market.gains(&self.strategy, self.t)?))
    }

    /// Super: wealth dominates `h`; sub: `h` dominates wealth. Exact.
    pub fn hedges(&self, market: &Market, h: &Claim) -> Result<bool> {
        let w = self.terminal_wealth(market)?;
        Ok(match self.side {
            Side::Super => w.dominates(h),
            Side::Sub => h.dominates(&w),
        })
    }
}

/// `min h` over `(h, ξ)` with `h + ξ·(X_c − X_node) ≥ v_c` for every child.
pub fn superhedge_step(market: &Market, node: NodeId, child_values: &[Rational]) -> Result<(Rational, Vec<Rational>)> {
    let tree = &market.tree;
    let children = &tree.node(node).children;
    if children.len() != child_values.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} child values for {} children",
            child_values.len(),
            children.len()
        )));
    }
    let d = market.assets();
    let mut obj = vec![Rational::zero(); d + 1];
    obj[0] = Rational::one();
    let mut lp = LinearProgram::new(obj, Sense::Minimize);
    for j in 0..=d {
        lp.set_free(j);
    }
    for (&c, v) in children.iter().zip(child_values) {
        let mut row = vec![Rational::one()];
        row.extend(market.increment(c));
        lp.add_ge(row, v.clone());
    }
    let out = lp.solve();
    match out.status {
        Status::Optimal => {
            let mut x = out.primal;
            let xi = x.split_off(1);
            Ok((x.pop().expect("price variable"), xi))
        }
        _ => Err(Error::Unbounded {
            node: tree.node(node).id.clone(),
        }),
    }
}

/// Superhedging price `E_t(H)` on every level-`t` atom, with the hedge.
pub fn superhedge(market: &Market, h: &Claim, t: usize) -> Result<HedgeResult> {
    market.check_claim(h)?;
    market.tree.check_time(t)?;
    let tree = &market.tree;
    let mut values = vec![Rational::zero(); tree.len()];
    for (k, n) in tree.level(tree.horizon()).enumerate() {
        values[n] = h.payoff[k].clone();
    }
    let mut strategy = Strategy::zero(market);
    for n in (tree.level(t).start..tree.level(tree.horizon()).start).rev() {
        let child_values: Vec<Rational> = tree.node(n).children.iter().map(|&c| values[c].clone()).collect();
        let (price, xi) = superhedge_step(market, n, &child_values)?;
        values[n] = price;
        strategy.set(n, xi);
    }
    Ok(HedgeResult {
        price: tree.level(t).map(|n| values[n].clone()).collect(),
        strategy,
        process: AdaptedProcess { values },
        side: Side::Super,
        t,
    })
}

/// Subhedging price `E*_t(H) = −E_t(−H)`.
pub fn subhedge(market: &Market, h: &Claim, t: usize) -> Result<HedgeResult> {
    let s = superhedge(market, &h.neg(), t)?;
    let neg = |v: &[Rational]| v.iter().map(|x| -x).collect::<Vec<_>>();
    Ok(HedgeResult {
        price: neg(&s.price),
        strategy: Strategy {
            values: s.strategy.values.iter().map(|v| neg(v)).collect(),
        },
        process: AdaptedProcess {
            values: neg(&s.process.values),
        },
        side: Side::Sub,
        t,
    })
}

/// Leaf-by-strategy-variable matrix of `G_0`: column block `d·i .. d·(i+1)`
/// holds the increments seen by the position taken at the `i`-th internal node.
fn gains_rows(market: &Market) -> Vec<Vec<Rational>> {
    let tree = &market.tree;
    let d = market.assets();
    let n_int = tree.internal_nodes().len();
    tree.level(tree.horizon())
        .map(|leaf| {
            let mut row = vec![Rational::zero(); d * n_int];
            let mut n = leaf;
            while let Some(p) = tree.node(n).parent {
                for (a, inc) in market.increment(n).into_iter().enumerate() {
                    row[d * p + a] += inc;
                }
                n = p;
            }
            row
        })
        .collect()
}

/// `E_0(Y)` as one program over every strategy: `min x` with
/// `x + G_0(ξ) ≥ Y`.
pub fn global_superhedge_price(market: &Market, y: &Claim) -> Result<Rational> {
    market.check_claim(y)?;
    let rows = gains_rows(market);
    let nv = 1 + rows[0].len();
    let mut obj = vec![Rational::zero(); nv];
    obj[0] = Rational::one();
    let mut lp = LinearProgram::new(obj, Sense::Minimize);
    for j in 0..nv {
        lp.set_free(j);
    }
    for (row, v) in rows.into_iter().zip(&y.payoff) {
        let mut r = vec![Rational::one()];
        r.extend(row);
        lp.add_ge(r, v.clone());
    }
    lp.solve().optimum.ok_or_else(|| Error::Unbounded {
        node: market.tree.node(0).id.clone(),
    })
}

/// Reconstructs `E_t(H)` on each level-`t` atom `A` from the time-0
/// acceptance set alone: the least constant `h` with
/// `E_0(1_A (H − h)) ≤ 0`, i.e. `min h` subject to `G_0(ξ) ≥ 1_A (H − h)`.
pub fn acceptance_oracle(market: &Market, h: &Claim, t: usize) -> Result<Vec<Rational>> {
    market.check_claim(h)?;
    market.tree.check_time(t)?;
    let tree = &market.tree;
    let rows = gains_rows(market);
    let nv = 1 + rows[0].len();
    let mut out = Vec::new();
    for atom in tree.level(t) {
        let inside = tree.node(atom).leaves();
        let mut obj = vec![Rational::zero(); nv];
        obj[0] = Rational::one();
        let mut lp = LinearProgram::new(obj, Sense::Minimize);
        for j in 0..nv {
            lp.set_free(j);
        }
        for (k, row) in rows.iter().enumerate() {
            let ind = inside.contains(&k);
            let mut r = vec![if ind { Rational::one() } else { Rational::zero() }];
            r.extend(row.iter().cloned());
            let rhs = if ind { h.payoff[k].clone() } else { Rational::zero() };
            lp.add_ge(r, rhs);
        }
        let res = lp.solve();
        out.push(res.optimum.ok_or_else(|| Error::Unbounded {
            node: tree.node(atom).id.clone(),
        })?);
    }
    Ok(out)
}

/// A stopping time given by the atoms `{τ = s}`: an antichain of nodes whose
/// leaf sets partition the state space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoppingTime {
    nodes: Vec<NodeId>,
    leaf_level: Vec<usize>,
}

impl StoppingTime {
    pub fn new(market: &Market, mut nodes: Vec<NodeId>) -> Result<Self> {
        let tree = &market.tree;
        nodes.sort_unstable();
        nodes.dedup();
        let mut leaf_level = vec![usize::MAX; tree.num_leaves()];
        for &n in &nodes {
            if n >= tree.len() {
                return Err(Error::NotAStoppingTime(format!("unknown node {n}")));
            }
            for k in tree.node(n).leaves() {
                if leaf_level[k] != usize::MAX {
                    return Err(Error::NotAStoppingTime(format!(
                        "state `{}` is stopped twice",
                        tree.node(tree.leaf_node(k)).id
                    )));
                }
                leaf_level[k] = tree.node(n).level;
            }
        }
        if let Some(k) = leaf_level.iter().position(|&l| l == usize::MAX) {
            return Err(Error::NotAStoppingTime(format!(
                "state `{}` is never stopped",
                tree.node(tree.leaf_node(k)).id
            )));
        }
        Ok(Self { nodes, leaf_level })
    }

    pub fn constant(market: &Market, t: usize) -> Result<Self> {
        market.tree.check_time(t)?;
        Self::new(market, market.tree.level(t).collect())
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// `τ(ω)` for the leaf at position `k`.
    pub fn at_leaf(&self, k: usize) -> usize {
        self.leaf_level[k]
    }

    /// `self ≤ other` in every state.
    pub fn le(&self, other: &StoppingTime) -> bool {
        self.leaf_level.iter().zip(&other.leaf_level).all(|(a, b)| a <= b)
    }

    /// Extends per-node values (aligned with [`Self::nodes`]) to a claim.
    pub fn lift(&self, market: &Market, values: &[Rational]) -> Claim {
        let mut payoff = vec![Rational::zero(); market.tree.num_leaves()];
        for (&n, v) in self.nodes.iter().zip(values) {
            for k in market.tree.node(n).leaves() {
                payoff[k] = v.clone();
            }
        }
        Claim::new(payoff)
    }
}

/// `E_τ(H) = Σ_s 1_{τ=s} E_s(H)`, one value per node of `tau`.
pub fn stopping_time_expectation(market: &Market, h: &Claim, tau: &StoppingTime) -> Result<Vec<Rational>> {
    let full = superhedge(market, h, 0)?;
    Ok(tau.nodes.iter().map(|&n| full.process.values[n].clone()).collect())
}

/// True when some atom carries a positive value.
pub(crate) fn any_positive(v: &[Rational]) -> bool {
    v.iter().any(|x| x.is_positive())
}
