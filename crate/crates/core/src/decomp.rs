//! Optional decomposition of nonnegative supermartingales under every
//! equivalent martingale measure: `V = V_0 + (ξ·X) − C` with `C` adapted,
//! non-decreasing and `C_0 = 0`.

use num_traits::{Signed, Zero};

use crate::emm::transition_polytope;
use crate::error::{Error, Result};
use crate::expectation::superhedge_step;
use crate::lp::linalg::dot;
use crate::market::{AdaptedProcess, Market, NodeId, Strategy};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub strategy: Strategy,
    /// Cumulative consumption `C` at every node.
    pub consumption: AdaptedProcess,
}

impl Decomposition {
    /// `V_0 + (ξ·X)_n − C_n` at every node.
    pub fn reconstruct(&self, market: &Market, v0: &Rational) -> AdaptedProcess {
        let tree = &market.tree;
        let mut gains = vec![Rational::zero(); tree.len()];
        for n in tree.internal_nodes() {
            for &c in &tree.node(n).children {
                gains[c] = &gains[n] + dot(self.strategy.at(n), &market.increment(c));
            }
        }
        AdaptedProcess {
            values: gains
                .iter()
                .zip(&self.consumption.values)
                .map(|(g, c)| v0 + g - c)
                .collect(),
        }
    }
}

/// First internal node (in breadth-first order) where the one-step upper
/// price of the children's values exceeds the node's value, or `None` if `V`
/// is a supermartingale under every equivalent martingale measure.
pub fn check_supermartingale(market: &Market, v: &AdaptedProcess) -> Result<Option<NodeId>> {
    market.check_process(v)?;
    let tree = &market.tree;
    if let Some(n) = v.values.iter().position(|x| x.is_negative()) {
        return Err(Error::NegativeProcess(tree.node(n).id.clone()));
    }
    for n in tree.internal_nodes() {
        let child_values: Vec<Rational> = tree.node(n).children.iter().map(|&c| v.at(c).clone()).collect();
        let (max, _) = transition_polytope(market, n).maximize(&child_values).ok_or_else(|| {
            Error::ArbitrageDetected {
                node: tree.node(n).id.clone(),
                strategy: Vec::new(),
            }
        })?;
        if max > *v.at(n) {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Decomposes `V` node by node: the one-step superhedge of `ΔV` gives `ξ`
/// and a nonpositive price, so `ΔC = ξ·ΔX − ΔV ≥ 0`.
pub fn optional_decomposition(market: &Market, v: &AdaptedProcess) -> Result<Decomposition> {
    let tree = &market.tree;
    if let Some(n) = check_supermartingale(market, v)? {
        return Err(Error::NotSupermartingale(tree.node(n).id.clone()));
    }
    let mut strategy = Strategy::zero(market);
    let mut c = vec![Rational::zero(); tree.len()];
    for n in tree.internal_nodes() {
        let children = &tree.node(n).children;
        let dv: Vec<Rational> = children.iter().map(|&ch| v.at(ch) - v.at(n)).collect();
        let (price, xi) = superhedge_step(market, n, &dv)?;
        if price.is_positive() {
            return Err(Error::Mismatch(format!("positive one-step price at `{}`", tree.node(n).id)));
        }
        for (&ch, d) in children.iter().zip(&dv) {
            let step = dot(&xi, &market.increment(ch)) - d;
            if step.is_negative() {
                return Err(Error::Mismatch(format!("negative consumption at `{}`", tree.node(ch).id)));
            }
            c[ch] = &c[n] + step;
        }
        strategy.set(n, xi);
    }
    let out = Decomposition {
        strategy,
        consumption: AdaptedProcess { values: c },
    };
    if out.reconstruct(market, v.at(tree.root())) != *v {
        return Err(Error::Mismatch("decomposition does not reconstruct the process".into()));
    }
    Ok(out)
}
