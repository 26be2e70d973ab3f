//! Arbitrage-free price sets: interval endpoints, attainability and
//! replication, completeness at a time `t`, pasting, price classification,
//! claim decomposition and constructive interval membership.

use num_traits::{One, Signed, Zero};

use crate::emm::{
    conditional_expectation, lower_price, paste, require_no_arbitrage, sample_emm, transition_polytope,
    upper_price, upper_process, vertex_extremes, convex_combine, Measure,
};
use crate::error::{Error, Result};
use crate::expectation::{subhedge, superhedge};
use crate::lp::linalg::{rank, solve_any};
use crate::lp::VertexOptions;
use crate::market::{Claim, Market, NodeId, Strategy};
use crate::rational::Rational;

/// The no-arbitrage interval on one atom.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomInterval {
    pub lower: Rational,
    pub upper: Rational,
    pub degenerate: bool,
    pub open_lower: bool,
    pub open_upper: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceInterval {
    pub t: usize,
    pub atoms: Vec<AtomInterval>,
}

impl PriceInterval {
    pub fn degenerate(&self) -> Vec<bool> {
        self.atoms.iter().map(|a| a.degenerate).collect()
    }
}

fn require_nonnegative(h: &Claim) -> Result<()> {
    if h.nonnegative {
        Ok(())
    } else {
        Err(Error::NegativeClaim)
    }
}

/// `Π_t(H)` per atom. Endpoint openness comes from whether each bound is
/// attained by a strictly positive measure, and is checked against
/// non-degeneracy.
pub fn price_interval(market: &Market, h: &Claim, t: usize) -> Result<PriceInterval> {
    require_nonnegative(h)?;
    require_no_arbitrage(market)?;
    let up = upper_price(market, h, t)?;
    let lo = lower_price(market, h, t)?;
    let mut atoms = Vec::with_capacity(up.values.len());
    for a in 0..up.values.len() {
        let degenerate = up.values[a] == lo.values[a];
        let (open_lower, open_upper) = (!lo.attained[a], !up.attained[a]);
        if open_lower == degenerate || open_upper == degenerate {
            return Err(Error::Mismatch(format!(
                "atom {a}: endpoint attainment disagrees with degeneracy"
            )));
        }
        atoms.push(AtomInterval {
            lower: lo.values[a].clone(),
            upper: up.values[a].clone(),
            degenerate,
            open_lower,
            open_upper,
        });
    }
    Ok(PriceInterval { t, atoms })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attainability {
    pub t: usize,
    pub attainable: Vec<bool>,
    /// The unique price on attainable atoms.
    pub price: Vec<Option<Rational>>,
    /// Replicates `H` from `t` on every attainable atom; zero elsewhere.
    pub strategy: Strategy,
}

impl Attainability {
    pub fn all(&self) -> bool {
        self.attainable.iter().all(|&a| a)
    }
}

/// Whether `H = h + G_t(ξ)` is solvable on the subtree of `atom`.
fn replicable_on(market: &Market, h: &Claim, atom: NodeId) -> bool {
    let tree = &market.tree;
    let d = market.assets();
    let internal: Vec<NodeId> = tree
        .subtree(atom)
        .into_iter()
        .filter(|&n| !tree.node(n).is_leaf())
        .collect();
    let ncols = 1 + d * internal.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for k in tree.node(atom).leaves() {
        let mut row = vec![Rational::zero(); ncols];
        row[0] = Rational::one();
        let mut n = tree.leaf_node(k);
        while n != atom {
            let parent = tree.node(n).parent.expect("below the atom");
            let slot = internal.iter().position(|&m| m == parent).expect("internal subtree node");
            for (j, x) in market.increment(n).into_iter().enumerate() {
                row[1 + slot * d + j] += x;
            }
            n = parent;
        }
        a.push(row);
        b.push(h.payoff[k].clone());
    }
    solve_any(&a, &b, ncols).is_some()
}

/// Attainability at `t`, decided three ways that must agree: equal super- and
/// subhedging prices, constant conditional price over all vertex measures,
/// and exact solvability of the replication system.
pub fn is_attainable(market: &Market, h: &Claim, t: usize) -> Result<Attainability> {
    is_attainable_with(market, h, t, VertexOptions::default())
}

pub fn is_attainable_with(market: &Market, h: &Claim, t: usize, opts: VertexOptions) -> Result<Attainability> {
    market.check_claim(h)?;
    market.tree.check_time(t)?;
    let sup = superhedge(market, h, t)?;
    let sub = subhedge(market, h, t)?;
    let (hi, lo) = vertex_extremes(market, h, opts)?;
    let tree = &market.tree;
    let mut attainable = Vec::new();
    let mut price = Vec::new();
    let mut strategy = Strategy::zero(market);
    for (a, atom) in tree.level(t).enumerate() {
        let by_prices = sup.price[a] == sub.price[a];
        let by_vertices = hi[atom] == lo[atom];
        let by_system = replicable_on(market, h, atom);
        if by_prices != by_vertices || by_prices != by_system {
            return Err(Error::Mismatch(format!(
                "attainability tests disagree on atom `{}`: prices {by_prices}, vertices {by_vertices}, system {by_system}",
                tree.node(atom).id
            )));
        }
        attainable.push(by_prices);
        if by_prices {
            for n in tree.subtree(atom) {
                if !tree.node(n).is_leaf() {
                    strategy.set(n, sup.strategy.at(n).to_vec());
                }
            }
            price.push(Some(sup.price[a].clone()));
        } else {
            price.push(None);
        }
    }
    let wealth = tree.lift(t, &sup.price).add(&market.gains(&strategy, t)?);
    for (a, atom) in tree.level(t).enumerate() {
        if attainable[a] && tree.node(atom).leaves().any(|k| wealth.payoff[k] != h.payoff[k]) {
            return Err(Error::Mismatch(format!(
                "superhedge does not replicate on attainable atom `{}`",
                tree.node(atom).id
            )));
        }
    }
    Ok(Attainability {
        t,
        attainable,
        price,
        strategy,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Completeness {
    pub t: usize,
    pub complete: bool,
    /// Internal nodes at levels `≥ t` whose transition polytope is not a point.
    pub violating: Vec<NodeId>,
}

/// Completeness at `t`: every transition polytope from level `t` on is a
/// single point. Cross-checked against attainability at `t` of every leaf
/// indicator.
pub fn is_complete_at(market: &Market, t: usize) -> Result<Completeness> {
    require_no_arbitrage(market)?;
    let tree = &market.tree;
    tree.check_time(t)?;
    // A strictly positive point exists, so the polytope has dimension
    // `k − rank` of its equality system.
    let violating: Vec<NodeId> = (tree.level(t).start..tree.level(tree.horizon()).start)
        .filter(|&n| {
            let p = transition_polytope(market, n).polytope;
            let rows: Vec<Vec<Rational>> = p.eq.iter().map(|r| r.coeffs.clone()).collect();
            rank(&rows, p.dim) < p.dim
        })
        .collect();
    let complete = violating.is_empty();
    let leaves = tree.num_leaves();
    let mut spanned = true;
    for k in 0..leaves {
        if !is_attainable(market, &Claim::indicator(k, leaves), t)?.all() {
            spanned = false;
            break;
        }
    }
    if spanned != complete {
        return Err(Error::Mismatch(format!(
            "structural completeness at t={t} is {complete} but indicator attainability is {spanned}"
        )));
    }
    Ok(Completeness { t, complete, violating })
}

/// Pasting check on explicit measures: every paste `Q_i ⊙_t Q_j` must be an
/// equivalent martingale measure, and leaf-indicator prices at `t` must agree
/// across all measures exactly when the market is complete at `t`.
pub fn verify_pasting_with(market: &Market, t: usize, measures: &[Measure]) -> Result<bool> {
    let complete = is_complete_at(market, t)?.complete;
    let leaves = market.tree.num_leaves();
    let mut stable = true;
    let mut agree = true;
    for q in measures {
        q.validate(market)?;
    }
    for (i, q1) in measures.iter().enumerate() {
        for q2 in &measures[i + 1..] {
            stable &= paste(market, q1, q2, t)?.is_equivalent_martingale_measure(market);
            stable &= paste(market, q2, q1, t)?.is_equivalent_martingale_measure(market);
            for k in 0..leaves {
                let e = Claim::indicator(k, leaves);
                agree &= conditional_expectation(market, q1, &e, t)? == conditional_expectation(market, q2, &e, t)?;
            }
        }
    }
    // With one measure there is nothing to compare; only stability is observable.
    let consistent = measures.len() < 2 || agree == complete;
    Ok(stable && consistent)
}

/// [`verify_pasting_with`] on measures sampled from `seeds`.
pub fn verify_pasting_characterization(market: &Market, t: usize, seeds: &[u64]) -> Result<bool> {
    let measures: Vec<Measure> = seeds.iter().map(|&s| sample_emm(market, s)).collect::<Result<_>>()?;
    verify_pasting_with(market, t, &measures)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriceClass {
    Interior,
    BoundaryNotPrice,
    Outside,
}

impl PriceClass {
    pub fn label(self) -> &'static str {
        match self {
            PriceClass::Interior => "interior",
            PriceClass::BoundaryNotPrice => "boundary-not-price",
            PriceClass::Outside => "outside",
        }
    }
}

/// Whether each proposed price `pi` lies in `Π_t(H)`.
pub fn classify_price(market: &Market, h: &Claim, t: usize, pi: &[Rational]) -> Result<Vec<PriceClass>> {
    let iv = price_interval(market, h, t)?;
    if pi.len() != iv.atoms.len() {
        return Err(Error::ShapeMismatch(format!("{} prices for {} atoms", pi.len(), iv.atoms.len())));
    }
    Ok(iv
        .atoms
        .iter()
        .zip(pi)
        .map(|(a, p)| {
            if a.degenerate {
                if *p == a.upper {
                    PriceClass::Interior
                } else {
                    PriceClass::Outside
                }
            } else if a.lower < *p && *p < a.upper {
                PriceClass::Interior
            } else if *p == a.lower || *p == a.upper {
                PriceClass::BoundaryNotPrice
            } else {
                PriceClass::Outside
            }
        })
        .collect())
}

/// `H = H_A + H_B` with `A` the union of atoms where the interval is
/// degenerate. `H_A` is attainable at `t`; `H_B` is degenerate exactly on `A`
/// (where it vanishes).
pub fn decompose_claim(market: &Market, h: &Claim, t: usize) -> Result<(Claim, Claim)> {
    let iv = price_interval(market, h, t)?;
    let deg = iv.degenerate();
    let mask: Vec<Rational> = deg.iter().map(|&d| if d { Rational::one() } else { Rational::zero() }).collect();
    let ind = market.tree.lift(t, &mask);
    let h_a = h.mul(&ind);
    let h_b = h.sub(&h_a);
    if !is_attainable(market, &h_a, t)?.all() {
        return Err(Error::Mismatch("attainable part is not attainable".into()));
    }
    if price_interval(market, &h_b, t)?.degenerate() != deg {
        return Err(Error::Mismatch("residual part is degenerate off the attainable set".into()));
    }
    Ok((h_a, h_b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    /// `λ·upper + (1 − λ)·lower` per atom (the unique price on degenerate atoms).
    pub price: Vec<Rational>,
    /// Equivalent martingale measure with `E_Q[H | F_t] = price`.
    pub witness: Measure,
}

/// Closed-polytope maximiser of the backward upper recursion of `h` at every
/// node from level `t` on; `base` elsewhere.
fn extremal_measure(market: &Market, h: &Claim, t: usize, base: &Measure) -> Result<Measure> {
    let tree = &market.tree;
    let u = upper_process(market, h, t)?;
    let mut transitions = base.transitions().to_vec();
    for n in tree.level(t).start..tree.level(tree.horizon()).start {
        let child_values: Vec<Rational> = tree.node(n).children.iter().map(|&c| u.values[c].clone()).collect();
        let (_, q) = transition_polytope(market, n)
            .maximize(&child_values)
            .ok_or_else(|| Error::Mismatch(format!("no maximiser at `{}`", tree.node(n).id)))?;
        transitions[n] = q;
    }
    Ok(Measure::from_transitions(transitions))
}

/// Realises the price `λ·upper + (1 − λ)·lower` on every non-degenerate atom
/// by an explicit equivalent martingale measure: an atom-wise mix of the
/// upper and lower extremal measures with a strictly positive measure.
/// On degenerate atoms `λ` is ignored and the unique price is returned.
pub fn interval_membership(market: &Market, h: &Claim, t: usize, lambdas: &[Rational]) -> Result<Membership> {
    let iv = price_interval(market, h, t)?;
    if lambdas.len() != iv.atoms.len() {
        return Err(Error::ShapeMismatch(format!("{} weights for {} atoms", lambdas.len(), iv.atoms.len())));
    }
    let inner = require_no_arbitrage(market)?;
    let hi = extremal_measure(market, h, t, &inner)?;
    let lo = extremal_measure(market, &h.neg(), t, &inner)?;
    let mid = conditional_expectation(market, &inner, h, t)?;

    let n = iv.atoms.len();
    let mut price = Vec::with_capacity(n);
    let (mut w_in, mut w_hi, mut w_lo) = (Vec::new(), Vec::new(), Vec::new());
    for (a, atom) in iv.atoms.iter().enumerate() {
        if atom.degenerate {
            price.push(atom.upper.clone());
            w_in.push(Rational::one());
            w_hi.push(Rational::zero());
            w_lo.push(Rational::zero());
            continue;
        }
        let lambda = &lambdas[a];
        if !lambda.is_positive() || *lambda >= Rational::one() {
            return Err(Error::MixingWeights(a));
        }
        let (l, u, i) = (&atom.lower, &atom.upper, &mid[a]);
        if !(l < i && i < u) {
            return Err(Error::Mismatch(format!("positive measure reaches an endpoint on atom {a}")));
        }
        let target = lambda * u + (Rational::one() - lambda) * l;
        // Keep a positive share of the interior measure small enough that the
        // remaining weights stay positive.
        let half = Rational::new(1.into(), 2.into());
        let cap = std::cmp::min((&target - l) / (i - l), (u - &target) / (u - i));
        let gamma = half * std::cmp::min(Rational::one(), cap);
        let alpha = (&target - &gamma * i - (Rational::one() - &gamma) * l) / (u - l);
        let beta = Rational::one() - &gamma - &alpha;
        debug_assert!(alpha.is_positive() && beta.is_positive());
        price.push(target);
        w_in.push(gamma);
        w_hi.push(alpha);
        w_lo.push(beta);
    }
    let witness = convex_combine(market, &[inner, hi, lo], t, &[w_in, w_hi, w_lo])?;
    if !witness.is_equivalent_martingale_measure(market) {
        return Err(Error::Mismatch("interval witness is not an equivalent martingale measure".into()));
    }
    if conditional_expectation(market, &witness, h, t)? != price {
        return Err(Error::Mismatch("interval witness misses the requested price".into()));
    }
    Ok(Membership { price, witness })
}
