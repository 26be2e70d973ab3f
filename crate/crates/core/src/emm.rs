//! Martingale transition polytopes, equivalent martingale measures, pasting
//! and the risk-neutral price bounds.
//!
//! The family of equivalent martingale measures factorises over the tree: a
//! measure is a strictly positive choice of one-step transition vector at
//! every internal node, each lying in that node's transition polytope
//! `{q ≥ 0, Σ q = 1, Σ_c q_c (X_c − X_node) = 0}`. The open family is handled
//! through the closed polytopes plus strict-positivity bookkeeping, which is
//! what separates a supremum from a maximum in [`upper_price`].

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lp::linalg::{dot, solve_any};
use crate::lp::{basic_feasible_points, LinearProgram, Polytope, Row, Sense, Status, VertexOptions};
use crate::market::{Claim, Market, NodeId};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionPolytope {
    pub node: NodeId,
    pub polytope: Polytope,
}

pub fn transition_polytope(market: &Market, node: NodeId) -> TransitionPolytope {
    let children = &market.tree.node(node).children;
    let k = children.len();
    let mut p = Polytope::new(k).nonnegative();
    p.eq.push(Row {
        coeffs: vec![Rational::one(); k],
        rhs: Rational::one(),
    });
    let incs: Vec<Vec<Rational>> = children.iter().map(|&c| market.increment(c)).collect();
    for a in 0..market.assets() {
        p.eq.push(Row {
            coeffs: incs.iter().map(|d| d[a].clone()).collect(),
            rhs: Rational::zero(),
        });
    }
    TransitionPolytope { node, polytope: p }
}

impl TransitionPolytope {
    pub fn vertices(&self, opts: VertexOptions) -> Result<Vec<Vec<Rational>>> {
        basic_feasible_points(&self.polytope, opts)
    }

    /// `max Σ_c q_c v_c` over the closed polytope, with a maximiser.
    pub fn maximize(&self, values: &[Rational]) -> Option<(Rational, Vec<Rational>)> {
        // Coordinates are the LP's default nonnegative variables; only the
        // equality rows need to be stated.
        let mut lp = LinearProgram::new(values.to_vec(), Sense::Maximize);
        lp.eq = self.polytope.eq.clone();
        let out = lp.solve();
        match out.status {
            Status::Optimal => Some((out.optimum.expect("optimal"), out.primal)),
            _ => None,
        }
    }

    /// Whether `Σ q_c v_c` takes the same value everywhere on the polytope,
    /// i.e. `v` lies in the span of the equality rows. Valid because the
    /// polytope has a strictly positive point, so its affine hull is cut out
    /// by those rows alone.
    pub fn is_constant(&self, values: &[Rational]) -> bool {
        let k = self.polytope.dim;
        let m = self.polytope.eq.len();
        let transposed: Vec<Vec<Rational>> = (0..k)
            .map(|c| self.polytope.eq.iter().map(|r| r.coeffs[c].clone()).collect())
            .collect();
        solve_any(&transposed, values, m).is_some()
    }

    /// Largest `s` such that some feasible `q` has `q_c ≥ s` for every child
    /// and, when `level` is given, `Σ q_c v_c = level`. Returns the point.
    fn most_interior(&self, face: Option<(&[Rational], &Rational)>) -> Option<(Rational, Vec<Rational>)> {
        let k = self.polytope.dim;
        let mut obj = vec![Rational::zero(); k + 1];
        obj[k] = Rational::one();
        let mut lp = LinearProgram::new(obj, Sense::Maximize);
        lp.set_free(k);
        let widen = |c: &[Rational], extra: Rational| {
            let mut v = c.to_vec();
            v.push(extra);
            v
        };
        for r in &self.polytope.eq {
            lp.add_eq(widen(&r.coeffs, Rational::zero()), r.rhs.clone());
        }
        if let Some((values, level)) = face {
            lp.add_eq(widen(values, Rational::zero()), level.clone());
        }
        for c in 0..k {
            let mut row = vec![Rational::zero(); k + 1];
            row[c] = Rational::one();
            row[k] = -Rational::one();
            lp.add_ge(row, Rational::zero());
        }
        let out = lp.solve();
        (out.status == Status::Optimal).then(|| {
            let mut q = out.primal;
            let s = q.pop().expect("slack variable");
            (s, q)
        })
    }

    /// A strictly positive point of the polytope, if one exists.
    pub fn interior_point(&self) -> Option<Vec<Rational>> {
        self.most_interior(None)
            .filter(|(s, _)| s.is_positive())
            .map(|(_, q)| q)
    }

    /// Whether the maximum of `Σ q_c v_c` is attained at a strictly positive `q`.
    pub fn max_attained_in_interior(&self, values: &[Rational], max: &Rational) -> bool {
        self.most_interior(Some((values, max)))
            .is_some_and(|(s, _)| s.is_positive())
    }
}

/// Transition vectors per internal node, in child order; empty at leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Measure {
    transitions: Vec<Vec<Rational>>,
}

impl Measure {
    pub fn from_transitions(transitions: Vec<Vec<Rational>>) -> Self {
        Self { transitions }
    }

    pub fn transition(&self, n: NodeId) -> &[Rational] {
        &self.transitions[n]
    }

    pub fn transitions(&self) -> &[Vec<Rational>] {
        &self.transitions
    }

    /// Path products of the transitions, one per leaf.
    pub fn leaf_weights(&self, market: &Market) -> Vec<Rational> {
        let tree = &market.tree;
        let mut reach = vec![Rational::zero(); tree.len()];
        reach[0] = Rational::one();
        for n in 0..tree.len() {
            for (c, q) in tree.node(n).children.iter().zip(&self.transitions[n]) {
                reach[*c] = &reach[n] * q;
            }
        }
        tree.level(tree.horizon()).map(|n| reach[n].clone()).collect()
    }

    /// Checks that this is an element of `M_e`: every transition strictly
    /// positive, summing to one and satisfying the one-step martingale condition.
    pub fn validate(&self, market: &Market) -> Result<()> {
        let tree = &market.tree;
        if self.transitions.len() != tree.len() {
            return Err(Error::InvalidMeasure("wrong number of nodes".into()));
        }
        for n in 0..tree.len() {
            let node = tree.node(n);
            let q = &self.transitions[n];
            if q.len() != node.children.len() {
                return Err(Error::InvalidMeasure(format!("wrong arity at `{}`", node.id)));
            }
            if node.is_leaf() {
                continue;
            }
            if q.iter().any(|x| !x.is_positive()) {
                return Err(Error::InvalidMeasure(format!(
                    "non-positive transition at `{}`",
                    node.id
                )));
            }
            if !transition_polytope(market, n).polytope.contains(q) {
                return Err(Error::InvalidMeasure(format!(
                    "martingale condition fails at `{}`",
                    node.id
                )));
            }
        }
        Ok(())
    }

    pub fn is_equivalent_martingale_measure(&self, market: &Market) -> bool {
        self.validate(market).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NoArbitrage {
    Free(Measure),
    /// A one-step strategy at `node` with `ξ·ΔX ≥ 0` on every child and `> 0`
    /// on at least one.
    Arbitrage { node: NodeId, strategy: Vec<Rational> },
}

/// One-step arbitrage at `node`: `max Σ z_c` with `0 ≤ z_c ≤ 1`,
/// `ξ·ΔX_c ≥ z_c`, `ξ` free.
fn one_step_arbitrage(market: &Market, node: NodeId) -> Option<Vec<Rational>> {
    let children = &market.tree.node(node).children;
    let d = market.assets();
    let k = children.len();
    let mut obj = vec![Rational::zero(); d + k];
    for o in obj[d..].iter_mut() {
        *o = Rational::one();
    }
    let mut lp = LinearProgram::new(obj, Sense::Maximize);
    for j in 0..d {
        lp.set_free(j);
    }
    for j in 0..k {
        lp.set_bounds(d + j, Some(Rational::zero()), Some(Rational::one()));
    }
    for (j, &c) in children.iter().enumerate() {
        let mut row = market.increment(c);
        row.resize(d + k, Rational::zero());
        row[d + j] = -Rational::one();
        lp.add_ge(row, Rational::zero());
    }
    let out = lp.solve();
    let opt = out.optimum?;
    opt.is_positive().then(|| out.primal[..d].to_vec())
}

/// Decides absence of arbitrage node by node. Returns an equivalent
/// martingale measure, or an arbitrage certificate at the first failing node.
pub fn check_no_arbitrage(market: &Market) -> Result<NoArbitrage> {
    let tree = &market.tree;
    let mut transitions = vec![Vec::new(); tree.len()];
    for n in tree.internal_nodes() {
        match transition_polytope(market, n).interior_point() {
            Some(q) => transitions[n] = q,
            None => {
                let strategy = one_step_arbitrage(market, n).ok_or_else(|| {
                    Error::Mismatch(format!(
                        "node `{}` has neither a positive martingale transition nor an arbitrage",
                        tree.node(n).id
                    ))
                })?;
                return Ok(NoArbitrage::Arbitrage { node: n, strategy });
            }
        }
    }
    Ok(NoArbitrage::Free(Measure::from_transitions(transitions)))
}

/// Errors with [`Error::ArbitrageDetected`] unless the market is free of arbitrage.
pub fn require_no_arbitrage(market: &Market) -> Result<Measure> {
    match check_no_arbitrage(market)? {
        NoArbitrage::Free(q) => Ok(q),
        NoArbitrage::Arbitrage { node, strategy } => Err(Error::ArbitrageDetected {
            node: market.tree.node(node).id.clone(),
            strategy: strategy.iter().map(crate::rational::to_record).collect(),
        }),
    }
}

/// Builds a measure whose transition at each node is the convex combination
/// of that node's polytope vertices with the weights returned by `weights`
/// (normalised to sum to one).
pub fn mix_vertices(
    market: &Market,
    opts: VertexOptions,
    mut weights: impl FnMut(NodeId, usize) -> Vec<Rational>,
) -> Result<Measure> {
    let tree = &market.tree;
    let mut transitions = vec![Vec::new(); tree.len()];
    for n in tree.internal_nodes() {
        let verts = transition_polytope(market, n).vertices(opts)?;
        if verts.is_empty() {
            return Err(Error::NoInteriorPoint(tree.node(n).id.clone()));
        }
        let w = weights(n, verts.len());
        let total: Rational = w.iter().sum();
        let k = tree.node(n).children.len();
        let mut q = vec![Rational::zero(); k];
        for (v, wv) in verts.iter().zip(&w) {
            let f = wv / &total;
            for (qc, vc) in q.iter_mut().zip(v) {
                *qc += &f * vc;
            }
        }
        if q.iter().any(|x| !x.is_positive()) {
            return Err(Error::NoInteriorPoint(tree.node(n).id.clone()));
        }
        transitions[n] = q;
    }
    Ok(Measure::from_transitions(transitions))
}

/// Pseudo-random equivalent martingale measure: each transition is a strict
/// convex combination of the vertices of its polytope, with integer weights
/// in `1..=1000` drawn from a ChaCha stream seeded by `seed`.
pub fn sample_emm(market: &Market, seed: u64) -> Result<Measure> {
    sample_emm_with(market, seed, VertexOptions::default())
}

pub fn sample_emm_with(market: &Market, seed: u64, opts: VertexOptions) -> Result<Measure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    mix_vertices(market, opts, |_, nv| {
        (0..nv)
            .map(|_| Rational::from_integer(rng.gen_range(1i64..=1000).into()))
            .collect()
    })
}

/// `Q¹ ⊙_t Q²`: transitions of `q1` strictly before level `t`, of `q2` from `t` on.
pub fn paste(market: &Market, q1: &Measure, q2: &Measure, t: usize) -> Result<Measure> {
    market.tree.check_time(t)?;
    let transitions = (0..market.tree.len())
        .map(|n| {
            if market.tree.node(n).level < t {
                q1.transitions[n].clone()
            } else {
                q2.transitions[n].clone()
            }
        })
        .collect();
    Ok(Measure::from_transitions(transitions))
}

/// `E_Q[H | node]` at every node.
pub fn conditional_process(market: &Market, q: &Measure, h: &Claim) -> Result<Vec<Rational>> {
    market.check_claim(h)?;
    let tree = &market.tree;
    let mut v = vec![Rational::zero(); tree.len()];
    for (k, n) in tree.level(tree.horizon()).enumerate() {
        v[n] = h.payoff[k].clone();
    }
    for n in tree.internal_nodes().rev() {
        v[n] = tree
            .node(n)
            .children
            .iter()
            .zip(q.transition(n))
            .map(|(c, p)| &v[*c] * p)
            .sum();
    }
    Ok(v)
}

/// `E_Q[H | F_t]` on the level-`t` atoms.
pub fn conditional_expectation(market: &Market, q: &Measure, h: &Claim, t: usize) -> Result<Vec<Rational>> {
    market.tree.check_time(t)?;
    let v = conditional_process(market, q, h)?;
    Ok(market.tree.level(t).map(|n| v[n].clone()).collect())
}

/// Per-atom values of a price bound together with whether the bound is
/// attained by a genuine (strictly positive) martingale measure.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceBound {
    pub values: Vec<Rational>,
    pub attained: Vec<bool>,
}

/// Node-wise upper price process `u_n = max_q Σ q_c u_c` over the closed
/// polytopes, with attainment propagated from the leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundProcess {
    pub values: Vec<Rational>,
    pub attained: Vec<bool>,
}

impl BoundProcess {
    pub fn at_level(&self, market: &Market, t: usize) -> PriceBound {
        let r = market.tree.level(t);
        PriceBound {
            values: self.values[r.clone()].to_vec(),
            attained: self.attained[r].to_vec(),
        }
    }
}

/// Backward recursion of one-step maximisations over the closed transition
/// polytopes, computed at every node at or below level `t`.
pub fn upper_process(market: &Market, h: &Claim, t: usize) -> Result<BoundProcess> {
    market.check_claim(h)?;
    market.tree.check_time(t)?;
    let tree = &market.tree;
    let mut values = vec![Rational::zero(); tree.len()];
    let mut attained = vec![true; tree.len()];
    for (k, n) in tree.level(tree.horizon()).enumerate() {
        values[n] = h.payoff[k].clone();
    }
    for n in (tree.level(t).start..tree.level(tree.horizon()).start).rev() {
        let children = &tree.node(n).children;
        let child_values: Vec<Rational> = children.iter().map(|&c| values[c].clone()).collect();
        let poly = transition_polytope(market, n);
        let (max, _) = poly.maximize(&child_values).ok_or_else(|| {
            Error::ArbitrageDetected {
                node: tree.node(n).id.clone(),
                strategy: Vec::new(),
            }
        })?;
        // The maximum is reached at a strictly positive point exactly when
        // the functional is constant on the polytope: every proper face has
        // a zero coordinate.
        attained[n] = children.iter().all(|&c| attained[c]) && poly.is_constant(&child_values);
        values[n] = max;
    }
    Ok(BoundProcess { values, attained })
}

/// Upper no-arbitrage bound `esssup_{Q ∈ M_e} E_Q[H | F_t]` per atom.
pub fn upper_price(market: &Market, h: &Claim, t: usize) -> Result<PriceBound> {
    Ok(upper_process(market, h, t)?.at_level(market, t))
}

/// Lower no-arbitrage bound `essinf_{Q ∈ M_e} E_Q[H | F_t]` per atom.
pub fn lower_price(market: &Market, h: &Claim, t: usize) -> Result<PriceBound> {
    let mut b = upper_price(market, &h.neg(), t)?;
    for v in b.values.iter_mut() {
        *v = -v.clone();
    }
    Ok(b)
}

/// Max and min of `E_Q[H | node]` over all measures built from per-node
/// polytope vertices, computed by dynamic programming over the vertices.
/// Independent of the simplex solver.
pub fn vertex_extremes(market: &Market, h: &Claim, opts: VertexOptions) -> Result<(Vec<Rational>, Vec<Rational>)> {
    market.check_claim(h)?;
    let tree = &market.tree;
    let mut hi = vec![Rational::zero(); tree.len()];
    let mut lo = vec![Rational::zero(); tree.len()];
    for (k, n) in tree.level(tree.horizon()).enumerate() {
        hi[n] = h.payoff[k].clone();
        lo[n] = h.payoff[k].clone();
    }
    for n in tree.internal_nodes().rev() {
        let children = &tree.node(n).children;
        let verts = transition_polytope(market, n).vertices(opts)?;
        if verts.is_empty() {
            return Err(Error::NoInteriorPoint(tree.node(n).id.clone()));
        }
        let his: Vec<Rational> = children.iter().map(|&c| hi[c].clone()).collect();
        let los: Vec<Rational> = children.iter().map(|&c| lo[c].clone()).collect();
        hi[n] = verts.iter().map(|v| dot(v, &his)).max().expect("nonempty");
        lo[n] = verts.iter().map(|v| dot(v, &los)).min().expect("nonempty");
    }
    Ok((hi, lo))
}

/// Every measure obtained by picking one vertex per internal node, or `None`
/// when there are more than `limit` such combinations. These lie in the
/// closure of `M_e`.
pub fn vertex_combinations(market: &Market, limit: usize, opts: VertexOptions) -> Result<Option<Vec<Measure>>> {
    let tree = &market.tree;
    let mut per_node = Vec::new();
    let mut total: usize = 1;
    for n in tree.internal_nodes() {
        let v = transition_polytope(market, n).vertices(opts)?;
        total = total.saturating_mul(v.len());
        if total > limit {
            return Ok(None);
        }
        per_node.push(v);
    }
    let mut out = Vec::with_capacity(total);
    let mut choice = vec![0usize; per_node.len()];
    loop {
        let mut transitions = vec![Vec::new(); tree.len()];
        for (n, &c) in choice.iter().enumerate() {
            transitions[n] = per_node[n][c].clone();
        }
        out.push(Measure::from_transitions(transitions));
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(Some(out));
            }
            choice[i] += 1;
            if choice[i] < per_node[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Combines measures with `F_t`-measurable weights: `lambdas[i][a]` is the
/// weight of `measures[i]` on the `a`-th level-`t` atom. All measures are
/// first pasted after `measures[0]` at `t` so that they agree on `F_t`; the
/// result satisfies `E_Q[H | F_t] = Σ_i λ_i E_{Q_i}[H | F_t]` for every claim.
pub fn convex_combine(market: &Market, measures: &[Measure], t: usize, lambdas: &[Vec<Rational>]) -> Result<Measure> {
    let tree = &market.tree;
    tree.check_time(t)?;
    if measures.is_empty() || measures.len() != lambdas.len() {
        return Err(Error::ShapeMismatch("one weight vector per measure is required".into()));
    }
    let atoms: Vec<NodeId> = tree.level(t).collect();
    for (a, _) in atoms.iter().enumerate() {
        let mut sum = Rational::zero();
        for l in lambdas {
            let w = l.get(a).ok_or(Error::MixingWeights(a))?;
            if w.is_negative() {
                return Err(Error::MixingWeights(a));
            }
            sum += w;
        }
        if !sum.is_one() {
            return Err(Error::MixingWeights(a));
        }
    }
    let pasted: Vec<Measure> = measures
        .iter()
        .map(|m| paste(market, &measures[0], m, t))
        .collect::<Result<_>>()?;

    let mut transitions = pasted[0].transitions.clone();
    for (a, &atom) in atoms.iter().enumerate() {
        // Reach probability of each subtree node from the atom under each measure.
        let sub = tree.subtree(atom);
        let mut reach: Vec<Vec<Rational>> = vec![vec![Rational::zero(); tree.len()]; pasted.len()];
        for (i, q) in pasted.iter().enumerate() {
            reach[i][atom] = Rational::one();
            for &n in &sub {
                for (c, p) in tree.node(n).children.iter().zip(q.transition(n)) {
                    reach[i][*c] = &reach[i][n] * p;
                }
            }
        }
        for &n in &sub {
            if tree.node(n).is_leaf() {
                continue;
            }
            let mass: Rational = (0..pasted.len()).map(|i| &lambdas[i][a] * &reach[i][n]).sum();
            transitions[n] = (0..tree.node(n).children.len())
                .map(|c| {
                    let flow: Rational = (0..pasted.len())
                        .map(|i| &lambdas[i][a] * &reach[i][n] * &pasted[i].transition(n)[c])
                        .sum();
                    flow / &mass
                })
                .collect();
        }
    }
    Ok(Measure::from_transitions(transitions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{int, rat};

    fn trinomial(a: Rational) -> Vec<Rational> {
        vec![a.clone(), Rational::one() - &a * int(3), &a * int(2)]
    }

    fn uniform_trinomial_measure(m: &Market, a: Rational) -> Measure {
        Measure::from_transitions(
            (0..m.tree.len())
                .map(|n| if m.tree.node(n).is_leaf() { Vec::new() } else { trinomial(a.clone()) })
                .collect(),
        )
    }

    #[test]
    fn binomial_polytope_is_a_point() {
        let m = fixtures::b1();
        let p = transition_polytope(&m, 0);
        assert_eq!(p.polytope.dim, 2);
        assert_eq!(
            p.vertices(VertexOptions::default()).unwrap(),
            vec![vec![rat(1, 3), rat(2, 3)]]
        );
    }

    #[test]
    fn trinomial_polytope_is_a_segment() {
        let m = fixtures::t1();
        let p = transition_polytope(&m, 0);
        let v = p.vertices(VertexOptions::default()).unwrap();
        assert_eq!(v, vec![trinomial(int(0)), trinomial(rat(1, 3))]);
        for a in [rat(0, 1), rat(1, 6), rat(1, 3)] {
            assert!(p.polytope.contains(&trinomial(a)));
        }
        assert!(!p.polytope.contains(&trinomial(rat(1, 2))));
    }

    #[test]
    fn single_child_without_move_is_a_singleton() {
        let m = crate::format::parse_market(
            "horizon 1\nassets 1\nnode r - 3\nnode s r 3\nweight s 1\n",
        )
        .unwrap();
        let v = transition_polytope(&m, 0).vertices(VertexOptions::default()).unwrap();
        assert_eq!(v, vec![vec![int(1)]]);
    }

    #[test]
    fn no_arbitrage_checks() {
        match check_no_arbitrage(&fixtures::b1()).unwrap() {
            NoArbitrage::Free(q) => assert_eq!(q.transition(0), &[rat(1, 3), rat(2, 3)]),
            other => panic!("{other:?}"),
        }
        match check_no_arbitrage(&fixtures::t1()).unwrap() {
            NoArbitrage::Free(q) => assert!(q.is_equivalent_martingale_measure(&fixtures::t1())),
            other => panic!("{other:?}"),
        }
        let up = crate::format::parse_market(
            "horizon 1\nassets 1\nnode r - 1\nnode x r 2\nnode y r 3\nweight x 1/2\nweight y 1/2\n",
        )
        .unwrap();
        match check_no_arbitrage(&up).unwrap() {
            NoArbitrage::Arbitrage { node, strategy } => {
                assert_eq!(node, 0);
                assert!(strategy[0].is_positive());
                for c in [1, 2] {
                    assert!(dot(&strategy, &up.increment(c)).is_positive());
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sampling_is_deterministic_and_positive() {
        let b1 = fixtures::b1();
        for seed in [0, 1, 99] {
            assert_eq!(sample_emm(&b1, seed).unwrap().transition(0), &[rat(1, 3), rat(2, 3)]);
        }
        let t1 = fixtures::t1();
        let mid = mix_vertices(&t1, VertexOptions::default(), |_, n| vec![int(1); n]).unwrap();
        assert_eq!(mid.transition(0), &[rat(1, 6), rat(1, 2), rat(1, 3)]);
        let (q1, q2) = (sample_emm(&t1, 1).unwrap(), sample_emm(&t1, 2).unwrap());
        assert_ne!(q1, q2);
        assert!(q1.is_equivalent_martingale_measure(&t1));
        assert!(q2.is_equivalent_martingale_measure(&t1));
        assert_eq!(q1, sample_emm(&t1, 1).unwrap());
    }

    #[test]
    fn pasting_rules() {
        let m = fixtures::t2();
        let q1 = uniform_trinomial_measure(&m, rat(1, 6));
        let q2 = uniform_trinomial_measure(&m, rat(1, 4));
        assert_eq!(paste(&m, &q1, &q1, 1).unwrap(), q1);
        assert_eq!(paste(&m, &q1, &q2, 0).unwrap(), q2);
        assert_eq!(paste(&m, &q1, &q2, 2).unwrap(), q1);
        let p = paste(&m, &q1, &q2, 1).unwrap();
        assert_eq!(p.transition(0), trinomial(rat(1, 6)).as_slice());
        for n in m.tree.level(1) {
            assert_eq!(p.transition(n), trinomial(rat(1, 4)).as_slice());
        }
        assert!(p.is_equivalent_martingale_measure(&m));
    }

    #[test]
    fn conditional_expectations() {
        let b1 = fixtures::b1();
        let q = sample_emm(&b1, 0).unwrap();
        assert_eq!(conditional_expectation(&b1, &q, &fixtures::b1_call(), 0).unwrap(), vec![rat(1, 3)]);
        let b2 = fixtures::b2();
        let q = sample_emm(&b2, 0).unwrap();
        assert_eq!(
            conditional_expectation(&b2, &q, &fixtures::b2_call(), 1).unwrap(),
            vec![int(1), int(0)]
        );
        let c = Claim::constant(rat(7, 5), b2.tree.num_leaves());
        for t in 0..=2 {
            assert!(conditional_expectation(&b2, &q, &c, t).unwrap().iter().all(|v| *v == rat(7, 5)));
        }
    }

    #[test]
    fn price_bounds_on_fixtures() {
        let t1 = fixtures::t1();
        let h = fixtures::t1_up();
        let up = upper_price(&t1, &h, 0).unwrap();
        assert_eq!(up.values, vec![rat(1, 3)]);
        assert_eq!(up.attained, vec![false]);
        let lo = lower_price(&t1, &h, 0).unwrap();
        assert_eq!(lo.values, vec![int(0)]);
        assert_eq!(lo.attained, vec![false]);

        let b1 = fixtures::b1();
        let up = upper_price(&b1, &fixtures::b1_call(), 0).unwrap();
        assert_eq!((up.values, up.attained), (vec![rat(1, 3)], vec![true]));
        assert_eq!(lower_price(&b1, &fixtures::b1_call(), 0).unwrap().values, vec![rat(1, 3)]);

        let c = Claim::constant(int(4), 3);
        let lo = lower_price(&t1, &c, 0).unwrap();
        assert_eq!((lo.values, lo.attained), (vec![int(4)], vec![true]));
        assert_eq!(upper_price(&t1, &h, 1).unwrap().values, h.payoff);
    }

    #[test]
    fn convex_combination_matches_direct_mixture() {
        let t1 = fixtures::t1();
        let q1 = uniform_trinomial_measure(&t1, rat(1, 8));
        let q2 = uniform_trinomial_measure(&t1, rat(1, 4));
        let half = vec![vec![rat(1, 2)], vec![rat(1, 2)]];
        let mix = convex_combine(&t1, &[q1.clone(), q2.clone()], 0, &half).unwrap();
        assert!(mix.is_equivalent_martingale_measure(&t1));
        for h in [fixtures::t1_up(), Claim::new(vec![int(3), int(-1), rat(2, 7)])] {
            let a = conditional_expectation(&t1, &q1, &h, 0).unwrap();
            let b = conditional_expectation(&t1, &q2, &h, 0).unwrap();
            let got = conditional_expectation(&t1, &mix, &h, 0).unwrap();
            assert_eq!(got[0], (&a[0] + &b[0]) / int(2));
        }
        let same = convex_combine(&t1, &[q1.clone()], 0, &[vec![int(1)]]).unwrap();
        assert_eq!(same, q1);
        assert_eq!(
            convex_combine(&t1, &[q1.clone(), q2], 0, &[vec![rat(1, 2)], vec![rat(1, 3)]]),
            Err(Error::MixingWeights(0))
        );
    }

    #[test]
    fn atomwise_splice_on_a_two_period_market() {
        let m = fixtures::t2();
        let q1 = uniform_trinomial_measure(&m, rat(1, 6));
        let q2 = uniform_trinomial_measure(&m, rat(1, 4));
        let lambdas = vec![vec![int(1), int(0), int(1)], vec![int(0), int(1), int(0)]];
        let q = convex_combine(&m, &[q1.clone(), q2.clone()], 1, &lambdas).unwrap();
        let h = Claim::new((0..9).map(|k| rat(k * k, 3)).collect());
        let e1 = conditional_expectation(&m, &q1, &h, 1).unwrap();
        let e2 = conditional_expectation(&m, &q2, &h, 1).unwrap();
        let got = conditional_expectation(&m, &q, &h, 1).unwrap();
        assert_eq!(got, vec![e1[0].clone(), e2[1].clone(), e1[2].clone()]);
    }

    #[test]
    fn interior_maximum_iff_constant_functional() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let m = crate::random::market(&mut rng, crate::random::MarketParams::default());
            for n in m.tree.internal_nodes() {
                let poly = transition_polytope(&m, n);
                let k = m.tree.node(n).children.len();
                let mut cases = vec![crate::random::atom_values(&mut rng, k, false)];
                // Affine in the increments: constant on the polytope.
                let shift = crate::random::atom_values(&mut rng, 1, false).remove(0);
                cases.push(m.tree.node(n).children.iter().map(|&c| &shift + &m.increment(c)[0]).collect());
                for v in cases {
                    let (max, _) = poly.maximize(&v).unwrap();
                    assert_eq!(poly.max_attained_in_interior(&v, &max), poly.is_constant(&v));
                }
            }
        }
    }
}
