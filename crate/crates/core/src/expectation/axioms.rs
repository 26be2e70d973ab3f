//! Exact checks of the structural properties of a conditional nonlinear
//! expectation on sampled claims.
//!
//! Each property is a function of a small tuple of claims; a failing tuple
//! is kept as the counterexample and can be re-evaluated with
//! [`AxiomReport::recheck`].

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{any_positive, superhedge};
use crate::error::Result;
use crate::market::{Claim, Market};
use crate::random;
use crate::rational::Rational;

/// A family of conditional expectations `(E_t)` on a market.
pub trait Evaluator {
    /// `E_t(H)` on the level-`t` atoms.
    fn upper(&self, market: &Market, h: &Claim, t: usize) -> Result<Vec<Rational>>;

    /// Conjugate `E*_t(H) = −E_t(−H)`.
    fn lower(&self, market: &Market, h: &Claim, t: usize) -> Result<Vec<Rational>> {
        Ok(self.upper(market, &h.neg(), t)?.into_iter().map(|v| -v).collect())
    }
}

/// The superhedging expectation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Superhedging;

impl Evaluator for Superhedging {
    fn upper(&self, market: &Market, h: &Claim, t: usize) -> Result<Vec<Rational>> {
        Ok(superhedge(market, h, t)?.price)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    Monotonicity,
    ConstantPreservation,
    TranslationInvariance,
    Locality,
    PositiveHomogeneity,
    Subadditivity,
    Sensitivity,
    ConjugateOrder,
    Consistency,
    AcceptanceMonotonicity,
    /// `E_t = E*_t`; holds exactly when every sampled claim is attainable.
    /// Reported, but not a failure when false.
    Linearity,
}

impl Axiom {
    pub const ALL: [Axiom; 11] = [
        Axiom::Monotonicity,
        Axiom::ConstantPreservation,
        Axiom::TranslationInvariance,
        Axiom::Locality,
        Axiom::PositiveHomogeneity,
        Axiom::Subadditivity,
        Axiom::Sensitivity,
        Axiom::ConjugateOrder,
        Axiom::Consistency,
        Axiom::AcceptanceMonotonicity,
        Axiom::Linearity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Monotonicity => "monotonicity",
            Axiom::ConstantPreservation => "constant-preservation",
            Axiom::TranslationInvariance => "translation-invariance",
            Axiom::Locality => "locality",
            Axiom::PositiveHomogeneity => "positive-homogeneity",
            Axiom::Subadditivity => "subadditivity",
            Axiom::Sensitivity => "sensitivity",
            Axiom::ConjugateOrder => "conjugate-order",
            Axiom::Consistency => "consistency",
            Axiom::AcceptanceMonotonicity => "acceptance-monotonicity",
            Axiom::Linearity => "linearity",
        }
    }

    pub fn is_required(self) -> bool {
        self != Axiom::Linearity
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    /// The claim tuple the property was evaluated on.
    pub claims: Vec<Claim>,
    /// Level whose atoms carry `values` (the earlier time for consistency
    /// and acceptance monotonicity, `t` otherwise).
    pub time: usize,
    pub atom: usize,
    /// The two sides of the violated relation on that atom.
    pub values: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub holds: bool,
    pub cases: usize,
    pub counterexample: Option<Counterexample>,
}

impl AxiomReport {
    /// Re-evaluates the stored counterexample; true if it is still a strict
    /// violation.
    pub fn recheck(&self, eval: &dyn Evaluator, market: &Market, t: usize) -> Result<bool> {
        match &self.counterexample {
            None => Ok(false),
            Some(c) => Ok(violation(self.axiom, eval, market, t, &c.claims, c.time)?.is_some()),
        }
    }
}

fn atom_values(market: &Market, m: &Claim, t: usize) -> Vec<Rational> {
    market
        .tree
        .level(t)
        .map(|n| m.payoff[market.tree.node(n).leaves().start].clone())
        .collect()
}

fn first_diff(
    lhs: &[Rational],
    rhs: &[Rational],
    bad: impl Fn(&Rational, &Rational) -> bool,
) -> Option<(usize, Vec<Rational>)> {
    lhs.iter()
        .zip(rhs)
        .position(|(a, b)| bad(a, b))
        .map(|a| (a, vec![lhs[a].clone(), rhs[a].clone()]))
}

/// `Some((atom, [lhs, rhs]))` when the property fails on `claims`.
fn violation(
    axiom: Axiom,
    eval: &dyn Evaluator,
    market: &Market,
    t: usize,
    claims: &[Claim],
    s: usize,
) -> Result<Option<(usize, Vec<Rational>)>> {
    let e = |h: &Claim, time: usize| eval.upper(market, h, time);
    let ne = |a: &Rational, b: &Rational| a != b;
    let gt = |a: &Rational, b: &Rational| a > b;
    Ok(match axiom {
        Axiom::Monotonicity => {
            let (h1, h2) = (&claims[0], &claims[1]);
            if !h2.dominates(h1) {
                None
            } else {
                first_diff(&e(h1, t)?, &e(h2, t)?, gt)
            }
        }
        Axiom::ConstantPreservation => first_diff(&e(&claims[0], t)?, &atom_values(market, &claims[0], t), ne),
        Axiom::TranslationInvariance => {
            let (h, m) = (&claims[0], &claims[1]);
            let rhs: Vec<Rational> = e(h, t)?.iter().zip(atom_values(market, m, t)).map(|(a, b)| a + b).collect();
            first_diff(&e(&h.add(m), t)?, &rhs, ne)
        }
        Axiom::Locality | Axiom::PositiveHomogeneity => {
            let (h, m) = (&claims[0], &claims[1]);
            let rhs: Vec<Rational> = e(h, t)?.iter().zip(atom_values(market, m, t)).map(|(a, b)| a * b).collect();
            first_diff(&e(&h.mul(m), t)?, &rhs, ne)
        }
        Axiom::Subadditivity => {
            let (h1, h2) = (&claims[0], &claims[1]);
            let rhs: Vec<Rational> = e(h1, t)?.iter().zip(e(h2, t)?).map(|(a, b)| a + b).collect();
            first_diff(&e(&h1.add(h2), t)?, &rhs, gt)
        }
        Axiom::Sensitivity => {
            let h = &claims[0];
            if !h.nonnegative {
                None
            } else {
                let v = e(h, t)?;
                market.tree.level(t).enumerate().find_map(|(a, n)| {
                    let top = market.tree.node(n).leaves().map(|k| h.payoff[k].clone()).max()?;
                    (v[a].is_zero() && top.is_positive()).then(|| (a, vec![v[a].clone(), top]))
                })
            }
        }
        Axiom::ConjugateOrder => first_diff(&eval.lower(market, &claims[0], t)?, &e(&claims[0], t)?, gt),
        Axiom::Consistency => {
            let h = &claims[0];
            let inner = market.tree.lift(t, &e(h, t)?);
            first_diff(&e(&inner, s)?, &e(h, s)?, ne)
        }
        Axiom::AcceptanceMonotonicity => {
            let h = &claims[0];
            if any_positive(&e(h, t)?) {
                None
            } else {
                let v = e(h, s)?;
                v.iter().position(|x| x.is_positive()).map(|a| (a, vec![v[a].clone(), Rational::zero()]))
            }
        }
        Axiom::Linearity => {
            let h = &claims[0];
            first_diff(&eval.upper(market, h, t)?, &eval.lower(market, h, t)?, ne)
        }
    })
}

/// Runs every property against the superhedging expectation at time `t`.
/// With no samples, 20 claims are drawn from `seed`.
pub fn check_axioms(market: &Market, t: usize, samples: &[Claim], seed: u64) -> Result<Vec<AxiomReport>> {
    check_axioms_with(&Superhedging, market, t, samples, seed)
}

pub fn check_axioms_with(
    eval: &dyn Evaluator,
    market: &Market,
    t: usize,
    samples: &[Claim],
    seed: u64,
) -> Result<Vec<AxiomReport>> {
    market.tree.check_time(t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leaves = market.tree.num_leaves();
    let n_atoms = market.tree.level(t).len();
    let generated: Vec<Claim>;
    let samples = if samples.is_empty() {
        generated = (0..20).map(|_| random::claim(&mut rng, leaves, false)).collect();
        &generated
    } else {
        samples
    };
    for h in samples {
        market.check_claim(h)?;
    }

    let mut cases: Vec<(Axiom, Vec<Claim>, usize)> = Vec::new();
    for (i, h) in samples.iter().enumerate() {
        let h2 = &samples[(i + 1) % samples.len()];
        let m = market.tree.lift(t, &random::atom_values(&mut rng, n_atoms, false));
        let m_pos = market.tree.lift(t, &random::atom_values(&mut rng, n_atoms, true));
        let mask: Vec<Rational> = (0..n_atoms)
            .map(|_| if rng.gen_bool(0.5) { Rational::one() } else { Rational::zero() })
            .collect();
        let mask = market.tree.lift(t, &mask);
        let abs = h.map(|x| x.abs());

        cases.push((Axiom::Monotonicity, vec![h.clone(), h.add(&h2.map(|x| x.abs()))], t));
        cases.push((Axiom::ConstantPreservation, vec![m.clone()], t));
        cases.push((Axiom::TranslationInvariance, vec![h.clone(), m.clone()], t));
        cases.push((Axiom::Locality, vec![h.clone(), mask.clone()], t));
        cases.push((Axiom::PositiveHomogeneity, vec![h.clone(), m_pos], t));
        cases.push((Axiom::Subadditivity, vec![h.clone(), h2.clone()], t));
        cases.push((Axiom::Sensitivity, vec![abs.clone()], t));
        cases.push((Axiom::Sensitivity, vec![abs.mul(&mask)], t));
        cases.push((Axiom::Sensitivity, vec![Claim::indicator(rng.gen_range(0..leaves), leaves)], t));
        cases.push((Axiom::ConjugateOrder, vec![h.clone()], t));
        cases.push((Axiom::Linearity, vec![h.clone()], t));
        let centred = h.sub(&market.tree.lift(t, &eval.upper(market, h, t)?));
        for s in 0..=t {
            cases.push((Axiom::Consistency, vec![h.clone()], s));
            cases.push((Axiom::AcceptanceMonotonicity, vec![h.clone()], s));
            cases.push((Axiom::AcceptanceMonotonicity, vec![centred.clone()], s));
        }
    }
    cases.push((Axiom::Sensitivity, vec![Claim::constant(Rational::zero(), leaves)], t));

    let mut reports: Vec<AxiomReport> = Axiom::ALL
        .iter()
        .map(|&axiom| AxiomReport {
            axiom,
            holds: true,
            cases: 0,
            counterexample: None,
        })
        .collect();
    for (axiom, claims, s) in cases {
        let r = reports.iter_mut().find(|r| r.axiom == axiom).expect("listed axiom");
        r.cases += 1;
        if r.counterexample.is_some() {
            continue;
        }
        if let Some((atom, values)) = violation(axiom, eval, market, t, &claims, s)? {
            r.holds = false;
            let time = if matches!(axiom, Axiom::Consistency | Axiom::AcceptanceMonotonicity) { s } else { t };
            r.counterexample = Some(Counterexample {
                claims,
                time,
                atom,
                values,
            });
        }
    }
    debug_assert!(reports.iter().all(|r| r.cases > 0));
    Ok(reports)
}
