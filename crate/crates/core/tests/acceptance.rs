//! Acceptance suite: one PASS/FAIL line per criterion, all comparisons exact.

use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use superhedge::decomp::{check_supermartingale, optional_decomposition};
use superhedge::emm::{conditional_expectation, lower_price, sample_emm, upper_price, vertex_combinations, Measure};
use superhedge::expectation::{
    acceptance_oracle, check_axioms, check_axioms_with, stopping_time_expectation, subhedge, superhedge, Axiom,
    Evaluator, StoppingTime, Superhedging,
};
use superhedge::lp::VertexOptions;
use superhedge::market::{Claim, Market};
use superhedge::pricing::{
    interval_membership, is_attainable, is_complete_at, price_interval, verify_pasting_characterization,
};
use superhedge::rational::{int, rat};
use superhedge::{fixtures, random, Rational, Result};

const MARKETS: u64 = 200;
const CLAIMS: usize = 20;
const STOPPING_PAIRS: usize = 50;
const COMBINATION_LIMIT: usize = 64;
const EMM_SEEDS: u64 = 10;

struct Case {
    market: Market,
    claims: Vec<Claim>,
}

fn corpus() -> Vec<Case> {
    (0..MARKETS)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(10_000 + i);
            let market = random::market(&mut rng, random::MarketParams::default());
            let leaves = market.tree.num_leaves();
            let claims = (0..CLAIMS).map(|_| random::claim(&mut rng, leaves, true)).collect();
            Case { market, claims }
        })
        .collect()
}

/// Outcome of one criterion: first failure found, if any, plus a summary.
struct Verdict {
    failure: Option<String>,
    summary: String,
}

impl Verdict {
    fn pass(summary: impl Into<String>) -> Self {
        Self {
            failure: None,
            summary: summary.into(),
        }
    }

    fn fail(why: impl Into<String>) -> Self {
        Self {
            failure: Some(why.into()),
            summary: String::new(),
        }
    }
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Ok(Verdict::fail(format!($($fmt)+)));
        }
    };
}

fn fixture_reproduction() -> Result<Verdict> {
    let b1 = fixtures::b1();
    let s = superhedge(&b1, &fixtures::b1_call(), 0)?;
    ensure!(s.price == [rat(1, 3)], "B1 call price {:?}", s.price);
    ensure!(s.strategy.at(0) == [rat(2, 3)], "B1 hedge {:?}", s.strategy.at(0));

    let b2 = fixtures::b2();
    let call = fixtures::b2_call();
    ensure!(superhedge(&b2, &call, 0)?.price == [rat(1, 3)], "B2 call at t=0");
    ensure!(superhedge(&b2, &call, 1)?.price == [int(1), int(0)], "B2 call at t=1");

    let t1 = fixtures::t1();
    let up = fixtures::t1_up();
    let iv = price_interval(&t1, &up, 0)?;
    let a = &iv.atoms[0];
    ensure!(
        a.lower == int(0) && a.upper == rat(1, 3) && a.open_lower && a.open_upper && !a.degenerate,
        "T1 interval {a:?}"
    );
    let s = superhedge(&t1, &up, 0)?;
    ensure!(s.price == [rat(1, 3)] && s.strategy.at(0) == [rat(2, 3)], "T1 superhedge");
    ensure!(subhedge(&t1, &up, 0)?.price == [int(0)], "T1 subhedge");

    let d = optional_decomposition(&t1, &fixtures::t1_super_process())?;
    ensure!(d.consumption.values == [int(0), int(0), rat(1, 3), int(0)], "T1 consumption {:?}", d.consumption.values);
    Ok(Verdict::pass("B1, B2, T1 prices, hedges, interval and decomposition"))
}

fn duality(corpus: &[Case]) -> Result<Verdict> {
    let mut checks = 0;
    for (i, c) in corpus.iter().enumerate() {
        for (j, h) in c.claims.iter().enumerate() {
            for t in 0..=c.market.horizon() {
                let up = upper_price(&c.market, h, t)?.values;
                let lo = lower_price(&c.market, h, t)?.values;
                ensure!(superhedge(&c.market, h, t)?.price == up, "market {i} claim {j} t={t}: superhedge");
                ensure!(subhedge(&c.market, h, t)?.price == lo, "market {i} claim {j} t={t}: subhedge");
                checks += 1;
            }
        }
    }
    Ok(Verdict::pass(format!("{} markets, {checks} (claim, t) pairs", corpus.len())))
}

fn consistency(corpus: &[Case]) -> Result<Verdict> {
    let mut pairs = 0;
    for (i, c) in corpus.iter().enumerate() {
        let m = &c.market;
        for (j, h) in c.claims.iter().enumerate() {
            for t in 0..=m.horizon() {
                let inner = m.tree.lift(t, &superhedge(m, h, t)?.price);
                for s in 0..=t {
                    ensure!(
                        superhedge(m, &inner, s)?.price == superhedge(m, h, s)?.price,
                        "market {i} claim {j}: E_{s} E_{t} != E_{s}"
                    );
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for (i, c) in corpus.iter().enumerate().take(STOPPING_PAIRS) {
        let m = &c.market;
        let sigma_nodes = random::stopping_nodes(&mut rng, m);
        let tau_nodes = random::later_stopping_nodes(&mut rng, m, &sigma_nodes);
        let sigma = StoppingTime::new(m, sigma_nodes)?;
        let tau = StoppingTime::new(m, tau_nodes)?;
        ensure!(sigma.le(&tau), "market {i}: sampled σ ≰ τ");
        let h = &c.claims[0];
        let inner = tau.lift(m, &stopping_time_expectation(m, h, &tau)?);
        ensure!(
            stopping_time_expectation(m, &inner, &sigma)? == stopping_time_expectation(m, h, &sigma)?,
            "market {i}: E_σ E_τ != E_σ"
        );
        pairs += 1;
    }
    Ok(Verdict::pass(format!("all s ≤ t on the corpus; {pairs} stopping-time pairs")))
}

fn oracles(corpus: &[Case]) -> Result<Verdict> {
    let mut brute = 0;
    for (i, c) in corpus.iter().enumerate() {
        let m = &c.market;
        let combos = vertex_combinations(m, COMBINATION_LIMIT, VertexOptions::default())?;
        if combos.is_some() {
            brute += 1;
        }
        for (j, h) in c.claims.iter().enumerate() {
            for t in 0..=m.horizon() {
                let sup = superhedge(m, h, t)?.price;
                ensure!(acceptance_oracle(m, h, t)? == sup, "market {i} claim {j} t={t}: acceptance oracle");
                if let Some(measures) = &combos {
                    let values: Vec<Vec<Rational>> = measures
                        .iter()
                        .map(|q| conditional_expectation(m, q, h, t))
                        .collect::<Result<_>>()?;
                    for a in 0..sup.len() {
                        let hi = values.iter().map(|v| v[a].clone()).max().expect("measures");
                        let lo = values.iter().map(|v| v[a].clone()).min().expect("measures");
                        ensure!(upper_price(m, h, t)?.values[a] == hi, "market {i} claim {j} t={t}: brute max");
                        ensure!(lower_price(m, h, t)?.values[a] == lo, "market {i} claim {j} t={t}: brute min");
                    }
                }
            }
        }
    }
    Ok(Verdict::pass(format!("oracle on all markets; brute force on {brute} markets")))
}

fn indicator_prices_agree(m: &Market, measures: &[Measure], t: usize) -> Result<bool> {
    let leaves = m.tree.num_leaves();
    for k in 0..leaves {
        let e = Claim::indicator(k, leaves);
        let first = conditional_expectation(m, &measures[0], &e, t)?;
        for q in &measures[1..] {
            if conditional_expectation(m, q, &e, t)? != first {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn second_ftap(corpus: &[Case]) -> Result<Verdict> {
    let mut complete_count = 0;
    let mut incomplete_count = 0;
    for (i, c) in corpus.iter().enumerate() {
        let m = &c.market;
        let seeds = [1, 2, 3];
        let measures: Vec<Measure> = seeds.iter().map(|&s| sample_emm(m, s)).collect::<Result<_>>()?;
        for t in 0..=m.horizon() {
            let complete = is_complete_at(m, t)?.complete;
            let mut attainable = true;
            let mut linear = true;
            for h in &c.claims {
                attainable &= is_attainable(m, h, t)?.all();
                linear &= superhedge(m, h, t)?.price == subhedge(m, h, t)?.price;
            }
            let agree = indicator_prices_agree(m, &measures, t)?;
            let pasting = verify_pasting_characterization(m, t, &seeds)?;
            ensure!(
                complete == attainable && complete == linear && complete == agree && pasting,
                "market {i} t={t}: complete={complete} attainable={attainable} linear={linear} prices-agree={agree} pasting={pasting}"
            );
            if complete {
                complete_count += 1;
            } else {
                incomplete_count += 1;
            }
        }
    }
    let b2 = fixtures::b2();
    for t in 0..=2 {
        ensure!(is_complete_at(&b2, t)?.complete, "B2 incomplete at {t}");
    }
    let t1 = fixtures::t1();
    ensure!(!is_complete_at(&t1, 0)?.complete, "T1 complete at 0");
    ensure!(is_complete_at(&t1, 1)?.complete, "T1 incomplete at 1");
    Ok(Verdict::pass(format!(
        "{complete_count} complete and {incomplete_count} incomplete (market, t) pairs"
    )))
}

fn interval_theorem(corpus: &[Case]) -> Result<Verdict> {
    let lambdas = [rat(1, 4), rat(1, 2), rat(3, 4)];
    let mut atoms = 0;
    for (i, c) in corpus.iter().enumerate() {
        let m = &c.market;
        let samples: Vec<Measure> = (0..EMM_SEEDS).map(|s| sample_emm(m, 500 + s)).collect::<Result<_>>()?;
        for (j, h) in c.claims.iter().enumerate() {
            for t in 0..=m.horizon() {
                let iv = price_interval(m, h, t)?;
                let n = iv.atoms.len();
                let open: Vec<bool> = iv.atoms.iter().map(|a| !a.degenerate).collect();
                if !open.iter().any(|&o| o) {
                    continue;
                }
                for l in &lambdas {
                    let r = interval_membership(m, h, t, &vec![l.clone(); n])?;
                    ensure!(r.witness.is_equivalent_martingale_measure(m), "market {i} claim {j}: witness not in M_e");
                    ensure!(
                        r.witness.transitions().iter().flatten().all(|q| q.is_positive()),
                        "market {i} claim {j}: witness not strictly positive"
                    );
                    ensure!(conditional_expectation(m, &r.witness, h, t)? == r.price, "market {i} claim {j}: witness price");
                    for (a, atom) in iv.atoms.iter().enumerate() {
                        if open[a] {
                            let want = l * &atom.upper + (Rational::one() - l) * &atom.lower;
                            ensure!(r.price[a] == want, "market {i} claim {j} t={t}: membership price");
                        }
                    }
                }
                for q in &samples {
                    let v = conditional_expectation(m, q, h, t)?;
                    for (a, atom) in iv.atoms.iter().enumerate() {
                        if open[a] {
                            ensure!(
                                atom.lower < v[a] && v[a] < atom.upper,
                                "market {i} claim {j} t={t}: sampled measure reaches an endpoint"
                            );
                        }
                    }
                }
                atoms += open.iter().filter(|&&o| o).count();
            }
        }
    }
    Ok(Verdict::pass(format!("{atoms} non-degenerate atoms × 3 weights, {EMM_SEEDS} sampled measures each")))
}

fn decomposition(corpus: &[Case]) -> Result<Verdict> {
    let mut count = 0;
    for (i, c) in corpus.iter().enumerate() {
        let m = &c.market;
        let tree = &m.tree;
        for (j, h) in c.claims.iter().enumerate() {
            let v = superhedge(m, h, 0)?.process;
            ensure!(check_supermartingale(m, &v)?.is_none(), "market {i} claim {j}: not a supermartingale");
            let d = optional_decomposition(m, &v)?;
            ensure!(d.reconstruct(m, v.at(tree.root())) == v, "market {i} claim {j}: reconstruction");
            ensure!(d.consumption.at(tree.root()).is_zero(), "market {i} claim {j}: C_0 ≠ 0");
            for n in tree.internal_nodes() {
                for &ch in &tree.node(n).children {
                    ensure!(d.consumption.at(ch) >= d.consumption.at(n), "market {i} claim {j}: C decreases");
                }
            }
            count += 1;
        }
    }
    Ok(Verdict::pass(format!("{count} superhedging price processes")))
}

/// `E_t + 1` on the first atom at every `t ≥ from`.
struct Bump {
    by: Rational,
    from: usize,
}

impl Evaluator for Bump {
    fn upper(&self, m: &Market, h: &Claim, t: usize) -> Result<Vec<Rational>> {
        let mut v = Superhedging.upper(m, h, t)?;
        if t >= self.from {
            v[0] += &self.by;
        }
        Ok(v)
    }
}

struct Doubled;
impl Evaluator for Doubled {
    fn upper(&self, m: &Market, h: &Claim, t: usize) -> Result<Vec<Rational>> {
        Ok(Superhedging.upper(m, h, t)?.into_iter().map(|v| v * int(2)).collect())
    }
}

struct Reversed;
impl Evaluator for Reversed {
    fn upper(&self, m: &Market, h: &Claim, t: usize) -> Result<Vec<Rational>> {
        Superhedging.upper(m, &h.neg(), t)
    }
}

struct Swapped;
impl Evaluator for Swapped {
    fn upper(&self, m: &Market, h: &Claim, t: usize) -> Result<Vec<Rational>> {
        Superhedging.lower(m, h, t)
    }
}

fn axioms(corpus: &[Case]) -> Result<Verdict> {
    let mut runs = 0;
    for (i, c) in corpus.iter().enumerate() {
        for t in 0..=c.market.horizon() {
            for r in check_axioms(&c.market, t, &[], 900 + i as u64)? {
                ensure!(
                    !r.axiom.is_required() || r.holds,
                    "market {i} t={t}: {} fails: {:?}",
                    r.axiom.name(),
                    r.counterexample
                );
            }
            runs += 1;
        }
    }
    let t2 = fixtures::t2();
    let bump = Bump { by: int(1), from: 0 };
    let sink = Bump { by: int(-1), from: 1 };
    let faults: [(&dyn Evaluator, usize, Axiom); 10] = [
        (&Reversed, 1, Axiom::Monotonicity),
        (&bump, 1, Axiom::ConstantPreservation),
        (&Doubled, 1, Axiom::TranslationInvariance),
        (&bump, 1, Axiom::Locality),
        (&bump, 1, Axiom::PositiveHomogeneity),
        (&Swapped, 0, Axiom::Subadditivity),
        (&Swapped, 0, Axiom::Sensitivity),
        (&Swapped, 0, Axiom::ConjugateOrder),
        (&bump, 1, Axiom::Consistency),
        (&sink, 1, Axiom::AcceptanceMonotonicity),
    ];
    for (eval, t, axiom) in faults {
        let reports = check_axioms_with(eval, &t2, t, &[], 3)?;
        let r = reports.iter().find(|r| r.axiom == axiom).expect("reported");
        ensure!(!r.holds, "fault for {} not detected", axiom.name());
        ensure!(r.recheck(eval, &t2, t)?, "counterexample for {} does not reproduce", axiom.name());
    }
    Ok(Verdict::pass(format!("{runs} (market, t) runs; 10 injected faults detected")))
}

fn main() {
    let start = Instant::now();
    let corpus = corpus();
    println!(
        "corpus: {} markets, {} claims each, built in {:.2?}",
        corpus.len(),
        CLAIMS,
        start.elapsed()
    );
    type Check<'a> = Box<dyn Fn() -> Result<Verdict> + 'a>;
    let criteria: Vec<(&str, Option<Duration>, Check)> = vec![
        ("fixture reproduction", Some(Duration::from_secs(1)), Box::new(fixture_reproduction)),
        ("duality", Some(Duration::from_secs(60)), Box::new(|| duality(&corpus))),
        ("consistency", None, Box::new(|| consistency(&corpus))),
        ("oracle equivalence", None, Box::new(|| oracles(&corpus))),
        ("second FTAP", None, Box::new(|| second_ftap(&corpus))),
        ("interval theorem", None, Box::new(|| interval_theorem(&corpus))),
        ("optional decomposition", None, Box::new(|| decomposition(&corpus))),
        ("axiom suite", None, Box::new(|| axioms(&corpus))),
    ];
    let mut failed = 0;
    for (k, (name, budget, check)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let verdict = check();
        let took = t0.elapsed();
        let (ok, detail) = match verdict {
            Ok(Verdict { failure: None, summary }) => match budget {
                Some(b) if took > *b => (false, format!("{summary}; over the {b:?} budget")),
                _ => (true, summary),
            },
            Ok(Verdict { failure: Some(why), .. }) => (false, why),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {} [{}] {}: {detail} ({took:.2?})",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            name
        );
    }
    println!("{} of {} criteria passed in {:.2?}", criteria.len() - failed, criteria.len(), start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
