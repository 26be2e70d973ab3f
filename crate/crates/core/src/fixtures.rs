//! Small hand-checkable markets shipped with the crate (also under
//! `fixtures/` for use with the command-line tool).

use crate::format::{parse_claim, parse_market, parse_process};
use crate::market::{AdaptedProcess, Claim, Market};

pub const B1: &str = include_str!("../fixtures/b1.market");
pub const B1_CALL: &str = include_str!("../fixtures/b1_call.claim");
pub const B2: &str = include_str!("../fixtures/b2.market");
pub const B2_CALL: &str = include_str!("../fixtures/b2_call.claim");
pub const T1: &str = include_str!("../fixtures/t1.market");
pub const T1_UP: &str = include_str!("../fixtures/t1_up.claim");
pub const T1_SUPER: &str = include_str!("../fixtures/t1_super.process");
pub const T1_UNDER: &str = include_str!("../fixtures/t1_under.process");
pub const T2: &str = include_str!("../fixtures/t2.market");
pub const T1_BINOMIAL: &str = include_str!("../fixtures/t1_binomial.market");
pub const MIXED: &str = include_str!("../fixtures/mixed.market");
pub const TWO_ASSET: &str = include_str!("../fixtures/two_asset.market");

fn load(text: &str) -> Market {
    parse_market(text).expect("bundled fixture parses")
}

/// One-period binomial: 1 → {2, 1/2}.
pub fn b1() -> Market {
    load(B1)
}

/// Two-period binomial with factors 2 and 1/2.
pub fn b2() -> Market {
    load(B2)
}

/// One-period trinomial: 1 → {2, 1, 1/2}.
pub fn t1() -> Market {
    load(T1)
}

/// Two-period trinomial with factors 2, 1, 1/2.
pub fn t2() -> Market {
    load(T2)
}

/// Trinomial first period followed by binomial periods.
pub fn t1_then_binomial() -> Market {
    load(T1_BINOMIAL)
}

/// Binomial root; complete below `u`, incomplete below `d`.
pub fn mixed() -> Market {
    load(MIXED)
}

pub fn two_asset() -> Market {
    load(TWO_ASSET)
}

pub fn b1_call() -> Claim {
    parse_claim(B1_CALL, &b1()).expect("fixture")
}

pub fn b2_call() -> Claim {
    parse_claim(B2_CALL, &b2()).expect("fixture")
}

pub fn t1_up() -> Claim {
    parse_claim(T1_UP, &t1()).expect("fixture")
}

pub fn t1_super_process() -> AdaptedProcess {
    parse_process(T1_SUPER, &t1()).expect("fixture")
}

pub fn t1_under_process() -> AdaptedProcess {
    parse_process(T1_UNDER, &t1()).expect("fixture")
}
