//! Line-oriented text formats for markets, claims, processes and measures.
//!
//! Blank lines and everything after `#` are ignored. Every scalar is an exact
//! rational token `n` or `n/d`; decimals are rejected.
//!
//! Market file:
//!
//! ```text
//! horizon <T>
//! assets <d>
//! node <id> <parent-id | -> <price_1> ... <price_d>
//! weight <leaf-id> <P(leaf)>
//! ```
//!
//! Claim file: one `<leaf-id> <payoff>` line per leaf.
//! Process file: one `<node-id> <value>` line per node.
//! Measure file: one `<parent-id> <child-id> <probability>` line per edge.

use std::collections::HashMap;
use std::fmt::Write;

use crate::emm::Measure;
use crate::error::{Error, Result};
use crate::market::{AdaptedProcess, Claim, Market, TreeSpec};
use crate::rational::{parse_rational, to_record, Rational};

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = content.split_whitespace().collect();
        (!fields.is_empty()).then_some((i + 1, fields))
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn number(line: usize, token: &str) -> Result<Rational> {
    parse_rational(token).map_err(|source| Error::ParseRational { line, source })
}

fn count(line: usize, token: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| parse_err(line, format!("expected a nonnegative integer, got `{token}`")))
}

pub fn parse_market(text: &str) -> Result<Market> {
    let mut horizon = None;
    let mut assets = None;
    let mut spec = TreeSpec::default();
    let mut prices: HashMap<String, Vec<Rational>> = HashMap::new();
    for (line, f) in lines(text) {
        match f[0] {
            "horizon" if f.len() == 2 => horizon = Some(count(line, f[1])?),
            "assets" if f.len() == 2 => assets = Some(count(line, f[1])?),
            "node" if f.len() >= 4 => {
                let d = assets.ok_or_else(|| parse_err(line, "`assets` must precede nodes"))?;
                if f.len() != 3 + d {
                    return Err(parse_err(
                        line,
                        format!("node `{}` needs {d} prices, got {}", f[1], f.len() - 3),
                    ));
                }
                let p = f[3..]
                    .iter()
                    .map(|t| number(line, t))
                    .collect::<Result<Vec<_>>>()?;
                let parent = (f[2] != "-").then(|| f[2].to_string());
                if prices.insert(f[1].to_string(), p).is_some() {
                    return Err(parse_err(line, format!("duplicate node `{}`", f[1])));
                }
                spec.nodes.push((f[1].to_string(), parent));
            }
            "weight" if f.len() == 3 => {
                spec.leaf_weights.push((f[1].to_string(), number(line, f[2])?));
            }
            other => return Err(parse_err(line, format!("unrecognised record `{other}`"))),
        }
    }
    spec.horizon = horizon.ok_or_else(|| parse_err(0, "missing `horizon`"))?;
    Market::from_spec(&spec, &prices)
}

fn keyed_values(text: &str) -> Result<Vec<(usize, String, Rational)>> {
    lines(text)
        .map(|(line, f)| {
            if f.len() != 2 {
                return Err(parse_err(line, "expected `<id> <value>`"));
            }
            Ok((line, f[0].to_string(), number(line, f[1])?))
        })
        .collect()
}

pub fn parse_claim(text: &str, market: &Market) -> Result<Claim> {
    let tree = &market.tree;
    let mut payoff: Vec<Option<Rational>> = vec![None; tree.num_leaves()];
    for (line, id, v) in keyed_values(text)? {
        let n = tree
            .lookup(&id)
            .filter(|&n| tree.node(n).is_leaf())
            .ok_or_else(|| parse_err(line, format!("`{id}` is not a leaf")))?;
        let k = tree.node(n).leaves().start;
        if payoff[k].replace(v).is_some() {
            return Err(parse_err(line, format!("duplicate payoff for `{id}`")));
        }
    }
    let payoff = payoff
        .into_iter()
        .enumerate()
        .map(|(k, v)| {
            v.ok_or_else(|| {
                parse_err(0, format!("no payoff for leaf `{}`", tree.node(tree.leaf_node(k)).id))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Claim::new(payoff))
}

pub fn parse_process(text: &str, market: &Market) -> Result<AdaptedProcess> {
    let tree = &market.tree;
    let mut values: Vec<Option<Rational>> = vec![None; tree.len()];
    for (line, id, v) in keyed_values(text)? {
        let n = tree
            .lookup(&id)
            .ok_or_else(|| parse_err(line, format!("unknown node `{id}`")))?;
        if values[n].replace(v).is_some() {
            return Err(parse_err(line, format!("duplicate value for `{id}`")));
        }
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(n, v)| v.ok_or_else(|| parse_err(0, format!("no value for node `{}`", tree.node(n).id))))
        .collect::<Result<Vec<_>>>()?;
    Ok(AdaptedProcess { values })
}

pub fn write_claim(claim: &Claim, market: &Market) -> String {
    let tree = &market.tree;
    let mut out = String::new();
    for (k, v) in claim.payoff.iter().enumerate() {
        let _ = writeln!(out, "{} {}", tree.node(tree.leaf_node(k)).id, to_record(v));
    }
    out
}

pub fn write_market(market: &Market) -> String {
    let tree = &market.tree;
    let mut out = String::new();
    let _ = writeln!(out, "horizon {}", tree.horizon());
    let _ = writeln!(out, "assets {}", market.assets());
    for (n, node) in tree.nodes().iter().enumerate() {
        let parent = node.parent.map_or("-".to_string(), |p| tree.node(p).id.clone());
        let prices: Vec<String> = market.prices.at(n).iter().map(to_record).collect();
        let _ = writeln!(out, "node {} {} {}", node.id, parent, prices.join(" "));
    }
    for (k, w) in tree.leaf_weights().iter().enumerate() {
        let _ = writeln!(out, "weight {} {}", tree.node(tree.leaf_node(k)).id, to_record(w));
    }
    out
}

pub fn write_measure(measure: &Measure, market: &Market) -> String {
    let tree = &market.tree;
    let mut out = String::new();
    for n in tree.internal_nodes() {
        for (c, q) in tree.node(n).children.iter().zip(measure.transition(n)) {
            let _ = writeln!(out, "{} {} {}", tree.node(n).id, tree.node(*c).id, to_record(q));
        }
    }
    out
}

pub fn parse_measure(text: &str, market: &Market) -> Result<Measure> {
    let tree = &market.tree;
    let mut trans: Vec<Vec<Option<Rational>>> = tree
        .nodes()
        .iter()
        .map(|n| vec![None; n.children.len()])
        .collect();
    for (line, f) in lines(text) {
        if f.len() != 3 {
            return Err(parse_err(line, "expected `<parent> <child> <probability>`"));
        }
        let p = tree
            .lookup(f[0])
            .ok_or_else(|| parse_err(line, format!("unknown node `{}`", f[0])))?;
        let c = tree
            .lookup(f[1])
            .filter(|&c| tree.node(c).parent == Some(p))
            .ok_or_else(|| parse_err(line, format!("`{}` is not a child of `{}`", f[1], f[0])))?;
        let pos = tree.node(p).children.iter().position(|&x| x == c).expect("child");
        trans[p][pos] = Some(number(line, f[2])?);
    }
    let transitions = trans
        .into_iter()
        .enumerate()
        .map(|(n, qs)| {
            qs.into_iter()
                .map(|q| q.ok_or_else(|| parse_err(0, format!("missing transition below `{}`", tree.node(n).id))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Measure::from_transitions(transitions))
}
