//! Vertex enumeration by exhaustive basis enumeration.

use itertools::Itertools;
use num_traits::Zero;

use super::{linalg, LinearProgram, Row, Sense, Status};
use crate::error::{Error, Result};
use crate::rational::Rational;

pub const DEFAULT_VERTEX_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexOptions {
    /// Largest ambient dimension accepted.
    pub cap: usize,
}

impl Default for VertexOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_VERTEX_CAP,
        }
    }
}

/// `{x : eq rows hold, ge rows hold}` in `dim` dimensions. Sign constraints
/// must be listed explicitly among the `≥` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    pub dim: usize,
    pub eq: Vec<Row>,
    pub ge: Vec<Row>,
}

impl Polytope {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            eq: Vec::new(),
            ge: Vec::new(),
        }
    }

    /// Adds `x_i ≥ 0` for every coordinate.
    pub fn nonnegative(mut self) -> Self {
        for i in 0..self.dim {
            let mut c = vec![Rational::zero(); self.dim];
            c[i] = Rational::from_integer(1.into());
            self.ge.push(Row {
                coeffs: c,
                rhs: Rational::zero(),
            });
        }
        self
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim
            && self.eq.iter().all(|r| linalg::dot(&r.coeffs, x) == r.rhs)
            && self.ge.iter().all(|r| linalg::dot(&r.coeffs, x) >= r.rhs)
    }

    /// `max|min objective · x` over the polytope as a linear program.
    pub fn program(&self, objective: Vec<Rational>, sense: Sense) -> LinearProgram {
        let mut lp = LinearProgram::new(objective, sense);
        for j in 0..self.dim {
            lp.set_free(j);
        }
        lp.eq = self.eq.clone();
        lp.ge = self.ge.clone();
        lp
    }

    fn is_bounded(&self) -> bool {
        for i in 0..self.dim {
            let mut c = vec![Rational::zero(); self.dim];
            c[i] = Rational::from_integer(1.into());
            for sense in [Sense::Maximize, Sense::Minimize] {
                if self.program(c.clone(), sense).solve().status == Status::Unbounded {
                    return false;
                }
            }
        }
        true
    }
}

/// All vertices of a bounded polytope, exactly feasible, deduplicated and in
/// ascending lexicographic order.
pub fn vertices(p: &Polytope, opts: VertexOptions) -> Result<Vec<Vec<Rational>>> {
    let found = basic_feasible_points(p, opts)?;
    if found.is_empty() {
        // Either empty, or nonempty without vertices (hence unbounded).
        let probe = p.program(vec![Rational::zero(); p.dim], Sense::Minimize).solve();
        if probe.status == Status::Infeasible {
            return Ok(found);
        }
        return Err(Error::UnboundedPolytope);
    }
    if !p.is_bounded() {
        return Err(Error::UnboundedPolytope);
    }
    Ok(found)
}

/// Vertices of a polytope the caller knows to be bounded (for instance one
/// contained in the probability simplex).
pub(crate) fn basic_feasible_points(
    p: &Polytope,
    opts: VertexOptions,
) -> Result<Vec<Vec<Rational>>> {
    if p.dim > opts.cap {
        return Err(Error::DimensionTooLarge {
            dim: p.dim,
            cap: opts.cap,
        });
    }
    let eq_rows: Vec<Vec<Rational>> = p.eq.iter().map(|r| r.coeffs.clone()).collect();
    let eq_rank = linalg::rank(&eq_rows, p.dim);
    let need = p.dim - eq_rank;
    let mut found: Vec<Vec<Rational>> = Vec::new();
    if need <= p.ge.len() {
        for active in (0..p.ge.len()).combinations(need) {
            let mut a = eq_rows.clone();
            let mut b: Vec<Rational> = p.eq.iter().map(|r| r.rhs.clone()).collect();
            for &k in &active {
                a.push(p.ge[k].coeffs.clone());
                b.push(p.ge[k].rhs.clone());
            }
            if let Some(x) = linalg::solve_unique(&a, &b, p.dim) {
                if p.contains(&x) {
                    found.push(x);
                }
            }
        }
    }
    found.sort();
    found.dedup();
    Ok(found)
}
