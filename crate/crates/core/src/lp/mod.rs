//! Exact rational linear programming and polytope vertex enumeration.
//!
//! Programs are solved with a two-phase dense-tableau simplex using Bland's
//! rule, so every run terminates and is bit-for-bit reproducible. Every
//! outcome carries a certificate that can be checked against the original
//! program without trusting the solver: dual multipliers for an optimum, a
//! Farkas vector for infeasibility and an improving ray for unboundedness.

pub mod linalg;
mod simplex;
mod vertex;

use num_traits::{Signed, Zero};

use crate::rational::Rational;

pub(crate) use vertex::basic_feasible_points;
pub use vertex::{vertices, Polytope, VertexOptions, DEFAULT_VERTEX_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

/// `coeffs · x (rel) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VarBounds {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

/// `min|max objective · x` subject to equality rows, `≥` rows and per-variable
/// bounds. Variables default to `x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub sense: Sense,
    pub eq: Vec<Row>,
    pub ge: Vec<Row>,
    pub bounds: Vec<VarBounds>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub status: Status,
    pub optimum: Option<Rational>,
    /// Optimal point in the original variables; empty unless optimal.
    pub primal: Vec<Rational>,
    /// Row multipliers (equality rows, then `≥` rows) when optimal or
    /// infeasible; an improving ray in variable space when unbounded.
    pub certificate: Vec<Rational>,
}

impl LinearProgram {
    pub fn new(objective: Vec<Rational>, sense: Sense) -> Self {
        let n = objective.len();
        Self {
            objective,
            sense,
            eq: Vec::new(),
            ge: Vec::new(),
            bounds: vec![
                VarBounds {
                    lower: Some(Rational::zero()),
                    upper: None
                };
                n
            ],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn check_width(&self, coeffs: &[Rational]) {
        assert_eq!(
            coeffs.len(),
            self.num_vars(),
            "constraint width does not match objective"
        );
    }

    pub fn add_eq(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.check_width(&coeffs);
        self.eq.push(Row { coeffs, rhs });
        self
    }

    pub fn add_ge(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.check_width(&coeffs);
        self.ge.push(Row { coeffs, rhs });
        self
    }

    /// Stored as the negated `≥` row.
    pub fn add_le(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> &mut Self {
        let coeffs = coeffs.into_iter().map(|c| -c).collect();
        self.add_ge(coeffs, -rhs)
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.bounds[var] = VarBounds::default();
        self
    }

    pub fn set_bounds(
        &mut self,
        var: usize,
        lower: Option<Rational>,
        upper: Option<Rational>,
    ) -> &mut Self {
        if let (Some(l), Some(u)) = (&lower, &upper) {
            assert!(l <= u, "empty bound interval for variable {var}");
        }
        self.bounds[var] = VarBounds { lower, upper };
        self
    }

    pub fn solve(&self) -> LpOutcome {
        simplex::solve(self)
    }

    pub fn value(&self, x: &[Rational]) -> Rational {
        linalg::dot(&self.objective, x)
    }

    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && self
                .eq
                .iter()
                .all(|r| linalg::dot(&r.coeffs, x) == r.rhs)
            && self
                .ge
                .iter()
                .all(|r| linalg::dot(&r.coeffs, x) >= r.rhs)
            && self.bounds.iter().zip(x).all(|(b, v)| {
                b.lower.as_ref().map_or(true, |l| v >= l)
                    && b.upper.as_ref().map_or(true, |u| v <= u)
            })
    }

    /// Lagrangian lower bound of the minimisation `min c·x` for row
    /// multipliers `y`; `None` when `y` is not dual feasible.
    fn bounded_dual(&self, c: &[Rational], y: &[Rational]) -> Option<Rational> {
        let (ye, yg) = y.split_at(self.eq.len());
        if yg.len() != self.ge.len() || yg.iter().any(|v| v.is_negative()) {
            return None;
        }
        let mut value: Rational = self
            .eq
            .iter()
            .zip(ye)
            .chain(self.ge.iter().zip(yg))
            .map(|(r, m)| &r.rhs * m)
            .sum();
        for (j, b) in self.bounds.iter().enumerate() {
            let mut reduced = c[j].clone();
            for (r, m) in self.eq.iter().zip(ye).chain(self.ge.iter().zip(yg)) {
                reduced -= &r.coeffs[j] * m;
            }
            if reduced.is_positive() {
                value += &reduced * b.lower.as_ref()?;
            } else if reduced.is_negative() {
                value += &reduced * b.upper.as_ref()?;
            }
        }
        Some(value)
    }

    /// Objective value of the dual solution `y`, checked for dual
    /// feasibility. At an optimum this equals the primal optimum.
    pub fn dual_value(&self, y: &[Rational]) -> Option<Rational> {
        match self.sense {
            Sense::Minimize => self.bounded_dual(&self.objective, y),
            Sense::Maximize => {
                let c: Vec<Rational> = self.objective.iter().map(|v| -v).collect();
                let y: Vec<Rational> = y.iter().map(|v| -v).collect();
                self.bounded_dual(&c, &y).map(|v| -v)
            }
        }
    }

    /// True when `y` proves the constraint system has no solution.
    pub fn certifies_infeasibility(&self, y: &[Rational]) -> bool {
        let c = vec![Rational::zero(); self.num_vars()];
        self.bounded_dual(&c, y).is_some_and(|v| v.is_positive())
    }

    /// True when `d` is a recession direction of the feasible set that
    /// strictly improves the objective.
    pub fn certifies_unboundedness(&self, d: &[Rational]) -> bool {
        if d.len() != self.num_vars() {
            return false;
        }
        let rec = self.eq.iter().all(|r| linalg::dot(&r.coeffs, d).is_zero())
            && self
                .ge
                .iter()
                .all(|r| !linalg::dot(&r.coeffs, d).is_negative())
            && self.bounds.iter().zip(d).all(|(b, v)| {
                (b.lower.is_none() || !v.is_negative()) && (b.upper.is_none() || !v.is_positive())
            });
        let slope = self.value(d);
        rec && match self.sense {
            Sense::Minimize => slope.is_negative(),
            Sense::Maximize => slope.is_positive(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn min_x_at_least_three() {
        let mut lp = LinearProgram::new(vec![int(1)], Sense::Minimize);
        lp.set_free(0).add_ge(vec![int(1)], int(3));
        let out = lp.solve();
        assert_eq!(out.status, Status::Optimal);
        assert_eq!(out.optimum, Some(int(3)));
        assert_eq!(lp.dual_value(&out.certificate), Some(int(3)));
    }

    #[test]
    fn contradictory_bounds_give_farkas_certificate() {
        let mut lp = LinearProgram::new(vec![int(1)], Sense::Minimize);
        lp.set_free(0)
            .add_le(vec![int(1)], int(-1))
            .add_ge(vec![int(1)], int(1));
        let out = lp.solve();
        assert_eq!(out.status, Status::Infeasible);
        assert!(lp.certifies_infeasibility(&out.certificate));
    }

    #[test]
    fn one_step_superhedge_program() {
        // min h s.t. h + xi >= 1, h >= 0, h - xi/2 >= 0, xi free
        let mut lp = LinearProgram::new(vec![int(1), int(0)], Sense::Minimize);
        lp.set_free(0).set_free(1);
        lp.add_ge(vec![int(1), int(1)], int(1))
            .add_ge(vec![int(1), int(0)], int(0))
            .add_ge(vec![int(1), rat(-1, 2)], int(0));
        let out = lp.solve();
        assert_eq!(out.status, Status::Optimal);
        assert_eq!(out.optimum, Some(rat(1, 3)));
        assert_eq!(out.primal, vec![rat(1, 3), rat(2, 3)]);
        assert_eq!(lp.dual_value(&out.certificate), Some(rat(1, 3)));
    }

    #[test]
    fn unbounded_with_ray() {
        let mut lp = LinearProgram::new(vec![int(-1), int(-1)], Sense::Minimize);
        lp.add_ge(vec![int(1), int(-1)], int(-2));
        let out = lp.solve();
        assert_eq!(out.status, Status::Unbounded);
        assert!(lp.certifies_unboundedness(&out.certificate));
    }

    #[test]
    fn maximize_with_box_bounds_and_equalities() {
        // max x + 2y, x + y = 3, 0 <= x <= 2, 1 <= y <= 2
        let mut lp = LinearProgram::new(vec![int(1), int(2)], Sense::Maximize);
        lp.set_bounds(0, Some(int(0)), Some(int(2)))
            .set_bounds(1, Some(int(1)), Some(int(2)))
            .add_eq(vec![int(1), int(1)], int(3));
        let out = lp.solve();
        assert_eq!(out.optimum, Some(int(5)));
        assert_eq!(out.primal, vec![int(1), int(2)]);
        assert_eq!(lp.dual_value(&out.certificate), Some(int(5)));
    }

    #[test]
    fn upper_bounded_only_variable() {
        // max x, x <= 7/2 (upper-only bound)
        let mut lp = LinearProgram::new(vec![int(1)], Sense::Maximize);
        lp.set_bounds(0, None, Some(rat(7, 2)));
        let out = lp.solve();
        assert_eq!(out.optimum, Some(rat(7, 2)));
        assert_eq!(lp.dual_value(&out.certificate), Some(rat(7, 2)));
    }

    #[test]
    fn redundant_and_zero_rows_are_tolerated() {
        let mut lp = LinearProgram::new(vec![int(1), int(1)], Sense::Minimize);
        lp.add_eq(vec![int(1), int(1)], int(1))
            .add_eq(vec![int(2), int(2)], int(2))
            .add_eq(vec![int(0), int(0)], int(0))
            .add_ge(vec![int(0), int(0)], int(-1));
        let out = lp.solve();
        assert_eq!(out.optimum, Some(int(1)));
        assert_eq!(lp.dual_value(&out.certificate), Some(int(1)));

        let mut bad = LinearProgram::new(vec![int(1)], Sense::Minimize);
        bad.add_eq(vec![int(0)], int(2));
        let out = bad.solve();
        assert_eq!(out.status, Status::Infeasible);
        assert!(bad.certifies_infeasibility(&out.certificate));
    }

    fn small() -> impl Strategy<Value = Rational> {
        (-4i64..=4, 1i64..=3).prop_map(|(n, d)| rat(n, d))
    }

    fn random_lp() -> impl Strategy<Value = LinearProgram> {
        (1usize..=3, 0usize..=2, 0usize..=3, any::<bool>()).prop_flat_map(|(n, ne, ng, max)| {
            (
                prop::collection::vec(small(), n),
                prop::collection::vec((prop::collection::vec(small(), n), small()), ne),
                prop::collection::vec((prop::collection::vec(small(), n), small()), ng),
                prop::collection::vec(0u8..4, n),
            )
                .prop_map(move |(c, eqs, ges, kinds)| {
                    let sense = if max { Sense::Maximize } else { Sense::Minimize };
                    let mut lp = LinearProgram::new(c, sense);
                    for (a, b) in eqs {
                        lp.add_eq(a, b);
                    }
                    for (a, b) in ges {
                        lp.add_ge(a, b);
                    }
                    for (j, k) in kinds.into_iter().enumerate() {
                        match k {
                            0 => {}
                            1 => {
                                lp.set_free(j);
                            }
                            2 => {
                                lp.set_bounds(j, None, Some(int(2)));
                            }
                            _ => {
                                lp.set_bounds(j, Some(int(-1)), Some(int(3)));
                            }
                        }
                    }
                    lp
                })
        })
    }

    proptest! {
        #[test]
        fn every_outcome_is_certified(lp in random_lp()) {
            let out = lp.solve();
            match out.status {
                Status::Optimal => {
                    prop_assert!(lp.is_feasible(&out.primal));
                    let opt = out.optimum.clone().unwrap();
                    prop_assert_eq!(lp.value(&out.primal), opt.clone());
                    prop_assert_eq!(lp.dual_value(&out.certificate), Some(opt));
                }
                Status::Infeasible => prop_assert!(lp.certifies_infeasibility(&out.certificate)),
                Status::Unbounded => prop_assert!(lp.certifies_unboundedness(&out.certificate)),
            }
        }

        #[test]
        fn optimum_ignores_row_order(lp in random_lp()) {
            let mut flipped = lp.clone();
            flipped.eq.reverse();
            flipped.ge.reverse();
            let (a, b) = (lp.solve(), flipped.solve());
            prop_assert_eq!(a.status, b.status);
            prop_assert_eq!(a.optimum, b.optimum);
        }
    }
}
