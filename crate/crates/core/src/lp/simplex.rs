//! Two-phase tableau simplex with Bland's rule.

use num_traits::{One, Signed, Zero};

use super::{LinearProgram, LpOutcome, Sense, Status};
use crate::rational::Rational;

/// How an original variable is expressed through nonnegative columns.
enum VarMap {
    /// `x = off + y`
    Shift { col: usize, off: Rational },
    /// `x = off - y`
    Neg { col: usize, off: Rational },
    /// `x = y⁺ - y⁻`
    Split { pos: usize, neg: usize },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Eq,
    Ge,
}

struct StdRow {
    coeffs: Vec<Rational>,
    rhs: Rational,
    kind: Kind,
    /// Index into the certificate layout (eq rows then ge rows), or `None`
    /// for rows generated from upper bounds.
    origin: Option<usize>,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    z: Vec<Rational>,
    /// Negated objective value.
    z_rhs: Rational,
}

impl Tableau {
    fn pivot(&mut self, r: usize, j: usize) {
        let inv = self.rows[r][j].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        self.rhs[r] *= &inv;
        let (prow, prhs) = (self.rows[r].clone(), self.rhs[r].clone());
        let nz: Vec<usize> = (0..prow.len()).filter(|&k| !prow[k].is_zero()).collect();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][j].is_zero() {
                continue;
            }
            let f = self.rows[i][j].clone();
            for &k in &nz {
                let d = &f * &prow[k];
                self.rows[i][k] -= d;
            }
            self.rhs[i] -= &f * &prhs;
        }
        if !self.z[j].is_zero() {
            let f = self.z[j].clone();
            for &k in &nz {
                let d = &f * &prow[k];
                self.z[k] -= d;
            }
            self.z_rhs -= &f * &prhs;
        }
        self.basis[r] = j;
    }

    fn price(&mut self, cost: &[Rational]) {
        self.z = cost.to_vec();
        self.z_rhs = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            for (k, v) in self.rows[i].iter().enumerate() {
                if !v.is_zero() {
                    self.z[k] -= &cost[b] * v;
                }
            }
            self.z_rhs -= &cost[b] * &self.rhs[i];
        }
    }

    /// Runs Bland's rule over columns `< limit`. Returns the entering column
    /// of an unbounded direction on failure.
    fn optimize(&mut self, limit: usize) -> Result<(), usize> {
        loop {
            let Some(j) = (0..limit).find(|&k| self.z[k].is_negative()) else {
                return Ok(());
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][j].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.rows[i][j];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, j),
                None => return Err(j),
            }
        }
    }
}

pub(super) fn solve(lp: &LinearProgram) -> LpOutcome {
    let n = lp.num_vars();
    let n_cert = lp.eq.len() + lp.ge.len();

    let mut maps = Vec::with_capacity(n);
    let mut ns = 0;
    let mut bound_rows: Vec<(usize, Rational)> = Vec::new();
    for b in &lp.bounds {
        match (&b.lower, &b.upper) {
            (Some(l), up) => {
                if let Some(u) = up {
                    bound_rows.push((ns, l - u));
                }
                maps.push(VarMap::Shift { col: ns, off: l.clone() });
                ns += 1;
            }
            (None, Some(u)) => {
                maps.push(VarMap::Neg { col: ns, off: u.clone() });
                ns += 1;
            }
            (None, None) => {
                maps.push(VarMap::Split { pos: ns, neg: ns + 1 });
                ns += 2;
            }
        }
    }

    let substitute = |coeffs: &[Rational], rhs: &Rational| -> (Vec<Rational>, Rational) {
        let mut out = vec![Rational::zero(); ns];
        let mut r = rhs.clone();
        for (a, m) in coeffs.iter().zip(&maps) {
            if a.is_zero() {
                continue;
            }
            match m {
                VarMap::Shift { col, off } => {
                    out[*col] += a;
                    r -= a * off;
                }
                VarMap::Neg { col, off } => {
                    out[*col] -= a;
                    r -= a * off;
                }
                VarMap::Split { pos, neg } => {
                    out[*pos] += a;
                    out[*neg] -= a;
                }
            }
        }
        (out, r)
    };

    let sign = match lp.sense {
        Sense::Minimize => Rational::one(),
        Sense::Maximize => -Rational::one(),
    };
    let min_obj: Vec<Rational> = lp.objective.iter().map(|c| c * &sign).collect();
    let (cost_std, _) = substitute(&min_obj, &Rational::zero());

    let mut std_rows = Vec::new();
    let originals = lp
        .eq
        .iter()
        .map(|r| (r, Kind::Eq))
        .chain(lp.ge.iter().map(|r| (r, Kind::Ge)));
    for (idx, (row, kind)) in originals.enumerate() {
        let (coeffs, rhs) = substitute(&row.coeffs, &row.rhs);
        if coeffs.iter().all(|c| c.is_zero()) {
            let violated = match kind {
                Kind::Eq => !rhs.is_zero(),
                Kind::Ge => rhs.is_positive(),
            };
            if violated {
                let mut cert = vec![Rational::zero(); n_cert];
                cert[idx] = rhs.signum();
                return LpOutcome {
                    status: Status::Infeasible,
                    optimum: None,
                    primal: Vec::new(),
                    certificate: cert,
                };
            }
            continue;
        }
        std_rows.push(StdRow { coeffs, rhs, kind, origin: Some(idx) });
    }
    for (col, rhs) in bound_rows {
        let mut coeffs = vec![Rational::zero(); ns];
        coeffs[col] = -Rational::one();
        std_rows.push(StdRow { coeffs, rhs, kind: Kind::Ge, origin: None });
    }

    let m = std_rows.len();
    let n_surplus = std_rows.iter().filter(|r| r.kind == Kind::Ge).count();
    let nn = ns + n_surplus;
    let width = nn + m;

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut row_sign = Vec::with_capacity(m);
    let mut surplus = ns;
    for (i, r) in std_rows.iter().enumerate() {
        let mut t = vec![Rational::zero(); width];
        t[..ns].clone_from_slice(&r.coeffs);
        if r.kind == Kind::Ge {
            t[surplus] = -Rational::one();
            surplus += 1;
        }
        let mut b = r.rhs.clone();
        let s = if b.is_negative() {
            for x in t[..nn].iter_mut() {
                *x = -x.clone();
            }
            b = -b;
            -Rational::one()
        } else {
            Rational::one()
        };
        t[nn + i] = Rational::one();
        rows.push(t);
        rhs.push(b);
        row_sign.push(s);
    }

    let mut tab = Tableau {
        rows,
        rhs,
        basis: (nn..width).collect(),
        z: Vec::new(),
        z_rhs: Rational::zero(),
    };

    // Phase I: minimise the sum of artificials.
    let mut phase1 = vec![Rational::zero(); width];
    for c in phase1[nn..].iter_mut() {
        *c = Rational::one();
    }
    tab.price(&phase1);
    tab.optimize(width)
        .expect("phase one objective is bounded below by zero");

    let multipliers = |z: &[Rational], phase_cost: &Rational| -> Vec<Rational> {
        let mut cert = vec![Rational::zero(); n_cert];
        for (k, r) in std_rows.iter().enumerate() {
            if let Some(o) = r.origin {
                let y = phase_cost - &z[nn + k];
                cert[o] += &row_sign[k] * y;
            }
        }
        cert
    };

    if tab.z_rhs.is_negative() {
        return LpOutcome {
            status: Status::Infeasible,
            optimum: None,
            primal: Vec::new(),
            certificate: multipliers(&tab.z, &Rational::one()),
        };
    }

    // Drive remaining artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= nn {
            if let Some(j) = (0..nn).find(|&k| !tab.rows[i][k].is_zero()) {
                tab.pivot(i, j);
            } else {
                tab.rows.remove(i);
                tab.rhs.remove(i);
                tab.basis.remove(i);
                continue;
            }
        }
        i += 1;
    }

    // Phase II.
    let mut cost = vec![Rational::zero(); width];
    cost[..ns].clone_from_slice(&cost_std);
    tab.price(&cost);
    if let Err(j) = tab.optimize(nn) {
        let mut dir = vec![Rational::zero(); width];
        dir[j] = Rational::one();
        for (i, &b) in tab.basis.iter().enumerate() {
            dir[b] = -tab.rows[i][j].clone();
        }
        let ray = maps
            .iter()
            .map(|m| match m {
                VarMap::Shift { col, .. } => dir[*col].clone(),
                VarMap::Neg { col, .. } => -dir[*col].clone(),
                VarMap::Split { pos, neg } => &dir[*pos] - &dir[*neg],
            })
            .collect();
        return LpOutcome {
            status: Status::Unbounded,
            optimum: None,
            primal: Vec::new(),
            certificate: ray,
        };
    }

    let mut y = vec![Rational::zero(); width];
    for (i, &b) in tab.basis.iter().enumerate() {
        y[b] = tab.rhs[i].clone();
    }
    let primal: Vec<Rational> = maps
        .iter()
        .map(|m| match m {
            VarMap::Shift { col, off } => off + &y[*col],
            VarMap::Neg { col, off } => off - &y[*col],
            VarMap::Split { pos, neg } => &y[*pos] - &y[*neg],
        })
        .collect();
    let optimum = lp.value(&primal);
    let mut dual = multipliers(&tab.z, &Rational::zero());
    if lp.sense == Sense::Maximize {
        for v in dual.iter_mut() {
            *v = -v.clone();
        }
    }
    LpOutcome {
        status: Status::Optimal,
        optimum: Some(optimum),
        primal,
        certificate: dual,
    }
}
