//! Small dense linear programming via the two-phase primal simplex method
//! with Bland's pivoting rule (anti-cycling, fully deterministic).
//!
//! Problems in this crate have at most a few hundred variables, so a dense
//! tableau is simpler and fast enough. Variables may carry finite or
//! infinite bounds; free variables are split internally.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
struct VarDef {
    obj: f64,
    lb: f64,
    ub: f64,
}

#[derive(Clone, Debug)]
struct RowDef {
    coeffs: Vec<(usize, f64)>,
    cmp: Cmp,
    rhs: f64,
}

/// Outcome of a solve. `x` and `value` are meaningful only for `Optimal`.
#[derive(Clone, Debug)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub value: f64,
}

impl LpOutcome {
    /// Unwrap an optimal solution, turning other statuses into errors.
    pub fn optimal(self, context: &str) -> Result<(Vec<f64>, f64)> {
        match self.status {
            LpStatus::Optimal => Ok((self.x, self.value)),
            status => Err(Error::Lp {
                status,
                context: context.to_string(),
            }),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    maximize: bool,
    vars: Vec<VarDef>,
    rows: Vec<RowDef>,
}

const EPS: f64 = 1e-9;
const PHASE1_TOL: f64 = 1e-7;

impl LinearProgram {
    pub fn minimize() -> Self {
        LinearProgram {
            maximize: false,
            ..Default::default()
        }
    }

    pub fn maximize() -> Self {
        LinearProgram {
            maximize: true,
            ..Default::default()
        }
    }

    /// Add a variable with objective coefficient `obj` and bounds
    /// `lb <= x <= ub`. Use `f64::NEG_INFINITY` / `f64::INFINITY` for
    /// unbounded sides.
    pub fn add_var(&mut self, obj: f64, lb: f64, ub: f64) -> usize {
        assert!(lb <= ub, "variable bounds crossed");
        self.vars.push(VarDef { obj, lb, ub });
        self.vars.len() - 1
    }

    pub fn add_row(&mut self, cmp: Cmp, rhs: f64, coeffs: &[(usize, f64)]) {
        for &(v, _) in coeffs {
            assert!(v < self.vars.len(), "row references unknown variable");
        }
        self.rows.push(RowDef {
            coeffs: coeffs.to_vec(),
            cmp,
            rhs,
        });
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        // Map user variables onto nonnegative standard-form columns.
        // Finite lower bound: shift. Free: split into a difference.
        #[derive(Clone, Copy)]
        enum ColMap {
            Shifted { col: usize, lb: f64 },
            Split { pos: usize, neg: usize },
        }
        let mut maps = Vec::with_capacity(self.vars.len());
        let mut n_struct = 0usize;
        for v in &self.vars {
            if v.lb.is_finite() {
                maps.push(ColMap::Shifted {
                    col: n_struct,
                    lb: v.lb,
                });
                n_struct += 1;
            } else {
                maps.push(ColMap::Split {
                    pos: n_struct,
                    neg: n_struct + 1,
                });
                n_struct += 2;
            }
        }

        // Objective over structural columns (minimization form).
        let sign = if self.maximize { -1.0 } else { 1.0 };
        let mut cost = vec![0.0; n_struct];
        let mut obj_shift = 0.0;
        for (v, m) in self.vars.iter().zip(&maps) {
            match *m {
                ColMap::Shifted { col, lb } => {
                    cost[col] = sign * v.obj;
                    obj_shift += v.obj * lb;
                }
                ColMap::Split { pos, neg } => {
                    cost[pos] = sign * v.obj;
                    cost[neg] = -sign * v.obj;
                }
            }
        }

        // Assemble rows: user rows plus upper-bound rows.
        struct StdRow {
            coeffs: Vec<f64>,
            cmp: Cmp,
            rhs: f64,
        }
        let mut std_rows = Vec::new();
        let mut push_row = |coeffs: Vec<f64>, cmp: Cmp, rhs: f64| {
            std_rows.push(StdRow { coeffs, cmp, rhs });
        };
        for row in &self.rows {
            let mut coeffs = vec![0.0; n_struct];
            let mut rhs = row.rhs;
            for &(v, c) in &row.coeffs {
                match maps[v] {
                    ColMap::Shifted { col, lb } => {
                        coeffs[col] += c;
                        rhs -= c * lb;
                    }
                    ColMap::Split { pos, neg } => {
                        coeffs[pos] += c;
                        coeffs[neg] -= c;
                    }
                }
            }
            push_row(coeffs, row.cmp, rhs);
        }
        for (v, m) in self.vars.iter().zip(&maps) {
            if v.ub.is_finite() {
                let mut coeffs = vec![0.0; n_struct];
                let rhs = match *m {
                    ColMap::Shifted { col, lb } => {
                        coeffs[col] = 1.0;
                        v.ub - lb
                    }
                    ColMap::Split { pos, neg } => {
                        coeffs[pos] = 1.0;
                        coeffs[neg] = -1.0;
                        v.ub
                    }
                };
                push_row(coeffs, Cmp::Le, rhs);
            }
        }

        let m = std_rows.len();
        // Count extra columns: slack for Le, surplus for Ge, artificial for
        // Ge/Eq rows (after rhs sign normalization).
        for r in std_rows.iter_mut() {
            if r.rhs < 0.0 {
                r.rhs = -r.rhs;
                r.coeffs.iter_mut().for_each(|c| *c = -*c);
                r.cmp = match r.cmp {
                    Cmp::Le => Cmp::Ge,
                    Cmp::Ge => Cmp::Le,
                    Cmp::Eq => Cmp::Eq,
                };
            }
        }
        let n_slack = std_rows
            .iter()
            .filter(|r| matches!(r.cmp, Cmp::Le | Cmp::Ge))
            .count();
        let n_art = std_rows
            .iter()
            .filter(|r| matches!(r.cmp, Cmp::Ge | Cmp::Eq))
            .count();
        let ncols = n_struct + n_slack + n_art;
        let art_start = n_struct + n_slack;

        // Tableau rows: [coeffs | rhs]; objective row maintained separately.
        let mut a = vec![vec![0.0; ncols + 1]; m];
        let mut basis = vec![0usize; m];
        let mut slack_i = n_struct;
        let mut art_i = art_start;
        for (i, r) in std_rows.iter().enumerate() {
            a[i][..n_struct].copy_from_slice(&r.coeffs);
            a[i][ncols] = r.rhs;
            match r.cmp {
                Cmp::Le => {
                    a[i][slack_i] = 1.0;
                    basis[i] = slack_i;
                    slack_i += 1;
                }
                Cmp::Ge => {
                    a[i][slack_i] = -1.0;
                    slack_i += 1;
                    a[i][art_i] = 1.0;
                    basis[i] = art_i;
                    art_i += 1;
                }
                Cmp::Eq => {
                    a[i][art_i] = 1.0;
                    basis[i] = art_i;
                    art_i += 1;
                }
            }
        }

        let iter_limit = 20_000 + 200 * (m + ncols);

        // Phase 1: minimize the sum of artificials.
        if n_art > 0 {
            let mut obj = vec![0.0; ncols + 1];
            for j in art_start..ncols {
                obj[j] = 1.0;
            }
            for i in 0..m {
                if basis[i] >= art_start {
                    for j in 0..=ncols {
                        obj[j] -= a[i][j];
                    }
                }
            }
            match run_simplex(&mut a, &mut basis, &mut obj, ncols, ncols, iter_limit)? {
                SimplexEnd::Optimal => {}
                SimplexEnd::Unbounded => {
                    // Phase 1 is bounded below by zero; treat as failure.
                    return Err(Error::InvalidParam {
                        what: "phase-1 simplex reported unbounded".into(),
                    });
                }
            }
            let phase1 = -obj[ncols];
            if phase1 > PHASE1_TOL {
                return Ok(LpOutcome {
                    status: LpStatus::Infeasible,
                    x: Vec::new(),
                    value: f64::NAN,
                });
            }
            // Drive artificials out of the basis where possible. Rows that
            // cannot pivot are redundant and stay at value zero.
            for i in 0..m {
                if basis[i] >= art_start {
                    if let Some(j) = (0..art_start).find(|&j| a[i][j].abs() > EPS) {
                        pivot(&mut a, &mut basis, &mut vec![0.0; ncols + 1], i, j);
                    }
                }
            }
        }

        // Phase 2: real objective, artificial columns banned.
        let mut obj = vec![0.0; ncols + 1];
        obj[..n_struct].copy_from_slice(&cost);
        for i in 0..m {
            let b = basis[i];
            if b < n_struct && cost[b] != 0.0 {
                let cb = cost[b];
                for j in 0..=ncols {
                    obj[j] -= cb * a[i][j];
                }
            }
        }
        match run_simplex(&mut a, &mut basis, &mut obj, art_start, ncols, iter_limit)? {
            SimplexEnd::Optimal => {}
            SimplexEnd::Unbounded => {
                return Ok(LpOutcome {
                    status: LpStatus::Unbounded,
                    x: Vec::new(),
                    value: f64::NAN,
                });
            }
        }

        // Extract the structural solution and map back to user variables.
        let mut y = vec![0.0; ncols];
        for i in 0..m {
            y[basis[i]] = a[i][ncols].max(0.0);
        }
        let mut x = vec![0.0; self.vars.len()];
        for (k, m) in maps.iter().enumerate() {
            x[k] = match *m {
                ColMap::Shifted { col, lb } => lb + y[col],
                ColMap::Split { pos, neg } => y[pos] - y[neg],
            };
        }
        let value: f64 = obj_shift
            + self
                .vars
                .iter()
                .zip(&x)
                .map(|(v, &xi)| v.obj * (xi - if v.lb.is_finite() { v.lb } else { 0.0 }))
                .sum::<f64>();
        Ok(LpOutcome {
            status: LpStatus::Optimal,
            x,
            value,
        })
    }

    /// Largest violation of the stored rows and bounds at `x` (for checks).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for v in self.vars.iter().zip(x) {
            let (def, &xi) = v;
            if def.lb.is_finite() {
                worst = worst.max(def.lb - xi);
            }
            if def.ub.is_finite() {
                worst = worst.max(xi - def.ub);
            }
        }
        for row in &self.rows {
            let lhs: f64 = row.coeffs.iter().map(|&(v, c)| c * x[v]).sum();
            let gap = match row.cmp {
                Cmp::Le => lhs - row.rhs,
                Cmp::Ge => row.rhs - lhs,
                Cmp::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(gap);
        }
        worst
    }
}

enum SimplexEnd {
    Optimal,
    Unbounded,
}

/// Bland's rule: entering column is the smallest index with negative
/// reduced cost, leaving row is the ratio-test winner with the smallest
/// basis index on ties.
fn run_simplex(
    a: &mut [Vec<f64>],
    basis: &mut [usize],
    obj: &mut Vec<f64>,
    enterable: usize,
    ncols: usize,
    iter_limit: usize,
) -> Result<SimplexEnd> {
    let m = a.len();
    for _ in 0..iter_limit {
        let Some(enter) = (0..enterable).find(|&j| obj[j] < -EPS) else {
            return Ok(SimplexEnd::Optimal);
        };
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            let aij = a[i][enter];
            if aij > EPS {
                let ratio = a[i][ncols] / aij;
                let better = ratio < best_ratio - EPS
                    || (ratio < best_ratio + EPS
                        && leave.is_some_and(|l| basis[i] < basis[l]));
                if leave.is_none() || better {
                    if ratio < best_ratio {
                        best_ratio = ratio;
                    }
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            return Ok(SimplexEnd::Unbounded);
        };
        pivot_with_obj(a, basis, obj, r, enter);
    }
    Err(Error::InvalidParam {
        what: "simplex iteration limit exceeded".into(),
    })
}

fn pivot_with_obj(
    a: &mut [Vec<f64>],
    basis: &mut [usize],
    obj: &mut [f64],
    r: usize,
    c: usize,
) {
    let ncols = a[0].len() - 1;
    let piv = a[r][c];
    for j in 0..=ncols {
        a[r][j] /= piv;
    }
    a[r][c] = 1.0;
    for i in 0..a.len() {
        if i != r && a[i][c].abs() > 0.0 {
            let f = a[i][c];
            for j in 0..=ncols {
                a[i][j] -= f * a[r][j];
            }
            a[i][c] = 0.0;
        }
    }
    if obj[c].abs() > 0.0 {
        let f = obj[c];
        for j in 0..=ncols {
            obj[j] -= f * a[r][j];
        }
        obj[c] = 0.0;
    }
    basis[r] = c;
}

fn pivot(a: &mut [Vec<f64>], basis: &mut [usize], obj: &mut Vec<f64>, r: usize, c: usize) {
    pivot_with_obj(a, basis, obj, r, c);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn textbook_max() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18, x,y >= 0 -> 36.
        let mut lp = LinearProgram::maximize();
        let x = lp.add_var(3.0, 0.0, f64::INFINITY);
        let y = lp.add_var(5.0, 0.0, f64::INFINITY);
        lp.add_row(Cmp::Le, 4.0, &[(x, 1.0)]);
        lp.add_row(Cmp::Le, 12.0, &[(y, 2.0)]);
        lp.add_row(Cmp::Le, 18.0, &[(x, 3.0), (y, 2.0)]);
        let out = lp.solve().unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_close(out.value, 36.0, 1e-9);
        assert_close(out.x[x], 2.0, 1e-9);
        assert_close(out.x[y], 6.0, 1e-9);
        assert!(lp.violation(&out.x) <= 1e-8);
    }

    #[test]
    fn equality_and_ge_rows() {
        // min 2x + 3y + 4z s.t. x + y + z = 10, x - y >= 2, z >= 1.
        let mut lp = LinearProgram::minimize();
        let x = lp.add_var(2.0, 0.0, f64::INFINITY);
        let y = lp.add_var(3.0, 0.0, f64::INFINITY);
        let z = lp.add_var(4.0, 1.0, f64::INFINITY);
        lp.add_row(Cmp::Eq, 10.0, &[(x, 1.0), (y, 1.0), (z, 1.0)]);
        lp.add_row(Cmp::Ge, 2.0, &[(x, 1.0), (y, -1.0)]);
        let out = lp.solve().unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        // Optimal: x = 9, y = 0, z = 1 -> 22.
        assert_close(out.value, 22.0, 1e-8);
        assert!(lp.violation(&out.x) <= 1e-8);
    }

    #[test]
    fn free_variable_split() {
        // max g s.t. g <= 3 - x, g <= 1 + x, x in [0, 1]; optimum x=1, g=2.
        let mut lp = LinearProgram::maximize();
        let g = lp.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
        let x = lp.add_var(0.0, 0.0, 1.0);
        lp.add_row(Cmp::Le, 3.0, &[(g, 1.0), (x, 1.0)]);
        lp.add_row(Cmp::Le, 1.0, &[(g, 1.0), (x, -1.0)]);
        let out = lp.solve().unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_close(out.value, 2.0, 1e-9);
        assert_close(out.x[x], 1.0, 1e-9);
    }

    #[test]
    fn negative_lower_bounds_shift() {
        // min x + y over x in [-2, 5], y in [-1, 1] with x + y >= 0.
        let mut lp = LinearProgram::minimize();
        let x = lp.add_var(1.0, -2.0, 5.0);
        let y = lp.add_var(1.0, -1.0, 1.0);
        lp.add_row(Cmp::Ge, 0.0, &[(x, 1.0), (y, 1.0)]);
        let out = lp.solve().unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_close(out.value, 0.0, 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        let mut lp = LinearProgram::minimize();
        let x = lp.add_var(1.0, 0.0, f64::INFINITY);
        lp.add_row(Cmp::Le, 1.0, &[(x, 1.0)]);
        lp.add_row(Cmp::Ge, 2.0, &[(x, 1.0)]);
        let out = lp.solve().unwrap();
        assert_eq!(out.status, LpStatus::Infeasible);
        assert!(out.optimal("test").is_err());
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::maximize();
        let x = lp.add_var(1.0, 0.0, f64::INFINITY);
        let y = lp.add_var(0.0, 0.0, f64::INFINITY);
        lp.add_row(Cmp::Ge, 0.0, &[(x, 1.0), (y, 1.0)]);
        let out = lp.solve().unwrap();
        assert_eq!(out.status, LpStatus::Unbounded);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Klee-Minty-ish degenerate rows; Bland must terminate.
        let mut lp = LinearProgram::maximize();
        let x = lp.add_var(1.0, 0.0, f64::INFINITY);
        let y = lp.add_var(1.0, 0.0, f64::INFINITY);
        let z = lp.add_var(1.0, 0.0, f64::INFINITY);
        lp.add_row(Cmp::Le, 0.0, &[(x, 1.0), (y, -1.0)]);
        lp.add_row(Cmp::Le, 0.0, &[(y, 1.0), (z, -1.0)]);
        lp.add_row(Cmp::Le, 1.0, &[(x, 1.0), (y, 1.0), (z, 1.0)]);
        let out = lp.solve().unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_close(out.value, 1.0, 1e-9);
    }

    #[test]
    fn redundant_equalities_ok() {
        let mut lp = LinearProgram::maximize();
        let x = lp.add_var(1.0, 0.0, 2.0);
        let y = lp.add_var(1.0, 0.0, 2.0);
        lp.add_row(Cmp::Eq, 2.0, &[(x, 1.0), (y, 1.0)]);
        lp.add_row(Cmp::Eq, 4.0, &[(x, 2.0), (y, 2.0)]);
        let out = lp.solve().unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_close(out.value, 2.0, 1e-8);
    }

    #[test]
    fn random_lps_feasible_and_beat_sampled_points() {
        // Optimality sanity: the simplex value must dominate every sampled
        // feasible point, and the returned point must satisfy all rows.
        let mut rng = crate::rng::StreamRng::new(1234);
        for case in 0..40 {
            let n = 2 + (case % 3);
            let mut lp = LinearProgram::maximize();
            let vars: Vec<usize> = (0..n)
                .map(|_| lp.add_var(rng.next_f64() * 2.0 - 1.0, 0.0, 1.0))
                .collect();
            for _ in 0..(1 + case % 3) {
                let coeffs: Vec<(usize, f64)> = vars
                    .iter()
                    .map(|&v| (v, rng.next_f64() * 2.0 - 0.5))
                    .collect();
                lp.add_row(Cmp::Le, 0.5 + rng.next_f64(), &coeffs);
            }
            let out = lp.solve().unwrap();
            assert_eq!(out.status, LpStatus::Optimal, "case {case}");
            assert!(lp.violation(&out.x) <= 1e-8);
            let objective: Vec<f64> = (0..n).map(|i| lp.vars[i].obj).collect();
            for _ in 0..200 {
                let cand: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
                if lp.violation(&cand) <= 0.0 {
                    let val: f64 = objective.iter().zip(&cand).map(|(o, c)| o * c).sum();
                    assert!(val <= out.value + 1e-7, "sampled point beats LP");
                }
            }
        }
    }
}
