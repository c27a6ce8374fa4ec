//! Exact small-scale optimization: Stackelberg value, inducibility gap,
//! and the inner δ-best-response minimization/maximization problems.
//!
//! All solves reduce to small dense LPs. Outer searches over principal
//! strategies live in `objectives`.

use crate::error::{Error, Result};
use crate::game::{
    best_response_set, best_response_value, AgentStrategy, Instance, PrincipalStrategy,
    SignalPoint,
};
use crate::lp::{Cmp, LinearProgram};
use crate::space::{DecisionSpace, SpaceNorm};

/// Static quantities of an instance used by the robustness bounds.
#[derive(Clone, Debug)]
pub struct InstanceAnalysis {
    /// Principal's optimal utility against an exact best responder with
    /// favorable tie-breaking.
    pub u_star: f64,
    /// Inducibility gap: the largest margin by which every action can be
    /// made strictly optimal. Nonpositive iff some action is weakly
    /// dominated.
    pub gap: f64,
    /// Per-action decisions certifying the gap.
    pub anchors: Vec<Vec<f64>>,
    /// Bound on |u| over the space.
    pub bound: f64,
    /// Lipschitz constant of u in the space's norm.
    pub lipschitz: f64,
    pub diameter: f64,
    /// Conservative distance from the mean target to the boundary: for a
    /// simplex this is the smallest coordinate of the target (the exact ℓ1
    /// distance is twice that; bounds use the conservative value).
    pub dist_to_boundary: Option<f64>,
    /// Exact boundary distance in the paired norm.
    pub dist_to_boundary_exact: Option<f64>,
    pub norm: SpaceNorm,
    pub witness: (PrincipalStrategy, AgentStrategy),
}

pub fn analyze(inst: &Instance) -> Result<InstanceAnalysis> {
    let (u_star, witness) = stackelberg_value(inst)?;
    let (gap, anchors) = inducibility_gap(inst)?;
    let (dist_cons, dist_exact) = match inst.mean_target() {
        None => (None, None),
        Some(c0) => {
            let exact = inst.space.boundary_distance(c0);
            let cons = match inst.space {
                DecisionSpace::Simplex { .. } => {
                    c0.iter().cloned().fold(f64::INFINITY, f64::min)
                }
                DecisionSpace::Box { .. } => exact,
            };
            (Some(cons), Some(exact))
        }
    };
    Ok(InstanceAnalysis {
        u_star,
        gap,
        anchors,
        bound: inst.principal_bound(),
        lipschitz: inst.principal_lipschitz(),
        diameter: inst.space.diameter(),
        dist_to_boundary: dist_cons,
        dist_to_boundary_exact: dist_exact,
        norm: inst.space.norm(),
        witness,
    })
}

impl std::fmt::Display for InstanceAnalysis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "u_star     = {:.9}", self.u_star)?;
        writeln!(f, "gap        = {:.9}", self.gap)?;
        writeln!(f, "bound_B    = {:.9}", self.bound)?;
        writeln!(f, "lipschitz  = {:.9}", self.lipschitz)?;
        writeln!(f, "diameter   = {:.9} ({})", self.diameter, self.norm)?;
        match (self.dist_to_boundary, self.dist_to_boundary_exact) {
            (Some(c), Some(e)) => {
                writeln!(f, "dist_bound = {c:.9} (conservative), {e:.9} (exact)")?
            }
            _ => writeln!(f, "dist_bound = n/a (unconstrained)")?,
        }
        for (a, y) in self.anchors.iter().enumerate() {
            writeln!(f, "anchor[{a}]  = {y:?}")?;
        }
        Ok(())
    }
}

fn add_space_var_block(lp: &mut LinearProgram, space: &DecisionSpace) -> Vec<usize> {
    match space {
        DecisionSpace::Simplex { dim } => {
            let vars: Vec<usize> = (0..*dim)
                .map(|_| lp.add_var(0.0, 0.0, f64::INFINITY))
                .collect();
            let coeffs: Vec<(usize, f64)> = vars.iter().map(|&v| (v, 1.0)).collect();
            lp.add_row(Cmp::Eq, 1.0, &coeffs);
            vars
        }
        DecisionSpace::Box { lo, hi } => lo
            .iter()
            .zip(hi)
            .map(|(&l, &h)| lp.add_var(0.0, l, h))
            .collect(),
    }
}

/// Stackelberg value: the principal's optimum against an exactly
/// best-responding agent, ties broken in the principal's favor.
///
/// Unconstrained: per action `a`, maximize u(x, a) subject to the incentive
/// rows v(x,a) >= v(x,a') over the space; the witness is a point mass on
/// the best action's solution. With a mean constraint the lifted LP in
/// variables y_a = π_a x_a solves all actions jointly.
pub fn stackelberg_value(
    inst: &Instance,
) -> Result<(f64, (PrincipalStrategy, AgentStrategy))> {
    match inst.mean_target() {
        None => stackelberg_unconstrained(inst),
        Some(c0) => stackelberg_mean_constrained(inst, c0),
    }
}

fn stackelberg_unconstrained(
    inst: &Instance,
) -> Result<(f64, (PrincipalStrategy, AgentStrategy))> {
    let n = inst.n_actions();
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    for a in 0..n {
        let mut lp = LinearProgram::maximize();
        let xs = match &inst.space {
            DecisionSpace::Simplex { dim } => {
                let vars: Vec<usize> = (0..*dim)
                    .map(|i| lp.add_var(inst.principal.linear(a)[i], 0.0, f64::INFINITY))
                    .collect();
                let coeffs: Vec<(usize, f64)> = vars.iter().map(|&v| (v, 1.0)).collect();
                lp.add_row(Cmp::Eq, 1.0, &coeffs);
                vars
            }
            DecisionSpace::Box { lo, hi } => (0..lo.len())
                .map(|i| lp.add_var(inst.principal.linear(a)[i], lo[i], hi[i]))
                .collect(),
        };
        for b in 0..n {
            if b == a {
                continue;
            }
            let coeffs: Vec<(usize, f64)> = xs
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, inst.agent.linear(a)[i] - inst.agent.linear(b)[i]))
                .collect();
            lp.add_row(
                Cmp::Ge,
                inst.agent.offset(b) - inst.agent.offset(a),
                &coeffs,
            );
        }
        let out = lp.solve()?;
        if out.status != crate::lp::LpStatus::Optimal {
            continue; // action not inducible
        }
        let value = out.value + inst.principal.offset(a);
        let x: Vec<f64> = xs.iter().map(|&v| out.x[v]).collect();
        if best.as_ref().is_none_or(|(bv, _, _)| value > *bv) {
            best = Some((value, a, x));
        }
    }
    let (value, action, x) = best.ok_or_else(|| Error::Infeasible {
        what: "no agent action is inducible".into(),
    })?;
    let pi = PrincipalStrategy::point(x);
    let rho = AgentStrategy::point_masses(&[action], n);
    Ok((value, (pi, rho)))
}

fn stackelberg_mean_constrained(
    inst: &Instance,
    c0: &[f64],
) -> Result<(f64, (PrincipalStrategy, AgentStrategy))> {
    let n = inst.n_actions();
    let d = inst.space.dim();
    let mut lp = LinearProgram::maximize();
    match &inst.space {
        DecisionSpace::Simplex { .. } => {
            // y[a][i] >= 0 with sum_a y_a = c0; π_a = sum_i y[a][i].
            let mut y = vec![vec![0usize; d]; n];
            for (a, ya) in y.iter_mut().enumerate() {
                for (i, slot) in ya.iter_mut().enumerate() {
                    *slot = lp.add_var(
                        inst.principal.linear(a)[i] + inst.principal.offset(a),
                        0.0,
                        f64::INFINITY,
                    );
                }
            }
            for i in 0..d {
                let coeffs: Vec<(usize, f64)> = (0..n).map(|a| (y[a][i], 1.0)).collect();
                lp.add_row(Cmp::Eq, c0[i], &coeffs);
            }
            for a in 0..n {
                for b in 0..n {
                    if b == a {
                        continue;
                    }
                    let voff = inst.agent.offset(a) - inst.agent.offset(b);
                    let coeffs: Vec<(usize, f64)> = (0..d)
                        .map(|i| {
                            (
                                y[a][i],
                                inst.agent.linear(a)[i] - inst.agent.linear(b)[i] + voff,
                            )
                        })
                        .collect();
                    lp.add_row(Cmp::Ge, 0.0, &coeffs);
                }
            }
            let (x_opt, value) = lp.solve()?.optimal("stackelberg (mean-constrained)")?;
            let mut signals = Vec::new();
            let mut rho_actions = Vec::new();
            for a in 0..n {
                let prob: f64 = (0..d).map(|i| x_opt[y[a][i]]).sum();
                if prob > 1e-12 {
                    let decision: Vec<f64> =
                        (0..d).map(|i| x_opt[y[a][i]] / prob).collect();
                    signals.push(SignalPoint { prob, decision });
                    rho_actions.push(a);
                }
            }
            let pi = PrincipalStrategy::new(signals);
            let rho = AgentStrategy::point_masses(&rho_actions, n);
            Ok((value, (pi, rho)))
        }
        DecisionSpace::Box { lo, hi } => {
            // Explicit signal weights needed: box coordinates do not sum to
            // 1, so π_a cannot be recovered from y_a. Bounds on y follow
            // from π_a*lo <= y_a <= π_a*hi with π_a in [0, 1].
            let pi_vars: Vec<usize> = (0..n)
                .map(|a| lp.add_var(inst.principal.offset(a), 0.0, f64::INFINITY))
                .collect();
            let mut y = vec![vec![0usize; d]; n];
            for (a, ya) in y.iter_mut().enumerate() {
                for (i, slot) in ya.iter_mut().enumerate() {
                    *slot = lp.add_var(
                        inst.principal.linear(a)[i],
                        lo[i].min(0.0),
                        hi[i].max(0.0),
                    );
                }
            }
            let coeffs: Vec<(usize, f64)> = pi_vars.iter().map(|&v| (v, 1.0)).collect();
            lp.add_row(Cmp::Eq, 1.0, &coeffs);
            for i in 0..d {
                let coeffs: Vec<(usize, f64)> = (0..n).map(|a| (y[a][i], 1.0)).collect();
                lp.add_row(Cmp::Eq, c0[i], &coeffs);
            }
            for a in 0..n {
                for i in 0..d {
                    lp.add_row(Cmp::Ge, 0.0, &[(y[a][i], 1.0), (pi_vars[a], -lo[i])]);
                    lp.add_row(Cmp::Le, 0.0, &[(y[a][i], 1.0), (pi_vars[a], -hi[i])]);
                }
                for b in 0..n {
                    if b == a {
                        continue;
                    }
                    let mut coeffs: Vec<(usize, f64)> = (0..d)
                        .map(|i| {
                            (y[a][i], inst.agent.linear(a)[i] - inst.agent.linear(b)[i])
                        })
                        .collect();
                    coeffs.push((pi_vars[a], inst.agent.offset(a) - inst.agent.offset(b)));
                    lp.add_row(Cmp::Ge, 0.0, &coeffs);
                }
            }
            let (x_opt, value) = lp.solve()?.optimal("stackelberg (box, constrained)")?;
            let mut signals = Vec::new();
            let mut rho_actions = Vec::new();
            for a in 0..n {
                let prob = x_opt[pi_vars[a]];
                if prob > 1e-12 {
                    let decision: Vec<f64> =
                        (0..d).map(|i| x_opt[y[a][i]] / prob).collect();
                    signals.push(SignalPoint { prob, decision });
                    rho_actions.push(a);
                }
            }
            Ok((
                value,
                (
                    PrincipalStrategy::new(signals),
                    AgentStrategy::point_masses(&rho_actions, n),
                ),
            ))
        }
    }
}

/// Largest `G` such that every action can be made optimal by margin `G`,
/// together with the certifying anchor decision per action. A nonpositive
/// value signals a weakly dominated action and is returned, not raised.
/// A single-action instance has an unconstrained margin.
pub fn inducibility_gap(inst: &Instance) -> Result<(f64, Vec<Vec<f64>>)> {
    let n = inst.n_actions();
    if n == 1 {
        return Ok((f64::INFINITY, vec![inst.space.center()]));
    }
    let margin_cap = 2.0 * inst.agent_bound() + 1.0;
    let mut gap = f64::INFINITY;
    let mut anchors = Vec::with_capacity(n);
    for a in 0..n {
        let mut lp = LinearProgram::maximize();
        let g = lp.add_var(1.0, -margin_cap, margin_cap);
        let xs = add_space_var_block(&mut lp, &inst.space);
        for b in 0..n {
            if b == a {
                continue;
            }
            let mut coeffs: Vec<(usize, f64)> = xs
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, inst.agent.linear(a)[i] - inst.agent.linear(b)[i]))
                .collect();
            coeffs.push((g, -1.0));
            lp.add_row(
                Cmp::Ge,
                inst.agent.offset(b) - inst.agent.offset(a),
                &coeffs,
            );
        }
        let (x_opt, value) = lp.solve()?.optimal("inducibility gap")?;
        gap = gap.min(value);
        anchors.push(xs.iter().map(|&v| x_opt[v]).collect());
    }
    Ok((gap, anchors))
}

fn support(pi: &PrincipalStrategy) -> Vec<usize> {
    pi.signals
        .iter()
        .enumerate()
        .filter(|(_, s)| s.prob > 1e-15)
        .map(|(i, _)| i)
        .collect()
}

/// Exact best-response value V(π, ρ*) = Σ_s π_s max_a v(x_s, a).
pub fn exact_best_response_value(inst: &Instance, pi: &PrincipalStrategy) -> f64 {
    pi.signals
        .iter()
        .map(|s| s.prob * best_response_value(inst, &s.decision))
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Direction {
    Minimize,
    Maximize,
}

/// Worst-case (for the principal) δ-best response to `pi`.
///
/// Randomized: the LP over row-stochastic ρ with the aggregate constraint
/// V(π,ρ*) − V(π,ρ) <= δ. Deterministic: per signal, the δ-optimal action
/// minimizing u.
pub fn worst_case_delta_br(
    inst: &Instance,
    pi: &PrincipalStrategy,
    delta: f64,
    randomized: bool,
) -> Result<(AgentStrategy, f64)> {
    delta_br(inst, pi, delta, randomized, Direction::Minimize)
}

/// Best-case (for the principal) δ-best response to `pi`.
pub fn best_case_delta_br(
    inst: &Instance,
    pi: &PrincipalStrategy,
    delta: f64,
    randomized: bool,
) -> Result<(AgentStrategy, f64)> {
    delta_br(inst, pi, delta, randomized, Direction::Maximize)
}

fn delta_br(
    inst: &Instance,
    pi: &PrincipalStrategy,
    delta: f64,
    randomized: bool,
    dir: Direction,
) -> Result<(AgentStrategy, f64)> {
    if delta < 0.0 {
        return Err(Error::InvalidParam {
            what: format!("delta must be nonnegative, got {delta}"),
        });
    }
    if randomized {
        delta_br_randomized(inst, pi, delta, dir)
    } else {
        delta_br_deterministic(inst, pi, delta, dir)
    }
}

fn delta_br_deterministic(
    inst: &Instance,
    pi: &PrincipalStrategy,
    delta: f64,
    dir: Direction,
) -> Result<(AgentStrategy, f64)> {
    let n = inst.n_actions();
    let mut choices = Vec::with_capacity(pi.n_signals());
    let mut value = 0.0;
    for s in &pi.signals {
        let set = best_response_set(inst, &s.decision, delta)?;
        let pick = match dir {
            Direction::Minimize => set
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    inst.u(&s.decision, a)
                        .partial_cmp(&inst.u(&s.decision, b))
                        .unwrap()
                })
                .unwrap(),
            Direction::Maximize => set
                .iter()
                .copied()
                .max_by(|&a, &b| {
                    inst.u(&s.decision, a)
                        .partial_cmp(&inst.u(&s.decision, b))
                        .unwrap()
                })
                .unwrap(),
        };
        choices.push(pick);
        value += s.prob * inst.u(&s.decision, pick);
    }
    Ok((AgentStrategy::point_masses(&choices, n), value))
}

fn delta_br_randomized(
    inst: &Instance,
    pi: &PrincipalStrategy,
    delta: f64,
    dir: Direction,
) -> Result<(AgentStrategy, f64)> {
    let n = inst.n_actions();
    let supp = support(pi);
    let v_star = exact_best_response_value(inst, pi);
    let mut lp = match dir {
        Direction::Minimize => LinearProgram::minimize(),
        Direction::Maximize => LinearProgram::maximize(),
    };
    // rho[k][a] for supported signals only; dead signals get uniform rows.
    let mut vars = vec![vec![0usize; n]; supp.len()];
    for (k, &s) in supp.iter().enumerate() {
        let sig = &pi.signals[s];
        for (a, slot) in vars[k].iter_mut().enumerate() {
            *slot = lp.add_var(sig.prob * inst.u(&sig.decision, a), 0.0, f64::INFINITY);
        }
    }
    for row in &vars {
        let coeffs: Vec<(usize, f64)> = row.iter().map(|&v| (v, 1.0)).collect();
        lp.add_row(Cmp::Eq, 1.0, &coeffs);
    }
    let mut v_coeffs = Vec::with_capacity(supp.len() * n);
    for (k, &s) in supp.iter().enumerate() {
        let sig = &pi.signals[s];
        for a in 0..n {
            v_coeffs.push((vars[k][a], sig.prob * inst.v(&sig.decision, a)));
        }
    }
    lp.add_row(Cmp::Ge, v_star - delta, &v_coeffs);
    let (x, value) = lp.solve()?.optimal("delta-best-response")?;
    let mut rows = vec![vec![1.0 / n as f64; n]; pi.n_signals()];
    for (k, &s) in supp.iter().enumerate() {
        let mut row: Vec<f64> = (0..n).map(|a| x[vars[k][a]].max(0.0)).collect();
        let sum: f64 = row.iter().sum();
        if sum > 0.0 {
            row.iter_mut().for_each(|p| *p /= sum);
        }
        rows[s] = row;
    }
    Ok((AgentStrategy::new(rows), value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{principal_utility, PersuasionInstance};
    use crate::testutil::binary_opt_strategy;
    use crate::instances::{
        binary_persuasion, contract_instance, mean_exploit_instance, stackelberg_bimatrix,
        ContractRemedy,
    };

    fn binary(mu0: f64) -> Instance {
        binary_persuasion(mu0).unwrap().to_generalized().unwrap()
    }

    #[test]
    fn stackelberg_value_binary_benchmark() {
        let inst = binary(0.3);
        let (u_star, (pi, rho)) = stackelberg_value(&inst).unwrap();
        assert!((u_star - 0.6).abs() < 1e-9);
        inst.validate_strategy(&pi, false).unwrap();
        // Witness value matches.
        let direct = principal_utility(&inst, &pi, &rho).unwrap();
        assert!((direct - u_star).abs() < 1e-9);
        // The optimal decomposition splits into posteriors 1/2 and 0.
        let mut firsts: Vec<f64> = pi.signals.iter().map(|s| s.decision[0]).collect();
        firsts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(firsts[0].abs() < 1e-9);
        assert!((firsts[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn stackelberg_value_mean_exploit_is_zero() {
        let inst = mean_exploit_instance(0.04)
            .unwrap()
            .to_generalized()
            .unwrap();
        let (u_star, _) = stackelberg_value(&inst).unwrap();
        assert!(u_star.abs() < 1e-9);
    }

    #[test]
    fn stackelberg_value_constant_payoff() {
        let p = PersuasionInstance::new(
            vec!["s0".into(), "s1".into()],
            vec![0.4, 0.6],
            vec!["x".into(), "y".into()],
            3,
            vec![vec![0.7, 0.7], vec![0.7, 0.7]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let (u_star, _) = stackelberg_value(&p.to_generalized().unwrap()).unwrap();
        assert!((u_star - 0.7).abs() < 1e-9);
    }

    #[test]
    fn stackelberg_value_unconstrained_bimatrix() {
        // Leader commits first: in matching pennies the follower then wins,
        // leader value is 0 at the uniform commitment.
        let inst = stackelberg_bimatrix(
            vec![vec![1.0, -1.0], vec![-1.0, 1.0]],
            vec![vec![-1.0, 1.0], vec![1.0, -1.0]],
        )
        .unwrap();
        let (u_star, (pi, _)) = stackelberg_value(&inst).unwrap();
        assert!(u_star.abs() < 1e-9);
        assert_eq!(pi.n_signals(), 1);

        // Grid oracle at 1e-3 as an independent check.
        let mut grid_best = f64::NEG_INFINITY;
        for k in 0..=1000 {
            let x = [k as f64 / 1000.0, 1.0 - k as f64 / 1000.0];
            let set = best_response_set(&inst, &x, 0.0).unwrap();
            let val = set
                .iter()
                .map(|&a| inst.u(&x, a))
                .fold(f64::NEG_INFINITY, f64::max);
            grid_best = grid_best.max(val);
        }
        assert!((u_star - grid_best).abs() < 2e-3);
    }

    #[test]
    fn stackelberg_value_contract_box() {
        let inst = contract_instance(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![1.0, 0.0],
            vec![0.1, 0.0],
            ContractRemedy::BoundedPayment { cap: 1.0 },
        )
        .unwrap();
        // Optimal contract pays just the cost difference on outcome 0:
        // x = (0.1, 0), agent takes a0, principal gets 1 - 0.1 = 0.9.
        let (u_star, (pi, rho)) = stackelberg_value(&inst).unwrap();
        assert!((u_star - 0.9).abs() < 1e-9);
        assert_eq!(rho.rows[0][0], 1.0);
        assert!((pi.signals[0].decision[0] - 0.1).abs() < 1e-9);
    }

    #[test]
    fn gap_binary_benchmark() {
        let inst = binary(0.3);
        let (gap, anchors) = inducibility_gap(&inst).unwrap();
        assert!((gap - 1.0).abs() < 1e-9);
        // Anchors at the degenerate posteriors.
        assert!((anchors[0][0] - 1.0).abs() < 1e-9);
        assert!((anchors[1][0] - 0.0).abs() < 1e-9);

        // 1e-4 grid oracle over posteriors.
        let mut grid_gap = f64::INFINITY;
        for a in 0..2 {
            let mut best = f64::NEG_INFINITY;
            for k in 0..=10_000 {
                let x = [k as f64 / 10_000.0, 1.0 - k as f64 / 10_000.0];
                let margin = (0..2)
                    .filter(|&b| b != a)
                    .map(|b| inst.v(&x, a) - inst.v(&x, b))
                    .fold(f64::INFINITY, f64::min);
                best = best.max(margin);
            }
            grid_gap = grid_gap.min(best);
        }
        assert!((gap - grid_gap).abs() < 1e-6);
    }

    #[test]
    fn gap_duplicate_column_nonpositive() {
        let p = PersuasionInstance::new(
            vec!["s0".into(), "s1".into()],
            vec![0.5, 0.5],
            vec!["x".into(), "y".into()],
            3,
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![0.3, 0.3], vec![-0.2, -0.2]],
        )
        .unwrap();
        let (gap, _) = inducibility_gap(&p.to_generalized().unwrap()).unwrap();
        assert!(gap <= 1e-9);
    }

    #[test]
    fn gap_mean_exploit_grid_check() {
        let inst = mean_exploit_instance(0.04)
            .unwrap()
            .to_generalized()
            .unwrap();
        let (gap, _) = inducibility_gap(&inst).unwrap();
        assert!(gap > 0.0);
        assert!((gap - 0.2).abs() < 1e-9, "gap should equal sqrt(gamma)");

        let mut grid_gap = f64::INFINITY;
        for a in 0..3 {
            let mut best = f64::NEG_INFINITY;
            for k in 0..=10_000 {
                let x = [k as f64 / 10_000.0, 1.0 - k as f64 / 10_000.0];
                let margin = (0..3)
                    .filter(|&b| b != a)
                    .map(|b| inst.v(&x, a) - inst.v(&x, b))
                    .fold(f64::INFINITY, f64::min);
                best = best.max(margin);
            }
            grid_gap = grid_gap.min(best);
        }
        assert!((gap - grid_gap).abs() < 2e-4);
    }

    #[test]
    fn worst_case_zero_delta_breaks_ties_adversarially() {
        let inst = binary(0.3);
        let pi = binary_opt_strategy(0.3);
        let (_, value) = worst_case_delta_br(&inst, &pi, 0.0, true).unwrap();
        assert!(value.abs() < 1e-8, "tie at posterior 1/2 resolves to b");
        let (_, det) = worst_case_delta_br(&inst, &pi, 0.0, false).unwrap();
        assert!(det.abs() < 1e-12);
    }

    #[test]
    fn worst_case_huge_delta_ignores_incentives() {
        let inst = binary(0.3);
        let pi = binary_opt_strategy(0.3);
        let b = inst.agent_bound();
        let (_, value) = worst_case_delta_br(&inst, &pi, 2.0 * b + 1.0, true).unwrap();
        // Per-signal worst action is b everywhere: utility 0.
        assert!(value.abs() < 1e-8);
        let (rho, det) = worst_case_delta_br(&inst, &pi, 2.0 * b + 1.0, false).unwrap();
        assert!(det.abs() < 1e-12);
        assert!(rho.rows.iter().all(|r| r[1] == 1.0));
    }

    #[test]
    fn best_case_shifts_mass_at_dead_posterior() {
        let inst = binary(0.3);
        let pi = binary_opt_strategy(0.3);
        let (rho, value) = best_case_delta_br(&inst, &pi, 0.1, true).unwrap();
        assert!((value - 0.7).abs() < 1e-8, "U* + delta");
        // Mass delta/(1-2mu0) = 0.25 moves to action a at posterior 0.
        assert!((rho.rows[1][0] - 0.25).abs() < 1e-6);
    }

    #[test]
    fn best_case_zero_delta_equals_favorable_tie_value() {
        let inst = binary(0.3);
        let pi = binary_opt_strategy(0.3);
        let (_, value) = best_case_delta_br(&inst, &pi, 0.0, true).unwrap();
        assert!((value - 0.6).abs() < 1e-8);
        let (_, det) = best_case_delta_br(&inst, &pi, 0.0, false).unwrap();
        assert!((det - 0.6).abs() < 1e-12);
    }

    #[test]
    fn mean_exploit_no_info_zero() {
        let p = mean_exploit_instance(0.04).unwrap();
        let inst = p.to_generalized().unwrap();
        let pi = PrincipalStrategy::point(p.prior.clone());
        let (_, value) = best_case_delta_br(&inst, &pi, 0.0, true).unwrap();
        assert!(value.abs() < 1e-8);
    }

    #[test]
    fn worst_case_bound_on_grid_matches_analytic_cap() {
        // For every 2-posterior decomposition, the worst-case randomized
        // value at delta = 0.01 stays below 2mu0 - 2*sqrt(2*mu0*delta) + delta.
        let inst = binary(0.3);
        let cap = 0.6 - 2.0 * (2.0 * 0.3 * 0.01f64).sqrt() + 0.01;
        let mut seen_max = f64::NEG_INFINITY;
        for lo_k in 0..=6 {
            let mu1 = lo_k as f64 * 0.05;
            for hi_k in 0..=10 {
                let mu2 = 0.3 + hi_k as f64 * 0.07;
                if mu2 <= mu1 + 1e-9 || mu2 > 1.0 {
                    continue;
                }
                let w2 = (0.3 - mu1) / (mu2 - mu1);
                let pi = PrincipalStrategy::new(vec![
                    SignalPoint {
                        prob: 1.0 - w2,
                        decision: vec![mu1, 1.0 - mu1],
                    },
                    SignalPoint {
                        prob: w2,
                        decision: vec![mu2, 1.0 - mu2],
                    },
                ]);
                let (_, value) = worst_case_delta_br(&inst, &pi, 0.01, true).unwrap();
                seen_max = seen_max.max(value);
                assert!(value <= cap + 1e-6, "pi ({mu1},{mu2}) value {value} > {cap}");
            }
        }
        assert!(seen_max > 0.3, "grid should get reasonably close to the cap");
    }

    #[test]
    fn analysis_of_binary_benchmark() {
        let inst = binary(0.3);
        let a = analyze(&inst).unwrap();
        assert!((a.u_star - 0.6).abs() < 1e-9);
        assert!((a.gap - 1.0).abs() < 1e-9);
        assert!((a.bound - 1.0).abs() < 1e-12);
        assert!((a.lipschitz - 1.0).abs() < 1e-12);
        assert_eq!(a.diameter, 2.0);
        assert!((a.dist_to_boundary.unwrap() - 0.3).abs() < 1e-12);
        assert!((a.dist_to_boundary_exact.unwrap() - 0.6).abs() < 1e-12);
        // Anchors certify the gap.
        for (act, y) in a.anchors.iter().enumerate() {
            for b in 0..inst.n_actions() {
                if b != act {
                    assert!(inst.v(y, act) - inst.v(y, b) >= a.gap - 1e-9);
                }
            }
        }
    }
}
