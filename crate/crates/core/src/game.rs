//! Core game representation: instances with affine utilities, principal and
//! agent strategies, utility evaluation, best-response sets, and the
//! translation between signaling schemes and posterior decompositions.
//!
//! All types are immutable after construction and all operations are pure.

use crate::error::{Error, Result};
use crate::space::{dot, linf_dist, DecisionSpace};

/// Tolerance for probability sums.
pub const PROB_TOL: f64 = 1e-9;
/// Tolerance for the mean constraint on principal strategies (ℓ∞).
pub const MEAN_TOL: f64 = 1e-8;
/// Tie tolerance in best-response comparisons.
pub const TIE_TOL: f64 = 1e-12;

/// Affine payoff `off[a] + lin[a]·x`, one row per action.
#[derive(Clone, Debug, PartialEq)]
pub struct PayoffTable {
    lin: Vec<Vec<f64>>,
    off: Vec<f64>,
}

impl PayoffTable {
    /// Build from per-action linear parts (each of length `dim`) and offsets.
    pub fn new(lin: Vec<Vec<f64>>, off: Vec<f64>) -> Result<Self> {
        if lin.len() != off.len() {
            return Err(Error::DimensionMismatch {
                axis: "actions",
                expected: lin.len(),
                got: off.len(),
            });
        }
        let dim = lin.first().map_or(0, Vec::len);
        if lin.iter().any(|l| l.len() != dim) {
            return Err(Error::InvalidParam {
                what: "ragged payoff matrix".into(),
            });
        }
        Ok(PayoffTable { lin, off })
    }

    /// Build from a state-major matrix (`dim` rows, one column per action)
    /// with zero offsets.
    pub fn from_state_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let n_actions = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_actions) {
            return Err(Error::InvalidParam {
                what: "ragged state matrix".into(),
            });
        }
        let lin = (0..n_actions)
            .map(|a| (0..dim).map(|i| rows[i][a]).collect())
            .collect();
        Ok(PayoffTable {
            lin,
            off: vec![0.0; n_actions],
        })
    }

    pub fn n_actions(&self) -> usize {
        self.off.len()
    }

    pub fn dim(&self) -> usize {
        self.lin.first().map_or(0, Vec::len)
    }

    #[inline]
    pub fn eval(&self, x: &[f64], action: usize) -> f64 {
        self.off[action] + dot(&self.lin[action], x)
    }

    pub fn linear(&self, action: usize) -> &[f64] {
        &self.lin[action]
    }

    pub fn offset(&self, action: usize) -> f64 {
        self.off[action]
    }

    /// State-major rows (only meaningful when offsets are zero).
    pub fn to_state_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.n_actions()).map(|a| self.lin[a][i]).collect())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeanConstraint {
    None,
    /// The strategy's decision mean must equal this feasible point.
    MeanEquals(Vec<f64>),
}

/// A generalized principal-agent game: decision space, finite agent actions,
/// affine utilities for both players, and an optional mean constraint.
#[derive(Clone, Debug)]
pub struct Instance {
    pub space: DecisionSpace,
    pub actions: Vec<String>,
    pub n_signals: usize,
    pub principal: PayoffTable,
    pub agent: PayoffTable,
    pub constraint: MeanConstraint,
}

impl Instance {
    pub fn new(
        space: DecisionSpace,
        actions: Vec<String>,
        n_signals: usize,
        principal: PayoffTable,
        agent: PayoffTable,
        constraint: MeanConstraint,
    ) -> Result<Self> {
        let n = actions.len();
        if n == 0 {
            return Err(Error::InvalidParam {
                what: "instance needs at least one action".into(),
            });
        }
        for (name, table) in [("principal", &principal), ("agent", &agent)] {
            if table.n_actions() != n {
                return Err(Error::DimensionMismatch {
                    axis: "actions",
                    expected: n,
                    got: table.n_actions(),
                });
            }
            if table.dim() != space.dim() {
                return Err(Error::InvalidParam {
                    what: format!(
                        "{name} payoff dimension {} does not match space dimension {}",
                        table.dim(),
                        space.dim()
                    ),
                });
            }
        }
        if n_signals < n {
            return Err(Error::InvalidParam {
                what: format!("n_signals {n_signals} must be at least |A| = {n}"),
            });
        }
        if let MeanConstraint::MeanEquals(c0) = &constraint {
            space.check_point(c0)?;
        }
        Ok(Instance {
            space,
            actions,
            n_signals,
            principal,
            agent,
            constraint,
        })
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    #[inline]
    pub fn u(&self, x: &[f64], action: usize) -> f64 {
        self.principal.eval(x, action)
    }

    #[inline]
    pub fn v(&self, x: &[f64], action: usize) -> f64 {
        self.agent.eval(x, action)
    }

    /// Bound B on |u| over the decision space and all actions.
    pub fn principal_bound(&self) -> f64 {
        self.payoff_bound(&self.principal)
    }

    /// Bound on |v|, used for reward-range declarations.
    pub fn agent_bound(&self) -> f64 {
        self.payoff_bound(&self.agent)
    }

    fn payoff_bound(&self, table: &PayoffTable) -> f64 {
        (0..table.n_actions())
            .map(|a| {
                let (lo, hi) = self
                    .space
                    .affine_range(table.linear(a), table.offset(a));
                lo.abs().max(hi.abs())
            })
            .fold(0.0f64, f64::max)
    }

    /// Lipschitz constant of u in the space's norm (max dual norm over actions).
    pub fn principal_lipschitz(&self) -> f64 {
        (0..self.n_actions())
            .map(|a| self.space.dual_norm(self.principal.linear(a)))
            .fold(0.0f64, f64::max)
    }

    pub fn mean_target(&self) -> Option<&[f64]> {
        match &self.constraint {
            MeanConstraint::None => None,
            MeanConstraint::MeanEquals(c0) => Some(c0),
        }
    }

    /// Validate a principal strategy: probabilities, feasibility, signal
    /// budget, and the mean constraint when present. Constructions are
    /// allowed to exceed the signal budget via `allow_extra_signals`.
    pub fn validate_strategy(
        &self,
        strategy: &PrincipalStrategy,
        allow_extra_signals: bool,
    ) -> Result<()> {
        if strategy.signals.is_empty() {
            return Err(Error::InvalidParam {
                what: "strategy has no signals".into(),
            });
        }
        if !allow_extra_signals && strategy.signals.len() > self.n_signals {
            return Err(Error::InvalidParam {
                what: format!(
                    "strategy uses {} signals, instance allows {}",
                    strategy.signals.len(),
                    self.n_signals
                ),
            });
        }
        let total: f64 = strategy.signals.iter().map(|s| s.prob).sum();
        if (total - 1.0).abs() > PROB_TOL || strategy.signals.iter().any(|s| s.prob < -PROB_TOL)
        {
            return Err(Error::InvalidDistribution {
                what: "signal probabilities".into(),
                sum: total,
            });
        }
        for s in &strategy.signals {
            self.space.check_point(&s.decision)?;
        }
        if let Some(c0) = self.mean_target() {
            let mean = strategy.mean();
            let err = linf_dist(&mean, c0);
            if err > MEAN_TOL {
                return Err(Error::Infeasible {
                    what: format!("strategy mean deviates from target by {err:.3e}"),
                });
            }
        }
        Ok(())
    }

    pub fn validate_agent_strategy(&self, rho: &AgentStrategy) -> Result<()> {
        for row in &rho.rows {
            if row.len() != self.n_actions() {
                return Err(Error::DimensionMismatch {
                    axis: "actions",
                    expected: self.n_actions(),
                    got: row.len(),
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > PROB_TOL || row.iter().any(|&p| p < -PROB_TOL) {
                return Err(Error::InvalidDistribution {
                    what: "agent action distribution".into(),
                    sum,
                });
            }
        }
        Ok(())
    }
}

/// One signal of a principal strategy: probability and associated decision.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalPoint {
    pub prob: f64,
    pub decision: Vec<f64>,
}

/// Finite signal distribution with one decision per signal.
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalStrategy {
    pub signals: Vec<SignalPoint>,
}

impl PrincipalStrategy {
    pub fn new(signals: Vec<SignalPoint>) -> Self {
        PrincipalStrategy { signals }
    }

    /// Point mass on a single decision.
    pub fn point(decision: Vec<f64>) -> Self {
        PrincipalStrategy {
            signals: vec![SignalPoint {
                prob: 1.0,
                decision,
            }],
        }
    }

    pub fn n_signals(&self) -> usize {
        self.signals.len()
    }

    /// Mean decision Σ_s π_s x_s.
    pub fn mean(&self) -> Vec<f64> {
        let dim = self.signals.first().map_or(0, |s| s.decision.len());
        let mut mean = vec![0.0; dim];
        for s in &self.signals {
            for (m, &x) in mean.iter_mut().zip(&s.decision) {
                *m += s.prob * x;
            }
        }
        mean
    }

    pub fn probs(&self) -> Vec<f64> {
        self.signals.iter().map(|s| s.prob).collect()
    }
}

/// Map from signals to distributions over actions.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentStrategy {
    pub rows: Vec<Vec<f64>>,
}

impl AgentStrategy {
    pub fn new(rows: Vec<Vec<f64>>) -> Self {
        AgentStrategy { rows }
    }

    /// Deterministic strategy: one action per signal.
    pub fn point_masses(choices: &[usize], n_actions: usize) -> Self {
        let rows = choices
            .iter()
            .map(|&a| {
                let mut row = vec![0.0; n_actions];
                row[a] = 1.0;
                row
            })
            .collect();
        AgentStrategy { rows }
    }

    pub fn uniform(n_signals: usize, n_actions: usize) -> Self {
        AgentStrategy {
            rows: vec![vec![1.0 / n_actions as f64; n_actions]; n_signals],
        }
    }

    pub fn n_signals(&self) -> usize {
        self.rows.len()
    }

    /// True when every row is a point mass (within `tol`).
    pub fn is_deterministic(&self, tol: f64) -> bool {
        self.rows
            .iter()
            .all(|row| row.iter().any(|&p| (p - 1.0).abs() <= tol))
    }
}

fn check_shared_signals(pi: &PrincipalStrategy, rho: &AgentStrategy) -> Result<()> {
    if pi.n_signals() != rho.n_signals() {
        return Err(Error::DimensionMismatch {
            axis: "signals",
            expected: pi.n_signals(),
            got: rho.n_signals(),
        });
    }
    Ok(())
}

/// Expected principal utility U(π, ρ) = Σ_s π_s Σ_a ρ(a|s) u(x_s, a).
pub fn principal_utility(
    inst: &Instance,
    pi: &PrincipalStrategy,
    rho: &AgentStrategy,
) -> Result<f64> {
    check_shared_signals(pi, rho)?;
    expected_utility(&inst.principal, pi, rho)
}

/// Expected agent utility V(π, ρ) = Σ_s π_s Σ_a ρ(a|s) v(x_s, a).
pub fn agent_utility(
    inst: &Instance,
    pi: &PrincipalStrategy,
    rho: &AgentStrategy,
) -> Result<f64> {
    check_shared_signals(pi, rho)?;
    expected_utility(&inst.agent, pi, rho)
}

fn expected_utility(
    table: &PayoffTable,
    pi: &PrincipalStrategy,
    rho: &AgentStrategy,
) -> Result<f64> {
    let n_actions = table.n_actions();
    let mut total = 0.0;
    for (s, row) in pi.signals.iter().zip(&rho.rows) {
        if row.len() != n_actions {
            return Err(Error::DimensionMismatch {
                axis: "actions",
                expected: n_actions,
                got: row.len(),
            });
        }
        for (a, &p) in row.iter().enumerate() {
            if p != 0.0 {
                total += s.prob * p * table.eval(&s.decision, a);
            }
        }
    }
    Ok(total)
}

/// Agent's best-response value max_a v(x, a).
pub fn best_response_value(inst: &Instance, x: &[f64]) -> f64 {
    (0..inst.n_actions())
        .map(|a| inst.v(x, a))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// All actions within `delta` of optimal at decision `x`:
/// {a : v(x,a) >= max_a' v(x,a') - delta}, with a 1e-12 tie tolerance.
/// Ties are reported as sets; breaking them is the caller's policy.
pub fn best_response_set(inst: &Instance, x: &[f64], delta: f64) -> Result<Vec<usize>> {
    if delta < 0.0 {
        return Err(Error::InvalidParam {
            what: format!("delta must be nonnegative, got {delta}"),
        });
    }
    inst.space.check_point(x)?;
    let best = best_response_value(inst, x);
    Ok((0..inst.n_actions())
        .filter(|&a| inst.v(x, a) >= best - delta - TIE_TOL)
        .collect())
}

/// Persuasion game: states with a prior, and state-by-action utilities for
/// sender (principal) and receiver (agent).
#[derive(Clone, Debug, PartialEq)]
pub struct PersuasionInstance {
    pub states: Vec<String>,
    pub prior: Vec<f64>,
    pub actions: Vec<String>,
    pub n_signals: usize,
    /// `sender[state][action]`
    pub sender: Vec<Vec<f64>>,
    /// `receiver[state][action]`
    pub receiver: Vec<Vec<f64>>,
}

impl PersuasionInstance {
    pub fn new(
        states: Vec<String>,
        prior: Vec<f64>,
        actions: Vec<String>,
        n_signals: usize,
        sender: Vec<Vec<f64>>,
        receiver: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n_states = states.len();
        let n_actions = actions.len();
        if prior.len() != n_states {
            return Err(Error::DimensionMismatch {
                axis: "states",
                expected: n_states,
                got: prior.len(),
            });
        }
        let sum: f64 = prior.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL || prior.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidDistribution {
                what: "prior".into(),
                sum,
            });
        }
        for (name, m) in [("sender_u", &sender), ("receiver_v", &receiver)] {
            if m.len() != n_states {
                return Err(Error::DimensionMismatch {
                    axis: "states",
                    expected: n_states,
                    got: m.len(),
                });
            }
            if m.iter().any(|row| row.len() != n_actions) {
                return Err(Error::InvalidParam {
                    what: format!("{name} has a row of wrong length"),
                });
            }
        }
        if n_signals < n_actions {
            return Err(Error::InvalidParam {
                what: format!("n_signals {n_signals} must be at least |A| = {n_actions}"),
            });
        }
        Ok(PersuasionInstance {
            states,
            prior,
            actions,
            n_signals,
            sender,
            receiver,
        })
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    /// Smallest prior probability.
    pub fn p0(&self) -> f64 {
        self.prior.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Embed as a generalized instance: decisions are posterior beliefs,
    /// the mean constraint pins their average to the prior.
    pub fn to_generalized(&self) -> Result<Instance> {
        Instance::new(
            DecisionSpace::simplex(self.n_states())?,
            self.actions.clone(),
            self.n_signals,
            PayoffTable::from_state_rows(&self.sender)?,
            PayoffTable::from_state_rows(&self.receiver)?,
            MeanConstraint::MeanEquals(self.prior.clone()),
        )
    }
}

/// Convert a signaling scheme (row-stochastic `scheme[state][signal]`) into
/// the posterior decomposition {(π_s, μ_s)}. Signals with total probability
/// below 1e-12 are dropped.
pub fn scheme_to_decomposition(
    p: &PersuasionInstance,
    scheme: &[Vec<f64>],
) -> Result<PrincipalStrategy> {
    let n_states = p.n_states();
    if scheme.len() != n_states {
        return Err(Error::DimensionMismatch {
            axis: "states",
            expected: n_states,
            got: scheme.len(),
        });
    }
    let n_signals = scheme.first().map_or(0, Vec::len);
    for row in scheme {
        if row.len() != n_signals {
            return Err(Error::InvalidParam {
                what: "ragged scheme matrix".into(),
            });
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL || row.iter().any(|&q| q < -1e-12) {
            return Err(Error::InvalidDistribution {
                what: "scheme row".into(),
                sum,
            });
        }
    }
    let mut signals = Vec::new();
    for s in 0..n_signals {
        let total: f64 = (0..n_states).map(|w| p.prior[w] * scheme[w][s]).sum();
        if total < 1e-12 {
            continue;
        }
        let posterior: Vec<f64> = (0..n_states)
            .map(|w| p.prior[w] * scheme[w][s] / total)
            .collect();
        signals.push(SignalPoint {
            prob: total,
            decision: posterior,
        });
    }
    Ok(PrincipalStrategy::new(signals))
}

/// Convert a posterior decomposition back into a signaling scheme,
/// `scheme[state][signal] = π_s μ_s(state) / μ0(state)`. Rejects strategies
/// whose mean deviates from the prior by more than 1e-6.
pub fn decomposition_to_scheme(
    p: &PersuasionInstance,
    pi: &PrincipalStrategy,
) -> Result<Vec<Vec<f64>>> {
    let mean = pi.mean();
    if mean.len() != p.n_states() {
        return Err(Error::DimensionMismatch {
            axis: "states",
            expected: p.n_states(),
            got: mean.len(),
        });
    }
    let deviation = linf_dist(&mean, &p.prior);
    if deviation > 1e-6 {
        return Err(Error::BayesPlausibility {
            deviation,
            limit: 1e-6,
        });
    }
    let k = pi.n_signals();
    let mut scheme = vec![vec![0.0; k]; p.n_states()];
    for (s, sig) in pi.signals.iter().enumerate() {
        for w in 0..p.n_states() {
            if p.prior[w] > 0.0 {
                scheme[w][s] = sig.prob * sig.decision[w] / p.prior[w];
            }
        }
    }
    // Rows sum to 1 up to the plausibility slack; renormalize the drift away.
    for row in scheme.iter_mut() {
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidDistribution {
                what: "derived scheme row".into(),
                sum,
            });
        }
        if sum > 0.0 {
            row.iter_mut().for_each(|q| *q /= sum);
        }
    }
    Ok(scheme)
}
