//! Canonical instance builders: the 2-state persuasion benchmark, the
//! mean-based-exploit game, bimatrix Stackelberg embeddings, and the two
//! contract-design encodings. Also the `name:key=value` preset parser used
//! by the CLI and a seeded generator for small random test instances.

use crate::error::{Error, Result};
use crate::game::{Instance, MeanConstraint, PayoffTable, PersuasionInstance};
use crate::rng::StreamRng;
use crate::space::DecisionSpace;

/// Two states, two actions. The receiver wants the first action only when
/// the first state is likely; the sender always prefers the first action.
/// `mu0` is the prior probability of the first state and must lie in (0, 1/2).
pub fn binary_persuasion(mu0: f64) -> Result<PersuasionInstance> {
    if !(0.0 < mu0 && mu0 < 0.5) {
        return Err(Error::InvalidParam {
            what: format!("mu0 must lie in (0, 0.5), got {mu0}"),
        });
    }
    PersuasionInstance::new(
        vec!["good".into(), "bad".into()],
        vec![mu0, 1.0 - mu0],
        vec!["a".into(), "b".into()],
        3,
        vec![vec![1.0, 0.0], vec![1.0, 0.0]],
        vec![vec![1.0, 0.0], vec![-1.0, 0.0]],
    )
}

/// Two states, three actions, uniform prior. A best-responding receiver
/// caps the sender at zero, but a mean-based learner can be steered by a
/// two-phase flip of the signaling scheme. `gamma` scales the receiver's
/// reward for the first action in the first state and must lie in (0, 1).
pub fn mean_exploit_instance(gamma: f64) -> Result<PersuasionInstance> {
    if !(0.0 < gamma && gamma < 1.0) {
        return Err(Error::InvalidParam {
            what: format!("gamma must lie in (0, 1), got {gamma}"),
        });
    }
    PersuasionInstance::new(
        vec!["alpha".into(), "beta".into()],
        vec![0.5, 0.5],
        vec!["l".into(), "m".into(), "r".into()],
        4,
        vec![vec![0.0, 0.0, -2.0], vec![0.0, 0.0, 2.0]],
        vec![vec![gamma.sqrt(), -1.0, 0.0], vec![-1.0, 1.0, 0.0]],
    )
}

/// Stackelberg game: the principal mixes over its own finite action set, so
/// the decision space is the simplex over leader actions. `u_matrix` and
/// `v_matrix` are leader-action by follower-action payoff tables.
pub fn stackelberg_bimatrix(
    u_matrix: Vec<Vec<f64>>,
    v_matrix: Vec<Vec<f64>>,
) -> Result<Instance> {
    if u_matrix.len() != v_matrix.len()
        || u_matrix.first().map(Vec::len) != v_matrix.first().map(Vec::len)
    {
        return Err(Error::DimensionMismatch {
            axis: "leader actions",
            expected: u_matrix.len(),
            got: v_matrix.len(),
        });
    }
    let n_leader = u_matrix.len();
    let n_follower = u_matrix.first().map_or(0, Vec::len);
    Instance::new(
        DecisionSpace::simplex(n_leader)?,
        (0..n_follower).map(|a| format!("f{a}")).collect(),
        n_follower,
        PayoffTable::from_state_rows(&u_matrix)?,
        PayoffTable::from_state_rows(&v_matrix)?,
        MeanConstraint::None,
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ContractRemedy {
    /// Contracts pay per outcome, each payment capped at `cap`.
    BoundedPayment { cap: f64 },
    /// Decisions are per-action expected payments (requires linearly
    /// independent outcome distributions).
    ExpectedPayment,
}

/// Contract design. `outcome_probs[a][i]` is the probability of outcome `i`
/// under action `a`, `rewards[i]` the principal's reward for outcome `i`,
/// `costs[a]` the agent's cost of action `a`.
pub fn contract_instance(
    outcome_probs: Vec<Vec<f64>>,
    rewards: Vec<f64>,
    costs: Vec<f64>,
    remedy: ContractRemedy,
) -> Result<Instance> {
    let n_actions = outcome_probs.len();
    let d = rewards.len();
    if n_actions == 0 || d == 0 {
        return Err(Error::InvalidParam {
            what: "contract needs actions and outcomes".into(),
        });
    }
    if costs.len() != n_actions {
        return Err(Error::DimensionMismatch {
            axis: "actions",
            expected: n_actions,
            got: costs.len(),
        });
    }
    for row in &outcome_probs {
        if row.len() != d {
            return Err(Error::DimensionMismatch {
                axis: "outcomes",
                expected: d,
                got: row.len(),
            });
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || row.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidDistribution {
                what: "outcome distribution".into(),
                sum,
            });
        }
    }
    if costs.iter().any(|&c| c < 0.0) {
        return Err(Error::InvalidParam {
            what: "costs must be nonnegative".into(),
        });
    }
    let action_names: Vec<String> = (0..n_actions).map(|a| format!("a{a}")).collect();
    let expected_rewards: Vec<f64> = outcome_probs
        .iter()
        .map(|p| p.iter().zip(&rewards).map(|(pi, ri)| pi * ri).sum())
        .collect();

    match remedy {
        ContractRemedy::BoundedPayment { cap } => {
            if cap <= 0.0 {
                return Err(Error::InvalidParam {
                    what: "payment cap must be positive".into(),
                });
            }
            // u(x, a) = r~_a - p_a . x,   v(x, a) = p_a . x - c_a.
            let u = PayoffTable::new(
                outcome_probs
                    .iter()
                    .map(|p| p.iter().map(|&pi| -pi).collect())
                    .collect(),
                expected_rewards,
            )?;
            let v = PayoffTable::new(
                outcome_probs.clone(),
                costs.iter().map(|&c| -c).collect(),
            )?;
            Instance::new(
                DecisionSpace::boxed(vec![0.0; d], vec![cap; d])?,
                action_names,
                n_actions + 1,
                u,
                v,
                MeanConstraint::None,
            )
        }
        ContractRemedy::ExpectedPayment => {
            if !rows_linearly_independent(&outcome_probs) {
                return Err(Error::InvalidParam {
                    what: "expected-payment remedy needs linearly independent outcome \
                           distributions; use the bounded-payment remedy instead"
                        .into(),
                });
            }
            // Decisions are expected payments, one coordinate per action:
            // u(x~, a) = r~_a - x~_a,   v(x~, a) = x~_a - c_a.
            let r_bound = rewards.iter().fold(0.0f64, |m, &r| m.max(r.abs()));
            let mut u_lin = vec![vec![0.0; n_actions]; n_actions];
            let mut v_lin = vec![vec![0.0; n_actions]; n_actions];
            for a in 0..n_actions {
                u_lin[a][a] = -1.0;
                v_lin[a][a] = 1.0;
            }
            let u = PayoffTable::new(u_lin, expected_rewards)?;
            let v = PayoffTable::new(v_lin, costs.iter().map(|&c| -c).collect())?;
            Instance::new(
                DecisionSpace::boxed(vec![0.0; n_actions], vec![r_bound; n_actions])?,
                action_names,
                n_actions + 1,
                u,
                v,
                MeanConstraint::None,
            )
        }
    }
}

fn rows_linearly_independent(rows: &[Vec<f64>]) -> bool {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if m > n {
        return false;
    }
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let mut rank = 0;
    for col in 0..n {
        if rank == m {
            break;
        }
        let Some(pivot) = (rank..m).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        }) else {
            break;
        };
        if a[pivot][col].abs() < 1e-9 {
            continue;
        }
        a.swap(rank, pivot);
        let p = a[rank][col];
        for i in 0..m {
            if i != rank {
                let f = a[i][col] / p;
                for j in 0..n {
                    a[i][j] -= f * a[rank][j];
                }
            }
        }
        rank += 1;
    }
    rank == m
}

/// Instance loaded from a preset or file: the generalized form plus the
/// persuasion view when there is one.
#[derive(Clone, Debug)]
pub struct LoadedInstance {
    pub name: String,
    pub instance: Instance,
    pub persuasion: Option<PersuasionInstance>,
}

impl LoadedInstance {
    pub fn from_persuasion(name: &str, p: PersuasionInstance) -> Result<Self> {
        Ok(LoadedInstance {
            name: name.to_string(),
            instance: p.to_generalized()?,
            persuasion: Some(p),
        })
    }

    pub fn from_instance(name: &str, instance: Instance) -> Self {
        LoadedInstance {
            name: name.to_string(),
            instance,
            persuasion: None,
        }
    }
}

/// Parse a preset reference of the form `name` or `name:key=value,...`.
///
/// Known presets: `binary_persuasion:mu0=..`, `mean_exploit:gamma=..`,
/// `matching_pennies`, `contract_demo[:remedy=bounded|expected]`.
pub fn parse_preset(spec: &str) -> Result<LoadedInstance> {
    let (name, args) = match spec.split_once(':') {
        Some((n, a)) => (n, a),
        None => (spec, ""),
    };
    let mut params = std::collections::BTreeMap::new();
    for pair in args.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = pair.split_once('=').ok_or_else(|| Error::InvalidParam {
            what: format!("preset argument `{pair}` is not key=value"),
        })?;
        params.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get_f64 = |params: &std::collections::BTreeMap<String, String>,
                   key: &str,
                   default: f64|
     -> Result<f64> {
        match params.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| Error::InvalidParam {
                what: format!("preset argument {key}={v} is not a number"),
            }),
        }
    };
    match name {
        "binary_persuasion" => {
            let mu0 = get_f64(&params, "mu0", 0.3)?;
            LoadedInstance::from_persuasion(spec, binary_persuasion(mu0)?)
        }
        "mean_exploit" => {
            let gamma = get_f64(&params, "gamma", 0.04)?;
            LoadedInstance::from_persuasion(spec, mean_exploit_instance(gamma)?)
        }
        "matching_pennies" => {
            // Zero-sum-like 2x2 with a unique mixed commitment optimum.
            let u = vec![vec![1.0, -1.0], vec![-1.0, 1.0]];
            let v = vec![vec![-1.0, 1.0], vec![1.0, -1.0]];
            Ok(LoadedInstance::from_instance(
                spec,
                stackelberg_bimatrix(u, v)?,
            ))
        }
        "contract_demo" => {
            let remedy = match params.get("remedy").map(String::as_str) {
                None | Some("bounded") => ContractRemedy::BoundedPayment {
                    cap: get_f64(&params, "cap", 1.0)?,
                },
                Some("expected") => ContractRemedy::ExpectedPayment,
                Some(other) => {
                    return Err(Error::InvalidParam {
                        what: format!("unknown contract remedy `{other}`"),
                    })
                }
            };
            let inst = contract_instance(
                vec![vec![0.8, 0.2], vec![0.3, 0.7]],
                vec![1.0, 0.0],
                vec![0.1, 0.0],
                remedy,
            )?;
            Ok(LoadedInstance::from_instance(spec, inst))
        }
        other => Err(Error::InvalidParam {
            what: format!("unknown preset `{other}`"),
        }),
    }
}

/// Configuration for random small instances used by searches and checks.
#[derive(Clone, Copy, Debug)]
pub struct RandomInstanceConfig {
    pub dim: usize,
    pub n_actions: usize,
    pub constrained: bool,
    /// Reject draws whose inducibility gap falls below this floor.
    pub min_gap: f64,
}

impl Default for RandomInstanceConfig {
    fn default() -> Self {
        RandomInstanceConfig {
            dim: 2,
            n_actions: 2,
            constrained: true,
            min_gap: 0.05,
        }
    }
}

/// Seeded random instance on a simplex space, rejection-sampled so that no
/// agent action is weakly dominated (positive inducibility gap).
pub fn random_instance(seed: u64, config: RandomInstanceConfig) -> Result<Instance> {
    let mut rng = StreamRng::new(seed);
    for _attempt in 0..200 {
        let d = config.dim;
        let n = config.n_actions;
        let rand_rows = |rng: &mut StreamRng| -> Vec<Vec<f64>> {
            (0..d)
                .map(|_| (0..n).map(|_| rng.next_f64() * 2.0 - 1.0).collect())
                .collect()
        };
        let u_rows = rand_rows(&mut rng);
        let v_rows = rand_rows(&mut rng);
        let constraint = if config.constrained {
            // Interior mean: mix a random point with the barycenter.
            let space = DecisionSpace::simplex(d)?;
            let raw = space.sample(&mut rng);
            let c0: Vec<f64> = raw
                .iter()
                .map(|&x| 0.6 * x + 0.4 / d as f64)
                .collect();
            MeanConstraint::MeanEquals(c0)
        } else {
            MeanConstraint::None
        };
        let inst = Instance::new(
            DecisionSpace::simplex(d)?,
            (0..n).map(|a| format!("a{a}")).collect(),
            n + 1,
            PayoffTable::from_state_rows(&u_rows)?,
            PayoffTable::from_state_rows(&v_rows)?,
            constraint,
        )?;
        let (gap, _) = crate::solve::inducibility_gap(&inst)?;
        if gap >= config.min_gap {
            return Ok(inst);
        }
    }
    Err(Error::InvalidParam {
        what: "could not sample an instance with the requested gap".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_persuasion_shape() {
        let p = binary_persuasion(0.3).unwrap();
        assert_eq!(p.n_states(), 2);
        assert_eq!(p.n_actions(), 2);
        assert!((p.p0() - 0.3).abs() < 1e-12);
        assert!(binary_persuasion(0.5).is_err());
        assert!(binary_persuasion(0.0).is_err());
        let inst = p.to_generalized().unwrap();
        assert_eq!(inst.n_signals, 3);
        assert!((inst.principal_bound() - 1.0).abs() < 1e-12);
        assert!((inst.principal_lipschitz() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mean_exploit_shape() {
        let p = mean_exploit_instance(0.04).unwrap();
        assert_eq!(p.prior, vec![0.5, 0.5]);
        assert!((p.receiver[0][0] - 0.2).abs() < 1e-12);
        assert!(mean_exploit_instance(1.0).is_err());
        let inst = p.to_generalized().unwrap();
        assert!((inst.principal_bound() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bimatrix_builder() {
        let inst = stackelberg_bimatrix(
            vec![vec![1.0, -1.0], vec![-1.0, 1.0]],
            vec![vec![-1.0, 1.0], vec![1.0, -1.0]],
        )
        .unwrap();
        assert_eq!(inst.n_signals, 2);
        assert_eq!(inst.constraint, MeanConstraint::None);
        assert!((inst.principal_bound() - 1.0).abs() < 1e-12);
        assert!(stackelberg_bimatrix(vec![vec![1.0]], vec![vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn contract_bounded_payment_encoding() {
        let inst = contract_instance(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![1.0, 0.0],
            vec![0.1, 0.0],
            ContractRemedy::BoundedPayment { cap: 1.0 },
        )
        .unwrap();
        // v(x, a0) = x_0 - 0.1 under the identity outcome matrix.
        assert!((inst.v(&[0.7, 0.2], 0) - 0.6).abs() < 1e-12);
        // The exact bound never exceeds R + P, and L = 1 under l-infinity.
        assert!((inst.principal_bound() - 1.0).abs() < 1e-12);
        assert!(inst.principal_bound() <= 2.0 + 1e-12);
        assert!((inst.principal_lipschitz() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contract_expected_payment_encoding() {
        let inst = contract_instance(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![1.0, 0.0],
            vec![0.1, 0.0],
            ContractRemedy::ExpectedPayment,
        )
        .unwrap();
        assert!((inst.v(&[0.7, 0.2], 0) - 0.6).abs() < 1e-12);
        assert!((inst.u(&[0.7, 0.2], 0) - 0.3).abs() < 1e-12);
        // Degenerate outcome matrix must be rejected with guidance.
        let err = contract_instance(
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            vec![1.0, 0.0],
            vec![0.0, 0.0],
            ContractRemedy::ExpectedPayment,
        );
        assert!(err.is_err());
    }

    #[test]
    fn preset_parser() {
        let p = parse_preset("binary_persuasion:mu0=0.3").unwrap();
        assert!(p.persuasion.is_some());
        let p = parse_preset("mean_exploit:gamma=0.04").unwrap();
        assert_eq!(p.instance.n_actions(), 3);
        assert!(parse_preset("matching_pennies").unwrap().persuasion.is_none());
        parse_preset("contract_demo:remedy=expected").unwrap();
        assert!(parse_preset("nope").is_err());
        assert!(parse_preset("binary_persuasion:mu0").is_err());
        assert!(parse_preset("binary_persuasion:mu0=x").is_err());
    }

    #[test]
    fn random_instances_have_gap() {
        for seed in 0..5 {
            let inst = random_instance(
                seed,
                RandomInstanceConfig {
                    dim: 2,
                    n_actions: 3,
                    constrained: true,
                    min_gap: 0.05,
                },
            )
            .unwrap();
            let (gap, _) = crate::solve::inducibility_gap(&inst).unwrap();
            assert!(gap >= 0.05);
        }
    }
}
