//! Outer search for the four approximate-best-response objectives:
//! worst-case and best-case principal utility against deterministic or
//! randomized δ-best responders.
//!
//! The inner problems are exact (LPs / per-signal enumeration); the outer
//! optimization over principal strategies is a search, so sup-type results
//! are certified lower bounds. All four objectives are evaluated on one
//! shared candidate set, which makes the reported values satisfy the
//! under/over chain ordering structurally.

use crate::error::{Error, Result};
use crate::game::{Instance, PrincipalStrategy, SignalPoint};
use crate::rng::StreamRng;
use crate::solve::{best_case_delta_br, stackelberg_value, worst_case_delta_br};
use crate::space::DecisionSpace;
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObjKind {
    /// sup over π of the worst deterministic δ-best response.
    UnderDet,
    /// sup over π of the worst randomized δ-best response.
    UnderRand,
    /// max over π of the best deterministic δ-best response.
    OverDet,
    /// max over π of the best randomized δ-best response.
    OverRand,
}

impl ObjKind {
    pub const ALL: [ObjKind; 4] = [
        ObjKind::UnderRand,
        ObjKind::UnderDet,
        ObjKind::OverDet,
        ObjKind::OverRand,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ObjKind::UnderDet => "under_det",
            ObjKind::UnderRand => "under_rand",
            ObjKind::OverDet => "over_det",
            ObjKind::OverRand => "over_rand",
        }
    }
}

/// Best value found plus the certifying strategy. For the sup-type (under)
/// objectives the value is a certified lower bound of the true supremum.
#[derive(Clone, Debug)]
pub struct ObjSearchResult {
    pub kind: ObjKind,
    pub value: f64,
    pub strategy: PrincipalStrategy,
}

fn inner_value(
    inst: &Instance,
    pi: &PrincipalStrategy,
    delta: f64,
    kind: ObjKind,
) -> Result<f64> {
    let (_, value) = match kind {
        ObjKind::UnderDet => worst_case_delta_br(inst, pi, delta, false)?,
        ObjKind::UnderRand => worst_case_delta_br(inst, pi, delta, true)?,
        ObjKind::OverDet => best_case_delta_br(inst, pi, delta, false)?,
        ObjKind::OverRand => best_case_delta_br(inst, pi, delta, true)?,
    };
    Ok(value)
}

/// Candidate principal strategies for the outer search.
///
/// Two-state constrained instances get an exhaustive posterior-pair grid at
/// resolution 1/budget (the pair (low, high) around the mean with weights
/// fixed by the mean constraint). Everything else gets seeded random
/// decompositions. The Stackelberg witness and the no-information strategy
/// are always included.
fn candidate_strategies(inst: &Instance, budget: usize) -> Result<Vec<PrincipalStrategy>> {
    let budget = budget.max(4);
    let mut cands = Vec::new();
    let (_, (witness, _)) = stackelberg_value(inst)?;
    cands.push(witness);

    match inst.mean_target() {
        Some(c0) => {
            cands.push(PrincipalStrategy::point(c0.to_vec()));
            if inst.space.dim() == 2 {
                let c = c0[0];
                let step = 1.0 / budget as f64;
                let mut lows: Vec<f64> = (0..)
                    .map(|k| k as f64 * step)
                    .take_while(|&m| m < c - 1e-12)
                    .collect();
                lows.push(c);
                let mut highs: Vec<f64> = (0..)
                    .map(|k| c + k as f64 * step)
                    .take_while(|&m| m < 1.0 - 1e-12)
                    .collect();
                highs.push(1.0);
                for &m1 in &lows {
                    for &m2 in &highs {
                        if m2 - m1 < step * 0.5 {
                            continue;
                        }
                        cands.push(two_posterior_strategy(c, m1, m2));
                    }
                }
                // Pin the exact endpoints that closed-form optima use.
                for m2 in [0.5, 1.0] {
                    if m2 > c + 1e-12 {
                        cands.push(two_posterior_strategy(c, 0.0, m2));
                    }
                }
            } else {
                let mut rng = StreamRng::new(0xC0FFEE ^ budget as u64);
                for _ in 0..budget {
                    cands.push(random_mean_decomposition(inst, c0, &mut rng));
                }
            }
        }
        None => {
            let mut rng = StreamRng::new(0xC0FFEE ^ budget as u64);
            // Point masses on random decisions plus a few mixtures.
            for _ in 0..budget {
                if rng.next_f64() < 0.5 {
                    cands.push(PrincipalStrategy::point(inst.space.sample(&mut rng)));
                } else {
                    let k = 2 + rng.index(inst.n_signals.max(2) - 1);
                    let mut weights: Vec<f64> =
                        (0..k).map(|_| rng.next_f64() + 1e-3).collect();
                    let total: f64 = weights.iter().sum();
                    weights.iter_mut().for_each(|w| *w /= total);
                    let signals = weights
                        .into_iter()
                        .map(|prob| SignalPoint {
                            prob,
                            decision: inst.space.sample(&mut rng),
                        })
                        .collect();
                    cands.push(PrincipalStrategy::new(signals));
                }
            }
            cands.push(PrincipalStrategy::point(inst.space.center()));
        }
    }
    Ok(cands)
}

/// Two posteriors (parametrized by their first coordinate) whose mixture
/// equals the mean target `c`.
fn two_posterior_strategy(c: f64, m1: f64, m2: f64) -> PrincipalStrategy {
    let w2 = ((c - m1) / (m2 - m1)).clamp(0.0, 1.0);
    PrincipalStrategy::new(vec![
        SignalPoint {
            prob: 1.0 - w2,
            decision: vec![m1, 1.0 - m1],
        },
        SignalPoint {
            prob: w2,
            decision: vec![m2, 1.0 - m2],
        },
    ])
}

/// Random decomposition with mean exactly `c0`: sample points and weights,
/// then shift toward the target and shrink until feasible.
fn random_mean_decomposition(
    inst: &Instance,
    c0: &[f64],
    rng: &mut StreamRng,
) -> PrincipalStrategy {
    let k = 2 + rng.index(inst.n_signals.max(2) - 1);
    let d = inst.space.dim();
    let mut points: Vec<Vec<f64>> = (0..k).map(|_| inst.space.sample(rng)).collect();
    let mut weights: Vec<f64> = (0..k).map(|_| rng.next_f64() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let mut mean = vec![0.0; d];
    for (w, p) in weights.iter().zip(&points) {
        for i in 0..d {
            mean[i] += w * p[i];
        }
    }
    // points' = c0 + lambda*(p - mean) keeps the weighted mean at c0 for
    // any lambda; halve lambda until every shifted point is feasible.
    let mut lambda = 1.0;
    for _ in 0..60 {
        let ok = points.iter().all(|p| {
            let q: Vec<f64> = (0..d).map(|i| c0[i] + lambda * (p[i] - mean[i])).collect();
            inst.space.contains(&q, 1e-12)
        });
        if ok {
            break;
        }
        lambda *= 0.5;
    }
    for p in points.iter_mut() {
        for i in 0..d {
            p[i] = c0[i] + lambda * (p[i] - mean[i]);
        }
    }
    PrincipalStrategy::new(
        weights
            .into_iter()
            .zip(points)
            .map(|(prob, decision)| SignalPoint { prob, decision })
            .collect(),
    )
}

fn search_over(
    inst: &Instance,
    delta: f64,
    kind: ObjKind,
    cands: &[PrincipalStrategy],
) -> Result<ObjSearchResult> {
    let evals: Vec<Result<f64>> = cands
        .par_iter()
        .map(|pi| inner_value(inst, pi, delta, kind))
        .collect();
    // Deterministic reduction: best value, earliest candidate on ties.
    let mut best: Option<(f64, usize)> = None;
    for (i, ev) in evals.into_iter().enumerate() {
        let v = ev?;
        if best.is_none_or(|(bv, _)| v > bv + 1e-15) {
            best = Some((v, i));
        }
    }
    let (value, idx) = best.ok_or_else(|| Error::InvalidParam {
        what: "no candidate strategies".into(),
    })?;
    Ok(ObjSearchResult {
        kind,
        value,
        strategy: cands[idx].clone(),
    })
}

/// Search one objective. `budget` is the grid resolution (points per unit)
/// for two-state constrained instances and the sample count otherwise.
pub fn obj_outer_search(
    inst: &Instance,
    delta: f64,
    kind: ObjKind,
    budget: usize,
) -> Result<ObjSearchResult> {
    let cands = candidate_strategies(inst, budget)?;
    search_over(inst, delta, kind, &cands)
}

/// Search all four objectives on a shared candidate set. The shared set
/// guarantees the reported values obey
/// under_rand <= under_det <= U* <= over_det <= over_rand.
pub fn obj_outer_search_all(
    inst: &Instance,
    delta: f64,
    budget: usize,
) -> Result<[ObjSearchResult; 4]> {
    let cands = candidate_strategies(inst, budget)?;
    let mut out = Vec::with_capacity(4);
    for kind in ObjKind::ALL {
        out.push(search_over(inst, delta, kind, &cands)?);
    }
    Ok(out.try_into().expect("four objectives"))
}

/// Closed-form reference values for the 2-state persuasion benchmark:
/// an upper bound on the worst-case randomized objective, a lower bound on
/// the best-case randomized objective, and the Stackelberg value 2*mu0.
pub fn binary_persuasion_analytic(mu0: f64, delta: f64) -> Result<(f64, f64, f64)> {
    if !(0.0 < mu0 && mu0 < 0.5) {
        return Err(Error::InvalidParam {
            what: format!("mu0 must lie in (0, 0.5), got {mu0}"),
        });
    }
    if delta < 0.0 {
        return Err(Error::InvalidParam {
            what: format!("delta must be nonnegative, got {delta}"),
        });
    }
    if delta > 0.0 && delta >= mu0 / 2.0 {
        return Err(Error::InvalidParam {
            what: format!("worst-case bound needs delta < mu0/2 = {}", mu0 / 2.0),
        });
    }
    if delta > 0.0 && delta >= 1.0 - 2.0 * mu0 {
        return Err(Error::InvalidParam {
            what: format!(
                "best-case bound needs delta < 1 - 2*mu0 = {}",
                1.0 - 2.0 * mu0
            ),
        });
    }
    let u_star = 2.0 * mu0;
    let under_upper = u_star - 2.0 * (2.0 * mu0 * delta).sqrt() + delta;
    let over_lower = u_star + delta;
    Ok((under_upper, over_lower, u_star))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::binary_persuasion;

    fn binary(mu0: f64) -> Instance {
        binary_persuasion(mu0).unwrap().to_generalized().unwrap()
    }

    #[test]
    fn analytic_values() {
        let (under, over, u_star) = binary_persuasion_analytic(0.3, 0.02).unwrap();
        assert!((u_star - 0.6).abs() < 1e-12);
        assert!((over - 0.62).abs() < 1e-12);
        assert!((under - (0.6 - 2.0 * 0.012f64.sqrt() + 0.02)).abs() < 1e-12);
        assert!((under - 0.40091).abs() < 1e-5);

        let (under, over, u_star) = binary_persuasion_analytic(0.3, 0.0).unwrap();
        assert_eq!((under, over, u_star), (0.6, 0.6, 0.6));

        let (under, over, _) = binary_persuasion_analytic(0.1, 0.04).unwrap();
        assert!((over - 0.24).abs() < 1e-12);
        assert!((under - (0.2 - 2.0 * 0.008f64.sqrt() + 0.04)).abs() < 1e-12);

        assert!(binary_persuasion_analytic(0.6, 0.0).is_err());
        assert!(binary_persuasion_analytic(0.3, 0.2).is_err());
    }

    #[test]
    fn over_rand_at_zero_delta_is_u_star() {
        let inst = binary(0.3);
        let res = obj_outer_search(&inst, 0.0, ObjKind::OverRand, 100).unwrap();
        assert!((res.value - 0.6).abs() < 1e-8);
    }

    #[test]
    fn under_det_at_zero_delta_approaches_but_does_not_attain() {
        // Adversarial tie-breaking at the boundary posterior keeps the sup
        // unattained; the grid must get close from below.
        let inst = binary(0.3);
        let res = obj_outer_search(&inst, 0.0, ObjKind::UnderDet, 1000).unwrap();
        assert!(res.value < 0.6 - 1e-9);
        assert!(res.value > 0.59);
    }

    #[test]
    fn chain_holds_on_shared_candidates() {
        let inst = binary(0.3);
        for &delta in &[0.0, 0.01, 0.1] {
            let [ur, ud, od, or] = obj_outer_search_all(&inst, delta, 200).unwrap();
            assert!(ur.value <= ud.value + 1e-9);
            assert!(ud.value <= 0.6 + 1e-9);
            assert!(0.6 <= od.value + 1e-9);
            assert!(od.value <= or.value + 1e-9);
        }
    }

    #[test]
    fn under_rand_grid_regression() {
        // Pinned from the deterministic grid itself (budget 1000). The
        // analytic cap at (0.3, 0.02) is 0.4009110..., the grid value lands
        // just below it.
        let inst = binary(0.3);
        let res = obj_outer_search(&inst, 0.02, ObjKind::UnderRand, 1000).unwrap();
        assert!(res.value <= 0.40091103);
        assert!(res.value > 0.40085, "grid value {}", res.value);
    }

    #[test]
    fn unconstrained_search_reaches_witness() {
        let inst = crate::instances::stackelberg_bimatrix(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let res = obj_outer_search(&inst, 0.0, ObjKind::OverRand, 50).unwrap();
        assert!((res.value - 1.0).abs() < 1e-8);
    }
}
