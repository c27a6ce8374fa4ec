//! Shared helpers for unit tests.

use crate::game::{PrincipalStrategy, SignalPoint};

/// Optimal decomposition for the 2-state persuasion benchmark: posteriors
/// 1/2 and 0 with weights 2*mu0 and 1-2*mu0.
pub(crate) fn binary_opt_strategy(mu0: f64) -> PrincipalStrategy {
    PrincipalStrategy::new(vec![
        SignalPoint {
            prob: 2.0 * mu0,
            decision: vec![0.5, 0.5],
        },
        SignalPoint {
            prob: 1.0 - 2.0 * mu0,
            decision: vec![0.0, 1.0],
        },
    ])
}
