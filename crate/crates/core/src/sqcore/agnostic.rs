use serde::Serialize;

use crate::error::{Error, Result};
use crate::fnspace::{sign, RealFn};
use crate::oracles::{AgnosticOracle, Query};

use super::gpsi::ApproxSet;

#[derive(Clone, Debug, Serialize)]
pub struct WeakHypothesis {
    #[serde(skip)]
    pub hypothesis: RealFn,
    /// Pool index of the chosen `g'`.
    pub index: usize,
    /// `+1` or `-1`, the sign applied to `g'`.
    pub sign: f64,
    /// Oracle answer for `<g', phi_A>`.
    pub answer: f64,
}

/// Asks `E[g(x) b]` for every pool member and returns `sign(v) g'` for the
/// member with the largest `|v|`, lowest index on ties.
pub fn weak_agnostic_learner(pool: &ApproxSet, oracle: &mut AgnosticOracle, tau: f64) -> Result<WeakHypothesis> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut best: Option<(usize, f64)> = None;
    for (j, g) in pool.members().iter().enumerate() {
        let v = oracle.stat_query(&Query::correlational(g.clone(), tau))?;
        if best.is_none_or(|(_, b)| v.abs() > b.abs()) {
            best = Some((j, v));
        }
    }
    let (index, answer) = best.expect("pool is nonempty");
    let s = sign(answer);
    let g = &pool.members()[index];
    let hypothesis = if s > 0.0 { g.clone() } else { g.neg() };
    Ok(WeakHypothesis {
        hypothesis,
        index,
        sign: s,
        answer,
    })
}
