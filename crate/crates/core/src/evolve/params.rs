use serde::Serialize;

use crate::error::{Error, Result};

use super::fitness::Loss;
use super::selection::SelNBParams;

pub const DEFAULT_C_HOEFFDING: f64 = 128.0;

/// SelNB parameters and generation count for monotone evolution from a
/// neighbourhood with fitness gain `theta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LsqParams {
    pub theta: f64,
    pub eps: f64,
    /// `ceil(8 / theta)`.
    pub g: u64,
    /// `3 theta / 8`.
    pub t: f64,
    /// `ceil(|N| ln(4 g / eps))`.
    pub p: u64,
    /// `ceil(c theta^{-2} ln(8 p g / eps))`.
    pub s: u128,
    /// Neighbour probability of the lazy mutator, `eps / (2 g)`.
    pub delta: f64,
    /// `ceil(p / delta)`: pool size that keeps about `p` non-self draws
    /// once the mutator is made lazy.
    pub lazy_pool: u64,
}

impl LsqParams {
    pub fn selnb(&self, loss: Loss) -> SelNBParams {
        SelNBParams {
            loss,
            t: self.t,
            p: self.p,
            s: self.s,
        }
    }

    /// As [`selnb`](Self::selnb) with the pool enlarged to `lazy_pool`.
    pub fn selnb_lazy(&self, loss: Loss) -> SelNBParams {
        SelNBParams {
            p: self.lazy_pool,
            ..self.selnb(loss)
        }
    }
}

pub fn evolve_lsq_params(theta: f64, eps: f64, neigh_size: usize, c_hoeffding: f64) -> Result<LsqParams> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} not in (0, 1]")));
    }
    if !(theta > 0.0) {
        return Err(Error::InvalidParameter(format!("theta = {theta} must be positive")));
    }
    if theta > eps {
        return Err(Error::ThetaExceedsEps { theta, eps });
    }
    if neigh_size == 0 || !(c_hoeffding > 0.0) {
        return Err(Error::InvalidParameter("need neigh_size >= 1 and c > 0".into()));
    }
    let g = (8.0 / theta - 1e-9).ceil();
    let t = 3.0 * theta / 8.0;
    let p = (neigh_size as f64 * (4.0 * g / eps).ln()).ceil().max(1.0);
    let s = (c_hoeffding / (theta * theta) * (8.0 * p * g / eps).ln()).ceil().max(1.0);
    let delta = eps / (2.0 * g);
    let lazy = (p / delta).ceil();
    Ok(LsqParams {
        theta,
        eps,
        g: g as u64,
        t,
        p: p as u64,
        s: s as u128,
        delta,
        lazy_pool: lazy as u64,
    })
}
