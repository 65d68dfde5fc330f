use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fnspace::{BoolFn, Dist, RealFn};

/// Sample sizes up to this are drawn exactly (multinomial counts); larger
/// ones use the normal approximation of the sample mean.
pub const EXACT_SAMPLE_LIMIT: u128 = 1 << 53;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    Linear,
    Quadratic,
}

impl Loss {
    pub fn eval(self, y: f64, y_pred: f64) -> f64 {
        match self {
            Loss::Linear => (y_pred - y).abs(),
            Loss::Quadratic => (y_pred - y) * (y_pred - y),
        }
    }

    /// `L(-1, 1)`.
    pub fn span(self) -> f64 {
        match self {
            Loss::Linear => 2.0,
            Loss::Quadratic => 4.0,
        }
    }

    /// Per-point fitness `1 - 2 L / span`.
    fn point(self, y: f64, y_pred: f64) -> f64 {
        1.0 - 2.0 * self.eval(y, y_pred) / self.span()
    }
}

fn check(f: &BoolFn, phi: &RealFn, d: &Dist) -> Result<()> {
    for other in [phi.domain(), d.domain()] {
        if other != f.domain() {
            return Err(Error::DomainMismatch {
                left: f.domain().vars(),
                right: other.vars(),
            });
        }
    }
    Ok(())
}

/// `1 - 2 E_D[L(f(x), phi(x))] / L(-1, 1)`.
pub fn lperf(loss: Loss, f: &BoolFn, phi: &RealFn, d: &Dist) -> Result<f64> {
    check(f, phi, d)?;
    Ok(d.expect(|x| loss.point(f.at(x), phi.at(x))))
}

/// `lperf(b) - lperf(a)`, summed pointwise so small gains survive rounding.
pub fn lperf_gain(loss: Loss, f: &BoolFn, a: &RealFn, b: &RealFn, d: &Dist) -> Result<f64> {
    check(f, a, d)?;
    check(f, b, d)?;
    let span = loss.span();
    Ok(d.expect(|x| 2.0 * (loss.eval(f.at(x), a.at(x)) - loss.eval(f.at(x), b.at(x))) / span))
}

/// Fitness estimated from `s` i.i.d. draws from `d`.
pub fn empirical_lperf(loss: Loss, f: &BoolFn, phi: &RealFn, d: &Dist, s: u128, rng: &mut impl Rng) -> Result<f64> {
    check(f, phi, d)?;
    if s == 0 {
        return Err(Error::InvalidParameter("sample size must be at least 1".into()));
    }
    if s <= EXACT_SAMPLE_LIMIT {
        let counts = d.sample_counts(s as u64, rng);
        let total: f64 = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(x, &c)| c as f64 * loss.point(f.at(x), phi.at(x)))
            .sum();
        return Ok(total / s as f64);
    }
    let mean = d.expect(|x| loss.point(f.at(x), phi.at(x)));
    let second = d.expect(|x| loss.point(f.at(x), phi.at(x)).powi(2));
    let var = (second - mean * mean).max(0.0);
    let z: f64 = StandardNormal.sample(rng);
    Ok(mean + z * (var / s as f64).sqrt())
}
