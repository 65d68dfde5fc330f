use rand::Rng;
use rand_distr::{Binomial, Distribution};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fnspace::{self, Domain, RealFn, Table};
use crate::rng::StreamRng;
use crate::sqcore::ApproxSet;

/// A hypothesis in `F^inf_1` with a provenance tag. Identity is the table:
/// two representations are the same iff their values agree bitwise.
#[derive(Clone, Debug)]
pub struct Representation {
    hypothesis: RealFn,
    tag: String,
    id: String,
}

impl Representation {
    pub fn new(hypothesis: RealFn, tag: impl Into<String>) -> Self {
        let mut h = Sha256::new();
        for &v in hypothesis.values() {
            // -0.0 and 0.0 are the same function value.
            let v = if v == 0.0 { 0.0f64 } else { v };
            h.update(v.to_bits().to_le_bytes());
        }
        let id = h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect();
        Self {
            hypothesis,
            tag: tag.into(),
            id,
        }
    }

    pub fn hypothesis(&self) -> &RealFn {
        &self.hypothesis
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    /// Short hex digest of the table.
    pub fn id(&self) -> &str {
        &self.id
    }

    fn same(&self, other: &Representation) -> bool {
        self.id == other.id && self.hypothesis == other.hypothesis
    }
}

impl PartialEq for Representation {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

/// Merges duplicate representations, keeping first-seen order.
fn aggregate(draws: impl IntoIterator<Item = (Representation, u64)>) -> Vec<(Representation, u64)> {
    let mut out: Vec<(Representation, u64)> = Vec::new();
    for (r, c) in draws {
        if c == 0 {
            continue;
        }
        match out.iter_mut().find(|(q, _)| q.same(&r)) {
            Some((_, k)) => *k += c,
            None => out.push((r, c)),
        }
    }
    out
}

/// Randomized map from a representation to a neighbouring one.
pub trait MutationAlgorithm: Sync {
    /// Support of the output distribution, without duplicates.
    fn neighborhood(&self, r: &Representation, eps: f64) -> Vec<Representation>;

    fn sample(&self, r: &Representation, eps: f64, rng: &mut StreamRng) -> Representation;

    /// Multiset of `p` independent draws as (representation, count).
    fn sample_pool(&self, r: &Representation, eps: f64, p: u64, rng: &mut StreamRng) -> Vec<(Representation, u64)> {
        aggregate((0..p).map(|_| (self.sample(r, eps, rng), 1)))
    }
}

pub type NeighborFn = Box<dyn Fn(&Representation) -> Vec<Representation> + Send + Sync>;

/// With probability `delta` outputs a uniform member of the neighbour list,
/// otherwise the input unchanged.
pub struct LazyUniformMutator {
    neighbors: NeighborFn,
    delta: f64,
}

impl LazyUniformMutator {
    pub fn new(neighbors: NeighborFn, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidParameter(format!("delta = {delta} not in (0, 1]")));
        }
        Ok(Self { neighbors, delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// The neighbour list with duplicates, in construction order.
    pub fn neighbor_list(&self, r: &Representation) -> Vec<Representation> {
        (self.neighbors)(r)
    }
}

impl MutationAlgorithm for LazyUniformMutator {
    fn neighborhood(&self, r: &Representation, _eps: f64) -> Vec<Representation> {
        let list = self.neighbor_list(r);
        aggregate(std::iter::once((r.clone(), 1)).chain(list.into_iter().map(|q| (q, 1))))
            .into_iter()
            .map(|(q, _)| q)
            .collect()
    }

    fn sample(&self, r: &Representation, _eps: f64, rng: &mut StreamRng) -> Representation {
        if rng.random::<f64>() < self.delta {
            let mut list = self.neighbor_list(r);
            let k = rng.random_range(0..list.len());
            list.swap_remove(k)
        } else {
            r.clone()
        }
    }

    /// Exact pool law without drawing `p` times: the number of neighbour
    /// draws is `Binomial(p, delta)`, split uniformly over the list.
    fn sample_pool(&self, r: &Representation, _eps: f64, p: u64, rng: &mut StreamRng) -> Vec<(Representation, u64)> {
        let list = self.neighbor_list(r);
        let moved = if self.delta >= 1.0 {
            p
        } else {
            Binomial::new(p, self.delta).expect("delta in (0, 1)").sample(rng)
        };
        let mut left = moved;
        let m = list.len() as u64;
        let mut draws = vec![(r.clone(), p - moved)];
        for (j, q) in list.into_iter().enumerate() {
            let slots = m - j as u64;
            let c = if slots == 1 {
                left
            } else {
                Binomial::new(left, 1.0 / slots as f64).expect("valid probability").sample(rng)
            };
            left -= c;
            draws.push((q, c));
        }
        aggregate(draws)
    }
}

/// `gamma = eps^{3/2} / 21` and fitness gain `tau = gamma^4 / (8 n)`.
pub fn disjunction_params(n: u32, eps: f64) -> (f64, f64) {
    let gamma = eps.powf(1.5) / 21.0;
    (gamma, gamma.powi(4) / (8.0 * n as f64))
}

/// `P_1(phi + gamma theta_i)` for each variable, then `phi` and
/// `P_1(phi - gamma)`, where `theta_i(x) = x_i` in `{0, 1}`.
pub fn disjunction_neighborhood(phi: &RealFn, gamma: f64) -> Vec<RealFn> {
    let d = phi.domain();
    let mut out: Vec<RealFn> = (0..d.vars() as usize)
        .map(|i| {
            let t = Table::from_fn(d, |x| phi.at(x) + if Domain::bit(x, i) { gamma } else { 0.0 });
            fnspace::project_unit(&t)
        })
        .collect();
    out.push(phi.clone());
    out.push(fnspace::project_unit(&phi.table().shift(-gamma)));
    out
}

/// Lazy uniform mutator over the disjunction neighbourhood with
/// `gamma = gamma(n, eps)`.
pub fn disjunction_mutator(n: u32, eps: f64, delta_self: f64) -> Result<LazyUniformMutator> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} not in (0, 1]")));
    }
    let (gamma, _) = disjunction_params(n, eps);
    let f: NeighborFn = Box::new(move |r: &Representation| {
        disjunction_neighborhood(r.hypothesis(), gamma)
            .into_iter()
            .map(|h| Representation::new(h, "disjunction"))
            .collect()
    });
    LazyUniformMutator::new(f, delta_self)
}

/// `{P_1(psi + gamma g)} ∪ {P_1(psi - gamma g)} ∪ {sign psi}` over
/// `g in G_psi(eps / 4)`, in that order.
pub fn sq_neighborhood(
    psi: &RealFn,
    eps: f64,
    gpsi_builder: &dyn Fn(&RealFn, f64) -> Result<ApproxSet>,
    gamma: f64,
) -> Result<Vec<RealFn>> {
    let g = gpsi_builder(psi, eps / 4.0)?;
    let mut out = Vec::with_capacity(2 * g.len() + 1);
    for c in [gamma, -gamma] {
        for m in g.members() {
            out.push(fnspace::project_unit(&psi.table().add_scaled(m, c)?));
        }
    }
    out.push(fnspace::sign_of(psi).as_real().clone());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn neighborhood_examples() {
        let d = Domain::new(3).unwrap();
        let zero = RealFn::zero(d);
        let nb = disjunction_neighborhood(&zero, 0.5);
        assert_eq!(nb.len(), 5);
        for x in d.points() {
            let want = if Domain::bit(x, 0) { 0.5 } else { 0.0 };
            assert_eq!(nb[0].at(x), want);
        }
        let one = RealFn::constant(d, 1.0).unwrap();
        let nb = disjunction_neighborhood(&one, 0.1);
        let reps: Vec<(Representation, u64)> = nb.into_iter().map(|h| (Representation::new(h, "t"), 1)).collect();
        assert!(aggregate(reps).len() <= 2);
    }

    #[test]
    fn params_arithmetic() {
        let (g, _) = disjunction_params(3, 0.1);
        assert!((g - 1.50586e-3).abs() < 1e-7);
        assert!((g - 0.1f64.sqrt() * 0.1 / 21.0).abs() < 1e-15);
        let (g1, _) = disjunction_params(1, 1.0);
        assert!((g1 - 1.0 / 21.0).abs() < 1e-15);
        let (_, t2) = disjunction_params(2, 0.3);
        let (_, t4) = disjunction_params(4, 0.3);
        assert!((t2 - 2.0 * t4).abs() < 1e-30);
    }

    #[test]
    fn ids_ignore_signed_zero() {
        let d = Domain::new(1).unwrap();
        let a = Representation::new(RealFn::new(d, vec![0.0, 0.5]).unwrap(), "a");
        let b = Representation::new(RealFn::new(d, vec![-0.0, 0.5]).unwrap(), "b");
        assert_eq!(a.id(), b.id());
        let c = Representation::new(RealFn::new(d, vec![0.0, 0.25]).unwrap(), "c");
        assert_ne!(a.id(), c.id());
    }

    #[test]
    fn lazy_mutator_frequencies() {
        let n = 3;
        let d = Domain::new(n).unwrap();
        let delta = 0.3;
        let m = disjunction_mutator(n, 0.5, delta).unwrap();
        let r = Representation::new(RealFn::zero(d), "init");
        assert!(m.neighborhood(&r, 0.5).len() <= n as usize + 2);
        let mut rng = rng::stream(1, 0, "test");
        let draws = 100_000u64;
        let pool = MutationAlgorithm::sample_pool(&m, &r, 0.5, draws, &mut rng);
        let mut slow = Vec::new();
        for _ in 0..draws {
            slow.push((m.sample(&r, 0.5, &mut rng), 1));
        }
        let slow = aggregate(slow);
        let k = (n + 2) as f64;
        for p in [&pool, &slow] {
            for (q, c) in p.iter() {
                let prob = if q.same(&r) { 1.0 - delta + delta / k } else { delta / k };
                let sigma = (draws as f64 * prob * (1.0 - prob)).sqrt();
                assert!((*c as f64 - draws as f64 * prob).abs() <= 3.0 * sigma, "{c} vs {prob}");
            }
            assert_eq!(p.iter().map(|(_, c)| c).sum::<u64>(), draws);
        }
        let all = disjunction_mutator(n, 0.5, 1.0).unwrap();
        let pool = all.sample_pool(&r, 0.5, 50, &mut rng);
        assert_eq!(pool.iter().map(|(_, c)| c).sum::<u64>(), 50);
        assert!(disjunction_mutator(n, 0.5, 0.0).is_err());
    }
}
