//! Statistical-query oracles.
//!
//! [`SqOracle`] answers queries about a Boolean target under a distribution;
//! [`AgnosticOracle`] answers them for an agnostic example distribution
//! `A = (D, phi_A)`. Both keep an append-only log of every query so answers
//! can be audited after the fact.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fnspace::{self, BoolFn, Dist, Domain, RealFn, Table, TOL};
use crate::rng::{self, StreamRng};

/// Query function `psi(x, l)` over points and labels, stored as the two
/// label slices `psi(., +1)` and `psi(., -1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralQuery {
    pub positive: Table,
    pub negative: Table,
}

impl GeneralQuery {
    pub fn new(positive: Table, negative: Table) -> Result<Self> {
        if positive.domain() != negative.domain() {
            return Err(Error::DomainMismatch {
                left: positive.domain().vars(),
                right: negative.domain().vars(),
            });
        }
        Ok(Self { positive, negative })
    }

    pub fn from_fn(domain: Domain, f: impl Fn(usize, f64) -> f64) -> Self {
        Self {
            positive: Table::from_fn(domain, |x| f(x, 1.0)),
            negative: Table::from_fn(domain, |x| f(x, -1.0)),
        }
    }

    pub fn domain(&self) -> Domain {
        self.positive.domain()
    }

    #[inline]
    pub fn eval(&self, x: usize, label: f64) -> f64 {
        if label > 0.0 {
            self.positive.at(x)
        } else {
            self.negative.at(x)
        }
    }

    fn check_range(&self) -> Result<()> {
        let m = self.positive.max_abs().max(self.negative.max_abs());
        if m > 1.0 + TOL {
            return Err(Error::QueryOutOfRange(format!("|psi| reaches {m}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum QueryKind {
    General(GeneralQuery),
    /// `phi(x) * l`, i.e. a request for `<phi, f>_D`.
    Correlational(RealFn),
    /// `phi(x)`, independent of the label.
    TargetIndependent(RealFn),
}

impl QueryKind {
    pub fn name(&self) -> &'static str {
        match self {
            QueryKind::General(_) => "general",
            QueryKind::Correlational(_) => "correlational",
            QueryKind::TargetIndependent(_) => "target_independent",
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            QueryKind::General(g) => g.domain(),
            QueryKind::Correlational(p) | QueryKind::TargetIndependent(p) => p.domain(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub kind: QueryKind,
    pub tolerance: f64,
}

impl Query {
    pub fn correlational(phi: RealFn, tolerance: f64) -> Self {
        Self {
            kind: QueryKind::Correlational(phi),
            tolerance,
        }
    }

    pub fn target_independent(phi: RealFn, tolerance: f64) -> Self {
        Self {
            kind: QueryKind::TargetIndependent(phi),
            tolerance,
        }
    }

    pub fn general(psi: GeneralQuery, tolerance: f64) -> Self {
        Self {
            kind: QueryKind::General(psi),
            tolerance,
        }
    }

    fn validate(&self, domain: Domain) -> Result<()> {
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(Error::InvalidTolerance(self.tolerance));
        }
        let qd = self.kind.domain();
        if qd != domain {
            return Err(Error::DomainMismatch {
                left: qd.vars(),
                right: domain.vars(),
            });
        }
        if let QueryKind::General(g) = &self.kind {
            g.check_range()?;
        }
        Ok(())
    }
}

/// Splits `psi` into `phi1(x) * l + phi2(x)` with
/// `phi1 = (psi(x,1) - psi(x,-1)) / 2` and `phi2 = (psi(x,1) + psi(x,-1)) / 2`.
pub fn csq_decompose(psi: &GeneralQuery) -> Result<(RealFn, RealFn)> {
    psi.check_range()?;
    let d = psi.domain();
    let (p, m) = (&psi.positive, &psi.negative);
    let phi1 = Table::from_fn(d, |x| (p.at(x) - m.at(x)) / 2.0);
    let phi2 = Table::from_fn(d, |x| (p.at(x) + m.at(x)) / 2.0);
    Ok((RealFn::from_table(phi1)?, RealFn::from_table(phi2)?))
}

/// How an oracle turns the true expectation into an answer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum OracleMode {
    Exact,
    /// Rounds the true value to the nearest multiple of `2 tau`.
    GridAdversary,
    /// Adds seeded uniform noise from `[-tau, tau]`.
    Noisy { seed: u64 },
    /// Averages over `samples` seeded draws; only probabilistically valid.
    Empirical { samples: u64, seed: u64 },
    /// Adds a fixed offset. Invalid whenever `|offset| > tau`; used to
    /// exercise violation diagnostics.
    Biased { offset: f64 },
}

impl OracleMode {
    /// Whether every answer is guaranteed to lie within the tolerance.
    pub fn is_valid_by_construction(&self) -> bool {
        matches!(
            self,
            OracleMode::Exact | OracleMode::GridAdversary | OracleMode::Noisy { .. }
        )
    }

    fn seed(&self) -> u64 {
        match *self {
            OracleMode::Noisy { seed } | OracleMode::Empirical { seed, .. } => seed,
            _ => 0,
        }
    }
}

/// One logged query. `true_value` is the exact expectation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub kind: String,
    pub tolerance: f64,
    pub value: f64,
    pub true_value: f64,
}

impl QueryRecord {
    pub fn is_within_tolerance(&self) -> bool {
        (self.value - self.true_value).abs() <= self.tolerance + TOL
    }
}

fn grid_round(v: f64, tau: f64) -> f64 {
    let step = 2.0 * tau;
    (v / step).round() * step
}

fn respond(mode: OracleMode, truth: f64, tau: f64, rng: &mut StreamRng, empirical: impl FnOnce(&mut StreamRng, u64) -> f64) -> f64 {
    match mode {
        OracleMode::Exact => truth,
        OracleMode::GridAdversary => grid_round(truth, tau),
        OracleMode::Noisy { .. } => truth + rng.random_range(-tau..=tau),
        OracleMode::Empirical { samples, .. } => empirical(rng, samples),
        OracleMode::Biased { offset } => truth + offset,
    }
}

/// `STAT(f, D)`.
#[derive(Clone, Debug)]
pub struct SqOracle {
    target: BoolFn,
    dist: Dist,
    mode: OracleMode,
    rng: StreamRng,
    log: Vec<QueryRecord>,
}

impl SqOracle {
    pub fn new(target: BoolFn, dist: Dist, mode: OracleMode) -> Result<Self> {
        if target.domain() != dist.domain() {
            return Err(Error::DomainMismatch {
                left: target.domain().vars(),
                right: dist.domain().vars(),
            });
        }
        if let OracleMode::Empirical { samples: 0, .. } = mode {
            return Err(Error::InvalidParameter("empirical oracle needs samples >= 1".into()));
        }
        Ok(Self {
            target,
            dist,
            mode,
            rng: rng::stream(mode.seed(), 0, "sq-oracle"),
            log: Vec::new(),
        })
    }

    pub fn mode(&self) -> OracleMode {
        self.mode
    }

    pub fn dist(&self) -> &Dist {
        &self.dist
    }

    /// The target, for audits only; learners must not read it.
    pub fn target(&self) -> &BoolFn {
        &self.target
    }

    pub fn log(&self) -> &[QueryRecord] {
        &self.log
    }

    pub fn query_count(&self) -> usize {
        self.log.len()
    }

    /// Exact `E_D[psi(x, f(x))]`.
    pub fn true_value(&self, q: &Query) -> Result<f64> {
        q.validate(self.dist.domain())?;
        Ok(self.expectation(&q.kind))
    }

    fn expectation(&self, kind: &QueryKind) -> f64 {
        let f = &self.target;
        match kind {
            QueryKind::General(g) => self.dist.expect(|x| g.eval(x, f.at(x))),
            QueryKind::Correlational(phi) => {
                fnspace::inner_unchecked(phi.values(), f.values(), self.dist.weights())
            }
            QueryKind::TargetIndependent(phi) => self.dist.expect(|x| phi.at(x)),
        }
    }

    pub fn stat_query(&mut self, q: &Query) -> Result<f64> {
        q.validate(self.dist.domain())?;
        let truth = self.expectation(&q.kind);
        let (dist, target, kind) = (&self.dist, &self.target, &q.kind);
        let value = respond(self.mode, truth, q.tolerance, &mut self.rng, |rng, s| {
            let counts = dist.sample_counts(s, rng);
            let total: f64 = counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(x, &c)| {
                    let l = target.at(x);
                    let v = match kind {
                        QueryKind::General(g) => g.eval(x, l),
                        QueryKind::Correlational(phi) => phi.at(x) * l,
                        QueryKind::TargetIndependent(phi) => phi.at(x),
                    };
                    c as f64 * v
                })
                .sum();
            total / s as f64
        });
        self.log.push(QueryRecord {
            kind: q.kind.name().into(),
            tolerance: q.tolerance,
            value,
            true_value: truth,
        });
        Ok(value)
    }

    /// Indices of logged answers that fall outside their tolerance.
    pub fn audit(&self) -> Vec<usize> {
        audit_log(&self.log)
    }
}

pub fn audit_log(log: &[QueryRecord]) -> Vec<usize> {
    log.iter()
        .enumerate()
        .filter(|(_, r)| !r.is_within_tolerance())
        .map(|(i, _)| i)
        .collect()
}

/// Agnostic example distribution: marginal `D` and `phi_A(x) = E[b | x]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AgnosticDist {
    pub dist: Dist,
    pub phi: RealFn,
}

impl AgnosticDist {
    pub fn new(dist: Dist, phi: RealFn) -> Result<Self> {
        if dist.domain() != phi.domain() {
            return Err(Error::DomainMismatch {
                left: dist.domain().vars(),
                right: phi.domain().vars(),
            });
        }
        Ok(Self { dist, phi })
    }

    pub fn domain(&self) -> Domain {
        self.dist.domain()
    }

    /// Exact `E_A[psi(x, b)] = E_D[phi1 * phi_A + phi2]`.
    pub fn expectation(&self, kind: &QueryKind) -> Result<f64> {
        let (phi1, phi2) = match kind {
            QueryKind::General(g) => csq_decompose(g)?,
            QueryKind::Correlational(p) => (p.clone(), RealFn::zero(p.domain())),
            QueryKind::TargetIndependent(p) => (RealFn::zero(p.domain()), p.clone()),
        };
        let a = &self.phi;
        Ok(self.dist.expect(|x| phi1.at(x) * a.at(x) + phi2.at(x)))
    }
}

/// `STAT(A)`.
#[derive(Clone, Debug)]
pub struct AgnosticOracle {
    a: AgnosticDist,
    mode: OracleMode,
    rng: StreamRng,
    log: Vec<QueryRecord>,
}

impl AgnosticOracle {
    pub fn new(a: AgnosticDist, mode: OracleMode) -> Self {
        Self {
            a,
            mode,
            rng: rng::stream(mode.seed(), 0, "agnostic-oracle"),
            log: Vec::new(),
        }
    }

    pub fn distribution(&self) -> &AgnosticDist {
        &self.a
    }

    pub fn log(&self) -> &[QueryRecord] {
        &self.log
    }

    pub fn stat_query(&mut self, q: &Query) -> Result<f64> {
        q.validate(self.a.domain())?;
        let truth = self.a.expectation(&q.kind)?;
        let (a, kind) = (&self.a, &q.kind);
        let value = respond(self.mode, truth, q.tolerance, &mut self.rng, |rng, s| {
            let counts = a.dist.sample_counts(s, rng);
            let mut total = 0.0;
            for (x, &c) in counts.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let p_pos = ((1.0 + a.phi.at(x)) / 2.0).clamp(0.0, 1.0);
                let pos = Binomial::new(c, p_pos).map(|b| b.sample(rng)).unwrap_or(0);
                let neg = c - pos;
                let (vp, vn) = match kind {
                    QueryKind::General(g) => (g.eval(x, 1.0), g.eval(x, -1.0)),
                    QueryKind::Correlational(phi) => (phi.at(x), -phi.at(x)),
                    QueryKind::TargetIndependent(phi) => (phi.at(x), phi.at(x)),
                };
                total += pos as f64 * vp + neg as f64 * vn;
            }
            total / s as f64
        });
        self.log.push(QueryRecord {
            kind: kind.name().into(),
            tolerance: q.tolerance,
            value,
            true_value: truth,
        });
        Ok(value)
    }
}

/// One-shot agnostic query with its own seeded stream.
pub fn agnostic_stat_query(a: &AgnosticDist, q: &Query, mode: OracleMode) -> Result<f64> {
    AgnosticOracle::new(a.clone(), mode).stat_query(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fnspace::{make_conjunction, make_disjunction, make_parity};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;

    fn dom(n: u32) -> Domain {
        Domain::new(n).unwrap()
    }

    #[test]
    fn exact_self_correlation_is_one() {
        let n = dom(4);
        let f = make_disjunction(n, &[0, 3]).unwrap();
        let mut o = SqOracle::new(f.clone(), Dist::random(n, 2), OracleMode::Exact).unwrap();
        let v = o.stat_query(&Query::correlational(f.as_real().clone(), 0.3)).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = TOL);
        assert_eq!(o.log().len(), 1);
    }

    #[test]
    fn grid_rounding() {
        let r = grid_round(0.37, 0.1);
        assert_abs_diff_eq!(r, 0.4, epsilon = 1e-12);
        assert!((r - 0.37f64).abs() <= 0.1);
        assert_abs_diff_eq!(grid_round(-0.29, 0.1), -0.2, epsilon = 1e-12);
    }

    #[test]
    fn grid_adversary_on_a_real_query() {
        // Weights chosen so the correlation with the constant is 0.37.
        let n = dom(1);
        let d = Dist::new(n, vec![0.315, 0.685]).unwrap();
        let f = make_disjunction(n, &[0]).unwrap();
        let mut o = SqOracle::new(f, d, OracleMode::GridAdversary).unwrap();
        let one = RealFn::constant(n, 1.0).unwrap();
        let v = o.stat_query(&Query::correlational(one, 0.1)).unwrap();
        assert_abs_diff_eq!(o.log()[0].true_value, 0.37, epsilon = 1e-12);
        assert_abs_diff_eq!(v, 0.4, epsilon = 1e-12);
        assert!(o.audit().is_empty());
    }

    #[test]
    fn invalid_tolerance_and_mismatch() {
        let n = dom(3);
        let f = make_parity(n, &[0]).unwrap();
        let mut o = SqOracle::new(f.clone(), Dist::uniform(n), OracleMode::Exact).unwrap();
        let err = o.stat_query(&Query::correlational(f.as_real().clone(), 0.0)).unwrap_err();
        assert!(err.to_string().starts_with("invalid-tolerance"));
        let other = RealFn::zero(dom(2));
        let err = o.stat_query(&Query::correlational(other, 0.1)).unwrap_err();
        assert!(err.to_string().starts_with("domain-mismatch"));
        assert!(o.log().is_empty());
    }

    #[test]
    fn empirical_mode_concentrates() {
        // Within 3/sqrt(s) of the truth on at least 99% of seeded trials.
        let n = dom(4);
        let f = make_conjunction(n, &[1]).unwrap();
        let d = Dist::random(n, 11);
        let phi = RealFn::random(n, &mut rand_chacha::ChaCha8Rng::seed_from_u64(4));
        let s = 4000u64;
        let mut hits = 0;
        let trials = 400;
        for seed in 0..trials {
            let mut o = SqOracle::new(f.clone(), d.clone(), OracleMode::Empirical { samples: s, seed }).unwrap();
            let q = Query::correlational(phi.clone(), 0.05);
            let v = o.stat_query(&q).unwrap();
            if (v - o.log()[0].true_value).abs() <= 3.0 / (s as f64).sqrt() {
                hits += 1;
            }
        }
        assert!(hits as f64 >= 0.99 * trials as f64, "hits = {hits}");
    }

    #[test]
    fn noisy_mode_is_seeded_and_valid() {
        let n = dom(3);
        let f = make_parity(n, &[0, 1]).unwrap();
        let q = Query::correlational(RealFn::constant(n, 0.5).unwrap(), 0.05);
        let run = |seed| {
            let mut o = SqOracle::new(f.clone(), Dist::random(n, 1), OracleMode::Noisy { seed }).unwrap();
            let v: Vec<f64> = (0..20).map(|_| o.stat_query(&q).unwrap()).collect();
            assert!(o.audit().is_empty());
            v
        };
        assert_eq!(run(3), run(3));
        assert_ne!(run(3), run(4));
    }

    #[test]
    fn biased_mode_is_caught_by_audit() {
        let n = dom(2);
        let f = make_parity(n, &[0]).unwrap();
        let mut o = SqOracle::new(f.clone(), Dist::uniform(n), OracleMode::Biased { offset: 0.2 }).unwrap();
        o.stat_query(&Query::correlational(f.as_real().clone(), 0.1)).unwrap();
        assert_eq!(o.audit(), vec![0]);
    }

    #[test]
    fn decomposition_examples() {
        let n = dom(3);
        let label = GeneralQuery::from_fn(n, |_, l| l);
        let (p1, p2) = csq_decompose(&label).unwrap();
        assert!(p1.values().iter().all(|&v| v == 1.0));
        assert!(p2.values().iter().all(|&v| v == 0.0));

        let phi = RealFn::random(n, &mut rand_chacha::ChaCha8Rng::seed_from_u64(1));
        let ti = GeneralQuery::from_fn(n, |x, _| phi.at(x));
        let (p1, p2) = csq_decompose(&ti).unwrap();
        assert!(p1.values().iter().all(|&v| v == 0.0));
        assert_eq!(p2, phi);

        let c = make_conjunction(n, &[0, 2]).unwrap();
        let agree = GeneralQuery::from_fn(n, |x, l| (1.0 + l * c.at(x)) / 2.0);
        let (p1, p2) = csq_decompose(&agree).unwrap();
        for x in n.points() {
            assert_abs_diff_eq!(p1.at(x), c.at(x) / 2.0, epsilon = TOL);
            assert_abs_diff_eq!(p2.at(x), 0.5, epsilon = TOL);
            for l in [-1.0, 1.0] {
                assert_abs_diff_eq!(agree.eval(x, l), p1.at(x) * l + p2.at(x), epsilon = TOL);
            }
        }

        let bad = GeneralQuery::from_fn(n, |_, l| 1.5 * l);
        assert!(csq_decompose(&bad).unwrap_err().to_string().starts_with("query-out-of-range"));
    }

    #[test]
    fn agnostic_degenerate_cases() {
        let n = dom(3);
        let d = Dist::random(n, 8);
        let c = make_disjunction(n, &[1]).unwrap();
        let g = RealFn::random(n, &mut rand_chacha::ChaCha8Rng::seed_from_u64(2));
        let q = Query::correlational(g.clone(), 0.1);
        let a = AgnosticDist::new(d.clone(), c.as_real().clone()).unwrap();
        let mut o = SqOracle::new(c.clone(), d.clone(), OracleMode::Exact).unwrap();
        assert_abs_diff_eq!(
            agnostic_stat_query(&a, &q, OracleMode::Exact).unwrap(),
            o.stat_query(&q).unwrap(),
            epsilon = TOL
        );
        let zero = AgnosticDist::new(d.clone(), RealFn::zero(n)).unwrap();
        assert_abs_diff_eq!(agnostic_stat_query(&zero, &q, OracleMode::Exact).unwrap(), 0.0, epsilon = TOL);
    }

    #[test]
    fn agnostic_error_recovery() {
        // For Boolean h, E_A[(1 - l h(x)) / 2] = L1(phi_A, h) / 2.
        let n = dom(4);
        let d = Dist::random(n, 5);
        let phi = RealFn::random(n, &mut rand_chacha::ChaCha8Rng::seed_from_u64(9));
        let h = make_conjunction(n, &[0, 1]).unwrap();
        let q = GeneralQuery::from_fn(n, |x, l| (1.0 - l * h.at(x)) / 2.0);
        let a = AgnosticDist::new(d.clone(), phi.clone()).unwrap();
        let v = agnostic_stat_query(&a, &Query::general(q, 0.1), OracleMode::Exact).unwrap();
        let l1 = fnspace::l1_distance(&phi, &h, &d).unwrap();
        assert_abs_diff_eq!(v, l1 / 2.0, epsilon = TOL);
    }

    #[test]
    fn agnostic_empirical_concentrates() {
        let n = dom(3);
        let d = Dist::random(n, 3);
        let phi = RealFn::random(n, &mut rand_chacha::ChaCha8Rng::seed_from_u64(3));
        let a = AgnosticDist::new(d, phi).unwrap();
        let g = make_parity(n, &[0, 2]).unwrap();
        let q = Query::correlational(g.as_real().clone(), 0.05);
        let truth = a.expectation(&q.kind).unwrap();
        let s = 20_000u64;
        let ok = (0..100)
            .filter(|&seed| {
                let v = agnostic_stat_query(&a, &q, OracleMode::Empirical { samples: s, seed }).unwrap();
                (v - truth).abs() <= 3.0 / (s as f64).sqrt() * 2.0
            })
            .count();
        assert!(ok >= 98, "ok = {ok}");
    }
}
