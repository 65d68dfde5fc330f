use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fnspace::{self, ConceptClass, Dist, Domain, RealFn};
use crate::oracles::{csq_decompose, QueryKind};

use super::algorithm::{ExhaustiveCsq, SqAlgorithm};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    /// Extracted by simulating an SQ algorithm with `psi` in place of the target.
    Simulation { algorithm: String },
    /// Characters of degree at most `degree`.
    Fourier { degree: u32 },
    User,
}

/// Ordered set of bounded functions with a claimed correlation threshold.
#[derive(Clone, Debug)]
pub struct ApproxSet {
    members: Vec<RealFn>,
    provenance: Provenance,
    gamma: f64,
}

impl ApproxSet {
    pub fn new(members: Vec<RealFn>, provenance: Provenance, gamma: f64) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::EmptyPool);
        };
        let d = first.domain();
        if let Some(m) = members.iter().find(|m| m.domain() != d) {
            return Err(Error::DomainMismatch {
                left: d.vars(),
                right: m.domain().vars(),
            });
        }
        Ok(Self {
            members,
            provenance,
            gamma,
        })
    }

    /// Characters `chi_T` with `|T| <= degree`.
    pub fn fourier(domain: Domain, degree: u32, gamma: f64) -> Self {
        let members = ConceptClass::parities(domain, Some(degree))
            .members()
            .iter()
            .map(|c| c.as_real().clone())
            .collect();
        Self {
            members,
            provenance: Provenance::Fourier { degree },
            gamma,
        }
    }

    pub fn members(&self) -> &[RealFn] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Extracts `G_psi` by running `alg` with `psi` standing in for the target.
///
/// Target-independent parts are answered exactly under `d`; each
/// correlational part `phi_i` is answered with `<psi, phi_i>_D` and appended
/// to the set. Once the algorithm outputs `h_psi`, `sign(psi)` and `h_psi`
/// are appended, so the set has (#correlational queries) + 2 members.
pub fn build_gpsi(alg: &mut dyn SqAlgorithm, psi: &RealFn, d: &Dist, budget: usize) -> Result<ApproxSet> {
    if psi.domain() != d.domain() {
        return Err(Error::DomainMismatch {
            left: psi.domain().vars(),
            right: d.domain().vars(),
        });
    }
    let mut members = Vec::new();
    let mut asked = 0usize;
    while let Some(q) = alg.next_query() {
        asked += 1;
        if asked > budget {
            return Err(Error::QueryBudgetExceeded(budget));
        }
        let answer = match q.kind {
            QueryKind::Correlational(phi) => {
                let v = fnspace::inner_product(psi, &phi, d)?;
                members.push(phi);
                v
            }
            QueryKind::TargetIndependent(phi) => fnspace::mean(&phi, d)?,
            QueryKind::General(g) => {
                let (phi1, phi2) = csq_decompose(&g)?;
                let v = fnspace::inner_product(psi, &phi1, d)? + fnspace::mean(&phi2, d)?;
                members.push(phi1);
                v
            }
        };
        alg.receive_answer(answer);
    }
    let h = alg.output();
    members.push(fnspace::sign_of(psi).as_real().clone());
    members.push(h);
    ApproxSet::new(
        members,
        Provenance::Simulation { algorithm: alg.id() },
        alg.tolerance(),
    )
}

/// Source of approximating sets `psi -> G_psi`.
pub trait ApproxSetGenerator: Sync {
    fn generate(&self, psi: &RealFn) -> Result<ApproxSet>;
}

impl<F> ApproxSetGenerator for F
where
    F: Fn(&RealFn) -> Result<ApproxSet> + Sync,
{
    fn generate(&self, psi: &RealFn) -> Result<ApproxSet> {
        self(psi)
    }
}

/// Returns the same set for every `psi`.
#[derive(Clone, Debug)]
pub struct FixedGenerator(pub ApproxSet);

impl ApproxSetGenerator for FixedGenerator {
    fn generate(&self, _psi: &RealFn) -> Result<ApproxSet> {
        Ok(self.0.clone())
    }
}

/// Runs a fresh algorithm from `factory` through [`build_gpsi`] for each `psi`.
pub struct SimulationGenerator<F> {
    factory: F,
    dist: Dist,
    budget: usize,
}

impl<F, A> SimulationGenerator<F>
where
    F: Fn() -> Result<A> + Sync,
    A: SqAlgorithm,
{
    pub fn new(factory: F, dist: Dist, budget: usize) -> Self {
        Self {
            factory,
            dist,
            budget,
        }
    }
}

impl SimulationGenerator<Box<dyn Fn() -> Result<ExhaustiveCsq> + Sync + Send>> {
    /// Simulation of the exhaustive CSQ baseline at accuracy `eps`
    /// (query tolerance `eps / 2`).
    pub fn exhaustive(class: ConceptClass, eps: f64, dist: Dist) -> Result<Self> {
        ExhaustiveCsq::new(class.clone(), eps)?;
        let budget = class.len();
        Ok(Self {
            factory: Box::new(move || ExhaustiveCsq::new(class.clone(), eps)),
            dist,
            budget,
        })
    }
}

impl<F, A> ApproxSetGenerator for SimulationGenerator<F>
where
    F: Fn() -> Result<A> + Sync,
    A: SqAlgorithm,
{
    fn generate(&self, psi: &RealFn) -> Result<ApproxSet> {
        let mut alg = (self.factory)()?;
        build_gpsi(&mut alg, psi, &self.dist, self.budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fnspace::{BoolFn, Domain, Table};
    use crate::oracles::{GeneralQuery, Query};
    use rand::SeedableRng;

    /// Toy algorithm mixing query kinds: one target-independent, one
    /// general and `extra` correlational queries against the constant.
    struct Mixed {
        domain: Domain,
        extra: usize,
        step: usize,
        answers: Vec<f64>,
    }

    impl SqAlgorithm for Mixed {
        fn id(&self) -> String {
            "mixed".into()
        }
        fn tolerance(&self) -> f64 {
            0.1
        }
        fn accuracy(&self) -> f64 {
            0.2
        }
        fn next_query(&mut self) -> Option<Query> {
            let d = self.domain;
            let q = match self.step {
                0 => Query::target_independent(RealFn::constant(d, 0.5).unwrap(), 0.1),
                1 => Query::general(GeneralQuery::from_fn(d, |x, l| if x == 0 { l } else { 0.25 }), 0.1),
                s if s < 2 + self.extra => Query::correlational(RealFn::constant(d, 1.0).unwrap(), 0.1),
                _ => return None,
            };
            self.step += 1;
            Some(q)
        }
        fn receive_answer(&mut self, value: f64) {
            self.answers.push(value);
        }
        fn output(&mut self) -> RealFn {
            RealFn::zero(self.domain)
        }
    }

    #[test]
    fn set_size_counts_correlational_parts_plus_two() {
        let d = Domain::new(3).unwrap();
        let dist = Dist::random(d, 1);
        let psi = RealFn::random(d, &mut rand_chacha::ChaCha8Rng::seed_from_u64(2));
        let mut alg = Mixed {
            domain: d,
            extra: 3,
            step: 0,
            answers: vec![],
        };
        let g = build_gpsi(&mut alg, &psi, &dist, 100).unwrap();
        // general (1) + correlational (3) + sign + h
        assert_eq!(g.len(), 4 + 2);
        assert!((alg.answers[0] - 0.5).abs() < 1e-12);
        let expected_general = dist.weight(0) * psi.at(0) + 0.25 * (1.0 - dist.weight(0)) - 0.0;
        let phi1_0 = 0.5 * (1.0 - -1.0);
        let phi2_rest = 0.25;
        let manual = dist.weight(0) * phi1_0 * psi.at(0) + (1.0 - dist.weight(0)) * phi2_rest;
        assert!((alg.answers[1] - manual).abs() < 1e-12);
        assert!((expected_general - manual).abs() < 1e-12);
        assert_eq!(g.members()[g.len() - 2], fnspace::sign_of(&psi).as_real().clone());
    }

    #[test]
    fn exhaustive_baseline_gives_m_plus_two() {
        let d = Domain::new(3).unwrap();
        let class = ConceptClass::conjunctions(d);
        let gen = SimulationGenerator::exhaustive(class.clone(), 0.2, Dist::uniform(d)).unwrap();
        let g = gen.generate(&RealFn::zero(d)).unwrap();
        assert_eq!(g.len(), class.len() + 2);
        assert!((g.gamma() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn simulating_on_the_target_recovers_a_good_hypothesis() {
        let d = Domain::new(4).unwrap();
        let class = ConceptClass::conjunctions(d);
        let dist = Dist::random(d, 6);
        let eps = 0.1;
        for f in class.members() {
            let mut alg = ExhaustiveCsq::new(class.clone(), eps).unwrap();
            let g = build_gpsi(&mut alg, f.as_real(), &dist, 100).unwrap();
            let h = g.members().last().unwrap();
            assert!(fnspace::inner_product(f, h, &dist).unwrap() >= 1.0 - 2.0 * eps);
        }
    }

    #[test]
    fn budget_exceeded() {
        let d = Domain::new(3).unwrap();
        let class = ConceptClass::parities(d, None);
        let mut alg = ExhaustiveCsq::new(class, 0.2).unwrap();
        let err = build_gpsi(&mut alg, &RealFn::zero(d), &Dist::uniform(d), 4).unwrap_err();
        assert!(matches!(err, Error::QueryBudgetExceeded(4)));
    }

    #[test]
    fn empty_set_rejected() {
        assert!(ApproxSet::new(vec![], Provenance::User, 0.1).is_err());
        let d = Domain::new(2).unwrap();
        let t = Table::constant(d, 1.0);
        let one = RealFn::from_table(t).unwrap();
        let b = BoolFn::constant(d, false);
        let s = ApproxSet::new(vec![one, b.as_real().clone()], Provenance::User, 0.1).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(ApproxSet::fourier(Domain::new(3).unwrap(), 1, 0.1).len(), 4);
    }
}
