use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fnspace::{self, BoolFn, RealFn, TOL};
use crate::oracles::{Query, SqOracle};

use super::gpsi::ApproxSetGenerator;

/// `ceil(1 / (3 tau^2))`, the most updates a valid run can make.
pub fn iteration_bound(tau: f64) -> usize {
    (1.0 / (3.0 * tau * tau) - 1e-9).ceil() as usize
}

#[derive(Clone, Debug, Default)]
pub struct LearnerOptions {
    /// Stop after this many updates. When unset or larger than the
    /// theoretical bound, exceeding the bound signals an oracle violation.
    pub iteration_cap: Option<usize>,
    /// Starting hypothesis; the zero function when unset.
    pub warm_start: Option<RealFn>,
    /// True target, used only to fill the audit columns of the trace.
    pub audit: Option<BoolFn>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HaltReason {
    Converged,
    IterationCap,
    OracleViolation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Index into `G_{psi_i}` of the accepted function.
    pub chosen: Option<usize>,
    pub gamma: Option<f64>,
    /// `||f - psi_i||^2`, audit only.
    pub potential: Option<f64>,
    /// `<f - psi_i, g_i>`, audit only.
    pub true_gap: Option<f64>,
    /// Oracle queries issued so far, including this iteration.
    pub queries: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LearnerTrace {
    pub tau: f64,
    pub eps: f64,
    pub bound: usize,
    pub records: Vec<IterationRecord>,
    pub halt: HaltReason,
    /// Every generated set claimed a threshold of at least `4 tau`.
    pub precondition_met: bool,
}

impl LearnerTrace {
    pub fn updates(&self) -> usize {
        self.records.iter().filter(|r| r.chosen.is_some()).count()
    }
}

#[derive(Clone, Debug)]
pub struct LearnerRun {
    pub hypothesis: BoolFn,
    pub psi: RealFn,
    pub trace: LearnerTrace,
}

/// Projected iterative learner.
///
/// From `psi_0 = 0`, each iteration asks `<f, g>` at tolerance `tau` for
/// `g` in `gen(psi_i)` in order and takes the first `g` whose answer `v`
/// has `|v - <psi_i, g>| >= 3 tau`; then
/// `psi_{i+1} = P_1(psi_i + (v - <psi_i, g>) g)`. With no such `g` the
/// output is `sign(psi_i)`.
pub fn projected_learner(
    gen: &dyn ApproxSetGenerator,
    oracle: &mut SqOracle,
    tau: f64,
    eps: f64,
    opts: &LearnerOptions,
) -> Result<LearnerRun> {
    if !(tau > 0.0 && tau < 1.0 / 3.0) {
        return Err(Error::InvalidTolerance(tau));
    }
    let dist = oracle.dist().clone();
    let domain = dist.domain();
    let mut psi = match &opts.warm_start {
        Some(w) if w.domain() != domain => {
            return Err(Error::DomainMismatch {
                left: w.domain().vars(),
                right: domain.vars(),
            })
        }
        Some(w) => w.clone(),
        None => RealFn::zero(domain),
    };
    let bound = iteration_bound(tau);
    let user_cap = opts.iteration_cap.filter(|&c| c <= bound);
    let mut records = Vec::new();
    let mut precondition_met = true;
    let halt = loop {
        let i = records.len();
        if user_cap == Some(i) {
            break HaltReason::IterationCap;
        }
        if i > bound {
            break HaltReason::OracleViolation;
        }
        let set = gen.generate(&psi)?;
        if set.gamma() < 4.0 * tau - TOL {
            precondition_met = false;
        }
        let potential = match &opts.audit {
            Some(f) => Some(fnspace::dist_sq(f, &psi, &dist)?),
            None => None,
        };
        let mut step = None;
        for (j, g) in set.members().iter().enumerate() {
            let v = oracle.stat_query(&Query::correlational(g.clone(), tau))?;
            let gap = v - fnspace::inner_product(&psi, g, &dist)?;
            if gap.abs() >= 3.0 * tau {
                step = Some((j, gap, g));
                break;
            }
        }
        let mut rec = IterationRecord {
            iteration: i,
            chosen: None,
            gamma: None,
            potential,
            true_gap: None,
            queries: oracle.query_count(),
        };
        let Some((j, gamma, g)) = step else {
            records.push(rec);
            break HaltReason::Converged;
        };
        if let Some(f) = &opts.audit {
            let diff = f.as_real().table().sub(&psi)?;
            rec.true_gap = Some(fnspace::inner_product(&diff, g, &dist)?);
        }
        rec.chosen = Some(j);
        rec.gamma = Some(gamma);
        records.push(rec);
        psi = fnspace::project_unit(&psi.table().add_scaled(g, gamma)?);
    };
    Ok(LearnerRun {
        hypothesis: fnspace::sign_of(&psi),
        psi,
        trace: LearnerTrace {
            tau,
            eps,
            bound,
            records,
            halt,
            precondition_met,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fnspace::{ConceptClass, Dist, Domain};
    use crate::oracles::OracleMode;
    use crate::sqcore::gpsi::{ApproxSet, FixedGenerator, Provenance, SimulationGenerator};

    #[test]
    fn bound_arithmetic() {
        assert_eq!(iteration_bound(0.05), 134);
        assert_eq!(iteration_bound(0.02), 834);
        assert_eq!(iteration_bound(0.1), 34);
    }

    #[test]
    fn single_step_on_the_target() {
        let d = Domain::new(4).unwrap();
        let dist = Dist::random(d, 3);
        let f = fnspace::make_conjunction(d, &[0, 2]).unwrap();
        let gen = FixedGenerator(ApproxSet::new(vec![f.as_real().clone()], Provenance::User, 0.2).unwrap());
        let tau = 0.05;
        for mode in [OracleMode::Exact, OracleMode::GridAdversary, OracleMode::Noisy { seed: 1 }] {
            let mut oracle = SqOracle::new(f.clone(), dist.clone(), mode).unwrap();
            let opts = LearnerOptions {
                audit: Some(f.clone()),
                ..Default::default()
            };
            let run = projected_learner(&gen, &mut oracle, tau, 0.1, &opts).unwrap();
            assert_eq!(run.trace.halt, HaltReason::Converged);
            assert_eq!(run.trace.updates(), 1);
            assert!((run.trace.records[0].gamma.unwrap() - 1.0).abs() <= tau + 1e-12);
            assert!(fnspace::disagreement(&f, &run.hypothesis, &dist).unwrap() <= 0.1);
        }
    }

    #[test]
    fn potential_ledger_and_gap_signs() {
        let d = Domain::new(4).unwrap();
        let class = ConceptClass::conjunctions(d);
        let tau = 0.02;
        for seed in 0..3 {
            let dist = Dist::random(d, seed);
            let gen = SimulationGenerator::exhaustive(class.clone(), 8.0 * tau, dist.clone()).unwrap();
            for f in class.members() {
                let mut oracle = SqOracle::new(f.clone(), dist.clone(), OracleMode::GridAdversary).unwrap();
                let opts = LearnerOptions {
                    audit: Some(f.clone()),
                    ..Default::default()
                };
                let run = projected_learner(&gen, &mut oracle, tau, 0.1, &opts).unwrap();
                let recs = &run.trace.records;
                assert_eq!(run.trace.halt, HaltReason::Converged);
                for (i, r) in recs.iter().enumerate() {
                    let p = r.potential.unwrap();
                    assert!(p <= 1.0 - 3.0 * i as f64 * tau * tau + 1e-9);
                    if let (Some(gamma), Some(gap)) = (r.gamma, r.true_gap) {
                        assert_eq!(gamma.signum(), gap.signum());
                        let next = recs[i + 1].potential.unwrap();
                        assert!(p - next >= 3.0 * tau * tau - 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn lying_oracle_is_caught_by_the_cap() {
        let d = Domain::new(6).unwrap();
        let f = BoolFn::constant(d, true);
        let gen = FixedGenerator(ApproxSet::fourier(d, 6, 0.5));
        let mut oracle = SqOracle::new(f, Dist::uniform(d), OracleMode::Biased { offset: 0.5 }).unwrap();
        let run = projected_learner(&gen, &mut oracle, 0.1, 0.1, &LearnerOptions::default()).unwrap();
        assert_eq!(run.trace.halt, HaltReason::OracleViolation);
        assert_eq!(run.trace.records.len(), iteration_bound(0.1) + 1);
    }

    #[test]
    fn user_cap_and_bad_tau() {
        let d = Domain::new(3).unwrap();
        let f = BoolFn::constant(d, true);
        let gen = FixedGenerator(ApproxSet::new(vec![f.as_real().clone()], Provenance::User, 0.5).unwrap());
        let mut oracle = SqOracle::new(f.clone(), Dist::uniform(d), OracleMode::Exact).unwrap();
        let opts = LearnerOptions {
            iteration_cap: Some(0),
            ..Default::default()
        };
        let run = projected_learner(&gen, &mut oracle, 0.1, 0.1, &opts).unwrap();
        assert_eq!(run.trace.halt, HaltReason::IterationCap);
        assert!(run.trace.records.is_empty());
        assert!(run.trace.precondition_met);
        let mut oracle = SqOracle::new(f, Dist::uniform(d), OracleMode::Exact).unwrap();
        assert!(projected_learner(&gen, &mut oracle, 0.34, 0.1, &LearnerOptions::default()).is_err());
    }
}
