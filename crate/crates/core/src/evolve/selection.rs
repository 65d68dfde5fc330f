use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fnspace::{BoolFn, Dist};
use crate::rng::{self, StreamRng};

use super::fitness::{empirical_lperf, lperf, lperf_gain, Loss};
use super::mutation::{MutationAlgorithm, Representation};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelNBParams {
    pub loss: Loss,
    pub t: f64,
    pub p: u64,
    pub s: u128,
}

impl SelNBParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::InvalidParameter(format!("t = {} must be positive", self.t)));
        }
        if self.p == 0 || self.s == 0 {
            return Err(Error::InvalidParameter("p and s must be at least 1".into()));
        }
        Ok(())
    }
}

/// How candidate fitness is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitnessMode {
    /// `s` fresh draws per candidate per generation.
    Empirical,
    /// True fitness, as if `s` were infinite.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Initial,
    Beneficial,
    Neutral,
    Bottom,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Initial => "initial",
            Outcome::Beneficial => "beneficial",
            Outcome::Neutral => "neutral",
            Outcome::Bottom => "bottom",
        }
    }
}

/// Result of one selection step.
#[derive(Clone, Debug)]
pub struct Step {
    pub selected: Option<Representation>,
    pub outcome: Outcome,
    pub bene_count: usize,
    pub neut_count: usize,
    /// Distinct pool members as (id, count).
    pub pool: Vec<(String, u64)>,
    pub v_incumbent: f64,
    pub v_selected: Option<f64>,
}

fn frequency_draw(tier: &[(usize, u64)], rng: &mut StreamRng) -> usize {
    let total: u64 = tier.iter().map(|(_, c)| c).sum();
    let mut u = rng.random_range(0..total);
    for &(k, c) in tier {
        if u < c {
            return k;
        }
        u -= c;
    }
    unreachable!("draw falls inside the total")
}

/// One application of `SelNB[L, t, p, s]`.
#[allow(clippy::too_many_arguments)]
pub fn selnb_step(
    params: &SelNBParams,
    f: &BoolFn,
    d: &Dist,
    a: &dyn MutationAlgorithm,
    r: &Representation,
    eps: f64,
    fitness: FitnessMode,
    rng: &mut StreamRng,
) -> Result<Step> {
    params.validate()?;
    let pool = a.sample_pool(r, eps, params.p, rng);
    let gen_seed = rng.next_u64();
    let loss = params.loss;
    let estimate = |h: &Representation, k: u64| -> Result<f64> {
        match fitness {
            FitnessMode::Exact => lperf_gain(loss, f, r.hypothesis(), h.hypothesis(), d),
            FitnessMode::Empirical => {
                let mut sub = rng::stream(gen_seed, k, "fitness");
                empirical_lperf(loss, f, h.hypothesis(), d, params.s, &mut sub)
            }
        }
    };
    // Exact mode measures gains relative to r, so v(r) = 0 there.
    let incumbent_slot = pool.iter().position(|(q, _)| q == r);
    let v_r = match (fitness, incumbent_slot) {
        (FitnessMode::Exact, _) => 0.0,
        (FitnessMode::Empirical, Some(k)) => estimate(r, k as u64)?,
        (FitnessMode::Empirical, None) => estimate(r, pool.len() as u64)?,
    };
    let mut values = Vec::with_capacity(pool.len());
    for (k, (q, _)) in pool.iter().enumerate() {
        values.push(if Some(k) == incumbent_slot { v_r } else { estimate(q, k as u64)? });
    }
    let mut bene = Vec::new();
    let mut neut = Vec::new();
    for (k, (&v, (_, c))) in values.iter().zip(&pool).enumerate() {
        if v >= v_r + params.t {
            bene.push((k, *c));
        } else if (v - v_r).abs() < params.t {
            neut.push((k, *c));
        }
    }
    let (outcome, pick) = if !bene.is_empty() {
        (Outcome::Beneficial, Some(frequency_draw(&bene, rng)))
    } else if !neut.is_empty() {
        (Outcome::Neutral, Some(frequency_draw(&neut, rng)))
    } else {
        (Outcome::Bottom, None)
    };
    let shift = match fitness {
        FitnessMode::Exact => lperf(loss, f, r.hypothesis(), d)?,
        FitnessMode::Empirical => 0.0,
    };
    Ok(Step {
        selected: pick.map(|k| pool[k].0.clone()),
        outcome,
        bene_count: bene.len(),
        neut_count: neut.len(),
        v_incumbent: v_r + shift,
        v_selected: pick.map(|k| values[k] + shift),
        pool: pool.iter().map(|(q, c)| (q.id().to_string(), *c)).collect(),
    })
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Generation count `g`.
    pub generations: u64,
    /// Stop as soon as the true fitness exceeds `1 - eps`.
    pub stop_on_target: bool,
    /// Simulation budget below `g`; hitting it without reaching the target
    /// leaves `reached_target` false.
    pub max_generations: Option<u64>,
    pub fitness: FitnessMode,
    /// Slack of the empirical monotonicity flag; `t` when unset.
    pub slack: Option<f64>,
    pub record_pools: bool,
}

impl RunOptions {
    pub fn new(generations: u64) -> Self {
        Self {
            generations,
            stop_on_target: false,
            max_generations: None,
            fitness: FitnessMode::Empirical,
            slack: None,
            record_pools: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: u64,
    pub representation: String,
    pub true_perf: f64,
    pub empirical_perf: Option<f64>,
    pub outcome: Outcome,
    pub bene_count: usize,
    pub neut_count: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pool: Vec<(String, u64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvolutionTrace {
    /// Generation 0 is the starting representation.
    pub records: Vec<GenerationRecord>,
    pub reached_target: bool,
    /// True fitness never fell more than the slack below the previous generation.
    pub monotone_within_slack: bool,
    /// True fitness never fell below the starting fitness.
    pub monotone_exact: bool,
    pub hit_bottom: bool,
    pub budget_exhausted: bool,
}

impl EvolutionTrace {
    /// Selection steps taken.
    pub fn steps(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn final_perf(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.true_perf)
    }
}

/// Iterates `selnb_step` from `r0` for up to `g` generations or until bottom.
#[allow(clippy::too_many_arguments)]
pub fn evolve_run(
    a: &dyn MutationAlgorithm,
    params: &SelNBParams,
    f: &BoolFn,
    d: &Dist,
    eps: f64,
    r0: Representation,
    opts: &RunOptions,
    rng: &mut StreamRng,
) -> Result<EvolutionTrace> {
    if opts.generations == 0 {
        return Err(Error::InvalidParameter("g must be at least 1".into()));
    }
    params.validate()?;
    let loss = params.loss;
    let slack = opts.slack.unwrap_or(params.t);
    let limit = opts.max_generations.map_or(opts.generations, |m| m.min(opts.generations));
    let start = lperf(loss, f, r0.hypothesis(), d)?;
    let mut records = vec![GenerationRecord {
        generation: 0,
        representation: r0.id().to_string(),
        true_perf: start,
        empirical_perf: None,
        outcome: Outcome::Initial,
        bene_count: 0,
        neut_count: 0,
        pool: vec![],
    }];
    let mut current = r0;
    let mut perf = start;
    // Relative to the start, pointwise, so tiny steps are not lost to rounding.
    let mut drift = 0.0;
    let mut monotone_within_slack = true;
    let mut monotone_exact = true;
    let mut hit_bottom = false;
    let mut generation = 0u64;
    let target = 1.0 - eps;
    while generation < limit && !(opts.stop_on_target && perf > target) {
        generation += 1;
        let step = selnb_step(params, f, d, a, &current, eps, opts.fitness, rng)?;
        let Some(next) = step.selected else {
            hit_bottom = true;
            records.push(GenerationRecord {
                generation,
                representation: current.id().to_string(),
                true_perf: perf,
                empirical_perf: None,
                outcome: Outcome::Bottom,
                bene_count: step.bene_count,
                neut_count: step.neut_count,
                pool: if opts.record_pools { step.pool } else { vec![] },
            });
            break;
        };
        let gain = lperf_gain(loss, f, current.hypothesis(), next.hypothesis(), d)?;
        if gain < -slack {
            monotone_within_slack = false;
        }
        drift += gain;
        if drift < 0.0 {
            monotone_exact = false;
        }
        perf = lperf(loss, f, next.hypothesis(), d)?;
        records.push(GenerationRecord {
            generation,
            representation: next.id().to_string(),
            true_perf: perf,
            empirical_perf: step.v_selected,
            outcome: step.outcome,
            bene_count: step.bene_count,
            neut_count: step.neut_count,
            pool: if opts.record_pools { step.pool } else { vec![] },
        });
        current = next;
    }
    let reached_target = !hit_bottom && perf > target;
    Ok(EvolutionTrace {
        budget_exhausted: !reached_target && !hit_bottom && generation < opts.generations && generation == limit,
        records,
        reached_target,
        monotone_within_slack,
        monotone_exact,
        hit_bottom,
    })
}
