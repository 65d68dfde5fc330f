use std::collections::BTreeMap;

use rand::Rng;

use crate::dimensions::{self, FnSet, SqDimMode, DEFAULT_EXACT_CAP};
use crate::error::{Error, Result};
use crate::evolve::{
    disjunction_mutator, disjunction_params, evolve_lsq_params, evolve_run, Loss, Representation, RunOptions,
    DEFAULT_C_HOEFFDING,
};
use crate::fnspace::{self, RealFn, Table, TOL};
use crate::oracles::{AgnosticDist, AgnosticOracle, SqOracle};
use crate::par;
use crate::rng;
use crate::sqcore::{projected_learner, ApproxSet, HaltReason, LearnerOptions, Provenance, SimulationGenerator};

use super::config::ExperimentConfig;
use super::export::{Cell, Rows};
use super::{Breach, RunInfo, RunOutput};

pub const LEARN_HEADER: [&str; 4] = ["iteration", "gamma", "potential", "queries"];
pub const EVOLVE_HEADER: [&str; 6] = [
    "generation",
    "true_perf",
    "empirical_perf",
    "outcome",
    "bene_count",
    "neut_count",
];
pub const REPORT_HEADER: [&str; 8] = [
    "seed",
    "kind",
    "value",
    "certainty",
    "witness",
    "gamma",
    "bound",
    "psi_index",
];

const DEFAULT_MAX_GENERATIONS: u64 = 1_000_000;
const DEFAULT_PSI_SAMPLES: usize = 8;

fn breach(run: usize, guarantee: &str, detail: String) -> Breach {
    Breach {
        run,
        guarantee: guarantee.into(),
        detail,
    }
}

fn oracle_breach(run: usize, bad: &[usize], total: usize) -> Breach {
    breach(
        run,
        "oracle validity |v - E_D[psi(x, f(x))]| <= tau",
        format!("{} of {total} answers out of tolerance, first at query {}", bad.len(), bad[0]),
    )
}

fn rate(num: usize, den: usize) -> f64 {
    if den == 0 {
        f64::NAN
    } else {
        num as f64 / den as f64
    }
}

struct LearnResult {
    rows: Rows,
    summary: Vec<Cell>,
    breaches: Vec<Breach>,
    disagreement: f64,
    converged: bool,
}

/// Projected learner over every (seed, target) pair, with `G_psi` extracted
/// from the exhaustive baseline at accuracy `8 tau`.
pub fn run_learn(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let tau = cfg.tau.ok_or_else(|| Error::config("tau", "required for learn"))?;
    let class = cfg.concept_class()?;
    let spec = cfg.oracle_spec()?;
    let m = class.len();
    let runs: Vec<RunInfo> = cfg
        .seeds
        .iter()
        .enumerate()
        .flat_map(|(si, &seed)| {
            (0..m).map(move |ti| RunInfo {
                index: si * m + ti,
                seed,
                label: format!("target {ti}"),
            })
        })
        .collect();
    let dists = cfg
        .seeds
        .iter()
        .map(|&s| cfg.distribution(s))
        .collect::<Result<Vec<_>>>()?;
    let results = par::map(&runs, |info| -> Result<LearnResult> {
        let ti = info.index % m;
        let dist = &dists[info.index / m];
        let target = class.members()[ti].clone();
        let gen = SimulationGenerator::exhaustive(class.clone(), 8.0 * tau, dist.clone())?;
        let mode = spec.mode(info.seed, ti as u64);
        let mut oracle = SqOracle::new(target.clone(), dist.clone(), mode)?;
        let opts = LearnerOptions {
            audit: Some(target.clone()),
            ..Default::default()
        };
        let run = projected_learner(&gen, &mut oracle, tau, cfg.epsilon, &opts)?;
        let tr = &run.trace;
        let mut rows = Rows::new(&LEARN_HEADER);
        for r in &tr.records {
            rows.push(vec![
                r.iteration.into(),
                Cell::opt(r.gamma),
                Cell::opt(r.potential),
                r.queries.into(),
            ]);
        }
        let dis = fnspace::disagreement(&target, &run.hypothesis, dist)?;
        let potential = fnspace::dist_sq(&target, &run.psi, dist)?;
        let mut breaches = Vec::new();
        let bad = if mode.is_valid_by_construction() || matches!(mode, crate::oracles::OracleMode::Biased { .. }) {
            oracle.audit()
        } else {
            vec![]
        };
        let i = info.index;
        if !bad.is_empty() {
            breaches.push(oracle_breach(i, &bad, oracle.query_count()));
        } else if mode.is_valid_by_construction() {
            let step = 3.0 * tau * tau;
            for (k, r) in tr.records.iter().enumerate() {
                let p = r.potential.unwrap_or(0.0);
                if p > 1.0 - step * k as f64 + 1e-9 {
                    breaches.push(breach(i, "potential ||f - psi_i||^2 <= 1 - 3 i tau^2", format!("iteration {k}: {p}")));
                }
                if r.gamma.is_some() {
                    let next = tr.records.get(k + 1).and_then(|n| n.potential).unwrap_or(potential);
                    if p - next < step - 1e-9 {
                        breaches.push(breach(
                            i,
                            "potential drop >= 3 tau^2 per accepted step",
                            format!("iteration {k}: drop {}", p - next),
                        ));
                    }
                }
            }
            if tr.halt == HaltReason::Converged && tr.precondition_met && dis > cfg.epsilon + TOL {
                breaches.push(breach(
                    i,
                    "halting accuracy Pr_D[f != h] <= eps",
                    format!("disagreement {dis} > {}", cfg.epsilon),
                ));
            }
        }
        if tr.halt == HaltReason::OracleViolation {
            breaches.push(breach(
                i,
                "iteration bound ceil(1/(3 tau^2))",
                format!("more than {} updates requested", tr.bound),
            ));
        }
        let halt = match tr.halt {
            HaltReason::Converged => "converged",
            HaltReason::IterationCap => "iteration-cap",
            HaltReason::OracleViolation => "oracle-violation",
        };
        Ok(LearnResult {
            summary: vec![
                info.index.into(),
                info.seed.into(),
                ti.into(),
                tr.records.len().into(),
                tr.updates().into(),
                halt.into(),
                dis.into(),
                potential.into(),
                oracle.query_count().into(),
            ],
            rows,
            breaches,
            disagreement: dis,
            converged: tr.halt == HaltReason::Converged,
        })
    });
    let mut summary = Rows::new(&[
        "run",
        "seed",
        "target",
        "iterations",
        "updates",
        "halt",
        "final_disagreement",
        "final_potential",
        "queries",
    ]);
    let mut files = Vec::new();
    let mut breaches = Vec::new();
    let (mut worst, mut converged) = (0.0f64, 0usize);
    for (info, r) in runs.iter().zip(results) {
        let r = r?;
        worst = worst.max(r.disagreement);
        converged += r.converged as usize;
        summary.push(r.summary);
        files.push((format!("learn-{:05}", info.index), r.rows));
        breaches.extend(r.breaches);
    }
    let mut metrics = BTreeMap::new();
    metrics.insert("runs".into(), runs.len() as f64);
    metrics.insert("converged_rate".into(), rate(converged, runs.len()));
    metrics.insert("max_disagreement".into(), worst);
    Ok(RunOutput {
        files,
        summary,
        metrics,
        runs,
        breaches,
    })
}

/// Disjunction evolver, one run per seed: random distribution (when
/// requested), random target and random start.
pub fn run_evolve(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let n = cfg.n;
    let eps = cfg.epsilon;
    let class = cfg.concept_class()?;
    let d = cfg.domain()?;
    let (_, gain) = disjunction_params(n, eps);
    let theta = cfg.tau.unwrap_or(gain);
    let lp = evolve_lsq_params(theta, eps, n as usize + 2, cfg.c_hoeffding.unwrap_or(DEFAULT_C_HOEFFDING))?;
    let mutator = disjunction_mutator(n, eps, lp.delta)?;
    let params = lp.selnb_lazy(Loss::Quadratic);
    let runs: Vec<RunInfo> = cfg
        .seeds
        .iter()
        .enumerate()
        .map(|(i, &seed)| RunInfo {
            index: i,
            seed,
            label: "disjunction".into(),
        })
        .collect();
    let results = par::map(&runs, |info| -> Result<(usize, crate::evolve::EvolutionTrace)> {
        let dist = cfg.distribution(info.seed)?;
        let mut pick = rng::stream(info.seed, 0, "evolve-target");
        let ti = pick.random_range(0..class.len());
        let f = &class.members()[ti];
        let mut start = rng::stream(info.seed, 0, "evolve-start");
        let r0 = Representation::new(RealFn::random(d, &mut start), "initial");
        let mut opts = RunOptions::new(lp.g);
        opts.stop_on_target = true;
        opts.max_generations = Some(cfg.max_generations.unwrap_or(DEFAULT_MAX_GENERATIONS));
        opts.record_pools = false;
        let mut r = rng::stream(info.seed, 0, "evolve-run");
        Ok((ti, evolve_run(&mutator, &params, f, &dist, eps, r0, &opts, &mut r)?))
    });
    let mut summary = Rows::new(&[
        "run",
        "seed",
        "target",
        "generations",
        "final_perf",
        "reached_target",
        "monotone_exact",
        "monotone_within_slack",
        "hit_bottom",
    ]);
    let mut files = Vec::new();
    let (mut reached, mut monotone) = (0usize, 0usize);
    for (info, r) in runs.iter().zip(results) {
        let (ti, tr) = r?;
        let mut rows = Rows::new(&EVOLVE_HEADER);
        for g in &tr.records {
            rows.push(vec![
                g.generation.into(),
                g.true_perf.into(),
                Cell::opt(g.empirical_perf),
                g.outcome.as_str().into(),
                g.bene_count.into(),
                g.neut_count.into(),
            ]);
        }
        if tr.reached_target {
            reached += 1;
            monotone += tr.monotone_exact as usize;
        }
        summary.push(vec![
            info.index.into(),
            info.seed.into(),
            ti.into(),
            tr.steps().into(),
            tr.final_perf().into(),
            tr.reached_target.into(),
            tr.monotone_exact.into(),
            tr.monotone_within_slack.into(),
            tr.hit_bottom.into(),
        ]);
        files.push((format!("evolve-{:05}", info.index), rows));
    }
    let mut metrics = BTreeMap::new();
    metrics.insert("runs".into(), runs.len() as f64);
    metrics.insert("reached_rate".into(), rate(reached, runs.len()));
    metrics.insert("monotone_rate_of_reached".into(), rate(monotone, reached));
    metrics.insert("theta".into(), lp.theta);
    metrics.insert("g".into(), lp.g as f64);
    metrics.insert("t".into(), lp.t);
    metrics.insert("p".into(), lp.p as f64);
    metrics.insert("s".into(), lp.s as f64);
    metrics.insert("delta".into(), lp.delta);
    metrics.insert("lazy_pool".into(), lp.lazy_pool as f64);
    Ok(RunOutput {
        files,
        summary,
        metrics,
        runs,
        breaches: vec![],
    })
}

fn report_row(seed: u64, kind: &str, r: &dimensions::DimReport) -> Vec<Cell> {
    let witness: Vec<String> = r.witness.iter().map(|w| w.to_string()).collect();
    let certainty = match r.certainty {
        dimensions::Certainty::Exact => "exact",
        dimensions::Certainty::LowerBound => "lower-bound",
        dimensions::Certainty::UpperBound => "upper-bound",
    };
    vec![
        seed.into(),
        kind.into(),
        r.value.into(),
        certainty.into(),
        witness.join(" ").into(),
        Cell::opt(r.params.gamma),
        Cell::opt(r.params.bound),
        r.params.psi_index.map_or(Cell::Empty, Cell::from),
    ]
}

/// SQ-DIM of the class, the norm-scaling SQD lower bound and the
/// strong-dimension estimate at `epsilon`, per seed.
pub fn run_dim(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let class = cfg.concept_class()?;
    let set = FnSet::from_class(&class);
    let runs: Vec<RunInfo> = cfg
        .seeds
        .iter()
        .enumerate()
        .map(|(i, &seed)| RunInfo {
            index: i,
            seed,
            label: class.name().into(),
        })
        .collect();
    let results = par::map(&runs, |info| -> Result<(Vec<Vec<Cell>>, Vec<Breach>)> {
        let dist = cfg.distribution(info.seed)?;
        let mode = if set.len() <= DEFAULT_EXACT_CAP {
            SqDimMode::Exact
        } else {
            SqDimMode::Greedy
        };
        let dim = dimensions::sq_dim(&set, &dist, mode)?;
        let mut breaches = Vec::new();
        if !dimensions::revalidate(&set, &dist, &dim)? {
            breaches.push(breach(
                info.index,
                "SQ-DIM witness pairwise |<f_i, f_j>_D| <= 1/d",
                format!("witness of size {} fails", dim.value),
            ));
        }
        let lower = dimensions::sqd_lower_scaling(&set, &dist, 1.0, 1.0)?;
        let fam = dimensions::default_psi_family(&class, cfg.psi_samples.unwrap_or(DEFAULT_PSI_SAMPLES), info.seed);
        let sdim = dimensions::sq_sdim_estimate(&class, &dist, cfg.epsilon, &fam)?;
        Ok((
            vec![
                report_row(info.seed, "sq_dim", &dim),
                report_row(info.seed, "sqd_lower_scaling", &lower),
                report_row(info.seed, "sq_sdim_estimate", &sdim),
            ],
            breaches,
        ))
    });
    let mut reports = Rows::new(&REPORT_HEADER);
    let mut summary = Rows::new(&["run", "seed", "sq_dim", "sqd_lower", "sq_sdim_estimate"]);
    let mut breaches = Vec::new();
    for (info, r) in runs.iter().zip(results) {
        let (rows, b) = r?;
        summary.push(vec![
            info.index.into(),
            info.seed.into(),
            rows[0][2].clone(),
            rows[1][2].clone(),
            rows[2][2].clone(),
        ]);
        for row in rows {
            reports.push(row);
        }
        breaches.extend(b);
    }
    let mut metrics = BTreeMap::new();
    metrics.insert("runs".into(), runs.len() as f64);
    metrics.insert("class_size".into(), set.len() as f64);
    Ok(RunOutput {
        files: vec![("reports".into(), reports)],
        summary,
        metrics,
        runs,
        breaches,
    })
}

/// Weak agnostic learner with the class as pool. Per seed the label
/// expectation is `phi_A = (c + r) / 2` for a random member `c` and a random
/// `r` in `F^inf_1`.
pub fn run_agnostic(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let tau = cfg.tau.ok_or_else(|| Error::config("tau", "required for agnostic"))?;
    let class = cfg.concept_class()?;
    let d = cfg.domain()?;
    let spec = cfg.oracle_spec()?;
    let pool = ApproxSet::new(
        class.members().iter().map(|c| c.as_real().clone()).collect(),
        Provenance::User,
        tau,
    )?;
    let runs: Vec<RunInfo> = cfg
        .seeds
        .iter()
        .enumerate()
        .map(|(i, &seed)| RunInfo {
            index: i,
            seed,
            label: class.name().into(),
        })
        .collect();
    let results = par::map(&runs, |info| -> Result<(Vec<Cell>, Vec<Breach>)> {
        let dist = cfg.distribution(info.seed)?;
        let mut r = rng::stream(info.seed, 0, "agnostic-phi");
        let c = &class.members()[r.random_range(0..class.len())];
        let noise = RealFn::random(d, &mut r);
        let phi = RealFn::from_table(Table::from_fn(d, |x| (c.at(x) + noise.at(x)) / 2.0))?;
        let a = AgnosticDist::new(dist.clone(), phi.clone())?;
        let mode = spec.mode(info.seed, 0);
        let mut oracle = AgnosticOracle::new(a, mode);
        let w = crate::sqcore::weak_agnostic_learner(&pool, &mut oracle, tau)?;
        let corr = fnspace::inner_product(&w.hypothesis, &phi, &dist)?;
        let best = pool
            .members()
            .iter()
            .map(|g| fnspace::inner_product(g, &phi, &dist).map(f64::abs))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let holds = corr >= best - 2.0 * tau - TOL;
        let mut breaches = Vec::new();
        let bad = if matches!(mode, crate::oracles::OracleMode::Empirical { .. }) {
            vec![]
        } else {
            crate::oracles::audit_log(oracle.log())
        };
        if !bad.is_empty() {
            breaches.push(oracle_breach(info.index, &bad, oracle.log().len()));
        } else if !holds && mode.is_valid_by_construction() {
            breaches.push(breach(
                info.index,
                "weak agnostic guarantee <h, phi_A> >= max_g |<g, phi_A>| - 2 tau",
                format!("{corr} < {best} - {}", 2.0 * tau),
            ));
        }
        Ok((
            vec![
                info.index.into(),
                info.seed.into(),
                w.index.into(),
                w.sign.into(),
                w.answer.into(),
                corr.into(),
                best.into(),
                holds.into(),
            ],
            breaches,
        ))
    });
    let header = ["run", "seed", "index", "sign", "answer", "correlation", "best", "guarantee_holds"];
    let mut reports = Rows::new(&header);
    let mut breaches = Vec::new();
    let mut held = 0usize;
    for r in results {
        let (row, b) = r?;
        held += matches!(&row[7], Cell::Str(s) if s == "true") as usize;
        reports.push(row);
        breaches.extend(b);
    }
    let mut metrics = BTreeMap::new();
    metrics.insert("runs".into(), runs.len() as f64);
    metrics.insert("guarantee_rate".into(), rate(held, runs.len()));
    Ok(RunOutput {
        files: vec![],
        summary: reports,
        metrics,
        runs,
        breaches,
    })
}
