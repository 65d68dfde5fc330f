use crate::error::{Error, Result};
use crate::fnspace::{ConceptClass, RealFn};
use crate::oracles::{Query, SqOracle};

/// Interactive SQ algorithm: it asks queries one at a time, receives an
/// answer for each, then produces a hypothesis.
pub trait SqAlgorithm {
    fn id(&self) -> String;

    /// Tolerance of every query the algorithm issues.
    fn tolerance(&self) -> f64;

    /// Accuracy the algorithm promises under valid answers.
    fn accuracy(&self) -> f64;

    /// Next query, or `None` once the algorithm is ready to output.
    fn next_query(&mut self) -> Option<Query>;

    fn receive_answer(&mut self, value: f64);

    fn output(&mut self) -> RealFn;
}

/// Drives `alg` against a real oracle.
pub fn run_with_oracle(alg: &mut dyn SqAlgorithm, oracle: &mut SqOracle, budget: usize) -> Result<RealFn> {
    let mut asked = 0usize;
    while let Some(q) = alg.next_query() {
        asked += 1;
        if asked > budget {
            return Err(Error::QueryBudgetExceeded(budget));
        }
        let v = oracle.stat_query(&q)?;
        alg.receive_answer(v);
    }
    Ok(alg.output())
}

/// Baseline learner for a finite class: asks `<c_j, f>_D` with tolerance
/// `eps / 2` for every member and outputs the member with the largest answer
/// (lowest index on ties).
#[derive(Clone, Debug)]
pub struct ExhaustiveCsq {
    class: ConceptClass,
    eps: f64,
    answers: Vec<f64>,
}

impl ExhaustiveCsq {
    pub fn new(class: ConceptClass, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("eps = {eps} not in (0, 1)")));
        }
        if class.is_empty() {
            return Err(Error::EmptyClass);
        }
        Ok(Self {
            answers: Vec::with_capacity(class.len()),
            class,
            eps,
        })
    }

    fn best(&self) -> usize {
        let mut best = 0;
        for (j, &v) in self.answers.iter().enumerate() {
            if v > self.answers[best] {
                best = j;
            }
        }
        best
    }

    /// Index of the member that would be output now.
    pub fn chosen_index(&self) -> usize {
        self.best()
    }
}

impl SqAlgorithm for ExhaustiveCsq {
    fn id(&self) -> String {
        format!("exhaustive-csq[{}; eps={}]", self.class.name(), self.eps)
    }

    fn tolerance(&self) -> f64 {
        self.eps / 2.0
    }

    fn accuracy(&self) -> f64 {
        self.eps
    }

    fn next_query(&mut self) -> Option<Query> {
        let j = self.answers.len();
        self.class
            .members()
            .get(j)
            .map(|c| Query::correlational(c.as_real().clone(), self.tolerance()))
    }

    fn receive_answer(&mut self, value: f64) {
        self.answers.push(value);
    }

    fn output(&mut self) -> RealFn {
        // An algorithm stopped early still answers with its best so far.
        if self.answers.is_empty() {
            return self.class.members()[0].as_real().clone();
        }
        self.class.members()[self.best()].as_real().clone()
    }
}

/// Runs [`ExhaustiveCsq`] against `oracle` and returns its hypothesis.
pub fn exhaustive_csq_learner(class: &ConceptClass, oracle: &mut SqOracle, eps: f64) -> Result<RealFn> {
    let mut alg = ExhaustiveCsq::new(class.clone(), eps)?;
    run_with_oracle(&mut alg, oracle, class.len())
}
