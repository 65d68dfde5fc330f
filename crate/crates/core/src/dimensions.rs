//! SQ dimensions of finite function sets: exact and greedy SQ-DIM,
//! pool-restricted SQD upper bounds, the norm-scaling lower bound, shifted
//! sets and strong-dimension estimates, and the parity witness for
//! conjunctions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fnspace::{self, ConceptClass, Dist, Domain, RealFn, Table, TOL};
use crate::par;

/// Largest set accepted by exact SQ-DIM search.
pub const DEFAULT_EXACT_CAP: usize = 30;
const MAX_EXACT_CAP: usize = 64;

/// Ordered set of functions with range in `[-2, 2]`. `sources` maps each
/// member back to its index in whatever it was derived from.
#[derive(Clone, Debug, PartialEq)]
pub struct FnSet {
    domain: Domain,
    members: Vec<Table>,
    sources: Vec<usize>,
}

impl FnSet {
    pub fn new(members: Vec<Table>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::EmptyPool);
        };
        let domain = first.domain();
        let sources = (0..members.len()).collect();
        Self::build(domain, members, sources)
    }

    /// The empty set, as produced by a shift that leaves nothing outside the ball.
    pub fn empty(domain: Domain) -> Self {
        Self {
            domain,
            members: Vec::new(),
            sources: Vec::new(),
        }
    }

    fn build(domain: Domain, members: Vec<Table>, sources: Vec<usize>) -> Result<Self> {
        for (i, m) in members.iter().enumerate() {
            if m.domain() != domain {
                return Err(Error::DomainMismatch {
                    left: domain.vars(),
                    right: m.domain().vars(),
                });
            }
            if m.max_abs() > 2.0 + TOL {
                return Err(Error::ValueOutOfRange {
                    index: i,
                    value: m.max_abs(),
                    what: "function set member (bound 2)",
                });
            }
        }
        Ok(Self {
            domain,
            members,
            sources,
        })
    }

    pub fn from_real(fs: &[RealFn]) -> Result<Self> {
        Self::new(fs.iter().map(|f| f.table().clone()).collect())
    }

    pub fn from_class(c: &ConceptClass) -> Self {
        let members = c.members().iter().map(|f| f.as_real().table().clone()).collect();
        Self::build(c.domain(), members, (0..c.len()).collect()).expect("class members are Boolean")
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn members(&self) -> &[Table] {
        &self.members
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members scaled by `c`.
    pub fn scaled(&self, c: f64) -> Result<FnSet> {
        let members = self.members.iter().map(|m| m.scale(c)).collect();
        Self::build(self.domain, members, self.sources.clone())
    }

    /// Members in the order given by `idx`.
    pub fn select(&self, idx: &[usize]) -> FnSet {
        FnSet {
            domain: self.domain,
            members: idx.iter().map(|&i| self.members[i].clone()).collect(),
            sources: idx.iter().map(|&i| self.sources[i]).collect(),
        }
    }

    fn check_dist(&self, d: &Dist) -> Result<()> {
        if d.domain() != self.domain {
            return Err(Error::DomainMismatch {
                left: self.domain.vars(),
                right: d.domain().vars(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certainty {
    Exact,
    LowerBound,
    UpperBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqDimMode {
    Exact,
    Greedy,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DimParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Real-valued bound before rounding to an integer.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_family: Option<String>,
    /// Index of the maximizing shift within the family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// A dimension value with its certainty and witness. Witness entries are
/// indices into the set the report was computed from (or into the pool for
/// cover reports).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimReport {
    pub value: usize,
    pub certainty: Certainty,
    pub witness: Vec<usize>,
    pub params: DimParams,
}

impl DimReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// `|<f_i, f_j>_D|` for all pairs.
pub fn abs_gram(f: &FnSet, d: &Dist) -> Result<Vec<Vec<f64>>> {
    f.check_dist(d)?;
    let w = d.weights();
    let m = &f.members;
    Ok(par::map_range(m.len(), |i| {
        m.iter()
            .map(|g| fnspace::inner_unchecked(m[i].values(), g.values(), w).abs())
            .collect()
    }))
}

/// Whether every pair in `idx` has `|<f_i, f_j>| <= 1/|idx|`.
pub fn is_almost_orthogonal(gram: &[Vec<f64>], idx: &[usize]) -> bool {
    let thr = 1.0 / idx.len() as f64 + TOL;
    idx.iter()
        .enumerate()
        .all(|(a, &i)| idx[a + 1..].iter().all(|&j| gram[i][j] <= thr))
}

/// Re-checks an SQ-DIM witness against the set it came from.
pub fn revalidate(f: &FnSet, d: &Dist, report: &DimReport) -> Result<bool> {
    if report.value == 0 {
        return Ok(report.witness.is_empty());
    }
    if report.witness.len() != report.value || report.witness.iter().any(|&i| i >= f.len()) {
        return Ok(false);
    }
    Ok(is_almost_orthogonal(&abs_gram(f, d)?, &report.witness))
}

pub fn sq_dim(f: &FnSet, d: &Dist, mode: SqDimMode) -> Result<DimReport> {
    sq_dim_with_cap(f, d, mode, DEFAULT_EXACT_CAP)
}

/// SQ-DIM of `f` under `d`: the largest `k` with `k` members pairwise
/// correlated at most `1/k` in absolute value.
pub fn sq_dim_with_cap(f: &FnSet, d: &Dist, mode: SqDimMode, cap: usize) -> Result<DimReport> {
    let cap = cap.min(MAX_EXACT_CAP);
    if mode == SqDimMode::Exact && f.len() > cap {
        return Err(Error::CapExceeded { size: f.len(), cap });
    }
    if f.is_empty() {
        f.check_dist(d)?;
        return Ok(DimReport {
            value: 0,
            certainty: Certainty::Exact,
            witness: vec![],
            params: DimParams::default(),
        });
    }
    let gram = abs_gram(f, d)?;
    let (witness, certainty) = match mode {
        SqDimMode::Exact => (exact_search(&gram), Certainty::Exact),
        SqDimMode::Greedy => (greedy_search(&gram), Certainty::LowerBound),
    };
    Ok(DimReport {
        value: witness.len(),
        certainty,
        witness,
        params: DimParams::default(),
    })
}

fn exact_search(gram: &[Vec<f64>]) -> Vec<usize> {
    let m = gram.len();
    for k in (2..=m).rev() {
        let thr = 1.0 / k as f64 + TOL;
        let adj: Vec<u64> = (0..m)
            .map(|i| {
                (0..m)
                    .filter(|&j| j != i && gram[i][j] <= thr)
                    .fold(0u64, |acc, j| acc | (1 << j))
            })
            .collect();
        // Vertices that could sit in a k-clique.
        let alive = (0..m)
            .filter(|&i| adj[i].count_ones() as usize >= k - 1)
            .fold(0u64, |acc, i| acc | (1 << i));
        if (alive.count_ones() as usize) < k {
            continue;
        }
        // One branch per lowest clique vertex; the first success wins.
        let found = par::map_range(m, |v| {
            if alive & (1 << v) == 0 {
                return None;
            }
            let mut clique = vec![v];
            let cand = adj[v] & alive & above(v);
            find_clique(&adj, cand, k - 1, &mut clique).then_some(clique)
        });
        if let Some(c) = found.into_iter().flatten().next() {
            return c;
        }
    }
    vec![0]
}

fn above(v: usize) -> u64 {
    if v >= 63 {
        0
    } else {
        !0u64 << (v + 1)
    }
}

fn find_clique(adj: &[u64], cand: u64, need: usize, clique: &mut Vec<usize>) -> bool {
    if need == 0 {
        return true;
    }
    if (cand.count_ones() as usize) < need {
        return false;
    }
    let mut rest = cand;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if (rest.count_ones() as usize) + 1 < need {
            return false;
        }
        clique.push(v);
        if find_clique(adj, cand & adj[v] & above(v), need - 1, clique) {
            return true;
        }
        clique.pop();
    }
    false
}

fn greedy_search(gram: &[Vec<f64>]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..gram.len() {
        chosen.push(i);
        if !is_almost_orthogonal(gram, &chosen) {
            chosen.pop();
        }
    }
    chosen
}

/// Greedy cover of `f` by pool functions `gamma`-correlated with each member.
/// The witness lists the chosen pool indices in pick order.
pub fn sqd_upper(f: &FnSet, d: &Dist, gamma: f64, pool: &FnSet) -> Result<DimReport> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} must be positive")));
    }
    f.check_dist(d)?;
    pool.check_dist(d)?;
    if let Some((j, g)) = pool.members.iter().enumerate().find(|(_, g)| g.max_abs() > 1.0 + TOL) {
        return Err(Error::ValueOutOfRange {
            index: j,
            value: g.max_abs(),
            what: "pool member (bound 1)",
        });
    }
    let w = d.weights();
    let covers: Vec<Vec<bool>> = par::map(&pool.members, |g| {
        f.members
            .iter()
            .map(|h| fnspace::inner_unchecked(g.values(), h.values(), w).abs() >= gamma - TOL)
            .collect()
    });
    let uncovered: Vec<usize> = (0..f.len())
        .filter(|&i| !covers.iter().any(|c| c[i]))
        .collect();
    if !uncovered.is_empty() {
        return Err(Error::PoolInsufficient { uncovered });
    }
    let mut left = vec![true; f.len()];
    let mut remaining = f.len();
    let mut picks = Vec::new();
    while remaining > 0 {
        let gain = |c: &Vec<bool>| c.iter().zip(&left).filter(|(a, b)| **a && **b).count();
        let (j, best) = covers
            .iter()
            .enumerate()
            .map(|(j, c)| (j, gain(c)))
            .fold((0, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
        debug_assert!(best > 0);
        for (l, &c) in left.iter_mut().zip(&covers[j]) {
            if c {
                *l = false;
            }
        }
        remaining -= best;
        picks.push(j);
    }
    Ok(DimReport {
        value: picks.len(),
        certainty: Certainty::UpperBound,
        witness: picks,
        params: DimParams {
            gamma: Some(gamma),
            ..Default::default()
        },
    })
}

/// SQD lower bound from SQ-DIM for sets with norms in `[m, big_m]`:
/// `SQD(f, D, M (k m^2)^{-1/3}) >= (k m^2)^{1/3} / 2` where `k` is the SQ-DIM.
pub fn sqd_lower_scaling(f: &FnSet, d: &Dist, m: f64, big_m: f64) -> Result<DimReport> {
    if !(m > 0.0 && m <= 1.0 && big_m >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "norm bounds need 0 < m <= 1 <= M, got m = {m}, M = {big_m}"
        )));
    }
    f.check_dist(d)?;
    for (i, t) in f.members.iter().enumerate() {
        let nrm = fnspace::norm(t, d)?;
        if nrm < m - TOL || nrm > big_m + TOL {
            return Err(Error::NormOutOfRange {
                index: i,
                norm: nrm,
                min: m,
                max: big_m,
            });
        }
    }
    let mode = if f.len() <= DEFAULT_EXACT_CAP {
        SqDimMode::Exact
    } else {
        SqDimMode::Greedy
    };
    let dim = sq_dim(f, d, mode)?;
    let km2 = dim.value as f64 * m * m;
    let bound = km2.cbrt() / 2.0;
    let gamma = big_m / km2.cbrt();
    Ok(DimReport {
        value: (bound - TOL).ceil().max(0.0) as usize,
        certainty: Certainty::LowerBound,
        witness: dim.witness,
        params: DimParams {
            gamma: Some(gamma),
            bound: Some(bound),
            ..Default::default()
        },
    })
}

/// `(C \ B(sign psi, eps)) - psi`; sources index into `c`.
pub fn shifted_set(c: &ConceptClass, psi: &RealFn, d: &Dist, eps: f64) -> Result<FnSet> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} not in (0, 1)")));
    }
    let s = fnspace::sign_of(psi);
    let mut members = Vec::new();
    let mut sources = Vec::new();
    for (i, f) in c.members().iter().enumerate() {
        if fnspace::disagreement(f, &s, d)? > eps {
            members.push(f.as_real().table().sub(psi)?);
            sources.push(i);
        }
    }
    FnSet::build(c.domain(), members, sources)
}

/// `{0}`, the class members, then `random` seeded random functions.
pub fn default_psi_family(c: &ConceptClass, random: usize, seed: u64) -> Vec<RealFn> {
    let d = c.domain();
    let mut fam = vec![RealFn::zero(d)];
    fam.extend(c.members().iter().map(|f| f.as_real().clone()));
    let mut rng = crate::rng::stream(seed, 0, "psi-family");
    fam.extend((0..random).map(|_| RealFn::random(d, &mut rng)));
    fam
}

/// Largest SQ-DIM of a shifted set over the supplied shifts. Always a lower
/// bound on the strong dimension. The witness lists class indices.
pub fn sq_sdim_estimate(c: &ConceptClass, d: &Dist, eps: f64, family: &[RealFn]) -> Result<DimReport> {
    if family.is_empty() {
        return Err(Error::InvalidParameter("empty psi family".into()));
    }
    let per_psi = par::map(family, |psi| -> Result<DimReport> {
        let s = shifted_set(c, psi, d, eps)?;
        let mode = if s.len() <= DEFAULT_EXACT_CAP {
            SqDimMode::Exact
        } else {
            SqDimMode::Greedy
        };
        let mut r = sq_dim(&s, d, mode)?;
        r.witness = r.witness.iter().map(|&i| s.sources()[i]).collect();
        Ok(r)
    });
    let mut best: Option<(usize, DimReport)> = None;
    for (k, r) in per_psi.into_iter().enumerate() {
        let r = r?;
        if best.as_ref().is_none_or(|(_, b)| r.value > b.value) {
            best = Some((k, r));
        }
    }
    let (k, r) = best.expect("family is nonempty");
    Ok(DimReport {
        value: r.value,
        certainty: Certainty::LowerBound,
        witness: r.witness,
        params: DimParams {
            eps: Some(eps),
            psi_family: Some(format!("{} shifts", family.len())),
            psi_index: Some(k),
            note: Some("supremum restricted to the supplied shifts".into()),
            ..Default::default()
        },
    })
}

/// Nonempty parities of degree at most `k` under the uniform distribution,
/// each checked to lie within L1 distance `1 - gamma` of its conjunction
/// (`gamma` defaults to `2^{-k+1}`).
pub fn parity_witness(n: u32, k: u32, gamma_target: Option<f64>) -> Result<(FnSet, DimReport)> {
    let domain = Domain::new(n)?;
    if k > n || k == 0 {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let gamma = gamma_target.unwrap_or(2f64.powi(1 - k as i32));
    let u = Dist::uniform(domain);
    let size = domain.size();
    let masks: Vec<usize> = (1..size).filter(|t| t.count_ones() <= k).collect();
    let mut members = Vec::with_capacity(masks.len());
    for &t in &masks {
        let vars: Vec<usize> = (0..n as usize).filter(|i| t >> i & 1 == 1).collect();
        let chi = fnspace::make_parity(domain, &vars)?;
        let conj = fnspace::make_conjunction(domain, &vars)?;
        let l1 = fnspace::l1_distance(&chi, &conj, &u)?;
        if l1 > 1.0 - gamma + TOL {
            return Err(Error::InvalidParameter(format!(
                "parity {t:#b} is at L1 distance {l1} from its conjunction, outside radius {}",
                1.0 - gamma
            )));
        }
        members.push(chi.as_real().table().clone());
    }
    let set = FnSet::build(domain, members, masks)?;
    let all: Vec<usize> = (0..set.len()).collect();
    // A fully qualifying set is its own maximum; no search is needed.
    let report = if is_almost_orthogonal(&abs_gram(&set, &u)?, &all) {
        DimReport {
            value: set.len(),
            certainty: Certainty::Exact,
            witness: all,
            params: DimParams::default(),
        }
    } else {
        sq_dim(&set, &u, SqDimMode::Greedy)?
    };
    let report = DimReport {
        params: DimParams {
            gamma: Some(gamma),
            ..report.params
        },
        ..report
    };
    Ok((set, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fnspace::{BoolFn, ConceptClass};

    fn dom(n: u32) -> Domain {
        Domain::new(n).unwrap()
    }

    #[test]
    fn parities_are_their_own_witness() {
        for n in 1..=4 {
            let d = dom(n);
            let p = FnSet::from_class(&ConceptClass::parities(d, None));
            let u = Dist::uniform(d);
            let r = sq_dim(&p, &u, SqDimMode::Exact).unwrap();
            assert_eq!(r.value, 1 << n);
            assert_eq!(r.certainty, Certainty::Exact);
            assert!(revalidate(&p, &u, &r).unwrap());
        }
    }

    #[test]
    fn singleton_and_duplicate() {
        let d = dom(3);
        let u = Dist::uniform(d);
        let f = fnspace::make_disjunction(d, &[1]).unwrap();
        let one = FnSet::from_real(&[f.as_real().clone()]).unwrap();
        assert_eq!(sq_dim(&one, &u, SqDimMode::Exact).unwrap().value, 1);
        let two = FnSet::from_real(&[f.as_real().clone(), f.as_real().clone()]).unwrap();
        assert_eq!(sq_dim(&two, &u, SqDimMode::Exact).unwrap().value, 1);
        assert_eq!(sq_dim(&two, &u, SqDimMode::Greedy).unwrap().value, 1);
    }

    #[test]
    fn cap_is_enforced() {
        let d = dom(5);
        let p = FnSet::from_class(&ConceptClass::parities(d, None));
        let u = Dist::uniform(d);
        assert!(matches!(
            sq_dim(&p, &u, SqDimMode::Exact),
            Err(Error::CapExceeded { size: 32, cap: 30 })
        ));
        assert_eq!(sq_dim(&p, &u, SqDimMode::Greedy).unwrap().value, 32);
    }

    #[test]
    fn exact_finds_hidden_clique() {
        // Three orthogonal parities hidden among near-copies of one of them.
        let d = dom(4);
        let u = Dist::uniform(d);
        let chi = |v: &[usize]| fnspace::make_parity(d, v).unwrap().as_real().table().clone();
        let base = chi(&[0]);
        let mut almost = base.values().to_vec();
        almost[0] = -almost[0];
        let near = Table::new(d, almost).unwrap();
        let set = FnSet::new(vec![base.clone(), near.clone(), near, chi(&[1]), chi(&[2])]).unwrap();
        let r = sq_dim(&set, &u, SqDimMode::Exact).unwrap();
        assert_eq!(r.value, 3);
        assert!(revalidate(&set, &u, &r).unwrap());
        let g = sq_dim(&set, &u, SqDimMode::Greedy).unwrap();
        assert!(g.value <= r.value);
    }

    #[test]
    fn cover_examples() {
        let d = dom(3);
        let u = Dist::uniform(d);
        let p = FnSet::from_class(&ConceptClass::parities(d, None));
        let r = sqd_upper(&p, &u, 0.5, &p).unwrap();
        assert_eq!(r.value, 8);
        let single = p.select(&[5]);
        assert_eq!(sqd_upper(&single, &u, 1.0, &p).unwrap().value, 1);
        let thin = p.select(&[0, 1]);
        match sqd_upper(&p, &u, 0.5, &thin) {
            Err(Error::PoolInsufficient { uncovered }) => assert_eq!(uncovered, vec![2, 3, 4, 5, 6, 7]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scaling_bound_arithmetic() {
        let d = dom(3);
        let u = Dist::uniform(d);
        let p = FnSet::from_class(&ConceptClass::parities(d, None));
        let r = sqd_lower_scaling(&p, &u, 1.0, 1.0).unwrap();
        assert_eq!(r.value, 1);
        assert!((r.params.gamma.unwrap() - 0.5).abs() < 1e-12);
        assert!((r.params.bound.unwrap() - 1.0).abs() < 1e-12);
        let half = p.scaled(0.5).unwrap();
        assert!(matches!(
            sqd_lower_scaling(&half, &u, 0.6, 1.0),
            Err(Error::NormOutOfRange { index: 0, .. })
        ));
    }

    #[test]
    fn shifted_set_examples() {
        let d = dom(3);
        let u = Dist::uniform(d);
        let f = fnspace::make_conjunction(d, &[0]).unwrap();
        let c = ConceptClass::new("one", vec![f.clone()]).unwrap();
        assert!(shifted_set(&c, f.as_real(), &u, 0.1).unwrap().is_empty());
        let par = ConceptClass::parities(d, None);
        let s = shifted_set(&par, &RealFn::zero(d), &u, 0.1).unwrap();
        // chi_empty is the constant +1 = sign(0), so it falls inside the ball.
        assert_eq!(s.len(), 7);
        let r = sq_sdim_estimate(&par, &u, 0.1, &[RealFn::zero(d)]).unwrap();
        assert_eq!(r.value, 7);
        assert_eq!(r.certainty, Certainty::LowerBound);
        let r = sq_sdim_estimate(&c, &u, 0.1, &[f.as_real().clone()]).unwrap();
        assert_eq!(r.value, 0);
    }

    #[test]
    fn shifted_members_have_large_norm() {
        let d = dom(4);
        let c = ConceptClass::conjunctions(d);
        for seed in 0..10 {
            let dist = Dist::random(d, seed);
            for (k, psi) in default_psi_family(&c, 5, seed).iter().enumerate() {
                let s = shifted_set(&c, psi, &dist, 0.1).unwrap();
                for m in s.members() {
                    assert!(fnspace::norm(m, &dist).unwrap() >= 0.1f64.sqrt() - 1e-12, "psi {k}");
                }
            }
        }
    }

    #[test]
    fn family_growth_is_monotone() {
        let d = dom(3);
        let dist = Dist::random(d, 4);
        let c = ConceptClass::conjunctions(d);
        let fam = default_psi_family(&c, 6, 1);
        let mut last = 0;
        for k in 1..=fam.len() {
            let v = sq_sdim_estimate(&c, &dist, 0.2, &fam[..k]).unwrap().value;
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn parity_witness_counts() {
        let (set, r) = parity_witness(5, 2, None).unwrap();
        assert_eq!(set.len(), 15);
        assert_eq!(r.value, 15);
        assert_eq!(r.certainty, Certainty::Exact);
        let (set, _) = parity_witness(3, 3, None).unwrap();
        assert_eq!(set.len(), 7);
        assert!(parity_witness(3, 4, None).is_err());
        let (big, r) = parity_witness(8, 3, None).unwrap();
        assert_eq!(big.len(), 8 + 28 + 56);
        assert_eq!(r.value, 92);
    }

    #[test]
    fn report_json() {
        let d = dom(2);
        let p = FnSet::from_class(&ConceptClass::parities(d, None));
        let r = sq_dim(&p, &Dist::uniform(d), SqDimMode::Exact).unwrap();
        assert_eq!(r.to_json(), r#"{"value":4,"certainty":"exact","witness":[0,1,2,3],"params":{}}"#);
    }

    #[test]
    fn negation_keeps_the_dimension() {
        let d = dom(3);
        let dist = Dist::random(d, 8);
        let c = ConceptClass::disjunctions(d);
        let base = FnSet::from_class(&c);
        let v = sq_dim(&base, &dist, SqDimMode::Exact).unwrap().value;
        for i in 0..c.len() {
            let mut members: Vec<BoolFn> = c.members().to_vec();
            members[i] = members[i].neg();
            let flipped = FnSet::from_class(&ConceptClass::new("flip", members).unwrap());
            assert_eq!(sq_dim(&flipped, &dist, SqDimMode::Exact).unwrap().value, v);
        }
    }
}
