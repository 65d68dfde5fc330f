//! Function space over `{0,1}^n`: domains, explicit tables, distributions,
//! the `D`-weighted inner product and the unit projection.
//!
//! Point `x` is identified with its index in `0..2^n`; coordinate `i`
//! (zero-based) is bit `i` of the index. Variable index sets are zero-based
//! slices throughout the API.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Binomial, Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Default cap on the number of variables (2^20 points per table).
pub const DEFAULT_MAX_VARS: u32 = 20;

/// Absolute tolerance for floating-point comparisons.
pub const TOL: f64 = 1e-12;

/// Drift of a weight vector's total mass that is silently renormalized.
pub const DIST_DRIFT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Domain {
    n: u32,
}

impl Domain {
    pub fn new(n: u32) -> Result<Self> {
        Self::with_cap(n, DEFAULT_MAX_VARS)
    }

    pub fn with_cap(n: u32, cap: u32) -> Result<Self> {
        if n == 0 || n > cap || n > 30 {
            return Err(Error::InvalidDomain { n, cap });
        }
        Ok(Self { n })
    }

    pub fn vars(&self) -> u32 {
        self.n
    }

    pub fn size(&self) -> usize {
        1usize << self.n
    }

    /// Value of coordinate `i` at point `x`.
    #[inline]
    pub fn bit(x: usize, i: usize) -> bool {
        (x >> i) & 1 == 1
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.size()
    }

    /// Bitstring `x_1 x_2 ... x_n` for a point.
    pub fn bitstring(&self, x: usize) -> String {
        (0..self.n as usize)
            .map(|i| if Self::bit(x, i) { '1' } else { '0' })
            .collect()
    }

    pub fn parse_bitstring(&self, s: &str) -> Option<usize> {
        if s.len() != self.n as usize {
            return None;
        }
        let mut x = 0usize;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => x |= 1 << i,
                _ => return None,
            }
        }
        Some(x)
    }

    /// Bit mask of a variable set, rejecting out-of-range indices.
    pub fn mask(&self, vars: &[usize]) -> Result<usize> {
        let mut m = 0usize;
        for &i in vars {
            if i >= self.n as usize {
                return Err(Error::IndexOutOfRange { index: i, n: self.n });
            }
            m |= 1 << i;
        }
        Ok(m)
    }

    fn check(&self, other: &Domain) -> Result<()> {
        if self != other {
            return Err(Error::DomainMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

/// Unrestricted real-valued table over a domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    domain: Domain,
    values: Vec<f64>,
}

impl Table {
    pub fn new(domain: Domain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.size() {
            return Err(Error::TableSize {
                expected: domain.size(),
                got: values.len(),
            });
        }
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::ValueOutOfRange {
                index: i,
                value: v,
                what: "finite",
            });
        }
        Ok(Self { domain, values })
    }

    pub fn from_fn(domain: Domain, f: impl Fn(usize) -> f64) -> Self {
        Self {
            domain,
            values: domain.points().map(f).collect(),
        }
    }

    pub fn constant(domain: Domain, c: f64) -> Self {
        Self {
            domain,
            values: vec![c; domain.size()],
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, x: usize) -> f64 {
        self.values[x]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &impl AsRef<Table>, c: f64) -> Result<Table> {
        let other = other.as_ref();
        self.domain.check(&other.domain)?;
        Ok(Table {
            domain: self.domain,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + c * b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &impl AsRef<Table>) -> Result<Table> {
        self.add_scaled(other, -1.0)
    }

    pub fn scale(&self, c: f64) -> Table {
        Table {
            domain: self.domain,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn shift(&self, c: f64) -> Table {
        Table {
            domain: self.domain,
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }

    /// Text form: one `bitstring value` line per point, in index order.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * (self.domain.n as usize + 8));
        for (x, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{} {}", self.domain.bitstring(x), v);
        }
        out
    }

    /// Parses the text form. Lines may come in any order but every point must
    /// appear exactly once; blank lines and `#` comments are skipped.
    pub fn parse_text(text: &str) -> Result<Table> {
        let mut entries: Vec<(usize, String, f64)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(bits), Some(val), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: "expected `bitstring value`".into(),
                });
            };
            let v: f64 = val.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("bad value `{val}`"),
            })?;
            entries.push((lineno + 1, bits.to_string(), v));
        }
        let Some(first) = entries.first() else {
            return Err(Error::Parse {
                line: 0,
                msg: "empty table".into(),
            });
        };
        let domain = Domain::new(first.1.len() as u32).map_err(|e| Error::Parse {
            line: first.0,
            msg: e.to_string(),
        })?;
        let mut values = vec![f64::NAN; domain.size()];
        let mut seen = vec![false; domain.size()];
        for (line, bits, v) in entries {
            let x = domain.parse_bitstring(&bits).ok_or_else(|| Error::Parse {
                line,
                msg: format!("bad bitstring `{bits}`"),
            })?;
            if seen[x] {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate point `{bits}`"),
                });
            }
            seen[x] = true;
            values[x] = v;
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(Error::Parse {
                line: 0,
                msg: format!("missing point `{}`", domain.bitstring(x)),
            });
        }
        Table::new(domain, values)
    }
}

impl AsRef<Table> for Table {
    fn as_ref(&self) -> &Table {
        self
    }
}

/// Total function into `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealFn(Table);

impl RealFn {
    pub fn new(domain: Domain, values: Vec<f64>) -> Result<Self> {
        Self::from_table(Table::new(domain, values)?)
    }

    /// Accepts tables within [`TOL`] of `[-1, 1]`; such entries are snapped
    /// onto the interval.
    pub fn from_table(mut t: Table) -> Result<Self> {
        for (i, v) in t.values.iter_mut().enumerate() {
            if v.abs() > 1.0 + TOL {
                return Err(Error::ValueOutOfRange {
                    index: i,
                    value: *v,
                    what: "[-1, 1]",
                });
            }
            *v = v.clamp(-1.0, 1.0);
        }
        Ok(Self(t))
    }

    pub fn constant(domain: Domain, c: f64) -> Result<Self> {
        Self::from_table(Table::constant(domain, c))
    }

    pub fn zero(domain: Domain) -> Self {
        Self(Table::constant(domain, 0.0))
    }

    /// Seeded random function with i.i.d. uniform `[-1, 1]` entries.
    pub fn random(domain: Domain, rng: &mut impl Rng) -> Self {
        let values = domain.points().map(|_| rng.random_range(-1.0..=1.0)).collect();
        Self(Table { domain, values })
    }

    pub fn domain(&self) -> Domain {
        self.0.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.0.values
    }

    #[inline]
    pub fn at(&self, x: usize) -> f64 {
        self.0.values[x]
    }

    pub fn table(&self) -> &Table {
        &self.0
    }

    pub fn into_table(self) -> Table {
        self.0
    }

    pub fn neg(&self) -> RealFn {
        RealFn(self.0.scale(-1.0))
    }
}

impl AsRef<Table> for RealFn {
    fn as_ref(&self) -> &Table {
        &self.0
    }
}

/// Total `{-1, +1}`-valued function.
#[derive(Clone, Debug, PartialEq)]
pub struct BoolFn(RealFn);

impl BoolFn {
    pub fn from_fn(domain: Domain, f: impl Fn(usize) -> bool) -> Self {
        BoolFn(RealFn(Table::from_fn(domain, |x| if f(x) { 1.0 } else { -1.0 })))
    }

    pub fn from_table(t: Table) -> Result<Self> {
        if let Some((i, &v)) = t
            .values
            .iter()
            .enumerate()
            .find(|(_, &v)| v != 1.0 && v != -1.0)
        {
            return Err(Error::ValueOutOfRange {
                index: i,
                value: v,
                what: "{-1, +1}",
            });
        }
        Ok(BoolFn(RealFn(t)))
    }

    pub fn constant(domain: Domain, positive: bool) -> Self {
        Self::from_fn(domain, |_| positive)
    }

    pub fn domain(&self) -> Domain {
        self.0.domain()
    }

    pub fn values(&self) -> &[f64] {
        self.0.values()
    }

    #[inline]
    pub fn at(&self, x: usize) -> f64 {
        self.0.at(x)
    }

    #[inline]
    pub fn is_positive(&self, x: usize) -> bool {
        self.0.at(x) > 0.0
    }

    pub fn as_real(&self) -> &RealFn {
        &self.0
    }

    pub fn neg(&self) -> BoolFn {
        BoolFn(self.0.neg())
    }
}

impl AsRef<Table> for BoolFn {
    fn as_ref(&self) -> &Table {
        self.0.as_ref()
    }
}

/// Probability distribution over the points of a domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Dist {
    domain: Domain,
    weights: Vec<f64>,
}

impl Dist {
    /// Builds a distribution from weights that should already sum to one.
    /// Total mass within [`DIST_DRIFT`] of 1 is renormalized; larger drift is
    /// rejected.
    pub fn new(domain: Domain, weights: Vec<f64>) -> Result<Self> {
        let total = Self::validate(domain, &weights)?;
        if (total - 1.0).abs() > DIST_DRIFT {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self::normalized(domain, weights, total))
    }

    /// Builds a distribution proportional to arbitrary nonnegative weights.
    pub fn from_unnormalized(domain: Domain, weights: Vec<f64>) -> Result<Self> {
        let total = Self::validate(domain, &weights)?;
        Ok(Self::normalized(domain, weights, total))
    }

    fn validate(domain: Domain, weights: &[f64]) -> Result<f64> {
        if weights.len() != domain.size() {
            return Err(Error::TableSize {
                expected: domain.size(),
                got: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidDistribution(format!("bad weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("all weights are zero".into()));
        }
        Ok(total)
    }

    fn normalized(domain: Domain, mut weights: Vec<f64>, total: f64) -> Self {
        if (total - 1.0).abs() > 1e-9 {
            weights.iter_mut().for_each(|w| *w /= total);
        }
        Self { domain, weights }
    }

    pub fn uniform(domain: Domain) -> Self {
        let w = 1.0 / domain.size() as f64;
        Self {
            domain,
            weights: vec![w; domain.size()],
        }
    }

    /// I.i.d. exponential weights, normalized; a pure function of `seed`.
    pub fn random(domain: Domain, seed: u64) -> Self {
        let mut rng = rng::stream(seed, 0, "dist-random");
        let weights: Vec<f64> = domain.points().map(|_| Exp1.sample(&mut rng)).collect();
        let total: f64 = weights.iter().sum();
        Self::normalized(domain, weights, total)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, x: usize) -> f64 {
        self.weights[x]
    }

    /// `E_D[h(x)]` for an arbitrary pointwise function.
    pub fn expect(&self, h: impl Fn(usize) -> f64) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(x, &w)| if w == 0.0 { 0.0 } else { w * h(x) })
            .sum()
    }

    /// Draws one point.
    pub fn sample_point(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = 0;
        for (x, &w) in self.weights.iter().enumerate() {
            if w > 0.0 {
                acc += w;
                last = x;
                if u < acc {
                    return x;
                }
            }
        }
        last
    }

    /// Per-point counts of `s` i.i.d. draws (a multinomial sample).
    ///
    /// Small samples are drawn point by point; large ones by a chain of
    /// conditional binomials. Both produce exactly the multinomial law.
    pub fn sample_counts(&self, s: u64, rng: &mut impl Rng) -> Vec<u64> {
        let mut counts = vec![0u64; self.weights.len()];
        if s < (self.weights.len() as u64) / 4 {
            for _ in 0..s {
                counts[self.sample_point(rng)] += 1;
            }
            return counts;
        }
        let mut remaining = s;
        let mut mass_left = 1.0f64;
        let last = self.weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
        for (x, &w) in self.weights.iter().enumerate() {
            if remaining == 0 {
                break;
            }
            if x == last {
                counts[x] = remaining;
                break;
            }
            if w <= 0.0 {
                continue;
            }
            let p = (w / mass_left).clamp(0.0, 1.0);
            let k = if p >= 1.0 {
                remaining
            } else {
                Binomial::new(remaining, p)
                    .map(|b| b.sample(rng))
                    .unwrap_or(0)
            };
            counts[x] = k;
            remaining -= k;
            mass_left -= w;
            if mass_left <= 0.0 {
                counts[x] += remaining;
                remaining = 0;
            }
        }
        counts
    }

    pub fn to_text(&self) -> String {
        Table {
            domain: self.domain,
            values: self.weights.clone(),
        }
        .to_text()
    }

    pub fn parse_text(text: &str) -> Result<Dist> {
        let t = Table::parse_text(text)?;
        Dist::new(t.domain, t.values)
    }
}

/// Named, ordered, nonempty collection of Boolean functions on one domain.
#[derive(Clone, Debug)]
pub struct ConceptClass {
    name: String,
    members: Vec<BoolFn>,
}

impl ConceptClass {
    pub fn new(name: impl Into<String>, members: Vec<BoolFn>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::EmptyClass);
        };
        let domain = first.domain();
        for m in &members {
            domain.check(&m.domain())?;
        }
        Ok(Self {
            name: name.into(),
            members,
        })
    }

    /// Parities `chi_T` for every `T` with `|T| <= max_degree`, in mask order.
    pub fn parities(domain: Domain, max_degree: Option<u32>) -> Self {
        let k = max_degree.unwrap_or(domain.vars());
        let members = (0..domain.size())
            .filter(|m| m.count_ones() <= k)
            .map(|m| parity_mask(domain, m))
            .collect();
        Self {
            name: format!("parities(n={},k={k})", domain.vars()),
            members,
        }
    }

    /// All `2^n` monotone conjunctions, in mask order (`T = {}` first).
    pub fn conjunctions(domain: Domain) -> Self {
        Self {
            name: format!("conjunctions(n={})", domain.vars()),
            members: domain.points().map(|m| conjunction_mask(domain, m)).collect(),
        }
    }

    /// All `2^n` monotone disjunctions, in mask order (`T = {}` first).
    pub fn disjunctions(domain: Domain) -> Self {
        Self {
            name: format!("disjunctions(n={})", domain.vars()),
            members: domain.points().map(|m| disjunction_mask(domain, m)).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn members(&self) -> &[BoolFn] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn domain(&self) -> Domain {
        self.members[0].domain()
    }
}

/// `sum_x d(x) phi(x) psi(x)`.
pub fn inner_product(phi: &impl AsRef<Table>, psi: &impl AsRef<Table>, d: &Dist) -> Result<f64> {
    let (a, b) = (phi.as_ref(), psi.as_ref());
    a.domain.check(&b.domain)?;
    a.domain.check(&d.domain)?;
    Ok(inner_unchecked(&a.values, &b.values, &d.weights))
}

#[inline]
pub(crate) fn inner_unchecked(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(w)
        .map(|((x, y), w)| w * x * y)
        .sum()
}

/// `E_D[phi]`.
pub fn mean(phi: &impl AsRef<Table>, d: &Dist) -> Result<f64> {
    let a = phi.as_ref();
    a.domain.check(&d.domain)?;
    Ok(a.values.iter().zip(&d.weights).map(|(v, w)| v * w).sum())
}

/// `sqrt(<phi, phi>_D)`.
pub fn norm(phi: &impl AsRef<Table>, d: &Dist) -> Result<f64> {
    Ok(inner_product(phi, phi, d)?.max(0.0).sqrt())
}

/// `||phi - psi||_D^2`.
pub fn dist_sq(phi: &impl AsRef<Table>, psi: &impl AsRef<Table>, d: &Dist) -> Result<f64> {
    let (a, b) = (phi.as_ref(), psi.as_ref());
    a.domain.check(&b.domain)?;
    a.domain.check(&d.domain)?;
    Ok(a.values
        .iter()
        .zip(&b.values)
        .zip(&d.weights)
        .map(|((x, y), w)| w * (x - y) * (x - y))
        .sum())
}

/// `Pr_D[f != g]`.
pub fn disagreement(f: &BoolFn, g: &BoolFn, d: &Dist) -> Result<f64> {
    f.domain().check(&g.domain())?;
    f.domain().check(&d.domain)?;
    Ok(f.values()
        .iter()
        .zip(g.values())
        .zip(&d.weights)
        .filter(|((a, b), _)| a != b)
        .map(|(_, w)| w)
        .sum())
}

/// `E_D[|phi - psi|]`.
pub fn l1_distance(phi: &impl AsRef<Table>, psi: &impl AsRef<Table>, d: &Dist) -> Result<f64> {
    let (a, b) = (phi.as_ref(), psi.as_ref());
    a.domain.check(&b.domain)?;
    a.domain.check(&d.domain)?;
    Ok(a.values
        .iter()
        .zip(&b.values)
        .zip(&d.weights)
        .map(|((x, y), w)| w * (x - y).abs())
        .sum())
}

/// Pointwise clamp onto `[-1, 1]` (the projection `P_1`).
pub fn project_unit(phi: &impl AsRef<Table>) -> RealFn {
    let t = phi.as_ref();
    RealFn(Table {
        domain: t.domain,
        values: t.values.iter().map(|v| v.clamp(-1.0, 1.0)).collect(),
    })
}

#[inline]
pub fn sign(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Pointwise sign; zero maps to `+1`.
pub fn sign_of(phi: &impl AsRef<Table>) -> BoolFn {
    let t = phi.as_ref();
    BoolFn(RealFn(Table {
        domain: t.domain,
        values: t.values.iter().map(|&v| sign(v)).collect(),
    }))
}

fn parity_mask(domain: Domain, mask: usize) -> BoolFn {
    BoolFn::from_fn(domain, |x| (!x & mask).count_ones().is_multiple_of(2))
}

fn conjunction_mask(domain: Domain, mask: usize) -> BoolFn {
    BoolFn::from_fn(domain, |x| x & mask == mask)
}

fn disjunction_mask(domain: Domain, mask: usize) -> BoolFn {
    BoolFn::from_fn(domain, |x| x & mask != 0)
}

/// Parity `chi_T(x) = prod_{i in T} (2 x_i - 1)`: the product of the `+-1`
/// literals, so `chi_T` is `+1` at the all-ones point like `c_T`. This
/// equals `(-1)^{sum_{i in T} x_i}` up to the global sign `(-1)^{|T|}`.
/// The empty set gives the constant `+1`.
pub fn make_parity(domain: Domain, vars: &[usize]) -> Result<BoolFn> {
    Ok(parity_mask(domain, domain.mask(vars)?))
}

/// `t_T(x) = +1` iff some `x_i = 1` with `i in T`; the empty set gives `-1`.
pub fn make_disjunction(domain: Domain, vars: &[usize]) -> Result<BoolFn> {
    Ok(disjunction_mask(domain, domain.mask(vars)?))
}

/// `c_T(x) = +1` iff every `x_i = 1` with `i in T`; the empty set gives `+1`.
pub fn make_conjunction(domain: Domain, vars: &[usize]) -> Result<BoolFn> {
    Ok(conjunction_mask(domain, domain.mask(vars)?))
}

pub fn dist_uniform(domain: Domain) -> Dist {
    Dist::uniform(domain)
}

pub fn dist_random(domain: Domain, seed: u64) -> Dist {
    Dist::random(domain, seed)
}
