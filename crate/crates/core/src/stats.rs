//! Estimators for the survey statistics: exact binomials, the coupon
//! collector maximum-likelihood class count, and Bernoulli-trial confidence
//! bounds through the inverse regularized incomplete beta function.
//!
//! Real arithmetic is arbitrary-precision decimal ([`DBig`]) with the
//! number of significant digits passed explicitly to every call.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use dashu::float::DBig;
use dashu::integer::UBig;
use dashu::rational::RBig;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Real = DBig;

pub const DEFAULT_DIGITS: usize = 100;
/// Below this the coupon inequality is decided by rounding noise.
pub const MIN_COUPON_DIGITS: usize = 35;
/// The coupon search gives up above `10^COUPON_CAP_EXP`.
pub const COUPON_CAP_EXP: usize = 30;

const GUARD_DIGITS: usize = 15;
const MAX_CF_ITERATIONS: usize = 1_000_000;
const MAX_ROOT_ITERATIONS: usize = 300;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("binomial({n}, {k}) needs 0 <= k <= n")]
    BinomialRange { n: u64, k: u64 },
    #[error("coupon input needs 1 <= c <= n, got n={n} c={c}")]
    CouponRange { n: u64, c: u64 },
    #[error("{digits} significant digits requested, at least {min} needed")]
    Precision { digits: usize, min: usize },
    #[error("probability must lie strictly between 0 and 1: {0}")]
    Probability(String),
    #[error("shape parameters must be positive: a={a} b={b}")]
    Shape { a: String, b: String },
    #[error("{what} did not converge in {iterations} iterations")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
    },
    #[error("need 0 <= m <= n and n >= 1, got n={n} m={m}")]
    Trials { n: u64, m: u64 },
    #[error("bad number {0:?}")]
    BadNumber(String),
    #[error("more than one record for {0} edges")]
    DuplicateEdges(u32),
    #[error("record for {edges} edges: {reason}")]
    Record { edges: u32, reason: String },
}

/// Parses a decimal (`"0.975"`, `"9.0e15"`) at the given precision.
pub fn real(s: &str, digits: usize) -> Result<Real, StatsError> {
    let x = DBig::from_str(s.trim()).map_err(|_| StatsError::BadNumber(s.to_string()))?;
    Ok(with_digits(x, digits))
}

pub fn real_int(n: impl Into<UBig>, digits: usize) -> Real {
    with_digits(DBig::from(n.into()), digits)
}

fn with_digits(x: DBig, digits: usize) -> Real {
    x.with_precision(digits).value()
}

fn zero(p: usize) -> Real {
    real_int(0u8, p)
}

fn one(p: usize) -> Real {
    real_int(1u8, p)
}

fn abs(x: &Real) -> Real {
    if x.repr().significand() < &dashu::integer::IBig::ZERO {
        -x.clone()
    } else {
        x.clone()
    }
}

/// Nearest `f64`, going through the decimal string (dashu's own conversion
/// can trip an internal division assertion).
pub fn to_f64(x: &Real) -> f64 {
    x.to_string().parse().unwrap_or(f64::NAN)
}

fn pow10_neg(k: usize, p: usize) -> Real {
    with_digits(DBig::from_parts(1.into(), -(k as isize)), p)
}

/// Exact `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> Result<UBig, StatsError> {
    if k > n {
        return Err(StatsError::BinomialRange { n, k });
    }
    let k = k.min(n - k);
    let mut acc = UBig::ONE;
    for i in 0..k {
        acc = acc * UBig::from(n - i) / UBig::from(i + 1);
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CouponEstimate {
    Finite(UBig),
    /// No `j` up to `cap` satisfies the inequality.
    Unbounded {
        cap: UBig,
    },
}

/// Smallest integer `j >= c` with
/// `log(j+1) - log(j+1-c) + n (log j - log(j+1)) < 0`, found by binary
/// search with every logarithm evaluated at `digits` significant digits.
pub fn coupon_mle(n: u64, c: u64, digits: usize) -> Result<CouponEstimate, StatsError> {
    if c == 0 || c > n {
        return Err(StatsError::CouponRange { n, c });
    }
    if digits < MIN_COUPON_DIGITS {
        return Err(StatsError::Precision {
            digits,
            min: MIN_COUPON_DIGITS,
        });
    }
    let cap = UBig::from(10u8).pow(COUPON_CAP_EXP);
    if c == n {
        // (j+1)^(n-1) (j+1-n) < j^n by the AM-GM inequality, so the ratio
        // exceeds 1 for every j.
        return Ok(CouponEstimate::Unbounded { cap });
    }
    let below = |j: &UBig| coupon_lhs(j, n, c, digits) < zero(digits);
    if !below(&cap) {
        return Ok(CouponEstimate::Unbounded { cap });
    }
    let mut lo = UBig::from(c);
    if below(&lo) {
        return Ok(CouponEstimate::Finite(lo));
    }
    let mut hi = cap;
    while &hi - &lo > UBig::ONE {
        let mid = (&lo + &hi) >> 1;
        if below(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(CouponEstimate::Finite(hi))
}

fn coupon_lhs(j: &UBig, n: u64, c: u64, p: usize) -> Real {
    let jr = real_int(j.clone(), p);
    let j1 = real_int(j + UBig::ONE, p);
    let jc = real_int(j + UBig::ONE - UBig::from(c), p);
    let ln_j1 = j1.ln();
    ln_j1.clone() - jc.ln() + real_int(n, p) * (jr.ln() - ln_j1)
}

/// π by Machin's formula.
fn pi(p: usize) -> Real {
    let atan_inv = |x: u32| {
        let x = real_int(x, p);
        let x2 = &x * &x;
        let eps = pow10_neg(p + 2, p);
        let mut power = one(p) / &x;
        let mut sum = power.clone();
        let mut k = 1u32;
        loop {
            power /= &x2;
            let term = &power / real_int(2 * k + 1, p);
            if term < eps {
                break;
            }
            if k % 2 == 1 {
                sum -= term;
            } else {
                sum += term;
            }
            k += 1;
        }
        sum
    };
    real_int(16u8, p) * atan_inv(5) - real_int(4u8, p) * atan_inv(239)
}

/// `B_0 .. B_n` (with `B_1 = -1/2`) by the Akiyama-Tanigawa algorithm.
fn bernoulli_numbers(n: usize) -> Vec<RBig> {
    let mut a: Vec<RBig> = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a.push(RBig::from_parts(1.into(), UBig::from(m + 1)));
        for j in (1..=m).rev() {
            let d = &a[j - 1] - &a[j];
            a[j - 1] = RBig::from(j) * d;
        }
        out.push(a[0].clone());
    }
    // The recurrence yields B_1 = +1/2.
    if n >= 1 {
        out[1] = -out[1].clone();
    }
    out
}

fn rational_to_real(r: &RBig, p: usize) -> Real {
    let (num, den) = r.clone().into_parts();
    with_digits(DBig::from(num), p) / real_int(den, p)
}

/// `ln Γ(z)` for real `z > 0` from Stirling's series, after shifting `z`
/// up far enough that the series reaches the working precision.
fn ln_gamma(z: &Real, p: usize, ln_2pi: &Real, bern: &[RBig]) -> Real {
    let threshold = real_int((4 * p).max(100), p);
    let mut z = z.clone();
    let mut shift = one(p);
    while z < threshold {
        shift *= &z;
        z += one(p);
    }
    let half = with_digits(DBig::from_parts(5.into(), -1), p);
    let mut sum = (&z - &half) * z.ln() - &z + &half * ln_2pi;
    let eps = pow10_neg(p + 2, p);
    let z2 = &z * &z;
    let mut zpow = z.clone();
    for k in 1..bern.len() / 2 {
        let coeff = rational_to_real(&bern[2 * k], p) / real_int(2 * k * (2 * k - 1), p);
        let term = coeff / &zpow;
        let small = abs(&term) < eps;
        sum += term;
        if small {
            break;
        }
        zpow *= &z2;
    }
    sum - shift.ln()
}

fn small_integer(x: &Real) -> Option<u64> {
    if x.fract() != DBig::ZERO {
        return None;
    }
    let v = to_f64(x);
    (1.0..=1e6).contains(&v).then_some(v as u64)
}

/// `ln B(a, b)`. When a shape is a moderate integer `k`, uses
/// `B(k, s) = (k-1)! / (s (s+1) ... (s+k-1))`; otherwise log-gamma.
fn ln_beta(a: &Real, b: &Real, p: usize) -> Real {
    let exact = small_integer(a)
        .map(|k| (k, b))
        .or_else(|| small_integer(b).map(|k| (k, a)));
    if let Some((k, s)) = exact {
        let mut ratio = one(p) / s;
        let mut term = s.clone();
        for i in 1..k {
            term += one(p);
            ratio = ratio * real_int(i, p) / &term;
        }
        return ratio.ln();
    }
    let ln_2pi = (real_int(2u8, p) * pi(p)).ln();
    let bern = bernoulli_numbers(2 * p + 2);
    ln_gamma(a, p, &ln_2pi, &bern) + ln_gamma(b, p, &ln_2pi, &bern)
        - ln_gamma(&(a + b), p, &ln_2pi, &bern)
}

struct Beta {
    a: Real,
    b: Real,
    ln_beta: Real,
    p: usize,
}

impl Beta {
    fn new(a: &Real, b: &Real, p: usize) -> Result<Self, StatsError> {
        let z = zero(p);
        if a <= &z || b <= &z {
            return Err(StatsError::Shape {
                a: a.to_string(),
                b: b.to_string(),
            });
        }
        let (a, b) = (with_digits(a.clone(), p), with_digits(b.clone(), p));
        Ok(Beta {
            ln_beta: ln_beta(&a, &b, p),
            a,
            b,
            p,
        })
    }

    fn swapped(&self) -> Beta {
        Beta {
            a: self.b.clone(),
            b: self.a.clone(),
            ln_beta: self.ln_beta.clone(),
            p: self.p,
        }
    }

    /// `I_x(a, b)`, switching to `1 - I_{1-x}(b, a)` above `a/(a+b)`.
    fn cdf(&self, x: &Real) -> Result<Real, StatsError> {
        let p = self.p;
        if x <= &zero(p) {
            return Ok(zero(p));
        }
        if x >= &one(p) {
            return Ok(one(p));
        }
        if x > &(&self.a / (&self.a + &self.b)) {
            return Ok(one(p) - self.swapped().cdf_direct(&(one(p) - x))?);
        }
        self.cdf_direct(x)
    }

    fn cdf_direct(&self, x: &Real) -> Result<Real, StatsError> {
        let (a, b, p) = (&self.a, &self.b, self.p);
        let front = (a * x.ln() + b * (one(p) - x).ln() - &self.ln_beta).exp() / a;
        Ok(front * self.continued_fraction(x)?)
    }

    /// Modified Lentz evaluation of the incomplete beta continued fraction.
    fn continued_fraction(&self, x: &Real) -> Result<Real, StatsError> {
        let (a, b, p) = (&self.a, &self.b, self.p);
        let one = one(p);
        let tiny = pow10_neg(3 * p, p);
        let eps = pow10_neg(p - GUARD_DIGITS / 3, p);
        let fix = |v: Real| if abs(&v) < tiny { tiny.clone() } else { v };
        let qab = a + b;
        let qap = a + &one;
        let qam = a - &one;
        let mut c = one.clone();
        let mut d = one.clone() / fix(&one - &qab * x / &qap);
        let mut h = d.clone();
        for m in 1..=MAX_CF_ITERATIONS {
            let mr = real_int(m as u64, p);
            let m2 = &mr + &mr;
            let aa = &mr * (b - &mr) * x / ((&qam + &m2) * (a + &m2));
            d = one.clone() / fix(&one + &aa * &d);
            c = fix(&one + aa / &c);
            h = h * &d * &c;
            let aa = -((a + &mr) * (&qab + &mr) * x) / ((a + &m2) * (&qap + &m2));
            d = one.clone() / fix(&one + &aa * &d);
            c = fix(&one + aa / &c);
            let del = &d * &c;
            h *= &del;
            if abs(&(del - &one)) < eps {
                return Ok(h);
            }
        }
        Err(StatsError::NonConvergence {
            what: "incomplete beta continued fraction",
            iterations: MAX_CF_ITERATIONS,
        })
    }

    /// Density `x^(a-1) (1-x)^(b-1) / B(a,b)`.
    fn density(&self, x: &Real) -> Real {
        let (a, b, p) = (&self.a, &self.b, self.p);
        let one = one(p);
        ((a - &one) * x.ln() + (b - &one) * (&one - x).ln() - &self.ln_beta).exp()
    }
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn reg_inc_beta(x: &Real, a: &Real, b: &Real, digits: usize) -> Result<Real, StatsError> {
    let p = digits + GUARD_DIGITS;
    let beta = Beta::new(a, b, p)?;
    Ok(with_digits(beta.cdf(&with_digits(x.clone(), p))?, digits))
}

/// The `x` with `I_x(a, b) = prob`: an `f64` starting point refined by
/// Halley steps inside a shrinking bracket, falling back to bisection
/// whenever a step leaves the bracket.
pub fn reg_inc_beta_inv(
    prob: &Real,
    a: &Real,
    b: &Real,
    digits: usize,
) -> Result<Real, StatsError> {
    let p = digits + GUARD_DIGITS;
    let prob = with_digits(prob.clone(), p);
    if prob <= zero(p) || prob >= one(p) {
        return Err(StatsError::Probability(prob.to_string()));
    }
    let beta = Beta::new(a, b, p)?;
    let (af, bf) = (to_f64(a), to_f64(b));
    let guess = initial_guess(to_f64(&prob), af, bf);
    let mut x = real(&format!("{guess:e}"), p)?;
    let mut lo = zero(p);
    let mut hi = one(p);
    let tol = pow10_neg(digits + 3, p);
    let half = with_digits(DBig::from_parts(5.into(), -1), p);
    let one_r = one(p);
    for _ in 0..MAX_ROOT_ITERATIONS {
        let f = beta.cdf(&x)? - &prob;
        match f.cmp(&zero(p)) {
            Ordering::Less => lo = x.clone(),
            Ordering::Greater => hi = x.clone(),
            Ordering::Equal => return Ok(with_digits(x, digits)),
        }
        let deriv = beta.density(&x);
        let mut next = None;
        if deriv > zero(p) {
            let newton = &f / &deriv;
            let curvature = (&beta.a - &one_r) / &x - (&beta.b - &one_r) / (&one_r - &x);
            let denom = &one_r - &half * &newton * curvature;
            let step = if denom > half { newton / denom } else { newton };
            let candidate = &x - &step;
            if candidate > lo && candidate < hi {
                if abs(&step) <= &tol * abs(&x) {
                    return Ok(with_digits(candidate, digits));
                }
                next = Some(candidate);
            }
        }
        x = match next {
            Some(c) => c,
            None => {
                let mid = (&lo + &hi) * &half;
                if abs(&(&hi - &lo)) <= &tol * abs(&mid) {
                    return Ok(with_digits(mid, digits));
                }
                mid
            }
        };
    }
    Err(StatsError::NonConvergence {
        what: "inverse incomplete beta",
        iterations: MAX_ROOT_ITERATIONS,
    })
}

/// Standard starting point for the inverse incomplete beta function
/// (normal approximation for `a, b >= 1`, power-law tails otherwise).
fn initial_guess(p: f64, a: f64, b: f64) -> f64 {
    let x = if a >= 1.0 && b >= 1.0 {
        let pp = if p < 0.5 { p } else { 1.0 - p };
        let t = (-2.0 * pp.ln()).sqrt();
        let mut z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
        if p < 0.5 {
            z = -z;
        }
        let al = (z * z - 3.0) / 6.0;
        let h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
        let w = z * (al + h).sqrt() / h
            - (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
        a / (a + b * (2.0 * w).exp())
    } else {
        let lna = (a / (a + b)).ln();
        let lnb = (b / (a + b)).ln();
        let t = (a * lna).exp() / a;
        let u = (b * lnb).exp() / b;
        let w = t + u;
        if p < t / w {
            (a * w * p).powf(1.0 / a)
        } else {
            1.0 - (b * w * (1.0 - p)).powf(1.0 / b)
        }
    };
    if x.is_finite() && x > 0.0 && x < 1.0 {
        x
    } else {
        0.5
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bounds {
    pub lower: Real,
    pub upper: Real,
}

/// Bounds on the number of successes in a population of `k` from `m`
/// successes in `n` draws with replacement:
/// `K · I⁻¹_{(1∓L)/2}(m+1, n-m+1)`, with the lower bound taken as zero when
/// nothing was observed. `k` is used as given, without its own error.
pub fn confidence_bounds(
    k: &Real,
    n: u64,
    m: u64,
    level: &Real,
    digits: usize,
) -> Result<Bounds, StatsError> {
    if n == 0 || m > n {
        return Err(StatsError::Trials { n, m });
    }
    let p = digits + GUARD_DIGITS;
    let level = with_digits(level.clone(), p);
    if level <= zero(p) || level >= one(p) {
        return Err(StatsError::Probability(level.to_string()));
    }
    let half = with_digits(DBig::from_parts(5.into(), -1), p);
    let a = real_int(m + 1, p);
    let b = real_int(n - m + 1, p);
    let k = with_digits(k.clone(), p);
    let upper = &k * reg_inc_beta_inv(&((one(p) + &level) * &half), &a, &b, p)?;
    let lower = if m == 0 {
        zero(p)
    } else {
        &k * reg_inc_beta_inv(&((one(p) - &level) * &half), &a, &b, p)?
    };
    Ok(Bounds {
        lower: with_digits(lower, digits),
        upper: with_digits(upper, digits),
    })
}

/// Serde adapter writing `Display`/`FromStr` values as JSON strings.
mod as_string {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<T: Display, S: Serializer>(
            v: &Option<T>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            match v {
                Some(v) => s.collect_str(v),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, T, D>(d: D) -> Result<Option<T>, D::Error>
        where
            T: FromStr,
            T::Err: Display,
            D: Deserializer<'de>,
        {
            Option::<String>::deserialize(d)?
                .map(|s| s.parse().map_err(D::Error::custom))
                .transpose()
        }
    }
}

/// Statistics for one edge count. Integers and decimals are written as JSON
/// strings so no value passes through a binary float.
///
/// `ks` is the estimated number of KS sets (the population for the
/// critical-set bounds), `ks_sample` the number of KS sets examined and
/// `criticals` the number found critical among them. `min_crit`/`max_crit`
/// may be given directly; otherwise they are derived from those three.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub edges: u32,
    #[serde(with = "as_string")]
    pub total: UBig,
    #[serde(
        default,
        with = "as_string::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub unconnected: Option<DBig>,
    #[serde(
        default,
        with = "as_string::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub noniso: Option<DBig>,
    #[serde(
        default,
        with = "as_string::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub ks: Option<DBig>,
    #[serde(
        default,
        with = "as_string::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub ks_sample: Option<u64>,
    #[serde(with = "as_string")]
    pub criticals: u64,
    #[serde(
        default,
        with = "as_string::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub min_crit: Option<DBig>,
    #[serde(
        default,
        with = "as_string::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub max_crit: Option<DBig>,
}

impl SurveyRecord {
    /// A record with only the exact total `C(parent_edges, edges)` filled.
    pub fn new(edges: u32, parent_edges: u32) -> Self {
        SurveyRecord {
            edges,
            total: binomial(parent_edges as u64, edges as u64).unwrap_or(UBig::ZERO),
            unconnected: None,
            noniso: None,
            ks: None,
            ks_sample: None,
            criticals: 0,
            min_crit: None,
            max_crit: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub record: SurveyRecord,
    /// `ks · criticals / ks_sample`.
    pub point: Option<Real>,
    pub bounds: Option<Bounds>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateReport {
    pub rows: Vec<AggregateRow>,
    /// Sums of the point estimates and of the bounds over rows that have
    /// them.
    pub total_point: Real,
    pub total_lower: Real,
    pub total_upper: Real,
}

/// Completes each record's bounds and sums them. The interval for the total
/// is the sum of the per-edge intervals.
pub fn survey_aggregate(
    records: &[SurveyRecord],
    level: &Real,
    digits: usize,
) -> Result<AggregateReport, StatsError> {
    let mut by_edges = BTreeMap::new();
    for r in records {
        if by_edges.insert(r.edges, r).is_some() {
            return Err(StatsError::DuplicateEdges(r.edges));
        }
    }
    let mut total_point = zero(digits);
    let mut total_lower = zero(digits);
    let mut total_upper = zero(digits);
    let mut rows = Vec::with_capacity(by_edges.len());
    for (&edges, &r) in &by_edges {
        let mut point = None;
        let mut bounds = match (&r.min_crit, &r.max_crit) {
            (Some(lo), Some(hi)) => Some(Bounds {
                lower: lo.clone(),
                upper: hi.clone(),
            }),
            _ => None,
        };
        if let (Some(k), Some(n)) = (&r.ks, r.ks_sample) {
            let k = with_digits(k.clone(), digits);
            point = Some(&k * real_int(r.criticals, digits) / real_int(n, digits));
            if bounds.is_none() {
                bounds = Some(confidence_bounds(&k, n, r.criticals, level, digits)?);
            }
        }
        if let Some(b) = &bounds {
            if b.lower > b.upper {
                return Err(StatsError::Record {
                    edges,
                    reason: "min_crit exceeds max_crit".into(),
                });
            }
            if real_int(r.criticals, digits) > b.upper {
                return Err(StatsError::Record {
                    edges,
                    reason: "observed criticals exceed max_crit".into(),
                });
            }
            total_lower += &b.lower;
            total_upper += &b.upper;
        }
        if let Some(pt) = &point {
            total_point += pt;
        }
        rows.push(AggregateRow {
            record: r.clone(),
            point,
            bounds,
        });
    }
    Ok(AggregateReport {
        rows,
        total_point,
        total_lower,
        total_upper,
    })
}

/// Six significant digits in scientific notation, `-` for absent values.
fn sci(x: Option<&Real>) -> String {
    match x {
        None => "-".into(),
        Some(v) => {
            let f = to_f64(v);
            if f == 0.0 {
                "0".into()
            } else {
                format!("{f:.5e}")
            }
        }
    }
}

impl AggregateReport {
    /// Tab-separated table, one row per edge count and a final total row.
    /// Totals of hypergraphs stay exact; estimates use six digits.
    pub fn to_table(&self) -> String {
        let mut s = String::from(
            "edges\ttotal\tunconnected\tnoniso\tks\todd_crit\teven_crit\tpoint_crit\tmin_crit\tmax_crit\n",
        );
        for row in &self.rows {
            let r = &row.record;
            let (odd, even) = if r.edges % 2 == 1 {
                (r.criticals.to_string(), "-".to_string())
            } else {
                ("-".to_string(), r.criticals.to_string())
            };
            writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.edges,
                r.total,
                sci(r.unconnected.as_ref()),
                sci(r.noniso.as_ref()),
                sci(r.ks.as_ref()),
                odd,
                even,
                sci(row.point.as_ref()),
                sci(row.bounds.as_ref().map(|b| &b.lower)),
                sci(row.bounds.as_ref().map(|b| &b.upper)),
            )
            .unwrap();
        }
        writeln!(
            s,
            "total\t-\t-\t-\t-\t-\t-\t{}\t{}\t{}",
            sci(Some(&self.total_point)),
            sci(Some(&self.total_lower)),
            sci(Some(&self.total_upper))
        )
        .unwrap();
        s
    }

    /// Whitespace-separated columns of base-10 logarithms for plotting on
    /// a log scale. Zero or absent values are written as `nan` so plotting
    /// tools skip them.
    pub fn to_plot_data(&self) -> String {
        let lg = |x: Option<f64>| match x {
            Some(v) if v > 0.0 => format!("{:.4}", v.log10()),
            _ => "nan".into(),
        };
        let f = |x: Option<&Real>| x.map(to_f64);
        let mut s = String::from(
            "# edges log10(total) log10(unconnected) log10(noniso) log10(ks) log10(odd_crit) log10(even_crit) log10(min_crit) log10(max_crit)\n",
        );
        for row in &self.rows {
            let r = &row.record;
            let crit = r.criticals as f64;
            let (odd, even) = if r.edges % 2 == 1 {
                (Some(crit), None)
            } else {
                (None, Some(crit))
            };
            writeln!(
                s,
                "{} {} {} {} {} {} {} {} {}",
                r.edges,
                lg(r.total.to_string().parse().ok()),
                lg(f(r.unconnected.as_ref())),
                lg(f(r.noniso.as_ref())),
                lg(f(r.ks.as_ref())),
                lg(odd),
                lg(even),
                lg(f(row.bounds.as_ref().map(|b| &b.lower))),
                lg(f(row.bounds.as_ref().map(|b| &b.upper))),
            )
            .unwrap();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Real {
        real(s, 60).unwrap()
    }

    fn close(a: &Real, b: &Real, rel: &str) -> bool {
        abs(&(a - b)) <= r(rel) * abs(b)
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(75, 2).unwrap(), UBig::from(2775u32));
        assert_eq!(binomial(9, 0).unwrap(), UBig::ONE);
        let sum: UBig = (0..=75).map(|b| binomial(75, b).unwrap()).sum();
        assert_eq!(sum, UBig::ONE << 75);
        assert!(binomial(3, 4).is_err());
    }

    #[test]
    fn coupon_edge_cases() {
        assert_eq!(
            coupon_mle(2, 1, 50).unwrap(),
            CouponEstimate::Finite(UBig::ONE)
        );
        assert!(matches!(
            coupon_mle(1, 1, 50).unwrap(),
            CouponEstimate::Unbounded { .. }
        ));
        assert!(matches!(
            coupon_mle(5, 5, 50).unwrap(),
            CouponEstimate::Unbounded { .. }
        ));
        assert!(coupon_mle(3, 4, 50).is_err());
        assert!(coupon_mle(3, 2, 20).is_err());
    }

    #[test]
    fn bernoulli_table() {
        let b = bernoulli_numbers(8);
        let q = |n: i32, d: u32| RBig::from_parts(n.into(), UBig::from(d));
        assert_eq!(b[0], q(1, 1));
        assert_eq!(b[1], q(-1, 2));
        assert_eq!(b[2], q(1, 6));
        assert_eq!(b[3], q(0, 1));
        assert_eq!(b[4], q(-1, 30));
        assert_eq!(b[8], q(-1, 30));
    }

    #[test]
    fn pi_digits() {
        let p = pi(50);
        assert!(close(
            &p,
            &r("3.14159265358979323846264338327950288419716939937510"),
            "1e-48"
        ));
    }

    #[test]
    fn ln_gamma_matches_factorials() {
        let p = 50;
        let ln_2pi = (real_int(2u8, p) * pi(p)).ln();
        let bern = bernoulli_numbers(2 * p + 2);
        // Γ(10) = 9! = 362880, Γ(1/2) = √π.
        let g10 = ln_gamma(&real_int(10u8, p), p, &ln_2pi, &bern);
        assert!(close(&g10, &real_int(362880u32, p).ln(), "1e-45"));
        let half = real("0.5", p).unwrap();
        let gh = ln_gamma(&half, p, &ln_2pi, &bern);
        assert!(close(&gh, &(pi(p).ln() * &half), "1e-45"));
    }

    #[test]
    fn beta_cdf_small_cases() {
        // I_x(2, 2) = 3x² - 2x³.
        let d = 40;
        let x = real("0.3", d).unwrap();
        let v = reg_inc_beta(&x, &real_int(2u8, d), &real_int(2u8, d), d).unwrap();
        assert!(close(&v, &r("0.216"), "1e-35"));
        // Non-integer shapes: I_x(1/2, 1/2) = (2/π) asin(√x); at x = 1/2 it is 1/2.
        let h = real("0.5", d).unwrap();
        let v = reg_inc_beta(&h, &h, &h, d).unwrap();
        assert!(close(&v, &h, "1e-35"));
    }

    #[test]
    fn inverse_closed_form_a1() {
        // I_x(1, b) = 1 - (1-x)^b.
        let d = 50;
        let p = real("0.975", d).unwrap();
        let b = real_int(11u8, d);
        let x = reg_inc_beta_inv(&p, &real_int(1u8, d), &b, d).unwrap();
        let expect = one(d) - (one(d) - &p).powf(&(one(d) / &b));
        assert!(close(&x, &expect, "1e-45"), "{x} vs {expect}");
        assert!(close(&x, &r("0.2849141529"), "1e-9"));
    }

    #[test]
    fn bounds_with_no_observations() {
        let d = 40;
        let k = real("1e6", d).unwrap();
        let b = confidence_bounds(&k, 100, 0, &real("0.95", d).unwrap(), d).unwrap();
        assert_eq!(b.lower, zero(d));
        let expect = &k
            * (one(d)
                - real("0.025", d)
                    .unwrap()
                    .powf(&(one(d) / real_int(101u8, d))));
        assert!(close(&b.upper, &expect, "1e-35"));
    }

    #[test]
    fn record_json_uses_strings() {
        let mut rec = SurveyRecord::new(35, 75);
        rec.ks = Some(r("9.0e15"));
        rec.ks_sample = Some(52_800_000);
        rec.criticals = 580;
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains("\"criticals\":\"580\""));
        assert!(json.contains("\"ks_sample\":\"52800000\""));
        assert!(!json.contains("unconnected"));
        let back: SurveyRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.total, rec.total);
        assert_eq!(back.criticals, 580);
    }

    #[test]
    fn aggregate_rejects_duplicates() {
        let recs = vec![SurveyRecord::new(3, 75), SurveyRecord::new(3, 75)];
        assert_eq!(
            survey_aggregate(&recs, &r("0.95"), 30).unwrap_err(),
            StatsError::DuplicateEdges(3)
        );
    }
}
