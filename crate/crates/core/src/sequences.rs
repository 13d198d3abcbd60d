//! Positive sequences `(M_n)` and the diagnostics built on them.
//!
//! All values are held as natural logarithms so that prefixes such as `n!`
//! for `n` in the hundreds of thousands stay representable. Every operation
//! works on the finite prefix it is given; classification results are
//! evidence labels, not statements about the infinite sequence.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tolerance used for the log-space comparisons below.
pub const LOG_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PositiveSequence {
    logs: Vec<f64>,
}

impl PositiveSequence {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let logs = values
            .iter()
            .enumerate()
            .map(|(index, &v)| {
                if v > 0.0 && v.is_finite() {
                    Ok(v.ln())
                } else {
                    Err(Error::NonPositiveEntry { index })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_logs(logs)
    }

    pub fn from_logs(logs: Vec<f64>) -> Result<Self> {
        if logs.is_empty() {
            return Err(Error::precondition("sequence must have at least one entry"));
        }
        if let Some(index) = logs.iter().position(|l| !l.is_finite()) {
            return Err(Error::NonPositiveEntry { index });
        }
        Ok(PositiveSequence { logs })
    }

    pub fn len(&self) -> usize {
        self.logs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logs.is_empty()
    }

    /// Largest index `N` of the stored prefix `M_0..M_N`.
    pub fn horizon(&self) -> usize {
        self.logs.len() - 1
    }

    pub fn log(&self, n: usize) -> f64 {
        self.logs[n]
    }

    pub fn logs(&self) -> &[f64] {
        &self.logs
    }

    /// `M_n`; overflows to `inf` for very large entries.
    pub fn value(&self, n: usize) -> f64 {
        self.logs[n].exp()
    }

    /// `(c * M_n)`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::precondition("scale must be positive"));
        }
        let lc = c.ln();
        Self::from_logs(self.logs.iter().map(|l| l + lc).collect())
    }

    fn scale(&self) -> f64 {
        self.logs.iter().fold(1.0f64, |m, l| m.max(l.abs()))
    }
}

/// Sup-norm sequence `(|f^(k)|)`, where entries may be exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct NormSequence {
    /// Natural logs; `-inf` marks an exact zero.
    logs: Vec<f64>,
}

impl NormSequence {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let logs = values
            .iter()
            .enumerate()
            .map(|(index, &v)| {
                if v >= 0.0 && v.is_finite() {
                    Ok(v.ln())
                } else {
                    Err(Error::NonPositiveEntry { index })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NormSequence { logs })
    }

    pub fn from_logs(logs: Vec<f64>) -> Result<Self> {
        if let Some(index) = logs.iter().position(|l| l.is_nan() || *l == f64::INFINITY) {
            return Err(Error::NonPositiveEntry { index });
        }
        Ok(NormSequence { logs })
    }

    pub fn len(&self) -> usize {
        self.logs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logs.is_empty()
    }

    pub fn logs(&self) -> &[f64] {
        &self.logs
    }

    pub fn first_zero(&self) -> Option<usize> {
        self.logs.iter().position(|l| *l == f64::NEG_INFINITY)
    }

    pub fn to_positive(&self) -> Result<PositiveSequence> {
        match self.first_zero() {
            Some(index) => Err(Error::NonPositiveEntry { index }),
            None => PositiveSequence::from_logs(self.logs.clone()),
        }
    }
}

impl From<&PositiveSequence> for NormSequence {
    fn from(seq: &PositiveSequence) -> Self {
        NormSequence {
            logs: seq.logs.clone(),
        }
    }
}

/// Natural logs of `0!, 1!, ..., n!`.
pub fn log_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Named closed-form families used by the CLI and the test suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `n!`
    Factorial,
    /// `(n!)^p`
    FactorialPower(u32),
    /// `c^n`
    Geometric(f64),
    /// `n^n` with `0^0 = 1`
    PowerNN,
    /// `c` for every `n`
    Constant(f64),
}

impl Family {
    /// Entries `M_0..=M_n`.
    pub fn generate(&self, n: usize) -> Result<PositiveSequence> {
        let logs = match *self {
            Family::Factorial => log_factorials(n),
            Family::FactorialPower(p) => log_factorials(n)
                .into_iter()
                .map(|l| l * p as f64)
                .collect(),
            Family::Geometric(c) => {
                if !(c > 0.0) {
                    return Err(Error::precondition("geometric ratio must be positive"));
                }
                (0..=n).map(|k| k as f64 * c.ln()).collect()
            }
            Family::PowerNN => (0..=n)
                .map(|k| if k == 0 { 0.0 } else { k as f64 * (k as f64).ln() })
                .collect(),
            Family::Constant(c) => {
                if !(c > 0.0) {
                    return Err(Error::precondition("constant must be positive"));
                }
                vec![c.ln(); n + 1]
            }
        };
        PositiveSequence::from_logs(logs)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Malformed(format!("unknown family `{s}`"));
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let number = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())
        };
        match name {
            "factorial" => Ok(Family::Factorial),
            "geometric" => Ok(Family::Geometric(number(arg)?)),
            "constant" => Ok(Family::Constant(number(arg)?)),
            "power" if arg == Some("nn") => Ok(Family::PowerNN),
            "nn" => Ok(Family::PowerNN),
            _ => match name.strip_prefix("factorial") {
                Some(p) => p.parse::<u32>().map(Family::FactorialPower).map_err(|_| bad()),
                None => Err(bad()),
            },
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Factorial => write!(f, "factorial"),
            Family::FactorialPower(p) => write!(f, "factorial{p}"),
            Family::Geometric(c) => write!(f, "geometric:{c}"),
            Family::PowerNN => write!(f, "power:nn"),
            Family::Constant(c) => write!(f, "constant:{c}"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraCheck {
    pub holds: bool,
    pub first_violation: Option<(usize, usize)>,
    pub reason: Option<String>,
}

/// `M_0 = 1` and `binom(j+k, k) <= M_{j+k} / (M_j M_k)` for all `j + k <= N`.
pub fn is_algebra_sequence(m: &PositiveSequence) -> AlgebraCheck {
    if m.log(0).abs() > LOG_REL_TOL {
        return AlgebraCheck {
            holds: false,
            first_violation: None,
            reason: Some(format!("M_0 = {} is not 1", m.value(0))),
        };
    }
    let n = m.horizon();
    let lf = log_factorials(n);
    let tol = LOG_REL_TOL * m.scale();
    for total in 2..=n {
        for j in 1..total {
            let k = total - j;
            let log_binom = lf[total] - lf[j] - lf[k];
            let log_ratio = m.log(total) - m.log(j) - m.log(k);
            if log_binom > log_ratio + tol {
                return AlgebraCheck {
                    holds: false,
                    first_violation: Some((j, k)),
                    reason: Some(format!(
                        "binom({total},{k}) exceeds M_{total}/(M_{j} M_{k})"
                    )),
                };
            }
        }
    }
    AlgebraCheck {
        holds: true,
        first_violation: None,
        reason: None,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LogConvexCheck {
    pub holds: bool,
    pub first_violation: Option<usize>,
}

/// `M_k^2 <= M_{k-1} M_{k+1}` for every interior `k`.
pub fn is_log_convex(m: &PositiveSequence) -> LogConvexCheck {
    let tol = LOG_REL_TOL * m.scale();
    let first_violation =
        (1..m.horizon()).find(|&k| 2.0 * m.log(k) > m.log(k - 1) + m.log(k + 1) + tol);
    LogConvexCheck {
        holds: first_violation.is_none(),
        first_violation,
    }
}

#[derive(Debug, Clone)]
pub struct MinorantResult {
    pub minorant: PositiveSequence,
    /// Hull vertices `n_0 = 0 < n_1 < ...`, ending at the horizon.
    pub principal_indices: Vec<usize>,
    /// `M_N^{1/N}` at the horizon. The minorant is computed whatever this is;
    /// growth of `M_n^{1/n}` to infinity cannot be confirmed on a prefix.
    pub root_at_horizon: f64,
}

impl MinorantResult {
    pub fn is_principal(&self, n: usize) -> bool {
        self.principal_indices.binary_search(&n).is_ok()
    }

    /// Largest principal index `<= n`.
    pub fn principal_at_or_below(&self, n: usize) -> usize {
        match self.principal_indices.binary_search(&n) {
            Ok(i) => self.principal_indices[i],
            Err(i) => self.principal_indices[i.saturating_sub(1)],
        }
    }

    /// `M^c_n / M^c_{n+1}`.
    pub fn ratio(&self, n: usize) -> f64 {
        (self.minorant.log(n) - self.minorant.log(n + 1)).exp()
    }
}

/// Largest log-convex sequence below `m`: the exponential of the lower convex
/// hull of `(n, log M_n)`, computed with a single monotone stack sweep.
///
/// Points within `1e-12` (relative) of a hull chord are kept as vertices, so
/// collinear data yields every index as principal.
pub fn log_convex_minorant(m: &PositiveSequence) -> MinorantResult {
    let n = m.horizon();
    let tol = LOG_REL_TOL * m.scale();
    let mut hull: Vec<usize> = Vec::with_capacity(n + 1);
    for p in 0..=n {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let t = (b - a) as f64 / (p - a) as f64;
            let chord = m.log(a) + t * (m.log(p) - m.log(a));
            if m.log(b) > chord + tol {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut logs = m.logs.clone();
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let slope = (m.log(b) - m.log(a)) / (b - a) as f64;
        for i in a + 1..b {
            logs[i] = m.log(a) + slope * (i - a) as f64;
        }
    }
    let root_at_horizon = if n == 0 {
        m.value(0)
    } else {
        (m.log(n) / n as f64).exp()
    };
    MinorantResult {
        minorant: PositiveSequence { logs },
        principal_indices: hull,
        root_at_horizon,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DcSums {
    /// `root_sums[i] = sum_{n=1}^{i+1} M_n^{-1/n}`.
    pub root_sums: Vec<f64>,
    /// `ratio_sums[i] = sum_{n=0}^{i} M^c_n / M^c_{n+1}`.
    pub ratio_sums: Vec<f64>,
    /// Set when some entry is an exact zero: the series is `+inf` by convention.
    pub infinite: bool,
    pub zero_index: Option<usize>,
}

/// Running sums of `M_n^{-1/n}` (n = 1..=up_to) and of `M^c_n / M^c_{n+1}`
/// (n = 0..=min(up_to, N-1)).
pub fn dc_partial_sums(m: &PositiveSequence, up_to: usize) -> Result<DcSums> {
    if up_to > m.horizon() {
        return Err(Error::precondition(format!(
            "up_to = {up_to} exceeds the horizon {}",
            m.horizon()
        )));
    }
    let mut acc = 0.0;
    let root_sums = (1..=up_to)
        .map(|n| {
            acc += (-m.log(n) / n as f64).exp();
            acc
        })
        .collect();
    let minorant = log_convex_minorant(m);
    let last = up_to.min(m.horizon().saturating_sub(1));
    let mut acc = 0.0;
    let ratio_sums = if m.horizon() == 0 {
        Vec::new()
    } else {
        (0..=last)
            .map(|n| {
                acc += minorant.ratio(n);
                acc
            })
            .collect()
    };
    Ok(DcSums {
        root_sums,
        ratio_sums,
        infinite: false,
        zero_index: None,
    })
}

/// As [`dc_partial_sums`] for sup-norm data, honouring the convention that a
/// vanishing sup-norm makes `sum |f^(j)|^{-1/j}` infinite.
pub fn dc_partial_sums_of_norms(norms: &NormSequence, up_to: usize) -> Result<DcSums> {
    if let Some(k) = norms.first_zero() {
        return Ok(DcSums {
            root_sums: Vec::new(),
            ratio_sums: Vec::new(),
            infinite: true,
            zero_index: Some(k),
        });
    }
    dc_partial_sums(&norms.to_positive()?, up_to)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DivergenceEvidence {
    DivergentEvidence,
    ConvergentEvidence,
    Inconclusive,
}

impl fmt::Display for DivergenceEvidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DivergenceEvidence::DivergentEvidence => "DIVERGENT_EVIDENCE",
            DivergenceEvidence::ConvergentEvidence => "CONVERGENT_EVIDENCE",
            DivergenceEvidence::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceClassification {
    pub label: DivergenceEvidence,
    pub slope: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    pub terms_decreasing: bool,
}

/// Heuristic separation of harmonic decay from faster decay of `M_n^{-1/n}`.
pub const DIVERGENT_SLOPE: f64 = -1.05;
pub const CONVERGENT_SLOPE: f64 = -1.3;

/// Least-squares slope of `log M_n^{-1/n}` against `log n` over the top half
/// of the prefix.
pub fn classify_divergence(m: &PositiveSequence) -> Result<DivergenceClassification> {
    let n = m.horizon();
    if n < 32 {
        return Err(Error::precondition("classification needs N >= 32"));
    }
    let pts: Vec<(f64, f64)> = (n.div_ceil(2)..=n)
        .map(|k| ((k as f64).ln(), -m.log(k) / k as f64))
        .collect();
    let (slope, residual) = least_squares(&pts);
    let terms_decreasing = pts.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
    let label = if slope >= DIVERGENT_SLOPE {
        DivergenceEvidence::DivergentEvidence
    } else if slope <= CONVERGENT_SLOPE && terms_decreasing {
        DivergenceEvidence::ConvergentEvidence
    } else {
        DivergenceEvidence::Inconclusive
    };
    Ok(DivergenceClassification {
        label,
        slope,
        residual,
        terms_decreasing,
    })
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let rss: f64 = pts
        .iter()
        .map(|p| {
            let e = p.1 - (my + slope * (p.0 - mx));
            e * e
        })
        .sum();
    (slope, (rss / n).sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct DalesDavieNorm {
    pub partial_sum: f64,
    pub terms: Vec<f64>,
    /// The trailing terms are non-decreasing and nonzero, so the full series
    /// is taken to be infinite.
    pub tail_diverging: bool,
}

/// `sum_j |f^(j)|_X / M_j` over the stored prefix.
pub fn dales_davie_norm(norms: &NormSequence, m: &PositiveSequence) -> Result<DalesDavieNorm> {
    if norms.len() != m.len() {
        return Err(Error::precondition(format!(
            "sup-norm list has {} entries but the weight sequence has {}",
            norms.len(),
            m.len()
        )));
    }
    let terms: Vec<f64> = norms
        .logs()
        .iter()
        .zip(m.logs())
        .map(|(a, b)| (a - b).exp())
        .collect();
    let window = (terms.len() / 4).max(3).min(terms.len());
    let tail = &terms[terms.len() - window..];
    let tail_diverging = window >= 2
        && tail.last().is_some_and(|&t| t > 0.0)
        && tail.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    Ok(DalesDavieNorm {
        partial_sum: terms.iter().sum(),
        terms,
        tail_diverging,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyticStatistic {
    /// `values[k-1] = (|f^(k)| / k!)^{1/k}` for `k = 1..`; zero norms give 0.
    pub values: Vec<f64>,
    /// `tail_sup[i] = max_{j >= i} values[j]` within the horizon.
    pub tail_sup: Vec<f64>,
    /// Log-log slope of the statistic over the top half of the horizon.
    pub slope: f64,
    /// Growth at the horizon indicates an unbounded limsup.
    pub unbounded: bool,
}

pub const UNBOUNDED_SLOPE: f64 = 0.25;

pub fn f_analytic_statistic(norms: &NormSequence) -> AnalyticStatistic {
    let k_max = norms.len().saturating_sub(1);
    let lf = log_factorials(k_max);
    let logs: Vec<f64> = (1..=k_max)
        .map(|k| (norms.logs()[k] - lf[k]) / k as f64)
        .collect();
    let values: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
    let mut tail_sup = values.clone();
    for i in (0..tail_sup.len().saturating_sub(1)).rev() {
        tail_sup[i] = tail_sup[i].max(tail_sup[i + 1]);
    }
    let pts: Vec<(f64, f64)> = (k_max.div_ceil(2)..=k_max)
        .filter(|&k| k >= 1 && logs[k - 1].is_finite())
        .map(|k| ((k as f64).ln(), logs[k - 1]))
        .collect();
    let slope = if pts.len() >= 2 {
        least_squares(&pts).0
    } else {
        0.0
    };
    AnalyticStatistic {
        values,
        tail_sup,
        slope,
        unbounded: slope > UNBOUNDED_SLOPE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(v: &[f64]) -> PositiveSequence {
        PositiveSequence::from_values(v).unwrap()
    }

    /// Independent oracle: the lower hull value at `i` is the minimum over all
    /// chords `(a, b)` with `a <= i <= b` of the linear interpolation.
    fn brute_minorant(logs: &[f64]) -> (Vec<f64>, Vec<usize>) {
        let n = logs.len();
        let mut hull = logs.to_vec();
        for i in 0..n {
            for a in 0..=i {
                for b in i..n {
                    if a == b {
                        continue;
                    }
                    let v = logs[a] + (logs[b] - logs[a]) * (i - a) as f64 / (b - a) as f64;
                    hull[i] = hull[i].min(v);
                }
            }
        }
        let scale = logs.iter().fold(1.0f64, |m, l| m.max(l.abs()));
        let principal = (0..n)
            .filter(|&i| (hull[i] - logs[i]).abs() <= 1e-12 * scale)
            .collect();
        (hull, principal)
    }

    #[test]
    fn algebra_sequence_examples() {
        assert!(is_algebra_sequence(&Family::Factorial.generate(30).unwrap()).holds);
        let ones = is_algebra_sequence(&seq(&[1.0; 10]));
        assert!(!ones.holds);
        assert_eq!(ones.first_violation, Some((1, 1)));
        let double = PositiveSequence::from_logs(
            (0..=10).map(|n| log_factorials(20)[2 * n]).collect(),
        )
        .unwrap();
        assert!(is_algebra_sequence(&double).holds);
        let bad_start = is_algebra_sequence(&seq(&[2.0, 4.0, 8.0]));
        assert!(!bad_start.holds && bad_start.reason.is_some());
    }

    #[test]
    fn log_convex_examples() {
        assert!(is_log_convex(&Family::Factorial.generate(50).unwrap()).holds);
        let c = is_log_convex(&seq(&[1.0, 4.0, 8.0]));
        assert_eq!(c.first_violation, Some(1));
        assert!(is_log_convex(&Family::Geometric(3.0).generate(40).unwrap()).holds);
    }

    #[test]
    fn minorant_examples() {
        let r = log_convex_minorant(&seq(&[1.0, 4.0, 8.0]));
        assert_eq!(r.principal_indices, vec![0, 2]);
        assert!((r.minorant.value(1) - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((r.minorant.value(2) - 8.0).abs() < 1e-12);

        let r = log_convex_minorant(&seq(&[1.0, 10.0, 2.0]));
        assert_eq!(r.principal_indices, vec![0, 2]);
        assert!((r.minorant.value(1) - 2f64.sqrt()).abs() < 1e-12);

        let fact = Family::Factorial.generate(40).unwrap();
        let r = log_convex_minorant(&fact);
        assert_eq!(r.minorant, fact);
        assert_eq!(r.principal_indices, (0..=40).collect::<Vec<_>>());

        let geo = Family::Geometric(2.5).generate(20).unwrap();
        assert_eq!(
            log_convex_minorant(&geo).principal_indices,
            (0..=20).collect::<Vec<_>>()
        );
    }

    #[test]
    fn snapping_to_principal_indices() {
        let r = log_convex_minorant(&seq(&[1.0, 10.0, 2.0, 50.0, 4.0]));
        assert_eq!(r.principal_indices, vec![0, 2, 4]);
        assert_eq!(r.principal_at_or_below(3), 2);
        assert_eq!(r.principal_at_or_below(4), 4);
        assert!(r.is_principal(2) && !r.is_principal(1));
    }

    #[test]
    fn dc_examples() {
        let fact = Family::Factorial.generate(1000).unwrap();
        let sums = dc_partial_sums(&fact, 1000).unwrap();
        // 30-digit reference: sum of exp(-lgamma(n + 1) / n)
        let s = *sums.root_sums.last().unwrap();
        assert!((s - 16.210145061989136).abs() < 1e-11, "{s}");

        let geo = Family::Geometric(4.0).generate(64).unwrap();
        let sums = dc_partial_sums(&geo, 64).unwrap();
        assert!((sums.root_sums.last().unwrap() - 16.0).abs() < 1e-12);

        let zero = NormSequence::from_values(&[1.0, 2.0, 0.0, 3.0]).unwrap();
        let sums = dc_partial_sums_of_norms(&zero, 3).unwrap();
        assert!(sums.infinite);
        assert_eq!(sums.zero_index, Some(2));

        assert!(dc_partial_sums(&geo, 65).is_err());
    }

    #[test]
    fn minorant_ratio_sums_grow_on_divergent_families() {
        for fam in [Family::Factorial, Family::PowerNN, Family::Constant(3.0)] {
            let m = fam.generate(2000).unwrap();
            let cls = classify_divergence(&m).unwrap();
            assert_eq!(cls.label, DivergenceEvidence::DivergentEvidence, "{fam}");
            let sums = dc_partial_sums(&m, 2000).unwrap();
            let r = &sums.ratio_sums;
            // every doubling of the horizon adds a fixed amount
            let mut m = 8;
            while 2 * m <= r.len() {
                assert!(r[2 * m - 1] - r[m - 1] > 0.2, "{fam} at {m}");
                m *= 2;
            }
            assert!(r.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn classification_examples() {
        let c = classify_divergence(&Family::Factorial.generate(1000).unwrap()).unwrap();
        assert_eq!(c.label, DivergenceEvidence::DivergentEvidence);
        assert!((c.slope + 1.0).abs() < 0.05);
        let c = classify_divergence(&Family::FactorialPower(2).generate(1000).unwrap()).unwrap();
        assert_eq!(c.label, DivergenceEvidence::ConvergentEvidence);
        let c = classify_divergence(&Family::Constant(7.0).generate(100).unwrap()).unwrap();
        assert_eq!(c.label, DivergenceEvidence::DivergentEvidence);
        assert!(classify_divergence(&Family::Factorial.generate(31).unwrap()).is_err());
    }

    #[test]
    fn dales_davie_examples() {
        let m = Family::Factorial.generate(6).unwrap();
        let z = NormSequence::from_values(&[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let n = dales_davie_norm(&z, &m).unwrap();
        assert!((n.partial_sum - 2.0).abs() < 1e-15);
        assert!(!n.tail_diverging);

        let one = NormSequence::from_values(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((dales_davie_norm(&one, &m).unwrap().partial_sum - 1.0).abs() < 1e-15);

        let same = NormSequence::from(&m);
        let n = dales_davie_norm(&same, &m).unwrap();
        assert!((n.partial_sum - 7.0).abs() < 1e-12);
        assert!(n.tail_diverging);

        assert!(dales_davie_norm(&one, &Family::Factorial.generate(3).unwrap()).is_err());
    }

    #[test]
    fn analytic_statistic_examples() {
        let fact = NormSequence::from(&Family::Factorial.generate(60).unwrap());
        let s = f_analytic_statistic(&fact);
        assert!(s.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!(!s.unbounded);

        // |f^(k)| = k! / 1.5^{k+1}
        let lf = log_factorials(200);
        let pole = NormSequence::from_logs(
            (0..=200).map(|k| lf[k] - (k as f64 + 1.0) * 1.5f64.ln()).collect(),
        )
        .unwrap();
        let s = f_analytic_statistic(&pole);
        assert!((s.values.last().unwrap() - 1.0 / 1.5).abs() < 0.01);
        assert!(!s.unbounded);

        let sq = NormSequence::from(&Family::FactorialPower(2).generate(200).unwrap());
        let s = f_analytic_statistic(&sq);
        assert!(s.unbounded);
        assert!(s.tail_sup[0] >= *s.values.last().unwrap());

        let zeros = NormSequence::from_values(&[1.0, 1.0, 0.0]).unwrap();
        assert_eq!(f_analytic_statistic(&zeros).values, vec![1.0, 0.0]);
    }

    #[test]
    fn family_parsing() {
        assert_eq!("factorial".parse::<Family>().unwrap(), Family::Factorial);
        assert_eq!("factorial2".parse::<Family>().unwrap(), Family::FactorialPower(2));
        assert_eq!("geometric:2.5".parse::<Family>().unwrap(), Family::Geometric(2.5));
        assert_eq!("power:nn".parse::<Family>().unwrap(), Family::PowerNN);
        assert!("bogus".parse::<Family>().is_err());
        assert!("geometric".parse::<Family>().is_err());
    }

    fn arb_logs() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0f64..5.0, 2..31)
    }

    proptest! {
        #[test]
        fn minorant_matches_brute_force(logs in arb_logs()) {
            let m = PositiveSequence::from_logs(logs.clone()).unwrap();
            let r = log_convex_minorant(&m);
            let (hull, principal) = brute_minorant(&logs);
            for i in 0..logs.len() {
                prop_assert!((r.minorant.log(i) - hull[i]).abs() <= 1e-12 * (1.0 + hull[i].abs()));
            }
            prop_assert_eq!(&r.principal_indices, &principal);
        }

        #[test]
        fn minorant_is_idempotent_dominated_and_convex(logs in arb_logs()) {
            let m = PositiveSequence::from_logs(logs).unwrap();
            let r = log_convex_minorant(&m);
            for k in 0..m.len() {
                prop_assert!(r.minorant.log(k) <= m.log(k) + 1e-12);
            }
            prop_assert!(is_log_convex(&r.minorant).holds);
            let again = log_convex_minorant(&r.minorant);
            for k in 0..m.len() {
                prop_assert!((again.minorant.log(k) - r.minorant.log(k)).abs() <= 1e-12 * (1.0 + r.minorant.log(k).abs()));
            }
        }

        #[test]
        fn minorant_scales_covariantly(logs in arb_logs(), c in 0.01f64..100.0) {
            let m = PositiveSequence::from_logs(logs).unwrap();
            let r = log_convex_minorant(&m);
            let rs = log_convex_minorant(&m.scaled(c).unwrap());
            prop_assert_eq!(&r.principal_indices, &rs.principal_indices);
            for k in 0..m.len() {
                let expect = r.minorant.log(k) + c.ln();
                prop_assert!((rs.minorant.log(k) - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
            }
        }
    }
}
