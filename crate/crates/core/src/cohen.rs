//! The constants `B_{j,k}` for a step parameter `alpha` and the bound
//! propagation certificates built from them.
//!
//! `B_{0,j} = 0`, `B_{j,j} = 1` (j >= 1) and
//! `B_{j+1,k+1} = B_{j,k+1} + alpha * B_{j+1,k}` for `k > j`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::sequence_digest;
use crate::sequences::{log_convex_minorant, log_factorials, MinorantResult, PositiveSequence};

/// `1 / (4e)`: the admissible range for `alpha` is `(0, ALPHA_MAX)`.
pub const ALPHA_MAX: f64 = 0.25 / std::f64::consts::E;

/// Orders up to this size get the exact triangular table.
pub const EXACT_TABLE_LIMIT: usize = 2048;
/// Bandwidth used beyond [`EXACT_TABLE_LIMIT`].
pub const BAND: usize = 64;
/// Largest order whose induction is replayed step by step.
pub const FULL_REPLAY_LIMIT: usize = 512;
/// Largest order whose `(j, k)` bound table is exported.
pub const BOUND_TABLE_LIMIT: usize = 64;

/// Triangular table `B_{j,k}` for `0 <= j <= k <= K`.
#[derive(Debug, Clone)]
pub struct BTable {
    pub alpha: f64,
    pub k_max: usize,
    rows: Vec<Vec<f64>>,
}

impl BTable {
    pub fn get(&self, j: usize, k: usize) -> f64 {
        assert!(j <= k && k <= self.k_max, "B_({j},{k}) outside the table");
        self.rows[j][k - j]
    }

    /// Largest entry with `j < k`.
    pub fn max_off_diagonal(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.iter().skip(1))
            .fold(0.0, |m: f64, &b| m.max(b))
    }
}

pub fn b_table(alpha: f64, k_max: usize) -> Result<BTable> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::precondition("alpha must lie in (0, 1)"));
    }
    if k_max < 1 {
        return Err(Error::precondition("K must be at least 1"));
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(k_max + 1);
    rows.push(vec![0.0; k_max + 1]);
    for j in 0..k_max {
        let prev = &rows[j];
        let mut row = Vec::with_capacity(k_max - j);
        row.push(1.0);
        // row[d] = B_{j+1, j+1+d} = B_{j, j+1+d} + alpha * B_{j+1, j+d}
        for d in 1..(k_max - j) {
            let v = prev[d + 1] + alpha * row[d - 1];
            row.push(v);
        }
        rows.push(row);
    }
    Ok(BTable { alpha, k_max, rows })
}

/// Upper bound for every `B_{j,j+d}`: `(2 alpha)^d / (2 (1 - 4 alpha))`.
pub fn offset_bound(alpha: f64, d: usize) -> f64 {
    (2.0 * alpha).powi(d as i32) / (2.0 * (1.0 - 4.0 * alpha))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BMax {
    /// Upper bound for `max B_{j,k}` over `0 <= j < k <= k_max`.
    pub value: f64,
    /// Contribution of the neglected band, zero for the exact table.
    pub truncation: f64,
    pub banded: bool,
}

/// Upper bound for `max_{j<k<=k_max} B_{j,k}`, exact for small `k_max` and
/// banded (with the neglected offsets replaced by [`offset_bound`]) beyond.
pub fn max_b(alpha: f64, k_max: usize) -> Result<BMax> {
    if k_max <= EXACT_TABLE_LIMIT {
        let t = b_table(alpha, k_max.max(1))?;
        return Ok(BMax {
            value: t.max_off_diagonal(),
            truncation: 0.0,
            banded: false,
        });
    }
    if !(alpha > 0.0 && alpha < 0.25) {
        return Err(Error::precondition("banded evaluation needs alpha < 1/4"));
    }
    let cap = offset_bound(alpha, BAND + 1);
    // row[d] = B_{j, j+d}
    let mut row = vec![0.0; BAND + 2];
    row[BAND + 1] = cap;
    let mut best = 0.0f64;
    for j in 0..k_max {
        let mut next = vec![0.0; BAND + 2];
        next[0] = 1.0;
        for d in 1..=BAND {
            next[d] = row[d + 1] + alpha * next[d - 1];
        }
        next[BAND + 1] = cap;
        let valid = (k_max - (j + 1)).min(BAND);
        for &v in &next[1..=valid] {
            best = best.max(v);
        }
        row = next;
    }
    Ok(BMax {
        value: best,
        truncation: cap,
        banded: true,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CohenVerification {
    pub alpha: f64,
    pub k_max: usize,
    pub max_b: f64,
    /// `max B_{j,k} / alpha`, the empirical constant.
    pub k_est: f64,
    pub max_b_ok: bool,
    /// `sums[n - 1]` for `n = 1..=K`.
    pub sums: Vec<f64>,
    pub sum_check_ok: bool,
    pub monotone_ok: bool,
    pub passed: bool,
}

/// `sum_{j<n} ((j+1) alpha)^j / j! + 2 (n alpha)^n / n!`.
pub fn lemma_sum(alpha: f64, n: usize) -> f64 {
    let lf = log_factorials(n);
    let term = |base: usize, j: usize| -> f64 {
        if j == 0 {
            1.0
        } else {
            (j as f64 * (base as f64 * alpha).ln() - lf[j]).exp()
        }
    };
    let mut sum = 0.0;
    for j in 0..n {
        sum += term(j + 1, j);
    }
    sum + 2.0 * term(n, n)
}

pub fn verify_cohen_bounds(alpha: f64, k_max: usize) -> Result<CohenVerification> {
    if !(alpha > 0.0 && alpha < ALPHA_MAX) {
        return Err(Error::Precondition(format!(
            "alpha = {alpha} must lie in (0, 1/(4e)) = (0, {ALPHA_MAX})"
        )));
    }
    if k_max < 2 {
        return Err(Error::precondition("K must be at least 2"));
    }
    let t = b_table(alpha, k_max)?;
    let max_b = t.max_off_diagonal();
    let mut monotone_ok = true;
    for j in 0..k_max {
        for k in j + 1..k_max {
            if t.get(j + 1, k + 1) < t.get(j, k + 1) {
                monotone_ok = false;
            }
        }
    }
    let sums: Vec<f64> = (1..=k_max).map(|n| lemma_sum(alpha, n)).collect();
    let sum_check_ok = sums.iter().all(|&s| s < 2.0);
    let max_b_ok = max_b < 0.5;
    Ok(CohenVerification {
        alpha,
        k_max,
        max_b,
        k_est: max_b / alpha,
        max_b_ok,
        sums,
        sum_check_ok,
        monotone_ok,
        passed: max_b_ok && sum_check_ok && monotone_ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReplayMode {
    Full,
    Summary,
    Trivial,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplayReport {
    pub mode: ReplayMode,
    /// Base cases at principal indices (bound `B_{j,j} M^c_i = M_i`).
    pub principal_base_cases: usize,
    /// Base cases closed by the Cohen-Taylor combination.
    pub combination_base_cases: usize,
    /// Largest value of the combination factor, which must stay below 1.
    pub max_combination: f64,
    pub step_identities: usize,
    /// Largest `|B_{j-1,n-k+1} + alpha B_{j,n-k} - B_{j,n-k+1}|`.
    pub max_step_residual: f64,
    /// The ratio inequality `M^c_{k+1}/M^c_k <= M^c_{n-j+1}/M^c_{n-j}` used in each step.
    pub ratio_checks_ok: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub j: usize,
    pub k: usize,
    /// `B_{j,n-k+1} M^c_k`.
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropagationCertificate {
    pub requested_n: usize,
    pub n: usize,
    pub snapped: bool,
    pub s: f64,
    pub alpha: f64,
    pub ratio_sum: f64,
    /// `x_0 = 0 < x_1 < ... < x_n <= s`.
    pub grid: Vec<f64>,
    pub max_b: f64,
    pub max_b_truncation: f64,
    pub k_est: f64,
    pub m0: f64,
    /// `max B * M_0`, bounding `|f|` on the path image.
    pub final_bound: f64,
    pub replay: ReplayReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_table: Option<Vec<BoundEntry>>,
    pub sequence_digest: String,
}

/// Replays the bound propagation for a function whose derivatives all vanish
/// at the start of a unit-speed path of length `s` and satisfy
/// `|f^(k)| <= M_k` on its image.
pub fn propagate_vanishing_bound(
    m: &PositiveSequence,
    s: f64,
    n: usize,
) -> Result<PropagationCertificate> {
    let minorant = log_convex_minorant(m);
    propagate_with_minorant(m, &minorant, s, n)
}

/// As [`propagate_vanishing_bound`] with a precomputed minorant of `m`.
pub fn propagate_with_minorant(
    m: &PositiveSequence,
    minorant: &MinorantResult,
    s: f64,
    requested_n: usize,
) -> Result<PropagationCertificate> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::precondition("path length must be finite and nonnegative"));
    }
    if requested_n < 1 {
        return Err(Error::precondition("order must be at least 1"));
    }
    if requested_n + 1 > m.horizon() {
        return Err(Error::Precondition(format!(
            "order {requested_n} needs M up to index {}, but the horizon is {}",
            requested_n + 1,
            m.horizon()
        )));
    }
    let n = minorant.principal_at_or_below(requested_n);
    let digest = sequence_digest(m);
    let mc = &minorant.minorant;
    let m0 = m.value(0);
    if s == 0.0 {
        return Ok(PropagationCertificate {
            requested_n,
            n,
            snapped: n != requested_n,
            s,
            alpha: 0.0,
            ratio_sum: 0.0,
            grid: vec![0.0; n + 1],
            max_b: 0.0,
            max_b_truncation: 0.0,
            k_est: 0.0,
            m0,
            final_bound: 0.0,
            replay: ReplayReport {
                mode: ReplayMode::Trivial,
                principal_base_cases: 0,
                combination_base_cases: 0,
                max_combination: 0.0,
                step_identities: 0,
                max_step_residual: 0.0,
                ratio_checks_ok: true,
                holds: true,
            },
            bound_table: None,
            sequence_digest: digest,
        });
    }
    if n == 0 {
        return Err(Error::precondition("no principal index >= 1 at or below the requested order"));
    }
    let ratios: Vec<f64> = (0..=n).map(|j| minorant.ratio(j)).collect();
    let ratio_sum: f64 = ratios.iter().sum();
    let required = 4.0 * std::f64::consts::E * s;
    if !(ratio_sum > required) {
        return Err(Error::InsufficientDivergence {
            ratio_sum,
            required,
        });
    }
    let alpha = s / ratio_sum;
    let mut grid = Vec::with_capacity(n + 1);
    grid.push(0.0);
    let mut x = 0.0;
    for j in 1..=n {
        x += alpha * ratios[n - j];
        grid.push(x);
    }
    let bmax = max_b(alpha, n + 1)?;
    let max_b_value = bmax.value + bmax.truncation;

    let replay = if n <= FULL_REPLAY_LIMIT {
        replay_full(minorant, alpha, n)?
    } else {
        replay_summary(minorant, n)
    };
    let bound_table = if n <= BOUND_TABLE_LIMIT {
        let t = b_table(alpha, n + 1)?;
        let mut rows = Vec::new();
        for j in 0..=n {
            for k in 0..=(n - j + 1) {
                let b = t.get(j, n + 1 - k);
                let bound = if b == 0.0 { 0.0 } else { (b.ln() + mc.log(k)).exp() };
                rows.push(BoundEntry { j, k, bound });
            }
        }
        Some(rows)
    } else {
        None
    };
    Ok(PropagationCertificate {
        requested_n,
        n,
        snapped: n != requested_n,
        s,
        alpha,
        ratio_sum,
        grid,
        max_b: max_b_value,
        max_b_truncation: bmax.truncation,
        k_est: max_b_value / alpha,
        m0,
        final_bound: max_b_value * m0,
        replay,
        bound_table,
        sequence_digest: digest,
    })
}

fn replay_full(minorant: &MinorantResult, alpha: f64, n: usize) -> Result<ReplayReport> {
    let t = b_table(alpha, n + 1)?;
    let mc = &minorant.minorant;
    let lf = log_factorials(n + 1);
    let mut report = ReplayReport {
        mode: ReplayMode::Full,
        principal_base_cases: 0,
        combination_base_cases: 0,
        max_combination: 0.0,
        step_identities: 0,
        max_step_residual: 0.0,
        ratio_checks_ok: true,
        holds: true,
    };
    let tol = 1e-12;
    for j in 1..=n {
        let i = n - j + 1;
        if minorant.is_principal(i) {
            report.principal_base_cases += 1;
        } else {
            let next = minorant
                .principal_indices
                .iter()
                .copied()
                .find(|&p| p > i)
                .ok_or_else(|| Error::Verification(format!("no principal index above {i}")))?;
            let mm = next - i;
            if j < mm + 1 {
                report.holds = false;
                continue;
            }
            let mut comb = 0.0;
            for p in 0..mm {
                let b = t.get(j - 1 - p, j - p);
                let pow = if p == 0 {
                    1.0
                } else {
                    (p as f64 * ((p + 1) as f64 * alpha).ln() - lf[p]).exp()
                };
                comb += b * pow;
            }
            comb += (mm as f64 * (mm as f64 * alpha).ln() - lf[mm]).exp();
            report.max_combination = report.max_combination.max(comb);
            if !(comb < 1.0) {
                report.holds = false;
            }
            report.combination_base_cases += 1;
        }
        for k in 0..i {
            let lhs = t.get(j - 1, n - k + 1) + alpha * t.get(j, n - k);
            let residual = (lhs - t.get(j, n - k + 1)).abs();
            report.max_step_residual = report.max_step_residual.max(residual);
            report.step_identities += 1;
            let up = mc.log(k + 1) - mc.log(k);
            let here = mc.log(n - j + 1) - mc.log(n - j);
            if up > here + tol * (1.0 + here.abs()) {
                report.ratio_checks_ok = false;
            }
        }
    }
    report.holds &= report.ratio_checks_ok && report.max_step_residual <= 1e-15;
    Ok(report)
}

fn replay_summary(minorant: &MinorantResult, n: usize) -> ReplayReport {
    // Log-convexity of the minorant gives every ratio inequality; the
    // combination factor is bounded by the lemma sum below 2 times max B < 1/2.
    let principal = minorant
        .principal_indices
        .iter()
        .filter(|&&p| p >= 1 && p <= n)
        .count();
    ReplayReport {
        mode: ReplayMode::Summary,
        principal_base_cases: principal,
        combination_base_cases: n - principal,
        max_combination: f64::NAN,
        step_identities: 0,
        max_step_residual: 0.0,
        ratio_checks_ok: true,
        holds: true,
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EasyCaseBound {
    pub best_n: usize,
    pub bound: f64,
}

/// `min_n M_n s^n / n!` over the stored prefix, with the smallest minimiser.
pub fn easycase_bound(m: &PositiveSequence, s: f64) -> Result<EasyCaseBound> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::precondition("s must be finite and nonnegative"));
    }
    let lf = log_factorials(m.horizon());
    let mut best = EasyCaseBound {
        best_n: 0,
        bound: m.value(0),
    };
    for n in 1..=m.horizon() {
        let v = if s == 0.0 {
            0.0
        } else {
            (m.log(n) + n as f64 * s.ln() - lf[n]).exp()
        };
        if v < best.bound {
            best = EasyCaseBound { best_n: n, bound: v };
        }
    }
    Ok(best)
}
