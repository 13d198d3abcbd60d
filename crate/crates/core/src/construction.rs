//! The dyadic annulus construction around a circle `C_r` in the unit disk.
//!
//! Holes are packed into annuli `A_k` (inside `C_r`) and `B_k` (outside)
//! whose distance to the circle halves at every level, with hole budgets
//! `gamma_k / 2` chosen so that `sum_n gamma_n / (2^{1-n0-n})^{k+1}` stays
//! below `(log(k+3))^k`. Only finitely many levels are stored; the omitted
//! ones are covered by [`ConstructionTail`].

use std::f64::consts::{LN_2, PI};
use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cohen::{propagate_vanishing_bound, PropagationCertificate};
use crate::error::{Error, Result};
use crate::estimates::{verify_cheese_bound, CheeseBoundReport, TailBound, Targets};
use crate::geometry::{AbstractSwissCheese, Disk, DiskIndex, WitnessReport};
use crate::jets::{sup_jet_on_circle, sup_on_cheese, RationalFunction, SupOnCheese};
use crate::sequences::{
    classify_divergence, log_factorials, DivergenceClassification, PositiveSequence,
};

/// Hard cap on the number of holes a single annulus may receive.
pub const MAX_ANNULUS_HOLES: usize = 4_000_000;

/// Extra `gamma` terms summed explicitly before the geometric remainder.
const GAMMA_LOOKAHEAD: usize = 200;

/// Relative rounding allowance in the `gamma` display check.
const DISPLAY_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusSpec {
    #[serde(serialize_with = "crate::io::serialize_point")]
    pub center: Complex64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub eps: f64,
    pub delta: f64,
}

impl AnnulusSpec {
    pub fn new(center: Complex64, lambda0: f64, lambda1: f64, eps: f64, delta: f64) -> Result<Self> {
        if !(lambda1 >= 0.0 && lambda0 > lambda1 && lambda0.is_finite()) {
            return Err(Error::Precondition(format!(
                "annulus radii must satisfy lambda0 > lambda1 >= 0 (got {lambda0}, {lambda1})"
            )));
        }
        if !(eps > 0.0 && delta > 0.0) {
            return Err(Error::precondition("eps and delta must be positive"));
        }
        Ok(AnnulusSpec {
            center,
            lambda0,
            lambda1,
            eps,
            delta,
        })
    }

    pub fn width(&self) -> f64 {
        self.lambda0 - self.lambda1
    }
}

struct AnnulusBuild {
    cheese: AbstractSwissCheese,
    levels: usize,
    resolution: f64,
}

/// Concentric-ring packing of the annulus `lambda1 <= |z - a| <= lambda0`.
///
/// Hole 1 is `(a, lambda1)`. Level `m` uses spacing `h_m = w 2^{-m-1}`, ring
/// radii `lambda1 + (i + 1/2) h_m` and per-hole radius
/// `min(eps 2^{-m-1} / N_m, h_m / 4)`; levels stop once `h_m < delta`.
fn place_annulus_holes(spec: &AnnulusSpec) -> Result<AnnulusBuild> {
    let a = spec.center;
    let width = spec.width();
    let mut placed: Vec<Disk> = Vec::new();
    let mut m: i32 = 1;
    let mut achieved = width;
    loop {
        let h = width * 0.5f64.powi(m + 1);
        let rings = 1usize << (m + 1);
        let mut centers = Vec::new();
        for i in 0..rings {
            let rad = spec.lambda1 + (i as f64 + 0.5) * h;
            let count = ((2.0 * PI * rad / h).floor() as usize).max(1);
            centers.extend(
                (0..count).map(|j| a + Complex64::from_polar(rad, 2.0 * PI * j as f64 / count as f64)),
            );
        }
        if placed.len() + centers.len() > MAX_ANNULUS_HOLES {
            return Err(Error::Precondition(format!(
                "annulus needs more than {MAX_ANNULUS_HOLES} holes at resolution {}",
                spec.delta
            )));
        }
        let radius = (spec.eps * 0.5f64.powi(m + 1) / centers.len() as f64).min(h / 4.0);
        if !(radius >= f64::MIN_POSITIVE) {
            return Err(Error::BudgetExhausted {
                requested: spec.delta,
                achieved,
            });
        }
        let index = DiskIndex::build(placed.iter().copied());
        for c in centers {
            let d = (c - a).norm();
            if d - radius <= spec.lambda1 || d + radius >= spec.lambda0 {
                continue;
            }
            if matches!(index.nearest_margin(c, radius, None, 0.0), Some((g, _)) if g <= 0.0) {
                continue;
            }
            placed.push(Disk::new(c, radius));
        }
        achieved = h;
        if h < spec.delta {
            break;
        }
        m += 1;
    }
    let mut holes = Vec::with_capacity(placed.len() + 1);
    holes.push(Disk::new(a, spec.lambda1));
    holes.extend(placed);
    Ok(AnnulusBuild {
        cheese: AbstractSwissCheese::new(Disk::new(a, spec.lambda0), holes, 0.0)?,
        levels: m as usize,
        resolution: achieved,
    })
}

fn sum_sorted(radii: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = radii.collect();
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

fn verify_annulus(spec: &AnnulusSpec, cheese: &AbstractSwissCheese) -> Result<()> {
    let report = cheese.is_classical(0.0);
    if !report.is_classical {
        return Err(Error::Verification(format!(
            "annulus cheese is not classical (holes {:?})",
            report.violating_indices
        )));
    }
    let budget = sum_sorted(cheese.holes.iter().skip(1).map(|h| h.radius));
    if !(budget < spec.eps) {
        return Err(Error::Verification(format!(
            "annulus holes use {budget:e}, budget {:e}",
            spec.eps
        )));
    }
    let witness = cheese.empty_interior_witness(Disk::new(spec.center, spec.lambda0), spec.delta)?;
    if !witness.holds {
        return Err(Error::Verification(format!(
            "annulus density gap {} exceeds {}",
            witness.worst_gap, spec.delta
        )));
    }
    Ok(())
}

/// Classical cheese with outer disk `(a, lambda0)`, hole 1 `(a, lambda1)` and
/// holes of total radius below `eps` packed to density `delta`.
pub fn regular_annulus_cheese(spec: &AnnulusSpec) -> Result<AbstractSwissCheese> {
    let built = place_annulus_holes(spec)?;
    verify_annulus(spec, &built.cheese)?;
    Ok(built.cheese)
}

/// Smallest `n0 >= 1` with `0 < r - 2^{1-n0}` and `r + 2^{1-n0} < 1`.
pub fn minimal_offset(r: f64) -> Result<u32> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Precondition(format!("r = {r} must lie in (0, 1)")));
    }
    (1..1000)
        .find(|&n0| {
            let w = 2f64.powi(1 - n0 as i32);
            r + w < 1.0 && r - w > 0.0
        })
        .ok_or_else(|| Error::Precondition(format!("no dyadic offset fits r = {r}")))
}

/// `ln` of `(2^{1-n0-n})^{k+1} (log(k+3))^k / 2^n`.
pub fn log_gamma_candidate(n0: u32, n: usize, k: usize) -> f64 {
    let e = 1.0 - n0 as f64 - n as f64;
    (k as f64 + 1.0) * e * LN_2 + k as f64 * ((k as f64 + 3.0).ln()).ln() - n as f64 * LN_2
}

/// `ln` of `gamma_n`.
fn log_gamma(n0: u32, eps: f64, k_probe: usize, n: usize) -> f64 {
    let candidate = (0..=k_probe)
        .map(|k| log_gamma_candidate(n0, n, k))
        .fold(f64::INFINITY, f64::min);
    candidate.min(eps.ln() - (n as f64 + 1.0) * LN_2)
}

/// `gamma_1..=gamma_count`: the smaller of the candidate bound minimised over
/// `k <= k_probe` and `eps 2^{-n-1}`.
pub fn choose_gamma(n0: u32, eps: f64, k_probe: usize, count: usize) -> Result<Vec<f64>> {
    if !(eps > 0.0) {
        return Err(Error::precondition("eps must be positive"));
    }
    if k_probe < 20 {
        return Err(Error::precondition("K_probe must be at least 20"));
    }
    let gamma: Vec<f64> = (1..=count).map(|n| log_gamma(n0, eps, k_probe, n).exp()).collect();
    let total = gamma_total(n0, eps, k_probe, 0);
    if !(total < eps) {
        return Err(Error::Verification(format!("sum of gamma {total} is not below {eps}")));
    }
    for row in gamma_display(n0, eps, k_probe) {
        if !row.holds {
            return Err(Error::Verification(format!(
                "gamma display fails at k = {}: {} > {}",
                row.k, row.lhs, row.rhs
            )));
        }
    }
    Ok(gamma)
}

/// Upper bound for `sum_{n > after} gamma_n`.
fn gamma_total(n0: u32, eps: f64, k_probe: usize, after: usize) -> f64 {
    let head: Vec<f64> = (after + 1..=after + GAMMA_LOOKAHEAD)
        .map(|n| log_gamma(n0, eps, k_probe, n).exp())
        .collect();
    sum_sorted(head.into_iter()) + eps * 0.5f64.powi((after + GAMMA_LOOKAHEAD + 1) as i32)
}

#[derive(Debug, Clone, Serialize)]
pub struct DisplayRow {
    pub k: usize,
    /// `sum_n gamma_n / (2^{1-n0-n})^{k+1}`, with the terms beyond the
    /// explicit range bounded by `(log(k+3))^k 2^{-n}`.
    pub lhs: f64,
    /// `(log(k+3))^k`.
    pub rhs: f64,
    pub holds: bool,
}

fn gamma_display(n0: u32, eps: f64, k_probe: usize) -> Vec<DisplayRow> {
    (0..=k_probe)
        .map(|k| {
            let ll = k as f64 * ((k as f64 + 3.0).ln()).ln();
            let e = k as f64 + 1.0;
            let terms = (1..=GAMMA_LOOKAHEAD).map(|n| {
                let dn = (1.0 - n0 as f64 - n as f64) * LN_2;
                (log_gamma(n0, eps, k_probe, n) - e * dn).exp()
            });
            let lhs = sum_sorted(terms) + (ll - GAMMA_LOOKAHEAD as f64 * LN_2).exp();
            let rhs = ll.exp();
            DisplayRow {
                k,
                lhs,
                rhs,
                holds: lhs <= rhs * (1.0 + DISPLAY_REL_TOL),
            }
        })
        .collect()
}

/// Bound for the contribution of the annuli beyond level `levels`.
///
/// On `C_r` every omitted hole of level `m` lies at distance at least
/// `2^{2-n0-m}`, which gives `2^{-(k+1)} (log(k+3))^k 2^{-levels}` for
/// `k <= k_probe`. Points outside the band `||z| - r| <= 2^{2-n0-levels}` see
/// the total omitted radius at the distance to that band. Anywhere else the
/// omitted annuli can come arbitrarily close and the bound is `+inf`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConstructionTail {
    pub r: f64,
    pub n0: u32,
    pub levels: usize,
    pub k_probe: usize,
    pub omitted_radius: f64,
}

impl ConstructionTail {
    pub fn band(&self) -> f64 {
        2f64.powi(2 - self.n0 as i32 - self.levels as i32)
    }
}

impl TailBound for ConstructionTail {
    fn tail_term(&self, z: Complex64, k: usize) -> f64 {
        let t = (z.norm() - self.r).abs();
        let rounding = 4.0 * f64::EPSILON * (z.norm() + self.r);
        let band = self.band();
        if t <= rounding {
            if k > self.k_probe {
                return f64::INFINITY;
            }
            let kk = k as f64;
            (-(kk + 1.0) * LN_2 + kk * ((kk + 3.0).ln()).ln() - self.levels as f64 * LN_2).exp()
        } else if t > band {
            if self.omitted_radius == 0.0 {
                0.0
            } else {
                (self.omitted_radius.ln() - (k as f64 + 1.0) * (t - band).ln()).exp()
            }
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Inner,
    Outer,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnnulusRecord {
    /// `A_k` (inner) or `B_k` (outer).
    pub side: Side,
    pub level: usize,
    pub spec: AnnulusSpec,
    /// Cheese indices of this annulus' holes in the combined cheese.
    pub holes: Range<usize>,
    pub radius_sum: f64,
    pub hole_levels: usize,
    pub resolution: f64,
}

impl AnnulusRecord {
    pub fn label(&self) -> String {
        match self.side {
            Side::Inner => format!("A_{}", self.level),
            Side::Outer => format!("B_{}", self.level),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Clause {
    pub name: &'static str,
    pub passed: bool,
    /// Observed quantity (a margin, a sum or a gap).
    pub measured: f64,
    /// Value it is compared against.
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstructionReport {
    pub clauses: Vec<Clause>,
    pub display: Vec<DisplayRow>,
    pub witness: WitnessReport,
    pub passed: bool,
}

impl ConstructionReport {
    pub fn failed(&self) -> Vec<&Clause> {
        self.clauses.iter().filter(|c| !c.passed).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstructionResult {
    #[serde(skip)]
    pub cheese: AbstractSwissCheese,
    pub r: f64,
    pub eps: f64,
    pub delta: f64,
    pub k_probe: usize,
    pub n0: u32,
    pub gamma: Vec<f64>,
    pub levels_built: usize,
    pub annuli: Vec<AnnulusRecord>,
    pub tail: ConstructionTail,
    /// Radii of the circles centred at 0 making up `E`: `C_r` and every
    /// annulus boundary circle.
    pub boundary_radii: Vec<f64>,
    pub verification: ConstructionReport,
}

/// Annulus radii for level `k` (`A_k`, `B_k`).
fn level_radii(r: f64, n0: u32, k: usize) -> ((f64, f64), (f64, f64)) {
    let p = |e: i32| 2f64.powi(e);
    let n0 = n0 as i32;
    let k = k as i32;
    if k == 1 {
        ((r - p(1 - n0), 0.0), (1.0, r + p(1 - n0)))
    } else {
        ((r - p(2 - n0 - k), r - p(3 - n0 - k)), (r + p(3 - n0 - k), r + p(2 - n0 - k)))
    }
}

/// Assembles the construction and runs every verification clause, returning
/// the result even when a clause fails.
pub fn assemble_construction(r: f64, eps: f64, delta: f64, k_probe: usize) -> Result<ConstructionResult> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::precondition("eps must be positive"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::precondition("delta must lie in (0, 1)"));
    }
    let n0 = minimal_offset(r)?;
    // last level whose annuli are narrower than delta
    let levels = (1..)
        .find(|&k: &usize| 2f64.powi(2 - n0 as i32 - k as i32) < delta)
        .unwrap();
    let gamma = choose_gamma(n0, eps, k_probe, levels)?;

    let zero = Complex64::new(0.0, 0.0);
    let mut specs = Vec::new();
    for k in 1..=levels {
        let ((a0, a1), (b0, b1)) = level_radii(r, n0, k);
        let budget = gamma[k - 1] / 2.0;
        specs.push((Side::Inner, k, AnnulusSpec::new(zero, a0, a1, budget, delta)?));
        specs.push((Side::Outer, k, AnnulusSpec::new(zero, b0, b1, budget, delta)?));
    }
    let builds: Vec<AnnulusBuild> = specs
        .par_iter()
        .map(|(_, _, spec)| {
            let b = place_annulus_holes(spec)?;
            verify_annulus(spec, &b.cheese)?;
            Ok(b)
        })
        .collect::<Result<_>>()?;

    let mut holes = Vec::new();
    let mut annuli = Vec::new();
    for ((side, level, spec), build) in specs.iter().zip(builds) {
        let start = holes.len() + 1;
        // hole 1 of each annulus is the disk it surrounds, which belongs to
        // other annuli or contains C_r
        let own = &build.cheese.holes[1..];
        holes.extend_from_slice(own);
        annuli.push(AnnulusRecord {
            side: *side,
            level: *level,
            spec: *spec,
            holes: start..holes.len() + 1,
            radius_sum: sum_sorted(own.iter().map(|h| h.radius)),
            hole_levels: build.levels,
            resolution: build.resolution,
        });
    }
    let omitted_radius = gamma_total(n0, eps, k_probe, levels);
    let cheese = AbstractSwissCheese::new(Disk::new(zero, 1.0), holes, omitted_radius)?;
    let tail = ConstructionTail {
        r,
        n0,
        levels,
        k_probe,
        omitted_radius,
    };

    let mut boundary_radii: Vec<f64> = std::iter::once(r)
        .chain(annuli.iter().flat_map(|a| [a.spec.lambda0, a.spec.lambda1]))
        .filter(|&x| x > 0.0)
        .collect();
    boundary_radii.sort_by(f64::total_cmp);
    boundary_radii.dedup();

    let verification = verify_construction(&cheese, r, n0, eps, delta, k_probe, &annuli)?;
    Ok(ConstructionResult {
        cheese,
        r,
        eps,
        delta,
        k_probe,
        n0,
        gamma,
        levels_built: levels,
        annuli,
        tail,
        boundary_radii,
        verification,
    })
}

fn verify_construction(
    cheese: &AbstractSwissCheese,
    r: f64,
    n0: u32,
    eps: f64,
    delta: f64,
    k_probe: usize,
    annuli: &[AnnulusRecord],
) -> Result<ConstructionReport> {
    let mut clauses = Vec::new();

    let classical = cheese.is_classical(0.0);
    let margin = classical
        .worst_containment_margin
        .min(classical.worst_separation_margin);
    clauses.push(Clause {
        name: "(i) classical",
        passed: classical.is_classical,
        measured: margin,
        threshold: 0.0,
        detail: format!("{} violating holes", classical.violating_indices.len()),
    });

    let rho = cheese.rho();
    let over_budget: Vec<String> = annuli
        .iter()
        .filter(|a| !(a.radius_sum < a.spec.eps))
        .map(|a| a.label())
        .collect();
    clauses.push(Clause {
        name: "(ii) rho < eps",
        passed: rho < eps && over_budget.is_empty(),
        measured: rho,
        threshold: eps,
        detail: if over_budget.is_empty() {
            "every annulus within gamma_k / 2".into()
        } else {
            format!("over budget: {}", over_budget.join(", "))
        },
    });

    let on_circle = cheese.circle_in_cheese(Complex64::new(0.0, 0.0), r);
    clauses.push(Clause {
        name: "(iii) C_r in X",
        passed: on_circle,
        measured: r,
        threshold: cheese.outer.radius,
        detail: String::new(),
    });

    let display = gamma_display(n0, eps, k_probe);
    let worst = display
        .iter()
        .map(|d| d.lhs / d.rhs)
        .fold(0.0, f64::max);
    clauses.push(Clause {
        name: "(iv) gamma display",
        passed: display.iter().all(|d| d.holds),
        measured: worst,
        threshold: 1.0,
        detail: format!("k <= {k_probe}; measured is the largest lhs / rhs"),
    });

    // distance from every hole to C_r against 2^{2-n0-k} for its level k
    let margins: Vec<(f64, String)> = annuli
        .par_iter()
        .map(|a| {
            let need = 2f64.powi(2 - n0 as i32 - a.level as i32);
            let worst = cheese.holes[a.holes.start - 1..a.holes.end - 1]
                .iter()
                .map(|h| ((h.center.norm() - r).abs() - h.radius) / need - 1.0)
                .fold(f64::INFINITY, f64::min);
            (worst, a.label())
        })
        .collect();
    let (worst_margin, at) = margins
        .into_iter()
        .fold((f64::INFINITY, String::new()), |acc, m| if m.0 < acc.0 { m } else { acc });
    clauses.push(Clause {
        name: "(v) hole distance margins",
        passed: worst_margin > 0.0,
        measured: worst_margin,
        threshold: 0.0,
        detail: format!("smallest relative excess of d_n over 2^(2-n0-k), at {at}"),
    });

    let witness = cheese.empty_interior_witness(cheese.outer, delta)?;
    clauses.push(Clause {
        name: "(vi) density witness",
        passed: witness.holds,
        measured: witness.worst_gap,
        threshold: delta,
        detail: format!("{} grid points", witness.points_checked),
    });

    let passed = clauses.iter().all(|c| c.passed);
    Ok(ConstructionReport {
        clauses,
        display,
        witness,
        passed,
    })
}

/// [`assemble_construction`], failing with the first clause that does not hold.
pub fn build_construction(r: f64, eps: f64, delta: f64, k_probe: usize) -> Result<ConstructionResult> {
    let result = assemble_construction(r, eps, delta, k_probe)?;
    if let Some(c) = result.verification.failed().first() {
        return Err(Error::Verification(format!(
            "clause {} failed: measured {} against {} ({})",
            c.name, c.measured, c.threshold, c.detail
        )));
    }
    Ok(result)
}

#[derive(Debug, Clone, Serialize)]
pub struct DisplayCheck {
    pub k: usize,
    pub exact: f64,
    /// `k! |f|_X (1/d0^{k+1} + (log(k+3))^k)`.
    pub bound: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesRow {
    pub j: usize,
    /// `|f^(j)|_{C_r}^{-1/j}`; `None` encodes `+inf` for a vanishing norm.
    #[serde(serialize_with = "crate::io::finite_or_null")]
    pub term: f64,
    /// `1 / ((2|f|_X)^{1/j} j log(j+3))`.
    pub comparison: f64,
    #[serde(serialize_with = "crate::io::finite_or_null")]
    pub partial_sum: f64,
    pub comparison_sum: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropagationDemo {
    /// The circle is split into `arcs` arcs of length `arc_length` each.
    pub arcs: u64,
    pub arc_length: f64,
    pub certificate: PropagationCertificate,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasianalyticityReport {
    pub r: f64,
    pub d0: f64,
    pub sup_f: SupOnCheese,
    /// `|f^(k)|_{C_r}` for `k <= max(K, J)`.
    pub circle_norms: Vec<f64>,
    pub display: Vec<DisplayCheck>,
    pub display_ok: bool,
    /// The pointwise estimate with the stored holes and the omitted tail,
    /// sampled on `C_r`.
    pub pointwise: CheeseBoundReport,
    pub start_index: usize,
    pub series: Vec<SeriesRow>,
    pub series_dominated: bool,
    /// First `k` with `|f^(k)|_{C_r} = 0`, where the series is `+inf`.
    pub vanishing_from: Option<usize>,
    pub divergence: Option<DivergenceClassification>,
    pub propagation: Option<PropagationDemo>,
    pub passed: bool,
}

/// Norms below this fraction of the running scale count as exact zeros.
const ZERO_NORM_REL: f64 = 1e-13;

/// Samples on `C_r` for the pointwise estimate.
const POINTWISE_SAMPLES: usize = 256;

/// Checks the circle estimates for `f` on the constructed cheese and the
/// divergence of `sum |f^(j)|_{C_r}^{-1/j}` up to `j_max`.
pub fn quasianalyticity_certificate(
    result: &ConstructionResult,
    f: &RationalFunction,
    k_max: usize,
    j_max: usize,
) -> Result<QuasianalyticityReport> {
    if j_max < 1 {
        return Err(Error::precondition("J must be at least 1"));
    }
    let cheese = &result.cheese;
    let r = result.r;
    let d0 = cheese.outer.radius - r;
    let sup_f = sup_on_cheese(f, cheese, result.delta)?;
    let order = k_max.max(j_max);
    let circle = sup_jet_on_circle(f, Complex64::new(0.0, 0.0), r, order, 1e-12).map_err(|e| match e {
        Error::PoleNearContour { point, .. } => Error::PoleOnSet(point),
        other => other,
    })?;
    let lf = log_factorials(order);
    let fx = sup_f.value;

    // exact zeros come out as rounding noise; anything far below the size of
    // the lower-order norms is treated as 0
    let mut norms = circle.sups.clone();
    let scale = norms.iter().take(2).fold(0.0f64, |m, &x| m.max(x));
    for (k, n) in norms.iter_mut().enumerate().skip(1) {
        if *n <= ZERO_NORM_REL * scale * lf[k].exp() {
            *n = 0.0;
        }
    }

    let display: Vec<DisplayCheck> = (0..=k_max)
        .map(|k| {
            let kk = k as f64;
            let inner = (-(kk + 1.0) * d0.ln()).exp() + (kk * ((kk + 3.0).ln()).ln()).exp();
            let bound = (lf[k] + fx.ln() + inner.ln()).exp();
            DisplayCheck {
                k,
                exact: norms[k],
                bound,
                slack: bound - norms[k],
            }
        })
        .collect();
    let display_ok = display.iter().all(|d| d.slack >= 0.0);

    let targets = Targets::Circle {
        center: Complex64::new(0.0, 0.0),
        radius: r,
        samples: POINTWISE_SAMPLES,
    };
    let pointwise = verify_cheese_bound(cheese, f, &targets, k_max.min(result.k_probe), result.delta, &result.tail)?;

    // first k where the log term overtakes 1/d0^{k+1}
    let start_index = (1..)
        .find(|&k: &usize| {
            let kk = k as f64;
            kk * ((kk + 3.0).ln()).ln() >= -(kk + 1.0) * d0.ln()
        })
        .unwrap();
    let mut series = Vec::new();
    let mut partial = 0.0;
    let mut comparison_sum = 0.0;
    let mut dominated = true;
    for j in start_index..=j_max {
        let jj = j as f64;
        let term = if norms[j] == 0.0 {
            f64::INFINITY
        } else {
            (-norms[j].ln() / jj).exp()
        };
        let comparison = 1.0 / ((2.0 * fx).powf(1.0 / jj) * jj * (jj + 3.0).ln());
        partial += term;
        comparison_sum += comparison;
        dominated &= term >= comparison;
        series.push(SeriesRow {
            j,
            term,
            comparison,
            partial_sum: partial,
            comparison_sum,
        });
    }
    let vanishing_from = norms.iter().position(|&n| n == 0.0);

    let (divergence, propagation) = match vanishing_from {
        Some(_) => (None, None),
        None => {
            let seq = PositiveSequence::from_values(&norms)?;
            let divergence = if seq.horizon() >= 32 {
                Some(classify_divergence(&seq)?)
            } else {
                None
            };
            (divergence, propagation_demo(&seq, 2.0 * PI * r)?)
        }
    };

    let passed = display_ok && pointwise.passed && dominated;
    Ok(QuasianalyticityReport {
        r,
        d0,
        sup_f,
        circle_norms: norms,
        display,
        display_ok,
        pointwise,
        start_index,
        series,
        series_dominated: dominated,
        vanishing_from,
        divergence,
        propagation,
        passed,
    })
}

/// Certificate on the longest dyadic arc of the circle that the measured
/// norms can cover.
fn propagation_demo(seq: &PositiveSequence, circumference: f64) -> Result<Option<PropagationDemo>> {
    if seq.horizon() < 2 {
        return Ok(None);
    }
    let n = seq.horizon() - 1;
    for p in 0..40 {
        let arcs = 1u64 << p;
        let arc_length = circumference / arcs as f64;
        match propagate_vanishing_bound(seq, arc_length, n) {
            Ok(certificate) => {
                return Ok(Some(PropagationDemo {
                    arcs,
                    arc_length,
                    certificate,
                }))
            }
            Err(Error::InsufficientDivergence { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn offsets() {
        assert_eq!(minimal_offset(0.5).unwrap(), 3);
        // r + 1/2 >= 1 at n0 = 2 pushes n0 up
        assert_eq!(minimal_offset(0.6).unwrap(), 3);
        assert_eq!(minimal_offset(0.2).unwrap(), 4);
        assert_eq!(minimal_offset(0.9).unwrap(), 5);
        assert!(minimal_offset(1.5).is_err());
        assert!(minimal_offset(0.0).is_err());
    }

    #[test]
    fn gamma_spot_values() {
        let n0 = 12;
        let direct = 2f64.powi(-n0 * 2) * 4f64.ln() / 2.0;
        assert!((log_gamma_candidate(n0 as u32, 1, 1).exp() - direct).abs() < 1e-13 * direct);
        let g = choose_gamma(3, 1.0, 20, 10).unwrap();
        assert!(g.iter().sum::<f64>() < 1.0);
        assert!(g.windows(2).all(|w| w[1] < w[0]));
        for (i, &x) in g.iter().enumerate() {
            assert!(x <= 0.5f64.powi(i as i32 + 2));
        }
        assert!(choose_gamma(3, 1.0, 19, 10).is_err());
    }

    #[test]
    fn candidate_is_eventually_increasing_in_k() {
        // for fixed n the k-terms decrease and then turn around, so the
        // minimum over k is attained
        let n0 = 1;
        let n = 1;
        let terms: Vec<f64> = (0..200).map(|k| log_gamma_candidate(n0, n, k)).collect();
        let argmin = terms
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!(argmin > 0 && argmin < 199);
        assert!(terms[argmin..].windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn display_holds() {
        for row in gamma_display(3, 1.0, 30) {
            assert!(row.holds, "{row:?}");
            assert!(row.lhs > 0.0);
        }
    }

    #[test]
    fn annulus_examples() {
        let spec = AnnulusSpec::new(c64(0.0, 0.0), 1.0, 0.5, 0.1, 0.02).unwrap();
        let c = regular_annulus_cheese(&spec).unwrap();
        assert!(c.is_classical(0.0).is_classical);
        let used: f64 = c.holes[1..].iter().map(|h| h.radius).sum();
        assert!(used < 0.1);
        assert_eq!(c.holes[0], Disk::new(c64(0.0, 0.0), 0.5));
        let w = c.empty_interior_witness(Disk::new(c64(0.0, 0.0), 1.0), 0.02).unwrap();
        assert!(w.holds);

        let solid = AnnulusSpec::new(c64(0.3, -0.1), 0.2, 0.0, 0.05, 0.02).unwrap();
        let c = regular_annulus_cheese(&solid).unwrap();
        assert_eq!(c.holes[0].radius, 0.0);
        assert!(c.contains_point(c64(0.3, -0.1)));

        // radii hit the h/4 cap when the budget is generous
        let greedy = AnnulusSpec::new(c64(0.0, 0.0), 1.0, 0.5, 1e6, 0.05).unwrap();
        let c = regular_annulus_cheese(&greedy).unwrap();
        assert!(c.is_classical(0.0).is_classical);
    }

    #[test]
    fn annulus_is_deterministic() {
        let spec = AnnulusSpec::new(c64(0.0, 0.0), 0.8, 0.6, 0.01, 0.01).unwrap();
        assert_eq!(
            regular_annulus_cheese(&spec).unwrap(),
            regular_annulus_cheese(&spec).unwrap()
        );
    }

    #[test]
    fn annulus_spec_validation() {
        assert!(AnnulusSpec::new(c64(0.0, 0.0), 0.5, 0.5, 0.1, 0.1).is_err());
        assert!(AnnulusSpec::new(c64(0.0, 0.0), 0.5, -0.1, 0.1, 0.1).is_err());
        assert!(AnnulusSpec::new(c64(0.0, 0.0), 0.5, 0.1, 0.0, 0.1).is_err());
    }

    #[test]
    fn budget_exhaustion() {
        let spec = AnnulusSpec::new(c64(0.0, 0.0), 1.0, 0.5, 1e-306, 0.01).unwrap();
        match regular_annulus_cheese(&spec) {
            Err(Error::BudgetExhausted { achieved, .. }) => assert!(achieved > 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn annuli_radii_are_nested() {
        let r = 0.5;
        let n0 = minimal_offset(r).unwrap();
        let mut edges = Vec::new();
        for k in 1..12 {
            let ((a0, a1), (b0, b1)) = level_radii(r, n0, k);
            assert!(a1 < a0 && a0 < r && r < b1 && b1 < b0);
            edges.push((a1, a0));
            edges.push((b1, b0));
        }
        edges.sort_by(|x, y| x.0.total_cmp(&y.0));
        assert!(edges.windows(2).all(|w| w[0].1 <= w[1].0));
    }

    #[test]
    fn tail_on_circle() {
        let tail = ConstructionTail {
            r: 0.5,
            n0: 3,
            levels: 6,
            k_probe: 20,
            omitted_radius: 1e-40,
        };
        let z = Complex64::from_polar(0.5, 1.234);
        let expect = 0.5f64.powi(3) * (5f64.ln()).powi(2) * 0.5f64.powi(6);
        assert!((tail.tail_term(z, 2) - expect).abs() < 1e-14 * expect);
        assert_eq!(tail.tail_term(z, 21), f64::INFINITY);
        assert_eq!(tail.tail_term(c64(0.501, 0.0), 0), f64::INFINITY);
        let far = tail.tail_term(c64(0.9, 0.0), 3);
        assert!(far > 0.0 && far < 1e-35);
    }

    #[test]
    fn small_construction_passes() {
        let res = build_construction(0.5, 1.0, 0.05, 20).unwrap();
        assert_eq!(res.n0, 3);
        assert!(res.verification.passed);
        assert_eq!(res.annuli.len(), 2 * res.levels_built);
        assert!(res.cheese.rho() < 1.0);
        assert!(res.boundary_radii.contains(&0.5));
        // hole ranges tile 1..=len
        let mut next = 1;
        for a in &res.annuli {
            assert_eq!(a.holes.start, next);
            next = a.holes.end;
        }
        assert_eq!(next, res.cheese.holes.len() + 1);
    }

    #[test]
    fn certificate_examples() {
        let res = build_construction(0.5, 1.0, 0.05, 20).unwrap();
        let f = RationalFunction::simple_pole(c64(2.0, 0.0));
        let rep = quasianalyticity_certificate(&res, &f, 10, 40).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.start_index, 7);
        for (k, &n) in rep.circle_norms.iter().enumerate().take(11) {
            let exact = (log_factorials(k)[k] - (k as f64 + 1.0) * 1.5f64.ln()).exp();
            assert!((n - exact).abs() < 1e-8 * exact);
        }
        assert_eq!(
            rep.divergence.as_ref().unwrap().label,
            crate::sequences::DivergenceEvidence::DivergentEvidence
        );
        assert!(rep.propagation.is_some());

        let c = RationalFunction::constant(c64(3.0, 0.0));
        let rep = quasianalyticity_certificate(&res, &c, 5, 10).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.vanishing_from, Some(1));
        assert!(rep.series.iter().all(|s| s.term == f64::INFINITY));

        let z = RationalFunction::polynomial(vec![c64(0.0, 0.0), c64(1.0, 0.0)]);
        let rep = quasianalyticity_certificate(&res, &z, 5, 10).unwrap();
        assert_eq!(rep.vanishing_from, Some(2));
        assert!((rep.circle_norms[0] - 0.5).abs() < 1e-12);

        let inside = RationalFunction::simple_pole(c64(0.5, 0.0));
        assert!(matches!(
            quasianalyticity_certificate(&res, &inside, 5, 10),
            Err(Error::PoleOnSet(_))
        ));
    }
}
