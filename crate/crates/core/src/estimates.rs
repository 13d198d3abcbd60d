//! Derivative estimates for rational functions on Swiss cheeses.
//!
//! For `z` in the cheese with positive distances `d_j` to every deleted disk,
//! `|f^(k)(z)| <= k! (sum_j r_j / d_j^{k+1}) |f|_X`, where index 0 is the outer
//! disk with `d_0 = r_0 - |z - a_0|`. The functions here compute the per-unit
//! factor `k! sum_j r_j / d_j^{k+1}` with the omitted holes accounted for by a
//! [`TailBound`].

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::AbstractSwissCheese;
use crate::jets::{sup_on_cheese, RationalFunction, SupOnCheese};
use crate::sequences::log_factorials;

#[derive(Debug, Clone, Serialize)]
pub struct DistanceProfile {
    /// `r_0 - |z - a_0|`.
    pub d0: f64,
    /// Distance from `z` to each stored open hole; `+inf` for radius-0 holes,
    /// which delete nothing.
    pub d: Vec<f64>,
    pub d_tail_min: Option<f64>,
    /// Cheese indices (1-based) of holes at distance 0.
    pub touching: Vec<usize>,
}

impl DistanceProfile {
    pub fn is_positive(&self) -> bool {
        self.d0 > 0.0 && self.touching.is_empty()
    }
}

pub fn distance_profile(
    cheese: &AbstractSwissCheese,
    z: Complex64,
    d_tail_min: Option<f64>,
) -> DistanceProfile {
    let d0 = cheese.outer.radius - (z - cheese.outer.center).norm();
    let d: Vec<f64> = cheese.holes.iter().map(|h| h.distance_to_open(z)).collect();
    let touching = d
        .iter()
        .enumerate()
        .filter(|(_, &x)| x <= 0.0)
        .map(|(i, _)| i + 1)
        .collect();
    DistanceProfile {
        d0,
        d,
        d_tail_min,
        touching,
    }
}

/// Upper bound for `sum r_j / d_j^{k+1}` over the holes that are not stored.
pub trait TailBound: Sync {
    fn tail_term(&self, z: Complex64, k: usize) -> f64;
}

/// All omitted holes have total radius at most `tail_bound` and lie at
/// distance at least `d_min` from the points of interest.
#[derive(Debug, Clone, Copy)]
pub struct UniformTail {
    pub tail_bound: f64,
    pub d_min: f64,
}

impl TailBound for UniformTail {
    fn tail_term(&self, _z: Complex64, k: usize) -> f64 {
        if self.tail_bound == 0.0 {
            0.0
        } else {
            (self.tail_bound.ln() - (k as f64 + 1.0) * self.d_min.ln()).exp()
        }
    }
}

fn uniform_tail(cheese: &AbstractSwissCheese, tail_d_min: f64) -> Result<UniformTail> {
    if cheese.tail_bound > 0.0 && !(tail_d_min > 0.0) {
        return Err(Error::precondition(
            "a positive tail distance is required when the tail bound is positive",
        ));
    }
    Ok(UniformTail {
        tail_bound: cheese.tail_bound,
        d_min: tail_d_min,
    })
}

/// `ln sum_j exp(x_j)`, robust against overflow.
fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `k! (r_0/d_0^{k+1} + sum_stored r_j/d_j^{k+1} + tail)` for `k = 0..=k_max`.
pub fn cheese_derivative_bounds(
    cheese: &AbstractSwissCheese,
    z: Complex64,
    k_max: usize,
    tail: &dyn TailBound,
) -> Result<Vec<f64>> {
    let profile = distance_profile(cheese, z, None);
    if !(profile.d0 > 0.0) {
        return Err(Error::Precondition(format!(
            "point {z} is not inside the open outer disk"
        )));
    }
    if let Some(&j) = profile.touching.first() {
        return Err(Error::TouchesHole(j));
    }
    let terms: Vec<(f64, f64)> = std::iter::once((cheese.outer.radius.ln(), profile.d0.ln()))
        .chain(
            cheese
                .holes
                .iter()
                .zip(&profile.d)
                .filter(|(h, d)| h.radius > 0.0 && d.is_finite())
                .map(|(h, d)| (h.radius.ln(), d.ln())),
        )
        .collect();
    let lf = log_factorials(k_max);
    Ok((0..=k_max)
        .map(|k| {
            let e = (k + 1) as f64;
            let stored = log_sum_exp(terms.iter().map(|(lr, ld)| lr - e * ld));
            (lf[k] + stored).exp() + (lf[k].exp() * tail.tail_term(z, k))
        })
        .collect())
}

/// `k! sum_j r_j / d_j^{k+1}` including `tail_bound / tail_d_min^{k+1}`.
pub fn cheese_derivative_bound(
    cheese: &AbstractSwissCheese,
    z: Complex64,
    k: usize,
    tail_d_min: f64,
) -> Result<f64> {
    let tail = uniform_tail(cheese, tail_d_min)?;
    Ok(cheese_derivative_bounds(cheese, z, k, &tail)?[k])
}

#[derive(Debug, Clone)]
pub enum Targets {
    Points(Vec<Complex64>),
    /// `samples` equally spaced points on the circle.
    Circle {
        center: Complex64,
        radius: f64,
        samples: usize,
    },
}

impl Targets {
    pub fn points(&self) -> Vec<Complex64> {
        match self {
            Targets::Points(p) => p.clone(),
            Targets::Circle {
                center,
                radius,
                samples,
            } => (0..*samples)
                .map(|i| {
                    center
                        + Complex64::from_polar(
                            *radius,
                            2.0 * std::f64::consts::PI * i as f64 / *samples as f64,
                        )
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub z: [f64; 2],
    pub k: usize,
    pub exact: f64,
    pub bound: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheeseBoundReport {
    pub sup_f: SupOnCheese,
    pub rows: Vec<BoundRow>,
    pub min_relative_slack: f64,
    pub passed: bool,
}

/// Allowed relative shortfall, covering the sampled estimate of `|f|_X`.
pub const ESTIMATE_NOISE: f64 = 1e-6;

/// Compares exact `|f^(k)(z)|` with `bound(z, k) * |f|_X` for every target
/// point and every `k <= k_max`.
pub fn verify_cheese_bound(
    cheese: &AbstractSwissCheese,
    f: &RationalFunction,
    targets: &Targets,
    k_max: usize,
    delta: f64,
    tail: &dyn TailBound,
) -> Result<CheeseBoundReport> {
    let sup_f = sup_on_cheese(f, cheese, delta)?;
    let points = targets.points();
    let rows: Vec<Vec<BoundRow>> = points
        .par_iter()
        .map(|&z| {
            let jet = f.eval_jet(z, k_max)?;
            let bounds = cheese_derivative_bounds(cheese, z, k_max, tail)?;
            Ok((0..=k_max)
                .map(|k| {
                    let exact = jet.derivative(k).norm();
                    let bound = bounds[k] * sup_f.value;
                    BoundRow {
                        z: [z.re, z.im],
                        k,
                        exact,
                        bound,
                        slack: bound - exact,
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let rows: Vec<BoundRow> = rows.into_iter().flatten().collect();
    let min_relative_slack = rows
        .iter()
        .map(|r| if r.bound > 0.0 { r.slack / r.bound } else { 0.0 })
        .fold(f64::INFINITY, f64::min);
    let passed = rows.iter().all(|r| r.slack >= -ESTIMATE_NOISE * r.bound);
    Ok(CheeseBoundReport {
        sup_f,
        rows,
        min_relative_slack,
        passed,
    })
}
