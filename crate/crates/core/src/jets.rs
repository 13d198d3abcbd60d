//! Rational functions and their derivative jets.
//!
//! Derivatives are computed exactly (up to rounding) by shifting numerator and
//! denominator to the base point and dividing the truncated power series.
//! These jets are the ground truth that every certificate compares against.

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{AbstractSwissCheese, CheeseIndex};

/// Relative size of `|den(z)|` below which evaluation is refused.
pub const POLE_THRESHOLD: f64 = 1e-12;

/// Quotient of two polynomials with complex coefficients in ascending degree.
///
/// No gcd normalisation is performed: a root of the denominator is treated as
/// a pole even when the numerator vanishes there too.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    num: Vec<Complex64>,
    den: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub base: Complex64,
    /// `values[k]` is the k-th derivative at `base`.
    pub values: Vec<Complex64>,
}

impl Jet {
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn derivative(&self, k: usize) -> Complex64 {
        self.values[k]
    }
}

impl RationalFunction {
    pub fn new(num: Vec<Complex64>, den: Vec<Complex64>) -> Result<Self> {
        if den.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
            return Err(Error::ZeroDenominator);
        }
        let num = if num.is_empty() {
            vec![Complex64::new(0.0, 0.0)]
        } else {
            num
        };
        if num.iter().chain(&den).any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Malformed("non-finite coefficient".into()));
        }
        Ok(RationalFunction { num, den })
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        Self::new(coeffs, vec![Complex64::new(1.0, 0.0)]).expect("unit denominator")
    }

    pub fn constant(c: Complex64) -> Self {
        Self::polynomial(vec![c])
    }

    /// `1 / (z - a)`.
    pub fn simple_pole(a: Complex64) -> Self {
        Self::new(vec![Complex64::new(1.0, 0.0)], vec![-a, Complex64::new(1.0, 0.0)])
            .expect("nonzero denominator")
    }

    pub fn numerator(&self) -> &[Complex64] {
        &self.num
    }

    pub fn denominator(&self) -> &[Complex64] {
        &self.den
    }

    fn den_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let mut p = 1.0;
        let mut s = 0.0;
        for c in &self.den {
            s += c.norm() * p;
            p *= r;
        }
        s
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let d = horner(&self.den, z);
        if d.norm() <= POLE_THRESHOLD * self.den_scale(z) {
            return Err(Error::PoleAtPoint(z));
        }
        Ok(horner(&self.num, z) / d)
    }

    /// Values `f(z), f'(z), ..., f^(order)(z)`.
    pub fn eval_jet(&self, z: Complex64, order: usize) -> Result<Jet> {
        let coeffs = self.taylor_coefficients(z, order)?;
        let mut factorial = 1.0;
        let values = coeffs
            .into_iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    factorial *= k as f64;
                }
                c * factorial
            })
            .collect();
        Ok(Jet { base: z, values })
    }

    /// Taylor coefficients of `f` at `z` up to `order`.
    pub fn taylor_coefficients(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        let n = shift(&self.num, z, order + 1);
        let d = shift(&self.den, z, order + 1);
        if d[0].norm() <= POLE_THRESHOLD * self.den_scale(z) {
            return Err(Error::PoleAtPoint(z));
        }
        let mut q = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc = n[k];
            for i in 1..=k {
                acc -= d[i] * q[k - i];
            }
            q.push(acc / d[0]);
        }
        Ok(q)
    }

    /// Roots of the denominator (with multiplicity), found by Durand–Kerner
    /// iteration followed by Newton polishing.
    pub fn poles(&self) -> Vec<Complex64> {
        polynomial_roots(&self.den)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;

    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction {
            num: poly_mul(&self.num, &rhs.num),
            den: poly_mul(&self.den, &rhs.den),
        }
    }
}

fn horner(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// First `terms` coefficients of `p(z + h)` as a polynomial in `h`, by
/// repeated synthetic division.
fn shift(p: &[Complex64], z: Complex64, terms: usize) -> Vec<Complex64> {
    let mut work: Vec<Complex64> = p.to_vec();
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        if work.is_empty() {
            out.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let deg = work.len() - 1;
        for i in (0..deg).rev() {
            let carry = work[i + 1] * z;
            work[i] += carry;
        }
        out.push(work[0]);
        work.remove(0);
    }
    out
}

pub(crate) fn polynomial_roots(p: &[Complex64]) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let mut coeffs: Vec<Complex64> = p.to_vec();
    while coeffs.len() > 1 && *coeffs.last().unwrap() == zero {
        coeffs.pop();
    }
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    // Cauchy bound on root modulus
    let bound = 1.0 + monic[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|k| seed.powu(k as u32 + 1) * (bound / seed.norm().powi(k as i32 + 1)).min(bound))
        .collect();
    for _ in 0..2000 {
        let mut change: f64 = 0.0;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom == zero {
                denom = Complex64::new(1e-300, 0.0);
            }
            let step = horner(&monic, roots[i]) / denom;
            roots[i] -= step;
            change = change.max(step.norm());
        }
        if change <= 1e-15 * bound {
            break;
        }
    }
    let derivative: Vec<Complex64> = monic
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect();
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = horner(&derivative, *r);
            if d == zero {
                break;
            }
            let step = horner(&monic, *r) / d;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *r -= step;
        }
    }
    roots
}

/// Sampled sup-norm estimate with its refinement metadata.
#[derive(Debug, Clone, Serialize)]
pub struct SupJetEstimate {
    /// `sups[k]` estimates `sup |f^(k)|` on the circle.
    pub sups: Vec<f64>,
    /// Angle at which each supremum was attained.
    pub argmax_angles: Vec<f64>,
    pub samples: usize,
    pub dyadic_levels: usize,
    /// Whether the last two dyadic levels agreed within the refinement tolerance.
    pub converged: bool,
}

const SUP_DYADIC_AGREEMENT: f64 = 1e-6;
const SUP_INITIAL_SAMPLES: usize = 256;
const SUP_MAX_SAMPLES: usize = 1 << 15;

/// Estimate `sup_{|z - center| = r} |f^(k)(z)|` for every `k <= order`.
///
/// Dyadic angular refinement runs until two successive levels agree within
/// `1e-6` relative, then each maximiser is polished by golden-section search
/// down to `refine_tol` in angle.
pub fn sup_jet_on_circle(
    f: &RationalFunction,
    center: Complex64,
    r: f64,
    order: usize,
    refine_tol: f64,
) -> Result<SupJetEstimate> {
    if !(r > 0.0) {
        return Err(Error::precondition("circle radius must be positive"));
    }
    let tol = refine_tol.max(1e-15);
    for p in f.poles() {
        let dist = ((p - center).norm() - r).abs();
        if dist <= tol.max(1e-12 * r) {
            return Err(Error::PoleNearContour {
                point: center + Complex64::from_polar(r, (p - center).arg()),
                distance: dist,
            });
        }
    }
    let point = |theta: f64| center + Complex64::from_polar(r, theta);
    let magnitudes = |theta: f64| -> Result<Vec<f64>> {
        let z = point(theta);
        let jet = f.eval_jet(z, order).map_err(|_| Error::PoleNearContour {
            point: z,
            distance: 0.0,
        })?;
        Ok(jet.values.iter().map(|v| v.norm()).collect())
    };
    let sample = |angles: Vec<f64>| -> Result<(Vec<f64>, Vec<f64>)> {
        let rows: Vec<(f64, Vec<f64>)> = angles
            .into_par_iter()
            .map(|t| magnitudes(t).map(|m| (t, m)))
            .collect::<Result<_>>()?;
        let mut best = vec![f64::NEG_INFINITY; order + 1];
        let mut arg = vec![0.0; order + 1];
        for (t, m) in rows {
            for k in 0..=order {
                if m[k] > best[k] {
                    best[k] = m[k];
                    arg[k] = t;
                }
            }
        }
        Ok((best, arg))
    };

    let mut n = SUP_INITIAL_SAMPLES;
    let (mut sups, mut args) = sample((0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect())?;
    let mut levels = 1;
    let mut converged = false;
    while n < SUP_MAX_SAMPLES {
        let fresh: Vec<f64> = (0..n)
            .map(|j| 2.0 * PI * (2 * j + 1) as f64 / (2 * n) as f64)
            .collect();
        let (new_sups, new_args) = sample(fresh)?;
        n *= 2;
        levels += 1;
        let mut agree = true;
        for k in 0..=order {
            let merged = sups[k].max(new_sups[k]);
            if (merged - sups[k]).abs() > SUP_DYADIC_AGREEMENT * merged.max(f64::MIN_POSITIVE) {
                agree = false;
            }
            if new_sups[k] > sups[k] {
                sups[k] = new_sups[k];
                args[k] = new_args[k];
            }
        }
        if agree {
            converged = true;
            break;
        }
    }

    let bracket = 2.0 * PI / n as f64;
    let polished: Vec<(f64, f64)> = (0..=order)
        .into_par_iter()
        .map(|k| {
            let g = |t: f64| magnitudes(t).map(|m| m[k]).unwrap_or(f64::NEG_INFINITY);
            golden_max(g, args[k] - bracket, args[k] + bracket, tol)
        })
        .collect();
    for (k, (t, v)) in polished.into_iter().enumerate() {
        if v > sups[k] {
            sups[k] = v;
            args[k] = t;
        }
    }
    Ok(SupJetEstimate {
        sups,
        argmax_angles: args,
        samples: n,
        dyadic_levels: levels,
        converged,
    })
}

pub(crate) fn golden_max(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if g1 < g2 {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + phi * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - phi * (hi - lo);
            g1 = g(x1);
        }
    }
    if g1 >= g2 {
        (x1, g1)
    } else {
        (x2, g2)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SupOnCheese {
    pub value: f64,
    pub argmax: [f64; 2],
    pub samples: usize,
}

/// Estimate `|f|_X` from grid points of spacing `delta` inside the cheese and
/// from samples on the outer circle and every hole boundary.
pub fn sup_on_cheese(
    f: &RationalFunction,
    cheese: &AbstractSwissCheese,
    delta: f64,
) -> Result<SupOnCheese> {
    if !(delta > 0.0) {
        return Err(Error::precondition("grid spacing must be positive"));
    }
    for p in f.poles() {
        if cheese.contains_point(p) {
            return Err(Error::PoleOnSet(p));
        }
    }
    let index = CheeseIndex::new(cheese);
    let eval = |z: Complex64| f.eval(z).map_err(|_| Error::PoleOnSet(z));

    let outer = cheese.outer;
    let steps = (outer.radius / delta).ceil() as i64;
    let grid: Vec<(f64, Complex64, usize)> = (-steps..=steps)
        .into_par_iter()
        .map(|iy| {
            let mut best = (f64::NEG_INFINITY, outer.center, 0usize);
            for ix in -steps..=steps {
                let z = outer.center + Complex64::new(ix as f64 * delta, iy as f64 * delta);
                if !index.contains(z) {
                    continue;
                }
                let v = eval(z)?.norm();
                best.2 += 1;
                if v > best.0 {
                    best.0 = v;
                    best.1 = z;
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;

    let circles: Vec<_> = std::iter::once(outer)
        .chain(cheese.holes.iter().copied().filter(|h| h.radius > 0.0))
        .collect();
    let boundary: Vec<(f64, Complex64, usize)> = circles
        .par_iter()
        .map(|disk| {
            let n = ((2.0 * PI * disk.radius / delta).ceil() as usize).max(16);
            let mut best = (f64::NEG_INFINITY, disk.center, 0usize);
            for j in 0..n {
                let z = disk.center
                    + Complex64::from_polar(disk.radius, 2.0 * PI * j as f64 / n as f64);
                let v = eval(z)?.norm();
                best.2 += 1;
                if v > best.0 {
                    best.0 = v;
                    best.1 = z;
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;

    let mut value = f64::NEG_INFINITY;
    let mut argmax = outer.center;
    let mut samples = 0;
    for (v, z, n) in grid.into_iter().chain(boundary) {
        samples += n;
        if v > value {
            value = v;
            argmax = z;
        }
    }
    Ok(SupOnCheese {
        value,
        argmax: [argmax.re, argmax.im],
        samples,
    })
}
