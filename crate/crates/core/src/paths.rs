//! Piecewise paths made of line segments, circular arcs and polylines.
//!
//! Every segment carries an internal parameter `u in [0, 1]` proportional to
//! arc length. A [`Path`] assigns each segment a parameter interval
//! `[t_i, t_{i+1}]` and maps it linearly onto `u`, so reparametrising a path
//! only changes the break points.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::{golden_max, RationalFunction};

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
pub const MAX_BISECTION_LEVELS: usize = 20;
/// Relative agreement between successive dyadic sampling levels.
pub const SUP_AGREEMENT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    Line {
        start: Complex64,
        end: Complex64,
    },
    /// Arc from `angle_start` to `angle_end`; `orientation` is the sign of the
    /// sweep (`+1` counterclockwise).
    Arc {
        center: Complex64,
        radius: f64,
        angle_start: f64,
        angle_end: f64,
        orientation: i8,
    },
    Polyline {
        points: Vec<Complex64>,
    },
}

impl Segment {
    pub fn line(start: Complex64, end: Complex64) -> Self {
        Segment::Line { start, end }
    }

    pub fn arc(center: Complex64, radius: f64, angle_start: f64, angle_end: f64) -> Self {
        Segment::Arc {
            center,
            radius,
            angle_start,
            angle_end,
            orientation: if angle_end >= angle_start { 1 } else { -1 },
        }
    }

    pub fn polyline(points: Vec<Complex64>) -> Self {
        Segment::Polyline { points }
    }

    pub fn length(&self) -> f64 {
        match self {
            Segment::Line { start, end } => (end - start).norm(),
            Segment::Arc {
                radius,
                angle_start,
                angle_end,
                ..
            } => radius * (angle_end - angle_start).abs(),
            Segment::Polyline { points } => points.windows(2).map(|w| (w[1] - w[0]).norm()).sum(),
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }

    /// Point at arc-length fraction `u`.
    pub fn point(&self, u: f64) -> Complex64 {
        match self {
            Segment::Line { start, end } => start + (end - start) * u,
            Segment::Arc {
                center,
                radius,
                angle_start,
                angle_end,
                ..
            } => center + Complex64::from_polar(*radius, angle_start + u * (angle_end - angle_start)),
            Segment::Polyline { points } => {
                if u <= 0.0 {
                    return points[0];
                }
                if u >= 1.0 {
                    return *points.last().unwrap();
                }
                let target = u * self.length();
                let mut acc = 0.0;
                for w in points.windows(2) {
                    let l = (w[1] - w[0]).norm();
                    if acc + l >= target && l > 0.0 {
                        return w[0] + (w[1] - w[0]) * ((target - acc) / l);
                    }
                    acc += l;
                }
                *points.last().unwrap()
            }
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        let bad = |reason: &str| Error::InvalidSegment {
            index,
            reason: reason.to_string(),
        };
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        match self {
            Segment::Line { start, end } => {
                if !finite(start) || !finite(end) {
                    return Err(bad("non-finite endpoint"));
                }
            }
            Segment::Arc {
                center,
                radius,
                angle_start,
                angle_end,
                orientation,
            } => {
                if !finite(center) || !radius.is_finite() || *radius <= 0.0 {
                    return Err(bad("arc needs a finite center and positive radius"));
                }
                if !angle_start.is_finite() || !angle_end.is_finite() {
                    return Err(bad("non-finite angle"));
                }
                let sweep = angle_end - angle_start;
                if (*orientation != 1 && *orientation != -1)
                    || (sweep != 0.0 && sweep.signum() as i8 != *orientation)
                {
                    return Err(bad("orientation must be the sign of the angular sweep"));
                }
            }
            Segment::Polyline { points } => {
                if points.len() < 2 {
                    return Err(bad("polyline needs at least two points"));
                }
                if !points.iter().all(finite) {
                    return Err(bad("non-finite polyline vertex"));
                }
            }
        }
        let len = self.length();
        if !len.is_finite() {
            return Err(bad("infinite length"));
        }
        if len <= 0.0 {
            return Err(bad("constant segment"));
        }
        Ok(())
    }

    /// Restriction to the arc-length fractions `[u0, u1]`.
    fn slice(&self, u0: f64, u1: f64) -> Segment {
        match self {
            Segment::Line { .. } => Segment::line(self.point(u0), self.point(u1)),
            Segment::Arc {
                center,
                radius,
                angle_start,
                angle_end,
                orientation,
            } => {
                let sweep = angle_end - angle_start;
                Segment::Arc {
                    center: *center,
                    radius: *radius,
                    angle_start: angle_start + u0 * sweep,
                    angle_end: angle_start + u1 * sweep,
                    orientation: *orientation,
                }
            }
            Segment::Polyline { points } => {
                let total = self.length();
                let mut out = vec![self.point(u0)];
                let mut acc = 0.0;
                for w in points.windows(2) {
                    acc += (w[1] - w[0]).norm();
                    let frac = acc / total;
                    if frac > u0 && frac < u1 {
                        out.push(w[1]);
                    }
                }
                out.push(self.point(u1));
                Segment::polyline(out)
            }
        }
    }

    fn reversed(&self) -> Segment {
        match self {
            Segment::Line { start, end } => Segment::line(*end, *start),
            Segment::Arc {
                center,
                radius,
                angle_start,
                angle_end,
                orientation,
            } => Segment::Arc {
                center: *center,
                radius: *radius,
                angle_start: *angle_end,
                angle_end: *angle_start,
                orientation: -orientation,
            },
            Segment::Polyline { points } => {
                Segment::polyline(points.iter().rev().copied().collect())
            }
        }
    }

    /// Smooth pieces for quadrature: polylines split at their vertices.
    fn elementary(&self) -> Vec<Elementary> {
        match self {
            Segment::Line { start, end } => vec![Elementary::Line(*start, *end)],
            Segment::Arc {
                center,
                radius,
                angle_start,
                angle_end,
                ..
            } => vec![Elementary::Arc {
                center: *center,
                radius: *radius,
                theta0: *angle_start,
                sweep: angle_end - angle_start,
            }],
            Segment::Polyline { points } => points
                .windows(2)
                .filter(|w| w[0] != w[1])
                .map(|w| Elementary::Line(w[0], w[1]))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Elementary {
    Line(Complex64, Complex64),
    Arc {
        center: Complex64,
        radius: f64,
        theta0: f64,
        sweep: f64,
    },
}

impl Elementary {
    fn length(&self) -> f64 {
        match *self {
            Elementary::Line(a, b) => (b - a).norm(),
            Elementary::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// Point and derivative with respect to `u in [0, 1]`.
    fn eval(&self, u: f64) -> (Complex64, Complex64) {
        match *self {
            Elementary::Line(a, b) => (a + (b - a) * u, b - a),
            Elementary::Arc {
                center,
                radius,
                theta0,
                sweep,
            } => {
                let e = Complex64::from_polar(radius, theta0 + u * sweep);
                (center + e, Complex64::new(0.0, sweep) * e)
            }
        }
    }
}

/// Continuous piecewise path on the parameter interval `[breaks[0], breaks[n]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    segments: Vec<Segment>,
    breaks: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

impl Path {
    /// Path whose `i`-th segment is traversed over `[i, i + 1]`.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let breaks = (0..=segments.len()).map(|i| i as f64).collect();
        Self::with_breaks(segments, breaks)
    }

    pub fn with_breaks(segments: Vec<Segment>, breaks: Vec<f64>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::ConstantPath);
        }
        if breaks.len() != segments.len() + 1 {
            return Err(Error::precondition("need one more break point than segments"));
        }
        if !breaks.iter().all(|t| t.is_finite()) || breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::precondition("break points must increase strictly"));
        }
        if segments.len() == 1 && segments[0].length() == 0.0 {
            return Err(Error::ConstantPath);
        }
        for (i, s) in segments.iter().enumerate() {
            s.validate(i)?;
        }
        let scale = segments
            .iter()
            .map(|s| s.start().norm().max(s.end().norm()))
            .fold(1.0f64, f64::max);
        for (i, w) in segments.windows(2).enumerate() {
            let gap = (w[1].start() - w[0].end()).norm();
            if gap > 1e-10 * scale {
                return Err(Error::Discontinuous {
                    index: i,
                    next: i + 1,
                    gap,
                });
            }
        }
        Ok(Path { segments, breaks })
    }

    pub fn segment(start: Complex64, end: Complex64) -> Result<Self> {
        Self::new(vec![Segment::line(start, end)])
    }

    /// Counterclockwise circle traversed once, starting at angle 0.
    pub fn circle(center: Complex64, radius: f64) -> Result<Self> {
        Self::new(vec![Segment::arc(center, radius, 0.0, 2.0 * std::f64::consts::PI)])
    }

    pub fn polyline(points: Vec<Complex64>) -> Result<Self> {
        Self::new(vec![Segment::polyline(points)])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    /// `gamma(a)`.
    pub fn start(&self) -> Complex64 {
        self.segments[0].start()
    }

    /// `gamma(b)`.
    pub fn end(&self) -> Complex64 {
        self.segments.last().unwrap().end()
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.segments.len();
        let i = self.breaks[1..n].partition_point(|&b| b <= t);
        let (t0, t1) = (self.breaks[i], self.breaks[i + 1]);
        (i, ((t - t0) / (t1 - t0)).clamp(0.0, 1.0))
    }

    /// `gamma(t)`, clamped to the parameter interval.
    pub fn point(&self, t: f64) -> Complex64 {
        let (i, u) = self.locate(t);
        self.segments[i].point(u)
    }

    /// Same image traversed at unit speed on `[0, length]`.
    pub fn arclength_parametrize(&self) -> Result<Path> {
        let total = self.length();
        if !(total > 0.0) {
            return Err(Error::ConstantPath);
        }
        let mut breaks = Vec::with_capacity(self.breaks.len());
        let mut acc = 0.0;
        breaks.push(0.0);
        for s in &self.segments {
            acc += s.length();
            breaks.push(acc);
        }
        *breaks.last_mut().unwrap() = total;
        Ok(Path {
            segments: self.segments.clone(),
            breaks,
        })
    }

    /// Same image at constant speed on `[0, 1]`.
    pub fn normalized_parametrize(&self) -> Result<Path> {
        let pl = self.arclength_parametrize()?;
        let total = pl.length();
        let mut breaks: Vec<f64> = pl.breaks.iter().map(|b| b / total).collect();
        *breaks.last_mut().unwrap() = 1.0;
        Ok(Path {
            segments: pl.segments,
            breaks,
        })
    }

    /// Restriction to `[t0, t1]`, keeping the original parameter values.
    pub fn subpath(&self, t0: f64, t1: f64) -> Result<Path> {
        let (a, b) = self.interval();
        if t0 == t1 {
            return Err(Error::DegenerateSubinterval(t0, t1));
        }
        if !(a <= t0 && t0 < t1 && t1 <= b) {
            return Err(Error::OutsideParameterInterval { t0, t1, a, b });
        }
        let mut segments = Vec::new();
        let mut breaks = vec![t0];
        for (i, seg) in self.segments.iter().enumerate() {
            let (s0, s1) = (self.breaks[i], self.breaks[i + 1]);
            let lo = t0.max(s0);
            let hi = t1.min(s1);
            if hi <= lo {
                continue;
            }
            let u0 = (lo - s0) / (s1 - s0);
            let u1 = (hi - s0) / (s1 - s0);
            segments.push(seg.slice(u0, u1));
            breaks.push(hi);
        }
        *breaks.last_mut().unwrap() = t1;
        Path::with_breaks(segments, breaks)
    }

    /// `-gamma` on `[-b, -a]`, with `(-gamma)(t) = gamma(-t)`.
    pub fn reverse(&self) -> Path {
        Path {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
            breaks: self.breaks.iter().rev().map(|t| -t).collect(),
        }
    }

    /// `self` followed by `other`, with `other`'s interval shifted to start at `b`.
    pub fn concat(&self, other: &Path) -> Result<Path> {
        let (_, b) = self.interval();
        let (c, _) = other.interval();
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        let mut breaks = self.breaks.clone();
        breaks.extend(other.breaks[1..].iter().map(|t| t - c + b));
        Path::with_breaks(segments, breaks)
    }

    /// Points at `n + 1` equally spaced arc-length positions, endpoints included.
    pub fn sample(&self, n: usize) -> Vec<Complex64> {
        let n = n.max(1);
        let pl = match self.arclength_parametrize() {
            Ok(p) => p,
            Err(_) => return vec![self.start()],
        };
        let total = pl.length();
        (0..=n).map(|i| pl.point(total * i as f64 / n as f64)).collect()
    }

    fn elementary(&self) -> Vec<Elementary> {
        self.segments.iter().flat_map(Segment::elementary).collect()
    }
}

#[allow(clippy::excessive_precision)]
mod gauss_kronrod {
    pub const XGK: [f64; 8] = [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.0,
    ];
    pub const WGK: [f64; 8] = [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ];
    /// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
    pub const WG: [f64; 4] = [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ];
}

fn gk15(h: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    use gauss_kronrod::*;
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = h(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = h(c - dx) + h(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let kron = kron * half;
    let gauss = gauss * half;
    (kron, (kron - gauss).norm())
}

/// Adaptive G7/K15 integration of `h` over `[0, 1]` to absolute tolerance `tol`.
fn adaptive(h: impl Fn(f64) -> Complex64, tol: f64) -> (Complex64, f64, usize, bool) {
    let mut stack = vec![(0.0f64, 1.0f64, 0usize)];
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut pieces = 0;
    let mut converged = true;
    while let Some((a, b, depth)) = stack.pop() {
        let (v, e) = gk15(&h, a, b);
        let local = tol * (b - a);
        let noise = 50.0 * f64::EPSILON * v.norm();
        if e <= local.max(noise) || depth >= MAX_BISECTION_LEVELS {
            if e > local.max(noise) {
                converged = false;
            }
            value += v;
            error += e;
            pieces += 1;
        } else {
            let m = 0.5 * (a + b);
            stack.push((m, b, depth + 1));
            stack.push((a, m, depth + 1));
        }
    }
    (value, error, pieces, converged)
}

/// `int_gamma f(z) dz` by adaptive quadrature on each smooth piece, with the
/// tolerance shared out in proportion to piece length.
pub fn contour_integral<F>(f: F, path: &Path, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    if !(tol > 0.0) {
        return Err(Error::precondition("quadrature tolerance must be positive"));
    }
    let pieces = path.elementary();
    let total: f64 = pieces.iter().map(Elementary::length).sum();
    let mut value = Complex64::new(0.0, 0.0);
    let mut error_estimate = 0.0;
    let mut subdivisions = 0;
    let mut converged = true;
    for p in &pieces {
        let share = tol * p.length() / total;
        let (v, e, n, ok) = adaptive(
            |u| {
                let (z, dz) = p.eval(u);
                f(z) * dz
            },
            share,
        );
        value += v;
        error_estimate += e;
        subdivisions += n;
        converged &= ok;
    }
    if !converged || !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::QuadratureNonConvergence {
            value,
            error_estimate,
        });
    }
    Ok(QuadratureResult {
        value,
        error_estimate,
        subdivisions,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FDerivativeCheck {
    pub max_residual: f64,
    pub worst_path: usize,
    pub residuals: Vec<f64>,
}

/// Residuals `|int_gamma g dz - (f(gamma+) - f(gamma-))|` over a path family.
#[allow(non_snake_case)]
pub fn check_F_derivative<F, G>(f: F, g: G, paths: &[Path], tol: f64) -> Result<FDerivativeCheck>
where
    F: Fn(Complex64) -> Complex64 + Sync,
    G: Fn(Complex64) -> Complex64 + Sync,
{
    let residuals = paths
        .par_iter()
        .map(|p| {
            let q = contour_integral(&g, p, tol)?;
            Ok((q.value - (f(p.end()) - f(p.start()))).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    let (worst_path, max_residual) = residuals
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0f64), |best, (i, r)| if r > best.1 { (i, r) } else { best });
    Ok(FDerivativeCheck {
        max_residual,
        worst_path,
        residuals,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PathSup {
    pub value: f64,
    /// Arc-length position of the maximiser.
    pub at: f64,
    pub samples: usize,
    pub converged: bool,
}

/// Sampled estimate of `sup |h(sigma(s))|` for `s in [s0, s1]` on a unit-speed
/// path: dyadic refinement until successive levels agree, then golden-section
/// polishing around the best sample.
pub fn sup_along<H>(sigma: &Path, s0: f64, s1: f64, initial: usize, h: H) -> PathSup
where
    H: Fn(Complex64) -> f64 + Sync,
{
    let eval = |s: f64| h(sigma.point(s));
    let mut n = initial.max(16);
    let level = |n: usize| -> (f64, f64) {
        (0..=n)
            .into_par_iter()
            .map(|i| {
                let s = s0 + (s1 - s0) * i as f64 / n as f64;
                (eval(s), s)
            })
            .reduce(|| (f64::NEG_INFINITY, s0), |a, b| if b.0 > a.0 { b } else { a })
    };
    let mut best = level(n);
    let mut converged = false;
    while n < 1 << 18 {
        n *= 2;
        let next = level(n);
        let agree = (next.0 - best.0).abs() <= SUP_AGREEMENT * next.0.abs().max(f64::MIN_POSITIVE);
        if next.0 >= best.0 {
            best = next;
        }
        if agree {
            converged = true;
            break;
        }
    }
    let bracket = (s1 - s0) / n as f64;
    let (at, v) = golden_max(
        |s| eval(s.clamp(s0, s1)),
        (best.1 - bracket).max(s0),
        (best.1 + bracket).min(s1),
        1e-12 * (s1 - s0).max(1.0),
    );
    if v > best.0 {
        best = (v, at);
    }
    PathSup {
        value: best.0,
        at: best.1,
        samples: n + 1,
        converged,
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundCheck {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// `|f(gamma+)| <= |f(gamma-)| + length * sup |f1|` with the supremum sampled.
pub fn check_pathwise_derivative_bound<F, F1>(f: F, f1: F1, path: &Path, samples: usize) -> Result<BoundCheck>
where
    F: Fn(Complex64) -> Complex64,
    F1: Fn(Complex64) -> Complex64 + Sync,
{
    let sigma = path.arclength_parametrize()?;
    let len = sigma.length();
    let sup = sup_along(&sigma, 0.0, len, samples, |z| f1(z).norm());
    let lhs = f(path.end()).norm();
    let rhs = f(path.start()).norm() + len * sup.value;
    Ok(BoundCheck {
        holds: rhs >= lhs,
        lhs,
        rhs,
        slack: rhs - lhs,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CohenTaylorCheck {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// Sampled `sup |g^(m)|` on `sigma([s_0, length])`.
    pub sampled_sup: f64,
}

/// Checks
/// `|g(sigma(s))| <= sum_{p<m} |g^(p)(sigma(s_{m-p-1}))| (s - s_{m-p-1})^p / p!
///  + M (s - s_0)^m / m!`
/// where `sigma` is the unit-speed version of `path` and `m = points.len()`.
pub fn check_cohen_taylor_bound(
    g: &RationalFunction,
    path: &Path,
    points: &[f64],
    m_bound: f64,
    s: f64,
) -> Result<CohenTaylorCheck> {
    let sigma = path.arclength_parametrize()?;
    let len = sigma.length();
    let m = points.len();
    if m == 0 {
        return Err(Error::precondition("at least one partition point is required"));
    }
    if points[0] < 0.0 || points.windows(2).any(|w| w[1] <= w[0]) || points[m - 1] >= len {
        return Err(Error::precondition(
            "partition points must satisfy 0 <= s_0 < ... < s_{m-1} < length",
        ));
    }
    if !(s > points[m - 1] && s <= len * (1.0 + 1e-12)) {
        return Err(Error::precondition("s must lie in (s_{m-1}, length]"));
    }
    let sup = sup_along(&sigma, points[0], len, 64, |z| {
        g.eval_jet(z, m)
            .map(|j| j.derivative(m).norm())
            .unwrap_or(f64::INFINITY)
    });
    if sup.value > m_bound {
        return Err(Error::Precondition(format!(
            "sup |g^({m})| on the path is at least {} > M = {m_bound}",
            sup.value
        )));
    }
    let mut rhs = 0.0;
    let mut fact = 1.0;
    for p in 0..m {
        if p > 0 {
            fact *= p as f64;
        }
        let sp = points[m - p - 1];
        let jet = g.eval_jet(sigma.point(sp), p)?;
        rhs += jet.derivative(p).norm() * (s - sp).powi(p as i32) / fact;
    }
    let m_fact = fact * m as f64;
    rhs += m_bound / m_fact * (s - points[0]).powi(m as i32);
    let lhs = g.eval(sigma.point(s))?.norm();
    Ok(CohenTaylorCheck {
        holds: rhs >= lhs,
        lhs,
        rhs,
        slack: rhs - lhs,
        sampled_sup: sup.value,
    })
}
