//! Disks and abstract Swiss cheeses.
//!
//! A cheese is a closed outer disk with a sequence of open disks removed.
//! Countably infinite cheeses are stored as a finite prefix of holes plus a
//! declared `tail_bound` on the total radius of the holes that were not
//! stored. Membership and classicality are exact with respect to the stored
//! prefix; anything that sums over holes must add the tail explicitly.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Width of the boundary band in units of `EPSILON * (|z| + |a| + r)`.
pub const BOUNDARY_ULPS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Disk { center, radius }
    }

    /// Rounding band around the boundary circle: points within a few ulps of
    /// `|z - a| = r` count as boundary points.
    pub fn boundary_slack(&self, z: Complex64) -> f64 {
        BOUNDARY_ULPS * f64::EPSILON * (z.norm() + self.center.norm() + self.radius)
    }

    /// Membership in the open disk; the open disk of radius 0 is empty.
    pub fn open_contains(&self, z: Complex64) -> bool {
        self.radius > 0.0 && (z - self.center).norm() < self.radius - self.boundary_slack(z)
    }

    /// Membership in the closed disk; radius 0 gives the singleton `{center}`.
    pub fn closed_contains(&self, z: Complex64) -> bool {
        if self.radius == 0.0 {
            return z == self.center;
        }
        (z - self.center).norm() <= self.radius + self.boundary_slack(z)
    }

    /// Distance from `z` to the open disk, `+inf` when the disk is empty.
    pub fn distance_to_open(&self, z: Complex64) -> f64 {
        if self.radius <= 0.0 {
            f64::INFINITY
        } else {
            ((z - self.center).norm() - self.radius).max(0.0)
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !(self.radius >= 0.0 && self.radius.is_finite()) {
            return Err(Error::Malformed(format!(
                "{what} has invalid radius {}",
                self.radius
            )));
        }
        if !(self.center.re.is_finite() && self.center.im.is_finite()) {
            return Err(Error::Malformed(format!("{what} has a non-finite center")));
        }
        Ok(())
    }
}

/// Finite description of an abstract Swiss cheese `((a_n, r_n))`.
///
/// Index 0 is the outer disk; `holes[i]` carries cheese index `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbstractSwissCheese {
    pub outer: Disk,
    pub holes: Vec<Disk>,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassicalityReport {
    pub is_classical: bool,
    /// Minimum of `r_0 - |a_k - a_0| - r_k` over holes with positive radius.
    #[serde(serialize_with = "crate::io::finite_or_null")]
    pub worst_containment_margin: f64,
    /// Minimum of `|a_k - a_l| - r_k - r_l` over pairs of holes with positive radius.
    #[serde(serialize_with = "crate::io::finite_or_null")]
    pub worst_separation_margin: f64,
    /// Cheese indices (1-based) of holes involved in any violation, ascending.
    pub violating_indices: Vec<usize>,
    /// Pairs of cheese indices whose closures are not separated.
    pub violating_pairs: Vec<(usize, usize)>,
    pub outer_radius_positive: bool,
    pub rho_finite: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WitnessReport {
    pub holds: bool,
    /// Largest distance from a sampled point of X to the complement of X.
    pub worst_gap: f64,
    pub points_checked: usize,
}

impl AbstractSwissCheese {
    pub fn new(outer: Disk, holes: Vec<Disk>, tail_bound: f64) -> Result<Self> {
        outer.validate("outer disk")?;
        for (i, h) in holes.iter().enumerate() {
            h.validate(&format!("hole {}", i + 1))?;
        }
        if !(tail_bound >= 0.0 && tail_bound.is_finite()) {
            return Err(Error::Malformed(format!("invalid tail bound {tail_bound}")));
        }
        Ok(AbstractSwissCheese {
            outer,
            holes,
            tail_bound,
        })
    }

    /// The disk with cheese index `n` (0 is the outer disk).
    pub fn disk(&self, n: usize) -> Option<&Disk> {
        if n == 0 {
            Some(&self.outer)
        } else {
            self.holes.get(n - 1)
        }
    }

    /// Total deleted radius: stored hole radii plus the declared tail.
    pub fn rho(&self) -> f64 {
        let mut radii: Vec<f64> = self.holes.iter().map(|h| h.radius).collect();
        radii.sort_by(f64::total_cmp);
        radii.iter().sum::<f64>() + self.tail_bound
    }

    pub fn is_classical(&self, strictness_tol: f64) -> ClassicalityReport {
        let a0 = self.outer.center;
        let r0 = self.outer.radius;
        let rho_finite = self.rho().is_finite();
        let outer_radius_positive = r0 > 0.0;

        let positive: Vec<usize> = (0..self.holes.len())
            .filter(|&i| self.holes[i].radius > 0.0)
            .collect();
        let index = DiskIndex::build(positive.iter().map(|&i| self.holes[i]));

        struct HoleCheck {
            containment: f64,
            separation: f64,
            partners: Vec<usize>,
        }

        let checks: Vec<HoleCheck> = positive
            .par_iter()
            .enumerate()
            .map(|(slot, &i)| {
                let h = self.holes[i];
                let containment = r0 - (h.center - a0).norm() - h.radius;
                let separation = index
                    .nearest_margin(h.center, h.radius, Some(slot), f64::INFINITY)
                    .map_or(f64::INFINITY, |(m, _)| m);
                let partners = index
                    .within(h.center, h.radius, strictness_tol)
                    .into_iter()
                    .filter(|&other| other > slot)
                    .map(|other| positive[other])
                    .collect();
                HoleCheck {
                    containment,
                    separation,
                    partners,
                }
            })
            .collect();

        let mut worst_containment_margin = f64::INFINITY;
        let mut worst_separation_margin = f64::INFINITY;
        let mut violating = Vec::new();
        let mut violating_pairs = Vec::new();
        for (check, &i) in checks.iter().zip(&positive) {
            worst_containment_margin = worst_containment_margin.min(check.containment);
            worst_separation_margin = worst_separation_margin.min(check.separation);
            if !(check.containment > strictness_tol) {
                violating.push(i + 1);
            }
            for &j in &check.partners {
                violating.push(i + 1);
                violating.push(j + 1);
                violating_pairs.push((i + 1, j + 1));
            }
        }
        violating.sort_unstable();
        violating.dedup();
        violating_pairs.sort_unstable();

        let is_classical = outer_radius_positive && rho_finite && violating.is_empty();
        ClassicalityReport {
            is_classical,
            worst_containment_margin,
            worst_separation_margin,
            violating_indices: violating,
            violating_pairs,
            outer_radius_positive,
            rho_finite,
        }
    }

    /// Membership in the set obtained from the stored prefix of holes.
    pub fn contains_point(&self, z: Complex64) -> bool {
        self.outer.closed_contains(z) && self.holes.iter().all(|h| !h.open_contains(z))
    }

    /// Whether the circle `|w - c| = r` lies in the cheese.
    pub fn circle_in_cheese(&self, c: Complex64, r: f64) -> bool {
        if (c - self.outer.center).norm() + r > self.outer.radius {
            return false;
        }
        self.holes
            .iter()
            .all(|h| ((h.center - c).norm() - r).abs() >= h.radius)
    }

    /// Grid check that every sampled point of the cheese inside `region` lies
    /// within `delta` of the complement. Points are spaced `delta / 2` apart.
    pub fn empty_interior_witness(&self, region: Disk, delta: f64) -> Result<WitnessReport> {
        if !(delta > 0.0) {
            return Err(Error::precondition("resolution must be positive"));
        }
        if region.radius <= 0.0 {
            return Ok(WitnessReport {
                holds: true,
                worst_gap: 0.0,
                points_checked: 0,
            });
        }
        let index = CheeseIndex::new(self);
        let step = delta / 2.0;
        let steps = (region.radius / step).ceil() as i64;
        let rows: Vec<(f64, usize)> = (-steps..=steps)
            .into_par_iter()
            .map(|iy| {
                let mut worst = 0.0f64;
                let mut count = 0usize;
                for ix in -steps..=steps {
                    let z = region.center + Complex64::new(ix as f64 * step, iy as f64 * step);
                    if (z - region.center).norm() > region.radius {
                        continue;
                    }
                    if let Some(gap) = index.gap(z) {
                        worst = worst.max(gap);
                        count += 1;
                    }
                }
                (worst, count)
            })
            .collect();
        let worst_gap = rows.iter().map(|r| r.0).fold(0.0, f64::max);
        let points_checked = rows.iter().map(|r| r.1).sum();
        Ok(WitnessReport {
            holds: worst_gap <= delta,
            worst_gap,
            points_checked,
        })
    }

    /// Apply `z -> rotation * z + shift` to every center (`|rotation| = 1`).
    pub fn rigid_motion(&self, rotation: Complex64, shift: Complex64) -> Self {
        let mv = |d: &Disk| Disk::new(rotation * d.center + shift, d.radius);
        AbstractSwissCheese {
            outer: mv(&self.outer),
            holes: self.holes.iter().map(mv).collect(),
            tail_bound: self.tail_bound,
        }
    }
}

/// Spatial index over a cheese for repeated membership and gap queries.
pub struct CheeseIndex {
    outer: Disk,
    holes: DiskIndex,
}

impl CheeseIndex {
    pub fn new(cheese: &AbstractSwissCheese) -> Self {
        CheeseIndex {
            outer: cheese.outer,
            holes: DiskIndex::build(cheese.holes.iter().copied().filter(|h| h.radius > 0.0)),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.outer.closed_contains(z)
            && self
                .holes
                .nearest_margin(z, 0.0, None, 0.0)
                .map_or(true, |(m, id)| m >= 0.0 || !self.holes.disks[id].open_contains(z))
    }

    /// Distance from `z` to the complement of the cheese, `None` if `z` is
    /// not in the cheese.
    pub fn gap(&self, z: Complex64) -> Option<f64> {
        if !self.outer.closed_contains(z) {
            return None;
        }
        let to_outside = (self.outer.radius - (z - self.outer.center).norm()).max(0.0);
        match self.holes.nearest_margin(z, 0.0, None, f64::INFINITY) {
            Some((m, id)) if m < 0.0 => {
                if self.holes.disks[id].open_contains(z) {
                    None
                } else {
                    Some(0.0)
                }
            }
            Some((m, _)) => Some(m.min(to_outside)),
            None => Some(to_outside),
        }
    }
}

/// Uniform-grid bucket index over disks, answering "closest disk" queries in
/// terms of the margin `|z - a| - r_z - r`. Disks larger than a cell are kept
/// in a side list and scanned linearly.
pub(crate) struct DiskIndex {
    cell: f64,
    disks: Vec<Disk>,
    grid: HashMap<(i64, i64), Vec<u32>>,
    large: Vec<u32>,
    small_max_radius: f64,
    bounds: Option<(i64, i64, i64, i64)>,
}

impl DiskIndex {
    pub(crate) fn with_cell(cell: f64) -> Self {
        DiskIndex {
            cell: cell.max(f64::MIN_POSITIVE),
            disks: Vec::new(),
            grid: HashMap::new(),
            large: Vec::new(),
            small_max_radius: 0.0,
            bounds: None,
        }
    }

    pub(crate) fn build(disks: impl Iterator<Item = Disk>) -> Self {
        let disks: Vec<Disk> = disks.collect();
        let cell = if disks.len() < 2 {
            1.0
        } else {
            let (mut lo, mut hi) = (disks[0].center, disks[0].center);
            for d in &disks {
                lo = Complex64::new(lo.re.min(d.center.re), lo.im.min(d.center.im));
                hi = Complex64::new(hi.re.max(d.center.re), hi.im.max(d.center.im));
            }
            let area = ((hi.re - lo.re) * (hi.im - lo.im)).max((hi - lo).norm_sqr() * 1e-6);
            let spacing = (area / disks.len() as f64).sqrt();
            if spacing > 0.0 {
                spacing
            } else {
                1.0
            }
        };
        let mut index = DiskIndex::with_cell(cell);
        for d in disks {
            index.insert(d);
        }
        index
    }

    fn key(&self, z: Complex64) -> (i64, i64) {
        (
            (z.re / self.cell).floor() as i64,
            (z.im / self.cell).floor() as i64,
        )
    }

    pub(crate) fn insert(&mut self, disk: Disk) -> usize {
        let id = self.disks.len();
        self.disks.push(disk);
        if disk.radius > self.cell {
            self.large.push(id as u32);
        } else {
            let k = self.key(disk.center);
            self.grid.entry(k).or_default().push(id as u32);
            self.small_max_radius = self.small_max_radius.max(disk.radius);
            self.bounds = Some(match self.bounds {
                None => (k.0, k.0, k.1, k.1),
                Some((x0, x1, y0, y1)) => (x0.min(k.0), x1.max(k.0), y0.min(k.1), y1.max(k.1)),
            });
        }
        id
    }

    fn margin(&self, id: u32, z: Complex64, radius: f64) -> f64 {
        let d = &self.disks[id as usize];
        (z - d.center).norm() - radius - d.radius
    }

    /// Smallest margin to any disk other than `exclude`. The search stops as
    /// soon as no remaining disk can beat `min(best, cutoff)`, so results at
    /// or above `cutoff` are not exact.
    pub(crate) fn nearest_margin(
        &self,
        z: Complex64,
        radius: f64,
        exclude: Option<usize>,
        cutoff: f64,
    ) -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        let consider = |id: u32, best: &mut Option<(f64, usize)>| {
            if exclude == Some(id as usize) {
                return;
            }
            let m = self.margin(id, z, radius);
            if best.map_or(true, |(b, _)| m < b) {
                *best = Some((m, id as usize));
            }
        };
        for &id in &self.large {
            consider(id, &mut best);
        }
        let Some((x0, x1, y0, y1)) = self.bounds else {
            return best;
        };
        let (cx, cy) = self.key(z);
        let mut ring: i64 = 0;
        loop {
            let lower = ((ring - 1).max(0) as f64) * self.cell - radius - self.small_max_radius;
            let target = best.map_or(cutoff, |(b, _)| b.min(cutoff));
            if lower >= target {
                break;
            }
            if cx - ring < x0 && cx + ring > x1 && cy - ring < y0 && cy + ring > y1 {
                break;
            }
            self.for_ring(cx, cy, ring, (x0, x1, y0, y1), |ids| {
                for &id in ids {
                    consider(id, &mut best);
                }
            });
            ring += 1;
        }
        best
    }

    /// All disks (by id) whose margin to the disk `(z, radius)` is at most `reach`.
    pub(crate) fn within(&self, z: Complex64, radius: f64, reach: f64) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .large
            .iter()
            .filter(|&&id| self.margin(id, z, radius) <= reach)
            .map(|&id| id as usize)
            .collect();
        if let Some(bounds) = self.bounds {
            let span = radius + self.small_max_radius + reach.max(0.0);
            let rings = (span / self.cell).ceil() as i64 + 1;
            let (cx, cy) = self.key(z);
            for ring in 0..=rings {
                self.for_ring(cx, cy, ring, bounds, |ids| {
                    out.extend(
                        ids.iter()
                            .filter(|&&id| self.margin(id, z, radius) <= reach)
                            .map(|&id| id as usize),
                    );
                });
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn for_ring(
        &self,
        cx: i64,
        cy: i64,
        ring: i64,
        (x0, x1, y0, y1): (i64, i64, i64, i64),
        mut visit: impl FnMut(&[u32]),
    ) {
        let mut cell = |x: i64, y: i64| {
            if x < x0 || x > x1 || y < y0 || y > y1 {
                return;
            }
            if let Some(ids) = self.grid.get(&(x, y)) {
                visit(ids);
            }
        };
        if ring == 0 {
            cell(cx, cy);
            return;
        }
        let (lo_x, hi_x) = ((cx - ring).max(x0), (cx + ring).min(x1));
        for x in lo_x..=hi_x {
            cell(x, cy - ring);
            cell(x, cy + ring);
        }
        let (lo_y, hi_y) = ((cy - ring + 1).max(y0), (cy + ring - 1).min(y1));
        for y in lo_y..=hi_y {
            cell(cx - ring, y);
            cell(cx + ring, y);
        }
    }
}
