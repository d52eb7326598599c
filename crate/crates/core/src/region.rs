//! Rate regions assembled from per-ray optima, and geometric comparisons.
//!
//! A [`Region`] keeps the swept boundary points in ray order together with
//! the convex hull of those points and the origin. Time sharing makes every
//! region here convex and closed under decreasing either rate, so the hull
//! is the region.

use rayon::prelude::*;

use crate::achievable::{BoundaryPoint, Protocol};
use crate::channel::{ChannelGains, Rate};
use crate::error::{Error, Result};
use crate::outer::{
    analytic_rb_bound, one_way_bound, one_way_bound_ra, outer_ratio_bound, outer_weighted_bound, TimeShares,
};
use crate::ray::Ray;

/// Default number of interior rays in a sweep.
pub const DEFAULT_THETA_POINTS: usize = 181;

/// Interior rays span `[THETA_MARGIN, 90 - THETA_MARGIN]` degrees.
const THETA_MARGIN: f64 = 0.5;

/// Relative slack used when testing whether a point lies inside a hull.
const HULL_SLACK: f64 = 1e-12;

/// Upper limit on refinement passes.
const MAX_REFINE_PASSES: usize = 60;

/// Rays of a sweep: `theta_points` uniform angles in `[0.5, 89.5]` degrees
/// plus both axes. The middle angle of an odd grid is exactly `k = 1`.
pub fn theta_grid(theta_points: usize) -> Result<Vec<Ray>> {
    if theta_points < 3 {
        return Err(Error::Parameter(format!("a sweep needs at least 3 rays, got {theta_points}")));
    }
    let span = 90.0 - 2.0 * THETA_MARGIN;
    let mut rays = Vec::with_capacity(theta_points + 2);
    rays.push(Ray::Ratio(0.0));
    for i in 0..theta_points {
        let mut theta = THETA_MARGIN + span * i as f64 / (theta_points - 1) as f64;
        if (theta - 45.0).abs() < 1e-9 {
            theta = 45.0;
        }
        rays.push(Ray::from_theta_deg(theta)?);
    }
    rays.push(Ray::RaAxis);
    Ok(rays)
}

type Vec2 = [f64; 2];

fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

/// Angle of `(ra, rb)` from the `Rb` axis, in degrees.
fn angle_of(p: Vec2) -> f64 {
    p[0].atan2(p[1]).to_degrees()
}

/// Convex hull in counter-clockwise order (monotone chain), collinear points dropped.
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Vec2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && cross(sub(lower[lower.len() - 1], lower[lower.len() - 2]), sub(p, lower[lower.len() - 2])) <= 0.0
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Vec2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && cross(sub(upper[upper.len() - 1], upper[upper.len() - 2]), sub(p, upper[upper.len() - 2])) <= 0.0
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Largest `s >= 0` with `s * d` in the convex polygon `hull` (which contains the origin).
fn ray_scale(hull: &[Vec2], d: Vec2) -> f64 {
    let dd = dot(d, d);
    if dd == 0.0 || hull.is_empty() {
        return 0.0;
    }
    let mut best = 0.0f64;
    for &v in hull {
        // vertices lying on the ray itself
        if cross(v, d).abs() <= 1e-15 * norm(v) * dd.sqrt() && dot(v, d) > 0.0 {
            best = best.max(dot(v, d) / dd);
        }
    }
    let n = hull.len();
    if n < 2 {
        return best;
    }
    for i in 0..n {
        let p = hull[i];
        let q = hull[(i + 1) % n];
        let e = sub(q, p);
        let den = cross(d, e);
        if den == 0.0 {
            continue;
        }
        let s = cross(p, e) / den;
        let u = cross(p, d) / den;
        if (-1e-12..=1.0 + 1e-12).contains(&u) && s > best {
            best = s;
        }
    }
    best
}

/// Distance from `p` to the segment `[a, b]`.
fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let e = sub(b, a);
    let ee = dot(e, e);
    let t = if ee == 0.0 { 0.0 } else { (dot(sub(p, a), e) / ee).clamp(0.0, 1.0) };
    norm(sub(p, [a[0] + t * e[0], a[1] + t * e[1]]))
}

/// Distance from `p` to the filled convex polygon `hull` (counter-clockwise).
fn polygon_distance(p: Vec2, hull: &[Vec2]) -> f64 {
    match hull.len() {
        0 => f64::INFINITY,
        1 => norm(sub(p, hull[0])),
        2 => segment_distance(p, hull[0], hull[1]),
        n => {
            let scale = hull.iter().map(|v| norm(*v)).fold(1.0, f64::max);
            let inside = (0..n).all(|i| {
                let a = hull[i];
                let b = hull[(i + 1) % n];
                cross(sub(b, a), sub(p, a)) >= -1e-15 * scale * scale
            });
            if inside {
                0.0
            } else {
                (0..n).map(|i| segment_distance(p, hull[i], hull[(i + 1) % n])).fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// A swept rate region.
#[derive(Debug, Clone)]
pub struct Region {
    label: String,
    gains: ChannelGains,
    theta_points: usize,
    points: Vec<BoundaryPoint>,
    hull: Vec<Vec2>,
}

impl Region {
    /// Assemble a region from boundary points in any order.
    ///
    /// Points are sorted by ray angle; of several points on one angle the
    /// farthest is kept.
    pub fn from_points(
        label: impl Into<String>,
        gains: &ChannelGains,
        theta_points: usize,
        points: Vec<BoundaryPoint>,
    ) -> Result<Self> {
        for p in &points {
            if !(p.ra.is_finite() && p.rb.is_finite()) || p.ra < -1e-9 || p.rb < -1e-9 {
                return Err(Error::Domain(format!("boundary point ({}, {}) outside the quadrant", p.ra, p.rb)));
            }
        }
        let mut keyed: Vec<(f64, BoundaryPoint)> = points
            .into_iter()
            .map(|mut p| {
                p.ra = p.ra.max(0.0);
                p.rb = p.rb.max(0.0);
                (p.ray.theta_deg(), p)
            })
            .collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut points: Vec<BoundaryPoint> = Vec::with_capacity(keyed.len());
        let mut last_theta = f64::NAN;
        for (theta, p) in keyed {
            if theta == last_theta {
                let prev = points.last_mut().expect("a previous point exists");
                if p.ra.hypot(p.rb) > prev.ra.hypot(prev.rb) {
                    *prev = p;
                }
                continue;
            }
            last_theta = theta;
            points.push(p);
        }
        let mut corners: Vec<Vec2> = points.iter().map(|p| [p.ra, p.rb]).collect();
        corners.push([0.0, 0.0]);
        let hull = convex_hull(&corners);
        Ok(Region { label: label.into(), gains: *gains, theta_points, points, hull })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn gains(&self) -> &ChannelGains {
        &self.gains
    }

    pub fn theta_points(&self) -> usize {
        self.theta_points
    }

    /// Swept points ordered by strictly increasing ray angle.
    pub fn points(&self) -> &[BoundaryPoint] {
        &self.points
    }

    /// Hull vertices `(ra, rb)` in counter-clockwise order, origin included.
    pub fn hull(&self) -> &[Vec2] {
        &self.hull
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distance from the origin to the hull boundary along the ray at `theta_deg`.
    pub fn support(&self, theta_deg: f64) -> Rate {
        let t = theta_deg.to_radians();
        ray_scale(&self.hull, [t.sin(), t.cos()])
    }

    /// Whether `(ra, rb)` lies in the hull within `tol` along its own ray.
    pub fn contains_point(&self, ra: Rate, rb: Rate, tol: f64) -> bool {
        let len = ra.hypot(rb);
        if len == 0.0 {
            return true;
        }
        let s = ray_scale(&self.hull, [ra, rb]);
        s >= 1.0 - HULL_SLACK || len * (1.0 - s) <= tol
    }

    /// Largest `R` with `(R, R)` in the region.
    ///
    /// Uses the swept point on `k = 1` when the grid has one, otherwise the
    /// hull boundary between the neighbouring swept points.
    pub fn symmetric_rate(&self) -> Rate {
        if let Some(p) = self.points.iter().find(|p| p.ray == Ray::Ratio(1.0)) {
            return p.rb;
        }
        ray_scale(&self.hull, [1.0, 1.0])
    }

    /// Largest `Ra + Rb` over the region.
    pub fn sum_rate_max(&self) -> Rate {
        self.hull.iter().map(|v| v[0] + v[1]).fold(0.0, f64::max)
    }

    /// The same region with nodes a and b exchanged.
    pub fn mirrored(&self) -> Self {
        let points = self.points.iter().rev().map(BoundaryPoint::mirrored).collect();
        Region::from_points(self.label.clone(), &self.gains.mirrored(), self.theta_points, points)
            .expect("mirroring preserves valid points")
    }

    /// Refine the boundary by querying extra rays between neighbouring points
    /// until every gap is spanned by a straight edge of the true region.
    ///
    /// For a polygonal region this recovers every vertex: the ray through the
    /// crossing of the two neighbouring edge lines hits the missing vertex.
    pub fn refine_rays<F>(&self, evaluator: F) -> Result<Region>
    where
        F: Fn(Ray) -> Result<BoundaryPoint>,
    {
        let mut points = self.points.clone();
        let mut fresh = vec![true; points.len()];
        for _ in 0..MAX_REFINE_PASSES {
            let mut inserts: Vec<(usize, BoundaryPoint)> = Vec::new();
            let xy = |p: &BoundaryPoint| -> Vec2 { [p.ra, p.rb] };
            for i in 0..points.len().saturating_sub(1) {
                let lo = i.saturating_sub(1);
                let hi = (i + 2).min(points.len() - 1);
                if !fresh[lo..=hi].iter().any(|f| *f) {
                    continue;
                }
                let (p, q) = (xy(&points[i]), xy(&points[i + 1]));
                let (tp, tq) = (points[i].ray.theta_deg(), points[i + 1].ray.theta_deg());
                if tq - tp < 1e-9 || norm(p).max(norm(q)) == 0.0 {
                    continue;
                }
                let guess = if i > 0 && i + 2 < points.len() {
                    line_crossing(xy(&points[i - 1]), p, q, xy(&points[i + 2]))
                        .map(angle_of)
                        .filter(|t| *t > tp + 1e-9 && *t < tq - 1e-9)
                } else {
                    None
                };
                let theta = guess.unwrap_or(0.5 * (tp + tq));
                let ray = Ray::from_theta_deg(theta)?;
                let cand = evaluator(ray).map_err(|e| e.at(&format!("theta = {theta} deg")))?;
                let x = [cand.ra, cand.rb];
                let e = sub(q, p);
                let den = cross(x, e);
                if den == 0.0 || norm(x) == 0.0 {
                    continue;
                }
                // chord point along x is s * x; x beyond it means a missing vertex
                let s = cross(p, e) / den;
                if s < 1.0 - 1e-10 {
                    inserts.push((i + 1, cand));
                }
            }
            if inserts.is_empty() {
                break;
            }
            let mut next = Vec::with_capacity(points.len() + inserts.len());
            let mut next_fresh = Vec::with_capacity(points.len() + inserts.len());
            let mut it = inserts.into_iter().peekable();
            for (idx, p) in points.into_iter().enumerate() {
                while let Some((at, _)) = it.peek() {
                    if *at == idx {
                        let (_, c) = it.next().expect("peeked");
                        next.push(c);
                        next_fresh.push(true);
                    } else {
                        break;
                    }
                }
                next.push(p);
                next_fresh.push(false);
            }
            points = next;
            fresh = next_fresh;
        }
        Region::from_points(self.label.clone(), &self.gains, self.theta_points, points)
    }
}

/// Crossing of the line through `a1, a2` with the line through `b1, b2`.
fn line_crossing(a1: Vec2, a2: Vec2, b1: Vec2, b2: Vec2) -> Option<Vec2> {
    let da = sub(a2, a1);
    let db = sub(b2, b1);
    let den = cross(da, db);
    if den.abs() <= 1e-15 * norm(da) * norm(db) {
        return None;
    }
    let t = cross(sub(b1, a1), db) / den;
    let p = [a1[0] + t * da[0], a1[1] + t * da[1]];
    (p[0].is_finite() && p[1].is_finite() && p[0] >= 0.0 && p[1] >= 0.0).then_some(p)
}

/// Evaluate `evaluator` on every ray of [`theta_grid`] and assemble the region.
///
/// Rays are evaluated in parallel. A failure reports the first failing ray in
/// grid order.
pub fn sweep_region<F>(
    label: impl Into<String>,
    gains: &ChannelGains,
    theta_points: usize,
    evaluator: F,
) -> Result<Region>
where
    F: Fn(Ray) -> Result<BoundaryPoint> + Sync + Send,
{
    let rays = theta_grid(theta_points)?;
    let results: Vec<Result<BoundaryPoint>> = rays.par_iter().map(|r| evaluator(*r)).collect();
    let mut points = Vec::with_capacity(results.len());
    for (ray, r) in rays.iter().zip(results) {
        points.push(r.map_err(|e| e.at(&format!("theta = {} deg", ray.theta_deg())))?);
    }
    Region::from_points(label, gains, theta_points, points)
}

/// Outer bound swept ray by ray with the ratio LP.
pub fn outer_region(gains: &ChannelGains, theta_points: usize) -> Result<Region> {
    sweep_region("outer", gains, theta_points, |ray| outer_ratio_bound(ray, gains).map(Into::into))
}

/// Closed-form outer bound: the dual-point bound inside the quadrant, the
/// one-way bounds on the axes.
pub fn outer_analytic_region(gains: &ChannelGains, theta_points: usize) -> Result<Region> {
    sweep_region("outer-analytic", gains, theta_points, |ray| {
        let (ra, rb) = match ray {
            Ray::RaAxis => (one_way_bound_ra(gains), 0.0),
            Ray::Ratio(0.0) => (0.0, one_way_bound(gains)),
            Ray::Ratio(k) => {
                let rb = analytic_rb_bound(k, gains)?;
                (k * rb, rb)
            }
        };
        Ok(BoundaryPoint { ray, ra, rb, shares: TimeShares::default(), flows: None, split: None })
    })
}

/// A protocol's achievable region.
pub fn protocol_region(
    protocol: Protocol,
    gains: &ChannelGains,
    theta_points: usize,
    alpha_grid: usize,
) -> Result<Region> {
    sweep_region(protocol.id(), gains, theta_points, |ray| protocol.boundary(ray, gains, alpha_grid))
}

/// Outer bound built from weighted-sum maximizers instead of rays.
///
/// Starts from the maximizers of `sin(t) Ra + cos(t) Rb` over the sweep
/// angles and the two axis intercepts, then queries the outward normal of
/// every gap between neighbouring maximizers until each gap is a face.
pub fn weighted_outer_region(gains: &ChannelGains, theta_points: usize) -> Result<Region> {
    let rays = theta_grid(theta_points)?;
    let query = |wa: f64, wb: f64| -> Result<BoundaryPoint> {
        let w = outer_weighted_bound(wa, wb, gains).map_err(|e| e.at(&format!("weights ({wa}, {wb})")))?;
        Ok(point_at(w.ra, w.rb, w.shares))
    };
    let mut found: Vec<BoundaryPoint> = Vec::new();
    for ray in &rays {
        let t = ray.theta_deg().to_radians();
        let (wa, wb) = match ray {
            Ray::RaAxis => (1.0, 0.0),
            Ray::Ratio(k) if *k == 0.0 => (0.0, 1.0),
            _ => (t.sin(), t.cos()),
        };
        found.push(query(wa, wb)?);
    }
    let ra_max = found.iter().map(|p| p.ra).fold(0.0, f64::max);
    let rb_max = found.iter().map(|p| p.rb).fold(0.0, f64::max);
    found.push(point_at(ra_max, 0.0, TimeShares::default()));
    found.push(point_at(0.0, rb_max, TimeShares::default()));
    let mut region = Region::from_points("outer-weighted", gains, theta_points, found)?;

    for _ in 0..MAX_REFINE_PASSES {
        let pts = region.points.clone();
        let mut added = Vec::new();
        for pair in pts.windows(2) {
            let (v, w) = ([pair[0].ra, pair[0].rb], [pair[1].ra, pair[1].rb]);
            let normal = [(v[1] - w[1]).max(0.0), (w[0] - v[0]).max(0.0)];
            let len = norm(normal);
            if len <= 1e-14 {
                continue;
            }
            let normal = [normal[0] / len, normal[1] / len];
            let cand = query(normal[0], normal[1])?;
            let level = dot(normal, v);
            if dot(normal, [cand.ra, cand.rb]) > level + 1e-10 * (1.0 + level.abs()) {
                added.push(cand);
            }
        }
        if added.is_empty() {
            break;
        }
        let mut all = pts;
        all.extend(added);
        region = Region::from_points("outer-weighted", gains, theta_points, all)?;
    }
    Ok(region)
}

fn point_at(ra: Rate, rb: Rate, shares: TimeShares) -> BoundaryPoint {
    let ray = if rb > 0.0 {
        Ray::Ratio(ra / rb)
    } else if ra > 0.0 {
        Ray::RaAxis
    } else {
        Ray::Ratio(0.0)
    };
    BoundaryPoint { ray, ra, rb, shares, flows: None, split: None }
}

fn same_channel(a: &Region, b: &Region) -> Result<()> {
    let (ga, gb) = (a.gains(), b.gains());
    if ga.gamma1() != gb.gamma1() || ga.gamma2() != gb.gamma2() || ga.gamma3() != gb.gamma3() {
        return Err(Error::Comparison(format!(
            "regions {:?} and {:?} are built on different channels",
            a.label(),
            b.label()
        )));
    }
    Ok(())
}

/// Largest `R` with `(R, R)` in the region; 0 for an empty region.
pub fn symmetric_rate(region: &Region) -> Rate {
    region.symmetric_rate()
}

/// Whether every swept point of `inner` lies within `tol` of the hull of `outer`, measured along its ray.
pub fn contains(outer: &Region, inner: &Region, tol: f64) -> Result<bool> {
    same_channel(outer, inner)?;
    Ok(inner.points().iter().all(|p| outer.contains_point(p.ra, p.rb, tol)))
}

/// Largest radial excess of `a` over `b` on `a`'s ray angles, and the angle
/// (degrees) where it occurs. Negative when `b` reaches further on every ray.
pub fn max_radial_gap(a: &Region, b: &Region) -> Result<(Rate, f64)> {
    same_channel(a, b)?;
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for p in a.points() {
        let theta = p.ray.theta_deg();
        let gap = a.support(theta) - b.support(theta);
        if gap > best.0 {
            best = (gap, theta);
        }
    }
    if a.is_empty() {
        return Ok((0.0, 0.0));
    }
    Ok(best)
}

/// Hausdorff distance between the hulls of two regions.
pub fn hausdorff(a: &Region, b: &Region) -> Result<f64> {
    same_channel(a, b)?;
    let one_way =
        |from: &Region, to: &Region| from.hull().iter().map(|v| polygon_distance(*v, to.hull())).fold(0.0, f64::max);
    Ok(one_way(a, b).max(one_way(b, a)))
}
