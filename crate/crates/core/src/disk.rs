//! Sampled geometry on the unit disk: real-part bounds, winding numbers and
//! the univalence, starlikeness, convexity and subordination probes.
//!
//! Every probe returns a [`Verdict`]. A verdict's `tolerance` is the width of
//! the band inside which the probe refuses to decide: `DECISION_TOL` for
//! inequality probes and `WINDING_GUARD` for containment probes.

use std::cmp::Ordering;

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{usize_lit, Cx, Scalar};
use crate::series::{circle_points, AnalyticSeries};

/// Margin band separating Holds / Inconclusive / Fails for inequality probes.
pub const DECISION_TOL: f64 = 1e-6;
/// Minimum distance between a test point and a curve for a winding decision.
pub const WINDING_GUARD: f64 = 1e-4;
/// Smallest `|s'|` accepted by the convexity probe.
pub const DERIVATIVE_FLOOR: f64 = 1e-8;
pub const DEFAULT_RADII: [f64; 5] = [0.3, 0.5, 0.7, 0.85, 0.95];
pub const DEFAULT_ANGULAR_COUNT: usize = 1024;
pub const MAX_GRID_RADIUS: f64 = 0.95;
pub const MIN_ANGULAR_COUNT: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskGrid<T: Scalar> {
    radii: Vec<T>,
    angular_count: usize,
}

impl<T: Scalar> DiskGrid<T> {
    pub fn new(radii: Vec<T>, angular_count: usize) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::Usage("grid needs at least one radius".into()));
        }
        if radii.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Usage("grid radii must be strictly ascending".into()));
        }
        let max = T::lit(MAX_GRID_RADIUS) * (T::one() + T::lit(1e-12));
        if !(radii[0] > T::zero()) || !(radii[radii.len() - 1] <= max) {
            return Err(Error::Usage(format!("grid radii must lie in (0, {MAX_GRID_RADIUS}]")));
        }
        if angular_count < MIN_ANGULAR_COUNT {
            return Err(Error::Usage(format!(
                "angular count {angular_count} below the minimum {MIN_ANGULAR_COUNT}"
            )));
        }
        Ok(Self { radii, angular_count })
    }

    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    pub fn angular_count(&self) -> usize {
        self.angular_count
    }

    /// Largest grid radius; dominant boundary curves are sampled here.
    pub fn outer(&self) -> T {
        self.radii[self.radii.len() - 1]
    }

    /// The centre followed by every circle, innermost first.
    pub fn points(&self) -> Vec<Cx<T>> {
        let mut pts = vec![Cx::zero()];
        for &r in &self.radii {
            pts.extend(circle_points(r, self.angular_count));
        }
        pts
    }
}

impl Default for DiskGrid<f64> {
    fn default() -> Self {
        Self::new(DEFAULT_RADII.to_vec(), DEFAULT_ANGULAR_COUNT).expect("default grid is valid")
    }
}

/// Ordered so that the meet of two statuses is their minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Status {
    Fails,
    Inconclusive,
    Holds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness<T: Scalar> {
    /// Where the violation was observed.
    #[serde(serialize_with = "ser_cx")]
    pub z: Cx<T>,
    /// The offending value at `z`.
    #[serde(serialize_with = "ser_cx")]
    pub value: Cx<T>,
    /// Second point of a colliding pair, the circle radius (as `r + 0i`) for
    /// a winding failure, or the dominant's value for a containment failure.
    #[serde(serialize_with = "ser_opt_cx")]
    pub partner: Option<Cx<T>>,
}

impl<T: Scalar> Witness<T> {
    pub fn at(z: Cx<T>, value: Cx<T>) -> Self {
        Self { z, value, partner: None }
    }
}

pub(crate) fn ser_cx<T: Scalar, S: serde::Serializer>(c: &Cx<T>, s: S) -> std::result::Result<S::Ok, S::Error> {
    [c.re.as_f64(), c.im.as_f64()].serialize(s)
}

fn ser_opt_cx<T: Scalar, S: serde::Serializer>(
    c: &Option<Cx<T>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    c.map(|c| [c.re.as_f64(), c.im.as_f64()]).serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict<T: Scalar> {
    pub status: Status,
    pub margin: T,
    pub tolerance: T,
    pub witness: Option<Witness<T>>,
}

impl<T: Scalar> Verdict<T> {
    /// Classifies a signed margin against a band of half-width `tolerance`.
    pub fn from_margin(margin: T, tolerance: T, witness: Witness<T>) -> Self {
        let status = if margin > tolerance {
            Status::Holds
        } else if margin < -tolerance {
            Status::Fails
        } else {
            Status::Inconclusive
        };
        let witness = (status != Status::Holds).then_some(witness);
        Self { status, margin, tolerance, witness }
    }

    pub fn fails(margin: T, tolerance: T, witness: Witness<T>) -> Self {
        Self { status: Status::Fails, margin, tolerance, witness: Some(witness) }
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    /// Meet under `Fails < Inconclusive < Holds`; ties keep the smaller margin.
    pub fn meet(self, other: Self) -> Self {
        match self.status.cmp(&other.status) {
            Ordering::Less => self,
            Ordering::Greater => other,
            Ordering::Equal => {
                if other.margin < self.margin {
                    other
                } else {
                    self
                }
            }
        }
    }

    /// Checks the status/margin/witness consistency rules.
    pub fn is_consistent(&self) -> bool {
        match self.status {
            Status::Fails => self.witness.is_some(),
            Status::Holds => self.margin > self.tolerance,
            Status::Inconclusive => self.margin.abs() <= self.tolerance,
        }
    }
}

fn check_radius<T: Scalar>(s: &AnalyticSeries<T>, grid: &DiskGrid<T>) -> Result<()> {
    if grid.outer() > s.radius() * (T::one() + T::lit(1e-12)) {
        return Err(Error::Domain {
            modulus: grid.outer().as_f64(),
            lower: 0.0,
            upper: s.radius().as_f64(),
        });
    }
    Ok(())
}

/// Minimum of `Re s` over the grid (centre included) and where it occurs.
pub fn min_real_on_disk<T: Scalar>(s: &AnalyticSeries<T>, grid: &DiskGrid<T>) -> Result<(T, Cx<T>)> {
    check_radius(s, grid)?;
    let mut best = (T::infinity(), Cx::zero());
    for z in grid.points() {
        let re = s.eval_unchecked(z).re;
        if re < best.0 {
            best = (re, z);
        }
    }
    Ok(best)
}

/// Inequality verdict for `Re s > bound` over the grid.
pub fn real_part_verdict<T: Scalar>(s: &AnalyticSeries<T>, bound: T, grid: &DiskGrid<T>) -> Result<Verdict<T>> {
    let (min, at) = min_real_on_disk(s, grid)?;
    let value = s.eval_unchecked(at);
    Ok(Verdict::from_margin(min - bound, T::lit(DECISION_TOL), Witness::at(at, value)))
}

fn segment_distance<T: Scalar>(a: Cx<T>, b: Cx<T>, w: Cx<T>) -> T {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == T::zero() {
        return (w - a).norm();
    }
    let t = ((w - a).re * ab.re + (w - a).im * ab.im) / len2;
    let t = t.max(T::zero()).min(T::one());
    (w - (a + ab * t)).norm()
}

/// Winding number of the closed polyline `curve` about `w`, from the
/// accumulated argument change.
pub fn winding_number<T: Scalar>(curve: &[Cx<T>], w: Cx<T>) -> Result<i64> {
    if curve.len() < 2 {
        return Err(Error::InvalidSeries("curve needs at least two points".into()));
    }
    let n = curve.len();
    let mut closest = T::infinity();
    let mut total = T::zero();
    for j in 0..n {
        let a = curve[j];
        let b = curve[(j + 1) % n];
        closest = closest.min(segment_distance(a, b, w));
        total = total + ((b - w) / (a - w)).arg();
    }
    if closest < T::lit(WINDING_GUARD) {
        return Err(Error::TooClose { distance: closest.as_f64() });
    }
    Ok((total / T::TAU()).round().to_i64().unwrap_or(0))
}

/// A closed polyline indexed by horizontal bands so that winding numbers and
/// near-curve distances cost roughly a constant number of edge visits.
#[derive(Debug, Clone)]
pub struct ClosedCurve<T: Scalar> {
    points: Vec<Cx<T>>,
    bands: Vec<Vec<u32>>,
    y_min: T,
    band_height: T,
    pad: T,
}

/// Result of a point query against a [`ClosedCurve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveQuery<T> {
    pub winding: i64,
    /// Lower bound on the distance to the curve (exact when below the band height).
    pub distance: T,
}

impl<T: Scalar> ClosedCurve<T> {
    pub fn new(points: Vec<Cx<T>>) -> Self {
        let n = points.len();
        let pad = T::lit(WINDING_GUARD);
        let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
        for p in &points {
            lo = lo.min(p.im);
            hi = hi.max(p.im);
        }
        let band_count = (n / 4).clamp(1, 4096);
        let span = (hi - lo).max(T::lit(1e-300));
        let y_min = lo - pad;
        let band_height = (span + pad + pad) / usize_lit::<T>(band_count);
        let mut bands = vec![Vec::new(); band_count];
        let index = |y: T| -> usize {
            let b = ((y - y_min) / band_height).floor().to_isize().unwrap_or(0);
            b.clamp(0, band_count as isize - 1) as usize
        };
        for j in 0..n {
            let a = points[j];
            let b = points[(j + 1) % n];
            let (ya, yb) = (a.im.min(b.im) - pad, a.im.max(b.im) + pad);
            for band in &mut bands[index(ya)..=index(yb)] {
                band.push(j as u32);
            }
        }
        Self { points, bands, y_min, band_height, pad }
    }

    pub fn points(&self) -> &[Cx<T>] {
        &self.points
    }

    fn band_of(&self, y: T) -> Option<usize> {
        let b = ((y - self.y_min) / self.band_height).floor().to_isize()?;
        (b >= 0 && (b as usize) < self.bands.len()).then_some(b as usize)
    }

    /// Winding number (crossing rule) and distance lower bound for `w`.
    pub fn query(&self, w: Cx<T>) -> CurveQuery<T> {
        let Some(band) = self.band_of(w.im) else {
            let below = self.y_min + self.pad - w.im;
            let above = w.im - (self.y_min + self.band_height * usize_lit::<T>(self.bands.len()) - self.pad);
            return CurveQuery { winding: 0, distance: below.max(above).max(T::zero()) };
        };
        let n = self.points.len();
        let mut winding = 0i64;
        for &j in &self.bands[band] {
            let a = self.points[j as usize];
            let b = self.points[(j as usize + 1) % n];
            let cross = (b.re - a.re) * (w.im - a.im) - (w.re - a.re) * (b.im - a.im);
            if a.im <= w.im {
                if b.im > w.im && cross > T::zero() {
                    winding += 1;
                }
            } else if b.im <= w.im && cross < T::zero() {
                winding -= 1;
            }
        }
        let mut distance = self.band_height;
        let lo = band.saturating_sub(1);
        let hi = (band + 1).min(self.bands.len() - 1);
        for b in lo..=hi {
            for &j in &self.bands[b] {
                let a = self.points[j as usize];
                let c = self.points[(j as usize + 1) % n];
                distance = distance.min(segment_distance(a, c, w));
            }
        }
        CurveQuery { winding, distance }
    }
}

/// Smallest distance between two distinct samples, with the pair's indices.
fn closest_pair<T: Scalar>(pts: &[Cx<T>]) -> (T, usize, usize) {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&i, &j| pts[i].re.partial_cmp(&pts[j].re).unwrap_or(Ordering::Equal));
    let mut best = (T::infinity(), 0, 0);
    for (a, &i) in order.iter().enumerate() {
        for &j in &order[a + 1..] {
            if pts[j].re - pts[i].re >= best.0 {
                break;
            }
            let d = (pts[j] - pts[i]).norm();
            if d < best.0 {
                best = (d, i.min(j), i.max(j));
            }
        }
    }
    best
}

/// Numeric univalence check.
///
/// For each grid circle the boundary image must wind exactly once around
/// `s(0)`, points just left (right) of every edge must have winding 1 (0),
/// and no two samples may coincide within `DECISION_TOL`. `margin` is the
/// smallest sample separation.
pub fn univalence_probe<T: Scalar>(s: &AnalyticSeries<T>, grid: &DiskGrid<T>) -> Result<Verdict<T>> {
    check_radius(s, grid)?;
    let tol = T::lit(DECISION_TOL);
    let center = s.coeff(0);
    let mut separation = T::infinity();
    let quarter = T::lit(0.25);
    for &r in grid.radii() {
        let zs = circle_points(r, grid.angular_count());
        let pts: Vec<Cx<T>> = zs.iter().map(|&z| s.eval_unchecked(z)).collect();
        let radius_marker = Some(Complex::new(r, T::zero()));

        let (d, i, j) = closest_pair(&pts);
        if d < tol {
            return Ok(Verdict::fails(
                d - tol,
                tol,
                Witness { z: zs[i], value: pts[i], partner: Some(zs[j]) },
            ));
        }
        separation = separation.min(d);

        let curve = ClosedCurve::new(pts.clone());
        let q = curve.query(center);
        if q.distance < T::lit(WINDING_GUARD) || q.winding != 1 {
            return Ok(Verdict::fails(
                -T::one(),
                tol,
                Witness { z: Cx::zero(), value: center, partner: radius_marker },
            ));
        }

        let n = pts.len();
        for k in 0..n {
            let a = pts[k];
            let b = pts[(k + 1) % n];
            let mid = (a + b) * T::lit(0.5);
            let normal = (b - a) * Complex::new(T::zero(), quarter);
            let left = curve.query(mid + normal).winding;
            let right = curve.query(mid - normal).winding;
            if left != 1 || right != 0 {
                return Ok(Verdict::fails(
                    -T::one(),
                    tol,
                    Witness { z: zs[k], value: a, partner: radius_marker },
                ));
            }
        }
    }
    Ok(Verdict::from_margin(separation, tol, Witness::at(Cx::zero(), center)))
}

/// Fails with a witness if `values` (sampled on circles) wind around 0 or get
/// within `floor` of it.
fn zero_free_check<T: Scalar>(
    s: &AnalyticSeries<T>,
    grid: &DiskGrid<T>,
    floor: T,
) -> Option<Verdict<T>> {
    let tol = T::lit(DECISION_TOL);
    let origin = Cx::zero();
    if s.coeff(0).norm() < floor {
        return Some(Verdict::fails(-tol - floor, tol, Witness::at(origin, s.coeff(0))));
    }
    for &r in grid.radii() {
        let zs = circle_points(r, grid.angular_count());
        let pts: Vec<Cx<T>> = zs.iter().map(|&z| s.eval_unchecked(z)).collect();
        let (k, smallest) = pts
            .iter()
            .enumerate()
            .map(|(k, v)| (k, v.norm()))
            .fold((0, T::infinity()), |acc, x| if x.1 < acc.1 { x } else { acc });
        let wind = ClosedCurve::new(pts.clone()).query(origin).winding;
        if smallest < floor || wind != 0 {
            return Some(Verdict::fails(
                -tol - smallest,
                tol,
                Witness { z: zs[k], value: pts[k], partner: Some(Complex::new(r, T::zero())) },
            ));
        }
    }
    None
}

fn min_real_pointwise<T: Scalar>(
    grid: &DiskGrid<T>,
    skip_center: bool,
    f: impl Fn(Cx<T>) -> Cx<T>,
) -> (T, Cx<T>, Cx<T>) {
    let mut best = (T::infinity(), Cx::zero(), Cx::zero());
    for z in grid.points().into_iter().skip(usize::from(skip_center)) {
        let v = f(z);
        if v.re < best.0 {
            best = (v.re, z, v);
        }
    }
    best
}

/// Checks `Re(z s'/s) > 0` over the grid.
///
/// When `s(0) = 0` the functional is evaluated as `1 + z t'/t` with
/// `t = s / z`, which is analytic at the origin.
pub fn starlike_probe<T: Scalar>(s: &AnalyticSeries<T>, grid: &DiskGrid<T>) -> Result<Verdict<T>> {
    check_radius(s, grid)?;
    let tol = T::lit(DECISION_TOL);
    if s.coeffs().iter().all(|c| c.is_zero()) {
        return Err(Error::InvalidSeries("starlikeness of the zero series".into()));
    }
    let floor = T::lit(DERIVATIVE_FLOOR);
    let vanishes = s.coeff(0).norm() <= floor;
    let base = if vanishes { s.div_z()? } else { s.clone() };
    if let Some(v) = zero_free_check(&base, grid, floor) {
        return Ok(v);
    }
    let deriv = base.differentiate();
    let (min, at, value) = min_real_pointwise(grid, false, |z| {
        let ratio = z * deriv.eval_unchecked(z) / base.eval_unchecked(z);
        if vanishes {
            ratio + Cx::from(T::one())
        } else {
            ratio
        }
    });
    Ok(Verdict::from_margin(min, tol, Witness::at(at, value)))
}

/// Checks that `s` has no zero in the closed grid disk: no sample within
/// `DERIVATIVE_FLOOR` of 0 and zero winding of every circle image about 0.
/// `margin` is the smallest sampled modulus.
pub fn nonvanishing_probe<T: Scalar>(s: &AnalyticSeries<T>, grid: &DiskGrid<T>) -> Result<Verdict<T>> {
    check_radius(s, grid)?;
    if let Some(v) = zero_free_check(s, grid, T::lit(DERIVATIVE_FLOOR)) {
        return Ok(v);
    }
    let (mut min, mut at) = (T::infinity(), Cx::zero());
    for z in grid.points() {
        let m = s.eval_unchecked(z).norm();
        if m < min {
            min = m;
            at = z;
        }
    }
    Ok(Verdict::from_margin(min, T::lit(DECISION_TOL), Witness::at(at, s.eval_unchecked(at))))
}

/// Checks `Re(1 + z s''/s') > 0` over the grid.
pub fn convex_probe<T: Scalar>(s: &AnalyticSeries<T>, grid: &DiskGrid<T>) -> Result<Verdict<T>> {
    check_radius(s, grid)?;
    let tol = T::lit(DECISION_TOL);
    let floor = T::lit(DERIVATIVE_FLOOR);
    let d1 = s.differentiate();
    let d2 = d1.differentiate();
    let mut smallest = T::infinity();
    for z in grid.points() {
        smallest = smallest.min(d1.eval_unchecked(z).norm());
    }
    if smallest < floor {
        return Err(Error::DegenerateDerivative(smallest.as_f64()));
    }
    if let Some(v) = zero_free_check(&d1, grid, floor) {
        return Ok(v);
    }
    let (min, at, value) = min_real_pointwise(grid, false, |z| {
        Cx::from(T::one()) + z * d2.eval_unchecked(z) / d1.eval_unchecked(z)
    });
    Ok(Verdict::from_margin(min, tol, Witness::at(at, value)))
}

/// Numeric subordination `g < f` for a univalent dominant `f`.
///
/// Requires `g(0) = f(0)` within `DECISION_TOL`, then checks that every sample
/// of `g` on each grid circle lies inside the image of the outer grid circle
/// under `f` (non-zero winding number). `margin` is the smallest signed
/// distance to that boundary curve (negative outside); samples within
/// `WINDING_GUARD` of the curve make the verdict Inconclusive. The witness
/// partner is `f` evaluated at the witness point.
pub fn subordination_probe<T: Scalar>(
    g: &AnalyticSeries<T>,
    f: &AnalyticSeries<T>,
    grid: &DiskGrid<T>,
) -> Result<Verdict<T>> {
    check_radius(g, grid)?;
    check_radius(f, grid)?;
    let guard = T::lit(WINDING_GUARD);
    let g0 = g.coeff(0);
    let f0 = f.coeff(0);
    let gap = (g0 - f0).norm();
    let tol = T::lit(DECISION_TOL);
    if gap > tol * T::one().max(f0.norm()) {
        return Ok(Verdict::fails(-gap.max(guard + tol), guard, Witness { z: Cx::zero(), value: g0, partner: Some(f0) }));
    }
    let boundary = f.sample_circle(grid.outer(), grid.angular_count())?;
    let curve = ClosedCurve::new(boundary);
    let mut worst: Option<(T, Cx<T>, Cx<T>)> = None;
    for &r in grid.radii() {
        for z in circle_points(r, grid.angular_count()) {
            let w = g.eval_unchecked(z);
            let q = curve.query(w);
            let signed = if q.winding != 0 { q.distance } else { -q.distance };
            if worst.map_or(true, |(m, _, _)| signed < m) {
                worst = Some((signed, z, w));
            }
        }
    }
    let (margin, z, w) = worst.expect("grid is non-empty");
    let witness = Witness { z, value: w, partner: Some(f.eval_unchecked(z)) };
    Ok(Verdict::from_margin(margin, guard, witness))
}
