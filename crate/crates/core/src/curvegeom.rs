//! Curve geometry for coastlines.
//!
//! A coastline is represented either by a closed-form parametric curve
//! (line segment, circular arc, elliptical arc) or by an ordered polyline.
//! Every observation is located by its arc-length parameter `t`, the distance
//! travelled along the curve from its start, and covariances are built from
//! `|t - t'|`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Mean Earth radius in kilometres used by the equirectangular projection.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Absolute tolerance of the adaptive arc-length quadrature.
const QUAD_ABS_TOL: f64 = 1e-10;
const QUAD_MAX_DEPTH: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &PlanePoint) -> f64 {
        segment_length(self, other)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// A longitude/latitude pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    pub lon: f64,
    pub lat: f64,
}

impl GeoPoint {
    pub fn new(lon: f64, lat: f64) -> Result<Self> {
        if !(-180.0..=180.0).contains(&lon) {
            return Err(Error::OutOfDomain {
                value: lon,
                lower: -180.0,
                upper: 180.0,
            });
        }
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::OutOfDomain {
                value: lat,
                lower: -90.0,
                upper: 90.0,
            });
        }
        Ok(Self { lon, lat })
    }
}

/// Length of the straight segment joining `p` and `q`.
pub fn segment_length(p: &PlanePoint, q: &PlanePoint) -> f64 {
    (q.x - p.x).hypot(q.y - p.y)
}

/// Cumulative chord lengths along an ordered point sequence, starting at 0.
pub fn cumulative_chord_length(points: &[PlanePoint]) -> Vec<f64> {
    let mut out = Vec::with_capacity(points.len());
    let mut acc = 0.0;
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            acc += segment_length(&points[i - 1], p);
        }
        out.push(acc);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum CurveKind {
    /// `origin + lambda * direction`, `direction` of unit length.
    Line {
        origin: PlanePoint,
        direction: PlanePoint,
    },
    /// `(r cos lambda, r sin lambda)`.
    Circle { radius: f64 },
    /// `(a cos lambda, b sin lambda)`.
    Ellipse { a: f64, b: f64 },
}

/// A closed-form parametric coastline `lambda -> gamma(lambda)` on
/// `[lambda_min, lambda_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParametricCurve {
    kind: CurveKind,
    lambda_min: f64,
    lambda_max: f64,
}

impl ParametricCurve {
    /// Ray from `origin` along `direction`; the direction is normalized.
    pub fn line(origin: PlanePoint, direction: PlanePoint, length: f64) -> Result<Self> {
        let norm = direction.x.hypot(direction.y);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParameter(
                "line direction must be a nonzero finite vector".into(),
            ));
        }
        let direction = PlanePoint::new(direction.x / norm, direction.y / norm);
        Self::checked(CurveKind::Line { origin, direction }, 0.0, length)
    }

    pub fn circle(radius: f64, lambda_min: f64, lambda_max: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter("circle radius must be > 0".into()));
        }
        Self::checked(CurveKind::Circle { radius }, lambda_min, lambda_max)
    }

    pub fn ellipse(a: f64, b: f64, lambda_min: f64, lambda_max: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidParameter(
                "ellipse semi-axes must be > 0".into(),
            ));
        }
        Self::checked(CurveKind::Ellipse { a, b }, lambda_min, lambda_max)
    }

    fn checked(kind: CurveKind, lambda_min: f64, lambda_max: f64) -> Result<Self> {
        if !(lambda_max > lambda_min) || !lambda_min.is_finite() || !lambda_max.is_finite() {
            return Err(Error::InvalidParameter(
                "parameter domain must satisfy lambda_max > lambda_min".into(),
            ));
        }
        Ok(Self {
            kind,
            lambda_min,
            lambda_max,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lambda_min, self.lambda_max)
    }

    pub fn point_at(&self, lambda: f64) -> PlanePoint {
        match self.kind {
            CurveKind::Line { origin, direction } => PlanePoint::new(
                origin.x + lambda * direction.x,
                origin.y + lambda * direction.y,
            ),
            CurveKind::Circle { radius } => {
                PlanePoint::new(radius * lambda.cos(), radius * lambda.sin())
            }
            CurveKind::Ellipse { a, b } => PlanePoint::new(a * lambda.cos(), b * lambda.sin()),
        }
    }

    /// Norm of the tangent vector `|gamma'(lambda)|`.
    pub fn speed(&self, lambda: f64) -> f64 {
        match self.kind {
            CurveKind::Line { .. } => 1.0,
            CurveKind::Circle { radius } => radius,
            CurveKind::Ellipse { a, b } => (a * lambda.sin()).hypot(b * lambda.cos()),
        }
    }

    /// Arc length between parameters `lambda0 <= lambda1`.
    ///
    /// Lines and circles use their closed forms (`t = lambda` and
    /// `t = r * lambda`); ellipses are integrated with adaptive Gauss-Kronrod
    /// quadrature to an absolute tolerance of 1e-10.
    pub fn arc_length(&self, lambda0: f64, lambda1: f64) -> Result<f64> {
        for v in [lambda0, lambda1] {
            if !(v >= self.lambda_min && v <= self.lambda_max) {
                return Err(Error::OutOfDomain {
                    value: v,
                    lower: self.lambda_min,
                    upper: self.lambda_max,
                });
            }
        }
        if lambda1 < lambda0 {
            return Err(Error::InvalidParameter(
                "arc_length requires lambda0 <= lambda1".into(),
            ));
        }
        if lambda0 == lambda1 {
            return Ok(0.0);
        }
        Ok(match self.kind {
            CurveKind::Line { .. } => lambda1 - lambda0,
            CurveKind::Circle { radius } => radius * (lambda1 - lambda0),
            CurveKind::Ellipse { .. } => {
                integrate_adaptive(|l| self.speed(l), lambda0, lambda1, QUAD_ABS_TOL)
            }
        })
    }

    /// Cumulative arc-length parameters for sorted curve parameters, measured
    /// from the first one.
    pub fn cumulative_arc_length(&self, sorted_lambdas: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(sorted_lambdas.len());
        let mut acc = 0.0;
        for (i, &l) in sorted_lambdas.iter().enumerate() {
            if i > 0 {
                acc += self.arc_length(sorted_lambdas[i - 1], l)?;
            }
            out.push(acc);
        }
        Ok(out)
    }
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One G7-K15 panel: (Kronrod estimate, |Kronrod - Gauss|).
fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = GK_WK[7] * fc;
    let mut gauss = GK_WG[3] * fc;
    for (i, &x) in GK_NODES[..7].iter().enumerate() {
        let f1 = f(center - half * x);
        let f2 = f(center + half * x);
        kronrod += GK_WK[i] * (f1 + f2);
        if i % 2 == 1 {
            gauss += GK_WG[i / 2] * (f1 + f2);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = gauss_kronrod_15(f, a, b);
        if err <= tol || depth >= QUAD_MAX_DEPTH {
            return value;
        }
        let mid = 0.5 * (a + b);
        recurse(f, a, mid, 0.5 * tol, depth + 1) + recurse(f, mid, b, 0.5 * tol, depth + 1)
    }
    recurse(&f, a, b, tol, 0)
}

/// Closest point on a polyline to a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    /// Arc-length parameter of the foot point.
    pub t: f64,
    pub foot: PlanePoint,
    /// Distance from the query to the foot point.
    pub dist: f64,
}

/// Ordered polyline with cumulative arc length per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    vertices: Vec<PlanePoint>,
    cumlen: Vec<f64>,
}

impl Polyline {
    /// Builds a polyline, dropping consecutive duplicate vertices.
    pub fn new(vertices: Vec<PlanePoint>) -> Result<Self> {
        if let Some(bad) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite polyline vertex ({}, {})",
                bad.x, bad.y
            )));
        }
        let mut deduped: Vec<PlanePoint> = Vec::with_capacity(vertices.len());
        for (i, v) in vertices.into_iter().enumerate() {
            if deduped.last() == Some(&v) {
                log::warn!("dropping duplicate polyline vertex {i} at ({}, {})", v.x, v.y);
                continue;
            }
            deduped.push(v);
        }
        if deduped.len() < 2 {
            return Err(Error::InsufficientData(
                "a polyline needs at least two distinct vertices".into(),
            ));
        }
        let cumlen = cumulative_chord_length(&deduped);
        Ok(Self {
            vertices: deduped,
            cumlen,
        })
    }

    pub fn vertices(&self) -> &[PlanePoint] {
        &self.vertices
    }

    pub fn cumulative_lengths(&self) -> &[f64] {
        &self.cumlen
    }

    pub fn total_length(&self) -> f64 {
        *self.cumlen.last().expect("polyline has >= 2 vertices")
    }

    /// Point at arc length `t`, clamped to the polyline ends.
    pub fn point_at(&self, t: f64) -> PlanePoint {
        let t = t.clamp(0.0, self.total_length());
        // First segment whose end reaches t.
        let seg = self.cumlen[1..]
            .partition_point(|&c| c < t)
            .min(self.vertices.len() - 2);
        let (p, q) = (self.vertices[seg], self.vertices[seg + 1]);
        let len = self.cumlen[seg + 1] - self.cumlen[seg];
        let s = ((t - self.cumlen[seg]) / len).clamp(0.0, 1.0);
        PlanePoint::new(p.x + s * (q.x - p.x), p.y + s * (q.y - p.y))
    }

    /// Orthogonal projection of `p` onto the polyline. Ties go to the
    /// smallest arc-length parameter; points beyond the ends clamp to them.
    pub fn project(&self, p: &PlanePoint) -> Projection {
        let mut best = Projection {
            t: 0.0,
            foot: self.vertices[0],
            dist: f64::INFINITY,
        };
        for (i, w) in self.vertices.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            let (dx, dy) = (b.x - a.x, b.y - a.y);
            let len2 = dx * dx + dy * dy;
            let s = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
            let foot = PlanePoint::new(a.x + s * dx, a.y + s * dy);
            let dist = segment_length(p, &foot);
            if dist < best.dist {
                best = Projection {
                    t: self.cumlen[i] + s * len2.sqrt(),
                    foot,
                    dist,
                };
            }
        }
        best
    }

    /// `n` arc-length parameters equally spaced over `[0, total_length]`.
    pub fn equally_spaced(&self, n: usize) -> Result<Vec<f64>> {
        if n < 2 {
            return Err(Error::InvalidParameter(
                "at least two path points are required".into(),
            ));
        }
        let total = self.total_length();
        Ok((0..n)
            .map(|i| {
                if i == n - 1 {
                    total
                } else {
                    total * i as f64 / (n - 1) as f64
                }
            })
            .collect())
    }
}

/// Local equirectangular projection centred on a reference location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoProjection {
    pub ref_lon: f64,
    pub ref_lat: f64,
}

impl GeoProjection {
    /// Reference at the mean longitude and latitude of `points`.
    pub fn centered_on(points: &[GeoPoint]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InsufficientData("no geographic points".into()));
        }
        let n = points.len() as f64;
        Ok(Self {
            ref_lon: points.iter().map(|p| p.lon).sum::<f64>() / n,
            ref_lat: points.iter().map(|p| p.lat).sum::<f64>() / n,
        })
    }

    /// Kilometres east and north of the reference location.
    pub fn project(&self, p: &GeoPoint) -> PlanePoint {
        let k = EARTH_RADIUS_KM * PI / 180.0;
        PlanePoint::new(
            k * (p.lon - self.ref_lon) * self.ref_lat.to_radians().cos(),
            k * (p.lat - self.ref_lat),
        )
    }
}

/// Equirectangular projection of geographic points to kilometres.
///
/// `ref_lat` defaults to the mean latitude; coordinates are centred on the
/// mean location so a lone point maps to the origin.
pub fn geo_to_plane(points: &[GeoPoint], ref_lat: Option<f64>) -> Result<Vec<PlanePoint>> {
    for p in points {
        GeoPoint::new(p.lon, p.lat)?;
    }
    let mut proj = GeoProjection::centered_on(points)?;
    if let Some(lat) = ref_lat {
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::OutOfDomain {
                value: lat,
                lower: -90.0,
                upper: 90.0,
            });
        }
        proj.ref_lat = lat;
    }
    Ok(points.iter().map(|p| proj.project(p)).collect())
}

/// `D[i][j] = |t_i - t_j|`.
pub fn pairwise_curve_distance(t: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(t.len(), t.len(), |i, j| (t[i] - t[j]).abs())
}

/// `D[i][j] = ||s_i - s_j||`.
pub fn pairwise_euclidean_distance(points: &[PlanePoint]) -> DMatrix<f64> {
    DMatrix::from_fn(points.len(), points.len(), |i, j| {
        segment_length(&points[i], &points[j])
    })
}
