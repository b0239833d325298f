//! Manual-border rendering: clicked control points are joined by a closed
//! uniform quadratic B-spline, sampled into a polyline, and filled.
//!
//! Segment `i` of the spline is
//!
//! ```text
//! C_i(t) = ½ [ (1 − t)² P[i−1] + (−2t² + 2t + 1) P[i] + t² P[i+1] ],  t ∈ [0, 1)
//! ```
//!
//! with indices taken modulo the control-point count. Each sample is a convex
//! combination of three control points, and consecutive segments meet with
//! matching position and tangent.
//!
//! By default the curve approximates the clicks. [`SplineMode::Interpolating`]
//! first solves for control points whose spline passes through every click at
//! its segment midpoint.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::read_file;
use crate::mask::{BinaryMask, Dims};

pub const DEFAULT_SAMPLES_PER_SEGMENT: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<Point> for f64 {
    type Output = Point;
    fn mul(self, p: Point) -> Point {
        Point::new(self * p.x, self * p.y)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplineMode {
    #[default]
    Approximating,
    Interpolating,
}

impl fmt::Display for SplineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplineMode::Approximating => "approximating",
            SplineMode::Interpolating => "interpolating",
        })
    }
}

impl FromStr for SplineMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "approximating" => Ok(SplineMode::Approximating),
            "interpolating" => Ok(SplineMode::Interpolating),
            other => Err(Error::Parse(format!("unknown spline mode {other:?}"))),
        }
    }
}

/// Control points clicked along a lesion border, plus the raster they
/// belong to. Points may fall outside the raster; filling clips them.
#[derive(Clone, Debug, PartialEq)]
pub struct BorderAnnotation {
    pub control_points: Vec<Point>,
    pub dims: Dims,
}

impl BorderAnnotation {
    pub fn new(control_points: Vec<Point>, dims: Dims) -> Result<Self> {
        if control_points.len() < 3 {
            return Err(Error::TooFewControlPoints(control_points.len()));
        }
        if control_points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::Parse("control points must be finite".into()));
        }
        if dims.width == 0 || dims.height == 0 {
            return Err(Error::Parse(format!("annotation has empty dimensions {dims}")));
        }
        Ok(Self { control_points, dims })
    }

    /// Parses `border <M> <width> <height>` followed by `M` lines of `x y`.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty annotation".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let bad_header = || Error::Parse(format!("bad annotation header {header:?}"));
        if fields.len() != 4 || fields[0] != "border" {
            return Err(bad_header());
        }
        let count: usize = fields[1].parse().map_err(|_| bad_header())?;
        let width: u32 = fields[2].parse().map_err(|_| bad_header())?;
        let height: u32 = fields[3].parse().map_err(|_| bad_header())?;
        let mut points = Vec::with_capacity(count);
        for (i, line) in lines.enumerate() {
            let mut it = line.split_whitespace();
            let parsed = match (it.next(), it.next(), it.next()) {
                (Some(x), Some(y), None) => x.parse().ok().zip(y.parse().ok()),
                _ => None,
            };
            let (x, y) = parsed.ok_or_else(|| Error::Parse(format!("bad control point line {}: {line:?}", i + 1)))?;
            points.push(Point::new(x, y));
        }
        if points.len() != count {
            return Err(Error::Parse(format!(
                "header declares {count} points but {} were given",
                points.len()
            )));
        }
        Self::new(points, Dims::new(width, height))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = read_file(path)?;
        let text = String::from_utf8(bytes)
            .map_err(|_| Error::Parse(format!("{}: annotation is not UTF-8", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "border {} {} {}\n",
            self.control_points.len(),
            self.dims.width,
            self.dims.height
        );
        for p in &self.control_points {
            out.push_str(&format!("{} {}\n", p.x, p.y));
        }
        out
    }
}

/// Closed uniform quadratic B-spline over a cyclic control polygon.
#[derive(Clone, Debug)]
pub struct ClosedQuadraticSpline {
    control: Vec<Point>,
}

impl ClosedQuadraticSpline {
    pub fn new(control: Vec<Point>) -> Result<Self> {
        if control.len() < 3 {
            return Err(Error::TooFewControlPoints(control.len()));
        }
        Ok(Self { control })
    }

    /// Control points chosen so that segment `i` passes through `through[i]`
    /// at `t = ½`, i.e. `(P[i−1] + 6 P[i] + P[i+1]) / 8 = through[i]`.
    pub fn interpolating(through: &[Point]) -> Result<Self> {
        let m = through.len();
        if m < 3 {
            return Err(Error::TooFewControlPoints(m));
        }
        // Strictly diagonally dominant cyclic system: Gauss-Seidel contracts
        // by at least 1/3 per sweep.
        let mut p = through.to_vec();
        for _ in 0..200 {
            let mut change = 0.0f64;
            for i in 0..m {
                let prev = p[(i + m - 1) % m];
                let next = p[(i + 1) % m];
                let updated = (1.0 / 6.0) * (8.0 * through[i] - prev - next);
                let d = updated - p[i];
                change = change.max(d.x.abs()).max(d.y.abs());
                p[i] = updated;
            }
            if change < 1e-13 {
                break;
            }
        }
        Self::new(p)
    }

    pub fn control_points(&self) -> &[Point] {
        &self.control
    }

    pub fn segment_count(&self) -> usize {
        self.control.len()
    }

    fn triple(&self, segment: usize) -> (Point, Point, Point) {
        let m = self.control.len();
        let i = segment % m;
        (
            self.control[(i + m - 1) % m],
            self.control[i],
            self.control[(i + 1) % m],
        )
    }

    pub fn point(&self, segment: usize, t: f64) -> Point {
        let (a, b, c) = self.triple(segment);
        let u = 1.0 - t;
        0.5 * (u * u * a + (-2.0 * t * t + 2.0 * t + 1.0) * b + t * t * c)
    }

    pub fn derivative(&self, segment: usize, t: f64) -> Point {
        let (a, b, c) = self.triple(segment);
        (t - 1.0) * a + (1.0 - 2.0 * t) * b + t * c
    }

    /// `samples_per_segment` points per segment at `t = k / samples`, as an
    /// implicitly closed polyline.
    pub fn sample(&self, samples_per_segment: usize) -> Vec<Point> {
        let s = samples_per_segment.max(1);
        let mut out = Vec::with_capacity(self.control.len() * s);
        for seg in 0..self.control.len() {
            for k in 0..s {
                out.push(self.point(seg, k as f64 / s as f64));
            }
        }
        out
    }
}

pub fn spline_points(ann: &BorderAnnotation, samples_per_segment: usize, mode: SplineMode) -> Result<Vec<Point>> {
    if samples_per_segment == 0 {
        return Err(Error::Parse("samples per segment must be at least 1".into()));
    }
    let spline = match mode {
        SplineMode::Approximating => ClosedQuadraticSpline::new(ann.control_points.clone())?,
        SplineMode::Interpolating => ClosedQuadraticSpline::interpolating(&ann.control_points)?,
    };
    Ok(spline.sample(samples_per_segment))
}

/// Twice the signed area of a closed polyline.
pub fn signed_double_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a.x * b.y - b.x * a.y
        })
        .sum()
}

/// Even-odd scanline fill. Pixel `(x, y)` is lesion when its center
/// `(x + ½, y + ½)` is inside the closed polyline; everything outside the
/// raster is dropped.
pub fn fill_closed_curve(polyline: &[Point], dims: Dims) -> Result<BinaryMask> {
    if polyline.len() < 3 {
        return Err(Error::TooFewControlPoints(polyline.len()));
    }
    if dims.width == 0 || dims.height == 0 {
        return Err(Error::InvalidRaster(format!("cannot fill into {dims}")));
    }
    let mut data = vec![0u8; dims.pixel_count()];
    let (min_y, max_y) = polyline.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.y), hi.max(p.y))
    });
    let first_row = (min_y - 0.5).ceil().max(0.0);
    let last_row = (max_y - 0.5).floor().min(dims.height as f64 - 1.0);
    if first_row > last_row {
        return Ok(BinaryMask::from_raw(dims, data));
    }
    let n = polyline.len();
    let mut crossings = Vec::new();
    for y in first_row as u32..=last_row as u32 {
        let yc = y as f64 + 0.5;
        crossings.clear();
        for i in 0..n {
            let (a, b) = (polyline[i], polyline[(i + 1) % n]);
            // half-open in y so shared vertices count once
            if (a.y > yc) != (b.y > yc) {
                crossings.push(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        }
        crossings.sort_by(f64::total_cmp);
        let row = &mut data[y as usize * dims.width as usize..(y as usize + 1) * dims.width as usize];
        for span in crossings.chunks_exact(2) {
            // centers x + ½ in [span[0], span[1])
            let lo = (span[0] - 0.5).ceil().max(0.0);
            let hi = ((span[1] - 0.5).ceil() - 1.0).min(dims.width as f64 - 1.0);
            if lo <= hi {
                row[lo as usize..=hi as usize].fill(1);
            }
        }
    }
    Ok(BinaryMask::from_raw(dims, data))
}

/// Like [`fill_closed_curve`], but a curve enclosing no area is an error.
pub fn fill_closed_curve_strict(polyline: &[Point], dims: Dims) -> Result<BinaryMask> {
    if polyline.len() >= 3 && signed_double_area(polyline) == 0.0 {
        return Err(Error::DegenerateCurve);
    }
    fill_closed_curve(polyline, dims)
}

pub fn render_border(ann: &BorderAnnotation, samples_per_segment: usize, mode: SplineMode) -> Result<BinaryMask> {
    let poly = spline_points(ann, samples_per_segment, mode)?;
    fill_closed_curve(&poly, ann.dims)
}
