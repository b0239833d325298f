//! Independent reference implementations used only by tests.
#![allow(dead_code)]

use rand::Rng;
use segeval::border::Point;
use segeval::{GroundTruthSet, LabelMap, Labeled, Raster};

pub fn random_label_map<R: Rng>(rng: &mut R, w: u32, h: u32, labels: u8) -> LabelMap {
    LabelMap::new(w, h, (0..w * h).map(|_| rng.gen_range(0..labels)).collect()).unwrap()
}

/// Blocky label maps: random rectangles painted over a background, so the
/// partitions look more like segmentations than white noise.
pub fn random_blocky_map<R: Rng>(rng: &mut R, w: u32, h: u32, labels: u8) -> LabelMap {
    let mut data = vec![0u8; (w * h) as usize];
    for _ in 0..rng.gen_range(0..6) {
        let (x0, y0) = (rng.gen_range(0..w), rng.gen_range(0..h));
        let (x1, y1) = (rng.gen_range(x0..w) + 1, rng.gen_range(y0..h) + 1);
        let l = rng.gen_range(0..labels);
        for y in y0..y1 {
            for x in x0..x1 {
                data[(y * w + x) as usize] = l;
            }
        }
    }
    LabelMap::new(w, h, data).unwrap()
}

pub fn random_gts<R: Rng>(rng: &mut R, w: u32, h: u32, labels: u8, k: usize) -> GroundTruthSet<LabelMap> {
    let maps = (0..k)
        .map(|_| {
            if rng.gen_bool(0.5) {
                random_blocky_map(rng, w, h, labels)
            } else {
                random_label_map(rng, w, h, labels)
            }
        })
        .collect();
    GroundTruthSet::anonymous(maps).unwrap()
}

#[derive(Default)]
pub struct CompensatedSum {
    sum: f64,
    c: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

fn same_fraction<G: Labeled>(gts: &GroundTruthSet<G>, i: usize, j: usize) -> f64 {
    let agree = gts.masks().iter().filter(|m| m.labels()[i] == m.labels()[j]).count();
    agree as f64 / gts.len() as f64
}

/// Expected index by the literal pairwise definition: for every pair, the
/// dataset-wide same-region probability p' is averaged over images, then
/// combined with the current image's p.
pub fn expected_pri_brute<G: Labeled>(gts: &GroundTruthSet<G>, dataset: &[&GroundTruthSet<G>]) -> f64 {
    let n = gts.dims().pixel_count();
    let phi = dataset.len() as f64;
    let mut sum = CompensatedSum::default();
    for i in 0..n {
        for j in i + 1..n {
            let p = same_fraction(gts, i, j);
            let p_prime = dataset.iter().map(|d| same_fraction(d, i, j)).sum::<f64>() / phi;
            sum.add(p_prime * p + (1.0 - p_prime) * (1.0 - p));
        }
    }
    sum.value() / (n as f64 * (n as f64 - 1.0) / 2.0)
}

/// Crossing-number point-in-polygon test.
pub fn point_in_polygon(poly: &[Point], x: f64, y: f64) -> bool {
    let mut inside = false;
    let mut j = poly.len() - 1;
    for i in 0..poly.len() {
        let (pi, pj) = (poly[i], poly[j]);
        if (pi.y > y) != (pj.y > y) && x < pi.x + (y - pi.y) * (pj.x - pi.x) / (pj.y - pi.y) {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Counter-clockwise convex hull (monotone chain).
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Whether `p` lies in the hull, allowing `tol` of slack scaled by edge length.
pub fn in_hull(hull: &[Point], p: Point, tol: f64) -> bool {
    match hull.len() {
        0 => false,
        1 => (p.x - hull[0].x).hypot(p.y - hull[0].y) <= tol,
        2 => {
            let (a, b) = (hull[0], hull[1]);
            let len = (b.x - a.x).hypot(b.y - a.y);
            let t = ((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / (len * len);
            (-tol..=1.0 + tol).contains(&t) && cross(a, b, p).abs() / len <= tol
        }
        n => (0..n).all(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % n]);
            let len = (b.x - a.x).hypot(b.y - a.y);
            cross(a, b, p) / len >= -tol
        }),
    }
}
