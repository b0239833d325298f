//! Deterministic synthetic corpus: blob-shaped lesions, raters who click
//! slightly different borders, and methods with systematic size biases.
//!
//! Rater borders are written as annotation files so that loading them runs
//! the spline renderer; method outputs are written as PGM masks.

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::border::{render_border, BorderAnnotation, Point, SplineMode, DEFAULT_SAMPLES_PER_SEGMENT};
use crate::dataset::{DatasetManifest, Diagnosis, ImageEntry};
use crate::error::Result;
use crate::io::write_mask_pgm;
use crate::mask::Dims;

#[derive(Clone, Debug)]
pub struct DemoSpec {
    pub images: usize,
    pub melanoma: usize,
    pub raters: Vec<String>,
    /// Method id and the radial scale it applies to the consensus border.
    pub methods: Vec<(String, f64)>,
    pub dims: Dims,
    pub control_points: usize,
    pub seed: u64,
}

impl Default for DemoSpec {
    fn default() -> Self {
        Self {
            images: 6,
            melanoma: 2,
            raters: vec!["WS".into(), "JM".into(), "JG".into()],
            methods: vec![("inner".into(), 0.85), ("outer".into(), 1.12)],
            dims: Dims::new(768, 512),
            control_points: 14,
            seed: 2009,
        }
    }
}

fn annotation(center: Point, radii: &[f64], dims: Dims) -> BorderAnnotation {
    let m = radii.len();
    let points = radii
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let a = TAU * k as f64 / m as f64;
            // three decimals keep annotation files short and stable
            let q = |v: f64| (v * 1000.0).round() / 1000.0;
            Point::new(q(center.x + r * a.cos()), q(center.y + r * a.sin()))
        })
        .collect();
    BorderAnnotation {
        control_points: points,
        dims,
    }
}

/// Writes annotations, method masks and `manifest.json` under `dir` and
/// returns the manifest path.
pub fn write_demo_corpus(dir: impl AsRef<Path>, spec: &DemoSpec) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir.join("gt"))?;
    fs::create_dir_all(dir.join("auto"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (w, h) = (spec.dims.width as f64, spec.dims.height as f64);
    let short = w.min(h);
    let m = spec.control_points.max(3);

    let rater_bias: Vec<f64> = spec.raters.iter().map(|_| rng.gen_range(0.93..1.07)).collect();
    let mut entries = Vec::new();
    for i in 0..spec.images {
        let id = format!("img{:03}", i + 1);
        let diagnosis = if i < spec.images.saturating_sub(spec.melanoma) {
            Diagnosis::Benign
        } else {
            Diagnosis::Melanoma
        };
        let irregularity = match diagnosis {
            Diagnosis::Benign => 0.12,
            Diagnosis::Melanoma => 0.25,
        };
        let center = Point::new(w * rng.gen_range(0.4..0.6), h * rng.gen_range(0.4..0.6));
        let base = short * rng.gen_range(0.18..0.3);
        let consensus: Vec<f64> = (0..m)
            .map(|_| base * (1.0 + irregularity * rng.gen_range(-1.0..1.0)))
            .collect();

        let mut entry = ImageEntry {
            id: id.clone(),
            width: spec.dims.width,
            height: spec.dims.height,
            diagnosis,
            ground_truths: Default::default(),
            methods: Default::default(),
        };
        for (rater, bias) in spec.raters.iter().zip(&rater_bias) {
            let radii: Vec<f64> = consensus
                .iter()
                .map(|r| r * bias * (1.0 + 0.06 * rng.gen_range(-1.0..1.0)))
                .collect();
            let rel = PathBuf::from(format!("gt/{id}_{rater}.txt"));
            fs::write(dir.join(&rel), annotation(center, &radii, spec.dims).to_text())?;
            entry.ground_truths.insert(rater.clone(), rel);
        }
        for (method, scale) in &spec.methods {
            let radii: Vec<f64> = consensus
                .iter()
                .map(|r| r * scale * (1.0 + 0.1 * rng.gen_range(-1.0..1.0)))
                .collect();
            let mask = render_border(
                &annotation(center, &radii, spec.dims),
                DEFAULT_SAMPLES_PER_SEGMENT,
                SplineMode::Approximating,
            )?;
            let rel = PathBuf::from(format!("auto/{id}_{method}.pgm"));
            write_mask_pgm(dir.join(&rel), &mask, None)?;
            entry.methods.insert(method.clone(), rel);
        }
        entries.push(entry);
    }
    let manifest = DatasetManifest::new(
        spec.raters.clone(),
        spec.methods.iter().map(|(m, _)| m.clone()).collect(),
        entries,
        dir,
    )?;
    let path = dir.join("manifest.json");
    manifest.save(&path)?;
    Ok(path)
}
