//! Corpus manifest: images, per-rater manual borders, per-method automatic
//! masks, and diagnosis groups.
//!
//! The manifest is one JSON document:
//!
//! ```json
//! {
//!   "raters": ["WS", "JM", "JG"],
//!   "methods": ["srm", "dtea"],
//!   "images": [
//!     {
//!       "id": "img001",
//!       "width": 768,
//!       "height": 512,
//!       "diagnosis": "benign",
//!       "ground_truths": { "WS": "gt/img001_WS.txt", "JM": "gt/img001_JM.pgm" },
//!       "methods": { "srm": "auto/img001_srm.pgm" }
//!     }
//!   ]
//! }
//! ```
//!
//! Paths are relative to the manifest's directory. A ground truth may be a
//! mask (PGM or PNG) or a border annotation, told apart by file content.
//! Masks are only read on demand; [`DatasetManifest::validate`] touches every
//! file up front.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::border::{render_border, BorderAnnotation, SplineMode, DEFAULT_SAMPLES_PER_SEGMENT};
use crate::error::{Error, Result};
use crate::io::{decode_mask, read_file, sniff_format};
use crate::mask::{BinaryMask, Dims, GroundTruthSet, Raster};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Diagnosis {
    Benign,
    Melanoma,
}

impl fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Diagnosis::Benign => "benign",
            Diagnosis::Melanoma => "melanoma",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageEntry {
    pub id: String,
    pub width: u32,
    pub height: u32,
    pub diagnosis: Diagnosis,
    pub ground_truths: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub methods: BTreeMap<String, PathBuf>,
}

impl ImageEntry {
    pub fn dims(&self) -> Dims {
        Dims::new(self.width, self.height)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub raters: Vec<String>,
    pub methods: Vec<String>,
    pub images: Vec<ImageEntry>,
    #[serde(skip)]
    base_dir: PathBuf,
}

/// How rendered annotations are turned into masks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RenderOptions {
    pub samples_per_segment: usize,
    pub mode: SplineMode,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            samples_per_segment: DEFAULT_SAMPLES_PER_SEGMENT,
            mode: SplineMode::Approximating,
        }
    }
}

/// Which images share an expected-index dataset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DimsPolicy {
    /// Every image must have the same dimensions.
    #[default]
    Shared,
    /// Images are grouped by dimensions; each group forms its own dataset.
    PerDims,
}

fn invalid(entry: &str, field: &str, message: impl Into<String>) -> Error {
    Error::Validation {
        entry: entry.to_string(),
        field: field.to_string(),
        message: message.into(),
    }
}

impl DatasetManifest {
    pub fn new(
        raters: Vec<String>,
        methods: Vec<String>,
        images: Vec<ImageEntry>,
        base_dir: impl Into<PathBuf>,
    ) -> Result<Self> {
        let m = Self {
            raters,
            methods,
            images,
            base_dir: base_dir.into(),
        };
        m.check()?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = read_file(path)?;
        let mut m: DatasetManifest =
            serde_json::from_slice(&bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        m.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        m.check()?;
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    pub fn resolve(&self, relative: &Path) -> PathBuf {
        self.base_dir.join(relative)
    }

    pub fn entry(&self, id: &str) -> Option<&ImageEntry> {
        self.images.iter().find(|e| e.id == id)
    }

    fn check(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for r in &self.raters {
            if !seen.insert(r) {
                return Err(invalid("manifest", "raters", format!("duplicate rater {r:?}")));
            }
        }
        let mut seen = BTreeSet::new();
        for m in &self.methods {
            if !seen.insert(m) {
                return Err(invalid("manifest", "methods", format!("duplicate method {m:?}")));
            }
        }
        let mut ids = BTreeSet::new();
        for e in &self.images {
            if e.id.is_empty() {
                return Err(invalid("manifest", "images", "image with empty id"));
            }
            if !ids.insert(&e.id) {
                return Err(invalid(&e.id, "id", format!("duplicate image id {:?}", e.id)));
            }
            if e.width == 0 || e.height == 0 {
                return Err(invalid(&e.id, "width/height", "dimensions must be positive"));
            }
            if e.ground_truths.is_empty() {
                return Err(invalid(&e.id, "ground_truths", "at least one ground truth is required"));
            }
            if let Some(r) = e.ground_truths.keys().find(|r| !self.raters.contains(r)) {
                return Err(invalid(&e.id, "ground_truths", format!("unknown rater {r:?}")));
            }
            if let Some(m) = e.methods.keys().find(|m| !self.methods.contains(m)) {
                return Err(invalid(&e.id, "methods", format!("unknown method {m:?}")));
            }
        }
        Ok(())
    }

    /// Manual masks of `entry` in manifest rater order.
    pub fn load_ground_truths(&self, entry: &ImageEntry, render: &RenderOptions) -> Result<GroundTruthSet<BinaryMask>> {
        let mut masks = Vec::new();
        let mut ids = Vec::new();
        for rater in &self.raters {
            if let Some(rel) = entry.ground_truths.get(rater) {
                masks.push(self.load_border(rel, entry.dims(), render)?);
                ids.push(rater.clone());
            }
        }
        GroundTruthSet::new(masks, ids)
    }

    /// `Ok(None)` when the image has no mask for `method`.
    pub fn load_method_mask(&self, entry: &ImageEntry, method: &str) -> Result<Option<BinaryMask>> {
        entry
            .methods
            .get(method)
            .map(|rel| self.load_border(rel, entry.dims(), &RenderOptions::default()))
            .transpose()
    }

    /// Reads a mask, or renders an annotation, and checks it against `dims`.
    pub fn load_border(&self, rel: &Path, dims: Dims, render: &RenderOptions) -> Result<BinaryMask> {
        let path = self.resolve(rel);
        let bytes = read_file(&path)?;
        let mask = if sniff_format(&bytes).is_some() {
            decode_mask(&bytes).map_err(|e| match e {
                Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
                other => other,
            })?
        } else {
            let text = std::str::from_utf8(&bytes)
                .map_err(|_| Error::Parse(format!("{}: neither a mask nor an annotation", path.display())))?;
            let ann = BorderAnnotation::parse(text).map_err(|e| match e {
                Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
                other => other,
            })?;
            render_border(&ann, render.samples_per_segment, render.mode)?
        };
        dims.ensure_eq(mask.dims())?;
        Ok(mask)
    }

    /// Image indices grouped by dimensions, in manifest order within a group.
    pub fn dims_groups(&self) -> BTreeMap<Dims, Vec<usize>> {
        let mut groups: BTreeMap<Dims, Vec<usize>> = BTreeMap::new();
        for (i, e) in self.images.iter().enumerate() {
            groups.entry(e.dims()).or_default().push(i);
        }
        groups
    }

    /// Touches every referenced file and reports each problem found.
    pub fn validate(&self, render: &RenderOptions, policy: DimsPolicy) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for e in &self.images {
            let files = e
                .ground_truths
                .iter()
                .map(|(r, p)| (format!("ground truth {r}"), p))
                .chain(e.methods.iter().map(|(m, p)| (format!("method {m}"), p)));
            for (what, rel) in files {
                if let Err(err) = self.load_border(rel, e.dims(), render) {
                    out.push(Diagnostic {
                        image: Some(e.id.clone()),
                        message: format!("{what} ({}): {err}", self.resolve(rel).display()),
                    });
                }
            }
        }
        let groups = self.dims_groups();
        if policy == DimsPolicy::Shared && groups.len() > 1 {
            let sizes: Vec<String> = groups
                .iter()
                .map(|(d, idx)| format!("{d} ({} images)", idx.len()))
                .collect();
            out.push(Diagnostic {
                image: None,
                message: format!(
                    "a shared expected index averages pair probabilities pixel-by-pixel over all images, \
                     which requires identical dimensions; found {}. Use the per-dimension policy instead",
                    sizes.join(", ")
                ),
            });
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub image: Option<String>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.image {
            Some(id) => write!(f, "{id}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_mask_pgm;

    const TWO_IMAGES: &str = r#"{
        "raters": ["a", "b"],
        "methods": ["m"],
        "images": [
            {"id": "i1", "width": 4, "height": 4, "diagnosis": "benign",
             "ground_truths": {"b": "b1.pgm", "a": "a1.pgm"}, "methods": {"m": "m1.pgm"}},
            {"id": "i2", "width": 4, "height": 4, "diagnosis": "melanoma",
             "ground_truths": {"a": "a2.txt"}}
        ]
    }"#;

    fn write_corpus(dir: &Path) {
        fs::write(dir.join("manifest.json"), TWO_IMAGES).unwrap();
        let sq = BinaryMask::from_fn(4, 4, |x, y| x < 2 && y < 2).unwrap();
        write_mask_pgm(dir.join("a1.pgm"), &sq, None).unwrap();
        write_mask_pgm(dir.join("b1.pgm"), &sq.complement(), None).unwrap();
        write_mask_pgm(dir.join("m1.pgm"), &sq, None).unwrap();
        fs::write(dir.join("a2.txt"), "border 3 4 4\n0 0\n4 0\n2 4\n").unwrap();
    }

    #[test]
    fn loads_and_orders_by_rater_list() {
        let dir = tempfile::tempdir().unwrap();
        write_corpus(dir.path());
        let m = DatasetManifest::load(dir.path().join("manifest.json")).unwrap();
        assert_eq!(m.images.len(), 2);
        let gts = m.load_ground_truths(&m.images[0], &RenderOptions::default()).unwrap();
        assert_eq!(gts.rater_ids(), &["a", "b"]);
        assert_eq!(gts.masks()[0].lesion_count(), 4);
        let gts2 = m.load_ground_truths(&m.images[1], &RenderOptions::default()).unwrap();
        assert_eq!(gts2.len(), 1);
        assert!(gts2.masks()[0].lesion_count() > 0);
        assert!(m.load_method_mask(&m.images[1], "m").unwrap().is_none());
        assert!(m.validate(&RenderOptions::default(), DimsPolicy::Shared).is_empty());
    }

    #[test]
    fn mixed_mask_and_annotation() {
        let dir = tempfile::tempdir().unwrap();
        write_corpus(dir.path());
        let mut m = DatasetManifest::load(dir.path().join("manifest.json")).unwrap();
        m.images[0].ground_truths.insert("b".into(), "a2.txt".into());
        let gts = m.load_ground_truths(&m.images[0], &RenderOptions::default()).unwrap();
        assert_eq!(gts.len(), 2);
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        write_corpus(dir.path());
        let m = DatasetManifest::load(dir.path().join("manifest.json")).unwrap();
        m.save(dir.path().join("copy.json")).unwrap();
        let back = DatasetManifest::load(dir.path().join("copy.json")).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn validation_errors() {
        let dup = TWO_IMAGES.replace("\"i2\"", "\"i1\"");
        let err = serde_json::from_str::<DatasetManifest>(&dup)
            .unwrap()
            .check()
            .unwrap_err();
        assert!(err.to_string().contains("i1"), "{err}");

        let unknown = TWO_IMAGES.replace("{\"a\": \"a2.txt\"}", "{\"zz\": \"a2.txt\"}");
        let err = serde_json::from_str::<DatasetManifest>(&unknown)
            .unwrap()
            .check()
            .unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "ground_truths"));

        let bad_method = TWO_IMAGES.replace("{\"m\": \"m1.pgm\"}", "{\"q\": \"m1.pgm\"}");
        assert!(serde_json::from_str::<DatasetManifest>(&bad_method)
            .unwrap()
            .check()
            .is_err());

        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("bad.json"), "{ not json").unwrap();
        assert!(matches!(
            DatasetManifest::load(dir.path().join("bad.json")),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn missing_and_mismatched_files() {
        let dir = tempfile::tempdir().unwrap();
        write_corpus(dir.path());
        let mut m = DatasetManifest::load(dir.path().join("manifest.json")).unwrap();
        fs::remove_file(dir.path().join("m1.pgm")).unwrap();
        let big = BinaryMask::filled(10, 10, true).unwrap();
        write_mask_pgm(dir.path().join("a1.pgm"), &big, None).unwrap();
        let diags = m.validate(&RenderOptions::default(), DimsPolicy::Shared);
        assert_eq!(diags.len(), 2);
        assert!(diags.iter().any(|d| d.message.contains("m1.pgm")));
        assert!(matches!(
            m.load_ground_truths(&m.images[0], &RenderOptions::default()),
            Err(Error::DimensionMismatch { .. })
        ));

        m.images[1].width = 8;
        let diags = m.validate(&RenderOptions::default(), DimsPolicy::Shared);
        assert!(diags
            .iter()
            .any(|d| d.image.is_none() && d.message.contains("identical dimensions")));
        let diags = m.validate(&RenderOptions::default(), DimsPolicy::PerDims);
        assert!(diags.iter().all(|d| d.image.is_some()));
        assert_eq!(m.dims_groups().len(), 2);
    }
}
