//! Raster types shared by every measure.
//!
//! All rasters are row-major: pixel `(x, y)` lives at index `y * width + x`.
//! A [`BinaryMask`] stores one byte per pixel (0 = background, 1 = lesion) so
//! it can be handed to the Rand-index engine as a two-label map without a copy.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest permitted label id is `MAX_LABELS - 1`.
pub const MAX_LABELS: usize = 255;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dims {
    pub width: u32,
    pub height: u32,
}

impl Dims {
    pub fn new(width: u32, height: u32) -> Self {
        Self { width, height }
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn index(&self, x: u32, y: u32) -> usize {
        y as usize * self.width as usize + x as usize
    }

    fn check(&self, len: usize) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidRaster(format!("dimensions must be positive, got {self}")));
        }
        if len != self.pixel_count() {
            return Err(Error::InvalidRaster(format!(
                "{} pixels supplied for a {self} raster",
                len
            )));
        }
        Ok(())
    }

    pub(crate) fn ensure_eq(&self, other: Dims) -> Result<()> {
        if *self == other {
            Ok(())
        } else {
            Err(Error::dims((self.width, self.height), (other.width, other.height)))
        }
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

/// Anything with a width and height.
pub trait Raster {
    fn dims(&self) -> Dims;
}

/// A raster whose pixels carry small integer labels.
pub trait Labeled: Raster {
    fn labels(&self) -> &[u8];

    /// One past the largest label present.
    fn label_bound(&self) -> usize {
        self.labels().iter().copied().max().map_or(0, |m| m as usize + 1)
    }
}

pub fn dims_match(a: &impl Raster, b: &impl Raster) -> bool {
    a.dims() == b.dims()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    dims: Dims,
    data: Vec<u8>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, lesion: Vec<bool>) -> Result<Self> {
        let dims = Dims::new(width, height);
        dims.check(lesion.len())?;
        Ok(Self {
            dims,
            data: lesion.into_iter().map(u8::from).collect(),
        })
    }

    /// Any nonzero byte is lesion.
    pub fn from_bytes(width: u32, height: u32, bytes: Vec<u8>) -> Result<Self> {
        let dims = Dims::new(width, height);
        dims.check(bytes.len())?;
        let data = bytes.into_iter().map(|b| u8::from(b != 0)).collect();
        Ok(Self { dims, data })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Result<Self> {
        let dims = Dims::new(width, height);
        dims.check(dims.pixel_count())?;
        let mut data = Vec::with_capacity(dims.pixel_count());
        for y in 0..height {
            for x in 0..width {
                data.push(u8::from(f(x, y)));
            }
        }
        Ok(Self { dims, data })
    }

    pub fn filled(width: u32, height: u32, lesion: bool) -> Result<Self> {
        Self::from_fn(width, height, |_, _| lesion)
    }

    pub fn width(&self) -> u32 {
        self.dims.width
    }

    pub fn height(&self) -> u32 {
        self.dims.height
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.data[self.dims.index(x, y)] != 0
    }

    pub fn is_lesion(&self, idx: usize) -> bool {
        self.data[idx] != 0
    }

    /// Pixel classes as 0/1 bytes.
    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.data.iter().map(|&b| b != 0)
    }

    pub fn lesion_count(&self) -> usize {
        self.data.iter().filter(|&&b| b != 0).count()
    }

    pub fn background_count(&self) -> usize {
        self.data.len() - self.lesion_count()
    }

    pub fn complement(&self) -> BinaryMask {
        BinaryMask {
            dims: self.dims,
            data: self.data.iter().map(|&b| 1 - b).collect(),
        }
    }

    pub fn to_label_map(&self) -> LabelMap {
        LabelMap {
            dims: self.dims,
            labels: self.data.clone(),
        }
    }

    /// True when every lesion pixel of `self` is also lesion in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.dims == other.dims && self.data.iter().zip(&other.data).all(|(&a, &b)| a <= b)
    }

    pub(crate) fn from_raw(dims: Dims, data: Vec<u8>) -> Self {
        debug_assert_eq!(dims.pixel_count(), data.len());
        Self { dims, data }
    }
}

impl Raster for BinaryMask {
    fn dims(&self) -> Dims {
        self.dims
    }
}

impl Labeled for BinaryMask {
    fn labels(&self) -> &[u8] {
        &self.data
    }
}

impl fmt::Debug for BinaryMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryMask({}, {} lesion)", self.dims, self.lesion_count())
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LabelMap {
    dims: Dims,
    labels: Vec<u8>,
}

impl LabelMap {
    pub fn new(width: u32, height: u32, labels: Vec<u8>) -> Result<Self> {
        let dims = Dims::new(width, height);
        dims.check(labels.len())?;
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= MAX_LABELS) {
            return Err(Error::InvalidRaster(format!(
                "label {bad} exceeds the maximum of {}",
                MAX_LABELS - 1
            )));
        }
        Ok(Self { dims, labels })
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.labels[self.dims.index(x, y)]
    }

    /// Applies `f` to every label. `f` must keep labels below [`MAX_LABELS`].
    pub fn relabel(&self, f: impl Fn(u8) -> u8) -> Result<LabelMap> {
        LabelMap::new(
            self.dims.width,
            self.dims.height,
            self.labels.iter().map(|&l| f(l)).collect(),
        )
    }
}

impl Raster for LabelMap {
    fn dims(&self) -> Dims {
        self.dims
    }
}

impl Labeled for LabelMap {
    fn labels(&self) -> &[u8] {
        &self.labels
    }
}

impl fmt::Debug for LabelMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LabelMap({}, {} labels)", self.dims, self.label_bound())
    }
}

impl From<&BinaryMask> for LabelMap {
    fn from(m: &BinaryMask) -> Self {
        m.to_label_map()
    }
}

/// The K manual segmentations of one image, in rater order.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruthSet<M = BinaryMask> {
    masks: Vec<M>,
    rater_ids: Vec<String>,
}

impl<M: Raster> GroundTruthSet<M> {
    pub fn new(masks: Vec<M>, rater_ids: Vec<String>) -> Result<Self> {
        if masks.is_empty() {
            return Err(Error::InvalidRaster("ground-truth set is empty".into()));
        }
        if masks.len() != rater_ids.len() {
            return Err(Error::InvalidRaster(format!(
                "{} masks but {} rater ids",
                masks.len(),
                rater_ids.len()
            )));
        }
        for (i, id) in rater_ids.iter().enumerate() {
            if rater_ids[..i].contains(id) {
                return Err(Error::InvalidRaster(format!("duplicate rater id {id:?}")));
            }
        }
        let dims = masks[0].dims();
        for m in &masks[1..] {
            dims.ensure_eq(m.dims())?;
        }
        Ok(Self { masks, rater_ids })
    }

    /// Rater ids default to `"0"`, `"1"`, ...
    pub fn anonymous(masks: Vec<M>) -> Result<Self> {
        let ids = (0..masks.len()).map(|i| i.to_string()).collect();
        Self::new(masks, ids)
    }

    pub fn masks(&self) -> &[M] {
        &self.masks
    }

    pub fn rater_ids(&self) -> &[String] {
        &self.rater_ids
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &M)> {
        self.rater_ids.iter().map(String::as_str).zip(&self.masks)
    }
}

impl<M: Raster> Raster for GroundTruthSet<M> {
    fn dims(&self) -> Dims {
        self.masks[0].dims()
    }
}

impl GroundTruthSet<BinaryMask> {
    pub fn to_label_maps(&self) -> GroundTruthSet<LabelMap> {
        GroundTruthSet {
            masks: self.masks.iter().map(BinaryMask::to_label_map).collect(),
            rater_ids: self.rater_ids.clone(),
        }
    }
}
