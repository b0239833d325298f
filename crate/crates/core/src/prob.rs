//! Probabilistic border model: each pixel carries the probability that an
//! observer would classify it as background, given how many of the
//! observation masks selected it as lesion.

use crate::error::{Error, Result};
use crate::io::encode_gray_pgm;
use crate::mask::{BinaryMask, Dims, Raster};

#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityImage {
    dims: Dims,
    selected: Vec<u32>,
    observations: u32,
}

impl ProbabilityImage {
    /// `n(i,j)` counts the observations marking pixel `(i,j)` as lesion and
    /// `N` is the number of masks given; nothing else joins the model.
    pub fn build<'a, I>(observations: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a BinaryMask>,
    {
        let mut iter = observations.into_iter();
        let first = iter.next().ok_or(Error::EmptyObservationList)?;
        let dims = first.dims();
        let mut selected: Vec<u32> = first.as_bytes().iter().map(|&b| b as u32).collect();
        let mut count = 1u32;
        for m in iter {
            dims.ensure_eq(m.dims())?;
            for (s, &b) in selected.iter_mut().zip(m.as_bytes()) {
                *s += b as u32;
            }
            count += 1;
        }
        Ok(Self {
            dims,
            selected,
            observations: count,
        })
    }

    pub fn observations(&self) -> u32 {
        self.observations
    }

    pub fn selected_count(&self, idx: usize) -> u32 {
        self.selected[idx]
    }

    pub fn probability(&self, idx: usize) -> f64 {
        let n = self.observations as f64;
        (n - self.selected[idx] as f64) / n
    }

    pub fn probability_at(&self, x: u32, y: u32) -> f64 {
        self.probability(self.dims.index(x, y))
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.selected.len()).map(|i| self.probability(i))
    }

    /// Pixels every observation marked as lesion.
    pub fn agreement_region(&self) -> BinaryMask {
        let data = self
            .selected
            .iter()
            .map(|&n| u8::from(n == self.observations))
            .collect();
        BinaryMask::from_raw(self.dims, data)
    }

    /// Grayscale PGM with p scaled to 0..=255, rounding half up.
    pub fn to_pgm(&self) -> Vec<u8> {
        let big_n = self.observations as u64;
        let samples: Vec<u8> = self
            .selected
            .iter()
            .map(|&n| ((2 * 255 * (big_n - n as u64) + big_n) / (2 * big_n)) as u8)
            .collect();
        encode_gray_pgm(self.dims, &samples, None)
    }
}

impl Raster for ProbabilityImage {
    fn dims(&self) -> Dims {
        self.dims
    }
}

/// Mean misclassification probability over the automatic border's lesion
/// pixels, as a percentage.
pub fn guillod_error(prob: &ProbabilityImage, automatic: &BinaryMask) -> Result<f64> {
    prob.dims.ensure_eq(automatic.dims())?;
    let big_n = prob.observations as u64;
    let mut inside = 0u64;
    let mut missed = 0u64;
    for (&n, &a) in prob.selected.iter().zip(automatic.as_bytes()) {
        if a != 0 {
            inside += 1;
            missed += big_n - n as u64;
        }
    }
    if inside == 0 {
        return Err(Error::EmptyAutomaticBorder);
    }
    Ok(missed as f64 / (big_n * inside) as f64 * 100.0)
}
