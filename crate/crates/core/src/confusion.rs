//! Single ground-truth measures built on pixel confusion counts.
//!
//! Every measure is returned as a percentage computed in `f64` from exact
//! integer counts. A measure whose denominator is zero is an error, never a
//! NaN. The XOR measure is not clamped: an automatic border much larger than
//! the manual one scores above 100%.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{BinaryMask, Raster};

/// Pixel agreement between a manual (actual) and an automatic (detected) mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, fn_: u64, fp: u64, tn: u64) -> Self {
        Self { tp, fn_, fp, tn }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fn_ + self.fp + self.tn
    }

    pub fn manual_area(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn automatic_area(&self) -> u64 {
        self.tp + self.fp
    }

    pub fn xor_area(&self) -> u64 {
        self.fp + self.fn_
    }
}

/// Manual class first, automatic class second.
pub fn confusion(manual: &BinaryMask, automatic: &BinaryMask) -> Result<ConfusionCounts> {
    manual.dims().ensure_eq(automatic.dims())?;
    let mut cells = [0u64; 4];
    for (&m, &a) in manual.as_bytes().iter().zip(automatic.as_bytes()) {
        cells[((m << 1) | a) as usize] += 1;
    }
    Ok(ConfusionCounts {
        tp: cells[0b11],
        fn_: cells[0b10],
        fp: cells[0b01],
        tn: cells[0b00],
    })
}

fn percent(num: u64, den: u64) -> f64 {
    num as f64 / den as f64 * 100.0
}

/// Area of the symmetric difference over the manual border area.
pub fn xor_error(c: &ConfusionCounts) -> Result<f64> {
    match c.manual_area() {
        0 => Err(Error::EmptyManualBorder),
        den => Ok(percent(c.xor_area(), den)),
    }
}

pub fn sensitivity(c: &ConfusionCounts) -> Result<f64> {
    match c.manual_area() {
        0 => Err(Error::EmptyManualBorder),
        den => Ok(percent(c.tp, den)),
    }
}

pub fn specificity(c: &ConfusionCounts) -> Result<f64> {
    match c.fp + c.tn {
        0 => Err(Error::EmptyBackground),
        den => Ok(percent(c.tn, den)),
    }
}

pub fn precision(c: &ConfusionCounts) -> Result<f64> {
    match c.automatic_area() {
        0 => Err(Error::EmptyAutomaticBorder),
        den => Ok(percent(c.tp, den)),
    }
}

/// Same quantity as [`sensitivity`].
pub fn recall(c: &ConfusionCounts) -> Result<f64> {
    sensitivity(c)
}

pub fn error_probability(c: &ConfusionCounts) -> Result<f64> {
    match c.total() {
        0 => Err(Error::TooFewPixels(0)),
        den => Ok(percent(c.xor_area(), den)),
    }
}
