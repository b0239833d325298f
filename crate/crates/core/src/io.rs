//! Mask file formats: binary PGM (P5) for reading and writing, grayscale PNG
//! for reading.
//!
//! On disk, 0 is background and 255 is lesion. Any sample at or above 128
//! (after scaling to a 255 maxval) reads as lesion.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mask::{BinaryMask, Dims, Raster};

const LESION_THRESHOLD: u32 = 128;
const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaskFormat {
    Pgm,
    Png,
}

pub fn sniff_format(bytes: &[u8]) -> Option<MaskFormat> {
    if bytes.starts_with(b"P5") {
        Some(MaskFormat::Pgm)
    } else if bytes.starts_with(PNG_MAGIC) {
        Some(MaskFormat::Png)
    } else {
        None
    }
}

/// Grayscale samples of a P5 file, scaled to maxval 255.
pub fn decode_pgm(bytes: &[u8]) -> Result<(Dims, Vec<u8>)> {
    let mut pos = 0;
    let magic = next_token(bytes, &mut pos)?;
    if magic != b"P5" {
        return Err(Error::Parse("not a binary PGM (P5) file".into()));
    }
    let width = parse_header_num(bytes, &mut pos, "width")?;
    let height = parse_header_num(bytes, &mut pos, "height")?;
    let maxval = parse_header_num(bytes, &mut pos, "maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Parse(format!("unsupported PGM maxval {maxval}")));
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::Parse("truncated PGM header".into()));
    }
    pos += 1;
    let dims = Dims::new(width, height);
    let n = dims.pixel_count();
    if width == 0 || height == 0 {
        return Err(Error::Parse(format!("PGM has empty dimensions {dims}")));
    }
    let raster = bytes
        .get(pos..pos + n)
        .ok_or_else(|| Error::Parse(format!("PGM raster truncated: need {n} bytes")))?;
    let samples = if maxval == 255 {
        raster.to_vec()
    } else {
        raster
            .iter()
            .map(|&v| ((v as u32 * 255 + maxval / 2) / maxval).min(255) as u8)
            .collect()
    };
    Ok((dims, samples))
}

fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Parse("truncated PGM header".into()));
    }
    Ok(&bytes[start..*pos])
}

fn parse_header_num(bytes: &[u8], pos: &mut usize, what: &str) -> Result<u32> {
    let tok = next_token(bytes, pos)?;
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad PGM {what}")))
}

pub fn encode_gray_pgm(dims: Dims, samples: &[u8], comment: Option<&str>) -> Vec<u8> {
    assert_eq!(samples.len(), dims.pixel_count());
    let mut out = Vec::with_capacity(samples.len() + 64);
    out.extend_from_slice(b"P5\n");
    if let Some(c) = comment {
        for line in c.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    let _ = write!(out, "{} {}\n255\n", dims.width, dims.height);
    out.extend_from_slice(samples);
    out
}

fn threshold(dims: Dims, samples: Vec<u8>) -> BinaryMask {
    let data = samples
        .into_iter()
        .map(|v| u8::from(v as u32 >= LESION_THRESHOLD))
        .collect();
    BinaryMask::from_raw(dims, data)
}

pub fn decode_mask(bytes: &[u8]) -> Result<BinaryMask> {
    match sniff_format(bytes) {
        Some(MaskFormat::Pgm) => {
            let (dims, samples) = decode_pgm(bytes)?;
            Ok(threshold(dims, samples))
        }
        Some(MaskFormat::Png) => {
            let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)?;
            let gray = img.into_luma8();
            let dims = Dims::new(gray.width(), gray.height());
            Ok(threshold(dims, gray.into_raw()))
        }
        None => Err(Error::Parse("unrecognized mask format (expected PGM P5 or PNG)".into())),
    }
}

pub fn encode_mask_pgm(mask: &BinaryMask, comment: Option<&str>) -> Vec<u8> {
    let samples: Vec<u8> = mask.iter().map(|l| if l { 255 } else { 0 }).collect();
    encode_gray_pgm(mask.dims(), &samples, comment)
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let path = path.as_ref();
    let bytes = read_file(path)?;
    decode_mask(&bytes).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_mask_pgm(path: impl AsRef<Path>, mask: &BinaryMask, comment: Option<&str>) -> Result<()> {
    fs::write(path, encode_mask_pgm(mask, comment))?;
    Ok(())
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path.to_path_buf())
        } else {
            Error::Io(e)
        }
    })
}
