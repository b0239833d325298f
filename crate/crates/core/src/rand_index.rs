//! Probabilistic Rand index (PRI), its dataset-wide expected value, and the
//! normalized index (NPRI).
//!
//! The index is defined as a sum over all `C(N, 2)` pixel pairs. Two pixels
//! that receive the same label in the test map and in every ground truth
//! (the same *signature*) are interchangeable in that sum, so the engine
//! groups pixels into signature classes and sums over pairs of classes:
//! `C(n_a, 2)` pairs inside class `a` and `n_a * n_b` pairs between classes
//! `a` and `b`. Every pair term is scaled by the rater count so that it
//! becomes an integer, and all pair sums are accumulated exactly in `u128`
//! before a single final division.
//!
//! When a stack of label maps has too many distinct signatures for the
//! class-pair loop, the same integer totals are recovered from per-label
//! contingency counts instead; both routes agree bit for bit.
//!
//! [`pri_oracle`] is the literal pairwise definition and exists to check the
//! fast route on small inputs.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{Dims, GroundTruthSet, Labeled, Raster};

/// Above this many signature classes the class-pair loop is replaced by
/// contingency sums.
const PAIR_CLASS_LIMIT: usize = 2048;
/// Largest dense lookup table used while refining a partition.
const DENSE_REFINE_LIMIT: usize = 1 << 20;

fn choose2(n: u64) -> u128 {
    let n = n as u128;
    n * n.saturating_sub(1) / 2
}

/// Pixels grouped by equal label tuples across a stack of layers.
#[derive(Clone, Debug)]
struct Partition {
    ids: Vec<u32>,
    reps: Vec<u32>,
    counts: Vec<u64>,
}

impl Partition {
    fn trivial(n: usize) -> Self {
        assert!(n <= u32::MAX as usize, "image too large");
        Partition {
            ids: vec![0; n],
            reps: vec![0],
            counts: vec![n as u64],
        }
    }

    fn of_layers(n: usize, layers: &[&[u8]]) -> Self {
        layers
            .iter()
            .fold(Partition::trivial(n), |p, layer| p.refine(layer, 256))
    }

    fn len(&self) -> usize {
        self.counts.len()
    }

    /// Splits every class by the values of `other`, which must be `< bound`.
    fn refine<T: Copy + Into<u32>>(&self, other: &[T], bound: usize) -> Partition {
        debug_assert_eq!(self.ids.len(), other.len());
        let mut ids = Vec::with_capacity(self.ids.len());
        let mut reps = Vec::new();
        let mut counts: Vec<u64> = Vec::new();
        let mut assign = |slot: &mut u32, i: usize| -> u32 {
            if *slot == u32::MAX {
                *slot = reps.len() as u32;
                reps.push(i as u32);
                counts.push(0);
            }
            counts[*slot as usize] += 1;
            *slot
        };
        let table_len = self.len().saturating_mul(bound);
        if table_len <= DENSE_REFINE_LIMIT {
            let mut table = vec![u32::MAX; table_len];
            for (i, (&a, &b)) in self.ids.iter().zip(other).enumerate() {
                let key = a as usize * bound + b.into() as usize;
                ids.push(assign(&mut table[key], i));
            }
        } else {
            let mut table: HashMap<(u32, u32), u32> = HashMap::new();
            for (i, (&a, &b)) in self.ids.iter().zip(other).enumerate() {
                let slot = table.entry((a, b.into())).or_insert(u32::MAX);
                ids.push(assign(slot, i));
            }
        }
        Partition { ids, reps, counts }
    }

    /// Flat per-class label tuples read at each class representative.
    fn signatures(&self, layers: &[&[u8]]) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len() * layers.len());
        for &r in &self.reps {
            out.extend(layers.iter().map(|l| l[r as usize]));
        }
        out
    }
}

/// Sum of `weight(a, b)` over all unordered pixel pairs, where `a` and `b` are
/// the classes of the two pixels.
fn class_pair_sum(counts: &[u64], weight: impl Fn(usize, usize) -> u64) -> u128 {
    let mut total = 0u128;
    for (a, &na) in counts.iter().enumerate() {
        total += choose2(na) * weight(a, a) as u128;
        let na = na as u128;
        for (b, &nb) in counts.iter().enumerate().skip(a + 1) {
            total += na * nb as u128 * weight(a, b) as u128;
        }
    }
    total
}

/// Number of pixel pairs sharing a label in one layer.
fn same_pairs(layer: &[u8]) -> u128 {
    let mut hist = [0u64; 256];
    for &l in layer {
        hist[l as usize] += 1;
    }
    hist.iter().map(|&n| choose2(n)).sum()
}

/// Number of pixel pairs sharing a label in both layers at once.
fn same_pairs_joint(n: usize, mut labels: impl FnMut(usize) -> (u8, u8)) -> u128 {
    let mut hist = vec![0u64; 256 * 256];
    for i in 0..n {
        let (a, b) = labels(i);
        hist[a as usize * 256 + b as usize] += 1;
    }
    hist.iter().map(|&n| choose2(n)).sum()
}

/// Square matrix of per-class label agreement counts.
fn agreement_matrix(signatures: &[u8], arity: usize) -> Vec<u8> {
    let n = signatures.len() / arity.max(1);
    let mut out = vec![0u8; n * n];
    for a in 0..n {
        let sa = &signatures[a * arity..(a + 1) * arity];
        for b in a..n {
            let sb = &signatures[b * arity..(b + 1) * arity];
            let agree = sa.iter().zip(sb).filter(|(x, y)| x == y).count() as u8;
            out[a * n + b] = agree;
            out[b * n + a] = agree;
        }
    }
    out
}

fn check_stack<T: Labeled, G: Labeled>(test: Option<&T>, gts: &GroundTruthSet<G>) -> Result<Dims> {
    let dims = gts.dims();
    if let Some(t) = test {
        dims.ensure_eq(t.dims())?;
    }
    let n = dims.pixel_count();
    if n < 2 {
        return Err(Error::TooFewPixels(n));
    }
    Ok(dims)
}

fn gt_layers<G: Labeled>(gts: &GroundTruthSet<G>) -> Vec<&[u8]> {
    gts.masks().iter().map(Labeled::labels).collect()
}

/// Pixel counts per label signature `(test, gt_1, ..., gt_K)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignatureHistogram {
    arity: usize,
    signatures: Vec<u8>,
    counts: Vec<u64>,
}

impl SignatureHistogram {
    pub fn build<T: Labeled, G: Labeled>(test: &T, gts: &GroundTruthSet<G>) -> Result<Self> {
        gts.dims().ensure_eq(test.dims())?;
        let mut layers = vec![test.labels()];
        layers.extend(gt_layers(gts));
        Ok(Self::from_layers(&layers))
    }

    /// Histogram over the ground truths alone.
    pub fn of_ground_truths<G: Labeled>(gts: &GroundTruthSet<G>) -> Self {
        Self::from_layers(&gt_layers(gts))
    }

    fn from_layers(layers: &[&[u8]]) -> Self {
        let n = layers[0].len();
        let p = Partition::of_layers(n, layers);
        SignatureHistogram {
            arity: layers.len(),
            signatures: p.signatures(layers),
            counts: p.counts,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8], u64)> {
        self.signatures.chunks(self.arity).zip(self.counts.iter().copied())
    }

    pub fn count(&self, signature: &[u8]) -> u64 {
        self.iter().find(|(s, _)| *s == signature).map_or(0, |(_, c)| c)
    }
}

/// Fraction of ground truths that put pixels `i` and `j` in the same region.
pub fn pair_probability<G: Labeled>(gts: &GroundTruthSet<G>, i: usize, j: usize) -> Result<f64> {
    let n = gts.dims().pixel_count();
    if i >= n || j >= n || i == j {
        return Err(Error::IndexOutOfRange { i, j, n });
    }
    let agree = gts.masks().iter().filter(|m| m.labels()[i] == m.labels()[j]).count();
    Ok(agree as f64 / gts.len() as f64)
}

/// Literal pairwise evaluation over every `i < j`. Quadratic in the pixel
/// count; meant for checking [`pri_fast`] on small images.
pub fn pri_oracle<T: Labeled, G: Labeled>(test: &T, gts: &GroundTruthSet<G>) -> Result<f64> {
    let dims = check_stack(Some(test), gts)?;
    let n = dims.pixel_count();
    let t = test.labels();
    let k = gts.len() as f64;
    let layers = gt_layers(gts);
    let mut sum = NeumaierSum::default();
    for i in 0..n {
        for j in i + 1..n {
            let c = if t[i] == t[j] { 1.0 } else { 0.0 };
            let p = layers.iter().filter(|l| l[i] == l[j]).count() as f64 / k;
            sum.add(c * p + (1.0 - c) * (1.0 - p));
        }
    }
    Ok(sum.value() / choose2(n as u64) as f64)
}

#[derive(Default)]
struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Route {
    Auto,
    ClassPairs,
    Contingency,
}

/// PRI through signature classes. Matches [`pri_oracle`] to rounding.
pub fn pri_fast<T: Labeled, G: Labeled>(test: &T, gts: &GroundTruthSet<G>) -> Result<f64> {
    let (num, den) = pri_fraction(test, gts, Route::Auto)?;
    Ok(num as f64 / den as f64)
}

/// Returns the integer numerator and denominator `K * C(N, 2)`.
fn pri_fraction<T: Labeled, G: Labeled>(test: &T, gts: &GroundTruthSet<G>, route: Route) -> Result<(u128, u128)> {
    let dims = check_stack(Some(test), gts)?;
    let n = dims.pixel_count();
    let k = gts.len() as u64;
    let pairs = choose2(n as u64);
    let mut layers = vec![test.labels()];
    layers.extend(gt_layers(gts));

    let partition = match route {
        Route::Contingency => None,
        _ => Some(Partition::of_layers(n, &layers)),
    };
    let num = match partition {
        Some(p) if route == Route::ClassPairs || p.len() <= PAIR_CLASS_LIMIT => {
            let arity = layers.len();
            let sigs = p.signatures(&layers);
            class_pair_sum(&p.counts, |a, b| {
                let sa = &sigs[a * arity..(a + 1) * arity];
                let sb = &sigs[b * arity..(b + 1) * arity];
                let agree = sa[1..].iter().zip(&sb[1..]).filter(|(x, y)| x == y).count() as u64;
                if sa[0] == sb[0] {
                    agree
                } else {
                    k - agree
                }
            })
        }
        _ => {
            // per pair: K - A - K*c + 2*c*A
            let t = layers[0];
            let k = k as u128;
            let same_test = same_pairs(t);
            let mut same_gt = 0u128;
            let mut same_both = 0u128;
            for g in &layers[1..] {
                same_gt += same_pairs(g);
                same_both += same_pairs_joint(n, |i| (t[i], g[i]));
            }
            k * pairs + 2 * same_both - same_gt - k * same_test
        }
    };
    Ok((num, k as u128 * pairs))
}

/// Per-image ground-truth statistics entering the expected index.
#[derive(Clone, Debug)]
struct ImagePairStats {
    raters: u32,
    partition: Partition,
    signatures: Vec<u8>,
    agreement: Option<Vec<u8>>,
}

impl ImagePairStats {
    fn label(&self, pixel: usize, rater: usize) -> u8 {
        self.signatures[self.partition.ids[pixel] as usize * self.raters as usize + rater]
    }
}

/// Pair statistics of every ground truth in a dataset of same-sized images.
/// Immutable once built; share it across threads to score many test maps.
#[derive(Clone, Debug)]
pub struct DatasetPairModel {
    dims: Dims,
    images: Vec<ImagePairStats>,
}

impl DatasetPairModel {
    pub fn new<'a, G, I>(images: I) -> Result<Self>
    where
        G: Labeled + 'a,
        I: IntoIterator<Item = &'a GroundTruthSet<G>>,
    {
        let mut dims = None;
        let mut stats = Vec::new();
        for gts in images {
            let d = gts.dims();
            match dims {
                None => dims = Some(d),
                Some(expected) => expected.ensure_eq(d)?,
            }
            let layers = gt_layers(gts);
            let partition = Partition::of_layers(d.pixel_count(), &layers);
            let signatures = partition.signatures(&layers);
            let agreement = (partition.len() <= PAIR_CLASS_LIMIT).then(|| agreement_matrix(&signatures, layers.len()));
            stats.push(ImagePairStats {
                raters: gts.len() as u32,
                partition,
                signatures,
                agreement,
            });
        }
        let dims = dims.ok_or(Error::EmptyDataset)?;
        Ok(Self { dims, images: stats })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn image_count(&self) -> usize {
        self.images.len()
    }

    pub fn raters_per_image(&self) -> Vec<usize> {
        self.images.iter().map(|s| s.raters as usize).collect()
    }

    /// Ground-truth signature histogram of image `index`.
    pub fn histogram(&self, index: usize) -> Option<SignatureHistogram> {
        self.images.get(index).map(|s| SignatureHistogram {
            arity: s.raters as usize,
            signatures: s.signatures.clone(),
            counts: s.partition.counts.clone(),
        })
    }
}

/// Expected PRI of any segmentation of an image with ground truths `gts`,
/// where the chance that a pixel pair shares a region is estimated from every
/// ground truth in `dataset`.
pub fn expected_pri<G: Labeled>(test_dims: Dims, gts: &GroundTruthSet<G>, dataset: &DatasetPairModel) -> Result<f64> {
    expected_pri_with(test_dims, gts, dataset, Route::Auto)
}

fn expected_pri_with<G: Labeled>(
    test_dims: Dims,
    gts: &GroundTruthSet<G>,
    dataset: &DatasetPairModel,
    route: Route,
) -> Result<f64> {
    let dims = check_stack::<G, G>(None, gts)?;
    dims.ensure_eq(test_dims)?;
    dataset.dims.ensure_eq(dims)?;
    if dataset.images.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = dims.pixel_count();
    let k = gts.len() as u64;
    let pairs = choose2(n as u64);
    let layers = gt_layers(gts);
    let current = Partition::of_layers(n, &layers);
    let current_sigs = current.signatures(&layers);
    let current_agree = (current.len() <= PAIR_CLASS_LIMIT).then(|| agreement_matrix(&current_sigs, layers.len()));
    let mut same_current: Option<u128> = None;

    let mut total = 0.0;
    for img in &dataset.images {
        let kp = img.raters as u64;
        let mut num = None;
        if route != Route::Contingency {
            if let (Some(ca), Some(ia)) = (&current_agree, &img.agreement) {
                let joint = current.refine(&img.partition.ids, img.partition.len());
                if route == Route::ClassPairs || joint.len() <= PAIR_CLASS_LIMIT {
                    let (cn, inn) = (current.len(), img.partition.len());
                    let left: Vec<usize> = joint.reps.iter().map(|&r| current.ids[r as usize] as usize).collect();
                    let right: Vec<usize> = joint
                        .reps
                        .iter()
                        .map(|&r| img.partition.ids[r as usize] as usize)
                        .collect();
                    num = Some(class_pair_sum(&joint.counts, |a, b| {
                        let agree = ca[left[a] * cn + left[b]] as u64;
                        let agree_img = ia[right[a] * inn + right[b]] as u64;
                        agree_img * agree + (kp - agree_img) * (k - agree)
                    }));
                }
            }
        }
        let num = num.unwrap_or_else(|| {
            // per pair: K'K - K'A - KA' + 2A'A
            let same_cur = *same_current.get_or_insert_with(|| layers.iter().map(|l| same_pairs(l)).sum());
            let mut same_img = 0u128;
            let mut same_both = 0u128;
            for j in 0..img.raters as usize {
                same_img += same_pairs_joint(n, |i| (img.label(i, j), 0));
                for l in &layers {
                    same_both += same_pairs_joint(n, |i| (img.label(i, j), l[i]));
                }
            }
            let (kp, k) = (kp as u128, k as u128);
            kp * k * pairs + 2 * same_both - kp * same_cur - k * same_img
        });
        total += num as f64 / (kp as u128 * k as u128 * pairs) as f64;
    }
    Ok(total / dataset.images.len() as f64)
}

/// Index, expected index and normalized index of one test map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriResult {
    pub pri: f64,
    pub expected: f64,
    pub npri: f64,
    pub pair_count: u128,
}

/// Expected indices this close to 1 leave nothing to normalize by.
pub const DEGENERATE_EXPECTED: f64 = 1.0 - 1e-12;

/// `(index - expected) / (1 - expected)`, with the maximum index taken as 1.
pub fn normalized_index(pri: f64, expected: f64) -> Result<f64> {
    if expected >= DEGENERATE_EXPECTED {
        return Err(Error::DegenerateNormalization { expected });
    }
    Ok((pri - expected) / (1.0 - expected))
}

pub fn npri<T: Labeled, G: Labeled>(
    test: &T,
    gts: &GroundTruthSet<G>,
    dataset: &DatasetPairModel,
) -> Result<PriResult> {
    let expected = expected_pri(test.dims(), gts, dataset)?;
    npri_with_expected(test, gts, expected)
}

/// Same as [`npri`] with the expected index already computed, for scoring
/// several test maps of one image.
pub fn npri_with_expected<T: Labeled, G: Labeled>(
    test: &T,
    gts: &GroundTruthSet<G>,
    expected: f64,
) -> Result<PriResult> {
    let pri = pri_fast(test, gts)?;
    let npri = normalized_index(pri, expected)?;
    Ok(PriResult {
        pri,
        expected,
        npri,
        pair_count: choose2(gts.dims().pixel_count() as u64),
    })
}
