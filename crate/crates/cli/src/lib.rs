//! Command implementations behind the `segeval` binary.
//!
//! Exit codes: 0 on success, 1 for configuration and input problems (bad
//! flags, unknown ids, unreadable or inconsistent files), 2 when a measure
//! cannot be computed on otherwise valid input.

pub mod args;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use rayon::prelude::*;

use segeval::border::render_border;
use segeval::confusion::{self, confusion};
use segeval::dataset::{DatasetManifest, Diagnosis, DimsPolicy, ImageEntry, RenderOptions};
use segeval::io::write_mask_pgm;
use segeval::rand_index::{expected_pri, npri_with_expected, DatasetPairModel};
use segeval::report::{
    aggregate, csv_string, emit_table, emit_text_table, records_to_csv, Layout, Measure, MeasureRecord, StddevMode,
    TableOrder,
};
use segeval::{BinaryMask, BorderAnnotation, Dims, GroundTruthSet, ProbabilityImage, SplineMode};

use args::{
    Cli, Command, DemoArgs, EvaluateArgs, ExpectedIndexArg, NpriArgs, RenderArgs, SelectionArgs, SplineArgs, StddevArg,
    ValidateArgs,
};

#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Compute(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::Compute(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(e) | Failure::Compute(e) => write!(f, "{e:#}"),
        }
    }
}

fn config(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into())
}

fn compute(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Compute(e.into())
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

/// Runs one command. Tables go to `stdout` unless an output directory was given.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Outcome {
    match cli.command {
        Command::Validate(a) => validate(&a, stdout),
        Command::Evaluate(a) => evaluate(&a, stdout),
        Command::Npri(a) => npri(&a, stdout),
        Command::RenderBorder(a) => render(&a, stdout),
        Command::DemoCorpus(a) => demo(&a, stdout),
    }
}

fn render_options(s: &SplineArgs) -> Outcome<RenderOptions> {
    if s.spline_samples == 0 {
        return Err(config(anyhow!("--spline-samples must be at least 1")));
    }
    Ok(RenderOptions {
        samples_per_segment: s.spline_samples,
        mode: if s.interpolate_spline {
            SplineMode::Interpolating
        } else {
            SplineMode::Approximating
        },
    })
}

fn policy(p: ExpectedIndexArg) -> DimsPolicy {
    match p {
        ExpectedIndexArg::Shared => DimsPolicy::Shared,
        ExpectedIndexArg::PerDims => DimsPolicy::PerDims,
    }
}

fn stddev_mode(s: StddevArg) -> StddevMode {
    match s {
        StddevArg::Sample => StddevMode::Sample,
        StddevArg::Population => StddevMode::Population,
    }
}

fn load_manifest(path: &Path) -> Outcome<DatasetManifest> {
    DatasetManifest::load(path).map_err(|e| config(anyhow!("manifest {}: {e}", path.display())))
}

/// Requested ids in manifest order; an empty request selects everything.
fn select(kind: &str, requested: &[String], known: &[String]) -> Outcome<Vec<String>> {
    if let Some(bad) = requested.iter().find(|r| !known.contains(r)) {
        return Err(config(anyhow!(
            "unknown {kind} {bad:?}; the manifest lists {}",
            known.join(", ")
        )));
    }
    Ok(known
        .iter()
        .filter(|k| requested.is_empty() || requested.contains(k))
        .cloned()
        .collect())
}

struct Selection {
    manifest: DatasetManifest,
    raters: Vec<String>,
    methods: Vec<String>,
    render: RenderOptions,
}

impl Selection {
    fn new(a: &SelectionArgs) -> Outcome<Self> {
        let render = render_options(&a.spline)?;
        let manifest = load_manifest(&a.manifest)?;
        let raters = select("rater", &a.raters, &manifest.raters)?;
        let methods = select("method", &a.methods, &manifest.methods)?;
        Ok(Self {
            manifest,
            raters,
            methods,
            render,
        })
    }

    fn order(&self) -> TableOrder {
        TableOrder {
            raters: self.raters.clone(),
            methods: self.methods.clone(),
        }
    }

    /// Selected manual masks of one image, or `None` when it has none.
    fn ground_truths(&self, e: &ImageEntry) -> Outcome<Option<GroundTruthSet>> {
        let mut masks = Vec::new();
        let mut ids = Vec::new();
        for r in &self.raters {
            if let Some(rel) = e.ground_truths.get(r) {
                let m = self
                    .manifest
                    .load_border(rel, e.dims(), &self.render)
                    .map_err(|err| config(anyhow!("image {}, rater {r}: {err}", e.id)))?;
                masks.push(m);
                ids.push(r.clone());
            }
        }
        if masks.is_empty() {
            return Ok(None);
        }
        GroundTruthSet::new(masks, ids).map(Some).map_err(config)
    }

    fn method_masks(&self, e: &ImageEntry) -> Outcome<Vec<(String, BinaryMask)>> {
        let mut out = Vec::new();
        for m in &self.methods {
            let mask = self
                .manifest
                .load_method_mask(e, m)
                .map_err(|err| config(anyhow!("image {}, method {m}: {err}", e.id)))?;
            if let Some(mask) = mask {
                out.push((m.clone(), mask));
            }
        }
        Ok(out)
    }
}

fn thread_pool(jobs: usize) -> Outcome<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| config(anyhow!("cannot start {jobs} worker threads: {e}")))
}

fn sort_records(records: &mut [MeasureRecord]) {
    records.sort_by(|a, b| {
        (&a.image_id, &a.method_id, &a.rater_id, a.measure).cmp(&(&b.image_id, &b.method_id, &b.rater_id, b.measure))
    });
}

fn table(records: &[MeasureRecord], measure: Measure, a: &SelectionArgs, order: &TableOrder) -> Outcome<String> {
    let picked: Vec<MeasureRecord> = records.iter().filter(|r| r.measure == measure).cloned().collect();
    let layout = if measure.is_per_rater() {
        Layout::PerRater
    } else {
        Layout::Pooled
    };
    let stats = aggregate(&picked, layout, stddev_mode(a.stddev)).map_err(|e| compute(anyhow!("{measure}: {e}")))?;
    let text = if a.text && a.out.is_none() {
        emit_text_table(&stats, layout, order)
    } else {
        emit_table(&stats, layout, order)
    };
    text.map_err(compute)
}

/// Writes each named file into `out`, or prints them as titled sections.
fn emit(out: Option<&PathBuf>, files: &[(String, String)], stdout: &mut dyn Write) -> Outcome {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| config(anyhow!("{}: {e}", dir.display())))?;
            for (name, body) in files {
                let path = dir.join(name);
                fs::write(&path, body).map_err(|e| config(anyhow!("{}: {e}", path.display())))?;
                writeln!(stdout, "wrote {}", path.display()).map_err(config)?;
            }
        }
        None => {
            for (i, (name, body)) in files.iter().enumerate() {
                if i > 0 {
                    writeln!(stdout).map_err(config)?;
                }
                write!(stdout, "# {name}\n{body}").map_err(config)?;
            }
        }
    }
    Ok(())
}

fn validate(a: &ValidateArgs, stdout: &mut dyn Write) -> Outcome {
    let render = render_options(&a.spline)?;
    let manifest = load_manifest(&a.manifest)?;
    let problems = manifest.validate(&render, policy(a.expected_index));
    if !problems.is_empty() {
        let lines: Vec<String> = problems.iter().map(|p| p.to_string()).collect();
        return Err(config(anyhow!(
            "{} problem(s) found:\n{}",
            problems.len(),
            lines.join("\n")
        )));
    }
    writeln!(
        stdout,
        "ok: {} images, {} raters, {} methods",
        manifest.images.len(),
        manifest.raters.len(),
        manifest.methods.len()
    )
    .map_err(config)
}

fn parse_measures(names: &[String]) -> Outcome<Vec<Measure>> {
    let mut out: Vec<Measure> = Vec::new();
    for n in names {
        let m: Measure = n.parse().map_err(|_| {
            let known: Vec<&str> = Measure::ALL.iter().map(|m| m.name()).collect();
            config(anyhow!(
                "unknown measure {n:?}; known measures are {}",
                known.join(", ")
            ))
        })?;
        if matches!(m, Measure::Pri | Measure::ExpectedPri | Measure::Npri) {
            return Err(config(anyhow!("{m} is computed by the `npri` command")));
        }
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(config(anyhow!("no measures requested")));
    }
    Ok(out)
}

fn confusion_measure(m: Measure, c: &confusion::ConfusionCounts) -> segeval::Result<f64> {
    match m {
        Measure::Xor => confusion::xor_error(c),
        Measure::Sensitivity => confusion::sensitivity(c),
        Measure::Specificity => confusion::specificity(c),
        Measure::Precision => confusion::precision(c),
        Measure::Recall => confusion::recall(c),
        Measure::ErrorProbability => confusion::error_probability(c),
        other => unreachable!("{other} is not a confusion measure"),
    }
}

fn evaluate_image(
    sel: &Selection,
    e: &ImageEntry,
    measures: &[Measure],
    include_test: bool,
) -> Outcome<Vec<MeasureRecord>> {
    let Some(gts) = sel.ground_truths(e)? else {
        return Ok(Vec::new());
    };
    let autos = sel.method_masks(e)?;
    let record = |method: &str, rater: Option<&str>, measure, value| MeasureRecord {
        image_id: e.id.clone(),
        diagnosis: e.diagnosis,
        method_id: method.to_string(),
        rater_id: rater.map(String::from),
        measure,
        value,
    };
    let mut out = Vec::new();
    for (method, auto) in &autos {
        for (rater, manual) in gts.rater_ids().iter().zip(gts.masks()) {
            let counts = confusion(manual, auto).map_err(config)?;
            for &m in measures.iter().filter(|m| m.is_per_rater()) {
                let v = confusion_measure(m, &counts)
                    .map_err(|err| compute(anyhow!("image {}, method {method}, rater {rater}: {m}: {err}", e.id)))?;
                out.push(record(method, Some(rater), m, v));
            }
        }
        if measures.contains(&Measure::Guillod) {
            let observations = gts.masks().iter().chain(include_test.then_some(auto));
            let prob = ProbabilityImage::build(observations).map_err(compute)?;
            let v = segeval::guillod_error(&prob, auto)
                .map_err(|err| compute(anyhow!("image {}, method {method}: guillod: {err}", e.id)))?;
            out.push(record(method, None, Measure::Guillod, v));
        }
    }
    Ok(out)
}

fn evaluate(a: &EvaluateArgs, stdout: &mut dyn Write) -> Outcome {
    let measures = parse_measures(&a.measures)?;
    let sel = Selection::new(&a.selection)?;
    let pool = thread_pool(a.selection.jobs)?;
    let per_image: Vec<Vec<MeasureRecord>> = pool.install(|| {
        sel.manifest
            .images
            .par_iter()
            .map(|e| evaluate_image(&sel, e, &measures, a.guillod_include_test))
            .collect::<Outcome<_>>()
    })?;
    let mut records: Vec<MeasureRecord> = per_image.into_iter().flatten().collect();
    if records.is_empty() {
        return Err(config(anyhow!(
            "no image has both a selected ground truth and a selected method mask"
        )));
    }
    sort_records(&mut records);
    let order = sel.order();
    let mut files = Vec::new();
    for &m in &measures {
        files.push((format!("{m}.csv"), table(&records, m, &a.selection, &order)?));
    }
    files.push(("records.csv".to_string(), records_to_csv(&records).map_err(compute)?));
    emit(a.selection.out.as_ref(), &files, stdout)
}

struct LoadedImage<'a> {
    entry: &'a ImageEntry,
    gts: GroundTruthSet,
}

struct NpriRow {
    image: String,
    diagnosis: Diagnosis,
    method: String,
    dims: Dims,
    pri: f64,
    expected: f64,
    npri: f64,
}

fn npri(a: &NpriArgs, stdout: &mut dyn Write) -> Outcome {
    let sel = Selection::new(&a.selection)?;
    let pool = thread_pool(a.selection.jobs)?;
    let loaded: Vec<Option<LoadedImage>> = pool.install(|| {
        sel.manifest
            .images
            .par_iter()
            .map(|e| Ok(sel.ground_truths(e)?.map(|gts| LoadedImage { entry: e, gts })))
            .collect::<Outcome<_>>()
    })?;
    let loaded: Vec<LoadedImage> = loaded.into_iter().flatten().collect();
    if loaded.is_empty() {
        return Err(config(anyhow!("no image has a ground truth from the selected raters")));
    }

    let mut groups: BTreeMap<Dims, Vec<usize>> = BTreeMap::new();
    for (i, img) in loaded.iter().enumerate() {
        groups.entry(img.entry.dims()).or_default().push(i);
    }
    if a.expected_index == ExpectedIndexArg::Shared && groups.len() > 1 {
        let sizes: Vec<String> = groups
            .iter()
            .map(|(d, v)| format!("{d} ({} images)", v.len()))
            .collect();
        return Err(config(anyhow!(
            "a shared expected index requires identical dimensions across the corpus; found {}. \
             Rerun with --expected-index per-dims",
            sizes.join(", ")
        )));
    }
    let models: BTreeMap<Dims, DatasetPairModel> = pool.install(|| {
        groups
            .par_iter()
            .map(|(d, idx)| {
                DatasetPairModel::new(idx.iter().map(|&i| &loaded[i].gts))
                    .map(|m| (*d, m))
                    .map_err(|e| compute(anyhow!("dataset model for {d}: {e}")))
            })
            .collect::<Outcome<_>>()
    })?;

    let rows: Vec<Vec<NpriRow>> = pool.install(|| {
        loaded
            .par_iter()
            .map(|img| {
                let e = img.entry;
                let autos = sel.method_masks(e)?;
                if autos.is_empty() {
                    return Ok(Vec::new());
                }
                let model = &models[&e.dims()];
                let expected = expected_pri(e.dims(), &img.gts, model)
                    .map_err(|err| compute(anyhow!("image {}: expected index: {err}", e.id)))?;
                autos
                    .iter()
                    .map(|(method, auto)| {
                        let r = npri_with_expected(auto, &img.gts, expected)
                            .map_err(|err| compute(anyhow!("image {}, method {method}: {err}", e.id)))?;
                        Ok(NpriRow {
                            image: e.id.clone(),
                            diagnosis: e.diagnosis,
                            method: method.clone(),
                            dims: e.dims(),
                            pri: r.pri,
                            expected: r.expected,
                            npri: r.npri,
                        })
                    })
                    .collect()
            })
            .collect::<Outcome<_>>()
    })?;
    let mut rows: Vec<NpriRow> = rows.into_iter().flatten().collect();
    if rows.is_empty() {
        return Err(config(anyhow!("no image has a selected method mask")));
    }
    rows.sort_by(|a, b| (&a.image, &a.method).cmp(&(&b.image, &b.method)));

    let mut records = Vec::new();
    for r in &rows {
        for (measure, value) in [
            (Measure::Pri, r.pri),
            (Measure::ExpectedPri, r.expected),
            (Measure::Npri, r.npri),
        ] {
            records.push(MeasureRecord {
                image_id: r.image.clone(),
                diagnosis: r.diagnosis,
                method_id: r.method.clone(),
                rater_id: None,
                measure,
                value,
            });
        }
    }
    let order = sel.order();
    let header = ["image", "diagnosis", "method", "dims", "pri", "expected_pri", "npri"]
        .map(String::from)
        .to_vec();
    let detail = csv_string(std::iter::once(header).chain(rows.iter().map(|r| {
        vec![
            r.image.clone(),
            r.diagnosis.to_string(),
            r.method.clone(),
            r.dims.to_string(),
            r.pri.to_string(),
            r.expected.to_string(),
            r.npri.to_string(),
        ]
    })))
    .map_err(compute)?;
    let files = vec![
        (
            "npri.csv".to_string(),
            table(&records, Measure::Npri, &a.selection, &order)?,
        ),
        (
            "pri.csv".to_string(),
            table(&records, Measure::Pri, &a.selection, &order)?,
        ),
        ("npri_detail.csv".to_string(), detail),
    ];
    emit(a.selection.out.as_ref(), &files, stdout)
}

fn render(a: &RenderArgs, stdout: &mut dyn Write) -> Outcome {
    let opts = render_options(&a.spline)?;
    let ann = BorderAnnotation::read(&a.annotation).map_err(|e| config(anyhow!("{}: {e}", a.annotation.display())))?;
    let mask = render_border(&ann, opts.samples_per_segment, opts.mode)
        .map_err(|e| compute(anyhow!("{}: {e}", a.annotation.display())))?;
    let comment = format!(
        "rendered from {} control points, mode {}, {} samples per segment",
        ann.control_points.len(),
        opts.mode,
        opts.samples_per_segment
    );
    write_mask_pgm(&a.out, &mask, Some(&comment)).map_err(|e| config(anyhow!("{}: {e}", a.out.display())))?;
    writeln!(
        stdout,
        "wrote {} ({} lesion pixels)",
        a.out.display(),
        mask.lesion_count()
    )
    .map_err(config)
}

fn demo(a: &DemoArgs, stdout: &mut dyn Write) -> Outcome {
    if a.melanoma > a.images {
        return Err(config(anyhow!("--melanoma cannot exceed --images")));
    }
    if a.width < 16 || a.height < 16 {
        return Err(config(anyhow!("demo images must be at least 16x16")));
    }
    let spec = segeval::demo::DemoSpec {
        images: a.images,
        melanoma: a.melanoma,
        dims: Dims::new(a.width, a.height),
        seed: a.seed,
        ..Default::default()
    };
    let path = segeval::demo::write_demo_corpus(&a.out, &spec).map_err(config)?;
    writeln!(stdout, "wrote {}", path.display()).map_err(config)
}
