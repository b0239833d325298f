//! Grouped `mean (stddev)` tables: one column per method, one row per
//! diagnosis group (optionally nested under rater).
//!
//! Standard deviations use the sample (n − 1) divisor by default; pass
//! [`StddevMode::Population`] for the n divisor. The choice moves the second
//! decimal on small groups, so tables should say which one was used.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::Diagnosis;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Xor,
    Sensitivity,
    Specificity,
    Precision,
    Recall,
    ErrorProbability,
    Guillod,
    Pri,
    ExpectedPri,
    Npri,
}

impl Measure {
    pub const ALL: [Measure; 10] = [
        Measure::Xor,
        Measure::Sensitivity,
        Measure::Specificity,
        Measure::Precision,
        Measure::Recall,
        Measure::ErrorProbability,
        Measure::Guillod,
        Measure::Pri,
        Measure::ExpectedPri,
        Measure::Npri,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Xor => "xor",
            Measure::Sensitivity => "sensitivity",
            Measure::Specificity => "specificity",
            Measure::Precision => "precision",
            Measure::Recall => "recall",
            Measure::ErrorProbability => "error_probability",
            Measure::Guillod => "guillod",
            Measure::Pri => "pri",
            Measure::ExpectedPri => "expected_pri",
            Measure::Npri => "npri",
        }
    }

    /// Measures computed against one manual border at a time.
    pub fn is_per_rater(self) -> bool {
        matches!(
            self,
            Measure::Xor
                | Measure::Sensitivity
                | Measure::Specificity
                | Measure::Precision
                | Measure::Recall
                | Measure::ErrorProbability
        )
    }

    pub fn orientation(self) -> Orientation {
        match self {
            Measure::Xor | Measure::ErrorProbability | Measure::Guillod => Orientation::LowerIsBetter,
            _ => Orientation::HigherIsBetter,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown measure {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    LowerIsBetter,
    HigherIsBetter,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StddevMode {
    #[default]
    Sample,
    Population,
}

impl FromStr for StddevMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sample" => Ok(StddevMode::Sample),
            "population" => Ok(StddevMode::Population),
            other => Err(Error::Parse(format!("unknown stddev mode {other:?}"))),
        }
    }
}

/// Diagnosis row of a table; `All` pools both diagnoses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    Benign,
    Melanoma,
    All,
}

impl Group {
    pub fn label(self) -> &'static str {
        match self {
            Group::Benign => "Benign",
            Group::Melanoma => "Melanoma",
            Group::All => "All",
        }
    }
}

impl From<Diagnosis> for Group {
    fn from(d: Diagnosis) -> Self {
        match d {
            Diagnosis::Benign => Group::Benign,
            Diagnosis::Melanoma => Group::Melanoma,
        }
    }
}

/// One per-image measure value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureRecord {
    pub image_id: String,
    pub diagnosis: Diagnosis,
    pub method_id: String,
    pub rater_id: Option<String>,
    pub measure: Measure,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// Rows keyed by (rater, diagnosis).
    PerRater,
    /// Rows keyed by diagnosis only.
    Pooled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupStat {
    pub measure: Measure,
    pub method_id: String,
    pub rater_id: Option<String>,
    pub group: Group,
    pub mean: f64,
    pub stddev: f64,
    pub n: usize,
}

type GroupKey = (Measure, String, Option<String>, Group);

pub fn aggregate(records: &[MeasureRecord], layout: Layout, mode: StddevMode) -> Result<Vec<GroupStat>> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut groups: BTreeMap<GroupKey, Vec<f64>> = BTreeMap::new();
    for r in records {
        if !r.value.is_finite() {
            return Err(Error::Parse(format!(
                "non-finite {} value for image {} / method {}",
                r.measure, r.image_id, r.method_id
            )));
        }
        let rater = match layout {
            Layout::PerRater => r.rater_id.clone(),
            Layout::Pooled => None,
        };
        for g in [Group::from(r.diagnosis), Group::All] {
            groups
                .entry((r.measure, r.method_id.clone(), rater.clone(), g))
                .or_default()
                .push(r.value);
        }
    }
    Ok(groups
        .into_iter()
        .map(|((measure, method_id, rater_id, group), values)| {
            let n = values.len();
            let (mean, stddev) = mean_stddev(values, mode);
            GroupStat {
                measure,
                method_id,
                rater_id,
                group,
                mean,
                stddev,
                n,
            }
        })
        .collect())
}

/// Values are sorted first so the result does not depend on input order.
fn mean_stddev(mut values: Vec<f64>, mode: StddevMode) -> (f64, f64) {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let (lo, hi) = (values[0], values[values.len() - 1]);
    let mean = (values.iter().sum::<f64>() / n).clamp(lo, hi);
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let div = match mode {
        StddevMode::Sample => n - 1.0,
        StddevMode::Population => n,
    };
    (mean, (ss / div).sqrt())
}

/// Fixed three decimals. Ties on the exact binary value round to even.
pub fn format_fixed3(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

pub fn format_cell(stat: &GroupStat) -> String {
    format!("{} ({})", format_fixed3(stat.mean), format_fixed3(stat.stddev))
}

/// Rows as CSV text, quoting only where needed.
pub fn csv_string(rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Row and column order for [`emit_table`]. Empty lists fall back to sorted
/// order of the ids present in the stats.
#[derive(Clone, Debug, Default)]
pub struct TableOrder {
    pub raters: Vec<String>,
    pub methods: Vec<String>,
}

/// Row key: (rater, diagnosis group).
pub type RowKey = (Option<String>, Group);

struct Table<'a> {
    methods: Vec<String>,
    rows: Vec<RowKey>,
    cells: BTreeMap<(RowKey, &'a str), &'a GroupStat>,
}

fn tabulate<'a>(stats: &'a [GroupStat], layout: Layout, order: &TableOrder) -> Result<Table<'a>> {
    let first = stats
        .first()
        .ok_or_else(|| Error::LayoutMismatch("no statistics to tabulate".into()))?;
    if let Some(s) = stats.iter().find(|s| s.measure != first.measure) {
        return Err(Error::LayoutMismatch(format!(
            "one table holds one measure, found {} and {}",
            first.measure, s.measure
        )));
    }
    let per_rater = layout == Layout::PerRater;
    if let Some(s) = stats.iter().find(|s| s.rater_id.is_some() != per_rater) {
        return Err(Error::LayoutMismatch(format!(
            "{:?} layout given a statistic {} rater for method {}",
            layout,
            if s.rater_id.is_some() { "with" } else { "without" },
            s.method_id
        )));
    }
    let ordered = |given: &[String], present: BTreeSet<&str>| -> Vec<String> {
        let mut out: Vec<String> = given.iter().filter(|g| present.contains(g.as_str())).cloned().collect();
        out.extend(
            present
                .into_iter()
                .filter(|p| !given.iter().any(|g| g == p))
                .map(String::from),
        );
        out
    };
    let methods = ordered(&order.methods, stats.iter().map(|s| s.method_id.as_str()).collect());
    let raters: Vec<Option<String>> = if per_rater {
        ordered(
            &order.raters,
            stats.iter().filter_map(|s| s.rater_id.as_deref()).collect(),
        )
        .into_iter()
        .map(Some)
        .collect()
    } else {
        vec![None]
    };
    let groups: BTreeSet<Group> = stats.iter().map(|s| s.group).collect();
    let rows = raters
        .iter()
        .flat_map(|r| groups.iter().map(move |g| (r.clone(), *g)))
        .collect();
    let cells = stats
        .iter()
        .map(|s| (((s.rater_id.clone(), s.group), s.method_id.as_str()), s))
        .collect();
    Ok(Table { methods, rows, cells })
}

/// CSV with a header row, one data row per (rater?, diagnosis) and one
/// `mean (stddev)` column per method.
pub fn emit_table(stats: &[GroupStat], layout: Layout, order: &TableOrder) -> Result<String> {
    let t = tabulate(stats, layout, order)?;
    let mut header: Vec<String> = match layout {
        Layout::PerRater => vec!["rater".into(), "diagnosis".into()],
        Layout::Pooled => vec!["diagnosis".into()],
    };
    header.extend(t.methods.iter().cloned());
    let rows = t.rows.iter().map(|row| {
        let mut fields: Vec<String> = row.0.iter().cloned().collect();
        fields.push(row.1.label().to_string());
        for m in &t.methods {
            fields.push(
                t.cells
                    .get(&(row.clone(), m.as_str()))
                    .map(|s| format_cell(s))
                    .unwrap_or_default(),
            );
        }
        fields
    });
    csv_string(std::iter::once(header).chain(rows))
}

/// Column-aligned plain text rendering of the same table, for terminals.
pub fn emit_text_table(stats: &[GroupStat], layout: Layout, order: &TableOrder) -> Result<String> {
    let t = tabulate(stats, layout, order)?;
    let best = best_per_row(stats, stats[0].measure.orientation());
    let mut grid: Vec<Vec<String>> = Vec::new();
    let mut header: Vec<String> = match layout {
        Layout::PerRater => vec!["Rater".into(), "Diagnosis".into()],
        Layout::Pooled => vec!["Diagnosis".into()],
    };
    header.extend(t.methods.iter().cloned());
    grid.push(header);
    for row in &t.rows {
        let mut line = Vec::new();
        if let Some(r) = &row.0 {
            line.push(r.clone());
        }
        line.push(row.1.label().to_string());
        let winners = best.get(row);
        for m in &t.methods {
            let cell = t
                .cells
                .get(&(row.clone(), m.as_str()))
                .map(|s| format_cell(s))
                .unwrap_or_default();
            let star = winners.is_some_and(|w| w.contains(m));
            line.push(if star { format!("*{cell}") } else { cell });
        }
        grid.push(line);
    }
    let cols = grid[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| grid.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for line in grid {
        let padded: Vec<String> = line
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:>w$}", w = w))
            .collect();
        out.push_str(padded.join("  ").trim_end());
        out.push('\n');
    }
    Ok(out)
}

/// The method(s) with the best mean in each row. Means that print the same
/// at three decimals count as tied.
pub fn best_per_row(stats: &[GroupStat], orientation: Orientation) -> BTreeMap<RowKey, Vec<String>> {
    let mut rows: BTreeMap<RowKey, Vec<(&str, f64)>> = BTreeMap::new();
    for s in stats {
        let shown: f64 = format_fixed3(s.mean).parse().unwrap_or(s.mean);
        rows.entry((s.rater_id.clone(), s.group))
            .or_default()
            .push((s.method_id.as_str(), shown));
    }
    rows.into_iter()
        .map(|(key, cands)| {
            let pick = |a: f64, b: f64| match orientation {
                Orientation::LowerIsBetter => a.min(b),
                Orientation::HigherIsBetter => a.max(b),
            };
            let best = cands.iter().map(|c| c.1).reduce(pick).unwrap_or(f64::NAN);
            let mut winners: Vec<String> = cands.iter().filter(|c| c.1 == best).map(|c| c.0.to_string()).collect();
            winners.sort();
            (key, winners)
        })
        .collect()
}

/// Per-image records as CSV, sorted by (image, method, rater, measure).
pub fn records_to_csv(records: &[MeasureRecord]) -> Result<String> {
    let mut sorted: Vec<&MeasureRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.image_id, &a.method_id, &a.rater_id, a.measure).cmp(&(&b.image_id, &b.method_id, &b.rater_id, b.measure))
    });
    let header = ["image", "diagnosis", "method", "rater", "measure", "value"]
        .map(String::from)
        .to_vec();
    let rows = sorted.into_iter().map(|r| {
        vec![
            r.image_id.clone(),
            r.diagnosis.to_string(),
            r.method_id.clone(),
            r.rater_id.clone().unwrap_or_default(),
            r.measure.to_string(),
            r.value.to_string(),
        ]
    });
    csv_string(std::iter::once(header).chain(rows))
}
