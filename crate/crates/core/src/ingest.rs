//! CSV ingestion, per-day segmentation and box-size schemes.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Names of the CSV columns holding the date, the intraday time and the price.
#[derive(Debug, Clone)]
pub struct ColumnSpec {
    pub date: String,
    /// When absent, the date column is taken to hold a full timestamp and the
    /// day is its leading `YYYY-MM-DD`-style token (split at `' '` or `'T'`).
    pub time: Option<String>,
    pub price: String,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        ColumnSpec {
            date: "date".into(),
            time: Some("time".into()),
            price: "price".into(),
        }
    }
}

/// One parsed minute bar.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub day: String,
    pub time: String,
    pub price: f64,
    /// 1-based data row number (the header is row 0).
    pub row: usize,
}

/// One trading day's strictly positive values.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    day_id: String,
    values: Vec<f64>,
}

impl PriceSeries {
    pub fn new(day_id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let day_id = day_id.into();
        if values.len() < 2 {
            return Err(Error::InvalidSeries(format!(
                "day {day_id}: length {} < 2",
                values.len()
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::InvalidSeries(format!(
                "day {day_id}: value {v} at index {i} is not a positive finite number"
            )));
        }
        Ok(PriceSeries { day_id, values })
    }

    pub fn day_id(&self) -> &str {
        &self.day_id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same day, values multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        PriceSeries::new(
            self.day_id.clone(),
            self.values.iter().map(|v| v * factor).collect(),
        )
    }

    pub(crate) fn with_values_unchecked(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        PriceSeries {
            day_id: self.day_id.clone(),
            values,
        }
    }
}

/// Reads minute bars from a CSV file with a header row.
pub fn parse_intraday_csv(path: &Path, columns: &ColumnSpec) -> Result<Vec<Record>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_intraday_reader(file, path, columns)
}

/// Reads minute bars from any reader; `origin` is only used in diagnostics.
pub fn parse_intraday_reader<R: Read>(
    reader: R,
    origin: &Path,
    columns: &ColumnSpec,
) -> Result<Vec<Record>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr
        .headers()
        .map_err(|e| malformed(origin, 0, e.to_string()))?
        .clone();
    if headers.is_empty() {
        return Ok(Vec::new());
    }

    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn {
                path: origin.to_path_buf(),
                column: name.to_string(),
            })
    };
    let date_idx = find(&columns.date)?;
    let time_idx = columns.time.as_deref().map(find).transpose()?;
    let price_idx = find(&columns.price)?;

    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| malformed(origin, row, e.to_string()))?;
        let field = |idx: usize, name: &str| {
            rec.get(idx)
                .ok_or_else(|| malformed(origin, row, format!("missing field `{name}`")))
        };
        let date_field = field(date_idx, &columns.date)?;
        let (day, time) = match time_idx {
            Some(t) => (
                date_field.to_string(),
                field(t, columns.time.as_deref().unwrap_or_default())?.to_string(),
            ),
            None => split_timestamp(date_field),
        };
        let raw_price = field(price_idx, &columns.price)?;
        let price: f64 = raw_price
            .parse()
            .map_err(|_| malformed(origin, row, format!("price `{raw_price}` is not a number")))?;
        out.push(Record {
            day,
            time,
            price,
            row,
        });
    }
    Ok(out)
}

fn split_timestamp(ts: &str) -> (String, String) {
    match ts.split_once([' ', 'T']) {
        Some((d, t)) => (d.to_string(), t.trim().to_string()),
        None => (ts.to_string(), String::new()),
    }
}

fn malformed(origin: &Path, row: usize, reason: String) -> Error {
    Error::MalformedRow {
        path: origin.to_path_buf(),
        row,
        reason,
    }
}

/// Why a day was excluded from analysis.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum DropReason {
    /// A price was zero, negative, or not finite (first offending data row).
    NonPositive { row: usize, value: f64 },
    /// The day's length differs from the most common day length.
    LengthMismatch { length: usize, modal_length: usize },
    /// Fewer than two bars.
    TooShort { length: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroppedDay {
    pub day: String,
    #[serde(flatten)]
    pub reason: DropReason,
}

#[derive(Debug, Clone, Default)]
pub struct Segmentation {
    pub days: Vec<PriceSeries>,
    pub dropped: Vec<DroppedDay>,
    /// Length shared by every kept day; `None` when nothing survived the
    /// positivity filter.
    pub modal_length: Option<usize>,
}

/// Splits records into one series per date, in order of first appearance.
///
/// Days with a non-positive or non-finite price are dropped, then days whose
/// length differs from the modal length (ties go to the longer length).
pub fn segment_by_day(records: &[Record]) -> Segmentation {
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<&str, Vec<&Record>> = HashMap::new();
    for r in records {
        groups
            .entry(r.day.as_str())
            .or_insert_with(|| {
                order.push(r.day.clone());
                Vec::new()
            })
            .push(r);
    }

    let mut dropped = Vec::new();
    let mut candidates: Vec<(String, Vec<f64>)> = Vec::new();
    for day in order {
        let recs = &groups[day.as_str()];
        if let Some(bad) = recs
            .iter()
            .find(|r| !(r.price.is_finite() && r.price > 0.0))
        {
            dropped.push(DroppedDay {
                day,
                reason: DropReason::NonPositive {
                    row: bad.row,
                    value: bad.price,
                },
            });
            continue;
        }
        if recs.len() < 2 {
            dropped.push(DroppedDay {
                day,
                reason: DropReason::TooShort { length: recs.len() },
            });
            continue;
        }
        candidates.push((day, recs.iter().map(|r| r.price).collect()));
    }

    let modal_length = modal_length(candidates.iter().map(|(_, v)| v.len()));
    let mut days = Vec::new();
    for (day, values) in candidates {
        let modal = modal_length.expect("candidates non-empty");
        if values.len() != modal {
            dropped.push(DroppedDay {
                day,
                reason: DropReason::LengthMismatch {
                    length: values.len(),
                    modal_length: modal,
                },
            });
            continue;
        }
        days.push(PriceSeries {
            day_id: day,
            values,
        });
    }
    Segmentation {
        days,
        dropped,
        modal_length,
    }
}

fn modal_length(lengths: impl Iterator<Item = usize>) -> Option<usize> {
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for len in lengths {
        *counts.entry(len).or_default() += 1;
    }
    counts
        .into_iter()
        .max_by_key(|&(len, count)| (count, len))
        .map(|(len, _)| len)
}

/// Box sizes used to coarse-grain a series of a given length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoxScheme {
    sizes: Vec<usize>,
    series_length: usize,
}

const PRESET_240: [usize; 14] = [1, 2, 3, 4, 6, 10, 15, 20, 30, 40, 60, 80, 120, 240];
const PRESET_405: [usize; 10] = [1, 3, 5, 9, 15, 27, 45, 81, 135, 405];
const PRESET_390: [usize; 14] = [1, 2, 3, 5, 10, 13, 15, 26, 30, 39, 78, 130, 195, 390];

impl BoxScheme {
    /// Preset lists for the common session lengths 240, 405 and 390 minutes;
    /// every divisor of `len` otherwise.
    pub fn derive(len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::InvalidScheme(format!("series length {len} < 2")));
        }
        let sizes = match len {
            240 => PRESET_240.to_vec(),
            405 => PRESET_405.to_vec(),
            390 => PRESET_390.to_vec(),
            _ => divisors(len),
        };
        Ok(BoxScheme {
            sizes,
            series_length: len,
        })
    }

    /// Explicit box sizes. The list is sorted; duplicates, zeros and
    /// non-divisors of `len` are rejected.
    pub fn with_sizes(len: usize, sizes: &[usize]) -> Result<Self> {
        if len < 2 {
            return Err(Error::InvalidScheme(format!("series length {len} < 2")));
        }
        let mut sorted = sizes.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidScheme("duplicate box size".into()));
        }
        if sorted.len() < 2 {
            return Err(Error::InvalidScheme(
                "at least two box sizes are needed".into(),
            ));
        }
        if let Some(&bad) = sorted.iter().find(|&&l| l == 0 || !len.is_multiple_of(l)) {
            return Err(Error::NonDivisor { size: bad, len });
        }
        Ok(BoxScheme {
            sizes: sorted,
            series_length: len,
        })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn series_length(&self) -> usize {
        self.series_length
    }

    /// Number of boxes `T / l` for each size.
    pub fn box_counts(&self) -> impl Iterator<Item = usize> + '_ {
        self.sizes.iter().map(|&l| self.series_length / l)
    }
}

fn divisors(n: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}
