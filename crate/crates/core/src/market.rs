//! Market data layer: price ingestion, log returns, realized volatility,
//! seasonal bins, announcement alignment and realized correlation.
//!
//! All timestamps are UTC. Returns are log returns in percent
//! (`100 * ln(p_t / p_{t-1})`). A trading day is split into 288
//! five-minute bins; a return timestamped `t` covers the window ending
//! at `t`.

use chrono::{DateTime, Duration, TimeZone, Timelike, Utc};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

/// Number of 5-minute bins in a 24-hour day.
pub const SEASONAL_BINS: usize = 288;

#[derive(Debug, Error)]
pub enum MarketError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },
    #[error("timestamps not strictly increasing at line {line}")]
    Ordering { line: u64 },
    #[error("non-positive price at index {index}")]
    NonPositivePrice { index: usize },
    #[error("{msg}")]
    Grid { msg: String },
    #[error("realized-volatility window ending {window} is missing minutes")]
    Gap { window: String },
    #[error("series misaligned: {msg}")]
    Alignment { msg: String },
    #[error("invalid configuration: {msg}")]
    Config { msg: String },
    #[error("need at least {required} observations, got {got}")]
    Length { required: usize, got: usize },
    #[error("duplicate design entry at row {row}, column {col}")]
    DuplicateEntry { row: usize, col: usize },
}

/// One close price on a 1- or 5-minute grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceBar {
    pub timestamp: DateTime<Utc>,
    pub close: f64,
}

/// Log returns in percent on a fixed intraday grid.
///
/// Timestamps within a session step by `grid_step` minutes; larger jumps
/// mark session boundaries (weekends, holidays).
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub timestamps: Vec<DateTime<Utc>>,
    pub values: Vec<f64>,
    /// Grid step in minutes (1 or 5).
    pub grid_step: u32,
}

impl ReturnSeries {
    pub fn new(
        timestamps: Vec<DateTime<Utc>>,
        values: Vec<f64>,
        grid_step: u32,
    ) -> Result<Self, MarketError> {
        if timestamps.len() != values.len() {
            return Err(MarketError::Alignment {
                msg: format!(
                    "{} timestamps vs {} values",
                    timestamps.len(),
                    values.len()
                ),
            });
        }
        if grid_step != 1 && grid_step != 5 {
            return Err(MarketError::Grid {
                msg: format!("unsupported grid step {grid_step} min (expected 1 or 5)"),
            });
        }
        Ok(Self {
            timestamps,
            values,
            grid_step,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Realized volatility (percent) on the 5-minute grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RVSeries {
    pub timestamps: Vec<DateTime<Utc>>,
    pub values: Vec<f64>,
}

/// One scheduled macroeconomic release.
#[derive(Debug, Clone, PartialEq)]
pub struct CalendarEntry {
    pub event_id: String,
    pub name: String,
    pub country: String,
    pub release: DateTime<Utc>,
}

/// Announcement calendar. Releases need not lie on the return grid.
#[derive(Debug, Clone, Default)]
pub struct EventCalendar {
    pub entries: Vec<CalendarEntry>,
}

impl EventCalendar {
    /// Distinct event ids in order of first appearance.
    pub fn event_ids(&self) -> Vec<String> {
        let mut seen = HashMap::new();
        let mut ids = Vec::new();
        for e in &self.entries {
            if seen.insert(e.event_id.clone(), ()).is_none() {
                ids.push(e.event_id.clone());
            }
        }
        ids
    }
}

/// Identifies a design column: an event and one of its lags (1-based).
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ColumnLabel {
    pub event_id: String,
    pub lag: usize,
}

/// Sparse T x M indicator matrix of announcement lags.
///
/// Every stored entry has implicit value 1; at most one entry per
/// (row, column). Adjacency is indexed both ways so the sampler can walk
/// rows of a column and columns of a row without scanning.
#[derive(Debug, Clone)]
pub struct EventDesignMatrix {
    n_rows: usize,
    column_labels: Vec<ColumnLabel>,
    entries: Vec<(u32, u32)>, // sorted by (row, col)
    row_ptr: Vec<u32>,
    row_cols: Vec<u32>,
    col_ptr: Vec<u32>,
    col_rows: Vec<u32>,
}

impl EventDesignMatrix {
    pub fn new(
        n_rows: usize,
        column_labels: Vec<ColumnLabel>,
        mut entries: Vec<(u32, u32)>,
    ) -> Result<Self, MarketError> {
        let n_cols = column_labels.len();
        entries.sort_unstable();
        for w in entries.windows(2) {
            if w[0] == w[1] {
                return Err(MarketError::DuplicateEntry {
                    row: w[0].0 as usize,
                    col: w[0].1 as usize,
                });
            }
        }
        for &(r, c) in &entries {
            if r as usize >= n_rows || c as usize >= n_cols {
                return Err(MarketError::Config {
                    msg: format!(
                        "design entry ({r}, {c}) outside {n_rows} x {n_cols}"
                    ),
                });
            }
        }

        let mut row_ptr = vec![0u32; n_rows + 1];
        let mut col_ptr = vec![0u32; n_cols + 1];
        for &(r, c) in &entries {
            row_ptr[r as usize + 1] += 1;
            col_ptr[c as usize + 1] += 1;
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        for j in 0..n_cols {
            col_ptr[j + 1] += col_ptr[j];
        }
        // entries are row-sorted already
        let row_cols: Vec<u32> = entries.iter().map(|&(_, c)| c).collect();
        let mut col_rows = vec![0u32; entries.len()];
        let mut fill = col_ptr.clone();
        for &(r, c) in &entries {
            let slot = fill[c as usize] as usize;
            col_rows[slot] = r;
            fill[c as usize] += 1;
        }

        Ok(Self {
            n_rows,
            column_labels,
            entries,
            row_ptr,
            row_cols,
            col_ptr,
            col_rows,
        })
    }

    /// Matrix with the given row count and no columns.
    pub fn empty(n_rows: usize) -> Self {
        Self::new(n_rows, Vec::new(), Vec::new()).expect("empty design is valid")
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.column_labels.len()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn nonzeros(&self) -> &[(u32, u32)] {
        &self.entries
    }

    pub fn column_labels(&self) -> &[ColumnLabel] {
        &self.column_labels
    }

    /// Active columns of row `t`.
    pub fn cols_of_row(&self, t: usize) -> &[u32] {
        let lo = self.row_ptr[t] as usize;
        let hi = self.row_ptr[t + 1] as usize;
        &self.row_cols[lo..hi]
    }

    /// Rows where column `j` is active.
    pub fn rows_of_col(&self, j: usize) -> &[u32] {
        let lo = self.col_ptr[j] as usize;
        let hi = self.col_ptr[j + 1] as usize;
        &self.col_rows[lo..hi]
    }
}

/// Column layout of a price CSV.
#[derive(Debug, Clone)]
pub struct PriceCsvFormat {
    pub timestamp_col: String,
    pub close_col: String,
}

impl Default for PriceCsvFormat {
    fn default() -> Self {
        Self {
            timestamp_col: "timestamp".into(),
            close_col: "close".into(),
        }
    }
}

/// Parses an ISO-8601 UTC timestamp, accepting `2017-01-03T00:05:00Z`
/// and the space-separated `2017-01-03 00:05:00` form.
pub fn parse_timestamp(s: &str) -> Result<DateTime<Utc>, String> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Ok(dt.with_timezone(&Utc));
    }
    if let Ok(naive) = chrono::NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S") {
        return Ok(Utc.from_utc_datetime(&naive));
    }
    Err(format!("unrecognized timestamp {s:?}"))
}

/// Formats a timestamp the way every CSV in this crate stores it.
pub fn format_timestamp(ts: DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn csv_line(record: &csv::StringRecord, fallback: u64) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(fallback)
}

/// Loads `timestamp,close` price bars, rejecting unordered or duplicated
/// timestamps and non-positive prices.
pub fn load_prices(
    path: impl AsRef<Path>,
    format: &PriceCsvFormat,
) -> Result<Vec<PriceBar>, MarketError> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| io_error(path, e))?;
    let headers = reader
        .headers()
        .map_err(|e| io_error(path, e))?
        .clone();
    let ts_idx = header_index(&headers, &format.timestamp_col)?;
    let close_idx = header_index(&headers, &format.close_col)?;

    let mut bars = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| io_error(path, e))?;
        let line = csv_line(&record, bars.len() as u64 + 2);
        let ts_str = record.get(ts_idx).ok_or(MarketError::Parse {
            line,
            msg: "missing timestamp field".into(),
        })?;
        let timestamp = parse_timestamp(ts_str).map_err(|msg| MarketError::Parse { line, msg })?;
        let close_str = record.get(close_idx).ok_or(MarketError::Parse {
            line,
            msg: "missing close field".into(),
        })?;
        let close: f64 = close_str.trim().parse().map_err(|_| MarketError::Parse {
            line,
            msg: format!("bad close {close_str:?}"),
        })?;
        if !close.is_finite() || close <= 0.0 {
            return Err(MarketError::Parse {
                line,
                msg: format!("non-positive close {close}"),
            });
        }
        if let Some(last) = bars.last() {
            let last: &PriceBar = last;
            if timestamp <= last.timestamp {
                return Err(MarketError::Ordering { line });
            }
        }
        bars.push(PriceBar { timestamp, close });
    }
    Ok(bars)
}

/// Loads `event_id,name,country,release` calendar rows.
pub fn load_calendar(path: impl AsRef<Path>) -> Result<EventCalendar, MarketError> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| io_error(path, e))?;
    let headers = reader.headers().map_err(|e| io_error(path, e))?.clone();
    let id_idx = header_index(&headers, "event_id")?;
    let name_idx = header_index(&headers, "name")?;
    let country_idx = header_index(&headers, "country")?;
    let release_idx = header_index(&headers, "release")?;

    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| io_error(path, e))?;
        let line = csv_line(&record, entries.len() as u64 + 2);
        let get = |idx: usize, what: &str| {
            record
                .get(idx)
                .map(str::to_owned)
                .ok_or_else(|| MarketError::Parse {
                    line,
                    msg: format!("missing {what} field"),
                })
        };
        let release_str = get(release_idx, "release")?;
        let release =
            parse_timestamp(&release_str).map_err(|msg| MarketError::Parse { line, msg })?;
        entries.push(CalendarEntry {
            event_id: get(id_idx, "event_id")?,
            name: get(name_idx, "name")?,
            country: get(country_idx, "country")?,
            release,
        });
    }
    Ok(EventCalendar { entries })
}

fn io_error(path: &Path, e: impl Into<Box<dyn std::error::Error + Send + Sync>>) -> MarketError {
    MarketError::Io {
        path: path.display().to_string(),
        source: std::io::Error::new(std::io::ErrorKind::Other, e.into()),
    }
}

fn header_index(headers: &csv::StringRecord, name: &str) -> Result<usize, MarketError> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| MarketError::Parse {
            line: 1,
            msg: format!("missing column {name:?}"),
        })
}

/// Log returns in percent from consecutive closes. The grid step is
/// inferred from the smallest timestamp gap and must be 1 or 5 minutes.
pub fn compute_log_returns(prices: &[PriceBar]) -> Result<ReturnSeries, MarketError> {
    if prices.len() < 2 {
        return Err(MarketError::Length {
            required: 2,
            got: prices.len(),
        });
    }
    let mut min_gap: Option<i64> = None;
    for w in prices.windows(2) {
        let gap = (w[1].timestamp - w[0].timestamp).num_seconds();
        if gap <= 0 {
            return Err(MarketError::Ordering { line: 0 });
        }
        min_gap = Some(min_gap.map_or(gap, |g| g.min(gap)));
    }
    let step_secs = min_gap.expect("at least one gap");
    let grid_step = match step_secs {
        60 => 1,
        300 => 5,
        other => {
            return Err(MarketError::Grid {
                msg: format!("inferred grid step {other}s is neither 1 nor 5 minutes"),
            })
        }
    };

    let mut timestamps = Vec::with_capacity(prices.len() - 1);
    let mut values = Vec::with_capacity(prices.len() - 1);
    for (i, w) in prices.windows(2).enumerate() {
        if w[0].close <= 0.0 {
            return Err(MarketError::NonPositivePrice { index: i });
        }
        if w[1].close <= 0.0 {
            return Err(MarketError::NonPositivePrice { index: i + 1 });
        }
        timestamps.push(w[1].timestamp);
        values.push(100.0 * (w[1].close.ln() - w[0].close.ln()));
    }
    ReturnSeries::new(timestamps, values, grid_step)
}

/// 5-minute realized volatility from 1-minute returns:
/// `RV_t = sqrt(sum of the five squared returns ending at t)`.
///
/// Windows must align to the 5-minute grid. A window that is only
/// partially covered is an error; windows with no data (session gaps)
/// are skipped.
pub fn compute_realized_volatility(one_min: &ReturnSeries) -> Result<RVSeries, MarketError> {
    if one_min.grid_step != 1 {
        return Err(MarketError::Grid {
            msg: format!(
                "realized volatility needs 1-minute returns, got {}-minute grid",
                one_min.grid_step
            ),
        });
    }

    // window end for a 1-minute return at ts: next multiple of 5 minutes >= ts
    let mut windows: HashMap<i64, (u32, f64)> = HashMap::new();
    for (ts, r) in one_min.timestamps.iter().zip(&one_min.values) {
        if ts.second() != 0 || ts.nanosecond() != 0 {
            return Err(MarketError::Grid {
                msg: format!("timestamp {} is not minute-aligned", format_timestamp(*ts)),
            });
        }
        let secs = ts.timestamp();
        let end = secs + (300 - secs.rem_euclid(300)) % 300;
        let slot = windows.entry(end).or_insert((0, 0.0));
        slot.0 += 1;
        slot.1 += r * r;
    }

    let mut ends: Vec<i64> = windows.keys().copied().collect();
    ends.sort_unstable();
    let mut timestamps = Vec::with_capacity(ends.len());
    let mut values = Vec::with_capacity(ends.len());
    for end in ends {
        let (count, sum_sq) = windows[&end];
        let ts = Utc.timestamp_opt(end, 0).unwrap();
        if count != 5 {
            return Err(MarketError::Gap {
                window: format_timestamp(ts),
            });
        }
        timestamps.push(ts);
        values.push(sum_sq.sqrt());
    }
    Ok(RVSeries { timestamps, values })
}

/// Maps a 5-minute-grid timestamp to its intraday bin in `0..288`.
pub fn seasonal_index(ts: DateTime<Utc>) -> Result<usize, MarketError> {
    if ts.second() != 0 || ts.nanosecond() != 0 || ts.minute() % 5 != 0 {
        return Err(MarketError::Grid {
            msg: format!(
                "timestamp {} is not on the 5-minute grid",
                format_timestamp(ts)
            ),
        });
    }
    Ok((ts.hour() as usize * 60 + ts.minute() as usize) / 5)
}

/// Result of aligning a calendar onto a return grid.
#[derive(Debug, Clone)]
pub struct AlignmentOutcome {
    pub matrix: EventDesignMatrix,
    /// Releases falling after the last grid point.
    pub dropped_releases: usize,
    /// Lag indicators dropped because the lag window crossed a session
    /// gap or ran past the end of the sample.
    pub truncated_lags: usize,
}

/// Builds the sparse announcement design matrix.
///
/// Each release maps to the first grid timestamp at or after it; lag
/// `l` (1-based) marks column `(event, l)` at that grid index plus
/// `l - 1`. Lag windows never cross a session gap. Columns number
/// `distinct events x n_lags` regardless of how many releases land in
/// the sample.
pub fn align_events(
    calendar: &EventCalendar,
    grid: &[DateTime<Utc>],
    n_lags: usize,
) -> Result<AlignmentOutcome, MarketError> {
    if n_lags == 0 {
        return Err(MarketError::Config {
            msg: "n_lags must be at least 1".into(),
        });
    }
    if grid.is_empty() {
        return Err(MarketError::Config {
            msg: "empty return grid".into(),
        });
    }
    let step = grid_step_of(grid);

    let ids = calendar.event_ids();
    let id_index: HashMap<&str, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let mut column_labels = Vec::with_capacity(ids.len() * n_lags);
    for id in &ids {
        for lag in 1..=n_lags {
            column_labels.push(ColumnLabel {
                event_id: id.clone(),
                lag,
            });
        }
    }

    let mut entries: Vec<(u32, u32)> = Vec::new();
    let mut dropped_releases = 0usize;
    let mut truncated_lags = 0usize;
    for entry in &calendar.entries {
        let idx = grid.partition_point(|&ts| ts < entry.release);
        if idx >= grid.len() {
            dropped_releases += 1;
            log::debug!(
                "release {} of {} falls after the sample end",
                format_timestamp(entry.release),
                entry.event_id
            );
            continue;
        }
        let event = id_index[entry.event_id.as_str()];
        for lag in 0..n_lags {
            let row = idx + lag;
            let contiguous = row < grid.len()
                && (lag == 0 || grid[row] - grid[row - 1] == step);
            if !contiguous {
                truncated_lags += n_lags - lag;
                log::debug!(
                    "release {} of {}: dropped lags {}..={} at a session gap or sample end",
                    format_timestamp(entry.release),
                    entry.event_id,
                    lag + 1,
                    n_lags
                );
                break;
            }
            entries.push((row as u32, (event * n_lags + lag) as u32));
        }
    }
    // repeated releases on the same grid point collapse to one indicator
    entries.sort_unstable();
    entries.dedup();

    let matrix = EventDesignMatrix::new(grid.len(), column_labels, entries)?;
    if dropped_releases > 0 || truncated_lags > 0 {
        log::info!(
            "event alignment dropped {dropped_releases} off-sample releases, truncated {truncated_lags} lag indicators"
        );
    }
    Ok(AlignmentOutcome {
        matrix,
        dropped_releases,
        truncated_lags,
    })
}

fn grid_step_of(grid: &[DateTime<Utc>]) -> Duration {
    let mut step = Duration::minutes(5);
    for w in grid.windows(2) {
        let d = w[1] - w[0];
        if d > Duration::zero() && d < step {
            step = d;
        }
    }
    step
}

/// Sample correlation of the 1-minute return pairs in the window
/// `(window_end - window_minutes, window_end]`. A window with no
/// variation on either side returns 0 by convention.
pub fn realized_correlation(
    a: &ReturnSeries,
    b: &ReturnSeries,
    window_end: DateTime<Utc>,
    window_minutes: u32,
) -> Result<f64, MarketError> {
    let mut pa = Vec::with_capacity(window_minutes as usize);
    let mut pb = Vec::with_capacity(window_minutes as usize);
    for k in 0..window_minutes {
        let ts = window_end - Duration::minutes(k as i64);
        let va = lookup(a, ts);
        let vb = lookup(b, ts);
        match (va, vb) {
            (Some(x), Some(y)) => {
                pa.push(x);
                pb.push(y);
            }
            _ => {
                return Err(MarketError::Alignment {
                    msg: format!(
                        "minute {} missing from one of the series",
                        format_timestamp(ts)
                    ),
                })
            }
        }
    }
    Ok(pearson(&pa, &pb))
}

/// Trailing realized correlation for every allocation timestamp.
///
/// For an allocation at `t` the window holds the `window_minutes`
/// 1-minute pairs ending at `t - grid_step` (the previous 5-minute
/// window). Windows with missing minutes or no variation yield 0.
pub fn realized_correlation_series(
    a: &ReturnSeries,
    b: &ReturnSeries,
    allocation_grid: &[DateTime<Utc>],
    grid_step_minutes: u32,
    window_minutes: u32,
) -> Vec<f64> {
    allocation_grid
        .iter()
        .map(|&t| {
            let end = t - Duration::minutes(grid_step_minutes as i64);
            realized_correlation(a, b, end, window_minutes).unwrap_or(0.0)
        })
        .collect()
}

fn lookup(series: &ReturnSeries, ts: DateTime<Utc>) -> Option<f64> {
    series
        .timestamps
        .binary_search(&ts)
        .ok()
        .map(|i| series.values[i])
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    let mut sab = 0.0;
    for (x, y) in a.iter().zip(b) {
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
        sab += (x - ma) * (y - mb);
    }
    if saa <= 1e-300 || sbb <= 1e-300 {
        return 0.0;
    }
    (sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0)
}

/// Writes a `timestamp,value` series CSV.
pub fn write_series_csv(
    path: impl AsRef<Path>,
    timestamps: &[DateTime<Utc>],
    values: &[f64],
) -> Result<(), MarketError> {
    let path = path.as_ref();
    let mut out = String::from("timestamp,value\n");
    for (ts, v) in timestamps.iter().zip(values) {
        writeln!(out, "{},{}", format_timestamp(*ts), fmt_full(*v)).expect("write to string");
    }
    std::fs::write(path, out).map_err(|e| io_error(path, e))
}

/// Reads a `timestamp,value` series CSV.
pub fn read_series_csv(
    path: impl AsRef<Path>,
) -> Result<(Vec<DateTime<Utc>>, Vec<f64>), MarketError> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| io_error(path, e))?;
    let headers = reader.headers().map_err(|e| io_error(path, e))?.clone();
    let ts_idx = header_index(&headers, "timestamp")?;
    let val_idx = headers
        .iter()
        .position(|h| h.trim() == "value")
        .unwrap_or(if ts_idx == 0 { 1 } else { 0 });

    let mut timestamps = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| io_error(path, e))?;
        let line = csv_line(&record, timestamps.len() as u64 + 2);
        let ts = parse_timestamp(record.get(ts_idx).unwrap_or_default())
            .map_err(|msg| MarketError::Parse { line, msg })?;
        let v: f64 = record
            .get(val_idx)
            .unwrap_or_default()
            .trim()
            .parse()
            .map_err(|_| MarketError::Parse {
                line,
                msg: "bad value".into(),
            })?;
        if let Some(&last) = timestamps.last() {
            if ts <= last {
                return Err(MarketError::Ordering { line });
            }
        }
        timestamps.push(ts);
        values.push(v);
    }
    Ok((timestamps, values))
}

/// Reads a `timestamp,value` return series, inferring the grid step.
pub fn read_returns_csv(path: impl AsRef<Path>) -> Result<ReturnSeries, MarketError> {
    let (timestamps, values) = read_series_csv(&path)?;
    if timestamps.len() < 2 {
        return Err(MarketError::Length {
            required: 2,
            got: timestamps.len(),
        });
    }
    let mut min_gap = i64::MAX;
    for w in timestamps.windows(2) {
        min_gap = min_gap.min((w[1] - w[0]).num_seconds());
    }
    let grid_step = match min_gap {
        60 => 1,
        300 => 5,
        other => {
            return Err(MarketError::Grid {
                msg: format!("inferred grid step {other}s is neither 1 nor 5 minutes"),
            })
        }
    };
    ReturnSeries::new(timestamps, values, grid_step)
}

/// Exports the design matrix as sparse triplets `row,col,label`.
pub fn write_design_csv(
    design: &EventDesignMatrix,
    path: impl AsRef<Path>,
) -> Result<(), MarketError> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    writer
        .write_record(["row", "col", "label"])
        .map_err(|e| io_error(path, e))?;
    for &(r, c) in design.nonzeros() {
        let label = &design.column_labels()[c as usize];
        writer
            .write_record([
                r.to_string(),
                c.to_string(),
                format!("{}:{}", label.event_id, label.lag),
            ])
            .map_err(|e| io_error(path, e))?;
    }
    writer.flush().map_err(|e| io_error(path, e))
}

pub(crate) fn fmt_full(v: f64) -> String {
    // shortest representation that round-trips
    format!("{v}")
}
