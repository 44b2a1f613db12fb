//! File formats.
//!
//! - SINR raster: a short text header followed by one row of cells per
//!   line, six decimals, rows in increasing y.
//! - Bitrate table: CSV `sinr_db,efficiency`.
//! - Traces: CSV `vehicle_id,unix_timestamp_s,x_m,y_m`, header optional.
//! - Dataset dump: CSV `vehicle_id,y,x0..x{d-1}` under a size comment.
//! - Bid log, per-round metrics and the key-value summary.
//!
//! Floats that must survive a round trip are written with Rust's shortest
//! exact representation.

use std::io::{self, BufRead, Write};

use thiserror::Error;
use vremfl_core::fl::LsDataset;
use vremfl_core::mobility::{TraceFix, Trajectory};
use vremfl_core::rem::{BitrateTable, GridSpec, RemKind, SinrGrid};
use vremfl_core::scheduler::Policy;
use vremfl_core::sim::{ExperimentMetrics, RoundRecord};
use vremfl_core::Point;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },
    #[error("{0}")]
    Invalid(String),
}

impl From<csv::Error> for FormatError {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map_or(0, |p| p.line());
        match e.into_kind() {
            csv::ErrorKind::Io(io) => FormatError::Io(io),
            kind => FormatError::Parse { line, msg: format!("{kind:?}") },
        }
    }
}

fn parse_err(line: u64, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

const RASTER_MAGIC: &str = "# vremfl sinr raster";

pub fn write_raster<W: Write>(mut w: W, rem: &SinrGrid) -> io::Result<()> {
    let s = rem.spec();
    let kind = match rem.kind() {
        RemKind::GroundTruth => "ground_truth",
        RemKind::Estimated => "estimated",
    };
    writeln!(w, "{RASTER_MAGIC}")?;
    writeln!(w, "kind {kind}")?;
    writeln!(w, "origin {:.6} {:.6}", s.origin.x, s.origin.y)?;
    writeln!(w, "cell_size {:.6}", s.cell_size)?;
    writeln!(w, "size {} {}", s.width, s.height)?;
    for iy in 0..s.height {
        let row: Vec<String> = (0..s.width).map(|ix| format!("{:.6}", rem.cell(ix, iy))).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn read_raster<R: BufRead>(r: R) -> Result<SinrGrid, FormatError> {
    let mut lines = r.lines().enumerate().map(|(i, l)| (i as u64 + 1, l));
    let mut next = |what: &str| -> Result<(u64, String), FormatError> {
        match lines.next() {
            Some((n, l)) => Ok((n, l?)),
            None => Err(FormatError::Invalid(format!("raster ends before {what}"))),
        }
    };
    let (n, magic) = next("the header")?;
    if magic.trim() != RASTER_MAGIC {
        return Err(parse_err(n, "not a vremfl SINR raster"));
    }
    let field = |(n, line): (u64, String), key: &str, count: usize| -> Result<(u64, Vec<String>), FormatError> {
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(parse_err(n, format!("expected '{key}'")));
        }
        let vals: Vec<String> = parts.map(str::to_owned).collect();
        if vals.len() != count {
            return Err(parse_err(n, format!("'{key}' takes {count} value(s)")));
        }
        Ok((n, vals))
    };
    let num = |n: u64, s: &str| s.parse::<f64>().map_err(|_| parse_err(n, format!("bad number '{s}'")));
    let int = |n: u64, s: &str| s.parse::<usize>().map_err(|_| parse_err(n, format!("bad size '{s}'")));

    let (n, k) = field(next("kind")?, "kind", 1)?;
    let kind = match k[0].as_str() {
        "ground_truth" => RemKind::GroundTruth,
        "estimated" => RemKind::Estimated,
        other => return Err(parse_err(n, format!("unknown kind '{other}'"))),
    };
    let (n, o) = field(next("origin")?, "origin", 2)?;
    let origin = Point::new(num(n, &o[0])?, num(n, &o[1])?);
    let (n, c) = field(next("cell_size")?, "cell_size", 1)?;
    let cell_size = num(n, &c[0])?;
    let (n, sz) = field(next("size")?, "size", 2)?;
    let (width, height) = (int(n, &sz[0])?, int(n, &sz[1])?);
    let spec = GridSpec::new(origin, cell_size, width, height).map_err(|e| parse_err(n, e.to_string()))?;

    let mut values = Vec::with_capacity(spec.n_cells());
    for _ in 0..height {
        let (n, line) = next("the last row")?;
        let row: Vec<f64> = line.split_whitespace().map(|s| num(n, s)).collect::<Result<_, _>>()?;
        if row.len() != width {
            return Err(parse_err(n, format!("expected {width} cells, found {}", row.len())));
        }
        values.extend(row);
    }
    for (n, extra) in lines {
        if !extra?.trim().is_empty() {
            return Err(parse_err(n, "data after the last row"));
        }
    }
    SinrGrid::new(spec, kind, values).map_err(|e| FormatError::Invalid(e.to_string()))
}

pub fn write_bitrate_table<W: Write>(w: W, table: &BitrateTable) -> Result<(), FormatError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["sinr_db", "efficiency"])?;
    for (s, e) in table.breakpoints() {
        out.write_record([s.to_string(), e.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads `sinr_db,efficiency` rows; a header line and `#` comments are
/// allowed.
pub fn read_bitrate_table<R: io::Read>(r: R) -> Result<BitrateTable, FormatError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).trim(csv::Trim::All).from_reader(r);
    let mut bp = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 2 {
            return Err(parse_err(line, format!("expected 2 columns, found {}", rec.len())));
        }
        let (a, b) = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
        match (a, b) {
            (Ok(s), Ok(e)) => bp.push((s, e)),
            _ if i == 0 => continue,
            _ => return Err(parse_err(line, "expected two numbers")),
        }
    }
    BitrateTable::new(bp).map_err(|e| FormatError::Invalid(e.to_string()))
}

/// Reads GPS fixes. The first line is taken as a header when its first
/// field is not an integer.
pub fn read_traces<R: io::Read>(r: R) -> Result<Vec<TraceFix>, FormatError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).trim(csv::Trim::All).from_reader(r);
    let mut fixes = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if i == 0 && rec.get(0).is_some_and(|f| f.parse::<u32>().is_err()) {
            continue;
        }
        if rec.len() != 4 {
            return Err(parse_err(line, format!("expected 4 columns, found {}", rec.len())));
        }
        let vehicle_id = rec[0].parse::<u32>().map_err(|_| parse_err(line, format!("bad vehicle id '{}'", &rec[0])))?;
        let mut f = [0.0; 3];
        for (k, name) in ["timestamp", "x", "y"].iter().enumerate() {
            f[k] = rec[k + 1]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("bad {name} '{}'", &rec[k + 1])))?;
        }
        fixes.push(TraceFix { vehicle_id, time_s: f[0], position: Point::new(f[1], f[2]) });
    }
    Ok(fixes)
}

/// One fix per slot per vehicle, timestamped `t0_s + slot * slot_s`.
pub fn write_traces<W: Write>(w: W, trajectories: &[Trajectory], slot_s: f64, t0_s: f64) -> Result<(), FormatError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["vehicle_id", "unix_timestamp_s", "x_m", "y_m"])?;
    for t in trajectories {
        for (k, p) in t.positions().iter().enumerate() {
            let time = t0_s + (t.start_slot + k as u64) as f64 * slot_s;
            out.write_record([t.vehicle_id.to_string(), time.to_string(), p.x.to_string(), p.y.to_string()])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_dataset<W: Write>(mut w: W, datasets: &[&LsDataset]) -> Result<(), FormatError> {
    let total: usize = datasets.iter().map(|d| d.n_samples()).sum();
    let dim = datasets.first().map_or(0, |d| d.dim());
    writeln!(w, "# n={} S={} dim={}", datasets.len(), total, dim)?;
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["vehicle_id".to_string(), "y".to_string()];
    header.extend((0..dim).map(|j| format!("x{j}")));
    out.write_record(&header)?;
    for d in datasets {
        let (x, y) = (d.features(), d.responses());
        for i in 0..d.n_samples() {
            let mut row = vec![d.vehicle_id.to_string(), y[i].to_string()];
            row.extend((0..dim).map(|j| x[(i, j)].to_string()));
            out.write_record(&row)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Inverse of [`write_dataset`]; rows of one vehicle must be contiguous.
pub fn read_dataset<R: io::Read>(r: R) -> Result<Vec<LsDataset>, FormatError> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let mut out = Vec::new();
    let mut cur: Option<(u32, Vec<f64>, Vec<f64>)> = None;
    let mut dim = None;
    let finish = |c: (u32, Vec<f64>, Vec<f64>), dim: usize, out: &mut Vec<LsDataset>| -> Result<(), FormatError> {
        let (id, x, y) = c;
        let n = y.len();
        let ds = LsDataset::new(
            id,
            vremfl_core::fl::DMatrix::from_row_slice(n, dim, &x),
            vremfl_core::fl::DVector::from_vec(y),
        )
        .map_err(|e| FormatError::Invalid(e.to_string()))?;
        out.push(ds);
        Ok(())
    };
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let d = *dim.get_or_insert(rec.len().saturating_sub(2));
        let vals: Vec<f64> = rec
            .iter()
            .skip(1)
            .map(|s| s.parse::<f64>().map_err(|_| parse_err(line, format!("bad number '{s}'"))))
            .collect::<Result<_, _>>()?;
        let id = rec[0].parse::<u32>().map_err(|_| parse_err(line, format!("bad vehicle id '{}'", &rec[0])))?;
        if cur.as_ref().is_some_and(|c| c.0 != id) {
            finish(cur.take().unwrap(), d, &mut out)?;
        }
        let c = cur.get_or_insert_with(|| (id, Vec::new(), Vec::new()));
        c.2.push(vals[0]);
        c.1.extend_from_slice(&vals[1..]);
    }
    if let (Some(c), Some(d)) = (cur, dim) {
        finish(c, d, &mut out)?;
    }
    Ok(out)
}

fn opt_num<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

/// One row per (round, active vehicle).
pub fn write_bids<W: Write>(w: W, records: &[RoundRecord]) -> Result<(), FormatError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "round",
        "vehicle_id",
        "scheduled",
        "feasible",
        "cost",
        "h_v",
        "t_cpu",
        "idle_len",
        "tx_start",
        "t_tx",
        "latency_s",
    ])?;
    for r in records {
        for b in &r.bids {
            let a = b.allocation;
            let scheduled = r.scheduled.binary_search(&b.vehicle_id).is_ok();
            out.write_record([
                r.round.to_string(),
                b.vehicle_id.to_string(),
                (scheduled as u8).to_string(),
                (b.is_feasible() as u8).to_string(),
                b.cost.to_string(),
                b.h_v.to_string(),
                opt_num(a.map(|a| a.t_cpu)),
                opt_num(a.map(|a| a.idle_len)),
                opt_num(a.map(|a| a.tx_start)),
                opt_num(a.map(|a| a.t_tx)),
                opt_num(a.map(|a| a.latency)),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub const METRICS_HEADER: [&str; 8] =
    ["t", "wall_start_s", "wall_end_s", "n_scheduled", "n_delivered", "tx_slots", "gd_steps", "dist_sq"];

fn metric_fields(r: &RoundRecord) -> [String; 8] {
    [
        r.round.to_string(),
        r.wall_start_s.to_string(),
        r.wall_end_s.to_string(),
        r.n_scheduled().to_string(),
        r.n_delivered().to_string(),
        r.tx_slots().to_string(),
        r.gd_steps().to_string(),
        r.dist_sq.to_string(),
    ]
}

/// One row per round.
pub fn write_metrics<W: Write>(w: W, records: &[RoundRecord]) -> Result<(), FormatError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(METRICS_HEADER)?;
    for r in records {
        out.write_record(metric_fields(r))?;
    }
    out.flush()?;
    Ok(())
}

/// Aggregates of one run as `key = value` lines.
pub fn summary(m: &ExperimentMetrics, policy: Policy, seed: u64) -> String {
    let tx_rate = m.tx_rate().map_or_else(|_| "undefined".to_string(), |r| r.to_string());
    let lines = [
        ("policy", policy.name().to_string()),
        ("seed", seed.to_string()),
        ("rounds", m.records.len().to_string()),
        ("total_latency_s", m.total_latency_s().to_string()),
        ("total_tx_slots", m.total_tx_slots().to_string()),
        ("total_gd_steps", m.total_gd_steps().to_string()),
        ("initial_dist_sq", m.initial_dist_sq.to_string()),
        ("final_dist_sq", m.final_dist_sq().to_string()),
        ("tx_rate", tx_rate),
    ];
    lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

/// Parses `key = value` lines.
pub fn parse_summary(text: &str) -> Result<Vec<(String, String)>, FormatError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split_once(" = ")
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| parse_err(i as u64 + 1, "expected 'key = value'"))
        })
        .collect()
}

/// One labelled run in a combined sweep file.
pub struct Labelled<'a> {
    pub value: &'a str,
    pub seed: u64,
    pub metrics: &'a ExperimentMetrics,
}

/// Per-round series of every run: `<axis>,seed,` then the metrics columns.
pub fn write_series<W: Write>(w: W, axis: &str, runs: &[Labelled<'_>]) -> Result<(), FormatError> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec![axis, "seed"];
    header.extend(METRICS_HEADER);
    out.write_record(&header)?;
    for run in runs {
        for r in &run.metrics.records {
            let mut row = vec![run.value.to_string(), run.seed.to_string()];
            row.extend(metric_fields(r));
            out.write_record(&row)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub const TOTALS_HEADER: [&str; 6] =
    ["total_latency_s", "total_tx_slots", "total_gd_steps", "initial_dist_sq", "final_dist_sq", "tx_rate"];

/// One row per run with the experiment aggregates.
pub fn write_totals<W: Write>(w: W, axis: &str, runs: &[Labelled<'_>]) -> Result<(), FormatError> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec![axis, "seed"];
    header.extend(TOTALS_HEADER);
    out.write_record(&header)?;
    for run in runs {
        let m = run.metrics;
        out.write_record([
            run.value.to_string(),
            run.seed.to_string(),
            m.total_latency_s().to_string(),
            m.total_tx_slots().to_string(),
            m.total_gd_steps().to_string(),
            m.initial_dist_sq.to_string(),
            m.final_dist_sq().to_string(),
            m.tx_rate().map_or_else(|_| String::new(), |r| r.to_string()),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Median over seeds of each aggregate, one row per axis value in first-seen
/// order.
pub fn write_medians<W: Write>(w: W, axis: &str, runs: &[Labelled<'_>]) -> Result<(), FormatError> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec![axis, "seeds"];
    header.extend(TOTALS_HEADER.iter().copied());
    out.write_record(&header)?;
    let mut order: Vec<&str> = Vec::new();
    for r in runs {
        if !order.contains(&r.value) {
            order.push(r.value);
        }
    }
    for v in order {
        let group: Vec<&ExperimentMetrics> = runs.iter().filter(|r| r.value == v).map(|r| r.metrics).collect();
        let med = |f: &dyn Fn(&ExperimentMetrics) -> f64| median(group.iter().map(|m| f(m)).collect());
        let rates: Vec<f64> = group.iter().filter_map(|m| m.tx_rate().ok()).collect();
        out.write_record([
            v.to_string(),
            group.len().to_string(),
            med(&|m| m.total_latency_s()).to_string(),
            med(&|m| m.total_tx_slots() as f64).to_string(),
            med(&|m| m.total_gd_steps() as f64).to_string(),
            med(&|m| m.initial_dist_sq).to_string(),
            med(&|m| m.final_dist_sq()).to_string(),
            if rates.is_empty() { String::new() } else { median(rates).to_string() },
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(Point::new(5.0, -10.0), 10.0, 3, 2).unwrap()
    }

    #[test]
    fn raster_layout_is_row_major_in_y() {
        let rem = SinrGrid::new(grid(), RemKind::Estimated, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.25]).unwrap();
        let mut buf = Vec::new();
        write_raster(&mut buf, &rem).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "# vremfl sinr raster\nkind estimated\norigin 5.000000 -10.000000\ncell_size 10.000000\nsize 3 2\n\
             1.000000 2.000000 3.000000\n4.000000 5.000000 6.250000\n"
        );
        assert_eq!(read_raster(text.as_bytes()).unwrap(), rem);
    }

    #[test]
    fn raster_errors_carry_line_numbers() {
        let text = "# vremfl sinr raster\nkind estimated\norigin 0 0\ncell_size 10\nsize 2 2\n1 2\n3 x\n";
        match read_raster(text.as_bytes()) {
            Err(FormatError::Parse { line: 7, .. }) => {}
            other => panic!("{other:?}"),
        }
        let short = "# vremfl sinr raster\nkind estimated\norigin 0 0\ncell_size 10\nsize 2 2\n1 2 3\n";
        assert!(matches!(read_raster(short.as_bytes()), Err(FormatError::Parse { line: 6, .. })));
        assert!(read_raster("hello\n".as_bytes()).is_err());
    }

    #[test]
    fn traces_accept_optional_header() {
        let with = "vehicle_id,unix_timestamp_s,x_m,y_m\n3,100,1.5,2\n3,101,2.5,2\n";
        let without = "3,100,1.5,2\n3,101,2.5,2\n";
        let a = read_traces(with.as_bytes()).unwrap();
        assert_eq!(a, read_traces(without.as_bytes()).unwrap());
        assert_eq!(a[1], TraceFix { vehicle_id: 3, time_s: 101.0, position: Point::new(2.5, 2.0) });
    }

    #[test]
    fn trace_errors_name_the_line() {
        let bad = "vehicle_id,unix_timestamp_s,x_m,y_m\n3,100,1.5,2\n3,abc,2.5,2\n";
        match read_traces(bad.as_bytes()) {
            Err(FormatError::Parse { line: 3, msg }) => assert!(msg.contains("timestamp"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let short = "3,100,1.5\n";
        assert!(matches!(read_traces(short.as_bytes()), Err(FormatError::Parse { line: 1, .. })));
        let nan = "1,5,NaN,0\n";
        assert!(matches!(read_traces(nan.as_bytes()), Err(FormatError::Parse { line: 1, .. })));
    }

    #[test]
    fn bitrate_table_round_trips() {
        let t = BitrateTable::default();
        let mut buf = Vec::new();
        write_bitrate_table(&mut buf, &t).unwrap();
        assert_eq!(read_bitrate_table(buf.as_slice()).unwrap(), t);
        let hand = "# spectral efficiency\n-5,0\n0, 0.75\n20,4.5\n";
        let h = read_bitrate_table(hand.as_bytes()).unwrap();
        assert_eq!(h.breakpoints(), &[(-5.0, 0.0), (0.0, 0.75), (20.0, 4.5)]);
        assert!(read_bitrate_table("0,1\n-1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn summary_parses_back() {
        let text = "policy = vremfl\nseed = 2\ntx_rate = undefined\n";
        let kv = parse_summary(text).unwrap();
        assert_eq!(kv[2], ("tx_rate".to_string(), "undefined".to_string()));
        assert!(parse_summary("nonsense\n").is_err());
    }

    #[test]
    fn median_of_even_count_is_midpoint() {
        assert_eq!(median(vec![4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(vec![5.0, 1.0, 3.0]), 3.0);
    }
}
