//! CSV export/import for experiment tables.
//!
//! Layout: one `#` comment line echoing the configuration, then the header
//! row, then one data row per recorded chunk count. Floats are written
//! with nine decimal places; blank cells are `None` columns.

use std::fmt::Write as _;
use std::path::Path;

use crate::code::KMode;
use crate::error::{Error, Result};

use super::{ExperimentMeta, ExperimentTable, Row};

pub const CSV_HEADER: &str = "C,mean_len_gen,mean_len_classic,delta_gen,delta_classic,ratio,\
theta_L_gen,theta_U_gen,theta_L_classic,theta_U_classic,baseline_len";

fn fmt_opt(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.9}")).unwrap_or_default()
}

/// Renders the table to its exact CSV byte representation.
pub fn table_to_csv_string(table: &ExperimentTable) -> String {
    let meta = &table.meta;
    let k_mode = match meta.k_mode {
        KMode::Full => "full",
        KMode::Compact => "compact",
    };
    let mut out = String::new();
    writeln!(
        out,
        "# m={}, active={}, k_mode={}, trials={}, seed={}, bases={}",
        meta.m,
        meta.active,
        k_mode,
        meta.trials,
        meta.seed,
        meta.bases.join(" ")
    )
    .expect("writing to a String cannot fail");
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &table.rows {
        writeln!(
            out,
            "{},{:.9},{:.9},{},{},{:.9},{:.9},{:.9},{:.9},{:.9},{}",
            row.c,
            row.mean_len_gen,
            row.mean_len_classic,
            fmt_opt(row.delta_gen),
            fmt_opt(row.delta_classic),
            row.ratio,
            row.theta_l_gen,
            row.theta_u_gen,
            row.theta_l_classic,
            row.theta_u_classic,
            fmt_opt(row.baseline_len),
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Writes the table to `path`, creating or replacing the file.
pub fn export_csv(table: &ExperimentTable, path: &Path) -> Result<()> {
    std::fs::write(path, table_to_csv_string(table)).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn bad(msg: String) -> Error {
    Error::InvalidContainer(msg)
}

fn parse_f64(cell: &str, line_no: usize) -> Result<f64> {
    cell.parse().map_err(|_| bad(format!("line {line_no}: bad number {cell:?}")))
}

fn parse_opt(cell: &str, line_no: usize) -> Result<Option<f64>> {
    if cell.is_empty() {
        Ok(None)
    } else {
        parse_f64(cell, line_no).map(Some)
    }
}

/// Parses a CSV produced by [`export_csv`]. Standard errors are not stored
/// in the file and come back as zero.
pub fn parse_csv(text: &str) -> Result<ExperimentTable> {
    let mut meta = None;
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            meta = Some(parse_meta(comment, line_no)?);
            continue;
        }
        if !saw_header {
            if line != CSV_HEADER {
                return Err(bad(format!("line {line_no}: unexpected header {line:?}")));
            }
            saw_header = true;
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 11 {
            return Err(bad(format!("line {line_no}: expected 11 columns, got {}", cells.len())));
        }
        rows.push(Row {
            c: cells[0].parse().map_err(|_| bad(format!("line {line_no}: bad chunk count")))?,
            mean_len_gen: parse_f64(cells[1], line_no)?,
            mean_len_classic: parse_f64(cells[2], line_no)?,
            delta_gen: parse_opt(cells[3], line_no)?,
            delta_classic: parse_opt(cells[4], line_no)?,
            ratio: parse_f64(cells[5], line_no)?,
            theta_l_gen: parse_f64(cells[6], line_no)?,
            theta_u_gen: parse_f64(cells[7], line_no)?,
            theta_l_classic: parse_f64(cells[8], line_no)?,
            theta_u_classic: parse_f64(cells[9], line_no)?,
            baseline_len: parse_opt(cells[10], line_no)?,
            se_gen: 0.0,
            se_classic: 0.0,
        });
    }
    let meta = meta.ok_or_else(|| bad("missing # configuration line".into()))?;
    if rows.is_empty() {
        return Err(bad("no data rows".into()));
    }
    Ok(ExperimentTable { meta, rows })
}

fn parse_meta(comment: &str, line_no: usize) -> Result<ExperimentMeta> {
    let mut m = None;
    let mut active = None;
    let mut k_mode = None;
    let mut trials = None;
    let mut seed = None;
    let mut bases = Vec::new();
    for field in comment.split(", ") {
        let (key, value) = field
            .trim()
            .split_once('=')
            .ok_or_else(|| bad(format!("line {line_no}: bad meta field {field:?}")))?;
        let int = || value.parse::<u64>().map_err(|_| bad(format!("line {line_no}: {key}")));
        match key {
            "m" => m = Some(int()? as u32),
            "active" => active = Some(int()?),
            "k_mode" => {
                k_mode = Some(match value {
                    "full" => KMode::Full,
                    "compact" => KMode::Compact,
                    other => return Err(bad(format!("line {line_no}: k_mode {other:?}"))),
                })
            }
            "trials" => trials = Some(int()?),
            "seed" => seed = Some(int()?),
            "bases" => bases = value.split_whitespace().map(str::to_string).collect(),
            other => return Err(bad(format!("line {line_no}: unknown meta key {other:?}"))),
        }
    }
    Ok(ExperimentMeta {
        m: m.ok_or_else(|| bad("meta missing m".into()))?,
        active: active.ok_or_else(|| bad("meta missing active".into()))?,
        k_mode: k_mode.ok_or_else(|| bad("meta missing k_mode".into()))?,
        trials: trials.ok_or_else(|| bad("meta missing trials".into()))?,
        seed: seed.ok_or_else(|| bad("meta missing seed".into()))?,
        bases,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{run_experiment, ExperimentConfig};
    use super::*;
    use crate::source::build_source;

    fn sample_table() -> ExperimentTable {
        let mut cfg = ExperimentConfig::new(build_source(3, 2, 11).unwrap(), 24, 60);
        cfg.baseline = true;
        run_experiment(&cfg).unwrap()
    }

    #[test]
    fn single_row_table_renders_header_and_one_row() {
        let cfg = ExperimentConfig::new(build_source(3, 2, 0).unwrap(), 1, 3);
        let table = run_experiment(&cfg).unwrap();
        let text = table_to_csv_string(&table);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("# m=3, active=2, k_mode=full, trials=3, seed=0, bases="));
        assert_eq!(lines[1], CSV_HEADER);
        assert!(lines[2].starts_with("1,"));
    }

    #[test]
    fn round_trip_is_faithful_to_a_nano_bit() {
        let table = sample_table();
        let parsed = parse_csv(&table_to_csv_string(&table)).unwrap();
        assert_eq!(parsed.meta, table.meta);
        assert_eq!(parsed.rows.len(), table.rows.len());
        for (a, b) in parsed.rows.iter().zip(&table.rows) {
            assert_eq!(a.c, b.c);
            assert!((a.mean_len_gen - b.mean_len_gen).abs() < 1e-9);
            assert!((a.mean_len_classic - b.mean_len_classic).abs() < 1e-9);
            assert!((a.ratio - b.ratio).abs() < 1e-9);
            assert!((a.theta_l_gen - b.theta_l_gen).abs() < 1e-9);
            assert!((a.theta_u_classic - b.theta_u_classic).abs() < 1e-9);
            match (a.baseline_len, b.baseline_len) {
                (Some(x), Some(y)) => assert!((x - y).abs() < 1e-9),
                (None, None) => {}
                _ => panic!("baseline column changed shape"),
            }
        }
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("# m=3, active=2\nC,x\n1,2\n").is_err());
        let table = sample_table();
        let good = table_to_csv_string(&table);
        let broken = good.replace("C,mean_len_gen", "C;mean_len_gen");
        assert!(parse_csv(&broken).is_err());
    }
}
