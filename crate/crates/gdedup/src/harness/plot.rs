//! Minimal self-contained SVG charts for experiment tables.
//!
//! Three charts per table: cumulative length vs chunk count, per-chunk
//! increment vs chunk count, and generalization ratio vs chunk count, each
//! with its analytical envelope. The x axis is log2-scaled. Data series
//! are `<polyline>` elements (one per enabled series); axes, grid, and
//! reference levels use `<line>` so series can be counted structurally.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::ExperimentTable;

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

struct Series {
    label: &'static str,
    color: &'static str,
    dashed: bool,
    points: Vec<(f64, f64)>,
}

struct Chart {
    title: String,
    y_label: &'static str,
    series: Vec<Series>,
    /// Horizontal reference levels, drawn as faint lines.
    levels: Vec<(f64, &'static str)>,
}

impl Chart {
    fn render(&self) -> String {
        let xs: Vec<f64> =
            self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
        let ys: Vec<f64> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1))
            .chain(self.levels.iter().map(|l| l.0))
            .collect();
        let (x_min, x_max) = min_max(&xs);
        let (mut y_min, mut y_max) = min_max(&ys);
        if y_max - y_min < 1e-12 {
            y_min -= 0.5;
            y_max += 0.5;
        }
        let pad = (y_max - y_min) * 0.06;
        let (y_min, y_max) = (y_min - pad, y_max + pad);
        let (lx_min, lx_max) = (x_min.log2(), x_max.log2().max(x_min.log2() + 1e-9));

        let to_x = |c: f64| {
            MARGIN_LEFT + (c.log2() - lx_min) / (lx_max - lx_min) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
        };
        let to_y = |v: f64| {
            HEIGHT - MARGIN_BOTTOM
                - (v - y_min) / (y_max - y_min) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
        };

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            xml_escape(&self.title)
        );

        // Axes.
        let x0 = MARGIN_LEFT;
        let x1 = WIDTH - MARGIN_RIGHT;
        let y0 = HEIGHT - MARGIN_BOTTOM;
        let y1 = MARGIN_TOP;
        let _ = writeln!(
            svg,
            r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#
        );

        // Power-of-two x ticks.
        let mut exp = lx_min.ceil() as i64;
        while (exp as f64) <= lx_max {
            let c = 2f64.powi(exp as i32);
            let px = to_x(c);
            let _ = writeln!(
                svg,
                r#"<line x1="{px}" y1="{y0}" x2="{px}" y2="{}" stroke="black"/>"#,
                y0 + 5.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{px}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
                y0 + 18.0,
                c as u64
            );
            exp += ((lx_max - lx_min) / 10.0).ceil().max(1.0) as i64;
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">chunks</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 18.0
        );

        // Y ticks.
        for i in 0..=5 {
            let v = y_min + (y_max - y_min) * f64::from(i) / 5.0;
            let py = to_y(v);
            let _ = writeln!(
                svg,
                r#"<line x1="{}" y1="{py}" x2="{x0}" y2="{py}" stroke="black"/>"#,
                x0 - 5.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{v:.1}</text>"#,
                x0 - 8.0,
                py + 4.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="20" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            self.y_label
        );

        for (value, label) in &self.levels {
            let py = to_y(*value);
            let _ = writeln!(
                svg,
                r##"<line x1="{x0}" y1="{py}" x2="{x1}" y2="{py}" stroke="#bbbbbb" stroke-dasharray="2,4"/>"##
            );
            let _ = writeln!(
                svg,
                r##"<text x="{}" y="{}" font-family="sans-serif" font-size="10" fill="#888888">{}</text>"##,
                x1 - 80.0,
                py - 4.0,
                xml_escape(label)
            );
        }

        for series in &self.series {
            let mut points = String::new();
            for (c, v) in &series.points {
                let _ = write!(points, "{:.2},{:.2} ", to_x(*c), to_y(*v));
            }
            let dash = if series.dashed { r#" stroke-dasharray="6,4""# } else { "" };
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{}"{dash} stroke-width="1.5" points="{}"/>"#,
                series.color,
                points.trim_end()
            );
        }

        // Legend.
        for (i, series) in self.series.iter().enumerate() {
            let ly = MARGIN_TOP + 14.0 * i as f64;
            let _ = writeln!(
                svg,
                r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}"{} stroke-width="2"/>"#,
                MARGIN_LEFT + 12.0,
                MARGIN_LEFT + 40.0,
                series.color,
                if series.dashed { r#" stroke-dasharray="6,4""# } else { "" }
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>"#,
                MARGIN_LEFT + 46.0,
                ly + 4.0,
                xml_escape(series.label)
            );
        }

        svg.push_str("</svg>\n");
        svg
    }
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    })
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn series(
    label: &'static str,
    color: &'static str,
    dashed: bool,
    points: Vec<(f64, f64)>,
) -> Option<Series> {
    (!points.is_empty()).then_some(Series { label, color, dashed, points })
}

/// Renders the three charts as `<prefix>_length.svg`, `<prefix>_delta.svg`,
/// and `<prefix>_ratio.svg`, returning the written paths.
pub fn emit_plot(table: &ExperimentTable, prefix: &Path) -> Result<Vec<PathBuf>> {
    if table.rows.is_empty() {
        return Err(Error::InvalidParams("cannot plot an empty table"));
    }
    let rows = &table.rows;
    let collect = |f: &dyn Fn(&super::Row) -> Option<f64>| -> Vec<(f64, f64)> {
        rows.iter().filter_map(|r| f(r).map(|v| (r.c as f64, v))).collect()
    };

    let h_z = (table.meta.active as f64 * 2f64.powi(table.meta.m as i32)).log2();

    let length = Chart {
        title: format!(
            "Coded length, m={}, |X|={}, {} trials",
            table.meta.m, table.meta.active, table.meta.trials
        ),
        y_label: "bits",
        series: [
            series("generalized (mean)", "#1f77b4", false, collect(&|r| Some(r.mean_len_gen))),
            series("classic (mean)", "#d62728", false, collect(&|r| Some(r.mean_len_classic))),
            series("DEFLATE", "#2ca02c", false, collect(&|r| r.baseline_len)),
            series("generalized bounds (lower)", "#1f77b4", true, collect(&|r| Some(r.theta_l_gen))),
            series("generalized bounds (upper)", "#1f77b4", true, collect(&|r| Some(r.theta_u_gen))),
            series("classic bounds (lower)", "#d62728", true, collect(&|r| Some(r.theta_l_classic))),
            series("classic bounds (upper)", "#d62728", true, collect(&|r| Some(r.theta_u_classic))),
        ]
        .into_iter()
        .flatten()
        .collect(),
        levels: vec![],
    };

    let delta_baseline: Vec<(f64, f64)> = rows
        .windows(2)
        .filter_map(|w| {
            let (a, b) = (&w[0], &w[1]);
            match (a.baseline_len, b.baseline_len) {
                (Some(x), Some(y)) if b.c == a.c + 1 => Some((b.c as f64, y - x)),
                _ => None,
            }
        })
        .collect();
    let delta = Chart {
        title: format!(
            "Bits per additional chunk, m={}, |X|={}",
            table.meta.m, table.meta.active
        ),
        y_label: "bits per chunk",
        series: [
            series("generalized", "#1f77b4", false, collect(&|r| r.delta_gen)),
            series("classic", "#d62728", false, collect(&|r| r.delta_classic)),
            series("DEFLATE", "#2ca02c", false, delta_baseline),
        ]
        .into_iter()
        .flatten()
        .collect(),
        levels: vec![
            (h_z + 1.0, "H(Z)+1"),
            (h_z + 2.0, "H(Z)+2"),
            (h_z + 3.0, "H(Z)+3"),
        ],
    };

    let ratio = Chart {
        title: format!(
            "Generalization ratio, m={}, |X|={}",
            table.meta.m, table.meta.active
        ),
        y_label: "classic / generalized",
        series: [
            series("ratio", "#9467bd", false, collect(&|r| Some(r.ratio))),
            series(
                "envelope (lower)",
                "#9467bd",
                true,
                collect(&|r| Some(r.theta_l_classic / r.theta_u_gen)),
            ),
            series(
                "envelope (upper)",
                "#9467bd",
                true,
                collect(&|r| Some(r.theta_u_classic / r.theta_l_gen)),
            ),
        ]
        .into_iter()
        .flatten()
        .collect(),
        levels: vec![(1.0, "break-even")],
    };

    let mut written = Vec::with_capacity(3);
    for (suffix, chart) in [("length", &length), ("delta", &delta), ("ratio", &ratio)] {
        let mut path = prefix.as_os_str().to_owned();
        path.push(format!("_{suffix}.svg"));
        let path = PathBuf::from(path);
        std::fs::write(&path, chart.render()).map_err(|e| {
            Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
        })?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::super::{run_experiment, ExperimentConfig};
    use super::*;
    use crate::source::build_source;

    /// Tiny well-formedness scanner: every tag closes, one root element,
    /// quoted attributes balanced within each tag.
    fn assert_well_formed_xml(text: &str) {
        let mut stack: Vec<String> = Vec::new();
        let mut roots = 0;
        let mut rest = text;
        while let Some(open) = rest.find('<') {
            let tail = &rest[open + 1..];
            let close = tail.find('>').expect("unterminated tag");
            let tag = &tail[..close];
            assert_eq!(tag.matches('"').count() % 2, 0, "unbalanced quotes in <{tag}>");
            if let Some(name) = tag.strip_prefix('/') {
                let top = stack.pop().unwrap_or_else(|| panic!("stray </{name}>"));
                assert_eq!(top, name, "mismatched closing tag");
                if stack.is_empty() {
                    roots += 1;
                }
            } else if !tag.ends_with('/') {
                let name: String =
                    tag.chars().take_while(|c| !c.is_whitespace()).collect();
                stack.push(name);
            } else if stack.is_empty() {
                roots += 1;
            }
            rest = &tail[close + 1..];
        }
        assert!(stack.is_empty(), "unclosed tags: {stack:?}");
        assert_eq!(roots, 1, "expected exactly one root element");
    }

    #[test]
    fn renders_three_well_formed_documents() {
        let mut cfg = ExperimentConfig::new(build_source(3, 2, 4).unwrap(), 32, 40);
        cfg.baseline = true;
        let table = run_experiment(&cfg).unwrap();
        let dir = std::env::temp_dir().join("gdedup_plot_test");
        std::fs::create_dir_all(&dir).unwrap();
        let paths = emit_plot(&table, &dir.join("fig")).unwrap();
        assert_eq!(paths.len(), 3);
        let expected_series = [7usize, 3, 3];
        for (path, expected) in paths.iter().zip(expected_series) {
            let text = std::fs::read_to_string(path).unwrap();
            assert!(text.starts_with("<svg"));
            assert_well_formed_xml(&text);
            assert_eq!(text.matches("<polyline").count(), expected, "{}", path.display());
        }
    }

    #[test]
    fn single_row_tables_still_render() {
        let cfg = ExperimentConfig::new(build_source(3, 2, 4).unwrap(), 1, 5);
        let table = run_experiment(&cfg).unwrap();
        let dir = std::env::temp_dir().join("gdedup_plot_test_one");
        std::fs::create_dir_all(&dir).unwrap();
        for path in emit_plot(&table, &dir.join("fig")).unwrap() {
            assert_well_formed_xml(&std::fs::read_to_string(path).unwrap());
        }
    }

    #[test]
    fn baseline_disabled_drops_its_series() {
        let cfg = ExperimentConfig::new(build_source(3, 2, 4).unwrap(), 16, 10);
        let table = run_experiment(&cfg).unwrap();
        let dir = std::env::temp_dir().join("gdedup_plot_test_nobase");
        std::fs::create_dir_all(&dir).unwrap();
        let paths = emit_plot(&table, &dir.join("fig")).unwrap();
        let text = std::fs::read_to_string(&paths[0]).unwrap();
        assert_eq!(text.matches("<polyline").count(), 6);
    }
}
