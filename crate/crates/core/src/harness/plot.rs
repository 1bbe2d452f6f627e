use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub generation: f64,
    pub best: f64,
    pub mean: f64,
    pub worst: f64,
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricsRow>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let headers = rdr.headers().map_err(|e| Error::Io(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Data(format!("metrics file lacks a {name:?} column")))
    };
    let (g, b, m, w) = (col("gen")?, col("best")?, col("mean")?, col("worst")?);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
        let row = rec.position().map_or(0, |p| p.line() as usize);
        let num = |c: usize| -> Result<f64> {
            rec.get(c).unwrap_or("").parse().map_err(|_| Error::Parse {
                row,
                column: c + 1,
                message: format!("not a number: {:?}", rec.get(c).unwrap_or("")),
            })
        };
        rows.push(MetricsRow { generation: num(g)?, best: num(b)?, mean: num(m)?, worst: num(w)? });
    }
    if rows.is_empty() {
        return Err(Error::Data("metrics file has no rows".into()));
    }
    Ok(rows)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Line chart of best, mean and worst error against generation.
pub fn render_svg(rows: &[MetricsRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Data("nothing to plot".into()));
    }
    let (x0, x1) = padded(
        rows.iter().map(|r| r.generation).fold(f64::INFINITY, f64::min),
        rows.iter().map(|r| r.generation).fold(f64::NEG_INFINITY, f64::max),
    );
    let ys = rows.iter().flat_map(|r| [r.best, r.mean, r.worst]);
    let (y0, y1) = padded(
        ys.clone().fold(f64::INFINITY, f64::min),
        ys.fold(f64::NEG_INFINITY, f64::max),
    );
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(s, r#"<g id="x-axis" data-min="{x0}" data-max="{x1}">"#);
    let _ = writeln!(s, r#"<line x1="{l}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<text x="{l}" y="{}" font-size="12">{x0}</text>"#, b + 20.0);
    let _ = writeln!(s, r#"<text x="{r}" y="{}" font-size="12" text-anchor="end">{x1}</text>"#, b + 20.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">generation</text>"#, WIDTH / 2.0, b + 35.0);
    s.push_str("</g>\n");
    let _ = writeln!(s, r#"<g id="y-axis" data-min="{y0}" data-max="{y1}">"#);
    let _ = writeln!(s, r#"<line x1="{l}" y1="{t}" x2="{l}" y2="{b}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="{b}" font-size="12" text-anchor="end">{y0:.4}</text>"#, l - 4.0);
    let _ = writeln!(s, r#"<text x="{}" y="{t}" font-size="12" text-anchor="end">{y1:.4}</text>"#, l - 4.0);
    s.push_str("</g>\n");
    let series: [(&str, &str, fn(&MetricsRow) -> f64); 3] = [
        ("best", "#1b9e77", |r| r.best),
        ("mean", "#7570b3", |r| r.mean),
        ("worst", "#d95f02", |r| r.worst),
    ];
    for (name, color, get) in series {
        let points: Vec<String> =
            rows.iter().map(|r| format!("{:.2},{:.2}", px(r.generation), py(get(r)))).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="{name}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        if rows.len() == 1 {
            let _ = writeln!(
                s,
                r#"<circle class="{name}" cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                px(rows[0].generation),
                py(get(&rows[0]))
            );
        }
    }
    for (k, (name, color, _)) in series.iter().enumerate() {
        let y = t + 15.0 * k as f64;
        let _ = writeln!(s, r#"<text x="{}" y="{y}" font-size="12" fill="{color}">{name}</text>"#, r - 60.0);
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn plot_metrics(metrics: &Path, out: &Path) -> Result<()> {
    let svg = render_svg(&read_metrics(metrics)?)?;
    std::fs::write(out, svg)?;
    Ok(())
}
