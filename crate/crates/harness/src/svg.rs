//! Static SVG line chart: mean regret with a ±1 std band, plus reference
//! curves as dashed lines.

use std::fmt::Write as _;

use cbm_core::bounds::BoundCurve;

use crate::summary::SummaryTable;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = ["#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e5 || v.abs() < 1e-2 {
        format!("{v:.1e}")
    } else if v.fract() == 0.0 || v.abs() >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

struct Frame {
    x_max: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, t: f64) -> f64 {
        LEFT + t / self.x_max * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - BOTTOM - v / self.y_max * (HEIGHT - TOP - BOTTOM)
    }

    fn point(&self, t: f64, v: f64) -> String {
        format!("{:.2},{:.2}", self.x(t), self.y(v))
    }
}

/// Renders the chart. Either input may be empty; the axes are always drawn.
pub fn render_chart(title: &str, summary: Option<&SummaryTable>, overlays: &[BoundCurve<f64>]) -> String {
    let rows = summary.map_or(&[][..], |s| &s.rows[..]);
    let x_max = rows
        .iter()
        .map(|r| r.t as f64)
        .chain(overlays.iter().flat_map(|c| c.points.iter().map(|p| p.0 as f64)))
        .fold(0.0, f64::max);
    let y_max = rows
        .iter()
        .map(|r| r.regret_mean + r.regret_std)
        .chain(overlays.iter().flat_map(|c| c.points.iter().map(|p| p.1)))
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let frame = Frame {
        x_max: if x_max > 0.0 { x_max } else { 1.0 },
        y_max: if y_max > 0.0 { y_max * 1.05 } else { 1.0 },
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#, (WIDTH - RIGHT + LEFT) / 2.0, escape(title));

    // Axes and ticks.
    let (x0, y0, x1, y1) = (LEFT, HEIGHT - BOTTOM, WIDTH - RIGHT, TOP);
    let _ = writeln!(s, r#"<path d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#);
    for i in 0..=5 {
        let f = f64::from(i) / 5.0;
        let (tx, ty) = (frame.x_max * f, frame.y_max * f);
        let (px, py) = (frame.x(tx), frame.y(ty));
        let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y0 + 18.0, tick_label(tx));
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 8.0, py + 4.0, tick_label(ty));
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#, (x0 + x1) / 2.0, HEIGHT - 12.0);
    let _ = writeln!(s, r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">cumulative regret</text>"#, (y0 + y1) / 2.0, (y0 + y1) / 2.0);

    let mut legend: Vec<(String, String, bool)> = Vec::new();
    if !rows.is_empty() {
        let upper: Vec<String> = rows.iter().map(|r| frame.point(r.t as f64, r.regret_mean + r.regret_std)).collect();
        let lower: Vec<String> =
            rows.iter().rev().map(|r| frame.point(r.t as f64, (r.regret_mean - r.regret_std).max(0.0))).collect();
        let _ = writeln!(s, r##"<polygon points="{} {}" fill="#1f77b4" fill-opacity="0.2" stroke="none"/>"##, upper.join(" "), lower.join(" "));
        let mean: Vec<String> = rows.iter().map(|r| frame.point(r.t as f64, r.regret_mean)).collect();
        let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="2"/>"##, mean.join(" "));
        legend.push(("mean regret ± std".into(), "#1f77b4".into(), false));
    }
    for (i, curve) in overlays.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = curve.points.iter().map(|&(t, v)| frame.point(t as f64, v)).collect();
        if !pts.is_empty() {
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5" stroke-dasharray="6 4"/>"#, pts.join(" "));
        }
        legend.push((curve.label.clone(), color.into(), true));
    }
    for (i, (label, color, dashed)) in legend.iter().enumerate() {
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let dash = if *dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(s, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"{dash}/>"#, lx + 24.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 30.0, ly + 4.0, escape(label));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::summary::SummaryRow;

    #[test]
    fn empty_chart_has_axes() {
        let svg = render_chart("empty", None, &[]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("<path"));
        assert!(!svg.contains("polyline"));
    }

    #[test]
    fn chart_with_band_and_overlay() {
        let table = SummaryTable {
            replications: 2,
            rows: vec![
                SummaryRow { t: 1, regret_mean: 0.5, regret_std: 0.1, regret_min: 0.4, regret_max: 0.6, budget_used_mean: 1.0 },
                SummaryRow { t: 10, regret_mean: 2.0, regret_std: 0.5, regret_min: 1.5, regret_max: 2.5, budget_used_mean: 3.0 },
            ],
        };
        let curve = BoundCurve { label: "a<b".into(), points: vec![(1, 0.1), (10, 1.0)] };
        let svg = render_chart("run", Some(&table), &[curve]);
        assert!(svg.contains("<polygon"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a&lt;b"));
    }
}
