//! Minimal static SVG charts.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

impl Scale {
    fn map(self, v: f64) -> Option<f64> {
        match self {
            Scale::Linear => v.is_finite().then_some(v),
            Scale::Log => (v > 0.0 && v.is_finite()).then(|| v.log10()),
        }
    }
}

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

fn extent(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        return None;
    }
    Some(if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    })
}

fn header(title: &str, x_label: &str, y_label: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        W / 2.0,
        H - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn axis_labels(s: &mut String, (x0, x1): (f64, f64), (y0, y1): (f64, f64), xs: Scale, ys: Scale) {
    let shown = |v: f64, scale: Scale| match scale {
        Scale::Linear => format!("{v:.3e}"),
        Scale::Log => format!("1e{v:.1}"),
    };
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{}" text-anchor="start">{}</text>"#,
        H - MARGIN + 16.0,
        shown(x0, xs)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
        W - MARGIN,
        H - MARGIN + 16.0,
        shown(x1, xs)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="start">{}</text>"#,
        MARGIN + 4.0,
        H - MARGIN - 4.0,
        shown(y0, ys)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="start">{}</text>"#,
        MARGIN + 4.0,
        MARGIN + 14.0,
        shown(y1, ys)
    );
}

pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    x_scale: Scale,
    y_scale: Scale,
) -> Result<String, String> {
    let mapped: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter_map(|&(x, y)| Some((x_scale.map(x)?, y_scale.map(y)?)))
                .collect()
        })
        .collect();
    let xr = extent(mapped.iter().flatten().map(|p| p.0)).ok_or("no plottable points")?;
    let yr = extent(mapped.iter().flatten().map(|p| p.1)).ok_or("no plottable points")?;
    let px = |x: f64| MARGIN + (x - xr.0) / (xr.1 - xr.0) * (W - 2.0 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - yr.0) / (yr.1 - yr.0) * (H - 2.0 * MARGIN);

    let mut s = header(title, x_label, y_label);
    axis_labels(&mut s, xr, yr, x_scale, y_scale);
    for (i, (pts, meta)) in mapped.iter().zip(series).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}" text-anchor="end">{}</text>"#,
            W - MARGIN - 4.0,
            MARGIN + 14.0 + 14.0 * i as f64,
            escape(meta.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn histogram(
    title: &str,
    x_label: &str,
    values: &[f64],
    bins: usize,
) -> Result<String, String> {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let (lo, hi) = extent(finite.iter().copied()).ok_or("no finite values")?;
    let bins = bins.max(1);
    let mut counts = vec![0usize; bins];
    for v in &finite {
        let i = (((v - lo) / (hi - lo)) * bins as f64) as usize;
        counts[i.min(bins - 1)] += 1;
    }
    let max = *counts.iter().max().unwrap_or(&1) as f64;
    let bw = (W - 2.0 * MARGIN) / bins as f64;

    let mut s = header(title, x_label, "trials");
    axis_labels(&mut s, (lo, hi), (0.0, max), Scale::Linear, Scale::Linear);
    for (i, &c) in counts.iter().enumerate() {
        let h = c as f64 / max * (H - 2.0 * MARGIN);
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#1f77b4" stroke="white" stroke-width="0.5"/>"##,
            MARGIN + i as f64 * bw,
            H - MARGIN - h,
            bw,
            h
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_inputs_fail_softly() {
        assert!(histogram("t", "x", &[f64::NAN], 10).is_err());
        let s = Series {
            label: "a",
            points: vec![(-1.0, 1.0)],
        };
        assert!(line_chart("t", "x", "y", &[s], Scale::Log, Scale::Log).is_err());
    }

    #[test]
    fn renders_svg() {
        let s = Series {
            label: "a<b",
            points: vec![(1.0, 1.0), (10.0, 0.1)],
        };
        let svg = line_chart("t", "x", "y", &[s], Scale::Log, Scale::Log).unwrap();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("a&lt;b"));
        let h = histogram("t", "x", &[0.0, 0.5, 1.0, 1.0], 4).unwrap();
        assert_eq!(h.matches("<rect").count(), 2 + 4);
    }
}
