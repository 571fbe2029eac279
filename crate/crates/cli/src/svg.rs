//! Stem plots of spectra as standalone SVG.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const PANEL: f64 = 180.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const GAP: f64 = 40.0;

/// One panel per series, values drawn as stems from zero against their index.
pub fn stem_plot(title: &str, y_label: &str, series: &[(&str, Vec<f64>)]) -> String {
    let height = TOP + series.len() as f64 * (PANEL + GAP);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    for (p, (name, values)) in series.iter().enumerate() {
        panel(
            &mut s,
            TOP + p as f64 * (PANEL + GAP),
            name,
            y_label,
            values,
        );
    }
    s.push_str("</svg>\n");
    s
}

fn panel(s: &mut String, y0: f64, name: &str, y_label: &str, values: &[f64]) {
    let plot_w = WIDTH - LEFT - RIGHT;
    let lo = values.iter().copied().fold(0.0, f64::min);
    let mut hi = values.iter().copied().fold(0.0, f64::max);
    if hi - lo <= 0.0 {
        hi = lo + 1.0;
    }
    let n = values.len().max(1);
    let x = |k: usize| LEFT + plot_w * (k as f64 + 0.5) / n as f64;
    let y = |v: f64| y0 + PANEL * (hi - v) / (hi - lo);

    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{y0}" width="{plot_w}" height="{PANEL}" fill="none" stroke="#888"/>"##
    );
    let _ = writeln!(
        s,
        r##"<line x1="{LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#444"/>"##,
        y(0.0),
        LEFT + plot_w,
        y(0.0)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}">{}</text>"#,
        LEFT + 4.0,
        y0 + 14.0,
        escape(name)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{:.2}" text-anchor="end">{:.3e}</text>"#,
        LEFT - 6.0,
        y0 + 4.0,
        hi
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{:.2}" text-anchor="end">{:.3e}</text>"#,
        LEFT - 6.0,
        y0 + PANEL,
        lo
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" transform="rotate(-90 16 {:.2})" text-anchor="middle">{}</text>"#,
        y0 + PANEL / 2.0,
        y0 + PANEL / 2.0,
        escape(y_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">0</text>"#,
        x(0),
        y0 + PANEL + 16.0
    );
    if values.len() > 1 {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            x(values.len() - 1),
            y0 + PANEL + 16.0,
            values.len() - 1
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">mode index</text>"#,
        LEFT + plot_w / 2.0,
        y0 + PANEL + 30.0
    );

    let _ = write!(s, r##"<g stroke="#1f4e9c" stroke-width="1">"##);
    for (k, &v) in values.iter().enumerate() {
        let _ = write!(
            s,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}"/>"#,
            x(k),
            y(0.0),
            y(v)
        );
    }
    let _ = writeln!(s, "</g>");
    let r = (0.35 * plot_w / n as f64).clamp(0.6, 3.0);
    let _ = write!(s, r##"<g fill="#1f4e9c">"##);
    for (k, &v) in values.iter().enumerate() {
        let _ = write!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{r:.2}"/>"#,
            x(k),
            y(v)
        );
    }
    let _ = writeln!(s, "</g>");
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_stem_per_value() {
        let svg = stem_plot(
            "t <1>",
            "|c|",
            &[("x", vec![1.0, -2.0, 0.5]), ("y", vec![0.0; 3])],
        );
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 6);
        assert!(svg.contains("t &lt;1&gt;"));
    }
}
