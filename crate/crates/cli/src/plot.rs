use std::fmt::Write;

use mfi_core::superposition::Figure1Row;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;

/// Both Figure 1 curves as an SVG document.
pub fn figure1_svg(rows: &[Figure1Row]) -> String {
    let y_max = rows.iter().map(|r| r.in_phase.max(r.quadrature)).fold(0.0_f64, f64::max).max(1e-12);
    let y_top = (y_max * 2.0).ceil() / 2.0;
    let sx = |p: f64| MARGIN + p * (WIDTH - 2.0 * MARGIN);
    let sy = |v: f64| HEIGHT - MARGIN - v / y_top * (HEIGHT - 2.0 * MARGIN);
    let path = |f: &dyn Fn(&Figure1Row) -> f64| {
        let mut s = String::new();
        for (i, r) in rows.iter().enumerate() {
            let _ = write!(s, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, sx(r.p), sy(f(r)));
        }
        s
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, x1, y0, y1) = (sx(0.0), sx(1.0), sy(0.0), sy(y_top));
    let _ = writeln!(svg, r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" fill="none" stroke="black"/>"#);
    for i in 0..=5 {
        let p = i as f64 / 5.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{0:.2}" y1="{y0}" x2="{0:.2}" y2="{1}" stroke="black"/><text x="{0:.2}" y="{2}" text-anchor="middle">{p:.1}</text>"#,
            sx(p),
            y0 + 5.0,
            y0 + 20.0
        );
    }
    let ticks = (y_top / 0.5).round() as usize;
    for i in 0..=ticks {
        let v = i as f64 * 0.5;
        let (tick, y, label_x, label_y) = (x0 - 5.0, sy(v), x0 - 8.0, sy(v) + 4.0);
        let _ = writeln!(
            svg,
            r#"<line x1="{tick}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/><text x="{label_x}" y="{label_y:.2}" text-anchor="end">{v:.1}</text>"#
        );
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">p</text>"#, WIDTH / 2.0, HEIGHT - 14.0);
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">I_F / 4 mu</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    let _ = writeln!(svg, r##"<path d="{}" fill="none" stroke="#1f77b4" stroke-width="2"/>"##, path(&|r| r.in_phase));
    let _ = writeln!(
        svg,
        r##"<path d="{}" fill="none" stroke="#d62728" stroke-width="2" stroke-dasharray="6 4"/>"##,
        path(&|r| r.quadrature)
    );
    let lx = x1 - 150.0;
    let _ = writeln!(
        svg,
        "<line x1=\"{lx}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"#1f77b4\" stroke-width=\"2\"/><text x=\"{2}\" y=\"{3}\">alpha = 0</text>",
        y1 + 10.0,
        lx + 24.0,
        lx + 30.0,
        y1 + 14.0
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{lx}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/><text x=\"{2}\" y=\"{3}\">alpha = pi/2</text>",
        y1 + 28.0,
        lx + 24.0,
        lx + 30.0,
        y1 + 32.0
    );
    svg.push_str("</svg>\n");
    svg
}
