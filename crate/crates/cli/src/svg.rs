//! Static scatter plot of the `sys`–`ru` plane.

use std::fmt::Write;

use ruelle_core::hypersurface::{BoundRow, RowKind};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

/// Scan rows over the ellipsoid arc `ru = sys^{1/2} + sys^{−1/2}`.
pub fn scatter_svg(rows: &[BoundRow]) -> String {
  let finite = || rows.iter().filter(|r| r.sys.is_finite() && r.ru.is_finite());
  let x_max = finite().map(|r| r.sys).fold(1.0, f64::max) * 1.1;
  let y_max = finite().map(|r| r.ru).fold(2.5, f64::max) * 1.15;
  let px = |x: f64| MARGIN + x / x_max * (WIDTH - 2.0 * MARGIN);
  let py = |y: f64| HEIGHT - MARGIN - y / y_max * (HEIGHT - 2.0 * MARGIN);

  let mut s = String::new();
  let _ = writeln!(
    s,
    r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
  );
  let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
  let (x0, y0, x1, y1) = (px(0.0), py(0.0), px(x_max), py(y_max));
  let _ = writeln!(s, r#"<path d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#);
  for k in 0..=5 {
    let (x, y) = (x_max * k as f64 / 5.0, y_max * k as f64 / 5.0);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x:.2}</text>"#, px(x), y0 + 18.0);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{y:.2}</text>"#, x0 - 6.0, py(y) + 4.0);
  }
  let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">sys</text>"#, WIDTH / 2.0, HEIGHT - 12.0);
  let _ = writeln!(s, r#"<text x="16" y="{:.2}" transform="rotate(-90 16 {:.2})" text-anchor="middle">ru</text>"#, HEIGHT / 2.0, HEIGHT / 2.0);

  // The arc is clipped where it leaves the plot near sys = 0.
  let mut d = String::new();
  for i in 0..=200 {
    let x = 1e-3 + (1.0 - 1e-3) * i as f64 / 200.0;
    let y = x.sqrt() + 1.0 / x.sqrt();
    if y <= y_max {
      let _ = write!(d, "{}{:.2},{:.2} ", if d.is_empty() { "M" } else { "L" }, px(x), py(y));
    }
  }
  let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#, d.trim_end());
  for r in finite() {
    let color = match r.kind {
      RowKind::Random => "darkorange",
      _ => "steelblue",
    };
    let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"><title>{}</title></circle>"#, px(r.sys), py(r.ru), r.label);
  }
  s.push_str("</svg>\n");
  s
}
