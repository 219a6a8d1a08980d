//! SVG drawings of level approximations.

use std::fmt::Write;

use gdfractal_core::construct::GdIfs;
use gdfractal_core::gaps::{level_approx, GapsError};

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 60.0;
const ROW: f64 = 14.0;
const PITCH: f64 = 34.0;

/// One row per level `0..=m` of `F_u`; the basic gaps of `F_u` are labeled
/// under row 1.
pub fn render_svg(f: &GdIfs, u: usize, m: usize, budget: u128) -> Result<String, GapsError> {
    let ctx = &f.numeric;
    let lo = ctx.to_f64(&f.hulls[u].0)?;
    let hi = ctx.to_f64(&f.hulls[u].1)?;
    let x = |t: f64| MARGIN + (t - lo) / (hi - lo) * (WIDTH - 2.0 * MARGIN);
    let height = 40.0 + PITCH * (m as f64 + 1.0) + 10.0;
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{height}\" viewBox=\"0 0 {WIDTH} {height}\">"
    )
    .unwrap();
    let name = f.graph.name(u);
    writeln!(s, "<title>F_{name}, levels 0 to {m}</title>").unwrap();
    writeln!(
        s,
        "<text x=\"{MARGIN}\" y=\"20\" font-family=\"sans-serif\" font-size=\"12\">conv F_{name} = [{}, {}] ~ [{lo:.4}, {hi:.4}]</text>",
        f.hulls[u].0, f.hulls[u].1
    )
    .unwrap();
    for level in 0..=m {
        let y = 40.0 + PITCH * level as f64;
        writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">m={level}</text>",
            MARGIN - 8.0,
            y + ROW - 3.0
        )
        .unwrap();
        writeln!(s, "<g fill=\"#1f3b73\">").unwrap();
        for (a, b) in &level_approx(f, u, level, budget)?.intervals {
            let (xa, xb) = (x(ctx.to_f64(a)?), x(ctx.to_f64(b)?));
            writeln!(s, "<rect x=\"{xa:.3}\" y=\"{y:.2}\" width=\"{:.3}\" height=\"{ROW}\"/>", (xb - xa).max(0.2)).unwrap();
        }
        s.push_str("</g>\n");
        if level == 1 {
            let kids = f.child_intervals(u);
            for (k, gap) in f.gaps[u].iter().enumerate() {
                if gap.is_zero() {
                    continue;
                }
                let mid = (ctx.to_f64(&kids[k].1)? + ctx.to_f64(&kids[k + 1].0)?) / 2.0;
                writeln!(
                    s,
                    "<text x=\"{:.3}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{gap}</text>",
                    x(mid),
                    y + ROW + 12.0
                )
                .unwrap();
            }
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}
