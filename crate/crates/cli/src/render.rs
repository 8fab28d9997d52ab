//! SVG drawing of a folding: prefix sums against index, joined by segments
//! labelled with their signed lengths, with the extremes circled and a
//! bracket on the right labelled with the exact range.

use std::fmt::Write;

use num_traits::{ToPrimitive, Zero};
use stepcover::{FoldingEvaluation, Rational, RulerInstance, Sign, SignVector};

const COLUMN: f64 = 70.0;
const MARGIN: f64 = 50.0;
const PLOT_HEIGHT: f64 = 320.0;
const BRACKET_GAP: f64 = 60.0;
const LABEL_SPACE: f64 = 150.0;

#[derive(Clone, Copy, Debug, Default)]
pub struct RenderOptions {
    /// Place prefix sums on evenly spaced levels by rank instead of to scale.
    pub schematic: bool,
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(0.0)
}

fn signed_label(sign: Sign, a: &Rational) -> String {
    format!("{}{}", sign.as_char(), a)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the folding. Output depends only on the arguments.
pub fn render_svg(
    instance: &RulerInstance,
    signs: &SignVector,
    eval: &FoldingEvaluation,
    options: RenderOptions,
) -> String {
    let sums = &eval.prefix_sums;
    let n = instance.len();

    // vertical position of each prefix sum, 0 at the top
    let ys: Vec<f64> = if options.schematic {
        let mut levels: Vec<&Rational> = sums.iter().collect();
        levels.sort();
        levels.dedup();
        let step = if levels.len() > 1 {
            PLOT_HEIGHT / (levels.len() - 1) as f64
        } else {
            0.0
        };
        sums.iter()
            .map(|s| {
                let rank = levels.len() - 1 - levels.binary_search(&s).expect("present");
                MARGIN + rank as f64 * step
            })
            .collect()
    } else {
        let scale = if eval.range.is_zero() {
            0.0
        } else {
            PLOT_HEIGHT / to_f64(&eval.range)
        };
        sums.iter()
            .map(|s| MARGIN + to_f64(&(&eval.max_s - s)) * scale)
            .collect()
    };
    let xs: Vec<f64> = (0..=n).map(|i| MARGIN + i as f64 * COLUMN).collect();
    let y_max = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let y_min = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bracket_x = xs[n] + BRACKET_GAP;
    let width = bracket_x + LABEL_SPACE;
    let height = MARGIN * 2.0 + PLOT_HEIGHT;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="serif" font-size="14">"#
    );
    let _ = writeln!(svg, r#"<title>folding {signs} of {}</title>"#, escape(&instance.to_string()));
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let points: Vec<String> = xs.iter().zip(&ys).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = writeln!(
        svg,
        r#"<polyline class="folding" points="{}" fill="none" stroke="black" stroke-width="2"/>"#,
        points.join(" ")
    );

    for (i, (a, sign)) in instance.lengths().iter().zip(signs.signs()).enumerate() {
        let mx = (xs[i] + xs[i + 1]) / 2.0;
        let my = (ys[i] + ys[i + 1]) / 2.0;
        let _ = writeln!(
            svg,
            r##"<text class="segment-label" x="{:.2}" y="{:.2}" text-anchor="middle" fill="#444">{}</text>"##,
            mx + 6.0,
            my - 6.0,
            escape(&signed_label(*sign, a))
        );
    }

    for (i, ((x, y), s)) in xs.iter().zip(&ys).zip(sums).enumerate() {
        let _ = writeln!(svg, r#"<circle class="hinge" cx="{x:.2}" cy="{y:.2}" r="4" fill="black"/>"#);
        if *s == eval.max_s || *s == eval.min_s {
            let _ = writeln!(
                svg,
                r#"<circle class="extreme" cx="{x:.2}" cy="{y:.2}" r="9" fill="none" stroke="black"/>"#
            );
        }
        let below = *s == eval.min_s;
        let ty = if below { y + 24.0 } else { y - 14.0 };
        let _ = writeln!(
            svg,
            r#"<text class="prefix-label" x="{x:.2}" y="{ty:.2}" text-anchor="middle">s<tspan baseline-shift="sub" font-size="10">{i}</tspan></text>"#
        );
    }

    let _ = writeln!(
        svg,
        r#"<g class="range-bracket" stroke="black"><line x1="{bx:.2}" y1="{y_max:.2}" x2="{bx:.2}" y2="{y_min:.2}"/><line x1="{l:.2}" y1="{y_max:.2}" x2="{r:.2}" y2="{y_max:.2}"/><line x1="{l:.2}" y1="{y_min:.2}" x2="{r:.2}" y2="{y_min:.2}"/></g>"#,
        bx = bracket_x,
        l = bracket_x - 8.0,
        r = bracket_x + 8.0,
    );
    let _ = writeln!(
        svg,
        r#"<text class="range-label" x="{:.2}" y="{:.2}">{}</text>"#,
        bracket_x + 14.0,
        (y_max + y_min) / 2.0 + 5.0,
        eval.range
    );
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use stepcover::evaluate_folding;

    fn fig1() -> (RulerInstance, SignVector) {
        (
            RulerInstance::from_ratios(&[(7, 10), (0, 1), (1, 5), (1, 10), (1, 2), (1, 2), (4, 5)]).unwrap(),
            "--+++-+".parse().unwrap(),
        )
    }

    #[test]
    fn worked_example_layout() {
        let (a, e) = fig1();
        let ev = evaluate_folding(&a, &e).unwrap();
        let svg = render_svg(&a, &e, &ev, RenderOptions::default());
        assert!(svg.contains(r#"class="range-label""#));
        assert!(svg.contains(">11/10</text>"));
        assert_eq!(svg.matches(r#"class="hinge""#).count(), 8);
        assert_eq!(svg.matches(r#"class="segment-label""#).count(), 7);
        assert!(svg.contains(">-7/10</text>"));
        assert!(svg.contains(">-0</text>"));
        // s_1 = s_2 = min and s_7 = max are circled
        assert_eq!(svg.matches(r#"class="extreme""#).count(), 3);
    }

    #[test]
    fn deterministic_and_schematic_differs() {
        let (a, e) = fig1();
        let ev = evaluate_folding(&a, &e).unwrap();
        let one = render_svg(&a, &e, &ev, RenderOptions::default());
        let two = render_svg(&a, &e, &ev, RenderOptions::default());
        assert_eq!(one, two);
        let schematic = render_svg(&a, &e, &ev, RenderOptions { schematic: true });
        assert_ne!(one, schematic);
        assert!(schematic.contains(">11/10</text>"));
    }

    #[test]
    fn flat_folding_renders() {
        let a = RulerInstance::from_ratios(&[(0, 1), (0, 1)]).unwrap();
        let e: SignVector = "++".parse().unwrap();
        let ev = evaluate_folding(&a, &e).unwrap();
        let svg = render_svg(&a, &e, &ev, RenderOptions::default());
        assert!(svg.contains(">0</text>"));
        assert!(!svg.contains("NaN"));
    }
}
