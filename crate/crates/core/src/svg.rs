//! Native SVG rendering of convergence profiles.
//!
//! Primitive shapes only, fixed canvas, fixed decimal formatting, no
//! timestamps: the same profile always renders to the same bytes.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::learner::ConvergenceProfile;
use crate::report::fmt_sig;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 180.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

struct Series<'a> {
    label: &'a str,
    color: &'a str,
    values: Vec<f64>,
}

/// Renders the per-step series of a profile together with horizontal lines
/// at the attached theoretical bounds.
pub fn render_profile_svg(profile: &ConvergenceProfile, title: &str) -> Result<String> {
    if profile.steps.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let series = [
        Series {
            label: "cum_s",
            color: "#1f77b4",
            values: profile.steps.iter().map(|s| s.cum_s).collect(),
        },
        Series {
            label: "cum_delta",
            color: "#d62728",
            values: profile.steps.iter().map(|s| s.cum_delta).collect(),
        },
        Series {
            label: "cum_lambda",
            color: "#2ca02c",
            values: profile.steps.iter().map(|s| s.cum_lambda).collect(),
        },
    ];
    let bounds = [
        ("bound_pred", "#1f77b4", profile.bounds.prediction),
        ("bound_over", "#d62728", profile.bounds.overgeneralization),
        ("bound_under", "#2ca02c", profile.bounds.undergeneralization),
    ];

    let n = profile.steps.len();
    let max_y = series
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .chain(bounds.iter().map(|b| b.2))
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let x_of = |i: usize| MARGIN_L + plot_w * (i as f64) / ((n.max(2) - 1) as f64);
    let y_of = |v: f64| MARGIN_T + plot_h * (1.0 - (v / max_y).clamp(0.0, 1.0));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"##
    );
    let _ = writeln!(
        svg,
        r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        svg,
        r##"<text x="{:.2}" y="24" font-family="monospace" font-size="14">{}</text>"##,
        MARGIN_L,
        escape(title)
    );
    // Axes.
    let _ = writeln!(
        svg,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#000000" stroke-width="1"/>"##,
        MARGIN_L,
        MARGIN_T + plot_h,
        MARGIN_L + plot_w,
        MARGIN_T + plot_h
    );
    let _ = writeln!(
        svg,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#000000" stroke-width="1"/>"##,
        MARGIN_L, MARGIN_T, MARGIN_L, MARGIN_T + plot_h
    );
    // X ticks at 5 fixed positions.
    for k in 0..5 {
        let i = (n - 1) * k / 4;
        let x = x_of(i);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#000000" stroke-width="1"/>"##,
            MARGIN_T + plot_h,
            MARGIN_T + plot_h + 5.0
        );
        let _ = writeln!(
            svg,
            r##"<text x="{x:.2}" y="{:.2}" font-family="monospace" font-size="11" text-anchor="middle">{}</text>"##,
            MARGIN_T + plot_h + 18.0,
            i + 1
        );
    }
    // Y ticks at 5 fixed positions.
    for k in 0..5 {
        let v = max_y * (k as f64) / 4.0;
        let y = y_of(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#000000" stroke-width="1"/>"##,
            MARGIN_L - 5.0,
            MARGIN_L
        );
        let _ = writeln!(
            svg,
            r##"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="11" text-anchor="end">{}</text>"##,
            MARGIN_L - 8.0,
            y + 4.0,
            fmt_sig(v)
        );
    }
    let _ = writeln!(
        svg,
        r##"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="12" text-anchor="middle">n</text>"##,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 10.0
    );

    // Bound lines (dashed) with value labels.
    let mut legend_y = MARGIN_T + 10.0;
    for (label, color, value) in bounds {
        if value.is_finite() {
            let y = y_of(value);
            let _ = writeln!(
                svg,
                r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="1" stroke-dasharray="6,4" data-bound="{}"/>"##,
                MARGIN_L,
                MARGIN_L + plot_w,
                fmt_sig(value)
            );
        }
        let _ = writeln!(
            svg,
            r##"<text x="{:.2}" y="{legend_y:.2}" font-family="monospace" font-size="11" fill="{color}">{label} = {}</text>"##,
            MARGIN_L + plot_w + 10.0,
            fmt_sig(value)
        );
        legend_y += 16.0;
    }

    // Series polylines with legend entries.
    for s in &series {
        let mut points = String::new();
        for (i, &v) in s.values.iter().enumerate() {
            if i > 0 {
                points.push(' ');
            }
            let _ = write!(points, "{:.2},{:.2}", x_of(i), y_of(v));
        }
        let _ = writeln!(
            svg,
            r##"<polyline points="{points}" fill="none" stroke="{}" stroke-width="1.5"/>"##,
            s.color
        );
        let _ = writeln!(
            svg,
            r##"<text x="{:.2}" y="{legend_y:.2}" font-family="monospace" font-size="11" fill="{}">{}</text>"##,
            MARGIN_L + plot_w + 10.0,
            s.color,
            s.label
        );
        legend_y += 16.0;
    }
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::{bounds_for, ConvergenceProfile, StepRecord};

    fn tiny_profile() -> ConvergenceProfile {
        ConvergenceProfile {
            steps: vec![StepRecord {
                n: 1,
                s: 0.1,
                s_tv: 0.1,
                delta: 0.2,
                lambda: 0.0,
                cum_s: 0.1,
                cum_delta: 0.2,
                cum_lambda: 0.0,
                s_ci: None,
                delta_ci: None,
                lambda_ci: None,
            }],
            bounds: bounds_for(33.0, 8.0),
            truth_bits: 33.0,
            f: 8.0,
            mode: "exact".into(),
        }
    }

    #[test]
    fn identical_profiles_render_identically() {
        let p = tiny_profile();
        let a = render_profile_svg(&p, "t").unwrap();
        let b = render_profile_svg(&p, "t").unwrap();
        assert_eq!(a, b);
        assert!(a.contains("data-bound"));
    }

    #[test]
    fn empty_profile_is_an_error() {
        let mut p = tiny_profile();
        p.steps.clear();
        assert!(matches!(
            render_profile_svg(&p, "t"),
            Err(Error::EmptyProfile)
        ));
    }

    #[test]
    fn bound_value_appears_verbatim() {
        let p = tiny_profile();
        let svg = render_profile_svg(&p, "t").unwrap();
        assert!(svg.contains(&fmt_sig(p.bounds.prediction)));
    }
}
