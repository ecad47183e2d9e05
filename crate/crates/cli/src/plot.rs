//! The `plot` subcommand: render loss histories as an SVG with one mean
//! polyline per configuration and a shaded +/- 1 sample-standard-
//! deviation band wherever more than one repeat exists.

use std::collections::BTreeMap;

use crate::csvio::LossRow;
use crate::CliError;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 540.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 55.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// Per-iteration mean and sample std for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub key: String,
    /// `(iteration, mean, std, repeats_at_this_iteration)`
    pub points: Vec<(usize, f64, f64, usize)>,
}

/// Aggregate rows into per-configuration mean/std curves, keyed and
/// ordered by configuration label.
pub fn aggregate(rows: &[LossRow]) -> Result<Vec<Curve>, CliError> {
    if rows.is_empty() {
        return Err(CliError::Config("no loss rows to plot".into()));
    }
    let mut groups: BTreeMap<String, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for row in rows {
        groups
            .entry(row.config_key())
            .or_default()
            .entry(row.iteration)
            .or_default()
            .push(row.loss);
    }
    Ok(groups
        .into_iter()
        .map(|(key, iters)| {
            let points = iters
                .into_iter()
                .map(|(iter, losses)| {
                    let n = losses.len();
                    let mean = losses.iter().sum::<f64>() / n as f64;
                    let std = if n < 2 {
                        0.0
                    } else {
                        (losses.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>()
                            / (n - 1) as f64)
                            .sqrt()
                    };
                    (iter, mean, std, n)
                })
                .collect();
            Curve { key, points }
        })
        .collect())
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render the curves as a standalone SVG document.
pub fn render_svg(curves: &[Curve]) -> Result<String, CliError> {
    if curves.is_empty() || curves.iter().all(|c| c.points.is_empty()) {
        return Err(CliError::Config("no loss rows to plot".into()));
    }
    let x_max = curves
        .iter()
        .flat_map(|c| c.points.iter().map(|p| p.0))
        .max()
        .unwrap()
        .max(1) as f64;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for c in curves {
        for &(_, mean, std, _) in &c.points {
            y_min = y_min.min(mean - std);
            y_max = y_max.max(mean + std);
        }
    }
    if y_max - y_min < 1e-12 {
        y_max = y_min + 1.0;
    }
    let pad = 0.05 * (y_max - y_min);
    let (y_lo, y_hi) = (y_min - pad, y_max + pad);

    let px = |iter: f64| MARGIN_L + iter / x_max * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |loss: f64| HEIGHT - MARGIN_B - (loss - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    // axes
    svg.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        MARGIN_L,
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    ));
    svg.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        MARGIN_L, MARGIN_T, MARGIN_L,
        HEIGHT - MARGIN_B
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"16\">iterations</text>\n",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "  <text x=\"18\" y=\"{}\" text-anchor=\"middle\" font-size=\"16\" transform=\"rotate(-90 18 {})\">loss</text>\n",
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0
    ));
    // tick labels at the extremes
    for (v, x) in [(0.0, px(0.0)), (x_max, px(x_max))] {
        svg.push_str(&format!(
            "  <text x=\"{x}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{v}</text>\n",
            HEIGHT - MARGIN_B + 18.0
        ));
    }
    for v in [y_lo, y_hi] {
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"12\">{v:.3}</text>\n",
            MARGIN_L - 6.0,
            py(v) + 4.0
        ));
    }

    for (ci, curve) in curves.iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        let banded: Vec<_> = curve.points.iter().filter(|p| p.3 >= 2).collect();
        if banded.len() >= 2 {
            let mut pts = String::new();
            for &&(iter, mean, std, _) in &banded {
                pts.push_str(&format!("{},{} ", px(iter as f64), py(mean + std)));
            }
            for &&(iter, mean, std, _) in banded.iter().rev() {
                pts.push_str(&format!("{},{} ", px(iter as f64), py(mean - std)));
            }
            svg.push_str(&format!(
                "  <polygon points=\"{}\" fill=\"{color}\" fill-opacity=\"0.18\" stroke=\"none\"/>\n",
                pts.trim_end()
            ));
        }
        let mut pts = String::new();
        for &(iter, mean, _, _) in &curve.points {
            pts.push_str(&format!("{},{} ", px(iter as f64), py(mean)));
        }
        svg.push_str(&format!(
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            pts.trim_end()
        ));
        // legend entry
        let ly = MARGIN_T + 18.0 * ci as f64 + 12.0;
        svg.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"3\"/>\n",
            WIDTH - MARGIN_R - 270.0,
            WIDTH - MARGIN_R - 240.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n",
            WIDTH - MARGIN_R - 232.0,
            ly + 4.0,
            esc(&curve.key)
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csvio::{read_loss_csv, LOSS_HEADER};

    fn rows(repeats: usize) -> Vec<LossRow> {
        let mut text = format!("{LOSS_HEADER}\n");
        for r in 0..repeats {
            for i in 1..=5 {
                text.push_str(&format!(
                    "reverse,-1.5,800,equivariant,{r},{i},{}\n",
                    0.7 - 0.05 * i as f64 + 0.01 * r as f64
                ));
            }
        }
        read_loss_csv(&text).unwrap()
    }

    /// Minimal XML well-formedness check: tags balance and attributes
    /// are quoted (sufficient for the markup this module emits).
    fn assert_well_formed_xml(doc: &str) {
        let mut stack: Vec<String> = Vec::new();
        let mut rest = doc;
        while let Some(open) = rest.find('<') {
            let close = rest[open..].find('>').expect("unclosed tag") + open;
            let tag = &rest[open + 1..close];
            rest = &rest[close + 1..];
            if let Some(name) = tag.strip_prefix('/') {
                assert_eq!(stack.pop().as_deref(), Some(name), "mismatched close");
            } else if !tag.ends_with('/') {
                let name = tag.split_whitespace().next().unwrap().to_string();
                stack.push(name);
            }
            assert_eq!(tag.matches('"').count() % 2, 0, "unbalanced quotes in <{tag}>");
        }
        assert!(stack.is_empty(), "unclosed tags {stack:?}");
    }

    #[test]
    fn single_run_polyline_no_band() {
        let curves = aggregate(&rows(1)).unwrap();
        let svg = render_svg(&curves).unwrap();
        assert!(svg.contains("<polyline"));
        assert!(!svg.contains("<polygon"));
        assert!(svg.contains(">iterations<") && svg.contains(">loss<"));
        assert_well_formed_xml(&svg);
    }

    #[test]
    fn repeats_get_band_with_sample_std() {
        let curves = aggregate(&rows(10)).unwrap();
        // independent recomputation of the std at iteration 1: losses are
        // 0.65 + 0.01 r for r = 0..9, sample std = 0.01 * std(0..9)
        let vals: Vec<f64> = (0..10).map(|r| 0.65 + 0.01 * r as f64).collect();
        let mean = vals.iter().sum::<f64>() / 10.0;
        let std = (vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 9.0).sqrt();
        let (_, m, s, n) = curves[0].points[0];
        assert_eq!(n, 10);
        assert!((m - mean).abs() < 1e-12);
        assert!((s - std).abs() < 1e-12);

        let svg = render_svg(&curves).unwrap();
        assert!(svg.contains("<polygon"));
        assert_well_formed_xml(&svg);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(aggregate(&[]).is_err());
        assert!(render_svg(&[]).is_err());
    }

    #[test]
    fn multiple_configs_get_distinct_series() {
        let mut all = rows(2);
        let mut other = rows(2);
        for r in &mut other {
            r.model_kind = "hardware_efficient".into();
        }
        all.extend(other);
        let curves = aggregate(&all).unwrap();
        assert_eq!(curves.len(), 2);
        let svg = render_svg(&curves).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_well_formed_xml(&svg);
    }
}
