//! Rendering of evaluation results: CSV, a markdown table laid out like the
//! classic results table (scenarios as row groups, models as column groups),
//! and an SVG density plot of upvote ratios by label.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use topocontro_core::eval::{CellResult, EvalReport, Stat, TrainScenario};
use topocontro_core::learn::ModelKind;
use topocontro_core::{LabelConfig, LabelValue};

pub const CSV_HEADER: [&str; 11] = [
    "scenario", "model", "features", "fc_a_mean", "fc_a_sd", "fc_c_mean", "fc_c_sd", "I_mean", "I_sd", "seeds", "error",
];

pub fn write_csv(report: &EvalReport, path: &Path) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for cell in &report.cells {
        let k = &cell.key;
        let mut rec = vec![k.scenario.to_string(), k.model.to_string(), k.features.clone()];
        match &cell.outcome {
            Ok(s) => {
                for (st, digits) in [(s.fc_a, 4), (s.fc_c, 4), (s.impact, 3)] {
                    rec.push(format!("{:.*}", digits, st.mean));
                    rec.push(format!("{:.*}", digits, st.sd));
                }
                rec.push(s.seeds.len().to_string());
                rec.push(String::new());
            }
            Err(e) => {
                rec.extend(std::iter::repeat_n(String::new(), 7));
                rec.push(e.clone());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn pm(s: Stat, digits: usize) -> String {
    format!("{:.*} ± {:.*}", digits, s.mean, digits, s.sd)
}

pub fn markdown(report: &EvalReport) -> String {
    let mut models: Vec<ModelKind> = report.cells.iter().map(|c| c.key.model).collect();
    models.sort();
    models.dedup();
    let mut features: Vec<String> = Vec::new();
    for c in &report.cells {
        if !features.contains(&c.key.features) {
            features.push(c.key.features.clone());
        }
    }
    let mut scenarios: Vec<TrainScenario> = report.cells.iter().map(|c| c.key.scenario).collect();
    scenarios.sort();
    scenarios.dedup();
    let index: BTreeMap<(TrainScenario, ModelKind, &str), &CellResult> = report
        .cells
        .iter()
        .map(|c| ((c.key.scenario, c.key.model, c.key.features.as_str()), c))
        .collect();

    let mut out = String::new();
    out.push_str("| Training | Features |");
    for m in &models {
        let _ = write!(out, " {m} Fc(a) | {m} Fc(c) | {m} I |");
    }
    out.push('\n');
    out.push_str("|---|---|");
    for _ in &models {
        out.push_str("---:|---:|---:|");
    }
    out.push('\n');
    for s in &scenarios {
        for (i, f) in features.iter().enumerate() {
            let label = if i == 0 { format!("({s})") } else { String::new() };
            let _ = write!(out, "| {label} | {f} |");
            for m in &models {
                match index.get(&(*s, *m, f.as_str())).map(|c| &c.outcome) {
                    Some(Ok(st)) => {
                        let _ = write!(out, " {} | {} | {} |", pm(st.fc_a, 4), pm(st.fc_c, 4), pm(st.impact, 3));
                    }
                    Some(Err(_)) => out.push_str(" error | error | error |"),
                    None => out.push_str(" | | |"),
                }
            }
            out.push('\n');
        }
    }
    let errors: Vec<&CellResult> = report.cells.iter().filter(|c| c.outcome.is_err()).collect();
    if !errors.is_empty() {
        out.push_str("\nFailed cells:\n\n");
        for c in errors {
            let _ = writeln!(
                out,
                "- ({}) {} {}: {}",
                c.key.scenario,
                c.key.model,
                c.key.features,
                c.outcome.as_ref().err().unwrap()
            );
        }
    }
    out
}

const W: f64 = 640.0;
const H: f64 = 360.0;
const PAD: f64 = 40.0;

fn density(xs: &[f64], grid: &[f64], bw: f64) -> Vec<f64> {
    let n = xs.len().max(1) as f64;
    let norm = 1.0 / (n * bw * (2.0 * std::f64::consts::PI).sqrt());
    grid.iter()
        .map(|&g| xs.iter().map(|&x| (-0.5 * ((g - x) / bw).powi(2)).exp()).sum::<f64>() * norm)
        .collect()
}

/// Gaussian-kernel densities of upvote ratio per label with the band edges
/// marked.
pub fn ur_density_svg(points: &[(f64, LabelValue)], bands: &LabelConfig) -> String {
    let grid: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
    let series = [
        (LabelValue::Controversial, "controversial", "#d95f02"),
        (LabelValue::NonControversial, "non-controversial", "#1b9e77"),
        (LabelValue::Excluded, "excluded", "#7570b3"),
    ];
    let curves: Vec<(&str, &str, Vec<f64>, usize)> = series
        .iter()
        .map(|&(v, name, color)| {
            let xs: Vec<f64> = points.iter().filter(|p| p.1 == v).map(|p| p.0).collect();
            (name, color, density(&xs, &grid, 0.02), xs.len())
        })
        .collect();
    let ymax = curves
        .iter()
        .flat_map(|c| c.2.iter().copied())
        .fold(0.0f64, f64::max)
        .max(1e-9);
    let sx = |x: f64| PAD + x * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - y / ymax * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{PAD}" y1="{y}" x2="{x2}" y2="{y}" stroke="black"/>"#,
        y = H - PAD,
        x2 = W - PAD
    );
    for t in 0..=10 {
        let x = sx(t as f64 / 10.0);
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{y}" text-anchor="middle">{v:.1}</text>"#,
            y = H - PAD + 16.0,
            v = t as f64 / 10.0
        );
    }
    for edge in [bands.controversial.hi, bands.non_controversial.lo] {
        let x = sx(edge);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.1}" y1="{PAD}" x2="{x:.1}" y2="{y}" stroke="#555" stroke-dasharray="4 3"/>"##,
            y = H - PAD
        );
    }
    for (k, (name, color, ys, n)) in curves.iter().enumerate() {
        if *n == 0 {
            continue;
        }
        let pts: Vec<String> = grid
            .iter()
            .zip(ys)
            .map(|(&x, &y)| format!("{:.1},{:.1}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = PAD + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{ly}" fill="{color}">{name} (n={n})</text>"#,
            x = PAD + 8.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" text-anchor="middle">upvote ratio</text>"#,
        x = W / 2.0,
        y = H - 6.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use topocontro_core::eval::{CellKey, CellStats};

    fn report() -> EvalReport {
        let st = Stat { mean: 0.5, sd: 0.1 };
        EvalReport {
            cells: vec![
                CellResult {
                    key: CellKey {
                        scenario: TrainScenario::A,
                        model: ModelKind::AdaBoost,
                        features: "f0".into(),
                    },
                    outcome: Ok(CellStats {
                        fc_a: st,
                        fc_c: st,
                        impact: Stat { mean: 25.0, sd: 1.0 },
                        seeds: vec![],
                    }),
                },
                CellResult {
                    key: CellKey {
                        scenario: TrainScenario::C,
                        model: ModelKind::AdaBoost,
                        features: "f0".into(),
                    },
                    outcome: Err("no controversial posts in the set".into()),
                },
            ],
        }
    }

    #[test]
    fn markdown_layout() {
        let md = markdown(&report());
        assert!(md.starts_with("| Training | Features | adaboost Fc(a) |"));
        assert!(md.contains("| (A) | f0 | 0.5000 ± 0.1000 | 0.5000 ± 0.1000 | 25.000 ± 1.000 |"));
        assert!(md.contains("| (C) | f0 | error |"));
        assert!(md.contains("Failed cells"));
    }

    #[test]
    fn csv_has_one_row_per_cell() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        write_csv(&report(), &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "A,adaboost,f0,0.5000,0.1000,0.5000,0.1000,25.000,1.000,0,");
        assert!(lines[2].ends_with("no controversial posts in the set"));
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let pts = vec![(0.5, LabelValue::Controversial), (0.9, LabelValue::NonControversial)];
        let svg = ur_density_svg(&pts, &LabelConfig::default());
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }
}
