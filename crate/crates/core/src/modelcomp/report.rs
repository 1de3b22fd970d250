use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::inference::PosteriorDraws;
use crate::kriging::quantile_sorted;

/// Posterior median and central 95% interval of one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSummary {
    pub name: String,
    pub median: f64,
    pub lo: f64,
    pub hi: f64,
    /// Constant across draws (a fixed hyperparameter).
    pub fixed: bool,
}

pub fn summarize_draws(draws: &PosteriorDraws) -> Result<Vec<ParamSummary>> {
    if draws.is_empty() {
        return Err(Error::EmptyDraws);
    }
    Ok(draws
        .parameter_names()
        .into_iter()
        .map(|name| {
            let mut s = draws.series(&name).expect("known parameter");
            s.sort_by(f64::total_cmp);
            let fixed = s.first() == s.last();
            ParamSummary {
                median: quantile_sorted(&s, 0.5),
                lo: quantile_sorted(&s, 0.025),
                hi: quantile_sorted(&s, 0.975),
                name,
                fixed,
            }
        })
        .collect())
}

/// Scores and parameter summaries of one model.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelReport {
    pub model: String,
    pub params: Vec<ParamSummary>,
    pub mspe: Option<f64>,
    pub dic: Option<f64>,
    /// Only when the generating model is known.
    pub kl: Option<f64>,
    pub cv: Option<f64>,
    /// Holdout coverage of the 95% predictive intervals.
    pub coverage: Option<f64>,
}

impl ModelReport {
    pub fn scores(&self) -> [(&'static str, Option<f64>); 5] {
        [
            ("mspe", self.mspe),
            ("dic", self.dic),
            ("kl", self.kl),
            ("cv", self.cv),
            ("coverage", self.coverage),
        ]
    }
}

/// Side-by-side comparison of fitted models.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonReport {
    pub models: Vec<ModelReport>,
    /// Number of folds behind the `cv` score.
    pub cv_folds: usize,
}

impl ComparisonReport {
    pub fn get(&self, model: &str) -> Option<&ModelReport> {
        self.models.iter().find(|m| m.model == model)
    }

    /// Every reported score is finite.
    pub fn validate(&self) -> Result<()> {
        for m in &self.models {
            for (name, v) in m.scores() {
                if v.is_some_and(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "{name} score of {} is not finite",
                        m.model
                    )));
                }
            }
        }
        Ok(())
    }

    /// Long format: `model,quantity,estimate,lo,hi`. Scores leave the
    /// interval columns empty.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["model", "quantity", "estimate", "lo", "hi"])?;
        for m in &self.models {
            for p in &m.params {
                out.write_record([
                    m.model.as_str(),
                    &p.name,
                    &p.median.to_string(),
                    &p.lo.to_string(),
                    &p.hi.to_string(),
                ])?;
            }
            for (name, v) in m.scores() {
                if let Some(v) = v {
                    let name = if name == "cv" { format!("cv{}", self.cv_folds) } else { name.to_string() };
                    out.write_record([m.model.as_str(), &name, &v.to_string(), "", ""])?;
                }
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Aligned table with one column per model and one row per quantity.
    pub fn to_text(&self) -> String {
        let mut rows: Vec<String> = Vec::new();
        for m in &self.models {
            for p in &m.params {
                if !rows.contains(&p.name) {
                    rows.push(p.name.clone());
                }
            }
        }
        let cv_name = format!("CV({})", self.cv_folds);
        let score_rows = [("MSPE", 0), ("DIC", 1), ("KL", 2), (cv_name.as_str(), 3), ("coverage", 4)];

        let mut table: Vec<Vec<String>> = vec![std::iter::once(String::new())
            .chain(self.models.iter().map(|m| m.model.clone()))
            .collect()];
        for name in &rows {
            let mut line = vec![name.clone()];
            for m in &self.models {
                line.push(match m.params.iter().find(|p| &p.name == name) {
                    Some(p) if p.fixed => format!("{:.2}", p.median),
                    Some(p) => format!("{:.2} ({:.2}, {:.2})", p.median, p.lo, p.hi),
                    None => "-".into(),
                });
            }
            table.push(line);
        }
        for (label, k) in score_rows {
            if self.models.iter().all(|m| m.scores()[k].1.is_none()) {
                continue;
            }
            let mut line = vec![label.to_string()];
            for m in &self.models {
                line.push(m.scores()[k].1.map_or("-".into(), |v| format!("{v:.3}")));
            }
            table.push(line);
        }

        let ncol = table[0].len();
        let widths: Vec<usize> = (0..ncol)
            .map(|c| table.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut s = String::new();
        for row in &table {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (cell, w))| if c == 0 { format!("{cell:<w$}") } else { format!("{cell:>w$}") })
                .collect();
            let _ = writeln!(s, "{}", cells.join("  ").trim_end());
        }
        s
    }
}
