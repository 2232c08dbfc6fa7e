use std::time::Instant;

use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::report::Estimator;
use super::table::{Cell, TableRow};
use super::{elapsed_ms, StudyMode};
use crate::error::{Error, Result};
use crate::exact::{exact_feasible, permutation_fix_average, ExactValue, PermAverageSpec, PermMode};
use crate::words::FreeWord;

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeConfig {
    pub words: Vec<String>,
    pub s: usize,
    pub sizes: Vec<usize>,
    /// Tuples per sampled average.
    pub samples: u64,
    pub seed: u64,
    pub mode: StudyMode,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            words: Vec::new(),
            s: 2,
            sizes: vec![8, 16, 32, 64],
            samples: 100_000,
            seed: 0,
            mode: StudyMode::Auto,
        }
    }
}

/// One average of fixed-point counts over permutation tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRow {
    /// `fix` (`E Fix w`), `fix2` (`E Fix(w)²`) or `fixfix` (`E Fix v · Fix w`).
    pub statistic: String,
    /// The word, or `v|w` for products.
    pub word: String,
    pub n: usize,
    pub estimator: Estimator,
    pub value: f64,
    pub stderr: Option<f64>,
    pub exact: Option<String>,
    pub error: Option<String>,
    pub runtime_ms: f64,
}

impl TableRow for ProbeRow {
    fn header() -> &'static [&'static str] {
        &[
            "statistic",
            "word",
            "N",
            "estimator",
            "value",
            "stderr",
            "exact",
            "error",
            "runtime_ms",
        ]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text(self.statistic.clone()),
            Cell::Text(self.word.clone()),
            Cell::Int(Some(self.n)),
            Cell::Text(self.estimator.to_string()),
            Cell::Num(Some(self.value)),
            Cell::Num(self.stderr),
            Cell::Text(self.exact.clone().unwrap_or_default()),
            Cell::Text(self.error.clone().unwrap_or_default()),
            Cell::Millis(self.runtime_ms),
        ]
    }
}

fn probe_row(cfg: &ProbeConfig, statistic: &str, label: String, words: Vec<FreeWord>, n: usize) -> ProbeRow {
    let start = Instant::now();
    let exact = match cfg.mode {
        StudyMode::Exact => true,
        StudyMode::Sampled => false,
        StudyMode::Auto => exact_feasible(n, &words),
    };
    let mode = if exact {
        PermMode::Exact
    } else {
        PermMode::Sampled {
            samples: cfg.samples,
            seed: cfg.seed,
        }
    };
    let mut row = ProbeRow {
        statistic: statistic.into(),
        word: label,
        n,
        estimator: Estimator::Error,
        value: f64::NAN,
        stderr: None,
        exact: None,
        error: None,
        runtime_ms: 0.0,
    };
    match permutation_fix_average(&PermAverageSpec { words, n, mode }) {
        Ok(ExactValue::Rational(r)) => {
            row.estimator = Estimator::Exact;
            row.value = r.to_f64().unwrap_or(f64::NAN);
            row.exact = Some(format!("{}/{}", r.numer(), r.denom()));
        }
        Ok(v @ ExactValue::Estimate { .. }) => {
            row.estimator = Estimator::ExactSampled;
            row.value = v.to_f64();
            row.stderr = v.stderr();
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row.runtime_ms = elapsed_ms(start);
    row
}

/// Averages of `Fix w`, `Fix(w)²` and `Fix v · Fix w` over uniform
/// permutation tuples, for each word (and pair of words) and size. These
/// should stay bounded as `N` grows.
pub fn run_boundedness_probe(cfg: &ProbeConfig) -> Result<Vec<ProbeRow>> {
    if cfg.sizes.is_empty() || cfg.sizes.contains(&0) {
        return Err(Error::validation("sizes must be positive"));
    }
    if cfg.samples < 1 {
        return Err(Error::validation("samples must be at least 1"));
    }
    let words = cfg
        .words
        .iter()
        .map(|t| FreeWord::parse(t, cfg.s))
        .collect::<Result<Vec<_>>>()?;
    let mut jobs: Vec<(&str, String, Vec<FreeWord>)> = Vec::new();
    for w in &words {
        jobs.push(("fix", w.to_string(), vec![w.clone()]));
        jobs.push(("fix2", w.to_string(), vec![w.clone(), w.clone()]));
    }
    for (i, v) in words.iter().enumerate() {
        for w in &words[i + 1..] {
            jobs.push(("fixfix", format!("{v}|{w}"), vec![v.clone(), w.clone()]));
        }
    }
    let mut rows: Vec<ProbeRow> = jobs
        .par_iter()
        .flat_map_iter(|(stat, label, ws)| {
            cfg.sizes
                .iter()
                .map(move |&n| probe_row(cfg, stat, label.clone(), ws.clone(), n))
        })
        .collect();
    rows.sort_by(|a, b| (&a.word, &a.statistic, a.n).cmp(&(&b.word, &b.statistic, b.n)));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_examples() {
        let cfg = ProbeConfig {
            words: vec!["g1".into(), "g1^2".into()],
            sizes: vec![2, 3, 5, 7],
            ..Default::default()
        };
        let rows = run_boundedness_probe(&cfg).unwrap();
        for r in rows.iter().filter(|r| r.statistic == "fix") {
            let want = if r.word == "g1" { "1/1" } else { "2/1" };
            assert_eq!(r.exact.as_deref(), Some(want), "{} at {}", r.word, r.n);
        }
        // E Fix² of a single uniform permutation is 2 for n ≥ 2
        assert!(rows
            .iter()
            .filter(|r| r.statistic == "fix2" && r.word == "g1")
            .all(|r| r.exact.as_deref() == Some("2/1")));
        assert_eq!(rows.iter().filter(|r| r.statistic == "fixfix").count(), 4);
    }
}
