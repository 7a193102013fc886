use std::io::Write;
use std::path::Path;
use std::time::Duration;

use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct MetricRow {
    pub metric: String,
    pub value: f64,
    /// 95% interval (Clopper-Pearson for rates, Hoeffding for sampled means).
    pub ci: Option<(f64, f64)>,
    pub trials: u64,
}

impl MetricRow {
    pub fn exact(metric: impl Into<String>, value: f64) -> Self {
        Self { metric: metric.into(), value, ci: None, trials: 0 }
    }

    pub fn sampled(metric: impl Into<String>, value: f64, ci: (f64, f64), trials: u64) -> Self {
        Self { metric: metric.into(), value, ci: Some(ci), trials }
    }
}

#[derive(Clone, Debug)]
pub struct ResultRecord {
    pub experiment: String,
    pub config_digest: String,
    pub seed: u64,
    pub rows: Vec<MetricRow>,
    /// Not written to the CSV, which stays byte-identical across runs.
    pub wall_clock: Duration,
}

impl ResultRecord {
    pub const HEADER: [&'static str; 7] = ["experiment", "metric", "value", "ci_low", "ci_high", "trials", "seed"];

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::HEADER)?;
        for row in &self.rows {
            let (lo, hi) = match row.ci {
                Some((lo, hi)) => (lo.to_string(), hi.to_string()),
                None => (String::new(), String::new()),
            };
            w.write_record([
                self.experiment.clone(),
                row.metric.clone(),
                row.value.to_string(),
                lo,
                hi,
                row.trials.to_string(),
                self.seed.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv is utf-8"))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn get(&self, metric: &str) -> Option<&MetricRow> {
        self.rows.iter().find(|r| r.metric == metric)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let rec = ResultRecord {
            experiment: "concat-sim".into(),
            config_digest: String::new(),
            seed: 7,
            rows: vec![MetricRow::exact("a", 0.5), MetricRow::sampled("b", 0.25, (0.125, 0.375), 40)],
            wall_clock: Duration::ZERO,
        };
        let text = rec.to_csv_string().unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "experiment,metric,value,ci_low,ci_high,trials,seed");
        assert_eq!(lines[1], "concat-sim,a,0.5,,,0,7");
        assert_eq!(lines[2], "concat-sim,b,0.25,0.125,0.375,40,7");
    }
}
