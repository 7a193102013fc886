use std::time::Instant;

use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind};
use super::record::{MetricRow, ResultRecord};
use crate::channels::{Channel, ErasureDistribution, RngStream};
use crate::concat::{concat_error_experiment, ConcatenatedCode, InnerDecoder};
use crate::condensers::{
    image_closeness, source_panel, verify_condenser, AffineSource, CondenserKind, LinearCondenser,
};
use crate::decoders::{exact_mixture_error_probability, tuned_brute_force_decode};
use crate::ensembles::{
    erasure_source_epsilons, patterns_up_to, random_pattern_census, tolerance_census_many, CodeEnsemble, EnsembleKind,
};
use crate::error::{Error, Result};
use crate::probability::{bsc_flat_decomposition, clopper_pearson, FlatDistribution};

/// Runs the configured experiment and writes the CSV when `out` is set.
pub fn run(cfg: &ExperimentConfig) -> Result<ResultRecord> {
    cfg.validate()?;
    let start = Instant::now();
    let rows = match cfg.experiment {
        ExperimentKind::VerifyCondenser => verify(cfg)?,
        ExperimentKind::ErasureCensus => erasure_census(cfg)?,
        ExperimentKind::BscCensus => bsc_census(cfg)?,
        ExperimentKind::ConcatSim => concat_sim(cfg)?,
        ExperimentKind::DualityScan => duality_scan(cfg)?,
    };
    let record = ResultRecord {
        experiment: cfg.experiment.as_str().into(),
        config_digest: cfg.digest(),
        seed: cfg.seed,
        rows,
        wall_clock: start.elapsed(),
    };
    if let Some(path) = &cfg.out {
        record.save(path)?;
    }
    Ok(record)
}

fn condenser(cfg: &ExperimentConfig) -> Result<LinearCondenser> {
    LinearCondenser::from_descriptor(cfg.condenser.as_ref().expect("validated"))
}

fn channel(cfg: &ExperimentConfig) -> Result<Channel> {
    Channel::from_json(cfg.channel.as_ref().expect("validated"))
}

/// Half-width of the two-sided 95% Hoeffding interval for a mean of
/// `trials` values in [0, 1].
fn hoeffding_half_width(trials: u64) -> f64 {
    ((2.0f64 / 0.05).ln() / (2.0 * trials as f64)).sqrt()
}

fn verify(cfg: &ExperimentConfig) -> Result<Vec<MetricRow>> {
    let f = condenser(cfg)?;
    let m = cfg.entropy.expect("validated");
    let target = match f.params().claim.map(|c| c.kind) {
        Some(CondenserKind::Extractor) => f.r() as f64,
        _ => m as f64,
    };
    let panel = source_panel(f.n(), m, cfg.sources.unwrap_or(20), cfg.seed)?;
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for (i, x) in panel.iter().enumerate() {
        let metric = format!("epsilon[source={i}]");
        match verify_condenser(&f, x, target) {
            Ok(e) => {
                worst = worst.max(e);
                rows.push(MetricRow::exact(metric, e));
            }
            // Too many (seed, point) pairs: average the exact per-seed error
            // over sampled seeds, which is unbiased for the seed average.
            Err(Error::Infeasible { .. }) if cfg.trials > 0 => {
                let mut rng = RngStream::for_trial(cfg.seed, i as u64);
                let seeds: Vec<u64> = (0..cfg.trials).map(|_| rng.below(f.seed_count())).collect();
                let total: f64 = seeds
                    .par_iter()
                    .map(|&z| image_closeness(&f.matrix_for_seed(z), x.support(), target))
                    .sum();
                let mean = total / cfg.trials as f64;
                let h = hoeffding_half_width(cfg.trials);
                worst = worst.max(mean);
                rows.push(MetricRow::sampled(metric, mean, ((mean - h).max(0.0), (mean + h).min(1.0)), cfg.trials));
            }
            Err(e) => return Err(e),
        }
    }
    rows.push(MetricRow::exact("max_epsilon", worst));
    Ok(rows)
}

fn erasure_census(cfg: &ExperimentConfig) -> Result<Vec<MetricRow>> {
    let ens = CodeEnsemble::new(cfg.ensemble.expect("validated"), condenser(cfg)?)?;
    let budget = cfg.entropy.expect("validated");
    let patterns = patterns_up_to(ens.n(), budget);
    let tolerant = tolerance_census_many(&ens, &patterns);
    let eps = erasure_source_epsilons(&ens, &patterns);
    let mut rows = Vec::new();
    let mut violations = 0;
    for w in 0..=budget.min(ens.n()) {
        let (mut worst_fail, mut worst_eps) = (0.0f64, 0.0f64);
        for ((s, t), e) in patterns.iter().zip(&tolerant).zip(&eps) {
            if s.weight() == w {
                worst_fail = worst_fail.max(1.0 - t);
                worst_eps = worst_eps.max(*e);
                if 1.0 - t > 3.0 * e + 1e-12 {
                    violations += 1;
                }
            }
        }
        rows.push(MetricRow::exact(format!("intolerant_fraction[w={w}]"), worst_fail));
        rows.push(MetricRow::exact(format!("epsilon[w={w}]"), worst_eps));
    }
    rows.push(MetricRow::exact("violations", f64::from(violations)));
    if let (Some(Channel::Bec(p)), true) = (cfg.channel.as_ref().map(Channel::from_json).transpose()?, cfg.trials > 0) {
        let eps_max = eps.iter().copied().fold(0.0, f64::max);
        let dist = ErasureDistribution::Iid { n: ens.n(), p };
        let census = random_pattern_census(&ens, &dist, cfg.trials, cfg.seed, (3.0 * eps_max).sqrt())?;
        let fails: u64 = census.failures.iter().sum();
        let total = cfg.trials * census.failures.len() as u64;
        rows.push(MetricRow::sampled(
            "pattern_failure_rate",
            fails as f64 / total as f64,
            clopper_pearson(fails, total, 0.95),
            total,
        ));
        rows.push(MetricRow::exact("bad_code_fraction", census.bad_fraction()));
    }
    Ok(rows)
}

fn bsc_census(cfg: &ExperimentConfig) -> Result<Vec<MetricRow>> {
    let ens = CodeEnsemble::new(EnsembleKind::F, condenser(cfg)?)?;
    let Channel::Bsc(p) = channel(cfg)? else {
        return Err(Error::Config("bsc-census needs a bsc channel".into()));
    };
    let split = bsc_flat_decomposition(ens.n() as u32, p, cfg.eta.expect("validated"))?;
    let comps = split.components()?;
    let flats: Vec<FlatDistribution> = comps.iter().map(|(_, z)| z.clone()).collect();
    let weights: Vec<f64> = comps.iter().map(|(a, _)| *a).collect();
    let codes = (0..ens.size()).into_par_iter().map(|u| ens.code(u)).collect::<Result<Vec<_>>>()?;
    let errors = codes
        .par_iter()
        .map(|c| exact_mixture_error_probability(c, &flats, &weights))
        .collect::<Result<Vec<_>>>()?;
    let count = errors.len() as f64;
    let mut rows = vec![
        MetricRow::exact("components", flats.len() as f64),
        MetricRow::exact("gamma", split.gamma),
        MetricRow::exact("mean_decoder_error", errors.iter().map(|e| e.decoder).sum::<f64>() / count),
        MetricRow::exact("max_decoder_error", errors.iter().map(|e| e.decoder).fold(0.0, f64::max)),
        MetricRow::exact("mean_confusable", errors.iter().map(|e| e.confusable).sum::<f64>() / count),
    ];
    if cfg.trials > 0 {
        // Whole channel, tail included: random code, message and noise per trial.
        let ch = Channel::Bsc(p);
        let fails: u64 = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = RngStream::for_trial(cfg.seed, t);
                let code = &codes[rng.below(codes.len() as u64) as usize];
                let x = code.encode(&rng.bits(code.k()));
                let y = ch.transmit(&x, &mut rng)?;
                Ok(u64::from(tuned_brute_force_decode(code, &y.data, &flats)?.codeword != x))
            })
            .collect::<Result<Vec<u64>>>()?
            .into_iter()
            .sum();
        rows.push(MetricRow::sampled(
            "simulated_block_error",
            fails as f64 / cfg.trials as f64,
            clopper_pearson(fails, cfg.trials, 0.95),
            cfg.trials,
        ));
    }
    Ok(rows)
}

fn concat_sim(cfg: &ExperimentConfig) -> Result<Vec<MetricRow>> {
    let cc = ConcatenatedCode::from_descriptor(cfg.code.as_ref().expect("validated"))?;
    let ch = channel(cfg)?;
    let decoder = InnerDecoder::for_channel(&ch, cc.inner_len(), cfg.eta.unwrap_or(0.1))?;
    let exp = concat_error_experiment(&cc, &ch, &decoder, cfg.trials, cfg.seed)?;
    let t = cfg.trials;
    let blocks = t * cc.outer().len() as u64;
    let mut rows = vec![
        MetricRow::exact("rate", cc.rate()),
        MetricRow::exact("outer_radius", exp.radius as f64),
        MetricRow::sampled("block_error_rate", exp.block_error_rate(), exp.block_error_ci, t),
        MetricRow::sampled("inner_failure_rate", exp.inner_failure_rate, exp.inner_failure_ci, blocks),
        MetricRow::sampled("tail_observed", exp.tail_observed, exp.tail_ci, t),
        MetricRow::exact("tail_predicted", exp.tail_predicted),
        MetricRow::exact("tail_iid", exp.tail_iid),
        MetricRow::exact("tail_consistent", f64::from(u8::from(exp.tail_consistent()))),
    ];
    for (j, &c) in exp.histogram.iter().enumerate() {
        if c > 0 {
            rows.push(MetricRow::exact(format!("failed_blocks[{j}]"), c as f64));
        }
    }
    Ok(rows)
}

fn duality_scan(cfg: &ExperimentConfig) -> Result<Vec<MetricRow>> {
    if cfg.trials == 0 {
        return Ok(Vec::new());
    }
    let family = cfg.condenser.as_ref().map(LinearCondenser::from_descriptor).transpose()?;
    let outcomes = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = RngStream::for_trial(cfg.seed, t);
            let g = match &family {
                Some(f) => f.matrix_for_seed(rng.below(f.seed_count())),
                None => {
                    let n = 2 + rng.below(11) as usize;
                    let r = 1 + rng.below(n as u64 - 1) as usize;
                    AffineSource::random(n, r, &mut rng).basis().clone()
                }
            };
            if g.rank() != g.rows() || g.rows() >= g.cols() {
                return Ok(None);
            }
            let n = g.cols();
            let src = AffineSource::random(n, 1 + rng.below(n as u64) as usize, &mut rng);
            let m_prime = rng.below(src.image_dim(&g) as u64 + 1) as usize;
            let v = crate::condensers::duality_check(&g, &src, m_prime)?;
            Ok(Some(v.dual_image_rank as i64 - v.bound))
        })
        .collect::<Result<Vec<Option<i64>>>>()?;
    let slacks: Vec<i64> = outcomes.iter().flatten().copied().collect();
    let failures = slacks.iter().filter(|&&s| s < 0).count();
    Ok(vec![
        MetricRow::exact("instances", slacks.len() as f64),
        MetricRow::exact("skipped_rank_deficient", (outcomes.len() - slacks.len()) as f64),
        MetricRow::exact("failures", failures as f64),
        MetricRow::exact("min_slack", slacks.iter().copied().min().unwrap_or(0) as f64),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concat::ConcatDescriptor;

    #[test]
    fn zero_trial_duality_scan_is_empty() {
        let rec = run(&ExperimentConfig::new(ExperimentKind::DualityScan)).unwrap();
        assert!(rec.rows.is_empty());
        assert_eq!(rec.to_csv_string().unwrap().lines().count(), 1);
    }

    #[test]
    fn duality_scan_has_no_failures() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::DualityScan);
        cfg.trials = 500;
        let rec = run(&cfg).unwrap();
        assert_eq!(rec.get("failures").unwrap().value, 0.0);
        assert_eq!(rec.get("instances").unwrap().value, 500.0);
    }

    #[test]
    fn identity_truncation_has_zero_error() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::VerifyCondenser);
        cfg.condenser = Some(LinearCondenser::truncation(8, 8).unwrap().to_descriptor());
        cfg.entropy = Some(4);
        let rec = run(&cfg).unwrap();
        assert_eq!(rec.rows.len(), 21);
        assert!(rec.rows.iter().all(|r| r.value == 0.0));
    }

    #[test]
    fn sampled_fallback_brackets_exact_value() {
        // 2^16 seeds times 2^9 points is above the exact limit.
        let f = LinearCondenser::linear_hash_family(16, 6).unwrap();
        let mut cfg = ExperimentConfig::new(ExperimentKind::VerifyCondenser);
        cfg.condenser = Some(f.to_descriptor());
        cfg.entropy = Some(9);
        cfg.sources = Some(3);
        assert!(matches!(run(&cfg), Err(Error::Infeasible { .. })));
        cfg.trials = 4000;
        let rec = run(&cfg).unwrap();
        let row = rec.get("epsilon[source=0]").unwrap();
        let (lo, hi) = row.ci.unwrap();
        assert!(lo <= row.value && row.value <= hi && row.trials == 4000);
    }

    #[test]
    fn erasure_census_rows() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::ErasureCensus);
        cfg.condenser = Some(LinearCondenser::linear_hash_family(8, 4).unwrap().to_descriptor());
        cfg.ensemble = Some(EnsembleKind::G);
        cfg.entropy = Some(3);
        cfg.channel = Some(Channel::Bec(0.2).to_json());
        cfg.trials = 50;
        let rec = run(&cfg).unwrap();
        assert_eq!(rec.get("violations").unwrap().value, 0.0);
        assert_eq!(rec.get("intolerant_fraction[w=0]").unwrap().value, 0.0);
        assert!(rec.get("pattern_failure_rate").is_some());
    }

    #[test]
    fn bsc_census_rows() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::BscCensus);
        cfg.condenser = Some(LinearCondenser::linear_hash_family(8, 6).unwrap().to_descriptor());
        cfg.channel = Some(Channel::Bsc(0.1).to_json());
        cfg.eta = Some(0.1);
        cfg.trials = 300;
        let rec = run(&cfg).unwrap();
        let mean = rec.get("mean_decoder_error").unwrap().value;
        assert!(mean <= rec.get("mean_confusable").unwrap().value);
        assert!(rec.get("simulated_block_error").is_some());
    }

    #[test]
    fn concat_sim_is_reproducible() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::ConcatSim);
        cfg.code = Some(ConcatDescriptor {
            condenser: LinearCondenser::linear_hash_family(10, 6).unwrap().to_descriptor(),
            ensemble: EnsembleKind::G,
            k: 6,
            s: 16,
            k_prime: 12,
        });
        cfg.channel = Some(Channel::Bec(0.1).to_json());
        cfg.trials = 200;
        cfg.seed = 11;
        let a = run(&cfg).unwrap().to_csv_string().unwrap();
        let b = run(&cfg).unwrap().to_csv_string().unwrap();
        assert_eq!(a, b);
        assert!(a.contains("block_error_rate"));
    }
}
