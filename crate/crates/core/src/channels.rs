//! Binary channels and reproducible noise sampling.

use rand::seq::index::sample as sample_indices;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::probability::{binary_entropy, binomial_pmf, DistributionJson, FiniteDistribution};

/// Seeded random stream. Trial `i` of an experiment with master seed `s`
/// always sees the same bits, independent of thread scheduling.
#[derive(Clone, Debug)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Private stream for trial `index` under `master_seed`.
    pub fn for_trial(master_seed: u64, index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(index);
        Self { inner }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        if p <= 0.0 {
            false
        } else if p >= 1.0 {
            true
        } else {
            self.inner.gen::<f64>() < p
        }
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.inner.gen()
    }

    pub fn below(&mut self, bound: u64) -> u64 {
        self.inner.gen_range(0..bound)
    }

    pub fn bits(&mut self, len: usize) -> BitVec {
        let mut v = BitVec::zeros(len);
        for i in 0..len {
            if self.inner.next_u32() & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Channel {
    Bec(f64),
    Bsc(f64),
    /// Block-wise additive noise `Y = X + Z` over `F_2^n`.
    Additive(FiniteDistribution),
}

/// Channel output. Erased positions have `erasures` set and a zero data bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Received {
    pub data: BitVec,
    pub erasures: BitVec,
}

impl Received {
    pub fn erased_count(&self) -> usize {
        self.erasures.weight()
    }
}

impl Channel {
    pub fn bec(p: f64) -> Result<Self> {
        check_unit(p)?;
        Ok(Channel::Bec(p))
    }

    pub fn bsc(p: f64) -> Result<Self> {
        check_unit(p)?;
        Ok(Channel::Bsc(p))
    }

    pub fn additive(noise: FiniteDistribution) -> Result<Self> {
        if noise.bits() > 64 {
            return Err(Error::InvalidParameter("additive noise block above 64 bits".into()));
        }
        Ok(Channel::Additive(noise))
    }

    /// Capacity in bits per binary channel use.
    pub fn capacity(&self) -> f64 {
        match self {
            Channel::Bec(p) => 1.0 - p,
            Channel::Bsc(p) => 1.0 - binary_entropy(*p),
            Channel::Additive(z) => {
                let n = f64::from(z.bits());
                (n - z.shannon_entropy()) / n
            }
        }
    }

    pub fn transmit(&self, codeword: &BitVec, rng: &mut RngStream) -> Result<Received> {
        let n = codeword.len();
        match self {
            Channel::Bec(p) => {
                let mut data = codeword.clone();
                let mut erasures = BitVec::zeros(n);
                for i in 0..n {
                    if rng.bernoulli(*p) {
                        erasures.set(i, true);
                        data.set(i, false);
                    }
                }
                Ok(Received { data, erasures })
            }
            Channel::Bsc(p) => {
                let mut data = codeword.clone();
                for i in 0..n {
                    if rng.bernoulli(*p) {
                        data.flip(i);
                    }
                }
                Ok(Received {
                    data,
                    erasures: BitVec::zeros(n),
                })
            }
            Channel::Additive(z) => {
                if z.bits() as usize != n {
                    return Err(Error::Dimension(format!(
                        "codeword length {n} but noise block is {} bits",
                        z.bits()
                    )));
                }
                let noise = BitVec::from_u64(sample_outcome(z, rng), n);
                Ok(Received {
                    data: codeword.xor(&noise),
                    erasures: BitVec::zeros(n),
                })
            }
        }
    }

    pub fn to_json(&self) -> ChannelJson {
        match self {
            Channel::Bec(p) => ChannelJson {
                kind: "bec".into(),
                p: Some(*p),
                noise: None,
            },
            Channel::Bsc(p) => ChannelJson {
                kind: "bsc".into(),
                p: Some(*p),
                noise: None,
            },
            Channel::Additive(z) => ChannelJson {
                kind: "additive".into(),
                p: None,
                noise: Some(z.to_json()),
            },
        }
    }

    pub fn from_json(json: &ChannelJson) -> Result<Self> {
        let need_p = || {
            json.p
                .ok_or_else(|| Error::Config(format!("channel {:?} needs \"p\"", json.kind)))
        };
        match json.kind.as_str() {
            "bec" => Channel::bec(need_p()?),
            "bsc" => Channel::bsc(need_p()?),
            "additive" => {
                let noise = json
                    .noise
                    .as_ref()
                    .ok_or_else(|| Error::Config("additive channel needs \"noise\"".into()))?;
                Channel::additive(FiniteDistribution::from_json(noise)?)
            }
            other => Err(Error::Config(format!("unknown channel kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<DistributionJson>,
}

/// Inverse-CDF draw over the support in ascending outcome order.
pub fn sample_outcome(d: &FiniteDistribution, rng: &mut RngStream) -> u64 {
    let u = rng.unit();
    let mut acc = 0.0;
    let mut last = 0;
    for (x, p) in d.iter() {
        acc += p;
        last = x;
        if u < acc {
            return x;
        }
    }
    last
}

/// Distribution of erasure patterns `S ⊆ [n]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ErasureDistribution {
    /// Each position erased independently with probability `p`.
    Iid { n: usize, p: f64 },
    /// `B_{n,p}` conditioned on weight at most `max_weight`.
    TruncatedBinomial { n: usize, p: f64, max_weight: usize },
    /// Always the same set.
    Explicit { n: usize, positions: Vec<usize> },
}

impl ErasureDistribution {
    pub fn len(&self) -> usize {
        match self {
            ErasureDistribution::Iid { n, .. }
            | ErasureDistribution::TruncatedBinomial { n, .. }
            | ErasureDistribution::Explicit { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Probabilities of each weight `0..=n`.
    pub fn weight_pmf(&self) -> Vec<f64> {
        match self {
            ErasureDistribution::Iid { n, p } => binomial_pmf(*n as u32, *p),
            ErasureDistribution::TruncatedBinomial { n, p, max_weight } => {
                truncated_weight_pmf(*n, *p, *max_weight)
            }
            ErasureDistribution::Explicit { n, positions } => {
                let mut pmf = vec![0.0; n + 1];
                pmf[positions.len()] = 1.0;
                pmf
            }
        }
    }
}

fn truncated_weight_pmf(n: usize, p: f64, max_weight: usize) -> Vec<f64> {
    let mut pmf = binomial_pmf(n as u32, p);
    for v in pmf.iter_mut().skip(max_weight + 1) {
        *v = 0.0;
    }
    let mass: f64 = pmf.iter().sum();
    pmf.iter_mut().for_each(|v| *v /= mass);
    pmf
}

/// Draws an erasure set as a length-`n` mask.
pub fn erasure_pattern_sample(dist: &ErasureDistribution, rng: &mut RngStream) -> Result<BitVec> {
    match dist {
        ErasureDistribution::Iid { n, p } => {
            check_unit(*p)?;
            let mut s = BitVec::zeros(*n);
            for i in 0..*n {
                if rng.bernoulli(*p) {
                    s.set(i, true);
                }
            }
            Ok(s)
        }
        ErasureDistribution::TruncatedBinomial { n, p, max_weight } => {
            check_unit(*p)?;
            let max_weight = (*max_weight).min(*n);
            if *p == 1.0 && max_weight < *n {
                return Err(Error::InvalidParameter(
                    "B_{n,1} has no mass at weight below n".into(),
                ));
            }
            let pmf = truncated_weight_pmf(*n, *p, max_weight);
            let u = rng.unit();
            let mut acc = 0.0;
            let mut w = max_weight;
            for (k, &q) in pmf.iter().enumerate().take(max_weight + 1) {
                acc += q;
                if u < acc {
                    w = k;
                    break;
                }
            }
            let mut s = BitVec::zeros(*n);
            for i in sample_indices(rng, *n, w) {
                s.set(i, true);
            }
            Ok(s)
        }
        ErasureDistribution::Explicit { n, positions } => {
            let mut s = BitVec::zeros(*n);
            for &i in positions {
                if i >= *n {
                    return Err(Error::InvalidParameter(format!("position {i} outside [0, {n})")));
                }
                s.set(i, true);
            }
            Ok(s)
        }
    }
}

fn check_unit(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn capacities() {
        assert_eq!(Channel::bsc(0.0).unwrap().capacity(), 1.0);
        assert_eq!(Channel::bsc(0.5).unwrap().capacity(), 0.0);
        assert!((Channel::bec(0.3).unwrap().capacity() - 0.7).abs() < 1e-15);
        assert!((Channel::bsc(0.11).unwrap().capacity() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn additive_capacity_matches_bsc() {
        for n in 1..=10 {
            for &p in &[0.05, 0.11, 0.3] {
                let z = FiniteDistribution::binomial_noise(n, p).unwrap();
                let add = Channel::additive(z).unwrap().capacity();
                assert!((add - Channel::Bsc(p).capacity()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn noiseless_and_inverting_channels() {
        let mut rng = RngStream::new(1);
        let x = BitVec::from_u64(0b1011_0110, 8);
        for ch in [Channel::Bec(0.0), Channel::Bsc(0.0)] {
            let out = ch.transmit(&x, &mut rng).unwrap();
            assert_eq!(out.data, x);
            assert!(out.erasures.is_zero());
        }
        let z = Channel::additive(FiniteDistribution::point_mass(8, 0).unwrap()).unwrap();
        assert_eq!(z.transmit(&x, &mut rng).unwrap().data, x);
        assert_eq!(Channel::Bsc(1.0).transmit(&x, &mut rng).unwrap().data, x.not());
        let all = Channel::Bec(1.0).transmit(&x, &mut rng).unwrap();
        assert_eq!(all.erased_count(), 8);
        assert!(all.data.is_zero());
    }

    #[test]
    fn additive_rejects_wrong_block() {
        let z = Channel::additive(FiniteDistribution::uniform(4).unwrap()).unwrap();
        assert!(z.transmit(&BitVec::zeros(5), &mut RngStream::new(0)).is_err());
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let ch = Channel::Bsc(0.3);
        let x = BitVec::zeros(200);
        let run = |trial| ch.transmit(&x, &mut RngStream::for_trial(9, trial)).unwrap().data;
        assert_eq!(run(3), run(3));
        assert_ne!(run(3), run(4));
    }

    // Two-sample Kolmogorov-Smirnov on flip weights at alpha = 0.001.
    #[test]
    fn bsc_and_binomial_additive_agree_in_distribution() {
        let (n, p, trials) = (16usize, 0.2, 4000);
        let bsc = Channel::Bsc(p);
        let add = Channel::additive(FiniteDistribution::binomial_noise(n as u32, p).unwrap()).unwrap();
        let x = BitVec::zeros(n);
        let mut hist_a = vec![0usize; n + 1];
        let mut hist_b = vec![0usize; n + 1];
        let mut rng = RngStream::new(77);
        for _ in 0..trials {
            hist_a[bsc.transmit(&x, &mut rng).unwrap().data.weight()] += 1;
            hist_b[add.transmit(&x, &mut rng).unwrap().data.weight()] += 1;
        }
        let (mut ca, mut cb, mut d) = (0.0, 0.0, 0.0f64);
        for w in 0..=n {
            ca += hist_a[w] as f64 / trials as f64;
            cb += hist_b[w] as f64 / trials as f64;
            d = d.max((ca - cb).abs());
        }
        let critical = 1.95 * (2.0 / trials as f64).sqrt();
        assert!(d < critical, "KS statistic {d} >= {critical}");
    }

    #[test]
    fn erasure_extremes() {
        let mut rng = RngStream::new(2);
        let none = erasure_pattern_sample(&ErasureDistribution::Iid { n: 12, p: 0.0 }, &mut rng).unwrap();
        assert!(none.is_zero());
        let all = erasure_pattern_sample(&ErasureDistribution::Iid { n: 12, p: 1.0 }, &mut rng).unwrap();
        assert_eq!(all.weight(), 12);
        let fixed = ErasureDistribution::Explicit { n: 6, positions: vec![1, 4] };
        assert_eq!(erasure_pattern_sample(&fixed, &mut rng).unwrap(), BitVec::from_u64(0b10010, 6));
    }

    #[test]
    fn truncated_binomial_weights_pass_chi_square() {
        let (n, p, m) = (20usize, 0.2, 4usize);
        let dist = ErasureDistribution::TruncatedBinomial { n, p, max_weight: m };
        let samples = 100_000;
        let mut counts = vec![0usize; m + 1];
        let mut rng = RngStream::new(5);
        for _ in 0..samples {
            let w = erasure_pattern_sample(&dist, &mut rng).unwrap().weight();
            assert!(w <= m);
            counts[w] += 1;
        }
        // Expected masses from integer binomials, independent of `binomial_pmf`.
        let raw: Vec<f64> = (0..=m as u64)
            .map(|w| {
                crate::probability::binomial(n as u64, w) as f64
                    * p.powi(w as i32)
                    * (1.0 - p).powi((n as u64 - w) as i32)
            })
            .collect();
        let mass: f64 = raw.iter().sum();
        let chi2: f64 = raw
            .iter()
            .zip(&counts)
            .map(|(&q, &c)| {
                let e = q / mass * samples as f64;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        let critical = ChiSquared::new(m as f64).unwrap().inverse_cdf(0.999);
        assert!(chi2 < critical, "chi^2 = {chi2} >= {critical}");
    }

    #[test]
    fn channel_json_round_trip() {
        let ch = Channel::additive(FiniteDistribution::binomial_noise(3, 0.25).unwrap()).unwrap();
        let text = serde_json::to_string(&ch.to_json()).unwrap();
        let back: ChannelJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Channel::from_json(&back).unwrap(), ch);
        let bec: ChannelJson = serde_json::from_str(r#"{"kind":"bec","p":0.2}"#).unwrap();
        assert_eq!(Channel::from_json(&bec).unwrap(), Channel::Bec(0.2));
        let bad: ChannelJson = serde_json::from_str(r#"{"kind":"bsc"}"#).unwrap();
        assert!(Channel::from_json(&bad).is_err());
    }
}
