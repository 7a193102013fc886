//! Exact, enumeration-based distributions over small sample spaces `F_2^n`.
//!
//! Outcomes are bit-vectors packed into `u64` (bit `j` = coordinate `j`).

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on total probability mass.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Largest sample-space bit-length handled in exact mode.
pub const EXACT_MAX_BITS: u32 = 24;

/// A probability assignment over `F_2^n`, stored sparsely on its support.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteDistribution {
    n: u32,
    entries: BTreeMap<u64, f64>,
}

impl FiniteDistribution {
    pub fn new(n: u32, entries: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        if n > 64 {
            return Err(Error::InvalidParameter(format!("sample space F_2^{n} too large")));
        }
        let mut map = BTreeMap::new();
        for (x, p) in entries {
            if n < 64 && x >> n != 0 {
                return Err(Error::InvalidParameter(format!(
                    "outcome {x:#x} outside F_2^{n}"
                )));
            }
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::InvalidParameter(format!("invalid probability {p}")));
            }
            if p > 0.0 {
                *map.entry(x).or_insert(0.0) += p;
            }
        }
        let total = compensated_sum(map.values().copied());
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self { n, entries: map })
    }

    /// Empirical distribution from integer counts, probabilities `count / total`.
    pub fn from_counts(n: u32, counts: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let counts: Vec<(u64, u64)> = counts.into_iter().collect();
        let total: u64 = counts.iter().map(|&(_, c)| c).sum();
        if total == 0 {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(
            n,
            counts.into_iter().map(|(x, c)| (x, c as f64 / total as f64)),
        )
    }

    pub fn point_mass(n: u32, x: u64) -> Result<Self> {
        Self::new(n, [(x, 1.0)])
    }

    /// Uniform distribution on all of `F_2^n`.
    pub fn uniform(n: u32) -> Result<Self> {
        if n > EXACT_MAX_BITS {
            return Err(Error::Infeasible {
                needed: 1u128 << n,
                limit: 1u128 << EXACT_MAX_BITS,
            });
        }
        let p = (-(n as f64)).exp2();
        Self::new(n, (0..1u64 << n).map(|x| (x, p)))
    }

    /// Product distribution of `n` independent Bernoulli(p) bits.
    pub fn binomial_noise(n: u32, p: f64) -> Result<Self> {
        if n > EXACT_MAX_BITS {
            return Err(Error::Infeasible {
                needed: 1u128 << n,
                limit: 1u128 << EXACT_MAX_BITS,
            });
        }
        check_probability(p)?;
        Self::new(
            n,
            (0..1u64 << n).map(|x| (x, bernoulli_vector_probability(n, p, x.count_ones()))),
        )
    }

    pub fn bits(&self) -> u32 {
        self.n
    }

    pub fn probability(&self, x: u64) -> f64 {
        self.entries.get(&x).copied().unwrap_or(0.0)
    }

    /// `(outcome, probability)` pairs in ascending outcome order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.entries.iter().map(|(&x, &p)| (x, p))
    }

    pub fn support(&self) -> Vec<u64> {
        self.entries.keys().copied().collect()
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    /// `-log2` of the largest outcome probability.
    pub fn min_entropy(&self) -> f64 {
        let max = self.entries.values().copied().fold(0.0, f64::max);
        let h = -max.log2();
        if h.abs() < 1e-15 {
            0.0
        } else {
            h
        }
    }

    pub fn shannon_entropy(&self) -> f64 {
        self.entries
            .values()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.log2())
            .sum()
    }

    pub fn collision_probability(&self) -> f64 {
        self.entries.values().map(|p| p * p).sum()
    }

    /// Distance to the nearest distribution of min-entropy at least `m`:
    /// the total mass above the cap `2^-m`.
    pub fn closeness_to_minentropy(&self, m: f64) -> f64 {
        debug_assert!(m <= self.n as f64 + 1e-9, "target {m} exceeds {} bits", self.n);
        let cap = (-m).exp2();
        self.entries.values().map(|&p| (p - cap).max(0.0)).sum()
    }

    pub fn is_flat(&self) -> bool {
        let Some(&first) = self.entries.values().next() else {
            return false;
        };
        self.entries
            .values()
            .all(|&p| (p - first).abs() <= NORMALIZATION_TOLERANCE)
    }

    /// JSON form `{"n": .., "entries": [[hex-outcome, probability], ..]}`.
    pub fn to_json(&self) -> DistributionJson {
        DistributionJson {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|(&x, &p)| (format!("{x:x}"), p))
                .collect(),
        }
    }

    pub fn from_json(json: &DistributionJson) -> Result<Self> {
        let entries = json
            .entries
            .iter()
            .map(|(hex, p)| {
                u64::from_str_radix(hex.trim_start_matches("0x"), 16)
                    .map(|x| (x, *p))
                    .map_err(|e| Error::Parse(format!("bad outcome {hex:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(json.n, entries)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionJson {
    pub n: u32,
    pub entries: Vec<(String, f64)>,
}

/// Half the l1 distance between two distributions on the same space.
/// Neumaier summation; plain summation drifts past the normalization
/// tolerance on 2^16-point product distributions.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        carry += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + carry
}

pub fn statistical_distance(a: &FiniteDistribution, b: &FiniteDistribution) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::SampleSpaceMismatch(a.n, b.n));
    }
    let mut sum = 0.0;
    for (x, p) in a.iter() {
        sum += (p - b.probability(x)).abs();
    }
    for (x, q) in b.iter() {
        if !a.entries.contains_key(&x) {
            sum += q;
        }
    }
    Ok(0.5 * sum)
}

/// Mixture `sum_i alpha_i D_i`.
pub fn convex_combination(parts: &[(f64, &FiniteDistribution)]) -> Result<FiniteDistribution> {
    let n = parts
        .first()
        .map(|(_, d)| d.n)
        .ok_or_else(|| Error::InvalidParameter("empty convex combination".into()))?;
    let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
    for &(alpha, d) in parts {
        if d.n != n {
            return Err(Error::SampleSpaceMismatch(n, d.n));
        }
        if alpha < 0.0 {
            return Err(Error::InvalidParameter(format!("negative weight {alpha}")));
        }
        for (x, p) in d.iter() {
            *acc.entry(x).or_insert(0.0) += alpha * p;
        }
    }
    FiniteDistribution::new(n, acc)
}

/// Uniform distribution on an explicit support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatDistribution {
    n: u32,
    support: Vec<u64>,
}

impl FlatDistribution {
    /// Duplicates are removed and the support is kept in ascending order.
    pub fn new(n: u32, support: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut support: Vec<u64> = support.into_iter().collect();
        support.sort_unstable();
        support.dedup();
        if support.is_empty() {
            return Err(Error::InvalidParameter("flat distribution with empty support".into()));
        }
        if n < 64 && support.iter().any(|&x| x >> n != 0) {
            return Err(Error::InvalidParameter(format!("outcome outside F_2^{n}")));
        }
        Ok(Self { n, support })
    }

    /// All weight-`w` vectors of `F_2^n`.
    pub fn hamming_sphere(n: u32, w: u32) -> Result<Self> {
        if n > EXACT_MAX_BITS {
            return Err(Error::Infeasible {
                needed: 1u128 << n,
                limit: 1u128 << EXACT_MAX_BITS,
            });
        }
        Self::new(n, (0..1u64 << n).filter(|x| x.count_ones() == w))
    }

    pub fn bits(&self) -> u32 {
        self.n
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn size(&self) -> usize {
        self.support.len()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.support.binary_search(&x).is_ok()
    }

    pub fn min_entropy(&self) -> f64 {
        (self.support.len() as f64).log2()
    }

    /// Flat distribution on the union of both supports.
    pub fn union(&self, other: &FlatDistribution) -> Result<FlatDistribution> {
        if self.n != other.n {
            return Err(Error::SampleSpaceMismatch(self.n, other.n));
        }
        FlatDistribution::new(
            self.n,
            self.support.iter().chain(&other.support).copied(),
        )
    }

    pub fn to_distribution(&self) -> FiniteDistribution {
        let p = 1.0 / self.support.len() as f64;
        FiniteDistribution {
            n: self.n,
            entries: self.support.iter().map(|&x| (x, p)).collect(),
        }
    }
}

/// Preimage census of a mapping restricted to a flat source.
#[derive(Clone, Debug, PartialEq)]
pub struct Prop2Census {
    /// Support size `M`.
    pub m_size: usize,
    /// Images with exactly one preimage in the support.
    pub unique_images: usize,
    /// Images with two or more preimages.
    pub colliding_images: usize,
    /// `|T| + sum_{y in T'} n_y`; always equals `M`.
    pub preimage_total: usize,
    /// Exact distance of `f(X)` from min-entropy `log2 M`.
    pub epsilon: f64,
    /// `1 - |supp f(X)| / M`, the support deficit.
    pub support_deficit: f64,
}

impl Prop2Census {
    /// `|T| >= (1 - 2 eps) M` for the measured `eps`.
    pub fn unique_bound_holds(&self) -> bool {
        self.unique_images as f64 + 1e-9 >= (1.0 - 2.0 * self.epsilon) * self.m_size as f64
    }

    /// A support of size `(1 - d) M` gives closeness at most `d`.
    pub fn support_bound_holds(&self) -> bool {
        self.epsilon <= self.support_deficit + 1e-12
    }
}

pub fn prop2_census(x: &FlatDistribution, f: impl Fn(u64) -> u64) -> Prop2Census {
    let mut preimages: HashMap<u64, usize> = HashMap::new();
    for &v in x.support() {
        *preimages.entry(f(v)).or_insert(0) += 1;
    }
    let unique = preimages.values().filter(|&&c| c == 1).count();
    let colliding = preimages.values().filter(|&&c| c >= 2).count();
    let multi_total: usize = preimages.values().filter(|&&c| c >= 2).sum();
    let m = x.size();
    let cap = 1.0 / m as f64;
    let epsilon = preimages
        .values()
        .map(|&c| (c as f64 / m as f64 - cap).max(0.0))
        .sum();
    Prop2Census {
        m_size: m,
        unique_images: unique,
        colliding_images: colliding,
        preimage_total: unique + multi_total,
        epsilon,
        support_deficit: 1.0 - preimages.len() as f64 / m as f64,
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Probability of one specific weight-`w` vector under `B_{n,p}`.
fn bernoulli_vector_probability(n: u32, p: f64, w: u32) -> f64 {
    p.powi(w as i32) * (1.0 - p).powi((n - w) as i32)
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// `log2 C(n, w)`.
pub fn log2_binomial(n: u64, w: u64) -> f64 {
    assert!(w <= n, "w = {w} exceeds n = {n}");
    let w = w.min(n - w);
    (0..w)
        .map(|i| ((n - i) as f64 / (i + 1) as f64).log2())
        .sum()
}

/// Binary entropy `h(x)` in bits.
pub fn binary_entropy(x: f64) -> f64 {
    assert!((0.0..=1.0).contains(&x), "h({x}) undefined");
    if x == 0.0 || x == 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Weight distribution of `B_{n,p}`: entry `w` is `Pr[wgt = w]`.
pub fn binomial_pmf(n: u32, p: f64) -> Vec<f64> {
    (0..=n)
        .map(|w| {
            let log = log2_binomial(u64::from(n), u64::from(w));
            
            if p == 0.0 {
                if w == 0 { 1.0 } else { 0.0 }
            } else if p == 1.0 {
                if w == n { 1.0 } else { 0.0 }
            } else {
                (log + w as f64 * p.log2() + (n - w) as f64 * (1.0 - p).log2()).exp2()
            }
        })
        .collect()
}

/// `Pr[Bin(n, p) > k]`.
pub fn binomial_upper_tail(n: u32, p: f64, k: u32) -> f64 {
    binomial_pmf(n, p).iter().skip(k as usize + 1).sum::<f64>().min(1.0)
}

/// Exact (Clopper-Pearson) two-sided interval for a binomial proportion.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    use statrs::distribution::{Beta, ContinuousCDF};
    if trials == 0 {
        return (0.0, 1.0);
    }
    let alpha = 1.0 - confidence;
    let (x, n) = (successes as f64, trials as f64);
    let lo = if successes == 0 {
        0.0
    } else {
        Beta::new(x, n - x + 1.0).expect("positive shape").inverse_cdf(alpha / 2.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        Beta::new(x + 1.0, n - x).expect("positive shape").inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}

/// Split of `B_{n,p}` into the part with weight at most `floor(n p')` and
/// the remainder.
#[derive(Clone, Debug)]
pub struct BecDecomposition {
    pub n: u32,
    pub max_weight: u32,
    /// `Pr[wgt > n p']`.
    pub gamma: f64,
    /// `B_{n,p}` conditioned on weight at most `max_weight`.
    pub low: FiniteDistribution,
    /// `B_{n,p}` conditioned on weight above `max_weight`; `None` when `gamma = 0`.
    pub high: Option<FiniteDistribution>,
}

impl BecDecomposition {
    pub fn recombine(&self) -> Result<FiniteDistribution> {
        match &self.high {
            None => Ok(self.low.clone()),
            Some(high) => convex_combination(&[(1.0 - self.gamma, &self.low), (self.gamma, high)]),
        }
    }
}

/// Largest integer weight allowed by the threshold `n p'`.
pub fn weight_ceiling(n: u32, p_prime: f64) -> u32 {
    ((n as f64 * p_prime + 1e-9).floor().max(0.0) as u32).min(n)
}

pub fn bec_decomposition(n: u32, p: f64, p_prime: f64) -> Result<BecDecomposition> {
    check_probability(p)?;
    check_probability(p_prime)?;
    let full = FiniteDistribution::binomial_noise(n, p)?;
    let max_weight = weight_ceiling(n, p_prime);
    let (lo, hi): (Vec<_>, Vec<_>) = full.iter().partition(|&(x, _)| x.count_ones() <= max_weight);
    let low_mass: f64 = lo.iter().map(|&(_, q)| q).sum();
    let gamma: f64 = hi.iter().map(|&(_, q)| q).sum();
    let low = FiniteDistribution::new(n, lo.into_iter().map(|(x, q)| (x, q / low_mass)))?;
    let high = if gamma > 0.0 {
        Some(FiniteDistribution::new(
            n,
            hi.into_iter().map(|(x, q)| (x, q / gamma)),
        )?)
    } else {
        None
    };
    Ok(BecDecomposition {
        n,
        max_weight,
        gamma,
        low,
        high,
    })
}

/// Weight window `[ceil(n(p - eta)), floor(n(p + eta))]` of `B_{n,p}`.
#[derive(Clone, Debug)]
pub struct BscFlatDecomposition {
    pub n: u32,
    pub p: f64,
    pub eta: f64,
    /// `(weight, Pr[wgt = weight])` for weights in the window, ascending.
    pub alphas: Vec<(u32, f64)>,
    /// Mass outside the window.
    pub gamma: f64,
    /// Hoeffding bound `min(1, 2 exp(-2 eta^2 n))`.
    pub tail_bound: f64,
}

impl BscFlatDecomposition {
    pub fn weights(&self) -> impl Iterator<Item = u32> + '_ {
        self.alphas.iter().map(|&(w, _)| w)
    }

    pub fn tail_bound_holds(&self) -> bool {
        self.gamma <= self.tail_bound + 1e-15
    }

    /// Flat components `U_{n,i}` ordered by non-increasing support size,
    /// with their normalized weights `alpha_i / (1 - gamma)`.
    pub fn components(&self) -> Result<Vec<(f64, FlatDistribution)>> {
        let mass = 1.0 - self.gamma;
        let mut comps: Vec<(f64, FlatDistribution)> = self
            .alphas
            .iter()
            .map(|&(w, a)| Ok((a / mass, FlatDistribution::hamming_sphere(self.n, w)?)))
            .collect::<Result<_>>()?;
        comps.sort_by(|a, b| b.1.size().cmp(&a.1.size()).then(a.1.support()[0].cmp(&b.1.support()[0])));
        Ok(comps)
    }

    /// The tail distribution `D` (weights outside the window); `None` if empty.
    pub fn tail(&self) -> Result<Option<FiniteDistribution>> {
        if self.gamma <= 0.0 {
            return Ok(None);
        }
        let full = FiniteDistribution::binomial_noise(self.n, self.p)?;
        let inside: Vec<u32> = self.weights().collect();
        let outside: Vec<(u64, f64)> = full
            .iter()
            .filter(|(x, _)| !inside.contains(&x.count_ones()))
            .map(|(x, q)| (x, q / self.gamma))
            .collect();
        FiniteDistribution::new(self.n, outside).map(Some)
    }
}

pub fn bsc_flat_decomposition(n: u32, p: f64, eta: f64) -> Result<BscFlatDecomposition> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::InvalidParameter(format!("need 0 < p < 1/2, got {p}")));
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter(format!("need eta > 0, got {eta}")));
    }
    let lo_f = n as f64 * (p - eta);
    let hi_f = n as f64 * (p + eta);
    let lo = (lo_f - 1e-9).ceil().max(0.0) as u32;
    let hi = ((hi_f + 1e-9).floor() as i64).min(i64::from(n));
    if hi < i64::from(lo) {
        return Err(Error::EmptyWindow { lo: lo_f, hi: hi_f });
    }
    let hi = hi as u32;
    let pmf = binomial_pmf(n, p);
    let alphas: Vec<(u32, f64)> = (lo..=hi).map(|w| (w, pmf[w as usize])).collect();
    let inside: f64 = alphas.iter().map(|&(_, a)| a).sum();
    let gamma = (1.0 - inside).max(0.0);
    let tail_bound = (2.0 * (-2.0 * eta * eta * n as f64).exp()).min(1.0);
    Ok(BscFlatDecomposition {
        n,
        p,
        eta,
        alphas,
        gamma,
        tail_bound,
    })
}
