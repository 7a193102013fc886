//! Code ensembles built from seeded linear maps: ensemble F takes each
//! per-seed matrix as a parity-check matrix, ensemble G as a generator.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::channels::{erasure_pattern_sample, ErasureDistribution, RngStream};
use crate::condensers::{CondenserKind, LinearCondenser};
use crate::error::{Error, Result};
use crate::gf2::{rank_u64, BitMatrix, BitVec};
use crate::probability::clopper_pearson;

/// A binary linear code with both a generator and a parity-check matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    generator: BitMatrix,
    parity: BitMatrix,
}

impl LinearCode {
    /// Code `{x : H·x = 0}`; `H` need not have full rank.
    pub fn from_parity(parity: BitMatrix) -> Self {
        Self {
            generator: parity.right_kernel_basis(),
            parity,
        }
    }

    /// Row span of a full-row-rank generator.
    pub fn from_generator(generator: BitMatrix) -> Result<Self> {
        let rank = generator.rank();
        if rank != generator.rows() {
            return Err(Error::RankDeficient { rank, expected: generator.rows() });
        }
        Ok(Self {
            parity: generator.right_kernel_basis(),
            generator,
        })
    }

    pub fn n(&self) -> usize {
        self.generator.cols()
    }

    pub fn k(&self) -> usize {
        self.generator.rows()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn parity(&self) -> &BitMatrix {
        &self.parity
    }

    /// `x·G`.
    pub fn encode(&self, message: &BitVec) -> BitVec {
        self.generator.vec_mul(message)
    }

    pub fn contains(&self, y: &BitVec) -> bool {
        self.parity.mul_vec(y).is_zero()
    }

    /// The message `x` with `x·G = y`, if `y` is a codeword.
    pub fn message_of(&self, y: &BitVec) -> Option<BitVec> {
        self.generator.transpose().solve_affine(y).ok().map(|s| s.particular)
    }

    /// Subcode generated by the first `k` generator rows.
    pub fn subcode(&self, k: usize) -> Result<LinearCode> {
        if k > self.k() {
            return Err(Error::InvalidParameter(format!(
                "subcode dimension {k} exceeds code dimension {}",
                self.k()
            )));
        }
        let rows = self.generator.row_vecs()[..k].to_vec();
        LinearCode::from_generator(BitMatrix::from_rows(rows, self.n())?)
    }

    /// `code n k` header followed by the generator in matrix text format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "code {} {}", self.n(), self.k()).unwrap();
        s.push_str(&self.generator.to_text());
        s
    }

    /// Parity-check form: `code-parity n r` header then the parity matrix.
    pub fn to_parity_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "code-parity {} {}", self.n(), self.parity.rows()).unwrap();
        s.push_str(&self.parity.to_text());
        s
    }

    pub fn parse_text(text: &str) -> Result<LinearCode> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty code file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (kind, n, k) = match fields.as_slice() {
            [kind, n, k] => (
                *kind,
                n.parse::<usize>().map_err(|e| Error::Parse(format!("bad n: {e}")))?,
                k.parse::<usize>().map_err(|e| Error::Parse(format!("bad size: {e}")))?,
            ),
            _ => return Err(Error::Parse(format!("bad code header {header:?}"))),
        };
        let body: Vec<&str> = lines.collect();
        let m = BitMatrix::parse_text(&body.join("\n"))?;
        if m.cols() != n || m.rows() != k {
            return Err(Error::Parse(format!(
                "header says {k}x{n} but matrix is {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        match kind {
            "code" => LinearCode::from_generator(m),
            "code-parity" => Ok(LinearCode::from_parity(m)),
            other => Err(Error::Parse(format!("unknown code header {other:?}"))),
        }
    }
}

/// Whether the codeword is determined by its coordinates outside `erased`.
pub fn tolerates_erasure(code: &LinearCode, erased: &BitVec) -> bool {
    code.generator().select_columns(&erased.not()).rank() == code.k()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    /// Per-seed matrix is a parity-check matrix.
    F,
    /// Per-seed matrix is a generator matrix.
    G,
}

/// Rank repair of ensemble-G generators. `Disabled` keeps rank-deficient
/// matrices as they are and exists as a negative control.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankRepair {
    Enabled,
    Disabled,
}

#[derive(Clone, Debug)]
pub struct CodeEnsemble {
    kind: EnsembleKind,
    condenser: LinearCondenser,
    repair: RankRepair,
    size: u64,
}

impl CodeEnsemble {
    pub fn new(kind: EnsembleKind, condenser: LinearCondenser) -> Result<Self> {
        if let Some(claim) = condenser.params().claim {
            let expected = match kind {
                EnsembleKind::F => CondenserKind::Lossless,
                EnsembleKind::G => CondenserKind::Extractor,
            };
            if claim.kind != expected {
                return Err(Error::Precondition(format!(
                    "ensemble {kind:?} needs a {expected:?} claim, got {:?}",
                    claim.kind
                )));
            }
        }
        if kind == EnsembleKind::G && condenser.r() > condenser.n() {
            return Err(Error::InvalidParameter("generator has more rows than columns".into()));
        }
        let size = condenser.seed_count();
        Ok(Self { kind, condenser, repair: RankRepair::Enabled, size })
    }

    pub fn with_rank_repair(mut self, repair: RankRepair) -> Self {
        self.repair = repair;
        self
    }

    /// Restricts to the numerically first `s` seeds.
    pub fn first_seeds(mut self, s: u64) -> Result<Self> {
        if s == 0 || s > self.condenser.seed_count() {
            return Err(Error::InvalidParameter(format!(
                "cannot take {s} of {} seeds",
                self.condenser.seed_count()
            )));
        }
        self.size = s;
        Ok(self)
    }

    pub fn kind(&self) -> EnsembleKind {
        self.kind
    }

    pub fn condenser(&self) -> &LinearCondenser {
        &self.condenser
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn n(&self) -> usize {
        self.condenser.n()
    }

    /// The seed's generator (ensemble G, repaired per the repair mode).
    pub fn generator_for_seed(&self, seed: u64) -> BitMatrix {
        let m = self.condenser.matrix_for_seed(seed);
        match (self.kind, self.repair) {
            (EnsembleKind::G, RankRepair::Enabled) => rank_repair(&m),
            (EnsembleKind::G, RankRepair::Disabled) => m,
            (EnsembleKind::F, _) => m.right_kernel_basis(),
        }
    }

    pub fn code(&self, seed: u64) -> Result<LinearCode> {
        assert!(seed < self.size, "seed {seed} outside ensemble of size {}", self.size);
        match self.kind {
            EnsembleKind::F => Ok(LinearCode::from_parity(self.condenser.matrix_for_seed(seed))),
            EnsembleKind::G => LinearCode::from_generator(self.generator_for_seed(seed)),
        }
    }

    /// Generators of all codes as packed rows; requires `n <= 64`.
    fn packed_generators(&self) -> Vec<Vec<u64>> {
        assert!(self.n() <= 64);
        (0..self.size)
            .into_par_iter()
            .map(|u| self.generator_for_seed(u).u64_rows())
            .collect()
    }
}

/// Replaces each dependent row (ascending) by the first unit vector that
/// raises the rank of the rows kept so far.
pub fn rank_repair(m: &BitMatrix) -> BitMatrix {
    let n = m.cols();
    let mut kept = BitMatrix::zeros(0, n);
    let mut rank = 0;
    for row in m.row_vecs() {
        let mut trial = kept.clone();
        trial.push_row(row.clone());
        if trial.rank() > rank {
            kept = trial;
            rank += 1;
            continue;
        }
        let unit = (0..n)
            .map(|j| BitVec::unit(n, j))
            .find(|e| {
                let mut t = kept.clone();
                t.push_row(e.clone());
                t.rank() > rank
            })
            .expect("fewer rows than columns leaves a free unit vector");
        kept.push_row(unit);
        rank += 1;
    }
    kept
}

fn tolerates_packed(rows: &[u64], erased: u64) -> bool {
    let keep = !erased;
    let restricted: Vec<u64> = rows.iter().map(|r| r & keep).collect();
    rank_u64(&restricted) == rows.len()
}

/// Fraction of codes that tolerate `erased`.
pub fn tolerance_census(ens: &CodeEnsemble, erased: &BitVec) -> f64 {
    tolerance_census_many(ens, std::slice::from_ref(erased))[0]
}

/// [`tolerance_census`] for several patterns, sharing the generator build.
pub fn tolerance_census_many(ens: &CodeEnsemble, patterns: &[BitVec]) -> Vec<f64> {
    let gens = ens.packed_generators();
    let masks: Vec<u64> = patterns.iter().map(BitVec::to_u64).collect();
    masks
        .par_iter()
        .map(|&s| {
            let ok = gens.iter().filter(|g| tolerates_packed(g, s)).count();
            ok as f64 / gens.len() as f64
        })
        .collect()
}

/// Seed-averaged error of the ensemble's map on the coordinate source the
/// erasure argument uses for `erased`:
/// - F: source free on `S`, lossless target `|S|`, map `H_u`;
/// - G: source free on the complement of `S`, extractor target `k`, map `G_u`.
///
/// The image of a coordinate source is flat on `2^rank` points, so the
/// per-seed error is `max(0, 1 - 2^(rank - target))`.
pub fn erasure_source_epsilon(ens: &CodeEnsemble, erased: &BitVec) -> f64 {
    erasure_source_epsilons(ens, std::slice::from_ref(erased))[0]
}

pub fn erasure_source_epsilons(ens: &CodeEnsemble, patterns: &[BitVec]) -> Vec<f64> {
    let mats: Vec<Vec<u64>> = (0..ens.size())
        .into_par_iter()
        .map(|u| match ens.kind() {
            EnsembleKind::F => ens.condenser().matrix_for_seed(u).u64_rows(),
            EnsembleKind::G => ens.generator_for_seed(u).u64_rows(),
        })
        .collect();
    let k = ens.condenser().r();
    patterns
        .par_iter()
        .map(|s| {
            let (cols, target) = match ens.kind() {
                EnsembleKind::F => (s.to_u64(), s.weight()),
                EnsembleKind::G => (s.not().to_u64(), k),
            };
            let total: f64 = mats
                .iter()
                .map(|rows| {
                    let restricted: Vec<u64> = rows.iter().map(|r| r & cols).collect();
                    let rank = rank_u64(&restricted) as f64;
                    (1.0 - (rank - target as f64).exp2()).max(0.0)
                })
                .sum();
            total / mats.len() as f64
        })
        .collect()
}

/// Every subset of `[n]` of size at most `max_weight`, by weight then
/// lexicographically.
pub fn patterns_up_to(n: usize, max_weight: usize) -> Vec<BitVec> {
    (0..=max_weight.min(n))
        .flat_map(|w| crate::condensers::combinations(n, w))
        .map(|c| {
            let mut v = BitVec::zeros(n);
            c.into_iter().for_each(|i| v.set(i, true));
            v
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct RandomPatternCensus {
    pub trials_per_code: u64,
    /// Erasure-decoding failures per code, in seed order.
    pub failures: Vec<u64>,
    /// Per-code failure threshold (`sqrt(3 eps)` plus any slack).
    pub threshold: f64,
    /// Codes whose failure rate is significantly above `threshold`
    /// (Clopper-Pearson lower bound at 95% exceeds it).
    pub bad_codes: usize,
}

impl RandomPatternCensus {
    pub fn failure_rates(&self) -> Vec<f64> {
        self.failures
            .iter()
            .map(|&f| f as f64 / self.trials_per_code as f64)
            .collect()
    }

    pub fn bad_fraction(&self) -> f64 {
        self.bad_codes as f64 / self.failures.len() as f64
    }

    /// Fraction of codes whose point estimate is within `threshold`.
    pub fn good_fraction(&self) -> f64 {
        let ok = self
            .failure_rates()
            .iter()
            .filter(|&&r| r <= self.threshold)
            .count();
        ok as f64 / self.failures.len() as f64
    }
}

/// Monte-Carlo tolerance of sampled patterns, `trials` patterns per code,
/// each code on its own stream `(master_seed, seed index)`.
pub fn random_pattern_census(
    ens: &CodeEnsemble,
    dist: &ErasureDistribution,
    trials: u64,
    master_seed: u64,
    threshold: f64,
) -> Result<RandomPatternCensus> {
    if dist.len() != ens.n() {
        return Err(Error::Dimension(format!(
            "patterns of length {} for codes of length {}",
            dist.len(),
            ens.n()
        )));
    }
    let gens = ens.packed_generators();
    let failures: Vec<u64> = gens
        .par_iter()
        .enumerate()
        .map(|(u, g)| {
            let mut rng = RngStream::for_trial(master_seed, u as u64);
            let mut fails = 0;
            for _ in 0..trials {
                let s = erasure_pattern_sample(dist, &mut rng)?;
                if !tolerates_packed(g, s.to_u64()) {
                    fails += 1;
                }
            }
            Ok(fails)
        })
        .collect::<Result<_>>()?;
    let bad_codes = failures
        .iter()
        .filter(|&&f| clopper_pearson(f, trials, 0.95).0 > threshold)
        .count();
    Ok(RandomPatternCensus { trials_per_code: trials, failures, threshold, bad_codes })
}

/// Structural checks over every seed of the ensemble.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnsembleInvariants {
    /// Seeds whose generator has rank below its row count (ensemble G) or
    /// whose dimension is below `n - r` (ensemble F).
    pub rank_failures: Vec<u64>,
    /// Seeds where `G·H^T != 0`.
    pub orthogonality_failures: Vec<u64>,
}

impl EnsembleInvariants {
    pub fn holds(&self) -> bool {
        self.rank_failures.is_empty() && self.orthogonality_failures.is_empty()
    }
}

pub fn ensemble_invariants(ens: &CodeEnsemble) -> EnsembleInvariants {
    let (n, r) = (ens.n(), ens.condenser().r());
    let results: Vec<(u64, bool, bool)> = (0..ens.size())
        .into_par_iter()
        .map(|u| {
            let gen = ens.generator_for_seed(u);
            let rank_ok = match ens.kind() {
                EnsembleKind::G => gen.rank() == r,
                EnsembleKind::F => gen.rows() >= n - r,
            };
            let parity = match ens.kind() {
                EnsembleKind::F => ens.condenser().matrix_for_seed(u),
                EnsembleKind::G => gen.right_kernel_basis(),
            };
            let orth_ok = gen.mul(&parity.transpose()).is_zero();
            (u, rank_ok, orth_ok)
        })
        .collect();
    EnsembleInvariants {
        rank_failures: results.iter().filter(|t| !t.1).map(|t| t.0).collect(),
        orthogonality_failures: results.iter().filter(|t| !t.2).map(|t| t.0).collect(),
    }
}
