//! Erasure decoding by elimination, syndrome-based brute-force decoding for
//! additive noise, and exact decoder error probabilities.
//!
//! Noise supports are scanned in numeric order of their packed integers,
//! which fixes every tie-break.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::channels::Received;
use crate::condensers::{verify_condenser, LinearCondenser};
use crate::ensembles::{CodeEnsemble, LinearCode};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::probability::{compensated_sum, FiniteDistribution, FlatDistribution};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeStatus {
    /// Exactly one consistent candidate.
    Success,
    /// Several candidates; one was chosen by the tie-break rule.
    AmbiguousResolved,
    /// No usable candidate; the estimate is a fixed fallback.
    Failure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    pub codeword: BitVec,
    pub message: BitVec,
    /// Noise estimate (brute-force decoders only).
    pub noise: Option<BitVec>,
}

/// `H·y`.
pub fn syndrome(parity: &BitMatrix, y: &BitVec) -> BitVec {
    parity.mul_vec(y)
}

/// Solves `x·G_{S̄} = y_{S̄}` on the unerased coordinates. Succeeds iff the
/// solution is unique; otherwise returns the particular solution with free
/// variables set to zero.
pub fn erasure_decode(code: &LinearCode, received: &Received) -> DecodeOutcome {
    let keep = received.erasures.not();
    let sub = code.generator().select_columns(&keep);
    let target = BitVec::from_bits(&keep.iter_ones().map(|i| received.data.get(i)).collect::<Vec<_>>());
    match sub.transpose().solve_affine(&target) {
        Ok(sol) => {
            let status = if sol.kernel.rows() == 0 {
                DecodeStatus::Success
            } else {
                DecodeStatus::Failure
            };
            DecodeOutcome {
                status,
                codeword: code.encode(&sol.particular),
                message: sol.particular,
                noise: None,
            }
        }
        Err(_) => fallback(code),
    }
}

fn fallback(code: &LinearCode) -> DecodeOutcome {
    DecodeOutcome {
        status: DecodeStatus::Failure,
        codeword: BitVec::zeros(code.n()),
        message: BitVec::zeros(code.k()),
        noise: None,
    }
}

fn packed_parity(code: &LinearCode) -> Result<BitMatrix> {
    if code.n() > 64 || code.parity().rows() > 64 {
        return Err(Error::InvalidParameter("brute-force decoding needs n <= 64".into()));
    }
    Ok(code.parity().clone())
}

fn outcome_for(code: &LinearCode, received: &BitVec, z: u64, candidates: usize) -> DecodeOutcome {
    let noise = BitVec::from_u64(z, code.n());
    let codeword = received.xor(&noise);
    let message = code.message_of(&codeword).expect("zero syndrome means codeword");
    DecodeOutcome {
        status: if candidates == 1 {
            DecodeStatus::Success
        } else {
            DecodeStatus::AmbiguousResolved
        },
        codeword,
        message,
        noise: Some(noise),
    }
}

/// Scans `support` for noise `z` with `H·z = H·y`; the first match wins.
pub fn brute_force_decode(code: &LinearCode, received: &BitVec, support: &FlatDistribution) -> Result<DecodeOutcome> {
    tuned_brute_force_decode(code, received, std::slice::from_ref(support))
}

/// Like [`brute_force_decode`] over the union of `components`, preferring a
/// match in the highest-index component, then the numerically first match.
/// Components must have non-increasing support sizes.
pub fn tuned_brute_force_decode(
    code: &LinearCode,
    received: &BitVec,
    components: &[FlatDistribution],
) -> Result<DecodeOutcome> {
    check_components(code, components)?;
    let h = packed_parity(code)?;
    let target = h.mul_u64(received.to_u64());
    let mut chosen = None;
    let mut seen = Vec::new();
    for comp in components.iter().rev() {
        for &z in comp.support() {
            if h.mul_u64(z) == target && !seen.contains(&z) {
                seen.push(z);
                chosen.get_or_insert(z);
            }
        }
    }
    Ok(match chosen {
        Some(z) => outcome_for(code, received, z, seen.len()),
        None => fallback(code),
    })
}

fn check_components(code: &LinearCode, components: &[FlatDistribution]) -> Result<()> {
    if components.is_empty() {
        return Err(Error::InvalidParameter("no noise components".into()));
    }
    if components.iter().any(|c| c.bits() as usize != code.n()) {
        return Err(Error::SampleSpaceMismatch(components[0].bits(), code.n() as u32));
    }
    if components.windows(2).any(|w| w[0].size() < w[1].size()) {
        return Err(Error::ComponentOrder);
    }
    let total: usize = components.iter().map(FlatDistribution::size).sum();
    if total > 1 << 20 {
        return Err(Error::Infeasible { needed: total as u128, limit: 1 << 20 });
    }
    Ok(())
}

/// Exact error of the syndrome decoders, with the all-zero codeword sent
/// (the decoders only see syndromes, so the codeword does not matter).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorProbability {
    /// Mass of realizations whose decoded noise differs from the realization.
    pub decoder: f64,
    /// Mass of confusable realizations: some other admissible noise shares
    /// the syndrome. This is the worst case over tie-breaking rules.
    pub confusable: f64,
}

/// Plain brute-force decoding against the support of `noise` (numeric order).
pub fn exact_error_probability(code: &LinearCode, noise: &FiniteDistribution) -> Result<ErrorProbability> {
    if noise.bits() as usize != code.n() {
        return Err(Error::SampleSpaceMismatch(noise.bits(), code.n() as u32));
    }
    if noise.support_size() > 1 << 20 {
        return Err(Error::Infeasible { needed: noise.support_size() as u128, limit: 1 << 20 });
    }
    let h = packed_parity(code)?;
    let mut classes: HashMap<u64, (u64, usize)> = HashMap::new();
    for (z, _) in noise.iter() {
        let e = classes.entry(h.mul_u64(z)).or_insert((z, 0));
        e.1 += 1;
    }
    let (mut decoder, mut confusable) = (Vec::new(), Vec::new());
    for (z, p) in noise.iter() {
        let &(first, size) = &classes[&h.mul_u64(z)];
        if first != z {
            decoder.push(p);
        }
        if size > 1 {
            confusable.push(p);
        }
    }
    // Full-support noise is entirely confusable; keep rounding from leaving [0, 1].
    Ok(ErrorProbability {
        decoder: compensated_sum(decoder).min(1.0),
        confusable: compensated_sum(confusable).min(1.0),
    })
}

/// Tuned decoder on the mixture `sum_i alpha_i Z_i`. `weights` are
/// normalized internally. A realization from `Z_i` is confusable when it
/// shares a syndrome with another vector of some `Z_j`, `j >= i`.
pub fn exact_mixture_error_probability(
    code: &LinearCode,
    components: &[FlatDistribution],
    weights: &[f64],
) -> Result<ErrorProbability> {
    check_components(code, components)?;
    if weights.len() != components.len() {
        return Err(Error::Dimension("one weight per component".into()));
    }
    let h = packed_parity(code)?;
    let total: f64 = weights.iter().sum();
    let syndromes: Vec<Vec<u64>> = components
        .iter()
        .map(|c| c.support().iter().map(|&z| h.mul_u64(z)).collect())
        .collect();
    // For each syndrome: the tuned decoder's pick, and for each component
    // index the set of members seen at that index or later.
    let mut pick: HashMap<u64, u64> = HashMap::new();
    for (comp, syn) in components.iter().zip(&syndromes).rev() {
        for (&z, &s) in comp.support().iter().zip(syn) {
            pick.entry(s).or_insert(z);
        }
    }
    let mut later: HashMap<u64, Vec<u64>> = HashMap::new();
    let (mut decoder, mut confusable) = (0.0, 0.0);
    for i in (0..components.len()).rev() {
        for (&z, &s) in components[i].support().iter().zip(&syndromes[i]) {
            let v = later.entry(s).or_default();
            if !v.contains(&z) {
                v.push(z);
            }
        }
        let alpha = weights[i] / total / components[i].size() as f64;
        for (&z, &s) in components[i].support().iter().zip(&syndromes[i]) {
            if pick[&s] != z {
                decoder += alpha;
            }
            if later[&s].iter().any(|&o| o != z) {
                confusable += alpha;
            }
        }
    }
    Ok(ErrorProbability { decoder: decoder.min(1.0), confusable: confusable.min(1.0) })
}

/// Report on the ensemble's parity maps as a seeded condenser
/// on a flat source, against `2 eps_dec + gamma`.
#[derive(Clone, Debug)]
pub struct CondenserFromCodes {
    /// Measured lossless error of `(x, u) ↦ H_u·x` on the source.
    pub measured_epsilon: f64,
    /// Per-seed decoder error on noise uniform over the source.
    pub decoder_errors: Vec<f64>,
    /// `(eps_dec, gamma, 2 eps_dec + gamma)` for each threshold tried.
    pub bounds: Vec<(f64, f64, f64)>,
}

impl CondenserFromCodes {
    pub fn holds(&self) -> bool {
        self.bounds.iter().all(|&(_, _, b)| self.measured_epsilon <= b + 1e-12)
    }
}

/// Parity matrices of all codes as an explicit seeded family.
pub fn parity_family(ens: &CodeEnsemble) -> Result<LinearCondenser> {
    let r = (0..ens.size())
        .map(|u| ens.code(u).map(|c| c.parity().rows()))
        .collect::<Result<Vec<_>>>()?;
    let width = r.iter().copied().max().unwrap_or(0);
    let mats = (0..ens.size())
        .map(|u| {
            let code = ens.code(u)?;
            // Pad with zero rows so every seed has the same output length.
            let mut p = code.parity().clone();
            while p.rows() < width {
                p.push_row(BitVec::zeros(code.n()));
            }
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    LinearCondenser::explicit(mats)
}

/// Measures the induced condenser on `source` and compares it with
/// `2 eps_dec + gamma` where `gamma` is the fraction of codes whose decoder
/// error exceeds `eps_dec`, for each `eps_dec` in `thresholds` and for every
/// distinct per-seed error value.
pub fn ensemble_to_condenser_check(
    ens: &CodeEnsemble,
    source: &FlatDistribution,
    thresholds: &[f64],
) -> Result<CondenserFromCodes> {
    let family = parity_family(ens)?;
    let m = source.min_entropy();
    let measured_epsilon = verify_condenser(&family, source, m)?;
    let noise = source.to_distribution();
    let decoder_errors: Vec<f64> = (0..ens.size())
        .into_par_iter()
        .map(|u| Ok(exact_error_probability(&ens.code(u)?, &noise)?.decoder))
        .collect::<Result<_>>()?;
    let mut levels: Vec<f64> = decoder_errors.clone();
    levels.extend_from_slice(thresholds);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let bounds = levels
        .into_iter()
        .map(|eps| {
            let bad = decoder_errors.iter().filter(|&&e| e > eps).count();
            let gamma = bad as f64 / decoder_errors.len() as f64;
            (eps, gamma, 2.0 * eps + gamma)
        })
        .collect();
    Ok(CondenserFromCodes { measured_epsilon, decoder_errors, bounds })
}
