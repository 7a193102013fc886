//! Concatenation of a Reed–Solomon outer code with an inner code ensemble:
//! outer symbol `i` is encoded by the ensemble's `i`-th code.

mod reed_solomon;

pub use reed_solomon::ReedSolomonCode;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{Channel, Received, RngStream};
use crate::condensers::{CondenserDescriptor, LinearCondenser};
use crate::decoders::{erasure_decode, tuned_brute_force_decode};
use crate::ensembles::{CodeEnsemble, EnsembleKind, LinearCode};
use crate::error::{Error, Result};
use crate::field::ExtField;
use crate::gf2::{BitMatrix, BitVec};
use crate::probability::{bsc_flat_decomposition, clopper_pearson, FlatDistribution};

#[derive(Clone, Debug)]
pub struct ConcatenatedCode {
    outer: ReedSolomonCode,
    inner: Vec<LinearCode>,
    n: usize,
    k: usize,
    descriptor: Option<ConcatDescriptor>,
}

/// JSON form: the inner ensemble's condenser plus outer parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcatDescriptor {
    pub condenser: CondenserDescriptor,
    pub ensemble: EnsembleKind,
    /// Inner dimension, also the outer symbol size in bits.
    pub k: usize,
    /// Outer block length; the ensemble is cut to its first `s` seeds.
    pub s: usize,
    pub k_prime: usize,
}

impl ConcatenatedCode {
    /// Inner codes are the first `s` codes of `ens`, each cut to dimension
    /// `k`; the outer code is RS over GF(2^k) of length `s`, dimension `k_prime`.
    pub fn from_ensemble(ens: &CodeEnsemble, k: usize, s: usize, k_prime: usize) -> Result<Self> {
        let ens = ens.clone().first_seeds(s as u64)?;
        let inner = (0..s as u64)
            .into_par_iter()
            .map(|u| {
                let code = ens.code(u)?;
                if code.k() < k {
                    return Err(Error::RankDeficient { rank: code.k(), expected: k });
                }
                if code.k() == k { Ok(code) } else { code.subcode(k) }
            })
            .collect::<Result<Vec<_>>>()?;
        let outer = ReedSolomonCode::new(ExtField::new(k as u32)?, s, k_prime)?;
        let mut cc = Self::from_codes(outer, inner)?;
        cc.descriptor = Some(ConcatDescriptor {
            condenser: ens.condenser().to_descriptor(),
            ensemble: ens.kind(),
            k,
            s,
            k_prime,
        });
        Ok(cc)
    }

    pub fn from_codes(outer: ReedSolomonCode, inner: Vec<LinearCode>) -> Result<Self> {
        let k = outer.field().degree() as usize;
        if inner.len() != outer.len() {
            return Err(Error::Dimension(format!("{} inner codes for {} outer symbols", inner.len(), outer.len())));
        }
        let n = inner[0].n();
        if inner.iter().any(|c| c.n() != n || c.k() != k) {
            return Err(Error::Dimension(format!("every inner code must be [{n}, {k}]")));
        }
        Ok(Self { outer, inner, n, k, descriptor: None })
    }

    pub fn from_descriptor(desc: &ConcatDescriptor) -> Result<Self> {
        let ens = CodeEnsemble::new(desc.ensemble, LinearCondenser::from_descriptor(&desc.condenser)?)?;
        Self::from_ensemble(&ens, desc.k, desc.s, desc.k_prime)
    }

    pub fn descriptor(&self) -> Option<&ConcatDescriptor> {
        self.descriptor.as_ref()
    }

    pub fn outer(&self) -> &ReedSolomonCode {
        &self.outer
    }

    pub fn inner(&self) -> &[LinearCode] {
        &self.inner
    }

    pub fn inner_len(&self) -> usize {
        self.n
    }

    /// `N = n s`.
    pub fn block_len(&self) -> usize {
        self.n * self.outer.len()
    }

    /// `K = k k'`.
    pub fn dimension(&self) -> usize {
        self.k * self.outer.dimension()
    }

    pub fn rate(&self) -> f64 {
        self.dimension() as f64 / self.block_len() as f64
    }

    fn symbols(&self, message: &BitVec) -> Vec<u64> {
        (0..self.outer.dimension())
            .map(|j| message.slice(j * self.k, self.k).to_u64())
            .collect()
    }

    pub fn encode(&self, message: &BitVec) -> Result<BitVec> {
        if message.len() != self.dimension() {
            return Err(Error::Dimension(format!("message has {} bits, need {}", message.len(), self.dimension())));
        }
        let outer = self.outer.encode(&self.symbols(message))?;
        let mut out = BitVec::zeros(0);
        for (code, &sym) in self.inner.iter().zip(&outer) {
            out = out.concat(&code.encode(&BitVec::from_u64(sym, self.k)));
        }
        Ok(out)
    }

    /// Rows are the encodings of the unit messages.
    pub fn encoding_matrix(&self) -> Result<BitMatrix> {
        let rows = (0..self.dimension())
            .map(|i| self.encode(&BitVec::unit(self.dimension(), i)))
            .collect::<Result<Vec<_>>>()?;
        BitMatrix::from_rows(rows, self.block_len())
    }
}

/// Inner decoder used by [`naive_decode`].
#[derive(Clone, Debug)]
pub enum InnerDecoder {
    Erasure,
    /// Tuned brute force over flat components of non-increasing size.
    Tuned(Vec<FlatDistribution>),
}

impl InnerDecoder {
    /// Tuned decoder for the weight window of `B_{n,p}` of half-width `eta`.
    pub fn for_bsc(n: usize, p: f64, eta: f64) -> Result<Self> {
        let comps = bsc_flat_decomposition(n as u32, p, eta)?.components()?;
        Ok(InnerDecoder::Tuned(comps.into_iter().map(|(_, z)| z).collect()))
    }

    /// Erasure decoding for the BEC, tuned brute force at the channel's own
    /// parameter for the BSC.
    pub fn for_channel(channel: &Channel, n: usize, eta: f64) -> Result<Self> {
        match channel {
            Channel::Bec(_) => Ok(InnerDecoder::Erasure),
            Channel::Bsc(p) => Self::for_bsc(n, *p, eta),
            Channel::Additive(z) => {
                if z.bits() as usize != n {
                    return Err(Error::SampleSpaceMismatch(z.bits(), n as u32));
                }
                Ok(InnerDecoder::Tuned(vec![FlatDistribution::new(z.bits(), z.support())?]))
            }
        }
    }

    fn decode_block(&self, code: &LinearCode, block: &Received) -> Result<BitVec> {
        Ok(match self {
            InnerDecoder::Erasure => erasure_decode(code, block).message,
            InnerDecoder::Tuned(comps) => tuned_brute_force_decode(code, &block.data, comps)?.message,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcatDecode {
    /// `None` when the outer decoder finds no codeword within its radius.
    pub message: Option<BitVec>,
    /// Inner estimates of the outer symbols.
    pub symbols: Vec<u64>,
}

/// Decodes each length-`n` block with `decoder`, then the outer code.
pub fn naive_decode(cc: &ConcatenatedCode, received: &Received, decoder: &InnerDecoder) -> Result<ConcatDecode> {
    if received.data.len() != cc.block_len() {
        return Err(Error::Dimension(format!("received {} bits, need {}", received.data.len(), cc.block_len())));
    }
    let n = cc.n;
    let symbols = cc
        .inner
        .iter()
        .enumerate()
        .map(|(i, code)| {
            let block = Received {
                data: received.data.slice(i * n, n),
                erasures: received.erasures.slice(i * n, n),
            };
            Ok(decoder.decode_block(code, &block)?.to_u64())
        })
        .collect::<Result<Vec<_>>>()?;
    let message = cc.outer.decode(&symbols)?.map(|syms| {
        let bits: Vec<bool> = syms
            .iter()
            .flat_map(|&s| (0..cc.k).map(move |b| s >> b & 1 == 1))
            .collect();
        BitVec::from_bits(&bits)
    });
    Ok(ConcatDecode { message, symbols })
}

#[derive(Clone, Debug)]
pub struct ConcatExperiment {
    pub trials: u64,
    pub block_errors: u64,
    pub block_error_ci: (f64, f64),
    /// Wrong inner estimates per outer position.
    pub position_failures: Vec<u64>,
    /// Pooled inner failure rate over all blocks.
    pub inner_failure_rate: f64,
    pub inner_failure_ci: (f64, f64),
    /// `histogram[j]` counts trials with exactly `j` wrong inner blocks.
    pub histogram: Vec<u64>,
    pub radius: usize,
    /// Fraction of trials with more than `radius` wrong inner blocks.
    pub tail_observed: f64,
    pub tail_ci: (f64, f64),
    /// The same tail for independent blocks at the measured per-position rates.
    pub tail_predicted: f64,
    /// ... and at the pooled rate for every block.
    pub tail_iid: f64,
}

impl ConcatExperiment {
    pub fn block_error_rate(&self) -> f64 {
        self.block_errors as f64 / self.trials.max(1) as f64
    }

    /// The predicted tail falls inside the 95% interval of the observed one.
    pub fn tail_consistent(&self) -> bool {
        self.tail_ci.0 <= self.tail_predicted + 1e-12 && self.tail_predicted <= self.tail_ci.1 + 1e-12
    }
}

/// Random message per trial from `RngStream::for_trial(seed, t)`, channel
/// applied block by block, then [`naive_decode`]. A trial is a block error
/// when the decoded message differs from the sent one.
pub fn concat_error_experiment(
    cc: &ConcatenatedCode,
    channel: &Channel,
    decoder: &InnerDecoder,
    trials: u64,
    seed: u64,
) -> Result<ConcatExperiment> {
    let s = cc.outer.len();
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = RngStream::for_trial(seed, t);
            let message = rng.bits(cc.dimension());
            let sent = cc.outer.encode(&cc.symbols(&message))?;
            let codeword = cc.encode(&message)?;
            let mut data = BitVec::zeros(0);
            let mut erasures = BitVec::zeros(0);
            for i in 0..s {
                let out = channel.transmit(&codeword.slice(i * cc.n, cc.n), &mut rng)?;
                data = data.concat(&out.data);
                erasures = erasures.concat(&out.erasures);
            }
            let dec = naive_decode(cc, &Received { data, erasures }, decoder)?;
            let wrong: Vec<bool> = dec.symbols.iter().zip(&sent).map(|(a, b)| a != b).collect();
            Ok((dec.message.as_ref() != Some(&message), wrong))
        })
        .collect::<Result<Vec<_>>>()?;

    let radius = cc.outer.radius();
    let mut histogram = vec![0u64; s + 1];
    let mut position_failures = vec![0u64; s];
    let mut block_errors = 0;
    for (err, wrong) in &per_trial {
        block_errors += u64::from(*err);
        histogram[wrong.iter().filter(|&&w| w).count()] += 1;
        for (slot, &w) in position_failures.iter_mut().zip(wrong) {
            *slot += u64::from(w);
        }
    }
    let total_fail: u64 = position_failures.iter().sum();
    let blocks = trials * s as u64;
    let tail_count: u64 = histogram[radius + 1..].iter().sum();
    let denom = trials.max(1) as f64;
    let rates: Vec<f64> = position_failures.iter().map(|&f| f as f64 / denom).collect();
    let pooled = total_fail as f64 / blocks.max(1) as f64;
    Ok(ConcatExperiment {
        trials,
        block_errors,
        block_error_ci: clopper_pearson(block_errors, trials, 0.95),
        inner_failure_rate: pooled,
        inner_failure_ci: clopper_pearson(total_fail, blocks, 0.95),
        position_failures,
        histogram,
        radius,
        tail_observed: tail_count as f64 / denom,
        tail_ci: clopper_pearson(tail_count, trials, 0.95),
        tail_predicted: poisson_binomial_upper_tail(&rates, radius),
        tail_iid: poisson_binomial_upper_tail(&vec![pooled; s], radius),
    })
}

/// `Pr[sum of independent Bernoulli(p_i) > k]`.
pub fn poisson_binomial_upper_tail(ps: &[f64], k: usize) -> f64 {
    let mut dist = vec![1.0];
    for &p in ps {
        let mut next = vec![0.0; dist.len() + 1];
        for (j, &q) in dist.iter().enumerate() {
            next[j] += q * (1.0 - p);
            next[j + 1] += q * p;
        }
        dist = next;
    }
    dist.iter().skip(k + 1).sum::<f64>().clamp(0.0, 1.0)
}
