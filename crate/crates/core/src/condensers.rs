//! Seeded linear condensers and their empirical verification.
//!
//! A seeded linear map `f(x, z) = M_z·x` is represented by the per-seed
//! matrix `M_z`. Sources are flat distributions with outcomes packed into
//! `u64` (so `n <= 64`); exact verification enumerates `support × seeds`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::RngStream;
use crate::error::{Error, Result};
use crate::field::{ExtField, FieldPoly};
use crate::gf2::{BitMatrix, BitVec};
use crate::probability::FlatDistribution;

/// Upper bound on `|support| · seeds` for exact enumeration.
pub const EXACT_ENUMERATION_LIMIT: u128 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CondenserKind {
    Extractor,
    Lossless,
}

/// Claimed behaviour: `(m, epsilon)`-extractor or lossless condenser.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub kind: CondenserKind,
    pub m: f64,
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CondenserParams {
    pub n: usize,
    pub d: u32,
    pub r: usize,
    pub claim: Option<Claim>,
}

impl CondenserParams {
    /// Hash-lemma admissibility of the claim for output length `r`.
    pub fn check_hash_lemma(&self) -> Result<()> {
        let Some(c) = self.claim else { return Ok(()) };
        if !(c.epsilon > 0.0 && c.epsilon <= 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon {} outside (0, 1]", c.epsilon)));
        }
        let slack = 2.0 * (1.0 / c.epsilon).log2();
        let r = self.r as f64;
        match c.kind {
            CondenserKind::Extractor if r > c.m - slack + 1e-9 => Err(Error::ClaimBound(format!(
                "extractor output {r} exceeds m - 2 log(1/eps) = {}",
                c.m - slack
            ))),
            CondenserKind::Lossless if r < c.m + slack - 1e-9 => Err(Error::ClaimBound(format!(
                "lossless output {r} is below m + 2 log(1/eps) = {}",
                c.m + slack
            ))),
            _ => Ok(()),
        }
    }
}

/// Parameters of the polynomial condenser `X ↦ (F(z), F_1(z), …)` over `F_q`.
#[derive(Clone, Debug, PartialEq)]
pub struct GuvParams {
    pub field: ExtField,
    pub n_bar: usize,
    pub r_bar: usize,
    pub h: u64,
    /// Irreducible of degree `n_bar` over `F_q`.
    pub modulus: FieldPoly,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Construction {
    /// `h_α(x)` = first `r` coordinates of `α·x` in `GF(2^n)`; seed `α`.
    LinearHash { field: ExtField },
    Guv(GuvParams),
    /// Single seed, matrix `[I_r | 0]`.
    Truncation,
    /// One matrix per seed.
    Explicit { matrices: Vec<BitMatrix> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearCondenser {
    params: CondenserParams,
    construction: Construction,
}

impl LinearCondenser {
    pub fn linear_hash_family(n: usize, r: usize) -> Result<Self> {
        if r < 1 || r > n {
            return Err(Error::InvalidParameter(format!("need 1 <= r <= n, got r = {r}, n = {n}")));
        }
        let field = ExtField::new(n as u32)?;
        Ok(Self {
            params: CondenserParams { n, d: n as u32, r, claim: None },
            construction: Construction::LinearHash { field },
        })
    }

    /// Polynomial condenser over `F_q`, `q = 2^w`, flattened to bits with
    /// the polynomial basis of each coefficient.
    pub fn guv(w: u32, n_bar: usize, r_bar: usize, h: u64) -> Result<Self> {
        let field = ExtField::new(w)?;
        if h < 2 || !h.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("h = {h} must be a power of two >= 2")));
        }
        if r_bar < 1 || r_bar > n_bar {
            return Err(Error::InvalidParameter(format!("need 1 <= r_bar <= n_bar, got {r_bar}")));
        }
        let n = w as usize * n_bar;
        let r = w as usize * r_bar;
        if n > 64 || r > 64 {
            return Err(Error::InvalidParameter(format!("flattened sizes n = {n}, r = {r} exceed 64 bits")));
        }
        let binary = ExtField::new(n_bar as u32)?.modulus();
        let modulus = FieldPoly::from_binary(field, binary);
        if !modulus.is_irreducible() {
            return Err(Error::ReducibleModulus { degree: n_bar as u32, modulus: binary });
        }
        Ok(Self {
            params: CondenserParams { n, d: w, r, claim: None },
            construction: Construction::Guv(GuvParams { field, n_bar, r_bar, h, modulus }),
        })
    }

    pub fn truncation(r: usize, n: usize) -> Result<Self> {
        if r > n {
            return Err(Error::InvalidParameter(format!("r = {r} exceeds n = {n}")));
        }
        Ok(Self {
            params: CondenserParams { n, d: 0, r, claim: None },
            construction: Construction::Truncation,
        })
    }

    /// Family with one given matrix per seed; `d = ceil(log2(count))`.
    pub fn explicit(matrices: Vec<BitMatrix>) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::InvalidParameter("explicit family needs a matrix".into()))?;
        let (r, n) = (first.rows(), first.cols());
        if matrices.iter().any(|m| m.rows() != r || m.cols() != n) {
            return Err(Error::Dimension("explicit family matrices differ in shape".into()));
        }
        let d = (matrices.len() as u64).next_power_of_two().trailing_zeros();
        Ok(Self {
            params: CondenserParams { n, d, r, claim: None },
            construction: Construction::Explicit { matrices },
        })
    }

    /// Attaches a claim. For the hash family the claim must satisfy the
    /// leftover-hash bounds.
    pub fn with_claim(mut self, kind: CondenserKind, m: f64, epsilon: f64) -> Result<Self> {
        self.params.claim = Some(Claim { kind, m, epsilon });
        if matches!(self.construction, Construction::LinearHash { .. }) {
            self.params.check_hash_lemma()?;
        }
        Ok(self)
    }

    pub fn params(&self) -> &CondenserParams {
        &self.params
    }

    pub fn construction(&self) -> &Construction {
        &self.construction
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn r(&self) -> usize {
        self.params.r
    }

    pub fn seed_count(&self) -> u64 {
        match &self.construction {
            Construction::Explicit { matrices } => matrices.len() as u64,
            _ => 1u64 << self.params.d,
        }
    }

    /// `log2` of the seed-space size, the entropy the seed contributes.
    pub fn seed_entropy(&self) -> f64 {
        (self.seed_count() as f64).log2()
    }

    /// The `r × n` matrix of `f(·, seed)`.
    pub fn matrix_for_seed(&self, seed: u64) -> BitMatrix {
        assert!(seed < self.seed_count(), "seed {seed} out of range");
        let (n, r) = (self.params.n, self.params.r);
        match &self.construction {
            Construction::LinearHash { field } => {
                let cols: Vec<u64> = (0..n).map(|j| field.mul(seed, 1 << j)).collect();
                rows_from_columns(&cols, r, n)
            }
            Construction::Guv(g) => {
                let cols: Vec<u64> = (0..n).map(|j| guv_eval(g, 1 << j, seed)).collect();
                rows_from_columns(&cols, r, n)
            }
            Construction::Truncation => BitMatrix::truncation(r, n),
            Construction::Explicit { matrices } => matrices[seed as usize].clone(),
        }
    }

    /// `f(x, seed)` computed from the construction (not via the matrix).
    pub fn apply(&self, x: u64, seed: u64) -> u64 {
        let r = self.params.r;
        match &self.construction {
            Construction::LinearHash { field } => field.mul(seed, x) & low_bits(r),
            Construction::Guv(g) => guv_eval(g, x, seed),
            Construction::Truncation => x & low_bits(r),
            Construction::Explicit { matrices } => matrices[seed as usize].mul_u64(x),
        }
    }

    pub fn to_descriptor(&self) -> CondenserDescriptor {
        let p = &self.params;
        let mut desc = CondenserDescriptor {
            kind: p.claim.map(|c| c.kind),
            n: p.n,
            d: p.d,
            r: p.r,
            m: p.claim.map(|c| c.m),
            epsilon: p.claim.map(|c| c.epsilon),
            construction: String::new(),
            w: None,
            n_bar: None,
            r_bar: None,
            h: None,
            modulus: None,
            matrices: None,
        };
        match &self.construction {
            Construction::LinearHash { field } => {
                desc.construction = "linear-hash".into();
                desc.modulus = Some(format!("{:x}", field.modulus()));
            }
            Construction::Guv(g) => {
                desc.construction = "guv".into();
                desc.w = Some(g.field.degree());
                desc.n_bar = Some(g.n_bar);
                desc.r_bar = Some(g.r_bar);
                desc.h = Some(g.h);
                desc.modulus = Some(format!("{:x}", g.field.modulus()));
            }
            Construction::Truncation => desc.construction = "truncation".into(),
            Construction::Explicit { matrices } => {
                desc.construction = "explicit".into();
                desc.matrices = Some(matrices.iter().map(BitMatrix::to_text).collect());
            }
        }
        desc
    }

    pub fn from_descriptor(desc: &CondenserDescriptor) -> Result<Self> {
        let need = |v: Option<usize>, name: &str| {
            v.ok_or_else(|| Error::Config(format!("{} condenser needs {name:?}", desc.construction)))
        };
        let built = match desc.construction.as_str() {
            "linear-hash" => LinearCondenser::linear_hash_family(desc.n, desc.r)?,
            "guv" => {
                let w = desc.w.ok_or_else(|| Error::Config("guv condenser needs \"w\"".into()))?;
                let h = desc.h.ok_or_else(|| Error::Config("guv condenser needs \"h\"".into()))?;
                LinearCondenser::guv(w, need(desc.n_bar, "n_bar")?, need(desc.r_bar, "r_bar")?, h)?
            }
            "truncation" => LinearCondenser::truncation(desc.r, desc.n)?,
            "explicit" => {
                let texts = desc
                    .matrices
                    .as_ref()
                    .ok_or_else(|| Error::Config("explicit condenser needs \"matrices\"".into()))?;
                let mats = texts
                    .iter()
                    .map(|t| BitMatrix::parse_text(t))
                    .collect::<Result<Vec<_>>>()?;
                LinearCondenser::explicit(mats)?
            }
            other => return Err(Error::Config(format!("unknown construction {other:?}"))),
        };
        let p = built.params();
        if p.n != desc.n || p.r != desc.r || p.d != desc.d {
            return Err(Error::Config(format!(
                "descriptor says (n, d, r) = ({}, {}, {}) but construction gives ({}, {}, {})",
                desc.n, desc.d, desc.r, p.n, p.d, p.r
            )));
        }
        if let Some(hex) = &desc.modulus {
            let expected = match built.construction() {
                Construction::LinearHash { field } => Some(field.modulus()),
                Construction::Guv(g) => Some(g.field.modulus()),
                _ => None,
            };
            let given = u64::from_str_radix(hex.trim_start_matches("0x"), 16)
                .map_err(|e| Error::Config(format!("bad modulus {hex:?}: {e}")))?;
            if expected.is_some_and(|m| m != given) {
                return Err(Error::Config(format!(
                    "modulus {hex} differs from the table modulus {:x}",
                    expected.unwrap_or(0)
                )));
            }
        }
        match (desc.kind, desc.m, desc.epsilon) {
            (Some(kind), Some(m), Some(eps)) => built.with_claim(kind, m, eps),
            (None, None, None) => Ok(built),
            _ => Err(Error::Config("claim needs all of kind, m and epsilon".into())),
        }
    }
}

/// Condenser descriptor (JSON).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CondenserDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<CondenserKind>,
    pub n: usize,
    pub d: u32,
    pub r: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub construction: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<u32>,
    #[serde(default, rename = "n_bar", skip_serializing_if = "Option::is_none")]
    pub n_bar: Option<usize>,
    #[serde(default, rename = "r_bar", skip_serializing_if = "Option::is_none")]
    pub r_bar: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<String>>,
}

fn low_bits(r: usize) -> u64 {
    if r >= 64 {
        u64::MAX
    } else {
        (1u64 << r) - 1
    }
}

fn rows_from_columns(cols: &[u64], r: usize, n: usize) -> BitMatrix {
    let rows: Vec<u64> = (0..r)
        .map(|i| {
            cols.iter()
                .enumerate()
                .fold(0u64, |acc, (j, &c)| acc | (((c >> i) & 1) << j))
        })
        .collect();
    BitMatrix::from_u64_rows(&rows, n)
}

fn guv_eval(g: &GuvParams, x: u64, z: u64) -> u64 {
    let w = g.field.degree() as usize;
    let coeffs: Vec<u64> = (0..g.n_bar).map(|j| (x >> (w * j)) & g.field.mask()).collect();
    let mut f = FieldPoly::new(g.field, coeffs);
    let mut out = 0u64;
    for i in 0..g.r_bar {
        if i > 0 {
            f = f.pow_mod(u128::from(g.h), &g.modulus);
        }
        out |= f.eval(z) << (w * i);
    }
    out
}

/// Distance of `M(X)` from min-entropy `target` for flat `X`.
pub fn image_closeness(matrix: &BitMatrix, support: &[u64], target: f64) -> f64 {
    let mut images: Vec<u64> = support.iter().map(|&x| matrix.mul_u64(x)).collect();
    closeness_of_images(&mut images, target)
}

/// Same as [`image_closeness`] with the map given as a closure.
pub fn map_closeness(support: &[u64], target: f64, f: impl Fn(u64) -> u64) -> f64 {
    let mut images: Vec<u64> = support.iter().map(|&x| f(x)).collect();
    closeness_of_images(&mut images, target)
}

fn closeness_of_images(images: &mut [u64], target: f64) -> f64 {
    images.sort_unstable();
    let total = images.len() as f64;
    let cap = (-target).exp2();
    images
        .chunk_by(|a, b| a == b)
        .map(|run| (run.len() as f64 / total - cap).max(0.0))
        .sum()
}

fn check_feasible(f: &LinearCondenser, support: usize) -> Result<()> {
    let needed = support as u128 * u128::from(f.seed_count());
    if needed > EXACT_ENUMERATION_LIMIT {
        return Err(Error::Infeasible { needed, limit: EXACT_ENUMERATION_LIMIT });
    }
    if f.n() > 64 || f.r() > 64 {
        return Err(Error::InvalidParameter("exact verification needs n, r <= 64".into()));
    }
    Ok(())
}

fn check_source(f: &LinearCondenser, x: &FlatDistribution) -> Result<()> {
    if x.bits() as usize != f.n() {
        return Err(Error::SampleSpaceMismatch(x.bits(), f.n() as u32));
    }
    Ok(())
}

/// Per-seed distances of `f(X, z)` from min-entropy `m_prime`, in seed order.
pub fn per_seed_closeness(f: &LinearCondenser, x: &FlatDistribution, m_prime: f64) -> Result<Vec<f64>> {
    check_source(f, x)?;
    check_feasible(f, x.size())?;
    Ok((0..f.seed_count())
        .into_par_iter()
        .map(|z| image_closeness(&f.matrix_for_seed(z), x.support(), m_prime))
        .collect())
}

/// Distance of the joint `(Z, f(X, Z))` from min-entropy `d + m_prime`.
///
/// The joint distribution puts mass `count_z(y) / (M·T)` on `(z, y)`, and
/// the cap is `2^-(d + m')` with `T = 2^d` seeds, so clipping the joint is
/// exactly the seed-average of the per-seed clipped excess.
pub fn verify_condenser(f: &LinearCondenser, x: &FlatDistribution, m_prime: f64) -> Result<f64> {
    let per_seed = per_seed_closeness(f, x, m_prime)?;
    Ok(per_seed.iter().sum::<f64>() / per_seed.len() as f64)
}

/// Worst measured lossless error for each `m' ∈ m_range` over flat
/// sub-sources of `X` of size `2^{m'}`: the prefix of the support plus
/// `samples` seeded random subsets.
pub fn verify_lossless_monotone(
    f: &LinearCondenser,
    x: &FlatDistribution,
    m_range: std::ops::RangeInclusive<u32>,
    samples: usize,
    seed: u64,
) -> Result<Vec<(u32, f64)>> {
    check_source(f, x)?;
    let mut out = Vec::new();
    for m_prime in m_range {
        let size = 1usize << m_prime;
        if size > x.size() {
            return Err(Error::InvalidParameter(format!(
                "sub-source of size 2^{m_prime} exceeds support {}",
                x.size()
            )));
        }
        let mut worst = verify_condenser(
            f,
            &FlatDistribution::new(x.bits(), x.support()[..size].iter().copied())?,
            f64::from(m_prime),
        )?;
        let mut rng = RngStream::for_trial(seed, u64::from(m_prime));
        for _ in 0..samples {
            let picks = rand::seq::index::sample(&mut rng, x.size(), size);
            let sub = FlatDistribution::new(x.bits(), picks.iter().map(|i| x.support()[i]))?;
            worst = worst.max(verify_condenser(f, &sub, f64::from(m_prime))?);
        }
        out.push((m_prime, worst));
    }
    Ok(out)
}

/// Seeds whose fixed-seed error exceeds `epsilon / delta`.
#[derive(Clone, Debug)]
pub struct SeedCensus {
    pub per_seed: Vec<f64>,
    pub joint_epsilon: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub threshold: f64,
    pub bad_fraction: f64,
}

impl SeedCensus {
    /// Whether the joint error is within `epsilon`, the premise of the bound.
    pub fn premise_holds(&self) -> bool {
        self.joint_epsilon <= self.epsilon + 1e-12
    }

    /// At most a `delta` fraction of seeds is bad (vacuously true without the premise).
    pub fn bound_holds(&self) -> bool {
        !self.premise_holds() || self.bad_fraction <= self.delta + 1e-12
    }
}

pub fn seed_census(
    f: &LinearCondenser,
    x: &FlatDistribution,
    m_prime: f64,
    epsilon: f64,
    delta: f64,
) -> Result<SeedCensus> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must be positive")));
    }
    let per_seed = per_seed_closeness(f, x, m_prime)?;
    let joint_epsilon = per_seed.iter().sum::<f64>() / per_seed.len() as f64;
    let threshold = epsilon / delta;
    let bad = per_seed.iter().filter(|&&e| e > threshold + 1e-12).count();
    Ok(SeedCensus {
        bad_fraction: bad as f64 / per_seed.len() as f64,
        per_seed,
        joint_epsilon,
        epsilon,
        delta,
        threshold,
    })
}

/// Worst collision probability `max_{u != 0} Pr_z[M_z u = 0]` over the
/// whole seed space, by exhaustive enumeration.
pub fn collision_census(f: &LinearCondenser) -> Result<f64> {
    let n = f.n();
    let needed = (1u128 << n) * u128::from(f.seed_count());
    if n > 24 || needed > 1 << 32 {
        return Err(Error::Infeasible { needed, limit: 1 << 32 });
    }
    let counts = (0..f.seed_count())
        .into_par_iter()
        .fold(
            || vec![0u32; 1 << n],
            |mut acc, z| {
                let m = f.matrix_for_seed(z);
                for (u, slot) in acc.iter_mut().enumerate().skip(1) {
                    if m.mul_u64(u as u64) == 0 {
                        *slot += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u32; 1 << n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let worst = counts.iter().skip(1).copied().max().unwrap_or(0);
    Ok(f64::from(worst) / f.seed_count() as f64)
}

/// Uniform distribution on `{x·A + a}` for a full-row-rank basis `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSource {
    basis: BitMatrix,
    shift: BitVec,
}

impl AffineSource {
    pub fn new(basis: BitMatrix, shift: BitVec) -> Result<Self> {
        if shift.len() != basis.cols() {
            return Err(Error::Dimension("shift length differs from ambient dimension".into()));
        }
        let rank = basis.rank();
        if rank != basis.rows() {
            return Err(Error::RankDeficient { rank, expected: basis.rows() });
        }
        Ok(Self { basis, shift })
    }

    pub fn linear(basis: BitMatrix) -> Result<Self> {
        let n = basis.cols();
        Self::new(basis, BitVec::zeros(n))
    }

    /// Subcube free on `positions`, zero elsewhere.
    pub fn coordinate(n: usize, positions: &[usize]) -> Result<Self> {
        let rows = positions.iter().map(|&i| BitVec::unit(n, i)).collect();
        Self::linear(BitMatrix::from_rows(rows, n)?)
    }

    /// Random `m`-dimensional subspace of `F_2^n` with a random shift.
    pub fn random(n: usize, m: usize, rng: &mut RngStream) -> Self {
        assert!(m <= n);
        let mut basis = BitMatrix::zeros(0, n);
        while basis.rows() < m {
            let v = rng.bits(n);
            let mut trial = basis.clone();
            trial.push_row(v.clone());
            if trial.rank() == trial.rows() {
                basis = trial;
            }
        }
        Self { basis, shift: rng.bits(n) }
    }

    pub fn basis(&self) -> &BitMatrix {
        &self.basis
    }

    pub fn shift(&self) -> &BitVec {
        &self.shift
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    /// Basis of the orthogonal complement, `A_H` with `A_H·A^T = 0`.
    pub fn dual_basis(&self) -> BitMatrix {
        self.basis.right_kernel_basis()
    }

    /// The dual source through the origin.
    pub fn dual(&self) -> AffineSource {
        AffineSource {
            basis: self.dual_basis(),
            shift: BitVec::zeros(self.ambient()),
        }
    }

    /// All `2^dim` points as integers; requires `n <= 64`, `dim <= 24`.
    pub fn points(&self) -> Vec<u64> {
        assert!(self.ambient() <= 64 && self.dim() <= 24);
        let rows: Vec<u64> = self.basis.u64_rows();
        let a = if self.ambient() == 0 { 0 } else { self.shift.to_u64() };
        (0..1u64 << self.dim())
            .map(|c| {
                rows.iter()
                    .enumerate()
                    .filter(|(i, _)| (c >> i) & 1 == 1)
                    .fold(a, |acc, (_, &r)| acc ^ r)
            })
            .collect()
    }

    pub fn to_flat(&self) -> Result<FlatDistribution> {
        FlatDistribution::new(self.ambient() as u32, self.points())
    }

    /// Dimension of the image under `M`: `rank(M·A^T)`.
    pub fn image_dim(&self, m: &BitMatrix) -> usize {
        m.mul(&self.basis.transpose()).rank()
    }

    /// Exact distance of `M(X)` from min-entropy `target` via the rank
    /// formula: the image is flat on `2^k` points, `k = rank(M·A^T)`.
    pub fn closeness_by_rank(&self, m: &BitMatrix, target: f64) -> f64 {
        let k = self.image_dim(m) as f64;
        (1.0 - (k - target).exp2()).max(0.0)
    }
}

/// Every `m`-dimensional subspace of `F_2^n`, one reduced-echelon basis
/// each, in a fixed order.
pub fn enumerate_subspaces(n: usize, m: usize) -> Vec<BitMatrix> {
    assert!(m <= n && n <= 16);
    let mut out = Vec::new();
    for pivots in combinations(n, m) {
        // Free slots: (row i, column j) with j > pivot_i and j not a pivot.
        let slots: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| {
                (p + 1..n)
                    .filter(|j| !pivots.contains(j))
                    .map(move |j| (i, j))
                    .collect::<Vec<_>>()
            })
            .collect();
        for fill in 0..1u64 << slots.len() {
            let mut rows: Vec<u64> = pivots.iter().map(|&p| 1u64 << p).collect();
            for (b, &(i, j)) in slots.iter().enumerate() {
                if (fill >> b) & 1 == 1 {
                    rows[i] |= 1 << j;
                }
            }
            out.push(BitMatrix::from_u64_rows(&rows, n));
        }
    }
    out
}

/// All `k`-subsets of `[n]` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Deterministic panel of flat sources of size `2^m` on `F_2^n`: two
/// subcubes, the integer prefix, and seeded random affine and arbitrary
/// supports, `count` sources in total.
pub fn source_panel(n: usize, m: usize, count: usize, seed: u64) -> Result<Vec<FlatDistribution>> {
    let n32 = n as u32;
    let mut panel = vec![
        AffineSource::coordinate(n, &(0..m).collect::<Vec<_>>())?.to_flat()?,
        AffineSource::coordinate(n, &(n - m..n).collect::<Vec<_>>())?.to_flat()?,
        FlatDistribution::new(n32, (0..1u64 << m).map(|i| i.reverse_bits() >> (64 - n)))?,
    ];
    let mut i = 0u64;
    while panel.len() < count {
        let mut rng = RngStream::for_trial(seed, i);
        let src = if i.is_multiple_of(2) {
            AffineSource::random(n, m, &mut rng).to_flat()?
        } else {
            let picks = rand::seq::index::sample(&mut rng, 1 << n, 1 << m);
            FlatDistribution::new(n32, picks.iter().map(|v| v as u64))?
        };
        panel.push(src);
        i += 1;
    }
    panel.truncate(count);
    Ok(panel)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prop10Report {
    /// `rank(M·A^T)`.
    pub image_dim: usize,
    /// `log2 |image|` by enumerating the source.
    pub enumerated_dim: f64,
    /// Distance of the image from min-entropy `rows(M)`.
    pub eps_full_output: f64,
    /// Distance of the image from min-entropy `dim(X)`.
    pub eps_source_dim: f64,
}

impl Prop10Report {
    /// Each distance is either 0 or at least 1/2.
    pub fn dichotomy_holds(&self) -> bool {
        [self.eps_full_output, self.eps_source_dim]
            .iter()
            .all(|&e| e == 0.0 || e >= 0.5)
    }
}

pub fn prop10_check(m: &BitMatrix, src: &AffineSource) -> Result<Prop10Report> {
    if m.cols() != src.ambient() {
        return Err(Error::Dimension("matrix width differs from source ambient dimension".into()));
    }
    let points = src.points();
    let mut images: Vec<u64> = points.iter().map(|&x| m.mul_u64(x)).collect();
    let eps_full_output = closeness_of_images(&mut images.clone(), m.rows() as f64);
    let eps_source_dim = closeness_of_images(&mut images, src.dim() as f64);
    images.dedup();
    Ok(Prop10Report {
        image_dim: src.image_dim(m),
        enumerated_dim: (images.len() as f64).log2(),
        eps_full_output,
        eps_source_dim,
    })
}

#[derive(Clone, Debug)]
pub struct DualityVerdict {
    /// Dual matrix `H` (rows span the right kernel of `G`).
    pub h: BitMatrix,
    /// Dual source basis `A_H`.
    pub dual_source: BitMatrix,
    /// `rank(G·A_G^T)`.
    pub source_image_rank: usize,
    /// `rank(H·A_H^T)`.
    pub dual_image_rank: usize,
    /// `n - m + m' - r`.
    pub bound: i64,
}

impl DualityVerdict {
    pub fn holds(&self) -> bool {
        self.dual_image_rank as i64 >= self.bound
    }
}

pub fn duality_check(g: &BitMatrix, src: &AffineSource, m_prime: usize) -> Result<DualityVerdict> {
    let (r, n) = (g.rows(), g.cols());
    if n != src.ambient() {
        return Err(Error::Dimension("matrix width differs from source ambient dimension".into()));
    }
    let rank = g.rank();
    if rank != r {
        return Err(Error::RankDeficient { rank, expected: r });
    }
    let source_image_rank = src.image_dim(g);
    if source_image_rank < m_prime {
        return Err(Error::Precondition(format!(
            "image rank {source_image_rank} is below the claimed m' = {m_prime}"
        )));
    }
    let h = g.right_kernel_basis();
    let dual_source = src.dual_basis();
    let dual_image_rank = h.mul(&dual_source.transpose()).rank();
    Ok(DualityVerdict {
        h,
        dual_source,
        source_image_rank,
        dual_image_rank,
        bound: n as i64 - src.dim() as i64 + m_prime as i64 - r as i64,
    })
}

/// Per-seed kernel duals of a family of surjective maps.
pub fn dual_family(f: &LinearCondenser) -> Result<LinearCondenser> {
    let mut mats = Vec::with_capacity(f.seed_count() as usize);
    for z in 0..f.seed_count() {
        let m = f.matrix_for_seed(z);
        let rank = m.rank();
        if rank != m.rows() {
            return Err(Error::NotDual(format!("seed {z} has rank {rank} < {} (not surjective)", m.rows())));
        }
        mats.push(m.right_kernel_basis());
    }
    LinearCondenser::explicit(mats)
}

/// One source of the duality scan: errors of `f` on `X` and of `g` on the dual of `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualPair {
    pub f_epsilon: f64,
    pub g_epsilon: f64,
}

#[derive(Clone, Debug)]
pub struct DualPairVerdict {
    pub m: usize,
    pub m_prime: usize,
    pub g_target: i64,
    pub pairs: Vec<DualPair>,
    /// `(epsilon, f condenses all, g condenses all)` for each tested epsilon.
    pub equivalences: Vec<(f64, bool, bool)>,
}

impl DualPairVerdict {
    pub fn f_epsilon(&self) -> f64 {
        self.pairs.iter().map(|p| p.f_epsilon).fold(0.0, f64::max)
    }

    pub fn g_epsilon(&self) -> f64 {
        self.pairs.iter().map(|p| p.g_epsilon).fold(0.0, f64::max)
    }

    pub fn iff_holds(&self) -> bool {
        self.equivalences.iter().all(|&(_, a, b)| a == b)
    }
}

/// Compares `f` as an `m → m'` condenser on `sources` with `g` as an
/// `(n-m) → (n-m+m'-r)` condenser on their duals, seed-averaged errors
/// computed by the rank formula.
pub fn dual_pair_check(
    f: &LinearCondenser,
    g: &LinearCondenser,
    sources: &[AffineSource],
    m_prime: usize,
    epsilons: &[f64],
) -> Result<DualPairVerdict> {
    let (n, r) = (f.n(), f.r());
    if g.n() != n || g.r() + r != n || g.seed_count() != f.seed_count() {
        return Err(Error::NotDual("families differ in shape or seed count".into()));
    }
    let m = sources.first().map_or(0, AffineSource::dim);
    if sources.iter().any(|s| s.dim() != m || s.ambient() != n) {
        return Err(Error::InvalidParameter("sources must share dimension and ambient space".into()));
    }
    let pairs_of_mats: Vec<(BitMatrix, BitMatrix)> = (0..f.seed_count())
        .map(|z| {
            let (a, b) = (f.matrix_for_seed(z), g.matrix_for_seed(z));
            if a.rank() != r || b.rank() != n - r || !a.mul(&b.transpose()).is_zero() {
                return Err(Error::NotDual(format!("seed {z}: matrices are not surjective kernel duals")));
            }
            Ok((a, b))
        })
        .collect::<Result<_>>()?;
    let g_target = n as i64 - m as i64 + m_prime as i64 - r as i64;
    let seeds = pairs_of_mats.len() as f64;
    let pairs: Vec<DualPair> = sources
        .par_iter()
        .map(|src| {
            let dual = src.dual();
            let (mut fe, mut ge) = (0.0, 0.0);
            for (a, b) in &pairs_of_mats {
                fe += src.closeness_by_rank(a, m_prime as f64);
                ge += dual.closeness_by_rank(b, g_target as f64);
            }
            DualPair { f_epsilon: fe / seeds, g_epsilon: ge / seeds }
        })
        .collect();
    let fmax = pairs.iter().map(|p| p.f_epsilon).fold(0.0, f64::max);
    let gmax = pairs.iter().map(|p| p.g_epsilon).fold(0.0, f64::max);
    let equivalences = epsilons
        .iter()
        .map(|&e| (e, fmax <= e + 1e-12, gmax <= e + 1e-12))
        .collect();
    Ok(DualPairVerdict { m, m_prime, g_target, pairs, equivalences })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn naive_closeness(support: &[u64], target: f64, f: impl Fn(u64) -> u64) -> f64 {
        let mut counts = std::collections::HashMap::new();
        for &x in support {
            *counts.entry(f(x)).or_insert(0usize) += 1;
        }
        let dist = crate::probability::FiniteDistribution::from_counts(
            64,
            counts.into_iter().map(|(k, v)| (k, v as u64)),
        )
        .unwrap();
        dist.closeness_to_minentropy(target)
    }

    #[test]
    fn linear_hash_special_seeds() {
        let f = LinearCondenser::linear_hash_family(8, 4).unwrap();
        assert_eq!(f.matrix_for_seed(1), BitMatrix::truncation(4, 8));
        assert!(f.matrix_for_seed(0).is_zero());
        assert!(LinearCondenser::linear_hash_family(8, 0).is_err());
        assert!(LinearCondenser::linear_hash_family(8, 9).is_err());
    }

    #[test]
    fn matrix_agrees_with_direct_evaluation() {
        let mut rng = RngStream::new(3);
        let fams = [
            LinearCondenser::linear_hash_family(10, 6).unwrap(),
            LinearCondenser::guv(4, 3, 2, 2).unwrap(),
            LinearCondenser::guv(4, 3, 3, 4).unwrap(),
            LinearCondenser::truncation(3, 7).unwrap(),
        ];
        for f in &fams {
            for _ in 0..50 {
                let z = rng.below(f.seed_count());
                let x = rng.below(1 << f.n());
                assert_eq!(f.matrix_for_seed(z).mul_u64(x), f.apply(x, z));
            }
        }
    }

    #[test]
    fn universality_exhaustive_small() {
        for n in [4usize, 6, 8] {
            for r in 1..=n {
                let f = LinearCondenser::linear_hash_family(n, r).unwrap();
                let worst = collision_census(&f).unwrap();
                assert!(worst <= (-(r as f64)).exp2() + 1e-15, "n={n} r={r}: {worst}");
            }
        }
    }

    #[test]
    fn guv_degree_zero_closure() {
        let f = LinearCondenser::guv(4, 3, 3, 2).unwrap();
        let field = ExtField::new(4).unwrap();
        for c in 0..16u64 {
            let out = f.apply(c, 7);
            let expect = c | field.pow(c, 2) << 4 | field.pow(c, 4) << 8;
            assert_eq!(out, expect);
        }
        assert_eq!(f.apply(0, 5), 0);
    }

    // Independent route: raise F to h^i with a single pow_mod call.
    #[test]
    fn guv_matches_direct_power_oracle() {
        let f = LinearCondenser::guv(4, 3, 2, 2).unwrap();
        let Construction::Guv(g) = f.construction().clone() else { unreachable!() };
        let mut rng = RngStream::new(11);
        for _ in 0..200 {
            let x = rng.below(1 << 12);
            let z = rng.below(16);
            let poly = FieldPoly::new(g.field, (0..3).map(|j| (x >> (4 * j)) & 15).collect());
            let mut expect = 0;
            for i in 0..2u32 {
                let e = u128::from(g.h).pow(i);
                let fi = if i == 0 { poly.clone() } else { poly.pow_mod(e, &g.modulus) };
                expect |= fi.eval(z) << (4 * i);
            }
            assert_eq!(f.apply(x, z), expect);
        }
    }

    #[test]
    fn guv_per_seed_additivity() {
        let f = LinearCondenser::guv(4, 3, 2, 2).unwrap();
        let mut rng = RngStream::new(12);
        for _ in 0..2000 {
            let (x, y, z) = (rng.below(1 << 12), rng.below(1 << 12), rng.below(16));
            assert_eq!(f.apply(x ^ y, z), f.apply(x, z) ^ f.apply(y, z));
        }
    }

    #[test]
    fn guv_rejects_bad_parameters() {
        assert!(LinearCondenser::guv(4, 3, 2, 3).is_err());
        assert!(LinearCondenser::guv(4, 3, 4, 2).is_err());
        // The degree-2 table modulus splits over GF(16).
        assert!(matches!(
            LinearCondenser::guv(4, 2, 1, 2),
            Err(Error::ReducibleModulus { degree: 2, .. })
        ));
    }

    #[test]
    fn verify_trivial_cases() {
        let t = LinearCondenser::truncation(4, 4).unwrap();
        let u = FlatDistribution::new(4, 0..16).unwrap();
        assert_eq!(verify_condenser(&t, &u, 4.0).unwrap(), 0.0);
        let zero = LinearCondenser::explicit(vec![BitMatrix::zeros(2, 4)]).unwrap();
        assert!(verify_condenser(&zero, &u, 1.0).unwrap() >= 0.5);
    }

    #[test]
    fn joint_closeness_equals_direct_joint_clipping() {
        let f = LinearCondenser::linear_hash_family(6, 3).unwrap();
        let mut rng = RngStream::new(19);
        for _ in 0..10 {
            let picks = rand::seq::index::sample(&mut rng, 64, 16);
            let x = FlatDistribution::new(6, picks.iter().map(|v| v as u64)).unwrap();
            let mut joint = std::collections::HashMap::new();
            for z in 0..64u64 {
                for &v in x.support() {
                    *joint.entry((z << 8) | f.apply(v, z)).or_insert(0u64) += 1;
                }
            }
            let d = crate::probability::FiniteDistribution::from_counts(14, joint).unwrap();
            let direct = d.closeness_to_minentropy(6.0 + 3.0);
            assert!((direct - verify_condenser(&f, &x, 3.0).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn image_closeness_matches_naive_count() {
        let mut rng = RngStream::new(1);
        for _ in 0..30 {
            let m = BitMatrix::from_u64_rows(&(0..4).map(|_| rng.below(256)).collect::<Vec<_>>(), 8);
            let supp: Vec<u64> = (0..20).map(|_| rng.below(256)).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
            let t = rng.gen_range(0.0..4.0);
            let a = image_closeness(&m, &supp, t);
            let b = naive_closeness(&supp, t, |x| m.mul_u64(x));
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn hash_lemma_example() {
        let f = LinearCondenser::linear_hash_family(8, 2)
            .unwrap()
            .with_claim(CondenserKind::Extractor, 6.0, 0.25)
            .unwrap();
        for x in source_panel(8, 6, 12, 1).unwrap() {
            assert!(verify_condenser(&f, &x, 2.0).unwrap() <= 0.25);
        }
        assert!(matches!(
            LinearCondenser::linear_hash_family(8, 3).unwrap().with_claim(CondenserKind::Extractor, 6.0, 0.25),
            Err(Error::ClaimBound(_))
        ));
        assert!(LinearCondenser::linear_hash_family(8, 5)
            .unwrap()
            .with_claim(CondenserKind::Lossless, 4.0, 0.5)
            .is_err());
    }

    #[test]
    fn infeasible_enumeration_is_reported() {
        let f = LinearCondenser::linear_hash_family(20, 4).unwrap();
        let x = FlatDistribution::new(20, 0..64).unwrap();
        assert!(matches!(verify_condenser(&f, &x, 4.0), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn lossless_monotone_trivial_cases() {
        let t = LinearCondenser::truncation(4, 8).unwrap();
        let x = AffineSource::coordinate(8, &[0, 1, 2, 3]).unwrap().to_flat().unwrap();
        for (_, e) in verify_lossless_monotone(&t, &x, 0..=4, 5, 3).unwrap() {
            assert_eq!(e, 0.0);
        }
        let f = LinearCondenser::linear_hash_family(8, 3).unwrap();
        let wide = FlatDistribution::new(8, 0..256).unwrap();
        assert_eq!(verify_lossless_monotone(&f, &wide, 0..=0, 4, 3).unwrap(), vec![(0, 0.0)]);
    }

    #[test]
    fn seed_census_cases() {
        let t = LinearCondenser::truncation(4, 4).unwrap();
        let u = FlatDistribution::new(4, 0..16).unwrap();
        let c = seed_census(&t, &u, 4.0, 0.0, 0.1).unwrap();
        assert_eq!(c.bad_fraction, 0.0);
        let zero = LinearCondenser::explicit(vec![BitMatrix::zeros(2, 4); 4]).unwrap();
        let c = seed_census(&zero, &u, 1.0, 0.1, 0.5).unwrap();
        assert_eq!(c.bad_fraction, 1.0);
        assert!(!c.premise_holds());
        let f = LinearCondenser::linear_hash_family(8, 4).unwrap();
        let mut rng = RngStream::new(8);
        for _ in 0..10 {
            let picks = rand::seq::index::sample(&mut rng, 256, 16);
            let x = FlatDistribution::new(8, picks.iter().map(|v| v as u64)).unwrap();
            let eps = verify_condenser(&f, &x, 4.0).unwrap();
            for delta in [0.1, 0.25, 0.5] {
                let c = seed_census(&f, &x, 4.0, eps, delta).unwrap();
                assert!(c.premise_holds() && c.bound_holds());
            }
        }
    }

    #[test]
    fn prop10_cases() {
        let src = AffineSource::coordinate(6, &[1, 3, 4]).unwrap();
        let id = prop10_check(&BitMatrix::identity(6), &src).unwrap();
        assert_eq!(id.image_dim, 3);
        let zero = prop10_check(&BitMatrix::zeros(3, 6), &src).unwrap();
        assert_eq!(zero.image_dim, 0);
        let mut rng = RngStream::new(10);
        for _ in 0..200 {
            let g = BitMatrix::from_u64_rows(&(0..5).map(|_| rng.below(1024)).collect::<Vec<_>>(), 10);
            let src = AffineSource::random(10, 4, &mut rng);
            let rep = prop10_check(&g, &src).unwrap();
            assert_eq!(rep.enumerated_dim, rep.image_dim as f64);
            assert!(rep.dichotomy_holds());
        }
    }

    #[test]
    fn subspace_enumeration_counts() {
        // Gaussian binomials [4,2]_2 = 35, [5,2]_2 = 155, [6,3]_2 = 1395.
        assert_eq!(enumerate_subspaces(4, 2).len(), 35);
        assert_eq!(enumerate_subspaces(5, 2).len(), 155);
        let all = enumerate_subspaces(6, 3);
        assert_eq!(all.len(), 1395);
        assert!(all.iter().all(|b| b.rank() == 3));
        let mut spans: Vec<Vec<u64>> = all
            .iter()
            .map(|b| {
                let mut p = AffineSource::linear(b.clone()).unwrap().points();
                p.sort_unstable();
                p
            })
            .collect();
        spans.sort();
        spans.dedup();
        assert_eq!(spans.len(), 1395);
    }

    #[test]
    fn rank_formula_matches_enumeration() {
        let mut rng = RngStream::new(15);
        for _ in 0..100 {
            let m = BitMatrix::from_u64_rows(&(0..4).map(|_| rng.below(512)).collect::<Vec<_>>(), 9);
            let src = AffineSource::random(9, rng.below(6) as usize, &mut rng);
            let t = rng.below(5) as f64;
            let by_rank = src.closeness_by_rank(&m, t);
            let enumerated = image_closeness(&m, src.to_flat().unwrap().support(), t);
            assert!((by_rank - enumerated).abs() < 1e-12);
        }
    }

    #[test]
    fn duality_coordinate_example() {
        let g = BitMatrix::truncation(2, 4);
        let src = AffineSource::coordinate(4, &[0, 1]).unwrap();
        let v = duality_check(&g, &src, 2).unwrap();
        assert_eq!(v.h, BitMatrix::from_u64_rows(&[0b0100, 0b1000], 4));
        assert_eq!(v.dual_source, BitMatrix::from_u64_rows(&[0b0100, 0b1000], 4));
        assert_eq!((v.dual_image_rank, v.bound), (2, 2));
        let v0 = duality_check(&g, &src, 0).unwrap();
        assert!(v0.holds() && v0.bound <= 0);
        assert!(matches!(
            duality_check(&BitMatrix::from_u64_rows(&[1, 1], 4), &src, 0),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn duality_random_instances() {
        let mut rng = RngStream::new(16);
        for _ in 0..1000 {
            let n = 2 + rng.below(11) as usize;
            let r = rng.below(n as u64 + 1) as usize;
            let m = rng.below(n as u64 + 1) as usize;
            let g = AffineSource::random(n, r, &mut rng).basis().clone();
            let src = AffineSource::random(n, m, &mut rng);
            let k = src.image_dim(&g);
            let m_prime = rng.below(k as u64 + 1) as usize;
            let v = duality_check(&g, &src, m_prime).unwrap();
            assert!(v.holds());
            assert_eq!(v.dual_image_rank as i64, n as i64 - m as i64 - r as i64 + k as i64);
        }
    }

    #[test]
    fn dual_pair_truncation() {
        let (n, r) = (6, 3);
        let f = LinearCondenser::truncation(r, n).unwrap();
        let g = dual_family(&f).unwrap();
        assert_eq!(g.matrix_for_seed(0), BitMatrix::from_u64_rows(&[0b001000, 0b010000, 0b100000], 6));
        let sources: Vec<AffineSource> = combinations(n, 3)
            .iter()
            .map(|c| AffineSource::coordinate(n, c).unwrap())
            .collect();
        let v = dual_pair_check(&f, &g, &sources, 3, &[0.0, 0.25, 0.49]).unwrap();
        assert!(v.iff_holds());
        for (p, c) in v.pairs.iter().zip(combinations(n, 3)) {
            assert_eq!(p.f_epsilon == 0.0, c == vec![0, 1, 2]);
            assert!((p.f_epsilon - p.g_epsilon).abs() < 1e-12);
        }
    }

    #[test]
    fn dual_pair_exhaustive_random_pairs() {
        let mut rng = RngStream::new(17);
        for _ in 0..6 {
            let n = 6;
            let r = 1 + rng.below(5) as usize;
            let mats: Vec<BitMatrix> = (0..4).map(|_| AffineSource::random(n, r, &mut rng).basis().clone()).collect();
            let f = LinearCondenser::explicit(mats).unwrap();
            let g = dual_family(&f).unwrap();
            for m in 0..=4usize {
                let sources: Vec<AffineSource> = enumerate_subspaces(n, m)
                    .into_iter()
                    .map(|b| AffineSource::linear(b).unwrap())
                    .collect();
                for m_prime in 0..=m.min(r) {
                    let v = dual_pair_check(&f, &g, &sources, m_prime, &[0.0, 0.1, 0.25, 0.4]).unwrap();
                    assert!(v.iff_holds());
                }
            }
        }
    }

    #[test]
    fn dual_pair_rejects_non_duals() {
        let f = LinearCondenser::truncation(2, 4).unwrap();
        let wrong = LinearCondenser::explicit(vec![BitMatrix::truncation(2, 4)]).unwrap();
        let src = vec![AffineSource::coordinate(4, &[0]).unwrap()];
        assert!(matches!(dual_pair_check(&f, &wrong, &src, 0, &[0.1]), Err(Error::NotDual(_))));
        let hash = LinearCondenser::linear_hash_family(4, 2).unwrap();
        assert!(matches!(dual_family(&hash), Err(Error::NotDual(_))));
    }

    #[test]
    fn descriptor_round_trip() {
        for f in [
            LinearCondenser::linear_hash_family(8, 3).unwrap(),
            LinearCondenser::guv(4, 3, 2, 2).unwrap().with_claim(CondenserKind::Lossless, 6.0, 0.25).unwrap(),
            LinearCondenser::truncation(2, 5).unwrap(),
            LinearCondenser::explicit(vec![BitMatrix::identity(3), BitMatrix::zeros(3, 3)]).unwrap(),
        ] {
            let text = serde_json::to_string(&f.to_descriptor()).unwrap();
            let back: CondenserDescriptor = serde_json::from_str(&text).unwrap();
            assert_eq!(LinearCondenser::from_descriptor(&back).unwrap(), f);
        }
        let json = r#"{"n":8,"d":8,"r":3,"construction":"linear-hash","modulus":"11b"}"#;
        let desc: CondenserDescriptor = serde_json::from_str(json).unwrap();
        assert!(LinearCondenser::from_descriptor(&desc).is_ok());
        let bad = json.replace("11b", "11d");
        let desc: CondenserDescriptor = serde_json::from_str(&bad).unwrap();
        assert!(LinearCondenser::from_descriptor(&desc).is_err());
    }

    proptest::proptest! {
        #[test]
        fn hash_family_is_linear(seed in 0u64..256, x in 0u64..256, y in 0u64..256) {
            let f = LinearCondenser::linear_hash_family(8, 5).unwrap();
            proptest::prop_assert_eq!(f.apply(x ^ y, seed), f.apply(x, seed) ^ f.apply(y, seed));
            proptest::prop_assert_eq!(f.matrix_for_seed(seed), f.matrix_for_seed(seed));
        }
    }
}
