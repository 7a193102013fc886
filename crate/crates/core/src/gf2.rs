//! Dense vectors and matrices over GF(2).
//!
//! Bit `j` of a row is column `j` (little-endian column indexing). Rows are
//! packed into 64-bit words; bits past `cols` are always zero.
//!
//! Gaussian elimination scans columns left to right and takes the topmost
//! available row as pivot, so kernels and particular solutions are fully
//! deterministic.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A bit-vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Builds a vector of length `len` from the low bits of `value`.
    ///
    /// Bits of `value` at positions `>= len` are discarded.
    pub fn from_u64(value: u64, len: usize) -> Self {
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value & low_mask(len.min(WORD));
        }
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Standard basis vector `e_index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Low 64 bits as an integer. Panics if the vector is longer than 64 bits.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= WORD, "vector of length {} does not fit in u64", self.len);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit index {index} out of range {}", self.len);
        (self.words[index / WORD] >> (index % WORD)) & 1 == 1
    }

    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.len, "bit index {index} out of range {}", self.len);
        let mask = 1u64 << (index % WORD);
        if value {
            self.words[index / WORD] |= mask;
        } else {
            self.words[index / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, index: usize) {
        assert!(index < self.len, "bit index {index} out of range {}", self.len);
        self.words[index / WORD] ^= 1u64 << (index % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.len, other.len, "length mismatch in and");
        BitVec {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    /// Bitwise complement within `len` bits.
    pub fn not(&self) -> BitVec {
        let mut out = BitVec {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_tail();
        out
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let tz = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.iter_ones().next()
    }

    /// Concatenation `self || other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Bits `[start, start + len)` as a new vector.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = BitVec::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    /// Lowercase hex of the vector read as an integer (bit j has weight 2^j),
    /// zero-padded to `ceil(len / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4).max(1);
        let mut s = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut nibble = 0u32;
            for b in 0..4 {
                let idx = d * 4 + b;
                if idx < self.len && self.get(idx) {
                    nibble |= 1 << b;
                }
            }
            s.push(char::from_digit(nibble, 16).expect("nibble < 16"));
        }
        s
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<BitVec> {
        let hex = hex.trim();
        let mut out = BitVec::zeros(len);
        for (d, c) in hex.chars().rev().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?}")))?;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let idx = d * 4 + b;
                    if idx >= len {
                        return Err(Error::Parse(format!(
                            "hex string {hex:?} has bits beyond length {len}"
                        )));
                    }
                    out.set(idx, true);
                }
            }
        }
        Ok(out)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= low_mask(rem);
            }
        }
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, "]")
    }
}

pub(crate) fn low_mask(bits: usize) -> u64 {
    if bits >= WORD {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Row-major dense matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVec>,
}

/// Reduced row echelon form together with the pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: BitMatrix,
    /// `pivots[i]` is the pivot column of row `i` of `reduced`.
    pub pivots: Vec<usize>,
}

/// Solution set of `A·x = b`: a particular solution plus a kernel basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: BitVec,
    /// Rows form a basis of `{x : A·x = 0}`.
    pub kernel: BitMatrix,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BitVec::unit(n, i)).collect(),
        }
    }

    /// `[I_r | 0]`, the projection onto the first `r` coordinates.
    pub fn truncation(r: usize, n: usize) -> Self {
        assert!(r <= n);
        Self {
            cols: n,
            rows: (0..r).map(|i| BitVec::unit(n, i)).collect(),
        }
    }

    pub fn from_rows(rows: Vec<BitVec>, cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "row of length {} in matrix with {cols} columns",
                bad.len()
            )));
        }
        Ok(Self { cols, rows })
    }

    /// Rows given as integers (bit j = column j); requires `cols <= 64`.
    pub fn from_u64_rows(rows: &[u64], cols: usize) -> Self {
        assert!(cols <= WORD);
        Self {
            cols,
            rows: rows.iter().map(|&r| BitVec::from_u64(r, cols)).collect(),
        }
    }

    /// Matrix whose column `j` is `columns[j]` (each of length `rows`).
    pub fn from_columns(columns: &[BitVec], rows: usize) -> Result<Self> {
        let mut m = BitMatrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::Dimension(format!(
                    "column of length {} in matrix with {rows} rows",
                    c.len()
                )));
            }
            for i in c.iter_ones() {
                m.set(i, j, true);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn row_vecs(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value);
    }

    pub fn column(&self, j: usize) -> BitVec {
        let mut c = BitVec::zeros(self.rows());
        for (i, row) in self.rows.iter().enumerate() {
            if row.get(j) {
                c.set(i, true);
            }
        }
        c
    }

    /// Rows as integers; requires `cols <= 64`.
    pub fn u64_rows(&self) -> Vec<u64> {
        assert!(self.cols <= WORD, "matrix too wide for u64 rows");
        self.rows.iter().map(BitVec::to_u64).collect()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows());
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.iter_ones() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// Matrix-vector product `M·x` for a column vector `x` of length `cols`.
    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols, "vector length must equal column count");
        let mut out = BitVec::zeros(self.rows());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(x) {
                out.set(i, true);
            }
        }
        out
    }

    /// Row-vector product `x·M` for `x` of length `rows`.
    pub fn vec_mul(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.rows(), "vector length must equal row count");
        let mut out = BitVec::zeros(self.cols);
        for i in x.iter_ones() {
            out.xor_assign(&self.rows[i]);
        }
        out
    }

    /// `M·x` with `x` and the result packed into integers.
    /// Requires `cols <= 64` and `rows <= 64`.
    pub fn mul_u64(&self, x: u64) -> u64 {
        debug_assert!(self.cols <= WORD && self.rows() <= WORD);
        let mut out = 0u64;
        for (i, row) in self.rows.iter().enumerate() {
            let w = row.words.first().copied().unwrap_or(0);
            out |= u64::from((w & x).count_ones() & 1) << i;
        }
        out
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows(), "inner dimensions differ");
        BitMatrix {
            cols: other.cols,
            rows: self.rows.iter().map(|r| other.vec_mul(r)).collect(),
        }
    }

    /// Submatrix keeping the columns whose bit is set in `mask`, in order.
    pub fn select_columns(&self, mask: &BitVec) -> BitMatrix {
        assert_eq!(mask.len(), self.cols);
        let keep: Vec<usize> = mask.iter_ones().collect();
        let mut out = BitMatrix::zeros(self.rows(), keep.len());
        for (i, row) in self.rows.iter().enumerate() {
            for (jj, &j) in keep.iter().enumerate() {
                if row.get(j) {
                    out.rows[i].set(jj, true);
                }
            }
        }
        out
    }

    pub fn stack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        BitMatrix { cols: self.cols, rows }
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVec::is_zero)
    }

    pub fn echelon(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.cols {
            if next == m.rows() {
                break;
            }
            let Some(p) = (next..m.rows()).find(|&i| m.rows[i].get(col)) else {
                continue;
            };
            m.rows.swap(next, p);
            let pivot_row = m.rows[next].clone();
            for (i, row) in m.rows.iter_mut().enumerate() {
                if i != next && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            next += 1;
        }
        m.rows.truncate(next);
        Echelon { reduced: m, pivots }
    }

    /// Dimension of the row space.
    pub fn rank(&self) -> usize {
        if self.cols <= WORD {
            return rank_u64(&self.u64_rows());
        }
        self.echelon().pivots.len()
    }

    /// Basis (as rows) of the right kernel `{v : M·v = 0}`, one vector per
    /// free column in ascending order.
    pub fn right_kernel_basis(&self) -> BitMatrix {
        let ech = self.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let mut basis = BitMatrix::zeros(0, self.cols);
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::unit(self.cols, free);
            for (row, &p) in ech.reduced.rows.iter().zip(&ech.pivots) {
                if row.get(free) {
                    v.set(p, true);
                }
            }
            basis.rows.push(v);
        }
        basis
    }

    /// Solves `A·x = b` for `A = self`.
    ///
    /// The particular solution sets every free variable to zero.
    pub fn solve_affine(&self, b: &BitVec) -> Result<AffineSolution> {
        if b.len() != self.rows() {
            return Err(Error::Dimension(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                self.rows()
            )));
        }
        // Eliminate on the augmented matrix [A | b].
        let aug_rows: Vec<BitVec> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.concat(&BitVec::from_bits(&[b.get(i)])))
            .collect();
        let aug = BitMatrix {
            cols: self.cols + 1,
            rows: aug_rows,
        };
        let ech = aug.echelon();
        if ech.pivots.last() == Some(&self.cols) {
            return Err(Error::Inconsistent);
        }
        let mut particular = BitVec::zeros(self.cols);
        for (row, &p) in ech.reduced.rows.iter().zip(&ech.pivots) {
            if row.get(self.cols) {
                particular.set(p, true);
            }
        }
        Ok(AffineSolution {
            particular,
            kernel: self.right_kernel_basis(),
        })
    }

    /// Parses the text format: a `rows cols` header line followed by one hex
    /// row per line.
    pub fn parse_text(text: &str) -> Result<BitMatrix> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix text".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("bad matrix header {header:?}")))
            })
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse(format!("bad matrix header {header:?}")));
        };
        let parsed: Vec<BitVec> = lines
            .map(|l| BitVec::from_hex(l, cols))
            .collect::<Result<_>>()?;
        if parsed.len() != rows {
            return Err(Error::Parse(format!(
                "header declares {rows} rows, found {}",
                parsed.len()
            )));
        }
        BitMatrix::from_rows(parsed, cols)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows(), self.cols)?;
        for row in &self.rows {
            writeln!(f, "{}", row.to_hex())?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows(), self.cols)?;
        for row in &self.rows {
            for j in 0..self.cols {
                write!(f, "{}", u8::from(row.get(j)))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BitMatrix::parse_text(s)
    }
}

/// Rank of a set of row vectors packed into integers.
pub fn rank_u64(rows: &[u64]) -> usize {
    let mut basis: [u64; 64] = [0; 64];
    let mut rank = 0;
    for &row in rows {
        let mut v = row;
        while v != 0 {
            let top = 63 - v.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = v;
                rank += 1;
                break;
            }
            v ^= basis[top];
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> BitMatrix {
        let rows: Vec<u64> = (0..rows).map(|_| rng.gen::<u64>() & low_mask(cols)).collect();
        BitMatrix::from_u64_rows(&rows, cols)
    }

    // Naive elimination over Vec<Vec<bool>>, independent of the packed path.
    fn naive_rank(m: &BitMatrix) -> usize {
        let mut a: Vec<Vec<bool>> = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
            .collect();
        let mut rank = 0;
        for c in 0..m.cols() {
            if let Some(p) = (rank..a.len()).find(|&i| a[i][c]) {
                a.swap(rank, p);
                for i in 0..a.len() {
                    if i != rank && a[i][c] {
                        for j in 0..m.cols() {
                            a[i][j] ^= a[rank][j];
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn rank_small_cases() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
        assert_eq!(BitMatrix::from_u64_rows(&[0b11, 0b11], 2).rank(), 1);
        assert_eq!(BitMatrix::zeros(4, 5).rank(), 0);
    }

    #[test]
    fn rank_matches_naive_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let m = random_matrix(&mut rng, 8, 12);
            assert_eq!(m.rank(), naive_rank(&m));
            assert_eq!(m.echelon().pivots.len(), naive_rank(&m));
        }
    }

    #[test]
    fn wide_rank_uses_echelon() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let rows: Vec<BitVec> = (0..10)
                .map(|_| BitVec::from_bits(&(0..100).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>()))
                .collect();
            let m = BitMatrix::from_rows(rows, 100).unwrap();
            assert_eq!(m.rank(), naive_rank(&m));
        }
    }

    #[test]
    fn solve_identity() {
        let b = BitVec::from_u64(0b1011, 4);
        let sol = BitMatrix::identity(4).solve_affine(&b).unwrap();
        assert_eq!(sol.particular, b);
        assert_eq!(sol.kernel.rows(), 0);
    }

    #[test]
    fn solve_zero_matrix() {
        let z = BitMatrix::zeros(3, 4);
        let sol = z.solve_affine(&BitVec::zeros(3)).unwrap();
        assert!(sol.particular.is_zero());
        assert_eq!(sol.kernel, BitMatrix::identity(4));
        assert!(matches!(
            z.solve_affine(&BitVec::from_u64(0b010, 3)),
            Err(Error::Inconsistent)
        ));
    }

    #[test]
    fn solve_rejects_wrong_length() {
        assert!(matches!(
            BitMatrix::identity(3).solve_affine(&BitVec::zeros(2)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn solution_set_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let rows = rng.gen_range(1..8);
            let cols = rng.gen_range(1..=10);
            let a = random_matrix(&mut rng, rows, cols);
            let b = rng.gen::<u64>() & low_mask(rows);
            let brute: Vec<u64> = (0..1u64 << cols).filter(|&x| a.mul_u64(x) == b).collect();
            match a.solve_affine(&BitVec::from_u64(b, rows)) {
                Err(Error::Inconsistent) => assert!(brute.is_empty()),
                Err(e) => panic!("unexpected {e}"),
                Ok(sol) => {
                    let kernel = sol.kernel.u64_rows();
                    let mut all: Vec<u64> = (0..1u64 << kernel.len())
                        .map(|c| {
                            let mut x = sol.particular.to_u64();
                            for (i, k) in kernel.iter().enumerate() {
                                if c >> i & 1 == 1 {
                                    x ^= k;
                                }
                            }
                            x
                        })
                        .collect();
                    all.sort_unstable();
                    assert_eq!(all, brute);
                    assert_eq!(brute.len(), 1 << (cols - a.rank()));
                }
            }
        }
    }

    #[test]
    fn kernel_of_truncation() {
        let k = BitMatrix::truncation(2, 5).right_kernel_basis();
        assert_eq!(k.rows(), 3);
        for (i, row) in k.row_vecs().iter().enumerate() {
            assert_eq!(*row, BitVec::unit(5, i + 2));
        }
        assert_eq!(BitMatrix::identity(6).right_kernel_basis().rows(), 0);
    }

    #[test]
    fn kernel_dimension_and_annihilation() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let rows = rng.gen_range(0..16);
            let cols = rng.gen_range(1..=16);
            let m = random_matrix(&mut rng, rows, cols);
            let k = m.right_kernel_basis();
            assert_eq!(k.rows() + m.rank(), cols);
            assert_eq!(k.rank(), k.rows());
            for v in k.row_vecs() {
                assert!(m.mul_vec(v).is_zero());
            }
        }
    }

    #[test]
    fn text_format() {
        let m = BitMatrix::from_u64_rows(&[0b1_0000_0001, 0b11], 9);
        let text = m.to_text();
        assert_eq!(text, "2 9\n101\n003\n");
        assert_eq!(text.parse::<BitMatrix>().unwrap(), m);
        assert!("2 3\n1\n".parse::<BitMatrix>().is_err());
        assert!("1 3\nf\n".parse::<BitMatrix>().is_err());
    }

    #[test]
    fn products_and_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = random_matrix(&mut rng, 5, 7);
        let b = random_matrix(&mut rng, 7, 3);
        let ab = a.mul(&b);
        for x in 0..8u64 {
            assert_eq!(ab.mul_u64(x), a.mul_u64(b.mul_u64(x)));
        }
        assert_eq!(a.transpose().transpose(), a);
        let x = BitVec::from_u64(0b10110, 5);
        assert_eq!(a.vec_mul(&x), a.transpose().mul_vec(&x));
    }

    #[test]
    fn column_selection() {
        let m = BitMatrix::from_u64_rows(&[0b1010, 0b0110], 4);
        let s = m.select_columns(&BitVec::from_u64(0b1100, 4));
        assert_eq!(s.u64_rows(), vec![0b10, 0b01]);
    }

    #[test]
    fn hex_round_trip_long() {
        let mut v = BitVec::zeros(70);
        v.set(0, true);
        v.set(69, true);
        assert_eq!(BitVec::from_hex(&v.to_hex(), 70).unwrap(), v);
        assert_eq!(v.not().weight(), 68);
    }
}
