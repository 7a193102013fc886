//! Reed–Solomon codes over GF(2^w) with evaluation points `0, 1, ..., s-1`
//! (field elements by their integer encoding) and a Berlekamp–Welch decoder.

use crate::error::{Error, Result};
use crate::field::{ExtField, FieldPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReedSolomonCode {
    field: ExtField,
    s: usize,
    k: usize,
}

impl ReedSolomonCode {
    pub fn new(field: ExtField, s: usize, k: usize) -> Result<Self> {
        if s == 0 || s as u64 > field.order() {
            return Err(Error::InvalidParameter(format!(
                "block length {s} needs 1 <= s <= {}",
                field.order()
            )));
        }
        if k == 0 || k > s {
            return Err(Error::InvalidParameter(format!("dimension {k} needs 1 <= k <= {s}")));
        }
        Ok(Self { field, s, k })
    }

    pub fn field(&self) -> ExtField {
        self.field
    }

    pub fn len(&self) -> usize {
        self.s
    }

    pub fn is_empty(&self) -> bool {
        self.s == 0
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    pub fn min_distance(&self) -> usize {
        self.s - self.k + 1
    }

    pub fn radius(&self) -> usize {
        (self.s - self.k) / 2
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.s as f64
    }

    pub fn encode(&self, message: &[u64]) -> Result<Vec<u64>> {
        if message.len() != self.k {
            return Err(Error::Dimension(format!("message has {} symbols, need {}", message.len(), self.k)));
        }
        let poly = FieldPoly::new(self.field, message.to_vec());
        Ok((0..self.s as u64).map(|a| poly.eval(a)).collect())
    }

    /// Unique decoding up to `radius()` symbol errors. `None` when no
    /// codeword lies within the radius.
    pub fn decode(&self, received: &[u64]) -> Result<Option<Vec<u64>>> {
        if received.len() != self.s {
            return Err(Error::Dimension(format!("word has {} symbols, need {}", received.len(), self.s)));
        }
        let f = self.field;
        let e = self.radius();
        // Unknowns: E_0..E_{e-1} (E monic of degree e), then Q_0..Q_{e+k-1}.
        // Row i: sum_j Q_j a^j + y sum_{j<e} E_j a^j = y a^e.
        let width = e + (e + self.k);
        // k >= 1, so the loop below reaches j = e and fills the right side.
        let mut rows = Vec::with_capacity(self.s);
        for (a, &y) in (0..self.s as u64).zip(received) {
            let mut row = vec![0u64; width + 1];
            let mut pw = 1;
            for j in 0..e + self.k {
                if j < e {
                    row[j] = f.mul(y, pw);
                }
                row[e + j] = pw;
                if j == e {
                    row[width] = f.mul(y, pw);
                }
                pw = f.mul(pw, a);
            }
            rows.push(row);
        }
        let Some(sol) = solve(f, rows, width) else {
            return Ok(None);
        };
        let mut e_coeffs = sol[..e].to_vec();
        e_coeffs.push(1);
        let locator = FieldPoly::new(f, e_coeffs);
        let q = FieldPoly::new(f, sol[e..].to_vec());
        let (p, rem) = q.div_rem(&locator);
        if !rem.is_zero() || p.degree().is_some_and(|d| d >= self.k) {
            return Ok(None);
        }
        let message: Vec<u64> = (0..self.k).map(|j| p.coeff(j)).collect();
        let word = self.encode(&message)?;
        let dist = word.iter().zip(received).filter(|(a, b)| a != b).count();
        Ok((dist <= e).then_some(message))
    }
}

/// Gaussian elimination over the field on an augmented matrix with `width`
/// unknowns. Free variables are set to zero.
fn solve(f: ExtField, mut rows: Vec<Vec<u64>>, width: usize) -> Option<Vec<u64>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = f.inv(rows[r][c]).expect("nonzero pivot");
        for v in rows[r].iter_mut() {
            *v = f.mul(*v, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let factor = row[c];
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v ^= f.mul(factor, pv);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    if rows[r..].iter().any(|row| row[width] != 0) {
        return None;
    }
    let mut x = vec![0u64; width];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rows[i][width];
    }
    Some(x)
}
