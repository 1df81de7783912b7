//! LU factorization with partial pivoting for matrices with at most two
//! sub- and two super-diagonals.

use crate::error::{MfiError, Result};

const WIDTH: usize = 7;

#[derive(Debug, Clone, Copy)]
struct Row {
    // column of vals[0]
    start: isize,
    vals: [f64; WIDTH],
}

impl Row {
    fn get(&self, col: usize) -> f64 {
        let k = col as isize - self.start;
        if (0..WIDTH as isize).contains(&k) {
            self.vals[k as usize]
        } else {
            0.0
        }
    }

    // live entries of an uneliminated row at step k lie in [k, k + 4]
    fn rebase(&mut self, k: usize) {
        let mut vals = [0.0; WIDTH];
        for (j, v) in vals.iter_mut().enumerate() {
            *v = self.get(k + j);
        }
        self.start = k as isize;
        self.vals = vals;
    }

    fn slot(&mut self, col: usize) -> &mut f64 {
        &mut self.vals[(col as isize - self.start) as usize]
    }
}

/// Factored pentadiagonal matrix.
#[derive(Debug, Clone)]
pub(crate) struct BandedLu {
    rows: Vec<Row>,
    pivots: Vec<usize>,
    multipliers: Vec<[f64; 2]>,
}

impl BandedLu {
    /// Factors the matrix whose row `i` is `bands[i] = [a_{i,i-2}, .., a_{i,i+2}]`.
    pub(crate) fn factor(bands: &[[f64; 5]]) -> Result<Self> {
        let n = bands.len();
        let mut rows: Vec<Row> = bands
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let mut vals = [0.0; WIDTH];
                vals[..5].copy_from_slice(b);
                Row { start: i as isize - 2, vals }
            })
            .collect();
        let scale = bands.iter().flatten().fold(0.0_f64, |a, v| a.max(v.abs()));
        let tiny = scale * f64::EPSILON * 1e-3;
        let mut pivots = Vec::with_capacity(n);
        let mut multipliers = Vec::with_capacity(n);
        for k in 0..n {
            let last = (k + 2).min(n - 1);
            for row in &mut rows[k..=last] {
                row.rebase(k);
            }
            let p = (k..=last).max_by(|&a, &b| rows[a].get(k).abs().total_cmp(&rows[b].get(k).abs())).unwrap_or(k);
            rows.swap(k, p);
            pivots.push(p);
            let mut piv = rows[k].get(k);
            if piv.abs() <= tiny {
                // exactly singular shift: perturb so inverse iteration still works
                piv = if piv < 0.0 { -tiny.max(f64::MIN_POSITIVE) } else { tiny.max(f64::MIN_POSITIVE) };
                *rows[k].slot(k) = piv;
            }
            let mut mult = [0.0; 2];
            for (j, r) in (k + 1..=last).enumerate() {
                let l = rows[r].get(k) / piv;
                mult[j] = l;
                if l != 0.0 {
                    let pivot_row = rows[k];
                    for c in k..=(k + 4).min(n - 1) {
                        *rows[r].slot(c) -= l * pivot_row.get(c);
                    }
                }
            }
            multipliers.push(mult);
        }
        if rows.iter().any(|r| r.vals.iter().any(|v| !v.is_finite())) {
            return Err(MfiError::Contract("banded factorization produced non-finite values".into()));
        }
        Ok(Self { rows, pivots, multipliers })
    }

    pub(crate) fn solve(&self, rhs: &mut [f64]) {
        let n = self.rows.len();
        for k in 0..n {
            rhs.swap(k, self.pivots[k]);
            let bk = rhs[k];
            for (j, r) in (k + 1..=(k + 2).min(n - 1)).enumerate() {
                rhs[r] -= self.multipliers[k][j] * bk;
            }
        }
        for k in (0..n).rev() {
            let row = &self.rows[k];
            let mut s = rhs[k];
            for c in k + 1..=(k + 4).min(n - 1) {
                s -= row.get(c) * rhs[c];
            }
            rhs[k] = s / row.get(k);
        }
    }
}
