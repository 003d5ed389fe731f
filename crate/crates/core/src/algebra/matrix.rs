//! Exact matrices: numeric rank, fraction-free symbolic rank, linear solve.

use std::fmt;

use super::poly::{Assignment, MultiPoly};
use super::scalar::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<MultiPoly>,
}

/// Outcome of fraction-free elimination: the rank and a nonvanishing maximal
/// minor, which certifies the rank over the fraction field.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicRank {
    pub rank: usize,
    pub pivot_rows: Vec<usize>,
    pub pivot_cols: Vec<usize>,
    pub minor: MultiPoly,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, entries: vec![MultiPoly::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<MultiPoly>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            entries.extend(r);
        }
        Ok(ExactMatrix { rows: n, cols, entries })
    }

    pub fn from_scalars(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        Self::from_rows(rows.into_iter().map(|r| r.into_iter().map(MultiPoly::constant).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &MultiPoly {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: MultiPoly) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<MultiPoly> {
        self.entries[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(MultiPoly::is_constant)
    }

    pub fn evaluate(&self, point: &Assignment) -> Result<Vec<Vec<Scalar>>> {
        (0..self.rows).map(|r| (0..self.cols).map(|c| self.get(r, c).eval(point)).collect()).collect()
    }

    /// Rank of a constant matrix.
    pub fn scalar_rank(&self) -> Result<usize> {
        Ok(scalar_rank(self.evaluate(&Assignment::new())?))
    }

    /// Maximum rank over the evaluation points, a lower bound for the generic rank.
    /// With no points the matrix must be constant.
    pub fn rank_at(&self, points: &[Assignment]) -> Result<usize> {
        if points.is_empty() {
            return self.scalar_rank();
        }
        let mut best = 0;
        for p in points {
            best = best.max(scalar_rank(self.evaluate(p)?));
        }
        Ok(best)
    }

    /// Bareiss elimination over the polynomial ring.
    pub fn symbolic_rank(&self) -> SymbolicRank {
        let mut m: Vec<Vec<MultiPoly>> = (0..self.rows).map(|r| self.row(r)).collect();
        let mut row_ids: Vec<usize> = (0..self.rows).collect();
        let mut prev = MultiPoly::one();
        let mut rank = 0;
        let mut pivot_cols = Vec::new();
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            row_ids.swap(rank, p);
            for r in rank + 1..self.rows {
                for c in col + 1..self.cols {
                    let num = &(&m[rank][col] * &m[r][c]) - &(&m[r][col] * &m[rank][c]);
                    m[r][c] = num.div_exact(&prev).expect("Bareiss step is an exact division");
                }
                m[r][col] = MultiPoly::zero();
            }
            prev = m[rank][col].clone();
            pivot_cols.push(col);
            rank += 1;
        }
        let mut pivot_rows = row_ids[..rank].to_vec();
        pivot_rows.sort_unstable();
        let minor = if rank == 0 { MultiPoly::one() } else { prev };
        SymbolicRank { rank, pivot_rows, pivot_cols, minor }
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Row-reduce in place; returns pivot columns.
fn row_reduce(m: &mut [Vec<Scalar>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for k in c..cols {
            m[r][k] = &m[r][k] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..cols {
                    let d = &f * &m[r][k];
                    m[i][k] -= &d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn scalar_rank(mut m: Vec<Vec<Scalar>>) -> usize {
    row_reduce(&mut m).len()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearSolution {
    pub values: Vec<Scalar>,
    pub rank: usize,
    pub free: Vec<usize>,
}

/// Solve `A x = b` exactly. Pivots are taken in column order, so free
/// unknowns are the trailing ones of each dependent block; they are set to 0.
pub fn solve_linear(a: &[Vec<Scalar>], b: &[Scalar]) -> Result<LinearSolution> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    let n = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Scalar>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut aug);
    if let Some(&last) = pivots.last() {
        if last == n {
            let row = pivots.len() - 1;
            return Err(Error::Inconsistent(format!("reduced equation {row} reads 0 = {}", aug[row][n])));
        }
    }
    let mut values = vec![Scalar::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        values[c] = aug[r][n].clone();
    }
    let free = (0..n).filter(|c| !pivots.contains(c)).collect();
    Ok(LinearSolution { values, rank: pivots.len(), free })
}
