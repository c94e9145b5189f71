use serde::{Deserialize, Serialize};

use super::NumError;

/// Dense row-major matrix of `f64`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.values[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self, NumError> {
        if values.len() != rows * cols {
            return Err(NumError::Shape {
                op: "from_vec",
                expected: rows * cols,
                actual: values.len(),
            });
        }
        check_finite("from_vec", &values)?;
        Ok(Self { rows, cols, values })
    }

    /// Builds a matrix by evaluating `f(row, col)` for every entry.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                values.push(f(r, c));
            }
        }
        Self { rows, cols, values }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.values[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [f64] {
        &mut self.values[row * self.cols..(row + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `self += scale * other`, shapes must agree.
    pub fn add_scaled(&mut self, other: &Matrix, scale: f64) -> Result<(), NumError> {
        if self.shape() != other.shape() {
            return Err(NumError::Shape {
                op: "add_scaled",
                expected: self.values.len(),
                actual: other.values.len(),
            });
        }
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += scale * b;
        }
        Ok(())
    }
}

pub(crate) fn check_finite(op: &'static str, x: &[f64]) -> Result<(), NumError> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(NumError::NonFinite { op })
    }
}

/// `M · x`.
pub fn matvec(m: &Matrix, x: &[f64]) -> Result<Vec<f64>, NumError> {
    if m.cols != x.len() {
        return Err(NumError::Shape {
            op: "matvec",
            expected: m.cols,
            actual: x.len(),
        });
    }
    check_finite("matvec", x)?;
    check_finite("matvec", &m.values)?;
    Ok(matvec_unchecked(m, x))
}

pub(crate) fn matvec_unchecked(m: &Matrix, x: &[f64]) -> Vec<f64> {
    (0..m.rows)
        .map(|r| m.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn dot(x: &[f64], y: &[f64]) -> Result<f64, NumError> {
    if x.len() != y.len() {
        return Err(NumError::Shape {
            op: "dot",
            expected: x.len(),
            actual: y.len(),
        });
    }
    check_finite("dot", x)?;
    check_finite("dot", y)?;
    Ok(x.iter().zip(y).map(|(a, b)| a * b).sum())
}

pub fn relu(x: &[f64]) -> Result<Vec<f64>, NumError> {
    check_finite("relu", x)?;
    Ok(x.iter().map(|&v| v.max(0.0)).collect())
}

pub fn leaky_relu(x: &[f64], slope: f64) -> Result<Vec<f64>, NumError> {
    check_finite("leaky_relu", x)?;
    Ok(x.iter().map(|&v| leaky(v, slope)).collect())
}

#[inline]
pub(crate) fn leaky(v: f64, slope: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        slope * v
    }
}

/// Numerically stable softmax (max-subtracted).
pub fn softmax(x: &[f64]) -> Result<Vec<f64>, NumError> {
    if x.is_empty() {
        return Err(NumError::Empty { op: "softmax" });
    }
    check_finite("softmax", x)?;
    Ok(softmax_unchecked(x))
}

pub(crate) fn softmax_unchecked(x: &[f64]) -> Vec<f64> {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = x.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}
