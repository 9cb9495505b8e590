//! Collocation solver for the truncated Toeplitz equation ψ∗μ̂ = 1 on
//! (−t, t), with ψ extended by zero outside the interval. Independent of the
//! Riemann–Hilbert closed form; used as the cross-validation engine.
//!
//! Discretization: Chebyshev-distributed nodes (clustered at the endpoints,
//! where ψ oscillates) with Fejér quadrature weights; the finite Hilbert
//! transform acts on the piecewise-linear interpolant of ψ pinned to zero at
//! ±t, with the log-kernel integrated exactly on every segment.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::measure::SpectralMeasureModel;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct CollocationGrid {
    pub t: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CollocationGrid {
    /// Chebyshev (first-kind) nodes on (−t, t) with Fejér-1 weights;
    /// weights are positive and sum to 2t.
    pub fn new(t: f64, n: usize) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::InvalidInput(format!("t = {t} must be positive")));
        }
        if n < 16 {
            return Err(Error::InvalidInput(format!("N = {n} < 16")));
        }
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for j in 0..n {
            let theta = PI * (2.0 * (n - j) as f64 - 1.0) / (2.0 * n as f64);
            nodes.push(t * theta.cos());
            let mut w = 1.0;
            let mm = n / 2;
            for m in 1..=mm {
                w -= 2.0 * (2.0 * m as f64 * theta).cos() / (4.0 * (m * m) as f64 - 1.0);
            }
            weights.push(2.0 * t * w / n as f64);
        }
        Ok(Self { t, nodes, weights })
    }
}

/// Principal-value finite Hilbert transform (1/π)·p.v.∫_{−t}^{t} v(s)/(s−x)ds
/// at every node, for the piecewise-linear interpolant of `values` pinned to
/// zero at ±t. On the two segments adjacent to the singular node the
/// diverging logs cancel in the principal value, leaving
/// v_i·log(Δ_right/Δ_left) + v_{i+1} − v_{i−1}.
pub fn finite_hilbert_matrix(grid: &CollocationGrid) -> Vec<Vec<f64>> {
    let n = grid.nodes.len();
    let mut aug = Vec::with_capacity(n + 2);
    aug.push(-grid.t);
    aug.extend_from_slice(&grid.nodes);
    aug.push(grid.t);
    let mut mat = vec![vec![0.0; n]; n];
    for i in 0..n {
        let x = grid.nodes[i];
        let row = &mut mat[i];
        for k in 0..=n {
            let (a, b) = (aug[k], aug[k + 1]);
            if k == i || k == i + 1 {
                continue; // handled as the singular pair below
            }
            let l = ((b - x) / (a - x)).abs().ln();
            // interpolant = v_a·(b−s)/(b−a) + v_b·(s−a)/(b−a); augmented
            // endpoints carry value 0 and contribute nothing
            if k >= 1 {
                row[k - 1] += (b - x) / (b - a) * l - 1.0;
            }
            if k + 1 <= n {
                row[k] += (x - a) / (b - a) * l + 1.0;
            }
        }
        let dl = aug[i + 1] - aug[i];
        let dr = aug[i + 2] - aug[i + 1];
        row[i] += (dr / dl).ln();
        if i >= 1 {
            row[i - 1] += -1.0;
        }
        if i + 1 < n {
            row[i + 1] += 1.0;
        }
        for v in row.iter_mut() {
            *v /= PI;
        }
    }
    mat
}

pub fn finite_hilbert_apply(grid: &CollocationGrid, values: &[Complex64]) -> Vec<Complex64> {
    let mat = finite_hilbert_matrix(grid);
    mat.iter()
        .map(|row| row.iter().zip(values).map(|(&m, &v)| m * v).sum())
        .collect()
}

#[derive(Debug, Clone)]
pub struct PsiSolution {
    pub grid: CollocationGrid,
    pub values: Vec<Complex64>,
    /// (1/√(2π))·Σ wⱼψⱼ, real part.
    pub k0: f64,
    /// imaginary part of the same sum (roundoff-level for valid measures)
    pub k0_imag_residual: f64,
    /// max collocation-equation residual of the solved system
    pub residual: f64,
    /// crude condition estimate from the LU pivots (max/min |u_ii|)
    pub cond_estimate: f64,
}

/// Dense LU with partial pivoting; returns the solution and a pivot-ratio
/// condition estimate.
fn solve_dense(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Result<(Vec<Complex64>, f64)> {
    let n = b.len();
    let mut max_piv = 0.0f64;
    let mut min_piv = f64::INFINITY;
    for col in 0..n {
        let (pivot_row, pivot_mag) = (col..n)
            .map(|r| (r, a[r][col].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pivot_mag < 1e-300 {
            return Err(Error::SingularMatrix { cond: f64::INFINITY });
        }
        max_piv = max_piv.max(pivot_mag);
        min_piv = min_piv.min(pivot_mag);
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let inv = Complex64::new(1.0, 0.0) / a[col][col];
        for r in col + 1..n {
            let f = a[r][col] * inv;
            if f.norm() == 0.0 {
                continue;
            }
            for c in col..n {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
            let bc = b[col];
            b[r] -= f * bc;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    Ok((x, max_piv / min_piv))
}

/// Solve the collocated equation
/// delta·ψ(xᵢ) − i·pv_coeff·π·(Hψ)(xᵢ) + Σⱼ wⱼκ(xᵢ−xⱼ)ψⱼ = 1.
pub fn solve_truncated(m: &SpectralMeasureModel, t: f64, n: usize) -> Result<PsiSolution> {
    let dec = m.fourier_kernel()?;
    let grid = CollocationGrid::new(t, n)?;
    let hmat = finite_hilbert_matrix(&grid);
    let mut a = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let hilbert_factor = Complex64::new(0.0, -dec.pv_coeff * PI);
    for i in 0..n {
        for j in 0..n {
            a[i][j] = hilbert_factor * hmat[i][j];
            if let Some(kernel) = &dec.regular_kernel {
                a[i][j] += grid.weights[j] * kernel(grid.nodes[i] - grid.nodes[j]);
            }
        }
        a[i][i] += dec.delta_coeff;
    }
    let rhs = vec![Complex64::new(1.0, 0.0); n];
    let (values, cond) = solve_dense(a.clone(), rhs)?;
    let mut residual = 0.0f64;
    for i in 0..n {
        let lhs: Complex64 = a[i].iter().zip(&values).map(|(&m, &v)| m * v).sum();
        residual = residual.max((lhs - 1.0).norm());
    }
    let sum: Complex64 = grid.weights.iter().zip(&values).map(|(&w, &v)| w * v).sum();
    let k = sum / (2.0 * PI).sqrt();
    Ok(PsiSolution {
        grid,
        values,
        k0: k.re,
        k0_imag_residual: k.im,
        residual,
        cond_estimate: cond,
    })
}
