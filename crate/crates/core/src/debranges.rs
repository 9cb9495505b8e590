//! Reproducing kernels of the de Branges chain built from transfer-matrix
//! entries, sampled kernel traces t ↦ k_t(0), and the homogeneity scaling
//! laws k_t(z) = s(t)·k_1(tz).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::canon::{transfer_matrix, HamiltonianSpec};
use crate::{Error, Result};

/// K(λ, z) = (1/π)(A(z)C(λ) − C(z)A(λ))/(λ − z), with the diagonal handled
/// by a symmetric difference quotient at relative step 1e−5.
pub fn reproducing_kernel<FA, FC>(a: FA, c: FC, lambda: f64, z: f64) -> f64
where
    FA: Fn(f64) -> f64,
    FC: Fn(f64) -> f64,
{
    if (lambda - z).abs() > 1e-9 * (1.0 + z.abs()) {
        (a(z) * c(lambda) - c(z) * a(lambda)) / (PI * (lambda - z))
    } else {
        let h = 1e-5 * (1.0 + z.abs());
        let cp = (c(z + h) - c(z - h)) / (2.0 * h);
        let ap = (a(z + h) - a(z - h)) / (2.0 * h);
        (a(z) * cp - c(z) * ap) / PI
    }
}

/// Sampled t ↦ k_t(0) curve, optionally together with l_t(0) = (H^μ k_t)(0).
#[derive(Debug, Clone)]
pub struct KernelTrace {
    pub t_grid: Vec<f64>,
    pub k0: Vec<f64>,
    pub l0: Option<Vec<f64>>,
}

impl KernelTrace {
    pub fn new(t_grid: Vec<f64>, k0: Vec<f64>, l0: Option<Vec<f64>>) -> Result<Self> {
        if t_grid.len() != k0.len() || t_grid.is_empty() {
            return Err(Error::InvalidInput("trace arrays must be nonempty and equal length".into()));
        }
        if let Some(l) = &l0 {
            if l.len() != t_grid.len() {
                return Err(Error::InvalidInput("l0 length mismatch".into()));
            }
        }
        if t_grid[0] <= 0.0 || t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("t_grid must be positive and strictly increasing".into()));
        }
        if k0.iter().any(|&v| v <= 0.0) {
            return Err(Error::NonMonotoneTrace(t_grid[k0.iter().position(|&v| v <= 0.0).unwrap()]));
        }
        // chain inclusions are isometric, so point-evaluation norms cannot
        // shrink; allow roundoff-scale wiggle
        for i in 1..k0.len() {
            if k0[i] < k0[i - 1] * (1.0 - 1e-9) {
                return Err(Error::NonMonotoneTrace(t_grid[i]));
            }
        }
        Ok(Self { t_grid, k0, l0 })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,k0,l0\n");
        for i in 0..self.t_grid.len() {
            let l = match &self.l0 {
                Some(l) => format!("{:.16e}", l[i]),
                None => String::new(),
            };
            out.push_str(&format!("{:.16e},{:.16e},{}\n", self.t_grid[i], self.k0[i], l));
        }
        out
    }
}

/// k_t(0) on a t-grid by integrating the system and differentiating C in z.
///
/// K_t(0,0) = (1/π)(A(0)C'(0) − C(0)A'(0)) with A(0) = 1, C(0) = 0 at solver
/// level, i.e. k_t(0) = C'(0)/π. The z-step 1e−4 balances the O(h²)
/// truncation error against integration noise ~tol/h.
pub fn kernel_trace_direct(h: &HamiltonianSpec, t_grid: &[f64], tol: f64) -> Result<KernelTrace> {
    let hstep = 1e-4;
    let mut k0 = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mp = transfer_matrix(h, t, Complex64::new(hstep, 0.0), tol)?;
        let mm = transfer_matrix(h, t, Complex64::new(-hstep, 0.0), tol)?;
        let cp = (mp.c.re - mm.c.re) / (2.0 * hstep);
        k0.push(cp / PI);
    }
    KernelTrace::new(t_grid.to_vec(), k0, None)
}

/// Max relative defect of k_t(z) = s(t)·k_1(tz) over a probe grid, with
/// s(t) = t^{2+2ν}; `nu_order = None` means the homogeneous law s(t) = t
/// (ν = −1/2). `kernel(t, z)` evaluates k_t(z).
pub fn homogeneity_residual<K>(kernel: K, nu_order: Option<f64>) -> f64
where
    K: Fn(f64, f64) -> f64,
{
    let nu = nu_order.unwrap_or(-0.5);
    let mut worst = 0.0f64;
    for &t in &[0.5f64, 2.0, 7.0] {
        let s = t.powf(2.0 + 2.0 * nu);
        for &z in &[-2.0, -1.0, -0.3, 0.3, 1.0, 2.0] {
            let lhs = kernel(t, z);
            let rhs = s * kernel(1.0, t * z);
            let denom = lhs.abs().max(1e-12);
            worst = worst.max((lhs - rhs).abs() / denom);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::bessel_closed_form;
    use crate::specfun::{f_nu, gamma};

    fn free_a(t: f64) -> impl Fn(f64) -> f64 {
        move |z| (t * z).cos()
    }
    fn free_c(t: f64) -> impl Fn(f64) -> f64 {
        move |z| (t * z).sin()
    }

    #[test]
    fn free_kernel_at_lambda_zero() {
        let t = 1.3;
        for &z in &[0.4, 2.0, -1.7] {
            let k = reproducing_kernel(free_a(t), free_c(t), 0.0, z);
            assert!((k - (t * z).sin() / (PI * z)).abs() < 1e-12);
        }
        // diagonal limit at 0 is t/π
        let k00 = reproducing_kernel(free_a(t), free_c(t), 0.0, 0.0);
        assert!((k00 - t / PI).abs() < 1e-9);
    }

    #[test]
    fn kernel_symmetry() {
        let t = 0.9;
        for &(l, z) in &[(0.5, 1.2), (-2.0, 0.3), (1.0, -1.0)] {
            let k1 = reproducing_kernel(free_a(t), free_c(t), l, z);
            let k2 = reproducing_kernel(free_a(t), free_c(t), z, l);
            assert!((k1 - k2).abs() < 1e-13);
        }
    }

    // Cholesky of G + 1e-10·I succeeding certifies min eigenvalue >= -1e-10.
    fn assert_near_psd(g: &[Vec<f64>]) {
        let n = g.len();
        let mut l = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = g[i][j] + if i == j { 1e-10 } else { 0.0 };
                for k in 0..j {
                    s -= l[i][k] * l[j][k];
                }
                if i == j {
                    assert!(s >= 0.0, "pivot {i} negative: {s}");
                    l[i][i] = s.sqrt();
                } else {
                    l[i][j] = if l[j][j] > 0.0 { s / l[j][j] } else { 0.0 };
                }
            }
        }
    }

    #[test]
    fn gram_matrices_positive() {
        let nodes = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let t = 1.1;
        let free: Vec<Vec<f64>> = nodes
            .iter()
            .map(|&l| {
                nodes
                    .iter()
                    .map(|&z| reproducing_kernel(free_a(t), free_c(t), l, z))
                    .collect()
            })
            .collect();
        assert_near_psd(&free);

        let m = 0.5;
        let a = |z: f64| bessel_closed_form(m, t, z).unwrap().0;
        let c = |z: f64| bessel_closed_form(m, t, z).unwrap().1;
        let bessel: Vec<Vec<f64>> = nodes
            .iter()
            .map(|&l| nodes.iter().map(|&z| reproducing_kernel(&a, &c, l, z)).collect())
            .collect();
        assert_near_psd(&bessel);
    }

    #[test]
    fn trace_identity_is_t_over_pi() {
        let grid: Vec<f64> = (1..=8).map(|i| 0.25 * i as f64).collect();
        let tr = kernel_trace_direct(&HamiltonianSpec::Identity, &grid, 1e-12).unwrap();
        for (t, k) in tr.t_grid.iter().zip(&tr.k0) {
            assert!((k - t / PI).abs() < 1e-8 * (t / PI), "t={t}: {k}");
        }
    }

    #[test]
    fn trace_diagonal_power() {
        // k_t(0) = t^{2ν}/(2νπ), ν = (1+m)/2
        for &m in &[0.25, 0.75] {
            let nu = (1.0 + m) / 2.0;
            let grid = [0.5, 1.0, 1.5, 2.0];
            let tr =
                kernel_trace_direct(&HamiltonianSpec::DiagonalPower { m }, &grid, 1e-12).unwrap();
            for (t, k) in tr.t_grid.iter().zip(&tr.k0) {
                let want = t.powf(2.0 * nu) / (2.0 * nu * PI);
                assert!((k - want).abs() < 1e-6 * want, "m={m} t={t}: {k} vs {want}");
            }
        }
    }

    #[test]
    fn trace_monotone_for_isp_family() {
        let grid: Vec<f64> = (1..=10).map(|i| 0.3 * i as f64).collect();
        let h = HamiltonianSpec::HomogeneousIsp { c1: 0.55, c_const: 0.0, c2: 0.35 };
        let tr = kernel_trace_direct(&h, &grid, 1e-11).unwrap();
        for w in tr.k0.windows(2) {
            assert!(w[1] >= w[0] * (1.0 - 1e-9));
        }
    }

    #[test]
    fn trace_invariants_enforced() {
        assert!(KernelTrace::new(vec![1.0, 2.0], vec![1.0, 0.5], None).is_err());
        assert!(KernelTrace::new(vec![1.0, 2.0], vec![-1.0, 0.5], None).is_err());
        assert!(KernelTrace::new(vec![2.0, 1.0], vec![1.0, 2.0], None).is_err());
        let tr = KernelTrace::new(vec![1.0, 2.0], vec![1.0, 2.0], Some(vec![0.1, 0.2])).unwrap();
        let csv = tr.to_csv();
        assert!(csv.starts_with("t,k0,l0\n"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn scaling_law_free_system() {
        let kernel = |t: f64, z: f64| (t * z).sin() / (PI * z);
        assert!(homogeneity_residual(kernel, None) < 1e-12);
    }

    #[test]
    fn scaling_law_bessel() {
        for &m in &[0.25, 0.5, 0.75] {
            let nu = (1.0 + m) / 2.0;
            let g_nu = 2f64.powf(nu - 1.0) * gamma(nu).unwrap();
            // k_t(z) = g_ν t^{2ν} F_ν(zt)/π, quasi-homogeneous of order ν−1
            let kernel = move |t: f64, z: f64| g_nu * t.powf(2.0 * nu) * f_nu(nu, z * t).unwrap() / PI;
            assert!(homogeneity_residual(kernel, Some(nu - 1.0)) < 1e-9);
            assert!(homogeneity_residual(kernel, Some(nu - 0.5)) >= 0.1);
        }
    }
}
