//! Direct spectral problem: Hamiltonian models, adaptive transfer-matrix
//! integration of ΩẊ = zHX from M(0, z) = I, det-normalization, and the
//! Bessel closed forms for diagonal power Hamiltonians.

use num_complex::Complex64;
use serde::Deserialize;

use crate::specfun::{f_nu, gamma};
use crate::{Error, Result};

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum HamiltonianJson {
    Identity,
    DiagonalPower { m: f64 },
    HomogeneousIsp { c1: f64, cconst: f64, c2: f64 },
    Table { t: Vec<f64>, h11: Vec<f64>, h12: Vec<f64>, h22: Vec<f64> },
}

/// 2x2 symmetric positive-semidefinite Hamiltonian t ↦ H(t).
#[derive(Debug, Clone)]
pub enum HamiltonianSpec {
    /// H = I (free system).
    Identity,
    /// H = diag(t^m, t^{-m}), m ∈ (0, 1). Regular but singular at t = 0.
    DiagonalPower { m: f64 },
    /// h11 = C1, h12 = Cconst − C2·log t, h22 = (1 + h12²)/C1.
    /// det ≡ 1 by construction (the sign choice making the system
    /// det-normalized).
    HomogeneousIsp { c1: f64, c_const: f64, c2: f64 },
    /// Linear interpolation in t; constant extension outside the grid.
    Tabulated { t_grid: Vec<f64>, h11: Vec<f64>, h12: Vec<f64>, h22: Vec<f64> },
}

impl HamiltonianSpec {
    pub fn tabulated(t_grid: Vec<f64>, h11: Vec<f64>, h12: Vec<f64>, h22: Vec<f64>) -> Result<Self> {
        let n = t_grid.len();
        if n < 2 || h11.len() != n || h12.len() != n || h22.len() != n {
            return Err(Error::InvalidInput("tabulated Hamiltonian needs equal-length arrays, n >= 2".into()));
        }
        if t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("t_grid must be strictly increasing".into()));
        }
        for i in 0..n {
            let det = h11[i] * h22[i] - h12[i] * h12[i];
            if h11[i] < 0.0 || h22[i] < 0.0 || det < -1e-12 * (1.0 + h11[i] * h22[i]).abs() {
                return Err(Error::NotPositiveSemidefinite {
                    t: t_grid[i],
                    detail: format!("node {i}: h11={}, h22={}, det={det}", h11[i], h22[i]),
                });
            }
        }
        Ok(Self::Tabulated { t_grid, h11, h12, h22 })
    }

    /// Parse the JSON wire form.
    pub fn from_json_str(s: &str) -> Result<Self> {
        match serde_json::from_str(s)? {
            HamiltonianJson::Identity => Ok(Self::Identity),
            HamiltonianJson::DiagonalPower { m } => {
                if !(0.0 < m && m < 1.0) {
                    return Err(Error::InvalidInput(format!("m = {m} outside (0, 1)")));
                }
                Ok(Self::DiagonalPower { m })
            }
            HamiltonianJson::HomogeneousIsp { c1, cconst, c2 } => {
                if !(c1 > 0.0) {
                    return Err(Error::InvalidInput(format!("c1 = {c1} must be positive")));
                }
                Ok(Self::HomogeneousIsp { c1, c_const: cconst, c2 })
            }
            HamiltonianJson::Table { t, h11, h12, h22 } => Self::tabulated(t, h11, h12, h22),
        }
    }

    /// Entries (h11, h12, h22) at time t.
    pub fn entries(&self, t: f64) -> (f64, f64, f64) {
        match self {
            Self::Identity => (1.0, 0.0, 1.0),
            Self::DiagonalPower { m } => (t.powf(*m), 0.0, t.powf(-*m)),
            Self::HomogeneousIsp { c1, c_const, c2 } => {
                let h12 = c_const - c2 * t.ln();
                (*c1, h12, (1.0 + h12 * h12) / c1)
            }
            Self::Tabulated { t_grid, h11, h12, h22 } => {
                let n = t_grid.len();
                if t <= t_grid[0] {
                    (h11[0], h12[0], h22[0])
                } else if t >= t_grid[n - 1] {
                    (h11[n - 1], h12[n - 1], h22[n - 1])
                } else {
                    let i = t_grid.partition_point(|&v| v <= t) - 1;
                    let w = (t - t_grid[i]) / (t_grid[i + 1] - t_grid[i]);
                    (
                        h11[i] * (1.0 - w) + h11[i + 1] * w,
                        h12[i] * (1.0 - w) + h12[i + 1] * w,
                        h22[i] * (1.0 - w) + h22[i + 1] * w,
                    )
                }
            }
        }
    }

    fn check_psd(&self, t: f64) -> Result<()> {
        let (h11, h12, h22) = self.entries(t);
        let det = h11 * h22 - h12 * h12;
        let scale = 1.0 + h11.abs() * h22.abs() + h12 * h12;
        if h11 < -1e-12 * scale || h22 < -1e-12 * scale || det < -1e-9 * scale {
            return Err(Error::NotPositiveSemidefinite {
                t,
                detail: format!("h11={h11}, h12={h12}, h22={h22}, det={det}"),
            });
        }
        Ok(())
    }
}

/// Entries of the transfer matrix M(t, z) = [[A, B], [C, D]].
#[derive(Debug, Clone, Copy)]
pub struct TransferMatrixSample {
    pub t: f64,
    pub z: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl TransferMatrixSample {
    /// |det M − 1|, the conservation defect of the integration.
    pub fn det_err(&self) -> f64 {
        (self.a * self.d - self.b * self.c - Complex64::new(1.0, 0.0)).norm()
    }
}

type State = [Complex64; 4]; // [A, B, C, D]

fn rhs(h: &HamiltonianSpec, t: f64, z: Complex64, y: &State) -> State {
    let (h11, h12, h22) = h.entries(t);
    // Ṁ = −z·Ω·H·M
    let [a, b, c, d] = *y;
    [
        -z * (h12 * a + h22 * c),
        -z * (h12 * b + h22 * d),
        z * (h11 * a + h12 * c),
        z * (h11 * b + h12 * d),
    ]
}

// Dormand–Prince 5(4) tableau.
const DP_C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn norm(y: &State) -> f64 {
    y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// One adaptive RK5(4) sweep from (t0, y0) to t1.
fn integrate(
    h: &HamiltonianSpec,
    t0: f64,
    t1: f64,
    y0: State,
    z: Complex64,
    tol: f64,
) -> Result<State> {
    let mut t = t0;
    let mut y = y0;
    let mut dt = ((t1 - t0) / 16.0).min(0.1).max(1e-8);
    let min_dt = 1e-13 * (1.0 + t1.abs());
    let mut k = [[Complex64::new(0.0, 0.0); 4]; 7];
    while t < t1 {
        h.check_psd(t)?;
        if dt < min_dt {
            return Err(Error::StepUnderflow(t));
        }
        if t + dt > t1 {
            dt = t1 - t;
        }
        k[0] = rhs(h, t, z, &y);
        for s in 0..6 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s + 1) {
                let a = DP_A[s][j];
                if a != 0.0 {
                    for i in 0..4 {
                        ys[i] += dt * a * kj[i];
                    }
                }
            }
            k[s + 1] = rhs(h, t + DP_C[s] * dt, z, &ys);
        }
        let mut y5 = y;
        let mut err = [Complex64::new(0.0, 0.0); 4];
        for (j, kj) in k.iter().enumerate() {
            let (b5, b4) = (DP_B5[j], DP_B4[j]);
            for i in 0..4 {
                y5[i] += dt * b5 * kj[i];
                err[i] += dt * (b5 - b4) * kj[i];
            }
        }
        let scale = tol * (1.0 + norm(&y));
        let e = norm(&err);
        if e <= scale {
            t += dt;
            y = y5;
        }
        let factor = if e > 0.0 { 0.9 * (scale / e).powf(0.2) } else { 5.0 };
        dt *= factor.clamp(0.2, 5.0);
    }
    Ok(y)
}

/// Integration start point and seed. DiagonalPower is singular at t = 0
/// (h22 = t^{-m}); it is seeded at ε = 1e−6 with the two-term asymptotics of
/// the system near 0, with seed error O(ε^{2−m}|z|²).
fn initial_state(h: &HamiltonianSpec, z: Complex64) -> (f64, State) {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    match h {
        HamiltonianSpec::DiagonalPower { m } => {
            let eps: f64 = 1e-6;
            let c = z * eps.powf(m + 1.0) / (m + 1.0);
            let b = -z * eps.powf(1.0 - m) / (1.0 - m);
            (eps, [one, b, c, one])
        }
        HamiltonianSpec::HomogeneousIsp { .. } => (1e-9, [one, zero, zero, one]),
        _ => (0.0, [one, zero, zero, one]),
    }
}

/// Transfer matrix M(t_end, z) by adaptive integration from the identity.
pub fn transfer_matrix(
    h: &HamiltonianSpec,
    t_end: f64,
    z: Complex64,
    tol: f64,
) -> Result<TransferMatrixSample> {
    if !(t_end > 0.0) {
        return Err(Error::InvalidInput(format!("t_end = {t_end} must be positive")));
    }
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::InvalidInput(format!("tol = {tol} outside [1e-12, 1e-4]")));
    }
    if z.norm() == 0.0 {
        // z = 0 freezes the system exactly
        return Ok(TransferMatrixSample {
            t: t_end,
            z,
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        });
    }
    let (t0, y0) = initial_state(h, z);
    let y = integrate(h, t0, t_end, y0, z, tol)?;
    Ok(TransferMatrixSample { t: t_end, z, a: y[0], b: y[1], c: y[2], d: y[3] })
}

/// Continue an existing sample from its time to `t_end` (cocycle step).
pub fn propagate(
    h: &HamiltonianSpec,
    sample: &TransferMatrixSample,
    t_end: f64,
    tol: f64,
) -> Result<TransferMatrixSample> {
    let y = integrate(
        h,
        sample.t,
        t_end,
        [sample.a, sample.b, sample.c, sample.d],
        sample.z,
        tol,
    )?;
    Ok(TransferMatrixSample { t: t_end, z: sample.z, a: y[0], b: y[1], c: y[2], d: y[3] })
}

/// Map `transfer_matrix` over a (t, z) grid.
pub fn transfer_matrix_grid(
    h: &HamiltonianSpec,
    ts: &[f64],
    zs: &[Complex64],
    tol: f64,
) -> Result<Vec<TransferMatrixSample>> {
    let mut out = Vec::with_capacity(ts.len() * zs.len());
    for &t in ts {
        for &z in zs {
            out.push(transfer_matrix(h, t, z, tol)?);
        }
    }
    Ok(out)
}

/// Reparametrize time by s(t) = ∫₀ᵗ √(det H) du so that det H' ≡ 1.
/// The spectral measure is invariant under the change of time.
pub fn det_normalize(h: &HamiltonianSpec, t_max: f64) -> Result<HamiltonianSpec> {
    match h {
        HamiltonianSpec::Identity => return Ok(HamiltonianSpec::Identity),
        HamiltonianSpec::DiagonalPower { m } => {
            return Ok(HamiltonianSpec::DiagonalPower { m: *m }) // det t^m·t^{-m} = 1
        }
        _ => {}
    }
    let n = 1024usize;
    let dt = t_max / n as f64;
    let mut s = vec![0.0; n + 1];
    let mut sqrt_det = vec![0.0; n + 1];
    for i in 0..=n {
        let t = (i as f64 * dt).max(1e-12);
        let (h11, h12, h22) = h.entries(t);
        let det = h11 * h22 - h12 * h12;
        if det <= 1e-12 {
            return Err(Error::DegenerateDeterminant(t));
        }
        sqrt_det[i] = det.sqrt();
        if i > 0 {
            // trapezoid accumulation of s(t)
            s[i] = s[i - 1] + 0.5 * dt * (sqrt_det[i - 1] + sqrt_det[i]);
        }
    }
    let mut h11g = vec![0.0; n + 1];
    let mut h12g = vec![0.0; n + 1];
    let mut h22g = vec![0.0; n + 1];
    for i in 0..=n {
        let t = (i as f64 * dt).max(1e-12);
        let (h11, h12, h22) = h.entries(t);
        h11g[i] = h11 / sqrt_det[i];
        h12g[i] = h12 / sqrt_det[i];
        h22g[i] = h22 / sqrt_det[i];
    }
    HamiltonianSpec::tabulated(s, h11g, h12g, h22g)
}

/// Closed-form (A, C) entries for H = diag(t^m, t^{-m}):
/// A = g_ν F_{ν−1}(zt), C = g_ν t^{2ν} z F_ν(zt), ν = (1+m)/2,
/// g_ν = 2^{ν−1}Γ(ν).
pub fn bessel_closed_form(m: f64, t: f64, z: f64) -> Result<(f64, f64)> {
    if !(0.0 < m && m < 1.0) {
        return Err(Error::InvalidInput(format!("m = {m} outside (0, 1)")));
    }
    let nu = (1.0 + m) / 2.0;
    let g_nu = 2f64.powf(nu - 1.0) * gamma(nu)?;
    let a = g_nu * f_nu(nu - 1.0, z * t)?;
    let c = g_nu * t.powf(2.0 * nu) * z * f_nu(nu, z * t)?;
    Ok((a, c))
}
