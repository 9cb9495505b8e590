//! The acceptance suite: ten numbered criteria, each reporting named checks
//! with the measured value and its tolerance. Shared by the `validate` CLI
//! subcommand and the integration test.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::canon::{bessel_closed_form, transfer_matrix, HamiltonianSpec};
use crate::debranges::homogeneity_residual;
use crate::isp::{
    b_integral, generalized_hilbert_at_zero, homogeneous_closed_form, linear_fit, recover_h11,
    recover_h11_from_k,
};
use crate::measure::SpectralMeasureModel;
use crate::rh::{
    h11_from_rh, h11_paper_display, integral_inv_x, k0_homogeneous, solve_constant_rh, RHProblem,
};
use crate::specfun::{f_nu, gamma};
use crate::toeplitz::solve_truncated;
use crate::Result;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub index: usize,
    pub name: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    /// labeled constants surfaced for audit (repo vs displayed normalization)
    pub notes: Vec<String>,
}

struct Builder {
    index: usize,
    name: &'static str,
    strict: Option<f64>,
    checks: Vec<Check>,
    notes: Vec<String>,
}

impl Builder {
    fn new(index: usize, name: &'static str, strict: Option<f64>) -> Self {
        Self { index, name, strict, checks: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, value: f64, tol: f64) {
        let tol = self.strict.unwrap_or(tol);
        self.checks.push(Check {
            name: name.into(),
            value,
            tolerance: tol,
            pass: value.abs() <= tol,
        });
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self) -> CriterionResult {
        let pass = self.checks.iter().all(|c| c.pass);
        CriterionResult {
            index: self.index,
            name: self.name.to_string(),
            pass,
            checks: self.checks,
            notes: self.notes,
        }
    }
}

const MS: [f64; 3] = [0.25, 0.5, 0.75];
const ZS: [f64; 6] = [-4.0, -1.0, -0.5, 0.5, 1.0, 4.0];
const TS: [f64; 3] = [0.5, 1.0, 2.0];

fn criterion_1(strict: Option<f64>) -> Result<CriterionResult> {
    let mut b = Builder::new(1, "Bessel direct solve vs closed forms", strict);
    let mut worst = 0.0f64;
    let mut at = String::new();
    for m in MS {
        let h = HamiltonianSpec::DiagonalPower { m };
        for z in ZS {
            for t in TS {
                let (a_cf, c_cf) = bessel_closed_form(m, t, z)?;
                let s = transfer_matrix(&h, t, Complex64::new(z, 0.0), 1e-10)?;
                let ra = (s.a.re - a_cf).abs() / a_cf.abs().max(1e-12);
                let rc = (s.c.re - c_cf).abs() / c_cf.abs().max(1e-12);
                if ra.max(rc) > worst {
                    worst = ra.max(rc);
                    at = format!("m={m} z={z} t={t}");
                }
            }
        }
    }
    b.check(format!("max relative error of (A,C) over the sweep (worst at {at})"), worst, 1e-6);
    Ok(b.finish())
}

fn criterion_2(strict: Option<f64>) -> Result<CriterionResult> {
    let mut b = Builder::new(2, "transfer-matrix conservation", strict);
    let mut worst = 0.0f64;
    for m in MS {
        let h = HamiltonianSpec::DiagonalPower { m };
        for z in ZS {
            for t in TS {
                worst = worst.max(transfer_matrix(&h, t, Complex64::new(z, 0.0), 1e-10)?.det_err());
            }
        }
    }
    b.check("max |det M − 1| over the sweep", worst, 1e-8);
    let mut id_defect = 0.0f64;
    for t in TS {
        let s = transfer_matrix(&HamiltonianSpec::DiagonalPower { m: 0.5 }, t, Complex64::new(0.0, 0.0), 1e-10)?;
        id_defect = id_defect
            .max((s.a - 1.0).norm())
            .max(s.b.norm())
            .max(s.c.norm())
            .max((s.d - 1.0).norm());
    }
    b.check("M(t, 0) = I at solver level", id_defect, 0.0);
    Ok(b.finish())
}

fn criterion_3(strict: Option<f64>) -> Result<CriterionResult> {
    let mut b = Builder::new(3, "RH Beta identity", strict);
    let mut worst = 0.0f64;
    for d in [-2.0f64, -1.0, -0.1, 0.1, 1.0, 2.0] {
        for t in TS {
            let sol = solve_constant_rh(RHProblem::new(t, d.exp(), 1.0)?)?;
            let closed = integral_inv_x(t, d);
            worst = worst.max((sol.integral_psi.re - closed).abs() / closed.abs());
        }
    }
    b.check("max relative error of ∫1/X⁺ vs 2tD/(e^D−1)", worst, 1e-8);
    Ok(b.finish())
}

fn criterion_4(strict: Option<f64>) -> Result<CriterionResult> {
    let mut b = Builder::new(4, "Toeplitz–RH agreement on k_t(0)", strict);
    for (c1, c2) in [(1.0, 0.0), (2.0, 1.0), (2.0, -1.0), (1.0, 0.5)] {
        let m = SpectralMeasureModel::homogeneous(c1, c2)?;
        let mut worst = 0.0f64;
        for t in TS {
            let sol = solve_truncated(&m, t, 512)?;
            let want = k0_homogeneous(c1, c2, t)?;
            worst = worst.max((sol.k0 - want).abs() / want.abs());
        }
        b.check(format!("c1={c1} c2={c2}: max relative k0 error, N=512"), worst, 1e-4);
    }
    Ok(b.finish())
}

fn criterion_5(strict: Option<f64>) -> Result<CriterionResult> {
    let mut b = Builder::new(5, "normalization oracle for h11", strict);
    let lebesgue = SpectralMeasureModel::homogeneous(1.0, 0.0)?;
    let h = recover_h11(&lebesgue, &[0.5, 1.0, 2.0], 128)?;
    let worst = h.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    b.check("Lebesgue: |h11 − 1|", worst, 1e-8);

    let m = SpectralMeasureModel::homogeneous(2.0, 1.0)?;
    let h = recover_h11(&m, &[0.75, 1.5], 512)?;
    let want = 0.5 * 3f64.ln();
    let worst = h.iter().map(|v| (v - want).abs() / want).fold(0.0, f64::max);
    b.check("c1=2, c2=1: relative error vs (1/2)log 3", worst, 1e-3);
    b.note(format!(
        "DISCREPANCY: repo h11 = {:.7} (= (1/(2c2))log((c1+c2)/(c1−c2))); \
         paper-display value = {:.7} is √(2π) times larger",
        h11_from_rh(2.0, 1.0),
        h11_paper_display(2.0, 1.0)
    ));
    Ok(b.finish())
}

fn criterion_6(strict: Option<f64>) -> Result<CriterionResult> {
    let mut b = Builder::new(6, "kernel scaling laws", strict);
    let free = |t: f64, z: f64| (t * z).sin() / (PI * z);
    b.check("free system: residual of k_t(z) = t·k_1(tz)", homogeneity_residual(free, None), 1e-9);
    let mut worst = 0.0f64;
    let mut worst_wrong = f64::INFINITY;
    for m in MS {
        let nu = (1.0 + m) / 2.0;
        let g_nu = 2f64.powf(nu - 1.0) * gamma(nu)?;
        let kernel = move |t: f64, z: f64| g_nu * t.powf(2.0 * nu) * f_nu(nu, z * t).unwrap() / PI;
        worst = worst.max(homogeneity_residual(kernel, Some(nu - 1.0)));
        worst_wrong = worst_wrong.min(homogeneity_residual(kernel, Some(nu - 0.5)));
    }
    b.check("Bessel kernels: residual at order ν−1", worst, 1e-9);
    // control: wrong order must NOT satisfy the law (value = margin defect)
    b.check("wrong-order control residual ≥ 0.1 (reported: 0.1 − residual, clamped)", (0.1 - worst_wrong).max(0.0), 0.0);
    Ok(b.finish())
}

fn criterion_7(strict: Option<f64>) -> Result<CriterionResult> {
    let mut b = Builder::new(7, "Bessel inverse check h11 = t^m", strict);
    let grid: Vec<f64> = (1..=8).map(|i| 0.25 * i as f64).collect();
    for m in MS {
        let nu = (1.0 + m) / 2.0;
        // analytic trace k_t(0) = t^{2ν}/(2νπ)
        let k = |t: f64| Ok(t.powf(2.0 * nu) / (2.0 * nu * PI));
        let h = recover_h11_from_k(k, &grid)?;
        let worst = grid
            .iter()
            .zip(&h)
            .map(|(t, v)| (v - t.powf(m)).abs() / t.powf(m))
            .fold(0.0, f64::max);
        b.check(format!("m={m}: max relative error on t ∈ [0.25, 2]"), worst, 1e-5);
    }
    Ok(b.finish())
}

fn criterion_8(strict: Option<f64>) -> Result<CriterionResult> {
    let mut b = Builder::new(8, "off-diagonal structure", strict);
    let m = SpectralMeasureModel::homogeneous(2.0, 1.0)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for t in [0.5, 1.0, 2.0, 4.0] {
        let sol = solve_truncated(&m, t, 512)?;
        let l = generalized_hilbert_at_zero(&m, &sol, t)?;
        xs.push(t.ln());
        ys.push(l / t);
    }
    let (_, slope, r2) = linear_fit(&xs, &ys);
    b.check("c1=2, c2=1: 1 − R² of l_t(0)/t vs log t", 1.0 - r2, 1e-4);
    b.note(format!("log-t regression slope of l_t(0)/t: {slope:.7}"));

    let mut worst_b = 0.0f64;
    for t in [0.5, 2.0] {
        let got = b_integral(&m, t)?;
        let want = -(m.density_at(1.0) - m.density_at(-1.0)) * t.ln();
        worst_b = worst_b.max((got - want).abs());
    }
    b.check("B-integral identity B = −[ρ(1)−ρ(−1)]log t", worst_b, 1e-6);

    let even = SpectralMeasureModel::homogeneous(1.7, 0.0)?;
    let mut worst_even = 0.0f64;
    for t in [0.5, 2.0] {
        let sol = solve_truncated(&even, t, 256)?;
        worst_even = worst_even.max(generalized_hilbert_at_zero(&even, &sol, t)?.abs());
    }
    b.check("even measure: |l_t(0)|", worst_even, 1e-8);
    Ok(b.finish())
}

fn criterion_9(strict: Option<f64>) -> Result<CriterionResult> {
    let mut b = Builder::new(9, "assembled Hamiltonian", strict);
    let t_grid = [0.5, 1.0, 2.0, 4.0];
    let (rec, rep) = homogeneous_closed_form(2.0, 1.0, 0.0, &t_grid, 512)?;
    b.check("det(recovered H) − 1 (algebraic)", rec.det_defect(), 1e-12);
    b.note(format!(
        "constants: C1_repo={:.7} (paper display {:.7}); C2_repo={:.7} (paper display {:.7})",
        rep.c1_repo, rep.c1_paper_display, rep.c2_repo, rep.c2_paper_display
    ));

    let m = SpectralMeasureModel::homogeneous(2.0, 1.0)?;
    let h = recover_h11(&m, &[0.75, 1.5], 512)?;
    let spread = (h[0] - h[1]).abs() / h[0].abs();
    b.check("h11 relative spread over the grid", spread, 1e-4);

    let (rec2, _) = homogeneous_closed_form(2.0, 1.0, 0.7, &t_grid, 512)?;
    let family_defect = (0..t_grid.len())
        .map(|i| {
            ((rec2.h12[i] - rec.h12[i]) - 0.7)
                .abs()
                .max((rec2.h11[i] - rec.h11[i]).abs())
        })
        .fold(0.0, f64::max);
    b.check("one-parameter family: Cfree shifts h12 only (exact)", family_defect, 1e-12);
    Ok(b.finish())
}

fn criterion_10(strict: Option<f64>) -> Result<CriterionResult> {
    let mut b = Builder::new(10, "PW-sampling classifier", strict);
    let t_list = [0.5, 1.0];
    let l_max = 32.0;
    for (c1, c2) in [(1.0, 0.0), (2.0, 1.0)] {
        let m = SpectralMeasureModel::homogeneous(c1, c2)?;
        let verdict = m.is_pw_sampling(&t_list, l_max)?.sampling;
        b.check(
            format!("Homogeneous c1={c1} c2={c2} classified PW-sampling"),
            if verdict { 0.0 } else { 1.0 },
            0.5,
        );
    }
    for nu in [-0.25, -0.75] {
        let m = SpectralMeasureModel::quasi_homogeneous(nu, 1.0, 1.0)?;
        let verdict = m.is_pw_sampling(&t_list, l_max)?.sampling;
        b.check(
            format!("QuasiHomogeneous ν={nu} classified not PW-sampling"),
            if verdict { 1.0 } else { 0.0 },
            0.5,
        );
    }
    Ok(b.finish())
}

/// Run the whole suite. `strict` overrides every tolerance (used by the CLI
/// `--strict` flag to force failure demonstrations).
pub fn run_all(strict: Option<f64>) -> Result<Vec<CriterionResult>> {
    Ok(vec![
        criterion_1(strict)?,
        criterion_2(strict)?,
        criterion_3(strict)?,
        criterion_4(strict)?,
        criterion_5(strict)?,
        criterion_6(strict)?,
        criterion_7(strict)?,
        criterion_8(strict)?,
        criterion_9(strict)?,
        criterion_10(strict)?,
    ])
}
