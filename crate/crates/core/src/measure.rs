//! Spectral measure models: homogeneous and quasi-homogeneous densities,
//! general tabulated densities, the Fourier-side kernel decomposition of μ̂,
//! and the δ-capacity / PW-sampling certificate.
//!
//! Conventions fixed here and used repository-wide:
//!
//! - Hilbert transform: Hf(x) = (1/π) p.v. ∫ f(s)/(s−x) ds.
//! - Fourier transform: (Ff)(ξ) = (1/√(2π)) ∫ e^{iξx} f(x) dx. Under this
//!   pairing, convolution with μ̂ for the density c1 + c2·sign(x) acts as
//!   ψ ↦ √(2π)·c1·ψ − i·√(2π)·c2·Hψ, which is the identity the Riemann–
//!   Hilbert and Toeplitz solvers share.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::quad::adaptive_simpson;
use crate::{Error, Result};

const SQRT_2PI: f64 = 2.5066282746310002;

/// Density evaluator for the general variant.
pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Integrable remainder kernel on the Fourier side.
pub type KernelFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A positive absolutely continuous measure ρ(x)dx on the line.
#[derive(Clone)]
pub enum SpectralMeasureModel {
    /// ρ(x) = c1 + c2·sign(x), c1 > |c2|.
    Homogeneous { c1: f64, c2: f64 },
    /// ρ(x) = ρ±·|x|^{1+2ν} on each half-line, ν ∈ (−1, 0).
    QuasiHomogeneous { nu: f64, rho_plus: f64, rho_minus: f64 },
    /// Arbitrary positive density with explicit tail constants; an optional
    /// integrable Fourier-side remainder kernel may be attached by the
    /// caller for use in the Toeplitz solver.
    GeneralDensity {
        rho: DensityFn,
        rho_at_plus_inf: f64,
        rho_at_minus_inf: f64,
        regular_kernel: Option<KernelFn>,
    },
}

impl fmt::Debug for SpectralMeasureModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Homogeneous { c1, c2 } => write!(f, "Homogeneous {{ c1: {c1}, c2: {c2} }}"),
            Self::QuasiHomogeneous { nu, rho_plus, rho_minus } => write!(
                f,
                "QuasiHomogeneous {{ nu: {nu}, rho_plus: {rho_plus}, rho_minus: {rho_minus} }}"
            ),
            Self::GeneralDensity { rho_at_plus_inf, rho_at_minus_inf, .. } => write!(
                f,
                "GeneralDensity {{ tails: ({rho_at_minus_inf}, {rho_at_plus_inf}) }}"
            ),
        }
    }
}

/// Classification returned by [`SpectralMeasureModel::classify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureClass {
    Homogeneous,
    QuasiHomogeneous { nu: f64 },
    General,
}

/// μ̂ decomposed as delta_coeff·δ + pv_coeff·(p.v. kernel) + integrable rest.
/// Convolution with μ̂ acts as ψ ↦ delta_coeff·ψ + pv_coeff·π·(Hψ)/i + κ∗ψ.
#[derive(Clone)]
pub struct FourierKernelDecomposition {
    pub delta_coeff: f64,
    pub pv_coeff: f64,
    pub regular_kernel: Option<KernelFn>,
}

impl FourierKernelDecomposition {
    /// Apply the decomposition to sampled values of ψ, given the finite
    /// Hilbert transform of ψ at the same points.
    pub fn apply(&self, psi: Complex64, hilbert_psi: Complex64) -> Complex64 {
        // pv_coeff·π·(Hψ)/i
        self.delta_coeff * psi
            + self.pv_coeff * std::f64::consts::PI * hilbert_psi * Complex64::new(0.0, -1.0)
    }
}

/// Report of the greedy δ-capacity scan.
#[derive(Debug, Clone, Serialize)]
pub struct CapacityReport {
    pub interval: (f64, f64),
    pub delta: f64,
    pub capacity: usize,
    /// Disjoint δ-massive intervals [a, b), each intersecting the query.
    pub witness_intervals: Vec<(f64, f64)>,
}

/// Outcome of the PW-sampling probe.
#[derive(Debug, Clone, Serialize)]
pub struct PwSamplingReport {
    pub sampling: bool,
    pub condition_i_ok: bool,
    pub condition_ii_ok: bool,
    /// (t, delta, L) certificate per requested t, when found.
    pub certificates: Vec<(f64, f64, f64)>,
    pub failing_probe: Option<String>,
}

/// JSON wire form of a measure (see README / CLI docs).
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MeasureJson {
    Homogeneous { c1: f64, c2: f64 },
    Quasi { nu: f64, rho_plus: f64, rho_minus: f64 },
    Table { x: Vec<f64>, rho: Vec<f64>, tail_plus: f64, tail_minus: f64 },
}

impl SpectralMeasureModel {
    pub fn homogeneous(c1: f64, c2: f64) -> Result<Self> {
        if !(c1 > c2.abs()) {
            return Err(Error::InvalidInput(format!(
                "homogeneous measure requires c1 > |c2|, got c1 = {c1}, c2 = {c2}"
            )));
        }
        Ok(Self::Homogeneous { c1, c2 })
    }

    pub fn quasi_homogeneous(nu: f64, rho_plus: f64, rho_minus: f64) -> Result<Self> {
        if !(-1.0 < nu && nu < 0.0) {
            return Err(Error::InvalidInput(format!("quasi-homogeneous order nu = {nu} outside (-1, 0)")));
        }
        if rho_plus <= 0.0 || rho_minus <= 0.0 {
            return Err(Error::InvalidInput("rho_plus and rho_minus must be positive".into()));
        }
        Ok(Self::QuasiHomogeneous { nu, rho_plus, rho_minus })
    }

    pub fn general<F>(rho: F, tail_plus: f64, tail_minus: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::GeneralDensity {
            rho: Arc::new(rho),
            rho_at_plus_inf: tail_plus,
            rho_at_minus_inf: tail_minus,
            regular_kernel: None,
        }
    }

    /// Parse the JSON wire form.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: MeasureJson = serde_json::from_str(s)?;
        match j {
            MeasureJson::Homogeneous { c1, c2 } => Self::homogeneous(c1, c2),
            MeasureJson::Quasi { nu, rho_plus, rho_minus } => {
                Self::quasi_homogeneous(nu, rho_plus, rho_minus)
            }
            MeasureJson::Table { x, rho, tail_plus, tail_minus } => {
                if x.len() != rho.len() || x.len() < 2 {
                    return Err(Error::InvalidInput("table: x and rho must have equal length >= 2".into()));
                }
                if x.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidInput("table: x must be strictly increasing".into()));
                }
                if rho.iter().any(|&r| r <= 0.0) || tail_plus <= 0.0 || tail_minus <= 0.0 {
                    return Err(Error::InvalidInput("table: density and tails must be positive".into()));
                }
                let (xg, rg) = (x, rho);
                let (tp, tm) = (tail_plus, tail_minus);
                Ok(Self::general(
                    move |s: f64| {
                        if s <= xg[0] {
                            if s < xg[0] { tm } else { rg[0] }
                        } else if s >= xg[xg.len() - 1] {
                            if s > xg[xg.len() - 1] { tp } else { rg[rg.len() - 1] }
                        } else {
                            let i = xg.partition_point(|&v| v <= s) - 1;
                            let w = (s - xg[i]) / (xg[i + 1] - xg[i]);
                            rg[i] * (1.0 - w) + rg[i + 1] * w
                        }
                    },
                    tail_plus,
                    tail_minus,
                ))
            }
        }
    }

    /// Density ρ(x) per variant.
    pub fn density_at(&self, x: f64) -> f64 {
        match self {
            Self::Homogeneous { c1, c2 } => c1 + c2 * x.signum(),
            Self::QuasiHomogeneous { nu, rho_plus, rho_minus } => {
                let p = 1.0 + 2.0 * nu;
                if x > 0.0 {
                    rho_plus * x.powf(p)
                } else if x < 0.0 {
                    rho_minus * (-x).powf(p)
                } else if p > 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Self::GeneralDensity { rho, .. } => rho(x),
        }
    }

    /// Density limits at ±∞, used for tail corrections.
    pub fn tail_densities(&self) -> Result<(f64, f64)> {
        match self {
            Self::Homogeneous { c1, c2 } => Ok((c1 + c2, c1 - c2)),
            Self::GeneralDensity { rho_at_plus_inf, rho_at_minus_inf, .. } => {
                Ok((*rho_at_plus_inf, *rho_at_minus_inf))
            }
            Self::QuasiHomogeneous { .. } => Err(Error::UnsupportedMeasure(
                "quasi-homogeneous density has no finite tail limit".into(),
            )),
        }
    }

    /// μ([a, b]) with closed forms for the analytic variants.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match self {
            Self::Homogeneous { c1, c2 } => c1 * (b - a) + c2 * (b.abs() - a.abs()),
            Self::QuasiHomogeneous { nu, rho_plus, rho_minus } => {
                let q = 2.0 + 2.0 * nu; // antiderivative exponent, > 0
                let prim = |x: f64| {
                    if x >= 0.0 {
                        rho_plus * x.powf(q) / q
                    } else {
                        -rho_minus * (-x).powf(q) / q
                    }
                };
                prim(b) - prim(a)
            }
            Self::GeneralDensity { rho, .. } => {
                let f = |x: f64| rho(x);
                if a < 0.0 && b > 0.0 {
                    // density may jump at 0
                    adaptive_simpson(f, a, 0.0, 1e-12, 40) + adaptive_simpson(f, 0.0, b, 1e-12, 40)
                } else {
                    adaptive_simpson(f, a, b, 1e-12, 40)
                }
            }
        }
    }

    /// Recover the homogeneity class from scaling probes.
    ///
    /// For the general variant, ρ(tx) = t^{1+2ν}·ρ(x) is tested on the fixed
    /// grid t ∈ {2, 3, 1/2}, x ∈ {±1, ±2} with relative tolerance 1e−9.
    pub fn classify(&self) -> MeasureClass {
        match self {
            Self::Homogeneous { .. } => MeasureClass::Homogeneous,
            Self::QuasiHomogeneous { nu, .. } => MeasureClass::QuasiHomogeneous { nu: *nu },
            Self::GeneralDensity { rho, .. } => {
                const T_PROBE: [f64; 3] = [2.0, 3.0, 0.5];
                const X_PROBE: [f64; 4] = [1.0, -1.0, 2.0, -2.0];
                const TOL: f64 = 1e-9;
                let mut power: Option<f64> = None;
                for &t in &T_PROBE {
                    for &x in &X_PROBE {
                        let (num, den) = (rho(t * x), rho(x));
                        if num <= 0.0 || den <= 0.0 {
                            return MeasureClass::General;
                        }
                        let p = (num / den).ln() / t.ln();
                        match power {
                            None => power = Some(p),
                            Some(p0) => {
                                if (p - p0).abs() > TOL * (1.0 + p0.abs()) {
                                    return MeasureClass::General;
                                }
                            }
                        }
                    }
                }
                let p = power.unwrap();
                if p.abs() <= TOL {
                    MeasureClass::Homogeneous
                } else {
                    MeasureClass::QuasiHomogeneous { nu: (p - 1.0) / 2.0 }
                }
            }
        }
    }

    /// Fourier-side decomposition of μ̂.
    pub fn fourier_kernel(&self) -> Result<FourierKernelDecomposition> {
        match self {
            Self::Homogeneous { c1, c2 } => Ok(FourierKernelDecomposition {
                delta_coeff: SQRT_2PI * c1,
                pv_coeff: (2.0 / std::f64::consts::PI).sqrt() * c2,
                regular_kernel: None,
            }),
            Self::GeneralDensity {
                rho_at_plus_inf,
                rho_at_minus_inf,
                regular_kernel,
                ..
            } => {
                let kernel = regular_kernel.clone().ok_or_else(|| {
                    Error::UnsupportedMeasure(
                        "general density requires a caller-supplied regular kernel for μ̂".into(),
                    )
                })?;
                // step asymptote: c1 + c2·sign with c1, c2 from the tails
                let c1 = 0.5 * (rho_at_plus_inf + rho_at_minus_inf);
                let c2 = 0.5 * (rho_at_plus_inf - rho_at_minus_inf);
                Ok(FourierKernelDecomposition {
                    delta_coeff: SQRT_2PI * c1,
                    pv_coeff: (2.0 / std::f64::consts::PI).sqrt() * c2,
                    regular_kernel: Some(kernel),
                })
            }
            Self::QuasiHomogeneous { .. } => Err(Error::UnsupportedMeasure(
                "μ̂ of a quasi-homogeneous measure is not locally integrable near 0; \
                 use the scaling-law route instead"
                    .into(),
            )),
        }
    }

    /// Greedy left-to-right δ-capacity scan over the window
    /// [left − W, right + W], W = max(δ, |I|). Witnesses are half-open
    /// [a, b), length ≥ δ and mass ≥ δ, pairwise disjoint, each meeting the
    /// closed query interval. The count is a lower bound on C_δ(I), exact
    /// for monotone densities on the scanned range.
    pub fn delta_capacity(&self, interval: (f64, f64), delta: f64) -> Result<CapacityReport> {
        let (lo, hi) = interval;
        if !(delta > 0.0) {
            return Err(Error::InvalidInput("delta must be positive".into()));
        }
        if !(hi > lo) {
            return Err(Error::InvalidInput("interval must be nondegenerate".into()));
        }
        let w = delta.max(hi - lo);
        let window_right = hi + w;
        let mut witnesses = Vec::new();
        let mut cursor = lo - delta;
        while cursor <= hi {
            match self.shortest_massive_end(cursor, delta, window_right) {
                Some(end) => {
                    // intersects the closed query interval?
                    if end >= lo && cursor <= hi {
                        witnesses.push((cursor, end));
                    }
                    cursor = end;
                }
                None => break,
            }
        }
        Ok(CapacityReport {
            interval,
            delta,
            capacity: witnesses.len(),
            witness_intervals: witnesses,
        })
    }

    /// Right endpoint of the shortest interval [start, r) with r − start ≥ δ
    /// and μ ≥ δ, or None if no such r exists within the window.
    fn shortest_massive_end(&self, start: f64, delta: f64, window_right: f64) -> Option<f64> {
        let min_end = start + delta;
        if min_end > window_right {
            return None;
        }
        if self.mass(start, min_end) >= delta {
            return Some(min_end);
        }
        if self.mass(start, window_right) < delta {
            return None;
        }
        // mass is monotone in the right endpoint: bisect
        let (mut a, mut b) = (min_end, window_right);
        for _ in 0..80 {
            let mid = 0.5 * (a + b);
            if self.mass(start, mid) >= delta {
                b = mid;
            } else {
                a = mid;
            }
            if b - a < 1e-12 * (1.0 + b.abs()) {
                break;
            }
        }
        Some(b)
    }

    /// Probe-scale test of the PW-sampling criterion: (i) bounded unit
    /// masses, (ii) existence of (L, δ) with C_δ(I) ≥ t|I| for probe
    /// intervals, per requested t. Far-field probes at L_max·e^{1/δ} use the
    /// analytic tail structure; the verdict is a certificate at probe
    /// resolution, not a proof.
    pub fn is_pw_sampling(&self, t_list: &[f64], l_max: f64) -> Result<PwSamplingReport> {
        if t_list.is_empty() || l_max <= 0.0 {
            return Err(Error::InvalidInput("t_list nonempty and L_max > 0 required".into()));
        }
        let deltas: Vec<f64> = (0..=5).map(|k| 0.5f64.powi(k)).collect();

        // condition (i): unit masses bounded by a fixed multiple of the
        // near-origin scale, probed out to the far field.
        let near_scale = self.mass(-2.0, -1.0).max(self.mass(1.0, 2.0)).max(1e-300);
        let bound = 16.0 * near_scale;
        let mut probe_xs: Vec<f64> = vec![1.0, 2.0, 4.0];
        let mut x = 8.0;
        while x <= l_max {
            probe_xs.push(x);
            x *= 2.0;
        }
        for &d in &deltas {
            probe_xs.push(l_max * (1.0 / d).exp());
        }
        let mut condition_i_ok = true;
        let mut failing_probe = None;
        for &px in &probe_xs {
            for &s in &[1.0, -1.0] {
                let m = self.mass(s * px - 0.5, s * px + 0.5);
                if m > bound {
                    condition_i_ok = false;
                    failing_probe = Some(format!(
                        "condition (i): μ(x−1/2, x+1/2) = {m:.4e} at x = {:.4e} exceeds bound {bound:.4e}",
                        s * px
                    ));
                    break;
                }
            }
            if !condition_i_ok {
                break;
            }
        }

        // condition (ii)
        let mut condition_ii_ok = true;
        let mut certificates = Vec::new();
        'outer: for &t in t_list {
            let mut found = None;
            let mut last_fail = String::new();
            for &delta in &deltas {
                let far = l_max * (1.0 / delta).exp();
                let mut big_l = 1.0;
                'l_loop: while big_l <= l_max {
                    for len in [big_l, (2.0 * big_l).min(l_max)] {
                        let anchors =
                            [-0.5 * len, l_max - len, -l_max, far, -far - len];
                        for &x0 in &anchors {
                            let cap = self.delta_capacity((x0, x0 + len), delta)?;
                            if (cap.capacity as f64) < t * len {
                                last_fail = format!(
                                    "condition (ii): C_δ(I) = {} < t·|I| = {:.3} for t = {t}, δ = {delta}, I = [{:.4e}, {:.4e}]",
                                    cap.capacity,
                                    t * len,
                                    x0,
                                    x0 + len
                                );
                                big_l *= 2.0;
                                continue 'l_loop;
                            }
                        }
                    }
                    found = Some((t, delta, big_l));
                    break;
                }
                if found.is_some() {
                    break;
                }
            }
            match found {
                Some(cert) => certificates.push(cert),
                None => {
                    condition_ii_ok = false;
                    if failing_probe.is_none() {
                        failing_probe = Some(last_fail);
                    }
                    break 'outer;
                }
            }
        }

        Ok(PwSamplingReport {
            sampling: condition_i_ok && condition_ii_ok,
            condition_i_ok,
            condition_ii_ok,
            certificates,
            failing_probe,
        })
    }
}
