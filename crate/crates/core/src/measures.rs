//! Probability measures exposed through their characteristic functions.
//!
//! The scheme never needs a density: everything goes through
//! `F_μ(t) = ∫ e^{i t·y} μ(dy)`. Densities are provided for the uniform and
//! normal cases only, for the quadrature oracles.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::cosine_space::{decay_weight, for_each_nonnegative, SmoothnessParams, Truncation};
use crate::error::{check_dim, invalid, Error, Result};
use crate::lattice::{fold_digest, Domain};
use crate::linalg::{GaussianDensity, Matrix};

/// Anything that can evaluate a characteristic function on `R^s`.
pub trait CharacteristicFunction {
    fn dim(&self) -> usize;
    fn char_fn(&self, t: &[f64]) -> Complex64;
}

/// One of the supported measures.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    /// Uniform law on a box.
    UniformOnBox(Domain),
    /// `N(mean, cov)`.
    Normal { mean: Vec<f64>, cov: Matrix },
    /// Asymmetric Laplace with `F(t) = 1 / (1 + ½ tᵀΣt − i μ̄·t)`.
    AsymmetricLaplace { mu_bar: Vec<f64>, sigma: Matrix },
}

fn check_cov(location: &[f64], m: &Matrix, what: &str) -> Result<()> {
    check_dim(location.len(), m.dim())?;
    if location.iter().chain(m.as_slice()).any(|v| !v.is_finite()) {
        return Err(invalid(format!("{what} has non-finite entries")));
    }
    if !m.is_symmetric(1e-12) {
        return Err(invalid(format!("{what} is not symmetric")));
    }
    if !m.is_positive_semidefinite() {
        return Err(invalid(format!("{what} is not positive semidefinite")));
    }
    Ok(())
}

impl MeasureSpec {
    pub fn uniform(domain: Domain) -> Self {
        MeasureSpec::UniformOnBox(domain)
    }

    pub fn normal(mean: Vec<f64>, cov: Matrix) -> Result<Self> {
        check_cov(&mean, &cov, "covariance")?;
        Ok(MeasureSpec::Normal { mean, cov })
    }

    pub fn asymmetric_laplace(mu_bar: Vec<f64>, sigma: Matrix) -> Result<Self> {
        check_cov(&mu_bar, &sigma, "sigma")?;
        Ok(MeasureSpec::AsymmetricLaplace { mu_bar, sigma })
    }

    pub fn dim(&self) -> usize {
        match self {
            MeasureSpec::UniformOnBox(d) => d.dim(),
            MeasureSpec::Normal { mean, .. } => mean.len(),
            MeasureSpec::AsymmetricLaplace { mu_bar, .. } => mu_bar.len(),
        }
    }

    /// Mean vector of the law.
    pub fn mean(&self) -> Vec<f64> {
        match self {
            MeasureSpec::UniformOnBox(d) => d.lower().iter().zip(d.upper()).map(|(a, b)| 0.5 * (a + b)).collect(),
            MeasureSpec::Normal { mean, .. } => mean.clone(),
            MeasureSpec::AsymmetricLaplace { mu_bar, .. } => mu_bar.clone(),
        }
    }

    /// Covariance matrix of the law. For the asymmetric Laplace it is `Σ + μ̄μ̄ᵀ`.
    pub fn covariance(&self) -> Matrix {
        match self {
            MeasureSpec::UniformOnBox(d) => {
                Matrix::diagonal(&(0..d.dim()).map(|j| d.width(j) * d.width(j) / 12.0).collect::<Vec<_>>())
            }
            MeasureSpec::Normal { cov, .. } => cov.clone(),
            MeasureSpec::AsymmetricLaplace { mu_bar, sigma } => {
                let n = mu_bar.len();
                let rows: Vec<Vec<f64>> =
                    (0..n).map(|i| (0..n).map(|j| sigma.get(i, j) + mu_bar[i] * mu_bar[j]).collect()).collect();
                Matrix::from_rows(&rows).expect("square by construction")
            }
        }
    }

    pub fn fingerprint(&self) -> u64 {
        let mut h = Sha256::new();
        let put = |h: &mut Sha256, v: &[f64]| {
            h.update((v.len() as u64).to_le_bytes());
            for x in v {
                h.update(x.to_bits().to_le_bytes());
            }
        };
        match self {
            MeasureSpec::UniformOnBox(d) => {
                h.update(b"uniform");
                put(&mut h, d.lower());
                put(&mut h, d.upper());
            }
            MeasureSpec::Normal { mean, cov } => {
                h.update(b"normal");
                put(&mut h, mean);
                put(&mut h, cov.as_slice());
            }
            MeasureSpec::AsymmetricLaplace { mu_bar, sigma } => {
                h.update(b"laplace");
                put(&mut h, mu_bar);
                put(&mut h, sigma.as_slice());
            }
        }
        fold_digest(&h.finalize())
    }
}

/// `(e^{iθb} − e^{iθa}) / (iθ(b − a))`, the uniform CF of one coordinate.
fn uniform_factor(t: f64, a: f64, b: f64) -> Complex64 {
    let half = 0.5 * t * (b - a);
    let sinc = if half.abs() < 1e-8 { 1.0 - half * half / 6.0 } else { libm::sin(half) / half };
    Complex64::from_polar(sinc, 0.5 * t * (a + b))
}

impl CharacteristicFunction for MeasureSpec {
    fn dim(&self) -> usize {
        MeasureSpec::dim(self)
    }

    fn char_fn(&self, t: &[f64]) -> Complex64 {
        if t.iter().all(|&v| v == 0.0) {
            return Complex64::new(1.0, 0.0);
        }
        match self {
            MeasureSpec::UniformOnBox(d) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for (j, &tj) in t.iter().enumerate() {
                    if tj != 0.0 {
                        acc *= uniform_factor(tj, d.lower()[j], d.upper()[j]);
                    }
                }
                acc
            }
            MeasureSpec::Normal { mean, cov } => {
                let drift: f64 = t.iter().zip(mean).map(|(a, b)| a * b).sum();
                Complex64::from_polar(libm::exp(-0.5 * cov.quad_form(t)), drift)
            }
            MeasureSpec::AsymmetricLaplace { mu_bar, sigma } => {
                let drift: f64 = t.iter().zip(mu_bar).map(|(a, b)| a * b).sum();
                Complex64::new(1.0 + 0.5 * sigma.quad_form(t), -drift).inv()
            }
        }
    }
}

/// `F_μ(t)`.
pub fn characteristic_function(m: &MeasureSpec, t: &[f64]) -> Result<Complex64> {
    check_dim(m.dim(), t.len())?;
    Ok(m.char_fn(t))
}

/// Density at `y`; unsupported for the Laplace law.
pub fn density(m: &MeasureSpec, y: &[f64]) -> Result<f64> {
    check_dim(m.dim(), y.len())?;
    match m {
        MeasureSpec::UniformOnBox(d) => Ok(if d.contains(y) { 1.0 / d.volume() } else { 0.0 }),
        MeasureSpec::Normal { mean, cov } => Ok(GaussianDensity::new(cov)?.eval(mean, y)),
        MeasureSpec::AsymmetricLaplace { .. } => Err(Error::Unsupported("the Laplace law is used through its CF only".into())),
    }
}

/// A density evaluator with the Cholesky factor computed once.
pub(crate) enum DensityEval<'a> {
    Uniform(&'a Domain, f64),
    Normal(&'a [f64], GaussianDensity),
}

impl<'a> DensityEval<'a> {
    pub(crate) fn new(m: &'a MeasureSpec) -> Result<Self> {
        match m {
            MeasureSpec::UniformOnBox(d) => Ok(DensityEval::Uniform(d, 1.0 / d.volume())),
            MeasureSpec::Normal { mean, cov } => Ok(DensityEval::Normal(mean, GaussianDensity::new(cov)?)),
            MeasureSpec::AsymmetricLaplace { .. } => {
                Err(Error::Unsupported("the Laplace law is used through its CF only".into()))
            }
        }
    }

    pub(crate) fn eval(&self, y: &[f64]) -> f64 {
        match self {
            DensityEval::Uniform(d, v) => {
                if d.contains(y) {
                    *v
                } else {
                    0.0
                }
            }
            DensityEval::Normal(mean, g) => g.eval(mean, y),
        }
    }
}

/// `∫ Π_j cos(πk_j(y_j−a_j)/(b_j−a_j)) μ(dy)` from the characteristic function.
///
/// Averages `Re{e^{−iπ(σ∘k)·â} F_μ(π(σ∘k)/(b−a))}` over sign patterns `σ`,
/// with `σ_j` fixed to `+` wherever `k_j = 0`; `2^{|k|₀}` CF calls.
pub fn cos_transform<M: CharacteristicFunction + ?Sized>(m: &M, k: &[u64], domain: &Domain) -> Result<f64> {
    let s = domain.dim();
    check_dim(s, k.len())?;
    check_dim(s, m.dim())?;
    Ok(cos_transform_unchecked(m, k, domain))
}

pub(crate) fn cos_transform_unchecked<M: CharacteristicFunction + ?Sized>(m: &M, k: &[u64], domain: &Domain) -> f64 {
    let s = k.len();
    let nz: Vec<usize> = (0..s).filter(|&j| k[j] != 0).collect();
    let base: Vec<f64> = (0..s).map(|j| PI * k[j] as f64 / domain.width(j)).collect();
    let mut t = vec![0.0; s];
    let mut acc = Complex64::new(0.0, 0.0);
    let mut scale = 0.0f64;
    for pattern in 0..(1u64 << nz.len()) {
        let mut phase = 0.0;
        for (bit, &j) in nz.iter().enumerate() {
            let sign = if pattern >> bit & 1 == 1 { -1.0 } else { 1.0 };
            t[j] = sign * base[j];
            phase -= t[j] * domain.lower()[j];
        }
        let term = Complex64::from_polar(1.0, phase) * m.char_fn(&t);
        scale = scale.max(term.norm());
        acc += term;
    }
    let n = (1u64 << nz.len()) as f64;
    debug_assert!(acc.im.abs() <= 1e-12 * n * scale.max(1.0), "cosine transform has imaginary part {}", acc.im / n);
    acc.re / n
}

/// Upper bound on `μ(R^s \ D)` for a normal law, by a union bound over the
/// coordinate marginals.
pub fn normal_outside_mass(mean: &[f64], cov: &Matrix, domain: &Domain) -> Result<f64> {
    check_dim(domain.dim(), mean.len())?;
    check_dim(domain.dim(), cov.dim())?;
    let mut total = 0.0;
    for j in 0..domain.dim() {
        let sd = libm::sqrt(cov.get(j, j));
        if sd == 0.0 {
            if !(domain.lower()[j] <= mean[j] && mean[j] <= domain.upper()[j]) {
                total += 1.0;
            }
            continue;
        }
        let z = |x: f64| x / (sd * core::f64::consts::SQRT_2);
        total += 0.5 * libm::erfc(z(domain.upper()[j] - mean[j])) + 0.5 * libm::erfc(z(mean[j] - domain.lower()[j]));
    }
    Ok(total.min(1.0))
}

/// One scanned frequency of a decay check.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayEntry {
    pub k: Vec<u64>,
    pub transform: f64,
    /// `transform²`.
    pub squared: f64,
    /// `Π_j r_{β,ρ_j}(k_j)`.
    pub envelope: f64,
}

/// Result of comparing `|cos_transform(k)|²` with the decay envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub entries: Vec<DecayEntry>,
    /// Whether every nonzero scanned `k` satisfies `transform² ≤ envelope`.
    pub satisfied: bool,
    /// Decay exponent from a log-log fit of the nonincreasing envelope of
    /// `max_{|k|₁=m} |transform(k)|²` over `m ∈ [K/4, K]`; `None` when the
    /// transform vanishes there.
    pub fitted_beta: Option<f64>,
    /// Largest `β` that holds on the scan with the given `ρ`.
    pub max_beta: f64,
    /// Smallest common `ρ` that holds on the scan with the given `β`.
    pub min_rho: f64,
}

impl DecayReport {
    pub fn entry(&self, k: &[u64]) -> Option<&DecayEntry> {
        self.entries.iter().find(|e| e.k == k)
    }
}

/// Scans `|k|₁ ≤ k_scan` and checks the decay hypothesis
/// `cos_transform(k)² ≤ Π_j r_{β,ρ_j}(k_j)`. Diagnostic only.
pub fn decay_bound_check(m: &MeasureSpec, domain: &Domain, params: &SmoothnessParams, k_scan: u64) -> Result<DecayReport> {
    let s = domain.dim();
    check_dim(s, m.dim())?;
    check_dim(s, params.dim())?;
    if k_scan == 0 {
        return Err(invalid("scan radius must be at least 1"));
    }
    let mut entries = Vec::new();
    for_each_nonnegative(s, k_scan, Truncation::L1, |k| {
        let transform = cos_transform_unchecked(m, k, domain);
        entries.push(DecayEntry { k: k.to_vec(), transform, squared: transform * transform, envelope: decay_weight(params, k) });
    });
    let tiny = 1e-30;
    let mut satisfied = true;
    let mut max_beta = f64::INFINITY;
    let mut min_rho = 0.0f64;
    let mut level_max = vec![0.0f64; k_scan as usize + 1];
    for e in entries.iter().filter(|e| e.k.iter().any(|&v| v != 0)) {
        // the uniform transform is zero up to rounding
        let sq = if e.squared < tiny { 0.0 } else { e.squared };
        if sq > e.envelope {
            satisfied = false;
        }
        let l1: u64 = e.k.iter().sum();
        level_max[l1 as usize] = level_max[l1 as usize].max(sq);
        if sq == 0.0 {
            continue;
        }
        let log_prod: f64 = e.k.iter().filter(|&&v| v > 1).map(|&v| libm::log(v as f64)).sum();
        let l0 = e.k.iter().filter(|&&v| v != 0).count() as f64;
        let log_rho: f64 = e.k.iter().zip(&params.rho).filter(|(&v, _)| v != 0).map(|(_, r)| libm::log(*r)).sum();
        if log_prod > 0.0 {
            max_beta = max_beta.min((log_rho - libm::log(sq)) / (2.0 * log_prod));
        } else if sq > libm::exp(log_rho) {
            max_beta = f64::NEG_INFINITY;
        }
        min_rho = min_rho.max(libm::exp((libm::log(sq) + 2.0 * params.beta * log_prod) / l0));
    }
    // nonincreasing upper envelope, so oscillation zeros do not dominate the fit
    for l in (0..k_scan as usize).rev() {
        level_max[l] = level_max[l].max(level_max[l + 1]);
    }
    let lo = (k_scan / 4).max(1);
    let pts: Vec<(f64, f64)> = (lo..=k_scan)
        .filter(|&l| level_max[l as usize] > 0.0)
        .map(|l| (libm::log(l as f64), libm::log(level_max[l as usize])))
        .collect();
    let fitted_beta = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        if sxx > 0.0 {
            Some(-0.5 * sxy / sxx)
        } else {
            None
        }
    } else {
        None
    };
    Ok(DecayReport { entries, satisfied, fitted_beta, max_beta, min_rho })
}
