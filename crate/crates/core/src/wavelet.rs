//! Cosine scaling functions on a midpoint grid.
//!
//! For `N'` functions on `[a, b]` the nodes are `c_r = (2r − 1)/(2N')`,
//! `r = 1..N'`, in normalized coordinates, and
//!
//! ```text
//! K(x, r) = 1/2 + Σ_{k=1}^{N'−1} cos(kπ x̂) cos(kπ c_r)
//!         = sin((N'−½)π d₁)/(4 sin(π d₁/2)) + sin((N'−½)π d₂)/(4 sin(π d₂/2)),
//! ```
//!
//! with `d₁ = x̂ − c_r`, `d₂ = x̂ + c_r`. The expectation approximant has the
//! same shape as the lattice scheme, with grid points in place of lattice
//! points and an `ℓ∞` frequency cut at `N' − 1`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::cosine_space::Truncation;
use crate::error::{check_dim, invalid, Error, Result};
use crate::integrator::MeasureSpectrum;
use crate::lattice::Domain;
use crate::measures::{cos_transform_unchecked, CharacteristicFunction};
use crate::sum::NeumaierSum;

/// `N'` scaling functions per dimension over a box.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletConfig {
    n_prime: usize,
    domain: Domain,
}

impl WaveletConfig {
    pub fn new(n_prime: usize, domain: Domain) -> Result<Self> {
        if n_prime == 0 {
            return Err(invalid("need at least one scaling function"));
        }
        Ok(Self { n_prime, domain })
    }

    pub fn n_prime(&self) -> usize {
        self.n_prime
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Normalized node `c_r`, `r = 1..=N'`.
    #[inline]
    pub fn node(&self, r: usize) -> f64 {
        (2 * r - 1) as f64 / (2 * self.n_prime) as f64
    }

    /// Node `r` mapped into dimension `j` of the box.
    pub fn grid_point(&self, j: usize, r: usize) -> f64 {
        self.domain.lower()[j] + self.node(r) * self.domain.width(j)
    }
}

fn direct_kernel(n_prime: usize, u: f64, c: f64) -> f64 {
    let mut acc = NeumaierSum::new();
    acc.add(0.5);
    for k in 1..n_prime {
        acc.add(libm::cos(k as f64 * PI * u) * libm::cos(k as f64 * PI * c));
    }
    acc.value()
}

/// Distance from `d` to the nearest even integer.
fn even_distance(d: f64) -> f64 {
    (d - 2.0 * libm::round(0.5 * d)).abs()
}

fn dirichlet_half(n_prime: usize, d: f64) -> f64 {
    libm::sin((n_prime as f64 - 0.5) * PI * d) / (4.0 * libm::sin(0.5 * PI * d))
}

/// Kernel in normalized coordinates.
pub(crate) fn kernel_normalized(n_prime: usize, u: f64, c: f64) -> f64 {
    let (d1, d2) = (u - c, u + c);
    let e1 = even_distance(d1);
    let e2 = even_distance(d2);
    if e1 == 0.0 || e2 == 0.0 {
        if e1 == 0.0 && e2 == 0.0 {
            return direct_kernel(n_prime, u, c);
        }
        let n = n_prime as f64;
        // exact node hit: the singular half contributes (2N'−1)/4
        let other = if e1 == 0.0 { d2 } else { d1 };
        if even_distance(other) < 1e-9 {
            return direct_kernel(n_prime, u, c);
        }
        return (2.0 * n - 1.0) / 4.0 + dirichlet_half(n_prime, other);
    }
    if e1 < 1e-9 || e2 < 1e-9 {
        return direct_kernel(n_prime, u, c);
    }
    dirichlet_half(n_prime, d1) + dirichlet_half(n_prime, d2)
}

/// `K^{wl}(x, r)` on the first dimension of the configured box.
pub fn wavelet_kernel(cfg: &WaveletConfig, x: f64, r: usize) -> Result<f64> {
    if r == 0 || r > cfg.n_prime {
        return Err(invalid(format!("r = {r} outside 1..={}", cfg.n_prime)));
    }
    let u = (x - cfg.domain.lower()[0]) / cfg.domain.width(0);
    let c = cfg.node(r);
    // the node itself, in box coordinates
    if x == cfg.grid_point(0, r) {
        return Ok(cfg.n_prime as f64 / 2.0);
    }
    Ok(kernel_normalized(cfg.n_prime, u, c))
}

/// Per-node weights `Σ_{|k|∞<N'} 2^{|k|₀} ct(k) Π_j cos(kπ c_{r_j})` as
/// `A_j[r][k] = cos(kπ c_r)` contracted with the folded spectrum.
fn cos_matrix(cfg: &WaveletConfig) -> Vec<f64> {
    let n = cfg.n_prime;
    let mut a = vec![0.0; n * n];
    for r in 1..=n {
        for k in 0..n {
            a[(r - 1) * n + k] = libm::cos(k as f64 * PI * cfg.node(r));
        }
    }
    a
}

fn folded_spectrum_1d<M: CharacteristicFunction + ?Sized>(m: &M, domain: &Domain, n: usize) -> Vec<f64> {
    (0..n as u64).map(|k| if k == 0 { 1.0 } else { 2.0 * cos_transform_unchecked(m, &[k], domain) }).collect()
}

/// `1/N' Σ_r f(y_r) Σ_{|k|<N'} cos(kπ c_r) Re{e^{−iπka/(b−a)} F_μ(kπ/(b−a))}`.
pub fn wavelet_expectation_1d<F, M>(mut f: F, m: &M, cfg: &WaveletConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
    M: CharacteristicFunction + ?Sized,
{
    check_dim(1, cfg.domain.dim())?;
    check_dim(1, m.dim())?;
    let n = cfg.n_prime;
    let spec = folded_spectrum_1d(m, &cfg.domain, n);
    let a = cos_matrix(cfg);
    let mut acc = NeumaierSum::new();
    for r in 1..=n {
        let w: NeumaierSum = (0..n).map(|k| a[(r - 1) * n + k] * spec[k]).collect();
        let y = cfg.grid_point(0, r);
        let v = f(y);
        if !v.is_finite() {
            return Err(Error::NonFinite { point: vec![y], value: v });
        }
        acc.add(v * w.value());
    }
    Ok(acc.value() / n as f64)
}

/// Grid weights `W = A₁ C A₂ᵀ` of the two-dimensional scheme, row-major in
/// `(r₁, r₂)`.
pub fn wavelet_weights_2d<M: CharacteristicFunction + ?Sized>(m: &M, cfg: &WaveletConfig) -> Result<Vec<f64>> {
    check_dim(2, cfg.domain.dim())?;
    check_dim(2, m.dim())?;
    let n = cfg.n_prime;
    let sp = MeasureSpectrum::from_cf(m, &cfg.domain, n as u64 - 1, Truncation::LInf)?;
    let mut c = vec![0.0; n * n];
    for (k, v) in sp.iter() {
        c[k[0] as usize * n + k[1] as usize] = v;
    }
    let a = cos_matrix(cfg);
    // B = C A₂ᵀ, then W = A₁ B
    let mut b = vec![0.0; n * n];
    for k1 in 0..n {
        for r2 in 0..n {
            let acc: NeumaierSum = (0..n).map(|k2| c[k1 * n + k2] * a[r2 * n + k2]).collect();
            b[k1 * n + r2] = acc.value();
        }
    }
    let mut w = vec![0.0; n * n];
    for r1 in 0..n {
        for r2 in 0..n {
            let acc: NeumaierSum = (0..n).map(|k1| a[r1 * n + k1] * b[k1 * n + r2]).collect();
            w[r1 * n + r2] = acc.value();
        }
    }
    Ok(w)
}

/// Tensor version on a 2D box with `N'` functions per dimension.
pub fn wavelet_expectation_2d<F, M>(mut f: F, m: &M, domain: &Domain, n_prime: usize) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
    M: CharacteristicFunction + ?Sized,
{
    if domain.dim() != 2 {
        return Err(invalid(format!("the 2D wavelet scheme needs a 2D box, got {}", domain.dim())));
    }
    let cfg = WaveletConfig::new(n_prime, domain.clone())?;
    let w = wavelet_weights_2d(m, &cfg)?;
    let n = n_prime;
    let mut acc = NeumaierSum::new();
    let mut y = [0.0; 2];
    for r1 in 1..=n {
        y[0] = cfg.grid_point(0, r1);
        for r2 in 1..=n {
            y[1] = cfg.grid_point(1, r2);
            let v = f(&y);
            if !v.is_finite() {
                return Err(Error::NonFinite { point: y.to_vec(), value: v });
            }
            acc.add(v * w[(r1 - 1) * n + (r2 - 1)]);
        }
    }
    Ok(acc.value() / (n * n) as f64)
}
