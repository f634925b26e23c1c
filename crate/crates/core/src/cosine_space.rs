//! Half-period cosine expansions: r-weights, frequency enumeration, the
//! truncated reproducing kernel, cosine coefficients and the space norm.
//!
//! Coefficient tables are indexed by nonnegative multi-indices only. The
//! even extension to `Z^s` is `f̃(h) := f̃(|h|)` componentwise, which is what
//! the norm identity over `Z^s` presumes.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};
use core::fmt::Write as _;

use crate::error::{check_dim, invalid, Error, Result};
use crate::lattice::Domain;
use crate::quadrature::{for_each_tensor_node, GaussLegendre};
use crate::sum::NeumaierSum;

/// A frequency `k ∈ Z^s`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<i64>);

impl MultiIndex {
    pub fn zero(s: usize) -> Self {
        Self(vec![0; s])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    /// `Σ |k_j|`.
    pub fn l1(&self) -> u64 {
        self.0.iter().map(|k| k.unsigned_abs()).sum()
    }

    pub fn linf(&self) -> u64 {
        self.0.iter().map(|k| k.unsigned_abs()).max().unwrap_or(0)
    }

    /// `|k|₀`, the number of nonzero components.
    pub fn l0(&self) -> usize {
        self.0.iter().filter(|&&k| k != 0).count()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    /// Componentwise absolute value.
    pub fn abs(&self) -> Vec<u64> {
        self.0.iter().map(|k| k.unsigned_abs()).collect()
    }
}

impl From<Vec<i64>> for MultiIndex {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

/// Smoothness `(α, γ)` of the function space and decay `(β, ρ)` of the
/// measure's cosine transform.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessParams {
    pub alpha: f64,
    pub gamma: Vec<f64>,
    pub beta: f64,
    pub rho: Vec<f64>,
}

impl SmoothnessParams {
    pub fn new(alpha: f64, gamma: Vec<f64>, beta: f64, rho: Vec<f64>) -> Result<Self> {
        check_dim(gamma.len(), rho.len())?;
        if !(alpha > 0.5) {
            return Err(invalid(format!("alpha must exceed 1/2, got {alpha}")));
        }
        if gamma.is_empty() {
            return Err(invalid("need at least one dimension"));
        }
        if gamma.iter().chain(&rho).any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(invalid("gamma and rho must be positive and finite"));
        }
        if !beta.is_finite() {
            return Err(invalid("beta must be finite"));
        }
        Ok(Self { alpha, gamma, beta, rho })
    }

    /// Same `γ` and `ρ` in every dimension.
    pub fn uniform(s: usize, alpha: f64, gamma: f64, beta: f64, rho: f64) -> Result<Self> {
        Self::new(alpha, vec![gamma; s], beta, vec![rho; s])
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// Checks `β > s` and `β − α > 1/2`.
    pub fn check_bound_regime(&self) -> Result<()> {
        let s = self.dim() as f64;
        if !(self.beta > s) {
            return Err(invalid(format!("beta = {} must exceed s = {s}", self.beta)));
        }
        if !(self.beta - self.alpha > 0.5) {
            return Err(invalid("beta - alpha must exceed 1/2"));
        }
        Ok(())
    }
}

/// `r_{α,γ}(k)`: 1 at `k = 0`, else `γ |k|^{-2α}`.
pub fn r_weight_1d(alpha: f64, gamma: f64, k: i64) -> Result<f64> {
    if !(alpha > 0.5) {
        return Err(invalid(format!("alpha must exceed 1/2, got {alpha}")));
    }
    if !(gamma > 0.0) {
        return Err(invalid("gamma must be positive"));
    }
    Ok(r_unchecked(alpha, gamma, k.unsigned_abs()))
}

#[inline]
pub(crate) fn r_unchecked(alpha: f64, gamma: f64, k: u64) -> f64 {
    if k == 0 {
        1.0
    } else {
        gamma * libm::pow(k as f64, -2.0 * alpha)
    }
}

/// `Π_j r_{α,γ_j}(k_j)`.
pub fn r_weight_multi(params: &SmoothnessParams, k: &MultiIndex) -> Result<f64> {
    check_dim(params.dim(), k.dim())?;
    Ok(k.0.iter().zip(&params.gamma).map(|(&kj, &g)| r_unchecked(params.alpha, g, kj.unsigned_abs())).product())
}

/// `Π_j r_{β,ρ_j}(k_j)`, the decay envelope for the measure's cosine transform.
pub fn decay_weight(params: &SmoothnessParams, k: &[u64]) -> f64 {
    k.iter().zip(&params.rho).map(|(&kj, &r)| r_unchecked(params.beta, r, kj)).product()
}

/// Shape of the frequency truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Truncation {
    /// `Σ |k_j| ≤ K`.
    #[default]
    L1,
    /// `max |k_j| ≤ K`, diagnostics only.
    LInf,
}

impl Truncation {
    #[inline]
    fn remaining(self, budget: u64, used: u64) -> u64 {
        match self {
            Truncation::L1 => budget - used,
            Truncation::LInf => budget,
        }
    }
}

/// Visits every `k ∈ N^s` inside the truncation, lexicographically.
pub fn for_each_nonnegative<F: FnMut(&[u64])>(s: usize, radius: u64, trunc: Truncation, mut f: F) {
    if s == 0 {
        return;
    }
    let mut k = vec![0u64; s];
    fn rec<F: FnMut(&[u64])>(k: &mut [u64], j: usize, used: u64, radius: u64, trunc: Truncation, f: &mut F) {
        let top = trunc.remaining(radius, used);
        for v in 0..=top {
            k[j] = v;
            if j + 1 == k.len() {
                f(k);
            } else {
                rec(k, j + 1, used + v, radius, trunc, f);
            }
        }
        k[j] = 0;
    }
    rec(&mut k, 0, 0, radius, trunc, &mut f);
}

/// All `k ∈ N^s` inside the truncation, lexicographically.
pub fn enumerate_nonnegative(s: usize, radius: u64, trunc: Truncation) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for_each_nonnegative(s, radius, trunc, |k| out.push(k.to_vec()));
    out
}

/// All `k ∈ Z^s` with `Σ|k_j| ≤ K`, lexicographically, each once.
pub fn enumerate_l1_ball(s: usize, radius: u64) -> Vec<MultiIndex> {
    enumerate_ball(s, radius, Truncation::L1)
}

pub fn enumerate_ball(s: usize, radius: u64, trunc: Truncation) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    if s == 0 {
        return out;
    }
    let mut k = vec![0i64; s];
    fn rec(k: &mut [i64], j: usize, used: u64, radius: u64, trunc: Truncation, out: &mut Vec<MultiIndex>) {
        let top = trunc.remaining(radius, used) as i64;
        for v in -top..=top {
            k[j] = v;
            if j + 1 == k.len() {
                out.push(MultiIndex(k.to_vec()));
            } else {
                rec(k, j + 1, used + v.unsigned_abs(), radius, trunc, out);
            }
        }
    }
    rec(&mut k, 0, 0, radius, trunc, &mut out);
    out
}

/// Binomial coefficient in `u128`; exact while the result fits.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of `k ∈ N^s` with `Σ k_j ≤ K`.
pub fn nonnegative_l1_count(s: usize, radius: u64) -> u128 {
    binomial(radius + s as u64, s as u64)
}

#[inline]
fn normalized(y: f64, domain: &Domain, j: usize) -> f64 {
    (y - domain.lower()[j]) / domain.width(j)
}

fn cos_rows(u: &[f64], radius: u64) -> Vec<Vec<f64>> {
    u.iter().map(|&uj| (0..=radius).map(|k| libm::cos(PI * k as f64 * uj)).collect()).collect()
}

/// Truncated kernel `Σ_{|k|₁≤K} Π_j cos(πk_j x̂_j) · cos(πk·ŷ)`, with
/// `x̂, ŷ` the box-normalized arguments.
///
/// The imaginary parts of the underlying complex sum cancel under
/// `k ↔ −k`; summing over all sign patterns of a fixed `|k|` gives
/// `2^{|k|₀} Π_j cos(πk_j x̂_j) cos(πk_j ŷ_j)`, which is what is accumulated.
pub fn eval_truncated_kernel(x: &[f64], y: &[f64], domain: &Domain, radius: u64) -> Result<f64> {
    eval_truncated_kernel_with(x, y, domain, radius, Truncation::L1)
}

pub fn eval_truncated_kernel_with(x: &[f64], y: &[f64], domain: &Domain, radius: u64, trunc: Truncation) -> Result<f64> {
    let s = domain.dim();
    check_dim(s, x.len())?;
    check_dim(s, y.len())?;
    let xu: Vec<f64> = (0..s).map(|j| normalized(x[j], domain, j)).collect();
    let yu: Vec<f64> = (0..s).map(|j| normalized(y[j], domain, j)).collect();
    let cx = cos_rows(&xu, radius);
    let cy = cos_rows(&yu, radius);
    let mut acc = NeumaierSum::new();
    for_each_nonnegative(s, radius, trunc, |k| {
        let mut term = 1.0;
        for (j, &kj) in k.iter().enumerate() {
            let kj = kj as usize;
            term *= cx[j][kj] * cy[j][kj];
            if kj != 0 {
                term *= 2.0;
            }
        }
        acc.add(term);
    });
    Ok(acc.value())
}

/// `f̃(k) = ∫_{[0,1]^s} f(u(b−a)+a) 2^{|k|₀/2} Π_j cos(πk_j u_j) du` by
/// tensor Gauss–Legendre with `nodes` points per dimension.
///
/// Meant as an oracle for small `s`; the cost is `nodes^s` evaluations.
pub fn cosine_coefficient<F>(mut f: F, domain: &Domain, k: &[u64], nodes: usize) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let s = domain.dim();
    check_dim(s, k.len())?;
    if nodes < 2 {
        return Err(invalid("need at least two quadrature nodes per dimension"));
    }
    let rule = GaussLegendre::new(nodes)?;
    let norm = libm::pow(SQRT_2, k.iter().filter(|&&v| v != 0).count() as f64);
    let mut acc = NeumaierSum::new();
    let mut y = vec![0.0; s];
    let mut bad: Option<Error> = None;
    for_each_tensor_node(&rule, &vec![0.0; s], &vec![1.0; s], |u, w| {
        if bad.is_some() {
            return;
        }
        for j in 0..s {
            y[j] = u[j] * domain.width(j) + domain.lower()[j];
        }
        let v = f(&y);
        if !v.is_finite() {
            bad = Some(Error::NonFinite { point: y.clone(), value: v });
            return;
        }
        let mut c = 1.0;
        for j in 0..s {
            c *= libm::cos(PI * k[j] as f64 * u[j]);
        }
        acc.add(w * v * c);
    });
    match bad {
        Some(e) => Err(e),
        None => Ok(norm * acc.value()),
    }
}

/// One-dimensional coefficients `f̃(0), …, f̃(max_k)` of `f` on `[a, b]`.
pub fn cosine_coefficients_1d<F>(mut f: F, a: f64, b: f64, max_k: u64, rule: &GaussLegendre) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> f64,
{
    let (u, w) = rule.on_interval(0.0, 1.0);
    let mut fw = Vec::with_capacity(u.len());
    for (&ui, &wi) in u.iter().zip(&w) {
        let y = ui * (b - a) + a;
        let v = f(y);
        if !v.is_finite() {
            return Err(Error::NonFinite { point: vec![y], value: v });
        }
        fw.push(wi * v);
    }
    Ok((0..=max_k)
        .map(|k| {
            let c: NeumaierSum = u.iter().zip(&fw).map(|(&ui, &v)| v * libm::cos(PI * k as f64 * ui)).collect();
            if k == 0 {
                c.value()
            } else {
                SQRT_2 * c.value()
            }
        })
        .collect())
}

/// Cosine coefficients over a box, for `k ∈ N^s` with `|k|₁ ≤ max_l1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosineCoefficients {
    domain: Domain,
    max_l1: u64,
    table: BTreeMap<Vec<u64>, f64>,
}

impl CosineCoefficients {
    /// Fills every index of the ball from `coef(k)`.
    pub fn from_fn<F: FnMut(&[u64]) -> f64>(domain: Domain, max_l1: u64, mut coef: F) -> Self {
        let mut table = BTreeMap::new();
        for_each_nonnegative(domain.dim(), max_l1, Truncation::L1, |k| {
            table.insert(k.to_vec(), coef(k));
        });
        Self { domain, max_l1, table }
    }

    /// Coefficients of a product `Π_j f_j(y_j)` from per-dimension 1D tables.
    pub fn from_separable(domain: Domain, max_l1: u64, per_dim: &[Vec<f64>]) -> Result<Self> {
        check_dim(domain.dim(), per_dim.len())?;
        if per_dim.iter().any(|c| (c.len() as u64) <= max_l1) {
            return Err(invalid("1D tables must cover 0..=max_l1"));
        }
        Ok(Self::from_fn(domain, max_l1, |k| k.iter().enumerate().map(|(j, &kj)| per_dim[j][kj as usize]).product()))
    }

    /// Coefficients of `f` by tensor quadrature, one pass over the nodes.
    pub fn from_function<F>(mut f: F, domain: Domain, max_l1: u64, nodes: usize) -> Result<Self>
    where
        F: FnMut(&[f64]) -> f64,
    {
        let s = domain.dim();
        if nodes < 2 {
            return Err(invalid("need at least two quadrature nodes per dimension"));
        }
        let rule = GaussLegendre::new(nodes)?;
        let indices = enumerate_nonnegative(s, max_l1, Truncation::L1);
        let mut acc = vec![NeumaierSum::new(); indices.len()];
        let mut y = vec![0.0; s];
        let mut bad: Option<Error> = None;
        for_each_tensor_node(&rule, &vec![0.0; s], &vec![1.0; s], |u, w| {
            if bad.is_some() {
                return;
            }
            for j in 0..s {
                y[j] = u[j] * domain.width(j) + domain.lower()[j];
            }
            let v = f(&y);
            if !v.is_finite() {
                bad = Some(Error::NonFinite { point: y.clone(), value: v });
                return;
            }
            let rows = cos_rows(u, max_l1);
            for (k, a) in indices.iter().zip(acc.iter_mut()) {
                let c: f64 = k.iter().enumerate().map(|(j, &kj)| rows[j][kj as usize]).product();
                a.add(w * v * c);
            }
        });
        if let Some(e) = bad {
            return Err(e);
        }
        let table = indices
            .into_iter()
            .zip(acc)
            .map(|(k, a)| {
                let l0 = k.iter().filter(|&&v| v != 0).count();
                (k, libm::pow(SQRT_2, l0 as f64) * a.value())
            })
            .collect();
        Ok(Self { domain, max_l1, table })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn max_l1(&self) -> u64 {
        self.max_l1
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Coefficient at `k`; negative components are folded by `|k_j|`.
    pub fn get(&self, k: &MultiIndex) -> Option<f64> {
        self.table.get(&k.abs()).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u64], f64)> {
        self.table.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    /// Serializes as `s max_l1 a… b…` followed by one `k… value` line per entry.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{} {}", self.dim(), self.max_l1);
        for v in self.domain.lower().iter().chain(self.domain.upper()) {
            let _ = write!(out, " {v:.16e}");
        }
        out.push('\n');
        for (k, v) in &self.table {
            for kj in k {
                let _ = write!(out, "{kj} ");
            }
            let _ = writeln!(out, "{v:.16e}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<&str> = lines.next().ok_or_else(|| invalid("empty coefficient file"))?.split_whitespace().collect();
        let parse_f = |t: &str| t.parse::<f64>().map_err(|_| invalid(format!("bad number {t:?}")));
        let parse_u = |t: &str| t.parse::<u64>().map_err(|_| invalid(format!("bad integer {t:?}")));
        if header.len() < 2 {
            return Err(invalid("short coefficient header"));
        }
        let s = parse_u(header[0])? as usize;
        let max_l1 = parse_u(header[1])?;
        if header.len() != 2 + 2 * s {
            return Err(invalid("coefficient header has the wrong number of bounds"));
        }
        let lower = header[2..2 + s].iter().map(|t| parse_f(t)).collect::<Result<Vec<_>>>()?;
        let upper = header[2 + s..].iter().map(|t| parse_f(t)).collect::<Result<Vec<_>>>()?;
        let domain = Domain::new(lower, upper)?;
        let mut table = BTreeMap::new();
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != s + 1 {
                return Err(invalid(format!("expected {} fields, got {}", s + 1, toks.len())));
            }
            let k = toks[..s].iter().map(|t| parse_u(t)).collect::<Result<Vec<_>>>()?;
            if k.iter().sum::<u64>() > max_l1 {
                return Err(invalid("index outside the declared l1 ball"));
            }
            table.insert(k, parse_f(toks[s])?);
        }
        Ok(Self { domain, max_l1, table })
    }
}

/// `Σ_k f̃(k) (√2)^{|k|₀} Π_j cos(πk_j (y_j−a_j)/(b_j−a_j))`, defined on all of
/// `R^s` by periodic continuation.
pub fn eval_half_period_expansion(coeffs: &CosineCoefficients, y: &[f64]) -> Result<f64> {
    let s = coeffs.dim();
    check_dim(s, y.len())?;
    let u: Vec<f64> = (0..s).map(|j| normalized(y[j], &coeffs.domain, j)).collect();
    let rows = cos_rows(&u, coeffs.max_l1);
    let mut acc = NeumaierSum::new();
    for (k, &c) in &coeffs.table {
        let mut term = c;
        for (j, &kj) in k.iter().enumerate() {
            if kj != 0 {
                term *= SQRT_2 * rows[j][kj as usize];
            }
        }
        acc.add(term);
    }
    Ok(acc.value())
}

/// `Σ_k f̃(k)² / r_{α,γ}(k)` over the table; a lower bound for `‖f‖²`.
pub fn cos_space_norm_sq(coeffs: &CosineCoefficients, params: &SmoothnessParams) -> Result<f64> {
    check_dim(params.dim(), coeffs.dim())?;
    let mut acc = NeumaierSum::new();
    for (k, &c) in &coeffs.table {
        let r: f64 = k.iter().zip(&params.gamma).map(|(&kj, &g)| r_unchecked(params.alpha, g, kj)).product();
        acc.add(c * c / r);
    }
    Ok(acc.value())
}
