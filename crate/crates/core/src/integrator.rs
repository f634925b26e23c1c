//! The cosine-expansion lattice scheme.
//!
//! Offline: fold the measure's cosine transforms into a spectrum and turn it
//! into one weight per tent-transformed lattice point. Online: a weighted
//! average of integrand values. The characteristic function is only touched
//! while building the spectrum.
//!
//! With `â` the box-normalized lower corner, the weight of point `n` is
//!
//! ```text
//! w_n = Σ_{k ∈ N^s, |k|₁ ≤ K} 2^{|k|₀} ct(k) Π_j cos(π k_j φ(x_{n,j}))
//! ```
//!
//! where `ct(k)` is the cosine transform of the measure. This is the real
//! part of the sum over `k ∈ Z^s`, grouped by `|k|`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::cosine_space::{for_each_nonnegative, Truncation};
use crate::error::{check_dim, invalid, Error, Result};
use crate::lattice::{map_coord, GeneratingVector, LatticeFraction, Domain};
use crate::measures::{cos_transform_unchecked, CharacteristicFunction, MeasureSpec};
use crate::sum::{NeumaierSum, REDUCTION_BLOCK};

/// Folded cosine transforms `2^{|k|₀} ct(k)` over the truncated index set.
#[derive(Debug, Clone)]
pub struct MeasureSpectrum {
    domain: Domain,
    radius: u64,
    trunc: Truncation,
    indices: Vec<u32>,
    coeffs: Vec<f64>,
    measure_fingerprint: u64,
}

impl MeasureSpectrum {
    /// `ℓ1` truncation at `radius`.
    pub fn new(m: &MeasureSpec, domain: &Domain, radius: u64) -> Result<Self> {
        let mut sp = Self::from_cf(m, domain, radius, Truncation::L1)?;
        sp.measure_fingerprint = m.fingerprint();
        Ok(sp)
    }

    /// Any characteristic function, any truncation shape. The fingerprint
    /// is left at zero.
    pub fn from_cf<M: CharacteristicFunction + ?Sized>(m: &M, domain: &Domain, radius: u64, trunc: Truncation) -> Result<Self> {
        let s = domain.dim();
        check_dim(s, m.dim())?;
        if radius > u32::MAX as u64 {
            return Err(invalid("truncation radius too large"));
        }
        let mut indices = Vec::new();
        let mut coeffs = Vec::new();
        for_each_nonnegative(s, radius, trunc, |k| {
            let fold = (1u64 << k.iter().filter(|&&v| v != 0).count()) as f64;
            indices.extend(k.iter().map(|&v| v as u32));
            coeffs.push(fold * cos_transform_unchecked(m, k, domain));
        });
        Ok(Self { domain: domain.clone(), radius, trunc, indices, coeffs, measure_fingerprint: 0 })
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn measure_fingerprint(&self) -> u64 {
        self.measure_fingerprint
    }

    /// `(k, 2^{|k|₀} ct(k))` pairs in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.indices.chunks(self.dim()).zip(self.coeffs.iter().copied())
    }

    /// `Σ_k c_k Π_j rows[j·(K+1) + k_j]`, rows holding `cos(π k u_j)`.
    fn contract(&self, rows: &[f64]) -> f64 {
        let s = self.dim();
        let stride = self.radius as usize + 1;
        let mut acc = NeumaierSum::new();
        for (k, &c) in self.indices.chunks_exact(s).zip(&self.coeffs) {
            let mut term = c;
            for (j, &kj) in k.iter().enumerate() {
                term *= rows[j * stride + kj as usize];
            }
            acc.add(term);
        }
        acc.value()
    }

    /// Expected truncated kernel at a point `u` of the unit cube, i.e. the
    /// weight for the box point `u(b − a) + a`.
    pub fn weight_at_unit_point(&self, u: &[f64]) -> Result<f64> {
        check_dim(self.dim(), u.len())?;
        let stride = self.radius as usize + 1;
        let mut rows = vec![0.0; self.dim() * stride];
        for (j, &uj) in u.iter().enumerate() {
            for k in 0..stride {
                rows[j * stride + k] = libm::cos(PI * k as f64 * uj);
            }
        }
        Ok(self.contract(&rows))
    }

    /// Weights of lattice points `start..start + out.len()` of `P(g, N)`.
    ///
    /// Uses `cos(πk φ(x)) = cos(2πk x)`, so every cosine is a table lookup at
    /// the exact residue `k·(n g_j mod N) mod N`.
    pub fn lattice_weights_into(&self, g: &GeneratingVector, table: &CosTable, start: u64, out: &mut [f64]) -> Result<()> {
        let s = self.dim();
        let n_points = table.n_points();
        if g.dim() < s {
            return Err(invalid("generating vector has too few components"));
        }
        if n_points > g.n_max() {
            return Err(invalid(format!("N = {n_points} exceeds n_max = {}", g.n_max())));
        }
        if start + out.len() as u64 > n_points {
            return Err(invalid("point range exceeds N"));
        }
        let stride = self.radius as usize + 1;
        let mut rows = vec![0.0; s * stride];
        for (i, o) in out.iter_mut().enumerate() {
            let n = start + i as u64;
            for j in 0..s {
                let m = ((n as u128 * g.components()[j] as u128) % n_points as u128) as u64;
                let mut r = 0u64;
                for k in 0..stride {
                    rows[j * stride + k] = table.get(r);
                    r += m;
                    if r >= n_points {
                        r -= n_points;
                    }
                }
            }
            *o = self.contract(&rows);
        }
        Ok(())
    }
}

/// `cos(2π r / N)` for `r = 0..N`.
///
/// Entries are computed from the correctly rounded quotient `min(r, N−r)/N`,
/// so equal fractions give bitwise equal cosines for every `N`.
#[derive(Debug, Clone)]
pub struct CosTable {
    values: Vec<f64>,
}

impl CosTable {
    pub fn new(n_points: u64) -> Result<Self> {
        if n_points < 2 {
            return Err(invalid("a lattice needs at least two points"));
        }
        let values = (0..n_points)
            .map(|r| {
                let x = r.min(n_points - r) as f64 / n_points as f64;
                libm::cos(TAU * x)
            })
            .collect();
        Ok(Self { values })
    }

    pub fn n_points(&self) -> u64 {
        self.values.len() as u64
    }

    #[inline]
    pub fn get(&self, r: u64) -> f64 {
        self.values[r as usize]
    }
}

fn check_lattice(g: &GeneratingVector, n_points: u64, s: usize) -> Result<()> {
    if n_points < 2 {
        return Err(invalid("a lattice needs at least two points"));
    }
    if n_points > g.n_max() {
        return Err(invalid(format!("N = {n_points} exceeds n_max = {}", g.n_max())));
    }
    if g.dim() < s {
        return Err(invalid(format!("need {s} generating-vector components, have {}", g.dim())));
    }
    Ok(())
}

/// `w_n` for a single lattice point.
pub fn kernel_expected_weight(
    n: u64,
    g: &GeneratingVector,
    n_points: u64,
    m: &MeasureSpec,
    domain: &Domain,
    radius: u64,
) -> Result<f64> {
    check_lattice(g, n_points, domain.dim())?;
    if n >= n_points {
        return Err(invalid(format!("point index {n} out of range for N = {n_points}")));
    }
    let sp = MeasureSpectrum::new(m, domain, radius)?;
    let mut out = [0.0];
    sp.lattice_weights_into(g, &CosTable::new(n_points)?, n, &mut out)?;
    Ok(out[0])
}

/// Per-point weights together with the configuration that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    domain: Domain,
    radius: u64,
    measure_fingerprint: u64,
    g_fingerprint: u64,
    n_points: u64,
    weights: Vec<f64>,
}

impl WeightTable {
    /// Reassembles a table, e.g. after loading it from disk.
    pub fn from_parts(
        domain: Domain,
        radius: u64,
        measure_fingerprint: u64,
        g_fingerprint: u64,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let n_points = weights.len() as u64;
        if n_points < 2 {
            return Err(invalid("a weight table needs at least two points"));
        }
        Ok(Self { domain, radius, measure_fingerprint, g_fingerprint, n_points, weights })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }

    pub fn measure_fingerprint(&self) -> u64 {
        self.measure_fingerprint
    }

    pub fn g_fingerprint(&self) -> u64 {
        self.g_fingerprint
    }

    pub fn n_points(&self) -> u64 {
        self.n_points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The table of `P(g, n)` for a divisor `n` of `N`: point `i` of the
    /// smaller lattice is point `i·N/n` of this one.
    pub fn restrict(&self, n_points: u64) -> Result<WeightTable> {
        if n_points < 2 || n_points > self.n_points || !self.n_points.is_multiple_of(n_points) {
            return Err(invalid(format!("{n_points} does not divide N = {}", self.n_points)));
        }
        let stride = (self.n_points / n_points) as usize;
        Ok(WeightTable { weights: self.weights.iter().step_by(stride).copied().collect(), n_points, ..self.clone() })
    }
}

/// `w_n` for every point of `P(g, N)`, serially.
pub fn build_weight_table(
    g: &GeneratingVector,
    n_points: u64,
    m: &MeasureSpec,
    domain: &Domain,
    radius: u64,
) -> Result<WeightTable> {
    let sp = MeasureSpectrum::new(m, domain, radius)?;
    build_weight_table_from(&sp, g, n_points)
}

pub fn build_weight_table_from(sp: &MeasureSpectrum, g: &GeneratingVector, n_points: u64) -> Result<WeightTable> {
    check_lattice(g, n_points, sp.dim())?;
    let table = CosTable::new(n_points)?;
    let mut weights = vec![0.0; n_points as usize];
    sp.lattice_weights_into(g, &table, 0, &mut weights)?;
    Ok(WeightTable {
        domain: sp.domain.clone(),
        radius: sp.radius,
        measure_fingerprint: sp.measure_fingerprint,
        g_fingerprint: g.fingerprint(),
        n_points,
        weights,
    })
}

/// Number of reduction blocks for `N` points.
pub fn block_count(n_points: u64) -> usize {
    (n_points as usize).div_ceil(REDUCTION_BLOCK)
}

/// Compensated partial sum of `f(p_n)·w_n` over reduction block `block`,
/// with `p_n` the box-mapped tent lattice point. `weights = None` means all
/// weights are one.
pub fn lattice_block_sum<F>(
    f: &mut F,
    g: &GeneratingVector,
    n_points: u64,
    domain: &Domain,
    weights: Option<&[f64]>,
    block: usize,
) -> Result<NeumaierSum>
where
    F: FnMut(&[f64]) -> f64 + ?Sized,
{
    let s = domain.dim();
    let start = (block * REDUCTION_BLOCK) as u64;
    let end = (start + REDUCTION_BLOCK as u64).min(n_points);
    let comps = &g.components()[..s];
    let mut y = vec![0.0; s];
    let mut acc = NeumaierSum::new();
    for n in start..end {
        for (j, yj) in y.iter_mut().enumerate() {
            let num = ((n as u128 * comps[j] as u128) % n_points as u128) as u64;
            *yj = map_coord(LatticeFraction { num, den: n_points }.tent_value(), domain, j);
        }
        let v = f(&y);
        if !v.is_finite() {
            return Err(Error::NonFinite { point: y, value: v });
        }
        match weights {
            Some(w) => acc.add(v * w[n as usize]),
            None => acc.add(v),
        }
    }
    Ok(acc)
}

/// Merges block partials in block order and divides by `N`.
pub fn finish_blocks<I: IntoIterator<Item = NeumaierSum>>(blocks: I, n_points: u64) -> f64 {
    let mut total = NeumaierSum::new();
    for b in blocks {
        total.merge(&b);
    }
    total.value() / n_points as f64
}

fn check_table(table: &WeightTable, g: &GeneratingVector, domain: &Domain) -> Result<()> {
    if table.domain != *domain {
        return Err(invalid("weight table was built for a different box"));
    }
    if table.g_fingerprint != g.fingerprint() {
        return Err(invalid("weight table was built for a different generating vector"));
    }
    check_lattice(g, table.n_points, domain.dim())
}

/// `1/N Σ_n f(p_n) w_n`.
///
/// Fails with [`Error::NonFinite`] at the first point where `f` is not finite.
pub fn approximate_expectation<F>(mut f: F, table: &WeightTable, g: &GeneratingVector, domain: &Domain) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    check_table(table, g, domain)?;
    let n_points = table.n_points;
    let blocks = (0..block_count(n_points))
        .map(|b| lattice_block_sum(&mut f, g, n_points, domain, Some(&table.weights), b))
        .collect::<Result<Vec<_>>>()?;
    Ok(finish_blocks(blocks, n_points))
}

/// Plain tent-lattice average `1/N Σ_n f(p_n)`, times `vol(D)` when
/// `lebesgue` is set.
///
/// With the flag the result approximates `∫_D f(y) dy` rather than the
/// expectation under the uniform law on `D`.
pub fn qmc_uniform<F>(mut f: F, g: &GeneratingVector, n_points: u64, domain: &Domain, lebesgue: bool) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    check_lattice(g, n_points, domain.dim())?;
    let blocks = (0..block_count(n_points))
        .map(|b| lattice_block_sum(&mut f, g, n_points, domain, None, b))
        .collect::<Result<Vec<_>>>()?;
    let avg = finish_blocks(blocks, n_points);
    Ok(if lebesgue { avg * domain.volume() } else { avg })
}
