//! Rank-1 lattice points, the tent transformation and box mapping.
//!
//! Lattice coordinates are kept as exact residues `(n·g_j mod N, N)` until
//! the final division, so large `n·g_j` products never lose bits.

use alloc::format;
use alloc::vec::Vec;

use sha2::{Digest, Sha256};

use crate::error::{check_dim, invalid, Error, Result};

/// Integer generating vector `g` of a rank-1 lattice.
///
/// `n_max` is the largest point count the vector is meant for; for
/// extensible (base-2) use it is a power of two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingVector {
    components: Vec<u64>,
    n_max: u64,
}

impl GeneratingVector {
    pub fn new(components: Vec<u64>, n_max: u64) -> Result<Self> {
        if components.is_empty() {
            return Err(invalid("generating vector needs at least one component"));
        }
        if n_max < 2 {
            return Err(invalid("n_max must be at least 2"));
        }
        if let Some(bad) = components.iter().find(|&&g| g == 0 || g >= n_max) {
            return Err(invalid(format!("component {bad} outside [1, {}]", n_max - 1)));
        }
        Ok(Self { components, n_max })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[u64] {
        &self.components
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    /// The first `s` components.
    pub fn truncated(&self, s: usize) -> Result<Self> {
        if s == 0 || s > self.dim() {
            return Err(invalid(format!("cannot take {s} components of a {}-dimensional vector", self.dim())));
        }
        Ok(Self { components: self.components[..s].to_vec(), n_max: self.n_max })
    }

    pub fn fingerprint(&self) -> u64 {
        let mut h = Sha256::new();
        h.update(b"gv");
        h.update(self.n_max.to_le_bytes());
        for g in &self.components {
            h.update(g.to_le_bytes());
        }
        fold_digest(&h.finalize())
    }
}

pub(crate) fn fold_digest(d: &[u8]) -> u64 {
    let mut b = [0u8; 8];
    b.copy_from_slice(&d[..8]);
    u64::from_le_bytes(b)
}

/// The projection domain `D = [a_1, b_1] × … × [a_s, b_s]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(invalid("domain needs at least one dimension"));
        }
        for (j, (a, b)) in lower.iter().zip(&upper).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(invalid(format!("bad interval [{a}, {b}] in dimension {j}")));
            }
        }
        Ok(Self { lower, upper })
    }

    /// `[a, b]^s`.
    pub fn cube(s: usize, a: f64, b: f64) -> Result<Self> {
        Self::new(alloc::vec![a; s], alloc::vec![b; s])
    }

    /// `[-L/2, L/2]^s`.
    pub fn centered(s: usize, width: f64) -> Result<Self> {
        Self::cube(s, -0.5 * width, 0.5 * width)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    #[inline]
    pub fn width(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|j| self.width(j)).product()
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        y.len() == self.dim() && y.iter().zip(self.lower.iter().zip(&self.upper)).all(|(v, (a, b))| a <= v && v <= b)
    }

    pub fn fingerprint(&self) -> u64 {
        let mut h = Sha256::new();
        h.update(b"box");
        h.update((self.dim() as u64).to_le_bytes());
        for v in self.lower.iter().chain(&self.upper) {
            h.update(v.to_bits().to_le_bytes());
        }
        fold_digest(&h.finalize())
    }
}

/// A point of the unit cube.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitPoint {
    coords: Vec<f64>,
}

impl UnitPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().all(|c| (0.0..=1.0).contains(c)) {
            Ok(Self { coords })
        } else {
            Err(invalid("unit point coordinates must lie in [0, 1]"))
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// An exact lattice coordinate `num / den` with `0 ≤ num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeFraction {
    pub num: u64,
    pub den: u64,
}

impl LatticeFraction {
    #[inline]
    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Tent-transformed value `1 − |2x − 1|`, formed from integers first.
    #[inline]
    pub fn tent_value(self) -> f64 {
        let twice = 2 * self.num as i128 - self.den as i128;
        (self.den as i128 - twice.abs()) as f64 / self.den as f64
    }
}

fn check_point_count(g: &GeneratingVector, n_points: u64, s: usize) -> Result<()> {
    if n_points < 2 {
        return Err(invalid("a lattice needs at least two points"));
    }
    if n_points > g.n_max() {
        return Err(invalid(format!("N = {n_points} exceeds n_max = {}", g.n_max())));
    }
    if s == 0 || s > g.dim() {
        return Err(invalid(format!("dimension {s} not available from a {}-dimensional vector", g.dim())));
    }
    Ok(())
}

/// Residues `n·g_j mod N` for the first `s` components.
#[inline]
pub fn lattice_residues_into(g: &[u64], n_points: u64, n: u64, out: &mut [u64]) {
    for (o, &gj) in out.iter_mut().zip(g) {
        *o = ((n as u128 * gj as u128) % n_points as u128) as u64;
    }
}

/// Exact coordinates of lattice point `n` of `P(g, N)`.
pub fn lattice_fractions(g: &GeneratingVector, n_points: u64, s: usize, n: u64) -> Result<Vec<LatticeFraction>> {
    check_point_count(g, n_points, s)?;
    if n >= n_points {
        return Err(invalid(format!("point index {n} out of range for N = {n_points}")));
    }
    let mut res = alloc::vec![0; s];
    lattice_residues_into(g.components(), n_points, n, &mut res);
    Ok(res.into_iter().map(|num| LatticeFraction { num, den: n_points }).collect())
}

/// Point `n` of `P(g, N)`: `({n g_1 / N}, …, {n g_s / N})`.
pub fn lattice_point(g: &GeneratingVector, n_points: u64, s: usize, n: u64) -> Result<UnitPoint> {
    let coords = lattice_fractions(g, n_points, s, n)?.into_iter().map(LatticeFraction::value).collect();
    Ok(UnitPoint { coords })
}

/// All `N` points of `P(g, N)` in natural order; point 0 is the origin.
pub fn generate_rank1_points(g: &GeneratingVector, n_points: u64, s: usize) -> Result<Vec<UnitPoint>> {
    check_point_count(g, n_points, s)?;
    let mut res = alloc::vec![0; s];
    Ok((0..n_points)
        .map(|n| {
            lattice_residues_into(g.components(), n_points, n, &mut res);
            UnitPoint { coords: res.iter().map(|&m| m as f64 / n_points as f64).collect() }
        })
        .collect())
}

/// `φ(x) = 1 − |2x − 1|`.
#[inline]
pub fn tent(x: f64) -> f64 {
    1.0 - (2.0 * x - 1.0).abs()
}

pub fn tent_transform(p: &UnitPoint) -> UnitPoint {
    UnitPoint { coords: p.coords.iter().map(|&x| tent(x)).collect() }
}

/// `p × (b − a) + a`, componentwise.
pub fn map_to_box(p: &UnitPoint, domain: &Domain) -> Result<Vec<f64>> {
    check_dim(domain.dim(), p.dim())?;
    Ok(p.coords.iter().enumerate().map(|(j, &u)| map_coord(u, domain, j)).collect())
}

#[inline]
pub(crate) fn map_coord(u: f64, domain: &Domain, j: usize) -> f64 {
    let (a, b) = (domain.lower[j], domain.upper[j]);
    // endpoints land exactly on a and b
    if u >= 1.0 {
        b
    } else {
        u * (b - a) + a
    }
}

/// Point `n` of the box-mapped tent lattice `P_φ(g, N, D)`, written into `out`.
#[inline]
pub fn tent_lattice_point_into(g: &[u64], n_points: u64, n: u64, domain: &Domain, out: &mut [f64]) {
    for (j, o) in out.iter_mut().enumerate() {
        let num = ((n as u128 * g[j] as u128) % n_points as u128) as u64;
        let u = LatticeFraction { num, den: n_points }.tent_value();
        *o = map_coord(u, domain, j);
    }
}

/// The whole set `P_φ(g, N, D)` in natural order.
pub fn tent_lattice_points(g: &GeneratingVector, n_points: u64, domain: &Domain) -> Result<Vec<Vec<f64>>> {
    let s = domain.dim();
    check_point_count(g, n_points, s)?;
    Ok((0..n_points)
        .map(|n| {
            let mut y = alloc::vec![0.0; s];
            tent_lattice_point_into(g.components(), n_points, n, domain, &mut y);
            y
        })
        .collect())
}

/// Reverses the low `m` bits of `n`.
#[inline]
pub fn bit_reverse(n: u64, m: u32) -> u64 {
    if m == 0 {
        0
    } else {
        n.reverse_bits() >> (64 - m)
    }
}

/// Base-2 radical inverse of `n` with `m` digits, as the exact fraction
/// `bit_reverse(n, m) / 2^m`.
pub fn radical_inverse_base2(n: u64, m: u32) -> LatticeFraction {
    LatticeFraction { num: bit_reverse(n, m), den: 1u64 << m }
}

/// Point `n` of the extensible lattice sequence in radical-inverse order:
/// `{ψ₂(n) · g_j}` where `ψ₂` mirrors the `m`-bit binary digits of `n`.
///
/// For every `k ≤ m` the first `2^k` points form `P(g, 2^k)` as a set.
pub fn extensible_point(g: &GeneratingVector, n: u64, m: u32) -> Result<UnitPoint> {
    if m >= 64 {
        return Err(invalid("m must be below 64"));
    }
    let size = 1u64 << m;
    if size > g.n_max() {
        return Err(invalid(format!("2^{m} exceeds n_max = {}", g.n_max())));
    }
    if n >= size {
        return Err(Error::InvalidArgument(format!("index {n} out of range for 2^{m} points")));
    }
    let rev = bit_reverse(n, m);
    let coords = g
        .components()
        .iter()
        .map(|&gj| ((rev as u128 * gj as u128) % size as u128) as f64 / size as f64)
        .collect();
    Ok(UnitPoint { coords })
}
