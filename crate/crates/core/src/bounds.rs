//! Error-bound diagnostics: the dual lattice, the worst-case bound with its
//! per-dimension constants, and the kernel-truncation tail.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::cosine_space::{r_unchecked, MultiIndex, SmoothnessParams};
use crate::error::{check_dim, invalid, Error, Result};
use crate::lattice::GeneratingVector;
use crate::sum::NeumaierSum;

/// `B_2, B_4, …, B_16`.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Riemann zeta for real `x > 1`, by 15 direct terms plus an
/// Euler–Maclaurin tail.
pub fn riemann_zeta(x: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(invalid(format!("zeta needs x > 1, got {x}")));
    }
    const N: f64 = 16.0;
    let mut acc = NeumaierSum::new();
    for n in 1..16 {
        acc.add(libm::pow(n as f64, -x));
    }
    acc.add(libm::pow(N, 1.0 - x) / (x - 1.0));
    acc.add(0.5 * libm::pow(N, -x));
    // B_{2k}/(2k)! · x(x+1)…(x+2k−2) · N^{−x−2k+1}
    let mut rising = x;
    let mut fact = 2.0;
    let mut power = libm::pow(N, -x - 1.0);
    for (i, b) in BERNOULLI.iter().enumerate() {
        let k = i + 1;
        acc.add(b / fact * rising * power);
        let m = 2 * k;
        rising *= (x + m as f64 - 1.0) * (x + m as f64);
        fact *= ((m + 1) * (m + 2)) as f64;
        power /= N * N;
    }
    Ok(acc.value())
}

/// `max{1 + 2γρ ζ(2α+2β), 1 + ρ(ζ(2α) + ζ(2β) + 1/γ + 2^{2α} ζ(2(β−α)))}`.
pub fn constant_cj(alpha: f64, beta: f64, gamma: f64, rho: f64) -> Result<f64> {
    if !(alpha > 0.5) {
        return Err(invalid("alpha must exceed 1/2"));
    }
    if !(beta - alpha > 0.5) {
        return Err(invalid("beta - alpha must exceed 1/2"));
    }
    if !(gamma > 0.0) || !(rho >= 0.0) {
        return Err(invalid("gamma must be positive and rho nonnegative"));
    }
    let first = 1.0 + 2.0 * gamma * rho * riemann_zeta(2.0 * alpha + 2.0 * beta)?;
    let second = 1.0
        + rho
            * (riemann_zeta(2.0 * alpha)?
                + riemann_zeta(2.0 * beta)?
                + 1.0 / gamma
                + libm::pow(2.0, 2.0 * alpha) * riemann_zeta(2.0 * (beta - alpha))?);
    Ok(first.max(second))
}

/// `Σ_{k=−T}^{T} r_{α,γ}(h − k) r_{β,ρ}(k)`, the one-dimensional factor the
/// constants `C_j` dominate after division by `r_{α,γ}(h)`.
pub fn convolution_factor(alpha: f64, beta: f64, gamma: f64, rho: f64, h: i64, terms: u64) -> f64 {
    let t = terms as i64;
    let mut acc = NeumaierSum::new();
    for k in -t..=t {
        acc.add(r_unchecked(alpha, gamma, (h - k).unsigned_abs()) * r_unchecked(beta, rho, k.unsigned_abs()));
    }
    acc.value()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `m` for `gcd(a, m) = 1`.
fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, a as i128 % m as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(m as i128) as u64
}

fn check_dual_args(g: &GeneratingVector, n_points: u64, s: usize, radius: u64) -> Result<()> {
    if n_points < 1 {
        return Err(invalid("N must be positive"));
    }
    if s == 0 || s > g.dim() {
        return Err(invalid(format!("dimension {s} not available from a {}-dimensional vector", g.dim())));
    }
    if radius == 0 {
        return Err(invalid("enumeration radius must be at least 1"));
    }
    if radius > i64::MAX as u64 / 4 {
        return Err(invalid("enumeration radius too large"));
    }
    Ok(())
}

/// Visits every nonzero `h ∈ Z^s` with `‖h‖∞ ≤ H` and `h·g ≡ 0 (mod N)` in
/// lexicographic order.
///
/// The first `s − 1` coordinates are scanned; the last one is solved from
/// `g_s h_s ≡ −Σ h_j g_j (mod N)`.
pub fn for_each_dual_point<F: FnMut(&[i64])>(g: &GeneratingVector, n_points: u64, s: usize, radius: u64, mut f: F) -> Result<()> {
    check_dual_args(g, n_points, s, radius)?;
    let n = n_points as i128;
    let h_max = radius as i64;
    let gs = g.components()[s - 1] % n_points;
    let d = gcd(gs, n_points);
    let step = (n_points / d) as i64;
    let inv = if step == 1 { 0 } else { mod_inverse(gs / d, n_points / d) };
    let mut h = vec![-h_max; s];
    if s == 1 {
        h[0] = 0;
    }
    loop {
        let prefix: i128 = (0..s - 1).map(|j| h[j] as i128 * g.components()[j] as i128).sum();
        let c = (-prefix).rem_euclid(n) as u64;
        if c.is_multiple_of(d) {
            let base = if step == 1 { 0 } else { ((c / d) as u128 * inv as u128 % step as u128) as i64 };
            let mut last = -h_max + (base + h_max).rem_euclid(step);
            let prefix_zero = h[..s - 1].iter().all(|&v| v == 0);
            while last <= h_max {
                if !(prefix_zero && last == 0) {
                    h[s - 1] = last;
                    f(&h);
                }
                last += step;
            }
        }
        // odometer over the first s − 1 coordinates
        let mut j = s - 1;
        loop {
            if j == 0 {
                return Ok(());
            }
            j -= 1;
            if h[j] < h_max {
                h[j] += 1;
                break;
            }
            h[j] = -h_max;
        }
    }
}

/// Nonzero dual-lattice points inside an `ℓ∞` ball.
#[derive(Debug, Clone, PartialEq)]
pub struct DualLatticeSlice {
    pub g: Vec<u64>,
    pub n_points: u64,
    pub radius: u64,
    pub points: Vec<MultiIndex>,
}

/// All nonzero `h` with `‖h‖∞ ≤ H` and `Σ h_j g_j ≡ 0 (mod N)`.
pub fn enumerate_dual_lattice(g: &GeneratingVector, n_points: u64, s: usize, radius: u64) -> Result<DualLatticeSlice> {
    let mut points = Vec::new();
    for_each_dual_point(g, n_points, s, radius, |h| points.push(MultiIndex(h.to_vec())))?;
    Ok(DualLatticeSlice { g: g.components()[..s].to_vec(), n_points, radius, points })
}

/// `Σ_{0≠h∈L⊥, ‖h‖∞≤H} r_{α,γ}(h)` without storing the points.
pub fn dual_r_sum(g: &GeneratingVector, n_points: u64, params: &SmoothnessParams, radius: u64) -> Result<f64> {
    let s = params.dim();
    check_dual_args(g, n_points, s, radius)?;
    let tables: Vec<Vec<f64>> =
        params.gamma.iter().map(|&gm| (0..=radius).map(|k| r_unchecked(params.alpha, gm, k)).collect()).collect();
    let mut acc = NeumaierSum::new();
    for_each_dual_point(g, n_points, s, radius, |h| {
        acc.add(h.iter().enumerate().map(|(j, &v)| tables[j][v.unsigned_abs() as usize]).product());
    })?;
    Ok(acc.value())
}

/// Integral-test estimate of the dual-sum mass beyond `‖h‖∞ = H`:
/// `(1/N)[Π_j(1 + 2γ_j(S_H + T_H)) − Π_j(1 + 2γ_j S_H)]`, with
/// `S_H = Σ_{k≤H} k^{−2α}` and `T_H = H^{1−2α}/(2α−1)`.
///
/// A lattice rule sees about a `1/N` share of all frequencies, which is what
/// the prefactor models. This is an estimate, not a bound.
pub fn dual_tail_estimate(n_points: u64, params: &SmoothnessParams, radius: u64) -> f64 {
    let a2 = 2.0 * params.alpha;
    let s_h: f64 = (1..=radius).map(|k| libm::pow(k as f64, -a2)).collect::<NeumaierSum>().value();
    let t_h = libm::pow(radius as f64, 1.0 - a2) / (a2 - 1.0);
    let with: f64 = params.gamma.iter().map(|g| 1.0 + 2.0 * g * (s_h + t_h)).product();
    let without: f64 = params.gamma.iter().map(|g| 1.0 + 2.0 * g * s_h).product();
    (with - without) / n_points as f64
}

/// Pieces of the worst-case integration bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// `(dual_sum)^{1/2} (Π_j C_j)^{1/2} ‖f‖`.
    pub bound: f64,
    /// Same with the tail estimate added to the dual sum.
    pub bound_with_tail: f64,
    pub dual_sum: f64,
    pub tail_estimate: f64,
    pub radius: u64,
    /// `Π_j C_j`.
    pub constant: f64,
}

/// Largest share of the dual sum the tail estimate may take.
pub const TAIL_LIMIT: f64 = 0.01;

/// Worst-case bound for a lattice rule under a measure with cosine-transform
/// decay `(β, ρ)`, given a (truncated) norm `‖f‖`.
///
/// The dual sum is truncated at `‖h‖∞ ≤ H`. If the slice is nonempty and the
/// tail estimate exceeds 1% of it, [`Error::RadiusTooSmall`] is returned. An
/// empty slice gives `bound = 0` with the tail still reported.
pub fn theorem1_bound(g: &GeneratingVector, n_points: u64, params: &SmoothnessParams, radius: u64, norm_f: f64) -> Result<BoundReport> {
    params.check_bound_regime()?;
    if !(norm_f >= 0.0) {
        return Err(invalid("the norm of f must be nonnegative"));
    }
    let mut constant = 1.0;
    for (&gm, &rh) in params.gamma.iter().zip(&params.rho) {
        constant *= constant_cj(params.alpha, params.beta, gm, rh)?;
    }
    let dual_sum = dual_r_sum(g, n_points, params, radius)?;
    let tail_estimate = dual_tail_estimate(n_points, params, radius);
    if dual_sum > 0.0 && tail_estimate > TAIL_LIMIT * dual_sum {
        return Err(Error::RadiusTooSmall { radius, tail: tail_estimate, limit: TAIL_LIMIT * dual_sum });
    }
    let scale = libm::sqrt(constant) * norm_f;
    Ok(BoundReport {
        bound: libm::sqrt(dual_sum) * scale,
        bound_with_tail: libm::sqrt(dual_sum + tail_estimate) * scale,
        dual_sum,
        tail_estimate,
        radius,
        constant,
    })
}

/// [`theorem1_bound`] with `H` doubled from `start` until the tail is small
/// enough or `H` would pass `max_radius`.
pub fn theorem1_bound_auto(
    g: &GeneratingVector,
    n_points: u64,
    params: &SmoothnessParams,
    norm_f: f64,
    start: u64,
    max_radius: u64,
) -> Result<BoundReport> {
    let mut radius = start.max(1);
    loop {
        match theorem1_bound(g, n_points, params, radius, norm_f) {
            Err(Error::RadiusTooSmall { .. }) if radius * 2 <= max_radius => radius *= 2,
            other => return other,
        }
    }
}

/// Third term of the total error bound: the cost of truncating the kernel at
/// `|k|₁ ≤ K`,
/// `avg · 2^s/(s−1)! · (1 + (2s−1)/K)^{s−1} · Π_j max(1, √ρ_j) · |K − s|^{−(β−s)}`.
pub fn truncation_tail_bound(s: usize, radius: u64, beta: f64, rho: &[f64], avg_abs_f: f64) -> Result<f64> {
    check_dim(s, rho.len())?;
    if s == 0 {
        return Err(invalid("s must be at least 1"));
    }
    if radius <= s as u64 {
        return Err(invalid(format!("K = {radius} must exceed s = {s}")));
    }
    if !(beta > s as f64) {
        return Err(invalid(format!("beta = {beta} must exceed s = {s}")));
    }
    let sf = s as f64;
    let k = radius as f64;
    let fact: f64 = (1..s).map(|i| i as f64).product();
    let rho_factor: f64 = rho.iter().map(|&r| libm::sqrt(r).max(1.0)).product();
    Ok(avg_abs_f * libm::pow(2.0, sf) / fact
        * libm::pow(1.0 + (2.0 * sf - 1.0) / k, sf - 1.0)
        * rho_factor
        * libm::pow(k - sf, -(beta - sf)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn gv(c: &[u64], n_max: u64) -> GeneratingVector {
        GeneratingVector::new(c.to_vec(), n_max).unwrap()
    }

    #[test]
    fn zeta_values() {
        assert!((riemann_zeta(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-14);
        assert!((riemann_zeta(4.0).unwrap() - libm::pow(PI, 4.0) / 90.0).abs() < 1e-14);
        assert!((riemann_zeta(6.0).unwrap() - libm::pow(PI, 6.0) / 945.0).abs() < 1e-14);
        assert!((riemann_zeta(6.0).unwrap() - 1.017343).abs() < 1e-6);
        // partial sum plus integral tail as an independent check
        for x in [1.5, 3.3] {
            let n = 1_000_000u64;
            let direct: NeumaierSum = (1..=n).map(|k| libm::pow(k as f64, -x)).collect();
            let tail = libm::pow(n as f64, 1.0 - x) / (x - 1.0) - 0.5 * libm::pow(n as f64, -x);
            assert!((riemann_zeta(x).unwrap() - (direct.value() + tail)).abs() < 1e-12);
        }
        assert!((riemann_zeta(1.01).unwrap() - 100.57794333).abs() < 1e-7);
        assert!(riemann_zeta(1.0).is_err());
        assert!((riemann_zeta(60.0).unwrap() - 1.0).abs() < 1e-17);
    }

    #[test]
    fn cj_values() {
        let c = constant_cj(1.0, 2.0, 1.0, 1.0).unwrap();
        let z2 = PI * PI / 6.0;
        let want = 1.0 + z2 + libm::pow(PI, 4.0) / 90.0 + 1.0 + 4.0 * z2;
        assert!((c - want).abs() < 1e-12);
        assert!((c - 11.30699).abs() < 1e-5);
        assert_eq!(constant_cj(1.0, 2.0, 1.0, 0.0).unwrap(), 1.0);
        let mut prev = 0.0;
        for i in 0..20 {
            let v = constant_cj(1.0, 2.0, 0.7, i as f64 * 0.1).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        assert!(constant_cj(0.5, 2.0, 1.0, 1.0).is_err());
        assert!(constant_cj(1.0, 1.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn cj_dominates_convolution() {
        let c = constant_cj(1.0, 2.0, 1.0, 1.0).unwrap();
        for h in -5i64..=5 {
            let ij = convolution_factor(1.0, 2.0, 1.0, 1.0, h, 100_000);
            let r = r_unchecked(1.0, 1.0, h.unsigned_abs());
            assert!(ij / r <= c, "h={h}: {}", ij / r);
        }
    }

    #[test]
    fn dual_examples() {
        let d = enumerate_dual_lattice(&gv(&[1, 1], 4), 2, 2, 1).unwrap();
        let pts: Vec<Vec<i64>> = d.points.iter().map(|p| p.0.clone()).collect();
        assert_eq!(pts, vec![vec![-1, -1], vec![-1, 1], vec![1, -1], vec![1, 1]]);
        let d = enumerate_dual_lattice(&gv(&[1], 8), 4, 1, 8).unwrap();
        let pts: Vec<i64> = d.points.iter().map(|p| p.0[0]).collect();
        assert_eq!(pts, vec![-8, -4, 4, 8]);
        let g = gv(&[3, 5, 7], 64);
        let d = enumerate_dual_lattice(&g, 13, 3, 13).unwrap();
        assert!(d.points.contains(&MultiIndex(vec![13, 0, 0])));
        assert!(enumerate_dual_lattice(&g, 13, 3, 0).is_err());
    }

    #[test]
    fn dual_matches_box_scan() {
        let gens: [&[u64]; 4] = [&[1, 3, 5], &[2, 6, 4], &[1, 1, 1], &[5, 7, 11]];
        for comps in gens {
            let g = gv(comps, 64);
            for s in 1..=3usize {
                for n_points in 1..=16u64 {
                    for radius in 1..=6u64 {
                        let got = enumerate_dual_lattice(&g, n_points, s, radius).unwrap();
                        let r = radius as i64;
                        let side = 2 * r + 1;
                        let mut scan = Vec::new();
                        for code in 0..side.pow(s as u32) {
                            let mut c = code;
                            let mut h = vec![0i64; s];
                            for j in (0..s).rev() {
                                h[j] = c % side - r;
                                c /= side;
                            }
                            let dot: i64 = h.iter().zip(comps).map(|(a, &b)| a * b as i64).sum();
                            if h.iter().any(|&v| v != 0) && dot.rem_euclid(n_points as i64) == 0 {
                                scan.push(MultiIndex(h));
                            }
                        }
                        assert_eq!(got.points, scan, "g={comps:?} s={s} N={n_points} H={radius}");
                    }
                }
            }
        }
    }

    #[test]
    fn dual_sum_of_multiples() {
        let p = SmoothnessParams::uniform(1, 1.0, 1.0, 2.0, 1.0).unwrap();
        let got = dual_r_sum(&gv(&[1], 4), 4, &p, 100).unwrap();
        let want: f64 = (1..=25).map(|m| 2.0 / (16.0 * (m * m) as f64)).sum();
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn empty_slice_reports_tail() {
        let p = SmoothnessParams::uniform(2, 1.0, 1.0, 3.0, 1.0).unwrap();
        let g = gv(&[1, 1000], 1 << 20);
        let r = theorem1_bound(&g, 1_000_003, &p, 2, 1.0).unwrap();
        assert_eq!(r.bound, 0.0);
        assert_eq!(r.dual_sum, 0.0);
        assert!(r.tail_estimate > 0.0 && r.bound_with_tail > 0.0);
    }

    #[test]
    fn small_radius_is_rejected_then_grown() {
        let p = SmoothnessParams::uniform(2, 1.0, 1.0, 3.0, 1.0).unwrap();
        let g = gv(&[1, 19], 64);
        assert!(matches!(theorem1_bound(&g, 64, &p, 70, 1.0), Err(Error::RadiusTooSmall { .. })));
        let r = theorem1_bound_auto(&g, 64, &p, 1.0, 64, 1 << 16).unwrap();
        assert!(r.tail_estimate <= TAIL_LIMIT * r.dual_sum);
        // the truncated sum only grows with H
        let a = dual_r_sum(&g, 64, &p, 100).unwrap();
        let b = dual_r_sum(&g, 64, &p, 200).unwrap();
        assert!(b >= a);
    }

    #[test]
    fn truncation_tail_examples() {
        let v = truncation_tail_bound(1, 100, 2.0, &[1.0], 1.0).unwrap();
        assert!((v - 2.0 / 99.0).abs() < 1e-15);
        let v = truncation_tail_bound(2, 64, 3.0, &[1.0, 1.0], 1.0).unwrap();
        assert!((v - 4.0 * (1.0 + 3.0 / 64.0) / 62.0).abs() < 1e-15);
        assert!((v - 0.067540).abs() < 1e-6);
        let a = truncation_tail_bound(2, 4096, 3.5, &[1.0, 1.0], 1.0).unwrap();
        let b = truncation_tail_bound(2, 8192, 3.5, &[1.0, 1.0], 1.0).unwrap();
        assert!((b / a - libm::pow(2.0, -1.5)).abs() < 1e-3);
        assert!(truncation_tail_bound(2, 2, 3.0, &[1.0, 1.0], 1.0).is_err());
        assert!(truncation_tail_bound(2, 8, 2.0, &[1.0, 1.0], 1.0).is_err());
    }
}
