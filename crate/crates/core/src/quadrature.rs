//! Gauss–Legendre rules and their tensor products.
//!
//! Used by the oracle-grade routines (cosine coefficients, brute-force
//! expectations), never by the lattice scheme itself.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::sum::NeumaierSum;

/// An n-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on `P_n` from Tricomi's
    /// initial guesses. Accurate to a few ulps for any practical `n`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("Gauss-Legendre rule needs at least one node"));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // i-th largest root
            let theta = PI * (4.0 * i as f64 + 3.0) / (4.0 * nf + 2.0);
            let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * libm::cos(theta);
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[lo, hi]`.
    pub fn on_interval(&self, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let x = self.nodes.iter().map(|t| mid + half * t).collect();
        let w = self.weights.iter().map(|w| half * w).collect();
        (x, w)
    }

    /// `∫_lo^hi f(x) dx`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        let (x, w) = self.on_interval(lo, hi);
        x.iter().zip(&w).map(|(&x, &w)| w * f(x)).collect::<NeumaierSum>().value()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Tensor-product Gauss–Legendre rule over a box.
///
/// Calls `f(point, weight)` once per tensor node in odometer order (last
/// coordinate fastest).
pub fn for_each_tensor_node<F>(rule: &GaussLegendre, lower: &[f64], upper: &[f64], mut f: F)
where
    F: FnMut(&[f64], f64),
{
    let s = lower.len();
    let axes: Vec<(Vec<f64>, Vec<f64>)> =
        (0..s).map(|j| rule.on_interval(lower[j], upper[j])).collect();
    let n = rule.len();
    let mut idx = vec![0usize; s];
    let mut point = vec![0.0; s];
    loop {
        let mut w = 1.0;
        for j in 0..s {
            point[j] = axes[j].0[idx[j]];
            w *= axes[j].1[idx[j]];
        }
        f(&point, w);
        // advance the odometer
        let mut j = s;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < n {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// `∫_box f` by tensor Gauss–Legendre with compensated accumulation.
pub fn integrate_box<F>(rule: &GaussLegendre, lower: &[f64], upper: &[f64], mut f: F) -> f64
where
    F: FnMut(&[f64]) -> f64,
{
    let mut acc = NeumaierSum::new();
    for_each_tensor_node(rule, lower, upper, |p, w| acc.add(w * f(p)));
    acc.value()
}
