//! Test integrands, closed-form references and quadrature oracles.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use crate::cosine_space::{cosine_coefficients_1d, for_each_nonnegative, Truncation};
use crate::error::{check_dim, invalid, Error, Result};
use crate::lattice::Domain;
use crate::measures::{cos_transform_unchecked, normal_outside_mass, DensityEval, MeasureSpec};
use crate::quadrature::{for_each_tensor_node, GaussLegendre};
use crate::sum::NeumaierSum;

/// Integrands used by the experiments and tests. All of them are products
/// of one-dimensional factors.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// `Π_{j=1}^s (1 + (w^j/21)(−10 + 42y_j² − 42y_j⁵ + 21y_j⁶))`.
    F1 { s: usize, w: f64 },
    /// `y₁ y₂`.
    Bilinear,
    ConstantOne,
    /// `Π_j cos(π m_j (y_j − a_j)/(b_j − a_j))`.
    CosineMode { m: Vec<u64>, domain: Domain },
}

impl TestFunction {
    pub fn f1(s: usize, w: f64) -> Result<Self> {
        if s == 0 {
            return Err(invalid("F1 needs s >= 1"));
        }
        if !(w > 0.0 && w <= 1.0) {
            return Err(invalid(format!("F1 needs 0 < w <= 1, got {w}")));
        }
        Ok(TestFunction::F1 { s, w })
    }

    /// Dimension the function requires, if fixed.
    pub fn dim(&self) -> Option<usize> {
        match self {
            TestFunction::F1 { s, .. } => Some(*s),
            TestFunction::Bilinear => Some(2),
            TestFunction::ConstantOne => None,
            TestFunction::CosineMode { m, .. } => Some(m.len()),
        }
    }

    fn check(&self, s: usize) -> Result<()> {
        match self.dim() {
            Some(d) => check_dim(d, s),
            None => Ok(()),
        }
    }

    /// The `j`-th one-dimensional factor (0-based).
    #[inline]
    pub fn factor(&self, j: usize, y: f64) -> f64 {
        match self {
            TestFunction::F1 { w, .. } => f1_factor(*w, j + 1, y),
            TestFunction::Bilinear => y,
            TestFunction::ConstantOne => 1.0,
            TestFunction::CosineMode { m, domain } => {
                libm::cos(PI * m[j] as f64 * (y - domain.lower()[j]) / domain.width(j))
            }
        }
    }

    /// Evaluates without a dimension check.
    #[inline]
    pub fn eval_unchecked(&self, y: &[f64]) -> f64 {
        y.iter().enumerate().map(|(j, &v)| self.factor(j, v)).product()
    }
}

/// `−10 + 42y² − 42y⁵ + 21y⁶` in Horner form.
#[inline]
fn f1_poly(y: f64) -> f64 {
    ((((((21.0 * y - 42.0) * y) * y) * y + 42.0) * y) * y) - 10.0
}

#[inline]
fn f1_factor(w: f64, j: usize, y: f64) -> f64 {
    1.0 + libm::pow(w, j as f64) / 21.0 * f1_poly(y)
}

pub fn eval_test_function(tf: &TestFunction, y: &[f64]) -> Result<f64> {
    tf.check(y.len())?;
    Ok(tf.eval_unchecked(y))
}

/// The alternating box `[0,1] × [−1,1] × [0,1] × …`.
pub fn uniform_box(s: usize) -> Result<Domain> {
    let lower = (1..=s).map(|j| if j % 2 == 0 { -1.0 } else { 0.0 }).collect();
    Domain::new(lower, vec![1.0; s])
}

/// `∫ F1` over the alternating box: `Π_{j even} (2 + (2/3)w^j)`; odd
/// dimensions integrate to 1.
pub fn uniform_reference(s: usize, w: f64) -> f64 {
    (1..=s).filter(|j| j % 2 == 0).map(|j| 2.0 + 2.0 / 3.0 * libm::pow(w, j as f64)).product()
}

/// `E[F1(Y)]` for `Y ~ N(0, v·I)`: `Π_j (1 + (w^j/21)(−10 + 42v + 315v³))`.
pub fn normal_reference(s: usize, w: f64, variance: f64) -> f64 {
    let moment = -10.0 + 42.0 * variance + 315.0 * variance * variance * variance;
    (1..=s).map(|j| 1.0 + libm::pow(w, j as f64) / 21.0 * moment).product()
}

/// An oracle value together with the measure mass it ignores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    /// Bound on the mass outside the box (zero for closed forms).
    pub outside_mass: f64,
}

/// Tensor Gauss–Legendre integral of `f · density` over the box, for
/// `s ≤ 3`. For the Laplace law only `y₁y₂` is supported, through its moment
/// `μ̄₁μ̄₂ + (Σ + μ̄μ̄ᵀ)₁₂`.
pub fn brute_force_expectation(tf: &TestFunction, m: &MeasureSpec, domain: &Domain, nodes: usize) -> Result<OracleValue> {
    let s = domain.dim();
    check_dim(s, m.dim())?;
    tf.check(s)?;
    if let MeasureSpec::AsymmetricLaplace { mu_bar, sigma } = m {
        return match tf {
            TestFunction::Bilinear => Ok(OracleValue {
                value: mu_bar[0] * mu_bar[1] + sigma.get(0, 1) + mu_bar[0] * mu_bar[1],
                outside_mass: 0.0,
            }),
            _ => Err(Error::Unsupported(format!("no Laplace oracle for {tf:?}"))),
        };
    }
    if s > 3 {
        return Err(Error::Unsupported(format!("tensor oracle limited to s <= 3, got {s}")));
    }
    if nodes < 2 {
        return Err(invalid("need at least two nodes per dimension"));
    }
    let rule = GaussLegendre::new(nodes)?;
    let dens = DensityEval::new(m)?;
    // the uniform density is discontinuous at its own edges; integrate over
    // the overlap so the rule only sees the smooth part
    let (lower, upper, outside_mass) = match m {
        MeasureSpec::UniformOnBox(b) => {
            let lo: Vec<f64> = (0..s).map(|j| domain.lower()[j].max(b.lower()[j])).collect();
            let hi: Vec<f64> = (0..s).map(|j| domain.upper()[j].min(b.upper()[j])).collect();
            if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
                return Ok(OracleValue { value: 0.0, outside_mass: 1.0 });
            }
            let inside: f64 = (0..s).map(|j| (hi[j] - lo[j]) / b.width(j)).product();
            (lo, hi, 1.0 - inside)
        }
        MeasureSpec::Normal { mean, cov } => {
            (domain.lower().to_vec(), domain.upper().to_vec(), normal_outside_mass(mean, cov, domain)?)
        }
        MeasureSpec::AsymmetricLaplace { .. } => unreachable!(),
    };
    let mut acc = NeumaierSum::new();
    for_each_tensor_node(&rule, &lower, &upper, |y, w| acc.add(w * tf.eval_unchecked(y) * dens.eval(y)));
    Ok(OracleValue { value: acc.value(), outside_mass })
}

/// `∫_D f(y) dy` by tensor Gauss–Legendre.
pub fn lebesgue_integral(tf: &TestFunction, domain: &Domain, nodes: usize) -> Result<f64> {
    tf.check(domain.dim())?;
    let rule = GaussLegendre::new(nodes)?;
    let mut acc = NeumaierSum::new();
    for_each_tensor_node(&rule, domain.lower(), domain.upper(), |y, w| acc.add(w * tf.eval_unchecked(y)));
    Ok(acc.value())
}

/// One-dimensional cosine coefficients of each factor of `tf` on the box,
/// up to frequency `max_k`.
pub fn separable_coefficients(tf: &TestFunction, domain: &Domain, max_k: u64, nodes: usize) -> Result<Vec<Vec<f64>>> {
    tf.check(domain.dim())?;
    let rule = GaussLegendre::new(nodes)?;
    (0..domain.dim())
        .map(|j| cosine_coefficients_1d(|y| tf.factor(j, y), domain.lower()[j], domain.upper()[j], max_k, &rule))
        .collect()
}

/// Expectation of the `ℓ1`-truncated cosine expansion of `f`:
/// `Σ_{|k|₁≤K} 2^{|k|₀/2} f̃(k) ct(k)`.
///
/// This is the value the lattice scheme converges to as `N → ∞`, so it
/// isolates the projection and truncation bias. `nodes` must comfortably
/// exceed `K` for the coefficients to be resolved.
pub fn truncated_expansion_expectation(
    tf: &TestFunction,
    m: &MeasureSpec,
    domain: &Domain,
    radius: u64,
    nodes: usize,
) -> Result<f64> {
    let s = domain.dim();
    check_dim(s, m.dim())?;
    let coeffs = separable_coefficients(tf, domain, radius, nodes)?;
    let mut acc = NeumaierSum::new();
    for_each_nonnegative(s, radius, Truncation::L1, |k| {
        let mut fk = 1.0;
        for (j, &kj) in k.iter().enumerate() {
            fk *= coeffs[j][kj as usize];
            if kj != 0 {
                fk *= SQRT_2;
            }
        }
        if fk != 0.0 {
            acc.add(fk * cos_transform_unchecked(m, k, domain));
        }
    });
    Ok(acc.value())
}
