//! The experiment drivers behind the CLI.

use std::fmt::Write as _;
use std::time::Instant;

use coslat_core::bounds::{theorem1_bound_auto, truncation_tail_bound};
use coslat_core::cosine_space::{cos_space_norm_sq, eval_half_period_expansion, CosineCoefficients, SmoothnessParams};
use coslat_core::integrator::{MeasureSpectrum, WeightTable};
use coslat_core::linalg::Matrix;
use coslat_core::lattice::{Domain, GeneratingVector};
use coslat_core::measures::{decay_bound_check, MeasureSpec};
use coslat_core::quadrature::{integrate_box, GaussLegendre};
use coslat_core::testlab::{
    brute_force_expectation, normal_reference, truncated_expansion_expectation, uniform_box, uniform_reference, TestFunction,
};
use coslat_core::wavelet::wavelet_expectation_2d;

use crate::cache::WeightCache;
use crate::config::{default_radius, Experiment, ExperimentConfig};
use crate::error::Result;
use crate::parallel::{approximate_expectation_par, build_weight_table_par, qmc_uniform_par};
use crate::report::ResultRow;

/// Variance of each coordinate in the default normal law.
pub const NORMAL_VARIANCE: f64 = 0.25;

#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    /// Text report (diagnostics only).
    pub report: Option<String>,
    /// Warnings for stderr.
    pub notes: Vec<String>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let cache = cfg.cache_dir.as_ref().map(WeightCache::new).transpose()?;
    let cache = cache.as_ref();
    match cfg.experiment {
        Experiment::Uniform => Ok(RunOutput { rows: run_uniform(cfg)?, ..Default::default() }),
        Experiment::Normal | Experiment::DomainSweep | Experiment::KernelSweep => run_normal(cfg, cache),
        Experiment::LaplaceCompare => Ok(RunOutput { rows: run_laplace_compare(cfg, cache)?, ..Default::default() }),
        Experiment::Diagnostics => Ok(RunOutput { report: Some(run_diagnostics(cfg)?), ..Default::default() }),
    }
}

/// Lebesgue-scaled tent lattice rule for F1 on `[0,1]×[−1,1]×…`.
pub fn run_uniform(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for &s in &cfg.dims {
        let g = cfg.vector.truncated(s)?;
        let tf = TestFunction::f1(s, cfg.w)?;
        let domain = uniform_box(s)?;
        let reference = uniform_reference(s, cfg.w);
        for n in cfg.schedule() {
            let t = Instant::now();
            let approx = qmc_uniform_par(|y| tf.eval_unchecked(y), &g, n, &domain, true)?;
            rows.push(ResultRow {
                experiment: "uniform".into(),
                s,
                n_points: n,
                radius: None,
                width: None,
                approx,
                reference,
                seconds: t.elapsed().as_secs_f64(),
            });
        }
    }
    Ok(rows)
}

/// The measure of the normal experiments: the configured one or
/// `N(0, 0.25·I)`.
pub fn normal_measure(cfg: &ExperimentConfig, s: usize) -> Result<MeasureSpec> {
    match &cfg.measure {
        Some(m) => Ok(m.clone()),
        None => Ok(MeasureSpec::normal(vec![0.0; s], Matrix::diagonal(&vec![NORMAL_VARIANCE; s]))?),
    }
}

/// `E[f]` over all of `R^s`: closed form for the default law, otherwise a
/// tensor rule on a box wide enough to hold the mass.
fn normal_family_reference(cfg: &ExperimentConfig, tf: &TestFunction, m: &MeasureSpec, s: usize) -> Result<f64> {
    if cfg.measure.is_none() {
        return Ok(normal_reference(s, cfg.w, NORMAL_VARIANCE));
    }
    let mean = m.mean();
    let cov = m.covariance();
    let half: Vec<f64> = (0..s).map(|j| 12.0 * cov.get(j, j).sqrt()).collect();
    let wide = Domain::new((0..s).map(|j| mean[j] - half[j]).collect(), (0..s).map(|j| mean[j] + half[j]).collect())?;
    Ok(brute_force_expectation(tf, m, &wide, 128)?.value)
}

/// Normal runs and the domain and kernel sweeps: every combination of
/// `s`, `L` and `K`, over the whole `N` schedule.
pub fn run_normal(cfg: &ExperimentConfig, cache: Option<&WeightCache>) -> Result<RunOutput> {
    let label = cfg.experiment.name();
    let mut out = RunOutput::default();
    for &s in &cfg.dims {
        let g = cfg.vector.truncated(s)?;
        let tf = TestFunction::f1(s, cfg.w)?;
        let m = normal_measure(cfg, s)?;
        let reference = normal_family_reference(cfg, &tf, &m, s)?;
        let radii = cfg.radii.clone().unwrap_or_else(|| vec![default_radius(s)]);
        let domains: Vec<(Option<f64>, Domain)> = match &cfg.domain {
            Some(d) => vec![(None, d.clone())],
            None => cfg.widths.iter().map(|&l| Ok((Some(l), Domain::centered(s, l)?))).collect::<Result<_>>()?,
        };
        for (width, domain) in &domains {
            for &radius in &radii {
                if cfg.radii.is_none() && radius < default_radius(2) {
                    let bias = truncated_expansion_expectation(&tf, &m, domain, radius, 4 * radius as usize + 256)? - reference;
                    out.notes.push(format!(
                        "warning: s = {s} runs at reduced K = {radius}; the K-truncated expansion differs from the reference by {bias:.3e}"
                    ));
                }
                let series = lattice_series(&g, &tf, &m, domain, radius, cfg, cache)?;
                for (n, approx, seconds) in series {
                    out.rows.push(ResultRow {
                        experiment: label.into(),
                        s,
                        n_points: n,
                        radius: Some(radius),
                        width: *width,
                        approx,
                        reference,
                        seconds,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Builds (or loads) the table at the largest `N` once and restricts it to
/// the smaller lattices. The build time is charged to the largest `N`.
fn lattice_series(
    g: &GeneratingVector,
    tf: &TestFunction,
    m: &MeasureSpec,
    domain: &Domain,
    radius: u64,
    cfg: &ExperimentConfig,
    cache: Option<&WeightCache>,
) -> Result<Vec<(u64, f64, f64)>> {
    let n_top = cfg.schedule().last().expect("validated schedule");
    let t = Instant::now();
    let sp = MeasureSpectrum::new(m, domain, radius)?;
    let full = match cache {
        Some(c) => c.get_or_build(&sp, g, n_top)?,
        None => build_weight_table_par(&sp, g, n_top)?,
    };
    let build = t.elapsed().as_secs_f64();
    cfg.schedule()
        .map(|n| {
            let t = Instant::now();
            let table: WeightTable = if n == n_top { full.clone() } else { full.restrict(n)? };
            let approx = approximate_expectation_par(|y| tf.eval_unchecked(y), &table, g, domain)?;
            let extra = if n == n_top { build } else { 0.0 };
            Ok((n, approx, t.elapsed().as_secs_f64() + extra))
        })
        .collect()
}

/// Default two-dimensional asymmetric Laplace law.
pub fn laplace_measure() -> MeasureSpec {
    let sigma = Matrix::from_rows(&[vec![0.25, -0.15], vec![-0.15, 0.75]]).expect("square");
    MeasureSpec::asymmetric_laplace(vec![0.3, -0.1], sigma).expect("positive definite")
}

/// `[μ̄_j − 20Σ_jj, μ̄_j + 20Σ_jj]` per dimension (`Σ` the scale matrix for
/// the Laplace law, the covariance for the normal law).
pub fn laplace_box(m: &MeasureSpec) -> Result<Domain> {
    let (center, scale) = match m {
        MeasureSpec::AsymmetricLaplace { mu_bar, sigma } => (mu_bar.clone(), sigma.clone()),
        MeasureSpec::Normal { mean, cov } => (mean.clone(), cov.clone()),
        MeasureSpec::UniformOnBox(d) => return Ok(d.clone()),
    };
    let s = center.len();
    Ok(Domain::new(
        (0..s).map(|j| center[j] - 20.0 * scale.get(j, j)).collect(),
        (0..s).map(|j| center[j] + 20.0 * scale.get(j, j)).collect(),
    )?)
}

/// `N′ = ⌈√N⌉`.
pub fn wavelet_size(n_points: u64) -> usize {
    let mut r = (n_points as f64).sqrt() as u64;
    while r * r < n_points {
        r += 1;
    }
    while r > 1 && (r - 1) * (r - 1) >= n_points {
        r -= 1;
    }
    r as usize
}

/// Lattice scheme and 2D wavelet scheme for `E[Y₁Y₂]`, one pair of rows per
/// `N`. Wavelet rows use `N′ = ⌈√N⌉` per dimension and report `K = N′ − 1`.
pub fn run_laplace_compare(cfg: &ExperimentConfig, cache: Option<&WeightCache>) -> Result<Vec<ResultRow>> {
    let s = 2;
    let g = cfg.vector.truncated(s)?;
    let m = cfg.measure.clone().unwrap_or_else(laplace_measure);
    let domain = match &cfg.domain {
        Some(d) => d.clone(),
        None => laplace_box(&m)?,
    };
    let tf = TestFunction::Bilinear;
    let reference = brute_force_expectation(&tf, &m, &domain, 128)?.value;
    let radius = cfg.radii.as_ref().map_or(64, |r| r[0]);
    let lattice = lattice_series(&g, &tf, &m, &domain, radius, cfg, cache)?;
    let mut rows = Vec::new();
    for (n, approx, seconds) in lattice {
        rows.push(ResultRow {
            experiment: "laplace-lattice".into(),
            s,
            n_points: n,
            radius: Some(radius),
            width: None,
            approx,
            reference,
            seconds,
        });
        let n_prime = wavelet_size(n);
        let t = Instant::now();
        let approx = wavelet_expectation_2d(|y| y[0] * y[1], &m, &domain, n_prime)?;
        rows.push(ResultRow {
            experiment: "laplace-wavelet".into(),
            s,
            n_points: n,
            radius: Some(n_prime as u64 - 1),
            width: None,
            approx,
            reference,
            seconds: t.elapsed().as_secs_f64(),
        });
    }
    Ok(rows)
}

/// Cosine polynomial with `|k|₁ ≤ 4` and coefficients `(−1)^{|k|₁}/(1+|k|₁)²`.
pub fn diagnostic_polynomial(domain: Domain) -> CosineCoefficients {
    CosineCoefficients::from_fn(domain, 4, |k| {
        let l1: u64 = k.iter().sum();
        let sign = if l1.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign / ((1 + l1) * (1 + l1)) as f64
    })
}

/// Bound checks, decay fit and tail estimates as a text report.
pub fn run_diagnostics(cfg: &ExperimentConfig) -> Result<String> {
    let mut out = String::new();
    let s = 2;
    let g = cfg.vector.truncated(s)?;

    let domain = Domain::new(vec![-1.0, 0.0], vec![2.0, 1.0])?;
    let coeffs = diagnostic_polynomial(domain.clone());
    let params = SmoothnessParams::uniform(s, 1.0, 1.0, 3.0, 1.0)?;
    let norm = cos_space_norm_sq(&coeffs, &params)?.sqrt();
    let exact = coeffs.get(&vec![0i64; s].into()).unwrap_or(0.0);
    let uniform = MeasureSpec::uniform(domain.clone());
    let _ = writeln!(out, "[bound] uniform law on {}, cosine polynomial |k|_1 <= 4, alpha=1 gamma=1 beta=3 rho=1", fmt_box(&domain));
    let _ = writeln!(out, "[bound] norm_f = {norm:.6e} (exact norm of the polynomial)");
    let _ = writeln!(out, "N,H,measured,bound,dual_sum,tail_estimate,holds");
    let mut all_hold = true;
    for n in cfg.schedule() {
        let sp = MeasureSpectrum::new(&uniform, &domain, 8)?;
        let table = build_weight_table_par(&sp, &g, n)?;
        let approx = approximate_expectation_par(|y| eval_half_period_expansion(&coeffs, y).unwrap_or(f64::NAN), &table, &g, &domain)?;
        let measured = (approx - exact).abs();
        let rep = theorem1_bound_auto(&g, n, &params, norm, 8, 1 << 12)?;
        let holds = measured <= rep.bound;
        all_hold &= holds;
        let _ = writeln!(
            out,
            "{n},{},{measured:.6e},{:.6e},{:.6e},{:.6e},{holds}",
            rep.radius, rep.bound, rep.dual_sum, rep.tail_estimate
        );
    }
    let _ = writeln!(out, "[bound] measured error <= bound for every N: {all_hold}");

    let m = laplace_measure();
    let lbox = laplace_box(&m)?;
    let lparams = SmoothnessParams::uniform(s, 1.0, 1.0, 2.0, 1.0)?;
    let decay = decay_bound_check(&m, &lbox, &lparams, 128)?;
    let fitted = decay.fitted_beta.unwrap_or(f64::NAN);
    let _ = writeln!(out, "[decay] Laplace law on {}, |k|_1 <= 128", fmt_box(&lbox));
    let _ = writeln!(out, "[decay] fitted beta = {fitted:.4}");
    let _ = writeln!(out, "[decay] beta close to 2: {}", (fitted - 2.0).abs() < 0.25);
    let _ = writeln!(out, "[decay] envelope beta=2 rho=1 satisfied: {}", decay.satisfied);
    let _ = writeln!(out, "[decay] largest beta at rho=1: {:.4}", decay.max_beta);
    let _ = writeln!(out, "[decay] smallest rho at beta=2: {:.4e}", decay.min_rho);

    let nbox = Domain::centered(s, 9.0)?;
    let tf = TestFunction::f1(s, 0.9)?;
    let rule = GaussLegendre::new(64)?;
    let nparams = SmoothnessParams::uniform(s, 1.0, 1.0, 3.0, 1.0)?;
    let ndecay = decay_bound_check(&normal_measure(cfg, s)?, &nbox, &nparams, 128)?;
    let rho = ndecay.min_rho;
    let _ = writeln!(out, "[truncation] normal law on {}, beta=3: smallest rho on |k|_1 <= 128 is {rho:.4e}", fmt_box(&nbox));
    let avg = integrate_box(&rule, nbox.lower(), nbox.upper(), |y| tf.eval_unchecked(y).abs()) / nbox.volume();
    for radius in [64u64, 128, 256] {
        let tail = truncation_tail_bound(s, radius, 3.0, &[rho, rho], avg)?;
        let _ = writeln!(out, "[truncation] K={radius}: tail bound {tail:.6e} (avg |f| = {avg:.6e})");
    }
    Ok(out)
}

fn fmt_box(d: &Domain) -> String {
    let parts: Vec<String> = d.lower().iter().zip(d.upper()).map(|(a, b)| format!("[{a}, {b}]")).collect();
    parts.join(" x ")
}
