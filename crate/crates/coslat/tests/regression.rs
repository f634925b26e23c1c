//! Published convergence-table values that do not depend on the generating
//! vector, plus qualitative trends of the experiment drivers.

use coslat::config::{Experiment, ExperimentConfig, FileConfig, Flags};
use coslat::experiments::{run_laplace_compare, run_normal, run_uniform};
use coslat::report::ResultRow;

fn rows(flags: Flags) -> Vec<ResultRow> {
    let cfg = ExperimentConfig::resolve(&flags, FileConfig::default()).unwrap();
    match cfg.experiment {
        Experiment::Uniform => run_uniform(&cfg).unwrap(),
        Experiment::LaplaceCompare => run_laplace_compare(&cfg, None).unwrap(),
        _ => run_normal(&cfg, None).unwrap().rows,
    }
}

fn sweep(experiment: Experiment, k: &[u64], l: &[f64], n: (u32, u32)) -> Flags {
    Flags {
        experiment: Some(experiment),
        k: Some(k.to_vec()),
        l: Some(l.to_vec()),
        n_min_log2: Some(n.0),
        n_max_log2: Some(n.1),
        ..Flags::default()
    }
}

#[test]
fn narrow_box_plateaus_appear_early() {
    // L=1 and L=3 rows settle from N=2^6 and N=2^10 on
    for r in rows(sweep(Experiment::DomainSweep, &[128], &[1.0], (6, 10))) {
        assert!((r.abs_error() / 9.486e-1 - 1.0).abs() < 0.01, "{r:?}");
    }
    for r in rows(sweep(Experiment::DomainSweep, &[128], &[3.0], (10, 12))) {
        assert!((r.abs_error() / 9.201e-2 - 1.0).abs() < 0.01, "{r:?}");
    }
}

#[test]
fn coarse_kernel_plateau() {
    let r = rows(sweep(Experiment::KernelSweep, &[8], &[9.0], (15, 16)));
    for r in r {
        assert!((r.abs_error() / 1.037e6 - 1.0).abs() < 0.01, "{r:?}");
    }
}

#[test]
fn wide_box_plateau_is_stable() {
    let r = rows(Flags { s: Some(vec![2]), ..sweep(Experiment::Normal, &[128], &[9.0], (12, 14)) });
    let errs: Vec<f64> = r.iter().map(ResultRow::abs_error).collect();
    assert!(errs.iter().all(|&e| e < 5e-9), "{errs:?}");
    let (lo, hi) = errs.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &e| (a.min(e), b.max(e)));
    assert!(hi <= 2.0 * lo);
}

#[test]
fn wavelet_wins_at_small_n() {
    let r = rows(Flags {
        experiment: Some(Experiment::LaplaceCompare),
        n_min_log2: Some(6),
        n_max_log2: Some(12),
        ..Flags::default()
    });
    let lattice: Vec<&ResultRow> = r.iter().filter(|r| r.experiment == "laplace-lattice").collect();
    let wavelet: Vec<&ResultRow> = r.iter().filter(|r| r.experiment == "laplace-wavelet").collect();
    assert_eq!(lattice.len(), wavelet.len());
    let wins = lattice.iter().zip(&wavelet).filter(|(l, w)| w.abs_error() <= l.abs_error()).count();
    assert!(2 * wins >= lattice.len());
    assert!(r.iter().all(|r| r.reference == -0.21));
}

#[test]
fn paired_dimensions_end_at_the_same_order() {
    let r = rows(Flags {
        experiment: Some(Experiment::Uniform),
        s: Some(vec![4, 5]),
        n_min_log2: Some(16),
        n_max_log2: Some(16),
        ..Flags::default()
    });
    let (e4, e5) = (r[0].abs_error(), r[1].abs_error());
    assert!(e4 <= 1e-3 && e5 <= 1e-3);
    assert!(e4 / e5 < 10.0 && e5 / e4 < 10.0, "{e4} {e5}");
}

#[test]
fn one_dimensional_uniform_errors_trend_down() {
    let r = rows(Flags {
        experiment: Some(Experiment::Uniform),
        s: Some(vec![1]),
        n_min_log2: Some(2),
        n_max_log2: Some(10),
        ..Flags::default()
    });
    let first = r.first().unwrap().abs_error();
    let last = r.last().unwrap().abs_error();
    assert!(last < 1e-3 * first.max(1e-12) || last < 1e-12);
}
