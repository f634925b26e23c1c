//! Rayon drivers with the same reduction tree as the serial core routines,
//! so results do not depend on the thread count.

use rayon::prelude::*;

use coslat_core::integrator::{block_count, finish_blocks, lattice_block_sum, CosTable, MeasureSpectrum, WeightTable};
use coslat_core::lattice::{Domain, GeneratingVector};
use coslat_core::{Error, Result};

const WEIGHT_CHUNK: usize = 1024;

/// Parallel [`coslat_core::integrator::build_weight_table_from`]. Every slot
/// is computed independently, so the table is identical to the serial one.
pub fn build_weight_table_par(sp: &MeasureSpectrum, g: &GeneratingVector, n_points: u64) -> Result<WeightTable> {
    if n_points > g.n_max() {
        return Err(Error::InvalidArgument(format!("N = {n_points} exceeds n_max = {}", g.n_max())));
    }
    let table = CosTable::new(n_points)?;
    let mut weights = vec![0.0; n_points as usize];
    weights
        .par_chunks_mut(WEIGHT_CHUNK)
        .enumerate()
        .try_for_each(|(c, chunk)| sp.lattice_weights_into(g, &table, (c * WEIGHT_CHUNK) as u64, chunk))?;
    WeightTable::from_parts(sp.domain().clone(), sp.radius(), sp.measure_fingerprint(), g.fingerprint(), weights)
}

/// Parallel [`coslat_core::integrator::approximate_expectation`].
pub fn approximate_expectation_par<F>(f: F, table: &WeightTable, g: &GeneratingVector, domain: &Domain) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if table.domain() != domain {
        return Err(Error::InvalidArgument("weight table was built for a different box".into()));
    }
    if table.g_fingerprint() != g.fingerprint() {
        return Err(Error::InvalidArgument("weight table was built for a different generating vector".into()));
    }
    block_reduce(&f, g, table.n_points(), domain, Some(table.weights()))
}

/// Parallel [`coslat_core::integrator::qmc_uniform`].
pub fn qmc_uniform_par<F>(f: F, g: &GeneratingVector, n_points: u64, domain: &Domain, lebesgue: bool) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let avg = block_reduce(&f, g, n_points, domain, None)?;
    Ok(if lebesgue { avg * domain.volume() } else { avg })
}

fn block_reduce<F>(f: &F, g: &GeneratingVector, n_points: u64, domain: &Domain, weights: Option<&[f64]>) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if g.dim() < domain.dim() {
        return Err(Error::DimensionMismatch { expected: domain.dim(), found: g.dim() });
    }
    if n_points < 2 || n_points > g.n_max() {
        return Err(Error::InvalidArgument(format!("N = {n_points} outside [2, {}]", g.n_max())));
    }
    let blocks = (0..block_count(n_points))
        .into_par_iter()
        .map(|b| lattice_block_sum(&mut |y: &[f64]| f(y), g, n_points, domain, weights, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(finish_blocks(blocks, n_points))
}
