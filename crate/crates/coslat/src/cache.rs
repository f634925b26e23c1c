//! On-disk cache of lattice weight tables.
//!
//! One text file per `(g, N, measure, box, K)`:
//!
//! ```text
//! COSLAT-WT-1
//! s N K
//! a_1 … a_s
//! b_1 … b_s
//! measure_fingerprint g_fingerprint      (16 hex digits each)
//! w_0
//! …
//! ```
//!
//! Floats use shortest round-trip formatting, so a load reproduces the
//! built table bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use coslat_core::integrator::{MeasureSpectrum, WeightTable};
use coslat_core::lattice::{Domain, GeneratingVector};

use crate::error::{config, io_err, Result};
use crate::parallel::build_weight_table_par;

pub const MAGIC: &str = "COSLAT-WT-1";

#[derive(Debug, Clone)]
pub struct WeightCache {
    dir: PathBuf,
}

impl WeightCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, g: &GeneratingVector, n_points: u64, measure_fp: u64, domain: &Domain, radius: u64) -> PathBuf {
        self.dir.join(format!(
            "wt-{:016x}-{:016x}-{:016x}-n{n_points}-k{radius}.txt",
            g.fingerprint(),
            measure_fp,
            domain.fingerprint()
        ))
    }

    /// Reads a cached table. Missing files and files whose header does not
    /// match the request are misses.
    pub fn load(
        &self,
        g: &GeneratingVector,
        n_points: u64,
        measure_fp: u64,
        domain: &Domain,
        radius: u64,
    ) -> Result<Option<WeightTable>> {
        let path = self.path_for(g, n_points, measure_fp, domain, radius);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(io_err(&path)(e)),
        };
        let table = decode(&text).map_err(|e| config(format!("{}: {e}", path.display())))?;
        let hit = table.n_points() == n_points
            && table.radius() == radius
            && table.measure_fingerprint() == measure_fp
            && table.g_fingerprint() == g.fingerprint()
            && table.domain() == domain;
        Ok(hit.then_some(table))
    }

    /// Writes through a temporary file and a rename, so readers never see a
    /// partial table.
    pub fn store(&self, g: &GeneratingVector, table: &WeightTable) -> Result<PathBuf> {
        let path = self.path_for(g, table.n_points(), table.measure_fingerprint(), table.domain(), table.radius());
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, encode(table)).map_err(io_err(&tmp))?;
        fs::rename(&tmp, &path).map_err(io_err(&path))?;
        Ok(path)
    }

    /// Cached table for `P(g, N)`, building and storing it on a miss.
    pub fn get_or_build(&self, sp: &MeasureSpectrum, g: &GeneratingVector, n_points: u64) -> Result<WeightTable> {
        let fp = sp.measure_fingerprint();
        if let Some(t) = self.load(g, n_points, fp, sp.domain(), sp.radius())? {
            return Ok(t);
        }
        let table = build_weight_table_par(sp, g, n_points)?;
        // spectra built from a bare characteristic function carry no identity
        if fp != 0 {
            self.store(g, &table)?;
        }
        Ok(table)
    }
}

pub fn encode(table: &WeightTable) -> String {
    let d = table.domain();
    let mut out = String::with_capacity(24 * table.weights().len() + 256);
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "{} {} {}", d.dim(), table.n_points(), table.radius());
    for bound in [d.lower(), d.upper()] {
        let line: Vec<String> = bound.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    let _ = writeln!(out, "{:016x} {:016x}", table.measure_fingerprint(), table.g_fingerprint());
    for w in table.weights() {
        let _ = writeln!(out, "{w}");
    }
    out
}

pub fn decode(text: &str) -> std::result::Result<WeightTable, String> {
    let mut lines = text.lines();
    let mut next = |what: &str| lines.next().ok_or_else(|| format!("truncated file: missing {what}"));
    if next("magic")? != MAGIC {
        return Err("not a weight table".into());
    }
    let head: Vec<u64> = parse_all(next("size line")?)?;
    let [s, n_points, radius] = head[..] else {
        return Err("size line must be `s N K`".into());
    };
    let lower: Vec<f64> = parse_all(next("lower bounds")?)?;
    let upper: Vec<f64> = parse_all(next("upper bounds")?)?;
    if lower.len() != s as usize || upper.len() != s as usize {
        return Err("bounds do not match s".into());
    }
    let fps: Vec<&str> = next("fingerprints")?.split_whitespace().collect();
    let [mfp, gfp] = fps[..] else {
        return Err("fingerprint line must hold two values".into());
    };
    let hex = |t: &str| u64::from_str_radix(t, 16).map_err(|_| format!("bad fingerprint {t:?}"));
    let (mfp, gfp) = (hex(mfp)?, hex(gfp)?);
    let weights = lines.map(|l| l.trim().parse::<f64>().map_err(|_| format!("bad weight {l:?}"))).collect::<std::result::Result<Vec<_>, _>>()?;
    if weights.len() as u64 != n_points {
        return Err(format!("expected {n_points} weights, found {}", weights.len()));
    }
    let domain = Domain::new(lower, upper).map_err(|e| e.to_string())?;
    WeightTable::from_parts(domain, radius, mfp, gfp, weights).map_err(|e| e.to_string())
}

fn parse_all<T: std::str::FromStr>(line: &str) -> std::result::Result<Vec<T>, String> {
    line.split_whitespace().map(|t| t.parse().map_err(|_| format!("bad field {t:?}"))).collect()
}
