//! Plain-text formats for generating vectors and cosine coefficient tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use coslat_core::cosine_space::CosineCoefficients;
use coslat_core::lattice::GeneratingVector;

use crate::error::{config, io_err, Result};

const SHIPPED_VECTOR: &str = include_str!("../data/ckn_base2_m20_s8.txt");

/// The bundled 8-dimensional base-2 lattice sequence vector, `n_max = 2^20`.
pub fn shipped_vector() -> GeneratingVector {
    parse_vector(SHIPPED_VECTOR).expect("bundled vector file is well formed")
}

/// Parses `s_max n_max` followed by one component per line. Blank lines and
/// lines starting with `#` are ignored.
pub fn parse_vector(text: &str) -> Result<GeneratingVector> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| config("empty vector file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(config(format!("vector header must be `s_max n_max`, got {header:?}")));
    }
    let s_max: usize = parse_int(fields[0])?;
    let n_max: u64 = parse_int(fields[1])?;
    let components = lines.map(parse_int).collect::<Result<Vec<u64>>>()?;
    if components.len() != s_max {
        return Err(config(format!("header declares {s_max} components, file has {}", components.len())));
    }
    GeneratingVector::new(components, n_max).map_err(|e| config(e.to_string()))
}

fn parse_int<T: std::str::FromStr>(t: &str) -> Result<T> {
    t.parse().map_err(|_| config(format!("not an integer: {t:?}")))
}

pub fn format_vector(g: &GeneratingVector) -> String {
    let mut out = format!("{} {}\n", g.dim(), g.n_max());
    for c in g.components() {
        let _ = writeln!(out, "{c}");
    }
    out
}

pub fn load_vector(path: &Path) -> Result<GeneratingVector> {
    parse_vector(&fs::read_to_string(path).map_err(io_err(path))?)
}

pub fn save_vector(path: &Path, g: &GeneratingVector) -> Result<()> {
    fs::write(path, format_vector(g)).map_err(io_err(path))
}

pub fn load_coefficients(path: &Path) -> Result<CosineCoefficients> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    CosineCoefficients::from_text(&text).map_err(|e| config(format!("{}: {e}", path.display())))
}

pub fn save_coefficients(path: &Path, c: &CosineCoefficients) -> Result<()> {
    fs::write(path, c.to_text()).map_err(io_err(path))
}
