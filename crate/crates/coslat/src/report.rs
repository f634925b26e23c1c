//! CSV rows and plot-data emission.

use std::fmt::Write as _;

pub const CSV_HEADER: &str = "experiment,s,N,K,L,approx,reference,abs_error,seconds";

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub s: usize,
    pub n_points: u64,
    pub radius: Option<u64>,
    pub width: Option<f64>,
    pub approx: f64,
    pub reference: f64,
    pub seconds: f64,
}

impl ResultRow {
    pub fn abs_error(&self) -> f64 {
        (self.approx - self.reference).abs()
    }

    /// One CSV line without the trailing newline. `approx` and `reference`
    /// carry 17 significant digits, so the error column can be recomputed
    /// from them exactly.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{:.16e},{:.16e},{:.5e},{:.3}",
            self.experiment,
            self.s,
            self.n_points,
            opt(self.radius.map(|k| k.to_string())),
            opt(self.width.map(|l| l.to_string())),
            self.approx,
            self.reference,
            self.abs_error(),
            self.seconds
        )
    }
}

pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

/// `experiment,s,K,L,log10_N,log10_abs_error`; rows with a zero error are
/// skipped.
pub fn plot_data(rows: &[ResultRow]) -> String {
    let mut out = String::from("experiment,s,K,L,log10_N,log10_abs_error\n");
    for r in rows.iter().filter(|r| r.abs_error() > 0.0) {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6},{:.6}",
            r.experiment,
            r.s,
            r.radius.map(|k| k.to_string()).unwrap_or_default(),
            r.width.map(|l| l.to_string()).unwrap_or_default(),
            (r.n_points as f64).log10(),
            r.abs_error().log10()
        );
    }
    out
}
