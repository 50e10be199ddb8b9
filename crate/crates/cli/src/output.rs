//! Result rows and their CSV encoding.

use std::io::Write;

pub const HEADER: [&str; 11] = [
    "scenario",
    "config",
    "scheme",
    "snr_db",
    "sum_rate",
    "dof_inner",
    "dof_outer",
    "dof_exact",
    "dof_hat",
    "stderr",
    "seed",
];

/// One CSV line. `stderr` is the standard error of `sum_rate` on curve rows
/// and of `dof_hat` on slope rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    pub config: String,
    pub scheme: String,
    pub snr_db: f64,
    pub sum_rate: f64,
    pub dof_inner: f64,
    pub dof_outer: f64,
    pub dof_exact: Option<f64>,
    pub dof_hat: Option<f64>,
    pub stderr: Option<f64>,
    pub seed: u64,
}

impl ResultRow {
    fn fields(&self) -> [String; 11] {
        let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
        [
            self.scenario.clone(),
            self.config.clone(),
            self.scheme.clone(),
            fmt_num(self.snr_db),
            fmt_num(self.sum_rate),
            fmt_num(self.dof_inner),
            fmt_num(self.dof_outer),
            opt(self.dof_exact),
            opt(self.dof_hat),
            opt(self.stderr),
            self.seed.to_string(),
        ]
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Six significant digits in the style of C's `%g`.
pub fn fmt_num(x: f64) -> String {
    assert!(x.is_finite(), "non-finite value {x} in output");
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

/// Writes `#`-prefixed preamble lines, the header and the rows sorted by
/// scenario, scheme and SNR.
pub fn write_csv<W: Write>(mut out: W, preamble: &[String], rows: &[ResultRow]) -> csv::Result<()> {
    for line in preamble {
        writeln!(out, "# {line}")?;
    }
    let mut sorted: Vec<&ResultRow> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.scenario, &a.scheme)
            .cmp(&(&b.scenario, &b.scheme))
            .then(a.snr_db.total_cmp(&b.snr_db))
    });
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for row in sorted {
        w.write_record(row.fields())?;
    }
    w.flush()?;
    Ok(())
}
