use std::io::{self, Write};

use crate::code::DecodeMode;

pub const CSV_HEADER: &str = "rate,decoder,mode,trials,successes,giveups,logical_errors,corrected_fraction,mean_iterations,wall_time_s,seed";

/// Tally for one (rate, decoder) point.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub rate: f64,
    pub decoder: String,
    pub mode: DecodeMode,
    pub trials: u64,
    pub successes: u64,
    pub giveups: u64,
    pub logical_errors: u64,
    /// Mean sampler iterations over all trials; `0` for one-shot decoders.
    pub mean_iterations: f64,
    pub wall_time_s: f64,
    pub seed: u64,
}

impl EvalRecord {
    /// Give-ups count as failures.
    pub fn corrected_fraction(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.successes as f64 / self.trials as f64
    }

    /// Binomial standard error of [`corrected_fraction`](Self::corrected_fraction).
    pub fn sigma(&self) -> f64 {
        let f = self.corrected_fraction();
        (f * (1.0 - f) / self.trials.max(1) as f64).sqrt()
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_sig(self.rate),
            self.decoder,
            self.mode,
            self.trials,
            self.successes,
            self.giveups,
            self.logical_errors,
            fmt_sig(self.corrected_fraction()),
            fmt_sig(self.mean_iterations),
            fmt_sig(self.wall_time_s),
            self.seed
        )
    }

    /// Row with the wall-time column blanked, for determinism checks.
    pub fn csv_row_without_time(&self) -> String {
        let mut r = self.clone();
        r.wall_time_s = 0.0;
        r.csv_row()
    }
}

pub fn write_csv(mut out: impl Write, records: &[EvalRecord]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Like C's `%.6g`.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 6;
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}
