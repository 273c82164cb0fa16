//! Timing harness: sieve 2^30 table bits centred near `10^e`.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use crate::driver::{run_sieve, CountSink};
use crate::error::{Result, SieveError};
use crate::params::{params_from_midpoint, SieveParams};

/// Table bits per benchmark row.
pub const BENCH_LOG_BITS: u32 = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub e: u32,
    pub l: u32,
    pub label: String,
    /// Median wall-clock seconds, or the error that stopped the row.
    pub outcome: std::result::Result<BenchTiming, String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchTiming {
    pub seconds: f64,
    pub prime_count: u64,
    pub f: u64,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub l: u32,
    pub label: String,
    pub warmup: bool,
    pub runs: usize,
    /// Table bits per row as a power of two; 30 unless shrunk for smoke tests.
    pub log_bits: u32,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            l: crate::params::DEFAULT_LOG_SEGMENT,
            label: String::from("local"),
            warmup: true,
            runs: 3,
            log_bits: BENCH_LOG_BITS,
        }
    }
}

impl BenchConfig {
    pub fn segments(&self) -> u64 {
        1 << self.log_bits.saturating_sub(self.l)
    }

    pub fn params_for(&self, e: u32) -> Result<SieveParams> {
        let n = self.segments();
        let f = params_from_midpoint(e, self.l, n)?;
        SieveParams::new(self.l, f, n)
    }
}

/// One row per exponent. A failing row keeps its error and the rest still run.
pub fn bench_run(exps: &[u32], config: &BenchConfig) -> Vec<BenchRow> {
    exps.iter()
        .map(|&e| BenchRow {
            e,
            l: config.l,
            label: config.label.clone(),
            outcome: time_row(e, config).map_err(|err| err.to_string()),
        })
        .collect()
}

fn time_row(e: u32, config: &BenchConfig) -> Result<BenchTiming> {
    let params = config.params_for(e)?;
    if config.warmup {
        run_sieve(&params, CountSink)?;
    }
    let mut seconds = Vec::with_capacity(config.runs.max(1));
    let mut prime_count = 0;
    for _ in 0..config.runs.max(1) {
        let clock = Instant::now();
        let stats = run_sieve(&params, CountSink)?;
        seconds.push(clock.elapsed().as_secs_f64());
        prime_count = stats.prime_count;
    }
    seconds.sort_by(f64::total_cmp);
    Ok(BenchTiming {
        seconds: seconds[seconds.len() / 2],
        prime_count,
        f: params.first_segment(),
    })
}

pub fn write_csv<W: Write>(rows: &[BenchRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "e,seconds,l")?;
    for row in rows {
        match &row.outcome {
            Ok(timing) => writeln!(out, "{},{:.6},{}", row.e, timing.seconds, row.l)?,
            Err(_) => writeln!(out, "{},nan,{}", row.e, row.l)?,
        }
    }
    Ok(())
}

pub fn write_csv_file(rows: &[BenchRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| SieveError::io(path, e))?;
    write_csv(rows, std::io::BufWriter::new(file)).map_err(|e| SieveError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_rows_and_csv() {
        let config = BenchConfig {
            l: 12,
            warmup: false,
            runs: 1,
            log_bits: 16,
            ..BenchConfig::default()
        };
        let rows = bench_run(&[9, 2, 10], &config);
        assert!(rows[0].outcome.is_ok());
        assert!(rows[1].outcome.is_err());
        assert!(rows[2].outcome.is_ok());
        let mut csv = Vec::new();
        write_csv(&rows, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "e,seconds,l");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("9,") && lines[1].ends_with(",12"));
        assert_eq!(lines[2], "2,nan,12");
    }

    #[test]
    fn default_geometry() {
        let config = BenchConfig::default();
        assert_eq!(config.segments(), 512);
        let params = config.params_for(12).unwrap();
        assert_eq!(params.first_segment(), 238162);
        assert_eq!(params.table_bits(), 1 << 30);
    }
}
