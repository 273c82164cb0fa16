use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use cachesieve::bench::{bench_run, write_csv, write_csv_file, BenchConfig};
use cachesieve::driver::{run_sieve, write_table, CountSink, RunStats, TableSink};
use cachesieve::oracle::{oracle_bit_table, prime_count, PRIME_COUNT_MAX};
use cachesieve::params::{params_from_midpoint, validate_params, DEFAULT_LOG_SEGMENT};
use cachesieve::{SieveError, SieveParams};

/// Cache-friendly segmented sieve of Eratosthenes.
#[derive(Parser)]
#[command(name = "cachesieve", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sieve an interval and write the bit table (or just count primes).
    Sieve {
        #[command(flatten)]
        range: RangeArgs,
        /// Directory for the table file [default: system temp dir]
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Count primes without writing a table
        #[arg(long)]
        count_only: bool,
    },
    /// Compare the sieve against the brute-force reference.
    Verify {
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Time 2^30-bit intervals centred near 10^e.
    Bench {
        /// Comma-separated midpoint exponents
        #[arg(long, value_delimiter = ',', default_value = "12,13,14,15")]
        exps: Vec<u32>,
        #[arg(long, default_value_t = DEFAULT_LOG_SEGMENT)]
        log_seg: u32,
        /// Write rows as CSV to this file (stdout otherwise)
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Machine label shown in the report
        #[arg(long, default_value = "local")]
        label: String,
        /// Timed runs per row; the median is reported
        #[arg(long, default_value_t = 3)]
        runs: usize,
        #[arg(long)]
        no_warmup: bool,
    },
}

#[derive(Args)]
struct RangeArgs {
    /// Base-2 log of the segment size in bits
    #[arg(long, default_value_t = DEFAULT_LOG_SEGMENT)]
    log_seg: u32,
    /// Index of the first segment
    #[arg(
        long,
        conflicts_with = "midpoint_exp",
        required_unless_present = "midpoint_exp"
    )]
    first: Option<u64>,
    /// Centre the interval near 10^e instead of giving --first
    #[arg(long)]
    midpoint_exp: Option<u32>,
    /// Number of segments
    #[arg(long)]
    segments: u64,
    /// Allow segment sizes down to 2^4
    #[arg(long)]
    test_mode: bool,
}

impl RangeArgs {
    fn params(&self) -> cachesieve::Result<SieveParams> {
        let f = match (self.first, self.midpoint_exp) {
            (Some(f), _) => f,
            (None, Some(e)) => params_from_midpoint(e, self.log_seg, self.segments)?,
            (None, None) => unreachable!("clap requires one of --first/--midpoint-exp"),
        };
        validate_params(self.log_seg, f, self.segments, self.test_mode)
    }
}

const EXIT_PARAM: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(EXIT_PARAM)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_parameter_error() {
                EXIT_PARAM
            } else {
                EXIT_RUNTIME
            })
        }
    }
}

fn run(command: Command) -> cachesieve::Result<ExitCode> {
    match command {
        Command::Sieve {
            range,
            out_dir,
            count_only,
        } => {
            let params = range.params()?;
            print_interval(&params);
            let stats = if count_only {
                run_sieve(&params, CountSink)?
            } else {
                let dir = out_dir.unwrap_or_else(std::env::temp_dir);
                std::fs::create_dir_all(&dir).map_err(|e| SieveError::Io {
                    path: dir.clone(),
                    source: e,
                })?;
                let (path, stats) = write_table(&dir, &params)?;
                println!("table: {}", path.display());
                stats
            };
            print_stats(&stats);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { range } => {
            let params = range.params()?;
            print_interval(&params);
            let mut table = TableSink::default();
            let stats = run_sieve(&params, &mut table)?;
            let oracle = oracle_bit_table(&params)?;
            let mut ok = table.bytes == oracle;
            if let Some(j) = first_difference(&table.bytes, &oracle) {
                println!("first differing bit: {j} ({})", params.index_to_number(j)?);
            }
            if params.v() <= PRIME_COUNT_MAX {
                let expected = prime_count(params.u(), params.v())?;
                println!("primes: {} (reference {expected})", stats.prime_count);
                ok &= expected == stats.prime_count;
            } else {
                println!("primes: {}", stats.prime_count);
            }
            println!("{}", if ok { "PASS" } else { "FAIL" });
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_RUNTIME)
            })
        }
        Command::Bench {
            exps,
            log_seg,
            csv,
            label,
            runs,
            no_warmup,
        } => {
            let config = BenchConfig {
                l: log_seg,
                label,
                warmup: !no_warmup,
                runs,
                ..BenchConfig::default()
            };
            let rows = bench_run(&exps, &config);
            let mut failed = false;
            for row in &rows {
                match &row.outcome {
                    Ok(t) => eprintln!(
                        "[{}] e={} l={} f={} primes={} {:.3}s",
                        row.label, row.e, row.l, t.f, t.prime_count, t.seconds
                    ),
                    Err(err) => {
                        failed = true;
                        eprintln!("[{}] e={} failed: {err}", row.label, row.e)
                    }
                }
            }
            match csv {
                Some(path) => write_csv_file(&rows, &path)?,
                None => write_csv(&rows, std::io::stdout().lock()).map_err(|e| SieveError::Io {
                    path: "<stdout>".into(),
                    source: e,
                })?,
            }
            Ok(if failed {
                ExitCode::from(EXIT_RUNTIME)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn first_difference(a: &[u8], b: &[u8]) -> Option<u64> {
    a.iter()
        .zip(b)
        .position(|(x, y)| x != y)
        .map(|i| i as u64 * 8 + (a[i] ^ b[i]).trailing_zeros() as u64)
}

fn print_interval(params: &SieveParams) {
    println!(
        "interval: [{}, {}]  l={} f={} n={}",
        params.u(),
        params.v(),
        params.log_segment(),
        params.first_segment(),
        params.segments()
    );
}

fn print_stats(stats: &RunStats) {
    let ms = |d: Duration| d.as_secs_f64() * 1e3;
    let t = &stats.times;
    println!("primes: {}", stats.prime_count);
    println!(
        "time: total {:.3} ms (init {:.3}, masks {:.3}, medium {:.3}, large {:.3}, output {:.3})",
        ms(t.total()),
        ms(t.init),
        ms(t.masks),
        ms(t.medium),
        ms(t.large),
        ms(t.output)
    );
}
