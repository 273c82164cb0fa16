//! Segment-by-segment driver and the sinks that receive finished segments.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::base::{build_base_with, BaseLimits, BaseTable};
use crate::circle::CircleSet;
use crate::error::{Result, SieveError};
use crate::kernels::{
    apply_small_masks, sieve_large_observed, sieve_medium_dense, sieve_medium_wheel, DenseStrategy,
    LargeMarkObserver, LargeStrategy, SegmentBuffer,
};
use crate::params::SieveParams;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KernelConfig {
    pub large: LargeStrategy,
    pub dense: DenseStrategy,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SieveOptions {
    pub kernels: KernelConfig,
    pub limits: BaseLimits,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimes {
    pub init: Duration,
    pub masks: Duration,
    pub medium: Duration,
    pub large: Duration,
    pub output: Duration,
}

impl PhaseTimes {
    pub fn total(&self) -> Duration {
        self.init + self.masks + self.medium + self.large + self.output
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunStats {
    /// Clear bits in the table, i.e. primes in `[u, v]`.
    pub prime_count: u64,
    pub segments: u64,
    pub times: PhaseTimes,
}

/// A sieve run in progress. Holds the base, the circles and one segment.
#[derive(Debug, Clone)]
pub struct Sieve {
    params: SieveParams,
    base: BaseTable,
    segment: SegmentBuffer,
    next: u64,
    kernels: KernelConfig,
    times: PhaseTimes,
}

struct NoMarks;

impl LargeMarkObserver for NoMarks {
    #[inline(always)]
    fn mark(&mut self, _: u32, _: u32) {}
}

impl Sieve {
    pub fn new(params: SieveParams) -> Result<Self> {
        Self::with_options(params, SieveOptions::default())
    }

    pub fn with_options(params: SieveParams, options: SieveOptions) -> Result<Self> {
        let started = Instant::now();
        let base = build_base_with(&params, options.limits)?;
        let times = PhaseTimes {
            init: started.elapsed(),
            ..PhaseTimes::default()
        };
        Ok(Sieve {
            segment: SegmentBuffer::new(params.log_segment()),
            params,
            base,
            next: 0,
            kernels: options.kernels,
            times,
        })
    }

    pub fn params(&self) -> &SieveParams {
        &self.params
    }

    pub fn base(&self) -> &BaseTable {
        &self.base
    }

    pub fn circles(&self) -> &CircleSet {
        &self.base.circles
    }

    /// Index of the next segment to be sieved.
    pub fn next_index(&self) -> u64 {
        self.next
    }

    pub fn times(&self) -> PhaseTimes {
        self.times
    }

    pub fn next_segment(&mut self) -> Option<(u64, &SegmentBuffer)> {
        self.next_segment_observed(&mut NoMarks)
    }

    /// Sieves the next segment, reporting every large-prime mark.
    pub fn next_segment_observed<O: LargeMarkObserver>(
        &mut self,
        observer: &mut O,
    ) -> Option<(u64, &SegmentBuffer)> {
        if self.next == self.params.segments() {
            return None;
        }
        let t = self.next;
        self.segment.clear();

        let clock = Instant::now();
        apply_small_masks(&mut self.segment, &mut self.base.masks);
        let after_masks = Instant::now();
        sieve_medium_wheel(&mut self.segment, &mut self.base.wheel);
        for (k, pairs) in self.base.dense.iter_mut().enumerate().skip(1) {
            sieve_medium_dense(&mut self.segment, k as u32, pairs, self.kernels.dense);
        }
        let after_medium = Instant::now();
        sieve_large_observed(
            &mut self.segment,
            &mut self.base.circles,
            self.kernels.large,
            observer,
        );
        let after_large = Instant::now();

        self.times.masks += after_masks - clock;
        self.times.medium += after_medium - after_masks;
        self.times.large += after_large - after_medium;
        self.next += 1;
        Some((t, &self.segment))
    }
}

/// Receives each finished segment, in order.
pub trait SegmentSink {
    fn consume(&mut self, params: &SieveParams, t: u64, segment: &SegmentBuffer) -> Result<()>;

    fn finish(&mut self) -> Result<()> {
        Ok(())
    }
}

impl<S: SegmentSink + ?Sized> SegmentSink for &mut S {
    fn consume(&mut self, params: &SieveParams, t: u64, segment: &SegmentBuffer) -> Result<()> {
        (**self).consume(params, t, segment)
    }

    fn finish(&mut self) -> Result<()> {
        (**self).finish()
    }
}

/// Discards segments; the run's prime count is all that is kept.
#[derive(Debug, Default)]
pub struct CountSink;

impl SegmentSink for CountSink {
    fn consume(&mut self, _: &SieveParams, _: u64, _: &SegmentBuffer) -> Result<()> {
        Ok(())
    }
}

/// Collects the whole table in memory.
#[derive(Debug, Default)]
pub struct TableSink {
    pub bytes: Vec<u8>,
}

impl SegmentSink for TableSink {
    fn consume(&mut self, _: &SieveParams, _: u64, segment: &SegmentBuffer) -> Result<()> {
        segment.write_bytes(&mut self.bytes);
        Ok(())
    }
}

#[derive(Debug, Default)]
pub struct PrimeSink {
    pub primes: Vec<u64>,
}

impl SegmentSink for PrimeSink {
    fn consume(&mut self, params: &SieveParams, t: u64, segment: &SegmentBuffer) -> Result<()> {
        self.primes.extend(extract_primes(segment, t, params));
        Ok(())
    }
}

/// Streams the table to `erato_l{l}_f{f}_n{n}.bits` in a directory.
#[derive(Debug)]
pub struct TableWriter {
    path: PathBuf,
    out: BufWriter<File>,
    scratch: Vec<u8>,
}

impl TableWriter {
    pub fn create(dir: &Path, params: &SieveParams) -> Result<Self> {
        let path = dir.join(table_file_name(params));
        let file = File::create(&path).map_err(|e| SieveError::io(&path, e))?;
        Ok(TableWriter {
            path,
            out: BufWriter::with_capacity(1 << 20, file),
            scratch: Vec::with_capacity(params.segment_bytes()),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl SegmentSink for TableWriter {
    fn consume(&mut self, _: &SieveParams, _: u64, segment: &SegmentBuffer) -> Result<()> {
        self.scratch.clear();
        segment.write_bytes(&mut self.scratch);
        self.out
            .write_all(&self.scratch)
            .map_err(|e| SieveError::io(&self.path, e))
    }

    fn finish(&mut self) -> Result<()> {
        self.out.flush().map_err(|e| SieveError::io(&self.path, e))
    }
}

pub fn table_file_name(params: &SieveParams) -> String {
    format!(
        "erato_l{}_f{}_n{}.bits",
        params.log_segment(),
        params.first_segment(),
        params.segments()
    )
}

pub fn run_sieve<S: SegmentSink>(params: &SieveParams, sink: S) -> Result<RunStats> {
    run_sieve_with(params, SieveOptions::default(), sink)
}

/// Sieves segments `0..n` in order and hands each one to `sink`.
pub fn run_sieve_with<S: SegmentSink>(
    params: &SieveParams,
    options: SieveOptions,
    mut sink: S,
) -> Result<RunStats> {
    let mut sieve = Sieve::with_options(*params, options)?;
    let mut stats = RunStats::default();
    let mut output = Duration::ZERO;
    while let Some((t, segment)) = sieve.next_segment() {
        let clock = Instant::now();
        stats.prime_count += segment.count_clear();
        sink.consume(params, t, segment)?;
        output += clock.elapsed();
        stats.segments += 1;
    }
    let clock = Instant::now();
    sink.finish()?;
    output += clock.elapsed();
    stats.times = sieve.times();
    stats.times.output = output;
    Ok(stats)
}

/// Primes represented by the clear bits of segment `t`.
pub fn extract_primes(segment: &SegmentBuffer, t: u64, params: &SieveParams) -> Vec<u64> {
    let origin = params.segment_origin(t);
    segment
        .clear_offsets()
        .map(|q| 2 * (origin + q as u64) + 1)
        .collect()
}

/// Runs the sieve into a table file in `dir`.
pub fn write_table(dir: &Path, params: &SieveParams) -> Result<(PathBuf, RunStats)> {
    let mut writer = TableWriter::create(dir, params)?;
    let stats = run_sieve(params, &mut writer)?;
    Ok((writer.path, stats))
}

/// Reads a table file back, checking its size against `params`.
pub fn read_table(path: &Path, params: &SieveParams) -> Result<Vec<u8>> {
    let bytes = std::fs::read(path).map_err(|e| SieveError::io(path, e))?;
    if bytes.len() as u64 != params.table_bytes() {
        return Err(SieveError::io(
            path,
            std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!(
                    "expected {} bytes, found {}",
                    params.table_bytes(),
                    bytes.len()
                ),
            ),
        ));
    }
    Ok(bytes)
}

/// Primes whose bits are clear in a packed table.
pub fn primes_from_table(params: &SieveParams, table: &[u8]) -> Vec<u64> {
    let origin = params.segment_origin(0);
    (0..params.table_bits().min(table.len() as u64 * 8))
        .filter(|&j| table[(j / 8) as usize] >> (j % 8) & 1 == 0)
        .map(|j| 2 * (origin + j) + 1)
        .collect()
}
