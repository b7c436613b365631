//! Line-oriented trace files.
//!
//! ```text
//! # bvc3d-trace v1
//! # model 2d
//! # tilt_deg 0
//! # n_p 250
//! # n_b 960
//! # seed 7
//! # digest 3f1c...
//! # samples 30000
//! 0 1.25 -0.5 0.3 2 17:4.21000e-1 203:1.03000e-3
//! ...
//! # end 30000
//! ```
//!
//! Each sample line is `step x y heading k i1:v1 ... ik:vk`, listing only
//! cells whose rate exceeds [`SPARSITY_FLOOR`], in increasing index order,
//! with rates rounded to six significant digits.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const TRACE_VERSION: &str = "bvc3d-trace v1";
pub const SPARSITY_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceHeader {
    pub model: String,
    pub tilt_deg: f64,
    pub n_p: usize,
    pub n_b: usize,
    pub seed: u64,
    pub digest: String,
    /// Number of samples the writer promises to deliver.
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSample {
    pub step: u64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub activations: Vec<(u32, f64)>,
}

/// Rounds to the six significant digits the file stores.
pub fn quantize_rate(v: f64) -> f64 {
    format!("{v:.5e}").parse().expect("formatted float parses")
}

impl TraceSample {
    /// Sparse sample from a dense rate vector.
    pub fn from_rates(step: u64, x: f64, y: f64, heading: f64, rates: &[f64]) -> Self {
        let activations = rates
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| {
                let q = quantize_rate(v);
                (q > SPARSITY_FLOOR).then_some((i as u32, q))
            })
            .collect();
        Self { step, x, y, heading, activations }
    }

    fn write_line(&self, out: &mut impl Write) -> std::io::Result<()> {
        write!(out, "{} {} {} {} {}", self.step, self.x, self.y, self.heading, self.activations.len())?;
        for (i, v) in &self.activations {
            write!(out, " {i}:{v:.5e}")?;
        }
        out.write_all(b"\n")
    }

    fn parse(line: &str, n_p: usize) -> std::result::Result<Self, String> {
        let mut it = line.split_ascii_whitespace();
        let mut next = |what: &str| it.next().ok_or_else(|| format!("missing {what}"));
        let step = next("step")?.parse().map_err(|e| format!("step: {e}"))?;
        let x = next("x")?.parse().map_err(|e| format!("x: {e}"))?;
        let y = next("y")?.parse().map_err(|e| format!("y: {e}"))?;
        let heading = next("heading")?.parse().map_err(|e| format!("heading: {e}"))?;
        let k: usize = next("count")?.parse().map_err(|e| format!("count: {e}"))?;
        let mut activations = Vec::with_capacity(k);
        for _ in 0..k {
            let tok = next("activation")?;
            let (i, v) = tok.split_once(':').ok_or_else(|| format!("bad activation {tok:?}"))?;
            let i: u32 = i.parse().map_err(|e| format!("cell index: {e}"))?;
            let v: f64 = v.parse().map_err(|e| format!("rate: {e}"))?;
            if i as usize >= n_p {
                return Err(format!("cell index {i} out of range"));
            }
            if activations.last().is_some_and(|&(prev, _)| prev >= i) {
                return Err("cell indices not increasing".into());
            }
            activations.push((i, v));
        }
        if it.next().is_some() {
            return Err("trailing fields".into());
        }
        Ok(Self { step, x, y, heading, activations })
    }
}

/// Buffered trace writer. `finish` must be called; it writes the footer and
/// checks the promised sample count.
pub struct TraceWriter {
    out: BufWriter<File>,
    path: PathBuf,
    declared: usize,
    written: usize,
}

impl TraceWriter {
    pub fn create(path: impl AsRef<Path>, header: &TraceHeader) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut out = BufWriter::new(file);
        let h = header;
        let text = format!(
            "# {TRACE_VERSION}\n# model {}\n# tilt_deg {}\n# n_p {}\n# n_b {}\n# seed {}\n# digest {}\n# samples {}\n",
            h.model, h.tilt_deg, h.n_p, h.n_b, h.seed, h.digest, h.samples
        );
        out.write_all(text.as_bytes()).map_err(|e| Error::io(path.display().to_string(), e))?;
        Ok(Self { out, path, declared: header.samples, written: 0 })
    }

    pub fn append(&mut self, sample: &TraceSample) -> Result<()> {
        sample.write_line(&mut self.out).map_err(|e| Error::io(self.path.display().to_string(), e))?;
        self.written += 1;
        Ok(())
    }

    pub fn written(&self) -> usize {
        self.written
    }

    pub fn finish(mut self) -> Result<()> {
        let ctx = self.path.display().to_string();
        writeln!(self.out, "# end {}", self.written).map_err(|e| Error::io(ctx.clone(), e))?;
        self.out.flush().map_err(|e| Error::io(ctx.clone(), e))?;
        self.out.get_ref().sync_all().map_err(|e| Error::io(ctx, e))?;
        if self.written != self.declared {
            return Err(Error::SampleCount { path: self.path, declared: self.declared, found: self.written });
        }
        Ok(())
    }
}

/// Streaming reader. The header is parsed on open; samples are produced
/// lazily and the footer is verified when the iterator reaches the end.
pub struct TraceReader {
    header: TraceHeader,
    lines: std::io::Lines<BufReader<File>>,
    path: PathBuf,
    line_no: usize,
    seen: usize,
    done: bool,
}

/// Opens `path`, failing if the version is unknown or, when
/// `expected_digest` is given, if the recorded digest differs.
pub fn read_trace(path: impl AsRef<Path>, expected_digest: Option<&str>) -> Result<TraceReader> {
    let path = path.as_ref().to_path_buf();
    let file = File::open(&path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut lines = BufReader::new(file).lines();
    let mut line_no = 0;
    let mut header_line = |key: &str| -> Result<String> {
        line_no += 1;
        let line = match lines.next() {
            Some(l) => l.map_err(|e| Error::io(path.display().to_string(), e))?,
            None => {
                return Err(Error::TraceTruncated { path: path.clone(), detail: format!("header ends before {key}") })
            }
        };
        let body = line.strip_prefix("# ").ok_or_else(|| Error::Malformed {
            path: path.clone(),
            line: line_no,
            detail: format!("expected header line {key}"),
        })?;
        if key.is_empty() {
            return Ok(body.to_string());
        }
        body.strip_prefix(key).and_then(|v| v.strip_prefix(' ')).map(str::to_string).ok_or_else(|| {
            Error::Malformed { path: path.clone(), line: line_no, detail: format!("expected `# {key} ...`") }
        })
    };
    let version = header_line("")?;
    if version != TRACE_VERSION {
        return Err(Error::TraceVersion { path, found: version });
    }
    let model = header_line("model")?;
    let tilt = header_line("tilt_deg")?;
    let n_p = header_line("n_p")?;
    let n_b = header_line("n_b")?;
    let seed = header_line("seed")?;
    let digest = header_line("digest")?;
    let samples = header_line("samples")?;
    let num = |v: &str, line: usize| Error::Malformed { path: path.clone(), line, detail: format!("bad number {v:?}") };
    let header = TraceHeader {
        model,
        tilt_deg: tilt.parse().map_err(|_| num(&tilt, 3))?,
        n_p: n_p.parse().map_err(|_| num(&n_p, 4))?,
        n_b: n_b.parse().map_err(|_| num(&n_b, 5))?,
        seed: seed.parse().map_err(|_| num(&seed, 6))?,
        digest,
        samples: samples.parse().map_err(|_| num(&samples, 8))?,
    };
    if let Some(expected) = expected_digest {
        if expected != header.digest {
            return Err(Error::DigestMismatch { path, found: header.digest, expected: expected.to_string() });
        }
    }
    Ok(TraceReader { header, lines, path, line_no, seen: 0, done: false })
}

impl TraceReader {
    pub fn header(&self) -> &TraceHeader {
        &self.header
    }

    /// Reads every remaining sample into memory.
    pub fn collect_samples(self) -> Result<Vec<TraceSample>> {
        self.collect()
    }
}

impl Iterator for TraceReader {
    type Item = Result<TraceSample>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let fail = |s: &mut Self, e: Error| {
            s.done = true;
            Some(Err(e))
        };
        let line = match self.lines.next() {
            Some(Ok(l)) => l,
            Some(Err(e)) => return fail(self, Error::io(self.path.display().to_string(), e)),
            None => {
                let detail = format!("no footer after {} samples", self.seen);
                return fail(self, Error::TraceTruncated { path: self.path.clone(), detail });
            }
        };
        self.line_no += 1;
        if let Some(rest) = line.strip_prefix("# end ") {
            self.done = true;
            let count: usize = match rest.trim().parse() {
                Ok(c) => c,
                Err(_) => {
                    let e = Error::Malformed { path: self.path.clone(), line: self.line_no, detail: "bad footer".into() };
                    return Some(Err(e));
                }
            };
            if count != self.seen || count != self.header.samples {
                let found = self.seen;
                return Some(Err(Error::SampleCount { path: self.path.clone(), declared: self.header.samples, found }));
            }
            if self.lines.next().is_some() {
                let e = Error::Malformed { path: self.path.clone(), line: self.line_no + 1, detail: "data after footer".into() };
                return Some(Err(e));
            }
            return None;
        }
        match TraceSample::parse(&line, self.header.n_p) {
            Ok(s) => {
                self.seen += 1;
                Some(Ok(s))
            }
            Err(detail) => {
                // a cut-off final line is a truncation, not corruption
                let truncated = self.lines.next().is_none();
                let e = if truncated {
                    Error::TraceTruncated { path: self.path.clone(), detail: format!("partial line {}", self.line_no) }
                } else {
                    Error::Malformed { path: self.path.clone(), line: self.line_no, detail }
                };
                fail(self, e)
            }
        }
    }
}
