//! Trials, analyses and the model × environment suite, with their on-disk
//! layout.
//!
//! A trial directory holds:
//!
//! * `config.toml` - the resolved configuration, headed by its digest
//! * `trace.txt` - sampling-phase trace (see [`crate::recording`])
//! * `network.bin` - place-cell network after the run
//!
//! An analysis directory holds `summary.csv`, `modality.csv` and the
//! whitespace matrices `sai.txt`, `visits.txt` and `maps.txt`. Every file
//! starts with a `# digest <hex>` line. Matrices follow with a
//! `# grid nx ny x_min y_min x_max y_max` line and then `ny` rows of `nx`
//! values, row 0 being the lowest `y`; `maps.txt` repeats the rows once per
//! cell after a `# cell <index>` line.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::agent::{reference_rate, AgentState, StepRecord, Trial};
use crate::bvc::{build_population, BvcPopulation, ModelName};
use crate::config::{Overrides, RunConfig};
use crate::error::{Error, Result};
use crate::geometry::{build_arena, Aabb, Vec3, World};
use crate::metrics::{
    bin_trace, build_hex_grid, modality_index, modality_summary, msai, sai_all, BinnedMaps, HexGrid, ModalityResult,
};
use crate::pcn::{init_network, PlaceCellNetwork};
use crate::recording::{read_trace, TraceHeader, TraceSample, TraceWriter};
use crate::render::{bar_chart, render_hexmap, sheet};

pub const CONFIG_FILE: &str = "config.toml";
pub const TRACE_FILE: &str = "trace.txt";
pub const SNAPSHOT_FILE: &str = "network.bin";
pub const ANALYSIS_DIR: &str = "analysis";
pub const SUITE_SUMMARY_FILE: &str = "suite_summary.csv";

/// Column order of `summary.csv` and `suite_summary.csv`.
pub const SUMMARY_HEADER: &str =
    "model,environment,tilt_deg,frac_mi_gt0,avg_mi_nonzero,frac_mi_gt1,msai,coverage,digest";

/// Place-cell rate above which a cell counts as active in progress reports.
pub const ACTIVE_RATE: f64 = 0.01;
pub const PROGRESS_EVERY: usize = 5000;

/// Pixels per bin pitch in rendered hexmaps.
pub const HEXMAP_PX: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Exploration,
    Sampling,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Progress {
    pub phase: Phase,
    pub step: usize,
    pub total: usize,
    /// Fraction of bins visited so far in this phase.
    pub coverage: f64,
    /// Mean fraction of active place cells since the previous report.
    pub active_fraction: f64,
}

/// Everything a trial needs, built from a configuration.
pub struct Setup {
    pub world: World,
    pub population: BvcPopulation,
    pub network: PlaceCellNetwork,
    pub grid: HexGrid,
}

/// Factor applied to BVC rates before the place cells.
pub fn input_gain(config: &RunConfig, population: &BvcPopulation) -> Result<f64> {
    if !config.normalize_input {
        return Ok(config.pcn.input_gain);
    }
    let r = reference_rate(population);
    if r.is_nan() || r <= 0.0 {
        return Err(Error::Config("input normalization needs a positive reference rate".into()));
    }
    Ok(config.pcn.input_gain / r)
}

pub fn setup(config: &RunConfig) -> Result<Setup> {
    config.validate()?;
    let world = build_arena(&config.environment)?;
    let population = build_population(&config.bvc)?;
    let mut params = config.pcn.clone();
    params.input_gain = input_gain(config, &population)?;
    let network = init_network(config.n_place_cells, population.len(), config.walk.seed, params)?;
    let grid = build_hex_grid(&world.bounds(), config.analysis.grid_nx, config.analysis.grid_ny);
    Ok(Setup { world, population, network, grid })
}

fn walk_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

struct Reporter<'a> {
    phase: Phase,
    total: usize,
    visited: Vec<bool>,
    n_visited: usize,
    active: f64,
    since: usize,
    grid: &'a HexGrid,
    sink: &'a mut dyn FnMut(&Progress),
}

impl Reporter<'_> {
    fn observe(&mut self, r: &StepRecord<'_>) {
        let b = self.grid.bin_of(r.pose.x, r.pose.y);
        if !self.visited[b] {
            self.visited[b] = true;
            self.n_visited += 1;
        }
        let n = r.place_rates.len().max(1);
        self.active += r.place_rates.iter().filter(|&&v| v > ACTIVE_RATE).count() as f64 / n as f64;
        self.since += 1;
        let step = r.step + 1;
        if step.is_multiple_of(PROGRESS_EVERY) || step == self.total {
            (self.sink)(&Progress {
                phase: self.phase,
                step,
                total: self.total,
                coverage: self.n_visited as f64 / self.visited.len() as f64,
                active_fraction: self.active / self.since as f64,
            });
            self.active = 0.0;
            self.since = 0;
        }
    }
}

/// Runs exploration with plasticity, then sampling without, writing the
/// config echo, the sampling trace and the final network into `out`.
pub fn run_trial(config: &RunConfig, out: &Path, progress: &mut dyn FnMut(&Progress)) -> Result<()> {
    let Setup { world, population, mut network, grid } = setup(config)?;
    fs::create_dir_all(out).map_err(|e| Error::io(out.display().to_string(), e))?;
    write_text(&out.join(CONFIG_FILE), &config.to_toml())?;
    let digest = config.digest();

    let mut rng = walk_rng(config.walk.seed);
    let state = AgentState::random_start(&world, 2.0 * config.walk.body_radius, &mut rng);
    let mut trial = Trial { world: &world, population: &population, network: &mut network, walk: &config.walk, state, rng };

    let mut reporter = Reporter {
        phase: Phase::Exploration,
        total: config.walk.exploration_steps,
        visited: vec![false; grid.len()],
        n_visited: 0,
        active: 0.0,
        since: 0,
        grid: &grid,
        sink: progress,
    };
    trial.run_phase(config.walk.exploration_steps, true, &mut |r: &StepRecord<'_>| {
        reporter.observe(r);
        Ok(())
    })?;

    let header = TraceHeader {
        model: config.model.to_string(),
        tilt_deg: config.environment.tilt_deg,
        n_p: config.n_place_cells,
        n_b: population.len(),
        seed: config.walk.seed,
        digest: digest.clone(),
        samples: config.walk.sampling_steps,
    };
    let mut writer = TraceWriter::create(out.join(TRACE_FILE), &header)?;
    reporter.phase = Phase::Sampling;
    reporter.total = config.walk.sampling_steps;
    reporter.visited.fill(false);
    reporter.n_visited = 0;
    trial.run_phase(config.walk.sampling_steps, false, &mut |r: &StepRecord<'_>| {
        reporter.observe(r);
        let p = r.pose;
        writer.append(&TraceSample::from_rates(r.step as u64, p.x, p.y, p.heading(), r.place_rates))
    })?;
    writer.finish()?;

    let path = out.join(SNAPSHOT_FILE);
    let file = fs::File::create(&path).map_err(|e| Error::io(path.display().to_string(), e))?;
    network.write_snapshot(std::io::BufWriter::new(file)).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Reads the config echo of a trial directory.
pub fn load_trial_config(dir: &Path) -> Result<RunConfig> {
    let path = dir.join(CONFIG_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let config = RunConfig::from_toml(&text)?;
    let stated = text.lines().next().and_then(|l| l.strip_prefix("# digest ")).unwrap_or("");
    if stated != config.digest() {
        return Err(Error::DigestMismatch { path, found: stated.to_string(), expected: config.digest() });
    }
    Ok(config)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub model: ModelName,
    pub environment: u8,
    pub tilt_deg: f64,
    pub frac_mi_gt0: f64,
    pub avg_mi_nonzero: f64,
    pub frac_mi_gt1: f64,
    pub msai: f64,
    pub coverage: f64,
    pub digest: String,
}

impl SummaryRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.model,
            self.environment,
            self.tilt_deg,
            self.frac_mi_gt0,
            self.avg_mi_nonzero,
            self.frac_mi_gt1,
            self.msai,
            self.coverage,
            self.digest
        )
    }

    pub fn parse_csv(line: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad summary row {line:?}"));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(bad());
        }
        let num = |i: usize| f[i].parse::<f64>().map_err(|_| bad());
        Ok(Self {
            model: f[0].parse()?,
            environment: f[1].parse().map_err(|_| bad())?,
            tilt_deg: num(2)?,
            frac_mi_gt0: num(3)?,
            avg_mi_nonzero: num(4)?,
            frac_mi_gt1: num(5)?,
            msai: num(6)?,
            coverage: num(7)?,
            digest: f[8].to_string(),
        })
    }

    pub fn metric(&self, m: Metric) -> f64 {
        match m {
            Metric::FracMiGt0 => self.frac_mi_gt0,
            Metric::AvgMiNonzero => self.avg_mi_nonzero,
            Metric::FracMiGt1 => self.frac_mi_gt1,
            Metric::Msai => self.msai,
        }
    }
}

/// The per-trial quantities the suite tabulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    FracMiGt0,
    AvgMiNonzero,
    FracMiGt1,
    Msai,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::FracMiGt0, Metric::AvgMiNonzero, Metric::FracMiGt1, Metric::Msai];

    pub fn name(self) -> &'static str {
        match self {
            Metric::FracMiGt0 => "frac_mi_gt0",
            Metric::AvgMiNonzero => "avg_mi_nonzero",
            Metric::FracMiGt1 => "frac_mi_gt1",
            Metric::Msai => "msai",
        }
    }
}

pub struct Analysis {
    pub summary: SummaryRow,
    pub modality: Vec<ModalityResult>,
    pub sai: Vec<f64>,
    pub binned: BinnedMaps,
    pub grid: HexGrid,
}

/// Bins the trace at `trace` and computes modality and aliasing metrics.
/// Fails with [`Error::DigestMismatch`] if the trace was not produced by
/// `config`.
pub fn analyze(trace: &Path, config: &RunConfig) -> Result<Analysis> {
    let digest = config.digest();
    let reader = read_trace(trace, Some(&digest))?;
    let header = reader.header().clone();
    if header.n_p != config.n_place_cells {
        return Err(Error::Config(format!(
            "{}: trace has {} place cells, config {}",
            trace.display(),
            header.n_p,
            config.n_place_cells
        )));
    }
    let world = build_arena(&config.environment)?;
    let grid = build_hex_grid(&world.bounds(), config.analysis.grid_nx, config.analysis.grid_ny);
    let mut failure = None;
    let samples = reader.map_while(|r| r.map_err(|e| failure = Some(e)).ok());
    let binned = bin_trace(samples, header.n_p, &grid);
    if let Some(e) = failure {
        return Err(e);
    }
    let modality: Vec<ModalityResult> = binned.maps.par_iter().map(|m| modality_index(m, &grid)).collect();
    let sai = sai_all(&binned.maps, &grid, &config.analysis.aliasing());
    let s = modality_summary(&modality);
    let summary = SummaryRow {
        model: config.model,
        environment: config.env,
        tilt_deg: config.environment.tilt_deg,
        frac_mi_gt0: s.frac_mi_gt0,
        avg_mi_nonzero: s.avg_mi_nonzero,
        frac_mi_gt1: s.frac_mi_gt1,
        msai: msai(&sai),
        coverage: binned.coverage(),
        digest,
    };
    Ok(Analysis { summary, modality, sai, binned, grid })
}

pub fn write_analysis(a: &Analysis, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let digest = &a.summary.digest;
    write_text(&dir.join("summary.csv"), &format!("# digest {digest}\n{SUMMARY_HEADER}\n{}\n", a.summary.csv()))?;

    let mut text = format!("# digest {digest}\ncell,modality_index\n");
    for m in &a.modality {
        writeln!(text, "{},{}", m.cell_index, m.modality_index).unwrap();
    }
    write_text(&dir.join("modality.csv"), &text)?;

    let head = matrix_header(digest, &a.grid);
    let mut text = head.clone();
    push_matrix(&mut text, &a.sai, a.grid.nx);
    write_text(&dir.join("sai.txt"), &text)?;

    let visits: Vec<f64> = a.binned.visit_counts.iter().map(|&c| c as f64).collect();
    let mut text = head.clone();
    push_matrix(&mut text, &visits, a.grid.nx);
    write_text(&dir.join("visits.txt"), &text)?;

    let mut text = head;
    for m in &a.binned.maps {
        writeln!(text, "# cell {}", m.cell_index).unwrap();
        push_matrix(&mut text, &m.values, a.grid.nx);
    }
    write_text(&dir.join("maps.txt"), &text)
}

fn matrix_header(digest: &str, grid: &HexGrid) -> String {
    let b = grid.bounds();
    format!("# digest {digest}\n# grid {} {} {} {} {} {}\n", grid.nx, grid.ny, b.min.x, b.min.y, b.max.x, b.max.y)
}

fn push_matrix(out: &mut String, values: &[f64], nx: usize) {
    for row in values.chunks(nx) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
}

/// A matrix file read back: digest, grid and one value block per `# cell`
/// section (a single block for plain matrices).
pub struct MatrixFile {
    pub digest: String,
    pub grid: HexGrid,
    pub blocks: Vec<Vec<f64>>,
}

pub fn read_matrix_file(path: &Path) -> Result<MatrixFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let bad = |line: usize, detail: &str| Error::Malformed { path: path.to_path_buf(), line, detail: detail.into() };
    let mut lines = text.lines().enumerate();
    let digest = lines
        .next()
        .and_then(|(_, l)| l.strip_prefix("# digest "))
        .ok_or_else(|| bad(1, "missing digest line"))?
        .to_string();
    let grid_line = lines.next().and_then(|(_, l)| l.strip_prefix("# grid ")).ok_or_else(|| bad(2, "missing grid line"))?;
    let g: Vec<f64> = grid_line.split_whitespace().map(str::parse).collect::<std::result::Result<_, _>>().map_err(|_| bad(2, "bad grid line"))?;
    if g.len() != 6 || g[0] < 1.0 || g[1] < 1.0 {
        return Err(bad(2, "bad grid line"));
    }
    let (nx, ny) = (g[0] as usize, g[1] as usize);
    let bounds = Aabb { min: Vec3::new(g[2], g[3], 0.0), max: Vec3::new(g[4], g[5], 0.0) };
    let grid = build_hex_grid(&bounds, nx, ny);
    let mut blocks: Vec<Vec<f64>> = Vec::new();
    let mut current: Option<Vec<f64>> = None;
    for (i, line) in lines {
        if line.starts_with("# cell ") {
            blocks.extend(current.take());
            current = Some(Vec::with_capacity(nx * ny));
            continue;
        }
        let row: Vec<f64> =
            line.split_whitespace().map(str::parse).collect::<std::result::Result<_, _>>().map_err(|_| bad(i + 1, "bad value"))?;
        if row.len() != nx {
            return Err(bad(i + 1, "row length differs from grid"));
        }
        current.get_or_insert_with(Vec::new).extend(row);
    }
    blocks.extend(current);
    if blocks.is_empty() || blocks.iter().any(|b| b.len() != nx * ny) {
        return Err(bad(0, "matrix size differs from grid"));
    }
    Ok(MatrixFile { digest, grid, blocks })
}

/// Renders an analysis directory into `out`: `sai.ppm` scaled to its own
/// maximum and one `cell_XXX.ppm` per place cell.
pub fn render_analysis(dir: &Path, out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::io(out.display().to_string(), e))?;
    let sai = read_matrix_file(&dir.join("sai.txt"))?;
    let values = &sai.blocks[0];
    let max = values.iter().copied().fold(0.0, f64::max);
    render_hexmap(values, &sai.grid, HEXMAP_PX, max).write_ppm(&out.join("sai.ppm"), &sai.digest)?;
    let maps = read_matrix_file(&dir.join("maps.txt"))?;
    if maps.digest != sai.digest {
        return Err(Error::DigestMismatch { path: dir.join("maps.txt"), found: maps.digest, expected: sai.digest });
    }
    for (i, m) in maps.blocks.iter().enumerate() {
        render_hexmap(m, &maps.grid, HEXMAP_PX, 1.0).write_ppm(&out.join(format!("cell_{i:03}.ppm")), &maps.digest)?;
    }
    Ok(())
}

/// Which trials a suite runs. Defaults to every model in every environment.
#[derive(Debug, Clone, PartialEq)]
pub struct SuitePlan {
    pub models: Vec<ModelName>,
    pub envs: Vec<u8>,
}

impl Default for SuitePlan {
    fn default() -> Self {
        Self { models: ModelName::ALL.to_vec(), envs: vec![1, 2, 3, 4] }
    }
}

impl SuitePlan {
    /// Reads and removes an optional `[suite]` table with `models` and
    /// `envs` lists.
    pub fn take_from(table: &mut toml::Table) -> Result<Self> {
        let mut plan = Self::default();
        let Some(value) = table.remove("suite") else {
            return Ok(plan);
        };
        let t = value.as_table().ok_or_else(|| Error::Config("[suite] must be a table".into()))?;
        for key in t.keys() {
            if key != "models" && key != "envs" {
                return Err(Error::Config(format!("unknown suite key {key:?}")));
            }
        }
        if let Some(v) = t.get("models") {
            let list = v.as_array().ok_or_else(|| Error::Config("suite.models must be a list".into()))?;
            plan.models = list
                .iter()
                .map(|m| m.as_str().ok_or_else(|| Error::Config("suite.models entries are names".into()))?.parse())
                .collect::<Result<_>>()?;
        }
        if let Some(v) = t.get("envs") {
            let list = v.as_array().ok_or_else(|| Error::Config("suite.envs must be a list".into()))?;
            plan.envs = list
                .iter()
                .map(|e| {
                    e.as_integer()
                        .and_then(|i| u8::try_from(i).ok())
                        .ok_or_else(|| Error::Config("suite.envs entries are integers 1-4".into()))
                })
                .collect::<Result<_>>()?;
        }
        if plan.models.is_empty() || plan.envs.is_empty() {
            return Err(Error::Config("suite needs at least one model and one environment".into()));
        }
        Ok(plan)
    }

    /// Resolved configuration of every trial, environment-major.
    pub fn configs(&self, file: Option<&toml::Table>, flags: &Overrides) -> Result<Vec<RunConfig>> {
        let mut out = Vec::new();
        for &env in &self.envs {
            for &model in &self.models {
                let o = Overrides { model: Some(model), env: Some(env), ..flags.clone() };
                out.push(RunConfig::resolve(file, &o)?);
            }
        }
        Ok(out)
    }
}

pub fn trial_dir_name(config: &RunConfig) -> String {
    format!("{}-env{}", config.model, config.env)
}

/// Runs every trial (in parallel on `threads` workers), analyzes each and
/// writes the aggregate tables and charts into `out`. Rows come back in
/// plan order regardless of scheduling.
pub fn run_suite(
    configs: &[RunConfig],
    out: &Path,
    threads: usize,
    progress: &(dyn Fn(&RunConfig, &Progress) + Sync),
) -> Result<Vec<SummaryRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let rows: Vec<SummaryRow> = pool.install(|| {
        configs
            .par_iter()
            .map(|config| {
                let dir = out.join(trial_dir_name(config));
                run_trial(config, &dir, &mut |p| progress(config, p))?;
                let analysis = analyze(&dir.join(TRACE_FILE), config)?;
                write_analysis(&analysis, &dir.join(ANALYSIS_DIR))?;
                Ok(analysis.summary)
            })
            .collect::<Result<_>>()
    })?;
    write_suite_outputs(&rows, out)?;
    Ok(rows)
}

/// Digest of a suite: SHA-256 over its trial digests in order.
pub fn suite_digest(rows: &[SummaryRow]) -> String {
    let mut h = Sha256::new();
    for r in rows {
        h.update(r.digest.as_bytes());
        h.update(b"\n");
    }
    format!("{:x}", h.finalize())
}

/// Summary CSV, one pivot table and bar chart per metric, and the sheet of
/// SAI maps (environments as rows, models as columns, shared colour scale).
pub fn write_suite_outputs(rows: &[SummaryRow], out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::io(out.display().to_string(), e))?;
    let digest = suite_digest(rows);
    let mut text = format!("# digest {digest}\n{SUMMARY_HEADER}\n");
    for r in rows {
        text.push_str(&r.csv());
        text.push('\n');
    }
    write_text(&out.join(SUITE_SUMMARY_FILE), &text)?;

    let mut models: Vec<ModelName> = Vec::new();
    let mut envs: Vec<u8> = Vec::new();
    for r in rows {
        if !models.contains(&r.model) {
            models.push(r.model);
        }
        if !envs.contains(&r.environment) {
            envs.push(r.environment);
        }
    }
    let find = |e: u8, m: ModelName| rows.iter().find(|r| r.environment == e && r.model == m);
    for metric in Metric::ALL {
        let mut text = format!("# digest {digest}\nenvironment");
        for m in &models {
            write!(text, ",{m}").unwrap();
        }
        text.push('\n');
        let mut groups = Vec::new();
        for &e in &envs {
            write!(text, "{e}").unwrap();
            let mut group = Vec::new();
            for &m in &models {
                let v = find(e, m).map(|r| r.metric(metric));
                match v {
                    Some(v) => write!(text, ",{v}").unwrap(),
                    None => text.push(','),
                }
                group.push(v.unwrap_or(0.0));
            }
            text.push('\n');
            groups.push(group);
        }
        write_text(&out.join(format!("table_{}.csv", metric.name())), &text)?;
        let top = groups.iter().flatten().copied().fold(0.0, f64::max);
        let y_max = match metric {
            Metric::FracMiGt0 | Metric::FracMiGt1 => 1.0,
            _ => top,
        };
        bar_chart(&groups, y_max).write_ppm(&out.join(format!("bars_{}.ppm", metric.name())), &digest)?;
    }

    let mut max = 0.0f64;
    let mut maps = Vec::new();
    for &e in &envs {
        for &m in &models {
            let Some(r) = find(e, m) else { continue };
            let dir = out.join(format!("{}-env{}", r.model, r.environment)).join(ANALYSIS_DIR);
            let sai = read_matrix_file(&dir.join("sai.txt"))?;
            max = sai.blocks[0].iter().copied().fold(max, f64::max);
            maps.push((dir, sai));
        }
    }
    let mut tiles = Vec::new();
    for (dir, m) in &maps {
        let tile = render_hexmap(&m.blocks[0], &m.grid, HEXMAP_PX, max);
        tile.write_ppm(&dir.join("sai.ppm"), &m.digest)?;
        tiles.push(tile);
    }
    if !tiles.is_empty() {
        sheet(&tiles, models.len(), 4).write_ppm(&out.join("sai_sheet.ppm"), &digest)?;
    }
    Ok(())
}

/// Reads a suite summary back.
pub fn read_suite_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    text.lines().filter(|l| !l.starts_with('#') && *l != SUMMARY_HEADER && !l.is_empty()).map(SummaryRow::parse_csv).collect()
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Location of a trial's trace.
pub fn trace_path(dir: &Path) -> PathBuf {
    dir.join(TRACE_FILE)
}
