//! Sweeps over (ansatz, qubits, repetitions) comparing logical and compiled
//! circuits, with CSV and SVG heatmap output.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzKind;
use crate::backend::{BackendModel, BackendRef};
use crate::error::{Error, Result};
use crate::grad::{grad_variance, reparameterize, GradStats, ReparamMode};
use crate::rng::GOLDEN_GAMMA;
use crate::transpiler::{constraint_violations, overhead, transpile, TranspileOptions};

/// Stride between per-cell seeds.
pub const CELL_SEED_STRIDE: u64 = 1_000_003;

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "VQCLAB_THREADS";

pub const CSV_HEADER: [&str; 21] = [
    "ansatz",
    "n",
    "reps",
    "P_log",
    "P_phys",
    "g1q_log",
    "g1q_phys",
    "g2q_log",
    "g2q_phys",
    "depth_log",
    "depth_phys",
    "delta_g1q",
    "delta_g2q",
    "delta_depth_dag",
    "delta_depth_paper",
    "gradvar_log",
    "gradvar_phys",
    "delta_gradvar",
    "stderr_log",
    "stderr_phys",
    "seed",
];

fn default_samples() -> usize {
    200
}

fn default_meta_seeds() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub ansatz: Vec<AnsatzKind>,
    pub qubits: Vec<usize>,
    pub reps: Vec<usize>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub backend: BackendRef,
    #[serde(default)]
    pub mode: ReparamMode,
    /// Independent repetitions of each cell's estimate; values above 1
    /// report the mean across repetitions and its standard error.
    #[serde(default = "default_meta_seeds")]
    pub meta_seeds: usize,
    #[serde(default)]
    pub transpile: TranspileOptions,
    #[serde(default)]
    pub out_csv: Option<PathBuf>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// JSON-lines checkpoint; finished cells found here are not recomputed.
    #[serde(default)]
    pub checkpoint: Option<PathBuf>,
}

impl Default for SweepConfig {
    /// Three ansatz families, n in {2..10 step 2}, reps in
    /// {1, 2, 4, 6, 8, 10}, 200 samples, heavy-hex(5, 11).
    fn default() -> Self {
        SweepConfig {
            ansatz: AnsatzKind::ALL.to_vec(),
            qubits: vec![2, 4, 6, 8, 10],
            reps: vec![1, 2, 4, 6, 8, 10],
            samples: default_samples(),
            base_seed: 0,
            backend: BackendRef::default(),
            mode: ReparamMode::AllAngles,
            meta_seeds: 1,
            transpile: TranspileOptions::default(),
            out_csv: None,
            out_dir: None,
            checkpoint: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub index: usize,
    pub ansatz: AnsatzKind,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ansatz.is_empty() || self.qubits.is_empty() || self.reps.is_empty() {
            return Err(Error::Config(
                "ansatz, qubits and reps must be non-empty".into(),
            ));
        }
        if let Some(n) = self.qubits.iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!("qubit counts must be >= 2, got {n}")));
        }
        if self.reps.contains(&0) {
            return Err(Error::Config("reps must be >= 1".into()));
        }
        if self.samples < 2 {
            return Err(Error::Config("samples must be >= 2".into()));
        }
        if self.meta_seeds == 0 {
            return Err(Error::Config("meta_seeds must be >= 1".into()));
        }
        Ok(())
    }

    /// Cells in canonical order: ansatz-major, then n, then reps.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &ansatz in &self.ansatz {
            for &n in &self.qubits {
                for &reps in &self.reps {
                    let index = out.len();
                    out.push(Cell {
                        index,
                        ansatz,
                        n,
                        reps,
                        seed: self
                            .base_seed
                            .wrapping_add(CELL_SEED_STRIDE.wrapping_mul(index as u64)),
                    });
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub ansatz: AnsatzKind,
    pub n: usize,
    pub reps: usize,
    pub p_log: usize,
    pub p_phys: usize,
    pub g1q_log: usize,
    pub g1q_phys: usize,
    pub g2q_log: usize,
    pub g2q_phys: usize,
    pub depth_log: usize,
    pub depth_phys: usize,
    pub delta_g1q: i64,
    pub delta_g2q: i64,
    pub delta_depth_dag: i64,
    pub delta_depth_paper: i64,
    pub gradvar_log: f64,
    pub gradvar_phys: f64,
    pub delta_gradvar: f64,
    pub stderr_log: f64,
    pub stderr_phys: f64,
    pub seed: u64,
    /// Seconds spent on the cell.
    #[serde(default)]
    pub wall_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepRecord {
    fn failed(cell: &Cell, err: String) -> Self {
        SweepRecord {
            ansatz: cell.ansatz,
            n: cell.n,
            reps: cell.reps,
            p_log: 0,
            p_phys: 0,
            g1q_log: 0,
            g1q_phys: 0,
            g2q_log: 0,
            g2q_phys: 0,
            depth_log: 0,
            depth_phys: 0,
            delta_g1q: 0,
            delta_g2q: 0,
            delta_depth_dag: 0,
            delta_depth_paper: 0,
            gradvar_log: 0.0,
            gradvar_phys: 0.0,
            delta_gradvar: 0.0,
            stderr_log: 0.0,
            stderr_phys: 0.0,
            seed: cell.seed,
            wall_time: 0.0,
            error: Some(err),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    /// Combined standard error of `delta_gradvar`.
    pub fn delta_stderr(&self) -> f64 {
        self.stderr_log.hypot(self.stderr_phys)
    }
}

/// Gradient variance and its standard error, averaged over `meta_seeds`
/// independent seeds when more than one is requested.
fn estimate(
    circuit: &crate::circuit::Circuit,
    samples: usize,
    seed: u64,
    meta_seeds: usize,
    cost_qubit: usize,
) -> Result<(f64, f64)> {
    if meta_seeds == 1 {
        let s = grad_variance(circuit, samples, seed, cost_qubit)?;
        return Ok((s.grad_var, s.stderr));
    }
    let runs = (0..meta_seeds as u64)
        .map(|m| {
            grad_variance(
                circuit,
                samples,
                seed.wrapping_add(m.wrapping_mul(GOLDEN_GAMMA)),
                cost_qubit,
            )
        })
        .collect::<Result<Vec<GradStats>>>()?;
    let k = meta_seeds as f64;
    let mean = runs.iter().map(|s| s.grad_var).sum::<f64>() / k;
    let var = runs
        .iter()
        .map(|s| (s.grad_var - mean).powi(2))
        .sum::<f64>()
        / (k - 1.0);
    Ok((mean, (var / k).sqrt()))
}

fn compute_cell(cfg: &SweepConfig, cell: &Cell, backend: &BackendModel) -> Result<SweepRecord> {
    let logical = cell.ansatz.build(cell.n, cell.reps)?;
    let t = transpile(&logical, backend, &cfg.transpile)?;
    let violations = constraint_violations(&t.physical, backend);
    if !violations.is_empty() {
        return Err(Error::InvalidCircuit(format!(
            "compiled circuit violates backend constraints: {}",
            violations.join("; ")
        )));
    }
    let physical = reparameterize(&t, cfg.mode);
    let (gv_log, se_log) = estimate(&logical, cfg.samples, cell.seed, cfg.meta_seeds, 0)?;
    let (gv_phys, se_phys) = estimate(
        &physical,
        cfg.samples,
        cell.seed,
        cfg.meta_seeds,
        t.cost_qubit(),
    )?;
    let o = overhead(&logical, &t.physical, cell.reps);
    let (ml, mp) = (t.metrics_before, t.metrics_after);
    Ok(SweepRecord {
        ansatz: cell.ansatz,
        n: cell.n,
        reps: cell.reps,
        p_log: logical.num_symbols(),
        p_phys: physical.num_symbols(),
        g1q_log: ml.g1q,
        g1q_phys: mp.g1q,
        g2q_log: ml.g2q,
        g2q_phys: mp.g2q,
        depth_log: ml.dag_depth,
        depth_phys: mp.dag_depth,
        delta_g1q: o.delta_g1q,
        delta_g2q: o.delta_g2q,
        delta_depth_dag: o.delta_depth_dag,
        delta_depth_paper: o.delta_depth_paper,
        gradvar_log: gv_log,
        gradvar_phys: gv_phys,
        delta_gradvar: gv_phys - gv_log,
        stderr_log: se_log,
        stderr_phys: se_phys,
        seed: cell.seed,
        wall_time: 0.0,
        error: None,
    })
}

/// Runs one cell; failures are captured in the record.
pub fn run_cell(cfg: &SweepConfig, cell: &Cell, backend: &BackendModel) -> SweepRecord {
    let start = Instant::now();
    match compute_cell(cfg, cell, backend) {
        Ok(mut r) => {
            r.wall_time = start.elapsed().as_secs_f64();
            r
        }
        Err(e) => SweepRecord::failed(cell, e.to_string()),
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| {
            Error::Config(format!(
                "{THREADS_ENV} must be a positive integer, got '{v}'"
            ))
        })?;
        builder = builder.num_threads(n.max(1));
    }
    builder.build().map_err(|e| Error::Config(e.to_string()))
}

fn read_checkpoint(path: &Path) -> Result<Vec<SweepRecord>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        // a torn final line from an interrupted run is skipped
        match serde_json::from_str::<SweepRecord>(&line) {
            Ok(r) => out.push(r),
            Err(e) => eprintln!(
                "checkpoint {}:{}: skipping unreadable record ({e})",
                path.display(),
                i + 1
            ),
        }
    }
    Ok(out)
}

/// Runs every cell of the sweep. Cells run in parallel and the result is in
/// canonical cell order, independent of scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let backend = cfg.backend.resolve()?;
    let cells = cfg.cells();

    let mut done: HashMap<(AnsatzKind, usize, usize, u64), SweepRecord> = HashMap::new();
    let mut sink = None;
    if let Some(path) = &cfg.checkpoint {
        for r in read_checkpoint(path)? {
            if r.is_ok() {
                done.insert((r.ansatz, r.n, r.reps, r.seed), r);
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        sink = Some(Mutex::new(file));
    }

    let pool = thread_pool()?;
    let mut records: Vec<(usize, SweepRecord)> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                if let Some(r) = done.get(&(cell.ansatz, cell.n, cell.reps, cell.seed)) {
                    return Ok((cell.index, r.clone()));
                }
                let rec = run_cell(cfg, cell, &backend);
                if let Some(sink) = &sink {
                    let line = serde_json::to_string(&rec).expect("record serializes");
                    let mut f = sink.lock().expect("checkpoint lock");
                    writeln!(f, "{line}")?;
                    f.flush()?;
                }
                Ok((cell.index, rec))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    records.sort_by_key(|&(i, _)| i);
    Ok(records.into_iter().map(|(_, r)| r).collect())
}

/// `%.{sig}g`-style formatting.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -5 || exp >= sig as i32 {
        format!("{}e{}", trim(mant), exp)
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    }
}

fn csv_row(r: &SweepRecord) -> Vec<String> {
    let f = |x: f64| format_sig(x, 9);
    vec![
        r.ansatz.name().to_string(),
        r.n.to_string(),
        r.reps.to_string(),
        r.p_log.to_string(),
        r.p_phys.to_string(),
        r.g1q_log.to_string(),
        r.g1q_phys.to_string(),
        r.g2q_log.to_string(),
        r.g2q_phys.to_string(),
        r.depth_log.to_string(),
        r.depth_phys.to_string(),
        r.delta_g1q.to_string(),
        r.delta_g2q.to_string(),
        r.delta_depth_dag.to_string(),
        r.delta_depth_paper.to_string(),
        f(r.gradvar_log),
        f(r.gradvar_phys),
        f(r.delta_gradvar),
        f(r.stderr_log),
        f(r.stderr_phys),
        r.seed.to_string(),
    ]
}

/// CSV text for the successful records, in the given order. Failed cells
/// are left out (they live in the checkpoint with their error string).
pub fn csv_string(records: &[SweepRecord]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in records.iter().filter(|r| r.is_ok()) {
        w.write_record(csv_row(r))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn emit_csv(records: &[SweepRecord], path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, csv_string(records)?)?;
    Ok(())
}

/// Parses CSV produced by [`emit_csv`]. `wall_time` is not stored and reads
/// back as 0.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected header {header:?}"),
        });
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let err = |col: usize| Error::Parse {
            line,
            msg: format!("bad value '{}' in column {}", &row[col], CSV_HEADER[col]),
        };
        let u = |col: usize| row[col].parse::<usize>().map_err(|_| err(col));
        let s = |col: usize| row[col].parse::<i64>().map_err(|_| err(col));
        let f = |col: usize| row[col].parse::<f64>().map_err(|_| err(col));
        out.push(SweepRecord {
            ansatz: row[0].parse().map_err(|_| err(0))?,
            n: u(1)?,
            reps: u(2)?,
            p_log: u(3)?,
            p_phys: u(4)?,
            g1q_log: u(5)?,
            g1q_phys: u(6)?,
            g2q_log: u(7)?,
            g2q_phys: u(8)?,
            depth_log: u(9)?,
            depth_phys: u(10)?,
            delta_g1q: s(11)?,
            delta_g2q: s(12)?,
            delta_depth_dag: s(13)?,
            delta_depth_paper: s(14)?,
            gradvar_log: f(15)?,
            gradvar_phys: f(16)?,
            delta_gradvar: f(17)?,
            stderr_log: f(18)?,
            stderr_phys: f(19)?,
            seed: row[20].parse().map_err(|_| err(20))?,
            wall_time: 0.0,
            error: None,
        });
    }
    Ok(out)
}

const NEG_RGB: (f64, f64, f64) = (33.0, 102.0, 172.0);
const POS_RGB: (f64, f64, f64) = (178.0, 24.0, 43.0);

/// Diverging scale: -1 -> blue, 0 -> white, +1 -> red.
fn diverging_color(t: f64) -> String {
    let t = t.clamp(-1.0, 1.0);
    let end = if t < 0.0 { NEG_RGB } else { POS_RGB };
    let a = t.abs();
    let mix = |c: f64| (255.0 + (c - 255.0) * a).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(end.0), mix(end.1), mix(end.2))
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// SVG heatmap of `delta_gradvar` for one ansatz: repetitions on the x axis,
/// qubit count on the y axis, color scale symmetric about 0.
pub fn heatmap_svg(records: &[SweepRecord], ansatz: AnsatzKind) -> Result<String> {
    let rows: Vec<&SweepRecord> = records
        .iter()
        .filter(|r| r.ansatz == ansatz && r.is_ok())
        .collect();
    let all: Vec<&SweepRecord> = records.iter().filter(|r| r.ansatz == ansatz).collect();
    if all.is_empty() {
        return Err(Error::Config(format!("no records for ansatz {ansatz}")));
    }
    let ns: Vec<usize> = all
        .iter()
        .map(|r| r.n)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let ls: Vec<usize> = all
        .iter()
        .map(|r| r.reps)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let lookup: HashMap<(usize, usize), f64> = rows
        .iter()
        .map(|r| ((r.n, r.reps), r.delta_gradvar))
        .collect();
    let missing: Vec<(usize, usize)> = ns
        .iter()
        .flat_map(|&n| ls.iter().map(move |&l| (n, l)))
        .filter(|k| !lookup.contains_key(k))
        .collect();
    if !missing.is_empty() {
        return Err(Error::IncompleteGrid(missing));
    }
    let scale = lookup.values().fold(0.0f64, |m, v| m.max(v.abs()));

    let (cw, ch, left, top) = (72.0, 40.0, 70.0, 50.0);
    let grid_w = cw * ls.len() as f64;
    let grid_h = ch * ns.len() as f64;
    let width = left + grid_w + 110.0;
    let height = top + grid_h + 60.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-size="15" text-anchor="middle">{} delta GradVar (physical - logical)</text>"#,
        left + grid_w / 2.0,
        xml_escape(ansatz.name())
    );
    // largest n on top
    for (yi, &n) in ns.iter().rev().enumerate() {
        let y = top + ch * yi as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{n}</text>"#,
            left - 8.0,
            y + ch / 2.0 + 4.0
        );
        for (xi, &l) in ls.iter().enumerate() {
            let x = left + cw * xi as f64;
            let v = lookup[&(n, l)];
            let t = if scale > 0.0 { v / scale } else { 0.0 };
            let _ = writeln!(
                svg,
                r#"<rect class="cell" x="{x}" y="{y}" width="{cw}" height="{ch}" fill="{}" stroke="grey" data-n="{n}" data-reps="{l}" data-value="{}"/>"#,
                diverging_color(t),
                format_sig(v, 9)
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-size="10" text-anchor="middle">{}</text>"#,
                x + cw / 2.0,
                y + ch / 2.0 + 3.5,
                format_sig(v, 3)
            );
        }
    }
    for (xi, &l) in ls.iter().enumerate() {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{l}</text>"#,
            left + cw * xi as f64 + cw / 2.0,
            top + grid_h + 16.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">repetitions</text>"#,
        left + grid_w / 2.0,
        top + grid_h + 40.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {})">qubits</text>"#,
        top + grid_h / 2.0,
        top + grid_h / 2.0
    );
    // color bar, top = +scale
    let bar_x = left + grid_w + 30.0;
    let steps = 20;
    let step_h = grid_h / steps as f64;
    for i in 0..steps {
        let t = 1.0 - 2.0 * (i as f64 + 0.5) / steps as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="{bar_x}" y="{}" width="16" height="{}" fill="{}"/>"#,
            top + step_h * i as f64,
            step_h,
            diverging_color(t)
        );
    }
    for (label, y) in [
        (format_sig(scale, 3), top + 4.0),
        ("0".to_string(), top + grid_h / 2.0 + 4.0),
        (format_sig(-scale, 3), top + grid_h + 4.0),
    ] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{y}" font-size="10">{label}</text>"#,
            bar_x + 20.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_heatmap_svg(
    records: &[SweepRecord],
    ansatz: AnsatzKind,
    path: impl AsRef<Path>,
) -> Result<()> {
    std::fs::write(path, heatmap_svg(records, ansatz)?)?;
    Ok(())
}

/// Writes `heatmap_<ansatz>.svg` into `dir` for every ansatz present.
pub fn emit_heatmaps(records: &[SweepRecord], dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let kinds: BTreeSet<AnsatzKind> = records.iter().map(|r| r.ansatz).collect();
    let mut out = Vec::new();
    for kind in kinds {
        let path = dir.join(format!("heatmap_{}.svg", kind.name()));
        emit_heatmap_svg(records, kind, &path)?;
        out.push(path);
    }
    Ok(out)
}
