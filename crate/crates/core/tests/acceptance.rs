//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria 1-6, 8 and 9 are gates and make the target fail. The
//! directional checks of criterion 7 are reproduction findings: they print
//! PASS or FAIL honestly, with a diagnostic on failure, but do not fail the
//! target.

mod common;

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use vqclab::backend::{make_heavy_hex, make_line, BackendModel};
use vqclab::circuit::{Circuit, Gate, ParamExpr};
use vqclab::grad::{
    grad_variance, param_shift_gradient, reparameterize, GradientEngine, ReparamMode,
};
use vqclab::harness::{csv_string, heatmap_svg, run_sweep, SweepConfig, SweepRecord, CSV_HEADER};
use vqclab::transpiler::{constraint_violations, transpile, TranspileOptions};
use vqclab::{AnsatzKind, BackendRef};

use common::{angles, finite_diff, transpile_fidelity};

const FIDELITY_TOL: f64 = 1e-10;
const FD_STEP: f64 = 1e-5;
const FD_TOL: f64 = 1e-6;
const ANALYTIC_TOL: f64 = 1e-12;
const RY_VAR_RANGE: (f64, f64) = (0.45, 0.55);
const NULL_SIGMAS: f64 = 3.0;
const SIGN_SIGMAS: f64 = 2.0;
const REAL_AMP_FRACTION: f64 = 0.60;
const SEED: u64 = 20240601;

struct Report {
    gate_failures: Vec<String>,
    finding_failures: Vec<String>,
}

impl Report {
    fn gate(&mut self, id: &str, ok: bool, detail: String) {
        println!("[{}] {id}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.gate_failures.push(id.to_string());
        }
    }

    fn finding(&mut self, id: &str, ok: bool, detail: String) {
        println!(
            "[{}] {id} (reproduction finding): {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.finding_failures.push(id.to_string());
        }
    }
}

type Grid = HashMap<(AnsatzKind, usize, usize), SweepRecord>;

fn grid(records: &[SweepRecord]) -> Grid {
    records
        .iter()
        .map(|r| ((r.ansatz, r.n, r.reps), r.clone()))
        .collect()
}

fn criterion_1_and_2(report: &mut Report) -> usize {
    let start = Instant::now();
    let mut checks = 0;
    let mut worst: f64 = 1.0;
    let mut violations = 0;
    let mut circuits = 0;
    let hh = make_heavy_hex(2, 3).unwrap();
    for kind in AnsatzKind::ALL {
        for n in 2..=5 {
            for reps in 1..=2 {
                let logical = kind.build(n, reps).unwrap();
                let mut backends = vec![make_line(n).unwrap()];
                if n <= hh.num_physical() {
                    backends.push(hh.clone());
                }
                for backend in &backends {
                    let t = transpile(&logical, backend, &TranspileOptions::default()).unwrap();
                    circuits += 1;
                    violations += constraint_violations(&t.physical, backend).len();
                    for s in 0..20 {
                        let theta = angles(SEED ^ (circuits * 100 + s), logical.num_symbols());
                        worst = worst.min(transpile_fidelity(&logical, &t, &theta));
                        checks += 1;
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report.gate(
        "criterion 1 transpiler soundness",
        worst >= 1.0 - FIDELITY_TOL && secs < 60.0,
        format!(
            "min fidelity = 1 - {:.2e} over {checks} (circuit, theta) pairs on {circuits} compiled circuits (tol 1e-10); {secs:.2} s (limit 60 s)",
            1.0 - worst
        ),
    );
    violations
}

fn count_violations(records: &[SweepRecord], backend: &BackendModel) -> (usize, usize) {
    let mut v = 0;
    for r in records {
        let logical = r.ansatz.build(r.n, r.reps).unwrap();
        let t = transpile(&logical, backend, &TranspileOptions::default()).unwrap();
        v += constraint_violations(&t.physical, backend).len();
    }
    (v, records.len())
}

/// Drops every qubit the circuit never touches, so that compiled circuits on
/// a large backend fit the dense oracle. Returns the compacted circuit and
/// the dense index of `keep`.
fn compact(c: &Circuit, keep: usize) -> (Circuit, usize) {
    let mut active = c.active_qubits();
    if !active.contains(&keep) {
        active.push(keep);
        active.sort_unstable();
    }
    let dense = |q: usize| active.binary_search(&q).unwrap();
    let gates = c
        .gates()
        .iter()
        .map(|g| {
            let qs: Vec<usize> = g.qubits().iter().map(|&q| dense(q)).collect();
            g.with_qubits(&qs).unwrap()
        })
        .collect();
    (
        Circuit::new(active.len(), c.num_symbols(), gates).unwrap(),
        dense(keep),
    )
}

fn criterion_3(report: &mut Report) {
    let backend = BackendRef::default().resolve().unwrap();
    let mut worst: f64 = 0.0;
    let mut components = 0;
    for kind in AnsatzKind::ALL {
        let logical = kind.build(4, 2).unwrap();
        let t = transpile(&logical, &backend, &TranspileOptions::default()).unwrap();
        let physical = reparameterize(&t, ReparamMode::AllAngles);
        for (circuit, q) in [(&logical, 0), (&physical, t.cost_qubit())] {
            let (small, q_small) = compact(circuit, q);
            for s in 0..10 {
                let theta = angles(SEED + 31 * s, circuit.num_symbols());
                let ps = param_shift_gradient(circuit, &theta, q).unwrap();
                let fd = finite_diff(&small, &theta, q_small, FD_STEP);
                for (a, b) in ps.iter().zip(&fd) {
                    worst = worst.max((a - b).abs());
                    components += 1;
                }
            }
        }
    }
    let ry = Circuit::new(1, 1, vec![Gate::ry(0, ParamExpr::symbol(0))]).unwrap();
    let engine = GradientEngine::new(&ry, 0).unwrap();
    let mut worst_ry: f64 = 0.0;
    for theta in angles(SEED, 50) {
        let g = param_shift_gradient(&ry, &[theta], 0).unwrap()[0];
        let fast = engine.gradient(&[theta]).unwrap()[0];
        worst_ry = worst_ry
            .max((g + theta.sin()).abs())
            .max((fast + theta.sin()).abs());
    }
    report.gate(
        "criterion 3 gradient correctness",
        worst <= FD_TOL && worst_ry <= ANALYTIC_TOL,
        format!(
            "max |shift - finite diff| = {worst:.2e} over {components} components (tol 1e-6, h = 1e-5); \
             1-qubit RY max |g + sin| = {worst_ry:.2e} (tol 1e-12)"
        ),
    );
}

fn criterion_4(report: &mut Report) {
    let start = Instant::now();
    let ry = Circuit::new(1, 1, vec![Gate::ry(0, ParamExpr::symbol(0))]).unwrap();
    let stats = grad_variance(&ry, 1000, SEED, 0).unwrap();
    let secs = start.elapsed().as_secs_f64();
    report.gate(
        "criterion 4 analytic variance fixture",
        (RY_VAR_RANGE.0..=RY_VAR_RANGE.1).contains(&stats.grad_var) && secs < 1.0,
        format!(
            "GradVar(RY, S=1000) = {:.4} +- {:.4} (accept [0.45, 0.55], analytic 0.5); {secs:.3} s (limit 1 s)",
            stats.grad_var, stats.stderr
        ),
    );
}

fn criterion_5(report: &mut Report) {
    let cfg = SweepConfig {
        qubits: vec![2, 4, 6],
        reps: vec![1, 4],
        samples: 200,
        base_seed: SEED,
        mode: ReparamMode::SymbolDerived,
        ..SweepConfig::default()
    };
    let recs = run_sweep(&cfg).unwrap();
    let failed = recs.iter().filter(|r| !r.is_ok()).count();
    let worst = recs
        .iter()
        .filter(|r| r.is_ok())
        .map(|r| r.delta_gradvar.abs() / r.delta_stderr())
        .fold(0.0, f64::max);
    let max_abs = recs
        .iter()
        .map(|r| r.delta_gradvar.abs())
        .fold(0.0, f64::max);
    report.gate(
        "criterion 5 control-arm nulls (symbol-derived)",
        failed == 0 && worst < NULL_SIGMAS,
        format!(
            "{} cells, max |dGradVar|/sigma = {worst:.2e} (limit 3), max |dGradVar| = {max_abs:.2e}, {failed} failed cells",
            recs.len()
        ),
    );
}

fn criterion_6(report: &mut Report) {
    let start = Instant::now();
    let ns = [2, 4, 6, 8, 10];
    let vals: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let c = AnsatzKind::EfficientSu2.build(n, 4).unwrap();
            grad_variance(&c, 500, SEED + n as u64, 0).unwrap().grad_var
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    let decreasing = vals.windows(2).all(|w| w[1] < w[0]);
    let listed: Vec<String> = ns
        .iter()
        .zip(&vals)
        .map(|(n, v)| format!("n={n}: {v:.3e}"))
        .collect();
    report.gate(
        "criterion 6 barren-plateau trend",
        decreasing && vals[4] < vals[1] && secs < 900.0,
        format!(
            "logical EfficientSU2, L=4, S=500: {}; strictly decreasing = {decreasing}; {secs:.1} s (limit 900 s)",
            listed.join(", ")
        ),
    );
}

fn criterion_7(report: &mut Report, g: &Grid, cfg: &SweepConfig) {
    let z = |r: &SweepRecord| r.delta_gradvar / r.delta_stderr();
    let fmt = |r: &SweepRecord| format!("{:+.2e} ({:+.1} sigma)", r.delta_gradvar, z(r));

    let esu = |n: usize, l: usize| &g[&(AnsatzKind::EfficientSu2, n, l)];
    let a: Vec<&SweepRecord> = [4, 6, 8].iter().map(|&n| esu(n, 1)).collect();
    let a_ok = a
        .iter()
        .all(|r| r.delta_gradvar > SIGN_SIGMAS * r.delta_stderr());
    report.finding(
        "criterion 7a EfficientSU2 shallow amplification",
        a_ok,
        format!(
            "L=1, n=4,6,8: {} (need > +2 sigma)",
            a.iter().map(|r| fmt(r)).collect::<Vec<_>>().join(", ")
        ),
    );

    let b_ok = [4, 6, 8]
        .iter()
        .all(|&n| esu(n, 10).delta_gradvar.abs() < esu(n, 1).delta_gradvar.abs());
    report.finding(
        "criterion 7b EfficientSU2 deep near-zero",
        b_ok,
        format!(
            "|dGradVar| L=10 vs L=1: {} (need L=10 smaller)",
            [4, 6, 8]
                .iter()
                .map(|&n| format!(
                    "n={n}: {:.2e} vs {:.2e}",
                    esu(n, 10).delta_gradvar.abs(),
                    esu(n, 1).delta_gradvar.abs()
                ))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    );

    let ttn: Vec<&SweepRecord> = cfg
        .qubits
        .iter()
        .flat_map(|&n| cfg.reps.iter().map(move |&l| (n, l)))
        .map(|(n, l)| &g[&(AnsatzKind::Ttn, n, l)])
        .collect();
    let c1_fail = ttn
        .iter()
        .filter(|r| r.delta_gradvar < -SIGN_SIGMAS * r.delta_stderr())
        .count();
    let worst = ttn.iter().map(|r| z(r)).fold(f64::INFINITY, f64::min);
    let chain: Vec<&SweepRecord> = cfg
        .reps
        .iter()
        .map(|&l| &g[&(AnsatzKind::Ttn, 8, l)])
        .collect();
    let c2_ok = chain.windows(2).all(|w| {
        w[1].delta_gradvar
            <= w[0].delta_gradvar + SIGN_SIGMAS * w[0].delta_stderr().hypot(w[1].delta_stderr())
    });
    report.finding(
        "criterion 7c TTN no significant suppression, decays with L",
        c1_fail == 0 && c2_ok,
        format!(
            "{c1_fail}/{} cells below -2 sigma (most extreme {worst:+.1} sigma); n=8 non-increasing within 2 sigma = {c2_ok} [{}]",
            ttn.len(),
            chain.iter().map(|r| format!("{:+.2e}", r.delta_gradvar)).collect::<Vec<_>>().join(", ")
        ),
    );

    let ra: Vec<&SweepRecord> = g
        .values()
        .filter(|r| r.ansatz == AnsatzKind::RealAmplitudes)
        .collect();
    let good = ra
        .iter()
        .filter(|r| r.delta_gradvar <= SIGN_SIGMAS * r.delta_stderr())
        .count();
    let frac = good as f64 / ra.len() as f64;
    report.finding(
        "criterion 7d RealAmplitudes negative or near-zero",
        frac >= REAL_AMP_FRACTION,
        format!(
            "{good}/{} cells ({:.0}%) have dGradVar <= +2 sigma (need >= 60%)",
            ra.len(),
            100.0 * frac
        ),
    );
}

/// Compares both reparameterization modes on the cells criterion 7 looks
/// at, and shows how many compiled-circuit angles have an identically zero
/// gradient under AllAngles.
fn criterion_7_diagnostic(all_angles: &Grid, backend: &BackendModel) {
    println!("  diagnostic: dGradVar under both reparameterization modes (S=500)");
    println!(
        "  {:<16} {:>3} {:>3} {:>7} {:>7} {:>12} {:>12} {:>10}",
        "ansatz", "n", "L", "P_log", "P_phys", "all-angles", "sym-derived", "zero-grad"
    );
    let cells = [
        (AnsatzKind::EfficientSu2, 4, 1),
        (AnsatzKind::EfficientSu2, 8, 1),
        (AnsatzKind::EfficientSu2, 8, 10),
        (AnsatzKind::Ttn, 4, 1),
        (AnsatzKind::Ttn, 8, 1),
        (AnsatzKind::Ttn, 8, 10),
        (AnsatzKind::RealAmplitudes, 8, 1),
        (AnsatzKind::RealAmplitudes, 8, 10),
    ];
    for (kind, n, l) in cells {
        let r = &all_angles[&(kind, n, l)];
        let logical = kind.build(n, l).unwrap();
        let t = transpile(&logical, backend, &TranspileOptions::default()).unwrap();
        let tied = reparameterize(&t, ReparamMode::SymbolDerived);
        let free = reparameterize(&t, ReparamMode::AllAngles);
        let log = grad_variance(&logical, 500, r.seed, 0).unwrap();
        let phys_tied = grad_variance(&tied, 500, r.seed, t.cost_qubit()).unwrap();
        let phys_free = grad_variance(&free, 500, r.seed, t.cost_qubit()).unwrap();
        let dead = phys_free
            .per_param_var
            .iter()
            .filter(|&&v| v < 1e-20)
            .count();
        println!(
            "  {:<16} {n:>3} {l:>3} {:>7} {:>7} {:>+12.3e} {:>+12.3e} {:>10}",
            kind.name(),
            logical.num_symbols(),
            free.num_symbols(),
            phys_free.grad_var - log.grad_var,
            phys_tied.grad_var - log.grad_var,
            format!("{dead}/{}", free.num_symbols()),
        );
    }
    println!(
        "  note: symbol-derived shifts are zero by construction; under all-angles every RY becomes SX RZ SX RZ with \
         two free angles, and angles that commute with the final Z readout carry zero gradient"
    );
}

fn criterion_8(report: &mut Report, g: &Grid, cfg: &SweepConfig) {
    let negative = g.values().filter(|r| r.delta_g2q < 0).count();
    let mut monotone = true;
    for &l in &cfg.reps {
        let seq: Vec<i64> = cfg
            .qubits
            .iter()
            .map(|&n| g[&(AnsatzKind::EfficientSu2, n, l)].delta_g2q)
            .collect();
        monotone &= seq.windows(2).all(|w| w[1] >= w[0]);
    }
    let mut dominated = 0;
    let mut compared = 0;
    for &n in cfg.qubits.iter().filter(|&&n| n >= 4) {
        for &l in &cfg.reps {
            compared += 1;
            if g[&(AnsatzKind::EfficientSu2, n, l)].delta_g2q
                > g[&(AnsatzKind::RealAmplitudes, n, l)].delta_g2q
            {
                dominated += 1;
            }
        }
    }
    let max = g.values().map(|r| r.delta_g2q).max().unwrap_or(0);
    report.gate(
        "criterion 8 structural growth",
        negative == 0 && monotone && dominated == compared,
        format!(
            "{negative} cells with dG2q < 0; EfficientSU2 dG2q non-decreasing in n for every L = {monotone}; \
             EfficientSU2 > RealAmplitudes at {dominated}/{compared} cells (n >= 4); max dG2q = {max}"
        ),
    );
}

fn main() -> ExitCode {
    let mut report = Report {
        gate_failures: Vec::new(),
        finding_failures: Vec::new(),
    };
    let total = Instant::now();
    println!("acceptance suite");

    let v_small = criterion_1_and_2(&mut report);
    criterion_3(&mut report);
    criterion_4(&mut report);
    criterion_5(&mut report);
    criterion_6(&mut report);

    let cfg = SweepConfig {
        base_seed: SEED,
        ..SweepConfig::default()
    };
    let backend = cfg.backend.resolve().unwrap();
    let t0 = Instant::now();
    let run1 = run_sweep(&cfg).unwrap();
    let sweep_secs = t0.elapsed().as_secs_f64();
    let run2 = run_sweep(&cfg).unwrap();
    let failed = run1.iter().filter(|r| !r.is_ok()).count();

    let (v_sweep, n_sweep) = count_violations(&run1, &backend);
    report.gate(
        "criterion 2 constraint satisfaction",
        v_small == 0 && v_sweep == 0 && failed == 0,
        format!(
            "{v_small} violations on criterion-1 circuits, {v_sweep} on {n_sweep} default-sweep circuits, {failed} failed cells"
        ),
    );

    let g200 = grid(&run1);
    criterion_8(&mut report, &g200, &cfg);

    let csv1 = csv_string(&run1).unwrap();
    let csv2 = csv_string(&run2).unwrap();
    let header_ok = csv1.lines().next() == Some(CSV_HEADER.join(",").as_str());
    let out_dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&out_dir).unwrap();
    std::fs::write(out_dir.join("default_sweep.csv"), &csv1).unwrap();
    let mut svg_ok = true;
    for kind in AnsatzKind::ALL {
        match heatmap_svg(&run1, kind) {
            Ok(svg) => {
                svg_ok &= roxmltree::Document::parse(&svg).is_ok();
                std::fs::write(out_dir.join(format!("heatmap_{}.svg", kind.name())), svg).unwrap();
            }
            Err(_) => svg_ok = false,
        }
    }
    report.gate(
        "criterion 9 determinism and format",
        csv1 == csv2 && header_ok && svg_ok && sweep_secs < 1800.0,
        format!(
            "two default sweeps byte-identical = {}; header exact = {header_ok}; 3 heatmaps well-formed XML = {svg_ok}; \
             default sweep {sweep_secs:.1} s on {} thread(s) (limit 1800 s); outputs in {}",
            csv1 == csv2,
            rayon::current_num_threads(),
            out_dir.display()
        ),
    );

    let cfg500 = SweepConfig {
        samples: 500,
        ..cfg.clone()
    };
    let run500 = run_sweep(&cfg500).unwrap();
    let g500 = grid(&run500);
    criterion_7(&mut report, &g500, &cfg500);
    if !report.finding_failures.is_empty() {
        criterion_7_diagnostic(&g500, &backend);
    }

    println!(
        "summary: {} gate failure(s) {:?}, {} finding(s) not reproduced {:?}, total {:.1} s",
        report.gate_failures.len(),
        report.gate_failures,
        report.finding_failures.len(),
        report.finding_failures,
        total.elapsed().as_secs_f64()
    );
    if report.gate_failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
