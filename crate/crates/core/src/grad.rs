//! Parameter-shift gradients of `L(theta) = <Z_c>` and gradient-variance
//! statistics.
//!
//! Two evaluators of the shift rule are provided. [`param_shift_gradient`]
//! runs the two shifted circuits per parameter occurrence literally.
//! [`GradientEngine`] evaluates the same difference
//! `(L(a + pi/2) - L(a - pi/2)) / 2 = Im <lambda| P |psi>` for every gate at
//! once with one forward and one reverse sweep, which is what the variance
//! estimator uses.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind, ParamExpr, PI};
use crate::error::{Error, Result};
use crate::rng::{mix64, SplitMix64, GOLDEN_GAMMA};
use crate::sim::{expect_z, ActiveQubits, StateVector};
use crate::transpiler::{ParamProvenance, TranspiledCircuit};

/// How the trainable parameters of a compiled circuit are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReparamMode {
    /// Every rotation angle of the physical circuit is an independent
    /// parameter.
    #[default]
    AllAngles,
    /// Physical angles stay tied to the logical symbols they came from;
    /// synthesized angles are frozen constants.
    SymbolDerived,
}

impl ReparamMode {
    pub fn name(self) -> &'static str {
        match self {
            ReparamMode::AllAngles => "all-angles",
            ReparamMode::SymbolDerived => "symbol-derived",
        }
    }
}

impl fmt::Display for ReparamMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReparamMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "all-angles" => Ok(ReparamMode::AllAngles),
            "symbol-derived" => Ok(ReparamMode::SymbolDerived),
            _ => Err(Error::Config(format!(
                "unknown reparameterization mode '{s}'"
            ))),
        }
    }
}

pub fn reparameterize(t: &TranspiledCircuit, mode: ReparamMode) -> Circuit {
    reparameterize_with(&t.physical, &t.provenance, t.logical_symbols, mode)
        .expect("transpiler output is consistent with its provenance")
}

/// [`reparameterize`] for a physical circuit and provenance held separately
/// (for instance read back from files). The physical circuit must carry one
/// symbol per rotation, as produced by the transpiler.
pub fn reparameterize_with(
    physical: &Circuit,
    provenance: &ParamProvenance,
    logical_symbols: usize,
    mode: ReparamMode,
) -> Result<Circuit> {
    match mode {
        ReparamMode::AllAngles => {
            let gates = physical
                .gates()
                .iter()
                .scan(0usize, |next, g| {
                    Some(match g.param() {
                        Some(_) => {
                            *next += 1;
                            g.with_param(ParamExpr::symbol(*next - 1))
                        }
                        None => *g,
                    })
                })
                .collect::<Vec<_>>();
            Circuit::new(physical.num_qubits(), physical.rotation_count(), gates)
        }
        ReparamMode::SymbolDerived => {
            let origins = provenance.origins();
            if origins.len() != physical.num_symbols() {
                return Err(Error::ParamCountMismatch {
                    expected: physical.num_symbols(),
                    got: origins.len(),
                });
            }
            let gates = physical
                .gates()
                .iter()
                .map(|g| match g.param() {
                    Some(ParamExpr::Affine { symbol, .. }) => {
                        g.with_param(origins[*symbol].to_expr())
                    }
                    _ => *g,
                })
                .collect::<Vec<_>>();
            Circuit::new(physical.num_qubits(), logical_symbols, gates)
        }
    }
}

fn check_cost_qubit(circuit: &Circuit, cost_qubit: usize) -> Result<()> {
    if cost_qubit >= circuit.num_qubits() {
        return Err(Error::QubitOutOfRange {
            index: cost_qubit,
            num_qubits: circuit.num_qubits(),
        });
    }
    Ok(())
}

/// Shift-rule gradient by direct evaluation: for every gate `g` carrying
/// `Affine(s, c, b)`, adds `c * (L(angle_g + pi/2) - L(angle_g - pi/2)) / 2`
/// to component `s`.
pub fn param_shift_gradient(
    circuit: &Circuit,
    theta: &[f64],
    cost_qubit: usize,
) -> Result<Vec<f64>> {
    check_cost_qubit(circuit, cost_qubit)?;
    let bound = circuit.bind(theta)?;
    let mut grad = vec![0.0; circuit.num_symbols()];
    for (i, g) in circuit.gates().iter().enumerate() {
        let Some(ParamExpr::Affine { symbol, coeff, .. }) = g.param().copied() else {
            continue;
        };
        let angle = bound.gates()[i].angle().expect("rotation is bound");
        let eval = |shift: f64| -> Result<f64> {
            let mut gates = circuit.gates().to_vec();
            gates[i] = g.with_param(ParamExpr::constant(angle + shift));
            let c = Circuit::new(circuit.num_qubits(), circuit.num_symbols(), gates)?;
            expect_z(&c.bind(theta)?, cost_qubit)
        };
        grad[symbol] += coeff.value() * (eval(PI / 2.0)? - eval(-PI / 2.0)?) / 2.0;
    }
    Ok(grad)
}

#[derive(Clone, Copy, Debug)]
struct Op {
    kind: GateKind,
    qubits: [usize; 2],
    param: Option<ParamExpr>,
}

impl Op {
    fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }
}

/// A circuit prepared for repeated cost and gradient evaluation on the
/// qubits it touches.
#[derive(Clone, Debug)]
pub struct GradientEngine {
    ops: Vec<Op>,
    num_active: usize,
    num_symbols: usize,
    cost: usize,
}

impl GradientEngine {
    pub fn new(circuit: &Circuit, cost_qubit: usize) -> Result<Self> {
        check_cost_qubit(circuit, cost_qubit)?;
        let touched = circuit
            .gates()
            .iter()
            .flat_map(|g| g.qubits().iter().copied())
            .chain([cost_qubit]);
        let active = ActiveQubits::new(circuit.num_qubits(), touched);
        // fail early on registers too wide to simulate
        StateVector::zero(active.len())?;
        let ops = circuit
            .gates()
            .iter()
            .map(|g| {
                let mut qubits = [0; 2];
                for (slot, &q) in qubits.iter_mut().zip(g.qubits()) {
                    *slot = active.dense(q).expect("touched qubit is active");
                }
                Op {
                    kind: g.kind(),
                    qubits,
                    param: g.param().copied(),
                }
            })
            .collect();
        Ok(GradientEngine {
            ops,
            num_active: active.len(),
            num_symbols: circuit.num_symbols(),
            cost: active.dense(cost_qubit).expect("cost qubit is active"),
        })
    }

    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    fn angles(&self, theta: &[f64]) -> Result<Vec<f64>> {
        if theta.len() != self.num_symbols {
            return Err(Error::ParamCountMismatch {
                expected: self.num_symbols,
                got: theta.len(),
            });
        }
        self.ops
            .iter()
            .map(|op| op.param.map_or(Ok(0.0), |p| p.eval(theta)))
            .collect()
    }

    fn forward(&self, angles: &[f64]) -> StateVector {
        let mut psi = StateVector::zero(self.num_active).expect("checked in new");
        for (op, &a) in self.ops.iter().zip(angles) {
            psi.apply(op.kind, op.qubits(), a, false);
        }
        psi
    }

    pub fn cost(&self, theta: &[f64]) -> Result<f64> {
        Ok(self.forward(&self.angles(theta)?).expect_z(self.cost))
    }

    pub fn gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let angles = self.angles(theta)?;
        let mut psi = self.forward(&angles);
        let mut lambda = psi.clone();
        lambda.apply_z(self.cost);
        let mut grad = vec![0.0; self.num_symbols];
        for (op, &a) in self.ops.iter().zip(&angles).rev() {
            if let Some(ParamExpr::Affine { symbol, coeff, .. }) = op.param {
                let overlap: Complex64 = lambda.generator_inner(op.kind, op.qubits[0], &psi);
                grad[symbol] += coeff.value() * overlap.im;
            }
            psi.apply(op.kind, op.qubits(), a, true);
            lambda.apply(op.kind, op.qubits(), a, true);
        }
        Ok(grad)
    }
}

/// Parameter point for sample `s` (1-based) of a run seeded with `seed`.
///
/// Sample `s` reads a splitmix64 stream whose initial state is
/// `mix64(seed + s * 0x9E3779B97F4A7C15)`; each angle is
/// `(next >> 11) * 2^-53 * 2pi`.
pub fn sample_theta(seed: u64, s: u64, num_params: usize) -> Vec<f64> {
    let sub_seed = seed.wrapping_add(s.wrapping_mul(GOLDEN_GAMMA));
    let mut rng = SplitMix64::new(mix64(sub_seed));
    (0..num_params).map(|_| rng.next_angle()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradStats {
    pub per_param_var: Vec<f64>,
    pub per_param_mean: Vec<f64>,
    /// Mean of `per_param_var`.
    pub grad_var: f64,
    /// Standard error of `grad_var` across samples.
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl GradStats {
    pub fn num_params(&self) -> usize {
        self.per_param_var.len()
    }

    /// Builds statistics from per-sample gradient vectors (all of equal
    /// length). Variances use the unbiased `S - 1` estimator. The standard
    /// error treats `grad_var` as the sample mean of
    /// `q_s = S/(S-1) * mean_i (g_is - mean_i)^2`.
    pub fn from_samples(grads: &[Vec<f64>], seed: u64) -> Result<GradStats> {
        let s = grads.len();
        if s < 2 {
            return Err(Error::TooFewSamples(s));
        }
        let p = grads[0].len();
        if p == 0 {
            return Ok(GradStats {
                per_param_var: vec![],
                per_param_mean: vec![],
                grad_var: 0.0,
                stderr: 0.0,
                samples: s,
                seed,
                warning: Some("circuit has no trainable parameters; grad_var set to 0".into()),
            });
        }
        let sf = s as f64;
        let mut mean = vec![0.0; p];
        for g in grads {
            for (m, x) in mean.iter_mut().zip(g) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= sf);
        let mut var = vec![0.0; p];
        let mut per_sample = Vec::with_capacity(s);
        for g in grads {
            let mut q = 0.0;
            for ((v, x), m) in var.iter_mut().zip(g).zip(&mean) {
                let d = (x - m) * (x - m);
                *v += d;
                q += d;
            }
            per_sample.push(q / p as f64 * sf / (sf - 1.0));
        }
        var.iter_mut().for_each(|v| *v /= sf - 1.0);
        let grad_var = var.iter().sum::<f64>() / p as f64;
        let q_mean = per_sample.iter().sum::<f64>() / sf;
        let q_var = per_sample.iter().map(|q| (q - q_mean).powi(2)).sum::<f64>() / (sf - 1.0);
        Ok(GradStats {
            per_param_var: var,
            per_param_mean: mean,
            grad_var,
            stderr: (q_var / sf).sqrt(),
            samples: s,
            seed,
            warning: None,
        })
    }
}

/// Gradient variance over `samples` uniform draws of `theta` in
/// `[0, 2pi)^P`. Samples are evaluated in parallel; the result does not
/// depend on the thread count.
pub fn grad_variance(
    circuit: &Circuit,
    samples: usize,
    seed: u64,
    cost_qubit: usize,
) -> Result<GradStats> {
    if samples < 2 {
        return Err(Error::TooFewSamples(samples));
    }
    let engine = GradientEngine::new(circuit, cost_qubit)?;
    let p = engine.num_symbols();
    let grads = (1..=samples as u64)
        .into_par_iter()
        .map(|s| engine.gradient(&sample_theta(seed, s, p)))
        .collect::<Result<Vec<_>>>()?;
    GradStats::from_samples(&grads, seed)
}

/// `grad_var(phys) - grad_var(log)`; positive means amplification.
pub fn delta_gradvar(phys: &GradStats, log: &GradStats) -> f64 {
    phys.grad_var - log.grad_var
}

/// Standard error of a difference of two independent estimates.
pub fn combined_stderr(a: &GradStats, b: &GradStats) -> f64 {
    a.stderr.hypot(b.stderr)
}
