//! Test oracles that share no code with the library's simulator: textbook
//! gate matrices applied to a dense state vector.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use vqclab::circuit::ConcreteCircuit;
use vqclab::transpiler::TranspiledCircuit;
use vqclab::GateKind;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn gate_matrix(kind: GateKind, angle: f64) -> [[C; 2]; 2] {
    let (co, si) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match kind {
        GateKind::RX => [[c(co, 0.0), c(0.0, -si)], [c(0.0, -si), c(co, 0.0)]],
        GateKind::RY => [[c(co, 0.0), c(-si, 0.0)], [c(si, 0.0), c(co, 0.0)]],
        GateKind::RZ => [[c(co, -si), c(0.0, 0.0)], [c(0.0, 0.0), c(co, si)]],
        GateKind::SX => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
        GateKind::X => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        GateKind::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        k => panic!("{k:?} is not a one-qubit gate"),
    }
}

/// Full-register simulation from |0...0>; qubit q is bit q of the index.
pub fn run(circuit: &ConcreteCircuit) -> Vec<C> {
    let n = circuit.num_qubits();
    assert!(n <= 20, "oracle is dense");
    let mut psi = vec![c(0.0, 0.0); 1 << n];
    psi[0] = c(1.0, 0.0);
    for g in circuit.gates() {
        let q = g.qubits();
        match g.kind() {
            GateKind::CX => {
                let (ctl, tgt) = (1usize << q[0], 1usize << q[1]);
                for i in 0..psi.len() {
                    if i & ctl != 0 && i & tgt == 0 {
                        psi.swap(i, i | tgt);
                    }
                }
            }
            GateKind::SWAP => {
                let (a, b) = (1usize << q[0], 1usize << q[1]);
                for i in 0..psi.len() {
                    if i & a != 0 && i & b == 0 {
                        psi.swap(i, (i & !a) | b);
                    }
                }
            }
            kind => {
                let m = gate_matrix(kind, g.angle().unwrap_or(0.0));
                let bit = 1usize << q[0];
                for i in 0..psi.len() {
                    if i & bit == 0 {
                        let (a0, a1) = (psi[i], psi[i | bit]);
                        psi[i] = m[0][0] * a0 + m[0][1] * a1;
                        psi[i | bit] = m[1][0] * a0 + m[1][1] * a1;
                    }
                }
            }
        }
    }
    psi
}

pub fn expect_z(psi: &[C], q: usize) -> f64 {
    psi.iter()
        .enumerate()
        .map(|(i, a)| {
            if i >> q & 1 == 1 {
                -a.norm_sqr()
            } else {
                a.norm_sqr()
            }
        })
        .sum()
}

/// Embeds a logical state into the physical register: logical qubit i sits
/// on physical `layout[i]`, every other physical qubit is |0>.
pub fn embed(logical: &[C], layout: &[usize], num_physical: usize) -> Vec<C> {
    let mut out = vec![c(0.0, 0.0); 1 << num_physical];
    for (idx, &a) in logical.iter().enumerate() {
        let p: usize = layout
            .iter()
            .enumerate()
            .filter(|&(i, _)| idx >> i & 1 == 1)
            .map(|(_, &phys)| 1usize << phys)
            .sum();
        out[p] = a;
    }
    out
}

/// |<a|b>|^2, insensitive to global phase.
pub fn fidelity(a: &[C], b: &[C]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .sum::<C>()
        .norm_sqr()
}

/// Fidelity between the logical circuit and the compiled circuit bound at
/// the same logical angles, after undoing the final-layout permutation.
pub fn transpile_fidelity(logical: &vqclab::Circuit, t: &TranspiledCircuit, theta: &[f64]) -> f64 {
    let psi_log = run(&logical.bind(theta).unwrap());
    let psi_phys = run(&t.bind_logical(theta).unwrap());
    let n_phys = t.physical.num_qubits();
    fidelity(
        &embed(&psi_log, t.final_layout.as_slice(), n_phys),
        &psi_phys,
    )
}

/// Central finite-difference gradient of <Z_q> using the oracle simulator.
pub fn finite_diff(circuit: &vqclab::Circuit, theta: &[f64], q: usize, h: f64) -> Vec<f64> {
    (0..theta.len())
        .map(|k| {
            let mut p = theta.to_vec();
            p[k] += h;
            let up = expect_z(&run(&circuit.bind(&p).unwrap()), q);
            p[k] -= 2.0 * h;
            let down = expect_z(&run(&circuit.bind(&p).unwrap()), q);
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `k` angles in [0, 2pi) from a seeded stream.
pub fn angles(seed: u64, k: usize) -> Vec<f64> {
    let mut rng = vqclab::rng::SplitMix64::new(seed);
    (0..k).map(|_| rng.next_angle()).collect()
}
