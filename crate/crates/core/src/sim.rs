//! Dense statevector simulation and the `<Z_q>` cost.
//!
//! Qubit 0 is the least significant bit of the amplitude index. Rotations
//! are `exp(-i angle P / 2)`; `SX` is the principal square root of `X`.
//!
//! Wide physical circuits usually touch only a few of the device's qubits,
//! so [`simulate_active`] and [`expect_z`] simulate only the touched qubits
//! (idle qubits stay in `|0>`).

use num_complex::Complex64;

use crate::circuit::{ConcreteCircuit, GateKind};
use crate::error::{Error, Result};

/// Largest dense register the simulator allocates.
pub const MAX_SIM_QUBITS: usize = 24;

type C = Complex64;
pub(crate) type Mat2 = [[C; 2]; 2];

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Matrix of a single-qubit gate. `angle` is ignored for fixed gates.
pub(crate) fn matrix_1q(kind: GateKind, angle: f64) -> Mat2 {
    let (c, s) = ((angle * 0.5).cos(), (angle * 0.5).sin());
    match kind {
        GateKind::RX => [
            [C::new(c, 0.0), C::new(0.0, -s)],
            [C::new(0.0, -s), C::new(c, 0.0)],
        ],
        GateKind::RY => [
            [C::new(c, 0.0), C::new(-s, 0.0)],
            [C::new(s, 0.0), C::new(c, 0.0)],
        ],
        GateKind::RZ => [[C::new(c, -s), ZERO], [ZERO, C::new(c, s)]],
        GateKind::SX => [
            [C::new(0.5, 0.5), C::new(0.5, -0.5)],
            [C::new(0.5, -0.5), C::new(0.5, 0.5)],
        ],
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::H => {
            let h = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            [[h, h], [h, -h]]
        }
        GateKind::CX | GateKind::SWAP => unreachable!("{kind} is a two-qubit gate"),
    }
}

fn dagger(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C>,
}

impl StateVector {
    /// `|0...0>`
    pub fn zero(num_qubits: usize) -> Result<StateVector> {
        if num_qubits > MAX_SIM_QUBITS {
            return Err(Error::TooManyQubits {
                active: num_qubits,
                limit: MAX_SIM_QUBITS,
            });
        }
        let mut amps = vec![ZERO; 1 << num_qubits];
        amps[0] = ONE;
        Ok(StateVector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &StateVector) -> C {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `<Z_q>`; panics if `q` is out of range.
    pub fn expect_z(&self, q: usize) -> f64 {
        assert!(q < self.num_qubits, "qubit {q} out of range");
        let mask = 1usize << q;
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if i & mask == 0 {
                    a.norm_sqr()
                } else {
                    -a.norm_sqr()
                }
            })
            .sum()
    }

    pub(crate) fn apply_matrix(&mut self, q: usize, m: &Mat2) {
        let stride = 1usize << q;
        for base in (0..self.amps.len()).step_by(stride << 1) {
            for i in base..base + stride {
                let (a, b) = (self.amps[i], self.amps[i + stride]);
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[i + stride] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    fn apply_phase(&mut self, q: usize, lo: C, hi: C) {
        let mask = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if i & mask == 0 { lo } else { hi };
        }
    }

    fn apply_x(&mut self, q: usize) {
        let stride = 1usize << q;
        for base in (0..self.amps.len()).step_by(stride << 1) {
            for i in base..base + stride {
                self.amps.swap(i, i + stride);
            }
        }
    }

    fn apply_cx(&mut self, control: usize, target: usize) {
        let (cm, tm) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
    }

    fn apply_swap(&mut self, a: usize, b: usize) {
        let (am, bm) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & am != 0 && i & bm == 0 {
                self.amps.swap(i, (i & !am) | bm);
            }
        }
    }

    /// Applies a gate, or its inverse when `inverse` is set.
    pub(crate) fn apply(&mut self, kind: GateKind, qubits: &[usize], angle: f64, inverse: bool) {
        match kind {
            GateKind::CX => self.apply_cx(qubits[0], qubits[1]),
            GateKind::SWAP => self.apply_swap(qubits[0], qubits[1]),
            GateKind::X => self.apply_x(qubits[0]),
            GateKind::RZ => {
                let a = if inverse { -angle } else { angle };
                let (c, s) = ((a * 0.5).cos(), (a * 0.5).sin());
                self.apply_phase(qubits[0], C::new(c, -s), C::new(c, s));
            }
            GateKind::RX | GateKind::RY => {
                let a = if inverse { -angle } else { angle };
                self.apply_matrix(qubits[0], &matrix_1q(kind, a));
            }
            GateKind::SX | GateKind::H => {
                let m = matrix_1q(kind, 0.0);
                self.apply_matrix(qubits[0], &if inverse { dagger(&m) } else { m });
            }
        }
    }

    /// `<self| P_q |other>` for the generator `P` of a rotation gate.
    pub(crate) fn generator_inner(&self, kind: GateKind, q: usize, other: &StateVector) -> C {
        let mask = 1usize << q;
        let (l, r) = (&self.amps, &other.amps);
        match kind {
            GateKind::RZ => (0..l.len())
                .map(|i| {
                    let t = l[i].conj() * r[i];
                    if i & mask == 0 {
                        t
                    } else {
                        -t
                    }
                })
                .sum(),
            GateKind::RX => (0..l.len()).map(|i| l[i].conj() * r[i ^ mask]).sum(),
            GateKind::RY => (0..l.len())
                .map(|i| {
                    // (Y r)_i = -i r_{i|m} on bit 0, +i r_{i&!m} on bit 1
                    let t = l[i].conj() * r[i ^ mask];
                    if i & mask == 0 {
                        C::new(t.im, -t.re)
                    } else {
                        C::new(-t.im, t.re)
                    }
                })
                .sum(),
            _ => unreachable!("{kind} has no generator"),
        }
    }

    pub(crate) fn apply_z(&mut self, q: usize) {
        self.apply_phase(q, ONE, -ONE);
    }
}

/// Maps the qubits a circuit touches (plus `extra`) onto a dense register.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActiveQubits {
    /// Dense index -> original qubit, ascending.
    pub qubits: Vec<usize>,
    dense: Vec<Option<usize>>,
}

impl ActiveQubits {
    pub fn new(num_qubits: usize, touched: impl IntoIterator<Item = usize>) -> Self {
        let mut used = vec![false; num_qubits];
        for q in touched {
            used[q] = true;
        }
        let qubits: Vec<usize> = (0..num_qubits).filter(|&q| used[q]).collect();
        let mut dense = vec![None; num_qubits];
        for (d, &q) in qubits.iter().enumerate() {
            dense[q] = Some(d);
        }
        ActiveQubits { qubits, dense }
    }

    pub fn of(circuit: &ConcreteCircuit, extra: &[usize]) -> Self {
        let touched = circuit
            .gates()
            .iter()
            .flat_map(|g| g.qubits().iter().copied())
            .chain(extra.iter().copied());
        ActiveQubits::new(circuit.num_qubits(), touched)
    }

    pub fn dense(&self, q: usize) -> Option<usize> {
        self.dense.get(q).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }
}

fn run(circuit: &ConcreteCircuit, active: &ActiveQubits) -> Result<StateVector> {
    let mut state = StateVector::zero(active.len())?;
    let mut dq = [0usize; 2];
    for g in circuit.gates() {
        for (slot, &q) in dq.iter_mut().zip(g.qubits()) {
            *slot = active.dense(q).expect("touched qubit is active");
        }
        state.apply(
            g.kind(),
            &dq[..g.qubits().len()],
            g.angle().unwrap_or(0.0),
            false,
        );
    }
    Ok(state)
}

/// Evolves `|0...0>` through the full register of the circuit.
pub fn simulate(circuit: &ConcreteCircuit) -> Result<StateVector> {
    let all = ActiveQubits::new(circuit.num_qubits(), 0..circuit.num_qubits());
    run(circuit, &all)
}

/// Simulates only the qubits the circuit touches, plus `extra`.
pub fn simulate_active(
    circuit: &ConcreteCircuit,
    extra: &[usize],
) -> Result<(StateVector, ActiveQubits)> {
    if let Some(&q) = extra.iter().find(|&&q| q >= circuit.num_qubits()) {
        return Err(Error::QubitOutOfRange {
            index: q,
            num_qubits: circuit.num_qubits(),
        });
    }
    let active = ActiveQubits::of(circuit, extra);
    Ok((run(circuit, &active)?, active))
}

/// `<Z_qubit>` after running the circuit from `|0...0>`.
pub fn expect_z(circuit: &ConcreteCircuit, qubit: usize) -> Result<f64> {
    let (state, active) = simulate_active(circuit, &[qubit])?;
    Ok(state.expect_z(active.dense(qubit).expect("cost qubit is active")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Circuit, Gate, ParamExpr, PI};

    fn concrete(n: usize, gates: Vec<Gate>) -> ConcreteCircuit {
        ConcreteCircuit::try_from(&Circuit::new(n, 0, gates).unwrap()).unwrap()
    }

    fn ry(q: usize, a: f64) -> Gate {
        Gate::ry(q, ParamExpr::Const(a))
    }

    #[test]
    fn empty_two_qubits() {
        let s = simulate(&concrete(2, vec![])).unwrap();
        assert_eq!(s.amplitudes(), &[ONE, ZERO, ZERO, ZERO]);
    }

    #[test]
    fn x_flips() {
        let s = simulate(&concrete(1, vec![Gate::x(0)])).unwrap();
        assert_eq!(s.amplitudes(), &[ZERO, ONE]);
    }

    #[test]
    fn sx_squared_is_x() {
        let s = simulate(&concrete(1, vec![Gate::sx(0), Gate::sx(0)])).unwrap();
        assert!((s.amplitudes()[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expectation_examples() {
        assert!((expect_z(&concrete(1, vec![ry(0, PI)]), 0).unwrap() + 1.0).abs() < 1e-12);
        let c = concrete(2, vec![ry(0, PI / 2.0), Gate::cx(0, 1)]);
        assert!(expect_z(&c, 0).unwrap().abs() < 1e-12);
        assert!(expect_z(&c, 2).is_err());
    }

    #[test]
    fn swap_moves_expectation() {
        let prep = vec![ry(0, 0.3), ry(1, 1.9), Gate::cx(0, 1), ry(2, 2.2)];
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            let mut with = prep.clone();
            with.push(Gate::swap(a, b));
            let lhs = expect_z(&concrete(3, with), a).unwrap();
            let rhs = expect_z(&concrete(3, prep.clone()), b).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn idle_qubits_are_not_allocated() {
        let c = concrete(60, vec![ry(57, 1.0), Gate::cx(57, 3)]);
        let (s, active) = simulate_active(&c, &[40]).unwrap();
        assert_eq!(active.qubits, vec![3, 40, 57]);
        assert_eq!(s.num_qubits(), 3);
        assert!((expect_z(&c, 57).unwrap() - 1.0f64.cos()).abs() < 1e-12);
        assert_eq!(expect_z(&c, 40).unwrap(), 1.0);
        assert!(matches!(simulate(&c), Err(Error::TooManyQubits { .. })));
    }

    #[test]
    fn inverse_undoes_every_gate() {
        let mut s = StateVector::zero(2).unwrap();
        s.apply(GateKind::H, &[0], 0.0, false);
        s.apply(GateKind::RY, &[1], 0.4, false);
        let before = s.clone();
        for (k, q, a) in [
            (GateKind::RX, vec![0], 0.7),
            (GateKind::RY, vec![1], 1.1),
            (GateKind::RZ, vec![0], 2.3),
            (GateKind::SX, vec![1], 0.0),
            (GateKind::H, vec![0], 0.0),
            (GateKind::X, vec![1], 0.0),
            (GateKind::CX, vec![1, 0], 0.0),
            (GateKind::SWAP, vec![0, 1], 0.0),
        ] {
            s.apply(k, &q, a, false);
            s.apply(k, &q, a, true);
            assert!((s.inner(&before).norm() - 1.0).abs() < 1e-12, "{k}");
        }
    }
}
