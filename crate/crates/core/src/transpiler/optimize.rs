//! Peephole optimization on native-basis circuits.
//!
//! Rules, applied in one left-to-right scan and repeated until nothing
//! changes:
//! - adjacent RZ on a qubit merge when the sum is representable
//! - `RZ(0)` is dropped
//! - adjacent identical CX pairs cancel
//! - four adjacent SX on a qubit cancel
//!
//! "Adjacent" means no other gate touches the involved qubit(s) in between.

use crate::circuit::{Circuit, Gate, GateKind};

pub fn optimize(circuit: &Circuit) -> Circuit {
    let mut gates = circuit.gates().to_vec();
    while let Some(next) = pass(&gates, circuit.num_qubits()) {
        gates = next;
    }
    Circuit::new(circuit.num_qubits(), circuit.num_symbols(), gates)
        .expect("optimization preserves validity")
}

/// One scan; `None` when the circuit is already a fixpoint.
fn pass(gates: &[Gate], num_qubits: usize) -> Option<Vec<Gate>> {
    let mut slots: Vec<Option<Gate>> = Vec::with_capacity(gates.len());
    // per-qubit stack of live slot indices
    let mut wire: Vec<Vec<usize>> = vec![Vec::new(); num_qubits];
    let mut changed = false;

    for g in gates {
        match g.kind() {
            GateKind::RZ => {
                let q = g.qubits()[0];
                let param = *g.param().expect("RZ has a parameter");
                let prev = wire[q].last().copied();
                let merged = prev.and_then(|j| {
                    let p = slots[j].as_ref()?;
                    (p.kind() == GateKind::RZ)
                        .then(|| p.param()?.try_add(&param))
                        .flatten()
                        .map(|m| (j, m))
                });
                if let Some((j, m)) = merged {
                    changed = true;
                    if m.is_zero_const() {
                        slots[j] = None;
                        wire[q].pop();
                    } else {
                        slots[j] = Some(g.with_param(m));
                    }
                } else if param.is_zero_const() {
                    changed = true;
                } else {
                    wire[q].push(slots.len());
                    slots.push(Some(*g));
                }
            }
            GateKind::CX => {
                let (c, t) = (g.qubits()[0], g.qubits()[1]);
                let top = wire[c].last().copied();
                let cancels = top.is_some()
                    && top == wire[t].last().copied()
                    && slots[top.unwrap()].as_ref() == Some(g);
                if cancels {
                    changed = true;
                    slots[top.unwrap()] = None;
                    wire[c].pop();
                    wire[t].pop();
                } else {
                    wire[c].push(slots.len());
                    wire[t].push(slots.len());
                    slots.push(Some(*g));
                }
            }
            GateKind::SX => {
                let q = g.qubits()[0];
                let stack = &wire[q];
                let run = stack.len() >= 3
                    && stack[stack.len() - 3..]
                        .iter()
                        .all(|&j| slots[j].as_ref().map(Gate::kind) == Some(GateKind::SX));
                if run {
                    changed = true;
                    for _ in 0..3 {
                        let j = wire[q].pop().unwrap();
                        slots[j] = None;
                    }
                } else {
                    wire[q].push(slots.len());
                    slots.push(Some(*g));
                }
            }
            _ => {
                for &q in g.qubits() {
                    wire[q].push(slots.len());
                }
                slots.push(Some(*g));
            }
        }
    }
    changed.then(|| slots.into_iter().flatten().collect())
}
