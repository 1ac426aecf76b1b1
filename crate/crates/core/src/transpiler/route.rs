use crate::backend::BackendModel;
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

use super::layout::Layout;

/// Result of SWAP routing.
#[derive(Clone, Debug, PartialEq)]
pub struct Routed {
    /// Circuit over physical qubits, SWAPs included.
    pub circuit: Circuit,
    pub final_layout: Layout,
    /// Inserted SWAPs in emission order.
    pub swaps: Vec<(usize, usize)>,
}

/// Greedy shortest-path router. Gates are processed in list order; for a
/// 2-qubit gate on non-adjacent physical qubits `(p, q)` the first operand is
/// walked along the BFS shortest path toward `q` until it is adjacent.
pub fn route(circuit: &Circuit, backend: &BackendModel, layout: &Layout) -> Result<Routed> {
    if layout.num_logical() != circuit.num_qubits()
        || layout.num_physical() != backend.num_physical()
    {
        return Err(Error::InvalidCircuit(format!(
            "layout of {} -> {} qubits does not match circuit ({}) / backend ({})",
            layout.num_logical(),
            layout.num_physical(),
            circuit.num_qubits(),
            backend.num_physical()
        )));
    }
    let mut current = layout.clone();
    let mut out = Vec::with_capacity(circuit.len());
    let mut swaps = Vec::new();
    for g in circuit.gates() {
        match *g.qubits() {
            [a] => out.push(g.with_qubits(&[current.physical(a)])?),
            [a, b] => {
                let (p, q) = (current.physical(a), current.physical(b));
                if !backend.are_coupled(p, q) {
                    let path = backend.shortest_path(p, q);
                    for w in path[..path.len() - 1].windows(2) {
                        out.push(Gate::swap(w[0], w[1]));
                        swaps.push((w[0], w[1]));
                        current.swap_physical(w[0], w[1]);
                    }
                }
                out.push(g.with_qubits(&[current.physical(a), current.physical(b)])?);
            }
            _ => unreachable!("gates have 1 or 2 qubits"),
        }
    }
    Ok(Routed {
        circuit: Circuit::new(backend.num_physical(), circuit.num_symbols(), out)?,
        final_layout: current,
        swaps,
    })
}
