//! Lowering to the native basis.
//!
//! Single-qubit gates go through the ZSX template: in application order,
//!
//! ```text
//! U(theta, phi, lambda) = RZ(lambda) . SX . RZ(theta + pi) . SX . RZ(phi + pi)
//! ```
//!
//! up to global phase, with `RY(t) = U(t, 0, 0)`, `RX(t) = U(t, -pi/2, pi/2)`
//! and `H = U(pi/2, 0, pi)`. `RZ(0)` factors are not emitted.

use crate::backend::BackendModel;
use crate::circuit::{Circuit, Gate, GateKind, ParamExpr, PI};
use crate::error::{Error, Result};

/// Euler angles of the gates the template handles.
fn euler(kind: GateKind, param: Option<ParamExpr>) -> Option<(ParamExpr, ParamExpr, ParamExpr)> {
    let c = ParamExpr::constant;
    match kind {
        GateKind::RY => Some((param?, c(0.0), c(0.0))),
        GateKind::RX => Some((param?, c(-PI / 2.0), c(PI / 2.0))),
        GateKind::H => Some((c(PI / 2.0), c(0.0), c(PI))),
        _ => None,
    }
}

fn zsx(qubit: usize, theta: ParamExpr, phi: ParamExpr, lambda: ParamExpr, out: &mut Vec<Gate>) {
    let rz = |p: ParamExpr, out: &mut Vec<Gate>| {
        if !p.is_zero_const() {
            out.push(Gate::rz(qubit, p));
        }
    };
    rz(lambda, out);
    out.push(Gate::sx(qubit));
    rz(theta.shifted(PI), out);
    out.push(Gate::sx(qubit));
    rz(phi.shifted(PI), out);
}

pub fn decompose_to_native(circuit: &Circuit, backend: &BackendModel) -> Result<Circuit> {
    let cx_native = backend.native_2q().contains(&GateKind::CX);
    let zsx_native =
        backend.native_1q().contains(&GateKind::RZ) && backend.native_1q().contains(&GateKind::SX);
    let mut out = Vec::with_capacity(circuit.len() * 2);
    for g in circuit.gates() {
        if backend.is_native(g.kind()) {
            out.push(*g);
            continue;
        }
        match (g.kind(), g.qubits()) {
            (GateKind::SWAP, &[a, b]) if cx_native => {
                out.extend([Gate::cx(a, b), Gate::cx(b, a), Gate::cx(a, b)]);
            }
            (kind, &[q]) if zsx_native => {
                let (theta, phi, lambda) =
                    euler(kind, g.param().copied()).ok_or(Error::UnsupportedGate(kind))?;
                zsx(q, theta, phi, lambda, &mut out);
            }
            (kind, _) => return Err(Error::UnsupportedGate(kind)),
        }
    }
    Circuit::new(circuit.num_qubits(), circuit.num_symbols(), out)
}
