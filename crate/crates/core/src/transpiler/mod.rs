//! Hardware-aware compilation: layout, SWAP routing, native-basis lowering
//! and peephole optimization, with parameter provenance.

mod decompose;
mod layout;
mod optimize;
mod route;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize};

pub use decompose::decompose_to_native;
pub use layout::{choose_layout, choose_layout_with, Layout, LayoutPolicy};
pub use optimize::optimize;
pub use route::{route, Routed};

use crate::backend::BackendModel;
use crate::circuit::{Circuit, Coeff, Gate, ParamExpr, StructuralMetrics};
use crate::error::{Error, Result};

/// Where a physical parameter came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamOrigin {
    /// `coeff * theta_logical[symbol] + offset`
    FromLogical {
        symbol: usize,
        coeff: Coeff,
        offset: f64,
    },
    /// A constant angle produced by decomposition or merging.
    Synthesized(f64),
}

impl ParamOrigin {
    pub fn to_expr(self) -> ParamExpr {
        match self {
            ParamOrigin::FromLogical {
                symbol,
                coeff,
                offset,
            } => ParamExpr::affine(symbol, coeff, offset),
            ParamOrigin::Synthesized(v) => ParamExpr::constant(v),
        }
    }

    fn from_expr(e: ParamExpr) -> Self {
        match e {
            ParamExpr::Const(v) => ParamOrigin::Synthesized(v),
            ParamExpr::Affine {
                symbol,
                coeff,
                offset,
            } => ParamOrigin::FromLogical {
                symbol,
                coeff,
                offset,
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum OriginJson {
    Logical { sym: usize, coeff: i64, offset: f64 },
    Const { value: f64 },
}

impl Serialize for ParamOrigin {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            ParamOrigin::FromLogical {
                symbol,
                coeff,
                offset,
            } => OriginJson::Logical {
                sym: symbol,
                coeff: coeff.as_i8() as i64,
                offset,
            },
            ParamOrigin::Synthesized(value) => OriginJson::Const { value },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ParamOrigin {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(match OriginJson::deserialize(d)? {
            OriginJson::Logical { sym, coeff, offset } => ParamOrigin::FromLogical {
                symbol: sym,
                coeff: Coeff::from_i64(coeff)
                    .ok_or_else(|| serde::de::Error::custom("coeff must be +1 or -1"))?,
                offset,
            },
            OriginJson::Const { value } => ParamOrigin::Synthesized(value),
        })
    }
}

/// Physical symbol id -> origin, total over the physical symbols.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamProvenance(Vec<ParamOrigin>);

impl ParamProvenance {
    pub fn new(origins: Vec<ParamOrigin>) -> Self {
        ParamProvenance(origins)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn origins(&self) -> &[ParamOrigin] {
        &self.0
    }

    /// Physical parameter vector induced by a logical one.
    pub fn physical_theta(&self, logical_theta: &[f64]) -> Result<Vec<f64>> {
        self.0
            .iter()
            .map(|o| o.to_expr().eval(logical_theta))
            .collect()
    }

    /// JSON object keyed by physical symbol id, in id order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("provenance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let map: std::collections::BTreeMap<String, ParamOrigin> = serde_json::from_str(text)?;
        let mut entries = map
            .into_iter()
            .map(|(k, v)| {
                k.parse::<usize>()
                    .map(|id| (id, v))
                    .map_err(|_| Error::Parse {
                        line: 0,
                        msg: format!("bad symbol id '{k}'"),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        entries.sort_by_key(|&(id, _)| id);
        if entries.iter().enumerate().any(|(i, &(id, _))| i != id) {
            return Err(Error::Parse {
                line: 0,
                msg: "provenance ids must be exactly 0..P-1".into(),
            });
        }
        Ok(ParamProvenance(
            entries.into_iter().map(|(_, o)| o).collect(),
        ))
    }
}

impl Serialize for ParamProvenance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (i, o) in self.0.iter().enumerate() {
            map.serialize_entry(&i.to_string(), o)?;
        }
        map.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TranspileOptions {
    pub layout: LayoutPolicy,
    /// Run the peephole optimizer (on by default).
    pub optimize: bool,
}

impl TranspileOptions {
    pub fn new() -> Self {
        TranspileOptions {
            layout: LayoutPolicy::Trivial,
            optimize: true,
        }
    }
}

impl Default for TranspileOptions {
    fn default() -> Self {
        TranspileOptions::new()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TranspiledCircuit {
    /// Native circuit over all physical qubits; every rotation carries its
    /// own symbol `Affine(k, +1, 0)`, numbered in gate order.
    pub physical: Circuit,
    pub initial_layout: Layout,
    pub final_layout: Layout,
    pub provenance: ParamProvenance,
    pub metrics_before: StructuralMetrics,
    pub metrics_after: StructuralMetrics,
    /// SWAPs inserted by routing, before lowering.
    pub swaps: Vec<(usize, usize)>,
    pub logical_symbols: usize,
}

impl TranspiledCircuit {
    /// Physical qubit holding logical qubit 0 at the end of the circuit.
    pub fn cost_qubit(&self) -> usize {
        self.final_layout.physical(0)
    }

    /// Binds the physical circuit at the point induced by `logical_theta`.
    pub fn bind_logical(&self, logical_theta: &[f64]) -> Result<crate::circuit::ConcreteCircuit> {
        if logical_theta.len() != self.logical_symbols {
            return Err(Error::ParamCountMismatch {
                expected: self.logical_symbols,
                got: logical_theta.len(),
            });
        }
        self.physical
            .bind(&self.provenance.physical_theta(logical_theta)?)
    }
}

/// Replaces every rotation angle with a fresh symbol, recording its origin.
fn resymbolize(c: &Circuit) -> (Circuit, ParamProvenance) {
    let mut origins = Vec::new();
    let gates: Vec<Gate> = c
        .gates()
        .iter()
        .map(|g| match g.param() {
            Some(&p) => {
                origins.push(ParamOrigin::from_expr(p));
                g.with_param(ParamExpr::symbol(origins.len() - 1))
            }
            None => *g,
        })
        .collect();
    let circuit =
        Circuit::new(c.num_qubits(), origins.len(), gates).expect("valid resymbolization");
    (circuit, ParamProvenance(origins))
}

pub fn transpile(
    circuit: &Circuit,
    backend: &BackendModel,
    options: &TranspileOptions,
) -> Result<TranspiledCircuit> {
    let initial_layout = choose_layout_with(circuit, backend, options.layout)?;
    let routed = route(circuit, backend, &initial_layout)?;
    let mut native = decompose_to_native(&routed.circuit, backend)?;
    if options.optimize {
        native = optimize(&native);
    }
    let (physical, provenance) = resymbolize(&native);
    Ok(TranspiledCircuit {
        metrics_before: circuit.metrics(),
        metrics_after: physical.metrics(),
        physical,
        initial_layout,
        final_layout: routed.final_layout,
        provenance,
        swaps: routed.swaps,
        logical_symbols: circuit.num_symbols(),
    })
}

/// Violations of the backend's coupling graph or native gate set.
pub fn constraint_violations(circuit: &Circuit, backend: &BackendModel) -> Vec<String> {
    let mut out = Vec::new();
    for (i, g) in circuit.gates().iter().enumerate() {
        if !backend.is_native(g.kind()) {
            out.push(format!("gate {i}: {} is not native", g.kind()));
        }
        if let [a, b] = *g.qubits() {
            if !backend.are_coupled(a, b) {
                out.push(format!(
                    "gate {i}: {} on uncoupled pair ({a},{b})",
                    g.kind()
                ));
            }
        }
    }
    out
}

/// Structural deltas between a logical circuit and its compiled form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverheadReport {
    pub delta_g1q: i64,
    pub delta_g2q: i64,
    /// Physical DAG depth minus logical DAG depth.
    pub delta_depth_dag: i64,
    /// Physical DAG depth minus the repetition count.
    pub delta_depth_paper: i64,
}

pub fn overhead(logical: &Circuit, physical: &Circuit, reps: usize) -> OverheadReport {
    let (l, p) = (logical.metrics(), physical.metrics());
    let d = |a: usize, b: usize| a as i64 - b as i64;
    OverheadReport {
        delta_g1q: d(p.g1q, l.g1q),
        delta_g2q: d(p.g2q, l.g2q),
        delta_depth_dag: d(p.dag_depth, l.dag_depth),
        delta_depth_paper: d(p.dag_depth, reps),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_efficient_su2, build_real_amplitudes};
    use crate::backend::make_line;
    use crate::circuit::{GateKind, PI};

    #[test]
    fn real_amplitudes_on_matching_line() {
        let c = build_real_amplitudes(2, 1).unwrap();
        let b = make_line(2).unwrap();
        let t = transpile(&c, &b, &TranspileOptions::new()).unwrap();
        assert!(t.swaps.is_empty());
        assert!(constraint_violations(&t.physical, &b).is_empty());
        let o = overhead(&c, &t.physical, 1);
        assert_eq!(o.delta_g2q, 0);
    }

    #[test]
    fn efficient_su2_needs_a_swap_on_line3() {
        let c = build_efficient_su2(3, 1).unwrap();
        let b = make_line(3).unwrap();
        let t = transpile(&c, &b, &TranspileOptions::new()).unwrap();
        assert!(!t.swaps.is_empty());
        assert!(constraint_violations(&t.physical, &b).is_empty());
        assert!(overhead(&c, &t.physical, 1).delta_g2q >= 3);
    }

    #[test]
    fn identical_circuits_have_zero_overhead() {
        let c = build_efficient_su2(3, 2).unwrap();
        let o = overhead(&c, &c, 2);
        assert_eq!((o.delta_g1q, o.delta_g2q, o.delta_depth_dag), (0, 0, 0));
        assert_eq!(o.delta_depth_paper, c.dag_depth() as i64 - 2);
    }

    #[test]
    fn physical_symbols_follow_gate_order() {
        let c = build_real_amplitudes(3, 2).unwrap();
        let t = transpile(&c, &make_line(3).unwrap(), &TranspileOptions::new()).unwrap();
        let ids: Vec<usize> = t
            .physical
            .gates()
            .iter()
            .filter_map(|g| g.param()?.symbol_id())
            .collect();
        assert_eq!(ids, (0..t.physical.num_symbols()).collect::<Vec<_>>());
        assert_eq!(t.provenance.len(), t.physical.num_symbols());
        assert!(t
            .physical
            .gates()
            .iter()
            .all(|g| g.kind() != GateKind::SWAP));
    }

    #[test]
    fn provenance_json_shape() {
        let p = ParamProvenance::new(vec![
            ParamOrigin::FromLogical {
                symbol: 3,
                coeff: Coeff::Minus,
                offset: PI,
            },
            ParamOrigin::Synthesized(0.5),
        ]);
        let v: serde_json::Value = serde_json::from_str(&p.to_json()).unwrap();
        assert_eq!(
            v,
            serde_json::json!({
                "0": {"kind": "logical", "sym": 3, "coeff": -1, "offset": PI},
                "1": {"kind": "const", "value": 0.5}
            })
        );
        assert_eq!(ParamProvenance::from_json(&p.to_json()).unwrap(), p);
        assert!(ParamProvenance::from_json(r#"{"1": {"kind":"const","value":0}}"#).is_err());
    }

    #[test]
    fn transpile_is_deterministic() {
        let c = build_efficient_su2(4, 2).unwrap();
        let b = crate::backend::make_heavy_hex(2, 3).unwrap();
        let a = transpile(&c, &b, &TranspileOptions::new()).unwrap();
        let again = transpile(&c, &b, &TranspileOptions::new()).unwrap();
        assert_eq!(a, again);
    }
}
