//! Circuit intermediate representation.
//!
//! A [`Circuit`] is an ordered list of [`Gate`]s over `num_qubits` wires.
//! Rotation angles are [`ParamExpr`]s: either a constant or an affine
//! single-symbol expression `coeff * theta[symbol] + offset` with
//! `coeff` in {+1, -1}. All angles are kept normalized to `[0, 2pi)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use std::f64::consts::{PI, TAU};

/// Angles this close to 0 (mod 2pi) are treated as the identity rotation.
pub const ZERO_ANGLE_TOL: f64 = 1e-12;

/// Reduces an angle into `[0, 2pi)`.
pub fn normalize_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// True when `angle` is the identity rotation up to [`ZERO_ANGLE_TOL`].
pub fn is_zero_angle(angle: f64) -> bool {
    let a = normalize_angle(angle);
    a < ZERO_ANGLE_TOL || TAU - a < ZERO_ANGLE_TOL
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    RX,
    RY,
    RZ,
    SX,
    X,
    H,
    CX,
    SWAP,
}

impl GateKind {
    pub const ALL: [GateKind; 8] = [
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::SX,
        GateKind::X,
        GateKind::H,
        GateKind::CX,
        GateKind::SWAP,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::CX | GateKind::SWAP => 2,
            _ => 1,
        }
    }

    /// Rotation gates are exactly the gates that carry a parameter.
    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::RX | GateKind::RY | GateKind::RZ)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::SX => "SX",
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::CX => "CX",
            GateKind::SWAP => "SWAP",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidGate(format!("unknown gate kind '{s}'")))
    }
}

/// Unit coefficient of an affine parameter expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coeff {
    Plus,
    Minus,
}

impl Coeff {
    pub fn value(self) -> f64 {
        match self {
            Coeff::Plus => 1.0,
            Coeff::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Coeff::Plus => 1,
            Coeff::Minus => -1,
        }
    }

    pub fn from_i64(v: i64) -> Option<Coeff> {
        match v {
            1 => Some(Coeff::Plus),
            -1 => Some(Coeff::Minus),
            _ => None,
        }
    }

    pub fn negate(self) -> Coeff {
        match self {
            Coeff::Plus => Coeff::Minus,
            Coeff::Minus => Coeff::Plus,
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coeff::Plus => "+1",
            Coeff::Minus => "-1",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamExpr {
    Const(f64),
    Affine {
        symbol: usize,
        coeff: Coeff,
        offset: f64,
    },
}

impl ParamExpr {
    pub fn constant(angle: f64) -> Self {
        ParamExpr::Const(normalize_angle(angle))
    }

    pub fn affine(symbol: usize, coeff: Coeff, offset: f64) -> Self {
        ParamExpr::Affine {
            symbol,
            coeff,
            offset: normalize_angle(offset),
        }
    }

    /// `+theta[symbol]`
    pub fn symbol(symbol: usize) -> Self {
        ParamExpr::affine(symbol, Coeff::Plus, 0.0)
    }

    pub fn symbol_id(&self) -> Option<usize> {
        match *self {
            ParamExpr::Const(_) => None,
            ParamExpr::Affine { symbol, .. } => Some(symbol),
        }
    }

    pub fn eval(&self, theta: &[f64]) -> Result<f64> {
        match *self {
            ParamExpr::Const(a) => Ok(a),
            ParamExpr::Affine {
                symbol,
                coeff,
                offset,
            } => {
                let t = theta.get(symbol).ok_or(Error::UnboundSymbol(symbol))?;
                Ok(normalize_angle(coeff.value() * t + offset))
            }
        }
    }

    /// Adds a constant to the expression.
    pub fn shifted(&self, delta: f64) -> Self {
        match *self {
            ParamExpr::Const(a) => ParamExpr::constant(a + delta),
            ParamExpr::Affine {
                symbol,
                coeff,
                offset,
            } => ParamExpr::affine(symbol, coeff, offset + delta),
        }
    }

    /// Sum of two expressions when it is still representable: constants
    /// always combine, and two occurrences of one symbol with opposite
    /// coefficients cancel into a constant.
    pub fn try_add(&self, other: &ParamExpr) -> Option<ParamExpr> {
        match (*self, *other) {
            (ParamExpr::Const(a), ParamExpr::Const(b)) => Some(ParamExpr::constant(a + b)),
            (ParamExpr::Const(a), e @ ParamExpr::Affine { .. })
            | (e @ ParamExpr::Affine { .. }, ParamExpr::Const(a)) => Some(e.shifted(a)),
            (
                ParamExpr::Affine {
                    symbol: s1,
                    coeff: c1,
                    offset: b1,
                },
                ParamExpr::Affine {
                    symbol: s2,
                    coeff: c2,
                    offset: b2,
                },
            ) if s1 == s2 && c1 != c2 => Some(ParamExpr::constant(b1 + b2)),
            _ => None,
        }
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(*self, ParamExpr::Const(a) if is_zero_angle(a))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate {
    kind: GateKind,
    qubits: [usize; 2],
    param: Option<ParamExpr>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[usize], param: Option<ParamExpr>) -> Result<Gate> {
        if qubits.len() != kind.arity() {
            return Err(Error::InvalidGate(format!(
                "{kind} takes {} qubit(s), got {}",
                kind.arity(),
                qubits.len()
            )));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::InvalidGate(format!(
                "{kind} on repeated qubit {}",
                qubits[0]
            )));
        }
        if kind.is_rotation() != param.is_some() {
            return Err(Error::InvalidGate(if kind.is_rotation() {
                format!("{kind} requires a parameter")
            } else {
                format!("{kind} takes no parameter")
            }));
        }
        let mut q = [0; 2];
        q[..qubits.len()].copy_from_slice(qubits);
        let param = param.map(|p| match p {
            ParamExpr::Const(a) => ParamExpr::constant(a),
            ParamExpr::Affine {
                symbol,
                coeff,
                offset,
            } => ParamExpr::affine(symbol, coeff, offset),
        });
        Ok(Gate {
            kind,
            qubits: q,
            param,
        })
    }

    pub fn rotation(kind: GateKind, qubit: usize, param: ParamExpr) -> Gate {
        assert!(kind.is_rotation(), "{kind} is not a rotation");
        Gate::new(kind, &[qubit], Some(param)).expect("valid rotation")
    }

    pub fn rx(qubit: usize, param: ParamExpr) -> Gate {
        Gate::rotation(GateKind::RX, qubit, param)
    }

    pub fn ry(qubit: usize, param: ParamExpr) -> Gate {
        Gate::rotation(GateKind::RY, qubit, param)
    }

    pub fn rz(qubit: usize, param: ParamExpr) -> Gate {
        Gate::rotation(GateKind::RZ, qubit, param)
    }

    pub fn sx(qubit: usize) -> Gate {
        Gate::new(GateKind::SX, &[qubit], None).expect("valid gate")
    }

    pub fn x(qubit: usize) -> Gate {
        Gate::new(GateKind::X, &[qubit], None).expect("valid gate")
    }

    pub fn h(qubit: usize) -> Gate {
        Gate::new(GateKind::H, &[qubit], None).expect("valid gate")
    }

    /// Panics if `control == target`.
    pub fn cx(control: usize, target: usize) -> Gate {
        Gate::new(GateKind::CX, &[control, target], None).expect("distinct CX qubits")
    }

    /// Panics if `a == b`.
    pub fn swap(a: usize, b: usize) -> Gate {
        Gate::new(GateKind::SWAP, &[a, b], None).expect("distinct SWAP qubits")
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn param(&self) -> Option<&ParamExpr> {
        self.param.as_ref()
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind.arity() == 2
    }

    pub fn acts_on(&self, qubit: usize) -> bool {
        self.qubits().contains(&qubit)
    }

    /// Same gate kind and parameter on different wires.
    pub fn with_qubits(&self, qubits: &[usize]) -> Result<Gate> {
        Gate::new(self.kind, qubits, self.param)
    }

    pub fn with_param(&self, param: ParamExpr) -> Gate {
        assert!(self.kind.is_rotation(), "{} takes no parameter", self.kind);
        Gate::new(self.kind, self.qubits(), Some(param)).expect("valid rotation")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralMetrics {
    pub g1q: usize,
    pub g2q: usize,
    pub dag_depth: usize,
    pub num_symbols: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    num_symbols: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    /// Checks wire indices and that every symbol id is below `num_symbols`.
    /// Use [`Circuit::check_symbols_referenced`] for the stricter check that
    /// every symbol actually occurs.
    pub fn new(num_qubits: usize, num_symbols: usize, gates: Vec<Gate>) -> Result<Circuit> {
        for (i, g) in gates.iter().enumerate() {
            if let Some(&q) = g.qubits().iter().find(|&&q| q >= num_qubits) {
                return Err(Error::InvalidCircuit(format!(
                    "gate {i} ({}) uses qubit {q} but circuit has {num_qubits} qubits",
                    g.kind()
                )));
            }
            if let Some(s) = g.param().and_then(ParamExpr::symbol_id) {
                if s >= num_symbols {
                    return Err(Error::InvalidCircuit(format!(
                        "gate {i} references symbol {s} but circuit declares {num_symbols}"
                    )));
                }
            }
        }
        Ok(Circuit {
            num_qubits,
            num_symbols,
            gates,
        })
    }

    pub fn empty(num_qubits: usize) -> Circuit {
        Circuit {
            num_qubits,
            num_symbols: 0,
            gates: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    pub fn check_symbols_referenced(&self) -> Result<()> {
        let mut seen = vec![false; self.num_symbols];
        for s in self.gates.iter().filter_map(|g| g.param()?.symbol_id()) {
            seen[s] = true;
        }
        match seen.iter().position(|&b| !b) {
            Some(s) => Err(Error::InvalidCircuit(format!(
                "symbol {s} is never referenced"
            ))),
            None => Ok(()),
        }
    }

    pub fn rotation_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind().is_rotation()).count()
    }

    /// `(g1q, g2q)`; SWAP counts as a single two-qubit gate.
    pub fn gate_counts(&self) -> (usize, usize) {
        let g2q = self.gates.iter().filter(|g| g.is_two_qubit()).count();
        (self.gates.len() - g2q, g2q)
    }

    /// Longest chain in the dependency DAG where two gates depend on each
    /// other iff they share a qubit. Every gate has unit depth.
    pub fn dag_depth(&self) -> usize {
        let mut frontier = vec![0usize; self.num_qubits];
        let mut depth = 0;
        for g in &self.gates {
            let level = g.qubits().iter().map(|&q| frontier[q]).max().unwrap_or(0) + 1;
            for &q in g.qubits() {
                frontier[q] = level;
            }
            depth = depth.max(level);
        }
        depth
    }

    pub fn metrics(&self) -> StructuralMetrics {
        let (g1q, g2q) = self.gate_counts();
        StructuralMetrics {
            g1q,
            g2q,
            dag_depth: self.dag_depth(),
            num_symbols: self.num_symbols,
        }
    }

    /// Qubits touched by at least one gate, ascending.
    pub fn active_qubits(&self) -> Vec<usize> {
        let mut used = vec![false; self.num_qubits];
        for g in &self.gates {
            for &q in g.qubits() {
                used[q] = true;
            }
        }
        (0..self.num_qubits).filter(|&q| used[q]).collect()
    }

    pub fn bind(&self, theta: &[f64]) -> Result<ConcreteCircuit> {
        if theta.len() != self.num_symbols {
            return Err(Error::ParamCountMismatch {
                expected: self.num_symbols,
                got: theta.len(),
            });
        }
        let gates = self
            .gates
            .iter()
            .map(|g| {
                Ok(ConcreteGate {
                    kind: g.kind,
                    qubits: g.qubits,
                    angle: g.param.map(|p| p.eval(theta)).transpose()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConcreteCircuit {
            num_qubits: self.num_qubits,
            gates,
        })
    }
}

/// Gate with its rotation angle (if any) evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcreteGate {
    kind: GateKind,
    qubits: [usize; 2],
    angle: Option<f64>,
}

impl ConcreteGate {
    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn angle(&self) -> Option<f64> {
        self.angle
    }
}

/// A circuit whose every parameter is a constant.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcreteCircuit {
    num_qubits: usize,
    gates: Vec<ConcreteGate>,
}

impl ConcreteCircuit {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[ConcreteGate] {
        &self.gates
    }
}

impl TryFrom<&Circuit> for ConcreteCircuit {
    type Error = Error;

    /// Fails with [`Error::UnboundSymbol`] on the first symbolic parameter.
    fn try_from(c: &Circuit) -> Result<ConcreteCircuit> {
        let gates = c
            .gates
            .iter()
            .map(|g| {
                let angle = match g.param {
                    None => None,
                    Some(ParamExpr::Const(a)) => Some(a),
                    Some(ParamExpr::Affine { symbol, .. }) => {
                        return Err(Error::UnboundSymbol(symbol))
                    }
                };
                Ok(ConcreteGate {
                    kind: g.kind,
                    qubits: g.qubits,
                    angle,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConcreteCircuit {
            num_qubits: c.num_qubits,
            gates,
        })
    }
}
