//! Line-based circuit text format.
//!
//! ```text
//! qubits:2 symbols:4
//! RY 0 affine:0:+1:0
//! CX 0,1
//! RZ 1 const:3.141592653589793
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Floats are written
//! in shortest round-trip form, so `parse(emit(c)) == c` exactly.

use std::fmt::Write as _;

use crate::circuit::{Circuit, Coeff, Gate, GateKind, ParamExpr};
use crate::error::{Error, Result};

pub fn circuit_to_text(c: &Circuit) -> String {
    let mut out = format!("qubits:{} symbols:{}\n", c.num_qubits(), c.num_symbols());
    for g in c.gates() {
        let qs: Vec<String> = g.qubits().iter().map(|q| q.to_string()).collect();
        let _ = write!(out, "{} {}", g.kind(), qs.join(","));
        match g.param() {
            Some(ParamExpr::Const(a)) => {
                let _ = write!(out, " const:{a}");
            }
            Some(ParamExpr::Affine {
                symbol,
                coeff,
                offset,
            }) => {
                let _ = write!(out, " affine:{symbol}:{coeff}:{offset}");
            }
            None => {}
        }
        out.push('\n');
    }
    out
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_header(line_no: usize, line: &str) -> Result<(usize, usize)> {
    let mut qubits = None;
    let mut symbols = None;
    for tok in line.split_whitespace() {
        let (key, val) = tok
            .split_once(':')
            .ok_or_else(|| perr(line_no, format!("malformed header field '{tok}'")))?;
        let v: usize = val
            .parse()
            .map_err(|_| perr(line_no, format!("invalid count '{val}'")))?;
        match key {
            "qubits" => qubits = Some(v),
            "symbols" => symbols = Some(v),
            _ => return Err(perr(line_no, format!("unknown header field '{key}'"))),
        }
    }
    match (qubits, symbols) {
        (Some(q), Some(s)) => Ok((q, s)),
        _ => Err(perr(line_no, "header must be 'qubits:<n> symbols:<P>'")),
    }
}

fn parse_float(line_no: usize, s: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| perr(line_no, format!("invalid number '{s}'")))?;
    if !v.is_finite() {
        return Err(perr(line_no, format!("non-finite angle '{s}'")));
    }
    Ok(v)
}

fn parse_expr(line_no: usize, s: &str) -> Result<ParamExpr> {
    if let Some(v) = s.strip_prefix("const:") {
        return Ok(ParamExpr::constant(parse_float(line_no, v)?));
    }
    if let Some(rest) = s.strip_prefix("affine:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [sym, coeff, offset] = parts[..] else {
            return Err(perr(line_no, format!("malformed affine expression '{s}'")));
        };
        let sym: usize = sym
            .parse()
            .map_err(|_| perr(line_no, format!("invalid symbol id '{sym}'")))?;
        let coeff = coeff
            .parse::<i64>()
            .ok()
            .and_then(Coeff::from_i64)
            .ok_or_else(|| {
                perr(
                    line_no,
                    format!("coefficient must be +1 or -1, got '{coeff}'"),
                )
            })?;
        return Ok(ParamExpr::affine(sym, coeff, parse_float(line_no, offset)?));
    }
    Err(perr(line_no, format!("unknown parameter expression '{s}'")))
}

pub fn circuit_from_text(text: &str) -> Result<Circuit> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| perr(1, "missing header"))?;
    let (num_qubits, num_symbols) = parse_header(hline, header)?;
    let mut gates = Vec::new();
    for (line_no, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 2 || toks.len() > 3 {
            return Err(perr(line_no, "expected 'KIND q[,q] [expr]'"));
        }
        let kind: GateKind = toks[0]
            .parse()
            .map_err(|e: Error| perr(line_no, e.to_string()))?;
        let qubits = toks[1]
            .split(',')
            .map(|q| {
                q.parse::<usize>()
                    .map_err(|_| perr(line_no, format!("invalid qubit '{q}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        let param = toks.get(2).map(|s| parse_expr(line_no, s)).transpose()?;
        let gate = Gate::new(kind, &qubits, param).map_err(|e| perr(line_no, e.to_string()))?;
        if let Some(&q) = gate.qubits().iter().find(|&&q| q >= num_qubits) {
            return Err(perr(line_no, format!("qubit {q} out of range")));
        }
        if let Some(s) = gate.param().and_then(ParamExpr::symbol_id) {
            if s >= num_symbols {
                return Err(perr(line_no, format!("symbol {s} out of range")));
            }
        }
        gates.push(gate);
    }
    Circuit::new(num_qubits, num_symbols, gates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::PI;
    use proptest::prelude::*;

    #[test]
    fn known_layout() {
        let c = Circuit::new(
            2,
            1,
            vec![
                Gate::ry(0, ParamExpr::symbol(0)),
                Gate::cx(0, 1),
                Gate::rz(1, ParamExpr::Const(PI)),
                Gate::rz(1, ParamExpr::affine(0, Coeff::Minus, 0.5)),
            ],
        )
        .unwrap();
        let text = circuit_to_text(&c);
        assert_eq!(
            text,
            "qubits:2 symbols:1\nRY 0 affine:0:+1:0\nCX 0,1\nRZ 1 const:3.141592653589793\nRZ 1 affine:0:-1:0.5\n"
        );
        assert_eq!(circuit_from_text(&text).unwrap(), c);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = circuit_from_text("qubits:2 symbols:0\n\nCX 0,0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = circuit_from_text("qubits:2 symbols:0\nRY 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = circuit_from_text("qubits:2 symbols:1\nRY 0 affine:0:2:0\n").unwrap_err();
        assert!(err.to_string().contains("coefficient"));
        assert!(circuit_from_text("").is_err());
        assert!(circuit_from_text("qubits:1 symbols:0\nCX 0,1\n").is_err());
    }

    fn arb_gate(nq: usize, ns: usize) -> impl Strategy<Value = Gate> {
        let expr = prop_oneof![
            (0.0..10.0f64).prop_map(ParamExpr::constant),
            (0..ns, any::<bool>(), -10.0..10.0f64).prop_map(|(s, neg, b)| {
                ParamExpr::affine(s, if neg { Coeff::Minus } else { Coeff::Plus }, b)
            }),
        ];
        (0..8usize, 0..nq, 1..nq, expr).prop_map(move |(k, a, d, e)| {
            let kind = GateKind::ALL[k];
            let b = (a + d) % nq;
            match kind.arity() {
                2 => Gate::new(kind, &[a, b], None).unwrap(),
                _ if kind.is_rotation() => Gate::rotation(kind, a, e),
                _ => Gate::new(kind, &[a], None).unwrap(),
            }
        })
    }

    proptest! {
        #[test]
        fn text_round_trip(gates in proptest::collection::vec(arb_gate(4, 3), 0..40)) {
            let c = Circuit::new(4, 3, gates).unwrap();
            prop_assert_eq!(circuit_from_text(&circuit_to_text(&c)).unwrap(), c);
        }
    }
}
