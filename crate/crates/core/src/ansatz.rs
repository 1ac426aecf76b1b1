//! Builders for the three ansatz families.
//!
//! All builders emit only RY, RZ and CX, allocate a fresh symbol for every
//! rotation (coefficient +1, offset 0) and number symbols in gate order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, ParamExpr};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzKind {
    EfficientSu2,
    Ttn,
    RealAmplitudes,
}

impl AnsatzKind {
    pub const ALL: [AnsatzKind; 3] = [
        AnsatzKind::EfficientSu2,
        AnsatzKind::Ttn,
        AnsatzKind::RealAmplitudes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnsatzKind::EfficientSu2 => "efficient_su2",
            AnsatzKind::Ttn => "ttn",
            AnsatzKind::RealAmplitudes => "real_amplitudes",
        }
    }

    pub fn build(self, n: usize, reps: usize) -> Result<Circuit> {
        match self {
            AnsatzKind::EfficientSu2 => build_efficient_su2(n, reps),
            AnsatzKind::Ttn => build_ttn(n, reps),
            AnsatzKind::RealAmplitudes => build_real_amplitudes(n, reps),
        }
    }

    /// Closed-form parameter count of [`AnsatzKind::build`].
    pub fn num_params(self, n: usize, reps: usize) -> usize {
        match self {
            AnsatzKind::EfficientSu2 => 2 * n * (reps + 1),
            AnsatzKind::RealAmplitudes => n * (reps + 1),
            // every merge consumes two RYs and retires one qubit
            AnsatzKind::Ttn => reps * (2 * (n - 1) + 1),
        }
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnsatzKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        match key.as_str() {
            "efficient_su2" | "efficientsu2" => Ok(AnsatzKind::EfficientSu2),
            "ttn" => Ok(AnsatzKind::Ttn),
            "real_amplitudes" | "realamplitudes" => Ok(AnsatzKind::RealAmplitudes),
            _ => Err(Error::UnknownAnsatz(s.to_string())),
        }
    }
}

struct Builder {
    n: usize,
    gates: Vec<Gate>,
    next_symbol: usize,
}

impl Builder {
    fn new(n: usize) -> Self {
        Builder {
            n,
            gates: Vec::new(),
            next_symbol: 0,
        }
    }

    fn fresh(&mut self) -> ParamExpr {
        let s = self.next_symbol;
        self.next_symbol += 1;
        ParamExpr::symbol(s)
    }

    fn ry(&mut self, q: usize) {
        let p = self.fresh();
        self.gates.push(Gate::ry(q, p));
    }

    fn rz(&mut self, q: usize) {
        let p = self.fresh();
        self.gates.push(Gate::rz(q, p));
    }

    fn cx(&mut self, c: usize, t: usize) {
        self.gates.push(Gate::cx(c, t));
    }

    fn finish(self) -> Circuit {
        Circuit::new(self.n, self.next_symbol, self.gates).expect("builder output is valid")
    }
}

fn check_shape(n: usize, reps: usize) -> Result<()> {
    if n < 2 || reps < 1 {
        return Err(Error::InvalidAnsatzShape { n, reps });
    }
    Ok(())
}

/// RY layer + linear CX chain per repetition, closed by a final RY layer.
pub fn build_real_amplitudes(n: usize, reps: usize) -> Result<Circuit> {
    check_shape(n, reps)?;
    let mut b = Builder::new(n);
    for _ in 0..reps {
        (0..n).for_each(|q| b.ry(q));
        (0..n - 1).for_each(|q| b.cx(q, q + 1));
    }
    (0..n).for_each(|q| b.ry(q));
    Ok(b.finish())
}

/// RY and RZ layers + all-pairs CX (lexicographic i < j) per repetition,
/// closed by a final RY+RZ layer.
pub fn build_efficient_su2(n: usize, reps: usize) -> Result<Circuit> {
    check_shape(n, reps)?;
    let mut b = Builder::new(n);
    let rotations = |b: &mut Builder| {
        (0..n).for_each(|q| b.ry(q));
        (0..n).for_each(|q| b.rz(q));
    };
    for _ in 0..reps {
        rotations(&mut b);
        for i in 0..n {
            for j in i + 1..n {
                b.cx(i, j);
            }
        }
    }
    rotations(&mut b);
    Ok(b.finish())
}

/// Binary-tree contraction repeated `reps` times. Each merge of the pair
/// `(a, b)` emits RY on both and `CX(b, a)`; `a` survives. The root is
/// always qubit 0.
pub fn build_ttn(n: usize, reps: usize) -> Result<Circuit> {
    check_shape(n, reps)?;
    let mut b = Builder::new(n);
    for _ in 0..reps {
        let mut active: Vec<usize> = (0..n).collect();
        while active.len() > 1 {
            let mut survivors = Vec::with_capacity(active.len().div_ceil(2));
            for pair in active.chunks(2) {
                if let [keep, retire] = *pair {
                    b.ry(keep);
                    b.ry(retire);
                    b.cx(retire, keep);
                }
                survivors.push(pair[0]);
            }
            active = survivors;
        }
        b.ry(active[0]);
    }
    Ok(b.finish())
}
