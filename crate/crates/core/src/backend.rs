//! Hardware model: physical qubits, an undirected coupling graph and the
//! native gate set.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::GateKind;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackendModel {
    num_physical: usize,
    /// Normalized as `(min, max)`.
    edges: BTreeSet<(usize, usize)>,
    native_1q: BTreeSet<GateKind>,
    native_2q: BTreeSet<GateKind>,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct BackendFile {
    num_physical: usize,
    edges: Vec<[usize; 2]>,
    native_1q: Vec<GateKind>,
    native_2q: Vec<GateKind>,
}

pub fn default_native_1q() -> BTreeSet<GateKind> {
    [GateKind::RZ, GateKind::SX, GateKind::X].into()
}

pub fn default_native_2q() -> BTreeSet<GateKind> {
    [GateKind::CX].into()
}

impl BackendModel {
    /// Validates the graph (no self-loops, endpoints in range, connected)
    /// and the native gate sets.
    pub fn new(
        num_physical: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        native_1q: BTreeSet<GateKind>,
        native_2q: BTreeSet<GateKind>,
    ) -> Result<BackendModel> {
        if num_physical == 0 {
            return Err(Error::InvalidBackend("no physical qubits".into()));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            if a >= num_physical || b >= num_physical {
                return Err(Error::InvalidBackend(format!(
                    "edge ({a},{b}) out of range for {num_physical} qubits"
                )));
            }
            set.insert((a.min(b), a.max(b)));
        }
        if let Some(k) = native_1q.iter().find(|k| k.arity() != 1) {
            return Err(Error::InvalidBackend(format!("{k} is not a 1-qubit gate")));
        }
        if let Some(k) = native_2q.iter().find(|k| k.arity() != 2) {
            return Err(Error::InvalidBackend(format!("{k} is not a 2-qubit gate")));
        }
        let mut adjacency = vec![Vec::new(); num_physical];
        for &(a, b) in &set {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        let model = BackendModel {
            num_physical,
            edges: set,
            native_1q,
            native_2q,
            adjacency,
        };
        if !model.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(model)
    }

    pub fn with_default_natives(
        num_physical: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<BackendModel> {
        BackendModel::new(
            num_physical,
            edges,
            default_native_1q(),
            default_native_2q(),
        )
    }

    pub fn num_physical(&self) -> usize {
        self.num_physical
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn native_1q(&self) -> &BTreeSet<GateKind> {
        &self.native_1q
    }

    pub fn native_2q(&self) -> &BTreeSet<GateKind> {
        &self.native_2q
    }

    pub fn is_native(&self, kind: GateKind) -> bool {
        self.native_1q.contains(&kind) || self.native_2q.contains(&kind)
    }

    /// Neighbors of `q`, ascending.
    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    pub fn degree(&self, q: usize) -> usize {
        self.adjacency[q].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn are_coupled(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.num_physical];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.num_physical
    }

    /// Shortest path from `from` to `to` (inclusive). BFS expands neighbors
    /// in ascending index order, so among equal-length paths the one through
    /// smaller-index vertices is preferred.
    pub fn shortest_path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.num_physical];
        parent[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &w in &self.adjacency[v] {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        let mut path = vec![to];
        let mut v = to;
        while v != from {
            v = parent[v];
            path.push(v);
        }
        path.reverse();
        path
    }

    pub fn to_json(&self) -> String {
        let file = BackendFile {
            num_physical: self.num_physical,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            native_1q: self.native_1q.iter().copied().collect(),
            native_2q: self.native_2q.iter().copied().collect(),
        };
        serde_json::to_string_pretty(&file).expect("backend serializes")
    }

    pub fn from_json(text: &str) -> Result<BackendModel> {
        let file: BackendFile = serde_json::from_str(text)?;
        BackendModel::new(
            file.num_physical,
            file.edges.into_iter().map(|[a, b]| (a, b)),
            file.native_1q.into_iter().collect(),
            file.native_2q.into_iter().collect(),
        )
    }
}

/// `n` qubits coupled in a chain.
pub fn make_line(n: usize) -> Result<BackendModel> {
    if n < 2 {
        return Err(Error::InvalidBackend(format!(
            "line needs >= 2 qubits, got {n}"
        )));
    }
    BackendModel::with_default_natives(n, (0..n - 1).map(|i| (i, i + 1)))
}

/// Heavy-hex-style lattice: `rows` chains of `cols` qubits (qubit
/// `r * cols + c`), joined between rows `r` and `r + 1` by a bridge qubit at
/// every column with `c % 4 == 2 * (r % 2)`. Bridge qubits follow the row
/// qubits in `(r, c)` order.
pub fn make_heavy_hex(rows: usize, cols: usize) -> Result<BackendModel> {
    if rows < 2 || cols < 3 || cols % 4 != 3 {
        return Err(Error::InvalidBackend(format!(
            "heavy-hex needs rows >= 2 and cols >= 3 with cols % 4 == 3, got {rows}x{cols}"
        )));
    }
    let row_qubit = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols - 1 {
            edges.push((row_qubit(r, c), row_qubit(r, c + 1)));
        }
    }
    let mut next = rows * cols;
    for r in 0..rows - 1 {
        for c in (0..cols).filter(|c| c % 4 == 2 * (r % 2)) {
            edges.push((row_qubit(r, c), next));
            edges.push((next, row_qubit(r + 1, c)));
            next += 1;
        }
    }
    BackendModel::with_default_natives(next, edges)
}

pub fn load_backend(path: impl AsRef<Path>) -> Result<BackendModel> {
    BackendModel::from_json(&std::fs::read_to_string(path)?)
}

pub fn save_backend(model: &BackendModel, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, model.to_json())?;
    Ok(())
}

/// Backend reference as accepted on the command line and in sweep configs:
/// `line:<n>`, `heavy-hex:<R>,<C>`, or a path to a backend JSON file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BackendRef {
    Line(usize),
    HeavyHex(usize, usize),
    File(String),
}

impl BackendRef {
    pub fn resolve(&self) -> Result<BackendModel> {
        match self {
            BackendRef::Line(n) => make_line(*n),
            BackendRef::HeavyHex(r, c) => make_heavy_hex(*r, *c),
            BackendRef::File(p) => load_backend(p),
        }
    }
}

impl Default for BackendRef {
    fn default() -> Self {
        BackendRef::HeavyHex(5, 11)
    }
}

impl FromStr for BackendRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidBackend(format!("cannot parse backend reference '{s}'"));
        if let Some(n) = s.strip_prefix("line:") {
            return Ok(BackendRef::Line(n.trim().parse().map_err(|_| bad())?));
        }
        if let Some(rc) = s.strip_prefix("heavy-hex:") {
            let (r, c) = rc.split_once(',').ok_or_else(bad)?;
            return Ok(BackendRef::HeavyHex(
                r.trim().parse().map_err(|_| bad())?,
                c.trim().parse().map_err(|_| bad())?,
            ));
        }
        if s.is_empty() {
            return Err(bad());
        }
        Ok(BackendRef::File(s.to_string()))
    }
}

impl TryFrom<String> for BackendRef {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BackendRef> for String {
    fn from(b: BackendRef) -> String {
        b.to_string()
    }
}

impl fmt::Display for BackendRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendRef::Line(n) => write!(f, "line:{n}"),
            BackendRef::HeavyHex(r, c) => write!(f, "heavy-hex:{r},{c}"),
            BackendRef::File(p) => f.write_str(p),
        }
    }
}
