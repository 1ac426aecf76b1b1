use serde::{Deserialize, Serialize};

use crate::backend::BackendModel;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Injective map from logical to physical qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    to_physical: Vec<usize>,
    occupant: Vec<Option<usize>>,
}

impl Layout {
    pub fn new(to_physical: Vec<usize>, num_physical: usize) -> Result<Layout> {
        let mut occupant = vec![None; num_physical];
        for (l, &p) in to_physical.iter().enumerate() {
            match occupant.get_mut(p) {
                None => {
                    return Err(Error::InvalidCircuit(format!(
                        "layout maps logical {l} to physical {p} outside 0..{num_physical}"
                    )))
                }
                Some(Some(other)) => {
                    return Err(Error::InvalidCircuit(format!(
                        "layout maps logical {other} and {l} to physical {p}"
                    )))
                }
                Some(slot) => *slot = Some(l),
            }
        }
        Ok(Layout {
            to_physical,
            occupant,
        })
    }

    pub fn trivial(num_logical: usize, num_physical: usize) -> Result<Layout> {
        Layout::new((0..num_logical).collect(), num_physical)
    }

    pub fn num_logical(&self) -> usize {
        self.to_physical.len()
    }

    pub fn num_physical(&self) -> usize {
        self.occupant.len()
    }

    pub fn physical(&self, logical: usize) -> usize {
        self.to_physical[logical]
    }

    pub fn logical_at(&self, physical: usize) -> Option<usize> {
        self.occupant[physical]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.to_physical
    }

    /// Exchanges the occupants of two physical qubits (either may be empty).
    pub fn swap_physical(&mut self, a: usize, b: usize) {
        let (la, lb) = (self.occupant[a], self.occupant[b]);
        if let Some(l) = la {
            self.to_physical[l] = b;
        }
        if let Some(l) = lb {
            self.to_physical[l] = a;
        }
        self.occupant.swap(a, b);
    }
}

impl Serialize for Layout {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_physical.serialize(s)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum LayoutPolicy {
    /// Logical `i` on physical `i`.
    #[default]
    Trivial,
    /// Uniformly random injective placement drawn from a seeded stream.
    Random { seed: u64 },
}

pub fn choose_layout(circuit: &Circuit, backend: &BackendModel) -> Result<Layout> {
    choose_layout_with(circuit, backend, LayoutPolicy::Trivial)
}

pub fn choose_layout_with(
    circuit: &Circuit,
    backend: &BackendModel,
    policy: LayoutPolicy,
) -> Result<Layout> {
    let (n, m) = (circuit.num_qubits(), backend.num_physical());
    if n > m {
        return Err(Error::DoesNotFit {
            logical: n,
            physical: m,
        });
    }
    match policy {
        LayoutPolicy::Trivial => Layout::trivial(n, m),
        LayoutPolicy::Random { seed } => {
            let mut rng = SplitMix64::new(seed);
            let mut slots: Vec<usize> = (0..m).collect();
            // partial Fisher-Yates
            for i in 0..n {
                let j = i + rng.next_below((m - i) as u64) as usize;
                slots.swap(i, j);
            }
            slots.truncate(n);
            Layout::new(slots, m)
        }
    }
}
