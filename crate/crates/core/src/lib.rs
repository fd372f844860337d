//! Permutation groups with exact set-stabilizer and coloring-stabilizer
//! machinery for solvable groups.
//!
//! Products act left to right throughout: `p.compose(&q)` maps `x` to
//! `q(p(x))`. A group element `g` sends a coloring `c` to `c^g` with
//! `c^g[g(x)] = c[x]`, and a subset `S` to `g(S)`.

pub mod actions;
pub mod bitset;
pub mod catalog;
pub mod chain;
pub mod constructor;
pub mod error;
pub mod group;
pub mod orbit;
pub mod perm;
pub mod product;
pub mod registry;
pub mod structure;
pub mod witness;

#[cfg(test)]
mod testutil;

use serde::{Deserialize, Serialize};

pub use actions::{CensusReport, OrbitClass};
pub use bitset::{Coloring, Subset};
pub use chain::StabChain;
pub use constructor::{Certificate, ColoringFamily};
pub use error::{Error, Result};
pub use group::{DerivedLength, DerivedSeriesReport, GroupFile, PermGroup};
pub use perm::Permutation;
pub use structure::{BlockSystem, WreathFlavor, WreathStructure};

/// Largest supported degree.
pub const MAX_DEGREE: usize = 256;

/// Resource limits for exhaustive searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest orbit explored by orbit-stabilizer searches.
    pub orbit: usize,
    /// Largest coloring space `k^n` scanned by a census.
    pub space: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            orbit: 1 << 22,
            space: 1 << 24,
        }
    }
}
