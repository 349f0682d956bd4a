//! Exact computational algebra over the category of rooted trees.
//!
//! This crate realizes the category `T_I` whose objects are reduced rooted
//! trees with leaves labelled by a finite set `I` (every internal vertex has
//! at least two inputs) and whose morphisms contract sets of internal edges.
//! On top of it, it builds — with exact rational or prime-field arithmetic —
//! the chain complexes that govern its homological algebra:
//!
//! * normalized bar complexes with category or operad coefficients
//!   ([`bar_koszul`]),
//! * Koszul complexes and the comparison (quasi-isomorphism) map between
//!   the two ([`bar_koszul::kappa`]),
//! * the level-decomposition bar complex of an operad and the chain maps
//!   relating it to the Koszul side ([`level_bar`]),
//! * the cobar-style coherence checker for operads-up-to-homotopy
//!   ([`homotopy`]).
//!
//! All bases are finite and canonically ordered, all differentials are sparse
//! integer/rational matrices, and homology is computed exactly ([`complex`]),
//! so every structural statement (d² = 0, chain-map identities, acyclicity,
//! Betti numbers) is decided, not approximated.
//!
//! The crate is `no_std` (it requires `alloc`); IO, serialization formats and
//! the command-line driver live in the companion `treebar-cli` crate.

#![no_std]
#![forbid(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod bar_koszul;
pub mod complex;
pub mod homotopy;
pub mod level_bar;
pub mod matrix;
pub mod operad;
pub mod perm;
pub mod scalar;
pub mod trees;

pub use bar_koszul::{
    build_K_category, build_K_operad, build_K_resolution, build_N_category, build_N_operad,
    kappa, kappa_category, BarError, KCatKey, KOpKey, NCatKey, NOpKey, ResKey,
};
pub use complex::{BasedChainComplex, BettiTable, ChainMap, Field};
pub use homotopy::{
    check_homotopy_operad, cobar_generator_differential, koszul_cocomposition, strict_to_homotopy,
    HomotopyError, HomotopyOperadData, HomotopyReport, SignedPartitionTerm,
};
pub use level_bar::{
    build_levelbar, level_differential, level_edge_sets, merge_levels, phi, psi_bar,
    shuffle_blocks, shuffle_blocks_raw, verify_factorization, FactorizationReport, LevelEdgeData,
    LevelError, LevelTree,
};
pub use operad::{Operad, Species, TreeVector};
pub use scalar::{q_int, Q};
pub use trees::{Label, LabelSet, Tree};
