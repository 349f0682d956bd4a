//! Finite-dimensional species and operads given by structure constants.
//!
//! A [`Species`] fixes, for every arity up to a truncation bound, an ordered
//! basis with integer gradings and a symmetric-group action (trivial,
//! regular, or explicit matrices).  An [`Operad`] adds partial-composition
//! tables `∘_i: P(m) ⊗ P(n) -> P(m+n-1)` and a unit in arity one.
//!
//! Evaluating a species on a tree ([`species_on_tree`]) produces the ordered
//! basis of `M(t) = ⊗_v M(In(v))`; elements of that space are
//! [`TreeVector`]s.  Contracting tree edges through the composition tables
//! ([`contract_action`]) makes an operad act on trees: this is the single
//! structural ingredient from which all bar and Koszul differentials are
//! later assembled.  When the grafting slot order disagrees with the
//! canonical min-label order of the merged vertex, the symmetric-group
//! action is applied to reorder inputs.
//!
//! [`Operad::check_axioms`] exhaustively verifies unit, both associativity
//! shapes, equivariance and the group-action laws over all arities within
//! the truncation, reporting each failure with a witness.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::matrix::SparseMat;
use crate::perm::Perm;
use crate::scalar::{q_int, Q};
use crate::trees::{
    cartesian_indices, cluster_string, enumerate_trees, Cluster, EdgeSet, Input, Label, LabelSet,
    Tree, TreeError,
};

/// A sparse linear combination over an ordered basis: `(index, coefficient)`
/// pairs sorted by index with nonzero coefficients.
pub type Combo = Vec<(usize, Q)>;

fn normalize_combo(map: BTreeMap<usize, Q>) -> Combo {
    map.into_iter().filter(|(_, q)| !q.is_zero()).collect()
}

fn combo_accumulate(acc: &mut BTreeMap<usize, Q>, idx: usize, value: Q) {
    let slot = acc.entry(idx).or_insert_with(Q::zero);
    *slot += value;
}

/// Errors raised by species and operad constructions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OperadError {
    /// A requested arity lies outside `1..=max_arity`.
    ArityOutOfRange {
        /// The offending arity.
        arity: usize,
        /// The truncation bound.
        max: usize,
    },
    /// A composition would land above the truncation bound.
    ArityOverflow {
        /// Arity of the left factor.
        m: usize,
        /// Arity of the right factor.
        n: usize,
        /// The truncation bound.
        max: usize,
    },
    /// A composition slot is not in `1..=m`.
    SlotOutOfRange {
        /// The offending slot.
        i: usize,
        /// Arity of the left factor.
        m: usize,
    },
    /// A basis name does not exist at the given arity.
    UnknownBasis {
        /// Arity searched.
        arity: usize,
        /// The unresolved name.
        name: String,
    },
    /// A tree vertex has arity above the species truncation.
    VertexArityOverflow {
        /// Display form of the vertex (`root` or a cluster).
        vertex: String,
        /// Its arity.
        arity: usize,
        /// The truncation bound.
        max: usize,
    },
    /// Contracting an edge would create a vertex above the truncation.
    ContractionOverflow {
        /// Display form of the merged vertex.
        vertex: String,
        /// Arity of the merged vertex.
        arity: usize,
        /// The truncation bound.
        max: usize,
    },
    /// Malformed species data (duplicate names, shape mismatches, …).
    BadSpecies(String),
    /// Malformed composition table data.
    BadTable(String),
    /// The species is not connected (arity-1 basis must be one degree-0 element).
    NotConnected,
    /// Free operads reject generators at arity 1.
    GeneratorAtArityOne,
    /// The tree vector does not live on the expected tree.
    TreeMismatch,
    /// An underlying tree operation failed.
    Tree(TreeError),
}

impl From<TreeError> for OperadError {
    fn from(e: TreeError) -> Self {
        OperadError::Tree(e)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for OperadError {}

impl fmt::Display for OperadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperadError::ArityOutOfRange { arity, max } => {
                write!(f, "arity {arity} outside 1..={max}")
            }
            OperadError::ArityOverflow { m, n, max } => {
                write!(f, "composition of arities {m} and {n} exceeds truncation {max}")
            }
            OperadError::SlotOutOfRange { i, m } => write!(f, "slot {i} not in 1..={m}"),
            OperadError::UnknownBasis { arity, name } => {
                write!(f, "no basis element named {name} at arity {arity}")
            }
            OperadError::VertexArityOverflow { vertex, arity, max } => {
                write!(f, "vertex {vertex} has arity {arity}, above the truncation {max}")
            }
            OperadError::ContractionOverflow { vertex, arity, max } => write!(
                f,
                "contraction at vertex {vertex} yields arity {arity}, above the truncation {max}"
            ),
            OperadError::BadSpecies(s) => write!(f, "malformed species: {s}"),
            OperadError::BadTable(s) => write!(f, "malformed composition table: {s}"),
            OperadError::NotConnected => {
                f.write_str("species is not connected (need one degree-0 element at arity 1)")
            }
            OperadError::GeneratorAtArityOne => {
                f.write_str("free operads take generators of arity at least 2")
            }
            OperadError::TreeMismatch => f.write_str("tree vector lives on a different tree"),
            OperadError::Tree(e) => write!(f, "{e}"),
        }
    }
}

/// How the symmetric group acts on one arity of a species.
#[derive(Clone, Debug)]
pub enum ActionKind {
    /// Every permutation acts as the identity.
    Trivial,
    /// The basis is the set of one-line words of `S_n` in lexicographic
    /// order and `σ` acts by left composition `w ↦ σ∘w`.
    Regular,
    /// Explicit matrices keyed by the one-line form of each permutation
    /// (the identity may be omitted).
    Explicit(BTreeMap<String, SparseMat>),
}

/// One arity of a species: ordered basis names, integer degrees, action.
#[derive(Clone, Debug)]
pub struct ArityData {
    /// Ordered basis names (must be distinct).
    pub basis: Vec<String>,
    /// Integer degree of each basis element.
    pub degrees: Vec<i64>,
    /// The `S_n`-action on this arity.
    pub action: ActionKind,
}

impl ArityData {
    /// An empty arity (dimension zero).
    pub fn empty() -> Self {
        ArityData { basis: Vec::new(), degrees: Vec::new(), action: ActionKind::Trivial }
    }

    /// A degree-0 arity with trivial action.
    pub fn trivial(names: &[&str]) -> Self {
        ArityData {
            basis: names.iter().map(|s| s.to_string()).collect(),
            degrees: alloc::vec![0; names.len()],
            action: ActionKind::Trivial,
        }
    }

    /// The regular representation of `S_n`: basis = one-line words.
    pub fn regular(n: usize) -> Self {
        let basis: Vec<String> = Perm::all(n).iter().map(|p| p.one_line()).collect();
        ArityData { degrees: alloc::vec![0; basis.len()], basis, action: ActionKind::Regular }
    }
}

/// A finite-dimensional species truncated at `max_arity`.
#[derive(Clone, Debug)]
pub struct Species {
    name: String,
    arities: Vec<ArityData>,
}

impl Species {
    /// Builds and validates a species; `arities[k]` describes arity `k+1`.
    pub fn new(name: &str, arities: Vec<ArityData>) -> Result<Self, OperadError> {
        if arities.is_empty() {
            return Err(OperadError::BadSpecies("need max_arity >= 1".to_string()));
        }
        for (k, data) in arities.iter().enumerate() {
            let n = k + 1;
            if data.degrees.len() != data.basis.len() {
                return Err(OperadError::BadSpecies(format!(
                    "arity {n}: {} degrees for {} basis elements",
                    data.degrees.len(),
                    data.basis.len()
                )));
            }
            let mut seen = BTreeMap::new();
            for name in &data.basis {
                if name.is_empty() || seen.insert(name, ()).is_some() {
                    return Err(OperadError::BadSpecies(format!(
                        "arity {n}: empty or duplicate basis name {name:?}"
                    )));
                }
            }
            match &data.action {
                ActionKind::Trivial => {}
                ActionKind::Regular => {
                    let words: Vec<String> = Perm::all(n).iter().map(|p| p.one_line()).collect();
                    if data.basis != words {
                        return Err(OperadError::BadSpecies(format!(
                            "arity {n}: regular action needs the one-line words of S_{n} in \
                             lexicographic order as basis"
                        )));
                    }
                }
                ActionKind::Explicit(map) => {
                    let dim = data.basis.len();
                    let all: Vec<Perm> = Perm::all(n);
                    for p in &all {
                        let is_id = p.images().iter().enumerate().all(|(i, &v)| i == v);
                        match map.get(&p.one_line()) {
                            None if is_id => {}
                            None => {
                                return Err(OperadError::BadSpecies(format!(
                                    "arity {n}: missing action matrix for {}",
                                    p.one_line()
                                )))
                            }
                            Some(m) => {
                                if m.rows() != dim || m.cols() != dim {
                                    return Err(OperadError::BadSpecies(format!(
                                        "arity {n}: action matrix for {} has shape {}x{}, \
                                         expected {dim}x{dim}",
                                        p.one_line(),
                                        m.rows(),
                                        m.cols()
                                    )));
                                }
                            }
                        }
                    }
                    if map.len() > all.len() {
                        return Err(OperadError::BadSpecies(format!(
                            "arity {n}: action table has spurious keys"
                        )));
                    }
                }
            }
        }
        Ok(Species { name: name.to_string(), arities })
    }

    /// The species name.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// The truncation bound.
    pub fn max_arity(&self) -> usize {
        self.arities.len()
    }

    /// Dimension at arity `n` (zero outside `1..=max_arity`).
    pub fn dim(&self, n: usize) -> usize {
        if n == 0 || n > self.arities.len() {
            0
        } else {
            self.arities[n - 1].basis.len()
        }
    }

    /// Ordered basis names at arity `n`.
    pub fn basis(&self, n: usize) -> &[String] {
        &self.arities[n - 1].basis
    }

    /// Index of a named basis element at arity `n`.
    pub fn index_of(&self, n: usize, name: &str) -> Option<usize> {
        self.arities.get(n - 1)?.basis.iter().position(|b| b == name)
    }

    /// Degree of the basis element `idx` at arity `n`.
    pub fn degree(&self, n: usize, idx: usize) -> i64 {
        self.arities[n - 1].degrees[idx]
    }

    /// The action kind at arity `n`.
    pub fn action_kind(&self, n: usize) -> &ActionKind {
        &self.arities[n - 1].action
    }

    /// Whether the species is connected: one degree-0 element at arity 1.
    pub fn is_connected(&self) -> bool {
        self.dim(1) == 1 && self.arities[0].degrees[0] == 0
    }

    /// The matrix of `σ` acting on arity `n`.
    pub fn action_matrix(&self, n: usize, sigma: &Perm) -> SparseMat {
        assert!(n >= 1 && n <= self.max_arity(), "arity {n} out of range");
        assert_eq!(sigma.len(), n, "permutation size mismatch");
        let dim = self.dim(n);
        let is_id = sigma.images().iter().enumerate().all(|(i, &v)| i == v);
        if is_id {
            return SparseMat::identity(dim);
        }
        match &self.arities[n - 1].action {
            ActionKind::Trivial => SparseMat::identity(dim),
            ActionKind::Regular => {
                let rank: BTreeMap<String, usize> =
                    Perm::all(n).iter().enumerate().map(|(i, p)| (p.one_line(), i)).collect();
                let words = Perm::all(n);
                let mut m = SparseMat::zero(dim, dim);
                for (col, w) in words.iter().enumerate() {
                    let image = sigma.compose(w);
                    m.add_entry(rank[&image.one_line()], col, q_int(1));
                }
                m
            }
            ActionKind::Explicit(map) => {
                map.get(&sigma.one_line()).expect("validated action table").clone()
            }
        }
    }

    /// The unit species: one degree-0 element `1` at arity 1, zero elsewhere.
    pub fn unit_species(max_arity: usize) -> Species {
        let mut arities = alloc::vec![ArityData::trivial(&["1"])];
        arities.extend((2..=max_arity).map(|_| ArityData::empty()));
        Species { name: "unit".to_string(), arities }
    }

    /// The reduced species: same data with arity 1 emptied.
    pub fn reduced(&self) -> Species {
        let mut arities = self.arities.clone();
        arities[0] = ArityData::empty();
        Species { name: format!("{}-reduced", self.name), arities }
    }

    /// Extends the truncation bound with empty arities.
    pub fn pad_to(&self, max_arity: usize) -> Species {
        let mut arities = self.arities.clone();
        while arities.len() < max_arity {
            arities.push(ArityData::empty());
        }
        Species { name: self.name.clone(), arities }
    }
}

/// Substitutes the word of `inner ∈ S_n` for the letter `i` of the word of
/// `outer ∈ S_m` (shifting larger letters), the composition rule of the
/// associative operad.
fn block_substitute(outer: &Perm, inner: &Perm, i: usize) -> Perm {
    let m = outer.len();
    let n = inner.len();
    assert!((1..=m).contains(&i));
    let mut word: Vec<usize> = Vec::with_capacity(m + n - 1);
    for k in 1..=m {
        let v = outer.apply(k - 1) + 1; // outer(k), 1-based
        if v < i {
            word.push(v);
        } else if v > i {
            word.push(v + n - 1);
        } else {
            for j in 1..=n {
                word.push(inner.apply(j - 1) + 1 + i - 1);
            }
        }
    }
    let images: Vec<usize> = word.iter().map(|&v| v - 1).collect();
    Perm::from_images(images).expect("block substitution is a bijection")
}

/// The relabelling of the inputs of `p ∘_i q` induced by renaming the inputs
/// of `p` by `σ` and those of `q` by `τ`: input `j` of `p` (`j ≠ i`) goes to
/// `σ(j)` adjusted past the new slot `σ(i)`, and the block input `i-1+b`
/// goes to `σ(i)-1+τ(b)`.  This is the permutation appearing in the
/// equivariance axiom.
fn induced_relabeling(sigma: &Perm, tau: &Perm, i: usize) -> Perm {
    let m = sigma.len();
    let n = tau.len();
    assert!((1..=m).contains(&i));
    let si = sigma.apply(i - 1) + 1; // σ(i), 1-based
    let adjust = |v: usize| if v < si { v } else { v + n - 1 };
    let mut images: Vec<usize> = Vec::with_capacity(m + n - 1);
    for j in 1..=m + n - 1 {
        let value = if j < i {
            adjust(sigma.apply(j - 1) + 1)
        } else if j < i + n {
            si - 1 + tau.apply(j - i) + 1
        } else {
            adjust(sigma.apply(j - n) + 1)
        };
        images.push(value - 1);
    }
    Perm::from_images(images).expect("induced relabelling is a bijection")
}

/// Result of [`Operad::check_axioms`]: number of identities verified and a
/// witness string per failure.
#[derive(Clone, Debug)]
pub struct AxiomReport {
    checks: usize,
    failures: Vec<String>,
}

impl AxiomReport {
    /// Whether every identity held.
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Number of identities verified.
    pub fn checks(&self) -> usize {
        self.checks
    }

    /// Witness strings for the failed identities.
    pub fn failures(&self) -> &[String] {
        &self.failures
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} checks, {} failures", self.checks, self.failures.len())?;
        for w in &self.failures {
            write!(f, "\n  {w}")?;
        }
        Ok(())
    }
}

/// One line of an external composition table: `left ∘_i right = Σ coeff·result`.
#[derive(Clone, Debug)]
pub struct CompositionEntry {
    /// Arity of the left factor.
    pub m: usize,
    /// Arity of the right factor.
    pub n: usize,
    /// Composition slot, `1..=m`.
    pub i: usize,
    /// Basis name of the left factor (arity `m`).
    pub left: String,
    /// Basis name of the right factor (arity `n`).
    pub right: String,
    /// Result terms as `(coefficient, basis name at arity m+n-1)`.
    pub terms: Vec<(Q, String)>,
}

/// An operad: a connected species with partial-composition tables.
#[derive(Clone, Debug)]
pub struct Operad {
    species: Species,
    /// `tables[(m,n,i)][left][right]` = combination over the basis at `m+n-1`.
    tables: BTreeMap<(usize, usize, usize), Vec<Vec<Combo>>>,
}

impl Operad {
    fn empty_tables(sp: &Species) -> BTreeMap<(usize, usize, usize), Vec<Vec<Combo>>> {
        let max = sp.max_arity();
        let mut tables = BTreeMap::new();
        for m in 1..=max {
            for n in 1..=max {
                if m + n - 1 > max {
                    continue;
                }
                for i in 1..=m {
                    tables.insert(
                        (m, n, i),
                        alloc::vec![alloc::vec![Combo::new(); sp.dim(n)]; sp.dim(m)],
                    );
                }
            }
        }
        tables
    }

    /// Assembles an operad from a species and explicit composition entries.
    ///
    /// Entries accumulate; missing pairs compose to zero.  Axioms are *not*
    /// verified here — run [`Operad::check_axioms`].
    pub fn from_parts(species: Species, entries: &[CompositionEntry]) -> Result<Self, OperadError> {
        if !species.is_connected() {
            return Err(OperadError::NotConnected);
        }
        let max = species.max_arity();
        let mut tables = Self::empty_tables(&species);
        for e in entries {
            if e.m == 0 || e.m > max || e.n == 0 || e.n > max {
                return Err(OperadError::BadTable(format!(
                    "entry with arities ({}, {}) outside 1..={max}",
                    e.m, e.n
                )));
            }
            if e.m + e.n - 1 > max {
                return Err(OperadError::ArityOverflow { m: e.m, n: e.n, max });
            }
            if e.i == 0 || e.i > e.m {
                return Err(OperadError::SlotOutOfRange { i: e.i, m: e.m });
            }
            let l = species
                .index_of(e.m, &e.left)
                .ok_or(OperadError::UnknownBasis { arity: e.m, name: e.left.clone() })?;
            let r = species
                .index_of(e.n, &e.right)
                .ok_or(OperadError::UnknownBasis { arity: e.n, name: e.right.clone() })?;
            let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
            let table = tables.get_mut(&(e.m, e.n, e.i)).expect("tables cover all valid triples");
            for (idx, q) in core::mem::take(&mut table[l][r]) {
                combo_accumulate(&mut acc, idx, q);
            }
            for (coeff, name) in &e.terms {
                let idx = species
                    .index_of(e.m + e.n - 1, name)
                    .ok_or(OperadError::UnknownBasis { arity: e.m + e.n - 1, name: name.clone() })?;
                combo_accumulate(&mut acc, idx, coeff.clone());
            }
            table[l][r] = normalize_combo(acc);
        }
        Ok(Operad { species, tables })
    }

    /// The underlying species.
    pub fn species(&self) -> &Species {
        &self.species
    }

    /// The operad name (delegated to the species).
    pub fn name(&self) -> &str {
        self.species.name()
    }

    /// The truncation bound.
    pub fn max_arity(&self) -> usize {
        self.species.max_arity()
    }

    /// Dimension at arity `n`.
    pub fn dim(&self, n: usize) -> usize {
        self.species.dim(n)
    }

    /// Ordered basis names at arity `n`.
    pub fn basis(&self, n: usize) -> &[String] {
        self.species.basis(n)
    }

    /// Index of the operadic unit in the arity-1 basis (always 0: the
    /// species is connected).
    pub fn unit_index(&self) -> usize {
        0
    }

    /// The structure constants of `left ∘_i right` for basis indices.
    pub fn compose_basis(
        &self,
        m: usize,
        n: usize,
        i: usize,
        left: usize,
        right: usize,
    ) -> Result<&[(usize, Q)], OperadError> {
        let max = self.max_arity();
        if m == 0 || m > max {
            return Err(OperadError::ArityOutOfRange { arity: m, max });
        }
        if n == 0 || n > max {
            return Err(OperadError::ArityOutOfRange { arity: n, max });
        }
        if m + n - 1 > max {
            return Err(OperadError::ArityOverflow { m, n, max });
        }
        if i == 0 || i > m {
            return Err(OperadError::SlotOutOfRange { i, m });
        }
        let table = &self.tables[&(m, n, i)];
        assert!(left < self.dim(m) && right < self.dim(n), "basis index out of range");
        Ok(&table[left][right])
    }

    /// Bilinear extension of [`Operad::compose_basis`] to combinations.
    pub fn compose_vec(
        &self,
        m: usize,
        n: usize,
        i: usize,
        left: &[(usize, Q)],
        right: &[(usize, Q)],
    ) -> Result<Combo, OperadError> {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (l, a) in left {
            for (r, b) in right {
                for (s, c) in self.compose_basis(m, n, i, *l, *r)? {
                    combo_accumulate(&mut acc, *s, a * b * c);
                }
            }
        }
        Ok(normalize_combo(acc))
    }

    /// Negates one composition line, for fault-injection in tests and the
    /// verification driver.
    pub fn perturb_composition_sign(
        &mut self,
        m: usize,
        n: usize,
        i: usize,
        left: &str,
        right: &str,
    ) -> Result<(), OperadError> {
        let l = self
            .species
            .index_of(m, left)
            .ok_or(OperadError::UnknownBasis { arity: m, name: left.to_string() })?;
        let r = self
            .species
            .index_of(n, right)
            .ok_or(OperadError::UnknownBasis { arity: n, name: right.to_string() })?;
        let table = self
            .tables
            .get_mut(&(m, n, i))
            .ok_or(OperadError::BadTable(format!("no table for ({m},{n},{i})")))?;
        for (_, q) in table[l][r].iter_mut() {
            *q = -q.clone();
        }
        Ok(())
    }

    /// The commutative operad: one basis element per arity, trivial action.
    pub fn commutative(max_arity: usize) -> Operad {
        Self::commutative_truncated(max_arity, max_arity)
    }

    /// The nilpotent quotient of `com`: arities above `cutoff` are zero, so
    /// any composition landing there vanishes.
    pub fn nilpotent(max_arity: usize, cutoff: usize) -> Operad {
        assert!(cutoff >= 1, "nilpotent cutoff must keep the unit");
        Self::commutative_truncated(max_arity, cutoff)
    }

    fn commutative_truncated(max_arity: usize, cutoff: usize) -> Operad {
        assert!(max_arity >= 1);
        let name = if cutoff >= max_arity {
            "com".to_string()
        } else {
            format!("nilpotent:{cutoff}")
        };
        let mut arities = alloc::vec![ArityData::trivial(&["1"])];
        for n in 2..=max_arity {
            if n <= cutoff {
                arities.push(ArityData::trivial(&["mu"]));
            } else {
                arities.push(ArityData::empty());
            }
        }
        let species = Species { name, arities };
        let mut tables = Self::empty_tables(&species);
        for ((m, n, _), table) in tables.iter_mut() {
            if self_dim(&species, *m) == 1
                && self_dim(&species, *n) == 1
                && self_dim(&species, m + n - 1) == 1
            {
                table[0][0] = alloc::vec![(0, q_int(1))];
            }
        }
        Operad { species, tables }
    }

    /// The associative operad: basis of arity `n` is `S_n` (regular action),
    /// composition is substitution of one-line words.
    pub fn associative(max_arity: usize) -> Operad {
        assert!(max_arity >= 1);
        let arities: Vec<ArityData> = (1..=max_arity).map(ArityData::regular).collect();
        let species = Species { name: "ass".to_string(), arities };
        let mut tables = Self::empty_tables(&species);
        for m in 1..=max_arity {
            let lefts = Perm::all(m);
            for n in 1..=max_arity {
                if m + n - 1 > max_arity {
                    continue;
                }
                let rights = Perm::all(n);
                let rank: BTreeMap<String, usize> = Perm::all(m + n - 1)
                    .iter()
                    .enumerate()
                    .map(|(k, p)| (p.one_line(), k))
                    .collect();
                for i in 1..=m {
                    let table = tables.get_mut(&(m, n, i)).unwrap();
                    for (l, w) in lefts.iter().enumerate() {
                        for (r, v) in rights.iter().enumerate() {
                            let u = block_substitute(w, v, i);
                            table[l][r] = alloc::vec![(rank[&u.one_line()], q_int(1))];
                        }
                    }
                }
            }
        }
        Operad { species, tables }
    }

    /// The free operad on a generator species (no arity-1 generators):
    /// basis at arity `n` = trees over `{1..n}` with vertices labelled by
    /// generators, composition by grafting, action by relabelling.
    pub fn free(max_arity: usize, generators: &Species) -> Result<Operad, OperadError> {
        assert!(max_arity >= 1);
        if generators.dim(1) != 0 {
            return Err(OperadError::GeneratorAtArityOne);
        }
        let gens = generators.pad_to(max_arity);
        // Enumerate the basis: (tree, generator labelling) per arity.
        let mut basis: Vec<Vec<FreeKey>> = Vec::with_capacity(max_arity);
        for n in 1..=max_arity {
            let mut elems = Vec::new();
            for t in enumerate_trees(&LabelSet::ints(n)) {
                for lab in species_on_tree(&gens, &t)? {
                    elems.push((t.clone(), lab));
                }
            }
            basis.push(elems);
        }
        let index: Vec<BTreeMap<FreeKey, usize>> = basis
            .iter()
            .map(|els| els.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect())
            .collect();
        // Species data with explicit action tables computed by relabelling.
        let mut arities: Vec<ArityData> = Vec::with_capacity(max_arity);
        for n in 1..=max_arity {
            let els = &basis[n - 1];
            let names: Vec<String> =
                els.iter().map(|(t, lab)| free_basis_name(&gens, t, lab)).collect();
            let mut map: BTreeMap<String, SparseMat> = BTreeMap::new();
            for sigma in Perm::all(n) {
                if sigma.images().iter().enumerate().all(|(i, &v)| i == v) {
                    continue;
                }
                let mut mat = SparseMat::zero(els.len(), els.len());
                for (col, (t, lab)) in els.iter().enumerate() {
                    for (row_key, coeff) in free_action_on_basis(&gens, t, lab, &sigma)? {
                        mat.add_entry(index[n - 1][&row_key], col, coeff);
                    }
                }
                map.insert(sigma.one_line(), mat);
            }
            arities.push(ArityData {
                degrees: els
                    .iter()
                    .map(|(t, lab)| {
                        t.vertices()
                            .iter()
                            .zip(lab)
                            .map(|(v, &g)| gens.degree(t.arity_of(v), g))
                            .sum()
                    })
                    .collect(),
                basis: names,
                action: ActionKind::Explicit(map),
            });
        }
        let species = Species { name: format!("free({})", generators.name()), arities };
        let mut tables = Self::empty_tables(&species);
        for ((m, n, i), table) in tables.iter_mut() {
            for (l, (tp, lp)) in basis[m - 1].iter().enumerate() {
                for (r, (tq, lq)) in basis[n - 1].iter().enumerate() {
                    let grafted = graft(tp, lp, tq, lq, *i)?;
                    table[l][r] = alloc::vec![(index[m + n - 2][&grafted], q_int(1))];
                }
            }
        }
        Ok(Operad { species, tables })
    }

    /// The free operad on one binary generator `m` with trivial action.
    pub fn free_binary(max_arity: usize) -> Operad {
        let gen = Species::new(
            "binary",
            alloc::vec![ArityData::empty(), ArityData::trivial(&["m"])],
        )
        .expect("valid generator species");
        let mut op = Self::free(max_arity.max(2), &gen).expect("no arity-1 generators");
        op.species.name = "free-binary".to_string();
        op
    }

    /// Builds a named builtin: `com`, `ass`, `free-binary`, or `nilpotent:k`.
    pub fn builtin(name: &str, max_arity: usize) -> Result<Operad, OperadError> {
        match name {
            "com" => Ok(Self::commutative(max_arity)),
            "ass" => Ok(Self::associative(max_arity)),
            "free-binary" => Ok(Self::free_binary(max_arity)),
            _ => {
                if let Some(k) = name.strip_prefix("nilpotent:") {
                    let cutoff: usize = k
                        .parse()
                        .map_err(|_| OperadError::BadTable(format!("bad cutoff in {name:?}")))?;
                    if cutoff == 0 {
                        return Err(OperadError::BadTable(
                            "nilpotent cutoff must be at least 1".to_string(),
                        ));
                    }
                    Ok(Self::nilpotent(max_arity, cutoff))
                } else {
                    Err(OperadError::BadTable(format!("unknown builtin operad {name:?}")))
                }
            }
        }
    }

    /// Exhaustively verifies the operad axioms within the truncation: the
    /// group-action laws, unit, sequential and parallel associativity, and
    /// equivariance.  Failures are collected with witnesses, not raised.
    pub fn check_axioms(&self) -> AxiomReport {
        let max = self.max_arity();
        let mut checks = 0usize;
        let mut failures: Vec<String> = Vec::new();
        let u = self.unit_index();

        // Group-action laws per arity.
        for n in 1..=max {
            match self.species.action_kind(n) {
                ActionKind::Trivial => checks += 1,
                _ => {
                    let perms = Perm::all(n);
                    let mats: Vec<SparseMat> =
                        perms.iter().map(|p| self.species.action_matrix(n, p)).collect();
                    let rank: BTreeMap<String, usize> =
                        perms.iter().enumerate().map(|(i, p)| (p.one_line(), i)).collect();
                    checks += 1;
                    let id_pos = rank[&Perm::identity(n).one_line()];
                    if mats[id_pos] != SparseMat::identity(self.dim(n)) {
                        failures.push(format!("action: identity of S_{n} acts nontrivially"));
                    }
                    for (a, pa) in perms.iter().enumerate() {
                        for (b, pb) in perms.iter().enumerate() {
                            checks += 1;
                            let ab = rank[&pa.compose(pb).one_line()];
                            if mats[a].mul(&mats[b]) != mats[ab] {
                                failures.push(format!(
                                    "action: A({})·A({}) ≠ A({}) at arity {n}",
                                    pa.one_line(),
                                    pb.one_line(),
                                    pa.compose(pb).one_line()
                                ));
                            }
                        }
                    }
                }
            }
        }

        // Unit axioms.
        for n in 1..=max {
            for x in 0..self.dim(n) {
                checks += 1;
                let left = self.compose_basis(1, n, 1, u, x).unwrap();
                if left != [(x, q_int(1))] {
                    failures.push(format!("unit: 1∘₁{} ≠ {} at arity {n}", self.basis(n)[x], self.basis(n)[x]));
                }
                for i in 1..=n {
                    checks += 1;
                    let right = self.compose_basis(n, 1, i, x, u).unwrap();
                    if right != [(x, q_int(1))] {
                        failures.push(format!(
                            "unit: {}∘_{i}1 ≠ {} at arity {n}",
                            self.basis(n)[x],
                            self.basis(n)[x]
                        ));
                    }
                }
            }
        }

        // Associativity, sequential and parallel.
        for m in 1..=max {
            for n in 1..=max {
                for k in 1..=max {
                    if m + n + k - 2 > max || m + n - 1 > max || n + k - 1 > max {
                        continue;
                    }
                    for p in 0..self.dim(m) {
                        for q in 0..self.dim(n) {
                            for r in 0..self.dim(k) {
                                // Sequential: r lands inside q.
                                for i in 1..=m {
                                    for j in 1..=n {
                                        checks += 1;
                                        let pq = self.compose_basis(m, n, i, p, q).unwrap().to_vec();
                                        let lhs = self
                                            .compose_vec(m + n - 1, k, i - 1 + j, &pq, &[(r, q_int(1))])
                                            .unwrap();
                                        let qr = self.compose_basis(n, k, j, q, r).unwrap().to_vec();
                                        let rhs = self
                                            .compose_vec(m, n + k - 1, i, &[(p, q_int(1))], &qr)
                                            .unwrap();
                                        if lhs != rhs {
                                            failures.push(format!(
                                                "assoc-seq: m={m} n={n} k={k} i={i} j={j} p={} q={} r={}",
                                                self.basis(m)[p],
                                                self.basis(n)[q],
                                                self.basis(k)[r]
                                            ));
                                        }
                                    }
                                }
                                // Parallel: q and r land in distinct slots i < j.
                                for i in 1..=m {
                                    for j in (i + 1)..=m {
                                        checks += 1;
                                        let pq = self.compose_basis(m, n, i, p, q).unwrap().to_vec();
                                        let lhs = self
                                            .compose_vec(m + n - 1, k, j + n - 1, &pq, &[(r, q_int(1))])
                                            .unwrap();
                                        let pr = self.compose_basis(m, k, j, p, r).unwrap().to_vec();
                                        let rhs = self
                                            .compose_vec(m + k - 1, n, i, &pr, &[(q, q_int(1))])
                                            .unwrap();
                                        if lhs != rhs {
                                            failures.push(format!(
                                                "assoc-par: m={m} n={n} k={k} i={i} j={j} p={} q={} r={}",
                                                self.basis(m)[p],
                                                self.basis(n)[q],
                                                self.basis(k)[r]
                                            ));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }

        // Equivariance: (σ·p) ∘_{σ(i)} (τ·q) = (σ∘_iτ)·(p∘_iq).
        for m in 1..=max {
            for n in 1..=max {
                if m + n - 1 > max {
                    continue;
                }
                for sigma in Perm::all(m) {
                    let a_m = self.species.action_matrix(m, &sigma);
                    for tau in Perm::all(n) {
                        let a_n = self.species.action_matrix(n, &tau);
                        for i in 1..=m {
                            let si = sigma.apply(i - 1) + 1;
                            let rho = induced_relabeling(&sigma, &tau, i);
                            let a_res = self.species.action_matrix(m + n - 1, &rho);
                            for p in 0..self.dim(m) {
                                let sp = a_m.column(p).to_vec();
                                for q in 0..self.dim(n) {
                                    checks += 1;
                                    let tq = a_n.column(q).to_vec();
                                    let lhs = self.compose_vec(m, n, si, &sp, &tq).unwrap();
                                    let pq = self.compose_basis(m, n, i, p, q).unwrap();
                                    let rhs = a_res.apply(pq);
                                    if lhs != rhs {
                                        failures.push(format!(
                                            "equivariance: m={m} n={n} i={i} σ={} τ={} p={} q={}",
                                            sigma.one_line(),
                                            tau.one_line(),
                                            self.basis(m)[p],
                                            self.basis(n)[q]
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }

        AxiomReport { checks, failures }
    }
}

fn self_dim(sp: &Species, n: usize) -> usize {
    sp.dim(n)
}

fn free_basis_name(gens: &Species, t: &Tree, lab: &[usize]) -> String {
    let verts = t.vertices();
    let mut s = format!("{t}");
    s.push('·');
    s.push('(');
    for (k, (v, &g)) in verts.iter().zip(lab).enumerate() {
        if k > 0 {
            s.push(',');
        }
        s.push_str(&gens.basis(t.arity_of(v))[g]);
    }
    s.push(')');
    s
}

fn relabel_int(l: &Label, sigma: &Perm) -> Label {
    match l {
        Label::Int(j) => Label::Int(sigma.apply((*j - 1) as usize) as i64 + 1),
        Label::Str(_) => panic!("free operad basis trees are integer-labelled"),
    }
}

fn relabel_set(c: &Cluster, sigma: &Perm) -> Cluster {
    c.iter().map(|l| relabel_int(l, sigma)).collect()
}

fn relabel_input(inp: &Input, sigma: &Perm) -> Input {
    match inp {
        Input::Leaf(l) => Input::Leaf(relabel_int(l, sigma)),
        Input::Child(c) => Input::Child(relabel_set(c, sigma)),
    }
}

/// A free-operad basis element: a tree over `{1..n}` together with one
/// generator index per internal vertex.
type FreeKey = (Tree, Vec<usize>);

/// The action of `σ` on a free-operad basis element `(t, lab)`: relabel the
/// tree and push each vertex's input permutation through the generator
/// action.  Returns `(basis key, coefficient)` terms.
fn free_action_on_basis(
    gens: &Species,
    t: &Tree,
    lab: &[usize],
    sigma: &Perm,
) -> Result<Vec<(FreeKey, Q)>, OperadError> {
    let labels = t.labels().clone();
    let clusters: EdgeSet = t.clusters().iter().map(|c| relabel_set(c, sigma)).collect();
    let t_sigma = Tree::new(labels, clusters)?;
    let verts = t.vertices();
    let verts_sigma = t_sigma.vertices();
    // For each original vertex: its image position and the generator combo.
    let mut image_pos: Vec<usize> = Vec::with_capacity(verts.len());
    let mut combos: Vec<Combo> = Vec::with_capacity(verts.len());
    for (v, &g) in verts.iter().zip(lab) {
        let v_sigma = relabel_set(v, sigma);
        image_pos.push(
            verts_sigma.iter().position(|u| *u == v_sigma).expect("image vertex exists"),
        );
        let inputs = t.inputs_of(v);
        let image_inputs = t_sigma.inputs_of(&v_sigma);
        let images: Vec<usize> = inputs
            .iter()
            .map(|inp| {
                let im = relabel_input(inp, sigma);
                image_inputs.iter().position(|x| *x == im).expect("input image exists")
            })
            .collect();
        let pi = Perm::from_images(images).expect("input relabelling is a bijection");
        let act = gens.action_matrix(inputs.len(), &pi);
        combos.push(act.column(g).to_vec());
    }
    // Tensor the per-vertex combinations into labellings of t_sigma.
    let sizes: Vec<usize> = combos.iter().map(|c| c.len()).collect();
    let mut out = Vec::new();
    for choice in cartesian_indices(&sizes) {
        let mut coeff = q_int(1);
        let mut lab_sigma = alloc::vec![0usize; verts_sigma.len()];
        for (v_pos, &c_idx) in choice.iter().enumerate() {
            let (g_idx, ref q) = combos[v_pos][c_idx];
            coeff *= q;
            lab_sigma[image_pos[v_pos]] = g_idx;
        }
        out.push(((t_sigma.clone(), lab_sigma), coeff));
    }
    Ok(out)
}

/// Grafts `(tq, lq)` into leaf `i` of `(tp, lp)`; the relabelling is
/// monotone, so the labelling carries over with coefficient 1.
fn graft(
    tp: &Tree,
    lp: &[usize],
    tq: &Tree,
    lq: &[usize],
    i: usize,
) -> Result<FreeKey, OperadError> {
    let m = tp.labels().len();
    let n = tq.labels().len();
    if n == 1 {
        return Ok((tp.clone(), lp.to_vec()));
    }
    if m == 1 {
        return Ok((tq.clone(), lq.to_vec()));
    }
    let int_of = |l: &Label| match l {
        Label::Int(j) => *j as usize,
        Label::Str(_) => panic!("free operad basis trees are integer-labelled"),
    };
    let shift_p = |s: &Cluster| -> Cluster {
        let mut out = Cluster::new();
        for l in s {
            let j = int_of(l);
            if j < i {
                out.insert(Label::Int(j as i64));
            } else if j > i {
                out.insert(Label::Int((j + n - 1) as i64));
            } else {
                for b in i..i + n {
                    out.insert(Label::Int(b as i64));
                }
            }
        }
        out
    };
    let shift_q = |s: &Cluster| -> Cluster {
        s.iter().map(|l| Label::Int((int_of(l) + i - 1) as i64)).collect()
    };
    let block: Cluster = (i..i + n).map(|b| Label::Int(b as i64)).collect();
    let mut clusters: EdgeSet = tp.clusters().iter().map(&shift_p).collect();
    clusters.extend(tq.clusters().iter().map(&shift_q));
    clusters.insert(block.clone());
    let grafted = Tree::new(LabelSet::ints(m + n - 1), clusters)?;
    let verts_p = tp.vertices();
    let verts_q = tq.vertices();
    let mut lab = Vec::new();
    for v in grafted.vertices() {
        if v == *grafted.labels().as_set() {
            lab.push(lp[0]); // root of p
        } else if v == block {
            lab.push(lq[0]); // root of q
        } else if v.is_subset(&block) {
            let pre: Cluster =
                v.iter().map(|l| Label::Int((int_of(l) - (i - 1)) as i64)).collect();
            let pos = verts_q.iter().position(|u| *u == pre).expect("q vertex exists");
            lab.push(lq[pos]);
        } else {
            let mut pre = Cluster::new();
            for l in &v {
                let j = int_of(l);
                if j < i {
                    pre.insert(Label::Int(j as i64));
                } else if j >= i + n {
                    pre.insert(Label::Int((j - (n - 1)) as i64));
                } else {
                    pre.insert(Label::Int(i as i64));
                }
            }
            let pos = verts_p.iter().position(|u| *u == pre).expect("p vertex exists");
            lab.push(lp[pos]);
        }
    }
    Ok((grafted, lab))
}

fn vertex_name(t: &Tree, v: &Cluster) -> String {
    if *v == *t.labels().as_set() {
        "root".to_string()
    } else {
        cluster_string(v)
    }
}

/// The ordered basis of `M(t) = ⊗_v M(In(v))`: one basis index per vertex in
/// canonical vertex order, enumerated lexicographically.  The bare leaf has
/// the single empty labelling.
pub fn species_on_tree(sp: &Species, t: &Tree) -> Result<Vec<Vec<usize>>, OperadError> {
    let mut dims = Vec::new();
    for v in t.vertices() {
        let k = t.arity_of(&v);
        if k > sp.max_arity() {
            return Err(OperadError::VertexArityOverflow {
                vertex: vertex_name(t, &v),
                arity: k,
                max: sp.max_arity(),
            });
        }
        dims.push(sp.dim(k));
    }
    Ok(cartesian_indices(&dims))
}

/// `dim M(t) = Π_v dim M(|In(v)|)` (empty product = 1).
pub fn tree_dim(sp: &Species, t: &Tree) -> Result<usize, OperadError> {
    let mut d = 1usize;
    for v in t.vertices() {
        let k = t.arity_of(&v);
        if k > sp.max_arity() {
            return Err(OperadError::VertexArityOverflow {
                vertex: vertex_name(t, &v),
                arity: k,
                max: sp.max_arity(),
            });
        }
        d *= sp.dim(k);
    }
    Ok(d)
}

/// An element of `P(t)`: a sparse combination of vertex labellings of a tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeVector {
    tree: Tree,
    coeffs: BTreeMap<Vec<usize>, Q>,
}

impl TreeVector {
    /// The zero vector on a tree.
    pub fn zero(tree: Tree) -> Self {
        TreeVector { tree, coeffs: BTreeMap::new() }
    }

    /// The basis vector for one labelling (coefficient 1).
    pub fn basis_element(tree: Tree, labeling: Vec<usize>) -> Self {
        debug_assert_eq!(labeling.len(), tree.vertices().len());
        let mut coeffs = BTreeMap::new();
        coeffs.insert(labeling, q_int(1));
        TreeVector { tree, coeffs }
    }

    /// The underlying tree.
    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    /// Adds `coeff` to the term `labeling`.
    pub fn add_term(&mut self, labeling: Vec<usize>, coeff: Q) {
        debug_assert_eq!(labeling.len(), self.tree.vertices().len());
        let slot = self.coeffs.entry(labeling).or_insert_with(Q::zero);
        *slot += coeff;
        self.coeffs.retain(|_, q| !q.is_zero());
    }

    /// The coefficient of a labelling.
    pub fn coeff(&self, labeling: &[usize]) -> Q {
        self.coeffs.get(labeling).cloned().unwrap_or_else(Q::zero)
    }

    /// Iterates over nonzero `(labelling, coefficient)` terms.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Q)> {
        self.coeffs.iter()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    /// Whether the vector is zero.
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Multiplies the whole vector by a scalar.
    pub fn scale(&mut self, q: &Q) {
        if q.is_zero() {
            self.coeffs.clear();
        } else {
            for v in self.coeffs.values_mut() {
                *v *= q;
            }
        }
    }

    /// Renders the vector with basis names drawn from a species.
    pub fn display_with(&self, sp: &Species) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let verts = self.tree.vertices();
        let mut s = String::new();
        for (k, (lab, q)) in self.coeffs.iter().enumerate() {
            if k > 0 {
                s.push_str(" + ");
            }
            s.push_str(&format!("{q}·("));
            for (j, (v, &g)) in verts.iter().zip(lab).enumerate() {
                if j > 0 {
                    s.push(',');
                }
                s.push_str(&sp.basis(self.tree.arity_of(v))[g]);
            }
            s.push(')');
        }
        s
    }
}

impl fmt::Display for TreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (k, (lab, q)) in self.coeffs.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{q}·{lab:?}")?;
        }
        Ok(())
    }
}

/// Contracts the edges `E ⊆ t.clusters` through the operad's composition,
/// producing a vector on `t/E`.  Single edges are contracted in canonical
/// order; the result is order-independent.
pub fn contract_action(
    p: &Operad,
    t: &Tree,
    e_set: &EdgeSet,
    x: &TreeVector,
) -> Result<TreeVector, OperadError> {
    if x.tree() != t {
        return Err(OperadError::TreeMismatch);
    }
    for e in e_set {
        if !t.clusters().contains(e) {
            return Err(OperadError::Tree(TreeError::UnknownEdge(cluster_string(e))));
        }
    }
    let mut current = x.clone();
    let mut remaining: Vec<Cluster> = e_set.iter().cloned().collect();
    while let Some(e) = remaining.first().cloned() {
        remaining.remove(0);
        current = contract_single(p, &e, &current)?;
    }
    Ok(current)
}

/// Contracts one edge of `x.tree()`.
fn contract_single(p: &Operad, e: &Cluster, x: &TreeVector) -> Result<TreeVector, OperadError> {
    let t = x.tree().clone();
    let mut single = EdgeSet::new();
    single.insert(e.clone());
    let t2 = t.contract(&single)?;
    let verts = t.vertices();
    let verts2 = t2.vertices();
    let v = t.parent_of(e)?;
    let v_pos = verts.iter().position(|u| *u == v).expect("parent vertex exists");
    let e_pos = verts.iter().position(|u| u == e).expect("edge vertex exists");
    let in_v = t.inputs_of(&v);
    let in_e = t.inputs_of(e);
    let m = in_v.len();
    let n = in_e.len();
    let i = in_v
        .iter()
        .position(|inp| matches!(inp, Input::Child(c) if c == e))
        .expect("edge is an input of its parent")
        + 1;
    // Insertion order: v's inputs with slot i replaced by e's inputs.
    let mut insertion: Vec<&Input> = Vec::with_capacity(m + n - 1);
    insertion.extend(in_v[..i - 1].iter());
    insertion.extend(in_e.iter());
    insertion.extend(in_v[i..].iter());
    let canonical = t2.inputs_of(&v);
    let images: Vec<usize> = insertion
        .iter()
        .map(|inp| canonical.iter().position(|x| x == *inp).expect("merged input exists"))
        .collect();
    let reorder = Perm::from_images(images).expect("insertion order is a bijection");
    if m + n - 1 > p.max_arity() {
        return Err(OperadError::ContractionOverflow {
            vertex: vertex_name(&t, &v),
            arity: m + n - 1,
            max: p.max_arity(),
        });
    }
    let act = p.species().action_matrix(m + n - 1, &reorder);
    // Positions of the surviving vertices of t2 inside t's vertex list.
    let old_pos: Vec<usize> = verts2
        .iter()
        .map(|u| verts.iter().position(|w| w == u).expect("surviving vertex exists"))
        .collect();
    let merged_pos = verts2.iter().position(|u| *u == v).expect("merged vertex exists");
    let mut out = TreeVector::zero(t2.clone());
    for (lab, coeff) in x.terms() {
        let combo = p.compose_basis(m, n, i, lab[v_pos], lab[e_pos])?;
        for (idx, q) in act.apply(combo) {
            let mut lab2: Vec<usize> = old_pos.iter().map(|&op| lab[op]).collect();
            lab2[merged_pos] = idx;
            out.add_term(lab2, coeff * &q);
        }
    }
    Ok(out)
}
