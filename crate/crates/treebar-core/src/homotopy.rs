//! Operads up to homotopy: the Koszul cocomposition, the cobar
//! differential on generators, and the relation checker.
//!
//! The Koszul cocategory carries the cocomposition
//! `Δ(ω_E) = 1⊗ω_E + ω_E⊗1 + Σ ε(F,G) ω_F⊗ω_G` over the proper splittings
//! `F ⊔ G = E`, with ε the shuffle sign relative to the canonical edge
//! order ([`koszul_cocomposition`]).  Its cobar construction has one
//! generator `∘_E` of degree `|E| − 1` per pair `(t, E)`, and the induced
//! differential on generators is
//! `∂(∘_E) = Σ (−1)^{|F|} ε(F,G) ∘_F ∘ ∘_G`
//! ([`cobar_generator_differential`]); the extra `(−1)^{|F|}` relative to
//! the cocomposition sign is exactly what makes the formal `∂² = 0`
//! cancellation work with the Koszul rule for composites, and it is
//! pinned here by that cancellation (checked symbolically in the tests).
//!
//! A representation of this cobar construction — an operad up to homotopy
//! — is a [`HomotopyOperadData`]: one matrix `∘_E : M(t) → M(t/E)` per
//! pair, plus an internal differential.  [`check_homotopy_operad`] tests
//! the defining relations; [`strict_to_homotopy`] produces the data of an
//! honest operad, for which every higher `∘_E` vanishes and the relations
//! reduce to commutation of single-edge contractions.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::bar_koszul::wedge_string;
use crate::matrix::SparseMat;
use crate::operad::{
    contract_action, species_on_tree, tree_dim, Operad, OperadError, Species, TreeVector,
};
use crate::perm::Perm;
use crate::scalar::{q_int, Q};
use crate::trees::{
    cluster_string, enumerate_trees, subsets, Cluster, EdgeSet, LabelSet, Tree, TreeError,
};

/// Errors from the homotopy-operad machinery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomotopyError {
    /// The label range is too small to check anything.
    TooFewLabels(usize),
    /// The species truncation cannot evaluate a needed arity.
    MaxArityTooSmall {
        /// Arity required by the corolla.
        need: usize,
        /// The species' truncation bound.
        have: usize,
    },
    /// A required structure matrix is absent.
    MissingOp {
        /// Canonical form of the source tree.
        tree: String,
        /// The contracted edge set.
        edges: String,
    },
    /// A supplied matrix has the wrong shape.
    BadShape {
        /// Canonical form of the source tree (or arity for differentials).
        what: String,
        /// Supplied shape.
        got: (usize, usize),
        /// Required shape.
        want: (usize, usize),
    },
    /// An operad-level failure.
    Operad(OperadError),
    /// A tree-level failure.
    Tree(TreeError),
}

impl From<OperadError> for HomotopyError {
    fn from(e: OperadError) -> Self {
        HomotopyError::Operad(e)
    }
}

impl From<TreeError> for HomotopyError {
    fn from(e: TreeError) -> Self {
        HomotopyError::Tree(e)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for HomotopyError {}

impl fmt::Display for HomotopyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomotopyError::TooFewLabels(n) => {
                write!(f, "homotopy relations need at least 2 labels, got {n}")
            }
            HomotopyError::MaxArityTooSmall { need, have } => {
                write!(f, "species truncation {have} cannot evaluate arity {need}")
            }
            HomotopyError::MissingOp { tree, edges } => {
                write!(f, "no structure matrix for t = {tree}, E = {edges}")
            }
            HomotopyError::BadShape { what, got, want } => write!(
                f,
                "matrix for {what} has shape {}×{}, expected {}×{}",
                got.0, got.1, want.0, want.1
            ),
            HomotopyError::Operad(e) => write!(f, "{e}"),
            HomotopyError::Tree(e) => write!(f, "{e}"),
        }
    }
}

/// One signed term `F ⊗ G` of a cocomposition or cobar expansion.
///
/// In [`koszul_cocomposition`] the sign is the shuffle sign `ε(F,G)` and
/// the two unit terms appear with an empty `f` or `g`; in
/// [`cobar_generator_differential`] both parts are nonempty and the sign
/// is the cobar coefficient `(−1)^{|F|} ε(F,G)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SignedPartitionTerm {
    /// The part contracted second (left tensor factor).
    pub f: EdgeSet,
    /// The part contracted first (right tensor factor).
    pub g: EdgeSet,
    /// The coefficient of this term.
    pub sign: i64,
}

impl fmt::Display for SignedPartitionTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign >= 0 { '+' } else { '-' };
        write!(f, "{s}{}⊗{}", wedge_string(&self.f), wedge_string(&self.g))
    }
}

/// The shuffle sign `ε(F,G)`: signature of the permutation carrying the
/// canonical order of `F ⊔ G` to the concatenation `(F, G)`.
fn shuffle_sign(f: &EdgeSet, g: &EdgeSet) -> i64 {
    debug_assert!(f.intersection(g).next().is_none(), "shuffle parts must be disjoint");
    let mut union: Vec<&Cluster> = f.iter().chain(g.iter()).collect();
    union.sort();
    let word: Vec<usize> = f
        .iter()
        .chain(g.iter())
        .map(|c| union.binary_search(&c).expect("element of the union"))
        .collect();
    Perm::from_images(word).expect("disjoint parts concatenate to a bijection").sign()
}

fn check_edges(t: &Tree, e: &EdgeSet) -> Result<(), TreeError> {
    for c in e {
        if !t.clusters().contains(c) {
            return Err(TreeError::UnknownEdge(cluster_string(c)));
        }
    }
    Ok(())
}

/// The cocomposition `Δ(ω_E)`: the two unit terms (empty `f` or `g`, sign
/// +1) followed by all proper splittings `F ⊔ G = E` with their shuffle
/// signs, ordered by `(|F|, F)`.  For `E = ∅` the two unit terms coincide
/// and appear once.
pub fn koszul_cocomposition(t: &Tree, e: &EdgeSet) -> Result<Vec<SignedPartitionTerm>, TreeError> {
    check_edges(t, e)?;
    let mut out = Vec::new();
    out.push(SignedPartitionTerm { f: EdgeSet::new(), g: e.clone(), sign: 1 });
    if !e.is_empty() {
        out.push(SignedPartitionTerm { f: e.clone(), g: EdgeSet::new(), sign: 1 });
    }
    let mut proper = Vec::new();
    for f in subsets(e) {
        if f.is_empty() || f.len() == e.len() {
            continue;
        }
        let g: EdgeSet = e.difference(&f).cloned().collect();
        let sign = shuffle_sign(&f, &g);
        proper.push(SignedPartitionTerm { f, g, sign });
    }
    proper.sort_by(|a, b| (a.f.len(), &a.f).cmp(&(b.f.len(), &b.f)));
    out.extend(proper);
    Ok(out)
}

/// The cobar differential of the generator `∘_E` as a list of composable
/// pairs: each term stands for `(−1)^{|F|} ε(F,G) · ∘_F ∘ ∘_G`, i.e.
/// contract `G` first (on `t`), then `F` (on `t/G`).  Empty for `|E| = 1`:
/// single contractions are chain maps.
pub fn cobar_generator_differential(
    t: &Tree,
    e: &EdgeSet,
) -> Result<Vec<SignedPartitionTerm>, TreeError> {
    assert!(!e.is_empty(), "the cobar differential needs a nonempty edge set");
    let mut terms = koszul_cocomposition(t, e)?;
    terms.retain(|term| !term.f.is_empty() && !term.g.is_empty());
    for term in &mut terms {
        if term.f.len() % 2 == 1 {
            term.sign = -term.sign;
        }
    }
    Ok(terms)
}

/// The data of an operad up to homotopy over representative label sets:
/// a graded species with a per-arity internal differential, and one
/// structure matrix `∘_E : M(t) → M(t/E)` of degree `|E| − 1` for every
/// tree `t` and nonempty `E ⊆ E_t`.
///
/// Rows and columns of all matrices follow the [`species_on_tree`]
/// labelling order of the corresponding tree.
#[derive(Clone, Debug)]
pub struct HomotopyOperadData {
    species: Species,
    differentials: BTreeMap<usize, SparseMat>,
    ops: BTreeMap<(Tree, EdgeSet), SparseMat>,
}

impl HomotopyOperadData {
    /// Empty data over a species: no internal differential, no structure
    /// matrices.
    pub fn new(species: Species) -> Self {
        HomotopyOperadData { species, differentials: BTreeMap::new(), ops: BTreeMap::new() }
    }

    /// The underlying graded species.
    pub fn species(&self) -> &Species {
        &self.species
    }

    /// Installs the internal differential on one arity (a square matrix on
    /// the basis of that arity).
    pub fn set_differential(&mut self, arity: usize, mat: SparseMat) -> Result<(), HomotopyError> {
        let dim = self.species.dim(arity);
        if mat.rows() != dim || mat.cols() != dim {
            return Err(HomotopyError::BadShape {
                what: format!("differential in arity {arity}"),
                got: (mat.rows(), mat.cols()),
                want: (dim, dim),
            });
        }
        self.differentials.insert(arity, mat);
        Ok(())
    }

    /// The internal differential on one arity, if installed.
    pub fn differential(&self, arity: usize) -> Option<&SparseMat> {
        self.differentials.get(&arity)
    }

    /// Installs the structure matrix `∘_E : M(t) → M(t/E)`.
    pub fn insert_op(&mut self, t: Tree, e: EdgeSet, mat: SparseMat) -> Result<(), HomotopyError> {
        check_edges(&t, &e)?;
        let rows = tree_dim(&self.species, &t.contract(&e)?)?;
        let cols = tree_dim(&self.species, &t)?;
        if mat.rows() != rows || mat.cols() != cols {
            return Err(HomotopyError::BadShape {
                what: format!("t = {t}, E = {}", wedge_string(&e)),
                got: (mat.rows(), mat.cols()),
                want: (rows, cols),
            });
        }
        self.ops.insert((t, e), mat);
        Ok(())
    }

    /// The structure matrix for `(t, E)`, if present.
    pub fn op(&self, t: &Tree, e: &EdgeSet) -> Option<&SparseMat> {
        self.ops.get(&(t.clone(), e.clone()))
    }

    /// Iterates over all installed structure matrices.
    pub fn ops(&self) -> impl Iterator<Item = (&(Tree, EdgeSet), &SparseMat)> {
        self.ops.iter()
    }

    /// Scales the structure matrix for `(t, E)` in place; returns whether
    /// it was present.
    pub fn scale_op(&mut self, t: &Tree, e: &EdgeSet, factor: &Q) -> bool {
        match self.ops.get_mut(&(t.clone(), e.clone())) {
            Some(mat) => {
                mat.scale(factor);
                true
            }
            None => false,
        }
    }

    /// The internal differential of `M(t)`, extended from the per-arity
    /// differentials by the Leibniz rule with Koszul signs over the
    /// canonical vertex order.
    pub fn boundary(&self, t: &Tree) -> Result<SparseMat, HomotopyError> {
        let labelings = species_on_tree(&self.species, t)?;
        let index: BTreeMap<&[usize], usize> =
            labelings.iter().enumerate().map(|(i, l)| (l.as_slice(), i)).collect();
        let vertices = t.vertices();
        let arities: Vec<usize> = vertices.iter().map(|c| t.arity_of(c)).collect();
        let mut d = SparseMat::zero(labelings.len(), labelings.len());
        for (col, lab) in labelings.iter().enumerate() {
            let mut prefix_deg: i64 = 0;
            for (v, &arity) in arities.iter().enumerate() {
                if let Some(dm) = self.differentials.get(&arity) {
                    let sign = q_int(if prefix_deg.rem_euclid(2) == 0 { 1 } else { -1 });
                    for (r, val) in dm.column(lab[v]) {
                        let mut moved = lab.clone();
                        moved[v] = *r;
                        let row = index[moved.as_slice()];
                        d.add_entry(row, col, &sign * val);
                    }
                }
                prefix_deg += self.species.degree(arity, lab[v]);
            }
        }
        Ok(d)
    }

    /// Total degree of a labelling of `t` (sum of vertex label degrees).
    fn labelling_degree(&self, t: &Tree, lab: &[usize]) -> i64 {
        t.vertices()
            .iter()
            .zip(lab)
            .map(|(c, &i)| self.species.degree(t.arity_of(c), i))
            .sum()
    }
}

/// The homotopy data of an honest operad over labels `{1..m}` for
/// `m ≤ i_max`: single-edge matrices are the contraction action, all
/// higher `∘_E` vanish, and the internal differential is zero.
pub fn strict_to_homotopy(p: &Operad, i_max: usize) -> Result<HomotopyOperadData, HomotopyError> {
    if i_max < 2 {
        return Err(HomotopyError::TooFewLabels(i_max));
    }
    if p.max_arity() < i_max {
        return Err(HomotopyError::MaxArityTooSmall { need: i_max, have: p.max_arity() });
    }
    let mut h = HomotopyOperadData::new(p.species().clone());
    for m in 2..=i_max {
        for t in enumerate_trees(&LabelSet::ints(m)) {
            if t.edge_count() == 0 {
                continue;
            }
            let labelings = species_on_tree(p.species(), &t)?;
            for e in subsets(t.clusters()) {
                if e.is_empty() {
                    continue;
                }
                let te = t.contract(&e)?;
                let rows = tree_dim(p.species(), &te)?;
                let mut mat = SparseMat::zero(rows, labelings.len());
                if e.len() == 1 {
                    let targets = species_on_tree(p.species(), &te)?;
                    let target: BTreeMap<&[usize], usize> =
                        targets.iter().enumerate().map(|(i, l)| (l.as_slice(), i)).collect();
                    for (col, lab) in labelings.iter().enumerate() {
                        let x = TreeVector::basis_element(t.clone(), lab.clone());
                        let y = contract_action(p, &t, &e, &x)?;
                        for (lab2, coeff) in y.terms() {
                            mat.add_entry(target[lab2.as_slice()], col, coeff.clone());
                        }
                    }
                }
                h.insert_op(t.clone(), e, mat)?;
            }
        }
    }
    Ok(h)
}

/// Outcome of [`check_homotopy_operad`].
#[derive(Clone, Debug)]
pub struct HomotopyReport {
    /// Whether every relation held.
    pub passed: bool,
    /// Number of `(t, E)` relations checked.
    pub checks: usize,
    /// Human-readable descriptions of the failures.
    pub failures: Vec<String>,
}

impl fmt::Display for HomotopyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            write!(f, "homotopy relations: all {} checks passed", self.checks)
        } else {
            writeln!(
                f,
                "homotopy relations: {} of {} checks failed",
                self.failures.len(),
                self.checks
            )?;
            for line in &self.failures {
                writeln!(f, "  {line}")?;
            }
            Ok(())
        }
    }
}

/// Checks the operad-up-to-homotopy relations on every tree over `{1..m}`
/// for `2 ≤ m ≤ i_max` and every nonempty edge subset:
///
/// `∂ ∘ (∘_E) − (−1)^{|E|−1} (∘_E) ∘ ∂ = Σ_{F⊔G=E} (−1)^{|F|} ε(F,G) ∘_F ∘ ∘_G`
///
/// with ∂ the internal differential of the tree tensor products.  Also
/// verifies the degree bookkeeping: `∘_E` raises total degree by `|E|−1`.
pub fn check_homotopy_operad(
    h: &HomotopyOperadData,
    i_max: usize,
) -> Result<HomotopyReport, HomotopyError> {
    if i_max < 2 {
        return Err(HomotopyError::TooFewLabels(i_max));
    }
    if h.species().max_arity() < i_max {
        return Err(HomotopyError::MaxArityTooSmall { need: i_max, have: h.species().max_arity() });
    }
    let mut checks = 0;
    let mut failures = Vec::new();
    for m in 2..=i_max {
        for t in enumerate_trees(&LabelSet::ints(m)) {
            if t.edge_count() == 0 {
                continue;
            }
            let d_t = h.boundary(&t)?;
            let source_labs = species_on_tree(h.species(), &t)?;
            for e in subsets(t.clusters()) {
                if e.is_empty() {
                    continue;
                }
                checks += 1;
                let op = h.op(&t, &e).ok_or_else(|| HomotopyError::MissingOp {
                    tree: t.to_string(),
                    edges: wedge_string(&e),
                })?;
                let te = t.contract(&e)?;
                let target_labs = species_on_tree(h.species(), &te)?;
                let shift = e.len() as i64 - 1;
                for (r, c, _) in op.triplets() {
                    let got = h.labelling_degree(&te, &target_labs[r]);
                    let want = h.labelling_degree(&t, &source_labs[c]) + shift;
                    if got != want {
                        failures.push(format!(
                            "degree bookkeeping fails at t = {t}, E = {}: entry ({r},{c}) has \
                             degree {got}, expected {want}",
                            wedge_string(&e)
                        ));
                        break;
                    }
                }
                let d_te = h.boundary(&te)?;
                let mut right = op.mul(&d_t);
                right.scale(&q_int(if shift % 2 == 0 { 1 } else { -1 }));
                let lhs = d_te.mul(op).sub(&right);
                let mut rhs = SparseMat::zero(op.rows(), op.cols());
                for term in cobar_generator_differential(&t, &e)? {
                    let tg = t.contract(&term.g)?;
                    let op_g = h.op(&t, &term.g).ok_or_else(|| HomotopyError::MissingOp {
                        tree: t.to_string(),
                        edges: wedge_string(&term.g),
                    })?;
                    let op_f = h.op(&tg, &term.f).ok_or_else(|| HomotopyError::MissingOp {
                        tree: tg.to_string(),
                        edges: wedge_string(&term.f),
                    })?;
                    let mut prod = op_f.mul(op_g);
                    prod.scale(&q_int(term.sign));
                    rhs = rhs.add(&prod);
                }
                if !lhs.sub(&rhs).is_zero() {
                    failures.push(format!(
                        "homotopy relation fails at t = {t}, E = {}",
                        wedge_string(&e)
                    ));
                }
            }
        }
    }
    Ok(HomotopyReport { passed: failures.is_empty(), checks, failures })
}
