//! The level bar construction, the levelization map Φ and the collapse ψ̄.
//!
//! A [`LevelTree`] is a reduced tree whose vertices carry strictly
//! increasing levels (root at level 0, levels growing leafward, every level
//! occupied) together with an operad labelling.  Unit-labelled filler
//! vertices are never materialized: a vertex whose parent sits several
//! levels below is understood to reach it through implicit units.
//!
//! [`build_levelbar`] assembles these into a chain complex graded by the
//! number of levels, with the simplicial differential that merges adjacent
//! levels ([`merge_levels`]); the two outer faces vanish on this normalized
//! basis because every level carries a vertex of arity at least two, which
//! the augmentation to the unit operad kills.
//!
//! [`phi`] places the source of each wedge edge on its own level, one term
//! per linear extension of the edge poset, with the extension's sign.
//! [`psi_bar`] goes back down to the tree-indexed bar complex through the
//! level-edge sets `N_i` ([`level_edge_sets`]) and the signed shuffle
//! formula ([`shuffle_blocks`]).  [`verify_factorization`] checks — as an
//! exact matrix identity — that the two routes agree: ψ̄ ∘ Φ = κ̄.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::bar_koszul::{
    build_K_operad, build_N_operad, check_operad_inputs, kappa, BarError, KOpKey, NOpKey,
};
use crate::complex::{BasedChainComplex, ChainMap, Field};
use crate::matrix::SparseMat;
use crate::operad::{contract_action, species_on_tree, Operad, TreeVector};
use crate::perm::Perm;
use crate::scalar::{q_int, Q};
use crate::trees::{cartesian_indices, cluster_string, enumerate_trees, EdgeSet, LabelSet, Tree};

use num_traits::Zero;

/// Errors produced when assembling a [`LevelTree`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelError {
    /// The tree has no vertices at all (a bare leaf carries no levels).
    NoVertices,
    /// `levels`/`labels` length differs from the vertex count.
    LengthMismatch {
        /// Number of vertices of the tree.
        vertices: usize,
        /// Number of levels supplied.
        levels: usize,
        /// Number of labels supplied.
        labels: usize,
    },
    /// The root vertex is not at level 0.
    RootNotZero(usize),
    /// A vertex does not sit strictly above its parent.
    NotIncreasing(String),
    /// Some level in `0..n` carries no vertex.
    NotSurjective(usize),
}

#[cfg(feature = "std")]
impl std::error::Error for LevelError {}

impl fmt::Display for LevelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelError::NoVertices => f.write_str("a level tree needs at least one vertex"),
            LevelError::LengthMismatch { vertices, levels, labels } => write!(
                f,
                "tree has {vertices} vertices but {levels} levels and {labels} labels were given"
            ),
            LevelError::RootNotZero(l) => write!(f, "root vertex must be at level 0, got {l}"),
            LevelError::NotIncreasing(c) => {
                write!(f, "vertex {c} does not sit strictly above its parent")
            }
            LevelError::NotSurjective(l) => write!(f, "no vertex at level {l}"),
        }
    }
}

/// A reduced tree with a normalized level function and an operad labelling.
///
/// Vertices follow the canonical order of [`Tree::vertices`]; `levels[j]`
/// and `labels[j]` belong to vertex `j`.  The root sits at level 0, every
/// vertex sits strictly above its parent, and each level in `0..n_levels`
/// carries at least one vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LevelTree {
    tree: Tree,
    levels: Vec<usize>,
    labels: Vec<usize>,
}

impl LevelTree {
    /// Validates the level-tree invariants and builds the value.
    pub fn new(tree: Tree, levels: Vec<usize>, labels: Vec<usize>) -> Result<Self, LevelError> {
        let vertices = tree.vertices();
        if vertices.is_empty() {
            return Err(LevelError::NoVertices);
        }
        if levels.len() != vertices.len() || labels.len() != vertices.len() {
            return Err(LevelError::LengthMismatch {
                vertices: vertices.len(),
                levels: levels.len(),
                labels: labels.len(),
            });
        }
        if levels[0] != 0 {
            return Err(LevelError::RootNotZero(levels[0]));
        }
        for (j, c) in vertices.iter().enumerate().skip(1) {
            let parent = tree.parent_of(c).expect("vertex clusters are edges");
            let pidx = vertices.iter().position(|v| *v == parent).expect("parent is a vertex");
            if levels[j] <= levels[pidx] {
                return Err(LevelError::NotIncreasing(cluster_string(c)));
            }
        }
        let n = levels.iter().max().copied().unwrap_or(0) + 1;
        for l in 0..n {
            if !levels.contains(&l) {
                return Err(LevelError::NotSurjective(l));
            }
        }
        Ok(LevelTree { tree, levels, labels })
    }

    /// The underlying reduced tree.
    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    /// Levels in canonical vertex order.
    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    /// Operad labelling in canonical vertex order.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of levels `n` (levels are `0..n`).
    pub fn n_levels(&self) -> usize {
        self.levels.iter().max().copied().unwrap_or(0) + 1
    }
}

impl fmt::Display for LevelTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vertices = self.tree.vertices();
        write!(f, "{} @ levels:{{", self.tree)?;
        for (j, c) in vertices.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", cluster_string(c), self.levels[j])?;
        }
        f.write_str("} labels:{")?;
        for (j, c) in vertices.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", cluster_string(c), self.labels[j])?;
        }
        f.write_str("}")
    }
}

/// Per-edge level data of a [`LevelTree`]: source/target levels in
/// canonical edge order and the level-edge sets `N_i`.
///
/// An edge's source is its cluster vertex, its target the nearest genuine
/// ancestor vertex (implicit unit chains are skipped), so `s(e) > t(e)`.
/// `N_i = {e : t(e) < i ≤ s(e)}` for `i = 1..n`; the sets cover all edges
/// but need not be disjoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelEdgeData {
    /// `s(e)` for each canonical edge.
    pub source_levels: Vec<usize>,
    /// `t(e)` for each canonical edge.
    pub target_levels: Vec<usize>,
    /// The sets `N_1, …, N_{n−1+…}`, indexed so `n_sets[i-1] = N_i`.
    pub n_sets: Vec<EdgeSet>,
}

/// Computes source/target levels and the level-edge sets of `lt`.
pub fn level_edge_sets(lt: &LevelTree) -> LevelEdgeData {
    let vertices = lt.tree().vertices();
    let edges = lt.tree().edges();
    let mut source_levels = Vec::with_capacity(edges.len());
    let mut target_levels = Vec::with_capacity(edges.len());
    for c in &edges {
        let j = vertices.iter().position(|v| v == c).expect("edge cluster is a vertex");
        let parent = lt.tree().parent_of(c).expect("edge exists");
        let pidx = vertices.iter().position(|v| *v == parent).expect("parent is a vertex");
        source_levels.push(lt.levels()[j]);
        target_levels.push(lt.levels()[pidx]);
    }
    let n = lt.n_levels() - 1;
    let mut n_sets = Vec::with_capacity(n);
    for i in 1..=n {
        let mut set = EdgeSet::new();
        for (j, c) in edges.iter().enumerate() {
            if target_levels[j] < i && i <= source_levels[j] {
                set.insert(c.clone());
            }
        }
        n_sets.push(set);
    }
    LevelEdgeData { source_levels, target_levels, n_sets }
}

/// Merges level `i` into level `i−1` (`1 ≤ i ≤ n−1`).
///
/// Level-`i` vertices feeding a vertex at level `i−1` are composed into it
/// through the operad; vertices reaching deeper levels through implicit
/// units simply move down one level.  Levels above `i` shift down, so the
/// result is normalized.  The sum has several terms only when the operad's
/// composition tables do.
pub fn merge_levels(
    p: &Operad,
    lt: &LevelTree,
    i: usize,
) -> Result<Vec<(LevelTree, Q)>, BarError> {
    let n = lt.n_levels();
    assert!(i >= 1 && i < n, "merge index {i} out of range 1..{n}");
    let vertices = lt.tree().vertices();
    let mut merge_set = EdgeSet::new();
    for (j, c) in vertices.iter().enumerate().skip(1) {
        if lt.levels()[j] == i {
            let parent = lt.tree().parent_of(c)?;
            let pidx = vertices.iter().position(|v| *v == parent).expect("parent is a vertex");
            if lt.levels()[pidx] == i - 1 {
                merge_set.insert(c.clone());
            }
        }
    }
    let x = TreeVector::basis_element(lt.tree().clone(), lt.labels().to_vec());
    let y = contract_action(p, lt.tree(), &merge_set, &x)?;
    let new_tree = y.tree().clone();
    let new_levels: Vec<usize> = new_tree
        .vertices()
        .iter()
        .map(|c| {
            let old = vertices.iter().position(|v| v == c).expect("surviving vertex");
            let l = lt.levels()[old];
            if l >= i {
                l - 1
            } else {
                l
            }
        })
        .collect();
    let mut out = Vec::new();
    for (label, coeff) in y.terms() {
        let merged = LevelTree::new(new_tree.clone(), new_levels.clone(), label.clone())
            .expect("merge output is normalized");
        out.push((merged, coeff.clone()));
    }
    Ok(out)
}

/// The simplicial differential `d = Σ_{i=1}^{n−1} (−1)^i` [`merge_levels`]
/// of a single level tree, with like terms combined.
pub fn level_differential(p: &Operad, lt: &LevelTree) -> Result<Vec<(LevelTree, Q)>, BarError> {
    let n = lt.n_levels();
    let mut acc: BTreeMap<LevelTree, Q> = BTreeMap::new();
    for i in 1..n {
        let sign = q_int(if i % 2 == 0 { 1 } else { -1 });
        for (merged, coeff) in merge_levels(p, lt, i)? {
            let entry = acc.entry(merged).or_insert_with(|| q_int(0));
            *entry = &*entry + &(&sign * &coeff);
        }
    }
    Ok(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect())
}

/// All normalized level functions with `n` levels on the vertices of `t`.
fn enumerate_levelings(t: &Tree, n: usize) -> Vec<Vec<usize>> {
    let vertices = t.vertices();
    if vertices.is_empty() || n == 0 || n > vertices.len() {
        return Vec::new();
    }
    let parent_idx: Vec<usize> = vertices
        .iter()
        .enumerate()
        .skip(1)
        .map(|(_, c)| {
            let parent = t.parent_of(c).expect("edge exists");
            vertices.iter().position(|v| *v == parent).expect("parent is a vertex")
        })
        .collect();
    let mut out = Vec::new();
    for word in cartesian_indices(&alloc::vec![n - 1; vertices.len() - 1]) {
        let mut levels = Vec::with_capacity(vertices.len());
        levels.push(0);
        levels.extend(word.iter().map(|w| w + 1));
        let monotone = (1..vertices.len()).all(|j| levels[j] > levels[parent_idx[j - 1]]);
        let surjective = (0..n).all(|l| levels.contains(&l));
        if monotone && surjective {
            out.push(levels);
        }
    }
    out
}

/// The level bar complex over all trees on `labels`: degree `n` is spanned
/// by the level trees with `n` levels (up to `max_levels`), with the
/// adjacent-level merge differential.  Pass `max_levels ≥ |labels| − 1` for
/// the full complex.
pub fn build_levelbar(
    labels: &LabelSet,
    p: &Operad,
    max_levels: usize,
) -> Result<BasedChainComplex<LevelTree>, BarError> {
    check_operad_inputs(labels, p)?;
    assert!(max_levels >= 1, "a level bar complex needs at least one level");
    let trees = enumerate_trees(labels);
    let most_vertices = trees.iter().map(|t| t.vertices().len()).max().unwrap_or(0);
    let top = max_levels.min(most_vertices);
    let mut bases: Vec<Vec<LevelTree>> = Vec::with_capacity(top);
    for n in 1..=top {
        let mut keys = Vec::new();
        for t in &trees {
            let labelings = species_on_tree(p.species(), t)?;
            for levels in enumerate_levelings(t, n) {
                for label in &labelings {
                    keys.push(
                        LevelTree::new(t.clone(), levels.clone(), label.clone())
                            .expect("enumerated leveling is valid"),
                    );
                }
            }
        }
        keys.sort();
        bases.push(keys);
    }
    let mut complex = BasedChainComplex::new(1, bases);
    for n in 2..=top as i64 {
        let mut d = SparseMat::zero(complex.dim(n - 1), complex.dim(n));
        for (col, key) in complex.basis(n).iter().enumerate() {
            for (merged, coeff) in level_differential(p, key)? {
                let row = complex.index_of(n - 1, &merged).expect("merged level tree in basis");
                d.add_entry(row, col, coeff);
            }
        }
        complex.set_diff(n, d);
    }
    Ok(complex)
}

/// The levelization chain map Φ from the operad Koszul complex to the level
/// bar complex (degree shift +1).
///
/// A wedge over `t` goes to the signed sum, over all linear extensions of
/// the edge poset, of the level tree placing the source of edge `e` at the
/// level the extension assigns to `e` (root at level 0).  The sign is the
/// signature of the extension's position word in canonical edge order.
pub fn phi<'a>(
    k: &'a BasedChainComplex<KOpKey>,
    l: &'a BasedChainComplex<LevelTree>,
) -> ChainMap<'a, KOpKey, LevelTree> {
    let mut map = ChainMap::new(k, l, 1);
    for deg in k.degrees() {
        let mut mat = SparseMat::zero(l.dim(deg + 1), k.dim(deg));
        for (col, key) in k.basis(deg).iter().enumerate() {
            for ext in key.tree.linear_extensions() {
                let mut levels = Vec::with_capacity(ext.positions.len() + 1);
                levels.push(0);
                levels.extend(ext.positions.iter().map(|p| p + 1));
                let lt = LevelTree::new(key.tree.clone(), levels, key.label.clone())
                    .expect("linear extensions are normalized levelings");
                let row = l.index_of(deg + 1, &lt).expect("level tree in basis");
                mat.add_entry(row, col, q_int(ext.sign));
            }
        }
        map.set_mat(deg, mat);
    }
    map
}

/// The signed shuffle expansion of a level-edge decomposition, including
/// terms with empty blocks: for each `σ ∈ S_n` the blocks
/// `E_i = N_{σ(i)} ∖ ∪_{j<i} N_{σ(j)}` with sign `ε(σ)`.
pub fn shuffle_blocks_raw(n_sets: &[EdgeSet]) -> Vec<(Vec<EdgeSet>, i64)> {
    let n = n_sets.len();
    let mut out = Vec::new();
    for sigma in Perm::all(n) {
        let mut seen = EdgeSet::new();
        let mut blocks = Vec::with_capacity(n);
        for i in 0..n {
            let pick = &n_sets[sigma.apply(i)];
            let block: EdgeSet = pick.difference(&seen).cloned().collect();
            seen.extend(pick.iter().cloned());
            blocks.push(block);
        }
        out.push((blocks, sigma.sign()));
    }
    out
}

/// [`shuffle_blocks_raw`] with the terms containing an empty block dropped
/// (the normalization of the target bar complex).
pub fn shuffle_blocks(n_sets: &[EdgeSet]) -> Vec<(Vec<EdgeSet>, i64)> {
    shuffle_blocks_raw(n_sets)
        .into_iter()
        .filter(|(blocks, _)| blocks.iter().all(|b| !b.is_empty()))
        .collect()
}

/// The collapse chain map ψ̄ from the level bar complex to the tree bar
/// complex (degree shift −1): each level tree goes to the signed shuffle
/// expansion of its level-edge sets, carried by its underlying reduced tree
/// and labelling.
pub fn psi_bar<'a>(
    l: &'a BasedChainComplex<LevelTree>,
    n: &'a BasedChainComplex<NOpKey>,
) -> ChainMap<'a, LevelTree, NOpKey> {
    let mut map = ChainMap::new(l, n, -1);
    for deg in l.degrees() {
        let mut mat = SparseMat::zero(n.dim(deg - 1), l.dim(deg));
        for (col, lt) in l.basis(deg).iter().enumerate() {
            let data = level_edge_sets(lt);
            for (blocks, sign) in shuffle_blocks(&data.n_sets) {
                let key =
                    NOpKey { tree: lt.tree().clone(), blocks, label: lt.labels().to_vec() };
                let row = n.index_of(deg - 1, &key).expect("shuffle blocks partition the edges");
                mat.add_entry(row, col, q_int(sign));
            }
        }
        map.set_mat(deg, mat);
    }
    map
}

/// Outcome of [`verify_factorization`].
#[derive(Clone, Debug)]
pub struct FactorizationReport {
    /// Whether every check passed.
    pub passed: bool,
    /// Number of checks performed.
    pub checks: usize,
    /// Human-readable descriptions of the failures.
    pub failures: Vec<String>,
}

impl fmt::Display for FactorizationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            write!(f, "factorization: all {} checks passed", self.checks)
        } else {
            writeln!(f, "factorization: {} of {} checks failed", self.failures.len(), self.checks)?;
            for line in &self.failures {
                writeln!(f,"  {line}")?;
            }
            Ok(())
        }
    }
}

/// Verifies the factorization ψ̄ ∘ Φ = κ̄ over `labels` with coefficients in
/// `p`: all three maps are chain maps, the composite equals κ̄ as an exact
/// matrix identity in every degree, and each map is a quasi-isomorphism
/// over `field`.
pub fn verify_factorization(
    labels: &LabelSet,
    p: &Operad,
    field: Field,
) -> Result<FactorizationReport, BarError> {
    let k = build_K_operad(labels, p)?;
    let nop = build_N_operad(labels, p)?;
    let max_levels = labels.len().saturating_sub(1).max(1);
    let l = build_levelbar(labels, p, max_levels)?;
    let kap = kappa(&k, &nop);
    let ph = phi(&k, &l);
    let ps = psi_bar(&l, &nop);

    let mut checks = 0;
    let mut failures = Vec::new();
    for (name, result) in [
        ("κ̄", kap.verify_chain_map()),
        ("Φ", ph.verify_chain_map()),
        ("ψ̄", ps.verify_chain_map()),
    ] {
        checks += 1;
        if let Err(e) = result {
            failures.push(alloc::format!("{name} is not a chain map: {e}"));
        }
    }
    for deg in k.degrees() {
        checks += 1;
        let composite = ps.mat(deg + 1).mul(&ph.mat(deg));
        if !composite.sub(&kap.mat(deg)).is_zero() {
            failures.push(alloc::format!("ψ̄∘Φ ≠ κ̄ in degree {deg}"));
        }
    }
    for (name, result) in [
        ("κ̄", kap.is_quasi_iso(field)),
        ("Φ", ph.is_quasi_iso(field)),
        ("ψ̄", ps.is_quasi_iso(field)),
    ] {
        checks += 1;
        match result {
            Ok(true) => {}
            Ok(false) => failures.push(alloc::format!("{name} is not a quasi-isomorphism")),
            Err(e) => failures.push(alloc::format!("homology of the cone of {name} failed: {e}")),
        }
    }
    Ok(FactorizationReport { passed: failures.is_empty(), checks, failures })
}
