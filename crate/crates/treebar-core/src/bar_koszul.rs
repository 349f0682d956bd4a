//! Normalized bar complexes, Koszul complexes and the comparison map κ̄.
//!
//! All complexes here are built from the category of reduced trees with
//! three kinds of coefficient atoms: for trees `t`, `s` the modules `b_t`,
//! `b_s` supported on a single tree, the corolla atom `b_I`, and an operad
//! `P` acting through [`contract_action`].  Because the atoms are supported
//! on one object, the two outer faces of the bar differential are zero maps
//! whenever their target coefficient space vanishes; this is what reduces
//! the general simplicial differential to the explicit formulas below.
//!
//! * [`build_N_category`]: the normalized bar complex between two trees —
//!   ordered partitions of the contracted edge set, inner-merge
//!   differential.  Its homology being one-dimensional in top degree for
//!   every pair is the Koszulness property verified by the test suites.
//! * [`build_K_resolution`]: the Koszul resolution of the atom `b_s`
//!   evaluated at `t` — pairs `(G, F)` splitting the edge set, with the
//!   `d_r` face only (the `d_l` face lands in classes killed by the atom).
//! * [`build_N_operad`] / [`build_K_operad`]: the same two shapes with
//!   operad coefficients, summed over all trees on a label set.
//! * [`kappa`] / [`kappa_category`]: the wedge-to-shuffles comparison map,
//!   a chain map and (verified computationally) a quasi-isomorphism.

// The builders are named after the complexes they assemble (N for the
// normalized bar shape, K for the Koszul shape), capitals and all.
#![allow(non_snake_case)]

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::complex::{BasedChainComplex, ChainMap};
use crate::matrix::SparseMat;
use crate::operad::{contract_action, species_on_tree, Operad, OperadError, TreeVector};
use crate::perm::Perm;
use crate::scalar::q_int;
use crate::trees::{
    cartesian_indices, cluster_string, enumerate_trees, hom_set, subsets, Cluster, EdgeSet,
    LabelSet, Tree, TreeError,
};

/// Errors from bar/Koszul builders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BarError {
    /// There is no contraction morphism between the given trees.
    NoMorphism,
    /// The label set is too small for the operad-coefficient complexes.
    TooFewLabels(usize),
    /// The operad truncation cannot evaluate the corolla.
    MaxArityTooSmall {
        /// Required arity (the number of labels).
        need: usize,
        /// The operad's truncation bound.
        have: usize,
    },
    /// An operad-level failure (arity overflow, bad labelling, …).
    Operad(OperadError),
    /// A tree-level failure.
    Tree(TreeError),
}

impl From<OperadError> for BarError {
    fn from(e: OperadError) -> Self {
        BarError::Operad(e)
    }
}

impl From<TreeError> for BarError {
    fn from(e: TreeError) -> Self {
        BarError::Tree(e)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for BarError {}

impl fmt::Display for BarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BarError::NoMorphism => f.write_str("no contraction morphism between these trees"),
            BarError::TooFewLabels(n) => {
                write!(f, "operad-coefficient complexes need at least 2 labels, got {n}")
            }
            BarError::MaxArityTooSmall { need, have } => {
                write!(f, "operad truncation {have} cannot evaluate arity {need}")
            }
            BarError::Operad(e) => write!(f, "{e}"),
            BarError::Tree(e) => write!(f, "{e}"),
        }
    }
}

fn blocks_string(blocks: &[EdgeSet]) -> String {
    let mut s = String::from("(");
    for (i, b) in blocks.iter().enumerate() {
        if i > 0 {
            s.push('|');
        }
        for (j, c) in b.iter().enumerate() {
            if j > 0 {
                s.push('+');
            }
            s.push_str(&cluster_string(c));
        }
    }
    s.push(')');
    s
}

pub(crate) fn wedge_string(edges: &EdgeSet) -> String {
    if edges.is_empty() {
        return String::from("1");
    }
    let mut s = String::new();
    for (i, c) in edges.iter().enumerate() {
        if i > 0 {
            s.push('∧');
        }
        s.push_str(&cluster_string(c));
    }
    s
}

/// Basis key of the category bar complex: an ordered tuple of nonempty
/// disjoint blocks partitioning the contracted edge set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct NCatKey {
    /// The ordered blocks `(E_1, …, E_n)`.
    pub blocks: Vec<EdgeSet>,
}

impl fmt::Display for NCatKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&blocks_string(&self.blocks))
    }
}

/// Basis key of the one-dimensional category Koszul complex: the canonical
/// wedge of the contracted edge set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct KCatKey {
    /// The wedge factors in canonical edge order.
    pub wedge: EdgeSet,
}

impl fmt::Display for KCatKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&wedge_string(&self.wedge))
    }
}

/// Basis key of the Koszul resolution of `b_s` at `t`: a splitting
/// `G ⊔ F = E` (degree `|G|`), or the augmentation class in degree −1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ResKey {
    /// The augmentation slot `b_s(t)` in degree −1.
    Augmentation,
    /// A splitting `(G, F)` of the contracted edge set.
    Pair {
        /// The wedge part (canonical orientation).
        g: EdgeSet,
        /// The morphism part.
        f: EdgeSet,
    },
}

impl fmt::Display for ResKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResKey::Augmentation => f.write_str("ε"),
            ResKey::Pair { g, f: ff } => {
                write!(f, "{}⊗{}", wedge_string(g), blocks_string(core::slice::from_ref(ff)))
            }
        }
    }
}

/// Basis key of the operad bar complex: a tree, an ordered partition of all
/// its edges, and a coefficient labelling.  Degree 0 keys are corolla
/// classes with no blocks.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct NOpKey {
    /// The source tree.
    pub tree: Tree,
    /// The ordered blocks partitioning `E_t`.
    pub blocks: Vec<EdgeSet>,
    /// The coefficient labelling in `P(t)` (one basis index per vertex).
    pub label: Vec<usize>,
}

impl fmt::Display for NOpKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·{}·{:?}", self.tree, blocks_string(&self.blocks), self.label)
    }
}

/// Basis key of the operad Koszul complex: a tree with the canonical wedge
/// of all its edges and a coefficient labelling; degree = edge count.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct KOpKey {
    /// The tree.
    pub tree: Tree,
    /// The coefficient labelling in `P(t)`.
    pub label: Vec<usize>,
}

impl fmt::Display for KOpKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·{}·{:?}", self.tree, wedge_string(self.tree.clusters()), self.label)
    }
}

/// All ordered partitions of `set` into `n` nonempty blocks, in a fixed
/// deterministic order.
fn ordered_partitions(set: &EdgeSet, n: usize) -> Vec<Vec<EdgeSet>> {
    let elems: Vec<Cluster> = set.iter().cloned().collect();
    if n == 0 {
        return if elems.is_empty() { alloc::vec![Vec::new()] } else { Vec::new() };
    }
    if elems.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for assignment in cartesian_indices(&alloc::vec![n; elems.len()]) {
        let mut blocks: Vec<EdgeSet> = alloc::vec![EdgeSet::new(); n];
        for (k, &b) in assignment.iter().enumerate() {
            blocks[b].insert(elems[k].clone());
        }
        if blocks.iter().all(|b| !b.is_empty()) {
            out.push(blocks);
        }
    }
    out
}

/// The normalized bar complex between `t` and `s = t/E` with the atomic
/// coefficients supported on `s` (right) and `t` (left).
///
/// Degree `n` has the ordered partitions of `E` into `n` nonempty blocks
/// (degree 0 exists only when `E = ∅`); the differential merges adjacent
/// blocks with sign `(−1)^i`.  Both outer faces land in coefficient spaces
/// supported on other trees, hence are zero maps.
pub fn build_N_category(t: &Tree, s: &Tree) -> Result<BasedChainComplex<NCatKey>, BarError> {
    let e = hom_set(t, s).ok_or(BarError::NoMorphism)?;
    if e.is_empty() {
        let basis = alloc::vec![alloc::vec![NCatKey { blocks: Vec::new() }]];
        return Ok(BasedChainComplex::new(0, basis));
    }
    let top = e.len();
    let mut bases: Vec<Vec<NCatKey>> = Vec::with_capacity(top);
    for n in 1..=top {
        let mut keys: Vec<NCatKey> =
            ordered_partitions(&e, n).into_iter().map(|blocks| NCatKey { blocks }).collect();
        keys.sort();
        bases.push(keys);
    }
    let mut complex = BasedChainComplex::new(1, bases);
    for n in 2..=top as i64 {
        let mut d = SparseMat::zero(complex.dim(n - 1), complex.dim(n));
        for (col, key) in complex.basis(n).iter().enumerate() {
            for i in 1..key.blocks.len() {
                let mut blocks = key.blocks.clone();
                let merged: EdgeSet = blocks[i - 1].union(&blocks[i]).cloned().collect();
                blocks[i - 1] = merged;
                blocks.remove(i);
                let target = NCatKey { blocks };
                let row = complex.index_of(n - 1, &target).expect("merged partition exists");
                d.add_entry(row, col, q_int(if i % 2 == 0 { 1 } else { -1 }));
            }
        }
        complex.set_diff(n, d);
    }
    Ok(complex)
}

/// The category Koszul complex between `t` and `s = t/E`: one-dimensional,
/// concentrated in degree `|E|`, spanned by the canonical wedge.
pub fn build_K_category(t: &Tree, s: &Tree) -> Result<BasedChainComplex<KCatKey>, BarError> {
    let e = hom_set(t, s).ok_or(BarError::NoMorphism)?;
    let basis = alloc::vec![alloc::vec![KCatKey { wedge: e.clone() }]];
    Ok(BasedChainComplex::new(e.len() as i64, basis))
}

/// The comparison map from the category Koszul complex to the category bar
/// complex: the wedge goes to the signed sum of singleton-block partitions
/// over all permutations of the canonical edge order.
pub fn kappa_category<'a>(
    k: &'a BasedChainComplex<KCatKey>,
    n: &'a BasedChainComplex<NCatKey>,
) -> ChainMap<'a, KCatKey, NCatKey> {
    let mut map = ChainMap::new(k, n, 0);
    for deg in k.degrees() {
        if k.dim(deg) == 0 {
            continue;
        }
        let mut mat = SparseMat::zero(n.dim(deg), k.dim(deg));
        for (col, key) in k.basis(deg).iter().enumerate() {
            let edges: Vec<Cluster> = key.wedge.iter().cloned().collect();
            for sigma in Perm::all(edges.len()) {
                let blocks: Vec<EdgeSet> = (0..edges.len())
                    .map(|i| {
                        let mut b = EdgeSet::new();
                        b.insert(edges[sigma.apply(i)].clone());
                        b
                    })
                    .collect();
                let target = NCatKey { blocks };
                let row = n.index_of(deg, &target).expect("singleton partition exists");
                mat.add_entry(row, col, q_int(sigma.sign()));
            }
        }
        map.set_mat(deg, mat);
    }
    map
}

/// The Koszul resolution of the atom `b_s` evaluated at `t`: splittings
/// `G ⊔ F = E` in degree `|G|` with differential
/// `d(G, F) = Σ_i (−1)^i (G∖e_i, F∪{e_i})` (the other Koszul face lands in
/// classes killed by the atom, hence is a zero map).
///
/// With `augmented` the complex also carries `b_s(t)` in degree −1 — which
/// is nonzero only when `E = ∅` (the atom is supported on `s` alone) — and
/// the augmentation sends the degree-0 class to it.  The augmented complex
/// is acyclic for every pair; without augmentation the homology is `k` in
/// degree 0 when `E = ∅` and zero otherwise.
pub fn build_K_resolution(
    t: &Tree,
    s: &Tree,
    augmented: bool,
) -> Result<BasedChainComplex<ResKey>, BarError> {
    let e = hom_set(t, s).ok_or(BarError::NoMorphism)?;
    let top = e.len() as i64;
    let lo: i64 = if augmented { -1 } else { 0 };
    let mut bases: Vec<Vec<ResKey>> = Vec::new();
    if augmented {
        bases.push(if e.is_empty() {
            alloc::vec![ResKey::Augmentation]
        } else {
            Vec::new()
        });
    }
    for g_size in 0..=e.len() {
        let mut keys: Vec<ResKey> = subsets(&e)
            .into_iter()
            .filter(|g| g.len() == g_size)
            .map(|g| {
                let f: EdgeSet = e.difference(&g).cloned().collect();
                ResKey::Pair { g, f }
            })
            .collect();
        keys.sort();
        bases.push(keys);
    }
    let mut complex = BasedChainComplex::new(lo, bases);
    for deg in 1..=top {
        let mut d = SparseMat::zero(complex.dim(deg - 1), complex.dim(deg));
        for (col, key) in complex.basis(deg).iter().enumerate() {
            let ResKey::Pair { g, f } = key else { unreachable!("positive degrees hold pairs") };
            for (i, edge) in g.iter().enumerate() {
                let mut g2 = g.clone();
                g2.remove(edge);
                let mut f2 = f.clone();
                f2.insert(edge.clone());
                let target = ResKey::Pair { g: g2, f: f2 };
                let row = complex.index_of(deg - 1, &target).expect("face splitting exists");
                let sign = if (i + 1) % 2 == 0 { 1 } else { -1 };
                d.add_entry(row, col, q_int(sign));
            }
        }
        complex.set_diff(deg, d);
    }
    if augmented && e.is_empty() {
        let mut d = SparseMat::zero(1, 1);
        d.add_entry(0, 0, q_int(1));
        complex.set_diff(0, d);
    }
    Ok(complex)
}

pub(crate) fn check_operad_inputs(labels: &LabelSet, p: &Operad) -> Result<(), BarError> {
    if labels.len() < 2 {
        return Err(BarError::TooFewLabels(labels.len()));
    }
    if p.max_arity() < labels.len() {
        return Err(BarError::MaxArityTooSmall { need: labels.len(), have: p.max_arity() });
    }
    Ok(())
}

/// The normalized bar complex with corolla atom (right) and operad (left)
/// coefficients over all trees on `labels`.
///
/// Degree 0 is `P` at the corolla; degree `n ≥ 1` has triples
/// `(t, (E_1,…,E_n), p)` where the blocks partition all of `E_t`.  The
/// differential merges adjacent blocks with sign `(−1)^i` and contracts the
/// last block through the operad with sign `(−1)^n`; the first outer face
/// lands in corolla classes of trees that still have edges, hence vanishes.
pub fn build_N_operad(
    labels: &LabelSet,
    p: &Operad,
) -> Result<BasedChainComplex<NOpKey>, BarError> {
    check_operad_inputs(labels, p)?;
    let trees = enumerate_trees(labels);
    let top = trees.iter().map(|t| t.edge_count()).max().unwrap_or(0);
    let mut bases: Vec<Vec<NOpKey>> = Vec::with_capacity(top + 1);
    let corolla = Tree::corolla(labels.clone());
    let mut deg0: Vec<NOpKey> = species_on_tree(p.species(), &corolla)?
        .into_iter()
        .map(|label| NOpKey { tree: corolla.clone(), blocks: Vec::new(), label })
        .collect();
    deg0.sort();
    bases.push(deg0);
    for n in 1..=top {
        let mut keys: Vec<NOpKey> = Vec::new();
        for t in &trees {
            if t.edge_count() == 0 {
                continue;
            }
            let labelings = species_on_tree(p.species(), t)?;
            for blocks in ordered_partitions(t.clusters(), n) {
                for label in &labelings {
                    keys.push(NOpKey { tree: t.clone(), blocks: blocks.clone(), label: label.clone() });
                }
            }
        }
        keys.sort();
        bases.push(keys);
    }
    let mut complex = BasedChainComplex::new(0, bases);
    for n in 1..=top as i64 {
        let mut d = SparseMat::zero(complex.dim(n - 1), complex.dim(n));
        for (col, key) in complex.basis(n).iter().enumerate() {
            // Inner merges.
            for i in 1..key.blocks.len() {
                let mut blocks = key.blocks.clone();
                let merged: EdgeSet = blocks[i - 1].union(&blocks[i]).cloned().collect();
                blocks[i - 1] = merged;
                blocks.remove(i);
                let target = NOpKey { tree: key.tree.clone(), blocks, label: key.label.clone() };
                let row = complex.index_of(n - 1, &target).expect("merged key exists");
                d.add_entry(row, col, q_int(if i % 2 == 0 { 1 } else { -1 }));
            }
            // Last face: contract E_n through the operad.
            let last = key.blocks.last().expect("positive degree has blocks");
            let x = TreeVector::basis_element(key.tree.clone(), key.label.clone());
            let y = contract_action(p, &key.tree, last, &x)?;
            let sign = q_int(if n % 2 == 0 { 1 } else { -1 });
            let blocks: Vec<EdgeSet> = key.blocks[..key.blocks.len() - 1].to_vec();
            for (label, coeff) in y.terms() {
                let target =
                    NOpKey { tree: y.tree().clone(), blocks: blocks.clone(), label: label.clone() };
                let row = complex.index_of(n - 1, &target).expect("contracted key exists");
                d.add_entry(row, col, &sign * coeff);
            }
        }
        complex.set_diff(n, d);
    }
    Ok(complex)
}

/// The operad Koszul complex over all trees on `labels`: degree `n` is
/// spanned by `(t, e_1∧…∧e_n, p)` with `E_t = {e_1 < … < e_n}`, and
/// `d = Σ_i (−1)^i ê_i ⊗ (e_i)_*`.
///
/// Contracting `e_i` does not disturb the canonical order of the remaining
/// edges (clusters are unchanged), so no orientation sign beyond the
/// position `i` appears; this alignment is asserted.
pub fn build_K_operad(
    labels: &LabelSet,
    p: &Operad,
) -> Result<BasedChainComplex<KOpKey>, BarError> {
    check_operad_inputs(labels, p)?;
    let trees = enumerate_trees(labels);
    let top = trees.iter().map(|t| t.edge_count()).max().unwrap_or(0);
    let mut bases: Vec<Vec<KOpKey>> = Vec::with_capacity(top + 1);
    for n in 0..=top {
        let mut keys: Vec<KOpKey> = Vec::new();
        for t in trees.iter().filter(|t| t.edge_count() == n) {
            for label in species_on_tree(p.species(), t)? {
                keys.push(KOpKey { tree: t.clone(), label });
            }
        }
        keys.sort();
        bases.push(keys);
    }
    let mut complex = BasedChainComplex::new(0, bases);
    for n in 1..=top as i64 {
        let mut d = SparseMat::zero(complex.dim(n - 1), complex.dim(n));
        for (col, key) in complex.basis(n).iter().enumerate() {
            for (i, edge) in key.tree.edges().iter().enumerate() {
                let mut single = EdgeSet::new();
                single.insert(edge.clone());
                let x = TreeVector::basis_element(key.tree.clone(), key.label.clone());
                let y = contract_action(p, &key.tree, &single, &x)?;
                // Orientation alignment: contracting e_i leaves the
                // canonical order of the surviving edges unchanged.
                debug_assert_eq!(
                    y.tree().edges(),
                    key.tree.edges().into_iter().filter(|c| c != edge).collect::<Vec<_>>()
                );
                let sign = q_int(if (i + 1) % 2 == 0 { 1 } else { -1 });
                for (label, coeff) in y.terms() {
                    let target = KOpKey { tree: y.tree().clone(), label: label.clone() };
                    let row = complex.index_of(n - 1, &target).expect("contracted key exists");
                    d.add_entry(row, col, &sign * coeff);
                }
            }
        }
        complex.set_diff(n, d);
    }
    Ok(complex)
}

/// The comparison chain map `κ̄` from the operad Koszul complex to the
/// operad bar complex: each wedge goes to the signed sum over permutations
/// of its singleton-block partitions, keeping the coefficient label.
pub fn kappa<'a>(
    k: &'a BasedChainComplex<KOpKey>,
    n: &'a BasedChainComplex<NOpKey>,
) -> ChainMap<'a, KOpKey, NOpKey> {
    let mut map = ChainMap::new(k, n, 0);
    for deg in k.degrees() {
        let mut mat = SparseMat::zero(n.dim(deg), k.dim(deg));
        for (col, key) in k.basis(deg).iter().enumerate() {
            let edges = key.tree.edges();
            for sigma in Perm::all(edges.len()) {
                let blocks: Vec<EdgeSet> = (0..edges.len())
                    .map(|i| {
                        let mut b = EdgeSet::new();
                        b.insert(edges[sigma.apply(i)].clone());
                        b
                    })
                    .collect();
                let target = NOpKey { tree: key.tree.clone(), blocks, label: key.label.clone() };
                let row = n.index_of(deg, &target).expect("singleton partition exists");
                mat.add_entry(row, col, q_int(sigma.sign()));
            }
        }
        map.set_mat(deg, mat);
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Field;
    use alloc::string::ToString;
    use alloc::vec;
    use core::str::FromStr;

    fn t_fig() -> Tree {
        Tree::from_str("{1,2,3,4,5}|[[1,2],[3,4,5],[4,5]]").unwrap()
    }

    #[test]
    fn n_category_identity_pair() {
        let t = t_fig();
        let c = build_N_category(&t, &t).unwrap();
        assert_eq!(c.lo(), 0);
        assert_eq!(c.hi(), 0);
        assert_eq!(c.dim(0), 1);
        assert_eq!(c.betti(Field::Rational).unwrap().nonzero(), [(0, 1)].into_iter().collect());
    }

    #[test]
    fn n_category_dims_and_koszulness_for_three_edges() {
        let t = t_fig();
        let s = Tree::corolla(t.labels().clone());
        let c = build_N_category(&t, &s).unwrap();
        assert_eq!((c.dim(1), c.dim(2), c.dim(3)), (1, 6, 6));
        c.verify_d_squared().unwrap();
        let betti = c.betti(Field::Rational).unwrap();
        assert_eq!(betti.nonzero(), [(3, 1)].into_iter().collect());
        // Top degree: all n! orderings of the singleton partition.
        assert_eq!(c.dim(3), 6);
    }

    #[test]
    fn n_category_rejects_unrelated_trees() {
        let t = Tree::from_str("{1,2,3}|[[1,2]]").unwrap();
        let s = Tree::from_str("{1,2,3}|[[2,3]]").unwrap();
        assert_eq!(build_N_category(&t, &s).unwrap_err(), BarError::NoMorphism);
    }

    #[test]
    fn koszulness_small_cases() {
        let t = Tree::from_str("{1,2,3}|[[1,2]]").unwrap();
        let s = Tree::corolla(t.labels().clone());
        let c = build_N_category(&t, &s).unwrap();
        assert_eq!(c.betti(Field::Rational).unwrap().nonzero(), [(1, 1)].into_iter().collect());
        let t = Tree::from_str("{1,2,3,4}|[[1,2],[1,2,3]]").unwrap();
        let s = Tree::corolla(t.labels().clone());
        let c = build_N_category(&t, &s).unwrap();
        assert_eq!(c.betti(Field::Rational).unwrap().nonzero(), [(2, 1)].into_iter().collect());
    }

    #[test]
    fn k_resolution_shapes_and_acyclicity() {
        // E = ∅: homology k in degree 0; augmented: acyclic.
        let t = t_fig();
        let plain = build_K_resolution(&t, &t, false).unwrap();
        assert_eq!(plain.betti(Field::Rational).unwrap().nonzero(), [(0, 1)].into_iter().collect());
        let aug = build_K_resolution(&t, &t, true).unwrap();
        assert!(aug.betti(Field::Rational).unwrap().is_trivial());
        // |E| = 1: two-term complex, acyclic with or without augmentation
        // (the coefficient atom vanishes at t, so degree −1 is empty).
        let t1 = Tree::from_str("{1,2,3}|[[1,2]]").unwrap();
        let s1 = Tree::corolla(t1.labels().clone());
        let c = build_K_resolution(&t1, &s1, true).unwrap();
        assert_eq!(c.dim(-1), 0);
        assert_eq!((c.dim(0), c.dim(1)), (1, 1));
        assert!(c.betti(Field::Rational).unwrap().is_trivial());
        // |E| = 3: binomial dimensions, acyclic.
        let s = Tree::corolla(t.labels().clone());
        let c = build_K_resolution(&t, &s, true).unwrap();
        assert_eq!((c.dim(0), c.dim(1), c.dim(2), c.dim(3)), (1, 3, 3, 1));
        c.verify_d_squared().unwrap();
        assert!(c.betti(Field::Rational).unwrap().is_trivial());
    }

    #[test]
    fn n_operad_small_dimensions() {
        let com = Operad::commutative(4);
        let c2 = build_N_operad(&LabelSet::ints(2), &com).unwrap();
        assert_eq!(c2.lo(), 0);
        assert_eq!(c2.hi(), 0);
        assert_eq!(c2.dim(0), 1);
        let c3 = build_N_operad(&LabelSet::ints(3), &com).unwrap();
        assert_eq!((c3.dim(0), c3.dim(1)), (1, 3));
        c3.verify_d_squared().unwrap();
        let ass = Operad::associative(4);
        let c4 = build_N_operad(&LabelSet::ints(4), &ass).unwrap();
        assert_eq!((c4.dim(0), c4.dim(1), c4.dim(2)), (24, 240, 240));
        c4.verify_d_squared().unwrap();
    }

    #[test]
    fn k_operad_fixture_betti() {
        let com = Operad::commutative(4);
        let c3 = build_K_operad(&LabelSet::ints(3), &com).unwrap();
        assert_eq!((c3.dim(0), c3.dim(1)), (1, 3));
        assert_eq!(c3.betti(Field::Rational).unwrap().nonzero(), [(1, 2)].into_iter().collect());
        let c4 = build_K_operad(&LabelSet::ints(4), &com).unwrap();
        assert_eq!((c4.dim(0), c4.dim(1), c4.dim(2)), (1, 10, 15));
        let betti = c4.betti(Field::Rational).unwrap();
        assert_eq!(betti.nonzero(), [(2, 6)].into_iter().collect());
        // Same counts over a prime field.
        assert_eq!(c4.betti(Field::Prime(101)).unwrap().nonzero(), betti.nonzero());
    }

    #[test]
    fn operad_complexes_require_enough_labels_and_arity() {
        let com = Operad::commutative(4);
        assert_eq!(
            build_N_operad(&LabelSet::ints(1), &com).unwrap_err(),
            BarError::TooFewLabels(1)
        );
        assert_eq!(
            build_K_operad(&LabelSet::ints(5), &com).unwrap_err(),
            BarError::MaxArityTooSmall { need: 5, have: 4 }
        );
    }

    #[test]
    fn d_squared_on_operad_grid() {
        for op in [Operad::commutative(4), Operad::associative(4), Operad::free_binary(4)] {
            for n in 2..=4usize {
                let labels = LabelSet::ints(n);
                build_N_operad(&labels, &op).unwrap().verify_d_squared().unwrap();
                build_K_operad(&labels, &op).unwrap().verify_d_squared().unwrap();
            }
        }
    }

    #[test]
    fn kappa_on_two_edges_is_antisymmetrized() {
        let com = Operad::commutative(4);
        let labels = LabelSet::ints(4);
        let k = build_K_operad(&labels, &com).unwrap();
        let n = build_N_operad(&labels, &com).unwrap();
        let map = kappa(&k, &n);
        map.verify_chain_map().unwrap();
        // Pick a 2-edge tree and read off its column in degree 2.
        let t = Tree::from_str("{1,2,3,4}|[[1,2],[1,2,3]]").unwrap();
        let col = k.index_of(2, &KOpKey { tree: t.clone(), label: vec![0, 0, 0] }).unwrap();
        let edges = t.edges();
        let single = |c: &Cluster| -> EdgeSet { [c.clone()].into_iter().collect() };
        let ab = NOpKey {
            tree: t.clone(),
            blocks: vec![single(&edges[0]), single(&edges[1])],
            label: vec![0, 0, 0],
        };
        let ba = NOpKey {
            tree: t.clone(),
            blocks: vec![single(&edges[1]), single(&edges[0])],
            label: vec![0, 0, 0],
        };
        let mat = map.mat(2);
        assert_eq!(mat.entry(n.index_of(2, &ab).unwrap(), col), q_int(1));
        assert_eq!(mat.entry(n.index_of(2, &ba).unwrap(), col), q_int(-1));
        // Degree 0 is the identity on the corolla classes.
        assert_eq!(map.mat(0), SparseMat::identity(1));
    }

    #[test]
    fn kappa_is_quasi_iso_on_three_labels() {
        let com = Operad::commutative(3);
        let labels = LabelSet::ints(3);
        let k = build_K_operad(&labels, &com).unwrap();
        let n = build_N_operad(&labels, &com).unwrap();
        let map = kappa(&k, &n);
        map.verify_chain_map().unwrap();
        assert!(map.is_quasi_iso(Field::Rational).unwrap());
    }

    #[test]
    fn kappa_with_dropped_sign_is_not_a_chain_map() {
        let com = Operad::commutative(3);
        let labels = LabelSet::ints(3);
        let k = build_K_operad(&labels, &com).unwrap();
        let n = build_N_operad(&labels, &com).unwrap();
        let good = kappa(&k, &n);
        good.verify_chain_map().unwrap();
        // Flip the sign of one degree-1 column entry.
        let mut bad = ChainMap::new(&k, &n, 0);
        for deg in k.degrees() {
            bad.set_mat(deg, good.mat(deg));
        }
        let mut m = good.mat(1);
        let (r0, c0, v) = m.triplets().into_iter().next().unwrap();
        m.add_entry(r0, c0, -(v.clone() + v));
        bad.set_mat(1, m);
        let err = bad.verify_chain_map().unwrap_err();
        assert!(matches!(err, crate::complex::ComplexError::NotAChainMap { degree: 1, .. }));
    }

    #[test]
    fn kappa_category_realizes_koszulness() {
        let t = t_fig();
        let s = Tree::corolla(t.labels().clone());
        let kc = build_K_category(&t, &s).unwrap();
        let nc = build_N_category(&t, &s).unwrap();
        let map = kappa_category(&kc, &nc);
        map.verify_chain_map().unwrap();
        assert!(map.is_quasi_iso(Field::Rational).unwrap());
        // The image in top degree is the full alternating sum over S_3.
        let mat = map.mat(3);
        assert_eq!(mat.triplets().len(), 6);
        let mut plus = 0;
        let mut minus = 0;
        for (_, _, v) in mat.triplets() {
            if v == q_int(1) {
                plus += 1;
            } else {
                assert_eq!(v, q_int(-1));
                minus += 1;
            }
        }
        assert_eq!((plus, minus), (3, 3));
        // Identity pair: κ is the identity in degree 0.
        let kc0 = build_K_category(&t, &t).unwrap();
        let nc0 = build_N_category(&t, &t).unwrap();
        let map0 = kappa_category(&kc0, &nc0);
        map0.verify_chain_map().unwrap();
        assert!(map0.is_quasi_iso(Field::Rational).unwrap());
    }

    #[test]
    fn key_display_forms() {
        let t = Tree::from_str("{1,2,3}|[[1,2]]").unwrap();
        let e: EdgeSet = t.clusters().clone();
        let key = NCatKey { blocks: vec![e.clone()] };
        assert_eq!(key.to_string(), "([1,2])");
        let kkey = KCatKey { wedge: e.clone() };
        assert_eq!(kkey.to_string(), "[1,2]");
        let rkey = ResKey::Pair { g: e.clone(), f: EdgeSet::new() };
        assert_eq!(rkey.to_string(), "[1,2]⊗()");
        let okey = KOpKey { tree: t.clone(), label: vec![0, 0] };
        assert_eq!(okey.to_string(), "{1,2,3}|[[1,2]]·[1,2]·[0, 0]");
    }
}
