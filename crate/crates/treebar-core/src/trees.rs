//! The category of reduced rooted trees on a finite label set.
//!
//! A *reduced tree* on a label set `I` is a rooted tree whose leaves are
//! bijectively labelled by `I` and whose every internal vertex has at least
//! two inputs.  Such a tree is encoded — uniquely up to isomorphism — by the
//! *laminar family* of its clusters: for each non-root internal vertex, the
//! set of leaf labels below it.  Each cluster is a proper subset of `I` of
//! size at least two, and any two clusters are nested or disjoint.
//!
//! Internal edges correspond bijectively to clusters (the edge from the
//! vertex with that leaf-set to its parent), so a morphism `t -> t/E`
//! contracting an edge set `E` is simply the removal of those clusters.
//!
//! Canonical orders used throughout the crate:
//! * labels: integers numerically, then strings lexicographically;
//! * clusters/edges: lexicographic as sorted label lists (the natural
//!   [`Ord`] on `BTreeSet<Label>`);
//! * vertices: root first, then clusters in edge order;
//! * vertex inputs: ascending minimum label.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::perm::sort_sign;

/// A leaf label: an integer, or an identifier-like string.
///
/// Integers order numerically and precede all string labels; strings order
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    /// Numeric label.
    Int(i64),
    /// Symbolic label (`[A-Za-z_][A-Za-z0-9_]*`).
    Str(String),
}

impl Label {
    fn validate(&self) -> Result<(), TreeError> {
        match self {
            Label::Int(_) => Ok(()),
            Label::Str(s) => {
                let mut chars = s.chars();
                let head_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
                let tail_ok = s.chars().skip(1).all(|c| c.is_ascii_alphanumeric() || c == '_');
                if head_ok && tail_ok {
                    Ok(())
                } else {
                    Err(TreeError::BadLabel(s.clone()))
                }
            }
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(n) => write!(f, "{n}"),
            Label::Str(s) => f.write_str(s),
        }
    }
}

impl FromStr for Label {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, TreeError> {
        let label = match s.parse::<i64>() {
            Ok(n) => Label::Int(n),
            Err(_) => Label::Str(s.to_string()),
        };
        label.validate()?;
        Ok(label)
    }
}

/// A set of leaf labels identifying a vertex (equivalently, the internal
/// edge below it).
pub type Cluster = BTreeSet<Label>;

/// A set of internal edges, i.e. a set of clusters.
pub type EdgeSet = BTreeSet<Cluster>;

/// A finite, totally ordered, non-empty set of leaf labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelSet(BTreeSet<Label>);

impl LabelSet {
    /// Builds a label set, rejecting empty input and malformed labels.
    pub fn new(labels: BTreeSet<Label>) -> Result<Self, TreeError> {
        if labels.is_empty() {
            return Err(TreeError::EmptyLabels);
        }
        for l in &labels {
            l.validate()?;
        }
        Ok(LabelSet(labels))
    }

    /// The label set `{1, .., n}`.
    pub fn ints(n: usize) -> Self {
        LabelSet((1..=n as i64).map(Label::Int).collect())
    }

    /// Number of labels.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false: label sets are non-empty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The labels in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &Label> {
        self.0.iter()
    }

    /// The underlying set.
    pub fn as_set(&self) -> &BTreeSet<Label> {
        &self.0
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

/// Errors from tree construction, parsing and morphism formation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeError {
    /// Label sets must be non-empty.
    EmptyLabels,
    /// A string label is not identifier-like.
    BadLabel(String),
    /// A cluster has fewer than two labels.
    ClusterTooSmall(String),
    /// A cluster is not a proper subset of the labels.
    ClusterNotProper(String),
    /// Two clusters overlap without nesting.
    NotLaminar(String, String),
    /// An edge was requested that the tree does not have.
    UnknownEdge(String),
    /// No contraction morphism exists between the given trees.
    NoMorphism,
    /// Canonical text form could not be parsed.
    Parse(String),
}

#[cfg(feature = "std")]
impl std::error::Error for TreeError {}

impl fmt::Display for TreeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeError::EmptyLabels => write!(f, "label set must be non-empty"),
            TreeError::BadLabel(s) => write!(f, "bad label `{s}`"),
            TreeError::ClusterTooSmall(c) => write!(f, "cluster {c} has fewer than 2 labels"),
            TreeError::ClusterNotProper(c) => write!(f, "cluster {c} is not a proper subset of the labels"),
            TreeError::NotLaminar(a, b) => write!(f, "clusters {a} and {b} overlap without nesting"),
            TreeError::UnknownEdge(c) => write!(f, "tree has no edge {c}"),
            TreeError::NoMorphism => write!(f, "no contraction morphism between these trees"),
            TreeError::Parse(s) => write!(f, "cannot parse tree form: {s}"),
        }
    }
}

/// Formats a cluster in the canonical bracketed form, e.g. `[1,2,4]`.
pub fn cluster_string(c: &Cluster) -> String {
    use fmt::Write;
    let mut s = String::from("[");
    for (i, l) in c.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{l}");
    }
    s.push(']');
    s
}

/// An input slot of a vertex: either a leaf or the edge to a child vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Input {
    /// A leaf carrying the given label.
    Leaf(Label),
    /// The child vertex with the given cluster.
    Child(Cluster),
}

impl Input {
    /// The minimum label under this input; inputs are ordered by this key.
    pub fn min_label(&self) -> &Label {
        match self {
            Input::Leaf(l) => l,
            Input::Child(c) => c.iter().next().expect("clusters are non-empty"),
        }
    }
}

/// A reduced rooted tree on a label set, encoded by its laminar cluster family.
///
/// Reducedness (every vertex has ≥ 2 inputs) is automatic for laminar
/// families of proper subsets of size ≥ 2, and is asserted in debug builds.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree {
    labels: LabelSet,
    clusters: EdgeSet,
}

impl Tree {
    /// Builds a tree after validating cluster sizes, properness and laminarity.
    pub fn new(labels: LabelSet, clusters: EdgeSet) -> Result<Self, TreeError> {
        for c in &clusters {
            if c.len() < 2 {
                return Err(TreeError::ClusterTooSmall(cluster_string(c)));
            }
            if !c.is_subset(labels.as_set()) || c.len() >= labels.len() {
                return Err(TreeError::ClusterNotProper(cluster_string(c)));
            }
        }
        let list: Vec<&Cluster> = clusters.iter().collect();
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                let (a, b) = (list[i], list[j]);
                let laminar = a.is_subset(b) || b.is_subset(a) || a.is_disjoint(b);
                if !laminar {
                    return Err(TreeError::NotLaminar(cluster_string(a), cluster_string(b)));
                }
            }
        }
        let tree = Tree { labels, clusters };
        debug_assert!(tree.vertices().iter().all(|v| tree.inputs_of(v).len() >= 2));
        Ok(tree)
    }

    /// The tree with no internal edges (a bare leaf when `|I| = 1`).
    pub fn corolla(labels: LabelSet) -> Self {
        Tree { labels, clusters: EdgeSet::new() }
    }

    /// The leaf labels.
    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    /// The clusters, i.e. the internal edges, in canonical order.
    pub fn clusters(&self) -> &EdgeSet {
        &self.clusters
    }

    /// Number of internal edges.
    pub fn edge_count(&self) -> usize {
        self.clusters.len()
    }

    /// The internal edges as an ordered list (canonical edge order).
    pub fn edges(&self) -> Vec<Cluster> {
        self.clusters.iter().cloned().collect()
    }

    /// Leaf-sets of the vertices in canonical vertex order: the root first
    /// (full label set), then one vertex per cluster in edge order.
    ///
    /// A bare leaf (`|I| = 1`) has no vertices.
    pub fn vertices(&self) -> Vec<Cluster> {
        if self.labels.len() < 2 {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(1 + self.clusters.len());
        out.push(self.labels.as_set().clone());
        out.extend(self.clusters.iter().cloned());
        out
    }

    /// The ordered input slots of the vertex with the given leaf-set.
    ///
    /// Inputs are the maximal clusters strictly below the vertex plus the
    /// labels not covered by them, sorted by minimum label.
    pub fn inputs_of(&self, leafset: &Cluster) -> Vec<Input> {
        let children: Vec<&Cluster> = self
            .clusters
            .iter()
            .filter(|c| c.is_subset(leafset) && c.len() < leafset.len())
            .filter(|c| {
                // maximal: no other cluster strictly between c and leafset
                !self.clusters.iter().any(|d| {
                    d.len() < leafset.len() && d.is_subset(leafset) && c.is_subset(d) && c.len() < d.len()
                })
            })
            .collect();
        let covered: BTreeSet<&Label> = children.iter().flat_map(|c| c.iter()).collect();
        let mut slots: Vec<Input> = children.iter().map(|c| Input::Child((*c).clone())).collect();
        slots.extend(
            leafset.iter().filter(|l| !covered.contains(l)).map(|l| Input::Leaf(l.clone())),
        );
        slots.sort_by(|a, b| a.min_label().cmp(b.min_label()));
        slots
    }

    /// The arity (number of inputs) of the vertex with the given leaf-set.
    pub fn arity_of(&self, leafset: &Cluster) -> usize {
        self.inputs_of(leafset).len()
    }

    /// Leaf-set of the parent vertex of the edge `e`: the smallest cluster
    /// strictly containing it, or the root.
    pub fn parent_of(&self, e: &Cluster) -> Result<Cluster, TreeError> {
        if !self.clusters.contains(e) {
            return Err(TreeError::UnknownEdge(cluster_string(e)));
        }
        let parent = self
            .clusters
            .iter()
            .filter(|c| e.is_subset(c) && e.len() < c.len())
            .min_by_key(|c| c.len())
            .cloned()
            .unwrap_or_else(|| self.labels.as_set().clone());
        Ok(parent)
    }

    /// Contracts a set of internal edges, returning `t/E`.
    pub fn contract(&self, edges: &EdgeSet) -> Result<Tree, TreeError> {
        for e in edges {
            if !self.clusters.contains(e) {
                return Err(TreeError::UnknownEdge(cluster_string(e)));
            }
        }
        let clusters: EdgeSet = self.clusters.difference(edges).cloned().collect();
        Ok(Tree { labels: self.labels.clone(), clusters })
    }

    /// The partial order on edges: `e ≤ f` iff every path from a leaf to the
    /// root meeting `f` meets it before `e`, i.e. iff `f ⊆ e` as clusters.
    pub fn edge_leq(&self, e: &Cluster, f: &Cluster) -> Result<bool, TreeError> {
        for c in [e, f] {
            if !self.clusters.contains(c) {
                return Err(TreeError::UnknownEdge(cluster_string(c)));
            }
        }
        Ok(f.is_subset(e))
    }

    /// All order-preserving bijections from the edge poset to `{1, .., n}`,
    /// each with the signature of its word in canonical edge order.
    ///
    /// Extensions are produced in lexicographic order of the position word
    /// `(σ(e_1), .., σ(e_n))`.  A tree with no edges has the single empty
    /// extension of sign `+1`.
    pub fn linear_extensions(&self) -> Vec<LinearExtension> {
        let edges = self.edges();
        let n = edges.len();
        // leq[i][j] = canonical edge i must receive a smaller position than j.
        let mut lt = alloc::vec![alloc::vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j && edges[j].is_subset(&edges[i]) {
                    lt[i][j] = true;
                }
            }
        }
        let mut out = Vec::new();
        let mut positions = alloc::vec![usize::MAX; n];
        let mut taken = alloc::vec![false; n];
        fn rec(
            i: usize,
            n: usize,
            lt: &[Vec<bool>],
            positions: &mut Vec<usize>,
            taken: &mut Vec<bool>,
            out: &mut Vec<LinearExtension>,
        ) {
            if i == n {
                let sign = sort_sign(positions);
                out.push(LinearExtension { positions: positions.clone(), sign });
                return;
            }
            'pos: for p in 0..n {
                if taken[p] {
                    continue;
                }
                for j in 0..i {
                    // positions must respect the partial order both ways
                    if lt[j][i] && positions[j] > p {
                        continue 'pos;
                    }
                    if lt[i][j] && positions[j] < p {
                        continue 'pos;
                    }
                }
                positions[i] = p;
                taken[p] = true;
                rec(i + 1, n, lt, positions, taken, out);
                taken[p] = false;
                positions[i] = usize::MAX;
            }
        }
        rec(0, n, &lt, &mut positions, &mut taken, &mut out);
        out
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|[", self.labels)?;
        for (i, c) in self.clusters.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(&cluster_string(c))?;
        }
        f.write_str("]")
    }
}

impl FromStr for Tree {
    type Err = TreeError;

    /// Parses the canonical form `{1,2,3}|[[1,2]]`.
    fn from_str(s: &str) -> Result<Self, TreeError> {
        let err = || TreeError::Parse(s.to_string());
        let (labels_part, clusters_part) = s.trim().split_once('|').ok_or_else(err)?;
        let labels_part = labels_part.trim();
        if !(labels_part.starts_with('{') && labels_part.ends_with('}')) {
            return Err(err());
        }
        let mut labels = BTreeSet::new();
        for tok in split_nonempty(&labels_part[1..labels_part.len() - 1]) {
            if !labels.insert(tok.parse::<Label>()?) {
                return Err(err());
            }
        }
        let clusters_part = clusters_part.trim();
        if !(clusters_part.starts_with('[') && clusters_part.ends_with(']')) {
            return Err(err());
        }
        let inner = &clusters_part[1..clusters_part.len() - 1];
        let mut clusters = EdgeSet::new();
        for item in split_bracket_items(inner).ok_or_else(err)? {
            let mut cluster = Cluster::new();
            for tok in split_nonempty(&item) {
                if !cluster.insert(tok.parse::<Label>()?) {
                    return Err(err());
                }
            }
            if !clusters.insert(cluster) {
                return Err(err());
            }
        }
        Tree::new(LabelSet::new(labels)?, clusters)
    }
}

fn split_nonempty(s: &str) -> Vec<String> {
    s.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect()
}

/// Splits `"[1,2],[3,4,5]"` into its bracketed items (contents only).
fn split_bracket_items(s: &str) -> Option<Vec<String>> {
    let s = s.trim();
    if s.is_empty() {
        return Some(Vec::new());
    }
    let mut items = Vec::new();
    let mut rest = s;
    loop {
        rest = rest.trim_start();
        if !rest.starts_with('[') {
            return None;
        }
        let close = rest.find(']')?;
        items.push(rest[1..close].to_string());
        rest = rest[close + 1..].trim_start();
        if rest.is_empty() {
            return Some(items);
        }
        rest = rest.strip_prefix(',')?;
    }
}

/// An order-preserving bijection from the edge poset to positions, with the
/// signature of its word read in canonical edge order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearExtension {
    /// `positions[i]` is the 0-based position assigned to canonical edge `i`.
    pub positions: Vec<usize>,
    /// Signature of the word `positions`.
    pub sign: i64,
}

/// A contraction morphism `src -> dst = src/E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeMorphism {
    /// Domain tree.
    pub src: Tree,
    /// Codomain tree, equal to `src` with `contracted` removed.
    pub dst: Tree,
    /// The contracted edge set.
    pub contracted: EdgeSet,
}

impl TreeMorphism {
    /// The unique morphism `src -> dst`, if one exists.
    pub fn new(src: Tree, dst: Tree) -> Result<Self, TreeError> {
        let contracted = hom_set(&src, &dst).ok_or(TreeError::NoMorphism)?;
        Ok(TreeMorphism { src, dst, contracted })
    }
}

/// The edge set `E` with `dst = src/E`, if `dst` is a contraction of `src`.
///
/// Hom-sets in this category have at most one element; `None` means empty.
pub fn hom_set(src: &Tree, dst: &Tree) -> Option<EdgeSet> {
    if src.labels() != dst.labels() || !dst.clusters().is_subset(src.clusters()) {
        return None;
    }
    Some(src.clusters().difference(dst.clusters()).cloned().collect())
}

/// All reduced trees on the given labels, sorted canonically (lexicographic
/// by cluster list; the corolla comes first).
pub fn enumerate_trees(labels: &LabelSet) -> Vec<Tree> {
    let label_list: Vec<Label> = labels.iter().cloned().collect();
    let mut out = Vec::new();
    for family in cluster_families(&label_list) {
        let tree = Tree { labels: labels.clone(), clusters: family };
        debug_assert!(Tree::new(tree.labels.clone(), tree.clusters.clone()).is_ok());
        out.push(tree);
    }
    out.sort();
    out
}

/// All laminar cluster families on the given labels, via the root partition:
/// a tree is a partition of the labels into ≥ 2 root inputs together with a
/// tree on each block of size ≥ 2 (whose own root becomes that block's
/// cluster).
fn cluster_families(labels: &[Label]) -> Vec<EdgeSet> {
    if labels.len() <= 1 {
        return alloc::vec![EdgeSet::new()];
    }
    let mut out = Vec::new();
    for partition in set_partitions(labels.len()) {
        let block_count = partition.iter().max().map_or(0, |m| m + 1);
        if block_count < 2 {
            continue;
        }
        let mut blocks: Vec<Vec<Label>> = alloc::vec![Vec::new(); block_count];
        for (i, &b) in partition.iter().enumerate() {
            blocks[b].push(labels[i].clone());
        }
        // For each block of size ≥ 2: the block is itself a cluster, and any
        // tree on the block supplies the clusters strictly inside it.
        let big: Vec<&Vec<Label>> = blocks.iter().filter(|b| b.len() >= 2).collect();
        let sub_families: Vec<Vec<EdgeSet>> = big.iter().map(|b| cluster_families(b)).collect();
        for choice in cartesian_indices(&sub_families.iter().map(Vec::len).collect::<Vec<_>>()) {
            let mut family = EdgeSet::new();
            for (k, block) in big.iter().enumerate() {
                family.insert(block.iter().cloned().collect());
                for c in &sub_families[k][choice[k]] {
                    family.insert(c.clone());
                }
            }
            out.push(family);
        }
    }
    out
}

/// All index tuples `(i_0, .., i_{k-1})` with `i_j < sizes[j]`, in
/// lexicographic order.  An empty `sizes` yields the single empty tuple.
pub fn cartesian_indices(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if sizes.contains(&0) {
        return out;
    }
    let mut current = alloc::vec![0usize; sizes.len()];
    loop {
        out.push(current.clone());
        let mut k = sizes.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            current[k] += 1;
            if current[k] < sizes[k] {
                break;
            }
            current[k] = 0;
        }
    }
}

/// Set partitions of `{0, .., n-1}` as restricted growth strings.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut a = alloc::vec![0usize; n];
    fn rec(i: usize, n: usize, max_used: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(a.clone());
            return;
        }
        for b in 0..=max_used + 1 {
            a[i] = b;
            rec(i + 1, n, core::cmp::max(max_used, b), a, out);
        }
    }
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    a[0] = 0;
    rec(1, n, 0, &mut a, &mut out);
    out
}

/// All subsets of an edge set, in a deterministic order (by binary counter
/// over canonical edge order).
pub fn subsets(edges: &EdgeSet) -> Vec<EdgeSet> {
    let list: Vec<&Cluster> = edges.iter().collect();
    let n = list.len();
    (0..1usize << n)
        .map(|mask| {
            (0..n).filter(|i| mask >> i & 1 == 1).map(|i| list[i].clone()).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tree(s: &str) -> Tree {
        s.parse().unwrap()
    }

    /// The running five-leaf example: clusters {1,2}, {3,4,5}, {4,5}.
    fn five_leaf() -> Tree {
        tree("{1,2,3,4,5}|[[1,2],[3,4,5],[4,5]]")
    }

    #[test]
    fn parse_display_round_trip() {
        for s in [
            "{1}|[]",
            "{1,2}|[]",
            "{1,2,3,4,5}|[[1,2],[3,4,5],[4,5]]",
            "{a,b,z1}|[[a,b]]",
            "{-1,0,7}|[[-1,0]]",
        ] {
            assert_eq!(tree(s).to_string(), s);
        }
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert!("".parse::<Tree>().is_err());
        assert!("{}|[]".parse::<Tree>().is_err());
        assert!("{1,2}".parse::<Tree>().is_err());
        assert!("{1,2,3}|[[1]]".parse::<Tree>().is_err()); // cluster too small
        assert!("{1,2,3}|[[1,2,3]]".parse::<Tree>().is_err()); // not proper
        assert!("{1,2,3}|[[1,2],[2,3]]".parse::<Tree>().is_err()); // not laminar
        assert!("{1,2,3}|[[1,4]]".parse::<Tree>().is_err()); // stray label
        assert!("{1,1,2}|[]".parse::<Tree>().is_err()); // repeated label
        assert!("{1,2,3}|[[1,2],[1,2]]".parse::<Tree>().is_err()); // repeated cluster
        assert!("{1 2}|[]".parse::<Tree>().is_err()); // bad label
    }

    #[test]
    fn canonical_edge_order_is_lex_on_sorted_lists() {
        let t = five_leaf();
        let edges = t.edges();
        let g: Cluster = [Label::Int(1), Label::Int(2)].into_iter().collect();
        let e: Cluster = [Label::Int(3), Label::Int(4), Label::Int(5)].into_iter().collect();
        let f: Cluster = [Label::Int(4), Label::Int(5)].into_iter().collect();
        assert_eq!(edges, vec![g, e, f]);
    }

    #[test]
    fn vertices_inputs_and_arities_of_five_leaf() {
        let t = five_leaf();
        let verts = t.vertices();
        assert_eq!(verts.len(), 4);
        // Root first, then clusters in edge order.
        assert_eq!(&verts[0], t.labels().as_set());
        // Every vertex of this tree is binary.
        for v in &verts {
            assert_eq!(t.arity_of(v), 2, "vertex {v:?}");
        }
        // Root inputs: child {1,2} then child {3,4,5} (by min label).
        let root_inputs = t.inputs_of(&verts[0]);
        assert_eq!(
            root_inputs,
            vec![Input::Child(verts[1].clone()), Input::Child(verts[2].clone())]
        );
        // {3,4,5} has inputs: leaf 3, child {4,5}.
        let w_inputs = t.inputs_of(&verts[2]);
        assert_eq!(
            w_inputs,
            vec![Input::Leaf(Label::Int(3)), Input::Child(verts[3].clone())]
        );
    }

    #[test]
    fn input_order_interleaves_leaves_and_children() {
        let t = tree("{1,2,3,4,5}|[[2,4]]");
        let root = t.labels().as_set().clone();
        let c: Cluster = [Label::Int(2), Label::Int(4)].into_iter().collect();
        assert_eq!(
            t.inputs_of(&root),
            vec![
                Input::Leaf(Label::Int(1)),
                Input::Child(c),
                Input::Leaf(Label::Int(3)),
                Input::Leaf(Label::Int(5)),
            ]
        );
    }

    #[test]
    fn bare_leaf_has_no_vertices() {
        let t = tree("{1}|[]");
        assert!(t.vertices().is_empty());
        assert_eq!(t.edge_count(), 0);
    }

    #[test]
    fn contraction_removes_clusters() {
        let t = five_leaf();
        let e: Cluster = [Label::Int(3), Label::Int(4), Label::Int(5)].into_iter().collect();
        let contracted = t.contract(&[e].into_iter().collect()).unwrap();
        assert_eq!(contracted.to_string(), "{1,2,3,4,5}|[[1,2],[4,5]]");
        // Contracting everything yields the corolla.
        let all = t.contract(t.clusters()).unwrap();
        assert_eq!(all.edge_count(), 0);
        // Unknown edges are rejected.
        let bogus: Cluster = [Label::Int(1), Label::Int(3)].into_iter().collect();
        assert!(matches!(
            t.contract(&[bogus].into_iter().collect()),
            Err(TreeError::UnknownEdge(_))
        ));
    }

    #[test]
    fn hom_sets_are_contractions_only() {
        let t = five_leaf();
        let corolla = Tree::corolla(t.labels().clone());
        assert_eq!(hom_set(&t, &corolla), Some(t.clusters().clone()));
        assert_eq!(hom_set(&t, &t), Some(EdgeSet::new()));
        assert_eq!(hom_set(&corolla, &t), None);
        let other = tree("{1,2,3}|[]");
        assert_eq!(hom_set(&t, &other), None);
        let m = TreeMorphism::new(t.clone(), corolla).unwrap();
        assert_eq!(m.contracted.len(), 3);
        assert!(TreeMorphism::new(other, t).is_err());
    }

    #[test]
    fn edge_poset_of_five_leaf() {
        let t = five_leaf();
        let [g, e, f] = [&t.edges()[0], &t.edges()[1], &t.edges()[2]];
        assert!(t.edge_leq(e, f).unwrap()); // {4,5} ⊆ {3,4,5}
        assert!(!t.edge_leq(f, e).unwrap());
        assert!(t.edge_leq(e, e).unwrap());
        assert!(!t.edge_leq(g, e).unwrap() && !t.edge_leq(e, g).unwrap());
        let bogus: Cluster = [Label::Int(1), Label::Int(3)].into_iter().collect();
        assert!(t.edge_leq(&bogus, e).is_err());
    }

    #[test]
    fn linear_extensions_of_five_leaf() {
        // Canonical edge order: e1 = {1,2}, e2 = {3,4,5}, e3 = {4,5}, with
        // e2 below e3 in the poset; exactly the three extensions with
        // position(e2) < position(e3) survive, with signs +, +, -.
        let t = five_leaf();
        let exts = t.linear_extensions();
        let words: Vec<(Vec<usize>, i64)> =
            exts.iter().map(|x| (x.positions.clone(), x.sign)).collect();
        assert_eq!(
            words,
            vec![
                (vec![0, 1, 2], 1),
                (vec![1, 0, 2], -1),
                (vec![2, 0, 1], 1),
            ]
        );
    }

    #[test]
    fn linear_extensions_match_brute_force_filter() {
        use crate::perm::Perm;
        for t in enumerate_trees(&LabelSet::ints(4)) {
            let edges = t.edges();
            let n = edges.len();
            let mut expected = Vec::new();
            for p in Perm::all(n) {
                let ok = (0..n).all(|i| {
                    (0..n).all(|j| {
                        i == j || !edges[j].is_subset(&edges[i]) || p.apply(i) < p.apply(j)
                    })
                });
                if ok {
                    expected.push((p.images().to_vec(), p.sign()));
                }
            }
            let got: Vec<(Vec<usize>, i64)> =
                t.linear_extensions().iter().map(|x| (x.positions.clone(), x.sign)).collect();
            assert_eq!(got, expected, "tree {t}");
        }
    }

    #[test]
    fn corolla_and_bare_leaf_have_one_empty_extension() {
        for s in ["{1}|[]", "{1,2,3}|[]"] {
            let exts = tree(s).linear_extensions();
            assert_eq!(exts.len(), 1);
            assert!(exts[0].positions.is_empty());
            assert_eq!(exts[0].sign, 1);
        }
    }

    #[test]
    fn enumeration_counts_small() {
        for (n, count) in [(1usize, 1usize), (2, 1), (3, 4), (4, 26)] {
            let trees = enumerate_trees(&LabelSet::ints(n));
            assert_eq!(trees.len(), count, "n = {n}");
            // Canonically sorted and duplicate-free.
            let mut sorted = trees.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(trees, sorted);
            // The corolla comes first.
            assert_eq!(trees[0].edge_count(), 0);
        }
    }

    #[test]
    fn every_enumerated_tree_is_reduced() {
        for n in 1..=4 {
            for t in enumerate_trees(&LabelSet::ints(n)) {
                for v in t.vertices() {
                    assert!(t.arity_of(&v) >= 2, "vertex {v:?} of {t}");
                }
            }
        }
    }

    #[test]
    fn string_labels_order_after_integers() {
        let t = tree("{1,2,a}|[[1,a]]");
        let c: Cluster = [Label::Int(1), Label::Str("a".into())].into_iter().collect();
        assert_eq!(t.edges(), vec![c.clone()]);
        assert_eq!(t.parent_of(&c).unwrap(), t.labels().as_set().clone());
        assert_eq!(t.to_string(), "{1,2,a}|[[1,a]]");
    }

    #[test]
    fn parent_of_nested_cluster() {
        let t = five_leaf();
        let e: Cluster = [Label::Int(3), Label::Int(4), Label::Int(5)].into_iter().collect();
        let f: Cluster = [Label::Int(4), Label::Int(5)].into_iter().collect();
        assert_eq!(t.parent_of(&f).unwrap(), e);
        assert_eq!(t.parent_of(&e).unwrap(), *t.labels().as_set());
    }

    #[test]
    fn subsets_are_exhaustive_and_deterministic() {
        let t = five_leaf();
        let subs = subsets(t.clusters());
        assert_eq!(subs.len(), 8);
        assert_eq!(subs[0], EdgeSet::new());
        assert_eq!(&subs[7], t.clusters());
        let unique: BTreeSet<_> = subs.iter().cloned().collect();
        assert_eq!(unique.len(), 8);
    }
}
