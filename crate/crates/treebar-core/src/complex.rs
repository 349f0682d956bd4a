//! Based chain complexes, exact homology, chain maps and mapping cones.
//!
//! A [`BasedChainComplex`] stores, for a contiguous range of degrees, an
//! ordered basis of opaque keys and the differential `d_n: C_n -> C_{n-1}`
//! as a sparse matrix.  Betti numbers are computed exactly from ranks:
//!
//! ```text
//!   betti_n = dim C_n - rank d_n - rank d_{n+1}
//! ```
//!
//! either over ℚ or over a prime field `F_p` (see [`Field`]).
//!
//! A [`ChainMap`] is a degree-`shift` map of complexes; its mapping cone is
//! a complex whose acyclicity is equivalent to the map being a
//! quasi-isomorphism, and is used as the single source of truth for
//! quasi-isomorphism checks.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::matrix::SparseMat;
use crate::scalar::{FpCtx, ScalarError};

/// Choice of coefficient field for rank computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    /// Exact rationals.
    Rational,
    /// The prime field `F_p`.
    Prime(u64),
}

impl Field {
    fn rank(&self, m: &SparseMat) -> Result<usize, ScalarError> {
        match self {
            Field::Rational => Ok(m.rank_q()),
            Field::Prime(p) => m.rank_fp(&FpCtx::new(*p)?),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => f.write_str("Q"),
            Field::Prime(p) => write!(f, "F{p}"),
        }
    }
}

/// Errors from homology computations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComplexError {
    /// `d∘d ≠ 0`; carries the failing degree and a witness basis element.
    NotAComplex {
        /// Degree `n` such that `d_{n-1} ∘ d_n ≠ 0`.
        degree: i64,
        /// Display form of a basis key whose double boundary is nonzero.
        witness: String,
    },
    /// A chain-map identity failed; carries degree and witness.
    NotAChainMap {
        /// Source degree at which `f∘d ≠ d∘f`.
        degree: i64,
        /// Display form of a source basis key witnessing the failure.
        witness: String,
    },
    /// Scalar-level failure (bad modulus, vanishing denominator).
    Scalar(ScalarError),
}

impl From<ScalarError> for ComplexError {
    fn from(e: ScalarError) -> Self {
        ComplexError::Scalar(e)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ComplexError {}

impl fmt::Display for ComplexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexError::NotAComplex { degree, witness } => {
                write!(f, "d² ≠ 0 at degree {degree}; witness {witness}")
            }
            ComplexError::NotAChainMap { degree, witness } => {
                write!(f, "chain-map identity fails at degree {degree}; witness {witness}")
            }
            ComplexError::Scalar(e) => write!(f, "{e}"),
        }
    }
}

/// A chain complex with explicit ordered bases over a degree range.
///
/// Degrees run over `lo()..=hi()`; `diff(n)` is the matrix of
/// `d_n: C_n -> C_{n-1}` with `dim C_{n-1}` rows and `dim C_n` columns
/// (so `diff(lo())` has zero rows).
#[derive(Clone, Debug)]
pub struct BasedChainComplex<K> {
    lo: i64,
    bases: Vec<Vec<K>>,
    index: Vec<BTreeMap<K, usize>>,
    diffs: Vec<SparseMat>,
}

impl<K: Ord + Clone + fmt::Display> BasedChainComplex<K> {
    /// Creates a complex with the given bases (degree `lo` upward) and zero
    /// differentials.
    pub fn new(lo: i64, bases: Vec<Vec<K>>) -> Self {
        let index: Vec<BTreeMap<K, usize>> = bases
            .iter()
            .map(|b| b.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect())
            .collect();
        for (d, b) in bases.iter().enumerate() {
            assert_eq!(index[d].len(), b.len(), "duplicate basis key in degree {}", lo + d as i64);
        }
        let diffs = (0..bases.len())
            .map(|i| {
                let rows = if i == 0 { 0 } else { bases[i - 1].len() };
                SparseMat::zero(rows, bases[i].len())
            })
            .collect();
        BasedChainComplex { lo, bases, index, diffs }
    }

    /// Lowest degree carrying a basis.
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest degree carrying a basis.
    pub fn hi(&self) -> i64 {
        self.lo + self.bases.len() as i64 - 1
    }

    /// The degrees of the complex in increasing order.
    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi()
    }

    /// Dimension at degree `n` (zero outside the stored range).
    pub fn dim(&self, n: i64) -> usize {
        self.slot(n).map_or(0, |i| self.bases[i].len())
    }

    /// The ordered basis at degree `n` (empty outside the range).
    pub fn basis(&self, n: i64) -> &[K] {
        self.slot(n).map_or(&[], |i| &self.bases[i])
    }

    /// Index of a key in the degree-`n` basis.
    pub fn index_of(&self, n: i64, key: &K) -> Option<usize> {
        self.slot(n).and_then(|i| self.index[i].get(key).copied())
    }

    /// The differential `d_n` as a matrix (zero-shaped outside the range).
    pub fn diff(&self, n: i64) -> SparseMat {
        match self.slot(n) {
            Some(i) => self.diffs[i].clone(),
            None => SparseMat::zero(self.dim(n - 1), self.dim(n)),
        }
    }

    /// Installs the differential at degree `n`, checking its shape.
    pub fn set_diff(&mut self, n: i64, mat: SparseMat) {
        let i = self.slot(n).expect("degree outside complex range");
        assert_eq!(mat.rows(), self.dim(n - 1), "differential row count at degree {n}");
        assert_eq!(mat.cols(), self.dim(n), "differential column count at degree {n}");
        self.diffs[i] = mat;
    }

    fn slot(&self, n: i64) -> Option<usize> {
        if n < self.lo || n > self.hi() {
            None
        } else {
            Some((n - self.lo) as usize)
        }
    }

    /// Checks `d_{n-1} ∘ d_n = 0` for every degree; returns the first
    /// failure as an error with a witness basis element.
    pub fn verify_d_squared(&self) -> Result<(), ComplexError> {
        for n in self.degrees() {
            if n == self.lo {
                continue;
            }
            let square = self.diff(n - 1).mul(&self.diff(n));
            if let Some((_, col)) = square.first_nonzero() {
                return Err(ComplexError::NotAComplex {
                    degree: n,
                    witness: format!("{}", self.basis(n)[col]),
                });
            }
        }
        Ok(())
    }

    /// Exact Betti numbers over the chosen field.
    ///
    /// Refuses (with diagnostics) if the stored matrices do not square to
    /// zero.
    pub fn betti(&self, field: Field) -> Result<BettiTable, ComplexError> {
        self.verify_d_squared()?;
        let mut ranks: Vec<usize> = Vec::with_capacity(self.bases.len() + 1);
        for n in self.degrees() {
            ranks.push(field.rank(&self.diff(n))?);
        }
        ranks.push(0); // rank of d_{hi+1}
        let values = self
            .degrees()
            .enumerate()
            .map(|(i, n)| self.dim(n) - ranks[i] - ranks[i + 1])
            .collect();
        Ok(BettiTable { lo: self.lo, values })
    }
}

/// Betti numbers over a degree range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTable {
    lo: i64,
    values: Vec<usize>,
}

impl BettiTable {
    /// Betti number at degree `n` (zero outside the range).
    pub fn get(&self, n: i64) -> usize {
        if n < self.lo || n >= self.lo + self.values.len() as i64 {
            0
        } else {
            self.values[(n - self.lo) as usize]
        }
    }

    /// All `(degree, betti)` pairs in the stored range.
    pub fn entries(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.lo + i as i64, v))
    }

    /// The nonzero Betti numbers as a degree-indexed map.
    pub fn nonzero(&self) -> BTreeMap<i64, usize> {
        self.entries().filter(|&(_, v)| v > 0).collect()
    }

    /// Whether all Betti numbers vanish.
    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }
}

impl fmt::Display for BettiTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (n, v)) in self.nonzero().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}:{v}")?;
        }
        f.write_str("}")
    }
}

/// A degree-`shift` chain map `f: source -> target`
/// (`f_n: source_n -> target_{n+shift}`).
#[derive(Clone, Debug)]
pub struct ChainMap<'a, S, T> {
    source: &'a BasedChainComplex<S>,
    target: &'a BasedChainComplex<T>,
    shift: i64,
    mats: BTreeMap<i64, SparseMat>,
}

impl<'a, S, T> ChainMap<'a, S, T>
where
    S: Ord + Clone + fmt::Display,
    T: Ord + Clone + fmt::Display,
{
    /// The zero map of the given degree shift.
    pub fn new(
        source: &'a BasedChainComplex<S>,
        target: &'a BasedChainComplex<T>,
        shift: i64,
    ) -> Self {
        ChainMap { source, target, shift, mats: BTreeMap::new() }
    }

    /// Source complex.
    pub fn source(&self) -> &'a BasedChainComplex<S> {
        self.source
    }

    /// Target complex.
    pub fn target(&self) -> &'a BasedChainComplex<T> {
        self.target
    }

    /// Degree shift.
    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// The component `f_n` as a matrix (zero if never set).
    pub fn mat(&self, n: i64) -> SparseMat {
        self.mats
            .get(&n)
            .cloned()
            .unwrap_or_else(|| SparseMat::zero(self.target.dim(n + self.shift), self.source.dim(n)))
    }

    /// Installs the component at source degree `n`, checking its shape.
    pub fn set_mat(&mut self, n: i64, mat: SparseMat) {
        assert_eq!(mat.rows(), self.target.dim(n + self.shift), "chain map rows at degree {n}");
        assert_eq!(mat.cols(), self.source.dim(n), "chain map columns at degree {n}");
        self.mats.insert(n, mat);
    }

    /// Checks `f_{n-1} ∘ d = d ∘ f_n` in every degree; the first failure is
    /// reported with a witness source basis element.
    pub fn verify_chain_map(&self) -> Result<(), ComplexError> {
        for n in self.source.degrees() {
            let lhs = self.mat(n - 1).mul(&self.source.diff(n));
            let rhs = self.target.diff(n + self.shift).mul(&self.mat(n));
            let delta = lhs.sub(&rhs);
            if let Some((_, col)) = delta.first_nonzero() {
                return Err(ComplexError::NotAChainMap {
                    degree: n,
                    witness: format!("{}", self.source.basis(n)[col]),
                });
            }
        }
        Ok(())
    }

    /// The mapping cone: `cone_n = target_n ⊕ source_{n-1-shift}` with
    /// differential `d(b, a) = (d b + f a, -d a)`.
    pub fn mapping_cone(&self) -> BasedChainComplex<ConeKey<T, S>> {
        let src_offset = self.shift + 1; // source degree n sits in cone degree n + shift + 1
        let lo = core::cmp::min(self.target.lo(), self.source.lo() + src_offset);
        let hi = core::cmp::max(self.target.hi(), self.source.hi() + src_offset);
        let mut bases: Vec<Vec<ConeKey<T, S>>> = Vec::new();
        for n in lo..=hi {
            let mut basis: Vec<ConeKey<T, S>> = Vec::new();
            basis.extend(self.target.basis(n).iter().cloned().map(ConeKey::Target));
            basis.extend(self.source.basis(n - src_offset).iter().cloned().map(ConeKey::Source));
            bases.push(basis);
        }
        let mut cone = BasedChainComplex::new(lo, bases);
        for n in lo..=hi {
            let t_dim = self.target.dim(n);
            let s_deg = n - src_offset;
            let mut d = SparseMat::zero(cone.dim(n - 1), cone.dim(n));
            let t_rows = self.target.dim(n - 1);
            for (r, c, v) in self.target.diff(n).triplets() {
                d.add_entry(r, c, v);
            }
            for (r, c, v) in self.mat(s_deg).triplets() {
                // f lands in target_{s_deg + shift} = target_{n-1}
                debug_assert!(r < t_rows);
                d.add_entry(r, t_dim + c, v);
            }
            for (r, c, v) in self.source.diff(s_deg).triplets() {
                d.add_entry(t_rows + r, t_dim + c, -v);
            }
            cone.set_diff(n, d);
        }
        cone
    }

    /// Whether the map is a quasi-isomorphism, decided by acyclicity of the
    /// mapping cone over the chosen field.
    pub fn is_quasi_iso(&self, field: Field) -> Result<bool, ComplexError> {
        let cone = self.mapping_cone();
        Ok(cone.betti(field)?.is_trivial())
    }
}

/// Basis key of a mapping cone: a target key in the same degree or a source
/// key from one degree lower (after the shift).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConeKey<T, S> {
    /// Key from the target complex.
    Target(T),
    /// Key from the (shifted) source complex.
    Source(S),
}

impl<T: fmt::Display, S: fmt::Display> fmt::Display for ConeKey<T, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConeKey::Target(k) => write!(f, "cone·target({k})"),
            ConeKey::Source(k) => write!(f, "cone·source({k})"),
        }
    }
}

/// A plain string key for ad-hoc complexes (tests, file import).
pub type StrKey = String;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q_int;
    use alloc::string::ToString;
    use alloc::vec;

    fn keys(names: &[&str]) -> Vec<StrKey> {
        names.iter().map(|s| s.to_string()).collect()
    }

    /// 0 -> Z -> Z -> 0 with d = 2·id: homology 0 over Q, Z/2-ish over F_2.
    fn doubling() -> BasedChainComplex<StrKey> {
        let mut c = BasedChainComplex::new(0, vec![keys(&["x"]), keys(&["y"])]);
        let mut d = SparseMat::zero(1, 1);
        d.add_entry(0, 0, q_int(2));
        c.set_diff(1, d);
        c
    }

    #[test]
    fn betti_depends_on_field_only_in_bad_characteristic() {
        let c = doubling();
        let over_q = c.betti(Field::Rational).unwrap();
        assert!(over_q.is_trivial());
        let over_f2 = c.betti(Field::Prime(2)).unwrap();
        assert_eq!(over_f2.nonzero(), [(0, 1), (1, 1)].into_iter().collect());
        let over_f101 = c.betti(Field::Prime(101)).unwrap();
        assert!(over_f101.is_trivial());
    }

    #[test]
    fn d_squared_violation_is_reported() {
        // d_1 = d_2 = id on one-dimensional spaces: d² = id ≠ 0.
        let mut c =
            BasedChainComplex::new(0, vec![keys(&["a"]), keys(&["b"]), keys(&["c"])]);
        let mut id = SparseMat::zero(1, 1);
        id.add_entry(0, 0, q_int(1));
        c.set_diff(1, id.clone());
        c.set_diff(2, id);
        let err = c.verify_d_squared().unwrap_err();
        assert!(matches!(err, ComplexError::NotAComplex { degree: 2, .. }));
        assert!(c.betti(Field::Rational).is_err());
    }

    #[test]
    fn two_term_acyclic_complex() {
        let mut c = BasedChainComplex::new(3, vec![keys(&["u"]), keys(&["v"])]);
        let mut d = SparseMat::zero(1, 1);
        d.add_entry(0, 0, q_int(-1));
        c.set_diff(4, d);
        assert_eq!(c.lo(), 3);
        assert_eq!(c.hi(), 4);
        assert!(c.betti(Field::Rational).unwrap().is_trivial());
    }

    #[test]
    fn identity_map_is_quasi_iso_and_cone_is_acyclic() {
        let c = doubling();
        let d = doubling();
        let mut f = ChainMap::new(&c, &d, 0);
        for n in 0..=1 {
            let mut m = SparseMat::zero(1, 1);
            m.add_entry(0, 0, q_int(1));
            f.set_mat(n, m);
        }
        f.verify_chain_map().unwrap();
        assert!(f.is_quasi_iso(Field::Rational).unwrap());
        let cone = f.mapping_cone();
        cone.verify_d_squared().unwrap();
        assert_eq!(cone.dim(0), 1);
        assert_eq!(cone.dim(1), 2);
        assert_eq!(cone.dim(2), 1);
    }

    #[test]
    fn zero_map_to_nontrivial_target_is_not_quasi_iso() {
        // Source 0, target with homology k in degrees 0 and 1 (zero diff).
        let empty: BasedChainComplex<StrKey> = BasedChainComplex::new(0, vec![vec![]]);
        let target = {
            let mut t = BasedChainComplex::new(0, vec![keys(&["x"]), keys(&["y"])]);
            t.set_diff(1, SparseMat::zero(1, 1));
            t
        };
        let f = ChainMap::new(&empty, &target, 0);
        f.verify_chain_map().unwrap();
        assert!(!f.is_quasi_iso(Field::Rational).unwrap());
    }

    #[test]
    fn non_chain_map_is_rejected() {
        // Map x -> y between complexes where only one side has zero diff.
        let c = doubling();
        let target = BasedChainComplex::new(0, vec![keys(&["x"]), keys(&["y"])]);
        let mut f = ChainMap::new(&c, &target, 0);
        let mut m = SparseMat::zero(1, 1);
        m.add_entry(0, 0, q_int(1));
        f.set_mat(0, m.clone());
        f.set_mat(1, m);
        let err = f.verify_chain_map().unwrap_err();
        assert!(matches!(err, ComplexError::NotAChainMap { degree: 1, .. }));
    }

    #[test]
    fn shifted_quasi_iso_via_cone() {
        // Source concentrated in degree 0, target in degree 1, f of shift +1
        // given by the identity: a quasi-isomorphism of shift 1.
        let src = BasedChainComplex::new(0, vec![keys(&["a"])]);
        let tgt = BasedChainComplex::new(1, vec![keys(&["b"])]);
        let mut f = ChainMap::new(&src, &tgt, 1);
        let mut m = SparseMat::zero(1, 1);
        m.add_entry(0, 0, q_int(1));
        f.set_mat(0, m);
        f.verify_chain_map().unwrap();
        assert!(f.is_quasi_iso(Field::Rational).unwrap());
        // Dropping the matrix breaks it.
        let zero = ChainMap::new(&src, &tgt, 1);
        assert!(!zero.is_quasi_iso(Field::Rational).unwrap());
    }

    #[test]
    fn betti_table_formatting() {
        let c = BasedChainComplex::new(0, vec![keys(&["x"]), keys(&["y", "z"])]);
        let b = c.betti(Field::Rational).unwrap();
        assert_eq!(b.to_string(), "{0:1, 1:2}");
        assert_eq!(b.get(0), 1);
        assert_eq!(b.get(7), 0);
    }
}
