//! Permutations in one-line notation, with signs and enumeration.
//!
//! Permutations act on slot indices `0..n` internally; [`fmt::Display`]
//! renders the conventional 1-based one-line word (e.g. `213`).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A permutation of `{0, .., n-1}` stored in one-line notation:
/// `images[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    /// The identity permutation on `n` points.
    pub fn identity(n: usize) -> Self {
        Perm { images: (0..n).collect() }
    }

    /// Builds a permutation from its one-line images; `None` if not bijective.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        let mut seen = alloc::vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return None;
            }
            seen[v] = true;
        }
        Some(Perm { images })
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.images.len()
    }

    /// Whether this permutes the empty set.
    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Image of point `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// One-line images as a slice.
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Composition `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.len(), other.len());
        Perm { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    /// The inverse permutation.
    pub fn inverse(&self) -> Perm {
        let mut images = alloc::vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v] = i;
        }
        Perm { images }
    }

    /// Signature: `+1` for even, `-1` for odd.
    pub fn sign(&self) -> i64 {
        inversion_sign(&self.images)
    }

    /// All permutations of `n` points in lexicographic one-line order.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(n);
        let mut used = alloc::vec![false; n];
        fn rec(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Perm>) {
            if current.len() == n {
                out.push(Perm { images: current.clone() });
                return;
            }
            for v in 0..n {
                if !used[v] {
                    used[v] = true;
                    current.push(v);
                    rec(n, current, used, out);
                    current.pop();
                    used[v] = false;
                }
            }
        }
        rec(n, &mut current, &mut used, &mut out);
        out
    }

    /// Renders as a 1-based one-line word (`"213"`, or comma-separated past 9).
    pub fn one_line(&self) -> String {
        use fmt::Write;
        let mut s = String::new();
        for (k, &v) in self.images.iter().enumerate() {
            if self.images.len() > 9 && k > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}", v + 1);
        }
        s
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.one_line())
    }
}

/// Sign of the permutation sorting `values` ascending (parity of inversions).
/// `values` must have no repeats.
pub fn sort_sign<T: Ord>(values: &[T]) -> i64 {
    inversion_sign(values)
}

fn inversion_sign<T: Ord>(values: &[T]) -> i64 {
    let mut inversions = 0usize;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            if values[i] > values[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_inverse() {
        let p = Perm::from_images(alloc::vec![1, 2, 0]).unwrap(); // 231
        let q = Perm::from_images(alloc::vec![1, 0, 2]).unwrap(); // 213
        // (p ∘ q)(0) = p(q(0)) = p(1) = 2.
        assert_eq!(p.compose(&q).images(), &[2, 1, 0]);
        assert_eq!(p.compose(&p.inverse()), Perm::identity(3));
        assert_eq!(p.inverse().compose(&p), Perm::identity(3));
    }

    #[test]
    fn signs_match_inversion_count() {
        assert_eq!(Perm::identity(4).sign(), 1);
        assert_eq!(Perm::from_images(alloc::vec![1, 0, 2]).unwrap().sign(), -1);
        assert_eq!(Perm::from_images(alloc::vec![1, 2, 0]).unwrap().sign(), 1);
        // sign is a homomorphism on all of S_3 x S_3.
        for p in Perm::all(3) {
            for q in Perm::all(3) {
                assert_eq!(p.compose(&q).sign(), p.sign() * q.sign());
            }
        }
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let all = Perm::all(3);
        assert_eq!(all.len(), 6);
        let words: Vec<_> = all.iter().map(|p| p.one_line()).collect();
        assert_eq!(words, ["123", "132", "213", "231", "312", "321"]);
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(words, sorted);
    }

    #[test]
    fn sort_sign_counts_inversions() {
        assert_eq!(sort_sign(&[1, 2, 3]), 1);
        assert_eq!(sort_sign(&[2, 1, 3]), -1);
        assert_eq!(sort_sign(&[3, 1, 2]), 1);
        assert_eq!(sort_sign::<u32>(&[]), 1);
    }

    #[test]
    fn from_images_rejects_non_bijections() {
        assert!(Perm::from_images(alloc::vec![0, 0]).is_none());
        assert!(Perm::from_images(alloc::vec![0, 2]).is_none());
    }
}
