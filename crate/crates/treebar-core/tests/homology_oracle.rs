//! Validates Betti numbers against an independent dense elimination oracle.
//!
//! The crate computes ranks by fraction-free (Bareiss) elimination on sparse
//! matrices.  The oracle here is a classical dense Gaussian elimination with
//! rational pivots, plus a dense mod-p elimination, both written from
//! scratch; homology dimensions follow from `dim - rank(in) - rank(out)`.
//! Euler characteristics give a third, rank-free consistency route.

use num_rational::BigRational;
use num_traits::Zero;

use treebar_core::trees::enumerate_trees;
use treebar_core::{
    build_K_operad, build_N_category, build_N_operad, BasedChainComplex, Field, LabelSet, Operad,
    Tree,
};

/// Rank by dense Gaussian elimination over the rationals.  Indexed loops
/// keep the elimination in textbook shape (two rows of `m` are updated at
/// once).
#[allow(clippy::needless_range_loop)]
fn dense_rank_q(rows: usize, cols: usize, triplets: &[(usize, usize, BigRational)]) -> usize {
    let mut m = vec![vec![BigRational::zero(); cols]; rows];
    for (r, c, q) in triplets {
        m[*r][*c] = q.clone();
    }
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = m[rank][col].recip();
        for c in col..cols {
            let scaled = &m[rank][c] * &inv;
            m[rank][c] = scaled;
        }
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..cols {
                    let delta = &factor * &m[rank][c];
                    m[r][c] = &m[r][c] - delta;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Rank by dense elimination over `F_p`.  Indexed loops as in
/// [`dense_rank_q`].
#[allow(clippy::needless_range_loop)]
fn dense_rank_fp(rows: usize, cols: usize, triplets: &[(usize, usize, BigRational)], p: u64) -> usize {
    let p_big = num_bigint::BigInt::from(p);
    let reduce = |q: &BigRational| -> u64 {
        let num = ((q.numer() % &p_big) + &p_big) % &p_big;
        let den = ((q.denom() % &p_big) + &p_big) % &p_big;
        let num: u64 = num.try_into().unwrap();
        let den: u64 = den.try_into().unwrap();
        assert!(den != 0, "denominator divisible by p");
        // Fermat inverse: p is prime.
        let mut inv = 1u64;
        let mut base = den % p;
        let mut exp = p - 2;
        while exp > 0 {
            if exp & 1 == 1 {
                inv = inv * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        num % p * inv % p
    };
    let mut m = vec![vec![0u64; cols]; rows];
    for (r, c, q) in triplets {
        m[*r][*c] = reduce(q);
    }
    let inv_fp = |a: u64| -> u64 {
        let mut inv = 1u64;
        let mut base = a % p;
        let mut exp = p - 2;
        while exp > 0 {
            if exp & 1 == 1 {
                inv = inv * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        inv
    };
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = inv_fp(m[rank][col]);
        for c in col..cols {
            m[rank][c] = m[rank][c] * inv % p;
        }
        for r in 0..rows {
            if r != rank && m[r][col] != 0 {
                let factor = m[r][col];
                for c in col..cols {
                    let delta = factor * m[rank][c] % p;
                    m[r][c] = (m[r][c] + p - delta) % p;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Betti numbers of a complex computed purely through the oracle ranks.
fn oracle_betti<K: Ord + Clone + std::fmt::Display>(
    cx: &BasedChainComplex<K>,
    rank: impl Fn(usize, usize, &[(usize, usize, BigRational)]) -> usize,
) -> Vec<(i64, usize)> {
    let mut out = Vec::new();
    for n in cx.degrees() {
        let d_n = cx.diff(n);
        let d_above = cx.diff(n + 1);
        let r_n = rank(d_n.rows(), d_n.cols(), &d_n.triplets());
        let r_above = rank(d_above.rows(), d_above.cols(), &d_above.triplets());
        let b = cx.dim(n) - r_n - r_above;
        if b > 0 {
            out.push((n, b));
        }
    }
    out
}

fn assert_oracle_agrees<K: Ord + Clone + std::fmt::Display>(cx: &BasedChainComplex<K>, what: &str) {
    let crate_q = cx.betti(Field::Rational).expect("crate betti over Q");
    let oracle_q = oracle_betti(cx, dense_rank_q);
    assert_eq!(
        crate_q.nonzero().into_iter().collect::<Vec<_>>(),
        oracle_q,
        "rational betti of {what}"
    );
    let crate_p = cx.betti(Field::Prime(101)).expect("crate betti over F_101");
    let oracle_p = oracle_betti(cx, |r, c, t| dense_rank_fp(r, c, t, 101));
    assert_eq!(
        crate_p.nonzero().into_iter().collect::<Vec<_>>(),
        oracle_p,
        "mod-101 betti of {what}"
    );
}

#[test]
fn koszul_complex_betti_match_the_dense_oracle() {
    let com3 = Operad::commutative(3);
    let k3 = build_K_operad(&LabelSet::ints(3), &com3).unwrap();
    assert_oracle_agrees(&k3, "K over three labels, commutative");
    assert_eq!(k3.betti(Field::Rational).unwrap().nonzero().into_iter().collect::<Vec<_>>(), vec![(1, 2)]);

    let com4 = Operad::commutative(4);
    let k4 = build_K_operad(&LabelSet::ints(4), &com4).unwrap();
    assert_oracle_agrees(&k4, "K over four labels, commutative");
    assert_eq!(k4.betti(Field::Rational).unwrap().nonzero().into_iter().collect::<Vec<_>>(), vec![(2, 6)]);
}

#[test]
fn bar_complex_betti_match_the_dense_oracle() {
    let com3 = Operad::commutative(3);
    let n3 = build_N_operad(&LabelSet::ints(3), &com3).unwrap();
    assert_oracle_agrees(&n3, "N over three labels, commutative");

    let ass3 = Operad::associative(3);
    let n3a = build_N_operad(&LabelSet::ints(3), &ass3).unwrap();
    assert_oracle_agrees(&n3a, "N over three labels, associative");

    let fb3 = Operad::free_binary(3);
    let n3f = build_N_operad(&LabelSet::ints(3), &fb3).unwrap();
    assert_oracle_agrees(&n3f, "N over three labels, free binary");
}

#[test]
fn category_bar_complex_matches_the_dense_oracle() {
    let t: Tree = "{1,2,3,4,5}|[[1,2],[3,4,5],[4,5]]".parse().unwrap();
    let s = Tree::corolla(t.labels().clone());
    let n = build_N_category(&t, &s).unwrap();
    assert_oracle_agrees(&n, "N between a three-edge tree and the corolla");
    assert_eq!(
        n.betti(Field::Rational).unwrap().nonzero().into_iter().collect::<Vec<_>>(),
        vec![(3, 1)]
    );
}

#[test]
fn euler_characteristic_agrees_with_homology() {
    // The alternating sums of dimensions and of Betti numbers coincide for
    // every complex; this needs no rank computation on the dimension side.
    let com = Operad::commutative(4);
    let ass = Operad::associative(4);
    for labels in [LabelSet::ints(3), LabelSet::ints(4)] {
        for p in [&com, &ass] {
            let nx = build_N_operad(&labels, p).unwrap();
            let chi_dim: i64 = nx.degrees().map(|n| sign(n) * nx.dim(n) as i64).sum();
            let betti = nx.betti(Field::Rational).unwrap();
            let chi_hom: i64 = betti.entries().map(|(n, b)| sign(n) * b as i64).sum();
            assert_eq!(chi_dim, chi_hom, "Euler characteristic, N, {}", p.species().name());
            let kx = build_K_operad(&labels, p).unwrap();
            let chi_dim: i64 = kx.degrees().map(|n| sign(n) * kx.dim(n) as i64).sum();
            let betti = kx.betti(Field::Rational).unwrap();
            let chi_hom: i64 = betti.entries().map(|(n, b)| sign(n) * b as i64).sum();
            assert_eq!(chi_dim, chi_hom, "Euler characteristic, K, {}", p.species().name());
        }
    }
}

fn sign(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

#[test]
fn rational_and_mod_101_betti_agree_across_the_grid() {
    // Exactness over Q descends to F_101 for every complex in the small
    // grid; disagreement would flag 101-torsion or an elimination bug.
    for n in 2..=4 {
        let labels = LabelSet::ints(n);
        for name in ["com", "ass", "free-binary"] {
            let p = Operad::builtin(name, n).unwrap();
            let nx = build_N_operad(&labels, &p).unwrap();
            let q = nx.betti(Field::Rational).unwrap().nonzero();
            let fp = nx.betti(Field::Prime(101)).unwrap().nonzero();
            assert_eq!(q, fp, "N, {name}, {n} labels");
            let kx = build_K_operad(&labels, &p).unwrap();
            let q = kx.betti(Field::Rational).unwrap().nonzero();
            let fp = kx.betti(Field::Prime(101)).unwrap().nonzero();
            assert_eq!(q, fp, "K, {name}, {n} labels");
        }
    }
    // Category side: every morphism with a three-label source.
    for t in enumerate_trees(&LabelSet::ints(3)) {
        let s = Tree::corolla(t.labels().clone());
        let cx = build_N_category(&t, &s).unwrap();
        let q = cx.betti(Field::Rational).unwrap().nonzero();
        let fp = cx.betti(Field::Prime(101)).unwrap().nonzero();
        assert_eq!(q, fp, "N category at {t}");
    }
}
