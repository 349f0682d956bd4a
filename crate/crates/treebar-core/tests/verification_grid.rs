//! The structural identities, exercised as a grid over small label sets and
//! the three stock operads: differentials square to zero, the comparison
//! maps are chain maps and quasi-isomorphisms, the augmented Koszul
//! resolutions are acyclic, the factorization of the comparison map through
//! the level complex holds on the nose, and the strict-to-homotopy embedding
//! satisfies the coherence relations while a deliberate sign fault does not.

use treebar_core::trees::{enumerate_trees, hom_set, subsets};
use treebar_core::{
    build_K_category, build_K_operad, build_K_resolution, build_levelbar, build_N_category,
    build_N_operad, check_homotopy_operad, kappa, kappa_category, strict_to_homotopy,
    verify_factorization, Field, LabelSet, Operad, Tree,
};

fn stock_operads(max_arity: usize) -> Vec<Operad> {
    ["com", "ass", "free-binary"]
        .iter()
        .map(|name| Operad::builtin(name, max_arity).unwrap())
        .collect()
}

#[test]
fn differentials_square_to_zero_across_the_grid() {
    for n in 2..=4 {
        let labels = LabelSet::ints(n);
        for p in stock_operads(n) {
            let name = p.species().name().to_string();
            build_N_operad(&labels, &p).unwrap().verify_d_squared().unwrap_or_else(|e| {
                panic!("d^2 != 0 for N, {name}, {n} labels: {e}");
            });
            build_K_operad(&labels, &p).unwrap().verify_d_squared().unwrap_or_else(|e| {
                panic!("d^2 != 0 for K, {name}, {n} labels: {e}");
            });
            build_levelbar(&labels, &p, n.max(2) - 1).unwrap().verify_d_squared().unwrap_or_else(
                |e| {
                    panic!("d^2 != 0 for the level complex, {name}, {n} labels: {e}");
                },
            );
        }
    }
}

/// All pairs `(t, s)` with a morphism `t -> s`: subsets of the cluster set
/// of `t` are exactly the valid targets.
fn morphism_pairs(n: usize) -> Vec<(Tree, Tree)> {
    let mut out = Vec::new();
    for t in enumerate_trees(&LabelSet::ints(n)) {
        for sub in subsets(t.clusters()) {
            let s = Tree::new(t.labels().clone(), sub).unwrap();
            assert!(hom_set(&t, &s).is_some());
            out.push((t.clone(), s));
        }
    }
    out
}

#[test]
fn category_bar_complexes_square_to_zero() {
    for n in 2..=4 {
        for (t, s) in morphism_pairs(n) {
            build_N_category(&t, &s).unwrap().verify_d_squared().unwrap_or_else(|e| {
                panic!("d^2 != 0 for N between {t} and {s}: {e}");
            });
        }
    }
}

#[test]
fn augmented_resolutions_are_acyclic() {
    for n in 2..=4 {
        for (t, s) in morphism_pairs(n) {
            let aug = build_K_resolution(&t, &s, true).unwrap();
            aug.verify_d_squared().unwrap();
            let betti = aug.betti(Field::Rational).unwrap();
            assert!(betti.is_trivial(), "augmented resolution not acyclic for {t} -> {s}");

            let plain = build_K_resolution(&t, &s, false).unwrap();
            let betti = plain.betti(Field::Rational).unwrap().nonzero();
            let edges = hom_set(&t, &s).unwrap();
            if edges.is_empty() {
                assert_eq!(betti.into_iter().collect::<Vec<_>>(), vec![(0, 1)]);
            } else {
                assert!(betti.is_empty(), "unaugmented resolution not acyclic for {t} -> {s}");
            }
        }
    }
}

#[test]
fn comparison_map_is_a_quasi_isomorphism_with_acyclic_cone() {
    for n in 2..=3 {
        let labels = LabelSet::ints(n);
        for p in stock_operads(n) {
            let name = p.species().name().to_string();
            let k = build_K_operad(&labels, &p).unwrap();
            let nb = build_N_operad(&labels, &p).unwrap();
            let map = kappa(&k, &nb);
            map.verify_chain_map().unwrap_or_else(|e| panic!("kappa, {name}, {n} labels: {e}"));
            assert!(map.is_quasi_iso(Field::Rational).unwrap(), "kappa q-iso, {name}, {n} labels");
            let cone = map.mapping_cone();
            cone.verify_d_squared().unwrap();
            assert!(cone.betti(Field::Rational).unwrap().is_trivial());
        }
    }
    // Four labels over F_101: same statements, prime-field ranks.
    let labels = LabelSet::ints(4);
    for p in stock_operads(4) {
        let name = p.species().name().to_string();
        let k = build_K_operad(&labels, &p).unwrap();
        let nb = build_N_operad(&labels, &p).unwrap();
        let map = kappa(&k, &nb);
        map.verify_chain_map().unwrap();
        assert!(map.is_quasi_iso(Field::Prime(101)).unwrap(), "kappa q-iso, {name}, 4 labels");
    }
}

#[test]
fn category_comparison_map_has_an_acyclic_cone() {
    for n in 2..=4 {
        for (t, s) in morphism_pairs(n) {
            let k = build_K_category(&t, &s).unwrap();
            let nb = build_N_category(&t, &s).unwrap();
            let map = kappa_category(&k, &nb);
            map.verify_chain_map().unwrap();
            let cone = map.mapping_cone();
            cone.verify_d_squared().unwrap();
            assert!(
                cone.betti(Field::Rational).unwrap().is_trivial(),
                "cone of the category comparison map not acyclic for {t} -> {s}"
            );
        }
    }
}

#[test]
fn factorization_holds_across_the_grid() {
    for n in 2..=3 {
        let labels = LabelSet::ints(n);
        for p in stock_operads(n) {
            let report = verify_factorization(&labels, &p, Field::Rational).unwrap();
            assert!(report.passed, "factorization, {}, {n} labels:\n{report}", p.species().name());
        }
    }
    let labels = LabelSet::ints(4);
    for p in stock_operads(4) {
        let report = verify_factorization(&labels, &p, Field::Prime(101)).unwrap();
        assert!(report.passed, "factorization, {}, 4 labels:\n{report}", p.species().name());
    }
}

#[test]
fn strict_operads_satisfy_the_homotopy_relations() {
    for p in stock_operads(4) {
        let h = strict_to_homotopy(&p, 4).unwrap();
        let report = check_homotopy_operad(&h, 4).unwrap();
        assert!(report.passed, "{}:\n{report}", p.species().name());
    }
    let nil = Operad::nilpotent(4, 2);
    let h = strict_to_homotopy(&nil, 4).unwrap();
    assert!(check_homotopy_operad(&h, 4).unwrap().passed);
}

#[test]
fn a_sign_fault_in_the_operad_breaks_the_verification() {
    // Negating one composition line of `ass` must show up both in the bar
    // differential (d^2 fails) and in the homotopy relations.
    let mut bad = Operad::associative(4);
    bad.perturb_composition_sign(2, 2, 1, "12", "12").unwrap();

    let labels = LabelSet::ints(4);
    let n = build_N_operad(&labels, &bad).unwrap();
    assert!(n.verify_d_squared().is_err(), "perturbed bar differential still squares to zero");

    let h = strict_to_homotopy(&bad, 4).unwrap();
    let report = check_homotopy_operad(&h, 4).unwrap();
    assert!(!report.passed, "perturbed operad passes the homotopy relations");
}
