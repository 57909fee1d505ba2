use amalgam_core::amalgam::{free_group_2, s4_s4, sl2z};
use amalgam_core::{
    build_a_gamma, character_table, ideal_lattice, k_groups, simplicity_check, solve, verify_relations,
    verify_stationarity, FiniteGroup, GaugeWeights, DEFAULT_BALL_BUDGET, DEFAULT_HEREDITARY_BOUND,
};

fn families() -> Vec<(String, FiniteGroup)> {
    let mut out = vec![("Q8".to_string(), FiniteGroup::quaternion8()), ("1".to_string(), FiniteGroup::trivial())];
    for n in 1..=48 {
        out.push((format!("C{n}"), FiniteGroup::cyclic(n).unwrap()));
    }
    for n in 2..=24 {
        out.push((format!("D{n}"), FiniteGroup::dihedral(n).unwrap()));
    }
    for n in 1..=4 {
        out.push((format!("S{n}"), FiniteGroup::symmetric(n).unwrap()));
    }
    let c2 = FiniteGroup::cyclic(2).unwrap();
    out.push(("S4xC2".into(), FiniteGroup::direct_product(&FiniteGroup::symmetric(4).unwrap(), &c2).unwrap()));
    out.push(("Q8xC3".into(), FiniteGroup::direct_product(&FiniteGroup::quaternion8(), &FiniteGroup::cyclic(3).unwrap()).unwrap()));
    out
}

#[test]
fn character_tables_of_small_families() {
    for (name, g) in families() {
        let t = character_table(&g).unwrap_or_else(|e| panic!("{name}: {e}"));
        t.verify().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(t.len(), t.classes().len(), "{name}");
        let squares: usize = t.degrees().iter().map(|d| d * d).sum();
        assert_eq!(squares, g.order(), "{name}");
    }
}

#[test]
fn s4_s4_invariants() {
    let spec = s4_s4();
    let table = character_table(spec.subgroup()).unwrap();
    let a = build_a_gamma(&spec, &table).unwrap();
    let (k, _) = k_groups(&a);
    assert_eq!(k.k0_string(), "Z ⊕ Z/4");
    assert_eq!(k.k1_string(), "Z");
    assert!(simplicity_check(&spec).unwrap().simple());
    assert_eq!(ideal_lattice(&a, DEFAULT_HEREDITARY_BOUND).unwrap().ideal_count(), 2);
}

#[test]
fn sl2z_invariants() {
    let spec = sl2z();
    let table = character_table(spec.subgroup()).unwrap();
    let (k, _) = k_groups(&build_a_gamma(&spec, &table).unwrap());
    assert_eq!(k.k0_string(), "0");
    assert_eq!(k.k1_string(), "0");
    assert!(!simplicity_check(&spec).unwrap().simple());
}

#[test]
fn kms_states_are_stationary() {
    for spec in [sl2z(), s4_s4()] {
        let n = spec.factors().len();
        for omega in [GaugeWeights::uniform(n), GaugeWeights::new((1..=n).map(|i| i as f64).collect()).unwrap()] {
            let sol = solve(&spec, &omega).unwrap();
            assert!(sol.residual.abs() < 1e-12);
            assert!((sol.total_mass() - 1.0).abs() < 1e-12);
            assert!(verify_stationarity(&spec, &sol, 2, 1e-10).unwrap().passed);
        }
    }
}

#[test]
fn fock_relations_hold() {
    for (spec, l) in [(sl2z(), 5), (free_group_2(), 3)] {
        let r = verify_relations(&spec, l, DEFAULT_BALL_BUDGET).unwrap();
        assert!(r.passed());
        assert_eq!(r.unit_defect_rank, spec.subgroup().order());
    }
}
