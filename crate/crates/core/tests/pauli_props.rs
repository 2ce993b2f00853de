use proptest::prelude::*;
use stabsep::clifford::gates_matrix;
use stabsep::pauli::phase_order;
use stabsep::{clifford_from_gates, find_clifford_mapping, Caps, FVec, Gate, PauliOp, Prime};

fn p(d: u32) -> Prime {
    Prime::new(d).unwrap()
}

/// Every phased Pauli on n qudits.
fn all_paulis(n: usize, d: Prime) -> Vec<PauliOp> {
    let big_d = phase_order(d) as i64;
    let count = d.power_count(2 * n) as usize;
    (0..count)
        .flat_map(|i| {
            let a = FVec::from_index(d, 2 * n, i);
            (0..big_d).map(move |e| PauliOp::new(e, a.clone()).unwrap())
        })
        .collect()
}

#[test]
fn multiplication_is_associative_with_identity() {
    for d in [2, 3] {
        let d = p(d);
        let ops = all_paulis(1, d);
        let id = PauliOp::identity(1, d);
        for a in &ops {
            assert_eq!(&a.mul(&id), a);
            assert_eq!(&id.mul(a), a);
            for b in &ops {
                let ab = a.mul(b);
                for c in &ops {
                    assert_eq!(ab.mul(c), a.mul(&b.mul(c)), "{a} {b} {c}");
                }
            }
        }
    }
}

#[test]
fn weyl_operators_are_unitary_with_scalar_dth_power() {
    let caps = Caps::default();
    for (n, d) in [(1, 2), (2, 2), (1, 3), (2, 3), (1, 5)] {
        let d = p(d);
        let dim = d.power_count(n) as usize;
        let count = d.power_count(2 * n) as usize;
        for i in 0..count {
            let w = PauliOp::weyl(FVec::from_index(d, 2 * n, i));
            let m = w.weyl_matrix(&caps).unwrap();
            let id = stabsep::matrix::CMatrix::identity(m.order(), dim);
            assert_eq!(m.mul(&m.adjoint()), id, "{w}");
            let mut power = id.clone();
            for _ in 0..d.get() {
                power = power.mul(&m);
            }
            let wd = w.pow(d.get() as u64);
            assert!(wd.a().is_zero(), "{w}^d moved");
            assert_eq!(power, wd.weyl_matrix(&caps).unwrap(), "{w}^d phase");
            assert!(power.proportionality(&id).is_some());
        }
    }
}

fn gate(n: usize, d: u32) -> impl Strategy<Value = Gate> {
    let one = 0..n;
    let pair = (0..n, 0..n).prop_filter("distinct", |(a, b)| a != b);
    let mut options: Vec<BoxedStrategy<Gate>> = vec![
        one.clone().prop_map(Gate::H).boxed(),
        one.clone().prop_map(Gate::S).boxed(),
        (one.clone(), 1..d).prop_map(|(i, v)| Gate::X(i, v)).boxed(),
        (one, 1..d).prop_map(|(i, v)| Gate::Z(i, v)).boxed(),
    ];
    if n > 1 {
        options.push(pair.clone().prop_map(|(a, b)| Gate::Cx(a, b)).boxed());
        options.push(pair.prop_map(|(a, b)| Gate::Cz(a, b)).boxed());
    }
    proptest::strategy::Union::new(options)
}

/// (n, d, gate word).
fn circuit(max_n: usize, ds: Vec<u32>) -> impl Strategy<Value = (usize, u32, Vec<Gate>)> {
    (1..=max_n, prop::sample::select(ds))
        .prop_flat_map(|(n, d)| (Just(n), Just(d), prop::collection::vec(gate(n, d), 0..12)))
}

fn vector(n: usize, d: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..d, 2 * n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_preserves_commutation_and_products(
        ((n, d, gates), a, b) in circuit(3, vec![2, 3, 5])
            .prop_flat_map(|(n, d, g)| (Just((n, d, g)), vector(n, d), vector(n, d)))
    ) {
        let d = p(d);
        let c = clifford_from_gates(n, d, &gates).unwrap();
        let (pa, pb) = (PauliOp::weyl(FVec::from_reduced(d, a)), PauliOp::weyl(FVec::from_reduced(d, b)));
        let (ca, cb) = (c.conjugate(&pa), c.conjugate(&pb));
        prop_assert_eq!(ca.symplectic(&cb), pa.symplectic(&pb));
        prop_assert_eq!(c.conjugate(&pa.mul(&pb)), ca.mul(&cb));
        prop_assert!(c.then(&c.inverse()).is_identity());
    }

    #[test]
    fn dense_reconstruction_matches_tableau((n, d, gates) in circuit(2, vec![2, 3])) {
        let caps = Caps::default();
        let d = p(d);
        let c = clifford_from_gates(n, d, &gates).unwrap();
        let u = gates_matrix(n, d, &gates, &caps).unwrap();
        let dense = c.dense(&caps).unwrap();
        prop_assert!(dense.proportionality(&u).is_some(), "dense differs from gate product beyond phase");
        for i in 0..n {
            for g in [PauliOp::z(n, d, i), PauliOp::x(n, d, i)] {
                let lhs = u.mul(&g.weyl_matrix(&caps).unwrap()).mul(&u.adjoint());
                prop_assert_eq!(lhs, c.conjugate(&g).weyl_matrix(&caps).unwrap(), "{}", g);
            }
        }
    }

    #[test]
    fn mapping_reproduces_a_hidden_clifford(
        ((n, d, gates), keep) in circuit(3, vec![2, 3])
            .prop_flat_map(|(n, d, g)| (Just((n, d, g)), prop::collection::vec(any::<bool>(), 2 * n)))
    ) {
        let d = p(d);
        let hidden = clifford_from_gates(n, d, &gates).unwrap();
        let generators: Vec<PauliOp> = (0..n)
            .flat_map(|i| [PauliOp::z(n, d, i), PauliOp::x(n, d, i)])
            .collect();
        let pairs: Vec<(PauliOp, PauliOp)> = generators
            .iter()
            .zip(&keep)
            .filter(|(_, k)| **k)
            .map(|(g, _)| (g.clone(), hidden.conjugate(g)))
            .collect();
        let found = find_clifford_mapping(n, d, &pairs).unwrap();
        for (s, t) in &pairs {
            prop_assert_eq!(&found.conjugate(s), t);
        }
        prop_assert_eq!(find_clifford_mapping(n, d, &pairs).unwrap(), found);
    }
}
