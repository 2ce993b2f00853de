use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabsep::matrix::{inner, CMatrix};
use stabsep::pauli::phase_order;
use stabsep::polar::polar_form;
use stabsep::stabiliser::{
    contract, enumerate_stab_states, stab_state_count, states_in_pauli_span,
};
use stabsep::{Caps, CycRat, FVec, PauliOp, Prime, StabBasis, StabCode, StabState};

fn p(d: u32) -> Prime {
    Prime::new(d).unwrap()
}

/// (1/d) Σ_k g^k, dense.
fn averaged(g: &PauliOp, caps: &Caps) -> CMatrix {
    let d = g.modulus().get();
    let m = g.weyl_matrix(caps).unwrap();
    let mut power = CMatrix::identity(m.order(), m.rows());
    let mut acc = power.clone();
    for _ in 1..d {
        power = power.mul(&m);
        acc.add_assign(&power);
    }
    acc.scale(&CycRat::from_rational(
        m.order(),
        num_rational::BigRational::new(1.into(), (d as i64).into()),
    ))
}

/// Counts rank-one projectors Π_j (1/d)Σ_k g_j^k over all n-tuples of phased
/// Paulis, deduplicated as matrices.
fn brute_state_count(n: usize, d: Prime) -> usize {
    let caps = Caps::default();
    let big_d = phase_order(d) as i64;
    let ops: Vec<CMatrix> = (1..d.power_count(2 * n) as usize)
        .flat_map(|i| {
            let a = FVec::from_index(d, 2 * n, i);
            (0..big_d).map(move |e| PauliOp::new(e, a.clone()).unwrap())
        })
        .map(|g| averaged(&g, &caps))
        .collect();
    let one = CycRat::one(ops[0].order());
    let mut found: Vec<CMatrix> = Vec::new();
    let mut tuple = vec![0usize; n];
    loop {
        let proj = tuple
            .iter()
            .skip(1)
            .fold(ops[tuple[0]].clone(), |acc, &i| acc.mul(&ops[i]));
        if proj.trace() == one
            && proj.mul(&proj) == proj
            && proj.is_hermitian()
            && !found.contains(&proj)
        {
            found.push(proj);
        }
        let Some(slot) = (0..n).find(|&j| tuple[j] + 1 < ops.len()) else {
            break;
        };
        tuple[slot] += 1;
        tuple[..slot].iter_mut().for_each(|t| *t = 0);
    }
    found.len()
}

#[test]
fn counts_match_formula_and_brute_force() {
    let caps = Caps::default();
    for (n, d) in [(1, 2), (1, 3), (2, 2)] {
        let count = enumerate_stab_states(n, d, &caps).unwrap().len();
        assert_eq!(count as u128, stab_state_count(n, d));
        assert_eq!(count, brute_state_count(n, p(d)), "n={n} d={d}");
    }
    for (n, d) in [(3, 2), (4, 2), (2, 3), (3, 3), (1, 5), (2, 5), (1, 7)] {
        let count = enumerate_stab_states(n, d, &caps).unwrap().len();
        assert_eq!(count as u128, stab_state_count(n, d), "n={n} d={d}");
    }
}

#[test]
fn group_projector_is_the_density() {
    let caps = Caps::default();
    for (n, d) in [(1, 2), (2, 2), (3, 2), (1, 3), (2, 3), (1, 5)] {
        for s in enumerate_stab_states(n, d, &caps).unwrap() {
            let proj = StabCode::new(s.group()).projector(&caps).unwrap();
            let amps = s.amplitudes();
            assert_eq!(proj, CMatrix::outer(&amps, &amps), "{s:?}");
        }
    }
}

/// Nonzero contractions against any stabiliser basis of the first factor are
/// pairwise equal or orthogonal, and share one stabiliser group.
#[test]
fn contractions_land_in_one_basis() {
    let caps = Caps::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases = [
        (1, 1, 2),
        (1, 2, 2),
        (2, 1, 2),
        (2, 2, 2),
        (1, 1, 3),
        (1, 2, 3),
    ];
    let tables: Vec<_> = cases
        .iter()
        .map(|&(n1, n2, d)| {
            (
                enumerate_stab_states(n1 + n2, d, &caps).unwrap(),
                enumerate_stab_states(n1, d, &caps).unwrap(),
            )
        })
        .collect();
    for trial in 0..100 {
        let which = trial % cases.len();
        let (n1, _, _) = cases[which];
        let (joint, local) = &tables[which];
        let psi = joint.choose(&mut rng).unwrap();
        let basis = StabBasis::new(local.choose(&mut rng).unwrap().group()).unwrap();
        let betas: Vec<StabState> = (0..basis.states.len())
            .filter_map(|i| contract(psi, n1, &basis, i).unwrap().1)
            .collect();
        assert!(!betas.is_empty());
        for (i, a) in betas.iter().enumerate() {
            for b in &betas[i + 1..] {
                let overlap = inner(&a.amplitudes(), &b.amplitudes());
                assert!(a == b || overlap.is_zero(), "trial {trial}: {a:?} vs {b:?}");
                let (mut ga, mut gb) = (a.group().vectors(), b.group().vectors());
                ga.sort();
                gb.sort();
                assert_eq!(ga, gb, "trial {trial}");
            }
        }
    }
}

#[test]
fn polar_form_reconstructs_exactly() {
    let caps = Caps::default();
    let check = |s: &StabState| {
        let form = polar_form(s).unwrap_or_else(|e| panic!("{s:?}: {e}"));
        assert_eq!(form.reconstruct(&caps).unwrap(), s.amplitudes(), "{s:?}");
        assert_eq!(form.n, s.n() / 2);
        assert_eq!(form.code.rank(), form.k);
    };
    for d in [2, 3] {
        enumerate_stab_states(2, d, &caps)
            .unwrap()
            .iter()
            .for_each(check);
    }
    let four = enumerate_stab_states(4, 2, &caps).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    four.choose_multiple(&mut rng, 200).for_each(check);
}

/// Every state whose density lies in span{w(a) : a ∈ M} is an eigenvector of
/// the completed group, and the list is exactly the states with Pauli
/// coefficients supported on M.
#[test]
fn pauli_span_states_are_eigenvectors() {
    let caps = Caps::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (n, d) in [(1, 2), (2, 2), (1, 3), (2, 3)] {
        let dp = p(d);
        let states = enumerate_stab_states(n, d, &caps).unwrap();
        for _ in 0..6 {
            // a random isotropic M: part of some state's group
            let group = states.choose(&mut rng).unwrap().group();
            let keep = rng.gen_range(0..=n);
            let m: Vec<FVec> = group
                .vectors()
                .into_iter()
                .take(keep)
                .map(|v| FVec::from_reduced(dp, v))
                .collect();
            let (completed, found) = states_in_pauli_span(n, d, &m, &caps).unwrap();
            assert_eq!(completed.rank(), n);
            let span = span_points(dp, n, &m);
            for s in &states {
                let rho = s.density();
                let in_span = (0..dp.power_count(2 * n) as usize).all(|i| {
                    let a = FVec::from_index(dp, 2 * n, i);
                    let coeff = PauliOp::weyl(a.clone())
                        .weyl_matrix(&caps)
                        .unwrap()
                        .adjoint()
                        .mul(&rho)
                        .trace();
                    coeff.is_zero() || span.contains(&a.into_entries())
                });
                assert_eq!(in_span, found.contains(s), "n={n} d={d} {s:?}");
            }
            for s in &found {
                let v = s.amplitudes();
                for g in completed.generators() {
                    let gv = g.weyl_matrix(&caps).unwrap().mul_vec(&v);
                    let i = v.iter().position(|x| !x.is_zero()).unwrap();
                    let lambda = &gv[i] * &v[i].inv().unwrap();
                    let scaled: Vec<CycRat> = v.iter().map(|x| x * &lambda).collect();
                    assert_eq!(gv, scaled, "{s:?} under {g}");
                }
            }
        }
    }
}

/// All F_d-linear combinations of M.
fn span_points(d: Prime, n: usize, m: &[FVec]) -> Vec<Vec<u32>> {
    let mut points = vec![vec![0u32; 2 * n]];
    for v in m {
        points = points
            .iter()
            .flat_map(|base| {
                (0..d.get()).map(move |c| {
                    base.iter()
                        .zip(v.entries())
                        .map(|(&x, &y)| (x + c * y) % d.get())
                        .collect()
                })
            })
            .collect();
    }
    points.sort();
    points.dedup();
    points
}
