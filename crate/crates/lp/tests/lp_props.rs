use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabsep_lp::{
    int, rat, solve, solve_with, verify, Equality, LpJson, LpResultJson, Rational, SolveOptions,
    SparseVec, Status, VPolytopeLp,
};

/// Random integer generators in [-3, 3]^dim, some repeated to force
/// degeneracy.
fn generators(seed: u64, dim: usize, count: usize) -> Vec<SparseVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<SparseVec> = (0..count)
        .map(|_| {
            (0..dim)
                .filter_map(|i| {
                    let v = rng.gen_range(-3i64..=3);
                    (v != 0).then(|| (i, int(v)))
                })
                .collect()
        })
        .collect();
    if count > 2 {
        out.push(out[0].clone());
    }
    out
}

fn dense(dim: usize, v: &SparseVec) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); dim];
    for (i, x) in v {
        out[*i] += x;
    }
    out
}

fn lp_case() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 1usize..6, 1usize..14)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn interior_points_are_feasible((seed, dim, count) in lp_case(), raw in prop::collection::vec(0i64..5, 14)) {
        let lp0 = VPolytopeLp::new(dim, generators(seed, dim, count));
        let total: i64 = raw.iter().take(lp0.generators.len()).sum::<i64>().max(1);
        let mut weights: Vec<(usize, Rational)> = raw
            .iter()
            .take(lp0.generators.len())
            .enumerate()
            .filter(|(_, &w)| w > 0)
            .map(|(j, &w)| (j, rat(w, total)))
            .collect();
        if weights.is_empty() {
            weights.push((0, int(1)));
        }
        let target = lp0.point(&weights);
        let mut lp = lp0.clone();
        lp.pin(target.iter().cloned().enumerate());
        let res = solve(&lp).unwrap();
        prop_assert_eq!(res.status, Status::Feasible);
        verify(&lp, &res).unwrap();
        prop_assert_eq!(lp.point(&res.weights), target);
    }

    #[test]
    fn outside_points_are_separated((seed, dim, count) in lp_case(), coord in 0usize..6, excess in 1i64..4) {
        let mut lp = VPolytopeLp::new(dim, generators(seed, dim, count));
        let coord = coord % dim;
        let top = lp
            .generators
            .iter()
            .map(|g| dense(dim, g)[coord].clone())
            .max()
            .unwrap();
        lp.pin([(coord, top + int(excess))]);
        let res = solve(&lp).unwrap();
        prop_assert_eq!(res.status, Status::Infeasible);
        verify(&lp, &res).unwrap();
    }

    #[test]
    fn optimum_is_the_best_generator_without_constraints(
        (seed, dim, count) in lp_case(),
        c in prop::collection::vec(-5i64..=5, 6),
    ) {
        let objective: SparseVec = c.iter().take(dim).enumerate().map(|(i, &v)| (i, int(v))).collect();
        let lp = VPolytopeLp::new(dim, generators(seed, dim, count)).with_objective(objective.clone());
        let res = solve(&lp).unwrap();
        prop_assert_eq!(res.status, Status::Optimal);
        verify(&lp, &res).unwrap();
        let best = lp
            .generators
            .iter()
            .map(|g| {
                let p = dense(dim, g);
                objective.iter().fold(Rational::zero(), |acc, (i, v)| acc + v * &p[*i])
            })
            .max()
            .unwrap();
        prop_assert_eq!(res.objective_value, Some(best));
    }

    #[test]
    fn constrained_optimum_is_stable_and_deterministic(
        (seed, dim, count) in lp_case(),
        c in prop::collection::vec(-5i64..=5, 6),
        row in prop::collection::vec(-2i64..=2, 6),
    ) {
        let gens = generators(seed, dim, count);
        // an equality through the centroid keeps the problem feasible
        let coeffs: SparseVec = row.iter().take(dim).enumerate().filter(|(_, &v)| v != 0).map(|(i, &v)| (i, int(v))).collect();
        let centroid = VPolytopeLp::new(dim, gens.clone())
            .point(&(0..gens.len()).map(|j| (j, rat(1, gens.len() as i64))).collect::<Vec<_>>());
        let rhs = coeffs.iter().fold(Rational::zero(), |acc, (i, v)| acc + v * &centroid[*i]);
        let mut lp = VPolytopeLp::new(dim, gens)
            .with_objective(c.iter().take(dim).enumerate().map(|(i, &v)| (i, int(v))).collect());
        lp.equalities.push(Equality { coeffs, rhs });
        let res = solve(&lp).unwrap();
        prop_assert_eq!(res.status, Status::Optimal);
        verify(&lp, &res).unwrap();
        prop_assert_eq!(&solve(&lp).unwrap(), &res);
        let exact_only = solve_with(&lp, &SolveOptions { presolve: false, ..Default::default() }).unwrap();
        verify(&lp, &exact_only).unwrap();
        prop_assert_eq!(exact_only.objective_value, res.objective_value);
    }

    #[test]
    fn json_round_trips((seed, dim, count) in lp_case()) {
        let mut lp = VPolytopeLp::new(dim, generators(seed, dim, count)).with_objective(vec![(0, rat(-3, 7))]);
        lp.pin([(dim - 1, rat(1, 3))]);
        let text = serde_json::to_string(&LpJson::from(&lp)).unwrap();
        let back = serde_json::from_str::<LpJson>(&text).unwrap().to_lp().unwrap();
        prop_assert_eq!(&back, &lp);
        let res = solve(&lp).unwrap();
        let text = serde_json::to_string(&LpResultJson::from(&res)).unwrap();
        let back = serde_json::from_str::<LpResultJson>(&text).unwrap().to_result().unwrap();
        prop_assert_eq!(back, res);
    }
}
