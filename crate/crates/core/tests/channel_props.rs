use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabsep::channel::{
    ad_embed, builtin, channels_equal, clifford_dilation_obstruction, is_ad, kernel_pauli_scan,
    lambda_channel, lambda_sigma, pinching_as_diagonal_mixture, pinching_channel, Channel,
    BUILTINS,
};
use stabsep::cyclotomic::order_for;
use stabsep::lemmas::eigenprojectors;
use stabsep::matrix::CMatrix;
use stabsep::stabiliser::enumerate_stab_states;
use stabsep::{clifford_from_gates, Caps, CycRat, FVec, Gate, PauliOp, Prime, StabCode};

fn p(d: u32) -> Prime {
    Prime::new(d).unwrap()
}

fn random_gates(rng: &mut ChaCha8Rng, n: usize, d: u32, len: usize) -> Vec<Gate> {
    (0..len)
        .map(|_| {
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n.max(2))) % n;
            match rng.gen_range(0..5) {
                0 => Gate::H(i),
                1 => Gate::S(i),
                2 => Gate::Z(i, rng.gen_range(1..d)),
                3 if n > 1 => Gate::Cz(i, j),
                _ => Gate::X(i, rng.gen_range(1..d)),
            }
        })
        .collect()
}

/// ρ ↦ Σ_x U_x Π_x ρ Π_x U_x† for the eigenprojectors Π_x of a random Pauli
/// and random Cliffords U_x.
fn random_measure_and_rotate(rng: &mut ChaCha8Rng, n: usize, d: Prime, caps: &Caps) -> Channel {
    let idx = rng.gen_range(1..d.power_count(2 * n) as usize);
    let a = PauliOp::weyl(FVec::from_index(d, 2 * n, idx));
    let kraus = eigenprojectors(&a, caps)
        .unwrap()
        .into_iter()
        .map(|proj| {
            let gates = random_gates(rng, n, d.get(), 6);
            clifford_from_gates(n, d, &gates)
                .unwrap()
                .dense(caps)
                .unwrap()
                .mul(&proj)
        })
        .collect();
    Channel::from_kraus(d, n, n, kraus, caps).unwrap()
}

/// d^{-n} Σ_{x,y} E(|x⟩⟨y|) ⊗ |x⟩⟨y| computed as (E ⊗ id) of the
/// unnormalised maximally entangled projector.
fn choi_by_kraus(kraus: &[CMatrix], din: usize) -> CMatrix {
    let order = kraus[0].order();
    let phi: Vec<CycRat> = (0..din * din)
        .map(|k| {
            if k / din == k % din {
                CycRat::one(order)
            } else {
                CycRat::zero(order)
            }
        })
        .collect();
    let omega = CMatrix::outer(&phi, &phi);
    let id = CMatrix::identity(order, din);
    let mut j = CMatrix::zeros(order, kraus[0].rows() * din, kraus[0].rows() * din);
    for k in kraus {
        let lifted = k.kron(&id);
        j.add_assign(&lifted.mul(&omega).mul(&lifted.adjoint()));
    }
    j.scale_rational(&num_rational::BigRational::new(
        1.into(),
        (din as i64).into(),
    ))
}

#[test]
fn choi_matches_independent_construction_and_inverts() {
    let caps = Caps::default();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (n, d) in [(1, 2), (2, 2), (1, 3), (2, 3), (1, 5)] {
        let d = p(d);
        for _ in 0..4 {
            let ch = random_measure_and_rotate(&mut rng, n, d, &caps);
            let stabsep::channel::ChannelForm::Kraus(kraus) = ch.form() else {
                unreachable!()
            };
            let choi = ch.choi();
            assert_eq!(choi.matrix, choi_by_kraus(kraus, ch.dim_in()));
            assert!(choi.is_trace_preserving());
            let back = choi.to_channel(&caps).unwrap();
            assert!(channels_equal(&ch, &back));
            assert!(channels_equal(&ch.to_superop(), &back));
        }
    }
    for name in BUILTINS {
        for (n, d) in [(1, 2), (2, 2), (1, 3)] {
            let ch = builtin(name, n, p(d), &caps).unwrap();
            assert!(
                channels_equal(&ch, &ch.choi().to_channel(&caps).unwrap()),
                "{name}"
            );
        }
    }
}

#[test]
fn lambda_is_ad_and_trace_preserving() {
    let caps = Caps::default();
    for (n, d) in [(1, 2), (2, 2), (3, 2), (4, 2), (2, 3), (3, 3), (2, 5)] {
        let l = lambda_channel(n, p(d), &caps).unwrap();
        assert!(is_ad(&l), "n={n} d={d}");
        assert!(l.is_trace_preserving(), "n={n} d={d}");
        if d == 2 && n <= 3 {
            let embedded = ad_embed(&lambda_sigma(n, p(d)), n, p(d), &caps).unwrap();
            assert!(channels_equal(&l, &embedded));
        }
    }
}

#[test]
fn lambda_invariance_at_three_qutrits() {
    let caps = Caps::default();
    let l = lambda_channel(3, p(3), &caps).unwrap();
    assert_eq!(kernel_pauli_scan(&l, &caps).unwrap(), None);
    assert!(!clifford_dilation_obstruction(&l, &caps).unwrap());
}

/// Pinching the last qudit equals the uniform mixture of P̃ ⊗ C_i for random
/// P̃ = U·P (Clifford times stabiliser code projector) on up to two qudits.
#[test]
fn pinching_identity_with_random_operator() {
    let caps = Caps::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in [2u32, 3] {
        let dp = p(d);
        for m in 1..=2 {
            let states = enumerate_stab_states(m, d, &caps).unwrap();
            for _ in 0..3 {
                let group = states.choose(&mut rng).unwrap().group();
                let keep = rng.gen_range(0..=m);
                let code = StabCode::new(
                    stabsep::StabGroup::new(m, dp, group.generators()[..keep].to_vec()).unwrap(),
                );
                let u = clifford_from_gates(m, dp, &random_gates(&mut rng, m, d, 8)).unwrap();
                let p_tilde = u.dense(&caps).unwrap().mul(&code.projector(&caps).unwrap());
                let pinch = pinching_channel(&p_tilde, dp, &caps).unwrap();
                for idx in 1..dp.power_count(2) as usize {
                    let a = PauliOp::weyl(FVec::from_index(dp, 2, idx));
                    let mix = pinching_as_diagonal_mixture(&p_tilde, &a, &caps).unwrap();
                    assert!(channels_equal(&pinch, &mix), "d={d} m={m} {a}");
                }
            }
        }
        // and a non-projective, non-unitary P̃
        let order = order_for(d);
        let p_tilde = CMatrix::from_fn(order, d as usize, d as usize, |i, j| {
            CycRat::from_int(order, (i * 3 + j) as i64 - 2)
        });
        let pinch = pinching_channel(&p_tilde, dp, &caps).unwrap();
        let a = PauliOp::x(1, dp, 0);
        assert!(channels_equal(
            &pinch,
            &pinching_as_diagonal_mixture(&p_tilde, &a, &caps).unwrap()
        ));
    }
}
