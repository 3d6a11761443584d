use cgsieve_core::algorithms::{
    simon_finish, solve_hidden_involution, stage_a_determine_t, stage_b_parity, stage_c_full_l, SolverConfig, StageReport,
};
use cgsieve_core::kernel::{hadamard_measure, psi_pm_measure, simon_sample, PhaseDoubler, SimonOracle};
use cgsieve_core::{BitVector, D4nElement, HiddenOracle, InvolutionLabel, Z4Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn planted_parity(label: &InvolutionLabel) -> BitVector {
    BitVector::from_bools(label.l().digits().iter().map(|&d| d & 1 == 1))
}

#[test]
fn simon_samples_are_orthogonal() {
    let mut rng = rng(1);
    let z = BitVector::from_bits(&[1, 1, 0, 1, 0, 0, 1]);
    let o = SimonOracle::new(z.clone()).unwrap();
    for _ in 0..500 {
        assert!(!simon_sample(&o, &mut rng).dot(&z).unwrap());
    }
    let f0 = o.query(&BitVector::zeros(7)).unwrap();
    assert_eq!(f0, o.query(&z).unwrap());
}

#[test]
fn simon_finish_on_round_two_states() {
    let mut rng = rng(2);
    for _ in 0..100 {
        let label = InvolutionLabel::random(4, &mut rng);
        let o = HiddenOracle::plant(label.clone());
        let mut d = PhaseDoubler::new(&o, 10);
        let r = simon_finish(
            4,
            14,
            |rng| {
                let st = d.round_two(rng)?.into_state();
                assert!(!hadamard_measure(&st, rng).dot(label.t()).unwrap());
                Ok(st)
            },
            &mut rng,
        )
        .unwrap();
        assert_eq!(&r.z, label.t());
        assert!(r.samples <= 14);
    }
}

#[test]
fn stage_a_accounting_and_easy_case() {
    let mut rng = rng(3);
    let cfg = SolverConfig::default();
    for l in [[0u8, 0, 0, 0], [2, 1, 0, 3]] {
        let label = InvolutionLabel::from_digits(&[1, 1, 0, 1], &[l[0], l[1], 0, l[3]]).unwrap();
        let o = HiddenOracle::plant(label.clone());
        let mut report = StageReport::default();
        let t = stage_a_determine_t(&o, &cfg, &mut report, &mut rng).unwrap();
        assert_eq!(&t, label.t());
        assert_eq!(o.queries(), report.queries());
        assert_eq!(report.queries(), 6 * report.doubling.round1_attempts);
        let (r1, r2) = (report.doubling.round1_attempts, report.doubling.round2_attempts);
        assert_eq!(report.retries, (r1 - 6 * r2) + (r2 - report.samples));
    }
}

#[test]
fn stage_b_equations_hold_for_planted_parity() {
    let mut rng = rng(4);
    for _ in 0..50 {
        let n = rng.random_range(1..8);
        let label = InvolutionLabel::random(n, &mut rng);
        let o = HiddenOracle::plant(label.clone());
        let mut d = PhaseDoubler::restricted(&o, label.t().clone(), 10).unwrap();
        let parity = planted_parity(&label).select(label.t()).unwrap();
        for _ in 0..10 {
            let out = d.round_one(&mut rng).unwrap();
            let p = out.coefficients().bit_plane(1);
            let (_, sign) = psi_pm_measure(out.state(), &mut rng).unwrap();
            assert_eq!(p.dot(&parity).unwrap(), sign < 0);
        }
    }
}

#[test]
fn stage_b_worked_example() {
    let mut rng = rng(5);
    let label = InvolutionLabel::from_digits(&[1, 1, 1, 1], &[2, 1, 0, 3]).unwrap();
    let o = HiddenOracle::plant(label.clone());
    let mut report = StageReport::default();
    let p = stage_b_parity(&o, label.t(), &SolverConfig::default(), &mut report, &mut rng).unwrap();
    assert_eq!(p, BitVector::from_bits(&[0, 1, 0, 1]));
    assert_eq!(o.queries(), report.queries());

    let zero = InvolutionLabel::from_digits(&[1, 0, 1], &[0, 0, 0]).unwrap();
    let o = HiddenOracle::plant(zero.clone());
    let p = stage_b_parity(&o, zero.t(), &SolverConfig::default(), &mut StageReport::default(), &mut rng).unwrap();
    assert!(p.is_zero());
}

#[test]
fn stage_c_resolves_every_digit() {
    let mut rng = rng(6);
    let cfg = SolverConfig::default();
    for l0 in 0..4u8 {
        let label = InvolutionLabel::from_digits(&[1, 0, 1], &[l0, 0, 3 - l0]).unwrap();
        let o = HiddenOracle::plant(label.clone());
        let mut report = StageReport::default();
        let l = stage_c_full_l(&o, label.t(), &planted_parity(&label), &cfg, &mut report, &mut rng).unwrap();
        assert_eq!(&l, label.l());
        assert_eq!(o.queries(), report.queries());
    }
}

#[test]
fn stage_c_skips_components_outside_support() {
    let mut rng = rng(7);
    let label = InvolutionLabel::from_digits(&[0, 1, 0], &[0, 2, 0]).unwrap();
    let o = HiddenOracle::plant(label.clone());
    let mut report = StageReport::default();
    let l = stage_c_full_l(&o, label.t(), &BitVector::zeros(3), &SolverConfig::default(), &mut report, &mut rng).unwrap();
    assert_eq!(l, Z4Vector::new(vec![0, 2, 0]).unwrap());
    // Only component 1 spent queries: at most k states of (n+2)^2 samples each, plus retries.
    assert!(report.samples <= 20);
}

#[test]
fn n1_all_involutions() {
    let mut rng = rng(8);
    for label in InvolutionLabel::enumerate(1) {
        let o = HiddenOracle::plant(label.clone());
        let r = solve_hidden_involution(&o, &SolverConfig::default(), &mut rng).unwrap();
        assert!(r.success);
        assert_eq!(r.label.as_ref(), Some(&label));
    }
}

#[test]
fn recovery_contract_and_accounting() {
    let mut rng = rng(9);
    let cfg = SolverConfig::default();
    for _ in 0..20 {
        let n = rng.random_range(2..7);
        let label = InvolutionLabel::random(n, &mut rng);
        let o = HiddenOracle::plant(label.clone());
        let r = solve_hidden_involution(&o, &cfg, &mut rng).unwrap();
        assert_eq!(o.queries(), r.queries + r.verification_queries);
        let s = &r.stages;
        let (m, mb) = (n as u64 + 2, label.t().count_ones() as u64 + 2);
        assert_eq!(
            r.queries,
            m * s.stage_a.doubling.round1_attempts + mb * s.stage_b.doubling.round1_attempts + m * s.stage_c.doubling.round1_attempts
        );
        if r.success {
            let found = r.label.unwrap();
            assert_eq!(found, label);
            let h = found.element();
            for _ in 0..100 {
                let g = D4nElement::random(n, &mut rng);
                assert_eq!(o.query(&g).unwrap(), o.query(&g.mul(&h).unwrap()).unwrap());
            }
        }
    }
}

#[test]
fn invalid_config_rejected() {
    let o = HiddenOracle::plant(InvolutionLabel::from_digits(&[1], &[0]).unwrap());
    let cfg = SolverConfig {
        stage_c_samples: 0,
        ..SolverConfig::default()
    };
    assert!(solve_hidden_involution(&o, &cfg, &mut rng(0)).is_err());
}
