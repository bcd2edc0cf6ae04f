mod common;

use exciton_core::observables::{
    entanglement_yield, monogamy_check, partitioned_entanglement, quantum_yield, quantum_yield_exact, total_entanglement,
};
use exciton_core::propagate::evolve;
use exciton_core::{BathSpec, DensityMatrix, OpenSystem, PairGroup, PairPartition, SolverOptions, C64};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_network, random_secular_bath, single_site};

fn fmo_partition() -> PairPartition {
    let group = |name: &str, pairs: Vec<(usize, usize)>| PairGroup {
        name: name.into(),
        pairs,
    };
    PairPartition::new(
        7,
        vec![
            group("DD", vec![(1, 5), (1, 6), (2, 5), (2, 6)]),
            group("AD", vec![(1, 3), (1, 4), (2, 3), (2, 4), (5, 3), (5, 4), (6, 3), (6, 4)]),
            group("dim", vec![(1, 2), (3, 4), (5, 6)]),
            group("7rest", (1..7).map(|i| (7, i)).collect()),
        ],
    )
    .unwrap()
}

fn single_excitation_state(amps: &[(f64, f64)], ground: (f64, f64)) -> DensityMatrix {
    let mut psi = DVector::from_element(amps.len() + 1, C64::new(ground.0, ground.1));
    for (k, (re, im)) in amps.iter().enumerate() {
        psi[k + 1] = C64::new(*re, *im);
    }
    DensityMatrix::pure(&psi).unwrap()
}

fn amplitudes(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn monogamy_saturates_for_pure_states(amps in amplitudes(7), site in 1usize..=7) {
        let rho = single_excitation_state(&amps, (0.0, 0.0));
        let (lhs, rhs) = monogamy_check(&rho, site).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
        let p = rho.population(site);
        prop_assert!((rhs - 4.0 * p * (1.0 - p)).abs() < 1e-12);
    }

    #[test]
    fn partition_reproduces_total(amps in amplitudes(7), g in (-0.5f64..0.5, -0.5f64..0.5)) {
        let rho = single_excitation_state(&amps, g);
        let parts = partitioned_entanglement(&rho, &fmo_partition()).unwrap();
        let total = total_entanglement(&rho);
        prop_assert!((parts.iter().sum::<f64>() - total).abs() <= 1e-15 * total.max(1.0) * 4.0);
    }
}

#[test]
fn branching_ratio() {
    let net = single_site(1.0, 1e-3);
    let sys = OpenSystem::build(&net, &BathSpec::pure_dephasing(0.0)).unwrap();
    let rho0 = DensityMatrix::localized(1, 1).unwrap();
    let traj = evolve(&rho0, &sys.liouvillian, 40.0, &SolverOptions::default()).unwrap();
    let q = quantum_yield(&traj, &net);
    assert!((q.quantum_yield - 1000.0 / 1001.0).abs() < 1e-6);
    let exact = quantum_yield_exact(&sys.liouvillian, &rho0, &net).unwrap();
    assert!((exact - 1000.0 / 1001.0).abs() < 1e-12);
}

#[test]
fn no_trap_gives_zero_yield() {
    let net = single_site(0.0, 1.0);
    let sys = OpenSystem::build(&net, &BathSpec::pure_dephasing(0.0)).unwrap();
    let traj = evolve(&DensityMatrix::localized(1, 1).unwrap(), &sys.liouvillian, 30.0, &SolverOptions::default()).unwrap();
    assert_eq!(quantum_yield(&traj, &net).quantum_yield, 0.0);
    assert!(entanglement_yield(&traj, &net, total_entanglement).is_err());
}

#[test]
fn quadrature_matches_linear_solve_and_groups_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for n in 2..=5 {
        let net = random_network(&mut rng, n, true);
        let sys = OpenSystem::build(&net, &random_secular_bath(&mut rng)).unwrap();
        let part = PairPartition::single(n, "all");
        let rho0 = DensityMatrix::localized(n, n).unwrap();
        let opts = SolverOptions {
            horizon: Some(20_000.0),
            check_every: 10,
            ..Default::default()
        };
        let report = sys.yields(&net, &part, &rho0, &opts).unwrap();
        let oracle = report.yield_oracle.unwrap();
        assert!((report.quantum_yield - oracle).abs() < 1e-4f64.max(report.truncation_bound));
        let balance = report.quantum_yield + report.dissipated + report.stats.final_excited_population;
        assert!((balance - 1.0).abs() < 1e-6, "{balance}");
        let groups: f64 = report.group_entanglement_yields.iter().map(|(_, v)| v).sum();
        assert!((groups - report.total_entanglement_yield).abs() < 1e-10);
    }
}

#[test]
fn constant_functional_averages_to_itself() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let net = random_network(&mut rng, 3, true);
    let sys = OpenSystem::build(&net, &random_secular_bath(&mut rng)).unwrap();
    let traj = evolve(&DensityMatrix::localized(2, 3).unwrap(), &sys.liouvillian, 30.0, &SolverOptions::default()).unwrap();
    let phi = entanglement_yield(&traj, &net, |_| 0.37).unwrap();
    assert!((phi - 0.37).abs() < 1e-12);
}

#[test]
fn uncoupled_dynamics_has_no_entanglement_yield() {
    let net = exciton_core::NetworkSpec {
        energies: vec![0.0, 100.0],
        couplings: vec![vec![0.0; 2]; 2],
        dissipation_rates: vec![1e-3; 2],
        trap_rates: vec![1.0, 0.5],
        ..Default::default()
    }
    .validate()
    .unwrap();
    let sys = OpenSystem::build(&net, &BathSpec::pure_dephasing(1.0)).unwrap();
    let traj = evolve(&DensityMatrix::localized(2, 2).unwrap(), &sys.liouvillian, 40.0, &SolverOptions::default()).unwrap();
    assert_eq!(entanglement_yield(&traj, &net, total_entanglement).unwrap(), 0.0);
}

#[test]
fn halving_the_sample_step_keeps_phi() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let net = random_network(&mut rng, 4, true);
    let sys = OpenSystem::build(&net, &random_secular_bath(&mut rng)).unwrap();
    let part = PairPartition::single(4, "all");
    let rho0 = DensityMatrix::localized(3, 4).unwrap();
    let opts = SolverOptions {
        horizon: Some(100.0),
        ..Default::default()
    };
    let a = sys.yields(&net, &part, &rho0, &opts).unwrap();
    let b = sys
        .yields(&net, &part, &rho0, &SolverOptions { max_step: opts.max_step / 2.0, ..opts })
        .unwrap();
    assert!((a.total_entanglement_yield - b.total_entanglement_yield).abs() < 1e-5);
}
