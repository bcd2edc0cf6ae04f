#![allow(dead_code)]

use exciton_core::{BathSpec, NetworkSpec, SiteNetwork};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random network on a plane with couplings up to 100 cm⁻¹ and site 1 as the trap.
pub fn random_network(rng: &mut ChaCha8Rng, n: usize, lossy: bool) -> SiteNetwork {
    let energies = (0..n).map(|_| rng.random_range(0.0..400.0)).collect();
    let mut couplings = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.random_range(-100.0..100.0);
            couplings[i][j] = v;
            couplings[j][i] = v;
        }
    }
    let positions = (0..n)
        .map(|_| [rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0), 0.0])
        .collect();
    let (dissipation_rates, trap_rates) = if lossy {
        (
            (0..n).map(|_| rng.random_range(1e-3..0.1)).collect(),
            (0..n).map(|m| if m == 0 { rng.random_range(0.5..2.0) } else { 0.0 }).collect(),
        )
    } else {
        (vec![0.0; n], vec![0.0; n])
    };
    NetworkSpec {
        energies,
        couplings,
        positions: Some(positions),
        dissipation_rates,
        trap_rates,
        ..Default::default()
    }
    .validate()
    .unwrap()
}

pub fn random_secular_bath(rng: &mut ChaCha8Rng) -> BathSpec {
    BathSpec::secular(
        rng.random_range(1.0..50.0),
        rng.random_range(50.0..300.0),
        rng.random_range(77.0..300.0),
        0.0,
    )
}

pub fn single_site(kappa: f64, gamma: f64) -> SiteNetwork {
    NetworkSpec {
        energies: vec![0.0],
        couplings: vec![vec![0.0]],
        dissipation_rates: vec![gamma],
        trap_rates: vec![kappa],
        ..Default::default()
    }
    .validate()
    .unwrap()
}
