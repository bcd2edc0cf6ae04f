//! Trapping density, quantum yield, pairwise tangles, total and partitioned
//! entanglement, entanglement yields and the monogamy diagnostic.
//!
//! For states supported on the zero- and single-excitation subspace the
//! two-site reduced state has concurrence 2|ρ_mn| and tangle 4|ρ_mn|².

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::liouvillian::Liouvillian;
use crate::network::SiteNetwork;
use crate::propagate::{SolverStats, Trajectory};
use crate::quadrature::SimpsonAccumulator;
use crate::state::DensityMatrix;

/// Truncation bounds above this attach a horizon warning to the report.
pub const TRUNCATION_WARNING: f64 = 1e-3;

/// Neumaier-compensated sum.
fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// ω_RC = Σ_m κ_m ρ_mm, ps⁻¹.
pub fn trapping_density(rho: &DensityMatrix, net: &SiteNetwork) -> f64 {
    net.trap_rates()
        .iter()
        .enumerate()
        .map(|(m, k)| k * rho.population(m + 1))
        .sum()
}

/// Σ_m Γ_m ρ_mm, ps⁻¹.
pub fn dissipation_density(rho: &DensityMatrix, net: &SiteNetwork) -> f64 {
    net.dissipation_rates()
        .iter()
        .enumerate()
        .map(|(m, g)| g * rho.population(m + 1))
        .sum()
}

/// τ_mn = 4|ρ_mn|² for sites m ≠ n (1-based).
pub fn pair_tangle(rho: &DensityMatrix, m: usize, n: usize) -> Result<f64> {
    let n_sites = rho.n_sites();
    for s in [m, n] {
        if s == 0 || s > n_sites {
            return Err(Error::IndexOutOfRange { index: s, n_sites });
        }
    }
    if m == n {
        return Err(Error::Domain(format!("pair tangle needs distinct sites, got ({m},{n})")));
    }
    Ok(4.0 * rho.coherence(m, n).norm_sqr())
}

fn tangle_unchecked(rho: &DensityMatrix, m: usize, n: usize) -> f64 {
    4.0 * rho.coherence(m, n).norm_sqr()
}

/// E_T = Σ_{m<n} τ_mn.
pub fn total_entanglement(rho: &DensityMatrix) -> f64 {
    let n = rho.n_sites();
    compensated_sum((1..=n).flat_map(|m| ((m + 1)..=n).map(move |k| (m, k))).map(|(m, k)| tangle_unchecked(rho, m, k)))
}

/// Named group of unordered site pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairGroup {
    pub name: String,
    /// 1-based, stored with the smaller index first.
    pub pairs: Vec<(usize, usize)>,
}

/// Disjoint, exhaustive grouping of all N(N−1)/2 site pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairPartition {
    n_sites: usize,
    groups: Vec<PairGroup>,
}

impl PairPartition {
    pub fn new(n_sites: usize, groups: Vec<PairGroup>) -> Result<Self> {
        let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut out_of_range = Vec::new();
        let mut normalized = Vec::with_capacity(groups.len());
        for g in groups {
            let mut pairs = Vec::with_capacity(g.pairs.len());
            for (a, b) in g.pairs {
                let p = (a.min(b), a.max(b));
                if p.0 == 0 || p.1 > n_sites || p.0 == p.1 {
                    out_of_range.push(p);
                    continue;
                }
                *seen.entry(p).or_insert(0) += 1;
                pairs.push(p);
            }
            normalized.push(PairGroup { name: g.name, pairs });
        }
        let duplicated: Vec<_> = seen.iter().filter(|(_, &c)| c > 1).map(|(p, _)| *p).collect();
        let missing: Vec<_> = (1..=n_sites)
            .flat_map(|m| ((m + 1)..=n_sites).map(move |k| (m, k)))
            .filter(|p| !seen.contains_key(p))
            .collect();
        let mut names: Vec<&str> = normalized.iter().map(|g| g.name.as_str()).collect();
        names.sort_unstable();
        let repeated_name = names.windows(2).any(|w| w[0] == w[1]);
        if !missing.is_empty() || !duplicated.is_empty() || !out_of_range.is_empty() {
            return Err(Error::InvalidPartition {
                missing,
                duplicated,
                out_of_range,
            });
        }
        if repeated_name {
            return Err(Error::Validation(alloc::vec![String::from("partition group names must be unique")]));
        }
        Ok(Self {
            n_sites,
            groups: normalized,
        })
    }

    /// Everything in one group called `name`.
    pub fn single(n_sites: usize, name: &str) -> Self {
        let pairs = (1..=n_sites).flat_map(|m| ((m + 1)..=n_sites).map(move |k| (m, k))).collect();
        Self {
            n_sites,
            groups: alloc::vec![PairGroup {
                name: String::from(name),
                pairs,
            }],
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn groups(&self) -> &[PairGroup] {
        &self.groups
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.groups.iter().map(|g| g.name.as_str())
    }
}

/// Group entanglements in partition order.
pub fn partitioned_entanglement(rho: &DensityMatrix, partition: &PairPartition) -> Result<Vec<f64>> {
    if partition.n_sites() != rho.n_sites() {
        return Err(Error::DimensionMismatch {
            what: "partition sites",
            expected: rho.n_sites(),
            found: partition.n_sites(),
        });
    }
    Ok(partition
        .groups()
        .iter()
        .map(|g| compensated_sum(g.pairs.iter().map(|&(m, n)| tangle_unchecked(rho, m, n))))
        .collect())
}

/// Pairwise tangles of site `n` summed (left side) and its one-tangle with
/// the rest, 4 det ρ_n (right side), for a pure state.
pub fn monogamy_check(rho: &DensityMatrix, site: usize) -> Result<(f64, f64)> {
    let n_sites = rho.n_sites();
    if site == 0 || site > n_sites {
        return Err(Error::IndexOutOfRange { index: site, n_sites });
    }
    let purity = rho.purity();
    if !(purity > 1.0 - 1e-8) {
        return Err(Error::NotPure { purity });
    }
    let lhs = compensated_sum((1..=n_sites).filter(|&m| m != site).map(|m| tangle_unchecked(rho, site, m)));
    let p = rho.population(site);
    // the single-qubit coherence pairs |site⟩ with |0⟩
    let c = rho.coherence(0, site).norm_sqr();
    let rhs = 4.0 * (p * (1.0 - p) - c);
    Ok((lhs, rhs))
}

/// η by Simpson quadrature of ω_RC over a trajectory, with the terminal
/// excited population as the truncation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureYield {
    pub quantum_yield: f64,
    pub truncation_bound: f64,
}

pub fn quantum_yield(traj: &Trajectory, net: &SiteNetwork) -> QuadratureYield {
    let mut acc = SimpsonAccumulator::new(1, traj.max_step);
    for rho in &traj.states {
        acc.push(&[trapping_density(rho, net)]);
    }
    QuadratureYield {
        quantum_yield: acc.integrals()[0],
        truncation_bound: traj.states.last().map_or(0.0, |r| r.excited_population()),
    }
}

/// η from the integrated state: Σ_m κ_m ρ̄_mm.
pub fn quantum_yield_exact(l: &Liouvillian, rho0: &DensityMatrix, net: &SiteNetwork) -> Result<f64> {
    let integral = crate::propagate::integrated_state(l, rho0)?;
    Ok(net
        .trap_rates()
        .iter()
        .enumerate()
        .map(|(m, k)| k * integral[(m + 1, m + 1)].re)
        .sum())
}

/// φ = (1/η) ∫ E(t) ω_RC(t) dt over a trajectory for any entanglement functional.
pub fn entanglement_yield<F>(traj: &Trajectory, net: &SiteNetwork, functional: F) -> Result<f64>
where
    F: Fn(&DensityMatrix) -> f64,
{
    let mut acc = SimpsonAccumulator::new(2, traj.max_step);
    for rho in &traj.states {
        let w = trapping_density(rho, net);
        acc.push(&[w, functional(rho) * w]);
    }
    let ints = acc.integrals();
    if !(ints[0] >= 1e-12) {
        return Err(Error::UndefinedAverage { quantum_yield: ints[0] });
    }
    Ok(ints[1] / ints[0])
}

#[derive(Debug, Clone, PartialEq)]
pub struct YieldReport {
    pub quantum_yield: f64,
    /// Linear-solve value, when computed.
    pub yield_oracle: Option<f64>,
    pub truncation_bound: f64,
    /// ∫ Σ Γ_m ρ_mm dt.
    pub dissipated: f64,
    /// φ_T.
    pub total_entanglement_yield: f64,
    /// φ per partition group, in partition order.
    pub group_entanglement_yields: Vec<(String, f64)>,
    pub stats: SolverStats,
    pub warnings: Vec<String>,
}

impl YieldReport {
    pub fn group(&self, name: &str) -> Option<f64> {
        self.group_entanglement_yields.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// Streaming evaluation of η, the dissipated probability, φ_T and the
/// partitioned φ on the sample grid of a propagation.
#[derive(Debug, Clone)]
pub struct YieldAccumulator<'a> {
    net: &'a SiteNetwork,
    partition: &'a PairPartition,
    simpson: SimpsonAccumulator,
    buffer: Vec<f64>,
}

impl<'a> YieldAccumulator<'a> {
    pub fn new(net: &'a SiteNetwork, partition: &'a PairPartition, dt: f64) -> Result<Self> {
        if partition.n_sites() != net.n_sites() {
            return Err(Error::DimensionMismatch {
                what: "partition sites",
                expected: net.n_sites(),
                found: partition.n_sites(),
            });
        }
        let lanes = 3 + partition.groups().len();
        Ok(Self {
            net,
            partition,
            simpson: SimpsonAccumulator::new(lanes, dt),
            buffer: alloc::vec![0.0; lanes],
        })
    }

    pub fn push(&mut self, rho: &DensityMatrix) {
        let w = trapping_density(rho, self.net);
        self.buffer[0] = w;
        self.buffer[1] = dissipation_density(rho, self.net);
        self.buffer[2] = total_entanglement(rho) * w;
        for (slot, g) in self.buffer[3..].iter_mut().zip(self.partition.groups()) {
            *slot = compensated_sum(g.pairs.iter().map(|&(m, n)| tangle_unchecked(rho, m, n))) * w;
        }
        self.simpson.push(&self.buffer);
    }

    pub fn finish(self, stats: SolverStats) -> Result<YieldReport> {
        let ints = self.simpson.integrals();
        let eta = ints[0];
        if !(eta >= 1e-12) {
            return Err(Error::UndefinedAverage { quantum_yield: eta });
        }
        let mut warnings = Vec::new();
        let truncation_bound = stats.final_excited_population.max(0.0);
        if truncation_bound > TRUNCATION_WARNING {
            warnings.push(format!(
                "horizon too short: excited population {truncation_bound:.3e} left at t = {} ps",
                stats.final_time
            ));
        }
        Ok(YieldReport {
            quantum_yield: eta,
            yield_oracle: None,
            truncation_bound,
            dissipated: ints[1],
            total_entanglement_yield: ints[2] / eta,
            group_entanglement_yields: self
                .partition
                .groups()
                .iter()
                .zip(&ints[3..])
                .map(|(g, v)| (g.name.clone(), v / eta))
                .collect(),
            stats,
            warnings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{CMatrix, C64};
    use alloc::vec;
    use nalgebra::DVector;

    fn fmo_partition() -> PairPartition {
        let named = |name: &str, pairs: Vec<(usize, usize)>| PairGroup {
            name: String::from(name),
            pairs,
        };
        PairPartition::new(
            7,
            vec![
                named("DD", vec![(1, 5), (1, 6), (2, 5), (2, 6)]),
                named(
                    "AD",
                    vec![(1, 3), (1, 4), (2, 3), (2, 4), (5, 3), (5, 4), (6, 3), (6, 4)],
                ),
                named("dim", vec![(1, 2), (3, 4), (5, 6)]),
                named("7rest", (1..7).map(|i| (7, i)).collect()),
            ],
        )
        .unwrap()
    }

    fn uniform(n: usize) -> DensityMatrix {
        let mut psi = DVector::zeros(n + 1);
        for m in 1..=n {
            psi[m] = C64::new(1.0, 0.0);
        }
        DensityMatrix::pure(&psi).unwrap()
    }

    #[test]
    fn tangle_examples() {
        let bell = {
            let mut psi = DVector::zeros(3);
            psi[1] = C64::new(1.0, 0.0);
            psi[2] = C64::new(1.0, 0.0);
            DensityMatrix::pure(&psi).unwrap()
        };
        assert!((pair_tangle(&bell, 1, 2).unwrap() - 1.0).abs() < 1e-15);
        let local = DensityMatrix::localized(1, 4).unwrap();
        assert_eq!(total_entanglement(&local), 0.0);
        let mut m = CMatrix::zeros(3, 3);
        m[(1, 1)] = C64::new(0.5, 0.0);
        m[(2, 2)] = C64::new(0.5, 0.0);
        m[(1, 2)] = C64::new(0.3, 0.0);
        m[(2, 1)] = C64::new(0.3, 0.0);
        let rho = DensityMatrix::new(m).unwrap();
        assert!((pair_tangle(&rho, 1, 2).unwrap() - 0.36).abs() < 1e-15);
        assert!(pair_tangle(&rho, 1, 1).is_err());
        assert!(pair_tangle(&rho, 1, 3).is_err());
    }

    #[test]
    fn uniform_superposition_total() {
        let rho = uniform(7);
        assert!((total_entanglement(&rho) - 12.0 / 7.0).abs() < 1e-14);
        let parts = partitioned_entanglement(&rho, &fmo_partition()).unwrap();
        assert!((parts.iter().sum::<f64>() - total_entanglement(&rho)).abs() <= 1e-15);
    }

    #[test]
    fn bell_pair_lands_in_dimer_group() {
        let mut psi = DVector::zeros(8);
        psi[1] = C64::new(1.0, 0.0);
        psi[2] = C64::new(0.0, 1.0);
        let rho = DensityMatrix::pure(&psi).unwrap();
        let parts = partitioned_entanglement(&rho, &fmo_partition()).unwrap();
        assert!((total_entanglement(&rho) - 1.0).abs() < 1e-15);
        assert_eq!(parts[0], 0.0);
        assert_eq!(parts[1], 0.0);
        assert!((parts[2] - 1.0).abs() < 1e-15);
        assert_eq!(parts[3], 0.0);
    }

    #[test]
    fn partition_validation_names_problems() {
        let g = |name: &str, pairs: Vec<(usize, usize)>| PairGroup {
            name: String::from(name),
            pairs,
        };
        match PairPartition::new(3, vec![g("a", vec![(1, 2), (2, 1)]), g("b", vec![(3, 4)])]) {
            Err(Error::InvalidPartition {
                missing,
                duplicated,
                out_of_range,
            }) => {
                assert_eq!(missing, vec![(1, 3), (2, 3)]);
                assert_eq!(duplicated, vec![(1, 2)]);
                assert_eq!(out_of_range, vec![(3, 4)]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(fmo_partition().groups().iter().map(|g| g.pairs.len()).sum::<usize>(), 21);
    }

    #[test]
    fn trapping_density_examples() {
        let net = crate::network::NetworkSpec {
            energies: vec![0.0; 3],
            couplings: vec![vec![0.0; 3]; 3],
            dissipation_rates: vec![0.001; 3],
            trap_rates: vec![0.0, 0.0, 1.0],
            ..Default::default()
        }
        .validate()
        .unwrap();
        assert_eq!(trapping_density(&DensityMatrix::ground(3), &net), 0.0);
        assert_eq!(trapping_density(&DensityMatrix::localized(3, 3).unwrap(), &net), 1.0);
        let mut m = CMatrix::zeros(4, 4);
        m[(1, 1)] = C64::new(0.5, 0.0);
        m[(3, 3)] = C64::new(0.5, 0.0);
        assert_eq!(trapping_density(&DensityMatrix::new(m).unwrap(), &net), 0.5);
    }

    #[test]
    fn monogamy_examples() {
        let (l, r) = monogamy_check(&DensityMatrix::localized(1, 7).unwrap(), 1).unwrap();
        assert_eq!((l, r), (0.0, 0.0));
        let (l, r) = monogamy_check(&uniform(7), 1).unwrap();
        assert!((l - 24.0 / 49.0).abs() < 1e-14 && (r - 24.0 / 49.0).abs() < 1e-14);
        let mut m = CMatrix::zeros(3, 3);
        m[(1, 1)] = C64::new(0.5, 0.0);
        m[(2, 2)] = C64::new(0.5, 0.0);
        assert!(matches!(
            monogamy_check(&DensityMatrix::new(m).unwrap(), 1),
            Err(Error::NotPure { .. })
        ));
    }
}
