//! JSON input files: network, bath and pair partition.

use std::fs;
use std::path::Path;

use exciton_core::{BathSpec, DecoherenceModel, NetworkSpec, PairGroup, PairPartition, SiteNetwork};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::SimError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SiteRecord {
    pub label: String,
    pub energy_cm1: f64,
    pub position_angstrom: Option<[f64; 3]>,
    pub gamma_per_ps: f64,
    pub kappa_per_ps: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitsRecord {
    pub energy: String,
    pub length: String,
    pub rate: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<UnitsRecord>,
    pub sites: Vec<SiteRecord>,
    pub couplings_cm1: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances_angstrom: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BathFile {
    pub model: String,
    #[serde(default)]
    pub reorg_energy_cm1: f64,
    #[serde(default = "default_cutoff")]
    pub cutoff_cm1: f64,
    #[serde(default = "default_temperature", rename = "temperature_K")]
    pub temperature_k: f64,
    #[serde(default)]
    pub correlation_length_angstrom: f64,
    #[serde(default)]
    pub dephasing_rate_per_ps: f64,
}

fn default_cutoff() -> f64 {
    150.0
}

fn default_temperature() -> f64 {
    293.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupRecord {
    pub name: String,
    pub pairs: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionFile {
    pub groups: Vec<GroupRecord>,
}

impl NetworkFile {
    pub fn to_network(&self) -> Result<SiteNetwork, SimError> {
        if let Some(u) = &self.units {
            let expected = [("energy", &u.energy, "cm-1"), ("length", &u.length, "angstrom"), ("rate", &u.rate, "ps-1")];
            for (what, got, want) in expected {
                if got != want {
                    return Err(SimError::Config(format!("network file {what} unit must be {want}, found {got}")));
                }
            }
        }
        let positions = if self.sites.iter().all(|s| s.position_angstrom.is_some()) {
            Some(self.sites.iter().filter_map(|s| s.position_angstrom).collect())
        } else {
            None
        };
        let spec = NetworkSpec {
            labels: self.sites.iter().map(|s| s.label.clone()).collect(),
            energies: self.sites.iter().map(|s| s.energy_cm1).collect(),
            couplings: self.couplings_cm1.clone(),
            positions,
            distances: self.distances_angstrom.clone(),
            dissipation_rates: self.sites.iter().map(|s| s.gamma_per_ps).collect(),
            trap_rates: self.sites.iter().map(|s| s.kappa_per_ps).collect(),
        };
        spec.validate().map_err(invalid)
    }
}

impl BathFile {
    pub fn to_bath(&self) -> Result<BathSpec, SimError> {
        let model: DecoherenceModel = self
            .model
            .parse()
            .map_err(|_| SimError::Config(format!("unknown decoherence model {:?}", self.model)))?;
        let bath = BathSpec {
            reorg_energy: self.reorg_energy_cm1,
            cutoff_freq: self.cutoff_cm1,
            temperature: self.temperature_k,
            correlation_length: self.correlation_length_angstrom,
            model,
            dephasing_rate: self.dephasing_rate_per_ps,
        };
        bath.validate().map_err(invalid)?;
        Ok(bath)
    }
}

impl PartitionFile {
    pub fn to_partition(&self, n_sites: usize) -> Result<PairPartition, SimError> {
        let groups = self
            .groups
            .iter()
            .map(|g| PairGroup {
                name: g.name.clone(),
                pairs: g.pairs.iter().map(|p| (p[0], p[1])).collect(),
            })
            .collect();
        PairPartition::new(n_sites, groups).map_err(invalid)
    }
}

fn invalid(e: exciton_core::Error) -> SimError {
    SimError::Config(e.to_string())
}

/// Raw bytes of an input file with their SHA-256.
#[derive(Debug, Clone)]
pub struct InputFile {
    pub bytes: Vec<u8>,
    pub sha256: String,
}

pub fn read_input(path: &Path) -> Result<InputFile, SimError> {
    let bytes = fs::read(path).map_err(|e| SimError::Config(format!("cannot read {}: {e}", path.display())))?;
    let sha256 = format!("{:x}", Sha256::digest(&bytes));
    Ok(InputFile { bytes, sha256 })
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(file: &InputFile, path: &Path) -> Result<T, SimError> {
    serde_json::from_slice(&file.bytes).map_err(|e| SimError::Config(format!("{}: {e}", path.display())))
}

/// The three inputs of a run, parsed and validated.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub network: SiteNetwork,
    pub bath: BathSpec,
    pub partition: PairPartition,
    pub hashes: [String; 3],
}

pub fn load_inputs(network: &Path, bath: &Path, partition: &Path) -> Result<Inputs, SimError> {
    let nf = read_input(network)?;
    let bf = read_input(bath)?;
    let pf = read_input(partition)?;
    let net = parse_json::<NetworkFile>(&nf, network)?.to_network()?;
    let bath_spec = parse_json::<BathFile>(&bf, bath)?.to_bath()?;
    let part = parse_json::<PartitionFile>(&pf, partition)?.to_partition(net.n_sites())?;
    Ok(Inputs {
        network: net,
        bath: bath_spec,
        partition: part,
        hashes: [nf.sha256, bf.sha256, pf.sha256],
    })
}
