//! Schedule files: header, per-step records and summary as one JSON document.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Schedule, SchedulerConfig, Summary, TimeStep};
use crate::arch::GridSpec;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::selection::IonPlacement;

/// SHA-256 (hex) of the circuit's emitted OpenQASM text.
pub fn circuit_hash<T: Scalar>(circuit: &Circuit<T>) -> String {
    hex::encode(Sha256::digest(circuit.to_qasm().as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleHeader {
    pub architecture: GridSpec,
    pub circuit_hash: String,
    pub seed: Option<u64>,
    pub config: SchedulerConfig,
    /// Edge of every chain before step 0.
    pub initial_placement: IonPlacement,
    /// Native circuit the schedule executes, as OpenQASM.
    pub circuit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub header: ScheduleHeader,
    pub steps: Vec<TimeStep>,
    pub summary: Summary,
}

impl ScheduleFile {
    pub fn new<T: Scalar>(
        spec: GridSpec,
        circuit: &Circuit<T>,
        seed: Option<u64>,
        config: SchedulerConfig,
        initial: IonPlacement,
        schedule: Schedule,
    ) -> Self {
        ScheduleFile {
            header: ScheduleHeader {
                architecture: spec,
                circuit_hash: circuit_hash(circuit),
                seed,
                config,
                initial_placement: initial,
                circuit: circuit.to_qasm(),
            },
            steps: schedule.steps,
            summary: schedule.summary,
        }
    }

    pub fn schedule(&self) -> Schedule {
        Schedule {
            steps: self.steps.clone(),
            summary: self.summary.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("schedule serializes");
        s.push('\n');
        s
    }

    /// Parses a schedule document; structural problems are reported as schedule errors.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schedule(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}
