use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::lp::BesovIndex;

/// Per-time diagnostics of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticRecord {
    pub t: f64,
    /// `‖∇θ‖_∞` (Euclidean length of the gradient).
    pub linf_grad: f64,
    pub besov: Vec<(BesovIndex, f64)>,
    /// `‖Δ_j θ‖_∞` per dyadic block.
    pub lp_blocks: BTreeMap<i32, f64>,
    /// `‖θ‖_2` (normalized measure).
    pub energy: f64,
    pub max: f64,
    pub min: f64,
}

/// Why a run stopped before `t_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub t: f64,
    pub reason: String,
}

/// Time-ordered states of a run with their diagnostics.
///
/// `states` is either empty (states not stored) or aligned with `times`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: Grid,
    pub times: Vec<f64>,
    pub states: Vec<Field>,
    pub records: Vec<DiagnosticRecord>,
    pub truncated: Option<Truncation>,
    pub steps: usize,
}

impl Trajectory {
    pub fn new(grid: Grid) -> Self {
        Self {
            grid,
            times: Vec::new(),
            states: Vec::new(),
            records: Vec::new(),
            truncated: None,
            steps: 0,
        }
    }

    /// Trajectory of explicitly given states (no diagnostics attached).
    pub fn from_states(times: Vec<f64>, states: Vec<Field>) -> Result<Self> {
        let first = states.first().ok_or(Error::EmptyTrajectory)?;
        let grid = *first.grid();
        if times.len() != states.len() {
            return Err(Error::InvalidArgument(
                "times and states differ in length".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "times must increase strictly".into(),
            ));
        }
        if states.iter().any(|s| *s.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid,
            times,
            states,
            records: Vec::new(),
            truncated: None,
            steps: 0,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn has_states(&self) -> bool {
        !self.states.is_empty() && self.states.len() == self.times.len()
    }

    pub fn states(&self) -> Result<&[Field]> {
        if self.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        if !self.has_states() {
            return Err(Error::InvalidArgument(
                "trajectory was run without storing states".into(),
            ));
        }
        Ok(&self.states)
    }

    pub fn final_time(&self) -> Option<f64> {
        self.times.last().copied()
    }

    pub fn final_state(&self) -> Option<&Field> {
        self.states.last()
    }

    pub fn push(&mut self, t: f64, state: Option<Field>, record: Option<DiagnosticRecord>) {
        debug_assert!(self.times.last().map_or(true, |&last| t > last));
        self.times.push(t);
        if let Some(s) = state {
            self.states.push(s);
        }
        if let Some(r) = record {
            self.records.push(r);
        }
    }
}
