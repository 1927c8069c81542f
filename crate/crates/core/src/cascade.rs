//! The staged cascade, run two ways.
//!
//! [`run_oracle`] propagates the full two-mode state through every stage with
//! dense matrices. [`run_blocks`] uses the closed-form kernel per probe photon
//! number and assembles emission and post-selection results from it.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{
    fidelity, hermitian_propagator, kerr_unitary, kron, norm_sqr, normalize, AmplitudeVector, ComplexMatrix,
    JointState, ModeSpace, C64,
};
use crate::kernel::{kh_hamiltonian, vw_closed_form, BlockAmplitudes, StageParams};
use crate::probe::strip_vacuum;

/// Largest probability tolerated outside signal levels `{0, n}`.
pub const LEAKAGE_TOL: f64 = 1e-9;

/// Post-selection probabilities at or below this count as no outcome.
pub const NO_OUTCOME_TOL: f64 = 1e-20;

const PROBE_NORM_TOL: f64 = 1e-10;

/// Default signal-mode cutoff for the full-space run.
pub fn default_a_cutoff(n: usize) -> usize {
    3 * n + 2
}

fn check_probe(probe: &AmplitudeVector) -> Result<()> {
    let norm = norm_sqr(probe);
    if (norm - 1.0).abs() > PROBE_NORM_TOL {
        return Err(Error::InvalidParams(format!(
            "probe state must be normalized (|probe|^2 = {norm})"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct OracleRun {
    pub state: JointState,
    /// Worst out-of-block probability seen after any stage.
    pub max_leakage: f64,
}

fn leakage(state: &JointState, n: usize) -> f64 {
    state
        .a_marginal()
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != 0 && *j != n)
        .map(|(_, p)| p)
        .sum()
}

/// Full tensor-product propagation of `|0>_a |probe>_b` through the cascade.
pub fn run_oracle(params: &StageParams, probe: &AmplitudeVector, a_cutoff: usize) -> Result<OracleRun> {
    check_probe(probe)?;
    let space_a = ModeSpace::new(a_cutoff)?;
    let space_b = ModeSpace::new(probe.len())?;
    let u_kh = hermitian_propagator(&kh_hamiltonian(params.n, 1.0, space_a)?, params.theta)?;
    let parametric = kron(&u_kh, &ComplexMatrix::identity(probe.len(), probe.len()));
    let kerr = kerr_unitary(params.kappa, space_a, space_b);

    let mut state = JointState::product(&space_a.vacuum(), probe);
    let mut max_leakage: f64 = 0.0;
    for stage in 1..=params.stages {
        state = state.apply(&parametric)?.apply_kerr(&kerr)?;
        let leaked = leakage(&state, params.n);
        max_leakage = max_leakage.max(leaked);
        if leaked > LEAKAGE_TOL {
            return Err(Error::Leakage {
                leakage: leaked,
                n: params.n,
                stage,
            });
        }
    }
    Ok(OracleRun { state, max_leakage })
}

/// Probe state conditioned on finding the signal mode in vacuum.
#[derive(Debug, Clone, PartialEq)]
pub enum PostSelection {
    Outcome {
        /// Normalized probe state after the projection.
        state: AmplitudeVector,
        /// Overlap with the normalized vacuum-stripped input.
        fidelity: f64,
    },
    /// The vacuum branch has (numerically) zero probability, or the input has
    /// nothing but vacuum to compare against.
    NoOutcome,
}

#[derive(Debug, Clone)]
pub struct CascadeResult {
    pub params: StageParams,
    /// One entry per probe photon number, `blocks[m].m == m`.
    pub blocks: Vec<BlockAmplitudes>,
    pub probe: AmplitudeVector,
    pub emission_probability: f64,
    pub postselect_probability: f64,
    pub postselection: PostSelection,
    pub alpha0: C64,
}

impl CascadeResult {
    pub fn truncated_state(&self) -> Option<&AmplitudeVector> {
        match &self.postselection {
            PostSelection::Outcome { state, .. } => Some(state),
            PostSelection::NoOutcome => None,
        }
    }

    pub fn truncation_fidelity(&self) -> Option<f64> {
        match self.postselection {
            PostSelection::Outcome { fidelity, .. } => Some(fidelity),
            PostSelection::NoOutcome => None,
        }
    }

    /// `|alpha_0|^2 + sum_{m >= 1} |alpha_m w(m)|^2`; equals the emission
    /// probability only for the design geometry.
    pub fn emission_probability_design_formula(&self) -> f64 {
        self.alpha0.norm_sqr()
            + self
                .blocks
                .iter()
                .skip(1)
                .map(|b| (self.probe[b.m] * b.w).norm_sqr())
                .sum::<f64>()
    }

    /// Output state laid out on the same joint basis as [`run_oracle`].
    pub fn joint_state(&self, a_cutoff: usize) -> Result<JointState> {
        let n = self.params.n;
        if a_cutoff <= n {
            return Err(Error::CutoffTooSmall {
                required: n + 1,
                got: a_cutoff,
            });
        }
        let db = self.probe.len();
        let mut amps = AmplitudeVector::zeros(a_cutoff * db);
        for b in &self.blocks {
            amps[b.m] = self.probe[b.m] * b.v;
            amps[n * db + b.m] = self.probe[b.m] * b.w;
        }
        JointState::from_amplitudes((a_cutoff, db), amps)
    }
}

/// Per-photon-number evaluation of the cascade.
///
/// Probabilities come from the full block decomposition, so they are also
/// correct away from the design angle. The post-selected state is the exact
/// projection onto `|0>_a`, renormalized.
pub fn run_blocks(params: &StageParams, probe: &AmplitudeVector) -> Result<CascadeResult> {
    check_probe(probe)?;
    let blocks: Vec<BlockAmplitudes> = (0..probe.len()).map(|m| vw_closed_form(params, m)).collect();

    let emission_probability: f64 = blocks.iter().map(|b| (probe[b.m] * b.w).norm_sqr()).sum();
    let conditioned = AmplitudeVector::from_fn(probe.len(), |m, _| probe[m] * blocks[m].v);
    let postselect_probability = norm_sqr(&conditioned);

    let stripped = strip_vacuum(probe);
    let postselection = if postselect_probability <= NO_OUTCOME_TOL || stripped.all_vacuum {
        PostSelection::NoOutcome
    } else {
        let state = normalize(&conditioned)?;
        let fidelity = fidelity(&normalize(&stripped.stripped)?, &state)?;
        PostSelection::Outcome { state, fidelity }
    };

    Ok(CascadeResult {
        params: *params,
        blocks,
        probe: probe.clone(),
        emission_probability,
        postselect_probability,
        postselection,
        alpha0: stripped.alpha0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub stages: usize,
    pub emission_probability: f64,
    pub postselect_probability: f64,
    /// `None` marks a no-outcome row.
    pub fidelity: Option<f64>,
}

/// Design-geometry cascades for each stage count, in input order.
pub fn truncation_fidelity_sweep(
    n: usize,
    kappa: f64,
    probe: &AmplitudeVector,
    stage_counts: &[usize],
) -> Result<Vec<SweepRow>> {
    stage_counts
        .par_iter()
        .map(|&stages| {
            let params = StageParams::design(n, stages, kappa)?;
            let res = run_blocks(&params, probe)?;
            Ok(SweepRow {
                stages,
                emission_probability: res.emission_probability,
                postselect_probability: res.postselect_probability,
                fidelity: res.truncation_fidelity(),
            })
        })
        .collect()
}
