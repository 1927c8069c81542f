//! Closed-form stage kernel of the Kerr-interrupted parametric cascade.
//!
//! Conditioned on `m` photons in the probe mode, the signal mode only ever
//! occupies `|0>` and `|n>`. One stage is a parametric rotation by `theta`
//! followed by the Kerr phase `diag(1, e^{i delta})` with `delta = kappa n m`;
//! after `N` stages the signal vacuum has become `v |0> + w |n>`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::fock::{ladder_ops, ComplexMatrix, ModeSpace, C64};

/// Tolerance on `N * theta == pi / 2` for the design geometry.
pub const DESIGN_ANGLE_TOL: f64 = 1e-12;

/// Below this, `kappa n m mod 2pi` is treated as zero.
const PHASE_ZERO_TOL: f64 = 1e-12;

/// Geometry of the cascade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageParams {
    /// Target Fock number of the signal mode.
    pub n: usize,
    /// Number of stages.
    pub stages: usize,
    /// Kerr strength, radians per photon pair.
    pub kappa: f64,
    /// Parametric rotation angle of a single stage.
    pub theta: f64,
}

impl StageParams {
    pub fn new(n: usize, stages: usize, kappa: f64, theta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if stages == 0 {
            return Err(Error::InvalidParams("stage count must be at least 1".into()));
        }
        if !kappa.is_finite() || !theta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "kappa and theta must be finite (kappa={kappa}, theta={theta})"
            )));
        }
        Ok(Self {
            n,
            stages,
            kappa,
            theta,
        })
    }

    /// Cascade whose stages add up to a total rotation of `pi / 2`.
    pub fn design(n: usize, stages: usize, kappa: f64) -> Result<Self> {
        Self::new(n, stages, kappa, FRAC_PI_2 / stages.max(1) as f64)
    }

    pub fn total_angle(&self) -> f64 {
        self.stages as f64 * self.theta
    }

    pub fn is_design(&self) -> bool {
        (self.total_angle() - FRAC_PI_2).abs() <= DESIGN_ANGLE_TOL
    }

    /// Kerr phase per stage for `m` probe photons.
    pub fn delta(&self, m: usize) -> f64 {
        self.kappa * (self.n * m) as f64
    }
}

/// Signal amplitudes after the cascade, conditioned on `m` probe photons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockAmplitudes {
    pub m: usize,
    /// Amplitude left on `|0>_a`.
    pub v: C64,
    /// Amplitude on `|n>_a`.
    pub w: C64,
    pub delta: f64,
    pub eta: f64,
}

impl BlockAmplitudes {
    pub fn norm_sqr(&self) -> f64 {
        self.v.norm_sqr() + self.w.norm_sqr()
    }
}

/// Parametric interaction Hamiltonian for `n`-photon generation,
///
/// `H = g / sqrt(n!) [ (a^n + a^dag^n) - (a^dag a^(n+1) + a^dag^(n+1) a) / n ]`.
///
/// Built as `X + X^dagger`, so the result is exactly Hermitian. The cutoff
/// must reach `2n + 2` so that the `|2n>` terms cancelling inside the
/// `{|0>, |n>}` block are both represented.
pub fn kh_hamiltonian(n: usize, g: f64, space: ModeSpace) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    let required = 2 * n + 2;
    if space.cutoff() < required {
        return Err(Error::CutoffTooSmall {
            required,
            got: space.cutoff(),
        });
    }
    let ops = ladder_ops(space);
    let a_pow_n = ops.annihilation.pow(n as u32);
    let a_pow_n1 = &a_pow_n * &ops.annihilation;
    let half = a_pow_n - (&ops.creation * a_pow_n1).unscale(n as f64);
    let norm = g / factorial(n).sqrt();
    Ok((&half + half.adjoint()).scale(norm))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `[[cos t, i sin t], [i sin t, cos t]]` on the ordered pair `(|0>, |n>)`.
pub fn kh_block_rotation(theta: f64) -> Matrix2<C64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(
        C64::new(c, 0.0),
        C64::new(0.0, s),
        C64::new(0.0, s),
        C64::new(c, 0.0),
    )
}

/// One full stage on the `(|0>, |n>)` block: rotation, then Kerr phase.
pub fn stage_transfer_matrix(params: &StageParams, m: usize) -> Matrix2<C64> {
    let kerr = Matrix2::new(
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::from_polar(1.0, params.delta(m)),
    );
    kerr * kh_block_rotation(params.theta)
}

/// `(v, w)` by multiplying out `N` stage matrices.
pub fn vw_by_transfer(params: &StageParams, m: usize) -> (C64, C64) {
    let stage = stage_transfer_matrix(params, m);
    let mut state = Vector2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    for _ in 0..params.stages {
        state = stage * state;
    }
    (state[0], state[1])
}

/// `sin(k eta) / sin(eta)` as the Chebyshev polynomial `U_{k-1}(cos eta)`,
/// finite (and equal to `k`) at `eta = 0`.
pub fn sin_ratio(k: usize, cos_eta: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 1..k {
        let next = 2.0 * cos_eta * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Exact `(v, w)` after `N` stages for `m` probe photons.
pub fn vw_closed_form(params: &StageParams, m: usize) -> BlockAmplitudes {
    let delta = params.delta(m);
    let big_n = params.stages as f64;
    let (sin_t, cos_t) = params.theta.sin_cos();
    let (sin_hd, cos_hd) = (delta / 2.0).sin_cos();
    let cos_eta = (cos_t * cos_hd).clamp(-1.0, 1.0);
    // 1 - cos^2 eta without cancellation; acos alone loses digits for small theta
    let sin_eta = (sin_t * sin_t + cos_t * cos_t * sin_hd * sin_hd).sqrt().min(1.0);
    let eta = sin_eta.atan2(cos_eta);
    let ratio = if sin_eta > 1e-150 {
        (big_n * eta).sin() / sin_eta
    } else {
        sin_ratio(params.stages, cos_eta)
    };

    let i = C64::i();
    let v = C64::from_polar(1.0, big_n * delta / 2.0)
        * (C64::new((big_n * eta).cos(), 0.0) - i * (cos_t * sin_hd * ratio));
    let w = i * C64::from_polar(1.0, (big_n + 1.0) * delta / 2.0) * (sin_t * ratio);
    BlockAmplitudes {
        m,
        v,
        w,
        delta,
        eta,
    }
}

fn reject_full_turn(delta: f64) -> Option<f64> {
    let reduced = delta.rem_euclid(TAU);
    if reduced < PHASE_ZERO_TOL || TAU - reduced < PHASE_ZERO_TOL {
        None
    } else {
        Some(reduced)
    }
}

/// First-order large-`N` expansion of `(v, w)` for the design geometry.
///
/// Only `N`, `n`, `kappa` enter; `theta` is taken to be `pi / (2N)`.
pub fn vw_asymptotic(params: &StageParams, m: usize) -> Result<BlockAmplitudes> {
    let delta = params.delta(m);
    if reject_full_turn(delta).is_none() {
        return Err(Error::ExcludedRegime { delta });
    }
    let big_n = params.stages as f64;
    let half = delta / 2.0;
    // tan(half) is infinite at delta = pi; the correction then vanishes
    let v = C64::new(1.0, 0.0) - C64::i() * (PI * PI / (8.0 * half.tan() * big_n));
    let w = C64::i()
        * C64::from_polar(1.0, (big_n + 1.0) * half)
        * (PI * (big_n * half).sin() / (2.0 * half.sin() * big_n));
    let theta = FRAC_PI_2 / big_n;
    let eta = (theta.cos() * half.cos()).clamp(-1.0, 1.0).acos();
    Ok(BlockAmplitudes {
        m,
        v,
        w,
        delta,
        eta,
    })
}

/// `cos^(2N)(theta)`: probability of still finding the vacuum after `N`
/// ideal projective measurements, one per stage.
pub fn projective_survival(stages: usize, theta: f64) -> f64 {
    theta.cos().powi(2).powf(stages as f64)
}

/// Number of stages per emission oscillation, `2 pi / delta_0` with
/// `delta_0 = kappa n m mod 2pi`.
pub fn oscillation_period(params: &StageParams, m: usize) -> Result<f64> {
    let delta = params.delta(m);
    match reject_full_turn(delta) {
        Some(delta0) => Ok(TAU / delta0),
        None => Err(Error::NoOscillation { delta }),
    }
}
