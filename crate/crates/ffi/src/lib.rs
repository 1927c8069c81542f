//! C ABI over the `zeno-scissors` library.
//!
//! Probe states and cascade results cross the boundary as opaque handles
//! created by `zs_*_new`/`zs_*_run` style functions and released with the
//! matching `zs_*_free`. Every fallible call returns a [`ZsStatus`]; on
//! failure a human-readable message is kept per thread and can be read with
//! [`zs_last_error_message`].
//!
//! Output buffers are always supplied by the caller. Pointers must be
//! non-null unless a function says otherwise; a null pointer yields
//! `ZS_STATUS_NULL_POINTER` rather than a crash. Panics are caught at the
//! boundary and reported as `ZS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use zeno_scissors::cascade::{run_blocks, run_oracle, CascadeResult};
use zeno_scissors::fock::{AmplitudeVector, C64};
use zeno_scissors::kernel::{oscillation_period, projective_survival, vw_asymptotic, vw_closed_form};
use zeno_scissors::probe::{build_state, parse_probe, photon_statistics, ProbeKind, ProbeStateSpec};
use zeno_scissors::{BlockAmplitudes, Error, StageParams};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ProbeSyntax = 3,
    TailMass = 4,
    CutoffTooSmall = 5,
    ExcludedRegime = 6,
    NoOscillation = 7,
    Leakage = 8,
    /// The post-selected branch has zero probability.
    NoOutcome = 9,
    Io = 10,
    BufferTooSmall = 11,
    Panic = 99,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: ZsStatus, msg: impl Into<String>) -> ZsStatus {
    set_error(msg);
    status
}

fn status_of(err: &Error) -> ZsStatus {
    match err {
        Error::ProbeSyntax { .. } => ZsStatus::ProbeSyntax,
        Error::TailMass { .. } => ZsStatus::TailMass,
        Error::CutoffTooSmall { .. } => ZsStatus::CutoffTooSmall,
        Error::ExcludedRegime { .. } => ZsStatus::ExcludedRegime,
        Error::NoOscillation { .. } => ZsStatus::NoOscillation,
        Error::Leakage { .. } => ZsStatus::Leakage,
        Error::Io { .. } | Error::Config { .. } => ZsStatus::Io,
        _ => ZsStatus::InvalidArgument,
    }
}

impl From<Error> for ZsStatus {
    fn from(err: Error) -> Self {
        fail(status_of(&err), err.to_string())
    }
}

/// Runs `f`, mapping panics to `ZsStatus::Panic` and clearing the error slot
/// on success.
fn guard(f: impl FnOnce() -> Result<(), ZsStatus>) -> ZsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            ZsStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(ZsStatus::Panic, "panic inside zeno-scissors"),
    }
}

fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, ZsStatus> {
    // SAFETY: caller guarantees that non-null pointers are valid for reads.
    unsafe { p.as_ref() }.ok_or_else(|| fail(ZsStatus::NullPointer, format!("{what} is NULL")))
}

fn non_null_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, ZsStatus> {
    // SAFETY: caller guarantees that non-null pointers are valid for writes.
    unsafe { p.as_mut() }.ok_or_else(|| fail(ZsStatus::NullPointer, format!("{what} is NULL")))
}

/// Stage geometry. `theta` is the parametric angle of a single stage.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZsStageParams {
    pub n: usize,
    pub stages: usize,
    pub kappa: f64,
    pub theta: f64,
}

impl ZsStageParams {
    fn to_params(self) -> Result<StageParams, ZsStatus> {
        StageParams::new(self.n, self.stages, self.kappa, self.theta).map_err(ZsStatus::from)
    }
}

/// Signal amplitudes `v` (on |0>) and `w` (on |n>) for `m` probe photons.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ZsBlock {
    pub m: usize,
    pub v_re: f64,
    pub v_im: f64,
    pub w_re: f64,
    pub w_im: f64,
    pub delta: f64,
    pub eta: f64,
}

impl From<BlockAmplitudes> for ZsBlock {
    fn from(b: BlockAmplitudes) -> Self {
        Self {
            m: b.m,
            v_re: b.v.re,
            v_im: b.v.im,
            w_re: b.w.re,
            w_im: b.w.im,
            delta: b.delta,
            eta: b.eta,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ZsPhotonStatistics {
    pub mean: f64,
    pub variance: f64,
    /// NaN when `mandel_q_defined` is false (vacuum input).
    pub mandel_q: f64,
    pub mandel_q_defined: bool,
    pub vacuum_weight: f64,
}

/// Opaque probe-mode state.
pub struct ZsProbe {
    state: AmplitudeVector,
}

/// Opaque result of a block-path cascade run.
pub struct ZsCascade {
    result: CascadeResult,
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn zs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn zs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

fn store_probe(kind: ProbeKind, cutoff: usize, out: *mut *mut ZsProbe) -> Result<(), ZsStatus> {
    let slot = non_null_mut(out, "out")?;
    let state = build_state(&ProbeStateSpec::new(kind, cutoff))?;
    *slot = Box::into_raw(Box::new(ZsProbe { state }));
    Ok(())
}

/// Builds a probe from the mini-syntax (`fock:1`, `coherent:1.0`,
/// `squeezed:-0.5,0.853498`, `custom:@FILE`) on `cutoff` levels.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zs_probe_from_spec(spec: *const c_char, cutoff: usize, out: *mut *mut ZsProbe) -> ZsStatus {
    guard(|| {
        non_null(spec, "spec")?;
        // SAFETY: non-null and NUL-terminated per contract.
        let text = unsafe { CStr::from_ptr(spec) }
            .to_str()
            .map_err(|_| fail(ZsStatus::InvalidArgument, "spec is not UTF-8"))?;
        store_probe(parse_probe(text)?, cutoff, out)
    })
}

/// Builds a probe from `len` complex coefficients given as separate real and
/// imaginary arrays. The coefficients are renormalized.
///
/// # Safety
/// `re` and `im` must each hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zs_probe_from_coefficients(
    re: *const f64,
    im: *const f64,
    len: usize,
    cutoff: usize,
    out: *mut *mut ZsProbe,
) -> ZsStatus {
    guard(|| {
        non_null(re, "re")?;
        non_null(im, "im")?;
        // SAFETY: both arrays hold `len` elements per contract.
        let (re, im) = unsafe { (std::slice::from_raw_parts(re, len), std::slice::from_raw_parts(im, len)) };
        let coeffs = re.iter().zip(im).map(|(&r, &i)| C64::new(r, i)).collect();
        store_probe(ProbeKind::Custom(coeffs), cutoff, out)
    })
}

/// Releases a probe. NULL is ignored.
///
/// # Safety
/// `probe` must come from a `zs_probe_from_*` call and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn zs_probe_free(probe: *mut ZsProbe) {
    if !probe.is_null() {
        // SAFETY: allocated by Box::into_raw in store_probe.
        drop(unsafe { Box::from_raw(probe) });
    }
}

/// Number of levels of the probe (0 for NULL).
///
/// # Safety
/// `probe` must be NULL or a live probe handle.
#[no_mangle]
pub unsafe extern "C" fn zs_probe_len(probe: *const ZsProbe) -> usize {
    // SAFETY: NULL or live handle per contract.
    unsafe { probe.as_ref() }.map_or(0, |p| p.state.len())
}

fn copy_complex(src: &AmplitudeVector, re: *mut f64, im: *mut f64, len: usize) -> Result<(), ZsStatus> {
    non_null_mut(re, "re")?;
    non_null_mut(im, "im")?;
    if len < src.len() {
        return Err(fail(
            ZsStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", src.len()),
        ));
    }
    for (k, z) in src.iter().enumerate() {
        // SAFETY: k < src.len() <= len and the buffers hold len doubles.
        unsafe {
            *re.add(k) = z.re;
            *im.add(k) = z.im;
        }
    }
    Ok(())
}

/// Copies the number-basis coefficients into caller buffers of `len` doubles.
///
/// # Safety
/// `probe` must be a live handle; `re`, `im` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn zs_probe_amplitudes(probe: *const ZsProbe, re: *mut f64, im: *mut f64, len: usize) -> ZsStatus {
    guard(|| copy_complex(&non_null(probe, "probe")?.state, re, im, len))
}

/// # Safety
/// `probe` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zs_probe_statistics(probe: *const ZsProbe, out: *mut ZsPhotonStatistics) -> ZsStatus {
    guard(|| {
        let st = photon_statistics(&non_null(probe, "probe")?.state)?;
        *non_null_mut(out, "out")? = ZsPhotonStatistics {
            mean: st.mean,
            variance: st.variance,
            mandel_q: st.mandel_q.unwrap_or(f64::NAN),
            mandel_q_defined: st.mandel_q.is_some(),
            vacuum_weight: st.vacuum_weight,
        };
        Ok(())
    })
}

/// Fills `out` with the design geometry `theta = pi / (2 stages)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zs_stage_params_design(n: usize, stages: usize, kappa: f64, out: *mut ZsStageParams) -> ZsStatus {
    guard(|| {
        let p = StageParams::design(n, stages, kappa)?;
        *non_null_mut(out, "out")? = ZsStageParams {
            n: p.n,
            stages: p.stages,
            kappa: p.kappa,
            theta: p.theta,
        };
        Ok(())
    })
}

/// # Safety
/// `params` must be readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zs_vw_closed_form(params: *const ZsStageParams, m: usize, out: *mut ZsBlock) -> ZsStatus {
    guard(|| {
        let p = non_null(params, "params")?.to_params()?;
        *non_null_mut(out, "out")? = vw_closed_form(&p, m).into();
        Ok(())
    })
}

/// # Safety
/// `params` must be readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zs_vw_asymptotic(params: *const ZsStageParams, m: usize, out: *mut ZsBlock) -> ZsStatus {
    guard(|| {
        let p = non_null(params, "params")?.to_params()?;
        *non_null_mut(out, "out")? = vw_asymptotic(&p, m)?.into();
        Ok(())
    })
}

/// # Safety
/// `params` must be readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zs_oscillation_period(params: *const ZsStageParams, m: usize, out: *mut f64) -> ZsStatus {
    guard(|| {
        let p = non_null(params, "params")?.to_params()?;
        *non_null_mut(out, "out")? = oscillation_period(&p, m)?;
        Ok(())
    })
}

/// `cos^(2 stages)(theta)`.
#[no_mangle]
pub extern "C" fn zs_projective_survival(stages: usize, theta: f64) -> f64 {
    projective_survival(stages, theta)
}

/// Runs the cascade on the closed-form path.
///
/// # Safety
/// `params` readable, `probe` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zs_cascade_run(
    params: *const ZsStageParams,
    probe: *const ZsProbe,
    out: *mut *mut ZsCascade,
) -> ZsStatus {
    guard(|| {
        let p = non_null(params, "params")?.to_params()?;
        let probe = non_null(probe, "probe")?;
        let slot = non_null_mut(out, "out")?;
        let result = run_blocks(&p, &probe.state)?;
        *slot = Box::into_raw(Box::new(ZsCascade { result }));
        Ok(())
    })
}

/// Releases a cascade result. NULL is ignored.
///
/// # Safety
/// `cascade` must come from `zs_cascade_run` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn zs_cascade_free(cascade: *mut ZsCascade) {
    if !cascade.is_null() {
        // SAFETY: allocated by Box::into_raw in zs_cascade_run.
        drop(unsafe { Box::from_raw(cascade) });
    }
}

/// Probability of finding `n` photons in the signal mode (NaN for NULL).
///
/// # Safety
/// `cascade` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn zs_cascade_emission_probability(cascade: *const ZsCascade) -> f64 {
    // SAFETY: NULL or live handle per contract.
    unsafe { cascade.as_ref() }.map_or(f64::NAN, |c| c.result.emission_probability)
}

/// Probability of the post-selected (signal vacuum) branch (NaN for NULL).
///
/// # Safety
/// `cascade` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn zs_cascade_postselect_probability(cascade: *const ZsCascade) -> f64 {
    // SAFETY: NULL or live handle per contract.
    unsafe { cascade.as_ref() }.map_or(f64::NAN, |c| c.result.postselect_probability)
}

/// Fidelity of the post-selected probe with the vacuum-stripped input.
/// Returns `ZS_STATUS_NO_OUTCOME` when the branch never occurs.
///
/// # Safety
/// `cascade` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zs_cascade_truncation_fidelity(cascade: *const ZsCascade, out: *mut f64) -> ZsStatus {
    guard(|| {
        let c = non_null(cascade, "cascade")?;
        let slot = non_null_mut(out, "out")?;
        match c.result.truncation_fidelity() {
            Some(f) => {
                *slot = f;
                Ok(())
            }
            None => Err(fail(ZsStatus::NoOutcome, "post-selected branch has zero probability")),
        }
    })
}

/// Copies the normalized post-selected probe state.
///
/// # Safety
/// `cascade` a live handle; `re`, `im` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn zs_cascade_truncated_state(
    cascade: *const ZsCascade,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> ZsStatus {
    guard(|| {
        let c = non_null(cascade, "cascade")?;
        let state = c
            .result
            .truncated_state()
            .ok_or_else(|| fail(ZsStatus::NoOutcome, "post-selected branch has zero probability"))?;
        copy_complex(state, re, im, len)
    })
}

/// # Safety
/// `cascade` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zs_cascade_block(cascade: *const ZsCascade, m: usize, out: *mut ZsBlock) -> ZsStatus {
    guard(|| {
        let c = non_null(cascade, "cascade")?;
        let block = c
            .result
            .blocks
            .get(m)
            .ok_or_else(|| fail(ZsStatus::InvalidArgument, format!("m = {m} is beyond the probe cutoff")))?;
        *non_null_mut(out, "out")? = (*block).into();
        Ok(())
    })
}

/// Largest amplitude difference between the closed-form path and full
/// two-mode propagation with signal cutoff `a_cutoff`.
///
/// # Safety
/// `params` readable, `probe` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zs_oracle_max_deviation(
    params: *const ZsStageParams,
    probe: *const ZsProbe,
    a_cutoff: usize,
    out: *mut f64,
) -> ZsStatus {
    guard(|| {
        let p = non_null(params, "params")?.to_params()?;
        let probe = non_null(probe, "probe")?;
        let slot = non_null_mut(out, "out")?;
        let oracle = run_oracle(&p, &probe.state, a_cutoff)?;
        let blocks = run_blocks(&p, &probe.state)?.joint_state(a_cutoff)?;
        *slot = oracle
            .state
            .amplitudes()
            .iter()
            .zip(blocks.amplitudes().iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        Ok(())
    })
}
