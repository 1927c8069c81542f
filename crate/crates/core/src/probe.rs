//! Probe-mode states in the number basis and their photon statistics.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fock::{hermitian_propagator, ladder_ops, norm_sqr, AmplitudeVector, ComplexMatrix, ModeSpace, C64};

pub const DEFAULT_PROBE_CUTOFF: usize = 40;

/// Largest probability allowed to fall beyond the cutoff.
pub const TAIL_TOL: f64 = 1e-10;

/// Custom inputs whose norm is further than this from 1 are flagged.
const CUSTOM_NORM_WARN: f64 = 1e-6;

/// Extra levels used when building squeezed states, so that the truncated
/// exponentials are exact on the kept levels.
const SQUEEZE_PADDING: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub enum ProbeKind {
    Fock(usize),
    Coherent(C64),
    /// `D(alpha) S(eps) |0>` with `S(eps) = exp(eps* b^2 / 2 - eps b^dag^2 / 2)`.
    PhaseSqueezed { eps: C64, alpha: C64 },
    Custom(Vec<C64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeStateSpec {
    pub kind: ProbeKind,
    pub cutoff: usize,
}

impl ProbeStateSpec {
    pub fn new(kind: ProbeKind, cutoff: usize) -> Self {
        Self { kind, cutoff }
    }

    pub fn with_default_cutoff(kind: ProbeKind) -> Self {
        Self::new(kind, DEFAULT_PROBE_CUTOFF)
    }
}

fn fmt_complex(f: &mut fmt::Formatter<'_>, z: C64) -> fmt::Result {
    if z.im == 0.0 {
        write!(f, "{}", z.re)
    } else {
        write!(f, "{},{}", z.re, z.im)
    }
}

impl fmt::Display for ProbeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeKind::Fock(m) => write!(f, "fock:{m}"),
            ProbeKind::Coherent(a) => {
                write!(f, "coherent:")?;
                fmt_complex(f, *a)
            }
            ProbeKind::PhaseSqueezed { eps, alpha } => {
                if eps.im == 0.0 && alpha.im == 0.0 {
                    write!(f, "squeezed:{},{}", eps.re, alpha.re)
                } else {
                    write!(f, "squeezed:{},{},{},{}", eps.re, eps.im, alpha.re, alpha.im)
                }
            }
            ProbeKind::Custom(c) => write!(f, "custom:[{} coefficients]", c.len()),
        }
    }
}

fn syntax(input: &str, reason: impl Into<String>) -> Error {
    Error::ProbeSyntax {
        input: input.to_string(),
        reason: reason.into(),
    }
}

fn parse_reals(input: &str, body: &str) -> Result<Vec<f64>> {
    body.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| syntax(input, format!("`{tok}` is not a finite number")))
        })
        .collect()
}

/// Reads one `re im` pair per line. Blank lines and `#` comments are skipped.
pub fn read_coefficients(path: &Path) -> Result<Vec<C64>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let shown = format!("custom:@{}", path.display());
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|t| t.parse().ok()).collect();
        match parsed.as_deref() {
            Some(&[re, im]) if re.is_finite() && im.is_finite() => out.push(C64::new(re, im)),
            _ => {
                return Err(syntax(
                    &shown,
                    format!("line {}: expected `re im`, got `{line}`", lineno + 1),
                ))
            }
        }
    }
    if out.is_empty() {
        return Err(syntax(&shown, "file holds no coefficients"));
    }
    Ok(out)
}

/// Parses the probe mini-syntax. `custom:@FILE` reads the file immediately.
pub fn parse_probe(input: &str) -> Result<ProbeKind> {
    let (tag, body) = input
        .trim()
        .split_once(':')
        .ok_or_else(|| syntax(input, "missing `kind:` prefix"))?;
    match tag {
        "fock" => body
            .trim()
            .parse::<usize>()
            .map(ProbeKind::Fock)
            .map_err(|_| syntax(input, "photon number must be a nonnegative integer")),
        "coherent" => match parse_reals(input, body)?[..] {
            [re] => Ok(ProbeKind::Coherent(C64::new(re, 0.0))),
            [re, im] => Ok(ProbeKind::Coherent(C64::new(re, im))),
            _ => Err(syntax(input, "coherent takes 1 or 2 numbers")),
        },
        "squeezed" => match parse_reals(input, body)?[..] {
            [eps, alpha] => Ok(ProbeKind::PhaseSqueezed {
                eps: C64::new(eps, 0.0),
                alpha: C64::new(alpha, 0.0),
            }),
            [er, ei, ar, ai] => Ok(ProbeKind::PhaseSqueezed {
                eps: C64::new(er, ei),
                alpha: C64::new(ar, ai),
            }),
            _ => Err(syntax(input, "squeezed takes 2 or 4 numbers")),
        },
        "custom" => {
            let path = body
                .trim()
                .strip_prefix('@')
                .ok_or_else(|| syntax(input, "custom expects `@FILE`"))?;
            read_coefficients(Path::new(path)).map(ProbeKind::Custom)
        }
        other => Err(syntax(input, format!("unknown probe kind `{other}`"))),
    }
}

impl FromStr for ProbeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_probe(s)
    }
}

/// Smallest cutoff leaving at most `TAIL_TOL` beyond it, given the weights of
/// a longer expansion.
fn cutoff_for_tail(weights: &[f64]) -> usize {
    let mut tail: f64 = weights.iter().sum::<f64>();
    for (k, w) in weights.iter().enumerate() {
        if tail <= TAIL_TOL {
            return k.max(2);
        }
        tail -= w;
    }
    weights.len()
}

fn check_tail(full: &[C64], cutoff: usize) -> Result<()> {
    let weights: Vec<f64> = full.iter().map(|z| z.norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    let tail: f64 = weights[cutoff.min(weights.len())..].iter().sum::<f64>() / total;
    if tail > TAIL_TOL {
        let suggested = cutoff_for_tail(&weights).max(cutoff + 1);
        return Err(Error::TailMass {
            tail,
            cutoff,
            suggested,
        });
    }
    Ok(())
}

fn coherent_coefficients(alpha: C64, len: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(len);
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for m in 0..len {
        if m > 0 {
            c = c * alpha / (m as f64).sqrt();
        }
        out.push(c);
    }
    out
}

/// `exp(G)` for anti-Hermitian `G`, as the propagator of the Hermitian `-iG`.
fn exp_anti_hermitian(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    hermitian_propagator(&g.map(|z| -C64::i() * z), 1.0)
}

fn squeezed_coefficients(eps: C64, alpha: C64, len: usize) -> Result<Vec<C64>> {
    let space = ModeSpace::new(len)?;
    let ops = ladder_ops(space);
    let b2 = &ops.annihilation * &ops.annihilation;
    let bd2 = &ops.creation * &ops.creation;
    let squeeze_gen = b2.scale(0.5).map(|z| z * eps.conj()) - bd2.map(|z| z * eps * 0.5);
    let displace_gen = ops.creation.map(|z| z * alpha) - ops.annihilation.map(|z| z * alpha.conj());
    let squeeze = exp_anti_hermitian(&squeeze_gen)?;
    let displace = exp_anti_hermitian(&displace_gen)?;
    let state = displace * (squeeze * space.vacuum());
    Ok(state.iter().copied().collect())
}

fn into_state(mut coeffs: Vec<C64>, cutoff: usize) -> Result<AmplitudeVector> {
    coeffs.resize(cutoff, C64::new(0.0, 0.0));
    crate::fock::normalize(&AmplitudeVector::from_vec(coeffs))
}

/// Number-basis coefficients of the probe, normalized on `spec.cutoff` levels.
pub fn build_state(spec: &ProbeStateSpec) -> Result<AmplitudeVector> {
    let cutoff = ModeSpace::new(spec.cutoff)?.cutoff();
    match &spec.kind {
        ProbeKind::Fock(m) => ModeSpace::new(cutoff)?.fock(*m),
        ProbeKind::Coherent(alpha) => {
            // long enough for the Poisson tail to be resolved in f64
            let len = cutoff.max((4.0 * alpha.norm_sqr()) as usize + 64);
            let full = coherent_coefficients(*alpha, len);
            check_tail(&full, cutoff)?;
            into_state(full, cutoff)
        }
        ProbeKind::PhaseSqueezed { eps, alpha } => {
            let len = 2 * cutoff + SQUEEZE_PADDING;
            let full = squeezed_coefficients(*eps, *alpha, len)?;
            check_tail(&full, cutoff)?;
            into_state(full, cutoff)
        }
        ProbeKind::Custom(coeffs) => {
            let norm = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                return Err(Error::ZeroNorm);
            }
            if (norm - 1.0).abs() > CUSTOM_NORM_WARN {
                log::warn!("custom probe coefficients have norm {norm:.9}; renormalizing");
            }
            check_tail(coeffs, cutoff)?;
            into_state(coeffs.clone(), cutoff)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonStatistics {
    pub mean: f64,
    pub variance: f64,
    /// `(variance - mean) / mean`; `None` for the vacuum.
    pub mandel_q: Option<f64>,
    pub vacuum_weight: f64,
}

pub fn photon_statistics(state: &AmplitudeVector) -> Result<PhotonStatistics> {
    let total = norm_sqr(state);
    if total == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let probs: Vec<f64> = state.iter().map(|z| z.norm_sqr() / total).collect();
    let mean: f64 = probs.iter().enumerate().map(|(m, p)| m as f64 * p).sum();
    let variance = probs
        .iter()
        .enumerate()
        .map(|(m, p)| (m as f64 - mean).powi(2) * p)
        .sum::<f64>();
    let mandel_q = (mean > 0.0).then(|| (variance - mean) / mean);
    Ok(PhotonStatistics {
        mean,
        variance,
        mandel_q,
        vacuum_weight: probs[0],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrippedProbe {
    /// `|Phi> - alpha_0 |0>`, not renormalized.
    pub stripped: AmplitudeVector,
    pub alpha0: C64,
    /// Set when nothing is left after removing the vacuum.
    pub all_vacuum: bool,
}

pub fn strip_vacuum(state: &AmplitudeVector) -> StrippedProbe {
    let mut stripped = state.clone();
    let alpha0 = stripped[0];
    stripped[0] = C64::new(0.0, 0.0);
    let all_vacuum = stripped.iter().all(|z| *z == C64::new(0.0, 0.0));
    StrippedProbe {
        stripped,
        alpha0,
        all_vacuum,
    }
}
