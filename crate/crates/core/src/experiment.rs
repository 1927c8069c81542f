//! Experiment drivers behind the `zeno-scissors` binary.
//!
//! Every driver returns its CSV as a string; rows are computed in parallel
//! and joined in order, so the same configuration always yields the same
//! bytes.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use crate::analysis::log_log_slope;
use crate::cascade::{default_a_cutoff, run_blocks, run_oracle, truncation_fidelity_sweep, SweepRow};
use crate::error::{Error, Result};
use crate::fock::{hermitian_propagator, unitarity_defect, AmplitudeVector, ModeSpace};
use crate::kernel::{kh_hamiltonian, vw_by_transfer, vw_closed_form, StageParams};
use crate::probe::{build_state, parse_probe, photon_statistics, ProbeKind, ProbeStateSpec, DEFAULT_PROBE_CUTOFF};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const FIG2_N: usize = 2;
pub const FIG2_KAPPA: f64 = 0.2;
pub const FIG2_PROBES: [&str; 3] = ["fock:1", "coherent:1.0", "squeezed:-0.5,0.853498"];
pub const FIG2_MAX_STAGES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Fig2,
    Sweep,
    Verify,
    Truncate,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Fig2 => "fig2",
            Mode::Sweep => "sweep",
            Mode::Verify => "verify",
            Mode::Truncate => "truncate",
        })
    }
}

/// Inclusive stage range `start..=stop` in steps of `step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageRange {
    pub start: usize,
    pub stop: usize,
    pub step: usize,
}

impl StageRange {
    pub fn new(start: usize, stop: usize, step: usize) -> Result<Self> {
        if start == 0 || step == 0 || stop < start {
            return Err(Error::InvalidParams(format!(
                "stage range {start}:{stop}:{step} must satisfy 1 <= start <= stop and step >= 1"
            )));
        }
        Ok(Self { start, stop, step })
    }

    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.stop).step_by(self.step).collect()
    }
}

impl FromStr for StageRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Option<Vec<usize>> = s.split(':').map(|p| p.trim().parse().ok()).collect();
        match parts.as_deref() {
            Some(&[a, b]) => Self::new(a, b, 1),
            Some(&[a, b, c]) => Self::new(a, b, c),
            _ => Err(Error::InvalidParams(format!("stage range `{s}` is not A:B or A:B:S"))),
        }
    }
}

impl fmt::Display for StageRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

/// Values a user may override; every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub n: Option<usize>,
    pub kappa: Option<f64>,
    pub probe: Option<String>,
    #[serde(rename = "N_range", alias = "n_range")]
    pub n_range: Option<String>,
    pub a_cutoff: Option<usize>,
    pub b_cutoff: Option<usize>,
    #[serde(alias = "output")]
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }

    /// Fields set in `self` win over `base`.
    pub fn or(self, base: Overrides) -> Overrides {
        Overrides {
            n: self.n.or(base.n),
            kappa: self.kappa.or(base.kappa),
            probe: self.probe.or(base.probe),
            n_range: self.n_range.or(base.n_range),
            a_cutoff: self.a_cutoff.or(base.a_cutoff),
            b_cutoff: self.b_cutoff.or(base.b_cutoff),
            out: self.out.or(base.out),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub n: usize,
    pub kappa: f64,
    pub probe: String,
    pub stage_range: StageRange,
    pub a_cutoff: usize,
    pub b_cutoff: usize,
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Fills unset values with the per-mode defaults and validates the result.
    pub fn resolve(mode: Mode, o: Overrides) -> Result<Self> {
        let n = o.n.unwrap_or(FIG2_N);
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        let default_range = match mode {
            Mode::Truncate => StageRange::new(25, 800, 25)?,
            _ => StageRange::new(1, FIG2_MAX_STAGES, 1)?,
        };
        let stage_range = match o.n_range {
            Some(s) => s.parse()?,
            None => default_range,
        };
        let a_cutoff = o.a_cutoff.unwrap_or(default_a_cutoff(n));
        if a_cutoff < 2 * n + 2 {
            return Err(Error::CutoffTooSmall {
                required: 2 * n + 2,
                got: a_cutoff,
            });
        }
        let b_cutoff = o.b_cutoff.unwrap_or(DEFAULT_PROBE_CUTOFF);
        ModeSpace::new(b_cutoff)?;
        let kappa = o.kappa.unwrap_or(FIG2_KAPPA);
        if !kappa.is_finite() {
            return Err(Error::InvalidParams(format!("kappa must be finite, got {kappa}")));
        }
        let probe = o.probe.unwrap_or_else(|| "coherent:1.0".to_string());
        // fail on bad syntax before any work starts
        parse_probe(&probe)?;
        Ok(Self {
            mode,
            n,
            kappa,
            probe,
            stage_range,
            a_cutoff,
            b_cutoff,
            output_path: o.out,
        })
    }

    fn header(&self, out: &mut String) {
        let _ = writeln!(out, "# zeno-scissors {VERSION}");
        let _ = writeln!(
            out,
            "# mode={} n={} kappa={} N_range={} a_cutoff={} b_cutoff={}",
            self.mode, self.n, self.kappa, self.stage_range, self.a_cutoff, self.b_cutoff
        );
    }
}

fn probe_state(spec: &str, cutoff: usize) -> Result<(ProbeKind, AmplitudeVector)> {
    let kind = parse_probe(spec)?;
    let state = build_state(&ProbeStateSpec::new(kind.clone(), cutoff))?;
    Ok((kind, state))
}

fn probe_header(out: &mut String, label: &str, state: &AmplitudeVector) -> Result<()> {
    let st = photon_statistics(state)?;
    let q = st.mandel_q.map_or("undefined".to_string(), |q| format!("{q:.6}"));
    let _ = writeln!(
        out,
        "# probe {label}: mean={:.6} variance={:.6} mandel_q={q} vacuum_weight={:.6}",
        st.mean, st.variance, st.vacuum_weight
    );
    Ok(())
}

fn fmt_prob(p: f64) -> String {
    format!("{p:.12e}")
}

fn fmt_fidelity(f: Option<f64>) -> String {
    f.map_or_else(|| "no-outcome".to_string(), fmt_prob)
}

/// Quotes a CSV field that contains a separator or quote.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn emission_rows(label: &str, rows: &[SweepRow], out: &mut String) {
    let label = csv_field(label);
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.stages,
            label,
            fmt_prob(r.emission_probability),
            fmt_prob(r.postselect_probability),
            fmt_fidelity(r.fidelity)
        );
    }
}

/// Emission probability against stage count for the three reference probes.
///
/// Stage count, `n` and `kappa` come from the config (defaults `1:200`,
/// `2`, `0.2`); the probe list is fixed.
pub fn cmd_fig2(config: &ExperimentConfig) -> Result<String> {
    let stages = config.stage_range.values();
    let probes: Vec<(String, AmplitudeVector)> = FIG2_PROBES
        .iter()
        .map(|spec| probe_state(spec, config.b_cutoff).map(|(_, s)| (spec.to_string(), s)))
        .collect::<Result<_>>()?;
    let curves: Vec<Vec<SweepRow>> = probes
        .par_iter()
        .map(|(_, state)| truncation_fidelity_sweep(config.n, config.kappa, state, &stages))
        .collect::<Result<_>>()?;

    let mut out = String::new();
    config.header(&mut out);
    for (label, state) in &probes {
        probe_header(&mut out, label, state)?;
    }
    out.push_str("N,probe,P_n,P_postselect,fidelity\n");
    // N-major ordering: one row per (N, probe)
    for (i, _) in stages.iter().enumerate() {
        for ((label, _), curve) in probes.iter().zip(&curves) {
            emission_rows(label, &curve[i..=i], &mut out);
        }
    }
    Ok(out)
}

/// Emission sweep for the configured probe.
pub fn cmd_sweep(config: &ExperimentConfig) -> Result<String> {
    let (_, state) = probe_state(&config.probe, config.b_cutoff)?;
    let rows = truncation_fidelity_sweep(config.n, config.kappa, &state, &config.stage_range.values())?;
    let mut out = String::new();
    config.header(&mut out);
    probe_header(&mut out, &config.probe, &state)?;
    out.push_str("N,probe,P_n,P_postselect,fidelity\n");
    emission_rows(&config.probe, &rows, &mut out);
    Ok(out)
}

/// Post-selection probability and fidelity with the vacuum-stripped probe.
pub fn cmd_truncate(config: &ExperimentConfig) -> Result<String> {
    let (_, state) = probe_state(&config.probe, config.b_cutoff)?;
    if crate::probe::strip_vacuum(&state).all_vacuum {
        return Err(Error::InvalidParams(format!(
            "probe `{}` is pure vacuum: the post-selected branch never occurs (no outcome)",
            config.probe
        )));
    }
    let rows = truncation_fidelity_sweep(config.n, config.kappa, &state, &config.stage_range.values())?;
    let mut out = String::new();
    config.header(&mut out);
    probe_header(&mut out, &config.probe, &state)?;
    out.push_str("N,P_postselect,fidelity,one_minus_F\n");
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for r in &rows {
        let one_minus = r.fidelity.map(|f| 1.0 - f);
        if let Some(d) = one_minus {
            xs.push(r.stages as f64);
            ys.push(d);
        }
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.stages,
            fmt_prob(r.postselect_probability),
            fmt_fidelity(r.fidelity),
            fmt_fidelity(one_minus)
        );
    }
    match log_log_slope(&xs, &ys) {
        Some(s) => {
            let _ = writeln!(out, "# slope_log_one_minus_F_vs_log_N={s:.6}");
        }
        None => out.push_str("# slope_log_one_minus_F_vs_log_N=undefined\n"),
    }
    Ok(out)
}

/// Test hooks for the verification run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerifyHooks {
    /// Added to `kappa` on the closed-form path only.
    pub kappa_corruption: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
    /// Parameter tuple where `max_deviation` was reached.
    pub worst_case: String,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# zeno-scissors {VERSION} verify");
        out.push_str("check,max_deviation,tolerance,status,worst_case\n");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{},{:.3e},{:.0e},{},{}",
                c.name,
                c.max_deviation,
                c.tolerance,
                if c.passed() { "pass" } else { "FAIL" },
                c.worst_case
            );
        }
        let _ = writeln!(out, "# overall={}", if self.passed() { "pass" } else { "FAIL" });
        out
    }
}

pub const VERIFY_NS: [usize; 3] = [1, 2, 3];
pub const VERIFY_STAGES: [usize; 6] = [1, 2, 4, 8, 16, 32];
pub const VERIFY_KAPPAS: [f64; 2] = [0.2, 1.0];
pub const VERIFY_PROBES: [&str; 3] = ["fock:1", "fock:3", "coherent:1.0"];

struct Tracker {
    name: &'static str,
    tolerance: f64,
    max: f64,
    worst: String,
}

impl Tracker {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            max: 0.0,
            worst: "-".into(),
        }
    }

    fn record(&mut self, value: f64, case: &str) {
        // NaN must surface as a failure
        if value > self.max || value.is_nan() {
            self.max = if value.is_nan() { f64::INFINITY } else { value };
            self.worst = case.to_string();
        }
    }

    fn merge(&mut self, other: Tracker) {
        if other.max > self.max {
            self.max = other.max;
            self.worst = other.worst;
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name,
            max_deviation: self.max,
            tolerance: self.tolerance,
            worst_case: self.worst,
        }
    }
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn verify_case(
    n: usize,
    stages: usize,
    kappa: f64,
    probe_spec: &str,
    probe: &AmplitudeVector,
    hooks: VerifyHooks,
) -> Result<Vec<Tracker>> {
    let case = format!("n={n} N={stages} kappa={kappa} probe={probe_spec}");
    let a_cutoff = default_a_cutoff(n);
    let params = StageParams::design(n, stages, kappa)?;
    let corrupted = StageParams::design(n, stages, kappa + hooks.kappa_corruption)?;

    let mut t_paths = Tracker::new("closed_form_vs_oracle", 1e-9);
    let mut t_transfer = Tracker::new("closed_form_vs_transfer", 1e-12);
    let mut t_unitary = Tracker::new("unitarity", 1e-10);
    let mut t_norm = Tracker::new("norm_preservation", 1e-10);
    let mut t_marg = Tracker::new("probe_marginal", 1e-10);
    let mut t_block = Tracker::new("block_unitarity", 1e-12);
    let mut t_closure = Tracker::new("probability_closure", 1e-10);
    let mut t_leak = Tracker::new("leakage", crate::cascade::LEAKAGE_TOL);

    let space_a = ModeSpace::new(a_cutoff)?;
    let u_kh = hermitian_propagator(&kh_hamiltonian(n, 1.0, space_a)?, params.theta)?;
    t_unitary.record(unitarity_defect(&u_kh), &case);

    let oracle = match run_oracle(&params, probe, a_cutoff) {
        Ok(run) => run,
        Err(Error::Leakage { leakage, .. }) => {
            t_leak.record(leakage, &case);
            return Ok(vec![t_leak]);
        }
        Err(e) => return Err(e),
    };
    t_leak.record(oracle.max_leakage, &case);
    t_norm.record((oracle.state.norm_sqr() - 1.0).abs(), &case);

    let blocks = run_blocks(&corrupted, probe)?;
    let joint = blocks.joint_state(a_cutoff)?;
    let dev = oracle
        .state
        .amplitudes()
        .iter()
        .zip(joint.amplitudes().iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    t_paths.record(dev, &case);

    let input: Vec<f64> = probe.iter().map(|z| z.norm_sqr()).collect();
    t_marg.record(max_dev(&oracle.state.b_marginal(), &input), &case);
    t_marg.record(max_dev(&joint.b_marginal(), &input), &case);

    for b in &blocks.blocks {
        t_block.record((b.norm_sqr() - 1.0).abs(), &case);
        let (v, w) = vw_by_transfer(&corrupted, b.m);
        let exact = vw_closed_form(&corrupted, b.m);
        t_transfer.record((v - exact.v).norm().max((w - exact.w).norm()), &case);
    }
    t_closure.record(
        (blocks.emission_probability + blocks.postselect_probability - 1.0).abs(),
        &case,
    );
    Ok(vec![
        t_paths, t_transfer, t_unitary, t_norm, t_marg, t_block, t_closure, t_leak,
    ])
}

/// Cross-checks the closed-form path against full-space propagation over the
/// reference grid, along with the conservation laws both must obey.
pub fn cmd_verify(config: &ExperimentConfig, hooks: VerifyHooks) -> Result<VerifyReport> {
    let probes: Vec<(&str, AmplitudeVector)> = VERIFY_PROBES
        .iter()
        .map(|spec| probe_state(spec, config.b_cutoff).map(|(_, s)| (*spec, s)))
        .collect::<Result<_>>()?;
    let mut grid = Vec::new();
    for &n in &VERIFY_NS {
        for &stages in &VERIFY_STAGES {
            for &kappa in &VERIFY_KAPPAS {
                for (spec, state) in &probes {
                    grid.push((n, stages, kappa, *spec, state));
                }
            }
        }
    }
    let per_case: Vec<Vec<Tracker>> = grid
        .par_iter()
        .map(|(n, stages, kappa, spec, state)| verify_case(*n, *stages, *kappa, spec, state, hooks))
        .collect::<Result<_>>()?;

    let mut totals: Vec<Tracker> = Vec::new();
    for trackers in per_case {
        for t in trackers {
            match totals.iter_mut().find(|x| x.name == t.name) {
                Some(acc) => acc.merge(t),
                None => totals.push(t),
            }
        }
    }
    Ok(VerifyReport {
        checks: totals.into_iter().map(Tracker::finish).collect(),
    })
}

/// Writes `text` to `path`, or stdout when no path is given.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(mode: Mode, o: Overrides) -> ExperimentConfig {
        ExperimentConfig::resolve(mode, o).unwrap()
    }

    #[test]
    fn stage_range_parsing() {
        assert_eq!("1:200".parse::<StageRange>().unwrap().values().len(), 200);
        assert_eq!("25:800:25".parse::<StageRange>().unwrap().values().last(), Some(&800));
        for bad in ["0:5", "5:1", "1:5:0", "abc", "1"] {
            assert!(bad.parse::<StageRange>().is_err(), "{bad}");
        }
    }

    #[test]
    fn flags_win_over_file() {
        let file = Overrides {
            n: Some(3),
            kappa: Some(0.5),
            ..Default::default()
        };
        let flags = Overrides {
            kappa: Some(0.7),
            ..Default::default()
        };
        let merged = flags.or(file);
        assert_eq!((merged.n, merged.kappa), (Some(3), Some(0.7)));
    }

    #[test]
    fn config_file_parses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "n = 3\nkappa = 1.0\nprobe = \"fock:1\"\nN_range = \"1:10\"\n").unwrap();
        let o = Overrides::from_file(&path).unwrap();
        assert_eq!(o.n, Some(3));
        assert_eq!(o.n_range.as_deref(), Some("1:10"));
        fs::write(&path, "bogus = 1\n").unwrap();
        assert!(matches!(Overrides::from_file(&path), Err(Error::Config { .. })));
    }

    #[test]
    fn resolve_rejects_bad_values() {
        let bad_probe = Overrides {
            probe: Some("fock".into()),
            ..Default::default()
        };
        assert!(matches!(
            ExperimentConfig::resolve(Mode::Sweep, bad_probe),
            Err(Error::ProbeSyntax { .. })
        ));
        let small = Overrides {
            a_cutoff: Some(4),
            ..Default::default()
        };
        assert!(matches!(
            ExperimentConfig::resolve(Mode::Sweep, small),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn fig2_has_one_row_per_stage_and_probe() {
        let c = config(
            Mode::Fig2,
            Overrides {
                n_range: Some("1:5".into()),
                ..Default::default()
            },
        );
        let csv = cmd_fig2(&c).unwrap();
        let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "N,probe,P_n,P_postselect,fidelity");
        assert_eq!(rows.len(), 1 + 5 * 3);
        assert!(rows[1].starts_with("1,fock:1,"));
        assert!(rows[3].starts_with("1,\"squeezed:-0.5,0.853498\","));
        assert!(rows[1].ends_with("no-outcome"));
        assert!(csv.contains("# mode=fig2 n=2 kappa=0.2"));
    }

    #[test]
    fn truncate_rejects_vacuum() {
        let c = config(
            Mode::Truncate,
            Overrides {
                probe: Some("fock:0".into()),
                ..Default::default()
            },
        );
        assert!(matches!(cmd_truncate(&c), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn verify_detects_kappa_corruption() {
        let c = config(Mode::Verify, Overrides::default());
        let report = cmd_verify(
            &c,
            VerifyHooks {
                kappa_corruption: 1e-3,
            },
        )
        .unwrap();
        assert!(!report.passed());
        let paths = report.checks.iter().find(|c| c.name == "closed_form_vs_oracle").unwrap();
        assert!(!paths.passed());
        assert!(paths.worst_case.contains("kappa="));
        assert!(report.render().contains("FAIL"));
    }
}
