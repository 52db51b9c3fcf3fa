//! Job configuration, run orchestration and structured output for the
//! command-line interface.

use crate::amplitude::{
    self, AmplitudeError, IntegrationMode, IntegrationSettings, NondipoleFlags, ScatteringConfig,
};
use crate::analysis::{self, SpectrogramConfig};
use crate::classical::{self, StepControl};
use crate::nordsieck::{self, NordsieckArgs};
use crate::pulse::{flat_top_cep, PulseShape, PulseSpec};
use crate::units::C_AU;
use crate::vec3::Vec3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<AmplitudeError> for CliError {
    fn from(e: AmplitudeError) -> Self {
        match e {
            AmplitudeError::Invalid(_) => CliError::Config(e.to_string()),
            AmplitudeError::Point { index, source } => {
                CliError::Numerical(format!("grid index {index}: {source}"))
            }
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunKind {
    Spectrum,
    AngularMap,
    Spectrogram,
    Saddle,
    ClassicalCheck,
    PulsePreview,
    ValidateKernels,
}

impl RunKind {
    pub fn name(&self) -> &'static str {
        match self {
            RunKind::Spectrum => "spectrum",
            RunKind::AngularMap => "angular-map",
            RunKind::Spectrogram => "spectrogram",
            RunKind::Saddle => "saddle",
            RunKind::ClassicalCheck => "classical-check",
            RunKind::PulsePreview => "pulse-preview",
            RunKind::ValidateKernels => "validate-kernels",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagsInput {
    #[serde(default = "yes")]
    pub recoil: bool,
    #[serde(default = "yes")]
    pub retardation: bool,
    #[serde(default = "yes")]
    pub gauge: bool,
    #[serde(default = "yes")]
    pub photon_momentum: bool,
}

fn yes() -> bool {
    true
}

impl Default for FlagsInput {
    fn default() -> Self {
        FlagsInput { recoil: true, retardation: true, gauge: true, photon_momentum: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringInput {
    pub z: f64,
    pub p_mag: f64,
    pub theta_p: f64,
    pub phi_p: f64,
    pub dp: f64,
    #[serde(default = "ez")]
    pub n_k: [f64; 3],
    #[serde(default = "ex")]
    pub eps_k: [f64; 3],
    #[serde(default)]
    pub flags: FlagsInput,
}

fn ez() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

fn ex() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseShapeInput {
    FieldSine2,
    ChirpF1,
    ChirpF2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseInput {
    pub shape: PulseShapeInput,
    pub omega: f64,
    pub amplitude: f64,
    pub n_osc: u32,
    #[serde(default)]
    pub eta0: f64,
    #[serde(default)]
    pub n_c: u32,
    #[serde(default)]
    pub chi: f64,
    /// When set, `chi` is ignored and replaced by the carrier-envelope phase
    /// that centers the vector-potential maximum (flat-top construction).
    #[serde(default)]
    pub flat_top_cep: bool,
    #[serde(default = "ez")]
    pub n_prop: [f64; 3],
    #[serde(default = "ex")]
    pub eps_pol: [f64; 3],
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridInput {
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub omega_points: Option<usize>,
    pub theta_min: Option<f64>,
    pub theta_max: Option<f64>,
    pub theta_points: Option<usize>,
    pub t_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeInput {
    Adaptive,
    Fast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationInput {
    #[serde(default = "default_mode")]
    pub mode: ModeInput,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
    #[serde(default = "default_ppc")]
    pub points_per_cycle: usize,
}

fn default_mode() -> ModeInput {
    ModeInput::Adaptive
}

fn default_rtol() -> f64 {
    1e-8
}

fn default_atol() -> f64 {
    1e-12
}

fn default_ppc() -> usize {
    400
}

impl Default for IntegrationInput {
    fn default() -> Self {
        IntegrationInput {
            mode: default_mode(),
            rtol: default_rtol(),
            atol: default_atol(),
            points_per_cycle: default_ppc(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrogramInput {
    #[serde(default = "default_xi_t")]
    pub xi_t: f64,
    #[serde(default = "default_xi_w")]
    pub xi_w: f64,
    /// Window edges relative to the field-free line (E0).
    pub omega1: f64,
    pub omega2: f64,
    #[serde(default = "default_sg_points")]
    pub t_points: usize,
    #[serde(default = "default_sg_points")]
    pub omega_k_points: usize,
}

fn default_xi_t() -> f64 {
    0.1
}

fn default_xi_w() -> f64 {
    0.03
}

fn default_sg_points() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalInput {
    #[serde(default = "default_c_scales")]
    pub c_scales: Vec<f64>,
    #[serde(default)]
    pub r0: [f64; 3],
    #[serde(default = "default_classical_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
}

fn default_c_scales() -> Vec<f64> {
    vec![1.0, 2.0, 4.0]
}

fn default_classical_rtol() -> f64 {
    1e-10
}

impl Default for ClassicalInput {
    fn default() -> Self {
        ClassicalInput {
            c_scales: default_c_scales(),
            r0: [0.0; 3],
            rtol: default_classical_rtol(),
            atol: default_atol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelCheckInput {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_oracle_count")]
    pub oracle_count: usize,
    #[serde(default = "default_fd_count")]
    pub fd_count: usize,
    #[serde(default = "default_tol_f")]
    pub tol_f: f64,
    #[serde(default = "default_tol_b")]
    pub tol_b: f64,
    #[serde(default = "default_tol_c")]
    pub tol_c: f64,
}

fn default_seed() -> u64 {
    1
}

fn default_oracle_count() -> usize {
    50
}

fn default_fd_count() -> usize {
    200
}

fn default_tol_f() -> f64 {
    1e-4
}

fn default_tol_b() -> f64 {
    1e-6
}

fn default_tol_c() -> f64 {
    1e-4
}

impl Default for KernelCheckInput {
    fn default() -> Self {
        KernelCheckInput {
            seed: default_seed(),
            oracle_count: default_oracle_count(),
            fd_count: default_fd_count(),
            tol_f: default_tol_f(),
            tol_b: default_tol_b(),
            tol_c: default_tol_c(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub run: RunKind,
    pub scattering: ScatteringInput,
    pub pulse: PulseInput,
    #[serde(default)]
    pub grid: GridInput,
    #[serde(default)]
    pub integration: IntegrationInput,
    #[serde(default)]
    pub spectrogram: Option<SpectrogramInput>,
    #[serde(default)]
    pub classical: Option<ClassicalInput>,
    #[serde(default)]
    pub kernels: Option<KernelCheckInput>,
    /// Worker-pool size; 0 means all available cores.
    #[serde(default)]
    pub workers: usize,
    /// File-name stem for all artifacts; defaults to the run kind.
    #[serde(default)]
    pub label: Option<String>,
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn stem(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.run.name().to_string())
    }

    pub fn pulse_spec(&self) -> Result<PulseSpec, CliError> {
        let p = &self.pulse;
        let shape = match p.shape {
            PulseShapeInput::FieldSine2 => PulseShape::FieldSine2,
            PulseShapeInput::ChirpF1 => PulseShape::ChirpF1,
            PulseShapeInput::ChirpF2 => PulseShape::ChirpF2,
        };
        let chi = if p.flat_top_cep { flat_top_cep(p.n_osc, p.eta0) } else { p.chi };
        PulseSpec::new(
            shape,
            p.omega,
            p.amplitude,
            p.n_osc,
            p.eta0,
            p.n_c,
            chi,
            vec(p.n_prop),
            vec(p.eps_pol),
        )
        .map_err(|e| CliError::Config(format!("pulse: {e}")))
    }

    pub fn scattering_config(&self) -> Result<ScatteringConfig, CliError> {
        let s = &self.scattering;
        let flags = NondipoleFlags {
            recoil: s.flags.recoil,
            retardation: s.flags.retardation,
            gauge: s.flags.gauge,
            photon_momentum: s.flags.photon_momentum,
        };
        ScatteringConfig::new(
            s.z,
            s.p_mag,
            s.theta_p,
            s.phi_p,
            s.dp,
            self.pulse_spec()?,
            vec(s.n_k),
            vec(s.eps_k),
            flags,
        )
        .map_err(|e| CliError::Config(format!("scattering: {e}")))
    }

    pub fn integration_settings(&self) -> IntegrationSettings {
        IntegrationSettings {
            mode: match self.integration.mode {
                ModeInput::Adaptive => IntegrationMode::Adaptive,
                ModeInput::Fast => IntegrationMode::Fast,
            },
            rtol: self.integration.rtol,
            atol: self.integration.atol,
            points_per_cycle: self.integration.points_per_cycle,
        }
    }

    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        let mut hex = String::new();
        for b in digest {
            write!(hex, "{b:02x}").unwrap();
        }
        hex
    }
}

fn vec(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn omega_grid(grid: &GridInput) -> Result<Vec<f64>, CliError> {
    let lo = grid.omega_min.ok_or_else(|| CliError::Config("grid.omega_min missing".into()))?;
    let hi = grid.omega_max.ok_or_else(|| CliError::Config("grid.omega_max missing".into()))?;
    let n = grid.omega_points.ok_or_else(|| CliError::Config("grid.omega_points missing".into()))?;
    if n < 2 || !(lo < hi) {
        return Err(CliError::Config("omega grid needs omega_min < omega_max and >= 2 points".into()));
    }
    Ok(linspace(lo, hi, n))
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// Run one job, writing all artifacts under `out_dir`. `workers` overrides
/// the config's worker count when Some.
pub fn run(job: &JobConfig, out_dir: &Path, workers: Option<usize>) -> Result<(), CliError> {
    let started = Instant::now();
    fs::create_dir_all(out_dir)?;
    let threads = workers.unwrap_or(job.workers);
    let body = || match job.run {
        RunKind::Spectrum => run_spectrum(job, out_dir),
        RunKind::AngularMap => run_angular_map(job, out_dir),
        RunKind::Spectrogram => run_spectrogram(job, out_dir),
        RunKind::Saddle => run_saddle(job, out_dir),
        RunKind::ClassicalCheck => run_classical(job, out_dir),
        RunKind::PulsePreview => run_pulse_preview(job, out_dir),
        RunKind::ValidateKernels => run_validate_kernels(job, out_dir),
    };
    if threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
        pool.install(body)?;
    } else {
        body()?;
    }
    write_sidecar(job, out_dir, started.elapsed().as_secs_f64())
}

fn write_sidecar(job: &JobConfig, out_dir: &Path, wall_time_s: f64) -> Result<(), CliError> {
    let timestamp =
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let sidecar = serde_json::json!({
        "config_hash": job.hash(),
        "version": env!("CARGO_PKG_VERSION"),
        "run": job.run.name(),
        "tolerances": {
            "mode": match job.integration.mode { ModeInput::Adaptive => "adaptive", ModeInput::Fast => "fast" },
            "rtol": job.integration.rtol,
            "atol": job.integration.atol,
            "points_per_cycle": job.integration.points_per_cycle,
        },
        "timing": { "wall_time_s": wall_time_s, "timestamp_unix": timestamp },
        "config": job,
    });
    let path = out_dir.join(format!("{}.meta.json", job.stem()));
    fs::write(&path, serde_json::to_string_pretty(&sidecar).unwrap())?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)?;
    Ok(())
}

fn averaged_signal(
    config: &ScatteringConfig,
    result: &amplitude::SpectrumResult,
) -> Result<Vec<Complex64>, CliError> {
    let parts = result.parts.as_ref().expect("scan keeps parts");
    result
        .omega_grid
        .iter()
        .zip(parts.iter())
        .map(|(&omega, part)| {
            let (avg_delta, avg_pv) = amplitude::averaged_distributions(config, omega)?;
            Ok(part.r0 * avg_delta + part.r1 * avg_pv + part.r2)
        })
        .collect()
}

fn spectrum_csv(
    config: &ScatteringConfig,
    result: &amplitude::SpectrumResult,
    job: &JobConfig,
) -> Result<String, CliError> {
    let signal = averaged_signal(config, result)?;
    let parts = result.parts.as_ref().unwrap();
    let mut s = String::new();
    push_meta(&mut s, job);
    s.push_str("# units: omega_k in E0, d3e in atomic units, r in a0^2 t0\n");
    s.push_str("# columns: omega_k,d3e,re_r_avg,im_r_avg,q_mismatch\n");
    for i in 0..result.omega_grid.len() {
        writeln!(
            s,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            result.omega_grid[i], result.d3e[i], signal[i].re, signal[i].im, parts[i].q
        )
        .unwrap();
    }
    Ok(s)
}

fn push_meta(s: &mut String, job: &JobConfig) {
    writeln!(s, "# run: {}", job.run.name()).unwrap();
    writeln!(s, "# config_hash: {}", job.hash()).unwrap();
    writeln!(s, "# version: {}", env!("CARGO_PKG_VERSION")).unwrap();
}

fn run_spectrum(job: &JobConfig, out_dir: &Path) -> Result<(), CliError> {
    let config = job.scattering_config()?;
    let grid = omega_grid(&job.grid)?;
    let settings = job.integration_settings();
    let result = amplitude::scan_spectrum(&config, &grid, &settings)?;
    let stem = job.stem();
    let csv = format!("{stem}_spectrum.csv");
    write_text(&out_dir.join(&csv), &spectrum_csv(&config, &result, job)?)?;
    write_text(&out_dir.join(format!("{stem}_plot.py")), &spectrum_plot(&csv))?;
    println!("spectrum: {} points -> {}", grid.len(), out_dir.join(csv).display());
    Ok(())
}

fn run_angular_map(job: &JobConfig, out_dir: &Path) -> Result<(), CliError> {
    let config = job.scattering_config()?;
    let grid = omega_grid(&job.grid)?;
    let t_lo = job.grid.theta_min.ok_or_else(|| CliError::Config("grid.theta_min missing".into()))?;
    let t_hi = job.grid.theta_max.ok_or_else(|| CliError::Config("grid.theta_max missing".into()))?;
    let t_n =
        job.grid.theta_points.ok_or_else(|| CliError::Config("grid.theta_points missing".into()))?;
    if t_n < 2 || !(t_lo < t_hi) {
        return Err(CliError::Config("theta grid needs theta_min < theta_max and >= 2 points".into()));
    }
    let theta_grid = linspace(t_lo, t_hi, t_n);
    let settings = job.integration_settings();
    let rows = amplitude::angular_map(&config, &theta_grid, &grid, &settings)?;
    let mut s = String::new();
    push_meta(&mut s, job);
    s.push_str("# units: theta_p in rad, omega_k in E0, d3e in atomic units\n");
    s.push_str("# columns: theta_p, then d3e at each omega_k of the header row\n");
    write!(s, "# omega_k:").unwrap();
    for w in &grid {
        write!(s, " {w:.17e}").unwrap();
    }
    s.push('\n');
    for (theta, row) in theta_grid.iter().zip(rows.iter()) {
        write!(s, "{theta:.17e}").unwrap();
        for v in row {
            write!(s, ",{v:.17e}").unwrap();
        }
        s.push('\n');
    }
    let stem = job.stem();
    let csv = format!("{stem}_map.csv");
    write_text(&out_dir.join(&csv), &s)?;
    write_text(&out_dir.join(format!("{stem}_plot.py")), &map_plot(&csv))?;
    println!(
        "angular map: {} x {} -> {}",
        theta_grid.len(),
        grid.len(),
        out_dir.join(csv).display()
    );
    Ok(())
}

fn run_saddle(job: &JobConfig, out_dir: &Path) -> Result<(), CliError> {
    let config = job.scattering_config()?;
    let n = job.grid.t_points.unwrap_or(1000);
    let t_grid = linspace(0.0, config.pulse.t_p(), n.max(2));
    let curve = analysis::saddle_curve(&config, &t_grid);
    let mut s = String::new();
    push_meta(&mut s, job);
    s.push_str("# units: t in t0, omega in E0\n");
    s.push_str("# columns: t,omega_dipole,omega_full\n");
    for i in 0..t_grid.len() {
        writeln!(s, "{:.17e},{:.17e},{:.17e}", curve.t_grid[i], curve.omega_dipole[i], curve.omega_full[i])
            .unwrap();
    }
    let stem = job.stem();
    write_text(&out_dir.join(format!("{stem}_saddle.csv")), &s)?;
    println!(
        "saddle: cutoff {:.4} E0 (dipole {:.4} E0)",
        analysis::cutoff(&config, true),
        analysis::cutoff(&config, false)
    );
    Ok(())
}

fn run_spectrogram(job: &JobConfig, out_dir: &Path) -> Result<(), CliError> {
    let config = job.scattering_config()?;
    let sg = job
        .spectrogram
        .as_ref()
        .ok_or_else(|| CliError::Config("spectrogram section missing".into()))?;
    let n = job
        .grid
        .omega_points
        .ok_or_else(|| CliError::Config("grid.omega_points missing".into()))?;
    if n < 16 {
        return Err(CliError::Config("spectrogram needs >= 16 omega points".into()));
    }
    // The emission line sits on the field-free energy; the analysis window is
    // specified relative to it.
    let center = 0.5 * config.p_mag * config.p_mag - config.e_b();
    let rel_grid = linspace(sg.omega1, sg.omega2, n);
    let abs_grid: Vec<f64> = rel_grid.iter().map(|w| center + w).collect();
    let settings = job.integration_settings();
    let result = amplitude::scan_spectrum(&config, &abs_grid, &settings)?;
    let signal = averaged_signal(&config, &result)?;
    let t_p = config.pulse.t_p();
    let cfg = SpectrogramConfig {
        xi_t: sg.xi_t,
        xi_w: sg.xi_w,
        omega1: sg.omega1,
        omega2: sg.omega2,
        t_grid: linspace(-0.2 * t_p, 1.2 * t_p, sg.t_points.max(2)),
        omega_k_grid: linspace(sg.omega1, sg.omega2, sg.omega_k_points.max(2)),
    };
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let matrix = analysis::spectrogram(&rel_grid, &signal, &cfg)
        .map_err(|e| CliError::Numerical(e.to_string()))?;

    let stem = job.stem();
    let spectrum_name = format!("{stem}_spectrum.csv");
    write_text(&out_dir.join(&spectrum_name), &spectrum_csv(&config, &result, job)?)?;

    let mut s = String::new();
    push_meta(&mut s, job);
    s.push_str("# units: t in t0, omega relative to the field-free line in E0\n");
    s.push_str("# row-major: one row per t, one column per omega_k\n");
    write!(s, "# omega_k:").unwrap();
    for w in &cfg.omega_k_grid {
        write!(s, " {w:.17e}").unwrap();
    }
    s.push('\n');
    for (t, row) in cfg.t_grid.iter().zip(matrix.iter()) {
        write!(s, "{t:.17e}").unwrap();
        for v in row {
            write!(s, ",{v:.17e}").unwrap();
        }
        s.push('\n');
    }
    let matrix_name = format!("{stem}_spectrogram.csv");
    write_text(&out_dir.join(&matrix_name), &s)?;

    let curve = analysis::saddle_curve(&config, &cfg.t_grid);
    let mut s = String::new();
    push_meta(&mut s, job);
    s.push_str("# units: t in t0, omega relative to the field-free line in E0\n");
    s.push_str("# columns: t,omega_dipole,omega_full\n");
    for i in 0..cfg.t_grid.len() {
        writeln!(
            s,
            "{:.17e},{:.17e},{:.17e}",
            curve.t_grid[i],
            curve.omega_dipole[i] - center,
            curve.omega_full[i] - center
        )
        .unwrap();
    }
    let saddle_name = format!("{stem}_saddle.csv");
    write_text(&out_dir.join(&saddle_name), &s)?;
    write_text(
        &out_dir.join(format!("{stem}_plot.py")),
        &spectrogram_plot(&matrix_name, &saddle_name, &spectrum_name, t_p),
    )?;
    println!(
        "spectrogram: {} x {} -> {}",
        cfg.t_grid.len(),
        cfg.omega_k_grid.len(),
        out_dir.join(matrix_name).display()
    );
    Ok(())
}

fn run_classical(job: &JobConfig, out_dir: &Path) -> Result<(), CliError> {
    let pulse = job.pulse_spec()?;
    let config = job.scattering_config()?;
    let p = config.p_vec();
    let opts = job.classical.clone().unwrap_or_default();
    let ctrl = StepControl { rtol: opts.rtol, atol: opts.atol };
    let r0 = vec(opts.r0);
    let stem = job.stem();
    let mut residuals = Vec::new();
    for (k, &scale) in opts.c_scales.iter().enumerate() {
        if !(scale > 0.0) {
            return Err(CliError::Config("classical.c_scales must be positive".into()));
        }
        let c = scale * C_AU;
        let states = classical::integrate_trajectory(r0, p, &pulse, c, &ctrl)
            .map_err(|e| CliError::Numerical(format!("c scale {scale}: {e}")))?;
        let mut s = String::new();
        push_meta(&mut s, job);
        writeln!(s, "# c = {c:.17e} (scale {scale})").unwrap();
        s.push_str("# units: t in t0, r in a0, momenta in p0\n");
        s.push_str("# columns: t,rx,ry,rz,pix,piy,piz,pax,pay,paz,residual\n");
        let mut worst = 0.0f64;
        for st in states.iter().filter(|st| st.t <= pulse.t_p()) {
            let analytic = p - pulse.vector_potential(st.t)
                + classical::analytic_momentum_correction(p, &pulse, st.t, st.r, c);
            let residual = (st.pi - analytic).norm();
            worst = worst.max(residual);
            writeln!(
                s,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                st.t, st.r.x, st.r.y, st.r.z, st.pi.x, st.pi.y, st.pi.z,
                analytic.x, analytic.y, analytic.z, residual
            )
            .unwrap();
        }
        write_text(&out_dir.join(format!("{stem}_classical_{k}.csv")), &s)?;
        residuals.push((c, worst));
    }
    let mut s = String::new();
    push_meta(&mut s, job);
    s.push_str("# columns: c,max_residual\n");
    for (c, r) in &residuals {
        writeln!(s, "{c:.17e},{r:.17e}").unwrap();
    }
    write_text(&out_dir.join(format!("{stem}_classical_summary.csv")), &s)?;
    for (c, r) in &residuals {
        println!("classical: c = {c:9.3} max residual {r:.3e}");
    }
    if residuals.len() >= 2 {
        let (c0, r0v) = residuals[0];
        let (c1, r1v) = residuals[residuals.len() - 1];
        let slope = (r1v / r0v).ln() / (c1 / c0).ln();
        println!("classical: log-log residual slope {slope:.3}");
        if (slope + 2.0).abs() > 0.2 {
            return Err(CliError::Numerical(format!(
                "residual slope {slope:.3} outside -2 +/- 0.2"
            )));
        }
    }
    Ok(())
}

fn run_pulse_preview(job: &JobConfig, out_dir: &Path) -> Result<(), CliError> {
    let pulse = job.pulse_spec()?;
    let n = job.grid.t_points.unwrap_or(2000).max(2);
    let t_grid = linspace(-0.05 * pulse.t_p(), 1.05 * pulse.t_p(), n);
    let mut s = String::new();
    push_meta(&mut s, job);
    s.push_str("# units: t in t0, eE in field0, eA in p0\n");
    s.push_str("# columns: t,eEx,eEy,eEz,eAx,eAy,eAz\n");
    for &t in &t_grid {
        let e = pulse.e_field(t);
        let a = pulse.vector_potential(t);
        writeln!(
            s,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            t, e.x, e.y, e.z, a.x, a.y, a.z
        )
        .unwrap();
    }
    let stem = job.stem();
    write_text(&out_dir.join(format!("{stem}_pulse.csv")), &s)?;
    println!("pulse preview: T_p = {:.6} t0", pulse.t_p());
    Ok(())
}

/// One oracle-comparison line of the kernel validation report.
#[derive(Debug, Clone)]
pub struct KernelCheckLine {
    pub name: &'static str,
    pub trials: usize,
    pub worst: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compare the closed-form kernels against independent oracles: the 3D
/// quadrature for `f`, and nested finite differences for `B` and `C`.
/// Randomized arguments cover moderate magnitudes plus the high-momentum
/// regime traced out by the supplied scattering geometry.
pub fn kernel_validation_report(
    config: &ScatteringConfig,
    opts: &KernelCheckInput,
) -> Vec<KernelCheckLine> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut lines = Vec::new();

    // f against the quadrature oracle on moderate arguments.
    let mut worst = 0.0f64;
    let mut used = 0;
    while used < opts.oracle_count {
        let args = random_args(&mut rng, 0.5, 12.0);
        let exact = match nordsieck::nordsieck_f(&args) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let numeric = match nordsieck::quadrature_oracle_f(&args, 1e-6) {
            Ok(v) => v,
            Err(_) => continue,
        };
        worst = worst.max((exact - numeric).norm() / exact.norm());
        used += 1;
    }
    lines.push(line("f vs quadrature", used, worst, opts.tol_f));

    // B against a mixed finite difference of f.
    let mut worst = 0.0f64;
    let mut used = 0;
    while used < opts.fd_count {
        let physical = used % 4 == 0;
        let args = if physical {
            physical_args(&mut rng, config)
        } else {
            random_args(&mut rng, 0.3, 30.0)
        };
        let dir = random_unit(&mut rng);
        let Ok(exact) = nordsieck::kernel_b(&args, dir) else { continue };
        let Ok(f0) = nordsieck::nordsieck_f(&args) else { continue };
        let hq = 1e-3 * (1.0 + args.q.norm());
        let hl = 1e-3 * args.lambda;
        let sample = |sq: f64, sl: f64| {
            let a = NordsieckArgs::new(
                args.nu,
                args.lambda + sl * hl,
                args.q + dir * (sq * hq),
                args.p,
            )
            .ok()?;
            nordsieck::nordsieck_f(&a).ok()
        };
        let stencil = |s: f64| {
            let (pp, pm, mp, mm) =
                (sample(s, s)?, sample(s, -s)?, sample(-s, s)?, sample(-s, -s)?);
            Some(Complex64::new(0.0, 1.0) * (pp - pm - mp + mm) / (4.0 * s * s * hq * hl))
        };
        // Richardson step cancels the O(h^2) truncation error.
        let (Some(coarse), Some(fine)) = (stencil(1.0), stencil(0.5)) else { continue };
        let fd = (fine * 4.0 - coarse) / 3.0;
        let scale = exact.norm().max(1e-3 * f0.norm());
        worst = worst.max((exact - fd).norm() / scale);
        used += 1;
    }
    lines.push(line("B vs finite difference", used, worst, opts.tol_b));

    // C against a nested finite difference of the exact B.
    let mut worst = 0.0f64;
    let mut used = 0;
    while used < opts.fd_count {
        let physical = used % 4 == 0;
        let args = if physical {
            physical_args(&mut rng, config)
        } else {
            random_args(&mut rng, 0.3, 30.0)
        };
        let eps_dir = random_unit(&mut rng);
        let field_dir = random_unit(&mut rng);
        let n_dir = random_unit(&mut rng);
        let Ok(exact) = nordsieck::kernel_c(&args, eps_dir, field_dir, n_dir) else { continue };
        let Ok(b0) = nordsieck::kernel_b(&args, eps_dir) else { continue };
        let h = 1e-3 * (1.0 + args.q.norm());
        let sample = |sf: f64, sn: f64| {
            let a = NordsieckArgs::new(
                args.nu,
                args.lambda,
                args.q + field_dir * (sf * h) + n_dir * (sn * h),
                args.p,
            )
            .ok()?;
            nordsieck::kernel_b(&a, eps_dir).ok()
        };
        // C = -(field.grad)(n.grad) B, with a Richardson step on the mixed
        // difference.
        let stencil = |s: f64| {
            let (pp, pm, mp, mm) =
                (sample(s, s)?, sample(s, -s)?, sample(-s, s)?, sample(-s, -s)?);
            Some(-(pp - pm - mp + mm) / (4.0 * s * s * h * h))
        };
        let (Some(coarse), Some(fine)) = (stencil(1.0), stencil(0.5)) else { continue };
        let fd = (fine * 4.0 - coarse) / 3.0;
        let scale = exact.norm().max(1e-3 * b0.norm());
        worst = worst.max((exact - fd).norm() / scale);
        used += 1;
    }
    lines.push(line("C vs nested finite difference", used, worst, opts.tol_c));
    lines
}

fn line(name: &'static str, trials: usize, worst: f64, tol: f64) -> KernelCheckLine {
    KernelCheckLine { name, trials, worst, tol, pass: worst <= tol }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v * (1.0 / n);
        }
    }
}

fn random_args(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> NordsieckArgs {
    let nu = rng.gen_range(0.05..1.5);
    let lambda = rng.gen_range(0.5..6.0);
    let q = random_unit(rng) * rng.gen_range(lo..hi);
    let p = random_unit(rng) * rng.gen_range(lo.max(0.5)..hi);
    NordsieckArgs::new(nu, lambda, q, p).expect("valid random arguments")
}

fn physical_args(rng: &mut ChaCha8Rng, config: &ScatteringConfig) -> NordsieckArgs {
    let t = rng.gen_range(0.0..config.pulse.t_p());
    let center = 0.5 * config.p_mag * config.p_mag - config.e_b();
    let omega = center * rng.gen_range(0.95..1.06);
    let q = amplitude::q_of_t(config, omega, t);
    NordsieckArgs::new(config.nu(), config.lambda(), q, config.p_vec())
        .expect("valid physical arguments")
}

fn run_validate_kernels(job: &JobConfig, out_dir: &Path) -> Result<(), CliError> {
    let config = job.scattering_config()?;
    let opts = job.kernels.clone().unwrap_or_default();
    let lines = kernel_validation_report(&config, &opts);
    let mut s = String::new();
    push_meta(&mut s, job);
    s.push_str("# columns: check,trials,worst_relative_error,tolerance,pass\n");
    let mut all_pass = true;
    for l in &lines {
        writeln!(s, "{},{},{:.6e},{:.1e},{}", l.name, l.trials, l.worst, l.tol, l.pass).unwrap();
        println!(
            "{}: worst {:.3e} vs tol {:.1e} over {} trials -> {}",
            l.name,
            l.worst,
            l.tol,
            l.trials,
            if l.pass { "pass" } else { "FAIL" }
        );
        all_pass &= l.pass;
    }
    write_text(&out_dir.join(format!("{}_kernels.csv", job.stem())), &s)?;
    if !all_pass {
        return Err(CliError::Numerical("kernel validation failed".into()));
    }
    Ok(())
}

fn spectrum_plot(csv: &str) -> String {
    format!(
        r##"#!/usr/bin/env python3
"""Log-scale energy spectrum."""
import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt("{csv}", delimiter=",", comments="#")
fig, ax = plt.subplots(figsize=(7, 4))
ax.semilogy(data[:, 0], data[:, 1], lw=0.8)
ax.set_xlabel(r"$\omega_K$ ($E_0$)")
ax.set_ylabel(r"$d^3 E$ (atomic units)")
fig.tight_layout()
fig.savefig("{csv}".replace(".csv", ".png"), dpi=200)
"##
    )
}

fn map_plot(csv: &str) -> String {
    format!(
        r##"#!/usr/bin/env python3
"""Polar-angle heat map of the energy distribution."""
import numpy as np
import matplotlib.pyplot as plt

omega = None
with open("{csv}") as fh:
    for line in fh:
        if line.startswith("# omega_k:"):
            omega = np.array([float(x) for x in line.split(":", 1)[1].split()])
data = np.genfromtxt("{csv}", delimiter=",", comments="#")
theta = data[:, 0] / np.pi
values = data[:, 1:]
fig, ax = plt.subplots(figsize=(7, 4))
mesh = ax.pcolormesh(omega, theta, np.log10(np.maximum(values, values.max() * 1e-12)),
                     shading="nearest", cmap="inferno")
fig.colorbar(mesh, ax=ax, label=r"$\log_{{10}} d^3E$")
ax.set_xlabel(r"$\omega_K$ ($E_0$)")
ax.set_ylabel(r"$\theta_p$ ($\pi$)")
fig.tight_layout()
fig.savefig("{csv}".replace(".csv", ".png"), dpi=200)
"##
    )
}

fn spectrogram_plot(matrix_csv: &str, saddle_csv: &str, spectrum_csv: &str, t_p: f64) -> String {
    format!(
        r##"#!/usr/bin/env python3
"""Spectrogram with the saddle-curve overlay, plus the source spectrum."""
import numpy as np
import matplotlib.pyplot as plt

omega = None
with open("{matrix_csv}") as fh:
    for line in fh:
        if line.startswith("# omega_k:"):
            omega = np.array([float(x) for x in line.split(":", 1)[1].split()])
data = np.genfromtxt("{matrix_csv}", delimiter=",", comments="#")
t = data[:, 0]
matrix = data[:, 1:]
saddle = np.genfromtxt("{saddle_csv}", delimiter=",", comments="#")
spectrum = np.genfromtxt("{spectrum_csv}", delimiter=",", comments="#")

fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4), width_ratios=[1, 1.2])
ax0.semilogy(spectrum[:, 0], spectrum[:, 1], lw=0.8)
ax0.set_xlabel(r"$\omega_K$ ($E_0$)")
ax0.set_ylabel(r"$d^3 E$ (atomic units)")

mesh = ax1.pcolormesh(omega, t, matrix, shading="nearest", cmap="viridis")
fig.colorbar(mesh, ax=ax1, label="spectrogram")
inside = (saddle[:, 0] >= 0) & (saddle[:, 0] <= {t_p:.17e})
ax1.plot(saddle[inside, 2], saddle[inside, 0], "r-", lw=1.2)
ax1.axhline(0.0, color="w", lw=0.8)
ax1.axhline({t_p:.17e}, color="w", lw=0.8)
ax1.set_xlabel(r"$\omega_K - \omega_{{\mathrm{{line}}}}$ ($E_0$)")
ax1.set_ylabel(r"$t$ ($t_0$)")
fig.tight_layout()
fig.savefig("{matrix_csv}".replace(".csv", ".png"), dpi=200)
"##
    )
}
