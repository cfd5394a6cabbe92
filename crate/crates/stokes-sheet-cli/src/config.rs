use serde::Deserialize;
use std::fs;
use std::path::{Path, PathBuf};
use stokes_sheet::equilibria::{branch_point_at, Subspace};
use stokes_sheet::evolution::TimeStepperConfig;
use stokes_sheet::profile::check_grid_size;
use stokes_sheet::{FluidParams, InterfaceProfile};

use crate::error::CliError;
use crate::output::read_snapshot;

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub fluid: FluidSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub stepper: TimeStepperConfig,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub branch: BranchSection,
    #[serde(default)]
    pub fields: FieldsSection,
}

/// Either `theta` directly or the densities and gravity.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidSection {
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub sigma: f64,
    pub theta: Option<f64>,
    pub rho_plus: Option<f64>,
    pub rho_minus: Option<f64>,
    pub g: Option<f64>,
}

impl FluidSection {
    pub fn params(&self) -> Result<FluidParams, CliError> {
        let p = match (self.theta, self.rho_plus, self.rho_minus, self.g) {
            (Some(theta), None, None, None) => {
                FluidParams::with_theta(self.mu_plus, self.mu_minus, self.sigma, theta)
            }
            (None, Some(rp), Some(rm), Some(g)) => {
                FluidParams::new(self.mu_plus, self.mu_minus, rp, rm, self.sigma, g)
            }
            _ => {
                return Err(config_err(
                    "[fluid] needs either theta or all of rho_plus, rho_minus, g",
                ))
            }
        };
        p.map_err(|e| config_err(format!("[fluid] {e}")))
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    /// Defaults to 64, or to the snapshot size when resuming.
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Flat,
    Cosine,
    Equilibrium,
    #[default]
    Modes,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialSection {
    pub profile: ProfileKind,
    pub mean: f64,
    /// Coefficients of `cos(k xi)`, `k = 1, 2, ...`.
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    /// For `cosine` and `equilibrium`: amplitude `s` of `cos(mode xi)`.
    pub amplitude: f64,
    pub mode: Option<usize>,
    /// Snapshot CSV written by `simulate`; its JSON sidecar supplies the time
    /// and, when present, the profile one step back.
    pub resume: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Write every k-th recorded state as a snapshot; 0 keeps only the first
    /// and last.
    pub snapshot_every: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    /// Highest wavenumber compared; defaults to `min(32, n/2 - 1)`.
    pub kmax: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubspaceName {
    #[default]
    ZeroMean,
    EvenZeroMean,
}

impl From<SubspaceName> for Subspace {
    fn from(s: SubspaceName) -> Self {
        match s {
            SubspaceName::ZeroMean => Subspace::ZeroMean,
            SubspaceName::EvenZeroMean => Subspace::EvenZeroMean,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BranchSection {
    pub ell: usize,
    pub ds: f64,
    pub ds_max: f64,
    pub s_max: f64,
    pub slope_cap: f64,
    pub max_points: usize,
    /// Compute the leading eigenvalue at every `stability_every`-th point;
    /// 0 disables it.
    pub stability_every: usize,
    pub subspace: SubspaceName,
}

impl Default for BranchSection {
    fn default() -> Self {
        BranchSection {
            ell: 1,
            ds: 0.005,
            ds_max: 0.05,
            s_max: 10.0,
            slope_cap: 15.0,
            max_points: 5000,
            stability_every: 1,
            subspace: SubspaceName::ZeroMean,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldsSection {
    pub x1: [f64; 2],
    pub x2: [f64; 2],
    pub nx1: usize,
    pub nx2: usize,
    pub refinement: usize,
}

impl Default for FieldsSection {
    fn default() -> Self {
        FieldsSection {
            x1: [-std::f64::consts::PI, std::f64::consts::PI],
            x2: [-2.0, 2.0],
            nx1: 33,
            nx2: 33,
            refinement: 4,
        }
    }
}

/// Initial data after loading, with what a resumed run needs.
#[derive(Debug, Clone)]
pub struct Initial {
    pub profile: InterfaceProfile,
    pub t0: f64,
    pub previous: Option<InterfaceProfile>,
    /// Step of the run being resumed.
    pub dt: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| config_err(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        self.fluid.params()?;
        if let Some(n) = self.grid.n {
            check_grid_size(n).map_err(|e| config_err(format!("[grid] {e}")))?;
        }
        let b = &self.branch;
        if b.ell == 0 {
            return Err(config_err("[branch] ell must be at least 1"));
        }
        if !(b.ds.is_finite() && b.ds != 0.0 && b.ds_max >= b.ds.abs()) {
            return Err(config_err("[branch] need 0 < |ds| <= ds_max"));
        }
        if !(b.s_max > 0.0 && b.slope_cap > 0.0 && b.max_points >= 2) {
            return Err(config_err("[branch] s_max and slope_cap must be positive, max_points >= 2"));
        }
        let fl = &self.fields;
        let ordered = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] <= r[1];
        if !(ordered(fl.x1) && ordered(fl.x2)) {
            return Err(config_err("[fields] ranges must be finite and increasing"));
        }
        if fl.nx1 == 0 || fl.nx2 == 0 || fl.refinement == 0 {
            return Err(config_err("[fields] nx1, nx2 and refinement must be positive"));
        }
        let init = &self.initial;
        let has_modes = !init.cos.is_empty() || !init.sin.is_empty();
        if init.profile != ProfileKind::Modes && has_modes {
            return Err(config_err("[initial] cos/sin lists are only used with profile = \"modes\""));
        }
        if init.cos.iter().chain(&init.sin).chain([&init.mean, &init.amplitude]).any(|v| !v.is_finite()) {
            return Err(config_err("[initial] coefficients must be finite"));
        }
        if init.resume.is_some() && (has_modes || init.profile != ProfileKind::Modes) {
            return Err(config_err("[initial] resume excludes other initial data"));
        }
        Ok(())
    }

    pub fn params(&self) -> FluidParams {
        self.fluid.params().expect("checked on load")
    }

    pub fn n(&self) -> usize {
        self.grid.n.unwrap_or(64)
    }

    /// Builds the initial profile, reading the snapshot when resuming.
    pub fn initial(&self) -> Result<Initial, CliError> {
        let init = &self.initial;
        if let Some(path) = &init.resume {
            let snap = read_snapshot(path).map_err(|e| config_err(format!("resume: {e:#}")))?;
            if let Some(n) = self.grid.n {
                if n != snap.profile.n() {
                    return Err(config_err(format!(
                        "[grid] n = {n} but the snapshot has {} points",
                        snap.profile.n()
                    )));
                }
            }
            return Ok(Initial {
                profile: snap.profile,
                t0: snap.t,
                previous: snap.previous,
                dt: Some(snap.dt),
            });
        }
        let n = self.n();
        let half = n / 2;
        if init.cos.len() >= half || init.sin.len() >= half {
            return Err(config_err(format!(
                "[initial] coefficient lists must be shorter than n/2 = {half}"
            )));
        }
        let mode = init.mode.unwrap_or(1);
        if init.profile != ProfileKind::Modes && (mode == 0 || mode >= half) {
            return Err(config_err(format!("[initial] mode must lie in 1..{half}")));
        }
        let profile = match init.profile {
            ProfileKind::Flat => InterfaceProfile::from_fn(n, |_| init.mean),
            ProfileKind::Cosine => InterfaceProfile::from_fn(n, |x| init.mean + init.amplitude * (mode as f64 * x).cos()),
            ProfileKind::Modes => InterfaceProfile::from_modes(n, init.mean, &init.cos, &init.sin),
            ProfileKind::Equilibrium => branch_point_at(mode, init.amplitude, n).map(|bp| bp.profile.translate(0.0, init.mean)),
        }
        .map_err(|e| config_err(format!("[initial] {e}")))?;
        Ok(Initial {
            profile,
            t0: 0.0,
            previous: None,
            dt: None,
        })
    }
}
