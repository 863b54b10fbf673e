use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use num_complex::Complex64;

use super::CliError;
use crate::dynamics::DEFAULT_STEPS;
use crate::protocols::{
    preset_targets, Branch, InitialState, Platform, Preset, Protocol, ProtocolRequest, TargetState,
};

/// Amplitudes whose squared norm misses 1 by at most this are rescaled.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-3;
pub const DEFAULT_RESOLUTION: usize = 50;

/// Flags shared by every subcommand. Each also works as a `key = value` line
/// in the `--config` file, under the same name without dashes.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// single-I, single-II, single-II-nomw, multi or phased
    #[arg(long)]
    pub protocol: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<f64>,
    /// Phase on |2>
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Phase on |3>
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Level 1, 2 or 3, or comma-separated complex amplitudes such as `0,0+1i,0`
    #[arg(long, allow_hyphen_values = true)]
    pub initial: Option<String>,
    /// Protocol duration
    #[arg(long = "T")]
    pub duration: Option<f64>,
    /// Integrator steps
    #[arg(long)]
    pub steps: Option<usize>,
    /// least-energy, arccos-plus, arccos-minus, arcsin-plus or arcsin-minus
    #[arg(long)]
    pub branch: Option<String>,
    /// Phase-winding rate of the phased protocol
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Grid points per axis of the ratio surface
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv, json or csv,json
    #[arg(long)]
    pub format: Option<String>,
    /// lambda or cavity
    #[arg(long)]
    pub platform: Option<String>,
    /// beam-split-12, beam-split-13 or cavity-bell
    #[arg(long)]
    pub preset: Option<String>,
    /// INI file of key = value defaults; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
}

impl FromStr for Formats {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let mut f = Formats {
            csv: false,
            json: false,
        };
        for part in s.split(',').map(str::trim) {
            match part.to_ascii_lowercase().as_str() {
                "csv" => f.csv = true,
                "json" => f.json = true,
                _ => {
                    return Err(CliError::Usage(format!(
                        "unknown format `{part}`; expected csv or json"
                    )))
                }
            }
        }
        Ok(f)
    }
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub protocol: Option<Protocol>,
    pub mu: Option<f64>,
    pub eta: Option<f64>,
    pub nu: Option<f64>,
    pub gamma: f64,
    pub kappa: f64,
    pub initial: Option<InitialState>,
    pub duration: f64,
    pub steps: usize,
    pub branch: Branch,
    pub lambda: Option<f64>,
    pub resolution: usize,
    pub out: PathBuf,
    pub formats: Formats,
    pub platform: Platform,
    pub preset: Option<Preset>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            protocol: None,
            mu: None,
            eta: None,
            nu: None,
            gamma: 0.0,
            kappa: 0.0,
            initial: None,
            duration: 1.0,
            steps: DEFAULT_STEPS,
            branch: Branch::default(),
            lambda: None,
            resolution: DEFAULT_RESOLUTION,
            out: PathBuf::from("."),
            formats: Formats {
                csv: true,
                json: true,
            },
            platform: Platform::default(),
            preset: None,
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("`{key}` expects a number, got `{value}`")))
}

fn parse_platform(s: &str) -> Result<Platform, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "lambda" => Ok(Platform::LambdaAtom),
        "cavity" => Ok(Platform::CavityQed),
        _ => Err(CliError::Usage(format!(
            "unknown platform `{s}`; expected lambda or cavity"
        ))),
    }
}

pub fn parse_initial(s: &str) -> Result<InitialState, CliError> {
    if let Ok(level) = s.trim().parse::<usize>() {
        return Ok(InitialState::Level(level));
    }
    s.split(',')
        .map(|part| {
            Complex64::from_str(part.trim())
                .map_err(|_| CliError::Usage(format!("bad amplitude `{part}` in --initial")))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(InitialState::Vector)
}

pub fn platform_name(p: Platform) -> &'static str {
    match p {
        Platform::LambdaAtom => "lambda",
        Platform::CavityQed => "cavity",
    }
}

impl RunConfig {
    /// Defaults, then the `--config` file, then flags.
    pub fn from_args(args: &RunArgs) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &args.config {
            cfg.apply_file(path)?;
        }
        cfg.apply_args(args)?;
        Ok(cfg)
    }

    fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let ini = ini::Ini::load_from_file(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        for (_, props) in ini.iter() {
            for (key, value) in props.iter() {
                self.set(key, value)?;
            }
        }
        Ok(())
    }

    /// Applies one named setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        match key.trim() {
            "protocol" => self.protocol = Some(v.parse().map_err(usage)?),
            "mu" => self.mu = Some(number(key, v)?),
            "eta" => self.eta = Some(number(key, v)?),
            "nu" => self.nu = Some(number(key, v)?),
            "gamma" => self.gamma = number(key, v)?,
            "kappa" => self.kappa = number(key, v)?,
            "initial" => self.initial = Some(parse_initial(v)?),
            "T" => self.duration = number(key, v)?,
            "steps" => self.steps = number(key, v)?,
            "branch" => self.branch = v.parse().map_err(usage)?,
            "lambda" => self.lambda = Some(number(key, v)?),
            "resolution" => self.resolution = number(key, v)?,
            "out" => self.out = PathBuf::from(v),
            "format" => self.formats = v.parse()?,
            "platform" => self.platform = parse_platform(v)?,
            "preset" => self.preset = Some(v.parse().map_err(usage)?),
            other => return Err(CliError::Usage(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    fn apply_args(&mut self, a: &RunArgs) -> Result<(), CliError> {
        let pairs: [(&str, Option<String>); 16] = [
            ("protocol", a.protocol.clone()),
            ("mu", a.mu.map(|x| x.to_string())),
            ("eta", a.eta.map(|x| x.to_string())),
            ("nu", a.nu.map(|x| x.to_string())),
            ("gamma", a.gamma.map(|x| x.to_string())),
            ("kappa", a.kappa.map(|x| x.to_string())),
            ("initial", a.initial.clone()),
            ("T", a.duration.map(|x| x.to_string())),
            ("steps", a.steps.map(|x| x.to_string())),
            ("branch", a.branch.clone()),
            ("lambda", a.lambda.map(|x| x.to_string())),
            ("resolution", a.resolution.map(|x| x.to_string())),
            ("out", a.out.as_ref().map(|p| p.display().to_string())),
            ("format", a.format.clone()),
            ("platform", a.platform.clone()),
            ("preset", a.preset.clone()),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                self.set(key, &v)?;
            }
        }
        Ok(())
    }

    /// Target from the given amplitudes. An unset `eta` is 0; one unset
    /// `mu` or `nu` is filled from the norm; a norm within
    /// [`RENORMALIZE_TOLERANCE`] of 1 is rescaled.
    pub fn target(&self) -> Result<TargetState, CliError> {
        let given = [self.mu, Some(self.eta.unwrap_or(0.0)), self.nu];
        let known: f64 = given.iter().flatten().map(|x| x * x).sum();
        let missing = given.iter().filter(|x| x.is_none()).count();
        let fill = |x: Option<f64>| x.unwrap_or_else(|| (1.0 - known).max(0.0).sqrt());
        let amplitudes = match missing {
            0 | 1 => [fill(given[0]), fill(given[1]), fill(given[2])],
            _ => return Err(CliError::Usage("give at least one of --mu and --nu".into())),
        };
        let residual = (amplitudes.iter().map(|x| x * x).sum::<f64>() - 1.0).abs();
        if known > 1.0 + RENORMALIZE_TOLERANCE || residual > RENORMALIZE_TOLERANCE {
            return Err(CliError::Validation(format!(
                "target is not normalized: |mu|^2 + |eta|^2 + |nu|^2 - 1 = {:e}",
                amplitudes.iter().map(|x| x * x).sum::<f64>() - 1.0
            )));
        }
        let [mu, eta, nu] = amplitudes;
        Ok(TargetState::normalized(mu, eta, nu)
            .map_err(CliError::from)?
            .with_phases(self.gamma, self.kappa))
    }

    pub fn request(&self) -> Result<ProtocolRequest, CliError> {
        let mut request = match (self.preset, self.protocol) {
            (Some(preset), _) => preset_targets(preset),
            (None, Some(protocol)) => ProtocolRequest::new(protocol, self.target()?, self.duration),
            (None, None) => {
                return Err(CliError::Usage("--protocol or --preset is required".into()))
            }
        };
        if self.preset.is_none() {
            request.platform = self.platform;
        }
        request.tf = request.t0 + self.duration;
        request.branch = self.branch;
        request.lambda_rate = self.lambda;
        request.initial = self.initial.clone();
        request.validate().map_err(CliError::from)?;
        Ok(request)
    }
}
