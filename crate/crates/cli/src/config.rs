//! Run configuration: flags, JSON config files, and their merge.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bh_core::classical::{LambdaConvention, Splitting};
use bh_core::spectra::ReferenceKind;
use bh_core::HamiltonianSpec;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
#[value(rename_all = "kebab-case")]
pub enum Command {
    Basis,
    Spectrum,
    SweepU,
    Stats,
    Rmt,
    Overlap,
    BlochQuantum,
    BlochClassical,
    Stability,
    Bogoliubov,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Basis => "basis",
            Command::Spectrum => "spectrum",
            Command::SweepU => "sweep-u",
            Command::Stats => "stats",
            Command::Rmt => "rmt",
            Command::Overlap => "overlap",
            Command::BlochQuantum => "bloch-quantum",
            Command::BlochClassical => "bloch-classical",
            Command::Stability => "stability",
            Command::Bogoliubov => "bogoliubov",
        }
    }
}

/// Duration given either in units of J⁻¹ or as a number of Bloch periods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeSpan {
    Absolute(f64),
    Periods(f64),
}

impl TimeSpan {
    pub fn resolve(self, f: f64) -> Result<f64, CliError> {
        let t = match self {
            TimeSpan::Absolute(t) => t,
            TimeSpan::Periods(k) if f != 0.0 => k * 2.0 * PI / f.abs(),
            TimeSpan::Periods(_) => return Err(CliError::usage("t-max in periods needs a nonzero field F")),
        };
        if t.is_finite() && t > 0.0 {
            Ok(t)
        } else {
            Err(CliError::usage(format!("t-max must be positive, got {t}")))
        }
    }
}

impl FromStr for TimeSpan {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let bad = || format!("expected a number or '<k>-periods', got '{s}'");
        match s.strip_suffix("periods") {
            Some(k) => k.trim_end_matches('-').trim().parse().map(TimeSpan::Periods).map_err(|_| bad()),
            None => s.parse().map(TimeSpan::Absolute).map_err(|_| bad()),
        }
    }
}

impl fmt::Display for TimeSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeSpan::Absolute(t) => write!(f, "{t}"),
            TimeSpan::Periods(k) => write!(f, "{k}-periods"),
        }
    }
}

impl Serialize for TimeSpan {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            TimeSpan::Absolute(t) => s.serialize_f64(*t),
            TimeSpan::Periods(_) => s.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for TimeSpan {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(t) => Ok(TimeSpan::Absolute(t)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    Goe,
    Gue,
}

impl From<Ensemble> for ReferenceKind {
    fn from(e: Ensemble) -> Self {
        match e {
            Ensemble::Goe => ReferenceKind::Goe,
            Ensemble::Gue => ReferenceKind::Gue,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Initial {
    /// All atoms in the k = 0 mode.
    Bec,
    /// Ground state of the untilted Hamiltonian.
    Ground,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// Λ = U·N.
    MeanField,
    /// Λ = U·(N − 1).
    CoherentState,
}

impl From<Convention> for LambdaConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::MeanField => LambdaConvention::MeanField,
            Convention::CoherentState => LambdaConvention::CoherentState,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplittingArg {
    Strang,
    Yoshida4,
}

impl From<SplittingArg> for Splitting {
    fn from(s: SplittingArg) -> Self {
        match s {
            SplittingArg::Strang => Splitting::Strang,
            SplittingArg::Yoshida4 => Splitting::Yoshida4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParityArg {
    Even,
    Odd,
    None,
}

/// Every tunable of every command. Keys of a JSON config file are the flag
/// names; a flag given on the command line wins over the file.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Params {
    /// Number of atoms N.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// Number of sites L.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    /// Hopping J.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    /// On-site interaction U.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    /// One-parameter family J = 1 − u, U = u.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_param: Option<f64>,
    /// Macroscopic interaction g = UN/L (sets U).
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    /// Bound of the uniform on-site disorder.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_max: Option<f64>,
    /// Peierls phase θ.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Static field F.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    /// Time step.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Duration: a number, or '<k>-periods' in Bloch periods.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<TimeSpan>,
    /// Steps between recorded samples.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_every: Option<usize>,
    /// Fraction of levels dropped at each spectral edge before unfolding.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trim: Option<f64>,
    /// Split the spectrum into symmetry sectors.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sectors: Option<bool>,
    /// Restrict to one quasimomentum index.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<usize>,
    /// Restrict to one parity (with --kappa).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity: Option<ParityArg>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_min: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_max: Option<f64>,
    /// Grid points of a sweep or scan.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Random-matrix ensemble.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<Ensemble>,
    /// Random-matrix dimensions, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    /// Random matrices per dimension.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Second interaction U' of the overlap matrix.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_prime: Option<f64>,
    /// Central fraction of the spectrum averaged in the overlap profile.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    /// Largest |d| of the overlap profile.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_max: Option<usize>,
    /// Initial state of the quantum run.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<Initial>,
    /// Husimi ensemble size.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<usize>,
    /// How Λ follows from U and N for the ensemble.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<Convention>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub splitting: Option<SplittingArg>,
    /// Report the raw ensemble mean without the ordering factor (N+L)/N.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw: Option<bool>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_min: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_max: Option<f64>,
    /// Highest number of quanta in the semiclassical ladder.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Output directory; without it nothing is written to disk.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

macro_rules! fill_from {
    ($dst:ident, $src:ident; $($field:ident),* $(,)?) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field; } )*
    };
}

impl Params {
    /// Fill every unset field from `file`.
    pub fn merged_over(mut self, file: Params) -> Params {
        let s = &mut self;
        fill_from!(s, file; n, l, j, u, u_param, g, epsilon_max, theta, f, seed, dt, t_max, sample_every, trim,
            sectors, kappa, parity, u_min, u_max, points, kind, dims, samples, u_prime, window, d_max, initial,
            members, convention, splitting, raw, f_min, f_max, n_max, out);
        self
    }

    pub fn need_n(&self) -> Result<u32, CliError> {
        self.n.ok_or_else(|| CliError::usage("--n is required"))
    }

    pub fn need_l(&self) -> Result<usize, CliError> {
        self.l.ok_or_else(|| CliError::usage("--l is required"))
    }

    pub fn seed(&mut self) -> u64 {
        *self.seed.get_or_insert(0)
    }

    /// (J, U) from exactly one of --j/--u, --u-param or --g.
    pub fn couplings(&mut self) -> Result<(f64, f64), CliError> {
        let n = self.need_n()?;
        let l = self.need_l()?;
        match (self.u_param, self.g) {
            (Some(_), Some(_)) => Err(CliError::usage("--u-param and --g are exclusive")),
            (Some(u), None) => {
                if self.j.is_some() || self.u.is_some() {
                    return Err(CliError::usage("--u-param fixes J and U; drop --j/--u"));
                }
                Ok((1.0 - u, u))
            }
            (None, Some(g)) => {
                if self.u.is_some() {
                    return Err(CliError::usage("--g fixes U; drop --u"));
                }
                if n == 0 {
                    return Err(CliError::usage("--g needs N >= 1"));
                }
                Ok((*self.j.get_or_insert(1.0), g * l as f64 / f64::from(n)))
            }
            (None, None) => Ok((*self.j.get_or_insert(1.0), *self.u.get_or_insert(0.0))),
        }
    }

    /// Static Hamiltonian parameters; the field is left at zero.
    pub fn hamiltonian(&mut self) -> Result<HamiltonianSpec, CliError> {
        let (j, u) = self.couplings()?;
        let (n, l) = (self.need_n()?, self.need_l()?);
        let mut spec = HamiltonianSpec::new(n, l, j, u).with_theta(*self.theta.get_or_insert(0.0));
        let eps = *self.epsilon_max.get_or_insert(0.0);
        if !(eps >= 0.0) {
            return Err(CliError::usage(format!("--epsilon-max must be non-negative, got {eps}")));
        }
        if eps > 0.0 {
            let seed = self.seed();
            spec = spec.with_uniform_disorder(eps, seed);
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn field(&mut self) -> f64 {
        *self.f.get_or_insert(0.0)
    }
}

/// Parse a config file. It may be a plain object of flag names (optionally
/// with "command"), or a run summary, whose "config" member is used.
pub fn load(path: &Path) -> Result<(Option<Command>, Params), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let bad = |e: serde_json::Error| CliError::usage(format!("{}: {e}", path.display()));
    let mut value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
    if let Some(inner) = value.get("config").filter(|c| c.is_object()) {
        value = inner.clone();
    }
    let obj = value
        .as_object_mut()
        .ok_or_else(|| CliError::usage(format!("{}: expected a JSON object", path.display())))?;
    // documentation keys are allowed and ignored
    obj.retain(|k, _| !k.starts_with('_') && k != "description");
    let command = match obj.remove("command") {
        Some(c) => Some(serde_json::from_value(c).map_err(bad)?),
        None => None,
    };
    let params = serde_json::from_value(value).map_err(bad)?;
    Ok((command, params))
}
