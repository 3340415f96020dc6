use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use curvesamp::analysis::DEFAULT_CAP_STATES;
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "curvesamp", version, about = "Explicit curve samplers over finite fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Params,
    Build,
    Sample,
    Eval,
    Verify,
    Bounds,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Derive construction parameters and dimension ledgers.
    Params(Flags),
    /// Build a sampler and print its descriptor.
    Build(Flags),
    /// Print every sample point for one randomness value as CSV.
    Sample(Flags),
    /// Measure confidence error against subset families.
    Eval(Flags),
    /// Run the structural invariant checks.
    Verify(Flags),
    /// Tabulate predicted bounds.
    Bounds(Flags),
}

impl Command {
    pub fn split(self) -> (CommandKind, Flags) {
        match self {
            Command::Params(f) => (CommandKind::Params, f),
            Command::Build(f) => (CommandKind::Build, f),
            Command::Sample(f) => (CommandKind::Sample, f),
            Command::Eval(f) => (CommandKind::Eval, f),
            Command::Verify(f) => (CommandKind::Verify, f),
            Command::Bounds(f) => (CommandKind::Bounds, f),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    Mc,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    /// `curve` when --curve-t is given, `samp` when --delta is given, else `line`.
    Auto,
    Line,
    Curve,
    Outer,
    Inner,
    Samp,
}

#[derive(Args, Debug, Clone)]
pub struct Flags {
    /// Field: a prime power (`16`), `p^k`, or `p^k:c0,..,ck` with an explicit modulus.
    #[arg(long)]
    pub q: Option<String>,
    /// Output dimension.
    #[arg(long)]
    pub m: Option<usize>,
    /// Target confidence error, e.g. `2^-8` or `q^-2`.
    #[arg(long)]
    pub delta: Option<String>,
    /// Accuracy error, e.g. `1/10` or `0.1`.
    #[arg(long)]
    pub epsilon: Option<String>,
    /// `all` or `+`-separated families: hyperplanes, dyadic, hamming, random,
    /// curves, explicit:x,y;x,y.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Monte Carlo trials.
    #[arg(long)]
    pub trials: Option<u64>,
    /// RNG seed for Monte Carlo, random families and spot checks.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest number of states any enumeration may visit.
    #[arg(long)]
    pub cap_states: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub sampler: Option<SamplerKind>,
    /// Number of curve coefficients per coordinate (degree t-1).
    #[arg(long)]
    pub curve_t: Option<usize>,
    /// Randomness for `sample`: comma-separated hex field elements.
    #[arg(long)]
    pub x: Option<String>,
    /// Source min-entropy for the extractor/sampler bounds.
    #[arg(long, allow_hyphen_values = true)]
    pub source_k: Option<i64>,
    /// Source length for the extractor/sampler bounds.
    #[arg(long, allow_hyphen_values = true)]
    pub source_n: Option<i64>,
    /// Sample count for the pairwise and t-wise bounds.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Density for the pairwise and t-wise bounds.
    #[arg(long)]
    pub mu: Option<String>,
    /// Load a JSON run configuration; explicit flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the effective configuration as JSON and exit.
    #[arg(long)]
    pub print_config: bool,
}

/// Everything a run depends on; serializes losslessly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub field: String,
    pub m: usize,
    pub delta: Option<String>,
    pub epsilon: String,
    pub family: String,
    pub mode: ModeArg,
    pub trials: u64,
    pub rng_seed: u64,
    pub cap_states: u64,
    pub out: Option<PathBuf>,
    pub sampler: SamplerKind,
    pub curve_t: Option<usize>,
    pub x: Option<String>,
    pub source_k: Option<i64>,
    pub source_n: Option<i64>,
    pub samples: Option<u64>,
    pub mu: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            field: "2".into(),
            m: 1,
            delta: None,
            epsilon: "1/10".into(),
            family: "all".into(),
            mode: ModeArg::Exact,
            trials: 10_000,
            rng_seed: 0,
            cap_states: DEFAULT_CAP_STATES,
            out: None,
            sampler: SamplerKind::Auto,
            curve_t: None,
            x: None,
            source_k: None,
            source_n: None,
            samples: None,
            mu: "1/2".into(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn from_flags(flags: &Flags) -> Result<RunConfig, String> {
        let mut c = match &flags.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let f = flags.clone();
        if let Some(v) = f.q {
            c.field = v;
        }
        if let Some(v) = f.m {
            c.m = v;
        }
        if f.delta.is_some() {
            c.delta = f.delta;
        }
        if let Some(v) = f.epsilon {
            c.epsilon = v;
        }
        if let Some(v) = f.family {
            c.family = v;
        }
        if let Some(v) = f.mode {
            c.mode = v;
        }
        if let Some(v) = f.trials {
            c.trials = v;
        }
        if let Some(v) = f.seed {
            c.rng_seed = v;
        }
        if let Some(v) = f.cap_states {
            c.cap_states = v;
        }
        if f.out.is_some() {
            c.out = f.out;
        }
        if let Some(v) = f.sampler {
            c.sampler = v;
        }
        if f.curve_t.is_some() {
            c.curve_t = f.curve_t;
        }
        if f.x.is_some() {
            c.x = f.x;
        }
        if f.source_k.is_some() {
            c.source_k = f.source_k;
        }
        if f.source_n.is_some() {
            c.source_n = f.source_n;
        }
        if f.samples.is_some() {
            c.samples = f.samples;
        }
        if let Some(v) = f.mu {
            c.mu = v;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.cap_states == 0 {
            return Err("--cap-states must be positive".into());
        }
        if self.m == 0 {
            return Err("--m must be positive".into());
        }
        if self.mode == ModeArg::Mc && self.trials == 0 {
            return Err("--trials must be positive".into());
        }
        if self.curve_t == Some(0) {
            return Err("--curve-t must be positive".into());
        }
        Ok(())
    }

    pub fn sampler_kind(&self) -> SamplerKind {
        match self.sampler {
            SamplerKind::Auto if self.curve_t.is_some() => SamplerKind::Curve,
            SamplerKind::Auto if self.delta.is_some() => SamplerKind::Samp,
            SamplerKind::Auto => SamplerKind::Line,
            k => k,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips() {
        let c = RunConfig {
            field: "2^4".into(),
            m: 4,
            delta: Some("2^-8".into()),
            mode: ModeArg::Mc,
            curve_t: Some(3),
            out: Some(PathBuf::from("r.json")),
            source_k: Some(-2),
            ..RunConfig::default()
        };
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), c);
        let d = RunConfig::default();
        assert_eq!(serde_json::from_str::<RunConfig>(&serde_json::to_string(&d).unwrap()).unwrap(), d);
    }

    #[test]
    fn zero_caps_are_rejected() {
        let c = RunConfig { cap_states: 0, ..RunConfig::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn auto_sampler() {
        let mut c = RunConfig::default();
        assert_eq!(c.sampler_kind(), SamplerKind::Line);
        c.delta = Some("1/4".into());
        assert_eq!(c.sampler_kind(), SamplerKind::Samp);
        c.curve_t = Some(3);
        assert_eq!(c.sampler_kind(), SamplerKind::Curve);
    }
}
