use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use vnwfet_core::circuit::Topology;

use crate::commands::CliError;

/// Flags shared by every command. Each may also come from `--config`;
/// flags win over the file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Model card JSON; the built-in calibrated p-type card otherwise.
    #[arg(long, global = true)]
    pub card: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized procedures (fit multi-starts).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Supply voltage, volts.
    #[arg(long, global = true)]
    pub vdd: Option<f64>,
    /// Input frequency, hertz.
    #[arg(long, global = true)]
    pub freq: Option<f64>,
    /// Nanowire counts, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub nf: Option<Vec<u32>>,
    /// Fanouts, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub fanout: Option<Vec<f64>>,
    /// passive_load, active_load or complementary.
    #[arg(long, global = true)]
    pub topology: Option<String>,
    /// λ-rule set JSON replacing the built-in set of the same technology.
    /// May be repeated.
    #[arg(long, global = true)]
    pub ruleset: Option<Vec<PathBuf>>,
    /// Transient time step, seconds.
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Simulated input periods.
    #[arg(long, global = true)]
    pub periods: Option<u32>,
    /// JSON file holding any of the options above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    card: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    vdd: Option<f64>,
    freq: Option<f64>,
    nf: Option<Vec<u32>>,
    fanout: Option<Vec<f64>>,
    topology: Option<String>,
    ruleset: Option<Vec<PathBuf>>,
    dt: Option<f64>,
    periods: Option<u32>,
}

/// Every option after defaults are applied. Echoed into the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub card: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub vdd: f64,
    pub freq: f64,
    pub nf: Vec<u32>,
    #[serde(skip)]
    pub nf_explicit: bool,
    pub fanout: Vec<f64>,
    pub topology: Topology,
    pub ruleset: Vec<PathBuf>,
    pub dt: f64,
    pub periods: u32,
    pub config: Option<PathBuf>,
}

fn relative_to(base: &Path, p: PathBuf) -> PathBuf {
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

impl Overrides {
    pub fn resolve(self) -> Result<Resolved, CliError> {
        let file = match &self.config {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                let mut cfg: ConfigFile = serde_json::from_str(&text)
                    .map_err(|e| CliError::Input(format!("{}:{}: {e}", path.display(), e.line())))?;
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.card = cfg.card.map(|p| relative_to(base, p));
                cfg.out = cfg.out.map(|p| relative_to(base, p));
                cfg.ruleset = cfg
                    .ruleset
                    .map(|v| v.into_iter().map(|p| relative_to(base, p)).collect());
                cfg
            }
            None => ConfigFile::default(),
        };
        let nf_explicit = self.nf.is_some() || file.nf.is_some();
        let topology = self
            .topology
            .or(file.topology)
            .unwrap_or_else(|| "complementary".into());
        let resolved = Resolved {
            card: self.card.or(file.card),
            out: self.out.or(file.out).unwrap_or_else(|| PathBuf::from("out")),
            seed: self.seed.or(file.seed).unwrap_or(0),
            vdd: self.vdd.or(file.vdd).unwrap_or(1.0),
            freq: self.freq.or(file.freq).unwrap_or(1e9),
            nf: self.nf.or(file.nf).unwrap_or_else(|| vec![1, 2, 4, 8, 16]),
            nf_explicit,
            fanout: self.fanout.or(file.fanout).unwrap_or_else(|| vec![1.0]),
            topology: topology
                .parse()
                .map_err(|e: vnwfet_core::Error| CliError::Input(e.to_string()))?,
            ruleset: self.ruleset.or(file.ruleset).unwrap_or_default(),
            dt: self.dt.or(file.dt).unwrap_or(1e-13),
            periods: self.periods.or(file.periods).unwrap_or(3),
            config: self.config,
        };
        if resolved.nf.is_empty() || resolved.nf.contains(&0) {
            return Err(CliError::Input("--nf needs positive nanowire counts".into()));
        }
        if resolved.fanout.is_empty() || resolved.fanout.iter().any(|f| !(f.is_finite() && *f >= 0.0)) {
            return Err(CliError::Input("--fanout needs non-negative values".into()));
        }
        for (name, v) in [
            ("--vdd", resolved.vdd),
            ("--freq", resolved.freq),
            ("--dt", resolved.dt),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Input(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(resolved)
    }
}
