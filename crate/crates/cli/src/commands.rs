use std::path::{Path, PathBuf};

use serde::Serialize;
use vnwfet_core::calibrate::{fit, load_iv_csv, FitParam, FitSpec, IvDataset, Weighting};
use vnwfet_core::characterize::{
    characterize_inverter, fanout_analysis, static_report, DynamicOptions, DynamicReport, FanoutOptions,
    FeasibilityMatrix, StaticReport,
};
use vnwfet_core::circuit::{transient, Netlist, Topology, TransientConfig};
use vnwfet_core::footprint::{builtin_rulesets, footprint_report, LambdaRuleSet, Technology};
use vnwfet_core::{Error, ModelCard};

use crate::config::Resolved;
use crate::{manifest, Cli, Command, FitArgs, IvArgs, SimArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

/// Attaches the flag or file a core error came from.
fn context<T>(what: &str, r: vnwfet_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| match e {
        e if e.is_numerical() => CliError::Core(e),
        e => CliError::Input(format!("{what}: {e}")),
    })
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = cli.common.resolve()?;
    std::fs::create_dir_all(&cfg.out)?;
    let mut inputs: Vec<PathBuf> = cfg.config.iter().chain(cfg.card.iter()).cloned().collect();
    let (name, outputs) = match cli.command {
        Command::Iv(args) => ("iv", iv(&cfg, &args)?),
        Command::Sim(args) => {
            inputs.extend(args.netlist.iter().cloned());
            ("sim", sim(&cfg, &args)?)
        }
        Command::Metrics => ("metrics", metrics(&cfg)?),
        Command::Fit(args) => {
            inputs.push(args.data.clone());
            inputs.extend(args.spec.iter().cloned());
            ("fit", fit_cmd(&cfg, &args)?)
        }
        Command::Footprint => {
            inputs.extend(cfg.ruleset.iter().cloned());
            ("footprint", footprint(&cfg)?)
        }
    };
    manifest::write(name, &inputs, &cfg, outputs)?;
    Ok(())
}

fn load_card(cfg: &Resolved) -> Result<ModelCard, CliError> {
    match &cfg.card {
        Some(path) => context(&format!("--card {}", path.display()), ModelCard::load(path)),
        None => Ok(ModelCard::default_p_type()),
    }
}

/// Card for device-level commands, where `--nf` sets the nanowire count.
fn device_card(cfg: &Resolved) -> Result<ModelCard, CliError> {
    let card = load_card(cfg)?;
    if cfg.nf_explicit {
        return Ok(card.with_nanowires(single("--nf", &cfg.nf)?));
    }
    Ok(card)
}

fn single<T: Copy + std::fmt::Debug>(flag: &str, values: &[T]) -> Result<T, CliError> {
    match values {
        [v] => Ok(*v),
        _ => Err(CliError::Input(format!(
            "{flag} takes a single value here, got {values:?}"
        ))),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn parse_sweep(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Input(format!("--vgs `{spec}`: expected START:STOP:STEP"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step == 0.0 || (stop - start) * step <= 0.0 {
        return Err(CliError::Input(format!("--vgs `{spec}`: empty sweep range")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

fn iv(cfg: &Resolved, args: &IvArgs) -> Result<Vec<PathBuf>, CliError> {
    let card = device_card(cfg)?;
    let vgs = parse_sweep(&args.vgs)?;
    if args.vds.is_empty() || args.vds.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Input("--vds needs finite values".into()));
    }
    let biases: Vec<(f64, f64)> = args
        .vds
        .iter()
        .flat_map(|&vds| vgs.iter().map(move |&vg| (vg, vds)))
        .collect();
    let data = context("iv", IvDataset::simulate(&card, &biases))?;
    let path = cfg.out.join("iv.csv");
    data.save_csv(&path)?;
    Ok(vec![path])
}

fn dynamic_options(cfg: &Resolved, fanout: f64) -> DynamicOptions {
    DynamicOptions {
        vdd: cfg.vdd,
        frequency: cfg.freq,
        fanout,
        periods: cfg.periods,
        dt: cfg.dt,
        ..DynamicOptions::default()
    }
}

fn sim(cfg: &Resolved, args: &SimArgs) -> Result<Vec<PathBuf>, CliError> {
    let waves_path = cfg.out.join("waveforms.csv");
    if let Some(path) = &args.netlist {
        let net = context(&format!("--netlist {}", path.display()), Netlist::load(path))?;
        let t_stop = args
            .tstop
            .ok_or_else(|| CliError::Input("--tstop is required with --netlist".into()))?;
        let tc = TransientConfig::new(t_stop).with_step(cfg.dt);
        context("--tstop/--dt", tc.validate())?;
        let waves = context("transient", transient(&net, &tc))?;
        waves.save_csv(&waves_path)?;
        return Ok(vec![waves_path]);
    }
    let card = load_card(cfg)?;
    let nf = single("--nf", &cfg.nf)?;
    let fanout = single("--fanout", &cfg.fanout)?;
    let opts = dynamic_options(cfg, fanout);
    let (report, waves) = context("sim", characterize_inverter(cfg.topology, nf, &card, &opts))?;
    waves.save_csv(&waves_path)?;
    let report_path = cfg.out.join("metrics.json");
    write_json(&report_path, &report)?;
    Ok(vec![waves_path, report_path])
}

#[derive(Serialize)]
struct MetricsReport {
    #[serde(rename = "static")]
    static_metrics: StaticReport,
    dynamic: Vec<DynamicReport>,
    fanout: Option<FeasibilityMatrix>,
}

fn metrics(cfg: &Resolved) -> Result<Vec<PathBuf>, CliError> {
    let card = load_card(cfg)?;
    let static_metrics = if cfg.nf.len() >= 2 {
        context("static metrics", static_report(&card, &cfg.nf, cfg.vdd))?
    } else {
        return Err(CliError::Input(
            "--nf needs at least two counts for the leakage fit".into(),
        ));
    };
    let mut dynamic = Vec::new();
    for &nf in &cfg.nf {
        for &fo in &cfg.fanout {
            let (report, _) = context(
                "dynamic metrics",
                characterize_inverter(cfg.topology, nf, &card, &dynamic_options(cfg, fo)),
            )?;
            dynamic.push(report);
        }
    }
    let fanout = match cfg.topology {
        Topology::Complementary => {
            let opts = FanoutOptions {
                vdd: cfg.vdd,
                dt: cfg.dt,
                ..FanoutOptions::default()
            };
            Some(context(
                "fanout analysis",
                fanout_analysis(&card, &cfg.nf, &cfg.fanout, cfg.freq, &opts),
            )?)
        }
        _ => None,
    };
    let mut outputs = vec![cfg.out.join("metrics.json"), cfg.out.join("static.csv")];
    static_metrics.write_csv(std::fs::File::create(&outputs[1])?)?;
    if let Some(m) = &fanout {
        let p = cfg.out.join("fanout.csv");
        m.write_csv(std::fs::File::create(&p)?)?;
        outputs.push(p);
    }
    write_json(
        &outputs[0],
        &MetricsReport {
            static_metrics,
            dynamic,
            fanout,
        },
    )?;
    Ok(outputs)
}

fn fit_cmd(cfg: &Resolved, args: &FitArgs) -> Result<Vec<PathBuf>, CliError> {
    let card0 = device_card(cfg)?;
    let data = context(&format!("--data {}", args.data.display()), load_iv_csv(&args.data))?;
    let mut spec = match &args.spec {
        Some(path) => context(&format!("--spec {}", path.display()), FitSpec::load(path))?,
        None => {
            if args.params.is_empty() {
                return Err(CliError::Input("give --spec or --params".into()));
            }
            let params = args
                .params
                .iter()
                .map(|p| p.parse::<FitParam>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Input(format!("--params: {e}")))?;
            FitSpec::new(&params)
        }
    };
    if let Some(w) = &args.weighting {
        spec.weighting = serde_json::from_value::<Weighting>(serde_json::Value::String(w.clone()))
            .map_err(|_| CliError::Input(format!("--weighting: unknown `{w}`")))?;
    }
    if args.spec.is_none() || cfg.seed != 0 {
        spec.seed = cfg.seed;
    }
    let (card, report) = context("fit", fit(&card0, &data, &spec))?;
    let card_path = cfg.out.join("card.json");
    card.save(&card_path)?;
    let residual_path = cfg.out.join("residuals.csv");
    report.write_residual_csv(std::fs::File::create(&residual_path)?)?;
    let report_path = cfg.out.join("fit_report.json");
    write_json(&report_path, &report)?;
    println!(
        "rms {:.4} decades, {} ({} iterations, start {})",
        report.rms_decades,
        if report.converged { "converged" } else { "not converged" },
        report.iterations,
        report.best_start
    );
    Ok(vec![card_path, residual_path, report_path])
}

fn footprint(cfg: &Resolved) -> Result<Vec<PathBuf>, CliError> {
    let (mut finfet, mut vnwfet) = builtin_rulesets();
    for path in &cfg.ruleset {
        let rules = context(&format!("--ruleset {}", path.display()), LambdaRuleSet::load(path))?;
        match rules.technology {
            Technology::Finfet => finfet = rules,
            Technology::Vnwfet => vnwfet = rules,
        }
    }
    let report = context("footprint", footprint_report(&finfet, &vnwfet))?;
    print!("{report}");
    let path = cfg.out.join("footprint.json");
    write_json(&path, &report)?;
    Ok(vec![path])
}
