//! Figures of merit: on/off currents and leakage, propagation delay, logic
//! level degradation, switching energy and fanout feasibility.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    build_inverter, transient, InputDrive, InverterCell, InverterOptions, Topology, TransientConfig, Waveform,
    WaveformSet, SUPPLY,
};
use crate::compact_model::{BiasPoint, ModelCard, Vnwfet};
use crate::error::{Error, Result};
use crate::numerics::linear_regression;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnOff {
    pub nanowires: u32,
    pub i_on_a: f64,
    pub i_off_a: f64,
    pub ratio: f64,
}

/// Pull-up on and off currents of a p-type device with its source on the
/// supply: input low gives `vgs = vds = -vdd`, input high gives `vgs = 0`.
/// For an n-type card the biases are mirrored.
pub fn ion_ioff(card: &ModelCard, vdd: f64) -> Result<OnOff> {
    let dev = Vnwfet::new(card.clone())?;
    let s = card.polarity.sign();
    let i_on = dev.terminal_current(BiasPoint::new(s * vdd, s * vdd))?.abs();
    let i_off = dev.terminal_current(BiasPoint::new(0.0, s * vdd))?.abs();
    let ratio = if i_off > 0.0 {
        i_on / i_off
    } else {
        log::warn!("off current is exactly zero; on/off ratio reported as infinite");
        f64::INFINITY
    };
    Ok(OnOff {
        nanowires: card.nanowires(),
        i_on_a: i_on,
        i_off_a: i_off,
        ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakageFit {
    /// Off current added per nanowire, A.
    pub slope_a_per_nanowire: f64,
    pub intercept_a: f64,
    pub r_squared: f64,
    /// Slope divided by the nanowire cross-section, A/m^2.
    pub density_a_per_m2: f64,
}

/// Least-squares slope of off current against nanowire count.
pub fn fit_leakage(nanowires: &[f64], i_off: &[f64], diameter: f64) -> Result<LeakageFit> {
    if nanowires.len() < 2 {
        return Err(Error::InvalidParameter(
            "leakage fit needs at least two nanowire counts".into(),
        ));
    }
    let first = nanowires[0];
    if nanowires.iter().all(|&n| n == first) {
        return Err(Error::InvalidParameter(
            "leakage fit needs distinct nanowire counts".into(),
        ));
    }
    if !(diameter > 0.0) {
        return Err(Error::InvalidParameter("diameter must be positive".into()));
    }
    let (slope, intercept, r2) = linear_regression(nanowires, i_off)?;
    let area = std::f64::consts::PI * 0.25 * diameter * diameter;
    Ok(LeakageFit {
        slope_a_per_nanowire: slope,
        intercept_a: intercept,
        r_squared: r2,
        density_a_per_m2: slope / area,
    })
}

pub fn leakage_slope(card: &ModelCard, nf_list: &[u32], vdd: f64) -> Result<LeakageFit> {
    let points = nf_list
        .iter()
        .map(|&nf| ion_ioff(&card.with_nanowires(nf), vdd))
        .collect::<Result<Vec<_>>>()?;
    let nf: Vec<f64> = points.iter().map(|p| f64::from(p.nanowires)).collect();
    let off: Vec<f64> = points.iter().map(|p| p.i_off_a).collect();
    fit_leakage(&nf, &off, card.geometry.diameter())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticReport {
    pub vdd_v: f64,
    pub points: Vec<OnOff>,
    pub leakage: LeakageFit,
}

pub fn static_report(card: &ModelCard, nf_list: &[u32], vdd: f64) -> Result<StaticReport> {
    let points = nf_list
        .iter()
        .map(|&nf| ion_ioff(&card.with_nanowires(nf), vdd))
        .collect::<Result<Vec<_>>>()?;
    let nf: Vec<f64> = points.iter().map(|p| f64::from(p.nanowires)).collect();
    let off: Vec<f64> = points.iter().map(|p| p.i_off_a).collect();
    let leakage = fit_leakage(&nf, &off, card.geometry.diameter())?;
    Ok(StaticReport {
        vdd_v: vdd,
        points,
        leakage,
    })
}

impl StaticReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["nanowires", "i_on_a", "i_off_a", "ratio"])?;
        for p in &self.points {
            out.write_record([
                p.nanowires.to_string(),
                format!("{:e}", p.i_on_a),
                format!("{:e}", p.i_off_a),
                format!("{:e}", p.ratio),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Mean low-to-high and high-to-low output delays, from 50% crossings. Each
/// output crossing is paired with the nearest input crossing at or before it.
pub fn propagation_delay(vin: &Waveform, vout: &Waveform, vdd: f64) -> Result<(f64, f64)> {
    let half = 0.5 * vdd;
    let inputs = vin.crossings(half);
    if inputs.is_empty() {
        return Err(Error::NoTransition("input never crosses half supply".into()));
    }
    let (mut rise, mut fall) = (Vec::new(), Vec::new());
    for c in vout.crossings(half) {
        let Some(cause) = inputs.iter().rev().find(|i| i.time <= c.time) else {
            continue;
        };
        let d = c.time - cause.time;
        if c.rising {
            rise.push(d);
        } else {
            fall.push(d);
        }
    }
    let mean = |v: &[f64], what: &str| -> Result<f64> {
        if v.is_empty() {
            Err(Error::NoTransition(format!(
                "no {what} output transition after an input edge"
            )))
        } else {
            Ok(v.iter().sum::<f64>() / v.len() as f64)
        }
    };
    Ok((mean(&rise, "rising")?, mean(&fall, "falling")?))
}

/// `(high_degradation, low_overshoot)` as fractions of the supply, the worst
/// over all complete high and low segments between 50% crossings.
pub fn level_degradation(vout: &Waveform, vdd: f64) -> Result<(f64, f64)> {
    let crossings = vout.crossings(0.5 * vdd);
    if crossings.len() < 2 {
        return Err(Error::Unsettled("output does not toggle across half supply".into()));
    }
    let (mut worst_high, mut worst_low) = (f64::INFINITY, f64::NEG_INFINITY);
    for pair in crossings.windows(2) {
        let segment = vout.slice(pair[0].time, pair[1].time)?;
        if pair[0].rising {
            worst_high = worst_high.min(segment.max());
        } else {
            worst_low = worst_low.max(segment.min());
        }
    }
    if !worst_high.is_finite() || !worst_low.is_finite() {
        return Err(Error::Unsettled(
            "need one complete high and one complete low segment".into(),
        ));
    }
    let high = ((vdd - worst_high) / vdd).max(0.0);
    let low = (worst_low / vdd).max(0.0);
    Ok((high, low))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Energy {
    pub charge_c: f64,
    pub energy_per_transition_j: f64,
    pub energy_per_nanowire_j: f64,
}

/// Charge and energy drawn from the supply over one low-to-high output
/// transition window.
pub fn dynamic_energy(supply_current: &Waveform, vdd: f64, nf_total: u32) -> Result<Energy> {
    if nf_total == 0 {
        return Err(Error::InvalidParameter("nanowire count must be at least 1".into()));
    }
    let q = supply_current.integral();
    if !(q > 0.0) {
        return Err(Error::NoTransition(format!(
            "supply delivered no charge in the window ({q:e} C)"
        )));
    }
    let e = q * vdd;
    Ok(Energy {
        charge_c: q,
        energy_per_transition_j: e,
        energy_per_nanowire_j: e / f64::from(nf_total),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicOptions {
    pub vdd: f64,
    pub frequency: f64,
    /// Input rise and fall time.
    pub edge: f64,
    pub fanout: f64,
    /// Simulated input periods; metrics use every period after the first.
    pub periods: u32,
    pub dt: f64,
    pub load_resistance: Option<f64>,
    pub active_bias: Option<f64>,
}

impl Default for DynamicOptions {
    fn default() -> Self {
        DynamicOptions {
            vdd: 1.0,
            frequency: 1e9,
            edge: 10e-12,
            fanout: 1.0,
            periods: 3,
            dt: 0.1e-12,
            load_resistance: None,
            active_bias: None,
        }
    }
}

impl DynamicOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.frequency > 0.0 && self.frequency.is_finite()) {
            return Err(Error::InvalidParameter("frequency must be positive".into()));
        }
        if self.periods < 2 {
            return Err(Error::InvalidParameter("at least two periods are needed".into()));
        }
        if !(self.edge > 0.0 && 2.0 * self.edge < 1.0 / self.frequency) {
            return Err(Error::InvalidParameter(
                "edge time must be positive and below half a period".into(),
            ));
        }
        Ok(())
    }

    pub fn period(&self) -> f64 {
        1.0 / self.frequency
    }

    fn inverter_options(&self) -> InverterOptions {
        InverterOptions {
            vdd: self.vdd,
            fanout: self.fanout,
            input: InputDrive::square(self.vdd, self.frequency, self.edge),
            load_resistance: self.load_resistance,
            active_bias: self.active_bias,
            ..InverterOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicReport {
    pub topology: Topology,
    pub nf_drive: u32,
    pub fanout: f64,
    pub frequency_hz: f64,
    pub t_plh_s: f64,
    pub t_phl_s: f64,
    pub level_degradation_high: f64,
    pub overshoot_low: f64,
    pub energy_per_transition_j: f64,
    /// Energy divided by the cell's drive nanowire count.
    pub energy_per_nanowire_j: f64,
    pub load_capacitance_f: f64,
    pub load_resistance_ohm: Option<f64>,
    pub active_bias_v: Option<f64>,
}

/// Simulates an inverter cell driven by a square wave.
pub fn simulate_inverter(cell: &InverterCell, opts: &DynamicOptions) -> Result<WaveformSet> {
    opts.validate()?;
    let t_stop = f64::from(opts.periods) * opts.period();
    let cfg = TransientConfig::new(t_stop).with_step(opts.dt);
    transient(&cell.netlist, &cfg)
}

/// Builds, simulates and measures one inverter cell.
pub fn characterize_inverter(
    topology: Topology,
    nf_drive: u32,
    card: &ModelCard,
    opts: &DynamicOptions,
) -> Result<(DynamicReport, WaveformSet)> {
    opts.validate()?;
    let cell = build_inverter(topology, nf_drive, card, &opts.inverter_options())?;
    let waves = simulate_inverter(&cell, opts)?;
    let report = measure_inverter(&cell, &waves, opts)?;
    Ok((report, waves))
}

pub fn measure_inverter(cell: &InverterCell, waves: &WaveformSet, opts: &DynamicOptions) -> Result<DynamicReport> {
    let period = opts.period();
    let t_end = f64::from(opts.periods) * period;
    let settled = period;
    let vin = waves
        .waveform(&format!("v({})", InverterCell::INPUT_NODE))?
        .slice(settled, t_end)?;
    let vout = waves
        .waveform(&format!("v({})", InverterCell::OUTPUT_NODE))?
        .slice(settled, t_end)?;
    let (t_plh, t_phl) = propagation_delay(&vin, &vout, cell.vdd)?;
    let (high, low) = level_degradation(&vout, cell.vdd)?;

    // The last input falling edge starts the output's low-to-high transition.
    let pulse_fall_start = 0.5 * period - 0.5 * opts.edge;
    let window_start = t_end - period + pulse_fall_start;
    let supply = waves.waveform(&format!("i({SUPPLY})"))?.slice(window_start, t_end)?;
    let energy = dynamic_energy(&supply, cell.vdd, cell.nf_drive)?;

    Ok(DynamicReport {
        topology: cell.topology,
        nf_drive: cell.nf_drive,
        fanout: opts.fanout,
        frequency_hz: opts.frequency,
        t_plh_s: t_plh,
        t_phl_s: t_phl,
        level_degradation_high: high,
        overshoot_low: low,
        energy_per_transition_j: energy.energy_per_transition_j,
        energy_per_nanowire_j: energy.energy_per_nanowire_j,
        load_capacitance_f: cell.load_capacitance,
        load_resistance_ohm: cell.load_resistance,
        active_bias_v: cell.active_bias,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanoutCell {
    pub nanowires: u32,
    pub fanout: f64,
    /// `None` when the simulation failed; see `error`.
    pub feasible: Option<bool>,
    /// Highest output level reached in the charging half-period, fraction of
    /// the supply.
    pub reached_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityMatrix {
    pub frequency_hz: f64,
    pub threshold: f64,
    pub nanowires: Vec<u32>,
    pub fanouts: Vec<f64>,
    /// Row-major: one row per nanowire count.
    pub cells: Vec<FanoutCell>,
}

impl FeasibilityMatrix {
    pub fn get(&self, nanowires: u32, fanout: f64) -> Option<&FanoutCell> {
        self.cells
            .iter()
            .find(|c| c.nanowires == nanowires && c.fanout == fanout)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["nanowires", "fanout", "feasible", "reached_fraction", "error"])?;
        for c in &self.cells {
            out.write_record([
                c.nanowires.to_string(),
                c.fanout.to_string(),
                c.feasible.map_or_else(String::new, |f| f.to_string()),
                format!("{:e}", c.reached_fraction),
                c.error.clone().unwrap_or_default(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanoutOptions {
    pub vdd: f64,
    pub edge: f64,
    pub dt: f64,
    pub periods: u32,
    /// Fraction of the supply the output must reach.
    pub threshold: f64,
}

impl Default for FanoutOptions {
    fn default() -> Self {
        FanoutOptions {
            vdd: 1.0,
            edge: 10e-12,
            dt: 0.1e-12,
            periods: 2,
            threshold: 0.9,
        }
    }
}

fn fanout_point(card: &ModelCard, nf: u32, fanout: f64, freq: f64, opts: &FanoutOptions) -> Result<f64> {
    let dyn_opts = DynamicOptions {
        vdd: opts.vdd,
        frequency: freq,
        edge: opts.edge,
        fanout,
        periods: opts.periods,
        dt: opts.dt,
        ..DynamicOptions::default()
    };
    dyn_opts.validate()?;
    let cell = build_inverter(Topology::Complementary, nf, card, &dyn_opts.inverter_options())?;
    let waves = simulate_inverter(&cell, &dyn_opts)?;
    let period = dyn_opts.period();
    let t_end = f64::from(opts.periods) * period;
    let vout = waves
        .waveform(&format!("v({})", InverterCell::OUTPUT_NODE))?
        .slice(t_end - 0.5 * period, t_end)?;
    Ok(vout.max() / opts.vdd)
}

/// Simulates the self-loaded complementary inverter for every (NF, fanout)
/// pair and marks whether the output charges to `threshold * vdd` within the
/// half-period in which the pull-up is on.
pub fn fanout_analysis(
    card: &ModelCard,
    nf_range: &[u32],
    fanout_range: &[f64],
    freq: f64,
    opts: &FanoutOptions,
) -> Result<FeasibilityMatrix> {
    if nf_range.is_empty() || fanout_range.is_empty() {
        return Err(Error::InvalidParameter("fanout analysis needs nonempty ranges".into()));
    }
    if !(freq > 0.0 && freq.is_finite()) {
        return Err(Error::InvalidParameter("frequency must be positive".into()));
    }
    if !(opts.threshold > 0.0 && opts.threshold <= 1.0) {
        return Err(Error::InvalidParameter("threshold must be in (0, 1]".into()));
    }
    let jobs: Vec<(u32, f64)> = nf_range
        .iter()
        .flat_map(|&nf| fanout_range.iter().map(move |&fo| (nf, fo)))
        .collect();
    let cells = jobs
        .par_iter()
        .map(|&(nf, fo)| match fanout_point(card, nf, fo, freq, opts) {
            Ok(frac) => FanoutCell {
                nanowires: nf,
                fanout: fo,
                feasible: Some(frac >= opts.threshold),
                reached_fraction: frac,
                error: None,
            },
            Err(e) => FanoutCell {
                nanowires: nf,
                fanout: fo,
                feasible: None,
                reached_fraction: f64::NAN,
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(FeasibilityMatrix {
        frequency_hz: freq,
        threshold: opts.threshold,
        nanowires: nf_range.to_vec(),
        fanouts: fanout_range.to_vec(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn square(delay: f64, top: f64, n: usize) -> Waveform {
        // Trapezoid train: period 1 ns, 10 ps edges, sampled every 1 ps.
        let times: Vec<f64> = (0..n).map(|k| k as f64 * 1e-12).collect();
        Waveform::from_fn("v", times, |t| {
            let tau = (t - delay).rem_euclid(1e-9);
            let up = if tau < 10e-12 {
                tau / 10e-12
            } else if tau < 500e-12 {
                1.0
            } else if tau < 510e-12 {
                1.0 - (tau - 500e-12) / 10e-12
            } else {
                0.0
            };
            up * top
        })
        .unwrap()
    }

    #[test]
    fn wire_has_zero_delay() {
        let v = square(0.0, 1.0, 3000);
        let (r, f) = propagation_delay(&v, &v, 1.0).unwrap();
        assert_eq!((r, f), (0.0, 0.0));
    }

    #[test]
    fn shifted_copy_gives_shift() {
        let vin = square(0.0, 1.0, 3000);
        let vout = square(7e-12, 1.0, 3000);
        let (r, f) = propagation_delay(&vin, &vout, 1.0).unwrap();
        assert_relative_eq!(r, 7e-12, max_relative = 1e-9);
        assert_relative_eq!(f, 7e-12, max_relative = 1e-9);
    }

    #[test]
    fn delay_invariant_under_shift_and_resampling() {
        let vin = square(0.0, 1.0, 3000);
        let vout = square(23e-12, 1.0, 3000);
        let base = propagation_delay(&vin, &vout, 1.0).unwrap();
        let shifted = propagation_delay(&vin.shifted(3e-11), &vout.shifted(3e-11), 1.0).unwrap();
        assert_relative_eq!(base.0, shifted.0, max_relative = 1e-9);
        let fine: Vec<f64> = (0..6000).map(|k| k as f64 * 0.5e-12).collect();
        let resample = |w: &Waveform| Waveform::from_fn("v", fine.clone(), |t| w.value_at(t)).unwrap();
        let dense = propagation_delay(&resample(&vin), &resample(&vout), 1.0).unwrap();
        assert!((dense.0 - base.0).abs() <= 0.01 * base.0);
        assert!((dense.1 - base.1).abs() <= 0.01 * base.1);
    }

    #[test]
    fn flat_output_has_no_transition() {
        let vin = square(0.0, 1.0, 3000);
        let flat = Waveform::from_fn("v", vin.times.clone(), |_| 0.2).unwrap();
        assert!(matches!(
            propagation_delay(&vin, &flat, 1.0),
            Err(Error::NoTransition(_))
        ));
        assert!(matches!(level_degradation(&flat, 1.0), Err(Error::Unsettled(_))));
    }

    #[test]
    fn degradation_of_constructed_waveforms() {
        let (h, l) = level_degradation(&square(0.0, 1.0, 3000), 1.0).unwrap();
        assert_relative_eq!(h, 0.0);
        assert_relative_eq!(l, 0.0);
        let (h, _) = level_degradation(&square(0.0, 0.85, 3000), 1.0).unwrap();
        assert_relative_eq!(h, 0.15, epsilon = 1e-12);
        let lifted = square(0.0, 1.0, 3000);
        let lifted = Waveform::from_fn("v", lifted.times.clone(), |t| 0.15 + 0.85 * lifted.value_at(t)).unwrap();
        let (h, l) = level_degradation(&lifted, 1.0).unwrap();
        assert_relative_eq!(h, 0.0, epsilon = 1e-12);
        assert_relative_eq!(l, 0.15, epsilon = 1e-12);
    }

    #[test]
    fn capacitor_charge_energy() {
        // Constant current charging C = 10 aF to 1 V over 100 ps.
        let c = 10e-18;
        let times: Vec<f64> = (0..=100).map(|k| k as f64 * 1e-12).collect();
        let i = Waveform::from_fn("i", times, |_| c * 1.0 / 100e-12).unwrap();
        let e = dynamic_energy(&i, 1.0, 1).unwrap();
        assert_relative_eq!(e.charge_c, c, max_relative = 1e-12);
        let e2 = dynamic_energy(&i, 1.0, 4).unwrap();
        assert_relative_eq!(e2.energy_per_nanowire_j, c / 4.0, max_relative = 1e-12);
        let zero = Waveform::from_fn("i", vec![0.0, 1.0], |_| 0.0).unwrap();
        assert!(dynamic_energy(&zero, 1.0, 1).is_err());
    }

    #[test]
    fn leakage_fit_exact_and_order_free() {
        let nf = [10.0, 30.0, 100.0, 300.0];
        let off: Vec<f64> = nf.iter().map(|n| 2e-12 + 61e-12 * n).collect();
        let a = fit_leakage(&nf, &off, 16e-9).unwrap();
        assert_relative_eq!(a.slope_a_per_nanowire, 61e-12, max_relative = 1e-12);
        let rev_nf: Vec<f64> = nf.iter().rev().copied().collect();
        let rev_off: Vec<f64> = off.iter().rev().copied().collect();
        let b = fit_leakage(&rev_nf, &rev_off, 16e-9).unwrap();
        assert_relative_eq!(a.slope_a_per_nanowire, b.slope_a_per_nanowire, max_relative = 1e-12);
        // 61 pA over a 16 nm disc is about 0.3 uA/um^2.
        assert_relative_eq!(a.density_a_per_m2 * 1e-6, 0.3034, max_relative = 1e-3);
        assert!(fit_leakage(&[10.0], &[1.0], 16e-9).is_err());
        assert!(fit_leakage(&[10.0, 10.0], &[1.0, 2.0], 16e-9).is_err());
    }

    #[test]
    fn zero_leakage_gives_infinite_ratio() {
        let mut card = ModelCard::default_p_type();
        card.gidl_a = 0.0;
        // Threshold so far above zero bias that the off-state charge underflows.
        card.flatband_voltage = 30.0;
        let r = ion_ioff(&card, 40.0).unwrap();
        assert_eq!(r.i_off_a, 0.0);
        assert!(r.i_on_a > 0.0);
        assert!(r.ratio.is_infinite());
    }

    #[test]
    fn ratio_unchanged_by_nf_without_access_resistance() {
        let mut card = ModelCard::default_p_type();
        card.series_source = 0.0;
        card.series_drain = 0.0;
        let a = ion_ioff(&card.with_nanowires(8), 1.0).unwrap();
        let b = ion_ioff(&card.with_nanowires(16), 1.0).unwrap();
        assert_relative_eq!(a.ratio, b.ratio, max_relative = 1e-12);
    }
}
