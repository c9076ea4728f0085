use serde::{Deserialize, Serialize};

use super::netlist::{Netlist, Pulse};
use crate::compact_model::{make_ntype, BiasPoint, ModelCard, Polarity, Vnwfet};
use crate::error::{Error, Result};

/// Pull-down resistance that gives the tuned logic-level degradation at the
/// reference drive strength; other drive strengths scale it inversely.
pub const PASSIVE_LOAD_REFERENCE_OHMS: f64 = 4.5e5;
pub const PASSIVE_LOAD_REFERENCE_NF: u32 = 200;

pub const SUPPLY: &str = "VDD";
pub const INPUT: &str = "VIN";
pub const BIAS: &str = "VBIAS";
pub const LOAD_CAP: &str = "CL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    PassiveLoad,
    ActiveLoad,
    Complementary,
}

impl std::str::FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "passive_load" | "passive" => Ok(Topology::PassiveLoad),
            "active_load" | "active" => Ok(Topology::ActiveLoad),
            "complementary" | "cmos" => Ok(Topology::Complementary),
            other => Err(Error::InvalidParameter(format!(
                "unknown topology `{other}` (expected passive_load, active_load or complementary)"
            ))),
        }
    }
}

impl std::fmt::Display for Topology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Topology::PassiveLoad => "passive_load",
            Topology::ActiveLoad => "active_load",
            Topology::Complementary => "complementary",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputDrive {
    Dc(f64),
    Pulse(Pulse),
}

impl InputDrive {
    /// Rail-to-rail square wave.
    pub fn square(vdd: f64, frequency: f64, edge: f64) -> Self {
        InputDrive::Pulse(Pulse::square(0.0, vdd, frequency, edge, edge, 0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverterOptions {
    pub vdd: f64,
    /// Load capacitance in units of the cell's own input capacitance.
    pub fanout: f64,
    pub input: InputDrive,
    /// Passive load; `None` selects the tuned default for the drive strength.
    pub load_resistance: Option<f64>,
    /// Gate bias of the active load; `None` matches the passive load current
    /// at half supply.
    pub active_bias: Option<f64>,
    /// Nanowires in the active load device; `None` uses the drive strength.
    pub active_load_nanowires: Option<u32>,
    /// p-to-n nanowire ratio of the complementary cell.
    pub nf_ratio: u32,
    /// Pull-down card of the complementary cell; `None` derives it from the
    /// p-type card.
    pub n_card: Option<ModelCard>,
}

impl Default for InverterOptions {
    fn default() -> Self {
        InverterOptions {
            vdd: 1.0,
            fanout: 1.0,
            input: InputDrive::Dc(0.0),
            load_resistance: None,
            active_bias: None,
            active_load_nanowires: None,
            nf_ratio: 3,
            n_card: None,
        }
    }
}

impl InverterOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.vdd > 0.0 && self.vdd.is_finite()) {
            return Err(Error::InvalidParameter("vdd must be positive".into()));
        }
        if !(self.fanout >= 0.0 && self.fanout.is_finite()) {
            return Err(Error::InvalidParameter("fanout must be non-negative".into()));
        }
        if let Some(r) = self.load_resistance {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidParameter("load resistance must be positive".into()));
            }
        }
        if self.nf_ratio == 0 || self.active_load_nanowires == Some(0) {
            return Err(Error::InvalidParameter("nanowire counts must be at least 1".into()));
        }
        match self.input {
            InputDrive::Dc(v) if !v.is_finite() => Err(Error::InvalidParameter("input must be finite".into())),
            InputDrive::Pulse(p) => p.validate(),
            _ => Ok(()),
        }
    }
}

/// An inverter netlist plus the facts needed to characterize it.
#[derive(Debug, Clone, PartialEq)]
pub struct InverterCell {
    pub netlist: Netlist,
    pub topology: Topology,
    pub nf_drive: u32,
    pub vdd: f64,
    /// Total nanowires switching in the cell.
    pub nanowires: u32,
    pub input_capacitance: f64,
    pub load_capacitance: f64,
    pub load_resistance: Option<f64>,
    pub active_bias: Option<f64>,
}

impl InverterCell {
    pub const INPUT_NODE: &'static str = "in";
    pub const OUTPUT_NODE: &'static str = "out";
    pub const SUPPLY_NODE: &'static str = "vdd";
}

/// Default passive pull-down for a p-type pull-up of `nf` nanowires.
pub fn default_load_resistance(nf: u32) -> f64 {
    PASSIVE_LOAD_REFERENCE_OHMS * f64::from(PASSIVE_LOAD_REFERENCE_NF) / f64::from(nf)
}

/// Gate bias at which a p-type load between `out` and ground carries
/// `target` amperes with the output at `v_out`.
pub fn active_load_bias(card: &ModelCard, v_out: f64, target: f64) -> Result<f64> {
    let dev = Vnwfet::new(card.clone())?;
    let current = |vb: f64| -> Result<f64> { Ok(-dev.terminal_current(BiasPoint::new(vb - v_out, -v_out))?) };
    let (mut lo, mut hi) = (v_out - 2.0, v_out + 1.0);
    let (f_lo, f_hi) = (current(lo)? - target, current(hi)? - target);
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "active load cannot carry {target:e} A at {v_out} V output"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if current(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Builds one of the three inverter cells. `nf_drive` is the pull-up width
/// for the load topologies and the pull-down width for the complementary
/// cell (the pull-up gets `nf_ratio` times as many nanowires).
pub fn build_inverter(
    topology: Topology,
    nf_drive: u32,
    card_p: &ModelCard,
    options: &InverterOptions,
) -> Result<InverterCell> {
    if nf_drive == 0 {
        return Err(Error::InvalidParameter("nf_drive must be at least 1".into()));
    }
    if card_p.polarity != Polarity::PType {
        return Err(Error::InvalidCard("inverter cells are built from a p-type card".into()));
    }
    options.validate()?;
    let vdd = options.vdd;
    let cg = card_p.gate_cap_per_nanowire;
    let (vdd_node, in_node, out_node) = (
        InverterCell::SUPPLY_NODE,
        InverterCell::INPUT_NODE,
        InverterCell::OUTPUT_NODE,
    );

    let mut net = Netlist::new();
    net.add_vdc(SUPPLY, vdd_node, "0", vdd)?;
    match options.input {
        InputDrive::Dc(v) => net.add_vdc(INPUT, in_node, "0", v)?,
        InputDrive::Pulse(p) => net.add_vpulse(INPUT, in_node, "0", p)?,
    }

    let mut load_resistance = None;
    let mut active_bias = None;
    let (nanowires, input_capacitance) = match topology {
        Topology::PassiveLoad => {
            let r = options
                .load_resistance
                .unwrap_or_else(|| default_load_resistance(nf_drive));
            net.add_vnwfet("MP", card_p.with_nanowires(nf_drive), out_node, in_node, vdd_node)?;
            net.add_resistor("RL", out_node, "0", r)?;
            load_resistance = Some(r);
            (nf_drive, f64::from(nf_drive) * cg)
        }
        Topology::ActiveLoad => {
            let nf_load = options.active_load_nanowires.unwrap_or(nf_drive);
            let load_card = card_p.with_nanowires(nf_load);
            let vb = match options.active_bias {
                Some(v) => v,
                None => {
                    let r = options
                        .load_resistance
                        .unwrap_or_else(|| default_load_resistance(nf_drive));
                    active_load_bias(&load_card, 0.5 * vdd, 0.5 * vdd / r)?
                }
            };
            net.add_vdc(BIAS, "bias", "0", vb)?;
            net.add_vnwfet("MP", card_p.with_nanowires(nf_drive), out_node, in_node, vdd_node)?;
            net.add_vnwfet("ML", load_card, "0", "bias", out_node)?;
            active_bias = Some(vb);
            (nf_drive + nf_load, f64::from(nf_drive) * cg)
        }
        Topology::Complementary => {
            let nf_p = nf_drive * options.nf_ratio;
            let n_card = match &options.n_card {
                Some(c) if c.polarity == Polarity::NType => c.clone(),
                Some(_) => return Err(Error::InvalidCard("pull-down card must be n-type".into())),
                None => make_ntype(card_p)?,
            };
            net.add_vnwfet("MP", card_p.with_nanowires(nf_p), out_node, in_node, vdd_node)?;
            net.add_vnwfet("MN", n_card.with_nanowires(nf_drive), out_node, in_node, "0")?;
            let cin = f64::from(nf_p) * cg + f64::from(nf_drive) * n_card.gate_cap_per_nanowire;
            (nf_p + nf_drive, cin)
        }
    };

    let load_capacitance = options.fanout * input_capacitance;
    if load_capacitance > 0.0 {
        net.add_capacitor(LOAD_CAP, out_node, "0", load_capacitance)?;
    }
    net.validate()?;
    Ok(InverterCell {
        netlist: net,
        topology,
        nf_drive,
        vdd,
        nanowires,
        input_capacitance,
        load_capacitance,
        load_resistance,
        active_bias,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::dc_operating_point;
    use crate::circuit::netlist::ElementKind;
    use approx::assert_relative_eq;

    fn nf_of(cell: &InverterCell, name: &str) -> u32 {
        match &cell.netlist.element(name).unwrap().kind {
            ElementKind::Vnwfet { card, .. } => card.nanowires(),
            _ => panic!("{name} is not a transistor"),
        }
    }

    fn load_cap(cell: &InverterCell) -> Option<f64> {
        cell.netlist.element(LOAD_CAP).map(|e| match e.kind {
            ElementKind::Capacitor { farads, .. } => farads,
            _ => unreachable!(),
        })
    }

    #[test]
    fn complementary_composition() {
        let card = ModelCard::default_p_type();
        let cell = build_inverter(Topology::Complementary, 1, &card, &InverterOptions::default()).unwrap();
        assert_eq!(nf_of(&cell, "MP"), 3);
        assert_eq!(nf_of(&cell, "MN"), 1);
        assert_relative_eq!(load_cap(&cell).unwrap(), 4.0 * 3.25e-18, max_relative = 1e-12);
    }

    #[test]
    fn passive_composition_and_fanout() {
        let card = ModelCard::default_p_type();
        let mut opts = InverterOptions::default();
        let cell = build_inverter(Topology::PassiveLoad, 16, &card, &opts).unwrap();
        assert_eq!(nf_of(&cell, "MP"), 16);
        assert!(cell.netlist.element("RL").is_some());
        assert_relative_eq!(load_cap(&cell).unwrap(), 16.0 * 3.25e-18, max_relative = 1e-12);
        opts.fanout = 5.0;
        let five = build_inverter(Topology::PassiveLoad, 16, &card, &opts).unwrap();
        assert_relative_eq!(
            load_cap(&five).unwrap(),
            5.0 * load_cap(&cell).unwrap(),
            max_relative = 1e-12
        );
        opts.fanout = 0.0;
        let none = build_inverter(Topology::PassiveLoad, 16, &card, &opts).unwrap();
        assert!(load_cap(&none).is_none());
    }

    #[test]
    fn invalid_requests() {
        let card = ModelCard::default_p_type();
        let opts = InverterOptions::default();
        assert!(build_inverter(Topology::Complementary, 0, &card, &opts).is_err());
        let n = make_ntype(&card).unwrap();
        assert!(build_inverter(Topology::Complementary, 1, &n, &opts).is_err());
        assert!("nand".parse::<Topology>().is_err());
        assert_eq!("complementary".parse::<Topology>().unwrap(), Topology::Complementary);
        let bad = InverterOptions {
            load_resistance: Some(-1.0),
            ..InverterOptions::default()
        };
        assert!(build_inverter(Topology::PassiveLoad, 1, &card, &bad).is_err());
    }

    #[test]
    fn active_bias_matches_passive_current() {
        let card = ModelCard::default_p_type();
        let cell = build_inverter(Topology::ActiveLoad, 16, &card, &InverterOptions::default()).unwrap();
        let vb = cell.active_bias.unwrap();
        let dev = Vnwfet::new(card.with_nanowires(16)).unwrap();
        let i = -dev.terminal_current(BiasPoint::new(vb - 0.5, -0.5)).unwrap();
        assert_relative_eq!(i, 0.5 / default_load_resistance(16), max_relative = 1e-6);
    }

    #[test]
    fn complementary_logic_levels() {
        let card = ModelCard::default_p_type();
        for (vin, expect_high) in [(0.0, true), (1.0, false)] {
            let opts = InverterOptions {
                input: InputDrive::Dc(vin),
                ..InverterOptions::default()
            };
            let cell = build_inverter(Topology::Complementary, 4, &card, &opts).unwrap();
            let out = dc_operating_point(&cell.netlist).unwrap().voltage("out").unwrap();
            if expect_high {
                assert!((out - 1.0).abs() < 1e-3, "out = {out}");
            } else {
                assert!(out.abs() < 1e-3, "out = {out}");
            }
        }
    }
}
