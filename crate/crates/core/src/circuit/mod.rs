//! Netlists and a small modified-nodal-analysis simulator: DC operating
//! point, DC sweep and implicit transient analysis.

mod inverter;
mod mna;
mod netlist;
mod waveform;

pub use inverter::{
    active_load_bias, build_inverter, default_load_resistance, InputDrive, InverterCell, InverterOptions, Topology,
    BIAS, INPUT, LOAD_CAP, PASSIVE_LOAD_REFERENCE_NF, PASSIVE_LOAD_REFERENCE_OHMS, SUPPLY,
};
pub use mna::{
    dc_operating_point, dc_operating_point_with, dc_sweep, transient, Integration, OperatingPoint, TransientConfig,
};
pub use netlist::{CardRef, Element, ElementFile, ElementKind, Netlist, NetlistFile, NodeId, Pulse, GROUND};
pub use waveform::{Crossing, Waveform, WaveformSet};
