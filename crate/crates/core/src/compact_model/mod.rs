//! Junctionless gate-all-around vertical nanowire FET compact model.
//!
//! The mobile charge is split into a depletion component `Q_DP` and a
//! complementary (accumulation) component `Q_C`, each an explicit Lambert-W
//! solution of the unified charge control relation. The drain current is the
//! difference of a charge primitive between the channel ends, corrected for
//! velocity saturation, channel shortening and shared access resistances.
//! Band-to-band tunneling at the drain overlap is added as a separate branch.
//!
//! All equations are evaluated in an n-like frame; p-type cards flip the sign
//! of terminal voltages and of the returned current. `R` is the nanowire
//! radius everywhere, card files carry the diameter.

mod card;
mod model;

pub use card::{DeviceGeometry, ModelCard, ModelCardFile, OxideModel, PinchOffRule, Polarity};
pub use model::{
    charge_complementary, charge_depletion, charges, current_primitive, derive_quantities, drain_current,
    effective_length, effective_mobility, gidl_current, long_channel_current, make_ntype, oxide_capacitance,
    terminal_current, BiasPoint, ChannelEvaluation, ChargePair, DerivedQuantities, Vnwfet,
};

pub mod constants {
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    pub const BOLTZMANN: f64 = 1.380_649e-23;
    pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
    pub const EPS_SI_REL: f64 = 11.7;
    pub const EPS_OX_REL: f64 = 3.9;
    pub const EPS_SI: f64 = EPS_SI_REL * VACUUM_PERMITTIVITY;
    pub const EPS_OX: f64 = EPS_OX_REL * VACUUM_PERMITTIVITY;
}
