//! Charge densities, channel current, access-resistance correction and
//! band-to-band (GIDL) leakage of the junctionless nanowire transistor.

use serde::{Deserialize, Serialize};

use super::card::{ModelCard, OxideModel, PinchOffRule, Polarity};
use super::constants::{BOLTZMANN, ELEMENTARY_CHARGE, EPS_OX, EPS_SI, VACUUM_PERMITTIVITY};
use crate::error::{Error, Result};
use crate::numerics::lambert_w0_exp;

/// Smoothing width of the pinch-off potential limiter, volts.
const PINCH_OFF_SMOOTHING: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasPoint {
    pub vgs: f64,
    pub vds: f64,
}

impl BiasPoint {
    pub fn new(vgs: f64, vds: f64) -> Self {
        BiasPoint { vgs, vds }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargePair {
    pub q_dp: f64,
    pub q_c: f64,
}

impl ChargePair {
    pub fn total(&self) -> f64 {
        self.q_dp + self.q_c
    }
}

/// Card-level constants of the charge model, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub thermal_voltage: f64,
    pub cox: f64,
    pub qsc: f64,
    pub qdep: f64,
    pub qeff: f64,
    pub ceff: f64,
    pub cc: f64,
    pub vth: f64,
}

pub fn oxide_capacitance(card: &ModelCard) -> f64 {
    let r = card.geometry.radius;
    let tox = card.geometry.oxide_thickness;
    match card.oxide_model {
        OxideModel::Cylindrical => EPS_OX / (r * (tox / r).ln_1p()),
        OxideModel::Planar => EPS_OX / tox,
    }
}

pub fn derive_quantities(card: &ModelCard) -> Result<DerivedQuantities> {
    card.validate()?;
    let r = card.geometry.radius;
    let phi_t = BOLTZMANN * card.temperature / ELEMENTARY_CHARGE;
    let cox = oxide_capacitance(card);
    let eta = card.interface_trap;
    let qsc = 2.0 * EPS_SI * phi_t / r;
    let qdep = ELEMENTARY_CHARGE * card.doping * r / 2.0;
    let qeff = qsc * eta * cox * phi_t / (qsc + eta * cox * phi_t);
    // Oxide in series with the silicon body capacitance 2 eps_Si / R.
    let ceff = 1.0 / (1.0 / cox + r / (2.0 * EPS_SI));
    let cc = cox - ceff;
    if !(cc > 0.0) || !cc.is_finite() {
        return Err(Error::InvalidCard(format!(
            "complementary capacitance C_c = C_ox - C_eff must be > 0 (got {cc:e} F/m^2)"
        )));
    }
    let vth = card.flatband_voltage - qdep / cox - card.dibl * (card.vds_range.1 - card.vds_range.0);
    Ok(DerivedQuantities {
        thermal_voltage: phi_t,
        cox,
        qsc,
        qdep,
        qeff,
        ceff,
        cc,
        vth,
    })
}

/// Depletion-mode mobile charge density `Q_DP`, C/m^2, at gate voltage `vg`
/// and channel potential `v_channel` (n-like frame).
pub fn charge_depletion(dq: &DerivedQuantities, card: &ModelCard, vg: f64, v_channel: f64) -> f64 {
    let eta = card.interface_trap;
    let phi = dq.thermal_voltage;
    let y = (dq.qsc / dq.qeff).ln() + (vg - dq.vth - eta * v_channel) / (eta * phi) + dq.qdep / dq.qsc;
    dq.qeff * lambert_w0_exp(y)
}

/// Complementary (accumulation) mobile charge density `Q_C`, C/m^2.
pub fn charge_complementary(dq: &DerivedQuantities, card: &ModelCard, vg: f64, v_channel: f64) -> f64 {
    let eta = card.interface_trap;
    let phi = dq.thermal_voltage;
    let scale = eta * dq.cc * phi;
    let y = (dq.qsc / scale).ln() + (vg - card.flatband_voltage - eta * v_channel) / (eta * phi);
    scale * lambert_w0_exp(y)
}

pub fn charges(dq: &DerivedQuantities, card: &ModelCard, vg: f64, v_channel: f64) -> ChargePair {
    ChargePair {
        q_dp: charge_depletion(dq, card, vg, v_channel),
        q_c: charge_complementary(dq, card, vg, v_channel),
    }
}

/// Integrand primitive of the long-channel current, evaluated at one channel end.
pub fn current_primitive(dq: &DerivedQuantities, card: &ModelCard, q: ChargePair) -> f64 {
    let eta = card.interface_trap;
    let phi = dq.thermal_voltage;
    q.q_dp * q.q_dp / (2.0 * eta * dq.cox * phi) + q.q_dp + q.q_c * q.q_c / (2.0 * eta * dq.cc * phi) + 2.0 * q.q_c
}

fn smooth_max0(x: f64, delta: f64) -> f64 {
    0.5 * (x + (x * x + 4.0 * delta * delta).sqrt())
}

/// Saturation potential `(V_GS - V_th) / eta`, smoothly kept positive.
fn saturation_voltage(dq: &DerivedQuantities, card: &ModelCard, vgs: f64) -> f64 {
    smooth_max0((vgs - dq.vth) / card.interface_trap, PINCH_OFF_SMOOTHING)
}

/// Channel potential of the pinch-off charge, in `[0, vds]` for `vds >= 0`.
fn pinch_off_potential(dq: &DerivedQuantities, card: &ModelCard, vgs: f64, vds: f64) -> f64 {
    match card.pinch_off {
        PinchOffRule::DrainEnd => vds,
        PinchOffRule::Saturation => effective_drain_voltage(dq, card, vgs, vds),
    }
}

/// Normalized-frame bias with `vds >= 0`, plus the sign restoring the
/// original source/drain orientation.
fn oriented(vgs: f64, vds: f64) -> (f64, f64, f64) {
    if vds < 0.0 {
        (vgs - vds, -vds, -1.0)
    } else {
        (vgs, vds, 1.0)
    }
}

fn to_normalized(card: &ModelCard, bias: BiasPoint) -> (f64, f64) {
    let s = card.polarity.sign();
    (s * bias.vgs, s * bias.vds)
}

/// Smoothed `min(V_DS, V_Dsat)`: the drain potential seen by velocity
/// saturation, constant once the channel is pinched off.
fn effective_drain_voltage(dq: &DerivedQuantities, card: &ModelCard, vgs: f64, vds: f64) -> f64 {
    let vsat = saturation_voltage(dq, card, vgs);
    let d = PINCH_OFF_SMOOTHING;
    let a = vsat - vds - d;
    vsat - 0.5 * (a + (a * a + 4.0 * d * vsat).sqrt())
}

fn mobility_at(dq: &DerivedQuantities, card: &ModelCard, vgs: f64, vds: f64) -> f64 {
    let vde = effective_drain_voltage(dq, card, vgs, vds);
    card.mobility / (1.0 + card.mobility * vde / (card.saturation_velocity * card.geometry.gate_length))
}

/// Velocity-saturation limited mobility `mu0 / (1 + mu0 V_DSeff / (v_sat L))`.
pub fn effective_mobility(card: &ModelCard, bias: BiasPoint) -> Result<f64> {
    let dq = derive_quantities(card)?;
    let (vgs_n, vds_n) = to_normalized(card, bias);
    let (vgs, vds, _) = oriented(vgs_n, vds_n);
    Ok(mobility_at(&dq, card, vgs, vds))
}

fn length_reduction(dq: &DerivedQuantities, card: &ModelCard, vgs_n: f64, vds_n: f64) -> f64 {
    if card.clm_lambda == 0.0 {
        return 0.0;
    }
    let (vgs, vds, _) = oriented(vgs_n, vds_n);
    let excess = smooth_max0(vds - saturation_voltage(dq, card, vgs), PINCH_OFF_SMOOTHING);
    // smooth_max0 is strictly positive; anchor dL(0) = 0 exactly.
    let excess0 = smooth_max0(-saturation_voltage(dq, card, vgs), PINCH_OFF_SMOOTHING);
    let dl = card.clm_lambda * ((excess - excess0).max(0.0) / card.clm_ve).ln_1p();
    let limit = 0.9 * card.geometry.gate_length;
    if dl >= limit {
        log::warn!(
            "channel-length reduction {dl:e} m clamped to {limit:e} m (gate length {:e} m)",
            card.geometry.gate_length
        );
        limit
    } else {
        dl
    }
}

/// `L_eff = L - dL`, with `0 <= dL < L`.
pub fn effective_length(card: &ModelCard, bias: BiasPoint) -> Result<f64> {
    let dq = derive_quantities(card)?;
    let (vgs, vds) = to_normalized(card, bias);
    Ok(card.geometry.gate_length - length_reduction(&dq, card, vgs, vds))
}

/// Immutable evaluator holding a validated card and its derived quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct Vnwfet {
    card: ModelCard,
    dq: DerivedQuantities,
}

/// Breakdown of the channel-current evaluation in the normalized frame
/// (`vds >= 0` orientation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelEvaluation {
    pub source: ChargePair,
    pub drain: ChargePair,
    pub pinch_off: ChargePair,
    pub mobility: f64,
    pub length: f64,
    /// Single-nanowire long-channel current `I_DS,0`.
    pub long_channel: f64,
    /// Access-resistance denominator.
    pub denominator: f64,
}

impl Vnwfet {
    pub fn new(card: ModelCard) -> Result<Self> {
        let dq = derive_quantities(&card)?;
        Ok(Vnwfet { card, dq })
    }

    pub fn card(&self) -> &ModelCard {
        &self.card
    }

    pub fn derived(&self) -> &DerivedQuantities {
        &self.dq
    }

    pub fn charges(&self, vg: f64, v_channel: f64) -> ChargePair {
        charges(&self.dq, &self.card, vg, v_channel)
    }

    /// Channel evaluation for a normalized-frame bias with `vds >= 0`.
    pub fn evaluate_oriented(&self, vgs: f64, vds: f64) -> ChannelEvaluation {
        debug_assert!(vds >= 0.0);
        let card = &self.card;
        let dq = &self.dq;
        let r = card.geometry.radius;
        let source = self.charges(vgs, 0.0);
        let drain = self.charges(vgs, vds);
        let pinch_off = self.charges(vgs, pinch_off_potential(dq, card, vgs, vds));
        let mobility = mobility_at(dq, card, vgs, vds);
        let length = card.geometry.gate_length - length_reduction(dq, card, vgs, vds);
        let phi = dq.thermal_voltage;
        let g_s = current_primitive(dq, card, source);
        let g_d = current_primitive(dq, card, drain);
        let long_channel = mobility * 2.0 * std::f64::consts::PI * r / length * phi * (g_s - g_d);
        let q0 = source.total();
        let bracket = q0 - card.resistance_bias * (q0 - pinch_off.total());
        let nf = card.geometry.nanowire_count as f64;
        let denominator = 1.0
            + 2.0
                * std::f64::consts::PI
                * (r / length)
                * nf
                * mobility
                * (card.series_source + card.series_drain)
                * bracket;
        ChannelEvaluation {
            source,
            drain,
            pinch_off,
            mobility,
            length,
            long_channel,
            denominator,
        }
    }

    /// Normalized-frame channel current of all nanowires, any sign of `vds`.
    fn channel_current_normalized(&self, vgs_n: f64, vds_n: f64) -> Result<f64> {
        let (vgs, vds, orientation) = oriented(vgs_n, vds_n);
        let ev = self.evaluate_oriented(vgs, vds);
        if !(ev.denominator > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "access-resistance denominator is {} at vgs={vgs}, vds={vds}",
                ev.denominator
            )));
        }
        let nf = self.card.geometry.nanowire_count as f64;
        Ok(orientation * ev.long_channel * nf / ev.denominator)
    }

    /// Single-nanowire long-channel current (drain current in the card's
    /// terminal convention).
    pub fn long_channel_current(&self, bias: BiasPoint) -> f64 {
        let (vgs_n, vds_n) = to_normalized(&self.card, bias);
        let (vgs, vds, orientation) = oriented(vgs_n, vds_n);
        let ev = self.evaluate_oriented(vgs, vds);
        self.card.polarity.sign() * orientation * ev.long_channel
    }

    /// Channel current of all `NF` nanowires including the series-resistance
    /// and short-channel corrections.
    pub fn drain_current(&self, bias: BiasPoint) -> Result<f64> {
        let (vgs, vds) = to_normalized(&self.card, bias);
        Ok(self.card.polarity.sign() * self.channel_current_normalized(vgs, vds)?)
    }

    /// Drain-overlap field, V/m.
    pub fn gidl_field(&self, bias: BiasPoint) -> f64 {
        let (vgs, vds) = to_normalized(&self.card, bias);
        let v_segd = vgs - vds;
        let cv = self.card.gidl_c * vds;
        self.dq.cox * (v_segd * v_segd + cv * cv).sqrt() / (VACUUM_PERMITTIVITY * super::constants::EPS_SI_REL)
    }

    pub fn gidl_current(&self, bias: BiasPoint) -> f64 {
        let card = &self.card;
        let (_, vds) = to_normalized(card, bias);
        if vds == 0.0 || card.gidl_a == 0.0 {
            return 0.0;
        }
        let e = self.gidl_field(bias);
        if e == 0.0 {
            return 0.0;
        }
        let r = card.geometry.radius;
        let nf = card.geometry.nanowire_count as f64;
        let i = 2.0
            * std::f64::consts::PI
            * r
            * card.geometry.access_length
            * nf
            * card.gidl_a
            * vds
            * e
            * e
            * (-card.gidl_b / e).exp();
        card.polarity.sign() * i
    }

    /// Drain terminal current: channel plus band-to-band leakage.
    pub fn terminal_current(&self, bias: BiasPoint) -> Result<f64> {
        Ok(self.drain_current(bias)? + self.gidl_current(bias))
    }

    /// Terminal current and its partial derivatives with respect to `vgs` and
    /// `vds` (central differences).
    pub fn terminal_current_with_derivatives(&self, bias: BiasPoint) -> Result<(f64, f64, f64)> {
        const H: f64 = 1e-6;
        let i = self.terminal_current(bias)?;
        let gp = self.terminal_current(BiasPoint::new(bias.vgs + H, bias.vds))?;
        let gm = self.terminal_current(BiasPoint::new(bias.vgs - H, bias.vds))?;
        let dp = self.terminal_current(BiasPoint::new(bias.vgs, bias.vds + H))?;
        let dm = self.terminal_current(BiasPoint::new(bias.vgs, bias.vds - H))?;
        Ok((i, (gp - gm) / (2.0 * H), (dp - dm) / (2.0 * H)))
    }
}

pub fn long_channel_current(card: &ModelCard, bias: BiasPoint) -> Result<f64> {
    Ok(Vnwfet::new(card.clone())?.long_channel_current(bias))
}

pub fn drain_current(card: &ModelCard, bias: BiasPoint) -> Result<f64> {
    Vnwfet::new(card.clone())?.drain_current(bias)
}

pub fn gidl_current(card: &ModelCard, bias: BiasPoint) -> Result<f64> {
    Ok(Vnwfet::new(card.clone())?.gidl_current(bias))
}

pub fn terminal_current(card: &ModelCard, bias: BiasPoint) -> Result<f64> {
    Vnwfet::new(card.clone())?.terminal_current(bias)
}

/// n-type counterpart of a p-type card: three times the carrier mobility,
/// everything else unchanged.
pub fn make_ntype(p_card: &ModelCard) -> Result<ModelCard> {
    if p_card.polarity != Polarity::PType {
        return Err(Error::InvalidCard("make_ntype expects a p-type card".into()));
    }
    let mut n = p_card.clone();
    n.polarity = Polarity::NType;
    n.mobility *= 3.0;
    Ok(n)
}
