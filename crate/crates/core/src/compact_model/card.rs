//! Model card types and the unit-suffixed JSON card format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    PType,
    NType,
}

impl Polarity {
    /// Factor mapping terminal voltages and currents into the n-like frame
    /// the charge equations are written in.
    pub fn sign(self) -> f64 {
        match self {
            Polarity::NType => 1.0,
            Polarity::PType => -1.0,
        }
    }
}

/// How the gate-oxide capacitance per unit gate area is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OxideModel {
    /// Coaxial capacitor: `eps_ox / (R ln(1 + t_ox / R))`.
    #[default]
    Cylindrical,
    /// Parallel plate: `eps_ox / t_ox`.
    Planar,
}

/// Channel potential at which the drain-end (pinch-off) charge of the
/// access-resistance correction is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PinchOffRule {
    /// `(V_GS - V_th) / eta`, smoothly limited to `[0, V_DS]`.
    #[default]
    Saturation,
    /// The drain potential itself.
    DrainEnd,
}

/// Nanowire geometry, all lengths in meters.
///
/// `radius` is the symbol `R` of the charge equations. Card files specify the
/// diameter `D = 2R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceGeometry {
    pub radius: f64,
    pub gate_length: f64,
    pub oxide_thickness: f64,
    pub access_length: f64,
    pub nanowire_count: u32,
}

impl DeviceGeometry {
    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("radius", self.radius),
            ("gate_length", self.gate_length),
            ("oxide_thickness", self.oxide_thickness),
            ("access_length", self.access_length),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidCard(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.nanowire_count == 0 {
            return Err(Error::InvalidCard("nanowire_count must be >= 1".into()));
        }
        Ok(())
    }
}

/// Every device parameter of one transistor flavor, in SI units.
///
/// Voltages (`flatband_voltage`, `vds_range`) are expressed in the n-like
/// frame: a p-type card with `flatband_voltage = 1.9` behaves as the mirror
/// image of an n-type card with the same value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelCard {
    pub geometry: DeviceGeometry,
    pub polarity: Polarity,
    /// Channel doping, 1/m^3.
    pub doping: f64,
    pub flatband_voltage: f64,
    /// Interface trap (ideality) factor `eta`.
    pub interface_trap: f64,
    /// Low-field mobility, m^2/(V s).
    pub mobility: f64,
    /// m/s; `f64::INFINITY` disables velocity saturation.
    pub saturation_velocity: f64,
    pub series_source: f64,
    pub series_drain: f64,
    /// `eta_1`, drain-voltage dependence of the access resistances.
    pub resistance_bias: f64,
    /// Threshold shift per volt of drain range, V/V.
    pub dibl: f64,
    /// `(V_DSmin, V_DSmax)` operating range entering the threshold shift.
    pub vds_range: (f64, f64),
    /// A/V^3.
    pub gidl_a: f64,
    /// V/m.
    pub gidl_b: f64,
    pub gidl_c: f64,
    pub temperature: f64,
    /// Lumped gate capacitance contributed by each nanowire, F.
    pub gate_cap_per_nanowire: f64,
    /// Channel-length modulation length scale, m. Zero disables it.
    pub clm_lambda: f64,
    /// Channel-length modulation voltage scale, V.
    pub clm_ve: f64,
    pub oxide_model: OxideModel,
    pub pinch_off: PinchOffRule,
}

impl ModelCard {
    /// Calibrated p-type card for the 16 nm-diameter, 14 nm gate-length
    /// technology used throughout the inverter studies.
    pub fn default_p_type() -> Self {
        ModelCard {
            geometry: DeviceGeometry {
                radius: 8e-9,
                gate_length: 14e-9,
                oxide_thickness: 5e-9,
                access_length: 30e-9,
                nanowire_count: 1,
            },
            polarity: Polarity::PType,
            doping: 1e24,
            flatband_voltage: 0.298_84,
            interface_trap: 1.2,
            mobility: 1.5535e-4,
            saturation_velocity: 5e5,
            series_source: 37_292.0,
            series_drain: 37_292.0,
            resistance_bias: 0.982,
            dibl: 0.03,
            vds_range: (0.0, 1.0),
            gidl_a: 3e-5,
            gidl_b: 2.13e9,
            gidl_c: 1.0,
            temperature: 300.0,
            gate_cap_per_nanowire: 3.25e-18,
            clm_lambda: 0.0,
            clm_ve: 1.0,
            oxide_model: OxideModel::Cylindrical,
            pinch_off: PinchOffRule::DrainEnd,
        }
    }

    /// The 22 nm-diameter, 16-nanowire test structure geometry on the
    /// default parameter set.
    pub fn d22_nf16() -> Self {
        let mut card = Self::default_p_type();
        card.geometry.radius = 11e-9;
        card.geometry.nanowire_count = 16;
        card
    }

    pub fn with_nanowires(&self, nanowire_count: u32) -> Self {
        let mut card = self.clone();
        card.geometry.nanowire_count = nanowire_count;
        card
    }

    pub fn nanowires(&self) -> u32 {
        self.geometry.nanowire_count
    }

    /// Total lumped gate capacitance of the device.
    pub fn gate_capacitance(&self) -> f64 {
        self.gate_cap_per_nanowire * self.geometry.nanowire_count as f64
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        let positive = [
            ("doping", self.doping),
            ("interface_trap", self.interface_trap),
            ("mobility", self.mobility),
            ("saturation_velocity", self.saturation_velocity),
            ("gidl_b", self.gidl_b),
            ("temperature", self.temperature),
            ("clm_ve", self.clm_ve),
        ];
        for (name, v) in positive {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::InvalidCard(format!("{name} must be > 0, got {v}")));
            }
        }
        let non_negative = [
            ("series_source", self.series_source),
            ("series_drain", self.series_drain),
            ("gidl_a", self.gidl_a),
            ("gate_cap_per_nanowire", self.gate_cap_per_nanowire),
            ("clm_lambda", self.clm_lambda),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidCard(format!("{name} must be >= 0, got {v}")));
            }
        }
        for (name, v) in [
            ("flatband_voltage", self.flatband_voltage),
            ("resistance_bias", self.resistance_bias),
            ("dibl", self.dibl),
            ("gidl_c", self.gidl_c),
            ("vds_min", self.vds_range.0),
            ("vds_max", self.vds_range.1),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidCard(format!("{name} must be finite")));
            }
        }
        if self.vds_range.1 < self.vds_range.0 {
            return Err(Error::InvalidCard(format!(
                "vds_max ({}) must be >= vds_min ({})",
                self.vds_range.1, self.vds_range.0
            )));
        }
        Ok(())
    }

    pub fn from_json_str(text: &str, path: &Path) -> Result<Self> {
        let file: ModelCardFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        let card = ModelCard::from(&file);
        card.validate().map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: file.locate(text, &e),
            message: e.to_string(),
        })?;
        Ok(card)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text, path)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&ModelCardFile::from(self)).expect("model card serialization is infallible")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }
}

impl Default for ModelCard {
    fn default() -> Self {
        Self::default_p_type()
    }
}

fn default_temperature() -> f64 {
    300.0
}
fn default_gate_cap() -> f64 {
    3.25
}
fn default_gidl_b() -> f64 {
    21.3
}
fn default_clm_ve() -> f64 {
    1.0
}
fn default_vds_max() -> f64 {
    1.0
}

/// On-disk model card: convenience units with the unit in every key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelCardFile {
    pub polarity: Polarity,
    pub diameter_nm: f64,
    pub gate_length_nm: f64,
    pub oxide_thickness_nm: f64,
    pub access_length_nm: f64,
    pub nanowire_count: u32,
    pub doping_cm3: f64,
    pub flatband_v: f64,
    pub interface_trap_eta: f64,
    pub mobility_cm2_per_vs: f64,
    /// Absent or null disables velocity saturation.
    #[serde(default)]
    pub saturation_velocity_cm_per_s: Option<f64>,
    pub series_source_ohm: f64,
    pub series_drain_ohm: f64,
    pub resistance_bias_eta1: f64,
    pub dibl_v_per_v: f64,
    #[serde(default)]
    pub vds_min_v: f64,
    #[serde(default = "default_vds_max")]
    pub vds_max_v: f64,
    pub gidl_a_a_per_v3: f64,
    #[serde(default = "default_gidl_b")]
    pub gidl_b_mv_per_cm: f64,
    pub gidl_c: f64,
    #[serde(default = "default_temperature")]
    pub temperature_k: f64,
    #[serde(default = "default_gate_cap")]
    pub gate_cap_per_nanowire_af: f64,
    #[serde(default)]
    pub clm_lambda_nm: f64,
    #[serde(default = "default_clm_ve")]
    pub clm_ve_v: f64,
    #[serde(default)]
    pub oxide_model: OxideModel,
    #[serde(default)]
    pub pinch_off: PinchOffRule,
}

impl ModelCardFile {
    /// Line of the key that most likely caused a validation error.
    fn locate(&self, text: &str, err: &Error) -> usize {
        let msg = err.to_string();
        let key = [
            ("radius", "diameter_nm"),
            ("gate_length", "gate_length_nm"),
            ("oxide_thickness", "oxide_thickness_nm"),
            ("access_length", "access_length_nm"),
            ("nanowire_count", "nanowire_count"),
            ("doping", "doping_cm3"),
            ("interface_trap", "interface_trap_eta"),
            ("mobility", "mobility_cm2_per_vs"),
            ("saturation_velocity", "saturation_velocity_cm_per_s"),
            ("series_source", "series_source_ohm"),
            ("series_drain", "series_drain_ohm"),
            ("gidl_a", "gidl_a_a_per_v3"),
            ("gidl_b", "gidl_b_mv_per_cm"),
            ("gidl_c", "gidl_c"),
            ("temperature", "temperature_k"),
            ("gate_cap_per_nanowire", "gate_cap_per_nanowire_af"),
            ("clm_lambda", "clm_lambda_nm"),
            ("clm_ve", "clm_ve_v"),
            ("flatband_voltage", "flatband_v"),
            ("resistance_bias", "resistance_bias_eta1"),
            ("dibl", "dibl_v_per_v"),
            ("vds_max", "vds_max_v"),
            ("vds_min", "vds_min_v"),
        ]
        .into_iter()
        .find(|(field, _)| msg.contains(&format!("{field} ")))
        .map(|(_, key)| key);
        key.and_then(|k| {
            let needle = format!("\"{k}\"");
            text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
        })
        .unwrap_or(0)
    }
}

impl From<&ModelCardFile> for ModelCard {
    fn from(f: &ModelCardFile) -> Self {
        ModelCard {
            geometry: DeviceGeometry {
                radius: 0.5 * f.diameter_nm * 1e-9,
                gate_length: f.gate_length_nm * 1e-9,
                oxide_thickness: f.oxide_thickness_nm * 1e-9,
                access_length: f.access_length_nm * 1e-9,
                nanowire_count: f.nanowire_count,
            },
            polarity: f.polarity,
            doping: f.doping_cm3 * 1e6,
            flatband_voltage: f.flatband_v,
            interface_trap: f.interface_trap_eta,
            mobility: f.mobility_cm2_per_vs * 1e-4,
            saturation_velocity: f.saturation_velocity_cm_per_s.map_or(f64::INFINITY, |v| v * 1e-2),
            series_source: f.series_source_ohm,
            series_drain: f.series_drain_ohm,
            resistance_bias: f.resistance_bias_eta1,
            dibl: f.dibl_v_per_v,
            vds_range: (f.vds_min_v, f.vds_max_v),
            gidl_a: f.gidl_a_a_per_v3,
            gidl_b: f.gidl_b_mv_per_cm * 1e8,
            gidl_c: f.gidl_c,
            temperature: f.temperature_k,
            gate_cap_per_nanowire: f.gate_cap_per_nanowire_af * 1e-18,
            clm_lambda: f.clm_lambda_nm * 1e-9,
            clm_ve: f.clm_ve_v,
            oxide_model: f.oxide_model,
            pinch_off: f.pinch_off,
        }
    }
}

impl From<&ModelCard> for ModelCardFile {
    fn from(c: &ModelCard) -> Self {
        ModelCardFile {
            polarity: c.polarity,
            diameter_nm: c.geometry.diameter() * 1e9,
            gate_length_nm: c.geometry.gate_length * 1e9,
            oxide_thickness_nm: c.geometry.oxide_thickness * 1e9,
            access_length_nm: c.geometry.access_length * 1e9,
            nanowire_count: c.geometry.nanowire_count,
            doping_cm3: c.doping * 1e-6,
            flatband_v: c.flatband_voltage,
            interface_trap_eta: c.interface_trap,
            mobility_cm2_per_vs: c.mobility * 1e4,
            saturation_velocity_cm_per_s: c.saturation_velocity.is_finite().then_some(c.saturation_velocity * 1e2),
            series_source_ohm: c.series_source,
            series_drain_ohm: c.series_drain,
            resistance_bias_eta1: c.resistance_bias,
            dibl_v_per_v: c.dibl,
            vds_min_v: c.vds_range.0,
            vds_max_v: c.vds_range.1,
            gidl_a_a_per_v3: c.gidl_a,
            gidl_b_mv_per_cm: c.gidl_b * 1e-8,
            gidl_c: c.gidl_c,
            temperature_k: c.temperature,
            gate_cap_per_nanowire_af: c.gate_cap_per_nanowire * 1e18,
            clm_lambda_nm: c.clm_lambda * 1e9,
            clm_ve_v: c.clm_ve,
            oxide_model: c.oxide_model,
            pinch_off: c.pinch_off,
        }
    }
}
