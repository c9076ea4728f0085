//! λ-rule technology descriptions and inverter cell footprints.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Full-area reduction quoted alongside the λ dimensions, kept so reports can
/// show how far the computed value is from it.
pub const QUOTED_FULL_REDUCTION: f64 = 0.48;
/// Reduction quoted for the active part of the cells alone.
pub const QUOTED_ACTIVE_REDUCTION: f64 = 0.84;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technology {
    Finfet,
    Vnwfet,
}

impl FromStr for Technology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "finfet" => Ok(Technology::Finfet),
            "vnwfet" => Ok(Technology::Vnwfet),
            other => Err(Error::InvalidParameter(format!("unknown technology `{other}`"))),
        }
    }
}

impl fmt::Display for Technology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Technology::Finfet => "finfet",
            Technology::Vnwfet => "vnwfet",
        })
    }
}

/// A set of layout rules written in multiples of λ. The core dimensions
/// follow from λ and `thickness_lambda`; `extras` holds anything else
/// (absolute values in nm or λ multiples, by name).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaRuleSet {
    pub name: String,
    pub technology: Technology,
    pub lambda_nm: f64,
    /// Fin thickness or nanowire diameter. One λ by definition.
    #[serde(default = "one")]
    pub thickness_lambda: f64,
    /// Pitch = `pitch_spacing_lambda`·λ + thickness.
    #[serde(default = "two")]
    pub pitch_spacing_lambda: f64,
    #[serde(default = "three")]
    pub contact_lambda: f64,
    #[serde(default = "two")]
    pub gate_to_contact_lambda: f64,
    #[serde(default)]
    pub extras: BTreeMap<String, f64>,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn three() -> f64 {
    3.0
}

/// One row of the rule table, in nm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleRow {
    pub parameter: String,
    pub value_nm: f64,
}

impl LambdaRuleSet {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("lambda_nm", self.lambda_nm),
            ("thickness_lambda", self.thickness_lambda),
            ("pitch_spacing_lambda", self.pitch_spacing_lambda),
            ("contact_lambda", self.contact_lambda),
            ("gate_to_contact_lambda", self.gate_to_contact_lambda),
        ];
        for (name, v) in named
            .into_iter()
            .chain(self.extras.iter().map(|(k, v)| (k.as_str(), *v)))
        {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "ruleset `{}`: {name} must be positive, got {v}",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn thickness_nm(&self) -> f64 {
        self.thickness_lambda * self.lambda_nm
    }

    pub fn pitch_nm(&self) -> f64 {
        self.pitch_spacing_lambda * self.lambda_nm + self.thickness_nm()
    }

    pub fn contact_nm(&self) -> f64 {
        self.contact_lambda * self.lambda_nm
    }

    pub fn gate_to_contact_nm(&self) -> f64 {
        self.gate_to_contact_lambda * self.lambda_nm
    }

    pub fn to_nm(&self, lambdas: f64) -> f64 {
        lambdas * self.lambda_nm
    }

    pub fn table(&self) -> Vec<RuleRow> {
        let mut rows = vec![
            RuleRow {
                parameter: "thickness".into(),
                value_nm: self.thickness_nm(),
            },
            RuleRow {
                parameter: "pitch".into(),
                value_nm: self.pitch_nm(),
            },
            RuleRow {
                parameter: "contact".into(),
                value_nm: self.contact_nm(),
            },
            RuleRow {
                parameter: "gate_to_contact".into(),
                value_nm: self.gate_to_contact_nm(),
            },
        ];
        rows.extend(self.extras.iter().map(|(k, &v)| RuleRow {
            parameter: k.clone(),
            value_nm: v,
        }));
        rows
    }

    /// Reads a ruleset from JSON. Missing core rule fields take their
    /// default λ multiples.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let rules: LambdaRuleSet = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        rules.validate()?;
        Ok(rules)
    }
}

/// 7 nm FinFET rules: λ = 3.5 nm.
pub fn finfet_7nm() -> LambdaRuleSet {
    let mut extras = BTreeMap::new();
    extras.insert("fin_length_nm".into(), 7.0);
    extras.insert("fin_height_nm".into(), 14.0);
    extras.insert("oxide_thickness_nm".into(), 1.55);
    LambdaRuleSet {
        name: "finfet_7nm".into(),
        technology: Technology::Finfet,
        lambda_nm: 3.5,
        thickness_lambda: 1.0,
        pitch_spacing_lambda: 2.0,
        contact_lambda: 3.0,
        gate_to_contact_lambda: 2.0,
        extras,
    }
}

/// Projected vertical-nanowire rules, λ = 11 nm.
pub fn vnwfet_projected() -> LambdaRuleSet {
    let mut extras = BTreeMap::new();
    extras.insert("nanowire_height_nm".into(), 30.0);
    extras.insert("oxide_thickness_nm".into(), 5.0);
    LambdaRuleSet {
        name: "vnwfet_projected".into(),
        technology: Technology::Vnwfet,
        lambda_nm: 11.0,
        thickness_lambda: 1.0,
        pitch_spacing_lambda: 2.0,
        contact_lambda: 3.0,
        gate_to_contact_lambda: 2.0,
        extras,
    }
}

/// Vertical-nanowire rules at today's minimal diameter, λ = 16 nm.
pub fn vnwfet_current() -> LambdaRuleSet {
    LambdaRuleSet {
        name: "vnwfet_current".into(),
        lambda_nm: 16.0,
        ..vnwfet_projected()
    }
}

pub fn builtin_rulesets() -> (LambdaRuleSet, LambdaRuleSet) {
    (finfet_7nm(), vnwfet_projected())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellFootprint {
    pub height_lambda: f64,
    pub width_lambda: f64,
    /// Height taken up by the supply contacts.
    pub supply_overhead_lambda: f64,
}

impl CellFootprint {
    pub fn new(height_lambda: f64, width_lambda: f64, supply_overhead_lambda: f64) -> Result<Self> {
        if !(height_lambda > 0.0 && width_lambda > 0.0) || !(supply_overhead_lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "footprint {height_lambda}λ x {width_lambda}λ with {supply_overhead_lambda}λ supply overhead"
            )));
        }
        if supply_overhead_lambda >= height_lambda {
            return Err(Error::InvalidParameter("supply overhead exceeds cell height".into()));
        }
        Ok(CellFootprint {
            height_lambda,
            width_lambda,
            supply_overhead_lambda,
        })
    }

    pub fn area_lambda2(&self) -> f64 {
        self.height_lambda * self.width_lambda
    }

    /// Area with the supply contacts stripped from the height.
    pub fn active_area_lambda2(&self) -> f64 {
        (self.height_lambda - self.supply_overhead_lambda) * self.width_lambda
    }

    pub fn area_nm2(&self, rules: &LambdaRuleSet) -> f64 {
        self.area_lambda2() * rules.lambda_nm * rules.lambda_nm
    }
}

pub const SUPPLY_OVERHEAD_LAMBDA: f64 = 12.0;

pub fn inverter_footprint(rules: &LambdaRuleSet, technology: Technology) -> Result<CellFootprint> {
    if rules.technology != technology {
        return Err(Error::InvalidParameter(format!(
            "ruleset `{}` is for {}, not {technology}",
            rules.name, rules.technology
        )));
    }
    match technology {
        Technology::Finfet => CellFootprint::new(48.0, 18.0, SUPPLY_OVERHEAD_LAMBDA),
        Technology::Vnwfet => CellFootprint::new(31.0, 15.0, SUPPLY_OVERHEAD_LAMBDA),
    }
}

/// Fractional area reduction of `b` relative to `a`.
pub fn compare(a: &CellFootprint, b: &CellFootprint, include_supply: bool) -> f64 {
    let area = |c: &CellFootprint| {
        if include_supply {
            c.area_lambda2()
        } else {
            c.active_area_lambda2()
        }
    };
    1.0 - area(b) / area(a)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub ruleset: String,
    pub lambda_nm: f64,
    pub height_lambda: f64,
    pub width_lambda: f64,
    pub area_lambda2: f64,
    pub active_area_lambda2: f64,
    pub area_nm2: f64,
    pub rules: Vec<RuleRow>,
}

impl CellSummary {
    fn new(rules: &LambdaRuleSet, cell: &CellFootprint) -> Self {
        CellSummary {
            ruleset: rules.name.clone(),
            lambda_nm: rules.lambda_nm,
            height_lambda: cell.height_lambda,
            width_lambda: cell.width_lambda,
            area_lambda2: cell.area_lambda2(),
            active_area_lambda2: cell.active_area_lambda2(),
            area_nm2: cell.area_nm2(rules),
            rules: rules.table(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reduction {
    pub computed: f64,
    pub quoted: f64,
    pub delta: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FootprintReport {
    pub finfet: CellSummary,
    pub vnwfet: CellSummary,
    pub full_area: Reduction,
    pub active_area: Reduction,
}

pub fn footprint_report(finfet: &LambdaRuleSet, vnwfet: &LambdaRuleSet) -> Result<FootprintReport> {
    finfet.validate()?;
    vnwfet.validate()?;
    let a = inverter_footprint(finfet, Technology::Finfet)?;
    let b = inverter_footprint(vnwfet, Technology::Vnwfet)?;
    let full = compare(&a, &b, true);
    let active = compare(&a, &b, false);
    Ok(FootprintReport {
        finfet: CellSummary::new(finfet, &a),
        vnwfet: CellSummary::new(vnwfet, &b),
        full_area: Reduction {
            computed: full,
            quoted: QUOTED_FULL_REDUCTION,
            delta: full - QUOTED_FULL_REDUCTION,
            note: "computed from the cell dimensions in λ; the quoted figure does not follow from them".into(),
        },
        active_area: Reduction {
            computed: active,
            quoted: QUOTED_ACTIVE_REDUCTION,
            delta: active - QUOTED_ACTIVE_REDUCTION,
            note: format!(
                "interpretation: {SUPPLY_OVERHEAD_LAMBDA}λ supply contacts removed from the height of both cells"
            ),
        },
    })
}

impl fmt::Display for FootprintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<18} {:>8} {:>8} {:>10} {:>12}",
            "cell", "h [λ]", "w [λ]", "area [λ²]", "area [nm²]"
        )?;
        for c in [&self.finfet, &self.vnwfet] {
            writeln!(
                f,
                "{:<18} {:>8} {:>8} {:>10} {:>12.0}",
                c.ruleset, c.height_lambda, c.width_lambda, c.area_lambda2, c.area_nm2
            )?;
        }
        for (label, r) in [("full area", &self.full_area), ("active area", &self.active_area)] {
            writeln!(
                f,
                "{label:<12} reduction {:.1}% (quoted {:.0}%, delta {:+.1} pts)",
                100.0 * r.computed,
                100.0 * r.quoted,
                100.0 * r.delta
            )?;
        }
        Ok(())
    }
}
