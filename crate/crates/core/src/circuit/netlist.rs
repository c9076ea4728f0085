use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::compact_model::{ModelCard, ModelCardFile};
use crate::error::{Error, Result};

pub type NodeId = usize;

/// The ground node always has id 0.
pub const GROUND: NodeId = 0;

/// SPICE-style trapezoidal pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub v0: f64,
    pub v1: f64,
    pub period: f64,
    pub rise: f64,
    pub fall: f64,
    pub width: f64,
    pub delay: f64,
}

impl Pulse {
    /// Square wave from `v0` to `v1` at `frequency` with a 50% duty cycle
    /// measured between the mid-level crossings.
    pub fn square(v0: f64, v1: f64, frequency: f64, rise: f64, fall: f64, delay: f64) -> Self {
        let period = 1.0 / frequency;
        Pulse {
            v0,
            v1,
            period,
            rise,
            fall,
            width: 0.5 * period - 0.5 * (rise + fall),
            delay,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.v0,
            self.v1,
            self.period,
            self.rise,
            self.fall,
            self.width,
            self.delay,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Netlist("pulse parameters must be finite".into()));
        }
        if !(self.rise > 0.0 && self.fall > 0.0) {
            return Err(Error::Netlist("pulse rise and fall must be positive".into()));
        }
        if self.width < 0.0 || self.delay < 0.0 {
            return Err(Error::Netlist("pulse width and delay must be non-negative".into()));
        }
        if self.rise + self.fall + self.width > self.period * (1.0 + 1e-12) {
            return Err(Error::Netlist("pulse rise + fall + width exceeds the period".into()));
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> f64 {
        if t <= self.delay {
            return self.v0;
        }
        let tau = (t - self.delay) % self.period;
        let dv = self.v1 - self.v0;
        if tau < self.rise {
            self.v0 + dv * tau / self.rise
        } else if tau <= self.rise + self.width {
            self.v1
        } else if tau < self.rise + self.width + self.fall {
            self.v1 - dv * (tau - self.rise - self.width) / self.fall
        } else {
            self.v0
        }
    }

    /// Corner times of the waveform inside `(0, t_stop]`.
    pub fn breakpoints(&self, t_stop: f64) -> Vec<f64> {
        let corners = [
            0.0,
            self.rise,
            self.rise + self.width,
            self.rise + self.width + self.fall,
        ];
        let mut out = Vec::new();
        let mut start = self.delay;
        while start <= t_stop {
            for c in corners {
                let t = start + c;
                if t > 0.0 && t <= t_stop {
                    out.push(t);
                }
            }
            start += self.period;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind {
    /// Transistor with an implicit gate-to-ground capacitance of
    /// `NF * gate_cap_per_nanowire`.
    Vnwfet {
        card: Box<ModelCard>,
        drain: NodeId,
        gate: NodeId,
        source: NodeId,
    },
    Resistor {
        a: NodeId,
        b: NodeId,
        ohms: f64,
    },
    Capacitor {
        a: NodeId,
        b: NodeId,
        farads: f64,
    },
    VSourceDc {
        pos: NodeId,
        neg: NodeId,
        volts: f64,
    },
    VSourcePulse {
        pos: NodeId,
        neg: NodeId,
        pulse: Pulse,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub name: String,
    pub kind: ElementKind,
}

impl Element {
    pub fn terminals(&self) -> Vec<NodeId> {
        match &self.kind {
            ElementKind::Vnwfet {
                drain, gate, source, ..
            } => vec![*drain, *gate, *source],
            ElementKind::Resistor { a, b, .. } | ElementKind::Capacitor { a, b, .. } => vec![*a, *b],
            ElementKind::VSourceDc { pos, neg, .. } | ElementKind::VSourcePulse { pos, neg, .. } => {
                vec![*pos, *neg]
            }
        }
    }

    pub fn is_source(&self) -> bool {
        matches!(
            self.kind,
            ElementKind::VSourceDc { .. } | ElementKind::VSourcePulse { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    nodes: Vec<String>,
    elements: Vec<Element>,
}

impl Default for Netlist {
    fn default() -> Self {
        Self::new()
    }
}

fn is_ground_name(name: &str) -> bool {
    matches!(name, "0" | "gnd" | "GND")
}

impl Netlist {
    pub fn new() -> Self {
        Netlist {
            nodes: vec!["0".to_string()],
            elements: Vec::new(),
        }
    }

    /// Id of the named node, creating it if needed. `0`, `gnd` and `GND`
    /// all name the ground node.
    pub fn node(&mut self, name: &str) -> NodeId {
        if is_ground_name(name) {
            return GROUND;
        }
        match self.node_id(name) {
            Some(id) => id,
            None => {
                self.nodes.push(name.to_string());
                self.nodes.len() - 1
            }
        }
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        if is_ground_name(name) {
            return Some(GROUND);
        }
        self.nodes.iter().position(|n| n == name)
    }

    pub fn node_name(&self, id: NodeId) -> &str {
        &self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, name: &str) -> Option<&Element> {
        self.elements.iter().find(|e| e.name == name)
    }

    fn push(&mut self, name: &str, kind: ElementKind) -> Result<()> {
        if self.element(name).is_some() {
            return Err(Error::Netlist(format!("duplicate element name `{name}`")));
        }
        let element = Element {
            name: name.to_string(),
            kind,
        };
        if let Some(&bad) = element.terminals().iter().find(|&&n| n >= self.nodes.len()) {
            return Err(Error::Netlist(format!(
                "element `{name}` references unknown node id {bad}"
            )));
        }
        self.elements.push(element);
        Ok(())
    }

    pub fn add_vnwfet(&mut self, name: &str, card: ModelCard, drain: &str, gate: &str, source: &str) -> Result<()> {
        card.validate()?;
        let (drain, gate, source) = (self.node(drain), self.node(gate), self.node(source));
        self.push(
            name,
            ElementKind::Vnwfet {
                card: Box::new(card),
                drain,
                gate,
                source,
            },
        )
    }

    pub fn add_resistor(&mut self, name: &str, a: &str, b: &str, ohms: f64) -> Result<()> {
        if !(ohms > 0.0 && ohms.is_finite()) {
            return Err(Error::Netlist(format!("resistor `{name}` must have a positive value")));
        }
        let (a, b) = (self.node(a), self.node(b));
        self.push(name, ElementKind::Resistor { a, b, ohms })
    }

    pub fn add_capacitor(&mut self, name: &str, a: &str, b: &str, farads: f64) -> Result<()> {
        if !(farads > 0.0 && farads.is_finite()) {
            return Err(Error::Netlist(format!("capacitor `{name}` must have a positive value")));
        }
        let (a, b) = (self.node(a), self.node(b));
        self.push(name, ElementKind::Capacitor { a, b, farads })
    }

    pub fn add_vdc(&mut self, name: &str, pos: &str, neg: &str, volts: f64) -> Result<()> {
        if !volts.is_finite() {
            return Err(Error::Netlist(format!("source `{name}` must have a finite value")));
        }
        let (pos, neg) = (self.node(pos), self.node(neg));
        self.push(name, ElementKind::VSourceDc { pos, neg, volts })
    }

    pub fn add_vpulse(&mut self, name: &str, pos: &str, neg: &str, pulse: Pulse) -> Result<()> {
        pulse
            .validate()
            .map_err(|e| Error::Netlist(format!("source `{name}`: {e}")))?;
        let (pos, neg) = (self.node(pos), self.node(neg));
        self.push(name, ElementKind::VSourcePulse { pos, neg, pulse })
    }

    /// Changes the value of a DC source, e.g. between sweep points.
    pub fn set_source_dc(&mut self, name: &str, value: f64) -> Result<()> {
        let element = self
            .elements
            .iter_mut()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::Netlist(format!("no source named `{name}`")))?;
        match &mut element.kind {
            ElementKind::VSourceDc { volts, .. } => {
                *volts = value;
                Ok(())
            }
            _ => Err(Error::Netlist(format!("`{name}` is not a DC voltage source"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.elements.iter().any(Element::is_source) {
            return Err(Error::Netlist("netlist has no voltage source".into()));
        }
        let mut used = vec![false; self.nodes.len()];
        for e in &self.elements {
            let t = e.terminals();
            for &n in &t {
                used[n] = true;
            }
            if e.is_source() && t[0] == t[1] {
                return Err(Error::Netlist(format!("source `{}` is shorted", e.name)));
            }
        }
        if !used[GROUND] {
            return Err(Error::Netlist("no element connects to ground".into()));
        }
        if let Some(k) = used.iter().position(|u| !u) {
            return Err(Error::Netlist(format!("node `{}` is not connected", self.nodes[k])));
        }
        Ok(())
    }

    pub fn from_json_str(text: &str, base_dir: &Path, path: &Path) -> Result<Self> {
        let file: NetlistFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        file.into_netlist(base_dir).map_err(|e| match e {
            Error::Parse { .. } => e,
            other => Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                message: other.to_string(),
            },
        })
    }

    /// Loads a JSON netlist; card paths are resolved relative to the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_json_str(&text, base, path)
    }

    /// JSON form with every model card inlined.
    pub fn to_json_string(&self) -> String {
        let file = NetlistFile::from(self);
        serde_json::to_string_pretty(&file).expect("netlist serialization cannot fail")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CardRef {
    Path(String),
    Inline(Box<ModelCardFile>),
}

/// On-disk netlist: one record per element, nodes referenced by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetlistFile {
    pub elements: Vec<ElementFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementFile {
    Vnwfet {
        name: String,
        drain: String,
        gate: String,
        source: String,
        card: CardRef,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nanowire_count: Option<u32>,
    },
    Resistor {
        name: String,
        a: String,
        b: String,
        ohms: f64,
    },
    Capacitor {
        name: String,
        a: String,
        b: String,
        farads: f64,
    },
    Vdc {
        name: String,
        pos: String,
        neg: String,
        volts: f64,
    },
    Vpulse {
        name: String,
        pos: String,
        neg: String,
        v0: f64,
        v1: f64,
        period_s: f64,
        rise_s: f64,
        fall_s: f64,
        width_s: f64,
        #[serde(default)]
        delay_s: f64,
    },
}

impl NetlistFile {
    pub fn into_netlist(self, base_dir: &Path) -> Result<Netlist> {
        let mut cache: BTreeMap<String, ModelCard> = BTreeMap::new();
        let mut net = Netlist::new();
        for e in self.elements {
            match e {
                ElementFile::Vnwfet {
                    name,
                    drain,
                    gate,
                    source,
                    card,
                    nanowire_count,
                } => {
                    let mut card = match card {
                        CardRef::Inline(f) => {
                            let c = ModelCard::from(f.as_ref());
                            c.validate()?;
                            c
                        }
                        CardRef::Path(p) => match cache.get(&p) {
                            Some(c) => c.clone(),
                            None => {
                                let c = ModelCard::load(&base_dir.join(&p))?;
                                cache.insert(p, c.clone());
                                c
                            }
                        },
                    };
                    if let Some(nf) = nanowire_count {
                        card = card.with_nanowires(nf);
                    }
                    net.add_vnwfet(&name, card, &drain, &gate, &source)?;
                }
                ElementFile::Resistor { name, a, b, ohms } => net.add_resistor(&name, &a, &b, ohms)?,
                ElementFile::Capacitor { name, a, b, farads } => net.add_capacitor(&name, &a, &b, farads)?,
                ElementFile::Vdc { name, pos, neg, volts } => net.add_vdc(&name, &pos, &neg, volts)?,
                ElementFile::Vpulse {
                    name,
                    pos,
                    neg,
                    v0,
                    v1,
                    period_s,
                    rise_s,
                    fall_s,
                    width_s,
                    delay_s,
                } => net.add_vpulse(
                    &name,
                    &pos,
                    &neg,
                    Pulse {
                        v0,
                        v1,
                        period: period_s,
                        rise: rise_s,
                        fall: fall_s,
                        width: width_s,
                        delay: delay_s,
                    },
                )?,
            }
        }
        net.validate()?;
        Ok(net)
    }
}

impl From<&Netlist> for NetlistFile {
    fn from(net: &Netlist) -> Self {
        let name = |id: NodeId| net.node_name(id).to_string();
        let elements = net
            .elements
            .iter()
            .map(|e| match &e.kind {
                ElementKind::Vnwfet {
                    card,
                    drain,
                    gate,
                    source,
                } => ElementFile::Vnwfet {
                    name: e.name.clone(),
                    drain: name(*drain),
                    gate: name(*gate),
                    source: name(*source),
                    card: CardRef::Inline(Box::new(ModelCardFile::from(card.as_ref()))),
                    nanowire_count: None,
                },
                ElementKind::Resistor { a, b, ohms } => ElementFile::Resistor {
                    name: e.name.clone(),
                    a: name(*a),
                    b: name(*b),
                    ohms: *ohms,
                },
                ElementKind::Capacitor { a, b, farads } => ElementFile::Capacitor {
                    name: e.name.clone(),
                    a: name(*a),
                    b: name(*b),
                    farads: *farads,
                },
                ElementKind::VSourceDc { pos, neg, volts } => ElementFile::Vdc {
                    name: e.name.clone(),
                    pos: name(*pos),
                    neg: name(*neg),
                    volts: *volts,
                },
                ElementKind::VSourcePulse { pos, neg, pulse } => ElementFile::Vpulse {
                    name: e.name.clone(),
                    pos: name(*pos),
                    neg: name(*neg),
                    v0: pulse.v0,
                    v1: pulse.v1,
                    period_s: pulse.period,
                    rise_s: pulse.rise,
                    fall_s: pulse.fall,
                    width_s: pulse.width,
                    delay_s: pulse.delay,
                },
            })
            .collect();
        NetlistFile { elements }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pulse_shape_and_breakpoints() {
        let p = Pulse::square(0.0, 1.0, 1e9, 10e-12, 10e-12, 0.0);
        assert_relative_eq!(p.value(5e-12), 0.5);
        assert_relative_eq!(p.value(100e-12), 1.0);
        assert_relative_eq!(p.value(505e-12), 0.5, epsilon = 1e-9);
        assert_relative_eq!(p.value(700e-12), 0.0);
        assert_relative_eq!(p.value(1.005e-9), 0.5, epsilon = 1e-6);
        let bp = p.breakpoints(1e-9);
        assert_eq!(bp.len(), 4);
        assert_relative_eq!(bp[1], 500e-12, max_relative = 1e-12);
        assert_relative_eq!(bp[3], 1e-9, max_relative = 1e-12);
    }

    #[test]
    fn pulse_validation() {
        let mut p = Pulse::square(0.0, 1.0, 1e9, 10e-12, 10e-12, 0.0);
        p.width = 1e-9;
        assert!(p.validate().is_err());
        p.width = 0.0;
        p.rise = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn ground_aliases_and_duplicates() {
        let mut n = Netlist::new();
        assert_eq!(n.node("gnd"), GROUND);
        n.add_resistor("R1", "a", "0", 1e3).unwrap();
        assert!(n.add_resistor("R1", "a", "0", 1e3).is_err());
        assert!(n.add_capacitor("C1", "a", "0", -1.0).is_err());
        assert!(n.validate().is_err(), "no source");
        n.add_vdc("V1", "a", "GND", 1.0).unwrap();
        n.validate().unwrap();
    }

    #[test]
    fn dangling_node_rejected() {
        let mut n = Netlist::new();
        n.add_vdc("V1", "a", "0", 1.0).unwrap();
        n.node("floating");
        assert!(n.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut n = Netlist::new();
        n.add_vdc("VDD", "vdd", "0", 1.0).unwrap();
        n.add_vpulse("VIN", "in", "0", Pulse::square(0.0, 1.0, 1e9, 1e-11, 1e-11, 0.0))
            .unwrap();
        n.add_vnwfet("MP", ModelCard::default_p_type(), "out", "in", "vdd")
            .unwrap();
        n.add_resistor("RL", "out", "0", 1e5).unwrap();
        n.add_capacitor("CL", "out", "0", 1e-17).unwrap();
        let text = n.to_json_string();
        let back = Netlist::from_json_str(&text, Path::new("."), Path::new("t.json")).unwrap();
        assert_eq!(back.nodes(), n.nodes());
        assert_eq!(back.elements().len(), 5);
        match (&back.elements()[2].kind, &n.elements()[2].kind) {
            (ElementKind::Vnwfet { card: a, .. }, ElementKind::Vnwfet { card: b, .. }) => {
                assert_relative_eq!(a.mobility, b.mobility, max_relative = 1e-14);
            }
            _ => panic!("element order changed"),
        }
    }

    #[test]
    fn json_errors_carry_line() {
        let text = "{\n \"elements\": [\n  {\"type\": \"resistor\", \"name\": \"R\", \"a\": \"x\"}\n ]\n}";
        match Netlist::from_json_str(text, Path::new("."), Path::new("n.json")) {
            Err(Error::Parse { line, message, .. }) => {
                assert!(line >= 3, "line {line}");
                assert!(message.contains("missing field"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
