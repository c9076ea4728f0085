use nalgebra::DMatrix;

use super::netlist::{ElementKind, Netlist, NodeId, Pulse, GROUND};
use super::waveform::WaveformSet;
use crate::compact_model::{BiasPoint, Vnwfet};
use crate::error::{Error, Result};
use crate::numerics::{newton_solve, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integration {
    BackwardEuler,
    #[default]
    Trapezoidal,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TransientConfig {
    pub t_stop: f64,
    pub dt_initial: f64,
    pub dt_max: f64,
    pub method: Integration,
    pub solver: SolverConfig,
    /// Local-truncation-error step control; off means a constant step of
    /// `dt_initial`, shortened only to land on source breakpoints.
    pub adaptive: bool,
    /// Per-step voltage error target for adaptive stepping, in volts.
    pub lte_tolerance: f64,
}

impl TransientConfig {
    pub fn new(t_stop: f64) -> Self {
        TransientConfig {
            t_stop,
            dt_initial: 0.1e-12,
            dt_max: 0.1e-12,
            method: Integration::Trapezoidal,
            solver: SolverConfig::circuit(),
            adaptive: false,
            lte_tolerance: 1e-4,
        }
    }

    pub fn with_step(mut self, dt: f64) -> Self {
        self.dt_initial = dt;
        self.dt_max = dt;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt_initial > 0.0 && self.dt_initial <= self.dt_max && self.dt_max < self.t_stop)
            || !self.t_stop.is_finite()
        {
            return Err(Error::InvalidParameter(format!(
                "transient steps must satisfy 0 < dt_initial ({:e}) <= dt_max ({:e}) < t_stop ({:e})",
                self.dt_initial, self.dt_max, self.t_stop
            )));
        }
        if !(self.lte_tolerance > 0.0) {
            return Err(Error::InvalidParameter("lte_tolerance must be positive".into()));
        }
        self.solver.validate()
    }
}

#[derive(Debug, Clone)]
enum Wave {
    Dc(f64),
    Pulse(Pulse),
}

impl Wave {
    fn at(&self, t: f64) -> f64 {
        match self {
            Wave::Dc(v) => *v,
            Wave::Pulse(p) => p.value(t),
        }
    }
}

#[derive(Debug, Clone)]
struct Source {
    name: String,
    pos: NodeId,
    neg: NodeId,
    wave: Wave,
}

#[derive(Debug, Clone)]
struct Cap {
    /// `None` for the implicit transistor gate capacitance.
    name: Option<String>,
    a: NodeId,
    b: NodeId,
    c: f64,
}

#[derive(Debug, Clone)]
struct Device {
    model: Vnwfet,
    d: NodeId,
    g: NodeId,
    s: NodeId,
}

/// Companion model of a capacitor for one step: `i = geq * v - ieq`.
#[derive(Debug, Clone, Copy, Default)]
struct Companion {
    geq: f64,
    ieq: f64,
}

#[derive(Debug, Clone, Copy)]
struct Context<'a> {
    time: f64,
    source_scale: f64,
    gmin: f64,
    caps: Option<&'a [Companion]>,
}

impl Context<'_> {
    fn dc(time: f64) -> Self {
        Context {
            time,
            source_scale: 1.0,
            gmin: 0.0,
            caps: None,
        }
    }
}

/// Netlist compiled into modified nodal analysis form. Unknowns are the
/// non-ground node voltages followed by one branch current per voltage
/// source (flowing into the positive terminal).
#[derive(Debug, Clone)]
struct Circuit {
    names: Vec<String>,
    n_nodes: usize,
    resistors: Vec<(NodeId, NodeId, f64)>,
    caps: Vec<Cap>,
    devices: Vec<Device>,
    sources: Vec<Source>,
}

impl Circuit {
    fn compile(net: &Netlist) -> Result<Self> {
        net.validate()?;
        let mut c = Circuit {
            names: net.nodes().to_vec(),
            n_nodes: net.node_count() - 1,
            resistors: Vec::new(),
            caps: Vec::new(),
            devices: Vec::new(),
            sources: Vec::new(),
        };
        for e in net.elements() {
            match &e.kind {
                ElementKind::Vnwfet {
                    card,
                    drain,
                    gate,
                    source,
                } => {
                    c.caps.push(Cap {
                        name: None,
                        a: *gate,
                        b: GROUND,
                        c: card.gate_capacitance(),
                    });
                    c.devices.push(Device {
                        model: Vnwfet::new(card.as_ref().clone())?,
                        d: *drain,
                        g: *gate,
                        s: *source,
                    });
                }
                ElementKind::Resistor { a, b, ohms } => c.resistors.push((*a, *b, *ohms)),
                ElementKind::Capacitor { a, b, farads } => c.caps.push(Cap {
                    name: Some(e.name.clone()),
                    a: *a,
                    b: *b,
                    c: *farads,
                }),
                ElementKind::VSourceDc { pos, neg, volts } => c.sources.push(Source {
                    name: e.name.clone(),
                    pos: *pos,
                    neg: *neg,
                    wave: Wave::Dc(*volts),
                }),
                ElementKind::VSourcePulse { pos, neg, pulse } => c.sources.push(Source {
                    name: e.name.clone(),
                    pos: *pos,
                    neg: *neg,
                    wave: Wave::Pulse(*pulse),
                }),
            }
        }
        Ok(c)
    }

    fn size(&self) -> usize {
        self.n_nodes + self.sources.len()
    }

    fn row(node: NodeId) -> Option<usize> {
        (node != GROUND).then(|| node - 1)
    }

    fn v(x: &[f64], node: NodeId) -> f64 {
        if node == GROUND {
            0.0
        } else {
            x[node - 1]
        }
    }

    fn bias(dev: &Device, x: &[f64]) -> BiasPoint {
        let vs = Self::v(x, dev.s);
        BiasPoint::new(Self::v(x, dev.g) - vs, Self::v(x, dev.d) - vs)
    }

    fn add(r: &mut [f64], node: NodeId, value: f64) {
        if let Some(k) = Self::row(node) {
            r[k] += value;
        }
    }

    fn cap_current(cap: &Cap, comp: Companion, x: &[f64]) -> f64 {
        comp.geq * (Self::v(x, cap.a) - Self::v(x, cap.b)) - comp.ieq
    }

    fn residual(&self, x: &[f64], ctx: &Context) -> Vec<f64> {
        let mut r = vec![0.0; self.size()];
        for &(a, b, ohms) in &self.resistors {
            let i = (Self::v(x, a) - Self::v(x, b)) / ohms;
            Self::add(&mut r, a, i);
            Self::add(&mut r, b, -i);
        }
        if let Some(comps) = ctx.caps {
            for (cap, &comp) in self.caps.iter().zip(comps) {
                let i = Self::cap_current(cap, comp, x);
                Self::add(&mut r, cap.a, i);
                Self::add(&mut r, cap.b, -i);
            }
        }
        for dev in &self.devices {
            let i = dev.model.terminal_current(Self::bias(dev, x)).unwrap_or(f64::NAN);
            Self::add(&mut r, dev.d, i);
            Self::add(&mut r, dev.s, -i);
        }
        for (j, src) in self.sources.iter().enumerate() {
            let k = self.n_nodes + j;
            Self::add(&mut r, src.pos, x[k]);
            Self::add(&mut r, src.neg, -x[k]);
            r[k] = Self::v(x, src.pos) - Self::v(x, src.neg) - ctx.source_scale * src.wave.at(ctx.time);
        }
        if ctx.gmin > 0.0 {
            for k in 0..self.n_nodes {
                r[k] += ctx.gmin * x[k];
            }
        }
        r
    }

    fn stamp(m: &mut DMatrix<f64>, a: NodeId, b: NodeId, g: f64) {
        let (ra, rb) = (Self::row(a), Self::row(b));
        if let Some(i) = ra {
            m[(i, i)] += g;
        }
        if let Some(j) = rb {
            m[(j, j)] += g;
        }
        if let (Some(i), Some(j)) = (ra, rb) {
            m[(i, j)] -= g;
            m[(j, i)] -= g;
        }
    }

    fn jacobian(&self, x: &[f64], ctx: &Context) -> DMatrix<f64> {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        for &(a, b, ohms) in &self.resistors {
            Self::stamp(&mut m, a, b, 1.0 / ohms);
        }
        if let Some(comps) = ctx.caps {
            for (cap, comp) in self.caps.iter().zip(comps) {
                Self::stamp(&mut m, cap.a, cap.b, comp.geq);
            }
        }
        for dev in &self.devices {
            let (_, gm, gds) = dev
                .model
                .terminal_current_with_derivatives(Self::bias(dev, x))
                .unwrap_or((0.0, 0.0, 0.0));
            // dI/dv for (drain, gate, source)
            let partials = [(dev.d, gds), (dev.g, gm), (dev.s, -gm - gds)];
            for (row_node, sign) in [(dev.d, 1.0), (dev.s, -1.0)] {
                if let Some(i) = Self::row(row_node) {
                    for &(col_node, g) in &partials {
                        if let Some(j) = Self::row(col_node) {
                            m[(i, j)] += sign * g;
                        }
                    }
                }
            }
        }
        for (j, src) in self.sources.iter().enumerate() {
            let k = self.n_nodes + j;
            if let Some(p) = Self::row(src.pos) {
                m[(p, k)] += 1.0;
                m[(k, p)] += 1.0;
            }
            if let Some(q) = Self::row(src.neg) {
                m[(q, k)] -= 1.0;
                m[(k, q)] -= 1.0;
            }
        }
        if ctx.gmin > 0.0 {
            for k in 0..self.n_nodes {
                m[(k, k)] += ctx.gmin;
            }
        }
        m
    }

    fn solve(&self, x0: &[f64], ctx: &Context, cfg: &SolverConfig) -> Result<Vec<f64>> {
        newton_solve(|x| self.residual(x, ctx), |x| self.jacobian(x, ctx), x0, cfg).map(|o| o.solution)
    }

    /// Starting point with every source-driven node set from ground outward.
    fn initial_guess(&self, time: f64) -> Vec<f64> {
        let mut x = vec![0.0; self.size()];
        for _ in 0..self.sources.len() {
            for src in &self.sources {
                let v = src.wave.at(time);
                match (Self::row(src.pos), Self::row(src.neg)) {
                    (Some(p), None) => x[p] = v,
                    (None, Some(q)) => x[q] = -v,
                    (Some(p), Some(q)) => x[p] = x[q] + v,
                    (None, None) => {}
                }
            }
        }
        x
    }

    fn operating_point(&self, time: f64, guess: Option<&[f64]>, cfg: &SolverConfig) -> Result<Vec<f64>> {
        let start = guess.map_or_else(|| self.initial_guess(time), <[f64]>::to_vec);
        let plain = Context::dc(time);
        let first_err = match self.solve(&start, &plain, cfg) {
            Ok(x) => return Ok(x),
            Err(e) => e,
        };
        log::debug!("plain newton failed ({first_err}); trying gmin stepping");

        let gmin_path = (|| {
            let mut x = start.clone();
            for exp in (3..=12).map(|k: i32| -k) {
                let ctx = Context {
                    gmin: 10f64.powi(exp),
                    ..plain
                };
                x = self.solve(&x, &ctx, cfg)?;
            }
            self.solve(&x, &plain, cfg)
        })();
        if let Ok(x) = gmin_path {
            return Ok(x);
        }
        log::debug!("gmin stepping failed; trying source stepping");

        let source_path = (|| {
            let mut x = vec![0.0; self.size()];
            for k in 1..=20 {
                let ctx = Context {
                    source_scale: k as f64 / 20.0,
                    ..plain
                };
                x = self.solve(&x, &ctx, cfg)?;
            }
            Ok::<_, Error>(x)
        })();
        if let Ok(x) = source_path {
            return Ok(x);
        }

        let r = self.residual(&start, &plain);
        let (worst, residual) = r
            .iter()
            .take(self.n_nodes)
            .enumerate()
            .map(|(k, v)| (k, if v.is_finite() { v.abs() } else { f64::INFINITY }))
            .fold((0, 0.0), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
        let residual = match first_err {
            Error::NonConvergence { residual, .. } => residual,
            _ => residual,
        };
        Err(Error::OperatingPoint {
            node: self.names.get(worst + 1).cloned().unwrap_or_default(),
            residual,
        })
    }

    fn node_labels(&self) -> Vec<String> {
        self.names[1..].iter().map(|n| format!("v({n})")).collect()
    }

    /// Node voltages, source currents (delivered out of the positive
    /// terminal) for one solution vector.
    fn record(&self, x: &[f64], traces: &mut [Vec<f64>]) {
        for k in 0..self.n_nodes {
            traces[k].push(x[k]);
        }
        for j in 0..self.sources.len() {
            traces[self.n_nodes + j].push(-x[self.n_nodes + j]);
        }
    }
}

/// DC solution: voltage per node id (ground included) and the current each
/// voltage source delivers out of its positive terminal.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatingPoint {
    pub node_names: Vec<String>,
    pub voltages: Vec<f64>,
    pub source_currents: Vec<(String, f64)>,
}

impl OperatingPoint {
    pub fn voltage(&self, node: &str) -> Option<f64> {
        let id = if matches!(node, "0" | "gnd" | "GND") {
            GROUND
        } else {
            self.node_names.iter().position(|n| n == node)?
        };
        Some(self.voltages[id])
    }

    pub fn source_current(&self, name: &str) -> Option<f64> {
        self.source_currents.iter().find(|(n, _)| n == name).map(|(_, i)| *i)
    }

    fn from_solution(c: &Circuit, x: &[f64]) -> Self {
        let mut voltages = vec![0.0];
        voltages.extend_from_slice(&x[..c.n_nodes]);
        OperatingPoint {
            node_names: c.names.clone(),
            voltages,
            source_currents: c
                .sources
                .iter()
                .enumerate()
                .map(|(j, s)| (s.name.clone(), -x[c.n_nodes + j]))
                .collect(),
        }
    }
}

pub fn dc_operating_point(netlist: &Netlist) -> Result<OperatingPoint> {
    dc_operating_point_with(netlist, &SolverConfig::circuit())
}

pub fn dc_operating_point_with(netlist: &Netlist, cfg: &SolverConfig) -> Result<OperatingPoint> {
    let c = Circuit::compile(netlist)?;
    let x = c.operating_point(0.0, None, cfg)?;
    Ok(OperatingPoint::from_solution(&c, &x))
}

/// Steps the DC source `source` from `start` to `stop` (inclusive) and
/// records every node voltage and source current. Each point starts from the
/// previous solution.
pub fn dc_sweep(netlist: &Netlist, source: &str, start: f64, stop: f64, step: f64) -> Result<WaveformSet> {
    if !(step > 0.0 && stop > start && start.is_finite() && stop.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sweep needs start < stop and a positive step (got {start}..{stop} by {step})"
        )));
    }
    let mut net = netlist.clone();
    net.set_source_dc(source, start)?;
    let cfg = SolverConfig::circuit();
    let n_points = ((stop - start) / step + 1e-9).floor() as usize + 1;
    let mut values: Vec<f64> = (0..n_points).map(|k| start + k as f64 * step).collect();
    if stop - values[n_points - 1] > 1e-9 * step {
        values.push(stop);
    }

    let mut c = Circuit::compile(&net)?;
    let src_index = c
        .sources
        .iter()
        .position(|s| s.name == source)
        .expect("source checked above");
    let mut labels = c.node_labels();
    labels.extend(c.sources.iter().map(|s| format!("i({})", s.name)));
    let mut traces = vec![Vec::with_capacity(values.len()); labels.len()];
    let mut guess: Option<Vec<f64>> = None;
    for &value in &values {
        c.sources[src_index].wave = Wave::Dc(value);
        let x = c
            .operating_point(0.0, guess.as_deref(), &cfg)
            .map_err(|e| Error::Sweep {
                name: source.to_string(),
                value,
                source: Box::new(e),
            })?;
        c.record(&x, &mut traces);
        guess = Some(x);
    }
    Ok(WaveformSet {
        abscissa_label: format!("{source}_v"),
        abscissa: values,
        traces: labels.into_iter().zip(traces).collect(),
    })
}

fn companions(c: &Circuit, method: Integration, h: f64, v_prev: &[f64], i_prev: &[f64]) -> Vec<Companion> {
    c.caps
        .iter()
        .enumerate()
        .map(|(k, cap)| match method {
            Integration::BackwardEuler => {
                let geq = cap.c / h;
                Companion {
                    geq,
                    ieq: geq * v_prev[k],
                }
            }
            Integration::Trapezoidal => {
                let geq = 2.0 * cap.c / h;
                Companion {
                    geq,
                    ieq: geq * v_prev[k] + i_prev[k],
                }
            }
        })
        .collect()
}

/// Implicit transient analysis from the t = 0 operating point.
///
/// The first step always uses backward Euler. Output traces: `v(<node>)`
/// for every node, `i(<source>)` for every voltage source (current delivered
/// out of the positive terminal) and `i(<capacitor>)` for every explicit
/// capacitor.
pub fn transient(netlist: &Netlist, cfg: &TransientConfig) -> Result<WaveformSet> {
    cfg.validate()?;
    let c = Circuit::compile(netlist)?;
    let mut x = c
        .operating_point(0.0, None, &cfg.solver)
        .map_err(|e| Error::Transient {
            time: 0.0,
            source: Box::new(e),
        })?;

    let mut breakpoints: Vec<f64> = c
        .sources
        .iter()
        .filter_map(|s| match &s.wave {
            Wave::Pulse(p) => Some(p.breakpoints(cfg.t_stop)),
            Wave::Dc(_) => None,
        })
        .flatten()
        .collect();
    breakpoints.push(cfg.t_stop);
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup_by(|a, b| (*a - *b).abs() <= 1e-6 * cfg.dt_initial);

    let mut labels = c.node_labels();
    labels.extend(c.sources.iter().map(|s| format!("i({})", s.name)));
    let named_caps: Vec<usize> = (0..c.caps.len()).filter(|&k| c.caps[k].name.is_some()).collect();
    labels.extend(
        named_caps
            .iter()
            .map(|&k| format!("i({})", c.caps[k].name.as_deref().unwrap_or_default())),
    );
    let capacity = (cfg.t_stop / cfg.dt_initial) as usize + breakpoints.len() + 2;
    let mut traces = vec![Vec::with_capacity(capacity); labels.len()];
    let mut times = Vec::with_capacity(capacity);

    let cap_voltage = |x: &[f64], cap: &Cap| Circuit::v(x, cap.a) - Circuit::v(x, cap.b);
    let mut v_cap: Vec<f64> = c.caps.iter().map(|cap| cap_voltage(&x, cap)).collect();
    let mut i_cap = vec![0.0; c.caps.len()];

    let push = |t: f64, x: &[f64], i_cap: &[f64], times: &mut Vec<f64>, traces: &mut [Vec<f64>]| {
        times.push(t);
        c.record(x, traces);
        let base = c.n_nodes + c.sources.len();
        for (slot, &k) in named_caps.iter().enumerate() {
            traces[base + slot].push(i_cap[k]);
        }
    };
    push(0.0, &x, &i_cap, &mut times, &mut traces);

    let h_min = cfg.dt_initial * 1e-6;
    let mut t = 0.0;
    let mut h = cfg.dt_initial;
    let mut next_bp = 0;
    let mut first = true;
    // Two most recent accepted node-voltage states, for the LTE predictor.
    let mut history: Vec<(f64, Vec<f64>)> = vec![(0.0, x[..c.n_nodes].to_vec())];

    while t < cfg.t_stop {
        while next_bp < breakpoints.len() && breakpoints[next_bp] <= t + 1e-6 * cfg.dt_initial {
            next_bp += 1;
        }
        let bp = breakpoints.get(next_bp).copied().unwrap_or(cfg.t_stop);
        let mut t_next = t + h;
        if t_next >= bp - 1e-3 * h {
            t_next = bp;
        }
        let step = t_next - t;
        let method = if first { Integration::BackwardEuler } else { cfg.method };
        let comps = companions(&c, method, step, &v_cap, &i_cap);
        let ctx = Context {
            time: t_next,
            source_scale: 1.0,
            gmin: 0.0,
            caps: Some(&comps),
        };
        let solved = c.solve(&x, &ctx, &cfg.solver);
        let x_new = match solved {
            Ok(v) => v,
            Err(e) => {
                if step * 0.5 < h_min {
                    log::warn!("newton failed at t = {t_next:e} s with the minimum step: {e}");
                    return Err(Error::StepUnderflow { time: t });
                }
                h = step * 0.5;
                continue;
            }
        };

        if cfg.adaptive && history.len() >= 2 {
            let (t1, ref x1) = history[history.len() - 1];
            let (t0, ref x0) = history[history.len() - 2];
            let mut worst_ratio = 0.0f64;
            for k in 0..c.n_nodes {
                let slope = (x1[k] - x0[k]) / (t1 - t0);
                let predicted = x1[k] + slope * (t_next - t1);
                let lte = (x_new[k] - predicted).abs() / 6.0;
                let tol = cfg.lte_tolerance + cfg.solver.rel_tolerance * x_new[k].abs();
                worst_ratio = worst_ratio.max(lte / tol);
            }
            if worst_ratio > 1.0 && step > h_min * 2.0 {
                h = (step * (0.9 / worst_ratio.sqrt()).max(0.25)).max(h_min);
                continue;
            }
            let grow = if worst_ratio > 0.0 {
                (0.9 / worst_ratio.sqrt()).clamp(0.25, 2.0)
            } else {
                2.0
            };
            h = (step * grow).min(cfg.dt_max).max(h_min);
        } else if cfg.adaptive {
            h = step.min(cfg.dt_max);
        } else {
            h = cfg.dt_initial;
        }

        for (k, cap) in c.caps.iter().enumerate() {
            i_cap[k] = Circuit::cap_current(cap, comps[k], &x_new);
            v_cap[k] = cap_voltage(&x_new, cap);
        }
        x = x_new;
        t = t_next;
        first = false;
        push(t, &x, &i_cap, &mut times, &mut traces);
        history.push((t, x[..c.n_nodes].to_vec()));
        if history.len() > 2 {
            history.remove(0);
        }
    }

    Ok(WaveformSet {
        abscissa_label: "time_s".into(),
        abscissa: times,
        traces: labels.into_iter().zip(traces).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compact_model::ModelCard;
    use approx::assert_relative_eq;

    fn divider() -> Netlist {
        let mut n = Netlist::new();
        n.add_vdc("V1", "in", "0", 1.0).unwrap();
        n.add_resistor("R1", "in", "mid", 1e3).unwrap();
        n.add_resistor("R2", "mid", "0", 1e3).unwrap();
        n
    }

    #[test]
    fn resistor_divider_midpoint() {
        let op = dc_operating_point(&divider()).unwrap();
        assert_relative_eq!(op.voltage("mid").unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(op.source_current("V1").unwrap(), 0.5e-3, epsilon = 1e-15);
    }

    #[test]
    fn floating_source_pair() {
        let mut n = Netlist::new();
        n.add_vdc("V1", "a", "0", 2.0).unwrap();
        n.add_vdc("V2", "b", "a", 0.5).unwrap();
        n.add_resistor("R", "b", "0", 100.0).unwrap();
        let op = dc_operating_point(&n).unwrap();
        assert_relative_eq!(op.voltage("b").unwrap(), 2.5, epsilon = 1e-12);
        assert_relative_eq!(op.source_current("V2").unwrap(), 0.025, epsilon = 1e-12);
    }

    #[test]
    fn sweep_over_resistor_is_linear() {
        let mut n = Netlist::new();
        n.add_vdc("V1", "a", "0", 0.0).unwrap();
        n.add_resistor("R", "a", "0", 2e3).unwrap();
        let set = dc_sweep(&n, "V1", -1.0, 1.0, 0.25).unwrap();
        assert_eq!(set.abscissa.len(), 9);
        let i = set.trace("i(V1)").unwrap();
        for (v, i) in set.abscissa.iter().zip(i) {
            assert_relative_eq!(*i, v / 2e3, epsilon = 1e-15);
        }
        assert!(dc_sweep(&n, "V1", 1.0, 0.0, 0.1).is_err());
        assert!(dc_sweep(&n, "R", 0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn single_device_sweep_matches_model() {
        let card = ModelCard::default_p_type().with_nanowires(4);
        let mut n = Netlist::new();
        n.add_vdc("VG", "g", "0", 0.0).unwrap();
        n.add_vdc("VD", "d", "0", -0.8).unwrap();
        n.add_vnwfet("M", card.clone(), "d", "g", "0").unwrap();
        let set = dc_sweep(&n, "VG", -1.0, 0.5, 0.05).unwrap();
        let id = set.trace("i(VD)").unwrap();
        let dev = Vnwfet::new(card).unwrap();
        for (vg, i) in set.abscissa.iter().zip(id) {
            // VD delivers the current that flows into the drain.
            let expected = dev.terminal_current(BiasPoint::new(*vg, -0.8)).unwrap();
            assert_relative_eq!(*i, expected, max_relative = 1e-9, epsilon = 1e-20);
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = TransientConfig::new(1e-9);
        cfg.validate().unwrap();
        cfg.dt_max = 0.5 * cfg.dt_initial;
        assert!(cfg.validate().is_err());
        assert!(TransientConfig::new(1e-14).validate().is_err());
    }

    fn rc(method: Integration, dt: f64) -> (f64, WaveformSet) {
        let (r, c) = (1e3, 1e-12);
        let mut n = Netlist::new();
        let p = Pulse {
            v0: 0.0,
            v1: 1.0,
            period: 1.0,
            rise: 1e-15,
            fall: 1e-15,
            width: 0.5,
            delay: 0.0,
        };
        n.add_vpulse("V1", "in", "0", p).unwrap();
        n.add_resistor("R", "in", "out", r).unwrap();
        n.add_capacitor("C", "out", "0", c).unwrap();
        let mut cfg = TransientConfig::new(5e-9).with_step(dt);
        cfg.method = method;
        (r * c, transient(&n, &cfg).unwrap())
    }

    #[test]
    fn rc_charging_matches_analytic() {
        for method in [Integration::Trapezoidal, Integration::BackwardEuler] {
            let (tau, set) = rc(method, 1e-12);
            let v = set.waveform("v(out)").unwrap();
            let expected = 1.0 - (-1.0f64).exp();
            assert_relative_eq!(v.value_at(tau), expected, max_relative = 5e-3);
        }
    }

    #[test]
    fn capacitor_charge_is_conserved() {
        let (_, set) = rc(Integration::Trapezoidal, 5e-12);
        let i = set.waveform("i(C)").unwrap();
        let v = set.waveform("v(out)").unwrap();
        let q = i.integral();
        let dq = 1e-12 * (v.values[v.len() - 1] - v.values[0]);
        assert_relative_eq!(q, dq, max_relative = 1e-3);
    }

    #[test]
    fn constant_sources_hold_operating_point() {
        let mut n = divider();
        n.add_capacitor("C", "mid", "0", 1e-15).unwrap();
        let set = transient(&n, &TransientConfig::new(1e-11)).unwrap();
        for v in set.trace("v(mid)").unwrap() {
            assert_relative_eq!(*v, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn adaptive_rc_is_accurate_with_fewer_steps() {
        let (r, c) = (1e3, 1e-12);
        let mut n = Netlist::new();
        n.add_vdc("V1", "in", "0", 1.0).unwrap();
        n.add_resistor("R", "in", "out", r).unwrap();
        n.add_capacitor("C", "out", "0", c).unwrap();
        n.add_resistor("RS", "out", "0", 1e12).unwrap();
        // Start discharged: step the supply from zero with a pulse source.
        let mut n2 = Netlist::new();
        let p = Pulse {
            v0: 0.0,
            v1: 1.0,
            period: 1.0,
            rise: 1e-13,
            fall: 1e-13,
            width: 0.5,
            delay: 0.0,
        };
        n2.add_vpulse("V1", "in", "0", p).unwrap();
        n2.add_resistor("R", "in", "out", r).unwrap();
        n2.add_capacitor("C", "out", "0", c).unwrap();
        let mut cfg = TransientConfig::new(5e-9);
        cfg.dt_initial = 1e-13;
        cfg.dt_max = 1e-10;
        cfg.adaptive = true;
        let set = transient(&n2, &cfg).unwrap();
        assert!(set.abscissa.len() < 2000, "{} steps", set.abscissa.len());
        let v = set.waveform("v(out)").unwrap();
        assert_relative_eq!(v.value_at(r * c), 1.0 - (-1.0f64).exp(), max_relative = 5e-3);
        assert!(dc_operating_point(&n).is_ok());
    }

    #[test]
    fn unsolvable_netlist_reports_node() {
        // Two different sources forced across the same node pair.
        let mut n = Netlist::new();
        n.add_vdc("V1", "a", "0", 1.0).unwrap();
        n.add_vdc("V2", "a", "0", 2.0).unwrap();
        match dc_operating_point(&n) {
            Err(Error::OperatingPoint { .. }) => {}
            other => panic!("expected operating point error, got {other:?}"),
        }
    }
}
