//! Fitting model-card parameters to measured I-V data.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compact_model::{BiasPoint, ModelCard, Vnwfet};
use crate::error::{Error, Result};

pub const IV_HEADER: [&str; 3] = ["vgs_v", "vds_v", "id_a"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IvRecord {
    pub vgs: f64,
    pub vds: f64,
    pub id: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IvDataset {
    pub records: Vec<IvRecord>,
    /// Nanowire diameter, m, when known.
    pub diameter: Option<f64>,
    pub nanowires: Option<u32>,
    pub temperature: Option<f64>,
}

impl IvDataset {
    pub fn new(records: Vec<IvRecord>) -> Result<Self> {
        let ds = IvDataset {
            records,
            ..IvDataset::default()
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.records.is_empty() {
            return Err(Error::InvalidParameter("empty I-V dataset".into()));
        }
        if let Some(k) = self
            .records
            .iter()
            .position(|r| !(r.vgs.is_finite() && r.vds.is_finite() && r.id.is_finite()))
        {
            return Err(Error::InvalidParameter(format!("record {k} is not finite")));
        }
        Ok(())
    }

    /// Model currents on the dataset's bias points.
    pub fn simulate(card: &ModelCard, biases: &[(f64, f64)]) -> Result<Self> {
        let dev = Vnwfet::new(card.clone())?;
        let records = biases
            .iter()
            .map(|&(vgs, vds)| {
                Ok(IvRecord {
                    vgs,
                    vds,
                    id: dev.terminal_current(BiasPoint::new(vgs, vds))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IvDataset {
            records,
            diameter: Some(card.geometry.diameter()),
            nanowires: Some(card.nanowires()),
            temperature: Some(card.temperature),
        })
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(IV_HEADER)?;
        for r in &self.records {
            out.write_record([format!("{:e}", r.vgs), format!("{:e}", r.vds), format!("{:e}", r.id)])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

/// Reads `vgs_v,vds_v,id_a` rows. Errors name the offending line.
pub fn load_iv_csv(path: &Path) -> Result<IvDataset> {
    let file = std::fs::File::open(path)?;
    parse_iv_csv(file, path)
}

pub fn parse_iv_csv<R: std::io::Read>(reader: R, path: &Path) -> Result<IvDataset> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != IV_HEADER {
        return Err(parse_err(1, format!("expected header `{}`", IV_HEADER.join(","))));
    }
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let mut vals = [0.0; 3];
        for (k, v) in vals.iter_mut().enumerate() {
            let field = &row[k];
            *v = field
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| parse_err(line, format!("{}: not a finite number: `{field}`", IV_HEADER[k])))?;
        }
        records.push(IvRecord {
            vgs: vals[0],
            vds: vals[1],
            id: vals[2],
        });
    }
    if records.is_empty() {
        return Err(parse_err(1, "no data rows".into()));
    }
    Ok(IvDataset {
        records,
        ..IvDataset::default()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitParam {
    Eta,
    Mu0,
    Vfb,
    Rs,
    Rd,
    Eta1,
    Dibl,
    GidlA,
    GidlC,
}

impl FitParam {
    pub const ALL: [FitParam; 9] = [
        FitParam::Eta,
        FitParam::Mu0,
        FitParam::Vfb,
        FitParam::Rs,
        FitParam::Rd,
        FitParam::Eta1,
        FitParam::Dibl,
        FitParam::GidlA,
        FitParam::GidlC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FitParam::Eta => "eta",
            FitParam::Mu0 => "mu0",
            FitParam::Vfb => "vfb",
            FitParam::Rs => "rs",
            FitParam::Rd => "rd",
            FitParam::Eta1 => "eta1",
            FitParam::Dibl => "dibl",
            FitParam::GidlA => "gidl_a",
            FitParam::GidlC => "gidl_c",
        }
    }

    pub fn get(self, card: &ModelCard) -> f64 {
        match self {
            FitParam::Eta => card.interface_trap,
            FitParam::Mu0 => card.mobility,
            FitParam::Vfb => card.flatband_voltage,
            FitParam::Rs => card.series_source,
            FitParam::Rd => card.series_drain,
            FitParam::Eta1 => card.resistance_bias,
            FitParam::Dibl => card.dibl,
            FitParam::GidlA => card.gidl_a,
            FitParam::GidlC => card.gidl_c,
        }
    }

    pub fn set(self, card: &mut ModelCard, v: f64) {
        let slot = match self {
            FitParam::Eta => &mut card.interface_trap,
            FitParam::Mu0 => &mut card.mobility,
            FitParam::Vfb => &mut card.flatband_voltage,
            FitParam::Rs => &mut card.series_source,
            FitParam::Rd => &mut card.series_drain,
            FitParam::Eta1 => &mut card.resistance_bias,
            FitParam::Dibl => &mut card.dibl,
            FitParam::GidlA => &mut card.gidl_a,
            FitParam::GidlC => &mut card.gidl_c,
        };
        *slot = v;
    }

    /// Bounds used when a fit spec does not give any, in SI units.
    pub fn default_bounds(self) -> (f64, f64) {
        match self {
            FitParam::Eta => (1.0, 3.0),
            FitParam::Mu0 => (1e-6, 0.1),
            FitParam::Vfb => (-2.0, 2.0),
            FitParam::Rs | FitParam::Rd => (0.0, 1e6),
            FitParam::Eta1 => (0.0, 1.0),
            FitParam::Dibl => (0.0, 0.5),
            FitParam::GidlA => (1e-12, 1.0),
            FitParam::GidlC => (0.0, 10.0),
        }
    }
}

impl FromStr for FitParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase();
        let key = match key.as_str() {
            "mu" | "mobility" => "mu0",
            "rsd" => return Err(Error::InvalidParameter("fit rs and rd separately".into())),
            k => k,
        };
        FitParam::ALL
            .into_iter()
            .find(|p| p.name() == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown fit parameter `{s}`")))
    }
}

impl fmt::Display for FitParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    LogCurrent,
    Linear,
    #[default]
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeParam {
    pub param: FitParam,
    pub lower: f64,
    pub upper: f64,
}

impl FreeParam {
    pub fn new(param: FitParam) -> Self {
        let (lower, upper) = param.default_bounds();
        FreeParam { param, lower, upper }
    }

    pub fn bounded(param: FitParam, lower: f64, upper: f64) -> Self {
        FreeParam { param, lower, upper }
    }

    /// Wide, strictly positive ranges are searched on a log scale.
    fn logarithmic(&self) -> bool {
        self.lower > 0.0 && self.upper / self.lower > 100.0
    }

    fn normalize(self, v: f64) -> f64 {
        let u = if self.logarithmic() {
            (v.ln() - self.lower.ln()) / (self.upper.ln() - self.lower.ln())
        } else {
            (v - self.lower) / (self.upper - self.lower)
        };
        u.clamp(0.0, 1.0)
    }

    fn denormalize(self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        if self.logarithmic() {
            (self.lower.ln() + u * (self.upper.ln() - self.lower.ln())).exp()
        } else {
            self.lower + u * (self.upper - self.lower)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSpec {
    pub free: Vec<FreeParam>,
    #[serde(default)]
    pub weighting: Weighting,
    #[serde(default = "default_starts")]
    pub starts: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

fn default_starts() -> usize {
    8
}

fn default_max_iterations() -> usize {
    200
}

impl FitSpec {
    pub fn new(params: &[FitParam]) -> Self {
        FitSpec {
            free: params.iter().map(|&p| FreeParam::new(p)).collect(),
            weighting: Weighting::default(),
            starts: default_starts(),
            seed: 0,
            max_iterations: default_max_iterations(),
        }
    }

    pub fn with_weighting(mut self, weighting: Weighting) -> Self {
        self.weighting = weighting;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.free.is_empty() {
            return Err(Error::InvalidParameter("fit spec has no free parameters".into()));
        }
        if self.starts == 0 || self.max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "fit needs at least one start and one iteration".into(),
            ));
        }
        for (k, f) in self.free.iter().enumerate() {
            if !(f.lower.is_finite() && f.upper.is_finite() && f.lower < f.upper) {
                return Err(Error::InvalidParameter(format!(
                    "{}: bounds [{}, {}] are not ordered",
                    f.param, f.lower, f.upper
                )));
            }
            if self.free[..k].iter().any(|g| g.param == f.param) {
                return Err(Error::InvalidParameter(format!("{} listed twice", f.param)));
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let spec: FitSpec = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: PathBuf::from(path),
            line: e.line(),
            message: e.to_string(),
        })?;
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResidual {
    pub vgs: f64,
    pub vds: f64,
    pub id_data: f64,
    pub id_model: f64,
    /// log10 |id_model / id_data|.
    pub decades: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FittedParam {
    pub name: String,
    pub initial: f64,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub at_bound: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub parameters: Vec<FittedParam>,
    pub residuals: Vec<PointResidual>,
    pub rms_decades: f64,
    pub cost: f64,
    pub converged: bool,
    pub iterations: usize,
    pub best_start: usize,
    pub weighting: Weighting,
}

impl FitReport {
    pub fn write_residual_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["vgs_v", "vds_v", "id_data_a", "id_model_a", "residual_decades"])?;
        for r in &self.residuals {
            out.write_record([
                format!("{:e}", r.vgs),
                format!("{:e}", r.vds),
                format!("{:e}", r.id_data),
                format!("{:e}", r.id_model),
                format!("{:e}", r.decades),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

struct Problem<'a> {
    card0: &'a ModelCard,
    data: &'a IvDataset,
    spec: &'a FitSpec,
    /// Rows below this magnitude are compared in log space under mixed weighting.
    split: f64,
    scale: f64,
}

const TINY: f64 = 1e-300;

impl Problem<'_> {
    fn card_at(&self, u: &[f64]) -> ModelCard {
        let mut card = self.card0.clone();
        for (f, &x) in self.spec.free.iter().zip(u) {
            f.param.set(&mut card, f.denormalize(x));
        }
        card
    }

    fn model(&self, u: &[f64]) -> Option<Vec<f64>> {
        let dev = Vnwfet::new(self.card_at(u)).ok()?;
        self.data
            .records
            .iter()
            .map(|r| {
                dev.terminal_current(BiasPoint::new(r.vgs, r.vds))
                    .ok()
                    .filter(|i| i.is_finite())
            })
            .collect()
    }

    fn residuals(&self, u: &[f64]) -> Option<DVector<f64>> {
        let model = self.model(u)?;
        let log = |m: f64, d: f64| (m.abs().max(TINY) / d.abs().max(TINY)).log10();
        let r = self
            .data
            .records
            .iter()
            .zip(&model)
            .map(|(rec, &m)| match self.spec.weighting {
                Weighting::LogCurrent => log(m, rec.id),
                Weighting::Linear => (m - rec.id) / self.scale,
                Weighting::Mixed => {
                    if rec.id.abs() < self.split {
                        log(m, rec.id)
                    } else {
                        (m - rec.id) / (rec.id.abs() * std::f64::consts::LN_10)
                    }
                }
            });
        Some(DVector::from_iterator(model.len(), r))
    }

    fn jacobian(&self, u: &[f64], r0: &DVector<f64>) -> Option<DMatrix<f64>> {
        const H: f64 = 1e-7;
        let mut jac = DMatrix::zeros(r0.len(), u.len());
        for k in 0..u.len() {
            let mut up = u.to_vec();
            // one-sided step pointing into the box
            let h = if u[k] + H <= 1.0 { H } else { -H };
            up[k] += h;
            let r1 = self.residuals(&up)?;
            jac.set_column(k, &((r1 - r0) / h));
        }
        Some(jac)
    }

    /// Projected Levenberg-Marquardt from `u0` in unit coordinates.
    fn solve(&self, u0: Vec<f64>) -> Option<(Vec<f64>, f64, usize, bool)> {
        let mut u = u0;
        let mut r = self.residuals(&u)?;
        let mut cost = r.norm_squared();
        let mut lambda = 1e-3;
        let n = u.len();
        for it in 0..self.spec.max_iterations {
            let jac = self.jacobian(&u, &r)?;
            let jtj = jac.transpose() * &jac;
            let g = jac.transpose() * &r;
            if g.amax() < 1e-14 * (1.0 + cost) {
                return Some((u, cost, it, true));
            }
            let mut accepted = false;
            while lambda < 1e12 {
                let mut a = jtj.clone();
                for k in 0..n {
                    a[(k, k)] += lambda * (jtj[(k, k)] + 1e-12);
                }
                let Some(step) = a.lu().solve(&(-&g)) else {
                    lambda *= 10.0;
                    continue;
                };
                let trial: Vec<f64> = u
                    .iter()
                    .zip(step.iter())
                    .map(|(x, d)| (x + d).clamp(0.0, 1.0))
                    .collect();
                match self.residuals(&trial) {
                    Some(rt) if rt.norm_squared() < cost => {
                        let new_cost = rt.norm_squared();
                        let moved = trial.iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                        let small = cost - new_cost <= 1e-12 * cost || moved < 1e-12;
                        u = trial;
                        r = rt;
                        cost = new_cost;
                        lambda = (lambda / 3.0).max(1e-12);
                        accepted = true;
                        if small {
                            return Some((u, cost, it + 1, true));
                        }
                        break;
                    }
                    _ => lambda *= 4.0,
                }
            }
            if !accepted {
                // No descent direction left at any damping: a stationary point.
                return Some((u, cost, it, true));
            }
        }
        Some((u, cost, self.spec.max_iterations, false))
    }
}

/// Bounded least-squares fit of the free parameters of `card0` to `data`.
/// Start 0 is `card0` itself; the others are drawn uniformly inside the
/// bounds from `spec.seed`.
pub fn fit(card0: &ModelCard, data: &IvDataset, spec: &FitSpec) -> Result<(ModelCard, FitReport)> {
    card0.validate()?;
    data.validate()?;
    spec.validate()?;
    if spec.weighting == Weighting::LogCurrent {
        if let Some(k) = data.records.iter().position(|r| r.id == 0.0) {
            return Err(Error::InvalidParameter(format!(
                "record {k} has zero current, unusable on a log scale"
            )));
        }
    }
    let peak = data.records.iter().map(|r| r.id.abs()).fold(0.0, f64::max);
    let problem = Problem {
        card0,
        data,
        spec,
        split: 1e-2 * peak,
        scale: peak.max(TINY),
    };

    let initial: Vec<f64> = spec.free.iter().map(|f| f.normalize(f.param.get(card0))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut starts = vec![initial];
    for _ in 1..spec.starts {
        starts.push((0..spec.free.len()).map(|_| rng.random::<f64>()).collect());
    }
    let outcomes: Vec<_> = starts
        .into_par_iter()
        .enumerate()
        .filter_map(|(k, u0)| problem.solve(u0).map(|o| (k, o)))
        .collect();
    let (best_start, (u, cost, iterations, converged)) = outcomes
        .into_iter()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then(a.0.cmp(&b.0)))
        .ok_or(Error::NonConvergence {
            iterations: 0,
            residual: f64::INFINITY,
            worst_index: 0,
        })?;

    let card = problem.card_at(&u);
    let model = problem.model(&u).expect("model evaluated during the fit");
    let residuals: Vec<PointResidual> = data
        .records
        .iter()
        .zip(&model)
        .map(|(r, &m)| PointResidual {
            vgs: r.vgs,
            vds: r.vds,
            id_data: r.id,
            id_model: m,
            decades: (m.abs().max(TINY) / r.id.abs().max(TINY)).log10(),
        })
        .collect();
    let rms_decades = (residuals.iter().map(|r| r.decades * r.decades).sum::<f64>() / residuals.len() as f64).sqrt();
    let parameters = spec
        .free
        .iter()
        .zip(&u)
        .map(|(f, &x)| {
            let at_bound = x <= 1e-9 || x >= 1.0 - 1e-9;
            if at_bound {
                log::warn!("fit parameter {} pinned at bound ({:e})", f.param, f.denormalize(x));
            }
            FittedParam {
                name: f.param.name().to_string(),
                initial: f.param.get(card0),
                value: f.denormalize(x),
                lower: f.lower,
                upper: f.upper,
                at_bound,
            }
        })
        .collect();
    if !converged {
        log::warn!("fit stopped after {iterations} iterations without converging");
    }
    Ok((
        card,
        FitReport {
            parameters,
            residuals,
            rms_decades,
            cost,
            converged,
            iterations,
            best_start,
            weighting: spec.weighting,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid() -> Vec<(f64, f64)> {
        let mut b = Vec::new();
        for vds in [-0.05, -1.0] {
            for k in 0..=20 {
                b.push((0.5 - 1.5 * f64::from(k) / 20.0, vds));
            }
        }
        b
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let card = ModelCard::d22_nf16();
        let ds = IvDataset::simulate(&card, &grid()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("iv.csv");
        ds.save_csv(&path).unwrap();
        let back = load_iv_csv(&path).unwrap();
        assert_eq!(back.records, ds.records);
    }

    #[test]
    fn csv_errors_name_the_line() {
        let p = Path::new("iv.csv");
        let ok = parse_iv_csv("vgs_v,vds_v,id_a\n0,0,1e-9\n-1,-1,2e-6\n-1,-0.5,1e-6\n".as_bytes(), p).unwrap();
        assert_eq!(ok.len(), 3);
        let err = parse_iv_csv("vgs_v,vds_v,id_a\n0,0,1e-9\n-1,-1,abc\n".as_bytes(), p).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(parse_iv_csv("vgs_v,vds_v,id_a\n".as_bytes(), p).is_err());
        assert!(parse_iv_csv("v,i\n1,2\n".as_bytes(), p).is_err());
    }

    #[test]
    fn spec_validation_and_names() {
        assert!(FitSpec::new(&[]).validate().is_err());
        assert!(FitSpec::new(&[FitParam::Eta, FitParam::Eta]).validate().is_err());
        let mut s = FitSpec::new(&[FitParam::Mu0]);
        s.free[0].lower = 1.0;
        s.free[0].upper = 0.5;
        assert!(s.validate().is_err());
        for p in FitParam::ALL {
            assert_eq!(p.name().parse::<FitParam>().unwrap(), p);
        }
    }

    #[test]
    fn unit_mapping_round_trips() {
        for f in [FreeParam::new(FitParam::Mu0), FreeParam::new(FitParam::Vfb)] {
            for v in [f.lower, 0.5 * (f.lower + f.upper), f.upper] {
                assert_relative_eq!(f.denormalize(f.normalize(v)), v, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn self_generated_data_is_a_fixed_point() {
        let card = ModelCard::d22_nf16();
        let ds = IvDataset::simulate(&card, &grid()).unwrap();
        let spec = FitSpec::new(&[FitParam::Eta]).with_weighting(Weighting::LogCurrent);
        let (fitted, report) = fit(&card, &ds, &spec).unwrap();
        assert_relative_eq!(fitted.interface_trap, card.interface_trap, max_relative = 1e-6);
        assert!(report.rms_decades < 1e-8, "{}", report.rms_decades);
    }

    #[test]
    fn recovers_a_perturbed_parameter() {
        let truth = ModelCard::d22_nf16();
        let ds = IvDataset::simulate(&truth, &grid()).unwrap();
        let mut start = truth.clone();
        start.interface_trap *= 1.3;
        let spec = FitSpec::new(&[FitParam::Eta]).with_weighting(Weighting::LogCurrent);
        let (fitted, report) = fit(&start, &ds, &spec).unwrap();
        assert_relative_eq!(fitted.interface_trap, truth.interface_trap, max_relative = 1e-6);
        assert!(!report.parameters[0].at_bound);
    }

    #[test]
    fn pinned_parameter_is_flagged() {
        let truth = ModelCard::d22_nf16();
        let ds = IvDataset::simulate(&truth, &grid()).unwrap();
        let mut spec = FitSpec::new(&[FitParam::Eta]).with_weighting(Weighting::LogCurrent);
        spec.free[0].lower = 1.5;
        spec.free[0].upper = 2.0;
        let (_, report) = fit(&truth, &ds, &spec).unwrap();
        assert!(report.parameters[0].at_bound);
        assert_relative_eq!(report.parameters[0].value, 1.5);
    }

    #[test]
    fn log_weighting_rejects_zero_current() {
        let ds = IvDataset::new(vec![IvRecord {
            vgs: 0.0,
            vds: 0.0,
            id: 0.0,
        }])
        .unwrap();
        let spec = FitSpec::new(&[FitParam::Eta]).with_weighting(Weighting::LogCurrent);
        assert!(fit(&ModelCard::default(), &ds, &spec).is_err());
    }
}
