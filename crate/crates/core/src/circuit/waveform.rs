use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// One sampled signal. `times` is strictly increasing; for DC sweeps it holds
/// the swept voltage instead of time.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub label: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub time: f64,
    pub rising: bool,
}

impl Waveform {
    pub fn new(label: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if times.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "waveform `{label}`: {} times vs {} values",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(format!(
                "waveform `{label}`: abscissa must be strictly increasing"
            )));
        }
        Ok(Waveform { label, times, values })
    }

    /// Builds a waveform by sampling `f` on `times`.
    pub fn from_fn(label: &str, times: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = times.iter().map(|&t| f(t)).collect();
        Self::new(label, times, values)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Linear interpolation, clamped to the end values outside the span.
    pub fn value_at(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.values[0];
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1];
        }
        let k = self.times.partition_point(|&x| x <= t);
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let (v0, v1) = (self.values[k - 1], self.values[k]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    /// Portion of the waveform on `[t0, t1]`, with interpolated end samples.
    pub fn slice(&self, t0: f64, t1: f64) -> Result<Waveform> {
        if !(t1 > t0) {
            return Err(Error::InvalidParameter(format!("empty slice [{t0}, {t1}]")));
        }
        let mut times = vec![t0];
        let mut values = vec![self.value_at(t0)];
        for (&t, &v) in self.times.iter().zip(&self.values) {
            if t > t0 && t < t1 {
                times.push(t);
                values.push(v);
            }
        }
        times.push(t1);
        values.push(self.value_at(t1));
        Waveform::new(self.label.clone(), times, values)
    }

    /// Level crossings with linear interpolation between samples.
    pub fn crossings(&self, level: f64) -> Vec<Crossing> {
        let mut out = Vec::new();
        for k in 1..self.times.len() {
            let (a, b) = (self.values[k - 1] - level, self.values[k] - level);
            let rising = a < 0.0 && b >= 0.0;
            let falling = a > 0.0 && b <= 0.0;
            if rising || falling {
                let frac = a / (a - b);
                let t = self.times[k - 1] + frac * (self.times[k] - self.times[k - 1]);
                out.push(Crossing { time: t, rising });
            }
        }
        out
    }

    /// Trapezoidal integral over the whole span.
    pub fn integral(&self) -> f64 {
        self.times
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(t, v)| 0.5 * (v[0] + v[1]) * (t[1] - t[0]))
            .sum()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn shifted(&self, dt: f64) -> Waveform {
        Waveform {
            label: self.label.clone(),
            times: self.times.iter().map(|t| t + dt).collect(),
            values: self.values.clone(),
        }
    }
}

/// Several signals sharing one abscissa, as produced by a sweep or a
/// transient run.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformSet {
    pub abscissa_label: String,
    pub abscissa: Vec<f64>,
    pub traces: Vec<(String, Vec<f64>)>,
}

impl WaveformSet {
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.traces.iter().map(|(l, _)| l.as_str())
    }

    pub fn trace(&self, label: &str) -> Option<&[f64]> {
        self.traces.iter().find(|(l, _)| l == label).map(|(_, v)| v.as_slice())
    }

    pub fn waveform(&self, label: &str) -> Result<Waveform> {
        let values = self
            .trace(label)
            .ok_or_else(|| Error::InvalidParameter(format!("no trace labelled `{label}`")))?;
        Waveform::new(label, self.abscissa.clone(), values.to_vec())
    }

    /// CSV with header `<abscissa>,<label>...`; values use the shortest
    /// representation that round-trips exactly.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "{}", self.abscissa_label)?;
        for (label, _) in &self.traces {
            write!(w, ",{label}")?;
        }
        writeln!(w)?;
        for (k, x) in self.abscissa.iter().enumerate() {
            write!(w, "{x:e}")?;
            for (_, values) in &self.traces {
                write!(w, ",{:e}", values[k])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ramp() -> Waveform {
        Waveform::new("v", vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn rejects_unsorted_or_mismatched() {
        assert!(Waveform::new("x", vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(Waveform::new("x", vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn interpolation_and_crossings() {
        let w = ramp();
        assert_relative_eq!(w.value_at(0.25), 0.25);
        assert_relative_eq!(w.value_at(-1.0), 0.0);
        let c = w.crossings(0.5);
        assert_eq!(c.len(), 2);
        assert!(c[0].rising && !c[1].rising);
        assert_relative_eq!(c[0].time, 0.5);
        assert_relative_eq!(c[1].time, 2.5);
    }

    #[test]
    fn integral_and_slice() {
        let w = ramp();
        assert_relative_eq!(w.integral(), 2.0);
        let s = w.slice(0.5, 2.5).unwrap();
        assert_relative_eq!(s.integral(), 0.375 + 1.0 + 0.375);
    }

    #[test]
    fn csv_header_and_round_trip_precision() {
        let set = WaveformSet {
            abscissa_label: "time_s".into(),
            abscissa: vec![0.0, 1e-12 / 3.0],
            traces: vec![("v(out)".into(), vec![0.1 + 0.2, std::f64::consts::PI])],
        };
        let mut buf = Vec::new();
        set.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "time_s,v(out)");
        let row: Vec<f64> = lines.nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(row[0], 1e-12 / 3.0);
        assert_eq!(row[1], std::f64::consts::PI);
    }
}
