//! Frequency grids and complex frequency responses.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing list of positive frequencies in Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FrequencyGrid(Vec<f64>);

impl FrequencyGrid {
    pub fn new(freqs: Vec<f64>) -> Result<Self> {
        if freqs.is_empty() {
            return Err(Error::domain("frequency grid is empty"));
        }
        if freqs.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
            return Err(Error::domain("frequencies must be finite and > 0"));
        }
        if freqs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("frequencies must be strictly increasing"));
        }
        Ok(Self(freqs))
    }

    /// `n` points spaced uniformly from `start` to `stop` inclusive.
    pub fn linear(start: f64, stop: f64, n: usize) -> Result<Self> {
        if n == 1 {
            return Self::new(vec![start]);
        }
        let step = (stop - start) / (n as f64 - 1.0);
        Self::new((0..n).map(|k| start + step * k as f64).collect())
    }

    /// `n` points spaced uniformly in log10 from `start` to `stop` inclusive.
    pub fn log(start: f64, stop: f64, n: usize) -> Result<Self> {
        if !(start > 0.0 && stop > 0.0) {
            return Err(Error::domain("log grid bounds must be > 0"));
        }
        if n == 1 {
            return Self::new(vec![start]);
        }
        let (a, b) = (start.log10(), stop.log10());
        let step = (b - a) / (n as f64 - 1.0);
        let mut v: Vec<f64> = (0..n).map(|k| 10f64.powf(a + step * k as f64)).collect();
        v[0] = start;
        v[n - 1] = stop;
        Self::new(v)
    }

    pub fn freqs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.0[0]
    }

    pub fn last(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn contains_band(&self, lo: f64, hi: f64) -> bool {
        lo >= self.first() * (1.0 - 1e-12) && hi <= self.last() * (1.0 + 1e-12)
    }
}

impl TryFrom<Vec<f64>> for FrequencyGrid {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FrequencyGrid> for Vec<f64> {
    fn from(g: FrequencyGrid) -> Self {
        g.0
    }
}

/// Textual grid specification: `log:START:STOP:N` or `lin:START:STOP:N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpec {
    Log { start: f64, stop: f64, n: usize },
    Linear { start: f64, stop: f64, n: usize },
}

impl GridSpec {
    pub fn build(&self) -> Result<FrequencyGrid> {
        match *self {
            GridSpec::Log { start, stop, n } => FrequencyGrid::log(start, stop, n),
            GridSpec::Linear { start, stop, n } => FrequencyGrid::linear(start, stop, n),
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse {
            context: format!("grid spec `{s}`"),
            msg: m.to_string(),
        };
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(bad("expected KIND:START:STOP:N"));
        }
        let start: f64 = parts[1].parse().map_err(|_| bad("bad START"))?;
        let stop: f64 = parts[2].parse().map_err(|_| bad("bad STOP"))?;
        let n: usize = parts[3].parse().map_err(|_| bad("bad N"))?;
        if n == 0 || !(stop >= start) {
            return Err(bad("need N >= 1 and STOP >= START"));
        }
        match parts[0] {
            "log" => Ok(GridSpec::Log { start, stop, n }),
            "lin" | "linear" => Ok(GridSpec::Linear { start, stop, n }),
            _ => Err(bad("KIND must be `log` or `lin`")),
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridSpec::Log { start, stop, n } => write!(f, "log:{start:e}:{stop:e}:{n}"),
            GridSpec::Linear { start, stop, n } => write!(f, "lin:{start:e}:{stop:e}:{n}"),
        }
    }
}

/// Complex samples (an impedance or a transfer function) over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexResponse {
    pub grid: FrequencyGrid,
    pub values: Vec<Complex64>,
    /// Free-form label carried into exports.
    pub label: String,
}

impl ComplexResponse {
    pub fn new(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::domain(format!(
                "grid has {} points but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self {
            grid,
            values,
            label: String::new(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn from_fn(grid: FrequencyGrid, mut h: impl FnMut(f64) -> Complex64) -> Self {
        let values = grid.freqs().iter().map(|&f| h(f)).collect();
        Self {
            grid,
            values,
            label: String::new(),
        }
    }

    pub fn freqs(&self) -> &[f64] {
        self.grid.freqs()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            label: self.label.clone(),
        }
    }

    /// Linear interpolation of real and imaginary parts onto `grid`.
    /// Points outside the covered range are an error.
    pub fn interpolate(&self, grid: &FrequencyGrid) -> Result<Self> {
        let (xs, ys) = (self.freqs(), &self.values);
        if !self.grid.contains_band(grid.first(), grid.last()) {
            return Err(Error::domain(format!(
                "target grid [{}, {}] Hz outside response coverage [{}, {}] Hz",
                grid.first(),
                grid.last(),
                self.grid.first(),
                self.grid.last()
            )));
        }
        let values = grid
            .freqs()
            .iter()
            .map(|&f| interp_linear(xs, ys, f))
            .collect();
        Ok(Self {
            grid: grid.clone(),
            values,
            label: self.label.clone(),
        })
    }
}

pub(crate) fn bracket(xs: &[f64], x: f64) -> usize {
    // index i with xs[i] <= x <= xs[i+1], clamped to valid intervals
    match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(i) => i.min(xs.len().saturating_sub(2)),
        Err(i) => i.saturating_sub(1).min(xs.len().saturating_sub(2)),
    }
}

fn interp_linear(xs: &[f64], ys: &[Complex64], x: f64) -> Complex64 {
    if xs.len() == 1 {
        return ys[0];
    }
    let i = bracket(xs, x);
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] * (1.0 - t) + ys[i + 1] * t
}
