//! Communication metrics of a complex response: attenuation, unwrapped
//! phase, phase and group delay, per-distance coefficients and in-band
//! dispersion statistics.
//!
//! Phase is the unwrapped standard argument of `H`, so a causal pure delay
//! `e^{-j2πfτ}` gives `τ_P = τ_G = τ > 0`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::response::{bracket, ComplexResponse, FrequencyGrid};

pub const DEFAULT_BAND_SAMPLES: usize = 64;

/// Removes 2π jumps so that successive differences lie in `(−π, π]`.
pub fn unwrap_phase(phases: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phases.len());
    let Some(&first) = phases.first() else {
        return out;
    };
    out.push(first);
    let mut prev_raw = first;
    let mut prev = first;
    for &p in &phases[1..] {
        let d = p - prev_raw;
        let d = d - 2.0 * PI * ((d - PI) / (2.0 * PI)).ceil();
        prev += d;
        prev_raw = p;
        out.push(prev);
    }
    out
}

/// Attenuation `−20 log10 |H|`, dB.
pub fn attenuation_db(h: &ComplexResponse) -> Vec<f64> {
    h.values.iter().map(|v| -20.0 * v.norm().log10()).collect()
}

pub fn unwrapped_phase(h: &ComplexResponse) -> Vec<f64> {
    unwrap_phase(&h.values.iter().map(|v| v.arg()).collect::<Vec<_>>())
}

/// `τ_P(f) = −φ(f) / (2πf)`.
pub fn phase_delay(h: &ComplexResponse) -> Vec<f64> {
    unwrapped_phase(h)
        .iter()
        .zip(h.freqs())
        .map(|(p, f)| -p / (2.0 * PI * f))
        .collect()
}

/// `τ_G(f) = −(1/2π) dφ/df`, three-point differences (second order on
/// non-uniform grids, one-sided at the ends).
pub fn group_delay(h: &ComplexResponse) -> Result<Vec<f64>> {
    let d = derivative(h.freqs(), &unwrapped_phase(h))?;
    Ok(d.into_iter().map(|v| -v / (2.0 * PI)).collect())
}

/// Inverse of [`group_delay`]: `φ(f) = φ(f₀) − 2π ∫ τ_G df` by the
/// trapezoid rule.
pub fn phase_from_group_delay(freqs: &[f64], tau_g: &[f64], phi0: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(freqs.len());
    let mut acc = phi0;
    for i in 0..freqs.len() {
        if i > 0 {
            acc -= PI * (tau_g[i] + tau_g[i - 1]) * (freqs[i] - freqs[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// Second-order three-point derivative on a strictly increasing grid.
pub fn derivative(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n < 3 {
        return Err(Error::domain(format!("need at least 3 points to differentiate, got {n}")));
    }
    assert_eq!(n, y.len());
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let (h1, h2) = (x[i] - x[i - 1], x[i + 1] - x[i]);
        d[i] = -h2 / (h1 * (h1 + h2)) * y[i - 1] + (h2 - h1) / (h1 * h2) * y[i] + h1 / (h2 * (h1 + h2)) * y[i + 1];
    }
    let (h1, h2) = (x[1] - x[0], x[2] - x[1]);
    d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1] - h1 / (h2 * (h1 + h2)) * y[2];
    let (h1, h2) = (x[n - 2] - x[n - 3], x[n - 1] - x[n - 2]);
    d[n - 1] = h2 / (h1 * (h1 + h2)) * y[n - 3] - (h1 + h2) / (h1 * h2) * y[n - 2] + (2.0 * h2 + h1) / (h2 * (h1 + h2)) * y[n - 1];
    Ok(d)
}

/// Per-frequency metrics of one response.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMetrics {
    pub grid: FrequencyGrid,
    pub alpha_db: Vec<f64>,
    pub phase_unwrapped: Vec<f64>,
    pub tau_p: Vec<f64>,
    pub tau_g: Vec<f64>,
}

pub fn channel_metrics(h: &ComplexResponse) -> Result<ChannelMetrics> {
    let phase_unwrapped = unwrapped_phase(h);
    let tau_p = phase_unwrapped
        .iter()
        .zip(h.freqs())
        .map(|(p, f)| -p / (2.0 * PI * f))
        .collect();
    let tau_g = derivative(h.freqs(), &phase_unwrapped)?
        .into_iter()
        .map(|v| -v / (2.0 * PI))
        .collect();
    Ok(ChannelMetrics {
        grid: h.grid.clone(),
        alpha_db: attenuation_db(h),
        phase_unwrapped,
        tau_p,
        tau_g,
    })
}

impl ChannelMetrics {
    fn at(&self, values: &[f64], f: f64) -> Result<f64> {
        let xs = self.grid.freqs();
        if !(f >= xs[0] && f <= xs[xs.len() - 1]) {
            return Err(Error::domain(format!(
                "{f} Hz outside metric grid [{}, {}]",
                xs[0],
                xs[xs.len() - 1]
            )));
        }
        if xs.len() == 1 {
            return Ok(values[0]);
        }
        let i = bracket(xs, f);
        let t = (f - xs[i]) / (xs[i + 1] - xs[i]);
        Ok(if t == 0.0 { values[i] } else { values[i] + t * (values[i + 1] - values[i]) })
    }
}

/// Distance-normalised coefficients at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedCoefficients {
    pub frequency: f64,
    /// Attenuation per distance, dB/cm.
    pub pl_per_d: f64,
    /// Phase-delay coefficient, ns/cm.
    pub k_p: f64,
    /// Group-delay coefficient, ns/cm.
    pub k_g: f64,
}

/// Normalises attenuation and delays by `d_cm` at each requested frequency
/// (linear interpolation between grid points).
pub fn normalized_coefficients(m: &ChannelMetrics, d_cm: f64, freqs: &[f64]) -> Result<Vec<NormalizedCoefficients>> {
    if !(d_cm > 0.0 && d_cm.is_finite()) {
        return Err(Error::domain(format!("normalisation distance must be > 0, got {d_cm}")));
    }
    freqs
        .iter()
        .map(|&f| {
            Ok(NormalizedCoefficients {
                frequency: f,
                pl_per_d: m.at(&m.alpha_db, f)? / d_cm,
                k_p: m.at(&m.tau_p, f)? * 1e9 / d_cm,
                k_g: m.at(&m.tau_g, f)? * 1e9 / d_cm,
            })
        })
        .collect()
}

/// In-band variability at one carrier and bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionStats {
    pub carrier: f64,
    pub bandwidth: f64,
    pub sigma_alpha: f64,
    pub sigma_tau_p: f64,
    pub sigma_tau_g: f64,
}

/// Samples `n` band-centred frequencies over `[fc − B/2, fc + B/2]`
/// (cell midpoints), interpolates attenuation and unwrapped phase with
/// natural cubic splines and returns population standard deviations.
pub fn wideband_dispersion(h: &ComplexResponse, fc: f64, b: f64, n: usize) -> Result<DispersionStats> {
    if n < 8 {
        return Err(Error::domain(format!("need at least 8 band samples, got {n}")));
    }
    if !(b > 0.0 && fc > 0.0) {
        return Err(Error::domain("carrier and bandwidth must be > 0"));
    }
    let (lo, hi) = (fc - b / 2.0, fc + b / 2.0);
    if lo <= 0.0 || !h.grid.contains_band(lo, hi) {
        return Err(Error::domain(format!(
            "band [{lo}, {hi}] Hz not covered by grid [{}, {}]",
            h.grid.first(),
            h.grid.last()
        )));
    }
    let xs = h.freqs();
    let alpha = Spline::natural(xs, &attenuation_db(h))?;
    let phase = Spline::natural(xs, &unwrapped_phase(h))?;
    let fs: Vec<f64> = (0..n).map(|i| lo + (i as f64 + 0.5) * b / n as f64).collect();
    let a: Vec<f64> = fs.iter().map(|&f| alpha.eval(f)).collect();
    let tp: Vec<f64> = fs.iter().map(|&f| -phase.eval(f) / (2.0 * PI * f)).collect();
    let tg: Vec<f64> = fs.iter().map(|&f| -phase.deriv(f) / (2.0 * PI)).collect();
    Ok(DispersionStats {
        carrier: fc,
        bandwidth: b,
        sigma_alpha: population_std(&a),
        sigma_tau_p: population_std(&tp),
        sigma_tau_g: population_std(&tg),
    })
}

pub fn population_std(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Natural cubic spline through strictly increasing knots.
#[derive(Debug, Clone)]
pub struct Spline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl Spline {
    pub fn natural(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::domain("spline needs at least 2 matching knots"));
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            // tridiagonal system for interior second derivatives
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            let mut sup = vec![0.0; k];
            for r in 0..k {
                let i = r + 1;
                let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
                diag[r] = 2.0 * (h0 + h1);
                sup[r] = h1;
                rhs[r] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for r in 1..k {
                let sub = x[r + 1] - x[r];
                let w = sub / diag[r - 1];
                diag[r] -= w * sup[r - 1];
                rhs[r] -= w * rhs[r - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for r in (0..k - 1).rev() {
                m[r + 1] = (rhs[r] - sup[r] * m[r + 2]) / diag[r];
            }
        }
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    fn segment(&self, t: f64) -> (usize, f64, f64, f64) {
        let i = bracket(&self.x, t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (i, h, a, b)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (i, h, a, b) = self.segment(t);
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let (i, h, a, b) = self.segment(t);
        (self.y[i + 1] - self.y[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * self.m[i]
            + (3.0 * b * b - 1.0) / 6.0 * h * self.m[i + 1]
    }
}

/// One row of the narrowband table.
#[derive(Debug, Clone, PartialEq)]
pub struct NarrowbandRow {
    pub config: String,
    /// Values at the low and high reference frequencies.
    pub pl_per_d: [f64; 2],
    pub k_p: [f64; 2],
    pub k_g: [f64; 2],
}

impl NarrowbandRow {
    pub fn from_coefficients(config: impl Into<String>, lo: &NormalizedCoefficients, hi: &NormalizedCoefficients) -> Self {
        Self {
            config: config.into(),
            pl_per_d: [lo.pl_per_d, hi.pl_per_d],
            k_p: [lo.k_p, hi.k_p],
            k_g: [lo.k_g, hi.k_g],
        }
    }
}

pub const NARROWBAND_HEADER: &str = "config,PL_per_d@10kHz,PL_per_d@1MHz,k_p@10kHz,k_p@1MHz,k_g@10kHz,k_g@1MHz";
pub const DISPERSION_HEADER: &str = "B_Hz,sigma_alpha_dB,sigma_tauP_s,sigma_tauG_s";

pub fn narrowband_csv(rows: &[NarrowbandRow]) -> String {
    let mut out = format!("{NARROWBAND_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.config, r.pl_per_d[0], r.pl_per_d[1], r.k_p[0], r.k_p[1], r.k_g[0], r.k_g[1]
        );
    }
    out
}

pub fn dispersion_csv(stats: &[DispersionStats]) -> String {
    let mut out = format!("{DISPERSION_HEADER}\n");
    for s in stats {
        let _ = writeln!(out, "{},{:e},{:e},{:e}", s.bandwidth, s.sigma_alpha, s.sigma_tau_p, s.sigma_tau_g);
    }
    out
}
