//! Measurement-to-twin alignment: frequency-independent gain and phase
//! compensation, Savitzky–Golay regularisation, replicate statistics and
//! similarity scoring.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{attenuation_db, derivative, unwrap_phase};
use crate::response::{ComplexResponse, FrequencyGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBand {
    pub f_low: f64,
    pub f_high: f64,
}

impl CalibrationBand {
    pub fn new(f_low: f64, f_high: f64) -> Result<Self> {
        if !(f_low > 0.0 && f_high > f_low && f_high.is_finite()) {
            return Err(Error::domain(format!("calibration band needs 0 < f_low < f_high, got {f_low}..{f_high}")));
        }
        Ok(Self { f_low, f_high })
    }

    /// Central half of the covered span.
    pub fn central(grid: &FrequencyGrid) -> Result<Self> {
        let (lo, hi) = (grid.first(), grid.last());
        let span = hi - lo;
        Self::new(lo + 0.25 * span, lo + 0.75 * span)
    }

    pub fn contains(&self, f: f64) -> bool {
        f >= self.f_low && f <= self.f_high
    }

    fn indices(&self, freqs: &[f64]) -> Result<Vec<usize>> {
        let idx: Vec<usize> = (0..freqs.len()).filter(|&i| self.contains(freqs[i])).collect();
        if idx.is_empty() {
            return Err(Error::domain(format!(
                "no frequency bins inside calibration band {}..{} Hz",
                self.f_low, self.f_high
            )));
        }
        Ok(idx)
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn same_grid(a: &ComplexResponse, b: &ComplexResponse) -> Result<()> {
    if a.grid != b.grid {
        return Err(Error::domain("responses are not on a common frequency grid"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeCorrection {
    pub factor: f64,
    pub corrected: ComplexResponse,
}

/// Median of `|reference| / |measured|` over the band bins, applied to the
/// whole measured response.
pub fn magnitude_correction(
    measured: &ComplexResponse,
    reference: &ComplexResponse,
    band: &CalibrationBand,
) -> Result<MagnitudeCorrection> {
    same_grid(measured, reference)?;
    let idx = band.indices(measured.freqs())?;
    let mut ratios = Vec::with_capacity(idx.len());
    for &i in &idx {
        let (m, r) = (measured.values[i].norm(), reference.values[i].norm());
        if m == 0.0 || r == 0.0 {
            return Err(Error::domain(format!("zero response at {} Hz inside calibration band", measured.freqs()[i])));
        }
        ratios.push(r / m);
    }
    let factor = median(ratios);
    Ok(MagnitudeCorrection {
        factor,
        corrected: measured.map(|v| v * factor),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCorrection {
    pub offset: f64,
    pub corrected: Vec<f64>,
}

/// Removes the band-mean difference between two unwrapped phase series.
pub fn phase_offset_removal(
    phase: &[f64],
    reference: &[f64],
    freqs: &[f64],
    band: &CalibrationBand,
) -> Result<PhaseCorrection> {
    if phase.len() != freqs.len() || reference.len() != freqs.len() {
        return Err(Error::domain("phase, reference and frequency lengths differ"));
    }
    let idx = band.indices(freqs)?;
    let offset = idx.iter().map(|&i| phase[i] - reference[i]).sum::<f64>() / idx.len() as f64;
    Ok(PhaseCorrection {
        offset,
        corrected: phase.iter().map(|p| p - offset).collect(),
    })
}

pub const SG_WINDOW: usize = 11;
pub const SG_ORDER: usize = 3;

/// Savitzky–Golay smoothing. Each point is the value at that point of the
/// least-squares polynomial over its window; windows are shifted inward at
/// the ends rather than truncated.
pub fn smooth_sg(series: &[f64], window: usize, order: usize) -> Result<Vec<f64>> {
    if window % 2 == 0 || window <= order {
        return Err(Error::domain(format!("SG window {window} must be odd and exceed order {order}")));
    }
    let n = series.len();
    if n < window {
        return Err(Error::domain(format!("series of {n} points shorter than SG window {window}")));
    }
    let half = window / 2;
    // weights depend only on where the evaluation point sits in the window
    let mut weights: Vec<Option<Vec<f64>>> = vec![None; window];
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let start = i.saturating_sub(half).min(n - window);
        let pos = i - start;
        if weights[pos].is_none() {
            let v = DMatrix::from_fn(window, order + 1, |r, c| (r as f64 - pos as f64).powi(c as i32));
            let pinv = v
                .pseudo_inverse(1e-12)
                .map_err(|e| Error::domain(format!("SG design matrix: {e}")))?;
            weights[pos] = Some(pinv.row(0).iter().cloned().collect());
        }
        let w = weights[pos].as_ref().unwrap();
        out.push(w.iter().zip(&series[start..start + window]).map(|(a, b)| a * b).sum());
    }
    Ok(out)
}

/// Centred moving average; the window shrinks symmetrically at the ends.
pub fn moving_average(series: &[f64], window: usize) -> Vec<f64> {
    let n = series.len();
    let half = window / 2;
    (0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            mean(&series[i - h..=i + h])
        })
        .collect()
}

/// 5 % of the bins, at least 3, forced odd.
pub fn default_ma_window(n: usize) -> usize {
    let w = ((0.05 * n as f64).round() as usize).max(3);
    w | 1
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub mean: Vec<f64>,
    /// Sample standard deviation (n − 1); zero for a single replicate.
    pub std: Vec<f64>,
}

pub fn ensemble_stats(replicates: &[Vec<f64>]) -> Result<EnsembleStats> {
    let first = replicates.first().ok_or_else(|| Error::domain("no replicates"))?;
    let n = first.len();
    if replicates.iter().any(|r| r.len() != n) {
        return Err(Error::domain("replicates have different lengths"));
    }
    let k = replicates.len() as f64;
    let mut m = vec![0.0; n];
    let mut s = vec![0.0; n];
    for i in 0..n {
        m[i] = replicates.iter().map(|r| r[i]).sum::<f64>() / k;
        if replicates.len() > 1 {
            s[i] = (replicates.iter().map(|r| (r[i] - m[i]).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
        }
    }
    Ok(EnsembleStats { mean: m, std: s })
}

/// Complex mean and spread `sqrt(Σ|z − z̄|² / (n − 1))` per frequency.
pub fn ensemble_stats_complex(replicates: &[ComplexResponse]) -> Result<(ComplexResponse, Vec<f64>)> {
    let first = replicates.first().ok_or_else(|| Error::domain("no replicates"))?;
    for r in replicates {
        same_grid(first, r)?;
    }
    let k = replicates.len() as f64;
    let mut m = vec![Complex64::new(0.0, 0.0); first.len()];
    let mut s = vec![0.0; first.len()];
    for i in 0..first.len() {
        m[i] = replicates.iter().map(|r| r.values[i]).sum::<Complex64>() / k;
        if replicates.len() > 1 {
            s[i] = (replicates.iter().map(|r| (r.values[i] - m[i]).norm_sqr()).sum::<f64>() / (k - 1.0)).sqrt();
        }
    }
    Ok((ComplexResponse::new(first.grid.clone(), m)?, s))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub rmse: f64,
    pub mae: f64,
    /// `mean(a − b)`.
    pub bias: f64,
    /// `None` when either series has no variance.
    pub corr: Option<f64>,
}

pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    let scale = |v: &[f64], m: f64| v.iter().map(|x| x.abs()).fold(m.abs(), f64::max);
    let tiny = |s: f64, sc: f64| s <= (1e-12 * sc).powi(2) * a.len() as f64;
    if tiny(saa, scale(a, ma)) || tiny(sbb, scale(b, mb)) {
        return None;
    }
    Some((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Error statistics of `a` against `b`. With `smoothing`, correlation uses
/// moving-averaged copies while the error terms use the raw series.
pub fn similarity(a: &[f64], b: &[f64], smoothing: Option<usize>) -> Result<SimilarityReport> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::domain(format!("similarity needs equal lengths >= 2, got {} and {}", a.len(), b.len())));
    }
    let n = a.len() as f64;
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let rmse = (d.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
    let mae = d.iter().map(|v| v.abs()).sum::<f64>() / n;
    let bias = d.iter().sum::<f64>() / n;
    let corr = match smoothing {
        Some(w) if w > 1 => pearson(&moving_average(a, w), &moving_average(b, w)),
        _ => pearson(a, b),
    };
    Ok(SimilarityReport { rmse, mae, bias, corr })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityRow {
    pub configuration: String,
    pub quantity: String,
    pub report: SimilarityReport,
}

pub const REPORT_HEADER: &str = "configuration,quantity,RMSE,MAE,Corr";

pub fn report_csv(rows: &[SimilarityRow]) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    for r in rows {
        let corr = r.report.corr.map_or_else(|| "--".to_string(), |c| format!("{c:.6}"));
        let _ = writeln!(out, "{},{},{:.6e},{:.6e},{corr}", r.configuration, r.quantity, r.report.rmse, r.report.mae);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineParams {
    /// Defaults to the central half of the grid.
    pub band: Option<CalibrationBand>,
    pub sg_window: usize,
    pub sg_order: usize,
    /// Moving-average window for the attenuation correlation; defaults to
    /// [`default_ma_window`].
    pub ma_window: Option<usize>,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            band: None,
            sg_window: SG_WINDOW,
            sg_order: SG_ORDER,
            ma_window: None,
        }
    }
}

/// Calibrated measurement ensemble and its agreement with the twin.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub band: CalibrationBand,
    pub gain_factor: f64,
    pub phase_offset: f64,
    pub attenuation: EnsembleStats,
    /// Replicate-mean unwrapped phase after offset removal, SG-smoothed.
    pub phase: Vec<f64>,
    pub tau_p: Vec<f64>,
    pub tau_g: Vec<f64>,
    pub attenuation_sim: SimilarityReport,
    pub phase_delay_sim: SimilarityReport,
    pub group_delay_sim: SimilarityReport,
}

impl Comparison {
    pub fn rows(&self, configuration: &str) -> Vec<SimilarityRow> {
        [
            ("Attenuation (dB)", self.attenuation_sim),
            ("Phase delay (s)", self.phase_delay_sim),
            ("Group delay (s)", self.group_delay_sim),
        ]
        .into_iter()
        .map(|(q, report)| SimilarityRow {
            configuration: configuration.to_string(),
            quantity: q.to_string(),
            report,
        })
        .collect()
    }
}

fn delays(freqs: &[f64], phase: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let tau_p = freqs.iter().zip(phase).map(|(f, p)| -p / (2.0 * PI * f)).collect();
    let tau_g = derivative(freqs, phase)?.iter().map(|d| -d / (2.0 * PI)).collect();
    Ok((tau_p, tau_g))
}

/// Full alignment of measured replicates against the twin: one median gain
/// factor from the replicate mean, applied to every replicate; per-replicate
/// band phase-offset removal; replicate statistics; SG-regularised phase
/// (twin and measurement alike); similarity of attenuation, phase delay and group delay (measured − twin).
pub fn compare(dt: &ComplexResponse, replicates: &[ComplexResponse], params: &PipelineParams) -> Result<Comparison> {
    let (mean_meas, _) = ensemble_stats_complex(replicates)?;
    same_grid(dt, &mean_meas)?;
    let freqs = dt.freqs();
    let band = match params.band {
        Some(b) => b,
        None => CalibrationBand::central(&dt.grid)?,
    };
    let gain = magnitude_correction(&mean_meas, dt, &band)?.factor;
    let dt_phase = unwrap_phase(&dt.values.iter().map(|v| v.arg()).collect::<Vec<_>>());
    let mut atts = Vec::with_capacity(replicates.len());
    let mut phases = Vec::with_capacity(replicates.len());
    let mut offsets = Vec::with_capacity(replicates.len());
    for r in replicates {
        let scaled = r.map(|v| v * gain);
        atts.push(attenuation_db(&scaled));
        let ph = unwrap_phase(&scaled.values.iter().map(|v| v.arg()).collect::<Vec<_>>());
        let pc = phase_offset_removal(&ph, &dt_phase, freqs, &band)?;
        offsets.push(pc.offset);
        phases.push(pc.corrected);
    }
    let attenuation = ensemble_stats(&atts)?;
    let phase = smooth_sg(&ensemble_stats(&phases)?.mean, params.sg_window, params.sg_order)?;
    let (tau_p, tau_g) = delays(freqs, &phase)?;
    // same regularisation on the twin so identical inputs compare exactly
    let (dt_tau_p, dt_tau_g) = delays(freqs, &smooth_sg(&dt_phase, params.sg_window, params.sg_order)?)?;
    let dt_att = attenuation_db(dt);
    let ma = params.ma_window.unwrap_or_else(|| default_ma_window(freqs.len()));
    Ok(Comparison {
        band,
        gain_factor: gain,
        phase_offset: mean(&offsets),
        attenuation_sim: similarity(&attenuation.mean, &dt_att, Some(ma))?,
        phase_delay_sim: similarity(&tau_p, &dt_tau_p, None)?,
        group_delay_sim: similarity(&tau_g, &dt_tau_g, None)?,
        attenuation,
        phase,
        tau_p,
        tau_g,
    })
}

/// Synthetic "measurement" model: the twin response distorted by a
/// constant gain and phase error, a frequency-dependent contact mismatch
/// (log-frequency tilt plus sinusoidal ripple) and per-replicate noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FixtureModel {
    pub gain: f64,
    pub phase_offset: f64,
    /// Attenuation mismatch per decade, dB, zero at the band centre.
    pub tilt_db_per_decade: f64,
    pub ripple_db: f64,
    pub ripple_period_hz: f64,
    pub noise_db: f64,
    pub phase_noise_rad: f64,
    /// Extra phase delay, seconds, applied as `−2πf·τ`.
    pub excess_delay: f64,
    pub replicates: usize,
}

impl Default for FixtureModel {
    fn default() -> Self {
        Self {
            gain: 0.5,
            phase_offset: 0.3,
            tilt_db_per_decade: -19.5,
            ripple_db: 5.0,
            ripple_period_hz: 50e3,
            noise_db: 4.0,
            phase_noise_rad: 0.02,
            excess_delay: 1.5e-6,
            replicates: 40,
        }
    }
}

pub fn synthetic_measurements(dt: &ComplexResponse, model: &FixtureModel, seed: u64) -> Result<Vec<ComplexResponse>> {
    if model.replicates == 0 || !(model.gain > 0.0) {
        return Err(Error::domain("fixture needs >= 1 replicate and a positive gain"));
    }
    let freqs = dt.freqs();
    let fmid = (dt.grid.first() * dt.grid.last()).sqrt();
    let noise = Normal::new(0.0, 1.0).map_err(|e| Error::domain(e.to_string()))?;
    let mut out = Vec::with_capacity(model.replicates);
    for r in 0..model.replicates {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let values = dt
            .values
            .iter()
            .zip(freqs)
            .map(|(h, &f)| {
                // attenuation mismatch in dB (positive = more loss)
                let mismatch = model.tilt_db_per_decade * (fmid / f).log10()
                    + model.ripple_db * (2.0 * PI * f / model.ripple_period_hz).sin()
                    + model.noise_db * noise.sample(&mut rng);
                let phase = model.phase_offset - 2.0 * PI * f * model.excess_delay
                    + model.phase_noise_rad * noise.sample(&mut rng);
                h * model.gain * 10f64.powf(-mismatch / 20.0) * Complex64::from_polar(1.0, phase)
            })
            .collect();
        out.push(ComplexResponse::new(dt.grid.clone(), values)?);
    }
    Ok(out)
}
