//! PN channel-sounding simulation: m-sequence excitation, periodic channel
//! convolution with white Gaussian noise, correlation CIR estimation and
//! cross-spectral transfer-function estimation.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::response::{ComplexResponse, FrequencyGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SoundingConfig {
    pub pn_degree: u32,
    /// Feedback taps as polynomial exponents, the degree itself included.
    pub taps: Vec<u32>,
    pub chip_duration: f64,
    pub sample_rate: f64,
    /// Per-record signal-to-noise ratio; `inf` disables noise.
    pub snr_db: f64,
    pub repetitions: usize,
    /// Flat transmit gain applied to the chip waveform.
    pub transconductance: f64,
    pub welch: WelchParams,
}

impl Default for SoundingConfig {
    fn default() -> Self {
        Self {
            pn_degree: 14,
            taps: vec![14, 13, 12, 2],
            chip_duration: 1.0 / 192e3,
            sample_rate: 192e3,
            snr_db: 20.0,
            repetitions: 40,
            transconductance: 1.0,
            welch: WelchParams::default(),
        }
    }
}

impl SoundingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pn_degree < 2 || self.pn_degree > 30 {
            return Err(Error::validation("pn_degree", "must be in 2..=30"));
        }
        if !(self.sample_rate > 0.0 && self.chip_duration > 0.0) {
            return Err(Error::validation("sample_rate", "sample rate and chip duration must be > 0"));
        }
        if self.samples_per_chip() < 1 {
            return Err(Error::validation("chip_duration", "f_s * T_c must be >= 1"));
        }
        if self.repetitions < 1 {
            return Err(Error::validation("repetitions", "must be >= 1"));
        }
        if self.snr_db.is_nan() {
            return Err(Error::validation("snr_db", "must be a number"));
        }
        self.welch.validate()
    }

    pub fn samples_per_chip(&self) -> usize {
        (self.sample_rate * self.chip_duration).round() as usize
    }

    pub fn nyquist(&self) -> f64 {
        self.sample_rate / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    Hann,
    Rectangular,
}

/// Segment averaging of the cross-spectral estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WelchParams {
    pub segments: usize,
    /// Fractional overlap of consecutive segments, in `[0, 1)`.
    pub overlap: f64,
    pub window: Window,
}

impl Default for WelchParams {
    fn default() -> Self {
        Self {
            segments: 8,
            overlap: 0.5,
            window: Window::Hann,
        }
    }
}

impl WelchParams {
    /// One rectangular segment over the whole record; exact for periodic
    /// excitation spanning whole periods.
    pub fn periodic() -> Self {
        Self {
            segments: 1,
            overlap: 0.0,
            window: Window::Rectangular,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.segments < 1 {
            return Err(Error::validation("welch.segments", "must be >= 1"));
        }
        if !(0.0..1.0).contains(&self.overlap) {
            return Err(Error::validation("welch.overlap", "must be in [0, 1)"));
        }
        Ok(())
    }

    /// Segment length and hop for a record of `n` samples.
    fn layout(&self, n: usize) -> (usize, usize) {
        // n = L + (K - 1) * L * (1 - overlap)
        let k = self.segments as f64;
        let len = (n as f64 / (1.0 + (k - 1.0) * (1.0 - self.overlap))).floor() as usize;
        let hop = ((len as f64) * (1.0 - self.overlap)).round().max(1.0) as usize;
        (len, hop)
    }
}

/// Bipolar maximal-length sequence from a Fibonacci LFSR seeded all-ones.
/// Bit 1 maps to −1 and bit 0 to +1.
pub fn generate_pn(m: u32, taps: &[u32]) -> Result<Vec<f64>> {
    if !(2..=30).contains(&m) {
        return Err(Error::domain(format!("PN degree must be in 2..=30, got {m}")));
    }
    if taps.is_empty() || taps.iter().any(|&t| t == 0 || t > m) || !taps.contains(&m) {
        return Err(Error::domain(format!("taps {taps:?} must lie in 1..={m} and include {m}")));
    }
    let period = (1usize << m) - 1;
    let init: u32 = (1u32 << m) - 1;
    // bit (t - 1) of the state holds stage t
    let mask: u32 = taps.iter().fold(0, |acc, &t| acc ^ (1 << (t - 1)));
    let mut state = init;
    let mut out = Vec::with_capacity(period);
    for k in 0..period {
        let bit = (state >> (m - 1)) & 1;
        out.push(if bit == 1 { -1.0 } else { 1.0 });
        let fb = (state & mask).count_ones() & 1;
        state = ((state << 1) | fb) & init;
        if state == init && k + 1 < period {
            return Err(Error::domain(format!(
                "taps {taps:?} are not maximal: period {} instead of {period}",
                k + 1
            )));
        }
    }
    if state != init {
        return Err(Error::domain(format!("taps {taps:?} do not return to the seed state")));
    }
    Ok(out)
}

/// Circular cross-correlation `r[ℓ] = Σ a[k] b[k − ℓ]`.
pub fn circular_xcorr(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    assert_eq!(n, b.len());
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut fa: Vec<Complex64> = a.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut fb: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    let mut prod: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x * y.conj()).collect();
    inv.process(&mut prod);
    prod.iter().map(|v| v.re / n as f64).collect()
}

/// Linear channel applied to the periodic excitation.
#[derive(Debug, Clone, PartialEq)]
pub enum Channel {
    /// Causal impulse response in samples.
    Fir(Vec<f64>),
    /// Transfer function, sampled on the DFT bins of one excitation period
    /// (linear in re/im between grid points, held constant outside).
    Response(ComplexResponse),
}

fn response_at(h: &ComplexResponse, f: f64) -> Complex64 {
    let xs = h.freqs();
    if f <= xs[0] {
        return h.values[0];
    }
    if f >= xs[xs.len() - 1] {
        return h.values[xs.len() - 1];
    }
    let i = crate::response::bracket(xs, f);
    let t = (f - xs[i]) / (xs[i + 1] - xs[i]);
    h.values[i] * (1.0 - t) + h.values[i + 1] * t
}

/// DFT of the channel on an `n`-point period at sample rate `fs`.
fn channel_bins(ch: &Channel, n: usize, fs: f64) -> Result<Vec<Complex64>> {
    match ch {
        Channel::Fir(h) => {
            if h.is_empty() {
                return Err(Error::domain("empty channel"));
            }
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            for (k, &v) in h.iter().enumerate() {
                buf[k % n] += v;
            }
            FftPlanner::new().plan_fft_forward(n).process(&mut buf);
            Ok(buf)
        }
        Channel::Response(h) => {
            if h.is_empty() {
                return Err(Error::domain("empty channel"));
            }
            let mut bins = vec![Complex64::new(0.0, 0.0); n];
            bins[0] = Complex64::new(response_at(h, 0.0).re, 0.0);
            for k in 1..=n / 2 {
                let v = response_at(h, k as f64 * fs / n as f64);
                bins[k] = v;
                bins[n - k] = v.conj();
            }
            if n % 2 == 0 {
                bins[n / 2] = Complex64::new(bins[n / 2].re, 0.0);
            }
            Ok(bins)
        }
    }
}

/// Real impulse response of `taps` samples whose DFT matches the channel on
/// a `taps`-point grid (frequency sampling).
pub fn fir_from_response(h: &ComplexResponse, fs: f64, taps: usize) -> Result<Vec<f64>> {
    let mut bins = channel_bins(&Channel::Response(h.clone()), taps, fs)?;
    FftPlanner::new().plan_fft_inverse(taps).process(&mut bins);
    Ok(bins.iter().map(|v| v.re / taps as f64).collect())
}

/// Upsamples chips to samples with rectangular pulses.
pub fn chip_waveform(chips: &[f64], samples_per_chip: usize) -> Vec<f64> {
    chips
        .iter()
        .flat_map(|&c| std::iter::repeat(c).take(samples_per_chip))
        .collect()
}

/// One period of the steady-state received signal
/// `y[k] = G Σ h[ℓ] x[k − ℓ] + w[k]` for periodic `x`, with white Gaussian
/// `w` scaled to `cfg.snr_db` relative to the noiseless signal power.
pub fn synthesize_rx(channel: &Channel, x: &[f64], cfg: &SoundingConfig, seed: u64) -> Result<Vec<f64>> {
    synthesize_rx_stream(channel, x, cfg, seed, 0)
}

fn synthesize_rx_stream(channel: &Channel, x: &[f64], cfg: &SoundingConfig, seed: u64, stream: u64) -> Result<Vec<f64>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::domain("empty excitation"));
    }
    let bins = channel_bins(channel, n, cfg.sample_rate)?;
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (b, h) in buf.iter_mut().zip(&bins) {
        *b *= h;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let g = cfg.transconductance / n as f64;
    let mut y: Vec<f64> = buf.iter().map(|v| v.re * g).collect();
    if cfg.snr_db.is_finite() {
        let p = y.iter().map(|v| v * v).sum::<f64>() / n as f64;
        let sd = (p / 10f64.powf(cfg.snr_db / 10.0)).sqrt();
        if sd > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let normal = Normal::new(0.0, sd).map_err(|e| Error::domain(e.to_string()))?;
            for v in y.iter_mut() {
                *v += normal.sample(&mut rng);
            }
        }
    }
    Ok(y)
}

/// Correlation estimate of the channel impulse response.
#[derive(Debug, Clone, PartialEq)]
pub struct CirEstimate {
    pub taps: Vec<f64>,
    /// `|ĥ|²` normalised to unit peak.
    pub pdp: Vec<f64>,
}

/// Circular cross-correlation of `y` with the chip waveform, normalised by
/// the waveform energy. Whole periods in `y` are averaged first.
pub fn estimate_cir(y: &[f64], pn: &[f64], cfg: &SoundingConfig) -> Result<CirEstimate> {
    let x = chip_waveform(pn, cfg.samples_per_chip());
    let p = x.len();
    if p == 0 || y.len() < p {
        return Err(Error::domain(format!("record of {} samples is shorter than one period ({p})", y.len())));
    }
    let periods = y.len() / p;
    let mut folded = vec![0.0; p];
    for r in 0..periods {
        for (f, v) in folded.iter_mut().zip(&y[r * p..(r + 1) * p]) {
            *f += v / periods as f64;
        }
    }
    let energy = x.iter().map(|v| v * v).sum::<f64>();
    let taps: Vec<f64> = circular_xcorr(&folded, &x).iter().map(|v| v / energy).collect();
    let peak = taps.iter().map(|v| v * v).fold(0.0, f64::max);
    let pdp = taps
        .iter()
        .map(|v| if peak > 0.0 { v * v / peak } else { 0.0 })
        .collect();
    Ok(CirEstimate { taps, pdp })
}

fn window(kind: Window, n: usize) -> Vec<f64> {
    match kind {
        Window::Rectangular => vec![1.0; n],
        // periodic Hann
        Window::Hann => (0..n).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos()).collect(),
    }
}

/// `Ĥ = S_yx / S_xx` with default Welch averaging, interpolated onto `grid`.
pub fn estimate_tf(y: &[f64], x: &[f64], fs: f64, grid: &FrequencyGrid) -> Result<ComplexResponse> {
    estimate_tf_with(y, x, fs, grid, &WelchParams::default())
}

pub fn estimate_tf_with(
    y: &[f64],
    x: &[f64],
    fs: f64,
    grid: &FrequencyGrid,
    welch: &WelchParams,
) -> Result<ComplexResponse> {
    welch.validate()?;
    if y.len() != x.len() {
        return Err(Error::domain(format!("record lengths differ: {} vs {}", y.len(), x.len())));
    }
    if grid.last() > fs / 2.0 {
        return Err(Error::domain(format!("grid reaches {} Hz beyond Nyquist {}", grid.last(), fs / 2.0)));
    }
    let (len, hop) = welch.layout(x.len());
    if len < 4 {
        return Err(Error::domain("record too short for the requested segmentation"));
    }
    let w = window(welch.window, len);
    let fft = FftPlanner::new().plan_fft_forward(len);
    let nb = len / 2 + 1;
    let mut sxx = vec![0.0; nb];
    let mut syx = vec![Complex64::new(0.0, 0.0); nb];
    let mut bx = vec![Complex64::new(0.0, 0.0); len];
    let mut by = vec![Complex64::new(0.0, 0.0); len];
    for s in 0..welch.segments {
        let start = s * hop;
        if start + len > x.len() {
            break;
        }
        for i in 0..len {
            bx[i] = Complex64::new(x[start + i] * w[i], 0.0);
            by[i] = Complex64::new(y[start + i] * w[i], 0.0);
        }
        fft.process(&mut bx);
        fft.process(&mut by);
        for k in 0..nb {
            sxx[k] += bx[k].norm_sqr();
            syx[k] += by[k] * bx[k].conj();
        }
    }
    let floor = 1e-12 * sxx.iter().cloned().fold(0.0, f64::max);
    let mut fk = Vec::with_capacity(nb);
    let mut hk = Vec::with_capacity(nb);
    for k in 0..nb {
        // bins without excitation are dropped and bridged by interpolation
        if sxx[k] > floor {
            fk.push(k as f64 * fs / len as f64);
            hk.push(syx[k] / sxx[k]);
        }
    }
    if fk.len() < 2 {
        return Err(Error::domain("excitation has no usable spectral content"));
    }
    let values = grid
        .freqs()
        .iter()
        .map(|&f| {
            if f < fk[0] || f > fk[fk.len() - 1] {
                return Err(Error::domain(format!("{f} Hz outside estimated band")));
            }
            let i = crate::response::bracket(&fk, f);
            let t = (f - fk[i]) / (fk[i + 1] - fk[i]);
            Ok(hk[i] * (1.0 - t) + hk[i + 1] * t)
        })
        .collect::<Result<Vec<_>>>()?;
    ComplexResponse::new(grid.clone(), values)
}

/// Outcome of a simulated sounding session.
#[derive(Debug, Clone, PartialEq)]
pub struct SoundingRecord {
    pub tx_chips: Vec<f64>,
    /// Transmitted waveform, one period.
    pub tx: Vec<f64>,
    /// Received waveform averaged over repetitions, one period.
    pub rx: Vec<f64>,
    pub cir: CirEstimate,
    pub est_tf: ComplexResponse,
}

/// Runs `cfg.repetitions` independent noisy records of one excitation
/// period, averages them coherently and estimates CIR and `Ĥ` on `grid`.
pub fn run_sounding(channel: &Channel, cfg: &SoundingConfig, grid: &FrequencyGrid, seed: u64) -> Result<SoundingRecord> {
    cfg.validate()?;
    let chips = generate_pn(cfg.pn_degree, &cfg.taps)?;
    let tx = chip_waveform(&chips, cfg.samples_per_chip());
    let mut rx = vec![0.0; tx.len()];
    for r in 0..cfg.repetitions {
        let y = synthesize_rx_stream(channel, &tx, cfg, seed, r as u64)?;
        for (a, b) in rx.iter_mut().zip(&y) {
            *a += b / cfg.repetitions as f64;
        }
    }
    let cir = estimate_cir(&rx, &chips, cfg)?;
    let est_tf = estimate_tf_with(&rx, &tx, cfg.sample_rate, grid, &cfg.welch)?;
    Ok(SoundingRecord {
        tx_chips: chips,
        tx,
        rx,
        cir,
        est_tf,
    })
}

pub fn trace_csv(tx: &[f64], rx: &[f64]) -> String {
    let mut out = String::from("index,tx,rx\n");
    for (i, (a, b)) in tx.iter().zip(rx).enumerate() {
        let _ = writeln!(out, "{i},{a},{b:e}");
    }
    out
}

/// Parses a `{index, tx, rx}` trace.
pub fn parse_trace_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut tx = Vec::new();
    let mut rx = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("index") {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Parse {
                context: format!("trace line {}", n + 1),
                msg: format!("expected 3 columns, got {}", cols.len()),
            });
        }
        let num = |s: &str| {
            s.trim().parse::<f64>().map_err(|e| Error::Parse {
                context: format!("trace line {}", n + 1),
                msg: e.to_string(),
            })
        };
        tx.push(num(cols[1])?);
        rx.push(num(cols[2])?);
    }
    Ok((tx, rx))
}

pub fn response_csv(h: &ComplexResponse) -> String {
    let mut out = String::from("f_Hz,ReH,ImH\n");
    for (f, v) in h.freqs().iter().zip(&h.values) {
        let _ = writeln!(out, "{f},{:e},{:e}", v.re, v.im);
    }
    out
}
