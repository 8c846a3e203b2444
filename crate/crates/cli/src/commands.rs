use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use gc_twin::calibration::{self, CalibrationBand, PipelineParams};
use gc_twin::circuit::{self, link_label, LinkResponse};
use gc_twin::metrics::{self, NarrowbandRow, DEFAULT_BAND_SAMPLES};
use gc_twin::sounding::{self, Channel};
use gc_twin::{
    field, io, ComplexResponse, Complex64, FixtureModel, FrequencyGrid, GridSpec, InterfaceConfig, InterfaceStack,
    Material, MeshSpec, Placement, Scenario, SoundingConfig, TissueTable,
};
use rayon::prelude::*;

use crate::manifest::RunManifest;
use crate::{CalibInputs, Common};

/// Files to write plus per-row failures. A failed row never aborts the run;
/// it is reported and turns the exit status nonzero.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<(String, String)>,
    pub failures: Vec<String>,
    pub summary: String,
    /// The single output may go to stdout when no `--out` is given.
    pub stdout_ok: bool,
}

const SWEEP_GRID: &str = "log:10e3:1e6:40";
const SOUND_CHANNEL_GRID: &str = "lin:1e3:96e3:96";
const SOUND_GRID: &str = "lin:5e3:90e3:86";
const FIXTURE_GRID: &str = "lin:5e3:90e3:86";
const NARROWBAND_FREQS: [f64; 2] = [10e3, 1e6];

fn grid(c: &Common, default: &str) -> Result<(String, FrequencyGrid)> {
    let text = c.grid.as_deref().unwrap_or(default);
    let spec: GridSpec = text.parse()?;
    Ok((spec.to_string(), spec.build()?))
}

fn mesh(c: &Common) -> Result<MeshSpec> {
    let Some(text) = &c.mesh else {
        return Ok(MeshSpec::default());
    };
    let parts: Vec<usize> = text
        .split(':')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| anyhow!("mesh `{text}`: {e}"))?;
    match parts[..] {
        [nr, nt, nz] => Ok(MeshSpec::new(nr, nt, nz)),
        _ => bail!("mesh `{text}`: expected NR:NTHETA:NZ"),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Per-frequency link computation; failed frequencies are returned
/// separately and do not stop the others. Rows stay in grid order.
fn link_rows(s: &Scenario, grid: &FrequencyGrid, spec: &MeshSpec) -> (LinkResponse, Vec<String>) {
    let rows: Vec<gc_twin::Result<LinkResponse>> = grid
        .freqs()
        .par_iter()
        .map(|&f| {
            let q = field::solve_ports(s, f, spec).map_err(|e| gc_twin::Error::AtFrequency {
                freq: f,
                source: Box::new(e),
            })?;
            circuit::compose_link(s, &[q], Complex64::new(0.0, 0.0))
        })
        .collect();
    let mut link = LinkResponse {
        label: link_label(s),
        points: Vec::new(),
    };
    let mut failures = Vec::new();
    for r in rows {
        match r {
            Ok(l) => link.points.extend(l.points),
            Err(e) => failures.push(e.to_string()),
        }
    }
    (link, failures)
}

fn metrics_csv(h: &ComplexResponse) -> Result<String> {
    let m = metrics::channel_metrics(h)?;
    let mut out = String::from("f_Hz,alpha_dB,phase_rad,tau_p_s,tau_g_s\n");
    for i in 0..h.len() {
        let _ = writeln!(
            out,
            "{},{:e},{:e},{:e},{:e}",
            h.freqs()[i],
            m.alpha_db[i],
            m.phase_unwrapped[i],
            m.tau_p[i],
            m.tau_g[i]
        );
    }
    Ok(out)
}

pub fn sweep(c: &Common) -> Result<Outcome> {
    let (s, source) = load(c)?;
    let (gtext, g) = grid(c, SWEEP_GRID)?;
    let spec = mesh(c)?;
    let mut man = RunManifest::new("sweep").with_scenarios(source, &[&s]);
    man.grid = Some(gtext);
    man.mesh = Some(spec);
    man.push("label", link_label(&s));

    let (link, failures) = link_rows(&s, &g, &spec);
    let partial = [("partial", (!failures.is_empty()).to_string()), ("failed_rows", failures.len().to_string())];
    let mut files = vec![(
        "sweep_link.csv".to_string(),
        man.render(&partial, &format!("{}\n{}", LinkResponse::csv_header(), link.csv_rows())),
    )];
    let mut failures = failures;
    if link.points.len() >= 2 {
        files.push(("sweep_metrics.csv".into(), man.render(&partial, &metrics_csv(&link.transfer()?)?)));
    } else {
        failures.push("metrics need at least two solved frequencies".into());
    }
    Ok(Outcome {
        summary: format!("{}: {} of {} frequencies solved\n", link.label, link.points.len(), g.len()),
        files,
        failures,
        stdout_ok: false,
    })
}

pub fn narrowband(c: &Common, interface: InterfaceConfig) -> Result<Outcome> {
    let (gtext, g) = grid(c, SWEEP_GRID)?;
    let spec = mesh(c)?;
    let (configs, source) = if c.scenario.is_some() {
        let (s, src) = load(c)?;
        (vec![s], src)
    } else {
        let placements = match c.placement {
            Some(p) => vec![p.into()],
            None => vec![Placement::Longitudinal, Placement::Radial],
        };
        let mut v = Vec::new();
        for p in placements {
            for m in Material::ALL {
                v.push(Scenario::default_for(p).with_interface(InterfaceStack::with_defaults(m, interface))?);
            }
        }
        let src = format!("builtin:{} configurations, {interface:?}", v.len());
        (v, src)
    };
    let refs: Vec<&Scenario> = configs.iter().collect();
    let mut man = RunManifest::new("narrowband").with_scenarios(source, &refs);
    man.grid = Some(gtext);
    man.mesh = Some(spec);
    man.push("normalisation", "Tx-Rx separation in cm");

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for s in &configs {
        let label = link_label(s);
        let row = (|| -> gc_twin::Result<NarrowbandRow> {
            let h = circuit::link_response(s, &g, &spec)?.transfer()?;
            let m = metrics::channel_metrics(&h)?;
            let k = metrics::normalized_coefficients(&m, s.separation_cm(), &NARROWBAND_FREQS)?;
            Ok(NarrowbandRow::from_coefficients(format!("{label} (d={:.1} cm)", s.separation_cm()), &k[0], &k[1]))
        })();
        match row {
            Ok(r) => rows.push(r),
            Err(e) => failures.push(format!("{label}: {e}")),
        }
    }
    Ok(Outcome {
        summary: format!("{} of {} configurations\n", rows.len(), configs.len()),
        files: vec![("narrowband.csv".into(), man.render(&[], &metrics::narrowband_csv(&rows)))],
        failures,
        stdout_ok: false,
    })
}

pub fn wideband(c: &Common, fc: f64, bands: &[f64], interfaces: &[InterfaceConfig]) -> Result<Outcome> {
    let (base, source) = load(c)?;
    let (gtext, g) = grid(c, SWEEP_GRID)?;
    let spec = mesh(c)?;
    let configs: Vec<Scenario> = if interfaces.is_empty() {
        vec![base]
    } else {
        interfaces
            .iter()
            .map(|&i| base.with_interface(InterfaceStack::with_defaults(base.interface.material, i)))
            .collect::<gc_twin::Result<_>>()?
    };
    let refs: Vec<&Scenario> = configs.iter().collect();
    let mut man = RunManifest::new("wideband").with_scenarios(source, &refs);
    man.grid = Some(gtext);
    man.mesh = Some(spec);
    man.push("fc_Hz", fc);
    man.push("bands_Hz", bands.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(","));
    man.push("band_samples", DEFAULT_BAND_SAMPLES);

    let mut body = String::from("config,fc_Hz,B_Hz,sigma_alpha_dB,sigma_tauP_s,sigma_tauG_s\n");
    let mut failures = Vec::new();
    let mut n = 0;
    for s in &configs {
        let label = link_label(s);
        let h = match circuit::link_response(s, &g, &spec).and_then(|l| l.transfer()) {
            Ok(h) => h,
            Err(e) => {
                failures.extend(bands.iter().map(|b| format!("{label} B={b}: {e}")));
                continue;
            }
        };
        for &b in bands {
            match metrics::wideband_dispersion(&h, fc, b, DEFAULT_BAND_SAMPLES) {
                Ok(d) => {
                    n += 1;
                    let _ = writeln!(
                        body,
                        "{label},{fc},{b},{:e},{:e},{:e}",
                        d.sigma_alpha, d.sigma_tau_p, d.sigma_tau_g
                    );
                }
                Err(e) => failures.push(format!("{label} B={b}: {e}")),
            }
        }
    }
    Ok(Outcome {
        summary: format!("{n} of {} rows\n", configs.len() * bands.len()),
        files: vec![("wideband.csv".into(), man.render(&[], &body))],
        failures,
        stdout_ok: false,
    })
}

pub fn sound(c: &Common, channel: Option<&Path>, snr_db: Option<f64>, repetitions: Option<usize>) -> Result<Outcome> {
    let (gtext, g) = grid(c, SOUND_GRID)?;
    let seed = c.seed.unwrap_or(1);
    let mut cfg = SoundingConfig::default();
    if let Some(v) = snr_db {
        cfg.snr_db = v;
    }
    if let Some(r) = repetitions {
        cfg.repetitions = r;
    }
    cfg.validate()?;
    let mut man = RunManifest::new("sound");
    let h = match channel {
        Some(path) => {
            if c.scenario.is_some() || c.placement.is_some() {
                bail!("--channel replaces the scenario; drop --scenario/--placement");
            }
            man.scenario = Some(format!("channel:{}", path.display()));
            io::parse_response_csv(&read(path)?, &path.display().to_string())?
        }
        None => {
            let (s, source) = load(c)?;
            let spec = mesh(c)?;
            man = man.with_scenarios(source, &[&s]);
            man.mesh = Some(spec);
            man.push("channel_grid", SOUND_CHANNEL_GRID);
            let cg = SOUND_CHANNEL_GRID.parse::<GridSpec>()?.build()?;
            circuit::link_response(&s, &cg, &spec)?.transfer()?
        }
    };
    man.seed = Some(seed);
    man.grid = Some(gtext);
    man.push("pn_degree", cfg.pn_degree);
    man.push("pn_taps", cfg.taps.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","));
    man.push("sample_rate_Hz", cfg.sample_rate);
    man.push("snr_dB", cfg.snr_db);
    man.push("repetitions", cfg.repetitions);

    let rec = sounding::run_sounding(&Channel::Response(h.clone()), &cfg, &g, seed)?;
    let mut cir = String::from("lag,t_s,h,pdp\n");
    for (i, (t, p)) in rec.cir.taps.iter().zip(&rec.cir.pdp).enumerate() {
        let _ = writeln!(cir, "{i},{:e},{t:e},{p:e}", i as f64 / cfg.sample_rate);
    }
    Ok(Outcome {
        files: vec![
            ("sound_trace.csv".into(), man.render(&[], &sounding::trace_csv(&rec.tx, &rec.rx))),
            ("sound_cir.csv".into(), man.render(&[], &cir)),
            ("sound_tf.csv".into(), man.render(&[("kind", "estimate".into())], &sounding::response_csv(&rec.est_tf))),
            ("sound_channel.csv".into(), man.render(&[("kind", "channel".into())], &sounding::response_csv(&h))),
        ],
        summary: format!("{} samples per period, {} repetitions\n", rec.tx.len(), cfg.repetitions),
        ..Default::default()
    })
}

fn load_measured(path: &Path) -> Result<Vec<ComplexResponse>> {
    let text = read(path)?;
    let ctx = path.display().to_string();
    let (header, _) = io::data_rows(&text, &ctx)?;
    if header.iter().any(|h| h == "replicate") {
        Ok(io::parse_replicates_csv(&text, &ctx)?)
    } else {
        Ok(vec![io::parse_response_csv(&text, &ctx)?])
    }
}

fn calib_band(text: Option<&str>) -> Result<Option<CalibrationBand>> {
    let Some(t) = text else { return Ok(None) };
    let (lo, hi) = t
        .split_once(':')
        .ok_or_else(|| anyhow!("calibration band `{t}`: expected LOW:HIGH"))?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| anyhow!("calibration band `{t}`: {e}"));
    Ok(Some(CalibrationBand::new(p(lo)?, p(hi)?)?))
}

fn run_comparison(c: &Common, inputs: &CalibInputs, command: &'static str) -> Result<(calibration::Comparison, RunManifest)> {
    let twin = io::parse_response_csv(&read(&inputs.twin)?, &inputs.twin.display().to_string())?;
    let measured = load_measured(&inputs.measured)?;
    let params = PipelineParams {
        band: calib_band(inputs.calib_band.as_deref())?,
        ..Default::default()
    };
    let cmp = calibration::compare(&twin, &measured, &params)?;
    let mut man = RunManifest::new(command);
    if let Some(seed) = c.seed {
        man.seed = Some(seed);
    }
    man.push("twin", inputs.twin.display());
    man.push("measured", inputs.measured.display());
    man.push("replicates", measured.len());
    man.push("calib_band_Hz", format!("{}:{}", cmp.band.f_low, cmp.band.f_high));
    man.push("sg", format!("{}:{}", params.sg_window, params.sg_order));
    Ok((cmp, man))
}

pub fn calibrate(c: &Common, inputs: &CalibInputs) -> Result<Outcome> {
    let (cmp, mut man) = run_comparison(c, inputs, "calibrate")?;
    // factor multiplies the measurement; its inverse is the gain error
    man.push("gain_factor", format!("{:e}", cmp.gain_factor));
    man.push("gain_error", format!("{:e}", 1.0 / cmp.gain_factor));
    man.push("phase_offset_rad", format!("{:e}", cmp.phase_offset));
    let mut body = String::from("f_Hz,alpha_mean_dB,alpha_std_dB,phase_rad,tau_p_s,tau_g_s\n");
    let freqs = io::parse_response_csv(&read(&inputs.twin)?, "twin")?.grid;
    for (i, f) in freqs.freqs().iter().enumerate() {
        let _ = writeln!(
            body,
            "{f},{:e},{:e},{:e},{:e},{:e}",
            cmp.attenuation.mean[i], cmp.attenuation.std[i], cmp.phase[i], cmp.tau_p[i], cmp.tau_g[i]
        );
    }
    Ok(Outcome {
        summary: format!(
            "gain error {:.6} (correction factor {:.6}), phase offset {:.6} rad\n",
            1.0 / cmp.gain_factor,
            cmp.gain_factor,
            cmp.phase_offset
        ),
        files: vec![("calibrate.csv".into(), man.render(&[], &body))],
        ..Default::default()
    })
}

pub fn compare(c: &Common, inputs: &CalibInputs, label: &str) -> Result<Outcome> {
    let (cmp, man) = run_comparison(c, inputs, "compare")?;
    let report = calibration::report_csv(&cmp.rows(label));
    Ok(Outcome {
        summary: report.clone(),
        files: vec![("compare.csv".into(), man.render(&[], &report))],
        ..Default::default()
    })
}

pub fn tissues(_c: &Common) -> Result<Outcome> {
    let man = RunManifest::new("tissues");
    Ok(Outcome {
        files: vec![("tissues.toml".into(), man.render(&[], &TissueTable::builtin().to_toml()))],
        stdout_ok: true,
        ..Default::default()
    })
}

pub fn scenario(c: &Common) -> Result<Outcome> {
    let (s, source) = load(c)?;
    let man = RunManifest::new("scenario").with_scenarios(source, &[&s]);
    Ok(Outcome {
        files: vec![("scenario.toml".into(), man.render(&[], &s.to_toml()))],
        stdout_ok: true,
        ..Default::default()
    })
}

fn load(c: &Common) -> Result<(Scenario, String)> {
    match (&c.scenario, c.placement) {
        (Some(_), Some(_)) => bail!("--placement applies to the built-in scenario only; set it in the scenario file"),
        (Some(path), None) => {
            let s = gc_twin::parse_scenario(&read(path)?).with_context(|| format!("in {}", path.display()))?;
            Ok((s, path.display().to_string()))
        }
        (None, p) => {
            let p: Placement = p.map(Into::into).unwrap_or(Placement::Longitudinal);
            Ok((Scenario::default_for(p), format!("builtin:{p}")))
        }
    }
}

pub fn fixture(c: &Common) -> Result<Outcome> {
    let (s, source) = load(c)?;
    let (gtext, g) = grid(c, FIXTURE_GRID)?;
    let spec = mesh(c)?;
    let seed = c.seed.unwrap_or(2);
    let model = FixtureModel::default();
    let mut man = RunManifest::new("fixture").with_scenarios(source, &[&s]);
    man.seed = Some(seed);
    man.grid = Some(gtext);
    man.mesh = Some(spec);

    let dt = circuit::link_response(&s, &g, &spec)?.transfer()?;
    let reps = calibration::synthetic_measurements(&dt, &model, seed)?;
    let cmp = calibration::compare(&dt, &reps, &PipelineParams::default())?;
    let name = format!("{:?}", s.placement).to_lowercase();
    Ok(Outcome {
        files: vec![
            (
                format!("fixture_dt_{name}.csv"),
                man.render(&[("kind", "twin".into())], &sounding::response_csv(&dt)),
            ),
            (
                format!("fixture_measured_{name}.csv"),
                man.render(
                    &[("kind", "measured".into()), ("replicates", model.replicates.to_string())],
                    &io::replicates_csv(&reps),
                ),
            ),
        ],
        summary: calibration::report_csv(&cmp.rows(&format!("{:?}", s.placement))),
        ..Default::default()
    })
}
