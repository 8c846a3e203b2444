use gc_twin::io::parse_response_csv;
use gc_twin::sounding::{self, Channel};
use gc_twin::*;

fn fixture_channel() -> Channel {
    let text = include_str!("data/fixture_dt_longitudinal.csv");
    Channel::Response(parse_response_csv(text, "fixture_dt_longitudinal.csv").unwrap())
}

/// Local maxima outside the main lobe, i.e. beyond the first minimum on
/// either side of the peak (circularly).
fn secondary_peak(pdp: &[f64]) -> f64 {
    let n = pdp.len();
    let p = (0..n).max_by(|&a, &b| pdp[a].total_cmp(&pdp[b])).unwrap();
    let at = |i: isize| pdp[i.rem_euclid(n as isize) as usize];
    let mut hi = p as isize;
    while at(hi + 1) < at(hi) {
        hi += 1;
    }
    let mut lo = p as isize;
    while at(lo - 1) < at(lo) {
        lo -= 1;
    }
    let mut best = 0.0f64;
    for i in hi + 1..lo + n as isize {
        if at(i) >= at(i - 1) && at(i) >= at(i + 1) {
            best = best.max(at(i));
        }
    }
    best
}

fn side_lobe_db(ch: &Channel) -> f64 {
    let cfg = SoundingConfig::default();
    let grid = FrequencyGrid::linear(5e3, 90e3, 86).unwrap();
    let rec = sounding::run_sounding(ch, &cfg, &grid, 11).unwrap();
    10.0 * secondary_peak(&rec.cir.pdp).log10()
}

#[test]
fn resistive_channel_has_a_single_peak() {
    // flat, purely delayed response: the detector itself must not see ringing
    let grid = FrequencyGrid::linear(1e3, 96e3, 96).unwrap();
    let h = ComplexResponse::from_fn(grid, |f| Complex64::from_polar(1e-3, -2.0 * std::f64::consts::PI * f * 3.0 / 192e3));
    let side = side_lobe_db(&Channel::Response(h));
    assert!(side < -20.0, "secondary peak at {side:.1} dB");
}

#[test]
fn longitudinal_twin_channel_has_a_single_dominant_path() {
    let side = side_lobe_db(&fixture_channel());
    assert!(side < -20.0, "secondary peak at {side:.1} dB");
}

#[test]
fn radial_twin_channel_has_a_single_dominant_path() {
    let s = Scenario::default_for(Placement::Radial);
    let grid = FrequencyGrid::linear(2e3, 96e3, 48).unwrap();
    let h = gc_twin::circuit::link_response(&s, &grid, &MeshSpec::default())
        .unwrap()
        .transfer()
        .unwrap();
    let side = side_lobe_db(&Channel::Response(h));
    assert!(side < -20.0, "secondary peak at {side:.1} dB");
}

#[test]
fn averaging_noise_falls_as_one_over_repetitions() {
    let base = SoundingConfig {
        pn_degree: 10,
        taps: vec![10, 7],
        snr_db: 0.0,
        ..Default::default()
    };
    let grid = FrequencyGrid::linear(5e3, 90e3, 18).unwrap();
    let ch = fixture_channel();
    let clean = SoundingConfig {
        snr_db: f64::INFINITY,
        repetitions: 1,
        ..base.clone()
    };
    let reference = sounding::run_sounding(&ch, &clean, &grid, 0).unwrap().est_tf.values;
    let reps = [2usize, 8, 32, 128];
    let mut pts = Vec::new();
    for &r in &reps {
        let cfg = SoundingConfig {
            repetitions: r,
            ..base.clone()
        };
        let mut acc = 0.0;
        let trials = 4;
        for t in 0..trials {
            let h = sounding::run_sounding(&ch, &cfg, &grid, 100 + t).unwrap().est_tf.values;
            acc += h.iter().zip(&reference).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() / h.len() as f64;
        }
        pts.push(((r as f64).ln(), (acc / trials as f64).ln()));
    }
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64,
        pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64,
    );
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 1.0).abs() <= 0.2, "log-log slope {slope:.3}");
}

#[test]
fn sounding_is_deterministic_per_seed() {
    let cfg = SoundingConfig {
        pn_degree: 9,
        taps: vec![9, 5],
        repetitions: 3,
        ..Default::default()
    };
    let grid = FrequencyGrid::linear(5e3, 90e3, 10).unwrap();
    let a = sounding::run_sounding(&fixture_channel(), &cfg, &grid, 5).unwrap();
    let b = sounding::run_sounding(&fixture_channel(), &cfg, &grid, 5).unwrap();
    let c = sounding::run_sounding(&fixture_channel(), &cfg, &grid, 6).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.rx, c.rx);
}
