use criterion::{black_box, criterion_group, criterion_main, Criterion};
use gc_twin::field::{self, SpectralSolver};
use gc_twin::sounding::{self, Channel};
use gc_twin::{ColeColeParams, Complex64, FrequencyGrid, SoundingConfig, TissueId, TissueTable};
use gc_twin_bench::{mesh, scenario};

fn tissue(c: &mut Criterion) {
    let table = TissueTable::builtin();
    let p: &ColeColeParams = table.get(&TissueId::Muscle).unwrap();
    c.bench_function("cole_cole_conductivity", |b| {
        b.iter(|| gc_twin::complex_conductivity(black_box(p), black_box(1e5)).unwrap())
    });
}

fn solver(c: &mut Criterion) {
    let s = scenario();
    let sys = field::assemble(&s, 1e5, &mesh()).unwrap();
    let n = sys.matrix.dim();
    let x: Vec<Complex64> = (0..n).map(|i| Complex64::new((i % 7) as f64, 1.0)).collect();
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    c.bench_function("stencil_apply", |b| b.iter(|| sys.matrix.apply(black_box(&x), &mut y)));

    let sp = SpectralSolver::new(&sys.matrix);
    c.bench_function("spectral_solve", |b| b.iter(|| sp.solve(black_box(&sys.source), &mut y)));

    let mut g = c.benchmark_group("field");
    g.sample_size(10);
    g.bench_function("solve_ports", |b| b.iter(|| field::solve_ports(&s, black_box(1e5), &mesh()).unwrap()));
    g.finish();
}

fn sounding_paths(c: &mut Criterion) {
    let cfg = SoundingConfig::default();
    let grid = FrequencyGrid::linear(5e3, 90e3, 86).unwrap();
    let chips = sounding::generate_pn(cfg.pn_degree, &cfg.taps).unwrap();
    let h = gc_twin::ComplexResponse::from_fn(FrequencyGrid::linear(1e3, 96e3, 96).unwrap(), |f| {
        Complex64::from_polar(1e-3, -2.0 * std::f64::consts::PI * f * 5e-6)
    });
    let y = sounding::synthesize_rx(&Channel::Response(h), &chips, &cfg, 1).unwrap();
    c.bench_function("estimate_tf", |b| {
        b.iter(|| sounding::estimate_tf(black_box(&y), &chips, cfg.sample_rate, &grid).unwrap())
    });
    c.bench_function("estimate_cir", |b| b.iter(|| sounding::estimate_cir(black_box(&y), &chips, &cfg).unwrap()));
}

criterion_group!(benches, tissue, solver, sounding_paths);
criterion_main!(benches);
