//! Sequential vs rayon execution of the data-parallel kernels.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rug::{Complex, Integer};

use polkit::ffield_verify::count_points_genus2_with;
use polkit::par::Exec;
use polkit::quad_order::{solve_norm_equation_with, QuadOrder};
use polkit::theta_igusa::{even_theta_nulls_with, SexticCurve, ThetaConfig};
use polkit::torus_analytic::{CMat, SiegelPoint};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn theta(c: &mut Criterion) {
    let prec = 128;
    let z = CMat::from_rows(
        prec,
        vec![
            vec![Complex::with_val(prec, (0.5, 0.694)), Complex::with_val(prec, (0.0, -0.1417))],
            vec![Complex::with_val(prec, (0.0, -0.1417)), Complex::with_val(prec, (0.0, 1.1046))],
        ],
    );
    let z = SiegelPoint::new(z, 1e-12).unwrap();
    let mut g = c.benchmark_group("theta_nulls_30_digits");
    for (name, exec) in MODES {
        let cfg = ThetaConfig { exec, ..ThetaConfig::with_digits(30) };
        g.bench_function(name, |b| b.iter(|| even_theta_nulls_with(black_box(&z), &cfg).unwrap()));
    }
    g.finish();
}

fn point_count(c: &mut Criterion) {
    let curve = SexticCurve::from_i64([81, 0, 0, 162, 0, 0, -3]).unwrap();
    let mut g = c.benchmark_group("count_points");
    for p in [23u64, 101] {
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, format!("p={p} k=2")), &p, |b, &p| {
                b.iter(|| count_points_genus2_with(&curve, p, 2, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn norm_search(c: &mut Criterion) {
    // large fundamental unit, so the search box is wide
    let o = QuadOrder::from_disc(94 * 4).unwrap();
    let d = Integer::from(30);
    let mut g = c.benchmark_group("norm_equation");
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| solve_norm_equation_with(&o, black_box(&d), exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, theta, point_count, norm_search);
criterion_main!(benches);
