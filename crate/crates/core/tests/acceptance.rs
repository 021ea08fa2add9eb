//! Exit criteria. Each test writes one `PASS`/`FAIL` line to stderr
//! (bypassing the test harness capture) and then asserts.
mod common;

use std::io::Write;
use std::sync::OnceLock;

use c0ip::afem::{default_a_values, empirical_rate, run, sweep_a, uniform_mesh, Field, Mode, RunConfig, RunRecord, SweepRow};
use c0ip::analysis::principal_eigenvalue;
use c0ip::assembly::{assemble, local_stiffness, Discretization, RestrictedSystem};
use c0ip::basis::P2ElementData;
use c0ip::benchmarks::{noncharacteristic_residual, BenchmarkName, CUSP_ALPHA, LSHAPE_ALPHA};
use c0ip::estimator::dorfler_mark;
use c0ip::mesh::Mesh;
use c0ip::penalty::{kappa, sigma_triangle, PenaltyConfig};
use c0ip::sparse::dot;
use common::{brute_force_min_marking, brute_force_system, relative_max_difference, small_meshes};
use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {id:>2}: {verdict} {detail}");
}

fn restricted(mesh: &Mesh, a: f64) -> RestrictedSystem {
    let disc = Discretization::new(mesh).unwrap();
    let sigma = sigma_triangle(&PenaltyConfig { a, k: 2 }, &disc.geom, &disc.topo).unwrap().sigma;
    RestrictedSystem::new(&assemble(mesh, &disc, &sigma, &|_| 1.0).unwrap(), &disc.dofs)
}

fn slopes(records: &[RunRecord], field: Field) -> Vec<String> {
    records
        .windows(2)
        .map(|w| {
            let (a, b) = (field.get(&w[0]).unwrap(), field.get(&w[1]).unwrap());
            format!("{:.3}", (b / a).ln() / (w[1].ndof as f64 / w[0].ndof as f64).ln())
        })
        .collect()
}

#[test]
fn criterion_01_stability_bound() {
    let mut worst = f64::INFINITY;
    let mut detail = String::new();
    for name in BenchmarkName::ALL {
        let mesh = uniform_mesh(name, 2).unwrap();
        for a in [1.1, 1.5, 2.0, 10.0, 100.0] {
            let sys = restricted(&mesh, a);
            let lambda = principal_eigenvalue(&sys.system, &sys.norm).unwrap().lambda1;
            let margin = lambda - kappa(a);
            if margin < worst {
                worst = margin;
                detail = format!("{name:?} a = {a}: lambda1 {lambda:.6} vs {:.6}", kappa(a));
            }
        }
    }
    let pass = worst >= -1e-9;
    report(1, pass, &format!("smallest margin lambda1 - (1 - 1/sqrt(a)) = {worst:.3e} ({detail})"));
    assert!(pass);
}

#[test]
fn criterion_02_unit_prefactor_corridor() {
    let mesh = uniform_mesh(BenchmarkName::LShape, 5).unwrap();
    let sys = restricted(&mesh, 1.0);
    let ndof = sys.system.nrows;
    let lambda = principal_eigenvalue(&sys.system, &sys.norm).unwrap().lambda1;
    let pass = (3000..=15000).contains(&ndof) && (0.2..=0.5).contains(&lambda);
    let soft = (lambda - 0.2567).abs() <= 0.08;
    report(2, pass, &format!("ndof {ndof}, lambda1 {lambda:.5} in [0.2, 0.5]; within 0.08 of 0.2567: {soft}"));
    assert!(pass);
}

fn sweep() -> &'static Vec<SweepRow> {
    static ROWS: OnceLock<Vec<SweepRow>> = OnceLock::new();
    ROWS.get_or_init(|| sweep_a(&uniform_mesh(BenchmarkName::LShape, 5).unwrap(), &default_a_values()).unwrap())
}

#[test]
fn criterion_03_eigenvalue_monotone_in_prefactor() {
    let rows = sweep();
    let monotone = rows.windows(2).all(|w| w[1].lambda1 >= w[0].lambda1 - 1e-6);
    let last = rows.last().unwrap();
    let pass = monotone && last.a == 2f64.powi(17) && last.lambda1 >= 0.999;
    let values: Vec<String> = rows.iter().map(|r| format!("{:.5}", r.lambda1)).collect();
    report(3, pass, &format!("monotone {monotone}, lambda1(2^17) = {:.6}; lambda1 = [{}]", last.lambda1, values.join(", ")));
    assert!(pass);
}

#[test]
fn criterion_04_condition_growth() {
    let rows = sweep();
    let at = |a: f64| rows.iter().find(|r| r.a == a).unwrap().cond1;
    let ratio = at(128.0) / at(1.0);
    let pass = (30.0..=500.0).contains(&ratio);
    report(4, pass, &format!("cond1(128)/cond1(1) = {ratio:.1} (cond1(1) = {:.3e})", at(1.0)));
    assert!(pass);
}

fn uniform_lshape() -> &'static Vec<RunRecord> {
    static RECORDS: OnceLock<Vec<RunRecord>> = OnceLock::new();
    RECORDS.get_or_init(|| {
        run(&RunConfig {
            benchmark: BenchmarkName::LShape,
            mode: Mode::Uniform,
            max_levels: 8,
            max_ndof: usize::MAX,
            ..RunConfig::default()
        })
        .unwrap()
    })
}

#[test]
fn criterion_05_uniform_rate_on_lshape() {
    let records = uniform_lshape();
    let rate = empirical_rate(records, Field::Error).unwrap();
    let eta_rate = empirical_rate(records, Field::Eta).unwrap();
    let pass = records.len() >= 6 && (-0.332..=-0.212).contains(&rate);
    report(
        5,
        pass,
        &format!(
            "{} levels to ndof {}: error slope {rate:.4} in [-0.332, -0.212] (estimator slope {eta_rate:.4}); pairwise error slopes [{}]",
            records.len(),
            records.last().unwrap().ndof,
            slopes(records, Field::Error).join(", ")
        ),
    );
    assert!(pass);
}

/// Not an exit criterion: the estimator on the same uniform sequence should
/// decay like the error, with slope within 0.06 of −α/2.
#[test]
fn uniform_estimator_rate_on_lshape() {
    let rate = empirical_rate(uniform_lshape(), Field::Eta).unwrap();
    let target = -LSHAPE_ALPHA / 2.0;
    assert!((rate - target).abs() <= 0.06, "estimator slope {rate:.4}, expected {target:.4} ± 0.06");
}

#[test]
fn criterion_06_adaptive_rate_recovery() {
    let mut pass = true;
    let mut detail = Vec::new();
    for name in [BenchmarkName::LShape, BenchmarkName::Cusp] {
        let records = run(&RunConfig {
            benchmark: name,
            mode: Mode::Adaptive,
            theta: 0.5,
            a: 2.0,
            max_ndof: 30_000,
            ..RunConfig::default()
        })
        .unwrap();
        let rate = empirical_rate(&records, Field::Eta).unwrap();
        let error_rate = empirical_rate(&records, Field::Error).unwrap();
        pass &= (-0.60..=-0.45).contains(&rate);
        detail.push(format!(
            "{name:?} ndof {} eta slope {rate:.4} (error slope {error_rate:.4})",
            records.last().unwrap().ndof
        ));
    }
    report(6, pass, &format!("{} in [-0.60, -0.45]", detail.join("; ")));
    assert!(pass);
}

#[test]
fn criterion_07_uniform_load_domains() {
    let mut pass = true;
    let mut detail = Vec::new();
    for name in [BenchmarkName::Dumbbell, BenchmarkName::FourSlit] {
        let records = run(&RunConfig {
            benchmark: name,
            max_ndof: 20_000,
            ..RunConfig::default()
        })
        .unwrap();
        let ndof = records.last().unwrap().ndof;
        let rate = empirical_rate(&records, Field::Eta).unwrap();
        pass &= ndof >= 20_000 && rate <= -0.40;
        detail.push(format!("{name:?} ndof {ndof} eta slope {rate:.4}"));
    }
    report(7, pass, &format!("{} (need ndof >= 20000, slope <= -0.40)", detail.join("; ")));
    assert!(pass);
}

#[test]
fn criterion_08_smooth_order_verification() {
    let records = run(&RunConfig {
        benchmark: BenchmarkName::SquareSmooth,
        mode: Mode::Uniform,
        max_ndof: 60_000,
        ..RunConfig::default()
    })
    .unwrap();
    let rate = empirical_rate(&records, Field::Error).unwrap();
    let ratios: Vec<f64> = records[records.len() - 4..].iter().map(|r| r.eta / r.error.unwrap()).collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
    let variation = hi / lo - 1.0;
    let pass = (rate + 0.5).abs() <= 0.05 && variation < 0.25;
    report(
        8,
        pass,
        &format!("error slope {rate:.4}; eta/error over the last 4 levels {ratios:.3?} varies by {:.1}%", 100.0 * variation),
    );
    assert!(pass);
}

#[test]
fn criterion_09_oracle_equivalence() {
    let mut worst = 0.0f64;
    for (_, mesh) in small_meshes() {
        assert!(mesh.num_triangles() <= 4);
        for a in [1.0, 2.0, 10.0] {
            let disc = Discretization::new(&mesh).unwrap();
            let sigma = sigma_triangle(&PenaltyConfig { a, k: 2 }, &disc.geom, &disc.topo).unwrap().sigma;
            let sys = assemble(&mesh, &disc, &sigma, &|_| 1.0).unwrap();
            worst = worst.max(relative_max_difference(&sys.system.to_dense(), &brute_force_system(&mesh, a).b));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = 0;
    let trials = 2000;
    for _ in 0..trials {
        let n = rng.gen_range(1..=12);
        let eta: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.5) { rng.gen_range(0..4) as f64 } else { rng.gen::<f64>() })
            .collect();
        let theta = rng.gen_range(0.01..=1.0);
        if eta.iter().sum::<f64>() == 0.0 {
            continue;
        }
        if dorfler_mark(&eta, theta).unwrap().len() != brute_force_min_marking(&eta, theta) {
            mismatches += 1;
        }
    }
    let pass = worst <= 1e-9 && mismatches == 0;
    report(9, pass, &format!("max relative deviation of B {worst:.2e}; Dörfler mismatches {mismatches}/{trials}"));
    assert!(pass);
}

#[test]
fn criterion_10_invariant_suites() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut failures = Vec::new();

    // trace inequality with degree 0: equality for constants
    let mut trace_gap = 0.0f64;
    for _ in 0..100 {
        let v: [[f64; 2]; 3] = std::array::from_fn(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
        let area = 0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1])).abs();
        let h = (v[1][0] - v[0][0]).hypot(v[1][1] - v[0][1]);
        let c: f64 = rng.gen_range(-5.0..5.0);
        let lhs = c * c * h;
        let rhs = h / area * (c * c * area);
        trace_gap = trace_gap.max((lhs - rhs).abs() / lhs);
    }
    if trace_gap > 1e-12 {
        failures.push(format!("trace equality {trace_gap:e}"));
    }

    // local stiffness has rank 3
    for _ in 0..50 {
        let v: [[f64; 2]; 3] = std::array::from_fn(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
        let area = 0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1])).abs();
        if area < 0.05 {
            continue;
        }
        let a = local_stiffness(&P2ElementData::new(v).unwrap(), area);
        let ev = Mat::from_fn(6, 6, |i, j| a[i][j]).self_adjoint_eigenvalues(Side::Lower).unwrap();
        let rank = ev.iter().filter(|&&e| e > 1e-10 * ev[5]).count();
        if rank != 3 {
            failures.push(format!("local stiffness rank {rank}"));
        }
    }

    // symmetry and coercivity of the assembled system on every benchmark
    for name in BenchmarkName::ALL {
        let mesh = uniform_mesh(name, 1).unwrap();
        for a in [1.1, 2.0, 100.0] {
            let sys = restricted(&mesh, a);
            let sym = sys.system.symmetry_error() / sys.system.max_abs();
            if sym > 1e-12 {
                failures.push(format!("{name:?} symmetry {sym:e}"));
            }
            for _ in 0..200 {
                let v: Vec<f64> = (0..sys.system.nrows).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let b = dot(&v, &sys.system.matvec(&v));
                let n = dot(&v, &sys.norm.matvec(&v));
                if b < kappa(a) * n - 1e-10 * n {
                    failures.push(format!("{name:?} a = {a}: coercivity {b} < {}", kappa(a) * n));
                    break;
                }
            }
        }
    }

    // scale invariance of the penalty
    let mesh = uniform_mesh(BenchmarkName::Cusp, 1).unwrap();
    let sigma = |m: &Mesh| {
        let d = Discretization::new(m).unwrap();
        sigma_triangle(&PenaltyConfig::default(), &d.geom, &d.topo).unwrap().sigma
    };
    let base = sigma(&mesh);
    for s in [1e-3, 0.37, 25.0] {
        let scaled = sigma(&mesh.scaled(s));
        if base.iter().zip(&scaled).any(|(x, y)| (x - y).abs() > 1e-12 * x) {
            failures.push(format!("sigma changes under scaling by {s}"));
        }
    }

    // exponents of the singular solutions
    let residuals = [
        noncharacteristic_residual(LSHAPE_ALPHA, 1.5 * std::f64::consts::PI),
        noncharacteristic_residual(CUSP_ALPHA, 1.75 * std::f64::consts::PI),
    ];
    if residuals.iter().any(|r| r.abs() > 1e-6) {
        failures.push(format!("noncharacteristic residuals {residuals:?}"));
    }

    let pass = failures.is_empty();
    report(
        10,
        pass,
        &format!("trace, rank, symmetry, coercivity, scaling, exponents ({:.1e}, {:.1e}); failures: {failures:?}", residuals[0], residuals[1]),
    );
    assert!(pass);
}
