//! Property bodies, strategies and oracles shared by the property suites and
//! the acceptance run.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};
use rug::{Complex, Float, Integer, Rational};

use polkit::exact_forms::*;
use polkit::polarization_kit::*;
use polkit::quad_order::*;
use polkit::theta_igusa::*;
use polkit::torus_analytic::{CMat, SiegelPoint};

pub type Outcome = Result<(), TestCaseError>;

pub fn config(cases: u32, seed: u64) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(seed), failure_persistence: None, ..Config::default() }
}

pub fn int(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_i64(rows)
}

#[allow(clippy::needless_range_loop)]
pub fn skew(n: usize, upper: &[i64]) -> IntMatrix {
    let mut rows = vec![vec![Integer::new(); n]; n];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            rows[i][j] = Integer::from(upper[k]);
            rows[j][i] = Integer::from(-upper[k]);
            k += 1;
        }
    }
    IntMatrix::from_rows(rows)
}

pub fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
    let mut s = IntMatrix::identity(n);
    for &(i, j, k) in ops {
        let (i, j) = (i % n, j % n);
        if i != j {
            s.add_row_multiple(i, j, &Integer::from(k));
        } else {
            s.swap_rows(i, (i + 1) % n);
        }
    }
    s
}

pub fn skew_entries(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-6i64..=6, n * (n - 1) / 2)
}

pub fn even_dim() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![2usize, 4, 6])
}

pub fn basis_ops(n: usize, len: std::ops::Range<usize>, k: i64) -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    prop::collection::vec((0..n, 0..n, -k..=k), len)
}

pub fn pfaffian_squared_is_det(n: usize, raw: &[i64]) -> Outcome {
    let a = skew(n, raw);
    let f = AlternatingForm::from_int(&a).unwrap();
    let pf = pfaffian(&f).unwrap();
    prop_assert_eq!(Rational::from(pf.square()), a.to_rational().det());
    Ok(())
}

pub fn type_invariant_under_congruence(n: usize, raw: &[i64], ops: &[(usize, usize, i64)]) -> Outcome {
    let f = AlternatingForm::from_int(&skew(n, raw)).unwrap();
    if f.is_degenerate() {
        return Ok(());
    }
    let s = unimodular(n, ops);
    prop_assert!(s.is_unimodular());
    let g = f.congruent(&s.to_rational());
    let one = Rational::from(1);
    prop_assert_eq!(polarization_type(&f, &one).unwrap(), polarization_type(&g, &one).unwrap());
    let (b, t) = symplectic_normal_form(&g).unwrap();
    prop_assert!(check_symplectic(&b, &g, &t));
    Ok(())
}

pub fn primitive_part_scales(raw: &[i64], k: i64) -> Outcome {
    let f = AlternatingForm::from_int(&skew(4, raw)).unwrap();
    if f.is_degenerate() {
        return Ok(());
    }
    let (p1, m1) = primitive_part(&f).unwrap();
    let (p2, m2) = primitive_part(&f.scaled(&Rational::from(k))).unwrap();
    prop_assert_eq!(p1, p2);
    prop_assert_eq!(m2, m1 * Rational::from(k));
    Ok(())
}

pub fn data65() -> PolarizedLatticeData {
    let e = AlternatingForm::from_int(&int(&[&[0, 2, -2, 0], &[-2, 0, -2, 2], &[2, 2, 0, 0], &[0, -2, 0, 0]])).unwrap();
    let mu = int(&[&[3, 2, -1, 1], &[0, 0, 1, 0], &[0, -1, 4, 0], &[2, 1, 1, 1]]);
    let rho = mu.sub(&IntMatrix::identity(4).scale(&Integer::from(2)));
    PolarizedLatticeData::new(e, QuadOrder::from_disc(12).unwrap(), rho).unwrap()
}

pub fn twist_composition(t: (i64, i64), s: (i64, i64)) -> Outcome {
    let p = data65();
    let o = p.order().clone();
    let (t, s) = (OrderElement::new(t.0, t.1), OrderElement::new(s.0, s.1));
    let one = Rational::from(1);
    let lhs = twist_form(&p, &o.mul(&t, &s), &one).unwrap();
    let rhs = twist_form(&p, &t, &one).unwrap().matrix().mul(&p.rho(&s).to_rational());
    prop_assert_eq!(lhs.matrix(), &rhs);
    let pf = pfaffian(&twist_form(&p, &t, &one).unwrap()).unwrap().abs();
    prop_assert_eq!(pf, pfaffian(p.form()).unwrap().abs() * o.norm(&t).abs());
    Ok(())
}

pub fn principality_survives_basis_change(ops: &[(usize, usize, i64)]) -> Outcome {
    let p = data65();
    let base = is_principally_polarizable(&p).unwrap();
    let q = p.change_basis(&unimodular(4, ops)).unwrap();
    let moved = is_principally_polarizable(&q).unwrap();
    prop_assert_eq!(base.principal, moved.principal);
    prop_assert_eq!(base.degree, moved.degree);
    Ok(())
}

pub fn real_discs() -> Vec<i64> {
    (5..=100).filter(|&d| QuadOrder::from_disc(d).is_ok()).collect()
}

/// Solver output against exhaustive search over a box, up to ε²-orbits.
pub fn norm_solver_matches_brute_force(disc: i64, d: i64) -> Outcome {
    if d == 0 {
        return Ok(());
    }
    let o = QuadOrder::from_disc(disc).unwrap();
    let sols = solve_norm_equation(&o, &Integer::from(d)).unwrap();
    let eps = fundamental_unit(&o).unwrap().fundamental_unit;
    let eta = o.mul(&eps, &eps);
    let eta_inv = o.conjugate(&eta);
    for t in &sols {
        prop_assert_eq!(o.norm(t), d);
        prop_assert!(o.is_totally_positive(t));
        prop_assert!(o.is_primitive(t));
    }
    // ε²-orbits of distinct representatives never meet
    for (i, x) in sols.iter().enumerate() {
        for y in &sols[i + 1..] {
            let mut z = y.clone();
            let mut w = y.clone();
            for _ in 0..3 {
                prop_assert!(&z != x && &w != x);
                z = o.mul(&z, &eta);
                w = o.mul(&w, &eta_inv);
            }
        }
    }
    for b in -25i64..=25 {
        for a in -120i64..=120 {
            let t = OrderElement::new(a, b);
            if o.norm(&t) != d || !o.is_totally_positive(&t) || !o.is_primitive(&t) {
                continue;
            }
            let mut hit = false;
            for r in &sols {
                let (mut up, mut down) = (r.clone(), r.clone());
                for _ in 0..4 {
                    hit |= up == t || down == t;
                    up = o.mul(&up, &eta);
                    down = o.mul(&down, &eta_inv);
                }
            }
            prop_assert!(hit, "{} of norm {} missing", o.display(&t), d);
        }
    }
    Ok(())
}

pub fn fundamental_unit_is_minimal(disc: i64) -> Outcome {
    let o = QuadOrder::from_disc(disc).unwrap();
    let u = fundamental_unit(&o).unwrap();
    let eps = u.fundamental_unit;
    prop_assert_eq!(o.norm(&eps).abs(), 1);
    prop_assert_eq!(o.norm(&eps), u.norm_of_fundamental_unit);
    if eps.b.clone().abs() > 200 {
        return Ok(());
    }
    let one = OrderElement::one();
    let bmax = eps.b.to_i64().unwrap().abs();
    let ae = o.approx(&eps);
    // any unit 1 < x < ε has 0 < b < b(ε) and a bounded by ε
    for b in 1..bmax.max(1) {
        for a in -(ae as i64 + 2 * b * 10)..=(ae as i64 + 2) {
            let x = OrderElement::new(a, b);
            if o.norm(&x).abs() == 1 && o.cmp(&x, &one).is_gt() {
                prop_assert!(o.cmp(&x, &eps).is_ge(), "{} below {}", o.display(&x), o.display(&eps));
            }
        }
    }
    Ok(())
}

/// Jacobi triple products: θ00, θ01, θ10 in q = e^{πiτ}.
pub fn genus_one(tau: &Complex, prec: u32) -> [Complex; 3] {
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let i_pi = Complex::with_val(prec, (0, &pi));
    let q = Complex::with_val(prec, &i_pi * tau).exp();
    let q4 = (Complex::with_val(prec, &i_pi * tau) / 4u32).exp();
    let one = Complex::with_val(prec, 1);
    let mut t00 = one.clone();
    let mut t01 = one.clone();
    let mut t10 = Complex::with_val(prec, &q4 * 2u32);
    let q2 = Complex::with_val(prec, q.square_ref());
    let mut odd = q.clone();
    let mut even = q2.clone();
    for _ in 0..400 {
        let e = Complex::with_val(prec, &one - &even);
        let po = Complex::with_val(prec, &one + &odd).square();
        let mo = Complex::with_val(prec, &one - &odd).square();
        let pe = Complex::with_val(prec, &one + &even).square();
        t00 *= Complex::with_val(prec, &e * &po);
        t01 *= Complex::with_val(prec, &e * &mo);
        t10 *= Complex::with_val(prec, &e * &pe);
        odd *= &q2;
        even *= &q2;
        if even.clone().abs().real().to_f64() < 1e-60 {
            break;
        }
    }
    [t00, t01, t10]
}

fn lookup(g: &[Complex; 3], a: u8, b: u8, prec: u32) -> Complex {
    match (a, b) {
        (0, 0) => g[0].clone(),
        (0, 1) => g[1].clone(),
        (1, 0) => g[2].clone(),
        _ => Complex::with_val(prec, 0),
    }
}

pub fn tau() -> impl Strategy<Value = (f64, f64)> {
    (-0.5f64..0.5, 0.7f64..2.0)
}

pub fn theta_factors_on_diagonal(t1: (f64, f64), t2: (f64, f64)) -> Outcome {
    let prec = 160;
    let t1 = Complex::with_val(prec, t1);
    let t2 = Complex::with_val(prec, t2);
    let z = SiegelPoint::new(CMat::diag(prec, &[t1.clone(), t2.clone()]), 1e-30).unwrap();
    let nulls = even_theta_nulls(&z, 30).unwrap();
    let (g1, g2) = (genus_one(&t1, prec), genus_one(&t2, prec));
    for (ch, v) in &nulls.values {
        let expect = Complex::with_val(prec, lookup(&g1, ch.a[0], ch.b[0], prec) * lookup(&g2, ch.a[1], ch.b[1], prec));
        let err = Complex::with_val(prec, v - &expect).abs().real().to_f64();
        prop_assert!(err < 1e-20, "{} off by {:e}", ch, err);
    }
    prop_assert_eq!(verdict_from_nulls(&nulls, 1e-10).unwrap(), Verdict::Split);
    Ok(())
}

pub fn sextic() -> impl Strategy<Value = [i64; 7]> {
    prop::array::uniform7(-9i64..=9)
}

pub fn igusa_invariant_under_substitution(c: [i64; 7], m: [i64; 4], k: i64) -> Outcome {
    let Ok(curve) = SexticCurve::from_i64(c) else { return Ok(()) };
    let Ok(base) = curve_invariants(&curve) else { return Ok(()) };
    if m[0] * m[3] - m[1] * m[2] == 0 {
        return Ok(());
    }
    let r = |x: i64| Rational::from(x);
    let moved = curve.mobius(&r(m[0]), &r(m[1]), &r(m[2]), &r(m[3])).unwrap().scaled(&r(k));
    prop_assert_eq!(curve_invariants(&moved).unwrap(), base);
    Ok(())
}

fn run<S: Strategy>(cfg: Config, strategy: S, test: impl Fn(S::Value) -> Outcome) -> Result<usize, String>
where
    S::Value: std::fmt::Debug,
{
    let cases = cfg.cases as usize;
    let mut runner = TestRunner::new(cfg);
    runner.run(&strategy, test).map(|_| cases).map_err(|e| e.to_string())
}

/// The suites without the proptest! harness, for a single summary line.
pub fn run_suites() -> Vec<(&'static str, Result<usize, String>)> {
    vec![
        (
            "pfaffian squared is det",
            run(config(96, 0x5eed_0001), (even_dim(), skew_entries(6)), |(n, raw)| pfaffian_squared_is_det(n, &raw)),
        ),
        (
            "type invariant under congruence",
            run(
                config(96, 0x5eed_0001),
                (prop::sample::select(vec![4usize, 6]), skew_entries(6), basis_ops(6, 1..12, 3)),
                |(n, raw, ops)| type_invariant_under_congruence(n, &raw, &ops),
            ),
        ),
        (
            "theta factorization on diagonal",
            run(config(24, 0x5eed_0004), (tau(), tau()), |(a, b)| theta_factors_on_diagonal(a, b)),
        ),
        (
            "igusa invariance under substitution",
            run(config(48, 0x5eed_0005), (sextic(), prop::array::uniform4(-3i64..=3), 1i64..5), |(c, m, k)| {
                igusa_invariant_under_substitution(c, m, k)
            }),
        ),
        (
            "norm solver vs brute force",
            run(config(120, 0x5eed_0003), (prop::sample::select(real_discs()), -20i64..=20), |(disc, d)| {
                norm_solver_matches_brute_force(disc, d)
            }),
        ),
    ]
}
