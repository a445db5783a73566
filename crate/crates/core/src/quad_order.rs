//! Quadratic orders: units, norms, total positivity and the group P(R).

use std::cmp::Ordering;
use std::fmt;

use rug::{Complete, Integer};

use crate::error::{Error, Result};
use crate::par::Exec;

/// Element a + b·ω of a quadratic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderElement {
    pub a: Integer,
    pub b: Integer,
}

impl OrderElement {
    pub fn new(a: impl Into<Integer>, b: impl Into<Integer>) -> Self {
        OrderElement { a: a.into(), b: b.into() }
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn is_rational(&self) -> bool {
        self.b == 0
    }
}

/// Order of conductor f in the quadratic field of fundamental discriminant D,
/// generated by ω with ω² = tr·ω − nm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadOrder {
    field_disc: Integer,
    conductor: Integer,
    tr: Integer,
    nm: Integer,
}

fn is_squarefree(n: &Integer) -> bool {
    let n = n.clone().abs();
    let mut p = Integer::from(2);
    while Integer::from(&p * &p) <= n {
        if n.is_divisible(&Integer::from(&p * &p)) {
            return false;
        }
        p += 1;
    }
    true
}

pub fn is_fundamental_discriminant(d: &Integer) -> bool {
    if *d == 0 || *d == 1 {
        return false;
    }
    let r = d.mod_u(4);
    if r == 1 {
        return is_squarefree(d);
    }
    if r == 0 {
        let m = Integer::from(d / 4);
        let mr = m.mod_u(4);
        return (mr == 2 || mr == 3) && is_squarefree(&m);
    }
    false
}

impl QuadOrder {
    pub fn new(field_disc: impl Into<Integer>, conductor: impl Into<Integer>) -> Result<Self> {
        let field_disc = field_disc.into();
        let conductor = conductor.into();
        if !is_fundamental_discriminant(&field_disc) {
            return Err(Error::InvalidOrder(format!("{field_disc} is not a fundamental discriminant")));
        }
        if conductor < 1 {
            return Err(Error::InvalidOrder(format!("conductor {conductor} is not positive")));
        }
        let disc = Integer::from(&conductor * &conductor) * &field_disc;
        let (tr, nm) = if disc.mod_u(4) == 0 {
            (Integer::new(), Integer::from(-&disc) / 4)
        } else {
            (Integer::from(1), (Integer::from(1) - &disc) / 4)
        };
        Ok(QuadOrder { field_disc, conductor, tr, nm })
    }

    pub fn maximal(field_disc: impl Into<Integer>) -> Result<Self> {
        Self::new(field_disc, 1)
    }

    /// Order of discriminant `disc`, splitting off the largest admissible conductor.
    pub fn from_disc(disc: impl Into<Integer>) -> Result<Self> {
        let disc: Integer = disc.into();
        let mut f = disc.clone().abs().sqrt();
        while f >= 1 {
            let f2 = Integer::from(&f * &f);
            if disc.is_divisible(&f2) {
                let d = Integer::from(&disc / &f2);
                if is_fundamental_discriminant(&d) {
                    return Self::new(d, f);
                }
            }
            f -= 1;
        }
        Err(Error::InvalidOrder(format!("{disc} is not a discriminant")))
    }

    pub fn field_disc(&self) -> &Integer {
        &self.field_disc
    }

    pub fn conductor(&self) -> &Integer {
        &self.conductor
    }

    pub fn tr(&self) -> &Integer {
        &self.tr
    }

    pub fn nm(&self) -> &Integer {
        &self.nm
    }

    /// Discriminant f²·D = tr² − 4·nm.
    pub fn disc(&self) -> Integer {
        Integer::from(&self.tr * &self.tr) - Integer::from(&self.nm * 4)
    }

    pub fn is_real(&self) -> bool {
        self.field_disc > 0
    }

    pub fn omega(&self) -> OrderElement {
        OrderElement::new(0, 1)
    }

    pub fn from_int(&self, n: impl Into<Integer>) -> OrderElement {
        OrderElement::new(n, 0)
    }

    pub fn add(&self, x: &OrderElement, y: &OrderElement) -> OrderElement {
        OrderElement::new((&x.a + &y.a).complete(), (&x.b + &y.b).complete())
    }

    pub fn sub(&self, x: &OrderElement, y: &OrderElement) -> OrderElement {
        OrderElement::new((&x.a - &y.a).complete(), (&x.b - &y.b).complete())
    }

    pub fn neg(&self, x: &OrderElement) -> OrderElement {
        OrderElement::new((-&x.a).complete(), (-&x.b).complete())
    }

    pub fn mul(&self, x: &OrderElement, y: &OrderElement) -> OrderElement {
        let bd = (&x.b * &y.b).complete();
        let a = (&x.a * &y.a).complete() - (&bd * &self.nm).complete();
        let b = (&x.a * &y.b).complete() + (&x.b * &y.a).complete() + bd * &self.tr;
        OrderElement::new(a, b)
    }

    pub fn pow(&self, x: &OrderElement, mut e: u32) -> OrderElement {
        let mut base = x.clone();
        let mut acc = OrderElement::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn norm(&self, x: &OrderElement) -> Integer {
        (&x.a * &x.a).complete() + (&x.a * &x.b).complete() * &self.tr + (&x.b * &x.b).complete() * &self.nm
    }

    pub fn trace(&self, x: &OrderElement) -> Integer {
        (&x.a * 2u32).complete() + (&x.b * &self.tr).complete()
    }

    pub fn conjugate(&self, x: &OrderElement) -> OrderElement {
        OrderElement::new(&x.a + (&x.b * &self.tr).complete(), (-&x.b).complete())
    }

    /// Sign of x under the fixed embedding ω ↦ (tr + √Δ)/2 (real orders only).
    pub fn sign(&self, x: &OrderElement) -> Ordering {
        // 2x = P + b√Δ
        sign_surd(&self.trace(x), &x.b, &self.disc())
    }

    /// Exact comparison of real embeddings.
    pub fn cmp(&self, x: &OrderElement, y: &OrderElement) -> Ordering {
        self.sign(&self.sub(x, y))
    }

    pub fn is_totally_positive(&self, x: &OrderElement) -> bool {
        if !self.is_real() {
            return x.b == 0 && x.a > 0;
        }
        self.trace(x) > 0 && self.norm(x) > 0
    }

    /// x/m lies in the order for no m > 1.
    pub fn is_primitive(&self, x: &OrderElement) -> bool {
        x.a.clone().gcd(&x.b) == 1
    }

    /// Approximate real embedding, for display and diagnostics.
    pub fn approx(&self, x: &OrderElement) -> f64 {
        let d = self.disc().to_f64();
        (self.trace(x).to_f64() + x.b.to_f64() * d.abs().sqrt()) / 2.0
    }

    /// Human-readable form such as `2+√3` or `(5+√17)/2`.
    pub fn display(&self, x: &OrderElement) -> String {
        let p = self.trace(x);
        let (s, m) = if self.field_disc.mod_u(4) == 1 {
            (self.conductor.clone(), self.field_disc.clone())
        } else {
            ((&self.conductor * 2u32).complete(), (&self.field_disc / 4u32).complete())
        };
        let c = (&x.b * &s).complete();
        let root = if m == -1 { "i".to_string() } else { format!("√{m}") };
        if p.is_even() && c.is_even() {
            surd_string(&(p / 2u32), &(c / 2u32), &root)
        } else {
            format!("({})/2", surd_string(&p, &c, &root))
        }
    }
}

fn surd_string(p: &Integer, c: &Integer, root: &str) -> String {
    let coeff = |c: &Integer| -> String {
        match c.to_i32() {
            Some(1) => root.to_string(),
            Some(-1) => format!("-{root}"),
            _ => format!("{c}{root}"),
        }
    };
    match (*p == 0, *c == 0) {
        (_, true) => p.to_string(),
        (true, false) => coeff(c),
        (false, false) if *c > 0 => format!("{p}+{}", coeff(c)),
        _ => format!("{p}{}", coeff(c)),
    }
}

/// Sign of p + b·√d for d > 0 non-square.
fn sign_surd(p: &Integer, b: &Integer, d: &Integer) -> Ordering {
    let sp = p.cmp0();
    let sb = b.cmp0();
    if sb == Ordering::Equal {
        return sp;
    }
    if sp == Ordering::Equal || sp == sb {
        return sb;
    }
    let lhs = (p * p).complete();
    let rhs = (b * b).complete() * d;
    match lhs.cmp(&rhs) {
        Ordering::Greater => sp,
        Ordering::Less => sb,
        Ordering::Equal => Ordering::Equal,
    }
}

impl fmt::Display for QuadOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "order of discriminant {} (field {}, conductor {})", self.disc(), self.field_disc, self.conductor)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitGroupData {
    pub fundamental_unit: OrderElement,
    pub norm_of_fundamental_unit: i32,
    pub torsion_order: u32,
}

/// Smallest unit > 1; for conductor f > 1 the least power of the field unit lying in the order.
pub fn fundamental_unit(o: &QuadOrder) -> Result<UnitGroupData> {
    if !o.is_real() {
        return Err(Error::ImaginaryOrder);
    }
    let eps = if *o.conductor() == 1 {
        continued_fraction_unit(o)
    } else {
        let k = QuadOrder::maximal(o.field_disc().clone())?;
        let ek = continued_fraction_unit(&k);
        lift_power_into(o, &k, &ek)
    };
    let n = o.norm(&eps).to_i32().expect("unit norm is ±1");
    Ok(UnitGroupData { fundamental_unit: eps, norm_of_fundamental_unit: n, torsion_order: 2 })
}

/// Number of roots of unity in the order.
pub fn torsion_order(o: &QuadOrder) -> u32 {
    if o.is_real() {
        return 2;
    }
    match o.disc().to_i32() {
        Some(-4) => 4,
        Some(-3) => 6,
        _ => 2,
    }
}

// ω_f = (r − f·tr_K)/2 + f·ω_K with r = Δ mod 4.
fn lift_power_into(o: &QuadOrder, k: &QuadOrder, ek: &OrderElement) -> OrderElement {
    let f = o.conductor();
    let r = Integer::from(o.disc().mod_u(4));
    let shift = (r - (f * k.tr()).complete()) / 2u32;
    let mut x = ek.clone();
    loop {
        if x.b.is_divisible(f) {
            let b = (&x.b / f).complete();
            let a = &x.a - (&b * &shift).complete();
            return OrderElement::new(a, b);
        }
        x = k.mul(&x, ek);
    }
}

/// Walks the continued fraction of ω until a convergent p/q gives a unit p − qω.
pub fn continued_fraction_unit(o: &QuadOrder) -> OrderElement {
    let d = o.disc();
    let s = d.clone().sqrt();
    let (mut p, mut q) = (o.tr().clone(), Integer::from(2));
    let (mut h0, mut h1) = (Integer::from(0), Integer::from(1));
    let (mut k0, mut k1) = (Integer::from(1), Integer::from(0));
    loop {
        let a = if q > 0 {
            (&p + &s).complete().div_rem_floor(q.clone()).0
        } else {
            -((&p + &s).complete().div_rem_floor((-&q).complete()).0 + 1u32)
        };
        let h2 = (&a * &h1).complete() + &h0;
        let k2 = (&a * &k1).complete() + &k0;
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let x = OrderElement::new(h1.clone(), (-&k1).complete());
        if o.norm(&x).cmp_abs(&Integer::from(1)).is_eq() {
            return normalize_unit(o, &x);
        }
        p = (&a * &q).complete() - &p;
        q = (&d - (&p * &p).complete()) / &q;
    }
}

// The one of ±x, ±x⁻¹ that exceeds 1.
fn normalize_unit(o: &QuadOrder, x: &OrderElement) -> OrderElement {
    let n = o.norm(x);
    let inv = if n == 1 { o.conjugate(x) } else { o.neg(&o.conjugate(x)) };
    let one = OrderElement::one();
    [x.clone(), o.neg(x), inv.clone(), o.neg(&inv)]
        .into_iter()
        .find(|c| o.cmp(c, &one) == Ordering::Greater)
        .expect("a unit other than ±1 has a conjugate above 1")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarizationClassGroup {
    pub representatives: Vec<OrderElement>,
}

impl PolarizationClassGroup {
    pub fn order(&self) -> usize {
        self.representatives.len()
    }
}

/// Totally positive units modulo squares of units.
pub fn polarization_classes(o: &QuadOrder) -> PolarizationClassGroup {
    let mut reps = vec![OrderElement::one()];
    if o.is_real() {
        let u = fundamental_unit(o).expect("real order");
        if u.norm_of_fundamental_unit == 1 {
            reps.push(u.fundamental_unit);
        }
    }
    PolarizationClassGroup { representatives: reps }
}

pub fn solve_norm_equation(o: &QuadOrder, d: &Integer) -> Result<Vec<OrderElement>> {
    solve_norm_equation_with(o, d, Exec::default())
}

/// Totally positive primitive t of norm d, one per class modulo squares of units.
///
/// With η = ε² the representatives satisfy η⁻¹ < t/t̄ ≤ η. Since t·t̄ = d,
/// (t − t̄)² = d·(t/t̄ + t̄/t − 2) ≤ d·(tr η − 2), i.e. b²Δ ≤ d·(tr η − 2).
pub fn solve_norm_equation_with(o: &QuadOrder, d: &Integer, exec: Exec) -> Result<Vec<OrderElement>> {
    if !o.is_real() {
        return Err(Error::ImaginaryOrder);
    }
    if *d <= 0 {
        return Ok(Vec::new());
    }
    let eps = fundamental_unit(o)?.fundamental_unit;
    let eta = o.mul(&eps, &eps);
    let disc = o.disc();
    let bound = (o.trace(&eta) - 2u32) * d / &disc;
    let bmax = bound.sqrt().to_i64().expect("search box fits in i64");
    let found = exec.map_range(-bmax, bmax + 1, |b| {
        let b = Integer::from(b);
        let p2 = (d * 4u32).complete() + (&b * &b).complete() * &disc;
        if !p2.is_perfect_square() {
            return None;
        }
        let p = p2.sqrt();
        let num = &p - (&b * o.tr()).complete();
        if !num.is_even() {
            return None;
        }
        let t = OrderElement::new(num / 2u32, b);
        let tb = o.conjugate(&t);
        let upper = o.sub(&t, &o.mul(&eta, &tb));
        let lower = o.sub(&o.mul(&eta, &t), &tb);
        let inside = o.sign(&upper) != Ordering::Greater && o.sign(&lower) == Ordering::Greater;
        (inside && o.is_primitive(&t)).then_some(t)
    });
    let mut out: Vec<OrderElement> = found.into_iter().flatten().collect();
    out.sort_by(|x, y| x.b.cmp_abs(&y.b).then_with(|| x.b.cmp(&y.b)).then_with(|| x.a.cmp(&y.a)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(d: i64) -> QuadOrder {
        QuadOrder::from_disc(d).unwrap()
    }

    #[test]
    fn order_parameters() {
        let o = q(12);
        assert_eq!((o.tr().to_i32(), o.nm().to_i32()), (Some(0), Some(-3)));
        let o = q(17);
        assert_eq!((o.tr().to_i32(), o.nm().to_i32()), (Some(1), Some(-4)));
        let o = q(-4);
        assert_eq!((o.tr().to_i32(), o.nm().to_i32()), (Some(0), Some(1)));
        let o = q(45);
        assert_eq!((o.field_disc().to_i32(), o.conductor().to_i32()), (Some(5), Some(3)));
        assert!(QuadOrder::new(48, 1).is_err());
        assert!(QuadOrder::from_disc(7).is_err());
    }

    #[test]
    fn units() {
        let u = fundamental_unit(&q(12)).unwrap();
        assert_eq!(q(12).display(&u.fundamental_unit), "2+√3");
        assert_eq!(u.norm_of_fundamental_unit, 1);
        let u = fundamental_unit(&q(17)).unwrap();
        assert_eq!(q(17).display(&u.fundamental_unit), "4+√17");
        assert_eq!(u.norm_of_fundamental_unit, -1);
        let u = fundamental_unit(&q(8)).unwrap();
        assert_eq!(q(8).display(&u.fundamental_unit), "1+√2");
        assert_eq!(u.norm_of_fundamental_unit, -1);
        let u = fundamental_unit(&q(5)).unwrap();
        assert_eq!(q(5).display(&u.fundamental_unit), "(1+√5)/2");
        assert_eq!(fundamental_unit(&q(-4)), Err(Error::ImaginaryOrder));
    }

    #[test]
    fn nonmaximal_unit_agrees_with_direct_expansion() {
        for d in [20, 45, 48, 68, 72, 116, 80, 160, 108, 125, 153, 200] {
            let o = q(d);
            assert!(*o.conductor() > 1, "{d}");
            let lifted = fundamental_unit(&o).unwrap().fundamental_unit;
            assert_eq!(lifted, continued_fraction_unit(&o), "disc {d}");
        }
    }

    #[test]
    fn norms_and_conjugates() {
        let o = q(12);
        assert_eq!(o.norm(&OrderElement::new(2, 1)), 1);
        let o = q(17);
        let u = OrderElement::new(2, 1);
        assert_eq!(o.display(&u), "(5+√17)/2");
        assert_eq!(o.norm(&u), 2);
        assert_eq!(o.trace(&o.omega()), *o.tr());
        assert_eq!(o.display(&o.conjugate(&u)), "(5-√17)/2");
        assert_eq!(o.mul(&u, &o.conjugate(&u)), o.from_int(2));
    }

    #[test]
    fn positivity() {
        let o = q(12);
        assert!(o.is_totally_positive(&OrderElement::new(2, 1)));
        assert!(!o.is_totally_positive(&OrderElement::new(-1, 0)));
        let o = q(17);
        assert!(!o.is_totally_positive(&OrderElement::new(3, 2)));
        let g = q(-4);
        assert!(g.is_totally_positive(&g.from_int(3)));
        assert!(!g.is_totally_positive(&OrderElement::new(1, 1)));
    }

    #[test]
    fn class_groups() {
        let p = polarization_classes(&q(12));
        assert_eq!(p.order(), 2);
        assert_eq!(p.representatives[1], OrderElement::new(2, 1));
        assert_eq!(polarization_classes(&q(17)).order(), 1);
        assert_eq!(polarization_classes(&q(-4)).order(), 1);
    }

    #[test]
    fn norm_equation_examples() {
        let o = q(17);
        let sols = solve_norm_equation(&o, &Integer::from(2)).unwrap();
        assert!(sols.contains(&OrderElement::new(2, 1)), "{sols:?}");
        assert!(solve_norm_equation(&q(12), &Integer::from(5)).unwrap().is_empty());
        let units = solve_norm_equation(&q(12), &Integer::from(1)).unwrap();
        assert_eq!(units, vec![OrderElement::one(), OrderElement::new(2, 1)]);
        assert!(solve_norm_equation(&q(12), &Integer::from(-2)).unwrap().is_empty());
        assert_eq!(solve_norm_equation(&q(-4), &Integer::from(1)), Err(Error::ImaginaryOrder));
    }

    #[test]
    fn sequential_and_parallel_search_agree() {
        let o = q(60);
        for d in 1..30 {
            let d = Integer::from(d);
            assert_eq!(
                solve_norm_equation_with(&o, &d, Exec::Sequential).unwrap(),
                solve_norm_equation_with(&o, &d, Exec::Parallel).unwrap()
            );
        }
    }
}
