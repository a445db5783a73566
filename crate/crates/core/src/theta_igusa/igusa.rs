use rug::{Integer, Rational};

use crate::error::{Error, Result};

/// Binary form Σ c_i x^(d−i) y^i.
#[derive(Clone, Debug, PartialEq)]
struct BinaryForm {
    coeffs: Vec<Rational>,
}

impl BinaryForm {
    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn zero() -> Self {
        BinaryForm { coeffs: vec![Rational::new()] }
    }

    fn dx(&self) -> Self {
        let d = self.degree();
        if d == 0 {
            return Self::zero();
        }
        BinaryForm { coeffs: (0..d).map(|i| Rational::from(&self.coeffs[i] * (d - i) as u32)).collect() }
    }

    fn dy(&self) -> Self {
        let d = self.degree();
        if d == 0 {
            return Self::zero();
        }
        BinaryForm { coeffs: (0..d).map(|i| Rational::from(&self.coeffs[i + 1] * (i + 1) as u32)).collect() }
    }

    fn deriv(&self, nx: usize, ny: usize) -> Self {
        let mut f = self.clone();
        for _ in 0..nx {
            f = f.dx();
        }
        for _ in 0..ny {
            f = f.dy();
        }
        f
    }

    fn mul(&self, other: &Self) -> Self {
        let mut coeffs = vec![Rational::new(); self.degree() + other.degree() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += Rational::from(a * b);
            }
        }
        BinaryForm { coeffs }
    }

    fn add_scaled(&mut self, other: &Self, k: &Rational) {
        if self.degree() < other.degree() {
            self.coeffs.resize(other.degree() + 1, Rational::new());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += Rational::from(b * k);
        }
    }

    fn constant(&self) -> Rational {
        debug_assert_eq!(self.degree(), 0);
        self.coeffs[0].clone()
    }
}

fn factorial(n: usize) -> Integer {
    Integer::from(Integer::factorial(n as u32))
}

fn binomial(n: usize, k: usize) -> Integer {
    Integer::from(Integer::binomial_u(n as u32, k as u32))
}

/// k-th transvectant (f, g)_k.
fn transvectant(f: &BinaryForm, g: &BinaryForm, k: usize) -> BinaryForm {
    let (m, n) = (f.degree(), g.degree());
    if k > m || k > n {
        return BinaryForm::zero();
    }
    let mut acc = BinaryForm { coeffs: vec![Rational::new(); m + n - 2 * k + 1] };
    for i in 0..=k {
        let term = f.deriv(k - i, i).mul(&g.deriv(i, k - i));
        let sign = if i % 2 == 0 { 1 } else { -1 };
        acc.add_scaled(&term, &Rational::from(binomial(k, i) * sign));
    }
    let norm = Rational::from((factorial(m - k) * factorial(n - k), factorial(m) * factorial(n)));
    for c in acc.coeffs.iter_mut() {
        *c *= &norm;
    }
    acc
}

/// Genus-2 curve y² = c0 + c1·x + … + c6·x⁶ of degree 5 or 6.
#[derive(Clone, Debug, PartialEq)]
pub struct SexticCurve {
    coeffs: [Rational; 7],
}

impl SexticCurve {
    pub fn new(coeffs: [Rational; 7]) -> Result<Self> {
        if coeffs[6] == 0 && coeffs[5] == 0 {
            return Err(Error::Dimension("curve must have degree 5 or 6".into()));
        }
        Ok(SexticCurve { coeffs })
    }

    pub fn from_i64(c: [i64; 7]) -> Result<Self> {
        Self::new(c.map(Rational::from))
    }

    /// Product of integer polynomials given with constant term first.
    pub fn from_factors(scale: i64, factors: &[&[i64]]) -> Result<Self> {
        let mut p: Vec<Integer> = vec![Integer::from(scale)];
        for f in factors {
            let mut q = vec![Integer::new(); p.len() + f.len() - 1];
            for (i, a) in p.iter().enumerate() {
                for (j, b) in f.iter().enumerate() {
                    q[i + j] += Integer::from(a * *b);
                }
            }
            p = q;
        }
        if p.len() > 7 {
            return Err(Error::Dimension("product has degree above 6".into()));
        }
        p.resize(7, Integer::new());
        Self::new(std::array::from_fn(|i| Rational::from(p[i].clone())))
    }

    pub fn coeffs(&self) -> &[Rational; 7] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        if self.coeffs[6] != 0 {
            6
        } else {
            5
        }
    }

    fn binary_form(&self) -> BinaryForm {
        BinaryForm { coeffs: (0..7).map(|i| self.coeffs[6 - i].clone()).collect() }
    }

    /// (γx + δ)⁶·f((αx + β)/(γx + δ)).
    pub fn mobius(&self, alpha: &Rational, beta: &Rational, gamma: &Rational, delta: &Rational) -> Result<Self> {
        let mut out = vec![Rational::new(); 7];
        for (k, ck) in self.coeffs.iter().enumerate() {
            if *ck == 0 {
                continue;
            }
            // ck·(αx+β)^k·(γx+δ)^(6−k)
            let mut p = vec![ck.clone()];
            for (lin, times) in [((beta, alpha), k), ((delta, gamma), 6 - k)] {
                for _ in 0..times {
                    let mut q = vec![Rational::new(); p.len() + 1];
                    for (i, a) in p.iter().enumerate() {
                        q[i] += Rational::from(a * lin.0);
                        q[i + 1] += Rational::from(a * lin.1);
                    }
                    p = q;
                }
            }
            for (o, v) in out.iter_mut().zip(p) {
                *o += v;
            }
        }
        Self::new(std::array::from_fn(|i| out[i].clone()))
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        SexticCurve { coeffs: std::array::from_fn(|i| Rational::from(&self.coeffs[i] * k)) }
    }
}

impl std::fmt::Display for SexticCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        for k in (0..7).rev() {
            let c = &self.coeffs[k];
            if *c == 0 {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{k}"),
            };
            let coef = if k > 0 && *c == 1 {
                String::new()
            } else if k > 0 && *c == -1 {
                "-".into()
            } else {
                c.to_string()
            };
            parts.push(format!("{coef}{mono}"));
        }
        write!(f, "y^2 = {}", parts.join(" + ").replace("+ -", "- "))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantSet {
    pub i2: Rational,
    pub i4: Rational,
    pub i6: Rational,
    pub i10: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbsoluteInvariants {
    pub i1: Rational,
    pub i2: Rational,
    pub i3: Rational,
}

impl std::fmt::Display for AbsoluteInvariants {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{}, {}, {}}}", self.i1, self.i2, self.i3)
    }
}

/// Igusa–Clebsch invariants from Clebsch's transvectant invariants A, B, C, D.
pub fn igusa_clebsch(c: &SexticCurve) -> Result<InvariantSet> {
    let f = c.binary_form();
    let i = transvectant(&f, &f, 4);
    let delta = transvectant(&i, &i, 2);
    let y1 = transvectant(&f, &i, 4);
    let y2 = transvectant(&i, &y1, 2);
    let y3 = transvectant(&i, &y2, 2);
    let a = transvectant(&f, &f, 6).constant();
    let b = transvectant(&i, &i, 4).constant();
    let cc = transvectant(&i, &delta, 4).constant();
    let d = transvectant(&y3, &y1, 2).constant();

    let r = |n: i64| Rational::from(n);
    let a2 = Rational::from(a.square_ref());
    let a3 = Rational::from(&a2 * &a);
    let a5 = Rational::from(&a3 * &a2);
    let i2 = r(-120) * &a;
    let i4 = r(-720) * &a2 + r(6750) * &b;
    let i6 = r(8640) * &a3 - r(108000) * Rational::from(&a * &b) + r(202500) * &cc;
    let i10 = r(-62208) * a5 + r(972000) * Rational::from(&a3 * &b) + r(1620000) * Rational::from(&a2 * &cc)
        - r(3037500) * (&a * Rational::from(b.square_ref()))
        - r(6075000) * Rational::from(&b * &cc)
        - r(4556250) * d;
    if i10 == 0 {
        return Err(Error::SingularCurve);
    }
    Ok(InvariantSet { i2, i4, i6, i10 })
}

/// i1 = I2⁵/I10, i2 = I2³I4/I10, i3 = I2²I6/I10. The unit constants reproduce
/// the published triples of every genus-2 curve in the shipped fixtures.
pub fn absolute_invariants(s: &InvariantSet) -> Result<AbsoluteInvariants> {
    if s.i10 == 0 {
        return Err(Error::ZeroI10);
    }
    let p2 = Rational::from(s.i2.square_ref());
    let p3 = Rational::from(&p2 * &s.i2);
    let p5 = Rational::from(&p3 * &p2);
    Ok(AbsoluteInvariants { i1: p5 / &s.i10, i2: p3 * &s.i4 / &s.i10, i3: p2 * &s.i6 / &s.i10 })
}

pub fn curve_invariants(c: &SexticCurve) -> Result<AbsoluteInvariants> {
    absolute_invariants(&igusa_clebsch(c)?)
}

/// Equal absolute invariant triples.
pub fn same_curve_over_closure(c1: &SexticCurve, c2: &SexticCurve) -> Result<bool> {
    Ok(curve_invariants(c1)? == curve_invariants(c2)?)
}
