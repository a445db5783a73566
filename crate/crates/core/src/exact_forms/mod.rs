//! Exact alternating forms on lattices: Pfaffians, polarization types and
//! symplectic (Frobenius) normal forms.

mod matrix;

pub use matrix::{IntMatrix, Mat, RatMatrix, Scalar};

use rug::{Integer, Rational};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct AlternatingForm {
    matrix: RatMatrix,
    labels: Vec<String>,
}

impl AlternatingForm {
    pub fn new(matrix: RatMatrix) -> Result<Self> {
        let labels = (1..=matrix.nrows()).map(|i| format!("g{i}")).collect();
        Self::with_labels(matrix, labels)
    }

    pub fn with_labels(matrix: RatMatrix, labels: Vec<String>) -> Result<Self> {
        if !matrix.is_skew() {
            return Err(Error::NotAlternating);
        }
        if matrix.nrows() % 2 == 1 {
            return Err(Error::OddDimension(matrix.nrows()));
        }
        if labels.len() != matrix.nrows() {
            return Err(Error::Dimension(format!("{} labels for rank {}", labels.len(), matrix.nrows())));
        }
        Ok(AlternatingForm { matrix, labels })
    }

    pub fn from_int(matrix: &IntMatrix) -> Result<Self> {
        Self::new(matrix.to_rational())
    }

    /// Standard form [[0, I], [-I, 0]] of rank 2g.
    pub fn standard(g: usize) -> Self {
        let ones = vec![Rational::from(1); g];
        Self::new(RatMatrix::standard_alternating(&ones)).expect("standard form is alternating")
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rank(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn genus(&self) -> usize {
        self.rank() / 2
    }

    pub fn is_integral(&self) -> bool {
        self.matrix.is_integral()
    }

    pub fn integer_matrix(&self) -> Result<IntMatrix> {
        self.matrix.to_integer().ok_or_else(|| {
            let bad = self.matrix.entries().find(|a| *a.denom() != 1).expect("some entry is fractional");
            Error::NotIntegral(bad.to_string())
        })
    }

    pub fn scaled(&self, k: &Rational) -> AlternatingForm {
        AlternatingForm { matrix: self.matrix.scale(k), labels: self.labels.clone() }
    }

    /// The form in the basis given by the rows of `s`: S·A·Sᵀ.
    pub fn congruent(&self, s: &RatMatrix) -> AlternatingForm {
        let m = s.mul(&self.matrix).mul(&s.transpose());
        AlternatingForm::new(m).expect("congruence preserves skewness")
    }

    pub fn det(&self) -> Rational {
        self.matrix.det()
    }

    pub fn is_degenerate(&self) -> bool {
        self.det() == 0
    }
}

/// Elementary divisors d1 | d2 | ... | dg.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarizationType {
    divisors: Vec<Integer>,
}

impl PolarizationType {
    pub fn new(divisors: Vec<Integer>) -> Self {
        debug_assert!(divisors.windows(2).all(|w| w[1].is_divisible(&w[0])));
        PolarizationType { divisors }
    }

    pub fn divisors(&self) -> &[Integer] {
        &self.divisors
    }

    pub fn is_principal(&self) -> bool {
        self.divisors.iter().all(|d| *d == 1)
    }

    /// Degree of the polarization, the product of the divisors.
    pub fn degree(&self) -> Integer {
        self.divisors.iter().product()
    }
}

impl std::fmt::Display for PolarizationType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.divisors.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Unimodular change of basis; rows are the new basis vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisChange {
    matrix: IntMatrix,
}

impl BasisChange {
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        if !matrix.is_unimodular() {
            return Err(Error::Dimension("basis change is not unimodular".into()));
        }
        Ok(BasisChange { matrix })
    }

    pub fn identity(n: usize) -> Self {
        BasisChange { matrix: IntMatrix::identity(n) }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn determinant(&self) -> Integer {
        self.matrix.det()
    }
}

fn check_alternating_int(a: &AlternatingForm) -> Result<IntMatrix> {
    a.integer_matrix()
}

fn pf_rec(m: &IntMatrix, idx: &[usize]) -> Integer {
    if idx.is_empty() {
        return Integer::from(1);
    }
    let first = idx[0];
    let mut acc = Integer::new();
    for (pos, &j) in idx.iter().enumerate().skip(1) {
        let a = &m[(first, j)];
        if *a == 0 {
            continue;
        }
        let rest: Vec<usize> = idx.iter().copied().filter(|&k| k != first && k != j).collect();
        let term = a * pf_rec(m, &rest);
        // position pos is column j+1 in 1-based numbering with sign (-1)^(pos+1)
        if pos % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Pfaffian by first-row expansion, Pf = Σ_j (-1)^j a_{1j} Pf(A_{1j}) with 1-based j.
pub fn pfaffian(a: &AlternatingForm) -> Result<Integer> {
    let m = check_alternating_int(a)?;
    let idx: Vec<usize> = (0..m.nrows()).collect();
    Ok(pf_rec(&m, &idx))
}

/// Elementary divisors of `scale·A` as an alternating form.
pub fn polarization_type(a: &AlternatingForm, scale: &Rational) -> Result<PolarizationType> {
    let scaled = a.scaled(scale);
    let m = scaled.integer_matrix()?;
    let (_, d) = normal_form(&m)?;
    Ok(PolarizationType::new(d))
}

/// Returns (A0, k) with A0 integral and primitive and A = k·A0.
pub fn primitive_part(a: &AlternatingForm) -> Result<(AlternatingForm, Rational)> {
    if a.is_degenerate() {
        return Err(Error::Degenerate);
    }
    let mut num = Integer::new();
    let mut den = Integer::from(1);
    for e in a.matrix().entries() {
        num.gcd_mut(e.numer());
        den.lcm_mut(e.denom());
    }
    let k = Rational::from((num, den));
    let inv = Rational::from(k.recip_ref());
    Ok((a.scaled(&inv), k))
}

/// Symplectic basis: rows of S with S·A·Sᵀ = [[0, D], [-D, 0]].
pub fn symplectic_basis(a: &AlternatingForm) -> Result<BasisChange> {
    let m = check_alternating_int(a)?;
    let (s, _) = normal_form(&m)?;
    Ok(BasisChange { matrix: s })
}

/// Symplectic basis together with the divisors it exhibits.
pub fn symplectic_normal_form(a: &AlternatingForm) -> Result<(BasisChange, PolarizationType)> {
    let m = check_alternating_int(a)?;
    let (s, d) = normal_form(&m)?;
    Ok((BasisChange { matrix: s }, PolarizationType::new(d)))
}

pub fn check_symplectic(s: &BasisChange, a: &AlternatingForm, d: &PolarizationType) -> bool {
    if s.matrix().nrows() != a.rank() || 2 * d.divisors().len() != a.rank() {
        return false;
    }
    let s = s.matrix().to_rational();
    let lhs = s.mul(a.matrix()).mul(&s.transpose());
    let ds: Vec<Rational> = d.divisors().iter().map(|x| Rational::from(x.clone())).collect();
    lhs == RatMatrix::standard_alternating(&ds)
}

struct Reducer {
    s: IntMatrix,
    b: IntMatrix,
}

impl Reducer {
    // v_dst += k·v_src, keeping the Gram matrix in sync
    fn add(&mut self, dst: usize, src: usize, k: &Integer) {
        if *k == 0 {
            return;
        }
        self.s.add_row_multiple(dst, src, k);
        self.b.add_row_multiple(dst, src, k);
        self.b.add_col_multiple(dst, src, k);
    }

    fn pivot(&self, live: &[usize]) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for (p, &i) in live.iter().enumerate() {
            for &j in &live[p + 1..] {
                let v = &self.b[(i, j)];
                if *v == 0 {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.b[(bi, bj)].cmp_abs(v).is_le() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }
}

fn normal_form(a: &IntMatrix) -> Result<(IntMatrix, Vec<Integer>)> {
    if !a.is_skew() {
        return Err(Error::NotAlternating);
    }
    let n = a.nrows();
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    let mut r = Reducer { s: IntMatrix::identity(n), b: a.clone() };
    let mut live: Vec<usize> = (0..n).collect();
    let (mut es, mut fs, mut ds) = (Vec::new(), Vec::new(), Vec::new());
    while !live.is_empty() {
        'restart: loop {
            let (mut e, mut f) = r.pivot(&live).ok_or(Error::Degenerate)?;
            if r.b[(e, f)] < 0 {
                std::mem::swap(&mut e, &mut f);
            }
            let d = r.b[(e, f)].clone();
            let others: Vec<usize> = live.iter().copied().filter(|&l| l != e && l != f).collect();
            let mut dirty = false;
            for &l in &others {
                let (qa, ra) = r.b[(e, l)].clone().div_rem_floor(d.clone());
                let (qb, rb) = r.b[(f, l)].clone().div_rem_floor(d.clone());
                r.add(l, f, &Integer::from(-&qa));
                r.add(l, e, &qb);
                dirty |= ra != 0 || rb != 0;
            }
            if dirty {
                continue 'restart;
            }
            for (p, &l) in others.iter().enumerate() {
                for &m in &others[p + 1..] {
                    if !r.b[(l, m)].is_divisible(&d) {
                        r.add(e, l, &Integer::from(1));
                        continue 'restart;
                    }
                }
            }
            es.push(e);
            fs.push(f);
            ds.push(d);
            live.retain(|&l| l != e && l != f);
            break;
        }
    }
    let order: Vec<usize> = es.into_iter().chain(fs).collect();
    let s = r.s.select(&order, &(0..n).collect::<Vec<_>>());
    Ok((s, ds))
}
