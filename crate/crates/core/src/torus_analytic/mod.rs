//! Complex tori: period matrices, Siegel points, torsion quotients,
//! Weil-restriction lattices and elliptic invariants.

mod cmat;
mod lattice;

pub use cmat::{abs, c, fmt_complex, parse_complex, pi, ten_pow_neg, CMat};
pub use lattice::{
    enlarged_lattice, hermite_rows, quotient_by_torsion, restrict_form, same_lattice, TorsionQuotient, TorsionSubgroup,
};

use rug::{Assign, Complex, Float, Integer};

use crate::error::{Error, Result};
use crate::exact_forms::{AlternatingForm, BasisChange, IntMatrix, RatMatrix};
use crate::polarization_kit::PolarizedLatticeData;
use crate::quad_order::QuadOrder;

pub const DEFAULT_PREC: u32 = 128;

/// Periods Ω = (Ω1 | Ω2), one column per lattice basis vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodMatrix {
    omega: CMat,
}

impl PeriodMatrix {
    pub fn new(omega: CMat) -> Result<Self> {
        let g = omega.nrows();
        if !(1..=2).contains(&g) || omega.ncols() != 2 * g {
            return Err(Error::Dimension(format!(
                "period matrix must be g x 2g with g in {{1,2}}, got {}x{}",
                g,
                omega.ncols()
            )));
        }
        let w = realify(&omega);
        let scale: f64 = omega.max_abs().to_f64().max(f64::MIN_POSITIVE);
        let det = w.inverse().map(|inv| inv.max_abs().to_f64() * scale);
        // condition estimate ‖W‖·‖W⁻¹‖
        match det {
            Some(cond) if cond.is_finite() && cond < 1e30 => Ok(PeriodMatrix { omega }),
            _ => Err(Error::DegenerateLattice),
        }
    }

    pub fn omega(&self) -> &CMat {
        &self.omega
    }

    pub fn genus(&self) -> usize {
        self.omega.nrows()
    }

    pub fn prec(&self) -> u32 {
        self.omega.prec()
    }
}

// 2g x 2g real matrix of real and imaginary parts, stored as complex.
fn realify(omega: &CMat) -> CMat {
    let (g, n, prec) = (omega.nrows(), omega.ncols(), omega.prec());
    let mut w = CMat::zeros(2 * g, n, prec);
    for i in 0..g {
        for k in 0..n {
            w[(2 * i, k)].assign(omega[(i, k)].real());
            w[(2 * i + 1, k)].assign(omega[(i, k)].imag());
        }
    }
    w
}

/// Point Z of the Siegel upper half space, stored symmetrized.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelPoint {
    z: CMat,
    asymmetry: f64,
}

impl SiegelPoint {
    /// Validates symmetry (relative to max|Z|) and positivity of Im Z.
    pub fn new(z: CMat, tol: f64) -> Result<Self> {
        let g = z.nrows();
        if z.ncols() != g || !(1..=2).contains(&g) {
            return Err(Error::Dimension("Siegel point must be 1x1 or 2x2".into()));
        }
        let diff = z.sub(&z.transpose()).max_abs().to_f64();
        let asymmetry = diff / z.max_abs().to_f64().max(f64::MIN_POSITIVE);
        if asymmetry > tol {
            return Err(Error::NotSymplecticOrder(format!("Z is not symmetric (relative asymmetry {asymmetry:.3e})")));
        }
        let half = Complex::with_val(z.prec(), 0.5);
        let mut sym = z.clone();
        for i in 0..g {
            for j in 0..g {
                sym[(i, j)] = Complex::with_val(z.prec(), &z[(i, j)] + &z[(j, i)]) * &half;
            }
        }
        let p = SiegelPoint { z: sym, asymmetry };
        let lmin = p.min_imag_eigenvalue();
        if lmin <= tol {
            return Err(Error::NotSymplecticOrder(format!(
                "Im Z is not positive definite (min eigenvalue {lmin:.3e})"
            )));
        }
        Ok(p)
    }

    pub fn z(&self) -> &CMat {
        &self.z
    }

    pub fn genus(&self) -> usize {
        self.z.nrows()
    }

    pub fn prec(&self) -> u32 {
        self.z.prec()
    }

    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    /// Eigenvalues of Im Z in increasing order.
    pub fn imag_eigenvalues(&self) -> Vec<Float> {
        let prec = self.prec();
        let y = |i: usize, j: usize| Float::with_val(prec, self.z[(i, j)].imag());
        if self.genus() == 1 {
            return vec![y(0, 0)];
        }
        let (a, b, d) = (y(0, 0), y(0, 1), y(1, 1));
        let mean: Float = Float::with_val(prec, &a + &d) / 2;
        let half_gap: Float = Float::with_val(prec, &a - &d) / 2;
        let r: Float = (half_gap.square() + b.square()).sqrt();
        vec![Float::with_val(prec, &mean - &r), mean + r]
    }

    pub fn min_imag_eigenvalue(&self) -> f64 {
        self.imag_eigenvalues()[0].to_f64()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.genus() == 1 || abs(&self.z[(0, 1)]).to_f64() <= tol
    }
}

/// Z = Ω1⁻¹·Ω2.
pub fn siegel_from_periods(p: &PeriodMatrix, tol: f64) -> Result<SiegelPoint> {
    let g = p.genus();
    let o1 = p.omega.columns(0..g);
    let o2 = p.omega.columns(g..2 * g);
    let inv = o1.inverse().ok_or(Error::SingularPeriods)?;
    SiegelPoint::new(inv.mul(&o2), tol)
}

/// Periods on the basis given by the rows of S: Ω·Sᵀ.
pub fn apply_basis_change(p: &PeriodMatrix, s: &BasisChange) -> PeriodMatrix {
    let prec = p.prec();
    let st = s.matrix().transpose();
    let n = st.nrows();
    let mut m = CMat::zeros(n, st.ncols(), prec);
    for i in 0..n {
        for j in 0..st.ncols() {
            m[(i, j)] = Complex::with_val(prec, (Float::with_val(prec, &st[(i, j)]), 0));
        }
    }
    PeriodMatrix { omega: p.omega.mul(&m) }
}

/// Integer matrix R with Ω·R = A·Ω for an analytic representation A, and the rounding residual.
pub fn rational_representation(p: &PeriodMatrix, a: &CMat, tol: f64) -> Result<(IntMatrix, f64)> {
    let w = realify(&p.omega);
    let rhs = realify(&a.mul(&p.omega));
    let winv = w.inverse().ok_or(Error::DegenerateLattice)?;
    let r = winv.mul(&rhs);
    let n = r.nrows();
    let mut out = IntMatrix::zeros(n, n);
    let mut residual: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = Float::with_val(p.prec(), r[(i, j)].real());
            let rounded = Float::with_val(p.prec(), x.round_ref());
            residual = residual.max(Float::with_val(p.prec(), &x - &rounded).abs().to_f64());
            residual = residual.max(r[(i, j)].imag().to_f64().abs());
            out[(i, j)] = rounded.to_integer().expect("finite entry");
        }
    }
    if residual > tol {
        return Err(Error::NonIntegralAction(format!("{residual:.3e}")));
    }
    Ok((out, residual))
}

/// Descent data for the Weil restriction of a Q-curve: μ: C^σ → C with
/// μ*(ω_σ) = λ·ω of degree n, C = C/⟨w1, w2⟩ and C^σ = C/⟨s1, s2⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct IsogenyDescent {
    pub lambda: Complex,
    pub degree: u32,
    pub lattice: [Complex; 2],
    pub lattice_sigma: [Complex; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeilRestriction {
    pub data: PolarizedLatticeData,
    pub periods: PeriodMatrix,
    pub residual: f64,
}

/// Lattice Λ ⊕ Λσ on the basis (γ1, γσ1, γ2, γσ2) with the product form and the action of √n.
pub fn weil_restriction_lattice(d: &IsogenyDescent, tol: f64) -> Result<WeilRestriction> {
    if d.lambda.is_zero() || d.degree == 0 {
        return Err(Error::DegenerateLattice);
    }
    let prec = d.lambda.prec().0;
    let z = Complex::new(prec);
    let [w1, w2] = d.lattice.clone();
    let [s1, s2] = d.lattice_sigma.clone();
    let omega = CMat::from_rows(prec, vec![vec![w1, z.clone(), w2, z.clone()], vec![z.clone(), s1, z.clone(), s2]]);
    let periods = PeriodMatrix::new(omega)?;
    let n = Complex::with_val(prec, d.degree);
    let a = CMat::from_rows(
        prec,
        vec![vec![z.clone(), Complex::with_val(prec, &n / &d.lambda)], vec![d.lambda.clone(), z]],
    );
    let (t, residual) = rational_representation(&periods, &a, tol)?;
    let order = QuadOrder::from_disc(Integer::from(4 * d.degree))?;
    let form = AlternatingForm::with_labels(
        RatMatrix::standard_alternating(&[1.into(), 1.into()]),
        ["g1", "gs1", "g2", "gs2"].iter().map(|s| s.to_string()).collect(),
    )?;
    let data = PolarizedLatticeData::new(form, order, t)?;
    Ok(WeilRestriction { data, periods, residual })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EllipticInvariants {
    pub j: Complex,
    pub c4: Complex,
    pub c6: Complex,
}

/// j, c4 = (2π/w1)⁴E4(τ), c6 = (2π/w1)⁶E6(τ) for the lattice ⟨w1, w2⟩.
pub fn elliptic_invariants(w1: &Complex, w2: &Complex) -> Result<EllipticInvariants> {
    let prec = w1.prec().0.max(w2.prec().0);
    let (mut a, mut b) = (Complex::with_val(prec, w1), Complex::with_val(prec, w2));
    let tau0 = Complex::with_val(prec, &b / &a);
    if !tau0.imag().is_normal() || tau0.imag().clone().abs() < 1e-30 {
        return Err(Error::DegenerateLattice);
    }
    if tau0.imag().is_sign_negative() {
        b = -b;
    }
    // reduce τ = b/a to the fundamental domain by changing the lattice basis
    for _ in 0..10_000 {
        let tau = Complex::with_val(prec, &b / &a);
        let k = Float::with_val(prec, tau.real().round_ref());
        if !k.is_zero() {
            b -= Complex::with_val(prec, &a * &k);
        }
        let tau = Complex::with_val(prec, &b / &a);
        if Float::with_val(prec, tau.abs_ref()) < 1 {
            let na = b.clone();
            b = -a;
            a = na;
        } else {
            break;
        }
    }
    let tau = Complex::with_val(prec, &b / &a);
    let two_pi_i = Complex::with_val(prec, (0, Float::with_val(prec, 2) * pi(prec)));
    let q = Complex::with_val(prec, &two_pi_i * &tau).exp();
    let e4 = eisenstein(&q, 4, 240, prec);
    let e6 = eisenstein(&q, 6, -504, prec);
    let s = Complex::with_val(prec, Float::with_val(prec, 2) * pi(prec)) / &a;
    let s2 = Complex::with_val(prec, s.square_ref());
    let s4 = Complex::with_val(prec, s2.square_ref());
    let c4 = Complex::with_val(prec, &s4 * &e4);
    let c6 = Complex::with_val(prec, &s4 * &s2) * &e6;
    let c43 = Complex::with_val(prec, &c4 * &c4) * &c4;
    let c62 = Complex::with_val(prec, c6.square_ref());
    let disc = Complex::with_val(prec, &c43 - &c62);
    if disc.is_zero() {
        return Err(Error::DegenerateLattice);
    }
    let j = Complex::with_val(prec, &c43 * 1728) / disc;
    Ok(EllipticInvariants { j, c4, c6 })
}

// 1 + k·Σ n^(w−1) qⁿ/(1 − qⁿ)
fn eisenstein(q: &Complex, weight: u32, k: i32, prec: u32) -> Complex {
    let eps = ten_pow_neg(prec, prec as f64 * std::f64::consts::LOG10_2 + 5.0);
    let mut sum = Complex::new(prec);
    let mut qn = Complex::with_val(prec, q);
    for n in 1u32..100_000 {
        let denom = Complex::with_val(prec, 1) - &qn;
        let coeff = Float::with_val(prec, rug::ops::Pow::pow(Integer::from(n), weight - 1));
        let term = Complex::with_val(prec, &qn * &coeff) / denom;
        let small = abs(&term) < eps;
        sum += term;
        if small {
            break;
        }
        qn *= q;
    }
    sum * k + 1
}
