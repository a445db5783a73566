//! Twisted polarizations L^(t), degrees, principal polarizability and the
//! classification of principal polarizations up to P(R).

use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::exact_forms::{
    pfaffian, polarization_type, symplectic_basis, AlternatingForm, IntMatrix, PolarizationType, RatMatrix,
};
use crate::par::Exec;
use crate::quad_order::{polarization_classes, solve_norm_equation, OrderElement, QuadOrder};
use crate::theta_igusa::{decomposition_verdict_with, ThetaConfig, Verdict};
use crate::torus_analytic::{apply_basis_change, siegel_from_periods, PeriodMatrix, SiegelPoint};

/// Lattice with a Riemann form and an action of a quadratic order.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarizedLatticeData {
    form: AlternatingForm,
    order: QuadOrder,
    action: IntMatrix,
}

impl PolarizedLatticeData {
    /// `action` is ρ(ω) acting on column coordinate vectors.
    pub fn new(form: AlternatingForm, order: QuadOrder, action: IntMatrix) -> Result<Self> {
        let n = form.rank();
        if action.nrows() != n || action.ncols() != n {
            return Err(Error::Dimension(format!("action is {}x{}, form rank {n}", action.nrows(), action.ncols())));
        }
        let id = IntMatrix::identity(n);
        let residual = action.mul(&action).sub(&action.scale(order.tr())).add(&id.scale(order.nm()));
        if !residual.is_zero() {
            return Err(Error::BadAction);
        }
        let p = PolarizedLatticeData { form, order, action };
        if p.order.is_real() && !p.form.matrix().mul(&p.action.to_rational()).is_skew() {
            return Err(Error::NotSymmetricCompatible);
        }
        Ok(p)
    }

    pub fn form(&self) -> &AlternatingForm {
        &self.form
    }

    pub fn order(&self) -> &QuadOrder {
        &self.order
    }

    pub fn action(&self) -> &IntMatrix {
        &self.action
    }

    pub fn rank(&self) -> usize {
        self.form.rank()
    }

    /// ρ(t) = a·I + b·ρ(ω).
    pub fn rho(&self, t: &OrderElement) -> IntMatrix {
        IntMatrix::identity(self.rank()).scale(&t.a).add(&self.action.scale(&t.b))
    }

    /// Same data with the form replaced (the action is unchanged).
    pub fn with_form(&self, form: AlternatingForm) -> Result<Self> {
        Self::new(form, self.order.clone(), self.action.clone())
    }

    /// Same data in the basis given by the rows of `s`.
    pub fn change_basis(&self, s: &IntMatrix) -> Result<Self> {
        let sr = s.to_rational();
        let form = self.form.congruent(&sr);
        let sinv_t = sr.transpose().inverse().ok_or(Error::Degenerate)?;
        let action = sinv_t.mul(&self.action.to_rational()).mul(&sr.transpose());
        let action = action.to_integer().ok_or_else(|| Error::NotIntegral("conjugated action".into()))?;
        Self::new(form, self.order.clone(), action)
    }
}

/// scale·form·ρ(t), the matrix of L^(t).
pub fn twist_form(p: &PolarizedLatticeData, t: &OrderElement, scale: &Rational) -> Result<AlternatingForm> {
    if !p.order.is_real() && !t.is_rational() {
        return Err(Error::NotSymmetricCompatible);
    }
    let m = p.form.matrix().mul(&p.rho(t).to_rational()).scale(scale);
    AlternatingForm::with_labels(m, p.form.labels().to_vec()).map_err(|_| Error::NotSymmetricCompatible)
}

/// deg L^(t) = deg L · |N(t)|, cross-checked against the Pfaffian of the twist.
pub fn degree_of(p: &PolarizedLatticeData, t: &OrderElement) -> Result<Integer> {
    let base = pfaffian(&p.form)?.abs();
    let deg = base * p.order.norm(t).abs();
    let direct = pfaffian(&twist_form(p, t, &Rational::from(1))?)?.abs();
    assert_eq!(deg, direct, "degree formula disagrees with the Pfaffian");
    Ok(deg)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalWitness {
    /// s with form·ρ(s)/d principal.
    pub element: OrderElement,
    /// t = s̄, totally positive of norm d; form·ρ(t)⁻¹ = form·ρ(s)/d.
    pub norm_solution: OrderElement,
    pub form: AlternatingForm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Principality {
    pub principal: bool,
    pub degree: Integer,
    pub witness: Option<PrincipalWitness>,
}

fn is_principal_matrix(m: &RatMatrix) -> bool {
    m.is_integral() && m.is_skew() && m.det() == 1
}

/// Searches t of norm d = |Pf| with form·ρ(t)⁻¹ integral and unimodular.
pub fn is_principally_polarizable(p: &PolarizedLatticeData) -> Result<Principality> {
    let d = pfaffian(&p.form)?.abs();
    let one = OrderElement::one();
    if d == 1 {
        let witness = PrincipalWitness { element: one.clone(), norm_solution: one, form: p.form.clone() };
        return Ok(Principality { principal: true, degree: d, witness: Some(witness) });
    }
    let candidates: Vec<OrderElement> = if p.order.is_real() {
        solve_norm_equation(&p.order, &d)?
    } else {
        // symmetric elements are rational there, with N(m) = m²
        let (root, rem) = d.clone().sqrt_rem(Integer::new());
        if rem == 0 {
            vec![p.order.from_int(root)]
        } else {
            Vec::new()
        }
    };
    let inv_d = Rational::from((Integer::from(1), d.clone()));
    for t in candidates {
        let s = p.order.conjugate(&t);
        let m = p.form.matrix().mul(&p.rho(&s).to_rational()).scale(&inv_d);
        if is_principal_matrix(&m) {
            let form = AlternatingForm::with_labels(m, p.form.labels().to_vec())?;
            let witness = PrincipalWitness { element: s, norm_solution: t, form };
            return Ok(Principality { principal: true, degree: d, witness: Some(witness) });
        }
    }
    Ok(Principality { principal: false, degree: d, witness: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Exact,
    NumericTheta,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Representative {
    pub element: OrderElement,
    pub form: AlternatingForm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationReport {
    pub pi_count: usize,
    pub representatives: Vec<Representative>,
    pub verdicts: Option<Vec<Verdict>>,
    pub tau_count: Option<usize>,
    pub sigma_count: Option<usize>,
    pub provenance: Provenance,
}

/// One principal form form·ρ(u_j) per class of P(R).
pub fn principal_representatives(p: &PolarizedLatticeData) -> Result<ClassificationReport> {
    let d = pfaffian(&p.form)?.abs();
    if d != 1 {
        return Err(Error::NotPrincipal(d.to_string()));
    }
    let classes = polarization_classes(&p.order);
    let one = Rational::from(1);
    let representatives = classes
        .representatives
        .into_iter()
        .map(|u| Ok(Representative { form: twist_form(p, &u, &one)?, element: u }))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassificationReport {
        pi_count: representatives.len(),
        representatives,
        verdicts: None,
        tau_count: None,
        sigma_count: None,
        provenance: Provenance::Exact,
    })
}

/// Analytic input for Jacobian/split verdicts.
#[derive(Clone, Debug)]
pub enum VerdictSource {
    /// Periods on the lattice basis of the data; each representative is
    /// brought to symplectic form before computing its Siegel point.
    Periods(PeriodMatrix),
    /// One Siegel point per representative, in representative order.
    SiegelPoints(Vec<SiegelPoint>),
}

/// Siegel point of a principal form from periods on the same basis.
pub fn siegel_point_for(form: &AlternatingForm, periods: &PeriodMatrix, tol: f64) -> Result<SiegelPoint> {
    let s = symplectic_basis(form)?;
    siegel_from_periods(&apply_basis_change(periods, &s), tol)
}

pub fn classification_report(
    p: &PolarizedLatticeData,
    source: Option<&VerdictSource>,
    cfg: &ThetaConfig,
) -> Result<ClassificationReport> {
    let mut report = principal_representatives(p)?;
    let Some(source) = source else {
        return Ok(report);
    };
    let points: Vec<SiegelPoint> = match source {
        VerdictSource::Periods(periods) => report
            .representatives
            .iter()
            .map(|r| siegel_point_for(&r.form, periods, cfg.siegel_tol))
            .collect::<Result<_>>()?,
        VerdictSource::SiegelPoints(points) => {
            if points.len() != report.pi_count {
                return Err(Error::Dimension(format!(
                    "{} Siegel points for {} representatives",
                    points.len(),
                    report.pi_count
                )));
            }
            points.clone()
        }
    };
    let verdicts =
        cfg.exec.map(&points, |z| decomposition_verdict_with(z, cfg)).into_iter().collect::<Result<Vec<_>>>()?;
    let sigma = verdicts.iter().filter(|v| **v == Verdict::Split).count();
    report.tau_count = Some(report.pi_count - sigma);
    report.sigma_count = Some(sigma);
    report.verdicts = Some(verdicts);
    report.provenance = Provenance::NumericTheta;
    Ok(report)
}

/// Identification of the lattice with O·γ1 ⊕ O·γ2.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleStructure {
    order: QuadOrder,
    /// Columns are the coordinates of γ1, ωγ1, γ2, ωγ2.
    basis_map: IntMatrix,
}

impl ModuleStructure {
    pub fn new(order: QuadOrder, basis_map: IntMatrix) -> Result<Self> {
        if basis_map.nrows() != 4 || !basis_map.is_unimodular() {
            return Err(Error::Dimension("module basis map must be a unimodular 4x4 matrix".into()));
        }
        Ok(ModuleStructure { order, basis_map })
    }

    /// The module basis is the lattice basis itself.
    pub fn standard(order: QuadOrder) -> Self {
        ModuleStructure { order, basis_map: IntMatrix::identity(4) }
    }

    pub fn order(&self) -> &QuadOrder {
        &self.order
    }

    pub fn basis_map(&self) -> &IntMatrix {
        &self.basis_map
    }

    /// ρ(ω) in lattice coordinates.
    pub fn action(&self) -> IntMatrix {
        let reg = IntMatrix::from_rows(vec![
            vec![Integer::new(), Integer::from(-self.order.nm())],
            vec![Integer::from(1), self.order.tr().clone()],
        ]);
        let mut block = IntMatrix::zeros(4, 4);
        for k in [0, 2] {
            for i in 0..2 {
                for j in 0..2 {
                    block[(k + i, k + j)] = reg[(i, j)].clone();
                }
            }
        }
        let b = self.basis_map.to_rational();
        b.mul(&block.to_rational())
            .mul(&b.inverse().expect("unimodular"))
            .to_integer()
            .expect("conjugate of an integral matrix by a unimodular one")
    }
}

/// Smallest module structure compatible with a given action, by search over
/// generators with entries in [-bound, bound].
pub fn find_module_structure(order: &QuadOrder, action: &IntMatrix, bound: i64) -> Option<ModuleStructure> {
    let vecs: Vec<Vec<Integer>> = small_vectors(4, bound);
    for g1 in &vecs {
        let w1 = action.mul_vec(g1);
        for g2 in &vecs {
            let w2 = action.mul_vec(g2);
            let cols = [g1, &w1, g2, &w2];
            let m = IntMatrix::from_rows((0..4).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect());
            if m.is_unimodular() {
                return Some(ModuleStructure { order: order.clone(), basis_map: m });
            }
        }
    }
    None
}

fn small_vectors(n: usize, bound: i64) -> Vec<Vec<Integer>> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (-bound..=bound).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out.retain(|v| v.iter().any(|&x| x != 0));
    out.sort_by_key(|v| (v.iter().map(|x| x.abs()).sum::<i64>(), v.clone()));
    out.into_iter().map(|v| v.into_iter().map(Integer::from).collect()).collect()
}

/// E0(αγ1, βγ2) = Tr(αβ/√Δ), E0 vanishing on each O·γi, pulled back to the lattice.
pub fn trace_degree_one_form(m: &ModuleStructure) -> AlternatingForm {
    let tr = m.order.tr().to_i64().expect("small trace");
    let e_mod = RatMatrix::from_i64(&[&[0, 0, 0, 1], &[0, 0, 1, tr], &[0, -1, 0, 0], &[-1, -tr, 0, 0]]);
    let binv = m.basis_map.to_rational().inverse().expect("unimodular");
    let e = binv.transpose().mul(&e_mod).mul(&binv);
    AlternatingForm::new(e).expect("pullback of an alternating form")
}

/// Type of the form, for reports.
pub fn form_type(form: &AlternatingForm) -> Result<PolarizationType> {
    polarization_type(form, &Rational::from(1))
}

/// Default execution mode used by callers that do not pass one.
pub fn default_exec() -> Exec {
    Exec::default()
}
