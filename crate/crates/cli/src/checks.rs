//! Execution of fixture checks.

use std::time::Instant;

use polkit::exact_forms::{
    check_symplectic, pfaffian, primitive_part, symplectic_normal_form, AlternatingForm, BasisChange, IntMatrix,
};
use polkit::ffield_verify::{count_points_genus2_with, disambiguate_sign, frobenius_data};
use polkit::par::Exec;
use polkit::polarization_kit::{
    classification_report, find_module_structure, form_type, is_principally_polarizable, siegel_point_for,
    trace_degree_one_form, twist_form, ClassificationReport, PolarizedLatticeData, VerdictSource,
};
use polkit::quad_order::{fundamental_unit, polarization_classes, QuadOrder};
use polkit::theta_igusa::{curve_invariants, even_theta_nulls_with, ThetaConfig, ThetaNullVector};
use polkit::torus_analytic::{
    abs, elliptic_invariants, fmt_complex, quotient_by_torsion, same_lattice, weil_restriction_lattice, SiegelPoint,
    TorsionSubgroup, DEFAULT_PREC,
};
use rug::{Complex, Integer, Rational};
use serde_json::{json, Value};

use crate::fixture::{complex, complex_matrix, element, integer, rational, Check, Fixture, FormExpr};
use crate::report::{CheckResult, RunReport, RunSettings, Status};

#[derive(Clone, Debug)]
pub struct Settings {
    pub prec: u32,
    pub digits: u32,
    /// Overrides the Siegel-point tolerance.
    pub tol: Option<f64>,
    pub exec: Exec,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { prec: DEFAULT_PREC, digits: 30, tol: None, exec: Exec::default() }
    }
}

impl Settings {
    /// Tolerance for Siegel points from 6-decimal periods.
    pub fn siegel_tol(&self) -> f64 {
        self.tol.unwrap_or(1e-4)
    }

    pub fn theta_config(&self, threshold: Option<f64>) -> ThetaConfig {
        ThetaConfig {
            digits: self.digits,
            threshold,
            siegel_tol: self.siegel_tol(),
            exec: self.exec,
            ..ThetaConfig::default()
        }
    }
}

pub struct Outcome {
    pub pass: bool,
    pub computed: Value,
    pub tolerance: Option<String>,
    pub detail: Option<String>,
}

impl Outcome {
    fn exact(pass: bool, computed: Value) -> Self {
        Outcome { pass, computed, tolerance: None, detail: None }
    }
}

type Res<T> = std::result::Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

pub fn lattice_data(fx: &Fixture, form: AlternatingForm) -> Res<PolarizedLatticeData> {
    PolarizedLatticeData::new(form, fx.order()?, fx.rho_omega()?).map_err(err)
}

pub fn form_type_string(fx: &Fixture, e: &FormExpr, primitive: bool) -> Res<String> {
    let mut f = fx.form(e)?;
    if primitive {
        f = primitive_part(&f).map_err(err)?.0;
    }
    Ok(form_type(&f).map_err(err)?.to_string())
}

fn unit_summary(o: &QuadOrder) -> Res<Value> {
    let u = fundamental_unit(o).map_err(err)?;
    Ok(json!({
        "unit": o.display(&u.fundamental_unit),
        "norm": u.norm_of_fundamental_unit,
        "pi": polarization_classes(o).order(),
    }))
}

pub fn classify(
    fx: &Fixture,
    form: AlternatingForm,
    periods: Option<&str>,
    siegel: Option<&[String]>,
    threshold: Option<f64>,
    s: &Settings,
) -> Res<(ClassificationReport, QuadOrder)> {
    let data = lattice_data(fx, form)?;
    let source = match (periods, siegel) {
        (Some(p), _) => Some(VerdictSource::Periods(fx.periods(p, s.prec)?)),
        (None, Some(names)) => {
            Some(VerdictSource::SiegelPoints(names.iter().map(|n| siegel_point(fx, n, s)).collect::<Res<Vec<_>>>()?))
        }
        (None, None) => None,
    };
    let report = classification_report(&data, source.as_ref(), &s.theta_config(threshold)).map_err(err)?;
    Ok((report, data.order().clone()))
}

pub fn classification_json(report: &ClassificationReport, o: &QuadOrder) -> Value {
    let reps: Vec<String> = report.representatives.iter().map(|r| o.display(&r.element)).collect();
    let mut v = json!({"pi": report.pi_count, "representatives": reps});
    if let Some(verdicts) = &report.verdicts {
        v["verdicts"] = json!(verdicts.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        v["tau"] = json!(report.tau_count);
        v["sigma"] = json!(report.sigma_count);
    }
    v
}

pub fn siegel_point(fx: &Fixture, name: &str, s: &Settings) -> Res<SiegelPoint> {
    let spec = fx.siegel_points.get(name).ok_or_else(|| format!("unknown Siegel point {name:?}"))?;
    SiegelPoint::new(complex_matrix(s.prec, &spec.z)?, s.siegel_tol()).map_err(err)
}

/// Siegel point from a named point, or from periods and a principal form.
pub fn resolve_siegel(
    fx: &Fixture,
    siegel: Option<&str>,
    periods: Option<&str>,
    form: Option<&FormExpr>,
    s: &Settings,
) -> Res<SiegelPoint> {
    match (siegel, periods, form) {
        (Some(n), _, _) => siegel_point(fx, n, s),
        (None, Some(p), Some(f)) => {
            siegel_point_for(&fx.form(f)?, &fx.periods(p, s.prec)?, s.siegel_tol()).map_err(err)
        }
        _ => Err("need a Siegel point, or periods together with a form".into()),
    }
}

pub fn siegel_json(z: &SiegelPoint) -> Value {
    let rows: Vec<Vec<String>> =
        z.z().to_rows().iter().map(|r| r.iter().map(|x| fmt_complex(x, 12)).collect()).collect();
    json!({
        "z": rows,
        "asymmetry": sci(z.asymmetry()),
        "min_imag_eigenvalue": format!("{:.6}", z.min_imag_eigenvalue()),
    })
}

pub fn theta_json(nulls: &ThetaNullVector, threshold: f64) -> Value {
    let ratios = nulls.ratios();
    let vanishing = ratios.iter().filter(|r| **r < threshold).count();
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let verdict = match vanishing {
        0 => "Jacobian".to_string(),
        1 => "Split".to_string(),
        k => format!("ambiguous ({k} vanishing)"),
    };
    json!({
        "vanishing": vanishing,
        "min_ratio": sci(min),
        "verdict": verdict,
        "truncation_radius": nulls.truncation_radius,
    })
}

pub fn theta_values_json(nulls: &ThetaNullVector, digits: usize) -> Value {
    Value::Array(
        nulls
            .values
            .iter()
            .zip(nulls.ratios())
            .map(|((ch, v), r)| json!({"char": ch.to_string(), "value": fmt_complex(v, digits), "ratio": sci(r)}))
            .collect(),
    )
}

fn rel_err(a: &Complex, b: &Complex) -> f64 {
    let d = Complex::with_val(a.prec().0, a - b);
    (abs(&d) / abs(b)).to_f64()
}

pub fn rational_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn run(fx: &Fixture, check: &Check, s: &Settings) -> Res<Outcome> {
    match check {
        Check::Type { form, primitive, value } => {
            let t = form_type_string(fx, form, *primitive)?;
            Ok(Outcome::exact(&t == value, json!(t)))
        }
        Check::Pfaffian { form, value } => {
            let pf = pfaffian(&fx.form(form)?).map_err(err)?;
            Ok(Outcome::exact(pf == integer(value)?, json!(pf.to_string())))
        }
        Check::Form { form, equals } => {
            let f = fx.form(form)?;
            let target = fx.form_matrix(equals)?;
            Ok(Outcome::exact(f.matrix() == &target, json!(f.matrix().to_string())))
        }
        Check::Twist { form, element: e, equals } => {
            let data = lattice_data(fx, fx.form(form)?)?;
            let t = twist_form(&data, &element(e)?, &Rational::from(1)).map_err(err)?;
            let target = fx.form_matrix(equals)?;
            Ok(Outcome::exact(t.matrix() == &target, json!(t.matrix().to_string())))
        }
        Check::Units { unit, norm, pi } => {
            let v = unit_summary(&fx.order()?)?;
            let pass = v["unit"] == json!(unit) && v["norm"] == json!(norm) && v["pi"] == json!(pi);
            Ok(Outcome::exact(pass, v))
        }
        Check::Classify { form, pi, representatives, periods, siegel_points, verdicts, tau, sigma, threshold } => {
            let thr = threshold.as_deref().map(|t| t.parse::<f64>().map_err(err)).transpose()?;
            let (report, o) = classify(fx, fx.form(form)?, periods.as_deref(), siegel_points.as_deref(), thr, s)?;
            let v = classification_json(&report, &o);
            let mut pass = v["pi"] == json!(pi) && v["representatives"] == json!(representatives);
            if let Some(vs) = verdicts {
                pass &= v["verdicts"] == json!(vs);
            }
            pass &= tau.is_none_or(|t| v["tau"] == json!(t));
            pass &= sigma.is_none_or(|t| v["sigma"] == json!(t));
            Ok(Outcome { pass, computed: v, tolerance: threshold.clone(), detail: None })
        }
        Check::PrincipalCheck { form, principal, degree, witness } => {
            let data = lattice_data(fx, fx.form(form)?)?;
            let p = is_principally_polarizable(&data).map_err(err)?;
            let w = p.witness.as_ref().map(|w| data.order().display(&w.element));
            let pass = p.principal == *principal
                && p.degree == integer(degree)?
                && witness.as_ref().is_none_or(|x| w.as_ref() == Some(x));
            Ok(Outcome::exact(pass, json!({"principal": p.principal, "degree": p.degree.to_string(), "witness": w})))
        }
        Check::SymplecticBasis { form, basis, value } => {
            let f = fx.form(form)?;
            let s_mat = crate::fixture::int_matrix(fx.basis_changes.get(basis).ok_or("unknown basis change")?)?;
            let s_bc = BasisChange::new(s_mat).map_err(err)?;
            let (own, t) = symplectic_normal_form(&f).map_err(err)?;
            let paper_ok = check_symplectic(&s_bc, &f, &t);
            let own_ok = check_symplectic(&own, &f, &t);
            let pass = paper_ok && own_ok && &t.to_string() == value;
            Ok(Outcome::exact(pass, json!({"type": t.to_string(), "given_basis": paper_ok, "computed_basis": own_ok})))
        }
        Check::Siegel { periods, form } => {
            let z = resolve_siegel(fx, None, Some(periods), Some(form), s)?;
            Ok(Outcome { pass: true, computed: siegel_json(&z), tolerance: Some(sci(s.siegel_tol())), detail: None })
        }
        Check::Theta { siegel, periods, form, vanishing, threshold } => {
            let z = resolve_siegel(fx, siegel.as_deref(), periods.as_deref(), form.as_ref(), s)?;
            let thr: f64 = threshold.parse().map_err(err)?;
            let nulls = even_theta_nulls_with(&z, &s.theta_config(Some(thr))).map_err(err)?;
            let v = theta_json(&nulls, thr);
            Ok(Outcome {
                pass: v["vanishing"] == json!(vanishing),
                computed: v,
                tolerance: Some(threshold.clone()),
                detail: None,
            })
        }
        Check::Elliptic { lattice, rel_tol, j, c4, c6 } => {
            let l = fx.lattices.get(lattice).ok_or_else(|| format!("unknown lattice {lattice:?}"))?;
            let inv = elliptic_invariants(&complex(s.prec, &l.w1)?, &complex(s.prec, &l.w2)?).map_err(err)?;
            let tol: f64 = rel_tol.parse().map_err(err)?;
            let mut errs = vec![("j", rel_err(&inv.j, &complex(s.prec, j)?))];
            if let Some(c) = c4 {
                errs.push(("c4", rel_err(&inv.c4, &complex(s.prec, c)?)));
            }
            if let Some(c) = c6 {
                errs.push(("c6", rel_err(&inv.c6, &complex(s.prec, c)?)));
            }
            let pass = errs.iter().all(|(_, e)| *e < tol);
            let mut v = json!({
                "j": fmt_complex(&inv.j, 10),
                "c4": fmt_complex(&inv.c4, 10),
                "c6": fmt_complex(&inv.c6, 10),
            });
            for (k, e) in errs {
                v[format!("rel_err_{k}")] = json!(sci(e));
            }
            Ok(Outcome { pass, computed: v, tolerance: Some(rel_tol.clone()), detail: None })
        }
        Check::TraceForm { endo, det } => {
            let o = fx.order()?;
            let (t, m) = fx.endo(endo)?;
            let n = m.nrows();
            let rho = m.sub(&IntMatrix::identity(n).scale(&t.a));
            let rho = if t.b == -1 { rho.neg() } else { rho };
            let module = find_module_structure(&o, &rho, 2).ok_or("no module structure found")?;
            let e = trace_degree_one_form(&module);
            let d = e.det();
            let compatible = e.matrix().mul(&module.action().to_rational()).is_skew();
            let pass = d == rational(det)? && compatible && e.is_integral();
            Ok(Outcome::exact(
                pass,
                json!({"det": d.to_string(), "compatible": compatible, "form": e.matrix().to_string()}),
            ))
        }
        Check::Quotient { form, torsion, group_order, invariant_factors, scalar, degree_relation, lattice } => {
            let f = fx.form(form)?;
            let gens = torsion.iter().map(|t| fx.torsion_vector(t)).collect::<Res<Vec<_>>>()?;
            let g = TorsionSubgroup::new(f.rank(), gens).map_err(err)?;
            let q = quotient_by_torsion(&f, &g).map_err(err)?;
            let factors: Vec<String> = g.invariant_factors().iter().map(|x| x.to_string()).collect();
            let mut v = json!({
                "group_order": q.group_order.to_string(),
                "invariant_factors": factors,
                "degree_relation": q.degree_relation_holds,
                "scaled_pfaffian": pfaffian(&q.scaled).map_err(err)?.abs().to_string(),
            });
            let mut pass = q.group_order == integer(group_order)?;
            if let Some(fs) = invariant_factors {
                pass &= &factors == fs;
            }
            if let Some(d) = degree_relation {
                pass &= q.degree_relation_holds == *d;
            }
            if let Some(sc) = scalar {
                let m = fx.endo(&sc.endo)?.1;
                let ok = g.acts_as_scalar(&m, &integer(&sc.k)?);
                v["acts_as_scalar"] = json!(ok);
                pass &= ok;
            }
            if let Some(l) = lattice {
                let same = same_lattice(&q.basis, &fx.sublattice(l)?);
                v["same_lattice"] = json!(same);
                pass &= same;
            }
            Ok(Outcome::exact(pass, v))
        }
        Check::Igusa { curve, value } => {
            let inv = curve_invariants(&fx.curve(curve)?).map_err(err)?;
            let got = rational_strings(&[inv.i1, inv.i2, inv.i3]);
            let pass = match value {
                Some(want) => {
                    let want = want.iter().map(|x| rational(x)).collect::<Res<Vec<_>>>()?;
                    got == rational_strings(&want)
                }
                None => true,
            };
            Ok(Outcome::exact(pass, json!(got)))
        }
        Check::IgusaDistinct { curves } => {
            let invs = curves.iter().map(|c| curve_invariants(&fx.curve(c)?).map_err(err)).collect::<Res<Vec<_>>>()?;
            let mut equal = Vec::new();
            for i in 0..invs.len() {
                for j in i + 1..invs.len() {
                    if invs[i] == invs[j] {
                        equal.push(format!("{}={}", curves[i], curves[j]));
                    }
                }
            }
            Ok(Outcome::exact(equal.is_empty(), json!({"coinciding": equal})))
        }
        Check::Weilres { action, form_u, residual_max } => {
            let tol: f64 = residual_max.parse().map_err(err)?;
            let t0 = Instant::now();
            let w = weil_restriction_lattice(&fx.descent(s.prec)?, tol).map_err(err)?;
            let elapsed = t0.elapsed().as_secs_f64();
            let (u, m) = fx.endo(action)?;
            let rho_u = w.data.rho(&u);
            let eu = twist_form(&w.data, &u, &Rational::from(1)).map_err(err)?;
            let target = fx.form_matrix(form_u)?;
            let pass = rho_u == m && eu.matrix() == &target && w.residual < tol;
            Ok(Outcome {
                pass,
                computed: json!({
                    "action": rho_u.to_string(),
                    "form_u": eu.matrix().to_string(),
                    "residual": sci(w.residual),
                    "seconds_below_1": elapsed < 1.0,
                }),
                tolerance: Some(residual_max.clone()),
                detail: None,
            })
        }
        Check::Frobenius { curve, p, charpoly } => {
            let f = frobenius_data(&fx.curve(curve)?, *p, s.exec).map_err(err)?;
            let want = charpoly.iter().map(|x| integer(x)).collect::<Res<Vec<Integer>>>()?;
            let pass = f.charpoly.iter().zip(&want).all(|(a, b)| *b == *a);
            Ok(Outcome::exact(pass, json!({"counts": [f.counts.0, f.counts.1], "charpoly": f.charpoly})))
        }
        Check::CountPoints { curve, p, k, value } => {
            let n = count_points_genus2_with(&fx.curve(curve)?, *p, *k, s.exec).map_err(err)?;
            Ok(Outcome::exact(n == integer(value)?, json!(n.to_string())))
        }
        Check::Disambiguate { check, selected } => {
            let (spec, e) = fx.elliptic(*check)?;
            let c0 = fx.curve(&spec.candidates[0])?;
            let c1 = fx.curve(&spec.candidates[1])?;
            let choice = disambiguate_sign((&c0, &c1), &e, spec.p, s.exec).map_err(err)?;
            let name = &spec.candidates[choice.index];
            Ok(Outcome::exact(
                name == selected,
                json!({"selected": name, "root": choice.root, "quartic": choice.quartic, "elliptic": choice.elliptic}),
            ))
        }
    }
}

pub fn run_check(fx: &Fixture, index: usize, check: &Check, s: &Settings) -> CheckResult {
    let t0 = Instant::now();
    let outcome = run(fx, check, s);
    let wall_ms = Some((t0.elapsed().as_secs_f64() * 1e3 * 1000.0).round() / 1000.0);
    let expected = expected_json(check);
    match outcome {
        Ok(o) => CheckResult {
            index,
            op: check.op().into(),
            status: if o.pass { Status::Pass } else { Status::Fail },
            computed: o.computed,
            expected,
            tolerance: o.tolerance,
            detail: o.detail,
            wall_ms,
        },
        Err(e) => CheckResult {
            index,
            op: check.op().into(),
            status: Status::Fail,
            computed: Value::Null,
            expected,
            tolerance: None,
            detail: Some(e),
            wall_ms,
        },
    }
}

fn expected_json(check: &Check) -> Value {
    let mut v = serde_json::to_value(check).unwrap_or(Value::Null);
    if let Value::Object(m) = &mut v {
        m.remove("op");
    }
    v
}

pub fn run_fixture(fx: &Fixture, s: &Settings) -> RunReport {
    let checks = fx.expected.iter().enumerate().map(|(i, c)| run_check(fx, i, c, s)).collect();
    RunReport::new(&fx.name, RunSettings { prec: s.prec, digits: s.digits }, checks)
}
