//! Fixture schema (version 1), loading and validation.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use polkit::exact_forms::{AlternatingForm, IntMatrix, RatMatrix};
use polkit::ffield_verify::EllipticOverQuadratic;
use polkit::quad_order::{OrderElement, QuadOrder};
use polkit::theta_igusa::SexticCurve;
use polkit::torus_analytic::{parse_complex, CMat, IsogenyDescent, PeriodMatrix};
use rug::{Complex, Float, Integer, Rational};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

pub type StrMatrix = Vec<Vec<String>>;
/// Complex entry as [re, im] decimal strings.
pub type StrComplex = [String; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub schema: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub order: OrderSpec,
    #[serde(default)]
    pub forms: BTreeMap<String, StrMatrix>,
    #[serde(default)]
    pub endomorphisms: BTreeMap<String, EndoSpec>,
    #[serde(default)]
    pub basis_changes: BTreeMap<String, StrMatrix>,
    #[serde(default)]
    pub sublattices: BTreeMap<String, StrMatrix>,
    #[serde(default)]
    pub periods: BTreeMap<String, PeriodsSpec>,
    #[serde(default)]
    pub siegel_points: BTreeMap<String, SiegelSpec>,
    #[serde(default)]
    pub lattices: BTreeMap<String, LatticeSpec>,
    #[serde(default)]
    pub torsion: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub curves: BTreeMap<String, CurveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descent: Option<DescentSpec>,
    #[serde(default)]
    pub ffield: Vec<FfieldSpec>,
    pub expected: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderSpec {
    pub disc: i64,
    pub conductor: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub a: String,
    pub b: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndoSpec {
    pub element: ElementSpec,
    pub matrix: StrMatrix,
}

/// Period matrix (Ω1 | Ω2). Columns are the periods along the rows of the
/// named basis change, or along the lattice basis itself when `basis` is absent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    pub omega: Vec<Vec<StrComplex>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiegelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub z: Vec<Vec<StrComplex>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub w1: StrComplex,
    pub w2: StrComplex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub f: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurdSpec {
    pub a: String,
    pub b: String,
    pub d: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescentSpec {
    pub lambda: SurdSpec,
    pub degree: u32,
    pub w1: StrComplex,
    pub w2: StrComplex,
    /// wσ_i = sigma_scale_i · λ · w_i
    pub sigma_scale: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EllipticSpec {
    pub a: [String; 2],
    pub b: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FfieldSpec {
    pub p: u64,
    pub d: i64,
    pub elliptic: EllipticSpec,
    pub candidates: [String; 2],
}

/// Form expression: scale · (B·F·Bᵀ) · M_1 ⋯ M_k, endomorphisms moved to the
/// sublattice basis B when `restrict` is given.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormExpr {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restrict: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub times: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarSpec {
    pub endo: String,
    pub k: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Check {
    Type {
        form: FormExpr,
        #[serde(default)]
        primitive: bool,
        value: String,
    },
    Pfaffian {
        form: FormExpr,
        value: String,
    },
    Form {
        form: FormExpr,
        equals: String,
    },
    Twist {
        form: FormExpr,
        element: ElementSpec,
        equals: String,
    },
    Units {
        unit: String,
        norm: i32,
        pi: usize,
    },
    Classify {
        form: FormExpr,
        pi: usize,
        representatives: Vec<String>,
        #[serde(default)]
        periods: Option<String>,
        #[serde(default)]
        siegel_points: Option<Vec<String>>,
        #[serde(default)]
        verdicts: Option<Vec<String>>,
        #[serde(default)]
        tau: Option<usize>,
        #[serde(default)]
        sigma: Option<usize>,
        #[serde(default)]
        threshold: Option<String>,
    },
    PrincipalCheck {
        form: FormExpr,
        principal: bool,
        degree: String,
        #[serde(default)]
        witness: Option<String>,
    },
    SymplecticBasis {
        form: FormExpr,
        basis: String,
        value: String,
    },
    Siegel {
        periods: String,
        form: FormExpr,
    },
    Theta {
        #[serde(default)]
        siegel: Option<String>,
        #[serde(default)]
        periods: Option<String>,
        #[serde(default)]
        form: Option<FormExpr>,
        vanishing: usize,
        threshold: String,
    },
    Elliptic {
        lattice: String,
        rel_tol: String,
        j: StrComplex,
        #[serde(default)]
        c4: Option<StrComplex>,
        #[serde(default)]
        c6: Option<StrComplex>,
    },
    TraceForm {
        endo: String,
        det: String,
    },
    Quotient {
        form: FormExpr,
        torsion: Vec<String>,
        group_order: String,
        #[serde(default)]
        invariant_factors: Option<Vec<String>>,
        #[serde(default)]
        scalar: Option<ScalarSpec>,
        #[serde(default)]
        degree_relation: Option<bool>,
        #[serde(default)]
        lattice: Option<String>,
    },
    Igusa {
        curve: String,
        #[serde(default)]
        value: Option<[String; 3]>,
    },
    IgusaDistinct {
        curves: Vec<String>,
    },
    Weilres {
        action: String,
        form_u: String,
        residual_max: String,
    },
    Frobenius {
        curve: String,
        p: u64,
        charpoly: [String; 5],
    },
    CountPoints {
        curve: String,
        p: u64,
        k: u32,
        value: String,
    },
    Disambiguate {
        check: usize,
        selected: String,
    },
}

impl Check {
    pub fn op(&self) -> &'static str {
        match self {
            Check::Type { .. } => "type",
            Check::Pfaffian { .. } => "pfaffian",
            Check::Form { .. } => "form",
            Check::Twist { .. } => "twist",
            Check::Units { .. } => "units",
            Check::Classify { .. } => "classify",
            Check::PrincipalCheck { .. } => "principal-check",
            Check::SymplecticBasis { .. } => "symplectic-basis",
            Check::Siegel { .. } => "siegel",
            Check::Theta { .. } => "theta",
            Check::Elliptic { .. } => "elliptic",
            Check::TraceForm { .. } => "trace-form",
            Check::Quotient { .. } => "quotient",
            Check::Igusa { .. } => "igusa",
            Check::IgusaDistinct { .. } => "igusa-distinct",
            Check::Weilres { .. } => "weilres",
            Check::Frobenius { .. } => "frobenius",
            Check::CountPoints { .. } => "count-points",
            Check::Disambiguate { .. } => "disambiguate",
        }
    }
}

/// Malformed fixture; `pointer` is a JSON pointer into the document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaError {
    pub pointer: String,
    pub message: String,
}

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let at = if self.pointer.is_empty() { "/" } else { &self.pointer };
        write!(f, "schema error at {at}: {}", self.message)
    }
}

impl std::error::Error for SchemaError {}

fn schema_err(pointer: impl Into<String>, message: impl Into<String>) -> SchemaError {
    SchemaError { pointer: pointer.into(), message: message.into() }
}

fn to_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

pub fn parse_fixture(text: &str) -> Result<Fixture, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let fx: Fixture = serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = to_pointer(e.path());
        schema_err(pointer, e.inner().to_string())
    })?;
    if fx.schema != SCHEMA_VERSION {
        return Err(schema_err("/schema", format!("unsupported schema version {}", fx.schema)));
    }
    Ok(fx)
}

pub fn load_fixture(path: &Path) -> Result<Fixture, SchemaError> {
    let text = std::fs::read_to_string(path).map_err(|e| schema_err("", format!("{}: {e}", path.display())))?;
    parse_fixture(&text)
}

pub fn rational(s: &str) -> Result<Rational, String> {
    Rational::from_str(s.trim()).map_err(|_| format!("not a rational number: {s:?}"))
}

pub fn integer(s: &str) -> Result<Integer, String> {
    Integer::from_str(s.trim()).map_err(|_| format!("not an integer: {s:?}"))
}

pub fn rat_matrix(m: &StrMatrix) -> Result<RatMatrix, String> {
    let n = m.first().map_or(0, |r| r.len());
    if m.iter().any(|r| r.len() != n) {
        return Err("ragged matrix".into());
    }
    let rows = m.iter().map(|r| r.iter().map(|s| rational(s)).collect()).collect::<Result<Vec<Vec<_>>, _>>()?;
    Ok(RatMatrix::from_rows(rows))
}

pub fn int_matrix(m: &StrMatrix) -> Result<IntMatrix, String> {
    rat_matrix(m)?.to_integer().ok_or_else(|| "matrix is not integral".into())
}

pub fn complex(prec: u32, z: &StrComplex) -> Result<Complex, String> {
    parse_complex(prec, &z[0], &z[1]).ok_or_else(|| format!("not a complex number: [{:?}, {:?}]", z[0], z[1]))
}

pub fn complex_matrix(prec: u32, m: &[Vec<StrComplex>]) -> Result<CMat, String> {
    let rows = m.iter().map(|r| r.iter().map(|z| complex(prec, z)).collect()).collect::<Result<Vec<Vec<_>>, _>>()?;
    Ok(CMat::from_rows(prec, rows))
}

pub fn element(e: &ElementSpec) -> Result<OrderElement, String> {
    Ok(OrderElement::new(integer(&e.a)?, integer(&e.b)?))
}

impl Fixture {
    pub fn order(&self) -> Result<QuadOrder, String> {
        QuadOrder::new(self.order.disc, self.order.conductor).map_err(|e| e.to_string())
    }

    pub fn form_matrix(&self, name: &str) -> Result<RatMatrix, String> {
        rat_matrix(self.forms.get(name).ok_or_else(|| format!("unknown form {name:?}"))?)
    }

    pub fn endo(&self, name: &str) -> Result<(OrderElement, IntMatrix), String> {
        let e = self.endomorphisms.get(name).ok_or_else(|| format!("unknown endomorphism {name:?}"))?;
        Ok((element(&e.element)?, int_matrix(&e.matrix)?))
    }

    /// ρ(ω) = (M − a)/b from the first endomorphism with b = ±1.
    pub fn rho_omega(&self) -> Result<IntMatrix, String> {
        for name in self.endomorphisms.keys() {
            let (t, m) = self.endo(name)?;
            if t.b == 1 || t.b == -1 {
                let n = m.nrows();
                let shifted = m.sub(&IntMatrix::identity(n).scale(&t.a));
                return Ok(if t.b == 1 { shifted } else { shifted.neg() });
            }
        }
        Err("no endomorphism a + b·ω with b = ±1 to fix the action".into())
    }

    pub fn sublattice(&self, name: &str) -> Result<RatMatrix, String> {
        rat_matrix(self.sublattices.get(name).ok_or_else(|| format!("unknown sublattice {name:?}"))?)
    }

    pub fn form(&self, e: &FormExpr) -> Result<AlternatingForm, String> {
        let mut m = self.form_matrix(&e.name)?;
        let basis = e.restrict.as_deref().map(|r| self.sublattice(r)).transpose()?;
        if let Some(b) = &basis {
            m = b.mul(&m).mul(&b.transpose());
        }
        for t in &e.times {
            let mut a = self.endo(t)?.1.to_rational();
            if let Some(b) = &basis {
                let binv = b.inverse().ok_or("sublattice basis is singular")?;
                a = binv.transpose().mul(&a).mul(&b.transpose());
            }
            m = m.mul(&a);
        }
        if let Some(s) = &e.scale {
            m = m.scale(&rational(s)?);
        }
        AlternatingForm::new(m).map_err(|err| format!("{}: {err}", describe(e)))
    }

    pub fn periods(&self, name: &str, prec: u32) -> Result<PeriodMatrix, String> {
        let spec = self.periods.get(name).ok_or_else(|| format!("unknown periods {name:?}"))?;
        let mut omega = complex_matrix(prec, &spec.omega)?;
        if let Some(b) = &spec.basis {
            // Ω_δ = Ω·Sᵀ, so Ω = Ω_δ·S⁻ᵀ
            let s = self.basis_changes.get(b).ok_or_else(|| format!("unknown basis change {b:?}"))?;
            let inv = int_matrix(s)?.to_rational().transpose().inverse().ok_or("basis change is singular")?;
            let rows = inv
                .to_rows()
                .into_iter()
                .map(|r| r.into_iter().map(|q| Complex::with_val(prec, (Float::with_val(prec, &q), 0))).collect())
                .collect();
            omega = omega.mul(&CMat::from_rows(prec, rows));
        }
        PeriodMatrix::new(omega).map_err(|e| e.to_string())
    }

    pub fn curve(&self, name: &str) -> Result<SexticCurve, String> {
        let c = self.curves.get(name).ok_or_else(|| format!("unknown curve {name:?}"))?;
        curve_from_strings(&c.f)
    }

    pub fn torsion_vector(&self, expr: &str) -> Result<Vec<Rational>, String> {
        let mut acc: Option<Vec<Rational>> = None;
        for (sign, term) in split_terms(expr) {
            let (k, name) = match term.split_once('*') {
                Some((k, name)) => (rational(k)?, name.trim()),
                None => (Rational::from(1), term.trim()),
            };
            let v = self.torsion.get(name).ok_or_else(|| format!("unknown torsion point {name:?}"))?;
            let v = v.iter().map(|s| rational(s)).collect::<Result<Vec<_>, _>>()?;
            let k = Rational::from(&k * sign);
            let sum = match acc {
                None => v.into_iter().map(|x| x * &k).collect(),
                Some(a) => a.into_iter().zip(v).map(|(x, y)| x + y * &k).collect(),
            };
            acc = Some(sum);
        }
        acc.ok_or_else(|| format!("empty torsion expression {expr:?}"))
    }

    pub fn descent(&self, prec: u32) -> Result<IsogenyDescent, String> {
        let d = self.descent.as_ref().ok_or("fixture has no descent data")?;
        let a = Float::with_val(prec, rational(&d.lambda.a)?);
        let b = Float::with_val(prec, rational(&d.lambda.b)?);
        let root = Float::with_val(prec, rational(&d.lambda.d)?).sqrt();
        let lambda = Complex::with_val(prec, (a + b * root, 0));
        let w1 = complex(prec, &d.w1)?;
        let w2 = complex(prec, &d.w2)?;
        let s = |i: usize, w: &Complex| -> Result<Complex, String> {
            let k = Float::with_val(prec, rational(&d.sigma_scale[i])?);
            Ok(Complex::with_val(prec, &lambda * w) * k)
        };
        Ok(IsogenyDescent { lattice_sigma: [s(0, &w1)?, s(1, &w2)?], lambda, degree: d.degree, lattice: [w1, w2] })
    }

    pub fn elliptic(&self, index: usize) -> Result<(&FfieldSpec, EllipticOverQuadratic), String> {
        let spec = self.ffield.get(index).ok_or_else(|| format!("no finite-field check #{index}"))?;
        let small = |s: &str| integer(s)?.to_i64().ok_or_else(|| format!("coefficient {s} too large"));
        let e = EllipticOverQuadratic {
            a: (small(&spec.elliptic.a[0])?, small(&spec.elliptic.a[1])?),
            b: (small(&spec.elliptic.b[0])?, small(&spec.elliptic.b[1])?),
            d: spec.d,
        };
        Ok((spec, e))
    }
}

pub fn curve_from_strings(f: &[String]) -> Result<SexticCurve, String> {
    if f.len() != 7 {
        return Err(format!("curve needs 7 coefficients c0..c6, got {}", f.len()));
    }
    let c: Vec<Rational> = f.iter().map(|s| rational(s)).collect::<Result<_, _>>()?;
    let arr: [Rational; 7] = c.try_into().expect("length checked");
    SexticCurve::new(arr).map_err(|e| e.to_string())
}

fn split_terms(expr: &str) -> Vec<(i32, String)> {
    let mut out = Vec::new();
    let mut sign = 1;
    let mut cur = String::new();
    for ch in expr.chars() {
        if (ch == '+' || ch == '-') && !cur.trim().is_empty() {
            out.push((sign, std::mem::take(&mut cur)));
            sign = if ch == '-' { -1 } else { 1 };
        } else if ch == '-' && cur.trim().is_empty() {
            sign = -sign;
        } else if ch != '+' {
            cur.push(ch);
        }
    }
    if !cur.trim().is_empty() {
        out.push((sign, cur));
    }
    out
}

pub fn describe(e: &FormExpr) -> String {
    let mut s = e.name.clone();
    if let Some(r) = &e.restrict {
        s = format!("{s}|{r}");
    }
    for t in &e.times {
        s.push('·');
        s.push_str(t);
    }
    if let Some(k) = &e.scale {
        s = format!("{k}·{s}");
    }
    s
}

/// Violated invariants of a parsed fixture; empty means valid.
pub fn validate_fixture(fx: &Fixture) -> Vec<String> {
    let mut v = Vec::new();
    let order = match fx.order() {
        Ok(o) => Some(o),
        Err(e) => {
            v.push(format!("/order: {e}"));
            None
        }
    };
    for (name, m) in &fx.forms {
        match rat_matrix(m) {
            Err(e) => v.push(format!("/forms/{name}: {e}")),
            Ok(m) if !m.is_square() => v.push(format!("/forms/{name}: not square")),
            Ok(m) if !m.is_skew() => v.push(format!("/forms/{name}: not alternating")),
            Ok(_) => {}
        }
    }
    if let (Some(o), false) = (&order, fx.endomorphisms.is_empty()) {
        match fx.rho_omega() {
            Err(e) => v.push(format!("/endomorphisms: {e}")),
            Ok(r) => {
                let n = r.nrows();
                let (tr, nm) = (o.tr().clone(), o.nm().clone());
                let residual = r.mul(&r).sub(&r.scale(&tr)).add(&IntMatrix::identity(n).scale(&nm));
                if !residual.is_zero() {
                    v.push(format!("/endomorphisms: ρ(ω) fails its minimal polynomial, residual {residual}"));
                }
                for (name, spec) in &fx.endomorphisms {
                    match fx.endo(name) {
                        Err(e) => v.push(format!("/endomorphisms/{name}: {e}")),
                        Ok((t, m)) => {
                            let expect = IntMatrix::identity(n).scale(&t.a).add(&r.scale(&t.b));
                            if m != expect {
                                v.push(format!(
                                    "/endomorphisms/{name}: matrix is not {}+{}·ρ(ω)",
                                    spec.element.a, spec.element.b
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    for (name, m) in &fx.basis_changes {
        match int_matrix(m) {
            Err(e) => v.push(format!("/basis_changes/{name}: {e}")),
            Ok(m) if !m.is_unimodular() => v.push(format!("/basis_changes/{name}: not unimodular")),
            Ok(_) => {}
        }
    }
    for (name, m) in &fx.sublattices {
        match rat_matrix(m) {
            Err(e) => v.push(format!("/sublattices/{name}: {e}")),
            Ok(m) if m.inverse().is_none() => v.push(format!("/sublattices/{name}: singular basis")),
            Ok(_) => {}
        }
    }
    for (name, c) in &fx.curves {
        if let Err(e) = curve_from_strings(&c.f) {
            v.push(format!("/curves/{name}: {e}"));
        }
    }
    for (name, t) in &fx.torsion {
        if let Err(e) = t.iter().map(|s| rational(s)).collect::<Result<Vec<_>, _>>() {
            v.push(format!("/torsion/{name}: {e}"));
        }
    }
    for (i, f) in fx.ffield.iter().enumerate() {
        for c in &f.candidates {
            if !fx.curves.contains_key(c) {
                v.push(format!("/ffield/{i}: unknown candidate curve {c:?}"));
            }
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torsion_terms() {
        assert_eq!(split_terms("D5-Dinf"), vec![(1, "D5".into()), (-1, "Dinf".into())]);
        assert_eq!(split_terms("-2*D7 + D5"), vec![(-1, "2*D7 ".into()), (1, " D5".into())]);
        assert_eq!(split_terms("4*Dinf"), vec![(1, "4*Dinf".into())]);
    }

    #[test]
    fn exact_strings() {
        assert_eq!(rational(" -3/6 ").unwrap(), Rational::from((-1, 2)));
        assert!(rational("0.5").is_err());
        assert!(integer("1/2").is_err());
        assert!(int_matrix(&vec![vec!["1/2".into()]]).is_err());
        assert!(rat_matrix(&vec![vec!["1".into()], vec![]]).is_err());
    }

    #[test]
    fn form_expressions() {
        let text = r#"{"schema":1,"name":"t","order":{"disc":12,"conductor":1},
            "forms":{"J":[["0","0","1","0"],["0","0","0","1"],["-1","0","0","0"],["0","-1","0","0"]]},
            "endomorphisms":{"w":{"element":{"a":"0","b":"1"},
                "matrix":[["0","3","0","0"],["1","0","0","0"],["0","0","0","1"],["0","0","3","0"]]}},
            "expected":[]}"#;
        let fx = parse_fixture(text).unwrap();
        assert!(validate_fixture(&fx).is_empty());
        let e = FormExpr {
            name: "J".into(),
            times: vec!["w".into(), "w".into()],
            scale: Some("1/3".into()),
            ..Default::default()
        };
        assert_eq!(fx.form(&e).unwrap().matrix(), &fx.form_matrix("J").unwrap());
        assert_eq!(describe(&e), "1/3·J·w·w");
    }
}
