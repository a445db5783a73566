use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polkit::exact_forms::{pfaffian, primitive_part, symplectic_normal_form, AlternatingForm};
use polkit::ffield_verify::{count_points_genus2_with, disambiguate_sign, frobenius_data};
use polkit::par::{with_jobs, Exec};
use polkit::polarization_kit::{
    find_module_structure, is_principally_polarizable, trace_degree_one_form, twist_form, Principality,
};
use polkit::quad_order::{fundamental_unit, polarization_classes, QuadOrder};
use polkit::theta_igusa::{curve_invariants, even_theta_nulls_with, verdict_from_nulls, SexticCurve};
use polkit::torus_analytic::{quotient_by_torsion, weil_restriction_lattice, TorsionSubgroup};
use polkit_cli::checks::{self, Settings};
use polkit_cli::fixture::{self, Fixture, FormExpr};
use polkit_cli::report::RunReport;
use rug::Rational;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "polkit", version, about = "Polarizations on abelian surfaces of GL2-type")]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 128)]
    prec: u32,
    /// Target digits for theta constants.
    #[arg(long, global = true, default_value_t = 30)]
    digits: u32,
    /// Siegel-point tolerance, e.g. 1e-4, 10^-4 or 1/10000.
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Machine-readable output: one JSON object.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for theta and point counting (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FixtureArg {
    #[arg(long)]
    fixture: PathBuf,
}

#[derive(Args, Clone)]
struct FormArgs {
    /// Named form of the fixture.
    #[arg(long, default_value = "E")]
    form: String,
    /// Right-multiply by named endomorphisms, in order.
    #[arg(long = "times")]
    times: Vec<String>,
    /// Rational scale factor.
    #[arg(long)]
    scale: Option<String>,
    /// Restrict to a named sublattice first.
    #[arg(long)]
    restrict: Option<String>,
}

impl FormArgs {
    fn expr(&self) -> FormExpr {
        FormExpr {
            name: self.form.clone(),
            restrict: self.restrict.clone(),
            times: self.times.clone(),
            scale: self.scale.clone(),
        }
    }
}

#[derive(Args, Clone)]
struct CurveArgs {
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// Named curve of the fixture.
    #[arg(long)]
    curve: Option<String>,
    /// Coefficients c0,...,c6 of y^2 = f(x).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coeffs: Vec<String>,
}

#[derive(Args, Clone)]
struct PointArgs {
    #[command(flatten)]
    fx: FixtureArg,
    /// Named Siegel point.
    #[arg(long)]
    siegel: Option<String>,
    /// Named periods, used with --form.
    #[arg(long)]
    periods: Option<String>,
    #[arg(long)]
    form: Option<String>,
    #[arg(long = "times")]
    times: Vec<String>,
    #[arg(long)]
    scale: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Polarization type (d1,d2) of a form.
    Type {
        #[command(flatten)]
        fx: FixtureArg,
        #[command(flatten)]
        form: FormArgs,
        /// Divide by the gcd of the entries first.
        #[arg(long)]
        primitive: bool,
    },
    Pfaffian {
        #[command(flatten)]
        fx: FixtureArg,
        #[command(flatten)]
        form: FormArgs,
    },
    /// Symplectic basis; with --basis also checks a given one.
    SymplecticBasis {
        #[command(flatten)]
        fx: FixtureArg,
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        basis: Option<String>,
    },
    /// Fundamental unit and the number of polarization classes.
    Units {
        #[arg(long)]
        fixture: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        disc: Option<i64>,
        #[arg(long, default_value_t = 1)]
        conductor: i64,
    },
    /// Principal polarizations up to isomorphism, with verdicts when periods are given.
    Classify {
        #[command(flatten)]
        fx: FixtureArg,
        #[arg(long)]
        form: Option<String>,
        #[arg(long = "times")]
        times: Vec<String>,
        #[arg(long)]
        scale: Option<String>,
        #[arg(long)]
        periods: Option<String>,
        #[arg(long = "siegel")]
        siegel: Vec<String>,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// E·ρ(a + bω).
    Twist {
        #[command(flatten)]
        fx: FixtureArg,
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    PrincipalCheck {
        #[command(flatten)]
        fx: FixtureArg,
        #[command(flatten)]
        form: FormArgs,
    },
    /// Degree-one trace form of the module structure.
    TraceForm {
        #[command(flatten)]
        fx: FixtureArg,
    },
    /// Quotient by a torsion subgroup given by named points, e.g. "D5" "D5-Dinf" "4*Dinf".
    Quotient {
        #[command(flatten)]
        fx: FixtureArg,
        #[command(flatten)]
        form: FormArgs,
        #[arg(long = "torsion", required = true, allow_hyphen_values = true)]
        torsion: Vec<String>,
    },
    /// Weil restriction lattice from the descent data.
    Weilres {
        #[command(flatten)]
        fx: FixtureArg,
        #[arg(long, default_value_t = 1e-6)]
        residual_max: f64,
    },
    Siegel {
        #[command(flatten)]
        pt: PointArgs,
    },
    /// The ten even theta constants.
    Theta {
        #[command(flatten)]
        pt: PointArgs,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Jacobian or product of elliptic curves.
    SplitVerdict {
        #[command(flatten)]
        pt: PointArgs,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Absolute invariants (i1, i2, i3).
    Igusa {
        #[command(flatten)]
        curve: CurveArgs,
    },
    CountPoints {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Characteristic polynomial of Frobenius from #C(F_p), #C(F_p^2).
    Frobenius {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        p: u64,
    },
    /// Sign choice between two candidate curves by reduction mod p.
    Disambiguate {
        #[command(flatten)]
        fx: FixtureArg,
        /// Index into the fixture's finite-field checks.
        #[arg(long, default_value_t = 0)]
        check: usize,
    },
    /// Runs every expected check of a fixture.
    VerifyFixture {
        #[command(flatten)]
        fx: FixtureArg,
        /// Compare with a committed golden report.
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Regenerate the golden report at this path.
        #[arg(long)]
        write_golden: Option<PathBuf>,
    },
}

enum Failure {
    /// Exit 1.
    Check(String),
    /// Exit 2.
    Input(String),
}

type Res<T> = Result<T, Failure>;

struct Output {
    text: String,
    json: Value,
    ok: bool,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output { text, json, ok: true }
    }
}

fn check_err(e: impl ToString) -> Failure {
    Failure::Check(e.to_string())
}

fn input_err(e: impl ToString) -> Failure {
    Failure::Input(e.to_string())
}

fn parse_tol(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some(exp) = s.strip_prefix("10^") {
        return exp.trim_matches(|c| c == '(' || c == ')').parse::<f64>().ok().map(|e| 10f64.powf(e));
    }
    s.parse::<f64>().ok().or_else(|| s.parse::<Rational>().ok().map(|q| q.to_f64()))
}

fn load(path: &Path) -> Res<Fixture> {
    let fx = fixture::load_fixture(path).map_err(input_err)?;
    let violations = fixture::validate_fixture(&fx);
    if !violations.is_empty() {
        return Err(Failure::Input(format!("invalid fixture {}:\n  {}", path.display(), violations.join("\n  "))));
    }
    Ok(fx)
}

fn curve(args: &CurveArgs) -> Res<(String, SexticCurve)> {
    match (&args.curve, args.coeffs.is_empty()) {
        (Some(name), true) => {
            let path = args.fixture.as_ref().ok_or_else(|| input_err("--curve needs --fixture"))?;
            let fx = load(path)?;
            Ok((name.clone(), fx.curve(name).map_err(input_err)?))
        }
        (None, false) => {
            let c = fixture::curve_from_strings(&args.coeffs).map_err(input_err)?;
            Ok((c.to_string(), c))
        }
        _ => Err(input_err("give exactly one of --curve (with --fixture) or --coeffs")),
    }
}

fn point(pt: &PointArgs, s: &Settings) -> Res<(Fixture, polkit::torus_analytic::SiegelPoint)> {
    let fx = load(&pt.fx.fixture)?;
    let form = pt.form.as_ref().map(|f| FormExpr {
        name: f.clone(),
        restrict: None,
        times: pt.times.clone(),
        scale: pt.scale.clone(),
    });
    let z = checks::resolve_siegel(&fx, pt.siegel.as_deref(), pt.periods.as_deref(), form.as_ref(), s)
        .map_err(check_err)?;
    Ok((fx, z))
}

/// The form to classify: the given one, else the primitive part of E (or of
/// the first form) or a principal twist of it.
fn principal_form(fx: &Fixture, form: Option<FormExpr>) -> Res<AlternatingForm> {
    if let Some(f) = form {
        return fx.form(&f).map_err(input_err);
    }
    let name = if fx.forms.contains_key("E") { "E" } else { fx.forms.keys().next().map_or("E", |k| k.as_str()) };
    let e = fx.form(&FormExpr { name: name.into(), ..FormExpr::default() }).map_err(input_err)?;
    let (e, _) = primitive_part(&e).map_err(check_err)?;
    let data = checks::lattice_data(fx, e).map_err(input_err)?;
    match is_principally_polarizable(&data).map_err(check_err)? {
        Principality { witness: Some(w), .. } => Ok(w.form),
        p => {
            Err(Failure::Check(format!("{name} has primitive degree {} and no principal twist; pass --form", p.degree)))
        }
    }
}

fn run(cli: &Cli, s: &Settings) -> Res<Output> {
    match &cli.command {
        Command::Type { fx, form, primitive } => {
            let f = load(&fx.fixture)?;
            let t = checks::form_type_string(&f, &form.expr(), *primitive).map_err(check_err)?;
            Ok(Output::ok(t.clone(), json!({"form": fixture::describe(&form.expr()), "type": t})))
        }
        Command::Pfaffian { fx, form } => {
            let f = load(&fx.fixture)?;
            let pf = pfaffian(&f.form(&form.expr()).map_err(input_err)?).map_err(check_err)?;
            Ok(Output::ok(pf.to_string(), json!({"form": fixture::describe(&form.expr()), "pfaffian": pf.to_string()})))
        }
        Command::SymplecticBasis { fx, form, basis } => {
            let f = load(&fx.fixture)?;
            let a = f.form(&form.expr()).map_err(input_err)?;
            let (own, t) = symplectic_normal_form(&a).map_err(check_err)?;
            let mut text = format!("type {t}\nS =\n{}", own.matrix());
            let mut v = json!({"type": t.to_string(), "basis": own.matrix().to_string(), "verified": true});
            let mut ok = polkit::exact_forms::check_symplectic(&own, &a, &t);
            if let Some(b) = basis {
                let m = fixture::int_matrix(
                    f.basis_changes.get(b).ok_or_else(|| input_err(format!("unknown basis {b:?}")))?,
                )
                .map_err(input_err)?;
                let given = polkit::exact_forms::BasisChange::new(m).map_err(input_err)?;
                let good = polkit::exact_forms::check_symplectic(&given, &a, &t);
                text.push_str(&format!("\nbasis {b}: {}", if good { "symplectic" } else { "NOT symplectic" }));
                v["given_basis"] = json!(good);
                ok &= good;
            }
            v["verified"] = json!(ok);
            Ok(Output { text, json: v, ok })
        }
        Command::Units { fixture: path, disc, conductor } => {
            let o = match (path, disc) {
                (Some(p), None) => load(p)?.order().map_err(input_err)?,
                (None, Some(d)) => QuadOrder::new(*d, *conductor).map_err(input_err)?,
                _ => return Err(input_err("give --fixture or --disc")),
            };
            let u = fundamental_unit(&o).map_err(check_err)?;
            let pi = polarization_classes(&o).order();
            let unit = o.display(&u.fundamental_unit);
            let text = format!("ε = {unit}; N(ε) = {}; π = {pi}", u.norm_of_fundamental_unit);
            Ok(Output::ok(text, json!({"unit": unit, "norm": u.norm_of_fundamental_unit, "pi": pi})))
        }
        Command::Classify { fx, form, times, scale, periods, siegel, threshold } => {
            let f = load(&fx.fixture)?;
            let expr = form.as_ref().map(|n| FormExpr {
                name: n.clone(),
                restrict: None,
                times: times.clone(),
                scale: scale.clone(),
            });
            let expr = principal_form(&f, expr)?;
            let sp = (!siegel.is_empty()).then_some(siegel.as_slice());
            let (report, o) = checks::classify(&f, expr, periods.as_deref(), sp, *threshold, s).map_err(check_err)?;
            let v = checks::classification_json(&report, &o);
            let reps: Vec<String> = report.representatives.iter().map(|r| o.display(&r.element)).collect();
            let mut text = format!("π = {}; representatives: {}", report.pi_count, reps.join(", "));
            if let Some(verdicts) = &report.verdicts {
                let vs: Vec<String> = verdicts.iter().map(|x| x.to_string()).collect();
                text.push_str(&format!(
                    "\nverdicts: {}; τ = {}; σ = {}",
                    vs.join(", "),
                    report.tau_count.unwrap_or(0),
                    report.sigma_count.unwrap_or(0)
                ));
            }
            Ok(Output::ok(text, v))
        }
        Command::Twist { fx, form, a, b } => {
            let f = load(&fx.fixture)?;
            let data = checks::lattice_data(&f, f.form(&form.expr()).map_err(input_err)?).map_err(input_err)?;
            let t = fixture::element(&fixture::ElementSpec { a: a.clone(), b: b.clone() }).map_err(input_err)?;
            let e = twist_form(&data, &t, &Rational::from(1)).map_err(check_err)?;
            let ty = polkit::polarization_kit::form_type(&e).map_err(check_err)?;
            let text = format!("{}\ntype {ty}", e.matrix());
            Ok(Output::ok(text, json!({"form": e.matrix().to_string(), "type": ty.to_string()})))
        }
        Command::PrincipalCheck { fx, form } => {
            let f = load(&fx.fixture)?;
            let data = checks::lattice_data(&f, f.form(&form.expr()).map_err(input_err)?).map_err(input_err)?;
            let p = is_principally_polarizable(&data).map_err(check_err)?;
            let w = p.witness.as_ref().map(|w| data.order().display(&w.element));
            let text = match &w {
                Some(w) => format!("principal twist exists: degree {}, witness {w}", p.degree),
                None => format!("no principal twist: degree {}", p.degree),
            };
            Ok(Output::ok(text, json!({"principal": p.principal, "degree": p.degree.to_string(), "witness": w})))
        }
        Command::TraceForm { fx } => {
            let f = load(&fx.fixture)?;
            let o = f.order().map_err(input_err)?;
            let rho = f.rho_omega().map_err(input_err)?;
            let m = find_module_structure(&o, &rho, 2).ok_or_else(|| check_err("no module structure found"))?;
            let e = trace_degree_one_form(&m);
            let det = e.det();
            let text = format!("{}\ndet = {det}", e.matrix());
            Ok(Output::ok(text, json!({"form": e.matrix().to_string(), "det": det.to_string()})))
        }
        Command::Quotient { fx, form, torsion } => {
            let f = load(&fx.fixture)?;
            let a = f.form(&form.expr()).map_err(input_err)?;
            let gens = torsion.iter().map(|t| f.torsion_vector(t)).collect::<Result<Vec<_>, _>>().map_err(input_err)?;
            let g = TorsionSubgroup::new(a.rank(), gens).map_err(input_err)?;
            let q = quotient_by_torsion(&a, &g).map_err(check_err)?;
            let factors: Vec<String> = g.invariant_factors().iter().map(|x| x.to_string()).collect();
            let ty = polkit::polarization_kit::form_type(&q.scaled).map_err(check_err)?;
            let text = format!(
                "#G = {} (invariant factors {}); #G·E type {ty}; degree relation {}",
                q.group_order,
                factors.join(", "),
                if q.degree_relation_holds { "holds" } else { "FAILS" }
            );
            Ok(Output {
                text,
                json: json!({
                    "group_order": q.group_order.to_string(),
                    "invariant_factors": factors,
                    "type": ty.to_string(),
                    "basis": q.basis.to_string(),
                    "degree_relation": q.degree_relation_holds,
                }),
                ok: q.degree_relation_holds,
            })
        }
        Command::Weilres { fx, residual_max } => {
            let f = load(&fx.fixture)?;
            let w =
                weil_restriction_lattice(&f.descent(s.prec).map_err(input_err)?, *residual_max).map_err(check_err)?;
            let action = w.data.action();
            let text = format!("action of ω:\n{action}\nresidual {:.3e}", w.residual);
            Ok(Output::ok(text, json!({"action": action.to_string(), "residual": format!("{:.3e}", w.residual)})))
        }
        Command::Siegel { pt } => {
            let (_, z) = point(pt, s)?;
            Ok(Output::ok(z.z().to_string(), checks::siegel_json(&z)))
        }
        Command::Theta { pt, threshold } => {
            let (_, z) = point(pt, s)?;
            let cfg = s.theta_config(*threshold);
            let nulls = even_theta_nulls_with(&z, &cfg).map_err(check_err)?;
            let vals = checks::theta_values_json(&nulls, 15);
            let mut text = String::new();
            for v in vals.as_array().into_iter().flatten() {
                text.push_str(&format!(
                    "{} {} (ratio {})\n",
                    v["char"].as_str().unwrap_or(""),
                    v["value"].as_str().unwrap_or(""),
                    v["ratio"].as_str().unwrap_or("")
                ));
            }
            let mut summary = checks::theta_json(&nulls, cfg.threshold());
            text.push_str(&format!("vanishing below {:.1e}: {}", cfg.threshold(), summary["vanishing"]));
            summary["values"] = vals;
            Ok(Output::ok(text, summary))
        }
        Command::SplitVerdict { pt, threshold } => {
            let (_, z) = point(pt, s)?;
            let cfg = s.theta_config(*threshold);
            let nulls = even_theta_nulls_with(&z, &cfg).map_err(check_err)?;
            let v = verdict_from_nulls(&nulls, cfg.threshold()).map_err(check_err)?;
            Ok(Output::ok(
                v.to_string(),
                json!({"verdict": v.to_string(), "threshold": format!("{:.1e}", cfg.threshold())}),
            ))
        }
        Command::Igusa { curve: c } => {
            let (name, c) = curve(c)?;
            let inv = curve_invariants(&c).map_err(check_err)?;
            let triple = checks::rational_strings(&[inv.i1.clone(), inv.i2.clone(), inv.i3.clone()]);
            Ok(Output::ok(inv.to_string(), json!({"curve": name, "invariants": triple})))
        }
        Command::CountPoints { curve: c, p, k } => {
            let (name, c) = curve(c)?;
            let n = count_points_genus2_with(&c, *p, *k, s.exec).map_err(check_err)?;
            Ok(Output::ok(n.to_string(), json!({"curve": name, "p": p, "k": k, "count": n.to_string()})))
        }
        Command::Frobenius { curve: c, p } => {
            let (name, c) = curve(c)?;
            let f = frobenius_data(&c, *p, s.exec).map_err(check_err)?;
            let text = format!(
                "#C(F_p) = {}, #C(F_p^2) = {}; L-polynomial coefficients {:?}",
                f.counts.0, f.counts.1, f.charpoly
            );
            Ok(Output::ok(
                text,
                json!({"curve": name, "p": p, "counts": [f.counts.0, f.counts.1], "charpoly": f.charpoly}),
            ))
        }
        Command::Disambiguate { fx, check } => {
            let f = load(&fx.fixture)?;
            let (spec, e) = f.elliptic(*check).map_err(input_err)?;
            let c0 = f.curve(&spec.candidates[0]).map_err(input_err)?;
            let c1 = f.curve(&spec.candidates[1]).map_err(input_err)?;
            let ch = disambiguate_sign((&c0, &c1), &e, spec.p, s.exec).map_err(check_err)?;
            let name = &spec.candidates[ch.index];
            let text = format!("{name} (p = {}, √{} ≡ {} mod p)", spec.p, spec.d, ch.root);
            Ok(Output::ok(
                text,
                json!({"selected": name, "p": spec.p, "root": ch.root, "quartic": ch.quartic, "elliptic": ch.elliptic}),
            ))
        }
        Command::VerifyFixture { fx, golden, write_golden } => {
            let f = load(&fx.fixture)?;
            let report = checks::run_fixture(&f, s);
            verify_output(report, golden.as_deref(), write_golden.as_deref())
        }
    }
}

fn verify_output(report: RunReport, golden: Option<&Path>, write: Option<&Path>) -> Res<Output> {
    let mut text = report.to_text();
    let mut ok = report.all_passed();
    if let Some(path) = write {
        std::fs::write(path, report.golden_text()).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
        text.push_str(&format!("golden report written to {}\n", path.display()));
    }
    if let Some(path) = golden {
        let want = std::fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
        let got = report.golden_text();
        if want == got {
            text.push_str("golden report matches\n");
        } else {
            ok = false;
            let line = want
                .lines()
                .zip(got.lines())
                .position(|(a, b)| a != b)
                .unwrap_or(want.lines().count().min(got.lines().count()));
            text.push_str(&format!("golden report differs from {} at line {}\n", path.display(), line + 1));
        }
    }
    let json = serde_json::to_value(&report).expect("report serializes");
    Ok(Output { text: text.trim_end().to_string(), json, ok })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match cli.tol.as_deref().map(|t| parse_tol(t).ok_or(t)) {
        None => None,
        Some(Ok(t)) => Some(t),
        Some(Err(t)) => {
            eprintln!("error: cannot parse --tol {t:?}");
            return ExitCode::from(2);
        }
    };
    let settings = Settings {
        prec: cli.prec,
        digits: cli.digits,
        tol,
        exec: if cli.jobs == 1 { Exec::Sequential } else { Exec::Parallel },
    };
    let result = with_jobs(cli.jobs, || run(&cli, &settings));
    match result {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string(&out.json).expect("serializable"));
            } else {
                println!("{}", out.text);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_forms() {
        assert_eq!(parse_tol("1e-4"), Some(1e-4));
        assert!((parse_tol("10^-4").unwrap() - 1e-4).abs() < 1e-18);
        assert!((parse_tol("10^(-6)").unwrap() - 1e-6).abs() < 1e-20);
        assert_eq!(parse_tol("1/4"), Some(0.25));
        assert_eq!(parse_tol("tiny"), None);
    }
}
