use polkit::ffield_verify::*;
use polkit::par::Exec;
use polkit::theta_igusa::SexticCurve;
use polkit::Error;

fn plus() -> SexticCurve {
    SexticCurve::from_i64([377, 17238, 278850, 2170636, 8746257, 17307966, 12909572]).unwrap()
}

fn minus() -> SexticCurve {
    SexticCurve::from_i64([-377, -17238, -278850, -2170636, -8746257, -17307966, -12909572]).unwrap()
}

fn elliptic() -> EllipticOverQuadratic {
    EllipticOverQuadratic { a: (-9 * 767, -9 * 212), b: (-18 * 17225, -18 * 4778), d: 13 }
}

#[test]
fn quartics_at_23() {
    let fp = frobenius_data(&plus(), 23, Exec::Sequential).unwrap();
    assert_eq!(fp.charpoly, [1, -6, 55, -138, 529]);
    let fm = frobenius_data(&minus(), 23, Exec::Sequential).unwrap();
    assert_eq!(fm.charpoly, [1, 6, 55, 138, 529]);
    for r in square_roots_mod(13, 23) {
        let q = reduce_and_count_elliptic(&QuadFieldCurveReduction { curve: elliptic(), p: 23, root: r }).unwrap();
        assert_eq!(q, [1, -3, 23]);
        assert_eq!(square_of_quadratic(&q), fp.charpoly);
    }
}

#[test]
fn sign_choice_is_order_independent() {
    let (p, m) = (plus(), minus());
    let a = disambiguate_sign((&p, &m), &elliptic(), 23, Exec::Parallel).unwrap();
    let b = disambiguate_sign((&m, &p), &elliptic(), 23, Exec::Sequential).unwrap();
    assert_eq!(a.index, 0);
    assert_eq!(b.index, 1);
    assert_eq!(a.curve, p);
    assert_eq!(b.curve, p);
    assert_eq!(a.root, b.root);
}

#[test]
fn inert_prime() {
    // 13 is a non-residue mod 5
    let r = disambiguate_sign((&plus(), &minus()), &elliptic(), 5, Exec::Sequential);
    assert_eq!(r, Err(Error::Inert(13, 5)));
}

#[test]
fn functional_equation_and_weil_bound() {
    let curves = [[1, 3, 0, -2, 5, 0, 1], [42, -62, -7, 28, 3, -4, -1], [81, 0, 0, 162, 0, 0, -3]];
    for c in curves {
        let sc = SexticCurve::from_i64(c).unwrap();
        for p in [11u64, 13, 17, 19, 23, 29, 31, 37] {
            let Ok(f) = frobenius_data(&sc, p, Exec::Sequential) else { continue };
            let ch = f.charpoly;
            let pi = p as i64;
            // T⁴·P(p/T) = p²·P(T)
            assert_eq!(ch[3], pi * ch[1]);
            assert_eq!(ch[4], pi * pi * ch[0]);
            let e1 = -ch[1];
            assert!((e1 * e1) as f64 <= 16.0 * p as f64);
            let s1 = pi + 1 - f.counts.0 as i64;
            let s2 = pi * pi + 1 - f.counts.1 as i64;
            assert_eq!(s2, s1 * s1 - 2 * ch[2]);
        }
    }
}
