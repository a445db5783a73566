//! Finite-field checks: point counts, Frobenius polynomials and the choice
//! between twisted candidate curves.

use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::theta_igusa::SexticCurve;

/// Cap on the size of the field swept by brute-force counting.
pub const FIELD_CAP: u64 = 1_000_000;

fn is_odd_prime(p: u64) -> bool {
    p > 2 && p % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn reduce_int(x: &Integer, p: u64) -> u64 {
    Integer::from(x.mod_u(p as u32)).to_u64().expect("residue fits")
}

fn reduce_rat(x: &Rational, p: u64) -> Option<u64> {
    let d = reduce_int(x.denom(), p);
    (d != 0).then(|| reduce_int(x.numer(), p) * inv_mod(d, p) % p)
}

fn legendre(a: u64, p: u64) -> i64 {
    let a = a % p;
    if a == 0 {
        0
    } else if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// F_p or F_p² = F_p[t]/(t² − n) with n a non-residue.
#[derive(Clone, Copy, Debug)]
struct Field {
    p: u64,
    k: u32,
    n: u64,
}

type El = (u64, u64);

impl Field {
    fn new(p: u64, k: u32) -> Self {
        let n = (2..p).find(|&a| legendre(a, p) == -1).unwrap_or(0);
        Field { p, k, n }
    }

    fn size(&self) -> u64 {
        self.p.pow(self.k)
    }

    fn element(&self, idx: u64) -> El {
        (idx % self.p, idx / self.p)
    }

    fn add(&self, x: El, y: El) -> El {
        ((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }

    fn mul(&self, x: El, y: El) -> El {
        let p = self.p;
        ((x.0 * y.0 + self.n * (x.1 * y.1 % p)) % p, (x.0 * y.1 + x.1 * y.0) % p)
    }

    fn pow(&self, mut x: El, mut e: u64) -> El {
        let mut acc = (1, 0);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        acc
    }

    /// Quadratic character by Euler's criterion.
    fn chi(&self, x: El) -> i64 {
        if x == (0, 0) {
            return 0;
        }
        if self.pow(x, (self.size() - 1) / 2) == (1, 0) {
            1
        } else {
            -1
        }
    }

    fn eval(&self, coeffs: &[u64], x: El) -> El {
        coeffs.iter().rev().fold((0, 0), |acc, &c| self.add(self.mul(acc, x), (c, 0)))
    }
}

fn poly_trim(mut f: Vec<u64>) -> Vec<u64> {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let lead_inv = inv_mod(*b.last().expect("nonzero divisor"), p);
    while r.len() >= b.len() {
        let c = r[r.len() - 1] * lead_inv % p;
        let shift = r.len() - b.len();
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * bi % p) % p;
        }
        r = poly_trim(r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn poly_gcd_degree(a: Vec<u64>, b: Vec<u64>, p: u64) -> usize {
    let (mut a, mut b) = (poly_trim(a), poly_trim(b));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a.len().saturating_sub(1)
}

fn reduced_coeffs(c: &SexticCurve, p: u64) -> Result<Vec<u64>> {
    c.coeffs().iter().map(|x| reduce_rat(x, p).ok_or(Error::BadReduction(p))).collect()
}

/// Degree ≥ 5 and squarefree modulo p.
pub fn has_good_reduction(c: &SexticCurve, p: u64) -> bool {
    let Ok(f) = reduced_coeffs(c, p) else {
        return false;
    };
    let f = poly_trim(f);
    if f.len() < 6 {
        return false;
    }
    let df: Vec<u64> = f.iter().enumerate().skip(1).map(|(i, &a)| a * (i as u64 % p) % p).collect();
    poly_gcd_degree(f, df, p) == 0
}

fn check_field(p: u64, k: u32) -> Result<()> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let size = p.checked_pow(k).unwrap_or(u64::MAX);
    if !(1..=2).contains(&k) || size > FIELD_CAP {
        return Err(Error::FieldTooLarge(size));
    }
    Ok(())
}

pub fn count_points_genus2(c: &SexticCurve, p: u64, k: u32) -> Result<u64> {
    count_points_genus2_with(c, p, k, Exec::default())
}

/// Points on the smooth model over F_{p^k}: affine points plus 2, 1 or 0 at infinity.
pub fn count_points_genus2_with(c: &SexticCurve, p: u64, k: u32, exec: Exec) -> Result<u64> {
    check_field(p, k)?;
    if !has_good_reduction(c, p) {
        return Err(Error::BadReduction(p));
    }
    let f = poly_trim(reduced_coeffs(c, p)?);
    let field = Field::new(p, k);
    let affine = exec.sum_range(0, field.size(), |i| 1 + field.chi(field.eval(&f, field.element(i))));
    let infinity = if f.len() == 7 { 1 + field.chi((f[6], 0)) } else { 1 };
    Ok((affine + infinity) as u64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusData {
    pub p: u64,
    pub counts: (u64, u64),
    /// Coefficients of T⁴ − e1·T³ + e2·T² − p·e1·T + p², leading first.
    pub charpoly: [i64; 5],
}

/// e1 = s1, e2 = (s1² − s2)/2 with s_k = p^k + 1 − #C(F_{p^k}).
pub fn frobenius_charpoly_genus2(counts: (u64, u64), p: u64) -> Result<[i64; 5]> {
    let p = p as i64;
    let s1 = p + 1 - counts.0 as i64;
    let s2 = p * p + 1 - counts.1 as i64;
    let twice = s1 * s1 - s2;
    if twice % 2 != 0 {
        return Err(Error::NonIntegral);
    }
    let e2 = twice / 2;
    Ok([1, -s1, e2, -p * s1, p * p])
}

pub fn frobenius_data(c: &SexticCurve, p: u64, exec: Exec) -> Result<FrobeniusData> {
    let counts = (count_points_genus2_with(c, p, 1, exec)?, count_points_genus2_with(c, p, 2, exec)?);
    Ok(FrobeniusData { p, counts, charpoly: frobenius_charpoly_genus2(counts, p)? })
}

/// Square of T² − a·T + p.
pub fn square_of_quadratic(q: &[i64; 3]) -> [i64; 5] {
    let (b, c) = (q[1], q[2]);
    [1, 2 * b, b * b + 2 * c, 2 * b * c, c * c]
}

/// Elliptic curve y² = x³ + a·x + b over Q(√d), with a = a0 + a1√d and b = b0 + b1√d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticOverQuadratic {
    pub a: (i64, i64),
    pub b: (i64, i64),
    pub d: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadFieldCurveReduction {
    pub curve: EllipticOverQuadratic,
    pub p: u64,
    pub root: u64,
}

/// Roots r of r² ≡ d (mod p), increasing.
pub fn square_roots_mod(d: i64, p: u64) -> Vec<u64> {
    let dm = d.rem_euclid(p as i64) as u64;
    (0..p).filter(|r| r * r % p == dm).collect()
}

fn reduce_pair(x: (i64, i64), r: u64, p: u64) -> u64 {
    let pi = p as i64;
    (x.0.rem_euclid(pi) as u64 + x.1.rem_euclid(pi) as u64 * r) % p
}

/// T² − a_p·T + p for the reduction at the prime above p given by √d ↦ root.
pub fn reduce_and_count_elliptic(q: &QuadFieldCurveReduction) -> Result<[i64; 3]> {
    let p = q.p;
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    if p > FIELD_CAP {
        return Err(Error::FieldTooLarge(p));
    }
    if q.root * q.root % p != q.curve.d.rem_euclid(p as i64) as u64 {
        return Err(Error::Inert(q.curve.d, p));
    }
    let a = reduce_pair(q.curve.a, q.root, p);
    let b = reduce_pair(q.curve.b, q.root, p);
    if (4 * pow_mod(a, 3, p) + 27 * b * b % p).is_multiple_of(p) {
        return Err(Error::BadReduction(p));
    }
    let affine: i64 = (0..p).map(|x| 1 + legendre((x * x % p * x + a * x + b) % p, p)).sum();
    let ap = p as i64 + 1 - (affine + 1);
    Ok([1, -ap, p as i64])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignChoice {
    /// Index of the selected candidate in the input order.
    pub index: usize,
    pub curve: SexticCurve,
    /// Root of d mod p for which the match occurs.
    pub root: u64,
    pub quartic: [i64; 5],
    pub elliptic: [i64; 3],
}

impl Eq for SexticCurve {}

/// Selects the candidate whose quartic is the square of the elliptic quadratic at p.
pub fn disambiguate_sign(
    candidates: (&SexticCurve, &SexticCurve),
    curve: &EllipticOverQuadratic,
    p: u64,
    exec: Exec,
) -> Result<SignChoice> {
    let roots = square_roots_mod(curve.d, p);
    if roots.is_empty() {
        return Err(Error::Inert(curve.d, p));
    }
    let ell: Vec<(u64, [i64; 3])> = roots
        .iter()
        .map(|&root| Ok((root, reduce_and_count_elliptic(&QuadFieldCurveReduction { curve: curve.clone(), p, root })?)))
        .collect::<Result<_>>()?;
    let mut hits = Vec::new();
    for (index, c) in [candidates.0, candidates.1].into_iter().enumerate() {
        let quartic = frobenius_data(c, p, exec)?.charpoly;
        if let Some((root, e)) = ell.iter().find(|(_, e)| square_of_quadratic(e) == quartic) {
            hits.push(SignChoice { index, curve: c.clone(), root: *root, quartic, elliptic: *e });
        }
    }
    match hits.len() {
        0 => Err(Error::NoMatch),
        1 => Ok(hits.remove(0)),
        _ => Err(Error::BothMatch),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // independent count: enumerate (x, y) pairs directly over F_p
    fn naive_count(c: [i64; 7], p: u64) -> u64 {
        let pi = p as i64;
        let mut n = 0;
        for x in 0..pi {
            let fx = c.iter().rev().fold(0i64, |acc, &a| (acc * x + a).rem_euclid(pi));
            n += (0..pi).filter(|y| (y * y).rem_euclid(pi) == fx).count() as u64;
        }
        let lead = if c[6].rem_euclid(pi) != 0 { c[6] } else { 0 };
        let inf = if lead == 0 { 1 } else { (0..pi).filter(|y| (y * y - lead).rem_euclid(pi) == 0).count() as u64 };
        n + inf
    }

    #[test]
    fn x5_plus_1_over_f3() {
        let c = SexticCurve::from_i64([1, 0, 0, 0, 0, 1, 0]).unwrap();
        let n = count_points_genus2(&c, 3, 1).unwrap();
        assert_eq!(n, naive_count([1, 0, 0, 0, 0, 1, 0], 3));
    }

    #[test]
    fn counts_match_naive_for_small_primes() {
        let curves = [[1, 3, 0, -2, 5, 0, 1], [42, -62, -7, 28, 3, -4, -1], [2, 0, 1, 0, 0, 3, 0]];
        for c in curves {
            let sc = SexticCurve::from_i64(c).unwrap();
            for p in [5u64, 7, 11, 13, 17, 19, 23, 29, 31] {
                if let Ok(n) = count_points_genus2(&sc, p, 1) {
                    assert_eq!(n, naive_count(c, p), "{c:?} mod {p}");
                    let bound = 4.0 * (p as f64).sqrt();
                    assert!((n as f64 - (p + 1) as f64).abs() <= bound);
                }
            }
        }
    }

    #[test]
    fn trivial_charpoly() {
        assert_eq!(frobenius_charpoly_genus2((24, 530), 23).unwrap(), [1, 0, 0, 0, 529]);
        assert_eq!(frobenius_charpoly_genus2((24, 531), 23), Err(Error::NonIntegral));
    }

    #[test]
    fn elliptic_count() {
        let e = EllipticOverQuadratic { a: (0, 0), b: (1, 0), d: 1 };
        let q = reduce_and_count_elliptic(&QuadFieldCurveReduction { curve: e, p: 5, root: 1 }).unwrap();
        assert_eq!(q, [1, 0, 5]);
        let e = EllipticOverQuadratic { a: (0, 0), b: (1, 0), d: 2 };
        let r = reduce_and_count_elliptic(&QuadFieldCurveReduction { curve: e, p: 5, root: 1 });
        assert_eq!(r, Err(Error::Inert(2, 5)));
        assert_eq!(square_roots_mod(13, 23), vec![6, 17]);
    }

    #[test]
    fn product_of_elliptic_curves() {
        // y² = (x³ + 1)(x³ + 2) is not a product; instead check y² = x⁶ + 1, which covers
        // y² = x³ + 1 twice, against the square of its quadratic when p ≡ 2 mod 3
        let c = SexticCurve::from_i64([1, 0, 0, 0, 0, 0, 1]).unwrap();
        for p in [5u64, 11, 17, 23, 29] {
            let f = frobenius_data(&c, p, Exec::Sequential).unwrap();
            let e = EllipticOverQuadratic { a: (0, 0), b: (1, 0), d: 1 };
            let q = reduce_and_count_elliptic(&QuadFieldCurveReduction { curve: e, p, root: 1 }).unwrap();
            assert_eq!(f.charpoly, square_of_quadratic(&q), "p = {p}");
        }
    }

    #[test]
    fn guards() {
        let c = SexticCurve::from_i64([1, 0, 0, 0, 0, 1, 0]).unwrap();
        assert_eq!(count_points_genus2(&c, 9, 1), Err(Error::NotOddPrime(9)));
        assert_eq!(count_points_genus2(&c, 1009, 2), Err(Error::FieldTooLarge(1009 * 1009)));
        assert_eq!(count_points_genus2(&c, 5, 1), Err(Error::BadReduction(5)));
    }

    #[test]
    fn identical_candidates_both_match() {
        let c = SexticCurve::from_i64([1, 0, 0, 0, 0, 0, 1]).unwrap();
        let e = EllipticOverQuadratic { a: (0, 0), b: (1, 0), d: 1 };
        assert_eq!(disambiguate_sign((&c, &c), &e, 5, Exec::Sequential), Err(Error::BothMatch));
    }
}
