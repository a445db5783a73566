use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::torus_analytic::{abs, pi, ten_pow_neg, SiegelPoint};

/// Characteristic [a; b] with a, b ∈ {0, ½}², stored as bits (1 means ½).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThetaCharacteristic {
    pub a: [u8; 2],
    pub b: [u8; 2],
}

impl ThetaCharacteristic {
    pub fn is_even(&self) -> bool {
        (self.a[0] * self.b[0] + self.a[1] * self.b[1]).is_multiple_of(2)
    }

    /// The ten even characteristics in lexicographic order of (a, b).
    pub fn all_even() -> Vec<ThetaCharacteristic> {
        let mut out = Vec::with_capacity(10);
        for bits in 0u8..16 {
            let ch = ThetaCharacteristic { a: [bits >> 3 & 1, bits >> 2 & 1], b: [bits >> 1 & 1, bits & 1] };
            if ch.is_even() {
                out.push(ch);
            }
        }
        out
    }
}

impl std::fmt::Display for ThetaCharacteristic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let h = |x: u8| if x == 1 { "1/2" } else { "0" };
        write!(f, "[{},{};{},{}]", h(self.a[0]), h(self.a[1]), h(self.b[0]), h(self.b[1]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Jacobian,
    Split,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Jacobian => "Jacobian",
            Verdict::Split => "Split",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ThetaConfig {
    pub digits: u32,
    /// Relative vanishing threshold; `None` means 10^(−digits/2).
    pub threshold: Option<f64>,
    /// Tolerance for symmetry/positivity of Siegel points built from periods.
    pub siegel_tol: f64,
    pub radius_cap: usize,
    pub exec: Exec,
}

impl Default for ThetaConfig {
    fn default() -> Self {
        ThetaConfig { digits: 30, threshold: None, siegel_tol: 1e-12, radius_cap: 400, exec: Exec::default() }
    }
}

impl ThetaConfig {
    pub fn with_digits(digits: u32) -> Self {
        ThetaConfig { digits, ..Self::default() }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold.unwrap_or_else(|| 10f64.powf(-(self.digits as f64) / 2.0))
    }
}

#[derive(Clone, Debug)]
pub struct ThetaNullVector {
    pub values: Vec<(ThetaCharacteristic, Complex)>,
    pub truncation_radius: usize,
    pub max_abs: Float,
    pub tail_bound: f64,
}

impl ThetaNullVector {
    /// |θ|/max|θ| per characteristic.
    pub fn ratios(&self) -> Vec<f64> {
        self.values.iter().map(|(_, v)| (abs(v) / &self.max_abs).to_f64()).collect()
    }
}

// Σ_{k>R} 8k·exp(−πλ(k−½)²) over shells ‖n‖∞ = k of Z².
fn tail_bound(lambda: f64, r: usize) -> f64 {
    let mut s = 0.0;
    for k in r + 1..r + 400 {
        let x = k as f64 - 0.5;
        let t = 8.0 * k as f64 * (-std::f64::consts::PI * lambda * x * x).exp();
        s += t;
        if t < s * 1e-18 || t == 0.0 {
            break;
        }
    }
    s
}

pub fn even_theta_nulls(z: &SiegelPoint, digits: u32) -> Result<ThetaNullVector> {
    even_theta_nulls_with(z, &ThetaConfig::with_digits(digits))
}

/// θ[a;b](0,Z) = Σ_n exp(πi(n+a)ᵀZ(n+a) + 2πi(n+a)ᵀb) over ‖n‖∞ ≤ R.
pub fn even_theta_nulls_with(z: &SiegelPoint, cfg: &ThetaConfig) -> Result<ThetaNullVector> {
    if z.genus() != 2 {
        return Err(Error::Dimension("theta nulls need a genus-2 Siegel point".into()));
    }
    let lambda = z.min_imag_eigenvalue();
    let prec = z.prec().max((cfg.digits as f64 * 3.33) as u32 + 40);
    let target = 10f64.powf(-(cfg.digits as f64));
    let mut r = 1;
    while tail_bound(lambda, r) > target * 1e-2 {
        r += 1;
        if r > cfg.radius_cap {
            return Err(Error::PrecisionUnreachable(r));
        }
    }
    loop {
        let values = theta_sums(z, r as i64, prec, cfg.exec);
        let max_abs = values.iter().map(|(_, v)| abs(v)).fold(Float::new(prec), |m, x| if x > m { x } else { m });
        let tail = tail_bound(lambda, r);
        if tail <= target * max_abs.to_f64() {
            return Ok(ThetaNullVector { values, truncation_radius: r, max_abs, tail_bound: tail });
        }
        r += 1;
        if r > cfg.radius_cap {
            return Err(Error::PrecisionUnreachable(r));
        }
    }
}

fn theta_sums(z: &SiegelPoint, r: i64, prec: u32, exec: Exec) -> Vec<(ThetaCharacteristic, Complex)> {
    let zm = z.z();
    let zz: [[Complex; 2]; 2] = [
        [Complex::with_val(prec, &zm[(0, 0)]), Complex::with_val(prec, &zm[(0, 1)])],
        [Complex::with_val(prec, &zm[(1, 0)]), Complex::with_val(prec, &zm[(1, 1)])],
    ];
    let pi_i = Complex::with_val(prec, (0, pi(prec)));
    let half = Float::with_val(prec, 0.5);
    // sums[a][s] where a indexes the shift and s the sign pattern (−1)^(n·s)
    let mut sums: Vec<[Complex; 4]> = (0..4).map(|_| std::array::from_fn(|_| Complex::new(prec))).collect();
    for (ai, sum) in sums.iter_mut().enumerate() {
        let a = [(ai >> 1 & 1) as u8, (ai & 1) as u8];
        let rows = exec.map_range(-r, r + 1, |n1| {
            let mut part: [Complex; 4] = std::array::from_fn(|_| Complex::new(prec));
            let v1 = Float::with_val(prec, n1) + if a[0] == 1 { half.clone() } else { Float::new(prec) };
            for n2 in -r..=r {
                let v2 = Float::with_val(prec, n2) + if a[1] == 1 { half.clone() } else { Float::new(prec) };
                let mut q = Complex::with_val(prec, &zz[0][0] * Float::with_val(prec, v1.square_ref()));
                q += Complex::with_val(prec, &zz[0][1] * Float::with_val(prec, &v1 * &v2)) * 2;
                q += Complex::with_val(prec, &zz[1][1] * Float::with_val(prec, v2.square_ref()));
                let term = (q * &pi_i).exp();
                for (s, acc) in part.iter_mut().enumerate() {
                    let odd = ((s >> 1 & 1) as i64 * n1 + (s & 1) as i64 * n2).rem_euclid(2) == 1;
                    if odd {
                        *acc -= &term;
                    } else {
                        *acc += &term;
                    }
                }
            }
            part
        });
        for part in rows {
            for (acc, p) in sum.iter_mut().zip(part) {
                *acc += p;
            }
        }
    }
    ThetaCharacteristic::all_even()
        .into_iter()
        .map(|ch| {
            let ai = (ch.a[0] as usize) << 1 | ch.a[1] as usize;
            let si = (ch.b[0] as usize) << 1 | ch.b[1] as usize;
            let mut v = sums[ai][si].clone();
            // e^{πi a_k} for each k with b_k = ½
            for k in 0..2 {
                if ch.b[k] == 1 && ch.a[k] == 1 {
                    v *= Complex::with_val(prec, (0, 1));
                }
            }
            (ch, v)
        })
        .collect()
}

pub fn decomposition_verdict(z: &SiegelPoint, digits: u32) -> Result<Verdict> {
    decomposition_verdict_with(z, &ThetaConfig::with_digits(digits))
}

/// Split if exactly one even theta null is below threshold·max|θ|, Jacobian if none.
pub fn decomposition_verdict_with(z: &SiegelPoint, cfg: &ThetaConfig) -> Result<Verdict> {
    let nulls = even_theta_nulls_with(z, cfg)?;
    verdict_from_nulls(&nulls, cfg.threshold())
}

pub fn verdict_from_nulls(nulls: &ThetaNullVector, threshold: f64) -> Result<Verdict> {
    let thr = Float::with_val(nulls.max_abs.prec(), &nulls.max_abs * threshold);
    let vanishing = nulls.values.iter().filter(|(_, v)| abs(v) < thr).count();
    match vanishing {
        0 => Ok(Verdict::Jacobian),
        1 => Ok(Verdict::Split),
        k => Err(Error::AmbiguousVanishing(k)),
    }
}

/// Threshold 10^(−digits/2) as a multiprecision value.
pub fn default_threshold(prec: u32, digits: u32) -> Float {
    ten_pow_neg(prec, digits as f64 / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus_analytic::{c, CMat};

    fn diag(t1: (f64, f64), t2: (f64, f64)) -> SiegelPoint {
        SiegelPoint::new(CMat::diag(160, &[c(160, t1.0, t1.1), c(160, t2.0, t2.1)]), 1e-30).unwrap()
    }

    #[test]
    fn ten_even_characteristics() {
        let all = ThetaCharacteristic::all_even();
        assert_eq!(all.len(), 10);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all.contains(&ThetaCharacteristic { a: [1, 1], b: [1, 1] }));
        assert!(!all.contains(&ThetaCharacteristic { a: [1, 0], b: [1, 0] }));
    }

    #[test]
    fn diagonal_point_splits() {
        let z = diag((0.0, 1.0), (0.0, 2.0));
        let nulls = even_theta_nulls(&z, 30).unwrap();
        let ratios = nulls.ratios();
        let zeros: Vec<usize> = (0..10).filter(|&i| ratios[i] < 1e-25).collect();
        assert_eq!(zeros.len(), 1);
        assert_eq!(decomposition_verdict(&z, 30).unwrap(), Verdict::Split);
    }

    #[test]
    fn generic_point_is_jacobian() {
        let z = SiegelPoint::new(
            CMat::from_rows(
                128,
                vec![vec![c(128, 0.1, 1.2), c(128, 0.3, 0.4)], vec![c(128, 0.3, 0.4), c(128, -0.2, 1.1)]],
            ),
            1e-20,
        )
        .unwrap();
        assert_eq!(decomposition_verdict(&z, 30).unwrap(), Verdict::Jacobian);
    }

    #[test]
    fn modes_agree_exactly() {
        let z = diag((0.3, 0.8), (-0.1, 1.4));
        let mut cfg = ThetaConfig::with_digits(25);
        cfg.exec = Exec::Sequential;
        let a = even_theta_nulls_with(&z, &cfg).unwrap();
        cfg.exec = Exec::Parallel;
        let b = even_theta_nulls_with(&z, &cfg).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn radius_cap() {
        let z = diag((0.0, 0.002), (0.0, 0.002));
        let cfg = ThetaConfig { radius_cap: 10, ..ThetaConfig::with_digits(30) };
        assert!(matches!(even_theta_nulls_with(&z, &cfg), Err(Error::PrecisionUnreachable(_))));
    }
}
