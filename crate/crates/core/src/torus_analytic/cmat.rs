use std::fmt;
use std::ops::{Index, IndexMut};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Complex, Float};

/// Dense multiprecision complex matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct CMat {
    rows: usize,
    cols: usize,
    prec: u32,
    data: Vec<Complex>,
}

pub fn c(prec: u32, re: f64, im: f64) -> Complex {
    Complex::with_val(prec, (re, im))
}

/// Parses a decimal string pair exactly to the working precision.
pub fn parse_complex(prec: u32, re: &str, im: &str) -> Option<Complex> {
    let re = Float::parse(re).ok()?;
    let im = Float::parse(im).ok()?;
    Some(Complex::with_val(prec, (re, im)))
}

pub fn abs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// 10^-digits at the given precision.
pub fn ten_pow_neg(prec: u32, digits: f64) -> Float {
    Float::with_val(prec, 10).pow(Float::with_val(prec, -digits))
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        CMat { rows, cols, prec, data: vec![Complex::new(prec); rows * cols] }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = Self::zeros(n, n, prec);
        for i in 0..n {
            m[(i, i)].assign(1);
        }
        m
    }

    pub fn from_rows(prec: u32, rows: Vec<Vec<Complex>>) -> Self {
        let r = rows.len();
        let cc = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == cc), "ragged rows");
        let data = rows.into_iter().flatten().map(|z| Complex::with_val(prec, z)).collect();
        CMat { rows: r, cols: cc, prec, data }
    }

    pub fn diag(prec: u32, d: &[Complex]) -> Self {
        let mut m = Self::zeros(d.len(), d.len(), prec);
        for (i, z) in d.iter().enumerate() {
            m[(i, i)].assign(z);
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex>> {
        (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }

    pub fn columns(&self, cols: std::ops::Range<usize>) -> CMat {
        let mut m = CMat::zeros(self.rows, cols.len(), self.prec);
        for i in 0..self.rows {
            for (k, j) in cols.clone().enumerate() {
                m[(i, k)].assign(&self[(i, j)]);
            }
        }
        m
    }

    pub fn transpose(&self) -> CMat {
        let mut t = CMat::zeros(self.cols, self.rows, self.prec);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)].assign(&self[(i, j)]);
            }
        }
        t
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = CMat::zeros(self.rows, other.cols, self.prec);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Complex::new(self.prec);
                for k in 0..self.cols {
                    acc += Complex::with_val(self.prec, &self[(i, k)] * &other[(k, j)]);
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, k: &Complex) -> CMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= k;
        }
        out
    }

    pub fn max_abs(&self) -> Float {
        self.data.iter().map(abs).fold(Float::new(self.prec), |m, x| if x > m { x } else { m })
    }

    /// Inverse by Gauss-Jordan with partial pivoting; `None` when a pivot vanishes.
    pub fn inverse(&self) -> Option<CMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = CMat::identity(n, self.prec);
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| abs(&a[(x, k)]).partial_cmp(&abs(&a[(y, k)])).unwrap())?;
            if a[(p, k)].is_zero() {
                return None;
            }
            a.swap_rows(k, p);
            inv.swap_rows(k, p);
            let piv = Complex::with_val(self.prec, a[(k, k)].recip_ref());
            for j in 0..n {
                a[(k, j)] *= &piv;
                inv[(k, j)] *= &piv;
            }
            for i in 0..n {
                if i == k || a[(i, k)].is_zero() {
                    continue;
                }
                let f = a[(i, k)].clone();
                for j in 0..n {
                    let da = Complex::with_val(self.prec, &f * &a[(k, j)]);
                    a[(i, j)] -= da;
                    let di = Complex::with_val(self.prec, &f * &inv[(k, j)]);
                    inv[(i, j)] -= di;
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.data[i * self.cols + j]
    }
}

/// Short human-readable rendering with `digits` significant digits.
pub fn fmt_complex(z: &Complex, digits: usize) -> String {
    let re = z.real().to_f64();
    let im = z.imag().to_f64();
    let d = digits;
    if im < 0.0 {
        format!("{re:.d$}-{:.d$}i", -im)
    } else {
        format!("{re:.d$}+{im:.d$}i")
    }
}

impl fmt::Display for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|z| fmt_complex(z, 6)).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}
