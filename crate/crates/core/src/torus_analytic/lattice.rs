use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::exact_forms::{pfaffian, AlternatingForm, IntMatrix, RatMatrix};

/// Row Hermite normal form of an integer matrix of full column rank;
/// returns the nonzero rows.
pub fn hermite_rows(m: &IntMatrix) -> IntMatrix {
    let mut a = m.clone();
    let (rows, cols) = (a.nrows(), a.ncols());
    let mut r = 0;
    for c in 0..cols {
        loop {
            let nz: Vec<usize> = (r..rows).filter(|&i| a[(i, c)] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by(|&&x, &&y| a[(x, c)].cmp_abs(&a[(y, c)])).unwrap();
            a.swap_rows(r, p);
            if nz.len() == 1 {
                break;
            }
            for i in r + 1..rows {
                if a[(i, c)] != 0 {
                    let (q, _) = a[(i, c)].clone().div_rem_floor(a[(r, c)].clone());
                    a.add_row_multiple(i, r, &(-q));
                }
            }
        }
        if r == rows || a[(r, c)] == 0 {
            continue;
        }
        if a[(r, c)] < 0 {
            let m1 = Integer::from(-2);
            a.add_row_multiple(r, r, &m1);
        }
        for i in 0..r {
            let (q, _) = a[(i, c)].clone().div_rem_floor(a[(r, c)].clone());
            a.add_row_multiple(i, r, &(-q));
        }
        r += 1;
    }
    a.select(&(0..r).collect::<Vec<_>>(), &(0..cols).collect::<Vec<_>>())
}

fn common_denominator(vs: &[Vec<Rational>]) -> Integer {
    let mut l = Integer::from(1);
    for v in vs {
        for x in v {
            l.lcm_mut(x.denom());
        }
    }
    l
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    (k - 1..n)
        .flat_map(|last| {
            subsets(last, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

/// Hermite basis (rows) of Z^n + Σ Z·g for rational vectors g.
pub fn enlarged_lattice(n: usize, gens: &[Vec<Rational>]) -> RatMatrix {
    let l = common_denominator(gens);
    let mut rows: Vec<Vec<Integer>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { l.clone() } else { Integer::new() }).collect()).collect();
    for g in gens {
        rows.push(g.iter().map(|x| (x * Rational::from(l.clone())).complete_numer()).collect());
    }
    let h = hermite_rows(&IntMatrix::from_rows(rows));
    let lr = Rational::from(l);
    h.to_rational().map(|x| Rational::from(x / &lr))
}

trait CompleteNumer {
    fn complete_numer(self) -> Integer;
}

impl CompleteNumer for Rational {
    fn complete_numer(self) -> Integer {
        debug_assert_eq!(*self.denom(), 1);
        self.into_numer_denom().0
    }
}

/// Finite subgroup of the torus, given by rational coordinate vectors mod Z^n.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionSubgroup {
    generators: Vec<Vec<Rational>>,
    group_order: Integer,
}

impl TorsionSubgroup {
    pub fn new(dim: usize, generators: Vec<Vec<Rational>>) -> Result<Self> {
        if generators.iter().any(|g| g.len() != dim) {
            return Err(Error::Dimension(format!("torsion generators must have length {dim}")));
        }
        let basis = enlarged_lattice(dim, &generators);
        let det = basis.det();
        let order = Rational::from(det.recip_ref()).abs();
        if *order.denom() != 1 {
            return Err(Error::InfiniteOrder);
        }
        Ok(TorsionSubgroup { generators, group_order: order.into_numer_denom().0 })
    }

    pub fn dim(&self) -> usize {
        self.generators.first().map_or(0, |g| g.len())
    }

    pub fn generators(&self) -> &[Vec<Rational>] {
        &self.generators
    }

    pub fn group_order(&self) -> &Integer {
        &self.group_order
    }

    /// Order of a single generator: lcm of its coordinate denominators.
    pub fn element_order(v: &[Rational]) -> Integer {
        common_denominator(&[v.to_vec()])
    }

    /// Invariant factors d1 | d2 | … of G ≅ ⊕ Z/d_i, trivial factors dropped.
    pub fn invariant_factors(&self) -> Vec<Integer> {
        let n = self.dim();
        let basis = enlarged_lattice(n, &self.generators);
        // Z^n written in the enlarged basis; its Smith form gives G
        let c = basis.inverse().and_then(|m| m.to_integer()).expect("enlarged lattice contains Z^n");
        let mut prev = Integer::from(1);
        let mut out = Vec::new();
        for k in 1..=n {
            let mut g = Integer::new();
            for rows in subsets(n, k) {
                for cols in subsets(n, k) {
                    g.gcd_mut(&c.select(&rows, &cols).det());
                }
            }
            let f = Integer::from(&g / &prev);
            if f != 1 {
                out.push(f);
            }
            prev = g;
        }
        out
    }

    /// True if M·g − k·g is integral for every generator.
    pub fn acts_as_scalar(&self, m: &IntMatrix, k: &Integer) -> bool {
        let mr = m.to_rational();
        let kr = Rational::from(k.clone());
        self.generators.iter().all(|g| {
            let mg = mr.mul_vec(g);
            mg.iter().zip(g).all(|(a, b)| *(a - Rational::from(b * &kr)).denom() == 1)
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorsionQuotient {
    /// Rows are a Hermite basis of the enlarged lattice in old coordinates.
    pub basis: RatMatrix,
    /// E restricted to the enlarged lattice (rational).
    pub restricted: AlternatingForm,
    /// #G·E on the enlarged lattice.
    pub scaled: AlternatingForm,
    pub group_order: Integer,
    /// |Pf(#G·E)| = #G^(g−1)·|Pf(E)|, which for surfaces reads deg = #G·deg E.
    pub degree_relation_holds: bool,
}

/// Form on the lattice spanned by the rows of `basis`.
pub fn restrict_form(e: &AlternatingForm, basis: &RatMatrix) -> AlternatingForm {
    e.congruent(basis)
}

pub fn quotient_by_torsion(e: &AlternatingForm, g: &TorsionSubgroup) -> Result<TorsionQuotient> {
    let n = e.rank();
    if !g.generators().is_empty() && g.dim() != n {
        return Err(Error::Dimension(format!("torsion of dimension {} on rank {n}", g.dim())));
    }
    let base_pf = pfaffian(e)?.abs();
    let basis = enlarged_lattice(n, g.generators());
    let restricted = restrict_form(e, &basis);
    let order = g.group_order().clone();
    let scaled = restricted.scaled(&Rational::from(order.clone()));
    let scaled_pf = pfaffian(&scaled)?.abs();
    let expected = base_pf * Integer::from(rug::ops::Pow::pow(&order, e.genus() as u32 - 1));
    Ok(TorsionQuotient { basis, restricted, degree_relation_holds: scaled_pf == expected, scaled, group_order: order })
}

/// True if the rows of `a` and `b` span the same lattice.
pub fn same_lattice(a: &RatMatrix, b: &RatMatrix) -> bool {
    let mut all = a.to_rows();
    all.extend(b.to_rows());
    let l = Rational::from(common_denominator(&all));
    let hnf = |m: &RatMatrix| {
        let scaled = m.map(|x| Rational::from(x * &l));
        hermite_rows(&scaled.to_integer().expect("cleared denominators"))
    };
    hnf(a) == hnf(b)
}
