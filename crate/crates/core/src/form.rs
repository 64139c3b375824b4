//! The intersection form of a plumbing: exact integer determinants via
//! fraction-free elimination, leading-minor definiteness, and the exact
//! rational inverse used for squares of characteristic vectors.

use crate::error::{Error, Result};
use crate::graph::PlumbingGraph;
use num::BigRational;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Symmetric form Q with Q_ii = m(v_i) and Q_ij = 1 exactly on edges.
/// The rational inverse is carried as (adjugate, det) so that squares are a
/// single integer quadratic form divided by det.
#[derive(Debug, Clone)]
pub struct IntersectionForm {
    n: usize,
    q: Vec<Vec<i64>>,
    det: BigInt,
    leading_minors: Vec<BigInt>,
    negative_definite: bool,
    adj: Option<Vec<Vec<BigInt>>>,
    adj_small: Option<(Vec<Vec<i128>>, i128)>,
}

/// Fraction-free (Bareiss) determinant with row pivoting.
fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        let rowk = a[k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &rowk[k] - &a[i][k] * &rowk[j];
                a[i][j] = num / &prev;
            }
        }
        prev = rowk[k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Exact inverse by Gauss-Jordan over the rationals. Caller guarantees
/// nonsingularity.
fn rational_inverse(q: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    let n = q.len();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        BigRational::from(BigInt::from(q[i][j]))
                    } else if j - n == i {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("nonsingular by construction");
        a.swap(col, piv);
        let p = a[col][col].clone();
        for j in col..2 * n {
            a[col][j] = &a[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..2 * n {
                    let sub = &f * &a[col][j];
                    a[r][j] = &a[r][j] - sub;
                }
            }
        }
    }
    a.into_iter().map(|row| row[n..].to_vec()).collect()
}

impl IntersectionForm {
    pub fn new(g: &PlumbingGraph) -> Self {
        let n = g.n();
        let mut q = vec![vec![0i64; n]; n];
        for v in 0..n {
            q[v][v] = g.weight(v);
        }
        for &(a, b) in g.edges() {
            q[a][b] = 1;
            q[b][a] = 1;
        }
        let as_big = |k: usize| -> Vec<Vec<BigInt>> {
            (0..k)
                .map(|i| (0..k).map(|j| BigInt::from(q[i][j])).collect())
                .collect()
        };
        let leading_minors: Vec<BigInt> = (1..=n).map(|k| bareiss_det(as_big(k))).collect();
        let det = if n == 0 {
            BigInt::one()
        } else {
            leading_minors[n - 1].clone()
        };
        let negative_definite = leading_minors
            .iter()
            .enumerate()
            .all(|(i, m)| if i % 2 == 0 { m.is_negative() } else { m.is_positive() });
        let (adj, adj_small) = if det.is_zero() {
            (None, None)
        } else {
            let inv = rational_inverse(&q);
            let adj: Vec<Vec<BigInt>> = inv
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|x| {
                            let scaled = x * BigRational::from(det.clone());
                            debug_assert!(scaled.is_integer());
                            scaled.to_integer()
                        })
                        .collect()
                })
                .collect();
            let small_bound = BigInt::from(1i128 << 40);
            let fits = det.magnitude() < small_bound.magnitude()
                && adj
                    .iter()
                    .flatten()
                    .all(|x| x.magnitude() < small_bound.magnitude());
            let adj_small = if fits {
                let m = adj
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|x| i128::try_from(x.clone()).unwrap())
                            .collect()
                    })
                    .collect();
                Some((m, i128::try_from(det.clone()).unwrap()))
            } else {
                None
            };
            (Some(adj), adj_small)
        };
        IntersectionForm {
            n,
            q,
            det,
            leading_minors,
            negative_definite,
            adj,
            adj_small,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.q[i][j]
    }

    /// Column v of Q (equals row v by symmetry).
    pub fn column(&self, v: usize) -> &[i64] {
        &self.q[v]
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn h1_order(&self) -> Result<BigInt> {
        if self.det.is_zero() {
            return Err(Error::DegenerateForm);
        }
        Ok(self.det.abs())
    }

    pub fn leading_minors(&self) -> &[BigInt] {
        &self.leading_minors
    }

    /// True when every leading principal minor M_k has sign (-1)^k.
    pub fn is_negative_definite(&self) -> bool {
        self.negative_definite
    }

    pub fn require_negative_definite(&self) -> Result<()> {
        if self.negative_definite {
            Ok(())
        } else {
            Err(Error::NotNegativeDefinite(String::new()))
        }
    }

    /// Entry of the exact rational inverse.
    pub fn qinv(&self, i: usize, j: usize) -> Result<BigRational> {
        let adj = self.adj.as_ref().ok_or(Error::DegenerateForm)?;
        Ok(BigRational::new(adj[i][j].clone(), self.det.clone()))
    }

    /// K^2 = k^T Q^{-1} k, exact.
    pub fn square(&self, k: &[i64]) -> Result<BigRational> {
        assert_eq!(k.len(), self.n);
        if let Some((adj, det)) = &self.adj_small {
            if k.iter().all(|&x| x.unsigned_abs() < 1 << 20) {
                let mut acc: i128 = 0;
                for i in 0..self.n {
                    let mut row = 0i128;
                    for j in 0..self.n {
                        row += adj[i][j] * k[j] as i128;
                    }
                    acc += k[i] as i128 * row;
                }
                return Ok(BigRational::new(BigInt::from(acc), BigInt::from(*det)));
            }
        }
        let adj = self.adj.as_ref().ok_or(Error::DegenerateForm)?;
        let mut acc = BigInt::zero();
        for i in 0..self.n {
            let mut row = BigInt::zero();
            for j in 0..self.n {
                row += &adj[i][j] * BigInt::from(k[j]);
            }
            acc += BigInt::from(k[i]) * row;
        }
        Ok(BigRational::new(acc, self.det.clone()))
    }

    /// Degree of the level-0 generator dual to K: -(K^2 + n)/4.
    pub fn grade0(&self, k: &[i64]) -> Result<BigRational> {
        let sq = self.square(k)?;
        Ok(-(sq + BigRational::from(BigInt::from(self.n as i64))) / BigRational::from(BigInt::from(4)))
    }

    /// Degree of the leveled vector U^m (x) K: 2m - (K^2 + n)/4.
    pub fn delta(&self, m: i64, k: &[i64]) -> Result<BigRational> {
        Ok(BigRational::from(BigInt::from(2 * m)) + self.grade0(k)?)
    }
}

/// Independent determinant route: expansion along leaves of the forest.
/// det(G) = m(v) det(G - v) - det(G - v - w) for a leaf v with neighbor w;
/// isolated vertices factor out; empty graph has det 1.
pub fn det_by_tree_expansion(g: &PlumbingGraph) -> BigInt {
    if g.n() == 0 {
        return BigInt::one();
    }
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) == 0) {
        return BigInt::from(g.weight(v)) * det_by_tree_expansion(&g.without(&[v]).unwrap());
    }
    let v = (0..g.n()).find(|&v| g.degree(v) == 1).expect("forest has a leaf");
    let w = g.neighbors(v)[0];
    BigInt::from(g.weight(v)) * det_by_tree_expansion(&g.without(&[v]).unwrap())
        - det_by_tree_expansion(&g.without(&[v, w]).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    fn form(s: &str) -> IntersectionForm {
        IntersectionForm::new(&parse_graph(s).unwrap())
    }

    #[test]
    fn e8_det_one() {
        let f = form("8; -2 -2 -2 -2 -2 -2 -2 -2; 0-1 0-2 2-3 0-4 4-5 5-6 6-7");
        assert_eq!(f.det(), &BigInt::from(1));
        assert!(f.is_negative_definite());
        assert_eq!(f.h1_order().unwrap(), BigInt::from(1));
    }

    #[test]
    fn sigma237_det_one() {
        // det = (-1)(-42) - (21 + 14 + 6) = 1
        let f = form("4; -1 -2 -3 -7; 0-1 0-2 0-3");
        assert_eq!(f.det(), &BigInt::from(1));
        assert!(f.is_negative_definite());
    }

    #[test]
    fn y12_det_minus_twelve() {
        let f = form("5; -2 -2 -2 -3 -3; 0-1 0-2 0-3 0-4");
        assert_eq!(f.det(), &BigInt::from(-12));
        assert_eq!(f.h1_order().unwrap(), BigInt::from(12));
        assert!(f.is_negative_definite());
    }

    #[test]
    fn affine_d4_is_degenerate_not_definite() {
        let f = form("5; -2 -2 -2 -2 -2; 0-1 0-2 0-3 0-4");
        assert_eq!(f.det(), &BigInt::from(0));
        assert!(!f.is_negative_definite());
        assert!(f.h1_order().is_err());
        assert!(f.square(&[0, 0, 0, 0, 0]).is_err());
    }

    #[test]
    fn positive_weight_not_definite() {
        let f = form("2; 2 -2; 0-1");
        assert!(!f.is_negative_definite());
    }

    #[test]
    fn empty_graph_det() {
        let f = form("0;;");
        assert_eq!(f.det(), &BigInt::from(1));
        assert!(f.is_negative_definite());
        assert_eq!(f.square(&[]).unwrap(), BigRational::zero());
    }

    #[test]
    fn q_entries_and_symmetry() {
        let f = form("4; -1 -2 -3 -7; 0-1 0-2 0-3");
        assert_eq!(f.entry(0, 0), -1);
        assert_eq!(f.entry(0, 3), 1);
        assert_eq!(f.entry(3, 0), 1);
        assert_eq!(f.entry(1, 2), 0);
        assert_eq!(f.column(0), &[-1, 1, 1, 1]);
    }

    #[test]
    fn qinv_is_exact_inverse() {
        let g = parse_graph("5; -2 -2 -2 -3 -3; 0-1 0-2 0-3 0-4").unwrap();
        let f = IntersectionForm::new(&g);
        for i in 0..5 {
            for j in 0..5 {
                let mut acc = BigRational::zero();
                for l in 0..5 {
                    acc += BigRational::from(BigInt::from(f.entry(i, l))) * f.qinv(l, j).unwrap();
                }
                let expect = if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                };
                assert_eq!(acc, expect);
            }
        }
    }

    #[test]
    fn squares_match_paper_values() {
        let s237 = form("4; -1 -2 -3 -7; 0-1 0-2 0-3");
        // (K^2 + 4)/4 = 0 for both Ker U generators
        assert_eq!(s237.square(&[1, 0, -1, -3]).unwrap(), BigRational::from(BigInt::from(-4)));
        assert_eq!(s237.square(&[1, 0, -1, -5]).unwrap(), BigRational::from(BigInt::from(-4)));
        let y12 = form("5; -2 -2 -2 -3 -3; 0-1 0-2 0-3 0-4");
        // (K^2 + 5)/4 = 3/4
        assert_eq!(y12.square(&[0, 0, 0, 1, 1]).unwrap(), BigRational::from(BigInt::from(-2)));
        assert_eq!(
            y12.grade0(&[0, 0, 0, 1, 1]).unwrap(),
            BigRational::new(BigInt::from(-3), BigInt::from(4))
        );
        let e8 = form("8; -2 -2 -2 -2 -2 -2 -2 -2; 0-1 0-2 2-3 0-4 4-5 5-6 6-7");
        assert_eq!(e8.square(&[0; 8]).unwrap(), BigRational::zero());
        assert_eq!(e8.grade0(&[0; 8]).unwrap(), BigRational::from(BigInt::from(-2)));
    }

    #[test]
    fn delta_increments_by_two_per_level() {
        let f = form("1; -2;");
        let d0 = f.delta(0, &[0]).unwrap();
        let d1 = f.delta(1, &[0]).unwrap();
        assert_eq!(d1 - d0, BigRational::from(BigInt::from(2)));
    }

    #[test]
    fn tree_expansion_agrees_with_bareiss() {
        let cases = [
            "8; -2 -2 -2 -2 -2 -2 -2 -2; 0-1 0-2 2-3 0-4 4-5 5-6 6-7",
            "4; -1 -2 -3 -7; 0-1 0-2 0-3",
            "5; -2 -2 -2 -3 -3; 0-1 0-2 0-3 0-4",
            "2; -2 -3; 0-1",
            "1; -2;",
            "0;;",
            "3; -2 -5 -3; 0-1",
            "5; -2 -2 -2 -2 -2; 0-1 0-2 0-3 0-4",
        ];
        for c in cases {
            let g = parse_graph(c).unwrap();
            assert_eq!(
                det_by_tree_expansion(&g),
                *IntersectionForm::new(&g).det(),
                "{}",
                c
            );
        }
    }

    #[test]
    fn minor_signs_on_e8() {
        let f = form("8; -2 -2 -2 -2 -2 -2 -2 -2; 0-1 0-2 2-3 0-4 4-5 5-6 6-7");
        for (i, m) in f.leading_minors().iter().enumerate() {
            if i % 2 == 0 {
                assert!(m < &BigInt::from(0));
            } else {
                assert!(m > &BigInt::from(0));
            }
        }
    }
}
