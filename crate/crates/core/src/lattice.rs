//! Characteristic vectors stored by evaluations k_i = <K, v_i>, their Spin^c
//! orbits modulo 2Q, and the streaming box enumerations feeding the
//! algorithms.

use crate::error::{Error, Result};
use crate::form::IntersectionForm;
use crate::graph::PlumbingGraph;
use num::Integer;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::collections::HashMap;

pub fn is_characteristic(g: &PlumbingGraph, k: &[i64]) -> bool {
    k.len() == g.n() && (0..g.n()).all(|v| (k[v] - g.weight(v)).rem_euclid(2) == 0)
}

pub fn require_characteristic(g: &PlumbingGraph, k: &[i64]) -> Result<()> {
    if is_characteristic(g, k) {
        Ok(())
    } else {
        let s: Vec<String> = k.iter().map(|x| x.to_string()).collect();
        Err(Error::NotCharacteristic(s.join(",")))
    }
}

/// K +- 2 PD[v] in evaluation coordinates: k' = k +- 2 (column v of Q).
pub fn add_2pd(form: &IntersectionForm, k: &[i64], v: usize, sign: i64) -> Vec<i64> {
    let col = form.column(v);
    k.iter()
        .zip(col)
        .map(|(&ki, &ci)| ki + 2 * sign * ci)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpinCClass {
    pub index: usize,
    pub residue: Vec<i64>,
}

/// Canonical residues of Char(G) modulo the column lattice of 2Q, labelled in
/// lexicographic order. Reduction is back-substitution against a triangular
/// (Hermite-form) column basis of 2Q, computed once per graph.
#[derive(Debug, Clone)]
pub struct SpinCTable {
    basis: Vec<Vec<BigInt>>,
    residues: Vec<Vec<i64>>,
    index_of: HashMap<Vec<i64>, usize>,
}

/// Lower-triangular column basis of 2Q with positive diagonal, by integer
/// column elimination.
fn hnf_basis(form: &IntersectionForm) -> Vec<Vec<BigInt>> {
    let n = form.n();
    let mut cols: Vec<Vec<BigInt>> = (0..n)
        .map(|j| (0..n).map(|i| BigInt::from(2 * form.entry(i, j))).collect())
        .collect();
    for i in 0..n {
        loop {
            let mut best: Option<usize> = None;
            for j in i..n {
                if !cols[j][i].is_zero()
                    && best.is_none_or(|b| cols[j][i].abs() < cols[b][i].abs())
                {
                    best = Some(j);
                }
            }
            let b = best.expect("2Q is nonsingular");
            cols.swap(i, b);
            let mut done = true;
            for j in i + 1..n {
                if cols[j][i].is_zero() {
                    continue;
                }
                let q = BigInt::div_floor(&cols[j][i], &cols[i][i]);
                for r in i..n {
                    let sub = &q * &cols[i][r];
                    cols[j][r] -= sub;
                }
                if !cols[j][i].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if cols[i][i].is_negative() {
            for r in i..n {
                cols[i][r] = -cols[i][r].clone();
            }
        }
    }
    cols
}

impl SpinCTable {
    pub fn new(g: &PlumbingGraph, form: &IntersectionForm) -> Result<Self> {
        if form.det().is_zero() {
            return Err(Error::DegenerateForm);
        }
        let basis = hnf_basis(form);
        let mut table = SpinCTable {
            basis,
            residues: Vec::new(),
            index_of: HashMap::new(),
        };
        // BFS closure over +-2e_i spans all of Char modulo 2Q
        let start = table.reduce(g.weights())?;
        let mut seen: Vec<Vec<i64>> = vec![start.clone()];
        let mut frontier = vec![start];
        let mut found: HashMap<Vec<i64>, ()> = HashMap::new();
        found.insert(seen[0].clone(), ());
        while let Some(r) = frontier.pop() {
            for i in 0..g.n() {
                for s in [2i64, -2] {
                    let mut k = r.clone();
                    k[i] += s;
                    let rr = table.reduce(&k)?;
                    if !found.contains_key(&rr) {
                        found.insert(rr.clone(), ());
                        seen.push(rr.clone());
                        frontier.push(rr);
                    }
                }
            }
        }
        let expected = form.h1_order()?;
        if BigInt::from(seen.len()) != expected {
            return Err(Error::Internal(format!(
                "found {} Spin^c residues, |det Q| = {}",
                seen.len(),
                expected
            )));
        }
        seen.sort_unstable();
        table.index_of = seen
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), i))
            .collect();
        table.residues = seen;
        Ok(table)
    }

    /// Canonical residue: entrywise in [0, diagonal) against the triangular
    /// basis.
    pub fn reduce(&self, k: &[i64]) -> Result<Vec<i64>> {
        let n = self.basis.len();
        let mut x: Vec<BigInt> = k.iter().map(|&v| BigInt::from(v)).collect();
        for i in 0..n {
            let q = BigInt::div_floor(&x[i], &self.basis[i][i]);
            if !q.is_zero() {
                for r in i..n {
                    let sub = &q * &self.basis[i][r];
                    x[r] -= sub;
                }
            }
        }
        x.into_iter()
            .map(|b| {
                i64::try_from(b).map_err(|_| Error::Internal("residue exceeds i64".into()))
            })
            .collect()
    }

    pub fn class_of(&self, g: &PlumbingGraph, k: &[i64]) -> Result<SpinCClass> {
        require_characteristic(g, k)?;
        let residue = self.reduce(k)?;
        let index = *self
            .index_of
            .get(&residue)
            .ok_or_else(|| Error::Internal("characteristic residue missing from table".into()))?;
        Ok(SpinCClass { index, residue })
    }

    pub fn index_of_vector(&self, g: &PlumbingGraph, k: &[i64]) -> Result<usize> {
        Ok(self.class_of(g, k)?.index)
    }

    pub fn count(&self) -> usize {
        self.residues.len()
    }

    pub fn residue(&self, index: usize) -> &[i64] {
        &self.residues[index]
    }

    pub fn classes(&self) -> Vec<SpinCClass> {
        self.residues
            .iter()
            .enumerate()
            .map(|(index, r)| SpinCClass {
                index,
                residue: r.clone(),
            })
            .collect()
    }

    /// Index of the conjugate structure, represented by -K.
    pub fn conjugate_index(&self, index: usize) -> Result<usize> {
        let neg: Vec<i64> = self.residues[index].iter().map(|&x| -x).collect();
        let r = self.reduce(&neg)?;
        self.index_of
            .get(&r)
            .copied()
            .ok_or_else(|| Error::Internal("conjugate residue missing from table".into()))
    }
}

/// Streaming product-range iterator over characteristic vectors, lexicographic
/// order, step 2 per coordinate.
pub struct BoxIter {
    lows: Vec<i64>,
    highs: Vec<i64>,
    next: Option<Vec<i64>>,
}

impl BoxIter {
    fn new(lows: Vec<i64>, highs: Vec<i64>) -> Self {
        let empty = lows.iter().zip(&highs).any(|(l, h)| l > h);
        let next = if empty { None } else { Some(lows.clone()) };
        BoxIter { lows, highs, next }
    }
}

impl Iterator for BoxIter {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut i = succ.len();
        while i > 0 {
            i -= 1;
            if succ[i] + 2 <= self.highs[i] {
                succ[i] += 2;
                for j in i + 1..succ.len() {
                    succ[j] = self.lows[j];
                }
                self.next = Some(succ);
                break;
            }
        }
        Some(cur)
    }
}

/// The initial box: m(v) + 2 <= <K, v> <= -m(v) at every vertex.
pub fn initial_box(g: &PlumbingGraph) -> BoxIter {
    let lows = g.weights().iter().map(|&m| m + 2).collect();
    let highs = g.weights().iter().map(|&m| -m).collect();
    BoxIter::new(lows, highs)
}

/// The symmetric box B_n: |<K, v>| <= -m(v) + 2n at every vertex.
pub fn enumerate_box(g: &PlumbingGraph, n: i64) -> BoxIter {
    let lows = g.weights().iter().map(|&m| m - 2 * n).collect();
    let highs = g.weights().iter().map(|&m| -m + 2 * n).collect();
    BoxIter::new(lows, highs)
}

pub fn in_box(g: &PlumbingGraph, k: &[i64], n: i64) -> bool {
    k.iter()
        .zip(g.weights())
        .all(|(&ki, &m)| ki.abs() <= -m + 2 * n)
}

pub fn initial_box_size(g: &PlumbingGraph) -> BigInt {
    g.weights()
        .iter()
        .map(|&m| BigInt::from(-m))
        .product()
}
