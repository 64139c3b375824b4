//! The dual leveled model: pairs U^m (x) K under the relation generated, at
//! each vertex v with 2n = <K, v> + m(v), by
//!
//! ```text
//! U^(n+m) (x) (K + 2 PD[v])  ~  U^m (x) K        (n >= 0)
//! U^m     (x) (K + 2 PD[v])  ~  U^(m-n) (x) K    (n <= 0)
//! ```
//!
//! Equivalence classes carry a degree delta = 2m - (K^2 + n)/4 and a kill
//! level (the top U-level in the class). Classes with kill level <= n are
//! dual to a basis of Ker U^(n+1), which is what the module assembly reads
//! off.

use crate::error::{Error, Result};
use crate::form::IntersectionForm;
use crate::fullpath::{run_full_path, PathPolicy};
use crate::graph::PlumbingGraph;
use crate::lattice::{in_box, initial_box, SpinCTable};
use num::BigRational;
use std::collections::{BTreeMap, HashMap, VecDeque};

pub const DEFAULT_STATE_CAP: usize = 10_000_000;

/// U^level (x) K, stored by evaluations of K.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LeveledVector {
    pub level: i64,
    pub k: Vec<i64>,
}

impl LeveledVector {
    pub fn new(level: i64, k: Vec<i64>) -> Self {
        debug_assert!(level >= 0);
        LeveledVector { level, k }
    }
}

fn raw_neighbors(form: &IntersectionForm, g: &PlumbingGraph, level: i64, k: &[i64]) -> Vec<(i64, Vec<i64>)> {
    let mut out = Vec::with_capacity(2 * g.n());
    for v in 0..g.n() {
        let half_up = (k[v] + g.weight(v)) / 2;
        if level + half_up >= 0 {
            out.push((level + half_up, crate::lattice::add_2pd(form, k, v, 1)));
        }
        let half_down = (k[v] - g.weight(v)) / 2;
        if level - half_down >= 0 {
            out.push((level - half_down, crate::lattice::add_2pd(form, k, v, -1)));
        }
    }
    out
}

/// All leveled vectors one relation step away from `x`, both directions at
/// every vertex, discarding would-be negative levels. Every neighbor has the
/// same degree delta as `x`.
pub fn relation_neighbors(
    g: &PlumbingGraph,
    form: &IntersectionForm,
    x: &LeveledVector,
) -> Vec<LeveledVector> {
    raw_neighbors(form, g, x.level, &x.k)
        .into_iter()
        .map(|(level, k)| LeveledVector { level, k })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ClassInfo {
    /// Lexicographically least (level, K) member.
    pub representative: (i64, Vec<i64>),
    pub delta: BigRational,
    /// Top U-level occurring in the class; None when the class touched the
    /// exploration boundary, in which case the top is not certified.
    pub kill: Option<i64>,
    pub members: usize,
    pub clipped: bool,
    /// Class of (level+1, K), when that state was explored.
    pub shift_target: Option<usize>,
}

/// Classes of one Spin^c structure, explored over levels 0..=budget+margin
/// inside the box |<K, v>| <= -m(v) + 2(budget+margin).
#[derive(Debug, Clone)]
pub struct ClassTable {
    pub spinc_index: usize,
    pub budget: i64,
    pub margin: i64,
    pub classes: Vec<ClassInfo>,
    /// Initial-box vectors of this Spin^c structure, each with the class of
    /// its level-0 state; None certifies kill level > budget.
    pub box_members: Vec<(Vec<i64>, Option<usize>)>,
    /// Settled initial-box vectors and the class id of their level-0 state.
    pub generators: Vec<(Vec<i64>, usize)>,
    pub states: usize,
    state_to_class: HashMap<(i64, Vec<i64>), usize>,
}

impl ClassTable {
    pub fn class_of_state(&self, level: i64, k: &[i64]) -> Option<usize> {
        self.state_to_class.get(&(level, k.to_vec())).copied()
    }

    /// Class of (level+1, K) for any member (level, K) of class `c`.
    pub fn u_shift(&self, c: usize) -> Result<usize> {
        if c >= self.classes.len() {
            return Err(Error::Internal(format!("class id {} out of range", c)));
        }
        if let Some(t) = self.classes[c].shift_target {
            return Ok(t);
        }
        for ((m, k), &cid) in &self.state_to_class {
            if cid == c {
                if let Some(t) = self.class_of_state(m + 1, k) {
                    return Ok(t);
                }
            }
        }
        Err(Error::ShiftOutsideRegion)
    }

    fn require_sound(&self, n: i64) -> Result<()> {
        if n > self.budget {
            Err(Error::UnsoundRequest {
                requested: n,
                budget: self.budget,
            })
        } else {
            Ok(())
        }
    }

    /// Degree census of classes with kill level exactly n.
    pub fn census(&self, n: i64) -> Result<BTreeMap<BigRational, usize>> {
        self.require_sound(n)?;
        let mut out = BTreeMap::new();
        for c in &self.classes {
            if c.kill == Some(n) {
                *out.entry(c.delta.clone()).or_insert(0) += 1;
            }
        }
        Ok(out)
    }

    /// Rank of Ker U^(n+1) per degree: classes with kill level <= n.
    pub fn ker_u_pow_ranks(&self, n: i64) -> Result<BTreeMap<BigRational, usize>> {
        self.require_sound(n)?;
        let mut out = BTreeMap::new();
        for c in &self.classes {
            if c.kill.is_some_and(|k| k <= n) {
                *out.entry(c.delta.clone()).or_insert(0) += 1;
            }
        }
        Ok(out)
    }
}

pub fn ker_u_pow_ranks(table: &ClassTable, n: i64) -> Result<BTreeMap<BigRational, usize>> {
    table.ker_u_pow_ranks(n)
}

pub fn u_shift(table: &ClassTable, c: usize) -> Result<usize> {
    table.u_shift(c)
}

struct Explorer<'a> {
    g: &'a PlumbingGraph,
    form: &'a IntersectionForm,
    pad: i64,
    state_cap: usize,
    state_to_class: HashMap<(i64, Vec<i64>), usize>,
    classes: Vec<ClassInfo>,
}

impl<'a> Explorer<'a> {
    fn in_region(&self, level: i64, k: &[i64]) -> bool {
        (0..=self.pad).contains(&level) && in_box(self.g, k, self.pad)
    }

    fn on_boundary(&self, level: i64, k: &[i64]) -> bool {
        level == self.pad
            || k
                .iter()
                .zip(self.g.weights())
                .any(|(&ki, &m)| ki.abs() == -m + 2 * self.pad)
    }

    /// Breadth-first closure of the class of `seed` inside the region. The
    /// relation is symmetric step-by-step, so distinct closures never meet;
    /// meeting one would mean the closure from the earlier seed was not
    /// closed.
    fn explore(&mut self, seed: (i64, Vec<i64>)) -> Result<usize> {
        let cid = self.classes.len();
        let delta = self.form.delta(seed.0, &seed.1)?;
        let mut info = ClassInfo {
            representative: seed.clone(),
            delta,
            kill: None,
            members: 0,
            clipped: false,
            shift_target: None,
        };
        let mut top = seed.0;
        let mut queue = VecDeque::new();
        self.state_to_class.insert(seed.clone(), cid);
        queue.push_back(seed);
        while let Some((level, k)) = queue.pop_front() {
            info.members += 1;
            top = top.max(level);
            if (level, &k) < (info.representative.0, &info.representative.1) {
                info.representative = (level, k.clone());
            }
            if self.on_boundary(level, &k) {
                info.clipped = true;
            }
            for (nl, nk) in raw_neighbors(self.form, self.g, level, &k) {
                if !self.in_region(nl, &nk) {
                    info.clipped = true;
                    continue;
                }
                match self.state_to_class.get(&(nl, nk.clone())) {
                    Some(&other) if other != cid => {
                        return Err(Error::Internal(format!(
                            "class closure collided with class {}",
                            other
                        )));
                    }
                    Some(_) => {}
                    None => {
                        if self.state_to_class.len() >= self.state_cap {
                            return Err(Error::StateCapExceeded(self.state_cap));
                        }
                        debug_assert_eq!(
                            self.form.delta(nl, &nk)?,
                            info.delta,
                            "relation must preserve degree"
                        );
                        self.state_to_class.insert((nl, nk.clone()), cid);
                        queue.push_back((nl, nk));
                    }
                }
            }
        }
        if !info.clipped {
            info.kill = Some(top);
        }
        self.classes.push(info);
        Ok(cid)
    }
}

/// Compute the classes of Spin^c structure `t` over levels 0..=budget, with
/// the stated region padding. Seeds are the settled (Good-path) initial-box
/// vectors at every level up to the budget; the closure of those seeds
/// contains every class whose kill level is at most the budget, so an
/// initial-box vector whose level-0 state is absent from the table has kill
/// level > budget.
pub fn build_classes(
    g: &PlumbingGraph,
    form: &IntersectionForm,
    spinc: &SpinCTable,
    t: usize,
    budget: i64,
    margin: i64,
    state_cap: usize,
) -> Result<ClassTable> {
    form.require_negative_definite()?;
    if t >= spinc.count() {
        return Err(Error::SpinCOutOfRange(t, spinc.count()));
    }
    if budget < 0 || margin < 0 {
        return Err(Error::HypothesisViolation(
            "level budget and margin must be nonnegative".into(),
        ));
    }
    let pad = budget + margin;
    let mut ex = Explorer {
        g,
        form,
        pad,
        state_cap,
        state_to_class: HashMap::new(),
        classes: Vec::new(),
    };

    let mut box_vectors = Vec::new();
    let mut gens = Vec::new();
    for k in initial_box(g) {
        if spinc.index_of_vector(g, &k)? != t {
            continue;
        }
        if run_full_path(g, form, &k, PathPolicy::Deterministic, false).is_good() {
            gens.push(k.clone());
        }
        box_vectors.push(k);
    }

    for j in 0..=budget {
        for k in &gens {
            if !ex.state_to_class.contains_key(&(j, k.clone())) {
                ex.explore((j, k.clone()))?;
            }
        }
    }

    for info in ex.classes.iter_mut() {
        let (m, k) = &info.representative;
        info.shift_target = ex.state_to_class.get(&(m + 1, k.clone())).copied();
    }

    let generators: Vec<(Vec<i64>, usize)> = gens
        .iter()
        .map(|k| {
            let cid = ex.state_to_class[&(0, k.clone())];
            (k.clone(), cid)
        })
        .collect();
    // a settled vector's level-0 class is precisely a kill-0 class
    for (k, cid) in &generators {
        if ex.classes[*cid].kill != Some(0) {
            return Err(Error::Internal(format!(
                "settled vector {:?} landed in a class with kill level {:?}",
                k, ex.classes[*cid].kill
            )));
        }
    }
    let box_members: Vec<(Vec<i64>, Option<usize>)> = box_vectors
        .into_iter()
        .map(|k| {
            let cid = ex.state_to_class.get(&(0, k.clone())).copied();
            (k, cid)
        })
        .collect();
    for (k, cid) in &box_members {
        let is_gen = generators.iter().any(|(gk, _)| gk == k);
        let kill0 = cid.is_some_and(|c| ex.classes[c].kill == Some(0));
        if is_gen != kill0 {
            return Err(Error::Internal(format!(
                "settled/kill-0 mismatch at initial-box vector {:?}",
                k
            )));
        }
    }

    Ok(ClassTable {
        spinc_index: t,
        budget,
        margin,
        classes: ex.classes,
        box_members,
        generators,
        states: ex.state_to_class.len(),
        state_to_class: ex.state_to_class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;
    use num_bigint::BigInt;

    const E8: &str = "8; -2 -2 -2 -2 -2 -2 -2 -2; 0-1 0-2 2-3 0-4 4-5 5-6 6-7";
    const S237: &str = "4; -1 -2 -3 -7; 0-1 0-2 0-3";
    const Y12: &str = "5; -2 -2 -2 -3 -3; 0-1 0-2 0-3 0-4";

    fn setup(s: &str) -> (PlumbingGraph, IntersectionForm, SpinCTable) {
        let g = parse_graph(s).unwrap();
        let f = IntersectionForm::new(&g);
        let t = SpinCTable::new(&g, &f).unwrap();
        (g, f, t)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn census_map(pairs: &[(BigRational, usize)]) -> BTreeMap<BigRational, usize> {
        pairs.iter().cloned().collect()
    }

    #[test]
    fn single_vertex_neighbor_rules() {
        let (g, f, _) = setup("1; -2;");
        let n = relation_neighbors(&g, &f, &LeveledVector::new(0, vec![2]));
        assert_eq!(n, vec![LeveledVector::new(0, vec![-2])]);
        let n = relation_neighbors(&g, &f, &LeveledVector::new(0, vec![4]));
        assert_eq!(n, vec![LeveledVector::new(1, vec![0])]);
    }

    #[test]
    fn neighbors_preserve_degree_and_are_symmetric() {
        let (g, f, _) = setup(Y12);
        let samples = [
            LeveledVector::new(0, vec![0, 0, 0, 1, 1]),
            LeveledVector::new(2, vec![0, 2, 2, 3, 3]),
            LeveledVector::new(1, vec![-2, 0, 2, -1, 3]),
        ];
        for x in &samples {
            let dx = f.delta(x.level, &x.k).unwrap();
            for y in relation_neighbors(&g, &f, x) {
                assert_eq!(f.delta(y.level, &y.k).unwrap(), dx);
                assert!(
                    relation_neighbors(&g, &f, &y).contains(x),
                    "asymmetric step {:?} -> {:?}",
                    x,
                    y
                );
            }
        }
    }

    #[test]
    fn s237_printed_chain() {
        let (g, f, _) = setup(S237);
        let chain = [
            LeveledVector::new(1, vec![-1, 0, 1, 5]),
            LeveledVector::new(0, vec![1, 0, 1, -9]),
            LeveledVector::new(0, vec![-1, 2, 3, -7]),
            LeveledVector::new(0, vec![1, -2, 3, -7]),
            LeveledVector::new(0, vec![-1, 0, 5, -5]),
            LeveledVector::new(1, vec![1, 0, -1, -5]),
        ];
        for w in chain.windows(2) {
            assert!(
                relation_neighbors(&g, &f, &w[0]).contains(&w[1]),
                "{:?} !~ {:?}",
                w[0],
                w[1]
            );
        }
    }

    #[test]
    fn e8_budget_zero() {
        let (g, f, sp) = setup(E8);
        let t = build_classes(&g, &f, &sp, 0, 0, 1, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(t.classes.len(), 1);
        assert_eq!(t.classes[0].kill, Some(0));
        assert_eq!(t.classes[0].delta, rat(-2, 1));
        assert_eq!(t.classes[0].representative, (0, vec![0; 8]));
        assert_eq!(t.classes[0].members, 1);
        assert_eq!(t.ker_u_pow_ranks(0).unwrap(), census_map(&[(rat(-2, 1), 1)]));
    }

    #[test]
    fn e8_censuses() {
        let (g, f, sp) = setup(E8);
        let t = build_classes(&g, &f, &sp, 0, 2, 1, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(t.census(0).unwrap(), census_map(&[(rat(-2, 1), 1)]));
        assert_eq!(t.census(1).unwrap(), census_map(&[(rat(0, 1), 1)]));
        assert_eq!(t.census(2).unwrap(), census_map(&[(rat(2, 1), 1)]));
    }

    #[test]
    fn s237_merge_and_censuses() {
        let (g, f, sp) = setup(S237);
        let t = build_classes(&g, &f, &sp, 0, 2, 1, DEFAULT_STATE_CAP).unwrap();
        let c3 = t.class_of_state(0, &[1, 0, -1, -3]).unwrap();
        let c5 = t.class_of_state(0, &[1, 0, -1, -5]).unwrap();
        assert_ne!(c3, c5);
        assert_eq!(t.classes[c3].kill, Some(0));
        assert_eq!(t.classes[c5].kill, Some(0));
        // their level-1 shifts merge
        let s3 = t.u_shift(c3).unwrap();
        let s5 = t.u_shift(c5).unwrap();
        assert_eq!(s3, s5);
        assert_eq!(t.classes[s3].delta, rat(2, 1));
        assert_eq!(t.classes[s3].kill, Some(1));
        // the full printed chain lives in that class
        for (m, k) in [
            (1, vec![-1, 0, 1, 5]),
            (0, vec![1, 0, 1, -9]),
            (0, vec![-1, 0, 5, -5]),
            (1, vec![1, 0, -1, -5]),
        ] {
            assert_eq!(t.class_of_state(m, &k), Some(s3));
        }
        assert_eq!(t.classes[s3].members, 80);
        assert_eq!(t.census(0).unwrap(), census_map(&[(rat(0, 1), 2)]));
        assert_eq!(t.census(1).unwrap(), census_map(&[(rat(2, 1), 1)]));
        assert_eq!(t.census(2).unwrap(), census_map(&[(rat(4, 1), 1)]));
        assert_eq!(
            t.ker_u_pow_ranks(1).unwrap(),
            census_map(&[(rat(0, 1), 2), (rat(2, 1), 1)])
        );
    }

    #[test]
    fn s357_printed_merges() {
        let (g, f, sp) = setup("seifert -2 3/1 5/4 7/6");
        let t = build_classes(&g, &f, &sp, 0, 2, 1, DEFAULT_STATE_CAP).unwrap();
        let k1 = [0, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0];
        let k2 = [0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0];
        let k3 = [0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, -2];
        let k4 = [0, 1, 0, 0, 0, -2, 0, 0, 0, 0, 0, 0];
        let a = t.class_of_state(1, &k3).unwrap();
        assert_eq!(t.class_of_state(1, &k4), Some(a));
        assert_eq!(t.classes[a].delta, rat(0, 1));
        assert_eq!(t.classes[a].kill, Some(1));
        assert_eq!(t.classes[a].members, 3830);
        let b = t.class_of_state(1, &k1).unwrap();
        assert_eq!(t.class_of_state(1, &k2), Some(b));
        assert_eq!(t.class_of_state(2, &k3), Some(b));
        assert_eq!(t.class_of_state(2, &k4), Some(b));
        assert_eq!(t.classes[b].delta, rat(2, 1));
        assert_eq!(t.classes[b].kill, Some(2));
        assert_eq!(t.classes[b].members, 54280);
        assert_eq!(
            t.census(0).unwrap(),
            census_map(&[(rat(-2, 1), 2), (rat(0, 1), 2)])
        );
        assert_eq!(t.census(1).unwrap(), census_map(&[(rat(0, 1), 1)]));
        assert_eq!(t.census(2).unwrap(), census_map(&[(rat(2, 1), 1)]));
    }

    #[test]
    fn y12_class_of_interest() {
        let (g, f, sp) = setup(Y12);
        let ti = sp.index_of_vector(&g, &[0, 0, 0, 1, 1]).unwrap();
        let t = build_classes(&g, &f, &sp, ti, 2, 1, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(t.census(0).unwrap(), census_map(&[(rat(-3, 4), 2)]));
        assert_eq!(t.census(1).unwrap(), census_map(&[(rat(5, 4), 1)]));
        assert_eq!(t.census(2).unwrap(), census_map(&[(rat(13, 4), 1)]));
        assert_eq!(t.ker_u_pow_ranks(0).unwrap(), census_map(&[(rat(-3, 4), 2)]));

        // the six initial-box vectors and their fates
        let fates: Vec<(Vec<i64>, Option<i64>)> = t
            .box_members
            .iter()
            .map(|(k, c)| (k.clone(), c.and_then(|c| t.classes[c].kill)))
            .collect();
        let expect: Vec<(Vec<i64>, Option<i64>)> = vec![
            (vec![0, 0, 0, -1, -1], Some(0)),
            (vec![0, 0, 0, 1, 1], Some(0)),
            (vec![0, 0, 0, 3, 3], Some(2)),
            (vec![0, 2, 2, -1, -1], Some(1)),
            (vec![0, 2, 2, 1, 1], None),
            (vec![0, 2, 2, 3, 3], None),
        ];
        let mut sorted = fates.clone();
        sorted.sort();
        assert_eq!(sorted, expect);

        // U (x) K ~ U (x) -K for the two settled vectors
        let cp = t.class_of_state(1, &[0, 0, 0, 1, 1]).unwrap();
        assert_eq!(t.class_of_state(1, &[0, 0, 0, -1, -1]), Some(cp));
        assert_eq!(t.classes[cp].members, 38);
        assert_eq!(t.class_of_state(0, &[4, -2, -2, -3, -3]), Some(cp));
        // kill-2 class
        let c2 = t.class_of_state(0, &[0, 0, 0, 3, 3]).unwrap();
        assert_eq!(t.classes[c2].members, 92);
        // shift plumbing
        let a = t.class_of_state(0, &[0, 0, 0, 1, 1]).unwrap();
        let b = t.class_of_state(0, &[0, 0, 0, -1, -1]).unwrap();
        assert_ne!(a, b);
        assert_eq!(t.u_shift(a).unwrap(), cp);
        assert_eq!(t.u_shift(b).unwrap(), cp);
        assert_eq!(t.classes[cp].delta, &t.classes[a].delta + rat(2, 1));
    }

    #[test]
    fn unsound_request_refused() {
        let (g, f, sp) = setup(E8);
        let t = build_classes(&g, &f, &sp, 0, 1, 1, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(
            t.census(2).unwrap_err(),
            Error::UnsoundRequest { requested: 2, budget: 1 }
        );
        assert_eq!(
            t.ker_u_pow_ranks(2).unwrap_err(),
            Error::UnsoundRequest { requested: 2, budget: 1 }
        );
    }

    #[test]
    fn state_cap_refusal() {
        let (g, f, sp) = setup(Y12);
        let ti = sp.index_of_vector(&g, &[0, 0, 0, 1, 1]).unwrap();
        assert_eq!(
            build_classes(&g, &f, &sp, ti, 2, 1, 10).unwrap_err(),
            Error::StateCapExceeded(10)
        );
    }

    #[test]
    fn bad_spinc_index_refused() {
        let (g, f, sp) = setup(E8);
        assert_eq!(
            build_classes(&g, &f, &sp, 5, 1, 1, DEFAULT_STATE_CAP).unwrap_err(),
            Error::SpinCOutOfRange(5, 1)
        );
    }

    #[test]
    fn census_matches_settled_grades() {
        // kill-0 census must equal the grade census of the settled vectors
        for s in [E8, S237, Y12, "5; -2 -2 -2 -2 -2; 0-1 1-2 2-3 3-4"] {
            let (g, f, sp) = setup(s);
            for t in 0..sp.count() {
                let table = build_classes(&g, &f, &sp, t, 1, 1, DEFAULT_STATE_CAP).unwrap();
                let gens =
                    crate::fullpath::ker_u_generators(&g, &f, &sp, Some(t)).unwrap();
                let mut grade_census: BTreeMap<BigRational, usize> = BTreeMap::new();
                for (_, grade) in gens {
                    *grade_census.entry(grade).or_insert(0) += 1;
                }
                assert_eq!(table.census(0).unwrap(), grade_census, "{} class {}", s, t);
            }
        }
    }

    #[test]
    fn empty_graph_single_class() {
        let (g, f, sp) = setup("0;;");
        let t = build_classes(&g, &f, &sp, 0, 1, 1, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(t.classes.len(), 2); // (0, ()) and (1, ())
        assert_eq!(t.census(0).unwrap(), census_map(&[(rat(0, 1), 1)]));
        assert_eq!(t.census(1).unwrap(), census_map(&[(rat(2, 1), 1)]));
    }
}
