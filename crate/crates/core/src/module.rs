//! Assembly of the final graded Z[U]-module (one tower plus a finite part
//! per Spin^c structure), the d-invariant, and the independent verification
//! oracles: short-vector double counting and blow-down invariance.

use crate::dcomb::{build_classes, ClassTable, DEFAULT_STATE_CAP};
use crate::error::{Error, Result};
use crate::form::{det_by_tree_expansion, IntersectionForm};
use crate::fullpath::{ker_u_generators, run_full_path, PathPolicy};
use crate::graph::{PlumbingGraph, Regime};
use crate::lattice::{enumerate_box, initial_box, SpinCClass, SpinCTable};
use num::BigRational;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FiniteSummand {
    pub bottom: BigRational,
    pub u_length: i64,
    pub mult: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedModule {
    pub spinc: SpinCClass,
    /// Bottom degree of the infinite tower; equals d(-Y, t) when at most two
    /// vertices are bad.
    pub tower_bottom: BigRational,
    /// Cyclic summands Z[U]/U^length based at `bottom`, sorted by
    /// (bottom, u_length).
    pub finite: Vec<FiniteSummand>,
    pub regime: Regime,
    pub budget_used: i64,
    pub states_explored: usize,
}

impl GradedModule {
    pub fn hf_red_rank(&self) -> usize {
        self.finite
            .iter()
            .map(|s| s.mult * s.u_length as usize)
            .sum()
    }

    pub fn d_y(&self) -> BigRational {
        -self.tower_bottom.clone()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AssembleOptions {
    pub max_budget: i64,
    pub margin: i64,
    pub state_cap: usize,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions {
            max_budget: 12,
            margin: 1,
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

fn two() -> BigRational {
    BigRational::from(BigInt::from(2))
}

fn census_vec(table: &ClassTable, up_to: i64) -> Result<Vec<BTreeMap<BigRational, usize>>> {
    (0..=up_to).map(|n| table.census(n)).collect()
}

/// Decompose the finite part from exact-kill censuses g_0..g_N, given the
/// tower bottom b: the number of finite summands at bottom e with length > k
/// is f_e(k) = g_k(e + 2k) - [e == b], so length-l multiplicities are
/// f_e(l-1) - f_e(l).
fn finite_from_censuses(
    censuses: &[BTreeMap<BigRational, usize>],
    bottom: &BigRational,
) -> Result<Vec<FiniteSummand>> {
    let top = censuses.len() as i64 - 1;
    let mut bottoms: Vec<BigRational> = Vec::new();
    for (k, c) in censuses.iter().enumerate() {
        for d in c.keys() {
            let e = d - BigRational::from(BigInt::from(2 * k as i64));
            if !bottoms.contains(&e) {
                bottoms.push(e);
            }
        }
    }
    bottoms.sort();
    let mut out = Vec::new();
    for e in bottoms {
        let is_tower = e == *bottom;
        let mut f = Vec::with_capacity(top as usize + 1);
        for k in 0..=top {
            let d = &e + BigRational::from(BigInt::from(2 * k));
            let g = censuses[k as usize].get(&d).copied().unwrap_or(0) as i64;
            let v = g - i64::from(is_tower);
            if v < 0 {
                return Err(Error::Internal(format!(
                    "tower unit missing from kill-{} census at degree {}",
                    k, d
                )));
            }
            f.push(v);
        }
        for l in 1..=top {
            let c = f[l as usize - 1] - f[l as usize];
            if c < 0 {
                return Err(Error::Internal(
                    "finite census increases with U-power".into(),
                ));
            }
            if c > 0 {
                out.push(FiniteSummand {
                    bottom: e.clone(),
                    u_length: l,
                    mult: c as usize,
                });
            }
        }
    }
    Ok(out)
}

/// Per-degree rank of Ker U^(n+1) implied by the module decomposition.
pub fn implied_census(m: &GradedModule, n: i64) -> BTreeMap<BigRational, usize> {
    let mut out = BTreeMap::new();
    for k in 0..=n {
        let d = &m.tower_bottom + BigRational::from(BigInt::from(2 * k));
        *out.entry(d).or_insert(0) += 1;
    }
    for s in &m.finite {
        for k in 0..=n.min(s.u_length - 1) {
            let d = &s.bottom + BigRational::from(BigInt::from(2 * k));
            *out.entry(d).or_insert(0) += s.mult;
        }
    }
    out
}

fn single_entry(c: &BTreeMap<BigRational, usize>) -> Option<&BigRational> {
    if c.len() == 1 {
        let (d, &n) = c.iter().next().unwrap();
        if n == 1 {
            return Some(d);
        }
    }
    None
}

/// Compute HF^+(-Y(G), t) as a graded module by raising the level budget
/// until the class censuses lock into one tower step per level with an
/// unchanged finite part, certifying each budget by margin stability.
pub fn assemble(
    g: &PlumbingGraph,
    form: &IntersectionForm,
    spinc: &SpinCTable,
    t: usize,
    opts: &AssembleOptions,
) -> Result<GradedModule> {
    form.require_negative_definite()?;
    if t >= spinc.count() {
        return Err(Error::SpinCOutOfRange(t, spinc.count()));
    }
    let regime = Regime::from_bad_count(g.bad_vertices().len());
    for n_budget in 2..=opts.max_budget {
        let table = build_classes(g, form, spinc, t, n_budget, opts.margin, opts.state_cap)?;
        let wider = build_classes(
            g,
            form,
            spinc,
            t,
            n_budget,
            opts.margin + 1,
            opts.state_cap,
        )?;
        let censuses = census_vec(&table, n_budget)?;
        let censuses_wider = census_vec(&wider, n_budget)?;
        if censuses != censuses_wider {
            return Err(Error::MarginInstability(opts.margin, opts.margin + 1));
        }
        let (head, prev) = (
            &censuses[n_budget as usize],
            &censuses[n_budget as usize - 1],
        );
        let (d_head, d_prev) = match (single_entry(head), single_entry(prev)) {
            (Some(a), Some(b)) => (a, b),
            _ => continue,
        };
        if d_head - d_prev != two() {
            continue;
        }
        let bottom = d_head - BigRational::from(BigInt::from(2 * n_budget));
        let finite = finite_from_censuses(&censuses, &bottom)?;
        let finite_prev = finite_from_censuses(&censuses[..n_budget as usize], &bottom)?;
        if finite != finite_prev {
            continue;
        }
        let module = GradedModule {
            spinc: SpinCClass {
                index: t,
                residue: spinc.residue(t).to_vec(),
            },
            tower_bottom: bottom.clone(),
            finite,
            regime,
            budget_used: n_budget,
            states_explored: table.states,
        };
        // cross-check against the independent max-square computation
        if g.bad_vertices().len() <= 2 {
            let (d_y, _) = d_invariant(g, form, spinc, t, false)?;
            if -&d_y != bottom {
                return Err(Error::Internal(format!(
                    "tower bottom {} disagrees with -d_Y = {}",
                    bottom, -&d_y
                )));
            }
        }
        // the decomposition must reproduce every census it was read from
        for n in 0..=n_budget {
            if implied_census(&module, n) != table.ker_u_pow_ranks(n)? {
                return Err(Error::Internal(format!(
                    "module decomposition does not reproduce the Ker U^{} census",
                    n + 1
                )));
            }
        }
        return Ok(module);
    }
    Err(Error::StabilizationFailed(opts.max_budget))
}

/// d(Y, t) = max over characteristic vectors of t of (K^2 + n)/4, searched
/// over the settled initial-box vectors; `exhaustive` widens the search to
/// the whole box |<K, v>| <= -m(v) with no settledness filter. Also returns
/// d(-Y, t) = -d(Y, t). Requires at most two bad vertices.
pub fn d_invariant(
    g: &PlumbingGraph,
    form: &IntersectionForm,
    spinc: &SpinCTable,
    t: usize,
    exhaustive: bool,
) -> Result<(BigRational, BigRational)> {
    form.require_negative_definite()?;
    if t >= spinc.count() {
        return Err(Error::SpinCOutOfRange(t, spinc.count()));
    }
    let bad = g.bad_vertices();
    if bad.len() > 2 {
        return Err(Error::HypothesisViolation(format!(
            "d-invariant requires at most two bad vertices (m(v) > -deg(v)); found {}: {:?}",
            bad.len(),
            bad
        )));
    }
    let mut best: Option<BigRational> = None;
    if exhaustive {
        for k in enumerate_box(g, 0) {
            if spinc.index_of_vector(g, &k)? != t {
                continue;
            }
            let v = -form.grade0(&k)?;
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
    } else {
        for (_, grade) in ker_u_generators(g, form, spinc, Some(t))? {
            let v = -grade;
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
    }
    let d_y = best.ok_or_else(|| {
        Error::Internal("no candidate vector found in the Spin^c class".into())
    })?;
    let d_minus = -d_y.clone();
    Ok((d_y, d_minus))
}

fn short_recurrence(g: &PlumbingGraph) -> BigInt {
    if g.n() == 0 {
        return BigInt::from(1);
    }
    let sub = |drop: &[usize]| g.without(drop).expect("subgraph of a forest is a forest");
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) == 0) {
        return BigInt::from(-g.weight(v)) * short_recurrence(&sub(&[v]));
    }
    let v = (0..g.n()).find(|&v| g.degree(v) == 1).expect("forest has a leaf");
    let w = g.neighbors(v)[0];
    BigInt::from(-g.weight(v)) * short_recurrence(&sub(&[v])) - short_recurrence(&sub(&[v, w]))
}

/// Count initial-box vectors with settled full paths two ways: directly, and
/// by deleting a leaf and its neighbor via
/// |Short(G)| = -m(v) |Short(G - v)| - |Short(G - v - w)|.
/// Under the hypothesis m(v) < -deg(v) at every vertex both counts equal
/// |H_1| = |det Q|.
pub fn short_vector_count(g: &PlumbingGraph) -> Result<(BigInt, BigInt)> {
    let violating: Vec<usize> = (0..g.n())
        .filter(|&v| g.weight(v) >= -(g.degree(v) as i64))
        .collect();
    if !violating.is_empty() {
        return Err(Error::HypothesisViolation(format!(
            "short-vector count requires m(v) < -deg(v) at every vertex; fails at {:?}",
            violating
        )));
    }
    let form = IntersectionForm::new(g);
    let mut direct = BigInt::zero();
    for k in initial_box(g) {
        if run_full_path(g, &form, &k, PathPolicy::Deterministic, false).is_good() {
            direct += 1;
        }
    }
    let recurrence = short_recurrence(g);
    let h1 = det_by_tree_expansion(g).abs();
    if direct != recurrence || direct != h1 {
        return Err(Error::Internal(format!(
            "short-vector counts disagree: direct {}, recurrence {}, |det Q| {}",
            direct, recurrence, h1
        )));
    }
    Ok((direct, recurrence))
}

pub type ModuleShape = (BigRational, Vec<FiniteSummand>);

#[derive(Debug, Clone)]
pub struct BlowdownReport {
    pub vertex: usize,
    pub matched: bool,
    /// Sorted (tower_bottom, finite) shapes of the side with the new -1
    /// vertex attached at `vertex`.
    pub with_new_vertex: Vec<ModuleShape>,
    /// Sorted shapes of the side with the weight at `vertex` raised by 1.
    pub reweighted: Vec<ModuleShape>,
}

fn module_shapes(g: &PlumbingGraph, opts: &AssembleOptions) -> Result<Vec<ModuleShape>> {
    let summary = hf_summary(g, opts)?;
    let mut shapes: Vec<ModuleShape> = summary
        .modules
        .into_iter()
        .map(|m| (m.tower_bottom, m.finite))
        .collect();
    shapes.sort();
    Ok(shapes)
}

/// Attach a new -1 sphere at `v` (G') and, independently, raise the weight
/// at `v` by one (G+1); the two plumbings describe the same 3-manifold, so
/// their graded modules must agree as multisets over Spin^c structures.
/// Refuses when G+1 is not negative definite.
pub fn verify_blowdown(
    g: &PlumbingGraph,
    v: usize,
    opts: &AssembleOptions,
) -> Result<BlowdownReport> {
    let (gprime, gplus) = g.blow_down_pair(v)?;
    let fplus = IntersectionForm::new(&gplus);
    if !fplus.is_negative_definite() {
        return Err(Error::NotNegativeDefinite(format!(
            " after adding 1 to the weight of vertex {}",
            v
        )));
    }
    let fprime = IntersectionForm::new(&gprime);
    if !fprime.is_negative_definite() {
        return Err(Error::Internal(
            "attaching a -1 sphere changed definiteness".into(),
        ));
    }
    if fprime.det().abs() != fplus.det().abs() {
        return Err(Error::Internal(format!(
            "blow-down determinant mismatch: {} vs {}",
            fprime.det(),
            fplus.det()
        )));
    }
    let with_new_vertex = module_shapes(&gprime, opts)?;
    let reweighted = module_shapes(&gplus, opts)?;
    let matched = with_new_vertex == reweighted;
    Ok(BlowdownReport {
        vertex: v,
        matched,
        with_new_vertex,
        reweighted,
    })
}

#[derive(Debug, Clone)]
pub struct HfSummary {
    pub graph_hash: String,
    pub regime: Regime,
    pub modules: Vec<GradedModule>,
    pub hf_red_total_rank: usize,
}

/// Every Spin^c structure assembled, plus the total rank of the finite part.
/// When no vertex is bad the finite part must vanish and the number of
/// towers equals |H_1|, which pins the rank of the hat-flavor group.
pub fn hf_summary(g: &PlumbingGraph, opts: &AssembleOptions) -> Result<HfSummary> {
    let form = IntersectionForm::new(g);
    form.require_negative_definite()?;
    let spinc = SpinCTable::new(g, &form)?;
    let mut modules = Vec::with_capacity(spinc.count());
    for t in 0..spinc.count() {
        modules.push(assemble(g, &form, &spinc, t, opts)?);
    }
    let hf_red_total_rank = modules.iter().map(|m| m.hf_red_rank()).sum();
    let regime = Regime::from_bad_count(g.bad_vertices().len());
    if g.bad_vertices().is_empty() {
        if hf_red_total_rank != 0 {
            return Err(Error::Internal(
                "graph with no bad vertices produced a nonzero finite part".into(),
            ));
        }
        if BigInt::from(modules.len()) != form.h1_order()? {
            return Err(Error::Internal(
                "tower count does not match |H_1| on a graph with no bad vertices".into(),
            ));
        }
    }
    if regime == Regime::Exact {
        for m in &modules {
            for s in &m.finite {
                let diff = &s.bottom - &m.tower_bottom;
                let even = diff.is_integer() && num::Integer::is_even(&diff.to_integer());
                if !even {
                    return Err(Error::Internal(format!(
                        "mixed mod-2 degrees within Spin^c class {}: tower {} vs summand {}",
                        m.spinc.index, m.tower_bottom, s.bottom
                    )));
                }
            }
        }
    }
    Ok(HfSummary {
        graph_hash: g.hash(),
        regime,
        modules,
        hf_red_total_rank,
    })
}
