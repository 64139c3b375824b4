//! Full paths: repeatedly push a characteristic vector off the upper wall of
//! its box until it either settles strictly inside (Good) or overshoots (Bad).
//! Good endpoints of initial-box vectors are the Ker U basis.

use crate::error::Result;
use crate::form::IntersectionForm;
use crate::graph::PlumbingGraph;
use crate::lattice::{add_2pd, initial_box, SpinCTable};
use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathPolicy {
    /// Always fire the lowest-index eligible vertex.
    Deterministic,
    /// Fire a uniformly random eligible vertex from a seeded stream. The
    /// terminal classification (and the Good endpoint) never depends on the
    /// choices; only the transcript does.
    Seeded(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Terminal {
    /// Settled: m(v) <= <L, v> <= -m(v) - 2 at every vertex.
    Good(Vec<i64>),
    /// Overshot: <K, witness> > -m(witness).
    Bad { witness: usize, last: Vec<i64> },
}

#[derive(Debug, Clone)]
pub struct PathResult {
    pub start: Vec<i64>,
    /// Number of firings performed.
    pub steps: usize,
    /// Vertices fired, in order; recorded only on request.
    pub fired: Option<Vec<usize>>,
    /// Every vector visited, start and terminal included; recorded only on
    /// request.
    pub vectors: Option<Vec<Vec<i64>>>,
    pub terminal: Terminal,
}

impl PathResult {
    pub fn is_good(&self) -> bool {
        matches!(self.terminal, Terminal::Good(_))
    }

    pub fn final_vector(&self) -> &[i64] {
        match &self.terminal {
            Terminal::Good(l) => l,
            Terminal::Bad { last, .. } => last,
        }
    }
}

fn choose(ready: &[usize], rng: Option<&mut ChaCha8Rng>) -> usize {
    match rng {
        None => ready[0],
        Some(r) => ready[r.gen_range(0..ready.len())],
    }
}

fn step_inner(
    g: &PlumbingGraph,
    form: &IntersectionForm,
    k: &[i64],
    rng: Option<&mut ChaCha8Rng>,
) -> Option<(usize, Vec<i64>)> {
    let ready: Vec<usize> = (0..g.n()).filter(|&v| k[v] == -g.weight(v)).collect();
    if ready.is_empty() {
        return None;
    }
    let v = choose(&ready, rng);
    Some((v, add_2pd(form, k, v, 1)))
}

/// One firing: if some vertex has <K, v> = -m(v), fire one (policy picks
/// which) and return (vertex, K + 2 PD[v]); otherwise K is terminal for the
/// caller to classify.
pub fn path_step(
    g: &PlumbingGraph,
    form: &IntersectionForm,
    k: &[i64],
    policy: PathPolicy,
) -> Option<(usize, Vec<i64>)> {
    match policy {
        PathPolicy::Deterministic => step_inner(g, form, k, None),
        PathPolicy::Seeded(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            step_inner(g, form, k, Some(&mut rng))
        }
    }
}

/// Iterate firings from an initial-box vector until Good or Bad. Terminates:
/// every vector stays inside a finite region, and a repeat would force a
/// nonzero integer vector t with Q t = 0, impossible for nonsingular Q.
pub fn run_full_path(
    g: &PlumbingGraph,
    form: &IntersectionForm,
    k0: &[i64],
    policy: PathPolicy,
    record: bool,
) -> PathResult {
    let mut rng = match policy {
        PathPolicy::Deterministic => None,
        PathPolicy::Seeded(s) => Some(ChaCha8Rng::seed_from_u64(s)),
    };
    let mut k = k0.to_vec();
    let mut steps = 0usize;
    let mut fired = if record { Some(Vec::new()) } else { None };
    let mut vectors = if record { Some(vec![k.clone()]) } else { None };
    let square0 = if cfg!(debug_assertions) {
        form.square(&k).ok()
    } else {
        None
    };
    let terminal = loop {
        if let Some(witness) = (0..g.n()).find(|&v| k[v] > -g.weight(v)) {
            break Terminal::Bad { witness, last: k.clone() };
        }
        match step_inner(g, form, &k, rng.as_mut()) {
            None => {
                debug_assert!(
                    (0..g.n()).all(|v| g.weight(v) <= k[v] && k[v] <= -g.weight(v) - 2),
                    "settled vector must lie strictly inside the box"
                );
                break Terminal::Good(k.clone());
            }
            Some((v, next)) => {
                k = next;
                steps += 1;
                if let Some(f) = fired.as_mut() {
                    f.push(v);
                }
                if let Some(vs) = vectors.as_mut() {
                    vs.push(k.clone());
                }
            }
        }
    };
    if let Some(sq) = &square0 {
        debug_assert_eq!(form.square(&k).as_ref().ok(), Some(sq), "firing preserves K^2");
    }
    PathResult {
        start: k0.to_vec(),
        steps,
        fired,
        vectors,
        terminal,
    }
}

/// All initial-box vectors (restricted to Spin^c class `t` if given) whose
/// full path ends Good, each paired with its grade -(K^2 + n)/4. These index
/// a basis of Ker U. Output is in lexicographic order of the start vector.
pub fn ker_u_generators(
    g: &PlumbingGraph,
    form: &IntersectionForm,
    table: &SpinCTable,
    t: Option<usize>,
) -> Result<Vec<(Vec<i64>, BigRational)>> {
    form.require_negative_definite()?;
    let mut out = Vec::new();
    for k0 in initial_box(g) {
        if let Some(t) = t {
            if table.index_of_vector(g, &k0)? != t {
                continue;
            }
        }
        if run_full_path(g, form, &k0, PathPolicy::Deterministic, false).is_good() {
            let grade = form.grade0(&k0)?;
            out.push((k0, grade));
        }
    }
    Ok(out)
}
