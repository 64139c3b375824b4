//! Plumbing graphs: weighted forests of spheres, their parsing, validation,
//! and the graph-level transforms used by the verification oracles.

use crate::dsu::Dsu;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// A weighted forest. Vertex order is declaration order and is the canonical
/// tie-break order everywhere downstream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlumbingGraph {
    weights: Vec<i64>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl PlumbingGraph {
    pub fn new(weights: Vec<i64>, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = weights.len();
        for e in edges.iter_mut() {
            if e.0 >= n {
                return Err(Error::VertexOutOfRange(e.0, n));
            }
            if e.1 >= n {
                return Err(Error::VertexOutOfRange(e.1, n));
            }
            if e.0 == e.1 {
                return Err(Error::Parse(format!("self-loop at vertex {}", e.0)));
            }
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parse("duplicate edge".into()));
        }
        let mut dsu = Dsu::new(n);
        for &(a, b) in &edges {
            if dsu.union(a, b).is_none() {
                return Err(Error::NotAForest);
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        Ok(PlumbingGraph {
            weights,
            edges,
            adj,
        })
    }

    /// Star-shaped graph: center first, then each leg chain in order, each leg
    /// listed from its attaching vertex outward.
    pub fn star(center: i64, legs: &[Vec<i64>]) -> Result<Self> {
        let mut weights = vec![center];
        let mut edges = Vec::new();
        for leg in legs {
            let mut prev = 0usize;
            for &w in leg {
                let id = weights.len();
                weights.push(w);
                edges.push((prev, id));
                prev = id;
            }
        }
        PlumbingGraph::new(weights, edges)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, v: usize) -> i64 {
        self.weights[v]
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// A vertex is bad when m(v) > -d(v).
    pub fn is_bad(&self, v: usize) -> bool {
        self.weights[v] > -(self.degree(v) as i64)
    }

    pub fn bad_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.is_bad(v)).collect()
    }

    /// Removes a set of vertices, renumbering the rest in order. Used by the
    /// short-vector recurrence.
    pub fn without(&self, drop: &[usize]) -> Result<Self> {
        let mut keep = vec![true; self.n()];
        for &v in drop {
            keep[v] = false;
        }
        let mut remap = vec![usize::MAX; self.n()];
        let mut weights = Vec::new();
        for v in 0..self.n() {
            if keep[v] {
                remap[v] = weights.len();
                weights.push(self.weights[v]);
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| keep[a] && keep[b])
            .map(|&(a, b)| (remap[a], remap[b]))
            .collect();
        PlumbingGraph::new(weights, edges)
    }

    /// The blow-down comparison pair: G'(v) adds a fresh (-1)-weighted vertex
    /// attached only to v; G+1(v) instead raises the weight at v by one.
    /// Their boundary three-manifolds coincide, which the verify suite checks
    /// at the graded-module level.
    pub fn blow_down_pair(&self, v: usize) -> Result<(Self, Self)> {
        if v >= self.n() {
            return Err(Error::VertexOutOfRange(v, self.n()));
        }
        let mut wp = self.weights.clone();
        let mut ep = self.edges.clone();
        wp.push(-1);
        ep.push((v, self.n()));
        let gprime = PlumbingGraph::new(wp, ep)?;
        let mut wq = self.weights.clone();
        wq[v] += 1;
        let gplus = PlumbingGraph::new(wq, self.edges.clone())?;
        Ok((gprime, gplus))
    }

    /// Canonical text form: the compact format with normalized edge order.
    pub fn canonical_string(&self) -> String {
        let ws: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        let es: Vec<String> = self
            .edges
            .iter()
            .map(|&(a, b)| format!("{}-{}", a, b))
            .collect();
        format!("{}; {}; {}", self.n(), ws.join(" "), es.join(" "))
    }

    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.canonical_string().as_bytes());
        hex::encode(h.finalize())
    }
}

/// How much of the boundary three-manifold's Heegaard Floer homology the
/// computed group is known to capture, by bad-vertex count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "even-part-only")]
    EvenPartOnly,
    #[serde(rename = "outside-theorems")]
    OutsideTheorems,
}

impl Regime {
    pub fn from_bad_count(bad: usize) -> Self {
        match bad {
            0 | 1 => Regime::Exact,
            2 => Regime::EvenPartOnly,
            _ => Regime::OutsideTheorems,
        }
    }

    /// Interpretation banner for reports.
    pub fn claim(&self) -> &'static str {
        match self {
            Regime::Exact => "this is HF+(-Y(G))",
            Regime::EvenPartOnly => "this is HF+_ev(-Y(G))",
            Regime::OutsideTheorems => "Comb+(G) only - no Floer identification claimed",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Exact => "exact",
            Regime::EvenPartOnly => "even-part-only",
            Regime::OutsideTheorems => "outside-theorems",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphReport {
    pub n: usize,
    pub is_forest: bool,
    pub is_negative_definite: bool,
    pub bad_vertices: Vec<usize>,
    pub regime: Regime,
    pub det: String,
    /// |det Q|; absent when the form is degenerate.
    pub h1_order: Option<String>,
    pub graph_hash: String,
}

pub fn analyze(g: &PlumbingGraph) -> GraphReport {
    let form = crate::form::IntersectionForm::new(g);
    let det = form.det().clone();
    let h1_order = if det == BigInt::from(0) {
        None
    } else {
        Some(det.magnitude().to_string())
    };
    let bad = g.bad_vertices();
    GraphReport {
        n: g.n(),
        is_forest: true,
        is_negative_definite: form.is_negative_definite(),
        regime: Regime::from_bad_count(bad.len()),
        bad_vertices: bad,
        det: det.to_string(),
        h1_order,
        graph_hash: g.hash(),
    }
}

#[derive(Deserialize)]
struct JsonVertex {
    id: usize,
    weight: i64,
}

#[derive(Deserialize)]
struct JsonGraph {
    vertices: Vec<JsonVertex>,
    edges: Vec<(usize, usize)>,
}

/// Parses any of the three accepted formats:
/// compact `<n>; <w_0> ... <w_{n-1}>; <i>-<j> ...`,
/// JSON `{"vertices":[{"id":0,"weight":-2},...],"edges":[[0,1],...]}`,
/// or Seifert `seifert <e0> <p1>/<q1> <p2>/<q2> ...`.
pub fn parse_graph(input: &str) -> Result<PlumbingGraph> {
    let s = input.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty input".into()));
    }
    if s.starts_with('{') {
        return parse_json(s);
    }
    if s.starts_with("seifert") {
        return parse_seifert(s);
    }
    parse_compact(s)
}

fn parse_compact(s: &str) -> Result<PlumbingGraph> {
    let sections: Vec<&str> = s.split(';').collect();
    if sections.len() != 3 {
        return Err(Error::Parse(format!(
            "expected 3 ';'-separated sections (n; weights; edges), found {}",
            sections.len()
        )));
    }
    let n: usize = sections[0]
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad vertex count {:?}", sections[0].trim())))?;
    let mut weights = Vec::with_capacity(n);
    for (i, tok) in sections[1].split_whitespace().enumerate() {
        let w: i64 = tok
            .parse()
            .map_err(|_| Error::Parse(format!("weight token {} ({:?}) is not an integer", i, tok)))?;
        weights.push(w);
    }
    if weights.len() != n {
        return Err(Error::Parse(format!(
            "declared {} vertices but listed {} weights",
            n,
            weights.len()
        )));
    }
    let mut edges = Vec::new();
    for (i, tok) in sections[2].split_whitespace().enumerate() {
        let (a, b) = tok
            .split_once('-')
            .ok_or_else(|| Error::Parse(format!("edge token {} ({:?}) is not of the form i-j", i, tok)))?;
        let a: usize = a
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("edge token {} ({:?}): bad endpoint", i, tok)))?;
        let b: usize = b
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("edge token {} ({:?}): bad endpoint", i, tok)))?;
        edges.push((a, b));
    }
    PlumbingGraph::new(weights, edges)
}

fn parse_json(s: &str) -> Result<PlumbingGraph> {
    let jg: JsonGraph = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    for (i, v) in jg.vertices.iter().enumerate() {
        if v.id != i {
            return Err(Error::Parse(format!(
                "vertex ids must be 0..n-1 in declaration order; position {} has id {}",
                i, v.id
            )));
        }
    }
    let weights = jg.vertices.iter().map(|v| v.weight).collect();
    PlumbingGraph::new(weights, jg.edges)
}

fn parse_seifert(s: &str) -> Result<PlumbingGraph> {
    let mut toks = s.split_whitespace();
    toks.next(); // literal "seifert"
    let e0: i64 = toks
        .next()
        .ok_or_else(|| Error::Parse("seifert form needs a central weight".into()))?
        .parse()
        .map_err(|_| Error::Parse("central weight is not an integer".into()))?;
    let mut legs = Vec::new();
    for tok in toks {
        let (p, q) = tok
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("Seifert invariant {:?} is not of the form p/q", tok)))?;
        let p: i64 = p
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {:?}", tok)))?;
        let q: i64 = q
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {:?}", tok)))?;
        legs.push((p, q));
    }
    seifert_to_star(e0, &legs)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Expands Seifert invariants into the star-shaped plumbing: center weight e0,
/// one leg per pair with weights -a_1..-a_s from the negative continued
/// fraction p/q = a_1 - 1/(a_2 - 1/(...)), all a_j >= 2, attached at the -a_1
/// end.
pub fn seifert_to_star(e0: i64, legs: &[(i64, i64)]) -> Result<PlumbingGraph> {
    let mut chains = Vec::new();
    for &(p, q) in legs {
        if p <= q || q < 1 {
            return Err(Error::Parse(format!(
                "Seifert pair {}/{} requires p > q >= 1",
                p, q
            )));
        }
        if gcd(p, q) != 1 {
            return Err(Error::Parse(format!(
                "Seifert pair {}/{} is not in lowest terms",
                p, q
            )));
        }
        let (mut p, mut q) = (p, q);
        let mut chain = Vec::new();
        while q > 0 {
            let a = (p + q - 1) / q;
            chain.push(-a);
            let pn = q;
            q = a * q - p;
            p = pn;
        }
        chains.push(chain);
    }
    PlumbingGraph::star(e0, &chains)
}
