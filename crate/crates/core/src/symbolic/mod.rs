//! Combinatorial quasi-graphs: a base graph `G` plus quasi-arcs `L_1..L_n`,
//! each with an attach point and a symbolic limit set made of `G` edges and
//! earlier arcs.

mod corpus;

pub use corpus::{corpus, CorpusEntry};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decomposition::{betti1, TopoGraph, UnionFind};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attach {
    Vertex(usize),
    /// An interior point of an edge; normalization subdivides the edge.
    Edge(usize),
    Arc(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcSpec {
    pub id: String,
    pub attach: Attach,
    #[serde(rename = "limitEdges", default)]
    pub limit_edges: Vec<usize>,
    /// Arcs contained in the limit set.
    #[serde(rename = "limitArcs", default)]
    pub limit_arcs: Vec<String>,
    /// Arcs the limit set intersects; each must also be contained.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub meets: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiGraphSpec {
    pub graph: TopoGraph,
    pub arcs: Vec<ArcSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Condition {
    /// Endpoints and branch points lie in `G`.
    #[serde(rename = "i")]
    Endpoints,
    /// `L_i` meets `G` exactly at its endpoint.
    #[serde(rename = "ii")]
    Attachment,
    /// `omega(L_i)` only uses `G` and earlier arcs.
    #[serde(rename = "iii")]
    Order,
    /// A limit set meeting `L_j` contains it.
    #[serde(rename = "iv")]
    Containment,
    /// The limit set is empty, so the arc does not oscillate.
    #[serde(rename = "oscillation")]
    Oscillation,
    #[serde(rename = "reference")]
    Reference,
    #[serde(rename = "connectivity")]
    Connectivity,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::Endpoints => "(i)",
            Condition::Attachment => "(ii)",
            Condition::Order => "(iii)",
            Condition::Containment => "(iv)",
            Condition::Oscillation => "oscillation",
            Condition::Reference => "reference",
            Condition::Connectivity => "connectivity",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arc: Option<String>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.arc {
            Some(a) => write!(f, "{} {}: {}", self.condition, a, self.detail),
            None => write!(f, "{}: {}", self.condition, self.detail),
        }
    }
}

fn violation(condition: Condition, arc: Option<&str>, detail: impl Into<String>) -> Violation {
    Violation { condition, arc: arc.map(str::to_string), detail: detail.into() }
}

fn invalid<T>(v: &[Violation]) -> Result<T> {
    let msg: Vec<String> = v.iter().map(|v| v.to_string()).collect();
    Err(Error::InvalidSpec(msg.join("; ")))
}

/// Limit set closed under taking closures of contained arcs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Closure {
    pub edges: BTreeSet<usize>,
    pub arcs: BTreeSet<usize>,
}

impl QuasiGraphSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn index(&self, id: &str) -> Option<usize> {
        self.arcs.iter().position(|a| a.id == id)
    }

    fn ids(&self) -> HashMap<&str, usize> {
        self.arcs.iter().enumerate().map(|(i, a)| (a.id.as_str(), i)).collect()
    }

    /// Reference problems only; everything else assumes these are absent.
    fn reference_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let (nv, ne) = (self.graph.vertices, self.graph.edges.len());
        if nv == 0 {
            out.push(violation(Condition::Reference, None, "base graph has no vertices"));
        }
        for (k, &(a, b)) in self.graph.edges.iter().enumerate() {
            if a >= nv || b >= nv {
                out.push(violation(Condition::Reference, None, format!("edge {k} = ({a}, {b}) leaves the {nv} vertices")));
            }
        }
        let mut seen = BTreeSet::new();
        for a in &self.arcs {
            if !seen.insert(a.id.as_str()) {
                out.push(violation(Condition::Reference, Some(&a.id), "duplicate id"));
            }
        }
        let ids = self.ids();
        for a in &self.arcs {
            let id = Some(a.id.as_str());
            match &a.attach {
                Attach::Vertex(v) if *v >= nv => out.push(violation(Condition::Reference, id, format!("no vertex {v}"))),
                Attach::Edge(e) if *e >= ne => out.push(violation(Condition::Reference, id, format!("no edge {e}"))),
                Attach::Arc(j) if !ids.contains_key(j.as_str()) => {
                    out.push(violation(Condition::Reference, id, format!("no arc {j}")))
                }
                _ => {}
            }
            for &e in &a.limit_edges {
                if e >= ne {
                    out.push(violation(Condition::Reference, id, format!("limit edge {e} does not exist")));
                }
            }
            for j in a.limit_arcs.iter().chain(&a.meets) {
                if !ids.contains_key(j.as_str()) {
                    out.push(violation(Condition::Reference, id, format!("no arc {j}")));
                }
            }
        }
        out
    }

    /// Subdivides every edge carrying an attach point, so that all arcs
    /// attach at vertices. Limit sets that used the edge take both halves.
    pub fn normalize(&self) -> Result<Self> {
        let refs = self.reference_violations();
        if !refs.is_empty() {
            return invalid(&refs);
        }
        let mut out = self.clone();
        for i in 0..out.arcs.len() {
            if let Attach::Edge(e) = out.arcs[i].attach {
                let w = out.graph.vertices;
                out.graph.vertices += 1;
                let (a, b) = out.graph.edges[e];
                out.graph.edges[e] = (a, w);
                let half = out.graph.edges.len();
                out.graph.edges.push((w, b));
                for arc in &mut out.arcs {
                    if arc.limit_edges.contains(&e) {
                        arc.limit_edges.push(half);
                    }
                }
                out.arcs[i].attach = Attach::Vertex(w);
            }
        }
        Ok(out)
    }

    /// Closed limit sets of every arc; `None` for arcs on a reference cycle.
    fn closures(&self) -> Vec<Option<Closure>> {
        let ids = self.ids();
        let n = self.arcs.len();
        let mut memo: Vec<Option<Option<Closure>>> = vec![None; n];
        fn visit(
            i: usize,
            spec: &QuasiGraphSpec,
            ids: &HashMap<&str, usize>,
            memo: &mut Vec<Option<Option<Closure>>>,
            stack: &mut Vec<usize>,
        ) -> Option<Closure> {
            if let Some(c) = &memo[i] {
                return c.clone();
            }
            if stack.contains(&i) {
                return None;
            }
            stack.push(i);
            let a = &spec.arcs[i];
            let mut c = Closure { edges: a.limit_edges.iter().copied().collect(), arcs: BTreeSet::new() };
            let mut ok = true;
            for j in &a.limit_arcs {
                let j = ids[j.as_str()];
                c.arcs.insert(j);
                match visit(j, spec, ids, memo, stack) {
                    Some(cj) => {
                        c.edges.extend(cj.edges);
                        c.arcs.extend(cj.arcs);
                    }
                    None => ok = false,
                }
            }
            stack.pop();
            let r = ok.then_some(c);
            memo[i] = Some(r.clone());
            r
        }
        (0..n).map(|i| visit(i, self, &ids, &mut memo, &mut Vec::new())).collect()
    }

    fn attach_vertex(&self, i: usize) -> Option<usize> {
        match self.arcs[i].attach {
            Attach::Vertex(v) => Some(v),
            _ => None,
        }
    }

    /// Whether a closed limit set is connected, reading each contained arc
    /// as a connector between its attach point and its own limit set.
    fn connected(&self, c: &Closure) -> bool {
        let nv = self.graph.vertices;
        let mut uf = UnionFind::new(nv + self.arcs.len());
        let mut touched = Vec::new();
        for &e in &c.edges {
            let (a, b) = self.graph.edges[e];
            uf.union(a, b);
            touched.push(a);
        }
        for &j in &c.arcs {
            if let Some(v) = self.attach_vertex(j) {
                uf.union(nv + j, v);
            }
            touched.push(nv + j);
        }
        // an arc's closure is connected, so it joins its own limit set
        for &j in &c.arcs {
            let cl = &self.arcs[j];
            for &e in &cl.limit_edges {
                uf.union(nv + j, self.graph.edges[e].0);
            }
            for k in &cl.limit_arcs {
                if let Some(k) = self.index(k) {
                    uf.union(nv + j, nv + k);
                }
            }
        }
        let root = touched.first().map(|&t| uf.find(t));
        touched.iter().all(|&t| Some(uf.find(t)) == root)
    }
}

/// Violations of the quasi-graph conditions; empty iff the spec is valid.
pub fn validate(spec: &QuasiGraphSpec) -> Vec<Violation> {
    let mut out = spec.reference_violations();
    if !out.is_empty() {
        return out;
    }
    if !spec.graph.is_connected() {
        out.push(violation(Condition::Connectivity, None, "base graph is disconnected"));
    }
    let ids = spec.ids();
    for (i, a) in spec.arcs.iter().enumerate() {
        let id = Some(a.id.as_str());
        if let Attach::Arc(j) = &a.attach {
            out.push(violation(Condition::Endpoints, id, format!("attaching to {j} puts a branch point off G")));
            out.push(violation(Condition::Attachment, id, format!("meets {j} instead of G at its endpoint")));
            if ids[j.as_str()] >= i {
                out.push(violation(Condition::Order, id, format!("attached to the later arc {j}")));
            }
        }
        if a.limit_edges.is_empty() && a.limit_arcs.is_empty() {
            out.push(violation(Condition::Oscillation, id, "empty limit set"));
        }
        for j in &a.limit_arcs {
            if ids[j.as_str()] >= i {
                out.push(violation(Condition::Order, id, format!("limit set uses {j}, which is not earlier")));
            }
        }
        for j in &a.meets {
            if !a.limit_arcs.contains(j) {
                out.push(violation(Condition::Containment, id, format!("limit set meets {j} without containing it")));
            }
        }
    }
    if let Ok(norm) = spec.normalize() {
        for (i, c) in norm.closures().into_iter().enumerate() {
            if let Some(c) = c {
                if !(c.edges.is_empty() && c.arcs.is_empty()) && !norm.connected(&c) {
                    out.push(violation(Condition::Connectivity, Some(&spec.arcs[i].id), "limit set is disconnected"));
                }
            }
        }
    }
    out
}

/// Quotient graph with one vertex per component of `omega(X)`, and the
/// number of such components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Quotient {
    pub graph: TopoGraph,
    pub tranches: usize,
    pub betti1: usize,
}

/// `X/~`: every component of the union of limit sets becomes a vertex; the
/// edges are the `G` edges and arcs outside that union.
pub fn quotient(spec: &QuasiGraphSpec) -> Result<Quotient> {
    let v = validate(spec);
    if !v.is_empty() {
        return invalid(&v);
    }
    let spec = spec.normalize()?;
    let closures: Vec<Closure> = spec.closures().into_iter().map(|c| c.expect("valid specs are acyclic")).collect();
    let (nv, n) = (spec.graph.vertices, spec.arcs.len());
    let body = |j: usize| nv + j;
    let limit = |i: usize| nv + n + i;
    let mut uf = UnionFind::new(nv + 2 * n);
    let mut in_omega_e = BTreeSet::new();
    let mut in_omega_a = BTreeSet::new();
    for (i, c) in closures.iter().enumerate() {
        for &e in &c.edges {
            let (a, b) = spec.graph.edges[e];
            uf.union(limit(i), a);
            uf.union(limit(i), b);
            in_omega_e.insert(e);
        }
        for &j in &c.arcs {
            uf.union(limit(i), body(j));
            uf.union(body(j), spec.attach_vertex(j).expect("normalized"));
            in_omega_a.insert(j);
        }
    }
    let mut roots: BTreeMap<usize, usize> = BTreeMap::new();
    let mut vertex = |x: usize, uf: &mut UnionFind| {
        let r = uf.find(x);
        let k = roots.len();
        *roots.entry(r).or_insert(k)
    };
    for x in 0..nv {
        vertex(x, &mut uf);
    }
    for i in 0..n {
        vertex(limit(i), &mut uf);
    }
    let mut edges = Vec::new();
    for (e, &(a, b)) in spec.graph.edges.iter().enumerate() {
        if !in_omega_e.contains(&e) {
            edges.push((vertex(a, &mut uf), vertex(b, &mut uf)));
        }
    }
    for i in 0..n {
        if !in_omega_a.contains(&i) {
            let a = spec.attach_vertex(i).expect("normalized");
            edges.push((vertex(a, &mut uf), vertex(limit(i), &mut uf)));
        }
    }
    let tranches: BTreeSet<usize> = (0..n).map(|i| uf.find(limit(i))).collect();
    let graph = TopoGraph::new(roots.len(), edges)?;
    let b = betti1(&graph)?;
    Ok(Quotient { graph, tranches: tranches.len(), betti1: b })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Depth {
    /// Order of every arc, keyed by id.
    pub orders: BTreeMap<String, usize>,
    pub depth: usize,
}

/// Quasi-arc orders (one more than the largest order inside the limit set)
/// and the depth, which is the largest order.
pub fn order_and_depth(spec: &QuasiGraphSpec) -> Result<Depth> {
    let refs = spec.reference_violations();
    if !refs.is_empty() {
        return invalid(&refs);
    }
    let ids = spec.ids();
    let n = spec.arcs.len();
    // 0 = unvisited, 1 = on the stack, 2 = done
    let mut state = vec![0u8; n];
    let mut order = vec![0usize; n];
    fn visit(
        i: usize,
        spec: &QuasiGraphSpec,
        ids: &HashMap<&str, usize>,
        state: &mut [u8],
        order: &mut [usize],
        path: &mut Vec<usize>,
    ) -> Result<usize> {
        match state[i] {
            2 => return Ok(order[i]),
            1 => {
                let start = path.iter().position(|&p| p == i).unwrap_or(0);
                let cyc: Vec<&str> = path[start..].iter().chain([&i]).map(|&p| spec.arcs[p].id.as_str()).collect();
                return Err(Error::InvalidSpec(format!("cyclic limit references: {}", cyc.join(" -> "))));
            }
            _ => {}
        }
        state[i] = 1;
        path.push(i);
        let mut o = 1;
        for j in &spec.arcs[i].limit_arcs {
            o = o.max(1 + visit(ids[j.as_str()], spec, ids, state, order, path)?);
        }
        path.pop();
        state[i] = 2;
        order[i] = o;
        Ok(o)
    }
    for i in 0..n {
        visit(i, spec, &ids, &mut state, &mut order, &mut Vec::new())?;
    }
    Ok(Depth {
        orders: spec.arcs.iter().zip(&order).map(|(a, &o)| (a.id.clone(), o)).collect(),
        depth: order.iter().copied().max().unwrap_or(0),
    })
}

/// Arcs not contained in any limit set, including their own.
pub fn ancestor_free(spec: &QuasiGraphSpec) -> Result<Vec<usize>> {
    let refs = spec.reference_violations();
    if !refs.is_empty() {
        return invalid(&refs);
    }
    let closures = spec.closures();
    let mut contained = vec![false; spec.arcs.len()];
    for (i, c) in closures.iter().enumerate() {
        match c {
            Some(c) => c.arcs.iter().for_each(|&j| contained[j] = true),
            // an arc on a cycle sits in its own limit set
            None => {
                contained[i] = true;
                for j in &spec.arcs[i].limit_arcs {
                    contained[spec.ids()[j.as_str()]] = true;
                }
            }
        }
    }
    Ok((0..spec.arcs.len()).filter(|&i| !contained[i]).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Removal {
    pub spec: QuasiGraphSpec,
    pub removed: ArcSpec,
    /// Free end of the stub left in `G`.
    pub stub: usize,
}

/// Removes the last arc without ancestors. Its initial piece stays behind
/// as a stub edge from the attach point to a new vertex.
pub fn remove_outermost(spec: &QuasiGraphSpec) -> Result<Removal> {
    if spec.arcs.is_empty() {
        return Err(Error::Domain("no quasi-arcs to remove".into()));
    }
    let spec = spec.normalize()?;
    let Some(&i) = ancestor_free(&spec)?.last() else {
        return Err(Error::Structural("every quasi-arc lies in some limit set".into()));
    };
    let mut out = spec.clone();
    let removed = out.arcs.remove(i);
    let a = match removed.attach {
        Attach::Vertex(v) => v,
        Attach::Arc(ref j) => {
            return Err(Error::Structural(format!("{} is attached to the arc {j}", removed.id)));
        }
        Attach::Edge(_) => unreachable!("normalized"),
    };
    let stub = out.graph.vertices;
    out.graph.vertices += 1;
    out.graph.edges.push((a, stub));
    for arc in &mut out.arcs {
        arc.meets.retain(|j| *j != removed.id);
    }
    Ok(Removal { spec: out, removed, stub })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stage {
    /// Arc removed to reach this stage, and its stub vertex.
    pub removed: Option<(String, usize)>,
    pub spec: QuasiGraphSpec,
    pub quotient: Quotient,
    pub depth: usize,
}

/// Removes arcs one at a time down to the bare graph; stage 0 is the
/// normalized input.
pub fn reduce(spec: &QuasiGraphSpec) -> Result<Vec<Stage>> {
    let stage = |removed, spec: QuasiGraphSpec| -> Result<Stage> {
        Ok(Stage { removed, quotient: quotient(&spec)?, depth: order_and_depth(&spec)?.depth, spec })
    };
    let mut stages = vec![stage(None, spec.normalize()?)?];
    while !stages.last().unwrap().spec.arcs.is_empty() {
        let r = remove_outermost(&stages.last().unwrap().spec)?;
        stages.push(stage(Some((r.removed.id.clone(), r.stub)), r.spec)?);
    }
    Ok(stages)
}

/// Rebuilds a spec from the last stage by putting the removed arcs back in
/// reverse, each at the end of its stub; the last arc removed gets index 1.
/// The stub is part of the arc, so limit sets holding the arc take it too.
pub fn replay(stages: &[Stage]) -> Result<QuasiGraphSpec> {
    let Some(last) = stages.last() else {
        return Err(Error::Domain("no stages".into()));
    };
    let mut out = last.spec.clone();
    let mut stub_edge: HashMap<String, usize> = HashMap::new();
    for w in stages.windows(2).rev() {
        let (id, stub) = w[1].removed.clone().ok_or_else(|| Error::Domain("stage without a removal".into()))?;
        let i = w[0].spec.index(&id).expect("removed arc exists before removal");
        let mut arc = w[0].spec.arcs[i].clone();
        arc.attach = Attach::Vertex(stub);
        for j in &arc.limit_arcs {
            if let Some(&e) = stub_edge.get(j) {
                arc.limit_edges.push(e);
            }
        }
        let e = out.graph.edges.iter().position(|&(_, b)| b == stub).expect("stub edge exists");
        stub_edge.insert(id, e);
        out.arcs.push(arc);
    }
    Ok(out)
}
