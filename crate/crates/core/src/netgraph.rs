//! Directed acyclic multigraphs with two sources and two destination edge
//! sets.
//!
//! Edges are stored in a topological-compatible order: edge ids are sorted by
//! the order of their tail vertex, with ties (edges sharing a tail) broken by
//! insertion order. Every algorithm downstream relies on this, in particular
//! `F` being strictly upper triangular in edge-id order.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SplitRng;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type EdgeSet = BTreeSet<EdgeId>;

/// Largest edge count for which the GNS bound is enumerated exactly.
pub const GNS_EDGE_CAP: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("unknown edge {0:?}")]
    UnknownEdge(String),
    #[error("duplicate vertex {0:?}")]
    DuplicateVertex(String),
    #[error("duplicate edge id {0:?}")]
    DuplicateEdge(String),
    #[error("graph has a cycle closed by edge {edge:?} ({tail} -> {head})")]
    Cycle { edge: String, tail: String, head: String },
    #[error("{edges} edges exceeds the enumeration cap of {cap}")]
    TooLarge { edges: usize, cap: usize },
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("no valid network after {0} resampling attempts")]
    ResampleBudget(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub name: String,
    pub tail: VertexId,
    pub head: VertexId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    vertex_names: Vec<String>,
    vertex_ord: Vec<usize>,
    edges: Vec<Edge>,
    s1: VertexId,
    s2: VertexId,
    t1: EdgeSet,
    t2: EdgeSet,
    in_edges: Vec<Vec<EdgeId>>,
    out_edges: Vec<Vec<EdgeId>>,
}

/// Pairwise min-cuts and the GNS-cut bound of a network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutReport {
    pub c11: usize,
    pub c21: usize,
    pub c22: usize,
    /// `None` when the network is too large to enumerate.
    pub gns: Option<usize>,
}

impl Network {
    /// Builds a network from names. `edges` holds `(id, tail, head)` triples.
    pub fn from_names<S: AsRef<str>>(
        vertices: &[S],
        edges: &[(S, S, S)],
        s1: &str,
        s2: &str,
        t1: &[S],
        t2: &[S],
    ) -> Result<Self, NetError> {
        let names: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(NetError::DuplicateVertex(n.clone()));
            }
        }
        let vid = |n: &str| {
            names
                .iter()
                .position(|v| v == n)
                .ok_or_else(|| NetError::UnknownVertex(n.to_string()))
        };
        let mut raw = Vec::with_capacity(edges.len());
        for (id, tail, head) in edges {
            raw.push((id.as_ref().to_string(), vid(tail.as_ref())?, vid(head.as_ref())?));
        }
        let eid = |n: &S| {
            raw.iter()
                .position(|(id, _, _)| id == n.as_ref())
                .ok_or_else(|| NetError::UnknownEdge(n.as_ref().to_string()))
        };
        let t1 = t1.iter().map(eid).collect::<Result<Vec<_>, _>>()?;
        let t2 = t2.iter().map(eid).collect::<Result<Vec<_>, _>>()?;
        Self::from_indices(names.clone(), raw, vid(s1)?, vid(s2)?, &t1, &t2)
    }

    /// Builds a network from vertex indices. Destination sets index into
    /// `edges` as given; edges are re-sorted topologically.
    pub fn from_indices(
        vertex_names: Vec<String>,
        edges: Vec<(String, VertexId, VertexId)>,
        s1: VertexId,
        s2: VertexId,
        t1: &[usize],
        t2: &[usize],
    ) -> Result<Self, NetError> {
        let nv = vertex_names.len();
        for v in [s1, s2] {
            if v >= nv {
                return Err(NetError::UnknownVertex(format!("#{v}")));
            }
        }
        for (i, (id, t, h)) in edges.iter().enumerate() {
            if *t >= nv || *h >= nv {
                return Err(NetError::UnknownVertex(format!("endpoint of {id}")));
            }
            if edges[..i].iter().any(|(o, _, _)| o == id) {
                return Err(NetError::DuplicateEdge(id.clone()));
            }
        }
        for &t in t1.iter().chain(t2) {
            if t >= edges.len() {
                return Err(NetError::UnknownEdge(format!("#{t}")));
            }
        }

        let vertex_ord = vertex_order(&vertex_names, &edges)?;

        let mut perm: Vec<usize> = (0..edges.len()).collect();
        perm.sort_by_key(|&i| (vertex_ord[edges[i].1], i));
        let mut new_id = vec![0; edges.len()];
        for (new, &old) in perm.iter().enumerate() {
            new_id[old] = new;
        }
        let sorted: Vec<Edge> = perm
            .iter()
            .map(|&i| Edge {
                name: edges[i].0.clone(),
                tail: edges[i].1,
                head: edges[i].2,
            })
            .collect();

        let mut in_edges = vec![Vec::new(); nv];
        let mut out_edges = vec![Vec::new(); nv];
        for (id, e) in sorted.iter().enumerate() {
            out_edges[e.tail].push(id);
            in_edges[e.head].push(id);
        }

        Ok(Self {
            vertex_names,
            vertex_ord,
            edges: sorted,
            s1,
            s2,
            t1: t1.iter().map(|&i| new_id[i]).collect(),
            t2: t2.iter().map(|&i| new_id[i]).collect(),
            in_edges,
            out_edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertex_names.iter().position(|v| v == name)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e].name
    }

    pub fn edge_id(&self, name: &str) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.name == name)
    }

    pub fn edge_names<'a>(&self, set: impl IntoIterator<Item = &'a EdgeId>) -> Vec<String> {
        set.into_iter().map(|&e| self.edges[e].name.clone()).collect()
    }

    pub fn s1(&self) -> VertexId {
        self.s1
    }

    pub fn s2(&self) -> VertexId {
        self.s2
    }

    pub fn t1(&self) -> &EdgeSet {
        &self.t1
    }

    pub fn t2(&self) -> &EdgeSet {
        &self.t2
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v]
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v]
    }

    /// `Ord_V(v)`.
    pub fn vertex_order(&self, v: VertexId) -> usize {
        self.vertex_ord[v]
    }

    /// `Ord_E(e)`: the order of the tail vertex.
    pub fn edge_order(&self, e: EdgeId) -> usize {
        self.vertex_ord[self.edges[e].tail]
    }

    /// `(Ord_V, Ord_E)` indexed by vertex and edge id.
    pub fn topological_orders(&self) -> (Vec<usize>, Vec<usize>) {
        let eo = (0..self.edges.len()).map(|e| self.edge_order(e)).collect();
        (self.vertex_ord.clone(), eo)
    }

    /// Edges leaving either source.
    pub fn source_edges(&self) -> EdgeSet {
        self.out_edges[self.s1]
            .iter()
            .chain(&self.out_edges[self.s2])
            .copied()
            .collect()
    }

    /// Vertices reachable from `from` (including `from`).
    pub fn reachable_from(&self, from: VertexId) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        seen[from] = true;
        let mut stack = vec![from];
        while let Some(u) = stack.pop() {
            for &e in &self.out_edges[u] {
                let h = self.edges[e].head;
                if !seen[h] {
                    seen[h] = true;
                    stack.push(h);
                }
            }
        }
        seen
    }

    /// `e ⇝ f`: `e = f` or a directed path leads from `head(e)` to `tail(f)`.
    pub fn communicates(&self, e: EdgeId, f: EdgeId) -> bool {
        e == f || self.reachable_from(self.edges[e].head)[self.edges[f].tail]
    }

    /// Whether vertex `s` reaches (and traverses) some edge of `dests`.
    pub fn source_reaches(&self, s: VertexId, dests: &EdgeSet) -> bool {
        let reach = self.reachable_from(s);
        dests.iter().any(|&t| reach[self.edges[t].tail])
    }

    /// Edges that no source can reach.
    pub fn unreachable_from_sources(&self) -> Vec<EdgeId> {
        let r1 = self.reachable_from(self.s1);
        let r2 = self.reachable_from(self.s2);
        (0..self.edge_count())
            .filter(|&e| {
                let t = self.edges[e].tail;
                !r1[t] && !r2[t]
            })
            .collect()
    }

    /// Minimum number of edges whose removal disconnects `source` from every
    /// edge of `dests`, by unit-capacity max-flow.
    pub fn min_cut(&self, source: VertexId, dests: &EdgeSet) -> usize {
        let all = vec![true; self.edge_count()];
        self.min_cut_within(&all, source, dests)
    }

    /// Min-cut restricted to the sub-graph of edges with `active[e]`.
    pub fn min_cut_within(&self, active: &[bool], source: VertexId, dests: &EdgeSet) -> usize {
        let sink = self.vertex_count();
        let mut flow = FlowGraph::new(sink + 1);
        for (id, e) in self.edges.iter().enumerate() {
            if !active[id] {
                continue;
            }
            // a destination edge terminates its paths
            let to = if dests.contains(&id) { sink } else { e.head };
            flow.add_arc(e.tail, to);
        }
        flow.max_flow(source, sink)
    }

    /// True iff, with `removed` edges deleted, no edge of `dests` is reachable
    /// from `source`.
    pub fn is_cut(&self, removed: &[bool], source: VertexId, dests: &EdgeSet) -> bool {
        let mut seen = vec![false; self.vertex_count()];
        seen[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.out_edges[u] {
                if removed[e] {
                    continue;
                }
                if dests.contains(&e) {
                    return false;
                }
                let h = self.edges[e].head;
                if !seen[h] {
                    seen[h] = true;
                    queue.push_back(h);
                }
            }
        }
        true
    }

    fn is_gns_cut(&self, removed: &[bool]) -> bool {
        self.is_cut(removed, self.s1, &self.t1)
            && self.is_cut(removed, self.s2, &self.t2)
            && self.is_cut(removed, self.s2, &self.t1)
    }

    /// Size of the smallest edge set cutting `(s1,T1)`, `(s2,T2)` and
    /// `(s2,T1)` simultaneously, by subset enumeration in increasing size.
    pub fn gns_bound(&self) -> Result<usize, NetError> {
        let ne = self.edge_count();
        if ne > GNS_EDGE_CAP {
            return Err(NetError::TooLarge {
                edges: ne,
                cap: GNS_EDGE_CAP,
            });
        }
        // any GNS set is in particular a cut for each pair
        let lower = self
            .min_cut(self.s1, &self.t1)
            .max(self.min_cut(self.s2, &self.t2))
            .max(self.min_cut(self.s2, &self.t1));
        for k in lower..=ne {
            let mut idx: Vec<usize> = (0..k).collect();
            loop {
                let mut removed = vec![false; ne];
                for &i in &idx {
                    removed[i] = true;
                }
                if self.is_gns_cut(&removed) {
                    return Ok(k);
                }
                if !next_combination(&mut idx, ne) {
                    break;
                }
            }
        }
        unreachable!("removing every edge is always a GNS cut")
    }

    pub fn cut_report(&self) -> CutReport {
        CutReport {
            c11: self.min_cut(self.s1, &self.t1),
            c21: self.min_cut(self.s2, &self.t1),
            c22: self.min_cut(self.s2, &self.t2),
            gns: self.gns_bound().ok(),
        }
    }

    /// First edge that is by itself a GNS-cut set. Networks lacking either
    /// destination have none.
    pub fn has_single_edge_gns(&self) -> Option<EdgeId> {
        if self.t1.is_empty() || self.t2.is_empty() {
            return None;
        }
        let ne = self.edge_count();
        (0..ne).find(|&e| {
            let mut removed = vec![false; ne];
            removed[e] = true;
            self.is_gns_cut(&removed)
        })
    }

    /// Removes every edge that communicates with no edge of `T1 ∪ T2`.
    pub fn prune_noncontributing(&self) -> Network {
        let dests: EdgeSet = self.t1.union(&self.t2).copied().collect();
        // vertices from which some destination edge's tail is reachable
        let mut feeds = vec![false; self.vertex_count()];
        let mut stack: Vec<VertexId> = Vec::new();
        for &t in &dests {
            let tail = self.edges[t].tail;
            if !feeds[tail] {
                feeds[tail] = true;
                stack.push(tail);
            }
        }
        while let Some(v) = stack.pop() {
            for &e in &self.in_edges[v] {
                let u = self.edges[e].tail;
                if !feeds[u] {
                    feeds[u] = true;
                    stack.push(u);
                }
            }
        }
        let keep: Vec<EdgeId> = (0..self.edge_count())
            .filter(|&e| dests.contains(&e) || feeds[self.edges[e].head])
            .collect();
        let mut remap = vec![usize::MAX; self.edge_count()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let edges = keep
            .iter()
            .map(|&e| {
                let x = &self.edges[e];
                (x.name.clone(), x.tail, x.head)
            })
            .collect();
        let t1: Vec<usize> = self.t1.iter().map(|&e| remap[e]).collect();
        let t2: Vec<usize> = self.t2.iter().map(|&e| remap[e]).collect();
        Network::from_indices(self.vertex_names.clone(), edges, self.s1, self.s2, &t1, &t2)
            .expect("sub-graph of a valid network is valid")
    }

    /// True iff every edge communicates with some destination edge.
    pub fn is_pruned(&self) -> bool {
        self.prune_noncontributing().edge_count() == self.edge_count()
    }

    /// The running example of the coding algorithm: eight edges, a single
    /// alignment opportunity at `v5`.
    pub fn fig5() -> Network {
        let v = ["s1", "s2", "b", "a", "c", "v5", "t1", "t2"];
        let e = [
            ("e1", "s1", "a"),
            ("e2", "s2", "b"),
            ("e3", "b", "a"),
            ("e4", "b", "v5"),
            ("e5", "a", "c"),
            ("e6", "c", "v5"),
            ("e7", "c", "t2"),
            ("e8", "v5", "t1"),
        ];
        Network::from_names(&v, &e, "s1", "s2", &["e8"], &["e7"]).expect("fixture is valid")
    }

    /// Random pruned DAG with `s_i ⇝ T_i` for both sessions.
    pub fn random_dag(params: &RandomDagParams) -> Result<Network, NetError> {
        params.validate()?;
        let mut rng = SplitRng::new(params.seed);
        for _ in 0..params.resample_budget {
            let net = sample_dag(params, &mut rng);
            let net = net.prune_noncontributing();
            if net.source_reaches(net.s1, &net.t1) && net.source_reaches(net.s2, &net.t2) {
                return Ok(net);
            }
        }
        Err(NetError::ResampleBudget(params.resample_budget))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomDagParams {
    pub n_vertices: usize,
    pub max_in_degree: usize,
    /// Probability of each additional parent beyond the first.
    pub edge_density: f64,
    pub seed: u64,
    pub resample_budget: usize,
}

impl Default for RandomDagParams {
    fn default() -> Self {
        Self {
            n_vertices: 8,
            max_in_degree: 3,
            edge_density: 0.5,
            seed: 0,
            resample_budget: 100,
        }
    }
}

impl RandomDagParams {
    fn validate(&self) -> Result<(), NetError> {
        if self.n_vertices < 4 {
            return Err(NetError::InvalidParams("n_vertices must be at least 4".into()));
        }
        if self.max_in_degree == 0 {
            return Err(NetError::InvalidParams("max_in_degree must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.edge_density) {
            return Err(NetError::InvalidParams("edge_density must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

fn sample_dag(params: &RandomDagParams, rng: &mut SplitRng) -> Network {
    let n = params.n_vertices;
    let names: Vec<String> = (0..n)
        .map(|i| match i {
            0 => "s1".to_string(),
            1 => "s2".to_string(),
            _ => format!("v{i}"),
        })
        .collect();
    let mut edges = Vec::new();
    for j in 2..n {
        let mut indeg = 1;
        while indeg < params.max_in_degree && rng.gen_bool(params.edge_density) {
            indeg += 1;
        }
        for _ in 0..indeg {
            let parent = rng.gen_range(0..j);
            edges.push((format!("e{}", edges.len() + 1), parent, j));
        }
    }
    // destinations come from the edges with the highest-order tails
    let mut by_tail: Vec<usize> = (0..edges.len()).collect();
    by_tail.sort_by_key(|&i| Reverse((edges[i].1, i)));
    let pool = by_tail.len().div_ceil(3).max(2).min(by_tail.len());
    let candidates = &by_tail[..pool];
    let pick = |rng: &mut SplitRng| {
        let k = rng.gen_range(1..=2.min(candidates.len()));
        let mut set = BTreeSet::new();
        while set.len() < k {
            set.insert(candidates[rng.gen_range(0..candidates.len())]);
        }
        set.into_iter().collect::<Vec<_>>()
    };
    let t1 = pick(rng);
    let t2 = pick(rng);
    Network::from_indices(names, edges, 0, 1, &t1, &t2).expect("generated graph is acyclic")
}

/// Kahn's algorithm, preferring the earliest-listed ready vertex.
fn vertex_order(names: &[String], edges: &[(String, VertexId, VertexId)]) -> Result<Vec<usize>, NetError> {
    let nv = names.len();
    let mut indeg = vec![0usize; nv];
    let mut adj = vec![Vec::new(); nv];
    for (_, t, h) in edges {
        indeg[*h] += 1;
        adj[*t].push(*h);
    }
    let mut ready: BinaryHeap<Reverse<usize>> = (0..nv).filter(|&v| indeg[v] == 0).map(Reverse).collect();
    let mut ord = vec![usize::MAX; nv];
    let mut next = 0;
    while let Some(Reverse(v)) = ready.pop() {
        ord[v] = next;
        next += 1;
        for &h in &adj[v] {
            indeg[h] -= 1;
            if indeg[h] == 0 {
                ready.push(Reverse(h));
            }
        }
    }
    if next == nv {
        return Ok(ord);
    }
    Err(find_back_edge(names, edges, &ord))
}

/// Locates an edge closing a cycle among the vertices Kahn's algorithm could
/// not order.
fn find_back_edge(names: &[String], edges: &[(String, VertexId, VertexId)], ord: &[usize]) -> NetError {
    let nv = names.len();
    let stuck = |v: usize| ord[v] == usize::MAX;
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; nv];
    for start in (0..nv).filter(|&v| stuck(v)) {
        if state[start] != 0 {
            continue;
        }
        let mut stack: Vec<(VertexId, usize)> = vec![(start, 0)];
        state[start] = 1;
        while let Some(&mut (v, ref mut pos)) = stack.last_mut() {
            let next = edges
                .iter()
                .enumerate()
                .skip(*pos)
                .find(|(_, (_, t, h))| *t == v && stuck(*h));
            match next {
                Some((i, (id, t, h))) => {
                    *pos = i + 1;
                    match state[*h] {
                        1 => {
                            return NetError::Cycle {
                                edge: id.clone(),
                                tail: names[*t].clone(),
                                head: names[*h].clone(),
                            }
                        }
                        0 => {
                            state[*h] = 1;
                            stack.push((*h, 0));
                        }
                        _ => {}
                    }
                }
                None => {
                    state[v] = 2;
                    stack.pop();
                }
            }
        }
    }
    unreachable!("Kahn's algorithm stalls only on a cycle")
}

/// Advances `idx` to the next k-subset of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Unit-capacity residual graph for augmenting-path max-flow.
struct FlowGraph {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u32>,
}

impl FlowGraph {
    fn new(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn add_arc(&mut self, u: usize, v: usize) {
        self.adj[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(1);
        self.adj[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    fn max_flow(&mut self, s: usize, t: usize) -> usize {
        if s == t {
            return 0;
        }
        let n = self.adj.len();
        let mut flow = 0;
        loop {
            let mut via = vec![usize::MAX; n];
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &a in &self.adj[u] {
                    let v = self.to[a];
                    if self.cap[a] > 0 && !seen[v] {
                        seen[v] = true;
                        via[v] = a;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return flow;
            }
            let mut v = t;
            while v != s {
                let a = via[v];
                self.cap[a] -= 1;
                self.cap[a ^ 1] += 1;
                v = self.to[a ^ 1];
            }
            flow += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(net: &Network, names: &[&str]) -> EdgeSet {
        names.iter().map(|n| net.edge_id(n).unwrap()).collect()
    }

    fn chain() -> Network {
        Network::from_names(
            &["s", "a", "b", "c"],
            &[("x", "s", "a"), ("y", "a", "b"), ("z", "b", "c")],
            "s",
            "s",
            &["z"],
            &["z"],
        )
        .unwrap()
    }

    #[test]
    fn chain_orders_are_increasing() {
        let n = chain();
        let (vo, _) = n.topological_orders();
        assert!(vo[0] < vo[1] && vo[1] < vo[2]);
    }

    #[test]
    fn shared_tail_edges_have_equal_order() {
        let n = Network::from_names(
            &["s", "a", "b"],
            &[("x", "s", "a"), ("y", "s", "b")],
            "s",
            "s",
            &["x"],
            &["y"],
        )
        .unwrap();
        assert_eq!(n.edge_order(0), n.edge_order(1));
    }

    #[test]
    fn fig5_orders() {
        let n = Network::fig5();
        let e = |s| n.edge_id(s).unwrap();
        assert!(n.edge_order(e("e7")) < n.edge_order(e("e8")));
        assert_eq!(n.edge_count(), 8);
        assert_eq!(n.vertex_count(), 8);
        // edge ids follow e1..e8 here
        let names: Vec<&str> = n.edges().iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, ["e1", "e2", "e3", "e4", "e5", "e6", "e7", "e8"]);
    }

    #[test]
    fn edges_sorted_by_tail_order() {
        let n = Network::from_names(
            &["b", "a", "s"],
            &[("late", "a", "b"), ("early", "s", "a")],
            "s",
            "s",
            &["late"],
            &["late"],
        )
        .unwrap();
        assert_eq!(n.edge_name(0), "early");
        assert_eq!(n.edge_name(1), "late");
        assert_eq!(n.t1(), &EdgeSet::from([1]));
    }

    #[test]
    fn cycle_is_reported_with_an_edge() {
        let err = Network::from_names(
            &["s", "a", "b"],
            &[("x", "s", "a"), ("y", "a", "b"), ("z", "b", "a")],
            "s",
            "s",
            &["y"],
            &["y"],
        )
        .unwrap_err();
        match err {
            NetError::Cycle { edge, .. } => assert!(edge == "y" || edge == "z"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn communicates_examples() {
        let n = Network::fig5();
        let e = |s| n.edge_id(s).unwrap();
        assert!(n.communicates(e("e3"), e("e3")));
        assert!(n.communicates(e("e2"), e("e8")));
        assert!(!n.communicates(e("e8"), e("e2")));
        assert!(!n.communicates(e("e7"), e("e8")));
        let split = Network::from_names(
            &["s", "a", "u", "w"],
            &[("x", "s", "a"), ("y", "u", "w")],
            "s",
            "u",
            &["x"],
            &["y"],
        )
        .unwrap();
        assert!(!split.communicates(0, 1));
    }

    #[test]
    fn min_cut_examples() {
        let n = chain();
        assert_eq!(n.min_cut(0, &EdgeSet::from([2])), 1);

        let par = Network::from_names(
            &["s", "a", "b", "t"],
            &[("x1", "s", "a"), ("x2", "a", "t"), ("y1", "s", "b"), ("y2", "b", "t")],
            "s",
            "s",
            &["x2", "y2"],
            &["x2"],
        )
        .unwrap();
        assert_eq!(par.min_cut(0, par.t1()), 2);

        // s2 has a single outgoing edge, so one edge cuts it from e8
        let f = Network::fig5();
        assert_eq!(f.min_cut(f.s2(), &set(&f, &["e8"])), 1);
        assert_eq!(f.min_cut(f.s1(), &set(&f, &["e8"])), 1);
        assert_eq!(f.min_cut(f.s1(), &EdgeSet::new()), 0);
    }

    #[test]
    fn parallel_edges_are_distinct() {
        let n = Network::from_names(
            &["s", "t"],
            &[("a", "s", "t"), ("b", "s", "t")],
            "s",
            "s",
            &["a", "b"],
            &["a"],
        )
        .unwrap();
        assert_eq!(n.edge_count(), 2);
        assert_eq!(n.min_cut(0, n.t1()), 2);
    }

    #[test]
    fn gns_examples() {
        let f = Network::fig5();
        assert_eq!(f.gns_bound().unwrap(), 2);
        let mut removed = vec![false; 8];
        removed[f.edge_id("e4").unwrap()] = true;
        removed[f.edge_id("e5").unwrap()] = true;
        assert!(f.is_gns_cut(&removed));
        assert_eq!(f.has_single_edge_gns(), None);

        let c = chain();
        assert_eq!(c.gns_bound().unwrap(), 1);
        assert_eq!(c.has_single_edge_gns(), Some(0));
    }

    #[test]
    fn gns_with_isolated_second_source() {
        let n = Network::from_names(
            &["s", "a", "t", "u"],
            &[("x1", "s", "a"), ("x2", "a", "t"), ("y1", "s", "t")],
            "s",
            "u",
            &["x2", "y1"],
            &[],
        )
        .unwrap();
        assert_eq!(n.gns_bound().unwrap(), n.min_cut(0, n.t1()));
        assert_eq!(n.gns_bound().unwrap(), 2);
        assert_eq!(n.has_single_edge_gns(), None);
    }

    #[test]
    fn prune_removes_dangling_edges_only() {
        let f = Network::fig5();
        assert_eq!(f.prune_noncontributing(), f);

        let n = Network::from_names(
            &["s", "a", "t", "x"],
            &[("e1", "s", "a"), ("e2", "a", "t"), ("dangle", "a", "x")],
            "s",
            "s",
            &["e2"],
            &["e1"],
        )
        .unwrap();
        let p = n.prune_noncontributing();
        assert_eq!(p.edge_count(), 2);
        assert!(p.edge_id("dangle").is_none());
        assert_eq!(p.prune_noncontributing(), p);
        assert!(p.is_pruned());
        assert!(!n.is_pruned());

        // destination edges survive even when nothing follows them
        assert_eq!(p.edge_name(*p.t1().iter().next().unwrap()), "e2");
    }

    #[test]
    fn random_dag_is_deterministic() {
        let params = RandomDagParams {
            seed: 42,
            ..Default::default()
        };
        let a = Network::random_dag(&params).unwrap();
        let b = Network::random_dag(&params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unit_in_degree_gives_a_forest() {
        for seed in 0..20 {
            let n = Network::random_dag(&RandomDagParams {
                n_vertices: 9,
                max_in_degree: 1,
                seed,
                ..Default::default()
            })
            .unwrap();
            assert!((0..n.vertex_count()).all(|v| n.in_edges(v).len() <= 1));
        }
    }

    #[test]
    fn random_dag_rejects_bad_params() {
        let p = RandomDagParams {
            n_vertices: 3,
            ..Default::default()
        };
        assert!(matches!(Network::random_dag(&p), Err(NetError::InvalidParams(_))));
    }
}
