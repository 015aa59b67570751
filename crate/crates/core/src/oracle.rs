//! Brute-force verifiers. Nothing here calls into the coder or the max-flow
//! min-cut construction; transfer matrices and Granks are recomputed from
//! scratch.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::gf::{FieldConfig, FieldMatrix, GfError};
use crate::netgraph::{EdgeId, EdgeSet, NetError, Network, VertexId};

pub const EXHAUSTIVE_EDGE_CAP: usize = 10;
pub const EXHAUSTIVE_COEFF_CAP: usize = 12;
pub const ROUTING_EDGE_CAP: usize = 16;
pub const ENUMERATION_DIM_CAP: usize = 3;
pub const SMALL_PRIME_CAP: u64 = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("{what} is {size}, above the oracle cap of {cap}")]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },
}

fn cap(what: &'static str, size: usize, cap: usize) -> Result<(), OracleError> {
    if size > cap {
        return Err(OracleError::TooLarge { what, size, cap });
    }
    Ok(())
}

fn definition_grank(h1: &FieldMatrix, h2: &FieldMatrix, g2: &FieldMatrix) -> Result<usize, GfError> {
    Ok(h1.vcat(h2)?.rank() + h2.hcat(g2)?.rank() - h2.rank())
}

/// Transfer matrix by forward substitution over the edge order.
fn transfer_of(net: &Network, coeffs: &[(EdgeId, EdgeId)], values: &[u64], field: FieldConfig) -> FieldMatrix {
    let ne = net.edge_count();
    let mut m = FieldMatrix::identity(field, ne);
    for (&(from, to), &x) in coeffs.iter().zip(values) {
        if x == 0 {
            continue;
        }
        for r in 0..ne {
            let add = field.mul(m.get(r, from), x);
            m.set(r, to, field.add(m.get(r, to), add));
        }
    }
    m
}

/// Adjacent edge pairs `(f, e)` with `head(f) = tail(e)`, ordered by `e`.
fn coupling_pairs(net: &Network) -> Vec<(EdgeId, EdgeId)> {
    let mut out = Vec::new();
    for e in 0..net.edge_count() {
        for &f in net.in_edges(net.edge(e).tail) {
            out.push((f, e));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExhaustiveBest {
    pub codes: usize,
    pub r1_max: usize,
    pub r2_max: usize,
    pub grank: usize,
    /// Best `min(grank, r1 + r2)` of a single code.
    pub max_sum_rate: usize,
    /// Every code's corner set is contained in the union of these points.
    pub achievable: Vec<(usize, usize)>,
    #[serde(skip)]
    pub one_one_witness: Option<FieldMatrix>,
}

impl ExhaustiveBest {
    pub fn one_one(&self) -> bool {
        self.one_one_witness.is_some()
    }
}

/// Enumerates every local coding matrix over GF(p).
pub fn exhaustive_code_search(net: &Network, p: u64) -> Result<ExhaustiveBest, OracleError> {
    cap("field size", p as usize, SMALL_PRIME_CAP as usize)?;
    let field = FieldConfig::new(p)?;
    cap("edge count", net.edge_count(), EXHAUSTIVE_EDGE_CAP)?;
    let pairs = coupling_pairs(net);
    cap("free coefficient count", pairs.len(), EXHAUSTIVE_COEFF_CAP)?;

    let rows1 = net.out_edges(net.s1()).to_vec();
    let rows2 = net.out_edges(net.s2()).to_vec();
    let t1: Vec<EdgeId> = net.t1().iter().copied().collect();
    let t2: Vec<EdgeId> = net.t2().iter().copied().collect();

    let mut best = ExhaustiveBest {
        codes: 0,
        r1_max: 0,
        r2_max: 0,
        grank: 0,
        max_sum_rate: 0,
        achievable: Vec::new(),
        one_one_witness: None,
    };
    let mut points = BTreeSet::new();
    let mut values = vec![0u64; pairs.len()];
    loop {
        let m = transfer_of(net, &pairs, &values, field);
        let h1 = m.submatrix(&rows1, &t1);
        let h2 = m.submatrix(&rows2, &t1);
        let g2 = m.submatrix(&rows2, &t2);
        let (a, b) = (h1.rank(), g2.rank());
        let g = definition_grank(&h1, &h2, &g2)?;
        best.codes += 1;
        best.r1_max = best.r1_max.max(a);
        best.r2_max = best.r2_max.max(b);
        best.grank = best.grank.max(g);
        best.max_sum_rate = best.max_sum_rate.max(g.min(a + b));
        for x in 0..=a {
            for y in 0..=b {
                if x + y <= g {
                    points.insert((x, y));
                }
            }
        }
        if best.one_one_witness.is_none() && a >= 1 && b >= 1 && g >= 2 {
            let ne = net.edge_count();
            let mut f = FieldMatrix::zeros(field, ne, ne);
            for (&(from, to), &x) in pairs.iter().zip(&values) {
                f.set(from, to, x);
            }
            best.one_one_witness = Some(f);
        }

        // odometer over GF(p)^pairs
        let mut i = 0;
        while i < values.len() {
            values[i] += 1;
            if values[i] < p {
                break;
            }
            values[i] = 0;
            i += 1;
        }
        if i == values.len() {
            break;
        }
    }
    best.achievable = pareto(&points);
    Ok(best)
}

fn pareto(points: &BTreeSet<(usize, usize)>) -> Vec<(usize, usize)> {
    points
        .iter()
        .copied()
        .filter(|&(x, y)| !points.iter().any(|&(u, v)| u >= x && v >= y && (u, v) != (x, y)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoutingBest {
    /// Maximal integral `(R1, R2)` pairs.
    pub corners: Vec<(usize, usize)>,
    pub max_sum: usize,
}

fn paths_to(net: &Network, s: VertexId, dests: &EdgeSet) -> Vec<u32> {
    fn walk(net: &Network, v: VertexId, mask: u32, dests: &EdgeSet, out: &mut Vec<u32>) {
        for &e in net.out_edges(v) {
            let m = mask | (1 << e);
            if dests.contains(&e) {
                out.push(m);
            }
            walk(net, net.edge(e).head, m, dests, out);
        }
    }
    let mut out = Vec::new();
    walk(net, s, 0, dests, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

/// Largest number of pairwise disjoint paths avoiding `blocked`.
fn max_disjoint(paths: &[u32], start: usize, blocked: u32, memo: &mut HashMap<(usize, u32), usize>) -> usize {
    if start == paths.len() {
        return 0;
    }
    if let Some(&v) = memo.get(&(start, blocked)) {
        return v;
    }
    let mut best = max_disjoint(paths, start + 1, blocked, memo);
    if paths[start] & blocked == 0 {
        best = best.max(1 + max_disjoint(paths, start + 1, blocked | paths[start], memo));
    }
    memo.insert((start, blocked), best);
    best
}

/// Best integral routing: session `i` sends one unit along each of a set of
/// edge-disjoint `s_i -> T_i` paths, and the two sessions share no edge.
pub fn integral_routing_best(net: &Network) -> Result<RoutingBest, OracleError> {
    cap("edge count", net.edge_count(), ROUTING_EDGE_CAP)?;
    let p1 = paths_to(net, net.s1(), net.t1());
    let p2 = paths_to(net, net.s2(), net.t2());

    // every disjoint selection of session-1 paths, by used-edge mask
    let mut selections: HashMap<u32, usize> = HashMap::new();
    let mut stack = vec![(0usize, 0u32, 0usize)];
    while let Some((i, mask, count)) = stack.pop() {
        let e = selections.entry(mask).or_insert(0);
        *e = (*e).max(count);
        for (j, &p) in p1.iter().enumerate().skip(i) {
            if p & mask == 0 {
                stack.push((j + 1, mask | p, count + 1));
            }
        }
    }

    let mut memo = HashMap::new();
    let mut points = BTreeSet::new();
    for (&mask, &r1) in &selections {
        let r2 = max_disjoint(&p2, 0, mask, &mut memo);
        points.insert((r1, r2));
    }
    let corners = pareto(&points);
    let max_sum = corners.iter().map(|&(a, b)| a + b).max().unwrap_or(0);
    Ok(RoutingBest { corners, max_sum })
}

/// `min over G1 of rank [[H1, G1], [H2, G2]]`.
pub fn grank_via_g1_enumeration(
    h1: &FieldMatrix,
    h2: &FieldMatrix,
    g2: &FieldMatrix,
    p: u64,
) -> Result<usize, OracleError> {
    cap("field size", p as usize, SMALL_PRIME_CAP as usize)?;
    for d in [h1.rows(), h1.cols(), h2.rows(), g2.cols()] {
        cap("matrix dimension", d, ENUMERATION_DIM_CAP)?;
    }
    let field = h1.field();
    let (rows, cols) = (h1.rows(), g2.cols());
    let bottom = h2.hcat(g2)?;
    let n = rows * cols;
    let mut best = usize::MAX;
    let mut values = vec![0u64; n];
    loop {
        let mut g1 = FieldMatrix::zeros(field, rows, cols);
        for (k, &x) in values.iter().enumerate() {
            g1.set(k / cols.max(1), k % cols.max(1), x);
        }
        best = best.min(h1.hcat(&g1)?.vcat(&bottom)?.rank());
        let mut i = 0;
        while i < n {
            values[i] += 1;
            if values[i] < p {
                break;
            }
            values[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GnsCheck {
    pub grank: usize,
    pub gns: usize,
    pub holds: bool,
}

/// Checks the final Grank of a code against the GNS cut-set bound.
pub fn gns_vs_sumrate(net: &Network, m: &FieldMatrix) -> Result<GnsCheck, OracleError> {
    let gns = net.gns_bound()?;
    let rows1 = net.out_edges(net.s1()).to_vec();
    let rows2 = net.out_edges(net.s2()).to_vec();
    let t1: Vec<EdgeId> = net.t1().iter().copied().collect();
    let t2: Vec<EdgeId> = net.t2().iter().copied().collect();
    let grank = definition_grank(
        &m.submatrix(&rows1, &t1),
        &m.submatrix(&rows2, &t1),
        &m.submatrix(&rows2, &t2),
    )?;
    Ok(GnsCheck {
        grank,
        gns,
        holds: grank <= gns,
    })
}
