//! Linear-algebraic max-flow min-cut: atomic decompositions of unitriangular
//! matrices and a recursive single-unicast code construction whose transfer
//! rank meets the min-cut.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::coder::CodingState;
use crate::gf::{random_column, FieldConfig, FieldMatrix, GfError};
use crate::netgraph::{EdgeId, EdgeSet, Network, VertexId};
use crate::rng::SplitRng;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MfmcError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("invalid unicast problem: {0}")]
    InvalidProblem(String),
    #[error("gave up after {attempts} attempts {context}")]
    RetryExhausted { attempts: usize, context: String },
}

/// `U^[1], ..., U^[n]`: `U^[i]` keeps the off-diagonal part of column `i`.
/// `U = U^[n] ... U^[1]`.
pub fn atomic_decompose(u: &FieldMatrix) -> Result<Vec<FieldMatrix>, MfmcError> {
    if !u.is_unitriangular() {
        return Err(MfmcError::InvalidProblem("matrix is not unitriangular".into()));
    }
    let n = u.rows();
    Ok((0..n)
        .map(|i| {
            let mut a = FieldMatrix::identity(u.field(), n);
            for r in 0..i {
                a.set(r, i, u.get(r, i));
            }
            a
        })
        .collect())
}

/// `(I - F)^-1` as the forward product of the edge matrices `(I + F)^[i]`.
pub fn network_transfer_via_atomic(f: &FieldMatrix) -> Result<FieldMatrix, MfmcError> {
    if !f.is_strictly_upper() {
        return Err(MfmcError::InvalidProblem(
            "local coding matrix must be strictly upper triangular".into(),
        ));
    }
    let n = f.rows();
    let e = FieldMatrix::identity(f.field(), n).add(f)?;
    let mut out = FieldMatrix::identity(f.field(), n);
    for factor in atomic_decompose(&e)? {
        out = out.mul(&factor)?;
    }
    Ok(out)
}

/// A single-source problem on a two-unicast network; its second destination
/// set is ignored.
#[derive(Debug, Clone)]
pub struct UnicastProblem {
    pub network: Network,
    pub s: VertexId,
    pub t: EdgeSet,
}

impl UnicastProblem {
    pub fn new(network: Network, s: VertexId, t: EdgeSet) -> Result<Self, MfmcError> {
        if s >= network.vertex_count() {
            return Err(MfmcError::InvalidProblem(format!("unknown source vertex {s}")));
        }
        if let Some(&e) = t.iter().find(|&&e| e >= network.edge_count()) {
            return Err(MfmcError::InvalidProblem(format!("unknown edge {e}")));
        }
        Ok(Self { network, s, t })
    }

    /// The `s1 -> T1` problem of a network.
    pub fn first_session(network: &Network) -> Self {
        Self {
            s: network.s1(),
            t: network.t1().clone(),
            network: network.clone(),
        }
    }

    pub fn min_cut(&self) -> usize {
        self.network.min_cut(self.s, &self.t)
    }

    /// `rank(A (I - F)^-1 B^T)` for this problem's incident/exit selectors.
    pub fn transfer_rank(&self, m: &FieldMatrix) -> usize {
        let t: Vec<EdgeId> = self.t.iter().copied().collect();
        m.submatrix(self.network.out_edges(self.s), &t).rank()
    }
}

#[derive(Debug, Clone)]
pub struct UnicastCode {
    pub state: CodingState,
    pub rank: usize,
    pub min_cut: usize,
    /// Redraws beyond the first attempt, over every combining step.
    pub retries_used: usize,
}

/// Rank targets for [`combine_solutions`]: the combination must keep rank at
/// least `rank_a` on `exit_a` and exactly `rank_b` on `exit_b`.
#[derive(Debug, Clone)]
pub struct CombineSelectors {
    pub incident: Vec<EdgeId>,
    pub exit_a: Vec<EdgeId>,
    pub rank_a: usize,
    pub exit_b: Vec<EdgeId>,
    pub rank_b: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Combination {
    pub p: u64,
    pub q: u64,
    pub f: FieldMatrix,
    pub attempts: usize,
}

fn transfer(f: &FieldMatrix) -> Result<FieldMatrix, GfError> {
    let n = f.rows();
    FieldMatrix::identity(f.field(), n)
        .add(&f.scale(f.field().neg(1)))?
        .inv_unitriangular()
}

/// `p F_a + q F_b` with both rank targets checked.
pub fn combine_with(
    fa: &FieldMatrix,
    fb: &FieldMatrix,
    p: u64,
    q: u64,
    sel: &CombineSelectors,
) -> Result<Option<FieldMatrix>, MfmcError> {
    let f = fa.scale(p).add(&fb.scale(q))?;
    let m = transfer(&f)?;
    let ok = m.submatrix(&sel.incident, &sel.exit_a).rank() >= sel.rank_a
        && m.submatrix(&sel.incident, &sel.exit_b).rank() == sel.rank_b;
    Ok(ok.then_some(f))
}

pub fn combine_solutions(
    fa: &FieldMatrix,
    fb: &FieldMatrix,
    sel: &CombineSelectors,
    rng: &mut SplitRng,
    retries: usize,
) -> Result<Combination, MfmcError> {
    let field = fa.field();
    for attempt in 1..=retries {
        let p = field.random_element(rng);
        let q = field.random_element(rng);
        if let Some(f) = combine_with(fa, fb, p, q, sel)? {
            return Ok(Combination {
                p,
                q,
                f,
                attempts: attempt,
            });
        }
    }
    Err(MfmcError::RetryExhausted {
        attempts: retries,
        context: "combining sub-solutions".into(),
    })
}

struct Solver<'a> {
    net: &'a Network,
    s: VertexId,
    field: FieldConfig,
    /// Destination edges leaving `s`, removed from the graph.
    removed: Vec<bool>,
    retries: usize,
    retries_used: usize,
    memo: HashMap<(usize, Vec<EdgeId>), FieldMatrix>,
}

impl Solver<'_> {
    fn active(&self, k: usize) -> Vec<bool> {
        (0..self.net.edge_count()).map(|e| e < k && !self.removed[e]).collect()
    }

    fn rank_on(&self, f: &FieldMatrix, t: &EdgeSet) -> Result<usize, GfError> {
        let t: Vec<EdgeId> = t.iter().copied().collect();
        let rows: Vec<EdgeId> = self
            .net
            .out_edges(self.s)
            .iter()
            .copied()
            .filter(|&e| !self.removed[e])
            .collect();
        Ok(transfer(f)?.submatrix(&rows, &t).rank())
    }

    /// Code on the edges `< k` (minus removed ones) reaching `c(s, t)`.
    fn solve(&mut self, k: usize, t: &EdgeSet, rng: &mut SplitRng) -> Result<FieldMatrix, MfmcError> {
        let key = (k, t.iter().copied().collect::<Vec<_>>());
        if let Some(f) = self.memo.get(&key) {
            return Ok(f.clone());
        }
        let f = self.solve_uncached(k, t, rng)?;
        self.memo.insert(key, f.clone());
        Ok(f)
    }

    fn solve_uncached(&mut self, k: usize, t: &EdgeSet, rng: &mut SplitRng) -> Result<FieldMatrix, MfmcError> {
        let ne = self.net.edge_count();
        let Some(n) = (0..k).rev().find(|&e| !self.removed[e]) else {
            return Ok(FieldMatrix::zeros(self.field, ne, ne));
        };
        if !t.contains(&n) {
            return self.solve(n, t, rng);
        }
        let mut rest = t.clone();
        rest.remove(&n);
        let v = self.net.edge(n).tail;
        if v == self.s {
            return self.solve(n, &rest, rng);
        }

        let cut = self.net.min_cut_within(&self.active(k), self.s, t);
        let cut_without = self.net.min_cut_within(&self.active(n), self.s, &rest);
        if cut_without == cut {
            // e_n lies in no min-cut: its column stays zero
            return self.solve(n, &rest, rng);
        }

        let parents: Vec<EdgeId> = self
            .net
            .in_edges(v)
            .iter()
            .copied()
            .filter(|&e| e < n && !self.removed[e])
            .collect();
        let mut widened = rest.clone();
        widened.extend(parents.iter().copied());
        let fa = self.solve(n, &widened, rng)?;
        let fb = self.solve(n, &rest, rng)?;
        let sel = CombineSelectors {
            incident: self
                .net
                .out_edges(self.s)
                .iter()
                .copied()
                .filter(|&e| !self.removed[e])
                .collect(),
            exit_a: widened.iter().copied().collect(),
            rank_a: cut,
            exit_b: rest.iter().copied().collect(),
            rank_b: cut - 1,
        };

        for attempt in 1..=self.retries {
            let comb = combine_solutions(&fa, &fb, &sel, rng, self.retries)?;
            let mut f = comb.f;
            let col = random_column(self.field, parents.len(), rng);
            for (r, &p) in parents.iter().enumerate() {
                f.set(p, n, col.get(r, 0));
            }
            if self.rank_on(&f, t)? == cut {
                self.retries_used += comb.attempts - 1 + attempt - 1;
                return Ok(f);
            }
        }
        Err(MfmcError::RetryExhausted {
            attempts: self.retries,
            context: format!("choosing the coding vector of {}", self.net.edge_name(n)),
        })
    }
}

/// Builds a code whose `s -> T` transfer rank equals the min-cut.
pub fn single_unicast_code(
    problem: &UnicastProblem,
    field: FieldConfig,
    rng: &mut SplitRng,
    retries: usize,
) -> Result<UnicastCode, MfmcError> {
    let net = &problem.network;
    if !net.source_reaches(problem.s, &problem.t) {
        return Err(MfmcError::InvalidProblem(format!(
            "source {} reaches no destination edge",
            net.vertex_name(problem.s)
        )));
    }
    let mut removed = vec![false; net.edge_count()];
    for &e in &problem.t {
        if net.edge(e).tail == problem.s {
            removed[e] = true;
        }
    }
    let mut solver = Solver {
        net,
        s: problem.s,
        field,
        removed,
        retries,
        retries_used: 0,
        memo: HashMap::new(),
    };
    let rest: EdgeSet = problem.t.iter().copied().filter(|&e| !solver.removed[e]).collect();
    let f = solver.solve(net.edge_count(), &rest, rng)?;
    let state = CodingState::from_local_coding(net, f).map_err(|e| MfmcError::InvalidProblem(e.to_string()))?;
    let rank = problem.transfer_rank(state.m());
    let min_cut = problem.min_cut();
    if rank != min_cut {
        return Err(MfmcError::RetryExhausted {
            attempts: retries,
            context: format!("reaching rank {min_cut} (got {rank})"),
        });
    }
    Ok(UnicastCode {
        state,
        rank,
        min_cut,
        retries_used: solver.retries_used,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MfmcSweep {
    pub instances: usize,
    pub failures: usize,
    pub max_retries_used: usize,
}
