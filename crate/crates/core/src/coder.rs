//! Recursive alignment-based code construction for two-unicast-Z networks.
//!
//! The coder walks the reduction sequence from stage N (sources only, trivial
//! code) back to stage 0. At each stage it codes the outgoing edges of one
//! vertex:
//!
//! * phase 1 picks random coefficients for the edges that only feed
//!   destination 2 (`B2`);
//! * phase 2 codes the edges of `O1` one at a time, either aligning the new
//!   interference column with the existing ones (a vector drawn from a null
//!   space) or drawing coefficients at random.
//!
//! Every random draw is checked against the ranks a generic draw would reach
//! and redrawn on failure, so a successful run is correct regardless of the
//! field size; only the retry count depends on it.

use serde::Serialize;
use thiserror::Error;

use crate::gf::{random_column, FieldConfig, FieldMatrix, GfError};
use crate::netgraph::{EdgeId, EdgeSet, Network, VertexId};
use crate::reduction::{ReductionSequence, ReductionStage};
use crate::rng::SplitRng;

pub const DEFAULT_RETRIES: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoderError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("dimension mismatch: {0}")]
    Dimensions(String),
    #[error("appending the candidate block does not increase the Grank")]
    NoGrankIncrease,
    #[error("gave up after {attempts} attempts {context}")]
    RetryExhausted { attempts: usize, context: String },
    #[error("edges {0:?} have not been coded")]
    Uncoded(Vec<String>),
}

/// `rank[H1; H2] + rank[H2 | G2] - rank(H2)`.
pub fn grank(h1: &FieldMatrix, h2: &FieldMatrix, g2: &FieldMatrix) -> Result<usize, CoderError> {
    if h1.cols() != h2.cols() || h2.rows() != g2.rows() {
        return Err(CoderError::Dimensions(format!(
            "H1 {}x{}, H2 {}x{}, G2 {}x{}",
            h1.rows(),
            h1.cols(),
            h2.rows(),
            h2.cols(),
            g2.rows(),
            g2.cols()
        )));
    }
    Ok(h1.vcat(h2)?.rank() + h2.hcat(g2)?.rank() - h2.rank())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentOutcome {
    pub f: FieldMatrix,
    /// True when `f` came from the null space (alignment branch).
    pub aligned: bool,
    pub attempts: usize,
}

/// Finds `f` with `Grank([H1|Af],[H2|Bf],G2) = Grank(H1,H2,G2) + 1`.
///
/// When `colspan(B) ⊆ colspan[H2|G2]` but `colspan(B) ⊄ colspan(H2)`, `f` is
/// the tail of a random null-space vector of `[H2|B]`, which puts `Bf` inside
/// `colspan(H2)`. Otherwise `f` is uniform.
pub fn alignment_vector(
    h1: &FieldMatrix,
    h2: &FieldMatrix,
    g2: &FieldMatrix,
    a: &FieldMatrix,
    b: &FieldMatrix,
    rng: &mut SplitRng,
    retries: usize,
) -> Result<AlignmentOutcome, CoderError> {
    if a.cols() != b.cols() {
        return Err(CoderError::Dimensions(format!(
            "A has {} columns, B has {}",
            a.cols(),
            b.cols()
        )));
    }
    let field = h1.field();
    let base = grank(h1, h2, g2)?;
    if grank(&h1.hcat(a)?, &h2.hcat(b)?, g2)? <= base {
        return Err(CoderError::NoGrankIncrease);
    }
    let aligned = h2.hcat(g2)?.colspan_contains(b)? && !h2.colspan_contains(b)?;
    let width = b.cols();
    let stacked = h2.hcat(b)?;
    let kernel = if aligned { Some(stacked.nullspace_basis()) } else { None };

    for attempt in 1..=retries {
        let f = match &kernel {
            Some(basis) => {
                let coeffs = loop {
                    let c = random_column(field, basis.cols(), rng);
                    if !c.is_zero() {
                        break c;
                    }
                };
                let v = basis.mul(&coeffs)?;
                let tail: Vec<usize> = (v.rows() - width..v.rows()).collect();
                v.select_rows(&tail)
            }
            None => random_column(field, width, rng),
        };
        if grank(&h1.hcat(&a.mul(&f)?)?, &h2.hcat(&b.mul(&f)?)?, g2)? == base + 1 {
            return Ok(AlignmentOutcome {
                f,
                aligned,
                attempts: attempt,
            });
        }
    }
    Err(CoderError::RetryExhausted {
        attempts: retries,
        context: "searching for a Grank-increasing column".into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Phase1,
    Alignment,
    Randomization,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodingStep {
    pub stage: usize,
    pub vertex: VertexId,
    pub edge: EdgeId,
    pub kind: StepKind,
    pub attempts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CodingLemma {
    /// `G2` on `T2^(i) \ T1^(i)` stays nonzero once an alignment happened.
    NonzeroInterferenceAfterAlignment,
    /// `[H1; H2]` on `T1^(i)` has no zero column.
    NoZeroDestinationColumn,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaViolation {
    pub lemma: CodingLemma,
    pub stage: usize,
    pub detail: String,
}

/// Transfer matrices from the source edges to a pair of destination sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferTriple {
    pub h1: FieldMatrix,
    pub h2: FieldMatrix,
    pub g1: FieldMatrix,
    pub g2: FieldMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RateReport {
    pub r1_max: usize,
    pub r2_max: usize,
    pub grank: usize,
    pub sum_cap_alt: usize,
    pub region_corners: Vec<(usize, usize)>,
}

impl RateReport {
    pub fn new(r1_max: usize, r2_max: usize, grank: usize, sum_cap_alt: usize) -> Self {
        Self {
            r1_max,
            r2_max,
            grank,
            sum_cap_alt,
            region_corners: region_corners(r1_max, r2_max, grank),
        }
    }

    /// Largest `R1 + R2` inside the region.
    pub fn max_sum_rate(&self) -> usize {
        self.grank.min(self.r1_max + self.r2_max)
    }

    pub fn contains(&self, r1: usize, r2: usize) -> bool {
        r1 <= self.r1_max && r2 <= self.r2_max && r1 + r2 <= self.grank
    }
}

/// Vertices of `{R1 <= a, R2 <= b, R1 + R2 <= g}` in the nonnegative quadrant,
/// counter-clockwise from the origin.
pub fn region_corners(a: usize, b: usize, g: usize) -> Vec<(usize, usize)> {
    let x = a.min(g);
    let y = b.min(g);
    let candidates = [(0, 0), (x, 0), (x, y.min(g - x)), (x.min(g - y), y), (0, y)];
    let mut out: Vec<(usize, usize)> = Vec::new();
    for c in candidates {
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

pub fn rate_region(t: &TransferTriple) -> Result<RateReport, CoderError> {
    let r1 = t.h1.rank();
    let r2 = t.g2.rank();
    Ok(RateReport::new(r1, r2, grank(&t.h1, &t.h2, &t.g2)?, r1 + r2))
}

pub fn contains_one_one(r: &RateReport) -> bool {
    r.r1_max >= 1 && r.r2_max >= 1 && r.grank >= 2
}

/// A (partial) linear code: local coding matrix `F` and transfer matrix
/// `M = (I - F)^-1`, maintained column by column in edge order.
#[derive(Debug, Clone)]
pub struct CodingState {
    network: Network,
    field: FieldConfig,
    f: FieldMatrix,
    m: FieldMatrix,
    coded: Vec<bool>,
    stage_cursor: usize,
    stage_granks: Vec<usize>,
    steps: Vec<CodingStep>,
    violations: Vec<LemmaViolation>,
}

impl CodingState {
    /// `F = 0`, `M = I`, with `coded` edges marked.
    fn trivial(network: &Network, field: FieldConfig, coded: &EdgeSet, stage: usize) -> Self {
        let ne = network.edge_count();
        let mut flags = vec![false; ne];
        for &e in coded {
            flags[e] = true;
        }
        Self {
            network: network.clone(),
            field,
            f: FieldMatrix::zeros(field, ne, ne),
            m: FieldMatrix::identity(field, ne),
            coded: flags,
            stage_cursor: stage,
            stage_granks: vec![0; stage + 1],
            steps: Vec::new(),
            violations: Vec::new(),
        }
    }

    /// Builds a state from an arbitrary strictly upper-triangular `F`
    /// respecting the network's adjacency; every edge counts as coded.
    pub fn from_local_coding(network: &Network, f: FieldMatrix) -> Result<Self, CoderError> {
        let ne = network.edge_count();
        if f.rows() != ne || f.cols() != ne || !f.is_strictly_upper() {
            return Err(CoderError::Dimensions(
                "F must be a strictly upper-triangular |E|x|E| matrix".into(),
            ));
        }
        let field = f.field();
        let mut i_minus_f = FieldMatrix::identity(field, ne);
        for r in 0..ne {
            for c in 0..ne {
                let x = f.get(r, c);
                if x != 0 {
                    if network.edge(r).head != network.edge(c).tail {
                        return Err(CoderError::Dimensions(format!(
                            "F[{r}][{c}] couples non-adjacent edges"
                        )));
                    }
                    i_minus_f.set(r, c, field.neg(x));
                }
            }
        }
        let m = i_minus_f.inv_unitriangular()?;
        Ok(Self {
            network: network.clone(),
            field,
            f,
            m,
            coded: vec![true; ne],
            stage_cursor: 0,
            stage_granks: Vec::new(),
            steps: Vec::new(),
            violations: Vec::new(),
        })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn field(&self) -> FieldConfig {
        self.field
    }

    /// Local coding matrix.
    pub fn f(&self) -> &FieldMatrix {
        &self.f
    }

    /// Network transfer matrix.
    pub fn m(&self) -> &FieldMatrix {
        &self.m
    }

    /// Lowest stage whose edges are coded.
    pub fn stage_cursor(&self) -> usize {
        self.stage_cursor
    }

    /// Grank of each stage's destination sets, indexed by stage.
    pub fn stage_granks(&self) -> &[usize] {
        &self.stage_granks
    }

    pub fn steps(&self) -> &[CodingStep] {
        &self.steps
    }

    pub fn alignments(&self) -> impl Iterator<Item = &CodingStep> {
        self.steps.iter().filter(|s| s.kind == StepKind::Alignment)
    }

    pub fn lemma_violations(&self) -> &[LemmaViolation] {
        &self.violations
    }

    /// Redraws beyond the first attempt, summed over all steps.
    pub fn extra_attempts(&self) -> usize {
        self.steps.iter().map(|s| s.attempts - 1).sum()
    }

    fn rows1(&self) -> &[EdgeId] {
        self.network.out_edges(self.network.s1())
    }

    fn rows2(&self) -> &[EdgeId] {
        self.network.out_edges(self.network.s2())
    }

    fn h1(&self, cols: &[EdgeId]) -> FieldMatrix {
        self.m.submatrix(self.rows1(), cols)
    }

    fn h2(&self, cols: &[EdgeId]) -> FieldMatrix {
        self.m.submatrix(self.rows2(), cols)
    }

    /// Columns of `M` restricted to the source rows, `[rows(s1); rows(s2)]`.
    fn stacked(&self, cols: &[EdgeId]) -> FieldMatrix {
        self.h1(cols).vcat(&self.h2(cols)).expect("same column count")
    }

    fn triple_on(&self, t1: &[EdgeId], t2: &[EdgeId]) -> (FieldMatrix, FieldMatrix, FieldMatrix) {
        (self.h1(t1), self.h2(t1), self.h2(t2))
    }

    fn grank_on(&self, t1: &[EdgeId], t2: &[EdgeId]) -> usize {
        let (h1, h2, g2) = self.triple_on(t1, t2);
        grank(&h1, &h2, &g2).expect("consistent shapes")
    }

    /// Sets the local coding column of `e` from its parents and refreshes
    /// `M`'s column; downstream columns must not be coded yet.
    fn set_local(&mut self, e: EdgeId, parents: &[EdgeId], coeffs: &FieldMatrix) {
        let fc = self.field;
        for (r, &p) in parents.iter().enumerate() {
            self.f.set(p, e, coeffs.get(r, 0));
        }
        for row in 0..self.m.rows() {
            let mut acc = u64::from(row == e);
            for (r, &p) in parents.iter().enumerate() {
                acc = fc.add(acc, fc.mul(self.m.get(row, p), coeffs.get(r, 0)));
            }
            self.m.set(row, e, acc);
        }
    }

    /// Transfer matrices onto the given destination sets.
    pub fn transfer_triple(&self, t1: &EdgeSet, t2: &EdgeSet) -> Result<TransferTriple, CoderError> {
        let missing: Vec<String> = t1
            .iter()
            .chain(t2)
            .filter(|&&e| !self.coded[e])
            .map(|&e| self.network.edge_name(e).to_string())
            .collect();
        if !missing.is_empty() {
            return Err(CoderError::Uncoded(missing));
        }
        let t1: Vec<EdgeId> = t1.iter().copied().collect();
        let t2: Vec<EdgeId> = t2.iter().copied().collect();
        Ok(TransferTriple {
            h1: self.h1(&t1),
            h2: self.h2(&t1),
            g1: self.h1(&t2),
            g2: self.h2(&t2),
        })
    }

    /// Transfer matrices onto the network's own destinations.
    pub fn final_triple(&self) -> Result<TransferTriple, CoderError> {
        self.transfer_triple(self.network.t1(), self.network.t2())
    }

    pub fn rate_report(&self) -> Result<RateReport, CoderError> {
        rate_region(&self.final_triple()?)
    }
}

fn vec_of(s: &EdgeSet) -> Vec<EdgeId> {
    s.iter().copied().collect()
}

/// Rank a generic extension of `k` by columns drawn from `colspan(x)` reaches.
fn generic_rank_ok(k: &FieldMatrix, x: &FieldMatrix, xf: &FieldMatrix) -> Result<bool, GfError> {
    let rk = k.rank();
    let full = k.hcat(x)?.rank();
    let got = k.hcat(xf)?.rank();
    Ok(got == rk + xf.cols().min(full - rk))
}

/// Each column of `xf` is nonzero whenever `x` is.
fn columns_nonzero(x: &FieldMatrix, xf: &FieldMatrix) -> bool {
    x.is_zero() || (0..xf.cols()).all(|c| !xf.column_is_zero(c))
}

/// Runs the recursive coding algorithm over a reduction sequence.
pub fn recursive_coding(
    seq: &ReductionSequence,
    field: FieldConfig,
    rng: &mut SplitRng,
    retries: usize,
) -> Result<CodingState, CoderError> {
    let net = seq.network();
    let last = seq.last_index();
    let stages = seq.stages();
    let top: EdgeSet = stages[last].t1.union(&stages[last].t2).copied().collect();
    let mut st = CodingState::trivial(net, field, &top, last);
    st.stage_granks[last] = st.grank_on(&vec_of(&stages[last].t1), &vec_of(&stages[last].t2));

    let mut aligned_so_far = false;
    for i in (0..last).rev() {
        let stage = &stages[i];
        let next = &stages[i + 1];
        let vertex = stage.vertex.expect("stages below N process a vertex");
        let before = st.steps.len();

        code_phase1(&mut st, stage, next, vertex, rng, retries)?;
        let target = st.stage_granks[i + 1];
        code_phase2(&mut st, stage, target, vertex, rng, retries)?;

        for e in stage.removed() {
            st.coded[e] = true;
        }
        st.stage_cursor = i;
        st.stage_granks[i] = st.grank_on(&vec_of(&stage.t1), &vec_of(&stage.t2));
        aligned_so_far |= st.steps[before..].iter().any(|s| s.kind == StepKind::Alignment);
        check_stage_lemmas(&mut st, stage, aligned_so_far);
    }
    Ok(st)
}

fn code_phase1(
    st: &mut CodingState,
    stage: &ReductionStage,
    next: &ReductionStage,
    vertex: VertexId,
    rng: &mut SplitRng,
    retries: usize,
) -> Result<(), CoderError> {
    if stage.b2.is_empty() {
        return Ok(());
    }
    let field = st.field;
    let i2 = st.network.in_edges(vertex).to_vec();
    let b2 = vec_of(&stage.b2);
    let x = st.h2(&i2);
    let x_full = st.stacked(&i2);
    let g_u2 = st.h2(&vec_of(&stage.u2));
    let h2_next = st.h2(&vec_of(&next.t1));
    let h2_u1 = st.h2(&vec_of(&stage.u1));
    let contexts = [
        FieldMatrix::zeros(field, x.rows(), 0),
        g_u2.clone(),
        h2_u1.hcat(&g_u2)?,
        h2_next.hcat(&g_u2)?,
    ];

    for attempt in 1..=retries {
        let block = FieldMatrix::random(field, i2.len(), b2.len(), rng);
        let xf = x.mul(&block)?;
        let mut ok = columns_nonzero(&x_full, &x_full.mul(&block)?) && columns_nonzero(&x, &xf);
        for k in &contexts {
            ok = ok && generic_rank_ok(k, &x, &xf)?;
        }
        if ok {
            for (c, &e) in b2.iter().enumerate() {
                st.set_local(e, &i2, &block.select_columns(&[c]));
                st.steps.push(CodingStep {
                    stage: stage.index,
                    vertex,
                    edge: e,
                    kind: StepKind::Phase1,
                    attempts: attempt,
                });
            }
            return Ok(());
        }
    }
    Err(CoderError::RetryExhausted {
        attempts: retries,
        context: format!("in phase 1 of stage {}", stage.index),
    })
}

fn code_phase2(
    st: &mut CodingState,
    stage: &ReductionStage,
    target: usize,
    vertex: VertexId,
    rng: &mut SplitRng,
    retries: usize,
) -> Result<(), CoderError> {
    let i1 = st.network.in_edges(vertex).to_vec();
    let mut cur_h = vec_of(&stage.u1);
    let mut cur_g: Vec<EdgeId> = stage.u2.union(&stage.b2).copied().collect();

    for &e in &stage.o1 {
        let (h1, h2, g2) = st.triple_on(&cur_h, &cur_g);
        let current = grank(&h1, &h2, &g2)?;
        let a = st.h1(&i1);
        let b = st.h2(&i1);
        let h2g2 = h2.hcat(&g2)?;
        let align = target > current && !h2.colspan_contains(&b)? && h2g2.colspan_contains(&b)?;

        let (f, kind, attempts) = if align {
            let out = alignment_vector(&h1, &h2, &g2, &a, &b, rng, retries)?;
            (out.f, StepKind::Alignment, out.attempts)
        } else {
            let reachable = grank(&h1.hcat(&a)?, &h2.hcat(&b)?, &g2)?;
            let expect = current + usize::from(reachable > current);
            let in_g2 = stage.a2.contains(&e);
            let ab = a.vcat(&b)?;
            let h1h2 = h1.vcat(&h2)?;
            let mut chosen = None;
            for attempt in 1..=retries {
                let f = random_column(st.field, i1.len(), rng);
                let (af, bf) = (a.mul(&f)?, b.mul(&f)?);
                let new_g2 = if in_g2 { g2.hcat(&bf)? } else { g2.clone() };
                let ok = grank(&h1.hcat(&af)?, &h2.hcat(&bf)?, &new_g2)? == expect
                    && columns_nonzero(&ab, &ab.mul(&f)?)
                    && columns_nonzero(&a, &af)
                    && columns_nonzero(&b, &bf)
                    && generic_rank_ok(&h1h2, &ab, &ab.mul(&f)?)?
                    && generic_rank_ok(&h1, &a, &af)?
                    && generic_rank_ok(&h2, &b, &bf)?
                    && generic_rank_ok(&h2g2, &b, &bf)?
                    && (!in_g2 || generic_rank_ok(&g2, &b, &bf)?);
                if ok {
                    chosen = Some((f, attempt));
                    break;
                }
            }
            let (f, attempt) = chosen.ok_or_else(|| CoderError::RetryExhausted {
                attempts: retries,
                context: format!("randomizing edge {} at stage {}", st.network.edge_name(e), stage.index),
            })?;
            (f, StepKind::Randomization, attempt)
        };

        st.set_local(e, &i1, &f);
        st.steps.push(CodingStep {
            stage: stage.index,
            vertex,
            edge: e,
            kind,
            attempts,
        });
        cur_h.push(e);
        if stage.a2.contains(&e) {
            cur_g.push(e);
        }
    }
    Ok(())
}

fn check_stage_lemmas(st: &mut CodingState, stage: &ReductionStage, aligned_so_far: bool) {
    let net = &st.network;
    let r1 = net.reachable_from(net.s1());
    let r2 = net.reachable_from(net.s2());
    let t1 = vec_of(&stage.t1);
    let stacked = st.stacked(&t1);
    for (c, &e) in t1.iter().enumerate() {
        let tail = net.edge(e).tail;
        if (r1[tail] || r2[tail]) && stacked.column_is_zero(c) {
            let detail = format!("column of {} is zero", net.edge_name(e));
            st.violations.push(LemmaViolation {
                lemma: CodingLemma::NoZeroDestinationColumn,
                stage: stage.index,
                detail,
            });
        }
    }
    if aligned_so_far {
        let q: Vec<EdgeId> = stage.t2.difference(&stage.t1).copied().collect();
        if st.h2(&q).is_zero() {
            let detail = format!("G2 on {:?} is zero", net.edge_names(&q));
            st.violations.push(LemmaViolation {
                lemma: CodingLemma::NonzeroInterferenceAfterAlignment,
                stage: stage.index,
                detail,
            });
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonotoneReport {
    /// Grank per stage, index 0 first.
    pub granks: Vec<usize>,
    pub non_increasing: bool,
    /// `(p, q)` with `p > q` and `Grank(p) < Grank(q)`.
    pub violation: Option<(usize, usize)>,
}

/// Checks that the stage Grank never grows when moving from stage N to 0.
pub fn grank_monotone_suite(seq: &ReductionSequence, st: &CodingState) -> Result<MonotoneReport, CoderError> {
    let mut granks = Vec::with_capacity(seq.stages().len());
    for s in seq.stages() {
        let t = st.transfer_triple(&s.t1, &s.t2)?;
        granks.push(grank(&t.h1, &t.h2, &t.g2)?);
    }
    let violation = (1..granks.len())
        .find(|&p| granks[p] < granks[p - 1])
        .map(|p| (p, p - 1));
    Ok(MonotoneReport {
        non_increasing: violation.is_none(),
        granks,
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::reduce;

    fn gf(p: u64) -> FieldConfig {
        FieldConfig::new(p).unwrap()
    }

    fn m(p: u64, rows: &[&[u64]]) -> FieldMatrix {
        FieldMatrix::from_rows(gf(p), rows).unwrap()
    }

    #[test]
    fn grank_small_cases() {
        let z = m(5, &[&[0]]);
        assert_eq!(grank(&z, &z, &z).unwrap(), 0);
        assert_eq!(grank(&m(5, &[&[1]]), &z, &m(5, &[&[1]])).unwrap(), 2);
        assert!(matches!(
            grank(&m(5, &[&[1, 0]]), &z, &z),
            Err(CoderError::Dimensions(_))
        ));
    }

    #[test]
    fn alignment_branch_lands_in_interference_span() {
        // GF(5): null space of [[1,1,1],[0,1,2]] is spanned by (1,3,1)
        let h1 = m(5, &[&[0]]);
        let h2 = m(5, &[&[1], &[0]]);
        let g2 = m(5, &[&[0], &[1]]);
        let a = m(5, &[&[1, 0]]);
        let b = m(5, &[&[1, 1], &[1, 2]]);
        assert_eq!(grank(&h1, &h2, &g2).unwrap(), 2);
        let f = FieldMatrix::column_vector(gf(5), &[3, 1]);
        assert_eq!(b.mul(&f).unwrap(), FieldMatrix::column_vector(gf(5), &[4, 0]));
        assert_eq!(
            grank(
                &h1.hcat(&a.mul(&f).unwrap()).unwrap(),
                &h2.hcat(&b.mul(&f).unwrap()).unwrap(),
                &g2
            )
            .unwrap(),
            3
        );

        let mut rng = SplitRng::new(3);
        let out = alignment_vector(&h1, &h2, &g2, &a, &b, &mut rng, 16).unwrap();
        assert!(out.aligned);
        // every nonzero null-space draw is a multiple of (3, 1)
        let bf = b.mul(&out.f).unwrap();
        assert!(h2.colspan_contains(&bf).unwrap());
        assert_eq!(out.f.get(0, 0), 3 * out.f.get(1, 0) % 5);
    }

    #[test]
    fn randomization_branch_when_b_in_h2_span() {
        let one = m(5, &[&[1]]);
        let zero = m(5, &[&[0]]);
        let mut rng = SplitRng::new(1);
        let out = alignment_vector(&zero, &one, &one, &one, &one, &mut rng, 16).unwrap();
        assert!(!out.aligned);
        assert_ne!(out.f.get(0, 0), 0);
    }

    #[test]
    fn alignment_vector_requires_increase() {
        let one = m(5, &[&[1]]);
        let mut rng = SplitRng::new(1);
        assert_eq!(
            alignment_vector(&one, &one, &one, &one, &one, &mut rng, 4),
            Err(CoderError::NoGrankIncrease)
        );
    }

    #[test]
    fn region_corners_cases() {
        assert_eq!(region_corners(1, 1, 2), vec![(0, 0), (1, 0), (1, 1), (0, 1)]);
        assert_eq!(region_corners(1, 1, 1), vec![(0, 0), (1, 0), (0, 1)]);
        assert_eq!(region_corners(2, 0, 2), vec![(0, 0), (2, 0)]);
        assert_eq!(region_corners(3, 3, 4), vec![(0, 0), (3, 0), (3, 1), (1, 3), (0, 3)]);
    }

    #[test]
    fn rate_region_from_identity_triple() {
        let f = gf(7);
        let t = TransferTriple {
            h1: FieldMatrix::identity(f, 1),
            h2: FieldMatrix::zeros(f, 1, 1),
            g1: FieldMatrix::zeros(f, 1, 1),
            g2: FieldMatrix::identity(f, 1),
        };
        let r = rate_region(&t).unwrap();
        assert!(r.contains(1, 1));
        assert!(contains_one_one(&r));
        assert_eq!(r.sum_cap_alt, 2);

        let t0 = TransferTriple {
            g2: FieldMatrix::zeros(f, 1, 1),
            ..t
        };
        assert_eq!(rate_region(&t0).unwrap().r2_max, 0);
    }

    #[test]
    fn contains_one_one_thresholds() {
        assert!(contains_one_one(&RateReport::new(1, 1, 2, 2)));
        assert!(!contains_one_one(&RateReport::new(1, 1, 1, 2)));
    }

    #[test]
    fn fig5_aligns_once_at_v5() {
        let net = Network::fig5();
        let seq = reduce(&net).unwrap();
        for seed in 0..20 {
            let st = recursive_coding(&seq, FieldConfig::default(), &mut SplitRng::new(seed), 16).unwrap();
            let al: Vec<_> = st.alignments().collect();
            assert_eq!(al.len(), 1);
            assert_eq!(al[0].stage, 0);
            assert_eq!(net.vertex_name(al[0].vertex), "v5");
            assert_eq!(net.edge_name(al[0].edge), "e8");

            let r = st.rate_report().unwrap();
            assert_eq!((r.r1_max, r.r2_max, r.grank), (1, 1, 2));
            assert!(contains_one_one(&r));
            assert!(st.lemma_violations().is_empty());

            // interference reaches destination 2 through e1 -> e5 -> e7
            let t = st.final_triple().unwrap();
            assert!(!t.g1.is_zero());
            // and is aligned away at destination 1
            assert!(t.h2.is_zero());
        }
    }

    #[test]
    fn fig5_stage_granks_are_flat() {
        let seq = reduce(&Network::fig5()).unwrap();
        let st = recursive_coding(&seq, FieldConfig::default(), &mut SplitRng::new(7), 16).unwrap();
        let rep = grank_monotone_suite(&seq, &st).unwrap();
        assert!(rep.non_increasing);
        assert_eq!(rep.granks, vec![2; 5]);
        assert_eq!(st.stage_granks(), rep.granks.as_slice());
    }

    #[test]
    fn state_invariants_after_coding() {
        let net = Network::fig5();
        let seq = reduce(&net).unwrap();
        let st = recursive_coding(&seq, FieldConfig::default(), &mut SplitRng::new(1), 16).unwrap();
        let f = st.f();
        assert!(f.is_strictly_upper());
        for r in 0..f.rows() {
            for c in 0..f.cols() {
                if f.get(r, c) != 0 {
                    assert_eq!(net.edge(r).head, net.edge(c).tail);
                }
            }
        }
        for s in net.source_edges() {
            assert!(f.column_is_zero(s));
        }
        let mut i_minus_f = FieldMatrix::identity(st.field(), f.rows());
        for r in 0..f.rows() {
            for c in 0..f.cols() {
                i_minus_f.set(r, c, st.field().sub(i_minus_f.get(r, c), f.get(r, c)));
            }
        }
        assert_eq!(&i_minus_f.inv_unitriangular().unwrap(), st.m());
        assert_eq!(st.stage_cursor(), 0);
    }

    #[test]
    fn chain_code_has_one_coefficient_per_edge() {
        let net = Network::from_names(
            &["s", "a", "b", "c"],
            &[("x", "s", "a"), ("y", "a", "b"), ("z", "b", "c")],
            "s",
            "s",
            &["z"],
            &["z"],
        )
        .unwrap();
        let seq = reduce(&net).unwrap();
        let st = recursive_coding(&seq, FieldConfig::default(), &mut SplitRng::new(0), 16).unwrap();
        for c in 1..3 {
            assert_eq!((0..3).filter(|&r| st.f().get(r, c) != 0).count(), 1);
        }
        let r = st.rate_report().unwrap();
        assert_eq!(r.r1_max, 1);
        let mono = grank_monotone_suite(&seq, &st).unwrap();
        assert!(mono.granks.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn transfer_triple_on_trivial_state() {
        let net = Network::fig5();
        let seq = reduce(&net).unwrap();
        let last = &seq.stages()[seq.last_index()];
        let top: EdgeSet = last.t1.union(&last.t2).copied().collect();
        let st = CodingState::trivial(&net, FieldConfig::default(), &top, seq.last_index());
        let t = st.transfer_triple(&last.t1, &last.t2).unwrap();
        assert_eq!(t.h1.to_rows(), vec![vec![1, 0]]);
        assert_eq!(t.h2.to_rows(), vec![vec![0, 1]]);
        assert!(matches!(
            st.transfer_triple(net.t1(), net.t2()),
            Err(CoderError::Uncoded(_))
        ));
    }

    #[test]
    fn zero_local_coding_gives_identity_h1() {
        let net = Network::fig5();
        let st = CodingState::from_local_coding(&net, FieldMatrix::zeros(FieldConfig::default(), 8, 8)).unwrap();
        let out1: EdgeSet = net.out_edges(net.s1()).iter().copied().collect();
        let t = st.transfer_triple(&out1, net.t2()).unwrap();
        assert_eq!(t.h1, FieldMatrix::identity(FieldConfig::default(), 1));
    }
}
