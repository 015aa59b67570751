//! Destination reduction: replaces the highest-ordered destination edges by
//! the incoming edges of their common tail until only source edges remain.
//!
//! Stage `i` of the returned sequence holds `T1^(i)`, `T2^(i)` together with
//! the bookkeeping sets the coder consumes when going from stage `i + 1` back
//! to stage `i`:
//!
//! * `U_j = T_j^(i) ∩ T_j^(i+1)` (unchanged),
//! * `I_j = T_j^(i+1) \ U_j` (incoming edges of the processed vertex),
//! * `O_j = T_j^(i) \ U_j` (outgoing edges coded at this stage),
//! * `A2 = O2 ∩ O1`, `B2 = O2 \ O1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netgraph::{EdgeId, EdgeSet, Network, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("edge {0:?} reaches no destination edge; prune the network first")]
    Unpruned(String),
    #[error("stage {index} out of range: the sequence has stages 0..{last}")]
    StageOutOfRange { index: usize, last: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReductionStage {
    pub index: usize,
    pub t1: EdgeSet,
    pub t2: EdgeSet,
    /// Common tail of the edges replaced at this stage; `None` at stage N.
    pub vertex: Option<VertexId>,
    pub u1: EdgeSet,
    pub u2: EdgeSet,
    pub i1: EdgeSet,
    pub i2: EdgeSet,
    pub o1: EdgeSet,
    pub o2: EdgeSet,
    pub a2: EdgeSet,
    pub b2: EdgeSet,
}

impl ReductionStage {
    /// Edges leaving the destination sets at this stage (`O1 ∪ B2`).
    pub fn removed(&self) -> EdgeSet {
        self.o1.union(&self.b2).copied().collect()
    }
}

#[derive(Debug, Clone)]
pub struct ReductionSequence {
    network: Network,
    stages: Vec<ReductionStage>,
}

/// Stage record with edge and vertex names, for traces and golden files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTrace {
    #[serde(rename = "i")]
    pub index: usize,
    #[serde(rename = "T1")]
    pub t1: Vec<String>,
    #[serde(rename = "T2")]
    pub t2: Vec<String>,
    #[serde(rename = "v")]
    pub vertex: Option<String>,
    #[serde(rename = "U1")]
    pub u1: Vec<String>,
    #[serde(rename = "U2")]
    pub u2: Vec<String>,
    #[serde(rename = "I1")]
    pub i1: Vec<String>,
    #[serde(rename = "I2")]
    pub i2: Vec<String>,
    #[serde(rename = "O1")]
    pub o1: Vec<String>,
    #[serde(rename = "A2")]
    pub a2: Vec<String>,
    #[serde(rename = "B2")]
    pub b2: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReductionProperty {
    /// Replaced edges share a tail `v`; added edges are `In(v)`.
    CommonTail,
    /// Every edge reaching `T_j` appears in some `T_j^(i)`, last at the same
    /// stage for both destinations.
    Coverage,
    /// Edges below the stage-`i` vertex are exactly the later destination
    /// edges.
    LowerOrder,
    /// Stage N destinations are source edges.
    Collocated,
    /// Each `T_j^(i)` cuts both sources from `T_j`.
    CutSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyCheck {
    pub property: ReductionProperty,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, p: ReductionProperty) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.property == p)
    }
}

/// Runs destination reduction on a pruned network.
pub fn reduce(net: &Network) -> Result<ReductionSequence, ReductionError> {
    let pruned = net.prune_noncontributing();
    if pruned.edge_count() != net.edge_count() {
        let kept: EdgeSet = pruned.edges().iter().map(|e| net.edge_id(&e.name).unwrap()).collect();
        let bad = (0..net.edge_count()).find(|e| !kept.contains(e)).unwrap();
        return Err(ReductionError::Unpruned(net.edge_name(bad).to_string()));
    }

    let sources = net.source_edges();
    let mut t1 = net.t1().clone();
    let mut t2 = net.t2().clone();
    let mut stages = Vec::new();
    loop {
        let union: EdgeSet = t1.union(&t2).copied().collect();
        if union.is_subset(&sources) {
            stages.push(ReductionStage {
                index: stages.len(),
                t1,
                t2,
                ..Default::default()
            });
            break;
        }
        let top = union.iter().map(|&e| net.edge_order(e)).max().unwrap();
        let e_max: EdgeSet = union.iter().copied().filter(|&e| net.edge_order(e) == top).collect();
        let v = net.edge(*e_max.iter().next().unwrap()).tail;
        let parents: EdgeSet = net.in_edges(v).iter().copied().collect();
        let step = |t: &EdgeSet| -> EdgeSet {
            if t.is_disjoint(&e_max) {
                t.clone()
            } else {
                t.difference(&e_max).chain(&parents).copied().collect()
            }
        };
        let next1 = step(&t1);
        let next2 = step(&t2);
        stages.push(fill_stage(stages.len(), v, t1, t2, &next1, &next2));
        t1 = next1;
        t2 = next2;
    }
    Ok(ReductionSequence {
        network: net.clone(),
        stages,
    })
}

fn fill_stage(index: usize, v: VertexId, t1: EdgeSet, t2: EdgeSet, next1: &EdgeSet, next2: &EdgeSet) -> ReductionStage {
    let u1: EdgeSet = t1.intersection(next1).copied().collect();
    let u2: EdgeSet = t2.intersection(next2).copied().collect();
    let i1 = next1.difference(&u1).copied().collect();
    let i2 = next2.difference(&u2).copied().collect();
    let o1: EdgeSet = t1.difference(&u1).copied().collect();
    let o2: EdgeSet = t2.difference(&u2).copied().collect();
    let a2 = o2.intersection(&o1).copied().collect();
    let b2 = o2.difference(&o1).copied().collect();
    ReductionStage {
        index,
        t1,
        t2,
        vertex: Some(v),
        u1,
        u2,
        i1,
        i2,
        o1,
        o2,
        a2,
        b2,
    }
}

impl ReductionSequence {
    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn stages(&self) -> &[ReductionStage] {
        &self.stages
    }

    /// Index of the final stage.
    pub fn last_index(&self) -> usize {
        self.stages.len() - 1
    }

    /// Bookkeeping sets for stage `i < N`.
    pub fn stage_sets(&self, i: usize) -> Result<&ReductionStage, ReductionError> {
        if i >= self.last_index() {
            return Err(ReductionError::StageOutOfRange {
                index: i,
                last: self.last_index(),
            });
        }
        Ok(&self.stages[i])
    }

    pub fn trace(&self) -> Vec<StageTrace> {
        let n = &self.network;
        let names = |s: &EdgeSet| n.edge_names(s);
        self.stages
            .iter()
            .map(|s| StageTrace {
                index: s.index,
                t1: names(&s.t1),
                t2: names(&s.t2),
                vertex: s.vertex.map(|v| n.vertex_name(v).to_string()),
                u1: names(&s.u1),
                u2: names(&s.u2),
                i1: names(&s.i1),
                i2: names(&s.i2),
                o1: names(&s.o1),
                a2: names(&s.a2),
                b2: names(&s.b2),
            })
            .collect()
    }

    /// Checks the five structural properties of the reduction.
    pub fn validate_properties(&self) -> PropertyReport {
        PropertyReport {
            checks: vec![
                self.check(ReductionProperty::CommonTail, self.common_tail()),
                self.check(ReductionProperty::Coverage, self.coverage()),
                self.check(ReductionProperty::LowerOrder, self.lower_order()),
                self.check(ReductionProperty::Collocated, self.collocated()),
                self.check(ReductionProperty::CutSet, self.cut_sets()),
            ],
        }
    }

    fn check(&self, property: ReductionProperty, witness: Option<String>) -> PropertyCheck {
        PropertyCheck {
            property,
            passed: witness.is_none(),
            witness,
        }
    }

    fn common_tail(&self) -> Option<String> {
        let n = &self.network;
        for w in self.stages.windows(2) {
            let (cur, next) = (&w[0], &w[1]);
            for (j, t, tn) in [(1, &cur.t1, &next.t1), (2, &cur.t2, &next.t2)] {
                let gone: EdgeSet = t.difference(tn).copied().collect();
                let added: EdgeSet = tn.difference(t).copied().collect();
                let tails: EdgeSet = gone.iter().map(|&e| n.edge(e).tail).collect();
                if tails.len() > 1 || tails.iter().any(|&v| Some(v) != cur.vertex) {
                    return Some(format!("stage {}: T{j} loses edges with several tails", cur.index));
                }
                if added.is_empty() {
                    continue;
                }
                let v = cur.vertex.unwrap();
                let parents: EdgeSet = n.in_edges(v).iter().copied().collect();
                if gone.is_empty() || !added.is_subset(&parents) || !parents.is_subset(tn) {
                    return Some(format!(
                        "stage {}: T{j} gains {:?}, not In({})",
                        cur.index,
                        n.edge_names(&added),
                        n.vertex_name(v)
                    ));
                }
            }
            if let (false, Some(v)) = (cur.a2.is_empty(), cur.vertex) {
                let parents: EdgeSet = n.in_edges(v).iter().copied().collect();
                if !parents.is_subset(&next.t1) || !parents.is_subset(&next.t2) {
                    return Some(format!(
                        "stage {}: A2 nonempty but In(v) not in both destinations",
                        cur.index
                    ));
                }
            }
        }
        None
    }

    fn coverage(&self) -> Option<String> {
        let n = &self.network;
        let last_stage = |e: EdgeId, j: usize| {
            self.stages
                .iter()
                .rev()
                .find(|s| if j == 1 { s.t1.contains(&e) } else { s.t2.contains(&e) })
                .map(|s| s.index)
        };
        for e in 0..n.edge_count() {
            let reaches1 = n.t1().iter().any(|&t| n.communicates(e, t));
            let reaches2 = n.t2().iter().any(|&t| n.communicates(e, t));
            let k1 = last_stage(e, 1);
            let k2 = last_stage(e, 2);
            if reaches1 && k1.is_none() {
                return Some(format!("{} reaches T1 but never appears in it", n.edge_name(e)));
            }
            if reaches2 && k2.is_none() {
                return Some(format!("{} reaches T2 but never appears in it", n.edge_name(e)));
            }
            if reaches1 && reaches2 && k1 != k2 {
                return Some(format!(
                    "{} leaves T1 after stage {:?} but T2 after stage {:?}",
                    n.edge_name(e),
                    k1,
                    k2
                ));
            }
        }
        None
    }

    fn lower_order(&self) -> Option<String> {
        let n = &self.network;
        for (i, s) in self.stages.iter().enumerate().take(self.last_index()) {
            let removed: EdgeSet = s.t1.union(&s.t2).copied().collect::<EdgeSet>();
            let next = &self.stages[i + 1];
            let next_union: EdgeSet = next.t1.union(&next.t2).copied().collect();
            let removed: EdgeSet = removed.difference(&next_union).copied().collect();
            let Some(&r) = removed.iter().next() else {
                return Some(format!("stage {i}: no edge removed"));
            };
            let level = n.edge_order(r);
            let lower: EdgeSet = (0..n.edge_count()).filter(|&e| n.edge_order(e) < level).collect();
            let later: EdgeSet = self.stages[i + 1..]
                .iter()
                .flat_map(|s| s.t1.iter().chain(&s.t2))
                .copied()
                .collect();
            if lower != later {
                let diff: EdgeSet = lower.symmetric_difference(&later).copied().collect();
                return Some(format!("stage {i}: mismatch on {:?}", n.edge_names(&diff)));
            }
        }
        None
    }

    fn collocated(&self) -> Option<String> {
        let n = &self.network;
        let last = self.stages.last().unwrap();
        let union: EdgeSet = last.t1.union(&last.t2).copied().collect();
        let sources = n.source_edges();
        if !union.is_subset(&sources) {
            let extra: EdgeSet = union.difference(&sources).copied().collect();
            return Some(format!("stage N keeps non-source edges {:?}", n.edge_names(&extra)));
        }
        let all_reach = sources
            .iter()
            .all(|&e| n.t1().iter().chain(n.t2()).any(|&t| n.communicates(e, t)));
        if all_reach && union != sources {
            return Some("stage N misses some source edge".to_string());
        }
        None
    }

    fn cut_sets(&self) -> Option<String> {
        let n = &self.network;
        for s in &self.stages {
            for (j, tj, orig) in [(1, &s.t1, n.t1()), (2, &s.t2, n.t2())] {
                let mut removed = vec![false; n.edge_count()];
                for &e in tj {
                    removed[e] = true;
                }
                for src in [n.s1(), n.s2()] {
                    if !n.is_cut(&removed, src, orig) {
                        return Some(format!(
                            "T{j}^({}) does not cut {} from T{j}",
                            s.index,
                            n.vertex_name(src)
                        ));
                    }
                }
            }
        }
        None
    }
}
