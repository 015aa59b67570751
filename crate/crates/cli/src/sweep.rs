//! Randomized sweeps. Trial `i` uses network seed `base + i`, so a failing
//! seed can be replayed with `tuz gen --seed`.

use rayon::prelude::*;
use serde::Serialize;
use tuz_core::coder::{contains_one_one, recursive_coding};
use tuz_core::gf::FieldConfig;
use tuz_core::io::SweepReport;
use tuz_core::mfmc::{single_unicast_code, MfmcSweep, UnicastProblem};
use tuz_core::netgraph::{EdgeSet, Network, RandomDagParams};
use tuz_core::reduction::reduce;
use tuz_core::rng::SplitRng;

pub fn trial_params(base: u64, index: usize) -> RandomDagParams {
    let seed = base.wrapping_add(index as u64);
    RandomDagParams {
        n_vertices: 4 + (seed % 9) as usize,
        max_in_degree: 4,
        edge_density: 0.5,
        seed,
        resample_budget: 100,
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Theorem1Report {
    #[serde(flatten)]
    pub summary: SweepReport,
    /// Trials with GNS bound at least 2.
    pub eligible: usize,
    pub first_attempt_pass: usize,
}

enum Outcome {
    /// `(1, 1)` reached on attempt `n` (1-based).
    OneOne(usize),
    /// Not eligible; the converse check held.
    Converse,
    Fail,
}

fn theorem1_trial(net: &Network, seed: u64, field: FieldConfig, retries: usize) -> Outcome {
    let Ok(seq) = reduce(net) else { return Outcome::Fail };
    let eligible = matches!(net.gns_bound(), Ok(g) if g >= 2);
    if !eligible {
        let single = net.has_single_edge_gns().is_some();
        let st = recursive_coding(&seq, field, &mut SplitRng::for_stream(seed, 0), retries);
        return match st.and_then(|s| s.rate_report()) {
            Ok(r) if !single || r.grank <= 1 => Outcome::Converse,
            _ => Outcome::Fail,
        };
    }
    for attempt in 0..retries {
        let st = recursive_coding(&seq, field, &mut SplitRng::for_stream(seed, attempt as u64), retries);
        if let Ok(r) = st.and_then(|s| s.rate_report()) {
            if contains_one_one(&r) {
                return Outcome::OneOne(attempt + 1);
            }
        }
    }
    Outcome::Fail
}

pub fn theorem1(trials: usize, base: u64, field: FieldConfig, retries: usize) -> Theorem1Report {
    let outcomes: Vec<(u64, Outcome)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let params = trial_params(base, i);
            let outcome = match Network::random_dag(&params) {
                Ok(net) => theorem1_trial(&net, params.seed, field, retries),
                Err(_) => Outcome::Fail,
            };
            (params.seed, outcome)
        })
        .collect();

    let mut rep = Theorem1Report::default();
    rep.summary.trials = trials;
    for (seed, o) in outcomes {
        match o {
            Outcome::OneOne(n) => {
                rep.eligible += 1;
                rep.summary.pass += 1;
                if n == 1 {
                    rep.first_attempt_pass += 1;
                }
            }
            Outcome::Converse => rep.summary.pass += 1,
            Outcome::Fail => {
                rep.summary.fail += 1;
                rep.summary.fail_seeds.push(seed);
            }
        }
    }
    rep.summary.fail_seeds.sort_unstable();
    rep
}

pub fn verify_mfmc(trials: usize, base: u64, field: FieldConfig, retries: usize) -> MfmcSweep {
    let results: Vec<Option<usize>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let params = trial_params(base, i);
            let net = Network::random_dag(&params).ok()?;
            let t: EdgeSet = net.t1().union(net.t2()).copied().collect();
            let cut = net.min_cut(net.s1(), &t);
            let prob = UnicastProblem::new(net.clone(), net.s1(), t).ok()?;
            let code = single_unicast_code(&prob, field, &mut SplitRng::new(params.seed), retries).ok()?;
            (code.rank == cut).then_some(code.retries_used)
        })
        .collect();
    MfmcSweep {
        instances: trials,
        failures: results.iter().filter(|r| r.is_none()).count(),
        max_retries_used: results.iter().flatten().copied().max().unwrap_or(0),
    }
}
