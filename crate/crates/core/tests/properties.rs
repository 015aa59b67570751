use proptest::prelude::*;
use tuz_core::coder::{grank, grank_monotone_suite, recursive_coding, CodingState};
use tuz_core::gf::{FieldConfig, FieldMatrix};
use tuz_core::mfmc::{atomic_decompose, network_transfer_via_atomic, single_unicast_code, UnicastProblem};
use tuz_core::netgraph::{EdgeSet, Network, RandomDagParams};
use tuz_core::oracle::grank_via_g1_enumeration;
use tuz_core::reduction::reduce;
use tuz_core::rng::SplitRng;

fn gf(p: u64) -> FieldConfig {
    FieldConfig::new(p).unwrap()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn random_net(seed: u64, vertices: usize) -> Network {
    let params = RandomDagParams {
        n_vertices: vertices,
        max_in_degree: 4,
        edge_density: 0.5,
        seed,
        resample_budget: 100,
    };
    Network::random_dag(&params).unwrap()
}

fn random_strict_upper(field: FieldConfig, n: usize, rng: &mut SplitRng) -> FieldMatrix {
    let mut f = FieldMatrix::zeros(field, n, n);
    for c in 0..n {
        for r in 0..c {
            f.set(r, c, field.random_element(rng));
        }
    }
    f
}

struct Blocks {
    h1: FieldMatrix,
    h2: FieldMatrix,
    g2: FieldMatrix,
    a: FieldMatrix,
    b: FieldMatrix,
    c: FieldMatrix,
}

fn blocks(p: u64, seed: u64, dims: (usize, usize, usize, usize, usize)) -> Blocks {
    let (r1, r2, q1, q2, k) = dims;
    let field = gf(p);
    let mut rng = SplitRng::new(seed);
    Blocks {
        h1: FieldMatrix::random(field, r1, q1, &mut rng),
        h2: FieldMatrix::random(field, r2, q1, &mut rng),
        g2: FieldMatrix::random(field, r2, q2, &mut rng),
        a: FieldMatrix::random(field, r1, k, &mut rng),
        b: FieldMatrix::random(field, r2, k, &mut rng),
        c: FieldMatrix::random(field, r2, k, &mut rng),
    }
}

fn dims() -> impl Strategy<Value = (usize, usize, usize, usize, usize)> {
    (1usize..4, 1usize..4, 0usize..4, 0usize..4, 1usize..4)
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn appending_columns_never_lowers_grank(p in prop::sample::select(vec![2u64, 5, 65521]), seed: u64, d in dims()) {
        let m = blocks(p, seed, d);
        let base = grank(&m.h1, &m.h2, &m.g2).unwrap();
        let h1a = m.h1.hcat(&m.a).unwrap();
        let h2b = m.h2.hcat(&m.b).unwrap();
        let g2c = m.g2.hcat(&m.c).unwrap();
        prop_assert!(grank(&h1a, &h2b, &m.g2).unwrap() >= base);
        prop_assert!(grank(&m.h1, &m.h2, &g2c).unwrap() >= base);
        prop_assert!(grank(&h1a, &h2b, &g2c).unwrap() >= base);
    }

    #[test]
    fn grank_increment_bounded_by_new_columns(p in prop::sample::select(vec![2u64, 5, 65521]), seed: u64, d in dims()) {
        let m = blocks(p, seed, d);
        let k = m.a.cols();
        let base = grank(&m.h1, &m.h2, &m.g2).unwrap();
        let grown = grank(&m.h1.hcat(&m.a).unwrap(), &m.h2.hcat(&m.b).unwrap(), &m.g2).unwrap();
        prop_assert!(grown <= base + k);
        let grown = grank(&m.h1, &m.h2, &m.g2.hcat(&m.c).unwrap()).unwrap();
        prop_assert!(grown <= base + k);
    }

    #[test]
    fn dependent_columns_leave_grank_unchanged(p in prop::sample::select(vec![2u64, 5, 65521]), seed: u64, d in dims()) {
        let m = blocks(p, seed, d);
        let field = gf(p);
        let mut rng = SplitRng::new(seed ^ 0x5eed);
        let x = FieldMatrix::random(field, m.h1.cols(), 2, &mut rng);
        let y = FieldMatrix::random(field, m.g2.cols(), 2, &mut rng);
        let base = grank(&m.h1, &m.h2, &m.g2).unwrap();
        let h1x = m.h1.hcat(&m.h1.mul(&x).unwrap()).unwrap();
        let h2x = m.h2.hcat(&m.h2.mul(&x).unwrap()).unwrap();
        prop_assert_eq!(grank(&h1x, &h2x, &m.g2).unwrap(), base);
        // [H2 | G2] Y-combinations are dependent columns of the interference block
        let mixed = m.h2.mul(&FieldMatrix::random(field, m.h2.cols(), 2, &mut rng)).unwrap()
            .add(&m.g2.mul(&y).unwrap()).unwrap();
        prop_assert_eq!(grank(&m.h1, &m.h2, &m.g2.hcat(&mixed).unwrap()).unwrap(), base);
    }

    #[test]
    fn grank_matches_g1_enumeration(p in prop::sample::select(vec![2u64, 3]), seed: u64,
                                    r1 in 1usize..3, r2 in 1usize..3, q1 in 1usize..3, q2 in 1usize..3) {
        let m = blocks(p, seed, (r1, r2, q1, q2, 1));
        prop_assert_eq!(
            grank(&m.h1, &m.h2, &m.g2).unwrap(),
            grank_via_g1_enumeration(&m.h1, &m.h2, &m.g2, p).unwrap()
        );
    }

    #[test]
    fn forward_edge_product_is_transfer(seed: u64, n in 0usize..12, p in prop::sample::select(vec![2u64, 5, 65521])) {
        let field = gf(p);
        let f = random_strict_upper(field, n, &mut SplitRng::new(seed));
        let direct = FieldMatrix::identity(field, n)
            .add(&f.scale(field.neg(1))).unwrap()
            .inv_unitriangular().unwrap();
        prop_assert_eq!(network_transfer_via_atomic(&f).unwrap(), direct);
    }

    #[test]
    fn atomic_factors_multiply_back(seed: u64, n in 1usize..10) {
        let field = gf(65521);
        let u = FieldMatrix::identity(field, n)
            .add(&random_strict_upper(field, n, &mut SplitRng::new(seed))).unwrap();
        let factors = atomic_decompose(&u).unwrap();
        prop_assert_eq!(factors.len(), n);
        let mut prod = FieldMatrix::identity(field, n);
        for a in factors.iter().rev() {
            prod = prod.mul(a).unwrap();
        }
        prop_assert_eq!(prod, u);
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn reduction_properties_hold(seed: u64, v in 4usize..13) {
        let net = random_net(seed, v);
        let seq = reduce(&net).unwrap();
        let report = seq.validate_properties();
        prop_assert!(report.all_passed(), "{:?}", report);
        let last = seq.stages().last().unwrap();
        prop_assert!(last.vertex.is_none());
    }

    #[test]
    fn destination_cuts_never_shrink_min_cut(seed: u64, v in 4usize..13) {
        let net = random_net(seed, v);
        let seq = reduce(&net).unwrap();
        for s in seq.stages() {
            prop_assert!(net.min_cut(net.s1(), &s.t1) >= net.min_cut(net.s1(), net.t1()));
            prop_assert!(net.min_cut(net.s2(), &s.t2) >= net.min_cut(net.s2(), net.t2()));
            prop_assert!(net.min_cut(net.s2(), &s.t1) >= net.min_cut(net.s2(), net.t1()));
        }
    }

    #[test]
    fn coded_network_invariants(seed: u64, v in 4usize..13) {
        let net = random_net(seed, v);
        let seq = reduce(&net).unwrap();
        let st = recursive_coding(&seq, gf(65521), &mut SplitRng::new(seed), 16).unwrap();
        let f = st.f();
        prop_assert!(f.is_strictly_upper());
        for c in 0..f.cols() {
            for r in 0..f.rows() {
                if f.get(r, c) != 0 {
                    prop_assert_eq!(net.edge(r).head, net.edge(c).tail);
                }
            }
        }
        prop_assert_eq!(&network_transfer_via_atomic(f).unwrap(), st.m());
        prop_assert!(st.lemma_violations().is_empty());
        let mono = grank_monotone_suite(&seq, &st).unwrap();
        prop_assert!(mono.non_increasing, "{:?}", mono);

        let rebuilt = CodingState::from_local_coding(&net, f.clone()).unwrap();
        prop_assert_eq!(rebuilt.m(), st.m());
        prop_assert_eq!(rebuilt.rate_report().unwrap(), st.rate_report().unwrap());
    }

    #[test]
    fn grank_one_forces_unit_ranks(seed: u64, v in 4usize..13) {
        let net = random_net(seed, v);
        let seq = reduce(&net).unwrap();
        let st = recursive_coding(&seq, gf(65521), &mut SplitRng::new(seed), 16).unwrap();
        let t = st.final_triple().unwrap();
        let r = st.rate_report().unwrap();
        if r.grank == 1 && r.r1_max >= 1 && r.r2_max >= 1 {
            prop_assert_eq!(t.h1.rank(), 1);
            prop_assert_eq!(t.h2.rank(), 1);
            prop_assert_eq!(t.g2.rank(), 1);
            prop_assert_eq!(t.h1.vcat(&t.h2).unwrap().rank(), 1);
            prop_assert_eq!(t.h2.hcat(&t.g2).unwrap().rank(), 1);
        }
    }

    #[test]
    fn peeling_a_min_cut_edge(seed: u64, v in 4usize..13) {
        let net = random_net(seed, v);
        let s = net.s1();
        let t: EdgeSet = net.t1().union(net.t2()).copied().collect();
        let ne = net.edge_count();
        let en = ne - 1;
        let tail = net.edge(en).tail;
        prop_assume!(t.contains(&en) && tail != s);
        let all = vec![true; ne];
        let mut below = all.clone();
        below[en] = false;
        let cut = net.min_cut_within(&all, s, &t);
        let mut rest = t.clone();
        rest.remove(&en);
        let cut_without = net.min_cut_within(&below, s, &rest);
        prop_assert!(cut_without + 1 >= cut && cut_without <= cut);
        if cut_without + 1 == cut {
            let augmented: EdgeSet = rest.iter().chain(net.in_edges(tail)).copied().collect();
            prop_assert!(net.min_cut_within(&below, s, &augmented) >= cut);
        }
    }

    #[test]
    fn single_unicast_reaches_min_cut(seed: u64, v in 4usize..13) {
        let net = random_net(seed, v);
        for (s, t) in [(net.s1(), net.t1().clone()), (net.s2(), net.t2().clone())] {
            let cut = net.min_cut(s, &t);
            let prob = UnicastProblem::new(net.clone(), s, t).unwrap();
            let code = single_unicast_code(&prob, gf(65521), &mut SplitRng::new(seed), 16).unwrap();
            prop_assert_eq!(code.rank, cut);
            prop_assert_eq!(code.min_cut, cut);
        }
    }
}
