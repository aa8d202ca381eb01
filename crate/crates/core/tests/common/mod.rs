//! Oracles, corpora and checks shared by the integration tests and the
//! acceptance runner. Every check returns `Ok(summary)` or `Err(reason)`.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use nakajima_core::{
    cartan_type, crystal_isomorphic, folding, generate, invariant_violations, kostant_context, kostant_to_monomial,
    kp_e, kp_f, kp_stats, kp_weight, monomial_to_kostant, mutate_carray, mutate_monomial, lift_mutation,
    stembridge_violations, CArray, CartanMatrix, Crystal, CrystalGraph, GenerateOptions, KostantCrystal,
    KostantPartition, Mode, Monomial, MonomialContext, MonomialCrystal, Mutation, RootInterval, VirtualContext,
    Weight, FOLDINGS,
};
use num_integer::Integer;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub type Outcome = Result<String, String>;

pub const RANDOM_CASES: u32 = 1000;

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../cli/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn line_set(text: &str) -> BTreeSet<String> {
    text.lines().filter(|l| !l.trim().is_empty()).map(str::to_string).collect()
}

// ---------------------------------------------------------------------------
// Weyl dimension oracle, written against raw Cartan rows only.

/// Positive integers `d` with `d_i C_ij = d_j C_ji`, by exhaustive search over 1..=3.
fn symmetrizer(rows: &[Vec<i64>]) -> Vec<i64> {
    let n = rows.len();
    let mut d = vec![1i64; n];
    loop {
        let ok = (0..n).all(|i| (0..n).all(|j| d[i] * rows[i][j] == d[j] * rows[j][i]));
        if ok {
            return d;
        }
        let mut pos = 0;
        loop {
            assert!(pos < n, "no symmetrizer with entries up to 3");
            d[pos] += 1;
            if d[pos] <= 3 {
                break;
            }
            d[pos] = 1;
            pos += 1;
        }
    }
}

fn positive_roots(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = rows.len();
    let mut roots: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let mut seen: BTreeSet<Vec<i64>> = roots.iter().cloned().collect();
    let mut idx = 0;
    while idx < roots.len() {
        let beta = roots[idx].clone();
        for i in 0..n {
            let pairing: i64 = (0..n).map(|j| rows[i][j] * beta[j]).sum();
            let mut image = beta.clone();
            image[i] -= pairing;
            if image.iter().all(|&x| x >= 0) && image.iter().any(|&x| x > 0) && seen.insert(image.clone()) {
                roots.push(image);
            }
        }
        idx += 1;
        assert!(roots.len() < 500, "not of finite type");
    }
    roots
}

/// `prod_{beta > 0} (lambda + rho, beta) / (rho, beta)` with `(Lambda_i, alpha_j) = d_j delta_ij`.
pub fn weyl_dimension(rows: &[Vec<i64>], lambda: &[i64]) -> u128 {
    let d = symmetrizer(rows);
    let (mut num, mut den) = (1u128, 1u128);
    for beta in positive_roots(rows) {
        let pair = |mu: &dyn Fn(usize) -> i64| -> u128 {
            beta.iter().enumerate().map(|(j, &b)| b * d[j] * mu(j)).sum::<i64>() as u128
        };
        num *= pair(&|j| lambda[j] + 1);
        den *= pair(&|_| 1);
        let g = num.gcd(&den);
        num /= g;
        den /= g;
    }
    assert_eq!(den, 1);
    num
}

pub fn oracle_rows(name: &str) -> Vec<Vec<i64>> {
    match name {
        "A2" => vec![vec![2, -1], vec![-1, 2]],
        "A3" => vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]],
        "C2" => vec![vec![2, -2], vec![-1, 2]],
        "B2" => vec![vec![2, -1], vec![-2, 2]],
        "G2" => vec![vec![2, -3], vec![-1, 2]],
        "F4" => vec![vec![2, -1, 0, 0], vec![-1, 2, -1, 0], vec![0, -2, 2, -1], vec![0, 0, -1, 2]],
        "D4" => vec![vec![2, -1, 0, 0], vec![-1, 2, -1, -1], vec![0, -1, 2, 0], vec![0, -1, 0, 2]],
        "B3" => vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -2, 2]],
        other => panic!("no oracle rows for {other}"),
    }
}

// ---------------------------------------------------------------------------
// Generation helpers.

pub fn hw_graph(ctx: &MonomialContext, weight: &str, depth: Option<usize>) -> CrystalGraph<Monomial> {
    let lambda = Weight::<i64>::parse(weight, ctx.cartan()).unwrap();
    let seed = ctx.y_lambda(&lambda).unwrap();
    let crystal = MonomialCrystal::<i64>::highest_weight(ctx.clone());
    let opts = depth.map_or_else(GenerateOptions::unbounded, GenerateOptions::depth);
    generate(&crystal, &[seed], opts).unwrap()
}

fn edge_strings(graph: &CrystalGraph<Monomial>, render: impl Fn(&Monomial) -> String) -> BTreeSet<String> {
    graph
        .edges()
        .iter()
        .map(|&(u, i, v)| {
            format!("{}\t{}\t{}", render(graph.node(u)), i as i64 + graph.label_offset(), render(graph.node(v)))
        })
        .collect()
}

/// `eps_i` and `phi_i` equal the lengths of the `i`-strings through each node.
pub fn string_length_violations<C: Crystal<Element = Monomial, Scalar = i64>>(
    crystal: &C,
    graph: &CrystalGraph<Monomial>,
) -> Vec<String> {
    let mut out = Vec::new();
    for id in 0..graph.len() {
        for i in 0..graph.rank() {
            let x = graph.node(id);
            if crystal.epsilon(x, i).unwrap() != graph.e_string_length(id, i) as i64 {
                out.push(format!("node {id}: eps_{i} differs from its string length"));
            }
            if crystal.phi(x, i).unwrap() != graph.f_string_length(id, i) as i64 {
                out.push(format!("node {id}: phi_{i} differs from its string length"));
            }
        }
    }
    out
}

/// Simply-laced crystals used for the Stembridge axioms.
pub const SIMPLY_LACED_CORPUS: &[(&str, &str)] = &[
    ("A2", "L1+L2"),
    ("A2", "2*L1+L2"),
    ("A3", "L1+L2"),
    ("A3", "L2"),
    ("A3", "L1+L3"),
    ("A4", "L2"),
    ("D4", "L2"),
    ("D4", "L1+L3"),
    ("D5", "L1"),
    ("E6", "L1"),
];

/// Finite crystals of other types for the statistic checks.
pub const OTHER_CORPUS: &[(&str, &str)] = &[
    ("B2", "L1+L2"),
    ("C2", "L1+L2"),
    ("B3", "L1+L3"),
    ("C3", "L2"),
    ("G2", "L1+L2"),
    ("F4", "L4"),
];

// ---------------------------------------------------------------------------
// Random inputs.

/// Monomials on `rank` rows with shifts in `0..=5`. With `parity`, row `i`
/// only uses shifts congruent to `parity[i]` mod 2.
pub fn monomial_strategy(rank: usize, parity: Option<Vec<i64>>) -> impl Strategy<Value = Monomial> {
    prop::collection::vec((0..rank, 0i64..=5, prop_oneof![-3i64..=-1, 1i64..=3]), 0..7).prop_map(move |factors| {
        let mut m = Monomial::one();
        for (i, k, e) in factors {
            let k = match &parity {
                Some(p) => 2 * (k / 2) + p[i],
                None => k,
            };
            m = m.mul(&Monomial::y_pow(i, k, e)).unwrap();
        }
        m
    })
}

pub fn partition_strategy(n: usize) -> impl Strategy<Value = KostantPartition> {
    let roots: Vec<RootInterval> = (0..n).flat_map(|j| (j..n).map(move |k| RootInterval::new(j, k))).collect();
    prop::collection::vec(0u64..=4, roots.len())
        .prop_map(move |mult| KostantPartition::from_pairs(n, roots.iter().copied().zip(mult)).unwrap())
}

fn runner() -> TestRunner {
    TestRunner::new(Config { cases: RANDOM_CASES, failure_persistence: None, ..Config::default() })
}

fn run_property<S: Strategy>(
    what: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner().run(&strategy, test).map_err(|e| format!("{what}: {e}"))
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

fn tc<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

// ---------------------------------------------------------------------------
// Criterion 1: the F4 -> E6 table.

pub fn criterion_table1() -> Outcome {
    let ctx = folding("F4-E6").map_err(fail)?;
    let seed: Monomial = ctx.source().parse("Y(4,0)").map_err(fail)?;
    let report = ctx.verify(&seed, GenerateOptions::unbounded(), Mode::HighestWeight).map_err(fail)?;
    if !report.passed() {
        return Err(format!("intertwining fails: {:?}", report.first_failure()));
    }
    let got: BTreeSet<String> = report.table.iter().map(|(a, b)| format!("{a}\t{b}")).collect();
    let want = line_set(&golden("table1_f4_e6.tsv"));
    if got != want {
        let missing: Vec<_> = want.difference(&got).collect();
        return Err(format!("{} rows generated, {} expected; missing {missing:?}", got.len(), want.len()));
    }
    Ok(format!("{} of {} rows match", got.len(), want.len()))
}

// ---------------------------------------------------------------------------
// Criterion 2: the C3~ -> D5~ figure.

pub fn criterion_figure1() -> Outcome {
    let ctx = folding("C3~-D5~").map_err(fail)?;
    let graph = hw_graph(ctx.source(), "L0", Some(4));
    let left = edge_strings(&graph, |m| ctx.source().render(m));
    if left != line_set(&golden("fig1_c3_affine_edges.tsv")) {
        return Err(format!("left graph differs: {left:?}"));
    }
    if graph.len() != 8 || graph.level_sizes() != vec![1, 1, 1, 2, 3] {
        return Err(format!("unexpected levels {:?}", graph.level_sizes()));
    }
    let right = edge_strings(&graph, |m| ctx.target().render(&ctx.v_map(m).unwrap()));
    if right != line_set(&golden("fig1_d5_affine_image_edges.tsv")) {
        return Err(format!("image graph differs: {right:?}"));
    }
    let seed = graph.node(0).clone();
    let report = ctx.verify(&seed, GenerateOptions::depth(4), Mode::HighestWeight).map_err(fail)?;
    if !report.passed() {
        return Err(format!("intertwining fails: {:?}", report.first_failure()));
    }
    let shallow = hw_graph(ctx.source(), "L0", Some(3));
    Ok(format!(
        "8 nodes and {} edges on both sides at depth 4 (depth 3 gives {} nodes)",
        graph.edges().len(),
        shallow.len()
    ))
}

// ---------------------------------------------------------------------------
// Criterion 3: the bracketing example.

pub fn criterion_brackets() -> Outcome {
    let alpha = KostantPartition::parse(golden("section6_alpha.txt").trim(), 3).map_err(fail)?;
    let brackets: Vec<String> = (0..3)
        .map(|i| format!("S_{} = {}", i + 1, nakajima_core::bracket_seq(&alpha, i).unwrap().render()))
        .collect();
    let want_brackets: Vec<String> = golden("section6_brackets.txt").lines().map(str::to_string).collect();
    if brackets != want_brackets {
        return Err(format!("brackets {brackets:?}"));
    }
    let fs: Vec<String> = (0..3).map(|i| kp_f(&alpha, i).unwrap().to_text()).collect();
    let want_fs: Vec<String> = golden("section6_f.txt").lines().map(str::to_string).collect();
    if fs != want_fs {
        return Err(format!("f images {fs:?}"));
    }
    Ok("S_1, S_2, S_3 and f_1, f_2, f_3 match".into())
}

// ---------------------------------------------------------------------------
// Criterion 4: the mutation listing.

pub fn criterion_mutation_listing() -> Outcome {
    let rows: Vec<Vec<i64>> = serde_json::from_str(&golden("section7_c.json")).map_err(fail)?;
    let c = CArray::kashiwara(rows).map_err(fail)?;
    let m: Mutation = "0,0,1,2".parse().map_err(fail)?;
    let printed = nakajima_core::format_bracket_matrix(&mutate_carray(&c, &m).map_err(fail)?.rows());
    let want = golden("section7_mutation.txt");
    if printed != want {
        return Err(format!("printed\n{printed}"));
    }
    Ok("matrix matches the listing".into())
}

// ---------------------------------------------------------------------------
// Criterion 5: necessity of the aligned condition on C2 -> A3.

fn lemma_holds_everywhere(ctx: &VirtualContext) -> bool {
    (0..2).all(|i| (-2..5).all(|k| ctx.check_lemma_a::<i64>(i, k).unwrap().holds()))
}

pub fn criterion_aligned() -> Outcome {
    let ctx = folding("C2-A3").map_err(fail)?;
    if !lemma_holds_everywhere(&ctx.with_gamma_unchecked(vec![1, 2]).map_err(fail)?) {
        return Err("lemma fails for gamma = (1, 2)".into());
    }
    if lemma_holds_everywhere(&ctx.with_gamma_unchecked(vec![1, 1]).map_err(fail)?) {
        return Err("lemma holds for gamma = (1, 1)".into());
    }
    for g1 in 1..=4 {
        for g2 in 1..=6 {
            let holds = lemma_holds_everywhere(&ctx.with_gamma_unchecked(vec![g1, g2]).map_err(fail)?);
            if holds != (2 * g1 == g2) {
                return Err(format!("gamma = ({g1}, {g2}): lemma {holds}"));
            }
        }
    }
    Ok("holds exactly when 2 g1 = g2 over a 4 x 6 grid".into())
}

// ---------------------------------------------------------------------------
// Criterion 6: the Kostant partition isomorphism.

pub fn kostant_intertwining(n: usize, depth: usize) -> Outcome {
    let ctx = kostant_context(n).map_err(fail)?;
    let crystal = MonomialCrystal::<i64>::infinity(ctx.clone());
    let graph = generate(&crystal, &[Monomial::one()], GenerateOptions::depth(depth)).map_err(fail)?;
    for m in graph.nodes() {
        let a = monomial_to_kostant(m, &ctx).map_err(fail)?;
        if &kostant_to_monomial(&a, &ctx).map_err(fail)? != m {
            return Err(format!("round trip fails at {}", ctx.render(m)));
        }
        let wt = crystal.weight(m).map_err(fail)?;
        for i in 0..n {
            let f_img = monomial_to_kostant(&ctx.f_modified(m, i).map_err(fail)?, &ctx).map_err(fail)?;
            if f_img != kp_f(&a, i).map_err(fail)? {
                return Err(format!("f_{i} at {}", ctx.render(m)));
            }
            let e_img = ctx.e_modified(m, i).map_err(fail)?.map(|x| monomial_to_kostant(&x, &ctx).unwrap());
            if e_img != kp_e(&a, i).map_err(fail)? {
                return Err(format!("e_{i} at {}", ctx.render(m)));
            }
            let (kwt, keps, kphi) = kp_stats(&a, i).map_err(fail)?;
            let stats = (wt.clone(), crystal.epsilon(m, i).map_err(fail)?, crystal.phi(m, i).map_err(fail)?);
            if (kwt, keps, kphi) != stats {
                return Err(format!("statistics for {i} at {}", ctx.render(m)));
            }
        }
    }
    let kp_graph =
        generate(&KostantCrystal::new(n).map_err(fail)?, &[KostantPartition::zero(n)], GenerateOptions::depth(depth))
            .map_err(fail)?;
    if crystal_isomorphic(&graph, &kp_graph, None, None).map_err(fail)?.is_none() {
        return Err("generated graphs are not isomorphic".into());
    }
    Ok(format!("A{n}: {} nodes to depth {depth}", graph.len()))
}

pub fn criterion_kostant() -> Outcome {
    let a2 = kostant_intertwining(2, 6)?;
    let a3 = kostant_intertwining(3, 6)?;
    Ok(format!("{a2}; {a3}"))
}

// ---------------------------------------------------------------------------
// Criterion 7: virtualization on the shipped foldings.

pub struct VirtualCase {
    pub folding: &'static str,
    /// `None` for `M(infinity)` seeded at 1.
    pub weight: Option<&'static str>,
    pub depth: Option<usize>,
}

pub const VIRTUAL_CASES: &[VirtualCase] = &[
    VirtualCase { folding: "C2-A3", weight: Some("L1"), depth: None },
    VirtualCase { folding: "C2-A3", weight: Some("L2"), depth: None },
    VirtualCase { folding: "C2-A3", weight: Some("L1+L2"), depth: None },
    VirtualCase { folding: "C2-A3", weight: None, depth: Some(6) },
    VirtualCase { folding: "B2-A3", weight: Some("L1"), depth: None },
    VirtualCase { folding: "B2-A3", weight: Some("L2"), depth: None },
    VirtualCase { folding: "B2-A3", weight: Some("L1+L2"), depth: None },
    VirtualCase { folding: "B2-A3", weight: None, depth: Some(6) },
    VirtualCase { folding: "G2-D4", weight: Some("L1"), depth: None },
    VirtualCase { folding: "G2-D4", weight: Some("L2"), depth: None },
    VirtualCase { folding: "G2-D4", weight: None, depth: Some(5) },
    VirtualCase { folding: "F4-E6", weight: Some("L4"), depth: None },
    VirtualCase { folding: "F4-E6", weight: Some("L1"), depth: None },
    VirtualCase { folding: "F4-E6", weight: None, depth: Some(4) },
    VirtualCase { folding: "C3~-D5~", weight: Some("L0"), depth: Some(4) },
    VirtualCase { folding: "C3~-D5~", weight: Some("L1"), depth: Some(4) },
    VirtualCase { folding: "C3~-D5~", weight: None, depth: Some(4) },
];

pub fn run_virtual_case(ctx: &VirtualContext, case: &VirtualCase) -> Outcome {
    let opts = case.depth.map_or_else(GenerateOptions::unbounded, GenerateOptions::depth);
    let (seed, mode) = match case.weight {
        Some(w) => {
            let lambda = Weight::<i64>::parse(w, ctx.source().cartan()).map_err(fail)?;
            (ctx.source().y_lambda(&lambda).map_err(fail)?, Mode::HighestWeight)
        }
        None => (Monomial::one(), Mode::Infinity),
    };
    let report = ctx.verify(&seed, opts, mode).map_err(fail)?;
    let name = format!("{} {}", case.folding, case.weight.unwrap_or("inf"));
    if let Some(bad) = report.first_failure() {
        return Err(format!("{name}: node {} ({}): {}", bad.node, bad.monomial, bad.reason));
    }
    Ok(format!("{name}: {} nodes", report.nodes))
}

pub fn criterion_virtualization() -> Outcome {
    let mut parts = Vec::new();
    for case in VIRTUAL_CASES {
        let ctx = folding(case.folding).map_err(fail)?;
        parts.push(run_virtual_case(&ctx, case)?);
    }
    Ok(parts.join(", "))
}

// ---------------------------------------------------------------------------
// Criterion 8: dimensions.

pub const DIMENSION_CASES: &[(&str, &str, &[i64], u128)] = &[
    ("A2", "L1", &[1, 0], 3),
    ("A2", "L1+L2", &[1, 1], 8),
    ("C2", "L1", &[1, 0], 4),
    ("G2", "L1", &[1, 0], 7),
    ("F4", "L4", &[0, 0, 0, 1], 26),
    ("A3", "L2", &[0, 1, 0], 6),
];

pub fn criterion_dimensions() -> Outcome {
    let mut parts = Vec::new();
    for &(name, weight, lambda, expected) in DIMENSION_CASES {
        let rows = oracle_rows(name);
        if cartan_type(name).map_err(fail)?.rows() != rows {
            return Err(format!("{name}: library matrix differs from the oracle's"));
        }
        let oracle = weyl_dimension(&rows, lambda);
        if oracle != expected {
            return Err(format!("{name} {weight}: oracle gives {oracle}, expected {expected}"));
        }
        let graph = hw_graph(&MonomialContext::with_default_c(cartan_type(name).unwrap()), weight, None);
        if graph.len() as u128 != oracle {
            return Err(format!("{name} {weight}: {} nodes, oracle {oracle}", graph.len()));
        }
        parts.push(format!("{name} {weight} = {oracle}"));
    }
    Ok(parts.join(", "))
}

// ---------------------------------------------------------------------------
// Criterion 9: invariant suites.

pub fn corpus_statistics() -> Outcome {
    let mut total = 0;
    for &(name, weight) in SIMPLY_LACED_CORPUS.iter().chain(OTHER_CORPUS) {
        let ctx = MonomialContext::with_default_c(cartan_type(name).unwrap());
        let crystal = MonomialCrystal::<i64>::highest_weight(ctx.clone());
        let graph = hw_graph(&ctx, weight, None);
        let mut bad = invariant_violations(&crystal, &graph).map_err(fail)?;
        bad.extend(string_length_violations(&crystal, &graph));
        for m in graph.nodes() {
            for i in 0..ctx.rank() {
                if ctx.eps(m, i).unwrap() != ctx.eps_by_suffix(m, i).unwrap() {
                    bad.push(format!("eps formulas differ at {}", ctx.render(m)));
                }
            }
        }
        if let Some(first) = bad.first() {
            return Err(format!("{name} {weight}: {first}"));
        }
        total += graph.len();
    }
    Ok(format!("{total} nodes"))
}

pub fn corpus_stembridge() -> Outcome {
    let mut total = 0;
    for &(name, weight) in SIMPLY_LACED_CORPUS {
        let cartan = cartan_type(name).unwrap();
        let graph = hw_graph(&MonomialContext::with_default_c(cartan.clone()), weight, None);
        if let Some(first) = stembridge_violations(&graph, &cartan).first() {
            return Err(format!("{name} {weight}: {first}"));
        }
        total += graph.len();
    }
    Ok(format!("{} crystals, {total} nodes", SIMPLY_LACED_CORPUS.len()))
}

fn monomial_axioms(ctx: &MonomialContext, m: &Monomial) -> Result<(), TestCaseError> {
    let wt = tc(ctx.weight(m))?;
    for i in 0..ctx.rank() {
        let (phi, eps) = (tc(ctx.phi(m, i))?, tc(ctx.eps(m, i))?);
        check(phi - eps == tc(wt.pairing(i))?, || format!("phi - eps at {i}"))?;
        check(eps == tc(ctx.eps_by_suffix(m, i))?, || format!("eps formulas at {i}"))?;
        check(phi >= 0 && eps >= 0, || "negative statistic".into())?;
        let alpha = tc(ctx.cartan().simple_root::<i64>(i))?;
        if let Some(x) = tc(ctx.f(m, i))? {
            check(tc(ctx.e(&x, i))?.as_ref() == Some(m), || format!("e_{i} f_{i} != id"))?;
            check(tc(ctx.weight(&x))? == tc(wt.checked_sub(&alpha))?, || format!("wt f_{i}"))?;
            check(tc(ctx.phi(&x, i))? == phi - 1, || format!("phi after f_{i}"))?;
        } else {
            check(phi == 0, || format!("f_{i} undefined with phi > 0"))?;
        }
        if let Some(x) = tc(ctx.e(m, i))? {
            check(tc(ctx.f(&x, i))?.as_ref() == Some(m), || format!("f_{i} e_{i} != id"))?;
            check(tc(ctx.weight(&x))? == tc(wt.checked_add(&alpha))?, || format!("wt e_{i}"))?;
        } else {
            check(eps == 0, || format!("e_{i} undefined with eps > 0"))?;
        }
    }
    Ok(())
}

fn modified_axioms(ctx: &MonomialContext, m: &Monomial) -> Result<(), TestCaseError> {
    let wt = tc(ctx.weight(m))?;
    for i in 0..ctx.rank() {
        let (phi, eps) = (tc(ctx.phi_modified(m, i))?, tc(ctx.eps_modified(m, i))?);
        check(phi - eps == tc(wt.pairing(i))?, || format!("modified phi - eps at {i}"))?;
        check(eps >= 0, || "negative modified eps".into())?;
        let x = tc(ctx.f_modified(m, i))?;
        check(tc(ctx.e_modified(&x, i))?.as_ref() == Some(m), || format!("modified e_{i} f_{i} != id"))?;
        let alpha = tc(ctx.cartan().simple_root::<i64>(i))?;
        check(tc(ctx.weight(&x))? == tc(wt.checked_sub(&alpha))?, || format!("modified wt f_{i}"))?;
        match tc(ctx.e_modified(m, i))? {
            Some(y) => check(&tc(ctx.f_modified(&y, i))? == m, || format!("modified f_{i} e_{i} != id"))?,
            None => check(eps == 0, || format!("modified e_{i} undefined with eps > 0"))?,
        }
    }
    Ok(())
}

pub const RANDOM_TYPES: &[&str] = &["A3", "C3~", "G2", "F4", "D4"];

pub fn random_monomial_axioms() -> Outcome {
    for name in RANDOM_TYPES {
        let ctx = MonomialContext::with_default_c(cartan_type(name).unwrap());
        let rank = ctx.rank();
        run_property(name, monomial_strategy(rank, None), |m| monomial_axioms(&ctx, &m))?;
        run_property(name, monomial_strategy(rank, None), |m| modified_axioms(&ctx, &m))?;
    }
    Ok(format!("{} types x {RANDOM_CASES} monomials, ordinary and modified operators", RANDOM_TYPES.len()))
}

pub fn random_partition_axioms() -> Outcome {
    for n in [2usize, 3, 4] {
        let ctx = kostant_context(n).map_err(fail)?;
        run_property(&format!("A{n}"), partition_strategy(n), |a| {
            let m = tc(kostant_to_monomial(&a, &ctx))?;
            check(tc(monomial_to_kostant(&m, &ctx))? == a, || "round trip".into())?;
            let wt = tc(kp_weight(&a))?;
            check(wt == tc(ctx.weight(&m))?, || "weights differ".into())?;
            for i in 0..n {
                let f = tc(kp_f(&a, i))?;
                check(tc(kp_e(&f, i))?.as_ref() == Some(&a), || format!("e_{i} f_{i} != id"))?;
                check(tc(kostant_to_monomial(&f, &ctx))? == tc(ctx.f_modified(&m, i))?, || format!("f_{i}"))?;
                let e = tc(kp_e(&a, i))?;
                let e_m = tc(ctx.e_modified(&m, i))?;
                check(e.as_ref().map(|x| kostant_to_monomial(x, &ctx).unwrap()) == e_m, || format!("e_{i}"))?;
                if let Some(x) = e {
                    check(tc(kp_f(&x, i))? == a, || format!("f_{i} e_{i} != id"))?;
                }
                let (_, eps, phi) = tc(kp_stats(&a, i))?;
                check(eps == tc(ctx.eps_modified(&m, i))?, || format!("eps_{i}"))?;
                check(phi == tc(ctx.phi_modified(&m, i))?, || format!("phi_{i}"))?;
            }
            Ok(())
        })?;
    }
    Ok(format!("A2, A3, A4 x {RANDOM_CASES} partitions"))
}

/// `mu_m` intertwines the operators for `c` and for the mutated array.
fn mutation_intertwines(ctx: &MonomialContext, ctx2: &MonomialContext, mu: &Mutation, m: &Monomial) -> Result<(), String> {
    let image = mutate_monomial(m, mu).map_err(fail)?;
    for i in 0..ctx.rank() {
        let lhs = ctx.f(m, i).map_err(fail)?.map(|x| mutate_monomial(&x, mu).unwrap());
        if lhs != ctx2.f(&image, i).map_err(fail)? {
            return Err(format!("f_{i} at {}", ctx.render(m)));
        }
        let lhs = ctx.e(m, i).map_err(fail)?.map(|x| mutate_monomial(&x, mu).unwrap());
        if lhs != ctx2.e(&image, i).map_err(fail)? {
            return Err(format!("e_{i} at {}", ctx.render(m)));
        }
        if ctx.phi(m, i).unwrap() != ctx2.phi(&image, i).unwrap() || ctx.eps(m, i).unwrap() != ctx2.eps(&image, i).unwrap() {
            return Err(format!("statistics for {i} at {}", ctx.render(m)));
        }
    }
    Ok(())
}

pub const MUTATION_CASES: &[(&str, &str, &[i64])] = &[
    ("A2", "L1", &[0, 1]),
    ("A3", "L1", &[0, 0, 1]),
    ("A3", "L2", &[2, -1, 0]),
    ("A3", "L1+L2", &[0, 1, 3]),
    ("C2", "L1+L2", &[1, -1]),
    ("B4", "L1", &[0, 0, 1, 2]),
];

pub fn mutation_isomorphisms() -> Outcome {
    for &(name, weight, m) in MUTATION_CASES {
        let cartan = cartan_type(name).unwrap();
        let ctx = MonomialContext::with_default_c(cartan.clone());
        let mu = Mutation::new(m.to_vec());
        let ctx2 = MonomialContext::new(cartan, mutate_carray(ctx.c(), &mu).map_err(fail)?).map_err(fail)?;
        let g1 = hw_graph(&ctx, weight, None);
        let seed2 = mutate_monomial(g1.node(0), &mu).map_err(fail)?;
        let crystal2 = MonomialCrystal::<i64>::highest_weight(ctx2.clone());
        let g2 = generate(&crystal2, &[seed2], GenerateOptions::unbounded()).map_err(fail)?;
        let iso = crystal_isomorphic(&g1, &g2, None, None).map_err(fail)?;
        let iso = iso.ok_or_else(|| format!("{name} {weight}: graphs not isomorphic"))?;
        for (id, x) in g1.nodes().iter().enumerate() {
            if g2.node(iso[id]) != &mutate_monomial(x, &mu).map_err(fail)? {
                return Err(format!("{name} {weight}: isomorphism is not mu_m at node {id}"));
            }
            mutation_intertwines(&ctx, &ctx2, &mu, x).map_err(|e| format!("{name} {weight}: {e}"))?;
        }
    }
    let cartan = cartan_type("C3~").unwrap();
    let ctx = MonomialContext::with_default_c(cartan.clone());
    let mutation = (prop::collection::vec(-3i64..=3, 4), monomial_strategy(4, None));
    run_property("random mutations", mutation, |(m, x)| {
        let mu = Mutation::new(m);
        let ctx2 = tc(MonomialContext::new(cartan.clone(), tc(mutate_carray(ctx.c(), &mu))?))?;
        mutation_intertwines(&ctx, &ctx2, &mu, &x).map_err(TestCaseError::fail)
    })?;
    Ok(format!("{} crystals mapped by mu_m, {RANDOM_CASES} random monomials", MUTATION_CASES.len()))
}

pub fn shift_and_lift_commutation() -> Outcome {
    for name in FOLDINGS {
        let ctx = folding(name).map_err(fail)?;
        let rank = ctx.spec().source().rank();
        run_property(name, (monomial_strategy(rank, None), -5i64..=5), |(m, s)| {
            let lhs = tc(ctx.v_map(&tc(m.shift(s))?))?;
            let rhs = tc(tc(ctx.v_map(&m))?.shift(s))?;
            check(lhs == rhs, || "v(tau_s M) != tau_s v(M)".into())
        })?;
        run_property(name, (monomial_strategy(rank, None), prop::collection::vec(-3i64..=3, rank)), |(m, mu)| {
            let mu = Mutation::new(mu);
            let lifted = tc(lift_mutation(&mu, ctx.spec()))?;
            let lhs = tc(ctx.v_map(&tc(mutate_monomial(&m, &mu))?))?;
            let rhs = tc(mutate_monomial(&tc(ctx.v_map(&m))?, &lifted))?;
            check(lhs == rhs, || "v(mu_m M) != mu_mhat v(M)".into())
        })?;
    }
    Ok(format!("{} foldings x {RANDOM_CASES} monomials", FOLDINGS.len()))
}

pub const NAKAJIMA_TYPES: &[&str] = &["A3", "D4", "E6", "C3~", "B3"];

/// The primed convention: statistics, inverses, dimensions, and agreement
/// with the parity array in the ordinary convention.
pub fn nakajima_style() -> Outcome {
    for name in NAKAJIMA_TYPES {
        let cartan = cartan_type(name).unwrap();
        let ctx = MonomialContext::nakajima(cartan.clone()).map_err(fail)?;
        let parity = ctx.c().parity().unwrap().to_vec();
        run_property(name, monomial_strategy(cartan.rank(), Some(parity)), |m| monomial_axioms(&ctx, &m))?;
    }
    for &(name, weight, lambda, expected) in DIMENSION_CASES {
        let cartan = cartan_type(name).unwrap();
        let ctx = MonomialContext::nakajima(cartan.clone()).map_err(fail)?;
        let graph = hw_graph(&ctx, weight, None);
        if graph.len() as u128 != expected || weyl_dimension(&oracle_rows(name), lambda) != expected {
            return Err(format!("{name} {weight}: {} nodes in the primed convention", graph.len()));
        }
        let crystal = MonomialCrystal::<i64>::highest_weight(ctx.clone());
        if let Some(bad) = invariant_violations(&crystal, &graph).unwrap().first() {
            return Err(format!("{name} {weight}: {bad}"));
        }
        let parity_ctx = MonomialContext::new(cartan.clone(), CArray::from_parity(&cartan).unwrap()).unwrap();
        let other = hw_graph(&parity_ctx, weight, None);
        if crystal_isomorphic(&graph, &other, None, None).map_err(fail)?.is_none() {
            return Err(format!("{name} {weight}: not isomorphic to the parity array crystal"));
        }
    }
    Ok(format!("{} types x {RANDOM_CASES} monomials, {} finite crystals", NAKAJIMA_TYPES.len(), DIMENSION_CASES.len()))
}

/// Virtualization in the primed convention on every folding. Reported, not asserted.
pub fn nakajima_virtualization_report() -> Vec<(String, Result<String, String>)> {
    let mut out = Vec::new();
    for case in VIRTUAL_CASES.iter().filter(|c| c.weight.is_some()) {
        let name = format!("{} {}", case.folding, case.weight.unwrap());
        let result = folding(case.folding)
            .and_then(|ctx| VirtualContext::nakajima(ctx.spec().clone()))
            .map_err(fail)
            .and_then(|ctx| run_virtual_case(&ctx, case));
        out.push((name, result));
    }
    out
}

pub fn criterion_invariants() -> Vec<(&'static str, Outcome)> {
    vec![
        ("statistics on corpus", corpus_statistics()),
        ("stembridge axioms", corpus_stembridge()),
        ("random monomials", random_monomial_axioms()),
        ("random partitions", random_partition_axioms()),
        ("mutation isomorphisms", mutation_isomorphisms()),
        ("shift and lifted mutation commute with v", shift_and_lift_commutation()),
        ("primed convention", nakajima_style()),
    ]
}

pub fn cartan_of(name: &str) -> CartanMatrix {
    cartan_type(name).unwrap()
}
