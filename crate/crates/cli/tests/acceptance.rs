//! Acceptance suite: one test per shipped claim, each printing a PASS line.
//!
//! Run with `cargo test -p kscheck-cli --test acceptance -- --nocapture` to
//! see the per-criterion lines.

use std::path::PathBuf;
use std::process::{Command, Output};

use kscheck_core::colouring::{
    mermin_parity_check, propagate, search_global, verify_dps, DpsResult, ParityOutcome,
    PartialValuation, Rule, SearchResult,
};
use kscheck_core::contexts::{build_poset, lift_dimension, maximal_contexts, Algebra, WPoset};
use kscheck_core::datasets::{builtin, CgParams, Dataset, RaySet, CG_CONSTRAINT_TOLERANCE};
use kscheck_core::exactnum::{QuadScalar, Scalar};
use kscheck_core::loops::{enumerate_loops, min_loop, reduce};
use kscheck_core::presheaf::{fiber, is_global, restrict, GlobalCheck};
use kscheck_core::rays::{inner, Ray, Subspace, Vector};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kscheck"))
}

fn run(args: &[&str]) -> Output {
    binary()
        .args(args)
        .output()
        .expect("binary invocations succeed")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).to_string()
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("process exits normally")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kscheck-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir.join(name)
}

fn clifton() -> kscheck_core::datasets::TypedRaySet<QuadScalar> {
    match builtin("clifton8").unwrap() {
        Dataset::Rays(RaySet::Exact(set)) => set,
        _ => unreachable!(),
    }
}

fn mermin() -> kscheck_core::datasets::TypedRaySet<QuadScalar> {
    match builtin("mermin24").unwrap() {
        Dataset::Rays(RaySet::Exact(set)) => set,
        _ => unreachable!(),
    }
}

fn peres() -> kscheck_core::datasets::TypedRaySet<QuadScalar> {
    match builtin("peres33").unwrap() {
        Dataset::Rays(RaySet::Exact(set)) => set,
        _ => unreachable!(),
    }
}

#[test]
fn criterion_01_clifton_contradiction_trace() {
    // CLI surface: contradiction verdict with exit code 1.
    let output = run(&[
        "propagate",
        "clifton8",
        "--assign",
        "r7=1",
        "--assign",
        "r8=1",
    ]);
    assert_eq!(exit_code(&output), 1);
    assert!(stdout(&output).trim_end().ends_with("CONTRADICTION"));

    // Library surface: the dependency order of the recorded implications.
    let set = clifton();
    let (contexts, _) = maximal_contexts(&set.rays_only(), true).unwrap();
    let mut initial = PartialValuation::new();
    initial
        .assign(set.by_label("r7").unwrap().subspace(), true)
        .unwrap();
    initial
        .assign(set.by_label("r8").unwrap().subspace(), true)
        .unwrap();
    let (_, trace) = propagate(&contexts, &initial).unwrap();
    assert!(trace.contradiction());

    let pos = |label: &str, value: bool| {
        trace
            .position_of(&set.by_label(label).unwrap().subspace(), value)
            .unwrap_or_else(|| panic!("trace must assign {label} = {}", u8::from(value)))
    };
    // Zeros forced by r7 and r8 precede the two LastAtomOne steps, which
    // precede the clash on the {r3, r4} context.
    assert!(pos("r1", false) < pos("r3", true));
    assert!(pos("r2", false) < pos("r3", true));
    assert!(pos("r5", false) < pos("r4", true));
    assert!(pos("r6", false) < pos("r4", true));

    // Exact rule sequence in canonical order: two seeds, eight zeros, two
    // forced ones, one contradiction.
    let rules: Vec<Rule> = trace.steps.iter().map(|s| s.rule).collect();
    let mut expected = vec![Rule::InitialAssignment; 2];
    expected.extend(vec![Rule::OnePerContextZero; 8]);
    expected.extend(vec![Rule::LastAtomOne; 2]);
    expected.push(Rule::Contradiction);
    assert_eq!(rules, expected);

    // The terminal clash happens in the completed {r3, r4} context.
    let last = trace.steps.last().unwrap();
    let clash_context = &contexts[last.context.unwrap()];
    assert!(clash_context
        .atom_index(&set.by_label("r3").unwrap().subspace())
        .is_some());
    assert!(clash_context
        .atom_index(&set.by_label("r4").unwrap().subspace())
        .is_some());
    println!("ACCEPTANCE 01 PASS: clifton8 r7=r8=1 contradicts in dependency order");
}

/// Independent oracle for criterion 2: enumerate all 3^7 atom choices over
/// the seven maximal contexts, accepting a combination when equal subspaces
/// receive equal bits everywhere.
fn clifton_oracle_colourable(contexts: &[Algebra<QuadScalar>]) -> bool {
    assert_eq!(contexts.len(), 7);
    let mut counters = [0usize; 7];
    let mut combos = 0u32;
    loop {
        combos += 1;
        let mut assignments: Vec<(&Subspace<QuadScalar>, bool)> = Vec::new();
        let mut consistent = true;
        'fill: for (algebra, &pick) in contexts.iter().zip(&counters) {
            for (pos, atom) in algebra.atoms().iter().enumerate() {
                let bit = pos == pick;
                for (seen, seen_bit) in &assignments {
                    if *seen == atom && *seen_bit != bit {
                        consistent = false;
                        break 'fill;
                    }
                }
                assignments.push((atom, bit));
            }
        }
        if consistent {
            assert!(combos <= 2187);
            return true;
        }
        let mut slot = counters.len();
        loop {
            if slot == 0 {
                assert_eq!(combos, 2187, "the oracle visits every combination");
                return false;
            }
            slot -= 1;
            counters[slot] += 1;
            if counters[slot] < contexts[slot].atoms().len() {
                break;
            }
            counters[slot] = 0;
        }
    }
}

#[test]
fn criterion_02_clifton_prediction_and_sat() {
    let output = run(&[
        "propagate",
        "clifton8",
        "--assign",
        "r7=1",
        "--predict",
        "r8=0",
    ]);
    assert_eq!(exit_code(&output), 0);
    assert!(stdout(&output).trim_end().ends_with("VERIFIED"));

    let output = run(&["check", "clifton8", "--complete"]);
    assert_eq!(exit_code(&output), 0);
    assert_eq!(stdout(&output).trim_end(), "SAT");

    let set = clifton();
    let (contexts, aux) = maximal_contexts(&set.rays_only(), true).unwrap();
    let oracle_sat = clifton_oracle_colourable(&contexts);
    let poset = build_poset(&contexts, &[], aux);
    let search_sat = matches!(search_global(&poset), SearchResult::Sat(_));
    assert!(
        oracle_sat && search_sat,
        "search agrees with the 3^7 oracle"
    );
    println!("ACCEPTANCE 02 PASS: clifton8 prediction VERIFIED, check SAT, 3^7 oracle agrees");
}

#[test]
fn criterion_03_peres_counts_and_unsat() {
    let set = peres();
    assert_eq!(set.rays.len(), 33);
    let (contexts, aux) = maximal_contexts(&set.rays_only(), true).unwrap();
    assert_eq!(contexts.len(), 40, "forty maximal algebras");
    assert_eq!(aux.len(), 24, "twenty-four auxiliary rays");

    let out_dir = scratch("peres-run");
    let output = run(&[
        "check",
        "peres33",
        "--complete",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 1);
    assert_eq!(stdout(&output).trim_end(), "UNSAT");

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["dataset"]["contexts"], 40);
    assert_eq!(report["dataset"]["auxiliary"], 24);
    assert_eq!(report["verdict"], "unsat");
    assert!(report["search_nodes"].as_u64().unwrap() > 0);
    let cert: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("certificate.json")).unwrap())
            .unwrap();
    assert_eq!(cert["roots"].as_array().unwrap().len(), 3);
    println!("ACCEPTANCE 03 PASS: peres33 completes to 40 contexts / 24 auxiliary rays, UNSAT with stats");
}

fn girth_data(set: &kscheck_core::datasets::TypedRaySet<QuadScalar>) -> (Option<usize>, usize) {
    let (contexts, aux) = maximal_contexts(&set.rays_only(), true).unwrap();
    let poset = build_poset(&contexts, &[vec![2, 1]], aux);
    let graph = reduce(&poset);
    (min_loop(&graph), enumerate_loops(&graph, 4).len())
}

#[test]
fn criterion_04_three_dimensional_girth() {
    for set in [clifton(), peres()] {
        let (min, four_loops) = girth_data(&set);
        assert_eq!(
            min,
            Some(10),
            "{}: shortest loop has ten algebras",
            set.name
        );
        assert_eq!(
            four_loops, 0,
            "{}: no loops with four maximal contexts",
            set.name
        );
    }
    println!("ACCEPTANCE 04 PASS: clifton8 and peres33 have girth 10 and no 4-maximal loops");
}

#[test]
fn criterion_05_clifton_loop_inventory() {
    let set = clifton();
    let (contexts, aux) = maximal_contexts(&set.rays_only(), true).unwrap();
    let poset = build_poset(&contexts, &[vec![2, 1]], aux);
    let graph = reduce(&poset);
    let loops = enumerate_loops(&graph, 5);
    let five: Vec<_> = loops.iter().filter(|l| l.maximal_count() == 5).collect();
    assert_eq!(loops.len(), 2, "nothing below five maximal contexts");
    assert_eq!(five.len(), 2, "exactly two 5-maximal loops");
    let a: std::collections::BTreeSet<usize> = five[0].maximal_slots().into_iter().collect();
    let b: std::collections::BTreeSet<usize> = five[1].maximal_slots().into_iter().collect();
    assert_eq!(
        a.intersection(&b).count(),
        3,
        "the loops share three maximal algebras"
    );
    println!("ACCEPTANCE 05 PASS: clifton8 has exactly two chordless 5-maximal loops sharing three contexts");
}

#[test]
fn criterion_06_mermin_square() {
    let set = mermin();
    let tetrads = set.listed_contexts().unwrap();
    assert_eq!(tetrads.len(), 6);

    // Nine shared 2-2 algebras, each included in exactly two tetrads.
    let poset = build_poset(&tetrads, &[vec![2, 2]], Vec::new());
    let shared: Vec<usize> = poset.non_maximal_ids();
    assert_eq!(shared.len(), 9);
    for id in &shared {
        assert_eq!(poset.maximal_parents(*id).len(), 2);
    }

    let graph = reduce(&poset);
    assert_eq!(graph.nodes().len(), 9);
    assert_eq!(min_loop(&graph), Some(8));

    // Span identity, exactly.
    let span = |labels: [&str; 2]| {
        Subspace::span(&[
            set.by_label(labels[0]).unwrap().vector().clone(),
            set.by_label(labels[1]).unwrap().vector().clone(),
        ])
        .unwrap()
    };
    assert_eq!(span(["A1", "A2"]), span(["D1", "D3"]));

    // All discovered contexts are uncolourable.
    let output = run(&["check", "mermin24"]);
    assert_eq!(exit_code(&output), 1);
    assert_eq!(stdout(&output).trim_end(), "UNSAT");

    // Parity shortcut: the sum of all six constraints reads 0 = 1.
    match mermin_parity_check() {
        ParityOutcome::Unsat(cert) => {
            assert_eq!(cert.combination, vec![0, 1, 2, 3, 4, 5]);
            assert_eq!(cert.parity_sum, 1);
        }
        ParityOutcome::Sat(_) => panic!("magic square admits no valuation"),
    }
    println!("ACCEPTANCE 06 PASS: mermin24 has 9 shared 2-2 algebras, min loop 8, UNSAT check, parity certificate 1");
}

#[test]
fn criterion_07_factor_through_reduction() {
    // Two tetrads sharing the first two axes; every common degenerate factors
    // through the 2-1-1 they generate, so the reduced graph is acyclic.
    let ray = |coords: &[i64]| {
        Ray::canonicalize(&Vector::new(
            coords.iter().map(|&c| QuadScalar::from_int(c, 2)).collect(),
        ))
        .unwrap()
    };
    let rays = vec![
        ray(&[1, 0, 0, 0]),
        ray(&[0, 1, 0, 0]),
        ray(&[0, 0, 1, 0]),
        ray(&[0, 0, 0, 1]),
        ray(&[0, 0, 1, 1]),
        ray(&[0, 0, 1, -1]),
    ];
    let (contexts, _) = maximal_contexts(&rays, false).unwrap();
    assert_eq!(contexts.len(), 2);
    let poset = build_poset(
        &contexts,
        &[vec![2, 1, 1], vec![3, 1], vec![2, 2]],
        Vec::new(),
    );
    let graph = reduce(&poset);
    assert_eq!(graph.nodes().len(), 1, "one combined degenerate node");
    assert_eq!(graph.nodes()[0].algebra.signature(), vec![2, 1, 1]);
    assert_eq!(min_loop(&graph), None);
    println!("ACCEPTANCE 07 PASS: parallel degenerates reduce to one 2-1-1 node, acyclic graph");
}

#[test]
fn criterion_08_lift_preserves_the_prediction() {
    let lifted_path = scratch("clifton8-lift4.json");
    let output = run(&[
        "lift",
        "clifton8",
        "--dim",
        "4",
        "--out",
        lifted_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0);

    let loaded = kscheck_core::datasets::load(&lifted_path).unwrap();
    assert_eq!(loaded.set.len(), 9, "eight padded rays plus the new axis");

    let output = run(&[
        "propagate",
        lifted_path.to_str().unwrap(),
        "--assign",
        "r7=1",
        "--predict",
        "r8=0",
    ]);
    assert_eq!(exit_code(&output), 0);
    assert!(stdout(&output).trim_end().ends_with("VERIFIED"));

    // Every lifted context contains the new axis atom (0,0,0,1).
    let set = clifton();
    let lifted = lift_dimension(&set.rays_only(), 4).unwrap();
    let (contexts, _) = maximal_contexts(&lifted, true).unwrap();
    assert!(!contexts.is_empty());
    // clifton8 lives in the rational field (d = 1); scalars in a different
    // quadratic field never compare equal.
    let axis = Ray::canonicalize(&Vector::new(
        [0, 0, 0, 1]
            .iter()
            .map(|&c| QuadScalar::from_int(c, 1))
            .collect(),
    ))
    .unwrap()
    .subspace();
    for context in &contexts {
        assert!(
            context.atom_index(&axis).is_some(),
            "context misses the (0,0,0,1) atom"
        );
    }
    println!("ACCEPTANCE 08 PASS: 4D lift keeps r7=1 => r8=0 and every context holds the new axis");
}

#[test]
fn criterion_09_cg_prediction_in_approx_mode() {
    let params = CgParams::reference().unwrap();
    assert!((params.phi - 0.3).abs() < 1e-15);
    assert!(
        params.constraint_residual().abs() <= CG_CONSTRAINT_TOLERANCE,
        "constraint solved to 1e-12"
    );

    let Dataset::Rays(RaySet::Approx(set)) = builtin("cg10").unwrap() else {
        panic!("cg10 is the approx dataset");
    };
    // Orthogonality pattern at dataset tolerance: the three triples, the
    // three r1 links, the two r8 links, and the constraint pair {r4, r7}.
    let expected_pairs = [
        ("r1", "r2"),
        ("r1", "r5"),
        ("r1", "r9"),
        ("r2", "r3"),
        ("r2", "r4"),
        ("r3", "r4"),
        ("r5", "r6"),
        ("r5", "r7"),
        ("r6", "r7"),
        ("r8", "r9"),
        ("r8", "r10"),
        ("r9", "r10"),
        ("r3", "r8"),
        ("r6", "r8"),
        ("r4", "r7"),
    ];
    let mut seen = 0;
    for a in &set.rays {
        for b in &set.rays {
            if a.label >= b.label {
                continue;
            }
            let orthogonal = inner(a.ray.vector(), b.ray.vector()).unwrap().is_zero();
            let expected = expected_pairs
                .iter()
                .any(|&(x, y)| (x == a.label && y == b.label) || (x == b.label && y == a.label));
            assert_eq!(orthogonal, expected, "{} vs {}", a.label, b.label);
            seen += u32::from(orthogonal);
        }
    }
    assert_eq!(seen as usize, expected_pairs.len());

    let (contexts, _) = maximal_contexts(&set.rays_only(), true).unwrap();
    let mut input = PartialValuation::new();
    input
        .assign(set.by_label("r1").unwrap().subspace(), true)
        .unwrap();
    let predicted = set.by_label("r10").unwrap().subspace();
    match verify_dps(&contexts, &input, (&predicted, true)).unwrap() {
        DpsResult::Verified(_) => {}
        DpsResult::NotForced { .. } => panic!("cg10 forces r10 = 1"),
    }

    let output = run(&[
        "propagate",
        "cg10",
        "--assign",
        "r1=1",
        "--predict",
        "r10=1",
    ]);
    assert_eq!(exit_code(&output), 0);
    assert!(stdout(&output).trim_end().ends_with("VERIFIED"));
    println!("ACCEPTANCE 09 PASS: cg10 orthogonality pattern holds to epsilon and r1=1 => r10=1 VERIFIED");
}

/// Deterministic xorshift64 stream for the random-scalar suites; no seed
/// dependency on external crates keeps the acceptance target self-contained.
struct Xorshift(u64);

impl Xorshift {
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    fn int(&mut self, magnitude: i64) -> i64 {
        (self.next() % (2 * magnitude as u64 + 1)) as i64 - magnitude
    }

    fn rational(&mut self, magnitude: i64) -> kscheck_core::exactnum::Rational {
        use num_bigint::BigInt;
        kscheck_core::exactnum::Rational::new(
            BigInt::from(self.int(magnitude)),
            BigInt::from(self.next() % 1000 + 1),
        )
    }

    fn scalar(&mut self, magnitude: i64) -> QuadScalar {
        QuadScalar::new(self.rational(magnitude), self.rational(magnitude), 2).unwrap()
    }
}

fn functoriality_chains<S: Scalar>(poset: &WPoset<S>) -> u32 {
    let mut chains = 0u32;
    for low in 0..poset.len() {
        for mid in 0..poset.len() {
            if mid == low || !poset.le(low, mid) {
                continue;
            }
            for high in 0..poset.len() {
                if high == mid || high == low || !poset.le(mid, high) {
                    continue;
                }
                chains += 1;
                for hom in fiber(poset, high) {
                    let step = restrict(poset, restrict(poset, hom, mid).unwrap(), low).unwrap();
                    assert_eq!(step, restrict(poset, hom, low).unwrap());
                }
            }
        }
    }
    chains
}

#[test]
fn criterion_10_property_suites() {
    // Field axioms on 10^4 random scalars in Q(sqrt 2).
    let mut rng = Xorshift(0x5eed_5eed_5eed_5eed);
    let zero = QuadScalar::from_int(0, 2);
    let one = QuadScalar::from_int(1, 2);
    for _ in 0..10_000 {
        let a = rng.scalar(1000);
        let b = rng.scalar(1000);
        let c = rng.scalar(1000);
        assert_eq!(a.add(&b), b.add(&a));
        assert_eq!(a.mul(&b), b.mul(&a));
        assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        assert_eq!(a.add(&zero), a);
        assert_eq!(a.mul(&one), a);
        assert_eq!(a.add(&a.negated()), zero);
        if !a.is_zero() {
            assert_eq!(a.mul(&a.invert()), one);
        }
    }

    // Presheaf functoriality on all three-level chains of every shipped
    // poset. The 3D posets have two levels (the loop is vacuous there); the
    // full-signature magic-square poset carries the real chains.
    let clifton_set = clifton();
    let (contexts, aux) = maximal_contexts(&clifton_set.rays_only(), true).unwrap();
    let clifton_poset = build_poset(&contexts, &[vec![2, 1]], aux);
    functoriality_chains(&clifton_poset);
    let (contexts, aux) = maximal_contexts(&peres().rays_only(), true).unwrap();
    functoriality_chains(&build_poset(&contexts, &[vec![2, 1]], aux));
    let tetrads = mermin().listed_contexts().unwrap();
    let full = build_poset(
        &tetrads,
        &[vec![2, 1, 1], vec![3, 1], vec![2, 2]],
        Vec::new(),
    );
    assert!(functoriality_chains(&full) > 0);

    // Search agrees with brute force on every shipped poset with at most
    // eight maximal contexts, and Sat results pass the presheaf check.
    let posets: Vec<(String, WPoset<QuadScalar>)> = {
        let mut out = Vec::new();
        let (contexts, aux) = maximal_contexts(&clifton_set.rays_only(), true).unwrap();
        out.push((
            "clifton8 colouring".to_string(),
            build_poset(&contexts, &[], aux.clone()),
        ));
        out.push((
            "clifton8 with degenerates".to_string(),
            build_poset(&contexts, &[vec![2, 1]], aux),
        ));
        out.push((
            "mermin tetrads only".to_string(),
            build_poset(&tetrads, &[], Vec::new()),
        ));
        out.push((
            "mermin 2-2 view".to_string(),
            build_poset(&tetrads, &[vec![2, 2]], Vec::new()),
        ));
        out.push(("mermin full".to_string(), full));
        out
    };
    for (name, poset) in &posets {
        assert!(poset.maximal_ids().len() <= 8, "{name}");
        let search = search_global(poset);
        let brute = kscheck_core::colouring::enumerate_global(poset);
        match &search {
            SearchResult::Sat(candidate) => {
                assert!(brute.is_some(), "{name}: search sat, brute unsat");
                assert!(
                    matches!(is_global(poset, candidate), Ok(GlobalCheck::Ok)),
                    "{name}"
                );
            }
            SearchResult::Unsat(_) => assert!(brute.is_none(), "{name}: search unsat, brute sat"),
        }
    }

    // Determinism: the same invocation twice produces byte-identical
    // reports, certificates and DOT files.
    let dir = scratch("det");
    let output = run(&[
        "check",
        "clifton8",
        "--complete",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0);
    let first: Vec<Vec<u8>> = ["report.json", "certificate.json"]
        .iter()
        .map(|f| std::fs::read(dir.join(f)).unwrap())
        .collect();
    let output = run(&[
        "check",
        "clifton8",
        "--complete",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0);
    for (file, before) in ["report.json", "certificate.json"].iter().zip(&first) {
        assert_eq!(
            &std::fs::read(dir.join(file)).unwrap(),
            before,
            "{file} must be byte-identical across runs"
        );
    }
    let dot_a = stdout(&run(&["export-dot", "mermin24", "--signatures", "2-2"]));
    let dot_b = stdout(&run(&["export-dot", "mermin24", "--signatures", "2-2"]));
    assert!(!dot_a.is_empty());
    assert_eq!(dot_a, dot_b);
    println!("ACCEPTANCE 10 PASS: field axioms, functoriality, search/brute agreement, byte-deterministic outputs");
}
