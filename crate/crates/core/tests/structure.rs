//! Cross-module checks against independent oracles: brute-force colouring
//! enumeration versus the backtracking search, dataset orthogonality
//! patterns, diagram-level predictions, and reduction behaviour.

use kscheck_core::colouring::engine;
use kscheck_core::colouring::{
    mermin_parity_check, propagate, search_global, verify_dps, DpsResult, ParityOutcome,
    PartialValuation, SearchResult,
};
use kscheck_core::contexts::{build_poset, maximal_contexts, Algebra, WPoset};
use kscheck_core::datasets::{builtin, ContextDiagram, Dataset, RaySet, TypedRaySet};
use kscheck_core::exactnum::{ApproxScalar, QuadScalar, Scalar};
use kscheck_core::loops::{enumerate_loops, min_loop, reduce};
use kscheck_core::presheaf::{is_global, preimage, restrict, ElementCandidate, GlobalCheck, Hom};
use kscheck_core::rays::{inner, Ray, Subspace, Vector};

fn exact_builtin(name: &str) -> TypedRaySet<QuadScalar> {
    match builtin(name).unwrap() {
        Dataset::Rays(RaySet::Exact(set)) => set,
        _ => panic!("{name} is an exact coordinate dataset"),
    }
}

fn approx_builtin(name: &str) -> TypedRaySet<ApproxScalar> {
    match builtin(name).unwrap() {
        Dataset::Rays(RaySet::Approx(set)) => set,
        _ => panic!("{name} is an approx coordinate dataset"),
    }
}

fn diagram_builtin(name: &str) -> ContextDiagram {
    match builtin(name).unwrap() {
        Dataset::Diagram(d) => d,
        _ => panic!("{name} is a diagram dataset"),
    }
}

fn ray(coords: &[i64]) -> Ray<QuadScalar> {
    Ray::canonicalize(&Vector::new(
        coords.iter().map(|&c| QuadScalar::from_int(c, 2)).collect(),
    ))
    .unwrap()
}

/// Independent oracle: walk every per-context atom choice, require equal
/// subspaces to receive equal bits, derive the candidate through restriction,
/// and accept only if the presheaf matching condition holds. Written from
/// scratch so the search has something honest to agree with.
fn oracle_global<S: Scalar>(poset: &WPoset<S>) -> Option<ElementCandidate> {
    let maximal_ids = poset.maximal_ids();
    let mut counters = vec![0usize; maximal_ids.len()];
    loop {
        // Collect (subspace, bit) pairs for this combination.
        let mut assignments: Vec<(&Subspace<S>, bool)> = Vec::new();
        let mut consistent = true;
        'outer: for (&id, &pick) in maximal_ids.iter().zip(&counters) {
            for (pos, atom) in poset.algebra(id).atoms().iter().enumerate() {
                let bit = pos == pick;
                for (seen, seen_bit) in &assignments {
                    if *seen == atom && *seen_bit != bit {
                        consistent = false;
                        break 'outer;
                    }
                }
                assignments.push((atom, bit));
            }
        }
        if consistent {
            let mut candidate = ElementCandidate::new();
            for (&id, &pick) in maximal_ids.iter().zip(&counters) {
                candidate.choose(id, pick);
            }
            let mut ok = true;
            for id in poset.non_maximal_ids() {
                let parent = poset.maximal_parents(id)[0];
                let upstairs = candidate.get(parent).unwrap();
                match restrict(poset, upstairs, id) {
                    Ok(down) => candidate.choose(id, down.atom),
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && matches!(is_global(poset, &candidate), Ok(GlobalCheck::Ok)) {
                return Some(candidate);
            }
        }
        // Next combination.
        let mut slot = counters.len();
        loop {
            if slot == 0 {
                return None;
            }
            slot -= 1;
            counters[slot] += 1;
            if counters[slot] < poset.algebra(maximal_ids[slot]).atoms().len() {
                break;
            }
            counters[slot] = 0;
        }
    }
}

fn small_posets() -> Vec<(String, WPoset<QuadScalar>)> {
    let mut out = Vec::new();

    let clifton = exact_builtin("clifton8");
    let (contexts, aux) = maximal_contexts(&clifton.rays_only(), true).unwrap();
    assert_eq!(contexts.len(), 7);
    out.push((
        "clifton8 colouring view".to_string(),
        build_poset(&contexts, &[], aux.clone()),
    ));
    out.push((
        "clifton8 with degenerates".to_string(),
        build_poset(&contexts, &[vec![2, 1]], aux),
    ));

    // The factor-through example: two tetrads sharing two axes.
    let shared_pair = vec![
        ray(&[1, 0, 0, 0]),
        ray(&[0, 1, 0, 0]),
        ray(&[0, 0, 1, 0]),
        ray(&[0, 0, 0, 1]),
        ray(&[0, 0, 1, 1]),
        ray(&[0, 0, 1, -1]),
    ];
    let (contexts, aux) = maximal_contexts(&shared_pair, false).unwrap();
    assert_eq!(contexts.len(), 2);
    out.push((
        "two tetrads sharing a plane".to_string(),
        build_poset(&contexts, &[vec![2, 1, 1], vec![3, 1], vec![2, 2]], aux),
    ));

    let mermin = exact_builtin("mermin24");
    let tetrads = mermin.listed_contexts().unwrap();
    out.push((
        "mermin 2-2 view".to_string(),
        build_poset(&tetrads, &[vec![2, 2]], Vec::new()),
    ));
    out.push((
        "mermin tetrads only".to_string(),
        build_poset(&tetrads, &[], Vec::new()),
    ));
    out
}

#[test]
fn search_agrees_with_the_brute_force_oracle_on_small_posets() {
    for (name, poset) in small_posets() {
        assert!(poset.maximal_ids().len() <= 8, "{name} stays oracle-sized");
        let oracle = oracle_global(&poset);
        match search_global(&poset) {
            SearchResult::Sat(candidate) => {
                assert!(oracle.is_some(), "{name}: search sat, oracle unsat");
                assert!(
                    matches!(is_global(&poset, &candidate), Ok(GlobalCheck::Ok)),
                    "{name}"
                );
            }
            SearchResult::Unsat(_) => {
                assert!(oracle.is_none(), "{name}: search unsat, oracle sat");
            }
        }
    }
}

#[test]
fn degenerate_algebras_make_the_mermin_difference() {
    let mermin = exact_builtin("mermin24");
    let tetrads = mermin.listed_contexts().unwrap();
    let bare = build_poset(&tetrads, &[], Vec::new());
    assert!(matches!(search_global(&bare), SearchResult::Sat(_)));
    let with_planes = build_poset(&tetrads, &[vec![2, 2]], Vec::new());
    assert!(matches!(
        search_global(&with_planes),
        SearchResult::Unsat(_)
    ));
}

#[test]
fn sat_valuations_put_exactly_one_one_per_context() {
    let clifton = exact_builtin("clifton8");
    let (contexts, aux) = maximal_contexts(&clifton.rays_only(), true).unwrap();
    let poset = build_poset(&contexts, &[], aux);
    let SearchResult::Sat(candidate) = search_global(&poset) else {
        panic!("clifton8 is colourable");
    };
    for id in poset.maximal_ids() {
        let chosen = candidate.get(id).unwrap();
        assert!(chosen.atom < poset.algebra(id).atoms().len());
    }
    // Shared atoms carry one value: collate (subspace, bit) across contexts.
    let mut seen: Vec<(Subspace<QuadScalar>, bool)> = Vec::new();
    for id in poset.maximal_ids() {
        let chosen = candidate.get(id).unwrap().atom;
        for (pos, atom) in poset.algebra(id).atoms().iter().enumerate() {
            let bit = pos == chosen;
            if let Some((_, existing)) = seen.iter().find(|(s, _)| s == atom) {
                assert_eq!(*existing, bit);
            } else {
                seen.push((atom.clone(), bit));
            }
        }
    }
}

#[test]
fn adding_contexts_never_turns_unsat_into_sat() {
    let peres = exact_builtin("peres33");
    let (contexts, _) = maximal_contexts(&peres.rays_only(), true).unwrap();
    let colourable = |slice: &[Algebra<QuadScalar>]| {
        let poset = build_poset(slice, &[], Vec::new());
        matches!(search_global(&poset), SearchResult::Sat(_))
    };
    let mut last = true;
    for take in [1, 10, 20, 30, 35, 38, 40] {
        let now = colourable(&contexts[..take]);
        assert!(
            !(now && !last),
            "prefix of {take} contexts flipped unsat back to sat"
        );
        last = now;
    }
    assert!(!last, "all 40 contexts are uncolourable");
}

#[test]
fn mermin_restriction_and_preimage_examples() {
    let mermin = exact_builtin("mermin24");
    let tetrads = mermin.listed_contexts().unwrap();
    let poset = build_poset(&tetrads, &[vec![2, 2]], Vec::new());

    // Locate tetrad D and the shared plane algebra {span(D1,D3), span(D2,D4)}.
    let d1 = mermin.by_label("D1").unwrap().subspace();
    let tetrad_d = poset
        .maximal_ids()
        .into_iter()
        .find(|&id| poset.algebra(id).atom_index(&d1).is_some())
        .unwrap();
    let plane = Subspace::span(&[
        mermin.by_label("D1").unwrap().vector().clone(),
        mermin.by_label("D3").unwrap().vector().clone(),
    ])
    .unwrap();
    let shared = poset
        .non_maximal_ids()
        .into_iter()
        .find(|&id| poset.algebra(id).atom_index(&plane).is_some())
        .unwrap();

    let d1_atom = poset.algebra(tetrad_d).atom_index(&d1).unwrap();
    let down = restrict(
        &poset,
        Hom {
            algebra: tetrad_d,
            atom: d1_atom,
        },
        shared,
    )
    .unwrap();
    assert_eq!(poset.algebra(shared).atoms()[down.atom], plane);

    // The preimage of that choice upstairs is exactly {D1, D3}.
    let up = preimage(&poset, shared, down, tetrad_d).unwrap();
    let d3 = mermin.by_label("D3").unwrap().subspace();
    let expected: Vec<usize> = [&d1, &d3]
        .iter()
        .map(|s| poset.algebra(tetrad_d).atom_index(s).unwrap())
        .collect();
    let mut got: Vec<usize> = up.iter().map(|h| h.atom).collect();
    got.sort_unstable();
    let mut expected = expected;
    expected.sort_unstable();
    assert_eq!(got, expected);
}

#[test]
fn disjoint_maximals_have_shared_nothing() {
    // Two disjoint triples: the poset holds both maximal algebras and their
    // six coarsenings, none shared; after reduction nothing remains on the
    // degenerate side, so the inclusion graph is two bare context nodes.
    let rays = vec![
        ray(&[1, 0, 0]),
        ray(&[0, 1, 0]),
        ray(&[0, 0, 1]),
        ray(&[1, 1, 1]),
        ray(&[1, -2, 1]),
        ray(&[1, 0, -1]),
    ];
    let (contexts, _) = maximal_contexts(&rays, false).unwrap();
    assert_eq!(contexts.len(), 2);
    let poset = build_poset(&contexts, &[vec![2, 1]], Vec::new());
    assert_eq!(poset.len(), 8);
    assert_eq!(poset.hasse_edges().len(), 6);
    let graph = reduce(&poset);
    assert_eq!(graph.maximals().len(), 2);
    assert!(graph.nodes().is_empty());
    assert_eq!(min_loop(&graph), None);
}

#[test]
fn cg10_matches_its_orthogonality_pattern_and_prediction() {
    let set = approx_builtin("cg10");
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
        }
    }

    let (contexts, aux) = maximal_contexts(&set.rays_only(), true).unwrap();
    assert_eq!(contexts.len(), 9);
    assert_eq!(aux.len(), 6);

    let mut input = PartialValuation::new();
    input
        .assign(set.by_label("r1").unwrap().subspace(), true)
        .unwrap();
    let predicted = set.by_label("r10").unwrap().subspace();
    match verify_dps(&contexts, &input, (&predicted, true)).unwrap() {
        DpsResult::Verified(cert) => {
            assert!(cert.trace.contradiction() || cert.search_nodes.is_some());
        }
        DpsResult::NotForced { .. } => panic!("cg10 forces r10 = 1 from r1 = 1"),
    }
}

#[test]
fn clifton_prediction_runs_on_propagation_alone() {
    let set = exact_builtin("clifton8");
    let (contexts, _) = maximal_contexts(&set.rays_only(), true).unwrap();
    let mut input = PartialValuation::new();
    input
        .assign(set.by_label("r7").unwrap().subspace(), true)
        .unwrap();
    let predicted = set.by_label("r8").unwrap().subspace();
    match verify_dps(&contexts, &input, (&predicted, false)).unwrap() {
        DpsResult::Verified(cert) => {
            assert!(cert.trace.contradiction());
            assert_eq!(cert.search_nodes, None);
        }
        DpsResult::NotForced { .. } => panic!("clifton8 forces r8 = 0 from r7 = 1"),
    }
}

#[test]
fn diagram_datasets_verify_their_recorded_predictions() {
    for name in ["cg_appendix_a", "cg_appendix_b"] {
        let diagram = diagram_builtin(name);
        let net = diagram.net();
        let mut seeds: Vec<(usize, bool)> = diagram
            .dps_input
            .iter()
            .map(|(label, value)| (diagram.ray_id(label).unwrap(), *value))
            .collect();
        let (target, value) = (
            diagram.ray_id(&diagram.dps_predicted.0).unwrap(),
            diagram.dps_predicted.1,
        );
        seeds.push((target, !value));
        let (_, trace) = engine::propagate(&net, &seeds);
        let forced = trace.contradiction()
            || matches!(
                engine::search(&net, &seeds, &mut |_| true),
                engine::NetSearchResult::Unsat { .. }
            );
        assert!(forced, "{name} prediction must be forced");

        // Without the assumed opposite the diagram stays colourable.
        let inputs_only: Vec<(usize, bool)> = diagram
            .dps_input
            .iter()
            .map(|(label, value)| (diagram.ray_id(label).unwrap(), *value))
            .collect();
        assert!(matches!(
            engine::search(&net, &inputs_only, &mut |_| true),
            engine::NetSearchResult::Sat { .. }
        ));
    }
}

#[test]
fn diagram_loop_inventories_are_as_documented() {
    use kscheck_core::loops::{enumerate_loops_skeleton, min_loop_skeleton, Skeleton};
    let skeleton_of = |diagram: &ContextDiagram| {
        let shared: Vec<Vec<usize>> = diagram
            .rays
            .iter()
            .map(|ray| {
                diagram
                    .contexts
                    .iter()
                    .enumerate()
                    .filter(|(_, ctx)| ctx.contains(ray))
                    .map(|(id, _)| id)
                    .collect::<Vec<usize>>()
            })
            .filter(|parents| parents.len() >= 2)
            .collect();
        Skeleton::new(shared, diagram.contexts.len())
    };

    let a = skeleton_of(&diagram_builtin("cg_appendix_a"));
    assert_eq!(min_loop_skeleton(&a), Some(10));
    let loops_a = enumerate_loops_skeleton(&a, 5);
    assert_eq!(loops_a.len(), 2);
    assert!(loops_a.iter().all(|l| l.maximal_count() == 5));

    let b = skeleton_of(&diagram_builtin("cg_appendix_b"));
    assert_eq!(min_loop_skeleton(&b), Some(10));
    let loops_b = enumerate_loops_skeleton(&b, 5);
    assert_eq!(loops_b.len(), 4);
    assert!(loops_b.iter().all(|l| l.maximal_count() == 5));
}

#[test]
fn magic_square_control_instances() {
    assert!(matches!(mermin_parity_check(), ParityOutcome::Unsat(_)));
}

#[test]
fn propagation_traces_replay_exactly() {
    let set = exact_builtin("clifton8");
    let (contexts, _) = maximal_contexts(&set.rays_only(), true).unwrap();
    let mut initial = PartialValuation::new();
    initial
        .assign(set.by_label("r7").unwrap().subspace(), true)
        .unwrap();
    initial
        .assign(set.by_label("r8").unwrap().subspace(), true)
        .unwrap();
    let (first_val, first) = propagate(&contexts, &initial).unwrap();
    let (second_val, second) = propagate(&contexts, &initial).unwrap();
    assert_eq!(first, second);
    assert_eq!(first_val, second_val);
    assert!(first.contradiction());
}

#[test]
fn every_poset_algebra_sits_under_a_maximal_one() {
    for (name, poset) in small_posets() {
        for id in poset.non_maximal_ids() {
            assert!(
                !poset.maximal_parents(id).is_empty(),
                "{name}: algebra {id} has no maximal parent"
            );
        }
        for &(child, parent) in poset.hasse_edges() {
            assert!(poset.le(child, parent), "{name}: bad hasse edge");
            assert!(
                poset.algebra(child).included_in(poset.algebra(parent)),
                "{name}: hasse edge fails the atom-coarsening test"
            );
        }
    }
}

#[test]
fn cg10_shares_the_three_dimensional_girth() {
    // Every shipped 3D ray set keeps the ten-algebra shortest loop.
    let set = approx_builtin("cg10");
    let (contexts, aux) = maximal_contexts(&set.rays_only(), true).unwrap();
    let poset = build_poset(&contexts, &[vec![2, 1]], aux);
    let graph = reduce(&poset);
    assert_eq!(min_loop(&graph), Some(10));
    assert!(enumerate_loops(&graph, 4).is_empty());
    let five = enumerate_loops(&graph, 5)
        .iter()
        .filter(|l| l.maximal_count() == 5)
        .count();
    assert_eq!(five, 4, "two joined loops plus the extra connection");
}
