//! Acceptance run: one PASS/FAIL line per criterion, in order.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use mil_core::canon::graphs_up_to;
use mil_core::cnf::{
    all_exactly3_on_three_vars, brute_force_sat, is_satisfiable, padding_block, random_exactly3,
    random_restricted, restricted_instances, to_restricted, CnfFormula, RestrictedForm,
};
use mil_core::e2e::{end_to_end_check, Answer, CheckOptions, OracleChoice};
use mil_core::fixtures::{block_graph, fig6_graph, fixture_rep, stubbed_variable_gadget};
use mil_core::interval::{rat, validate_representation, ClassConstraints, DIntervalFamily, Interval};
use mil_core::intrep::{find_integer_rep, find_integer_rep_profile, stretch, SearchConfig};
use mil_core::order::{
    colored_profile, enumerate_realizations, order_to_family, recognize_unit_d, uniform_profile, OrderConfig,
};
use mil_core::reduction::{build_reduction_graph, decolorize, lift_to_d, variable_gadget};
use mil_core::split::{enumerate_splits, recognize_colored_unit2_via_splits, EnumerateOptions, Split};
use mil_core::unit_interval::recognize_unit_interval;
use mil_core::{find_forbidden_unit_interval, Budget, Color, ColoredGraph, Error, Graph};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn run(id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let mut o = f();
    let took = t.elapsed();
    if let Some(l) = limit {
        if took > l {
            o.pass = false;
            o.detail += &format!("; over the {}s limit", l.as_secs());
        }
    }
    println!(
        "criterion {id:>2} {} {name}: {} [{:.1}s]",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        took.as_secs_f64()
    );
    o.pass
}

fn mins(m: u64) -> Option<Duration> {
    Some(Duration::from_secs(60 * m))
}

fn valid(g: &Graph, fam: &DIntervalFamily, c: &ClassConstraints) -> bool {
    validate_representation(g, fam, c).is_ok_and(|r| r.is_empty())
}

fn criterion_1() -> Outcome {
    let catalog = graphs_up_to(9);
    let bad: Vec<usize> = catalog
        .par_iter()
        .enumerate()
        .filter_map(|(i, g)| {
            let cert = find_forbidden_unit_interval(g);
            let unit = recognize_unit_interval(g).ok()?.is_unit();
            let ok = cert.is_none() == unit && cert.is_none_or(|c| c.verify(g));
            (!ok).then_some(i)
        })
        .collect();
    outcome(
        bad.is_empty(),
        format!("{} graphs on <= 9 vertices, {} disagreements", catalog.len(), bad.len()),
    )
}

struct CrossCheck {
    colorings: usize,
    distinct: usize,
    disagreements: usize,
    positives: usize,
    round_trip_failures: usize,
}

fn cross_check_graph(g: &Graph, seed: u64) -> CrossCheck {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // mask bit v set = v is white; all-white first
    let mut masks = vec![(1u32 << n) - 1];
    masks.extend((0..200).map(|_| rng.gen::<u32>() & ((1u32 << n) - 1)));
    let mut answers: HashMap<u32, (bool, bool, usize)> = HashMap::new();
    let mut cc = CrossCheck {
        colorings: masks.len(),
        distinct: 0,
        disagreements: 0,
        positives: 0,
        round_trip_failures: 0,
    };
    for &mask in &masks {
        let (s, o, _) = *answers.entry(mask).or_insert_with(|| {
            let colors = (0..n)
                .map(|v| if mask >> v & 1 == 1 { Color::White } else { Color::Black })
                .collect();
            let cg = ColoredGraph::new(g.clone(), colors).unwrap();
            let c = ClassConstraints::colored_unit(&cg);
            let mut fails = 0;
            let by_splits = recognize_colored_unit2_via_splits(&cg, &mut Budget::unlimited()).unwrap();
            if let Some((_, fam)) = &by_splits {
                fails += usize::from(!valid(g, fam, &c));
            }
            let by_order =
                recognize_unit_d(g, &colored_profile(&cg), &OrderConfig::default(), &mut Budget::unlimited()).unwrap();
            if let Some(fam) = &by_order {
                fails += usize::from(!valid(g, fam, &c));
            }
            (by_splits.is_some(), by_order.is_some(), fails)
        });
        cc.disagreements += usize::from(s != o);
    }
    cc.distinct = answers.len();
    for (s, o, fails) in answers.values() {
        cc.positives += usize::from(*s) + usize::from(*o);
        cc.round_trip_failures += fails;
    }
    cc
}

fn criteria_2_and_3() -> (bool, bool) {
    let mut round_trip = (0usize, 0usize);
    let c2 = run(2, "split engine and order oracle agree", mins(30), || {
        let graphs = graphs_up_to(6);
        let per: Vec<CrossCheck> = graphs
            .par_iter()
            .enumerate()
            .map(|(i, g)| cross_check_graph(g, 1000 + i as u64))
            .collect();
        let colorings: usize = per.iter().map(|c| c.colorings).sum();
        let distinct: usize = per.iter().map(|c| c.distinct).sum();
        let bad: usize = per.iter().map(|c| c.disagreements).sum();
        round_trip = (
            per.iter().map(|c| c.positives).sum(),
            per.iter().map(|c| c.round_trip_failures).sum(),
        );
        outcome(
            bad == 0,
            format!(
                "{} graphs on <= 6 vertices, {colorings} colorings ({distinct} distinct), {bad} disagreements",
                graphs.len()
            ),
        )
    });
    let c3 = run(3, "positive answers yield valid colored unit families", None, || {
        let (pos, fails) = round_trip;
        outcome(pos > 0 && fails == 0, format!("{pos} families checked, {fails} with violations"))
    });
    (c2, c3)
}

/// `i` lies inside `j ∪ k` and is not equal to it.
fn properly_inside_union(i: &Interval, j: &Interval, k: &Interval) -> bool {
    let (lo, hi) = if j.left <= k.left { (j, k) } else { (k, j) };
    if lo.right >= hi.left {
        let left = &lo.left;
        let right = if lo.right >= hi.right { &lo.right } else { &hi.right };
        left <= &i.left && &i.right <= right && (left, right) != (&i.left, &i.right)
    } else {
        (i.within(j) && i != j) || (i.within(k) && i != k)
    }
}

fn criterion_4() -> Outcome {
    let g = fig6_graph().graph;
    let mut count = 0u64;
    let mut bad = 0u64;
    let r = enumerate_realizations(
        &g,
        &uniform_profile(&g, 2),
        &OrderConfig::default(),
        &mut Budget::unlimited(),
        None,
        |t| {
            count += 1;
            let fam = order_to_family(t).unwrap();
            let (v, a, b) = (fam.get("v").unwrap(), fam.get("av_0").unwrap(), fam.get("bv_0").unwrap());
            let holds = v
                .iter()
                .any(|i| a.iter().any(|j| b.iter().any(|k| properly_inside_union(i, j, k))));
            bad += u64::from(!holds || !valid(&g, &fam, &ClassConstraints::unit()));
            ControlFlow::Continue(())
        },
    );
    match r {
        Ok(_) => outcome(
            count >= 1 && bad == 0,
            format!("{count} realizations of B_v, {bad} without the containment"),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

#[derive(Debug, PartialEq, Eq, Hash, Clone, Copy)]
enum GadgetCase {
    One,
    Two,
    Three,
    Four,
    Other,
}

/// Case of the variable-gadget part of a split, decided from which literal
/// representatives touch the private vertices.
fn gadget_case(sp: &Split) -> GadgetCase {
    let s = &sp.s;
    let reps = |v: &str| -> Vec<usize> { (0..s.n()).filter(|&r| sp.f[r] == v).collect() };
    let one = |v: &str| reps(v)[0];
    let (a, b, c) = (one("A1"), one("B1"), one("C1"));
    let isolated = |r: usize| ![a, b, c].iter().any(|&p| s.has_edge(r, p));
    let (x1, x2, xn) = (reps("x1_1"), reps("x1_2"), reps("x1_N"));
    let iso = |rs: &[usize]| rs.iter().any(|&r| isolated(r));
    let (i1, i2, i_n) = (iso(&x1), iso(&x2), iso(&xn));
    // xN reps split across the A and B sides
    let split_n = (s.has_edge(xn[0], a) && s.has_edge(xn[1], b)) || (s.has_edge(xn[1], a) && s.has_edge(xn[0], b));
    // x1, x2 reps paired up on the A and B sides
    let paired = [(0, 1), (1, 0)].iter().any(|&(p, q)| {
        [(0usize, 1usize), (1, 0)].iter().any(|&(r, t)| {
            s.has_edge(x1[p], x2[r])
                && s.has_edge(x1[p], a)
                && s.has_edge(x2[r], a)
                && s.has_edge(x1[q], x2[t])
                && s.has_edge(x1[q], b)
                && s.has_edge(x2[t], b)
        })
    });
    match (i1, i2, i_n) {
        (true, true, false) if split_n => GadgetCase::One,
        (false, false, true) if paired => GadgetCase::Two,
        (false, false, false) => GadgetCase::Three,
        (true, false, false) | (false, true, false) => GadgetCase::Four,
        _ => GadgetCase::Other,
    }
}

fn criterion_5() -> Outcome {
    let cg = stubbed_variable_gadget();
    let opts = EnumerateOptions {
        only_unit_interval: false,
        reduce_symmetry: true,
        ..EnumerateOptions::default()
    };
    let mut all = 0u64;
    let mut cases: HashMap<GadgetCase, u64> = HashMap::new();
    let r = enumerate_splits(&cg, &opts, &mut Budget::unlimited(), |view| {
        all += 1;
        let sp = view.to_split();
        if find_forbidden_unit_interval(&sp.s).is_none() {
            *cases.entry(gadget_case(&sp)).or_default() += 1;
        }
        ControlFlow::Continue(())
    });
    if let Err(e) = r {
        return outcome(false, e.to_string());
    }
    let pruned = mil_core::split::count_splits(
        &cg,
        &EnumerateOptions {
            only_unit_interval: true,
            ..opts
        },
    )
    .unwrap();
    let get = |c| cases.get(&c).copied().unwrap_or(0);
    let unit: u64 = cases.values().sum();
    let only_1_2 = get(GadgetCase::Three) + get(GadgetCase::Four) + get(GadgetCase::Other) == 0;
    outcome(
        unit >= 1 && only_1_2 && get(GadgetCase::One) > 0 && get(GadgetCase::Two) > 0 && pruned == unit,
        format!(
            "{all} splits, {unit} unit interval ({pruned} by the pruned search): case 1 {}, case 2 {}, case 3 {}, case 4 {}, other {}",
            get(GadgetCase::One),
            get(GadgetCase::Two),
            get(GadgetCase::Three),
            get(GadgetCase::Four),
            get(GadgetCase::Other)
        ),
    )
}

fn criterion_6() -> Outcome {
    // (a) equisatisfiability of the restricted form
    let mut formulas: Vec<CnfFormula> = all_exactly3_on_three_vars();
    let exhaustive = formulas.len();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..500 {
        let n = rng.gen_range(3..=6);
        let m = rng.gen_range(1..=4 * n);
        formulas.push(random_exactly3(&mut rng, n, m));
    }
    let mismatches = formulas
        .par_iter()
        .filter(|f| {
            let r = to_restricted(f).unwrap();
            brute_force_sat(f).unwrap().is_some() != is_satisfiable(&r.formula)
        })
        .count();
    let unsat_formulas = formulas.iter().filter(|f| brute_force_sat(f).unwrap().is_none()).count();

    // (b) end to end on the padding block and the smallest unsatisfiable restricted instances
    let smaller_unsat = restricted_instances(1)
        .iter()
        .filter(|f| brute_force_sat(f).unwrap().is_none())
        .count();
    let unsat: Vec<CnfFormula> = restricted_instances(2)
        .into_iter()
        .filter(|f| brute_force_sat(f).unwrap().is_none())
        .collect();
    let opts = CheckOptions {
        oracles: OracleChoice::Order,
        budget: Some(Duration::from_secs(30 * 60)),
        order: OrderConfig::unbounded(),
        ..CheckOptions::default()
    };
    let pad = end_to_end_check(&padding_block(), &CheckOptions::default()).unwrap();
    let pad_ok = pad.agree && pad.order == Answer::Yes && pad.sat == Answer::Yes;
    let reports: Vec<_> = unsat.par_iter().map(|f| end_to_end_check(f, &opts).unwrap()).collect();
    let exhausted = reports.iter().filter(|r| r.order == Answer::BudgetExhausted).count();
    let rejected = reports.iter().filter(|r| r.order == Answer::No).count();
    let disagree = reports.iter().filter(|r| !r.agree).count();
    outcome(
        mismatches == 0 && pad_ok && disagree == 0 && !unsat.is_empty(),
        format!(
            "(a) {exhaustive} exhaustive + 500 random formulas ({unsat_formulas} unsat), {mismatches} mismatches; \
             (b) padding block order={:?} splits={:?}; {} unsat restricted instances on 6 vars ({smaller_unsat} on 3), \
             {rejected} rejected, {exhausted} budget exhaustions, {disagree} disagreements",
            pad.order,
            pad.splits,
            unsat.len()
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = Vec::new();
    let mut worst = (0usize, 0usize);
    for i in 0..1000 {
        let blocks = rng.gen_range(1..=6);
        let r = RestrictedForm::new(random_restricted(&mut rng, blocks)).unwrap();
        let (n, m) = (r.num_vars(), r.formula.num_clauses());
        let t = build_reduction_graph(&r).unwrap();
        let st = t.size_stats;
        let d = decolorize(&t.graph).unwrap().graph;
        let ok = st.vertices <= 6 * n + 2 * m
            && st.edges <= 12 * n + 4 * m
            && st.max_degree <= 6
            && d.n() == st.white + 9 * st.black
            && d.m() == st.edges + 9 * st.black
            && d.max_degree() <= 7;
        worst = (worst.0.max(st.max_degree), worst.1.max(d.max_degree()));
        if !ok {
            bad.push(i);
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "1000 instances, max degree {} before and {} after decolorize, {} violations",
            worst.0,
            worst.1,
            bad.len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let vg = variable_gadget();
    let block = block_graph();
    let checks: [(&str, &ColoredGraph, ClassConstraints); 5] = [
        ("fig4a-rep", &vg, ClassConstraints::colored_unit(&vg)),
        ("fig4b-rep", &vg, ClassConstraints::colored_unit(&vg)),
        ("fig6-rep", &fig6_graph(), ClassConstraints::colored_unit(&fig6_graph())),
        ("fig8-block", &block, ClassConstraints::default().with_counts(block.profile())),
        (
            "fig9-rep",
            &block,
            ClassConstraints {
                integer_x: Some(11),
                ..ClassConstraints::default()
            }
            .with_counts(block.profile()),
        ),
    ];
    for (name, g, c) in &checks {
        let ok = valid(&g.graph, &fixture_rep(name).unwrap(), c);
        pass &= ok;
        notes.push(format!("{name} {}", if ok { "valid" } else { "INVALID" }));
    }
    let d6 = fixture_rep("fig6-rep").unwrap().depth().unwrap();
    let d8 = fixture_rep("fig8-block").unwrap().depth().unwrap();
    pass &= d6 == 3 && d8 == 4;
    notes.push(format!("depth fig6 {d6}, fig8 {d8}"));

    let prof = colored_profile(&block);
    let search = |coord_max: u64| {
        find_integer_rep_profile(
            &block.graph,
            &prof,
            &SearchConfig::new(2, 11, coord_max),
            &OrderConfig::default(),
            &mut Budget::time(Duration::from_secs(60 * 60)),
        )
    };
    match search(120) {
        Ok((Some(fam), st)) => {
            let ok = valid(
                &block.graph,
                &fam,
                &ClassConstraints {
                    integer_x: Some(11),
                    ..ClassConstraints::default()
                }
                .with_counts(block.profile()),
            );
            pass &= ok;
            notes.push(format!("fig9 block x=11 in [0,120]: found after {} nodes, valid {ok}", st.nodes));
        }
        Ok((None, st)) => {
            pass = false;
            let wider = match search(121) {
                Ok((Some(f), _)) => format!("found in [0,121] spanning {:?}", f.span().map(|(a, b)| (a.to_string(), b.to_string()))),
                Ok((None, _)) => "none in [0,121] either".to_string(),
                Err(e) => e.to_string(),
            };
            notes.push(format!(
                "fig9 block x=11 in [0,120]: INFEASIBLE (complete search, {} nodes); {wider}",
                st.nodes
            ));
        }
        Err(e) => {
            pass = false;
            notes.push(format!("fig9 block search: {e}"));
        }
    }
    outcome(pass, notes.join("; "))
}

fn stretch_ok(g: &Graph, fam: &DIntervalFamily, x: u64) -> bool {
    let Ok(s) = stretch(fam) else { return false };
    let c = ClassConstraints {
        integer_x: Some(x + 1),
        ..ClassConstraints::default()
    }
    .with_counts(fam.counts());
    s.classify().is_ok_and(|r| r.integer_x == Some(x + 1))
        && s.intersection_graph() == fam.intersection_graph()
        && valid(g, &s, &c)
}

fn criterion_9() -> Outcome {
    let mut checked = 0usize;
    let mut bad = 0usize;
    // families found by the integer search on small graphs, at x = |V|
    for g in graphs_up_to(5).iter().filter(|g| g.n() > 0) {
        let x = g.n() as u64;
        let cfg = SearchConfig::new(1, x, x * (x + 1));
        if let Some(fam) = find_integer_rep(g, &cfg, &mut Budget::unlimited()).unwrap() {
            checked += 1;
            bad += usize::from(!stretch_ok(g, &fam, x));
        }
    }
    let block = block_graph();
    let prof = colored_profile(&block);
    let fig9 = fixture_rep("fig9-rep").unwrap();
    let mut fams = vec![fig9.clone()];
    for cm in [120, 121] {
        let cfg = SearchConfig::new(2, 11, cm);
        if let Ok((Some(f), _)) =
            find_integer_rep_profile(&block.graph, &prof, &cfg, &OrderConfig::default(), &mut Budget::unlimited())
        {
            fams.push(f);
        }
    }
    for f in &fams {
        checked += 1;
        bad += usize::from(!stretch_ok(&block.graph, f, 11));
    }
    let scaled = fig9.scaled(&rat(1, 11)).unwrap();
    let unit_ok = scaled.classify().unwrap().is_unit && scaled.intersection_graph() == fig9.intersection_graph();
    outcome(
        bad == 0 && unit_ok && checked > fams.len(),
        format!("{checked} families stretched, {bad} failures; fig9 scaled by 1/11 unit with same graph: {unit_ok}"),
    )
}

fn criterion_10() -> Outcome {
    let graphs = graphs_up_to(5);
    let budget = Duration::from_secs(120);
    let results: Vec<Option<bool>> = graphs
        .par_iter()
        .map(|g| {
            let base = recognize_unit_d(g, &uniform_profile(g, 2), &OrderConfig::default(), &mut Budget::unlimited())
                .unwrap()
                .is_some();
            let lifted = lift_to_d(g, 3).unwrap().graph;
            match recognize_unit_d(
                &lifted,
                &uniform_profile(&lifted, 3),
                &OrderConfig::unbounded(),
                &mut Budget::time(budget),
            ) {
                Ok(found) => {
                    let three = lifted.labels().iter().map(|l| (l.clone(), 3)).collect();
                    let ok = found
                        .as_ref()
                        .is_none_or(|f| valid(&lifted, f, &ClassConstraints::unit().with_counts(three)));
                    Some(ok && found.is_some() == base)
                }
                Err(Error::Budget { .. }) => None,
                Err(e) => panic!("{e}"),
            }
        })
        .collect();
    let exhausted = results.iter().filter(|r| r.is_none()).count();
    let bad = results.iter().filter(|r| **r == Some(false)).count();
    outcome(
        bad == 0,
        format!(
            "{} graphs on <= 5 vertices lifted to d=3: {bad} disagreements, {exhausted} budget exhaustions",
            graphs.len()
        ),
    )
}

#[test]
fn acceptance() {
    let mut passed = vec![run(1, "forbidden subgraphs match recognition", mins(10), criterion_1)];
    let (c2, c3) = criteria_2_and_3();
    passed.extend([c2, c3]);
    passed.push(run(4, "B_v interval of v inside a_v^0 and b_v^0", mins(10), criterion_4));
    passed.push(run(5, "variable gadget splits are case 1 or case 2", None, criterion_5));
    passed.push(run(6, "reduction soundness", None, criterion_6));
    passed.push(run(7, "size and degree bounds", None, criterion_7));
    passed.push(run(8, "figure representations", mins(60), criterion_8));
    passed.push(run(9, "stretch and scaling hierarchy", None, criterion_9));
    passed.push(run(10, "d-lift preserves recognizability", None, criterion_10));
    let failed: Vec<usize> = (1..=passed.len()).filter(|i| !passed[i - 1]).collect();
    println!("acceptance: {}/{} criteria pass", passed.len() - failed.len(), passed.len());
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
