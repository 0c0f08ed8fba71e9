//! Acceptance suite: one line per criterion, then a single assertion.

mod common;

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use common::{all_knots, random_balanced_tangle, random_knot, relabel, sequences, tuples};
use thinwidth::families::{anchors, build_flanked, build_type_n, FlankedParams, TypeNParams};
use thinwidth::harness::oracle::{oracle_minimum, width_of_kinds, Constraints, DEFAULT_BUDGET};
use thinwidth::tangle::{self, excise_tangle, insert_tangle, lemma22_width, InsertionContext};
use thinwidth::thinning::{self, ThinningOutcome};
use thinwidth::trace::MoveKind;
use thinwidth::{bridge_presentation, Error, MorsePresentation, Width};

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_squares_identity() -> Verdict {
    let inner = |p: &MorsePresentation| -> Result<(), String> {
        let w = p.width_direct().map_err(|e| e.to_string())?;
        let r = p.thick_thin().map_err(|e| e.to_string())?;
        ensure(w == r.squares_width() && w == r.total, || {
            format!(
                "{}: width {w}, squares form {}",
                p.kinds_string(),
                r.squares_width()
            )
        })
    };
    let check = |p: &MorsePresentation| -> Result<(), String> {
        inner(p).map_err(|e| {
            format!(
                "{} ({}/{}): {e}",
                p.kinds_string(),
                p.punctures_bottom,
                p.punctures_top
            )
        })
    };
    let knots = all_knots(12);
    for p in &knots {
        check(p)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for _ in 0..1000 {
        let k = rng.gen_range(1..=30);
        check(&random_knot(&mut rng, k))?;
    }
    Ok(format!("{} exhaustive + 1000 random, exact", knots.len()))
}

fn c2_insertion_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for trial in 0..1000 {
        let k = rng.gen_range(1..=15);
        let host = relabel(&random_knot(&mut rng, k), "H");
        let level = rng.gen_range(1..host.len());
        let w_p = host.count_at(level);
        let bottom = rng.gen_range(1..=w_p as usize);
        let len = rng.gen_range(1..=8);
        let t = random_balanced_tangle(&mut rng, bottom, len, "T");
        let ctx = InsertionContext::new(&host, level, &t).map_err(|e| e.to_string())?;
        let k_full = insert_tangle(&ctx, &t).map_err(|e| e.to_string())?;
        let w = k_full.width_direct().map_err(|e| e.to_string())?;
        let expected = lemma22_width(
            host.width_direct().unwrap(),
            t.width_direct().unwrap(),
            ctx.l,
            t.len() as Width,
            w_p,
        );
        ensure(w == expected, || {
            format!("trial {trial}: w(K) = {w}, decomposition gives {expected}")
        })?;
        let (h2, t2, ctx2) = excise_tangle(&k_full, &["T"], bottom).map_err(|e| e.to_string())?;
        ensure(h2 == host && t2 == t && ctx2 == ctx, || {
            format!("trial {trial}: excise does not undo insert")
        })?;
    }
    Ok("1000 random insertions, exact; excise undoes insert".into())
}

fn c3_transpositions() -> Verdict {
    let mut pres: Vec<MorsePresentation> = all_knots(10);
    for bottom in 0..=4 {
        for len in 1..=10 {
            pres.extend(
                sequences(bottom, len)
                    .iter()
                    .map(|k| MorsePresentation::from_kinds(bottom, k)),
            );
        }
    }
    let mut checked = 0usize;
    for p in &pres {
        let kinds = p.kinds();
        let counts = p.level_counts();
        for i in 0..p.len().saturating_sub(1) {
            let swapped_count = counts[i] + kinds[i + 1].step();
            match tangle::transpose_adjacent(p, i) {
                Ok((q, d)) => {
                    let recomputed = q.width_direct().unwrap() - p.width_direct().unwrap();
                    let mut sk = kinds.clone();
                    sk.swap(i, i + 1);
                    let oracle = width_of_kinds(p.punctures_bottom, &sk).unwrap()
                        - width_of_kinds(p.punctures_bottom, &kinds).unwrap();
                    ensure(
                        [-4, 0, 4].contains(&d) && d == recomputed && d == oracle,
                        || {
                            format!(
                                "{} at {i}: delta {d}, recomputed {recomputed}, oracle {oracle}",
                                p.kinds_string()
                            )
                        },
                    )?;
                    checked += 1;
                }
                Err(Error::NegativeCount { .. }) => {
                    ensure(swapped_count < 0, || {
                        format!("{} at {i}: spurious rejection", p.kinds_string())
                    })?;
                }
                Err(e) => return Err(format!("{} at {i}: {e}", p.kinds_string())),
            }
        }
    }
    Ok(format!(
        "{checked} transpositions over {} presentations",
        pres.len()
    ))
}

fn type_n_grid(
    ns: std::ops::RangeInclusive<usize>,
    vals: &[usize],
    slack: std::ops::RangeInclusive<usize>,
) -> Vec<TypeNParams> {
    let mut out = Vec::new();
    for n in ns {
        for s in tuples(n, vals) {
            for k in slack.clone() {
                out.push(TypeNParams::with_slack(&s, k));
            }
        }
    }
    out
}

fn c4_anchors() -> Verdict {
    let grid = type_n_grid(2..=6, &[1, 3, 5, 7], 0..=2);
    let failures: Vec<String> = grid
        .par_iter()
        .filter_map(|p| {
            let a = match anchors(p) {
                Ok(a) => a,
                Err(e) => return Some(format!("{p}: {e}")),
            };
            let d = build_type_n(p).ok()?;
            let gaps = d.gap_widths();
            let k = gaps.len();
            let closed = (1..=k).all(|j| p.gap_closed_form(j) == gaps[k - j]);
            let mirror = (0..k).all(|j| gaps[j] == gaps[k - 1 - j]);
            let (s1, s2) = (p.s(1), p.s(2));
            let ok = a.holds()
                && closed
                && mirror
                && gaps[k - 1] == (s1 + 1) as Width
                && (p.left_minima[1] == 0 || a.x21_peak_is_thick)
                && a.a >= s1 + s2
                && a.b >= s1 + s2
                && p.left_box(2).maxima - p.left_box(2).minima == (s1 + s2) / 2;
            (!ok).then(|| format!("{p}: {a:?}"))
        })
        .collect();
    ensure(failures.is_empty(), || {
        format!("{} failures, first {}", failures.len(), failures[0])
    })?;
    Ok(format!("{} instances, zero failures", grid.len()))
}

fn c5_fold() -> Verdict {
    let grid: Vec<TypeNParams> = type_n_grid(3..=6, &[3, 5, 7], 0..=2)
        .into_iter()
        .filter(thinning::lemma32_hypothesis)
        .collect();
    let reference =
        thinning::reduce_n_minus_1(&TypeNParams::minimal(&[3, 3, 3])).map_err(|e| e.to_string())?;
    ensure(reference.delta == 30 && reference.w_before == 128, || {
        format!(
            "reference delta {} from {}",
            reference.delta, reference.w_before
        )
    })?;
    let failures: Vec<String> = grid
        .par_iter()
        .filter_map(|p| match thinning::reduce_n_minus_1(p) {
            Ok(o) => {
                let eq = p.n < 4 || o.closed_form == Some(o.delta);
                (!(o.passes() && eq)).then(|| {
                    format!(
                        "{p}: delta {} bound {:?} line {:?}",
                        o.delta, o.bound, o.closed_form
                    )
                })
            }
            Err(e) => Some(format!("{p}: {e}")),
        })
        .collect();
    ensure(failures.is_empty(), || {
        format!("{} failures, first {}", failures.len(), failures[0])
    })?;
    Ok(format!(
        "{} instances; reference 128 -> 98, delta 30",
        grid.len()
    ))
}

fn c6_block() -> Verdict {
    let grid: Vec<TypeNParams> = type_n_grid(3..=6, &[3, 5, 7], 0..=2)
        .into_iter()
        .filter(thinning::lemma34_hypothesis)
        .collect();
    let r =
        thinning::reduce_n_minus_2(&TypeNParams::minimal(&[3, 3, 3])).map_err(|e| e.to_string())?;
    ensure(
        (r.w_before, r.w_after, r.delta, r.bound) == (128, 92, 36, Some(36)),
        || {
            format!(
                "reference {} -> {}, delta {}",
                r.w_before, r.w_after, r.delta
            )
        },
    )?;
    let failures: Vec<String> = grid
        .par_iter()
        .filter_map(|p| match thinning::reduce_n_minus_2(p) {
            Ok(o) => (!(o.passes() && o.closed_form == Some(o.delta))).then(|| {
                format!(
                    "{p}: delta {} bound {:?} six-term {:?}",
                    o.delta, o.bound, o.closed_form
                )
            }),
            Err(e) => Some(format!("{p}: {e}")),
        })
        .collect();
    ensure(failures.is_empty(), || {
        format!("{} failures, first {}", failures.len(), failures[0])
    })?;
    Ok(format!(
        "{} instances; reference 128 -> 92, delta 36",
        grid.len()
    ))
}

fn pipeline_grid() -> Vec<TypeNParams> {
    let mut g: Vec<TypeNParams> = type_n_grid(2..=2, &[1, 3, 5, 7], 0..=2)
        .into_iter()
        .filter(|p| p.s[0] == 1)
        .collect();
    g.extend(type_n_grid(3..=6, &[1, 3, 5, 7], 0..=2));
    g
}

fn pipeline_outcomes() -> &'static Vec<(TypeNParams, Result<ThinningOutcome, String>)> {
    static CACHE: OnceLock<Vec<(TypeNParams, Result<ThinningOutcome, String>)>> = OnceLock::new();
    CACHE.get_or_init(|| {
        pipeline_grid()
            .into_par_iter()
            .map(|p| {
                let o = thinning::thin_pipeline(&p).map_err(|e| e.to_string());
                (p, o)
            })
            .collect()
    })
}

fn c7_pipeline() -> Verdict {
    let all = pipeline_outcomes();
    let failures: Vec<String> = all
        .iter()
        .filter_map(|(p, o)| match o {
            Ok(o) => {
                let n = p.n as Width;
                let some_one = p.s[..p.n - 1].contains(&1);
                let need = if some_one { 2 * n * n - 2 } else { 2 * n * n };
                (o.delta < need || o.bound != Some(need))
                    .then(|| format!("{p}: delta {} < {need}", o.delta))
            }
            Err(e) => Some(format!("{p}: {e}")),
        })
        .collect();
    ensure(failures.is_empty(), || {
        format!("{} failures, first {}", failures.len(), failures[0])
    })?;
    Ok(format!("{} instances, zero failures", all.len()))
}

fn c8_connect_sum() -> Verdict {
    let all = pipeline_outcomes();
    let failures: Vec<String> = all
        .par_iter()
        .filter_map(|(p, o)| {
            let o = match o {
                Ok(o) => o,
                Err(e) => return Some(format!("{p}: {e}")),
            };
            let n = p.n;
            let bridge = bridge_presentation(n);
            let wb = bridge.width_direct().ok()?;
            let nn = n as Width;
            let sum = tangle::connect_sum(&o.after, &bridge).ok()?;
            let ws = sum.width_direct().ok()?;
            let ok = wb == 2 * nn * nn
                && o.delta >= 2 * nn * nn - 2
                && 2 * nn * nn - 2 >= wb - 2
                && ws == o.w_after + wb - 2
                && ws <= o.w_before;
            (!ok).then(|| {
                format!(
                    "{p}: before {} after {} bridge {wb} sum {ws}",
                    o.w_before, o.w_after
                )
            })
        })
        .collect();
    ensure(failures.is_empty(), || {
        format!("{} failures, first {}", failures.len(), failures[0])
    })?;
    Ok(format!(
        "{} instances; w(after # bridge) <= w(K) throughout",
        all.len()
    ))
}

fn flanked_grid(r: std::ops::RangeInclusive<usize>) -> Vec<FlankedParams> {
    let mut out = Vec::new();
    for r in r {
        for t in [1, 3, 5] {
            for c1 in [2, 4, 6] {
                for c2 in [2, 4, 6] {
                    for k in 0..=2 {
                        out.push(FlankedParams {
                            t,
                            r,
                            c1,
                            c2,
                            m1: k,
                            big_m2: k,
                        });
                    }
                }
            }
        }
    }
    out
}

fn c9_flanked() -> Verdict {
    let grid = flanked_grid(1..=3);
    let mut failures = Vec::new();
    for f in &grid {
        match build_flanked(f).and_then(|d| thinning::prop47_move(&d)) {
            Ok(o) if o.delta >= 8 * f.r as Width + 4 && o.passes() => {}
            Ok(o) => failures.push(format!("{}: delta {}", f.key(), o.delta)),
            Err(e) => failures.push(format!("{}: {e}", f.key())),
        }
    }
    ensure(failures.is_empty(), || {
        format!("{} failures, first {}", failures.len(), failures[0])
    })?;
    Ok(format!("{} instances, delta >= 8r + 4", grid.len()))
}

/// Every move's delta against the oracle's own width arithmetic.
fn check_moves(o: &ThinningOutcome) -> Result<usize, String> {
    let mut cur = o.trace.start.clone();
    for (i, mv) in o.trace.moves.iter().enumerate() {
        let next = mv.kind.apply(&cur).map_err(|e| e.to_string())?;
        let wa = width_of_kinds(cur.punctures_bottom, &cur.kinds()).ok_or("negative count")?;
        let wb = width_of_kinds(next.punctures_bottom, &next.kinds()).ok_or("negative count")?;
        ensure(wb - wa == mv.delta, || {
            format!(
                "{} move {i}: stored {} oracle {}",
                o.params,
                mv.delta,
                wb - wa
            )
        })?;
        cur = next;
    }
    Ok(o.trace.moves.len())
}

fn reordering_only(o: &ThinningOutcome) -> bool {
    o.trace.moves.iter().all(|m| {
        matches!(
            m.kind,
            MoveKind::TransposeAdjacent { .. } | MoveKind::BlockPastBlock { .. }
        )
    })
}

fn c10_oracle() -> Verdict {
    let mut moves = 0;
    let mut bounded = 0;
    let mut outcomes = 0;
    for (p, o) in pipeline_outcomes() {
        let Ok(o) = o else { continue };
        if o.before.len() > DEFAULT_BUDGET {
            continue;
        }
        moves += check_moves(o)?;
        outcomes += 1;
        let d = build_type_n(p).map_err(|e| e.to_string())?;
        let c = Constraints::from_diagram(&o.before, &d);
        let best = oracle_minimum(&o.before, &c, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        let q = best.presentation(&o.before);
        let r = q.thick_thin().map_err(|e| e.to_string())?;
        ensure(
            r.squares_width() == best.width && best.width <= o.w_before,
            || format!("{p}: oracle ordering"),
        )?;
        if reordering_only(o) {
            ensure(o.w_after >= best.width, || {
                format!("{p}: after {} below oracle {}", o.w_after, best.width)
            })?;
            bounded += 1;
        }
    }
    for f in flanked_grid(0..=3) {
        let d = build_flanked(&f).map_err(|e| e.to_string())?;
        let p = d.compile().map_err(|e| e.to_string())?;
        if p.len() > DEFAULT_BUDGET {
            continue;
        }
        let o = thinning::prop47_move(&d).map_err(|e| e.to_string())?;
        moves += check_moves(&o)?;
        outcomes += 1;
        let best = oracle_minimum(&p, &Constraints::from_diagram(&p, &d), DEFAULT_BUDGET)
            .map_err(|e| e.to_string())?;
        ensure(o.w_after >= best.width, || {
            format!(
                "{}: after {} below oracle {}",
                f.key(),
                o.w_after,
                best.width
            )
        })?;
        let r = best
            .presentation(&p)
            .thick_thin()
            .map_err(|e| e.to_string())?;
        ensure(r.squares_width() == best.width, || {
            format!("{}: oracle ordering identity", f.key())
        })?;
        bounded += 1;
    }
    ensure(outcomes > 0 && bounded > 0, || {
        "no instance within budget".to_string()
    })?;
    Ok(format!(
        "{outcomes} outcomes within {DEFAULT_BUDGET} events, {moves} move deltas matched, {bounded} reorderings above oracle minimum"
    ))
}

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Duration,
    run: fn() -> Verdict,
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion {
            id: 1,
            name: "width equals half the thick/thin squares difference",
            limit: Duration::from_secs(10),
            run: c1_squares_identity,
        },
        Criterion {
            id: 2,
            name: "tangle insertion width decomposition",
            limit: Duration::from_secs(5),
            run: c2_insertion_identity,
        },
        Criterion {
            id: 3,
            name: "adjacent transposition deltas",
            limit: Duration::from_secs(10),
            run: c3_transpositions,
        },
        Criterion {
            id: 4,
            name: "type-n constructor anchors",
            limit: Duration::from_secs(60),
            run: c4_anchors,
        },
        Criterion {
            id: 5,
            name: "fold script reduction bound",
            limit: Duration::from_secs(120),
            run: c5_fold,
        },
        Criterion {
            id: 6,
            name: "block script reduction bound",
            limit: Duration::from_secs(120),
            run: c6_block,
        },
        Criterion {
            id: 7,
            name: "pipeline reduction bound",
            limit: Duration::from_secs(300),
            run: c7_pipeline,
        },
        Criterion {
            id: 8,
            name: "connect-sum width inequality",
            limit: Duration::from_secs(300),
            run: c8_connect_sum,
        },
        Criterion {
            id: 9,
            name: "flanked tangle rearrangement bound",
            limit: Duration::from_secs(60),
            run: c9_flanked,
        },
        Criterion {
            id: 10,
            name: "oracle soundness",
            limit: Duration::from_secs(120),
            run: c10_oracle,
        },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let verdict = (c.run)();
        let took = start.elapsed();
        let (ok, detail) = match verdict {
            Ok(d) if took <= c.limit => (true, d),
            Ok(d) => (
                false,
                format!(
                    "{d}; took {:.2} s, limit {} s",
                    took.as_secs_f64(),
                    c.limit.as_secs()
                ),
            ),
            Err(d) => (false, d),
        };
        println!(
            "criterion {:>2} {} {:<52} {:>7.2} s  {}",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.name,
            took.as_secs_f64(),
            detail
        );
        if !ok {
            failed.push(c.id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
