//! Thinning isotopies as certified rewrite traces.
//!
//! Every outcome is re-derived from scratch: the trace is replayed, both
//! widths are recomputed from the compiled presentations, and closed forms
//! are compared against the recomputed delta rather than trusted.

use std::fmt;

use crate::error::{Error, Result};
use crate::families::{
    box_id, build_gen_g, build_type_n, split_composite, GenGParams, TemplateDiagram, TypeNParams,
};
use crate::morse::{CriticalEvent, EventKind, MorsePresentation, Owner, Width};
use crate::tangle::{self, Direction, Side};
use crate::trace::{MoveKind, RewriteTrace, TraceBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Hypothesis {
    Lemma32,
    Lemma34,
    Composite,
    Prop43,
    Prop44,
    Prop45,
    Prop47,
    /// Pipeline on an instance with every `s_i ≥ 3` for `i < n`.
    Thm35,
    /// Pipeline on an instance with some `s_i = 1` for `i < n`.
    Thm36,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 9] = [
        Hypothesis::Lemma32,
        Hypothesis::Lemma34,
        Hypothesis::Composite,
        Hypothesis::Prop43,
        Hypothesis::Prop44,
        Hypothesis::Prop45,
        Hypothesis::Prop47,
        Hypothesis::Thm35,
        Hypothesis::Thm36,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Hypothesis::Lemma32 => "lemma32",
            Hypothesis::Lemma34 => "lemma34",
            Hypothesis::Composite => "composite",
            Hypothesis::Prop43 => "prop43",
            Hypothesis::Prop44 => "prop44",
            Hypothesis::Prop45 => "prop45",
            Hypothesis::Prop47 => "prop47",
            Hypothesis::Thm35 => "thm35",
            Hypothesis::Thm36 => "thm36",
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Hypothesis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Hypothesis::ALL
            .iter()
            .copied()
            .find(|h| h.as_str() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown hypothesis {s:?}")))
    }
}

/// One applied script inside a longer run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub hypothesis: Hypothesis,
    pub params: String,
    pub delta: Width,
}

#[derive(Debug, Clone)]
pub struct ThinningOutcome {
    pub hypothesis: Hypothesis,
    pub params: String,
    pub before: MorsePresentation,
    pub after: MorsePresentation,
    pub trace: RewriteTrace,
    pub w_before: Width,
    pub w_after: Width,
    /// Width reduction, `w_before − w_after`.
    pub delta: Width,
    /// Guaranteed reduction when the hypothesis holds.
    pub bound: Option<Width>,
    /// Independent closed form for the reduction, where one exists.
    pub closed_form: Option<Width>,
    pub steps: Vec<Step>,
}

impl ThinningOutcome {
    pub fn passes(&self) -> bool {
        self.bound.is_none_or(|b| self.delta >= b)
    }

    fn certify(
        hypothesis: Hypothesis,
        params: String,
        trace: RewriteTrace,
        bound: Option<Width>,
        closed_form: Option<Width>,
        steps: Vec<Step>,
    ) -> Result<Self> {
        trace.verify()?;
        let before = trace.start.clone();
        let after = trace.end.clone();
        after.check_valid()?;
        let w_before = before.width_direct()?;
        let w_after = after.width_direct()?;
        let delta = w_before - w_after;
        if delta != -trace.total_delta {
            return Err(Error::Certification(format!(
                "{hypothesis} on {params}: recomputed reduction {delta} disagrees with trace total {}",
                trace.total_delta
            )));
        }
        Ok(ThinningOutcome {
            hypothesis,
            params,
            before,
            after,
            trace,
            w_before,
            w_after,
            delta,
            bound,
            closed_form,
            steps,
        })
    }
}

fn owners(d: &TemplateDiagram, p: impl Fn(usize, usize) -> bool) -> Vec<String> {
    d.boxes
        .iter()
        .filter(|b| {
            let rest = &b.id[1..];
            let (i, j) = rest.split_once(',').unwrap_or(("0", "0"));
            p(i.parse().unwrap_or(0), j.parse().unwrap_or(0))
        })
        .map(|b| b.id.clone())
        .collect()
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn repeat(kind: EventKind, owner: &str, n: usize) -> impl Iterator<Item = CriticalEvent> + '_ {
    std::iter::repeat_with(move || CriticalEvent::new(kind, owner)).take(n)
}

fn count_kinds(p: &MorsePresentation, owners: &[&str]) -> (usize, usize) {
    p.indices_of(owners)
        .iter()
        .fold((0, 0), |(m, big_m), &i| match p.events[i].kind {
            EventKind::Minimum => (m + 1, big_m),
            EventKind::Maximum => (m, big_m + 1),
        })
}

/// Folds `X(2,2)` and `X(2,1)` across the wrapping strand so the middle
/// tangle ends up beside that strand alone.
///
/// When the middle tangle is balanced it is excised first and re-inserted at
/// the new `1 + s_{2,2}` level; otherwise it is carried through the rewrite.
fn fold_outer(g: &GenGParams) -> Result<RewriteTrace> {
    if g.n < 2 {
        return Err(Error::Hypothesis("the fold needs n ≥ 2".into()));
    }
    let d = build_gen_g(g)?;
    let before = d.compile()?;
    let mut b = TraceBuilder::new(before)?;
    let middle = owners(&d, |i, _| i >= 3);
    let balanced = g.s(2, 1) == g.s(2, 2);
    let mut held = None;
    if !middle.is_empty() && balanced {
        let (_, t, _) = tangle::excise_tangle(b.current(), &refs(&middle), g.s(2, 2))?;
        b.push(MoveKind::Excise {
            owners: middle.clone(),
            bottom_punctures: g.s(2, 2),
        })?;
        held = Some(t);
    }
    let (x22, x21) = (box_id(2, 2), box_id(2, 1));
    let r22 = b.current().contiguous_range(&[&x22])?;
    let r21 = b.current().contiguous_range(&[&x21])?;
    b.push(MoveKind::ExtractStrand {
        owner: x22.clone(),
        side: Side::Bottom,
    })?;
    b.push(MoveKind::ExtractStrand {
        owner: x21.clone(),
        side: Side::Top,
    })?;

    let (m2, big_m2) = count_kinds(&d.compile()?, &[&x22]);
    let (m1, big_m1) = count_kinds(&d.compile()?, &[&x21]);
    let outer = g.s(1, 1) + g.s(1, 2);
    if !outer.is_multiple_of(2) {
        return Err(Error::Hypothesis("s_{1,1} + s_{1,2} must be even".into()));
    }
    let half = outer / 2;
    let mut events: Vec<CriticalEvent> = repeat(EventKind::Minimum, &x22, m2 - 1)
        .chain(repeat(
            EventKind::Maximum,
            &x22,
            (big_m2 + half).saturating_sub(1),
        ))
        .collect();
    let insert_at = r22.start + events.len();
    events.extend_from_slice(&b.current().events[r22.end..r21.start]);
    events.extend(repeat(
        EventKind::Minimum,
        &x21,
        (m1 + half).saturating_sub(1),
    ));
    events.extend(repeat(EventKind::Maximum, &x21, big_m1 - 1));
    b.push(MoveKind::Rewrite {
        range: r22.start..r21.end,
        events,
        note: "fold-over-wrapping-strand".into(),
    })?;
    if let Some(t) = held {
        let w = b.current().count_at(insert_at);
        if w != 1 + g.s(2, 2) as Width {
            return Err(Error::Certification(format!(
                "re-insertion level carries {w} strands, expected {}",
                1 + g.s(2, 2)
            )));
        }
        b.push(MoveKind::Insert {
            level: insert_at,
            tangle: t,
        })?;
    }
    Ok(b.finish())
}

/// Block-move script at depth `k`: lower `X(k,1)` past everything between
/// it and `X(k+1,2)`, then raise `X(k,2)` past everything between it and
/// `X(k+1,1)`. Returns the trace and the closed-form reduction.
fn swap_script(
    d: &TemplateDiagram,
    n: usize,
    k: usize,
) -> Result<(RewriteTrace, Width, SwapCounts)> {
    if k < 2 || k + 1 > n {
        return Err(Error::Hypothesis(format!(
            "block script depth {k} needs 2 ≤ k < n = {n}"
        )));
    }
    let before = d.compile()?;
    let mut b = TraceBuilder::new(before.clone())?;
    let (xk1, xk2) = (box_id(k, 1), box_id(k, 2));
    let (yk1, yk2) = (box_id(k + 1, 1), box_id(k + 1, 2));

    let between = |p: &MorsePresentation, lo: &str, hi: &str| -> Result<Vec<String>> {
        let a = p.contiguous_range(&[lo])?;
        let c = p.contiguous_range(&[hi])?;
        let mut v: Vec<String> = Vec::new();
        for e in &p.events[a.end..c.start] {
            let o = e.owner.as_str().to_string();
            if !v.contains(&o) {
                v.push(o);
            }
        }
        Ok(v)
    };

    let t1 = between(b.current(), &yk2, &xk1)?;
    let mv = tangle::move_block_past(b.current(), &[&xk1], &refs(&t1), Direction::Lower, Some(d))?;
    let (m1, big_m1) = count_kinds(b.current(), &[&xk1]);
    let (mt1, big_mt1) = count_kinds(b.current(), &refs(&t1));
    b.push(MoveKind::BlockPastBlock {
        direction: Direction::Lower,
        block: vec![xk1.clone()],
        past: t1.clone(),
    })?;
    debug_assert_eq!(&mv.presentation, b.current());

    let past = between(b.current(), &xk2, &yk1)?;
    tangle::move_block_past(
        b.current(),
        &[&xk2],
        &refs(&past),
        Direction::Raise,
        Some(d),
    )?;
    let t2: Vec<String> = past.iter().filter(|o| **o != xk1).cloned().collect();
    let (m2, big_m2) = count_kinds(b.current(), &[&xk2]);
    let (mt2, big_mt2) = count_kinds(b.current(), &refs(&t2));
    b.push(MoveKind::BlockPastBlock {
        direction: Direction::Raise,
        block: vec![xk2.clone()],
        past,
    })?;

    let c = SwapCounts {
        m1,
        big_m1,
        m2,
        big_m2,
        mt1,
        big_mt1,
        mt2,
        big_mt2,
    };
    Ok((b.finish(), c.six_term(), c))
}

/// Critical point counts entering the block-move closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapCounts {
    pub m1: usize,
    pub big_m1: usize,
    pub m2: usize,
    pub big_m2: usize,
    pub mt1: usize,
    pub big_mt1: usize,
    pub mt2: usize,
    pub big_mt2: usize,
}

impl SwapCounts {
    /// `−4m₁M_{T₁} + 4M₁m_{T₁} − 4M₂m_{T₂} + 4m₂M_{T₂} − 4M₂m₁ + 4m₂M₁`.
    pub fn six_term(&self) -> Width {
        let [m1, big_m1, m2, big_m2, mt1, big_mt1, mt2, big_mt2] = [
            self.m1,
            self.big_m1,
            self.m2,
            self.big_m2,
            self.mt1,
            self.big_mt1,
            self.mt2,
            self.big_mt2,
        ]
        .map(|x| x as Width);
        -4 * m1 * big_mt1 + 4 * big_m1 * mt1 - 4 * big_m2 * mt2 + 4 * m2 * big_mt2 - 4 * big_m2 * m1
            + 4 * m2 * big_m1
    }

    /// `2(m₁+m₂)(s₁−s₃) + 2(s₁+s₂)(m_{T₁}+m_{T₂})`.
    pub fn two_term(&self, s1: usize, s2: usize, s3: usize) -> Width {
        let (s1, s2, s3) = (s1 as Width, s2 as Width, s3 as Width);
        2 * (self.m1 + self.m2) as Width * (s1 - s3)
            + 2 * (s1 + s2) * (self.mt1 + self.mt2) as Width
    }
}

fn all_at_least_three(params: &TypeNParams) -> bool {
    params.s[..params.n - 1].iter().all(|&s| s >= 3)
}

pub fn lemma32_hypothesis(params: &TypeNParams) -> bool {
    params.n >= 3 && all_at_least_three(params) && params.s(1) <= params.s(3)
}

pub fn lemma34_hypothesis(params: &TypeNParams) -> bool {
    params.n >= 3 && all_at_least_three(params) && params.s(1) >= params.s(3)
}

pub fn lemma32_bound(n: usize) -> Width {
    18 + 36 * (n as Width - 3)
}

pub fn lemma34_bound(n: usize) -> Width {
    (72 * n as Width - 204).max(36)
}

/// Event count of the middle tangle `X(3,·) … X(n,·)`.
pub fn middle_events(params: &TypeNParams) -> usize {
    (3..=params.n)
        .map(|i| params.left_box(i).events() + params.right_box(i).events())
        .sum()
}

/// `2(a+s₁) + 2(b+s₁) − 2s₁² − 2s₁s₂ − 2s₁ + 2rs₁`.
pub fn lemma32_equality_line(params: &TypeNParams) -> Width {
    let (a, b) = (params.a() as Width, params.b() as Width);
    let (s1, s2) = (params.s(1) as Width, params.s(2) as Width);
    let r = middle_events(params) as Width;
    2 * (a + s1) + 2 * (b + s1) - 2 * s1 * s1 - 2 * s1 * s2 - 2 * s1 + 2 * r * s1
}

/// Thins `K^n` toward a type-(n−1) diagram. Runs for any `n ≥ 2`; the bound
/// is only claimed under the lemma's hypothesis.
pub fn reduce_n_minus_1(params: &TypeNParams) -> Result<ThinningOutcome> {
    params.validate()?;
    let trace = fold_outer(&params.as_gen_g())?;
    let bound = lemma32_hypothesis(params).then(|| lemma32_bound(params.n));
    let closed = (params.n >= 3).then(|| lemma32_equality_line(params));
    let out = ThinningOutcome::certify(
        Hypothesis::Lemma32,
        params.key(),
        trace,
        bound,
        closed,
        vec![],
    )?;
    Ok(with_step(out))
}

/// Thins `K^n` toward a type-(n−2) diagram with two block moves.
pub fn reduce_n_minus_2(params: &TypeNParams) -> Result<ThinningOutcome> {
    params.validate()?;
    if params.n < 3 {
        return Err(Error::Hypothesis("the block script needs n > 2".into()));
    }
    let d = build_type_n(params)?;
    let (trace, six, counts) = swap_script(&d, params.n, 2)?;
    let two = counts.two_term(params.s(1), params.s(2), params.s(3));
    if six != two {
        return Err(Error::Certification(format!(
            "{}: six-term form {six} differs from substituted form {two}",
            params.key()
        )));
    }
    let bound = lemma34_hypothesis(params).then(|| lemma34_bound(params.n));
    let out = ThinningOutcome::certify(
        Hypothesis::Lemma34,
        params.key(),
        trace,
        bound,
        Some(six),
        vec![],
    )?;
    if out.delta != six {
        return Err(Error::Certification(format!(
            "{}: trace reduction {} differs from closed form {six}",
            params.key(),
            out.delta
        )));
    }
    Ok(with_step(out))
}

fn with_step(mut o: ThinningOutcome) -> ThinningOutcome {
    o.steps = vec![Step {
        hypothesis: o.hypothesis,
        params: o.params.clone(),
        delta: o.delta,
    }];
    o
}

fn prefix_owners(p: &MorsePresentation, prefix: &str) -> MorsePresentation {
    let mut q = p.clone();
    for e in &mut q.events {
        e.owner = Owner::new(format!("{prefix}{}", e.owner.as_str()));
    }
    q
}

/// Parameters of the smaller type diagram reached by a script, when the
/// result is again that diagram up to owner labels.
fn successor(params: &TypeNParams, hyp: Hypothesis) -> Option<TypeNParams> {
    let n = params.n;
    let (drop, y12_max, y11_min) = match hyp {
        Hypothesis::Lemma32 if n >= 3 => {
            let x22 = params.right_box(2);
            let x21 = params.left_box(2);
            let half = params.s(1);
            (
                1,
                params.right_maxima[0] + x22.maxima + half - 1,
                params.left_minima[0] + x21.minima + half - 1,
            )
        }
        Hypothesis::Lemma34 if n >= 4 => {
            let x21 = params.left_box(2);
            let x22 = params.right_box(2);
            (
                2,
                params.right_maxima[0] + params.right_maxima[2] + x21.maxima,
                params.left_minima[0] + params.left_minima[2] + x22.minima,
            )
        }
        _ => return None,
    };
    let mut left_minima = vec![y11_min];
    left_minima.extend_from_slice(&params.left_minima[drop + 1..]);
    let mut right_maxima = vec![y12_max];
    right_maxima.extend_from_slice(&params.right_maxima[drop + 1..]);
    Some(TypeNParams {
        n: n - drop,
        s: params.s[drop..].to_vec(),
        left_minima,
        right_maxima,
    })
}

fn summand_outcome(params: &TypeNParams) -> Result<Option<ThinningOutcome>> {
    let some_one = params.s[..params.n.saturating_sub(1)].contains(&1);
    if (params.n >= 3) || (params.n == 2 && some_one) {
        thin_pipeline(params).map(Some)
    } else {
        Ok(None)
    }
}

/// Splits `K^n` along `s_p = 1`, thins each summand, and re-assembles the
/// thinned summands as a connect sum.
pub fn composite_reduction(params: &TypeNParams, p: usize) -> Result<ThinningOutcome> {
    let split = split_composite(params, p)?;
    let before = build_type_n(params)?.compile()?;
    let mut b = TraceBuilder::new(before)?;
    b.push(MoveKind::Excise {
        owners: split.owners.clone(),
        bottom_punctures: 1,
    })?;
    let mut steps = Vec::new();
    if let Some(o) = summand_outcome(&split.kp)? {
        b.extend(&o.trace)?;
        steps.extend(o.steps);
    }
    let kq_after = match summand_outcome(&split.kq)? {
        Some(o) => {
            steps.extend(o.steps.iter().map(|s| Step {
                params: format!("q:{}", s.params),
                ..s.clone()
            }));
            o.after
        }
        None => build_type_n(&split.kq)?.compile()?,
    };
    let kq_after = prefix_owners(&kq_after, "q");
    let opened = MorsePresentation::new(1, 1, kq_after.events[1..kq_after.len() - 1].to_vec());
    if !opened.is_empty() {
        b.push(MoveKind::Insert {
            level: 1,
            tangle: opened,
        })?;
    }
    let n = params.n as Width;
    let bound = Some(2 * n * n - 2);
    let mut out = ThinningOutcome::certify(
        Hypothesis::Composite,
        params.key(),
        b.finish(),
        bound,
        None,
        vec![],
    )?;
    let dp: Width = steps
        .iter()
        .filter(|s| !s.params.starts_with("q:"))
        .map(|s| s.delta)
        .sum();
    let dq: Width = steps
        .iter()
        .filter(|s| s.params.starts_with("q:"))
        .map(|s| s.delta)
        .sum();
    let l = split.l;
    let expected = dp + dq + (l + 1) * split.r as Width + 2;
    if out.delta != expected {
        return Err(Error::Certification(format!(
            "{}: composite reduction {} differs from dp + dq + (l+1)r + 2 = {expected}",
            params.key(),
            out.delta
        )));
    }
    out.closed_form = Some(expected);
    steps.push(Step {
        hypothesis: Hypothesis::Composite,
        params: format!("split p={p} l={l} r={}", split.r),
        delta: (l + 1) * split.r as Width + 2,
    });
    out.steps = steps;
    Ok(out)
}

/// The induction: composite split when some `s_i = 1` (`i < n`), otherwise
/// the block script when `s₁ ≥ s₃` and the fold when `s₁ < s₃`, repeated as
/// long as the result is again a type diagram.
pub fn thin_pipeline(params: &TypeNParams) -> Result<ThinningOutcome> {
    params.validate()?;
    let n = params.n;
    let some_one = params.s[..n.saturating_sub(1)].contains(&1);
    if n < 3 && !(n == 2 && some_one) {
        return Err(Error::Hypothesis(format!(
            "{}: the pipeline needs n > 2",
            params.key()
        )));
    }
    let nn = n as Width;
    let (hyp, bound) = if some_one {
        (Hypothesis::Thm36, 2 * nn * nn - 2)
    } else {
        (Hypothesis::Thm35, 2 * nn * nn)
    };

    let start = build_type_n(params)?.compile()?;
    let mut b = TraceBuilder::new(start)?;
    let mut steps = Vec::new();
    let mut cur = params.clone();
    loop {
        let cur_some_one = cur.s[..cur.n - 1].contains(&1);
        let out = if cur_some_one {
            let p = cur.s[..cur.n - 1].iter().position(|&s| s == 1).unwrap() + 1;
            composite_reduction(&cur, p)?
        } else if cur.n >= 3 && cur.s(1) >= cur.s(3) {
            reduce_n_minus_2(&cur)?
        } else if cur.n >= 3 {
            reduce_n_minus_1(&cur)?
        } else {
            break;
        };
        b.extend(&out.trace)?;
        steps.extend(out.steps.clone());
        let next = match successor(&cur, out.hypothesis) {
            Some(x) => x,
            None => break,
        };
        let target = build_type_n(&next)?.compile()?;
        if target.kinds() != b.current().kinds() {
            log::debug!(
                "{}: result is not a bridge-position {}",
                cur.key(),
                next.key()
            );
            break;
        }
        let len = b.current().len();
        b.push(MoveKind::Rewrite {
            range: 0..len,
            events: target.events,
            note: "relabel".into(),
        })?;
        let continues = next.n >= 3 || (next.n == 2 && next.s[0] == 1);
        cur = next;
        if !continues {
            break;
        }
    }
    ThinningOutcome::certify(hyp, params.key(), b.finish(), Some(bound), None, steps)
}

/// The rearrangement of the flanked configuration: lower `X(2,1)` past the
/// tangle `T`, then raise `X(2,2)` past both.
pub fn prop47_move(d: &TemplateDiagram) -> Result<ThinningOutcome> {
    let ids = d.box_ids();
    let (x12, x22, x21, x11) = (box_id(1, 2), box_id(2, 2), box_id(2, 1), box_id(1, 1));
    let n = ids.len();
    if n < 4 || ids[0] != x12 || ids[1] != x22 || ids[n - 2] != x21 || ids[n - 1] != x11 {
        return Err(Error::Hypothesis(
            "expected X(1,2), X(2,2), T…, X(2,1), X(1,1) bottom to top".into(),
        ));
    }
    let t: Vec<String> = d.boxes[2..n - 2]
        .iter()
        .filter(|b| b.events() > 0)
        .map(|b| b.id.clone())
        .collect();
    let before = d.compile()?;
    let r = if t.is_empty() {
        0
    } else {
        let range = before.contiguous_range(&refs(&t))?;
        let net = before.count_at(range.end) - before.count_at(range.start);
        if net != 0 {
            return Err(Error::Hypothesis(format!(
                "tangle T changes the strand count by {net}; it must have equal strands above and below"
            )));
        }
        count_kinds(&before, &refs(&t)).1
    };
    let mut b = TraceBuilder::new(before)?;
    if !t.is_empty() {
        tangle::move_block_past(b.current(), &[&x21], &refs(&t), Direction::Lower, Some(d))?;
        b.push(MoveKind::BlockPastBlock {
            direction: Direction::Lower,
            block: vec![x21.clone()],
            past: t.clone(),
        })?;
    }
    let mut past = vec![x21.clone()];
    past.extend(t.iter().cloned());
    tangle::move_block_past(
        b.current(),
        &[&x22],
        &refs(&past),
        Direction::Raise,
        Some(d),
    )?;
    b.push(MoveKind::BlockPastBlock {
        direction: Direction::Raise,
        block: vec![x22],
        past,
    })?;
    let bound = (r > 0).then(|| 8 * r as Width + 4);
    let key = format!("flanked boxes={} r={r}", ids.join("/"));
    ThinningOutcome::certify(Hypothesis::Prop47, key, b.finish(), bound, None, vec![])
        .map(with_step)
}

pub fn prop43_hypothesis(g: &GenGParams) -> bool {
    g.n >= 3 && g.s(1, 1) + g.s(1, 2) <= g.s(3, 1) + g.s(3, 2)
}

pub fn prop44_hypothesis(g: &GenGParams) -> bool {
    g.n >= 3 && g.s(1, 1) >= g.s(3, 2) && g.s(1, 2) >= g.s(3, 1)
}

/// The unique strict minimum `s_{i,j}` with `i ≥ 3`, if there is one. Only
/// `s_{n,1}` is used for `i = n`, since `N` carries the first column.
pub fn prop45_minimum(g: &GenGParams) -> Option<(usize, usize)> {
    let mut cells: Vec<((usize, usize), usize)> = Vec::new();
    for i in 1..=g.n {
        cells.push(((i, 1), g.s(i, 1)));
        if i < g.n {
            cells.push(((i, 2), g.s(i, 2)));
        }
    }
    let min = cells.iter().map(|c| c.1).min()?;
    let at: Vec<_> = cells.iter().filter(|c| c.1 == min).collect();
    match at.as_slice() {
        [(ij, _)] if ij.0 >= 3 && g.n >= 3 => Some(*ij),
        _ => None,
    }
}

/// Generalized scripts on `K^n_g`: the fold for `prop43`, the block script
/// at depth 2 for `prop44`, and the block script one level above the minimal
/// bundle for `prop45`. Only strict thinning is claimed.
pub fn gen_reduce(g: &GenGParams, mode: Hypothesis) -> Result<ThinningOutcome> {
    let d = build_gen_g(g)?;
    let (trace, held, closed) = match mode {
        Hypothesis::Prop43 => (fold_outer(g)?, prop43_hypothesis(g), None),
        Hypothesis::Prop44 => {
            let (t, six, _) = swap_script(&d, g.n, 2)?;
            (t, prop44_hypothesis(g), Some(six))
        }
        Hypothesis::Prop45 => {
            let (i, _) = prop45_minimum(g).ok_or_else(|| {
                Error::Hypothesis(format!(
                    "{}: no unique minimal bundle below level 2",
                    g.key()
                ))
            })?;
            let (t, six, _) = swap_script(&d, g.n, i - 1)?;
            (t, true, Some(six))
        }
        other => {
            return Err(Error::Unsupported(format!(
                "{other} is not a generalized script"
            )))
        }
    };
    if !held {
        return Err(Error::Hypothesis(format!(
            "{} does not satisfy {mode}",
            g.key()
        )));
    }
    let out = ThinningOutcome::certify(mode, g.key(), trace, Some(1), closed, vec![])?;
    if let Some(c) = closed {
        if c != out.delta {
            return Err(Error::Certification(format!(
                "{}: closed form {c} differs from trace reduction {}",
                g.key(),
                out.delta
            )));
        }
    }
    Ok(with_step(out))
}
