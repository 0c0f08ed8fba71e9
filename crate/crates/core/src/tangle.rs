//! Width-tracked operations on presentations: adjacent transpositions,
//! block moves, tangle excision and insertion, strand extraction and the
//! connect-sum splice.

use crate::error::{Error, Result};
use crate::families::TemplateDiagram;
use crate::morse::{CriticalEvent, EventKind, MorsePresentation, Owner, Width};
use crate::trace::{MoveKind, RewriteTrace, TraceBuilder};

/// Swaps events `i` and `i + 1`, returning the new presentation and the
/// recomputed width change.
///
/// A maximum raised above a minimum costs `+4`, the reverse saves `4`, and
/// events of the same kind commute for free.
pub fn transpose_adjacent(p: &MorsePresentation, i: usize) -> Result<(MorsePresentation, Width)> {
    if i + 1 >= p.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: p.len(),
        });
    }
    p.check_structure()?;
    let mut q = p.clone();
    q.events.swap(i, i + 1);
    let below = p.count_at(i);
    if below + q.events[i].kind.step() < 0 {
        return Err(Error::NegativeCount { level: i + 1 });
    }
    let delta = q.width_unchecked() - p.width_unchecked();
    Ok((q, delta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Move the block down past the block directly beneath it.
    Lower,
    /// Move the block up past the block directly above it.
    Raise,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Lower => "lower",
            Direction::Raise => "raise",
        }
    }
}

/// Result of [`move_block_past`].
#[derive(Debug, Clone)]
pub struct BlockMove {
    pub presentation: MorsePresentation,
    /// Full recomputed width change.
    pub delta: Width,
    pub transpositions: usize,
    /// Sum of the individual transposition deltas.
    pub transposition_sum: Width,
    /// `4(m_A·M_B − M_A·m_B)` for lowering, negated for raising.
    pub closed_form: Width,
}

/// Closed-form width change for moving a block with `(m_a, max_a)` critical
/// points past one with `(m_b, max_b)`.
pub fn block_delta_closed_form(
    direction: Direction,
    (m_a, max_a): (usize, usize),
    (m_b, max_b): (usize, usize),
) -> Width {
    let lower = 4 * (m_a * max_b) as Width - 4 * (max_a * m_b) as Width;
    match direction {
        Direction::Lower => lower,
        Direction::Raise => -lower,
    }
}

/// Relocates the events owned by `block` past the adjacent events owned by
/// `past`, one transposition at a time.
///
/// The move is only a vertical isotopy when no bundle joins the two blocks.
/// With a `diagram` that is checked; without one the caller's word is taken
/// and the skipped check is logged at debug level.
pub fn move_block_past(
    p: &MorsePresentation,
    block: &[&str],
    past: &[&str],
    direction: Direction,
    diagram: Option<&TemplateDiagram>,
) -> Result<BlockMove> {
    p.check_structure()?;
    let a = p.contiguous_range(block)?;
    let b = p.contiguous_range(past)?;
    let adjacent = match direction {
        Direction::Lower => b.end == a.start,
        Direction::Raise => a.end == b.start,
    };
    if !adjacent {
        return Err(Error::Interleaved(block.join(";"), past.join(";")));
    }
    match diagram {
        Some(d) => {
            if let Some((x, y)) = d.bundle_between(block, past) {
                return Err(Error::Hypothesis(format!(
                    "bundle joins {x} and {y}; moving {} past {} is not a vertical isotopy",
                    block.join(";"),
                    past.join(";")
                )));
            }
        }
        None => log::debug!(
            "moving {} past {} without a diagram; bundle disjointness not checked",
            block.join(";"),
            past.join(";")
        ),
    }

    let count = |r: &std::ops::Range<usize>| {
        let m = p.events[r.clone()]
            .iter()
            .filter(|e| e.kind == EventKind::Minimum)
            .count();
        (m, r.len() - m)
    };
    let closed_form = block_delta_closed_form(direction, count(&a), count(&b));

    let mut events = p.events.clone();
    let mut counts = p.level_counts();
    let mut sum = 0;
    let mut swaps = 0;
    let mut swap =
        |events: &mut Vec<CriticalEvent>, counts: &mut Vec<Width>, i: usize| -> Result<()> {
            events.swap(i, i + 1);
            let new = counts[i] + events[i].kind.step();
            if new < 0 {
                return Err(Error::NegativeCount { level: i + 1 });
            }
            sum += new - counts[i + 1];
            counts[i + 1] = new;
            swaps += 1;
            Ok(())
        };
    match direction {
        Direction::Lower => {
            for j in 0..a.len() {
                let mut pos = a.start + j;
                let target = b.start + j;
                while pos > target {
                    swap(&mut events, &mut counts, pos - 1)?;
                    pos -= 1;
                }
            }
        }
        Direction::Raise => {
            for j in 0..a.len() {
                let mut pos = a.end - 1 - j;
                let target = b.end - 1 - j;
                while pos < target {
                    swap(&mut events, &mut counts, pos)?;
                    pos += 1;
                }
            }
        }
    }
    let q = MorsePresentation::new(p.punctures_bottom, p.punctures_top, events);
    let delta = q.width_unchecked() - p.width_unchecked();
    if delta != sum || delta != closed_form {
        return Err(Error::Certification(format!(
            "block move delta {delta}, transposition sum {sum}, closed form {closed_form}"
        )));
    }
    Ok(BlockMove {
        presentation: q,
        delta,
        transpositions: swaps,
        transposition_sum: sum,
        closed_form,
    })
}

/// Where a tangle sits inside a host presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsertionContext {
    pub host: MorsePresentation,
    /// Number of host events below the splice level.
    pub level_index: usize,
    /// Host strand count at the splice level.
    pub w_p: Width,
    /// Strands passing beside the tangle.
    pub l: Width,
    /// Event count of the tangle.
    pub r: usize,
}

impl InsertionContext {
    pub fn new(
        host: &MorsePresentation,
        level_index: usize,
        t: &MorsePresentation,
    ) -> Result<Self> {
        host.check_structure()?;
        if level_index > host.len() {
            return Err(Error::IndexOutOfRange {
                index: level_index,
                len: host.len(),
            });
        }
        let w_p = host.count_at(level_index);
        let bottom = t.punctures_bottom as Width;
        if bottom > w_p {
            return Err(Error::PunctureMismatch(format!(
                "tangle has {bottom} bottom punctures but the level carries {w_p} strands"
            )));
        }
        if t.punctures_top != t.punctures_bottom {
            return Err(Error::PunctureMismatch(format!(
                "tangle top punctures {} must equal bottom punctures {} to resume the host",
                t.punctures_top, t.punctures_bottom
            )));
        }
        Ok(InsertionContext {
            host: host.clone(),
            level_index,
            w_p,
            l: w_p - bottom,
            r: t.len(),
        })
    }
}

/// Splices `t` into the host at the context's level with `l` strands passing
/// beside it. For `r ≥ 1` the result has width
/// `w(host) + w(t) + l(r − 1) + w_P`.
pub fn insert_tangle(ctx: &InsertionContext, t: &MorsePresentation) -> Result<MorsePresentation> {
    t.check_structure()?;
    ctx.host.check_structure()?;
    if ctx.level_index > ctx.host.len() || ctx.host.count_at(ctx.level_index) != ctx.w_p {
        return Err(Error::PunctureMismatch(format!(
            "context level {} does not carry {} strands",
            ctx.level_index, ctx.w_p
        )));
    }
    if ctx.w_p - ctx.l != t.punctures_bottom as Width {
        return Err(Error::PunctureMismatch(format!(
            "w(P) − l = {} but the tangle has {} bottom punctures",
            ctx.w_p - ctx.l,
            t.punctures_bottom
        )));
    }
    if t.punctures_top as Width + ctx.l != ctx.w_p {
        return Err(Error::PunctureMismatch(format!(
            "above the tangle {} + {} strands resume, host expects {}",
            t.punctures_top, ctx.l, ctx.w_p
        )));
    }
    if ctx.r != t.len() {
        return Err(Error::PunctureMismatch(format!(
            "context expects {} events, tangle has {}",
            ctx.r,
            t.len()
        )));
    }
    let mut events = Vec::with_capacity(ctx.host.len() + t.len());
    events.extend_from_slice(&ctx.host.events[..ctx.level_index]);
    events.extend_from_slice(&t.events);
    events.extend_from_slice(&ctx.host.events[ctx.level_index..]);
    Ok(MorsePresentation::new(
        ctx.host.punctures_bottom,
        ctx.host.punctures_top,
        events,
    ))
}

/// Cuts the contiguous events owned by `owners` out of `p`.
///
/// The event model cannot tell the tangle's own strands from those passing
/// beside it, so the caller names the tangle's bottom puncture count.
pub fn excise_tangle(
    p: &MorsePresentation,
    owners: &[&str],
    bottom_punctures: usize,
) -> Result<(MorsePresentation, MorsePresentation, InsertionContext)> {
    p.check_structure()?;
    let range = p.contiguous_range(owners)?;
    let w_p = p.count_at(range.start);
    if bottom_punctures as Width > w_p {
        return Err(Error::PunctureMismatch(format!(
            "{bottom_punctures} bottom punctures exceed the {w_p} strands at the cut"
        )));
    }
    let tangle_events = p.events[range.clone()].to_vec();
    let net: Width = tangle_events.iter().map(|e| e.kind.step()).sum();
    if net != 0 {
        return Err(Error::PunctureMismatch(format!(
            "levels below and above {} differ by {net}; excision needs equal widths",
            owners.join(";")
        )));
    }
    let t = MorsePresentation::new(bottom_punctures, bottom_punctures, tangle_events);
    t.check_structure()?;
    let mut host_events = p.events[..range.start].to_vec();
    host_events.extend_from_slice(&p.events[range.end..]);
    let host = MorsePresentation::new(p.punctures_bottom, p.punctures_top, host_events);
    if p.is_knot() && p.is_valid() {
        host.check_valid()?;
    } else {
        host.check_structure()?;
    }
    let ctx = InsertionContext {
        host: host.clone(),
        level_index: range.start,
        w_p,
        l: w_p - bottom_punctures as Width,
        r: t.len(),
    };
    Ok((host, t, ctx))
}

/// `w(K/T) + w(T) + l(r − 1) + w(P)`.
pub fn lemma22_width(w_kt: Width, w_t: Width, l: Width, r: Width, w_p: Width) -> Width {
    w_kt + w_t + l * (r - 1) + w_p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Strands leave the box through its bottom; the extracted arc carries
    /// the box's highest maximum.
    Top,
    /// Mirror image: strands leave through the top; the extracted arc
    /// carries the lowest minimum.
    Bottom,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Top => "top",
            Side::Bottom => "bottom",
        }
    }
}

/// Pulls a single-maximum arc out of a braid box whose strands all leave
/// through its bottom. The arc's maximum is relabelled `free`; the kinds and
/// order of events are untouched, so width does not change.
pub fn extract_strand(
    p: &MorsePresentation,
    box_id: &str,
) -> Result<(MorsePresentation, RewriteTrace)> {
    extract_strand_side(p, box_id, Side::Top)
}

pub fn extract_strand_side(
    p: &MorsePresentation,
    box_id: &str,
    side: Side,
) -> Result<(MorsePresentation, RewriteTrace)> {
    let mut tb = TraceBuilder::new(p.clone())?;
    tb.push(MoveKind::ExtractStrand {
        owner: box_id.to_string(),
        side,
    })?;
    let trace = tb.finish();
    Ok((trace.end.clone(), trace))
}

pub(crate) fn apply_extract(
    p: &MorsePresentation,
    box_id: &str,
    side: Side,
) -> Result<MorsePresentation> {
    p.check_structure()?;
    let range = p.contiguous_range(&[box_id])?;
    let kinds: Vec<EventKind> = p.events[range.clone()].iter().map(|e| e.kind).collect();
    let bridge = kinds
        .windows(2)
        .all(|w| !(w[0] == EventKind::Maximum && w[1] == EventKind::Minimum));
    if !bridge {
        return Err(Error::Hypothesis(format!(
            "box {box_id} is not in bridge position"
        )));
    }
    let (idx, wanted) = match side {
        Side::Top => (range.end - 1, EventKind::Maximum),
        Side::Bottom => (range.start, EventKind::Minimum),
    };
    if p.events[idx].kind != wanted {
        return Err(match side {
            Side::Top => Error::NoMaximum(box_id.to_string()),
            Side::Bottom => Error::Hypothesis(format!("box {box_id} has no minimum to extract")),
        });
    }
    let mut q = p.clone();
    q.events[idx].owner = Owner::free();
    Ok(q)
}

/// Connect sum by splicing: `k2` is opened by deleting its first and last
/// event and the resulting one-strand tangle is inserted just above the
/// first event of `k1`, beside one passing strand. The width of the result
/// is exactly `w(k1) + w(k2) − 2`.
pub fn connect_sum(k1: &MorsePresentation, k2: &MorsePresentation) -> Result<MorsePresentation> {
    for k in [k1, k2] {
        if !k.is_knot() {
            return Err(Error::Unsupported(
                "connect sum needs knot presentations".into(),
            ));
        }
        k.check_valid()?;
    }
    let n = k2.len();
    let opened = MorsePresentation::new(1, 1, k2.events[1..n - 1].to_vec());
    if opened.is_empty() {
        return Ok(k1.clone());
    }
    let ctx = InsertionContext::new(k1, 1, &opened)?;
    insert_tangle(&ctx, &opened)
}
