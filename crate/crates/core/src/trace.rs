//! Certified rewrite traces.
//!
//! A trace records a start presentation, a list of moves and the end
//! presentation. Each move's delta is obtained by applying the move and
//! recomputing both widths; [`RewriteTrace::verify`] replays the whole
//! trace from scratch and rejects any stored delta that disagrees.

use std::fmt::Write as _;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::morse::{parse_event, CriticalEvent, MorsePresentation, Width};
use crate::tangle::{self, Direction, InsertionContext, Side};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MoveKind {
    TransposeAdjacent {
        index: usize,
    },
    BlockPastBlock {
        direction: Direction,
        block: Vec<String>,
        past: Vec<String>,
    },
    ExtractStrand {
        owner: String,
        side: Side,
    },
    /// Removes a tangle; the presentation becomes the host `K/T`.
    Excise {
        owners: Vec<String>,
        bottom_punctures: usize,
    },
    Insert {
        level: usize,
        tangle: MorsePresentation,
    },
    /// Replaces a contiguous event range. Used for the parts of an isotopy
    /// that change the critical point count.
    Rewrite {
        range: Range<usize>,
        events: Vec<CriticalEvent>,
        note: String,
    },
}

impl MoveKind {
    pub fn name(&self) -> &'static str {
        match self {
            MoveKind::TransposeAdjacent { .. } => "transpose",
            MoveKind::BlockPastBlock { .. } => "block",
            MoveKind::ExtractStrand { .. } => "extract",
            MoveKind::Excise { .. } => "excise",
            MoveKind::Insert { .. } => "insert",
            MoveKind::Rewrite { .. } => "rewrite",
        }
    }

    /// Applies the move without any bookkeeping.
    pub fn apply(&self, p: &MorsePresentation) -> Result<MorsePresentation> {
        match self {
            MoveKind::TransposeAdjacent { index } => Ok(tangle::transpose_adjacent(p, *index)?.0),
            MoveKind::BlockPastBlock {
                direction,
                block,
                past,
            } => {
                let b: Vec<&str> = block.iter().map(String::as_str).collect();
                let q: Vec<&str> = past.iter().map(String::as_str).collect();
                Ok(tangle::move_block_past(p, &b, &q, *direction, None)?.presentation)
            }
            MoveKind::ExtractStrand { owner, side } => tangle::apply_extract(p, owner, *side),
            MoveKind::Excise {
                owners,
                bottom_punctures,
            } => {
                let o: Vec<&str> = owners.iter().map(String::as_str).collect();
                Ok(tangle::excise_tangle(p, &o, *bottom_punctures)?.0)
            }
            MoveKind::Insert { level, tangle: t } => {
                let ctx = InsertionContext::new(p, *level, t)?;
                tangle::insert_tangle(&ctx, t)
            }
            MoveKind::Rewrite { range, events, .. } => {
                if range.start > range.end || range.end > p.len() {
                    return Err(Error::IndexOutOfRange {
                        index: range.end,
                        len: p.len(),
                    });
                }
                let mut ev = p.events[..range.start].to_vec();
                ev.extend_from_slice(events);
                ev.extend_from_slice(&p.events[range.end..]);
                let q = MorsePresentation::new(p.punctures_bottom, p.punctures_top, ev);
                q.check_structure()?;
                Ok(q)
            }
        }
    }

    fn to_line(&self) -> String {
        let mut s = self.name().to_string();
        match self {
            MoveKind::TransposeAdjacent { index } => {
                let _ = write!(s, " i={index}");
            }
            MoveKind::BlockPastBlock {
                direction,
                block,
                past,
            } => {
                let _ = write!(
                    s,
                    " dir={} move={} past={}",
                    direction.as_str(),
                    block.join(";"),
                    past.join(";")
                );
            }
            MoveKind::ExtractStrand { owner, side } => {
                let _ = write!(s, " box={owner} side={}", side.as_str());
            }
            MoveKind::Excise {
                owners,
                bottom_punctures,
            } => {
                let _ = write!(s, " owners={} bottom={bottom_punctures}", owners.join(";"));
            }
            MoveKind::Insert { level, tangle } => {
                let _ = write!(
                    s,
                    " level={level} punctures={}:{} events",
                    tangle.punctures_bottom, tangle.punctures_top
                );
                for e in &tangle.events {
                    let _ = write!(s, " {e}");
                }
            }
            MoveKind::Rewrite {
                range,
                events,
                note,
            } => {
                let _ = write!(
                    s,
                    " range={}..{} note={note} events",
                    range.start, range.end
                );
                for e in events {
                    let _ = write!(s, " {e}");
                }
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteMove {
    pub kind: MoveKind,
    pub delta: Width,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteTrace {
    pub start: MorsePresentation,
    pub moves: Vec<RewriteMove>,
    pub end: MorsePresentation,
    pub total_delta: Width,
}

impl RewriteTrace {
    /// Replays every move from `start`, recomputing each delta.
    pub fn verify(&self) -> Result<()> {
        let mut cur = self.start.clone();
        cur.check_structure()?;
        let mut sum = 0;
        for (i, mv) in self.moves.iter().enumerate() {
            let next = mv.kind.apply(&cur)?;
            let d = next.width_unchecked() - cur.width_unchecked();
            if d != mv.delta {
                return Err(Error::Certification(format!(
                    "move {i} ({}) stores delta {} but recomputes to {d}",
                    mv.kind.name(),
                    mv.delta
                )));
            }
            sum += d;
            cur = next;
        }
        if cur != self.end {
            return Err(Error::Certification(
                "replay does not reproduce the end presentation".into(),
            ));
        }
        let direct = self.end.width_unchecked() - self.start.width_unchecked();
        if sum != self.total_delta || direct != self.total_delta {
            return Err(Error::Certification(format!(
                "total delta {} but moves sum to {sum} and widths differ by {direct}",
                self.total_delta
            )));
        }
        Ok(())
    }

    /// Text form: a header naming the start and end presentation files,
    /// then one move per line.
    pub fn to_text(&self, start_ref: &str, end_ref: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "start {start_ref}");
        let _ = writeln!(s, "end {end_ref}");
        let _ = writeln!(s, "total_delta {}", self.total_delta);
        for mv in &self.moves {
            let _ = writeln!(s, "{} delta={}", mv.kind.to_line(), mv.delta);
        }
        s
    }

    /// Parses the text form and replays it from `start`; the result is
    /// verified before it is returned.
    pub fn from_text(text: &str, start: &MorsePresentation) -> Result<Self> {
        let parsed = parse_trace_text(text)?;
        let mut tb = TraceBuilder::new(start.clone())?;
        for (line, mv) in parsed.moves {
            let d = tb.push(mv.kind)?;
            if d != mv.delta {
                return Err(Error::Parse {
                    line,
                    token: format!("delta={}", mv.delta),
                    message: format!("recomputed delta is {d}"),
                });
            }
        }
        let trace = tb.finish();
        if trace.total_delta != parsed.total_delta {
            return Err(Error::Certification(format!(
                "header total_delta {} but replay gives {}",
                parsed.total_delta, trace.total_delta
            )));
        }
        Ok(trace)
    }
}

/// Header and moves of a trace file, before replay.
#[derive(Debug, Clone)]
pub struct TraceText {
    pub start_ref: String,
    pub end_ref: String,
    pub total_delta: Width,
    pub moves: Vec<(usize, RewriteMove)>,
}

pub fn parse_trace_text(text: &str) -> Result<TraceText> {
    let perr = |line: usize, token: &str, message: &str| Error::Parse {
        line,
        token: token.to_string(),
        message: message.to_string(),
    };
    let mut start_ref = None;
    let mut end_ref = None;
    let mut total = None;
    let mut moves = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks: Vec<&str> = content.split_whitespace().collect();
        let head = toks.remove(0);
        match head {
            "start" => start_ref = Some(toks.join(" ")),
            "end" => end_ref = Some(toks.join(" ")),
            "total_delta" => {
                let t = toks.first().copied().unwrap_or("");
                total = Some(t.parse().map_err(|_| perr(line, t, "expected integer"))?);
            }
            _ => {
                let delta_tok = toks
                    .pop()
                    .ok_or_else(|| perr(line, head, "missing delta"))?;
                let delta: Width = delta_tok
                    .strip_prefix("delta=")
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| perr(line, delta_tok, "expected delta=<int>"))?;
                let kind = parse_move(line, head, &toks)?;
                moves.push((line, RewriteMove { kind, delta }));
            }
        }
    }
    Ok(TraceText {
        start_ref: start_ref.ok_or_else(|| perr(0, "", "missing start line"))?,
        end_ref: end_ref.ok_or_else(|| perr(0, "", "missing end line"))?,
        total_delta: total.ok_or_else(|| perr(0, "", "missing total_delta line"))?,
        moves,
    })
}

fn parse_move(line: usize, head: &str, toks: &[&str]) -> Result<MoveKind> {
    let perr = |token: &str, message: &str| Error::Parse {
        line,
        token: token.to_string(),
        message: message.to_string(),
    };
    let split = toks
        .iter()
        .position(|t| *t == "events")
        .unwrap_or(toks.len());
    let (keyed, rest) = toks.split_at(split);
    let event_toks = rest.get(1..).unwrap_or(&[]);
    let get = |key: &str| -> Result<&str> {
        keyed
            .iter()
            .find_map(|t| t.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
            .ok_or_else(|| perr(head, &format!("missing {key}=")))
    };
    let num = |key: &str| -> Result<usize> {
        let v = get(key)?;
        v.parse()
            .map_err(|_| perr(v, "expected non-negative integer"))
    };
    let list = |v: &str| v.split(';').map(str::to_string).collect::<Vec<_>>();
    let events = || -> Result<Vec<CriticalEvent>> {
        event_toks.iter().map(|t| parse_event(line, t)).collect()
    };
    Ok(match head {
        "transpose" => MoveKind::TransposeAdjacent { index: num("i")? },
        "block" => {
            let dir = get("dir")?;
            let direction = match dir {
                "lower" => Direction::Lower,
                "raise" => Direction::Raise,
                _ => return Err(perr(dir, "expected lower or raise")),
            };
            MoveKind::BlockPastBlock {
                direction,
                block: list(get("move")?),
                past: list(get("past")?),
            }
        }
        "extract" => {
            let side = get("side")?;
            MoveKind::ExtractStrand {
                owner: get("box")?.to_string(),
                side: match side {
                    "top" => Side::Top,
                    "bottom" => Side::Bottom,
                    _ => return Err(perr(side, "expected top or bottom")),
                },
            }
        }
        "excise" => MoveKind::Excise {
            owners: list(get("owners")?),
            bottom_punctures: num("bottom")?,
        },
        "insert" => {
            let p = get("punctures")?;
            let (b, t) = p
                .split_once(':')
                .and_then(|(b, t)| Some((b.parse().ok()?, t.parse().ok()?)))
                .ok_or_else(|| perr(p, "expected <bottom>:<top>"))?;
            MoveKind::Insert {
                level: num("level")?,
                tangle: MorsePresentation::new(b, t, events()?),
            }
        }
        "rewrite" => {
            let r = get("range")?;
            let (a, b) = r
                .split_once("..")
                .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
                .ok_or_else(|| perr(r, "expected <start>..<end>"))?;
            MoveKind::Rewrite {
                range: a..b,
                events: events()?,
                note: get("note")?.to_string(),
            }
        }
        other => return Err(perr(other, "unknown move kind")),
    })
}

/// Applies moves one at a time, recording recomputed deltas.
#[derive(Debug, Clone)]
pub struct TraceBuilder {
    start: MorsePresentation,
    current: MorsePresentation,
    moves: Vec<RewriteMove>,
}

impl TraceBuilder {
    pub fn new(start: MorsePresentation) -> Result<Self> {
        start.check_structure()?;
        Ok(TraceBuilder {
            current: start.clone(),
            start,
            moves: Vec::new(),
        })
    }

    pub fn current(&self) -> &MorsePresentation {
        &self.current
    }

    /// Applies `kind` and returns its recomputed delta.
    pub fn push(&mut self, kind: MoveKind) -> Result<Width> {
        let next = kind.apply(&self.current)?;
        let delta = next.width_unchecked() - self.current.width_unchecked();
        self.moves.push(RewriteMove { kind, delta });
        self.current = next;
        Ok(delta)
    }

    /// Appends the moves of `other`, which must start where this trace
    /// currently stands. Deltas are recomputed, not copied.
    pub fn extend(&mut self, other: &RewriteTrace) -> Result<()> {
        if other.start != self.current {
            return Err(Error::Certification(
                "appended trace does not start at the current presentation".into(),
            ));
        }
        for mv in &other.moves {
            self.push(mv.kind.clone())?;
        }
        Ok(())
    }

    pub fn finish(self) -> RewriteTrace {
        let total_delta = self.moves.iter().map(|m| m.delta).sum();
        RewriteTrace {
            start: self.start,
            moves: self.moves,
            end: self.current,
            total_delta,
        }
    }
}
