//! Morse presentations: a knot or tangle projection reduced to the ordered
//! sequence of its critical points, read bottom to top.
//!
//! Every level between two consecutive critical points meets the diagram in
//! a number of points that is fixed by the events below it: a minimum adds
//! two strands, a maximum removes two. Width and the thick/thin
//! decomposition are functions of that count sequence alone.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Width, strand counts and width deltas all live in this type.
pub type Width = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    Minimum,
    Maximum,
}

impl EventKind {
    /// Change in strand count when the level passes this event going up.
    pub fn step(self) -> Width {
        match self {
            EventKind::Minimum => 2,
            EventKind::Maximum => -2,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            EventKind::Minimum => EventKind::Maximum,
            EventKind::Maximum => EventKind::Minimum,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            EventKind::Minimum => 'm',
            EventKind::Maximum => 'M',
        }
    }
}

/// Label recording which box, bundle or construction step produced an event.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Owner(String);

impl Owner {
    pub const PLUMBING: &'static str = "plumbing";
    pub const FREE: &'static str = "free";

    pub fn new(label: impl Into<String>) -> Self {
        Owner(label.into())
    }

    pub fn plumbing() -> Self {
        Owner(Self::PLUMBING.to_string())
    }

    pub fn free() -> Self {
        Owner(Self::FREE.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Default for Owner {
    fn default() -> Self {
        Owner::plumbing()
    }
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Owner {
    fn from(s: &str) -> Self {
        Owner::new(s)
    }
}

impl PartialEq<str> for Owner {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for Owner {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CriticalEvent {
    pub kind: EventKind,
    pub owner: Owner,
}

impl CriticalEvent {
    pub fn new(kind: EventKind, owner: impl Into<Owner>) -> Self {
        CriticalEvent {
            kind,
            owner: owner.into(),
        }
    }

    pub fn min(owner: impl Into<Owner>) -> Self {
        Self::new(EventKind::Minimum, owner)
    }

    pub fn max(owner: impl Into<Owner>) -> Self {
        Self::new(EventKind::Maximum, owner)
    }
}

impl fmt::Display for CriticalEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.symbol())?;
        if self.owner.as_str() != Owner::PLUMBING {
            write!(f, "@{}", self.owner)?;
        }
        Ok(())
    }
}

/// One reason a presentation is not well formed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The running strand count drops below zero at this level
    /// (level `k` sits above the first `k` events).
    NegativeCount { level: usize, count: Width },
    /// `punctures_top` disagrees with the count forced by the events.
    BoundaryMismatch { declared: usize, forced: Width },
    /// A knot presentation (no punctures) with no events.
    EmptyKnot,
    /// An interior level of a knot presentation meets the diagram in zero
    /// points, so the presentation is split.
    SplitLevel { level: usize },
}

impl Violation {
    /// Structural violations make the count sequence meaningless; a split
    /// level still has a well-defined width.
    pub fn is_structural(&self) -> bool {
        !matches!(self, Violation::SplitLevel { .. })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeCount { level, count } => {
                write!(f, "negative strand count {count} at level {level}")
            }
            Violation::BoundaryMismatch { declared, forced } => write!(
                f,
                "boundary count mismatch: top declared {declared}, events force {forced}"
            ),
            Violation::EmptyKnot => write!(f, "knot presentation has no events"),
            Violation::SplitLevel { level } => {
                write!(
                    f,
                    "split level {level}: knot meets the level sphere in 0 points"
                )
            }
        }
    }
}

/// Strand counts at the regular levels strictly between consecutive events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelProfile {
    pub counts: Vec<Width>,
}

impl LevelProfile {
    pub fn width(&self) -> Width {
        self.counts.iter().sum()
    }
}

/// Total width together with the thick and thin sphere widths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WidthReport {
    pub total: Width,
    pub thick: Vec<Width>,
    pub thin: Vec<Width>,
}

impl WidthReport {
    /// `(Σ thick² − Σ thin²) / 2`.
    pub fn squares_width(&self) -> Width {
        let b: Width = self.thick.iter().map(|x| x * x).sum();
        let a: Width = self.thin.iter().map(|x| x * x).sum();
        (b - a) / 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MorsePresentation {
    pub events: Vec<CriticalEvent>,
    pub punctures_bottom: usize,
    pub punctures_top: usize,
}

impl MorsePresentation {
    pub fn new(punctures_bottom: usize, punctures_top: usize, events: Vec<CriticalEvent>) -> Self {
        MorsePresentation {
            events,
            punctures_bottom,
            punctures_top,
        }
    }

    /// A presentation with no boundary punctures.
    pub fn knot(events: Vec<CriticalEvent>) -> Self {
        Self::new(0, 0, events)
    }

    /// Builds a presentation from kinds only, deriving the top puncture count.
    /// Events get the default owner.
    pub fn from_kinds(punctures_bottom: usize, kinds: &[EventKind]) -> Self {
        let net: Width = kinds.iter().map(|k| k.step()).sum();
        let top = (punctures_bottom as Width + net).max(0) as usize;
        let events = kinds
            .iter()
            .map(|&k| CriticalEvent::new(k, Owner::plumbing()))
            .collect();
        Self::new(punctures_bottom, top, events)
    }

    /// Shorthand: `"mmMM"` or `"m m M M"`. Panics on other characters, so only
    /// meant for literals.
    pub fn from_symbols(punctures_bottom: usize, symbols: &str) -> Self {
        let kinds: Vec<EventKind> = symbols
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                'm' => EventKind::Minimum,
                'M' => EventKind::Maximum,
                other => panic!("bad event symbol {other:?}"),
            })
            .collect();
        Self::from_kinds(punctures_bottom, &kinds)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn is_knot(&self) -> bool {
        self.punctures_bottom == 0 && self.punctures_top == 0
    }

    pub fn kinds(&self) -> Vec<EventKind> {
        self.events.iter().map(|e| e.kind).collect()
    }

    /// Event kinds as a compact string such as `"mmMM"`.
    pub fn kinds_string(&self) -> String {
        self.events.iter().map(|e| e.kind.symbol()).collect()
    }

    pub fn minima(&self) -> usize {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::Minimum)
            .count()
    }

    pub fn maxima(&self) -> usize {
        self.len() - self.minima()
    }

    /// Running counts at every level, including the two boundary levels:
    /// `result[k]` is the count above the first `k` events.
    pub fn level_counts(&self) -> Vec<Width> {
        let mut out = Vec::with_capacity(self.len() + 1);
        let mut c = self.punctures_bottom as Width;
        out.push(c);
        for e in &self.events {
            c += e.kind.step();
            out.push(c);
        }
        out
    }

    /// Count at level `k` (above the first `k` events).
    pub fn count_at(&self, level: usize) -> Width {
        self.punctures_bottom as Width
            + self.events[..level]
                .iter()
                .map(|e| e.kind.step())
                .sum::<Width>()
    }

    /// Every violation of the presentation invariants; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let counts = self.level_counts();
        for (level, &c) in counts.iter().enumerate() {
            if c < 0 {
                out.push(Violation::NegativeCount { level, count: c });
            }
        }
        let forced = *counts.last().unwrap();
        if forced != self.punctures_top as Width {
            out.push(Violation::BoundaryMismatch {
                declared: self.punctures_top,
                forced,
            });
        }
        if self.punctures_bottom == 0 && self.punctures_top == 0 {
            if self.events.is_empty() {
                out.push(Violation::EmptyKnot);
            } else {
                for (level, &c) in counts.iter().enumerate().take(counts.len() - 1).skip(1) {
                    if c == 0 {
                        out.push(Violation::SplitLevel { level });
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Fails only on violations that leave the count sequence undefined.
    pub fn check_structure(&self) -> Result<()> {
        let v: Vec<Violation> = self
            .validate()
            .into_iter()
            .filter(Violation::is_structural)
            .collect();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }

    /// Fails on any violation.
    pub fn check_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }

    pub fn profile(&self) -> Result<LevelProfile> {
        self.check_structure()?;
        Ok(self.profile_unchecked())
    }

    pub(crate) fn profile_unchecked(&self) -> LevelProfile {
        let counts = self.level_counts();
        let n = counts.len();
        let interior = if n > 2 {
            counts[1..n - 1].to_vec()
        } else {
            Vec::new()
        };
        LevelProfile { counts: interior }
    }

    /// Sum of the interior level counts. Boundary disks of a tangle are not
    /// counted, so a tangle with at most one event has width 0.
    pub fn width_direct(&self) -> Result<Width> {
        Ok(self.profile()?.width())
    }

    pub(crate) fn width_unchecked(&self) -> Width {
        let mut c = self.punctures_bottom as Width;
        let mut total = 0;
        let n = self.events.len();
        for (i, e) in self.events.iter().enumerate() {
            c += e.kind.step();
            if i + 1 < n {
                total += c;
            }
        }
        total
    }

    /// Thick and thin spheres of a knot presentation.
    ///
    /// The profile is padded with a zero at each end; thick spheres are the
    /// strict local maxima of the padded sequence, thin spheres the strict
    /// local minima lying strictly inside it.
    pub fn thick_thin(&self) -> Result<WidthReport> {
        if !self.is_knot() {
            return Err(Error::Unsupported(
                "thick/thin decomposition is defined for knot presentations".into(),
            ));
        }
        self.check_structure()?;
        if self.events.is_empty() {
            return Err(Error::Invalid(vec![Violation::EmptyKnot]));
        }
        let profile = self.profile_unchecked();
        let mut padded = Vec::with_capacity(profile.counts.len() + 2);
        padded.push(0);
        padded.extend_from_slice(&profile.counts);
        padded.push(0);
        let mut thick = Vec::new();
        let mut thin = Vec::new();
        for i in 1..padded.len() - 1 {
            let (l, c, r) = (padded[i - 1], padded[i], padded[i + 1]);
            if c > l && c > r {
                thick.push(c);
            } else if c < l && c < r {
                thin.push(c);
            }
        }
        Ok(WidthReport {
            total: profile.width(),
            thick,
            thin,
        })
    }

    /// Reflection in a level sphere: events reversed, kinds swapped,
    /// punctures exchanged.
    pub fn mirror(&self) -> Self {
        let events = self
            .events
            .iter()
            .rev()
            .map(|e| CriticalEvent::new(e.kind.flipped(), e.owner.clone()))
            .collect();
        Self::new(self.punctures_top, self.punctures_bottom, events)
    }

    /// Indices of events whose owner is one of `owners`.
    pub fn indices_of(&self, owners: &[&str]) -> Vec<usize> {
        self.events
            .iter()
            .enumerate()
            .filter(|(_, e)| owners.iter().any(|o| e.owner == *o))
            .map(|(i, _)| i)
            .collect()
    }

    /// The contiguous index range occupied by `owners`, or an error if their
    /// events are absent or not contiguous.
    pub fn contiguous_range(&self, owners: &[&str]) -> Result<std::ops::Range<usize>> {
        let idx = self.indices_of(owners);
        let label = owners.join(";");
        let (first, last) = match (idx.first(), idx.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return Err(Error::NonContiguous(format!("{label} (no events)"))),
        };
        if last - first + 1 != idx.len() {
            return Err(Error::NonContiguous(label));
        }
        Ok(first..last + 1)
    }

    pub fn serialize(&self) -> String {
        let mut s = format!(
            "punctures {} {}\nevents",
            self.punctures_bottom, self.punctures_top
        );
        for e in &self.events {
            s.push(' ');
            s.push_str(&e.to_string());
        }
        s.push('\n');
        s
    }

    /// Parses the presentation text format:
    ///
    /// ```text
    /// # comment
    /// punctures 0 0
    /// events m m M@X2,1 M
    /// ```
    ///
    /// Further `events` lines append to the sequence.
    pub fn parse(text: &str) -> Result<Self> {
        let mut punctures: Option<(usize, usize)> = None;
        let mut events = Vec::new();
        let mut saw_events = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("");
            let mut tokens = content.split_whitespace();
            let Some(head) = tokens.next() else { continue };
            match head {
                "punctures" => {
                    if punctures.is_some() {
                        return Err(parse_err(line, head, "duplicate punctures line"));
                    }
                    let b = parse_count(line, tokens.next())?;
                    let t = parse_count(line, tokens.next())?;
                    if let Some(extra) = tokens.next() {
                        return Err(parse_err(line, extra, "unexpected token"));
                    }
                    punctures = Some((b, t));
                }
                "events" => {
                    if punctures.is_none() {
                        return Err(parse_err(line, head, "events before punctures line"));
                    }
                    saw_events = true;
                    for tok in tokens {
                        events.push(parse_event(line, tok)?);
                    }
                }
                other => return Err(parse_err(line, other, "expected `punctures` or `events`")),
            }
        }
        let Some((b, t)) = punctures else {
            return Err(parse_err(0, "", "missing punctures line"));
        };
        if !saw_events {
            return Err(parse_err(0, "", "missing events line"));
        }
        Ok(Self::new(b, t, events))
    }
}

impl fmt::Display for MorsePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl FromStr for MorsePresentation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

fn parse_err(line: usize, token: &str, message: &str) -> Error {
    Error::Parse {
        line,
        token: token.to_string(),
        message: message.to_string(),
    }
}

fn parse_count(line: usize, tok: Option<&str>) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(line, "", "missing puncture count"))?;
    tok.parse()
        .map_err(|_| parse_err(line, tok, "puncture count must be a non-negative integer"))
}

/// Parses one `m`, `M`, `m@owner` or `M@owner` token.
pub fn parse_event(line: usize, tok: &str) -> Result<CriticalEvent> {
    let (kind, owner) = match tok.split_once('@') {
        Some((k, o)) => (k, Some(o)),
        None => (tok, None),
    };
    let kind = match kind {
        "m" => EventKind::Minimum,
        "M" => EventKind::Maximum,
        _ => return Err(parse_err(line, tok, "event must be `m` or `M`")),
    };
    let owner = match owner {
        Some("") => return Err(parse_err(line, tok, "empty owner label")),
        Some(o) => Owner::new(o),
        None => Owner::plumbing(),
    };
    Ok(CriticalEvent { kind, owner })
}

/// Standard `n`-bridge presentation: `n` minima followed by `n` maxima.
/// Its profile is `2, 4, …, 2n, …, 4, 2` and its width is `2n²`.
pub fn bridge_presentation(n: usize) -> MorsePresentation {
    let mut events = vec![CriticalEvent::min("bridge"); n];
    events.extend(std::iter::repeat_n(CriticalEvent::max("bridge"), n));
    MorsePresentation::knot(events)
}
