//! Exhaustive minimum width over event orderings.
//!
//! The oracle keeps its own width arithmetic so that it can be used to
//! re-check deltas computed elsewhere.

use crate::error::{Error, Result};
use crate::families::TemplateDiagram;
use crate::morse::{EventKind, MorsePresentation, Width};

pub const DEFAULT_BUDGET: usize = 12;

/// Width of an event ordering: the sum of strand counts at the levels
/// between consecutive events. `None` if a count goes negative.
pub fn width_of_kinds(bottom: usize, kinds: &[EventKind]) -> Option<Width> {
    let mut c = bottom as Width;
    let mut total = 0;
    for (k, kind) in kinds.iter().enumerate() {
        c += if *kind == EventKind::Minimum { 2 } else { -2 };
        if c < 0 {
            return None;
        }
        if k + 1 < kinds.len() {
            total += c;
        }
    }
    Some(total)
}

/// Pairs `(i, j)`: event `i` must stay below event `j`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Constraints {
    pub before: Vec<(usize, usize)>,
}

impl Constraints {
    pub fn none() -> Self {
        Constraints::default()
    }

    /// Events of one box keep their relative order, and every event of the
    /// lower box of a bundle stays below every event of its upper box.
    /// Events whose owner is not a box of `d` are unconstrained.
    pub fn from_diagram(p: &MorsePresentation, d: &TemplateDiagram) -> Self {
        let mut before = Vec::new();
        for b in &d.boxes {
            let idx = p.indices_of(&[&b.id]);
            for w in idx.windows(2) {
                before.push((w[0], w[1]));
            }
        }
        for (lo, hi) in d.precedence() {
            let a = p.indices_of(&[&lo]);
            let b = p.indices_of(&[&hi]);
            if let (Some(&last), Some(&first)) = (a.last(), b.first()) {
                before.push((last, first));
            }
        }
        Constraints { before }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub width: Width,
    /// Minimizing permutation: `order[k]` is the original index of the event
    /// placed at height `k`.
    pub order: Vec<usize>,
}

impl OracleResult {
    pub fn presentation(&self, p: &MorsePresentation) -> MorsePresentation {
        let events = self.order.iter().map(|&i| p.events[i].clone()).collect();
        MorsePresentation::new(p.punctures_bottom, p.punctures_top, events)
    }
}

/// Minimum width over orderings respecting `constraints`.
pub fn brute_force_min_width(
    p: &MorsePresentation,
    constraints: &Constraints,
    budget: usize,
) -> Result<Width> {
    oracle_minimum(p, constraints, budget).map(|r| r.width)
}

/// Dynamic programme over placed-event subsets. Interior levels of a knot
/// must stay positive so that no ordering splits it.
pub fn oracle_minimum(
    p: &MorsePresentation,
    constraints: &Constraints,
    budget: usize,
) -> Result<OracleResult> {
    let n = p.len();
    if n > budget {
        return Err(Error::BudgetExceeded { events: n, budget });
    }
    if n > 24 {
        return Err(Error::Unsupported("oracle is limited to 24 events".into()));
    }
    p.check_structure()?;
    let mut preds = vec![0u32; n];
    for &(i, j) in &constraints.before {
        if i >= n || j >= n {
            return Err(Error::IndexOutOfRange {
                index: i.max(j),
                len: n,
            });
        }
        preds[j] |= 1 << i;
    }
    let steps: Vec<Width> = p.events.iter().map(|e| e.kind.step()).collect();
    let floor = if p.is_knot() { 1 } else { 0 };
    let full = (1usize << n) - 1;
    const INF: Width = Width::MAX;
    let mut best = vec![INF; full + 1];
    let mut choice = vec![usize::MAX; full + 1];
    best[0] = 0;
    for mask in 0..=full {
        let cur = best[mask];
        if cur == INF {
            continue;
        }
        let placed = (mask as u32).count_ones() as usize;
        let count: Width = p.punctures_bottom as Width
            + (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| steps[i])
                .sum::<Width>();
        for e in 0..n {
            if mask >> e & 1 == 1 || preds[e] & !(mask as u32) != 0 {
                continue;
            }
            let c = count + steps[e];
            let interior = placed + 1 < n;
            if c < 0 || (interior && c < floor) {
                continue;
            }
            let next = mask | 1 << e;
            let w = cur + if interior { c } else { 0 };
            if w < best[next] {
                best[next] = w;
                choice[next] = e;
            }
        }
    }
    if best[full] == INF {
        return Err(Error::Hypothesis(
            "no ordering satisfies the constraints".into(),
        ));
    }
    let mut order = Vec::with_capacity(n);
    let mut mask = full;
    while mask != 0 {
        let e = choice[mask];
        order.push(e);
        mask &= !(1 << e);
    }
    order.reverse();
    Ok(OracleResult {
        width: best[full],
        order,
    })
}
