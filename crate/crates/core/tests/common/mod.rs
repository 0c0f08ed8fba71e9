#![allow(dead_code)]

use rand::Rng;
use thinwidth::{CriticalEvent, EventKind, MorsePresentation};

/// Every kind sequence of the given length starting at `bottom` strands
/// whose counts stay non-negative.
pub fn sequences(bottom: usize, len: usize) -> Vec<Vec<EventKind>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn go(c: i64, left: usize, cur: &mut Vec<EventKind>, out: &mut Vec<Vec<EventKind>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for k in [EventKind::Minimum, EventKind::Maximum] {
            let next = c + k.step();
            if next >= 0 {
                cur.push(k);
                go(next, left - 1, cur, out);
                cur.pop();
            }
        }
    }
    go(bottom as i64, len, &mut cur, &mut out);
    out
}

/// All valid knot presentations with at most `max_events` events.
pub fn all_knots(max_events: usize) -> Vec<MorsePresentation> {
    (2..=max_events)
        .step_by(2)
        .flat_map(|len| sequences(0, len))
        .map(|k| MorsePresentation::from_kinds(0, &k))
        .filter(|p| p.is_knot() && p.is_valid())
        .collect()
}

/// A uniformly stepped random valid knot presentation with `2k` events.
pub fn random_knot(rng: &mut impl Rng, k: usize) -> MorsePresentation {
    let n = 2 * k.max(1);
    let mut kinds = Vec::with_capacity(n);
    let mut c: i64 = 0;
    for i in 0..n {
        let left = (n - i - 1) as i64;
        let can_min = c + 2 <= 2 * left;
        let can_max = (c - 2 >= 2) || (c == 2 && left == 0);
        let kind = match (can_min, can_max) {
            (true, true) => {
                if rng.gen_bool(0.5) {
                    EventKind::Minimum
                } else {
                    EventKind::Maximum
                }
            }
            (true, false) => EventKind::Minimum,
            _ => EventKind::Maximum,
        };
        c += kind.step();
        kinds.push(kind);
    }
    MorsePresentation::from_kinds(0, &kinds)
}

/// A random tangle with equal top and bottom punctures and `len ≥ 1` events.
pub fn random_balanced_tangle(
    rng: &mut impl Rng,
    bottom: usize,
    len: usize,
    owner: &str,
) -> MorsePresentation {
    let len = if len % 2 == 1 { len + 1 } else { len.max(2) };
    let mut events = Vec::with_capacity(len);
    let mut c = bottom as i64;
    for i in 0..len {
        let left = (len - i - 1) as i64;
        let target = bottom as i64;
        let can_min = (c + 2 - target).abs() <= 2 * left;
        let can_max = c - 2 >= 0 && (c - 2 - target).abs() <= 2 * left;
        let kind = match (can_min, can_max) {
            (true, true) => {
                if rng.gen_bool(0.5) {
                    EventKind::Minimum
                } else {
                    EventKind::Maximum
                }
            }
            (true, false) => EventKind::Minimum,
            _ => EventKind::Maximum,
        };
        c += kind.step();
        events.push(CriticalEvent::new(kind, owner));
    }
    MorsePresentation::new(bottom, bottom, events)
}

pub fn relabel(p: &MorsePresentation, owner: &str) -> MorsePresentation {
    let events = p
        .events
        .iter()
        .map(|e| CriticalEvent::new(e.kind, owner))
        .collect();
    MorsePresentation::new(p.punctures_bottom, p.punctures_top, events)
}

/// Cartesian grid of `n`-tuples over `vals`.
pub fn tuples(n: usize, vals: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                vals.iter().map(move |x| {
                    let mut w = v.clone();
                    w.push(*x);
                    w
                })
            })
            .collect();
    }
    out
}
