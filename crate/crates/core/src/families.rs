//! Parameterized diagram families built from braid boxes and strand bundles.
//!
//! A [`TemplateDiagram`] lists braid boxes bottom to top together with the
//! bundles of parallel strands joining them. Each box is in bridge position
//! (its minima below its maxima), and a bundle always runs from the top of
//! its lower box to the bottom of its upper box, so strand counts in the gaps
//! between boxes are fixed by which bundles span them.
//!
//! Type-n diagrams stack the left column `X(1,1)` (top) … `X(n,1)` above the
//! right column `X(n,2)` … `X(1,2)` (bottom). Bundle `A_i` joins `X(i,1)` to
//! `X(i+1,2)`, `B_i` joins `X(i,2)` to `X(i+1,1)`, `N` joins the two middle
//! boxes and the single wrapping strand `W` joins `X(1,1)` to `X(1,2)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::morse::{CriticalEvent, MorsePresentation, Width};
use crate::tangle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxSide {
    Bottom,
    Top,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BraidBoxSpec {
    pub id: String,
    pub minima: usize,
    pub maxima: usize,
}

impl BraidBoxSpec {
    pub fn new(id: impl Into<String>, minima: usize, maxima: usize) -> Self {
        BraidBoxSpec {
            id: id.into(),
            minima,
            maxima,
        }
    }

    pub fn events(&self) -> usize {
        self.minima + self.maxima
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attachment {
    pub box_id: String,
    pub side: BoxSide,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bundle {
    pub name: String,
    pub lower: Attachment,
    pub upper: Attachment,
    pub strands: usize,
}

impl Bundle {
    /// A bundle leaving the top of `lower` and entering the bottom of `upper`.
    pub fn between(name: impl Into<String>, lower: &str, upper: &str, strands: usize) -> Self {
        Bundle {
            name: name.into(),
            lower: Attachment {
                box_id: lower.to_string(),
                side: BoxSide::Top,
            },
            upper: Attachment {
                box_id: upper.to_string(),
                side: BoxSide::Bottom,
            },
            strands,
        }
    }

    /// A bundle closing a box on itself; it spans no gap and is left out of
    /// degree accounting.
    pub fn is_closure(&self) -> bool {
        self.lower.box_id == self.upper.box_id
    }

    pub fn touches(&self, id: &str) -> bool {
        self.lower.box_id == id || self.upper.box_id == id
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TemplateDiagram {
    /// Bottom to top.
    pub boxes: Vec<BraidBoxSpec>,
    pub bundles: Vec<Bundle>,
}

impl TemplateDiagram {
    pub fn position(&self, id: &str) -> Option<usize> {
        self.boxes.iter().position(|b| b.id == id)
    }

    pub fn get(&self, id: &str) -> Option<&BraidBoxSpec> {
        self.boxes.iter().find(|b| b.id == id)
    }

    /// Strands attached to one side of a box.
    pub fn degree(&self, id: &str, side: BoxSide) -> usize {
        self.bundles
            .iter()
            .filter(|b| !b.is_closure())
            .map(|b| {
                let mut d = 0;
                if b.lower.box_id == id && b.lower.side == side {
                    d += b.strands;
                }
                if b.upper.box_id == id && b.upper.side == side {
                    d += b.strands;
                }
                d
            })
            .sum()
    }

    /// Strand count in each gap between consecutive boxes, bottom to top.
    pub fn gap_widths(&self) -> Vec<Width> {
        let n = self.boxes.len();
        let mut gaps = vec![0; n.saturating_sub(1)];
        for b in self.bundles.iter().filter(|b| !b.is_closure()) {
            if let (Some(lo), Some(hi)) = (
                self.position(&b.lower.box_id),
                self.position(&b.upper.box_id),
            ) {
                for g in gaps.iter_mut().take(hi).skip(lo) {
                    *g += b.strands as Width;
                }
            }
        }
        gaps
    }

    /// Checks bundle orientation, strand counts and per-box degree balance.
    pub fn check(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for b in &self.boxes {
            if !seen.insert(b.id.as_str()) {
                return Err(Error::Template(format!("duplicate box {}", b.id)));
            }
        }
        for b in &self.bundles {
            if b.strands == 0 {
                return Err(Error::Template(format!("bundle {} has no strands", b.name)));
            }
            let lo = self.position(&b.lower.box_id).ok_or_else(|| {
                Error::Template(format!("bundle {}: unknown box {}", b.name, b.lower.box_id))
            })?;
            let hi = self.position(&b.upper.box_id).ok_or_else(|| {
                Error::Template(format!("bundle {}: unknown box {}", b.name, b.upper.box_id))
            })?;
            if b.is_closure() {
                continue;
            }
            if lo >= hi || b.lower.side != BoxSide::Top || b.upper.side != BoxSide::Bottom {
                return Err(Error::Template(format!(
                    "bundle {} must run from the top of a lower box to the bottom of a higher one",
                    b.name
                )));
            }
        }
        for bx in &self.boxes {
            let bottom = self.degree(&bx.id, BoxSide::Bottom) as Width;
            let top = self.degree(&bx.id, BoxSide::Top) as Width;
            if bottom + 2 * bx.minima as Width - 2 * bx.maxima as Width != top {
                return Err(Error::Template(format!(
                    "degree mismatch at {}: bottom {bottom} + 2·{} − 2·{} ≠ top {top}",
                    bx.id, bx.minima, bx.maxima
                )));
            }
        }
        Ok(())
    }

    /// Concatenates each box's events (minima then maxima) bottom to top.
    pub fn compile(&self) -> Result<MorsePresentation> {
        self.check()?;
        let mut events = Vec::with_capacity(self.boxes.iter().map(|b| b.events()).sum());
        for bx in &self.boxes {
            events.extend(std::iter::repeat_n(
                CriticalEvent::min(bx.id.as_str()),
                bx.minima,
            ));
            events.extend(std::iter::repeat_n(
                CriticalEvent::max(bx.id.as_str()),
                bx.maxima,
            ));
        }
        let p = MorsePresentation::knot(events);
        p.check_valid()?;
        let counts = p.level_counts();
        let mut at = 0;
        for (k, g) in self.gap_widths().iter().enumerate() {
            at += self.boxes[k].events();
            if counts[at] != *g {
                return Err(Error::Template(format!(
                    "gap above {} carries {} strands but events give {}",
                    self.boxes[k].id, g, counts[at]
                )));
            }
        }
        Ok(p)
    }

    /// First pair of boxes, one from each set, joined by a bundle.
    pub fn bundle_between(&self, a: &[&str], b: &[&str]) -> Option<(String, String)> {
        self.bundles
            .iter()
            .filter(|x| !x.is_closure())
            .find_map(|x| {
                let (l, u) = (x.lower.box_id.as_str(), x.upper.box_id.as_str());
                if (a.contains(&l) && b.contains(&u)) || (a.contains(&u) && b.contains(&l)) {
                    Some((l.to_string(), u.to_string()))
                } else {
                    None
                }
            })
    }

    /// `(lower, upper)` box pairs that must keep their relative height for a
    /// vertical isotopy to preserve every bundle.
    pub fn precedence(&self) -> Vec<(String, String)> {
        self.bundles
            .iter()
            .filter(|b| !b.is_closure())
            .map(|b| (b.lower.box_id.clone(), b.upper.box_id.clone()))
            .collect()
    }

    pub fn box_ids(&self) -> Vec<&str> {
        self.boxes.iter().map(|b| b.id.as_str()).collect()
    }
}

pub fn box_id(i: usize, j: usize) -> String {
    format!("X{i},{j}")
}

fn parse_box_id(id: &str) -> Option<(usize, usize)> {
    let rest = id.strip_prefix('X')?;
    let (i, j) = rest.split_once(',')?;
    Some((i.parse().ok()?, j.parse().ok()?))
}

/// Parameters of a type-n diagram.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeNParams {
    pub n: usize,
    pub s: Vec<usize>,
    /// `m_{i,1}` for the left boxes.
    pub left_minima: Vec<usize>,
    /// `M_{i,2}` for the right boxes.
    pub right_maxima: Vec<usize>,
}

impl TypeNParams {
    pub fn minimal(s: &[usize]) -> Self {
        Self::with_slack(s, 0)
    }

    /// Every box gets `slack` extra minimum/maximum pairs.
    pub fn with_slack(s: &[usize], slack: usize) -> Self {
        TypeNParams {
            n: s.len(),
            s: s.to_vec(),
            left_minima: vec![slack; s.len()],
            right_maxima: vec![slack; s.len()],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Template("n must be at least 1".into()));
        }
        if self.s.len() != self.n
            || self.left_minima.len() != self.n
            || self.right_maxima.len() != self.n
        {
            return Err(Error::Template(format!(
                "expected {} entries in s, left_minima and right_maxima",
                self.n
            )));
        }
        if let Some((i, v)) = self.s.iter().enumerate().find(|(_, v)| **v % 2 == 0) {
            return Err(Error::Template(format!("s_{} = {v} must be odd", i + 1)));
        }
        Ok(())
    }

    /// `s_i`, 1-based.
    pub fn s(&self, i: usize) -> usize {
        self.s[i - 1]
    }

    /// Strands entering box `X(i,1)` from below (equivalently leaving
    /// `X(i,2)` upward).
    pub fn entering(&self, i: usize) -> usize {
        if i == 1 {
            self.s(1) + 1
        } else {
            self.s(i - 1) + self.s(i)
        }
    }

    pub fn left_box(&self, i: usize) -> BraidBoxSpec {
        let m = self.left_minima[i - 1];
        BraidBoxSpec::new(box_id(i, 1), m, m + self.entering(i) / 2)
    }

    pub fn right_box(&self, i: usize) -> BraidBoxSpec {
        let big_m = self.right_maxima[i - 1];
        BraidBoxSpec::new(box_id(i, 2), big_m + self.entering(i) / 2, big_m)
    }

    /// Widest level meeting `X(2,1)`, not counting passing strands.
    pub fn a(&self) -> usize {
        self.s(1) + self.s(2) + 2 * self.left_minima[1]
    }

    /// Widest level meeting `X(2,2)`, not counting passing strands.
    pub fn b(&self) -> usize {
        self.s(1) + self.s(2) + 2 * self.right_maxima[1]
    }

    /// Closed-form strand count of gap `k`, counted top-down from the gap
    /// under `X(1,1)` (k = 1) to the gap over `X(1,2)` (k = 2n − 1).
    pub fn gap_closed_form(&self, k: usize) -> Width {
        let n = self.n;
        let k = if k > n { 2 * n - k } else { k };
        let before: usize = self.s[..k - 1].iter().sum();
        (self.s(k) + 2 * before + 1) as Width
    }

    pub fn as_gen_g(&self) -> GenGParams {
        GenGParams {
            n: self.n,
            s1: self.s.clone(),
            s2: self.s.clone(),
            left_minima: self.left_minima.clone(),
            right_maxima: self.right_maxima.clone(),
        }
    }

    /// Lower bound on the event count of the middle tangle
    /// `X(3,·) … X(n,·)`: `s_2 + 2s_3 + … + 2s_{n−1} + s_n`.
    pub fn middle_event_floor(&self) -> usize {
        let n = self.n;
        if n < 3 {
            return 0;
        }
        let inner: usize = (3..n).map(|i| 2 * self.s(i)).sum();
        self.s(2) + inner + self.s(n)
    }

    /// Short key such as `n=3 s=3/3/3 lm=0/0/0 rM=0/0/0`.
    pub fn key(&self) -> String {
        let j = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join("/")
        };
        format!(
            "n={} s={} lm={} rM={}",
            self.n,
            j(&self.s),
            j(&self.left_minima),
            j(&self.right_maxima)
        )
    }
}

impl fmt::Display for TypeNParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Generalized type-n: the two bundle columns may differ. `A_i` carries
/// `s1[i]` strands, `B_i` carries `s2[i]`, and the middle bundle `N` carries
/// `s1[n]`; `s2[n]` enters only through hypotheses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GenGParams {
    pub n: usize,
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
    pub left_minima: Vec<usize>,
    pub right_maxima: Vec<usize>,
}

impl GenGParams {
    pub fn with_slack(s1: &[usize], s2: &[usize], slack: usize) -> Self {
        GenGParams {
            n: s1.len(),
            s1: s1.to_vec(),
            s2: s2.to_vec(),
            left_minima: vec![slack; s1.len()],
            right_maxima: vec![slack; s1.len()],
        }
    }

    /// `s_{i,j}`, 1-based.
    pub fn s(&self, i: usize, j: usize) -> usize {
        if j == 1 {
            self.s1[i - 1]
        } else {
            self.s2[i - 1]
        }
    }

    pub fn key(&self) -> String {
        let j = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join("/")
        };
        format!(
            "n={} s1={} s2={} lm={} rM={}",
            self.n,
            j(&self.s1),
            j(&self.s2),
            j(&self.left_minima),
            j(&self.right_maxima)
        )
    }
}

fn gen_bundles(p: &GenGParams) -> Vec<Bundle> {
    let n = p.n;
    let mut bundles = vec![Bundle::between("W", &box_id(1, 2), &box_id(1, 1), 1)];
    for i in 1..n {
        bundles.push(Bundle::between(
            format!("A{i}"),
            &box_id(i + 1, 2),
            &box_id(i, 1),
            p.s(i, 1),
        ));
        bundles.push(Bundle::between(
            format!("B{i}"),
            &box_id(i, 2),
            &box_id(i + 1, 1),
            p.s(i, 2),
        ));
    }
    bundles.push(Bundle::between(
        "N",
        &box_id(n, 2),
        &box_id(n, 1),
        p.s(n, 1),
    ));
    bundles
}

fn bundle_degrees(bundles: &[Bundle], id: &str) -> (usize, usize) {
    let mut bottom = 0;
    let mut top = 0;
    for b in bundles.iter().filter(|b| !b.is_closure()) {
        if b.upper.box_id == id {
            bottom += b.strands;
        }
        if b.lower.box_id == id {
            top += b.strands;
        }
    }
    (bottom, top)
}

/// Type-n diagram: all strands of a left box leave through its bottom, all
/// strands of a right box through its top.
pub fn build_type_n(params: &TypeNParams) -> Result<TemplateDiagram> {
    params.validate()?;
    build_gen_g(&params.as_gen_g())
}

pub fn build_gen_g(params: &GenGParams) -> Result<TemplateDiagram> {
    let n = params.n;
    if n == 0 {
        return Err(Error::Template("n must be at least 1".into()));
    }
    for v in [
        &params.s1,
        &params.s2,
        &params.left_minima,
        &params.right_maxima,
    ] {
        if v.len() != n {
            return Err(Error::Template(format!("expected {n} entries per column")));
        }
    }
    if params.s1.iter().chain(&params.s2).any(|&s| s == 0) {
        return Err(Error::Template(
            "bundle strand counts must be positive".into(),
        ));
    }
    let bundles = gen_bundles(params);
    let mut boxes = Vec::with_capacity(2 * n);
    for i in 1..=n {
        let id = box_id(i, 2);
        let (bottom, top) = bundle_degrees(&bundles, &id);
        debug_assert_eq!(bottom, 0);
        if top % 2 != 0 {
            return Err(Error::Template(format!("odd strand total {top} at {id}")));
        }
        let big_m = params.right_maxima[i - 1];
        boxes.push(BraidBoxSpec::new(id, big_m + top / 2, big_m));
    }
    for i in (1..=n).rev() {
        let id = box_id(i, 1);
        let (bottom, _) = bundle_degrees(&bundles, &id);
        if bottom % 2 != 0 {
            return Err(Error::Template(format!(
                "odd strand total {bottom} at {id}"
            )));
        }
        let m = params.left_minima[i - 1];
        boxes.push(BraidBoxSpec::new(id, m, m + bottom / 2));
    }
    let d = TemplateDiagram { boxes, bundles };
    d.check()?;
    Ok(d)
}

/// Input for [`build_gen_l`]: an explicit height order (bottom to top) and
/// bundle list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GenLSpec {
    pub order: Vec<String>,
    /// `(box, box, strands)`; orientation follows the height order.
    pub bundles: Vec<(String, String, usize)>,
    /// `m_{i,1}`; missing entries are 0.
    pub left_minima: Vec<usize>,
    /// `M_{i,2}`; missing entries are 0.
    pub right_maxima: Vec<usize>,
    /// `(id, minima, maxima)` for boxes outside the two columns.
    pub explicit: Vec<(String, usize, usize)>,
}

/// Checks the column condition for generalized diagrams: every left box sits
/// above every right box, and whenever `X(i,1)` is below `X(j,1)` the box
/// `X(i,2)` is above `X(j,2)`, and vice versa.
pub fn check_reversal(order: &[String]) -> Result<()> {
    let mut left = BTreeMap::new();
    let mut right = BTreeMap::new();
    for (pos, id) in order.iter().enumerate() {
        if let Some((i, j)) = parse_box_id(id) {
            match j {
                1 => left.insert(i, pos),
                2 => right.insert(i, pos),
                _ => return Err(Error::Template(format!("box {id}: column must be 1 or 2"))),
            };
        }
    }
    if let (Some(lo_left), Some(hi_right)) = (left.values().min(), right.values().max()) {
        if lo_left < hi_right {
            return Err(Error::Template(
                "every X(i,1) must lie above every X(j,2)".into(),
            ));
        }
    }
    for (&i, &pi1) in &left {
        for (&j, &pj1) in &left {
            if i == j {
                continue;
            }
            if let (Some(&pi2), Some(&pj2)) = (right.get(&i), right.get(&j)) {
                if (pi1 < pj1) != (pi2 > pj2) {
                    return Err(Error::Template(format!(
                        "order violates the column reversal for X({i},·) and X({j},·)"
                    )));
                }
            }
        }
    }
    Ok(())
}

pub fn build_gen_l(spec: &GenLSpec) -> Result<TemplateDiagram> {
    check_reversal(&spec.order)?;
    let pos = |id: &str| {
        spec.order
            .iter()
            .position(|x| x == id)
            .ok_or_else(|| Error::Template(format!("bundle names unknown box {id}")))
    };
    let mut bundles = Vec::new();
    for (k, (a, b, strands)) in spec.bundles.iter().enumerate() {
        let (pa, pb) = (pos(a)?, pos(b)?);
        let (lo, hi) = if pa <= pb { (a, b) } else { (b, a) };
        bundles.push(Bundle::between(format!("b{k}"), lo, hi, *strands));
    }
    let mut boxes = Vec::new();
    for id in &spec.order {
        let (bottom, top) = bundle_degrees(&bundles, id);
        let (bottom, top) = (bottom as i64, top as i64);
        let explicit = spec.explicit.iter().find(|(x, _, _)| x == id);
        let (m, big_m) = match (explicit, parse_box_id(id)) {
            (Some((_, m, big_m)), _) => (*m as i64, *big_m as i64),
            (None, Some((i, 1))) => {
                let m = spec.left_minima.get(i - 1).copied().unwrap_or(0) as i64;
                (m, m + (bottom - top) / 2)
            }
            (None, Some((i, _))) => {
                let big_m = spec.right_maxima.get(i - 1).copied().unwrap_or(0) as i64;
                (big_m + (top - bottom) / 2, big_m)
            }
            (None, None) => return Err(Error::Template(format!("box {id} needs explicit counts"))),
        };
        if (bottom - top) % 2 != 0 || m < 0 || big_m < 0 {
            return Err(Error::Template(format!(
                "box {id}: strand totals bottom {bottom}, top {top} admit no bridge-position box"
            )));
        }
        boxes.push(BraidBoxSpec::new(id.clone(), m as usize, big_m as usize));
    }
    let d = TemplateDiagram { boxes, bundles };
    d.check()?;
    Ok(d)
}

/// The rearrangeable configuration used for the `8r + 4` thinning: bottom to
/// top `X(1,2)`, `X(2,2)`, a balanced tangle `T`, `X(2,1)`, `X(1,1)`.
///
/// `T` has `t` strands in from below and `t` out the top, with `r` minima
/// under `r` maxima. `X(2,1)` hangs `c1` strands down to `X(1,2)`; `X(2,2)`
/// sends `c2` strands up to `X(1,1)`; neither touches `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlankedParams {
    pub t: usize,
    pub r: usize,
    pub c1: usize,
    pub c2: usize,
    pub m1: usize,
    pub big_m2: usize,
}

impl FlankedParams {
    pub fn key(&self) -> String {
        format!(
            "t={} r={} c1={} c2={} m1={} M2={}",
            self.t, self.r, self.c1, self.c2, self.m1, self.big_m2
        )
    }
}

pub fn build_flanked(p: &FlankedParams) -> Result<TemplateDiagram> {
    if p.t.is_multiple_of(2)
        || !p.c1.is_multiple_of(2)
        || !p.c2.is_multiple_of(2)
        || p.c1 == 0
        || p.c2 == 0
    {
        return Err(Error::Template(
            "flanked configuration needs odd t and positive even c1, c2".into(),
        ));
    }
    build_gen_l(&p.spec())
}

/// Decomposition of a type-n diagram with `s_p = 1` into the summands.
#[derive(Debug, Clone)]
pub struct CompositeSplit {
    pub p: usize,
    pub kp: TypeNParams,
    pub kq: TypeNParams,
    /// The tangle of boxes `X(p+1,·) … X(n,·)`, one strand in and one out.
    pub tangle: MorsePresentation,
    pub owners: Vec<String>,
    pub l: Width,
    pub r: usize,
}

/// Splits along the single strand `s_p = 1`, and checks on the compiled
/// presentations that `w(K^n) = w(K^p) + w(T^q) + l(r − 1) + (l + 1)` and
/// `w(T^q) = w(K^q) + (r − 1)`.
pub fn split_composite(params: &TypeNParams, p: usize) -> Result<CompositeSplit> {
    params.validate()?;
    let n = params.n;
    if p == 0 || p >= n {
        return Err(Error::Hypothesis(format!(
            "split index {p} must lie in 1..{n}"
        )));
    }
    if params.s(p) != 1 {
        return Err(Error::Hypothesis(format!(
            "s_{p} = {} is not 1",
            params.s(p)
        )));
    }
    let sub = |r: std::ops::Range<usize>| TypeNParams {
        n: r.len(),
        s: params.s[r.clone()].to_vec(),
        left_minima: params.left_minima[r.clone()].to_vec(),
        right_maxima: params.right_maxima[r].to_vec(),
    };
    let kp = sub(0..p);
    let kq = sub(p..n);
    let whole = build_type_n(params)?.compile()?;
    let owners: Vec<String> = (p + 1..=n)
        .flat_map(|i| [box_id(i, 1), box_id(i, 2)])
        .collect();
    let o: Vec<&str> = owners.iter().map(String::as_str).collect();
    let (host, tangle, ctx) = tangle::excise_tangle(&whole, &o, 1)?;
    let l = 1 + 2 * params.s[..p - 1].iter().sum::<usize>() as Width;
    let r = tangle.len();
    let kp_p = build_type_n(&kp)?.compile()?;
    let kq_p = build_type_n(&kq)?.compile()?;
    if host != kp_p || ctx.l != l || ctx.w_p != l + 1 {
        return Err(Error::Certification(format!(
            "split at p={p}: host or context does not match K^p (l={}, w(P)={})",
            ctx.l, ctx.w_p
        )));
    }
    let w_t = tangle.width_direct()?;
    let w_n = whole.width_direct()?;
    let w_p = kp_p.width_direct()?;
    let w_q = kq_p.width_direct()?;
    let rr = r as Width;
    if w_n != tangle::lemma22_width(w_p, w_t, l, rr, l + 1) || w_t != w_q + (rr - 1) {
        return Err(Error::Certification(format!(
            "split accounting failed: w(K^n)={w_n}, w(K^p)={w_p}, w(T)={w_t}, w(K^q)={w_q}, l={l}, r={r}"
        )));
    }
    Ok(CompositeSplit {
        p,
        kp,
        kq,
        tangle,
        owners,
        l,
        r,
    })
}

/// Constructor anchors that must hold on every type-n instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorCheck {
    pub gap2: Width,
    pub gap2_expected: Width,
    pub x21_peak: Width,
    pub x21_peak_expected: Width,
    pub x21_peak_is_thick: bool,
    pub entering_law: bool,
    pub a: usize,
    pub b: usize,
    pub middle_events: usize,
    pub middle_floor: usize,
}

impl AnchorCheck {
    pub fn holds(&self) -> bool {
        self.gap2 == self.gap2_expected
            && self.x21_peak == self.x21_peak_expected
            && self.entering_law
            && self.middle_events >= self.middle_floor
    }
}

/// Computes the anchors for `n ≥ 2`: the gap under `X(2,1)`, the widest level
/// through `X(2,1)`, the entering-strand law and the middle-tangle count.
pub fn anchors(params: &TypeNParams) -> Result<AnchorCheck> {
    if params.n < 2 {
        return Err(Error::Unsupported("anchors need n ≥ 2".into()));
    }
    let d = build_type_n(params)?;
    let p = d.compile()?;
    let (s1, s2) = (params.s(1), params.s(2));
    let gaps = d.gap_widths();
    // gap under X(2,1) is the second gap from the top
    let gap2 = gaps[gaps.len() - 2];
    let counts = p.level_counts();
    let range = p.contiguous_range(&[&box_id(2, 1)])?;
    let x21_peak = counts[range.start..=range.end]
        .iter()
        .copied()
        .max()
        .unwrap_or(0);
    let report = p.thick_thin()?;
    let x21_peak_is_thick = report.thick.contains(&x21_peak);
    let entering_law = (1..=params.n).all(|i| {
        let l = params.left_box(i);
        let r = params.right_box(i);
        2 * (l.maxima - l.minima) == params.entering(i)
            && 2 * (r.minima - r.maxima) == params.entering(i)
    });
    let middle_events = (3..=params.n)
        .map(|i| params.left_box(i).events() + params.right_box(i).events())
        .sum();
    Ok(AnchorCheck {
        gap2,
        gap2_expected: (2 * s1 + s2 + 1) as Width,
        x21_peak,
        x21_peak_expected: (params.a() + s1 + 1) as Width,
        x21_peak_is_thick,
        entering_law,
        a: params.a(),
        b: params.b(),
        middle_events,
        middle_floor: params.middle_event_floor(),
    })
}

/// A parsed template file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TemplateSpec {
    TypeN(TypeNParams),
    GenG(GenGParams),
    GenL(GenLSpec),
}

impl TemplateSpec {
    pub fn build(&self) -> Result<TemplateDiagram> {
        match self {
            TemplateSpec::TypeN(p) => build_type_n(p),
            TemplateSpec::GenG(g) => build_gen_g(g),
            TemplateSpec::GenL(l) => build_gen_l(l),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            TemplateSpec::TypeN(_) => "type-n",
            TemplateSpec::GenG(_) => "gen-g",
            TemplateSpec::GenL(_) => "gen-l",
        }
    }

    /// Parses the line format
    ///
    /// ```text
    /// type type-n
    /// n 3
    /// s 3 3 3
    /// left_minima 0 1 0
    /// right_maxima 0 0 0
    /// ```
    ///
    /// `gen-g` uses `s1`/`s2` in place of `s`; `gen-l` takes `order`,
    /// `bundle <a> <b> <strands>` and `box <id> <minima> <maxima>` lines.
    /// `slack <k>` fills unset box counts with `k`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut n = None;
        let mut slack = 0;
        let mut lists: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        let mut order = Vec::new();
        let mut bundles = Vec::new();
        let mut explicit = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut toks = line.split_whitespace();
            let key = toks.next().unwrap_or("");
            let rest: Vec<&str> = toks.collect();
            let err = |tok: &str, msg: &str| Error::Parse {
                line: ln + 1,
                token: tok.to_string(),
                message: msg.to_string(),
            };
            let num = |t: &str| {
                t.parse::<usize>()
                    .map_err(|_| err(t, "expected a non-negative integer"))
            };
            let nums = |v: &[&str]| -> Result<Vec<usize>> {
                v.iter()
                    .flat_map(|t| t.split(','))
                    .filter(|t| !t.is_empty())
                    .map(&num)
                    .collect()
            };
            match key {
                "type" => {
                    let t = rest.first().copied().unwrap_or("");
                    if !["type-n", "gen-g", "gen-l"].contains(&t) {
                        return Err(err(t, "family must be type-n, gen-g or gen-l"));
                    }
                    kind = Some(t.to_string());
                }
                "n" => n = Some(num(rest.first().copied().unwrap_or(""))?),
                "slack" => slack = num(rest.first().copied().unwrap_or(""))?,
                "s" | "s1" | "s2" | "left_minima" | "right_maxima" => {
                    let k = match key {
                        "s" => "s",
                        "s1" => "s1",
                        "s2" => "s2",
                        "left_minima" => "left_minima",
                        _ => "right_maxima",
                    };
                    lists.insert(k, nums(&rest)?);
                }
                "order" => order = rest.iter().map(|s| s.to_string()).collect(),
                "bundle" => {
                    if rest.len() != 3 {
                        return Err(err(line, "bundle takes <box> <box> <strands>"));
                    }
                    bundles.push((rest[0].to_string(), rest[1].to_string(), num(rest[2])?));
                }
                "box" => {
                    if rest.len() != 3 {
                        return Err(err(line, "box takes <id> <minima> <maxima>"));
                    }
                    explicit.push((rest[0].to_string(), num(rest[1])?, num(rest[2])?));
                }
                other => return Err(err(other, "unknown key")),
            }
        }
        let kind = kind.unwrap_or_else(|| "type-n".to_string());
        let fill = |v: Option<&Vec<usize>>, n: usize| v.cloned().unwrap_or_else(|| vec![slack; n]);
        match kind.as_str() {
            "type-n" => {
                let s = lists
                    .get("s")
                    .cloned()
                    .ok_or_else(|| Error::Template("type-n needs an s line".into()))?;
                let n = n.unwrap_or(s.len());
                let p = TypeNParams {
                    n,
                    left_minima: fill(lists.get("left_minima"), n),
                    right_maxima: fill(lists.get("right_maxima"), n),
                    s,
                };
                p.validate()?;
                Ok(TemplateSpec::TypeN(p))
            }
            "gen-g" => {
                let s1 = lists.get("s1").or(lists.get("s")).cloned();
                let s2 = lists.get("s2").or(lists.get("s")).cloned();
                let (s1, s2) = s1
                    .zip(s2)
                    .ok_or_else(|| Error::Template("gen-g needs s1 and s2 lines".into()))?;
                let n = n.unwrap_or(s1.len());
                Ok(TemplateSpec::GenG(GenGParams {
                    n,
                    s1,
                    s2,
                    left_minima: fill(lists.get("left_minima"), n),
                    right_maxima: fill(lists.get("right_maxima"), n),
                }))
            }
            _ => Ok(TemplateSpec::GenL(GenLSpec {
                order,
                bundles,
                left_minima: lists.get("left_minima").cloned().unwrap_or_default(),
                right_maxima: lists.get("right_maxima").cloned().unwrap_or_default(),
                explicit,
            })),
        }
    }

    pub fn serialize(&self) -> String {
        let j = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = format!("type {}\n", self.family());
        match self {
            TemplateSpec::TypeN(p) => {
                out += &format!("n {}\ns {}\n", p.n, j(&p.s));
                out += &format!(
                    "left_minima {}\nright_maxima {}\n",
                    j(&p.left_minima),
                    j(&p.right_maxima)
                );
            }
            TemplateSpec::GenG(g) => {
                out += &format!("n {}\ns1 {}\ns2 {}\n", g.n, j(&g.s1), j(&g.s2));
                out += &format!(
                    "left_minima {}\nright_maxima {}\n",
                    j(&g.left_minima),
                    j(&g.right_maxima)
                );
            }
            TemplateSpec::GenL(l) => {
                out += &format!("order {}\n", l.order.join(" "));
                for (a, b, k) in &l.bundles {
                    out += &format!("bundle {a} {b} {k}\n");
                }
                for (id, m, big_m) in &l.explicit {
                    out += &format!("box {id} {m} {big_m}\n");
                }
                if !l.left_minima.is_empty() {
                    out += &format!("left_minima {}\n", j(&l.left_minima));
                }
                if !l.right_maxima.is_empty() {
                    out += &format!("right_maxima {}\n", j(&l.right_maxima));
                }
            }
        }
        out
    }
}

impl FlankedParams {
    pub fn spec(&self) -> GenLSpec {
        let ids = |i, j| box_id(i, j);
        GenLSpec {
            order: vec![ids(1, 2), ids(2, 2), "T".into(), ids(2, 1), ids(1, 1)],
            bundles: vec![
                (ids(1, 2), ids(1, 1), 1),
                (ids(1, 2), ids(2, 1), self.c1),
                (ids(2, 2), ids(1, 1), self.c2),
                (ids(1, 2), "T".into(), self.t),
                ("T".into(), ids(1, 1), self.t),
            ],
            left_minima: vec![0, self.m1],
            right_maxima: vec![0, self.big_m2],
            explicit: vec![("T".into(), self.r, self.r)],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_n_gaps_and_width() {
        let p = TypeNParams::minimal(&[3, 3, 3]);
        let d = build_type_n(&p).unwrap();
        let ids = d.box_ids();
        assert_eq!(ids, vec!["X1,2", "X2,2", "X3,2", "X3,1", "X2,1", "X1,1"]);
        assert_eq!(d.gap_widths(), vec![4, 10, 16, 10, 4]);
        let k = d.compile().unwrap();
        assert_eq!(k.width_direct().unwrap(), 128);
        for k in 1..=5 {
            assert_eq!(p.gap_closed_form(k), d.gap_widths()[5 - k]);
        }
    }

    #[test]
    fn type_n_box_interior_sums() {
        let d = build_type_n(&TypeNParams::minimal(&[3, 3, 3])).unwrap();
        let p = d.compile().unwrap();
        let counts = p.level_counts();
        let mut sums = Vec::new();
        let mut at = 0;
        for b in &d.boxes {
            sums.push(counts[at + 1..at + b.events()].iter().sum::<Width>());
            at += b.events();
        }
        assert_eq!(sums, vec![2, 14, 26, 26, 14, 2]);
        assert_eq!(d.gap_widths().iter().sum::<Width>(), 44);
    }

    #[test]
    fn single_box_with_closure() {
        let d = TemplateDiagram {
            boxes: vec![BraidBoxSpec::new("X", 1, 1)],
            bundles: vec![Bundle::between("loop", "X", "X", 2)],
        };
        assert_eq!(d.compile().unwrap().kinds_string(), "mM");
    }

    #[test]
    fn type_one() {
        let d = build_type_n(&TypeNParams::minimal(&[1])).unwrap();
        let p = d.compile().unwrap();
        assert_eq!(p.width_direct().unwrap(), 2);
    }

    #[test]
    fn thick_sphere_over_x21() {
        let mut p = TypeNParams::minimal(&[3, 3, 3]);
        p.left_minima[1] = 2;
        let a = anchors(&p).unwrap();
        assert_eq!(a.a, 3 + 3 + 4);
        assert_eq!(a.x21_peak, (a.a + 3 + 1) as Width);
        assert!(a.x21_peak_is_thick);
        assert!(a.holds());
    }

    #[test]
    fn even_s_rejected() {
        assert!(build_type_n(&TypeNParams::minimal(&[3, 2, 3])).is_err());
    }

    #[test]
    fn gen_g_specialises_to_type_n() {
        let p = TypeNParams::with_slack(&[3, 5, 1], 1);
        assert_eq!(
            build_gen_g(&p.as_gen_g()).unwrap(),
            build_type_n(&p).unwrap()
        );
    }

    #[test]
    fn gen_g_unequal_columns() {
        let g = GenGParams::with_slack(&[3, 3, 3], &[5, 3, 3], 0);
        let d = build_gen_g(&g).unwrap();
        let k = d.compile().unwrap();
        assert!(k.is_valid());
        // gap under X(2,1): W + A1 + B1 + A2
        let gaps = d.gap_widths();
        assert_eq!(gaps[gaps.len() - 2], 1 + 3 + 5 + 3);
        let g = GenGParams::with_slack(&[3, 3, 3], &[5, 5, 5], 0);
        assert!(build_gen_g(&g).unwrap().compile().unwrap().is_valid());
    }

    #[test]
    fn gen_g_parity_error() {
        let g = GenGParams::with_slack(&[3, 3, 3], &[4, 3, 3], 0);
        assert!(build_gen_g(&g).is_err());
    }

    #[test]
    fn gen_l_identity_is_type_n() {
        let p = TypeNParams::minimal(&[3, 3, 3]);
        let t = build_type_n(&p).unwrap();
        let spec = GenLSpec {
            order: t.box_ids().iter().map(|s| s.to_string()).collect(),
            bundles: t
                .bundles
                .iter()
                .map(|b| (b.lower.box_id.clone(), b.upper.box_id.clone(), b.strands))
                .collect(),
            ..Default::default()
        };
        let l = build_gen_l(&spec).unwrap();
        assert_eq!(l.compile().unwrap(), t.compile().unwrap());
    }

    #[test]
    fn gen_l_reversal_violation() {
        let order: Vec<String> = ["X1,2", "X2,2", "X1,1", "X2,1"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert!(check_reversal(&order).is_err());
        let order: Vec<String> = ["X1,2", "X2,1", "X2,2", "X1,1"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert!(check_reversal(&order).is_err());
    }

    #[test]
    fn flanked_builds() {
        for r in 0..4 {
            let p = FlankedParams {
                t: 1,
                r,
                c1: 2,
                c2: 2,
                m1: 0,
                big_m2: 0,
            };
            let d = build_flanked(&p).unwrap();
            let k = d.compile().unwrap();
            assert!(k.is_valid());
            assert_eq!(k.len(), 6 + 2 * r);
        }
    }

    #[test]
    fn split_examples() {
        let p = TypeNParams::minimal(&[1, 3]);
        let s = split_composite(&p, 1).unwrap();
        assert_eq!(s.l, 1);
        assert!(s.r >= 2);

        let p = TypeNParams::minimal(&[3, 1, 5]);
        let s = split_composite(&p, 2).unwrap();
        assert_eq!(s.l, 7);
        assert!(s.l >= 2 * 2 - 1 && s.r >= 2);

        assert!(split_composite(&TypeNParams::minimal(&[3, 3]), 1).is_err());
    }
    #[test]
    fn template_round_trip() {
        let text = "type type-n\nn 3\ns 3 5 3 # comment\nleft_minima 0 1 0\nright_maxima 0 0 2\n";
        let t = TemplateSpec::parse(text).unwrap();
        assert_eq!(TemplateSpec::parse(&t.serialize()).unwrap(), t);
        let g = TemplateSpec::parse("type gen-g\ns1 3 3 3\ns2 5 3 3\nslack 1\n").unwrap();
        assert_eq!(TemplateSpec::parse(&g.serialize()).unwrap(), g);
        assert!(g.build().unwrap().compile().unwrap().is_valid());
        let f = FlankedParams {
            t: 3,
            r: 2,
            c1: 2,
            c2: 4,
            m1: 1,
            big_m2: 0,
        };
        let l = TemplateSpec::GenL(f.spec());
        let back = TemplateSpec::parse(&l.serialize()).unwrap();
        assert_eq!(back.build().unwrap(), build_flanked(&f).unwrap());
    }

    #[test]
    fn template_errors() {
        assert!(TemplateSpec::parse("type knot\n").is_err());
        assert!(TemplateSpec::parse("s 3 x\n").is_err());
        assert!(TemplateSpec::parse("colour red\n").is_err());
        assert!(TemplateSpec::parse("s 3 4\n").is_err());
    }
}
