//! Parameter sweeps over diagram families.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{build_flanked, build_type_n, FlankedParams, TypeNParams};
use crate::morse::Width;
use crate::thinning::{self, Hypothesis, ThinningOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    #[default]
    TypeN,
    Flanked,
}

/// A finite grid of instances. Ranges are inclusive `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub family: Family,
    pub n: [usize; 2],
    /// Odd values tried at every index.
    pub s: Vec<usize>,
    /// Extra minimum/maximum pairs given to every box.
    pub slack: [usize; 2],
    /// Hypotheses to run; empty runs every applicable one.
    pub hypotheses: Vec<String>,
    /// Flanked family only: maxima of the middle tangle.
    pub r: [usize; 2],
    /// Flanked family only: strands through the middle tangle.
    pub t: Vec<usize>,
    /// Flanked family only: strands joining each middle box to the far outer box.
    pub c: Vec<usize>,
    /// Record wall-clock time per row. Off by default so reports are
    /// byte-stable.
    pub timing: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            family: Family::TypeN,
            n: [3, 6],
            s: vec![1, 3, 5, 7],
            slack: [0, 2],
            hypotheses: Vec::new(),
            r: [1, 3],
            t: vec![1, 3],
            c: vec![2, 4],
            timing: false,
        }
    }
}

impl SweepSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config {
            path: "<inline>".into(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| {
            Err(Error::Config {
                path: "<spec>".into(),
                message: m,
            })
        };
        if let Some(s) = self.s.iter().find(|s| **s % 2 == 0) {
            return bad(format!("s value {s} is not odd"));
        }
        for h in &self.hypotheses {
            h.parse::<Hypothesis>()?;
        }
        for (name, [lo, hi]) in [("n", self.n), ("slack", self.slack), ("r", self.r)] {
            if lo > hi {
                return bad(format!("{name} range [{lo}, {hi}] is empty"));
            }
        }
        if self.family == Family::TypeN && self.n[0] == 0 {
            return bad("n starts at 1".into());
        }
        Ok(())
    }

    fn filter(&self) -> Result<Vec<Hypothesis>> {
        self.hypotheses.iter().map(|h| h.parse()).collect()
    }

    /// Every type-n instance of the grid, in a fixed order.
    pub fn type_n_instances(&self) -> Vec<TypeNParams> {
        let mut out = Vec::new();
        if self.n[0] > self.n[1] || self.s.is_empty() || self.slack[0] > self.slack[1] {
            return out;
        }
        for n in self.n[0]..=self.n[1] {
            for s in (0..n)
                .map(|_| self.s.iter().copied())
                .multi_cartesian_product()
            {
                for slack in self.slack[0]..=self.slack[1] {
                    out.push(TypeNParams::with_slack(&s, slack));
                }
            }
        }
        out
    }

    pub fn flanked_instances(&self) -> Vec<FlankedParams> {
        let mut out = Vec::new();
        if self.r[0] > self.r[1] {
            return out;
        }
        for r in self.r[0]..=self.r[1] {
            for (&t, &c1, &c2) in self
                .t
                .iter()
                .cartesian_product(&self.c)
                .cartesian_product(&self.c)
                .map(|((a, b), c)| (a, b, c))
            {
                for slack in self.slack[0]..=self.slack[1] {
                    out.push(FlankedParams {
                        t,
                        r,
                        c1,
                        c2,
                        m1: slack,
                        big_m2: slack,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub hypothesis: Hypothesis,
    pub params: String,
    pub w_before: Width,
    pub w_after: Width,
    pub delta: Width,
    pub bound: Option<Width>,
    pub pass: bool,
    pub ms: u128,
    pub error: Option<String>,
}

impl SweepRow {
    fn from_outcome(o: &ThinningOutcome, ms: u128) -> Self {
        SweepRow {
            hypothesis: o.hypothesis,
            params: o.params.clone(),
            w_before: o.w_before,
            w_after: o.w_after,
            delta: o.delta,
            bound: o.bound,
            pass: o.passes(),
            ms,
            error: None,
        }
    }

    fn failed(hypothesis: Hypothesis, params: String, e: Error, ms: u128) -> Self {
        SweepRow {
            hypothesis,
            params,
            w_before: 0,
            w_after: 0,
            delta: 0,
            bound: None,
            pass: false,
            ms,
            error: Some(e.to_string()),
        }
    }

    /// Row label used in reports and for ordering.
    pub fn key(&self) -> String {
        format!("{} {}", self.hypothesis, self.params)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub rows: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepSummary {
    pub per_hypothesis: BTreeMap<Hypothesis, Tally>,
}

impl SweepSummary {
    pub fn total(&self) -> Tally {
        self.per_hypothesis
            .values()
            .fold(Tally::default(), |a, t| Tally {
                rows: a.rows + t.rows,
                passed: a.passed + t.passed,
                failed: a.failed + t.failed,
                errors: a.errors + t.errors,
            })
    }

    pub fn all_pass(&self) -> bool {
        let t = self.total();
        t.failed == 0 && t.errors == 0
    }
}

impl std::fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (h, t) in &self.per_hypothesis {
            writeln!(
                f,
                "{h:<10} rows={} pass={} fail={} error={}",
                t.rows, t.passed, t.failed, t.errors
            )?;
        }
        let t = self.total();
        write!(
            f,
            "{:<10} rows={} pass={} fail={} error={}",
            "total", t.rows, t.passed, t.failed, t.errors
        )
    }
}

/// Hypotheses that apply to a type-n instance.
pub fn applicable(p: &TypeNParams) -> Vec<Hypothesis> {
    let mut v = Vec::new();
    if thinning::lemma32_hypothesis(p) {
        v.push(Hypothesis::Lemma32);
    }
    if thinning::lemma34_hypothesis(p) {
        v.push(Hypothesis::Lemma34);
    }
    let some_one = p.s[..p.n - 1].contains(&1);
    if some_one {
        v.push(Hypothesis::Composite);
    }
    if p.n >= 3 || (p.n == 2 && some_one) {
        v.push(if some_one {
            Hypothesis::Thm36
        } else {
            Hypothesis::Thm35
        });
    }
    v
}

/// Runs one hypothesis on one instance and re-derives both widths from the
/// compiled presentation.
pub fn run_type_n(p: &TypeNParams, h: Hypothesis) -> Result<ThinningOutcome> {
    let o = match h {
        Hypothesis::Lemma32 => thinning::reduce_n_minus_1(p)?,
        Hypothesis::Lemma34 => thinning::reduce_n_minus_2(p)?,
        Hypothesis::Composite => {
            let idx = p.s[..p.n.saturating_sub(1)]
                .iter()
                .position(|&s| s == 1)
                .ok_or_else(|| Error::Hypothesis(format!("{}: no s_p = 1", p.key())))?;
            thinning::composite_reduction(p, idx + 1)?
        }
        Hypothesis::Thm35 | Hypothesis::Thm36 => thinning::thin_pipeline(p)?,
        other => {
            return Err(Error::Unsupported(format!(
                "{other} does not run on type-n instances"
            )))
        }
    };
    let compiled = build_type_n(p)?.compile()?;
    if compiled != o.before
        || compiled.width_direct()? != o.w_before
        || o.after.width_direct()? != o.w_after
    {
        return Err(Error::Certification(format!(
            "{}: widths disagree with the compiled diagram",
            p.key()
        )));
    }
    Ok(o)
}

fn timed<T>(timing: bool, f: impl FnOnce() -> T) -> (T, u128) {
    let start = Instant::now();
    let v = f();
    (
        v,
        if timing {
            start.elapsed().as_millis()
        } else {
            0
        },
    )
}

/// Evaluates the grid in parallel and returns rows sorted by key.
pub fn sweep_verify(spec: &SweepSpec) -> Result<(Vec<SweepRow>, SweepSummary)> {
    spec.validate()?;
    let filter = spec.filter()?;
    let keep = |h: &Hypothesis| filter.is_empty() || filter.contains(h);
    let mut rows: Vec<SweepRow> = match spec.family {
        Family::TypeN => {
            let jobs: Vec<(TypeNParams, Hypothesis)> = spec
                .type_n_instances()
                .into_iter()
                .flat_map(|p| {
                    applicable(&p)
                        .into_iter()
                        .filter(|h| keep(h))
                        .map(move |h| (p.clone(), h))
                })
                .collect();
            jobs.par_iter()
                .map(|(p, h)| {
                    let (r, ms) = timed(spec.timing, || run_type_n(p, *h));
                    match r {
                        Ok(o) => SweepRow::from_outcome(&o, ms),
                        Err(e) => SweepRow::failed(*h, p.key(), e, ms),
                    }
                })
                .collect()
        }
        Family::Flanked => {
            if !keep(&Hypothesis::Prop47) {
                Vec::new()
            } else {
                spec.flanked_instances()
                    .par_iter()
                    .map(|f| {
                        let (r, ms) = timed(spec.timing, || {
                            build_flanked(f).and_then(|d| thinning::prop47_move(&d))
                        });
                        match r {
                            Ok(mut o) => {
                                o.params = f.key();
                                SweepRow::from_outcome(&o, ms)
                            }
                            Err(e) => SweepRow::failed(Hypothesis::Prop47, f.key(), e, ms),
                        }
                    })
                    .collect()
            }
        }
    };
    rows.sort_by_key(|r| r.key());
    let mut summary = SweepSummary::default();
    for r in &rows {
        let t = summary.per_hypothesis.entry(r.hypothesis).or_default();
        t.rows += 1;
        match (&r.error, r.pass) {
            (Some(_), _) => t.errors += 1,
            (None, true) => t.passed += 1,
            (None, false) => t.failed += 1,
        }
    }
    Ok((rows, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_grid() {
        let spec = SweepSpec {
            s: Vec::new(),
            ..Default::default()
        };
        let (rows, summary) = sweep_verify(&spec).unwrap();
        assert!(rows.is_empty());
        assert_eq!(summary.total(), Tally::default());
        let inverted = SweepSpec {
            n: [4, 3],
            ..Default::default()
        };
        assert!(sweep_verify(&inverted).is_err());
    }

    #[test]
    fn lemma34_grid_passes() {
        let spec = SweepSpec::from_toml(
            "n = [3, 4]\ns = [3, 5]\nslack = [0, 1]\nhypotheses = [\"lemma34\"]\n",
        )
        .unwrap();
        let (rows, summary) = sweep_verify(&spec).unwrap();
        assert!(!rows.is_empty());
        assert!(summary.all_pass(), "{summary}");
        assert!(rows.iter().all(|r| r.hypothesis == Hypothesis::Lemma34));
    }

    #[test]
    fn rejects_even_s_and_unknown_keys() {
        assert!(SweepSpec::from_toml("s = [2]").unwrap().validate().is_err());
        assert!(SweepSpec::from_toml("bogus = 1").is_err());
        assert!(SweepSpec::from_toml("hypotheses = [\"lemma99\"]")
            .unwrap()
            .validate()
            .is_err());
    }

    #[test]
    fn flanked_grid() {
        let spec = SweepSpec::from_toml(
            "family = \"flanked\"\nr = [1, 2]\nt = [1]\nc = [2]\nslack = [0, 0]",
        )
        .unwrap();
        let (rows, summary) = sweep_verify(&spec).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(summary.all_pass());
        assert_eq!(rows[0].delta, 12);
    }
}
