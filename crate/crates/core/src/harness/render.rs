//! Text rendering of level profiles.

use std::fmt::Write as _;

use crate::error::Result;
use crate::morse::{MorsePresentation, Width};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    Thick,
    Thin,
    Plain,
}

/// Thick/thin marks for each interior level, using the same padded-profile
/// rule as the width report. Tangles are padded with their boundary counts.
pub fn level_marks(p: &MorsePresentation) -> Vec<Mark> {
    let counts = p.level_counts();
    let n = counts.len();
    if n < 3 {
        return Vec::new();
    }
    let (lo, hi) = if p.is_knot() {
        (0, 0)
    } else {
        (counts[0], counts[n - 1])
    };
    let mut padded = vec![lo];
    padded.extend_from_slice(&counts[1..n - 1]);
    padded.push(hi);
    (1..padded.len() - 1)
        .map(|i| {
            let (l, c, r) = (padded[i - 1], padded[i], padded[i + 1]);
            if c > l && c > r {
                Mark::Thick
            } else if c < l && c < r {
                Mark::Thin
            } else {
                Mark::Plain
            }
        })
        .collect()
}

/// One row per interior level, top level first, with events between rows.
///
/// ```text
///  M  X1,1
///   2 ##        thick
///  m  X1,2
/// ```
pub fn render_profile(p: &MorsePresentation) -> Result<String> {
    p.check_structure()?;
    let counts = p.level_counts();
    let marks = level_marks(p);
    let cw = counts
        .iter()
        .max()
        .copied()
        .unwrap_or(0)
        .to_string()
        .len()
        .max(2);
    let bar_w = counts.iter().copied().max().unwrap_or(0).max(0) as usize;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "punctures {}/{}  width {}",
        p.punctures_bottom,
        p.punctures_top,
        p.width_direct()?
    );
    for k in (0..p.len()).rev() {
        let e = &p.events[k];
        let _ = writeln!(out, " {}  {}", e.kind.symbol(), e.owner);
        if k > 0 {
            let c: Width = counts[k];
            let bar = "#".repeat(c.max(0) as usize);
            let tag = match marks[k - 1] {
                Mark::Thick => "thick",
                Mark::Thin => "thin",
                Mark::Plain => "",
            };
            let line = format!("{c:>cw$} {bar:<bar_w$}  {tag}");
            let _ = writeln!(out, "{}", line.trim_end());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bars(s: &str) -> Vec<usize> {
        s.lines()
            .filter(|l| l.contains('#'))
            .map(|l| l.chars().filter(|c| *c == '#').count())
            .collect()
    }

    #[test]
    fn single_level() {
        let p = MorsePresentation::from_symbols(0, "mM");
        let s = render_profile(&p).unwrap();
        assert_eq!(bars(&s), vec![2]);
        assert!(s.contains("thick"));
    }

    #[test]
    fn bars_follow_profile() {
        let p = MorsePresentation::from_symbols(0, "mmMM");
        assert_eq!(bars(&render_profile(&p).unwrap()), vec![2, 4, 2]);
    }

    #[test]
    fn marks_agree_with_thick_thin() {
        let p = MorsePresentation::from_symbols(0, "mmMmMM");
        let report = p.thick_thin().unwrap();
        let counts = p.level_counts();
        let marks = level_marks(&p);
        let thick: Vec<Width> = marks
            .iter()
            .zip(&counts[1..])
            .filter(|(m, _)| **m == Mark::Thick)
            .map(|(_, c)| *c)
            .collect();
        let thin: Vec<Width> = marks
            .iter()
            .zip(&counts[1..])
            .filter(|(m, _)| **m == Mark::Thin)
            .map(|(_, c)| *c)
            .collect();
        assert_eq!(thick, report.thick);
        assert_eq!(thin, report.thin);
        let a = render_profile(&p).unwrap();
        assert_eq!(a, render_profile(&p).unwrap());
        assert_eq!(a.matches("thin").count(), 1);
    }
}
