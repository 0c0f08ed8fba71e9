use std::fs;

use thinwidth::harness::report::render_report;
use thinwidth::harness::{report_emit, sweep_verify, Format, SweepSpec};
use thinwidth::Error;

const SPEC: &str = r#"
family = "type-n"
n = [3, 4]
s = [1, 3, 5]
slack = [0, 1]
"#;

#[test]
fn sweep_is_deterministic() {
    let spec = SweepSpec::from_toml(SPEC).unwrap();
    let (rows, summary) = sweep_verify(&spec).unwrap();
    let (rows2, _) = sweep_verify(&spec).unwrap();
    assert!(summary.all_pass(), "{summary}");
    assert_eq!(
        render_report(&rows, Format::Csv).unwrap(),
        render_report(&rows2, Format::Csv).unwrap()
    );
    let keys: Vec<String> = rows.iter().map(|r| r.key()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn flanked_sweep() {
    let spec = SweepSpec::from_toml(
        "family = \"flanked\"\nr = [0, 2]\nt = [1, 3]\nc = [2, 4]\nslack = [0, 1]\n",
    )
    .unwrap();
    let (rows, summary) = sweep_verify(&spec).unwrap();
    assert!(!rows.is_empty());
    assert!(summary.all_pass(), "{summary}");
}

#[test]
fn report_files() {
    let spec = SweepSpec::from_toml(
        "n = [3, 3]\ns = [3]\nslack = [0, 0]\nhypotheses = [\"lemma32\", \"lemma34\"]\n",
    )
    .unwrap();
    let (rows, _) = sweep_verify(&spec).unwrap();
    assert_eq!(rows.len(), 2);
    let dir = std::env::temp_dir().join(format!("thinwidth-sweep-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    for (name, sep) in [("r.csv", ','), ("r.tsv", '\t')] {
        let path = dir.join(name);
        report_emit(&rows, Format::from_path(&path), &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(header.split(sep).count(), 7, "{header}");
        assert_eq!(text.lines().count(), 3);
    }
    let missing = dir.join("no/such/dir/r.csv");
    assert!(matches!(
        report_emit(&rows, Format::Csv, &missing),
        Err(Error::Io { .. })
    ));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_specs_are_rejected() {
    assert!(SweepSpec::from_toml("colour = 3").is_err());
    for text in ["n = [5, 3]", "s = [2]", "hypotheses = [\"lemma99\"]"] {
        let spec = SweepSpec::from_toml(text).unwrap();
        assert!(spec.validate().is_err(), "{text}");
        assert!(sweep_verify(&spec).is_err(), "{text}");
    }
}
