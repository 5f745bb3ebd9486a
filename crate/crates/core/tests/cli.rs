use std::path::Path;
use std::process::{Command, Output};

use tubelab::cli_report::document::CertificateDocument;
use tubelab::predicates::Verdict;

fn tubelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tubelab")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn strip_spec_file_fails_jpaff() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("strip.toml");
    std::fs::write(&spec, "name = \"strip\"\n\n[strip]\ny_lo = 0\ny_hi = 4\nmid = 2\n").unwrap();
    let out_dir = dir.path().join("out");
    let o = tubelab(&["analyze", "--spec", p(&spec), "--point", "0,2", "--K", "6", "--N", "5", "--out", p(&out_dir), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let names: Vec<_> = std::fs::read_dir(&out_dir).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, ["certificate.json"]);
    let doc = CertificateDocument::parse(&std::fs::read_to_string(out_dir.join("certificate.json")).unwrap()).unwrap();
    assert_eq!(doc.report.property_jpaff.verdict, Verdict::FailsUpToK);
    assert_eq!(tubelab(&["verify", p(&out_dir.join("certificate.json"))]).status.code(), Some(0));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = tubelab(&["analyze", "--preset", "fig1", "--point", "10,10", "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not in domain"));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[[obstacles]]\nkind = \"wedge\"\nx = 0\nspan = [0, 1]\n").unwrap();
    let o = tubelab(&["analyze", "--spec", p(&bad), "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kind"), "{}", stderr(&o));

    assert_eq!(tubelab(&["plot", "--preset", "fig1", "--n", "0", "--out", p(dir.path())]).status.code(), Some(1));
    assert_eq!(tubelab(&["analyze", "--preset", "fig1", "--format", "pdf"]).status.code(), Some(1));
    assert_eq!(tubelab(&["analyze", "--preset", "fig9"]).status.code(), Some(1));
    assert_eq!(tubelab(&["analyze"]).status.code(), Some(1));
    assert_eq!(tubelab(&["verify", p(&dir.path().join("missing.json"))]).status.code(), Some(1));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn verify_rejects_stale_and_tampered_documents() {
    let dir = tempfile::tempdir().unwrap();
    let o = tubelab(&["analyze", "--preset", "fig1", "--K", "6", "--N", "10", "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cert = dir.path().join("certificate.json");
    assert_eq!(tubelab(&["verify", p(&cert)]).status.code(), Some(0));
    let text = std::fs::read_to_string(&cert).unwrap();

    let stale = dir.path().join("stale.json");
    std::fs::write(&stale, text.replacen("\"schema_version\": 1", "\"schema_version\": 0", 1)).unwrap();
    let o = tubelab(&["verify", p(&stale)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("regenerate"));

    let mut doc = CertificateDocument::parse(&text).unwrap();
    doc.report.obstruction.as_mut().unwrap().rows[3].op_norm_df += 0.5;
    let forged = dir.path().join("forged.json");
    std::fs::write(&forged, doc.to_canonical_json()).unwrap();
    let o = tubelab(&["verify", p(&forged)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("checksum"));
    doc.checksum = doc.compute_checksum();
    std::fs::write(&forged, doc.to_canonical_json()).unwrap();
    let o = tubelab(&["verify", p(&forged)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("obstruction"), "{}", stderr(&o));
}

#[test]
fn plot_and_presets() {
    let dir = tempfile::tempdir().unwrap();
    let o = tubelab(&["plot", "--preset", "fig2", "--n", "3", "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(dir.path().join("figure.svg")).unwrap();
    assert_eq!(svg.matches("class=\"tooth\"").count(), 4);
    let csv = std::fs::read_to_string(dir.path().join("band.csv")).unwrap();
    assert!(csv.starts_with("x1,band_lo,band_hi\n"));

    let o = tubelab(&["presets"]);
    assert_eq!(o.status.code(), Some(0));
    let listing = String::from_utf8(o.stdout).unwrap();
    for name in ["fig1", "fig2", "strip"] {
        assert!(listing.contains(&format!("# preset = \"{name}\"")));
    }
}

#[test]
fn analysis_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = tubelab(&["analyze", "--preset", "fig2", "--K", "8", "--N", "12", "--out", p(d.path())]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["certificate.json", "metric_scan.csv", "band.csv", "figure.svg"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}
