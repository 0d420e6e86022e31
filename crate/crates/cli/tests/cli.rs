use std::path::PathBuf;
use std::process::Command;

use waldcheck_cli::{fixtures, run, Document, EXIT_DATA, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_NO_INPUT, EXIT_PASS, EXIT_USAGE};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

/// Runs in-process, returning `(exit code, stdout, stderr)`.
fn waldcheck(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("waldcheck".to_string()).chain(args.iter().map(|a| {
        if a.contains('.') && !a.starts_with('-') && std::path::Path::new(&fixture(a)).exists() {
            fixture(a)
        } else {
            a.to_string()
        }
    }));
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("waldcheck-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn fixtures_are_up_to_date() {
    for (name, contents) in fixtures::generate().unwrap() {
        let on_disk = std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(on_disk, contents, "{name} differs from the generated document");
    }
}

#[test]
fn fixtures_round_trip() {
    for (name, _) in fixtures::generate().unwrap() {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let doc = Document::parse(&text).unwrap_or_else(|e| panic!("{name}: {e:?}"));
        assert_eq!(doc.emit(), text, "{name}");
        assert_eq!(Document::parse(&doc.emit()).unwrap().emit(), text);
    }
}

#[test]
fn exit_codes_of_the_fixtures() {
    let cases: &[(&[&str], i32)] = &[
        (&["verify-waldhausen", "pset3.cat"], EXIT_PASS),
        (&["verify-waldhausen", "broken-c1.cat"], EXIT_FAIL),
        (&["verify-waldhausen", "starved.cat"], EXIT_INCONCLUSIVE),
        (&["check-wfs", "pset3.cat"], EXIT_PASS),
        (&["--backend", "pset:2", "check-wfs", "--right", "pset2-surjections.cls"], EXIT_PASS),
        (&["--backend", "pset:2", "check-wfs", "--right", "pset2-injections.cls"], EXIT_FAIL),
        (&["quiver", "chain3.qv", "rooted-seq"], EXIT_PASS),
        (&["quiver", "fork.qv", "subquiver", "7"], EXIT_DATA),
        (&["rep-classify", "--quiver", "chain2.qv", "--morphism", "identity.mor"], EXIT_PASS),
        (&["rep-classify", "--quiver", "chain2.qv", "--morphism", "a2-vect.mor"], EXIT_PASS),
        (&["rep-classify", "--quiver", "chain2.qv", "--morphism", "non-natural.mor"], EXIT_DATA),
        (&["total", "codomain-pset1.opf"], EXIT_PASS),
        (&["total", "corrupted-cleavage.opf"], EXIT_FAIL),
        (&["--backend", "pset:1", "fiber-iso", "--quiver", "chain2.qv"], EXIT_PASS),
        (&["--backend", "pset:2", "rep-verify", "--quiver", "cycle3.qv"], EXIT_DATA),
        (&["--backend", "pset:2", "rep-verify", "--quiver", "single.qv"], EXIT_PASS),
        (&["--backend", "pset:2", "total", "--builtin", "codomain"], EXIT_PASS),
        (&["total"], EXIT_USAGE),
        (&["verify-waldhausen"], EXIT_USAGE),
        (&["no-such-command"], EXIT_USAGE),
    ];
    for (args, code) in cases {
        let (got, out, err) = waldcheck(args);
        assert_eq!(got, *code, "{args:?}\nstdout:\n{out}\nstderr:\n{err}");
    }
}

#[test]
fn reports_name_the_failure() {
    let (_, out, _) = waldcheck(&["verify-waldhausen", "broken-c1.cat"]);
    let c1 = out.lines().find(|l| l.starts_with("C1")).unwrap();
    assert!(c1.contains("fail") && c1.contains("2:2 [1->2,2->1]"), "{c1}");
    let (_, out, _) = waldcheck(&["total", "corrupted-cleavage.opf"]);
    assert!(out.contains("lift of 0:1 [] at 0:0 [] is not cocartesian"), "{out}");
    let (_, out, _) = waldcheck(&["rep-classify", "--quiver", "chain2.qv", "--morphism", "a2-vect.mor"]);
    assert!(out.contains("cofibration: no\nweak equivalence: no"), "{out}");
}

#[test]
fn quiver_commands() {
    let (_, out, _) = waldcheck(&["quiver", "chain3.qv", "rooted-seq"]);
    assert_eq!(out, "V_1 = {1}\nV_2 = {1, 2}\nV_3 = {1, 2, 3}\nzeta = 3\n");
    assert_eq!(waldcheck(&["quiver", "cycle3.qv", "is-left-rooted"]).1, "false\n");
    assert_eq!(waldcheck(&["quiver", "empty.qv", "is-left-rooted"]).1, "true\n");
    let (_, out, _) = waldcheck(&["quiver", "fork.qv", "subquiver", "1"]);
    let doc = Document::parse(&out).unwrap();
    assert_eq!(doc.kind(), "quiver");
    let q = waldcheck_cli::format::parse_quiver(&doc).unwrap();
    assert_eq!(q.vertices(), &[1, 2]);
}

#[test]
fn parse_errors_carry_a_position() {
    let path = scratch("bad.qv", "kind: quiver\nname: bad\n\nVERTICES\n1\n2\n\nARROWS\n1 1 x\n");
    let (code, _, err) = waldcheck(&["quiver", path.to_str().unwrap(), "rooted-seq"]);
    assert_eq!(code, EXIT_USAGE);
    let prefix = format!("{}:9:", path.display());
    assert!(err.starts_with(&prefix), "{err}");
    let column: usize = err[prefix.len()..].split(':').next().unwrap().parse().unwrap();
    assert_eq!(column, 5);
}

#[test]
fn missing_input_is_reported() {
    let (code, _, err) = waldcheck(&["verify-waldhausen", "/nonexistent/pset.cat"]);
    assert_eq!(code, EXIT_NO_INPUT);
    assert!(err.starts_with("cannot read /nonexistent/pset.cat"), "{err}");
}

#[test]
fn records_are_json_lines() {
    let (code, out, _) = waldcheck(&["--format", "records", "verify-waldhausen", "broken-c1.cat"]);
    assert_eq!(code, EXIT_FAIL);
    let records: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let c1 = records.iter().find(|r| r["axiom"] == "C1").unwrap();
    assert_eq!(c1["status"], "fail");
    assert!(c1["witness"].as_str().unwrap().contains("2:2 [1->2,2->1]"));
    assert_eq!(records.last().unwrap()["verdict"], "fail");
    assert_eq!(records.iter().filter(|r| r["record"] == "axiom").count(), 8);
}

#[test]
fn budget_flag_and_environment() {
    assert_eq!(waldcheck(&["--budget", "0", "verify-waldhausen", "pset3.cat"]).0, EXIT_INCONCLUSIVE);
    let bin = env!("CARGO_BIN_EXE_waldcheck");
    let status = |budget: Option<&str>, file: &str| {
        let mut cmd = Command::new(bin);
        cmd.args(["verify-waldhausen", &fixture(file)]).env_remove("WALDCHECK_BUDGET");
        if let Some(b) = budget {
            cmd.env("WALDCHECK_BUDGET", b);
        }
        cmd.output().unwrap().status.code().unwrap()
    };
    assert_eq!(status(None, "pset3.cat"), EXIT_PASS);
    assert_eq!(status(Some("0"), "pset3.cat"), EXIT_INCONCLUSIVE);
    assert_eq!(status(Some("lots"), "pset3.cat"), EXIT_USAGE);
    // a document budget caps a larger flag
    assert_eq!(status(Some("1000000"), "starved.cat"), EXIT_INCONCLUSIVE);
}

#[test]
fn binary_exit_codes_match_the_library() {
    let bin = env!("CARGO_BIN_EXE_waldcheck");
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code().unwrap();
    assert_eq!(code(&["verify-waldhausen", &fixture("broken-c1.cat")]), EXIT_FAIL);
    assert_eq!(code(&["verify-waldhausen", "/nonexistent"]), EXIT_NO_INPUT);
    assert_eq!(code(&["--help"]), EXIT_PASS);
}
