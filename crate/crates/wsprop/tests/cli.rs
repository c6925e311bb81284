use std::path::PathBuf;
use std::process::{Command, Output};

fn wsprop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wsprop")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wsprop-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn passing_check_exits_zero() {
    let o = wsprop(&["check", "mock:convertcooking", "--seed", "11"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        format!(
            "Testing property: prop_ChangeCookingUnit_responds\n{}\nOK: Passed 100 test(s).\n",
            ".".repeat(100)
        )
    );
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed 11"));
}

#[test]
fn failing_check_exits_one_with_shrunk_value() {
    let o = wsprop(&["check", "mock:delete", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("!\nFailed: After "), "{out}");
    assert!(out.ends_with("time(s))\n[[],[]]\n"), "{out}");
}

#[test]
fn generate_then_edit_then_check() {
    let spec = temp("delete.genspec");
    let o = wsprop(&["generate", "mock:delete", "--out", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&spec).unwrap();
    let plain = wsprop(&["check", "mock:delete", "--seed", "9"]);
    let with_spec = wsprop(&[
        "check",
        "mock:delete",
        "--seed",
        "9",
        "--genspec",
        spec.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&plain), stdout(&with_spec));
    assert_eq!(plain.status.code(), with_spec.status.code());

    let edited = text.replace(
        "gen delete_1_c = list(0, inf, int(32, 127))",
        "gen delete_1_c = list(1, 1, int(32, 127))",
    );
    assert_ne!(edited, text);
    std::fs::write(&spec, edited).unwrap();
    let o = wsprop(&[
        "check",
        "mock:delete",
        "--seed",
        "9",
        "--genspec",
        spec.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn usage_and_genspec_errors_exit_two() {
    assert_eq!(wsprop(&["check"]).status.code(), Some(2));
    assert_eq!(wsprop(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(wsprop(&["check", "mock:nope"]).status.code(), Some(2));
    assert_eq!(wsprop(&["check", "mock:delete", "--tests", "0"]).status.code(), Some(2));
    let bad = temp("bad.genspec");
    std::fs::write(&bad, "gen delete_1_c = list(1, 1,\n").unwrap();
    let o = wsprop(&["check", "mock:delete", "--genspec", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"), "{:?}", o);
}

#[test]
fn wsdl_and_transport_errors_exit_three() {
    assert_eq!(wsprop(&["check", "http://127.0.0.1:1/svc?WSDL"]).status.code(), Some(3));
    let junk = temp("junk.wsdl");
    std::fs::write(&junk, "<html>").unwrap();
    let o = wsprop(&["check", junk.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(
        String::from_utf8_lossy(&o.stderr)
            .lines()
            .filter(|l| l.starts_with("wsprop: ") && !l.contains("seed"))
            .count(),
        1
    );
}

#[test]
fn json_report() {
    let o = wsprop(&[
        "check",
        "mock:placeorder",
        "--seed",
        "2",
        "--tests",
        "20",
        "--json",
        "--check-output-type",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc[0]["operation"], "placeOrder");
    assert_eq!(doc[0]["status"], "passed");
    assert_eq!(doc[0]["count"], 20);
}

#[test]
fn file_wsdl_pointing_at_a_served_mock() {
    let server = wsprop::mocks::MockServer::start(wsprop::mocks::convert_cooking(), 0).unwrap();
    let path = temp("cooking.wsdl");
    std::fs::write(&path, wsprop::mocks::convert_cooking().wsdl(server.url())).unwrap();
    let o = wsprop(&["check", path.to_str().unwrap(), "--seed", "1", "--tests", "25"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).ends_with("OK: Passed 25 test(s).\n"));
}
