use std::fs;
use std::path::Path;
use std::process::Command;

use mmconc::builtins::{builtin, BUILTINS};
use mmconc::commands::{expand, Command as Cmd, Outcome, RunOptions};
use mmconc::error::exit;
use mmconc::exit_code;
use mmconc::schema::parse;

fn mmconc(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mmconc"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn builtins_are_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    for name in BUILTINS {
        let sub = builtin(name).unwrap().name();
        let runs: Vec<_> = ["a", "b"]
            .iter()
            .map(|tag| {
                let dir = tmp.path().join(format!("{name}-{tag}"));
                let out = mmconc(&[sub, "--builtin", name, "--seed", "7"], &dir);
                assert_eq!(
                    out.status.code(),
                    Some(0),
                    "{name}: {}",
                    String::from_utf8_lossy(&out.stderr)
                );
                read_dir_sorted(&dir)
            })
            .collect();
        assert!(runs[0].iter().any(|(f, _)| f.ends_with(".csv")), "{name}");
        assert_eq!(runs[0], runs[1], "{name}");
    }
}

#[test]
fn generated_objects_round_trip() {
    let Cmd::Generate(config) = builtin("standard-objects").unwrap() else {
        panic!("standard-objects is a generate scenario");
    };
    for item in &config.objects {
        let (explicit, _, points) = expand(&item.object).unwrap();
        let text = serde_json::to_string(&explicit).unwrap();
        let back = parse(&text, "round-trip").unwrap();
        assert_eq!(explicit, back, "{}", item.name);
        let (again, _, again_points) = expand(&back).unwrap();
        assert_eq!(explicit, again, "{}", item.name);
        assert_eq!(points, again_points);
    }
}

#[test]
fn generated_file_reparses_to_itself() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mmconc(&["generate", "--builtin", "standard-objects"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(tmp.path().join("generated.json")).unwrap();
    let config: mmconc::commands::GenerateConfig = parse(&text, "generated.json").unwrap();
    for item in &config.objects {
        let (explicit, _, _) = expand(&item.object).unwrap();
        assert_eq!(explicit, item.object, "{}", item.name);
    }
}

#[test]
fn malformed_config_exits_with_position() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.json");
    fs::write(
        &path,
        "{\n  \"spaces\": [\n    { \"space\": { \"dist\": [[0, 1], [1, 0]] }, }\n  ]\n}\n",
    )
    .unwrap();
    let out = mmconc(
        &["obsdiam", "--config", path.to_str().unwrap()],
        &tmp.path().join("out"),
    );
    assert_eq!(out.status.code(), Some(exit::CONFIG));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 3"), "{stderr}");
}

#[test]
fn invalid_values_are_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("alphas.json");
    fs::write(
        &path,
        r#"{"spaces": [{"space": {"generator": "hypercube", "n": 2}}], "alphas": [1.5]}"#,
    )
    .unwrap();
    let out = mmconc(
        &["obsdiam", "--config", path.to_str().unwrap()],
        &tmp.path().join("out"),
    );
    assert_eq!(out.status.code(), Some(exit::CONFIG));
    let out = mmconc(
        &["obsdiam", "--builtin", "no-such-scenario"],
        &tmp.path().join("out"),
    );
    assert_eq!(out.status.code(), Some(exit::CONFIG));
    let out = mmconc(
        &["obsdiam", "--builtin", "cube-to-point"],
        &tmp.path().join("out"),
    );
    assert_eq!(out.status.code(), Some(exit::CONFIG));
}

#[test]
fn failed_rows_give_partial_exit() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("flows.json");
    // the second scenario's ν is not invariant
    fs::write(
        &path,
        r#"{"scenarios": [
            {"name": "ok", "flow": {"generator": "regular", "group": {"generator": "cyclic", "n": 3}},
             "measures": [{"uniform": true}], "nu": {"uniform": true}, "elements": [1]},
            {"name": "bad", "flow": {"generator": "regular", "group": {"generator": "cyclic", "n": 3}},
             "measures": [{"uniform": true}], "nu": {"point": 0}, "elements": [1]}
        ]}"#,
    )
    .unwrap();
    let dir = tmp.path().join("out");
    let out = mmconc(&["flow-check", "--config", path.to_str().unwrap()], &dir);
    assert_eq!(out.status.code(), Some(exit::PARTIAL));
    let csv = fs::read_to_string(dir.join("flow_check.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("ok,"));
    let manifest = fs::read_to_string(dir.join("manifest.json")).unwrap();
    assert!(manifest.contains("bad"));
}

#[test]
fn assertions_take_precedence_over_partial_failures() {
    let mut outcome = Outcome::default();
    assert_eq!(exit_code(&outcome), exit::SUCCESS);
    outcome.errors.push("row".into());
    assert_eq!(exit_code(&outcome), exit::PARTIAL);
    outcome.assertion_failures.push("check".into());
    assert_eq!(exit_code(&outcome), exit::ASSERTION);
}

#[test]
fn timing_fills_runtime_only_on_request() {
    let cmd = builtin("sym-chain").unwrap();
    let plain = cmd.run(&RunOptions::default()).unwrap();
    let timed = cmd
        .run(&RunOptions {
            timing: true,
            ..RunOptions::default()
        })
        .unwrap();
    let last = |o: &Outcome| {
        o.tables[0]
            .rows
            .iter()
            .map(|r| r.last().unwrap().clone())
            .collect::<Vec<_>>()
    };
    assert!(last(&plain).iter().all(String::is_empty));
    assert!(last(&timed).iter().all(|v| v.parse::<f64>().is_ok()));
}

#[test]
fn mmdist_from_separate_files() {
    let tmp = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = tmp.path().join(name);
        fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let space = write("x.json", r#"{"dist": [[0, 1], [1, 0]]}"#);
    let mu = write("mu.json", r#"{"point": 0}"#);
    let nu = write("nu.json", r#"{"point": 1}"#);
    let dir = tmp.path().join("out");
    let out = mmconc(
        &[
            "mmdist", "--space", &space, "--mu", &mu, "--nu", &nu, "--oracle",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.join("mmdist.csv")).unwrap();
    assert!(csv.contains("\nmt,1,\n"), "{csv}");
    assert!(csv.contains("\nprokhorov,1,\n"), "{csv}");
}
