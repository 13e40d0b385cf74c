use std::path::Path;
use std::process::{Command, Output};

fn berryline(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_berryline"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn berry_two_level_json() {
    let o = berryline(&[
        "berry",
        "two-level",
        "--Rc",
        "1",
        "--r",
        "1",
        "--points",
        "100000",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = json(&o);
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["command"], "berry");
    let plus = &v["results"]["phases"][1];
    assert_eq!(plus["branch"], "plus");
    let num = plus["numerical"].as_f64().unwrap();
    assert!((num + 0.920_151_184_510_610_1).abs() <= 1e-8);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "spectrum", "--Rc", "1", "--r", "0.5", "--m-min", "-2", "--m-max", "2",
    ];
    assert_eq!(berryline(&args).stdout, berryline(&args).stdout);
}

#[test]
fn csv_has_header_and_lf_endings() {
    let o = berryline(&[
        "spectrum", "--Rc", "1", "--r", "1", "--m-min", "0", "--m-max", "1", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("m,branch,gamma,p_quantized,energy_exact,energy_first_order")
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn both_formats_write_two_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.out");
    let o = berryline(&[
        "broaden",
        "--Rc",
        "1",
        "--l",
        "1e-3",
        "--format",
        "both",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let j: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.json")).unwrap())
            .unwrap();
    assert_eq!(j["command"], "broaden");
    let csv = std::fs::read_to_string(dir.path().join("run.csv")).unwrap();
    assert!(csv.lines().count() >= 2);
    assert!(!Path::new(&out).exists());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# broadening run\nRc = 1\nl = 1e-2\nsamples = 41\n").unwrap();
    let from_file = json(&berryline(&["broaden", "--config", cfg.to_str().unwrap()]));
    assert_eq!(from_file["inputs"]["l"], "1e-2");
    let overridden = json(&berryline(&[
        "broaden",
        "--config",
        cfg.to_str().unwrap(),
        "--l",
        "1e-3",
    ]));
    assert_eq!(overridden["inputs"]["l"], "1e-3");
    assert_eq!(
        overridden["inputs"]["samples"],
        from_file["inputs"]["samples"]
    );
}

#[test]
fn unknown_config_key_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "Rc = 1\nfrobnicate = 3\n").unwrap();
    let o = berryline(&["broaden", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("frobnicate"));
}

#[test]
fn exit_codes() {
    assert_eq!(
        berryline(&[
            "berry",
            "two-level",
            "--Rc",
            "1",
            "--r",
            "1",
            "--points",
            "4"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        berryline(&["berry", "two-level", "--Rc", "-1", "--r", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(berryline(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        berryline(&["berry", "two-level", "--Rc", "0", "--r", "0"])
            .status
            .code(),
        Some(3)
    );
    // Too few points for the default phase tolerance.
    assert_eq!(
        berryline(&[
            "berry",
            "two-level",
            "--Rc",
            "1",
            "--r",
            "1",
            "--points",
            "256"
        ])
        .status
        .code(),
        Some(3)
    );
    assert_eq!(
        berryline(&["scaling", "--ratios", "1e-3,2e-3,3e-3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn help_succeeds() {
    let o = berryline(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for cmd in ["berry", "spectrum", "broaden", "scaling", "mead-compare"] {
        assert!(stdout(&o).contains(cmd));
    }
}
