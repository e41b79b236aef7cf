use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_specshape"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SPEC: &str = r#"{"sweep": {"parameter": "lambda", "values": [0.2, 0.4]}, "simulate": true,
    "sim": {"horizon": 22000, "warmup": 2000, "trials": 2, "seed": 5}}"#;

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "spec.json", SPEC);
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "4"].iter().enumerate() {
        for cmd in ["analyze", "simulate"] {
            let out = dir.path().join(format!("{cmd}{i}.csv"));
            let st = bin()
                .env("RAYON_NUM_THREADS", threads)
                .args([cmd, "--config"])
                .arg(&cfg)
                .arg("--out")
                .arg(&out)
                .args(["--formula-mode", "both"])
                .status()
                .unwrap();
            assert!(st.success());
            outputs.push(std::fs::read(&out).unwrap());
        }
    }
    assert_eq!(outputs[0], outputs[2]);
    assert_eq!(outputs[1], outputs[3]);
    let text = String::from_utf8(outputs[1].clone()).unwrap();
    assert!(text.starts_with("param,value,trial,slots,mode,strategy,N,L,m,lambda,epsilon,B,k,q,seed,"));
}

#[test]
fn seed_flag_changes_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "spec.json", SPEC);
    let run = |seed: &str| {
        let o = bin().args(["simulate", "--seed", seed, "--config"]).arg(&cfg).output().unwrap();
        assert!(o.status.success());
        o.stdout
    };
    let (a, b) = (run("5"), run("6"));
    assert_ne!(a, b);
    assert!(String::from_utf8(b).unwrap().lines().nth(1).unwrap().contains(",6,22000,2000,"));
}

#[test]
fn compare_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "spec.json", SPEC);
    let o = bin().args(["compare", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8(o.stderr).unwrap().contains("accuracy band: hold"));

    // the accuracy band applies to the rederived formulas only
    let o = bin()
        .args(["compare", "--formula-mode", "as-printed", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));

    // analysis of a different sweep than the simulation
    let a = dir.path().join("a.csv");
    let s = dir.path().join("s.csv");
    let other = write(dir.path(), "other.json", &SPEC.replace("0.2, 0.4", "0.3"));
    assert!(bin().args(["analyze", "--config"]).arg(&other).arg("--out").arg(&a).status().unwrap().success());
    assert!(bin().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&s).status().unwrap().success());
    let o = bin()
        .args(["compare", "--config"])
        .arg(&cfg)
        .arg("--analytic")
        .arg(&a)
        .arg("--simulated")
        .arg(&s)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("mismatched sweep grids"));

    // simulated throughputs inflated by 10% violate the accuracy band
    assert!(bin().args(["analyze", "--config"]).arg(&cfg).arg("--out").arg(&a).status().unwrap().success());
    let mut rows: Vec<specshape::simulate::SimulateRow> =
        specshape::csvio::read_rows(std::fs::File::open(&s).unwrap()).unwrap();
    for r in &mut rows {
        r.eta_s_hat *= 1.1;
    }
    std::fs::write(&s, specshape::csvio::to_string(&rows).unwrap()).unwrap();
    let o = bin()
        .args(["compare", "--config"])
        .arg(&cfg)
        .arg("--analytic")
        .arg(&a)
        .arg("--simulated")
        .arg(&s)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("accuracy band: violated"));
}

#[test]
fn bad_specs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    for (name, json, msg) in [
        ("empty.json", r#"{"sweep": {"parameter": "k", "values": []}}"#, "empty sweep"),
        (
            "warm.json",
            r#"{"sweep": {"parameter": "k", "values": [1]}, "sim": {"horizon": 10, "warmup": 10}}"#,
            "horizon must exceed warmup",
        ),
    ] {
        let cfg = write(dir.path(), name, json);
        let o = bin().args(["analyze", "--config"]).arg(&cfg).output().unwrap();
        assert_eq!(o.status.code(), Some(1));
        assert!(String::from_utf8(o.stderr).unwrap().contains(msg));
    }
    let cfg = write(dir.path(), "nosim.json", r#"{"sweep": {"parameter": "k", "values": [1]}}"#);
    let o = bin().args(["simulate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn trace_dump_has_one_line_per_slot_and_channel() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "spec.json",
        r#"{"base": {"num_channels": 3}, "sweep": {"parameter": "k", "values": [1]}, "simulate": true,
            "sim": {"horizon": 400, "warmup": 40}}"#,
    );
    let trace = dir.path().join("trace.csv");
    let st = bin().args(["simulate", "--config"]).arg(&cfg).arg("--trace").arg(&trace).output().unwrap();
    assert!(st.status.success());
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "param,value,mode,strategy,slot,channel,busy,sensed_by_su,su_success,D_t"
    );
    assert_eq!(lines.count(), 3 * 400 * 3);
}

#[test]
fn rlnc_vectors_check_and_detect_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let v = dir.path().join("v.txt");
    assert!(bin().args(["rlnc-check", "--generate", "40", "--seed", "2", "--out"]).arg(&v).status().unwrap().success());
    let o = bin().args(["rlnc-check", "--vectors"]).arg(&v).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 41);

    // flip the last expected digit of a decodable GF(256) vector
    let text = std::fs::read_to_string(&v).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let i = lines.iter().position(|l| l.starts_with("8 ") && !l.ends_with("singular")).unwrap();
    let last = lines[i].pop().unwrap();
    lines[i].push(if last == '0' { '1' } else { '0' });
    let bad = write(dir.path(), "bad.txt", &lines.join("\n"));
    let o = bin().args(["rlnc-check", "--vectors"]).arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(2));

    let o = bin().args(["rlnc-check"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}
