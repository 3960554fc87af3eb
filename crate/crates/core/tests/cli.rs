use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn halfint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halfint"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_csv(path: &Path, header: &str, rows: impl Iterator<Item = String>) {
    let mut text = format!("{}\n", header);
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    fs::write(path, text).unwrap();
}

fn report(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn theta_demo_reports_period_twelve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("theta.json");
    let o = halfint(&["theta-demo", "--psi-modulus", "12", "--d", "1", "--nmax", "2000", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["command"], "theta-demo");
    assert_eq!(r["pass"], true);
    let period = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "period_detection").unwrap();
    assert_eq!(period["detail"]["period"], 12);
    assert_eq!(r["params"]["nmax"], 2000);
}

#[test]
fn identity_check_on_constant_block() {
    let dir = tempfile::tempdir().unwrap();
    let block = dir.path().join("constant.csv");
    write_csv(&block, "n,value", (1..=2000).map(|n| format!("{},1", n)));
    let out = dir.path().join("identity.json");
    let o = halfint(&[
        "identity-check", "--k", "1", "--d", "1", "--l", "3", "--block-file", block.to_str().unwrap(),
        "--nmax", "2000", "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&out);
    let identity = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "master_identity").unwrap();
    assert_eq!(identity["detail"]["residual_exact_zero"], true);
    assert_eq!(identity["detail"]["residual_max_abs"], 0.0);
}

#[test]
fn periodicity_violation_exits_two_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let block = dir.path().join("broken.csv");
    write_csv(&block, "n,value_re,value_im", (1..=500).map(|n| if n == 77 { format!("{},1,1", n) } else { format!("{},1,0", n) }));
    let out = dir.path().join("r.json");
    let o = halfint(&["identity-check", "--l", "1", "--block-file", block.to_str().unwrap(), "--nmax", "500", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["pass"], false);
    assert_eq!(r["checks"][0]["detail"]["witness_index"], 77);
}

#[test]
fn malformed_csv_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let block = dir.path().join("bad.csv");
    fs::write(&block, "n,value\n1,1\n2,1\n3,one\n").unwrap();
    let o = halfint(&["identity-check", "--l", "1", "--block-file", block.to_str().unwrap(), "--nmax", "16"]);
    assert_ne!(o.status.code(), Some(0));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4"), "{}", err);
}

#[test]
fn lemma_check_on_zeta() {
    let dir = tempfile::tempdir().unwrap();
    let coeffs = dir.path().join("zeta.csv");
    write_csv(&coeffs, "n,value", (1..=1000).map(|n| format!("{},1", n)));
    let out = dir.path().join("lemma.json");
    let o = halfint(&["lemma-check", "--coeff-file", coeffs.to_str().unwrap(), "--C", "1", "--lambda", "0", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&out);
    let sigma0 = r["checks"][0]["detail"]["sigma0"].as_f64().unwrap();
    assert!(sigma0 > 1.7 && sigma0 < 1.8, "{}", sigma0);
    assert_eq!(r["checks"][1]["detail"]["suspected_zeros"].as_array().unwrap().len(), 0);
}

#[test]
fn analytic_check_passes_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("analytic.csv");
    let o = halfint(&["analytic-check", "--format", "csv", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("name,pass,detail\n"));
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().skip(1).all(|l| l.contains(",true,")));
}

#[test]
fn exact_theta_dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("theta.csv");
    let o = halfint(&[
        "theta-demo", "--psi-modulus", "5", "--psi-index", "1", "--three-halves", "--nmax", "500", "--exact",
        "--dump", dump.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let f = halfint::io::read_qexpansion(fs::File::open(&dump).unwrap()).unwrap();
    let psi = halfint::chars::character_by_index(5, 1).unwrap();
    let expected = halfint::qseries::theta_series(&psi, 1, true, 500).unwrap();
    assert_eq!(f, expected);
}

#[test]
fn lift_dump_matches_divisor_sums() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("lift.csv");
    let o = halfint(&["lift", "--k", "2", "--psi-modulus", "1", "--nmax", "60", "--exact", "--dump", dump.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (start, a) = halfint::io::read_exact(fs::File::open(&dump).unwrap()).unwrap();
    assert_eq!(start, 1);
    // a(dn^2) = 1, trivial psi, k = 2: the twist is trivial mod 4, so A(n) sums the odd divisors
    for (i, v) in a.iter().enumerate() {
        let n = i as i64 + 1;
        let sigma: i64 = (1..=n).filter(|m| n % m == 0 && m % 2 == 1).sum();
        assert_eq!(*v, halfint::CycloNumber::from_integer(sigma), "n = {}", n);
    }
}

#[test]
fn bad_arguments_are_rejected() {
    let o = halfint(&["theta-demo", "--nmax", "8"]);
    assert_ne!(o.status.code(), Some(0));
    let o = halfint(&["theta-demo", "--d", "9"]);
    assert_ne!(o.status.code(), Some(0));
    let o = halfint(&["no-such-command"]);
    assert_ne!(o.status.code(), Some(0));
}
