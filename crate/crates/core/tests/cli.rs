mod common;

use std::path::PathBuf;

use linked_ideals::cli::{run, EXIT_EXHAUSTED, EXIT_FALSE, EXIT_OK, EXIT_USAGE};
use linked_ideals::export::to_json;
use linked_ideals::multisum::{eval_h, Beta};
use linked_ideals::prover::{assemble_system, FactorizationSystem, ProofTree, SystemSpec};

use common::fixture;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn cli(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("linked-ideals").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn path(name: &str) -> String {
    fixture(name).display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("linked-ideals-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// The JSON block that closes every report.
fn trailing_json(text: &str) -> serde_json::Value {
    let start = text.find("\n\n{").expect("report has a JSON block") + 2;
    serde_json::from_str(&text[start..]).unwrap()
}

#[test]
fn oracle_at_order_zero_is_one() {
    let r = cli(&["oracle", "gap", "--d", "2", "--k", "1", "--qmax", "0"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.out, "1\n");
}

#[test]
fn oracle_gap_matches_golden_string() {
    let r = cli(&["oracle", "gap", "--d", "2", "--k", "1", "--qmax", "6"]);
    assert_eq!(
        r.out.trim(),
        "1 + x*q + x*q^2 + x*q^3 + x*q^4 + x^2*q^4 + x*q^5 + x^2*q^5 + x*q^6 + 2*x^2*q^6"
    );
    assert_eq!(cli(&["oracle", "never", "--qmax", "5"]).out, "1\n");
}

#[test]
fn verify_reference_kr_system() {
    let r = cli(&["verify", &path("kr_system.json"), "--qmax", "25"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.contains("result: verified"));
    assert!(r.out.contains("F_7(x) = F_1(xq^3) + x*q^3*F_6(xq^3) + x^2*q^6*F_7(xq^3) [x^25 q^25]: ok"));
    let data = trailing_json(&r.out);
    assert_eq!(data["verified"], true);
    assert_eq!(data["rows"].as_array().unwrap().len(), 7);
}

#[test]
fn verify_without_matrices_derives_them() {
    let spec = SystemSpec {
        u: None,
        v: None,
        ..common::system("kr_system.json")
    };
    let file = scratch("kr_bare.json");
    std::fs::write(&file, to_json(&spec)).unwrap();
    let r = cli(&["verify", file.to_str().unwrap(), "--qmax", "12"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert_eq!(r.out.matches("certificate H").count(), 3);
}

#[test]
fn verify_reports_a_broken_system() {
    let mut spec = common::system("ex1_system.json");
    spec.u.as_mut().unwrap()[2][1] = 1;
    let file = scratch("ex1_broken.json");
    std::fs::write(&file, to_json(&spec)).unwrap();
    let r = cli(&["verify", file.to_str().unwrap(), "--qmax", "10"]);
    assert_eq!(r.code, EXIT_FALSE);
    assert!(r.out.contains("FAILED"));
    assert_eq!(trailing_json(&r.out)["verified"], false);
}

#[test]
fn prove_is_a_thin_shell() {
    let r = cli(&["prove", &path("ex1_system.json")]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.contains("V = diag(1, x*q, x*q^2)"));
    assert!(r.out.contains("  1 0 1\n"));
    let shown: FactorizationSystem = serde_json::from_value(trailing_json(&r.out)).unwrap();
    let spec = common::system("ex1_system.json");
    let direct = assemble_system(&spec.profile, spec.shift, &spec.betas, 64).unwrap();
    assert_eq!(shown, direct);
}

#[test]
fn output_is_deterministic() {
    let a = cli(&["prove", &path("kr_system.json")]);
    let b = cli(&["prove", &path("kr_system.json")]);
    assert_eq!(a.out, b.out);
    let a = cli(&["ideal", "genfun", &path("kr_i1.json"), "--qmax", "10"]);
    let b = cli(&["ideal", "genfun", &path("kr_i1.json"), "--qmax", "10"]);
    assert_eq!(a.out, b.out);
}

#[test]
fn export_round_trip() {
    let sys_file = scratch("kr_cert.json");
    let r = cli(&["prove", &path("kr_system.json"), "--out", sys_file.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK);
    let again = cli(&["export", sys_file.to_str().unwrap(), "--format", "json"]);
    assert_eq!(again.out, std::fs::read_to_string(&sys_file).unwrap());

    let sys: FactorizationSystem = serde_json::from_str(&again.out).unwrap();
    let tree_file = scratch("kr_tree.json");
    std::fs::write(&tree_file, to_json(&sys.certificates[1])).unwrap();
    let json = cli(&["export", tree_file.to_str().unwrap(), "--format", "json"]);
    let back: ProofTree = serde_json::from_str(&json.out).unwrap();
    assert_eq!(back, sys.certificates[1]);

    let dot = cli(&["export", tree_file.to_str().unwrap()]);
    assert!(dot.out.starts_with("digraph certificate {"));
    assert_eq!(dot.out.matches(" -> ").count(), 2 * sys.certificates[1].expansions());
}

#[test]
fn exhaustion_and_infeasibility_codes() {
    let r = cli(&["prove", &path("kr_system.json"), "--max-expansions", "2"]);
    assert_eq!(r.code, EXIT_EXHAUSTED);
    assert!(r.err.contains("no certificate for H(1,3) within 2 expansions"));

    let spec = SystemSpec {
        betas: vec![Beta::from([1]), Beta::from([2])],
        u: None,
        v: None,
        ..common::system("ex1_system.json")
    };
    let file = scratch("ex1_short.json");
    std::fs::write(&file, to_json(&spec)).unwrap();
    let r = cli(&["prove", file.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_FALSE);
    assert!(r.err.contains("row 1"));
}

#[test]
fn usage_and_format_errors() {
    assert_eq!(cli(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(cli(&["oracle", "gap", "--d", "2", "--k", "0"]).code, EXIT_USAGE);
    assert_eq!(cli(&["--help"]).code, EXIT_OK);

    let file = scratch("no_shift.json");
    std::fs::write(&file, r#"{"profile": {"alpha": [[2]], "gamma": [1], "A": [1]}, "betas": [[1]]}"#).unwrap();
    let r = cli(&["verify", file.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("missing field `S`"), "{}", r.err);
    assert!(r.err.contains("line 1"), "{}", r.err);

    std::fs::write(&file, r#"{"S": 2, "pi": ["empty", "1+2"], "linking": [[1, 2], [1, 2]]}"#).unwrap();
    let r = cli(&["ideal", "genfun", file.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("1+2"), "{}", r.err);
}

#[test]
fn ideal_commands() {
    let rr = path("rr.json");
    let r = cli(&["ideal", "contains", &rr, "6+4+1"]);
    assert_eq!((r.code, r.out.as_str()), (EXIT_OK, "member: chain 2 3 3\n"));
    assert_eq!(cli(&["ideal", "contains", &rr, "2+1"]).code, EXIT_FALSE);
    assert_eq!(cli(&["ideal", "contains", &rr, "empty"]).code, EXIT_OK);

    let r = cli(&["ideal", "members", &rr, "--qmax", "4"]);
    assert_eq!(r.out, "empty\t1\n1\t2\n2\t3\n3\t1\n3+1\t2\n4\t1\n");

    let r = cli(&["ideal", "genfun", &rr, "--qmax", "4"]);
    assert!(r.out.starts_with("G_1 = 1 + x*q^3 + x*q^4\nG_2 = x*q + x^2*q^4\nG_3 = x*q^2\n"));
}

#[test]
fn qdiff_commands() {
    for name in ["rr.json", "kr_i1.json"] {
        let r = cli(&["qdiff", "check", &path(name), "--qmax", "15"]);
        assert_eq!(r.code, EXIT_OK, "{name}: {}", r.out);
        assert_eq!(trailing_json(&r.out)["matches_walks"], true);
    }
    let file = scratch("rr_sys.json");
    std::fs::write(&file, r#"{"A": [[1,1,1],[1,1,1],[1,0,1]], "weights": [[0,0],[1,1],[1,2]], "S": 2}"#).unwrap();
    let r = cli(&["qdiff", "solve", file.to_str().unwrap(), "--qmax", "4", "--xmax", "2"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.starts_with("F_1 = 1 + x*q + x*q^2 + x*q^3 + x*q^4 + x^2*q^4\n"), "{}", r.out);
}

#[test]
fn multisum_commands() {
    let kr = path("kr_profile.json");
    let r = cli(&["multisum", "rec", &kr, "--beta", "1,3", "--coord", "1"]);
    assert_eq!(r.out, "H(1,3) = H(2,3) + x*q*H(3,6)\n");
    let r = cli(&["multisum", "shift", &kr, "--beta", "1,3", "--S", "3"]);
    assert_eq!(r.out, "(4,9)\n");
    let r = cli(&["multisum", "check", &kr, "--beta", "2,5", "--qmax", "12"]);
    assert_eq!(r.out, "coordinate 1: ok\ncoordinate 2: ok\n");
    assert_eq!(cli(&["multisum", "rec", &kr, "--beta", "1,3", "--coord", "3"]).code, EXIT_USAGE);

    let r = cli(&["multisum", "eval", &kr, "--beta", "1,3", "--qmax", "9"]);
    let p = common::profile("kr_profile.json");
    assert_eq!(r.out.trim(), eval_h(&p, &Beta::from([1, 3]), 9, 9).unwrap().to_string());
}
