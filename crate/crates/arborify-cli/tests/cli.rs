//! End-to-end tests of the binary surface: exit codes, report determinism,
//! and the documented subcommands.

use std::process::{Command, Output};

fn arborify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arborify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn verify_family1_exits_zero() {
    let out = arborify(&["verify", "family1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("[PASS] family1"));
}

#[test]
fn verify_unknown_check_is_usage_error() {
    let out = arborify(&["verify", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_error_without_subcommand() {
    let out = arborify(&[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_report_is_byte_identical_for_fixed_argv_and_seed() {
    let args = ["verify", "family2", "--seed", "7", "--json"];
    let a = arborify(&args);
    let b = arborify(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "reports must be reproducible");
    let text = stdout(&a);
    assert!(text.contains("arborify-report/v1"));
    assert!(text.contains("\"status\": \"pass\""));
}

#[test]
fn arborify_via_both_prints_identical_polys() {
    let out = arborify(&[
        "arborify",
        "--model",
        "nls",
        "--via",
        "both",
        "-e",
        "I[t2,0]((5); I[t1,1]((1)) I[t1,0]((2)) I[t1,0]((4)))",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().filter(|l| !l.is_empty()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], lines[1]);
}

#[test]
fn parse_roundtrips_canonical_text() {
    let expr = "I[t1,0]((3))#a I[t1,1]((3))#b I[t1,0]((9))\npair2: (a,b)";
    let out = arborify(&["parse", "-e", expr]);
    assert!(out.status.success());
    let printed = stdout(&out);
    let again = arborify(&["parse", "-e", printed.trim()]);
    assert_eq!(printed, stdout(&again));
}

#[test]
fn eval_t4_trivial_value() {
    let out = arborify(&[
        "eval",
        "--model",
        "nls",
        "--eta-one",
        "--t",
        "0.5",
        "-e",
        "I[t2,0]((0); I[t1,1]((0)) I[t1,0]((0)) I[t1,0]((0)))",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    // i μ² t w0^{3/2} = 0.5i
    let im: f64 = text
        .trim()
        .strip_prefix("value = 0 + ")
        .and_then(|t| t.strip_suffix('i'))
        .expect("value line")
        .parse()
        .expect("imaginary part");
    assert!((im - 0.5).abs() < 1e-12, "{text}");
}

#[test]
fn eval_rejects_unpaired_without_eta_one() {
    let out = arborify(&[
        "eval",
        "--model",
        "nls",
        "-e",
        "I[t1,0]((1))",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unpaired"));
}

#[test]
fn render_emits_dot_with_green_leaves() {
    // T7 carries two green (hatted) leaves
    let expr = "Ihat[t1,0]((1))#a I[t1,0]((2)) I[t2,1]((3); I[t1,0]((3)) I[t1,1]((5)) Ihat[t1,1]((1))#b)\npair1: (a,b)";
    let out = arborify(&["render", "--dot", "-e", expr]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(text.matches("fillcolor=palegreen").count(), 2);
}

#[test]
fn shuffle_two_singletons() {
    let out = arborify(&[
        "shuffle",
        "--model",
        "nls",
        "-e",
        "S[(0,(1))]",
        "-e",
        "S[(0,(2))]",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    // a1 ⧢ a2 = a1a2 + a2a1
    assert_eq!(text.trim().split(" + ").count(), 2);
}

#[test]
fn expressions_may_lead_with_negative_coefficients() {
    let out = arborify(&[
        "parse",
        "--words",
        "--model",
        "nls",
        "-e",
        "-1i S[(0,hat,(3))#a (1,(5)) (0,(5))] S[(1,hat,(3))#b (0,(2)) (0,(9))]{pair1: (a,b)}",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("-1i "));
}

#[test]
fn strict_escalates_mu_shape_warning_to_exit_three() {
    // a two-letter NLS word with no split pair is not an arborification image
    let out = arborify(&[
        "eval",
        "--model",
        "nls",
        "--words",
        "--eta-one",
        "--strict",
        "-e",
        "S[(0,(1))] S[(0,(2))]",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn thread_cap_does_not_change_results() {
    let args = ["verify", "frak-c", "--N", "0", "--json"];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_arborify"))
            .args(args)
            .env("ARBORIFY_THREADS", threads)
            .output()
            .expect("binary runs")
    };
    let one = run("1");
    let four = run("4");
    assert!(one.status.success(), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, four.stdout, "results must not depend on the pool size");
}

#[test]
fn verify_failure_exits_one() {
    // an impossibly tight tolerance forces a failure
    let out = arborify(&["verify", "theorem-nls", "--trials", "2", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("[FAIL]"));
}
