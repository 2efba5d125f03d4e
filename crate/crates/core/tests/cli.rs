use chromalg::cli::run_with;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv: Vec<&str> = std::iter::once("chromalg").chain(args.iter().copied()).collect();
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn row<'a>(tsv: &'a str, s: &str, t: &str) -> Vec<&'a str> {
    tsv.lines().map(|l| l.split('\t').collect::<Vec<_>>()).find(|c| c.len() >= 4 && c[0] == s && c[1] == t).unwrap()
}

#[test]
fn ext_of_a_at_three() {
    let (code, out, _) =
        run(&["ext", "--prime", "3", "--module", "builtin:A", "--smax", "2", "--tmax", "16", "--tsv", "-"]);
    assert_eq!(code, 0);
    let r = row(&out, "0", "0");
    assert_eq!((r[2], r[3]), ("1", ""));
    let r = row(&out, "1", "4");
    assert_eq!((r[2], r[3], r[4]), ("0", "3", "[t1]"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["ext", "--bogus"]).0, 2);
    assert_eq!(run(&["nonsense"]).0, 2);
    assert_eq!(run(&["axioms", "--prime", "4", "--tmax", "8"]).0, 2);
    assert_eq!(run(&["primitives", "--module", "builtin:B", "--window", "0..4"]).0, 2);
    assert_eq!(run(&["primitives", "--module", "builtin:A", "--window", "4..0"]).0, 2);
}

#[test]
fn axioms_pass() {
    let (code, out, _) = run(&["axioms", "--prime", "2", "--vmax", "2", "--tmax", "12"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("all axioms hold"));
}

#[test]
fn structure_json_is_keyed_by_generator() {
    let (code, out, _) = run(&["structure", "--prime", "2", "--vmax", "2", "--tmax", "6", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["eta_R"]["v1"], "v1 + 2 * t1");
    assert!(v["Delta"]["t1"].is_string());
}

#[test]
fn primitives_of_localized_quotient() {
    let (code, out, _) = run(&["primitives", "--prime", "3", "--module", "builtin:v1^-1 A/I_1", "--window", "-8..8"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("-8\t1\tv1^-2"));
    assert!(out.contains("0\t1\t1"));
    assert!(out.contains("4\t1\tv1"));
}

#[test]
fn filtration_of_torsion_module() {
    let (code, out, _) = run(&["filtration", "--prime", "3", "--vmax", "2", "--module", "builtin:A/(p,v1^2)"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("s^4 A/I_2"));
    assert!(out.contains("s^0 A/I_2"));
}

#[test]
fn localize_and_derived() {
    let (code, out, _) =
        run(&["localize", "--prime", "3", "--vmax", "2", "--module", "builtin:A/I_1", "--n", "1", "--window", "-8..8"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().next().unwrap().contains("v1"));
    assert!(out.contains("-8\t1"));
    let (code, out, _) = run(&[
        "localize",
        "--prime",
        "3",
        "--vmax",
        "2",
        "--module",
        "builtin:A/I_1",
        "--n",
        "2",
        "--derived",
        "1",
        "--window",
        "0..0",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("matches closed form: true"));
}

#[test]
fn basechange_small_window() {
    let (code, out, err) = run(&[
        "basechange",
        "--prime",
        "3",
        "--vmax",
        "2",
        "--n",
        "1",
        "--module",
        "builtin:A/I_1",
        "--smax",
        "1",
        "--window",
        "-4..4",
        "--efloor",
        "2",
    ]);
    assert_eq!(code, 0, "{out}{err}");
    assert!(out.contains("isomorphic"));
    assert!(!out.contains("DIFFERENT"));
    assert_eq!(run(&["basechange", "--n", "1", "--module", "builtin:A/I_2", "--window", "-4..4"]).0, 2);
}

#[test]
fn chart_renders_svg_from_tsv() {
    let dir = tempfile::tempdir().unwrap();
    let tsv = dir.path().join("a.tsv");
    let svg = dir.path().join("a.svg");
    let t = tsv.to_str().unwrap();
    assert_eq!(
        run(&["ext", "--prime", "2", "--vmax", "2", "--module", "builtin:A", "--smax", "2", "--tmax", "6", "--tsv", t])
            .0,
        0
    );
    assert_eq!(run(&["chart", t, "--svg", svg.to_str().unwrap()]).0, 0);
    assert!(std::fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn presentation_files_are_read() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.pres");
    std::fs::write(&path, "3/2/16\ngen g 0\nrel 3*g\nrel v1*g\n").unwrap();
    let (code, out, err) = run(&["primitives", "--module", path.to_str().unwrap(), "--window", "0..8"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("0\t1\t"));
    std::fs::write(&path, "3/2/16\ngen g 0\nrel w*g\n").unwrap();
    assert_eq!(run(&["primitives", "--module", path.to_str().unwrap(), "--window", "0..8"]).0, 2);
}

#[test]
fn cache_hits_are_identical_and_corruption_recovers() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().to_str().unwrap();
    let args = [
        "--cache",
        c,
        "ext",
        "--prime",
        "3",
        "--vmax",
        "2",
        "--module",
        "builtin:A/I_1",
        "--smax",
        "2",
        "--tmax",
        "12",
    ];
    let (code, first, _) = run(&args);
    assert_eq!(code, 0);
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 1);
    let (_, second, _) = run(&args);
    assert_eq!(first, second);
    std::fs::write(&files[0], "garbage").unwrap();
    let (code, third, _) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(first, third);
    let text = std::fs::read_to_string(&files[0]).unwrap();
    assert!(text.contains("\"digest\""));
}

#[test]
fn selftest_small_session() {
    let (code, out, _) = run(&["selftest", "--prime", "3", "--vmax", "2"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().count(), 10);
    assert!(out.lines().all(|l| l.contains("PASS")));
}
