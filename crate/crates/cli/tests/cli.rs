use std::io::Write;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = hhcert::run(std::iter::once("hhcert").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn contraction_table() {
    let (code, out, _) = run(&["contraction", "--n-max", "3"]);
    assert_eq!(code, 0);
    let rows = data_rows(&out);
    let rho: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(rho, ["1/2", "1/2", "59/108"]);
    assert!(rows.iter().all(|r| r[3] == "yes" && r[4] == "yes"));
    assert_eq!(run(&["contraction", "--n-max", "65"]).0, 2);
}

#[test]
fn certify_square_passes() {
    let (code, out, _) = run(&["certify", "convex", "--g", "x^2", "--domain", "-2:2", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    // the pair (0, 0) is an equality case, every other pair has positive margin
    assert_eq!(v["report"]["min_margin"].as_f64().unwrap(), 0.0);
    let positive = v["report"]["margins"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|m| m["point"] != serde_json::json!([0.0, 0.0]))
        .all(|m| m["margin"].as_f64().unwrap() > 0.0);
    assert!(positive);
    assert_eq!(v["report"]["verdict"], "Pass");
    assert_eq!(v["config"]["subcommand"], "certify convex");
    assert_eq!(v["report"]["margins"].as_array().unwrap().len(), 33 * 33);
}

#[test]
fn certify_exit_codes() {
    assert_eq!(run(&["certify", "convex", "--g", "-x^2", "--domain", "-2:2"]).0, 1);
    let (code, out, _) = run(&["certify", "strong", "--g", "x^2", "--domain", "-1:1", "--modulus", "2.5", "--grid", "9"]);
    assert_eq!(code, 1);
    assert!(out.contains("# finding:"));
    let (code, _, err) = run(&["certify", "convex", "--g", "sqrt(x-1)", "--domain", "0:2", "--grid", "5"]);
    assert_eq!(code, 3, "{err}");
    assert!(err.starts_with("error:"));
    assert_eq!(run(&["certify", "convex", "--g", "x^", "--domain", "0:1"]).0, 2);
    assert_eq!(run(&["certify", "convex", "--g", "x", "--domain", "2:1"]).0, 2);
    assert_eq!(run(&["certify", "strong", "--g", "x", "--domain", "0:1"]).0, 2);
    assert_eq!(run(&["certify", "convex", "--g", "x", "--domain", "0:1", "--modulus", "1"]).0, 2);
    assert_eq!(run(&["certify", "nonsense", "--g", "x", "--domain", "0:1"]).0, 2);
}

#[test]
fn korovkin_two_dimensional_face_csv() {
    let (code, out, err) = run(&["korovkin", "--n", "2", "--mode", "face", "--m-max", "6", "--samples", "100000", "--seed", "42"]);
    assert_eq!(code, 0);
    assert!(err.is_empty());
    assert!(out.lines().nth(1).unwrap() == "m,mean,stderr,bound,mode,n,seed");
    for row in data_rows(&out) {
        let m: i32 = row[0].parse().unwrap();
        let mean: f64 = row[1].parse().unwrap();
        let se: f64 = row[2].parse().unwrap();
        assert!((mean - 0.5f64.powi(m)).abs() <= 3.0 * se, "m = {m}");
        assert_eq!(row[3].parse::<f64>().unwrap(), 0.5f64.powi(m));
        assert_eq!(&row[4..], ["face", "2", "42"]);
    }
}

#[test]
fn solid_mode_prints_note() {
    let (code, out, err) = run(&["korovkin", "--n", "2", "--mode", "solid", "--m-max", "3", "--samples", "1000"]);
    assert_eq!(code, 0);
    assert!(err.contains("solid mode"));
    assert!(data_rows(&out).iter().all(|r| r[3].is_empty()));
}

#[test]
fn korovkin_custom_target_and_errors() {
    let (code, out, _) = run(&["korovkin", "--n", "3", "--m-max", "2", "--samples", "500", "--target", "x1+x2+x3"]);
    assert_eq!(code, 0);
    for r in data_rows(&out) {
        assert!((r[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
        assert!(r[2].parse::<f64>().unwrap() < 1e-12);
    }
    assert_eq!(run(&["korovkin", "--n", "2", "--m-max", "2", "--samples", "100", "--target", "log(x1-1)"]).0, 3);
    assert_eq!(run(&["korovkin", "--n", "2", "--m-max", "1"]).0, 2);
    assert_eq!(run(&["korovkin", "--n", "2", "--samples", "0"]).0, 2);
    assert_eq!(run(&["korovkin", "--n", "2", "--target", "x3"]).0, 2);
}

#[test]
fn output_is_byte_identical_across_runs_and_workers() {
    let base = ["korovkin", "--n", "4", "--m-max", "4", "--samples", "9000", "--format", "json"];
    let one = run(&[&base[..], &["--workers", "1"]].concat()).1;
    let four = run(&[&base[..], &["--workers", "4"]].concat()).1;
    assert_eq!(one, four);
    let c1 = run(&["certify", "quasi", "--g", "logarithm", "--domain", "1:4", "--grid", "7", "--workers", "1"]).1;
    let c2 = run(&["certify", "quasi", "--g", "logarithm", "--domain", "1:4", "--grid", "7", "--workers", "2"]).1;
    assert_eq!(c1, c2);
}

#[test]
fn output_file_and_config_comment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["closed-forms", "--n", "3", "--s", "1/3", "--output", p]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let config: serde_json::Value = serde_json::from_str(text.lines().next().unwrap().trim_start_matches("# config: ")).unwrap();
    assert_eq!(config["n"], 3);
    let rows = data_rows(&text);
    let rho = rows.iter().find(|r| r[0] == "rho").unwrap();
    assert_eq!(rho[3], "59/108");
    let abs_dev = rows.iter().find(|r| r[0] == "abs_deviation_integral").unwrap();
    assert_eq!(abs_dev[3], "59/1944");
}

#[test]
fn volume_and_matrix_commands() {
    let (_, out, _) = run(&["volume", "--sides", "1,2,3"]);
    assert_eq!(data_rows(&out)[0][1], "1");
    let (_, out, _) = run(&["volume", "--n", "3"]);
    assert_eq!(data_rows(&out)[0][1], "1/6");
    assert_eq!(run(&["volume", "--sides", "1,-2"]).0, 2);

    let (_, out, _) = run(&["matrix", "apply", "--a", "1/2,1/4,1/4", "--x", "1,2,3"]);
    let y: Vec<String> = data_rows(&out).into_iter().map(|r| r[1].clone()).collect();
    assert_eq!(y, ["7/4", "2", "9/4"]);
    let (_, out, _) = run(&["matrix", "multiply", "--a", "0.3,0.7", "--b", "0.6,0.4"]);
    let p: Vec<String> = data_rows(&out).into_iter().map(|r| r[1].clone()).collect();
    assert_eq!(p, ["23/50", "27/50"]);
    let (_, out, _) = run(&["matrix", "classify", "--a", "0.2,0.3"]);
    assert_eq!(data_rows(&out)[0][0], "sub-stochastic");
    let (_, out, _) = run(&["matrix", "classify", "--a", "-0.2,1.2"]);
    assert_eq!(data_rows(&out)[0][0], "neither");
    let (code, out, _) = run(&["matrix", "product-row", "--gen", "0.3,0.7", "--gen", "0.6,0.4", "--gen", "1,0"]);
    assert_eq!(code, 0);
    assert_eq!(data_rows(&out)[0][1], "23/50");
    assert_eq!(run(&["matrix", "product-row", "--gen", "0.3,0.6", "--gen", "0.6,0.4"]).0, 2);
    assert_eq!(run(&["matrix", "multiply", "--a", "1,2", "--b", "1,2,3"]).0, 2);
}

#[test]
fn certify_nd_from_points_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# x1, x2\n1, 1\n\n0, 1\n-1, 2").unwrap();
    let p = file.path().to_str().unwrap();
    let (code, out, _) = run(&["certify-nd", "--f", "x1^2 + x2^2", "--n", "2", "--points", p, "--mode", "solid"]);
    assert_eq!(code, 0, "{out}");
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][..2], ["1", "1"]);
    assert!((rows[0][2].parse::<f64>().unwrap() - 1.0).abs() < 1e-13);

    let (code, out, _) = run(&["certify-nd", "--f", "x1 - 2*x2", "--n", "2", "--points", p]);
    assert!(out.contains("# warning: symmetry spot check failed"));
    assert!(code == 0 || code == 1);
    assert_eq!(run(&["certify-nd", "--f", "x1", "--n", "3", "--points", p]).0, 2);
    assert_eq!(run(&["certify-nd", "--f", "x1", "--n", "2", "--points", "/nonexistent/points.csv"]).0, 2);
}

#[test]
fn help_and_version_exit_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("certify"));
    assert_eq!(run(&["--version"]).0, 0);
    assert_eq!(run(&[]).0, 2);
}

#[test]
fn selftest_runs_a_subset() {
    let (code, out, _) = run(&["selftest", "--only", "2,11"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 2);
    assert!(out.lines().all(|l| l.starts_with("[PASS]")));
    assert_eq!(run(&["selftest", "--only", "12"]).0, 2);
}
