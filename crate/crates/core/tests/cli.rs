use polytot::cli::run;
use polytot::report::{parse_bound_csv, parse_density_csv, parse_trace_csv};

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("polytot").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn phi_roots_delta_lines() {
    assert_eq!(call(&["phi", "-P", "1,0,1", "-n", "5"]).1, "phi_P(5) = 3 (bruteforce=3, lemma=3)\n");
    assert_eq!(call(&["roots", "-P", "1,0,1", "-p", "5"]).1, "f=2 g=2\n");
    assert_eq!(call(&["roots", "-P", "1,0,1", "-p", "3"]).1, "f=0 g=0\n");
    assert_eq!(call(&["delta", "-P", "2,1,1"]).1, "2\n");
    assert_eq!(call(&["delta", "-P", "-2,0,0,1"]).1, "1\n");
}

#[test]
fn usage_errors_exit_with_two_and_name_the_token() {
    let (code, _, err) = call(&["phi", "-P", "1,x,1", "-n", "5"]);
    assert_eq!(code, 2);
    assert!(err.contains("`x`"), "{err}");
    assert_eq!(call(&["roots", "-P", "1,0,1", "-p", "9"]).0, 2);
    assert_eq!(call(&["bound", "-P", "-1,0,1", "-X", "100"]).0, 2, "reducible input is refused");
    assert_eq!(call(&["density", "-P", "1,0,1", "-X", "1000", "--budget", "100"]).0, 2);
    assert_eq!(call(&["density", "-P", "1,0,1", "-X", "100", "--threads", "0"]).0, 2);
    assert_eq!(call(&["bound", "-P", "1,0,1", "-X", "100", "--epsilon", "-1"]).0, 2);
    assert_eq!(call(&["nonsense"]).0, 2);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn density_csv_round_trips() {
    let (code, out, _) = call(&["density", "-P", "1,0,1", "-X", "100"]);
    assert_eq!(code, 0);
    let rows = parse_density_csv(&out).unwrap();
    assert_eq!(rows.iter().map(|r| r.count).collect::<Vec<_>>(), vec![13, 0, 11]);
    assert!(rows.iter().all(|r| r.limit.is_none()));

    let (_, out, _) = call(&["density", "-P", "1,0,1", "--checkpoints", "100,1000"]);
    let rows = parse_density_csv(&out).unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[3].limit, Some(1000));
}

#[test]
fn json_reports_parse() {
    let (code, out, _) = call(&["density", "-P", "-2,0,0,1", "-X", "10000", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["limit"], 10_000);
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);

    let (_, out, _) = call(&["bound", "-P", "1,0,1", "-X", "1000", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["tested"], 985);
    assert_eq!(v["zero_count"], 0);
}

#[test]
fn traces_round_trip() {
    let (code, out, _) = call(&["mertens", "--checkpoints", "10,100"]);
    assert_eq!(code, 0);
    let rows = parse_trace_csv(&out).unwrap();
    assert_eq!(rows[0].x, 10);
    assert!((rows[0].value - 8.0 / 35.0).abs() < 1e-14);

    let (code, out, _) = call(&["gd", "-d", "1", "-x", "1000"]);
    assert_eq!(code, 0);
    assert_eq!(parse_trace_csv(&out).unwrap()[0].value, 1.0);

    let (code, out, _) = call(&["gd", "-P", "1,0,1", "-k", "2", "-x", "1000"]);
    assert_eq!(code, 0);
    assert!(parse_trace_csv(&out).unwrap()[0].value < 1.0);
    assert_eq!(call(&["gd", "-d", "2", "-k", "1", "-x", "1000"]).0, 2);
}

#[test]
fn bound_csv_keeps_stride_and_minimizer() {
    let (code, out, _) = call(&["bound", "-P", "1,0,1", "-X", "2000", "--stride", "100"]);
    assert_eq!(code, 0);
    let rows = parse_bound_csv(&out).unwrap();
    assert_eq!(rows[0].n, 16);
    assert!(rows.iter().any(|r| r.n == 20), "minimizer row kept");
    assert!(rows.len() <= 21);
}

#[test]
fn pi3_reports_the_chain() {
    let (code, out, _) = call(&["pi3", "-P", "1,0,1", "-n", "606"]);
    assert_eq!(code, 0);
    assert!(out.contains("holds=true"));
    assert!(out.contains("envelope=0.27505"));
    assert_eq!(call(&["pi3", "-P", "1,0,1", "-n", "10"]).0, 2, "below the decomposition threshold");
}

#[test]
fn output_is_independent_of_thread_count() {
    let cases: [&[&str]; 3] = [
        &["density", "-P", "1,1,0,1", "--checkpoints", "1000,50000"],
        &["bound", "-P", "-2,0,1", "-X", "50000", "--epsilon", "0.1"],
        &["gd", "-P", "1,0,0,0,1", "-k", "4", "--checkpoints", "1000,50000"],
    ];
    for args in cases {
        let outputs: Vec<String> = ["1", "2", "8"]
            .iter()
            .map(|t| {
                let mut a = args.to_vec();
                a.extend(["--threads", t]);
                call(&a).1
            })
            .collect();
        assert!(!outputs[0].is_empty());
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{args:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("polytot-cli-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let (code, out, _) = call(&["mertens", "-d", "2", "-x", "1000", "--out", p]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(text.starts_with("x,value,normalized\n1000,"));
}

#[test]
fn selftest_passes() {
    let (code, out, _) = call(&["selftest"]);
    assert_eq!(code, 0, "{out}");
    assert!(!out.contains("FAILED"));
}
