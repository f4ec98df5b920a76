use std::process::Command as Process;

use bispinor::cli::{run, CheckRow, JobConfig, RoundtripLine, SolveRow, SpectrumRow, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK, EXIT_PARTIAL};
use bispinor::io::{parse_input, parse_quintuple, to_json_line, QuintupleRecord};

fn bispinor(args: &[&str], input: &str) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("bispinor").chain(args.iter().copied());
    let code = run(argv, &mut input.as_bytes(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn quintuple(j: [f64; 4], h: [f64; 6]) -> String {
    format!(
        r#"{{"m":0,"j":[{},{},{},{}],"s":[0,0,0,0],"H":[{},{},{},{},{},{}],"n":0,"frame":"local"}}"#,
        j[0], j[1], j[2], j[3], h[0], h[1], h[2], h[3], h[4], h[5]
    )
}

fn check_rows(text: &str) -> Vec<CheckRow> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn data_lines(corpus: &str) -> Vec<&str> {
    corpus.lines().skip(1).collect()
}

fn gen(args: &[&str]) -> String {
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    let (code, out, err) = bispinor(&full, "");
    assert_eq!(code, EXIT_OK, "{err}");
    out
}

#[test]
fn check_zero_quintuple() {
    let (code, out, _) = bispinor(&["check"], &quintuple([0.0; 4], [0.0; 6]));
    assert_eq!(code, EXIT_OK);
    let rep = check_rows(&out)[0].report.clone().unwrap();
    assert!(rep.feasible);
    assert_eq!(rep.rank, 0);
}

#[test]
fn check_current_only_margin_is_j0() {
    let (code, out, _) = bispinor(&["check"], &quintuple([2.5, 0.0, 0.0, 0.0], [0.0; 6]));
    assert_eq!(code, EXIT_OK);
    let rep = check_rows(&out)[0].report.clone().unwrap();
    assert!((rep.margin - 2.5).abs() < 1e-12);
    assert!((rep.lambda_numeric[3] - rep.kappa * 2.5).abs() < 1e-12);
}

#[test]
fn check_h_dominated_is_infeasible() {
    let (code, out, _) = bispinor(&["check"], &quintuple([1.0, 0.0, 0.0, 0.0], [3.0, 0.0, 0.0, 0.0, 0.0, 2.0]));
    assert_eq!(code, EXIT_INFEASIBLE);
    let rep = check_rows(&out)[0].report.clone().unwrap();
    assert!(!rep.feasible && rep.margin < 0.0);
    assert!(rep.lambda_numeric[3] < 0.0);
}

#[test]
fn solve_current_only() {
    let (code, out, _) = bispinor(&["solve"], &quintuple([1.0, 0.0, 0.0, 0.0], [0.0; 6]));
    assert_eq!(code, EXIT_OK);
    let row: SolveRow = serde_json::from_str(out.trim()).unwrap();
    assert!(row.feasible);
    assert!(row.residual.unwrap() < 1e-8);
    let z = row.z.unwrap().to_matrix();
    assert_eq!(z.shape(), (4, 4));
}

#[test]
fn solve_gauge_seed_changes_z_not_bilinears() {
    let input = quintuple([2.0, 0.3, -0.2, 0.1], [0.4, 0.1, -0.3, 0.2, 0.1, -0.5]);
    let rows: Vec<SolveRow> = [1u64, 2]
        .iter()
        .map(|s| {
            let (code, out, _) = bispinor(&["solve", "--seed", &s.to_string()], &input);
            assert_eq!(code, EXIT_OK);
            serde_json::from_str(out.trim()).unwrap()
        })
        .collect();
    let z: Vec<_> = rows.iter().map(|r| r.z.clone().unwrap().to_matrix()).collect();
    assert!(bispinor::linalg::max_abs(&(z[0] - z[1])) > 1e-3);
    let b: Vec<_> = rows.iter().map(|r| r.bilinears.clone().unwrap().quintuple()).collect();
    assert!(b[0].max_abs_diff(&b[1]) < 1e-12);
    assert!(rows[0].gauge.is_some());
}

#[test]
fn solve_rank_two_equal_eigenvalues_has_three_classes() {
    let (code, out, _) = bispinor(&["solve"], &quintuple([1.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
    assert_eq!(code, EXIT_OK);
    let row: SolveRow = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(row.rank, Some(2));
    assert_eq!(row.factor_count, Some(4));
    assert_eq!(row.gauge_classes.unwrap().len(), 3);
}

#[test]
fn solve_infeasible_exits_two_with_margin() {
    let (code, out, _) = bispinor(&["solve"], &quintuple([1.0, 0.0, 0.0, 0.0], [3.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
    assert_eq!(code, EXIT_INFEASIBLE);
    let row: SolveRow = serde_json::from_str(out.trim()).unwrap();
    assert!(!row.feasible && row.margin.unwrap() < 0.0);
    assert!(row.z.is_none() && row.error.is_some());
}

fn roundtrip_lines(text: &str) -> Vec<RoundtripLine> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn roundtrip_feasible_corpus() {
    let corpus = gen(&["--count", "100", "--seed", "17", "--feasible-only"]);
    let (code, out, _) = bispinor(&["roundtrip"], &corpus);
    assert_eq!(code, EXIT_OK);
    let lines = roundtrip_lines(&out);
    assert_eq!(lines.len(), 101);
    match lines.last().unwrap() {
        RoundtripLine::Summary { summary } => {
            assert_eq!((summary.rows, summary.passed, summary.failed), (100, 100, 0));
            assert!(summary.max_residual.unwrap() < 1e-8);
        }
        other => panic!("expected summary, got {other:?}"),
    }
}

#[test]
fn roundtrip_flags_infeasible_row() {
    let mut corpus = gen(&["--count", "5", "--seed", "4", "--feasible-only"]);
    corpus.push_str(&quintuple([1.0, 0.0, 0.0, 0.0], [3.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
    corpus.push('\n');
    let (code, out, _) = bispinor(&["roundtrip"], &corpus);
    assert_eq!(code, EXIT_PARTIAL);
    let lines = roundtrip_lines(&out);
    let flagged: Vec<_> = lines
        .iter()
        .filter_map(|l| match l {
            RoundtripLine::Row(r) if !r.passed => Some(r),
            _ => None,
        })
        .collect();
    assert_eq!(flagged.len(), 1);
    assert_eq!(flagged[0].row, 5);
    assert_eq!(flagged[0].line, 7);
    assert!(flagged[0].margin.unwrap() < 0.0);
}

#[test]
fn roundtrip_empty_corpus() {
    for input in ["", "{\"schema\":\"quintuple/1\",\"seed\":0}\n"] {
        let (code, out, _) = bispinor(&["roundtrip"], input);
        assert_eq!(code, EXIT_OK);
        match roundtrip_lines(&out).as_slice() {
            [RoundtripLine::Summary { summary }] => {
                assert_eq!(summary.rows, 0);
                assert!(summary.max_residual.is_none() && summary.mean_residual.is_none());
            }
            other => panic!("unexpected output {other:?}"),
        }
    }
}

#[test]
fn gen_count_zero_is_header_only() {
    let out = gen(&["--count", "0", "--seed", "9"]);
    assert_eq!(out.lines().count(), 1);
    let corpus = parse_input(&out).unwrap();
    assert_eq!(corpus.header.unwrap().seed, Some(9));
    assert!(corpus.rows.is_empty());
}

#[test]
fn gen_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = ["a.ndjson", "b.ndjson"].iter().map(|n| dir.path().join(n)).collect();
    for p in &paths {
        let (code, out, _) = bispinor(&["gen", "--count", "50", "--seed", "123", "--output", p.to_str().unwrap()], "");
        assert_eq!(code, EXIT_OK);
        assert!(out.is_empty());
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    assert_ne!(String::from_utf8(a).unwrap(), gen(&["--count", "50", "--seed", "124"]));
}

#[test]
fn gen_feasible_only_rows_pass_check() {
    let corpus = gen(&["--count", "1000", "--seed", "2024", "--feasible-only", "--margin-min", "0.1"]);
    let (code, out, _) = bispinor(&["check"], &corpus);
    assert_eq!(code, EXIT_OK);
    let rows = check_rows(&out);
    assert_eq!(rows.len(), 1000);
    assert!(rows.iter().all(|r| r.report.as_ref().unwrap().margin >= 0.1));
}

#[test]
fn gen_exhaustion_is_an_error() {
    let (code, _, err) =
        bispinor(&["gen", "--count", "3", "--feasible-only", "--margin-min", "50", "--max-attempts", "100"], "");
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("gave up"), "{err}");
}

#[test]
fn transform_identity_is_byte_identical() {
    let corpus = gen(&["--count", "20", "--seed", "8"]);
    for spec in [["--rotation", "1,2:0"], ["--boost", "z:0"], ["--random-lorentz", "5:0"]] {
        let (code, out, _) = bispinor(&["transform", spec[0], spec[1]], &corpus);
        assert_eq!(code, EXIT_OK);
        assert_eq!(data_lines(&out), data_lines(&corpus));
    }
}

fn margins(corpus: &str) -> Vec<CheckRow> {
    check_rows(&bispinor(&["check"], corpus).1)
}

#[test]
fn transform_rotation_preserves_margins_and_spectra() {
    let corpus = gen(&["--count", "60", "--seed", "31"]);
    let (code, moved, _) = bispinor(&["transform", "--rotation", "3,1:0.83"], &corpus);
    assert_eq!(code, EXIT_OK);
    for (a, b) in margins(&corpus).iter().zip(margins(&moved).iter()) {
        let (a, b) = (a.report.as_ref().unwrap(), b.report.as_ref().unwrap());
        assert!((a.margin - b.margin).abs() < 1e-10);
        assert_eq!(a.feasible, b.feasible);
        for k in 0..4 {
            assert!((a.lambda_numeric[k] - b.lambda_numeric[k]).abs() < 1e-10);
        }
    }
}

#[test]
fn transform_boost_preserves_margins_and_closed_spectra() {
    let corpus = gen(&["--count", "60", "--seed", "32", "--sector", "real"]);
    let (code, moved, _) = bispinor(&["transform", "--random-lorentz", "77:1.5:rot"], &corpus);
    assert_eq!(code, EXIT_OK);
    let mut numeric_shift = 0.0f64;
    for (a, b) in margins(&corpus).iter().zip(margins(&moved).iter()) {
        let (a, b) = (a.report.as_ref().unwrap(), b.report.as_ref().unwrap());
        assert!((a.margin - b.margin).abs() < 1e-8 * a.margin.abs().max(1.0));
        assert_eq!(a.feasible, b.feasible);
        assert_eq!(a.rank, b.rank);
        let (ca, cb) = (a.lambda_closed.unwrap(), b.lambda_closed.unwrap());
        for k in 0..4 {
            assert!((ca[k] - cb[k]).abs() < 1e-8 * ca[0].abs().max(1.0));
            numeric_shift = numeric_shift.max((a.lambda_numeric[k] - b.lambda_numeric[k]).abs());
        }
    }
    assert!(numeric_shift > 1e-3, "a boost moves the eigenvalues of M itself");
}

#[test]
fn transform_keeps_header_and_records_w() {
    let corpus = gen(&["--count", "2", "--seed", "1"]);
    let (_, out, _) = bispinor(&["transform", "--boost", "x:0.5"], &corpus);
    let header = parse_input(&out).unwrap().header.unwrap();
    assert_eq!(header.seed, Some(1));
    let w: Vec<f64> = serde_json::from_value(header.meta["transform"].clone()).unwrap();
    assert_eq!(w.len(), 16);
    assert!((w[0] - 0.5f64.cosh()).abs() < 1e-15);
}

#[test]
fn world_rows_are_converted_with_their_metric() {
    let world = r#"{"m":0,"j":[1,0,0,0],"s":[0,0,0,0],"H":[0,0,0,0,0,0],"n":0,"frame":"world","metric":[-4,0,0,0,0,1,0,0,0,0,1,0,0,0,0,1]}"#;
    let (code, out, _) = bispinor(&["check"], world);
    assert_eq!(code, EXIT_OK);
    assert!((check_rows(&out)[0].report.as_ref().unwrap().margin - 2.0).abs() < 1e-12);
    let no_metric = world.replace(r#","metric":[-4,0,0,0,0,1,0,0,0,0,1,0,0,0,0,1]"#, "");
    assert_eq!(bispinor(&["check"], &no_metric).0, EXIT_INPUT);
}

#[test]
fn json_outputs_parse_back() {
    let corpus = gen(&["--count", "10", "--seed", "5", "--feasible-only"]);
    let reparsed = parse_input(&corpus).unwrap();
    assert_eq!(reparsed.rows.len(), 10);
    let text: String = reparsed.rows.iter().map(|r| to_json_line(&r.record) + "\n").collect();
    assert_eq!(text, data_lines(&corpus).join("\n") + "\n");

    let (_, solved, _) = bispinor(&["solve", "--rep", "dirac_complex", "--seed", "3"], &corpus);
    for (line, row) in solved.lines().zip(reparsed.rows.iter()) {
        let s: SolveRow = serde_json::from_str(line).unwrap();
        assert_eq!(to_json_line(&s), line);
        let back = parse_quintuple(&to_json_line(&s.bilinears.unwrap())).unwrap();
        assert!(back.quintuple().max_abs_diff(&row.record.quintuple()) < 1e-8);
    }
    let (_, spec, _) = bispinor(&["spectrum"], &corpus);
    for line in spec.lines() {
        let s: SpectrumRow = serde_json::from_str(line).unwrap();
        assert_eq!(to_json_line(&s), line);
        assert!(s.normalization.is_none());
    }
    let (_, checked, _) = bispinor(&["check"], &corpus);
    for line in checked.lines() {
        let c: CheckRow = serde_json::from_str(line).unwrap();
        assert_eq!(to_json_line(&c), line);
    }
    let rec: QuintupleRecord = serde_json::from_str(data_lines(&corpus)[0]).unwrap();
    assert_eq!(to_json_line(&rec), data_lines(&corpus)[0]);
}

#[test]
fn spectrum_reports_normalization_in_real_sector() {
    let (code, out, _) = bispinor(&["spectrum"], &quintuple([2.0, 0.5, 0.0, 0.0], [0.1, 0.0, 0.0, 0.2, 0.0, 0.0]));
    assert_eq!(code, EXIT_OK);
    let row: SpectrumRow = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(row.normalization, Some(0.5));
    assert!(row.m.unwrap().im.is_none());
}

#[test]
fn config_file_is_strict_and_overridable() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("job.json");
    std::fs::write(&good, r#"{"command":"check","rep_kind":"dirac_complex","output_format":"table","tolerances":{"margin":1e-6}}"#).unwrap();
    let input = quintuple([1.0, 0.0, 0.0, 0.0], [0.0; 6]);
    let (code, out, _) = bispinor(&["--config", good.to_str().unwrap()], &input);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("  row"));
    let (code, out, _) = bispinor(&["check", "--config", good.to_str().unwrap(), "--format", "json"], &input);
    assert_eq!(code, EXIT_OK);
    assert!(check_rows(&out)[0].report.is_some());

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"command":"check","colour":"blue"}"#).unwrap();
    let (code, _, err) = bispinor(&["--config", bad.to_str().unwrap()], &input);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("colour"), "{err}");

    let parsed: JobConfig = serde_json::from_str(r#"{"tolerances":{"rank":1e-6}}"#).unwrap();
    assert_eq!(parsed.tolerances.rank, 1e-6);
    assert_eq!(parsed.tolerances.margin, JobConfig::default().tolerances.margin);
}

#[test]
fn input_file_argument() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.json");
    std::fs::write(&path, "{\n  \"m\": 0, \"j\": [1, 0, 0, 0], \"s\": [0, 0, 0, 0],\n  \"H\": [[0, 0, 0, 0, 0, 0]], \"n\": 0, \"frame\": \"local\"\n}\n").unwrap();
    let (code, _, _) = bispinor(&["check", path.to_str().unwrap()], "");
    assert_eq!(code, EXIT_OK);
    let (code, _, err) = bispinor(&["check", dir.path().join("missing").to_str().unwrap()], "");
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("missing"));
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_bispinor");
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, quintuple([1.0, 0.0, 0.0, 0.0], [3.0, 0.0, 0.0, 0.0, 0.0, 0.0])).unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, quintuple([1.0, 0.0, 0.0, 0.0], [0.0; 6])).unwrap();
    let status = |args: &[&str]| Process::new(exe).args(args).output().unwrap().status.code().unwrap();
    assert_eq!(status(&["check", good.to_str().unwrap()]), 0);
    assert_eq!(status(&["check", bad.to_str().unwrap()]), 2);
    assert_eq!(status(&["roundtrip", bad.to_str().unwrap()]), 3);
    assert_eq!(status(&["check", "--bogus"]), 1);
}
