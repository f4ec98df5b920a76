//! Corpus pipeline through the CLI entry point: gen, check, transform, roundtrip.
//!
//! `cargo run --example pipeline`

use bispinor::cli::run;

fn call(args: &[&str], input: &str) -> (i32, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("bispinor").chain(args.iter().copied());
    let code = run(argv, &mut input.as_bytes(), &mut out, &mut err);
    let mut text = String::from_utf8(out).unwrap();
    text.push_str(&String::from_utf8(err).unwrap());
    (code, text)
}

fn main() {
    let (code, corpus) = call(&["gen", "--count", "5", "--seed", "42", "--sector", "real"], "");
    println!("gen exit {code}, {} lines", corpus.lines().count());

    let (code, table) = call(&["check", "--format", "table"], &corpus);
    println!("check exit {code}\n{table}");

    let (code, boosted) = call(&["transform", "--boost", "1:0.6"], &corpus);
    println!("transform exit {code}");
    let (_, table) = call(&["check", "--format", "table"], &boosted);
    println!("{table}");

    let (code, feasible) = call(&["gen", "--count", "20", "--seed", "1", "--feasible-only", "--margin-min", "0.05"], "");
    println!("feasible gen exit {code}");
    let (code, summary) = call(&["roundtrip"], &feasible);
    println!("roundtrip exit {code}: {}", summary.lines().next().unwrap_or_default());
}
