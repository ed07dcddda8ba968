//! The nine-city northeast network end to end, via the CLI entry point.

fn main() {
    let out = sis_budget::cli::run_args(["sis-budget", "case-study", "--cross-check"]);
    eprint!("{}", out.stderr);
    let report: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    println!("feasible set: {}", report["solution"]["feasible_set"]);
    println!("threshold:    {}", report["solution"]["threshold"]);
    println!("all checks pass: {}", report["all_pass"]);
}
