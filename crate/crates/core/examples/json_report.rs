// Driving the command line from code and reading its JSON report.

use gsp::cli::run;

fn main() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let args = ["gsp", "--json", "verify", "builtin:quadratic-cutoff"];
    let code = run(args, &mut out, &mut err);
    let report: serde_json::Value = serde_json::from_slice(&out).expect("JSON report");
    println!("exit code {code}");
    println!("property {}", report["result"]["property"]);
    println!("min_n {}", report["result"]["outcome"]["min_n"]);
    println!("digest {}", report["digest"]);
}
