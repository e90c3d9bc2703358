//! Runs every verification suite through the library entry point of the
//! command-line tool and prints the per-check summary.

fn main() {
    let mut out = Vec::new();
    let args = ["charmult", "--no-cache", "verify", "--suite", "all", "--format", "tsv"];
    let code = charmult::cli::run(args, &mut out, &mut std::io::stderr());
    print!("{}", String::from_utf8_lossy(&out));
    std::process::exit(code);
}
