//! Driving the command-line front end from code with a bundled manifest.
//!
//! `cargo run --example manifest -- check manifests/sphere_trivial.json T-1`

fn main() {
    let mut args: Vec<String> = std::env::args().collect();
    if args.len() == 1 {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/manifests/sphere_trivial.json");
        args.extend(["check".into(), path.into(), "T-1".into(), "T-SQ".into()]);
    }
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = soliton_core::cli::run(args, &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}
