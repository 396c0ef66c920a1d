//! Parsing, printing and evaluating metric and field expressions.

use soliton_core::expr::Expr;

fn main() {
    let coords = ["th", "ph"];
    for src in [
        "sin(th)^2",
        "-th^2",
        "2^-1",
        "2*pi - th",
        "(1 + cos(th))/(2 + sin(ph))^0.5",
    ] {
        match Expr::parse(src, &coords) {
            Ok(e) => println!("{src:<34} -> {e:<34} at (1, 2): {:?}", e.eval(&[1.0, 2.0])),
            Err(err) => println!("{src:<34} -> error: {err}"),
        }
    }
    for bad in ["sin(th", "th ** 2", "tan(th)"] {
        let err = Expr::parse(bad, &coords).unwrap_err();
        println!("{bad:<10} offset {}: {err}", err.offset());
    }
}
