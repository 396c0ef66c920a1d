//! Taylor jets of an expression: value and mixed partials to fourth order.

use soliton_core::expr::Expr;
use soliton_core::jet::Jet;

fn main() {
    let e = Expr::parse("exp(x)*sin(y) + x^2*y", &["x", "y"]).unwrap();
    let j = e.eval_jet_order(&[0.5, 1.0], 4).unwrap();
    println!("f        = {:.12}", j.value());
    println!("f_x      = {:.12}", j.partial(&[0]).unwrap());
    println!("f_xy     = {:.12}", j.partial(&[0, 1]).unwrap());
    println!("f_xxyy   = {:.12}", j.partial(&[0, 0, 1, 1]).unwrap());

    // Jets compose directly as well.
    let x = Jet::seed_with_order(&[0.5, 1.0], 0, 4).unwrap();
    let y = Jet::seed_with_order(&[0.5, 1.0], 1, 4).unwrap();
    let p = x * x * y;
    println!("∂x²(x²y) = {}", p.partial(&[0, 0]).unwrap());
    println!("∂x³(x²y) = {}", p.partial(&[0, 0, 0]).unwrap());
}
