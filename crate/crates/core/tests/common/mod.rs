//! Shared fixtures: suite charts and random smooth fields on them.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use soliton_core::geometry::Chart;
use soliton_core::quadrature::GridSpec;

pub fn manifest_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("manifests")
        .join(name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Sphere2,
    Sphere3,
    Torus2,
    Torus3,
    SphereCircle,
    Warped,
}

pub const ALL: [Suite; 6] = [
    Suite::Sphere2,
    Suite::Sphere3,
    Suite::Torus2,
    Suite::Torus3,
    Suite::SphereCircle,
    Suite::Warped,
];

/// Radii of the `S²(a) × S¹(b)` product and the warped sphere's polar axis.
pub const PRODUCT_RADII: (f64, f64) = (2.0, 0.5);
pub const WARP: f64 = 0.7;

fn c(rng: &mut ChaCha8Rng) -> f64 {
    // Few digits keep the generated sources readable in failure messages.
    (rng.random_range(-1.0f64..1.0) * 1000.0).round() / 1000.0
}

/// `Σ c_i m_i` over the given monomials, plus `exp` of one ambient
/// coordinate, whose spectrum decays fast enough for the suite grids.
fn combo(rng: &mut ChaCha8Rng, monomials: &[String], ambient: usize) -> String {
    let mut terms: Vec<String> = monomials
        .iter()
        .map(|m| format!("({})*{m}", c(rng)))
        .collect();
    let a = c(rng);
    let i = rng.random_range(0..ambient);
    terms.push(format!("({})*exp(0.5*{})", a, monomials[i]));
    terms.join(" + ")
}

fn products(vars: &[&str], degree: usize) -> Vec<String> {
    // Each monomial remembers its last factor so products stay sorted.
    let mut last: Vec<(String, usize)> = vars
        .iter()
        .enumerate()
        .map(|(k, v)| (v.to_string(), k))
        .collect();
    let mut out: Vec<String> = last.iter().map(|(m, _)| m.clone()).collect();
    for _ in 1..degree {
        let mut next = Vec::new();
        for (m, first) in &last {
            for (k, v) in vars.iter().enumerate().skip(*first) {
                next.push((format!("{m}*{v}"), k));
            }
        }
        out.extend(next.iter().map(|(m, _)| m.clone()));
        last = next;
    }
    out
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Sphere2 => "S2",
            Suite::Sphere3 => "S3",
            Suite::Torus2 => "T2",
            Suite::Torus3 => "T3",
            Suite::SphereCircle => "S2xS1",
            Suite::Warped => "warped",
        }
    }

    pub fn chart(self) -> Chart {
        match self {
            Suite::Sphere2 => Chart::unit_sphere(2),
            Suite::Sphere3 => Chart::unit_sphere(3),
            Suite::Torus2 => Chart::flat_torus(2),
            Suite::Torus3 => Chart::flat_torus(3),
            Suite::SphereCircle => Chart::sphere_times_circle(PRODUCT_RADII.0, PRODUCT_RADII.1),
            Suite::Warped => Chart::warped_sphere(WARP),
        }
        .unwrap()
    }

    /// Grids used by the identity suite.
    pub fn grid(self) -> GridSpec {
        let counts = match self {
            Suite::Sphere2 | Suite::Warped => vec![24, 24],
            Suite::Sphere3 => vec![12, 12, 12],
            Suite::Torus2 => vec![16, 16],
            Suite::Torus3 => vec![12, 12, 12],
            Suite::SphereCircle => vec![12, 16, 8],
        };
        GridSpec::with_counts(&self.chart(), counts)
    }

    /// Embedding coordinates in which smooth functions are polynomials.
    fn ambient(self) -> Vec<&'static str> {
        match self {
            Suite::Sphere2 | Suite::SphereCircle => {
                vec!["sin(th)*cos(ph)", "sin(th)*sin(ph)", "cos(th)"]
            }
            Suite::Warped => vec!["sin(th)*cos(ph)", "sin(th)*sin(ph)", "0.7*cos(th)"],
            Suite::Sphere3 => vec![
                "sin(eta)*cos(p)",
                "sin(eta)*sin(p)",
                "cos(eta)*cos(q)",
                "cos(eta)*sin(q)",
            ],
            Suite::Torus2 => vec!["cos(x)", "sin(x)", "cos(y)", "sin(y)"],
            Suite::Torus3 => vec!["cos(x)", "sin(x)", "cos(y)", "sin(y)", "cos(z)", "sin(z)"],
        }
    }

    /// Random smooth scalar field source.
    pub fn scalar(self, rng: &mut ChaCha8Rng) -> String {
        let vars = self.ambient();
        let monomials = products(&vars, 2);
        let mut f = combo(rng, &monomials, vars.len());
        if self == Suite::SphereCircle {
            f = format!(
                "({f})*(1 + ({})*cos(psi) + ({})*sin(2*psi))",
                c(rng) / 2.0,
                c(rng) / 2.0
            );
        }
        f
    }

    /// Contravariant components of the tangent projection of the constant
    /// ambient vector `v`.
    fn projection(self, v: &[f64]) -> Vec<String> {
        match self {
            Suite::Sphere2 | Suite::Warped | Suite::SphereCircle => {
                let (a, b, cz) = (v[0], v[1], v[2]);
                let zc = if self == Suite::Warped { WARP } else { 1.0 };
                let g_thth = if self == Suite::Warped {
                    format!("(cos(th)^2 + {}*sin(th)^2)", WARP * WARP)
                } else {
                    "1".into()
                };
                let scale = if self == Suite::SphereCircle {
                    1.0 / (PRODUCT_RADII.0 * PRODUCT_RADII.0)
                } else {
                    1.0
                };
                let mut out = vec![
                    format!(
                        "{scale}*(({a})*cos(th)*cos(ph) + ({b})*cos(th)*sin(ph) - ({})*sin(th))/{g_thth}",
                        cz * zc
                    ),
                    format!("{scale}*(-({a})*sin(ph) + ({b})*cos(ph))/sin(th)"),
                ];
                if self == Suite::SphereCircle {
                    out.push("0".into());
                }
                out
            }
            Suite::Sphere3 => {
                let (a, b, cc, d) = (v[0], v[1], v[2], v[3]);
                vec![
                    format!("({a})*cos(eta)*cos(p) + ({b})*cos(eta)*sin(p) - ({cc})*sin(eta)*cos(q) - ({d})*sin(eta)*sin(q)"),
                    format!("(-({a})*sin(p) + ({b})*cos(p))/sin(eta)"),
                    format!("(-({cc})*sin(q) + ({d})*cos(q))/cos(eta)"),
                ]
            }
            Suite::Torus2 | Suite::Torus3 => v.iter().map(|x| format!("{x}")).collect(),
        }
    }

    fn ambient_dim(self) -> usize {
        match self {
            Suite::Sphere2 | Suite::Warped | Suite::SphereCircle => 3,
            Suite::Sphere3 => 4,
            Suite::Torus2 => 2,
            Suite::Torus3 => 3,
        }
    }

    /// Random smooth vector field: `Σ h_k P(e_k)` with random smooth `h_k`,
    /// plus a random circle component on the product.
    pub fn vector(self, rng: &mut ChaCha8Rng) -> Vec<String> {
        let n = self.chart().dim();
        let mut comps: Vec<Vec<String>> = vec![Vec::new(); n];
        let vars = self.ambient();
        for k in 0..self.ambient_dim() {
            let mut e = vec![0.0; self.ambient_dim()];
            e[k] = 1.0;
            let h = combo(rng, &products(&vars, 1), vars.len());
            for (i, p) in self.projection(&e).into_iter().enumerate() {
                if p != "0" {
                    comps[i].push(format!("({h})*({p})"));
                }
            }
        }
        if self == Suite::SphereCircle {
            comps[2].push(combo(rng, &products(&vars, 1), vars.len()));
            comps[2].push(format!("({})*cos(psi)", c(rng)));
        }
        comps
            .into_iter()
            .map(|c| {
                if c.is_empty() {
                    "0".into()
                } else {
                    c.join(" + ")
                }
            })
            .collect()
    }
}

/// Runs the binary in-process; returns `(status, stdout, stderr)`.
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("soliton").chain(args.iter().copied());
    let code = soliton_core::cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

/// Every bundled manifest exercised through each subcommand that applies.
pub fn cli_suite() -> Vec<Vec<String>> {
    let mut cmds: Vec<Vec<&str>> = Vec::new();
    for m in [
        "unit_sphere_2",
        "unit_sphere_3",
        "flat_torus_2",
        "flat_torus_3",
        "sphere2_x_circle",
        "warped_sphere",
    ] {
        cmds.push(vec!["describe", m]);
    }
    for m in [
        "sphere_trivial",
        "sphere_ricci_trivial",
        "sphere3_ricci_trivial",
        "sphere3_yamabe_trivial",
        "torus_yamabe_trivial",
        "torus_ricci_trivial",
        "torus_translation",
        "sphere_nonsoliton",
        "sphere_rotation",
        "warped_sphere",
    ] {
        cmds.push(vec!["check", m]);
    }
    cmds.push(vec!["integrate", "unit_sphere_2", "1"]);
    cmds.push(vec!["integrate", "unit_sphere_2", "ric(gradf, gradf)"]);
    cmds.push(vec!["integrate", "warped_sphere", "r*h^2 + lap(h)"]);
    for m in [
        "torus_ricci_fit",
        "sphere_yamabe_fit",
        "sphere_ricci_fit",
        "sphere_clamped_fit",
    ] {
        cmds.push(vec!["fit", m]);
    }
    cmds.into_iter()
        .map(|c| {
            let path = manifest_path(&format!("{}.json", c[1]));
            let mut v = vec![c[0].to_string(), path.display().to_string()];
            v.extend(c[2..].iter().map(|s| s.to_string()));
            v
        })
        .collect()
}
