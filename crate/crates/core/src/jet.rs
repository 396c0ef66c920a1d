//! Truncated multivariate Taylor expansions ("jets").
//!
//! A [`Jet`] carries the Taylor coefficients `c_α = ∂^α f / α!` of a smooth
//! function at a point, for every multi-index `|α| ≤ order`. Arithmetic is
//! exact truncated-Taylor arithmetic, so derivatives obtained from a jet agree
//! with symbolic differentiation up to rounding.
//!
//! Coefficients are stored densely in a fixed graded enumeration of
//! multi-indices (all degree-0 entries, then degree 1, ...). Truncating a jet
//! to a lower order is therefore a prefix of the coefficient array, which is
//! what lets jets of different orders be combined: the result carries the
//! smaller order.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use thiserror::Error;

/// Largest number of coordinates a jet can carry.
pub const MAX_DIM: usize = 4;
/// Largest truncation order.
pub const MAX_ORDER: usize = 4;
/// Order used for metric components and vector fields.
pub const DEFAULT_ORDER: usize = 3;

/// Number of multi-indices with `|α| ≤ MAX_ORDER` in `MAX_DIM` variables.
const MAX_COEFFS: usize = 70;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("variable index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("unsupported jet shape: dim {dim}, order {order}")]
    UnsupportedShape { dim: usize, order: usize },
    #[error("division by a jet with value 0")]
    DivisionByZero,
    #[error("{op} is undefined at value {value}")]
    Domain { op: &'static str, value: f64 },
    #[error("cannot differentiate an order-0 jet")]
    OrderExhausted,
}

/// Elementary functions that can be composed with a jet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Unary {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Neg,
    /// Power by a real constant.
    Pow(f64),
}

impl Unary {
    pub fn name(self) -> &'static str {
        match self {
            Unary::Sin => "sin",
            Unary::Cos => "cos",
            Unary::Exp => "exp",
            Unary::Log => "log",
            Unary::Sqrt => "sqrt",
            Unary::Neg => "neg",
            Unary::Pow(_) => "pow",
        }
    }
}

struct DimTable {
    alphas: Vec<[u8; MAX_DIM]>,
    /// `counts[k]` = number of multi-indices with `|α| ≤ k`.
    counts: [usize; MAX_ORDER + 1],
    /// Per truncation order: `(i, j, k)` with `α_i + α_j = α_k`.
    products: Vec<Vec<(u8, u8, u8)>>,
    /// `shift[idx][v]` = index of `α + e_v`, defined for `|α| < MAX_ORDER`.
    shift: Vec<[u8; MAX_DIM]>,
    /// `α!`
    factorial: Vec<f64>,
}

impl DimTable {
    fn build(dim: usize) -> Self {
        let mut alphas: Vec<[u8; MAX_DIM]> = Vec::new();
        let mut counts = [0; MAX_ORDER + 1];
        for degree in 0..=MAX_ORDER {
            let mut current = [0u8; MAX_DIM];
            push_degree(dim, 0, degree, &mut current, &mut alphas);
            counts[degree] = alphas.len();
        }
        let index_of = |a: &[u8; MAX_DIM]| alphas.iter().position(|b| b == a);

        let mut products = Vec::with_capacity(MAX_ORDER + 1);
        for order in 0..=MAX_ORDER {
            let n = counts[order];
            let mut triples = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let mut sum = [0u8; MAX_DIM];
                    for v in 0..MAX_DIM {
                        sum[v] = alphas[i][v] + alphas[j][v];
                    }
                    if degree(&sum) as usize <= order {
                        let k = index_of(&sum).expect("sum of enumerated multi-indices");
                        triples.push((i as u8, j as u8, k as u8));
                    }
                }
            }
            products.push(triples);
        }

        let shift = alphas
            .iter()
            .map(|a| {
                let mut out = [u8::MAX; MAX_DIM];
                if (degree(a) as usize) < MAX_ORDER {
                    for (v, slot) in out.iter_mut().enumerate().take(dim) {
                        let mut b = *a;
                        b[v] += 1;
                        *slot = index_of(&b).expect("shifted multi-index") as u8;
                    }
                }
                out
            })
            .collect();

        let factorial = alphas
            .iter()
            .map(|a| {
                a.iter()
                    .map(|&k| (1..=k as u32).product::<u32>() as f64)
                    .product()
            })
            .collect();

        DimTable {
            alphas,
            counts,
            products,
            shift,
            factorial,
        }
    }
}

fn degree(a: &[u8; MAX_DIM]) -> u8 {
    a.iter().sum()
}

fn push_degree(
    dim: usize,
    var: usize,
    remaining: usize,
    current: &mut [u8; MAX_DIM],
    out: &mut Vec<[u8; MAX_DIM]>,
) {
    if var + 1 == dim {
        current[var] = remaining as u8;
        out.push(*current);
        current[var] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        current[var] = k as u8;
        push_degree(dim, var + 1, remaining - k, current, out);
    }
    current[var] = 0;
}

fn table(dim: usize) -> &'static DimTable {
    static TABLES: OnceLock<Vec<DimTable>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| (1..=MAX_DIM).map(DimTable::build).collect());
    &tables[dim - 1]
}

/// Number of Taylor coefficients for a jet of the given shape.
pub fn coefficient_count(dim: usize, order: usize) -> usize {
    table(dim).counts[order]
}

/// Truncated Taylor expansion of a scalar function of `dim` variables.
#[derive(Clone, Copy)]
pub struct Jet {
    dim: u8,
    order: u8,
    c: [f64; MAX_COEFFS],
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("dim", &self.dim)
            .field("order", &self.order)
            .field("coeffs", &self.coeffs())
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.order == other.order && self.coeffs() == other.coeffs()
    }
}

impl Jet {
    fn check_shape(dim: usize, order: usize) -> Result<(), JetError> {
        if dim == 0 || dim > MAX_DIM || order > MAX_ORDER {
            return Err(JetError::UnsupportedShape { dim, order });
        }
        Ok(())
    }

    /// The constant function `value`, carried at the maximal order so that it
    /// never truncates the jets it is combined with.
    pub fn constant(dim: usize, value: f64) -> Self {
        Self::constant_with_order(dim, MAX_ORDER, value)
    }

    pub fn constant_with_order(dim: usize, order: usize, value: f64) -> Self {
        assert!(dim >= 1 && dim <= MAX_DIM && order <= MAX_ORDER);
        let mut c = [0.0; MAX_COEFFS];
        c[0] = value;
        Jet {
            dim: dim as u8,
            order: order as u8,
            c,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(dim, 0.0)
    }

    /// Jet of the coordinate function `x ↦ x_i` at `x`, order 3.
    pub fn seed(x: &[f64], i: usize) -> Result<Self, JetError> {
        Self::seed_with_order(x, i, DEFAULT_ORDER)
    }

    pub fn seed_with_order(x: &[f64], i: usize, order: usize) -> Result<Self, JetError> {
        Self::check_shape(x.len(), order)?;
        if i >= x.len() {
            return Err(JetError::IndexOutOfRange {
                index: i,
                dim: x.len(),
            });
        }
        let mut jet = Self::constant_with_order(x.len(), order, x[i]);
        if order >= 1 {
            // Degree-1 multi-indices follow the constant term in variable order.
            jet.c[1 + i] = 1.0;
        }
        Ok(jet)
    }

    /// Builds a jet from raw Taylor coefficients in the internal enumeration.
    pub fn from_coeffs(dim: usize, order: usize, coeffs: &[f64]) -> Result<Self, JetError> {
        Self::check_shape(dim, order)?;
        if coeffs.len() != coefficient_count(dim, order) {
            return Err(JetError::UnsupportedShape { dim, order });
        }
        let mut c = [0.0; MAX_COEFFS];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Ok(Jet {
            dim: dim as u8,
            order: order as u8,
            c,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Taylor coefficients in the internal graded enumeration.
    pub fn coeffs(&self) -> &[f64] {
        &self.c[..coefficient_count(self.dim(), self.order())]
    }

    /// Multi-indices matching [`Jet::coeffs`].
    pub fn multi_indices(&self) -> &'static [[u8; MAX_DIM]] {
        let t = table(self.dim());
        &t.alphas[..t.counts[self.order()]]
    }

    /// `true` when every non-constant coefficient vanishes.
    pub fn is_constant(&self) -> bool {
        self.coeffs()[1..].iter().all(|&v| v == 0.0)
    }

    /// Mixed partial derivative; `vars` lists the differentiation variables
    /// with repetition, e.g. `[0, 0, 1]` for `∂₀∂₀∂₁`.
    ///
    /// Returns `None` when the request exceeds the jet's order.
    pub fn partial(&self, vars: &[usize]) -> Option<f64> {
        if vars.len() > self.order() {
            return None;
        }
        let mut alpha = [0u8; MAX_DIM];
        for &v in vars {
            if v >= self.dim() {
                return None;
            }
            alpha[v] += 1;
        }
        let t = table(self.dim());
        let idx = t.alphas.iter().position(|a| *a == alpha)?;
        Some(self.c[idx] * t.factorial[idx])
    }

    /// First partial `∂_v` at the expansion point.
    pub fn d1(&self, v: usize) -> f64 {
        debug_assert!(self.order >= 1 && v < self.dim());
        self.c[1 + v]
    }

    /// The jet of `∂_v f`, one order lower.
    pub fn derivative(&self, v: usize) -> Result<Jet, JetError> {
        if v >= self.dim() {
            return Err(JetError::IndexOutOfRange {
                index: v,
                dim: self.dim(),
            });
        }
        if self.order == 0 {
            return Err(JetError::OrderExhausted);
        }
        Ok(self.d(v))
    }

    /// Unchecked [`Jet::derivative`] for callers that validated the order.
    pub(crate) fn d(&self, v: usize) -> Jet {
        debug_assert!(self.order >= 1);
        let t = table(self.dim());
        let order = self.order() - 1;
        let mut out = Jet::constant_with_order(self.dim(), order, 0.0);
        for idx in 0..t.counts[order] {
            let up = t.shift[idx][v] as usize;
            out.c[idx] = (t.alphas[idx][v] as f64 + 1.0) * self.c[up];
        }
        out
    }

    /// Drops coefficients above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        let mut out = *self;
        if order < self.order() {
            let keep = coefficient_count(self.dim(), order);
            out.c[keep..].iter_mut().for_each(|v| *v = 0.0);
            out.order = order as u8;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut out = *self;
        let n = coefficient_count(self.dim(), self.order());
        out.c[..n].iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn checked_add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.same_dim(other)?;
        Ok(self.add_unchecked(other, 1.0))
    }

    pub fn checked_sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.same_dim(other)?;
        Ok(self.add_unchecked(other, -1.0))
    }

    pub fn checked_mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.same_dim(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn checked_div(&self, other: &Jet) -> Result<Jet, JetError> {
        self.same_dim(other)?;
        Ok(self.mul_unchecked(&other.recip()?))
    }

    /// `1 / self`.
    pub fn recip(&self) -> Result<Jet, JetError> {
        let a = self.value();
        if a == 0.0 {
            return Err(JetError::DivisionByZero);
        }
        let mut derivs = [0.0; MAX_ORDER + 1];
        let mut term = 1.0 / a;
        for (m, d) in derivs.iter_mut().enumerate().take(self.order() + 1) {
            *d = term;
            term *= -((m + 1) as f64) / a;
        }
        Ok(self.compose(&derivs))
    }

    /// Composes an elementary function with this jet.
    pub fn apply(&self, op: Unary) -> Result<Jet, JetError> {
        let a = self.value();
        let k = self.order();
        let mut derivs = [0.0; MAX_ORDER + 1];
        match op {
            Unary::Neg => return Ok(self.scale(-1.0)),
            Unary::Sin | Unary::Cos => {
                let (s, c) = a.sin_cos();
                let cycle = match op {
                    Unary::Sin => [s, c, -s, -c],
                    _ => [c, -s, -c, s],
                };
                for (m, d) in derivs.iter_mut().enumerate().take(k + 1) {
                    *d = cycle[m % 4];
                }
            }
            Unary::Exp => {
                let e = a.exp();
                derivs.iter_mut().take(k + 1).for_each(|d| *d = e);
            }
            Unary::Log => {
                if a <= 0.0 {
                    return Err(JetError::Domain {
                        op: "log",
                        value: a,
                    });
                }
                derivs[0] = a.ln();
                let mut term = 1.0 / a;
                for (m, d) in derivs.iter_mut().enumerate().skip(1).take(k) {
                    *d = term;
                    term *= -(m as f64) / a;
                }
            }
            Unary::Sqrt => {
                if a < 0.0 || (a == 0.0 && !self.is_constant()) {
                    return Err(JetError::Domain {
                        op: "sqrt",
                        value: a,
                    });
                }
                if a == 0.0 {
                    return Ok(Jet::constant_with_order(self.dim(), k, 0.0));
                }
                return Ok(self.powf_positive(0.5));
            }
            Unary::Pow(p) => return self.powf(p),
        }
        Ok(self.compose(&derivs))
    }

    /// `self^p` for a real constant `p`.
    ///
    /// Integer exponents use repeated multiplication (negative ones through
    /// [`Jet::recip`]), so a zero base is fine for nonnegative integers.
    /// Other exponents need a positive base.
    pub fn powf(&self, p: f64) -> Result<Jet, JetError> {
        if p.fract() == 0.0 && p.abs() <= 64.0 {
            let n = p.abs() as u32;
            let pos = self.powi_nonneg(n);
            return if p < 0.0 { pos.recip() } else { Ok(pos) };
        }
        let a = self.value();
        if a <= 0.0 {
            return Err(JetError::Domain {
                op: "pow",
                value: a,
            });
        }
        Ok(self.powf_positive(p))
    }

    fn powf_positive(&self, p: f64) -> Jet {
        // exp(p log a) gives the same coefficients; the falling-factorial form
        // is the direct univariate Taylor expansion.
        let a = self.value();
        let mut derivs = [0.0; MAX_ORDER + 1];
        let mut falling = 1.0;
        for (m, d) in derivs.iter_mut().enumerate().take(self.order() + 1) {
            *d = falling * a.powf(p - m as f64);
            falling *= p - m as f64;
        }
        self.compose(&derivs)
    }

    fn powi_nonneg(&self, mut n: u32) -> Jet {
        let mut base = *self;
        let mut acc = Jet::constant_with_order(self.dim(), self.order(), 1.0);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// `Σ_m φ^(m)(a)/m! · (self − a)^m` by Horner's rule.
    fn compose(&self, derivs: &[f64; MAX_ORDER + 1]) -> Jet {
        let k = self.order();
        let mut h = *self;
        h.c[0] = 0.0;
        let mut inv_fact = [1.0; MAX_ORDER + 1];
        for m in 1..=MAX_ORDER {
            inv_fact[m] = inv_fact[m - 1] / m as f64;
        }
        let mut acc = Jet::constant_with_order(self.dim(), k, derivs[k] * inv_fact[k]);
        for m in (0..k).rev() {
            acc = acc.mul_unchecked(&h);
            acc.c[0] += derivs[m] * inv_fact[m];
        }
        acc
    }

    fn same_dim(&self, other: &Jet) -> Result<(), JetError> {
        if self.dim != other.dim {
            return Err(JetError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    fn add_unchecked(&self, other: &Jet, sign: f64) -> Jet {
        let order = self.order.min(other.order);
        let n = coefficient_count(self.dim(), order as usize);
        let mut out = Jet::constant_with_order(self.dim(), order as usize, 0.0);
        for i in 0..n {
            out.c[i] = self.c[i] + sign * other.c[i];
        }
        out
    }

    fn mul_unchecked(&self, other: &Jet) -> Jet {
        let order = self.order.min(other.order) as usize;
        if self.is_constant() {
            return other.truncate(order).scale(self.c[0]);
        }
        if other.is_constant() {
            return self.truncate(order).scale(other.c[0]);
        }
        let t = table(self.dim());
        let mut out = Jet::constant_with_order(self.dim(), order, 0.0);
        for &(i, j, k) in &t.products[order] {
            out.c[k as usize] += self.c[i as usize] * other.c[j as usize];
        }
        out
    }
}

// Operator impls panic on dimension mismatch; use the `checked_*` methods
// where dimensions are not known to agree.

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        assert_eq!(self.dim, rhs.dim, "jet dimension mismatch");
        self.add_unchecked(&rhs, 1.0)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        assert_eq!(self.dim, rhs.dim, "jet dimension mismatch");
        self.add_unchecked(&rhs, -1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        assert_eq!(self.dim, rhs.dim, "jet dimension mismatch");
        self.mul_unchecked(&rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = *self - rhs;
    }
}
