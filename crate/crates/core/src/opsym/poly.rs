use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::OpError;

/// Exponent pair `(j, k)` of the monomial `D1^j D2^k`.
pub type Exponent = (u32, u32);

/// Polynomial in the two derivative symbols `D1`, `D2` with complex coefficients.
///
/// Zero coefficients are never stored, so structural equality is equality of
/// polynomials.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ComplexBivarPoly {
    coeffs: BTreeMap<Exponent, Complex64>,
}

impl ComplexBivarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(j: u32, k: u32, c: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term((j, k), c);
        p
    }

    pub fn d1() -> Self {
        Self::monomial(1, 0, Complex64::new(1.0, 0.0))
    }

    pub fn d2() -> Self {
        Self::monomial(0, 1, Complex64::new(1.0, 0.0))
    }

    /// Builds a polynomial from `(exponent, coefficient)` terms, summing repeats.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, Complex64)>,
    {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exponent, c: Complex64) {
        let entry = self.coeffs.entry(e).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&e);
        }
    }

    pub fn coeff(&self, j: u32, k: u32) -> Complex64 {
        self.coeffs
            .get(&(j, k))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Exponent, Complex64)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .values()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.coeffs.keys().map(|(j, k)| j + k).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.coeffs.keys().map(|(j, k)| j + k);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Highest-degree homogeneous component.
    pub fn principal_part(&self) -> Result<Self, OpError> {
        let m = self.total_degree().ok_or(OpError::ZeroOperator)?;
        Ok(Self::from_terms(
            self.terms().filter(|((j, k), _)| j + k == m),
        ))
    }

    pub fn eval(&self, z1: Complex64, z2: Complex64) -> Complex64 {
        self.terms()
            .fold(Complex64::new(0.0, 0.0), |acc, ((j, k), c)| {
                acc + c * z1.powu(j) * z2.powu(k)
            })
    }

    /// Coefficients in ascending powers of `D2` after substituting `D1 = z1`.
    pub fn restrict_d1(&self, z1: Complex64) -> Vec<Complex64> {
        let deg = self.coeffs.keys().map(|&(_, k)| k).max().unwrap_or(0) as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); deg + 1];
        for ((j, k), c) in self.terms() {
            out[k as usize] += c * z1.powu(j);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (e, c * s)))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Canonical form: graded order, highest total degree first and, within a
    /// degree, highest `D1` power first. Coefficients carry 17 significant digits
    /// so the printed form parses back to the identical polynomial.
    pub fn to_canonical_string(&self) -> String {
        self.to_string()
    }
}

fn format_coeff(c: Complex64) -> String {
    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
    format!("({:.16e}{}{:.16e}i)", c.re, sign, c.im.abs())
}

impl fmt::Display for ComplexBivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by(|((a1, a2), _), ((b1, b2), _)| (b1 + b2, b1).cmp(&(a1 + a2, a1)));
        for (idx, ((j, k), c)) in terms.into_iter().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            f.write_str(&format_coeff(c))?;
            for (name, e) in [("D1", j), ("D2", k)] {
                match e {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

impl Add for &ComplexBivarPoly {
    type Output = ComplexBivarPoly;
    fn add(self, rhs: Self) -> ComplexBivarPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c);
        }
        out
    }
}

impl Sub for &ComplexBivarPoly {
    type Output = ComplexBivarPoly;
    fn sub(self, rhs: Self) -> ComplexBivarPoly {
        self + &(-rhs)
    }
}

impl Neg for &ComplexBivarPoly {
    type Output = ComplexBivarPoly;
    fn neg(self) -> ComplexBivarPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &ComplexBivarPoly {
    type Output = ComplexBivarPoly;
    fn mul(self, rhs: Self) -> ComplexBivarPoly {
        let mut out = ComplexBivarPoly::zero();
        for ((a1, a2), ca) in self.terms() {
            for ((b1, b2), cb) in rhs.terms() {
                out.add_term((a1 + b1, a2 + b2), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ComplexBivarPoly {
            type Output = ComplexBivarPoly;
            fn $m(self, rhs: Self) -> ComplexBivarPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ComplexBivarPoly {
    type Output = ComplexBivarPoly;
    fn neg(self) -> ComplexBivarPoly {
        -&self
    }
}
