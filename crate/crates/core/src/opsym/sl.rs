//! Shapiro–Lopatinskii check for constant-coefficient boundary value problems
//! on the half-plane `x2 > 0`.
//!
//! After the substitution `D1 -> -i s` (with `s = ±1` the sign of the
//! tangential frequency) and `D2 -> λ`, the principal symbol becomes a
//! polynomial in `λ`. Its roots with negative real part span the decaying
//! solutions `x2^q e^{λ x2}`; the condition holds when the boundary operators
//! restricted to that space form an invertible square matrix for both signs.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::poly::ComplexBivarPoly;
use super::roots::{cluster_roots, polynomial_roots, refine_multiple_root};
use super::OpError;

/// Two roots closer than this (relative) are one root with multiplicity.
pub const ROOT_CLUSTER_TOL: f64 = 1e-7;
/// Roots with `|Re λ| <= IMAG_AXIS_TOL * max(1, |λ|)` are treated as imaginary.
pub const IMAG_AXIS_TOL: f64 = 1e-9;
/// Determinant threshold after each row is scaled to unit max modulus.
pub const DET_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum XiSign {
    Plus,
    Minus,
}

impl XiSign {
    pub const BOTH: [XiSign; 2] = [XiSign::Plus, XiSign::Minus];

    pub fn value(self) -> f64 {
        match self {
            XiSign::Plus => 1.0,
            XiSign::Minus => -1.0,
        }
    }

    /// The substituted value of `D1`.
    pub fn d1_value(self) -> Complex64 {
        Complex64::new(0.0, -self.value())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharRoot {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// Distinct roots in `λ` of `p0(-i s, λ)`, split by the sign of the real part.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSystem {
    pub xi_sign: XiSign,
    pub decaying: Vec<CharRoot>,
    pub growing: Vec<CharRoot>,
}

impl RootSystem {
    /// Number of decaying roots counted with multiplicity.
    pub fn decaying_count(&self) -> usize {
        self.decaying.iter().map(|r| r.multiplicity).sum()
    }

    pub fn growing_count(&self) -> usize {
        self.growing.iter().map(|r| r.multiplicity).sum()
    }
}

/// The function `x2^power * exp(lambda * x2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisFunction {
    pub lambda: Complex64,
    pub power: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlStatus {
    Satisfied,
    Violated,
    NotElliptic,
    WrongCount,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignReport {
    pub xi_sign: XiSign,
    /// Determinant of the row-normalised Lopatinskii matrix.
    pub det: Complex64,
    pub matrix: DMatrix<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlVerdict {
    pub status: SlStatus,
    /// First sign at which the determinant vanishes.
    pub witness_sign: Option<XiSign>,
    pub violating_signs: Vec<XiSign>,
    pub reports: Vec<SignReport>,
    /// Unit-norm kernel vector at the witness sign, in basis order.
    pub null_vector: Option<Vec<Complex64>>,
    /// Number of decaying roots (with multiplicity), when elliptic.
    pub decaying_count: Option<usize>,
}

impl SlVerdict {
    fn bare(status: SlStatus, decaying_count: Option<usize>) -> Self {
        Self {
            status,
            witness_sign: None,
            violating_signs: Vec::new(),
            reports: Vec::new(),
            null_vector: None,
            decaying_count,
        }
    }

    pub fn report(&self, sign: XiSign) -> Option<&SignReport> {
        self.reports.iter().find(|r| r.xi_sign == sign)
    }
}

fn is_real_root(t: Complex64) -> bool {
    t.im.abs() <= IMAG_AXIS_TOL * t.norm().max(1.0)
}

/// Whether the principal part vanishes only at the origin on the real plane.
pub fn is_elliptic(p: &ComplexBivarPoly) -> Result<bool, OpError> {
    let p0 = p.principal_part()?;
    let m = p0.total_degree().unwrap_or(0);
    if m == 0 {
        return Ok(true);
    }
    let minus_i = Complex64::new(0.0, -1.0);
    if p0.eval(Complex64::new(0.0, 0.0), minus_i).norm() == 0.0 {
        return Ok(false);
    }
    // p0(-i, -i τ) as a polynomial in τ.
    let coeffs: Vec<Complex64> = p0
        .restrict_d1(minus_i)
        .into_iter()
        .enumerate()
        .map(|(k, a)| a * minus_i.powu(k as u32))
        .collect();
    let roots = polynomial_roots(&coeffs)?;
    Ok(!roots.into_iter().any(is_real_root))
}

/// Roots of `p0(-i s, λ)` for one sign of the tangential frequency.
pub fn characteristic_roots(p0: &ComplexBivarPoly, sign: XiSign) -> Result<RootSystem, OpError> {
    let coeffs = p0.restrict_d1(sign.d1_value());
    let raw = polynomial_roots(&coeffs)?;
    let mut decaying = Vec::new();
    let mut growing = Vec::new();
    for (center, multiplicity) in cluster_roots(&raw, ROOT_CLUSTER_TOL) {
        let value = refine_multiple_root(&coeffs, center, multiplicity);
        let root = CharRoot {
            value,
            multiplicity,
        };
        if value.re.abs() <= IMAG_AXIS_TOL * value.norm().max(1.0) {
            return Err(OpError::ImaginaryRoot { root: value });
        } else if value.re < 0.0 {
            decaying.push(root);
        } else {
            growing.push(root);
        }
    }
    let key = |r: &CharRoot| (r.value.re, r.value.im);
    decaying.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    growing.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    Ok(RootSystem {
        xi_sign: sign,
        decaying,
        growing,
    })
}

/// Basis of bounded solutions: `x2^q e^{λ x2}` for `q < multiplicity(λ)`.
pub fn decaying_solution_basis(roots: &RootSystem) -> Vec<BasisFunction> {
    roots
        .decaying
        .iter()
        .flat_map(|r| {
            (0..r.multiplicity as u32).map(move |power| BasisFunction {
                lambda: r.value,
                power,
            })
        })
        .collect()
}

fn falling_factorial(b: u32, q: u32) -> f64 {
    (b - q + 1..=b).map(f64::from).product()
}

/// Value at `x2 = 0` of the boundary operator applied to a basis function.
pub fn apply_boundary(b: &ComplexBivarPoly, f: &BasisFunction, sign: XiSign) -> Complex64 {
    let z1 = sign.d1_value();
    b.terms()
        .filter(|((_, k), _)| *k >= f.power)
        .map(|((j, k), c)| {
            c * z1.powu(j) * f.lambda.powu(k - f.power) * falling_factorial(k, f.power)
        })
        .sum()
}

/// Boundary operators (rows) applied to the decaying basis (columns).
pub fn lopatinskii_matrix(
    basis: &[BasisFunction],
    bconds: &[ComplexBivarPoly],
    sign: XiSign,
) -> Result<DMatrix<Complex64>, OpError> {
    if basis.len() != bconds.len() {
        return Err(OpError::CountMismatch {
            decaying: basis.len(),
            conditions: bconds.len(),
        });
    }
    let n = basis.len();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        apply_boundary(&bconds[i], &basis[j], sign)
    }))
}

fn normalize_rows(m: &mut DMatrix<Complex64>) {
    for mut row in m.row_iter_mut() {
        let max = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max > 0.0 {
            row /= Complex64::new(max, 0.0);
        }
    }
}

fn null_vector(m: &DMatrix<Complex64>) -> Option<Vec<Complex64>> {
    let n = m.ncols();
    if n == 0 {
        return None;
    }
    let svd = m.clone().try_svd(false, true, 1e-15, 1000)?;
    let v_t = svd.v_t?;
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())?;
    let mut v: Vec<Complex64> = v_t.row(idx).iter().map(|z| z.conj()).collect();
    // Fix the phase so the largest component is real and positive.
    let (_, pivot) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())?;
    let phase = pivot.conj() / pivot.norm();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z = *z * phase / norm;
    }
    Some(v)
}

/// Runs the full check. Principal parts of `p` and of every boundary
/// operator are used, so lower-order terms never change the verdict.
pub fn check_sl(p: &ComplexBivarPoly, bconds: &[ComplexBivarPoly]) -> SlVerdict {
    let Ok(p0) = p.principal_part() else {
        return SlVerdict::bare(SlStatus::NotElliptic, None);
    };
    if !matches!(is_elliptic(&p0), Ok(true)) {
        return SlVerdict::bare(SlStatus::NotElliptic, None);
    }
    let mut systems = Vec::with_capacity(2);
    for sign in XiSign::BOTH {
        match characteristic_roots(&p0, sign) {
            Ok(rs) => systems.push(rs),
            Err(_) => return SlVerdict::bare(SlStatus::NotElliptic, None),
        }
    }
    let count = systems[0].decaying_count();
    if systems.iter().any(|rs| rs.decaying_count() != bconds.len()) {
        return SlVerdict::bare(SlStatus::WrongCount, Some(count));
    }
    let b0: Vec<ComplexBivarPoly> = bconds
        .iter()
        .map(|b| b.principal_part().unwrap_or_default())
        .collect();

    let mut verdict = SlVerdict::bare(SlStatus::Satisfied, Some(count));
    for rs in &systems {
        let basis = decaying_solution_basis(rs);
        let mut m = lopatinskii_matrix(&basis, &b0, rs.xi_sign).expect("counts were checked above");
        normalize_rows(&mut m);
        let det = if m.nrows() == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            m.determinant()
        };
        if det.norm() < DET_TOL {
            verdict.status = SlStatus::Violated;
            verdict.violating_signs.push(rs.xi_sign);
            if verdict.witness_sign.is_none() {
                verdict.witness_sign = Some(rs.xi_sign);
                verdict.null_vector = null_vector(&m);
            }
        }
        verdict.reports.push(SignReport {
            xi_sign: rs.xi_sign,
            det,
            matrix: m,
        });
    }
    verdict
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_operator;
    use super::*;

    fn op(s: &str) -> ComplexBivarPoly {
        parse_operator(s).unwrap()
    }

    #[test]
    fn laplacian_roots() {
        let rs = characteristic_roots(&op("D1^2+D2^2"), XiSign::Plus).unwrap();
        assert_eq!(rs.decaying.len(), 1);
        assert!((rs.decaying[0].value + 1.0).norm() < 1e-12);
        assert_eq!(rs.growing_count(), 1);
    }

    #[test]
    fn bilaplacian_double_root() {
        let rs = characteristic_roots(&op("(D1^2+D2^2)^2"), XiSign::Minus).unwrap();
        assert_eq!(rs.decaying.len(), 1);
        assert_eq!(rs.decaying[0].multiplicity, 2);
        let basis = decaying_solution_basis(&rs);
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[1].power, 1);
    }

    #[test]
    fn ellipticity() {
        assert!(is_elliptic(&op("D1^2+D2^2")).unwrap());
        assert!(!is_elliptic(&op("D1^2-D2^2")).unwrap());
        assert!(!is_elliptic(&op("D1*D2")).unwrap());
        assert!(is_elliptic(&op("D1 + i*D2")).unwrap());
        assert!(!is_elliptic(&op("D1")).unwrap());
    }

    #[test]
    fn wave_operator_is_not_elliptic() {
        let v = check_sl(&op("D1^2-D2^2"), &[op("u")]);
        assert_eq!(v.status, SlStatus::NotElliptic);
    }

    #[test]
    fn wrong_count() {
        let v = check_sl(&op("D1^2+D2^2"), &[op("u"), op("D2")]);
        assert_eq!(v.status, SlStatus::WrongCount);
        assert_eq!(v.decaying_count, Some(1));
    }

    #[test]
    fn boundary_entry_on_polynomial_basis() {
        // D2^2 on x2 e^{λ x2} at 0 gives 2λ.
        let f = BasisFunction {
            lambda: Complex64::new(-2.0, 0.5),
            power: 1,
        };
        let v = apply_boundary(&op("D2^2"), &f, XiSign::Plus);
        assert!((v - f.lambda * 2.0).norm() < 1e-15);
        assert_eq!(
            apply_boundary(&op("u"), &f, XiSign::Plus),
            Complex64::new(0.0, 0.0)
        );
    }
}
