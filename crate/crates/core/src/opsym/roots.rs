//! Roots of univariate complex polynomials via the eigenvalues of the
//! companion matrix, computed with a shifted complex QR iteration on the
//! upper Hessenberg form.

use num_complex::Complex64;

use super::OpError;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// All roots (with repetition) of `sum_k coeffs[k] x^k`.
///
/// The top coefficient must be nonzero.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, OpError> {
    let n = coeffs.len().saturating_sub(1);
    let lead = *coeffs.last().ok_or(OpError::DegenerateDirection)?;
    if lead == ZERO {
        return Err(OpError::DegenerateDirection);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = vec![vec![ZERO; n]; n];
    for i in 1..n {
        h[i][i - 1] = ONE;
    }
    for (i, row) in h.iter_mut().enumerate() {
        row[n - 1] = -coeffs[i] / lead;
    }
    balance(&mut h);
    let mut roots = hessenberg_eigenvalues(h)?;
    for r in roots.iter_mut() {
        *r = polish(coeffs, *r);
    }
    Ok(roots)
}

/// One guarded Newton step; kept only if it lowers the residual.
fn polish(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    let mut best = x;
    let mut best_res = horner(coeffs, x).0.norm();
    for _ in 0..3 {
        let (p, dp) = horner(coeffs, best);
        if dp == ZERO {
            break;
        }
        let cand = best - p / dp;
        let res = horner(coeffs, cand).0.norm();
        if res.partial_cmp(&best_res) != Some(std::cmp::Ordering::Less) {
            break;
        }
        best = cand;
        best_res = res;
    }
    best
}

/// Refines the centre of a cluster of `multiplicity` roots by Newton on the
/// `(multiplicity - 1)`-th derivative, where the root is simple.
pub fn refine_multiple_root(
    coeffs: &[Complex64],
    center: Complex64,
    multiplicity: usize,
) -> Complex64 {
    if multiplicity <= 1 || multiplicity >= coeffs.len() {
        return center;
    }
    let mut d = coeffs.to_vec();
    for _ in 1..multiplicity {
        d = d
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
    }
    let refined = polish(&d, center);
    let scale = center.norm().max(1.0);
    // Reject a jump that leaves the cluster.
    if (refined - center).norm() <= 1e-4 * scale {
        refined
    } else {
        center
    }
}

fn horner(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// Diagonal similarity scaling by powers of two so rows and columns have
/// comparable norms.
#[allow(clippy::needless_range_loop)]
fn balance(h: &mut [Vec<Complex64>]) {
    let n = h.len();
    let radix = 2.0_f64;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += h[j][i].l1_norm();
                    r += h[i][j].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            let mut rr = r;
            while cc < rr / radix {
                f *= radix;
                cc *= radix;
                rr /= radix;
            }
            while cc >= rr * radix {
                f /= radix;
                cc /= radix;
                rr *= radix;
            }
            if (cc + rr) < 0.95 * s {
                done = false;
                for j in 0..n {
                    h[i][j] /= f;
                    h[j][i] *= f;
                }
            }
        }
    }
}

/// Complex Givens rotation `(c, s)` with `c` real such that
/// `[c, s; -conj(s), c] * [a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, ONE);
    }
    let r = na.hypot(nb);
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

#[allow(clippy::needless_range_loop)]
fn hessenberg_eigenvalues(mut h: Vec<Vec<Complex64>>) -> Result<Vec<Complex64>, OpError> {
    let n = h.len();
    let mut eig = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let max_iter = 60 * n.max(1);
    loop {
        if hi == 0 {
            eig.push(h[0][0]);
            break;
        }
        // Locate the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let scale = h[lo - 1][lo - 1].l1_norm() + h[lo][lo].l1_norm();
            let tol = f64::EPSILON * if scale == 0.0 { 1.0 } else { scale };
            if h[lo][lo - 1].l1_norm() <= tol {
                h[lo][lo - 1] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig.push(h[hi][hi]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > max_iter {
            return Err(OpError::RootsNotConverged);
        }
        let shift = if iter.is_multiple_of(11) {
            // Exceptional shift to break cycles.
            h[hi][hi] + Complex64::new(h[hi][hi - 1].norm(), 0.0) * 0.75
        } else {
            wilkinson_shift(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
        };
        qr_step(&mut h, lo, hi, shift);
    }
    Ok(eig)
}

/// Eigenvalue of the trailing 2x2 block nearest to its bottom-right entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr_half = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powu(2) + b * c;
    let root = disc.sqrt();
    let e1 = tr_half + root;
    let e2 = tr_half - root;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

#[allow(clippy::needless_range_loop)]
fn qr_step(h: &mut [Vec<Complex64>], lo: usize, hi: usize, mu: Complex64) {
    for k in lo..=hi {
        h[k][k] -= mu;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[k][k], h[k + 1][k]);
        for j in k..=hi {
            let x = h[k][j];
            let y = h[k + 1][j];
            h[k][j] = x * c + s * y;
            h[k + 1][j] = -s.conj() * x + y * c;
        }
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        let top = (k + 2).min(hi);
        for row in h.iter_mut().take(top + 1).skip(lo) {
            let x = row[k];
            let y = row[k + 1];
            row[k] = x * c + y * s.conj();
            row[k + 1] = -x * s + y * c;
        }
    }
    for k in lo..=hi {
        h[k][k] += mu;
    }
}

/// Groups roots closer than `rel_tol * max(1, |r|)` and returns each cluster's
/// mean together with its size.
pub fn cluster_roots(roots: &[Complex64], rel_tol: f64) -> Vec<(Complex64, usize)> {
    let mut clusters: Vec<(Vec<Complex64>, Complex64)> = Vec::new();
    for &r in roots {
        let found = clusters.iter_mut().find(|(_, center)| {
            (r - *center).norm() <= rel_tol * center.norm().max(r.norm()).max(1.0)
        });
        match found {
            Some((members, center)) => {
                members.push(r);
                *center = members.iter().sum::<Complex64>() / members.len() as f64;
            }
            None => clusters.push((vec![r], r)),
        }
    }
    clusters
        .into_iter()
        .map(|(members, center)| (center, members.len()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v
    }

    #[test]
    fn double_root_refinement_reaches_full_precision() {
        // (x + 1)^2 (x - 2)
        let coeffs = [c(-2.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let roots = polynomial_roots(&coeffs).unwrap();
        let cl = cluster_roots(&roots, 1e-7);
        let (center, m) = cl.into_iter().find(|(_, m)| *m == 2).unwrap();
        let r = refine_multiple_root(&coeffs, center, m);
        assert!((r - c(-1.0, 0.0)).norm() < 1e-14, "{r}");
    }

    #[test]
    fn quadratic() {
        // x^2 + 1
        let r = sorted(polynomial_roots(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap());
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn double_roots_cluster() {
        // (x^2 - 1)^2 = x^4 - 2x^2 + 1
        let coeffs = [
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(-2.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ];
        let roots = polynomial_roots(&coeffs).unwrap();
        assert_eq!(roots.len(), 4);
        let mut cl = cluster_roots(&roots, 1e-7);
        cl.sort_by(|a, b| a.0.re.partial_cmp(&b.0.re).unwrap());
        assert_eq!(cl.len(), 2);
        assert_eq!(cl[0].1, 2);
        assert!((cl[0].0 - c(-1.0, 0.0)).norm() < 1e-7);
        assert!((cl[1].0 - c(1.0, 0.0)).norm() < 1e-7);
    }

    #[test]
    fn complex_coefficients() {
        // (x - (1+2i)) (x + 3i) = x^2 + (-1 + i) x + (6 - 3i)
        let roots = sorted(polynomial_roots(&[c(6.0, -3.0), c(-1.0, 1.0), c(1.0, 0.0)]).unwrap());
        assert!((roots[0] - c(0.0, -3.0)).norm() < 1e-13);
        assert!((roots[1] - c(1.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn zero_leading_coefficient_is_rejected() {
        assert!(matches!(
            polynomial_roots(&[c(1.0, 0.0), c(0.0, 0.0)]),
            Err(OpError::DegenerateDirection)
        ));
    }

    #[test]
    fn degree_eight_with_spread_roots() {
        let want: Vec<Complex64> = (1..=8)
            .map(|k| c(k as f64 * 0.7 - 3.0, (k % 3) as f64))
            .collect();
        let mut coeffs = vec![c(1.0, 0.0)];
        for &w in &want {
            let mut next = vec![ZERO; coeffs.len() + 1];
            for (i, &a) in coeffs.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * w;
            }
            coeffs = next;
        }
        let got = polynomial_roots(&coeffs).unwrap();
        for w in want {
            let best = got
                .iter()
                .map(|g| (g - w).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8, "missing root {w}: {best}");
        }
    }
}
