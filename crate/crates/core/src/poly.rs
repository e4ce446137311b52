//! Dense complex polynomials in one and two variables, and an
//! Aberth–Ehrlich simultaneous root finder.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

const EPS: f64 = f64::EPSILON;

/// Evaluates `Σ c_i x^i` (coefficients low to high) by Horner's rule.
pub fn eval(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

/// Value and derivative at `x`.
pub fn eval_with_derivative(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut p = zero;
    let mut dp = zero;
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

pub fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Drops trailing (highest-degree) coefficients that are exactly zero.
pub fn trim(coeffs: &mut Vec<Complex64>) {
    while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
        coeffs.pop();
    }
}

/// Starting points on circles whose radii come from the upper convex hull of
/// `(i, log|c_i|)`, one circle per hull edge with as many points as the edge
/// spans. Roots of very different magnitudes then start near their own scale.
fn initial_guesses(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let pts: Vec<(usize, f64)> =
        coeffs.iter().enumerate().filter(|(_, c)| c.norm() > 0.0).map(|(i, c)| (i, c.norm().ln())).collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(n);
    // Zero roots (leading low coefficients vanish) start at a tiny radius.
    let first = hull[0].0;
    for k in 0..first {
        out.push(Complex64::from_polar(1e-12, TAU * k as f64 / first.max(1) as f64 + 0.4));
    }
    for (e, w) in hull.windows(2).enumerate() {
        let (i, j) = (w[0].0, w[1].0);
        let span = j - i;
        let radius = ((w[0].1 - w[1].1) / span as f64).exp();
        for k in 0..span {
            let angle = TAU * k as f64 / span as f64 + TAU * e as f64 / n as f64 + 0.4;
            out.push(Complex64::from_polar(radius, angle));
        }
    }
    out
}

/// All roots of `Σ c_i x^i` (low to high, nonzero leading coefficient) by
/// Aberth–Ehrlich iteration. Roots that never meet the backward-error stop
/// are returned with their last iterate.
pub fn aberth_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = coeffs.to_vec();
    trim(&mut coeffs);
    if coeffs.len() <= 1 {
        return Vec::new();
    }
    let n = coeffs.len() - 1;
    let abs_coeffs: Vec<f64> = coeffs.iter().map(|c| c.norm()).collect();
    let mut roots = initial_guesses(&coeffs);
    let mut done = vec![false; n];
    for _ in 0..800 {
        let mut all_done = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let z = roots[k];
            let (p, dp) = eval_with_derivative(&coeffs, z);
            let bound: f64 = abs_coeffs.iter().rev().fold(0.0, |acc, &c| acc * z.norm() + c);
            if p.norm() <= 8.0 * EPS * bound {
                done[k] = true;
                continue;
            }
            all_done = false;
            let ratio = p / dp;
            let repulsion: Complex64 =
                roots.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &r)| (z - r).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                roots[k] = z - step;
            }
        }
        if all_done {
            break;
        }
    }
    roots
}

/// Polynomial in two variables `C`, `B`: `coeffs[i][j]` multiplies `C^i B^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiPoly {
    coeffs: Vec<Vec<Complex64>>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(c, 0, 0)
    }

    /// `c · C^i · B^j`.
    pub fn monomial(c: Complex64, i: usize, j: usize) -> Self {
        let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); j + 1]; i + 1];
        coeffs[i][j] = c;
        Self { coeffs }
    }

    /// Coefficient of `C^i B^j`.
    pub fn coeff(&self, i: usize, j: usize) -> Complex64 {
        self.coeffs.get(i).and_then(|row| row.get(j)).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Nonzero terms as `(i, j, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.coeffs.iter().enumerate().flat_map(|(i, row)| {
            row.iter().enumerate().filter(|(_, c)| **c != Complex64::new(0.0, 0.0)).map(move |(j, &c)| (i, j, c))
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, j, c) in other.terms() {
            out.add_term(i, j, c);
        }
        out
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let coeffs = self.coeffs.iter().map(|row| row.iter().map(|&c| c * k).collect()).collect();
        Self { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (i, j, a) in self.terms() {
            for (k, l, b) in other.terms() {
                out.add_term(i + k, j + l, a * b);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(Complex64::new(1.0, 0.0));
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    fn add_term(&mut self, i: usize, j: usize, c: Complex64) {
        if self.coeffs.len() <= i {
            self.coeffs.resize(i + 1, Vec::new());
        }
        let row = &mut self.coeffs[i];
        if row.len() <= j {
            row.resize(j + 1, Complex64::new(0.0, 0.0));
        }
        row[j] += c;
    }

    pub fn eval(&self, c: Complex64, b: Complex64) -> Complex64 {
        let rows: Vec<Complex64> = self.coeffs.iter().map(|row| eval(row, b)).collect();
        eval(&rows, c)
    }

    /// Partial derivatives `(∂/∂C, ∂/∂B)` at a point.
    pub fn gradient(&self, c: Complex64, b: Complex64) -> (Complex64, Complex64) {
        let mut dc = Complex64::new(0.0, 0.0);
        let mut db = Complex64::new(0.0, 0.0);
        for (i, j, k) in self.terms() {
            if i > 0 {
                dc += k * i as f64 * c.powi(i as i32 - 1) * b.powi(j as i32);
            }
            if j > 0 {
                db += k * j as f64 * c.powi(i as i32) * b.powi(j as i32 - 1);
            }
        }
        (dc, db)
    }

    /// Sum of `|coefficient|·|C|^i·|B|^j`; the scale against which a value
    /// of the polynomial is judged small.
    pub fn magnitude(&self, c: Complex64, b: Complex64) -> f64 {
        self.terms().map(|(i, j, k)| k.norm() * c.norm().powi(i as i32) * b.norm().powi(j as i32)).sum()
    }

    /// Coefficients (low to high) of the univariate polynomial in `B`
    /// obtained by fixing `C`.
    pub fn in_b_at(&self, c: Complex64) -> Vec<Complex64> {
        let deg = self.degree_b();
        let mut out = vec![Complex64::new(0.0, 0.0); deg + 1];
        let mut cpow = Complex64::new(1.0, 0.0);
        for row in &self.coeffs {
            for (j, &k) in row.iter().enumerate() {
                out[j] += k * cpow;
            }
            cpow *= c;
        }
        out
    }

    pub fn degree_b(&self) -> usize {
        self.terms().map(|(_, j, _)| j).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> usize {
        self.terms().map(|(i, j, _)| i + j).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Eigenvalues of the companion matrix, an independent route to the roots.
    fn companion_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
        let n = coeffs.len() - 1;
        let lead = coeffs[n];
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = c(1.0);
        }
        for i in 0..n {
            m[(i, n - 1)] = -coeffs[i] / lead;
        }
        m.schur().eigenvalues().unwrap().as_slice().to_vec()
    }

    fn match_sets(a: &[Complex64], b: &[Complex64], tol: f64) {
        assert_eq!(a.len(), b.len());
        let mut used = vec![false; b.len()];
        for x in a {
            let (j, d) = b
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, y)| (j, (x - y).norm()))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .unwrap();
            assert!(d < tol, "root {x} unmatched (distance {d})");
            used[j] = true;
        }
    }

    #[test]
    fn hirzebruch_quartic_against_companion() {
        // C^4 + C^3 - 1
        let p = [c(-1.0), c(0.0), c(0.0), c(1.0), c(1.0)];
        let roots = aberth_roots(&p);
        match_sets(&roots, &companion_roots(&p), 1e-12);
        // Real positive root by bisection.
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid.powi(4) + mid.powi(3) - 1.0 > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!(roots.iter().any(|r| (r - c(lo)).norm() < 1e-12));
        assert!((lo - 0.819172513396164).abs() < 1e-12);
    }

    #[test]
    fn roots_of_unity() {
        let mut p = vec![c(0.0); 7];
        p[0] = c(-1.0);
        p[6] = c(1.0);
        let roots = aberth_roots(&p);
        let want: Vec<_> = (0..6).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / 6.0)).collect();
        match_sets(&roots, &want, 1e-13);
    }

    #[test]
    fn widely_separated_magnitudes() {
        // (x - 1e-4)(x + 2e-4)(x - 3)(x - 1000 i)
        let want = [c(1e-4), c(-2e-4), c(3.0), Complex64::new(0.0, 1000.0)];
        let mut p = vec![c(1.0)];
        for r in want {
            p = mul(&p, &[-r, c(1.0)]);
        }
        let roots = aberth_roots(&p);
        for r in want {
            let best = roots.iter().map(|x| (x - r).norm() / r.norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-10, "{r}: {best}");
        }
    }

    #[test]
    fn random_polynomials_against_companion() {
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for deg in 1..=12 {
            let p: Vec<_> = (0..=deg).map(|_| Complex64::new(next(), next())).collect();
            let roots = aberth_roots(&p);
            for r in &roots {
                let (v, _) = eval_with_derivative(&p, *r);
                let scale: f64 = p.iter().rev().fold(0.0, |acc, k| acc * r.norm() + k.norm());
                assert!(v.norm() <= 1e-13 * scale);
            }
            match_sets(&roots, &companion_roots(&p), 1e-8);
        }
    }

    #[test]
    fn zero_roots_and_degenerate_input() {
        let p = [c(0.0), c(0.0), c(-4.0), c(0.0), c(1.0)];
        let roots = aberth_roots(&p);
        assert_eq!(roots.len(), 4);
        assert!(roots.iter().filter(|r| r.norm() < 1e-6).count() == 2);
        assert!(aberth_roots(&[c(3.0)]).is_empty());
        assert!(aberth_roots(&[c(3.0), c(0.0)]).is_empty());
    }

    #[test]
    fn bipoly_arithmetic() {
        // (B - C)^2 = B^2 - 2BC + C^2
        let cvar = BiPoly::monomial(c(1.0), 1, 0);
        let bvar = BiPoly::monomial(c(1.0), 0, 1);
        let d = bvar.sub(&cvar).pow(2);
        assert_eq!(d.coeff(0, 2), c(1.0));
        assert_eq!(d.coeff(1, 1), c(-2.0));
        assert_eq!(d.coeff(2, 0), c(1.0));
        assert_eq!(d.total_degree(), 2);
        assert_eq!(d.degree_b(), 2);
        let (x, y) = (Complex64::new(0.3, -1.2), Complex64::new(2.0, 0.5));
        assert!((d.eval(x, y) - (y - x) * (y - x)).norm() < 1e-14);
        let (dc, db) = d.gradient(x, y);
        assert!((dc + c(2.0) * (y - x)).norm() < 1e-14);
        assert!((db - c(2.0) * (y - x)).norm() < 1e-14);
        let inb = d.in_b_at(x);
        assert!((eval(&inb, y) - d.eval(x, y)).norm() < 1e-14);
    }
}
