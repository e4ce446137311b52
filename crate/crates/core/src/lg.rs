//! The Landau–Ginzburg gradient system of the potential
//! `f = Σ c_zi z_i + Σ c_wj w_j + c_v0 W/Z + c_e0 / Πw`
//! (`W = Π w_j^{a_j}`, `Z = Π z_i`) and its exact two-variable reduction.
//!
//! Coordinates are ordered `z_1..z_s, w_1..w_r`. Every monomial of `f` is
//! `x^v` for a vertex `v` of the polar polytope, so the logarithmic gradient
//! `x_i ∂_i f` is `Σ_m c_m v_{m,i} x^{v_m}`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::bundle::{polytope_vertices, BundleSpec, LabelPoint};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::poly::BiPoly;

/// Default residual tolerance (sup norm, relative to the monomial scale).
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default minimum sup distance between distinct critical points.
pub const DEFAULT_SEPARATION: f64 = 1e-6;

/// Coefficients of the `s + r + 2` monomials of an element of `L(Δ°)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoeffVector {
    /// Coefficients of `z_1..z_s`.
    pub z: Vec<Complex64>,
    /// Coefficients of `w_1..w_r`.
    pub w: Vec<Complex64>,
    /// Coefficient of `W/Z`.
    pub v0: Complex64,
    /// Coefficient of `1/Πw`.
    pub e0: Complex64,
}

impl CoeffVector {
    pub fn new(spec: &BundleSpec, z: Vec<Complex64>, w: Vec<Complex64>, v0: Complex64, e0: Complex64) -> Result<Self> {
        let c = Self { z, w, v0, e0 };
        c.validate(spec)?;
        Ok(c)
    }

    /// The potential itself: every coefficient 1.
    pub fn unit(spec: &BundleSpec) -> Self {
        Self::family(spec, Complex64::new(0.0, 0.0))
    }

    /// `f_u`: coefficient `e^u` on `W/Z`, 1 elsewhere.
    pub fn family(spec: &BundleSpec, u: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self { z: vec![one; spec.s()], w: vec![one; spec.r()], v0: u.exp(), e0: one }
    }

    pub fn validate(&self, spec: &BundleSpec) -> Result<()> {
        if self.z.len() != spec.s() {
            return Err(Error::SizeMismatch { expected: spec.s(), found: self.z.len() });
        }
        if self.w.len() != spec.r() {
            return Err(Error::SizeMismatch { expected: spec.r(), found: self.w.len() });
        }
        match self.monomial_coeffs().iter().position(|c| c.norm() == 0.0 || !c.norm().is_finite()) {
            Some(index) => Err(Error::ZeroCoefficient { index }),
            None => Ok(()),
        }
    }

    /// Coefficients in monomial order `z.., w.., W/Z, 1/Πw`.
    pub fn monomial_coeffs(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.z.len() + self.w.len() + 2);
        out.extend_from_slice(&self.z);
        out.extend_from_slice(&self.w);
        out.push(self.v0);
        out.push(self.e0);
        out
    }

    pub fn from_monomial_coeffs(spec: &BundleSpec, coeffs: &[Complex64]) -> Result<Self> {
        if coeffs.len() != spec.n_monomials() {
            return Err(Error::SizeMismatch { expected: spec.n_monomials(), found: coeffs.len() });
        }
        let (s, r) = (spec.s(), spec.r());
        Self::new(spec, coeffs[..s].to_vec(), coeffs[s..s + r].to_vec(), coeffs[s + r], coeffs[s + r + 1])
    }

    /// The two parameters `(α, β)` the reduced system depends on:
    /// `α = c_v0 Π c_zi / Π c_wj^{a_j}`, `β = c_e0 Π c_wj`.
    pub fn reduced_params(&self, spec: &BundleSpec) -> (Complex64, Complex64) {
        let mut alpha = self.v0;
        for c in &self.z {
            alpha *= c;
        }
        let mut beta = self.e0;
        for (j, c) in self.w.iter().enumerate() {
            alpha /= c.powi(spec.twist(j + 1) as i32);
            beta *= c;
        }
        (alpha, beta)
    }
}

/// One solution of the gradient system.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CritPoint {
    pub z: Vec<Complex64>,
    pub w: Vec<Complex64>,
    /// Sup norm of the gradient system at the point.
    pub residual: f64,
    pub label: Option<LabelPoint>,
}

impl CritPoint {
    pub fn from_coords(spec: &BundleSpec, coords: &[Complex64], residual: f64) -> Self {
        Self { z: coords[..spec.s()].to_vec(), w: coords[spec.s()..].to_vec(), residual, label: None }
    }

    /// `z_1..z_s, w_1..w_r` as one vector.
    pub fn coords(&self) -> Vec<Complex64> {
        let mut out = self.z.clone();
        out.extend_from_slice(&self.w);
        out
    }
}

/// All solutions of the gradient system at one coefficient vector.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CritSet {
    pub coeffs: CoeffVector,
    pub points: Vec<CritPoint>,
    pub tol: f64,
}

impl CritSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_labelled(&self) -> bool {
        self.points.iter().all(|p| p.label.is_some())
    }

    /// Index of the point carrying `label`.
    pub fn position_of(&self, label: LabelPoint) -> Option<usize> {
        self.points.iter().position(|p| p.label == Some(label))
    }

    pub fn max_residual(&self) -> f64 {
        self.points.iter().map(|p| p.residual).fold(0.0, f64::max)
    }

    /// Smallest pairwise sup distance between points.
    pub fn min_separation(&self) -> f64 {
        let coords: Vec<_> = self.points.iter().map(CritPoint::coords).collect();
        let mut best = f64::INFINITY;
        for i in 0..coords.len() {
            for j in i + 1..coords.len() {
                best = best.min(linalg::sup_distance(&coords[i], &coords[j]));
            }
        }
        best
    }
}

/// Outcome of a Newton refinement.
#[derive(Debug, Clone)]
pub struct NewtonResult {
    pub x: Vec<Complex64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Evaluator for the gradient system of one bundle.
#[derive(Debug, Clone)]
pub struct LgSystem {
    dim: usize,
    exps: Vec<Vec<i64>>,
}

impl LgSystem {
    pub fn new(spec: &BundleSpec) -> Self {
        Self { dim: spec.dim(), exps: polytope_vertices(spec).into_iter().map(|v| v.0).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The exponent vectors in monomial order.
    pub fn exponents(&self) -> &[Vec<i64>] {
        &self.exps
    }

    fn check(&self, coeffs: &[Complex64], x: &[Complex64]) -> Result<()> {
        if coeffs.len() != self.exps.len() {
            return Err(Error::SizeMismatch { expected: self.exps.len(), found: coeffs.len() });
        }
        if x.len() != self.dim {
            return Err(Error::SizeMismatch { expected: self.dim, found: x.len() });
        }
        match x.iter().position(|v| v.norm() == 0.0) {
            Some(index) => Err(Error::ZeroCoordinate { index }),
            None => Ok(()),
        }
    }

    /// `x^v` for every vertex `v`, without coefficients.
    pub fn monomials(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.exps
            .iter()
            .map(|e| {
                e.iter()
                    .zip(x)
                    .filter(|(k, _)| **k != 0)
                    .fold(Complex64::new(1.0, 0.0), |acc, (&k, xi)| acc * xi.powi(k as i32))
            })
            .collect()
    }

    /// Terms `c_m x^{v_m}`.
    pub fn terms(&self, coeffs: &[Complex64], x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check(coeffs, x)?;
        Ok(self.monomials(x).into_iter().zip(coeffs).map(|(m, c)| m * c).collect())
    }

    /// `x_i ∂_i f` for `i = 1..s+r`.
    pub fn residual(&self, coeffs: &[Complex64], x: &[Complex64]) -> Result<Vec<Complex64>> {
        let terms = self.terms(coeffs, x)?;
        Ok(self.combine(&terms))
    }

    fn combine(&self, weights: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (e, t) in self.exps.iter().zip(weights) {
            for (o, &k) in out.iter_mut().zip(e) {
                if k != 0 {
                    *o += t * k as f64;
                }
            }
        }
        out
    }

    /// `d/dτ` of the residual along a coefficient path with `c_m' = rates_m·c_m`.
    pub fn residual_rate(&self, coeffs: &[Complex64], rates: &[Complex64], x: &[Complex64]) -> Result<Vec<Complex64>> {
        let terms = self.terms(coeffs, x)?;
        let weighted: Vec<_> = terms.iter().zip(rates).map(|(t, r)| t * r).collect();
        Ok(self.combine(&weighted))
    }

    /// `∂(x_i ∂_i f)/∂x_k = Σ_m v_{m,i} v_{m,k} c_m x^{v_m} / x_k`.
    pub fn jacobian(&self, coeffs: &[Complex64], x: &[Complex64]) -> Result<CMatrix> {
        let terms = self.terms(coeffs, x)?;
        let mut jac = CMatrix::zeros(self.dim, self.dim);
        for (e, t) in self.exps.iter().zip(&terms) {
            for (i, &ei) in e.iter().enumerate() {
                if ei == 0 {
                    continue;
                }
                for (k, &ek) in e.iter().enumerate() {
                    if ek != 0 {
                        jac[(i, k)] += t * (ei * ek) as f64 / x[k];
                    }
                }
            }
        }
        Ok(jac)
    }

    /// Residual sup norm divided by `max(1, largest term)`.
    pub fn scaled_residual(&self, coeffs: &[Complex64], x: &[Complex64]) -> Result<(f64, f64)> {
        let terms = self.terms(coeffs, x)?;
        let raw = linalg::sup_norm(&self.combine(&terms));
        let scale = terms.iter().map(|t| t.norm()).fold(1.0, f64::max);
        Ok((raw, raw / scale))
    }

    /// Newton's method from `x`; converged when the scaled residual is below
    /// `tol`. Fails with [`Error::NewtonDivergence`] after `max_iter` steps.
    pub fn newton(&self, coeffs: &[Complex64], x: &[Complex64], tol: f64, max_iter: usize) -> Result<NewtonResult> {
        let mut x = x.to_vec();
        let mut last_raw = f64::INFINITY;
        for it in 0..=max_iter {
            let (raw, scaled) = self.scaled_residual(coeffs, &x)?;
            last_raw = raw;
            // Converged, then one more step to squeeze out rounding.
            if scaled <= tol {
                if let Some(next) = self.newton_step(coeffs, &x)? {
                    let (raw2, _) = self.scaled_residual(coeffs, &next)?;
                    if raw2 < raw {
                        return Ok(NewtonResult { x: next, residual: raw2, iterations: it + 1 });
                    }
                }
                return Ok(NewtonResult { x, residual: raw, iterations: it });
            }
            if it == max_iter {
                break;
            }
            match self.newton_step(coeffs, &x)? {
                Some(next) => x = next,
                None => break,
            }
        }
        Err(Error::NewtonDivergence { index: 0, residual: last_raw })
    }

    fn newton_step(&self, coeffs: &[Complex64], x: &[Complex64]) -> Result<Option<Vec<Complex64>>> {
        let f = self.residual(coeffs, x)?;
        let jac = self.jacobian(coeffs, x)?;
        let rhs: Vec<_> = f.iter().map(|v| -v).collect();
        Ok(linalg::solve(jac, &rhs).map(|dx| x.iter().zip(&dx).map(|(a, d)| a + d).collect()))
    }
}

/// `x_i ∂_i f` at `p` (coordinates `z.., w..`).
pub fn grad_system(spec: &BundleSpec, c: &CoeffVector, p: &[Complex64]) -> Result<Vec<Complex64>> {
    LgSystem::new(spec).residual(&c.monomial_coeffs(), p)
}

/// Analytic Jacobian of [`grad_system`] with respect to the coordinates.
pub fn jacobian(spec: &BundleSpec, c: &CoeffVector, p: &[Complex64]) -> Result<CMatrix> {
    LgSystem::new(spec).jacobian(&c.monomial_coeffs(), p)
}

/// `(C, B) = (c_v0 W/Z, c_e0/Πw)` at a point.
pub fn reduced_coordinates(spec: &BundleSpec, c: &CoeffVector, p: &[Complex64]) -> (Complex64, Complex64) {
    let (s, r) = (spec.s(), spec.r());
    let mut cc = c.v0;
    for z in &p[..s] {
        cc /= z;
    }
    let mut b = c.e0;
    for (j, w) in p[s..s + r].iter().enumerate() {
        cc *= w.powi(spec.twist(j + 1) as i32);
        b /= w;
    }
    (cc, b)
}

/// The reduced system in `(C, B)`:
/// `P1 = C^{s+1} − α Π (B − a_j C)^{a_j}`, `P2 = B Π (B − a_j C) − β`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSystem {
    pub p1: BiPoly,
    pub p2: BiPoly,
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl ReducedSystem {
    pub fn eval(&self, c: Complex64, b: Complex64) -> [Complex64; 2] {
        [self.p1.eval(c, b), self.p2.eval(c, b)]
    }

    /// Values divided by the magnitude of their terms.
    pub fn relative_residual(&self, c: Complex64, b: Complex64) -> f64 {
        let r1 = self.p1.eval(c, b).norm() / self.p1.magnitude(c, b).max(f64::MIN_POSITIVE);
        let r2 = self.p2.eval(c, b).norm() / self.p2.magnitude(c, b).max(f64::MIN_POSITIVE);
        r1.max(r2)
    }

    /// Newton on the 2×2 system; returns the refined pair and its relative residual.
    pub fn newton(&self, c: Complex64, b: Complex64, max_iter: usize) -> Option<(Complex64, Complex64, f64)> {
        let (mut c, mut b) = (c, b);
        let mut res = self.relative_residual(c, b);
        for _ in 0..max_iter {
            if res < 1e-15 {
                break;
            }
            let [f1, f2] = self.eval(c, b);
            let (a11, a12) = self.p1.gradient(c, b);
            let (a21, a22) = self.p2.gradient(c, b);
            let det = a11 * a22 - a12 * a21;
            if det.norm() == 0.0 {
                return None;
            }
            let dc = (f1 * a22 - f2 * a12) / det;
            let db = (a11 * f2 - a21 * f1) / det;
            let (nc, nb) = (c - dc, b - db);
            if !(nc.re.is_finite() && nc.im.is_finite() && nb.re.is_finite() && nb.im.is_finite()) {
                return None;
            }
            let next = self.relative_residual(nc, nb);
            if next >= res && res < 1e-12 {
                break;
            }
            c = nc;
            b = nb;
            res = next;
        }
        Some((c, b, res))
    }
}

pub fn reduced_system(spec: &BundleSpec, c: &CoeffVector) -> ReducedSystem {
    let (alpha, beta) = c.reduced_params(spec);
    let one = Complex64::new(1.0, 0.0);
    let cvar = BiPoly::monomial(one, 1, 0);
    let bvar = BiPoly::monomial(one, 0, 1);
    let mut twisted = BiPoly::constant(one);
    let mut fibre = bvar.clone();
    for &a in spec.twists() {
        let factor = bvar.sub(&cvar.scale(Complex64::new(a as f64, 0.0)));
        twisted = twisted.mul(&factor.pow(a as u32));
        fibre = fibre.mul(&factor);
    }
    let p1 = BiPoly::monomial(one, spec.s() + 1, 0).sub(&twisted.scale(alpha));
    let p2 = fibre.sub(&BiPoly::constant(beta));
    ReducedSystem { p1, p2, alpha, beta }
}

/// `z_i = C/c_zi`, `w_j = (B − a_j C)/c_wj`, with the residual of the full system.
pub fn lift(spec: &BundleSpec, c: &CoeffVector, cc: Complex64, b: Complex64) -> Result<CritPoint> {
    let (s, r) = (spec.s(), spec.r());
    let mut coords = Vec::with_capacity(s + r);
    for cz in &c.z {
        coords.push(cc / cz);
    }
    for (j, cw) in c.w.iter().enumerate() {
        coords.push((b - cc * spec.twist(j + 1) as f64) / cw);
    }
    if let Some(index) = coords.iter().position(|v| v.norm() == 0.0 || !v.norm().is_finite()) {
        return Err(Error::DegenerateLift { index });
    }
    if s == 0 || cc.norm() == 0.0 {
        return Err(Error::DegenerateLift { index: 0 });
    }
    let residual = linalg::sup_norm(&grad_system(spec, c, &coords)?);
    Ok(CritPoint::from_coords(spec, &coords, residual))
}
