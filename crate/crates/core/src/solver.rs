//! All critical points at a fixed coefficient vector.
//!
//! `B` is eliminated from the reduced system by a Sylvester resultant sampled
//! on a circle and interpolated by an inverse DFT; the resulting univariate
//! polynomial in `C` is solved by Aberth iteration. Each `C` root is paired
//! with the roots of `P2(C, ·)` that nearly satisfy `P1`, polished on the
//! reduced system, lifted and refined with Newton on the full system.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::TAU;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bundle::BundleSpec;
use crate::error::{Error, Result};
use crate::lg::{self, CoeffVector, CritPoint, CritSet, LgSystem, ReducedSystem, DEFAULT_SEPARATION, DEFAULT_TOL};
use crate::linalg::{self, CMatrix};
use crate::poly;

/// Radius of the circle on which the resultant is sampled, in units of
/// [`root_scale`].
pub const SAMPLE_RADIUS: f64 = 1.37;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub sample_radius: f64,
    /// Rotation of the sample nodes, in units of the node spacing.
    pub sample_phase: f64,
    pub tol: f64,
    pub separation: f64,
    pub newton_iters: usize,
    /// A `B` root is a candidate when `|P1|` relative to its terms is below this.
    pub candidate_residual: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            sample_radius: SAMPLE_RADIUS,
            sample_phase: 0.0,
            tol: DEFAULT_TOL,
            separation: DEFAULT_SEPARATION,
            newton_iters: 20,
            candidate_residual: 1e-3,
        }
    }
}

/// Sylvester determinant of two univariate polynomials (coefficients low to high).
fn resultant(p: &[Complex64], q: &[Complex64]) -> Complex64 {
    let (m, n) = (p.len() - 1, q.len() - 1);
    let size = m + n;
    if size == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut syl = CMatrix::zeros(size, size);
    for row in 0..n {
        for (k, c) in p.iter().rev().enumerate() {
            syl[(row, row + k)] = *c;
        }
    }
    for row in 0..m {
        for (k, c) in q.iter().rev().enumerate() {
            syl[(n + row, row + k)] = *c;
        }
    }
    linalg::determinant(syl)
}

/// Typical `|C|` of a solution: `B^{r+1} ≈ β` and `C^{s+1} ≈ α B^{Σa}`.
/// Sampling at a fixed radius loses the low coefficients (and with them the
/// roots) once `α` is far from 1, e.g. `u = −12` on `s = 3`.
pub fn root_scale(spec: &BundleSpec, rs: &ReducedSystem) -> f64 {
    let (s1, r1) = ((spec.s() + 1) as f64, (spec.r() + 1) as f64);
    let scale = rs.alpha.norm().powf(1.0 / s1) * rs.beta.norm().powf(spec.twist_sum() as f64 / (s1 * r1));
    if scale.is_finite() && scale > 0.0 {
        scale
    } else {
        1.0
    }
}

/// Coefficients (low to high, degree ≤ N) of `Res_B(P1, P2)` as a polynomial in `C`.
pub fn resultant_in_c(spec: &BundleSpec, rs: &ReducedSystem, opts: &SolverOptions) -> Vec<Complex64> {
    let m = spec.n_points() + 1;
    let (d1, d2) = (rs.p1.degree_b(), rs.p2.degree_b());
    let radius = opts.sample_radius * root_scale(spec, rs);
    let sigma = Complex64::from_polar(radius, TAU * opts.sample_phase / m as f64);
    let values: Vec<Complex64> = (0..m)
        .map(|j| {
            let node = sigma * Complex64::from_polar(1.0, TAU * j as f64 / m as f64);
            let mut p = rs.p1.in_b_at(node);
            let mut q = rs.p2.in_b_at(node);
            p.resize(d1 + 1, Complex64::new(0.0, 0.0));
            q.resize(d2 + 1, Complex64::new(0.0, 0.0));
            resultant(&p, &q)
        })
        .collect();
    let mut coeffs: Vec<Complex64> = (0..m)
        .map(|k| {
            let sum = values.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (j, v)| {
                acc + v * Complex64::from_polar(1.0, -TAU * ((j * k) % m) as f64 / m as f64)
            });
            sum / m as f64 / sigma.powi(k as i32)
        })
        .collect();
    // Interpolation noise in the top coefficient (degree N+1 slot is absent,
    // but degree-deficient resultants leave a rounding-level leading term).
    // Sizes are compared on the sampling circle, where the values were exact
    // to rounding, not as raw coefficients.
    let on_circle = |k: usize, c: &Complex64| c.norm() * radius.powi(k as i32);
    let scale = coeffs.iter().enumerate().map(|(k, c)| on_circle(k, c)).fold(0.0, f64::max);
    while coeffs.len() > 1 && on_circle(coeffs.len() - 1, coeffs.last().unwrap()) <= 1e-13 * scale {
        coeffs.pop();
    }
    coeffs
}

/// Roots `(C, B)` of the reduced system with `C ≠ 0` and `B ≠ a_j C`,
/// polished, deduplicated and canonically ordered.
pub fn solve_reduced(spec: &BundleSpec, c: &CoeffVector) -> Result<Vec<(Complex64, Complex64)>> {
    solve_reduced_with(spec, c, &SolverOptions::default())
}

pub fn solve_reduced_with(
    spec: &BundleSpec,
    c: &CoeffVector,
    opts: &SolverOptions,
) -> Result<Vec<(Complex64, Complex64)>> {
    c.validate(spec)?;
    let rs = lg::reduced_system(spec, c);
    let expected = spec.n_points();
    // Roots spread over several magnitudes (large |u|) are only resolved near
    // the circle they were sampled on, so further circles are tried, spreading
    // out from the typical scale, until all N roots are accounted for.
    let mut pairs: Vec<(Complex64, Complex64, f64)> = Vec::new();
    for &shift in &RADIUS_LADDER {
        let ring = SolverOptions { sample_radius: opts.sample_radius * shift.exp(), ..opts.clone() };
        collect_candidates(spec, &rs, &ring, &mut pairs);
        if dedup_pairs(&pairs, opts.separation).len() >= expected {
            break;
        }
    }
    let mut out: Vec<_> = dedup_pairs(&pairs, opts.separation).into_iter().map(|(a, b, _)| (a, b)).collect();
    out.sort_by(|x, y| canonical_order(x.0, x.1, y.0, y.1));
    Ok(out)
}

/// Log-radius offsets of the sampling circles, tried in order.
const RADIUS_LADDER: [f64; 13] = [0.0, -2.0, 2.0, -4.0, 4.0, -6.0, 6.0, -8.0, 8.0, -10.0, 10.0, -12.0, 12.0];

fn collect_candidates(
    spec: &BundleSpec,
    rs: &ReducedSystem,
    opts: &SolverOptions,
    pairs: &mut Vec<(Complex64, Complex64, f64)>,
) {
    let c_roots = poly::aberth_roots(&resultant_in_c(spec, rs, opts));
    for &croot in &c_roots {
        let b_roots = poly::aberth_roots(&rs.p2.in_b_at(croot));
        let scored: Vec<(Complex64, f64)> = b_roots
            .into_iter()
            .map(|b| (b, rs.p1.eval(croot, b).norm() / rs.p1.magnitude(croot, b).max(f64::MIN_POSITIVE)))
            .collect();
        // Clustered C roots (repeated resultant roots) pair with several B
        // roots each, so every plausible B is kept, not only the best.
        let best = scored.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
        for (b, res) in scored {
            if res < opts.candidate_residual || res == best {
                if let Some((pc, pb, pres)) = rs.newton(croot, b, 50) {
                    if pres < 1e-9 && admissible(spec, pc, pb) {
                        pairs.push((pc, pb, pres));
                    }
                }
            }
        }
    }
}

/// Keeps the best-residual representative of each cluster, in first-seen order.
fn dedup_pairs(pairs: &[(Complex64, Complex64, f64)], separation: f64) -> Vec<(Complex64, Complex64, f64)> {
    let mut out: Vec<(Complex64, Complex64, f64)> = Vec::new();
    for &(pc, pb, res) in pairs {
        // Each coordinate on its own scale: far out `C` can be huge while the
        // paired `B` values are tiny and distinct.
        let close = out.iter().position(|&(qc, qb, _)| {
            (qc - pc).norm() < separation * qc.norm().max(1.0) && (qb - pb).norm() < separation * qb.norm().max(1.0)
        });
        match close {
            Some(i) if out[i].2 > res => out[i] = (pc, pb, res),
            Some(_) => {}
            None => out.push((pc, pb, res)),
        }
    }
    out
}

fn admissible(spec: &BundleSpec, c: Complex64, b: Complex64) -> bool {
    let scale = c.norm().max(b.norm());
    c.norm() > 1e-12 * scale.max(1e-300)
        && spec.twists().iter().all(|&a| (b - c * a as f64).norm() > 1e-12 * scale)
        && b.norm() > 0.0
}

fn quantize(x: f64) -> i64 {
    (x * 1e9).round() as i64
}

/// Lexicographic `(Re C, Im C, Re B, Im B)` after rounding to 1e-9.
fn canonical_order(c1: Complex64, b1: Complex64, c2: Complex64, b2: Complex64) -> Ordering {
    let key = |c: Complex64, b: Complex64| [quantize(c.re), quantize(c.im), quantize(b.re), quantize(b.im)];
    key(c1, b1).cmp(&key(c2, b2))
}

/// The full critical set: exactly `N` points or [`Error::NonGenericParameter`].
pub fn solve_crit(spec: &BundleSpec, c: &CoeffVector) -> Result<CritSet> {
    solve_crit_with(spec, c, &SolverOptions::default())
}

pub fn solve_crit_with(spec: &BundleSpec, c: &CoeffVector, opts: &SolverOptions) -> Result<CritSet> {
    let expected = spec.n_points();
    let sys = LgSystem::new(spec);
    let coeffs = c.monomial_coeffs();

    let mut points: Vec<(CritPoint, Complex64, Complex64)> = Vec::new();
    for (cc, b) in solve_reduced_with(spec, c, opts)? {
        let Ok(lifted) = lg::lift(spec, c, cc, b) else { continue };
        let Ok(refined) = sys.newton(&coeffs, &lifted.coords(), opts.tol, opts.newton_iters) else {
            continue;
        };
        if !nonsingular(&sys, &coeffs, &refined.x)? {
            return Err(Error::NonGenericParameter { found: points.len(), expected });
        }
        let (rc, rb) = lg::reduced_coordinates(spec, c, &refined.x);
        let point = CritPoint::from_coords(spec, &refined.x, refined.residual);
        if points.iter().all(|(p, _, _)| linalg::sup_distance(&p.coords(), &refined.x) >= opts.separation) {
            points.push((point, rc, rb));
        }
    }
    if points.len() != expected {
        return Err(Error::NonGenericParameter { found: points.len(), expected });
    }
    points.sort_by(|x, y| canonical_order(x.1, x.2, y.1, y.2));
    Ok(CritSet { coeffs: c.clone(), points: points.into_iter().map(|p| p.0).collect(), tol: opts.tol })
}

/// `|det J|` against the product of row norms (Hadamard bound), taken in
/// logarithmic coordinates with unit columns so that coordinates of very
/// different sizes do not read as near-singularity.
fn nonsingular(sys: &LgSystem, coeffs: &[Complex64], x: &[Complex64]) -> Result<bool> {
    let mut jac = sys.jacobian(coeffs, x)?;
    for (k, xk) in x.iter().enumerate() {
        let mut col = jac.column_mut(k);
        col *= *xk;
        let norm = col.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            col /= Complex64::new(norm, 0.0);
        }
    }
    let bound: f64 = (0..jac.nrows()).map(|i| jac.row(i).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()).product();
    Ok(linalg::determinant(jac).norm() > 1e-12 * bound)
}

/// Re-derives the reduced coordinates of every point, in point order.
pub fn reduced_points(spec: &BundleSpec, cs: &CritSet) -> Vec<(Complex64, Complex64)> {
    cs.points.iter().map(|p| lg::reduced_coordinates(spec, &cs.coeffs, &p.coords())).collect()
}
