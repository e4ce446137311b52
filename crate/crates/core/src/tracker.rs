//! Predictor–corrector continuation of critical sets along coefficient paths.
//!
//! Every path used here has the form `c_m(τ) = base_m · exp(rate_m · τ)`,
//! `τ ∈ [0, 1]`: the real segment in `u` changes only the `W/Z` coefficient,
//! and the loop of a divisor turns each coefficient by its multiplicity.
//! All points advance with one shared step so that collisions are seen.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;

use crate::bundle::{BundleSpec, Generator, ToricDivisor};
use crate::error::{Error, Result};
use crate::labeling;
use crate::lg::{CoeffVector, CritPoint, CritSet, LgSystem, DEFAULT_SEPARATION, DEFAULT_TOL};
use crate::linalg;
use crate::solver::{self, SolverOptions};

#[derive(Debug, Clone, PartialEq)]
pub enum PathSpec {
    /// `c_v0 = e^{u}`, `u` linear from `u0` to `u1`, other coefficients 1.
    Segment { u0: Complex64, u1: Complex64 },
    /// The loop of `divisor` based at `c_v0 = e^t`: every monomial turns
    /// `n_i` (resp. `m_j`) times around the origin.
    Loop { divisor: ToricDivisor, t: f64 },
    /// `base · exp(rates · τ)` in monomial order.
    Exponential { base: Vec<Complex64>, rates: Vec<Complex64> },
}

impl PathSpec {
    pub fn eta(u0: f64, u1: f64) -> Self {
        Self::Segment { u0: Complex64::new(u0, 0.0), u1: Complex64::new(u1, 0.0) }
    }

    pub fn loop_for(divisor: ToricDivisor, t: f64) -> Self {
        Self::Loop { divisor, t }
    }

    /// `(base, rates)` in monomial order.
    pub fn exponential(&self, spec: &BundleSpec) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let n = spec.n_monomials();
        match self {
            Self::Segment { u0, u1 } => {
                let base = CoeffVector::family(spec, *u0).monomial_coeffs();
                let mut rates = vec![Complex64::new(0.0, 0.0); n];
                rates[spec.monomial_index(Generator::V(0))] = u1 - u0;
                Ok((base, rates))
            }
            Self::Loop { divisor, t } => {
                divisor.check_size(spec)?;
                let base = CoeffVector::family(spec, Complex64::new(*t, 0.0)).monomial_coeffs();
                let mut rates = vec![Complex64::new(0.0, 0.0); n];
                for g in spec.generators() {
                    rates[spec.monomial_index(g)] = Complex64::new(0.0, TAU * divisor.coefficient(g) as f64);
                }
                Ok((base, rates))
            }
            Self::Exponential { base, rates } => {
                for v in [base, rates] {
                    if v.len() != n {
                        return Err(Error::SizeMismatch { expected: n, found: v.len() });
                    }
                }
                if let Some(index) = base.iter().position(|c| c.norm() == 0.0) {
                    return Err(Error::ZeroCoefficient { index });
                }
                Ok((base.clone(), rates.clone()))
            }
        }
    }

    pub fn coeffs_at(&self, spec: &BundleSpec, tau: f64) -> Result<CoeffVector> {
        let (base, rates) = self.exponential(spec)?;
        CoeffVector::from_monomial_coeffs(spec, &at(&base, &rates, tau))
    }

    /// The same curve traversed backwards.
    pub fn reversed(&self, spec: &BundleSpec) -> Result<Self> {
        Ok(match self {
            Self::Segment { u0, u1 } => Self::Segment { u0: *u1, u1: *u0 },
            _ => {
                let (base, rates) = self.exponential(spec)?;
                Self::Exponential { base: at(&base, &rates, 1.0), rates: rates.iter().map(|r| -r).collect() }
            }
        })
    }
}

fn at(base: &[Complex64], rates: &[Complex64], tau: f64) -> Vec<Complex64> {
    base.iter().zip(rates).map(|(b, r)| b * (r * tau).exp()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackerOptions {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub growth: f64,
    /// Consecutive accepted steps before the step grows.
    pub growth_after: usize,
    pub corrector_tol: f64,
    pub corrector_iters: usize,
    /// Tracked points closer than this (sup distance) count as a collision.
    pub separation: f64,
    /// Second-nearest over nearest distance required to match an endpoint.
    pub match_ratio: f64,
    /// Residual tolerance of the end sets.
    pub tol: f64,
}

impl Default for TrackerOptions {
    fn default() -> Self {
        Self {
            initial_step: 1e-2,
            min_step: 1e-9,
            max_step: 0.05,
            growth: 1.5,
            growth_after: 5,
            corrector_tol: 1e-12,
            corrector_iters: 8,
            separation: DEFAULT_SEPARATION,
            match_ratio: 3.0,
            tol: DEFAULT_TOL,
        }
    }
}

struct Tracer<'a> {
    sys: LgSystem,
    base: Vec<Complex64>,
    rates: Vec<Complex64>,
    opts: &'a TrackerOptions,
}

impl Tracer<'_> {
    /// `dx/dτ = −J⁻¹ ∂F/∂τ`.
    fn velocity(&self, tau: f64, x: &[Complex64]) -> Option<Vec<Complex64>> {
        let coeffs = at(&self.base, &self.rates, tau);
        let jac = self.sys.jacobian(&coeffs, x).ok()?;
        let rhs: Vec<Complex64> = self.sys.residual_rate(&coeffs, &self.rates, x).ok()?.iter().map(|v| -v).collect();
        linalg::solve(jac, &rhs)
    }

    fn rk4(&self, tau: f64, h: f64, x: &[Complex64]) -> Option<Vec<Complex64>> {
        let shift = |k: &[Complex64], f: f64| -> Vec<Complex64> { x.iter().zip(k).map(|(a, b)| a + b * f).collect() };
        let k1 = self.velocity(tau, x)?;
        let k2 = self.velocity(tau + h / 2.0, &shift(&k1, h / 2.0))?;
        let k3 = self.velocity(tau + h / 2.0, &shift(&k2, h / 2.0))?;
        let k4 = self.velocity(tau + h, &shift(&k3, h))?;
        Some((0..x.len()).map(|i| x[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0)).collect())
    }

    /// Newton at fixed `τ`; the accumulated correction is returned with the
    /// point so that the caller can reject jumps between paths.
    fn correct(&self, tau: f64, x: Vec<Complex64>) -> Option<(Vec<Complex64>, f64)> {
        let coeffs = at(&self.base, &self.rates, tau);
        let start = x.clone();
        let mut x = x;
        let mut last_step = f64::INFINITY;
        for _ in 0..=self.opts.corrector_iters {
            let (_, scaled) = self.sys.scaled_residual(&coeffs, &x).ok()?;
            if scaled <= self.opts.corrector_tol {
                return Some((x.clone(), linalg::sup_distance(&x, &start)));
            }
            let f = self.sys.residual(&coeffs, &x).ok()?;
            let jac = self.sys.jacobian(&coeffs, &x).ok()?;
            let dx = linalg::solve(jac, &f.iter().map(|v| -v).collect::<Vec<_>>())?;
            let size = linalg::sup_norm(&dx);
            if size > 0.5 * last_step && last_step < f64::INFINITY && size > 1e-14 * linalg::sup_norm(&x) {
                return None;
            }
            for (a, d) in x.iter_mut().zip(&dx) {
                *a += d;
            }
            if size <= 1e-15 * linalg::sup_norm(&x) {
                return Some((x.clone(), linalg::sup_distance(&x, &start)));
            }
            last_step = size;
        }
        None
    }
}

fn nearest_other(points: &[Vec<Complex64>], i: usize) -> (usize, f64) {
    points
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(j, q)| (j, linalg::sup_distance(&points[i], q)))
        .fold((i, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

fn first_collision(points: &[Vec<Complex64>], separation: f64) -> Option<(usize, usize)> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if linalg::sup_distance(&points[i], &points[j]) < separation {
                return Some((i, j));
            }
        }
    }
    None
}

/// Continues every point from `τ = 0` to `τ = 1`; output `i` continues input `i`.
pub fn track_points(
    spec: &BundleSpec,
    path: &PathSpec,
    start: &[Vec<Complex64>],
    opts: &TrackerOptions,
) -> Result<Vec<Vec<Complex64>>> {
    let (base, rates) = path.exponential(spec)?;
    let tracer = Tracer { sys: LgSystem::new(spec), base, rates, opts };
    let mut xs: Vec<Vec<Complex64>> = start.to_vec();
    for x in &xs {
        if x.len() != spec.dim() {
            return Err(Error::SizeMismatch { expected: spec.dim(), found: x.len() });
        }
    }
    if let Some((first, second)) = first_collision(&xs, opts.separation) {
        return Err(Error::PathCollision { tau: 0.0, first, second });
    }
    if tracer.rates.iter().all(|r| r.norm() == 0.0) {
        return Ok(xs);
    }

    let mut tau = 0.0;
    let mut h = opts.initial_step.min(opts.max_step);
    let mut streak = 0;
    while tau < 1.0 {
        let step = h.min(1.0 - tau);
        let target = if step == 1.0 - tau { 1.0 } else { tau + step };
        let mut next = Vec::with_capacity(xs.len());
        let mut failed = None;
        for (i, x) in xs.iter().enumerate() {
            let guard = 0.25 * nearest_other(&xs, i).1;
            let moved = tracer
                .rk4(tau, target - tau, x)
                .and_then(|pred| tracer.correct(target, pred))
                .filter(|(_, jump)| *jump < guard);
            match moved {
                Some((y, _)) => next.push(y),
                None => {
                    failed = Some(i);
                    break;
                }
            }
        }
        match failed {
            None => {
                if let Some((first, second)) = first_collision(&next, opts.separation) {
                    return Err(Error::PathCollision { tau: target, first, second });
                }
                xs = next;
                tau = target;
                streak += 1;
                if streak >= opts.growth_after {
                    h = (h * opts.growth).min(opts.max_step);
                    streak = 0;
                }
            }
            Some(i) => {
                h /= 2.0;
                streak = 0;
                if h < opts.min_step {
                    return Err(Error::PathCollision { tau, first: i, second: nearest_other(&xs, i).0 });
                }
            }
        }
    }
    Ok(xs)
}

/// The set at `τ = 1`, point `i` continuing `start.points[i]` (labels carried).
pub fn track_segment(spec: &BundleSpec, path: &PathSpec, start: &CritSet, opts: &TrackerOptions) -> Result<CritSet> {
    let expected = path.coeffs_at(spec, 0.0)?;
    check_base(&expected, &start.coeffs)?;
    let coords: Vec<_> = start.points.iter().map(CritPoint::coords).collect();
    let ends = track_points(spec, path, &coords, opts)?;
    let coeffs = path.coeffs_at(spec, 1.0)?;
    let sys = LgSystem::new(spec);
    let mc = coeffs.monomial_coeffs();
    let points = ends
        .iter()
        .zip(&start.points)
        .map(|(x, p)| {
            let residual = linalg::sup_norm(&sys.residual(&mc, x)?);
            Ok(CritPoint { label: p.label, ..CritPoint::from_coords(spec, x, residual) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CritSet { coeffs, points, tol: start.tol })
}

fn check_base(expected: &CoeffVector, found: &CoeffVector) -> Result<()> {
    let a = expected.monomial_coeffs();
    let b = found.monomial_coeffs();
    if a.len() != b.len() || linalg::relative_distance(&b, &a) > 1e-12 {
        return Err(Error::BasepointMismatch);
    }
    Ok(())
}

/// A bijection of `0..n`; `apply(i)` is where `i` goes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// Fails (with `None`) unless `map` is a bijection of `0..map.len()`.
    pub fn new(map: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; map.len()];
        for &j in &map {
            if j >= map.len() || seen[j] {
                return None;
            }
            seen[j] = true;
        }
        Some(Self(map))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Self) -> Self {
        Self(first.0.iter().map(|&j| self.0[j]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Self(inv)
    }
}

/// Matches each end point to its nearest base point; the second-nearest must
/// be at least `ratio` times farther.
pub fn match_endpoints(ends: &[Vec<Complex64>], base: &[Vec<Complex64>], ratio: f64) -> Result<Permutation> {
    let mut map = Vec::with_capacity(ends.len());
    for (index, e) in ends.iter().enumerate() {
        let mut d: Vec<(f64, usize)> = base.iter().enumerate().map(|(j, b)| (linalg::sup_distance(e, b), j)).collect();
        d.sort_by(|x, y| x.0.total_cmp(&y.0));
        if d.len() > 1 {
            let r = if d[0].0 == 0.0 { f64::INFINITY } else { d[1].0 / d[0].0 };
            if r < ratio {
                return Err(Error::AmbiguousMatch { index, ratio: r });
            }
        }
        map.push(d[0].1);
    }
    Permutation::new(map).ok_or(Error::AmbiguousMatch { index: 0, ratio: 1.0 })
}

/// The permutation of `base` induced by the loop of `divisor` at `c_v0 = e^t`.
pub fn track_loop(
    spec: &BundleSpec,
    divisor: &ToricDivisor,
    t: f64,
    base: &CritSet,
    opts: &TrackerOptions,
) -> Result<Permutation> {
    let path = PathSpec::loop_for(divisor.clone(), t);
    check_base(&path.coeffs_at(spec, 0.0)?, &base.coeffs)?;
    let coords: Vec<_> = base.points.iter().map(CritPoint::coords).collect();
    let ends = track_points(spec, &path, &coords, opts)?;
    match_endpoints(&ends, &coords, opts.match_ratio)
}

/// A labelled base set at `u = −T` in collection order, reused for many loops.
/// Permutations act on collection indices, so they are permutations of labels.
#[derive(Debug, Clone)]
pub struct MonodromyContext {
    spec: BundleSpec,
    t: f64,
    base: CritSet,
    opts: TrackerOptions,
}

impl MonodromyContext {
    pub fn new(spec: &BundleSpec, t_far: f64, opts: &TrackerOptions) -> Result<Self> {
        let t = -t_far;
        let sopts = SolverOptions { tol: opts.tol, ..Default::default() };
        let cs = solver::solve_crit_with(spec, &CoeffVector::family(spec, Complex64::new(t, 0.0)), &sopts)?;
        let base = labeling::into_collection_order(spec, labeling::assign_labels(spec, &cs)?)?;
        Ok(Self { spec: spec.clone(), t, base, opts: opts.clone() })
    }

    pub fn base(&self) -> &CritSet {
        &self.base
    }

    pub fn permutation(&self, divisor: &ToricDivisor) -> Result<Permutation> {
        track_loop(&self.spec, divisor, self.t, &self.base, &self.opts)
    }
}

/// Monodromy of the loop of `divisor` on labels, read at `u = −T`.
pub fn monodromy_permutation(spec: &BundleSpec, divisor: &ToricDivisor, t_far: f64) -> Result<Permutation> {
    MonodromyContext::new(spec, t_far, &TrackerOptions::default())?.permutation(divisor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::LabelPoint;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hirzebruch() -> BundleSpec {
        BundleSpec::new(1, &[1]).unwrap()
    }

    /// Label images of a collection-index permutation.
    fn images(spec: &BundleSpec, p: &Permutation) -> Vec<(LabelPoint, LabelPoint)> {
        (0..p.len()).map(|i| (spec.label_at(i), spec.label_at(p.apply(i)))).collect()
    }

    fn lp(k: usize, l: usize) -> LabelPoint {
        LabelPoint::new(k, l)
    }

    #[test]
    fn permutation_algebra() {
        assert!(Permutation::new(vec![0, 0]).is_none());
        assert!(Permutation::new(vec![0, 2]).is_none());
        let p = Permutation::new(vec![1, 2, 0]).unwrap();
        let q = Permutation::new(vec![0, 2, 1]).unwrap();
        assert_eq!(p.after(&q).as_slice(), &[1, 0, 2]);
        assert!(p.after(&p.inverse()).is_identity());
    }

    #[test]
    fn constant_path_is_identity() {
        let h = hirzebruch();
        let start = solver::solve_crit(&h, &CoeffVector::unit(&h)).unwrap();
        let end = track_segment(&h, &PathSpec::eta(0.0, 0.0), &start, &TrackerOptions::default()).unwrap();
        assert_eq!(end, start);
        let p = track_loop(&h, &ToricDivisor::zero(&h), 0.0, &start, &TrackerOptions::default()).unwrap();
        assert!(p.is_identity());
    }

    #[test]
    fn segment_matches_direct_solve() {
        let h = hirzebruch();
        let opts = TrackerOptions::default();
        let start = solver::solve_crit(&h, &CoeffVector::unit(&h)).unwrap();
        let end = track_segment(&h, &PathSpec::eta(0.0, -12.0), &start, &opts).unwrap();
        assert!(end.max_residual() < 1e-10);
        let direct = solver::solve_crit(&h, &CoeffVector::family(&h, cx(-12.0, 0.0))).unwrap();
        let ends: Vec<_> = end.points.iter().map(CritPoint::coords).collect();
        let want: Vec<_> = direct.points.iter().map(CritPoint::coords).collect();
        let m = match_endpoints(&ends, &want, 3.0).unwrap();
        for (i, e) in ends.iter().enumerate() {
            assert!(linalg::sup_distance(e, &want[m.apply(i)]) < 1e-9);
        }
    }

    #[test]
    fn reversal_returns_to_start() {
        let opts = TrackerOptions::default();
        for (s, a) in [(1, vec![1]), (2, vec![0, 2]), (3, vec![1, 2])] {
            let spec = BundleSpec::new(s, &a).unwrap();
            let start = solver::solve_crit(&spec, &CoeffVector::unit(&spec)).unwrap();
            let path = PathSpec::eta(0.0, -6.0);
            let there = track_segment(&spec, &path, &start, &opts).unwrap();
            let back = track_segment(&spec, &path.reversed(&spec).unwrap(), &there, &opts).unwrap();
            for (p, q) in back.points.iter().zip(&start.points) {
                assert!(linalg::sup_distance(&p.coords(), &q.coords()) < 1e-8);
            }
        }
    }

    #[test]
    fn wrong_base_rejected() {
        let h = hirzebruch();
        let start = solver::solve_crit(&h, &CoeffVector::unit(&h)).unwrap();
        let r = track_segment(&h, &PathSpec::eta(-1.0, -2.0), &start, &TrackerOptions::default());
        assert_eq!(r, Err(Error::BasepointMismatch));
    }

    #[test]
    fn ambiguous_endpoints() {
        let base = vec![vec![cx(0.0, 0.0)], vec![cx(1.0, 0.0)]];
        let ends = vec![vec![cx(0.5, 0.0)], vec![cx(1.0, 0.0)]];
        assert!(matches!(match_endpoints(&ends, &base, 3.0), Err(Error::AmbiguousMatch { index: 0, .. })));
        let swapped = vec![base[1].clone(), base[0].clone()];
        assert_eq!(match_endpoints(&swapped, &base, 3.0).unwrap().as_slice(), &[1, 0]);
    }

    #[test]
    fn hirzebruch_generator_loops() {
        let h = hirzebruch();
        let ctx = MonodromyContext::new(&h, 12.0, &TrackerOptions::default()).unwrap();
        let gen = |g: Generator| images(&h, &ctx.permutation(&ToricDivisor::generator(&h, g)).unwrap());
        for g in [Generator::V(0), Generator::V(1)] {
            assert_eq!(
                gen(g),
                vec![(lp(0, 0), lp(1, 0)), (lp(1, 0), lp(0, 0)), (lp(0, 1), lp(1, 1)), (lp(1, 1), lp(0, 1))]
            );
        }
        // Passing from l = 1 back to l = 0 carries one step in k.
        assert_eq!(
            gen(Generator::E(0)),
            vec![(lp(0, 0), lp(0, 1)), (lp(1, 0), lp(1, 1)), (lp(0, 1), lp(1, 0)), (lp(1, 1), lp(0, 0))]
        );
        assert_eq!(
            gen(Generator::E(1)),
            vec![(lp(0, 0), lp(1, 1)), (lp(1, 0), lp(0, 1)), (lp(0, 1), lp(0, 0)), (lp(1, 1), lp(1, 0))]
        );
    }

    #[test]
    fn loops_compose_and_survive_smaller_steps() {
        let spec = BundleSpec::new(2, &[1]).unwrap();
        let ctx = MonodromyContext::new(&spec, 12.0, &TrackerOptions::default()).unwrap();
        let d1 = ToricDivisor::generator(&spec, Generator::E(1));
        let d2 = ToricDivisor::generator(&spec, Generator::V(2));
        let p1 = ctx.permutation(&d1).unwrap();
        let p2 = ctx.permutation(&d2).unwrap();
        let both = ctx.permutation(&(&d1 + &d2)).unwrap();
        assert_eq!(both, p2.after(&p1));
        let fine = TrackerOptions { initial_step: 5e-3, ..TrackerOptions::default() };
        let ctx2 = MonodromyContext::new(&spec, 12.0, &fine).unwrap();
        assert_eq!(ctx2.permutation(&d1).unwrap(), p1);
    }
}
