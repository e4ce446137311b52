//! The argument map `Θ = (arg(W/Z), arg(1/Πw)) / 2π` and the labelling of
//! critical points by the roots-of-unity grid it approaches as `u → −∞`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bundle::{BundleSpec, LabelPoint};
use crate::error::{Error, Result};
use crate::lg::{CoeffVector, CritPoint, CritSet};
use crate::solver::{self, SolverOptions};
use crate::tracker::{self, PathSpec, TrackerOptions};

/// A point of the torus `(ℝ/ℤ)^d`, coordinates in turns.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TorusPoint(pub Vec<f64>);

impl TorusPoint {
    /// Reduces every coordinate into `[0, 1)`.
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords.into_iter().map(wrap).collect())
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Sup of coordinate-wise circular distances.
    pub fn distance(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| circular(a - b)).fold(0.0, f64::max)
    }
}

fn wrap(x: f64) -> f64 {
    let y = x - x.floor();
    // x slightly below an integer can round up to exactly 1.0.
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

/// Distance from `x` to the nearest integer.
pub fn circular(x: f64) -> f64 {
    let y = wrap(x);
    y.min(1.0 - y)
}

fn turns(z: Complex64) -> f64 {
    z.arg() / TAU
}

/// `Θ(p)`, computed from argument sums so that no product under- or overflows.
pub fn theta(spec: &BundleSpec, p: &CritPoint) -> Result<TorusPoint> {
    let coords = p.coords();
    if let Some(index) = coords.iter().position(|v| v.norm() == 0.0) {
        return Err(Error::ZeroCoordinate { index });
    }
    let mut first = -p.z.iter().map(|&z| turns(z)).sum::<f64>();
    let mut second = 0.0;
    for (j, &w) in p.w.iter().enumerate() {
        first += spec.twist(j + 1) as f64 * turns(w);
        second -= turns(w);
    }
    Ok(TorusPoint::new(vec![first, second]))
}

/// The limit of `Θ` at the point labelled `(k, l)`:
/// `(l Σa / N + k/(s+1), l/(r+1))`.
pub fn grid_point(spec: &BundleSpec, p: LabelPoint) -> TorusPoint {
    let (s1, r1) = ((spec.s() + 1) as f64, (spec.r() + 1) as f64);
    let n = spec.n_points() as f64;
    TorusPoint::new(vec![p.l as f64 * spec.twist_sum() as f64 / n + p.k as f64 / s1, p.l as f64 / r1])
}

/// All grid points tagged with their labels, in collection order.
pub fn limit_grid(spec: &BundleSpec) -> Result<Vec<(TorusPoint, LabelPoint)>> {
    // Exact coincidence test in units of 1/N: θ1·N = lΣa + k(r+1), θ2·(r+1) = l.
    let n = spec.n_points() as i64;
    let r1 = spec.r() as i64 + 1;
    let keys: Vec<(i64, i64)> = spec
        .labels()
        .iter()
        .map(|p| ((p.l as i64 * spec.twist_sum() + p.k as i64 * r1).rem_euclid(n), p.l as i64))
        .collect();
    for i in 0..keys.len() {
        if keys[i + 1..].contains(&keys[i]) {
            return Err(Error::GridDegenerate);
        }
    }
    Ok(spec.labels().into_iter().map(|p| (grid_point(spec, p), p)).collect())
}

/// Smallest pairwise distance between grid points.
pub fn min_grid_spacing(grid: &[(TorusPoint, LabelPoint)]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            best = best.min(grid[i].0.distance(&grid[j].0));
        }
    }
    best
}

/// Labels every point by its nearest grid point. Fails when a point is
/// farther than a quarter of the grid spacing from the grid or two points
/// claim the same label.
pub fn assign_labels(spec: &BundleSpec, cs: &CritSet) -> Result<CritSet> {
    if cs.len() != spec.n_points() {
        return Err(Error::SizeMismatch { expected: spec.n_points(), found: cs.len() });
    }
    let grid = limit_grid(spec)?;
    let tolerance = min_grid_spacing(&grid) / 4.0;
    let mut out = cs.clone();
    let mut taken = vec![false; grid.len()];
    for (i, p) in out.points.iter_mut().enumerate() {
        let th = theta(spec, p)?;
        let (j, d) = nearest(&grid, &th);
        if d > tolerance {
            return Err(Error::LabelAmbiguity(format!(
                "point {i} lies {d:.3e} from the grid, beyond the tolerance {tolerance:.3e}"
            )));
        }
        if taken[j] {
            return Err(Error::LabelAmbiguity(format!("label {} claimed twice (point {i})", grid[j].1)));
        }
        taken[j] = true;
        p.label = Some(grid[j].1);
    }
    Ok(out)
}

fn nearest(grid: &[(TorusPoint, LabelPoint)], th: &TorusPoint) -> (usize, f64) {
    grid.iter().enumerate().map(|(j, g)| (j, g.0.distance(th))).fold((0, f64::INFINITY), |best, cur| {
        if cur.1 < best.1 {
            cur
        } else {
            best
        }
    })
}

/// Reorders a fully labelled set so that point `i` carries the `i`-th label
/// of the collection.
pub fn into_collection_order(spec: &BundleSpec, cs: CritSet) -> Result<CritSet> {
    let mut slots: Vec<Option<CritPoint>> = vec![None; spec.n_points()];
    for p in cs.points {
        let Some(label) = p.label else {
            return Err(Error::LabelAmbiguity("unlabelled point".into()));
        };
        slots[spec.collection_index(label)] = Some(p);
    }
    let points = slots
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::LabelAmbiguity("labels do not cover the collection".into()))?;
    Ok(CritSet { points, ..cs })
}

/// Largest distance from `Θ` of a point to the nearest grid point, labels ignored.
pub fn grid_deviation(spec: &BundleSpec, cs: &CritSet) -> Result<f64> {
    let grid = limit_grid(spec)?;
    let mut worst: f64 = 0.0;
    for p in &cs.points {
        worst = worst.max(nearest(&grid, &theta(spec, p)?).1);
    }
    Ok(worst)
}

/// Largest distance from `Θ` of a labelled point to its own grid point.
pub fn label_deviation(spec: &BundleSpec, cs: &CritSet) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in &cs.points {
        let label = p.label.ok_or_else(|| Error::LabelAmbiguity("unlabelled point".into()))?;
        worst = worst.max(theta(spec, p)?.distance(&grid_point(spec, label)));
    }
    Ok(worst)
}

/// Distance of the coordinate arguments `(θ_1..θ_s, δ_1..δ_r)` from the
/// limiting hyperplanes `θ_i + Σθ − Σ a_j δ_j = 0` and `δ_j + Σδ = 0`
/// (mod 1, divided by the normal's length); the maximum over all points.
pub fn hyperplane_check(spec: &BundleSpec, cs: &CritSet) -> Result<f64> {
    let (s, r) = (spec.s(), spec.r());
    let a_sq: f64 = spec.twists().iter().map(|&a| (a * a) as f64).sum();
    let norm_z = ((s - 1) as f64 + 4.0 + a_sq).sqrt();
    let norm_w = ((r - 1) as f64 + 4.0).sqrt();
    let mut worst: f64 = 0.0;
    for p in &cs.points {
        if let Some(index) = p.coords().iter().position(|v| v.norm() == 0.0) {
            return Err(Error::ZeroCoordinate { index });
        }
        let th: Vec<f64> = p.z.iter().map(|&z| turns(z)).collect();
        let de: Vec<f64> = p.w.iter().map(|&w| turns(w)).collect();
        let sum_th: f64 = th.iter().sum();
        let sum_de: f64 = de.iter().sum();
        let twisted: f64 = de.iter().enumerate().map(|(j, d)| spec.twist(j + 1) as f64 * d).sum();
        for t in &th {
            worst = worst.max(circular(t + sum_th - twisted) / norm_z);
        }
        for d in &de {
            worst = worst.max(circular(d + sum_de) / norm_w);
        }
    }
    Ok(worst)
}

/// Critical points at `u = 0` labelled by continuation to `u = −T`; the
/// returned sets are the base set at 0 (labelled) and the set at `−T`.
pub fn labelled_base(spec: &BundleSpec, t_far: f64, opts: &TrackerOptions) -> Result<(CritSet, CritSet)> {
    let start = solver::solve_crit_with(
        spec,
        &CoeffVector::unit(spec),
        &SolverOptions { tol: opts.tol, ..Default::default() },
    )?;
    let path = PathSpec::eta(0.0, -t_far);
    let far = assign_labels(spec, &tracker::track_segment(spec, &path, &start, opts)?)?;
    let mut base = start;
    for (p, q) in base.points.iter_mut().zip(&far.points) {
        p.label = q.label;
    }
    Ok((base, far))
}

/// `Θ` at `u = −T` per label, in collection order (points reached by continuation from `u = 0`).
pub fn theta_minus(spec: &BundleSpec, t_far: f64, opts: &TrackerOptions) -> Result<Vec<(LabelPoint, TorusPoint)>> {
    let (_, far) = labelled_base(spec, t_far, opts)?;
    labelled_thetas(spec, far)
}

/// `Θ` at `u = +T` per label, labels pulled back from `u = −T` through `u = 0`.
pub fn theta_plus(spec: &BundleSpec, t_far: f64, opts: &TrackerOptions) -> Result<Vec<(LabelPoint, TorusPoint)>> {
    let (base, _) = labelled_base(spec, t_far, opts)?;
    let plus = tracker::track_segment(spec, &PathSpec::eta(0.0, t_far), &base, opts)?;
    labelled_thetas(spec, plus)
}

fn labelled_thetas(spec: &BundleSpec, cs: CritSet) -> Result<Vec<(LabelPoint, TorusPoint)>> {
    into_collection_order(spec, cs)?
        .points
        .iter()
        .map(|p| Ok((p.label.expect("ordered sets are labelled"), theta(spec, p)?)))
        .collect()
}

/// Convergence of `Θ` towards the grid at one `T`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConvergenceRow {
    pub t: f64,
    pub grid_deviation: f64,
    pub hyperplane_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LimitReport {
    /// One row per `T`, increasing.
    pub rows: Vec<ConvergenceRow>,
    /// Why labelling at the largest `T` failed, if it did.
    pub label_error: Option<alloc::string::String>,
    /// Distance of each labelled point from its own grid point at the largest `T`.
    pub label_deviation: Option<f64>,
}

impl LimitReport {
    /// Labels are a bijection within `threshold` of the grid, the hyperplane
    /// residual is below `threshold`, and neither measure grows with `T`
    /// (beyond rounding; both are identically zero for product bundles).
    pub fn passed(&self, threshold: f64) -> bool {
        self.within(threshold) && self.monotone()
    }

    pub fn monotone(&self) -> bool {
        const SLACK: f64 = 1e-12;
        self.rows.windows(2).all(|w| {
            w[1].grid_deviation <= w[0].grid_deviation + SLACK
                && w[1].hyperplane_residual <= w[0].hyperplane_residual + SLACK
        })
    }

    /// The closeness part of [`Self::passed`] alone.
    pub fn within(&self, threshold: f64) -> bool {
        let last = self.rows.last();
        self.label_deviation.is_some_and(|d| d < threshold) && last.is_some_and(|r| r.hyperplane_residual < threshold)
    }
}

/// Follows the critical points from `u = 0` to `u = −T` for each `T` of
/// `t_values` (sorted increasing) and measures how close `Θ` is to the grid.
pub fn verify_theorem_a(spec: &BundleSpec, t_values: &[f64], opts: &TrackerOptions) -> Result<LimitReport> {
    let mut ts = t_values.to_vec();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let sopts = SolverOptions { tol: opts.tol, ..Default::default() };
    let mut cs = solver::solve_crit_with(spec, &CoeffVector::unit(spec), &sopts)?;
    let mut at = 0.0;
    let mut rows = Vec::with_capacity(ts.len());
    for &t in &ts {
        cs = tracker::track_segment(spec, &PathSpec::eta(-at, -t), &cs, opts)?;
        at = t;
        rows.push(ConvergenceRow {
            t,
            grid_deviation: grid_deviation(spec, &cs)?,
            hyperplane_residual: hyperplane_check(spec, &cs)?,
        });
    }
    let (label_error, label_deviation) = match assign_labels(spec, &cs) {
        Ok(labelled) => (None, Some(label_deviation(spec, &labelled)?)),
        Err(Error::LabelAmbiguity(msg)) => (Some(msg), None),
        Err(e) => return Err(e),
    };
    Ok(LimitReport { rows, label_error, label_deviation })
}

/// One sample of a critical point along the family: the values of `W/Z`
/// and `1/Πw` there.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurveRow {
    pub t: f64,
    pub index: usize,
    pub wz: Complex64,
    pub inv_w: Complex64,
}

/// Samples every critical point of `f_t` for each `t` in the list; indices
/// follow the points by continuation from the first `t`.
pub fn sample_curve(spec: &BundleSpec, t_list: &[f64], opts: &TrackerOptions) -> Result<Vec<CurveRow>> {
    let Some(&first) = t_list.first() else {
        return Ok(Vec::new());
    };
    let sopts = SolverOptions { tol: opts.tol, ..Default::default() };
    let mut cs = solver::solve_crit_with(spec, &CoeffVector::family(spec, Complex64::new(first, 0.0)), &sopts)?;
    let mut rows = Vec::with_capacity(t_list.len() * cs.len());
    let mut prev = first;
    for &t in t_list {
        if t != prev {
            cs = tracker::track_segment(spec, &PathSpec::eta(prev, t), &cs, opts)?;
            prev = t;
        }
        for (index, p) in cs.points.iter().enumerate() {
            let mut wz = Complex64::new(1.0, 0.0);
            let mut inv_w = Complex64::new(1.0, 0.0);
            for z in &p.z {
                wz /= z;
            }
            for (j, w) in p.w.iter().enumerate() {
                wz *= w.powi(spec.twist(j + 1) as i32);
                inv_w /= w;
            }
            rows.push(CurveRow { t, index, wz, inv_w });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hirzebruch() -> BundleSpec {
        BundleSpec::new(1, &[1]).unwrap()
    }

    fn close(a: &TorusPoint, b: &[f64]) -> bool {
        a.distance(&TorusPoint::new(b.to_vec())) < 1e-12
    }

    #[test]
    fn torus_reduction_and_metric() {
        let p = TorusPoint::new(vec![1.25, -0.25, -1e-17]);
        assert_eq!(p.0[0], 0.25);
        assert_eq!(p.0[1], 0.75);
        assert!(p.0[2] < 1.0);
        assert!((TorusPoint::new(vec![0.95]).distance(&TorusPoint::new(vec![0.05])) - 0.1).abs() < 1e-12);
        assert!((circular(2.4) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn theta_examples() {
        let h = hirzebruch();
        let real = CritPoint::from_coords(&h, &[cx(0.8191725133961645, 0.0), cx(0.6710436067037893, 0.0)], 0.0);
        assert!(close(&theta(&h, &real).unwrap(), &[0.0, 0.0]));
        let spec = BundleSpec::new(2, &[0]).unwrap();
        let zeta = Complex64::from_polar(1.0, TAU / 3.0);
        let p = CritPoint::from_coords(&spec, &[zeta, zeta, cx(1.0, 0.0)], 0.0);
        assert!(close(&theta(&spec, &p).unwrap(), &[1.0 / 3.0, 0.0]));
        let zero = CritPoint::from_coords(&h, &[cx(1.0, 0.0), cx(0.0, 0.0)], 0.0);
        assert_eq!(theta(&h, &zero), Err(Error::ZeroCoordinate { index: 1 }));
    }

    #[test]
    fn grid_examples() {
        let grid = limit_grid(&hirzebruch()).unwrap();
        let want = [([0.0, 0.0], (0, 0)), ([0.5, 0.0], (1, 0)), ([0.25, 0.5], (0, 1)), ([0.75, 0.5], (1, 1))];
        assert_eq!(grid.len(), 4);
        for ((tp, label), (coords, (k, l))) in grid.iter().zip(want) {
            assert!(close(tp, &coords));
            assert_eq!(*label, LabelPoint::new(k, l));
        }
        let product = BundleSpec::new(2, &[0, 0]).unwrap();
        for (tp, p) in limit_grid(&product).unwrap() {
            assert!(close(&tp, &[p.k as f64 / 3.0, p.l as f64 / 3.0]));
        }
        let spec = BundleSpec::new(3, &[1, 2]).unwrap();
        let grid = limit_grid(&spec).unwrap();
        assert!(close(&grid[spec.collection_index(LabelPoint::new(0, 1))].0, &[0.25, 1.0 / 3.0]));
        assert!(close(&grid[spec.collection_index(LabelPoint::new(0, 2))].0, &[0.5, 2.0 / 3.0]));
    }

    #[test]
    fn grids_never_degenerate_in_the_fano_range() {
        for s in 1..=6i64 {
            for r in 1..=3usize {
                let mut a = vec![0i64; r];
                loop {
                    if let Ok(spec) = BundleSpec::new(s, &a) {
                        let grid = limit_grid(&spec).unwrap();
                        assert!(min_grid_spacing(&grid) > 0.0);
                    }
                    // next nondecreasing vector with entries ≤ s
                    let Some(i) = (0..r).rev().find(|&i| a[i] < s) else { break };
                    a[i] += 1;
                    for j in i + 1..r {
                        a[j] = a[i];
                    }
                }
            }
        }
    }

    #[test]
    fn product_labels_are_exact() {
        let spec = BundleSpec::new(2, &[0]).unwrap();
        let cs = solver::solve_crit(&spec, &CoeffVector::unit(&spec)).unwrap();
        let labelled = assign_labels(&spec, &cs).unwrap();
        assert!(labelled.is_labelled());
        assert!(label_deviation(&spec, &labelled).unwrap() < 1e-12);
        assert!(hyperplane_check(&spec, &labelled).unwrap() < 1e-12);
    }

    #[test]
    fn crowded_points_are_ambiguous() {
        let spec = BundleSpec::new(1, &[0]).unwrap();
        let cs = solver::solve_crit(&spec, &CoeffVector::unit(&spec)).unwrap();
        let mut bad = cs.clone();
        bad.points[1] = bad.points[0].clone();
        bad.points[1].z[0] *= Complex64::from_polar(1.0, 0.01);
        assert!(matches!(assign_labels(&spec, &bad), Err(Error::LabelAmbiguity(_))));
        let mut far = cs;
        far.points[0].z[0] *= Complex64::from_polar(1.0, 1.0);
        assert!(matches!(assign_labels(&spec, &far), Err(Error::LabelAmbiguity(_))));
    }

    #[test]
    fn hirzebruch_far_labels() {
        let h = hirzebruch();
        let opts = TrackerOptions::default();
        let (base, far) = labelled_base(&h, 12.0, &opts).unwrap();
        let real = base.points.iter().find(|p| p.z[0].im.abs() < 1e-12 && p.z[0].re > 0.0).unwrap();
        assert_eq!(real.label, Some(LabelPoint::new(0, 0)));
        assert!(label_deviation(&h, &far).unwrap() < 1e-3);
        assert!(hyperplane_check(&h, &far).unwrap() < 1e-3);
        // Direct solve at u = −T gives the same labelled points.
        let direct =
            assign_labels(&h, &solver::solve_crit(&h, &CoeffVector::family(&h, cx(-12.0, 0.0))).unwrap()).unwrap();
        for p in &far.points {
            let q = &direct.points[direct.position_of(p.label.unwrap()).unwrap()];
            assert!(crate::linalg::sup_distance(&p.coords(), &q.coords()) < 1e-8);
        }
    }

    #[test]
    fn hyperplane_residual_shrinks() {
        let h = hirzebruch();
        let res: Vec<f64> = [2.0, 6.0, 12.0]
            .iter()
            .map(|&t| {
                let cs = solver::solve_crit(&h, &CoeffVector::family(&h, cx(-t, 0.0))).unwrap();
                hyperplane_check(&h, &cs).unwrap()
            })
            .collect();
        assert!(res[0] > res[1] && res[1] > res[2], "{res:?}");
    }

    #[test]
    fn curve_samples() {
        let h = hirzebruch();
        let opts = TrackerOptions::default();
        assert!(sample_curve(&h, &[], &opts).unwrap().is_empty());
        let rows = sample_curve(&h, &[0.0], &opts).unwrap();
        assert_eq!(rows.len(), 4);
        let rows = sample_curve(&h, &[0.0, -6.0, -12.0], &opts).unwrap();
        assert_eq!(rows.len(), 12);
        let far = &rows[8..];
        let grid = limit_grid(&h).unwrap();
        for row in far {
            let th = TorusPoint::new(vec![turns(row.wz), turns(row.inv_w)]);
            assert!(nearest(&grid, &th).1 < 1e-3);
        }
    }
}
