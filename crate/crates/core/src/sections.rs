//! Global sections of line bundles on `X_a` by counting effective toric
//! divisors, and the Hom table of the exceptional collection.

use alloc::vec;
use alloc::vec::Vec;

use crate::bundle::{BundleSpec, LabelPoint, PicClass, ToricDivisor};

/// Weak compositions of `total` into `parts` nonnegative parts, first part
/// descending: `(total, 0, ..), .., (0, .., total)`.
pub(crate) fn compositions(total: i64, parts: usize) -> Compositions {
    Compositions { current: None, total, parts, done: total < 0 || parts == 0 }
}

pub(crate) struct Compositions {
    current: Option<Vec<i64>>,
    total: i64,
    parts: usize,
    done: bool,
}

impl Iterator for Compositions {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        let next = match self.current.take() {
            None => {
                let mut c = vec![0; self.parts];
                c[0] = self.total;
                c
            }
            Some(mut c) => {
                // Rightmost position (excluding the last) holding a positive
                // entry gives one unit to its right neighbour, which then
                // collects everything that was further right.
                let p = self.parts;
                let Some(i) = (0..p.saturating_sub(1)).rev().find(|&i| c[i] > 0) else {
                    self.done = true;
                    return None;
                };
                c[i] -= 1;
                let tail: i64 = c[i + 1..].iter().sum::<i64>() + 1;
                c[i + 1..].fill(0);
                c[i + 1] = tail;
                c
            }
        };
        if self.parts == 1 {
            self.done = true;
        }
        self.current = Some(next.clone());
        Some(next)
    }
}

/// `C(n, k)` for `n, k ≥ 0`.
pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc as u64
}

/// `dim H^0(X, h·π*H + x·ξ)`.
///
/// Sections correspond to effective divisors `Σ n_i V(v_i) + Σ m_j V(e_j)`
/// with `Σ m_j = x` and `Σ n_i = h + Σ a_j m_j`; for each `m` the `n` count is
/// `C(h + Σ a_j m_j + s, s)`.
pub fn count_sections(spec: &BundleSpec, class: PicClass) -> u64 {
    let s = spec.s() as i64;
    compositions(class.x, spec.r() + 1)
        .map(|m| {
            let target = class.h + twisted_weight(spec, &m);
            if target < 0 {
                0
            } else {
                binomial((target + s) as u64, s as u64)
            }
        })
        .sum()
}

fn twisted_weight(spec: &BundleSpec, m: &[i64]) -> i64 {
    m.iter().enumerate().map(|(j, &mj)| spec.twist(j) * mj).sum()
}

/// Monomial basis of `H^0(X, L)` as effective toric divisors of class `L`.
pub fn enumerate_section_divisors(spec: &BundleSpec, class: PicClass) -> Vec<ToricDivisor> {
    let mut out = Vec::new();
    for m in compositions(class.x, spec.r() + 1) {
        let target = class.h + twisted_weight(spec, &m);
        for n in compositions(target, spec.s() + 1) {
            out.push(ToricDivisor::new(n, m.clone()));
        }
    }
    out
}

/// `dims[i][j] = dim Hom(E_i, E_j)` over the collection in `(l, k)` order.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HomTable {
    pub spec: BundleSpec,
    pub dims: Vec<Vec<u64>>,
}

impl HomTable {
    pub fn get(&self, from: LabelPoint, to: LabelPoint) -> u64 {
        self.dims[self.spec.collection_index(from)][self.spec.collection_index(to)]
    }

    /// Pairs `(i, j)` with `j < i` and a nonzero entry; empty for an
    /// exceptional collection in this order.
    pub fn backward_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, row) in self.dims.iter().enumerate() {
            for (j, &d) in row.iter().enumerate().take(i) {
                if d != 0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn diagonal_is_one(&self) -> bool {
        self.dims.iter().enumerate().all(|(i, row)| row[i] == 1)
    }
}

pub fn hom_table(spec: &BundleSpec) -> HomTable {
    let labels = spec.labels();
    let dims =
        labels.iter().map(|&p| labels.iter().map(|&q| count_sections(spec, q.class() - p.class())).collect()).collect();
    HomTable { spec: spec.clone(), dims }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::divisor_class;
    use alloc::collections::{BTreeMap, BTreeSet};

    /// Every effective divisor with `n` entries up to `n_bound` and `m`
    /// entries up to `m_bound`, bucketed by class; classes with `|h| > h_window`
    /// are dropped.
    fn brute_force(
        spec: &BundleSpec,
        n_bound: i64,
        m_bound: i64,
        h_window: i64,
    ) -> BTreeMap<PicClass, Vec<ToricDivisor>> {
        let (ns, ms) = (spec.s() + 1, spec.r() + 1);
        let mut out: BTreeMap<PicClass, Vec<ToricDivisor>> = BTreeMap::new();
        let mut digits = vec![0i64; ns + ms];
        loop {
            let d = ToricDivisor::new(digits[..ns].to_vec(), digits[ns..].to_vec());
            let class = divisor_class(spec, &d).unwrap();
            if class.h.abs() <= h_window {
                out.entry(class).or_default().push(d);
            }
            let mut i = 0;
            loop {
                if i == ns + ms {
                    return out;
                }
                digits[i] += 1;
                if digits[i] <= if i < ns { n_bound } else { m_bound } {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn composition_enumeration() {
        let all: Vec<_> = compositions(2, 3).collect();
        assert_eq!(all, vec![vec![2, 0, 0], vec![1, 1, 0], vec![1, 0, 1], vec![0, 2, 0], vec![0, 1, 1], vec![0, 0, 2]]);
        assert_eq!(compositions(0, 2).count(), 1);
        assert_eq!(compositions(-1, 2).count(), 0);
        assert_eq!(compositions(4, 1).collect::<Vec<_>>(), vec![vec![4]]);
        assert_eq!(compositions(5, 4).count() as u64, binomial(8, 3));
    }

    #[test]
    fn hirzebruch_counts() {
        let h = BundleSpec::new(1, &[1]).unwrap();
        assert_eq!(count_sections(&h, PicClass::new(1, 0)), 2);
        assert_eq!(count_sections(&h, PicClass::new(0, 1)), 3);
        assert_eq!(count_sections(&h, PicClass::new(1, 1)), 5);
        assert_eq!(count_sections(&h, PicClass::new(0, 0)), 1);
        assert_eq!(count_sections(&h, PicClass::new(-1, 1)), 1);
        assert_eq!(count_sections(&h, PicClass::new(-1, 0)), 0);
        assert_eq!(count_sections(&h, PicClass::new(5, -1)), 0);
    }

    #[test]
    fn hirzebruch_basis() {
        let h = BundleSpec::new(1, &[1]).unwrap();
        let basis = enumerate_section_divisors(&h, PicClass::new(0, 1));
        assert_eq!(
            basis,
            vec![
                ToricDivisor::new(vec![0, 0], vec![1, 0]),
                ToricDivisor::new(vec![1, 0], vec![0, 1]),
                ToricDivisor::new(vec![0, 1], vec![0, 1]),
            ]
        );
        assert_eq!(enumerate_section_divisors(&h, PicClass::default()), vec![ToricDivisor::zero(&h)]);
        assert!(enumerate_section_divisors(&h, PicClass::new(-1, 0)).is_empty());
    }

    #[test]
    fn closed_form_matches_brute_force() {
        let specs = [
            (1, vec![0]),
            (1, vec![1]),
            (2, vec![1]),
            (2, vec![0, 0]),
            (2, vec![0, 1]),
            (2, vec![1, 1]),
            (3, vec![1, 2]),
            (3, vec![0, 2]),
        ];
        for (s, a) in specs {
            let spec = BundleSpec::new(s, &a).unwrap();
            let r = spec.r() as i64;
            let reach = spec.s() as i64 + spec.twist_sum() * r;
            // Σ n = h + Σ a_j m_j ≤ reach + max(a)·r and Σ m = x ≤ r, so the box
            // contains every divisor of the classes checked below.
            let n_bound = reach + spec.twists().iter().max().unwrap() * r;
            let brute = brute_force(&spec, n_bound, r, reach);
            let empty = Vec::new();
            for h in -reach..=reach {
                for x in 0..=r {
                    let class = PicClass::new(h, x);
                    let found = brute.get(&class).unwrap_or(&empty);
                    assert_eq!(count_sections(&spec, class), found.len() as u64, "{spec} {class}");
                    let listed: BTreeSet<_> = enumerate_section_divisors(&spec, class).into_iter().collect();
                    let found: BTreeSet<_> = found.iter().cloned().collect();
                    assert_eq!(listed, found);
                }
            }
        }
    }

    #[test]
    fn hom_table_hirzebruch() {
        let h = BundleSpec::new(1, &[1]).unwrap();
        let t = hom_table(&h);
        assert_eq!(t.dims[0], vec![1, 2, 3, 5]);
        assert_eq!(t.get(LabelPoint::new(1, 0), LabelPoint::new(0, 1)), 1);
        assert!(t.diagonal_is_one());
        assert!(t.backward_violations().is_empty());
    }

    #[test]
    fn backward_vanishing_and_diagonal() {
        for (s, a) in [(1, vec![0]), (2, vec![1]), (2, vec![0, 2]), (3, vec![1, 2]), (4, vec![0, 1, 3])] {
            let t = hom_table(&BundleSpec::new(s, &a).unwrap());
            assert!(t.diagonal_is_one());
            assert!(t.backward_violations().is_empty());
        }
    }

    #[test]
    fn other_orders_are_not_exceptional() {
        // (k, l)-lex order puts E_01 before E_10, but Hom(E_10, E_01) ≠ 0.
        let h = BundleSpec::new(1, &[1]).unwrap();
        assert_ne!(count_sections(&h, PicClass::new(0, 1) - PicClass::new(1, 0)), 0);
    }

    #[test]
    fn product_case_is_kunneth() {
        let p = BundleSpec::new(1, &[0]).unwrap();
        let t = hom_table(&p);
        for a in p.labels() {
            for b in p.labels() {
                let want = if b.k >= a.k && b.l >= a.l {
                    binomial((b.k - a.k + 1) as u64, 1) * binomial((b.l - a.l + 1) as u64, 1)
                } else {
                    0
                };
                assert_eq!(t.get(a, b), want);
            }
        }
        assert_eq!(t.dims[0], vec![1, 2, 2, 4]);
    }

    #[test]
    fn bases_multiply() {
        for (s, a) in [(1, vec![1]), (2, vec![1]), (2, vec![0, 2])] {
            let spec = BundleSpec::new(s, &a).unwrap();
            let labels = spec.labels();
            for &p1 in &labels {
                for &p2 in &labels {
                    for &p3 in &labels {
                        let b13: BTreeSet<_> =
                            enumerate_section_divisors(&spec, p3.class() - p1.class()).into_iter().collect();
                        for d1 in enumerate_section_divisors(&spec, p2.class() - p1.class()) {
                            for d2 in enumerate_section_divisors(&spec, p3.class() - p2.class()) {
                                assert!(b13.contains(&(&d1 + &d2)));
                            }
                        }
                    }
                }
            }
        }
    }
}
