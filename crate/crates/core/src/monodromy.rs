//! The combinatorial monodromy action on labels, the divisor sets `Div⁺`,
//! and the comparison of their witness counts with section counts.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::bundle::{divisor_class, BundleSpec, Generator, LabelPoint, ToricDivisor};
use crate::error::Result;
use crate::sections::{self, compositions};
use crate::tracker::{MonodromyContext, Permutation, TrackerOptions};

/// `(k + |D|_1 mod s+1, l + |D|_2 mod r+1)`.
pub fn act(spec: &BundleSpec, d: &ToricDivisor, p: LabelPoint) -> LabelPoint {
    let (s1, r1) = (spec.s() as i64 + 1, spec.r() as i64 + 1);
    LabelPoint::new(
        (p.k as i64 + d.degree_h(spec)).rem_euclid(s1) as usize,
        (p.l as i64 + d.degree_xi()).rem_euclid(r1) as usize,
    )
}

/// The action followed by continuation: each wrap of `l` past `r` adds
/// `Σa` to `k`, i.e. `k + |D|_1 + Σa·⌊(l + |D|_2)/(r+1)⌋`.
pub fn act_lifted(spec: &BundleSpec, d: &ToricDivisor, p: LabelPoint) -> LabelPoint {
    let (s1, r1) = (spec.s() as i64 + 1, spec.r() as i64 + 1);
    let l = p.l as i64 + d.degree_xi();
    let k = p.k as i64 + d.degree_h(spec) + spec.twist_sum() * l.div_euclid(r1);
    LabelPoint::new(k.rem_euclid(s1) as usize, l.rem_euclid(r1) as usize)
}

/// Which combinatorial action a numerical permutation is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Action {
    #[default]
    Modular,
    Lifted,
}

impl Action {
    pub fn apply(self, spec: &BundleSpec, d: &ToricDivisor, p: LabelPoint) -> LabelPoint {
        match self {
            Self::Modular => act(spec, d, p),
            Self::Lifted => act_lifted(spec, d, p),
        }
    }

    /// The action as a permutation of collection indices.
    pub fn permutation(self, spec: &BundleSpec, d: &ToricDivisor) -> Permutation {
        let map = spec.labels().into_iter().map(|p| spec.collection_index(self.apply(spec, d, p))).collect();
        Permutation::new(map).expect("translations of the label group are bijective")
    }
}

/// Lower bounds of `Div⁺(k, l)`: `0 ≤ k + |D|_1` (the default) or `0 < k + |D|_1`
/// together with `0 < l + |D|_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DivPlusBounds {
    #[default]
    NonStrict,
    Strict,
}

/// Effective divisors keeping `(k + |D|_1, l + |D|_2)` inside the label box.
pub fn div_plus(spec: &BundleSpec, p: LabelPoint) -> Vec<ToricDivisor> {
    div_plus_with(spec, p, DivPlusBounds::NonStrict)
}

pub fn div_plus_with(spec: &BundleSpec, p: LabelPoint, bounds: DivPlusBounds) -> Vec<ToricDivisor> {
    let (s, r) = (spec.s() as i64, spec.r() as i64);
    let (k, l) = (p.k as i64, p.l as i64);
    let lower = match bounds {
        DivPlusBounds::NonStrict => 0,
        DivPlusBounds::Strict => 1,
    };
    let mut out = Vec::new();
    for x in (lower - l).max(0)..=r - l {
        for m in compositions(x, spec.r() + 1) {
            let twisted: i64 = m.iter().enumerate().map(|(j, &mj)| spec.twist(j) * mj).sum();
            for total in (lower - k + twisted).max(0)..=s - k + twisted {
                for n in compositions(total, spec.s() + 1) {
                    out.push(ToricDivisor::new(n, m.clone()));
                }
            }
        }
    }
    out
}

/// Divisors of `Div⁺(from)` whose action takes `from` to `to`.
pub fn witnesses(spec: &BundleSpec, from: LabelPoint, to: LabelPoint, bounds: DivPlusBounds) -> Vec<ToricDivisor> {
    div_plus_with(spec, from, bounds).into_iter().filter(|d| act(spec, d, from) == to).collect()
}

pub fn hom_mon_dimension(spec: &BundleSpec, from: LabelPoint, to: LabelPoint) -> u64 {
    witnesses(spec, from, to, DivPlusBounds::NonStrict).len() as u64
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairMismatch {
    pub from: LabelPoint,
    pub to: LabelPoint,
    pub hom: u64,
    pub hom_mon: u64,
    /// Section divisors that are not witnesses.
    pub missing: Vec<ToricDivisor>,
    /// Witnesses that are not section divisors.
    pub extra: Vec<ToricDivisor>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HomReport {
    pub pairs_checked: usize,
    pub mismatches: Vec<PairMismatch>,
}

impl HomReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares witness sets with section bases on every ordered pair of labels.
pub fn verify_theorem_b(spec: &BundleSpec) -> HomReport {
    verify_theorem_b_with(spec, DivPlusBounds::NonStrict)
}

pub fn verify_theorem_b_with(spec: &BundleSpec, bounds: DivPlusBounds) -> HomReport {
    let table = sections::hom_table(spec);
    let labels = spec.labels();
    let mut mismatches = Vec::new();
    for &from in &labels {
        let plus = div_plus_with(spec, from, bounds);
        for &to in &labels {
            let found: BTreeSet<ToricDivisor> = plus.iter().filter(|d| act(spec, d, from) == to).cloned().collect();
            let want: BTreeSet<ToricDivisor> =
                sections::enumerate_section_divisors(spec, to.class() - from.class()).into_iter().collect();
            let hom = table.get(from, to);
            if found != want || hom != found.len() as u64 {
                mismatches.push(PairMismatch {
                    from,
                    to,
                    hom,
                    hom_mon: found.len() as u64,
                    missing: want.difference(&found).cloned().collect(),
                    extra: found.difference(&want).cloned().collect(),
                });
            }
        }
    }
    HomReport { pairs_checked: labels.len() * labels.len(), mismatches }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CompositionMismatch {
    pub path: [LabelPoint; 3],
    pub first: ToricDivisor,
    pub second: ToricDivisor,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CompositionReport {
    /// Triples with both witness sets nonempty.
    pub triples_checked: usize,
    pub sums_checked: usize,
    /// Triples on which `(D1, D2) ↦ D1 + D2` is injective.
    pub injective: usize,
    /// Triples on which the sums exhaust the witnesses of the outer pair.
    pub surjective: usize,
    pub mismatches: Vec<CompositionMismatch>,
}

impl CompositionReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks that sums of composable witnesses are witnesses of the composite
/// pair and land where the action says.
pub fn verify_composition(spec: &BundleSpec) -> CompositionReport {
    let labels = spec.labels();
    let n = labels.len();
    let table: Vec<Vec<Vec<ToricDivisor>>> = labels
        .iter()
        .map(|&a| labels.iter().map(|&b| witnesses(spec, a, b, DivPlusBounds::NonStrict)).collect())
        .collect();
    let mut report = CompositionReport::default();
    for i in 0..n {
        for j in 0..n {
            if table[i][j].is_empty() {
                continue;
            }
            for k in 0..n {
                if table[j][k].is_empty() {
                    continue;
                }
                report.triples_checked += 1;
                let target: BTreeSet<&ToricDivisor> = table[i][k].iter().collect();
                let mut sums = BTreeSet::new();
                for d1 in &table[i][j] {
                    for d2 in &table[j][k] {
                        report.sums_checked += 1;
                        let sum = d1 + d2;
                        if !target.contains(&sum) || act(spec, &sum, labels[i]) != labels[k] {
                            report.mismatches.push(CompositionMismatch {
                                path: [labels[i], labels[j], labels[k]],
                                first: d1.clone(),
                                second: d2.clone(),
                            });
                        }
                        sums.insert(sum);
                    }
                }
                if sums.len() == table[i][j].len() * table[j][k].len() {
                    report.injective += 1;
                }
                if sums.len() == target.len() && sums.iter().all(|d| target.contains(d)) {
                    report.surjective += 1;
                }
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LoopCheck {
    /// Divisor as a generator multiset, e.g. `v0,e0`.
    pub divisor: String,
    /// `(label, image)` pairs read off the tracked loop.
    pub numeric: Vec<(LabelPoint, LabelPoint)>,
    pub matches_modular: bool,
    pub matches_lifted: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MonodromyReport {
    pub t: f64,
    pub checks: Vec<LoopCheck>,
}

impl MonodromyReport {
    pub fn passed(&self, action: Action) -> bool {
        self.checks.iter().all(|c| match action {
            Action::Modular => c.matches_modular,
            Action::Lifted => c.matches_lifted,
        })
    }
}

/// Renders a divisor as its generator multiset (`0` for the zero divisor).
pub fn divisor_tokens(spec: &BundleSpec, d: &ToricDivisor) -> String {
    let mut parts = Vec::new();
    for g in spec.generators() {
        for _ in 0..d.coefficient(g).max(0) {
            parts.push(alloc::format!("{g}"));
        }
    }
    if parts.is_empty() {
        String::from("0")
    } else {
        parts.join(",")
    }
}

/// Every generator divisor, then `V(v_0) + V(e_0)`.
pub fn loop_divisors(spec: &BundleSpec) -> Vec<ToricDivisor> {
    let mut divisors: Vec<ToricDivisor> =
        spec.generators().into_iter().map(|g| ToricDivisor::generator(spec, g)).collect();
    divisors.push(&ToricDivisor::generator(spec, Generator::V(0)) + &ToricDivisor::generator(spec, Generator::E(0)));
    divisors
}

/// Tracks the loop of every generator, and of `V(v_0) + V(e_0)`, at
/// `u = −T` and compares with both combinatorial actions.
pub fn verify_loop_monodromy(spec: &BundleSpec, t_far: f64, opts: &TrackerOptions) -> Result<MonodromyReport> {
    let ctx = MonodromyContext::new(spec, t_far, opts)?;
    let checks = loop_divisors(spec).iter().map(|d| check_loop(spec, &ctx, d)).collect::<Result<Vec<_>>>()?;
    Ok(MonodromyReport { t: t_far, checks })
}

/// One tracked loop against both actions.
pub fn check_loop(spec: &BundleSpec, ctx: &MonodromyContext, d: &ToricDivisor) -> Result<LoopCheck> {
    let perm = ctx.permutation(d)?;
    Ok(LoopCheck {
        divisor: divisor_tokens(spec, d),
        numeric: (0..perm.len()).map(|i| (spec.label_at(i), spec.label_at(perm.apply(i)))).collect(),
        matches_modular: perm == Action::Modular.permutation(spec, d),
        matches_lifted: perm == Action::Lifted.permutation(spec, d),
    })
}

/// `class(D)` agrees with the label displacement for every `D ∈ Div⁺(p)`.
pub fn no_wrap(spec: &BundleSpec, p: LabelPoint) -> bool {
    div_plus(spec, p).iter().all(|d| {
        let c = divisor_class(spec, d).expect("well-sized");
        let q = act(spec, d, p);
        q.class() == p.class() + c && act_lifted(spec, d, p) == q
    })
}
