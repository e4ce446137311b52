//! Bundle data: `X_a = P(O ⊕ ⊕ O(a_j))` over `P^s`, its fan vertices, toric
//! divisors, Picard classes and the exceptional collection `E_kl`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Neg, Sub};
use core::str::FromStr;

use crate::error::{Error, Result};

/// The pair `(s, a_1..a_r)` defining a Kleinschmidt bundle. `a_0 = 0` is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BundleSpec {
    s: usize,
    a: Vec<i64>,
}

impl BundleSpec {
    /// Validates `(s, a)`. Twists must be nonnegative, ascending and satisfy
    /// the Fano bound `Σ a_j ≤ s`.
    pub fn new(s: i64, a: &[i64]) -> Result<Self> {
        if s < 1 {
            return Err(Error::InvalidSpec(format!("base dimension s = {s} must be positive")));
        }
        if a.is_empty() {
            return Err(Error::InvalidSpec(String::from("twist list must be nonempty")));
        }
        for (i, &value) in a.iter().enumerate() {
            if value < 0 {
                return Err(Error::NegativeTwist { index: i + 1, value });
            }
        }
        for (i, w) in a.windows(2).enumerate() {
            if w[0] > w[1] {
                return Err(Error::Unsorted { index: i + 1 });
            }
        }
        let sum: i64 = a.iter().sum();
        if sum > s {
            return Err(Error::FanoViolation { sum, s });
        }
        Ok(Self { s: s as usize, a: a.to_vec() })
    }

    /// Dimension of the base `P^s`.
    pub fn s(&self) -> usize {
        self.s
    }

    /// Rank of the fibre `P^r`.
    pub fn r(&self) -> usize {
        self.a.len()
    }

    /// `a_1..a_r`.
    pub fn twists(&self) -> &[i64] {
        &self.a
    }

    /// `a_j` for `0 ≤ j ≤ r`, with `a_0 = 0`.
    pub fn twist(&self, j: usize) -> i64 {
        if j == 0 {
            0
        } else {
            self.a[j - 1]
        }
    }

    pub fn twist_sum(&self) -> i64 {
        self.a.iter().sum()
    }

    /// Number of elements in the collection and of critical points, `(s+1)(r+1)`.
    pub fn n_points(&self) -> usize {
        (self.s + 1) * (self.r() + 1)
    }

    /// Dimension of the torus `(C*)^{s+r}`.
    pub fn dim(&self) -> usize {
        self.s + self.r()
    }

    /// Number of monomials of the potential, one per vertex: `s + r + 2`.
    pub fn n_monomials(&self) -> usize {
        self.s + self.r() + 2
    }

    pub fn is_product(&self) -> bool {
        self.a.iter().all(|&x| x == 0)
    }

    /// Position of `(k, l)` in the collection order (`l` major, `k` minor).
    pub fn collection_index(&self, p: LabelPoint) -> usize {
        p.l * (self.s + 1) + p.k
    }

    /// Inverse of [`collection_index`](Self::collection_index).
    pub fn label_at(&self, index: usize) -> LabelPoint {
        LabelPoint { k: index % (self.s + 1), l: index / (self.s + 1) }
    }

    /// All labels in collection order.
    pub fn labels(&self) -> Vec<LabelPoint> {
        (0..self.n_points()).map(|i| self.label_at(i)).collect()
    }

    /// All ray generators `v_0..v_s, e_0..e_r`.
    pub fn generators(&self) -> Vec<Generator> {
        (0..=self.s).map(Generator::V).chain((0..=self.r()).map(Generator::E)).collect()
    }

    /// Index of the monomial attached to `g` in the monomial order
    /// `z_1..z_s, w_1..w_r, W/Z, 1/Πw` used by [`crate::lg::CoeffVector`].
    pub fn monomial_index(&self, g: Generator) -> usize {
        match g {
            Generator::V(0) => self.s + self.r(),
            Generator::V(i) => i - 1,
            Generator::E(0) => self.s + self.r() + 1,
            Generator::E(j) => self.s + j - 1,
        }
    }
}

impl fmt::Display for BundleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s={} a=[", self.s)?;
        for (i, x) in self.a.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("]")
    }
}

/// A critical point label `(k, l)`, `0 ≤ k ≤ s`, `0 ≤ l ≤ r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LabelPoint {
    pub k: usize,
    pub l: usize,
}

impl LabelPoint {
    pub fn new(k: usize, l: usize) -> Self {
        Self { k, l }
    }

    /// The collection element `E_kl` labelled by this point.
    pub fn class(self) -> PicClass {
        PicClass { h: self.k as i64, x: self.l as i64 }
    }
}

impl fmt::Display for LabelPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k, self.l)
    }
}

/// A ray generator of the fan: `V(i)` is `v_i`, `E(j)` is `e_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    V(usize),
    E(usize),
}

impl Generator {
    pub fn is_valid(self, spec: &BundleSpec) -> bool {
        match self {
            Generator::V(i) => i <= spec.s(),
            Generator::E(j) => j <= spec.r(),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::V(i) => write!(f, "v{i}"),
            Generator::E(j) => write!(f, "e{j}"),
        }
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidSpec(format!("unknown generator `{s}`"));
        let (head, tail) = s.split_at(s.char_indices().nth(1).map(|(i, _)| i).ok_or_else(bad)?);
        let index: usize = tail.parse().map_err(|_| bad())?;
        match head {
            "v" | "V" => Ok(Generator::V(index)),
            "e" | "E" => Ok(Generator::E(index)),
            _ => Err(bad()),
        }
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Generator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for Generator {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let s = <String as serde::Deserialize>::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A vector of the lattice `N = Z^{s+r}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn zero(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;

    fn add(self, rhs: Self) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

/// Vertex of the polar polytope attached to a generator.
pub fn vertex(spec: &BundleSpec, g: Generator) -> LatticeVector {
    let (s, r) = (spec.s(), spec.r());
    let mut v = LatticeVector::zero(s + r);
    match g {
        Generator::V(0) => {
            v.0[..s].fill(-1);
            v.0[s..].copy_from_slice(spec.twists());
        }
        Generator::V(i) => v.0[i - 1] = 1,
        Generator::E(0) => v.0[s..].fill(-1),
        Generator::E(j) => v.0[s + j - 1] = 1,
    }
    v
}

/// The `s + r + 2` vertices in monomial order: `v_1..v_s, e_1..e_r, v_0, e_0`.
pub fn polytope_vertices(spec: &BundleSpec) -> Vec<LatticeVector> {
    (1..=spec.s())
        .map(Generator::V)
        .chain((1..=spec.r()).map(Generator::E))
        .chain([Generator::V(0), Generator::E(0)])
        .map(|g| vertex(spec, g))
        .collect()
}

/// `h·π*H + x·ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PicClass {
    pub h: i64,
    pub x: i64,
}

impl PicClass {
    pub fn new(h: i64, x: i64) -> Self {
        Self { h, x }
    }
}

impl Add for PicClass {
    type Output = PicClass;
    fn add(self, rhs: Self) -> Self {
        Self { h: self.h + rhs.h, x: self.x + rhs.x }
    }
}

impl Sub for PicClass {
    type Output = PicClass;
    fn sub(self, rhs: Self) -> Self {
        Self { h: self.h - rhs.h, x: self.x - rhs.x }
    }
}

impl Neg for PicClass {
    type Output = PicClass;
    fn neg(self) -> Self {
        Self { h: -self.h, x: -self.x }
    }
}

impl fmt::Display for PicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}H+{}xi", self.h, self.x)
    }
}

/// `Σ n_i V(v_i) + Σ m_j V(e_j)`, with `n` of length `s+1` and `m` of length `r+1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ToricDivisor {
    pub n: Vec<i64>,
    pub m: Vec<i64>,
}

impl ToricDivisor {
    pub fn new(n: Vec<i64>, m: Vec<i64>) -> Self {
        Self { n, m }
    }

    pub fn zero(spec: &BundleSpec) -> Self {
        Self { n: vec![0; spec.s() + 1], m: vec![0; spec.r() + 1] }
    }

    /// The prime divisor `V(g)`.
    pub fn generator(spec: &BundleSpec, g: Generator) -> Self {
        let mut d = Self::zero(spec);
        d.add_generator(g, 1);
        d
    }

    /// Divisor with the given multiset of generators, e.g. `[v0, v0, e1]`.
    pub fn from_generators(spec: &BundleSpec, gens: &[Generator]) -> Result<Self> {
        let mut d = Self::zero(spec);
        for &g in gens {
            if !g.is_valid(spec) {
                return Err(Error::InvalidSpec(format!("generator {g} does not exist for {spec}")));
            }
            d.add_generator(g, 1);
        }
        Ok(d)
    }

    pub fn add_generator(&mut self, g: Generator, times: i64) {
        match g {
            Generator::V(i) => self.n[i] += times,
            Generator::E(j) => self.m[j] += times,
        }
    }

    pub fn coefficient(&self, g: Generator) -> i64 {
        match g {
            Generator::V(i) => self.n[i],
            Generator::E(j) => self.m[j],
        }
    }

    pub fn check_size(&self, spec: &BundleSpec) -> Result<()> {
        if self.n.len() != spec.s() + 1 {
            return Err(Error::SizeMismatch { expected: spec.s() + 1, found: self.n.len() });
        }
        if self.m.len() != spec.r() + 1 {
            return Err(Error::SizeMismatch { expected: spec.r() + 1, found: self.m.len() });
        }
        Ok(())
    }

    pub fn is_effective(&self) -> bool {
        self.n.iter().chain(&self.m).all(|&c| c >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.n.iter().chain(&self.m).all(|&c| c == 0)
    }

    /// `|D|_1 = Σ n_i − Σ a_j m_j`.
    pub fn degree_h(&self, spec: &BundleSpec) -> i64 {
        let twisted: i64 = self.m.iter().enumerate().map(|(j, &m)| spec.twist(j) * m).sum();
        self.n.iter().sum::<i64>() - twisted
    }

    /// `|D|_2 = Σ m_j`.
    pub fn degree_xi(&self) -> i64 {
        self.m.iter().sum()
    }
}

impl Add for &ToricDivisor {
    type Output = ToricDivisor;
    fn add(self, rhs: Self) -> ToricDivisor {
        ToricDivisor {
            n: self.n.iter().zip(&rhs.n).map(|(a, b)| a + b).collect(),
            m: self.m.iter().zip(&rhs.m).map(|(a, b)| a + b).collect(),
        }
    }
}

impl fmt::Display for ToricDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={:?} m={:?}", self.n, self.m)
    }
}

/// Class of a toric divisor in `Pic(X) = Z·π*H ⊕ Z·ξ`.
pub fn divisor_class(spec: &BundleSpec, d: &ToricDivisor) -> Result<PicClass> {
    d.check_size(spec)?;
    Ok(PicClass { h: d.degree_h(spec), x: d.degree_xi() })
}

/// `E_kl = k·π*H + l·ξ`, ordered by `(l, k)`; this is the order in which all
/// backward Hom spaces vanish.
pub fn exceptional_collection(spec: &BundleSpec) -> Vec<PicClass> {
    spec.labels().into_iter().map(LabelPoint::class).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hirzebruch() -> BundleSpec {
        BundleSpec::new(1, &[1]).unwrap()
    }

    #[test]
    fn validates_specs() {
        assert_eq!(BundleSpec::new(3, &[1, 2]).unwrap().n_points(), 12);
        assert_eq!(BundleSpec::new(2, &[0, 0]).unwrap().n_points(), 9);
        assert_eq!(BundleSpec::new(1, &[2]), Err(Error::FanoViolation { sum: 2, s: 1 }));
        assert_eq!(BundleSpec::new(3, &[-1, 2]), Err(Error::NegativeTwist { index: 1, value: -1 }));
        assert_eq!(BundleSpec::new(3, &[2, 1]), Err(Error::Unsorted { index: 1 }));
        assert!(matches!(BundleSpec::new(0, &[0]), Err(Error::InvalidSpec(_))));
        assert!(matches!(BundleSpec::new(2, &[]), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn hirzebruch_vertices() {
        let vs = polytope_vertices(&hirzebruch());
        let got: Vec<_> = vs.iter().map(|v| v.0.clone()).collect();
        assert_eq!(got, vec![vec![1, 0], vec![0, 1], vec![-1, 1], vec![0, -1]]);
    }

    #[test]
    fn product_and_larger_vertices() {
        let p = BundleSpec::new(1, &[0]).unwrap();
        assert_eq!(vertex(&p, Generator::V(0)).0, vec![-1, 0]);
        assert_eq!(vertex(&p, Generator::E(0)).0, vec![0, -1]);
        let x = BundleSpec::new(3, &[1, 2]).unwrap();
        assert_eq!(vertex(&x, Generator::V(0)).0, vec![-1, -1, -1, 1, 2]);
        assert_eq!(polytope_vertices(&x).len(), 7);
    }

    #[test]
    fn vertex_relations() {
        for (s, a) in [(1, vec![1]), (2, vec![0, 2]), (3, vec![1, 2]), (4, vec![1, 1, 2])] {
            let spec = BundleSpec::new(s, &a).unwrap();
            let mut rel_v = vertex(&spec, Generator::V(0));
            for i in 1..=spec.s() {
                rel_v = &rel_v + &vertex(&spec, Generator::V(i));
            }
            for j in 1..=spec.r() {
                let e = vertex(&spec, Generator::E(j));
                for (c, x) in rel_v.0.iter_mut().zip(&e.0) {
                    *c -= spec.twist(j) * x;
                }
            }
            assert!(rel_v.0.iter().all(|&c| c == 0));
            let mut rel_e = vertex(&spec, Generator::E(0));
            for j in 1..=spec.r() {
                rel_e = &rel_e + &vertex(&spec, Generator::E(j));
            }
            assert!(rel_e.0.iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn classes_of_generators() {
        let x = BundleSpec::new(3, &[1, 2]).unwrap();
        for i in 0..=3 {
            let d = ToricDivisor::generator(&x, Generator::V(i));
            assert_eq!(divisor_class(&x, &d).unwrap(), PicClass::new(1, 0));
        }
        for j in 0..=2 {
            let d = ToricDivisor::generator(&x, Generator::E(j));
            assert_eq!(divisor_class(&x, &d).unwrap(), PicClass::new(-x.twist(j), 1));
        }
        let h = hirzebruch();
        let e1 = ToricDivisor::generator(&h, Generator::E(1));
        assert_eq!(divisor_class(&h, &e1).unwrap(), PicClass::new(-1, 1));
        let d = ToricDivisor::new(vec![2, 0], vec![1, 0]);
        assert_eq!(divisor_class(&h, &d).unwrap(), PicClass::new(2, 1));
        assert_eq!(divisor_class(&h, &ToricDivisor::zero(&h)).unwrap(), PicClass::default());
        let bad = ToricDivisor::new(vec![1], vec![0, 0]);
        assert_eq!(divisor_class(&h, &bad), Err(Error::SizeMismatch { expected: 2, found: 1 }));
    }

    #[test]
    fn collection_order() {
        let coll = exceptional_collection(&hirzebruch());
        let want = [(0, 0), (1, 0), (0, 1), (1, 1)].map(|(h, x)| PicClass::new(h, x));
        assert_eq!(coll, want);
        let x = BundleSpec::new(3, &[1, 2]).unwrap();
        let coll = exceptional_collection(&x);
        assert_eq!(coll.len(), 12);
        assert_eq!(coll[0], PicClass::default());
        assert_eq!(coll[11], PicClass::new(3, 2));
        for (i, p) in x.labels().into_iter().enumerate() {
            assert_eq!(x.collection_index(p), i);
        }
    }

    #[test]
    fn generator_parsing() {
        assert_eq!("v0".parse::<Generator>().unwrap(), Generator::V(0));
        assert_eq!("e12".parse::<Generator>().unwrap(), Generator::E(12));
        assert!("x1".parse::<Generator>().is_err());
        assert!("v".parse::<Generator>().is_err());
        let x = BundleSpec::new(3, &[1, 2]).unwrap();
        let idx: Vec<_> = x.generators().into_iter().map(|g| x.monomial_index(g)).collect();
        assert_eq!(idx, vec![5, 0, 1, 2, 6, 3, 4]);
    }

    proptest! {
        #[test]
        fn class_is_additive(
            n1 in proptest::collection::vec(-5i64..6, 4),
            m1 in proptest::collection::vec(-5i64..6, 3),
            n2 in proptest::collection::vec(-5i64..6, 4),
            m2 in proptest::collection::vec(-5i64..6, 3),
        ) {
            let x = BundleSpec::new(3, &[1, 2]).unwrap();
            let d1 = ToricDivisor::new(n1, m1);
            let d2 = ToricDivisor::new(n2, m2);
            let sum = divisor_class(&x, &(&d1 + &d2)).unwrap();
            prop_assert_eq!(sum, divisor_class(&x, &d1).unwrap() + divisor_class(&x, &d2).unwrap());
        }
    }
}
