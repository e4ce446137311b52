//! The quiver on the exceptional collection: one arrow per generator divisor
//! that stays inside the label box, and commutation squares between them.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::bundle::{BundleSpec, Generator, LabelPoint, PicClass, ToricDivisor};
use crate::monodromy::{act, div_plus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuiverVertex {
    pub label: LabelPoint,
    pub class: PicClass,
}

/// `src` and `dst` index [`Quiver::vertices`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Arrow {
    pub src: usize,
    pub dst: usize,
    pub gen: Generator,
}

/// `g1 g2 = g2 g1` out of vertex `src`, with `g1` before `g2` in generator order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Relation {
    pub src: usize,
    pub g1: Generator,
    pub g2: Generator,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Quiver {
    pub vertices: Vec<QuiverVertex>,
    pub arrows: Vec<Arrow>,
    pub relations: Vec<Relation>,
}

/// Colour family of a generator: all `v_i` share one, each `e_j` has its own.
pub fn family(g: Generator) -> String {
    match g {
        Generator::V(_) => String::from("v"),
        Generator::E(_) => g.to_string(),
    }
}

impl Quiver {
    /// Arrow counts per family, in the order `v, e0, .., er`.
    pub fn family_counts(&self, spec: &BundleSpec) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        for g in spec.generators() {
            let f = family(g);
            let n = self.arrows.iter().filter(|a| a.gen == g).count();
            match out.iter_mut().find(|(name, _)| *name == f) {
                Some(entry) => entry.1 += n,
                None => out.push((f, n)),
            }
        }
        out
    }
}

pub fn build_quiver(spec: &BundleSpec) -> Quiver {
    let labels = spec.labels();
    let vertices = labels.iter().map(|&label| QuiverVertex { label, class: label.class() }).collect();
    let gens = spec.generators();
    let admissible = |p: LabelPoint, g: Generator| div_plus(spec, p).contains(&ToricDivisor::generator(spec, g));
    let step = |p: LabelPoint, g: Generator| act(spec, &ToricDivisor::generator(spec, g), p);

    let mut arrows = Vec::new();
    let mut relations = Vec::new();
    for (src, &p) in labels.iter().enumerate() {
        for &g in &gens {
            if admissible(p, g) {
                arrows.push(Arrow { src, dst: spec.collection_index(step(p, g)), gen: g });
            }
        }
        for (i, &g1) in gens.iter().enumerate() {
            for &g2 in &gens[i + 1..] {
                let both = admissible(p, g1)
                    && admissible(p, g2)
                    && admissible(step(p, g1), g2)
                    && admissible(step(p, g2), g1);
                if both {
                    relations.push(Relation { src, g1, g2 });
                }
            }
        }
    }
    Quiver { vertices, arrows, relations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monodromy::{witnesses, DivPlusBounds};

    fn counts(spec: &BundleSpec) -> Vec<(String, usize)> {
        build_quiver(spec).family_counts(spec)
    }

    fn named(v: &[(&str, usize)]) -> Vec<(String, usize)> {
        v.iter().map(|(s, n)| (String::from(*s), *n)).collect()
    }

    #[test]
    fn hirzebruch_quiver() {
        let h = BundleSpec::new(1, &[1]).unwrap();
        let q = build_quiver(&h);
        assert_eq!(q.vertices.len(), 4);
        assert_eq!(q.arrows.len(), 7);
        assert_eq!(counts(&h), named(&[("v", 4), ("e0", 2), ("e1", 1)]));
    }

    #[test]
    fn three_fold_quiver() {
        let spec = BundleSpec::new(3, &[1, 2]).unwrap();
        let q = build_quiver(&spec);
        assert_eq!(q.vertices.len(), 12);
        assert_eq!(q.arrows.len(), 54);
        assert_eq!(counts(&spec), named(&[("v", 36), ("e0", 8), ("e1", 6), ("e2", 4)]));
    }

    #[test]
    fn product_square() {
        let p = BundleSpec::new(1, &[0]).unwrap();
        let q = build_quiver(&p);
        assert_eq!((q.vertices.len(), q.arrows.len()), (4, 8));
        assert_eq!(q.relations.len(), 4);
        assert!(q.relations.iter().all(|r| r.src == 0));
    }

    #[test]
    fn arrows_are_degree_one_witnesses_and_squares_close() {
        for (s, a) in [(1, alloc::vec![1]), (2, alloc::vec![1]), (2, alloc::vec![0, 2]), (3, alloc::vec![1, 2])] {
            let spec = BundleSpec::new(s, &a).unwrap();
            let q = build_quiver(&spec);
            let labels = spec.labels();
            for (i, &p) in labels.iter().enumerate() {
                for (j, &t) in labels.iter().enumerate() {
                    let degree_one = witnesses(&spec, p, t, DivPlusBounds::NonStrict)
                        .iter()
                        .filter(|d| d.n.iter().chain(&d.m).sum::<i64>() == 1)
                        .count();
                    let arrows = q.arrows.iter().filter(|a| a.src == i && a.dst == j).count();
                    assert_eq!(arrows, degree_one);
                }
            }
            for r in &q.relations {
                let p = labels[r.src];
                let d1 = ToricDivisor::generator(&spec, r.g1);
                let d2 = ToricDivisor::generator(&spec, r.g2);
                assert_eq!(act(&spec, &d1, act(&spec, &d2, p)), act(&spec, &d2, act(&spec, &d1, p)));
            }
        }
    }
}
