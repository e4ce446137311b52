//! On-disk formats: critical sets and reports as JSON, curve samples as CSV,
//! the quiver as DOT or JSON.
//!
//! Complex numbers are `[re, im]` pairs. Floats are written in the shortest
//! form that parses back to the same double, so a saved set reloads bit-exactly.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use kbundle_core::labeling::CurveRow;
use kbundle_core::quiver::{Arrow, QuiverVertex, Relation};
use kbundle_core::{BundleSpec, CoeffVector, CritPoint, CritSet, Generator, LabelPoint, PicClass, Quiver};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecJson {
    pub s: i64,
    pub a: Vec<i64>,
}

impl SpecJson {
    pub fn from_spec(spec: &BundleSpec) -> Self {
        Self { s: spec.s() as i64, a: spec.twists().to_vec() }
    }

    pub fn to_spec(&self) -> Result<BundleSpec> {
        Ok(BundleSpec::new(self.s, &self.a)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PointJson {
    z: Vec<Complex64>,
    w: Vec<Complex64>,
    residual: f64,
    label: Option<LabelPoint>,
}

/// A critical set together with the bundle it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CritSetJson {
    spec: SpecJson,
    coeffs: CoeffVector,
    tol: f64,
    points: Vec<PointJson>,
}

pub fn critset_to_json(spec: &BundleSpec, cs: &CritSet) -> Result<String> {
    let doc = CritSetJson {
        spec: SpecJson::from_spec(spec),
        coeffs: cs.coeffs.clone(),
        tol: cs.tol,
        points: cs
            .points
            .iter()
            .map(|p| PointJson { z: p.z.clone(), w: p.w.clone(), residual: p.residual, label: p.label })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Parses and validates a saved set: sizes, nonzero coefficients, labels in range.
pub fn critset_from_json(text: &str) -> Result<(BundleSpec, CritSet)> {
    let doc: CritSetJson = serde_json::from_str(text).context("malformed critical-set JSON")?;
    let spec = doc.spec.to_spec()?;
    doc.coeffs.validate(&spec)?;
    let mut points = Vec::with_capacity(doc.points.len());
    for (i, p) in doc.points.into_iter().enumerate() {
        if p.z.len() != spec.s() || p.w.len() != spec.r() {
            bail!("point {i} has {}+{} coordinates, expected {}+{}", p.z.len(), p.w.len(), spec.s(), spec.r());
        }
        if let Some(l) = p.label {
            if l.k > spec.s() || l.l > spec.r() {
                bail!("point {i} carries label {l} outside the collection");
            }
        }
        points.push(CritPoint { z: p.z, w: p.w, residual: p.residual, label: p.label });
    }
    Ok((spec, CritSet { coeffs: doc.coeffs, points, tol: doc.tol }))
}

/// Curve samples as CSV with header `t,index,re_WZ,im_WZ,re_invW,im_invW`.
pub fn curve_to_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from("t,index,re_WZ,im_WZ,re_invW,im_invW\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{},{}", r.t, r.index, r.wz.re, r.wz.im, r.inv_w.re, r.inv_w.im);
    }
    out
}

/// Colour of a generator family: `v` blue, then `e0, e1, e2, ..` cycling
/// through black, red, green and further colours.
pub fn family_colour(g: Generator) -> &'static str {
    const E_COLOURS: [&str; 6] = ["black", "red", "green", "orange", "purple", "brown"];
    match g {
        Generator::V(_) => "blue",
        Generator::E(j) => E_COLOURS[j % E_COLOURS.len()],
    }
}

fn vertex_id(p: LabelPoint) -> String {
    format!("E_{}_{}", p.k, p.l)
}

/// Graphviz digraph; vertices in collection order, arrows as built.
pub fn quiver_to_dot(q: &Quiver) -> String {
    let mut out = String::from("digraph quiver {\n  rankdir=LR;\n  node [shape=circle];\n");
    for v in &q.vertices {
        let _ = writeln!(
            out,
            "  {} [label=\"E{}{}\\n({},{})\"];",
            vertex_id(v.label),
            v.label.k,
            v.label.l,
            v.class.h,
            v.class.x
        );
    }
    for a in &q.arrows {
        let _ = writeln!(
            out,
            "  {} -> {} [label=\"{}\", color={}];",
            vertex_id(q.vertices[a.src].label),
            vertex_id(q.vertices[a.dst].label),
            a.gen,
            family_colour(a.gen)
        );
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct VertexJson {
    k: usize,
    l: usize,
    h: i64,
    x: i64,
}

#[derive(Debug, Serialize, Deserialize)]
struct QuiverJson {
    vertices: Vec<VertexJson>,
    arrows: Vec<Arrow>,
    relations: Vec<Relation>,
}

pub fn quiver_to_json(q: &Quiver) -> Result<String> {
    let doc = QuiverJson {
        vertices: q
            .vertices
            .iter()
            .map(|v| VertexJson { k: v.label.k, l: v.label.l, h: v.class.h, x: v.class.x })
            .collect(),
        arrows: q.arrows.clone(),
        relations: q.relations.clone(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

pub fn quiver_from_json(text: &str) -> Result<Quiver> {
    let doc: QuiverJson = serde_json::from_str(text).context("malformed quiver JSON")?;
    let n = doc.vertices.len();
    if let Some(a) = doc.arrows.iter().find(|a| a.src >= n || a.dst >= n) {
        bail!("arrow {} -> {} refers to a missing vertex", a.src, a.dst);
    }
    if let Some(r) = doc.relations.iter().find(|r| r.src >= n) {
        bail!("relation at {} refers to a missing vertex", r.src);
    }
    Ok(Quiver {
        vertices: doc
            .vertices
            .into_iter()
            .map(|v| QuiverVertex { label: LabelPoint::new(v.k, v.l), class: PicClass::new(v.h, v.x) })
            .collect(),
        arrows: doc.arrows,
        relations: doc.relations,
    })
}

/// Any serializable report, pretty-printed with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}
