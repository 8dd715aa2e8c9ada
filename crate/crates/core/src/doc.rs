//! JSON documents: a curve, named heart objects and named morphisms.
//!
//! Keys serialize in sorted order and matrices as row-major decimal strings,
//! so equal documents print byte-identically.

use serde::{Deserialize, Serialize};

use crate::curve::{validate_curve, Branch, ClosedPoint, CurvePresentation, Residue, Slot};
use crate::error::{Error, Result};
use crate::group::{GroupHom, GroupKind, GroupPresentation, Word};
use crate::heart::{HeartMorphism, HeartObject};
use crate::linalg::{parse_scalar, scalar_to_string, CoeffMode, Matrix};
use crate::local::{ChainMap, ProfileKind, TwoTermComplex};
use crate::module::Shape;
use crate::rep::Representation;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub mode: CoeffMode,
    pub curve: CurvePresentation,
    pub objects: Vec<(String, HeartObject)>,
    pub morphisms: Vec<NamedMorphism>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedMorphism {
    pub name: String,
    pub source: String,
    pub target: String,
    pub morphism: HeartMorphism,
}

impl Document {
    pub fn new(mode: &CoeffMode, curve: &CurvePresentation) -> Self {
        Document { mode: mode.clone(), curve: curve.clone(), objects: vec![], morphisms: vec![] }
    }

    pub fn object(&self, name: &str) -> Result<&HeartObject> {
        self.objects.iter().find(|(n, _)| n == name).map(|(_, o)| o).ok_or_else(|| name_error(name))
    }

    pub fn morphism(&self, name: &str) -> Result<&HeartMorphism> {
        self.morphisms.iter().find(|m| m.name == name).map(|m| &m.morphism).ok_or_else(|| name_error(name))
    }

    /// Adds a morphism between two named objects.
    pub fn add_morphism(&mut self, name: &str, source: &str, target: &str, morphism: HeartMorphism) -> Result<()> {
        if self.object(source)? != &morphism.source || self.object(target)? != &morphism.target {
            return Err(parse_err("E_NAME", format!("`{name}` does not connect `{source}` and `{target}`")));
        }
        self.morphisms.push(NamedMorphism { name: name.into(), source: source.into(), target: target.into(), morphism });
        Ok(())
    }
}

fn name_error(name: &str) -> Error {
    Error::Parse { code: "E_NAME", message: format!("unknown name `{name}`") }
}

fn parse_err(code: &'static str, message: impl Into<String>) -> Error {
    Error::Parse { code, message: message.into() }
}

// ---------- wire types ----------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireDocument {
    schema_version: String,
    mode: CoeffMode,
    curve: WireCurve,
    #[serde(default)]
    objects: Vec<WireObject>,
    #[serde(default)]
    morphisms: Vec<WireMorphism>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireCurve {
    name: String,
    branches: Vec<WireBranch>,
    points: Vec<WirePoint>,
    slots: Vec<WireSlot>,
}

#[derive(Serialize, Deserialize)]
struct WireGroup {
    #[serde(flatten)]
    kind: GroupKind,
    generator_names: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireBranch {
    label: String,
    group: WireGroup,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum WireResidue {
    AlgebraicallyClosed,
    FiniteField { q: u64 },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WirePoint {
    label: String,
    residue: WireResidue,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireSlot {
    label: String,
    branch: String,
    point: String,
    profile: ProfileKind,
    images: Vec<Word>,
    index: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireRep {
    exponents: Vec<u32>,
    action: Vec<WireMatrix>,
    #[serde(default)]
    weight_base: Option<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireComplex {
    c0: Vec<u32>,
    c1: Vec<u32>,
    d: WireMatrix,
    action0: Vec<WireMatrix>,
    action1: Vec<WireMatrix>,
    #[serde(default)]
    tag0: i64,
    #[serde(default)]
    tag1: i64,
    #[serde(default)]
    twist: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireChainMap {
    f0: WireMatrix,
    f1: WireMatrix,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireObject {
    name: String,
    branch_reps: Vec<WireRep>,
    point_complexes: Vec<WireComplex>,
    boundary_maps: Vec<WireChainMap>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireMorphism {
    name: String,
    source: String,
    target: String,
    branch_maps: Vec<WireMatrix>,
    point_maps: Vec<WireMatrix>,
}

// ---------- to wire ----------

fn wire_matrix(m: &Matrix) -> WireMatrix {
    WireMatrix { rows: m.rows(), cols: m.cols(), entries: m.entries().iter().map(scalar_to_string).collect() }
}

fn wire_group(g: &GroupPresentation) -> WireGroup {
    WireGroup { kind: g.kind.clone(), generator_names: g.generator_names.clone() }
}

fn wire_curve(c: &CurvePresentation) -> WireCurve {
    WireCurve {
        name: c.name.clone(),
        branches: c.branches.iter().map(|b| WireBranch { label: b.label.clone(), group: wire_group(&b.group) }).collect(),
        points: c
            .points
            .iter()
            .map(|p| WirePoint {
                label: p.label.clone(),
                residue: match p.residue {
                    Residue::AlgebraicallyClosed => WireResidue::AlgebraicallyClosed,
                    Residue::FiniteField(q) => WireResidue::FiniteField { q },
                },
            })
            .collect(),
        slots: c
            .slots
            .iter()
            .map(|s| WireSlot {
                label: s.label.clone(),
                branch: s.branch.clone(),
                point: s.point.clone(),
                profile: s.profile,
                images: s.phi.images.clone(),
                index: s.index,
            })
            .collect(),
    }
}

fn wire_rep(r: &Representation) -> WireRep {
    WireRep { exponents: r.shape.exps.clone(), action: r.action.iter().map(wire_matrix).collect(), weight_base: r.frobenius_weight_base }
}

fn wire_complex(c: &TwoTermComplex) -> WireComplex {
    WireComplex {
        c0: c.c0.exps.clone(),
        c1: c.c1.exps.clone(),
        d: wire_matrix(&c.d),
        action0: c.action0.iter().map(wire_matrix).collect(),
        action1: c.action1.iter().map(wire_matrix).collect(),
        tag0: c.tag0,
        tag1: c.tag1,
        twist: c.twist,
    }
}

fn wire_object(name: &str, o: &HeartObject) -> WireObject {
    WireObject {
        name: name.into(),
        branch_reps: o.branch_reps.iter().map(wire_rep).collect(),
        point_complexes: o.point_complexes.iter().map(wire_complex).collect(),
        boundary_maps: o.boundary_maps.iter().map(|f| WireChainMap { f0: wire_matrix(&f.f0), f1: wire_matrix(&f.f1) }).collect(),
    }
}

/// Canonical JSON text of a document.
pub fn serialize(doc: &Document) -> Result<String> {
    let mut morphisms = Vec::new();
    for m in &doc.morphisms {
        morphisms.push(WireMorphism {
            name: m.name.clone(),
            source: m.source.clone(),
            target: m.target.clone(),
            branch_maps: m.morphism.branch_maps.iter().map(wire_matrix).collect(),
            point_maps: m.morphism.point_maps.iter().map(wire_matrix).collect(),
        });
    }
    let w = WireDocument {
        schema_version: SCHEMA_VERSION.into(),
        mode: doc.mode.clone(),
        curve: wire_curve(&doc.curve),
        objects: doc.objects.iter().map(|(n, o)| wire_object(n, o)).collect(),
        morphisms,
    };
    let v = serde_json::to_value(&w).map_err(|e| parse_err("E_SCHEMA", e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| parse_err("E_SCHEMA", e.to_string()))?;
    s.push('\n');
    Ok(s)
}

// ---------- from wire ----------

fn read_matrix(w: &WireMatrix, mode: &CoeffMode, at: &str) -> Result<Matrix> {
    if w.entries.len() != w.rows * w.cols {
        return Err(parse_err("E_SCHEMA", format!("{at}: {} entries for a {}x{} matrix", w.entries.len(), w.rows, w.cols)));
    }
    let mut vals = Vec::with_capacity(w.entries.len());
    for (i, e) in w.entries.iter().enumerate() {
        let x = parse_scalar(e).map_err(|code| parse_err(code, format!("{at}: entry {i} `{e}`")))?;
        mode.check(&x).map_err(|_| parse_err("E_NUMBER", format!("{at}: entry {i} `{e}` is not a canonical element of {mode}")))?;
        vals.push(x);
    }
    Matrix::new(w.rows, w.cols, vals).map_err(|e| parse_err("E_SCHEMA", format!("{at}: {e}")))
}

fn read_matrices(ws: &[WireMatrix], mode: &CoeffMode, at: &str) -> Result<Vec<Matrix>> {
    ws.iter().enumerate().map(|(i, w)| read_matrix(w, mode, &format!("{at}[{i}]"))).collect()
}

fn read_curve(w: &WireCurve) -> Result<CurvePresentation> {
    let mut branches = Vec::new();
    for b in &w.branches {
        let group = GroupPresentation::with_names(b.group.kind.clone(), b.group.generator_names.clone())
            .map_err(|e| parse_err("E_INVALID", format!("branch {}: {e}", b.label)))?;
        branches.push(Branch { label: b.label.clone(), group });
    }
    let points = w
        .points
        .iter()
        .map(|p| ClosedPoint {
            label: p.label.clone(),
            residue: match p.residue {
                WireResidue::AlgebraicallyClosed => Residue::AlgebraicallyClosed,
                WireResidue::FiniteField { q } => Residue::FiniteField(q),
            },
        })
        .collect();
    let slots = w
        .slots
        .iter()
        .map(|s| Slot {
            label: s.label.clone(),
            branch: s.branch.clone(),
            point: s.point.clone(),
            profile: s.profile,
            phi: GroupHom { images: s.images.clone() },
            index: s.index,
        })
        .collect();
    let c = CurvePresentation { name: w.name.clone(), branches, points, slots };
    let r = validate_curve(&c);
    if !r.valid {
        return Err(parse_err("E_INVALID", format!("curve: {}", r.failures.join("; "))));
    }
    Ok(c)
}

fn read_rep(w: &WireRep, mode: &CoeffMode, group: &GroupPresentation, at: &str) -> Result<Representation> {
    let action = read_matrices(&w.action, mode, &format!("{at}.action"))?;
    let r = Representation { mode: mode.clone(), group: group.clone(), shape: Shape::new(w.exponents.clone()), action, frobenius_weight_base: w.weight_base };
    r.validate().map_err(|e| parse_err("E_INVALID", format!("{at}: {e}")))?;
    Ok(r)
}

fn read_object(w: &WireObject, mode: &CoeffMode, curve: &CurvePresentation) -> Result<HeartObject> {
    let at = format!("object {}", w.name);
    if w.branch_reps.len() != curve.branches.len() || w.point_complexes.len() != curve.points.len() || w.boundary_maps.len() != curve.points.len() {
        return Err(parse_err("E_SCHEMA", format!("{at}: component counts do not match the curve")));
    }
    let mut reps = Vec::new();
    for (i, (r, b)) in w.branch_reps.iter().zip(&curve.branches).enumerate() {
        reps.push(read_rep(r, mode, &b.group, &format!("{at}.branch_reps[{i}]"))?);
    }
    let mut pcs = Vec::new();
    for (x, c) in w.point_complexes.iter().enumerate() {
        let p = format!("{at}.point_complexes[{x}]");
        let m = TwoTermComplex {
            mode: mode.clone(),
            group: curve.residual_group(x),
            c0: Shape::new(c.c0.clone()),
            c1: Shape::new(c.c1.clone()),
            d: read_matrix(&c.d, mode, &format!("{p}.d"))?,
            action0: read_matrices(&c.action0, mode, &format!("{p}.action0"))?,
            action1: read_matrices(&c.action1, mode, &format!("{p}.action1"))?,
            tag0: c.tag0,
            tag1: c.tag1,
            twist: c.twist,
            q: curve.residue_q(x),
        };
        pcs.push(m);
    }
    let mut maps = Vec::new();
    for (x, f) in w.boundary_maps.iter().enumerate() {
        let p = format!("{at}.boundary_maps[{x}]");
        maps.push(ChainMap { f0: read_matrix(&f.f0, mode, &format!("{p}.f0"))?, f1: read_matrix(&f.f1, mode, &format!("{p}.f1"))? });
    }
    HeartObject::new(curve, mode, reps, pcs, maps).map_err(|e| parse_err("E_INVALID", format!("{at}: {e}")))
}

/// Parses and validates a document.
pub fn parse(text: &str) -> Result<Document> {
    let w: WireDocument = serde_json::from_str(text)
        .map_err(|e| parse_err("E_SCHEMA", format!("line {} column {}: {e}", e.line(), e.column())))?;
    if w.schema_version != SCHEMA_VERSION {
        return Err(parse_err("E_SCHEMA", format!("unsupported schema version `{}`", w.schema_version)));
    }
    let mode = w.mode;
    let curve = read_curve(&w.curve)?;
    let mut doc = Document::new(&mode, &curve);
    for o in &w.objects {
        if doc.objects.iter().any(|(n, _)| *n == o.name) {
            return Err(parse_err("E_NAME", format!("duplicate object name `{}`", o.name)));
        }
        let obj = read_object(o, &mode, &curve)?;
        doc.objects.push((o.name.clone(), obj));
    }
    for m in &w.morphisms {
        if doc.morphisms.iter().any(|x| x.name == m.name) || doc.objects.iter().any(|(n, _)| *n == m.name) {
            return Err(parse_err("E_NAME", format!("duplicate name `{}`", m.name)));
        }
        let at = format!("morphism {}", m.name);
        let s = doc.object(&m.source)?.clone();
        let t = doc.object(&m.target)?.clone();
        let b = read_matrices(&m.branch_maps, &mode, &format!("{at}.branch_maps"))?;
        let p = read_matrices(&m.point_maps, &mode, &format!("{at}.point_maps"))?;
        let f = HeartMorphism::new(&s, &t, b, p).map_err(|e| parse_err("E_INVALID", format!("{at}: {e}")))?;
        doc.add_morphism(&m.name, &m.source, &m.target, f)?;
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::node_preset;
    use crate::heart::{intermediate_extension, j_star};

    fn sample() -> Document {
        let c = node_preset();
        let q = CoeffMode::rational();
        let l: Vec<Representation> = c
            .branches
            .iter()
            .map(|b| Representation::free(&q, &b.group, vec![Matrix::from_i64(2, 2, &[0, -1, 1, 0], &q)]).unwrap())
            .collect();
        let mut d = Document::new(&q, &c);
        let a = intermediate_extension(&c, l.clone()).unwrap();
        let b = j_star(&c, l).unwrap();
        d.objects.push(("a".into(), a.clone()));
        d.objects.push(("b".into(), b.clone()));
        d.add_morphism("id", "b", "b", HeartMorphism::identity(&b).unwrap()).unwrap();
        d
    }

    #[test]
    fn round_trip_is_byte_stable() {
        let d = sample();
        let s = serialize(&d).unwrap();
        let back = parse(&s).unwrap();
        assert_eq!(back, d);
        assert_eq!(serialize(&back).unwrap(), s);
    }

    #[test]
    fn error_codes() {
        let s = serialize(&sample()).unwrap();
        let bad = s.replacen("\"-1\"", "\"-2/2\"", 1);
        assert!(matches!(parse(&bad), Err(Error::Parse { code: "E_FRACTION", .. })));
        let bad = s.replacen("\"-1\"", "\"x\"", 1);
        assert!(matches!(parse(&bad), Err(Error::Parse { code: "E_NUMBER", .. })));
        let bad = s.replacen("\"source\": \"b\"", "\"source\": \"zz\"", 1);
        assert!(matches!(parse(&bad), Err(Error::Parse { code: "E_NAME", .. })));
        assert!(matches!(parse("{"), Err(Error::Parse { code: "E_SCHEMA", .. })));
    }

    #[test]
    fn empty_objects_section() {
        let d = Document::new(&CoeffMode::rational(), &node_preset());
        let s = serialize(&d).unwrap();
        assert!(parse(&s).unwrap().objects.is_empty());
    }
}
