//! Combinatorial presentations of one-dimensional bases.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::group::{invert_word, GroupHom, GroupKind, GroupPresentation, Word};
use crate::linalg::{CoeffMode, Matrix};
use crate::local::{boundary, ChainMap, LocalProfile, ProfileKind, TwoTermComplex};
use crate::rep::{repeat_block, restrict, Representation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Residue {
    AlgebraicallyClosed,
    FiniteField(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub label: String,
    pub group: GroupPresentation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedPoint {
    pub label: String,
    pub residue: Residue,
}

/// A boundary label `y`: a branch germ at a closed point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub label: String,
    pub branch: String,
    pub point: String,
    pub profile: ProfileKind,
    pub phi: GroupHom,
    /// Index of `G_{k(y)}` in `G_{k(x)}`.
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvePresentation {
    pub name: String,
    pub branches: Vec<Branch>,
    pub points: Vec<ClosedPoint>,
    pub slots: Vec<Slot>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CurveReport {
    pub valid: bool,
    pub failures: Vec<String>,
}

impl CurvePresentation {
    pub fn branch_index(&self, label: &str) -> Option<usize> {
        self.branches.iter().position(|b| b.label == label)
    }

    pub fn point_index(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p.label == label)
    }

    pub fn slots_over(&self, x: usize) -> Vec<&Slot> {
        let label = &self.points[x].label;
        self.slots.iter().filter(|s| &s.point == label).collect()
    }

    pub fn residual_group(&self, x: usize) -> GroupPresentation {
        match self.points[x].residue {
            Residue::AlgebraicallyClosed => GroupPresentation::trivial(),
            Residue::FiniteField(_) => GroupPresentation::zhat(),
        }
    }

    pub fn residue_q(&self, x: usize) -> Option<u64> {
        match self.points[x].residue {
            Residue::AlgebraicallyClosed => None,
            Residue::FiniteField(q) => Some(q),
        }
    }
}

fn free_reduce(w: &[i32]) -> Word {
    let mut out: Word = Vec::new();
    for &g in w {
        if out.last() == Some(&-g) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    out
}

/// Whether the local relation holds for the images in the branch group, as far as decidable.
fn relation_holds(group: &GroupPresentation, profile: ProfileKind, phi: &GroupHom) -> std::result::Result<(), String> {
    let ProfileKind::TameFrobenius { q } = profile else { return Ok(()) };
    let (t, f) = (&phi.images[0], &phi.images[1]);
    // F t F^-1 t^-q
    let mut rel = f.clone();
    rel.extend(t);
    rel.extend(invert_word(f));
    for _ in 0..q {
        rel.extend(invert_word(t));
    }
    match &group.kind {
        GroupKind::FiniteExplicit { degree, .. } => {
            let p = group.eval_perm(&rel).unwrap();
            if p == (0..*degree).collect::<Vec<_>>() {
                Ok(())
            } else {
                Err("local relation fails in the branch group".into())
            }
        }
        GroupKind::LocalTame { q: qb } => {
            if *qb == q && t == &vec![1] && f == &vec![2] {
                Ok(())
            } else if free_reduce(&rel).is_empty() {
                Ok(())
            } else {
                Err("cannot certify the local relation in the branch group".into())
            }
        }
        GroupKind::Trivial => Ok(()),
        _ => {
            if free_reduce(&rel).is_empty() {
                Ok(())
            } else {
                Err("local relation is not a consequence of the branch presentation".into())
            }
        }
    }
}

pub fn validate_curve(c: &CurvePresentation) -> CurveReport {
    let mut failures = Vec::new();
    let mut labels = HashSet::new();
    for l in c.branches.iter().map(|b| &b.label).chain(c.points.iter().map(|p| &p.label)).chain(c.slots.iter().map(|s| &s.label)) {
        if !labels.insert(l.clone()) {
            failures.push(format!("label {l} is used twice"));
        }
    }
    if c.branches.is_empty() {
        failures.push("no branches".into());
    }
    for (x, p) in c.points.iter().enumerate() {
        if c.slots_over(x).is_empty() {
            failures.push(format!("closed point {} has no preimage", p.label));
        }
        if let Residue::FiniteField(q) = p.residue {
            if q < 2 {
                failures.push(format!("closed point {} has residue size {q}", p.label));
            }
        }
    }
    for s in &c.slots {
        let Some(b) = c.branch_index(&s.branch) else {
            failures.push(format!("slot {} names unknown branch {}", s.label, s.branch));
            continue;
        };
        let Some(x) = c.point_index(&s.point) else {
            failures.push(format!("slot {} maps to no closed point", s.label));
            continue;
        };
        if s.index == 0 {
            failures.push(format!("slot {} has residue index 0", s.label));
            continue;
        }
        match (c.points[x].residue, s.profile) {
            (Residue::AlgebraicallyClosed, ProfileKind::TameGeometric) => {
                if s.index != 1 {
                    failures.push(format!("slot {}: algebraically closed residue needs index 1", s.label));
                }
            }
            (Residue::FiniteField(q), ProfileKind::TameFrobenius { q: qy }) => {
                if q.checked_pow(s.index as u32) != Some(qy) {
                    failures.push(format!("slot {}: residue size {qy} is not {q}^{}", s.label, s.index));
                }
            }
            _ => failures.push(format!("slot {}: profile does not match the residue field", s.label)),
        }
        let group = &c.branches[b].group;
        let local = s.profile.local_group();
        if s.phi.images.len() != local.generator_count() {
            failures.push(format!("slot {}: {} images for {} local generators", s.label, s.phi.images.len(), local.generator_count()));
            continue;
        }
        if let Some(e) = s.phi.images.iter().find_map(|w| group.check_word(w).err()) {
            failures.push(format!("slot {}: {e}", s.label));
            continue;
        }
        if let Err(e) = relation_holds(group, s.profile, &s.phi) {
            failures.push(format!("slot {}: {e}", s.label));
        }
    }
    CurveReport { valid: failures.is_empty(), failures }
}

fn check_sections(c: &CurvePresentation, sections: &[Representation]) -> Result<()> {
    if sections.len() != c.branches.len() {
        return Err(Error::MissingBranchData(format!("{} sections for {} branches", sections.len(), c.branches.len())));
    }
    for (b, r) in c.branches.iter().zip(sections) {
        if b.group != r.group {
            return Err(Error::CurveMismatch);
        }
    }
    Ok(())
}

/// `∂_y` of one slot before induction.
pub fn slot_boundary(c: &CurvePresentation, s: &Slot, sections: &[Representation]) -> Result<TwoTermComplex> {
    let b = c.branch_index(&s.branch).ok_or_else(|| Error::MissingBranchData(s.branch.clone()))?;
    let local = restrict(&sections[b], &s.profile.local_group(), &s.phi)?;
    let profile = LocalProfile::of(s.profile, &local)?;
    boundary(&profile, &local)
}

/// `⊕_{ν(y)=x} Ind ∂_y φ_y^* M_{η(y)}`.
pub fn boundary_target(c: &CurvePresentation, x: usize, sections: &[Representation]) -> Result<TwoTermComplex> {
    check_sections(c, sections)?;
    let mode = sections.first().map(|r| r.mode.clone()).unwrap_or_else(CoeffMode::rational);
    let q = c.residue_q(x);
    let mut out = TwoTermComplex::zero(&mode, &c.residual_group(x), q);
    for s in c.slots_over(x) {
        let part = slot_boundary(c, s, sections)?.induce(s.index, q)?;
        out = out.direct_sum(&part)?;
    }
    out.q = q;
    Ok(out)
}

/// Action of `boundary_target` on a family of branch maps.
pub fn boundary_target_map(c: &CurvePresentation, x: usize, maps: &[Matrix]) -> ChainMap {
    let blocks: Vec<Matrix> = c
        .slots_over(x)
        .iter()
        .map(|s| repeat_block(&maps[c.branch_index(&s.branch).unwrap()], s.index))
        .collect();
    let m = Matrix::block_diag(&blocks);
    ChainMap { f0: m.clone(), f1: m }
}

fn slot(label: &str, branch: &str, point: &str, profile: ProfileKind, images: Vec<Word>, index: usize) -> Slot {
    Slot { label: label.into(), branch: branch.into(), point: point.into(), profile, phi: GroupHom { images }, index }
}

/// `P¹` over an algebraically closed field with `m` finite punctures and `∞`.
pub fn p1_preset(m: usize) -> Result<CurvePresentation> {
    if m == 0 {
        return Err(Error::InvalidObject("the P1 preset needs at least one finite puncture".into()));
    }
    let group = GroupPresentation::free(m, true);
    let mut points: Vec<ClosedPoint> =
        (1..=m).map(|i| ClosedPoint { label: format!("x{i}"), residue: Residue::AlgebraicallyClosed }).collect();
    points.push(ClosedPoint { label: "inf".into(), residue: Residue::AlgebraicallyClosed });
    let mut slots: Vec<Slot> =
        (1..=m).map(|i| slot(&format!("y{i}"), "eta", &format!("x{i}"), ProfileKind::TameGeometric, vec![vec![i as i32]], 1)).collect();
    slots.push(slot("y_inf", "eta", "inf", ProfileKind::TameGeometric, vec![group.infinity_word().unwrap()], 1));
    Ok(CurvePresentation { name: format!("p1_{m}"), branches: vec![Branch { label: "eta".into(), group }], points, slots })
}

/// `Spec Z_p` through its tame quotient.
pub fn spec_zp_preset(p: u64) -> CurvePresentation {
    CurvePresentation {
        name: format!("spec_z{p}"),
        branches: vec![Branch { label: "eta".into(), group: GroupPresentation::local_tame(p) }],
        points: vec![ClosedPoint { label: "s".into(), residue: Residue::FiniteField(p) }],
        slots: vec![slot("y", "eta", "s", ProfileKind::TameFrobenius { q: p }, vec![vec![1], vec![2]], 1)],
    }
}

/// Two lines crossing over an algebraically closed field, localized at the crossing.
pub fn node_preset() -> CurvePresentation {
    let g = GroupPresentation::free(1, false);
    CurvePresentation {
        name: "node".into(),
        branches: vec![Branch { label: "X".into(), group: g.clone() }, Branch { label: "Y".into(), group: g }],
        points: vec![ClosedPoint { label: "o".into(), residue: Residue::AlgebraicallyClosed }],
        slots: vec![
            slot("yX", "X", "o", ProfileKind::TameGeometric, vec![vec![1]], 1),
            slot("yY", "Y", "o", ProfileKind::TameGeometric, vec![vec![1]], 1),
        ],
    }
}

/// `Spec Z[√5]_(2)`: residue `F_2` below, `F_4` on the normalization.
pub fn sqrt5_preset() -> CurvePresentation {
    CurvePresentation {
        name: "sqrt5".into(),
        branches: vec![Branch { label: "eta".into(), group: GroupPresentation::local_tame(4) }],
        points: vec![ClosedPoint { label: "s".into(), residue: Residue::FiniteField(2) }],
        slots: vec![slot("y", "eta", "s", ProfileKind::TameFrobenius { q: 4 }, vec![vec![1], vec![2]], 2)],
    }
}

pub const PRESET_NAMES: [&str; 4] = ["p1", "spec_zp", "node", "sqrt5"];

/// Presets by name; `p1` uses two punctures and `spec_zp` uses `p = 7`.
pub fn preset(name: &str) -> Option<CurvePresentation> {
    match name {
        "p1" => p1_preset(2).ok(),
        "spec_zp" => Some(spec_zp_preset(7)),
        "node" => Some(node_preset()),
        "sqrt5" => Some(sqrt5_preset()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::{h0, h1};

    #[test]
    fn presets_validate() {
        for name in PRESET_NAMES {
            let r = validate_curve(&preset(name).unwrap());
            assert!(r.valid, "{name}: {:?}", r.failures);
        }
        assert_eq!(p1_preset(1).unwrap().points.len(), 2);
        assert!(p1_preset(0).is_err());
    }

    #[test]
    fn broken_normalization_is_reported() {
        let mut c = node_preset();
        c.slots[1].point = "nowhere".into();
        assert!(!validate_curve(&c).valid);
        let mut c = sqrt5_preset();
        c.slots[0].index = 1;
        assert!(!validate_curve(&c).valid);
    }

    #[test]
    fn p1_trivial_target() {
        let q = CoeffMode::rational();
        let c = p1_preset(2).unwrap();
        let m = Representation::trivial(&q, &c.branches[0].group, 1);
        let t = boundary_target(&c, 0, &[m]).unwrap();
        assert!(t.d.is_zero());
        assert_eq!((h0(&t).dim(), h1(&t).dim()), (1, 1));
    }

    #[test]
    fn sqrt5_target_is_induced() {
        let q = CoeffMode::rational();
        let c = sqrt5_preset();
        let m = Representation::free(&q, &c.branches[0].group, vec![Matrix::identity(1), Matrix::from_i64(1, 1, &[4], &q)]).unwrap();
        let t = boundary_target(&c, 0, &[m]).unwrap();
        assert_eq!(t.c0.len(), 2);
        assert_eq!(t.action0[0], Matrix::from_i64(2, 2, &[0, 4, 1, 0], &q));
        assert_eq!(t.q, Some(2));
    }

    #[test]
    fn missing_section() {
        let c = node_preset();
        let q = CoeffMode::rational();
        let m = Representation::trivial(&q, &c.branches[0].group, 1);
        assert!(matches!(boundary_target(&c, 0, &[m]), Err(Error::MissingBranchData(_))));
    }
}
