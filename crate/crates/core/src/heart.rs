//! Heart objects: branch representations glued to two-term point complexes.
//!
//! Every object has a normal form `(L, P, c, v)` per closed point with
//! `c : Ψ0 → P`, `v : P → Ψ1` and `v·c = D`, where `Ψ0 --D--> Ψ1` is the
//! boundary target. Morphisms are stored against these normal forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curve::{boundary_target, boundary_target_map, validate_curve, CurvePresentation};
use crate::error::{Error, Result};
use crate::linalg::{solve, CoeffMode, Matrix, Scalar};
use crate::local::{h0, h0_map, h1, ChainMap, TwoTermComplex};
use crate::module::{map_image, map_kernel, quotient, submodule, LinearSystem, Shape, Solution};
use crate::rep::{composition_series_seeded, find_invariant_subspace, is_equivariant, module_inverse, quotient_rep, subrep, Representation, DEFAULT_SEED};
use crate::weights::{artin_verdict, omega0_point_with_inclusion, ArtinVerdict};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeartObject {
    pub curve: CurvePresentation,
    pub mode: CoeffMode,
    pub branch_reps: Vec<Representation>,
    pub point_complexes: Vec<TwoTermComplex>,
    pub boundary_maps: Vec<ChainMap>,
}

/// Normal form at one closed point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointDatum {
    pub p: Representation,
    pub c: Matrix,
    pub v: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    pub curve: CurvePresentation,
    pub mode: CoeffMode,
    pub branches: Vec<Representation>,
    pub targets: Vec<TwoTermComplex>,
    pub points: Vec<PointDatum>,
}

fn targets_of(curve: &CurvePresentation, branches: &[Representation]) -> Result<Vec<TwoTermComplex>> {
    (0..curve.points.len()).map(|x| boundary_target(curve, x, branches)).collect()
}

/// `Ψ` applied to a family of branch maps, as one block matrix.
pub fn psi(curve: &CurvePresentation, x: usize, maps: &[Matrix]) -> Matrix {
    boundary_target_map(curve, x, maps).f0
}

/// Copies of branch blocks inside `Ψ_x`: `(branch, offset)` for each copy.
fn psi_blocks(curve: &CurvePresentation, x: usize, dims: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut off = 0;
    for s in curve.slots_over(x) {
        let b = curve.branch_index(&s.branch).unwrap();
        for _ in 0..s.index {
            out.push((b, off));
            off += dims[b];
        }
    }
    out
}

fn embedding(total: usize, off: usize, size: usize) -> Matrix {
    let mut m = Matrix::zeros(total, size);
    m.set_block(off, 0, &Matrix::identity(size));
    m
}

/// Solves `inc · X = rhs` in `tgt` and reads `X` in `src`.
pub(crate) fn coords_along(inc: &Matrix, src: &Shape, tgt: &Shape, rhs: &Matrix, mode: &CoeffMode) -> Option<Matrix> {
    let aug = inc.hstack(&tgt.relations(mode));
    let x = solve(&aug, rhs, mode).ok()??;
    Some(src.reduce(&x.block(0, 0, inc.cols(), rhs.cols()), mode))
}

impl Quiver {
    pub fn new(curve: &CurvePresentation, mode: &CoeffMode, branches: Vec<Representation>, points: Vec<PointDatum>) -> Result<Self> {
        let targets = targets_of(curve, &branches)?;
        let q = Quiver { curve: curve.clone(), mode: mode.clone(), branches, targets, points };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        let mode = &self.mode;
        if self.points.len() != self.curve.points.len() {
            return Err(Error::ShapeError("one normal form per closed point is required".into()));
        }
        for (t, pd) in self.targets.iter().zip(&self.points) {
            pd.p.shape.check_map(&t.c0, &pd.c, mode)?;
            t.c1.check_map(&pd.p.shape, &pd.v, mode)?;
            if !t.c1.maps_equal(&pd.v.mul(&pd.c, mode), &t.d, mode) {
                return Err(Error::InvalidObject("v·c differs from the boundary differential".into()));
            }
            for k in 0..t.action0.len() {
                let ok_c = pd.p.shape.maps_equal(&pd.c.mul(&t.action0[k], mode), &pd.p.action[k].mul(&pd.c, mode), mode);
                let ok_v = t.c1.maps_equal(&pd.v.mul(&pd.p.action[k], mode), &t.action1[k].mul(&pd.v, mode), mode);
                if !ok_c || !ok_v {
                    return Err(Error::InvalidObject("normal form maps are not equivariant".into()));
                }
            }
        }
        Ok(())
    }

    /// The object `[Ψ0 --c--> P]` with boundary map `(id, v)`.
    pub fn to_object(&self) -> HeartObject {
        let point_complexes = self
            .targets
            .iter()
            .zip(&self.points)
            .map(|(t, pd)| TwoTermComplex {
                mode: self.mode.clone(),
                group: t.group.clone(),
                c0: t.c0.clone(),
                c1: pd.p.shape.clone(),
                d: pd.c.clone(),
                action0: t.action0.clone(),
                action1: pd.p.action.clone(),
                tag0: t.tag0,
                tag1: t.tag1,
                twist: t.twist,
                q: t.q,
            })
            .collect();
        let boundary_maps =
            self.targets.iter().zip(&self.points).map(|(t, pd)| ChainMap { f0: Matrix::identity(t.c0.len()), f1: pd.v.clone() }).collect();
        HeartObject {
            curve: self.curve.clone(),
            mode: self.mode.clone(),
            branch_reps: self.branches.clone(),
            point_complexes,
            boundary_maps,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.branches.iter().all(|r| r.is_zero()) && self.points.iter().all(|p| p.p.is_zero())
    }

    fn dims(&self) -> Vec<usize> {
        self.branches.iter().map(|r| r.dim()).collect()
    }
}

impl HeartObject {
    /// Validated construction (structural checks, no Artin requirement).
    pub fn new(
        curve: &CurvePresentation,
        mode: &CoeffMode,
        branch_reps: Vec<Representation>,
        point_complexes: Vec<TwoTermComplex>,
        boundary_maps: Vec<ChainMap>,
    ) -> Result<Self> {
        let o = HeartObject { curve: curve.clone(), mode: mode.clone(), branch_reps, point_complexes, boundary_maps };
        let r = validate_object(&o, false);
        if !r.valid {
            return Err(Error::InvalidObject(r.failures.join("; ")));
        }
        Ok(o)
    }

    pub fn zero(curve: &CurvePresentation, mode: &CoeffMode) -> Self {
        let branches = curve.branches.iter().map(|b| Representation::zero(mode, &b.group)).collect();
        j_shriek(curve, branches).expect("zero branch data")
    }

    pub fn targets(&self) -> Result<Vec<TwoTermComplex>> {
        targets_of(&self.curve, &self.branch_reps)
    }

    /// Normal forms; a point with `M^0 = Ψ0` and `f^0 = id` is read off directly.
    pub fn quiver(&self) -> Result<Quiver> {
        let mode = &self.mode;
        let targets = self.targets()?;
        let mut points = Vec::new();
        for ((m, f), t) in self.point_complexes.iter().zip(&self.boundary_maps).zip(&targets) {
            if m.c0 == t.c0 && f.f0 == Matrix::identity(t.c0.len()) {
                points.push(PointDatum { p: m.level(1), c: m.d.clone(), v: f.f1.clone() });
                continue;
            }
            // P = (M^1 ⊕ Ψ0) / {(d m, −f0 m)}
            let amb = Shape::sum(&[&m.c1, &t.c0]);
            let rel = m.d.vstack(&f.f0.neg(mode));
            let q = quotient(&amb, &rel, mode);
            let action = m
                .action1
                .iter()
                .zip(&t.action0)
                .map(|(a1, a0)| q.shape.reduce(&q.proj.mul(&Matrix::block_diag(&[a1.clone(), a0.clone()]), mode).mul(&q.section, mode), mode))
                .collect();
            let inj = Matrix::zeros(m.c1.len(), t.c0.len()).vstack(&Matrix::identity(t.c0.len()));
            let c = q.shape.reduce(&q.proj.mul(&inj, mode), mode);
            let v = t.c1.reduce(&f.f1.hstack(&t.d).mul(&q.section, mode), mode);
            let p = Representation { mode: mode.clone(), group: t.group.clone(), shape: q.shape.clone(), action, frobenius_weight_base: t.q };
            points.push(PointDatum { p, c, v });
        }
        Ok(Quiver { curve: self.curve.clone(), mode: mode.clone(), branches: self.branch_reps.clone(), targets, points })
    }

    pub fn is_zero(&self) -> Result<bool> {
        Ok(self.quiver()?.is_zero())
    }

    pub fn direct_sum(&self, other: &HeartObject) -> Result<HeartObject> {
        if self.curve != other.curve {
            return Err(Error::CurveMismatch);
        }
        let (a, b) = (self.quiver()?, other.quiver()?);
        let branches = a.branches.iter().zip(&b.branches).map(|(x, y)| x.direct_sum(y)).collect::<Result<Vec<_>>>()?;
        let mut points = Vec::new();
        for x in 0..a.points.len() {
            let (pa, pb) = (&a.points[x], &b.points[x]);
            let p = pa.p.direct_sum(&pb.p)?;
            // Ψ of a sum interleaves blocks; permute into block-diagonal order
            let perm = sum_permutation(&self.curve, x, &a.dims(), &b.dims());
            let c = Matrix::block_diag(&[pa.c.clone(), pb.c.clone()]).mul(&perm, &self.mode);
            let v = perm.transpose().mul(&Matrix::block_diag(&[pa.v.clone(), pb.v.clone()]), &self.mode);
            points.push(PointDatum { p, c, v });
        }
        Ok(Quiver::new(&self.curve, &self.mode, branches, points)?.to_object())
    }
}

/// Permutation `P` with `Ψ(A ⊕ B) · ... = (Ψ A ⊕ Ψ B)`: columns map summed coordinates to split ones.
pub(crate) fn sum_permutation(curve: &CurvePresentation, x: usize, da: &[usize], db: &[usize]) -> Matrix {
    let ba = psi_blocks(curve, x, da);
    let bb = psi_blocks(curve, x, db);
    let ta: usize = ba.iter().map(|(b, _)| da[*b]).sum();
    let tb: usize = bb.iter().map(|(b, _)| db[*b]).sum();
    let mut p = Matrix::zeros(ta + tb, ta + tb);
    let mut off = 0;
    for (k, (b, oa)) in ba.iter().enumerate() {
        let ob = bb[k].1;
        for i in 0..da[*b] {
            p[(oa + i, off + i)] = Scalar::from_integer(1.into());
        }
        off += da[*b];
        for i in 0..db[*b] {
            p[(ta + ob + i, off + i)] = Scalar::from_integer(1.into());
        }
        off += db[*b];
    }
    p
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ObjectReport {
    pub valid: bool,
    pub failures: Vec<String>,
    pub verdicts: Vec<(String, ArtinVerdict)>,
}

pub fn validate_object(o: &HeartObject, strict: bool) -> ObjectReport {
    let mut failures = Vec::new();
    let mut verdicts = Vec::new();
    let cr = validate_curve(&o.curve);
    failures.extend(cr.failures);
    if o.branch_reps.len() != o.curve.branches.len() {
        failures.push("branch representation count differs from the branch count".into());
    }
    if o.point_complexes.len() != o.curve.points.len() || o.boundary_maps.len() != o.curve.points.len() {
        failures.push("point data count differs from the closed point count".into());
    }
    if !failures.is_empty() {
        return ObjectReport { valid: false, failures, verdicts };
    }
    for (b, r) in o.curve.branches.iter().zip(&o.branch_reps) {
        if r.group != b.group || r.mode != o.mode {
            failures.push(format!("branch {}: representation has the wrong group or ring", b.label));
        } else if let Err(e) = r.validate() {
            failures.push(format!("branch {}: {e}", b.label));
        } else {
            verdicts.push((b.label.clone(), artin_verdict(r)));
        }
    }
    if !failures.is_empty() {
        return ObjectReport { valid: false, failures, verdicts };
    }
    let targets = match o.targets() {
        Ok(t) => t,
        Err(e) => {
            failures.push(format!("boundary target: {e}"));
            return ObjectReport { valid: false, failures, verdicts };
        }
    };
    for (x, ((m, f), t)) in o.point_complexes.iter().zip(&o.boundary_maps).zip(&targets).enumerate() {
        let label = &o.curve.points[x].label;
        if m.group != t.group || m.mode != o.mode {
            failures.push(format!("point {label}: complex has the wrong residual group or ring"));
            continue;
        }
        if let Err(e) = m.validate() {
            failures.push(format!("point {label}: {e}"));
            continue;
        }
        if let Err(e) = f.check(m, t) {
            failures.push(format!("point {label}: boundary map: {e}"));
            continue;
        }
        let hm = h0(m);
        let ht = h0(t);
        let k = map_kernel(&h0_map(f, m, t), &hm.shape, &ht.shape, &o.mode);
        if !k.is_empty() {
            failures.push(format!("point {label}: H^0 of the boundary map is not injective"));
        }
        verdicts.push((format!("{label}.H0"), artin_verdict(&hm)));
        verdicts.push((format!("{label}.H1"), artin_verdict(&h1(m))));
    }
    for (name, v) in &verdicts {
        match v {
            ArtinVerdict::NotArtin if strict => failures.push(format!("{name}: not of Artin origin")),
            ArtinVerdict::Undetermined if strict => failures.push(format!("{name}: Artin origin not certified")),
            _ => {}
        }
    }
    ObjectReport { valid: failures.is_empty(), failures, verdicts }
}

// ---------- functors ----------

fn zero_point_data(o_targets: &[TwoTermComplex], mode: &CoeffMode) -> (Vec<TwoTermComplex>, Vec<ChainMap>) {
    let complexes: Vec<TwoTermComplex> = o_targets
        .iter()
        .map(|t| {
            let mut z = TwoTermComplex::zero(mode, &t.group, t.q);
            z.tag0 = t.tag0;
            z.tag1 = t.tag1;
            z.twist = t.twist;
            z
        })
        .collect();
    let maps = complexes.iter().zip(o_targets).map(|(z, t)| ChainMap::zero(z, t)).collect();
    (complexes, maps)
}

fn branch_mode(curve: &CurvePresentation, branches: &[Representation]) -> Result<CoeffMode> {
    if branches.len() != curve.branches.len() {
        return Err(Error::MissingBranchData(format!("{} sections for {} branches", branches.len(), curve.branches.len())));
    }
    Ok(branches.first().map(|r| r.mode.clone()).unwrap_or_else(CoeffMode::rational))
}

/// Extension by zero: no point data.
pub fn j_shriek(curve: &CurvePresentation, l: Vec<Representation>) -> Result<HeartObject> {
    let mode = branch_mode(curve, &l)?;
    let targets = targets_of(curve, &l)?;
    let (pc, bm) = zero_point_data(&targets, &mode);
    Ok(HeartObject { curve: curve.clone(), mode, branch_reps: l, point_complexes: pc, boundary_maps: bm })
}

/// Full pushforward: the boundary target itself with the identity map.
pub fn j_star(curve: &CurvePresentation, l: Vec<Representation>) -> Result<HeartObject> {
    let mode = branch_mode(curve, &l)?;
    let targets = targets_of(curve, &l)?;
    let maps = targets.iter().map(ChainMap::identity).collect();
    Ok(HeartObject { curve: curve.clone(), mode, branch_reps: l, point_complexes: targets, boundary_maps: maps })
}

pub fn j_upper_star(o: &HeartObject) -> Vec<Representation> {
    o.branch_reps.clone()
}

/// Skyscraper at `x`: `V` in degree 1, no branch data.
pub fn i_star(curve: &CurvePresentation, mode: &CoeffMode, x: usize, v: &Representation) -> Result<HeartObject> {
    if x >= curve.points.len() {
        return Err(Error::InvalidObject(format!("closed point {x} does not exist")));
    }
    if v.group != curve.residual_group(x) {
        return Err(Error::GroupMismatch);
    }
    let zero = HeartObject::zero(curve, mode);
    let mut o = zero.clone();
    let t = TwoTermComplex::zero(mode, &v.group, curve.residue_q(x));
    let z = t.level(0);
    let m = TwoTermComplex::from_levels(&z, v, curve.residue_q(x))?;
    o.boundary_maps[x] = ChainMap::zero(&m, &t);
    o.point_complexes[x] = m;
    Ok(o)
}

pub fn i_upper_star(o: &HeartObject, x: usize) -> TwoTermComplex {
    o.point_complexes[x].clone()
}

/// `H^0` of the boundary target in degree 0 with its inclusion.
pub fn intermediate_extension(curve: &CurvePresentation, l: Vec<Representation>) -> Result<HeartObject> {
    let mode = branch_mode(curve, &l)?;
    let targets = targets_of(curve, &l)?;
    let mut pcs = Vec::new();
    let mut maps = Vec::new();
    for t in &targets {
        let k = map_kernel(&t.d, &t.c0, &t.c1, &mode);
        let hr = h0(t);
        let zero1 = Representation { shape: Shape::zero(), action: vec![Matrix::zeros(0, 0); hr.action.len()], ..hr.clone() };
        let mut m = TwoTermComplex::from_levels(&hr, &zero1, t.q)?;
        m.tag0 = t.tag0;
        m.tag1 = t.tag1;
        m.twist = t.twist;
        maps.push(ChainMap { f0: k.basis.clone(), f1: Matrix::zeros(t.c1.len(), 0) });
        pcs.push(m);
    }
    Ok(HeartObject { curve: curve.clone(), mode, branch_reps: l, point_complexes: pcs, boundary_maps: maps })
}

/// `j_*` with each finite-residue point complex replaced by its weight-`≤ 0` part.
pub fn omega0_jstar(curve: &CurvePresentation, l: Vec<Representation>) -> Result<HeartObject> {
    let mode = branch_mode(curve, &l)?;
    let targets = targets_of(curve, &l)?;
    let mut pcs = Vec::new();
    let mut maps = Vec::new();
    for (x, t) in targets.iter().enumerate() {
        if curve.residue_q(x).is_none() {
            pcs.push(t.clone());
            maps.push(ChainMap::identity(t));
            continue;
        }
        for s in curve.slots_over(x) {
            let b = curve.branch_index(&s.branch).unwrap();
            if l[b].frobenius_weight_base.is_none() {
                return Err(Error::WeightDataRequired(format!("branch {} has no Frobenius weight base", s.branch)));
            }
        }
        let (o, inc) = omega0_point_with_inclusion(t)?;
        maps.push(inc);
        pcs.push(o);
    }
    Ok(HeartObject { curve: curve.clone(), mode, branch_reps: l, point_complexes: pcs, boundary_maps: maps })
}

/// The canonical map `j_! L → j_* L`.
pub fn canonical_map(curve: &CurvePresentation, l: Vec<Representation>) -> Result<HeartMorphism> {
    let src = j_shriek(curve, l.clone())?;
    let tgt = j_star(curve, l.clone())?;
    let qs = src.quiver()?;
    let branch_maps = l.iter().map(|r| Matrix::identity(r.dim())).collect();
    let point_maps = qs.points.iter().map(|p| p.v.clone()).collect();
    HeartMorphism::new(&src, &tgt, branch_maps, point_maps)
}

// ---------- morphisms ----------

/// Branch maps and normal-form point maps `ψ_x : P_x → P'_x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeartMorphism {
    pub source: HeartObject,
    pub target: HeartObject,
    pub branch_maps: Vec<Matrix>,
    pub point_maps: Vec<Matrix>,
}

fn check_quiver_map(a: &Quiver, b: &Quiver, phi: &[Matrix], psi_x: &[Matrix]) -> Result<()> {
    let mode = &a.mode;
    if phi.len() != a.branches.len() || psi_x.len() != a.points.len() {
        return Err(Error::ShapeError("morphism component count mismatch".into()));
    }
    for ((ra, rb), f) in a.branches.iter().zip(&b.branches).zip(phi) {
        if !is_equivariant(f, ra, rb) {
            return Err(Error::InvalidObject("branch map is not equivariant".into()));
        }
    }
    for x in 0..a.points.len() {
        let (pa, pb, s) = (&a.points[x], &b.points[x], &psi_x[x]);
        if !is_equivariant(s, &pa.p, &pb.p) {
            return Err(Error::InvalidObject("point map is not equivariant".into()));
        }
        let p0 = psi(&a.curve, x, phi);
        if !pb.p.shape.maps_equal(&s.mul(&pa.c, mode), &pb.c.mul(&p0, mode), mode) {
            return Err(Error::InvalidObject("point map does not commute with c".into()));
        }
        if !b.targets[x].c1.maps_equal(&pb.v.mul(s, mode), &p0.mul(&pa.v, mode), mode) {
            return Err(Error::InvalidObject("point map does not commute with v".into()));
        }
    }
    Ok(())
}

impl HeartMorphism {
    pub fn new(source: &HeartObject, target: &HeartObject, branch_maps: Vec<Matrix>, point_maps: Vec<Matrix>) -> Result<Self> {
        if source.curve != target.curve {
            return Err(Error::CurveMismatch);
        }
        let (a, b) = (source.quiver()?, target.quiver()?);
        let mode = &source.mode;
        let branch_maps: Vec<Matrix> = branch_maps.iter().zip(&b.branches).map(|(m, r)| r.shape.reduce(m, mode)).collect();
        let point_maps: Vec<Matrix> = point_maps.iter().zip(&b.points).map(|(m, p)| p.p.shape.reduce(m, mode)).collect();
        check_quiver_map(&a, &b, &branch_maps, &point_maps)?;
        Ok(HeartMorphism { source: source.clone(), target: target.clone(), branch_maps, point_maps })
    }

    /// From branch maps, point chain maps `Φ_x` and homotopies `h_x : M_x^1 → T'^0`
    /// with `g Φ_x − Ψ(Φ) f = d h + h d`.
    pub fn from_raw(
        source: &HeartObject,
        target: &HeartObject,
        branch_maps: Vec<Matrix>,
        point_maps: Vec<ChainMap>,
        homotopies: Vec<Matrix>,
    ) -> Result<Self> {
        let mode = &source.mode;
        let (ts, tt) = (source.targets()?, target.targets()?);
        for x in 0..ts.len() {
            let (m, n) = (&source.point_complexes[x], &target.point_complexes[x]);
            let (f, g) = (&source.boundary_maps[x], &target.boundary_maps[x]);
            point_maps[x].check(m, n)?;
            let p = psi(&source.curve, x, &branch_maps);
            let h = &homotopies[x];
            let lhs0 = g.f0.mul(&point_maps[x].f0, mode).sub(&p.mul(&f.f0, mode), mode);
            let lhs1 = g.f1.mul(&point_maps[x].f1, mode).sub(&p.mul(&f.f1, mode), mode);
            let ok0 = tt[x].c0.maps_equal(&lhs0, &h.mul(&m.d, mode), mode);
            let ok1 = tt[x].c1.maps_equal(&lhs1, &tt[x].d.mul(h, mode), mode);
            if !ok0 || !ok1 {
                return Err(Error::InvalidObject("homotopy does not witness the square".into()));
            }
        }
        let (qa, qb) = (source.quiver()?, target.quiver()?);
        let mut psis = Vec::new();
        for x in 0..ts.len() {
            let p = psi(&source.curve, x, &branch_maps);
            psis.push(raw_to_normal(source, target, x, &point_maps[x], &homotopies[x], &p, &qa, &qb)?);
        }
        HeartMorphism::new(source, target, branch_maps, psis)
    }

    pub fn identity(o: &HeartObject) -> Result<Self> {
        let q = o.quiver()?;
        let b = q.branches.iter().map(|r| Matrix::identity(r.dim())).collect();
        let p = q.points.iter().map(|p| Matrix::identity(p.p.dim())).collect();
        HeartMorphism::new(o, o, b, p)
    }

    pub fn zero(a: &HeartObject, b: &HeartObject) -> Result<Self> {
        let (qa, qb) = (a.quiver()?, b.quiver()?);
        let br = qa.branches.iter().zip(&qb.branches).map(|(x, y)| Matrix::zeros(y.dim(), x.dim())).collect();
        let pt = qa.points.iter().zip(&qb.points).map(|(x, y)| Matrix::zeros(y.p.dim(), x.p.dim())).collect();
        HeartMorphism::new(a, b, br, pt)
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &HeartMorphism) -> Result<HeartMorphism> {
        if first.target != self.source {
            return Err(Error::InvalidObject("morphisms are not composable".into()));
        }
        let mode = &self.source.mode;
        let b = self.branch_maps.iter().zip(&first.branch_maps).map(|(g, f)| g.mul(f, mode)).collect();
        let p = self.point_maps.iter().zip(&first.point_maps).map(|(g, f)| g.mul(f, mode)).collect();
        HeartMorphism::new(&first.source, &self.target, b, p)
    }

    pub fn add(&self, other: &HeartMorphism) -> Result<HeartMorphism> {
        let mode = &self.source.mode;
        let b = self.branch_maps.iter().zip(&other.branch_maps).map(|(x, y)| x.add(y, mode)).collect();
        let p = self.point_maps.iter().zip(&other.point_maps).map(|(x, y)| x.add(y, mode)).collect();
        HeartMorphism::new(&self.source, &self.target, b, p)
    }

    pub fn scale(&self, s: &Scalar) -> Result<HeartMorphism> {
        let mode = &self.source.mode;
        let b = self.branch_maps.iter().map(|x| x.scale(s, mode)).collect();
        let p = self.point_maps.iter().map(|x| x.scale(s, mode)).collect();
        HeartMorphism::new(&self.source, &self.target, b, p)
    }

    pub fn is_zero(&self) -> bool {
        let (qa, qb) = match (self.source.quiver(), self.target.quiver()) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return false,
        };
        let mode = &self.source.mode;
        self.branch_maps.iter().zip(&qb.branches).all(|(m, r)| r.shape.is_zero_map(m, mode))
            && self.point_maps.iter().zip(&qb.points).all(|(m, p)| p.p.shape.is_zero_map(m, mode))
            && qa.points.len() == qb.points.len()
    }

    pub fn is_isomorphism(&self) -> bool {
        let (qa, qb) = match (self.source.quiver(), self.target.quiver()) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return false,
        };
        let mode = &self.source.mode;
        let branch_ok = self.branch_maps.iter().zip(qa.branches.iter().zip(&qb.branches)).all(|(m, (ra, rb))| {
            ra.shape == rb.shape && module_inverse(m, &ra.shape, mode).is_some()
        });
        let point_ok = self
            .point_maps
            .iter()
            .zip(qa.points.iter().zip(&qb.points))
            .all(|(m, (pa, pb))| pa.p.shape == pb.p.shape && module_inverse(m, &pa.p.shape, mode).is_some());
        if branch_ok && point_ok {
            return true;
        }
        // shapes may be presented differently; fall back to kernel and cokernel
        let k = kernel_componentwise(self).map(|(k, _)| k.is_zero().unwrap_or(false));
        let c = cokernel_componentwise(self).map(|(c, _)| c.is_zero().unwrap_or(false));
        matches!((k, c), (Ok(true), Ok(true)))
    }
}

#[allow(clippy::too_many_arguments)]
fn raw_to_normal(
    source: &HeartObject,
    target: &HeartObject,
    x: usize,
    phi: &ChainMap,
    h: &Matrix,
    p0: &Matrix,
    qa: &Quiver,
    qb: &Quiver,
) -> Result<Matrix> {
    let mode = &source.mode;
    let (m, n) = (&source.point_complexes[x], &target.point_complexes[x]);
    let (ta, tb) = (&qa.targets[x], &qb.targets[x]);
    // [Φ1 0; −h Ψ0(Φ)] between the pushout ambients
    let big = Matrix::block_diag(&[phi.f1.clone(), p0.clone()]);
    let mut big = big;
    big.set_block(n.c1.len(), 0, &h.neg(mode));
    let (sec_a, proj_b) = (pushout_section(m, ta, &source.boundary_maps[x], &qa.points[x], mode)?, pushout_projection(n, tb, &target.boundary_maps[x], mode));
    Ok(qb.points[x].p.shape.reduce(&proj_b.mul(&big, mode).mul(&sec_a, mode), mode))
}

/// Normal form coordinates to pushout ambient coordinates.
fn pushout_section(m: &TwoTermComplex, t: &TwoTermComplex, f: &ChainMap, pd: &PointDatum, mode: &CoeffMode) -> Result<Matrix> {
    if m.c0 == t.c0 && f.f0 == Matrix::identity(t.c0.len()) {
        // P = M^1 sits as the first summand
        let _ = pd;
        return Ok(Matrix::identity(m.c1.len()).vstack(&Matrix::zeros(t.c0.len(), m.c1.len())));
    }
    let amb = Shape::sum(&[&m.c1, &t.c0]);
    Ok(quotient(&amb, &m.d.vstack(&f.f0.neg(mode)), mode).section)
}

/// Pushout ambient coordinates to normal form coordinates.
fn pushout_projection(n: &TwoTermComplex, t: &TwoTermComplex, g: &ChainMap, mode: &CoeffMode) -> Matrix {
    if n.c0 == t.c0 && g.f0 == Matrix::identity(t.c0.len()) {
        // [m1, p] ↦ m1 + d p
        return Matrix::identity(n.c1.len()).hstack(&n.d);
    }
    let amb = Shape::sum(&[&n.c1, &t.c0]);
    quotient(&amb, &n.d.vstack(&g.f0.neg(mode)), mode).proj
}

// ---------- Hom ----------

#[derive(Clone, Debug)]
pub struct HomModule {
    pub module: crate::linalg::CanonicalModule,
    pub basis: Vec<HeartMorphism>,
    pub solution: Solution,
}

impl HomModule {
    /// Coordinates of a morphism in the generators of the solution module.
    pub fn coords(&self, f: &HeartMorphism) -> Option<Matrix> {
        let mode = &f.source.mode;
        let mut maps = f.branch_maps.clone();
        maps.extend(f.point_maps.iter().cloned());
        let v = Matrix::column_vector(self.solution.encode(&maps, mode));
        self.solution.module.coords(&v, mode)
    }

    pub fn shape(&self) -> &Shape {
        &self.solution.module.shape
    }
}

pub fn hom_module(m: &HeartObject, n: &HeartObject) -> Result<HomModule> {
    if m.curve != n.curve {
        return Err(Error::CurveMismatch);
    }
    if m.mode != n.mode {
        return Err(Error::UnsupportedMode("objects over different rings".into()));
    }
    let mode = &m.mode;
    let (a, b) = (m.quiver()?, n.quiver()?);
    let mut sys = LinearSystem::new(mode);
    let bv: Vec<usize> = a.branches.iter().zip(&b.branches).map(|(ra, rb)| sys.var(&ra.shape, &rb.shape)).collect();
    let pv: Vec<usize> = a.points.iter().zip(&b.points).map(|(pa, pb)| sys.var(&pa.p.shape, &pb.p.shape)).collect();
    for (k, (ra, rb)) in a.branches.iter().zip(&b.branches).enumerate() {
        for (ga, gb) in ra.action.iter().zip(&rb.action) {
            sys.equation(
                &ra.shape,
                &rb.shape,
                vec![
                    LinearSystem::term(bv[k], gb.clone(), Matrix::identity(ra.dim())),
                    LinearSystem::term(bv[k], Matrix::identity(rb.dim()).neg(mode), ga.clone()),
                ],
            );
        }
    }
    let (da, db) = (a.dims(), b.dims());
    for x in 0..a.points.len() {
        let (pa, pb) = (&a.points[x], &b.points[x]);
        let (ta, tb) = (&a.targets[x], &b.targets[x]);
        for (ga, gb) in pa.p.action.iter().zip(&pb.p.action) {
            sys.equation(
                &pa.p.shape,
                &pb.p.shape,
                vec![
                    LinearSystem::term(pv[x], gb.clone(), Matrix::identity(pa.p.dim())),
                    LinearSystem::term(pv[x], Matrix::identity(pb.p.dim()).neg(mode), ga.clone()),
                ],
            );
        }
        let blocks_a = psi_blocks(&a.curve, x, &da);
        let blocks_b = psi_blocks(&a.curve, x, &db);
        // ψ c − c' Ψ0(Φ) = 0
        let mut terms = vec![LinearSystem::term(pv[x], Matrix::identity(pb.p.dim()), pa.c.clone())];
        for ((br, oa), (_, ob)) in blocks_a.iter().zip(&blocks_b) {
            let inj = embedding(tb.c0.len(), *ob, db[*br]);
            let proj = embedding(ta.c0.len(), *oa, da[*br]).transpose();
            terms.push(LinearSystem::term(bv[*br], pb.c.mul(&inj, mode).neg(mode), proj));
        }
        sys.equation(&ta.c0, &pb.p.shape, terms);
        // v' ψ − Ψ1(Φ) v = 0
        let mut terms = vec![LinearSystem::term(pv[x], pb.v.clone(), Matrix::identity(pa.p.dim()))];
        for ((br, oa), (_, ob)) in blocks_a.iter().zip(&blocks_b) {
            let inj = embedding(tb.c1.len(), *ob, db[*br]);
            let proj = embedding(ta.c1.len(), *oa, da[*br]).transpose();
            terms.push(LinearSystem::term(bv[*br], inj.neg(mode), proj.mul(&pa.v, mode)));
        }
        sys.equation(&pa.p.shape, &tb.c1, terms);
    }
    let sol = sys.solve();
    let nb = a.branches.len();
    let mut basis = Vec::new();
    for k in 0..sol.len() {
        let maps = sol.basis_maps(k, mode);
        let (br, pt) = maps.split_at(nb);
        basis.push(HeartMorphism { source: m.clone(), target: n.clone(), branch_maps: br.to_vec(), point_maps: pt.to_vec() });
    }
    Ok(HomModule { module: sol.canonical(mode), basis, solution: sol })
}

/// Matrix of `Hom(T, f) : Hom(T, A) → Hom(T, B)` in solution coordinates.
pub fn postcompose_matrix(f: &HeartMorphism, from: &HomModule, to: &HomModule) -> Result<Matrix> {
    let mut cols = Vec::new();
    for b in &from.basis {
        let g = f.compose(b)?;
        cols.push(to.coords(&g).ok_or_else(|| Error::InvalidObject("composite is not in the Hom module".into()))?.column(0));
    }
    Ok(crate::linalg::from_columns(to.shape().len(), &cols))
}

/// Matrix of `Hom(f, T) : Hom(B, T) → Hom(A, T)` in solution coordinates.
pub fn precompose_matrix(f: &HeartMorphism, from: &HomModule, to: &HomModule) -> Result<Matrix> {
    let mut cols = Vec::new();
    for b in &from.basis {
        let g = b.compose(f)?;
        cols.push(to.coords(&g).ok_or_else(|| Error::InvalidObject("composite is not in the Hom module".into()))?.column(0));
    }
    Ok(crate::linalg::from_columns(to.shape().len(), &cols))
}

/// Whether two objects are isomorphic, by searching the Hom module with a fixed seed.
pub fn is_isomorphic(a: &HeartObject, b: &HeartObject) -> Result<bool> {
    let (qa, qb) = (a.quiver()?, b.quiver()?);
    let len = |q: &Quiver| -> (Vec<u64>, Vec<u64>) {
        (q.branches.iter().map(|r| r.shape.length()).collect(), q.points.iter().map(|p| p.p.shape.length()).collect())
    };
    if len(&qa) != len(&qb) {
        return Ok(false);
    }
    let h = hom_module(a, b)?;
    if h.basis.is_empty() {
        return Ok(qa.is_zero() && qb.is_zero());
    }
    let mode = &a.mode;
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    for attempt in 0..24 {
        let mut f = HeartMorphism::zero(a, b)?;
        for (i, g) in h.basis.iter().enumerate() {
            let c: i64 = if attempt == 0 { i64::from(i == 0) } else { rng.gen_range(-4..=4) };
            f = f.add(&g.scale(&mode.from_i64(c))?)?;
        }
        if f.is_isomorphism() {
            return Ok(true);
        }
    }
    Ok(false)
}

// ---------- abelian structure on normal forms ----------

/// Subobject cut out by invariant generators per branch and per point.
pub fn sub_quiver(q: &Quiver, branch_gens: &[Matrix], point_gens: &[Matrix]) -> Result<(Quiver, Vec<Matrix>, Vec<Matrix>)> {
    let mode = &q.mode;
    let mut branches = Vec::new();
    let mut incs = Vec::new();
    for (r, g) in q.branches.iter().zip(branch_gens) {
        let (s, inc) = subrep(r, g)?;
        branches.push(s);
        incs.push(inc);
    }
    let targets = targets_of(&q.curve, &branches)?;
    let mut points = Vec::new();
    let mut pincs = Vec::new();
    for x in 0..q.points.len() {
        let pd = &q.points[x];
        let (ps, pinc) = subrep(&pd.p, &point_gens[x])?;
        let sub = submodule(&pinc, &pd.p.shape, mode);
        let i0 = psi(&q.curve, x, &incs);
        let c = sub
            .coords(&pd.c.mul(&i0, mode), mode)
            .ok_or_else(|| Error::InvalidObject("c does not map into the point subobject".into()))?;
        let v = coords_along(&i0, &targets[x].c1, &q.targets[x].c1, &pd.v.mul(&pinc, mode), mode)
            .ok_or_else(|| Error::InvalidObject("v does not map into the branch subobject".into()))?;
        points.push(PointDatum { p: ps, c, v });
        pincs.push(pinc);
    }
    let out = Quiver { curve: q.curve.clone(), mode: mode.clone(), branches, targets, points };
    out.validate()?;
    Ok((out, incs, pincs))
}

/// Quotient by invariant generators per branch and per point.
pub fn quotient_quiver(q: &Quiver, branch_gens: &[Matrix], point_gens: &[Matrix]) -> Result<(Quiver, Vec<Matrix>, Vec<Matrix>)> {
    let mode = &q.mode;
    let mut branches = Vec::new();
    let mut projs = Vec::new();
    let mut secs = Vec::new();
    for (r, g) in q.branches.iter().zip(branch_gens) {
        let (s, p, sec) = quotient_rep(r, g)?;
        branches.push(s);
        projs.push(p);
        secs.push(sec);
    }
    let targets = targets_of(&q.curve, &branches)?;
    let mut points = Vec::new();
    let mut pprojs = Vec::new();
    for x in 0..q.points.len() {
        let pd = &q.points[x];
        let (ps, pp, psec) = quotient_rep(&pd.p, &point_gens[x])?;
        let s0 = psi(&q.curve, x, &secs);
        let p1 = psi(&q.curve, x, &projs);
        let c = ps.shape.reduce(&pp.mul(&pd.c, mode).mul(&s0, mode), mode);
        let v = targets[x].c1.reduce(&p1.mul(&pd.v, mode).mul(&psec, mode), mode);
        points.push(PointDatum { p: ps, c, v });
        pprojs.push(pp);
    }
    let out = Quiver { curve: q.curve.clone(), mode: mode.clone(), branches, targets, points };
    out.validate()?;
    Ok((out, projs, pprojs))
}

/// Kernel computed componentwise on normal forms, with its inclusion.
pub fn kernel_componentwise(f: &HeartMorphism) -> Result<(HeartObject, HeartMorphism)> {
    let mode = &f.source.mode;
    let (a, b) = (f.source.quiver()?, f.target.quiver()?);
    let bg: Vec<Matrix> =
        a.branches.iter().zip(&b.branches).zip(&f.branch_maps).map(|((ra, rb), m)| map_kernel(m, &ra.shape, &rb.shape, mode).basis).collect();
    let pg: Vec<Matrix> =
        a.points.iter().zip(&b.points).zip(&f.point_maps).map(|((pa, pb), m)| map_kernel(m, &pa.p.shape, &pb.p.shape, mode).basis).collect();
    let (k, bi, pi) = sub_quiver(&a, &bg, &pg)?;
    let ko = k.to_object();
    let inc = HeartMorphism::new(&ko, &f.source, bi, pi)?;
    Ok((ko, inc))
}

/// Cokernel computed componentwise on normal forms, with its projection.
pub fn cokernel_componentwise(f: &HeartMorphism) -> Result<(HeartObject, HeartMorphism)> {
    let mode = &f.source.mode;
    let b = f.target.quiver()?;
    let bg: Vec<Matrix> = b.branches.iter().zip(&f.branch_maps).map(|(rb, m)| map_image(m, &rb.shape, mode).basis).collect();
    let pg: Vec<Matrix> = b.points.iter().zip(&f.point_maps).map(|(pb, m)| map_image(m, &pb.p.shape, mode).basis).collect();
    let (c, bp, pp) = quotient_quiver(&b, &bg, &pg)?;
    let co = c.to_object();
    let proj = HeartMorphism::new(&f.target, &co, bp, pp)?;
    Ok((co, proj))
}

/// Image as a subobject of the target.
pub fn image_componentwise(f: &HeartMorphism) -> Result<(HeartObject, HeartMorphism)> {
    let mode = &f.source.mode;
    let b = f.target.quiver()?;
    let bg: Vec<Matrix> = b.branches.iter().zip(&f.branch_maps).map(|(rb, m)| map_image(m, &rb.shape, mode).basis).collect();
    let pg: Vec<Matrix> = b.points.iter().zip(&f.point_maps).map(|(pb, m)| map_image(m, &pb.p.shape, mode).basis).collect();
    let (i, bi, pi) = sub_quiver(&b, &bg, &pg)?;
    let io = i.to_object();
    let inc = HeartMorphism::new(&io, &f.target, bi, pi)?;
    Ok((io, inc))
}

// ---------- localization sequence ----------

#[derive(Clone, Debug)]
pub struct LocalizationSequence {
    /// `i_* H^0(i^* M)`, `j_! j^* M`, `M`, `i_* H^1(i^* M)`.
    pub objects: [HeartObject; 4],
    pub maps: [HeartMorphism; 3],
    pub exact: bool,
    pub failures: Vec<String>,
}

/// Skyscraper sum `⊕_x i_* V_x` written directly as a normal form.
pub(crate) fn skyscrapers(curve: &CurvePresentation, mode: &CoeffMode, vs: Vec<Representation>) -> Result<HeartObject> {
    let branches: Vec<Representation> = curve.branches.iter().map(|b| Representation::zero(mode, &b.group)).collect();
    let points = vs
        .into_iter()
        .map(|v| {
            let n = v.dim();
            PointDatum { p: v, c: Matrix::zeros(n, 0), v: Matrix::zeros(0, n) }
        })
        .collect();
    Ok(Quiver::new(curve, mode, branches, points)?.to_object())
}

fn exact_at(f: &Matrix, g: &Matrix, mid: &Shape, next: &Shape, mode: &CoeffMode) -> bool {
    let im = map_image(f, mid, mode);
    let ker = map_kernel(g, mid, next, mode);
    im.same_as(&ker, mode)
}

/// Checks exactness of composable morphisms at every component.
pub fn exact_sequence_failures(maps: &[&HeartMorphism]) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    let mode = &maps[0].source.mode;
    let mut qs = vec![maps[0].source.quiver()?];
    for m in maps {
        qs.push(m.target.quiver()?);
    }
    let nb = qs[0].branches.len();
    let np = qs[0].points.len();
    let zero = |rows: usize, cols: usize| Matrix::zeros(rows, cols);
    // pad with zero maps at both ends
    for k in 0..=maps.len() {
        for b in 0..nb {
            let mid = &qs[k].branches[b].shape;
            let f = if k == 0 { zero(mid.len(), 0) } else { maps[k - 1].branch_maps[b].clone() };
            let (g, next) = if k == maps.len() { (zero(0, mid.len()), Shape::zero()) } else { (maps[k].branch_maps[b].clone(), qs[k + 1].branches[b].shape.clone()) };
            if !exact_at(&f, &g, mid, &next, mode) {
                failures.push(format!("branch {b} at term {k}"));
            }
        }
        for x in 0..np {
            let mid = &qs[k].points[x].p.shape;
            let f = if k == 0 { zero(mid.len(), 0) } else { maps[k - 1].point_maps[x].clone() };
            let (g, next) = if k == maps.len() { (zero(0, mid.len()), Shape::zero()) } else { (maps[k].point_maps[x].clone(), qs[k + 1].points[x].p.shape.clone()) };
            if !exact_at(&f, &g, mid, &next, mode) {
                failures.push(format!("point {x} at term {k}"));
            }
        }
    }
    Ok(failures)
}

pub fn localization_sequence(o: &HeartObject) -> Result<LocalizationSequence> {
    let mode = &o.mode;
    let q = o.quiver()?;
    let mut kers = Vec::new();
    let mut cokers = Vec::new();
    let mut kincs = Vec::new();
    let mut cprojs = Vec::new();
    for (pd, t) in q.points.iter().zip(&q.targets) {
        let k = map_kernel(&pd.c, &t.c0, &pd.p.shape, mode);
        let tr = t.level(0);
        let (kr, kinc) = subrep(&tr, &k.basis)?;
        kers.push(kr);
        kincs.push(kinc);
        let (cr, cproj, _) = quotient_rep(&pd.p, &pd.c)?;
        cokers.push(cr);
        cprojs.push(cproj);
    }
    let a = skyscrapers(&o.curve, mode, kers)?;
    let b = j_shriek(&o.curve, o.branch_reps.clone())?;
    let d = skyscrapers(&o.curve, mode, cokers)?;
    let qb = b.quiver()?;
    let nb = o.branch_reps.len();
    let zb = |r: &Representation, s: &Representation| Matrix::zeros(s.dim(), r.dim());
    let zero_branches = |from: &HeartObject, to: &HeartObject| -> Vec<Matrix> {
        from.branch_reps.iter().zip(&to.branch_reps).map(|(r, s)| zb(r, s)).collect()
    };
    // i_* ker c → j_!: the inclusion into Ψ0, carried to j_!'s normal form
    let to_jb: Vec<Matrix> = qb
        .points
        .iter()
        .zip(&kincs)
        .map(|(pd, inc)| pd.p.shape.reduce(&pd.c.mul(inc, mode), mode))
        .collect();
    let m1 = HeartMorphism::new(&a, &b, zero_branches(&a, &b), to_jb)?;
    // j_! → M: identity on branches, and the normal form of j_! mapped through c
    let mut jb_to_m = Vec::new();
    for ((pb, pm), t) in qb.points.iter().zip(&q.points).zip(&qb.targets) {
        // c_{j!} : Ψ0 → P_{j!} is invertible; ψ = c ∘ c_{j!}^{-1}
        let inv = coords_along(&pb.c, &t.c0, &pb.p.shape, &Matrix::identity(pb.p.dim()), mode)
            .ok_or_else(|| Error::InvalidObject("extension by zero has a non-invertible normal form".into()))?;
        jb_to_m.push(pm.p.shape.reduce(&pm.c.mul(&inv, mode), mode));
    }
    let m2 = HeartMorphism::new(&b, o, (0..nb).map(|k| Matrix::identity(o.branch_reps[k].dim())).collect(), jb_to_m)?;
    let m3 = HeartMorphism::new(o, &d, zero_branches(o, &d), cprojs)?;
    let failures = exact_sequence_failures(&[&m1, &m2, &m3])?;
    Ok(LocalizationSequence { exact: failures.is_empty(), failures, objects: [a, b, o.clone(), d], maps: [m1, m2, m3] })
}

// ---------- simplicity and length ----------

fn skyscraper_factors(curve: &CurvePresentation, mode: &CoeffMode, x: usize, v: &Representation, seed: u64) -> Result<Vec<HeartObject>> {
    let mut out = Vec::new();
    for s in composition_series_seeded(v, seed)? {
        let mut vs: Vec<Representation> = (0..curve.points.len())
            .map(|y| Representation::zero(mode, &curve.residual_group(y)).with_q(curve.residue_q(y)))
            .collect();
        vs[x] = s;
        out.push(skyscrapers(curve, mode, vs)?);
    }
    Ok(out)
}

trait WithQ {
    fn with_q(self, q: Option<u64>) -> Self;
}

impl WithQ for Representation {
    fn with_q(mut self, q: Option<u64>) -> Self {
        self.frobenius_weight_base = q;
        self
    }
}

fn quiver_factors(q: &Quiver, seed: u64) -> Result<Vec<HeartObject>> {
    let mode = &q.mode;
    let nb = q.branches.len();
    let zb: Vec<Matrix> = q.branches.iter().map(|r| Matrix::zeros(r.dim(), 0)).collect();
    let full_b: Vec<Matrix> = q.branches.iter().map(|r| Matrix::identity(r.dim())).collect();
    let zp: Vec<Matrix> = q.points.iter().map(|p| Matrix::zeros(p.p.dim(), 0)).collect();
    // skyscraper subobjects inside ker v
    for (x, (pd, t)) in q.points.iter().zip(&q.targets).enumerate() {
        let k = map_kernel(&pd.v, &pd.p.shape, &t.c1, mode);
        if !k.is_empty() {
            let mut pg = zp.clone();
            pg[x] = k.basis.clone();
            let (s, _, _) = sub_quiver(q, &zb, &pg)?;
            let (r, _, _) = quotient_quiver(q, &zb, &pg)?;
            let mut out = skyscraper_factors(&q.curve, mode, x, &s.points[x].p, seed)?;
            out.extend(quiver_factors(&r, seed)?);
            return Ok(out);
        }
    }
    // skyscraper quotients beyond the image of c
    for (x, pd) in q.points.iter().enumerate() {
        let im = map_image(&pd.c, &pd.p.shape, mode);
        if !im.same_as(&submodule(&Matrix::identity(pd.p.dim()), &pd.p.shape, mode), mode) {
            let pg: Vec<Matrix> = q
                .points
                .iter()
                .enumerate()
                .map(|(y, p)| if y == x { p.c.clone() } else { Matrix::identity(p.p.dim()) })
                .collect();
            let (s, _, _) = sub_quiver(q, &full_b, &pg)?;
            let (r, _, _) = quotient_quiver(q, &full_b, &pg)?;
            let mut out = quiver_factors(&s, seed)?;
            out.extend(skyscraper_factors(&q.curve, mode, x, &r.points[x].p, seed)?);
            return Ok(out);
        }
    }
    // now c is onto and v is injective: split along branch subrepresentations
    let nonzero: Vec<usize> = (0..nb).filter(|&b| !q.branches[b].is_zero()).collect();
    if nonzero.is_empty() {
        return Ok(vec![]);
    }
    let pick = if nonzero.len() > 1 {
        let b = nonzero[0];
        Some((b, Matrix::identity(q.branches[b].dim())))
    } else {
        let b = nonzero[0];
        find_invariant_subspace(&q.branches[b], seed)?.map(|s| (b, s))
    };
    let Some((b, s)) = pick else { return Ok(vec![q.to_object()]) };
    let mut bg = zb.clone();
    bg[b] = s;
    let (_, incs, _) = {
        // branch part only, for Ψ0 of the inclusion
        let mut tmp = Vec::new();
        let mut incs = Vec::new();
        for (r, g) in q.branches.iter().zip(&bg) {
            let (sr, inc) = subrep(r, g)?;
            tmp.push(sr);
            incs.push(inc);
        }
        (tmp, incs, ())
    };
    let pg: Vec<Matrix> = (0..q.points.len()).map(|x| q.points[x].c.mul(&psi(&q.curve, x, &incs), mode)).collect();
    let (s, _, _) = sub_quiver(q, &bg, &pg)?;
    let (r, _, _) = quotient_quiver(q, &bg, &pg)?;
    let mut out = quiver_factors(&s, seed)?;
    out.extend(quiver_factors(&r, seed)?);
    Ok(out)
}

/// Simple subquotients of a composition series.
pub fn composition_factors(o: &HeartObject) -> Result<Vec<HeartObject>> {
    composition_factors_seeded(o, DEFAULT_SEED)
}

pub fn composition_factors_seeded(o: &HeartObject, seed: u64) -> Result<Vec<HeartObject>> {
    quiver_factors(&o.quiver()?, seed)
}

pub fn length(o: &HeartObject) -> Result<usize> {
    Ok(composition_factors(o)?.len())
}

pub fn is_simple(o: &HeartObject) -> Result<bool> {
    Ok(length(o)? == 1)
}

/// Restricted residual representation on the level used by a weight check.
pub fn point_h0(o: &HeartObject, x: usize) -> Representation {
    h0(&o.point_complexes[x])
}
