//! Seeded generators shared by integration tests.
#![allow(dead_code)]

use perverse_core::curve::{preset, CurvePresentation};
use perverse_core::group::GroupKind;
use perverse_core::heart::{
    hom_module, i_star, intermediate_extension, j_shriek, j_star, psi, HeartMorphism, HeartObject, PointDatum, Quiver,
};
use perverse_core::linalg::{CoeffMode, Matrix};
use perverse_core::rep::{hom_space, random_invertible, Representation};
use perverse_core::Result;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PRESETS: [&str; 4] = ["p1", "spec_zp", "node", "sqrt5"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Q` and `Z/ℓ^N` for `ℓ ∈ {2,3,5}`, `N ≤ 3`.
pub fn all_modes() -> Vec<CoeffMode> {
    let mut v = vec![CoeffMode::rational()];
    for ell in [2, 3, 5] {
        for n in 1..=3 {
            v.push(CoeffMode::chain_ring(ell, n).unwrap());
        }
    }
    v
}

pub fn curve(name: &str) -> CurvePresentation {
    preset(name).unwrap()
}

/// Modes whose `ℓ` is invertible at every closed point of `c`.
pub fn modes_for(c: &CurvePresentation) -> Vec<CoeffMode> {
    all_modes()
        .into_iter()
        .filter(|m| (0..c.points.len()).all(|x| match (m.ell(), c.residue_q(x)) {
            (Some(ell), Some(q)) => q % ell != 0,
            _ => true,
        }))
        .collect()
}

fn signed_permutation(n: usize, mode: &CoeffMode, rng: &mut impl Rng) -> Matrix {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut m = Matrix::zeros(n, n);
    for (j, &i) in perm.iter().enumerate() {
        m[(i, j)] = mode.from_i64(if rng.gen_bool(0.5) { 1 } else { -1 });
    }
    m
}

fn diag(vals: &[i64], mode: &CoeffMode) -> Matrix {
    let n = vals.len();
    let mut m = Matrix::zeros(n, n);
    for (i, v) in vals.iter().enumerate() {
        m[(i, i)] = mode.from_i64(*v);
    }
    m
}

fn conjugate_all(gens: Vec<Matrix>, mode: &CoeffMode, rng: &mut impl Rng) -> Vec<Matrix> {
    let n = gens.first().map(|g| g.rows()).unwrap_or(0);
    if n == 0 {
        return gens;
    }
    let p = random_invertible(n, mode, rng);
    let pinv = p.inverse(mode).unwrap();
    gens.iter().map(|g| pinv.mul(g, mode).mul(&p, mode)).collect()
}

/// A finite-image representation of a branch group of dimension `n`.
pub fn random_branch_rep(c: &CurvePresentation, b: usize, mode: &CoeffMode, n: usize, rng: &mut impl Rng) -> Representation {
    let group = &c.branches[b].group;
    if n == 0 {
        return Representation::zero(mode, group);
    }
    let (gens, base) = match &group.kind {
        GroupKind::LocalTame { q } => {
            // t with t^q = t, and F commuting with t
            let t = if q % 2 == 1 { diag(&(0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect::<Vec<_>>(), mode) } else { Matrix::identity(n) };
            let f = diag(&(0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect::<Vec<_>>(), mode);
            (vec![t, f], Some(*q))
        }
        _ => ((0..group.generator_count()).map(|_| signed_permutation(n, mode, rng)).collect(), None),
    };
    let gens = conjugate_all(gens, mode, rng);
    let r = Representation::free(mode, group, gens).unwrap();
    match base {
        Some(q) if mode.is_field() => r.with_weight_base(q),
        _ => r,
    }
}

/// Branch data with total dimension at most `max_dim` on each branch.
pub fn random_branch_data(c: &CurvePresentation, mode: &CoeffMode, max_dim: usize, rng: &mut impl Rng) -> Vec<Representation> {
    (0..c.branches.len()).map(|b| random_branch_rep(c, b, mode, rng.gen_range(0..=max_dim), rng)).collect()
}

/// A residual representation at `x`.
pub fn random_point_rep(c: &CurvePresentation, x: usize, mode: &CoeffMode, n: usize, rng: &mut impl Rng) -> Representation {
    let group = c.residual_group(x);
    let gens = conjugate_all((0..group.generator_count()).map(|_| signed_permutation(n, mode, rng)).collect(), mode, rng);
    let r = if n == 0 { Representation::zero(mode, &group) } else { Representation::free(mode, &group, gens).unwrap() };
    match c.residue_q(x) {
        Some(q) if mode.is_field() && n > 0 => r.with_weight_base(q),
        _ => r,
    }
}

/// Simple residual representations: trivial and, with a Frobenius, the sign.
pub fn simple_point_reps(c: &CurvePresentation, x: usize, mode: &CoeffMode) -> Vec<Representation> {
    let group = c.residual_group(x);
    let with_base = |r: Representation| match c.residue_q(x) {
        Some(q) if mode.is_field() => r.with_weight_base(q),
        _ => r,
    };
    let mut v = vec![with_base(Representation::trivial(mode, &group, 1))];
    if group.generator_count() > 0 && mode.ell() != Some(2) {
        let sign = vec![Matrix::from_i64(1, 1, &[-1], mode); group.generator_count()];
        v.push(with_base(Representation::free(mode, &group, sign).unwrap()));
    }
    v
}

/// A point datum `Ψ0 ⊕ K` with `c` the inclusion and `v = [D | w]`, in a random basis.
fn random_extra_point(c: &CurvePresentation, q: &Quiver, x: usize, mode: &CoeffMode, rng: &mut impl Rng) -> PointDatum {
    let t = &q.targets[x];
    let k = random_point_rep(c, x, mode, rng.gen_range(0..=1), rng);
    let p = t.level(0).direct_sum(&k).unwrap();
    let n0 = t.c0.len();
    let mut cm = Matrix::zeros(p.dim(), n0);
    cm.set_block(0, 0, &Matrix::identity(n0));
    let mut w = Matrix::zeros(t.c1.len(), k.dim());
    for g in hom_space(&k, &t.level(1)).unwrap().basis {
        w = w.add(&g.scale(&mode.from_i64(rng.gen_range(-2..=2)), mode), mode);
    }
    let v = t.c1.reduce(&t.d.hstack(&w), mode);
    PointDatum { p, c: cm, v }
}

/// A random object: a direct sum of functor outputs and skyscrapers.
pub fn random_object(c: &CurvePresentation, mode: &CoeffMode, rng: &mut impl Rng) -> Result<HeartObject> {
    let pieces = rng.gen_range(1..=2);
    let mut o = HeartObject::zero(c, mode);
    for _ in 0..pieces {
        let piece = match rng.gen_range(0..5) {
            0 => j_shriek(c, random_branch_data(c, mode, 2, rng))?,
            1 => j_star(c, random_branch_data(c, mode, 2, rng))?,
            2 => intermediate_extension(c, random_branch_data(c, mode, 2, rng))?,
            3 => {
                let x = rng.gen_range(0..c.points.len());
                let v = random_point_rep(c, x, mode, rng.gen_range(1..=2), rng);
                i_star(c, mode, x, &v)?
            }
            _ => {
                let l = random_branch_data(c, mode, 2, rng);
                let base = j_star(c, l)?.quiver()?;
                let points = (0..c.points.len()).map(|x| random_extra_point(c, &base, x, mode, rng)).collect();
                Quiver::new(c, mode, base.branches.clone(), points)?.to_object()
            }
        };
        o = o.direct_sum(&piece)?;
    }
    Ok(o)
}

/// A random linear combination of a Hom basis.
pub fn random_morphism(a: &HeartObject, b: &HeartObject, rng: &mut impl Rng) -> Result<HeartMorphism> {
    let h = hom_module(a, b)?;
    let mut f = HeartMorphism::zero(a, b)?;
    for g in &h.basis {
        let k: i64 = rng.gen_range(-3..=3);
        f = f.add(&g.scale(&a.mode.from_i64(k))?)?;
    }
    Ok(f)
}

/// A random object together with a nonsplit-looking endomorphism or map from a second object.
pub fn random_morphism_pair(c: &CurvePresentation, mode: &CoeffMode, rng: &mut impl Rng) -> Result<HeartMorphism> {
    let a = random_object(c, mode, rng)?;
    let b = if rng.gen_bool(0.3) { a.clone() } else { random_object(c, mode, rng)? };
    random_morphism(&a, &b, rng)
}

/// The same object written in a random basis on every branch and point.
pub fn change_basis(o: &HeartObject, rng: &mut impl Rng) -> Result<HeartObject> {
    let mode = &o.mode;
    let q = o.quiver()?;
    let ps: Vec<Matrix> = q.branches.iter().map(|r| if r.shape.is_free(mode) { random_invertible(r.dim(), mode, rng) } else { Matrix::identity(r.dim()) }).collect();
    let branches: Vec<Representation> = q.branches.iter().zip(&ps).map(|(r, p)| r.conjugate(p)).collect::<Result<_>>()?;
    let pinvs: Vec<Matrix> = ps.iter().map(|p| p.inverse(mode).unwrap()).collect();
    let mut points = Vec::new();
    for (x, pd) in q.points.iter().enumerate() {
        let r = if pd.p.shape.is_free(mode) { random_invertible(pd.p.dim(), mode, rng) } else { Matrix::identity(pd.p.dim()) };
        let rinv = r.inverse(mode).unwrap();
        let p = pd.p.conjugate(&r)?;
        let psi_inv = psi(&o.curve, x, &pinvs);
        let psi_fwd = psi(&o.curve, x, &ps);
        // new basis vectors are the columns of the change matrices
        let cm = p.shape.reduce(&rinv.mul(&pd.c, mode).mul(&psi_fwd, mode), mode);
        let v = psi_inv.mul(&pd.v, mode).mul(&r, mode);
        points.push(PointDatum { p, c: cm, v });
    }
    Ok(Quiver::new(&o.curve, mode, branches, points)?.to_object())
}
