//! Representations of presented groups on finitely generated modules.

use std::collections::{HashSet, VecDeque};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{invert_perm, GroupHom, GroupKind, GroupPresentation, Word};
use crate::linalg::{int, kernel_generators, smith, CanonicalModule, CoeffMode, Matrix, Scalar};
use crate::module::{map_image, quotient, submodule, LinearSystem, Shape};
use crate::poly::{charpoly, eval_matrix, factor_over};

/// Seed used by randomized spinning unless a caller supplies one.
pub const DEFAULT_SEED: u64 = 0;
const MEATAXE_TRIES: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub mode: CoeffMode,
    pub group: GroupPresentation,
    pub shape: Shape,
    pub action: Vec<Matrix>,
    pub frobenius_weight_base: Option<u64>,
}

/// Inverse of an automorphism of a module, if it is one.
pub fn module_inverse(a: &Matrix, shape: &Shape, mode: &CoeffMode) -> Option<Matrix> {
    let n = shape.len();
    if a.rows() != n || a.cols() != n {
        return None;
    }
    let aug = a.hstack(&shape.relations(mode));
    let s = smith(&aug, mode);
    let x = crate::linalg::solve_with(&s, 2 * n, &Matrix::identity(n), mode)?;
    let inv = shape.reduce(&x.block(0, 0, n, n), mode);
    let back = shape.reduce(&inv.mul(a, mode), mode);
    if shape.maps_equal(&back, &Matrix::identity(n), mode) && shape.accepts(shape, &inv, mode) {
        Some(inv)
    } else {
        None
    }
}

impl Representation {
    pub fn new(
        mode: &CoeffMode,
        group: &GroupPresentation,
        shape: Shape,
        action: Vec<Matrix>,
        frobenius_weight_base: Option<u64>,
    ) -> Result<Self> {
        let r = Representation {
            mode: mode.clone(),
            group: group.clone(),
            action: action.iter().map(|m| shape.reduce(m, mode)).collect(),
            shape,
            frobenius_weight_base,
        };
        r.validate()?;
        Ok(r)
    }

    /// Representation on a free module.
    pub fn free(mode: &CoeffMode, group: &GroupPresentation, action: Vec<Matrix>) -> Result<Self> {
        let n = action.first().map_or(0, |m| m.rows());
        Self::new(mode, group, Shape::free(n, mode), action, None)
    }

    pub fn trivial(mode: &CoeffMode, group: &GroupPresentation, dim: usize) -> Self {
        let action = vec![Matrix::identity(dim); group.generator_count()];
        Representation { mode: mode.clone(), group: group.clone(), shape: Shape::free(dim, mode), action, frobenius_weight_base: None }
    }

    pub fn zero(mode: &CoeffMode, group: &GroupPresentation) -> Self {
        Self::trivial(mode, group, 0)
    }

    pub fn with_weight_base(mut self, q: u64) -> Self {
        self.frobenius_weight_base = Some(q);
        self
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn is_zero(&self) -> bool {
        self.shape.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let mode = &self.mode;
        self.shape.validate(mode)?;
        if self.action.len() != self.group.generator_count() {
            return Err(Error::ShapeError(format!(
                "{} action matrices for {} generators",
                self.action.len(),
                self.group.generator_count()
            )));
        }
        for (i, a) in self.action.iter().enumerate() {
            a.validate(mode)?;
            self.shape.check_map(&self.shape, a, mode)?;
            if module_inverse(a, &self.shape, mode).is_none() {
                return Err(Error::InvalidObject(format!("action of generator {} is not invertible", i + 1)));
            }
        }
        self.check_relations()
    }

    fn check_relations(&self) -> Result<()> {
        let mode = &self.mode;
        match &self.group.kind {
            GroupKind::LocalTame { q } => {
                let (t, f) = (&self.action[0], &self.action[1]);
                let lhs = f.mul(t, mode);
                let rhs = t.pow(*q, mode).mul(f, mode);
                if !self.shape.maps_equal(&lhs, &rhs, mode) {
                    return Err(Error::NotAHomomorphism(format!("F t F^-1 = t^{q} fails")));
                }
            }
            GroupKind::FiniteExplicit { generators, .. } => {
                for e in self.group.elements() {
                    let we = self.eval_word(&e.word);
                    for (k, g) in generators.iter().enumerate() {
                        let next: Vec<usize> = e.perm.iter().map(|&i| g[i]).collect();
                        let idx = self.group.element_index(&next).expect("closed under generators");
                        let lhs = we.mul(&self.action[k], mode);
                        let rhs = self.eval_word(&self.group.elements()[idx].word);
                        if !self.shape.maps_equal(&lhs, &rhs, mode) {
                            return Err(Error::NotAHomomorphism(format!(
                                "relation through generator {} fails at element {:?}",
                                k + 1,
                                e.perm
                            )));
                        }
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn inverse_of(&self, i: usize) -> Matrix {
        module_inverse(&self.action[i], &self.shape, &self.mode).expect("validated automorphism")
    }

    pub fn eval_word(&self, w: &[i32]) -> Matrix {
        let mut m = Matrix::identity(self.dim());
        for &g in w {
            let i = (g.unsigned_abs() - 1) as usize;
            let step = if g > 0 { self.action[i].clone() } else { self.inverse_of(i) };
            m = m.mul(&step, &self.mode);
        }
        self.shape.reduce(&m, &self.mode)
    }

    /// Generator matrices, with `g_∞` appended when the group has one.
    pub fn marked_matrices(&self) -> Vec<Matrix> {
        let mut out = self.action.clone();
        if let Some(w) = self.group.infinity_word() {
            out.push(self.eval_word(&w));
        }
        out
    }

    /// Frobenius matrix when the group has a Frobenius generator.
    pub fn frobenius(&self) -> Option<&Matrix> {
        self.group.frobenius_index().map(|i| &self.action[i])
    }

    pub fn direct_sum(&self, other: &Representation) -> Result<Representation> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        let action = self.action.iter().zip(&other.action).map(|(a, b)| Matrix::block_diag(&[a.clone(), b.clone()])).collect();
        Ok(Representation {
            mode: self.mode.clone(),
            group: self.group.clone(),
            shape: Shape::sum(&[&self.shape, &other.shape]),
            action,
            frobenius_weight_base: self.frobenius_weight_base.or(other.frobenius_weight_base),
        })
    }

    /// Conjugates the action by an invertible change of basis (free modules).
    pub fn conjugate(&self, p: &Matrix) -> Result<Representation> {
        let pinv = p.inverse(&self.mode).ok_or_else(|| Error::InvalidObject("change of basis is singular".into()))?;
        let action = self.action.iter().map(|a| pinv.mul(a, &self.mode).mul(p, &self.mode)).collect();
        Representation::new(&self.mode, &self.group, self.shape.clone(), action, self.frobenius_weight_base)
    }

    pub fn canonical(&self) -> CanonicalModule {
        self.shape.canonical(&self.mode)
    }
}

/// An equivariant map between representations of the same group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepMorphism {
    pub source: Representation,
    pub target: Representation,
    pub matrix: Matrix,
}

pub fn is_equivariant(m: &Matrix, a: &Representation, b: &Representation) -> bool {
    let mode = &a.mode;
    b.shape.accepts(&a.shape, m, mode)
        && a.action.iter().zip(&b.action).all(|(ga, gb)| b.shape.maps_equal(&m.mul(ga, mode), &gb.mul(m, mode), mode))
}

impl RepMorphism {
    pub fn new(source: &Representation, target: &Representation, matrix: Matrix) -> Result<Self> {
        if source.group != target.group {
            return Err(Error::GroupMismatch);
        }
        let matrix = target.shape.reduce(&matrix, &source.mode);
        if !is_equivariant(&matrix, source, target) {
            return Err(Error::InvalidObject("matrix does not intertwine the actions".into()));
        }
        Ok(RepMorphism { source: source.clone(), target: target.clone(), matrix })
    }
}

/// Pulls a representation back along a homomorphism into its group.
pub fn restrict(r: &Representation, source_group: &GroupPresentation, hom: &GroupHom) -> Result<Representation> {
    if hom.images.len() != source_group.generator_count() {
        return Err(Error::NotAHomomorphism(format!(
            "{} images for {} generators",
            hom.images.len(),
            source_group.generator_count()
        )));
    }
    for w in &hom.images {
        r.group.check_word(w)?;
    }
    let action = hom.images.iter().map(|w| r.eval_word(w)).collect();
    let out = Representation {
        mode: r.mode.clone(),
        group: source_group.clone(),
        shape: r.shape.clone(),
        action,
        frobenius_weight_base: r.frobenius_weight_base,
    };
    out.check_relations()?;
    Ok(out)
}

/// Finite-index inclusions along which induction is supported.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Induction {
    /// `Ẑ → Ẑ`, `n ↦ d·n`.
    ZhatIndex(usize),
    /// A subgroup of a finite explicit group with left coset representatives.
    Cosets { group: GroupPresentation, coset_reps: Vec<Word> },
}

/// Block companion: block `i` goes to block `i+1`, the last block to the first through `a`.
pub fn companion(a: &Matrix, d: usize) -> Matrix {
    let n = a.rows();
    let mut m = Matrix::zeros(n * d, n * d);
    for i in 0..d.saturating_sub(1) {
        m.set_block((i + 1) * n, i * n, &Matrix::identity(n));
    }
    m.set_block(0, (d - 1) * n, a);
    m
}

/// `d` diagonal copies of a map; the induced map of `f` along index `d`.
pub fn repeat_block(f: &Matrix, d: usize) -> Matrix {
    Matrix::block_diag(&vec![f.clone(); d])
}

pub fn induce(r: &Representation, along: &Induction) -> Result<Representation> {
    let mode = &r.mode;
    match along {
        Induction::ZhatIndex(d) => {
            if *d == 0 {
                return Err(Error::UnsupportedInduction("index 0 is not finite".into()));
            }
            if r.group.kind != GroupKind::ZhatFrobenius {
                return Err(Error::UnsupportedInduction("index-d induction needs a Ẑ representation".into()));
            }
            Ok(Representation {
                mode: mode.clone(),
                group: r.group.clone(),
                shape: r.shape.repeat(*d),
                action: vec![companion(&r.action[0], *d)],
                frobenius_weight_base: r.frobenius_weight_base,
            })
        }
        Induction::Cosets { group, coset_reps } => induce_cosets(r, group, coset_reps),
    }
}

fn induce_cosets(r: &Representation, g: &GroupPresentation, reps: &[Word]) -> Result<Representation> {
    let mode = &r.mode;
    let (GroupKind::FiniteExplicit { degree, generators }, GroupKind::FiniteExplicit { degree: hd, .. }) = (&g.kind, &r.group.kind)
    else {
        return Err(Error::UnsupportedInduction("coset induction needs finite explicit groups".into()));
    };
    if degree != hd {
        return Err(Error::UnsupportedInduction("subgroup acts on a different set".into()));
    }
    let h = &r.group;
    if h.elements().iter().any(|e| g.element_index(&e.perm).is_none()) {
        return Err(Error::UnsupportedInduction("subgroup is not contained in the group".into()));
    }
    let order_g = g.order().unwrap();
    let order_h = h.order().unwrap();
    if reps.len() * order_h != order_g {
        return Err(Error::UnsupportedInduction(format!("{} cosets do not cover the group", reps.len())));
    }
    for w in reps {
        g.check_word(w)?;
    }
    let rp: Vec<Vec<usize>> = reps.iter().map(|w| g.eval_perm(w).unwrap()).collect();
    let prod = |a: &[usize], b: &[usize]| -> Vec<usize> { a.iter().map(|&i| b[i]).collect() };
    // r_j^{-1}·x in H decides the coset of x
    let coset_of = |x: &[usize]| -> Option<(usize, usize)> {
        rp.iter().enumerate().find_map(|(j, rj)| h.element_index(&prod(&invert_perm(rj), x)).map(|hi| (j, hi)))
    };
    for i in 0..rp.len() {
        match coset_of(&rp[i]) {
            Some((j, _)) if j == i => {}
            _ => return Err(Error::UnsupportedInduction("coset representatives are not distinct".into())),
        }
    }
    let n = r.dim();
    let k = rp.len();
    let mut action = Vec::new();
    for gen in generators {
        let mut m = Matrix::zeros(n * k, n * k);
        for (i, ri) in rp.iter().enumerate() {
            let (j, hi) = coset_of(&prod(gen, ri)).ok_or_else(|| Error::UnsupportedInduction("coset lookup failed".into()))?;
            let block = r.eval_word(&h.elements()[hi].word);
            m.set_block(j * n, i * n, &block);
        }
        action.push(m);
    }
    Representation::new(mode, g, r.shape.repeat(k), action, r.frobenius_weight_base)
}

/// Basis of `Hom_G(a, b)` with its module structure.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub module: CanonicalModule,
    pub basis: Vec<Matrix>,
}

pub fn intertwiner_system(a: &Representation, b: &Representation) -> LinearSystem {
    let mode = &a.mode;
    let mut sys = LinearSystem::new(mode);
    let x = sys.var(&a.shape, &b.shape);
    for (ga, gb) in a.action.iter().zip(&b.action) {
        sys.equation(
            &a.shape,
            &b.shape,
            vec![
                LinearSystem::term(x, gb.clone(), Matrix::identity(a.dim())),
                LinearSystem::term(x, Matrix::identity(b.dim()).neg(mode), ga.clone()),
            ],
        );
    }
    sys
}

pub fn hom_space(a: &Representation, b: &Representation) -> Result<HomSpace> {
    if a.group != b.group {
        return Err(Error::GroupMismatch);
    }
    if a.mode != b.mode {
        return Err(Error::UnsupportedMode("representations over different rings".into()));
    }
    let sol = intertwiner_system(a, b).solve();
    let basis = (0..sol.len()).map(|k| sol.basis_maps(k, &a.mode).remove(0)).collect();
    Ok(HomSpace { module: sol.canonical(&a.mode), basis })
}

fn require_field(mode: &CoeffMode) -> Result<()> {
    if mode.is_field() {
        Ok(())
    } else {
        Err(Error::UnsupportedMode("irreducibility over Z/ℓ^N with N > 1 is not supported".into()))
    }
}

/// Incremental echelon basis over a field.
struct Span {
    mode: CoeffMode,
    rows: Vec<(usize, Vec<Scalar>)>,
    vectors: Vec<Vec<Scalar>>,
}

impl Span {
    fn new(mode: &CoeffMode) -> Self {
        Span { mode: mode.clone(), rows: vec![], vectors: vec![] }
    }

    /// Adds `v` if independent; returns whether it was.
    fn insert(&mut self, v: &[Scalar]) -> bool {
        let mode = &self.mode;
        let mut w = v.to_vec();
        for (p, row) in &self.rows {
            if !w[*p].is_zero() {
                let f = w[*p].clone();
                for (x, y) in w.iter_mut().zip(row) {
                    *x = mode.sub(x, &mode.mul(&f, y));
                }
            }
        }
        let Some(p) = w.iter().position(|x| !x.is_zero()) else { return false };
        let inv = mode.inverse(&w[p]).unwrap();
        for x in w.iter_mut() {
            *x = mode.mul(x, &inv);
        }
        for (_, row) in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (x, y) in row.iter_mut().zip(&w) {
                    *x = mode.sub(x, &mode.mul(&f, y));
                }
            }
        }
        self.rows.push((p, w));
        self.vectors.push(v.to_vec());
        true
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn matrix(&self, n: usize) -> Matrix {
        crate::linalg::from_columns(n, &self.vectors)
    }
}

fn spin(seed: &[Scalar], gens: &[Matrix], mode: &CoeffMode) -> Span {
    let mut span = Span::new(mode);
    let mut queue = VecDeque::new();
    if span.insert(seed) {
        queue.push_back(seed.to_vec());
    }
    while let Some(v) = queue.pop_front() {
        let col = Matrix::column_vector(v);
        for g in gens {
            let w = g.mul(&col, mode).column(0);
            if span.insert(&w) {
                queue.push_back(w);
            }
        }
    }
    span
}

fn random_scalar(rng: &mut ChaCha8Rng, mode: &CoeffMode) -> Scalar {
    match mode.ell() {
        None => int(rng.gen_range(-3..=3)),
        Some(l) => int(rng.gen_range(0..l as i64)),
    }
}

/// A proper nonzero invariant subspace (columns), or `None` when irreducible.
pub fn find_invariant_subspace(r: &Representation, seed: u64) -> Result<Option<Matrix>> {
    let mode = &r.mode;
    require_field(mode)?;
    let n = r.dim();
    if n <= 1 {
        return Ok(None);
    }
    let gens = r.action.clone();
    if gens.is_empty() {
        let mut e = Matrix::zeros(n, 1);
        e[(0, 0)] = Scalar::one();
        return Ok(Some(e));
    }
    // homogeneous modules have no good splitting element; a basis vector often spins short
    for i in 0..n {
        let mut e = vec![Scalar::zero(); n];
        e[i] = Scalar::one();
        let s = spin(&e, &gens, mode);
        if s.dim() < n {
            return Ok(Some(s.matrix(n)));
        }
    }
    let gens_t: Vec<Matrix> = gens.iter().map(|g| g.transpose()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut words: Vec<Matrix> = gens.clone();
    for a in &gens {
        for b in &gens {
            words.push(a.mul(b, mode));
        }
    }
    for _ in 0..MEATAXE_TRIES {
        let mut theta = Matrix::zeros(n, n);
        for w in &words {
            theta = theta.add(&w.scale(&random_scalar(&mut rng, mode), mode), mode);
        }
        theta = theta.add(&Matrix::scalar(n, random_scalar(&mut rng, mode)), mode);
        let cp = charpoly(&theta, mode);
        let factors = factor_over(&cp, mode, rng.gen())?;
        for (p, _) in factors {
            let deg = p.len() - 1;
            let pt = eval_matrix(&p, &theta, mode)?;
            let (ker, _) = kernel_generators(&pt, mode);
            if ker.cols() != deg {
                for j in 0..ker.cols() {
                    let s = spin(&ker.column(j), &gens, mode);
                    if s.dim() < n {
                        return Ok(Some(s.matrix(n)));
                    }
                }
                continue;
            }
            let v = ker.column(0);
            let s = spin(&v, &gens, mode);
            if s.dim() < n {
                return Ok(Some(s.matrix(n)));
            }
            let pt_t = pt.transpose();
            let (kt, _) = kernel_generators(&pt_t, mode);
            let w = kt.column(0);
            let sd = spin(&w, &gens_t, mode);
            if sd.dim() < n {
                // annihilator of the invariant dual subspace
                let dual = sd.matrix(n).transpose();
                let (ann, _) = kernel_generators(&dual, mode);
                return Ok(Some(ann));
            }
            return Ok(None);
        }
    }
    Err(Error::Inconclusive(format!("no good splitting element after {MEATAXE_TRIES} tries")))
}

pub fn irreducibility_test(r: &Representation) -> Result<bool> {
    if r.dim() == 0 {
        return Ok(false);
    }
    Ok(find_invariant_subspace(r, DEFAULT_SEED)?.is_none())
}

/// Subrepresentation spanned by invariant columns, with its inclusion.
pub fn subrep(r: &Representation, gens: &Matrix) -> Result<(Representation, Matrix)> {
    let mode = &r.mode;
    let sub = submodule(gens, &r.shape, mode);
    let mut action = Vec::new();
    for g in &r.action {
        let img = g.mul(&sub.basis, mode);
        let c = sub.coords(&img, mode).ok_or_else(|| Error::InvalidObject("subspace is not invariant".into()))?;
        action.push(c);
    }
    let out = Representation {
        mode: mode.clone(),
        group: r.group.clone(),
        shape: sub.shape.clone(),
        action,
        frobenius_weight_base: r.frobenius_weight_base,
    };
    Ok((out, sub.basis))
}

/// Quotient by invariant columns, with projection and a section.
pub fn quotient_rep(r: &Representation, gens: &Matrix) -> Result<(Representation, Matrix, Matrix)> {
    let mode = &r.mode;
    let q = quotient(&r.shape, gens, mode);
    let inv = map_image(gens, &r.shape, mode);
    for g in &r.action {
        if !inv.contains(&g.mul(gens, mode), mode) {
            return Err(Error::InvalidObject("subspace is not invariant".into()));
        }
    }
    let action = r.action.iter().map(|g| q.shape.reduce(&q.proj.mul(g, mode).mul(&q.section, mode), mode)).collect();
    let out = Representation {
        mode: mode.clone(),
        group: r.group.clone(),
        shape: q.shape.clone(),
        action,
        frobenius_weight_base: r.frobenius_weight_base,
    };
    Ok((out, q.proj, q.section))
}

/// Simple subquotients of a maximal invariant filtration, bottom first.
pub fn composition_series(r: &Representation) -> Result<Vec<Representation>> {
    composition_series_seeded(r, DEFAULT_SEED)
}

pub fn composition_series_seeded(r: &Representation, seed: u64) -> Result<Vec<Representation>> {
    require_field(&r.mode)?;
    if r.dim() == 0 {
        return Ok(vec![]);
    }
    match find_invariant_subspace(r, seed)? {
        None => Ok(vec![r.clone()]),
        Some(s) => {
            let (sub, _) = subrep(r, &s)?;
            let (quot, _, _) = quotient_rep(r, &s)?;
            let mut out = composition_series_seeded(&sub, seed)?;
            out.extend(composition_series_seeded(&quot, seed)?);
            Ok(out)
        }
    }
}

/// Isomorphism of irreducible representations over a field.
pub fn irreducibles_isomorphic(a: &Representation, b: &Representation) -> Result<bool> {
    if a.dim() != b.dim() || a.group != b.group {
        return Ok(false);
    }
    let h = hom_space(a, b)?;
    Ok(h.basis.iter().any(|m| m.is_invertible(&a.mode)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiniteImage {
    Finite(usize),
    Unknown,
}

/// Order of the matrix group generated by the action, if at most `bound`.
pub fn finite_image_test(r: &Representation, order_bound: usize) -> FiniteImage {
    let mode = &r.mode;
    let id = Matrix::identity(r.dim());
    let gens = r.marked_matrices();
    let mut seen: HashSet<Matrix> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(m) = queue.pop_front() {
        for g in &gens {
            let next = r.shape.reduce(&m.mul(g, mode), mode);
            if seen.insert(next.clone()) {
                if seen.len() > order_bound {
                    return FiniteImage::Unknown;
                }
                queue.push_back(next);
            }
        }
    }
    FiniteImage::Finite(seen.len())
}

/// Random invertible matrix over a field mode (for change-of-basis tests).
pub fn random_invertible(n: usize, mode: &CoeffMode, rng: &mut impl Rng) -> Matrix {
    loop {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = mode.from_i64(rng.gen_range(-2..=2));
            }
        }
        if m.is_invertible(mode) {
            return m;
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> CoeffMode {
        CoeffMode::rational()
    }

    fn zhat_rep(vals: &[i64], n: usize) -> Representation {
        Representation::free(&q(), &GroupPresentation::zhat(), vec![Matrix::from_i64(n, n, vals, &q())]).unwrap()
    }

    #[test]
    fn restrict_examples() {
        let r = zhat_rep(&[0, -1, 1, 0], 2);
        let z = GroupPresentation::zhat();
        assert_eq!(restrict(&r, &z, &GroupHom::identity(&z)).unwrap(), r);
        let r2 = restrict(&r, &z, &GroupHom::multiply(2)).unwrap();
        assert_eq!(r2.action[0], Matrix::from_i64(2, 2, &[-1, 0, 0, -1], &q()));
        // P¹ local map: Ẑ -> free group, generator to g_1
        let free = GroupPresentation::free(2, true);
        let m = Representation::free(&q(), &free, vec![Matrix::from_i64(1, 1, &[-1], &q()), Matrix::identity(1)]).unwrap();
        let loc = restrict(&m, &z, &GroupHom { images: vec![vec![1]] }).unwrap();
        assert_eq!(loc.action[0], Matrix::from_i64(1, 1, &[-1], &q()));
    }

    #[test]
    fn induce_companion() {
        let r = zhat_rep(&[5], 1);
        let i = induce(&r, &Induction::ZhatIndex(2)).unwrap();
        assert_eq!(i.action[0], Matrix::from_i64(2, 2, &[0, 5, 1, 0], &q()));
        assert_eq!(induce(&r, &Induction::ZhatIndex(1)).unwrap(), r);
        assert!(matches!(induce(&r, &Induction::ZhatIndex(0)), Err(Error::UnsupportedInduction(_))));
    }

    #[test]
    fn coset_induction_of_trivial_is_permutation() {
        let g = GroupPresentation::cyclic(4);
        // subgroup {0, 2} generated by the square
        let h = GroupPresentation::finite(4, vec![vec![2, 3, 0, 1]]).unwrap();
        let t = Representation::trivial(&q(), &h, 1);
        let ind = induce(&t, &Induction::Cosets { group: g.clone(), coset_reps: vec![vec![], vec![1]] }).unwrap();
        assert_eq!(ind.dim(), 2);
        assert_eq!(ind.action[0], Matrix::from_i64(2, 2, &[0, 1, 1, 0], &q()));
    }

    #[test]
    fn hom_examples() {
        let c2 = GroupPresentation::cyclic(2);
        let plus = Representation::free(&q(), &c2, vec![Matrix::identity(1)]).unwrap();
        let minus = Representation::free(&q(), &c2, vec![Matrix::from_i64(1, 1, &[-1], &q())]).unwrap();
        assert!(hom_space(&plus, &minus).unwrap().module.is_zero());
        let t2 = Representation::trivial(&q(), &c2, 2);
        assert_eq!(hom_space(&t2, &plus).unwrap().module.free_rank, 2);
        let h = hom_space(&t2, &t2).unwrap();
        assert_eq!(h.module.free_rank, 4);
    }

    #[test]
    fn irreducibility_examples() {
        assert!(irreducibility_test(&zhat_rep(&[3], 1)).unwrap());
        let u = zhat_rep(&[1, 1, 0, 1], 2);
        assert!(!irreducibility_test(&u).unwrap());
        let s = find_invariant_subspace(&u, 0).unwrap().unwrap();
        assert_eq!(s.cols(), 1);
        assert!(s[(1, 0)].is_zero());
        assert!(irreducibility_test(&zhat_rep(&[0, -1, 1, 0], 2)).unwrap());
        let z9 = CoeffMode::chain_ring(3, 2).unwrap();
        let r = Representation::trivial(&z9, &GroupPresentation::zhat(), 1);
        assert!(matches!(irreducibility_test(&r), Err(Error::UnsupportedMode(_))));
    }

    #[test]
    fn composition_examples() {
        let u = zhat_rep(&[1, 1, 0, 1], 2);
        let fs = composition_series(&u).unwrap();
        assert_eq!(fs.len(), 2);
        assert!(fs.iter().all(|f| f.dim() == 1 && f.action[0] == Matrix::identity(1)));
        let f3 = CoeffMode::chain_ring(3, 1).unwrap();
        let perm = Matrix::from_i64(3, 3, &[0, 0, 1, 1, 0, 0, 0, 1, 0], &f3);
        let reg = Representation::free(&f3, &GroupPresentation::cyclic(3), vec![perm]).unwrap();
        let fs = composition_series(&reg).unwrap();
        assert_eq!(fs.len(), 3);
        assert!(fs.iter().all(|f| f.action[0] == Matrix::identity(1)));
    }

    #[test]
    fn finite_image_examples() {
        assert_eq!(finite_image_test(&zhat_rep(&[1, 0, 0, 1], 2), 100), FiniteImage::Finite(1));
        assert_eq!(finite_image_test(&zhat_rep(&[0, -1, 1, 0], 2), 100), FiniteImage::Finite(4));
        assert_eq!(finite_image_test(&zhat_rep(&[1, 1, 0, 1], 2), 100), FiniteImage::Unknown);
    }

    #[test]
    fn local_tame_relation() {
        let g = GroupPresentation::local_tame(3);
        let t = Matrix::from_i64(2, 2, &[1, 1, 0, 1], &q());
        let ok = Representation::free(&q(), &g, vec![t.clone(), Matrix::from_i64(2, 2, &[3, 0, 0, 1], &q())]);
        assert!(ok.is_ok());
        let bad = Representation::free(&q(), &g, vec![t, Matrix::identity(2)]);
        assert!(matches!(bad, Err(Error::NotAHomomorphism(_))));
    }
}
