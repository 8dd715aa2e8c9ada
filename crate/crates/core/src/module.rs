//! Finitely generated modules presented as `⊕ R/ℓ^{e_i}`, their maps,
//! subquotients, and a solver for linear systems in unknown module maps.
//!
//! A [`Shape`] lists one exponent per generator; the top exponent
//! (`N`, or `1` over the rationals) marks a free factor. A map between
//! shapes is a matrix whose `i`-th row is read modulo `ℓ^{e_i}` of the
//! target.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kernel_generators, smith, solve_with, CanonicalModule, CoeffMode, Matrix, Scalar, Smith};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Shape {
    pub exps: Vec<u32>,
}

impl Shape {
    pub fn new(exps: Vec<u32>) -> Self {
        Shape { exps }
    }

    pub fn free(n: usize, mode: &CoeffMode) -> Self {
        Shape { exps: vec![mode.top(); n] }
    }

    pub fn zero() -> Self {
        Shape { exps: vec![] }
    }

    pub fn from_canonical(m: &CanonicalModule, mode: &CoeffMode) -> Self {
        let mut exps = vec![mode.top(); m.free_rank];
        exps.extend(&m.torsion_exponents);
        Shape { exps }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn is_free(&self, mode: &CoeffMode) -> bool {
        self.exps.iter().all(|&e| e == mode.top())
    }

    pub fn validate(&self, mode: &CoeffMode) -> Result<()> {
        if self.exps.iter().any(|&e| e == 0 || e > mode.top()) {
            return Err(Error::InvalidCoefficient(format!("module exponents {:?} out of range", self.exps)));
        }
        Ok(())
    }

    pub fn sum(parts: &[&Shape]) -> Shape {
        Shape { exps: parts.iter().flat_map(|s| s.exps.iter().copied()).collect() }
    }

    pub fn repeat(&self, k: usize) -> Shape {
        let mut exps = Vec::with_capacity(self.len() * k);
        for _ in 0..k {
            exps.extend(&self.exps);
        }
        Shape { exps }
    }

    /// Diagonal relation matrix `diag(ℓ^{e_i})`.
    pub fn relations(&self, mode: &CoeffMode) -> Matrix {
        let mut d = Matrix::zeros(self.len(), self.len());
        for (i, &e) in self.exps.iter().enumerate() {
            d[(i, i)] = mode.ell_pow(e);
        }
        d
    }

    pub fn canonical(&self, mode: &CoeffMode) -> CanonicalModule {
        CanonicalModule::from_exponents(&self.exps, mode)
    }

    /// `log_ℓ |M|` over a chain ring, dimension over a field.
    pub fn length(&self) -> u64 {
        self.exps.iter().map(|&e| e as u64).sum()
    }

    /// Reduces each row of `m` modulo the matching exponent.
    pub fn reduce(&self, m: &Matrix, mode: &CoeffMode) -> Matrix {
        let mut out = m.clone();
        if let CoeffMode::ChainRing(_) = mode {
            for i in 0..m.rows() {
                let e = self.exps[i];
                if e >= mode.top() {
                    continue;
                }
                for j in 0..m.cols() {
                    out[(i, j)] = mode.reduce_mod_power(&m[(i, j)], e);
                }
            }
        }
        out
    }

    /// True when `self` (as target) receives `m` as a well-defined map from `src`.
    pub fn accepts(&self, src: &Shape, m: &Matrix, mode: &CoeffMode) -> bool {
        if m.rows() != self.len() || m.cols() != src.len() {
            return false;
        }
        if let CoeffMode::RationalField = mode {
            return true;
        }
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let prod = mode.mul(&m[(i, j)], &mode.ell_pow(src.exps[j]));
                if !mode.reduce_mod_power(&prod, self.exps[i]).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn check_map(&self, src: &Shape, m: &Matrix, mode: &CoeffMode) -> Result<()> {
        if m.rows() != self.len() || m.cols() != src.len() {
            return Err(Error::ShapeError(format!(
                "map is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                self.len(),
                src.len()
            )));
        }
        if !self.accepts(src, m, mode) {
            return Err(Error::InvalidCoefficient("map does not respect torsion".into()));
        }
        Ok(())
    }

    /// Equality of two maps into `self`.
    pub fn maps_equal(&self, a: &Matrix, b: &Matrix, mode: &CoeffMode) -> bool {
        a.rows() == b.rows() && a.cols() == b.cols() && self.reduce(&a.sub(b, mode), mode).is_zero()
    }

    pub fn is_zero_map(&self, a: &Matrix, mode: &CoeffMode) -> bool {
        self.reduce(a, mode).is_zero()
    }
}

/// A submodule of an ambient shape, with its own cyclic presentation.
#[derive(Clone, Debug)]
pub struct Sub {
    /// Generators as columns in ambient coordinates.
    pub basis: Matrix,
    pub shape: Shape,
    ambient: Shape,
    solver: Smith,
}

impl Sub {
    pub fn ambient(&self) -> &Shape {
        &self.ambient
    }

    pub fn len(&self) -> usize {
        self.shape.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shape.is_empty()
    }

    /// Coordinates of the columns of `v` (ambient) in the submodule basis.
    pub fn coords(&self, v: &Matrix, mode: &CoeffMode) -> Option<Matrix> {
        let k = self.basis.cols();
        let x = solve_with(&self.solver, k + self.ambient.len(), v, mode)?;
        Some(self.shape.reduce(&x.block(0, 0, k, v.cols()), mode))
    }

    pub fn contains(&self, v: &Matrix, mode: &CoeffMode) -> bool {
        self.coords(v, mode).is_some()
    }

    /// Containment of another submodule of the same ambient.
    pub fn contains_sub(&self, other: &Sub, mode: &CoeffMode) -> bool {
        self.contains(&other.basis, mode)
    }

    pub fn same_as(&self, other: &Sub, mode: &CoeffMode) -> bool {
        self.contains_sub(other, mode) && other.contains_sub(self, mode)
    }

    pub fn canonical(&self, mode: &CoeffMode) -> CanonicalModule {
        self.shape.canonical(mode).with_basis(self.basis.clone())
    }
}

/// The submodule of `ambient` generated by the columns of `gens`.
pub fn submodule(gens: &Matrix, ambient: &Shape, mode: &CoeffMode) -> Sub {
    let k = gens.cols();
    let gens = ambient.reduce(gens, mode);
    let d = ambient.relations(mode);
    let gd = gens.hstack(&d);
    // relations among generators: first k coordinates of ker [G | D]
    let (kg, _) = kernel_generators(&gd, mode);
    let rel = kg.block(0, 0, k, kg.cols());
    let s = smith(&rel, mode);
    let top = mode.top();
    let new_gens = gens.mul(&s.p_inv, mode);
    let mut keep = Vec::new();
    let mut exps = Vec::new();
    for i in 0..k {
        let e = if i < s.rank { s.diag[i] } else { top };
        if e == 0 {
            continue;
        }
        keep.push(i);
        exps.push(e.min(top));
    }
    let basis = ambient.reduce(&new_gens.columns(&keep), mode);
    let shape = Shape::new(exps);
    let solver = smith(&basis.hstack(&d), mode);
    Sub { basis, shape, ambient: ambient.clone(), solver }
}

/// Quotient of an ambient shape by a submodule given by generators.
#[derive(Clone, Debug)]
pub struct Quot {
    pub shape: Shape,
    /// Ambient coordinates to quotient coordinates.
    pub proj: Matrix,
    /// A set-theoretic section: quotient generators in ambient coordinates.
    pub section: Matrix,
}

pub fn quotient(ambient: &Shape, gens: &Matrix, mode: &CoeffMode) -> Quot {
    let n = ambient.len();
    let rel = gens.hstack(&ambient.relations(mode));
    let s = smith(&rel, mode);
    let top = mode.top();
    let mut keep = Vec::new();
    let mut exps = Vec::new();
    for i in 0..n {
        let e = if i < s.rank { s.diag[i] } else { top };
        if e == 0 {
            continue;
        }
        keep.push(i);
        exps.push(e);
    }
    let shape = Shape::new(exps);
    let proj = shape.reduce(&s.p.select_rows(&keep), mode);
    let section = ambient.reduce(&s.p_inv.columns(&keep), mode);
    Quot { shape, proj, section }
}

/// Kernel of `m : src -> tgt`.
pub fn map_kernel(m: &Matrix, src: &Shape, tgt: &Shape, mode: &CoeffMode) -> Sub {
    let aug = m.hstack(&tgt.relations(mode));
    let (kg, _) = kernel_generators(&aug, mode);
    let gens = kg.block(0, 0, src.len(), kg.cols());
    submodule(&gens, src, mode)
}

pub fn map_image(m: &Matrix, tgt: &Shape, mode: &CoeffMode) -> Sub {
    submodule(m, tgt, mode)
}

pub fn map_cokernel(m: &Matrix, tgt: &Shape, mode: &CoeffMode) -> Quot {
    quotient(tgt, m, mode)
}

/// `ker(d_out) / im(d_in)` inside a middle shape.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub shape: Shape,
    pub cycles: Sub,
    quot: Quot,
    /// Generators of the subquotient in ambient coordinates.
    pub section: Matrix,
}

impl Subquotient {
    /// Class of each column of `v`, which must consist of cycles.
    pub fn project(&self, v: &Matrix, mode: &CoeffMode) -> Option<Matrix> {
        let z = self.cycles.coords(v, mode)?;
        Some(self.shape.reduce(&self.quot.proj.mul(&z, mode), mode))
    }
}

pub fn subquotient(d_in: &Matrix, d_out: &Matrix, mid: &Shape, next: &Shape, mode: &CoeffMode) -> Subquotient {
    let z = map_kernel(d_out, mid, next, mode);
    let b = z.coords(d_in, mode).expect("boundaries are cycles");
    let q = quotient(&z.shape, &b, mode);
    let section = mid.reduce(&z.basis.mul(&q.section, mode), mode);
    Subquotient { shape: q.shape.clone(), cycles: z, quot: q, section }
}

/// Parametrization of `Hom(src, tgt)` as a diagonal module.
///
/// The entry `(i, j)` of a map is `ℓ^{s_ij}·y_ij` with
/// `s_ij = max(0, e'_i − e_j)` and `y_ij` read modulo `ℓ^{min(e_j, e'_i)}`.
#[derive(Clone, Debug)]
pub struct HomParam {
    pub src: Shape,
    pub tgt: Shape,
    pub shape: Shape,
    shifts: Vec<u32>,
}

impl HomParam {
    pub fn new(src: &Shape, tgt: &Shape) -> Self {
        let mut exps = Vec::with_capacity(src.len() * tgt.len());
        let mut shifts = Vec::with_capacity(src.len() * tgt.len());
        for &ei in &tgt.exps {
            for &ej in &src.exps {
                exps.push(ei.min(ej));
                shifts.push(ei.saturating_sub(ej));
            }
        }
        HomParam { src: src.clone(), tgt: tgt.clone(), shape: Shape::new(exps), shifts }
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn to_matrix(&self, coords: &[Scalar], mode: &CoeffMode) -> Matrix {
        let c = self.src.len();
        let mut m = Matrix::zeros(self.tgt.len(), c);
        for (k, y) in coords.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let (i, j) = (k / c, k % c);
            m[(i, j)] = mode.mul(y, &mode.ell_pow(self.shifts[k]));
        }
        self.tgt.reduce(&m, mode)
    }

    pub fn to_coords(&self, m: &Matrix, mode: &CoeffMode) -> Vec<Scalar> {
        let c = self.src.len();
        let m = self.tgt.reduce(m, mode);
        (0..self.dim())
            .map(|k| {
                let (i, j) = (k / c, k % c);
                let y = mode.divide(&m[(i, j)], &mode.ell_pow(self.shifts[k])).expect("compatible map");
                mode.reduce_mod_power(&y, self.shape.exps[k])
            })
            .collect()
    }

    fn basis_element(&self, k: usize, mode: &CoeffMode) -> (usize, usize, Scalar) {
        let c = self.src.len();
        (k / c, k % c, mode.ell_pow(self.shifts[k]))
    }
}

/// One summand `left · X_var · right` of a linear equation.
#[derive(Clone, Debug)]
pub struct Term {
    pub var: usize,
    pub left: Matrix,
    pub right: Matrix,
}

#[derive(Clone, Debug)]
struct Equation {
    param: HomParam,
    terms: Vec<Term>,
}

/// Homogeneous linear system whose unknowns are module maps.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    mode: CoeffMode,
    vars: Vec<HomParam>,
    eqs: Vec<Equation>,
}

/// Solutions of a [`LinearSystem`].
#[derive(Clone, Debug)]
pub struct Solution {
    pub module: Sub,
    vars: Vec<HomParam>,
    offsets: Vec<usize>,
}

impl LinearSystem {
    pub fn new(mode: &CoeffMode) -> Self {
        LinearSystem { mode: mode.clone(), vars: vec![], eqs: vec![] }
    }

    /// Adds an unknown map `src -> tgt`; returns its index.
    pub fn var(&mut self, src: &Shape, tgt: &Shape) -> usize {
        self.vars.push(HomParam::new(src, tgt));
        self.vars.len() - 1
    }

    /// Adds the equation `Σ left·X·right = 0` as maps `src -> tgt`.
    pub fn equation(&mut self, src: &Shape, tgt: &Shape, terms: Vec<Term>) {
        self.eqs.push(Equation { param: HomParam::new(src, tgt), terms });
    }

    /// Shortcut for `left·X_a − X_b·right = 0` style intertwining constraints.
    pub fn term(var: usize, left: Matrix, right: Matrix) -> Term {
        Term { var, left, right }
    }

    pub fn solve(&self) -> Solution {
        let mode = &self.mode;
        let mut offsets = Vec::new();
        let mut total = 0;
        for v in &self.vars {
            offsets.push(total);
            total += v.dim();
        }
        let var_shape = Shape::sum(&self.vars.iter().map(|v| &v.shape).collect::<Vec<_>>());
        let eq_shape = Shape::sum(&self.eqs.iter().map(|e| &e.param.shape).collect::<Vec<_>>());
        let mut big = Matrix::zeros(eq_shape.len(), total);
        let mut row0 = 0;
        for eq in &self.eqs {
            let (er, ec) = (eq.param.tgt.len(), eq.param.src.len());
            for (vi, var) in self.vars.iter().enumerate() {
                let terms: Vec<&Term> = eq.terms.iter().filter(|t| t.var == vi).collect();
                if terms.is_empty() {
                    continue;
                }
                for k in 0..var.dim() {
                    let (i, j, s) = var.basis_element(k, mode);
                    if s.is_zero() {
                        continue;
                    }
                    let mut val = Matrix::zeros(er, ec);
                    for t in &terms {
                        // left[:, i] * s * right[j, :]
                        for a in 0..er {
                            let l = &t.left[(a, i)];
                            if l.is_zero() {
                                continue;
                            }
                            let ls = mode.mul(l, &s);
                            for b in 0..ec {
                                let r = &t.right[(j, b)];
                                if r.is_zero() {
                                    continue;
                                }
                                val[(a, b)] = mode.add(&val[(a, b)], &mode.mul(&ls, r));
                            }
                        }
                    }
                    let coords = eq.param.to_coords(&val, mode);
                    for (r, y) in coords.into_iter().enumerate() {
                        big[(row0 + r, offsets[vi] + k)] = y;
                    }
                }
            }
            row0 += eq.param.dim();
        }
        let module = map_kernel(&big, &var_shape, &eq_shape, mode);
        Solution { module, vars: self.vars.clone(), offsets }
    }
}

impl Solution {
    pub fn len(&self) -> usize {
        self.module.len()
    }

    pub fn is_empty(&self) -> bool {
        self.module.is_empty()
    }

    /// The maps making up the `k`-th basis solution.
    pub fn basis_maps(&self, k: usize, mode: &CoeffMode) -> Vec<Matrix> {
        self.decode(&self.module.basis.column(k), mode)
    }

    pub fn decode(&self, coords: &[Scalar], mode: &CoeffMode) -> Vec<Matrix> {
        self.vars
            .iter()
            .zip(&self.offsets)
            .map(|(v, &o)| v.to_matrix(&coords[o..o + v.dim()], mode))
            .collect()
    }

    pub fn encode(&self, maps: &[Matrix], mode: &CoeffMode) -> Vec<Scalar> {
        let mut out = Vec::new();
        for (v, m) in self.vars.iter().zip(maps) {
            out.extend(v.to_coords(m, mode));
        }
        out
    }

    /// Whether the given maps form a solution in the computed module.
    pub fn contains(&self, maps: &[Matrix], mode: &CoeffMode) -> bool {
        let v = Matrix::column_vector(self.encode(maps, mode));
        self.module.contains(&v, mode)
    }

    pub fn canonical(&self, mode: &CoeffMode) -> CanonicalModule {
        self.module.shape.canonical(mode)
    }
}
