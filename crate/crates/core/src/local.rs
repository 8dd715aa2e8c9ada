//! Derived tame-inertia invariants as two-term complexes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupKind, GroupPresentation};
use crate::linalg::{CoeffMode, Matrix};
use crate::module::{map_cokernel, map_kernel, Shape};
use crate::rep::{companion, module_inverse, Representation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    TameGeometric,
    TameFrobenius { q: u64 },
}

impl ProfileKind {
    /// Group through which the local Galois group is represented.
    pub fn local_group(&self) -> GroupPresentation {
        match self {
            ProfileKind::TameGeometric => GroupPresentation::free(1, false),
            ProfileKind::TameFrobenius { q } => GroupPresentation::local_tame(*q),
        }
    }

    pub fn residual_group(&self) -> GroupPresentation {
        match self {
            ProfileKind::TameGeometric => GroupPresentation::trivial(),
            ProfileKind::TameFrobenius { .. } => GroupPresentation::zhat(),
        }
    }

    pub fn q(&self) -> Option<u64> {
        match self {
            ProfileKind::TameGeometric => None,
            ProfileKind::TameFrobenius { q } => Some(*q),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalProfile {
    pub kind: ProfileKind,
    pub inertia: Matrix,
    pub frobenius: Option<Matrix>,
}

impl LocalProfile {
    /// Profile read off a representation of the local group.
    pub fn of(kind: ProfileKind, m: &Representation) -> Result<Self> {
        let ok = match kind {
            ProfileKind::TameGeometric => m.action.len() == 1,
            ProfileKind::TameFrobenius { q } => m.group.kind == GroupKind::LocalTame { q },
        };
        if !ok {
            return Err(Error::ProfileMismatch(format!("representation group does not fit profile {kind:?}")));
        }
        Ok(LocalProfile { kind, inertia: m.action[0].clone(), frobenius: m.action.get(1).cloned() })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ProfileReport {
    pub valid: bool,
    pub failures: Vec<String>,
}

pub fn validate_profile(p: &LocalProfile, mode: &CoeffMode) -> ProfileReport {
    let mut failures = Vec::new();
    let n = p.inertia.rows();
    let shape = Shape::free(n, mode);
    if let Err(e) = p.inertia.validate(mode) {
        failures.push(format!("inertia: {e}"));
    }
    if !p.inertia.is_square() {
        failures.push("inertia matrix is not square".into());
    } else if module_inverse(&p.inertia, &shape, mode).is_none() {
        failures.push("inertia matrix is not invertible".into());
    }
    match (&p.kind, &p.frobenius) {
        (ProfileKind::TameGeometric, Some(_)) => failures.push("geometric profile carries a Frobenius".into()),
        (ProfileKind::TameFrobenius { .. }, None) => failures.push("Frobenius matrix missing".into()),
        (ProfileKind::TameFrobenius { q }, Some(f)) => {
            if f.rows() != n || f.cols() != n {
                failures.push("Frobenius has the wrong size".into());
            } else if failures.is_empty() {
                if module_inverse(f, &shape, mode).is_none() {
                    failures.push("Frobenius is not invertible".into());
                }
                let lhs = f.mul(&p.inertia, mode);
                let rhs = p.inertia.pow(*q, mode).mul(f, mode);
                if lhs != rhs {
                    failures.push(format!("F t F^-1 != t^{q}"));
                }
            }
        }
        _ => {}
    }
    ProfileReport { valid: failures.is_empty(), failures }
}

/// A complex `c0 --d--> c1` in degrees 0 and 1 with an equivariant residual action.
///
/// Weights of level 1 are read as `w(F1) + tag1 + 2·twist`; level 0 as `w(F0) + tag0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoTermComplex {
    pub mode: CoeffMode,
    pub group: GroupPresentation,
    pub c0: Shape,
    pub c1: Shape,
    pub d: Matrix,
    pub action0: Vec<Matrix>,
    pub action1: Vec<Matrix>,
    pub tag0: i64,
    pub tag1: i64,
    pub twist: i64,
    pub q: Option<u64>,
}

impl TwoTermComplex {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mode: &CoeffMode,
        group: &GroupPresentation,
        c0: Shape,
        c1: Shape,
        d: Matrix,
        action0: Vec<Matrix>,
        action1: Vec<Matrix>,
        q: Option<u64>,
    ) -> Result<Self> {
        let c = TwoTermComplex {
            mode: mode.clone(),
            group: group.clone(),
            d: c1.reduce(&d, mode),
            action0: action0.iter().map(|a| c0.reduce(a, mode)).collect(),
            action1: action1.iter().map(|a| c1.reduce(a, mode)).collect(),
            c0,
            c1,
            tag0: 0,
            tag1: 0,
            twist: 0,
            q,
        };
        c.validate()?;
        Ok(c)
    }

    /// Complex with zero differential on two representations.
    pub fn from_levels(l0: &Representation, l1: &Representation, q: Option<u64>) -> Result<Self> {
        if l0.group != l1.group {
            return Err(Error::GroupMismatch);
        }
        TwoTermComplex::new(
            &l0.mode,
            &l0.group,
            l0.shape.clone(),
            l1.shape.clone(),
            Matrix::zeros(l1.dim(), l0.dim()),
            l0.action.clone(),
            l1.action.clone(),
            q,
        )
    }

    pub fn zero(mode: &CoeffMode, group: &GroupPresentation, q: Option<u64>) -> Self {
        let k = group.generator_count();
        TwoTermComplex {
            mode: mode.clone(),
            group: group.clone(),
            c0: Shape::zero(),
            c1: Shape::zero(),
            d: Matrix::zeros(0, 0),
            action0: vec![Matrix::zeros(0, 0); k],
            action1: vec![Matrix::zeros(0, 0); k],
            tag0: 0,
            tag1: 0,
            twist: 0,
            q,
        }
    }

    pub fn with_tags(mut self, tag0: i64, tag1: i64) -> Self {
        self.tag0 = tag0;
        self.tag1 = tag1;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mode = &self.mode;
        self.c0.validate(mode)?;
        self.c1.validate(mode)?;
        self.d.validate(mode)?;
        self.c1.check_map(&self.c0, &self.d, mode)?;
        let k = self.group.generator_count();
        if self.action0.len() != k || self.action1.len() != k {
            return Err(Error::ShapeError(format!("residual action needs {k} matrices per level")));
        }
        for (a0, a1) in self.action0.iter().zip(&self.action1) {
            self.c0.check_map(&self.c0, a0, mode)?;
            self.c1.check_map(&self.c1, a1, mode)?;
            if module_inverse(a0, &self.c0, mode).is_none() || module_inverse(a1, &self.c1, mode).is_none() {
                return Err(Error::InvalidObject("residual action is not invertible".into()));
            }
            if !self.c1.maps_equal(&self.d.mul(a0, mode), &a1.mul(&self.d, mode), mode) {
                return Err(Error::InvalidObject("residual action does not commute with d".into()));
            }
        }
        Ok(())
    }

    pub fn level(&self, i: usize) -> Representation {
        let (shape, action) = if i == 0 { (&self.c0, &self.action0) } else { (&self.c1, &self.action1) };
        Representation {
            mode: self.mode.clone(),
            group: self.group.clone(),
            shape: shape.clone(),
            action: action.clone(),
            frobenius_weight_base: self.q,
        }
    }

    /// Weight added to the eigenvalue weight of level `i`.
    pub fn weight_offset(&self, i: usize) -> i64 {
        if i == 0 {
            self.tag0
        } else {
            self.tag1 + 2 * self.twist
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_empty() && self.c1.is_empty()
    }

    pub fn direct_sum(&self, other: &TwoTermComplex) -> Result<TwoTermComplex> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if !other.is_zero() && (self.weight_offset(0), self.weight_offset(1)) != (other.weight_offset(0), other.weight_offset(1)) {
            return Err(Error::InvalidObject("summands carry different weight tags".into()));
        }
        let bd = |a: &[Matrix], b: &[Matrix]| -> Vec<Matrix> {
            a.iter().zip(b).map(|(x, y)| Matrix::block_diag(&[x.clone(), y.clone()])).collect()
        };
        Ok(TwoTermComplex {
            mode: self.mode.clone(),
            group: self.group.clone(),
            c0: Shape::sum(&[&self.c0, &other.c0]),
            c1: Shape::sum(&[&self.c1, &other.c1]),
            d: Matrix::block_diag(&[self.d.clone(), other.d.clone()]),
            action0: bd(&self.action0, &other.action0),
            action1: bd(&self.action1, &other.action1),
            tag0: self.tag0,
            tag1: self.tag1,
            twist: self.twist,
            q: self.q.or(other.q),
        })
    }

    /// Induction along `×d` on `Ẑ`; trivial residual groups are repeated.
    pub fn induce(&self, d: usize, q_base: Option<u64>) -> Result<TwoTermComplex> {
        if d == 0 {
            return Err(Error::UnsupportedInduction("index 0 is not finite".into()));
        }
        let (action0, action1) = match self.group.kind {
            GroupKind::ZhatFrobenius => (vec![companion(&self.action0[0], d)], vec![companion(&self.action1[0], d)]),
            GroupKind::Trivial => (vec![], vec![]),
            _ => return Err(Error::UnsupportedInduction("residual group is not Ẑ".into())),
        };
        Ok(TwoTermComplex {
            mode: self.mode.clone(),
            group: self.group.clone(),
            c0: self.c0.repeat(d),
            c1: self.c1.repeat(d),
            d: Matrix::block_diag(&vec![self.d.clone(); d]),
            action0,
            action1,
            tag0: self.tag0,
            tag1: self.tag1,
            twist: self.twist,
            q: q_base.or(self.q),
        })
    }
}

/// `[M --(t−1)--> M]`; the level-1 Frobenius is `N_q^{-1}·F` with `N_q = Σ_{i<q} t^i`.
pub fn boundary(profile: &LocalProfile, m: &Representation) -> Result<TwoTermComplex> {
    let mode = &m.mode;
    let expected = LocalProfile::of(profile.kind, m)?;
    if expected.inertia != profile.inertia || expected.frobenius != profile.frobenius {
        return Err(Error::ProfileMismatch("profile matrices differ from the representation".into()));
    }
    let report = validate_profile(profile, mode);
    if !report.valid && m.shape.is_free(mode) {
        return Err(Error::ProfileMismatch(report.failures.join("; ")));
    }
    let n = m.dim();
    let t = &profile.inertia;
    let d = t.sub(&Matrix::identity(n), mode);
    let group = profile.kind.residual_group();
    let (action0, action1, twist) = match (&profile.kind, &profile.frobenius) {
        (ProfileKind::TameFrobenius { q }, Some(f)) => {
            let mut nq = Matrix::zeros(n, n);
            let mut p = Matrix::identity(n);
            for _ in 0..*q {
                nq = nq.add(&p, mode);
                p = m.shape.reduce(&p.mul(t, mode), mode);
            }
            let inv = module_inverse(&nq, &m.shape, mode)
                .ok_or_else(|| Error::ProfileMismatch(format!("1 + t + … + t^{} is not invertible", q - 1)))?;
            (vec![f.clone()], vec![inv.mul(f, mode)], 1)
        }
        (ProfileKind::TameFrobenius { .. }, None) => return Err(Error::ProfileMismatch("Frobenius matrix missing".into())),
        _ => (vec![], vec![], 0),
    };
    let mut c = TwoTermComplex::new(mode, &group, m.shape.clone(), m.shape.clone(), d, action0, action1, profile.kind.q())?;
    c.tag0 = 0;
    c.tag1 = 2;
    c.twist = twist;
    Ok(c)
}

/// `ker d` with the induced residual action.
pub fn h0(c: &TwoTermComplex) -> Representation {
    let mode = &c.mode;
    let k = map_kernel(&c.d, &c.c0, &c.c1, mode);
    let action = c
        .action0
        .iter()
        .map(|a| k.coords(&a.mul(&k.basis, mode), mode).expect("action preserves the kernel"))
        .collect();
    Representation { mode: mode.clone(), group: c.group.clone(), shape: k.shape.clone(), action, frobenius_weight_base: c.q }
}

/// `coker d` with the induced residual action.
pub fn h1(c: &TwoTermComplex) -> Representation {
    let mode = &c.mode;
    let q = map_cokernel(&c.d, &c.c1, mode);
    let action = c
        .action1
        .iter()
        .map(|a| q.shape.reduce(&q.proj.mul(a, mode).mul(&q.section, mode), mode))
        .collect();
    Representation { mode: mode.clone(), group: c.group.clone(), shape: q.shape.clone(), action, frobenius_weight_base: c.q }
}

/// A pair of level maps between two-term complexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub f0: Matrix,
    pub f1: Matrix,
}

impl ChainMap {
    pub fn zero(a: &TwoTermComplex, b: &TwoTermComplex) -> Self {
        ChainMap { f0: Matrix::zeros(b.c0.len(), a.c0.len()), f1: Matrix::zeros(b.c1.len(), a.c1.len()) }
    }

    pub fn identity(a: &TwoTermComplex) -> Self {
        ChainMap { f0: Matrix::identity(a.c0.len()), f1: Matrix::identity(a.c1.len()) }
    }

    pub fn compose(&self, first: &ChainMap, mode: &CoeffMode) -> ChainMap {
        ChainMap { f0: self.f0.mul(&first.f0, mode), f1: self.f1.mul(&first.f1, mode) }
    }

    pub fn check(&self, a: &TwoTermComplex, b: &TwoTermComplex) -> Result<()> {
        let mode = &a.mode;
        b.c0.check_map(&a.c0, &self.f0, mode)?;
        b.c1.check_map(&a.c1, &self.f1, mode)?;
        if !b.c1.maps_equal(&b.d.mul(&self.f0, mode), &self.f1.mul(&a.d, mode), mode) {
            return Err(Error::InvalidObject("level maps do not commute with d".into()));
        }
        for k in 0..a.action0.len() {
            let e0 = b.c0.maps_equal(&self.f0.mul(&a.action0[k], mode), &b.action0[k].mul(&self.f0, mode), mode);
            let e1 = b.c1.maps_equal(&self.f1.mul(&a.action1[k], mode), &b.action1[k].mul(&self.f1, mode), mode);
            if !e0 || !e1 {
                return Err(Error::InvalidObject("level maps are not equivariant".into()));
            }
        }
        Ok(())
    }
}

/// Map induced on `H^0`.
pub fn h0_map(f: &ChainMap, a: &TwoTermComplex, b: &TwoTermComplex) -> Matrix {
    let mode = &a.mode;
    let ka = map_kernel(&a.d, &a.c0, &a.c1, mode);
    let kb = map_kernel(&b.d, &b.c0, &b.c1, mode);
    kb.coords(&f.f0.mul(&ka.basis, mode), mode).expect("chain maps preserve cycles")
}

/// Map induced on `H^1`.
pub fn h1_map(f: &ChainMap, a: &TwoTermComplex, b: &TwoTermComplex) -> Matrix {
    let mode = &a.mode;
    let qa = map_cokernel(&a.d, &a.c1, mode);
    let qb = map_cokernel(&b.d, &b.c1, mode);
    qb.shape.reduce(&qb.proj.mul(&f.f1, mode).mul(&qa.section, mode), mode)
}
