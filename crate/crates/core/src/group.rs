//! Presented (pro)finite groups described by marked generators.
//!
//! Words are sequences of signed 1-based generator indices: `2` is the
//! second generator, `-2` its inverse.

use std::collections::HashMap;
use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Word = Vec<i32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupKind {
    /// Profinite completion of a free group on `m` generators. With the
    /// product relation a derived generator `g_∞ = (g_1···g_m)^{-1}` exists.
    FreeProfinite { m: usize, product_relation: bool },
    /// `Ẑ` generated by a Frobenius element.
    ZhatFrobenius,
    /// A finite permutation group on `{0, …, degree−1}`.
    FiniteExplicit { degree: usize, generators: Vec<Vec<usize>> },
    /// Tame local group: inertia `t` and Frobenius `F` with `F t F^{-1} = t^q`.
    LocalTame { q: u64 },
    /// The trivial group (no generators).
    Trivial,
}

/// One element of a finite explicit group with a word reaching it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Element {
    pub perm: Vec<usize>,
    pub word: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupPresentation {
    pub kind: GroupKind,
    pub generator_names: Vec<String>,
    elements: Vec<Element>,
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    // right action: first a, then b
    a.iter().map(|&i| b[i]).collect()
}

fn identity_perm(n: usize) -> Vec<usize> {
    (0..n).collect()
}

pub fn invert_word(w: &[i32]) -> Word {
    w.iter().rev().map(|&g| -g).collect()
}

impl GroupPresentation {
    pub fn new(kind: GroupKind) -> Result<Self> {
        let names = match &kind {
            GroupKind::FreeProfinite { m, product_relation } => {
                if *product_relation && *m == 0 {
                    return Err(Error::InvalidObject("product relation needs at least one generator".into()));
                }
                (1..=*m).map(|i| format!("g{i}")).collect()
            }
            GroupKind::ZhatFrobenius => vec!["F".to_string()],
            GroupKind::FiniteExplicit { degree, generators } => {
                for g in generators {
                    let mut seen = vec![false; *degree];
                    if g.len() != *degree || g.iter().any(|&x| x >= *degree || std::mem::replace(&mut seen[x], true)) {
                        return Err(Error::InvalidObject(format!("{g:?} is not a permutation of {degree} points")));
                    }
                }
                (1..=generators.len()).map(|i| format!("s{i}")).collect()
            }
            GroupKind::LocalTame { q } => {
                if *q < 2 {
                    return Err(Error::InvalidObject(format!("residue field size {q} is not a prime power")));
                }
                vec!["t".to_string(), "F".to_string()]
            }
            GroupKind::Trivial => vec![],
        };
        Self::with_names(kind, names)
    }

    pub fn with_names(kind: GroupKind, generator_names: Vec<String>) -> Result<Self> {
        let mut g = GroupPresentation { kind, generator_names, elements: vec![] };
        if g.generator_names.len() != g.generator_count() {
            return Err(Error::InvalidObject("generator name count mismatch".into()));
        }
        if let GroupKind::FiniteExplicit { degree, generators } = &g.kind {
            g.elements = enumerate(*degree, generators);
        }
        Ok(g)
    }

    pub fn free(m: usize, product_relation: bool) -> Self {
        Self::new(GroupKind::FreeProfinite { m, product_relation }).expect("valid free group")
    }

    pub fn zhat() -> Self {
        Self::new(GroupKind::ZhatFrobenius).unwrap()
    }

    pub fn local_tame(q: u64) -> Self {
        Self::new(GroupKind::LocalTame { q }).expect("valid tame group")
    }

    pub fn trivial() -> Self {
        Self::new(GroupKind::Trivial).unwrap()
    }

    pub fn finite(degree: usize, generators: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(GroupKind::FiniteExplicit { degree, generators })
    }

    /// Cyclic group of order `n` acting regularly.
    pub fn cyclic(n: usize) -> Self {
        Self::finite(n, vec![(0..n).map(|i| (i + 1) % n).collect()]).unwrap()
    }

    pub fn generator_count(&self) -> usize {
        match &self.kind {
            GroupKind::FreeProfinite { m, .. } => *m,
            GroupKind::ZhatFrobenius => 1,
            GroupKind::FiniteExplicit { generators, .. } => generators.len(),
            GroupKind::LocalTame { .. } => 2,
            GroupKind::Trivial => 0,
        }
    }

    /// Index of the Frobenius generator, when the group has one.
    pub fn frobenius_index(&self) -> Option<usize> {
        match &self.kind {
            GroupKind::ZhatFrobenius => Some(0),
            GroupKind::LocalTame { .. } => Some(1),
            _ => None,
        }
    }

    /// Word for `g_∞` when the product relation is present.
    pub fn infinity_word(&self) -> Option<Word> {
        match &self.kind {
            GroupKind::FreeProfinite { m, product_relation: true } => Some((1..=*m as i32).rev().map(|i| -i).collect()),
            _ => None,
        }
    }

    /// Elements with words, for finite explicit groups.
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn order(&self) -> Option<usize> {
        match &self.kind {
            GroupKind::FiniteExplicit { .. } => Some(self.elements.len()),
            GroupKind::Trivial => Some(1),
            _ => None,
        }
    }

    pub fn check_word(&self, w: &[i32]) -> Result<()> {
        let n = self.generator_count() as i32;
        if let Some(&g) = w.iter().find(|&&g| g == 0 || g.abs() > n) {
            return Err(Error::InvalidObject(format!("generator index {g} out of range 1..={n}")));
        }
        Ok(())
    }

    /// Permutation of a word in a finite explicit group.
    pub fn eval_perm(&self, w: &[i32]) -> Option<Vec<usize>> {
        let GroupKind::FiniteExplicit { degree, generators } = &self.kind else { return None };
        let mut p = identity_perm(*degree);
        for &g in w {
            let gen = &generators[(g.unsigned_abs() - 1) as usize];
            let step = if g > 0 { gen.clone() } else { invert_perm(gen) };
            p = compose(&p, &step);
        }
        Some(p)
    }

    /// Index into [`Self::elements`] of a permutation.
    pub fn element_index(&self, perm: &[usize]) -> Option<usize> {
        self.elements.iter().position(|e| e.perm == perm)
    }
}

pub fn invert_perm(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

fn enumerate(degree: usize, generators: &[Vec<usize>]) -> Vec<Element> {
    let id = identity_perm(degree);
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut elements = vec![Element { perm: id.clone(), word: vec![] }];
    index.insert(id, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (k, g) in generators.iter().enumerate() {
            let next = compose(&elements[i].perm, g);
            if !index.contains_key(&next) {
                let mut word = elements[i].word.clone();
                word.push(k as i32 + 1);
                index.insert(next.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(Element { perm: next, word });
            }
        }
    }
    elements
}

/// A homomorphism given by images of the source generators as words in the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupHom {
    pub images: Vec<Word>,
}

impl GroupHom {
    pub fn identity(g: &GroupPresentation) -> Self {
        GroupHom { images: (1..=g.generator_count() as i32).map(|i| vec![i]).collect() }
    }

    /// Ẑ → Ẑ, `n ↦ d·n`.
    pub fn multiply(d: usize) -> Self {
        GroupHom { images: vec![vec![1; d]] }
    }
}
