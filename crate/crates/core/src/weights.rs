//! Frobenius weights, weight truncation at points and Artin-origin diagnostics.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{CoeffMode, Matrix, Scalar};
use crate::local::{ChainMap, TwoTermComplex};
use crate::module::{map_kernel, submodule, Shape};
use crate::poly::{
    charpoly, cyclotomic_product_test, eval_matrix, factor_rational, rational_to_string, rp_mul, IntegerPolynomial, RatPoly,
};
use crate::rep::{finite_image_test, FiniteImage, Representation};

/// Largest image enumerated before falling back to characteristic polynomials.
pub const FINITE_IMAGE_BOUND: usize = 2048;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightFactor {
    pub polynomial: String,
    #[serde(skip)]
    pub coefficients: RatPoly,
    pub multiplicity: usize,
    pub weight: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WeightVerdict {
    StronglyWeightZero,
    HasPositiveWeight,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightReport {
    pub factors: Vec<WeightFactor>,
    pub max_weight: Option<i64>,
    pub min_weight: Option<i64>,
    pub verdict: WeightVerdict,
}

/// Exponent `m` with `x = q^m`, if any.
fn log_q(x: &Scalar, q: u64) -> Option<i64> {
    let q = BigInt::from(q);
    let (n, d) = (x.numer().abs(), x.denom().clone());
    let (mut big, neg) = if d.is_one() { (n, false) } else if n.is_one() { (d, true) } else { return None };
    let mut m = 0i64;
    while !big.is_one() {
        let (quo, rem) = big.div_rem(&q);
        if !rem.is_zero() {
            return None;
        }
        big = quo;
        m += 1;
    }
    Some(if neg { -m } else { m })
}

/// Weight `w` with `|g(0)|² = q^{w·deg}`, when integral.
pub fn factor_weight(g: &[Scalar], q: u64) -> Option<i64> {
    let deg = g.len().checked_sub(1)? as i64;
    if deg == 0 || g[0].is_zero() {
        return None;
    }
    let m = log_q(&(&g[0] * &g[0]), q)?;
    (m % deg == 0).then_some(m / deg)
}

fn report(factors: Vec<WeightFactor>, cp: &[Scalar]) -> WeightReport {
    let known: Vec<i64> = factors.iter().filter_map(|f| f.weight).collect();
    let all_known = known.len() == factors.len();
    let max_weight = if all_known { known.iter().max().copied() } else { None };
    let min_weight = if all_known { known.iter().min().copied() } else { None };
    let cyclo = IntegerPolynomial::from_rational(cp).is_some_and(|p| cyclotomic_product_test(&p).unwrap_or(false));
    let verdict = if cyclo {
        WeightVerdict::StronglyWeightZero
    } else if known.iter().any(|&w| w > 0) {
        WeightVerdict::HasPositiveWeight
    } else {
        WeightVerdict::Unknown
    };
    WeightReport { factors, max_weight, min_weight, verdict }
}

/// Grading of an endomorphism by the weights of its characteristic polynomial factors.
pub fn weight_grading_matrix(f: &Matrix, q: u64, offset: i64) -> Result<WeightReport> {
    let cp = charpoly(f, &CoeffMode::rational());
    let factors = factor_rational(&cp)?
        .into_iter()
        .map(|(g, m)| WeightFactor {
            polynomial: rational_to_string(&g),
            weight: factor_weight(&g, q).map(|w| w + offset),
            coefficients: g,
            multiplicity: m,
        })
        .collect();
    Ok(report(factors, &cp))
}

fn frobenius_data(r: &Representation) -> Result<(u64, &Matrix)> {
    if r.mode != CoeffMode::rational() {
        return Err(Error::UnsupportedMode("weights are computed over the rationals".into()));
    }
    let q = r.frobenius_weight_base.ok_or_else(|| Error::WeightDataRequired("no Frobenius weight base declared".into()))?;
    let f = r.frobenius().ok_or_else(|| Error::WeightDataRequired("the group has no Frobenius generator".into()))?;
    Ok((q, f))
}

pub fn weight_grading(r: &Representation) -> Result<WeightReport> {
    let (q, f) = frobenius_data(r)?;
    weight_grading_matrix(f, q, 0)
}

/// Span of the generalized eigenspaces of weight at most `a` (columns).
fn weight_le_span(f: &Matrix, q: u64, offset: i64, a: i64) -> Result<Matrix> {
    let mode = CoeffMode::rational();
    let n = f.rows();
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let rep = weight_grading_matrix(f, q, offset)?;
    let mut prod: RatPoly = vec![Scalar::one()];
    for fac in &rep.factors {
        let w = fac.weight.ok_or_else(|| Error::WeightUndetermined(format!("factor {} has no integral weight", fac.polynomial)))?;
        if w <= a {
            for _ in 0..fac.multiplicity {
                prod = rp_mul(&prod, &fac.coefficients);
            }
        }
    }
    let m = eval_matrix(&prod, f, &mode)?;
    Ok(map_kernel(&m, &Shape::free(n, &mode), &Shape::free(n, &mode), &mode).basis)
}

/// Restricts a representation to the invariant subspace spanned by `cols`.
fn restrict_to(r: &Representation, cols: &Matrix) -> Result<(Representation, Matrix)> {
    let mode = &r.mode;
    let sub = submodule(cols, &r.shape, mode);
    let mut action = Vec::new();
    for g in &r.action {
        action.push(
            sub.coords(&g.mul(&sub.basis, mode), mode)
                .ok_or_else(|| Error::InvalidObject("weight subspace is not stable under the residual group".into()))?,
        );
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

/// Maximal subrepresentation of weight at most `a`, with its inclusion.
pub fn w_le(r: &Representation, a: i64) -> Result<(Representation, Matrix)> {
    w_le_offset(r, a, 0)
}

/// As [`w_le`] with every weight shifted by `offset`.
pub fn w_le_offset(r: &Representation, a: i64, offset: i64) -> Result<(Representation, Matrix)> {
    let (q, f) = frobenius_data(r)?;
    let span = weight_le_span(f, q, offset, a)?;
    restrict_to(r, &span)
}

/// Weight-`≤ 0` part of a tagged point complex.
///
/// A stored weight `w` piece is kept whole when both levels have total weight `≤ 0`,
/// reduced to its level-0 cycles when only level 0 does, and dropped otherwise.
pub fn omega0_point(c: &TwoTermComplex) -> Result<TwoTermComplex> {
    Ok(omega0_point_with_inclusion(c)?.0)
}

/// `omega0_point` together with its inclusion into `c`.
pub fn omega0_point_with_inclusion(c: &TwoTermComplex) -> Result<(TwoTermComplex, ChainMap)> {
    let Some(q) = c.q else { return Ok((c.clone(), ChainMap::identity(c))) };
    if c.group.frobenius_index().is_none() {
        return Ok((c.clone(), ChainMap::identity(c)));
    }
    let mode = &c.mode;
    if *mode != CoeffMode::rational() {
        return Err(Error::UnsupportedMode("weights are computed over the rationals".into()));
    }
    let (t0, t1) = (c.weight_offset(0), c.weight_offset(1));
    if t0 > t1 {
        return Err(Error::InvalidObject("level-1 weight tag is below the level-0 tag".into()));
    }
    let f0 = &c.action0[0];
    let f1 = &c.action1[0];
    let whole0 = weight_le_span(f0, q, 0, -t1)?;
    let low0 = weight_le_span(f0, q, 0, -t0)?;
    let cycles = map_kernel(&c.d, &c.c0, &c.c1, mode).basis;
    // low0 ∩ cycles from the kernel of [low0 | cycles]
    let (kk, _) = crate::linalg::kernel_generators(&low0.hstack(&cycles), mode);
    let meet = low0.mul(&kk.block(0, 0, low0.cols(), kk.cols()), mode);
    let gens0 = whole0.hstack(&meet);
    let whole1 = weight_le_span(f1, q, 0, -t1)?;
    let (l0, inc0) = restrict_to(&c.level(0), &gens0)?;
    let (l1, inc1) = restrict_to(&c.level(1), &whole1)?;
    let s1 = submodule(&inc1, &c.c1, mode);
    let d = s1
        .coords(&c.d.mul(&inc0, mode), mode)
        .ok_or_else(|| Error::InvalidObject("differential leaves the weight truncation".into()))?;
    let mut out = TwoTermComplex::new(mode, &c.group, l0.shape, l1.shape, d, l0.action, l1.action, c.q)?;
    out.tag0 = c.tag0;
    out.tag1 = c.tag1;
    out.twist = c.twist;
    Ok((out, ChainMap { f0: inc0, f1: inc1 }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NotArtinCertificate {
    /// Index of the marked generator; `g_∞` comes after the named ones.
    pub generator: usize,
    pub charpoly: String,
}

/// A marked generator whose characteristic polynomial rules out finite image.
pub fn not_artin_certificate(r: &Representation) -> Option<NotArtinCertificate> {
    if r.mode != CoeffMode::rational() {
        return None;
    }
    for (i, m) in r.marked_matrices().iter().enumerate() {
        let cp = charpoly(m, &r.mode);
        let fails = match IntegerPolynomial::from_rational(&cp) {
            None => true,
            Some(p) => !cyclotomic_product_test(&p).unwrap_or(false),
        };
        if fails {
            return Some(NotArtinCertificate { generator: i, charpoly: rational_to_string(&cp) });
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ArtinVerdict {
    ArtinCertified,
    NotArtin,
    Undetermined,
}

/// Finite image proves Artin origin; a failing characteristic polynomial disproves it.
pub fn artin_verdict(r: &Representation) -> ArtinVerdict {
    if !matches!(r.mode, CoeffMode::RationalField) {
        // GL over a finite ring is finite
        return ArtinVerdict::ArtinCertified;
    }
    if let FiniteImage::Finite(_) = finite_image_test(r, FINITE_IMAGE_BOUND) {
        return ArtinVerdict::ArtinCertified;
    }
    if not_artin_certificate(r).is_some() {
        return ArtinVerdict::NotArtin;
    }
    ArtinVerdict::Undetermined
}

/// Some `A^k` with `k ≤ 24` is unipotent; equivalent to cyclotomic characteristic polynomial for size ≤ 4.
pub fn kronecker_brute_force(m: &Matrix) -> bool {
    let mode = CoeffMode::rational();
    let n = m.rows();
    let id = Matrix::identity(n);
    let mut p = id.clone();
    for _ in 1..=24 {
        p = p.mul(m, &mode);
        if p.sub(&id, &mode).pow(n as u64, &mode).is_zero() {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupPresentation;

    fn q() -> CoeffMode {
        CoeffMode::rational()
    }

    fn frob(vals: &[i64], n: usize, base: u64) -> Representation {
        Representation::free(&q(), &GroupPresentation::zhat(), vec![Matrix::from_i64(n, n, vals, &q())]).unwrap().with_weight_base(base)
    }

    #[test]
    fn grading_examples() {
        let r = weight_grading(&frob(&[1], 1, 3)).unwrap();
        assert_eq!(r.factors.len(), 1);
        assert_eq!(r.factors[0].weight, Some(0));
        assert_eq!(r.verdict, WeightVerdict::StronglyWeightZero);
        // companion of x^2 - x + 3
        let r = weight_grading(&frob(&[0, -3, 1, 1], 2, 3)).unwrap();
        assert_eq!(r.factors[0].weight, Some(1));
        assert_eq!(r.verdict, WeightVerdict::HasPositiveWeight);
        let r = weight_grading(&frob(&[5], 1, 5)).unwrap();
        assert_eq!(r.max_weight, Some(2));
        let no_q = Representation::free(&q(), &GroupPresentation::zhat(), vec![Matrix::identity(1)]).unwrap();
        assert!(matches!(weight_grading(&no_q), Err(Error::WeightDataRequired(_))));
    }

    #[test]
    fn truncation_examples() {
        let r = frob(&[1, 0, 0, 3], 2, 3);
        let (s, inc) = w_le(&r, 0).unwrap();
        assert_eq!(s.dim(), 1);
        assert!(inc[(1, 0)].is_zero());
        assert_eq!(w_le(&r, -1).unwrap().0.dim(), 0);
        assert_eq!(w_le(&r, 2).unwrap().0.dim(), 2);
        let u = frob(&[2, 0, 0, 1], 2, 3);
        assert!(matches!(w_le(&u, 0), Err(Error::WeightUndetermined(_))));
    }

    #[test]
    fn omega0_kills_twisted_level() {
        let l = frob(&[1], 1, 3);
        let c = TwoTermComplex::from_levels(&l, &l, Some(3)).unwrap().with_tags(0, 2);
        let o = omega0_point(&c).unwrap();
        assert_eq!((o.c0.len(), o.c1.len()), (1, 0));
        assert_eq!(omega0_point(&o).unwrap(), o);
    }

    #[test]
    fn certificates() {
        assert!(not_artin_certificate(&frob(&[1], 1, 3)).is_none());
        assert!(not_artin_certificate(&frob(&[0, -3, 1, 1], 2, 3)).is_some());
        assert!(not_artin_certificate(&frob(&[0, -1, 1, 0], 2, 3)).is_none());
        assert_eq!(artin_verdict(&frob(&[0, -1, 1, 0], 2, 3)), ArtinVerdict::ArtinCertified);
        assert_eq!(artin_verdict(&frob(&[1, 1, 0, 1], 2, 3)), ArtinVerdict::Undetermined);
        assert_eq!(artin_verdict(&frob(&[2], 1, 3)), ArtinVerdict::NotArtin);
        assert!(kronecker_brute_force(&Matrix::from_i64(2, 2, &[1, 1, 0, 1], &q())));
        assert!(!kronecker_brute_force(&Matrix::from_i64(2, 2, &[1, 1, 1, 0], &q())));
    }
}
