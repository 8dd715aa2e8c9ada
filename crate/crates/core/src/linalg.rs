//! Exact linear algebra over the rationals and over the chain rings
//! `Z/ℓ^N`.
//!
//! Both coefficient modes are local principal ideal rings in which every
//! nonzero element is a unit times a power of a uniformizer (over the
//! rationals the uniformizer never appears), so one Smith-style
//! elimination with minimal-valuation pivots serves both.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Scalar = BigRational;

pub fn int(v: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(v))
}

pub fn big(v: BigInt) -> Scalar {
    BigRational::from_integer(v)
}

/// Deterministic trial-division primality check, adequate for `n < 2^31`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChainRing {
    ell: u64,
    precision: u32,
    ell_big: BigInt,
    modulus: BigInt,
}

/// The active coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CoeffMode {
    RationalField,
    ChainRing(ChainRing),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum CoeffModeDoc {
    Rational,
    ChainRing { ell: u64, precision: u32 },
}

impl Serialize for CoeffMode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CoeffMode::RationalField => CoeffModeDoc::Rational.serialize(s),
            CoeffMode::ChainRing(c) => CoeffModeDoc::ChainRing {
                ell: c.ell,
                precision: c.precision,
            }
            .serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for CoeffMode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match CoeffModeDoc::deserialize(d)? {
            CoeffModeDoc::Rational => Ok(CoeffMode::RationalField),
            CoeffModeDoc::ChainRing { ell, precision } => {
                CoeffMode::chain_ring(ell, precision).map_err(serde::de::Error::custom)
            }
        }
    }
}

impl fmt::Display for CoeffMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffMode::RationalField => write!(f, "Q"),
            CoeffMode::ChainRing(c) => write!(f, "Z/{}^{}", c.ell, c.precision),
        }
    }
}

impl CoeffMode {
    pub fn rational() -> Self {
        CoeffMode::RationalField
    }

    pub fn chain_ring(ell: u64, precision: u32) -> Result<Self> {
        if ell >= 1 << 31 || !is_prime(ell) {
            return Err(Error::InvalidCoefficient(format!("{ell} is not a prime below 2^31")));
        }
        if precision == 0 {
            return Err(Error::InvalidCoefficient("precision must be at least 1".into()));
        }
        let ell_big = BigInt::from(ell);
        let modulus = num_traits::pow(ell_big.clone(), precision as usize);
        Ok(CoeffMode::ChainRing(ChainRing { ell, precision, ell_big, modulus }))
    }

    pub fn ell(&self) -> Option<u64> {
        match self {
            CoeffMode::RationalField => None,
            CoeffMode::ChainRing(c) => Some(c.ell),
        }
    }

    pub fn precision(&self) -> Option<u32> {
        match self {
            CoeffMode::RationalField => None,
            CoeffMode::ChainRing(c) => Some(c.precision),
        }
    }

    /// True for the rationals and for `Z/ℓ`.
    pub fn is_field(&self) -> bool {
        match self {
            CoeffMode::RationalField => true,
            CoeffMode::ChainRing(c) => c.precision == 1,
        }
    }

    /// Exponent of a free cyclic factor: `N` over `Z/ℓ^N`, `1` over the rationals.
    pub fn top(&self) -> u32 {
        match self {
            CoeffMode::RationalField => 1,
            CoeffMode::ChainRing(c) => c.precision,
        }
    }

    /// Number of elements of the ring, if finite.
    pub fn order(&self) -> Option<BigInt> {
        match self {
            CoeffMode::RationalField => None,
            CoeffMode::ChainRing(c) => Some(c.modulus.clone()),
        }
    }

    fn red_int(&self, c: &ChainRing, v: &BigInt) -> Scalar {
        big(v.mod_floor(&c.modulus))
    }

    /// Canonical representative of an already-valid value.
    pub fn norm(&self, x: Scalar) -> Scalar {
        match self {
            CoeffMode::RationalField => x,
            CoeffMode::ChainRing(c) => {
                debug_assert!(x.is_integer());
                if !x.numer().is_negative() && x.numer() < &c.modulus {
                    x
                } else {
                    self.red_int(c, x.numer())
                }
            }
        }
    }

    /// Maps an arbitrary exact value into the ring. Over `Z/ℓ^N` fractions
    /// with denominator prime to `ℓ` are accepted.
    pub fn coerce(&self, x: &Scalar) -> Result<Scalar> {
        match self {
            CoeffMode::RationalField => Ok(x.clone()),
            CoeffMode::ChainRing(c) => {
                if x.is_integer() {
                    return Ok(self.red_int(c, x.numer()));
                }
                let den = self.red_int(c, x.denom());
                let inv = self
                    .inverse(&den)
                    .ok_or_else(|| Error::InvalidCoefficient(format!("{x} has denominator divisible by {}", c.ell)))?;
                Ok(self.mul(&self.red_int(c, x.numer()), &inv))
            }
        }
    }

    /// Checks that `x` is a canonical value for this mode.
    pub fn check(&self, x: &Scalar) -> Result<()> {
        if let CoeffMode::ChainRing(c) = self {
            if !x.is_integer() || x.numer().is_negative() || x.numer() >= &c.modulus {
                return Err(Error::InvalidCoefficient(format!("{x} is not a canonical residue mod {}", c.modulus)));
            }
        }
        Ok(())
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        self.norm(int(v))
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.norm(a + b)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.norm(a - b)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        if a.is_zero() || b.is_zero() {
            return Scalar::zero();
        }
        self.norm(a * b)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        self.norm(-a)
    }

    /// `None` for zero; otherwise the ℓ-adic valuation (always `0` over the rationals).
    pub fn valuation(&self, x: &Scalar) -> Option<u32> {
        if x.is_zero() {
            return None;
        }
        match self {
            CoeffMode::RationalField => Some(0),
            CoeffMode::ChainRing(c) => {
                let mut v = 0;
                let mut n = x.numer().clone();
                while n.is_multiple_of(&c.ell_big) {
                    n /= &c.ell_big;
                    v += 1;
                }
                Some(v)
            }
        }
    }

    /// `ℓ^e` reduced; `0` once `e` reaches the top exponent. Over the rationals
    /// this is `1` for `e = 0` and `0` otherwise.
    pub fn ell_pow(&self, e: u32) -> Scalar {
        match self {
            CoeffMode::RationalField => {
                if e == 0 {
                    Scalar::one()
                } else {
                    Scalar::zero()
                }
            }
            CoeffMode::ChainRing(c) => {
                if e >= c.precision {
                    Scalar::zero()
                } else {
                    big(num_traits::pow(c.ell_big.clone(), e as usize))
                }
            }
        }
    }

    pub fn is_unit(&self, x: &Scalar) -> bool {
        self.valuation(x) == Some(0)
    }

    pub fn inverse(&self, x: &Scalar) -> Option<Scalar> {
        match self {
            CoeffMode::RationalField => {
                if x.is_zero() {
                    None
                } else {
                    Some(x.recip())
                }
            }
            CoeffMode::ChainRing(c) => {
                let g = x.numer().extended_gcd(&c.modulus);
                if g.gcd.is_one() {
                    Some(self.red_int(c, &g.x))
                } else {
                    None
                }
            }
        }
    }

    /// Some `c` with `b * c = a`, if one exists.
    pub fn divide(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        if a.is_zero() {
            return Some(Scalar::zero());
        }
        match self {
            CoeffMode::RationalField => {
                if b.is_zero() {
                    None
                } else {
                    Some(a / b)
                }
            }
            CoeffMode::ChainRing(c) => {
                let vb = self.valuation(b)?;
                let va = self.valuation(a)?;
                if va < vb {
                    return None;
                }
                let p = num_traits::pow(c.ell_big.clone(), vb as usize);
                let unit = big(b.numer() / &p);
                let inv = self.inverse(&unit)?;
                Some(self.mul(&big(a.numer() / &p), &inv))
            }
        }
    }

    /// Splits a nonzero value into `(valuation, unit)` with `x = ℓ^v · unit`.
    pub fn unit_part(&self, x: &Scalar) -> Option<(u32, Scalar)> {
        let v = self.valuation(x)?;
        match self {
            CoeffMode::RationalField => Some((0, x.clone())),
            CoeffMode::ChainRing(c) => {
                let p = num_traits::pow(c.ell_big.clone(), v as usize);
                Some((v, big(x.numer() / p)))
            }
        }
    }

    /// Reduces `x` modulo `ℓ^e` to its least non-negative representative
    /// (identity over the rationals unless `e = 0`).
    pub fn reduce_mod_power(&self, x: &Scalar, e: u32) -> Scalar {
        match self {
            CoeffMode::RationalField => {
                if e == 0 {
                    Scalar::zero()
                } else {
                    x.clone()
                }
            }
            CoeffMode::ChainRing(c) => {
                if e >= c.precision {
                    return x.clone();
                }
                let p = num_traits::pow(c.ell_big.clone(), e as usize);
                big(x.numer().mod_floor(&p))
            }
        }
    }

    /// Floor division of representatives, used by Howell reduction.
    fn floor_div_power(&self, x: &Scalar, e: u32) -> Scalar {
        match self {
            CoeffMode::RationalField => Scalar::zero(),
            CoeffMode::ChainRing(c) => {
                let p = num_traits::pow(c.ell_big.clone(), e as usize);
                big(x.numer().div_floor(&p))
            }
        }
    }
}

/// Dense row-major matrix of exact values.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
        }
        write!(f, "]({}x{})", self.rows, self.cols)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeError(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn scalar(n: usize, v: Scalar) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = v.clone();
        }
        m
    }

    /// Builds a matrix from small integers, reduced into `mode`.
    pub fn from_i64(rows: usize, cols: usize, vals: &[i64], mode: &CoeffMode) -> Self {
        assert_eq!(vals.len(), rows * cols, "entry count");
        Matrix { rows, cols, data: vals.iter().map(|&v| mode.from_i64(v)).collect() }
    }

    pub fn from_rows(rows: &[Vec<Scalar>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data = rows.iter().flat_map(|row| row.iter().cloned()).collect();
        Matrix { rows: r, cols: c, data }
    }

    pub fn column_vector(v: Vec<Scalar>) -> Self {
        Matrix { rows: v.len(), cols: 1, data: v }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn validate(&self, mode: &CoeffMode) -> Result<()> {
        self.data.iter().try_for_each(|x| mode.check(x))
    }

    pub fn coerce(&self, mode: &CoeffMode) -> Result<Self> {
        let data = self.data.iter().map(|x| mode.coerce(x)).collect::<Result<_>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, idx.len());
        for (k, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                m[(i, k)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(idx.len(), self.cols);
        for (k, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m[(k, j)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self[(r0 + i, c0 + j)].clone();
            }
        }
        m
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut m = Matrix::zeros(self.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(0, self.cols, other);
        m
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut m = Matrix::zeros(self.rows + other.rows, self.cols);
        m.set_block(0, 0, self);
        m.set_block(self.rows, 0, other);
        m
    }

    pub fn block_diag(blocks: &[Matrix]) -> Matrix {
        let r = blocks.iter().map(|b| b.rows).sum();
        let c = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(r, c);
        let (mut i, mut j) = (0, 0);
        for b in blocks {
            m.set_block(i, j, b);
            i += b.rows;
            j += b.cols;
        }
        m
    }

    pub fn mul(&self, other: &Matrix, mode: &CoeffMode) -> Matrix {
        assert_eq!(self.cols, other.rows, "product shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    out.data[i * other.cols + j] += a * b;
                }
            }
        }
        out.normalize(mode);
        out
    }

    pub fn try_mul(&self, other: &Matrix, mode: &CoeffMode) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeError(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul(other, mode))
    }

    pub fn add(&self, other: &Matrix, mode: &CoeffMode) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sum shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| mode.add(a, b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix, mode: &CoeffMode) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "difference shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| mode.sub(a, b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self, mode: &CoeffMode) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| mode.neg(a)).collect() }
    }

    pub fn scale(&self, s: &Scalar, mode: &CoeffMode) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| mode.mul(a, s)).collect() }
    }

    pub fn normalize(&mut self, mode: &CoeffMode) {
        if let CoeffMode::ChainRing(_) = mode {
            for x in self.data.iter_mut() {
                *x = mode.norm(std::mem::take(x));
            }
        }
    }

    pub fn pow(&self, k: u64, mode: &CoeffMode) -> Matrix {
        let mut result = Matrix::identity(self.rows);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base, mode);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, mode);
            }
        }
        result
    }

    pub fn inverse(&self, mode: &CoeffMode) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let x = solve(self, &Matrix::identity(n), mode).ok()??;
        if self.mul(&x, mode) == Matrix::identity(n) {
            Some(x)
        } else {
            None
        }
    }

    pub fn is_invertible(&self, mode: &CoeffMode) -> bool {
        if !self.is_square() {
            return false;
        }
        let s = smith(self, mode);
        s.rank == self.rows && s.diag.iter().all(|&v| v == 0)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_dst += f * row_src
    fn add_row_multiple(&mut self, dst: usize, src: usize, f: &Scalar, mode: &CoeffMode) {
        if f.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if s.is_zero() {
                continue;
            }
            let v = mode.add(&self.data[dst * self.cols + j], &mode.mul(f, s));
            self.data[dst * self.cols + j] = v;
        }
    }

    /// col_dst += f * col_src
    fn add_col_multiple(&mut self, dst: usize, src: usize, f: &Scalar, mode: &CoeffMode) {
        if f.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + src];
            if s.is_zero() {
                continue;
            }
            let v = mode.add(&self.data[i * self.cols + dst], &mode.mul(f, s));
            self.data[i * self.cols + dst] = v;
        }
    }

    fn scale_row(&mut self, i: usize, f: &Scalar, mode: &CoeffMode) {
        for j in 0..self.cols {
            let v = mode.mul(&self.data[i * self.cols + j], f);
            self.data[i * self.cols + j] = v;
        }
    }

    fn scale_col(&mut self, j: usize, f: &Scalar, mode: &CoeffMode) {
        for i in 0..self.rows {
            let v = mode.mul(&self.data[i * self.cols + j], f);
            self.data[i * self.cols + j] = v;
        }
    }

    /// Entries as decimal strings (`p/q` for proper fractions), row-major.
    pub fn to_strings(&self) -> Vec<String> {
        self.data.iter().map(scalar_to_string).collect()
    }
}

pub fn scalar_to_string(x: &Scalar) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"n"` or `"p/q"`; fractions must be reduced with `q > 0`.
pub fn parse_scalar(s: &str) -> std::result::Result<Scalar, &'static str> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.parse().map_err(|_| "E_NUMBER")?;
        let q: BigInt = q.parse().map_err(|_| "E_NUMBER")?;
        if !q.is_positive() || !p.gcd(&q).is_one() || q.is_one() {
            return Err("E_FRACTION");
        }
        Ok(BigRational::new_raw(p, q))
    } else {
        let n: BigInt = s.parse().map_err(|_| "E_NUMBER")?;
        Ok(big(n))
    }
}

/// Result of a two-sided diagonalization `P·A·Q = D`.
///
/// `D` carries `ℓ^{diag[i]}` at `(i, i)` for `i < rank` and zeros elsewhere;
/// the exponents are non-decreasing.
#[derive(Clone, Debug)]
pub struct Smith {
    pub p: Matrix,
    pub p_inv: Matrix,
    pub q: Matrix,
    pub q_inv: Matrix,
    pub diag: Vec<u32>,
    pub rank: usize,
}

pub fn smith(a: &Matrix, mode: &CoeffMode) -> Smith {
    let (r, c) = (a.rows, a.cols);
    let mut m = a.clone();
    let mut p = Matrix::identity(r);
    let mut p_inv = Matrix::identity(r);
    let mut q = Matrix::identity(c);
    let mut q_inv = Matrix::identity(c);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < r.min(c) {
        let mut best: Option<(u32, usize, usize)> = None;
        'search: for i in t..r {
            for j in t..c {
                if let Some(v) = mode.valuation(&m[(i, j)]) {
                    if best.map_or(true, |(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                        if v == 0 {
                            break 'search;
                        }
                    }
                }
            }
        }
        let Some((v, bi, bj)) = best else { break };
        m.swap_rows(t, bi);
        p.swap_rows(t, bi);
        p_inv.swap_cols(t, bi);
        m.swap_cols(t, bj);
        q.swap_cols(t, bj);
        q_inv.swap_rows(t, bj);
        let (_, unit) = mode.unit_part(&m[(t, t)]).expect("pivot is nonzero");
        let uinv = mode.inverse(&unit).expect("unit part is invertible");
        m.scale_row(t, &uinv, mode);
        p.scale_row(t, &uinv, mode);
        p_inv.scale_col(t, &unit, mode);
        let pivot = m[(t, t)].clone();
        for i in t + 1..r {
            if m[(i, t)].is_zero() {
                continue;
            }
            let f = mode.divide(&m[(i, t)], &pivot).expect("minimal valuation pivot divides");
            let nf = mode.neg(&f);
            m.add_row_multiple(i, t, &nf, mode);
            p.add_row_multiple(i, t, &nf, mode);
            p_inv.add_col_multiple(t, i, &f, mode);
        }
        for j in t + 1..c {
            if m[(t, j)].is_zero() {
                continue;
            }
            let f = mode.divide(&m[(t, j)], &pivot).expect("minimal valuation pivot divides");
            let nf = mode.neg(&f);
            m.add_col_multiple(j, t, &nf, mode);
            q.add_col_multiple(j, t, &nf, mode);
            q_inv.add_row_multiple(t, j, &f, mode);
        }
        diag.push(v);
        t += 1;
    }
    Smith { p, p_inv, q, q_inv, rank: diag.len(), diag }
}

/// Canonical description of a finitely generated module over the active ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalModule {
    pub free_rank: usize,
    /// Exponents `e` with `1 <= e < N`, sorted non-increasing.
    pub torsion_exponents: Vec<u32>,
    #[serde(skip)]
    pub embedding_basis: Option<Matrix>,
}

impl CanonicalModule {
    pub fn zero() -> Self {
        CanonicalModule { free_rank: 0, torsion_exponents: vec![], embedding_basis: None }
    }

    /// From the exponents of a cyclic decomposition; `top` marks free factors.
    pub fn from_exponents(exps: &[u32], mode: &CoeffMode) -> Self {
        let top = mode.top();
        let free_rank = exps.iter().filter(|&&e| e >= top).count();
        let mut torsion: Vec<u32> = exps.iter().copied().filter(|&e| e > 0 && e < top).collect();
        torsion.sort_unstable_by(|a, b| b.cmp(a));
        CanonicalModule { free_rank, torsion_exponents: torsion, embedding_basis: None }
    }

    pub fn with_basis(mut self, b: Matrix) -> Self {
        self.embedding_basis = Some(b);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion_exponents.is_empty()
    }

    /// Structural equality ignoring the embedding basis.
    pub fn same_structure(&self, other: &Self) -> bool {
        self.free_rank == other.free_rank && self.torsion_exponents == other.torsion_exponents
    }

    /// `log_ℓ` of the order over `Z/ℓ^N`; dimension over the rationals.
    pub fn length(&self, mode: &CoeffMode) -> u64 {
        self.free_rank as u64 * mode.top() as u64 + self.torsion_exponents.iter().map(|&e| e as u64).sum::<u64>()
    }

    /// True when some factor reaches the precision bound, so the answer
    /// might differ with more ℓ-adic digits.
    pub fn precision_saturated(&self, mode: &CoeffMode) -> bool {
        matches!(mode, CoeffMode::ChainRing(_)) && self.free_rank > 0
    }
}

/// Generators (as columns) of the kernel of `m` acting on free column vectors.
pub fn kernel_generators(m: &Matrix, mode: &CoeffMode) -> (Matrix, Vec<u32>) {
    let s = smith(m, mode);
    let top = mode.top();
    let mut cols = Vec::new();
    let mut exps = Vec::new();
    for i in 0..m.cols {
        if i < s.rank {
            let v = s.diag[i];
            if v == 0 {
                continue;
            }
            let f = mode.ell_pow(top - v);
            cols.push(s.q.column(i).iter().map(|x| mode.mul(x, &f)).collect::<Vec<_>>());
            exps.push(v);
        } else {
            cols.push(s.q.column(i));
            exps.push(top);
        }
    }
    (from_columns(m.cols, &cols), exps)
}

pub fn from_columns(rows: usize, cols: &[Vec<Scalar>]) -> Matrix {
    let mut out = Matrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (i, v) in c.iter().enumerate() {
            out[(i, j)] = v.clone();
        }
    }
    out
}

/// Kernel of `m : R^cols -> R^rows`.
pub fn kernel(m: &Matrix, mode: &CoeffMode) -> Result<CanonicalModule> {
    m.validate(mode)?;
    let (gens, exps) = kernel_generators(m, mode);
    Ok(CanonicalModule::from_exponents(&exps, mode).with_basis(gens))
}

/// Invariant-factor decomposition of `R^rows / column span(m)`.
pub fn cokernel_presentation(m: &Matrix, mode: &CoeffMode) -> Result<CanonicalModule> {
    m.validate(mode)?;
    let s = smith(m, mode);
    let top = mode.top();
    let mut exps: Vec<u32> = s.diag.iter().copied().filter(|&v| v > 0).collect();
    exps.extend(std::iter::repeat(top).take(m.rows - s.rank));
    Ok(CanonicalModule::from_exponents(&exps, mode))
}

/// Some `x` with `m·x = rhs`, or `None`.
pub fn solve(m: &Matrix, rhs: &Matrix, mode: &CoeffMode) -> Result<Option<Matrix>> {
    if m.rows != rhs.rows {
        return Err(Error::ShapeError(format!("rhs has {} rows, matrix has {}", rhs.rows, m.rows)));
    }
    let s = smith(m, mode);
    Ok(solve_with(&s, m.cols, rhs, mode))
}

/// Solves against a precomputed diagonalization of a matrix with `cols` columns.
pub fn solve_with(s: &Smith, cols: usize, rhs: &Matrix, mode: &CoeffMode) -> Option<Matrix> {
    let c = s.p.mul(rhs, mode);
    let mut y = Matrix::zeros(cols, rhs.cols);
    for k in 0..rhs.cols {
        for i in 0..c.rows {
            let ci = &c[(i, k)];
            if i < s.rank {
                let d = mode.ell_pow(s.diag[i]);
                y[(i, k)] = mode.divide(ci, &d)?;
            } else if !ci.is_zero() {
                return None;
            }
        }
    }
    Some(s.q.mul(&y, mode))
}

/// Row-canonical form: reduced row echelon form over a field, Howell form
/// over `Z/ℓ^N`. Returns `(H, U)` with `H = U·m`.
///
/// Over `Z/ℓ^N` the Howell form may need more rows than `m` has; `H` is
/// padded with zero rows to at least `m.rows()` and `U` is square (and
/// invertible) exactly when no extra rows were needed.
pub fn canonical_form(m: &Matrix, mode: &CoeffMode) -> Result<(Matrix, Matrix)> {
    m.validate(mode)?;
    let r = m.rows;
    let c = m.cols;
    // each working row is (entries, transformation)
    let mut work: Vec<(Vec<Scalar>, Vec<Scalar>)> = (0..r)
        .map(|i| {
            let mut t = vec![Scalar::zero(); r];
            t[i] = Scalar::one();
            (m.row(i).to_vec(), t)
        })
        .collect();
    let mut done: Vec<(Vec<Scalar>, Vec<Scalar>, usize, u32)> = Vec::new();
    let top = mode.top();
    let axpy = |dst: &mut Vec<Scalar>, src: &[Scalar], f: &Scalar| {
        for (d, s) in dst.iter_mut().zip(src) {
            if !s.is_zero() {
                *d = mode.add(d, &mode.mul(f, s));
            }
        }
    };
    for col in 0..c {
        let mut best: Option<(u32, usize)> = None;
        for (k, (row, _)) in work.iter().enumerate() {
            if let Some(v) = mode.valuation(&row[col]) {
                if best.map_or(true, |(bv, _)| v < bv) {
                    best = Some((v, k));
                }
            }
        }
        let Some((v, k)) = best else { continue };
        let (mut prow, mut ptr) = work.swap_remove(k);
        let (_, unit) = mode.unit_part(&prow[col]).unwrap();
        let uinv = mode.inverse(&unit).unwrap();
        for x in prow.iter_mut().chain(ptr.iter_mut()) {
            *x = mode.mul(x, &uinv);
        }
        let pivot = prow[col].clone();
        for (row, tr) in work.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let f = mode.neg(&mode.divide(&row[col], &pivot).unwrap());
            axpy(row, &prow, &f);
            axpy(tr, &ptr, &f);
        }
        if v > 0 {
            let f = mode.ell_pow(top - v);
            let ann: Vec<Scalar> = prow.iter().map(|x| mode.mul(x, &f)).collect();
            if ann.iter().any(|x| !x.is_zero()) {
                let anntr = ptr.iter().map(|x| mode.mul(x, &f)).collect();
                work.push((ann, anntr));
            }
        }
        done.push((prow, ptr, col, v));
    }
    // reduce above pivots
    for i in 0..done.len() {
        let (col, v) = (done[i].2, done[i].3);
        let (prow, ptr) = (done[i].0.clone(), done[i].1.clone());
        for (row, tr, _, _) in done[..i].iter_mut() {
            let e = &row[col];
            if e.is_zero() {
                continue;
            }
            let f = match mode {
                CoeffMode::RationalField => e.clone(),
                _ => mode.floor_div_power(e, v),
            };
            if f.is_zero() {
                continue;
            }
            let nf = mode.neg(&f);
            axpy(row, &prow, &nf);
            axpy(tr, &ptr, &nf);
        }
    }
    let hr = done.len().max(r);
    let mut h = Matrix::zeros(hr, c);
    let mut u = Matrix::zeros(hr, r);
    for (i, (row, tr, _, _)) in done.iter().enumerate() {
        for j in 0..c {
            h[(i, j)] = row[j].clone();
        }
        for j in 0..r {
            u[(i, j)] = tr[j].clone();
        }
    }
    // zero rows of H: complete U with transformations of the leftover rows
    let mut extra = done.len();
    for (_, tr) in work.iter() {
        if extra >= hr {
            break;
        }
        for j in 0..r {
            u[(extra, j)] = tr[j].clone();
        }
        extra += 1;
    }
    Ok((h, u))
}

/// Invariant factors `d_1 | d_2 | …` of an integer matrix (length `min(rows, cols)`).
pub fn smith_form_integers(m: &Matrix) -> Result<Vec<BigInt>> {
    if m.data.iter().any(|x| !x.is_integer()) {
        return Err(Error::InvalidCoefficient("integer entries required".into()));
    }
    let (r, c) = (m.rows, m.cols);
    let mut a: Vec<Vec<BigInt>> = (0..r).map(|i| m.row(i).iter().map(|x| x.numer().clone()).collect()).collect();
    let n = r.min(c);
    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        loop {
            // pivot: smallest nonzero absolute value in the trailing block
            let mut best: Option<(BigInt, usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, x) in row.iter().enumerate().skip(t) {
                    if !x.is_zero() && best.as_ref().map_or(true, |(b, _, _)| x.abs() < *b) {
                        best = Some((x.abs(), i, j));
                    }
                }
            }
            let Some((_, bi, bj)) = best else { break };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            let pivot = a[t][t].clone();
            let mut clean = true;
            for i in t + 1..r {
                let qt = a[i][t].div_floor(&pivot);
                if !qt.is_zero() {
                    for j in t..c {
                        let v = &a[t][j] * &qt;
                        a[i][j] -= v;
                    }
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..c {
                let qt = a[t][j].div_floor(&pivot);
                if !qt.is_zero() {
                    for i in t..r {
                        let v = &a[i][t] * &qt;
                        a[i][j] -= v;
                    }
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the trailing block
            let mut bad = None;
            'outer: for i in t + 1..r {
                for j in t + 1..c {
                    if !a[i][j].is_multiple_of(&pivot) {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => {
                    for j in t..c {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        out.push(a[t][t].abs());
    }
    Ok(out)
}

/// `ℓ`-adic valuation of a nonzero integer.
pub fn int_valuation(n: &BigInt, ell: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let l = BigInt::from(ell);
    let mut v = 0;
    let mut x = n.clone();
    while x.is_multiple_of(&l) {
        x /= &l;
        v += 1;
    }
    Some(v)
}

pub fn to_i64(x: &Scalar) -> Option<i64> {
    if x.is_integer() {
        x.numer().to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z8() -> CoeffMode {
        CoeffMode::chain_ring(2, 3).unwrap()
    }

    #[test]
    fn identity_is_canonical() {
        for mode in [CoeffMode::rational(), z8()] {
            let id = Matrix::identity(2);
            let (h, u) = canonical_form(&id, &mode).unwrap();
            assert_eq!(h, id);
            assert_eq!(u, id);
        }
    }

    #[test]
    fn howell_of_two_mod_eight() {
        let m = Matrix::from_i64(1, 1, &[2], &z8());
        let (h, _) = canonical_form(&m, &z8()).unwrap();
        assert_eq!(h, Matrix::from_i64(1, 1, &[2], &z8()));
    }

    #[test]
    fn rref_rank_one() {
        let q = CoeffMode::rational();
        let m = Matrix::from_i64(2, 2, &[1, 2, 2, 4], &q);
        let (h, u) = canonical_form(&m, &q).unwrap();
        assert_eq!(h, Matrix::from_i64(2, 2, &[1, 2, 0, 0], &q));
        assert_eq!(u.mul(&m, &q), h);
    }

    #[test]
    fn kernel_examples() {
        let q = CoeffMode::rational();
        let k = kernel(&Matrix::zeros(2, 2), &q).unwrap();
        assert_eq!(k.free_rank, 2);
        let k = kernel(&Matrix::from_i64(1, 1, &[2], &z8()), &z8()).unwrap();
        assert_eq!((k.free_rank, k.torsion_exponents.clone()), (0, vec![1]));
        assert_eq!(k.embedding_basis.unwrap(), Matrix::from_i64(1, 1, &[4], &z8()));
        let k = kernel(&Matrix::from_i64(2, 2, &[0, 1, 0, 0], &q), &q).unwrap();
        assert_eq!(k.free_rank, 1);
        assert_eq!(k.embedding_basis.unwrap(), Matrix::from_i64(2, 1, &[1, 0], &q));
    }

    #[test]
    fn cokernel_examples() {
        let q = CoeffMode::rational();
        assert!(cokernel_presentation(&Matrix::identity(3), &q).unwrap().is_zero());
        let c = cokernel_presentation(&Matrix::from_i64(1, 1, &[2], &z8()), &z8()).unwrap();
        assert_eq!(c.torsion_exponents, vec![1]);
        let c = cokernel_presentation(&Matrix::from_i64(2, 2, &[0, 1, 0, 0], &q), &q).unwrap();
        assert_eq!(c.free_rank, 1);
    }

    #[test]
    fn solve_examples() {
        let m = Matrix::from_i64(1, 1, &[2], &z8());
        let x = solve(&m, &Matrix::from_i64(1, 1, &[4], &z8()), &z8()).unwrap().unwrap();
        assert_eq!(x, Matrix::from_i64(1, 1, &[2], &z8()));
        assert!(solve(&m, &Matrix::from_i64(1, 1, &[1], &z8()), &z8()).unwrap().is_none());
        let q = CoeffMode::rational();
        let rhs = Matrix::from_i64(2, 1, &[3, -5], &q);
        assert_eq!(solve(&Matrix::identity(2), &rhs, &q).unwrap().unwrap(), rhs);
        assert!(matches!(solve(&Matrix::identity(2), &Matrix::zeros(3, 1), &q), Err(Error::ShapeError(_))));
    }

    #[test]
    fn integer_smith_examples() {
        let q = CoeffMode::rational();
        let ones: Vec<BigInt> = smith_form_integers(&Matrix::identity(3)).unwrap();
        assert_eq!(ones, vec![BigInt::from(1); 3]);
        let d = smith_form_integers(&Matrix::from_i64(2, 2, &[2, 0, 0, 3], &q)).unwrap();
        assert_eq!(d, vec![BigInt::from(1), BigInt::from(6)]);
        let d = smith_form_integers(&Matrix::zeros(1, 1)).unwrap();
        assert_eq!(d, vec![BigInt::from(0)]);
    }

    #[test]
    fn zero_dimensional_matrices() {
        let q = CoeffMode::rational();
        let m = Matrix::zeros(0, 3);
        assert_eq!(kernel(&m, &q).unwrap().free_rank, 3);
        assert!(cokernel_presentation(&m, &q).unwrap().is_zero());
        let m = Matrix::zeros(2, 0);
        assert_eq!(cokernel_presentation(&m, &q).unwrap().free_rank, 2);
        assert!(kernel(&m, &q).unwrap().is_zero());
    }

    #[test]
    fn rejects_noncanonical_entries() {
        let m = Matrix::new(1, 1, vec![int(9)]).unwrap();
        assert!(matches!(kernel(&m, &z8()), Err(Error::InvalidCoefficient(_))));
        assert!(CoeffMode::chain_ring(4, 2).is_err());
        assert!(CoeffMode::chain_ring(3, 0).is_err());
    }

    #[test]
    fn parse_fraction_rules() {
        assert_eq!(parse_scalar("2/4"), Err("E_FRACTION"));
        assert_eq!(parse_scalar("3/-2"), Err("E_FRACTION"));
        assert_eq!(parse_scalar("-3/2").unwrap(), Scalar::new(int(-3).to_integer(), int(2).to_integer()));
        assert_eq!(parse_scalar("x"), Err("E_NUMBER"));
    }
}
