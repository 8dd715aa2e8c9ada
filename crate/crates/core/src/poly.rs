//! Polynomials: cyclotomic detection, characteristic polynomials, and
//! factorization over the rationals and over prime fields.
//!
//! Coefficient vectors are stored lowest degree first.

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{big, CoeffMode, Matrix, Scalar};

pub const FACTOR_DEGREE_CAP: usize = 12;

/// Integer polynomial, coefficients lowest degree first; zero is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegerPolynomial {
    pub coefficients: Vec<BigInt>,
}

impl IntegerPolynomial {
    pub fn new(mut coefficients: Vec<BigInt>) -> Self {
        while coefficients.last().is_some_and(|c| c.is_zero()) {
            coefficients.pop();
        }
        IntegerPolynomial { coefficients }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coefficients.last().is_some_and(|c| c.is_one())
    }

    pub fn to_rational(&self) -> Vec<Scalar> {
        self.coefficients.iter().cloned().map(big).collect()
    }

    /// From a rational polynomial with integer coefficients.
    pub fn from_rational(p: &[Scalar]) -> Option<Self> {
        if p.iter().any(|c| !c.is_integer()) {
            return None;
        }
        Some(Self::new(p.iter().map(|c| c.to_integer()).collect()))
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coefficients.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

impl std::fmt::Display for IntegerPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coefficients.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let coef = if a.is_one() && i > 0 { String::new() } else { a.to_string() };
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{coef}x")?,
                _ => write!(f, "{coef}x^{i}")?,
            }
        }
        Ok(())
    }
}

// ---------- rational polynomials ----------

pub type RatPoly = Vec<Scalar>;

pub fn trim(p: &mut RatPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn rp_sub(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let n = a.len().max(b.len());
    let mut out: RatPoly = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
        .collect();
    trim(&mut out);
    out
}

pub fn rp_mul(a: &RatPoly, b: &RatPoly) -> RatPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Scalar::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

/// Quotient and remainder; `b` nonzero.
pub fn rp_divrem(a: &RatPoly, b: &RatPoly) -> (RatPoly, RatPoly) {
    let mut r = a.clone();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![Scalar::zero(); r.len() - db];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = r.last().unwrap() / &lead;
        for (i, bc) in b.iter().enumerate() {
            r[k + i] -= &c * bc;
        }
        q[k] = c;
        r.pop();
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

fn rp_monic(mut p: RatPoly) -> RatPoly {
    trim(&mut p);
    if let Some(l) = p.last().cloned() {
        for c in p.iter_mut() {
            *c = &*c / &l;
        }
    }
    p
}

pub fn rp_gcd(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = rp_divrem(&x, &y);
        x = y;
        y = r;
    }
    rp_monic(x)
}

fn rp_derivative(a: &RatPoly) -> RatPoly {
    let mut out: RatPoly = a.iter().enumerate().skip(1).map(|(i, c)| c * big(BigInt::from(i))).collect();
    trim(&mut out);
    out
}

/// Evaluates `p(m)` with arithmetic in `mode`. Coefficients are coerced.
pub fn eval_matrix(p: &[Scalar], m: &Matrix, mode: &CoeffMode) -> Result<Matrix> {
    let n = m.rows();
    let mut acc = Matrix::zeros(n, n);
    for c in p.iter().rev() {
        acc = acc.mul(m, mode).add(&Matrix::scalar(n, mode.coerce(c)?), mode);
    }
    Ok(acc)
}

// ---------- cyclotomic polynomials ----------

pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn mobius(mut n: u64) -> i32 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// The `k`-th cyclotomic polynomial, as `Π_{d|k} (x^d − 1)^{μ(k/d)}`.
pub fn cyclotomic(k: u64) -> IntegerPolynomial {
    assert!(k >= 1);
    let binom = |d: u64| -> RatPoly {
        let mut v = vec![Scalar::zero(); d as usize + 1];
        v[0] = -Scalar::one();
        v[d as usize] = Scalar::one();
        v
    };
    let mut num: RatPoly = vec![Scalar::one()];
    let mut den: RatPoly = vec![Scalar::one()];
    for d in 1..=k {
        if k % d == 0 {
            match mobius(k / d) {
                1 => num = rp_mul(&num, &binom(d)),
                -1 => den = rp_mul(&den, &binom(d)),
                _ => {}
            }
        }
    }
    let (q, _) = rp_divrem(&num, &den);
    IntegerPolynomial::from_rational(&q).expect("cyclotomic polynomials are integral")
}

/// Whether a monic integer polynomial is a product of cyclotomic polynomials.
pub fn cyclotomic_product_test(p: &IntegerPolynomial) -> Result<bool> {
    if !p.is_monic() {
        return Err(Error::NotMonic);
    }
    let deg = p.degree().unwrap_or(0);
    let mut rest = p.to_rational();
    // φ(k) <= deg forces k <= 2·deg²
    let kmax = (2 * deg * deg).max(2) as u64;
    for k in 1..=kmax {
        if rest.len() <= 1 {
            break;
        }
        if euler_phi(k) as usize > rest.len() - 1 {
            continue;
        }
        let phi = cyclotomic(k).to_rational();
        loop {
            let (q, r) = rp_divrem(&rest, &phi);
            if !r.is_empty() {
                break;
            }
            rest = q;
        }
    }
    Ok(rest.len() == 1)
}

// ---------- characteristic polynomial ----------

/// `det(x·I − m)` over `mode`, monic, lowest degree first (Berkowitz).
pub fn charpoly(m: &Matrix, mode: &CoeffMode) -> Vec<Scalar> {
    assert!(m.is_square(), "characteristic polynomial of a non-square matrix");
    let n = m.rows();
    // coefficients highest degree first during the recursion
    let mut p: Vec<Scalar> = vec![Scalar::one()];
    for k in (0..n).rev() {
        // trailing block starting at k: a = m[k][k], R = row k right, C = column k below, A1 trailing
        let size = n - k;
        let a11 = m[(k, k)].clone();
        let r = m.block(k, k + 1, 1, size - 1);
        let c = m.block(k + 1, k, size - 1, 1);
        let a1 = m.block(k + 1, k + 1, size - 1, size - 1);
        let mut t = vec![Scalar::one(), mode.neg(&a11)];
        let mut v = c.clone();
        for _ in 0..size.saturating_sub(1) {
            let rv = r.mul(&v, mode);
            t.push(mode.neg(&rv[(0, 0)]));
            v = a1.mul(&v, mode);
        }
        t.truncate(size + 1);
        let mut q = vec![Scalar::zero(); size + 1];
        for (i, qi) in q.iter_mut().enumerate() {
            let mut acc = Scalar::zero();
            for (j, pj) in p.iter().enumerate() {
                if i >= j && i - j < t.len() {
                    acc = mode.add(&acc, &mode.mul(&t[i - j], pj));
                }
            }
            *qi = acc;
        }
        p = q;
    }
    p.reverse();
    p
}

// ---------- arithmetic modulo a prime ----------

#[derive(Clone, Debug)]
struct Fp {
    p: BigInt,
}

type ModPoly = Vec<BigInt>;

impl Fp {
    fn red(&self, x: &BigInt) -> BigInt {
        x.mod_floor(&self.p)
    }

    fn trim(&self, a: &mut ModPoly) {
        while a.last().is_some_and(|c| c.is_zero()) {
            a.pop();
        }
    }

    fn norm(&self, a: &[BigInt]) -> ModPoly {
        let mut v: ModPoly = a.iter().map(|x| self.red(x)).collect();
        self.trim(&mut v);
        v
    }

    fn inv(&self, x: &BigInt) -> BigInt {
        let g = x.extended_gcd(&self.p);
        self.red(&g.x)
    }

    fn sub(&self, a: &ModPoly, b: &ModPoly) -> ModPoly {
        let n = a.len().max(b.len());
        let zero = BigInt::zero();
        let v: ModPoly = (0..n).map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero)).collect();
        self.norm(&v)
    }

    fn mul(&self, a: &ModPoly, b: &ModPoly) -> ModPoly {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        self.norm(&out)
    }

    fn divrem(&self, a: &ModPoly, b: &ModPoly) -> (ModPoly, ModPoly) {
        let mut r = self.norm(a);
        let db = b.len() - 1;
        let linv = self.inv(&b[db]);
        if r.len() < b.len() {
            return (vec![], r);
        }
        let mut q = vec![BigInt::zero(); r.len() - db];
        while r.len() > db {
            let k = r.len() - 1 - db;
            let c = self.red(&(r.last().unwrap() * &linv));
            for (i, bc) in b.iter().enumerate() {
                r[k + i] = self.red(&(&r[k + i] - &c * bc));
            }
            q[k] = c;
            r.pop();
            self.trim(&mut r);
        }
        self.trim(&mut q);
        (q, r)
    }

    fn monic(&self, a: ModPoly) -> ModPoly {
        match a.last() {
            None => a,
            Some(l) => {
                let li = self.inv(l);
                a.iter().map(|c| self.red(&(c * &li))).collect()
            }
        }
    }

    fn gcd(&self, a: &ModPoly, b: &ModPoly) -> ModPoly {
        let (mut x, mut y) = (self.norm(a), self.norm(b));
        while !y.is_empty() {
            let (_, r) = self.divrem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(x)
    }

    fn powmod(&self, base: &ModPoly, e: &BigInt, m: &ModPoly) -> ModPoly {
        let mut result: ModPoly = vec![BigInt::one()];
        let mut b = self.divrem(base, m).1;
        let mut e = e.clone();
        let two = BigInt::from(2);
        while e.is_positive() {
            if e.is_odd() {
                result = self.divrem(&self.mul(&result, &b), m).1;
            }
            e /= &two;
            if e.is_positive() {
                b = self.divrem(&self.mul(&b, &b), m).1;
            }
        }
        result
    }

    fn derivative(&self, a: &ModPoly) -> ModPoly {
        let v: ModPoly = a.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
        self.norm(&v)
    }

    /// Irreducible factors of a monic square-free polynomial.
    fn factor_squarefree(&self, f: &ModPoly, rng: &mut ChaCha8Rng) -> Vec<ModPoly> {
        let n = f.len() - 1;
        if n <= 1 {
            return vec![f.clone()];
        }
        let small = self.p.to_u64().is_some_and(|p| (p as f64).powf(n as f64 / 2.0) <= 2.0e5);
        if small {
            return self.factor_brute(f);
        }
        // distinct-degree factorization
        let x: ModPoly = vec![BigInt::zero(), BigInt::one()];
        let mut rest = f.clone();
        let mut h = x.clone();
        let mut out = Vec::new();
        let mut d = 1;
        while rest.len() - 1 >= 2 * d {
            h = self.powmod(&h, &self.p, &rest);
            let g = self.gcd(&self.sub(&h, &x), &rest);
            if g.len() > 1 {
                out.extend(self.equal_degree(&g, d, rng));
                rest = self.divrem(&rest, &g).0;
                h = self.divrem(&h, &rest).1;
            }
            d += 1;
        }
        if rest.len() > 1 {
            out.push(rest);
        }
        out
    }

    fn equal_degree(&self, g: &ModPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<ModPoly> {
        let n = g.len() - 1;
        if n == d {
            return vec![g.clone()];
        }
        let e = (num_traits::pow(self.p.clone(), d) - 1u32) / 2u32;
        loop {
            let a: ModPoly = self.norm(&(0..n).map(|_| rng.gen_bigint_range(&BigInt::zero(), &self.p)).collect::<Vec<_>>());
            if a.len() < 2 {
                continue;
            }
            let b = self.sub(&self.powmod(&a, &e, g), &vec![BigInt::one()]);
            let h = self.gcd(&b, g);
            if h.len() > 1 && h.len() < g.len() {
                let other = self.divrem(g, &h).0;
                let mut out = self.equal_degree(&h, d, rng);
                out.extend(self.equal_degree(&self.monic(other), d, rng));
                return out;
            }
        }
    }

    fn factor_brute(&self, f: &ModPoly) -> Vec<ModPoly> {
        let p = self.p.to_u64().unwrap();
        let mut rest = f.clone();
        let mut out = Vec::new();
        let mut d = 1;
        while rest.len() > 1 && 2 * d <= rest.len() - 1 {
            let count = p.pow(d as u32);
            for idx in 0..count {
                let mut c = Vec::with_capacity(d + 1);
                let mut t = idx;
                for _ in 0..d {
                    c.push(BigInt::from(t % p));
                    t /= p;
                }
                c.push(BigInt::one());
                while rest.len() > d {
                    let (q, r) = self.divrem(&rest, &c);
                    if !r.is_empty() {
                        break;
                    }
                    out.push(c.clone());
                    rest = q;
                }
                if rest.len() - 1 < 2 * d {
                    break;
                }
            }
            d += 1;
        }
        if rest.len() > 1 {
            out.push(rest);
        }
        out
    }

    /// Irreducible factorization with multiplicities of a monic polynomial.
    fn factor(&self, f: &ModPoly, rng: &mut ChaCha8Rng) -> Vec<(ModPoly, usize)> {
        let f = self.monic(self.norm(f));
        if f.len() <= 1 {
            return vec![];
        }
        let mut out: Vec<(ModPoly, usize)> = Vec::new();
        let add = |q: ModPoly, m: usize, out: &mut Vec<(ModPoly, usize)>| {
            if let Some(e) = out.iter_mut().find(|(x, _)| *x == q) {
                e.1 += m;
            } else {
                out.push((q, m));
            }
        };
        let df = self.derivative(&f);
        if df.is_empty() {
            // f = g(x^p)
            let p = self.p.to_usize().unwrap();
            let g: ModPoly = f.iter().step_by(p).cloned().collect();
            for (q, m) in self.factor(&g, rng) {
                add(q, m * p, &mut out);
            }
            return out;
        }
        let g = self.gcd(&f, &df);
        let sqf = self.divrem(&f, &g).0;
        for q in self.factor_squarefree(&self.monic(sqf), rng) {
            let mut m = 0;
            let mut rest = f.clone();
            loop {
                let (qq, r) = self.divrem(&rest, &q);
                if !r.is_empty() {
                    break;
                }
                m += 1;
                rest = qq;
            }
            add(q, m, &mut out);
        }
        out
    }
}

/// Irreducible monic factors with multiplicity of a polynomial over `F_p`.
pub fn factor_mod_prime(f: &[BigInt], p: u64, seed: u64) -> Vec<(Vec<BigInt>, usize)> {
    let fp = Fp { p: BigInt::from(p) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = fp.factor(&f.to_vec(), &mut rng);
    out.sort();
    out
}

fn is_probable_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    for sp in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let b = BigInt::from(sp);
        if n == &b {
            return true;
        }
        if n.is_multiple_of(&b) {
            return false;
        }
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut s = 0;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'outer: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigInt::from(2), n);
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Exact division of monic integer polynomials, if it is exact.
fn zpoly_div_exact(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let (q, r) = rp_divrem(
        &a.iter().cloned().map(big).collect(),
        &b.iter().cloned().map(big).collect(),
    );
    if !r.is_empty() {
        return None;
    }
    q.iter().map(|c| if c.is_integer() { Some(c.to_integer()) } else { None }).collect()
}

/// Factors a monic square-free integer polynomial into irreducibles over Z.
fn factor_squarefree_integer(f: &[BigInt], rng: &mut ChaCha8Rng) -> Vec<Vec<BigInt>> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.to_vec()];
    }
    // coefficient bound for factors: 2^n · ||f||_2, then a prime beyond twice it
    let norm2: BigInt = f.iter().map(|c| c * c).sum();
    let norm = norm2.sqrt() + 1u32;
    let bound: BigInt = (BigInt::one() << n) * norm;
    let mut p: BigInt = 2u32 * &bound + 1u32;
    loop {
        if is_probable_prime(&p) {
            let fp = Fp { p: p.clone() };
            let fm = fp.norm(f);
            let g = fp.gcd(&fm, &fp.derivative(&fm));
            if g.len() == 1 {
                break;
            }
        }
        p += 1u32;
    }
    let fp = Fp { p: p.clone() };
    let locals = fp.factor_squarefree(&fp.norm(f), rng);
    let half = &p / 2u32;
    let sym = |v: Vec<BigInt>| -> Vec<BigInt> { v.into_iter().map(|c| if c > half { c - &p } else { c }).collect() };
    // recombine subsets of local factors, smallest first
    let mut remaining: Vec<ModPoly> = locals;
    let mut rest: Vec<BigInt> = f.to_vec();
    let mut out = Vec::new();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let mut found = false;
        for subset in combinations(remaining.len(), size) {
            let mut prod: ModPoly = vec![BigInt::one()];
            for &i in &subset {
                prod = fp.mul(&prod, &remaining[i]);
            }
            let cand = sym(prod);
            if let Some(q) = zpoly_div_exact(&rest, &cand) {
                out.push(cand);
                rest = q;
                let keep: Vec<ModPoly> =
                    remaining.iter().enumerate().filter(|(i, _)| !subset.contains(i)).map(|(_, x)| x.clone()).collect();
                remaining = keep;
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    out.push(rest);
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Irreducible monic factors with multiplicities of a monic rational polynomial.
pub fn factor_rational(p: &[Scalar]) -> Result<Vec<(RatPoly, usize)>> {
    let mut f = rp_monic(p.to_vec());
    trim(&mut f);
    let deg = f.len().saturating_sub(1);
    if deg > FACTOR_DEGREE_CAP {
        return Err(Error::DegreeCap(deg));
    }
    if deg == 0 {
        return Ok(vec![]);
    }
    // x -> y/D makes the polynomial integral and monic
    let den = f.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let dq = big(den.clone());
    let scaled: Vec<BigInt> = f
        .iter()
        .enumerate()
        .map(|(i, c)| (c * num_traits::pow(dq.clone(), deg - i)).to_integer())
        .collect();
    let sq: RatPoly = scaled.iter().cloned().map(big).collect();
    // Yun square-free decomposition
    let mut parts: Vec<(RatPoly, usize)> = Vec::new();
    let d = rp_derivative(&sq);
    let mut a = rp_gcd(&sq, &d);
    let mut b = rp_divrem(&sq, &a).0;
    let mut c = rp_divrem(&d, &a).0;
    let mut dpart = rp_sub(&c, &rp_derivative(&b));
    let mut i = 1;
    while b.len() > 1 {
        a = rp_gcd(&b, &dpart);
        if a.len() > 1 {
            parts.push((a.clone(), i));
        }
        b = rp_divrem(&b, &a).0;
        c = rp_divrem(&dpart, &a).0;
        dpart = rp_sub(&c, &rp_derivative(&b));
        i += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    for (part, mult) in parts {
        let ints: Vec<BigInt> = rp_monic(part).iter().map(|c| c.to_integer()).collect();
        for fac in factor_squarefree_integer(&ints, &mut rng) {
            // back to x: g(D x) / D^deg
            let k = fac.len() - 1;
            let back: RatPoly = fac
                .iter()
                .enumerate()
                .map(|(i, c)| big(c.clone()) / num_traits::pow(dq.clone(), k - i))
                .collect();
            out.push((rp_monic(back), mult));
        }
    }
    out.sort_by(|x, y| (x.0.len(), &x.0).cmp(&(y.0.len(), &y.0)));
    Ok(out)
}

/// Irreducible factors of a monic polynomial over a field mode.
pub fn factor_over(p: &[Scalar], mode: &CoeffMode, seed: u64) -> Result<Vec<(RatPoly, usize)>> {
    match mode {
        CoeffMode::RationalField => factor_rational(p),
        CoeffMode::ChainRing(_) if mode.is_field() => {
            let ell = mode.ell().unwrap();
            let ints: Vec<BigInt> = p.iter().map(|c| c.to_integer()).collect();
            Ok(factor_mod_prime(&ints, ell, seed)
                .into_iter()
                .map(|(f, m)| (f.into_iter().map(big).collect(), m))
                .collect())
        }
        _ => Err(Error::UnsupportedMode("factorization needs a field".into())),
    }
}

pub fn rational_to_string(p: &[Scalar]) -> String {
    match IntegerPolynomial::from_rational(p) {
        Some(ip) => ip.to_string(),
        None => p
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({c})x^{i}"))
            .collect::<Vec<_>>()
            .join(" + "),
    }
}

pub fn big_rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_examples() {
        assert!(cyclotomic_product_test(&IntegerPolynomial::from_i64(&[-1, 1])).unwrap());
        assert!(cyclotomic_product_test(&IntegerPolynomial::from_i64(&[1, 1, 1])).unwrap());
        assert!(!cyclotomic_product_test(&IntegerPolynomial::from_i64(&[3, -1, 1])).unwrap());
        assert_eq!(cyclotomic_product_test(&IntegerPolynomial::from_i64(&[1, 2])), Err(Error::NotMonic));
        assert_eq!(cyclotomic(12), IntegerPolynomial::from_i64(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn charpoly_small() {
        let q = CoeffMode::rational();
        let m = Matrix::from_i64(2, 2, &[0, -1, 1, 0], &q);
        assert_eq!(charpoly(&m, &q), IntegerPolynomial::from_i64(&[1, 0, 1]).to_rational());
        let m = Matrix::from_i64(3, 3, &[2, 1, 0, 0, 2, 0, 1, 1, 3], &q);
        // (x-2)^2 (x-3)
        assert_eq!(charpoly(&m, &q), IntegerPolynomial::from_i64(&[-12, 16, -7, 1]).to_rational());
    }

    #[test]
    fn factor_over_rationals() {
        // (x^2+1)(x-2)^2 (x^3 - 2)
        let f = rp_mul(
            &rp_mul(&IntegerPolynomial::from_i64(&[1, 0, 1]).to_rational(), &IntegerPolynomial::from_i64(&[4, -4, 1]).to_rational()),
            &IntegerPolynomial::from_i64(&[-2, 0, 0, 1]).to_rational(),
        );
        let fs = factor_rational(&f).unwrap();
        assert_eq!(fs.len(), 3);
        assert!(fs.contains(&(IntegerPolynomial::from_i64(&[-2, 1]).to_rational(), 2)));
        assert!(fs.contains(&(IntegerPolynomial::from_i64(&[-2, 0, 0, 1]).to_rational(), 1)));
        // x^4 + 4 = (x^2+2x+2)(x^2-2x+2)
        let fs = factor_rational(&IntegerPolynomial::from_i64(&[4, 0, 0, 0, 1]).to_rational()).unwrap();
        assert_eq!(fs.len(), 2);
        // rational coefficients: x^2 - 1/4
        let fs = factor_rational(&[big_rational(-1, 4), Scalar::zero(), Scalar::one()]).unwrap();
        assert_eq!(fs.len(), 2);
    }

    #[test]
    fn factor_mod_small_primes() {
        let f: Vec<BigInt> = [1, 0, 1].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(factor_mod_prime(&f, 2, 0).len(), 1); // (x+1)^2
        assert_eq!(factor_mod_prime(&f, 2, 0)[0].1, 2);
        assert_eq!(factor_mod_prime(&f, 3, 0).len(), 1);
        assert_eq!(factor_mod_prime(&f, 5, 0).len(), 2);
    }
}
