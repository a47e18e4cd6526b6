//! Finite fields `F_q`, `q = p^n`, with fully materialized exp/log tables.
//!
//! Elements are stored as their integer encoding `sum c_k p^k` over the power
//! basis of the modulus. Construction is deterministic: the modulus is the
//! lexicographically least monic irreducible polynomial (constant term
//! compared first) and the generator is the primitive element with the least
//! integer encoding.

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, pow_mod, prime_factors, prime_power};
use crate::error::{Error, Result};

/// Largest `q` accepted by [`FieldCtx::build`].
pub const DEFAULT_Q_BUDGET: u64 = 1 << 20;

const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimePower {
    pub p: u64,
    pub n: u32,
    pub q: u64,
}

impl PrimePower {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::ZeroDegree);
        }
        let q = p.checked_pow(n).ok_or(Error::FieldTooLarge {
            q: u64::MAX,
            budget: DEFAULT_Q_BUDGET,
        })?;
        Ok(PrimePower { p, n, q })
    }

    pub fn from_q(q: u64) -> Result<Self> {
        let (p, n) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, n)
    }

    /// Order of the multiplicative group.
    pub fn group_order(&self) -> i64 {
        self.q as i64 - 1
    }
}

/// An element of some [`FieldCtx`], by integer encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Field identity stamped on every downstream output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldProvenance {
    pub p: u64,
    pub n: u32,
    pub q: u64,
    /// Monic modulus, coefficients from degree 0 up to degree n.
    pub modulus: Vec<u32>,
    /// Generator coordinates in the power basis, degree 0 first.
    pub generator: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct FieldCtx {
    prime_power: PrimePower,
    modulus: Vec<u64>,
    generator: FieldElement,
    exp: Vec<u32>,
    log: Vec<u32>,
    // dlog(1 - rho^c), NO_LOG at c = 0
    log_one_minus: Vec<u32>,
}

impl FieldCtx {
    pub fn build(p: u64, n: u32) -> Result<Self> {
        Self::build_with_budget(p, n, DEFAULT_Q_BUDGET)
    }

    pub fn build_with_budget(p: u64, n: u32, budget: u64) -> Result<Self> {
        let pp = checked_prime_power(p, n, budget)?;
        let modulus = least_irreducible(pp.p, pp.n as usize);
        let generator = least_generator(&pp, &modulus);
        Ok(Self::materialize(pp, modulus, generator))
    }

    /// Same modulus as [`FieldCtx::build`] but an explicitly chosen generator.
    pub fn build_with_generator(p: u64, n: u32, generator_code: u64) -> Result<Self> {
        let pp = checked_prime_power(p, n, DEFAULT_Q_BUDGET)?;
        if generator_code == 0 || generator_code >= pp.q {
            return Err(Error::NotAnElement {
                code: generator_code,
                q: pp.q,
            });
        }
        let modulus = least_irreducible(pp.p, pp.n as usize);
        let g = decode(generator_code, pp.p, pp.n as usize);
        if !has_full_order(&pp, &modulus, &g) {
            return Err(Error::NotAGenerator(generator_code));
        }
        Ok(Self::materialize(pp, modulus, generator_code as u32))
    }

    pub fn from_q(q: u64) -> Result<Self> {
        let pp = PrimePower::from_q(q)?;
        Self::build(pp.p, pp.n)
    }

    fn materialize(pp: PrimePower, modulus: Vec<u64>, generator: u32) -> Self {
        let q = pp.q as usize;
        let m = q - 1;
        let n = pp.n as usize;
        let g = decode(generator as u64, pp.p, n);
        let mut exp = Vec::with_capacity(m);
        let mut log = vec![NO_LOG; q];
        let mut cur = decode(1, pp.p, n);
        for t in 0..m {
            let code = encode(&cur, pp.p) as u32;
            assert_eq!(log[code as usize], NO_LOG, "generator order below q - 1");
            exp.push(code);
            log[code as usize] = t as u32;
            cur = mul_mod(&cur, &g, &modulus, pp.p);
        }
        assert_eq!(encode(&cur, pp.p), 1, "generator order above q - 1");

        let mut ctx = FieldCtx {
            prime_power: pp,
            modulus,
            generator: FieldElement(generator),
            exp,
            log,
            log_one_minus: Vec::new(),
        };
        ctx.log_one_minus = (0..m)
            .map(|c| {
                let v = ctx.sub(FieldElement::ONE, FieldElement(ctx.exp[c]));
                if v.is_zero() {
                    NO_LOG
                } else {
                    ctx.log[v.0 as usize]
                }
            })
            .collect();
        ctx
    }

    pub fn prime_power(&self) -> PrimePower {
        self.prime_power
    }

    pub fn p(&self) -> u64 {
        self.prime_power.p
    }

    pub fn n(&self) -> u32 {
        self.prime_power.n
    }

    pub fn q(&self) -> u64 {
        self.prime_power.q
    }

    /// `q - 1`.
    pub fn group_order(&self) -> i64 {
        self.prime_power.group_order()
    }

    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    /// Monic modulus coefficients, degree 0 first.
    pub fn modulus(&self) -> Vec<u32> {
        self.modulus.iter().map(|&c| c as u32).collect()
    }

    pub fn exp_table(&self) -> &[u32] {
        &self.exp
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q() as u32).map(FieldElement)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.q() as u32).map(FieldElement)
    }

    pub fn from_code(&self, code: u64) -> Result<FieldElement> {
        if code < self.q() {
            Ok(FieldElement(code as u32))
        } else {
            Err(Error::NotAnElement { code, q: self.q() })
        }
    }

    /// Element from power-basis coordinates (degree 0 first, reduced mod p).
    pub fn element(&self, coeffs: &[i64]) -> FieldElement {
        let p = self.p() as i64;
        let mut code = 0u64;
        for &c in coeffs.iter().take(self.n() as usize).rev() {
            code = code * self.p() + c.rem_euclid(p) as u64;
        }
        FieldElement(code as u32)
    }

    /// The integer `k` as a field element.
    pub fn from_int(&self, k: i64) -> FieldElement {
        self.element(&[k])
    }

    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        decode(a.0 as u64, self.p(), self.n() as usize)
            .into_iter()
            .map(|c| c as u32)
            .collect()
    }

    /// `rho^t` for any integer `t`.
    #[inline]
    pub fn exp(&self, t: i64) -> FieldElement {
        FieldElement(self.exp[t.rem_euclid(self.group_order()) as usize])
    }

    /// `rho^t` for `t` already reduced into `[0, q-2]`.
    #[inline]
    pub fn exp_at(&self, t: usize) -> FieldElement {
        FieldElement(self.exp[t])
    }

    pub fn dlog(&self, a: FieldElement) -> Result<u32> {
        match self.log.get(a.0 as usize) {
            Some(&l) if l != NO_LOG => Ok(l),
            Some(_) => Err(Error::DlogOfZero),
            None => Err(Error::NotAnElement {
                code: a.0 as u64,
                q: self.q(),
            }),
        }
    }

    /// `dlog(1 - rho^c)`, or `None` when `rho^c = 1`.
    #[inline]
    pub fn log_one_minus(&self, c: usize) -> Option<u32> {
        let l = self.log_one_minus[c];
        (l != NO_LOG).then_some(l)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.p() as u32;
        if self.n() == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= p { s - p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut place = 1u32;
        while x != 0 || y != 0 {
            let s = (x % p + y % p) % p;
            out += s * place;
            place = place.wrapping_mul(p);
            x /= p;
            y /= p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let p = self.p() as u32;
        let mut x = a.0;
        let mut out = 0u32;
        let mut place = 1u32;
        while x != 0 {
            let c = x % p;
            out += ((p - c) % p) * place;
            place = place.wrapping_mul(p);
            x /= p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let m = self.group_order() as u64;
        let t = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % m;
        FieldElement(self.exp[t as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.exp(-(self.log[a.0 as usize] as i64)))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`; negative `e` reduces modulo `q - 1` on nonzero `a`. `0^0 = 1`.
    pub fn pow(&self, a: FieldElement, e: i64) -> Result<FieldElement> {
        if a.is_zero() {
            return match e {
                0 => Ok(FieldElement::ONE),
                e if e > 0 => Ok(FieldElement::ZERO),
                _ => Err(Error::DivisionByZero),
            };
        }
        let m = self.group_order() as i128;
        let t = (self.log[a.0 as usize] as i128 * e as i128).rem_euclid(m);
        Ok(FieldElement(self.exp[t as usize]))
    }

    /// `-1 = rho^w`.
    pub fn minus_one_log(&self) -> i64 {
        if self.q().is_multiple_of(2) {
            0
        } else {
            self.group_order() / 2
        }
    }

    pub fn provenance(&self) -> FieldProvenance {
        FieldProvenance {
            p: self.p(),
            n: self.n(),
            q: self.q(),
            modulus: self.modulus(),
            generator: self.coeffs(self.generator),
        }
    }
}

fn checked_prime_power(p: u64, n: u32, budget: u64) -> Result<PrimePower> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::ZeroDegree);
    }
    match p.checked_pow(n) {
        Some(q) if q <= budget && q <= u32::MAX as u64 => PrimePower::new(p, n),
        Some(q) => Err(Error::FieldTooLarge { q, budget }),
        None => Err(Error::FieldTooLarge {
            q: u64::MAX,
            budget,
        }),
    }
}

// Polynomials over Z_p, coefficient vectors with degree 0 first.

fn decode(mut code: u64, p: u64, n: usize) -> Vec<u64> {
    let mut out = vec![0; n.max(1)];
    for c in out.iter_mut() {
        *c = code % p;
        code /= p;
    }
    out
}

fn encode(v: &[u64], p: u64) -> u64 {
    v.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    v
}

/// `a * b mod f`, with `a`, `b` of length `deg f` and `f` monic.
fn mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let n = f.len() - 1;
    let mut prod = vec![0u64; 2 * n];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (n..2 * n).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        for t in 0..n {
            prod[k - n + t] = (prod[k - n + t] + (p - c) * f[t]) % p;
        }
        prod[k] = 0;
    }
    prod.truncate(n.max(1));
    prod
}

fn pow_poly(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let n = f.len() - 1;
    let mut acc = vec![0u64; n.max(1)];
    acc[0] = 1 % p;
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &b, f, p);
        }
        b = mul_mod(&b, &b, f, p);
        e >>= 1;
    }
    acc
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let lead_inv = pow_mod(b[db], p - 2, p);
    let mut r = a.to_vec();
    for k in (db..r.len()).rev() {
        let c = r[k] * lead_inv % p;
        if c == 0 {
            continue;
        }
        for t in 0..=db {
            r[k - db + t] = (r[k - db + t] + p - c * b[t] % p) % p;
        }
    }
    r.truncate(db.max(1));
    trim(r)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !(b.len() == 1 && b[0] == 0) {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Rabin's test for a monic `f` of degree `n`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = f.len() - 1;
    if n == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let mut x = vec![0u64; n];
    x[1] = 1;
    // frob[k] = x^(p^k) mod f
    let mut frob = vec![x.clone()];
    for k in 1..=n {
        let next = pow_poly(&frob[k - 1], p, f, p);
        frob.push(next);
    }
    if frob[n] != x {
        return false;
    }
    for r in prime_factors(n as u64) {
        let mut h = frob[n / r as usize].clone();
        h[1] = (h[1] + p - 1) % p;
        let g = poly_gcd(f, &h, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Least monic irreducible of degree `n`, comparing `(c_0, c_1, ..., c_{n-1})`
/// lexicographically.
fn least_irreducible(p: u64, n: usize) -> Vec<u64> {
    let count = p.pow(n as u32);
    for idx in 0..count {
        // c_0 is the most significant digit of idx
        let mut f = vec![0u64; n + 1];
        let mut r = idx;
        for k in (0..n).rev() {
            f[k] = r % p;
            r /= p;
        }
        f[n] = 1;
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn has_full_order(pp: &PrimePower, f: &[u64], g: &[u64]) -> bool {
    let m = pp.q - 1;
    let one = decode(1, pp.p, pp.n as usize);
    if pow_poly(g, m, f, pp.p) != one {
        return false;
    }
    prime_factors(m)
        .into_iter()
        .all(|r| pow_poly(g, m / r, f, pp.p) != one)
}

fn least_generator(pp: &PrimePower, f: &[u64]) -> u32 {
    (1..pp.q)
        .find(|&code| has_full_order(pp, f, &decode(code, pp.p, pp.n as usize)))
        .expect("the multiplicative group of a finite field is cyclic") as u32
}
