//! Points on `x^3 + y^3 + z^3 = 0` over `F_p` from the diagonal cubic family,
//! and the certificate `u^2 + 27 v^2 = 4p` for `p = 1 mod 3`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{exact_sqrt, gcd, is_prime, isqrt, modulo, odd_primes_in};
use crate::counter::{count_star, folded_exhaustive, CurveFamily};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldProvenance};
use crate::lattice::ExponentMatrix;

pub const GAUSS_EXPONENTS: [i64; 6] = [3, 0, 0, 3, 0, 0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Inert,
    Split,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussWitness {
    pub p: u64,
    pub branch: Branch,
    #[serde(rename = "M_p")]
    pub m_p: u64,
    /// `N_00`, always `1 mod 3`.
    pub u: Option<i64>,
    /// `N_01`.
    pub v: Option<i64>,
    /// `|2v + u| / 9`.
    pub v_bar: Option<i64>,
    pub field: FieldProvenance,
}

impl GaussWitness {
    /// All stated invariants of the witness hold.
    pub fn is_valid(&self) -> bool {
        let p = self.p as i64;
        match (self.branch, self.u, self.v, self.v_bar) {
            (Branch::Inert, None, None, None) => self.m_p == self.p + 1,
            (Branch::Split, Some(u), Some(v), Some(vb)) => {
                u * u + 27 * vb * vb == 4 * p
                    && modulo(u, 3) == 1
                    && (2 * v + u) % 9 == 0
                    && (2 * v + u).abs() / 9 == vb
                    && self.m_p as i64 == p + 1 + u
            }
            _ => false,
        }
    }
}

pub fn gauss_family(p: u64) -> Result<CurveFamily> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let field = Arc::new(FieldCtx::build(p, 1)?);
    CurveFamily::new(ExponentMatrix::from_row_major(GAUSS_EXPONENTS)?, field)
}

pub fn gauss_witness(p: u64) -> Result<GaussWitness> {
    let fam = gauss_family(p)?;
    let m_p = count_star(0, 0, &fam) + 3 * gcd(3, p as i64 - 1) as u64;
    let field = fam.field().provenance();
    if p % 3 != 1 {
        return Ok(GaussWitness {
            p,
            branch: Branch::Inert,
            m_p,
            u: None,
            v: None,
            v_bar: None,
            field,
        });
    }
    let u = fam.n_from_star(0, 0, count_star(0, 0, &fam));
    let v = fam.n_from_star(0, 1, count_star(0, 1, &fam));
    Ok(GaussWitness {
        p,
        branch: Branch::Split,
        m_p,
        u: Some(u),
        v: Some(v),
        v_bar: Some((2 * v + u).abs() / 9),
        field,
    })
}

/// Witnesses for every odd prime in `[lo, hi)`, in increasing order.
pub fn gauss_sweep(lo: u64, hi: u64) -> Result<Vec<GaussWitness>> {
    odd_primes_in(lo, hi)
        .into_par_iter()
        .map(gauss_witness)
        .collect()
}

/// Projective points of `x^3 + y^3 + z^3 = 0` over `F_p` by direct enumeration.
pub fn project_count(p: u64) -> u64 {
    let cube: Vec<u64> = (0..p).map(|x| x * x % p * x % p).collect();
    let mut count = 0;
    // [1:y:z]
    for y in 0..p as usize {
        for z in 0..p as usize {
            if (1 + cube[y] + cube[z]).is_multiple_of(p) {
                count += 1;
            }
        }
    }
    // [0:1:z]
    count += (0..p as usize)
        .filter(|&z| (1 + cube[z]).is_multiple_of(p))
        .count() as u64;
    // [0:0:1] never lies on the curve
    count
}

/// Every `(u, v)` with `u^2 + 27 v^2 = 4p`, by scanning `|u| <= 2 sqrt(p)`.
pub fn cornacchia_enumerate(p: u64) -> Result<Vec<(i64, i64)>> {
    let four_p = 4 * p as i64;
    let bound = isqrt(four_p as u128) as i64;
    let mut out = Vec::new();
    for u in -bound..=bound {
        let rest = four_p - u * u;
        if rest % 27 != 0 {
            continue;
        }
        if let Some(v) = exact_sqrt((rest / 27) as i128) {
            let v = v as i64;
            out.push((u, -v));
            if v != 0 {
                out.push((u, v));
            }
        }
    }
    out.sort_unstable();
    if out.is_empty() {
        return Err(Error::NoSolution(p));
    }
    Ok(out)
}

/// The `(u, |v|)` with `u = 1 mod 3` when `solutions` is a single sign orbit.
pub fn single_orbit(solutions: &[(i64, i64)]) -> Option<(i64, i64)> {
    let (u0, v0) = *solutions.first()?;
    let (u0, v0) = (u0.abs(), v0.abs());
    if solutions
        .iter()
        .any(|&(u, v)| u.abs() != u0 || v.abs() != v0)
    {
        return None;
    }
    let forced: Vec<i64> = [u0, -u0]
        .into_iter()
        .filter(|&u| modulo(u, 3) == 1)
        .collect();
    match forced.as_slice() {
        [u] => Some((*u, v0)),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structure3x3 {
    pub p: u64,
    pub u: i64,
    pub v: i64,
    /// Folded table indexed by coset representative `(i, j)`, `0 <= i, j < 3`.
    pub table: [[i64; 3]; 3],
    pub pattern_holds: bool,
    pub square_sum_holds: bool,
    pub counts_divisible_by_9: bool,
}

impl Structure3x3 {
    pub fn holds(&self) -> bool {
        self.pattern_holds && self.square_sum_holds && self.counts_divisible_by_9
    }
}

pub fn check_3x3_structure(p: u64) -> Result<Structure3x3> {
    let fam = gauss_family(p)?;
    if p % 3 != 1 {
        return Err(Error::InvalidCase(format!("p = {p} is not 1 mod 3")));
    }
    let folded = folded_exhaustive(&fam);
    let mut table = [[0i64; 3]; 3];
    let mut divisible = true;
    for e in &folded {
        table[e.i as usize][e.j as usize] = e.n;
        divisible &= e.star % 9 == 0;
    }
    let (u, v) = (table[0][0], table[0][1]);
    let w = -u - v;
    let pattern = [[u, v, w], [v, w, u], [w, u, v]];
    Ok(Structure3x3 {
        p,
        u,
        v,
        table,
        pattern_holds: folded.len() == 9 && table == pattern,
        square_sum_holds: 3 * (u * u + v * v + w * w) == 18 * p as i64,
        counts_divisible_by_9: divisible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_examples() {
        let w5 = gauss_witness(5).unwrap();
        assert_eq!((w5.branch, w5.m_p), (Branch::Inert, 6));
        let w7 = gauss_witness(7).unwrap();
        assert_eq!(
            (w7.branch, w7.m_p, w7.u, w7.v_bar),
            (Branch::Split, 9, Some(1), Some(1))
        );
        let w13 = gauss_witness(13).unwrap();
        assert_eq!((w13.m_p, w13.u, w13.v_bar), (9, Some(-5), Some(1)));
        assert_eq!(gauss_witness(3).unwrap().m_p, 4);
        assert!([w5, w7, w13].iter().all(GaussWitness::is_valid));
    }

    #[test]
    fn rejects_non_odd_primes() {
        for p in [2, 9, 1, 0] {
            assert!(matches!(gauss_witness(p), Err(Error::NotOddPrime(_))));
        }
    }

    #[test]
    fn projective_examples() {
        assert_eq!(project_count(3), 4);
        assert_eq!(project_count(5), 6);
        assert_eq!(project_count(7), 9);
        assert_eq!(project_count(13), 9);
    }

    #[test]
    fn cornacchia_examples() {
        let sols = cornacchia_enumerate(7).unwrap();
        assert_eq!(sols, vec![(-1, -1), (-1, 1), (1, -1), (1, 1)]);
        assert_eq!(single_orbit(&sols), Some((1, 1)));
        assert_eq!(
            single_orbit(&cornacchia_enumerate(13).unwrap()),
            Some((-5, 1))
        );
        assert_eq!(
            single_orbit(&cornacchia_enumerate(31).unwrap()),
            Some((4, 2))
        );
        assert!(matches!(cornacchia_enumerate(5), Err(Error::NoSolution(5))));
    }

    #[test]
    fn single_orbit_below_ten_thousand() {
        for p in odd_primes_in(5, 10_000).into_iter().filter(|p| p % 3 == 1) {
            assert!(
                single_orbit(&cornacchia_enumerate(p).unwrap()).is_some(),
                "p = {p}"
            );
        }
    }

    #[test]
    fn structure_examples() {
        for p in [7, 13, 31] {
            let s = check_3x3_structure(p).unwrap();
            assert!(s.holds(), "{s:?}");
        }
        assert!(check_3x3_structure(11).is_err());
    }

    #[test]
    fn witness_matches_projective_count() {
        for w in gauss_sweep(3, 200).unwrap() {
            assert!(w.is_valid(), "{w:?}");
            assert_eq!(w.m_p, project_count(w.p));
            if let (Some(u), Some(vb)) = (w.u, w.v_bar) {
                assert_eq!(
                    single_orbit(&cornacchia_enumerate(w.p).unwrap()),
                    Some((u, vb))
                );
            }
        }
    }
}
