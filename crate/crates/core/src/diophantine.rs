//! Integer certificates for the diagonal and elliptic examples: the
//! `x + y + z = 0, x^2 + y^2 + z^2 = 6q` program and the multiset identities
//! satisfied by the folded error terms.
//!
//! Each example check recounts its error terms by brute force with generic
//! field powers and compares with the folded table from [`crate::counter`].

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{exact_sqrt, gcd, isqrt, prime_power};
use crate::counter::{divisor_indicator, folded_exhaustive, CurveFamily};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::lattice::ExponentMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptiResult {
    pub q: u64,
    /// `None` when `6q` has no representation.
    pub max_x: Option<i64>,
    /// Every `(x, y, z)` attaining `max_x`, by increasing `y`.
    pub witnesses: Vec<(i64, i64, i64)>,
}

/// `max { x : x + y + z = 0, x^2 + y^2 + z^2 = 6q }`.
pub fn opti_max(q: u64) -> OptiResult {
    let q = q as i128;
    let top = isqrt(6 * q as u128) as i128;
    for x in (0..=top).rev() {
        // y^2 + xy + x^2 = 3q
        let Some(s) = exact_sqrt(12 * q - 3 * x * x) else {
            continue;
        };
        let mut ys: Vec<i128> = [-x - s, -x + s]
            .into_iter()
            .filter(|t| t % 2 == 0)
            .map(|t| t / 2)
            .collect();
        ys.dedup();
        if ys.is_empty() {
            continue;
        }
        let witnesses = ys
            .into_iter()
            .map(|y| (x as i64, y as i64, (-x - y) as i64))
            .collect();
        return OptiResult {
            q: q as u64,
            max_x: Some(x as i64),
            witnesses,
        };
    }
    OptiResult {
        q: q as u64,
        max_x: None,
        witnesses: Vec::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: i128,
    pub rhs: i128,
}

impl IdentityCheck {
    fn new(name: &str, lhs: i128, rhs: i128) -> Self {
        IdentityCheck {
            name: name.to_string(),
            lhs,
            rhs,
        }
    }

    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub exponents: [i64; 6],
    pub q: u64,
    /// Brute-force error terms at the listed points, in order.
    pub points: Vec<(i64, i64)>,
    pub values: Vec<i64>,
    pub identities: Vec<IdentityCheck>,
    /// The brute-force values agree with the folded table.
    pub matches_counter: bool,
}

impl ExampleReport {
    pub fn holds(&self) -> bool {
        self.matches_counter && self.identities.iter().all(IdentityCheck::holds)
    }

    /// Values sorted increasingly.
    pub fn multiset(&self) -> Vec<i64> {
        let mut v = self.values.clone();
        v.sort_unstable();
        v
    }
}

/// `N_ij` by direct evaluation of all three monomials with generic powers.
fn brute_n(fam: &CurveFamily, i: i64, j: i64) -> i64 {
    let f = fam.field();
    let a = fam.exponents().a();
    let nonzero: Vec<FieldElement> = f.nonzero_elements().collect();
    let powers = |e: i64| -> Vec<FieldElement> {
        nonzero
            .iter()
            .map(|&x| f.pow(x, e).expect("nonzero base"))
            .collect()
    };
    let (x1, y1, x2, y2, x3, y3) = (
        powers(a[0][0]),
        powers(a[0][1]),
        powers(a[1][0]),
        powers(a[1][1]),
        powers(a[2][0]),
        powers(a[2][1]),
    );
    let (ci, cj) = (f.exp(i), f.exp(j));
    let mut star = 0u64;
    for s in 0..nonzero.len() {
        for t in 0..nonzero.len() {
            let lhs = f.add(
                f.mul(ci, f.mul(x1[s], y1[t])),
                f.mul(cj, f.mul(x2[s], y2[t])),
            );
            if lhs == f.mul(x3[s], y3[t]) {
                star += 1;
            }
        }
    }
    let c = fam.constants();
    star as i64 - (f.q() as i64 + 1)
        + divisor_indicator(c.d, i)
        + divisor_indicator(c.e, j)
        + divisor_indicator(c.f, i - j + c.w)
}

fn report(
    fam: &CurveFamily,
    points: Vec<(i64, i64)>,
    identities: Vec<IdentityCheck>,
    values: Vec<i64>,
) -> ExampleReport {
    let folded = folded_exhaustive(fam);
    let g = fam.coker();
    let matches_counter = points
        .iter()
        .zip(&values)
        .all(|(&(i, j), &n)| folded[g.rep_index(i, j)].n == n);
    ExampleReport {
        exponents: fam.exponents().row_major(),
        q: fam.q(),
        points,
        values,
        identities,
        matches_counter,
    }
}

fn diagonal_quadratic(fam: &CurveFamily, odd: bool) -> Result<i64> {
    let [a11, a12, a21, a22, a31, a32] = fam.exponents().row_major();
    if a12 != 0
        || a21 != 0
        || a31 != 0
        || a32 != 0
        || a22 != 2
        || fam.q().is_multiple_of(2)
        || (a11 % 2 != 0) != odd
        || a11 <= 0
    {
        let parity = if odd { "odd" } else { "even" };
        return Err(Error::ShapeMismatch(format!(
            "expected x^a + y^2 = 1 with a {parity} and q odd, got {:?} over F_{}",
            fam.exponents().row_major(),
            fam.q()
        )));
    }
    Ok(gcd(a11, fam.q() as i64 - 1))
}

/// `x^a + y^2 = 1` with `a` odd: `alpha_i = N_{i0}` sum to zero, their squares
/// sum to `d(d-1)q`, and `N_{i1} = -N_{i0}`.
pub fn example2_conic_check(fam: &CurveFamily) -> Result<ExampleReport> {
    let d = diagonal_quadratic(fam, true)?;
    let q = fam.q() as i128;
    let points: Vec<(i64, i64)> = (0..d)
        .map(|i| (i, 0))
        .chain((0..d).map(|i| (i, 1)))
        .collect();
    let values: Vec<i64> = points.iter().map(|&(i, j)| brute_n(fam, i, j)).collect();
    let (col0, col1) = values.split_at(d as usize);
    let sum: i128 = col0.iter().map(|&a| a as i128).sum();
    let squares: i128 = col0.iter().map(|&a| (a as i128).pow(2)).sum();
    let opposite = col0.iter().zip(col1).filter(|(a, b)| **a != -**b).count();
    let identities = vec![
        IdentityCheck::new("sum", sum, 0),
        IdentityCheck::new("square_sum", squares, d as i128 * (d as i128 - 1) * q),
        IdentityCheck::new("columns_opposite_mismatches", opposite as i128, 0),
    ];
    Ok(report(fam, points, identities, values))
}

/// `x^a + y^2 = 1` with `a` even: the even- and odd-indexed `alpha_i` each sum
/// to zero and the squares sum to `d(d-2)q`.
pub fn example4_check(fam: &CurveFamily) -> Result<ExampleReport> {
    let d = diagonal_quadratic(fam, false)?;
    let q = fam.q() as i128;
    let points: Vec<(i64, i64)> = (0..d).map(|i| (i, 0)).collect();
    let values: Vec<i64> = points.iter().map(|&(i, j)| brute_n(fam, i, j)).collect();
    let even: i128 = values.iter().step_by(2).map(|&a| a as i128).sum();
    let odd: i128 = values.iter().skip(1).step_by(2).map(|&a| a as i128).sum();
    let squares: i128 = values.iter().map(|&a| (a as i128).pow(2)).sum();
    let identities = vec![
        IdentityCheck::new("even_index_sum", even, 0),
        IdentityCheck::new("odd_index_sum", odd, 0),
        IdentityCheck::new("square_sum", squares, d as i128 * (d as i128 - 2) * q),
    ];
    Ok(report(fam, points, identities, values))
}

pub const EXAMPLE5_EXPONENTS: [i64; 6] = [3, 0, 0, 2, 1, 0];

/// `x^3 + y^2 = x`: all error terms vanish for `q = 3 mod 4`; otherwise the
/// folded values are `{alpha, -alpha, beta, -beta}` with
/// `alpha^2 + beta^2 = 4q`, `alpha = N_00`, `beta = N_10`, and for
/// `q = p^(2n)` with `p = 3 mod 4` they are `{2p^n, -2p^n, 0, 0}`.
pub fn example5_check(q: u64) -> Result<ExampleReport> {
    if q.is_multiple_of(2) {
        return Err(Error::ShapeMismatch(format!("q = {q} must be odd")));
    }
    let field = Arc::new(FieldCtx::from_q(q)?);
    let fam = CurveFamily::new(ExponentMatrix::from_row_major(EXAMPLE5_EXPONENTS)?, field)?;
    let points = fam.coker().coset_reps();
    let values: Vec<i64> = points.iter().map(|&(i, j)| brute_n(&fam, i, j)).collect();
    let qi = q as i128;
    let mut identities = Vec::new();
    if q % 4 == 3 {
        let nonzero = values.iter().filter(|&&n| n != 0).count();
        identities.push(IdentityCheck::new("nonzero_values", nonzero as i128, 0));
    } else {
        let g = fam.coker();
        let alpha = values[g.rep_index(0, 0)] as i128;
        let beta = values[g.rep_index(1, 0)] as i128;
        let mut expected = vec![alpha, -alpha, beta, -beta];
        let mut got: Vec<i128> = values.iter().map(|&n| n as i128).collect();
        expected.sort_unstable();
        got.sort_unstable();
        identities.push(IdentityCheck::new(
            "plus_minus_multiset_mismatches",
            (expected != got) as i128,
            0,
        ));
        identities.push(IdentityCheck::new(
            "alpha_beta_squares",
            alpha * alpha + beta * beta,
            4 * qi,
        ));
        let (p, n) = prime_power(q).expect("field size is a prime power");
        if p % 4 == 3 && n % 2 == 0 {
            let pn = (p as i128).pow(n / 2);
            let mut closing = vec![-2 * pn, 0, 0, 2 * pn];
            closing.sort_unstable();
            identities.push(IdentityCheck::new(
                "closing_multiset_mismatches",
                (closing != got) as i128,
                0,
            ));
        }
    }
    Ok(report(&fam, points, identities, values))
}

/// `opti_max(q) >= max |N|` when the folded values of `x^3 + y^2 = 1`
/// satisfy the program's constraints.
pub fn opti_dominates(values: &[i64], q: u64) -> bool {
    let max = values.iter().map(|n| n.abs()).max().unwrap_or(0);
    opti_max(q).max_x.is_some_and(|x| x >= max) || values.iter().all(|&n| n == 0)
}

/// `x^2 <= 4q` for every witness.
pub fn witnesses_within_bound(r: &OptiResult) -> bool {
    r.witnesses
        .iter()
        .all(|&(x, _, _)| (x as i128).pow(2) <= 4 * r.q as i128)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(a: [i64; 6], q: u64) -> CurveFamily {
        CurveFamily::new(
            ExponentMatrix::from_row_major(a).unwrap(),
            Arc::new(FieldCtx::from_q(q).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn opti_examples() {
        assert_eq!(opti_max(997).max_x, Some(59));
        assert_eq!(opti_max(49).max_x, Some(14));
        let one = opti_max(1);
        assert_eq!(one.max_x, Some(2));
        assert!(one.witnesses.contains(&(2, -1, -1)));
        for q in 1..2000 {
            let r = opti_max(q);
            assert!(witnesses_within_bound(&r));
            for &(x, y, z) in &r.witnesses {
                assert_eq!(x + y + z, 0);
                assert_eq!(x * x + y * y + z * z, 6 * q as i64);
            }
        }
    }

    #[test]
    fn opti_matches_exhaustive_scan() {
        for q in 1..300i64 {
            let mut best = None;
            for x in -50..=50i64 {
                for y in -50..=50i64 {
                    let z = -x - y;
                    if x * x + y * y + z * z == 6 * q {
                        best = best.max(Some(x));
                    }
                }
            }
            assert_eq!(opti_max(q as u64).max_x, best, "q = {q}");
        }
    }

    #[test]
    fn example2_cases() {
        let r = example2_conic_check(&fam([3, 0, 0, 2, 0, 0], 997)).unwrap();
        assert!(r.holds(), "{r:?}");
        assert_eq!(r.values[..3], [10, 49, -59]);
        let point = example2_conic_check(&fam([3, 0, 0, 2, 0, 0], 11)).unwrap();
        assert!(point.holds());
        assert!(point.values.iter().all(|&n| n == 0));
        let sharp = example2_conic_check(&fam([3, 0, 0, 2, 0, 0], 25)).unwrap();
        assert!(sharp.holds());
        assert_eq!(sharp.multiset(), vec![-10, -5, -5, 5, 5, 10]);
        assert!(example2_conic_check(&fam([4, 0, 0, 2, 0, 0], 13)).is_err());
    }

    #[test]
    fn example4_cases() {
        for (a, q) in [(4, 13), (6, 13), (2, 13), (4, 25), (6, 49)] {
            let r = example4_check(&fam([a, 0, 0, 2, 0, 0], q)).unwrap();
            assert!(r.holds(), "{r:?}");
        }
        let degenerate = example4_check(&fam([2, 0, 0, 2, 0, 0], 13)).unwrap();
        assert!(degenerate.values.iter().all(|&n| n == 0));
    }

    #[test]
    fn example5_cases() {
        let zero = example5_check(7).unwrap();
        assert!(zero.holds());
        assert!(zero.values.iter().all(|&n| n == 0));
        let r13 = example5_check(13).unwrap();
        assert!(r13.holds());
        assert_eq!(r13.multiset(), vec![-6, -4, 4, 6]);
        let r9 = example5_check(9).unwrap();
        assert!(r9.holds());
        assert_eq!(r9.multiset(), vec![-6, 0, 0, 6]);
        assert!(example5_check(8).is_err());
    }
}
