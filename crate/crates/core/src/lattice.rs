//! Exponent data, the constants `d, e, f, k, w, 2g~`, and the cokernel of the
//! exponent difference matrix as a finite abelian group.
//!
//! The cokernel is `Z^2 / Λ` where `Λ` is spanned by the columns
//! `(b11, b21)`, `(b12, b22)` of `B` together with `(q-1) Z^2`: translating
//! `x -> rho x` shifts the coefficient indices `(i, j)` by the first column,
//! `y -> rho y` by the second. Cosets are indexed through the Hermite normal
//! form of `Λ`, which makes the lexicographically least representative an
//! O(1) computation.

use serde::{Deserialize, Serialize};

use crate::arith::{divides, gcd, gcd_all, modulo};
use crate::error::{Error, Result};

/// The 2x2 matrix of exponent differences `b_rc = a_rc - a_3c`.
pub type DiffMatrix = [[i64; 2]; 2];

pub fn det2(b: &DiffMatrix) -> i64 {
    b[0][0] * b[1][1] - b[0][1] * b[1][0]
}

/// Exponents of `x^{a11} y^{a12}`, `x^{a21} y^{a22}` and the right-hand
/// monomial `x^{a31} y^{a32}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExponentMatrix {
    a: [[i64; 2]; 3],
}

impl ExponentMatrix {
    /// Rejects collinear exponent vectors (`det B = 0`).
    pub fn new(a: [[i64; 2]; 3]) -> Result<Self> {
        let m = ExponentMatrix { a };
        if m.det() == 0 {
            return Err(Error::SingularB);
        }
        Ok(m)
    }

    /// `[a11, a12, a21, a22, a31, a32]`.
    pub fn from_row_major(v: [i64; 6]) -> Result<Self> {
        Self::new([[v[0], v[1]], [v[2], v[3]], [v[4], v[5]]])
    }

    pub fn a(&self) -> [[i64; 2]; 3] {
        self.a
    }

    pub fn row_major(&self) -> [i64; 6] {
        let a = self.a;
        [a[0][0], a[0][1], a[1][0], a[1][1], a[2][0], a[2][1]]
    }

    pub fn b(&self) -> DiffMatrix {
        let a = self.a;
        [
            [a[0][0] - a[2][0], a[0][1] - a[2][1]],
            [a[1][0] - a[2][0], a[1][1] - a[2][1]],
        ]
    }

    pub fn det(&self) -> i64 {
        det2(&self.b())
    }

    pub fn is_polynomial(&self) -> bool {
        self.a.iter().flatten().all(|&x| x >= 0)
    }
}

/// Every non-singular exponent matrix with entries in `lo..=hi`, in
/// row-major lexicographic order.
pub fn exponent_grid(lo: i64, hi: i64) -> impl Iterator<Item = ExponentMatrix> {
    let width = (hi - lo + 1).max(0);
    (0..width.pow(6)).filter_map(move |mut code| {
        let mut v = [0i64; 6];
        for x in v.iter_mut().rev() {
            *x = lo + code % width;
            code /= width;
        }
        ExponentMatrix::from_row_major(v).ok()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveConstants {
    pub d: i64,
    pub e: i64,
    pub f: i64,
    pub k: i64,
    pub w: i64,
    /// `k - d - e - f + 2`, i.e. twice `g~`.
    pub twice_g_tilde: i64,
}

impl CurveConstants {
    pub fn g_tilde_is_integral(&self) -> bool {
        self.twice_g_tilde % 2 == 0
    }
}

pub fn constants(b: &DiffMatrix, q: u64) -> Result<CurveConstants> {
    let det = det2(b);
    if det == 0 {
        return Err(Error::SingularB);
    }
    let m = q as i64 - 1;
    let d = gcd_all(&[b[0][0], b[0][1], m]);
    let e = gcd_all(&[b[1][0], b[1][1], m]);
    let f = gcd_all(&[b[0][0] - b[1][0], b[0][1] - b[1][1], m]);
    let k = gcd(m * gcd_all(&[d, e, f]), det);
    let w = if q.is_multiple_of(2) { 0 } else { m / 2 };
    Ok(CurveConstants {
        d,
        e,
        f,
        k,
        w,
        twice_g_tilde: k - d - e - f + 2,
    })
}

/// Invariant factors `(s1, s2)` of a 2x4 integer matrix by row and column
/// elimination.
pub fn smith_invariant_factors(l: &[[i64; 4]; 2]) -> Result<(i64, i64)> {
    let mut m = l.map(|row| row.map(|x| x as i128));
    loop {
        let pivot = (0..2)
            .flat_map(|r| (0..4).map(move |c| (r, c)))
            .filter(|&(r, c)| m[r][c] != 0)
            .min_by_key(|&(r, c)| m[r][c].abs());
        let Some((pr, pc)) = pivot else {
            return Err(Error::RankDeficient);
        };
        m.swap(0, pr);
        for row in m.iter_mut() {
            row.swap(0, pc);
        }
        let p = m[0][0];
        for c in 1..4 {
            let t = m[0][c] / p;
            for row in m.iter_mut() {
                row[c] -= t * row[0];
            }
        }
        let t = m[1][0] / p;
        let [r0, r1] = &mut m;
        for (b, a) in r1.iter_mut().zip(r0.iter()) {
            *b -= t * a;
        }
        if m[0][1..].iter().any(|&x| x != 0) || m[1][0] != 0 {
            continue;
        }
        if m[1][1..].iter().all(|&x| x % p == 0) {
            let s2 = m[1][1..].iter().fold(0i128, |acc, &x| gcd128(acc, x));
            if s2 == 0 {
                return Err(Error::RankDeficient);
            }
            return Ok((p.abs() as i64, s2 as i64));
        }
        // push a non-divisible entry into the pivot row
        let [r0, r1] = &mut m;
        for (a, b) in r0.iter_mut().zip(r1.iter()) {
            *a += b;
        }
    }
}

fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Hermite basis `(a, b), (0, c)` of a full-rank lattice in `Z^2`, with
/// `a, c > 0` and `0 <= b < c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hermite {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Hermite {
    /// `m` must be a lattice element on both axes (`(m, 0), (0, m)` in the span)
    /// and is used only to keep intermediate entries small.
    fn of(vectors: &[(i64, i64)], m: i64) -> Result<Self> {
        let mut rows: Vec<(i64, i64)> = vectors.to_vec();
        loop {
            let nonzero: Vec<usize> = (0..rows.len()).filter(|&r| rows[r].0 != 0).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let piv = *nonzero.iter().min_by_key(|&&r| rows[r].0.abs()).unwrap();
            let (px, py) = rows[piv];
            for &r in &nonzero {
                if r != piv {
                    let t = rows[r].0 / px;
                    rows[r].0 -= t * px;
                    rows[r].1 = modulo(rows[r].1 - t * py, m);
                }
            }
        }
        let (mut a, mut b) = rows
            .iter()
            .copied()
            .find(|r| r.0 != 0)
            .ok_or(Error::RankDeficient)?;
        let c = rows
            .iter()
            .filter(|r| r.0 == 0)
            .fold(0, |acc, r| gcd(acc, r.1));
        if c == 0 {
            return Err(Error::RankDeficient);
        }
        if a < 0 {
            a = -a;
            b = -b;
        }
        Ok(Hermite {
            a,
            b: modulo(b, c),
            c,
        })
    }

    pub fn index(&self) -> i64 {
        self.a * self.c
    }
}

/// `Z_{q-1}^2` modulo the column span of `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CokerGroup {
    q_minus_1: i64,
    gens: [(i64, i64); 2],
    invariant_factors: (i64, i64),
    hermite: Hermite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CokerSummary {
    pub q_minus_1: i64,
    pub generators: [(i64, i64); 2],
    pub invariant_factors: (i64, i64),
    pub order: i64,
    pub reps: usize,
}

pub fn coker(b: &DiffMatrix, q: u64) -> Result<CokerGroup> {
    if det2(b) == 0 {
        return Err(Error::SingularB);
    }
    let m = q as i64 - 1;
    let gens = [(b[0][0], b[1][0]), (b[0][1], b[1][1])];
    let l = [[b[0][0], b[0][1], m, 0], [b[1][0], b[1][1], 0, m]];
    let invariant_factors = smith_invariant_factors(&l)?;
    let vecs = [
        (modulo(gens[0].0, m), modulo(gens[0].1, m)),
        (modulo(gens[1].0, m), modulo(gens[1].1, m)),
        (m, 0),
        (0, m),
    ];
    let hermite = Hermite::of(&vecs, m)?;
    Ok(CokerGroup {
        q_minus_1: m,
        gens,
        invariant_factors,
        hermite,
    })
}

impl CokerGroup {
    pub fn q_minus_1(&self) -> i64 {
        self.q_minus_1
    }

    /// Translation generators, the columns of `B`.
    pub fn gens(&self) -> [(i64, i64); 2] {
        self.gens
    }

    pub fn invariant_factors(&self) -> (i64, i64) {
        self.invariant_factors
    }

    pub fn hermite(&self) -> Hermite {
        self.hermite
    }

    pub fn order(&self) -> i64 {
        self.hermite.index()
    }

    /// Lexicographically least representative in `[0, q-2]^2` of the coset of `(i, j)`.
    #[inline]
    pub fn rep_of(&self, i: i64, j: i64) -> (i64, i64) {
        let Hermite { a, b, c } = self.hermite;
        let i = modulo(i, self.q_minus_1);
        let t = i.div_euclid(a);
        (i - t * a, modulo(j - t * b, c))
    }

    /// Position of the coset of `(i, j)` in [`CokerGroup::coset_reps`].
    #[inline]
    pub fn rep_index(&self, i: i64, j: i64) -> usize {
        let (ri, rj) = self.rep_of(i, j);
        (ri * self.hermite.c + rj) as usize
    }

    /// All `k` canonical representatives, in increasing lexicographic order.
    pub fn coset_reps(&self) -> Vec<(i64, i64)> {
        let Hermite { a, c, .. } = self.hermite;
        (0..a).flat_map(|i| (0..c).map(move |j| (i, j))).collect()
    }

    pub fn is_identity(&self, v: (i64, i64)) -> bool {
        self.rep_of(v.0, v.1) == (0, 0)
    }

    /// Order of the subgroup generated by the given classes.
    pub fn subgroup_order(&self, gens: &[(i64, i64)]) -> usize {
        let k = self.order() as usize;
        let mut seen = vec![false; k];
        let mut stack = vec![(0i64, 0i64)];
        seen[0] = true;
        let mut count = 1;
        while let Some((i, j)) = stack.pop() {
            for g in gens {
                let next = self.rep_of(i + g.0, j + g.1);
                let idx = self.rep_index(next.0, next.1);
                if !seen[idx] {
                    seen[idx] = true;
                    count += 1;
                    stack.push(next);
                }
            }
        }
        count
    }

    pub fn summary(&self) -> CokerSummary {
        CokerSummary {
            q_minus_1: self.q_minus_1,
            generators: self.gens,
            invariant_factors: self.invariant_factors,
            order: self.order(),
            reps: self.order() as usize,
        }
    }
}

/// Least `r >= 1` with `r v` in the translation lattice.
pub fn element_order(v: (i64, i64), g: &CokerGroup) -> i64 {
    let k = g.order();
    (1..=k)
        .find(|&r| g.is_identity((r * v.0, r * v.1)))
        .expect("element orders divide the group order")
}

/// `k` divides `(q-1) gcd(d, e, f)` and `|det B|`; `d, e, f` divide `k` and `q-1`.
pub fn constants_are_consistent(c: &CurveConstants, b: &DiffMatrix, q: u64) -> bool {
    let m = q as i64 - 1;
    let g = gcd_all(&[c.d, c.e, c.f]);
    [c.d, c.e, c.f]
        .iter()
        .all(|&x| divides(x, m) && divides(x, c.k))
        && divides(c.k, m * g)
        && divides(c.k, det2(b))
        && c.w == if q.is_multiple_of(2) { 0 } else { m / 2 }
}
