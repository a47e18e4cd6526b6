//! Exact point counts `|C*_ij|`, `|C_ij|` and the error terms
//!
//! ```text
//! N_ij = |C*_ij| - (q + 1) + D_d(i) + D_e(j) + D_f(i - j + w)
//! ```
//!
//! for the family `rho^i x^{a11} y^{a12} + rho^j x^{a21} y^{a22} = x^{a31} y^{a32}`.
//!
//! Three independent counting routes are provided:
//!
//! * [`count_star`]: exhaustive over `(x, y) = (rho^s, rho^t)`, adding the
//!   two left-hand monomials as field elements.
//! * [`full_direct`]: one sweep per row `i`, solving for the unique `j` of
//!   each point in the log domain. `O((q-1)^3)` for the whole table.
//! * [`folded_fibre`]: counts the `q - 2` solutions of `rho^a + rho^b = 1`
//!   per coset; every point of the torus lies over one of them in a fibre of
//!   size `k`. `O(q)` for the folded table.

use std::io::{self, Write};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{divides, gcd_all, modulo};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement, FieldProvenance};
use crate::lattice::{coker, constants, CokerGroup, CurveConstants, DiffMatrix, ExponentMatrix};

/// Default cap on `q` for full `(q-1) x (q-1)` tables.
pub const DEFAULT_FULL_TABLE_BUDGET: u64 = 1 << 12;

#[derive(Debug, Clone)]
pub struct CurveFamily {
    exponents: ExponentMatrix,
    field: Arc<FieldCtx>,
    constants: CurveConstants,
    coker: CokerGroup,
}

/// Identity of a family for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDescriptor {
    pub exponents: [i64; 6],
    pub b: DiffMatrix,
    pub det_b: i64,
    pub field: FieldProvenance,
}

impl CurveFamily {
    pub fn new(exponents: ExponentMatrix, field: Arc<FieldCtx>) -> Result<Self> {
        let b = exponents.b();
        let constants = constants(&b, field.q())?;
        let coker = coker(&b, field.q())?;
        Ok(CurveFamily {
            exponents,
            field,
            constants,
            coker,
        })
    }

    pub fn exponents(&self) -> &ExponentMatrix {
        &self.exponents
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn field_arc(&self) -> Arc<FieldCtx> {
        Arc::clone(&self.field)
    }

    pub fn constants(&self) -> &CurveConstants {
        &self.constants
    }

    pub fn coker(&self) -> &CokerGroup {
        &self.coker
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    pub fn descriptor(&self) -> FamilyDescriptor {
        FamilyDescriptor {
            exponents: self.exponents.row_major(),
            b: self.exponents.b(),
            det_b: self.exponents.det(),
            field: self.field.provenance(),
        }
    }

    /// `D_d(i) + D_e(j) + D_f(i - j + w)`.
    pub fn axis_correction(&self, i: i64, j: i64) -> i64 {
        let c = &self.constants;
        divisor_indicator(c.d, i) + divisor_indicator(c.e, j) + divisor_indicator(c.f, i - j + c.w)
    }

    /// `|C*_ij| - (q + 1) + D_d(i) + D_e(j) + D_f(i - j + w)`.
    pub fn n_from_star(&self, i: i64, j: i64, star: u64) -> i64 {
        star as i64 - (self.q() as i64 + 1) + self.axis_correction(i, j)
    }

    fn reduced_a(&self) -> [[usize; 2]; 3] {
        let m = self.field.group_order();
        self.exponents.a().map(|r| r.map(|x| modulo(x, m) as usize))
    }

    fn reduced_b(&self) -> [[usize; 2]; 2] {
        let m = self.field.group_order();
        self.exponents.b().map(|r| r.map(|x| modulo(x, m) as usize))
    }
}

/// `ell` if `ell | i`, else `0`.
pub fn divisor_indicator(ell: i64, i: i64) -> i64 {
    if divides(ell, i) {
        ell
    } else {
        0
    }
}

/// `sum_{i=0}^{q-2} D_ell(i)^r` in closed form, `ell^(r-1) (q-1)`, for `ell | q-1`.
pub fn indicator_power_sum(ell: i64, q: u64, r: u32) -> i64 {
    ell.pow(r.saturating_sub(1)) * (q as i64 - 1)
}

/// Solutions of `rho^i x^a1 y^a2 = 1` in `(F_q^*)^2` in closed form,
/// `(q-1) D_ell(i)` with `ell = gcd(a1, a2, q-1)`.
pub fn monomial_solutions(a1: i64, a2: i64, i: i64, q: u64) -> u64 {
    let m = q as i64 - 1;
    (m * divisor_indicator(gcd_all(&[a1, a2, m]), i)) as u64
}

/// `|C*_ij|` by enumerating `(F_q^*)^2`.
pub fn count_star(i: i64, j: i64, fam: &CurveFamily) -> u64 {
    let f = fam.field();
    let m = f.group_order() as usize;
    let a = fam.reduced_a();
    let i = modulo(i, m as i64) as usize;
    let j = modulo(j, m as i64) as usize;
    let step = |x: usize, by: usize| {
        let y = x + by;
        if y >= m {
            y - m
        } else {
            y
        }
    };
    (0..m)
        .into_par_iter()
        .map(|s| {
            let mut l1 = (i + a[0][0] * s) % m;
            let mut l2 = (j + a[1][0] * s) % m;
            let mut l3 = (a[2][0] * s) % m;
            let mut count = 0u64;
            for _ in 0..m {
                if f.add(f.exp_at(l1), f.exp_at(l2)) == f.exp_at(l3) {
                    count += 1;
                }
                l1 = step(l1, a[0][1]);
                l2 = step(l2, a[1][1]);
                l3 = step(l3, a[2][1]);
            }
            count
        })
        .sum()
}

fn zero_pow(e: i64) -> bool {
    e == 0
}

/// `|C_ij|` over all of `F_q^2`, with `0^0 = 1`.
pub fn count_full(i: i64, j: i64, fam: &CurveFamily) -> Result<u64> {
    let a = fam.exponents().a();
    if let Some(&neg) = a.iter().flatten().find(|&&x| x < 0) {
        return Err(Error::NegativeExponent(neg));
    }
    let f = fam.field();
    let ci = f.exp(i);
    let cj = f.exp(j);
    let holds = |x: FieldElement, y: FieldElement| -> bool {
        let mono = |r: usize| f.mul(f.pow(x, a[r][0]).unwrap(), f.pow(y, a[r][1]).unwrap());
        f.add(f.mul(ci, mono(0)), f.mul(cj, mono(1))) == mono(2)
    };
    let mut total = count_star(i, j, fam);
    for t in f.nonzero_elements() {
        if holds(FieldElement::ZERO, t) {
            total += 1;
        }
        if holds(t, FieldElement::ZERO) {
            total += 1;
        }
    }
    if holds(FieldElement::ZERO, FieldElement::ZERO) {
        total += 1;
    }
    debug_assert_eq!(
        holds(FieldElement::ZERO, FieldElement::ZERO),
        origin_rule(fam.exponents(), ci, cj, f)
    );
    Ok(total)
}

// The origin satisfies the equation iff the constant terms (rows with
// zero total degree) balance.
fn origin_rule(e: &ExponentMatrix, ci: FieldElement, cj: FieldElement, f: &FieldCtx) -> bool {
    let a = e.a();
    let constant = |r: usize| zero_pow(a[r][0]) && zero_pow(a[r][1]);
    let mut lhs = FieldElement::ZERO;
    if constant(0) {
        lhs = f.add(lhs, ci);
    }
    if constant(1) {
        lhs = f.add(lhs, cj);
    }
    let rhs = if constant(2) {
        FieldElement::ONE
    } else {
        FieldElement::ZERO
    };
    lhs == rhs
}

pub fn n_value(i: i64, j: i64, fam: &CurveFamily) -> i64 {
    fam.n_from_star(i, j, count_star(i, j, fam))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableMode {
    Full,
    Folded,
}

/// How the folded table is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// [`count_star`] once per coset representative.
    #[default]
    Exhaustive,
    /// [`folded_fibre`].
    Fibre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldedEntry {
    pub i: i64,
    pub j: i64,
    pub star: u64,
    pub n: i64,
}

/// Row-major `(q-1) x (q-1)` tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullTable {
    m: usize,
    star: Vec<u64>,
    n: Vec<i64>,
}

impl FullTable {
    pub fn side(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn n(&self, i: i64, j: i64) -> i64 {
        let m = self.m as i64;
        self.n[(modulo(i, m) * m + modulo(j, m)) as usize]
    }

    #[inline]
    pub fn star(&self, i: i64, j: i64) -> u64 {
        let m = self.m as i64;
        self.star[(modulo(i, m) * m + modulo(j, m)) as usize]
    }

    pub fn n_values(&self) -> &[i64] {
        &self.n
    }

    /// Overwrites one entry; used to exercise failure reporting.
    pub fn perturb(&mut self, i: i64, j: i64, delta: i64) {
        let m = self.m as i64;
        let idx = (modulo(i, m) * m + modulo(j, m)) as usize;
        self.n[idx] += delta;
    }

    /// First cell where the two tables differ.
    pub fn first_difference(&self, other: &FullTable) -> Option<(i64, i64)> {
        if self.m != other.m {
            return Some((0, 0));
        }
        let idx = (0..self.n.len())
            .find(|&x| self.n[x] != other.n[x] || self.star[x] != other.star[x])?;
        Some(((idx / self.m) as i64, (idx % self.m) as i64))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NTable {
    /// One entry per canonical coset representative, in lexicographic order.
    pub folded: Vec<FoldedEntry>,
    /// Full table counted directly, when requested.
    pub full: Option<FullTable>,
}

impl NTable {
    pub fn folded_values(&self) -> Vec<i64> {
        self.folded.iter().map(|e| e.n).collect()
    }

    pub fn folded_n(&self, fam: &CurveFamily, i: i64, j: i64) -> i64 {
        self.folded[fam.coker().rep_index(i, j)].n
    }

    pub fn max_abs_n(&self) -> i64 {
        self.folded.iter().map(|e| e.n.abs()).max().unwrap_or(0)
    }

    /// `i_rep,j_rep,star_count,N` rows.
    pub fn write_folded_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "i_rep,j_rep,star_count,N")?;
        for e in &self.folded {
            writeln!(out, "{},{},{},{}", e.i, e.j, e.star, e.n)?;
        }
        Ok(())
    }
}

/// Streams the full table `i,j,star,N` by broadcasting the folded values,
/// without materializing it.
pub fn stream_full_csv<W: Write>(
    fam: &CurveFamily,
    folded: &[FoldedEntry],
    mut out: W,
) -> io::Result<()> {
    let m = fam.field().group_order();
    writeln!(out, "i,j,star,N")?;
    for i in 0..m {
        for j in 0..m {
            let e = &folded[fam.coker().rep_index(i, j)];
            let n = e.n;
            let star = n + fam.q() as i64 + 1 - fam.axis_correction(i, j);
            writeln!(out, "{i},{j},{star},{n}")?;
        }
    }
    Ok(())
}

pub fn folded_exhaustive(fam: &CurveFamily) -> Vec<FoldedEntry> {
    fam.coker()
        .coset_reps()
        .into_par_iter()
        .map(|(i, j)| {
            let star = count_star(i, j, fam);
            FoldedEntry {
                i,
                j,
                star,
                n: fam.n_from_star(i, j, star),
            }
        })
        .collect()
}

pub fn folded_fibre(fam: &CurveFamily) -> Vec<FoldedEntry> {
    let f = fam.field();
    let g = fam.coker();
    let m = f.group_order() as usize;
    let mut hits = vec![0u64; g.order() as usize];
    for c in 0..m {
        if let Some(l) = f.log_one_minus(c) {
            hits[g.rep_index(c as i64, l as i64)] += 1;
        }
    }
    let fibre = g.order() as u64;
    g.coset_reps()
        .into_iter()
        .zip(hits)
        .map(|((i, j), h)| {
            let star = fibre * h;
            FoldedEntry {
                i,
                j,
                star,
                n: fam.n_from_star(i, j, star),
            }
        })
        .collect()
}

pub fn folded_with(fam: &CurveFamily, strategy: Strategy) -> Vec<FoldedEntry> {
    match strategy {
        Strategy::Exhaustive => folded_exhaustive(fam),
        Strategy::Fibre => folded_fibre(fam),
    }
}

/// Every `|C*_ij|` by direct enumeration, independent of any coset structure.
pub fn full_direct(fam: &CurveFamily) -> FullTable {
    let f = fam.field();
    let m = f.group_order() as usize;
    let b = fam.reduced_b();
    let rows: Vec<Vec<u64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0u64; m];
            for s in 0..m {
                let mut u = (b[0][0] * s) % m;
                let mut v = (b[1][0] * s) % m;
                for _ in 0..m {
                    // rho^{i+u} + rho^{j+v} = 1  =>  j = dlog(1 - rho^{i+u}) - v
                    let c = (i + u) % m;
                    if let Some(l) = f.log_one_minus(c) {
                        let j = (l as usize + m - v) % m;
                        row[j] += 1;
                    }
                    u = (u + b[0][1]) % m;
                    v = (v + b[1][1]) % m;
                }
            }
            row
        })
        .collect();
    let star: Vec<u64> = rows.into_iter().flatten().collect();
    let n = star
        .iter()
        .enumerate()
        .map(|(idx, &s)| fam.n_from_star((idx / m) as i64, (idx % m) as i64, s))
        .collect();
    FullTable { m, star, n }
}

/// The full table implied by the folded values.
pub fn broadcast(fam: &CurveFamily, folded: &[FoldedEntry]) -> FullTable {
    let m = fam.field().group_order() as usize;
    let mut star = Vec::with_capacity(m * m);
    let mut n = Vec::with_capacity(m * m);
    for i in 0..m as i64 {
        for j in 0..m as i64 {
            let e = &folded[fam.coker().rep_index(i, j)];
            n.push(e.n);
            star.push((e.n + fam.q() as i64 + 1 - fam.axis_correction(i, j)) as u64);
        }
    }
    FullTable { m, star, n }
}

#[derive(Debug, Clone, Copy)]
pub struct TableOptions {
    pub mode: TableMode,
    pub strategy: Strategy,
    pub full_budget: u64,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            mode: TableMode::Folded,
            strategy: Strategy::Exhaustive,
            full_budget: DEFAULT_FULL_TABLE_BUDGET,
        }
    }
}

pub fn n_table(fam: &CurveFamily, mode: TableMode) -> Result<NTable> {
    n_table_with(
        fam,
        &TableOptions {
            mode,
            ..TableOptions::default()
        },
    )
}

pub fn n_table_with(fam: &CurveFamily, opts: &TableOptions) -> Result<NTable> {
    let full = match opts.mode {
        TableMode::Folded => None,
        TableMode::Full if fam.q() > opts.full_budget => {
            return Err(Error::TableTooLarge {
                q: fam.q(),
                budget: opts.full_budget,
            })
        }
        TableMode::Full => Some(full_direct(fam)),
    };
    Ok(NTable {
        folded: folded_with(fam, opts.strategy),
        full,
    })
}
