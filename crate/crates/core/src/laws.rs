//! Machine checks of the linear, translation and quadratic identities of the
//! error terms, the coset-form square sum, and the resulting bounds.
//!
//! All verdicts are exact: sums are accumulated in `i128` and bounds are
//! compared in squared form.

use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::counter::{
    broadcast, n_table_with, CurveFamily, FamilyDescriptor, FullTable, NTable, TableMode,
    TableOptions,
};
use crate::error::{Error, Result};
use crate::lattice::{constants_are_consistent, element_order, CurveConstants, DiffMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawId {
    RowSums,
    ColumnSums,
    DiagonalSums,
    TranslationFirstColumn,
    TranslationSecondColumn,
    SquareSumFull,
    SquareSumFolded,
    FoldDirectAgreement,
    CorollaryBound,
    CosetBound,
    LagrangeConsistency,
    ElementOrders,
    GenerationHypothesis,
    ConstantsConsistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "at", rename_all = "snake_case")]
pub enum Witness {
    Row { i: i64 },
    Column { j: i64 },
    Diagonal { r: i64 },
    Cell { i: i64, j: i64 },
    Global,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawRecord {
    pub law: LawId,
    pub status: Status,
    /// Exact deviation; `0` for every pass.
    pub residual: i128,
    pub witness: Option<Witness>,
}

impl LawRecord {
    fn new(law: LawId, residual: i128, witness: Option<Witness>) -> Self {
        let status = if residual == 0 {
            Status::Pass
        } else {
            Status::Fail
        };
        LawRecord {
            law,
            status,
            residual,
            witness: if residual == 0 { None } else { witness },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Depth {
    Folded,
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    pub family: FamilyDescriptor,
    pub constants: CurveConstants,
    pub depth: Depth,
    pub g_tilde_integral: bool,
    pub laws: Vec<LawRecord>,
}

impl LawReport {
    pub fn all_pass(&self) -> bool {
        self.laws.iter().all(|l| l.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawRecord> {
        self.laws.iter().filter(|l| l.status == Status::Fail)
    }

    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let f = &self.family;
        let _ = writeln!(
            out,
            "exponents {:?}  q = {}  k = {}  2g~ = {}  depth = {:?}",
            f.exponents, f.field.q, self.constants.k, self.constants.twice_g_tilde, self.depth
        );
        for l in &self.laws {
            let status = match l.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            let witness = l.witness.map(|w| format!("{w:?}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "  {:<28} {status}  residual {:<6} {witness}",
                format!("{:?}", l.law),
                l.residual
            );
        }
        out
    }
}

fn worst<I: Iterator<Item = (i128, Witness)>>(law: LawId, it: I) -> LawRecord {
    let (res, w) = it
        .max_by_key(|(r, _)| r.abs())
        .unwrap_or((0, Witness::Global));
    LawRecord::new(law, res, Some(w))
}

/// Row, column and anti-diagonal (`i - j = r`) sums, all required to vanish.
pub fn check_row_sums(full: &FullTable) -> Vec<LawRecord> {
    let m = full.side() as i64;
    let rows = worst(
        LawId::RowSums,
        (0..m).map(|i| {
            (
                (0..m).map(|j| full.n(i, j) as i128).sum(),
                Witness::Row { i },
            )
        }),
    );
    let cols = worst(
        LawId::ColumnSums,
        (0..m).map(|j| {
            (
                (0..m).map(|i| full.n(i, j) as i128).sum(),
                Witness::Column { j },
            )
        }),
    );
    let diags = worst(
        LawId::DiagonalSums,
        (0..m).map(|r| {
            (
                (0..m).map(|i| full.n(i, i - r) as i128).sum(),
                Witness::Diagonal { r },
            )
        }),
    );
    vec![rows, cols, diags]
}

/// `N_{i+b11, j+b21} = N_ij = N_{i+b12, j+b22}` entrywise.
pub fn check_translation(full: &FullTable, b: &DiffMatrix) -> Vec<LawRecord> {
    let m = full.side() as i64;
    let shift = |law, di: i64, dj: i64| {
        worst(
            law,
            (0..m).flat_map(move |i| {
                (0..m).map(move |j| {
                    (
                        (full.n(i + di, j + dj) - full.n(i, j)) as i128,
                        Witness::Cell { i, j },
                    )
                })
            }),
        )
    };
    vec![
        shift(LawId::TranslationFirstColumn, b[0][0], b[1][0]),
        shift(LawId::TranslationSecondColumn, b[0][1], b[1][1]),
    ]
}

/// `sum N^2 = (q-1)^2 q 2g~` over the full table and `sum N^2 = k q 2g~`
/// over coset representatives.
pub fn check_square_sum(table: &NTable, c: &CurveConstants, q: u64) -> Vec<LawRecord> {
    let q = q as i128;
    let tg = c.twice_g_tilde as i128;
    let mut out = Vec::new();
    if let Some(full) = &table.full {
        let sum: i128 = full.n_values().iter().map(|&n| (n as i128).pow(2)).sum();
        out.push(LawRecord::new(
            LawId::SquareSumFull,
            sum - (q - 1).pow(2) * q * tg,
            Some(Witness::Global),
        ));
    }
    let sum: i128 = table.folded.iter().map(|e| (e.n as i128).pow(2)).sum();
    out.push(LawRecord::new(
        LawId::SquareSumFolded,
        sum - c.k as i128 * q * tg,
        Some(Witness::Global),
    ));
    out
}

/// `N^2 <= (2g~)^2 q` for every entry; residual is the largest excess.
pub fn check_corollary_bound(table: &NTable, c: &CurveConstants, q: u64) -> LawRecord {
    bound_record(
        LawId::CorollaryBound,
        table,
        (c.twice_g_tilde as i128).pow(2) * q as i128,
    )
}

/// The weaker `N^2 <= k^2 q`.
pub fn check_coset_bound(table: &NTable, c: &CurveConstants, q: u64) -> LawRecord {
    bound_record(LawId::CosetBound, table, (c.k as i128).pow(2) * q as i128)
}

fn bound_record(law: LawId, table: &NTable, limit: i128) -> LawRecord {
    worst(
        law,
        table.folded.iter().map(|e| {
            (
                ((e.n as i128).pow(2) - limit).max(0),
                Witness::Cell { i: e.i, j: e.j },
            )
        }),
    )
}

/// The bound on `|N_g|` for a function on a group with vanishing sums over
/// cosets of three cyclic subgroups of orders `n1, n2, n3` and square sum `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangeBound {
    /// Exact square of the bound.
    pub squared: Ratio<i128>,
    pub value: f64,
}

pub fn lagrange_bound(
    group_order: i64,
    n1: i64,
    n2: i64,
    n3: i64,
    k_sum: i128,
) -> Result<LagrangeBound> {
    if group_order < 1 || k_sum < 0 {
        return Err(Error::InvalidOrders(format!(
            "|G| = {group_order}, K = {k_sum}"
        )));
    }
    for n in [n1, n2, n3] {
        if n < 1 || group_order % n != 0 {
            return Err(Error::InvalidOrders(format!(
                "{n} does not divide |G| = {group_order}"
            )));
        }
    }
    let zero = LagrangeBound {
        squared: Ratio::from_integer(0),
        value: 0.0,
    };
    if [n1, n2, n3].contains(&1) {
        // a trivial generator forces every value to vanish
        return Ok(zero);
    }
    let r = |x: i64| Ratio::new(1i128, x as i128);
    let factor = Ratio::from_integer(1) + r(group_order) * 2 - r(n1) - r(n2) - r(n3);
    if factor < Ratio::from_integer(0) {
        return Err(Error::InvalidOrders(format!(
            "1 + 2/{group_order} - 1/{n1} - 1/{n2} - 1/{n3} is negative"
        )));
    }
    if factor == Ratio::from_integer(0) {
        return Ok(zero);
    }
    let squared = factor * k_sum;
    let value = (*squared.numer() as f64 / *squared.denom() as f64).sqrt();
    Ok(LagrangeBound { squared, value })
}

/// Re-derives `2g~ sqrt(q)` from [`lagrange_bound`] with the coset orders
/// `k/e, k/d, k/f` and compares squares exactly.
pub fn check_lagrange_consistency(c: &CurveConstants, q: u64) -> LawRecord {
    let k_sum = c.k as i128 * q as i128 * c.twice_g_tilde as i128;
    let target = Ratio::from_integer((c.twice_g_tilde as i128).pow(2) * q as i128);
    match lagrange_bound(c.k, c.k / c.e, c.k / c.d, c.k / c.f, k_sum) {
        Ok(b) => {
            let diff = b.squared - target;
            LawRecord::new(
                LawId::LagrangeConsistency,
                *diff.numer(),
                Some(Witness::Global),
            )
        }
        Err(_) => LawRecord::new(LawId::LagrangeConsistency, 1, Some(Witness::Global)),
    }
}

fn check_structure(fam: &CurveFamily) -> Vec<LawRecord> {
    let c = fam.constants();
    let g = fam.coker();
    let expected = [
        ((1, 0), c.k / c.e),
        ((0, 1), c.k / c.d),
        ((1, 1), c.k / c.f),
    ];
    let orders = expected.iter().map(|&(v, want)| {
        (
            (element_order(v, g) - want) as i128,
            Witness::Cell { i: v.0, j: v.1 },
        )
    });
    let k = g.order() as usize;
    let pairs = [[(1, 0), (0, 1)], [(1, 0), (1, 1)], [(0, 1), (1, 1)]];
    let generation = pairs.iter().map(|pair| {
        (
            (k - g.subgroup_order(pair)) as i128,
            Witness::Cell {
                i: pair[1].0,
                j: pair[1].1,
            },
        )
    });
    let b = fam.exponents().b();
    let consistent = constants_are_consistent(c, &b, fam.q())
        && c.twice_g_tilde >= 0
        && g.order() == c.k
        && g.invariant_factors().0 * g.invariant_factors().1 == c.k;
    vec![
        worst(LawId::ElementOrders, orders),
        worst(LawId::GenerationHypothesis, generation),
        LawRecord::new(
            LawId::ConstantsConsistent,
            (!consistent) as i128,
            Some(Witness::Global),
        ),
    ]
}

/// Runs every check applicable to `table`. The full-table checks run only
/// when `table.full` is present.
pub fn verify_table(fam: &CurveFamily, table: &NTable) -> LawReport {
    let c = *fam.constants();
    let q = fam.q();
    let mut laws = Vec::new();
    let depth = if let Some(full) = &table.full {
        let bc = broadcast(fam, &table.folded);
        let mismatches = (0..full.side() as i64)
            .flat_map(|i| (0..full.side() as i64).map(move |j| (i, j)))
            .filter(|&(i, j)| bc.n(i, j) != full.n(i, j) || bc.star(i, j) != full.star(i, j))
            .count();
        let first = full
            .first_difference(&bc)
            .map(|(i, j)| Witness::Cell { i, j });
        laws.push(LawRecord::new(
            LawId::FoldDirectAgreement,
            mismatches as i128,
            first,
        ));
        laws.extend(check_row_sums(full));
        laws.extend(check_translation(full, &fam.exponents().b()));
        Depth::Full
    } else {
        Depth::Folded
    };
    laws.extend(check_square_sum(table, &c, q));
    laws.push(check_corollary_bound(table, &c, q));
    laws.push(check_coset_bound(table, &c, q));
    laws.push(check_lagrange_consistency(&c, q));
    laws.extend(check_structure(fam));
    LawReport {
        family: fam.descriptor(),
        constants: c,
        depth,
        g_tilde_integral: c.g_tilde_is_integral(),
        laws,
    }
}

pub fn verify_family(fam: &CurveFamily, depth: Depth) -> Result<LawReport> {
    verify_family_with(fam, depth, &TableOptions::default())
}

pub fn verify_family_with(
    fam: &CurveFamily,
    depth: Depth,
    opts: &TableOptions,
) -> Result<LawReport> {
    let mode = match depth {
        Depth::Folded => TableMode::Folded,
        Depth::Full => TableMode::Full,
    };
    let table = n_table_with(fam, &TableOptions { mode, ..*opts })?;
    Ok(verify_table(fam, &table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;
    use crate::lattice::ExponentMatrix;
    use std::sync::Arc;

    fn family(a: [i64; 6], q: u64) -> CurveFamily {
        let field = Arc::new(FieldCtx::from_q(q).unwrap());
        CurveFamily::new(ExponentMatrix::from_row_major(a).unwrap(), field).unwrap()
    }

    #[test]
    fn lagrange_examples() {
        let p = 7i128;
        let b = lagrange_bound(9, 3, 3, 3, 18 * p).unwrap();
        assert_eq!(b.squared, Ratio::from_integer(4 * p));
        assert_eq!(
            lagrange_bound(4, 2, 2, 2, 1234).unwrap().squared,
            Ratio::from_integer(0)
        );
        assert_eq!(lagrange_bound(6, 1, 6, 6, 50).unwrap().value, 0.0);
        assert!(matches!(
            lagrange_bound(9, 2, 3, 3, 1),
            Err(Error::InvalidOrders(_))
        ));
    }

    #[test]
    fn gauss_family_passes_everything() {
        let fam = family([3, 0, 0, 3, 0, 0], 7);
        let report = verify_family(&fam, Depth::Full).unwrap();
        assert!(report.all_pass(), "{}", report.summary_table());
        assert_eq!(report.laws.len(), 14);
    }

    #[test]
    fn zero_table_passes_trivially() {
        let fam = family([3, 0, 0, 2, 1, 0], 7);
        let table = n_table_with(
            &fam,
            &TableOptions {
                mode: TableMode::Full,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(table
            .full
            .as_ref()
            .unwrap()
            .n_values()
            .iter()
            .all(|&n| n == 0));
        assert!(verify_table(&fam, &table).all_pass());
    }

    #[test]
    fn injected_fault_is_reported_with_witness() {
        let fam = family([3, 0, 0, 3, 0, 0], 13);
        let mut table = n_table_with(
            &fam,
            &TableOptions {
                mode: TableMode::Full,
                ..Default::default()
            },
        )
        .unwrap();
        table.full.as_mut().unwrap().perturb(4, 5, 1);
        let report = verify_table(&fam, &table);
        assert!(!report.all_pass());
        let rows = report
            .laws
            .iter()
            .find(|l| l.law == LawId::RowSums)
            .unwrap();
        assert_eq!(rows.status, Status::Fail);
        assert_eq!(rows.residual, 1);
        assert_eq!(rows.witness, Some(Witness::Row { i: 4 }));
        let agree = report
            .laws
            .iter()
            .find(|l| l.law == LawId::FoldDirectAgreement)
            .unwrap();
        assert_eq!(agree.witness, Some(Witness::Cell { i: 4, j: 5 }));
    }

    #[test]
    fn report_serializes() {
        let fam = family([3, 0, 0, 2, 0, 0], 13);
        let report = verify_family(&fam, Depth::Folded).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"square_sum_folded\""));
        assert!(json.contains("\"PASS\""));
    }
}
