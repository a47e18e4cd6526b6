use std::error::Error as StdError;
use std::io::{self, BufWriter, Write};
use std::sync::Arc;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use trinomial_core::arith::{odd_primes_in, prime_power};
use trinomial_core::counter::{
    folded_with, n_table_with, stream_full_csv, CurveFamily, FamilyDescriptor, FoldedEntry,
    Strategy, TableMode, TableOptions,
};
use trinomial_core::diophantine::{opti_max, OptiResult};
use trinomial_core::field::FieldProvenance;
use trinomial_core::gauss::{gauss_witness, project_count, Branch, GaussWitness};
use trinomial_core::genus::{
    compare_genera, genus_via_deltas, normalize, GenusComparison, GenusResult,
};
use trinomial_core::lattice::{exponent_grid, CokerSummary, CurveConstants};
use trinomial_core::laws::{verify_table, Depth, LawId, LawReport};
use trinomial_core::{Error, ExponentMatrix, FieldCtx};

use crate::output::json_line;
use crate::{Cli, Command, FamilyArgs, FieldArgs, Format, ModeArg};

type Result<T> = std::result::Result<T, Box<dyn StdError>>;

/// Runs the selected command; `Ok(false)` means some check failed.
pub fn run(cli: &Cli) -> Result<bool> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let ok = match &cli.command {
        Command::Constants(family) => constants(cli, family, &mut out)?,
        Command::Table {
            family,
            mode,
            strategy,
        } => table(cli, family, *mode, (*strategy).into(), &mut out)?,
        Command::Verify {
            family,
            depth,
            strategy,
            strict,
            inject_fault,
        } => verify(
            cli,
            family,
            *depth,
            (*strategy).into(),
            *strict,
            *inject_fault,
            &mut out,
        )?,
        Command::Gauss { p, from, to, check } => gauss(cli, *p, *from, *to, *check, &mut out)?,
        Command::Genus { exp, normalize, q } => genus(cli, *exp, *normalize, q, &mut out)?,
        Command::Opti { q } => opti(cli, *q, &mut out)?,
        Command::Sweep {
            exp,
            min,
            max,
            q,
            primes_below,
            depth,
            sample,
            seed,
        } => {
            let qs = match primes_below {
                Some(bound) => odd_primes_in(3, *bound),
                None => q.clone(),
            };
            let families = match exp {
                Some(e) => vec![ExponentMatrix::from_row_major(*e)?],
                None => exponent_grid(*min, *max).collect(),
            };
            sweep(
                cli,
                &families,
                &qs,
                (*depth).into(),
                *sample,
                *seed,
                &mut out,
            )?
        }
    };
    out.flush()?;
    Ok(ok)
}

fn usage(msg: impl Into<String>) -> Box<dyn StdError> {
    msg.into().into()
}

fn build_field(p: u64, n: u32, budget: u64) -> Result<Arc<FieldCtx>> {
    Ok(Arc::new(FieldCtx::build_with_budget(p, n, budget)?))
}

fn field_of_q(q: u64, budget: u64) -> Result<Arc<FieldCtx>> {
    let (p, n) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
    build_field(p, n, budget)
}

fn field(args: &FieldArgs, budget: u64) -> Result<Arc<FieldCtx>> {
    match (args.p, args.q) {
        (Some(p), _) => build_field(p, args.n, budget),
        (None, Some(q)) => field_of_q(q, budget),
        (None, None) => Err(usage("either --p or --q is required")),
    }
}

fn family(cli: &Cli, args: &FamilyArgs) -> Result<CurveFamily> {
    let f = field(&args.field, cli.budget)?;
    Ok(CurveFamily::new(
        ExponentMatrix::from_row_major(args.exp)?,
        f,
    )?)
}

fn no_csv(cli: &Cli, command: &str) -> Result<()> {
    if cli.format == Format::Csv {
        return Err(usage(format!("{command} has no CSV output")));
    }
    Ok(())
}

#[derive(Serialize)]
struct ConstantsBody {
    family: FamilyDescriptor,
    constants: CurveConstants,
    g_tilde_integral: bool,
    coker: CokerSummary,
}

fn constants<W: Write>(cli: &Cli, args: &FamilyArgs, out: &mut W) -> Result<bool> {
    no_csv(cli, "constants")?;
    let fam = family(cli, args)?;
    let c = *fam.constants();
    let body = ConstantsBody {
        family: fam.descriptor(),
        constants: c,
        g_tilde_integral: c.g_tilde_is_integral(),
        coker: fam.coker().summary(),
    };
    match cli.format {
        Format::Json => json_line(out, "constants", &body)?,
        _ => {
            writeln!(
                out,
                "exponents {:?}  B = {:?}  det B = {}",
                body.family.exponents, body.family.b, body.family.det_b
            )?;
            writeln!(
                out,
                "d = {}  e = {}  f = {}  k = {}  w = {}  2g~ = {}",
                c.d, c.e, c.f, c.k, c.w, c.twice_g_tilde
            )?;
            writeln!(
                out,
                "coker = Z_{} x Z_{}",
                body.coker.invariant_factors.0, body.coker.invariant_factors.1
            )?;
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct TableBody<'a> {
    family: FamilyDescriptor,
    constants: CurveConstants,
    mode: TableMode,
    strategy: Strategy,
    max_abs_n: i64,
    folded: &'a [FoldedEntry],
    #[serde(skip_serializing_if = "Option::is_none")]
    full: Option<Vec<Vec<i64>>>,
}

fn table<W: Write>(
    cli: &Cli,
    args: &FamilyArgs,
    mode: ModeArg,
    strategy: Strategy,
    out: &mut W,
) -> Result<bool> {
    let fam = family(cli, args)?;
    if cli.format == Format::Csv {
        let folded = folded_with(&fam, strategy);
        match mode {
            ModeArg::Folded => {
                writeln!(out, "i_rep,j_rep,star_count,N")?;
                for e in &folded {
                    writeln!(out, "{},{},{},{}", e.i, e.j, e.star, e.n)?;
                }
            }
            ModeArg::Full => stream_full_csv(&fam, &folded, &mut *out)?,
        }
        return Ok(true);
    }
    let mode = match mode {
        ModeArg::Folded => TableMode::Folded,
        ModeArg::Full => TableMode::Full,
    };
    let t = n_table_with(
        &fam,
        &TableOptions {
            mode,
            strategy,
            full_budget: cli.full_budget,
        },
    )?;
    let full = t.full.as_ref().map(|f| {
        let m = f.side() as i64;
        (0..m)
            .map(|i| (0..m).map(|j| f.n(i, j)).collect())
            .collect()
    });
    let body = TableBody {
        family: fam.descriptor(),
        constants: *fam.constants(),
        mode,
        strategy,
        max_abs_n: t.max_abs_n(),
        folded: &t.folded,
        full,
    };
    match cli.format {
        Format::Json => json_line(out, "table", &body)?,
        _ => {
            writeln!(out, "{:>6} {:>6} {:>10} {:>8}", "i", "j", "|C*|", "N")?;
            for e in body.folded {
                writeln!(out, "{:>6} {:>6} {:>10} {:>8}", e.i, e.j, e.star, e.n)?;
            }
            writeln!(out, "max |N| = {}", body.max_abs_n)?;
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct VerifyBody<'a> {
    all_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    injected_fault: Option<(i64, i64)>,
    #[serde(flatten)]
    report: &'a LawReport,
}

fn verify<W: Write>(
    cli: &Cli,
    args: &FamilyArgs,
    depth: ModeArg,
    strategy: Strategy,
    strict: bool,
    inject: Option<(i64, i64)>,
    out: &mut W,
) -> Result<bool> {
    no_csv(cli, "verify")?;
    let fam = family(cli, args)?;
    let mode = if inject.is_some() || depth == ModeArg::Full {
        TableMode::Full
    } else {
        TableMode::Folded
    };
    let mut t = n_table_with(
        &fam,
        &TableOptions {
            mode,
            strategy,
            full_budget: cli.full_budget,
        },
    )?;
    if let (Some((i, j)), Some(full)) = (inject, t.full.as_mut()) {
        full.perturb(i, j, 1);
    }
    let report = verify_table(&fam, &t);
    let ok = report.all_pass() && (!strict || report.g_tilde_integral);
    match cli.format {
        Format::Json => json_line(
            out,
            "verify",
            VerifyBody {
                all_pass: report.all_pass(),
                injected_fault: inject,
                report: &report,
            },
        )?,
        _ => {
            write!(out, "{}", report.summary_table())?;
            writeln!(out, "{}", if ok { "ALL PASS" } else { "FAIL" })?;
        }
    }
    Ok(ok)
}

#[derive(Serialize)]
struct GaussBody<'a> {
    #[serde(flatten)]
    witness: &'a GaussWitness,
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    project_count: Option<u64>,
}

fn gauss<W: Write>(
    cli: &Cli,
    p: Option<u64>,
    from: u64,
    to: u64,
    check: bool,
    out: &mut W,
) -> Result<bool> {
    let primes = match p {
        Some(p) => vec![p],
        None => odd_primes_in(from, to),
    };
    let rows: Vec<(GaussWitness, Option<u64>)> = primes
        .into_par_iter()
        .map(|p| Ok((gauss_witness(p)?, check.then(|| project_count(p)))))
        .collect::<std::result::Result<_, Error>>()?;
    if cli.format == Format::Csv {
        writeln!(out, "p,branch,M_p,u,v_bar")?;
    }
    let mut ok = true;
    for (w, projective) in &rows {
        let valid = w.is_valid() && projective.is_none_or(|m| m == w.m_p);
        ok &= valid;
        let opt = |x: Option<i64>| x.map(|v| v.to_string()).unwrap_or_default();
        let branch = match w.branch {
            Branch::Inert => "inert",
            Branch::Split => "split",
        };
        match cli.format {
            Format::Json => json_line(
                out,
                "gauss",
                GaussBody {
                    witness: w,
                    valid,
                    project_count: *projective,
                },
            )?,
            Format::Csv => writeln!(
                out,
                "{},{branch},{},{},{}",
                w.p,
                w.m_p,
                opt(w.u),
                opt(w.v_bar)
            )?,
            Format::Text => writeln!(
                out,
                "p = {:<6} {branch:<5}  M_p = {:<6} u = {:<5} v~ = {:<4} {}",
                w.p,
                w.m_p,
                opt(w.u),
                opt(w.v_bar),
                if valid { "ok" } else { "FAIL" }
            )?,
        }
    }
    Ok(ok)
}

#[derive(Serialize)]
struct GenusField {
    field: FieldProvenance,
    #[serde(flatten)]
    comparison: GenusComparison,
    char_p_caveat: bool,
}

#[derive(Serialize)]
struct GenusBody<'a> {
    input_exponents: [i64; 6],
    agrees: bool,
    #[serde(flatten)]
    result: &'a GenusResult,
    fields: Vec<GenusField>,
}

const CAVEAT: &str = "a local exponent is divisible by p; delta formulas applied formally";

fn genus<W: Write>(
    cli: &Cli,
    exp: [i64; 6],
    normalize_first: bool,
    qs: &[u64],
    out: &mut W,
) -> Result<bool> {
    no_csv(cli, "genus")?;
    let input = ExponentMatrix::from_row_major(exp)?;
    let e = if normalize_first {
        normalize(&input)?
    } else {
        input
    };
    let result = genus_via_deltas(&e)?;
    let mut fields = Vec::new();
    for &q in qs {
        let f = field_of_q(q, cli.budget)?;
        fields.push(GenusField {
            field: f.provenance(),
            comparison: compare_genera(&e, q)?,
            char_p_caveat: result.char_p_caveat(f.p()),
        });
    }
    let ok = result.agrees()
        && fields
            .iter()
            .all(|f| f.comparison.equal_when_split && f.comparison.g_tilde_at_most_g);
    match cli.format {
        Format::Json => json_line(
            out,
            "genus",
            GenusBody {
                input_exponents: exp,
                agrees: result.agrees(),
                result: &result,
                fields,
            },
        )?,
        _ => {
            writeln!(
                out,
                "exponents {:?}  degree {}  case {:?}",
                result.exponents, result.degree, result.case
            )?;
            for d in &result.deltas {
                writeln!(out, "  delta {} = {}", d.point, d.delta)?;
            }
            writeln!(
                out,
                "g = {} (closed form {})",
                result.genus, result.closed_form
            )?;
            for note in &result.notes {
                writeln!(out, "  note: {note}")?;
            }
            for f in &fields {
                let c = &f.comparison;
                writeln!(
                    out,
                    "q = {:<6} 2g~ = {:<4} 2g = {:<4} fully split: {}",
                    c.q,
                    c.twice_g_tilde,
                    2 * c.g,
                    c.fully_split
                )?;
                if f.char_p_caveat {
                    writeln!(out, "  {CAVEAT}")?;
                }
            }
        }
    }
    Ok(ok)
}

#[derive(Serialize)]
struct OptiBody<'a> {
    #[serde(flatten)]
    result: &'a OptiResult,
    witness: Option<(i64, i64, i64)>,
    field: Option<FieldProvenance>,
}

fn opti<W: Write>(cli: &Cli, q: u64, out: &mut W) -> Result<bool> {
    no_csv(cli, "opti")?;
    if q == 0 {
        return Err(usage("q must be positive"));
    }
    let r = opti_max(q);
    let field = prime_power(q)
        .filter(|_| q <= cli.budget)
        .map(|_| field_of_q(q, cli.budget).map(|f| f.provenance()))
        .transpose()?;
    let witness = r.witnesses.first().copied();
    match cli.format {
        Format::Json => json_line(
            out,
            "opti",
            OptiBody {
                result: &r,
                witness,
                field,
            },
        )?,
        _ => match (r.max_x, witness) {
            (Some(x), Some((a, b, c))) => writeln!(out, "max x = {x}  witness ({a}, {b}, {c})")?,
            _ => writeln!(out, "infeasible")?,
        },
    }
    Ok(true)
}

#[derive(Serialize)]
struct SweepLine {
    exponents: [i64; 6],
    field: FieldProvenance,
    depth: Depth,
    constants: CurveConstants,
    max_abs_n: i64,
    all_pass: bool,
    failed: Vec<LawId>,
}

fn sweep<W: Write>(
    cli: &Cli,
    families: &[ExponentMatrix],
    qs: &[u64],
    depth: Depth,
    sample_size: Option<usize>,
    seed: u64,
    out: &mut W,
) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mode = match depth {
        Depth::Folded => TableMode::Folded,
        Depth::Full => TableMode::Full,
    };
    let opts = TableOptions {
        mode,
        full_budget: cli.full_budget,
        ..TableOptions::default()
    };
    if cli.format == Format::Csv {
        writeln!(
            out,
            "a11,a12,a21,a22,a31,a32,q,k,twice_g_tilde,max_abs_n,pass"
        )?;
    }
    let mut ok = true;
    for &q in qs {
        let f = field_of_q(q, cli.budget)?;
        let chosen: Vec<&ExponentMatrix> = match sample_size {
            Some(n) if n < families.len() => {
                let mut idx = sample(&mut rng, families.len(), n).into_vec();
                idx.sort_unstable();
                idx.into_iter().map(|i| &families[i]).collect()
            }
            _ => families.iter().collect(),
        };
        let lines: Vec<SweepLine> = chosen
            .into_par_iter()
            .map(|e| {
                let fam = CurveFamily::new(*e, f.clone())?;
                let t = n_table_with(&fam, &opts)?;
                let report = verify_table(&fam, &t);
                Ok(SweepLine {
                    exponents: e.row_major(),
                    field: f.provenance(),
                    depth,
                    constants: *fam.constants(),
                    max_abs_n: t.max_abs_n(),
                    all_pass: report.all_pass(),
                    failed: report.failures().map(|l| l.law).collect(),
                })
            })
            .collect::<std::result::Result<_, Error>>()?;
        for l in &lines {
            ok &= l.all_pass;
            let c = &l.constants;
            let verdict = if l.all_pass { "PASS" } else { "FAIL" };
            match cli.format {
                Format::Json => json_line(out, "sweep", l)?,
                Format::Csv => {
                    let e = l.exponents.map(|x| x.to_string()).join(",");
                    writeln!(
                        out,
                        "{e},{q},{},{},{},{verdict}",
                        c.k, c.twice_g_tilde, l.max_abs_n
                    )?
                }
                Format::Text => writeln!(
                    out,
                    "{:?} q = {q:<5} k = {:<4} 2g~ = {:<4} max |N| = {:<5} {verdict}",
                    l.exponents, c.k, c.twice_g_tilde, l.max_abs_n
                )?,
            }
        }
    }
    Ok(ok)
}
