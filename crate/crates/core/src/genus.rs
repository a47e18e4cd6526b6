//! Genus of the projective closure of a trinomial curve, both from the
//! closed formula in `B` and from delta invariants at the coordinate points.

use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::lattice::{constants, det2, DiffMatrix, ExponentMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Position {
    AboveOrAbsent,
    Below,
}

/// Local equation `alpha x^r + beta y^s + gamma x^u y^v` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaCase {
    pub r: i64,
    pub s: i64,
    pub u: i64,
    pub v: i64,
    pub gamma_present: bool,
    pub position: Position,
}

impl DeltaCase {
    /// Builds the case and derives its position from `(u, v)`.
    pub fn classify(r: i64, s: i64, gamma: Option<(i64, i64)>) -> Result<Self> {
        let (u, v) = gamma.unwrap_or((0, 0));
        let below = gamma.is_some() && s * u + r * v < r * s;
        let case = DeltaCase {
            r,
            s,
            u,
            v,
            gamma_present: gamma.is_some(),
            position: if below {
                Position::Below
            } else {
                Position::AboveOrAbsent
            },
        };
        case.validate()?;
        Ok(case)
    }

    /// `(u, v)` lies exactly on the segment from `(r, 0)` to `(0, s)`.
    pub fn on_segment(&self) -> bool {
        self.gamma_present && self.s * self.u + self.r * self.v == self.r * self.s
    }

    pub fn validate(&self) -> Result<()> {
        let &DeltaCase { r, s, u, v, .. } = self;
        if [r, s, u, v].iter().any(|&x| x < 0) {
            return Err(Error::InvalidCase(format!("negative exponent in {self:?}")));
        }
        let strictly_below = self.gamma_present && s * u + r * v < r * s;
        match self.position {
            Position::Below if !strictly_below => Err(Error::InvalidCase(format!(
                "(u, v) = ({u}, {v}) is not strictly below the segment"
            ))),
            Position::AboveOrAbsent if strictly_below => Err(Error::InvalidCase(format!(
                "(u, v) = ({u}, {v}) is strictly below the segment"
            ))),
            _ => Ok(()),
        }
    }

    /// Twice the delta invariant.
    pub fn twice_delta(&self) -> i64 {
        let &DeltaCase { r, s, u, v, .. } = self;
        match self.position {
            Position::AboveOrAbsent => r * s - r - s + gcd(r, s),
            Position::Below => r * v + s * u - r - s + gcd(u, s - v) + gcd(v, r - u),
        }
    }

    fn exponents(&self) -> Vec<i64> {
        let mut out = vec![self.r, self.s];
        if self.position == Position::Below {
            out.extend([self.u, self.v, self.r - self.u, self.s - self.v]);
        }
        out
    }
}

pub fn delta(case: &DeltaCase) -> Result<i64> {
    case.validate()?;
    let twice = case.twice_delta();
    if twice % 2 != 0 || twice < 0 {
        return Err(Error::InvalidCase(format!(
            "2 delta = {twice} for {case:?}"
        )));
    }
    Ok(twice / 2)
}

pub fn genus_closed_form(b: &DiffMatrix) -> Result<i64> {
    let det = det2(b);
    if det == 0 {
        return Err(Error::SingularB);
    }
    let twice = det.abs()
        - gcd(b[0][0], b[0][1])
        - gcd(b[1][0], b[1][1])
        - gcd(b[0][0] - b[1][0], b[0][1] - b[1][1])
        + 2;
    if twice < 0 {
        return Err(Error::NegativeGenus(twice));
    }
    if twice % 2 != 0 {
        return Err(Error::NonIntegralGenus(twice));
    }
    Ok(twice / 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenusCase {
    /// `m = a11 > a31 + a32`.
    DominantX,
    /// `m = a31 + a32 >= a11`.
    DominantRhs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointDelta {
    pub point: String,
    /// `None` when the point is not on the curve.
    pub case: Option<DeltaCase>,
    pub delta: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusResult {
    pub exponents: [i64; 6],
    pub degree: i64,
    pub case: GenusCase,
    pub deltas: Vec<PointDelta>,
    pub genus: i64,
    pub closed_form: i64,
    pub notes: Vec<String>,
}

impl GenusResult {
    pub fn agrees(&self) -> bool {
        self.genus == self.closed_form
    }

    /// Some local exponent is divisible by `p`, so the classical delta
    /// formulas are only applied formally in characteristic `p`.
    pub fn char_p_caveat(&self, p: u64) -> bool {
        let p = p as i64;
        self.deltas
            .iter()
            .filter_map(|d| d.case)
            .flat_map(|c| c.exponents())
            .any(|x| x > 0 && x % p == 0)
    }
}

const POINTS: [&str; 3] = ["[1:0:0]", "[0:1:0]", "[0:0:1]"];

fn local_case(monomials: [(i64, i64); 3]) -> Result<Option<DeltaCase>> {
    if monomials.contains(&(0, 0)) {
        return Ok(None);
    }
    let pick = |pure: fn(&(i64, i64)) -> bool, key: fn(&(i64, i64)) -> i64| {
        monomials
            .iter()
            .enumerate()
            .filter(|(_, m)| pure(m))
            .min_by_key(|(_, m)| key(m))
            .map(|(i, _)| i)
    };
    let (Some(ix), Some(iy)) = (pick(|m| m.1 == 0, |m| m.0), pick(|m| m.0 == 0, |m| m.1)) else {
        return Err(Error::CaseMismatch(format!(
            "local monomials {monomials:?} share a variable (reducible closure)"
        )));
    };
    let third = (0..3).find(|&t| t != ix && t != iy).map(|t| monomials[t]);
    DeltaCase::classify(monomials[ix].0, monomials[iy].1, third).map(Some)
}

fn normalized_shape(a: &[[i64; 2]; 3]) -> bool {
    a[0][1] == 0 && a[1][0] == 0 && a[0][0] >= a[1][1] && a.iter().flatten().all(|&x| x >= 0)
}

pub fn genus_via_deltas(exponents: &ExponentMatrix) -> Result<GenusResult> {
    let a = exponents.a();
    if !normalized_shape(&a) {
        return Err(Error::UnnormalizedExponents(format!(
            "{:?}",
            exponents.row_major()
        )));
    }
    let (a11, a22, a31, a32) = (a[0][0], a[1][1], a[2][0], a[2][1]);
    let rhs = a31 + a32;
    let case = if a11 > rhs {
        // the right-hand monomial must not sit above the segment (a11, 0)-(0, a22)
        if a22 * a31 + a11 * a32 > a11 * a22 {
            return Err(Error::CaseMismatch(format!(
                "({a31}, {a32}) is above the segment from ({a11}, 0) to (0, {a22}); exchange y and z first"
            )));
        }
        GenusCase::DominantX
    } else {
        GenusCase::DominantRhs
    };
    let m = a11.max(rhs);
    let homogeneous = a.map(|[x, y]| [x, y, m - x - y]);
    let mut deltas = Vec::new();
    let mut notes = Vec::new();
    for (point, (l1, l2)) in POINTS.iter().zip([(1, 2), (0, 2), (0, 1)]) {
        let local = homogeneous.map(|h| (h[l1], h[l2]));
        let case = local_case(local)?;
        let delta = match &case {
            Some(c) => {
                if c.on_segment() {
                    notes.push(format!(
                        "{point}: third monomial on the Newton segment, treated as above"
                    ));
                }
                delta(c)?
            }
            None => 0,
        };
        deltas.push(PointDelta {
            point: point.to_string(),
            case,
            delta,
        });
    }
    let twice = (m - 1) * (m - 2) - 2 * deltas.iter().map(|d| d.delta).sum::<i64>();
    if twice < 0 {
        return Err(Error::NegativeGenus(twice));
    }
    let closed_form = genus_closed_form(&exponents.b())?;
    Ok(GenusResult {
        exponents: exponents.row_major(),
        degree: m,
        case,
        deltas,
        genus: twice / 2,
        closed_form,
        notes,
    })
}

/// Brings an exponent matrix into the shape accepted by [`genus_via_deltas`]
/// by permuting the three monomials, swapping `x` and `y`, and, when the
/// right-hand monomial is above the Newton segment, exchanging `y` and `z`.
/// None of these moves change the genus.
pub fn normalize(exponents: &ExponentMatrix) -> Result<ExponentMatrix> {
    let a = exponents.a();
    if !exponents.is_polynomial() {
        return Err(Error::UnnormalizedExponents(format!(
            "{:?}",
            exponents.row_major()
        )));
    }
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [1, 0, 2],
        [0, 2, 1],
        [2, 0, 1],
        [1, 2, 0],
        [2, 1, 0],
    ];
    let candidates = PERMS.iter().flat_map(|p| {
        let rows = p.map(|r| a[r]);
        [rows, rows.map(|[x, y]| [y, x])]
    });
    let shaped: Vec<_> = candidates.filter(normalized_shape).collect();
    // prefer an orientation that needs no coordinate exchange
    let direct = shaped.iter().find(|a| !needs_exchange(a));
    match (direct, shaped.first()) {
        (Some(a), _) => ExponentMatrix::new(*a),
        (None, Some(a)) => exchange(*a),
        (None, None) => Err(Error::UnnormalizedExponents(format!(
            "{:?}",
            exponents.row_major()
        ))),
    }
}

fn needs_exchange(a: &[[i64; 2]; 3]) -> bool {
    let (a11, a22, a31, a32) = (a[0][0], a[1][1], a[2][0], a[2][1]);
    a11 > a31 + a32 && a22 * a31 + a11 * a32 > a11 * a22
}

/// Exchanges `y` and `z`; a right-hand monomial strictly above the Newton
/// segment ends up strictly below it.
fn exchange(a: [[i64; 2]; 3]) -> Result<ExponentMatrix> {
    let (a11, a22, a31, a32) = (a[0][0], a[1][1], a[2][0], a[2][1]);
    ExponentMatrix::new([[a11, 0], [0, a11 - a22], [a31, a11 - a31 - a32]])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusComparison {
    pub q: u64,
    pub g: i64,
    pub twice_g_tilde: i64,
    pub g_tilde_at_most_g: bool,
    /// `|det B|` divides `(q - 1) gcd(d, e, f)` and `d, e, f` equal the
    /// field-free gcds.
    pub fully_split: bool,
    pub equal_when_split: bool,
}

pub fn compare_genera(exponents: &ExponentMatrix, q: u64) -> Result<GenusComparison> {
    let b = exponents.b();
    let g = genus_closed_form(&b)?;
    let c = constants(&b, q)?;
    let det = exponents.det().abs();
    let m = q as i64 - 1;
    let fully_split = (m * gcd(gcd(c.d, c.e), c.f)) % det == 0
        && c.d == gcd(b[0][0], b[0][1])
        && c.e == gcd(b[1][0], b[1][1])
        && c.f == gcd(b[0][0] - b[1][0], b[0][1] - b[1][1]);
    Ok(GenusComparison {
        q,
        g,
        twice_g_tilde: c.twice_g_tilde,
        g_tilde_at_most_g: c.twice_g_tilde <= 2 * g,
        fully_split,
        equal_when_split: !fully_split || c.twice_g_tilde == 2 * g,
    })
}
