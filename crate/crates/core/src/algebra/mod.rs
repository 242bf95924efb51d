//! Finitely presented modules over `R = Q[x, y]`: Gröbner bases, syzygies,
//! duals, the evaluation map into the double dual, and colength at the origin.

mod gcd;
mod groebner;
mod poly;

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

pub use gcd::{exact_quotient, gcd, gcd_all};
pub use groebner::{groebner, GroebnerBasis, ModuleOrder, MonomialOrder, Term, TermOrder};
pub use poly::{
    combine, is_zero_vec, unit_vec, vec_add, vec_scale, vec_sub, zero_vec, PolyVec, XYPoly,
};

use crate::linalg::{rank_of_columns, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("module is torsion: its dual vanishes")]
    RankDeficient,
    #[error("truncated dimensions did not stabilize up to m = {last_m}: {dims:?}")]
    NonFiniteLength {
        last_m: u32,
        dims: Vec<(u32, usize)>,
    },
    #[error("no linear form is a parameter on the saturation")]
    NoParameter,
    #[error("torsion not killed by h^k for k ≤ {max_power}")]
    TorsionNotKilled { max_power: u32 },
    #[error("vector does not lie in the submodule")]
    LiftFailed,
    #[error("relation {index} has length {found}, expected {expected}")]
    ShapeMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
}

/// `R^gens / span(relations)`; each relation is a column of length `gens`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    gens: usize,
    relations: Vec<PolyVec>,
}

impl Presentation {
    pub fn new(gens: usize, relations: Vec<PolyVec>) -> Result<Self, AlgebraError> {
        for (index, r) in relations.iter().enumerate() {
            if r.len() != gens {
                return Err(AlgebraError::ShapeMismatch {
                    index,
                    found: r.len(),
                    expected: gens,
                });
            }
        }
        Ok(Self {
            gens,
            relations: relations.into_iter().filter(|r| !is_zero_vec(r)).collect(),
        })
    }

    pub fn free(gens: usize) -> Self {
        Self {
            gens,
            relations: Vec::new(),
        }
    }

    pub fn gens(&self) -> usize {
        self.gens
    }

    pub fn relations(&self) -> &[PolyVec] {
        &self.relations
    }

    /// Relation matrix rows: row `i` lists the `i`-th entry of every relation.
    pub fn rows(&self) -> Vec<PolyVec> {
        (0..self.gens)
            .map(|i| self.relations.iter().map(|r| r[i].clone()).collect())
            .collect()
    }
}

/// Homomorphism given by the images of the source generators, each a
/// vector of length `target.gens()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    pub source: Presentation,
    pub target: Presentation,
    pub columns: Vec<PolyVec>,
}

impl ModuleMap {
    /// Source relations land in the span of target relations.
    pub fn is_compatible(&self) -> bool {
        let gb = groebner(
            self.target.gens,
            &self.target.relations,
            TermOrder::default(),
        );
        self.source
            .relations
            .iter()
            .all(|rel| gb.contains(&combine(self.target.gens, &self.columns, rel)))
    }

    pub fn cokernel(&self) -> Presentation {
        let mut relations = self.target.relations.clone();
        relations.extend(self.columns.iter().cloned());
        Presentation {
            gens: self.target.gens,
            relations: relations.into_iter().filter(|r| !is_zero_vec(r)).collect(),
        }
    }
}

fn pot(order: TermOrder) -> TermOrder {
    TermOrder {
        monomial: order.monomial,
        module: ModuleOrder::Pot,
    }
}

/// Gröbner basis of `(f_i, e_i) ∈ R^{rank+s}`, used for syzygies and lifts.
#[derive(Clone, Debug)]
pub struct Lifter {
    rank: usize,
    count: usize,
    gb: GroebnerBasis,
}

impl Lifter {
    pub fn new(rank: usize, columns: &[PolyVec], order: TermOrder) -> Self {
        let count = columns.len();
        let augmented: Vec<PolyVec> = columns
            .iter()
            .enumerate()
            .map(|(i, c)| {
                assert_eq!(c.len(), rank, "column rank mismatch");
                let mut v = c.clone();
                v.extend(unit_vec(count, i));
                v
            })
            .collect();
        Self {
            rank,
            count,
            gb: groebner(rank + count, &augmented, pot(order)),
        }
    }

    /// Coefficients `c` with `Σ c_i f_i = v`, if `v` lies in the span.
    pub fn lift(&self, v: &[XYPoly]) -> Option<PolyVec> {
        let mut aug = v.to_vec();
        aug.extend(zero_vec(self.count));
        let r = self.gb.reduce(&aug);
        if !is_zero_vec(&r[..self.rank]) {
            return None;
        }
        Some(r[self.rank..].iter().map(|p| -p).collect())
    }

    pub fn syzygies(&self) -> Vec<PolyVec> {
        self.gb
            .elements()
            .into_iter()
            .filter(|e| is_zero_vec(&e[..self.rank]))
            .map(|e| e[self.rank..].to_vec())
            .collect()
    }
}

/// Generators of the module of relations among `columns` (vectors in `R^rank`).
pub fn syzygies(rank: usize, columns: &[PolyVec]) -> Vec<PolyVec> {
    syzygies_in(rank, columns, TermOrder::default())
}

pub fn syzygies_in(rank: usize, columns: &[PolyVec], order: TermOrder) -> Vec<PolyVec> {
    let raw = Lifter::new(rank, columns, order).syzygies();
    prune_generators(columns.len(), raw, order)
}

/// Coefficients expressing `v` in terms of `columns`.
pub fn lift(rank: usize, columns: &[PolyVec], v: &[XYPoly]) -> Option<PolyVec> {
    Lifter::new(rank, columns, TermOrder::default()).lift(v)
}

/// Drops zero vectors and vectors lying in the span of the remaining ones.
pub fn prune_generators(rank: usize, columns: Vec<PolyVec>, order: TermOrder) -> Vec<PolyVec> {
    let mut kept: Vec<PolyVec> = columns.into_iter().filter(|c| !is_zero_vec(c)).collect();
    let mut i = kept.len();
    while i > 0 {
        i -= 1;
        let others: Vec<PolyVec> = kept
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, c)| c.clone())
            .collect();
        if groebner(rank, &others, order).contains(&kept[i]) {
            kept.remove(i);
        }
    }
    kept
}

/// `Hom(M, R)` with its generators recorded as vectors in `R^g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dual {
    /// Each generator `φ` maps `e_i ↦ φ[i]`.
    pub generators: Vec<PolyVec>,
    pub presentation: Presentation,
}

pub fn dual(p: &Presentation) -> Presentation {
    dual_with_generators(p, TermOrder::default()).presentation
}

pub fn dual_with_generators(p: &Presentation, order: TermOrder) -> Dual {
    let s = p.relations.len();
    let generators = syzygies_in(s, &p.rows(), order);
    let relations = syzygies_in(p.gens, &generators, order);
    Dual {
        presentation: Presentation {
            gens: generators.len(),
            relations,
        },
        generators,
    }
}

/// The evaluation map `ρ: M → M^∨∨`.
pub fn double_dual_map(p: &Presentation) -> Result<ModuleMap, AlgebraError> {
    double_dual_map_in(p, TermOrder::default())
}

pub fn double_dual_map_in(p: &Presentation, order: TermOrder) -> Result<ModuleMap, AlgebraError> {
    let first = dual_with_generators(p, order);
    if first.generators.is_empty() {
        return Err(AlgebraError::RankDeficient);
    }
    let t = first.generators.len();
    let second = dual_with_generators(&first.presentation, order);
    let lifter = Lifter::new(t, &second.generators, order);
    let mut columns = Vec::with_capacity(p.gens);
    for i in 0..p.gens {
        let eval: PolyVec = first.generators.iter().map(|phi| phi[i].clone()).collect();
        columns.push(lifter.lift(&eval).ok_or(AlgebraError::LiftFailed)?);
    }
    Ok(ModuleMap {
        source: p.clone(),
        target: second.presentation,
        columns,
    })
}

/// `dim R^g / (relations + Σ_p 𝔪^{t_p} e_p)`, by exact linear algebra on the
/// finite-dimensional space `R^g / Σ_p 𝔪^{t_p} e_p`: the image of the
/// relations there is spanned by their monomial multiples of degree below
/// `max t_p`.
pub fn truncated_quotient_dim(p: &Presentation, thresholds: &[u32]) -> usize {
    assert_eq!(thresholds.len(), p.gens);
    let mut index: HashMap<(usize, u32, u32), usize> = HashMap::new();
    for (pos, &t) in thresholds.iter().enumerate() {
        for d in 0..t {
            for a in 0..=d {
                let next = index.len();
                index.insert((pos, a, d - a), next);
            }
        }
    }
    let top = thresholds.iter().copied().max().unwrap_or(0);
    let mut columns: Vec<Vec<(usize, Rat)>> = Vec::new();
    for rel in &p.relations {
        let low = rel.iter().filter_map(XYPoly::order).min().unwrap_or(top);
        for d in 0..top.saturating_sub(low) {
            for a in 0..=d {
                let b = d - a;
                let col: Vec<(usize, Rat)> = rel
                    .iter()
                    .enumerate()
                    .flat_map(|(pos, f)| {
                        let index = &index;
                        f.terms().filter_map(move |((ta, tb), c)| {
                            index.get(&(pos, ta + a, tb + b)).map(|&r| (r, c.clone()))
                        })
                    })
                    .collect();
                if !col.is_empty() {
                    columns.push(col);
                }
            }
        }
    }
    index.len() - rank_of_columns(index.len(), &columns)
}

/// Same quantity as [`truncated_quotient_dim`], through a Gröbner basis of
/// the relations together with the truncating monomials.
pub fn truncated_quotient_dim_gb(p: &Presentation, thresholds: &[u32], order: TermOrder) -> usize {
    assert_eq!(thresholds.len(), p.gens);
    let mut cols = p.relations.clone();
    for (pos, &t) in thresholds.iter().enumerate() {
        for a in 0..=t {
            let mut v = zero_vec(p.gens);
            v[pos] = XYPoly::xy(a, t - a);
            cols.push(v);
        }
    }
    groebner(p.gens, &cols, order)
        .quotient_dim()
        .expect("truncation makes the quotient finite")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Colength {
    pub value: usize,
    /// The power `m` at which `dim` agreed for `m` and `m + 1`.
    pub certified_at: u32,
}

pub const DEFAULT_START: u32 = 4;

pub fn colength_at_origin(p: &Presentation) -> Result<Colength, AlgebraError> {
    colength_at_origin_from(p, DEFAULT_START)
}

/// Length of the localization at the origin, certified by agreement of the
/// 𝔪-truncated dimensions at `m` and `m + 1`, for `m = m0, 2m0, 4m0`.
pub fn colength_at_origin_from(p: &Presentation, m0: u32) -> Result<Colength, AlgebraError> {
    let m0 = m0.max(1);
    if p.gens == 0 {
        return Ok(Colength {
            value: 0,
            certified_at: m0,
        });
    }
    let mut dims = Vec::new();
    let mut m = m0;
    while m <= 4 * m0 {
        let lo = truncated_quotient_dim(p, &vec![m; p.gens]);
        let hi = truncated_quotient_dim(p, &vec![m + 1; p.gens]);
        dims.push((m, lo));
        dims.push((m + 1, hi));
        if lo == hi {
            return Ok(Colength {
                value: lo,
                certified_at: m,
            });
        }
        m *= 2;
    }
    Err(AlgebraError::NonFiniteLength {
        last_m: m / 2 + 1,
        dims,
    })
}

/// Length of `coker(M → M^∨∨)` at the origin.
#[allow(non_snake_case)]
pub fn l_of_Q(p: &Presentation) -> Result<Colength, AlgebraError> {
    l_of_Q_in(p, DEFAULT_START, TermOrder::default())
}

#[allow(non_snake_case)]
pub fn l_of_Q_in(p: &Presentation, m0: u32, order: TermOrder) -> Result<Colength, AlgebraError> {
    let rho = double_dual_map_in(p, order)?;
    colength_at_origin_from(&rho.cokernel(), m0)
}

/// Determinant of a square matrix given by columns.
pub fn determinant(columns: &[PolyVec]) -> XYPoly {
    let n = columns.len();
    let rows: Vec<usize> = (0..n).collect();
    minor(columns, &rows)
}

/// Laplace expansion along the first column.
fn minor(columns: &[PolyVec], rows: &[usize]) -> XYPoly {
    match columns {
        [] => XYPoly::one(),
        [first, rest @ ..] => {
            let mut total = XYPoly::zero();
            for (k, &r) in rows.iter().enumerate() {
                if first[r].is_zero() {
                    continue;
                }
                let others: Vec<usize> = rows.iter().copied().filter(|&q| q != r).collect();
                let term = &first[r] * &minor(rest, &others);
                total = if k % 2 == 0 {
                    &total + &term
                } else {
                    &total - &term
                };
            }
            total
        }
    }
}

/// All nonzero `rank × rank` minors of the matrix whose columns are
/// `columns` (vectors in `R^rank`).
pub fn maximal_minors(rank: usize, columns: &[PolyVec]) -> Vec<XYPoly> {
    combinations(columns.len(), rank)
        .into_iter()
        .map(|idx| {
            let chosen: Vec<PolyVec> = idx.iter().map(|&i| columns[i].clone()).collect();
            determinant(&chosen)
        })
        .filter(|m| !m.is_zero())
        .collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if k > n {
        return Vec::new();
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out.sort();
    out
}

/// Outcome of [`saturation_length`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SaturationLength {
    pub value: usize,
    /// The linear form `h = x + c·y` (or `y` when `c` is `None`) used as a
    /// parameter on the saturation.
    pub parameter: Option<i64>,
    /// Multiplicity `e(h; R^rank / M)`.
    pub multiplicity: usize,
    /// First power `k` with `h^k` killing the torsion.
    pub power: u32,
    /// Largest 𝔪-power at which a colength in the computation stabilized.
    pub certified_at: u32,
}

/// Length at the origin of `M^sat / M ≅ coker(M → M^∨∨)` for the submodule
/// `M ⊂ R^rank` generated by `columns`, assumed of full rank.
///
/// With `w` the gcd of the maximal minors and `h` a linear form coprime to
/// `w` at the origin, `h` is a nonzerodivisor on `R^rank / M^sat`, so
/// `l(R^rank / (M + h^k R^rank)) = l(T / h^k T) + k·e` with `T = M^sat / M`
/// and `e = l(R / (w, h))`. The increments exceed `e` exactly until
/// `h^k T = 0`, at which point the torsion length is read off.
pub fn saturation_length(
    rank: usize,
    columns: &[PolyVec],
    m0: u32,
    max_power: u32,
) -> Result<SaturationLength, AlgebraError> {
    let minors = maximal_minors(rank, columns);
    if minors.is_empty() {
        return Err(AlgebraError::RankDeficient);
    }
    let w = gcd_all(&minors);
    let degree = w.total_degree().unwrap_or(0) as i64;
    let mut certified_at = 0;
    let mut chosen = None;
    for c in std::iter::once(None).chain((0..=degree + 1).map(Some)) {
        let h = linear_form(c);
        let ideal = Presentation::new(1, vec![vec![w.clone()], vec![h.clone()]])?;
        if let Ok(col) = colength_at_origin_from(&ideal, m0) {
            certified_at = col.certified_at;
            chosen = Some((c, h, col.value));
            break;
        }
    }
    let (parameter, h, e) = chosen.ok_or(AlgebraError::NoParameter)?;
    let mut previous = 0usize;
    let mut h_power = XYPoly::one();
    for k in 1..=max_power {
        h_power = &h_power * &h;
        let mut relations = columns.to_vec();
        relations.extend((0..rank).map(|p| vec_scale(&unit_vec(rank, p), &h_power)));
        let col = colength_at_origin_from(&Presentation::new(rank, relations)?, m0.max(k + 1))?;
        certified_at = certified_at.max(col.certified_at);
        if col.value - previous == e {
            return Ok(SaturationLength {
                value: previous - (k as usize - 1) * e,
                parameter,
                multiplicity: e,
                power: k - 1,
                certified_at,
            });
        }
        previous = col.value;
    }
    Err(AlgebraError::TorsionNotKilled { max_power })
}

fn linear_form(c: Option<i64>) -> XYPoly {
    match c {
        None => XYPoly::y(),
        Some(c) => xy_poly(&[(1, 1, 0), (c, 0, 1)]),
    }
}

/// `Σ_k c_k x^{a_k} y^{b_k}` from integer triples `(c, a, b)`.
pub fn xy_poly(terms: &[(i64, u32, u32)]) -> XYPoly {
    XYPoly::from_terms(
        terms
            .iter()
            .map(|&(c, a, b)| ((a, b), Rat::from_integer(c.into()))),
    )
}
