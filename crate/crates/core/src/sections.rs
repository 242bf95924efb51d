//! Finite presentation of the completed sections module `M` built from the
//! genuine sections of the bundle over the formal neighbourhood of `ℓ`, where
//! `x` acts as `u` and `y` as `zu`.

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    self, groebner, is_zero_vec, syzygies, truncated_quotient_dim, AlgebraError, PolyVec,
    Presentation, TermOrder, XYPoly,
};
use crate::cech::{polynomial_sections, Component, Section};
use crate::laurent::{BiLaurentPoly, BundleData};
use crate::linalg::{SparseEchelon, SparseVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SectionsError {
    #[error(
        "presentation does not match the section tower at n = {n} \
         (presented {presented}, tower {tower}); gave up at N = {bound}"
    )]
    CertificationFailure {
        n: u32,
        presented: usize,
        tower: usize,
        bound: u32,
    },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Multiplication by `x`, i.e. by `u`.
pub fn act_x(s: &Section) -> Section {
    s.shift(0, 1)
}

/// Multiplication by `y`, i.e. by `zu`.
pub fn act_y(s: &Section) -> Section {
    s.shift(1, 1)
}

/// Multiplication by `x^a y^b`.
pub fn act_monomial(s: &Section, a: u32, b: u32) -> Section {
    s.shift(i64::from(b), a + b)
}

/// Action of a polynomial in `x, y`.
pub fn act(f: &XYPoly, s: &Section) -> Section {
    let mut out = Section::zero();
    for ((a, b), c) in f.terms() {
        out = out.add(&act_monomial(s, a, b).scale(c));
    }
    out
}

type Coord = (u32, Component, i64);

fn coords(s: &Section) -> SparseVec<Coord> {
    s.coords()
        .map(|(comp, m, c)| ((m.i, comp, m.k), c.clone()))
        .collect()
}

fn from_coords(v: &SparseVec<Coord>) -> Section {
    let mut s = Section::zero();
    for (&(i, comp, k), c) in v {
        let m = crate::laurent::ZUMonomial::new(k, i);
        match comp {
            Component::First => s.a.add_term(m, c.clone()),
            Component::Second => s.b.add_term(m, c.clone()),
        }
    }
    s
}

/// Component of `s` in u-degree `n`, keyed by `(component, z-exponent)`.
fn graded_part(s: &Section, n: u32) -> SparseVec<(Component, i64)> {
    s.coords()
        .filter(|(_, m, _)| m.i == n)
        .map(|(comp, m, c)| ((comp, m.k), c.clone()))
        .collect()
}

/// Genuine sections of u-degree ≤ `bound`, in reduced echelon form with
/// pivots at the lowest u-degree. The pivot level of a basis element is its
/// u-order, so the elements of level `n` span the graded piece `gr_n M` and
/// the truncations of all elements of level ≤ `n` span the image of `M` in
/// H⁰(ℓ_n).
#[derive(Clone, Debug)]
pub struct SectionBasisTower {
    bound: u32,
    levels: Vec<Vec<Section>>,
}

impl SectionBasisTower {
    pub fn build(bundle: &BundleData, bound: u32) -> Self {
        let mut ech: SparseEchelon<Coord> = SparseEchelon::new();
        for s in polynomial_sections(bundle, bound, false) {
            ech.insert(&coords(&s));
        }
        let mut levels = vec![Vec::new(); bound as usize + 1];
        for (&(i, _, _), row) in ech.rows() {
            levels[i as usize].push(from_coords(row));
        }
        Self { bound, levels }
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    /// Sections of u-order exactly `n`, one per basis vector of `gr_n M`.
    pub fn graded_piece(&self, n: u32) -> &[Section] {
        self.levels.get(n as usize).map_or(&[], Vec::as_slice)
    }

    /// Basis of the image of `M` in H⁰(ℓ_n).
    pub fn level_basis(&self, n: u32) -> Vec<Section> {
        (0..=n.min(self.bound))
            .flat_map(|m| self.graded_piece(m).iter().map(move |s| s.truncate_u(n)))
            .collect()
    }

    pub fn dim(&self, n: u32) -> usize {
        (0..=n.min(self.bound))
            .map(|m| self.graded_piece(m).len())
            .sum()
    }

    /// The truncation of every level-`n` basis element lies in the span of
    /// the level-`(n−1)` basis.
    pub fn is_consistent(&self, n: u32) -> bool {
        if n == 0 {
            return true;
        }
        let mut ech: SparseEchelon<Coord> = SparseEchelon::new();
        for s in self.level_basis(n - 1) {
            ech.insert(&coords(&s));
        }
        self.level_basis(n)
            .iter()
            .all(|s| ech.contains(&coords(&s.truncate_u(n - 1))))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub section: Section,
    pub level: u32,
}

/// Module generators chosen level by level from the tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    pub generators: Vec<Generator>,
}

impl GeneratorSet {
    /// Greedy choice: at each level keep the tower elements whose initial
    /// forms are independent of the initial forms of `𝔪`-multiples of the
    /// generators already chosen.
    pub fn from_tower(tower: &SectionBasisTower, max_level: u32) -> Self {
        let mut generators: Vec<Generator> = Vec::new();
        for n in 0..=max_level.min(tower.bound()) {
            let mut span: SparseEchelon<(Component, i64)> = SparseEchelon::new();
            for g in &generators {
                let d = n - g.level;
                for b in 0..=d {
                    span.insert(&graded_part(&act_monomial(&g.section, d - b, b), n));
                }
            }
            for s in tower.graded_piece(n) {
                if span.insert(&graded_part(s, n)) {
                    generators.push(Generator {
                        section: s.clone(),
                        level: n,
                    });
                }
            }
        }
        Self { generators }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn levels(&self) -> Vec<u32> {
        self.generators.iter().map(|g| g.level).collect()
    }
}

/// `u^j · s` written in `x, y`; sections of splitting type `j` land in `R²`.
pub fn embed(bundle: &BundleData, s: &Section) -> PolyVec {
    let j = bundle.j();
    let conv = |p: &BiLaurentPoly| {
        XYPoly::from_zu(&p.shift(0, j)).expect("sections have bounded pole order along ℓ")
    };
    vec![conv(&s.a), conv(&s.b)]
}

/// Everything produced while building the presentation of `M`.
#[derive(Clone, Debug)]
pub struct SectionsPresentation {
    pub generators: GeneratorSet,
    /// All syzygies among the generators (a generating set, not minimal).
    pub full: Presentation,
    /// Locally minimal presentation at the origin.
    pub minimal: Presentation,
    /// Degree bound `N` at which certification succeeded.
    pub bound: u32,
    /// Tower dimensions `dim image(M → H⁰(ℓ_n))` for `n < N`.
    pub tower_dims: Vec<usize>,
}

pub fn initial_bound(bundle: &BundleData) -> u32 {
    2 * bundle.j() + 2 + bundle.p().u_degree()
}

pub fn hard_bound(bundle: &BundleData) -> u32 {
    8 * bundle.j() + 8
}

/// Builds a certified presentation of `M`, escalating the degree bound by
/// `j + 2` on failure.
pub fn build_presentation(bundle: &BundleData) -> Result<SectionsPresentation, SectionsError> {
    let step = bundle.j() + 2;
    let mut bound = initial_bound(bundle);
    loop {
        match build_at(bundle, bound) {
            Ok(p) => return Ok(p),
            Err(SectionsError::CertificationFailure {
                n,
                presented,
                tower,
                ..
            }) => {
                if bound + step > hard_bound(bundle) {
                    return Err(SectionsError::CertificationFailure {
                        n,
                        presented,
                        tower,
                        bound,
                    });
                }
                bound += step;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Extra u-degree of the tower beyond the certified range, so that the
/// truncations near the top level see the tails of longer sections.
pub fn tower_margin(bundle: &BundleData) -> u32 {
    bundle.j() + 2
}

/// One attempt at a fixed degree bound.
pub fn build_at(bundle: &BundleData, bound: u32) -> Result<SectionsPresentation, SectionsError> {
    let tower = SectionBasisTower::build(bundle, bound + tower_margin(bundle));
    let generators = GeneratorSet::from_tower(&tower, bound);
    let embedded: Vec<PolyVec> = generators
        .generators
        .iter()
        .map(|g| embed(bundle, &g.section))
        .collect();
    let relations = syzygies(2, &embedded);
    let full = Presentation::new(generators.len(), relations)?;
    let levels = generators.levels();
    let mut tower_dims = Vec::with_capacity(bound as usize);
    for n in 0..bound {
        let presented = presented_dim(&full, &levels, n);
        let tower_dim = tower.dim(n);
        if presented != tower_dim {
            return Err(SectionsError::CertificationFailure {
                n,
                presented,
                tower: tower_dim,
                bound,
            });
        }
        tower_dims.push(tower_dim);
    }
    let minimal = minimalize(&full);
    Ok(SectionsPresentation {
        generators,
        full,
        minimal,
        bound,
        tower_dims,
    })
}

/// Dimension of the degree-≤`n` part of the presented module, where the
/// generator of level `l` has degree `l`.
pub fn presented_dim(p: &Presentation, levels: &[u32], n: u32) -> usize {
    let thresholds: Vec<u32> = levels.iter().map(|&l| (n + 1).saturating_sub(l)).collect();
    truncated_quotient_dim(p, &thresholds)
}

/// Local minimalization at the origin: generators killed by a relation with
/// a unit entry are eliminated, then relations lying in the span of the
/// others plus `𝔪` times themselves are dropped.
pub fn minimalize(p: &Presentation) -> Presentation {
    let mut gens = p.gens();
    let mut rels: Vec<PolyVec> = p.relations().to_vec();
    while let Some((ri, pos)) = find_unit_entry(&rels) {
        let r = rels.remove(ri);
        let pivot = r[pos].clone();
        rels = rels
            .into_iter()
            .map(|s| {
                let mut t: PolyVec = s
                    .iter()
                    .zip(&r)
                    .map(|(sk, rk)| &(&pivot * sk) - &(&s[pos] * rk))
                    .collect();
                t.remove(pos);
                t
            })
            .filter(|t| !is_zero_vec(t))
            .collect();
        gens -= 1;
    }
    let mut i = rels.len();
    while i > 0 {
        i -= 1;
        let mut cols: Vec<PolyVec> = rels
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, c)| c.clone())
            .collect();
        cols.push(algebra::vec_scale(&rels[i], &XYPoly::x()));
        cols.push(algebra::vec_scale(&rels[i], &XYPoly::y()));
        if groebner(gens, &cols, TermOrder::default()).contains(&rels[i]) {
            rels.remove(i);
        }
    }
    Presentation::new(gens, rels).expect("shapes preserved")
}

fn find_unit_entry(rels: &[PolyVec]) -> Option<(usize, usize)> {
    for (ri, r) in rels.iter().enumerate() {
        for pos in (0..r.len()).rev() {
            if !r[pos].coeff(0, 0).is_zero() {
                return Some((ri, pos));
            }
        }
    }
    None
}

/// First 𝔪-power tried when certifying colengths at the origin.
pub fn colength_start(bundle: &BundleData) -> u32 {
    2 * bundle.j() + 2
}

/// Generators together with the evidence that they generate `M`.
#[derive(Clone, Debug)]
pub struct CertifiedGenerators {
    pub generators: GeneratorSet,
    /// Degree bound `N` at which certification succeeded.
    pub bound: u32,
    /// `dim image(M → H⁰(ℓ_n))` for `n < N`, equal to the dimension of the
    /// degree-≤`n` part of the submodule the generators span.
    pub tower_dims: Vec<usize>,
}

/// Dimensions of the truncations to u-degree ≤ `n`, for `n < bound`, of the
/// submodule spanned by `generators`.
pub fn spanned_dims(generators: &GeneratorSet, bound: u32) -> Vec<usize> {
    let mut ech: SparseEchelon<Coord> = SparseEchelon::new();
    for g in &generators.generators {
        for d in 0..bound.saturating_sub(g.level) {
            for b in 0..=d {
                ech.insert(&coords(
                    &act_monomial(&g.section, d - b, b).truncate_u(bound - 1),
                ));
            }
        }
    }
    let mut dims = vec![0usize; bound as usize];
    for (&(i, _, _), _) in ech.rows() {
        for dim in dims.iter_mut().skip(i as usize) {
            *dim += 1;
        }
    }
    dims
}

/// Chooses generators up to level `bound` and certifies, for every
/// `n < bound`, that they span the whole image of `M` in H⁰(ℓ_n).
pub fn generators_at(
    bundle: &BundleData,
    bound: u32,
) -> Result<CertifiedGenerators, SectionsError> {
    let tower = SectionBasisTower::build(bundle, bound + tower_margin(bundle));
    let generators = GeneratorSet::from_tower(&tower, bound);
    let spanned = spanned_dims(&generators, bound);
    match (0..bound).find(|&n| spanned[n as usize] != tower.dim(n)) {
        None => Ok(CertifiedGenerators {
            generators,
            bound,
            tower_dims: spanned,
        }),
        Some(n) => Err(SectionsError::CertificationFailure {
            n,
            presented: spanned[n as usize],
            tower: tower.dim(n),
            bound,
        }),
    }
}

/// [`generators_at`] from the initial bound, escalating by `j + 2` on
/// failure up to the hard bound.
pub fn certified_generators(bundle: &BundleData) -> Result<CertifiedGenerators, SectionsError> {
    let step = bundle.j() + 2;
    let mut bound = initial_bound(bundle);
    loop {
        match generators_at(bundle, bound) {
            Err(SectionsError::CertificationFailure { .. })
                if bound + step <= hard_bound(bundle) =>
            {
                bound += step
            }
            other => return other,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LQResult {
    pub value: usize,
    /// Degree bound at which the generators were certified.
    pub sections_bound: u32,
    /// 𝔪-power at which the colengths stabilized.
    pub colength_m: u32,
}

/// `l(Q)` for the bundle's local model, as the length at the origin of the
/// saturation of `M` inside `R²` modulo `M`.
#[allow(non_snake_case)]
pub fn l_of_Q_for_bundle(bundle: &BundleData) -> Result<LQResult, SectionsError> {
    l_of_Q_from(
        bundle,
        &certified_generators(bundle)?,
        colength_start(bundle),
    )
}

/// `l(Q)` from certified generators, starting colength certification at
/// the 𝔪-power `m0`.
#[allow(non_snake_case)]
pub fn l_of_Q_from(
    bundle: &BundleData,
    certified: &CertifiedGenerators,
    m0: u32,
) -> Result<LQResult, SectionsError> {
    let embedded: Vec<PolyVec> = certified
        .generators
        .generators
        .iter()
        .map(|g| embed(bundle, &g.section))
        .collect();
    let sat = algebra::saturation_length(2, &embedded, m0, 4 * m0)?;
    Ok(LQResult {
        value: sat.value,
        sections_bound: certified.bound,
        colength_m: sat.certified_at,
    })
}
