//! Čech cohomology of the bundle restricted to the infinitesimal
//! neighbourhoods `ℓ_n` (u-degree ≤ n) of the exceptional line, over the
//! two-chart cover `{U, V}`.
//!
//! Cochains are written in the `U` frame on `U ∩ V`. The coboundary is
//! `d(σ_U, σ_V) = σ_U − T⁻¹·σ_V`, where `σ_V` is given in the `V` frame and
//! `T⁻¹ = [[z^{-j}, −p], [0, z^j]]`. Since the cover has two sets every
//! 1-cochain is a cocycle, so `h¹ = dim C¹ − rank d` and `h⁰ = dim ker d`.
//!
//! 1-cochains are Laurent in `z`, so they are cut to a finite z-window.
//! Columns are kept only when their pivot monomial lies in the window. The
//! only monomials a kept column can reach outside the window are first
//! component terms `z^k u^i` with `k < lo ≤ i − j`; for each of those the
//! window is enlarged by one row together with the `V`-column
//! `(z^{k+j} u^i, 0)` that is its coboundary, so no entry is ever dropped.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::laurent::{BiLaurentPoly, BundleData, ZUMonomial};
use crate::linalg::{self, Rat, SparseRatMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CechError {
    #[error(
        "z-window [{lo}, {hi}] is smaller than the required [{need_lo}, {need_hi}] at n = {n}"
    )]
    WindowTooSmall {
        n: u32,
        lo: i64,
        hi: i64,
        need_lo: i64,
        need_hi: i64,
    },
    #[error("{quantity} at n = {n} changed from {base} to {enlarged} when the z-window grew")]
    CertificationFailure {
        quantity: &'static str,
        n: u32,
        base: usize,
        enlarged: usize,
    },
    #[error("h1 did not stabilise by n = {limit}")]
    NonStabilization { limit: u32 },
    #[error("restriction kernel needs n >= 1")]
    LevelZeroRestriction,
}

/// Index of the component of the rank-2 vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Component {
    First,
    Second,
}

/// A basis cochain `z^k u^i` placed in one component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cochain {
    pub comp: Component,
    pub i: u32,
    pub k: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ZWindow {
    pub lo: i64,
    pub hi: i64,
}

impl ZWindow {
    /// The smallest window used at level `n`: `±(j + n + span_z(p) + 2)`.
    pub fn for_level(bundle: &BundleData, n: u32) -> Self {
        let r = bundle.j_i64() + i64::from(n) + bundle.p().span_z() + 2;
        Self { lo: -r, hi: r }
    }

    pub fn enlarged(self, by: i64) -> Self {
        Self {
            lo: self.lo - by,
            hi: self.hi + by,
        }
    }

    pub fn contains(self, other: Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains_k(self, k: i64) -> bool {
        self.lo <= k && k <= self.hi
    }

    pub fn as_pair(self) -> [i64; 2] {
        [self.lo, self.hi]
    }
}

/// The 0-cochain basis vectors that label columns of the coboundary matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroCochain {
    /// `z^k u^i` (k ≥ 0) in the given component, `U` frame.
    U(Cochain),
    /// `z^k u^i` (k ≤ i) in the given component, `V` frame.
    V(Cochain),
}

/// Deterministic enumeration of the 1-cochains at level `n` inside a window.
#[derive(Clone, Debug)]
pub struct CochainBasis {
    pub n: u32,
    pub window: ZWindow,
    list: Vec<Cochain>,
    index: HashMap<Cochain, usize>,
}

impl CochainBasis {
    pub fn new(n: u32, window: ZWindow) -> Self {
        let mut list = Vec::new();
        for comp in [Component::First, Component::Second] {
            for i in 0..=n {
                for k in window.lo..=window.hi {
                    list.push(Cochain { comp, i, k });
                }
            }
        }
        let index = list.iter().enumerate().map(|(r, c)| (*c, r)).collect();
        Self {
            n,
            window,
            list,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn get(&self, idx: usize) -> Cochain {
        self.list[idx]
    }

    pub fn index_of(&self, c: &Cochain) -> Option<usize> {
        self.index.get(c).copied()
    }

    fn push(&mut self, c: Cochain) -> usize {
        let r = self.list.len();
        self.list.push(c);
        self.index.insert(c, r);
        r
    }
}

/// Matrix of `d: C⁰ → C¹` at one level, with its row and column labels.
#[derive(Clone, Debug)]
pub struct CoboundaryMatrix {
    pub matrix: SparseRatMatrix,
    pub rows: CochainBasis,
    pub columns: Vec<ZeroCochain>,
    /// Rows appended beyond the window to hold out-of-window images.
    pub enlargement_rows: usize,
}

impl CoboundaryMatrix {
    pub fn h1(&self) -> usize {
        self.rows.len() - linalg::rank(&self.matrix)
    }
}

pub fn coboundary_matrix(
    bundle: &BundleData,
    n: u32,
    window: ZWindow,
) -> Result<CoboundaryMatrix, CechError> {
    let need = ZWindow::for_level(bundle, n);
    if !window.contains(need) {
        return Err(CechError::WindowTooSmall {
            n,
            lo: window.lo,
            hi: window.hi,
            need_lo: need.lo,
            need_hi: need.hi,
        });
    }
    let j = bundle.j_i64();
    let mut rows = CochainBasis::new(n, window);
    let base_rows = rows.len();
    let mut cols: Vec<(ZeroCochain, Vec<(Cochain, Rat)>)> = Vec::new();

    for comp in [Component::First, Component::Second] {
        for i in 0..=n {
            for k in 0..=window.hi {
                let c = Cochain { comp, i, k };
                cols.push((ZeroCochain::U(c), vec![(c, Rat::one())]));
            }
        }
    }
    let minus_one = -Rat::one();
    for i in 0..=n {
        let top = i64::from(i);
        // (z^m u^i, 0) ↦ −(z^{m−j} u^i, 0)
        for m in (window.lo + j)..=top.min(window.hi + j) {
            let img = Cochain {
                comp: Component::First,
                i,
                k: m - j,
            };
            let src = Cochain {
                comp: Component::First,
                i,
                k: m,
            };
            cols.push((ZeroCochain::V(src), vec![(img, minus_one.clone())]));
        }
        // (0, z^m u^i) ↦ −(−p z^m u^i, z^{m+j} u^i)
        for m in (window.lo - j)..=top.min(window.hi - j) {
            let mut image = vec![(
                Cochain {
                    comp: Component::Second,
                    i,
                    k: m + j,
                },
                minus_one.clone(),
            )];
            for (pm, c) in bundle.p().terms() {
                let t = pm.times(ZUMonomial::new(m, i));
                if t.i <= n {
                    image.push((
                        Cochain {
                            comp: Component::First,
                            i: t.i,
                            k: t.k,
                        },
                        c.clone(),
                    ));
                }
            }
            let src = Cochain {
                comp: Component::Second,
                i,
                k: m,
            };
            cols.push((ZeroCochain::V(src), image));
        }
    }

    // Out-of-window images: enlarge by a row and its covering V column.
    let mut cover: Vec<(ZeroCochain, Vec<(Cochain, Rat)>)> = Vec::new();
    for (_, image) in &cols {
        for (c, _) in image {
            if rows.index_of(c).is_some() {
                continue;
            }
            let coverable =
                c.comp == Component::First && c.k < window.lo && c.k <= i64::from(c.i) - j;
            if !coverable {
                return Err(CechError::WindowTooSmall {
                    n,
                    lo: window.lo,
                    hi: window.hi,
                    need_lo: c.k.min(need.lo),
                    need_hi: c.k.max(need.hi),
                });
            }
            rows.push(*c);
            let src = Cochain {
                comp: Component::First,
                i: c.i,
                k: c.k + j,
            };
            cover.push((ZeroCochain::V(src), vec![(*c, minus_one.clone())]));
        }
    }
    cols.extend(cover);

    let mut matrix = SparseRatMatrix::zeros(rows.len(), 0);
    let mut labels = Vec::with_capacity(cols.len());
    for (label, image) in cols {
        let entries: Vec<(usize, Rat)> = image
            .into_iter()
            .map(|(c, v)| (rows.index_of(&c).expect("row registered"), v))
            .collect();
        matrix.push_col(entries).expect("rows in range");
        labels.push(label);
    }
    let enlargement_rows = rows.len() - base_rows;
    Ok(CoboundaryMatrix {
        matrix,
        rows,
        columns: labels,
        enlargement_rows,
    })
}

/// Ranks needed at one level and one window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct LevelRanks {
    rows: usize,
    cols: usize,
    rank: usize,
    /// rank of `[d | e_r for rows of top u-degree]`, when requested.
    rank_with_top: Option<usize>,
}

impl LevelRanks {
    fn h0(&self) -> usize {
        self.cols - self.rank
    }
    fn h1(&self) -> usize {
        self.rows - self.rank
    }
    fn restriction_kernel(&self) -> Option<usize> {
        self.rank_with_top.map(|r| r - self.rank)
    }
}

fn level_ranks(
    bundle: &BundleData,
    n: u32,
    window: ZWindow,
    with_top: bool,
) -> Result<LevelRanks, CechError> {
    let d = coboundary_matrix(bundle, n, window)?;
    let rank = linalg::rank(&d.matrix);
    let rank_with_top = if with_top {
        let mut m = d.matrix.clone();
        for r in 0..d.rows.len() {
            if d.rows.get(r).i == n {
                m.push_col([(r, Rat::one())]).expect("row in range");
            }
        }
        Some(linalg::rank(&m))
    } else {
        None
    };
    Ok(LevelRanks {
        rows: d.rows.len(),
        cols: d.columns.len(),
        rank,
        rank_with_top,
    })
}

/// Certified cohomology data at one level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LevelCohomology {
    pub n: u32,
    pub h0: usize,
    pub h1: usize,
    /// dim Ker(H¹(ℓ_n) → H¹(ℓ_{n−1})); absent at n = 0.
    pub ker_restriction_dim: Option<usize>,
    /// dim Im(H¹(ℓ_n) → H¹(ℓ_{n−1})); absent at n = 0.
    pub image_dim: Option<usize>,
    pub window: ZWindow,
    pub enlarged_window: ZWindow,
}

/// Computes h⁰, h¹ and (for n ≥ 1) the restriction kernel at level `n`,
/// certifying every value by a recomputation on a window wider by 2.
pub fn level_cohomology(bundle: &BundleData, n: u32) -> Result<LevelCohomology, CechError> {
    level_cohomology_in(bundle, n, ZWindow::for_level(bundle, n), 2)
}

pub fn level_cohomology_in(
    bundle: &BundleData,
    n: u32,
    window: ZWindow,
    enlarge_by: i64,
) -> Result<LevelCohomology, CechError> {
    let with_top = n >= 1;
    let enlarged_window = window.enlarged(enlarge_by);
    let base = level_ranks(bundle, n, window, with_top)?;
    let big = level_ranks(bundle, n, enlarged_window, with_top)?;
    let check = |quantity, a: usize, b: usize| {
        if a == b {
            Ok(a)
        } else {
            Err(CechError::CertificationFailure {
                quantity,
                n,
                base: a,
                enlarged: b,
            })
        }
    };
    let h0 = check("h0", base.h0(), big.h0())?;
    let h1 = check("h1", base.h1(), big.h1())?;
    let ker = match (base.restriction_kernel(), big.restriction_kernel()) {
        (Some(a), Some(b)) => Some(check("restriction kernel", a, b)?),
        _ => None,
    };
    Ok(LevelCohomology {
        n,
        h0,
        h1,
        ker_restriction_dim: ker,
        image_dim: ker.map(|k| h1 - k),
        window,
        enlarged_window,
    })
}

pub fn h1(bundle: &BundleData, n: u32) -> Result<usize, CechError> {
    Ok(level_cohomology(bundle, n)?.h1)
}

pub fn h0(bundle: &BundleData, n: u32) -> Result<usize, CechError> {
    Ok(level_cohomology(bundle, n)?.h0)
}

pub fn restriction_kernel_dim(bundle: &BundleData, n: u32) -> Result<usize, CechError> {
    if n == 0 {
        return Err(CechError::LevelZeroRestriction);
    }
    Ok(level_cohomology(bundle, n)?
        .ker_restriction_dim
        .expect("present for n >= 1"))
}

/// The h⁰/h¹ tower for n = 0..=n_max.
pub fn cohomology_profile(
    bundle: &BundleData,
    n_max: u32,
) -> Result<Vec<LevelCohomology>, CechError> {
    (0..=n_max).map(|n| level_cohomology(bundle, n)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WindowCertificate {
    pub window_used: ZWindow,
    pub window_enlarged: ZWindow,
    pub equal: bool,
}

/// dim of the inverse limit of H¹(ℓ_n), with the evidence that it is stable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitResult {
    pub value: usize,
    /// First level of the final constant run.
    pub stabilized_at: u32,
    /// Last level computed.
    pub last_level: u32,
    pub window_certificate: WindowCertificate,
    pub profile: Vec<LevelCohomology>,
}

/// Length of R¹π_*: the stable dimension of H¹(ℓ_n).
///
/// Runs n = 0, 1, … until n ≥ 2j + u_degree(p) and the last j + 2 levels
/// have equal h¹ with restriction maps that are isomorphisms (zero kernel,
/// image equal to the previous h¹). The inverse limit of such a system has
/// the stable dimension. Gives up at n = 8j + 8.
pub fn r1_length(bundle: &BundleData) -> Result<LimitResult, CechError> {
    let j = bundle.j();
    let min_level = 2 * j + bundle.p().u_degree();
    let run = (j + 2) as usize;
    let limit = 8 * j + 8;
    let mut profile: Vec<LevelCohomology> = Vec::new();
    for n in 0..=limit {
        let level = level_cohomology(bundle, n)?;
        profile.push(level);
        if n < min_level || profile.len() < run {
            continue;
        }
        let tail = &profile[profile.len() - run..];
        let h = tail[0].h1;
        let constant = tail.iter().all(|l| l.h1 == h);
        let isomorphisms = tail[1..]
            .iter()
            .all(|l| l.ker_restriction_dim == Some(0) && l.image_dim == Some(h));
        if constant && isomorphisms {
            return Ok(LimitResult {
                value: h,
                stabilized_at: tail[0].n,
                last_level: n,
                window_certificate: WindowCertificate {
                    window_used: level.window,
                    window_enlarged: level.enlarged_window,
                    equal: true,
                },
                profile,
            });
        }
    }
    Err(CechError::NonStabilization { limit })
}

/// A section `(a, b)` written in the `U` frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Section {
    pub a: BiLaurentPoly,
    pub b: BiLaurentPoly,
}

impl Section {
    pub fn new(a: BiLaurentPoly, b: BiLaurentPoly) -> Self {
        Self { a, b }
    }

    pub fn zero() -> Self {
        Self::new(BiLaurentPoly::zero(), BiLaurentPoly::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn truncate_u(&self, n: u32) -> Self {
        Self::new(self.a.truncate_u(n), self.b.truncate_u(n))
    }

    pub fn shift(&self, k: i64, i: u32) -> Self {
        Self::new(self.a.shift(k, i), self.b.shift(k, i))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.a + &other.a, &self.b + &other.b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(&self.a - &other.a, &self.b - &other.b)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.a.scalar_mul(c), self.b.scalar_mul(c))
    }

    pub fn u_degree(&self) -> u32 {
        self.a.u_degree().max(self.b.u_degree())
    }

    pub fn u_order(&self) -> Option<u32> {
        match (self.a.u_order(), self.b.u_order()) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        }
    }

    /// Whether this is a section of the bundle modulo `u^{n+1}`
    /// (or exactly, when `n` is `None`).
    pub fn is_section(&self, bundle: &BundleData, n: Option<u32>) -> bool {
        let (va, vb) = bundle.to_v_frame(&self.a, &self.b);
        let cut = |p: BiLaurentPoly| match n {
            Some(n) => p.truncate_u(n),
            None => p,
        };
        self.a.is_u_holomorphic()
            && self.b.is_u_holomorphic()
            && cut(va).is_v_holomorphic()
            && cut(vb).is_v_holomorphic()
    }

    /// Coefficients keyed by (component, monomial).
    pub fn coords(&self) -> impl Iterator<Item = (Component, ZUMonomial, &Rat)> {
        self.a
            .terms()
            .map(|(m, c)| (Component::First, m, c))
            .chain(self.b.terms().map(|(m, c)| (Component::Second, m, c)))
    }
}

/// Exact basis of H⁰(ℓ_n) in the `U` frame, from the kernel of the
/// coboundary matrix, put in reduced echelon form over the monomial order.
pub fn h0_sections(bundle: &BundleData, n: u32) -> Result<Vec<Section>, CechError> {
    let d = coboundary_matrix(bundle, n, ZWindow::for_level(bundle, n))?;
    let u_cols: Vec<(usize, Cochain)> = d
        .columns
        .iter()
        .enumerate()
        .filter_map(|(idx, c)| match c {
            ZeroCochain::U(c) => Some((idx, *c)),
            ZeroCochain::V(_) => None,
        })
        .collect();
    let vectors: Vec<Vec<Rat>> = linalg::kernel_basis(&d.matrix)
        .into_iter()
        .map(|v| u_cols.iter().map(|(idx, _)| v[*idx].clone()).collect())
        .collect();
    let reduced = linalg::echelon_basis(&vectors, u_cols.len());
    Ok(reduced
        .into_iter()
        .map(|v| {
            let mut s = Section::zero();
            for ((_, c), val) in u_cols.iter().zip(v) {
                if val.is_zero() {
                    continue;
                }
                let m = ZUMonomial::new(c.k, c.i);
                match c.comp {
                    Component::First => s.a.add_term(m, val),
                    Component::Second => s.b.add_term(m, val),
                }
            }
            s
        })
        .collect())
}

/// Basis of the polynomial sections `(a, b)` of u-degree ≤ `max_degree`,
/// i.e. the genuine global sections over the whole neighbourhood, found by
/// solving the holomorphy conditions exactly (no truncation of `p·b`).
///
/// With `truncate = true` the conditions are imposed modulo `u^{max_degree+1}`
/// instead, which gives H⁰(ℓ_n) directly without the Čech complex.
pub fn polynomial_sections(bundle: &BundleData, max_degree: u32, truncate: bool) -> Vec<Section> {
    let j = bundle.j_i64();
    let p_hi = bundle.p().z_range().map_or(0, |(_, hi)| hi.max(0));
    let mut unknowns: Vec<(Component, ZUMonomial)> = Vec::new();
    for i in 0..=max_degree {
        let ii = i64::from(i);
        for k in 0..=(ii + p_hi) {
            unknowns.push((Component::First, ZUMonomial::new(k, i)));
        }
        for k in 0..=(ii + j) {
            unknowns.push((Component::Second, ZUMonomial::new(k, i)));
        }
    }
    // Only the first V-frame component can fail to be holomorphic.
    let mut row_of: HashMap<ZUMonomial, usize> = HashMap::new();
    let mut columns: Vec<Vec<(usize, Rat)>> = Vec::with_capacity(unknowns.len());
    let mut register = |m: ZUMonomial, c: Rat, col: &mut Vec<(usize, Rat)>| {
        if m.is_v_holomorphic() || (truncate && m.i > max_degree) {
            return;
        }
        let next = row_of.len();
        let r = *row_of.entry(m).or_insert(next);
        col.push((r, c));
    };
    for (comp, m) in &unknowns {
        let mut col = Vec::new();
        match comp {
            Component::First => register(m.times(ZUMonomial::new(j, 0)), Rat::one(), &mut col),
            Component::Second => {
                for (pm, c) in bundle.p().terms() {
                    register(pm.times(*m), c.clone(), &mut col);
                }
            }
        }
        columns.push(col);
    }
    let mut matrix = SparseRatMatrix::zeros(row_of.len(), 0);
    for col in columns {
        matrix.push_col(col).expect("rows registered");
    }
    linalg::kernel_basis(&matrix)
        .into_iter()
        .map(|v| {
            let mut s = Section::zero();
            for ((comp, m), val) in unknowns.iter().zip(v) {
                if val.is_zero() {
                    continue;
                }
                match comp {
                    Component::First => s.a.add_term(*m, val),
                    Component::Second => s.b.add_term(*m, val),
                }
            }
            s
        })
        .collect()
}
