//! Sparse polynomials in `z` (Laurent) and `u` over the rationals: the
//! coordinate ring of the `U` chart of the blown-up plane, localized along
//! the overlap with the `V` chart.
//!
//! Chart conventions: `U` has coordinates `(z, u)`, `V` has `(ξ, v)` with
//! `ξ = z⁻¹`, `v = zu`, and the blow-down map is `(x, y) = (u, zu)`. A
//! monomial `z^k u^i` is holomorphic on `U` when `k ≥ 0` and on `V` when
//! `k ≤ i`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::Rat;

mod parse;

pub use parse::ParseError;

/// The monomial `z^k u^i`. Ordered by `i`, then `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZUMonomial {
    pub i: u32,
    pub k: i64,
}

impl ZUMonomial {
    pub fn new(k: i64, i: u32) -> Self {
        Self { i, k }
    }

    pub fn is_u_holomorphic(self) -> bool {
        self.k >= 0
    }

    pub fn is_v_holomorphic(self) -> bool {
        self.k <= i64::from(self.i)
    }

    /// As a monomial `x^a y^b` under `x = u`, `y = zu`, when both exponents
    /// are non-negative.
    pub fn to_xy(self) -> Option<(u32, u32)> {
        let a = i64::from(self.i) - self.k;
        if self.k >= 0 && a >= 0 {
            Some((a as u32, self.k as u32))
        } else {
            None
        }
    }

    pub fn times(self, other: Self) -> Self {
        Self {
            i: self.i + other.i,
            k: self.k + other.k,
        }
    }
}

/// Exact sparse polynomial `Σ c_{k,i} z^k u^i` with `i ≥ 0`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BiLaurentPoly {
    terms: BTreeMap<ZUMonomial, Rat>,
}

impl fmt::Debug for BiLaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiLaurentPoly({self})")
    }
}

impl BiLaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Rat::one(), 0, 0)
    }

    pub fn monomial(coeff: Rat, k: i64, i: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(ZUMonomial::new(k, i), coeff);
        p
    }

    /// `z^k u^i` with coefficient one.
    pub fn zu(k: i64, i: u32) -> Self {
        Self::monomial(Rat::one(), k, i)
    }

    pub fn from_terms<I: IntoIterator<Item = (ZUMonomial, Rat)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: ZUMonomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (ZUMonomial, &Rat)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coeff(&self, m: ZUMonomial) -> Rat {
        self.terms.get(&m).cloned().unwrap_or_else(Rat::zero)
    }

    /// Highest power of `u` present (0 for the zero polynomial).
    pub fn u_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.i).max().unwrap_or(0)
    }

    pub fn z_range(&self) -> Option<(i64, i64)> {
        let lo = self.terms.keys().map(|m| m.k).min()?;
        let hi = self.terms.keys().map(|m| m.k).max()?;
        Some((lo, hi))
    }

    /// Spread of z-exponents; 0 for the zero polynomial.
    pub fn span_z(&self) -> i64 {
        self.z_range().map_or(0, |(lo, hi)| hi - lo)
    }

    pub fn scalar_mul(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    /// Multiplication by the monomial `z^k u^i`.
    pub fn shift(&self, k: i64, i: u32) -> Self {
        let s = ZUMonomial::new(k, i);
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.times(s), v.clone()))
                .collect(),
        }
    }

    /// Rewrites in `V`-chart coordinates: `z^k u^i ↦ ξ^{i−k} v^i`, with the
    /// result stored in the same representation (`ξ` in the `z` slot, `v` in
    /// the `u` slot). The map is an involution.
    pub fn to_v_chart(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (ZUMonomial::new(i64::from(m.i) - m.k, m.i), v.clone()))
                .collect(),
        }
    }

    pub fn from_v_chart(&self) -> Self {
        self.to_v_chart()
    }

    pub fn is_u_holomorphic(&self) -> bool {
        self.terms.keys().all(|m| m.is_u_holomorphic())
    }

    pub fn is_v_holomorphic(&self) -> bool {
        self.terms.keys().all(|m| m.is_v_holomorphic())
    }

    /// Reduction modulo `u^{n+1}`.
    pub fn truncate_u(&self, n: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.i <= n)
                .map(|(m, v)| (*m, v.clone()))
                .collect(),
        }
    }

    /// Part with u-degree exactly `i`.
    pub fn u_component(&self, i: u32) -> Self {
        Self {
            terms: self
                .terms
                .range(ZUMonomial::new(i64::MIN, i)..=ZUMonomial::new(i64::MAX, i))
                .map(|(m, v)| (*m, v.clone()))
                .collect(),
        }
    }

    /// Lowest u-degree carrying a term, if any.
    pub fn u_order(&self) -> Option<u32> {
        self.terms.keys().next().map(|m| m.i)
    }
}

impl<'a> Add<&'a BiLaurentPoly> for &'a BiLaurentPoly {
    type Output = BiLaurentPoly;
    fn add(self, rhs: &BiLaurentPoly) -> BiLaurentPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a BiLaurentPoly> for &'a BiLaurentPoly {
    type Output = BiLaurentPoly;
    fn sub(self, rhs: &BiLaurentPoly) -> BiLaurentPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a BiLaurentPoly> for &'a BiLaurentPoly {
    type Output = BiLaurentPoly;
    fn mul(self, rhs: &BiLaurentPoly) -> BiLaurentPoly {
        let mut out = BiLaurentPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.times(*mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &BiLaurentPoly {
    type Output = BiLaurentPoly;
    fn neg(self) -> BiLaurentPoly {
        BiLaurentPoly {
            terms: self.terms.iter().map(|(m, v)| (*m, -v.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<BiLaurentPoly> for BiLaurentPoly {
            type Output = BiLaurentPoly;
            fn $f(self, rhs: BiLaurentPoly) -> BiLaurentPoly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for BiLaurentPoly {
    /// Canonical text form, parseable by [`BiLaurentPoly::from_str`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (idx, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut atoms = Vec::new();
            match m.k {
                0 => {}
                1 => atoms.push("z".to_string()),
                k => atoms.push(format!("z^{k}")),
            }
            match m.i {
                0 => {}
                1 => atoms.push("u".to_string()),
                i => atoms.push(format!("u^{i}")),
            }
            let coeff = if abs.is_one() && !atoms.is_empty() {
                None
            } else {
                Some(abs.to_string())
            };
            let parts: Vec<String> = coeff.into_iter().chain(atoms).collect();
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl FromStr for BiLaurentPoly {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::parse_poly(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BundleError {
    #[error("term z^{k} u^{i} lies outside the normal-form window for j = {j}")]
    WindowViolation { j: u32, k: i64, i: u32 },
}

/// Whether `z^k u^i` may appear in the off-diagonal entry for splitting type `j`:
/// `1 ≤ i ≤ 2j−2` and `i−j+1 ≤ k ≤ j−1`.
pub fn in_normal_form_window(j: u32, m: ZUMonomial) -> bool {
    let j = i64::from(j);
    let i = i64::from(m.i);
    (1..=2 * j - 2).contains(&i) && (i - j + 1..=j - 1).contains(&m.k)
}

/// All monomials of the normal-form window for `j`, in canonical order.
pub fn normal_form_window(j: u32) -> Vec<ZUMonomial> {
    let jj = i64::from(j);
    let mut out = Vec::new();
    for i in 1..=(2 * jj - 2).max(0) {
        for k in (i - jj + 1)..=(jj - 1) {
            out.push(ZUMonomial::new(k, i as u32));
        }
    }
    out
}

/// A validated local model: transition matrix `[[z^j, p], [0, z^{-j}]]`
/// from `U` to `V`.
///
/// A section is a pair `(a, b)` in `U`-frame coordinates with `a, b`
/// holomorphic on `U` and `T·(a, b) = (z^j a + p b, z^{-j} b)` holomorphic
/// on `V`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BundleData {
    j: u32,
    p: BiLaurentPoly,
}

impl BundleData {
    pub fn new(j: u32, p: BiLaurentPoly) -> Result<Self, BundleError> {
        if let Some((m, _)) = p.terms().find(|(m, _)| !in_normal_form_window(j, *m)) {
            return Err(BundleError::WindowViolation { j, k: m.k, i: m.i });
        }
        Ok(Self { j, p })
    }

    pub fn split(j: u32) -> Self {
        Self {
            j,
            p: BiLaurentPoly::zero(),
        }
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn p(&self) -> &BiLaurentPoly {
        &self.p
    }

    pub fn j_i64(&self) -> i64 {
        i64::from(self.j)
    }

    /// `U`-frame pair to `V`-frame pair: `(z^j a + p b, z^{-j} b)`.
    pub fn to_v_frame(
        &self,
        a: &BiLaurentPoly,
        b: &BiLaurentPoly,
    ) -> (BiLaurentPoly, BiLaurentPoly) {
        let j = self.j_i64();
        (&a.shift(j, 0) + &(&self.p * b), b.shift(-j, 0))
    }

    /// `V`-frame pair to `U`-frame pair: `(z^{-j} a − p b, z^j b)`.
    pub fn to_u_frame(
        &self,
        a: &BiLaurentPoly,
        b: &BiLaurentPoly,
    ) -> (BiLaurentPoly, BiLaurentPoly) {
        let j = self.j_i64();
        (&a.shift(-j, 0) - &(&self.p * b), b.shift(j, 0))
    }

    pub fn scaled(&self, c: &Rat) -> Self {
        Self {
            j: self.j,
            p: self.p.scalar_mul(c),
        }
    }
}

pub fn validate_bundle(j: u32, p: BiLaurentPoly) -> Result<BundleData, BundleError> {
    BundleData::new(j, p)
}
