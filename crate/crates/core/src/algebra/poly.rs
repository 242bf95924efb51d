use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::laurent::BiLaurentPoly;
use crate::linalg::Rat;

/// Polynomial in `x, y` with rational coefficients, keyed by `(a, b)` for `x^a y^b`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct XYPoly {
    terms: BTreeMap<(u32, u32), Rat>,
}

/// A column vector over `R = Q[x, y]`.
pub type PolyVec = Vec<XYPoly>;

impl XYPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Rat::one(), 0, 0)
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: Rat, a: u32, b: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p
    }

    /// `x^a y^b`.
    pub fn xy(a: u32, b: u32) -> Self {
        Self::monomial(Rat::one(), a, b)
    }

    pub fn x() -> Self {
        Self::xy(1, 0)
    }

    pub fn y() -> Self {
        Self::xy(0, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Rat)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for ((a, b), c) in terms {
            p.add_term(a, b, c);
        }
        p
    }

    pub fn add_term(&mut self, a: u32, b: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((a, b)).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &Rat)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coeff(&self, a: u32, b: u32) -> Rat {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    /// Lowest total degree of a term (the 𝔪-adic order).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).min()
    }

    pub fn eval(&self, x: &Rat, y: &Rat) -> Rat {
        self.terms.iter().fold(Rat::zero(), |acc, ((a, b), c)| {
            acc + c * pow(x, *a) * pow(y, *b)
        })
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn shift(&self, a: u32, b: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|((ta, tb), v)| ((ta + a, tb + b), v.clone()))
                .collect(),
        }
    }

    /// Pulls back along the blow-down map: `x ↦ u`, `y ↦ zu`.
    pub fn to_zu(&self) -> BiLaurentPoly {
        BiLaurentPoly::from_terms(self.terms.iter().map(|(&(a, b), c)| {
            (
                crate::laurent::ZUMonomial::new(i64::from(b), a + b),
                c.clone(),
            )
        }))
    }

    /// Inverse of [`to_zu`](Self::to_zu) on polynomials whose monomials
    /// `z^k u^i` satisfy `0 ≤ k ≤ i`.
    pub fn from_zu(p: &BiLaurentPoly) -> Option<Self> {
        let mut out = Self::zero();
        for (m, c) in p.terms() {
            let (a, b) = m.to_xy()?;
            out.add_term(a, b, c.clone());
        }
        Some(out)
    }
}

impl fmt::Debug for XYPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for XYPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (&(a, b), c)) in self.terms.iter().rev().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if idx > 0 {
                write!(f, " {sign} ")?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let mut parts = Vec::new();
            let abs = c.abs();
            if !abs.is_one() || (a == 0 && b == 0) {
                parts.push(abs.to_string());
            }
            match a {
                0 => {}
                1 => parts.push("x".into()),
                _ => parts.push(format!("x^{a}")),
            }
            match b {
                0 => {}
                1 => parts.push("y".into()),
                _ => parts.push(format!("y^{b}")),
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a XYPoly> for &'a XYPoly {
    type Output = XYPoly;
    fn add(self, rhs: &XYPoly) -> XYPoly {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a XYPoly> for &'a XYPoly {
    type Output = XYPoly;
    fn sub(self, rhs: &XYPoly) -> XYPoly {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a XYPoly> for &'a XYPoly {
    type Output = XYPoly;
    fn mul(self, rhs: &XYPoly) -> XYPoly {
        let mut out = XYPoly::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &XYPoly {
    type Output = XYPoly;
    fn neg(self) -> XYPoly {
        self.scale(&-Rat::one())
    }
}

pub fn zero_vec(rank: usize) -> PolyVec {
    vec![XYPoly::zero(); rank]
}

pub fn unit_vec(rank: usize, pos: usize) -> PolyVec {
    let mut v = zero_vec(rank);
    v[pos] = XYPoly::one();
    v
}

pub fn is_zero_vec(v: &[XYPoly]) -> bool {
    v.iter().all(XYPoly::is_zero)
}

pub fn vec_add(a: &[XYPoly], b: &[XYPoly]) -> PolyVec {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(p, q)| p + q).collect()
}

pub fn vec_sub(a: &[XYPoly], b: &[XYPoly]) -> PolyVec {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(p, q)| p - q).collect()
}

pub fn vec_scale(v: &[XYPoly], f: &XYPoly) -> PolyVec {
    v.iter().map(|p| p * f).collect()
}

/// `Σ coeffs[i] · columns[i]`, in `R^rank`.
pub fn combine(rank: usize, columns: &[PolyVec], coeffs: &[XYPoly]) -> PolyVec {
    assert_eq!(columns.len(), coeffs.len());
    let mut out = zero_vec(rank);
    for (col, c) in columns.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        assert_eq!(col.len(), rank);
        for (o, p) in out.iter_mut().zip(col) {
            if !p.is_zero() {
                *o = &*o + &(p * c);
            }
        }
    }
    out
}

fn pow(base: &Rat, e: u32) -> Rat {
    (0..e).fold(Rat::one(), |acc, _| acc * base)
}
