//! Greatest common divisors in `Q[x, y]`, via primitive pseudo-remainder
//! sequences in `x` over `Q[y]`.

use num_traits::Zero;

use super::poly::XYPoly;
use crate::linalg::Rat;

/// Dense univariate polynomial in `y`; index is the exponent.
type UPoly = Vec<Rat>;

fn trim(mut p: UPoly) -> UPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn u_mul(a: &[Rat], b: &[Rat]) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn u_sub(a: &[Rat], b: &[Rat]) -> UPoly {
    let mut out = vec![Rat::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

/// Quotient and remainder over `Q`.
fn u_divrem(a: &[Rat], b: &[Rat]) -> (UPoly, UPoly) {
    let mut r: UPoly = trim(a.to_vec());
    let db = b.len() - 1;
    let lead = &b[db];
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![Rat::zero(); r.len() - db];
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = &r[r.len() - 1] / lead;
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &c * bi;
        }
        q[shift] = c;
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

fn u_monic(mut p: UPoly) -> UPoly {
    if let Some(lead) = p.last().cloned() {
        for c in &mut p {
            *c /= &lead;
        }
    }
    p
}

fn u_gcd(a: &[Rat], b: &[Rat]) -> UPoly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let (_, r) = u_divrem(&a, &b);
        a = b;
        b = r;
    }
    u_monic(a)
}

/// `f` as a polynomial in `x` with coefficients in `Q[y]`.
type BPoly = Vec<UPoly>;

fn to_bpoly(f: &XYPoly) -> BPoly {
    let mut out: BPoly = Vec::new();
    for ((a, b), c) in f.terms() {
        let (a, b) = (a as usize, b as usize);
        if out.len() <= a {
            out.resize(a + 1, Vec::new());
        }
        if out[a].len() <= b {
            out[a].resize(b + 1, Rat::zero());
        }
        out[a][b] = c.clone();
    }
    b_trim(out)
}

fn from_bpoly(p: &BPoly) -> XYPoly {
    XYPoly::from_terms(p.iter().enumerate().flat_map(|(a, coeff)| {
        coeff
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(b, c)| ((a as u32, b as u32), c.clone()))
    }))
}

fn b_trim(mut p: BPoly) -> BPoly {
    while p.last().is_some_and(Vec::is_empty) {
        p.pop();
    }
    p
}

fn content(p: &BPoly) -> UPoly {
    p.iter()
        .filter(|c| !c.is_empty())
        .fold(Vec::new(), |acc, c| {
            if acc.is_empty() {
                u_monic(c.clone())
            } else {
                u_gcd(&acc, c)
            }
        })
}

fn primitive_part(p: &BPoly) -> BPoly {
    let c = content(p);
    p.iter()
        .map(|coeff| {
            if coeff.is_empty() {
                Vec::new()
            } else {
                u_divrem(coeff, &c).0
            }
        })
        .collect()
}

/// Pseudo-remainder of `f` by `g` in `x`.
fn prem(f: &BPoly, g: &BPoly) -> BPoly {
    let dg = g.len() - 1;
    let lg = &g[dg];
    let mut r = f.clone();
    while r.len() > dg {
        let shift = r.len() - 1 - dg;
        let lr = r[r.len() - 1].clone();
        let mut next: BPoly = r.iter().map(|c| u_mul(c, lg)).collect();
        for (i, gi) in g.iter().enumerate() {
            next[shift + i] = u_sub(&next[shift + i], &u_mul(&lr, gi));
        }
        next.pop();
        r = b_trim(next);
    }
    r
}

/// A greatest common divisor of `f` and `g`; zero only if both are zero.
pub fn gcd(f: &XYPoly, g: &XYPoly) -> XYPoly {
    let (f, g) = (to_bpoly(f), to_bpoly(g));
    if f.is_empty() {
        return from_bpoly(&g);
    }
    if g.is_empty() {
        return from_bpoly(&f);
    }
    let c = u_gcd(&content(&f), &content(&g));
    let (mut a, mut b) = (primitive_part(&f), primitive_part(&g));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = prem(&a, &b);
        a = b;
        b = if r.is_empty() { r } else { primitive_part(&r) };
    }
    let out: BPoly = a.iter().map(|coeff| u_mul(coeff, &c)).collect();
    from_bpoly(&b_trim(out))
}

/// A greatest common divisor of all `polys`; zero if all are zero.
pub fn gcd_all<'a, I: IntoIterator<Item = &'a XYPoly>>(polys: I) -> XYPoly {
    polys.into_iter().fold(XYPoly::zero(), |acc, p| {
        let g = gcd(&acc, p);
        if g.total_degree() == Some(0) {
            XYPoly::one()
        } else {
            g
        }
    })
}

/// `f / d` when `d` divides `f` exactly.
pub fn exact_quotient(f: &XYPoly, d: &XYPoly) -> Option<XYPoly> {
    let ((da, db), dc) = d.terms().last()?;
    let mut r = f.clone();
    let mut q = XYPoly::zero();
    while let Some(((ra, rb), rc)) = r.terms().last() {
        if ra < da || rb < db {
            return None;
        }
        let t = XYPoly::monomial(rc / dc, ra - da, rb - db);
        r = &r - &(&t * d);
        q = &q + &t;
    }
    Some(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::xy_poly;

    fn divides(d: &XYPoly, f: &XYPoly) -> bool {
        exact_quotient(f, d).is_some()
    }

    #[test]
    fn gcd_examples() {
        let x = xy_poly(&[(1, 1, 0)]);
        let y = xy_poly(&[(1, 0, 1)]);
        let f = &(&x * &y) * &(&x + &y);
        let g = &(&x * &x) * &(&x + &y);
        let d = gcd(&f, &g);
        assert_eq!(d.total_degree(), Some(2));
        assert!(divides(&d, &f) && divides(&d, &g));
        assert!(divides(&(&x * &(&x + &y)), &(&d * &xy_poly(&[(1, 0, 0)]))));
        assert_eq!(gcd(&x, &y).total_degree(), Some(0));
        assert_eq!(gcd_all([&f, &g, &y]).total_degree(), Some(0));
        let unit = xy_poly(&[(1, 0, 0), (3, 1, 1)]);
        let h = &(&y * &y) * &unit;
        let k = &(&y * &x) * &unit;
        let d = gcd(&h, &k);
        assert_eq!(d.total_degree(), Some(3));
        assert!(divides(&d, &h) && divides(&d, &k));
    }
}
