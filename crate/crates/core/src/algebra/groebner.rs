use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::{PolyVec, XYPoly};
use crate::linalg::Rat;

/// Monomial order on `x^a y^b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    /// Graded reverse lexicographic with `x > y`.
    GRevLex,
    /// Graded lexicographic with `x > y`.
    GLex,
    /// Pure lexicographic with `x > y`.
    Lex,
}

/// How positions are compared against monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModuleOrder {
    /// Position over term: a lower position index always wins.
    Pot,
    /// Term over position: the monomial decides, then the lower position.
    Top,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TermOrder {
    pub monomial: MonomialOrder,
    pub module: ModuleOrder,
}

impl TermOrder {
    pub const POT_GREVLEX: Self = Self {
        monomial: MonomialOrder::GRevLex,
        module: ModuleOrder::Pot,
    };
    pub const POT_GLEX: Self = Self {
        monomial: MonomialOrder::GLex,
        module: ModuleOrder::Pot,
    };
    pub const TOP_LEX: Self = Self {
        monomial: MonomialOrder::Lex,
        module: ModuleOrder::Top,
    };

    fn key(self, t: Term) -> Key {
        let (a, b) = (i64::from(t.a), i64::from(t.b));
        let pos = -(t.pos as i64);
        let mono = match self.monomial {
            MonomialOrder::GRevLex => [a + b, -b],
            MonomialOrder::GLex => [a + b, a],
            MonomialOrder::Lex => [a, b],
        };
        match self.module {
            ModuleOrder::Pot => [pos, mono[0], mono[1]],
            ModuleOrder::Top => [mono[0], mono[1], pos],
        }
    }
}

impl Default for TermOrder {
    fn default() -> Self {
        Self::POT_GREVLEX
    }
}

type Key = [i64; 3];

/// Module term `x^a y^b e_pos`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub pos: usize,
    pub a: u32,
    pub b: u32,
}

impl Term {
    pub fn divides(self, other: Term) -> bool {
        self.pos == other.pos && self.a <= other.a && self.b <= other.b
    }
}

/// Sparse module element with integer coefficients, sorted by the active
/// term order. Elements are only meaningful up to a nonzero scalar.
#[derive(Clone, Debug)]
struct Elem {
    terms: BTreeMap<Key, (Term, BigInt)>,
}

impl Elem {
    fn empty() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    /// The integer element `d · v` together with `d`.
    fn from_vec(v: &[XYPoly], order: TermOrder) -> (Self, BigInt) {
        let d = v
            .iter()
            .flat_map(|p| p.terms().map(|(_, c)| c.denom().clone()))
            .fold(BigInt::one(), |acc, den| acc.lcm(&den));
        let mut terms = BTreeMap::new();
        for (pos, p) in v.iter().enumerate() {
            for ((a, b), c) in p.terms() {
                let t = Term { pos, a, b };
                let n = c.numer() * (&d / c.denom());
                terms.insert(order.key(t), (t, n));
            }
        }
        (Self { terms }, d)
    }

    /// `self / divisor` as a rational vector.
    fn to_vec(&self, rank: usize, divisor: &Rat) -> PolyVec {
        let mut out = vec![XYPoly::zero(); rank];
        for (t, c) in self.terms.values() {
            out[t.pos].add_term(t.a, t.b, Rat::from_integer(c.clone()) / divisor);
        }
        out
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lead(&self) -> Option<(Term, &BigInt)> {
        self.terms.last_key_value().map(|(_, (t, c))| (*t, c))
    }

    fn scale(&mut self, k: &BigInt) {
        if !k.is_one() {
            for entry in self.terms.values_mut() {
                entry.1 *= k;
            }
        }
    }

    fn divide_exact(&mut self, k: &BigInt) {
        if !k.is_one() {
            for entry in self.terms.values_mut() {
                entry.1 /= k;
            }
        }
    }

    fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// `self -= c · x^da y^db · other`.
    fn sub_scaled(&mut self, other: &Elem, c: &BigInt, da: u32, db: u32, order: TermOrder) {
        for (t, v) in other.terms.values() {
            let nt = Term {
                pos: t.pos,
                a: t.a + da,
                b: t.b + db,
            };
            let k = order.key(nt);
            let delta = c * v;
            match self.terms.get_mut(&k) {
                Some(entry) => {
                    entry.1 -= delta;
                    if entry.1.is_zero() {
                        self.terms.remove(&k);
                    }
                }
                None => {
                    self.terms.insert(k, (nt, -delta));
                }
            }
        }
    }

    /// Divides by the content and makes the leading coefficient positive;
    /// returns the divisor used.
    fn make_primitive(&mut self) -> BigInt {
        let mut g = self.content();
        if g.is_zero() {
            return BigInt::one();
        }
        if self.lead().is_some_and(|(_, c)| c.is_negative()) {
            g = -g;
        }
        self.divide_exact(&g);
        g
    }
}

/// Reduced Gröbner basis of a submodule of `R^rank`.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    rank: usize,
    order: TermOrder,
    elems: Vec<Elem>,
}

impl GroebnerBasis {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> TermOrder {
        self.order
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> Vec<PolyVec> {
        self.elems
            .iter()
            .map(|e| e.to_vec(self.rank, &Rat::one()))
            .collect()
    }

    pub fn leading_terms(&self) -> Vec<Term> {
        self.elems
            .iter()
            .filter_map(|e| e.lead().map(|(t, _)| t))
            .collect()
    }

    /// Fully reduced normal form of `v`.
    pub fn reduce(&self, v: &[XYPoly]) -> PolyVec {
        assert_eq!(v.len(), self.rank, "vector rank mismatch");
        let (e, d) = Elem::from_vec(v, self.order);
        let (r, scale) = full_reduce(e, &self.elems, None, self.order);
        r.to_vec(self.rank, &(scale * Rat::from_integer(d)))
    }

    pub fn contains(&self, v: &[XYPoly]) -> bool {
        let (e, _) = Elem::from_vec(v, self.order);
        full_reduce(e, &self.elems, None, self.order).0.is_zero()
    }

    /// Checks that every S-polynomial of basis elements reduces to zero.
    pub fn s_pairs_reduce_to_zero(&self) -> bool {
        for i in 0..self.elems.len() {
            for j in (i + 1)..self.elems.len() {
                if let Some(s) = s_poly(&self.elems[i], &self.elems[j], self.order) {
                    if !full_reduce(s, &self.elems, None, self.order).0.is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Number of standard monomials `x^a y^b e_p` with `a + b < thresholds[p]`
    /// (no bound where the threshold is `None`). Equals the quotient dimension
    /// once the truncating monomials lie in the submodule. `None` if infinite.
    fn count_standard(&self, thresholds: &[Option<u32>]) -> Option<usize> {
        assert_eq!(thresholds.len(), self.rank);
        let lts = self.leading_terms();
        let mut total = 0usize;
        for (pos, thr) in thresholds.iter().enumerate() {
            let here: Vec<(u32, u32)> = lts
                .iter()
                .filter(|t| t.pos == pos)
                .map(|t| (t.a, t.b))
                .collect();
            let max_la = here.iter().map(|&(la, _)| la).max();
            let mut a = 0u32;
            loop {
                let mut count: Option<u32> = thr.map(|t| t.saturating_sub(a));
                for &(la, lb) in &here {
                    if la <= a {
                        count = Some(count.map_or(lb, |c| c.min(lb)));
                    }
                }
                match count {
                    None => return None,
                    Some(0) => break,
                    Some(c) => total += c as usize,
                }
                if thr.is_none() && max_la.is_some_and(|m| a >= m) {
                    return None;
                }
                a += 1;
            }
        }
        Some(total)
    }

    /// Dimension of `R^rank / submodule` if finite.
    pub fn quotient_dim(&self) -> Option<usize> {
        self.count_standard(&vec![None; self.rank])
    }
}

fn lcm(s: Term, t: Term) -> Term {
    Term {
        pos: s.pos,
        a: s.a.max(t.a),
        b: s.b.max(t.b),
    }
}

fn s_poly(f: &Elem, g: &Elem, order: TermOrder) -> Option<Elem> {
    let (lf, cf) = f.lead()?;
    let (lg, cg) = g.lead()?;
    if lf.pos != lg.pos {
        return None;
    }
    let l = lcm(lf, lg);
    let gcd = cf.gcd(cg);
    let mut s = Elem::empty();
    s.sub_scaled(f, &-(cg / &gcd), l.a - lf.a, l.b - lf.b, order);
    s.sub_scaled(g, &(cf / &gcd), l.a - lg.a, l.b - lg.b, order);
    Some(s)
}

/// Steps between content removals during a reduction.
const CONTENT_PERIOD: usize = 8;

fn full_reduce(p: Elem, basis: &[Elem], skip: Option<usize>, order: TermOrder) -> (Elem, Rat) {
    reduce_with(p, basis, skip, order, true)
}

/// Returns `(r, s)` where `r` is primitive and `r / s` is a remainder of `p`:
/// fully reduced if `tails`, otherwise only its leading term is irreducible.
fn reduce_with(
    mut p: Elem,
    basis: &[Elem],
    skip: Option<usize>,
    order: TermOrder,
    tails: bool,
) -> (Elem, Rat) {
    let mut rem = Elem::empty();
    let mut scale = Rat::one();
    let mut steps = 0usize;
    while let Some((key, (lt, lc))) = p.terms.pop_last() {
        let divisor = basis.iter().enumerate().find_map(|(idx, g)| {
            if Some(idx) == skip {
                return None;
            }
            let (gt, gc) = g.lead()?;
            gt.divides(lt).then_some((g, gt, gc))
        });
        match divisor {
            Some((g, gt, gc)) => {
                let gcd = lc.gcd(gc);
                let kp = gc / &gcd;
                let kg = &lc / &gcd;
                p.terms.insert(key, (lt, lc));
                p.scale(&kp);
                rem.scale(&kp);
                scale *= Rat::from_integer(kp);
                p.sub_scaled(g, &kg, lt.a - gt.a, lt.b - gt.b, order);
                steps += 1;
                if steps.is_multiple_of(CONTENT_PERIOD) {
                    let c = p.content().gcd(&rem.content());
                    if !c.is_zero() && !c.is_one() {
                        p.divide_exact(&c);
                        rem.divide_exact(&c);
                        scale /= Rat::from_integer(c);
                    }
                }
            }
            None => {
                rem.terms.insert(key, (lt, lc));
                if !tails {
                    rem.terms.append(&mut p.terms);
                }
            }
        }
    }
    let c = rem.make_primitive();
    scale /= Rat::from_integer(c);
    (rem, scale)
}

fn pair_degree(basis: &[Elem], i: usize, j: usize) -> Option<u32> {
    let (li, _) = basis[i].lead()?;
    let (lj, _) = basis[j].lead()?;
    if li.pos != lj.pos {
        return None;
    }
    let l = lcm(li, lj);
    Some(l.a + l.b)
}

/// Buchberger's algorithm with the normal selection strategy; returns the
/// reduced basis.
pub fn groebner(rank: usize, columns: &[PolyVec], order: TermOrder) -> GroebnerBasis {
    let mut basis: Vec<Elem> = Vec::new();
    let mut queue: BinaryHeap<Reverse<(u32, usize, usize)>> = BinaryHeap::new();
    for col in columns {
        assert_eq!(col.len(), rank, "column rank mismatch");
        let (e, _) = reduce_with(Elem::from_vec(col, order).0, &basis, None, order, false);
        if !e.is_zero() {
            push_elem(&mut basis, &mut queue, e);
        }
    }
    while let Some(Reverse((_, i, j))) = queue.pop() {
        if let Some(s) = s_poly(&basis[i], &basis[j], order) {
            let (r, _) = reduce_with(s, &basis, None, order, false);
            if !r.is_zero() {
                push_elem(&mut basis, &mut queue, r);
            }
        }
    }
    GroebnerBasis {
        rank,
        order,
        elems: interreduce(basis, order),
    }
}

fn push_elem(
    basis: &mut Vec<Elem>,
    queue: &mut BinaryHeap<Reverse<(u32, usize, usize)>>,
    mut e: Elem,
) {
    e.make_primitive();
    let idx = basis.len();
    basis.push(e);
    for i in 0..idx {
        if let Some(d) = pair_degree(basis, i, idx) {
            queue.push(Reverse((d, i, idx)));
        }
    }
}

fn interreduce(basis: Vec<Elem>, order: TermOrder) -> Vec<Elem> {
    let leads: Vec<Term> = basis.iter().map(|e| e.lead().expect("nonzero").0).collect();
    let mut keep: Vec<Elem> = Vec::new();
    for (i, e) in basis.iter().enumerate() {
        let redundant = leads
            .iter()
            .enumerate()
            .any(|(j, &lj)| j != i && lj.divides(leads[i]) && (lj != leads[i] || j < i));
        if !redundant {
            keep.push(e.clone());
        }
    }
    let mut out = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        out.push(full_reduce(keep[i].clone(), &keep, Some(i), order).0);
    }
    out.sort_by_key(|e| std::cmp::Reverse(order.key(e.lead().expect("nonzero").0)));
    out
}
