//! Polynomials over `Q` with a choice of monomial order, Buchberger's
//! algorithm, and elimination of the parameters of `ι(u)·τ(v)` to obtain
//! equations of the closure of `G·L`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::Rational;
use crate::polyring::{text, Ambient, LaurentPoly};
use crate::repmodel::{ModuleVector, RepresentationData};

pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    Lex,
    GrevLex,
    /// Consecutive blocks of the given sizes, compared block by block with
    /// grevlex inside each block.
    Block(Vec<usize>),
}

fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&k| u64::from(k)).sum();
    let db: u64 = b.iter().map(|&k| u64::from(k)).sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b).rev() {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

impl MonomialOrder {
    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::GrevLex => grevlex(a, b),
            MonomialOrder::Block(sizes) => {
                let mut start = 0;
                for &len in sizes {
                    let end = start + len;
                    let o = grevlex(&a[start..end], &b[start..end]);
                    if o != Ordering::Equal {
                        return o;
                    }
                    start = end;
                }
                Ordering::Equal
            }
        }
    }
}

/// A polynomial as a list of terms sorted ascending in the ring's order, so
/// the leading term is last. No zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: Vec<(Monomial, Rational)>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&(Monomial, Rational)> {
        self.terms.last()
    }

    fn lm(&self) -> &Monomial {
        &self.terms.last().expect("nonzero polynomial").0
    }

    fn lc(&self) -> &Rational {
        &self.terms.last().expect("nonzero polynomial").1
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    /// The factor turning this polynomial into a primitive integer polynomial
    /// with positive leading coefficient.
    fn primitive_factor(&self) -> Rational {
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for (_, c) in &self.terms {
            den = den.lcm(c.denom());
            num = num.gcd(c.numer());
        }
        if num.is_zero() {
            return Rational::one();
        }
        let f = Rational::new(den, num);
        if self.lc().is_negative() {
            -f
        } else {
            f
        }
    }

    pub fn primitive(&self) -> Self {
        self.scale(&self.primitive_factor())
    }

    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, (m, c)| {
            let v = m
                .iter()
                .zip(point)
                .fold(c.clone(), |p, (&k, x)| p * num_traits::pow(x.clone(), k as usize));
            acc + v
        })
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        self.terms
            .iter()
            .flat_map(|(m, _)| m.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, _)| i))
            .collect()
    }
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm_mono(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

/// Polynomial ring `Q[names]` with a monomial order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRing {
    names: Vec<String>,
    order: MonomialOrder,
}

/// Abort thresholds for Buchberger's algorithm.
#[derive(Clone, Copy, Debug)]
pub struct GroebnerLimits {
    pub max_basis: usize,
    pub max_pairs: usize,
}

impl Default for GroebnerLimits {
    fn default() -> Self {
        Self {
            max_basis: 5_000,
            max_pairs: 200_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    pub ring: PolyRing,
    pub generators: Vec<Poly>,
}

impl PolyRing {
    pub fn new(names: Vec<String>, order: MonomialOrder) -> Result<Self> {
        if let MonomialOrder::Block(sizes) = &order {
            if sizes.iter().sum::<usize>() != names.len() {
                return Err(Error::Dimension("block sizes do not cover the variables".into()));
            }
        }
        Ok(Self { names, order })
    }

    /// Variables `prefix1..prefixn`.
    pub fn numbered(prefix: &str, n: usize, order: MonomialOrder) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("{prefix}{i}")).collect(), order)
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        self.order.cmp(a, b)
    }

    /// Builds a polynomial from arbitrary terms, combining duplicates.
    pub fn poly(&self, mut terms: Vec<(Monomial, Rational)>) -> Poly {
        assert!(terms.iter().all(|(m, _)| m.len() == self.nvars()), "monomial arity");
        terms.sort_by(|a, b| self.cmp(&a.0, &b.0));
        let mut out: Vec<(Monomial, Rational)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => {
                    if out.last().is_some_and(|(_, c)| c.is_zero()) {
                        out.pop();
                    }
                    out.push((m, c));
                }
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { terms: out }
    }

    pub fn constant(&self, c: Rational) -> Poly {
        self.poly(vec![(vec![0; self.nvars()], c)])
    }

    pub fn var(&self, i: usize) -> Poly {
        let mut m = vec![0; self.nvars()];
        m[i] = 1;
        self.poly(vec![(m, Rational::one())])
    }

    /// `a + factor · x^shift · b`.
    fn add_mul(&self, a: &Poly, factor: &Rational, shift: &[u32], b: &Poly) -> Poly {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let shifted = b.terms.iter().map(|(m, c)| {
            let m: Monomial = m.iter().zip(shift).map(|(x, y)| x + y).collect();
            (m, c * factor)
        });
        let mut left = a.terms.iter().cloned().peekable();
        let mut right = shifted.peekable();
        loop {
            let next = match (left.peek(), right.peek()) {
                (None, None) => break,
                (Some(_), None) => left.next(),
                (None, Some(_)) => right.next(),
                (Some((ma, _)), Some((mb, _))) => match self.cmp(ma, mb) {
                    Ordering::Less => left.next(),
                    Ordering::Greater => right.next(),
                    Ordering::Equal => {
                        let (m, x) = left.next().unwrap();
                        let (_, y) = right.next().unwrap();
                        Some((m, x + y))
                    }
                },
            };
            if let Some(t) = next {
                if !t.1.is_zero() {
                    out.push(t);
                }
            }
        }
        Poly { terms: out }
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        self.add_mul(a, &Rational::one(), &vec![0; self.nvars()], b)
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        self.add_mul(a, &-Rational::one(), &vec![0; self.nvars()], b)
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        a.terms.iter().fold(Poly::zero(), |acc, (m, c)| self.add_mul(&acc, c, m, b))
    }

    /// S-polynomial `lcm/lt(f)·f - lcm/lt(g)·g`.
    pub fn spoly(&self, f: &Poly, g: &Poly) -> Poly {
        let l = lcm_mono(f.lm(), g.lm());
        let sf: Monomial = l.iter().zip(f.lm()).map(|(x, y)| x - y).collect();
        let sg: Monomial = l.iter().zip(g.lm()).map(|(x, y)| x - y).collect();
        let left = self.add_mul(&Poly::zero(), &f.lc().recip(), &sf, f);
        self.add_mul(&left, &-g.lc().recip(), &sg, g)
    }

    /// Remainder of multivariate division by `basis`; with `primitive` the
    /// result is only determined up to a nonzero scalar and coefficients are
    /// kept as primitive integers throughout.
    fn reduce(&self, p: &Poly, basis: &[Poly], primitive: bool) -> Poly {
        let mut p = p.clone();
        let mut rem: Vec<(Monomial, Rational)> = Vec::new();
        while let Some((m, c)) = p.terms.last().cloned() {
            match basis.iter().find(|g| !g.is_zero() && divides(g.lm(), &m)) {
                Some(g) => {
                    let shift: Monomial = m.iter().zip(g.lm()).map(|(x, y)| x - y).collect();
                    let factor = -(&c / g.lc());
                    let mut body = p.clone();
                    body.terms.pop();
                    let mut tail = g.clone();
                    tail.terms.pop();
                    p = self.add_mul(&body, &factor, &shift, &tail);
                    if primitive && !p.is_zero() {
                        let f = p.primitive_factor();
                        if !f.is_one() {
                            p = p.scale(&f);
                            rem.iter_mut().for_each(|(_, x)| *x *= &f);
                        }
                    }
                }
                None => {
                    rem.push(p.terms.pop().unwrap());
                }
            }
        }
        rem.reverse();
        Poly { terms: rem }
    }

    /// Exact remainder of `p` modulo the basis.
    pub fn normal_form(&self, p: &Poly, basis: &GroebnerBasis) -> Poly {
        self.reduce(p, &basis.generators, false)
    }

    /// Reduced Gröbner basis by Buchberger's algorithm with the product and
    /// chain criteria, normalized to primitive integer polynomials with
    /// positive leading coefficients, sorted by decreasing leading monomial.
    pub fn buchberger(&self, gens: &[Poly], limits: GroebnerLimits) -> Result<GroebnerBasis> {
        let mut basis: Vec<Poly> = Vec::new();
        for g in gens {
            if !g.is_zero() && !basis.contains(&g.primitive()) {
                basis.push(g.primitive());
            }
        }
        if basis.is_empty() {
            return Ok(GroebnerBasis {
                ring: self.clone(),
                generators: Vec::new(),
            });
        }
        let mut pending: BTreeSet<(usize, usize)> = BTreeSet::new();
        for j in 0..basis.len() {
            for i in 0..j {
                pending.insert((i, j));
            }
        }
        let mut processed = 0usize;
        while !pending.is_empty() {
            processed += 1;
            if processed > limits.max_pairs {
                return Err(Error::ResourceAbort(format!(
                    "more than {} critical pairs",
                    limits.max_pairs
                )));
            }
            // normal selection strategy: smallest lcm first
            let &(i, j) = pending
                .iter()
                .min_by(|&&(a, b), &&(c, d)| {
                    let l1 = lcm_mono(basis[a].lm(), basis[b].lm());
                    let l2 = lcm_mono(basis[c].lm(), basis[d].lm());
                    self.cmp(&l1, &l2).then((b, a).cmp(&(d, c)))
                })
                .unwrap();
            pending.remove(&(i, j));
            if coprime(basis[i].lm(), basis[j].lm()) {
                continue;
            }
            let l = lcm_mono(basis[i].lm(), basis[j].lm());
            let key = |a: usize, b: usize| (a.min(b), a.max(b));
            let chain = (0..basis.len()).any(|k| {
                k != i
                    && k != j
                    && divides(basis[k].lm(), &l)
                    && !pending.contains(&key(i, k))
                    && !pending.contains(&key(j, k))
            });
            if chain {
                continue;
            }
            let s = self.spoly(&basis[i], &basis[j]);
            let h = self.reduce(&s, &basis, true);
            if h.is_zero() {
                continue;
            }
            if basis.len() >= limits.max_basis {
                return Err(Error::ResourceAbort(format!(
                    "basis grew beyond {} elements",
                    limits.max_basis
                )));
            }
            let k = basis.len();
            basis.push(h.primitive());
            for i in 0..k {
                pending.insert((i, k));
            }
        }
        Ok(GroebnerBasis {
            ring: self.clone(),
            generators: self.interreduce(basis),
        })
    }

    fn interreduce(&self, basis: Vec<Poly>) -> Vec<Poly> {
        let mut minimal: Vec<Poly> = Vec::new();
        let mut sorted = basis;
        sorted.sort_by(|a, b| self.cmp(a.lm(), b.lm()));
        for g in sorted {
            if !minimal.iter().any(|h| divides(h.lm(), g.lm())) {
                minimal.push(g);
            }
        }
        for i in 0..minimal.len() {
            let g = minimal[i].clone();
            let others: Vec<Poly> = minimal
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, p)| p.clone())
                .collect();
            let mut head = g.clone();
            head.terms = vec![g.terms.last().unwrap().clone()];
            let mut tail = g;
            tail.terms.pop();
            let reduced_tail = self.reduce(&tail, &others, false);
            minimal[i] = self.add(&head, &reduced_tail).primitive();
        }
        minimal.sort_by(|a, b| self.cmp(b.lm(), a.lm()));
        minimal
    }

    /// Whether every S-polynomial of the basis reduces to zero.
    pub fn is_groebner(&self, basis: &[Poly]) -> bool {
        (0..basis.len()).all(|j| {
            (0..j).all(|i| self.reduce(&self.spoly(&basis[i], &basis[j]), basis, true).is_zero())
        })
    }

    pub fn parse(&self, s: &str) -> Result<Poly> {
        let resolve = |name: &str| self.names.iter().position(|n| n == name);
        let mut terms = Vec::new();
        for (c, factors) in text::parse_terms(s, &resolve)? {
            let mut m = vec![0u32; self.nvars()];
            for (i, k) in factors {
                let k = u32::try_from(k)
                    .map_err(|_| Error::Parse(format!("negative exponent in {s:?}")))?;
                m[i] += k;
            }
            terms.push((m, c));
        }
        Ok(self.poly(terms))
    }

    pub fn display<'a>(&'a self, p: &'a Poly) -> impl fmt::Display + 'a {
        text::TermsDisplay {
            terms: p
                .terms
                .iter()
                .rev()
                .map(|(m, c)| (c, m.iter().map(|&k| i64::from(k)).collect()))
                .collect(),
            names: &self.names,
        }
    }

    pub fn to_string(&self, p: &Poly) -> String {
        self.display(p).to_string()
    }
}

/// Parametrization `τ: A^l → V` of an affine subvariety by polynomials in
/// `y1..yl`; `l = 0` is a single point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceMap {
    pub l: usize,
    pub images: Vec<LaurentPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub l: usize,
    pub images: Vec<String>,
}

impl SubspaceMap {
    pub fn point(b: &ModuleVector) -> Self {
        let amb = Ambient::new(0, 0);
        Self {
            l: 0,
            images: b.iter().map(|c| LaurentPoly::constant(amb, c.clone())).collect(),
        }
    }

    pub fn names(l: usize) -> Vec<String> {
        (1..=l).map(|i| format!("y{i}")).collect()
    }

    pub fn parse(j: &SubspaceJson) -> Result<Self> {
        if j.images.is_empty() {
            return Err(Error::InvalidInput("subspace map without images".into()));
        }
        let amb = Ambient::new(0, j.l);
        let names = Self::names(j.l);
        let images = j
            .images
            .iter()
            .map(|s| LaurentPoly::parse_with(amb, s, &names))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { l: j.l, images })
    }

    pub fn evaluate(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        self.images.iter().map(|p| p.evaluate(v)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Saturation {
    /// `1 - x1⋯xr·t`.
    #[default]
    Variables,
    /// `1 - h1⋯hn·t` with `hp` the denominators.
    Denominators,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ElimOptions {
    pub saturation: Saturation,
    pub limits: GroebnerLimits,
}

/// Equations `q1..qm` in `z1..zn` whose common zeros are the closure of
/// `G·L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureEquations {
    pub ring: PolyRing,
    pub equations: Vec<Poly>,
}

impl ClosureEquations {
    pub fn to_strings(&self) -> Vec<String> {
        self.equations.iter().map(|q| self.ring.to_string(q)).collect()
    }
}

/// The elimination ring `Q[t, x1..x_{r+s}, y1..yl, z1..zn]`.
pub fn elimination_ring(r: usize, s: usize, l: usize, n: usize) -> Result<PolyRing> {
    let mut names = vec!["t".to_string()];
    names.extend((1..=r + s).map(|i| format!("x{i}")));
    names.extend(SubspaceMap::names(l));
    names.extend((1..=n).map(|i| format!("z{i}")));
    let blocks: Vec<usize> = [1, r + s, l, n].into_iter().filter(|&k| k > 0).collect();
    PolyRing::new(names, MonomialOrder::Block(blocks))
}

/// The generators `hp·zp - gp` and the saturation generator, where
/// `fp = gp / hp = Σq ρpq·τ(zq)` with `hp` a monomial in the invertible
/// variables.
pub fn elimination_ideal(
    rep: &RepresentationData,
    tau: &SubspaceMap,
    saturation: Saturation,
) -> Result<(PolyRing, Vec<Poly>)> {
    let (r, s, n, l) = (rep.r, rep.s, rep.n, tau.l);
    if tau.images.len() != n {
        return Err(Error::Dimension(format!(
            "subspace map has {} images, module has dimension {n}",
            tau.images.len()
        )));
    }
    let amb = Ambient::new(r, s + l);
    let rho_map: Vec<usize> = (0..r + s).collect();
    let tau_map: Vec<usize> = (r + s..r + s + l).collect();
    let images = tau
        .images
        .iter()
        .map(|p| p.remap(amb, &tau_map))
        .collect::<Result<Vec<_>>>()?;
    let ring = elimination_ring(r, s, l, n)?;
    let nv = ring.nvars();
    let z0 = 1 + r + s + l;
    let mut gens = Vec::with_capacity(n + 1);
    let mut den_product = vec![0u32; nv];
    for (p, row) in rep.rho.iter().enumerate() {
        let mut f = LaurentPoly::zero(amb);
        for (entry, im) in row.iter().zip(&images) {
            f = &f + &(&entry.remap(amb, &rho_map)? * im);
        }
        let den: Vec<u32> = f
            .min_exponents()
            .iter()
            .take(r)
            .map(|&k| (-k).max(0) as u32)
            .collect();
        let mut terms = Vec::with_capacity(f.len() + 1);
        for (e, c) in f.terms() {
            let mut m = vec![0u32; nv];
            for (k, &x) in e.0.iter().enumerate() {
                let shift = if k < r { den[k] as i32 } else { 0 };
                m[1 + k] = u32::try_from(x + shift).expect("cleared denominator");
            }
            terms.push((m, -c.clone()));
        }
        let mut hz = vec![0u32; nv];
        for (k, &d) in den.iter().enumerate() {
            hz[1 + k] = d;
            den_product[1 + k] += d;
        }
        hz[z0 + p] = 1;
        terms.push((hz, Rational::one()));
        gens.push(ring.poly(terms));
    }
    let mut sat = vec![0u32; nv];
    sat[0] = 1;
    match saturation {
        Saturation::Variables => (1..=r).for_each(|k| sat[k] = 1),
        Saturation::Denominators => (1..=r).for_each(|k| sat[k] = den_product[k]),
    }
    gens.push(ring.poly(vec![
        (vec![0; nv], Rational::one()),
        (sat, -Rational::one()),
    ]));
    Ok((ring, gens))
}

/// Equations of the closure of `G·L` by elimination of `t`, `x` and `y`.
pub fn closure_equations(
    rep: &RepresentationData,
    tau: &SubspaceMap,
    opts: &ElimOptions,
) -> Result<ClosureEquations> {
    let (ring, gens) = elimination_ideal(rep, tau, opts.saturation)?;
    let gb = ring.buchberger(&gens, opts.limits)?;
    let z0 = ring.nvars() - rep.n;
    let zring = PolyRing::numbered("z", rep.n, MonomialOrder::GrevLex)?;
    let mut equations: Vec<Poly> = gb
        .generators
        .iter()
        .filter(|g| g.variables().iter().all(|&v| v >= z0))
        .map(|g| zring.poly(g.terms().iter().map(|(m, c)| (m[z0..].to_vec(), c.clone())).collect()))
        .collect();
    equations.sort_by(|a, b| zring.cmp(b.lm(), a.lm()));
    Ok(ClosureEquations {
        ring: zring,
        equations,
    })
}

/// Equations of the closure of the orbit `G·b`.
pub fn orbit_closure_equations(
    rep: &RepresentationData,
    b: &ModuleVector,
    opts: &ElimOptions,
) -> Result<ClosureEquations> {
    closure_equations(rep, &SubspaceMap::point(b), opts)
}

/// Whether every equation vanishes at `a`.
pub fn point_in_closure(qs: &ClosureEquations, a: &[Rational]) -> Result<bool> {
    if a.len() != qs.ring.nvars() {
        return Err(Error::Dimension(format!(
            "point has {} coordinates, equations are in {} variables",
            a.len(),
            qs.ring.nvars()
        )));
    }
    Ok(qs.equations.iter().all(|q| q.evaluate(a).is_zero()))
}
