//! Laurent polynomials over ℚ in `r` invertible and `s` ordinary variables,
//! and "generic" polynomials whose coefficients are affine-linear forms in
//! indeterminate coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::rc::Rc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{rat, Rational};

/// Shape of `A^{r,s}`: the first `r` variables are invertible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ambient {
    pub r: usize,
    pub s: usize,
}

impl Ambient {
    pub fn new(r: usize, s: usize) -> Self {
        Self { r, s }
    }

    pub fn nvars(&self) -> usize {
        self.r + self.s
    }

    /// Default variable names `x1 .. x{r+s}`.
    pub fn default_names(&self) -> Vec<String> {
        (1..=self.nvars()).map(|i| format!("x{i}")).collect()
    }

    fn check(&self, other: &Ambient) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AmbientMismatch(format!(
                "A^{{{},{}}} vs A^{{{},{}}}",
                self.r, self.s, other.r, other.s
            )))
        }
    }
}

/// Exponent vector of a Laurent monomial.
///
/// Ordered graded-lexicographically (total degree first, then entrywise),
/// with negative entries compared as integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponent(pub Vec<i32>);

impl Exponent {
    pub fn zero(nvars: usize) -> Self {
        Self(vec![0; nvars])
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| i64::from(e)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn add(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn valid_in(&self, amb: &Ambient) -> bool {
        self.0.len() == amb.nvars() && self.0[amb.r..].iter().all(|&e| e >= 0)
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact Laurent polynomial; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    ambient: Ambient,
    terms: BTreeMap<Exponent, Rational>,
}

impl LaurentPoly {
    pub fn zero(ambient: Ambient) -> Self {
        Self {
            ambient,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ambient: Ambient, c: Rational) -> Self {
        let mut p = Self::zero(ambient);
        p.add_term(Exponent::zero(ambient.nvars()), c);
        p
    }

    pub fn one(ambient: Ambient) -> Self {
        Self::constant(ambient, Rational::one())
    }

    /// The coordinate function of variable `i` (0-based).
    pub fn var(ambient: Ambient, i: usize) -> Self {
        let mut e = vec![0; ambient.nvars()];
        e[i] = 1;
        Self::monomial(ambient, e, Rational::one()).expect("positive exponent")
    }

    pub fn monomial(ambient: Ambient, exps: Vec<i32>, c: Rational) -> Result<Self> {
        let e = Exponent(exps);
        if !e.valid_in(&ambient) {
            return Err(Error::InvalidInput(format!(
                "exponent {:?} not allowed in A^{{{},{}}}",
                e.0, ambient.r, ambient.s
            )));
        }
        let mut p = Self::zero(ambient);
        p.add_term(e, c);
        Ok(p)
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Rational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.is_zero().then(|| c.clone())
            }
            _ => None,
        }
    }

    fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.ambient.check(&other.ambient)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.ambient.check(&other.ambient)?;
        let mut out = Self::zero(self.ambient);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1.add(e2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.ambient);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.ambient);
        }
        Self {
            ambient: self.ambient,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Exact value at a point of `A^{r,s}`.
    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.ambient.nvars() {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, expected {}",
                point.len(),
                self.ambient.nvars()
            )));
        }
        if let Some(i) = point[..self.ambient.r].iter().position(Zero::is_zero) {
            return Err(Error::NotInDomain(i + 1));
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(&e.0) {
                match k.cmp(&0) {
                    Ordering::Greater => term *= num_traits::pow(x.clone(), k as usize),
                    Ordering::Less => term /= num_traits::pow(x.clone(), (-k) as usize),
                    Ordering::Equal => {}
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Partial derivative with respect to variable `k` (0-based).
    pub fn derivative(&self, k: usize) -> Self {
        let mut out = Self::zero(self.ambient);
        for (e, c) in &self.terms {
            let p = e.0[k];
            if p != 0 {
                let mut ne = e.clone();
                ne.0[k] -= 1;
                out.add_term(ne, c * rat(i64::from(p)));
            }
        }
        out
    }

    /// Re-embeds into `target`, sending variable `i` to `map[i]`.
    pub fn remap(&self, target: Ambient, map: &[usize]) -> Result<Self> {
        if map.len() != self.ambient.nvars() {
            return Err(Error::Dimension("variable map has the wrong length".into()));
        }
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut ne = vec![0; target.nvars()];
            for (i, &k) in e.0.iter().enumerate() {
                ne[map[i]] += k;
            }
            let ne = Exponent(ne);
            if !ne.valid_in(&target) {
                return Err(Error::AmbientMismatch(format!(
                    "negative exponent lands on an ordinary variable of A^{{{},{}}}",
                    target.r, target.s
                )));
            }
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    /// Componentwise minimum of exponents over all terms (zero for the zero
    /// polynomial).
    pub fn min_exponents(&self) -> Vec<i32> {
        let mut m = vec![0; self.ambient.nvars()];
        for (idx, e) in self.terms.keys().enumerate() {
            for (slot, &k) in m.iter_mut().zip(&e.0) {
                *slot = if idx == 0 { k } else { (*slot).min(k) };
            }
        }
        m
    }

    /// Largest total degree over the terms, or `None` for zero.
    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(Exponent::degree).max()
    }

    pub fn parse(ambient: Ambient, s: &str) -> Result<Self> {
        let names = ambient.default_names();
        Self::parse_with(ambient, s, &names)
    }

    pub fn parse_with(ambient: Ambient, s: &str, names: &[String]) -> Result<Self> {
        let terms = text::parse_terms(s, &|v| names.iter().position(|n| n == v))?;
        let mut p = Self::zero(ambient);
        for (c, factors) in terms {
            let mut e = vec![0i32; ambient.nvars()];
            for (i, k) in factors {
                e[i] += i32::try_from(k).map_err(|_| Error::Parse("exponent too large".into()))?;
            }
            let e = Exponent(e);
            if !e.valid_in(&ambient) {
                return Err(Error::Parse(format!(
                    "negative exponent on an ordinary variable in {s:?}"
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        text::TermsDisplay {
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(e, c)| (c, e.0.iter().map(|&k| i64::from(k)).collect()))
                .collect(),
            names,
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.ambient.default_names();
        let shown = self.display_with(&names).to_string();
        f.write_str(&shown)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_add(rhs).expect("ambient mismatch in addition")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_sub(rhs).expect("ambient mismatch in subtraction")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_mul(rhs).expect("ambient mismatch in multiplication")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            ambient: self.ambient,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

/// Indeterminate coefficient `c_{p, q1..qn}` of the generic polynomial `F_p`
/// at the monomial `y^q`. `p` is 0-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CVar {
    pub p: usize,
    pub q: Vec<u32>,
}

impl fmt::Display for CVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c[{};", self.p + 1)?;
        for (i, k) in self.q.iter().enumerate() {
            write!(f, "{}{k}", if i == 0 { "" } else { "," })?;
        }
        write!(f, "]")
    }
}

/// Affine-linear form `constant + Σ coeff·c` in the indeterminates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinForm {
    pub constant: Rational,
    pub coeffs: BTreeMap<CVar, Rational>,
}

impl LinForm {
    pub fn constant(c: Rational) -> Self {
        Self {
            constant: c,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn var(v: CVar) -> Self {
        Self {
            constant: Rational::zero(),
            coeffs: BTreeMap::from([(v, Rational::one())]),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.is_empty()
    }

    pub fn add_coeff(&mut self, v: &CVar, c: &Rational) {
        if c.is_zero() {
            return;
        }
        if let Some(slot) = self.coeffs.get_mut(v) {
            *slot += c;
            if slot.is_zero() {
                self.coeffs.remove(v);
            }
        } else {
            self.coeffs.insert(v.clone(), c.clone());
        }
    }

    /// `self += factor · other`.
    pub fn add_scaled(&mut self, other: &LinForm, factor: &Rational) {
        self.constant += &other.constant * factor;
        for (v, c) in &other.coeffs {
            self.add_coeff(v, &(c * factor));
        }
    }

    /// Value under an assignment of the indeterminates (missing ones are 0).
    pub fn evaluate(&self, assign: &BTreeMap<CVar, Rational>) -> Rational {
        self.coeffs.iter().fold(self.constant.clone(), |acc, (v, c)| {
            acc + assign.get(v).map_or_else(Rational::zero, |x| x * c)
        })
    }
}

/// Polynomial in `y1..yn` with [`LinForm`] coefficients and bounded total
/// degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericPoly {
    n: usize,
    degree_bound: u32,
    terms: BTreeMap<Vec<u32>, LinForm>,
}

impl GenericPoly {
    pub fn new(n: usize, degree_bound: u32) -> Self {
        Self {
            n,
            degree_bound,
            terms: BTreeMap::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, LinForm> {
        &self.terms
    }

    /// Adds `factor · form` to the coefficient of `y^mono`.
    pub fn add_term(&mut self, mono: Vec<u32>, form: &LinForm, factor: &Rational) {
        assert_eq!(mono.len(), self.n, "y-monomial has the wrong arity");
        assert!(
            mono.iter().sum::<u32>() <= self.degree_bound,
            "y-monomial exceeds the declared degree bound"
        );
        let slot = self.terms.entry(mono.clone()).or_default();
        slot.add_scaled(form, factor);
        if slot.is_zero() {
            self.terms.remove(&mono);
        }
    }

    /// All indeterminates occurring with a nonzero coefficient.
    pub fn cvars(&self) -> std::collections::BTreeSet<CVar> {
        self.terms
            .values()
            .flat_map(|f| f.coeffs.keys().cloned())
            .collect()
    }

    /// Value at `y` under an assignment of the indeterminates.
    pub fn evaluate(&self, y: &[Rational], assign: &BTreeMap<CVar, Rational>) -> Rational {
        assert_eq!(y.len(), self.n);
        self.terms.iter().fold(Rational::zero(), |acc, (mono, form)| {
            let m = mono
                .iter()
                .zip(y)
                .fold(Rational::one(), |p, (&k, v)| p * num_traits::pow(v.clone(), k as usize));
            acc + form.evaluate(assign) * m
        })
    }
}

/// Memoized products `images^mono`, built one factor at a time from the
/// cached predecessor `mono - e_i`.
pub struct PowerCache<'a> {
    images: &'a [LaurentPoly],
    ambient: Ambient,
    cache: HashMap<Vec<u32>, Rc<LaurentPoly>>,
    cached_terms: usize,
    max_cached_terms: usize,
}

impl<'a> PowerCache<'a> {
    pub fn new(images: &'a [LaurentPoly], ambient: Ambient, max_cached_terms: usize) -> Self {
        Self {
            images,
            ambient,
            cache: HashMap::new(),
            cached_terms: 0,
            max_cached_terms,
        }
    }

    pub fn get(&mut self, mono: &[u32]) -> Rc<LaurentPoly> {
        if let Some(p) = self.cache.get(mono) {
            return Rc::clone(p);
        }
        let value = match mono.iter().position(|&k| k > 0) {
            None => LaurentPoly::one(self.ambient),
            Some(i) => {
                let mut prev = mono.to_vec();
                prev[i] -= 1;
                let base = self.get(&prev);
                &*base * &self.images[i]
            }
        };
        let value = Rc::new(value);
        if self.cached_terms + value.len() <= self.max_cached_terms {
            self.cached_terms += value.len();
            self.cache.insert(mono.to_vec(), Rc::clone(&value));
        }
        value
    }
}

/// Default memory bound of the power cache, in stored terms.
pub const DEFAULT_CACHE_TERMS: usize = 5_000_000;

/// Substitutes `y_i ↦ images[i]` into `h` and collects the result by
/// Laurent monomial in the image ambient.
pub fn generic_substitute(
    h: &GenericPoly,
    images: &[LaurentPoly],
) -> Result<BTreeMap<Exponent, LinForm>> {
    generic_substitute_bounded(h, images, DEFAULT_CACHE_TERMS)
}

pub fn generic_substitute_bounded(
    h: &GenericPoly,
    images: &[LaurentPoly],
    max_cached_terms: usize,
) -> Result<BTreeMap<Exponent, LinForm>> {
    if images.len() != h.nvars() {
        return Err(Error::Dimension(format!(
            "{} images for {} y-variables",
            images.len(),
            h.nvars()
        )));
    }
    let Some(first) = images.first() else {
        return Err(Error::Dimension("no y-variables".into()));
    };
    let ambient = first.ambient();
    for im in images {
        ambient.check(&im.ambient())?;
    }
    let mut cache = PowerCache::new(images, ambient, max_cached_terms);
    let mut out: BTreeMap<Exponent, LinForm> = BTreeMap::new();
    for (mono, form) in h.terms() {
        let prod = cache.get(mono);
        for (e, c) in prod.terms() {
            let slot = out.entry(e.clone()).or_default();
            slot.add_scaled(form, c);
            if slot.is_zero() {
                out.remove(e);
            }
        }
    }
    Ok(out)
}

/// Shared text format for polynomials: `1 + 2*x1^-2*x2*x3`, `-3/4*z1*z2^2`.
pub mod text {
    use super::*;

    pub type Term = (Rational, Vec<(usize, i64)>);

    /// Parses a sum of products of rationals and powered variables. `resolve`
    /// maps a variable name to its index.
    pub fn parse_terms(s: &str, resolve: &dyn Fn(&str) -> Option<usize>) -> Result<Vec<Term>> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut p = Parser { chars, pos: 0, src: s, resolve };
        let mut terms = Vec::new();
        let mut first = true;
        while p.pos < p.chars.len() {
            let mut sign = Rational::one();
            match p.peek() {
                Some('+') => p.pos += 1,
                Some('-') => {
                    p.pos += 1;
                    sign = -sign;
                }
                _ if first => {}
                _ => return Err(p.err("expected '+' or '-'")),
            }
            first = false;
            let (c, factors) = p.term()?;
            terms.push((c * sign, factors));
        }
        Ok(terms)
    }

    struct Parser<'a> {
        chars: Vec<char>,
        pos: usize,
        src: &'a str,
        resolve: &'a dyn Fn(&str) -> Option<usize>,
    }

    impl Parser<'_> {
        fn peek(&self) -> Option<char> {
            self.chars.get(self.pos).copied()
        }

        fn err(&self, msg: &str) -> Error {
            Error::Parse(format!("{msg} at position {} in {:?}", self.pos, self.src))
        }

        fn digits(&mut self) -> Result<String> {
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected digits"));
            }
            Ok(self.chars[start..self.pos].iter().collect())
        }

        fn term(&mut self) -> Result<Term> {
            let mut coeff = Rational::one();
            let mut factors = Vec::new();
            loop {
                match self.peek() {
                    Some(c) if c.is_ascii_digit() => {
                        let num: num_bigint::BigInt = self.digits()?.parse().unwrap();
                        let mut value = Rational::from_integer(num);
                        if self.peek() == Some('/') {
                            self.pos += 1;
                            let den: num_bigint::BigInt = self.digits()?.parse().unwrap();
                            if den.is_zero() {
                                return Err(self.err("zero denominator"));
                            }
                            value /= Rational::from_integer(den);
                        }
                        coeff *= value;
                    }
                    Some(c) if c.is_ascii_alphabetic() => {
                        let start = self.pos;
                        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                            self.pos += 1;
                        }
                        let name: String = self.chars[start..self.pos].iter().collect();
                        let idx = (self.resolve)(&name)
                            .ok_or_else(|| Error::Parse(format!("unknown variable {name:?} in {:?}", self.src)))?;
                        let mut k = 1i64;
                        if self.peek() == Some('^') {
                            self.pos += 1;
                            let neg = self.peek() == Some('-');
                            if neg {
                                self.pos += 1;
                            }
                            k = self
                                .digits()?
                                .parse()
                                .map_err(|_| self.err("exponent too large"))?;
                            if neg {
                                k = -k;
                            }
                        }
                        factors.push((idx, k));
                    }
                    _ => return Err(self.err("expected a number or a variable")),
                }
                if self.peek() == Some('*') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            Ok((coeff, factors))
        }
    }

    pub(crate) struct TermsDisplay<'a> {
        pub terms: Vec<(&'a Rational, Vec<i64>)>,
        pub names: &'a [String],
    }

    impl fmt::Display for TermsDisplay<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if self.terms.is_empty() {
                return write!(f, "0");
            }
            for (i, (c, e)) in self.terms.iter().enumerate() {
                let neg = c.is_negative();
                if i == 0 {
                    if neg {
                        write!(f, "-")?;
                    }
                } else {
                    write!(f, " {} ", if neg { '-' } else { '+' })?;
                }
                let mag = c.abs();
                let vars: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k != 0)
                    .map(|(j, &k)| {
                        if k == 1 {
                            self.names[j].clone()
                        } else {
                            format!("{}^{k}", self.names[j])
                        }
                    })
                    .collect();
                if vars.is_empty() {
                    write!(f, "{mag}")?;
                } else if mag.is_one() {
                    write!(f, "{}", vars.join("*"))?;
                } else {
                    write!(f, "{mag}*{}", vars.join("*"))?;
                }
            }
            Ok(())
        }
    }
}
