//! Closure membership for diagonal torus actions via supports, faces of
//! weight cones and multiplicative solvability.
//!
//! The closure of `T·b` is the union over faces `F` of `cone(supp b)` of the
//! orbits of the projections of `b` to the weights in `F`. So `a` lies in it
//! iff `supp a = supp b ∩ F` for some face `F` and `a` is a torus translate
//! of that projection.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{self, Rational};

/// Largest rank accepted by the cone routines.
pub const MAX_RANK: usize = 8;

pub type Weight = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedVector {
    pub weights: Vec<Weight>,
    pub components: Vec<Rational>,
}

impl WeightedVector {
    pub fn new(weights: Vec<Weight>, components: Vec<Rational>) -> Result<Self> {
        if weights.len() != components.len() {
            return Err(Error::Dimension(format!(
                "{} weights for {} components",
                weights.len(),
                components.len()
            )));
        }
        let r = weights.first().map_or(0, Vec::len);
        if weights.iter().any(|w| w.len() != r) {
            return Err(Error::InvalidInput("weights have inconsistent lengths".into()));
        }
        Ok(Self {
            weights,
            components,
        })
    }

    /// Components grouped by weight.
    pub fn weight_spaces(&self) -> BTreeMap<&Weight, Vec<&Rational>> {
        let mut out: BTreeMap<&Weight, Vec<&Rational>> = BTreeMap::new();
        for (w, c) in self.weights.iter().zip(&self.components) {
            out.entry(w).or_default().push(c);
        }
        out
    }
}

/// Weights whose weight-space projection is nonzero.
pub fn support(wv: &WeightedVector) -> BTreeSet<Weight> {
    wv.weight_spaces()
        .into_iter()
        .filter(|(_, cs)| cs.iter().any(|c| !c.is_zero()))
        .map(|(w, _)| w.clone())
        .collect()
}

fn to_rational(w: &[i64]) -> Vec<Rational> {
    w.iter().map(|&k| exactmath::rat(k)).collect()
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Scales a nonzero vector to a primitive integer vector.
fn primitive_direction(v: &[Rational]) -> Vec<Rational> {
    let den = v.iter().fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| num_integer::gcd(acc, x.clone()));
    ints.into_iter()
        .map(|x| Rational::from_integer(if g.is_zero() { x } else { x / &g }))
        .collect()
}

/// Generators of the dual cone `{u : g·u ≥ 0 for all g}` in `Q^r`, by
/// eliminating one inequality at a time starting from `±e1..±er`.
pub fn dual_cone(gens: &[Vec<Rational>], r: usize) -> Result<Vec<Vec<Rational>>> {
    if r > MAX_RANK {
        return Err(Error::Oversized(format!("cone of rank {r} exceeds the limit of {MAX_RANK}")));
    }
    let mut rays: Vec<Vec<Rational>> = Vec::with_capacity(2 * r);
    for i in 0..r {
        for s in [1, -1] {
            let mut e = vec![Rational::zero(); r];
            e[i] = exactmath::rat(s);
            rays.push(e);
        }
    }
    for g in gens {
        let (mut pos, mut zero, mut neg) = (Vec::new(), Vec::new(), Vec::new());
        for ray in rays {
            let v = dot(g, &ray);
            if v.is_positive() {
                pos.push((ray, v));
            } else if v.is_zero() {
                zero.push(ray);
            } else {
                neg.push((ray, v));
            }
        }
        let mut next: BTreeSet<Vec<Rational>> = zero.into_iter().collect();
        next.extend(pos.iter().map(|(p, _)| p.clone()));
        for (p, vp) in &pos {
            for (n, vn) in &neg {
                let comb: Vec<Rational> = p.iter().zip(n).map(|(x, y)| vp * y - vn * x).collect();
                if comb.iter().any(|x| !x.is_zero()) {
                    next.insert(primitive_direction(&comb));
                }
            }
        }
        rays = next.into_iter().collect();
    }
    Ok(rays)
}

/// Whether `x` lies in the cone with the given dual generators.
fn in_cone(dual: &[Vec<Rational>], x: &[Rational]) -> bool {
    dual.iter().all(|u| !dot(u, x).is_negative())
}

fn rank_of(set: &BTreeSet<Weight>, other: &BTreeSet<Weight>) -> Result<usize> {
    let r = set.iter().chain(other).next().map_or(0, Vec::len);
    if set.iter().chain(other).any(|w| w.len() != r) {
        return Err(Error::InvalidInput("weights have inconsistent lengths".into()));
    }
    Ok(r)
}

/// A functional `u`, nonpositive on `cone(sb)`, whose zero set cuts out the
/// smallest face containing `sa`. `None` if `sa` is not inside the cone.
pub fn minimal_face(sa: &BTreeSet<Weight>, sb: &BTreeSet<Weight>) -> Result<Option<Vec<Rational>>> {
    let r = rank_of(sa, sb)?;
    let gb: Vec<Vec<Rational>> = sb.iter().map(|w| to_rational(w)).collect();
    let ga: Vec<Vec<Rational>> = sa.iter().map(|w| to_rational(w)).collect();
    let dual = dual_cone(&gb, r)?;
    if !ga.iter().all(|s| in_cone(&dual, s)) {
        return Ok(None);
    }
    let mut phi = vec![Rational::zero(); r];
    for u in dual.iter().filter(|u| ga.iter().all(|s| dot(u, s).is_zero())) {
        phi.iter_mut().zip(u).for_each(|(p, x)| *p -= x);
    }
    Ok(Some(phi))
}

/// Whether `cone(sa)` is a face of `cone(sb)`, with a supporting functional
/// (nonpositive on `cone(sb)`, zero exactly on the face) when it is.
pub fn face_test(sa: &BTreeSet<Weight>, sb: &BTreeSet<Weight>) -> Result<Option<Vec<Rational>>> {
    let Some(phi) = minimal_face(sa, sb)? else {
        return Ok(None);
    };
    let r = phi.len();
    let ga: Vec<Vec<Rational>> = sa.iter().map(|w| to_rational(w)).collect();
    let dual_a = dual_cone(&ga, r)?;
    let face_gens_inside = sb
        .iter()
        .map(|w| to_rational(w))
        .filter(|g| dot(&phi, g).is_zero())
        .all(|g| in_cone(&dual_a, &g));
    Ok(face_gens_inside.then_some(phi))
}

fn pow_signed(x: &Rational, k: &BigInt) -> Result<Rational> {
    let e = k
        .abs()
        .to_usize()
        .ok_or_else(|| Error::Oversized("lattice relation with huge coefficients".into()))?;
    let p = num_traits::pow(x.clone(), e);
    Ok(if k.is_negative() { p.recip() } else { p })
}

/// Whether some `g` in the torus satisfies `g^λ = ratio` for every pair.
///
/// Over an algebraically closed field this holds iff every integer relation
/// `Σ cλ·λ = 0` among the weights gives `∏ ratio^cλ = 1`.
pub fn scaling_exists(pairs: &[(Weight, Rational)]) -> Result<bool> {
    if pairs.iter().any(|(_, c)| c.is_zero()) {
        return Err(Error::InvalidInput("ratios must be nonzero".into()));
    }
    if pairs.is_empty() {
        return Ok(true);
    }
    let m: Vec<Vec<BigInt>> = pairs
        .iter()
        .map(|(w, _)| w.iter().map(|&k| BigInt::from(k)).collect())
        .collect();
    for c in exactmath::integer_left_kernel(&m) {
        let mut prod = Rational::one();
        for (ci, (_, ratio)) in c.iter().zip(pairs) {
            prod *= pow_signed(ratio, ci)?;
        }
        if !prod.is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `a` lies in the closure of the torus orbit of `b` under the
/// diagonal action with the given weights.
pub fn torus_decide(weights: &[Weight], a: &[Rational], b: &[Rational]) -> Result<bool> {
    let wa = WeightedVector::new(weights.to_vec(), a.to_vec())?;
    let wb = WeightedVector::new(weights.to_vec(), b.to_vec())?;
    let sa = support(&wa);
    let sb = support(&wb);
    if !sa.is_subset(&sb) {
        return Ok(false);
    }
    let Some(phi) = minimal_face(&sa, &sb)? else {
        return Ok(false);
    };
    let on_face: BTreeSet<Weight> = sb
        .iter()
        .filter(|w| dot(&phi, &to_rational(w)).is_zero())
        .cloned()
        .collect();
    if on_face != sa {
        return Ok(false);
    }
    let spaces_a = wa.weight_spaces();
    let spaces_b = wb.weight_spaces();
    let mut pairs = Vec::with_capacity(sa.len());
    for w in &sa {
        let (ca, cb) = (&spaces_a[w], &spaces_b[w]);
        let Some(k) = ca.iter().position(|c| !c.is_zero()) else {
            return Ok(false);
        };
        let ratio = cb[k] / ca[k];
        if ca.iter().zip(cb).any(|(x, y)| *y != &(*x * &ratio)) {
            return Ok(false);
        }
        if ratio.is_zero() {
            return Ok(false);
        }
        pairs.push((w.clone(), ratio));
    }
    scaling_exists(&pairs)
}

/// Parses weights written as `1;2` or `1,0;0,1`.
pub fn parse_weights(s: &str) -> Result<Vec<Weight>> {
    let weights = s
        .split(';')
        .map(|w| {
            w.split(',')
                .map(|k| {
                    k.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad weight entry {k:?}")))
                })
                .collect::<Result<Weight>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let r = weights.first().map_or(0, Vec::len);
    if weights.iter().any(|w| w.len() != r) {
        return Err(Error::InvalidInput("weights have inconsistent lengths".into()));
    }
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{rat, ratio};
    use proptest::prelude::*;

    fn set(ws: &[&[i64]]) -> BTreeSet<Weight> {
        ws.iter().map(|w| w.to_vec()).collect()
    }

    fn q(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn supports() {
        let wv = WeightedVector::new(vec![vec![1], vec![-1]], q(&[1, 0])).unwrap();
        assert_eq!(support(&wv), set(&[&[1]]));
        let wv = WeightedVector::new(vec![vec![1], vec![-1]], q(&[0, 0])).unwrap();
        assert!(support(&wv).is_empty());
        let wv = WeightedVector::new(vec![vec![1], vec![1], vec![2]], q(&[1, -1, 5])).unwrap();
        assert_eq!(support(&wv), set(&[&[1], &[2]]));
        assert!(WeightedVector::new(vec![vec![1]], q(&[1, 2])).is_err());
    }

    #[test]
    fn faces() {
        assert!(face_test(&set(&[&[1]]), &set(&[&[1], &[-1]])).unwrap().is_none());
        let u = face_test(&BTreeSet::new(), &set(&[&[1], &[2]])).unwrap().unwrap();
        assert_eq!(u, q(&[-1]));
        let s = set(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert!(face_test(&s, &s).unwrap().is_some());
        assert!(face_test(&set(&[&[1, 0]]), &s).unwrap().is_some());
        assert!(face_test(&set(&[&[1, 1]]), &s).unwrap().is_none());
        assert!(face_test(&set(&[&[2, 0]]), &s).unwrap().is_some());
        let big = set(&[&[1; 9]]);
        assert!(matches!(face_test(&big, &big), Err(Error::Oversized(_))));
    }

    #[test]
    fn scalings() {
        assert!(scaling_exists(&[(vec![1], rat(5))]).unwrap());
        assert!(scaling_exists(&[(vec![1], rat(2)), (vec![2], rat(4))]).unwrap());
        assert!(!scaling_exists(&[(vec![1], rat(2)), (vec![2], rat(5))]).unwrap());
        assert!(scaling_exists(&[(vec![2], rat(-1))]).unwrap());
        assert!(scaling_exists(&[(vec![1], rat(0))]).is_err());
    }

    #[test]
    fn decisions() {
        let w = vec![vec![1], vec![2]];
        assert!(torus_decide(&w, &q(&[0, 0]), &q(&[1, 1])).unwrap());
        assert!(!torus_decide(&w, &q(&[1, 0]), &q(&[1, 1])).unwrap());
        assert!(!torus_decide(&w, &q(&[0, 1]), &q(&[1, 1])).unwrap());
        assert!(torus_decide(&w, &q(&[3, 9]), &q(&[1, 1])).unwrap());
        assert!(!torus_decide(&w, &q(&[3, 8]), &q(&[1, 1])).unwrap());
        let h = vec![vec![1], vec![-1]];
        assert!(torus_decide(&h, &[rat(2), ratio(1, 2)], &q(&[1, 1])).unwrap());
        assert!(!torus_decide(&h, &q(&[0, 0]), &q(&[1, 1])).unwrap());
        assert!(!torus_decide(&h, &q(&[1, 0]), &q(&[1, 1])).unwrap());
        assert!(torus_decide(&h, &q(&[0, 0]), &q(&[1, 0])).unwrap());
        let repeated = vec![vec![1], vec![1], vec![0]];
        assert!(torus_decide(&repeated, &q(&[0, 0, 3]), &q(&[1, 2, 3])).unwrap());
        assert!(torus_decide(&repeated, &q(&[2, 4, 3]), &q(&[1, 2, 3])).unwrap());
        assert!(!torus_decide(&repeated, &q(&[2, 3, 3]), &q(&[1, 2, 3])).unwrap());
        assert!(!torus_decide(&repeated, &q(&[0, 0, 0]), &q(&[1, 2, 3])).unwrap());
    }

    #[test]
    fn weight_parsing() {
        assert_eq!(parse_weights("1;2").unwrap(), vec![vec![1], vec![2]]);
        assert_eq!(parse_weights("1,0; 0,1").unwrap(), vec![vec![1, 0], vec![0, 1]]);
        assert!(parse_weights("1;2,3").is_err());
        assert!(parse_weights("a").is_err());
    }

    fn brute_pointed(s: &BTreeSet<Weight>) -> bool {
        let nonzero: Vec<&Weight> = s.iter().filter(|w| w.iter().any(|&k| k != 0)).collect();
        (-12i64..=12).any(|u0| {
            (-12i64..=12).any(|u1| {
                nonzero.iter().all(|w| u0 * w[0] + u1 * w.get(1).copied().unwrap_or(0) > 0)
            })
        })
    }

    proptest! {
        #[test]
        fn improper_face(ws in prop::collection::btree_set(prop::collection::vec(-3i64..=3, 2), 0..5)) {
            prop_assert!(face_test(&ws, &ws).unwrap().is_some());
        }

        #[test]
        fn zero_cone_is_face_iff_pointed(ws in prop::collection::btree_set(prop::collection::vec(-3i64..=3, 2), 1..5)) {
            let is_face = face_test(&BTreeSet::new(), &ws).unwrap().is_some();
            prop_assert_eq!(is_face, brute_pointed(&ws));
        }

        #[test]
        fn translates_are_in_closure(
            weights in prop::collection::vec(prop::collection::vec(-3i64..=3, 2), 1..5),
            b in prop::collection::vec(-3i64..=3, 5),
            g in (1i64..=4, 1i64..=3, 1i64..=4, 1i64..=3),
        ) {
            let n = weights.len();
            let b = q(&b[..n]);
            let g = [ratio(g.0, g.1), ratio(-g.2, g.3)];
            let a: Vec<Rational> = weights
                .iter()
                .zip(&b)
                .map(|(w, x)| {
                    let t0 = pow_signed(&g[0], &BigInt::from(w[0])).unwrap();
                    let t1 = pow_signed(&g[1], &BigInt::from(w[1])).unwrap();
                    x * t0 * t1
                })
                .collect();
            prop_assert!(torus_decide(&weights, &a, &b).unwrap());
        }

        #[test]
        fn scaling_invariant_under_lattice_basis_change(
            ws in prop::collection::vec((-3i64..=3, -3i64..=3), 1..4),
            ratios in prop::collection::vec((1i64..=4, 1i64..=4), 4),
            t in -2i64..=2,
        ) {
            // new coordinates λ' = λ·[[1, t], [0, 1]]; same lattice, same relations
            let pairs: Vec<(Weight, Rational)> = ws
                .iter()
                .zip(&ratios)
                .map(|(&(a, b), &(p, d))| (vec![a, b], ratio(p, d)))
                .collect();
            let moved: Vec<(Weight, Rational)> = pairs
                .iter()
                .map(|(w, r)| (vec![w[0], t * w[0] + w[1]], r.clone()))
                .collect();
            prop_assert_eq!(scaling_exists(&pairs).unwrap(), scaling_exists(&moved).unwrap());
        }
    }
}
