//! Degree inputs for the decision procedure: Kazarnovskii's formula by exact
//! integration over a triangulated weight polytope, the `SL2` closed form,
//! orbit degrees of binary forms and a coarse parametric bound.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{self, rat, Rational};
use crate::polyring::{Ambient, LaurentPoly};
use crate::repmodel::RepresentationData;

/// A simplex in `Q^r`, given by its `r + 1` vertices.
pub type Simplex = Vec<Vec<Rational>>;

/// Structure constants of a connected reductive group and a representation
/// with finite kernel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductiveData {
    pub dim_g: u64,
    pub weyl_order: u64,
    pub exponents: Vec<u64>,
    pub kernel_order: u64,
    /// Coroots of the positive roots as linear forms on `R^r`.
    pub coroots: Vec<Vec<Rational>>,
    /// Triangulation of the weight polytope.
    pub polytope: Vec<Simplex>,
}

impl ReductiveData {
    /// Rank of the ambient space `R^r` of the polytope.
    pub fn rank(&self) -> usize {
        self.polytope
            .first()
            .and_then(|s| s.first())
            .map_or(0, Vec::len)
    }

    fn validate(&self) -> Result<()> {
        if self.kernel_order == 0 || self.weyl_order == 0 || self.dim_g == 0 {
            return Err(Error::InvalidInput(
                "dim G, |W| and |ker| must be positive".into(),
            ));
        }
        if self.polytope.is_empty() {
            return Err(Error::InvalidInput("empty polytope triangulation".into()));
        }
        let r = self.rank();
        if r == 0 {
            return Err(Error::InvalidInput("polytope of rank 0".into()));
        }
        for s in &self.polytope {
            if s.len() != r + 1 || s.iter().any(|v| v.len() != r) {
                return Err(Error::Dimension(format!(
                    "simplices in R^{r} need {} vertices of length {r}",
                    r + 1
                )));
            }
        }
        if self.coroots.iter().any(|c| c.len() != r) {
            return Err(Error::Dimension(format!("coroots must be forms on R^{r}")));
        }
        Ok(())
    }

    /// The product of the squared coroots as a polynomial on `R^r`.
    pub fn integrand(&self) -> LaurentPoly {
        let amb = Ambient::new(0, self.rank());
        self.coroots.iter().fold(LaurentPoly::one(amb), |acc, c| {
            let form = linear_form(amb, c, &Rational::zero());
            &acc * &form.pow(2)
        })
    }
}

/// Triangulation of `conv({0} ∪ weights)` in rank 1, split at `0` so the
/// integrand stays polynomial on each piece.
pub fn rank_one_polytope(weights: &[Rational]) -> Vec<Simplex> {
    let zero = Rational::zero();
    let lo = weights.iter().fold(zero.clone(), |m, w| m.min(w.clone()));
    let hi = weights.iter().fold(zero.clone(), |m, w| m.max(w.clone()));
    [(lo, zero.clone()), (zero, hi)]
        .into_iter()
        .filter(|(a, b)| a != b)
        .map(|(a, b)| vec![vec![a], vec![b]])
        .collect()
}

/// On-disk form of [`ReductiveData`]. Rank-one data may give `weights`
/// instead of an explicit triangulation.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ReductiveJson {
    pub dim_g: u64,
    pub weyl_order: u64,
    #[serde(default)]
    pub exponents: Vec<u64>,
    pub kernel_order: u64,
    #[serde(default)]
    pub coroots: Vec<Vec<String>>,
    #[serde(default)]
    pub polytope: Vec<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
}

impl ReductiveJson {
    pub fn into_data(self) -> Result<ReductiveData> {
        let list = |v: &[String]| v.iter().map(|s| exactmath::parse_rational(s)).collect::<Result<Vec<_>>>();
        let coroots = self.coroots.iter().map(|c| list(c)).collect::<Result<Vec<_>>>()?;
        let mut polytope = self
            .polytope
            .iter()
            .map(|s| s.iter().map(|v| list(v)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if let Some(w) = &self.weights {
            if !polytope.is_empty() {
                return Err(Error::InvalidInput("give either weights or polytope, not both".into()));
            }
            polytope = rank_one_polytope(&list(w)?);
        }
        Ok(ReductiveData {
            dim_g: self.dim_g,
            weyl_order: self.weyl_order,
            exponents: self.exponents,
            kernel_order: self.kernel_order,
            coroots,
            polytope,
        })
    }

    pub fn from_data(d: &ReductiveData) -> Self {
        let list = |v: &[Rational]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
        Self {
            dim_g: d.dim_g,
            weyl_order: d.weyl_order,
            exponents: d.exponents.clone(),
            kernel_order: d.kernel_order,
            coroots: d.coroots.iter().map(|c| list(c)).collect(),
            polytope: d
                .polytope
                .iter()
                .map(|s| s.iter().map(|v| list(v)).collect())
                .collect(),
            weights: None,
        }
    }
}

/// `c0 + Σ coeffs[k]·x_k` in the given ambient.
fn linear_form(amb: Ambient, coeffs: &[Rational], c0: &Rational) -> LaurentPoly {
    coeffs
        .iter()
        .enumerate()
        .fold(LaurentPoly::constant(amb, c0.clone()), |acc, (k, c)| {
            &acc + &LaurentPoly::var(amb, k).scale(c)
        })
}

fn factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !m[i][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det *= &m[col][col];
        for i in col + 1..n {
            let f = &m[i][col] / &m[col][col];
            for j in col..n {
                let t = &f * &m[col][j];
                m[i][j] -= t;
            }
        }
    }
    det
}

/// Exact integral of a polynomial on `R^r` over a simplex, with respect to
/// Lebesgue measure.
///
/// Rewrites the polynomial in barycentric coordinates `λ0..λr` and uses
/// `∫ ∏ λi^ai = |det| · ∏ ai! / (r + Σ ai)!`.
pub fn simplex_integral(poly: &LaurentPoly, simplex: &[Vec<Rational>]) -> Result<Rational> {
    let amb = poly.ambient();
    let r = amb.nvars();
    if amb.r != 0 {
        return Err(Error::InvalidInput("integrand must be an ordinary polynomial".into()));
    }
    if simplex.len() != r + 1 || simplex.iter().any(|v| v.len() != r) {
        return Err(Error::Dimension(format!(
            "a simplex in R^{r} has {} vertices",
            r + 1
        )));
    }
    let edges: Vec<Vec<Rational>> = simplex[1..]
        .iter()
        .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| a - b).collect())
        .collect();
    let det = determinant(edges);
    if det.is_zero() {
        return Err(Error::InvalidInput("degenerate simplex".into()));
    }
    // x_k = Σ_i λ_i v_i[k]
    let bary = Ambient::new(0, r + 1);
    let coords: Vec<LaurentPoly> = (0..r)
        .map(|k| {
            let coeffs: Vec<Rational> = simplex.iter().map(|v| v[k].clone()).collect();
            linear_form(bary, &coeffs, &Rational::zero())
        })
        .collect();
    let mut pulled = LaurentPoly::zero(bary);
    for (e, c) in poly.terms() {
        let term = e
            .0
            .iter()
            .zip(&coords)
            .fold(LaurentPoly::constant(bary, c.clone()), |acc, (&k, x)| {
                &acc * &x.pow(u32::try_from(k).expect("polynomial exponent"))
            });
        pulled = &pulled + &term;
    }
    let mut total = Rational::zero();
    for (e, c) in pulled.terms() {
        let exps: Vec<u64> = e.0.iter().map(|&k| k as u64).collect();
        let num = exps.iter().fold(BigInt::one(), |acc, &a| acc * factorial(a));
        let den = factorial(r as u64 + exps.iter().sum::<u64>());
        total += c * Rational::new(num, den);
    }
    Ok(total * det.abs())
}

/// Exact value of Kazarnovskii's degree formula
/// `dim G! / (|W| (∏ mi!)² |ker|) · ∫_P ∏ (α∨)² dν`.
pub fn kazarnovskii_value(data: &ReductiveData) -> Result<Rational> {
    data.validate()?;
    let integrand = data.integrand();
    let integral = data
        .polytope
        .iter()
        .map(|s| simplex_integral(&integrand, s))
        .sum::<Result<Rational>>()?;
    let m = data
        .exponents
        .iter()
        .fold(BigInt::one(), |acc, &k| acc * factorial(k));
    let den = BigInt::from(data.weyl_order) * &m * &m * BigInt::from(data.kernel_order);
    Ok(Rational::new(factorial(data.dim_g), den) * integral)
}

/// Kazarnovskii's formula, rejecting data whose value is not a positive
/// integer.
pub fn kazarnovskii(data: &ReductiveData) -> Result<BigInt> {
    let v = kazarnovskii_value(data)?;
    if !v.is_integer() || !v.is_positive() {
        return Err(Error::InconsistentData(format!(
            "degree formula evaluates to {v}, not a positive integer"
        )));
    }
    Ok(v.to_integer())
}

/// `deg ρ(SL2)` on binary forms of degree `h`: `2h³` for odd `h`, `h³` for
/// even `h`.
pub fn kazarnovskii_sl2(h: u64) -> Result<u64> {
    if h < 1 {
        return Err(Error::InvalidInput("h must be ≥ 1".into()));
    }
    let cube = h
        .checked_pow(3)
        .ok_or_else(|| Error::InvalidInput("h too large".into()))?;
    Ok(if h.is_odd() { 2 * cube } else { cube })
}

/// Reductive data for `SL2` on binary forms of degree `h`.
pub fn sl2_reductive_data(h: u64) -> ReductiveData {
    let hr = rat(h as i64);
    ReductiveData {
        dim_g: 3,
        weyl_order: 2,
        exponents: vec![1],
        kernel_order: if h.is_odd() { 1 } else { 2 },
        coroots: vec![vec![rat(1)]],
        polytope: rank_one_polytope(&[-hr.clone(), hr]),
    }
}

/// `deg` of the orbit of a binary form of degree `h` whose distinct linear
/// factors have multiplicities `mults`, given the stabilizer order:
/// `(-2(p-1)h³ - 4Σ(h-ni)³ + 3h²Σ(h-ni) + 3hΣ(h-ni)(h-2ni)) / |Gv|`.
pub fn binary_form_orbit_degree(h: u64, mults: &[u64], stab_order: u64) -> Result<Rational> {
    let p = mults.len();
    if p < 3 {
        return Err(Error::InvalidInput("need at least 3 distinct roots".into()));
    }
    if mults.iter().any(|&n| n == 0 || h < 2 * n) {
        return Err(Error::InvalidInput("each multiplicity must satisfy h/ni ≥ 2".into()));
    }
    if mults.iter().sum::<u64>() != h {
        return Err(Error::InvalidInput("multiplicities must sum to h".into()));
    }
    if stab_order == 0 {
        return Err(Error::InvalidInput("stabilizer order must be ≥ 1".into()));
    }
    let h = BigInt::from(h);
    let h2 = &h * &h;
    let h3 = &h2 * &h;
    let mut value = BigInt::from(-2) * BigInt::from(p - 1) * &h3;
    for &n in mults {
        let n = BigInt::from(n);
        let rest = &h - &n;
        value -= BigInt::from(4) * &rest * &rest * &rest;
        value += BigInt::from(3) * &h2 * &rest;
        value += BigInt::from(3) * &h * &rest * (&h - BigInt::from(2) * &n);
    }
    if !value.is_positive() {
        return Err(Error::InconsistentData(format!(
            "orbit degree formula gives {value}, which is not positive"
        )));
    }
    Ok(Rational::new(value, BigInt::from(stab_order)))
}

/// Simple-roots case: `|Gv| · deg = 2h(h-1)(h-2)`.
pub fn binary_form_orbit_degree_simple(h: u64) -> u64 {
    2 * h * h.saturating_sub(1) * h.saturating_sub(2)
}

/// Degrees of numerator and monomial denominator once the negative powers of
/// the invertible variables in `p` are cleared.
fn cleared_degrees(p: &LaurentPoly) -> (i64, i64) {
    let amb = p.ambient();
    let den: Vec<i64> = p
        .min_exponents()
        .iter()
        .take(amb.r)
        .map(|&k| i64::from((-k).max(0)))
        .collect();
    let den_deg: i64 = den.iter().sum();
    let num_deg = p
        .terms()
        .keys()
        .map(|e| e.degree() + den_deg)
        .max()
        .unwrap_or(0);
    (num_deg, den_deg)
}

/// A universal but coarse upper bound `D^m` for the degree of any orbit
/// closure: `D` is the largest numerator degree plus the largest denominator
/// degree over the entries of `rho`, and `m = min(r + s, n)`.
pub fn parametric_degree_bound(rep: &RepresentationData) -> Result<BigInt> {
    let (num, den) = rep
        .rho
        .iter()
        .flatten()
        .filter(|p| !p.is_zero())
        .map(cleared_degrees)
        .fold((0, 0), |(a, b), (c, d)| (a.max(c), b.max(d)));
    let d = (num + den).max(1);
    let m = (rep.r + rep.s).min(rep.n);
    let m = u32::try_from(m).map_err(|_| Error::InvalidInput("dimension too large".into()))?;
    Ok(BigInt::from(d).pow(m))
}

/// The parametric bound as a machine integer, if it fits.
pub fn parametric_degree_bound_u64(rep: &RepresentationData) -> Result<u64> {
    parametric_degree_bound(rep)?
        .to_u64()
        .ok_or_else(|| Error::Oversized("parametric degree bound does not fit in 64 bits".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::ratio;
    use crate::repmodel::{sl2_binary_forms, torus_diagonal};
    use proptest::prelude::*;

    fn pt(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    fn triangle() -> Simplex {
        vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])]
    }

    fn poly2(s: &str) -> LaurentPoly {
        LaurentPoly::parse(Ambient::new(0, 2), s).unwrap()
    }

    #[test]
    fn integrals_over_unit_triangle() {
        assert_eq!(simplex_integral(&poly2("1"), &triangle()).unwrap(), ratio(1, 2));
        assert_eq!(simplex_integral(&poly2("x1"), &triangle()).unwrap(), ratio(1, 6));
        assert_eq!(simplex_integral(&poly2("x1^2*x2"), &triangle()).unwrap(), ratio(1, 60));
        let flat = vec![pt(&[0, 0]), pt(&[1, 1]), pt(&[2, 2])];
        assert!(simplex_integral(&poly2("1"), &flat).is_err());
    }

    #[test]
    fn kazarnovskii_examples() {
        let sl2 = sl2_reductive_data(2);
        assert_eq!(kazarnovskii(&sl2).unwrap(), BigInt::from(8));
        let torus = ReductiveData {
            dim_g: 1,
            weyl_order: 1,
            exponents: vec![],
            kernel_order: 1,
            coroots: vec![],
            polytope: rank_one_polytope(&[rat(2)]),
        };
        assert_eq!(kazarnovskii(&torus).unwrap(), BigInt::from(2));
        let mut odd = sl2_reductive_data(3);
        odd.kernel_order = 1;
        assert_eq!(kazarnovskii(&odd).unwrap(), BigInt::from(54));
        let mut bad = sl2_reductive_data(3);
        bad.kernel_order = 4;
        assert!(matches!(kazarnovskii(&bad), Err(Error::InconsistentData(_))));
    }

    #[test]
    fn sl2_closed_form() {
        let expect = [2, 8, 54, 64, 250, 216];
        for (h, e) in (1..=6).zip(expect) {
            assert_eq!(kazarnovskii_sl2(h).unwrap(), e);
        }
        assert!(kazarnovskii_sl2(0).is_err());
    }

    #[test]
    fn kazarnovskii_matches_closed_form() {
        for h in 1..=8 {
            assert_eq!(
                kazarnovskii(&sl2_reductive_data(h)).unwrap(),
                BigInt::from(kazarnovskii_sl2(h).unwrap())
            );
        }
    }

    #[test]
    fn orbit_degree_examples() {
        assert_eq!(binary_form_orbit_degree(3, &[1, 1, 1], 1).unwrap(), rat(12));
        assert_eq!(binary_form_orbit_degree(4, &[1, 1, 1, 1], 1).unwrap(), rat(48));
        // -256 - 248 + 384 + 144
        assert_eq!(binary_form_orbit_degree(4, &[2, 1, 1], 1).unwrap(), rat(24));
        assert_eq!(binary_form_orbit_degree(4, &[1, 1, 1, 1], 4).unwrap(), rat(12));
        assert!(binary_form_orbit_degree(4, &[2, 2], 1).is_err());
        assert!(binary_form_orbit_degree(5, &[3, 1, 1], 1).is_err());
        assert!(binary_form_orbit_degree(4, &[1, 1, 1], 1).is_err());
    }

    #[test]
    fn orbit_degree_simple_roots() {
        for h in 3..=8u64 {
            let v = binary_form_orbit_degree(h, &vec![1; h as usize], 1).unwrap();
            assert_eq!(v, rat((2 * h * (h - 1) * (h - 2)) as i64));
            assert_eq!(binary_form_orbit_degree_simple(h), 2 * h * (h - 1) * (h - 2));
        }
    }

    #[test]
    fn parametric_examples() {
        let t = torus_diagonal(&[vec![1], vec![2]]).unwrap();
        assert_eq!(parametric_degree_bound(&t).unwrap(), BigInt::from(2));
        let t = torus_diagonal(&[vec![1], vec![-1]]).unwrap();
        assert_eq!(parametric_degree_bound(&t).unwrap(), BigInt::from(2));
        let sl2 = sl2_binary_forms(2).unwrap();
        assert_eq!(parametric_degree_bound(&sl2).unwrap(), BigInt::from(216));
    }

    #[test]
    fn parametric_dominates_exact() {
        for h in 1..=4u64 {
            let rep = sl2_binary_forms(h as usize).unwrap();
            let bound = parametric_degree_bound(&rep).unwrap();
            assert!(bound >= kazarnovskii(&sl2_reductive_data(h)).unwrap());
        }
    }

    #[test]
    fn json_with_weights() {
        let text = r#"{"dim_g":3,"weyl_order":2,"exponents":[1],"kernel_order":2,
            "coroots":[["1"]],"weights":["2","0","-2"]}"#;
        let data: ReductiveJson = serde_json::from_str(text).unwrap();
        let data = data.into_data().unwrap();
        assert_eq!(data, sl2_reductive_data(2));
        let back = ReductiveJson::from_data(&data).into_data().unwrap();
        assert_eq!(back, data);
    }

    proptest! {
        #[test]
        fn integral_additive_under_subdivision(
            verts in prop::collection::vec((-6i64..=6, -6i64..=6), 3),
            split in 1i64..=7,
            coeffs in prop::collection::vec(-3i64..=3, 6),
        ) {
            let v: Vec<Vec<Rational>> = verts.iter().map(|&(a, b)| pt(&[a, b])).collect();
            prop_assume!(!determinant(vec![
                vec![&v[1][0] - &v[0][0], &v[1][1] - &v[0][1]],
                vec![&v[2][0] - &v[0][0], &v[2][1] - &v[0][1]],
            ]).is_zero());
            let amb = Ambient::new(0, 2);
            let monos = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]];
            let mut p = LaurentPoly::zero(amb);
            for (m, &c) in monos.iter().zip(&coeffs) {
                p = &p + &LaurentPoly::monomial(amb, m.to_vec(), rat(c)).unwrap();
            }
            // split the edge v1 v2 at t = split / 8
            let t = ratio(split, 8);
            let mid: Vec<Rational> = (0..2)
                .map(|k| &v[1][k] + &t * (&v[2][k] - &v[1][k]))
                .collect();
            let whole = simplex_integral(&p, &v).unwrap();
            let left = simplex_integral(&p, &[v[0].clone(), v[1].clone(), mid.clone()]).unwrap();
            let right = simplex_integral(&p, &[v[0].clone(), mid, v[2].clone()]).unwrap();
            prop_assert_eq!(whole, left + right);
        }
    }
}
