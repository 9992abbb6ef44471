//! Parametrized representations: matrices of Laurent polynomials
//! `ι*(ρ_{p,q})` over `A^{r,s}`, their concrete generators, the reduction to
//! conic orbits, basis changes and orbit dimensions.

use std::ops::Deref;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{self, rat, Rational, SparseMatrix};
use crate::polyring::{Ambient, LaurentPoly};
use crate::degbound;

/// Coordinates of a vector of the module in the fixed basis `e1..en`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModuleVector(#[serde(with = "exactmath::rational_vec")] pub Vec<Rational>);

impl ModuleVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        Self(coords)
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        Self(coords.iter().map(|&c| rat(c)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Rational::zero(); n])
    }

    pub fn parse(s: &str) -> Result<Self> {
        exactmath::parse_rational_list(s).map(Self)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        Self(self.0.iter().map(|x| x * c).collect())
    }
}

impl Deref for ModuleVector {
    type Target = [Rational];
    fn deref(&self) -> &[Rational] {
        &self.0
    }
}

/// A linear action presented by the pulled-back matrix entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentationData {
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub rho: Vec<Vec<LaurentPoly>>,
    pub degree_bound: Option<u64>,
    pub label: String,
    /// Set when the group contains all nonzero scalars (output of
    /// [`make_conic`]), so every orbit is conic.
    pub scalar_extended: bool,
}

impl RepresentationData {
    pub fn new(
        r: usize,
        s: usize,
        rho: Vec<Vec<LaurentPoly>>,
        degree_bound: Option<u64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let n = rho.len();
        if n == 0 {
            return Err(Error::InvalidInput("representation of a zero module".into()));
        }
        let amb = Ambient::new(r, s);
        for row in &rho {
            if row.len() != n {
                return Err(Error::Dimension(format!("rho is not square ({n} rows)")));
            }
            if let Some(bad) = row.iter().find(|p| p.ambient() != amb) {
                return Err(Error::AmbientMismatch(format!(
                    "entry lives in A^{{{},{}}}, expected A^{{{r},{s}}}",
                    bad.ambient().r,
                    bad.ambient().s
                )));
            }
        }
        if degree_bound == Some(0) {
            return Err(Error::InvalidInput("degree bound must be at least 1".into()));
        }
        Ok(Self {
            n,
            r,
            s,
            rho,
            degree_bound,
            label: label.into(),
            scalar_extended: false,
        })
    }

    pub fn ambient(&self) -> Ambient {
        Ambient::new(self.r, self.s)
    }

    fn check_vector(&self, v: &ModuleVector, what: &str) -> Result<()> {
        if v.len() == self.n {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "{what} has {} coordinates, module has dimension {}",
                v.len(),
                self.n
            )))
        }
    }

    /// `ρ(ι(u))` as a numeric matrix.
    pub fn evaluate(&self, u: &[Rational]) -> Result<Vec<Vec<Rational>>> {
        self.rho
            .iter()
            .map(|row| row.iter().map(|p| p.evaluate(u)).collect())
            .collect()
    }

    /// The torus weights if `rho` is diagonal with monic monomial entries and
    /// no ordinary variables.
    pub fn torus_weights(&self) -> Option<Vec<Vec<i64>>> {
        if self.s != 0 || self.r == 0 {
            return None;
        }
        let mut weights = Vec::with_capacity(self.n);
        for (i, row) in self.rho.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if i != j && !p.is_zero() {
                    return None;
                }
            }
            let d = &row[i];
            if d.len() != 1 {
                return None;
            }
            let (e, c) = d.terms().iter().next()?;
            if !c.is_one() {
                return None;
            }
            weights.push(e.0.iter().map(|&k| i64::from(k)).collect());
        }
        Some(weights)
    }

    pub fn to_json(&self) -> RepJson {
        RepJson {
            n: self.n,
            r: self.r,
            s: self.s,
            rho: self
                .rho
                .iter()
                .map(|row| row.iter().map(ToString::to_string).collect())
                .collect(),
            degree_bound: self.degree_bound,
            label: self.label.clone(),
            scalar_extended: self.scalar_extended,
        }
    }

    pub fn from_json(j: &RepJson) -> Result<Self> {
        let amb = Ambient::new(j.r, j.s);
        let rho = j
            .rho
            .iter()
            .map(|row| row.iter().map(|s| LaurentPoly::parse(amb, s)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let mut rep = Self::new(j.r, j.s, rho, j.degree_bound, j.label.clone())?;
        if rep.n != j.n {
            return Err(Error::Dimension(format!(
                "declared n = {} but rho is {}x{}",
                j.n, rep.n, rep.n
            )));
        }
        rep.scalar_extended = j.scalar_extended;
        Ok(rep)
    }
}

/// On-disk form of [`RepresentationData`] (`rep.json`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepJson {
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub rho: Vec<Vec<String>>,
    pub degree_bound: Option<u64>,
    #[serde(default)]
    pub label: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub scalar_extended: bool,
}

/// Coefficients of `(a z1 + c z2)^{h-j} (b z1 + d z2)^j` in the basis
/// `z1^h, z1^{h-1} z2, ..., z2^h`, for every `j`: column `j` of the matrix of
/// `[[a, b], [c, d]]` acting on binary forms of degree `h`.
fn binary_form_matrix_with<T: Clone>(
    h: usize,
    [a, b, c, d]: [&T; 4],
    zero: &T,
    one: &T,
    add: impl Fn(&T, &T) -> T,
    mul: impl Fn(&T, &T) -> T,
) -> Vec<Vec<T>> {
    // product of binary forms given as coefficient lists in powers of z2
    let times = |f: &[T], g: &[T]| -> Vec<T> {
        let mut out = vec![zero.clone(); f.len() + g.len() - 1];
        for (i, x) in f.iter().enumerate() {
            for (k, y) in g.iter().enumerate() {
                out[i + k] = add(&out[i + k], &mul(x, y));
            }
        }
        out
    };
    let first = [a.clone(), c.clone()];
    let second = [b.clone(), d.clone()];
    let mut cols = Vec::with_capacity(h + 1);
    for j in 0..=h {
        let mut form = vec![one.clone()];
        for _ in 0..h - j {
            form = times(&form, &first);
        }
        for _ in 0..j {
            form = times(&form, &second);
        }
        cols.push(form);
    }
    (0..=h)
        .map(|i| (0..=h).map(|j| cols[j][i].clone()).collect())
        .collect()
}

/// Numeric matrix of `g = [[α, β], [γ, δ]]` on binary forms of degree `h`.
pub fn binary_form_matrix(h: usize, g: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    binary_form_matrix_with(
        h,
        [&g[0][0], &g[0][1], &g[1][0], &g[1][1]],
        &Rational::zero(),
        &Rational::one(),
        |x, y| x + y,
        |x, y| x * y,
    )
}

/// The parametrization `A^{1,2} → SL2`,
/// `(ε1, ε2, ε3) ↦ [[1, ε2], [0, 1]]·diag(ε1, 1/ε1)·[[1, 0], [ε3, 1]]`.
pub fn sl2_iota(u: &[Rational]) -> Result<Vec<Vec<Rational>>> {
    if u.len() != 3 {
        return Err(Error::Dimension("SL2 parameters are (e1, e2, e3)".into()));
    }
    if u[0].is_zero() {
        return Err(Error::NotInDomain(1));
    }
    let inv = u[0].recip();
    Ok(vec![
        vec![&u[0] + &inv * &u[1] * &u[2], &inv * &u[1]],
        vec![&inv * &u[2], inv],
    ])
}

/// `SL2` acting on binary forms of degree `h` by linear substitution,
/// pulled back along [`sl2_iota`].
pub fn sl2_binary_forms(h: usize) -> Result<RepresentationData> {
    if h < 1 {
        return Err(Error::InvalidInput("h must be ≥ 1".into()));
    }
    let amb = Ambient::new(1, 2);
    let p = |s: &str| LaurentPoly::parse(amb, s).expect("static polynomial");
    let (a, b, c, d) = (p("x1 + x1^-1*x2*x3"), p("x1^-1*x2"), p("x1^-1*x3"), p("x1^-1"));
    let rho = binary_form_matrix_with(
        h,
        [&a, &b, &c, &d],
        &LaurentPoly::zero(amb),
        &LaurentPoly::one(amb),
        |x, y| x + y,
        |x, y| x * y,
    );
    let bound = degbound::kazarnovskii_sl2(h as u64)?;
    RepresentationData::new(1, 2, rho, Some(bound), format!("SL2 on binary forms of degree {h}"))
}

/// Torus weights of the basis vectors `z1^{h-i} z2^i`, read off from the
/// action of the diagonal torus: setting `x2 = x3 = 0` in the
/// parametrization leaves `diag(x1, 1/x1)`, whose image is diagonal with
/// monomial entries `x1^{weight}`.
pub fn sl2_weights(h: usize) -> Result<Vec<i64>> {
    let rep = sl2_binary_forms(h)?;
    let torus_amb = Ambient::new(1, 0);
    (0..rep.n)
        .map(|i| {
            let restricted: Vec<(i32, Rational)> = rep.rho[i][i]
                .terms()
                .iter()
                .filter(|(e, _)| e.0[1] == 0 && e.0[2] == 0)
                .map(|(e, c)| (e.0[0], c.clone()))
                .collect();
            match restricted.as_slice() {
                [(k, c)] if c.is_one() => Ok(i64::from(*k)),
                _ => Err(Error::InvalidInput(format!(
                    "basis vector {} is not a weight vector in A^{{{},{}}}",
                    i + 1,
                    torus_amb.r,
                    torus_amb.s
                ))),
            }
        })
        .collect()
}

/// Diagonal torus action with the given characters.
pub fn torus_diagonal(weights: &[Vec<i64>]) -> Result<RepresentationData> {
    let r = weights.first().map_or(0, Vec::len);
    if weights.is_empty() || r == 0 {
        return Err(Error::InvalidInput("need at least one weight of rank ≥ 1".into()));
    }
    if weights.iter().any(|w| w.len() != r) {
        return Err(Error::InvalidInput("weights have inconsistent lengths".into()));
    }
    let amb = Ambient::new(r, 0);
    let m = weights.len();
    let mut rho = vec![vec![LaurentPoly::zero(amb); m]; m];
    for (i, w) in weights.iter().enumerate() {
        let exps = w
            .iter()
            .map(|&k| i32::try_from(k).map_err(|_| Error::InvalidInput("weight too large".into())))
            .collect::<Result<Vec<_>>>()?;
        rho[i][i] = LaurentPoly::monomial(amb, exps, Rational::one())?;
    }
    let label = format!(
        "torus with weights {}",
        weights
            .iter()
            .map(|w| w.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";")
    );
    RepresentationData::new(r, 0, rho, None, label)
}

/// Reduction to conic orbits: adjoins a fresh invertible scalar `x1`
/// (existing variables shift up by one) acting by `x1·blockdiag(1, ρ)`, and
/// maps `a ↦ (1, a)`, `b ↦ (1, b)`.
pub fn make_conic(
    rep: &RepresentationData,
    a: &ModuleVector,
    b: &ModuleVector,
) -> Result<(RepresentationData, ModuleVector, ModuleVector)> {
    rep.check_vector(a, "a")?;
    rep.check_vector(b, "b")?;
    let amb = Ambient::new(rep.r + 1, rep.s);
    let shift: Vec<usize> = (1..=rep.r + rep.s).collect();
    let scalar = LaurentPoly::var(amb, 0);
    let n = rep.n + 1;
    let mut rho = vec![vec![LaurentPoly::zero(amb); n]; n];
    rho[0][0] = scalar.clone();
    for (p, row) in rep.rho.iter().enumerate() {
        for (q, entry) in row.iter().enumerate() {
            rho[p + 1][q + 1] = &scalar * &entry.remap(amb, &shift)?;
        }
    }
    let mut out = RepresentationData::new(amb.r, amb.s, rho, None, format!("conic({})", rep.label))?;
    out.scalar_extended = true;
    let lift = |v: &ModuleVector| {
        let mut c = vec![Rational::one()];
        c.extend(v.iter().cloned());
        ModuleVector(c)
    };
    Ok((out, lift(a), lift(b)))
}

/// Conjugates the action by the basis change `v ↦ S·v`: `ρ' = S·ρ·S⁻¹`.
pub fn change_basis(rep: &RepresentationData, s: &[Vec<Rational>]) -> Result<RepresentationData> {
    if s.len() != rep.n || s.iter().any(|r| r.len() != rep.n) {
        return Err(Error::Dimension("basis change has the wrong size".into()));
    }
    let inv = exactmath::inverse(s)?;
    let amb = rep.ambient();
    let n = rep.n;
    let combine = |left: &dyn Fn(usize, usize) -> LaurentPoly| -> Vec<Vec<LaurentPoly>> {
        (0..n)
            .map(|i| (0..n).map(|j| left(i, j)).collect())
            .collect()
    };
    // rho · S^-1
    let right = combine(&|i, j| {
        (0..n).fold(LaurentPoly::zero(amb), |acc, k| &acc + &rep.rho[i][k].scale(&inv[k][j]))
    });
    let rho = combine(&|i, j| {
        (0..n).fold(LaurentPoly::zero(amb), |acc, k| &acc + &right[k][j].scale(&s[i][k]))
    });
    Ok(RepresentationData {
        rho,
        ..rep.clone()
    })
}

/// An integer basis change `S` making every coordinate of `S·b` nonzero.
///
/// Tries the identity, then the all-ones lower unitriangular matrix, then up
/// to 100 random products `U·L` of unitriangular matrices with off-diagonal
/// entries in `-2..=2` (so `det S = 1`).
pub fn find_scrambling<R: Rng + ?Sized>(b: &ModuleVector, rng: &mut R) -> Result<Vec<Vec<Rational>>> {
    if b.is_zero() {
        return Err(Error::Precondition("b = 0 has no basis with all coordinates nonzero".into()));
    }
    let n = b.len();
    let ok = |s: &[Vec<Rational>]| exactmath::mat_vec(s, b).iter().all(|x| !x.is_zero());
    let id = exactmath::identity(n);
    if ok(&id) {
        return Ok(id);
    }
    let ones: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| rat(i64::from(j <= i))).collect())
        .collect();
    if ok(&ones) {
        return Ok(ones);
    }
    for _ in 0..100 {
        let mut lower = exactmath::identity(n);
        let mut upper = exactmath::identity(n);
        for i in 0..n {
            for j in 0..i {
                lower[i][j] = rat(rng.gen_range(-2..=2));
                upper[j][i] = rat(rng.gen_range(-2..=2));
            }
        }
        let s = exactmath::mat_mul(&upper, &lower);
        if ok(&s) {
            return Ok(s);
        }
    }
    Err(Error::Precondition("no scrambling basis found in 100 attempts".into()))
}

/// `g·v` for `g = ι(u)`.
pub fn apply(rep: &RepresentationData, u: &[Rational], v: &ModuleVector) -> Result<ModuleVector> {
    rep.check_vector(v, "v")?;
    let g = rep.evaluate(u)?;
    Ok(ModuleVector(exactmath::mat_vec(&g, v)))
}

/// `ψ*(t_i) = Σ_j β_j ι*(ρ_{i,j})`: the orbit map `u ↦ ι(u)·b` in
/// coordinates.
pub fn orbit_pullbacks(rep: &RepresentationData, b: &ModuleVector) -> Result<Vec<LaurentPoly>> {
    rep.check_vector(b, "b")?;
    let amb = rep.ambient();
    Ok(rep
        .rho
        .iter()
        .map(|row| {
            row.iter()
                .zip(b.iter())
                .fold(LaurentPoly::zero(amb), |acc, (p, beta)| &acc + &p.scale(beta))
        })
        .collect())
}

fn jacobian(rep: &RepresentationData, b: &ModuleVector) -> Result<Vec<Vec<LaurentPoly>>> {
    let psi = orbit_pullbacks(rep, b)?;
    Ok(psi
        .iter()
        .map(|p| (0..rep.r + rep.s).map(|k| p.derivative(k)).collect())
        .collect())
}

/// Number of random parameter points used by [`orbit_dimension`].
pub const ORBIT_DIMENSION_SAMPLES: usize = 10;

/// Dimension of `G·b` as the generic rank of the Jacobian of the orbit map,
/// maximized over random rational sample points.
pub fn orbit_dimension<R: Rng + ?Sized>(
    rep: &RepresentationData,
    b: &ModuleVector,
    rng: &mut R,
) -> Result<usize> {
    if b.is_zero() {
        rep.check_vector(b, "b")?;
        return Ok(0);
    }
    let jac = jacobian(rep, b)?;
    let vars = rep.r + rep.s;
    let mut best = 0;
    for _ in 0..ORBIT_DIMENSION_SAMPLES {
        let u: Vec<Rational> = (0..vars)
            .map(|_| loop {
                let v: i64 = rng.gen_range(-997..=997);
                if v != 0 {
                    break rat(v);
                }
            })
            .collect();
        let numeric = jac
            .iter()
            .map(|row| row.iter().map(|p| p.evaluate(&u)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        best = best.max(exactmath::rank(&SparseMatrix::from_dense(&numeric)));
        if best == vars.min(rep.n) {
            break;
        }
    }
    Ok(best)
}

/// Exact orbit dimension: rank of the symbolic Jacobian over the Laurent
/// ring, by division-free elimination (the ring is a domain, so
/// cross-multiplication preserves rank).
pub fn orbit_dimension_exact(rep: &RepresentationData, b: &ModuleVector) -> Result<usize> {
    let mut m = jacobian(rep, b)?;
    let cols = rep.r + rep.s;
    let mut k = 0;
    for col in 0..cols {
        if k == m.len() {
            break;
        }
        let pivot = (k..m.len())
            .filter(|&i| !m[i][col].is_zero())
            .min_by_key(|&i| (m[i][col].len(), i));
        let Some(p) = pivot else { continue };
        m.swap(k, p);
        let (head, tail) = m.split_at_mut(k + 1);
        let prow = &head[k];
        for row in tail.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for j in col..cols {
                row[j] = &(&prow[col] * &row[j]) - &(&f * &prow[j]);
            }
        }
        k += 1;
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lp(amb: Ambient, s: &str) -> LaurentPoly {
        LaurentPoly::parse(amb, s).unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    fn random_point(rng: &mut ChaCha8Rng, r: usize, s: usize) -> Vec<Rational> {
        (0..r + s)
            .map(|i| loop {
                let v = exactmath::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4));
                if i >= r || !v.is_zero() {
                    break v;
                }
            })
            .collect()
    }

    #[test]
    fn sl2_quadratic_entries() {
        let rep = sl2_binary_forms(2).unwrap();
        let amb = rep.ambient();
        assert_eq!(rep.rho[1][1], lp(amb, "1 + 2*x1^-2*x2*x3"));
        assert_eq!(rep.rho[1][1].to_string(), "1 + 2*x1^-2*x2*x3");
        assert_eq!(rep.rho[2][2], lp(amb, "x1^-2"));
        assert_eq!(rep.degree_bound, Some(8));
    }

    #[test]
    fn sl2_linear_is_iota() {
        let rep = sl2_binary_forms(1).unwrap();
        let amb = rep.ambient();
        let expect = [
            ["x1 + x1^-1*x2*x3", "x1^-1*x2"],
            ["x1^-1*x3", "x1^-1"],
        ];
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(rep.rho[i][j], lp(amb, expect[i][j]));
            }
        }
        assert!(sl2_binary_forms(0).is_err());
    }

    #[test]
    fn sl2_weights_are_arithmetic_progression() {
        assert_eq!(sl2_weights(3).unwrap(), vec![3, 1, -1, -3]);
        assert_eq!(sl2_weights(2).unwrap(), vec![2, 0, -2]);
    }

    #[test]
    fn representation_law_and_determinant() {
        let mut rng = rng();
        for h in 1..=3 {
            let rep = sl2_binary_forms(h).unwrap();
            for _ in 0..20 {
                let u = random_point(&mut rng, 1, 2);
                let v = random_point(&mut rng, 1, 2);
                let (g, gp) = (sl2_iota(&u).unwrap(), sl2_iota(&v).unwrap());
                let det = &g[0][0] * &g[1][1] - &g[0][1] * &g[1][0];
                assert!(det.is_one());
                let lhs = exactmath::mat_mul(&rep.evaluate(&u).unwrap(), &rep.evaluate(&v).unwrap());
                let rhs = binary_form_matrix(h, &exactmath::mat_mul(&g, &gp));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn torus_constructions() {
        let rep = torus_diagonal(&[vec![1], vec![-1]]).unwrap();
        let a = rep.ambient();
        assert_eq!(rep.rho[0][0], lp(a, "x1"));
        assert_eq!(rep.rho[1][1], lp(a, "x1^-1"));
        assert!(rep.rho[0][1].is_zero());
        let rep = torus_diagonal(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!((rep.r, rep.s), (2, 0));
        assert_eq!(rep.rho[1][1], lp(rep.ambient(), "x2"));
        assert_eq!(rep.torus_weights(), Some(vec![vec![1, 0], vec![0, 1]]));
        assert!(torus_diagonal(&[vec![1], vec![1, 2]]).is_err());
        assert!(torus_diagonal(&[]).is_err());
    }

    #[test]
    fn conic_torus() {
        let rep = torus_diagonal(&[vec![1], vec![2]]).unwrap();
        let (c, a, b) = make_conic(&rep, &ModuleVector::from_i64(&[5, 6]), &ModuleVector::zeros(2)).unwrap();
        let amb = c.ambient();
        assert_eq!((c.n, c.r, c.s), (3, 2, 0));
        assert_eq!(c.rho[0][0], lp(amb, "x1"));
        assert_eq!(c.rho[1][1], lp(amb, "x1*x2"));
        assert_eq!(c.rho[2][2], lp(amb, "x1*x2^2"));
        assert_eq!(a, ModuleVector::from_i64(&[1, 5, 6]));
        assert_eq!(b, ModuleVector::from_i64(&[1, 0, 0]));
        assert!(!b.is_zero());
        assert!(c.scalar_extended && c.degree_bound.is_none());
        assert_eq!(c.torus_weights(), Some(vec![vec![1, 0], vec![1, 1], vec![1, 2]]));
    }

    #[test]
    fn conic_sl2_renumbers_variables() {
        let rep = sl2_binary_forms(2).unwrap();
        let z = ModuleVector::zeros(3);
        let (c, _, _) = make_conic(&rep, &z, &z).unwrap();
        let amb = c.ambient();
        assert_eq!(c.n, 4);
        assert_eq!(c.rho[0][0], lp(amb, "x1"));
        assert_eq!(c.rho[2][2], lp(amb, "x1 + 2*x1*x2^-2*x3*x4"));
        assert!(c.rho[0][2].is_zero() && c.rho[2][0].is_zero());
    }

    #[test]
    fn conic_apply_restricts_to_original() {
        let mut rng = rng();
        let rep = sl2_binary_forms(2).unwrap();
        let v = ModuleVector::from_i64(&[1, -2, 3]);
        let (c, _, vc) = make_conic(&rep, &v, &v).unwrap();
        for _ in 0..10 {
            let u = random_point(&mut rng, 1, 2);
            let mut uc = vec![rat(1)];
            uc.extend(u.iter().cloned());
            let full = apply(&c, &uc, &vc).unwrap();
            assert_eq!(full[0], rat(1));
            assert_eq!(&full[1..], &apply(&rep, &u, &v).unwrap()[..]);
        }
    }

    #[test]
    fn scrambling() {
        let mut rng = rng();
        let b = ModuleVector::from_i64(&[1, 0, 0]);
        let s = find_scrambling(&b, &mut rng).unwrap();
        assert_eq!(exactmath::mat_vec(&s, &b), vec![rat(1), rat(1), rat(1)]);
        let b = ModuleVector::from_i64(&[0, 0, 1]);
        let s = find_scrambling(&b, &mut rng).unwrap();
        assert!(exactmath::mat_vec(&s, &b).iter().all(|x| !x.is_zero()));
        assert!(find_scrambling(&ModuleVector::zeros(3), &mut rng).is_err());
    }

    #[test]
    fn change_basis_identity_and_conjugation() {
        let mut rng = rng();
        let rep = sl2_binary_forms(2).unwrap();
        assert_eq!(change_basis(&rep, &exactmath::identity(3)).unwrap(), rep);
        let s: Vec<Vec<Rational>> = [[1, 0, 0], [1, 1, 0], [1, 1, 1]]
            .iter()
            .map(|r| r.iter().map(|&v| rat(v)).collect())
            .collect();
        let conj = change_basis(&rep, &s).unwrap();
        let inv = exactmath::inverse(&s).unwrap();
        for _ in 0..20 {
            let u = random_point(&mut rng, 1, 2);
            let expect = exactmath::mat_mul(&exactmath::mat_mul(&s, &rep.evaluate(&u).unwrap()), &inv);
            assert_eq!(conj.evaluate(&u).unwrap(), expect);
        }
        let singular = vec![vec![rat(1); 3]; 3];
        assert_eq!(change_basis(&rep, &singular), Err(Error::Singular));
    }

    #[test]
    fn apply_examples() {
        let rep = torus_diagonal(&[vec![1], vec![2]]).unwrap();
        let out = apply(&rep, &[rat(3)], &ModuleVector::from_i64(&[1, 1])).unwrap();
        assert_eq!(out, ModuleVector::from_i64(&[3, 9]));

        let sl2 = sl2_binary_forms(2).unwrap();
        let v = ModuleVector::from_i64(&[1, -4, 7]);
        assert_eq!(apply(&sl2, &[rat(1), rat(0), rat(0)], &v).unwrap(), v);
        // u = (1, 0, 1) is [[1, 0], [1, 1]]: z1 -> z1 + z2
        let out = apply(&sl2, &[rat(1), rat(0), rat(1)], &ModuleVector::from_i64(&[1, 0, 0])).unwrap();
        assert_eq!(out, ModuleVector::from_i64(&[1, 2, 1]));
        assert!(matches!(
            apply(&sl2, &[rat(0), rat(0), rat(1)], &v),
            Err(Error::NotInDomain(1))
        ));
    }

    #[test]
    fn orbit_dimension_examples() {
        let mut rng = rng();
        let sl2 = sl2_binary_forms(2).unwrap();
        assert_eq!(orbit_dimension(&sl2, &ModuleVector::zeros(3), &mut rng).unwrap(), 0);
        let b = ModuleVector::from_i64(&[0, 1, 0]);
        assert_eq!(orbit_dimension(&sl2, &b, &mut rng).unwrap(), 2);
        assert_eq!(orbit_dimension_exact(&sl2, &b).unwrap(), 2);

        let t = torus_diagonal(&[vec![1], vec![2]]).unwrap();
        let z = ModuleVector::zeros(2);
        let (c, _, b) = make_conic(&t, &z, &ModuleVector::from_i64(&[1, 1])).unwrap();
        assert_eq!(orbit_dimension(&c, &b, &mut rng).unwrap(), 2);
        assert_eq!(orbit_dimension_exact(&c, &b).unwrap(), 2);
    }

    #[test]
    fn orbit_dimension_basis_invariant_and_bounded() {
        let mut rng = rng();
        let sl2 = sl2_binary_forms(3).unwrap();
        let s: Vec<Vec<Rational>> = (0..4)
            .map(|i| (0..4).map(|j| rat(i64::from(j <= i) * (1 + (i + j) as i64 % 2))).collect())
            .collect();
        let conj = change_basis(&sl2, &s).unwrap();
        for b in [[1, 0, 0, 0], [0, 1, 0, 0], [1, 0, 0, 1], [1, 2, 3, 4]] {
            let b = ModuleVector::from_i64(&b);
            let sb = ModuleVector(exactmath::mat_vec(&s, &b));
            let d = orbit_dimension(&sl2, &b, &mut rng).unwrap();
            assert_eq!(d, orbit_dimension(&conj, &sb, &mut rng).unwrap());
            assert_eq!(d, orbit_dimension_exact(&sl2, &b).unwrap());
            assert!(d <= 3);
        }
    }

    #[test]
    fn json_roundtrip() {
        let rep = sl2_binary_forms(2).unwrap();
        let text = serde_json::to_string(&rep.to_json()).unwrap();
        let back: RepJson = serde_json::from_str(&text).unwrap();
        assert_eq!(RepresentationData::from_json(&back).unwrap(), rep);
        assert!(!text.contains("scalar_extended"));
    }
}
