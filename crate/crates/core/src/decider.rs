//! Closure membership by linear algebra: `G·a` lies in the closure of the
//! conic orbit `G·b` iff the linear system obtained by substituting the orbit
//! parametrization into `H = Σ (yi - αi) Fi - 1` is inconsistent, where the
//! `Fi` are generic polynomials of degree `2d - 2`.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::degbound;
use crate::error::{Error, Result};
use crate::exactmath::{self, ConsistencyWitness, Rational, SparseMatrix};
use crate::polyring::{self, CVar, Exponent, GenericPoly, LaurentPoly, LinForm};
use crate::repmodel::{self, ModuleVector, RepresentationData};

pub use crate::repmodel::orbit_pullbacks;

/// Default abort threshold on the size of the linear system.
pub const DEFAULT_MAX_NNZ: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionProblem {
    pub rep: RepresentationData,
    pub a: ModuleVector,
    pub b: ModuleVector,
    pub degree_bound_override: Option<u64>,
    /// The caller vouches that `G·b` is stable under nonzero scalars.
    pub conic_asserted: bool,
}

impl DecisionProblem {
    pub fn new(rep: RepresentationData, a: ModuleVector, b: ModuleVector) -> Self {
        Self {
            rep,
            a,
            b,
            degree_bound_override: None,
            conic_asserted: false,
        }
    }

    /// Applies [`repmodel::make_conic`] to the representation and both
    /// vectors.
    pub fn conified(rep: &RepresentationData, a: &ModuleVector, b: &ModuleVector) -> Result<Self> {
        let (rep, a, b) = repmodel::make_conic(rep, a, b)?;
        Ok(Self::new(rep, a, b))
    }

    pub fn with_degree_bound(mut self, d: u64) -> Self {
        self.degree_bound_override = Some(d);
        self
    }

    pub fn assume_conic(mut self) -> Self {
        self.conic_asserted = true;
        self
    }
}

#[derive(Clone, Debug)]
pub struct DecideOptions {
    pub seed: u64,
    pub max_nnz: usize,
    /// Use the symbolic Jacobian rank instead of random sampling.
    pub exact_orbit_dimension: bool,
}

impl Default for DecideOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            max_nnz: DEFAULT_MAX_NNZ,
            exact_orbit_dimension: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    InClosure,
    NotInClosure,
    /// `dim G·b = n`: the closure is the whole module.
    TriviallyDense,
}

impl Verdict {
    pub fn in_closure(self) -> bool {
        !matches!(self, Verdict::NotInClosure)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Certificate {
    Witness {
        witness: ConsistencyWitness,
    },
    Density {
        orbit_dimension: usize,
        module_dimension: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeSource {
    Override,
    Representation,
    Parametric,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub module_dimension: usize,
    pub orbit_dimension: usize,
    pub degree_bound: Option<u64>,
    pub degree_source: Option<DegreeSource>,
    pub monomials: usize,
    pub cvars: usize,
    pub nonzeros: usize,
    pub basis_change: Vec<Vec<String>>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub certificate: Certificate,
    pub transcript: Transcript,
}

/// `A·c = v` with columns indexed by the generic coefficients and rows by
/// the Laurent monomials `M` of the substituted polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<Rational>,
    pub columns: Vec<CVar>,
    pub monomials: Vec<Exponent>,
}

/// All exponent vectors in `n` variables of total degree at most `deg`, in
/// graded lexicographic order.
pub fn monomials_up_to(n: usize, deg: u32) -> Vec<Vec<u32>> {
    fn fill(prefix: &mut Vec<u32>, n: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n - 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=left).rev() {
            prefix.push(k);
            fill(prefix, n, left - k, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return vec![Vec::new()];
    }
    for total in 0..=deg {
        fill(&mut Vec::with_capacity(n), n, total, &mut out);
    }
    out
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k);
    (0..k).try_fold(1u64, |acc, i| {
        acc.checked_mul(n - i).map(|x| x / (i + 1))
    })
}

/// Number of generic coefficients `n · C(2d - 2 + n, n)`, saturating.
pub fn cvar_count(n: usize, d: u64) -> u64 {
    let n = n as u64;
    d.checked_mul(2)
        .and_then(|x| (x - 2).checked_add(n))
        .and_then(|top| binomial(top, n))
        .and_then(|b| b.checked_mul(n))
        .unwrap_or(u64::MAX)
}

/// `H = Σ (yi - αi) Fi - 1` with `deg Fi = 2d - 2`.
pub fn build_generic_h(n: usize, d: u64, alpha: &[Rational]) -> Result<GenericPoly> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidInput("need n ≥ 1 and d ≥ 1".into()));
    }
    if alpha.len() != n {
        return Err(Error::Dimension(format!("alpha has {} coordinates, expected {n}", alpha.len())));
    }
    let fdeg = u32::try_from(2 * d - 2).map_err(|_| Error::Oversized(format!("degree bound {d}")))?;
    let mut h = GenericPoly::new(n, fdeg + 1);
    let one = Rational::from_integer(1.into());
    for q in monomials_up_to(n, fdeg) {
        for (p, a) in alpha.iter().enumerate() {
            let c = LinForm::var(CVar { p, q: q.clone() });
            let mut shifted = q.clone();
            shifted[p] += 1;
            h.add_term(shifted, &c, &one);
            h.add_term(q.clone(), &c, &-a);
        }
    }
    h.add_term(vec![0; n], &LinForm::constant(-one), &Rational::from_integer(1.into()));
    Ok(h)
}

/// Collects the substituted polynomial by monomial, moving constants to the
/// right-hand side.
pub fn assemble_system(h: &GenericPoly, pullbacks: &[LaurentPoly]) -> Result<LinearSystem> {
    let collected = polyring::generic_substitute(h, pullbacks)?;
    Ok(system_from_collected(h, collected))
}

fn system_from_collected(h: &GenericPoly, collected: BTreeMap<Exponent, LinForm>) -> LinearSystem {
    let columns: Vec<CVar> = h.cvars().into_iter().collect();
    let index: BTreeMap<&CVar, usize> = columns.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut matrix = SparseMatrix::new(collected.len(), columns.len());
    let mut rhs = Vec::with_capacity(collected.len());
    let mut monomials = Vec::with_capacity(collected.len());
    for (row, (e, form)) in collected.into_iter().enumerate() {
        for (v, c) in &form.coeffs {
            matrix.set(row, index[v], c.clone());
        }
        rhs.push(-form.constant);
        monomials.push(e);
    }
    LinearSystem {
        matrix,
        rhs,
        columns,
        monomials,
    }
}

fn render_matrix(m: &[Vec<Rational>]) -> Vec<Vec<String>> {
    m.iter()
        .map(|r| r.iter().map(ToString::to_string).collect())
        .collect()
}

/// Decides whether `G·a` lies in the closure of `G·b`, returning the
/// certified decision and, unless the orbit is dense, the linear system it
/// was read from.
pub fn decide(problem: &DecisionProblem, opts: &DecideOptions) -> Result<(Decision, Option<LinearSystem>)> {
    let rep = &problem.rep;
    let n = rep.n;
    for (v, name) in [(&problem.a, "a"), (&problem.b, "b")] {
        if v.len() != n {
            return Err(Error::Dimension(format!(
                "{name} has {} coordinates, module has dimension {n}",
                v.len()
            )));
        }
    }
    if problem.degree_bound_override == Some(0) {
        return Err(Error::InvalidInput("degree bound must be at least 1".into()));
    }
    if problem.b.is_zero() {
        return Err(Error::Precondition("b = 0: the orbit of b must be nonzero".into()));
    }
    if !rep.scalar_extended && !problem.conic_asserted {
        return Err(Error::Precondition(
            "the orbit of b is not known to be conic; conify the problem or assert conicity".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let orbit_dimension = if opts.exact_orbit_dimension {
        repmodel::orbit_dimension_exact(rep, &problem.b)?
    } else {
        repmodel::orbit_dimension(rep, &problem.b, &mut rng)?
    };
    let mut transcript = Transcript {
        module_dimension: n,
        orbit_dimension,
        degree_bound: None,
        degree_source: None,
        monomials: 0,
        cvars: 0,
        nonzeros: 0,
        basis_change: Vec::new(),
        seed: opts.seed,
        notes: Vec::new(),
    };
    if orbit_dimension == n {
        let decision = Decision {
            verdict: Verdict::TriviallyDense,
            certificate: Certificate::Density {
                orbit_dimension,
                module_dimension: n,
            },
            transcript,
        };
        return Ok((decision, None));
    }

    let s = repmodel::find_scrambling(&problem.b, &mut rng)?;
    let srep = repmodel::change_basis(rep, &s)?;
    let sa = exactmath::mat_vec(&s, &problem.a);
    let sb = ModuleVector::new(exactmath::mat_vec(&s, &problem.b));
    transcript.basis_change = render_matrix(&s);

    let (d, source) = match (problem.degree_bound_override, rep.degree_bound) {
        (Some(d), _) => (d, DegreeSource::Override),
        (None, Some(d)) => (d, DegreeSource::Representation),
        (None, None) => (degbound::parametric_degree_bound_u64(rep)?, DegreeSource::Parametric),
    };
    if source == DegreeSource::Parametric && rep.scalar_extended {
        transcript.notes.push(
            "no degree formula is known for the scalar-extended group; using the parametric bound".into(),
        );
    }
    transcript.degree_bound = Some(d);
    transcript.degree_source = Some(source);

    let cvars = cvar_count(n, d);
    if cvars > opts.max_nnz as u64 {
        return Err(Error::Oversized(format!(
            "{cvars} generic coefficients at degree bound {d} exceed the limit of {}",
            opts.max_nnz
        )));
    }
    let h = build_generic_h(n, d, &sa)?;
    let pullbacks = orbit_pullbacks(&srep, &sb)?;
    let system = assemble_system(&h, &pullbacks)?;
    transcript.monomials = system.monomials.len();
    transcript.cvars = system.columns.len();
    transcript.nonzeros = system.matrix.nnz();
    if system.matrix.nnz() > opts.max_nnz {
        return Err(Error::Oversized(format!(
            "system with {} rows, {} columns and {} nonzeros exceeds the limit of {}",
            system.monomials.len(),
            system.columns.len(),
            system.matrix.nnz(),
            opts.max_nnz
        )));
    }

    let witness = exactmath::solve_or_refute(&system.matrix, &system.rhs)?;
    let verdict = if witness.is_solution() {
        Verdict::NotInClosure
    } else {
        Verdict::InClosure
    };
    let decision = Decision {
        verdict,
        certificate: Certificate::Witness { witness },
        transcript,
    };
    if !verify(&decision, Some(&system)) {
        return Err(Error::Certificate("returned witness failed plug-back".into()));
    }
    Ok((decision, Some(system)))
}

/// Convenience wrapper returning only the verdict.
pub fn decide_verdict(problem: &DecisionProblem, opts: &DecideOptions) -> Result<Verdict> {
    decide(problem, opts).map(|(d, _)| d.verdict)
}

/// Re-checks a decision against its system by exact plug-back.
pub fn verify(decision: &Decision, system: Option<&LinearSystem>) -> bool {
    match (&decision.certificate, system) {
        (Certificate::Witness { witness }, Some(sys)) => {
            let kind_ok = match decision.verdict {
                Verdict::InClosure => !witness.is_solution(),
                Verdict::NotInClosure => witness.is_solution(),
                Verdict::TriviallyDense => false,
            };
            kind_ok && exactmath::verify_witness(&sys.matrix, &sys.rhs, witness)
        }
        (
            Certificate::Density {
                orbit_dimension,
                module_dimension,
            },
            None,
        ) => decision.verdict == Verdict::TriviallyDense && orbit_dimension == module_dimension,
        _ => false,
    }
}

impl LinearSystem {
    pub fn is_homogeneous(&self) -> bool {
        self.rhs.iter().all(Zero::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{rat, ratio};
    use crate::repmodel::{make_conic, sl2_binary_forms, torus_diagonal};
    use proptest::prelude::*;

    fn v(xs: &[i64]) -> ModuleVector {
        ModuleVector::from_i64(xs)
    }

    fn parabola() -> RepresentationData {
        torus_diagonal(&[vec![1], vec![2]]).unwrap()
    }

    fn run(p: DecisionProblem) -> Verdict {
        let (d, sys) = decide(&p, &DecideOptions::default()).unwrap();
        assert!(verify(&d, sys.as_ref()));
        d.verdict
    }

    #[test]
    fn generic_h_smallest() {
        let h = build_generic_h(1, 1, &[rat(3)]).unwrap();
        let c = CVar { p: 0, q: vec![0] };
        assert_eq!(h.terms().len(), 2);
        assert_eq!(h.terms()[&vec![1]], LinForm::var(c.clone()));
        let mut constant = LinForm::constant(rat(-1));
        constant.add_coeff(&c, &rat(-3));
        assert_eq!(h.terms()[&vec![0]], constant);
        assert_eq!(h.degree_bound(), 1);
    }

    #[test]
    fn generic_h_counts() {
        let h = build_generic_h(3, 2, &[rat(0), rat(0), rat(0)]).unwrap();
        assert_eq!(h.cvars().len(), 30);
        assert_eq!(cvar_count(3, 2), 30);
        assert_eq!(h.terms()[&vec![0, 0, 0]], LinForm::constant(rat(-1)));
        assert_eq!(cvar_count(4, 2), 60);
        assert_eq!(cvar_count(3, u64::MAX / 2), u64::MAX);
    }

    #[test]
    fn generic_h_evaluates_to_definition() {
        // H(y) = Σ (y_i - α_i) F_i(y) - 1 with all c = 1
        let alpha = [ratio(1, 2), rat(-3)];
        let h = build_generic_h(2, 2, &alpha).unwrap();
        let assign: BTreeMap<CVar, Rational> = h.cvars().into_iter().map(|c| (c, rat(1))).collect();
        let y = [rat(2), ratio(-1, 3)];
        let f: Rational = monomials_up_to(2, 2)
            .iter()
            .map(|q| num_traits::pow(y[0].clone(), q[0] as usize) * num_traits::pow(y[1].clone(), q[1] as usize))
            .sum();
        let expect = (&y[0] - &alpha[0]) * &f + (&y[1] - &alpha[1]) * &f - rat(1);
        assert_eq!(h.evaluate(&y, &assign), expect);
    }

    #[test]
    fn pullbacks_examples() {
        let t = parabola();
        let amb = t.ambient();
        let psi = orbit_pullbacks(&t, &v(&[1, 1])).unwrap();
        assert_eq!(psi, vec![LaurentPoly::parse(amb, "x1").unwrap(), LaurentPoly::parse(amb, "x1^2").unwrap()]);
        assert!(orbit_pullbacks(&t, &v(&[0, 0])).unwrap().iter().all(LaurentPoly::is_zero));
        let (c, _, b) = make_conic(&t, &v(&[0, 0]), &v(&[1, 1])).unwrap();
        let psi = orbit_pullbacks(&c, &b).unwrap();
        let want: Vec<LaurentPoly> = ["x1", "x1*x2", "x1*x2^2"]
            .iter()
            .map(|s| LaurentPoly::parse(c.ambient(), s).unwrap())
            .collect();
        assert_eq!(psi, want);
    }

    #[test]
    fn one_dimensional_torus_system() {
        let t = torus_diagonal(&[vec![1]]).unwrap();
        for alpha in [0, 1, -5] {
            let h = build_generic_h(1, 1, &[rat(alpha)]).unwrap();
            let psi = orbit_pullbacks(&t, &v(&[1])).unwrap();
            let sys = assemble_system(&h, &psi).unwrap();
            assert_eq!(sys.monomials.len(), 2);
            let w = exactmath::solve_or_refute(&sys.matrix, &sys.rhs).unwrap();
            assert!(!w.is_solution());
        }
    }

    #[test]
    fn conified_parabola_system_shape() {
        let (rep, a, b) = make_conic(&parabola(), &v(&[1, 0]), &v(&[1, 1])).unwrap();
        let h = build_generic_h(3, 2, &a).unwrap();
        let sys = assemble_system(&h, &orbit_pullbacks(&rep, &b).unwrap()).unwrap();
        assert_eq!(sys.columns.len(), 30);
        assert!(sys.monomials.len() <= 28);
        let w = exactmath::solve_or_refute(&sys.matrix, &sys.rhs).unwrap();
        assert!(w.is_solution());
        let (rep, a, b) = make_conic(&parabola(), &v(&[0, 0]), &v(&[1, 1])).unwrap();
        let h = build_generic_h(3, 2, &a).unwrap();
        let sys = assemble_system(&h, &orbit_pullbacks(&rep, &b).unwrap()).unwrap();
        assert!(!exactmath::solve_or_refute(&sys.matrix, &sys.rhs).unwrap().is_solution());
    }

    #[test]
    fn parabola_decisions() {
        let p = |a: &[i64]| DecisionProblem::conified(&parabola(), &v(a), &v(&[1, 1])).unwrap();
        assert_eq!(run(p(&[0, 0]).with_degree_bound(2)), Verdict::InClosure);
        assert_eq!(run(p(&[1, 0]).with_degree_bound(2)), Verdict::NotInClosure);
        assert_eq!(run(p(&[4, 16]).with_degree_bound(2)), Verdict::InClosure);
        assert_eq!(run(p(&[1, 1]).with_degree_bound(2)), Verdict::InClosure);
        assert_eq!(run(p(&[2, 4])), Verdict::InClosure);
        assert_eq!(run(p(&[0, 0])), Verdict::InClosure);
        assert_eq!(run(p(&[0, 5])), Verdict::NotInClosure);
        // too small a bound errs toward membership
        assert_eq!(run(p(&[1, 0]).with_degree_bound(1)), Verdict::InClosure);
    }

    #[test]
    fn parametric_source_is_recorded() {
        let p = DecisionProblem::conified(&parabola(), &v(&[1, 0]), &v(&[1, 1])).unwrap();
        let (d, _) = decide(&p, &DecideOptions::default()).unwrap();
        assert_eq!(d.transcript.degree_source, Some(DegreeSource::Parametric));
        assert_eq!(d.transcript.degree_bound, Some(9));
        assert_eq!(d.transcript.notes.len(), 1);
    }

    #[test]
    fn quadratic_forms_under_scalar_sl2() {
        let sl2 = sl2_binary_forms(2).unwrap();
        let b = v(&[1, 2, 1]);
        let p = |a: &[i64]| DecisionProblem::conified(&sl2, &v(a), &b).unwrap().with_degree_bound(2);
        assert_eq!(run(p(&[0, 1, 0])), Verdict::NotInClosure);
        assert_eq!(run(p(&[1, 0, 0])), Verdict::InClosure);
        assert_eq!(run(p(&[0, 0, 0])), Verdict::InClosure);
        assert_eq!(run(p(&[1, 2, 1])), Verdict::InClosure);
    }

    #[test]
    fn dense_orbit() {
        let line = torus_diagonal(&[vec![1]]).unwrap();
        let p = DecisionProblem::conified(&line, &v(&[7]), &v(&[1])).unwrap();
        let (d, sys) = decide(&p, &DecideOptions::default()).unwrap();
        assert_eq!(d.verdict, Verdict::TriviallyDense);
        assert!(d.verdict.in_closure());
        assert!(sys.is_none() && verify(&d, None));
    }

    #[test]
    fn preconditions() {
        let t = parabola();
        let opts = DecideOptions::default();
        let p = DecisionProblem::new(t.clone(), v(&[1, 1]), v(&[1, 1]));
        assert!(matches!(decide(&p, &opts), Err(Error::Precondition(_))));
        let p = DecisionProblem::new(t.clone(), v(&[1, 1]), v(&[0, 0])).assume_conic();
        assert!(matches!(decide(&p, &opts), Err(Error::Precondition(_))));
        let p = DecisionProblem::new(t, v(&[1]), v(&[1, 1])).assume_conic();
        assert!(matches!(decide(&p, &opts), Err(Error::Dimension(_))));
        let p = DecisionProblem::conified(&parabola(), &v(&[1, 0]), &v(&[1, 1])).unwrap();
        let tight = DecideOptions {
            max_nnz: 10,
            ..DecideOptions::default()
        };
        assert!(matches!(decide(&p, &tight), Err(Error::Oversized(_))));
    }

    #[test]
    fn tampering_is_detected() {
        for a in [[1, 0], [0, 0]] {
            let p = DecisionProblem::conified(&parabola(), &v(&a), &v(&[1, 1]))
                .unwrap()
                .with_degree_bound(2);
            let (d, sys) = decide(&p, &DecideOptions::default()).unwrap();
            let sys = sys.unwrap();
            let mut bumped = d.clone();
            if let Certificate::Witness { witness } = &mut bumped.certificate {
                witness.vector_mut()[0] += rat(1);
            }
            let mut zeroed = d.clone();
            if let Certificate::Witness { witness } = &mut zeroed.certificate {
                witness.vector_mut().iter_mut().for_each(|x| *x = rat(0));
            }
            assert!(verify(&d, Some(&sys)));
            assert!(!verify(&zeroed, Some(&sys)));
            if d.verdict == Verdict::NotInClosure {
                // bumping a free column can leave a solution valid; the zeroed one cannot be
                let mut wrong_kind = d.clone();
                wrong_kind.verdict = Verdict::InClosure;
                assert!(!verify(&wrong_kind, Some(&sys)));
            } else {
                assert!(!verify(&bumped, Some(&sys)));
            }
        }
    }

    #[test]
    fn decision_json_roundtrip() {
        let p = DecisionProblem::conified(&parabola(), &v(&[1, 0]), &v(&[1, 1]))
            .unwrap()
            .with_degree_bound(2);
        let (d, _) = decide(&p, &DecideOptions::default()).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert!(text.contains("\"NOT_IN_CLOSURE\""));
        let back: Decision = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(monomials_up_to(2, 1), vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
        assert_eq!(monomials_up_to(3, 2).len(), 10);
        assert_eq!(monomials_up_to(1, 0), vec![vec![0]]);
    }

    #[test]
    fn hyperbola_system_is_affine() {
        let t = torus_diagonal(&[vec![1], vec![-1]]).unwrap();
        let (c, a, b) = make_conic(&t, &v(&[2, 3]), &v(&[1, 1])).unwrap();
        let h = build_generic_h(3, 2, &a).unwrap();
        let sys = assemble_system(&h, &orbit_pullbacks(&c, &b).unwrap()).unwrap();
        assert!(!sys.is_homogeneous());
        assert!(sys.monomials.iter().any(|e| e.0[1] < 0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn orbit_points_are_in_closure(s in 1i64..=5, t in -4i64..=4) {
            prop_assume!(t != 0);
            let (rep, _, b) = make_conic(&parabola(), &v(&[0, 0]), &v(&[1, 1])).unwrap();
            let a = repmodel::apply(&rep, &[rat(s), rat(t)], &b).unwrap();
            let p = DecisionProblem::new(rep, a, b).with_degree_bound(2);
            prop_assert_eq!(run(p), Verdict::InClosure);
        }

        #[test]
        fn scaling_does_not_change_verdict(
            a in prop::collection::vec(-3i64..=3, 2),
            num in -5i64..=5,
            den in 1i64..=4,
        ) {
            prop_assume!(num != 0);
            let lambda = ratio(num, den);
            let (rep, a1, b) = make_conic(&parabola(), &v(&a), &v(&[1, 1])).unwrap();
            let base = run(DecisionProblem::new(rep.clone(), a1.clone(), b.clone()).with_degree_bound(2));
            let scaled = run(DecisionProblem::new(rep, a1.scaled(&lambda), b).with_degree_bound(2));
            prop_assert_eq!(base, scaled);
        }

        #[test]
        fn seeds_do_not_change_verdict(seed in 0u64..1000, a in prop::collection::vec(-2i64..=2, 2)) {
            let p = DecisionProblem::conified(&parabola(), &v(&a), &v(&[0, 1])).unwrap().with_degree_bound(2);
            let opts = DecideOptions { seed, ..DecideOptions::default() };
            let base = decide_verdict(&p, &DecideOptions::default()).unwrap();
            prop_assert_eq!(decide_verdict(&p, &opts).unwrap(), base);
        }
    }
}
