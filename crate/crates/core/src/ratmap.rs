//! Rational maps `R(z) = sum a_j / (z - p_j)` with simple poles and no
//! polynomial part, so that `R(inf) = 0` always holds.

use std::fmt;

use crate::numerics::{Complex, ComplexPolynomial, DEFAULT_ROOT_TOL};
use crate::{Error, Result};

/// Poles closer than this are rejected at construction.
pub const POLE_SEPARATION: f64 = 1e-10;
/// Residues smaller than this in modulus count as zero.
pub const MIN_RESIDUE: f64 = 1e-15;
/// Points this close to a pole are refused by [`RationalMapPF::eval`].
pub const POLE_GUARD: f64 = 1e-12;
/// Default half-width of the `Marginal` band in [`RationalMapPF::is_n_good`].
pub const DEFAULT_GOODNESS_DELTA: f64 = 1e-9;

/// One partial fraction `residue / (z - pole)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub residue: Complex,
    pub pole: Complex,
}

impl Term {
    pub fn new(residue: Complex, pole: Complex) -> Self {
        Term { residue, pole }
    }
}

/// A degree-`n` rational map stored as `n` residue/pole pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMapPF {
    terms: Vec<Term>,
}

/// Critical points of `R` (zeros of the numerator of `R'`) and the values of
/// `R` there.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalData {
    pub critical_points: Vec<Complex>,
    pub critical_values: Vec<Complex>,
    /// `infinity` is a critical point; happens when the residues sum to zero.
    pub infinity_critical: bool,
    pub max_cv_modulus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoodnessStatus {
    Good,
    NotGood,
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoodnessVerdict {
    pub status: GoodnessStatus,
    /// `1 - max |critical value|`.
    pub margin: f64,
}

impl RationalMapPF {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyMap);
        }
        for (i, t) in terms.iter().enumerate() {
            let finite = [t.residue.re, t.residue.im, t.pole.re, t.pole.im]
                .iter()
                .all(|x| x.is_finite());
            if !finite {
                return Err(Error::NonFinite);
            }
            if t.residue.norm() <= MIN_RESIDUE {
                return Err(Error::ZeroResidue { index: i });
            }
            for (j, s) in terms[..i].iter().enumerate() {
                if (t.pole - s.pole).norm() <= POLE_SEPARATION {
                    return Err(Error::DuplicatePole { first: j, second: i });
                }
            }
        }
        Ok(RationalMapPF { terms })
    }

    /// Convenience constructor from `(residue, pole)` pairs.
    pub fn from_pairs(pairs: &[(Complex, Complex)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(a, p)| Term::new(a, p)).collect())
    }

    /// Real residues and real poles.
    pub fn from_real(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(a, p)| Term::new(Complex::new(a, 0.0), Complex::new(p, 0.0)))
                .collect(),
        )
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms.len()
    }

    pub fn poles(&self) -> Vec<Complex> {
        self.terms.iter().map(|t| t.pole).collect()
    }

    pub fn residues(&self) -> Vec<Complex> {
        self.terms.iter().map(|t| t.residue).collect()
    }

    /// `R(z)`, summing the smallest contributions first.
    pub fn eval(&self, z: Complex) -> Result<Complex> {
        let mut parts = Vec::with_capacity(self.terms.len());
        for (i, t) in self.terms.iter().enumerate() {
            let d = z - t.pole;
            if d.norm() <= POLE_GUARD {
                return Err(Error::PoleHit { index: i });
            }
            parts.push(t.residue / d);
        }
        parts.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        Ok(parts.into_iter().sum())
    }

    /// `R'(z) = -sum a_j / (z - p_j)^2`. Unchecked against poles.
    pub fn derivative(&self, z: Complex) -> Complex {
        -self
            .terms
            .iter()
            .map(|t| {
                let d = z - t.pole;
                t.residue / (d * d)
            })
            .sum::<Complex>()
    }

    /// `R'(inf) = lim z R(z)`, which is the sum of the residues.
    pub fn derivative_at_infinity(&self) -> Complex {
        self.terms.iter().map(|t| t.residue).sum()
    }

    /// `R = P / Q` with `Q = prod (z - p_j)` monic of degree `n` and
    /// `deg P <= n - 1`.
    pub fn as_fraction(&self) -> (ComplexPolynomial, ComplexPolynomial) {
        let poles = self.poles();
        let q = ComplexPolynomial::from_roots(&poles);
        let mut p = ComplexPolynomial::zero();
        for (j, t) in self.terms.iter().enumerate() {
            let others: Vec<Complex> = poles
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &x)| x)
                .collect();
            p = &p + &ComplexPolynomial::from_roots(&others).scale(t.residue);
        }
        (p, q)
    }

    /// The `n` solutions of `R(z) = w`, i.e. the roots of `P - w Q`.
    pub fn preimages(&self, w: Complex) -> Result<Vec<Complex>> {
        let (p, q) = self.as_fraction();
        self.preimages_with(&p, &q, w, None)
    }

    /// Preimages using a precomputed fraction and optional warm start.
    pub(crate) fn preimages_with(
        &self,
        p: &ComplexPolynomial,
        q: &ComplexPolynomial,
        w: Complex,
        guesses: Option<&[Complex]>,
    ) -> Result<Vec<Complex>> {
        if w.norm() == 0.0 {
            return Err(Error::ZeroTarget);
        }
        let poly = p - &q.scale(w);
        poly.roots_from(guesses, DEFAULT_ROOT_TOL)
    }

    /// Numerator of `R'`: `N(z) = -sum a_j prod_{k != j} (z - p_k)^2`.
    pub fn derivative_numerator(&self) -> ComplexPolynomial {
        let poles = self.poles();
        let mut n = ComplexPolynomial::zero();
        for (j, t) in self.terms.iter().enumerate() {
            let mut others = Vec::with_capacity(2 * poles.len());
            for (k, &x) in poles.iter().enumerate() {
                if k != j {
                    others.push(x);
                    others.push(x);
                }
            }
            n = &n + &ComplexPolynomial::from_roots(&others).scale(-t.residue);
        }
        n
    }

    pub fn critical_data(&self) -> Result<CriticalData> {
        let mut numerator = self.derivative_numerator();
        numerator.trim(1e-14);
        let full_degree = 2 * self.degree() - 2;
        let infinity_critical = numerator.degree() < full_degree;
        let critical_points = if numerator.degree() == 0 {
            Vec::new()
        } else {
            numerator.roots(DEFAULT_ROOT_TOL)?
        };
        let critical_values = critical_points
            .iter()
            .map(|&c| self.eval(c))
            .collect::<Result<Vec<_>>>()?;
        let max_cv_modulus = critical_values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Ok(CriticalData {
            critical_points,
            critical_values,
            infinity_critical,
            max_cv_modulus,
        })
    }

    /// Classifies the map by where its critical values sit relative to the
    /// unit circle; `Good` means every one of them is inside `|w| < 1 - delta`.
    pub fn is_n_good(&self, delta: f64) -> Result<GoodnessVerdict> {
        let data = self.critical_data()?;
        let margin = 1.0 - data.max_cv_modulus;
        let status = if margin > delta {
            GoodnessStatus::Good
        } else if margin < -delta {
            GoodnessStatus::NotGood
        } else {
            GoodnessStatus::Marginal
        };
        Ok(GoodnessVerdict { status, margin })
    }

    /// The map `z -> (a/|a|) R(a z + b)`, again in partial-fraction form:
    /// residues become `a_j / |a|` and poles `(p_j - b) / a`.
    pub fn affine_conjugate(&self, a: Complex, b: Complex) -> Result<Self> {
        if a.norm() == 0.0 {
            return Err(Error::InvalidParameter("affine scale must be nonzero".into()));
        }
        let modulus = a.norm();
        Self::new(
            self.terms
                .iter()
                .map(|t| Term::new(t.residue / modulus, (t.pole - b) / a))
                .collect(),
        )
    }

    /// Adds a term `eps / (z - b)` for every `b` in `extra_poles`.
    pub fn perturb(&self, extra_poles: &[Complex], eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "perturbation size must be positive, got {eps}"
            )));
        }
        for &b in extra_poles {
            match self.eval(b) {
                Ok(v) if v.norm() < 1.0 => {}
                Ok(v) => log::warn!("extra pole {b} has |R| = {} >= 1", v.norm()),
                Err(_) => {}
            }
        }
        let mut terms = self.terms.clone();
        terms.extend(extra_poles.iter().map(|&b| Term::new(Complex::new(eps, 0.0), b)));
        Self::new(terms)
    }

    /// True when every residue and pole is real to within `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.terms
            .iter()
            .all(|t| t.residue.im.abs() < tol && t.pole.im.abs() < tol)
    }

    /// True when the term set is closed under `(a, p) -> (conj a, conj p)`.
    pub fn is_conjugation_symmetric(&self, tol: f64) -> bool {
        self.terms.iter().all(|t| {
            self.terms
                .iter()
                .any(|s| (s.residue - t.residue.conj()).norm() < tol && (s.pole - t.pole.conj()).norm() < tol)
        })
    }
}

impl fmt::Display for RationalMapPF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})/(z - ({}))", t.residue, t.pole)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn example_61() -> RationalMapPF {
        RationalMapPF::from_real(&[(0.3, -1.0), (0.2, 1.0)]).unwrap()
    }

    fn cube_root_map() -> RationalMapPF {
        let pairs: Vec<_> = (0..3)
            .map(|j| {
                (
                    c(1.0 / 3.0, 0.0),
                    Complex::from_polar(1.0, 2.0 * PI * j as f64 / 3.0),
                )
            })
            .collect();
        RationalMapPF::from_pairs(&pairs).unwrap()
    }

    #[test]
    fn construction_rejects_bad_terms() {
        assert_eq!(RationalMapPF::new(vec![]), Err(Error::EmptyMap));
        assert_eq!(
            RationalMapPF::from_real(&[(1.0, 2.0), (1.0, 2.0)]),
            Err(Error::DuplicatePole { first: 0, second: 1 })
        );
        assert_eq!(
            RationalMapPF::from_real(&[(1.0, 0.0), (0.0, 2.0)]),
            Err(Error::ZeroResidue { index: 1 })
        );
        assert_eq!(
            RationalMapPF::from_real(&[(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        );
    }

    #[test]
    fn evaluation() {
        let single = RationalMapPF::from_real(&[(1.0, 0.0)]).unwrap();
        assert_eq!(single.eval(c(2.0, 0.0)).unwrap(), c(0.5, 0.0));
        let v = example_61().eval(c(0.0, 0.0)).unwrap();
        assert!((v - c(0.1, 0.0)).norm() < 1e-15);
        // z^2 / (z^3 - 1) at z = 2 is 4/7.
        let v = cube_root_map().eval(c(2.0, 0.0)).unwrap();
        assert!((v - c(4.0 / 7.0, 0.0)).norm() < 1e-15);
        assert_eq!(single.eval(c(0.0, 0.0)), Err(Error::PoleHit { index: 0 }));
    }

    #[test]
    fn residue_sum() {
        assert!((example_61().derivative_at_infinity() - c(0.5, 0.0)).norm() < 1e-15);
        let m = RationalMapPF::from_pairs(&[
            (c(0.4, 0.0), c(0.0, 0.0)),
            (c(0.4, 0.0), c(6.0, 0.0)),
            (c(0.4, 0.0), c(1.0, 1.0)),
        ])
        .unwrap();
        assert!((m.derivative_at_infinity() - c(1.2, 0.0)).norm() < 1e-15);
        let single = RationalMapPF::from_pairs(&[(c(0.7, -0.2), c(3.0, 1.0))]).unwrap();
        assert_eq!(single.derivative_at_infinity(), c(0.7, -0.2));
    }

    #[test]
    fn fraction_form() {
        let (p, q) = cube_root_map().as_fraction();
        let expect_p = [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let expect_q = [c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert!(p
            .coeffs()
            .iter()
            .zip(&expect_p)
            .all(|(a, b)| (a - b).norm() < 1e-15));
        assert!(q
            .coeffs()
            .iter()
            .zip(&expect_q)
            .all(|(a, b)| (a - b).norm() < 1e-15));

        let (p, q) = RationalMapPF::from_pairs(&[(c(2.0, 1.0), c(0.5, 0.0))])
            .unwrap()
            .as_fraction();
        assert_eq!(p.coeffs(), &[c(2.0, 1.0)]);
        assert_eq!(q.coeffs(), &[c(-0.5, 0.0), c(1.0, 0.0)]);

        let (p, q) = example_61().as_fraction();
        assert!((p.coeffs()[0] - c(-0.1, 0.0)).norm() < 1e-15);
        assert!((p.coeffs()[1] - c(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(q, ComplexPolynomial::from_real(&[-1.0, 0.0, 1.0]));
    }

    #[test]
    fn preimages_of_examples() {
        let a = c(0.6, 0.3);
        let p = c(1.0, -2.0);
        let one = RationalMapPF::from_pairs(&[(a, p)]).unwrap();
        let w = Complex::from_polar(1.0, 0.9);
        let z = one.preimages(w).unwrap();
        assert_eq!(z.len(), 1);
        assert!((z[0] - (p + a / w)).norm() < 1e-14);

        let mut z = example_61().preimages(c(1.0, 0.0)).unwrap();
        z.sort_by(|x, y| x.re.total_cmp(&y.re));
        let disc = 3.85_f64.sqrt();
        assert!((z[0] - c((0.5 - disc) / 2.0, 0.0)).norm() < 1e-13);
        assert!((z[1] - c((0.5 + disc) / 2.0, 0.0)).norm() < 1e-13);

        // R = -1: z^2 + 0.5 z - 1.1 = 0; the two alpha points interleave the betas.
        let mut alpha = example_61().preimages(c(-1.0, 0.0)).unwrap();
        alpha.sort_by(|x, y| x.re.total_cmp(&y.re));
        let disc = (0.25_f64 + 4.4).sqrt();
        assert!((alpha[0] - c((-0.5 - disc) / 2.0, 0.0)).norm() < 1e-13);
        assert!((alpha[1] - c((-0.5 + disc) / 2.0, 0.0)).norm() < 1e-13);
        assert!(alpha[0].re < z[0].re && z[0].re < alpha[1].re && alpha[1].re < z[1].re);

        assert_eq!(example_61().preimages(c(0.0, 0.0)), Err(Error::ZeroTarget));
    }

    #[test]
    fn degree_two_critical_data() {
        let m = RationalMapPF::from_real(&[(0.25, 0.0), (0.25, 1.0)]).unwrap();
        let d = m.critical_data().unwrap();
        assert_eq!(d.critical_points.len(), 2);
        assert!(!d.infinity_critical);
        for (z, v) in d.critical_points.iter().zip(&d.critical_values) {
            // critical points 0.5 +- 0.5i with values -+0.5i
            assert!((z.re - 0.5).abs() < 1e-12 && (z.im.abs() - 0.5).abs() < 1e-12);
            assert!((v - c(0.0, -z.im)).norm() < 1e-12, "z = {z}, v = {v}");
        }
        assert!((d.max_cv_modulus - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rotational_critical_data() {
        let d = cube_root_map().critical_data().unwrap();
        assert_eq!(d.critical_points.len(), 4);
        let zeros = d.critical_points.iter().filter(|z| z.norm() < 1e-10).count();
        assert_eq!(zeros, 1);
        let q = Complex::from_polar(1.0, PI / 3.0);
        for k in 0..3 {
            let expect = q * Complex::from_polar(2f64.powf(1.0 / 3.0), 2.0 * PI * k as f64 / 3.0);
            assert!(d.critical_points.iter().any(|z| (z - expect).norm() < 1e-10));
        }
        assert!((d.max_cv_modulus - 2f64.powf(2.0 / 3.0) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_term_has_no_critical_points() {
        let d = RationalMapPF::from_real(&[(0.3, 2.0)])
            .unwrap()
            .critical_data()
            .unwrap();
        assert!(d.critical_points.is_empty());
        assert_eq!(d.max_cv_modulus, 0.0);
    }

    #[test]
    fn zero_residue_sum_has_critical_infinity() {
        let m = RationalMapPF::from_real(&[(0.5, -1.0), (-0.5, 1.0)]).unwrap();
        let d = m.critical_data().unwrap();
        assert!(d.infinity_critical);
        assert!(d.critical_points.len() < 2);
    }

    #[test]
    fn goodness_examples() {
        let good = RationalMapPF::from_real(&[(0.475, 0.0), (0.49, 1.0)]).unwrap();
        let v = good.is_n_good(DEFAULT_GOODNESS_DELTA).unwrap();
        assert_eq!(v.status, GoodnessStatus::Good);
        assert!((v.margin - 0.035).abs() < 1e-12);

        let bad = RationalMapPF::from_real(&[(0.6, 0.0), (0.6, 1.0)]).unwrap();
        let v = bad.is_n_good(DEFAULT_GOODNESS_DELTA).unwrap();
        assert_eq!(v.status, GoodnessStatus::NotGood);
        assert!((v.margin + 0.2).abs() < 1e-12);

        let rot = RationalMapPF::from_real(&[(0.95, 1.0), (0.95, -1.0)]).unwrap();
        assert_eq!(
            rot.is_n_good(DEFAULT_GOODNESS_DELTA).unwrap().status,
            GoodnessStatus::Good
        );

        // Critical values of modulus exactly a1 + a2 = 1.
        let edge = RationalMapPF::from_real(&[(0.5, 0.0), (0.5, 1.0)]).unwrap();
        assert_eq!(
            edge.is_n_good(DEFAULT_GOODNESS_DELTA).unwrap().status,
            GoodnessStatus::Marginal
        );
    }

    #[test]
    fn affine_conjugate_examples() {
        let m = example_61();
        assert_eq!(m.affine_conjugate(c(1.0, 0.0), c(0.0, 0.0)).unwrap(), m);

        let m = RationalMapPF::from_real(&[(0.95, -1.0), (0.98, 1.0)]).unwrap();
        let t = m.affine_conjugate(c(2.0, 0.0), c(-1.0, 0.0)).unwrap();
        let expect = [(0.475, 0.0), (0.49, 1.0)];
        for (term, (a, p)) in t.terms().iter().zip(expect) {
            assert!((term.residue - c(a, 0.0)).norm() < 1e-15);
            assert!((term.pole - c(p, 0.0)).norm() < 1e-15);
        }

        let rot = Complex::from_polar(1.0, 0.7);
        let t = m.affine_conjugate(rot, c(0.3, 0.1)).unwrap();
        for (x, y) in t.terms().iter().zip(m.terms()) {
            assert!((x.residue - y.residue).norm() < 1e-15);
        }
    }

    #[test]
    fn perturbation() {
        let m = RationalMapPF::from_pairs(&[
            (c(0.4, 0.0), c(0.0, 0.0)),
            (c(0.4, 0.0), c(6.0, 0.0)),
            (c(0.4, 0.0), c(1.0, 1.0)),
        ])
        .unwrap();
        assert!(matches!(
            m.perturb(&[c(3.0, -1.0)], 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            m.perturb(&[c(6.0, 0.0)], 1e-3),
            Err(Error::DuplicatePole { .. })
        ));
        let p = m.perturb(&[c(3.0, -1.0)], 1e-3).unwrap();
        assert_eq!(p.degree(), 4);
        assert_eq!(
            p.is_n_good(DEFAULT_GOODNESS_DELTA).unwrap().status,
            GoodnessStatus::Good
        );

        let z = c(2.0, 2.5);
        let base = m.eval(z).unwrap();
        let mut last = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6, 1e-8] {
            let gap = (m.perturb(&[c(3.0, -1.0)], eps).unwrap().eval(z).unwrap() - base).norm();
            assert!(gap < last);
            last = gap;
        }
        assert!(last < 1e-8);
    }

    #[test]
    fn conjugation_symmetric_evaluation() {
        let m = RationalMapPF::from_pairs(&[
            (c(0.5, 0.0), c(0.0, 0.0)),
            (c(0.4, 0.1), c(2.0, 1.0)),
            (c(0.4, -0.1), c(2.0, -1.0)),
        ])
        .unwrap();
        assert!(m.is_conjugation_symmetric(1e-15));
        for z in [c(0.3, 0.7), c(-4.0, 1.1), c(2.5, -0.2)] {
            let lhs = m.eval(z.conj()).unwrap();
            let rhs = m.eval(z).unwrap().conj();
            assert!((lhs - rhs).norm() < 1e-15);
        }
    }

    fn random_map() -> impl Strategy<Value = RationalMapPF> {
        prop::collection::vec(
            ((0.05f64..1.0, -1.0f64..1.0), (-4.0f64..4.0, -4.0f64..4.0)),
            1..=4,
        )
        .prop_filter_map("distinct poles", |v| {
            RationalMapPF::from_pairs(
                &v.into_iter()
                    .map(|((r, th), (x, y))| (Complex::from_polar(r, th), c(x, y)))
                    .collect::<Vec<_>>(),
            )
            .ok()
            .filter(|m| {
                let p = m.poles();
                p.iter()
                    .enumerate()
                    .all(|(i, a)| p[..i].iter().all(|b| (a - b).norm() > 0.2))
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn preimage_round_trip(m in random_map(), x in -5.0f64..5.0, y in -5.0f64..5.0) {
            let z0 = c(x, y);
            prop_assume!(m.poles().iter().all(|p| (z0 - p).norm() > 0.05));
            let w = m.eval(z0).unwrap();
            prop_assume!(w.norm() >= 0.5 && w.norm() <= 2.0);
            let pre = m.preimages(w).unwrap();
            prop_assert_eq!(pre.len(), m.degree());
            for r in &pre {
                prop_assert!((m.eval(*r).unwrap() - w).norm() <= 1e-9);
            }
            let best = pre.iter().map(|r| (r - z0).norm()).fold(f64::INFINITY, f64::min);
            // A near-critical z0 makes the preimage ill-conditioned.
            prop_assume!(m.derivative(z0).norm() > 1e-3);
            prop_assert!(best <= 1e-8, "z0 = {}, nearest preimage at {}", z0, best);
        }

        #[test]
        fn affine_conjugate_identity(
            m in random_map(),
            ar in 0.2f64..3.0, at in -3.0f64..3.0,
            bx in -2.0f64..2.0, by in -2.0f64..2.0,
            zs in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 100),
        ) {
            let a = Complex::from_polar(ar, at);
            let b = c(bx, by);
            let t = m.affine_conjugate(a, b).unwrap();
            let unit = a / a.norm();
            for (x, y) in zs {
                let z = c(x, y);
                let (Ok(lhs), Ok(rhs)) = (t.eval(z), m.eval(a * z + b)) else { continue };
                prop_assert!((lhs - unit * rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
            }
        }

        #[test]
        fn rotation_preserves_goodness(m in random_map(), th in -3.0f64..3.0, bx in -2.0f64..2.0, by in -2.0f64..2.0) {
            let before = m.is_n_good(DEFAULT_GOODNESS_DELTA).unwrap();
            prop_assume!(before.margin.abs() > 1e-6);
            let after = m
                .affine_conjugate(Complex::from_polar(1.0, th), c(bx, by))
                .unwrap()
                .is_n_good(DEFAULT_GOODNESS_DELTA)
                .unwrap();
            prop_assert_eq!(before.status, after.status);
        }

        #[test]
        fn degree_two_modulus_is_residue_sum(a1 in 0.01f64..2.0, a2 in 0.01f64..2.0) {
            let m = RationalMapPF::from_real(&[(a1, 0.0), (a2, 1.0)]).unwrap();
            let d = m.critical_data().unwrap();
            prop_assert!((d.max_cv_modulus - (a1 + a2)).abs() <= 1e-10);
        }

        #[test]
        fn real_family_interleaves(
            poles in prop::collection::vec(-6.0f64..6.0, 1..=4),
            res in prop::collection::vec(0.02f64..0.6, 4),
        ) {
            let mut poles = poles;
            poles.sort_by(|a, b| a.total_cmp(b));
            prop_assume!(poles.windows(2).all(|w| w[1] - w[0] > 0.3));
            let pairs: Vec<_> = poles.iter().zip(&res).map(|(&p, &a)| (a, p)).collect();
            let m = RationalMapPF::from_real(&pairs).unwrap();
            prop_assume!(m.is_n_good(DEFAULT_GOODNESS_DELTA).unwrap().status == GoodnessStatus::Good);
            let mut alpha = m.preimages(c(-1.0, 0.0)).unwrap();
            let mut beta = m.preimages(c(1.0, 0.0)).unwrap();
            for z in alpha.iter().chain(&beta) {
                prop_assert!(z.im.abs() < 1e-9);
            }
            alpha.sort_by(|a, b| a.re.total_cmp(&b.re));
            beta.sort_by(|a, b| a.re.total_cmp(&b.re));
            for j in 0..m.degree() {
                prop_assert!(alpha[j].re < beta[j].re);
                if j + 1 < m.degree() {
                    prop_assert!(beta[j].re < alpha[j + 1].re);
                }
            }
        }
    }
}
