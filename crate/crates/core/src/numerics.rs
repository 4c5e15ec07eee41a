//! Complex polynomials and a simultaneous-iteration root finder.
//!
//! Roots are computed with the Aberth-Ehrlich method (Gauss–Seidel sweeps)
//! and then polished with a few Newton steps against the original
//! coefficients. Every returned root is checked against a backward-style
//! residual bound before it is handed back.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::{Error, Result};

pub use num_complex::Complex64 as Complex;

/// Default relative tolerance for [`ComplexPolynomial::roots`].
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
/// Maximum number of Aberth sweeps.
pub const MAX_SWEEPS: usize = 200;
/// Roots closer than this are reported as one repeated value.
pub const CLUSTER_SEPARATION: f64 = 1e-8;

/// A polynomial with complex coefficients stored in ascending degree order.
#[derive(Clone, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex>,
}

impl ComplexPolynomial {
    /// Builds a polynomial, trimming exactly-zero leading coefficients.
    /// An empty coefficient list is the zero polynomial.
    pub fn new(coeffs: Vec<Complex>) -> Self {
        let mut p = ComplexPolynomial { coeffs };
        p.trim(0.0);
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex) -> Self {
        Self::new(vec![c])
    }

    pub fn zero() -> Self {
        Self::new(Vec::new())
    }

    /// The monic linear factor `z - root`.
    pub fn linear(root: Complex) -> Self {
        ComplexPolynomial {
            coeffs: vec![-root, Complex::new(1.0, 0.0)],
        }
    }

    /// The monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex]) -> Self {
        roots
            .iter()
            .fold(Self::constant(Complex::new(1.0, 0.0)), |acc, &r| {
                &acc * &Self::linear(r)
            })
    }

    /// Drops leading coefficients whose modulus is at most `rel_tol` times
    /// the largest coefficient modulus. `rel_tol = 0` drops exact zeros only.
    pub fn trim(&mut self, rel_tol: f64) {
        let scale = self.max_coeff_modulus();
        while let Some(last) = self.coeffs.last() {
            if last.norm() <= rel_tol * scale || *last == Complex::new(0.0, 0.0) {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(Complex::new(0.0, 0.0));
        }
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex::new(0.0, 0.0)
    }

    pub fn leading(&self) -> Complex {
        *self.coeffs.last().expect("never empty")
    }

    pub fn max_coeff_modulus(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Horner evaluation of the polynomial and its first derivative.
    pub fn eval_with_derivative(&self, z: Complex) -> (Complex, Complex) {
        let mut value = Complex::new(0.0, 0.0);
        let mut slope = Complex::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            slope = slope * z + value;
            value = value * z + c;
        }
        (value, slope)
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Residual bound used to accept a root `r`:
    /// `tol * (1 + max|coeff|) * (1 + |r|)^degree`.
    pub fn residual_bound(&self, r: Complex, tol: f64) -> f64 {
        tol * (1.0 + self.max_coeff_modulus()) * (1.0 + r.norm()).powi(self.degree() as i32)
    }

    /// All roots, repeated according to multiplicity.
    pub fn roots(&self, tol: f64) -> Result<Vec<Complex>> {
        self.roots_from(None, tol)
    }

    /// Like [`roots`](Self::roots) but starts the iteration from `guesses`
    /// when they are supplied and have the right length. Continuation
    /// callers use the previous step's roots here.
    pub fn roots_from(&self, guesses: Option<&[Complex]>, tol: f64) -> Result<Vec<Complex>> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::DegreeTooLow);
        }
        if self.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let lead = self.leading();
        let monic: Vec<Complex> = self.coeffs.iter().map(|&c| c / lead).collect();
        let monic = ComplexPolynomial { coeffs: monic };

        let mut z = match guesses {
            Some(g) if g.len() == n && g.iter().all(|r| r.re.is_finite() && r.im.is_finite()) => {
                separate_guesses(g)
            }
            _ => initial_guesses(&monic),
        };

        if n == 1 {
            z[0] = -monic.coeffs[0];
        } else {
            aberth(&monic, &mut z);
        }

        for r in z.iter_mut() {
            *r = polish(self, *r);
        }
        merge_clusters(&mut z);

        for &r in &z {
            let residual = self.eval(r).norm();
            if !(residual <= self.residual_bound(r, tol)) {
                return Err(Error::NonConvergence { degree: n, residual });
            }
        }
        Ok(z)
    }
}

fn initial_guesses(monic: &ComplexPolynomial) -> Vec<Complex> {
    let n = monic.degree();
    let c = monic.coeffs();
    let centre = -c[n - 1] / n as f64;
    // Fujiwara-style bound on root moduli about the origin, halved to sit
    // closer to the typical root shell.
    let mut radius = 0.0_f64;
    for k in 1..=n {
        let term = c[n - k].norm();
        let root = if k == n {
            (term / 2.0).powf(1.0 / k as f64)
        } else {
            term.powf(1.0 / k as f64)
        };
        radius = radius.max(root);
    }
    let radius = if radius > 0.0 { radius } else { 1.0 };
    (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            centre + Complex::from_polar(radius, angle)
        })
        .collect()
}

// Aberth iteration stalls if two guesses coincide exactly.
fn separate_guesses(g: &[Complex]) -> Vec<Complex> {
    let mut z = g.to_vec();
    for i in 0..z.len() {
        for j in 0..i {
            if z[i] == z[j] {
                let bump = 1e-7 * (1.0 + z[i].norm());
                z[i] += Complex::from_polar(bump, 0.7 + i as f64);
            }
        }
    }
    z
}

fn aberth(monic: &ComplexPolynomial, z: &mut [Complex]) {
    let n = z.len();
    let mut converged = vec![false; n];
    for _ in 0..MAX_SWEEPS {
        let mut all = true;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let (p, dp) = monic.eval_with_derivative(z[i]);
            if p == Complex::new(0.0, 0.0) {
                converged[i] = true;
                continue;
            }
            let mut repulsion = Complex::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d != Complex::new(0.0, 0.0) {
                        repulsion += d.inv();
                    }
                }
            }
            let step = if dp == Complex::new(0.0, 0.0) {
                Complex::from_polar(1e-8 * (1.0 + z[i].norm()), 1.0 + i as f64)
            } else {
                let ratio = p / dp;
                ratio / (Complex::new(1.0, 0.0) - ratio * repulsion)
            };
            if !(step.re.is_finite() && step.im.is_finite()) {
                all = false;
                continue;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * (1.0 + z[i].norm()) {
                converged[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
}

fn polish(p: &ComplexPolynomial, mut r: Complex) -> Complex {
    let mut best = p.eval(r).norm();
    for _ in 0..3 {
        let (v, dv) = p.eval_with_derivative(r);
        if v == Complex::new(0.0, 0.0) || dv == Complex::new(0.0, 0.0) {
            break;
        }
        let candidate = r - v / dv;
        let residual = p.eval(candidate).norm();
        if residual < best {
            best = residual;
            r = candidate;
        } else {
            break;
        }
    }
    r
}

fn merge_clusters(z: &mut [Complex]) {
    let n = z.len();
    let mut group = vec![usize::MAX; n];
    for i in 0..n {
        if group[i] != usize::MAX {
            continue;
        }
        group[i] = i;
        for j in i + 1..n {
            if group[j] == usize::MAX && (z[i] - z[j]).norm() < CLUSTER_SEPARATION * (1.0 + z[i].norm()) {
                group[j] = i;
            }
        }
    }
    for leader in 0..n {
        let members: Vec<usize> = (0..n).filter(|&k| group[k] == leader).collect();
        if members.len() > 1 {
            let mean = members.iter().map(|&k| z[k]).sum::<Complex>() / members.len() as f64;
            for k in members {
                z[k] = mean;
            }
        }
    }
}

impl fmt::Debug for ComplexPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == Complex::new(0.0, 0.0) && self.coeffs.len() > 1 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn add(self, rhs: &ComplexPolynomial) -> ComplexPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Complex::new(0.0, 0.0);
        ComplexPolynomial::new(
            (0..len)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(zero) + rhs.coeffs.get(i).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }
}

impl Sub for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn sub(self, rhs: &ComplexPolynomial) -> ComplexPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn neg(self) -> ComplexPolynomial {
        ComplexPolynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Mul for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn mul(self, rhs: &ComplexPolynomial) -> ComplexPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return ComplexPolynomial::zero();
        }
        let mut out = vec![Complex::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPolynomial::new(out)
    }
}

impl Mul<Complex> for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn mul(self, rhs: Complex) -> ComplexPolynomial {
        self.scale(rhs)
    }
}
