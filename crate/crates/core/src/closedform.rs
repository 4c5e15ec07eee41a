//! Families with known Ahlfors functions or known classification.

use std::f64::consts::PI;

use crate::numerics::Complex;
use crate::ratmap::{GoodnessStatus, RationalMapPF, Term, DEFAULT_GOODNESS_DELTA};
use crate::{Error, Result};

const SLIT_TOL: f64 = 1e-12;
const REAL_TOL: f64 = 1e-12;
/// Imaginary offset per coordinate used to reroute colliding pole paths.
pub const DETOUR_OFFSET: f64 = 0.1;
const COLLISION_GRID: usize = 2048;

/// A finite union of disjoint closed real intervals, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidIntervals("no intervals".into()));
        }
        for (i, &(c, d)) in intervals.iter().enumerate() {
            if !c.is_finite() || !d.is_finite() {
                return Err(Error::NonFinite);
            }
            if c >= d {
                return Err(Error::InvalidIntervals(format!("interval {i} has c >= d")));
            }
            if i > 0 && intervals[i - 1].1 >= c {
                return Err(Error::InvalidIntervals(format!(
                    "interval {i} overlaps or precedes interval {}",
                    i - 1
                )));
            }
        }
        Ok(IntervalSet { intervals })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn length(&self) -> f64 {
        self.intervals.iter().map(|(c, d)| d - c).sum()
    }

    pub fn distance_to(&self, z: Complex) -> f64 {
        self.intervals
            .iter()
            .map(|&(c, d)| {
                let dx = (c - z.re).max(z.re - d).max(0.0);
                dx.hypot(z.im)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Capacity of a union of real intervals: a quarter of its length.
pub fn interval_capacity(set: &IntervalSet) -> f64 {
    set.length() / 4.0
}

/// The Ahlfors function of the complement of `set`, `(s - 1)/(s + 1)` with
/// `s = prod sqrt((z - c)/(z - d))` on the principal branch.
pub fn interval_ahlfors(set: &IntervalSet, z: Complex) -> Result<Complex> {
    if !z.is_finite() {
        return Err(Error::NonFinite);
    }
    if set.distance_to(z) <= SLIT_TOL {
        return Err(Error::OnSlit);
    }
    // (z - c)/(z - d) stays off (-inf, 0] away from the slit, so each
    // principal root has positive real part.
    let s: Complex = set
        .intervals
        .iter()
        .map(|&(c, d)| ((z - c) / (z - d)).sqrt())
        .product();
    Ok((s - 1.0) / (s + 1.0))
}

/// Upper end of the admissible amplitude range for [`rotational_map`].
pub fn rotational_bound(n: usize) -> f64 {
    let n = n as f64;
    n * (n - 1.0).powf((1.0 - n) / n)
}

/// `a z^{n-1} / (z^n - 1)`: residue `a/n` at every `n`-th root of unity.
pub fn rotational_map(n: usize, a: f64) -> Result<RationalMapPF> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "rotational degree {n} must be at least 2"
        )));
    }
    let bound = rotational_bound(n);
    if !(a > 0.0 && a < bound) {
        return Err(Error::AmplitudeOutOfRange { n, a, bound });
    }
    let residue = Complex::new(a / n as f64, 0.0);
    let terms = (0..n)
        .map(|j| Term::new(residue, Complex::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)))
        .collect();
    RationalMapPF::new(terms)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degree2Class {
    Ahlfors,
    NotAhlfors,
    Invalid,
}

/// Degree 2 maps `a1/(z-p1) + a2/(z-p2)` are Ahlfors exactly when both
/// residues are positive and `a1 + a2 < |p1 - p2|`.
pub fn degree2_classify(a1: Complex, a2: Complex, p1: Complex, p2: Complex) -> Degree2Class {
    if a1 == Complex::new(0.0, 0.0) || a2 == Complex::new(0.0, 0.0) || p1 == p2 {
        return Degree2Class::Invalid;
    }
    let positive = |a: Complex| a.im.abs() <= REAL_TOL && a.re > 0.0;
    if positive(a1) && positive(a2) && a1.re + a2.re < (p1 - p2).norm() {
        Degree2Class::Ahlfors
    } else {
        Degree2Class::NotAhlfors
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealFamilyClass {
    Ahlfors,
    NotAhlfors,
    NotApplicable,
}

/// For good maps with real poles and real residues, Ahlfors iff every
/// residue is positive.
pub fn real_family_classify(map: &RationalMapPF) -> RealFamilyClass {
    if !map.is_real(REAL_TOL) {
        return RealFamilyClass::NotApplicable;
    }
    match map.is_n_good(DEFAULT_GOODNESS_DELTA) {
        Ok(v) if v.status == GoodnessStatus::Good => {}
        _ => return RealFamilyClass::NotApplicable,
    }
    if map.residues().iter().all(|a| a.re > 0.0) {
        RealFamilyClass::Ahlfors
    } else {
        RealFamilyClass::NotAhlfors
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub t: f64,
    pub map: RationalMapPF,
}

/// A path of pole positions on `[0, 1]`, one coordinate per term.
pub type PolePath<'a> = &'a dyn Fn(f64) -> Vec<Complex>;

/// Samples the three-stage path from `start` to `end` through maps with
/// positive residues: shrink the residues of `start` until the largest is
/// `eps`, move the poles along `pole_path` while blending the residues, and
/// grow into `end`.
///
/// Without `pole_path`, poles move on straight lines; any coordinate that
/// comes within collision distance of another is rerouted through its
/// midpoint shifted by `0.1 i (j + 1)`.
pub fn positive_residue_path(
    start: &RationalMapPF,
    end: &RationalMapPF,
    eps: f64,
    samples: usize,
    pole_path: Option<PolePath<'_>>,
) -> Result<Vec<PathSample>> {
    let n = start.degree();
    if end.degree() != n {
        return Err(Error::DegreeMismatch(n, end.degree()));
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("a path needs at least 2 samples".into()));
    }
    let a0 = positive_residues(start)?;
    let a1 = positive_residues(end)?;
    for map in [start, end] {
        let v = map.is_n_good(DEFAULT_GOODNESS_DELTA)?;
        if v.status != GoodnessStatus::Good {
            return Err(Error::NotGood { margin: v.margin });
        }
    }
    let min_residue = a0.iter().chain(&a1).copied().fold(f64::INFINITY, f64::min);
    if !(eps > 0.0 && eps <= min_residue) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, {min_residue}], got {eps}"
        )));
    }
    let max0 = a0.iter().copied().fold(0.0, f64::max);
    let max1 = a1.iter().copied().fold(0.0, f64::max);
    let mu_end = eps / max0;
    let nu_start = eps / max1;

    let p0 = start.poles();
    let p1 = end.poles();
    let default_path = straight_path(&p0, &p1);
    let alpha = |s: f64| match pole_path {
        Some(f) => f(s),
        None => default_path.at(s),
    };
    if let Some(f) = pole_path {
        let (first, last) = (f(0.0), f(1.0));
        if first.len() != n || last.len() != n {
            return Err(Error::InvalidParameter(
                "pole path has the wrong dimension".into(),
            ));
        }
    }

    let mut out = Vec::with_capacity(samples);
    for i in 0..samples {
        let t = i as f64 / (samples - 1) as f64;
        let map = if i == 0 {
            start.clone()
        } else if i == samples - 1 {
            end.clone()
        } else if t <= 1.0 / 3.0 {
            let mu = 1.0 - 3.0 * t * (1.0 - mu_end);
            build(&a0.iter().map(|a| a * mu).collect::<Vec<_>>(), &p0, t)?
        } else if t >= 2.0 / 3.0 {
            let nu = nu_start + (3.0 * t - 2.0) * (1.0 - nu_start);
            build(&a1.iter().map(|a| a * nu).collect::<Vec<_>>(), &p1, t)?
        } else {
            let s = 3.0 * t - 1.0;
            let residues: Vec<f64> = a0
                .iter()
                .zip(&a1)
                .map(|(x, y)| (1.0 - s) * mu_end * x + s * nu_start * y)
                .collect();
            build(&residues, &alpha(s), t)?
        };
        out.push(PathSample { t, map });
    }
    Ok(out)
}

fn positive_residues(map: &RationalMapPF) -> Result<Vec<f64>> {
    map.residues()
        .iter()
        .map(|a| {
            if a.im.abs() <= REAL_TOL && a.re > 0.0 {
                Ok(a.re)
            } else {
                Err(Error::InvalidParameter(format!(
                    "residue {a} is not a positive real"
                )))
            }
        })
        .collect()
}

fn build(residues: &[f64], poles: &[Complex], t: f64) -> Result<RationalMapPF> {
    let terms = residues
        .iter()
        .zip(poles)
        .map(|(&a, &p)| Term::new(Complex::new(a, 0.0), p))
        .collect();
    RationalMapPF::new(terms).map_err(|e| match e {
        Error::DuplicatePole { .. } => Error::PoleCollision { t },
        other => other,
    })
}

struct StraightPath {
    from: Vec<Complex>,
    to: Vec<Complex>,
    detour: Vec<bool>,
}

impl StraightPath {
    fn at(&self, s: f64) -> Vec<Complex> {
        self.from
            .iter()
            .zip(&self.to)
            .enumerate()
            .map(|(j, (&a, &b))| {
                if !self.detour[j] {
                    return a + (b - a) * s;
                }
                let mid = (a + b) * 0.5 + Complex::new(0.0, DETOUR_OFFSET * (j + 1) as f64);
                if s <= 0.5 {
                    a + (mid - a) * (2.0 * s)
                } else {
                    mid + (b - mid) * (2.0 * s - 1.0)
                }
            })
            .collect()
    }

    /// Coordinates that come too close to another coordinate somewhere on
    /// a fine grid.
    fn colliding(&self) -> Vec<bool> {
        let n = self.from.len();
        let scale = 1.0
            + self
                .from
                .iter()
                .chain(&self.to)
                .map(|p| p.norm())
                .fold(0.0, f64::max);
        let mut hit = vec![false; n];
        for g in 0..=COLLISION_GRID {
            let pts = self.at(g as f64 / COLLISION_GRID as f64);
            for i in 0..n {
                for j in i + 1..n {
                    if (pts[i] - pts[j]).norm() < 1e-8 * scale {
                        hit[i] = true;
                        hit[j] = true;
                    }
                }
            }
        }
        hit
    }
}

fn straight_path(from: &[Complex], to: &[Complex]) -> StraightPath {
    let mut path = StraightPath {
        from: from.to_vec(),
        to: to.to_vec(),
        detour: vec![false; from.len()],
    };
    let hit = path.colliding();
    if hit.iter().any(|&h| h) {
        log::debug!("straight pole paths collide; rerouting {hit:?}");
        path.detour = hit;
    }
    path
}
