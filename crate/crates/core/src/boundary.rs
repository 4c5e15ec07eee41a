//! Parametrization of `dK = R^{-1}(|w| = 1)` by continuation of the roots of
//! `P - e^{it} Q` in `t`, and trapezoidal quadrature against arclength.
//!
//! Nodes are uniform in `t`. Since `R(z(t)) = e^{it}`, the speed of each
//! curve is `|dz/dt| = 1 / |R'(z)|`, so the periodic trapezoid rule in `t`
//! integrates analytic data on the curves with geometric convergence.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::format::sig;
use crate::numerics::{Complex, ComplexPolynomial};
use crate::ratmap::RationalMapPF;
use crate::{Error, Result};

pub const DEFAULT_NODES: usize = 4096;
pub const MIN_NODES: usize = 64;
pub const MAX_NODES: usize = 65536;
/// Second-nearest / nearest distance required to accept a continuation step.
pub const STABILITY_RATIO: f64 = 2.0;
const MAX_REFINE_DEPTH: u32 = 20;
const CLOSURE_TOL: f64 = 1e-6;
const RADIAL_STEPS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    pub t: f64,
    pub z: Complex,
    pub speed: f64,
}

/// One boundary component of `K`, sampled at uniform parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub component_id: usize,
    pub nodes: Vec<BoundaryNode>,
    pub enclosed_pole: Complex,
    /// Winding number about `enclosed_pole` (the curves run clockwise, so -1).
    pub winding: i32,
}

impl BoundaryCurve {
    pub fn arclength(&self) -> f64 {
        let h = 2.0 * PI / self.nodes.len() as f64;
        self.nodes.iter().map(|n| n.speed).sum::<f64>() * h
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySampling {
    pub curves: Vec<BoundaryCurve>,
    pub nodes_per_curve: usize,
    pub total_arclength: f64,
}

impl BoundarySampling {
    pub fn from_curves(curves: Vec<BoundaryCurve>) -> Self {
        let nodes_per_curve = curves.first().map_or(0, |c| c.nodes.len());
        let total_arclength = curves.iter().map(BoundaryCurve::arclength).sum();
        BoundarySampling {
            curves,
            nodes_per_curve,
            total_arclength,
        }
    }

    /// The circle `|z - center| = radius` traversed clockwise, which is the
    /// boundary traced for the one-term map `radius / (z - center)`.
    pub fn circle(center: Complex, radius: f64, nodes: usize) -> Self {
        let nodes = (0..nodes)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / nodes as f64;
                BoundaryNode {
                    t,
                    z: center + Complex::from_polar(radius, -t),
                    speed: radius,
                }
            })
            .collect();
        Self::from_curves(vec![BoundaryCurve {
            component_id: 0,
            nodes,
            enclosed_pole: center,
            winding: -1,
        }])
    }

    pub fn points(&self) -> impl Iterator<Item = &BoundaryNode> + '_ {
        self.curves.iter().flat_map(|c| c.nodes.iter())
    }

    /// Quadrature weight of every node: `speed * (2 pi / N) / (2 pi)`.
    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.curves.iter().flat_map(|c| {
            let n = c.nodes.len() as f64;
            c.nodes.iter().map(move |node| node.speed / n)
        })
    }

    /// Smallest distance from `p` to any node.
    pub fn distance_to(&self, p: Complex) -> f64 {
        self.points()
            .map(|n| (n.z - p).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// `(1 / 2 pi) * integral over dK of f conj(g) |dz|`, by the trapezoid rule on
/// each curve.
pub fn quad_inner<F, G>(sampling: &BoundarySampling, f: F, g: G) -> Complex
where
    F: Fn(Complex) -> Complex,
    G: Fn(Complex) -> Complex,
{
    sampling
        .points()
        .zip(sampling.weights())
        .map(|(node, w)| f(node.z) * g(node.z).conj() * w)
        .sum()
}

pub fn validate_node_count(nodes: usize) -> Result<()> {
    if nodes.is_power_of_two() && (MIN_NODES..=MAX_NODES).contains(&nodes) {
        Ok(())
    } else {
        Err(Error::InvalidNodeCount(nodes))
    }
}

/// Summary of one cycle of the monodromy of `t -> R^{-1}(e^{it})`.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleSummary {
    /// How many times the curve covers the unit circle.
    pub length: usize,
    /// Winding number of the curve about each pole of the map.
    pub windings: Vec<i32>,
}

impl CycleSummary {
    /// The curve goes once around exactly one pole and around no other.
    pub fn encloses_single_pole(&self) -> Option<usize> {
        let hits: Vec<usize> = (0..self.windings.len())
            .filter(|&j| self.windings[j] != 0)
            .collect();
        match hits.as_slice() {
            [j] if self.length == 1 && self.windings[*j].abs() == 1 => Some(*j),
            _ => None,
        }
    }
}

struct Tracker<'a> {
    map: &'a RationalMapPF,
    p: ComplexPolynomial,
    q: ComplexPolynomial,
}

impl<'a> Tracker<'a> {
    fn new(map: &'a RationalMapPF) -> Self {
        let (p, q) = map.as_fraction();
        Tracker { map, p, q }
    }

    fn solve(&self, w: Complex, guesses: Option<&[Complex]>) -> Result<Vec<Complex>> {
        self.map.preimages_with(&self.p, &self.q, w, guesses)
    }

    /// Continues `prev` (roots at `path(s0)`) to `path(s1)`, bisecting the
    /// step whenever the nearest-neighbour matching is not clearly stable.
    fn advance<W: Fn(f64) -> Complex>(
        &self,
        prev: &[Complex],
        path: &W,
        s0: f64,
        s1: f64,
        depth: u32,
    ) -> Result<Vec<Complex>> {
        let next = self.solve(path(s1), Some(prev))?;
        if let Some(order) = stable_matching(prev, &next) {
            return Ok(order.into_iter().map(|j| next[j]).collect());
        }
        if depth >= MAX_REFINE_DEPTH {
            return Err(Error::TrackingAmbiguity { t: s1 });
        }
        let mid = 0.5 * (s0 + s1);
        let halfway = self.advance(prev, path, s0, mid, depth + 1)?;
        self.advance(&halfway, path, mid, s1, depth + 1)
    }

    /// Roots of `R = 1`, ordered so that root `j` lies on the component
    /// around pole `j`.
    fn seed(&self) -> Result<Vec<Complex>> {
        let n = self.map.degree();
        let roots = self.solve(Complex::new(1.0, 0.0), None)?;
        let poles = self.map.poles();
        let mut slot = vec![usize::MAX; n];
        for (i, r) in roots.iter().enumerate() {
            let nearest = nearest_index(&poles, *r);
            if slot[nearest] == usize::MAX {
                slot[nearest] = i;
            }
        }
        if slot.iter().all(|&s| s != usize::MAX) {
            return Ok(slot.into_iter().map(|i| roots[i]).collect());
        }

        // Nearest-pole grouping failed; continue from w = +large, where the
        // roots sit at p_j + a_j / w, down the real axis to w = 1.
        let big = 1e6;
        let start: Vec<Complex> = self
            .map
            .terms()
            .iter()
            .map(|t| t.pole + t.residue / big)
            .collect();
        let start = self.solve(Complex::new(big, 0.0), Some(&start))?;
        let start = match stable_matching(
            &self
                .map
                .terms()
                .iter()
                .map(|t| t.pole + t.residue / big)
                .collect::<Vec<_>>(),
            &start,
        ) {
            Some(order) => order.into_iter().map(|j| start[j]).collect::<Vec<_>>(),
            None => {
                return Err(Error::ComponentCountMismatch {
                    expected: n,
                    found: distinct(&slot),
                })
            }
        };
        let path = |s: f64| Complex::new(big.powf(1.0 - s), 0.0);
        let mut z = start;
        for k in 0..RADIAL_STEPS {
            let s0 = k as f64 / RADIAL_STEPS as f64;
            let s1 = (k + 1) as f64 / RADIAL_STEPS as f64;
            z = self
                .advance(&z, &path, s0, s1, 0)
                .map_err(|_| Error::ComponentCountMismatch {
                    expected: n,
                    found: distinct(&slot),
                })?;
        }
        Ok(z)
    }

    /// Tracks all roots once around the unit circle. Returns the samples
    /// (`samples[i][c]` at `t_i`) and the permutation taking each start
    /// root to the root it reaches at `t = 2 pi`.
    fn full_loop(&self, nodes: usize) -> Result<(Vec<Vec<Complex>>, Vec<usize>)> {
        validate_node_count(nodes)?;
        let seed = self.seed()?;
        let path = |t: f64| Complex::from_polar(1.0, t);
        let h = 2.0 * PI / nodes as f64;
        let mut samples = Vec::with_capacity(nodes);
        samples.push(seed.clone());
        let mut z = seed.clone();
        for i in 0..nodes {
            z = self.advance(&z, &path, i as f64 * h, (i + 1) as f64 * h, 0)?;
            if i + 1 < nodes {
                samples.push(z.clone());
            }
        }
        let n = seed.len();
        let mut perm = vec![usize::MAX; n];
        for (c, end) in z.iter().enumerate() {
            let j = nearest_index(&seed, *end);
            if (seed[j] - end).norm() > CLOSURE_TOL || perm[c] != usize::MAX {
                return Err(Error::TrackingAmbiguity { t: 2.0 * PI });
            }
            perm[c] = j;
        }
        let mut seen = vec![false; n];
        for &j in &perm {
            if seen[j] {
                return Err(Error::TrackingAmbiguity { t: 2.0 * PI });
            }
            seen[j] = true;
        }
        Ok((samples, perm))
    }
}

/// Traces the `n` boundary curves of `K` with `nodes` points each.
///
/// Fails with [`Error::ComponentCountMismatch`] unless the level set splits
/// into `n` closed curves, each winding once around its own pole and around
/// no other, which is exactly the n-good situation.
pub fn trace(map: &RationalMapPF, nodes: usize) -> Result<BoundarySampling> {
    let tracker = Tracker::new(map);
    let (samples, perm) = tracker.full_loop(nodes)?;
    let n = map.degree();
    let cycles = cycles_of(&perm);
    if cycles.len() != n {
        return Err(Error::ComponentCountMismatch {
            expected: n,
            found: cycles.len(),
        });
    }
    let poles = map.poles();
    let h = 2.0 * PI / nodes as f64;
    let mut curves = Vec::with_capacity(n);
    for c in 0..n {
        let zs: Vec<Complex> = samples.iter().map(|row| row[c]).collect();
        let windings: Vec<i32> = poles.iter().map(|&p| winding_number(&zs, p)).collect();
        let summary = CycleSummary { length: 1, windings };
        if summary.encloses_single_pole() != Some(c) {
            let found = count_separated(&tracker, &samples, &perm);
            return Err(Error::ComponentCountMismatch { expected: n, found });
        }
        let nodes = zs
            .iter()
            .enumerate()
            .map(|(i, &z)| BoundaryNode {
                t: i as f64 * h,
                z,
                speed: map.derivative(z).norm().recip(),
            })
            .collect();
        curves.push(BoundaryCurve {
            component_id: c,
            nodes,
            enclosed_pole: poles[c],
            winding: summary.windings[c],
        });
    }
    Ok(BoundarySampling::from_curves(curves))
}

/// The closed curves making up `R^{-1}(|w| = 1)`, found by following the
/// roots around the circle once. For n-good maps this is `n` cycles of
/// length one, each around a single pole.
pub fn monodromy(map: &RationalMapPF, nodes: usize) -> Result<Vec<CycleSummary>> {
    let tracker = Tracker::new(map);
    let (samples, perm) = tracker.full_loop(nodes)?;
    Ok(summaries(&tracker, &samples, &perm))
}

fn summaries(tracker: &Tracker<'_>, samples: &[Vec<Complex>], perm: &[usize]) -> Vec<CycleSummary> {
    let poles = tracker.map.poles();
    cycles_of(perm)
        .into_iter()
        .map(|cycle| {
            let zs: Vec<Complex> = cycle
                .iter()
                .flat_map(|&c| samples.iter().map(move |row| row[c]))
                .collect();
            CycleSummary {
                length: cycle.len(),
                windings: poles.iter().map(|&p| winding_number(&zs, p)).collect(),
            }
        })
        .collect()
}

fn count_separated(tracker: &Tracker<'_>, samples: &[Vec<Complex>], perm: &[usize]) -> usize {
    summaries(tracker, samples, perm)
        .iter()
        .filter(|s| s.encloses_single_pole().is_some())
        .count()
}

fn cycles_of(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut c = start;
        while !seen[c] {
            seen[c] = true;
            cycle.push(c);
            c = perm[c];
        }
        out.push(cycle);
    }
    out
}

fn winding_number(zs: &[Complex], p: Complex) -> i32 {
    let mut total = 0.0;
    for i in 0..zs.len() {
        let a = zs[i] - p;
        let b = zs[(i + 1) % zs.len()] - p;
        total += (b / a).arg();
    }
    (total / (2.0 * PI)).round() as i32
}

fn nearest_index(points: &[Complex], z: Complex) -> usize {
    points
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - z).norm().total_cmp(&(b.1 - z).norm()))
        .map(|(i, _)| i)
        .expect("non-empty")
}

fn distinct(slot: &[usize]) -> usize {
    slot.iter().filter(|&&s| s != usize::MAX).count()
}

/// For each previous root, the index of its nearest new root, provided the
/// assignment is a bijection and every nearest neighbour is at least
/// [`STABILITY_RATIO`] times closer than the runner-up.
fn stable_matching(prev: &[Complex], next: &[Complex]) -> Option<Vec<usize>> {
    let n = prev.len();
    if next.len() != n {
        return None;
    }
    let mut taken = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for &z in prev {
        let mut best = (usize::MAX, f64::INFINITY);
        let mut second = f64::INFINITY;
        for (j, &y) in next.iter().enumerate() {
            let d = (y - z).norm();
            if d < best.1 {
                second = best.1;
                best = (j, d);
            } else if d < second {
                second = d;
            }
        }
        if best.0 == usize::MAX || taken[best.0] {
            return None;
        }
        if n > 1 && !(second >= STABILITY_RATIO * best.1) {
            return None;
        }
        taken[best.0] = true;
        order.push(best.0);
    }
    Some(order)
}

/// CSV with columns `component,t,re,im,speed`, 15 significant digits.
pub fn emit_csv(sampling: &BoundarySampling) -> String {
    let mut out = String::from("component,t,re,im,speed\n");
    for curve in &sampling.curves {
        for node in &curve.nodes {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                curve.component_id,
                sig(node.t, 15),
                sig(node.z.re, 15),
                sig(node.z.im, 15),
                sig(node.speed, 15)
            );
        }
    }
    out
}

/// SVG drawing with one closed polyline per component. The y axis is
/// flipped so the picture has the usual orientation of the complex plane.
pub fn emit_svg(sampling: &BoundarySampling) -> String {
    let (mut xmin, mut xmax, mut ymin, mut ymax) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for node in sampling.points() {
        xmin = xmin.min(node.z.re);
        xmax = xmax.max(node.z.re);
        ymin = ymin.min(-node.z.im);
        ymax = ymax.max(-node.z.im);
    }
    if !xmin.is_finite() {
        (xmin, xmax, ymin, ymax) = (-1.0, 1.0, -1.0, 1.0);
    }
    let span = (xmax - xmin).max(ymax - ymin).max(1e-12);
    let margin = 0.05 * span;
    let (x0, y0) = (xmin - margin, ymin - margin);
    let (w, h) = (xmax - xmin + 2.0 * margin, ymax - ymin + 2.0 * margin);
    let stroke = 0.004 * span;
    let pixel_height = (600.0 * h / w).round().max(1.0);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="600" height="{}" viewBox="{} {} {} {}">"#,
        pixel_height,
        sig(x0, 15),
        sig(y0, 15),
        sig(w, 15),
        sig(h, 15)
    );
    for curve in &sampling.curves {
        let mut points = String::new();
        for node in curve.nodes.iter().chain(curve.nodes.first()) {
            let _ = write!(points, "{},{} ", sig(node.z.re, 10), sig(-node.z.im, 10));
        }
        let _ = writeln!(
            out,
            r#"  <polyline id="component-{}" fill="none" stroke="black" stroke-width="{}" points="{}"/>"#,
            curve.component_id,
            sig(stroke, 6),
            points.trim_end()
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn node_count_validation() {
        assert!(validate_node_count(64).is_ok());
        assert!(validate_node_count(65536).is_ok());
        assert_eq!(validate_node_count(32), Err(Error::InvalidNodeCount(32)));
        assert_eq!(validate_node_count(100), Err(Error::InvalidNodeCount(100)));
        assert_eq!(validate_node_count(131072), Err(Error::InvalidNodeCount(131072)));
    }

    #[test]
    fn one_term_map_traces_a_circle() {
        let (a, p) = (0.7, c(1.0, -0.5));
        let map = RationalMapPF::from_pairs(&[(c(a, 0.0), p)]).unwrap();
        let s = trace(&map, 256).unwrap();
        assert_eq!(s.curves.len(), 1);
        for (i, node) in s.curves[0].nodes.iter().enumerate() {
            let t = 2.0 * PI * i as f64 / 256.0;
            assert!((node.z - (p + Complex::from_polar(a, -t))).norm() < 1e-13);
            assert!((node.speed - a).abs() < 1e-13);
        }
        assert!((s.total_arclength - 2.0 * PI * a).abs() < 1e-12);
        assert_eq!(s.curves[0].winding, -1);
    }

    #[test]
    fn disk_quadrature_oracles() {
        let (a, p) = (1.7, c(-0.4, 2.0));
        let s = BoundarySampling::circle(p, a, 4096);
        let one = |_| c(1.0, 0.0);
        let inv = move |z: Complex| (z - p).inv();
        assert!((quad_inner(&s, one, one) - c(a, 0.0)).norm() < 1e-12);
        assert!((quad_inner(&s, inv, inv) - c(1.0 / a, 0.0)).norm() < 1e-12);
        assert!(quad_inner(&s, one, inv).norm() < 1e-12);
    }

    #[test]
    fn two_component_examples() {
        for pairs in [[(0.3, -1.0), (0.2, 1.0)], [(0.95, -1.0), (0.98, 1.0)]] {
            let map = RationalMapPF::from_real(&pairs).unwrap();
            let s = trace(&map, 1024).unwrap();
            assert_eq!(s.curves.len(), 2);
            for curve in &s.curves {
                assert_eq!(curve.nodes.len(), 1024);
                assert!(curve.nodes.iter().all(|n| n.speed > 0.0));
            }
        }
    }

    #[test]
    fn rotational_example_is_symmetric() {
        let pairs: Vec<_> = (0..3)
            .map(|j| {
                (
                    c(1.0 / 3.0, 0.0),
                    Complex::from_polar(1.0, 2.0 * PI * j as f64 / 3.0),
                )
            })
            .collect();
        let map = RationalMapPF::from_pairs(&pairs).unwrap();
        let s = trace(&map, 512).unwrap();
        assert_eq!(s.curves.len(), 3);
        let omega = Complex::from_polar(1.0, 2.0 * PI / 3.0);
        for node in s.points() {
            // the rotated node stays on the level set, with the same speed
            let rotated = node.z * omega;
            assert!((map.eval(rotated).unwrap().norm() - 1.0).abs() < 1e-10);
            assert!((map.derivative(rotated).norm().recip() - node.speed).abs() < 1e-10);
        }
        let lengths: Vec<f64> = s.curves.iter().map(BoundaryCurve::arclength).collect();
        assert!((lengths[0] - lengths[1]).abs() < 1e-10 && (lengths[1] - lengths[2]).abs() < 1e-10);
    }

    #[test]
    fn not_good_degree_two_fails_to_separate() {
        let map = RationalMapPF::from_real(&[(0.6, 0.0), (0.6, 1.0)]).unwrap();
        assert!(matches!(
            trace(&map, 256),
            Err(Error::ComponentCountMismatch { .. })
        ));
        let cycles = monodromy(&map, 256).unwrap();
        assert!(
            cycles
                .iter()
                .filter(|c| c.encloses_single_pole().is_some())
                .count()
                < 2
        );
    }

    #[test]
    fn csv_layout() {
        let s = BoundarySampling::circle(c(0.0, 0.0), 1.0, 4);
        let csv = emit_csv(&s);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "component,t,re,im,speed");
        assert_eq!(lines.len(), 5);
        assert!(lines[1..].iter().all(|l| l.starts_with("0,")));
        assert_eq!(lines[1], "0,0,1,0,1");
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn svg_has_one_polyline_per_component() {
        let map = RationalMapPF::from_real(&[(0.3, -1.0), (0.2, 1.0)]).unwrap();
        let svg = emit_svg(&trace(&map, 256).unwrap());
        assert_eq!(svg.matches("<polyline").count(), 2);
        let map = RationalMapPF::from_real(&[(0.2, -2.0), (0.1, 0.0), (0.4, 5.0)]).unwrap();
        let svg = emit_svg(&trace(&map, 256).unwrap());
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
