//! Upper and lower bounds for the analytic capacity of `K`.
//!
//! Both bounds come from the same quadratic form on the real span of
//! `{g, i g}` for `g` in the basis `(z - p)^{-j}`, `p` in a point set `S`,
//! `1 <= j <= k`, with inner product `<f, h> = Re (1/2pi) int f conj(h) |dz|`:
//!
//! * upper: `min <1 + h, 1 + h> = c0 - w^T G^{-1} w`,
//! * lower: `max 2 Re h'(inf) - <h, h> = b^T G^{-1} b`,
//!
//! where `G` is the Gram matrix, `w_r = <1, phi_r>` and `b_r = Re phi_r'(inf)`.
//!
//! [`upper_bound`] and [`lower_bound`] solve the assembled [`GramSystem`]
//! by Cholesky. [`bounds_sequence`] solves the same least-squares problems
//! through a Householder factorization of the quadrature-weighted sample
//! matrix, which keeps the condition number from being squared; this
//! matters for large `k`.

use rayon::prelude::*;

use crate::boundary::{self, BoundarySampling};
use crate::numerics::Complex;
use crate::ratmap::{GoodnessStatus, RationalMapPF, DEFAULT_GOODNESS_DELTA};
use crate::{Error, Result};

/// Gram systems with a larger (equilibrated) condition estimate are not
/// certified.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Relative size of the ridge added to an ill-conditioned Gram matrix.
pub const RIDGE_FACTOR: f64 = 1e-14;
/// Default tolerance used by [`verdict`].
pub const DEFAULT_VERDICT_TOL: f64 = 1e-6;
const REAL_TOL: f64 = 1e-12;
/// Columns whose remaining norm falls below this (after unit scaling) are
/// treated as linearly dependent.
const DEPENDENT_COLUMN: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisElement {
    pub point_index: usize,
    pub point: Complex,
    /// `j` in `(z - p)^{-j}`.
    pub order: usize,
}

/// The basis `(z - p)^{-j}`, ordered by point and then by order.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    pub points: Vec<Complex>,
    pub max_order: usize,
    pub elements: Vec<BasisElement>,
}

impl BasisSpec {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Basis of order `k` on the poles of `map`, or on `points` when given.
pub fn enumerate_basis(map: &RationalMapPF, k: usize, points: Option<&[Complex]>) -> Result<BasisSpec> {
    if k < 1 {
        return Err(Error::EmptyBasis);
    }
    let points = points.map_or_else(|| map.poles(), <[Complex]>::to_vec);
    if points.is_empty() {
        return Err(Error::EmptyBasis);
    }
    let elements = points
        .iter()
        .enumerate()
        .flat_map(|(i, &p)| {
            (1..=k).map(move |order| BasisElement {
                point_index: i,
                point: p,
                order,
            })
        })
        .collect();
    Ok(BasisSpec {
        points,
        max_order: k,
        elements,
    })
}

/// The realified quadratic form. Slot `2r` holds the real coefficient of
/// basis element `r` and slot `2r + 1` its imaginary coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSystem {
    size: usize,
    matrix: Vec<f64>,
    pub linear: Vec<f64>,
    pub derivative: Vec<f64>,
    pub constant: f64,
}

impl GramSystem {
    /// Number of real unknowns (twice the number of basis elements).
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, r: usize, s: usize) -> f64 {
        self.matrix[r * self.size + s]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    /// Realifies a Hermitian Gram matrix `H[r][s] = (g_r, g_s)` together
    /// with `q_r = (1, g_r)` and the derivative-at-infinity indicator.
    pub fn from_complex(
        hermitian: &[Vec<Complex>],
        ones: &[Complex],
        simple: &[bool],
        constant: f64,
    ) -> Self {
        let m = hermitian.len();
        let size = 2 * m;
        let mut matrix = vec![0.0; size * size];
        for r in 0..m {
            for s in 0..m {
                let h = hermitian[r][s];
                // <g, g'> = Re h, <g, i g'> = Im h, <i g, g'> = -Im h, <i g, i g'> = Re h
                matrix[(2 * r) * size + 2 * s] = h.re;
                matrix[(2 * r) * size + 2 * s + 1] = h.im;
                matrix[(2 * r + 1) * size + 2 * s] = -h.im;
                matrix[(2 * r + 1) * size + 2 * s + 1] = h.re;
            }
        }
        for r in 0..size {
            for s in 0..r {
                let avg = 0.5 * (matrix[r * size + s] + matrix[s * size + r]);
                matrix[r * size + s] = avg;
                matrix[s * size + r] = avg;
            }
        }
        let mut linear = vec![0.0; size];
        let mut derivative = vec![0.0; size];
        for r in 0..m {
            linear[2 * r] = ones[r].re;
            linear[2 * r + 1] = ones[r].im;
            derivative[2 * r] = if simple[r] { 1.0 } else { 0.0 };
        }
        GramSystem {
            size,
            matrix,
            linear,
            derivative,
            constant,
        }
    }
}

/// Integrates the basis against itself and against the constant 1 over
/// the traced boundary.
pub fn assemble_gram(sampling: &BoundarySampling, basis: &BasisSpec) -> Result<GramSystem> {
    if basis.is_empty() {
        return Err(Error::EmptyBasis);
    }
    check_basis_points(sampling, &basis.points)?;
    let weights: Vec<f64> = sampling.weights().collect();
    let zs: Vec<Complex> = sampling.points().map(|n| n.z).collect();
    let values: Vec<Vec<Complex>> = basis
        .elements
        .par_iter()
        .map(|e| {
            zs.iter()
                .map(|&z| (z - e.point).inv().powi(e.order as i32))
                .collect()
        })
        .collect();
    let m = values.len();
    let hermitian: Vec<Vec<Complex>> = (0..m)
        .into_par_iter()
        .map(|r| {
            (0..m)
                .map(|s| {
                    values[r]
                        .iter()
                        .zip(&values[s])
                        .zip(&weights)
                        .map(|((a, b), w)| a * b.conj() * w)
                        .sum()
                })
                .collect()
        })
        .collect();
    let ones: Vec<Complex> = values
        .iter()
        .map(|v| v.iter().zip(&weights).map(|(g, w)| g.conj() * w).sum())
        .collect();
    let simple: Vec<bool> = basis.elements.iter().map(|e| e.order == 1).collect();
    let constant = weights.iter().sum();
    Ok(GramSystem::from_complex(&hermitian, &ones, &simple, constant))
}

fn check_basis_points(sampling: &BoundarySampling, points: &[Complex]) -> Result<()> {
    for (index, &p) in points.iter().enumerate() {
        let scale = sampling.total_arclength.max(1e-300);
        if sampling.distance_to(p) <= 1e-10 * scale {
            return Err(Error::BasisPointOnBoundary { index });
        }
    }
    Ok(())
}

/// A bound together with how trustworthy its linear solve was.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundEstimate {
    pub value: f64,
    /// False when the condition estimate exceeded [`CONDITION_LIMIT`] and a
    /// ridge had to be added.
    pub certified: bool,
    /// Condition estimate of the (diagonally equilibrated) Gram matrix.
    pub condition: f64,
}

/// `c0 - w^T G^{-1} w`, the minimum of `<1 + h, 1 + h>`.
pub fn upper_bound(gram: &GramSystem) -> Result<BoundEstimate> {
    let solver = EquilibratedCholesky::new(gram)?;
    let y = solver.forward(&gram.linear);
    Ok(BoundEstimate {
        value: gram.constant - dot(&y, &y),
        certified: solver.certified,
        condition: solver.condition,
    })
}

/// `b^T G^{-1} b`, the maximum of `2 Re h'(inf) - <h, h>`.
pub fn lower_bound(gram: &GramSystem) -> Result<BoundEstimate> {
    let solver = EquilibratedCholesky::new(gram)?;
    let y = solver.forward(&gram.derivative);
    Ok(BoundEstimate {
        value: dot(&y, &y),
        certified: solver.certified,
        condition: solver.condition,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Cholesky factor `L` of `D G D` with `D = diag(G)^{-1/2}`.
struct EquilibratedCholesky {
    size: usize,
    scale: Vec<f64>,
    factor: Vec<f64>,
    certified: bool,
    condition: f64,
}

impl EquilibratedCholesky {
    fn new(gram: &GramSystem) -> Result<Self> {
        let n = gram.size;
        let mut scale = Vec::with_capacity(n);
        for i in 0..n {
            let d = gram.get(i, i);
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite);
            }
            scale.push(d.sqrt().recip());
        }
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = scale[i] * gram.get(i, j) * scale[j];
            }
        }

        let mut ridge = 0.0;
        let base_ridge = RIDGE_FACTOR * (0..n).map(|i| a[i * n + i]).sum::<f64>() / n as f64;
        let mut certified = true;
        let mut condition = f64::INFINITY;
        for _ in 0..8 {
            let mut shifted = a.clone();
            for i in 0..n {
                shifted[i * n + i] += ridge;
            }
            if let Some(factor) = cholesky(&shifted, n) {
                condition = condition_estimate(&shifted, &factor, n);
                if condition <= CONDITION_LIMIT || ridge > 0.0 {
                    return Ok(EquilibratedCholesky {
                        size: n,
                        scale,
                        factor,
                        certified,
                        condition,
                    });
                }
            }
            certified = false;
            ridge = if ridge == 0.0 { base_ridge } else { ridge * 100.0 };
        }
        log::debug!("Gram matrix not factorizable (condition {condition:e})");
        Err(Error::NotPositiveDefinite)
    }

    /// `L^{-1} D v`, so that `v^T G^{-1} v` is its squared norm.
    fn forward(&self, v: &[f64]) -> Vec<f64> {
        let n = self.size;
        let rhs: Vec<f64> = v.iter().zip(&self.scale).map(|(x, s)| x * s).collect();
        forward_substitute(&self.factor, n, &rhs)
    }
}

fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    Some(l)
}

fn forward_substitute(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    y
}

fn backward_substitute(l: &[f64], n: usize, y: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    x
}

/// Power iteration for the largest eigenvalue, inverse iteration through
/// the Cholesky factor for the smallest.
fn condition_estimate(a: &[f64], l: &[f64], n: usize) -> f64 {
    let start: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    let normalize = |v: &mut Vec<f64>| {
        let s = dot(v, v).sqrt();
        v.iter_mut().for_each(|x| *x /= s);
    };
    let mut v = start.clone();
    normalize(&mut v);
    let mut largest = 0.0;
    for _ in 0..40 {
        let mut next = vec![0.0; n];
        for i in 0..n {
            next[i] = dot(&a[i * n..(i + 1) * n], &v);
        }
        largest = dot(&next, &v);
        v = next;
        normalize(&mut v);
    }
    let mut v = start;
    normalize(&mut v);
    let mut inverse_largest = 0.0;
    for _ in 0..40 {
        let next = backward_substitute(l, n, &forward_substitute(l, n, &v));
        inverse_largest = dot(&next, &v);
        v = next;
        normalize(&mut v);
    }
    if inverse_largest > 0.0 {
        largest * inverse_largest
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsRow {
    pub k: usize,
    pub lower: f64,
    pub upper: f64,
    pub certified: bool,
}

/// The bracket `l_k <= gamma(K) <= u_k` for a list of orders `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityBounds {
    pub rows: Vec<BoundsRow>,
    /// `R'(inf)`, the sum of the residues.
    pub derivative_at_infinity: Complex,
    pub map: RationalMapPF,
    pub nodes: usize,
}

impl CapacityBounds {
    pub fn certified(&self) -> bool {
        self.rows.iter().all(|r| r.certified)
    }

    pub fn last(&self) -> Option<&BoundsRow> {
        self.rows.last()
    }
}

/// Bounds for `k = 1..=kmax` from one trace with `nodes` points per curve.
pub fn bounds_sequence(map: &RationalMapPF, kmax: usize, nodes: usize) -> Result<CapacityBounds> {
    let orders: Vec<usize> = (1..=kmax).collect();
    bounds_for_orders(map, &orders, nodes)
}

/// Bounds for an arbitrary increasing list of orders.
pub fn bounds_for_orders(map: &RationalMapPF, orders: &[usize], nodes: usize) -> Result<CapacityBounds> {
    let goodness = map.is_n_good(DEFAULT_GOODNESS_DELTA)?;
    if goodness.status != GoodnessStatus::Good {
        return Err(Error::NotGood {
            margin: goodness.margin,
        });
    }
    let sampling = boundary::trace(map, nodes)?;
    bounds_from_sampling(map, &sampling, orders, None)
}

/// Bounds from an existing boundary sampling. `points` overrides the pole
/// set as the basis centres.
pub fn bounds_from_sampling(
    map: &RationalMapPF,
    sampling: &BoundarySampling,
    orders: &[usize],
    points: Option<&[Complex]>,
) -> Result<CapacityBounds> {
    let kmax = *orders.iter().max().ok_or(Error::EmptyBasis)?;
    if orders.contains(&0) {
        return Err(Error::EmptyBasis);
    }
    let points = points.map_or_else(|| map.poles(), <[Complex]>::to_vec);
    check_basis_points(sampling, &points)?;
    let factored = NestedLeastSquares::new(sampling, &points, kmax);
    let rows = orders.iter().map(|&k| factored.row(k)).collect();
    Ok(CapacityBounds {
        rows,
        derivative_at_infinity: map.derivative_at_infinity(),
        map: map.clone(),
        nodes: sampling.nodes_per_curve,
    })
}

/// Same rows as [`bounds_from_sampling`] but through the assembled Gram
/// matrix and Cholesky. Used as an independent check of the factored route.
pub fn gram_bounds(
    map: &RationalMapPF,
    sampling: &BoundarySampling,
    orders: &[usize],
) -> Result<CapacityBounds> {
    let mut rows = Vec::with_capacity(orders.len());
    for &k in orders {
        let basis = enumerate_basis(map, k, None)?;
        let gram = assemble_gram(sampling, &basis)?;
        let lower = lower_bound(&gram)?;
        let upper = upper_bound(&gram)?;
        rows.push(BoundsRow {
            k,
            lower: lower.value,
            upper: upper.value,
            certified: lower.certified && upper.certified,
        });
    }
    Ok(CapacityBounds {
        rows,
        derivative_at_infinity: map.derivative_at_infinity(),
        map: map.clone(),
        nodes: sampling.nodes_per_curve,
    })
}

/// Doubles the node count, starting from `nodes`, until no bound moves by
/// more than `tol`, or [`boundary::MAX_NODES`] is reached.
pub fn bounds_adaptive(
    map: &RationalMapPF,
    orders: &[usize],
    nodes: usize,
    tol: f64,
) -> Result<CapacityBounds> {
    boundary::validate_node_count(nodes)?;
    let mut current = bounds_for_orders(map, orders, nodes)?;
    let mut n = nodes;
    while n < boundary::MAX_NODES {
        n *= 2;
        let finer = bounds_for_orders(map, orders, n)?;
        let moved = current
            .rows
            .iter()
            .zip(&finer.rows)
            .map(|(a, b)| (a.lower - b.lower).abs().max((a.upper - b.upper).abs()))
            .fold(0.0, f64::max);
        current = finer;
        if moved <= tol {
            return Ok(current);
        }
        log::info!("bounds moved by {moved:e} at {n} nodes; refining");
    }
    log::warn!("bounds not resolved to {tol:e} at {n} nodes");
    for row in &mut current.rows {
        row.certified = false;
    }
    Ok(current)
}

/// Householder factorization of the weighted sample matrix
/// `A[i][c] = sqrt(w_i) phi_c(z_i)`, columns ordered by order `j` first so
/// that every `F_k` is a leading block.
struct NestedLeastSquares {
    points: usize,
    /// Upper triangle, `r[c][i]` for `i <= c`, indexed by column.
    r: Vec<Vec<Complex>>,
    /// Pivot row used by each column, `None` if the column was dependent.
    pivot: Vec<Option<usize>>,
    /// `Q^H e` for the weight vector `e_i = sqrt(w_i)`.
    projected: Vec<Complex>,
    /// `h'(inf)` of each scaled column.
    derivative: Vec<f64>,
}

impl NestedLeastSquares {
    fn new(sampling: &BoundarySampling, points: &[Complex], kmax: usize) -> Self {
        let zs: Vec<Complex> = sampling.points().map(|n| n.z).collect();
        let roots: Vec<f64> = sampling.weights().map(f64::sqrt).collect();
        // Rescale (z - p) by the distance from p to the boundary so that
        // high powers neither overflow nor underflow.
        let radius: Vec<f64> = points.iter().map(|&p| sampling.distance_to(p)).collect();

        let mut columns: Vec<Vec<Complex>> = Vec::with_capacity(points.len() * kmax);
        let mut derivative = Vec::with_capacity(points.len() * kmax);
        for order in 1..=kmax {
            let cols: Vec<(Vec<Complex>, f64)> = points
                .par_iter()
                .zip(&radius)
                .map(|(&p, &rho)| {
                    let mut col: Vec<Complex> = zs
                        .iter()
                        .zip(&roots)
                        .map(|(&z, &s)| ((z - p) / rho).inv().powi(order as i32) * s)
                        .collect();
                    let norm = col.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                    col.iter_mut().for_each(|x| *x /= norm);
                    let d = if order == 1 { rho / norm } else { 0.0 };
                    (col, d)
                })
                .collect();
            for (col, d) in cols {
                columns.push(col);
                derivative.push(d);
            }
        }

        let mut rhs: Vec<Complex> = roots.iter().map(|&s| Complex::new(s, 0.0)).collect();
        let ncols = columns.len();
        let rows = zs.len();
        let mut r = vec![Vec::new(); ncols];
        let mut pivot = vec![None; ncols];
        let mut next_row = 0;
        for c in 0..ncols {
            let (head, tail) = columns.split_at_mut(c + 1);
            let col = &mut head[c];
            let tail_norm = col[next_row..].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if next_row >= rows || tail_norm <= DEPENDENT_COLUMN {
                r[c] = col[..next_row].to_vec();
                continue;
            }
            // Reflector v = x + e^{i arg x0} |x| e_0, applied as I - 2 v v^H / |v|^2.
            let x0 = col[next_row];
            let phase = if x0.norm() > 0.0 {
                x0 / x0.norm()
            } else {
                Complex::new(1.0, 0.0)
            };
            let alpha = -phase * tail_norm;
            let mut v: Vec<Complex> = col[next_row..].to_vec();
            v[0] -= alpha;
            let vnorm2: f64 = v.iter().map(|x| x.norm_sqr()).sum();
            let apply = |target: &mut [Complex]| {
                let part = &mut target[next_row..];
                let proj: Complex = v.iter().zip(part.iter()).map(|(a, b)| a.conj() * b).sum();
                let f = proj * (2.0 / vnorm2);
                for (t, a) in part.iter_mut().zip(&v) {
                    *t -= a * f;
                }
            };
            tail.par_iter_mut().for_each(|t| apply(t));
            apply(&mut rhs);
            let mut upper = col[..next_row].to_vec();
            upper.push(alpha);
            r[c] = upper;
            pivot[c] = Some(next_row);
            next_row += 1;
        }

        NestedLeastSquares {
            points: points.len(),
            r,
            pivot,
            projected: rhs,
            derivative,
        }
    }

    fn row(&self, k: usize) -> BoundsRow {
        let ncols = self.points * k;
        let active: Vec<usize> = (0..ncols).filter(|&c| self.pivot[c].is_some()).collect();
        let rank = active.len();
        let upper: f64 = self.projected[rank..].iter().map(|x| x.norm_sqr()).sum();

        // Solve R^H y = b over the independent columns; lower = |y|^2.
        let mut y = vec![Complex::new(0.0, 0.0); rank];
        for (a, &c) in active.iter().enumerate() {
            let mut s = Complex::new(self.derivative[c], 0.0);
            for (b, &cc) in active[..a].iter().enumerate() {
                let row = self.pivot[cc].expect("active");
                s -= self.r[c][row].conj() * y[b];
            }
            let diag = self.r[c][self.pivot[c].expect("active")];
            y[a] = s / diag.conj();
        }
        let lower: f64 = y.iter().map(|x| x.norm_sqr()).sum();

        let condition = self.gram_condition(&active);
        BoundsRow {
            k,
            lower,
            upper,
            certified: rank == ncols && condition <= CONDITION_LIMIT,
        }
    }

    /// Estimated condition number of `R^H R` (the equivalent Gram matrix)
    /// restricted to `active` columns.
    #[allow(clippy::needless_range_loop)]
    fn gram_condition(&self, active: &[usize]) -> f64 {
        let n = active.len();
        if n == 0 {
            return 1.0;
        }
        let entry = |i: usize, j: usize| -> Complex {
            // R[row_i][col_j]
            let col = active[j];
            let row = self.pivot[active[i]].expect("active");
            self.r[col].get(row).copied().unwrap_or(Complex::new(0.0, 0.0))
        };
        let rmul = |x: &[Complex]| -> Vec<Complex> {
            (0..n).map(|i| (i..n).map(|j| entry(i, j) * x[j]).sum()).collect()
        };
        let rhmul = |x: &[Complex]| -> Vec<Complex> {
            (0..n)
                .map(|j| (0..=j).map(|i| entry(i, j).conj() * x[i]).sum())
                .collect()
        };
        let solve_rh = |b: &[Complex]| -> Vec<Complex> {
            let mut y = vec![Complex::new(0.0, 0.0); n];
            for j in 0..n {
                let mut s = b[j];
                for i in 0..j {
                    s -= entry(i, j).conj() * y[i];
                }
                y[j] = s / entry(j, j).conj();
            }
            y
        };
        let solve_r = |b: &[Complex]| -> Vec<Complex> {
            let mut x = vec![Complex::new(0.0, 0.0); n];
            for i in (0..n).rev() {
                let mut s = b[i];
                for j in i + 1..n {
                    s -= entry(i, j) * x[j];
                }
                x[i] = s / entry(i, i);
            }
            x
        };
        let norm = |v: &[Complex]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let start: Vec<Complex> = (0..n)
            .map(|i| {
                Complex::new(
                    1.0 + 0.1 * ((i * 7919) % 13) as f64,
                    0.3 * ((i * 104729) % 7) as f64,
                )
            })
            .collect();

        let mut v = start.clone();
        let mut largest = 0.0;
        for _ in 0..30 {
            let s = norm(&v);
            v.iter_mut().for_each(|x| *x /= s);
            let next = rhmul(&rmul(&v));
            largest = norm(&next);
            v = next;
        }
        let mut v = start;
        let mut inverse = 0.0;
        for _ in 0..30 {
            let s = norm(&v);
            v.iter_mut().for_each(|x| *x /= s);
            let next = solve_r(&solve_rh(&v));
            inverse = norm(&next);
            v = next;
        }
        if largest.is_finite() && inverse.is_finite() {
            largest * inverse
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictStatus {
    ConsistentWithAhlfors,
    NotAhlfors,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AhlforsVerdict {
    pub status: VerdictStatus,
    pub margin: f64,
    pub k_used: usize,
}

/// Compares the last bracket with `R'(inf)`. `R` is Ahlfors exactly when
/// `gamma(K)` equals the sum of its residues, which must then be positive.
pub fn verdict(bounds: &CapacityBounds, tol: f64) -> AhlforsVerdict {
    let s = bounds.derivative_at_infinity;
    let Some(row) = bounds.last() else {
        return AhlforsVerdict {
            status: VerdictStatus::Inconclusive,
            margin: f64::NAN,
            k_used: 0,
        };
    };
    let k_used = row.k;
    if s.im.abs() > REAL_TOL {
        return AhlforsVerdict {
            status: VerdictStatus::NotAhlfors,
            margin: s.im.abs(),
            k_used,
        };
    }
    if s.re <= 0.0 {
        return AhlforsVerdict {
            status: VerdictStatus::NotAhlfors,
            margin: row.lower - s.re,
            k_used,
        };
    }
    if row.lower > s.re + tol {
        AhlforsVerdict {
            status: VerdictStatus::NotAhlfors,
            margin: row.lower - s.re,
            k_used,
        }
    } else if row.upper >= s.re - tol {
        AhlforsVerdict {
            status: VerdictStatus::ConsistentWithAhlfors,
            margin: row.upper - row.lower,
            k_used,
        }
    } else {
        AhlforsVerdict {
            status: VerdictStatus::Inconclusive,
            margin: s.re - row.upper,
            k_used,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn example_61() -> RationalMapPF {
        RationalMapPF::from_real(&[(0.3, -1.0), (0.2, 1.0)]).unwrap()
    }

    #[test]
    fn basis_enumeration() {
        let b = enumerate_basis(&example_61(), 1, None).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!((b.elements[0].point, b.elements[0].order), (c(-1.0, 0.0), 1));
        assert_eq!((b.elements[1].point, b.elements[1].order), (c(1.0, 0.0), 1));

        let single = RationalMapPF::from_real(&[(0.5, 2.0)]).unwrap();
        let b = enumerate_basis(&single, 3, None).unwrap();
        let orders: Vec<usize> = b.elements.iter().map(|e| e.order).collect();
        assert_eq!(orders, vec![1, 2, 3]);

        let ex3 = RationalMapPF::from_real(&[(0.2, -2.0), (0.1, 0.0), (0.4, 5.0)]).unwrap();
        assert_eq!(enumerate_basis(&ex3, 2, None).unwrap().len(), 6);
        assert_eq!(enumerate_basis(&ex3, 0, None), Err(Error::EmptyBasis));

        let custom = [c(0.5, 0.5)];
        let b = enumerate_basis(&ex3, 2, Some(&custom)).unwrap();
        assert_eq!(b.points, custom.to_vec());
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn disk_gram_system() {
        let (a, p) = (0.8, c(0.3, -1.2));
        let s = BoundarySampling::circle(p, a, 1024);
        let map = RationalMapPF::from_pairs(&[(c(a, 0.0), p)]).unwrap();
        let g = assemble_gram(&s, &enumerate_basis(&map, 1, None).unwrap()).unwrap();
        assert_eq!(g.size(), 2);
        assert!((g.get(0, 0) - 1.0 / a).abs() < 1e-13);
        assert!((g.get(1, 1) - 1.0 / a).abs() < 1e-13);
        assert!(g.get(0, 1).abs() < 1e-13);
        assert!((g.constant - a).abs() < 1e-13);
        assert!(g.linear.iter().all(|w| w.abs() < 1e-13));
        assert_eq!(g.derivative, vec![1.0, 0.0]);
        assert!((upper_bound(&g).unwrap().value - a).abs() < 1e-12);
        assert!((lower_bound(&g).unwrap().value - a).abs() < 1e-12);
    }

    #[test]
    fn gram_is_exactly_symmetric() {
        let map = example_61();
        let s = boundary::trace(&map, 256).unwrap();
        let g = assemble_gram(&s, &enumerate_basis(&map, 3, None).unwrap()).unwrap();
        for r in 0..g.size() {
            for t in 0..g.size() {
                assert_eq!(g.get(r, t), g.get(t, r));
            }
        }
        // The constant is not orthogonal to the basis on these curves.
        let g1 = assemble_gram(&s, &enumerate_basis(&map, 1, None).unwrap()).unwrap();
        assert!(g1.linear.iter().any(|w| w.abs() > 1e-6));
    }

    #[test]
    fn basis_point_on_boundary_is_rejected() {
        let s = BoundarySampling::circle(c(0.0, 0.0), 1.0, 64);
        let map = RationalMapPF::from_real(&[(1.0, 0.0)]).unwrap();
        let on = [s.curves[0].nodes[5].z];
        let basis = enumerate_basis(&map, 1, Some(&on)).unwrap();
        assert_eq!(
            assemble_gram(&s, &basis),
            Err(Error::BasisPointOnBoundary { index: 0 })
        );
    }

    #[test]
    fn factored_and_gram_routes_agree() {
        let map = example_61();
        let s = boundary::trace(&map, 1024).unwrap();
        let orders = [1, 2, 3, 4];
        let a = bounds_from_sampling(&map, &s, &orders, None).unwrap();
        let b = gram_bounds(&map, &s, &orders).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert!((x.lower - y.lower).abs() < 1e-10, "{x:?} vs {y:?}");
            assert!((x.upper - y.upper).abs() < 1e-10, "{x:?} vs {y:?}");
            assert!(x.certified);
        }
    }

    #[test]
    fn rejects_not_good_maps() {
        let map = RationalMapPF::from_real(&[(0.6, 0.0), (0.6, 1.0)]).unwrap();
        assert!(matches!(
            bounds_sequence(&map, 2, 256),
            Err(Error::NotGood { .. })
        ));
    }

    fn bounds_with(s: Complex, lower: f64, upper: f64) -> CapacityBounds {
        CapacityBounds {
            rows: vec![BoundsRow {
                k: 3,
                lower,
                upper,
                certified: true,
            }],
            derivative_at_infinity: s,
            map: example_61(),
            nodes: 4096,
        }
    }

    #[test]
    fn verdict_rules() {
        let v = verdict(&bounds_with(c(0.5, 0.0), 0.4999, 0.5001), 1e-6);
        assert_eq!(v.status, VerdictStatus::ConsistentWithAhlfors);
        assert!((v.margin - 0.0002).abs() < 1e-12);
        assert_eq!(v.k_used, 3);

        let v = verdict(
            &bounds_with(c(1.2, 0.0), 1.200370456320151, 1.200375934512287),
            1e-6,
        );
        assert_eq!(v.status, VerdictStatus::NotAhlfors);
        assert!(v.margin >= 0.00037);

        let v = verdict(&bounds_with(c(0.5, 0.1), 0.4, 0.6), 1e-6);
        assert_eq!(v.status, VerdictStatus::NotAhlfors);
        let v = verdict(&bounds_with(c(-0.5, 0.0), 0.4, 0.6), 1e-6);
        assert_eq!(v.status, VerdictStatus::NotAhlfors);

        let v = verdict(&bounds_with(c(0.7, 0.0), 0.5, 0.6), 1e-6);
        assert_eq!(v.status, VerdictStatus::Inconclusive);
    }
}
