//! Spectra: closed-form rectangle and disk eigenvalues, interval Robin
//! eigenvalues by bisection, and P1 finite-element generalized eigenproblems
//! for arbitrary straight-edged polygons (including the isospectral pair).

use crate::geometry::{BoundaryCondition, Point, Polygon};
use crate::trace::{Spectrum, SpectrumSource};
use nalgebra::{DMatrix, SymmetricEigen};
use std::collections::HashMap;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("invalid dimensions a={0}, b={1}")]
    InvalidDimensions(f64, f64),
    #[error("root bracketing failed: {0}")]
    RootBracketFailure(String),
    #[error("boundary condition {0} unsupported here")]
    UnsupportedBc(String),
    #[error("mesh construction failed: {0}")]
    MeshFailure(String),
    #[error("eigen-iteration stalled after {0} sweeps")]
    EigenIterationStall(usize),
    #[error(transparent)]
    Spectrum(#[from] crate::trace::TraceError),
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (flo < 0.0) == (fm < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Eigenvalues k^2 of -u'' on [0, L] with Robin condition alpha u -+ beta u'
/// = 0 at both ends (outward normal), c = alpha/beta >= 0. The j-th positive
/// root of (k^2 - c^2) sin kL - 2 c k cos kL lies in (j pi/L, (j+1) pi/L):
/// the characteristic function takes values -+2ck pi/L-ish of alternating
/// sign at the bracket ends, so no root is ever skipped.
pub fn eigs_1d_robin(length: f64, alpha: f64, beta: f64, count: usize) -> Result<Vec<f64>, EigenError> {
    if length <= 0.0 {
        return Err(EigenError::InvalidDimensions(length, length));
    }
    if beta == 0.0 || alpha / beta < 0.0 {
        return Err(EigenError::UnsupportedBc(format!(
            "1D Robin needs beta != 0 and alpha/beta >= 0; got alpha={alpha}, beta={beta}"
        )));
    }
    let c = alpha / beta;
    if c == 0.0 {
        return Ok((0..count).map(|j| (j as f64 * PI / length).powi(2)).collect());
    }
    let f = |k: f64| (k * k - c * c) * (length * k).sin() - 2.0 * c * k * (length * k).cos();
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let lo = j as f64 * PI / length + 1e-12;
        let hi = (j + 1) as f64 * PI / length - 1e-12;
        if f(lo).signum() == f(hi).signum() {
            return Err(EigenError::RootBracketFailure(format!(
                "no sign change in bracket {j} for c={c}"
            )));
        }
        let k = bisect(f, lo, hi);
        out.push(k * k);
    }
    Ok(out)
}

pub fn eigs_rectangle(
    a: f64,
    b: f64,
    bc: BoundaryCondition,
    count: usize,
) -> Result<Spectrum, EigenError> {
    if a <= 0.0 || b <= 0.0 {
        return Err(EigenError::InvalidDimensions(a, b));
    }
    let one_d = |len: f64, n1d: usize| -> Result<Vec<f64>, EigenError> {
        match bc {
            BoundaryCondition::Dirichlet => {
                Ok((1..=n1d).map(|m| (m as f64 * PI / len).powi(2)).collect())
            }
            BoundaryCondition::Neumann => {
                Ok((0..n1d).map(|m| (m as f64 * PI / len).powi(2)).collect())
            }
            BoundaryCondition::Robin { alpha, beta } => eigs_1d_robin(len, alpha, beta, n1d),
        }
    };
    // enough 1D modes that every admissible sum below the completeness
    // cutoff is formed
    let mut n1d = (count as f64).sqrt() as usize + 8;
    loop {
        let ka = one_d(a, n1d)?;
        let kb = one_d(b, n1d)?;
        // every sum below this threshold is present in the product set
        let complete_below = (ka[n1d - 1] + kb[0]).min(ka[0] + kb[n1d - 1]);
        let mut sums: Vec<f64> = ka
            .iter()
            .flat_map(|&x| kb.iter().map(move |&y| x + y))
            .filter(|&l| l < complete_below)
            .collect();
        sums.sort_by(|x, y| x.partial_cmp(y).unwrap());
        if sums.len() >= count {
            sums.truncate(count);
            let cutoff = *sums.last().unwrap();
            return Ok(Spectrum::new(sums, cutoff, SpectrumSource::ClosedForm)?);
        }
        n1d *= 2;
    }
}

/// J_nu(x) for integer nu >= 0 by Miller's backward recurrence with the
/// J_0 + 2 sum J_2k = 1 normalization.
pub fn bessel_j(nu: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0 { 1.0 } else { 0.0 };
    }
    let m = ((nu + 20) as f64 + 1.5 * x) as usize;
    let m = m + m % 2; // even start
    let mut jp = 0.0f64;
    let mut j = 1e-30f64;
    let mut target = 0.0;
    let mut norm = 0.0;
    for n in (0..=m).rev() {
        let jm = (2.0 * (n + 1) as f64 / x) * j - jp;
        jp = j;
        j = jm;
        if n % 2 == 0 {
            norm += if n == 0 { j } else { 2.0 * j };
        }
        if n == nu {
            target = j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            target *= 1e-250;
        }
    }
    target / norm
}

fn bessel_j_prime(nu: usize, x: f64) -> f64 {
    if nu == 0 {
        -bessel_j(1, x)
    } else {
        0.5 * (bessel_j(nu - 1, x) - bessel_j(nu + 1, x))
    }
}

/// Zeros of f on (x_start, x_max) by sign-change scanning plus bisection.
/// Consecutive zeros of J_nu and J_nu' are separated by more than the scan
/// step, so none are missed.
fn scan_zeros(f: impl Fn(f64) -> f64, x_start: f64, x_max: f64, step: f64) -> Vec<f64> {
    let mut zeros = Vec::new();
    let mut x = x_start;
    let mut fx = f(x);
    while x < x_max {
        let xn = (x + step).min(x_max);
        let fn_ = f(xn);
        if fx == 0.0 {
            zeros.push(x);
        } else if fx.signum() != fn_.signum() {
            zeros.push(bisect(&f, x, xn));
        }
        x = xn;
        fx = fn_;
    }
    zeros
}

pub fn eigs_disk(radius: f64, bc: BoundaryCondition, count: usize) -> Result<Spectrum, EigenError> {
    if radius <= 0.0 {
        return Err(EigenError::InvalidDimensions(radius, radius));
    }
    let neumann = match bc {
        BoundaryCondition::Dirichlet => false,
        BoundaryCondition::Neumann => true,
        BoundaryCondition::Robin { .. } => {
            return Err(EigenError::UnsupportedBc(
                "disk spectrum implemented for Dirichlet/Neumann only".into(),
            ))
        }
    };
    // Weyl estimate for how far out in x = sqrt(lambda) R we must scan
    let mut x_max = (6.0 * count as f64).sqrt().max(8.0);
    loop {
        let mut eigs: Vec<f64> = Vec::new();
        if neumann {
            eigs.push(0.0);
        }
        let mut nu = 0usize;
        // first zero of J_nu (and of J_nu') exceeds nu
        while (nu as f64) < x_max {
            let f = |x: f64| {
                if neumann {
                    bessel_j_prime(nu, x)
                } else {
                    bessel_j(nu, x)
                }
            };
            let start = if nu == 0 { 0.05 } else { nu as f64 * 0.8 };
            for z in scan_zeros(f, start.max(0.05), x_max, 0.25) {
                let l = (z / radius).powi(2);
                if l > 1e-10 {
                    eigs.push(l);
                    if nu >= 1 {
                        eigs.push(l); // sin and cos angular modes
                    }
                }
            }
            nu += 1;
        }
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        // complete below (x_max/R)^2 by construction; keep a safety margin
        let complete = (x_max / radius).powi(2) * 0.98;
        eigs.retain(|&l| l <= complete);
        if eigs.len() >= count {
            eigs.truncate(count);
            let cutoff = *eigs.last().unwrap();
            return Ok(Spectrum::new(eigs, cutoff, SpectrumSource::RootFinding)?);
        }
        x_max *= 1.4;
    }
}

// ---------------------------------------------------------------------------
// P1 finite elements
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    /// boundary edges as vertex index pairs with their lengths
    pub boundary_edges: Vec<([usize; 2], f64)>,
    /// max element diameter
    pub h: f64,
}

fn tri_area(p: Point, q: Point, r: Point) -> f64 {
    0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
}

impl Mesh {
    /// Mesh a polygon from its seed triangulation (or ear clipping when no
    /// seed is attached), then `refinements` rounds of uniform midpoint
    /// subdivision. Seeds respect the corners exactly, so no geometry error
    /// enters the eigenvalue comparison.
    pub fn from_polygon(poly: &Polygon, refinements: usize) -> Result<Mesh, EigenError> {
        let (mut points, mut tris) = match &poly.seed_triangles {
            Some(seed) => (seed.points.clone(), seed.triangles.clone()),
            None => {
                let tris = ear_clip(&poly.vertices)?;
                (poly.vertices.clone(), tris)
            }
        };
        // normalize orientation
        for t in &mut tris {
            if tri_area(points[t[0]], points[t[1]], points[t[2]]) < 0.0 {
                t.swap(1, 2);
            }
        }
        for _ in 0..refinements {
            let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
            let mut mid = |a: usize, b: usize, points: &mut Vec<Point>| -> usize {
                let key = (a.min(b), a.max(b));
                *midpoint.entry(key).or_insert_with(|| {
                    let p = [
                        0.5 * (points[a][0] + points[b][0]),
                        0.5 * (points[a][1] + points[b][1]),
                    ];
                    points.push(p);
                    points.len() - 1
                })
            };
            let mut next = Vec::with_capacity(4 * tris.len());
            for t in &tris {
                let ab = mid(t[0], t[1], &mut points);
                let bc = mid(t[1], t[2], &mut points);
                let ca = mid(t[2], t[0], &mut points);
                next.push([t[0], ab, ca]);
                next.push([ab, t[1], bc]);
                next.push([ca, bc, t[2]]);
                next.push([ab, bc, ca]);
            }
            tris = next;
        }
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        let mut h: f64 = 0.0;
        for t in &tris {
            if tri_area(points[t[0]], points[t[1]], points[t[2]]) <= 0.0 {
                return Err(EigenError::MeshFailure("non-positive triangle area".into()));
            }
            for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let key = (e.0.min(e.1), e.0.max(e.1));
                *edge_count.entry(key).or_insert(0) += 1;
                let (p, q) = (points[e.0], points[e.1]);
                h = h.max(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt());
            }
        }
        let boundary_edges: Vec<([usize; 2], f64)> = edge_count
            .iter()
            .filter(|&(_, &c)| c == 1)
            .map(|(&(i, j), _)| {
                let (p, q) = (points[i], points[j]);
                let len = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
                ([i, j], len)
            })
            .collect();
        Ok(Mesh { vertices: points, triangles: tris, boundary_edges, h })
    }
}

/// O(n^2) ear clipping of a simple CCW polygon.
fn ear_clip(vertices: &[Point]) -> Result<Vec<[usize; 3]>, EigenError> {
    let n = vertices.len();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut tris = Vec::with_capacity(n - 2);
    let inside = |a: Point, b: Point, c: Point, p: Point| -> bool {
        // closed test: a vertex on the ear's boundary blocks the ear too
        let s1 = tri_area(a, b, p);
        let s2 = tri_area(b, c, p);
        let s3 = tri_area(c, a, p);
        s1 > -1e-12 && s2 > -1e-12 && s3 > -1e-12
    };
    let mut guard = 0;
    while idx.len() > 3 {
        guard += 1;
        if guard > n * n + 10 {
            return Err(EigenError::MeshFailure("ear clipping did not terminate".into()));
        }
        let m = idx.len();
        let mut clipped = false;
        for i in 0..m {
            let (ia, ib, ic) = (idx[(i + m - 1) % m], idx[i], idx[(i + 1) % m]);
            let (a, b, c) = (vertices[ia], vertices[ib], vertices[ic]);
            if tri_area(a, b, c) <= 1e-14 {
                continue; // reflex or degenerate corner
            }
            if idx
                .iter()
                .filter(|&&j| j != ia && j != ib && j != ic)
                .any(|&j| inside(a, b, c, vertices[j]))
            {
                continue;
            }
            tris.push([ia, ib, ic]);
            idx.remove(i);
            clipped = true;
            break;
        }
        if !clipped {
            return Err(EigenError::MeshFailure("no ear found".into()));
        }
    }
    tris.push([idx[0], idx[1], idx[2]]);
    Ok(tris)
}

/// Row-compressed symmetric sparse matrix, just enough for matvec.
struct Sparse {
    rows: Vec<Vec<(usize, f64)>>,
}

impl Sparse {
    fn new(n: usize) -> Self {
        Sparse { rows: vec![Vec::new(); n] }
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        match self.rows[i].iter_mut().find(|(c, _)| *c == j) {
            Some((_, e)) => *e += v,
            None => self.rows[i].push((j, v)),
        }
    }

    fn n(&self) -> usize {
        self.rows.len()
    }

    fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, row) in self.rows.iter().enumerate() {
            y[i] = row.iter().map(|&(j, v)| v * x[j]).sum();
        }
    }

    fn diag(&self) -> Vec<f64> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().find(|(j, _)| *j == i).map_or(0.0, |&(_, v)| v))
            .collect()
    }
}

/// Assembled P1 problem on the free (non-Dirichlet) vertices.
pub struct FemProblem {
    stiffness: Sparse,
    mass: Sparse,
    /// number of free degrees of freedom
    pub dofs: usize,
}

pub fn assemble_p1(mesh: &Mesh, bc: BoundaryCondition) -> Result<FemProblem, EigenError> {
    let robin_c = match bc {
        BoundaryCondition::Dirichlet => None,
        BoundaryCondition::Neumann => Some(0.0),
        BoundaryCondition::Robin { alpha, beta } => {
            if beta == 0.0 || alpha / beta < 0.0 {
                return Err(EigenError::UnsupportedBc(
                    "FEM Robin needs beta != 0 and alpha/beta >= 0".into(),
                ));
            }
            Some(alpha / beta)
        }
    };
    let n = mesh.vertices.len();
    // Dirichlet: eliminate boundary vertices
    let mut free = vec![true; n];
    if robin_c.is_none() {
        for ([i, j], _) in &mesh.boundary_edges {
            free[*i] = false;
            free[*j] = false;
        }
    }
    let index: Vec<Option<usize>> = {
        let mut k = 0;
        free.iter()
            .map(|&f| {
                if f {
                    k += 1;
                    Some(k - 1)
                } else {
                    None
                }
            })
            .collect()
    };
    let dofs = index.iter().flatten().count();
    if dofs == 0 {
        return Err(EigenError::MeshFailure("no free degrees of freedom".into()));
    }
    let mut k_mat = Sparse::new(dofs);
    let mut m_mat = Sparse::new(dofs);
    for t in &mesh.triangles {
        let p: Vec<Point> = t.iter().map(|&i| mesh.vertices[i]).collect();
        let area = tri_area(p[0], p[1], p[2]);
        // gradients of the barycentric basis
        let grads = [
            [(p[1][1] - p[2][1]) / (2.0 * area), (p[2][0] - p[1][0]) / (2.0 * area)],
            [(p[2][1] - p[0][1]) / (2.0 * area), (p[0][0] - p[2][0]) / (2.0 * area)],
            [(p[0][1] - p[1][1]) / (2.0 * area), (p[1][0] - p[0][0]) / (2.0 * area)],
        ];
        for a in 0..3 {
            let Some(ia) = index[t[a]] else { continue };
            for b in 0..3 {
                let Some(ib) = index[t[b]] else { continue };
                let kv = area * (grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1]);
                let mv = area / if a == b { 6.0 } else { 12.0 };
                k_mat.add(ia, ib, kv);
                m_mat.add(ia, ib, mv);
            }
        }
    }
    if let Some(c) = robin_c {
        if c > 0.0 {
            // natural boundary term (alpha/beta) int_dOmega u v
            for ([i, j], len) in &mesh.boundary_edges {
                let pairs = [(*i, *i, 2.0), (*j, *j, 2.0), (*i, *j, 1.0), (*j, *i, 1.0)];
                for (a, b, w) in pairs {
                    if let (Some(ia), Some(ib)) = (index[a], index[b]) {
                        k_mat.add(ia, ib, c * len / 6.0 * w);
                    }
                }
            }
        }
    }
    Ok(FemProblem { stiffness: k_mat, mass: m_mat, dofs })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned conjugate gradients for SPD systems.
fn cg(a: &Sparse, diag: &[f64], b: &[f64], x: &mut [f64], tol: f64) -> usize {
    let n = b.len();
    let mut r = vec![0.0; n];
    a.matvec(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let bnorm = dot(b, b).sqrt().max(1e-300);
    let mut ap = vec![0.0; n];
    for it in 0..10 * n {
        a.matvec(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if dot(&r, &r).sqrt() <= tol * bnorm {
            return it + 1;
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    10 * n
}

/// Smallest `count` eigenvalues of K u = lambda M u by shift-inverted
/// subspace iteration: invert (K + sigma M) with CG, M-orthonormalize,
/// Rayleigh-Ritz on the block.
fn generalized_smallest(
    k_mat: &Sparse,
    m_mat: &Sparse,
    count: usize,
) -> Result<Vec<f64>, EigenError> {
    let n = k_mat.n();
    let p = (count + (count / 2).max(6)).min(n);
    let sigma = 1.0;
    // A = K + sigma M, assembled explicitly for the matvec/diagonal
    let mut a = Sparse::new(n);
    for (i, row) in k_mat.rows.iter().enumerate() {
        for &(j, v) in row {
            a.add(i, j, v);
        }
    }
    for (i, row) in m_mat.rows.iter().enumerate() {
        for &(j, v) in row {
            a.add(i, j, sigma * v);
        }
    }
    let adiag = a.diag();
    // deterministic pseudo-random start block
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut x: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| next()).collect()).collect();
    let mut prev: Vec<f64> = vec![f64::INFINITY; count];
    let mut scratch = vec![0.0; n];
    for sweep in 0..200 {
        // Y = A^{-1} M X
        let mut y: Vec<Vec<f64>> = Vec::with_capacity(p);
        for xc in &x {
            m_mat.matvec(xc, &mut scratch);
            let mut yc = xc.clone();
            cg(&a, &adiag, &scratch, &mut yc, 1e-10);
            y.push(yc);
        }
        // M-orthonormalize (modified Gram-Schmidt)
        let mut my: Vec<Vec<f64>> = Vec::with_capacity(p);
        for i in 0..p {
            for j in 0..i {
                let c = dot(&y[i], &my[j]);
                let yj = y[j].clone();
                for (yi, yjv) in y[i].iter_mut().zip(&yj) {
                    *yi -= c * yjv;
                }
            }
            m_mat.matvec(&y[i], &mut scratch);
            let nrm = dot(&y[i], &scratch).sqrt();
            if nrm < 1e-14 {
                return Err(EigenError::EigenIterationStall(sweep));
            }
            for v in y[i].iter_mut() {
                *v /= nrm;
            }
            my.push(scratch.iter().map(|v| v / nrm).collect());
        }
        // Rayleigh-Ritz: Kp = Y^T K Y (Mp = I by construction)
        let mut kp = DMatrix::zeros(p, p);
        for i in 0..p {
            k_mat.matvec(&y[i], &mut scratch);
            for j in 0..=i {
                let v = dot(&y[j], &scratch);
                kp[(i, j)] = v;
                kp[(j, i)] = v;
            }
        }
        let eig = SymmetricEigen::new(kp);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
        let mut xn: Vec<Vec<f64>> = Vec::with_capacity(p);
        for &col in &order {
            let mut v = vec![0.0; n];
            for i in 0..p {
                let c = eig.eigenvectors[(i, col)];
                for (vk, yk) in v.iter_mut().zip(&y[i]) {
                    *vk += c * yk;
                }
            }
            xn.push(v);
        }
        let vals: Vec<f64> = order.iter().take(count).map(|&i| eig.eigenvalues[i]).collect();
        let converged = vals
            .iter()
            .zip(&prev)
            .all(|(v, pv)| (v - pv).abs() <= 1e-9 * v.abs().max(1e-9));
        prev = vals.clone();
        x = xn;
        if converged && sweep >= 3 {
            return Ok(vals.iter().map(|v| v.max(0.0)).collect());
        }
    }
    Err(EigenError::EigenIterationStall(200))
}

#[derive(Debug, Clone)]
pub struct FemResult {
    pub spectrum: Spectrum,
    pub h_used: f64,
    pub dofs: usize,
}

/// First `count` eigenvalues of the polygon by conforming P1 elements on a
/// corner-exact mesh refined uniformly until h <= h_target.
pub fn eigs_fem(
    poly: &Polygon,
    bc: BoundaryCondition,
    h_target: f64,
    count: usize,
) -> Result<FemResult, EigenError> {
    if h_target <= 0.0 {
        return Err(EigenError::MeshFailure("h_target must be positive".into()));
    }
    let mut refinements = 0;
    let mesh = loop {
        let mesh = Mesh::from_polygon(poly, refinements)?;
        if mesh.h <= h_target || refinements >= 10 {
            break mesh;
        }
        refinements += 1;
    };
    let problem = assemble_p1(&mesh, bc)?;
    if count * 3 > problem.dofs {
        return Err(EigenError::MeshFailure(format!(
            "requested {count} eigenvalues from only {} dofs",
            problem.dofs
        )));
    }
    let vals = generalized_smallest(&problem.stiffness, &problem.mass, count)?;
    let cutoff = *vals.last().unwrap();
    Ok(FemResult {
        spectrum: Spectrum::new(vals, cutoff, SpectrumSource::Fem)?,
        h_used: mesh.h,
        dofs: problem.dofs,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct WeylReport {
    pub lambda: f64,
    pub counted: usize,
    pub predicted: f64,
    pub rel_dev: f64,
    pub flagged: bool,
    pub insufficient_data: bool,
}

/// Compare the counting function against the two-term Weyl law at half the
/// cutoff. Diagnostic only: flags deviations beyond 10%.
pub fn weyl_sanity(spec: &Spectrum, area: f64, perimeter: f64, bc: BoundaryCondition) -> WeylReport {
    let lambda = spec.cutoff / 2.0;
    if spec.eigenvalues.is_empty() || lambda <= 0.0 {
        return WeylReport {
            lambda,
            counted: 0,
            predicted: 0.0,
            rel_dev: f64::NAN,
            flagged: false,
            insufficient_data: true,
        };
    }
    let counted = spec.eigenvalues.iter().take_while(|&&l| l <= lambda).count();
    let sign = match bc {
        BoundaryCondition::Dirichlet => -1.0,
        _ => 1.0,
    };
    let predicted = area * lambda / (4.0 * PI) + sign * perimeter * lambda.sqrt() / (4.0 * PI);
    let rel_dev = (counted as f64 - predicted) / predicted;
    WeylReport {
        lambda,
        counted,
        predicted,
        rel_dev,
        flagged: rel_dev.abs() > 0.10,
        insufficient_data: false,
    }
}
