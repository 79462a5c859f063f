//! Closed-form model heat kernels (free plane, half-plane with D/N/Robin,
//! quarter-plane and rectangle oracles) and the Duhamel series that rebuilds
//! the Robin kernel from the Neumann one.

use crate::geometry::{BoundaryCondition, Point};
use crate::specfun::erfcx;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("time must be positive (got {0})")]
    NonPositiveTime(f64),
    #[error("point ({0}, {1}) outside the model domain")]
    PointOutsideDomain(f64, f64),
    #[error("boundary condition not supported here: {0}")]
    UnsupportedBC(&'static str),
    #[error("Duhamel term magnitudes not decaying by m = {0}")]
    NonConvergent(usize),
}

/// Uniform kernel interface used by the locality harness.
pub trait Kernel: Sync {
    fn eval(&self, t: f64, z: Point, zp: Point) -> f64;
}

impl<F: Fn(f64, Point, Point) -> f64 + Sync> Kernel for F {
    fn eval(&self, t: f64, z: Point, zp: Point) -> f64 {
        self(t, z, zp)
    }
}

pub(crate) fn gauss1d(t: f64, dx: f64) -> f64 {
    (4.0 * PI * t).sqrt().recip() * (-dx * dx / (4.0 * t)).exp()
}

/// Free heat kernel on the plane: (4 pi t)^{-1} e^{-|z-z'|^2/4t}.
pub fn heat_plane(t: f64, z: Point, zp: Point) -> Result<f64, KernelError> {
    if t <= 0.0 {
        return Err(KernelError::NonPositiveTime(t));
    }
    let d2 = (z[0] - zp[0]).powi(2) + (z[1] - zp[1]).powi(2);
    Ok((4.0 * PI * t).recip() * (-d2 / (4.0 * t)).exp())
}

/// Robin correction term for the half-plane y >= 0 with coefficient c = alpha/beta:
///   -c (4 pi t)^{-1/2} e^{-(x-x')^2/4t} e^{c(y+y')} e^{c^2 t} erfc((y+y')/sqrt(4t) + c sqrt t)
/// evaluated overflow-free as -c gauss(x-x') e^{-(y+y')^2/4t} erfcx(b).
fn h_corr(t: f64, dx: f64, ysum: f64, c: f64) -> f64 {
    let b = ysum / (4.0 * t).sqrt() + c * t.sqrt();
    -c * gauss1d(t, dx) * (-ysum * ysum / (4.0 * t)).exp() * erfcx(b)
}

/// Half-plane y >= 0 heat kernel by the method of images; Robin adds H_corr.
pub fn heat_halfplane(t: f64, z: Point, zp: Point, bc: BoundaryCondition) -> Result<f64, KernelError> {
    if t <= 0.0 {
        return Err(KernelError::NonPositiveTime(t));
    }
    if z[1] < 0.0 {
        return Err(KernelError::PointOutsideDomain(z[0], z[1]));
    }
    if zp[1] < 0.0 {
        return Err(KernelError::PointOutsideDomain(zp[0], zp[1]));
    }
    let direct = heat_plane(t, z, zp)?;
    let image = heat_plane(t, z, [zp[0], -zp[1]])?;
    Ok(match bc {
        BoundaryCondition::Dirichlet => direct - image,
        BoundaryCondition::Neumann => direct + image,
        BoundaryCondition::Robin { alpha, beta } => {
            let c = alpha / beta;
            direct + image + h_corr(t, z[0] - zp[0], z[1] + zp[1], c)
        }
    })
}

fn half_line_images(t: f64, x: f64, xp: f64, bc: BoundaryCondition) -> Result<f64, KernelError> {
    let sign = match bc {
        BoundaryCondition::Dirichlet => -1.0,
        BoundaryCondition::Neumann => 1.0,
        BoundaryCondition::Robin { .. } => {
            return Err(KernelError::UnsupportedBC(
                "quarter-plane Robin is not separable",
            ))
        }
    };
    Ok(gauss1d(t, x - xp) + sign * gauss1d(t, x + xp))
}

/// Quarter-plane x, y >= 0 with independent D/N conditions on the two edges;
/// the kernel is the product of two half-line image kernels.
pub fn heat_quarterplane(
    t: f64,
    z: Point,
    zp: Point,
    bc_x: BoundaryCondition,
    bc_y: BoundaryCondition,
) -> Result<f64, KernelError> {
    if t <= 0.0 {
        return Err(KernelError::NonPositiveTime(t));
    }
    for p in [z, zp] {
        if p[0] < 0.0 || p[1] < 0.0 {
            return Err(KernelError::PointOutsideDomain(p[0], p[1]));
        }
    }
    // bc_y applies on the edge y = 0, i.e. to the y-coordinate half-line
    Ok(half_line_images(t, z[0], zp[0], bc_x)? * half_line_images(t, z[1], zp[1], bc_y)?)
}

/// 1D eigen-sum kernel on [0, L]: sine modes (Dirichlet) or cosine modes
/// (Neumann), truncated at lambda * t <= 45.
pub fn heat_interval(t: f64, x: f64, xp: f64, l: f64, bc: BoundaryCondition) -> Result<f64, KernelError> {
    if t <= 0.0 {
        return Err(KernelError::NonPositiveTime(t));
    }
    let nmax = ((45.0 / t).sqrt() * l / PI).ceil() as usize + 1;
    let mut s;
    match bc {
        BoundaryCondition::Dirichlet => {
            s = 0.0;
            for n in 1..=nmax {
                let k = n as f64 * PI / l;
                s += (-k * k * t).exp() * (k * x).sin() * (k * xp).sin() * 2.0 / l;
            }
        }
        BoundaryCondition::Neumann => {
            s = 1.0 / l;
            for n in 1..=nmax {
                let k = n as f64 * PI / l;
                s += (-k * k * t).exp() * (k * x).cos() * (k * xp).cos() * 2.0 / l;
            }
        }
        BoundaryCondition::Robin { .. } => {
            return Err(KernelError::UnsupportedBC(
                "use harness::robin_interval_kernel for 1D Robin",
            ))
        }
    }
    Ok(s)
}

/// Rectangle [0,a] x [0,b] heat kernel as the product of two interval kernels.
pub fn heat_rectangle(
    t: f64,
    z: Point,
    zp: Point,
    a: f64,
    b: f64,
    bc: BoundaryCondition,
) -> Result<f64, KernelError> {
    Ok(heat_interval(t, z[0], zp[0], a, bc)? * heat_interval(t, z[1], zp[1], b, bc)?)
}

/// Interval kernel by images (Jacobi theta form); dual representation used to
/// cross-check the eigen-sum and to difference kernels exactly in the
/// locality studies.
pub fn heat_interval_images(t: f64, x: f64, xp: f64, l: f64, bc: BoundaryCondition) -> Result<f64, KernelError> {
    if t <= 0.0 {
        return Err(KernelError::NonPositiveTime(t));
    }
    let sign = match bc {
        BoundaryCondition::Dirichlet => -1.0,
        BoundaryCondition::Neumann => 1.0,
        BoundaryCondition::Robin { .. } => {
            return Err(KernelError::UnsupportedBC("no image form for Robin"))
        }
    };
    // images of x' under the reflection group of [0, L]: 2nL + x', 2nL - x'
    let nmax = (((45.0 * t).sqrt() + l) / (2.0 * l)).ceil() as i64 + 1;
    let mut s = 0.0;
    for n in -nmax..=nmax {
        let base = 2.0 * n as f64 * l;
        s += gauss1d(t, x - (base + xp)) + sign * gauss1d(t, x - (base - xp));
    }
    Ok(s)
}

// -------- Duhamel series: Robin from Neumann on the half-plane --------

/// Chebyshev interpolant on [a, b] (barycentric, second kind nodes).
struct Cheb {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Cheb {
    fn new(a: f64, b: f64, n: usize) -> Self {
        let nodes: Vec<f64> = (0..=n)
            .map(|k| {
                let x = (k as f64 * PI / n as f64).cos();
                0.5 * (a + b) + 0.5 * (b - a) * x
            })
            .collect();
        let weights: Vec<f64> = (0..=n)
            .map(|k| {
                let mut w = if k % 2 == 0 { 1.0 } else { -1.0 };
                if k == 0 || k == n {
                    w *= 0.5;
                }
                w
            })
            .collect();
        Cheb { a, b, nodes, weights }
    }

    /// Barycentric evaluation; outside the window the interpolated functions
    /// here have decayed below noise, so clamp to zero instead of
    /// extrapolating.
    fn eval(&self, values: &[f64], x: f64) -> f64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        if x < self.a.min(self.b) || x > self.a.max(self.b) {
            return 0.0;
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&xi, &wi), &fi) in self.nodes.iter().zip(&self.weights).zip(values) {
            let d = x - xi;
            if d.abs() < 1e-14 * (self.b - self.a).max(1.0) {
                return fi;
            }
            let q = wi / d;
            num += q * fi;
            den += q;
        }
        num / den
    }
}

// 20-point Gauss-Hermite nodes/weights (weights include e^{-u^2}; the pairs
// below are the positive half, used symmetrically).
const GH20_X: [f64; 10] = [
    0.2453407083009012,
    0.7374737285453944,
    1.2340762153953230,
    1.7385377121165862,
    2.2549740020892757,
    2.7888060584281305,
    3.3478545673832163,
    3.9447640401156252,
    4.6036824495507442,
    5.3874808900112328,
];
const GH20_W: [f64; 10] = [
    4.6224366960061009e-1,
    2.8667550536283412e-1,
    1.0901720602002163e-1,
    2.4810520887463607e-2,
    3.2437733422378567e-3,
    2.2833863601635307e-4,
    7.8025564785320596e-6,
    1.0860693707692819e-7,
    4.3993409922731805e-10,
    2.2293936455341510e-13,
];

const GL32_X: [f64; 16] = [
    0.0483076656877383,
    0.1444719615827965,
    0.2392873622521371,
    0.3318686022821276,
    0.4213512761306353,
    0.5068999089281260,
    0.5877157572407623,
    0.6630442669302152,
    0.7321821187402897,
    0.7944837959679424,
    0.8493676137325700,
    0.8963211557660521,
    0.9349060759377397,
    0.9647622555875064,
    0.9856115115452684,
    0.9972638618494816,
];
const GL32_W: [f64; 16] = [
    0.0965400885147278,
    0.0956387200792749,
    0.0938443990808046,
    0.0911738786957639,
    0.0876520930044038,
    0.0833119242269467,
    0.0781938957870703,
    0.0723457941088485,
    0.0658222227763618,
    0.0586840934785355,
    0.0509980592623762,
    0.0428358980222267,
    0.0342738629130214,
    0.0253920653092621,
    0.0162743947309057,
    0.0070186100094701,
];

pub struct RobinSeries {
    pub value: f64,
    /// |k_m| at the evaluation point, m = 0..=M; the diagnostics behind the
    /// geometric-decay property.
    pub term_magnitudes: Vec<f64>,
}

/// Duhamel series for the half-plane Robin kernel built from the Neumann one:
/// k_0 = H^N and k_m(t,x,y) = -c int_0^t int_R H^N(s,x,(w,0)) k_{m-1}(t-s,(w,0),y) dw ds,
/// summed over m = 0..=M. The minus sign folds the series' alternation into
/// the recursion so the sum is a plain sum (checked against the closed form).
///
/// The recursion is marched on the boundary with Chebyshev interpolation in
/// sqrt(time) and in the boundary coordinate; the s-integral uses the
/// substitution s = t sin^2(theta) to absorb the s^{-1/2} endpoint
/// singularity, and the boundary integral is Gauss-Hermite in the Gaussian
/// kernel factor (so the infinite boundary needs no explicit truncation).
pub fn robin_from_neumann(
    c: f64,
    t: f64,
    z: Point,
    zp: Point,
    m_terms: usize,
) -> Result<RobinSeries, KernelError> {
    if t <= 0.0 {
        return Err(KernelError::NonPositiveTime(t));
    }
    if z[1] < 0.0 || zp[1] < 0.0 {
        return Err(KernelError::PointOutsideDomain(z[0], z[1].min(zp[1])));
    }
    let h_n = |s: f64, a: Point, b: Point| heat_halfplane(s, a, b, BoundaryCondition::Neumann).unwrap();
    let mut mags = vec![h_n(t, z, zp).abs()];
    if c == 0.0 || m_terms == 0 {
        return Ok(RobinSeries { value: h_n(t, z, zp), term_magnitudes: mags });
    }

    // grids: tau = t q^2 with q Chebyshev on [0,1]; boundary window wide
    // enough that every Gauss-Hermite query of a decayed iterate stays inside
    let nq = 24;
    let nz = 48;
    let qgrid = Cheb::new(0.0, 1.0, nq);
    let halfwidth = 14.0 * t.sqrt() + (z[0] - zp[0]).abs() + 1.0;
    let zc = 0.5 * (z[0] + zp[0]);
    let zgrid = Cheb::new(zc - halfwidth, zc + halfwidth, nz);

    // boundary iterate: k_0 = H^N is kept in closed form (no interpolation
    // error on the dominant term); k_m for m >= 1 lives on the (q, z) grid
    let mut f: Option<Vec<Vec<f64>>> = None;

    let ghq = |g: &dyn Fn(f64) -> f64| -> f64 {
        let mut s = 0.0;
        for i in 0..10 {
            s += GH20_W[i] * (g(GH20_X[i]) + g(-GH20_X[i]));
        }
        s / PI.sqrt()
    };

    // blend the time direction once per query time: row(q)[j] = f(t q^2, z_j)
    let blend_time = |fv: &[Vec<f64>], q: f64, qgrid: &Cheb| -> Vec<f64> {
        let mut num = vec![0.0; fv[0].len()];
        let mut den = 0.0;
        for ((&qi, &wi), row) in qgrid.nodes.iter().zip(&qgrid.weights).zip(fv) {
            let d = q - qi;
            if d.abs() < 1e-14 {
                return row.clone();
            }
            let w = wi / d;
            den += w;
            for (nj, &fj) in num.iter_mut().zip(row) {
                *nj += w * fj;
            }
        }
        for nj in num.iter_mut() {
            *nj /= den;
        }
        num
    };
    // theta nodes of the s = tau sin^2(theta) substitution, shared by all taus
    let theta_nodes: Vec<(f64, f64)> = {
        let (a, b) = (0.0, PI / 2.0);
        let c2 = 0.5 * (a + b);
        let hw = 0.5 * (b - a);
        let mut v = Vec::with_capacity(32);
        for i in 0..16 {
            v.push((c2 - hw * GL32_X[i], hw * GL32_W[i]));
            v.push((c2 + hw * GL32_X[i], hw * GL32_W[i]));
        }
        v
    };

    // k_{m-1} on the boundary at time t q^2, position w
    let query = |grid: &Option<Vec<Vec<f64>>>, q: f64, w: f64| -> f64 {
        match grid {
            None => {
                let tau = t * q * q;
                if tau > 0.0 {
                    h_n(tau, [w, 0.0], zp)
                } else {
                    0.0
                }
            }
            Some(g) => {
                let row = blend_time(g, q, &qgrid);
                zgrid.eval(&row, w)
            }
        }
    };

    let mut value = h_n(t, z, zp);
    for m in 1..=m_terms {
        // k_m at the interior target from the boundary values of k_{m-1}
        let y0 = z[1];
        let mut km = 0.0;
        for &(theta, wt) in &theta_nodes {
            let sn = theta.sin();
            let s = t * sn * sn;
            let qq = theta.cos();
            let spread = 2.0 * t.sqrt() * sn;
            let damp = if y0 > 0.0 { (-y0 * y0 / (4.0 * s)).exp() } else { 1.0 };
            let row = f.as_ref().map(|g| blend_time(g, qq, &qgrid));
            let point = |u: f64| -> f64 {
                let w = z[0] + spread * u;
                match &row {
                    Some(r) => zgrid.eval(r, w),
                    None => query(&f, qq, w),
                }
            };
            km += wt * theta.cos() * damp * ghq(&point);
        }
        km *= -c * 2.0 * (t / PI).sqrt();
        value += km;
        mags.push(km.abs());
        // march the boundary iterate forward for the next term
        if m < m_terms {
            let mut f_next: Vec<Vec<f64>> =
                vec![vec![0.0; zgrid.nodes.len()]; qgrid.nodes.len()];
            for (l, &q) in qgrid.nodes.iter().enumerate() {
                let tau = t * q * q;
                if tau <= 0.0 {
                    continue;
                }
                for &(theta, wt) in &theta_nodes {
                    let qq = q * theta.cos();
                    let row = f.as_ref().map(|g| blend_time(g, qq, &qgrid));
                    let spread = 2.0 * tau.sqrt() * theta.sin();
                    let scale = -c * 2.0 * (tau / PI).sqrt() * wt * theta.cos();
                    for (j, &zj) in zgrid.nodes.iter().enumerate() {
                        let mut gh = 0.0;
                        for i in 0..10 {
                            for &sgn in &[1.0, -1.0] {
                                let w = zj + sgn * spread * GH20_X[i];
                                let v = match &row {
                                    Some(r) => zgrid.eval(r, w),
                                    None => query(&f, qq, w),
                                };
                                gh += GH20_W[i] * v;
                            }
                        }
                        f_next[l][j] += scale * gh / PI.sqrt();
                    }
                }
            }
            f = Some(f_next);
        }
        // spec guard: magnitudes must be decaying by the series midpoint
        if m >= m_terms / 2 && m >= 3 && mags[m] > mags[m - 1] && mags[m - 1] > mags[m - 2] {
            return Err(KernelError::NonConvergent(m));
        }
    }
    Ok(RobinSeries { value, term_magnitudes: mags })
}
