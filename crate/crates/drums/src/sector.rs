//! Green's functions for the infinite circular sector 0 <= phi <= gamma under
//! Dirichlet/Neumann/Robin conditions, and the sector heat kernel obtained by
//! numerical inverse Laplace transform in the spectral parameter.
//!
//! The Kontorovich-Lebedev representation is evaluated with the free-space
//! part split off in closed form: the brace's common term
//! cosh((pi - |phi - phi0|) mu) integrates (Macdonald's formula) to
//! (1/2 pi) K_0(sqrt(s) d), where d is the chordal distance. The remaining
//! brace terms decay exponentially in mu even on the diagonal, which is what
//! makes coincident-point evaluation (needed for heat-kernel diagnostics)
//! possible at all.

use crate::geometry::{BoundaryCondition, Sector};
use crate::kernels::heat_plane;
use crate::specfun::{
    bessel_k0_complex, bessel_k_imag_scaled, inverse_laplace_euler, inverse_laplace_stehfest,
    InverseLaplaceParams, QuadratureBudget, SpecfunError,
};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SectorError {
    #[error("points too close to the diagonal for the KL quadrature")]
    DiagonalSingularity,
    #[error("point (r={0}, phi={1}) outside the sector or at the corner")]
    PointOutsideSector(f64, f64),
    #[error("KL integrand does not decay for this configuration (delta = {0:.3e})")]
    DivergentConfiguration(f64),
    #[error("inverse-Laplace methods disagree: {0:.6e} vs {1:.6e}")]
    UnstableResult(f64, f64),
    #[error("argument r*sqrt|s| = {0:.1} outside the Bessel series validity domain")]
    ArgumentTooLarge(f64),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

#[derive(Debug, Clone, Copy)]
pub struct SectorPoint {
    pub r: f64,
    pub phi: f64,
}

impl SectorPoint {
    pub fn new(r: f64, phi: f64) -> Self {
        SectorPoint { r, phi }
    }
}

/// sinh(a mu) e^{-|a| mu} without cancellation, including the mu -> 0 regime.
fn sinh_scaled(a: f64, mu: f64) -> f64 {
    0.5 * a.signum() * (-(-2.0 * a.abs() * mu).exp_m1())
}

fn cosh_scaled(a: f64, mu: f64) -> f64 {
    0.5 * (1.0 + (-2.0 * a.abs() * mu).exp())
}

/// The non-free part of the KL brace, pre-multiplied by e^{-pi mu} so it can
/// be paired with the scaled Bessel product SK*SK. The value and the optional
/// pole part (Robin) are returned as closures over mu.
struct ScaledBrace {
    smooth: Box<dyn Fn(f64) -> f64>,
    /// Robin pole: term smooth_pole(mu)/(mu_star - mu), PV at mu_star.
    pole: Option<(f64, Box<dyn Fn(f64) -> f64>)>,
    /// decay rate of the slowest term; must be > 0 for convergence
    delta: f64,
    /// sign of the gamma = pi image term when it was split off analytically
    image_sign: f64,
}

fn scaled_brace(
    sector: &Sector,
    phi: f64,
    phi0: f64,
    include_common: bool,
    split_image: bool,
) -> Result<ScaledBrace, SectorError> {
    let g = sector.gamma;
    let bc = sector.bc;
    let dphi = (phi - phi0).abs();
    let w = phi + phi0 - g;
    let sign1 = match bc {
        BoundaryCondition::Dirichlet => -1.0,
        _ => 1.0,
    };
    // At gamma = pi the first brace term is exactly +-cosh((phi+phi0-pi)mu),
    // which Macdonald's formula integrates in closed form (the half-plane
    // image); splitting it off is what lets the inverse-Laplace contour,
    // whose arg s exceeds the term's decay rate, proceed at all.
    let image = split_image && (g - PI).abs() < 1e-12 && w.abs() > 1e-9;
    // exponents (relative to the e^{pi mu} available from the Bessel pair)
    let delta1 = g - w.abs(); // sinh(pi mu)/sinh(g mu) * cosh(w mu)
    let delta2 = g + PI - (PI - g).abs() - dphi; // sinh((pi-g)mu)/sinh(g mu) * cosh(dphi mu)
    let delta_common = PI - (PI - dphi).abs();
    let mut delta = delta2;
    if !image {
        delta = delta.min(delta1);
    }
    if include_common {
        delta = delta.min(delta_common);
    }
    if delta <= 0.0 {
        return Err(SectorError::DivergentConfiguration(delta));
    }
    let smooth = move |mu: f64| {
        let ratio = |num: f64| sinh_scaled(num, mu) / sinh_scaled(g, mu);
        let mut v =
            ratio(PI - g) * cosh_scaled(dphi, mu) * (((PI - g).abs() + dphi - g - PI) * mu).exp();
        if !image {
            v += sign1 * ratio(PI) * cosh_scaled(w, mu) * ((w.abs() - g) * mu).exp();
        }
        if include_common {
            v += cosh_scaled(PI - dphi, mu) * (((PI - dphi).abs() - PI) * mu).exp();
        }
        if let BoundaryCondition::Robin { alpha, beta } = bc {
            // regular half of the Robin extra term: e^{w mu} alpha/(alpha + beta mu)
            v -= ratio(PI) * ((w - g) * mu).exp() * alpha / (alpha + beta * mu);
        }
        v
    };
    let pole = match bc {
        BoundaryCondition::Robin { alpha, beta } => {
            // e^{-w mu} alpha/(alpha - beta mu) = [e^{-w mu} (alpha/beta)] / (mu* - mu)
            let mu_star = alpha / beta;
            let f = move |mu: f64| {
                let ratio = sinh_scaled(PI, mu) / sinh_scaled(g, mu);
                -ratio * ((-w - g) * mu).exp() * (alpha / beta)
            };
            Some((mu_star, Box::new(f) as Box<dyn Fn(f64) -> f64>))
        }
        _ => None,
    };
    Ok(ScaledBrace {
        smooth: Box::new(smooth),
        pole,
        delta,
        image_sign: if image { sign1 } else { 0.0 },
    })
}

/// Distance from p to the reflection of p0 across the edge phi = 0.
fn image_chord(p: SectorPoint, p0: SectorPoint) -> f64 {
    (p.r * p.r + p0.r * p0.r - 2.0 * p.r * p0.r * (p.phi + p0.phi).cos())
        .max(0.0)
        .sqrt()
}

const GLS_X: [f64; 10] = [
    0.0765265211334973,
    0.2277858511416451,
    0.3737060887154195,
    0.5108670019508271,
    0.6360536807265150,
    0.7463319064601508,
    0.8391169718222188,
    0.9122344282513259,
    0.9639719272779138,
    0.9931285991850949,
];
const GLS_W: [f64; 10] = [
    0.1527533871307258,
    0.1491729864726037,
    0.1420961093183820,
    0.1316886384491766,
    0.1181945319615184,
    0.1019301198172404,
    0.0832767415767048,
    0.0626720483341091,
    0.0406014298003869,
    0.0176140071391521,
];

fn gl20c<F: Fn(f64) -> Complex64>(a: f64, b: f64, f: &F) -> Complex64 {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..10 {
        s += GLS_W[i] * (f(c - hw * GLS_X[i]) + f(c + hw * GLS_X[i]));
    }
    s * hw
}

/// (1/pi^2) int_0^inf SK(mu, a) SK(mu, b) e^{-pi mu} brace_scaled(mu) dmu
/// for complex Bessel arguments, with PV handling of the Robin pole.
fn kl_complex(
    a: Complex64,
    b: Complex64,
    brace: &ScaledBrace,
    budget: &QuadratureBudget,
) -> Result<Complex64, SectorError> {
    // SK * SK = e^{pi mu} K_{i mu}(a) K_{i mu}(b); the matching e^{-pi mu}
    // is already folded into the scaled brace closures
    let kk = |mu: f64| bessel_k_imag_scaled(mu, a) * bessel_k_imag_scaled(mu, b);
    let f_smooth = |mu: f64| kk(mu) * (brace.smooth)(mu);
    let cutoff = budget.mu_cutoff;
    let tol = budget.abs_tol;
    // smooth part: fixed panels with early exit on decay
    let mut total = Complex64::new(0.0, 0.0);
    let w = 2.0;
    let mut mu = 0.0;
    while mu < cutoff {
        let p = gl20c(mu, mu + w, &f_smooth);
        total += p;
        mu += w;
        if mu > 8.0 && p.norm() < tol * 1e-2 {
            break;
        }
    }
    // Robin pole part
    if let Some((mu_star, sp)) = &brace.pole {
        let mu_star = *mu_star;
        let f_pole = |mu: f64| kk(mu) * sp(mu) / (mu_star - mu);
        if mu_star <= 0.0 || mu_star > cutoff {
            // pole off the active path (or beyond where the integrand has
            // decayed to nothing): integrate directly
            let mut mu = 0.0;
            while mu < cutoff {
                let p = gl20c(mu, mu + w, &f_pole);
                total += p;
                mu += w;
                if mu > 8.0 && p.norm() < tol * 1e-2 {
                    break;
                }
            }
        } else {
            let d = 0.5f64.min(0.5 * mu_star);
            // regular stretches
            let mut mu = 0.0;
            while mu < mu_star - d - 1e-12 {
                let step = w.min(mu_star - d - mu);
                total += gl20c(mu, mu + step, &f_pole);
                mu += step;
            }
            let mut mu = mu_star + d;
            while mu < cutoff {
                let p = gl20c(mu, mu + w, &f_pole);
                total += p;
                mu += w;
                if mu > mu_star + d + 8.0 && p.norm() < tol * 1e-2 {
                    break;
                }
            }
            // PV window: subtract the simple pole, which integrates to zero
            // over the symmetric window
            let h = |mu: f64| kk(mu) * sp(mu);
            let h_star = h(mu_star);
            let reg = |mu: f64| {
                let dm = mu_star - mu;
                if dm.abs() < 1e-9 {
                    let e = 1e-5;
                    -(h(mu_star + e) - h(mu_star - e)) / (2.0 * e)
                } else {
                    (h(mu) - h_star) / dm
                }
            };
            total += gl20c(mu_star - d, mu_star, &reg) + gl20c(mu_star, mu_star + d, &reg);
        }
    }
    Ok(total / (PI * PI))
}

fn validate_point(p: SectorPoint, gamma: f64) -> Result<(), SectorError> {
    if p.r <= 0.0 || p.phi < 0.0 || p.phi > gamma {
        return Err(SectorError::PointOutsideSector(p.r, p.phi));
    }
    Ok(())
}

fn chord(p: SectorPoint, p0: SectorPoint) -> f64 {
    (p.r * p.r + p0.r * p0.r - 2.0 * p.r * p0.r * (p.phi - p0.phi).cos())
        .max(0.0)
        .sqrt()
}

/// Resolvent Green's function G(s) of the sector at spectral parameter s > 0.
pub fn green_sector(
    s: f64,
    sector: &Sector,
    p: SectorPoint,
    p0: SectorPoint,
    budget: &QuadratureBudget,
) -> Result<f64, SectorError> {
    if s <= 0.0 {
        return Err(SectorError::Specfun(SpecfunError::NonPositiveArgument(s)));
    }
    validate_point(p, sector.gamma)?;
    validate_point(p0, sector.gamma)?;
    let d = chord(p, p0);
    if d < 1e-6 * p.r.max(p0.r) {
        return Err(SectorError::DiagonalSingularity);
    }
    let rs = Complex64::new(s.sqrt(), 0.0);
    let split = (p.phi - p0.phi).abs() < PI;
    let brace = scaled_brace(sector, p.phi, p0.phi, !split, false)?;
    let mut v = kl_complex(p.r * rs, p0.r * rs, &brace, budget)?.re;
    if split {
        v += bessel_k0_complex(rs * d).re / (2.0 * PI);
    }
    Ok(v)
}

/// Largest arg s reached by the Euler contour, independent of t (and of M up
/// to the k -> infinity limit): atan(6 pi / ln 10).
const EULER_ARG_MAX: f64 = 1.449_215_769_842_177;
/// Largest r sqrt|s| the ascending K_{i mu} series tolerates before the
/// I_{+i mu} - I_{-i mu} cancellation eats the answer.
const SERIES_ARG_MAX: f64 = 15.0;

/// Heat kernel of the sector at time t, via inverse Laplace transform of the
/// Green's function. The free part inverts in closed form to the plane
/// kernel; only the boundary correction goes through the numerical transform,
/// so coincident points are fine.
pub fn heat_sector(
    t: f64,
    sector: &Sector,
    p: SectorPoint,
    p0: SectorPoint,
    budget: &QuadratureBudget,
    il: &InverseLaplaceParams,
) -> Result<f64, SectorError> {
    if t <= 0.0 {
        return Err(SectorError::Specfun(SpecfunError::NonPositiveArgument(t)));
    }
    validate_point(p, sector.gamma)?;
    validate_point(p0, sector.gamma)?;
    let split = (p.phi - p0.phi).abs() < PI;
    let brace = scaled_brace(sector, p.phi, p0.phi, !split, true)?;
    let rmax = p.r.max(p0.r);
    let rest = |s: Complex64| -> Complex64 {
        let rs = s.sqrt();
        kl_complex(p.r * rs, p0.r * rs, &brace, budget).unwrap_or(Complex64::new(f64::NAN, 0.0))
    };
    // The Euler contour is usable only when (a) the KL integrand still
    // decays at the contour's worst arg s and (b) the Bessel series survives
    // the largest r sqrt|s| reached. Outside that window fall back to a
    // Gaver-Stehfest pair: real-axis s keeps the KL integral convergent for
    // every admissible configuration.
    let m = il.euler_terms as f64;
    let a = m * 10f64.ln() / 3.0;
    let smax_euler = (a * a + (2.0 * PI * m).powi(2)).sqrt() / t;
    let euler_ok = brace.delta > EULER_ARG_MAX + 0.075
        && rmax * smax_euler.sqrt() <= SERIES_ARG_MAX;
    let (val, check) = if euler_ok {
        let e = inverse_laplace_euler(&rest, t, il.euler_terms)?;
        let g =
            inverse_laplace_stehfest(|s| rest(Complex64::new(s, 0.0)).re, t, il.stehfest_terms)?;
        (e, g)
    } else {
        let smax_gs = il.stehfest_terms as f64 * 2f64.ln() / t;
        let arg = rmax * smax_gs.sqrt();
        if arg > SERIES_ARG_MAX {
            return Err(SectorError::ArgumentTooLarge(arg));
        }
        let fr = |s: f64| rest(Complex64::new(s, 0.0)).re;
        let g1 = inverse_laplace_stehfest(fr, t, il.stehfest_terms)?;
        let g2 = inverse_laplace_stehfest(fr, t, il.stehfest_terms.saturating_sub(4).max(8))?;
        (g1, g2)
    };
    let mut closed = if split {
        let d = chord(p, p0);
        heat_plane(t, [0.0, 0.0], [d, 0.0]).expect("t > 0")
    } else {
        0.0
    };
    if brace.image_sign != 0.0 {
        let di = image_chord(p, p0);
        closed += brace.image_sign * heat_plane(t, [0.0, 0.0], [di, 0.0]).expect("t > 0");
    }
    let scale = (closed + val).abs().max((closed + check).abs()).max(1e-300);
    if (val - check).abs() > il.consistency_rel * scale {
        return Err(SectorError::UnstableResult(closed + val, closed + check));
    }
    Ok(closed + val)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoundaryCondition as BC;
    use crate::kernels::heat_quarterplane;
    use crate::specfun::bessel_k0;

    fn budget() -> QuadratureBudget {
        QuadratureBudget::default()
    }

    fn sp(r: f64, phi: f64) -> SectorPoint {
        SectorPoint::new(r, phi)
    }

    // reference values computed with 30-digit arithmetic (KL quadrature
    // cross-checked against method-of-images closed forms where available)
    #[test]
    fn green_frozen_reference_values() {
        let cases: [(f64, BC, f64, f64, f64, f64, f64, f64); 5] = [
            (PI / 2.0, BC::Dirichlet, 1.0, 0.6, 0.7, 0.9, 1.0, 0.108844496454231),
            (3.0 * PI / 4.0, BC::Dirichlet, 0.8, 0.5, 1.1, 1.7, 2.0, 0.0178654076339699),
            (3.0 * PI / 4.0, BC::Neumann, 0.8, 0.5, 1.1, 1.7, 2.0, 0.0502912608545478),
            (PI, BC::Dirichlet, 1.0, PI / 2.0, 0.6, 1.2, 1.0, 0.118480729364246),
            (4.0 * PI / 3.0, BC::Neumann, 0.9, 2.0, 0.7, 3.0, 1.5, 0.0792070762774181),
        ];
        for &(gamma, bc, r, phi, r0, phi0, s, want) in &cases {
            let sec = Sector { gamma, bc };
            let got = green_sector(s, &sec, sp(r, phi), sp(r0, phi0), &budget()).unwrap();
            assert!(
                ((got - want) / want).abs() < 2e-6,
                "gamma={gamma} got {got} want {want}"
            );
        }
    }

    #[test]
    fn green_robin_frozen_values() {
        let cases: [(f64, f64, f64, f64, f64, f64, f64, f64, f64); 2] = [
            (PI / 2.0, 1.0, 1.0, 1.0, 0.6, 0.7, 0.9, 1.0, 0.213574615289367),
            (3.0 * PI / 4.0, 0.5, 1.0, 0.8, 0.5, 1.1, 1.7, 2.0, 0.0492829603614238),
        ];
        for &(gamma, alpha, beta, r, phi, r0, phi0, s, want) in &cases {
            let sec = Sector { gamma, bc: BC::Robin { alpha, beta } };
            let got = green_sector(s, &sec, sp(r, phi), sp(r0, phi0), &budget()).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-5,
                "gamma={gamma} got {got} want {want}"
            );
        }
    }

    #[test]
    fn green_halfplane_reduction() {
        // gamma = pi: Green's function equals the half-plane image form
        // (1/2pi)[K0(sqrt(s)|z-z0|) -+ K0(sqrt(s)|z-zbar0|)]
        let s = 1.0;
        let (p, p0) = (sp(1.0, PI / 2.0), sp(1.5, PI / 2.0));
        let d_direct = chord(p, p0);
        let d_image = (p.r * p.r + p0.r * p0.r - 2.0 * p.r * p0.r * (p.phi + p0.phi).cos()).sqrt();
        for (bc, sign) in [(BC::Dirichlet, -1.0), (BC::Neumann, 1.0)] {
            let sec = Sector { gamma: PI, bc };
            let got = green_sector(s, &sec, p, p0, &budget()).unwrap();
            let want = (bessel_k0(s.sqrt() * d_direct) + sign * bessel_k0(s.sqrt() * d_image))
                / (2.0 * PI);
            assert!(((got - want) / want).abs() < 1e-6, "{bc:?}: {got} vs {want}");
        }
    }

    #[test]
    fn robin_alpha_zero_is_neumann() {
        let pn = Sector { gamma: 2.0, bc: BC::Neumann };
        let pr = Sector { gamma: 2.0, bc: BC::Robin { alpha: 0.0, beta: 1.0 } };
        let (p, p0) = (sp(0.8, 0.5), sp(1.1, 1.3));
        let a = green_sector(1.3, &pn, p, p0, &budget()).unwrap();
        let b = green_sector(1.3, &pr, p, p0, &budget()).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn green_symmetries() {
        let sec = Sector { gamma: 2.2, bc: BC::Dirichlet };
        let (p, p0) = (sp(0.9, 0.4), sp(1.2, 1.5));
        let a = green_sector(1.0, &sec, p, p0, &budget()).unwrap();
        let b = green_sector(1.0, &sec, p0, p, &budget()).unwrap();
        assert!((a - b).abs() < 1e-10 * a.abs());
        // reflection through the bisector
        let pr = sp(0.9, 2.2 - 0.4);
        let p0r = sp(1.2, 2.2 - 1.5);
        let c = green_sector(1.0, &sec, pr, p0r, &budget()).unwrap();
        assert!((a - c).abs() < 1e-10 * a.abs());
    }

    #[test]
    fn green_guards() {
        let sec = Sector { gamma: 1.5, bc: BC::Dirichlet };
        assert!(matches!(
            green_sector(1.0, &sec, sp(1.0, 0.5), sp(1.0, 0.5), &budget()),
            Err(SectorError::DiagonalSingularity)
        ));
        assert!(green_sector(1.0, &sec, sp(0.0, 0.5), sp(1.0, 0.5), &budget()).is_err());
        assert!(green_sector(1.0, &sec, sp(1.0, 1.6), sp(1.0, 0.5), &budget()).is_err());
        // both points on the same edge: no decay margin left
        assert!(matches!(
            green_sector(1.0, &sec, sp(1.0, 0.0), sp(0.5, 0.0), &budget()),
            Err(SectorError::DivergentConfiguration(_))
        ));
    }

    #[test]
    fn dirichlet_brace_separated_form() {
        // brace_D = 2 sinh(pi mu) sinh(mu phi<) sinh(mu (gamma - phi>)) / sinh(gamma mu),
        // i.e. 2 mu sinh(pi mu) Phi_D with the separated-solution
        // Phi_D = sinh(mu phi<) sinh(mu (gamma-phi>)) / (mu sinh(gamma mu))
        for &gamma in &[0.8, 1.7, 2.9, 4.4] {
            for &(phi, phi0) in &[(0.2f64, 0.5f64), (0.3, 0.3), (0.6, 0.1)] {
                let (phi, phi0) = (phi * gamma, phi0 * gamma);
                for &mu in &[0.3, 1.0, 2.5, 6.0] {
                    let dphi = (phi - phi0).abs();
                    let w = phi + phi0 - gamma;
                    let lhs = ((PI - dphi) * mu).cosh()
                        - (PI * mu).sinh() / (gamma * mu).sinh() * (w * mu).cosh()
                        + ((PI - gamma) * mu).sinh() / (gamma * mu).sinh() * (dphi * mu).cosh();
                    let lo = phi.min(phi0);
                    let hi = phi.max(phi0);
                    let rhs = 2.0 * (PI * mu).sinh() * (mu * lo).sinh()
                        * (mu * (gamma - hi)).sinh()
                        / (gamma * mu).sinh();
                    assert!(
                        ((lhs - rhs) / rhs).abs() < 1e-10,
                        "gamma={gamma} phi={phi} phi0={phi0} mu={mu}"
                    );
                }
            }
        }
    }

    #[test]
    fn dirichlet_as_robin_limit() {
        // G_R(alpha=1, beta -> 0) converges to G_D at first order in beta.
        // The leading correction is proportional to sinh((phi+phi0-gamma)mu),
        // so the sample points must keep phi+phi0 away from gamma or the
        // first order vanishes identically.
        let gamma = 1.9;
        let gd_sector = Sector { gamma, bc: BC::Dirichlet };
        for &(p, p0) in &[
            (sp(0.9, 0.7), sp(1.1, 1.0)),
            (sp(0.8, 0.4), sp(1.2, 0.9)),
            (sp(1.0, 1.2), sp(0.7, 1.5)),
        ] {
            let gd = green_sector(1.0, &gd_sector, p, p0, &budget()).unwrap();
            let mut diffs = Vec::new();
            for &beta in &[1e-2, 1e-3, 1e-4] {
                let gr = green_sector(
                    1.0,
                    &Sector { gamma, bc: BC::Robin { alpha: 1.0, beta } },
                    p,
                    p0,
                    &budget(),
                )
                .unwrap();
                diffs.push((gr - gd).abs());
            }
            // first order: each decade of beta shrinks the gap ~10x
            assert!(diffs[0] / diffs[1] > 4.0 && diffs[0] / diffs[1] < 25.0, "{diffs:?}");
            assert!(diffs[1] / diffs[2] > 4.0 && diffs[1] / diffs[2] < 25.0, "{diffs:?}");
        }
    }

    #[test]
    fn heat_sector_quarterplane_oracle() {
        let sec = Sector { gamma: PI / 2.0, bc: BC::Dirichlet };
        let il = InverseLaplaceParams::default();
        // the Euler contour reaches |arg s| ~ 1.449, so the angles must keep
        // phi+phi0 near the bisector sum gamma (delta1 > 1.52) and r sqrt|s|
        // within the Bessel series domain (r <~ 0.5 at t >= 0.1)
        let configs = [
            (0.1, 0.50, PI / 4.0, 0.50, PI / 4.0),
            (0.15, 0.45, 0.80, 0.50, 0.77),
            (0.1, 0.35, 0.70, 0.45, 0.85),
            (0.2, 0.50, 0.82, 0.40, 0.75),
            (0.12, 0.40, 0.75, 0.40, 0.80),
        ];
        for &(t, r, phi, r0, phi0) in &configs {
            let got = heat_sector(t, &sec, sp(r, phi), sp(r0, phi0), &budget(), &il).unwrap();
            let z = [r * phi.cos(), r * phi.sin()];
            let zp = [r0 * phi0.cos(), r0 * phi0.sin()];
            let want = heat_quarterplane(t, z, zp, BC::Dirichlet, BC::Dirichlet).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-3,
                "t={t} r={r}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn heat_sector_halfplane_neumann_oracle() {
        let sec = Sector { gamma: PI, bc: BC::Neumann };
        let il = InverseLaplaceParams::default();
        let (t, p, p0) = (0.1, sp(0.7, PI / 3.0), sp(0.7, PI / 3.0));
        let got = heat_sector(t, &sec, p, p0, &budget(), &il).unwrap();
        let z = [p.r * p.phi.cos(), p.r * p.phi.sin()];
        let want = crate::kernels::heat_halfplane(t, z, z, BC::Neumann).unwrap();
        assert!(((got - want) / want).abs() < 1e-3, "{got} vs {want}");
    }

    #[test]
    fn heat_sector_small_time_diagonal() {
        // interior diagonal: t * H -> 1/4pi as t -> 0 (locality: the corner
        // and edges stop being felt)
        let sec = Sector { gamma: PI / 2.0, bc: BC::Dirichlet };
        let il = InverseLaplaceParams::default();
        let p = sp(0.35, PI / 4.0);
        // t small enough that the edges contribute < 1%; the Euler contour
        // is out of its series-validity domain here, so this exercises the
        // real-axis fallback
        let t = 0.012;
        let got = heat_sector(t, &sec, p, p, &budget(), &il).unwrap();
        assert!(
            (t * got - 1.0 / (4.0 * PI)).abs() < 0.02 / (4.0 * PI),
            "t*H = {} vs 1/4pi = {}",
            t * got,
            1.0 / (4.0 * PI)
        );
    }

    #[test]
    fn heat_sector_positivity() {
        let sec = Sector { gamma: 2.0, bc: BC::Dirichlet };
        let il = InverseLaplaceParams::default();
        for &(r, phi) in &[(0.3, 0.9), (0.35, 1.0), (0.3, 1.2)] {
            let v = heat_sector(0.15, &sec, sp(r, phi), sp(r, phi), &budget(), &il).unwrap();
            assert!(v > 0.0);
        }
    }

    #[test]
    fn heat_sector_argument_guard() {
        let sec = Sector { gamma: 1.2, bc: BC::Dirichlet };
        let il = InverseLaplaceParams::default();
        assert!(matches!(
            heat_sector(0.001, &sec, sp(1.0, 0.3), sp(1.0, 0.6), &budget(), &il),
            Err(SectorError::ArgumentTooLarge(_))
        ));
    }
}
