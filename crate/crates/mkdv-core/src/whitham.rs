//! Whitham modulation layer: characteristic speeds, the expanding-cone
//! geometry, inversion of the self-similar relation `12ξ = W₂(c₊, d, c₋)`,
//! the region-dependent phase function `g(k, ξ)`, and the phase integrals
//! `B(ξ)`, `Δ(ξ)`, `x₀(ξ)` of the modulated wave.

use crate::error::{MkdvError, Result};
use crate::quad::{self, Side, QUAD_TOL};
use crate::scattering::{EigenRay, SpectralData};
use crate::specfun::{branch_sqrt, branch_sqrt_oncut, elliptic_e, elliptic_k, Modulus};
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Ordered wave parameters `β₁ <= β₂ <= β₃` of the modulated traveling wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhithamTriple {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
}

impl WhithamTriple {
    pub fn new(beta1: f64, beta2: f64, beta3: f64) -> Result<Self> {
        if beta1 <= beta2 && beta2 <= beta3 {
            Ok(WhithamTriple {
                beta1,
                beta2,
                beta3,
            })
        } else {
            Err(MkdvError::Domain(format!(
                "wave parameters must be ordered, got ({beta1}, {beta2}, {beta3})"
            )))
        }
    }

    /// Squared modulus `m² = (β₂² - β₁²)/(β₃² - β₁²)`.
    pub fn modulus_sq(&self) -> f64 {
        (self.beta2 * self.beta2 - self.beta1 * self.beta1)
            / (self.beta3 * self.beta3 - self.beta1 * self.beta1)
    }

    pub fn modulus(&self) -> Result<Modulus> {
        Modulus::new(self.modulus_sq().clamp(0.0, 1.0).sqrt())
    }
}

/// Characteristic speed `W_j`, `j ∈ {1,2,3}`:
/// `W_j = 2Σβ² + 4 Π_{k≠j}(β_j² - β_k²) / (β_j² + α)` with
/// `α = -β₃² + (β₃² - β₁²) E(m)/K(m)`.
///
/// The degenerate edges `m -> 0` (`β₂ -> ±β₁`) and `m -> 1` (`β₂ -> β₃`)
/// are 0/0 in that formula and are returned from their closed limits.
pub fn whitham_speed(j: usize, t: &WhithamTriple) -> Result<f64> {
    if !(1..=3).contains(&j) {
        return Err(MkdvError::Domain(format!("speed index {j} not in 1..=3")));
    }
    let (s1, s2, s3) = (t.beta1 * t.beta1, t.beta2 * t.beta2, t.beta3 * t.beta3);
    let sum2 = 2.0 * (s1 + s2 + s3);
    let msq = t.modulus_sq();
    if !(0.0..=1.0).contains(&msq) {
        return Err(MkdvError::Domain(format!(
            "modulus² = {msq} outside [0,1] for triple {t:?}"
        )));
    }
    const EDGE: f64 = 1e-12;
    if msq < EDGE {
        // Merged trailing pair β₂² = β₁².
        return Ok(match j {
            1 | 2 => -6.0 * s3 + 12.0 * s1,
            _ => 6.0 * s3,
        });
    }
    if 1.0 - msq < EDGE {
        // Merged leading pair β₂ = β₃.
        return Ok(match j {
            1 => 6.0 * s1,
            _ => 4.0 * s3 + 2.0 * s1,
        });
    }
    let m = msq.sqrt();
    let ek = elliptic_e(m)? / elliptic_k(m)?;
    let alpha = -s3 + (s3 - s1) * ek;
    let sj = [s1, s2, s3][j - 1];
    let mut prod = 4.0;
    for (i, sk) in [s1, s2, s3].iter().enumerate() {
        if i + 1 != j {
            prod *= sj - sk;
        }
    }
    Ok(sum2 + prod / (sj + alpha))
}

/// Expanding-cone edge speeds `(v_trail, v_lead) = (-6c₋²+12c₊², 4c₋²+2c₊²)`.
pub fn dsw_cone(c_plus: f64, c_minus: f64) -> Result<(f64, f64)> {
    if !(c_minus > c_plus && c_plus >= 0.0) {
        return Err(MkdvError::Domain(format!(
            "cone needs c_minus > c_plus >= 0, got ({c_minus}, {c_plus})"
        )));
    }
    Ok((
        -6.0 * c_minus * c_minus + 12.0 * c_plus * c_plus,
        4.0 * c_minus * c_minus + 2.0 * c_plus * c_plus,
    ))
}

/// `∂W₂/∂β₂`, used by the Newton polish in [`invert_d`].
fn dw2_dbeta2(c_plus: f64, d: f64, c_minus: f64) -> Result<f64> {
    let (s1, s3) = (c_plus * c_plus, c_minus * c_minus);
    let u = d * d;
    let msq = (u - s1) / (s3 - s1);
    let m = msq.sqrt();
    let e = elliptic_e(m)?;
    let k = elliptic_k(m)?;
    let n = (u - s1) * (u - s3);
    let dn = 2.0 * u - s1 - s3;
    let den = (u - s3) + (s3 - s1) * e / k;
    // d(E/K)/dm with E' = (E-K)/m, K' = (E - (1-m²)K)/(m(1-m²)).
    let ep = (e - k) / m;
    let kp = (e - (1.0 - msq) * k) / (m * (1.0 - msq));
    let dek_dm = (ep * k - e * kp) / (k * k);
    let dden_du = 1.0 + dek_dm / (2.0 * m);
    Ok(2.0 * d * (2.0 + 4.0 * (dn * den - n * dden_du) / (den * den)))
}

/// Solve `12ξ = W₂(c₊, d, c₋)` for `d ∈ (c₊, c₋)`.
///
/// Bracketed bisection followed by a Newton polish with the analytic
/// derivative; monotonicity of `W₂` in `β₂ > 0` guarantees the root.
pub fn invert_d(xi: f64, c_plus: f64, c_minus: f64) -> Result<f64> {
    if c_plus <= 0.0 {
        return Err(MkdvError::Unsupported(
            "d(ξ) inversion needs c_plus > 0 (genuine nonlinearity fails at β₂ = 0)".into(),
        ));
    }
    let (trail, lead) = dsw_cone(c_plus, c_minus)?;
    let target = 12.0 * xi;
    if !(target > trail && target < lead) {
        return Err(MkdvError::Domain(format!(
            "ray 12ξ = {target} outside the open cone ({trail}, {lead})"
        )));
    }
    let w2 = |d: f64| -> Result<f64> { whitham_speed(2, &WhithamTriple::new(c_plus, d, c_minus)?) };
    let mut lo = c_plus;
    let mut hi = c_minus;
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if w2(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut d = 0.5 * (lo + hi);
    for _ in 0..8 {
        let f = w2(d)? - target;
        let df = dw2_dbeta2(c_plus, d, c_minus)?;
        let step = f / df;
        if !step.is_finite() {
            break;
        }
        let dn = d - step;
        if dn <= c_plus || dn >= c_minus {
            break;
        }
        d = dn;
        if step.abs() < 1e-16 * c_minus {
            break;
        }
    }
    Ok(d)
}

/// Phase-region kind in the ray variable `ξ = x/(12t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GKind {
    Right,
    Dsw,
    Left,
}

pub fn g_kind(xi: f64, c_plus: f64, c_minus: f64) -> GKind {
    let (s3, s1) = (c_minus * c_minus, c_plus * c_plus);
    if xi >= s3 / 3.0 + s1 / 6.0 {
        GKind::Right
    } else if xi >= -s3 / 2.0 + s1 {
        GKind::Dsw
    } else {
        GKind::Left
    }
}

/// Constant-background phase `ĝ_c(k, ξ) = (4k² - 2c² + 12ξ) √(k² + c²)`.
pub fn g_const(k: Complex64, xi: f64, c: f64) -> Complex64 {
    (4.0 * k * k - 2.0 * c * c + 12.0 * xi) * branch_sqrt(k, c)
}

fn g_const_oncut(y: f64, side: Side, xi: f64, c: f64) -> Complex64 {
    Complex64::new(-4.0 * y * y - 2.0 * c * c + 12.0 * xi, 0.0) * branch_sqrt_oncut(y, c, side)
}

/// Coefficients of the odd quintic `P(s) = s⁵ + s³(ξ + Σ/2) + (b₁ + ξ b₀) s`
/// in the oscillatory-region phase `g' = 12 P / R`. Returns `(Σ, b₀, b₁)`.
fn dsw_poly_coeffs(d: f64, c_plus: f64, c_minus: f64) -> Result<(f64, f64, f64)> {
    let (s1, s3) = (c_plus * c_plus, c_minus * c_minus);
    let u = d * d;
    let msq = ((u - s1) / (s3 - s1)).clamp(0.0, 1.0);
    let m = msq.sqrt();
    let ek = elliptic_e(m)? / elliptic_k(m)?;
    let b0 = s3 - (s3 - s1) * ek;
    let sigma = s3 + s1 + u;
    let b1 = (s3 * s1 + s3 * u + s1 * u) / 3.0 - sigma / 6.0 * b0;
    Ok((sigma, b0, b1))
}

/// The two path integrals from `ic₋` to `k` combining into the
/// oscillatory-region phase `g = 12 (A + ξ B)`:
/// `A = ∫ (s⁵ + s³Σ/2 + b₁ s)/R ds`, `B = ∫ (s³ + b₀ s)/R ds`.
///
/// Needs `Re k > 0`; the square-root endpoint at `ic₋` is removed by the
/// substitution `u = v²` along the straight path.
fn dsw_g_parts(k: Complex64, d: f64, c_plus: f64, c_minus: f64) -> Result<(Complex64, Complex64)> {
    debug_assert!(k.re > 0.0);
    let (sigma, b0, b1) = dsw_poly_coeffs(d, c_plus, c_minus)?;
    let a = I * c_minus;
    let dir = k - a;
    let sqrt_dir = dir.sqrt();
    // Match the factored root √(s-ic₋)·√(s+ic₋)·(rest) to the R branch once.
    let s_mid = a + dir * 0.5;
    let prod_mid = sqrt_dir * 0.5f64.sqrt() * (s_mid + a).sqrt();
    let sigma_branch = {
        let ratio = branch_sqrt(s_mid, c_minus) / prod_mid;
        if (ratio - 1.0).norm() < (ratio + 1.0).norm() {
            1.0
        } else {
            -1.0
        }
    };
    let integrand = |v: f64, part_a: bool| -> Complex64 {
        let s = a + dir * (v * v);
        let s2 = s * s;
        let p = if part_a {
            s * (s2 * s2 + s2 * (0.5 * sigma) + b1)
        } else {
            s * (s2 + b0)
        };
        let root =
            sigma_branch * sqrt_dir * (s + a).sqrt() * branch_sqrt(s, d) * branch_sqrt(s, c_plus);
        // du = 2v dv cancels the 1/v from √(s - ic₋) = √dir · v.
        2.0 * dir * p / root
    };
    let ia = quad::tanh_sinh(|v| integrand(v, true), 0.0, 1.0, QUAD_TOL)?;
    let ib = quad::tanh_sinh(|v| integrand(v, false), 0.0, 1.0, QUAD_TOL)?;
    Ok((ia, ib))
}

/// Phase function `g(k, ξ)` for off-axis `k` (`Re k ≠ 0`); the region is
/// chosen from the `ξ` thresholds. On-axis points need [`g_phase_oncut`].
pub fn g_phase(k: Complex64, xi: f64, c_plus: f64, c_minus: f64) -> Result<Complex64> {
    if k.re == 0.0 {
        return Err(MkdvError::Domain(
            "on-axis phase evaluation requires a side flag (use g_phase_oncut)".into(),
        ));
    }
    match g_kind(xi, c_plus, c_minus) {
        GKind::Right => Ok(g_const(k, xi, c_plus)),
        GKind::Left => Ok(g_const(k, xi, c_minus)),
        GKind::Dsw => {
            if k.re < 0.0 {
                // The phase is odd: g(-k) = -g(k).
                return Ok(-g_phase(-k, xi, c_plus, c_minus)?);
            }
            let d = invert_d(xi, c_plus, c_minus)?;
            let (ia, ib) = dsw_g_parts(k, d, c_plus, c_minus)?;
            Ok(12.0 * (ia + xi * ib))
        }
    }
}

/// Boundary value `g_±(iy, ξ)` on the imaginary axis.
pub fn g_phase_oncut(y: f64, side: Side, xi: f64, c_plus: f64, c_minus: f64) -> Result<Complex64> {
    match g_kind(xi, c_plus, c_minus) {
        GKind::Right => Ok(if y.abs() < c_plus {
            g_const_oncut(y, side, xi, c_plus)
        } else {
            g_const(Complex64::new(0.0, y), xi, c_plus)
        }),
        GKind::Left => Ok(if y.abs() < c_minus {
            g_const_oncut(y, side, xi, c_minus)
        } else {
            g_const(Complex64::new(0.0, y), xi, c_minus)
        }),
        GKind::Dsw => {
            if y < 0.0 {
                // Schwartz symmetry: g_s(-iy) = conj(g_s(iy)), same side.
                return Ok(g_phase_oncut(-y, side, xi, c_plus, c_minus)?.conj());
            }
            let d = invert_d(xi, c_plus, c_minus)?;
            let (sigma, b0, b1) = dsw_poly_coeffs(d, c_plus, c_minus)?;
            let b = b1 + xi * b0;
            // P(iy) = i p(y) with real p.
            let p = |yy: f64| yy.powi(5) - yy.powi(3) * (xi + 0.5 * sigma) + b * yy;

            if y >= c_minus {
                // Above the spectrum: g(iy) = -12 i ∫_{c₋}^{y} p/|R| dy'.
                if y == c_minus {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let v = quad::tanh_sinh_ext(
                    |yy, da, _| {
                        let r =
                            (da * (yy + c_minus) * (yy * yy - d * d) * (yy * yy - c_plus * c_plus))
                                .sqrt();
                        Complex64::new(p(yy) / r, 0.0)
                    },
                    c_minus,
                    y,
                    QUAD_TOL,
                )?;
                return Ok(-12.0 * I * v);
            }

            // g_±(iy₀) = 12 ∫_{y₀}^{c₋} p(y') / R_side(iy') dy', assembled
            // piecewise with distance-form roots at the band edges.
            let mut total = Complex64::new(0.0, 0.0);
            // Outer band (max(y, d), c₋): R_± = ∓ |R|.
            {
                let lo = y.max(d);
                let v = quad::tanh_sinh_ext(
                    |yy, da, db| {
                        let near_d = if lo == d { da } else { yy - d };
                        let r = (db * near_d).sqrt()
                            * ((c_minus + yy) * (yy + d) * (yy * yy - c_plus * c_plus)).sqrt();
                        Complex64::new(p(yy) / r, 0.0)
                    },
                    lo,
                    c_minus,
                    QUAD_TOL,
                )?;
                total += -side.sign() * v;
            }
            if y < d {
                // Gap (max(y, c₊), d): R = i |R|, continuous across the axis.
                let lo = y.max(c_plus);
                let v = quad::tanh_sinh_ext(
                    |yy, da, db| {
                        let near_cp = if lo == c_plus { da } else { yy - c_plus };
                        let r = ((c_minus * c_minus - yy * yy) * (db * (d + yy))).sqrt()
                            * (near_cp * (yy + c_plus)).sqrt();
                        Complex64::new(p(yy) / r, 0.0)
                    },
                    lo,
                    d,
                    QUAD_TOL,
                )?;
                total += -I * v;
            }
            if y < c_plus {
                // Inner band (y, c₊): R_± = ± |R|.
                let v = quad::tanh_sinh_ext(
                    |yy, _da, db| {
                        let r = ((c_minus * c_minus - yy * yy) * (d * d - yy * yy)).sqrt()
                            * (db * (c_plus + yy)).sqrt();
                        Complex64::new(p(yy) / r, 0.0)
                    },
                    y,
                    c_plus,
                    QUAD_TOL,
                )?;
                total += side.sign() * v;
            }
            Ok(12.0 * total)
        }
    }
}

/// Oscillatory-wave state at a ray: `d`, modulus, the phase quantities.
#[derive(Debug, Clone, Copy)]
pub struct DswState {
    pub xi: f64,
    pub d: f64,
    pub m: f64,
    /// `B(ξ) = -12π √(c₋²-c₊²) (ξ - (c₋²+c₊²+d²)/6) / K(m)`.
    pub b_phase: f64,
    pub delta: f64,
    /// Traveling-wave phase `x₀ = -K(m)Δ/π + K(m)`.
    pub x0: f64,
}

/// Assemble the modulated-wave state at a ray `ξ` strictly inside the cone:
/// `d(ξ)` from the speed relation, `Δ(ξ)` from the band integrals of
/// `ln(|a|² T̃_n²)`, and the wave phase `x₀`.
pub fn dsw_state(xi: f64, data: &SpectralData) -> Result<DswState> {
    let (cp, cm) = (data.c_plus(), data.c_minus());
    if !data.has_closed_form_a() {
        return Err(MkdvError::Unsupported(
            "the modulated-wave phase needs closed-form scattering data".into(),
        ));
    }
    if cp <= 0.0 {
        return Err(MkdvError::Unsupported(
            "oscillatory-region phase requires c_plus > 0".into(),
        ));
    }
    let d = invert_d(xi, cp, cm)?;
    let msq = ((d * d - cp * cp) / (cm * cm - cp * cp)).clamp(0.0, 1.0);
    let m = msq.sqrt();
    let k_m = elliptic_k(m)?;
    let ctil = (cm * cm - cp * cp).sqrt();
    let b_phase = -12.0 * PI * ctil / k_m * (xi - (cm * cm + cp * cp + d * d) / 6.0);

    let n = data.n_faster(xi);
    // I₁ = ∫_{id}^{ic₋} ln(|a|² T̃²) s ds / R₊ = +∫_d^{c₋} ln(..) y dy / |R|
    // since R₊ = -|R| on that band and s ds = -y dy.
    let i1 = quad::tanh_sinh_ext(
        |y, da, db| {
            let lna = data
                .ln_abs_a_sq_oncut(
                    y,
                    crate::scattering::EdgeHint {
                        d_cm: Some(db),
                        d_cp: None,
                    },
                )
                .unwrap_or(f64::NAN);
            let lt = data.log_ttilde_sq_on_axis(y, n);
            let r = (db * da).sqrt() * ((cm + y) * (y + d) * (y * y - cp * cp)).sqrt();
            (lt + lna) * y / r
        },
        d,
        cm,
        QUAD_TOL,
    )?;
    // I₂ = ∫_0^{ic₊} ln T̃² s ds / R₊ = -∫_0^{c₊} ln T̃²(iy) y dy / |R|,
    // R₊ = +|R| on the inner band.
    let i2 = if n > 0 {
        -quad::tanh_sinh_ext(
            |y, _da, db| {
                let lt = data.log_ttilde_sq_on_axis(y, n);
                let r = ((cm * cm - y * y) * (d * d - y * y)).sqrt() * (db * (cp + y)).sqrt();
                lt * y / r
            },
            0.0,
            cp,
            QUAD_TOL,
        )?
    } else {
        Complex64::new(0.0, 0.0)
    };
    let delta_c = -ctil / k_m * (i1 + i2);
    if delta_c.im.abs() > 1e-7 * delta_c.re.abs().max(1.0) {
        return Err(MkdvError::Accuracy(format!(
            "phase integral Δ came out non-real: {delta_c}"
        )));
    }
    let delta = delta_c.re;
    let x0 = -k_m * delta / PI + k_m;
    Ok(DswState {
        xi,
        d,
        m,
        b_phase,
        delta,
        x0,
    })
}

/// Speed of a soliton (`Re κ = 0`: `2c² + 4|κ|²`) or breather
/// (`4χ₂² + 6c² - 12χ₁²`) on the constant background `c`.
pub fn breather_speed_const(kappa: Complex64, c: f64) -> f64 {
    if kappa.re == 0.0 {
        return 2.0 * c * c + 4.0 * kappa.norm_sqr();
    }
    let chi = branch_sqrt(kappa, c);
    4.0 * chi.im * chi.im + 6.0 * c * c - 12.0 * chi.re * chi.re
}

/// Trapped-breather criterion: the spectral point is slower than the leading
/// edge on the `c₊` background and faster than the trailing edge on `c₋`.
pub fn is_trapped(kappa: Complex64, c_plus: f64, c_minus: f64) -> Result<bool> {
    let kappa = quarter_plane(kappa);
    if kappa.re == 0.0 {
        return Ok(false);
    }
    let (trail, lead) = dsw_cone(c_plus, c_minus)?;
    Ok(breather_speed_const(kappa, c_plus) < lead && breather_speed_const(kappa, c_minus) > trail)
}

fn quarter_plane(kappa: Complex64) -> Complex64 {
    if kappa.re < 0.0 {
        -kappa.conj()
    } else {
        kappa
    }
}

/// Envelope speed of a breather trapped inside the oscillatory cone, from
/// the vanishing of `Im g(κ, ξ)`: the root ray is bracketed by bisection and
/// the speed is returned as `12 · (-Im A / Im B)`, the ratio of the two path
/// integrals evaluated at the root.
pub fn breather_speed_elliptic(kappa: Complex64, c_plus: f64, c_minus: f64) -> Result<f64> {
    let kappa = quarter_plane(kappa);
    if !is_trapped(kappa, c_plus, c_minus)? {
        return Err(MkdvError::Domain(format!(
            "{kappa} is not trapped; use breather_speed_const on the carrying background"
        )));
    }
    if c_plus <= 0.0 {
        return Err(MkdvError::Unsupported(
            "elliptic breather speed needs c_plus > 0".into(),
        ));
    }
    let (trail, lead) = dsw_cone(c_plus, c_minus)?;
    let eps = 1e-7 * (lead - trail);
    let im_g = |xi: f64| -> Result<f64> { Ok(g_phase(kappa, xi, c_plus, c_minus)?.im) };
    let mut lo = trail / 12.0 + eps;
    let mut hi = lead / 12.0 - eps;
    let flo = im_g(lo)?;
    if flo * im_g(hi)? > 0.0 {
        return Err(MkdvError::Accuracy(format!(
            "Im g does not change sign across the cone for {kappa}"
        )));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if im_g(mid)? * flo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let xi_star = 0.5 * (lo + hi);
    let d = invert_d(xi_star, c_plus, c_minus)?;
    let (ia, ib) = dsw_g_parts(kappa, d, c_plus, c_minus)?;
    Ok(12.0 * (-ia.im / ib.im))
}

/// Large-time destination and labeling speed of one eigenvalue.
///
/// Solitons always outrun the cone. A trapped breather with `c₊ > 0` gets
/// its envelope speed from the oscillatory phase; at `c₊ = 0` that phase
/// theory is unavailable and the zero-background speed, clamped into the
/// cone, labels the ordering.
pub fn eigen_ray_and_speed(kappa: Complex64, c_plus: f64, c_minus: f64) -> Result<(EigenRay, f64)> {
    let (trail, lead) = dsw_cone(c_plus, c_minus)?;
    if kappa.re == 0.0 {
        return Ok((EigenRay::RightConst, breather_speed_const(kappa, c_plus)));
    }
    let vp = breather_speed_const(kappa, c_plus);
    if vp >= lead {
        return Ok((EigenRay::RightConst, vp));
    }
    let vm = breather_speed_const(kappa, c_minus);
    if vm <= trail {
        return Ok((EigenRay::LeftConst, vm));
    }
    let span = lead - trail;
    let v = if c_plus > 0.0 {
        breather_speed_elliptic(kappa, c_plus, c_minus)?
    } else {
        breather_speed_const(kappa, 0.0).clamp(trail + 1e-9 * span, lead - 1e-9 * span)
    };
    Ok((EigenRay::Trapped, v))
}

/// One row of the self-similar modulation solution.
#[derive(Debug, Clone, Copy)]
pub struct SelfSimilarRow {
    pub z: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
}

/// Self-similar solution `β_j(z)`, `z = x/t`, for step data between `c₋`
/// and `c₊` with `c₋ > |c₊|`.
///
/// For `c₊ > 0` this is `(c₊, d(z/12), c₋)` inside the cone. For `c₊ < 0`
/// the same branch extends down to `z* = -6c₋² + 12c₊²` (the speeds depend
/// on the squares only), and below `z*` the solution continues on the
/// symmetric component `β₂ = -β₁ = √((z + 6c₋²)/12)`, on which `W₁ = W₂`
/// holds identically, until `z = -6c₋²`. Outside those ranges the triple is
/// clamped to the adjacent constant state.
pub fn whitham_selfsimilar(
    z_grid: &[f64],
    c_plus: f64,
    c_minus: f64,
) -> Result<Vec<SelfSimilarRow>> {
    if c_minus <= c_plus.abs() {
        return Err(MkdvError::Domain(format!(
            "self-similar solution needs c_minus > |c_plus|, got ({c_plus}, {c_minus})"
        )));
    }
    let cp_abs = c_plus.abs();
    let lead = 4.0 * c_minus * c_minus + 2.0 * cp_abs * cp_abs;
    let z_star = -6.0 * c_minus * c_minus + 12.0 * cp_abs * cp_abs;
    z_grid
        .iter()
        .map(|&z| {
            let (b1, b2) = if z >= lead {
                (c_plus, c_minus)
            } else if z > z_star && cp_abs > 0.0 {
                (c_plus, invert_d(z / 12.0, cp_abs, c_minus)?)
            } else if c_plus >= 0.0 {
                (c_plus, cp_abs)
            } else if z > -6.0 * c_minus * c_minus {
                let b2 = ((z + 6.0 * c_minus * c_minus) / 12.0).sqrt();
                (-b2, b2)
            } else {
                (0.0, 0.0)
            };
            Ok(SelfSimilarRow {
                z,
                beta1: b1,
                beta2: b2,
                beta3: c_minus,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::step_scattering;
    use crate::util::SmallRng;

    #[test]
    fn speed_endpoint_values() {
        // Trailing: W₂(c₊, c₊, c₋) = -6c₋² + 12c₊² = -1.92 at (0.4, _, 0.8).
        let t = WhithamTriple::new(0.4, 0.4, 0.8).unwrap();
        assert!((whitham_speed(2, &t).unwrap() + 1.92).abs() < 1e-12);
        // Leading: W₂(c₊, c₋, c₋) = 4c₋² + 2c₊² = 2.88.
        let t = WhithamTriple::new(0.4, 0.8, 0.8).unwrap();
        assert!((whitham_speed(2, &t).unwrap() - 2.88).abs() < 1e-12);
        // W₃(β, β, β₃) = 6β₃².
        let t = WhithamTriple::new(0.3, 0.3, 0.9).unwrap();
        assert!((whitham_speed(3, &t).unwrap() - 6.0 * 0.81).abs() < 1e-12);
        // The small-m limit is approached by the general formula (series in
        // m² of E/K enters the denominator).
        for eps in [1e-4, 1e-6] {
            let t = WhithamTriple::new(0.4, 0.4 + eps, 0.8).unwrap();
            let w = whitham_speed(2, &t).unwrap();
            assert!((w + 1.92).abs() < 60.0 * eps.sqrt(), "eps={eps}: {w}");
        }
        // And the m -> 1 limit, approached logarithmically.
        let t = WhithamTriple::new(0.4, 0.8 - 1e-7, 0.8).unwrap();
        let w = whitham_speed(2, &t).unwrap();
        assert!((w - 2.88).abs() < 0.05, "leading limit: {w}");
    }

    #[test]
    fn strict_hyperbolicity_sampled() {
        let mut rng = SmallRng::new(31);
        for _ in 0..200 {
            let b1 = rng.range(0.05, 0.5);
            let b2 = b1 + rng.range(0.01, 0.5);
            let b3 = b2 + rng.range(0.01, 0.5);
            let t = WhithamTriple::new(b1, b2, b3).unwrap();
            let w1 = whitham_speed(1, &t).unwrap();
            let w2 = whitham_speed(2, &t).unwrap();
            let w3 = whitham_speed(3, &t).unwrap();
            assert!(w3 > w2 && w2 > w1, "({b1},{b2},{b3}): {w1} {w2} {w3}");
        }
    }

    #[test]
    fn cone_values() {
        let (tr, ld) = dsw_cone(0.4, 0.8).unwrap();
        assert!((tr + 1.92).abs() < 1e-14 && (ld - 2.88).abs() < 1e-14);
        let (a, b) = dsw_cone(0.0, 0.9).unwrap();
        assert!((a + 6.0 * 0.81).abs() < 1e-15 && (b - 4.0 * 0.81).abs() < 1e-15);
        assert!(b > a);
        assert!(dsw_cone(0.9, 0.4).is_err());
    }

    #[test]
    fn invert_d_residual_and_monotonicity() {
        let (cp, cm) = (0.4, 0.8);
        let (trail, lead) = dsw_cone(cp, cm).unwrap();
        let mut prev = 0.0;
        for i in 1..200 {
            let xi = (trail + (lead - trail) * i as f64 / 200.0) / 12.0;
            let d = invert_d(xi, cp, cm).unwrap();
            assert!(d > cp && d < cm && d > prev, "sample {i}");
            let w2 = whitham_speed(2, &WhithamTriple::new(cp, d, cm).unwrap()).unwrap();
            assert!(
                (w2 - 12.0 * xi).abs() < 1e-10,
                "residual {} at sample {i}",
                w2 - 12.0 * xi
            );
            prev = d;
        }
        // Endpoint limits.
        assert!((invert_d((trail + 1e-9) / 12.0, cp, cm).unwrap() - cp).abs() < 1e-4);
        assert!((invert_d((lead - 1e-9) / 12.0, cp, cm).unwrap() - cm).abs() < 1e-4);
        // Outside the open cone and at c₊ = 0: rejected.
        assert!(invert_d(0.4, cp, cm).is_err());
        assert!(invert_d(0.0, 0.0, cm).is_err());
    }

    #[test]
    fn g_const_closed_form_checks() {
        // Utmost left: g(k₀, ξ) = -8(-ξ + c₋²/2)^{3/2} at k₀ = √(-ξ - c₋²/2).
        let cm = 0.8f64;
        let xi = -0.6f64;
        let k0 = (-xi - cm * cm / 2.0).sqrt();
        let g = g_phase(Complex64::new(k0, 0.0), xi, 0.4, cm).unwrap();
        let expect = -8.0 * (-xi + cm * cm / 2.0).powf(1.5);
        assert!((g.re - expect).abs() < 1e-12 && g.im.abs() < 1e-14);
        // Im g(κ, ξ) = Im √(κ²+c₋²) · (12ξ - V) in the left region.
        let kap = Complex64::new(0.7, 1.2);
        let chi = branch_sqrt(kap, cm);
        let v = breather_speed_const(kap, cm);
        let g = g_phase(kap, xi, 0.4, cm).unwrap();
        assert!((g.im - chi.im * (12.0 * xi - v)).abs() < 1e-10);
    }

    #[test]
    fn g_dsw_structure() {
        let (cp, cm) = (0.4, 0.8);
        let xi = 0.02;
        let d = invert_d(xi, cp, cm).unwrap();
        // g'(±id) = 0 <=> the quintic vanishes at id, i.e. the speed
        // relation: d⁴ - d²(ξ + Σ/2) + b = 0.
        let (sigma, b0, b1) = dsw_poly_coeffs(d, cp, cm).unwrap();
        let b = b1 + xi * b0;
        let res = d.powi(4) - d * d * (xi + 0.5 * sigma) + b;
        assert!(res.abs() < 1e-11, "P(id) residual {res}");

        // Large-k decay: |g - (4k³ + 12ξk)| = O(1/k), ratio test at 50, 100.
        let r50 = {
            let k = Complex64::new(50.0, 0.3);
            (g_phase(k, xi, cp, cm).unwrap() - (4.0 * k * k * k + 12.0 * xi * k)).norm()
        };
        let r100 = {
            let k = Complex64::new(100.0, 0.3);
            (g_phase(k, xi, cp, cm).unwrap() - (4.0 * k * k * k + 12.0 * xi * k)).norm()
        };
        assert!(r50 < 0.05, "residual at 50: {r50}");
        let ratio = r50 / r100;
        assert!((1.4..2.6).contains(&ratio), "decay ratio {ratio}");

        // Oddness and Schwartz symmetry.
        let k = Complex64::new(0.31, 0.57);
        let g = g_phase(k, xi, cp, cm).unwrap();
        assert!((g + g_phase(-k, xi, cp, cm).unwrap()).norm() < 1e-9);
        assert!((g.conj() - g_phase(k.conj(), xi, cp, cm).unwrap()).norm() < 1e-9);
    }

    #[test]
    fn g_dsw_jump_relations() {
        // Re g₊ = -B/2 on the gap (id, ic₊); Im g₊ = 0 on the bands.
        let (cp, cm) = (0.4, 0.8);
        let xi = 0.05;
        let data = step_scattering(cm, cp).unwrap();
        let st = dsw_state(xi, &data).unwrap();
        let y_gap = 0.5 * (cp + st.d);
        let gp = g_phase_oncut(y_gap, Side::Plus, xi, cp, cm).unwrap();
        assert!(
            (gp.re + 0.5 * st.b_phase).abs() < 1e-8,
            "Re g₊ = {} vs -B/2 = {}",
            gp.re,
            -0.5 * st.b_phase
        );
        let gm = g_phase_oncut(y_gap, Side::Minus, xi, cp, cm).unwrap();
        assert!((gp.re - gm.re + st.b_phase).abs() < 1e-8);
        for &y in &[0.75, 0.55, 0.3, 0.1, -0.62] {
            let g = g_phase_oncut(y, Side::Plus, xi, cp, cm).unwrap();
            if y.abs() > st.d || y.abs() < cp {
                assert!(g.im.abs() < 1e-8, "Im g₊(i{y}) = {}", g.im);
            }
        }
        // Off-axis consistency: Richardson extrapolation toward the axis
        // (the straight-path quadrature cannot run arbitrarily close to the
        // cut, where the path grazes the band edge at id).
        let g1 = g_phase(Complex64::new(0.01, y_gap), xi, cp, cm).unwrap();
        let g2 = g_phase(Complex64::new(0.02, y_gap), xi, cp, cm).unwrap();
        assert!(
            (2.0 * g1 - g2 - gp).norm() < 3e-3,
            "extrapolated {}",
            2.0 * g1 - g2
        );
    }

    #[test]
    fn b_delta_and_phase() {
        let data = step_scattering(0.8, 0.4).unwrap();
        // B vanishes exactly at ξ = (c₋² + c₊² + d²)/6 (fixed point).
        let mut xi0 = 0.05;
        for _ in 0..60 {
            let d = invert_d(xi0, 0.4, 0.8).unwrap();
            xi0 = (0.64 + 0.16 + d * d) / 6.0;
        }
        let st = dsw_state(xi0, &data).unwrap();
        assert!(st.b_phase.abs() < 1e-9, "B(ξ₀) = {}", st.b_phase);

        // tB = xU + tV with U = -π√(c₋²-c₊²)/K(m), V = -2(c₋²+c₊²+d²)U.
        let mut rng = SmallRng::new(77);
        for _ in 0..20 {
            let t = rng.range(1.0, 30.0);
            let xi = rng.range(-0.15, 0.23);
            let x = 12.0 * xi * t;
            let st = dsw_state(xi, &data).unwrap();
            let k_m = elliptic_k(st.m).unwrap();
            let u = -PI * (0.64f64 - 0.16).sqrt() / k_m;
            let v = -2.0 * (0.64 + 0.16 + st.d * st.d) * u;
            assert!((t * st.b_phase - (x * u + t * v)).abs() < 1e-8 * t);
        }

        // x₀ assembles from Δ; Δ real by construction for the exact step.
        let st = dsw_state(0.02, &data).unwrap();
        let k_m = elliptic_k(st.m).unwrap();
        assert!((st.x0 - (-k_m * st.delta / PI + k_m)).abs() < 1e-12);
    }

    #[test]
    fn delta_two_quadrature_routes_agree() {
        // Independent check of the band integral: integrate in the
        // trigonometric variable y = d + (c₋-d) sin²θ, which removes both
        // square-root endpoints, and compare.
        let data = step_scattering(0.8, 0.4).unwrap();
        let xi = 0.02;
        let st = dsw_state(xi, &data).unwrap();
        let (cp, cm, d) = (0.4, 0.8, st.d);
        let w = cm - d;
        let i1 = quad::tanh_sinh(
            |th| {
                let s2 = th.sin() * th.sin();
                let y = d + w * s2;
                let dcm = w * th.cos() * th.cos();
                let lna = data
                    .ln_abs_a_sq_oncut(
                        y,
                        crate::scattering::EdgeHint {
                            d_cm: Some(dcm),
                            d_cp: None,
                        },
                    )
                    .unwrap();
                // dy = 2w sinθ cosθ; √((c₋-y)(y-d)) = w sinθ cosθ.
                let rest = ((cm + y) * (y + d) * (y * y - cp * cp)).sqrt();
                Complex64::new(2.0 * lna * y / rest, 0.0)
            },
            0.0,
            std::f64::consts::FRAC_PI_2,
            1e-12,
        )
        .unwrap()
        .re;
        let k_m = elliptic_k(st.m).unwrap();
        let delta2 = -(cm * cm - cp * cp).sqrt() / k_m * i1;
        assert!(
            (delta2 - st.delta).abs() < 1e-8,
            "Δ routes differ: {delta2} vs {}",
            st.delta
        );
    }

    #[test]
    fn gap_moment_equals_elliptic_k() {
        // ∫_{c₊}^{d} y dy / |R_gap| = K(m)/√(c₋²-c₊²): ties the branched root
        // normalization to the AGM integrals.
        let (cp, cm) = (0.4, 0.8);
        let d = 0.6;
        let v = quad::tanh_sinh_ext(
            |y, da, db| {
                let near_cp = da;
                let r = ((cm * cm - y * y) * (db * (d + y))).sqrt() * (near_cp * (y + cp)).sqrt();
                Complex64::new(y / r, 0.0)
            },
            cp,
            d,
            1e-12,
        )
        .unwrap()
        .re;
        let m = ((d * d - cp * cp) / (cm * cm - cp * cp)).sqrt();
        let expect = elliptic_k(m).unwrap() / (cm * cm - cp * cp).sqrt();
        assert!((v - expect).abs() < 1e-11, "{v} vs {expect}");
    }

    #[test]
    fn breather_speeds_const() {
        // Polar-form oracle for χ = √(κ²+c²), χ₁, χ₂ > 0.
        let oracle = |kap: Complex64, c: f64| -> f64 {
            let w = kap * kap + c * c;
            let r = w.norm().sqrt();
            let th = 0.5 * w.im.atan2(w.re);
            let (x1, x2) = (r * th.cos(), r * th.sin());
            4.0 * x2 * x2 + 6.0 * c * c - 12.0 * x1 * x1
        };
        // c=1, κ=1+1.5i: negative-velocity family (V ≈ -4.04).
        let kap = Complex64::new(1.0, 1.5);
        let v = breather_speed_const(kap, 1.0);
        assert!((v - oracle(kap, 1.0)).abs() < 1e-12);
        assert!(v < 0.0 && (v + 4.04).abs() < 0.01, "V = {v}");
        // c=1, κ=0.5+1.5i: positive-velocity family (V ≈ +6.79).
        let kap = Complex64::new(0.5, 1.5);
        let v = breather_speed_const(kap, 1.0);
        assert!((v - oracle(kap, 1.0)).abs() < 1e-12);
        assert!(v > 0.0 && (v - 6.79).abs() < 0.02, "V = {v}");
        // c=0 reduces to 4(Im κ)² - 12(Re κ)².
        let v = breather_speed_const(Complex64::new(0.4, 1.1), 0.0);
        assert!((v - (4.0 * 1.21 - 12.0 * 0.16)).abs() < 1e-12);
        // Soliton: 2c² + 4κ₀².
        let v = breather_speed_const(Complex64::new(0.0, 1.2), 0.4);
        assert!((v - (2.0 * 0.16 + 4.0 * 1.44)).abs() < 1e-12);
    }

    #[test]
    fn elliptic_breather_speed_fixed_point() {
        let (cp, cm) = (0.4, 0.8);
        let kap = Complex64::new(0.35, 0.75);
        assert!(is_trapped(kap, cp, cm).unwrap());
        let v = breather_speed_elliptic(kap, cp, cm).unwrap();
        let res = g_phase(kap, v / 12.0, cp, cm).unwrap().im;
        assert!(res.abs() < 1e-8, "fixed point residual {res}");
        // Quarter-plane mirror κ -> -conj κ carries the same speed.
        let v2 = breather_speed_elliptic(Complex64::new(-kap.re, kap.im), cp, cm).unwrap();
        assert!((v - v2).abs() < 1e-10);
        // Un-trapped point: domain error.
        assert!(breather_speed_elliptic(Complex64::new(0.05, 2.0), cp, cm).is_err());
    }

    #[test]
    fn elliptic_speed_degenerates_to_constant_background() {
        // The trapped-speed phase factors through the adjacent constant
        // background at each cone edge: at the trailing edge (d -> c₊) the
        // root matches the c₋-background speed, at the leading edge
        // (d -> c₋) the c₊-background speed.
        let (cp, cm) = (0.4, 0.8);
        let (trail, lead) = dsw_cone(cp, cm).unwrap();
        let scan = |target: f64, of: &dyn Fn(Complex64) -> f64| -> Option<Complex64> {
            let mut prev: Option<(f64, f64)> = None;
            for i in 1..600 {
                let x = 0.003 * i as f64;
                let kap = Complex64::new(x, 0.8);
                let v = of(kap);
                if let Some((xp, vp)) = prev {
                    if (vp - target) * (v - target) < 0.0 {
                        let w = (target - vp) / (v - vp);
                        return Some(Complex64::new(xp + w * (x - xp), 0.8));
                    }
                }
                prev = Some((x, v));
            }
            None
        };
        // Trailing-edge neighborhood: V_{c₋}(κ) slightly above the edge.
        let of_m = |k: Complex64| breather_speed_const(k, cm);
        let kap = scan(trail + 0.02, &of_m).expect("trailing scan");
        assert!(is_trapped(kap, cp, cm).unwrap());
        let vl = breather_speed_elliptic(kap, cp, cm).unwrap();
        assert!(
            (vl - of_m(kap)).abs() < 0.1,
            "trailing: V_ell = {vl}, V_const = {}",
            of_m(kap)
        );
        // Leading-edge neighborhood: V_{c₊}(κ) slightly below the edge.
        let of_p = |k: Complex64| breather_speed_const(k, cp);
        let kap = scan(lead - 0.02, &of_p).expect("leading scan");
        assert!(is_trapped(kap, cp, cm).unwrap());
        let vl = breather_speed_elliptic(kap, cp, cm).unwrap();
        assert!(
            (vl - of_p(kap)).abs() < 0.1,
            "leading: V_ell = {vl}, V_const = {}",
            of_p(kap)
        );
    }

    #[test]
    fn selfsimilar_branches() {
        // c₊ > 0 reduces to invert_d.
        let rows = whitham_selfsimilar(&[0.24], 0.4, 0.8).unwrap();
        assert!((rows[0].beta2 - invert_d(0.02, 0.4, 0.8).unwrap()).abs() < 1e-14);

        // c₊ < 0: matching corner (β₁, β₂) = (c₊, -c₊) at z* and continuity.
        let (cp, cm) = (-0.4, 0.8);
        let z_star = -6.0 * cm * cm + 12.0 * cp * cp;
        let rows = whitham_selfsimilar(&[z_star - 1e-9, z_star + 1e-9], cp, cm).unwrap();
        assert!((rows[0].beta1 - cp).abs() < 1e-5 && (rows[0].beta2 + cp).abs() < 1e-5);
        assert!((rows[0].beta2 - rows[1].beta2).abs() < 1e-4, "jump at z*");

        // Monotone β₂(z) across both branches; perturbed residuals of
        // W₁ = W₂ = z on the merged branch.
        let zs: Vec<f64> = (0..=120)
            .map(|i| -6.0 * cm * cm - 0.2 + (z_star + 6.0 * cm * cm + 0.2) * i as f64 / 120.0)
            .collect();
        let rows = whitham_selfsimilar(&zs, cp, cm).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].beta2 >= w[0].beta2 - 1e-12);
        }
        for row in &rows {
            if row.beta2 > 0.05 && row.z < z_star {
                let t = WhithamTriple::new(row.beta1 + 1e-7, row.beta2, row.beta3).unwrap();
                let w1 = whitham_speed(1, &t).unwrap();
                let w2 = whitham_speed(2, &t).unwrap();
                assert!((w1 - row.z).abs() < 1e-3, "W₁ residual {}", w1 - row.z);
                assert!((w2 - row.z).abs() < 1e-3, "W₂ residual {}", w2 - row.z);
            }
        }
    }

    #[test]
    fn example3_trapping() {
        // Sech pulse caught by the front: trapped, positive drift well below
        // the leading edge.
        let data = crate::scattering::solitonstep_scattering(0.8, 0.25, 3.0).unwrap();
        assert_eq!(data.rays()[0], EigenRay::Trapped);
        let v = data.speeds()[0];
        let (trail, lead) = dsw_cone(0.0, 0.8).unwrap();
        assert!(v > trail && v < lead);
        assert!(v > 0.0 && v < 1.0, "v = {v}");
    }
}
