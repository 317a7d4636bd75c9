//! Closed-form solutions: soliton on a constant background, breather on a
//! constant background (all parameter regimes), the elliptic traveling wave
//! in cn form and in theta form, and the reduction of the three-band model
//! back to the traveling wave.

use crate::error::{MkdvError, Result};
use crate::quad::{self, QUAD_TOL};
use crate::specfun::{elliptic_k, jacobi_sn_cn_dn, theta3, Modulus};
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Parameters of the periodic traveling wave: ordered band edges
/// (`β₁ < β₂ <= β₃`; `β₂ = β₃` is the solitonic `m = 1` edge) and a phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveParams {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub x0: f64,
}

impl WaveParams {
    pub fn new(beta1: f64, beta2: f64, beta3: f64, x0: f64) -> Result<Self> {
        if beta1 < beta2 && beta2 <= beta3 {
            Ok(WaveParams {
                beta1,
                beta2,
                beta3,
                x0,
            })
        } else {
            Err(MkdvError::Domain(format!(
                "wave parameters must satisfy β₁ < β₂ <= β₃, got ({beta1}, {beta2}, {beta3})"
            )))
        }
    }

    /// Phase speed `2(β₁² + β₂² + β₃²)`.
    pub fn speed(&self) -> f64 {
        2.0 * (self.beta1 * self.beta1 + self.beta2 * self.beta2 + self.beta3 * self.beta3)
    }

    /// Modulus `m` with `m² = (β₂²-β₁²)/(β₃²-β₁²)`.
    pub fn modulus(&self) -> Result<Modulus> {
        let msq = (self.beta2 * self.beta2 - self.beta1 * self.beta1)
            / (self.beta3 * self.beta3 - self.beta1 * self.beta1);
        Modulus::new(msq.clamp(0.0, 1.0).sqrt())
    }

    /// Spatial period `2K(m)/√(β₃²-β₁²)`.
    pub fn wavelength(&self) -> Result<f64> {
        let m = self.modulus()?.get();
        Ok(2.0 * elliptic_k(m)? / (self.beta3 * self.beta3 - self.beta1 * self.beta1).sqrt())
    }

    /// Crest-to-trough amplitude `2(β₂-β₁)`.
    pub fn amplitude(&self) -> f64 {
        2.0 * (self.beta2 - self.beta1)
    }
}

/// Soliton (`sign_nu = -1`) or antisoliton (`sign_nu = +1`) on the constant
/// background `c`, spectral height `κ₀ > c`, cosh-phase `x₀`:
///
/// `q = c - 2 sgn(ν)(κ₀²-c²) / (κ₀ cosh[2√(κ₀²-c²)(x - (2c²+4κ₀²)t) + x₀] - sgn(ν) c)`.
///
/// The degenerate antisoliton `κ₀ = c`, `ν > 0` is the rational pulse
/// `c - 4c/(1 + (2c(x-x₀) - 12c³t)²)` (there `x₀` acts as a position).
pub fn q_soliton(x: f64, t: f64, c: f64, kappa0: f64, x0: f64, sign_nu: f64) -> Result<f64> {
    let sg = sign_nu.signum();
    if kappa0 == c {
        if sg > 0.0 {
            let z = 2.0 * c * (x - x0) - 12.0 * c * c * c * t;
            return Ok(c - 4.0 * c / (1.0 + z * z));
        }
        return Err(MkdvError::Domain(
            "kappa0 = c is the rational antisoliton; it needs nu > 0".into(),
        ));
    }
    if kappa0 < c || c < 0.0 {
        return Err(MkdvError::Domain(format!(
            "soliton needs kappa0 > c >= 0, got kappa0 = {kappa0}, c = {c}"
        )));
    }
    let lam = (kappa0 * kappa0 - c * c).sqrt();
    let arg = 2.0 * lam * (x - (2.0 * c * c + 4.0 * kappa0 * kappa0) * t) + x0;
    if arg.abs() > 500.0 {
        return Ok(c);
    }
    // cosh >= 1 > c/κ₀ keeps the denominator away from zero.
    Ok(c - 2.0 * sg * lam * lam / (kappa0 * arg.cosh() - sg * c))
}

/// Breather on the constant background `c >= 0` with spectral point `κ`
/// (`Re κ > 0`, `Im κ > 0`) and norming constant `ν ≠ 0`.
#[derive(Debug, Clone, Copy)]
pub struct BreatherParams {
    pub c: f64,
    pub kappa: Complex64,
    pub nu: Complex64,
    chi: Complex64,
}

impl BreatherParams {
    pub fn new(c: f64, kappa: Complex64, nu: Complex64) -> Result<Self> {
        if c < 0.0 || kappa.re <= 0.0 || kappa.im <= 0.0 {
            return Err(MkdvError::Domain(format!(
                "breather needs c >= 0 and κ in the open first quadrant, got c = {c}, κ = {kappa}"
            )));
        }
        if nu.norm() == 0.0 {
            return Err(MkdvError::Domain("norming constant must be nonzero".into()));
        }
        let chi = crate::specfun::branch_sqrt(kappa, c);
        debug_assert!(chi.re > 0.0 && chi.im > 0.0);
        Ok(BreatherParams { c, kappa, nu, chi })
    }

    /// `χ = χ₁ + iχ₂ = √(κ² + c²)`, both parts positive.
    pub fn chi(&self) -> Complex64 {
        self.chi
    }

    /// Envelope speed `4χ₂² + 6c² - 12χ₁²`.
    pub fn speed(&self) -> f64 {
        crate::whitham::breather_speed_const(self.kappa, self.c)
    }

    /// Carrier period along the co-moving line `Z = 0`: `π/(8|χ|²χ₁)`.
    pub fn carrier_period(&self) -> f64 {
        PI / (8.0 * self.chi.norm_sqr() * self.chi.re)
    }
}

/// Breather profile. The arctan derivative is expanded analytically to
/// `(D N_x - N D_x)/(D² + N²)` with numerator/denominator in the cosh
/// (`|χ| > c`), sinh (`|χ| < c`) or boundary (`|χ| = c`) form, switched at
/// `||χ| - c| < 1e-9`; all exponentials are rescaled by the dominant factor
/// so the profile is finite for every `(x, t)`.
pub fn q_breather(x: f64, t: f64, p: &BreatherParams) -> f64 {
    let c = p.c;
    let (x1, x2) = (p.chi.re, p.chi.im);
    let amod = p.chi.norm();
    let nmod = p.nu.norm();
    // θ₁ keeps the full quadrant of ν: θ₁ = π/2 + arg ν (cos θ₁ = -Im ν/|ν|,
    // sin θ₁ = Re ν/|ν|); θ₂ = arg χ.
    let th1 = 0.5 * PI + p.nu.im.atan2(p.nu.re);
    let th2 = x2.atan2(x1);
    let z = x + 4.0 * t * (3.0 * x1 * x1 - x2 * x2 - 1.5 * c * c);
    let phi = 2.0 * (z - 8.0 * t * amod * amod) * x1 + th1 - th2;
    let e2 = 2.0 * z * x2;

    let gap = amod - c;
    let (n, nx, d, dx);
    if gap.abs() < 1e-9 * amod.max(c) {
        // Boundary form |χ| = c.
        let a_minus = nmod * x1 * x1 / (2.0 * amod * amod * x2);
        let m = e2.abs();
        let (ep, em) = ((e2 - m).exp(), (-e2 - m).exp());
        let sc = (-m).exp();
        n = phi.cos() * sc + a_minus * em;
        nx = -2.0 * x1 * phi.sin() * sc - 2.0 * x2 * a_minus * em;
        d = c / nmod * ep + (phi - th2).sin() * sc;
        dx = 2.0 * x2 * c / nmod * ep + 2.0 * x1 * (phi - th2).cos() * sc;
    } else {
        // cosh / sinh forms with the shift θ₃ absorbing the amplitudes.
        let root = (gap * (amod + c)).abs().sqrt(); // √| |χ|² - c² |
        let th3 = (2.0 * x2 * amod * amod / (nmod * x1 * root)).ln();
        let w = e2 + th3;
        let m = w.abs().max(0.0);
        let (ep, em) = ((w - m).exp(), (-w - m).exp());
        let sc = (-m).exp();
        let a_minus = c * nmod * x1 * x1 / (2.0 * amod * amod * x2);
        // e^{-E2-m} = e^{θ₃} · em; guard the product against overflow when ν
        // is extreme.
        let em_e2 = if th3 > 600.0 {
            f64::INFINITY
        } else {
            th3.exp() * em
        };
        n = amod * phi.cos() * sc + a_minus * em_e2;
        nx = -2.0 * x1 * amod * phi.sin() * sc - 2.0 * x2 * a_minus * em_e2;
        let amp = root * x1 / x2;
        if gap > 0.0 {
            d = amp * 0.5 * (ep + em) + c * (phi - th2).sin() * sc;
            dx = amp * x2 * (ep - em) + 2.0 * x1 * c * (phi - th2).cos() * sc;
        } else {
            // sinh branch; the expression stays regular (Remark-form).
            d = amp * 0.5 * (ep - em) + c * (phi - th2).sin() * sc;
            dx = amp * x2 * (ep + em) + 2.0 * x1 * c * (phi - th2).cos() * sc;
        }
    }
    let den = d * d + n * n;
    if !den.is_finite() || den == 0.0 {
        return c;
    }
    c + 2.0 * (d * nx - n * dx) / den
}

/// Periodic traveling wave
/// `q = -β₁-β₂-β₃ + 2(β₂+β₃)(β₁+β₃) / (β₂+β₃ - (β₂-β₁) cn²(√(β₃²-β₁²)(x-Vt)+x₀ | m))`.
pub fn q_per(x: f64, t: f64, w: &WaveParams) -> Result<f64> {
    let (b1, b2, b3) = (w.beta1, w.beta2, w.beta3);
    let m = w.modulus()?.get();
    let u = (b3 * b3 - b1 * b1).sqrt() * (x - w.speed() * t) + w.x0;
    let cn = jacobi_sn_cn_dn(wrap_period(u, m)?, m)?.1;
    Ok(-b1 - b2 - b3 + 2.0 * (b2 + b3) * (b1 + b3) / (b2 + b3 - (b2 - b1) * cn * cn))
}

/// Reduce a phase to one cn² period `2K(m)` (the Landen chain loses accuracy
/// for huge arguments; cn² is exactly 2K-periodic).
fn wrap_period(u: f64, m: f64) -> Result<f64> {
    if m == 1.0 {
        return Ok(u);
    }
    let period = 2.0 * elliptic_k(m)?;
    Ok(u - (u / period).round() * period)
}

/// Traveling wave in theta form, band parameters `c̃ > d̃ > 0` and real
/// phase constant `Δ`:
///
/// `q = (c̃-d̃) · θ(Ω+1/2)/θ(Ω) · θ(0)/θ(1/2)` with
/// `Ω = (xU + tV + Δ)/(2π)`, `U = -πc̃/K(m)`, `V = -2(c̃²+d̃²)U`, `m = d̃/c̃`,
/// `τ = iK'(m)/(2K(m))`.
///
/// Equals [`q_per`] with `(β₁, β₂, β₃) = (0, d̃, c̃)` and
/// `x₀ = -ΔK(m)/π + K(m)`.
pub fn q_per_theta(x: f64, t: f64, c_tilde: f64, d_tilde: f64, delta: f64) -> Result<f64> {
    if !(c_tilde > d_tilde && d_tilde > 0.0) {
        return Err(MkdvError::Domain(format!(
            "theta form needs c̃ > d̃ > 0, got ({c_tilde}, {d_tilde})"
        )));
    }
    let m = d_tilde / c_tilde;
    let k = elliptic_k(m)?;
    let kp = elliptic_k(Modulus::new(m)?.complement())?;
    let tau = Complex64::new(0.0, 0.5 * kp / k);
    let u = -PI * c_tilde / k;
    let v = -2.0 * (c_tilde * c_tilde + d_tilde * d_tilde) * u;
    let omega = Complex64::new((x * u + t * v + delta) / (2.0 * PI), 0.0);
    let q = (c_tilde - d_tilde) * theta3(omega + 0.5, tau)? / theta3(omega, tau)?
        * (theta3(Complex64::new(0.0, 0.0), tau)? / theta3(Complex64::new(0.5, 0.0), tau)?);
    if q.im.abs() > 1e-9 {
        return Err(MkdvError::Accuracy(format!(
            "theta-form wave came out non-real: {q}"
        )));
    }
    Ok(q.re)
}

/// Traveling wave reconstructed through the three-band model (bands
/// `±[ic₋, id]` and `[ic₊, -ic₊]`): the theta ratio with its argument
/// shifted by `Δ₄/(2πi)`, plus the pole-removal correction built from the
/// elliptic model-matrix entries at `k = c₊`. Equals
/// `q_per(x, t; c₊, d, c₋, x₀)` with `x₀ = -ΔK(m)/π + K(m)`.
pub fn q_hel(x: f64, t: f64, c_plus: f64, d: f64, c_minus: f64, delta: f64) -> Result<f64> {
    if !(c_minus > d && d > c_plus && c_plus > 0.0) {
        return Err(MkdvError::Domain(format!(
            "three-band form needs c₋ > d > c₊ > 0, got ({c_plus}, {d}, {c_minus})"
        )));
    }
    let c_t = (c_minus * c_minus - c_plus * c_plus).sqrt();
    let d_t = (d * d - c_plus * c_plus).sqrt();
    let m = d_t / c_t;
    let k = elliptic_k(m)?;
    let kp = elliptic_k(Modulus::new(m)?.complement())?;
    let tau = Complex64::new(0.0, 0.5 * kp / k);
    let u = -PI * c_t / k;
    let v = -2.0 * (c_minus * c_minus + c_plus * c_plus + d * d) * u;
    let omega = Complex64::new((x * u + t * v + delta) / (2.0 * PI), 0.0);

    // Δ₄ = (π c̃ / 2K) ∫_0^{c₊} dz / √((z²+d̃²)(z²+c̃²)), real positive; it is
    // -2πi times the Abel-map increment along the real segment (0, c₊).
    let delta4 = PI * c_t / (2.0 * k)
        * quad::tanh_sinh(
            |zz| {
                Complex64::new(
                    1.0 / ((zz * zz + d_t * d_t) * (zz * zz + c_t * c_t)).sqrt(),
                    0.0,
                )
            },
            0.0,
            c_plus,
            QUAD_TOL,
        )?
        .re;
    let zeta4 = -I * delta4 / (2.0 * PI); // Δ₄/(2πi)
    let omega_el = omega - zeta4;

    let th = |zz: Complex64| theta3(zz, tau);
    let q1 = (c_t - d_t) * th(omega_el + 0.5)? / th(omega_el)?
        * (th(Complex64::new(0.0, 0.0))? / th(Complex64::new(0.5, 0.0))?);

    // Model-matrix entries at k = c₊ through the closed Abel-map value
    // A(c₊) = -τ/2 + 1/4 - Δ₄/(2πi).
    let kc = Complex64::new(c_plus, 0.0);
    let gamma =
        ((kc - I * c_t) / (kc - I * d_t)).powf(0.25) * ((kc + I * d_t) / (kc + I * c_t)).powf(0.25);
    let gp = gamma + 1.0 / gamma;
    let gm = gamma - 1.0 / gamma;
    let m11 = gp * th(-tau / 2.0 - omega)? / th(-tau / 2.0 - zeta4)?;
    let m21 = gm * th(-tau / 2.0 + 0.5 - omega)? / th(-tau / 2.0 + 0.5 - zeta4)?;
    let q2 = c_plus * (m11 - I * m21) / (m11 + I * m21);

    let q = q1 + q2;
    if q.im.abs() > 1e-8 {
        return Err(MkdvError::Accuracy(format!(
            "three-band reconstruction came out non-real: {q}"
        )));
    }
    Ok(q.re)
}

/// Sup-distance over a co-moving window between the near-degenerate wave
/// `β₂ = β₃(1-ε)` and the soliton it collapses to (`c = β₁`, `κ₀ = β₃`);
/// the wave phase `x₀` maps to the soliton cosh-phase `2x₀`.
pub fn q_per_soliton_limit(
    c: f64,
    kappa0: f64,
    eps: f64,
    half_window: f64,
    samples: usize,
) -> Result<f64> {
    let w = WaveParams::new(c, kappa0 * (1.0 - eps), kappa0, 0.0)?;
    let t = 0.2;
    let mut sup: f64 = 0.0;
    for i in 0..=samples {
        let x = w.speed() * t - half_window + 2.0 * half_window * i as f64 / samples as f64;
        let a = q_per(x, t, &w)?;
        let b = q_soliton(x, t, c, kappa0, 0.0, -1.0)?;
        sup = sup.max((a - b).abs());
    }
    Ok(sup)
}
