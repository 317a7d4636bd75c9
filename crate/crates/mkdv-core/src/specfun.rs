//! Self-contained special functions: complete elliptic integrals, Jacobi
//! elliptic functions, the Jacobi theta series, complex log-gamma, and the
//! branched square roots cut along segments of the imaginary axis.
//!
//! Everything uses the *modulus* convention: `K(m) = ∫_0^{π/2} ds /
//! √(1 - m² sin² s)`, i.e. the squared modulus sits inside the integrand.
//! Passing a parameter where a modulus is expected is the classic error this
//! crate refuses to make representable.

use crate::error::{MkdvError, Result};
use crate::quad::Side;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

/// Elliptic modulus `m ∈ [0, 1]` with its complement `m' = √(1-m²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus(f64);

impl Modulus {
    pub fn new(m: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&m) {
            Ok(Modulus(m))
        } else {
            Err(MkdvError::Domain(format!("modulus {m} outside [0, 1]")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Complementary modulus `√(1-m²)`.
    pub fn complement(self) -> f64 {
        ((1.0 - self.0) * (1.0 + self.0)).sqrt()
    }
}

/// Complete elliptic integral of the first kind, modulus convention,
/// via the arithmetic-geometric mean: `K(m) = π / (2 AGM(1, m'))`.
pub fn elliptic_k(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(MkdvError::Domain(format!(
            "elliptic_k needs 0 <= m < 1, got {m} (K diverges logarithmically at m = 1)"
        )));
    }
    let mut a = 1.0f64;
    let mut b = Modulus(m).complement();
    while (a - b).abs() > 2.0 * f64::EPSILON * a {
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(FRAC_PI_2 / (0.5 * (a + b)))
}

/// Complete elliptic integral of the second kind, modulus convention.
///
/// AGM companion sum: `E = K (1 - Σ_n 2^{n-1} c_n²)` with `c_0 = m`.
pub fn elliptic_e(m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(MkdvError::Domain(format!(
            "elliptic_e needs 0 <= m <= 1, got {m}"
        )));
    }
    if m == 1.0 {
        return Ok(1.0);
    }
    let mut a = 1.0f64;
    let mut b = Modulus(m).complement();
    let mut c = m;
    let mut sum = 0.5 * c * c;
    let mut pow = 0.5;
    while c.abs() > f64::EPSILON * a || (a - b).abs() > 2.0 * f64::EPSILON * a {
        let an = 0.5 * (a + b);
        let cn = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = an;
        c = cn;
        pow *= 2.0;
        sum += pow * c * c;
        if pow > 1e18 {
            break;
        }
    }
    Ok(FRAC_PI_2 / a * (1.0 - sum))
}

/// Jacobi elliptic functions `(sn, cn, dn)(u | m)`, modulus convention.
///
/// Descending Landen / Gauss transformation chain with trigonometric
/// closure once the modulus has collapsed; `m = 1` uses the hyperbolic
/// closed forms.
pub fn jacobi_sn_cn_dn(u: f64, m: f64) -> Result<(f64, f64, f64)> {
    if !(0.0..=1.0).contains(&m) {
        return Err(MkdvError::Domain(format!(
            "jacobi_sn_cn_dn needs 0 <= m <= 1, got {m}"
        )));
    }
    if m == 1.0 {
        let sech = 1.0 / u.cosh();
        return Ok((u.tanh(), sech, sech));
    }
    if m == 0.0 {
        return Ok((u.sin(), u.cos(), 1.0));
    }

    // Gauss/Landen chain on the complementary parameter (Bulirsch form).
    let ca = f64::EPSILON.sqrt();
    let mut emc = 1.0 - m * m;
    let mut a = 1.0f64;
    let mut dn;
    let mut em = [0.0f64; 16];
    let mut en = [0.0f64; 16];
    let mut l = 0;
    for i in 0..16 {
        l = i;
        em[i] = a;
        emc = emc.sqrt();
        en[i] = emc;
        let c = 0.5 * (a + emc);
        if (a - emc).abs() <= ca * a {
            break;
        }
        emc *= a;
        a = c;
    }
    let uu = u * 0.5 * (a + emc);
    let mut sn = uu.sin();
    let mut cn = uu.cos();
    dn = 1.0;
    if sn != 0.0 {
        let mut aa = cn / sn;
        let mut c = aa * 0.5 * (a + emc);
        for i in (0..=l).rev() {
            let b = em[i];
            aa *= c;
            c *= dn;
            dn = (en[i] + aa) / (b + aa);
            aa = c / b;
        }
        let s = 1.0 / (c * c + 1.0).sqrt();
        sn = if sn < 0.0 { -s } else { s };
        cn = c * sn;
    }
    Ok((sn, cn, dn))
}

/// Jacobi theta series `θ(ζ | τ) = Σ_n exp(iπτ n² + 2πi ζ n)`, `Im τ > 0`.
///
/// The truncation index is chosen from the tail bound
/// `exp(-π Im τ · n² + 2π |Im ζ| · n)`, and the real part of `ζ` is reduced
/// mod 1 first (exact periodicity of the series).
pub fn theta3(z: Complex64, tau: Complex64) -> Result<Complex64> {
    if tau.im <= 0.0 {
        return Err(MkdvError::Domain(format!(
            "theta3 needs Im tau > 0, got {tau}"
        )));
    }
    let zr = Complex64::new(z.re - z.re.round(), z.im);
    let p = PI * tau.im;
    let q = 2.0 * PI * z.im.abs();
    // Smallest N with p n² - q n >= 42 for all n >= N.
    let disc = (q * q + 4.0 * p * 42.0).sqrt();
    let n_max = ((q + disc) / (2.0 * p)).ceil() as i64 + 1;
    if n_max > 40_000 {
        return Err(MkdvError::Accuracy(format!(
            "theta3 series would need {n_max} terms (tau too close to the real axis)"
        )));
    }
    let i = Complex64::new(0.0, 1.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in (1..=n_max).rev() {
        let nf = n as f64;
        let qn = (i * PI * tau * nf * nf).exp();
        let ph = i * 2.0 * PI * zr * nf;
        sum += qn * (ph.exp() + (-ph).exp());
    }
    Ok(sum + 1.0)
}

// Lanczos approximation, g = 7, 9 coefficients.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Principal-branch log-gamma on the complex plane (poles excluded).
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.floor() {
        return Err(MkdvError::Singular(format!("log_gamma pole at {z}")));
    }
    if z.re < 0.5 {
        // Reflection: ln Γ(z) = ln π - ln sin(π z) - ln Γ(1 - z).
        let lg = log_gamma(Complex64::new(1.0, 0.0) - z)?;
        let s = (PI * z).sin();
        return Ok(Complex64::new(PI.ln(), 0.0) - s.ln() - lg);
    }
    let zm = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (zm + i as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (zm + 0.5) * t.ln() - t + acc.ln())
}

/// Branch of `√(k² + c²)` analytic off the downward-oriented segment
/// `[ic, -ic]`, real positive at `k = +0`, Schwartz symmetric, and `~ k`
/// at infinity.
///
/// Points given exactly on the cut (floating `Re k == 0`, `|Im k| < c`)
/// fall back to the `Plus` boundary value; use [`branch_sqrt_oncut`] when the
/// side matters.
pub fn branch_sqrt(k: Complex64, c: f64) -> Complex64 {
    debug_assert!(c >= 0.0);
    if k.re == 0.0 && k.im.abs() < c {
        return branch_sqrt_oncut(k.im, c, Side::Plus);
    }
    if k.re == 0.0 {
        // On the axis outside the cut: i sign(y) √(y² - c²), continuous.
        let y = k.im;
        return Complex64::new(0.0, y.signum() * (y * y - c * c).sqrt());
    }
    let r = c / k;
    k * (Complex64::new(1.0, 0.0) + r * r).sqrt()
}

/// Boundary value of [`branch_sqrt`] on the cut: `±√(c² - y²)` from the
/// `Re k > 0` (`Plus`) or `Re k < 0` (`Minus`) side, for `|y| < c`.
pub fn branch_sqrt_oncut(y: f64, c: f64, side: Side) -> Complex64 {
    debug_assert!(y.abs() <= c);
    Complex64::new(side.sign() * ((c - y) * (c + y)).sqrt(), 0.0)
}

/// Branch of `R(k) = √((k²+c₋²)(k²+d²)(k²+c₊²))` analytic off
/// `[ic₋, id] ∪ [ic₊, -ic₊] ∪ [-id, -ic₋]` and real positive at `k = +0`,
/// for `c₋ > d > c₊ >= 0`.
pub fn r_branch(k: Complex64, c_plus: f64, d: f64, c_minus: f64) -> Result<Complex64> {
    check_triple(c_plus, d, c_minus)?;
    Ok(branch_sqrt(k, c_minus) * branch_sqrt(k, d) * branch_sqrt(k, c_plus))
}

/// Boundary value of [`r_branch`] for `k = iy` on the imaginary axis.
///
/// The side flag applies inside the cuts; in the gaps and beyond `±ic₋`
/// the function is continuous across the axis and the flag is ignored.
pub fn r_branch_oncut(y: f64, c_plus: f64, d: f64, c_minus: f64, side: Side) -> Result<Complex64> {
    check_triple(c_plus, d, c_minus)?;
    let factor = |c: f64| -> Complex64 {
        if y.abs() < c {
            branch_sqrt_oncut(y, c, side)
        } else {
            Complex64::new(0.0, y.signum() * (y * y - c * c).sqrt())
        }
    };
    Ok(factor(c_minus) * factor(d) * factor(c_plus))
}

fn check_triple(c_plus: f64, d: f64, c_minus: f64) -> Result<()> {
    if c_minus > d && d > c_plus && c_plus >= 0.0 {
        Ok(())
    } else {
        Err(MkdvError::Domain(format!(
            "branch points must satisfy c_minus > d > c_plus >= 0, got ({c_plus}, {d}, {c_minus})"
        )))
    }
}
