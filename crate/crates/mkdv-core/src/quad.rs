//! Quadrature kernels.
//!
//! All contour integrals in this crate run over straight segments whose
//! integrands are analytic in the open segment but may blow up at the
//! endpoints like `|x-a|^{-1/2}` or `log|x-a|` (band integrals against the
//! branched root `1/R_+`, spectral weights `ln|a|^2`). The workhorse is
//! tanh-sinh quadrature, which converges geometrically for exactly this
//! class — provided the integrand can see its distance to the endpoints at
//! full precision, which `x` alone cannot deliver once `x - a` drops below
//! `eps·|a|`. The `_ext` entry points therefore hand the integrand
//! `(x, x - a, b - x)` with the distances computed in cancellation-free
//! form.
//!
//! Cauchy kernels `1/(s - k)` get dedicated helpers: principal values and
//! one-sided boundary limits are assembled from a subtraction at the
//! singular point plus the closed-form kernel primitive.

use crate::error::{MkdvError, Result};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

/// Default tolerance for contour integrals.
pub const QUAD_TOL: f64 = 1e-11;

const T_MAX: f64 = 4.0;
const MAX_LEVEL: u32 = 12;

/// Which side of a cut on the imaginary axis a boundary value is taken from.
/// `Plus` is the limit from `Re k > 0` (the left of the downward-oriented
/// contour), matching the `(·)_+` convention used throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// Tanh-sinh quadrature of `f(x, x-a, b-x)` over `[a, b]`.
///
/// The distance arguments are exact down to the last representable node, so
/// integrands with endpoint singularities should be written in terms of them
/// rather than re-deriving `x - a` from `x`.
pub fn tanh_sinh_ext<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Complex64>
where
    F: Fn(f64, f64, f64) -> Complex64,
{
    debug_assert!(b > a, "tanh_sinh needs b > a, got [{a}, {b}]");
    let half = 0.5 * (b - a);

    let eval = |t: f64| -> Complex64 {
        let u = FRAC_PI_2 * t.sinh();
        let sech = 1.0 / u.cosh();
        let w = FRAC_PI_2 * t.cosh() * sech * sech;
        if w < 1e-300 {
            return Complex64::new(0.0, 0.0);
        }
        // 1 ± tanh(u) without cancellation.
        let da = half * 2.0 / (1.0 + (-2.0 * u).exp());
        let db = half * 2.0 / (1.0 + (2.0 * u).exp());
        if da <= 0.0 || db <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let x = if da <= db { a + da } else { b - db };
        let v = f(x, da, db);
        if v.is_finite() {
            w * v
        } else {
            Complex64::new(0.0, 0.0)
        }
    };

    let mut h = 1.0f64;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= T_MAX {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut prev = sum * (half * h);

    for _level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut j = 1;
        while (j as f64) * h <= T_MAX {
            let t = j as f64 * h;
            sum += eval(t) + eval(-t);
            j += 2;
        }
        let cur = sum * (half * h);
        let err = (cur - prev).norm();
        if err <= tol * cur.norm().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(MkdvError::Accuracy(format!(
        "tanh-sinh quadrature stalled on [{a}, {b}]"
    )))
}

/// Tanh-sinh quadrature of `f(x)` over `[a, b]` (distance-agnostic form).
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    tanh_sinh_ext(|x, _, _| f(x), a, b, tol)
}

/// Integral of `f` along the straight segment from `a` to `b` in the plane.
pub fn segment<F>(f: F, a: Complex64, b: Complex64, tol: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let d = b - a;
    tanh_sinh(move |u: f64| f(a + d * u) * d, 0.0, 1.0, tol)
}

/// `∫_{y_lo}^{y_hi} φ(y) / (i y - k) dy` for `k` off the closed segment
/// `[i y_lo, i y_hi]`.
///
/// `phi(y, y - y_lo, y_hi - y)` receives exact distances to the segment
/// endpoints. When `k` sits near the segment the integral is split at the
/// foot of the perpendicular so the near-singularity lands on sub-interval
/// endpoints, where tanh-sinh nodes cluster.
pub fn cauchy_yaxis<F>(phi: F, y_lo: f64, y_hi: f64, k: Complex64, tol: f64) -> Result<Complex64>
where
    F: Fn(f64, f64, f64) -> Complex64,
{
    debug_assert!(y_hi > y_lo);
    let len = y_hi - y_lo;
    let near = k.re.abs() < 0.1 * len && k.im > y_lo + 1e-12 && k.im < y_hi - 1e-12;
    if near {
        if k.re == 0.0 {
            return Err(MkdvError::Domain(
                "on-cut Cauchy evaluation requires a side flag".into(),
            ));
        }
        let y0 = k.im;
        // Left piece: i y - k = i (y - y0) - re = -i (y0 - y) - re, with
        // y0 - y = db exact distance to the split point.
        let left = tanh_sinh_ext(
            |y, da, db| phi(y, da, (y_hi - y0) + db) / Complex64::new(-k.re, -db),
            y_lo,
            y0,
            tol,
        )?;
        let right = tanh_sinh_ext(
            |y, da, db| phi(y, (y0 - y_lo) + da, db) / Complex64::new(-k.re, da),
            y0,
            y_hi,
            tol,
        )?;
        Ok(left + right)
    } else {
        tanh_sinh_ext(
            |y, da, db| phi(y, da, db) / (Complex64::new(0.0, y) - k),
            y_lo,
            y_hi,
            tol,
        )
    }
}

/// One-sided boundary value of `∫_{y_lo}^{y_hi} φ(y) / (i y - k) dy` as
/// `k -> i y0` from the requested side, `y0` strictly inside the segment:
/// `-i · PV ∓ π φ(y0)` for `Plus`/`Minus`, with
/// `PV = p.v. ∫ φ(y)/(y - y0) dy`.
pub fn cauchy_yaxis_oncut<F>(
    phi: F,
    y_lo: f64,
    y_hi: f64,
    y0: f64,
    side: Side,
    tol: f64,
) -> Result<Complex64>
where
    F: Fn(f64, f64, f64) -> Complex64,
{
    debug_assert!(y_lo < y0 && y0 < y_hi, "y0 must be interior");
    let p0 = phi(y0, y0 - y_lo, y_hi - y0);
    let left = tanh_sinh_ext(
        |y, da, db| (phi(y, da, (y_hi - y0) + db) - p0) / -db,
        y_lo,
        y0,
        tol,
    )?;
    let right = tanh_sinh_ext(
        |y, da, db| (phi(y, (y0 - y_lo) + da, db) - p0) / da,
        y0,
        y_hi,
        tol,
    )?;
    let pv = left + right + p0 * ((y_hi - y0) / (y0 - y_lo)).ln();
    Ok(Complex64::new(0.0, -1.0) * pv - side.sign() * std::f64::consts::PI * p0)
}

/// `∫_a^b φ(x) / (x - k) dx` over a real segment, `k` off `[a, b]`.
pub fn cauchy_xaxis<F>(phi: F, a: f64, b: f64, k: Complex64, tol: f64) -> Result<Complex64>
where
    F: Fn(f64, f64, f64) -> Complex64,
{
    let len = b - a;
    let near = k.im.abs() < 0.1 * len && k.re > a + 1e-12 && k.re < b - 1e-12;
    if near {
        if k.im == 0.0 {
            return Err(MkdvError::Domain(
                "on-segment Cauchy evaluation requires a side".into(),
            ));
        }
        let x0 = k.re;
        let left = tanh_sinh_ext(
            |x, da, db| phi(x, da, (b - x0) + db) / Complex64::new(-db, -k.im),
            a,
            x0,
            tol,
        )?;
        let right = tanh_sinh_ext(
            |x, da, db| phi(x, (x0 - a) + da, db) / Complex64::new(da, -k.im),
            x0,
            b,
            tol,
        )?;
        Ok(left + right)
    } else {
        tanh_sinh_ext(
            |x, da, db| phi(x, da, db) / (Complex64::new(x, 0.0) - k),
            a,
            b,
            tol,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn smooth_integrand() {
        let v = tanh_sinh(|x| c(x.sin()), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((v.re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_sqrt_endpoint() {
        // ∫_0^1 dx/√x = 2, written in distance form.
        let v = tanh_sinh_ext(|_, da, _| c(1.0 / da.sqrt()), 0.0, 1.0, 1e-12).unwrap();
        assert!((v.re - 2.0).abs() < 1e-12, "got {}", v.re);
        // Shifted interval: the distance arguments keep full precision.
        let v = tanh_sinh_ext(|_, da, _| c(1.0 / da.sqrt()), 5.0, 6.0, 1e-12).unwrap();
        assert!((v.re - 2.0).abs() < 1e-12, "got {}", v.re);
    }

    #[test]
    fn log_endpoint() {
        // ∫_0^1 ln(x)/√(1-x) dx = 4 ln 2 - 4
        let v = tanh_sinh_ext(|_, da, db| c(da.ln() / db.sqrt()), 0.0, 1.0, 1e-12).unwrap();
        assert!((v.re - (4.0 * 2.0f64.ln() - 4.0)).abs() < 1e-12);
    }

    #[test]
    fn cauchy_off_axis_matches_closed_form() {
        // φ ≡ 1: ∫ dy/(iy-k) = -i ln((i y_hi - k)/(i y_lo - k))
        let k = Complex64::new(0.7, 0.3);
        let v = cauchy_yaxis(|_, _, _| c(1.0), -1.0, 2.0, k, 1e-12).unwrap();
        let exact = Complex64::new(0.0, -1.0)
            * ((Complex64::new(0.0, 2.0) - k) / (Complex64::new(0.0, -1.0) - k)).ln();
        assert!((v - exact).norm() < 1e-11);
    }

    #[test]
    fn cauchy_very_near_axis() {
        // Pole at distance 1e-6 from the contour: the split keeps it on a
        // sub-interval endpoint where nodes cluster.
        let k = Complex64::new(1e-6, 0.4);
        let v = cauchy_yaxis(|_, _, _| c(1.0), -1.0, 2.0, k, 1e-12).unwrap();
        let exact = Complex64::new(0.0, -1.0)
            * ((Complex64::new(0.0, 2.0) - k) / (Complex64::new(0.0, -1.0) - k)).ln();
        assert!((v - exact).norm() < 1e-9, "v={v} exact={exact}");
    }

    #[test]
    fn plemelj_side_limits() {
        let phi = |y: f64, _: f64, _: f64| c((1.0 + y * y).recip());
        let plus = cauchy_yaxis_oncut(phi, -1.0, 2.0, 0.5, Side::Plus, 1e-12).unwrap();
        let minus = cauchy_yaxis_oncut(phi, -1.0, 2.0, 0.5, Side::Minus, 1e-12).unwrap();
        // Jump across the contour is -2π φ(y0).
        let jump = plus - minus;
        let expect = -2.0 * std::f64::consts::PI * phi(0.5, 0.0, 0.0);
        assert!((jump - expect).norm() < 1e-11);
        // Each side limit matches a slightly off-axis evaluation.
        for (eps, side_val) in [(1e-5, plus), (-1e-5, minus)] {
            let near = cauchy_yaxis(phi, -1.0, 2.0, Complex64::new(eps, 0.5), 1e-12).unwrap();
            assert!((near - side_val).norm() < 1e-4, "eps={eps}");
        }
    }

    #[test]
    fn cauchy_real_axis() {
        let k = Complex64::new(0.2, 0.8);
        let v = cauchy_xaxis(|_, _, _| c(1.0), -1.0, 1.0, k, 1e-12).unwrap();
        let exact = ((Complex64::new(1.0, 0.0) - k) / (Complex64::new(-1.0, 0.0) - k)).ln();
        assert!((v - exact).norm() < 1e-11);
    }
}
