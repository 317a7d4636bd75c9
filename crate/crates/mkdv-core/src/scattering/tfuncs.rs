//! Cauchy-integral correction factors.
//!
//! Each region of the large-time decomposition carries a scalar function
//! `T(k)` solving a multiplicative jump problem on the spectral cuts: the
//! Blaschke product `T̃` over the faster eigenvalues times the exponential
//! of a Cauchy integral of `ln|a|²`, `ln T̃²`, and (in the oscillatory
//! region) the constant `Δ`. These encode the phase shifts that the rest of
//! the data imprints on each soliton, breather, and on the modulated wave.
//!
//! Boundary values on the cuts are taken with an explicit [`Side`] flag and
//! assembled from principal values plus Plemelj half-residues; the limits
//! defining `χ` at a stationary point on the contour edge regularize the
//! logarithmic endpoint exactly (the `(k∓k₀)^{iν}` prefactor cancels it).

use super::SpectralData;
use crate::error::{MkdvError, Result};
use crate::quad::{self, Side, QUAD_TOL};
use crate::specfun::{branch_sqrt, branch_sqrt_oncut, r_branch, r_branch_oncut};
use crate::whitham;
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);
const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

/// Which left constant sub-region a `T` or `χ` evaluation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeftKind {
    /// `-c₋²/2 < ξ < -c₋²/2 + c₊²`: stationary points at `±i d₀`.
    Middle,
    /// `ξ < -c₋²/2`: stationary points at `±k₀` on the real axis.
    Utmost,
}

/// One contour piece on the imaginary axis: the density φ(y, da, db)
/// already includes every weight except the Cauchy kernel `1/(s - k)`.
struct AxisPiece<'a> {
    lo: f64,
    hi: f64,
    phi: Box<dyn Fn(f64, f64, f64) -> Complex64 + 'a>,
}

/// `Σ_pieces ∫_piece φ(s) / (s - k) ds` over downward-oriented imaginary
/// segments, i.e. `-i Σ ∫ φ(y)/(iy - k) dy` in the ascending parameter.
/// On-cut evaluation applies the Plemelj half-residue on the piece that
/// contains `Im k`.
fn axis_cauchy_sum(pieces: &[AxisPiece], k: Complex64, side: Option<Side>) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for p in pieces {
        let interior = k.re == 0.0 && k.im > p.lo && k.im < p.hi;
        let c = if interior {
            let side = side.ok_or_else(|| {
                MkdvError::Domain("on-cut T evaluation requires a side flag".into())
            })?;
            quad::cauchy_yaxis_oncut(&p.phi, p.lo, p.hi, k.im, side, QUAD_TOL)?
        } else {
            if k.re == 0.0 && (k.im == p.lo || k.im == p.hi) {
                return Err(MkdvError::Singular(format!(
                    "T evaluation at the band edge i{} is singular",
                    k.im
                )));
            }
            quad::cauchy_yaxis(&p.phi, p.lo, p.hi, k, QUAD_TOL)?
        };
        acc += -I * c;
    }
    Ok(acc)
}

/// Soliton/breather-region correction `T_j(k)`: the Blaschke product over
/// the `j-1` faster eigenvalues times the band integral of `-ln T̃_j²` over
/// `[ic₊, -ic₊]`. For `c₊ = 0` the band is empty and `T_j = T̃_j`.
pub fn t_right(
    k: Complex64,
    side: Option<Side>,
    data: &SpectralData,
    j: usize,
) -> Result<Complex64> {
    if j == 0 || j > data.eigens().len() {
        return Err(MkdvError::Domain(format!(
            "eigenvalue index {j} out of range 1..={}",
            data.eigens().len()
        )));
    }
    let cp = data.c_plus();
    let n = j - 1;
    let ttilde = data.ttilde(k, n);
    if cp == 0.0 {
        return Ok(ttilde);
    }
    let pieces = [AxisPiece {
        lo: -cp,
        hi: cp,
        phi: Box::new(move |y: f64, da: f64, db: f64| {
            let root = (da * db).sqrt(); // √((c₊-y)(y+c₊)) in distance form
            -data.log_ttilde_sq_on_axis(y, n) / root
        }),
    }];
    let s = axis_cauchy_sum(&pieces, k, side)?;
    let sqrt_k = match side {
        Some(sd) if k.re == 0.0 && k.im.abs() < cp => branch_sqrt_oncut(k.im, cp, sd),
        _ => branch_sqrt(k, cp),
    };
    Ok(ttilde * (sqrt_k * s / TWO_PI_I).exp())
}

/// Build the axis pieces of the oscillatory-region `T` (jumps `1/|a|²`,
/// `|a|²`, `1`, and `e^{±iΔ}` on the five spectral segments).
fn dsw_pieces<'a>(data: &'a SpectralData, n: usize, d: f64, delta: f64) -> Vec<AxisPiece<'a>> {
    let (cp, cm) = (data.c_plus(), data.c_minus());
    let mut pieces: Vec<AxisPiece> = Vec::new();
    // (d, c₋): [ln T̃² + ln|a|²] / |R| (the branch R₊ = -|R| absorbs signs).
    pieces.push(AxisPiece {
        lo: d,
        hi: cm,
        phi: Box::new(move |y, da, db| {
            let r = (da * db).sqrt() * ((cm + y) * (y + d) * (y * y - cp * cp)).sqrt();
            let lna = data
                .ln_abs_a_sq_oncut(
                    y,
                    super::EdgeHint {
                        d_cm: Some(db),
                        d_cp: None,
                    },
                )
                .unwrap_or(f64::NAN);
            (data.log_ttilde_sq_on_axis(y, n) + lna) / r
        }),
    });
    // (-c₋, -d): [ln T̃² - ln|a|²] / |R|.
    pieces.push(AxisPiece {
        lo: -cm,
        hi: -d,
        phi: Box::new(move |y, da, db| {
            let r = (da * db).sqrt() * ((cm - y) * (d - y) * (y * y - cp * cp)).sqrt();
            let lna = data
                .ln_abs_a_sq_oncut(
                    y,
                    super::EdgeHint {
                        d_cm: Some(da),
                        d_cp: None,
                    },
                )
                .unwrap_or(f64::NAN);
            (data.log_ttilde_sq_on_axis(y, n) - lna) / r
        }),
    });
    // (-c₊, c₊): -ln T̃² / |R|.
    pieces.push(AxisPiece {
        lo: -cp,
        hi: cp,
        phi: Box::new(move |y, da, db| {
            let r = ((cm * cm - y * y) * (d * d - y * y)).sqrt() * (da * db).sqrt();
            -data.log_ttilde_sq_on_axis(y, n) / r
        }),
    });
    // Gaps: ±Δ / |R_gap|.
    pieces.push(AxisPiece {
        lo: cp,
        hi: d,
        phi: Box::new(move |y, da, db| {
            let r = ((cm * cm - y * y) * (db * (d + y))).sqrt() * (da * (y + cp)).sqrt();
            Complex64::new(delta / r, 0.0)
        }),
    });
    pieces.push(AxisPiece {
        lo: -d,
        hi: -cp,
        phi: Box::new(move |y, da, db| {
            let r = ((cm * cm - y * y) * (da * (d - y))).sqrt() * (db * (cp - y)).sqrt();
            Complex64::new(-delta / r, 0.0)
        }),
    });
    pieces
}

/// Oscillatory-region correction `T(k, ξ)` for `ξ` strictly inside the cone.
pub fn t_dsw(k: Complex64, side: Option<Side>, xi: f64, data: &SpectralData) -> Result<Complex64> {
    require_closed_form_a(data)?;
    let (cp, cm) = (data.c_plus(), data.c_minus());
    let st = whitham::dsw_state(xi, data)?;
    let n = data.n_faster(xi);
    let pieces = dsw_pieces(data, n, st.d, st.delta);
    let s = axis_cauchy_sum(&pieces, k, side)?;
    let r_k = match side {
        Some(sd) if k.re == 0.0 && k.im.abs() < cm => r_branch_oncut(k.im, cp, st.d, cm, sd)?,
        _ => r_branch(k, cp, st.d, cm)?,
    };
    Ok(data.ttilde(k, n) * (r_k * s / TWO_PI_I).exp())
}

/// Pieces of the left-region `T`: `ln|a|²` bands split at `±i c₊` (where
/// `a` has its fourth-root blow-up) plus, in the middle case, the `ln T̃²`
/// band over the whole cut.
fn left_pieces<'a>(data: &'a SpectralData, n: usize, d0: f64) -> Vec<AxisPiece<'a>> {
    let (cp, cm) = (data.c_plus(), data.c_minus());
    // Weight 1/(√(s²+c₋²))₊ = 1/√(c₋²-y²) on the cut.
    let wcut = move |y: f64, dcm: f64| (dcm * (cm + y.abs())).sqrt();
    let mut pieces: Vec<AxisPiece> = Vec::new();
    // Upper band (lo_up, c₋) carries -ln|a|², lower band (-c₋, -lo_up)
    // carries +ln|a|²; lo_up = d₀ (middle) or 0 (utmost).
    let upper = |lo: f64, hi: f64, dcp_at_lo: bool, dcp_at_hi: bool| AxisPiece {
        lo,
        hi,
        phi: Box::new(move |y: f64, da: f64, db: f64| {
            let hint = super::EdgeHint {
                d_cm: if hi == cm { Some(db) } else { None },
                d_cp: if dcp_at_lo {
                    Some(da)
                } else if dcp_at_hi {
                    Some(db)
                } else {
                    None
                },
            };
            let lna = data.ln_abs_a_sq_oncut(y, hint).unwrap_or(f64::NAN);
            let w = if hi == cm {
                wcut(y, db)
            } else {
                ((cm - y) * (cm + y)).sqrt()
            };
            Complex64::new(-lna / w, 0.0)
        }),
    };
    if cp > 0.0 && d0 < cp {
        pieces.push(upper(d0, cp, false, true));
        pieces.push(upper(cp, cm, true, false));
    } else {
        pieces.push(upper(d0.max(0.0), cm, false, false));
    }
    let lower = |lo: f64, hi: f64, dcp_at_lo: bool, dcp_at_hi: bool| AxisPiece {
        lo,
        hi,
        phi: Box::new(move |y: f64, da: f64, db: f64| {
            // |a(iy)| is even in y; distances are expressed for |y|.
            let hint = super::EdgeHint {
                d_cm: if lo == -cm { Some(da) } else { None },
                d_cp: if dcp_at_hi {
                    Some(db)
                } else if dcp_at_lo {
                    Some(da)
                } else {
                    None
                },
            };
            let lna = data.ln_abs_a_sq_oncut(y, hint).unwrap_or(f64::NAN);
            let w = if lo == -cm {
                wcut(y, da)
            } else {
                ((cm - y) * (cm + y)).sqrt()
            };
            Complex64::new(lna / w, 0.0)
        }),
    };
    if cp > 0.0 && d0 < cp {
        pieces.push(lower(-cm, -cp, false, true));
        pieces.push(lower(-cp, -d0, true, false));
    } else {
        pieces.push(lower(-cm, -d0.max(0.0), false, false));
    }
    // The Blaschke band over the full cut.
    if n > 0 {
        pieces.push(AxisPiece {
            lo: -cm,
            hi: cm,
            phi: Box::new(move |y, da, db| -data.log_ttilde_sq_on_axis(y, n) / (da * db).sqrt()),
        });
    }
    pieces
}

fn left_params(xi: f64, data: &SpectralData, kind: LeftKind) -> Result<f64> {
    let (cp, cm) = (data.c_plus(), data.c_minus());
    match kind {
        LeftKind::Middle => {
            let d0sq = xi + cm * cm / 2.0;
            if !(d0sq > 0.0 && d0sq < cp * cp) {
                return Err(MkdvError::Domain(format!(
                    "ξ = {xi} outside the middle left region (-c₋²/2, -c₋²/2 + c₊²)"
                )));
            }
            Ok(d0sq.sqrt())
        }
        LeftKind::Utmost => {
            let k0sq = -xi - cm * cm / 2.0;
            if k0sq <= 0.0 {
                return Err(MkdvError::Domain(format!(
                    "ξ = {xi} not in the utmost left region ξ < -c₋²/2"
                )));
            }
            Ok(k0sq.sqrt())
        }
    }
}

/// Left-region correction `T(k, ξ)`.
///
/// Middle: jumps `1/|a|²` on `(ic₋, id₀)`, `|a|²` on `(-id₀, -ic₋)`, `1` on
/// `(id₀, -id₀)`. Utmost: the same split at `0` plus the multiplicative
/// jump `1 + |r|²` on the real segment `(-k₀, k₀)`.
pub fn t_left(
    k: Complex64,
    side: Option<Side>,
    xi: f64,
    data: &SpectralData,
    kind: LeftKind,
) -> Result<Complex64> {
    require_closed_form_a(data)?;
    let cm = data.c_minus();
    let p = left_params(xi, data, kind)?;
    let d0 = match kind {
        LeftKind::Middle => p,
        LeftKind::Utmost => 0.0,
    };
    let n = data.n_faster(xi);
    let pieces = left_pieces(data, n, d0);
    let mut s = axis_cauchy_sum(&pieces, k, side)?;
    if let LeftKind::Utmost = kind {
        let k0 = p;
        // + ∫_{-k₀}^{k₀} ln(1+|r|²) / ((x-k)√(x²+c₋²)) dx, an ascending real
        // integral with no orientation factor, split at the origin (for
        // c₊ = 0 the spectral cut ends there and |r| has a kink).
        let phi = |x: f64, _: f64, _: f64| {
            let r = data.r(Complex64::new(x, 0.0)).expect("reflection on ℝ");
            Complex64::new((1.0 + r.norm_sqr()).ln() / (x * x + cm * cm).sqrt(), 0.0)
        };
        s += quad::cauchy_xaxis(phi, -k0, 0.0, k, QUAD_TOL)?
            + quad::cauchy_xaxis(phi, 0.0, k0, k, QUAD_TOL)?;
    }
    let sqrt_k = match side {
        Some(sd) if k.re == 0.0 && k.im.abs() < cm => branch_sqrt_oncut(k.im, cm, sd),
        _ => branch_sqrt(k, cm),
    };
    Ok(data.ttilde_at_xi(k, xi) * (sqrt_k * s / TWO_PI_I).exp())
}

/// Stationary-point limit `χ`.
///
/// Utmost: `χ(k₀) = lim T(k) ((k-k₀)/(k+k₀))^{iν}`, with
/// `ν = ln(1+|r(k₀)|²)/(2π)`. Middle: `χ(id₀) = lim_{k→id₀+0}
/// T(k)((k-id₀)/(-(k+id₀)))^{iν}` with `ν = ln(1-|r₊(id₀)|²)/(2π) < 0`;
/// `|χ(id₀)| = 1`. In both cases the logarithmic endpoint of the Cauchy
/// integral cancels against the power prefactor, leaving the subtracted
/// integral plus (middle case) the constant `(（c₋-d₀)/(2d₀))^{iν}`.
pub fn chi_limit(xi: f64, data: &SpectralData, kind: LeftKind) -> Result<Complex64> {
    require_closed_form_a(data)?;
    let cm = data.c_minus();
    let n = data.n_faster(xi);
    match kind {
        LeftKind::Utmost => {
            let k0 = left_params(xi, data, kind)?;
            let kc = Complex64::new(k0, 0.0);
            let pieces = left_pieces(data, n, 0.0);
            let mut s = axis_cauchy_sum(&pieces, kc, None)?;
            // Subtracted real-axis integral: the endpoint log cancels the
            // (k-k₀)^{iν} prefactor exactly, constants included.
            let phi_r = |x: f64| -> Complex64 {
                let r = data.r(Complex64::new(x, 0.0)).expect("reflection on ℝ");
                Complex64::new((1.0 + r.norm_sqr()).ln() / (x * x + cm * cm).sqrt(), 0.0)
            };
            let phi0 = phi_r(k0);
            // Subtracted integral split at the origin (|r| kinks there when
            // the spectral cut reaches 0).
            s += quad::tanh_sinh(|x| (phi_r(x) - phi0) / (x - k0), -k0, 0.0, QUAD_TOL)?;
            s += quad::tanh_sinh_ext(|x, _da, db| (phi_r(x) - phi0) / -db, 0.0, k0, QUAD_TOL)?;
            let sqrt_k = branch_sqrt(kc, cm);
            Ok(data.ttilde_at_xi(kc, xi) * (sqrt_k * s / TWO_PI_I).exp())
        }
        LeftKind::Middle => {
            let d0 = left_params(xi, data, kind)?;
            let cp = data.c_plus();
            let k = Complex64::new(0.0, d0);
            let nu = subleading_nu(xi, data)?;
            let wcut = move |dcm: f64, y: f64| (dcm * (cm + y.abs())).sqrt();
            let h_up = |y: f64, dcm: Option<f64>, dcp: Option<f64>| -> Complex64 {
                let lna = data
                    .ln_abs_a_sq_oncut(
                        y,
                        super::EdgeHint {
                            d_cm: dcm,
                            d_cp: dcp,
                        },
                    )
                    .unwrap_or(f64::NAN);
                let w = match dcm {
                    Some(dd) => wcut(dd, y),
                    None => ((cm - y) * (cm + y)).sqrt(),
                };
                Complex64::new(lna / w, 0.0)
            };
            let h0 = h_up(d0, None, Some(cp - d0));
            // Upper band -∫_{ic₋..id₀} ln|a|²/((s-k)√₊) with the endpoint log
            // subtracted at i d₀: contributes ∫ (h - h₀)/(y - d₀) dy to S
            // (the removed log cancels the power prefactor, leaving the
            // constant iν ln((c₋-d₀)/(2d₀)) added below). Split at i c₊.
            let up1 = quad::tanh_sinh_ext(
                |y, da, db| (h_up(y, None, Some(db)) - h0) / da,
                d0,
                cp,
                QUAD_TOL,
            )?;
            let up2 = quad::tanh_sinh_ext(
                |y, da, db| (h_up(y, Some(db), Some(da)) - h0) / ((cp - d0) + da),
                cp,
                cm,
                QUAD_TOL,
            )?;
            let mut s = up1 + up2;
            // Lower band, regular at k = id₀.
            let lower_pieces = {
                let mut v: Vec<AxisPiece> = Vec::new();
                let mk = |lo: f64, hi: f64| AxisPiece {
                    lo,
                    hi,
                    phi: Box::new(move |y: f64, da: f64, db: f64| {
                        let hint = super::EdgeHint {
                            d_cm: if lo == -cm { Some(da) } else { None },
                            d_cp: if hi == -cp {
                                Some(db)
                            } else if lo == -cp {
                                Some(da)
                            } else {
                                None
                            },
                        };
                        let lna = data.ln_abs_a_sq_oncut(y, hint).unwrap_or(f64::NAN);
                        let w = if lo == -cm {
                            (da * (cm - y)).sqrt()
                        } else {
                            ((cm - y) * (cm + y)).sqrt()
                        };
                        Complex64::new(lna / w, 0.0)
                    }),
                };
                v.push(mk(-cm, -cp));
                v.push(mk(-cp, -d0));
                v
            };
            s += axis_cauchy_sum(&lower_pieces, k, None)?;
            if n > 0 {
                let blaschke = [AxisPiece {
                    lo: -cm,
                    hi: cm,
                    phi: Box::new(move |y: f64, da: f64, db: f64| {
                        -data.log_ttilde_sq_on_axis(y, n) / (da * db).sqrt()
                    }),
                }];
                s += axis_cauchy_sum(&blaschke, k, Some(Side::Plus))?;
            }
            let sqrt_k = branch_sqrt_oncut(d0, cm, Side::Plus);
            let extra = I * nu * ((cm - d0) / (2.0 * d0)).ln();
            Ok(data.ttilde_at_xi(k, xi) * (sqrt_k * s / TWO_PI_I + extra).exp())
        }
    }
}

fn require_closed_form_a(data: &SpectralData) -> Result<()> {
    if data.has_closed_form_a() {
        Ok(())
    } else {
        Err(MkdvError::Unsupported(
            "band integrals over ln|a|² need closed-form scattering data (step or soliton-step preset)"
                .into(),
        ))
    }
}

/// The slowly-varying exponent of the left-region radiation:
/// `ν = ln(1+|r(k₀)|²)/(2π) > 0` (utmost) or `ν = ln(1-|r₊(id₀)|²)/(2π) < 0`
/// (middle; equal to `-ln|a(id₀)|²/(2π)`).
pub fn subleading_nu(xi: f64, data: &SpectralData) -> Result<f64> {
    let cm = data.c_minus();
    if xi < -cm * cm / 2.0 {
        let k0 = (-xi - cm * cm / 2.0).sqrt();
        let r = data.r(Complex64::new(k0, 0.0))?;
        Ok((1.0 + r.norm_sqr()).ln() / (2.0 * PI))
    } else {
        let d0 = left_params(xi, data, LeftKind::Middle)?;
        // 1 - |r₊|² = 1/|a|² on the inner band.
        Ok(-data.ln_abs_a_sq_oncut(d0, super::EdgeHint::default())? / (2.0 * PI))
    }
}
