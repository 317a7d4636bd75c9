//! Large-time dispatcher: classify a ray `ξ = x/(12t)`, assemble the
//! leading-order wave picture with every phase shift, and the subleading
//! left-region radiation.

use crate::error::{MkdvError, Result};
use crate::profiles::{q_breather, q_per, q_soliton, BreatherParams, WaveParams};
use crate::scattering::{chi_limit, t_left, t_right, EigenRay, LeftKind, SpectralData};
use crate::specfun::log_gamma;
use crate::whitham;
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The four large-time regimes of a ray.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    RightConst,
    Dsw,
    MiddleLeft,
    UtmostLeft,
}

impl RegionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionKind::RightConst => "right_const",
            RegionKind::Dsw => "dsw",
            RegionKind::MiddleLeft => "middle_left",
            RegionKind::UtmostLeft => "utmost_left",
        }
    }
}

/// A classified ray, with the nearest eigenvalue attached when its speed is
/// within `12δ` of the ray.
#[derive(Debug, Clone, Copy)]
pub struct RegionTag {
    pub kind: RegionKind,
    /// `(eigen index, |ξ - V_j/12|)`.
    pub nearest: Option<(usize, f64)>,
}

/// Region thresholds: `ξ >= c₋²/3 + c₊²/6` right;
/// `-c₋²/2 + c₊² <= ξ <` that: oscillatory; below, split at `-c₋²/2` into
/// middle (`>`) and utmost (`<=`). They partition the line exactly.
pub fn region_kind(xi: f64, c_plus: f64, c_minus: f64) -> RegionKind {
    let (s3, s1) = (c_minus * c_minus, c_plus * c_plus);
    if xi >= s3 / 3.0 + s1 / 6.0 {
        RegionKind::RightConst
    } else if xi >= -s3 / 2.0 + s1 {
        RegionKind::Dsw
    } else if xi > -s3 / 2.0 {
        RegionKind::MiddleLeft
    } else {
        RegionKind::UtmostLeft
    }
}

/// Default speed-separation δ: 1/8 of the minimal gap between consecutive
/// eigen speeds, falling back to 1/8 of the cone width for sparse spectra.
pub fn default_delta(data: &SpectralData) -> f64 {
    let speeds = data.speeds();
    let mut gap = f64::INFINITY;
    for w in speeds.windows(2) {
        gap = gap.min(w[0] - w[1]);
    }
    let (trail, lead) =
        whitham::dsw_cone(data.c_plus(), data.c_minus()).expect("admissible backgrounds");
    let cone = (lead - trail) / 12.0;
    if gap.is_finite() {
        (gap / 12.0 / 8.0).min(cone / 8.0)
    } else {
        cone / 8.0
    }
}

/// Classify the ray `ξ`. `delta` must be positive and smaller than half the
/// minimal speed gap (in `ξ` units).
pub fn classify(xi: f64, data: &SpectralData, delta: f64) -> Result<RegionTag> {
    if delta <= 0.0 {
        return Err(MkdvError::Config("delta must be positive".into()));
    }
    let speeds = data.speeds();
    for w in speeds.windows(2) {
        if delta >= 0.5 * (w[0] - w[1]) / 12.0 {
            return Err(MkdvError::Config(format!(
                "delta = {delta} violates the speed-gap condition (gap {})",
                (w[0] - w[1]) / 12.0
            )));
        }
    }
    let kind = region_kind(xi, data.c_plus(), data.c_minus());
    let mut nearest: Option<(usize, f64)> = None;
    for (j, &v) in speeds.iter().enumerate() {
        let dist = (xi - v / 12.0).abs();
        if dist < delta && nearest.is_none_or(|(_, d)| dist < d) {
            nearest = Some((j, dist));
        }
    }
    Ok(RegionTag { kind, nearest })
}

/// Leading-order evaluation at one point.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticValue {
    pub q: f64,
    pub region: RegionTag,
    /// Set when the ray crosses a trapped breather: the modulated wave is
    /// returned without the (omitted) breather-on-elliptic-background
    /// correction.
    pub trapped_warning: bool,
}

/// Phase-shifted soliton parameters in the rightmost region:
/// `x_j = ln(2(|κ_j|²-c₊²) T_j²(i|κ_j|) / (|ν_j| |κ_j|))`.
fn soliton_phase(data: &SpectralData, j: usize) -> Result<(f64, f64)> {
    let e = data.eigens()[j];
    let cp = data.c_plus();
    let k0 = e.kappa.im;
    let t = t_right(Complex64::new(0.0, k0), None, data, j + 1)?;
    // T_j is real at an imaginary eigenvalue (breather factors contribute
    // |·|² there; soliton factors are real), so T_j² is real positive.
    if t.im.abs() > 1e-8 * t.re.abs().max(1.0) {
        return Err(MkdvError::Accuracy(format!(
            "T_j(i|κ_j|) should be real, got {t}"
        )));
    }
    let x_j = (2.0 * (k0 * k0 - cp * cp) * t.re * t.re / (e.nu.norm() * k0)).ln();
    Ok((x_j, e.nu.re.signum()))
}

/// Leading-order wave at `(x, t)`, `t > 0`, dispatched by region.
///
/// `delta` defaults to [`default_delta`].
pub fn q_asymptotic(
    x: f64,
    t: f64,
    data: &SpectralData,
    delta: Option<f64>,
) -> Result<AsymptoticValue> {
    if t <= 0.0 {
        return Err(MkdvError::Domain(
            "asymptotic evaluation needs t > 0".into(),
        ));
    }
    let xi = x / (12.0 * t);
    let delta = delta.unwrap_or_else(|| default_delta(data));
    let tag = classify(xi, data, delta)?;
    let (cp, cm) = (data.c_plus(), data.c_minus());
    let mut trapped_warning = false;

    let q = match tag.kind {
        RegionKind::RightConst => match tag.nearest {
            Some((j, _)) if data.rays()[j] == EigenRay::RightConst => {
                let e = data.eigens()[j];
                if e.is_soliton() {
                    let (x_j, sg) = soliton_phase(data, j)?;
                    q_soliton(x, t, cp, e.kappa.im, x_j, sg)?
                } else {
                    let tj = t_right(e.kappa, None, data, j + 1)?;
                    let nu_hat = e.nu / (tj * tj);
                    q_breather(x, t, &BreatherParams::new(cp, e.kappa, nu_hat)?)
                }
            }
            _ => cp,
        },
        RegionKind::Dsw => {
            if cp == 0.0 {
                return Err(MkdvError::Unsupported(
                    "oscillatory-region phase requires c_plus > 0".into(),
                ));
            }
            if tag.nearest.is_some() {
                trapped_warning = true;
            }
            let st = whitham::dsw_state(xi, data)?;
            let w = WaveParams::new(cp, st.d, cm, st.x0)?;
            q_per(x, t, &w)?
        }
        RegionKind::MiddleLeft | RegionKind::UtmostLeft => match tag.nearest {
            Some((j, _)) if data.rays()[j] == EigenRay::LeftConst => {
                let e = data.eigens()[j];
                let kind = if tag.kind == RegionKind::MiddleLeft {
                    LeftKind::Middle
                } else {
                    LeftKind::Utmost
                };
                let tj = t_left(e.kappa, None, xi, data, kind)?;
                let nu_hat = e.nu / (tj * tj);
                q_breather(x, t, &BreatherParams::new(cm, e.kappa, nu_hat)?)
            }
            _ => cm,
        },
    };
    Ok(AsymptoticValue {
        q,
        region: tag,
        trapped_warning,
    })
}

/// Left-region radiation parameters at a ray.
#[derive(Debug, Clone, Copy)]
pub struct Subleading {
    pub nu: f64,
    /// Constant phase `±π/4 - arg r - arg Γ(iν) + arg χ²`.
    pub phi: f64,
    pub amplitude: f64,
    /// Total cosine argument at `(x, t)`.
    pub phase: f64,
    pub value: f64,
}

/// The `O(t^{-1/2})` oscillatory correction to `c₋` in the left regions:
///
/// `q - c₋ = √(|ν|√(-ξ+c₋²/2) / (3t|ξ+c₋²/2|)) · cos[16t(-ξ+c₋²/2)^{3/2}
///  + ν ln(192 t (ξ+c₋²/2)² / √(-ξ+c₋²/2)) + φ(ξ)]`.
///
/// `eps` excludes the transition zone around `ξ = -c₋²/2` (default
/// `0.05 c₋²`); rays within `δ` of a breather are rejected as well.
pub fn q_subleading_detail(
    x: f64,
    t: f64,
    data: &SpectralData,
    eps: Option<f64>,
) -> Result<Subleading> {
    if t <= 0.0 {
        return Err(MkdvError::Domain("subleading term needs t > 0".into()));
    }
    let (cp, cm) = (data.c_plus(), data.c_minus());
    let xi = x / (12.0 * t);
    let eps = eps.unwrap_or(0.05 * cm * cm);
    let half = cm * cm / 2.0;
    let kind = region_kind(xi, cp, cm);
    let (lk, is_middle) = match kind {
        RegionKind::UtmostLeft => (LeftKind::Utmost, false),
        RegionKind::MiddleLeft => (LeftKind::Middle, true),
        _ => {
            return Err(MkdvError::Domain(format!(
                "subleading radiation lives in the left regions, ξ = {xi} does not"
            )));
        }
    };
    if (xi + half).abs() < eps {
        return Err(MkdvError::Domain(format!(
            "ξ = {xi} inside the transition zone around -c₋²/2 (non-uniform error there)"
        )));
    }
    if is_middle && xi > -half + cp * cp - eps {
        return Err(MkdvError::Domain(format!(
            "ξ = {xi} too close to the oscillatory-cone edge"
        )));
    }
    let delta = default_delta(data);
    for &v in data.speeds() {
        if (xi - v / 12.0).abs() < delta {
            return Err(MkdvError::Domain(format!(
                "ξ = {xi} sits on a breather ray; the radiation formula excludes it"
            )));
        }
    }

    let nu = crate::scattering::subleading_nu(xi, data)?;
    if nu == 0.0 {
        return Ok(Subleading {
            nu,
            phi: 0.0,
            amplitude: 0.0,
            phase: 0.0,
            value: 0.0,
        });
    }
    let chi = chi_limit(xi, data, lk)?;
    let arg_chi_sq = (chi * chi).arg();
    let arg_gamma = log_gamma(I * nu)?.im;
    let arg_r = if is_middle {
        let d0 = (xi + half).sqrt();
        data.r_oncut(d0, crate::quad::Side::Plus)?.arg()
    } else {
        let k0 = (-xi - half).sqrt();
        data.r(Complex64::new(k0, 0.0))?.arg()
    };
    let quarter = if is_middle { -PI / 4.0 } else { PI / 4.0 };
    let phi = quarter - arg_r - arg_gamma + arg_chi_sq;

    let amplitude = (nu.abs() * (-xi + half).sqrt() / (3.0 * t * (xi + half).abs())).sqrt();
    let phase = 16.0 * t * (-xi + half).powf(1.5)
        + nu * (192.0 * t * (xi + half).powi(2) / (-xi + half).sqrt()).ln()
        + phi;
    Ok(Subleading {
        nu,
        phi,
        amplitude,
        phase,
        value: amplitude * phase.cos(),
    })
}

/// Convenience wrapper returning only the correction value.
pub fn q_subleading(x: f64, t: f64, data: &SpectralData, eps: Option<f64>) -> Result<f64> {
    Ok(q_subleading_detail(x, t, data, eps)?.value)
}

/// Per-eigenvalue phase-shift record.
#[derive(Debug, Clone)]
pub struct PhaseShift {
    pub index: usize,
    pub kappa: Complex64,
    pub ray: EigenRay,
    pub background: f64,
    pub speed: f64,
    /// Shifted cosh-phase, solitons only.
    pub x_j: Option<f64>,
    /// Shifted norming constant, breathers only (absent for trapped ones,
    /// whose elliptic-background profile is not assembled).
    pub nu_hat: Option<Complex64>,
}

/// The full phase-shift table: how every soliton and breather is displaced
/// by the rest of the data.
pub fn phase_shift_report(data: &SpectralData) -> Result<Vec<PhaseShift>> {
    let (cp, cm) = (data.c_plus(), data.c_minus());
    data.eigens()
        .iter()
        .enumerate()
        .map(|(j, e)| {
            let ray = data.rays()[j];
            let speed = data.speeds()[j];
            let (background, x_j, nu_hat) = match ray {
                EigenRay::RightConst => {
                    if e.is_soliton() {
                        let (x_j, _) = soliton_phase(data, j)?;
                        (cp, Some(x_j), None)
                    } else {
                        let tj = t_right(e.kappa, None, data, j + 1)?;
                        (cp, None, Some(e.nu / (tj * tj)))
                    }
                }
                EigenRay::LeftConst => {
                    let xi = speed / 12.0;
                    let kind = match region_kind(xi, cp, cm) {
                        RegionKind::MiddleLeft => LeftKind::Middle,
                        _ => LeftKind::Utmost,
                    };
                    let tj = t_left(e.kappa, None, xi, data, kind)?;
                    (cm, None, Some(e.nu / (tj * tj)))
                }
                EigenRay::Trapped => (f64::NAN, None, None),
            };
            Ok(PhaseShift {
                index: j,
                kappa: e.kappa,
                ray,
                background,
                speed,
                x_j,
                nu_hat,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::{
        generic_scattering, solitonstep_scattering, step_scattering, DiscreteEigen,
    };
    use crate::util::SmallRng;

    #[test]
    fn regions_partition_the_line() {
        let mut rng = SmallRng::new(19);
        for _ in 0..200 {
            let cp = rng.range(0.0, 0.7);
            let cm = cp + rng.range(0.05, 0.8);
            let xi = rng.range(-3.0, 3.0);
            // region_kind is a total function; check threshold consistency.
            let kind = region_kind(xi, cp, cm);
            let (s3, s1) = (cm * cm, cp * cp);
            let expect = if xi >= s3 / 3.0 + s1 / 6.0 {
                RegionKind::RightConst
            } else if xi >= -s3 / 2.0 + s1 {
                RegionKind::Dsw
            } else if xi > -s3 / 2.0 {
                RegionKind::MiddleLeft
            } else {
                RegionKind::UtmostLeft
            };
            assert_eq!(kind, expect);
        }
        // Boundary membership: the leading edge belongs to the right region,
        // the trailing edge to the oscillatory one, -c₋²/2 to the utmost
        // (thresholds computed exactly as the classifier does).
        let (cp, cm) = (0.4f64, 0.8f64);
        let (s1, s3) = (cp * cp, cm * cm);
        assert_eq!(
            region_kind(s3 / 3.0 + s1 / 6.0, cp, cm),
            RegionKind::RightConst
        );
        assert_eq!(region_kind(-s3 / 2.0 + s1, cp, cm), RegionKind::Dsw);
        assert_eq!(region_kind(-s3 / 2.0, cp, cm), RegionKind::UtmostLeft);
    }

    #[test]
    fn classify_exact_step() {
        let data = step_scattering(0.8, 0.4).unwrap();
        // ξ = 0.02 with thresholds (-0.16, 0.24): oscillatory, no companion.
        let tag = classify(0.02, &data, default_delta(&data)).unwrap();
        assert_eq!(tag.kind, RegionKind::Dsw);
        assert!(tag.nearest.is_none());
        let tag = classify(0.3, &data, default_delta(&data)).unwrap();
        assert_eq!(tag.kind, RegionKind::RightConst);
        // Bad δ rejected when it violates the gap condition.
        let sol1 = DiscreteEigen::new(Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)).unwrap();
        let sol2 = DiscreteEigen::new(Complex64::new(0.0, 1.01), Complex64::new(1.0, 0.0)).unwrap();
        let data2 = generic_scattering(0.8, 0.4, vec![sol1, sol2], None).unwrap();
        let gap = (data2.speeds()[0] - data2.speeds()[1]) / 12.0;
        assert!(classify(0.3, &data2, 0.6 * gap).is_err());
        assert!(classify(0.3, &data2, 0.4 * gap).is_ok());
    }

    #[test]
    fn trapped_breather_flagged() {
        let data = solitonstep_scattering(0.8, 0.25, 3.0).unwrap();
        let v = data.speeds()[0];
        let tag = classify(v / 12.0, &data, default_delta(&data)).unwrap();
        assert_eq!(tag.kind, RegionKind::Dsw);
        assert_eq!(tag.nearest.map(|(j, _)| j), Some(0));
        // Evaluating on the trapped ray needs c₊ > 0, which this preset
        // lacks: the oscillatory phase is unsupported there.
        assert!(q_asymptotic(v, 12.0, &data, None).is_err());
    }

    #[test]
    fn right_region_values() {
        // Exact step beyond the cone: exactly c₊.
        let data = step_scattering(0.8, 0.4).unwrap();
        let v = q_asymptotic(12.0 * 0.5 * 10.0, 10.0, &data, None).unwrap();
        assert_eq!(v.q, 0.4);
        assert_eq!(v.region.kind, RegionKind::RightConst);

        // Single imaginary κ on c₊ = 0 with T̃₁ = 1: the shifted phase
        // reduces to the free-soliton phase ln(2(κ₀²-c²)/(|ν|κ₀)).
        let k0 = 1.1;
        let nu = -0.7;
        let sol = DiscreteEigen::new(Complex64::new(0.0, k0), Complex64::new(nu, 0.0)).unwrap();
        let data = generic_scattering(0.8, 0.0, vec![sol], None).unwrap();
        let t = 3.0;
        let x = data.speeds()[0] * t + 0.3;
        let v = q_asymptotic(x, t, &data, None).unwrap();
        let x0_free = (2.0 * k0 * k0 / (nu.abs() * k0)).ln();
        let expect = crate::profiles::q_soliton(x, t, 0.0, k0, x0_free, nu).unwrap();
        assert!((v.q - expect).abs() < 1e-12, "{} vs {expect}", v.q);
    }

    #[test]
    fn ordering_sensitivity_of_soliton_phases() {
        // The slower of two solitons carries the faster one's Blaschke
        // factor; removing the fast one changes x₂.
        let fast = DiscreteEigen::new(Complex64::new(0.0, 1.6), Complex64::new(0.9, 0.0)).unwrap();
        let slow = DiscreteEigen::new(Complex64::new(0.0, 1.1), Complex64::new(0.9, 0.0)).unwrap();
        let both = generic_scattering(0.8, 0.4, vec![fast, slow], None).unwrap();
        let alone = generic_scattering(0.8, 0.4, vec![slow], None).unwrap();
        let report_both = phase_shift_report(&both).unwrap();
        let report_alone = phase_shift_report(&alone).unwrap();
        let x2_both = report_both[1].x_j.unwrap();
        let x2_alone = report_alone[0].x_j.unwrap();
        assert!(
            (x2_both - x2_alone).abs() > 1e-3,
            "phase insensitive to the faster soliton: {x2_both} vs {x2_alone}"
        );
        // The fastest soliton uses T̃₁ = 1 in both data sets, but the band
        // integral still differs from the bare phase only through ln T̃²,
        // which vanishes for j = 1: its x₁ must agree across data sets that
        // share (c₊, κ₁, ν₁).
        let fast_alone = generic_scattering(0.8, 0.4, vec![fast], None).unwrap();
        let x1_both = report_both[0].x_j.unwrap();
        let x1_alone = phase_shift_report(&fast_alone).unwrap()[0].x_j.unwrap();
        assert!((x1_both - x1_alone).abs() < 1e-12);
    }

    #[test]
    fn left_breather_shift() {
        // A slow breather riding on the exact step: ν̂ = ν/T²(κ, ξ) with
        // |ν̂| ≠ |ν| in general.
        let br = DiscreteEigen::new(Complex64::new(1.5, 0.6), Complex64::new(0.5, 0.4)).unwrap();
        let data = crate::scattering::step_scattering_with_eigens(0.8, 0.4, vec![br]).unwrap();
        assert_eq!(data.rays()[0], EigenRay::LeftConst);
        let report = phase_shift_report(&data).unwrap();
        let nu_hat = report[0].nu_hat.unwrap();
        assert!((nu_hat.norm() - 0.5f64.hypot(0.4)).abs() > 1e-6);
        // And the dispatcher returns the shifted breather on its ray.
        let t = 8.0;
        let x = report[0].speed * t;
        let v = q_asymptotic(x, t, &data, None).unwrap();
        let expect = q_breather(x, t, &BreatherParams::new(0.8, br.kappa, nu_hat).unwrap());
        assert!((v.q - expect).abs() < 1e-12);
        // Away from the ray: the constant background c₋.
        let v = q_asymptotic(x - 3.0 * t, t, &data, None).unwrap();
        assert_eq!(v.q, 0.8);
    }

    #[test]
    fn subleading_structure() {
        let data = step_scattering(0.8, 0.4).unwrap();
        let xi = -0.6;
        let t = 20.0;
        let s = q_subleading_detail(12.0 * xi * t, t, &data, None).unwrap();
        assert!(s.nu > 0.0);
        // Amplitude scales as t^{-1/2}.
        let s2 = q_subleading_detail(12.0 * xi * (2.0 * t), 2.0 * t, &data, None).unwrap();
        assert!((s2.amplitude / s.amplitude - 0.5f64.sqrt()).abs() < 1e-12);
        // Middle region: ν < 0 and the π/4 constant flips sign (φ formulas
        // differ by π/2 plus the data-dependent terms).
        let sm = q_subleading_detail(12.0 * -0.25 * t, t, &data, None).unwrap();
        assert!(sm.nu < 0.0);
        // Transition zone rejected.
        assert!(q_subleading(12.0 * -0.33 * t, t, &data, None).is_err());
        // Near-flat step: ν -> 0 and the correction vanishes.
        let flat = step_scattering(0.8, 0.79999).unwrap();
        let s0 = q_subleading_detail(12.0 * -0.7 * t, t, &flat, None).unwrap();
        assert!(s0.value.abs() < 1e-4);
    }

    #[test]
    fn solitonstep_left_radiation_is_computable() {
        // The reflection pole of the sech-pulse preset sits on the cut at
        // iκ₀ and only obstructs the trapped-ray analysis; the left-region
        // radiation path touches r on the real axis and ln|a|² on the cut,
        // both regular, so it evaluates fine.
        let data = solitonstep_scattering(0.8, 0.25, 3.0).unwrap();
        let t = 25.0;
        let s = q_subleading_detail(12.0 * -0.7 * t, t, &data, None).unwrap();
        assert!(s.value.is_finite() && s.nu > 0.0);
        assert!(s.amplitude > 0.0 && s.amplitude < 0.2);
    }

    #[test]
    fn dsw_edge_amplitude() {
        // Leading oscillation max -> 2c₋ - c₊ as ξ -> leading edge; trailing
        // amplitude 2(d - c₊) -> 0.
        let data = step_scattering(0.8, 0.4).unwrap();
        let lead = 0.64 / 3.0 + 0.16 / 6.0;
        let st = whitham::dsw_state(lead - 1e-5, &data).unwrap();
        let peak = 0.8 + st.d - 0.4;
        assert!((peak - 1.2).abs() < 0.02, "peak {peak}");
        let st = whitham::dsw_state(-0.16 + 1e-6, &data).unwrap();
        assert!(2.0 * (st.d - 0.4) < 1e-2, "trailing amplitude");
    }
}
