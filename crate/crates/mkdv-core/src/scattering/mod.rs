//! Scattering data for step-like backgrounds.
//!
//! Holds the spectral picture driving the large-time wave decomposition:
//! background constants `(c₋, c₊)`, the reflection coefficient `r(k)` and
//! inverse transmission coefficient `a(k)` (closed forms for the exact step
//! and the soliton-step presets, a tabulated grid otherwise), and the
//! discrete spectrum `(κ_j, ν_j)` sorted by decreasing asymptotic speed.
//!
//! The Blaschke products `T̃` and the Cauchy-integral corrections `T` that
//! encode how each wave component shifts every other one live in the
//! `tfuncs` submodule and are re-exported here.

mod tfuncs;

pub use tfuncs::{chi_limit, subleading_nu, t_dsw, t_left, t_right, LeftKind};

use crate::error::{MkdvError, Result};
use crate::quad::Side;
use crate::specfun::branch_sqrt;
use crate::util::interp1;
use crate::whitham;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A simple zero of `a(k)` in the quarter plane `Re κ >= 0`, `Im κ > 0`,
/// with its norming constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteEigen {
    pub kappa: Complex64,
    pub nu: Complex64,
}

impl DiscreteEigen {
    pub fn new(kappa: Complex64, nu: Complex64) -> Result<Self> {
        if kappa.im <= 0.0 || kappa.re < 0.0 {
            return Err(MkdvError::Domain(format!(
                "eigenvalue {kappa} must have Im > 0 and Re >= 0 (quarter-plane representative)"
            )));
        }
        if nu.norm() == 0.0 {
            return Err(MkdvError::Domain("norming constant must be nonzero".into()));
        }
        if kappa.re == 0.0 && nu.im != 0.0 {
            return Err(MkdvError::Domain(
                "imaginary eigenvalue (soliton) needs a real norming constant".into(),
            ));
        }
        Ok(DiscreteEigen { kappa, nu })
    }

    /// Imaginary-pair eigenvalue (soliton/antisoliton).
    pub fn is_soliton(&self) -> bool {
        self.kappa.re == 0.0
    }

    /// `χ = χ₁ + iχ₂ = √(κ² + c²)` with positive parts for a true breather.
    pub fn chi(&self, c: f64) -> Complex64 {
        branch_sqrt(self.kappa, c)
    }
}

/// Where an eigenvalue's ray ends up at large times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenRay {
    /// Positive-direction soliton/breather on the background `c₊`.
    RightConst,
    /// Trapped inside the expanding oscillatory cone.
    Trapped,
    /// Breather on the background `c₋`.
    LeftConst,
}

/// How the continuous spectrum is represented.
#[derive(Debug, Clone)]
enum DataKind {
    /// Exact step: `r = (γ²-1)/(γ²+1)`, `a = (γ + 1/γ)/2` with
    /// `γ⁴ = (k-ic₋)(k+ic₊) / ((k+ic₋)(k-ic₊))`.
    ExactStep,
    /// Constant `c` on the left, sech pulse on zero background on the right.
    /// `b(k)` (hence `r`) has a pole at `iκ₀`.
    SolitonStep { kappa0: f64, nu: f64 },
    /// User-supplied spectrum with an optional tabulated reflection
    /// coefficient on a real-`k` grid (linear interpolation). No `a(k)` is
    /// available, so band integrals over `ln|a|²` are rejected.
    Generic { reflection: Option<ReflectionTable> },
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct ReflectionTable {
    pub k: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// Exact distances from a quadrature node at `i y` to the branch points
/// `i c₋` and `i c₊` (measured for `|y|`), when the caller has them.
#[derive(Debug, Clone, Copy, Default)]
pub struct EdgeHint {
    pub d_cm: Option<f64>,
    pub d_cp: Option<f64>,
}

/// The full spectral data set.
#[derive(Debug, Clone)]
pub struct SpectralData {
    c_minus: f64,
    c_plus: f64,
    kind: DataKind,
    eigens: Vec<DiscreteEigen>,
    speeds: Vec<f64>,
    rays: Vec<EigenRay>,
}

/// Closed-form scattering data for the exact step `q(x,0) = c∓` for `±x < 0`.
///
/// Carries no discrete spectrum; `a(k) -> 1` as `k -> ∞`.
pub fn step_scattering(c_minus: f64, c_plus: f64) -> Result<SpectralData> {
    check_backgrounds(c_minus, c_plus)?;
    Ok(SpectralData {
        c_minus,
        c_plus,
        kind: DataKind::ExactStep,
        eigens: Vec::new(),
        speeds: Vec::new(),
        rays: Vec::new(),
    })
}

/// Scattering data for a constant `c` on the left and a sech pulse of
/// spectral height `κ₀ < c` on zero background on the right.
///
/// The pulse is a breather from the spectral point of view: `a(k)` has a
/// conjugate-symmetric pair of zeros near `iκ₀`, and the breather stays
/// trapped inside the oscillatory cone. The reflection coefficient has a
/// pole at `iκ₀` (see [`SpectralData::reflection_pole`]); its norming
/// constant is not determined by `a`, `b` alone and is stored as 1.
pub fn solitonstep_scattering(c: f64, kappa0: f64, nu: f64) -> Result<SpectralData> {
    if !(c > kappa0 && kappa0 > 0.0) {
        return Err(MkdvError::Domain(format!(
            "soliton step needs c > kappa0 > 0, got c = {c}, kappa0 = {kappa0}"
        )));
    }
    if nu == 0.0 {
        return Err(MkdvError::Domain("nu must be nonzero".into()));
    }
    let alpha = 2.0 * nu * nu * kappa0 / (4.0 * kappa0 * kappa0 + nu * nu);
    let beta = 4.0 * nu * kappa0 * kappa0 / (4.0 * kappa0 * kappa0 + nu * nu);
    let disc = c * c + 2.0 * c * beta - (alpha - kappa0) * (alpha - kappa0);
    if disc <= 0.0 {
        return Err(MkdvError::Domain(
            "zeros of a(k) left the generic position (discriminant <= 0)".into(),
        ));
    }
    let re = beta.abs() * disc.sqrt() / (c + 2.0 * beta);
    let im = (alpha - kappa0) * (beta + c) / (c + 2.0 * beta);
    if im <= 0.0 {
        return Err(MkdvError::Domain(
            "computed zero of a(k) has Im <= 0; preset outside its generic range".into(),
        ));
    }
    let eigen = DiscreteEigen::new(Complex64::new(re, im), Complex64::new(1.0, 0.0))?;
    SpectralData::new(c, 0.0, DataKind::SolitonStep { kappa0, nu }, vec![eigen])
}

/// Exact-step continuous spectrum with a user-supplied discrete spectrum
/// riding on it (a step-like datum dressed with solitons and breathers).
pub fn step_scattering_with_eigens(
    c_minus: f64,
    c_plus: f64,
    eigens: Vec<DiscreteEigen>,
) -> Result<SpectralData> {
    SpectralData::new(c_minus, c_plus, DataKind::ExactStep, eigens)
}

/// Generic data: backgrounds, eigenvalue list, optional tabulated reflection.
pub fn generic_scattering(
    c_minus: f64,
    c_plus: f64,
    eigens: Vec<DiscreteEigen>,
    reflection: Option<ReflectionTable>,
) -> Result<SpectralData> {
    check_backgrounds(c_minus, c_plus)?;
    if let Some(t) = &reflection {
        if t.k.len() != t.re.len() || t.k.len() != t.im.len() {
            return Err(MkdvError::Config(
                "reflection grid arrays must have equal lengths".into(),
            ));
        }
    }
    SpectralData::new(c_minus, c_plus, DataKind::Generic { reflection }, eigens)
}

fn check_backgrounds(c_minus: f64, c_plus: f64) -> Result<()> {
    if c_minus > c_plus && c_plus >= 0.0 {
        Ok(())
    } else {
        Err(MkdvError::Domain(format!(
            "backgrounds must satisfy c_minus > c_plus >= 0, got ({c_minus}, {c_plus})"
        )))
    }
}

impl SpectralData {
    fn new(
        c_minus: f64,
        c_plus: f64,
        kind: DataKind,
        mut eigens: Vec<DiscreteEigen>,
    ) -> Result<Self> {
        check_backgrounds(c_minus, c_plus)?;
        for e in &eigens {
            if e.kappa.re == 0.0 && e.kappa.im <= c_minus {
                return Err(MkdvError::Domain(format!(
                    "eigenvalue {} lies on the excluded segment (i c_minus, 0]",
                    e.kappa
                )));
            }
        }
        let mut tagged: Vec<(DiscreteEigen, f64, EigenRay)> = eigens
            .drain(..)
            .map(|e| {
                let (ray, v) = whitham::eigen_ray_and_speed(e.kappa, c_plus, c_minus)?;
                Ok((e, v, ray))
            })
            .collect::<Result<_>>()?;
        tagged.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        for w in tagged.windows(2) {
            if w[0].1 - w[1].1 < 1e-12 {
                return Err(MkdvError::Domain(format!(
                    "eigenvalue speeds {} and {} are not distinct",
                    w[0].1, w[1].1
                )));
            }
        }
        let speeds = tagged.iter().map(|t| t.1).collect();
        let rays = tagged.iter().map(|t| t.2).collect();
        let eigens = tagged.into_iter().map(|t| t.0).collect();
        Ok(SpectralData {
            c_minus,
            c_plus,
            kind,
            eigens,
            speeds,
            rays,
        })
    }

    pub fn c_minus(&self) -> f64 {
        self.c_minus
    }

    pub fn c_plus(&self) -> f64 {
        self.c_plus
    }

    /// Eigenvalues sorted by strictly decreasing asymptotic speed.
    pub fn eigens(&self) -> &[DiscreteEigen] {
        &self.eigens
    }

    /// Asymptotic speed of eigenvalue `j` (background-aware).
    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    pub fn rays(&self) -> &[EigenRay] {
        &self.rays
    }

    /// Number of eigenvalues moving faster than the ray `x/t = 12 ξ`;
    /// this is the count entering the Blaschke product at that ray.
    pub fn n_faster(&self, xi: f64) -> usize {
        self.speeds.iter().filter(|&&v| v > 12.0 * xi).count()
    }

    /// Whether `a(k)` (hence every band integral over `ln|a|²`) is
    /// available in closed form.
    pub fn has_closed_form_a(&self) -> bool {
        !matches!(self.kind, DataKind::Generic { .. })
    }

    /// Pole of the reflection coefficient, when the preset has one.
    pub fn reflection_pole(&self) -> Option<Complex64> {
        match &self.kind {
            DataKind::SolitonStep { kappa0, .. } => Some(Complex64::new(0.0, *kappa0)),
            _ => None,
        }
    }

    fn gamma_step(&self, k: Complex64) -> Complex64 {
        let (cm, cp) = (self.c_minus, self.c_plus);
        let q1 = (k - I * cm) / (k - I * cp);
        let q2 = (k + I * cp) / (k + I * cm);
        qroot(q1) * qroot(q2)
    }

    /// Boundary value of the step `γ` on the imaginary axis.
    fn gamma_step_oncut(&self, y: f64, side: Side) -> Complex64 {
        let (cm, cp) = (self.c_minus, self.c_plus);
        let q1m = ((cm - y) / (cp - y)).abs();
        let q2m = ((y + cp) / (y + cm)).abs();
        let mag = (q1m * q2m).powf(0.25);
        if y.abs() > cp && y.abs() < cm {
            // Inside one of the outer bands: quarter-phase from the side.
            mag * Complex64::from_polar(1.0, -side.sign() * std::f64::consts::FRAC_PI_4)
        } else {
            Complex64::new(mag, 0.0)
        }
    }

    fn gamma_single(&self, k: Complex64) -> Complex64 {
        qroot((k - I * self.c_minus) / (k + I * self.c_minus))
    }

    fn gamma_single_oncut(&self, y: f64, side: Side) -> Complex64 {
        let c = self.c_minus;
        let mag = ((c - y) / (c + y)).powf(0.25);
        mag * Complex64::from_polar(1.0, -side.sign() * std::f64::consts::FRAC_PI_4)
    }

    /// Inverse transmission coefficient `a(k)` off the spectral cuts.
    pub fn a(&self, k: Complex64) -> Result<Complex64> {
        match &self.kind {
            DataKind::ExactStep => {
                let g = self.gamma_step(k);
                Ok(0.5 * (g + 1.0 / g))
            }
            DataKind::SolitonStep { kappa0, nu } => {
                let g = self.gamma_single(k);
                Ok(solitonstep_ab(g, k, *kappa0, *nu).0)
            }
            DataKind::Generic { .. } => Err(MkdvError::Unsupported(
                "a(k) is not available for tabulated spectral data".into(),
            )),
        }
    }

    /// Boundary value `a_±(iy)` on the imaginary axis.
    pub fn a_oncut(&self, y: f64, side: Side) -> Result<Complex64> {
        match &self.kind {
            DataKind::ExactStep => {
                let g = self.gamma_step_oncut(y, side);
                Ok(0.5 * (g + 1.0 / g))
            }
            DataKind::SolitonStep { kappa0, nu } => {
                let g = if y.abs() < self.c_minus {
                    self.gamma_single_oncut(y, side)
                } else {
                    self.gamma_single(Complex64::new(0.0, y))
                };
                Ok(solitonstep_ab(g, Complex64::new(0.0, y), *kappa0, *nu).0)
            }
            DataKind::Generic { .. } => Err(MkdvError::Unsupported(
                "a(k) is not available for tabulated spectral data".into(),
            )),
        }
    }

    /// `b(k)` where defined.
    pub fn b(&self, k: Complex64) -> Result<Complex64> {
        match &self.kind {
            DataKind::ExactStep => {
                let g = self.gamma_step(k);
                Ok(0.5 * (g - 1.0 / g))
            }
            DataKind::SolitonStep { kappa0, nu } => {
                let g = self.gamma_single(k);
                Ok(solitonstep_ab(g, k, *kappa0, *nu).1)
            }
            DataKind::Generic { .. } => Err(MkdvError::Unsupported(
                "b(k) is not available for tabulated spectral data".into(),
            )),
        }
    }

    /// Reflection coefficient on the real axis (and its continuation for
    /// the closed-form presets).
    pub fn r(&self, k: Complex64) -> Result<Complex64> {
        match &self.kind {
            DataKind::ExactStep | DataKind::SolitonStep { .. } => Ok(self.b(k)? / self.a(k)?),
            DataKind::Generic { reflection } => {
                if k.im != 0.0 {
                    return Err(MkdvError::Unsupported(
                        "tabulated reflection data only covers the real axis".into(),
                    ));
                }
                match reflection {
                    Some(t) => Ok(Complex64::new(
                        interp1(&t.k, &t.re, k.re),
                        interp1(&t.k, &t.im, k.re),
                    )),
                    None => Ok(Complex64::new(0.0, 0.0)),
                }
            }
        }
    }

    /// Boundary value `r_±(iy)` on the imaginary axis (presets only).
    pub fn r_oncut(&self, y: f64, side: Side) -> Result<Complex64> {
        match &self.kind {
            DataKind::ExactStep => {
                let g = self.gamma_step_oncut(y, side);
                let g2 = g * g;
                Ok((g2 - 1.0) / (g2 + 1.0))
            }
            DataKind::SolitonStep { kappa0, nu } => {
                let g = self.gamma_single_oncut(y, side);
                let (a, b) = solitonstep_ab(g, Complex64::new(0.0, y), *kappa0, *nu);
                Ok(b / a)
            }
            DataKind::Generic { .. } => Err(MkdvError::Unsupported(
                "tabulated reflection data only covers the real axis".into(),
            )),
        }
    }

    /// `ln |a(iy)|²` on the imaginary axis, even in `y` and stable against
    /// the fourth-root blow-ups at `±i c₋` and `±i c₊`.
    ///
    /// Quadrature nodes can supply exact distances to the nearby branch
    /// points through [`EdgeHint`]; distances refer to `|y|`.
    pub fn ln_abs_a_sq_oncut(&self, y: f64, hint: EdgeHint) -> Result<f64> {
        let ya = y.abs();
        let (cm, cp) = (self.c_minus, self.c_plus);
        let dcm = hint.d_cm.unwrap_or(cm - ya);
        if dcm <= 0.0 {
            return Err(MkdvError::Domain(format!(
                "ln|a|² requested outside the cut at |y| = {ya}"
            )));
        }
        match &self.kind {
            DataKind::ExactStep => {
                if ya > cp {
                    // Outer band: |a|² = (√ρ + 1/√ρ)/4 with
                    // ρ = (c₋-y)(y+c₊) / ((y+c₋)(y-c₊)).
                    let dcp = hint.d_cp.unwrap_or(ya - cp);
                    let rho = dcm * (ya + cp) / ((ya + cm) * dcp);
                    Ok(rho.ln_1p() - 0.5 * rho.ln() - (4.0f64).ln())
                } else {
                    // Inner band: γ real positive, |a|² = cosh²(ln(q)/4) with
                    // q = (c₋-y)(y+c₊) / ((c₊-y)(y+c₋)).
                    let dcp = hint.d_cp.unwrap_or(cp - ya);
                    let lnq = (dcm * (ya + cp)).ln() - (dcp * (ya + cm)).ln();
                    let h = 0.5 * lnq.abs();
                    Ok(2.0 * (0.5 * h + (-h).exp().ln_1p() - std::f64::consts::LN_2))
                }
            }
            DataKind::SolitonStep { kappa0, nu } => {
                // a₊ = [(μ+1/μ)A - (μ-1/μ)B - i((μ-1/μ)A + (μ+1/μ)B)]/(2√2)
                // with μ = ((c-y)/(c+y))^{1/4}, A = 1 - α/(y+κ₀),
                // B = β/(y+κ₀), written against μ² so the fourth-root blow-up
                // at i c₋ stays explicit. |a| is even; evaluate at |y| (the
                // raw formula continued to y < 0 carries the spurious mirror
                // pole of b at -iκ₀, which the spectral theory excludes).
                let denom = 4.0 * kappa0 * kappa0 + nu * nu;
                let alpha = 2.0 * nu * nu * kappa0 / denom;
                let beta = 4.0 * nu * kappa0 * kappa0 / denom;
                let aa = 1.0 - alpha / (ya + kappa0);
                let bb = beta / (ya + kappa0);
                let mu2 = (dcm / (cm + ya)).sqrt();
                let t1 = (mu2 + 1.0) * aa - (mu2 - 1.0) * bb;
                let t2 = (mu2 - 1.0) * aa + (mu2 + 1.0) * bb;
                // |a|² = (t1² + t2²) / (8 μ²)
                Ok((t1 * t1 + t2 * t2).ln() - mu2.ln() - (8.0f64).ln())
            }
            DataKind::Generic { .. } => Err(MkdvError::Unsupported(
                "ln|a|² on the cut is not available for tabulated spectral data".into(),
            )),
        }
    }

    /// Analytic extension `f̂(k) = -1/(a(k) conj(b(conj k)))` of the jump
    /// function near the segment `[i c₋, -i c₋]`; `f̂₊ = f`, `f̂₋ = -f`.
    pub fn f_hat(&self, k: Complex64) -> Result<Complex64> {
        let a = self.a(k)?;
        let b = self.b(k.conj())?.conj();
        if a.norm() < 1e-14 || b.norm() < 1e-14 {
            return Err(MkdvError::Singular(format!(
                "a or b vanishes near {k}; f̂ undefined"
            )));
        }
        Ok(-1.0 / (a * b))
    }

    /// On-cut jump function `f(iy) = i/(a₋ a₊)` for `|y| < c₋`.
    pub fn f_oncut(&self, y: f64) -> Result<Complex64> {
        let ap = self.a_oncut(y, Side::Plus)?;
        let am = self.a_oncut(y, Side::Minus)?;
        if ap.norm() < 1e-14 || am.norm() < 1e-14 {
            return Err(MkdvError::Singular(format!("a vanishes at i{y}")));
        }
        Ok(I / (ap * am))
    }

    /// Blaschke product over the `n` fastest eigenvalues.
    pub fn ttilde(&self, k: Complex64, n: usize) -> Complex64 {
        ttilde_product(k, &self.eigens[..n.min(self.eigens.len())])
    }

    /// Blaschke product over eigenvalues moving faster than the ray `12 ξ`.
    pub fn ttilde_at_xi(&self, k: Complex64, xi: f64) -> Complex64 {
        self.ttilde(k, self.n_faster(xi))
    }

    /// `ln T̃²(iy)` on the imaginary axis, branch tracked continuously along
    /// the contour: real for soliton factors, pairwise principal logs for
    /// breather quadruples (neither ratio crosses the negative real axis for
    /// `s` on the contour).
    pub fn log_ttilde_sq_on_axis(&self, y: f64, n: usize) -> Complex64 {
        let s = Complex64::new(0.0, y);
        let mut acc = Complex64::new(0.0, 0.0);
        for e in &self.eigens[..n.min(self.eigens.len())] {
            let k = e.kappa;
            if e.is_soliton() {
                let b = k.im;
                // ((y+b)/(y-b))² is positive real on the axis.
                acc += 2.0 * ((y + b) / (y - b)).abs().ln();
            } else {
                acc += 2.0 * (((s - k.conj()) / (s - k)).ln() + ((s + k) / (s + k.conj())).ln());
            }
        }
        acc
    }
}

/// Principal fourth root of a Möbius ratio; analytic wherever the ratio
/// stays off the negative real axis.
fn qroot(q: Complex64) -> Complex64 {
    q.powf(0.25)
}

fn solitonstep_ab(gamma: Complex64, k: Complex64, kappa0: f64, nu: f64) -> (Complex64, Complex64) {
    let denom = 4.0 * kappa0 * kappa0 + nu * nu;
    let alpha = 2.0 * nu * nu * kappa0 / denom;
    let beta = 4.0 * nu * kappa0 * kappa0 / denom;
    let gp = gamma + 1.0 / gamma;
    let gm = gamma - 1.0 / gamma;
    let a = 0.5 * (gp * (1.0 - I * alpha / (k + I * kappa0)) - gm * I * beta / (k + I * kappa0));
    let b = 0.5 * (gm * (1.0 + I * alpha / (k - I * kappa0)) - gp * I * beta / (k - I * kappa0));
    (a, b)
}

/// Finite Blaschke product over the given eigenvalues: unimodular on the
/// real axis, `-> 1` at infinity.
pub fn ttilde_product(k: Complex64, eigens: &[DiscreteEigen]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for e in eigens {
        let kp = e.kappa;
        if e.is_soliton() {
            acc *= (k - kp.conj()) / (k - kp);
        } else {
            acc *= (k - kp.conj()) / (k - kp) * (k + kp) / (k + kp.conj());
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// JSON round trip.
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct EigenJson {
    kappa_re: f64,
    kappa_im: f64,
    nu_re: f64,
    nu_im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum PresetJson {
    ExactStep,
    SolitonStep { kappa0: f64, nu: f64 },
}

/// Serialized form: backgrounds, eigenvalues, optional reflection grid, and
/// an optional preset tag so closed-form data rebuilds exactly.
#[derive(Debug, Serialize, Deserialize)]
pub struct SpectralDataJson {
    pub c_minus: f64,
    pub c_plus: f64,
    pub eigens: Vec<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reflection_grid: Option<ReflectionTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<PresetJson>,
}

impl SpectralData {
    pub fn to_json(&self) -> serde_json::Value {
        let eigens = self
            .eigens
            .iter()
            .map(|e| {
                serde_json::to_value(EigenJson {
                    kappa_re: e.kappa.re,
                    kappa_im: e.kappa.im,
                    nu_re: e.nu.re,
                    nu_im: e.nu.im,
                })
                .expect("eigen serialization")
            })
            .collect();
        let (preset, reflection_grid) = match &self.kind {
            DataKind::ExactStep => (Some(PresetJson::ExactStep), None),
            DataKind::SolitonStep { kappa0, nu } => (
                Some(PresetJson::SolitonStep {
                    kappa0: *kappa0,
                    nu: *nu,
                }),
                None,
            ),
            DataKind::Generic { reflection } => (None, reflection.clone()),
        };
        serde_json::to_value(SpectralDataJson {
            c_minus: self.c_minus,
            c_plus: self.c_plus,
            eigens,
            reflection_grid,
            preset,
        })
        .expect("spectral data serialization")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let parsed: SpectralDataJson = serde_json::from_value(v.clone())
            .map_err(|e| MkdvError::Config(format!("bad spectral data JSON: {e}")))?;
        let eigens: Vec<DiscreteEigen> = parsed
            .eigens
            .iter()
            .map(|ev| {
                let e: EigenJson = serde_json::from_value(ev.clone())
                    .map_err(|e| MkdvError::Config(format!("bad eigen entry: {e}")))?;
                DiscreteEigen::new(
                    Complex64::new(e.kappa_re, e.kappa_im),
                    Complex64::new(e.nu_re, e.nu_im),
                )
            })
            .collect::<Result<_>>()?;
        match parsed.preset {
            Some(PresetJson::ExactStep) => {
                let mut data = step_scattering(parsed.c_minus, parsed.c_plus)?;
                if !eigens.is_empty() {
                    data = SpectralData::new(
                        parsed.c_minus,
                        parsed.c_plus,
                        DataKind::ExactStep,
                        eigens,
                    )?;
                }
                Ok(data)
            }
            Some(PresetJson::SolitonStep { kappa0, nu }) => {
                solitonstep_scattering(parsed.c_minus, kappa0, nu)
            }
            None => generic_scattering(
                parsed.c_minus,
                parsed.c_plus,
                eigens,
                parsed.reflection_grid,
            ),
        }
    }
}
