//! Subcommand definitions and dispatch.

use clap::{Args, Subcommand, ValueEnum};
use mkdv_core::asymptotics;
use mkdv_core::parallel::map_grid;
use mkdv_core::pde::{self, InitPreset, Scheme};
use mkdv_core::scattering::{self, DiscreteEigen, SpectralData};
use mkdv_core::whitham;
use mkdv_core::{Complex64, MkdvError};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

pub type Result<T> = std::result::Result<T, MkdvError>;

pub fn exit_code_for(e: &MkdvError) -> u8 {
    match e {
        MkdvError::Config(_) | MkdvError::Domain(_) | MkdvError::Unsupported(_) => 2,
        MkdvError::Accuracy(_) | MkdvError::Singular(_) | MkdvError::BlowUp { .. } => 3,
    }
}

#[derive(Subcommand)]
pub enum Command {
    /// Integrate the equation directly and write snapshots + diagnostics.
    Simulate(SimulateArgs),
    /// Evaluate the large-time wave decomposition on an x-grid.
    Asymptote(AsymptoteArgs),
    /// Compare a simulation snapshot against the predicted wave.
    Compare(CompareArgs),
    /// Self-similar modulation table over a range of z = x/t.
    Whitham(WhithamArgs),
    /// Build scattering data (JSON) and optionally sample it on a grid.
    Scattering(ScatteringArgs),
    /// Tabulate a closed-form profile.
    Profiles(ProfilesArgs),
}

fn merge_config<T: for<'de> Deserialize<'de> + Serialize>(
    flags: T,
    config: Option<&Path>,
    section: &str,
) -> Result<T> {
    let Some(path) = config else {
        return Ok(flags);
    };
    let text = fs::read_to_string(path)
        .map_err(|e| MkdvError::Config(format!("cannot read config {path:?}: {e}")))?;
    let file: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| MkdvError::Config(format!("bad JSON in {path:?}: {e}")))?;
    let base = file.get(section).cloned().unwrap_or(file);
    // Flags are Option-typed: file values fill in whatever the command line
    // left unset.
    let mut merged = serde_json::to_value(&flags)
        .map_err(|e| MkdvError::Config(format!("flag serialization: {e}")))?;
    if let (Some(m), Some(b)) = (merged.as_object_mut(), base.as_object()) {
        for (k, v) in b {
            let unset = m.get(k).is_none_or(|cur| cur.is_null());
            if unset {
                m.insert(k.clone(), v.clone());
            }
        }
    }
    serde_json::from_value(merged).map_err(|e| MkdvError::Config(format!("bad config: {e}")))
}

fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<std::path::PathBuf> {
    fs::create_dir_all(dir)
        .map_err(|e| MkdvError::Config(format!("cannot create {dir:?}: {e}")))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| MkdvError::Config(format!("cannot write {path:?}: {e}")))?;
    Ok(path)
}

fn echo_header<T: Serialize>(cfg: &T, section: &str) -> Vec<String> {
    let mut v = serde_json::to_value(cfg).unwrap_or_else(|_| json!({}));
    if let Some(map) = v.as_object_mut() {
        map.retain(|_, val| !val.is_null());
    }
    vec![
        format!("mkdv {}", env!("CARGO_PKG_VERSION")),
        format!("{section}: {v}"),
    ]
}

pub fn run(cmd: Command, out: &Path, config: Option<&Path>) -> Result<ExitCode> {
    match cmd {
        Command::Simulate(a) => simulate(merge_config(a, config, "simulate")?, out),
        Command::Asymptote(a) => asymptote(merge_config(a, config, "asymptote")?, out),
        Command::Compare(a) => compare(merge_config(a, config, "compare")?, out),
        Command::Whitham(a) => whitham_cmd(merge_config(a, config, "whitham")?, out),
        Command::Scattering(a) => scattering_cmd(merge_config(a, config, "scattering")?, out),
        Command::Profiles(a) => profiles_cmd(merge_config(a, config, "profiles")?, out),
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, ValueEnum, Serialize, Deserialize, Debug)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum PresetName {
    ExactStep,
    SmoothStep,
    SolitonLeftConstRight,
    ConstLeftSolitonRight,
    SolitonBackground,
    BreatherBackground,
}

#[derive(Args, Serialize, Deserialize, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    preset: Option<PresetName>,
    #[arg(long, allow_hyphen_values = true)]
    cminus: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    cplus: Option<f64>,
    /// Smoothing width (smooth_step).
    #[arg(long, allow_hyphen_values = true)]
    width: Option<f64>,
    /// Step / split position.
    #[arg(long, allow_hyphen_values = true)]
    center: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    kappa0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    sign_nu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    kappa_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    kappa_im: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    nu_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    nu_im: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    xmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    xmax: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    dx: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tend: Option<f64>,
    /// Comma-separated snapshot times; empty means final time only.
    #[arg(long, allow_hyphen_values = true)]
    snapshots: Option<String>,
    /// rk4 | implicit
    #[arg(long, allow_hyphen_values = true)]
    scheme: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<f64>,
    /// Comma-separated rays ξ to record while marching.
    #[arg(long, allow_hyphen_values = true)]
    probe_xi: Option<String>,
    /// Also write binary checkpoints next to the CSV snapshots.
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    checkpoint: bool,
    /// Skip the domain-width validation.
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    no_domain_check: bool,
}

fn parse_list(s: &Option<String>) -> Result<Vec<f64>> {
    let Some(s) = s else {
        return Ok(Vec::new());
    };
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| MkdvError::Config(format!("bad number {p:?}: {e}")))
        })
        .collect()
}

fn fnum(x: f64) -> String {
    // Compact, reproducible file-name stamp (rounded to 1e-6).
    let r = (x * 1e6).round() / 1e6;
    format!("{r}").replace('.', "p").replace('-', "m")
}

fn simulate(a: SimulateArgs, out: &Path) -> Result<ExitCode> {
    let preset_name = a
        .preset
        .ok_or_else(|| MkdvError::Config("simulate needs --preset".into()))?;
    let cminus = a
        .cminus
        .ok_or_else(|| MkdvError::Config("simulate needs --cminus".into()))?;
    let cplus = a
        .cplus
        .ok_or_else(|| MkdvError::Config("simulate needs --cplus".into()))?;
    let tend = a
        .tend
        .ok_or_else(|| MkdvError::Config("simulate needs --tend".into()))?;
    let preset = match preset_name {
        PresetName::ExactStep => InitPreset::ExactStep {
            center: a.center.unwrap_or(0.0),
        },
        PresetName::SmoothStep => InitPreset::SmoothStep {
            width: a
                .width
                .ok_or_else(|| MkdvError::Config("smooth_step needs --width".into()))?,
            center: a.center.unwrap_or(0.0),
        },
        PresetName::SolitonLeftConstRight => InitPreset::SolitonLeftConstRight {
            kappa0: a
                .kappa0
                .ok_or_else(|| MkdvError::Config("needs --kappa0".into()))?,
            x0: a.x0.unwrap_or(0.0),
            sign_nu: a.sign_nu.unwrap_or(-1.0),
            center: a.center.unwrap_or(0.0),
        },
        PresetName::ConstLeftSolitonRight => InitPreset::ConstLeftSolitonRight {
            kappa0: a
                .kappa0
                .ok_or_else(|| MkdvError::Config("needs --kappa0".into()))?,
            nu: a.nu.ok_or_else(|| MkdvError::Config("needs --nu".into()))?,
        },
        PresetName::SolitonBackground => InitPreset::SolitonBackground {
            kappa0: a
                .kappa0
                .ok_or_else(|| MkdvError::Config("needs --kappa0".into()))?,
            x0: a.x0.unwrap_or(0.0),
            sign_nu: a.sign_nu.unwrap_or(-1.0),
        },
        PresetName::BreatherBackground => InitPreset::BreatherBackground {
            kappa_re: a
                .kappa_re
                .ok_or_else(|| MkdvError::Config("needs --kappa-re".into()))?,
            kappa_im: a
                .kappa_im
                .ok_or_else(|| MkdvError::Config("needs --kappa-im".into()))?,
            nu_re: a.nu_re.unwrap_or(1.0),
            nu_im: a.nu_im.unwrap_or(0.0),
        },
    };
    let dx = a.dx.unwrap_or(0.05);
    // Default domain: wide enough for tend with a safety margin.
    let v_lead = 4.0 * cminus * cminus + 2.0 * cplus * cplus;
    let v_trail = -6.0 * cminus * cminus;
    let (xmin, xmax) = (
        a.xmin
            .unwrap_or(((v_trail * tend - 20.0) * 1.25).min(-40.0)),
        a.xmax.unwrap_or(((v_lead * tend + 20.0) * 1.25).max(40.0)),
    );
    let field = pde::init_field(&preset, cminus, cplus, xmin, xmax, dx)?;
    let scheme = match a.scheme.as_deref() {
        Some("rk4") => Scheme::Rk4 { dt: a.dt },
        Some("implicit") | None => Scheme::Sbdf2 { dt: a.dt },
        Some(other) => {
            return Err(MkdvError::Config(format!(
                "unknown scheme {other:?} (rk4 | implicit)"
            )));
        }
    };
    let mut snapshots = parse_list(&a.snapshots)?;
    if snapshots.is_empty() {
        snapshots.push(tend);
    }
    let probes = parse_list(&a.probe_xi)?;
    let result = pde::run(field, tend, scheme, &snapshots, &probes, !a.no_domain_check)?;

    let meta = echo_header(&a, "simulate");
    for snap in &result.snapshots {
        let mut buf = Vec::new();
        pde::write_snapshot_csv(snap, &meta, &mut buf)?;
        let path = write_file(out, &format!("snapshot_t{}.csv", fnum(snap.t)), &buf)?;
        println!("wrote {}", path.display());
        if a.checkpoint {
            let mut bin = Vec::new();
            pde::write_checkpoint(snap, &mut bin)?;
            write_file(out, &format!("snapshot_t{}.ckpt", fnum(snap.t)), &bin)?;
        }
    }
    let mut buf = Vec::new();
    for line in &meta {
        writeln!(buf, "# {line}").unwrap();
    }
    writeln!(buf, "t,h0,h1,max_abs_q,sponge_dev").unwrap();
    for d in &result.diagnostics {
        writeln!(
            buf,
            "{},{},{},{},{}",
            d.t, d.h0, d.h1, d.max_abs_q, d.sponge_dev
        )
        .unwrap();
    }
    let path = write_file(out, "diagnostics.csv", &buf)?;
    println!("wrote {}", path.display());
    for p in &result.probes {
        let mut buf = Vec::new();
        for line in &meta {
            writeln!(buf, "# {line}").unwrap();
        }
        writeln!(buf, "# xi={}", p.xi).unwrap();
        writeln!(buf, "t,q").unwrap();
        for (t, q) in p.t.iter().zip(&p.q) {
            writeln!(buf, "{t},{q}").unwrap();
        }
        let path = write_file(out, &format!("probe_xi{}.csv", fnum(p.xi)), &buf)?;
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// shared spectral-data resolution
// ---------------------------------------------------------------------------

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
pub struct DataArgs {
    /// Spectral-data JSON file (overrides the preset flags).
    #[arg(long, allow_hyphen_values = true)]
    data: Option<std::path::PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    cminus: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    cplus: Option<f64>,
    /// soliton-step preset parameters (c₊ = 0 implied).
    #[arg(long, allow_hyphen_values = true)]
    kappa0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<f64>,
}

impl DataArgs {
    fn resolve(&self) -> Result<SpectralData> {
        if let Some(path) = &self.data {
            let text = fs::read_to_string(path)
                .map_err(|e| MkdvError::Config(format!("cannot read {path:?}: {e}")))?;
            let v: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| MkdvError::Config(format!("bad JSON: {e}")))?;
            return SpectralData::from_json(&v);
        }
        let cm = self
            .cminus
            .ok_or_else(|| MkdvError::Config("need --cminus (or --data)".into()))?;
        if let Some(k0) = self.kappa0 {
            return scattering::solitonstep_scattering(
                cm,
                k0,
                self.nu
                    .ok_or_else(|| MkdvError::Config("soliton-step preset needs --nu".into()))?,
            );
        }
        let cp = self
            .cplus
            .ok_or_else(|| MkdvError::Config("need --cplus".into()))?;
        scattering::step_scattering(cm, cp)
    }
}

// ---------------------------------------------------------------------------
// asymptote
// ---------------------------------------------------------------------------

#[derive(Args, Serialize, Deserialize, Debug)]
pub struct AsymptoteArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    xmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    xmax: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    nx: Option<usize>,
    /// Add the left-region radiation column.
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    subleading: bool,
    /// Also write the per-eigenvalue phase-shift table.
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    phase_report: bool,
}

fn asymptote(a: AsymptoteArgs, out: &Path) -> Result<ExitCode> {
    let data = a.data.resolve()?;
    let t =
        a.t.ok_or_else(|| MkdvError::Config("asymptote needs --t".into()))?;
    if t <= 0.0 {
        return Err(MkdvError::Config("asymptote needs t > 0".into()));
    }
    let (trail, lead) = whitham::dsw_cone(data.c_plus(), data.c_minus())?;
    let xmin = a.xmin.unwrap_or((trail - 1.0) * t);
    let xmax = a.xmax.unwrap_or((lead + 1.0) * t);
    let nx = a.nx.unwrap_or(800).max(2);
    let xs: Vec<f64> = (0..nx)
        .map(|i| xmin + (xmax - xmin) * i as f64 / (nx - 1) as f64)
        .collect();
    let want_sub = a.subleading;
    let rows = map_grid(&xs, |&x| {
        let lead_val = asymptotics::q_asymptotic(x, t, &data, None);
        let sub = if want_sub {
            asymptotics::q_subleading(x, t, &data, None).ok()
        } else {
            None
        };
        (x, lead_val, sub)
    });
    let mut buf = Vec::new();
    for line in echo_header(&a, "asymptote") {
        writeln!(buf, "# {line}").unwrap();
    }
    writeln!(buf, "x,t,region,q_leading,q_subleading,q_total").unwrap();
    for (x, v, sub) in rows {
        let v = v?;
        let s = sub.unwrap_or(0.0);
        writeln!(
            buf,
            "{},{},{},{},{},{}",
            x,
            t,
            v.region.kind.as_str(),
            v.q,
            s,
            v.q + s
        )
        .unwrap();
    }
    let path = write_file(out, &format!("asymptote_t{}.csv", fnum(t)), &buf)?;
    println!("wrote {}", path.display());

    if a.phase_report {
        let report = asymptotics::phase_shift_report(&data)?;
        let mut buf = Vec::new();
        for line in echo_header(&a, "asymptote") {
            writeln!(buf, "# {line}").unwrap();
        }
        writeln!(
            buf,
            "j,kappa_re,kappa_im,ray,background,speed,x_j,nu_hat_re,nu_hat_im"
        )
        .unwrap();
        for r in report {
            writeln!(
                buf,
                "{},{},{},{:?},{},{},{},{},{}",
                r.index,
                r.kappa.re,
                r.kappa.im,
                r.ray,
                r.background,
                r.speed,
                r.x_j.map_or(String::new(), |v| v.to_string()),
                r.nu_hat.map_or(String::new(), |v| v.re.to_string()),
                r.nu_hat.map_or(String::new(), |v| v.im.to_string()),
            )
            .unwrap();
        }
        let path = write_file(out, "phase_report.csv", &buf)?;
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

#[derive(Args, Serialize, Deserialize, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Snapshot CSV produced by `simulate`.
    #[arg(long, allow_hyphen_values = true)]
    snapshot: Option<std::path::PathBuf>,
    /// Comparison window, defaults to the open wave cone shrunk by 0.3·t.
    #[arg(long, allow_hyphen_values = true)]
    window_lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    window_hi: Option<f64>,
    /// Threshold on the sup error (exit 4 when exceeded).
    #[arg(long, allow_hyphen_values = true)]
    max_sup: Option<f64>,
    /// Threshold on the L² error (exit 4 when exceeded).
    #[arg(long, allow_hyphen_values = true)]
    max_l2: Option<f64>,
}

fn compare(a: CompareArgs, out: &Path) -> Result<ExitCode> {
    let data = a.data.resolve()?;
    let path = a
        .snapshot
        .clone()
        .ok_or_else(|| MkdvError::Config("compare needs --snapshot".into()))?;
    let text = fs::File::open(&path)
        .map_err(|e| MkdvError::Config(format!("cannot open {path:?}: {e}")))?;
    let snap =
        pde::read_snapshot_csv(std::io::BufReader::new(text), data.c_minus(), data.c_plus())?;
    if snap.t <= 0.0 {
        return Err(MkdvError::Config("snapshot must have t > 0".into()));
    }
    let (trail, lead) = whitham::dsw_cone(data.c_plus(), data.c_minus())?;
    let lo = a.window_lo.unwrap_or((trail + 0.3) * snap.t);
    let hi = a.window_hi.unwrap_or((lead - 0.3) * snap.t);
    if lo < snap.x0 || hi > snap.x_max() || lo >= hi {
        return Err(MkdvError::Config(format!(
            "window [{lo}, {hi}] outside the snapshot domain [{}, {}]",
            snap.x0,
            snap.x_max()
        )));
    }
    let idx: Vec<usize> = (0..snap.n())
        .filter(|&i| {
            let x = snap.x(i);
            x >= lo && x <= hi
        })
        .collect();
    let t = snap.t;
    let per_point = map_grid(&idx, |&i| {
        let x = snap.x(i);
        asymptotics::q_asymptotic(x, t, &data, None).map(|v| (v.region.kind, snap.q[i] - v.q))
    });
    let mut sup: f64 = 0.0;
    let mut l2 = 0.0;
    let mut count = 0usize;
    let mut per_region: std::collections::BTreeMap<&'static str, (f64, f64, usize)> =
        Default::default();
    for r in per_point {
        let (kind, err) = r?;
        sup = sup.max(err.abs());
        l2 += err * err;
        count += 1;
        let e = per_region.entry(kind.as_str()).or_insert((0.0, 0.0, 0));
        e.0 = e.0.max(err.abs());
        e.1 += err * err;
        e.2 += 1;
    }
    let l2 = (l2 * snap.dx).sqrt();
    let region_json: serde_json::Value = per_region
        .iter()
        .map(|(k, (s, ss, n))| {
            (
                k.to_string(),
                json!({"sup_error": s, "l2_error": (ss * snap.dx).sqrt(), "points": n}),
            )
        })
        .collect::<serde_json::Map<_, _>>()
        .into();
    let metrics = json!({
        "snapshot": path.display().to_string(),
        "t": snap.t,
        "window": [lo, hi],
        "points": count,
        "sup_error": sup,
        "l2_error": l2,
        "per_region": region_json,
        "thresholds": {"max_sup": a.max_sup, "max_l2": a.max_l2},
    });
    let pretty = serde_json::to_string_pretty(&metrics).unwrap();
    println!("{pretty}");
    write_file(out, "compare.json", pretty.as_bytes())?;
    let sup_ok = a.max_sup.is_none_or(|m| sup <= m);
    let l2_ok = a.max_l2.is_none_or(|m| l2 <= m);
    Ok(if sup_ok && l2_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(4)
    })
}

// ---------------------------------------------------------------------------
// whitham
// ---------------------------------------------------------------------------

#[derive(Args, Serialize, Deserialize, Debug)]
pub struct WhithamArgs {
    #[arg(long, allow_hyphen_values = true)]
    cminus: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    cplus: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    zmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    zmax: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    n: Option<usize>,
}

fn whitham_cmd(a: WhithamArgs, out: &Path) -> Result<ExitCode> {
    let cm = a
        .cminus
        .ok_or_else(|| MkdvError::Config("whitham needs --cminus".into()))?;
    let cp = a
        .cplus
        .ok_or_else(|| MkdvError::Config("whitham needs --cplus".into()))?;
    let zmin = a.zmin.unwrap_or(-6.0 * cm * cm - 0.5);
    let zmax = a.zmax.unwrap_or(4.0 * cm * cm + 2.0 * cp * cp + 0.5);
    let n = a.n.unwrap_or(400).max(2);
    let zs: Vec<f64> = (0..n)
        .map(|i| zmin + (zmax - zmin) * i as f64 / (n - 1) as f64)
        .collect();
    let rows = whitham::whitham_selfsimilar(&zs, cp, cm)?;
    // The modulated-wave phase columns exist only for c₊ > 0 inside the
    // open cone; elsewhere they are reported as nan.
    let phase = if cp > 0.0 {
        let data = scattering::step_scattering(cm, cp)?;
        let (trail, lead) = whitham::dsw_cone(cp, cm)?;
        map_grid(&zs, |&z| {
            if z > trail + 1e-9 && z < lead - 1e-9 {
                whitham::dsw_state(z / 12.0, &data).ok()
            } else {
                None
            }
        })
    } else {
        zs.iter().map(|_| None).collect()
    };
    let mut buf = Vec::new();
    for line in echo_header(&a, "whitham") {
        writeln!(buf, "# {line}").unwrap();
    }
    writeln!(buf, "z,beta1,beta2,beta3,m,d,B,Delta,x0").unwrap();
    for (row, st) in rows.iter().zip(phase) {
        let msq = (row.beta2 * row.beta2 - row.beta1 * row.beta1)
            / (row.beta3 * row.beta3 - row.beta1 * row.beta1);
        let (b, delta, x0) =
            st.map(|s| (s.b_phase, s.delta, s.x0))
                .unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        writeln!(
            buf,
            "{},{},{},{},{},{},{},{},{}",
            row.z,
            row.beta1,
            row.beta2,
            row.beta3,
            msq.max(0.0).sqrt(),
            row.beta2,
            b,
            delta,
            x0
        )
        .unwrap();
    }
    let path = write_file(out, "whitham.csv", &buf)?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// scattering
// ---------------------------------------------------------------------------

#[derive(Args, Serialize, Deserialize, Debug)]
pub struct ScatteringArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Optional eigenvalues riding on the exact step, as
    /// `re+imj` quadruples `kre,kim,nre,nim;...`.
    #[arg(long, allow_hyphen_values = true)]
    eigens: Option<String>,
    /// Sample a(k), r(k) on this real grid: `kmin,kmax,n`.
    #[arg(long, allow_hyphen_values = true)]
    eval_grid: Option<String>,
}

fn scattering_cmd(a: ScatteringArgs, out: &Path) -> Result<ExitCode> {
    let mut data = a.data.resolve()?;
    if let Some(spec) = &a.eigens {
        let mut eigens = Vec::new();
        for quad in spec.split(';').filter(|s| !s.trim().is_empty()) {
            let vals: Vec<f64> = quad
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse()
                        .map_err(|e| MkdvError::Config(format!("bad eigen value {v:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            if vals.len() != 4 {
                return Err(MkdvError::Config("each eigen needs kre,kim,nre,nim".into()));
            }
            eigens.push(DiscreteEigen::new(
                Complex64::new(vals[0], vals[1]),
                Complex64::new(vals[2], vals[3]),
            )?);
        }
        data = scattering::step_scattering_with_eigens(data.c_minus(), data.c_plus(), eigens)?;
    }
    let j = data.to_json();
    let pretty = serde_json::to_string_pretty(&j).unwrap();
    let path = write_file(out, "scattering.json", pretty.as_bytes())?;
    println!("wrote {}", path.display());

    if let Some(grid) = &a.eval_grid {
        let parts: Vec<f64> = grid
            .split(',')
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|e| MkdvError::Config(format!("bad grid value: {e}")))
            })
            .collect::<Result<_>>()?;
        if parts.len() != 3 {
            return Err(MkdvError::Config("--eval-grid needs kmin,kmax,n".into()));
        }
        let n = parts[2] as usize;
        let mut buf = Vec::new();
        for line in echo_header(&a, "scattering") {
            writeln!(buf, "# {line}").unwrap();
        }
        writeln!(buf, "k,a_re,a_im,r_re,r_im,unitarity_residual").unwrap();
        for i in 0..n {
            let k = parts[0] + (parts[1] - parts[0]) * i as f64 / (n - 1).max(1) as f64;
            if k.abs() < 1e-12 {
                continue;
            }
            let kc = Complex64::new(k, 0.0);
            let av = data.a(kc)?;
            let rv = data.r(kc)?;
            let b = data.b(kc)?;
            let uni = (av.norm_sqr() + b.norm_sqr() - 1.0).abs();
            writeln!(buf, "{k},{},{},{},{},{uni}", av.re, av.im, rv.re, rv.im).unwrap();
        }
        let path = write_file(out, "scattering_grid.csv", &buf)?;
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// profiles
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, ValueEnum, Serialize, Deserialize, Debug)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ProfileName {
    Soliton,
    Breather,
    Per,
    PerTheta,
    Hel,
}

#[derive(Args, Serialize, Deserialize, Debug)]
pub struct ProfilesArgs {
    #[arg(long, value_enum)]
    profile: Option<ProfileName>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    kappa0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    sign_nu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    kappa_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    kappa_im: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    nu_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    nu_im: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta3: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    ctilde: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    dtilde: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    cplus: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    cminus: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    xmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    xmax: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    nx: Option<usize>,
}

fn profiles_cmd(a: ProfilesArgs, out: &Path) -> Result<ExitCode> {
    use mkdv_core::profiles as pf;
    let name = a
        .profile
        .ok_or_else(|| MkdvError::Config("profiles needs --profile".into()))?;
    let t = a.t.unwrap_or(0.0);
    let (xmin, xmax) = (a.xmin.unwrap_or(-20.0), a.xmax.unwrap_or(20.0));
    let nx = a.nx.unwrap_or(1001).max(2);
    let need = |v: Option<f64>, n: &str| -> Result<f64> {
        v.ok_or_else(|| MkdvError::Config(format!("profile needs --{n}")))
    };
    let eval: Box<dyn Fn(f64) -> Result<f64> + Sync> = match name {
        ProfileName::Soliton => {
            let (c, k0) = (need(a.c, "c")?, need(a.kappa0, "kappa0")?);
            let (x0, sg) = (a.x0.unwrap_or(0.0), a.sign_nu.unwrap_or(-1.0));
            Box::new(move |x| pf::q_soliton(x, t, c, k0, x0, sg))
        }
        ProfileName::Breather => {
            let p = pf::BreatherParams::new(
                need(a.c, "c")?,
                Complex64::new(need(a.kappa_re, "kappa-re")?, need(a.kappa_im, "kappa-im")?),
                Complex64::new(a.nu_re.unwrap_or(1.0), a.nu_im.unwrap_or(0.0)),
            )?;
            Box::new(move |x| Ok(pf::q_breather(x, t, &p)))
        }
        ProfileName::Per => {
            let w = pf::WaveParams::new(
                need(a.beta1, "beta1")?,
                need(a.beta2, "beta2")?,
                need(a.beta3, "beta3")?,
                a.x0.unwrap_or(0.0),
            )?;
            Box::new(move |x| pf::q_per(x, t, &w))
        }
        ProfileName::PerTheta => {
            let (ct, dt_, de) = (
                need(a.ctilde, "ctilde")?,
                need(a.dtilde, "dtilde")?,
                a.delta.unwrap_or(0.0),
            );
            Box::new(move |x| pf::q_per_theta(x, t, ct, dt_, de))
        }
        ProfileName::Hel => {
            let (cp, d, cm, de) = (
                need(a.cplus, "cplus")?,
                need(a.d, "d")?,
                need(a.cminus, "cminus")?,
                a.delta.unwrap_or(0.0),
            );
            Box::new(move |x| pf::q_hel(x, t, cp, d, cm, de))
        }
    };
    let xs: Vec<f64> = (0..nx)
        .map(|i| xmin + (xmax - xmin) * i as f64 / (nx - 1) as f64)
        .collect();
    let qs = map_grid(&xs, |&x| eval(x));
    let mut buf = Vec::new();
    for line in echo_header(&a, "profiles") {
        writeln!(buf, "# {line}").unwrap();
    }
    writeln!(buf, "x,q").unwrap();
    for (x, q) in xs.iter().zip(qs) {
        writeln!(buf, "{x},{}", q?).unwrap();
    }
    let path = write_file(out, "profile.csv", &buf)?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}
