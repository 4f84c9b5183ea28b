//! Experiment harness: flat key-value configs, result CSVs, step-size sweeps,
//! cost ranking and acceptance tuning.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hmc::{measure_dh_distribution, thermalize, HmcConfig, Thermalized, CHAIN_STREAM};
use crate::integrators::{n_steps_for, MicroSteps, Scheme};
use crate::lattice::io::{load_gauge, save_gauge, GaugeFileHeader};
use crate::lattice::{GaugeField, RngStream};

pub const CSV_HEADER: [&str; 9] = [
    "scheme",
    "h",
    "M",
    "mean_abs_dH",
    "stderr_dH",
    "inv_per_step",
    "inv_per_traj",
    "wall_s",
    "acceptance",
];

/// Everything a command needs: the HMC parameters plus the sweep plan.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub hmc: HmcConfig,
    pub schemes: Vec<Scheme>,
    /// Strictly increasing step sizes.
    pub h_grid: Vec<f64>,
    pub gauge_file: PathBuf,
    pub target_acceptance: f64,
    /// `|ΔH|` levels at which bench-cost ranks the schemes.
    pub accuracy_targets: Vec<f64>,
    pub tune_h_min: f64,
    pub tune_h_max: f64,
}

impl ExperimentConfig {
    /// 8×8 lattice with 50 samples per cell.
    pub fn desk() -> Self {
        Self {
            hmc: HmcConfig::desk(),
            schemes: Scheme::ALL.to_vec(),
            h_grid: vec![0.005, 0.0075, 0.01, 0.0125],
            gauge_file: PathBuf::from("gauge-8x8.bin"),
            target_acceptance: 0.9,
            accuracy_targets: vec![1e-4, 1e-5, 1e-6],
            tune_h_min: 0.005,
            tune_h_max: 0.2,
        }
    }

    /// 32×32 lattice with 200 samples per cell.
    pub fn paper() -> Self {
        Self {
            hmc: HmcConfig::paper(),
            h_grid: vec![0.02, 0.03, 0.04, 0.05, 0.0625],
            gauge_file: PathBuf::from("gauge-32x32.bin"),
            accuracy_targets: vec![1e-2, 1e-3, 1e-4],
            ..Self::desk()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.hmc.geom()?;
        if self.schemes.is_empty() {
            return Err(Error::InvalidIntegrator("empty scheme list".into()));
        }
        if self.h_grid.is_empty() || self.h_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidIntegrator("h_grid must be non-empty and strictly increasing".into()));
        }
        if self.h_grid[0] <= 0.0 {
            return Err(Error::InvalidIntegrator("h_grid must be positive".into()));
        }
        if !(self.tune_h_min > 0.0 && self.tune_h_min < self.tune_h_max) {
            return Err(Error::InvalidIntegrator("need 0 < tune_h_min < tune_h_max".into()));
        }
        Ok(())
    }

    /// Flat `key = value` text covering every field.
    pub fn to_text(&self) -> String {
        let c = &self.hmc;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
        kv("l", c.l.to_string());
        kv("t", c.t.to_string());
        kv("beta", format!("{:?}", c.beta));
        kv("m0", format!("{:?}", c.m0));
        kv("tau", format!("{:?}", c.tau));
        kv("h", format!("{:?}", c.h));
        kv("scheme", c.scheme.to_string());
        match c.micro {
            MicroSteps::PerCall(m) => kv("micro_per_call", m.to_string()),
            MicroSteps::Ratio(r) => kv("micro_ratio", format!("{r:?}")),
            MicroSteps::Scaled(x) => kv("micro_scaled", format!("{x:?}")),
        }
        kv("cg_tol", format!("{:?}", c.cg_tol));
        kv("seed", c.seed.to_string());
        kv("n_thermalize", c.n_thermalize.to_string());
        kv("n_samples", c.n_samples.to_string());
        kv("fermions", c.fermions.to_string());
        kv("schemes", self.schemes.iter().map(|s| s.name()).collect::<Vec<_>>().join(","));
        kv("h_grid", join_f64(&self.h_grid));
        kv("gauge_file", self.gauge_file.display().to_string());
        kv("target_acceptance", format!("{:?}", self.target_acceptance));
        kv("accuracy_targets", join_f64(&self.accuracy_targets));
        kv("tune_h_min", format!("{:?}", self.tune_h_min));
        kv("tune_h_max", format!("{:?}", self.tune_h_max));
        s
    }

    /// Parse `text` on top of `base`. Unknown keys are errors; keys that are absent keep
    /// their value from `base` and are logged.
    pub fn parse(text: &str, path: &Path, base: &ExperimentConfig) -> Result<Self> {
        let mut cfg = base.clone();
        let mut seen = BTreeSet::new();
        let mut micro_keys = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: path.display().to_string(),
                line: line_no,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            let num = |v: &str| -> Result<f64> {
                v.parse::<f64>()
                    .map_err(|_| err(format!("key `{key}`: `{v}` is not a number")))
            };
            let int = |v: &str| -> Result<u64> {
                v.parse::<u64>()
                    .map_err(|_| err(format!("key `{key}`: `{v}` is not a non-negative integer")))
            };
            let list = |v: &str| -> Result<Vec<f64>> {
                v.split(',').filter(|x| !x.trim().is_empty()).map(|x| num(x.trim())).collect()
            };
            let h = &mut cfg.hmc;
            match key {
                "l" => h.l = int(value)? as usize,
                "t" => h.t = int(value)? as usize,
                "beta" => h.beta = num(value)?,
                "m0" => h.m0 = num(value)?,
                "tau" => h.tau = num(value)?,
                "h" => h.h = num(value)?,
                "scheme" => h.scheme = value.parse().map_err(|e: Error| err(e.to_string()))?,
                "micro_per_call" => {
                    micro_keys += 1;
                    h.micro = MicroSteps::PerCall(int(value)? as usize);
                }
                "micro_ratio" => {
                    micro_keys += 1;
                    h.micro = MicroSteps::Ratio(num(value)?);
                }
                "micro_scaled" => {
                    micro_keys += 1;
                    h.micro = MicroSteps::Scaled(num(value)?);
                }
                "cg_tol" => h.cg_tol = num(value)?,
                "seed" => h.seed = int(value)?,
                "n_thermalize" => h.n_thermalize = int(value)? as usize,
                "n_samples" => h.n_samples = int(value)? as usize,
                "fermions" => {
                    h.fermions = value
                        .parse()
                        .map_err(|_| err(format!("key `{key}`: `{value}` is not true/false")))?
                }
                "schemes" => {
                    cfg.schemes = value
                        .split(',')
                        .map(|s| s.trim().parse::<Scheme>().map_err(|e| err(e.to_string())))
                        .collect::<Result<_>>()?
                }
                "h_grid" => cfg.h_grid = list(value)?,
                "gauge_file" => cfg.gauge_file = PathBuf::from(value),
                "target_acceptance" => cfg.target_acceptance = num(value)?,
                "accuracy_targets" => cfg.accuracy_targets = list(value)?,
                "tune_h_min" => cfg.tune_h_min = num(value)?,
                "tune_h_max" => cfg.tune_h_max = num(value)?,
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
            if micro_keys > 1 {
                return Err(err("give only one of micro_per_call, micro_ratio, micro_scaled".into()));
            }
        }
        for key in CONFIG_KEYS {
            if !seen.contains(*key) {
                info!("{}: `{key}` not set, using default", path.display());
            }
        }
        if micro_keys == 0 {
            info!("{}: micro-step count not set, using default {:?}", path.display(), base.hmc.micro);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, base: &ExperimentConfig) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text, path, base)
    }

    /// SHA-256 of the printed config.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    pub fn gauge_header(&self) -> GaugeFileHeader {
        GaugeFileHeader {
            l: self.hmc.l,
            t: self.hmc.t,
            beta: self.hmc.beta,
            m0: self.hmc.m0,
            seed: self.hmc.seed,
        }
    }
}

const CONFIG_KEYS: &[&str] = &[
    "l",
    "t",
    "beta",
    "m0",
    "tau",
    "h",
    "scheme",
    "cg_tol",
    "seed",
    "n_thermalize",
    "n_samples",
    "fermions",
    "schemes",
    "h_grid",
    "gauge_file",
    "target_acceptance",
    "accuracy_targets",
    "tune_h_min",
    "tune_h_max",
];

fn join_f64(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

/// One line of a result CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub scheme: Scheme,
    pub h: f64,
    /// Micro steps per inner call; `0` for non-nested schemes.
    pub m: usize,
    pub mean_abs_dh: f64,
    pub stderr_dh: f64,
    pub inv_per_step: u64,
    pub inv_per_traj: u64,
    pub wall_s: f64,
    pub acceptance: f64,
}

impl ResultRow {
    fn fields(&self) -> [String; 9] {
        [
            self.scheme.to_string(),
            format!("{:?}", self.h),
            self.m.to_string(),
            format!("{:e}", self.mean_abs_dh),
            format!("{:e}", self.stderr_dh),
            self.inv_per_step.to_string(),
            self.inv_per_traj.to_string(),
            format!("{:.6}", self.wall_s),
            format!("{:.6}", self.acceptance),
        ]
    }

    pub fn is_failed(&self) -> bool {
        self.mean_abs_dh.is_nan()
    }
}

/// Result rows plus `#`-prefixed footer lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
    pub footer: Vec<String>,
}

impl ResultTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r.fields()).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        let mut s = String::from_utf8(bytes).expect("ASCII output");
        for f in &self.footer {
            writeln!(s, "# {f}").unwrap();
        }
        Ok(s)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()?)?;
        Ok(())
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let perr = |line: usize, message: String| Error::Parse {
            path: path.display().to_string(),
            line,
            message,
        };
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let header = rdr.headers().map_err(|e| perr(1, e.to_string()))?.clone();
        if header.iter().ne(CSV_HEADER.iter().copied()) {
            return Err(perr(1, format!("header must be `{}`", CSV_HEADER.join(","))));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| perr(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            if rec.len() != CSV_HEADER.len() {
                return Err(perr(line, format!("expected 9 columns, found {}", rec.len())));
            }
            let f = |i: usize| -> Result<f64> {
                rec[i]
                    .parse::<f64>()
                    .map_err(|_| perr(line, format!("column `{}`: `{}` is not a number", CSV_HEADER[i], &rec[i])))
            };
            let u = |i: usize| -> Result<u64> {
                rec[i]
                    .parse::<u64>()
                    .map_err(|_| perr(line, format!("column `{}`: `{}` is not an integer", CSV_HEADER[i], &rec[i])))
            };
            rows.push(ResultRow {
                scheme: rec[0].parse().map_err(|e: Error| perr(line, e.to_string()))?,
                h: f(1)?,
                m: u(2)? as usize,
                mean_abs_dh: f(3)?,
                stderr_dh: f(4)?,
                inv_per_step: u(5)?,
                inv_per_traj: u(6)?,
                wall_s: f(7)?,
                acceptance: f(8)?,
            });
        }
        let footer = text
            .lines()
            .filter_map(|l| l.strip_prefix('#'))
            .map(|l| l.trim().to_string())
            .collect();
        Ok(Self { rows, footer })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?, path)
    }

    pub fn rows_for(&self, scheme: Scheme) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(move |r| r.scheme == scheme)
    }

    /// Least-squares slope of `log mean|ΔH|` against `log h` for one scheme.
    pub fn slope(&self, scheme: Scheme) -> Option<f64> {
        let (h, y): (Vec<f64>, Vec<f64>) = self.rows_for(scheme).map(|r| (r.h, r.mean_abs_dh)).unzip();
        fit_loglog(&h, &y).map(|f| f.0)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Least-squares fit `log y = a + b log x` over the points with finite positive `x, y`.
/// Returns `(b, a)`.
pub fn fit_loglog(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| a.is_finite() && b.is_finite() && **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    Some((b, my - b * mx))
}

/// Spearman rank correlation; ties get their average rank.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let rank = |v: &[f64]| -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0;
            for k in i..=j {
                r[idx[k]] = avg;
            }
            i = j + 1;
        }
        r
    };
    let (rx, ry) = (rank(x), rank(y));
    let n = x.len() as f64;
    let m = (n - 1.0) / 2.0;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - m) * (b - m)).sum();
    let vx: f64 = rx.iter().map(|a| (a - m).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - m).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    Some(cov / (vx * vy).sqrt())
}

/// Sidecar written next to a thermalized gauge file.
pub fn sidecar_path(gauge_file: &Path) -> PathBuf {
    let mut s = gauge_file.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// Thermalize from a cold start, write the gauge file and its provenance sidecar.
pub fn cmd_thermalize(cfg: &ExperimentConfig) -> Result<Thermalized> {
    cfg.validate()?;
    let mut rng = RngStream::new(cfg.hmc.seed, CHAIN_STREAM);
    let th = thermalize(&cfg.hmc, &mut rng)?;
    save_gauge(&cfg.gauge_file, &cfg.gauge_header(), &th.u)?;
    let mut meta = String::new();
    writeln!(meta, "config_sha256 = {}", cfg.hash()).unwrap();
    writeln!(meta, "seed = {}", cfg.hmc.seed).unwrap();
    writeln!(meta, "n_thermalize = {}", cfg.hmc.n_thermalize).unwrap();
    writeln!(meta, "acceptance = {:?}", th.acceptance).unwrap();
    writeln!(meta, "final_h = {:?}", th.step_sizes.last().copied().unwrap_or(f64::NAN)).unwrap();
    writeln!(meta, "plaquette = {}", join_f64(&th.plaquettes)).unwrap();
    fs::write(sidecar_path(&cfg.gauge_file), meta)?;
    info!("wrote {}", cfg.gauge_file.display());
    Ok(th)
}

/// Load the thermalized start configuration and check it matches the config.
pub fn load_start(cfg: &ExperimentConfig) -> Result<GaugeField> {
    let path = &cfg.gauge_file;
    if !path.exists() {
        return Err(Error::GaugeFile {
            path: path.clone(),
            message: "missing; run `schwinger thermalize` first".into(),
        });
    }
    let (header, u) = load_gauge(path)?;
    if header.l != cfg.hmc.l || header.t != cfg.hmc.t {
        return Err(Error::GaugeFile {
            path: path.clone(),
            message: format!("lattice {}x{} does not match config {}x{}", header.l, header.t, cfg.hmc.l, cfg.hmc.t),
        });
    }
    if header.beta != cfg.hmc.beta || header.m0 != cfg.hmc.m0 {
        warn!(
            "{}: thermalized at beta={} m0={}, config has beta={} m0={}",
            path.display(),
            header.beta,
            header.m0,
            cfg.hmc.beta,
            cfg.hmc.m0
        );
    }
    Ok(u)
}

/// Measure one `(scheme, h)` cell. Solver failures give a NaN row and a footer note.
pub fn measure_cell(u0: &GaugeField, cfg: &ExperimentConfig, scheme: Scheme, h: f64) -> (ResultRow, Option<String>) {
    let hmc = HmcConfig {
        scheme,
        h,
        ..cfg.hmc.clone()
    };
    let spec = hmc.integrator();
    let inv_per_step = scheme.inversions_per_step();
    let n_steps = n_steps_for(hmc.tau, h).unwrap_or(0) as u64;
    let mut row = ResultRow {
        scheme,
        h,
        m: spec.micro_per_call(),
        mean_abs_dh: f64::NAN,
        stderr_dh: f64::NAN,
        inv_per_step,
        inv_per_traj: n_steps * inv_per_step,
        wall_s: f64::NAN,
        acceptance: f64::NAN,
    };
    match measure_dh_distribution(u0, &hmc, hmc.n_samples) {
        Ok(m) => {
            row.mean_abs_dh = m.mean_abs;
            row.stderr_dh = m.stderr_abs;
            row.wall_s = m.wall_s;
            row.acceptance = m.acceptance;
            debug_assert_eq!(m.inversions_per_trajectory, row.inv_per_traj);
            info!("{scheme} h={h}: |dH| = {:.3e} +- {:.1e}", m.mean_abs, m.stderr_abs);
            (row, None)
        }
        Err(e) => {
            warn!("{scheme} h={h} failed: {e}");
            (row, Some(format!("failed {scheme} h={h:?}: {e}")))
        }
    }
}

/// `|ΔH|` against `h` for every scheme on the plan grid, with fitted slopes.
pub fn cmd_sweep_dh(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let u0 = load_start(cfg)?;
    sweep_from(&u0, cfg)
}

pub fn sweep_from(u0: &GaugeField, cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = ResultTable::default();
    let mut failures = Vec::new();
    for &scheme in &cfg.schemes {
        for &h in &cfg.h_grid {
            let (row, fail) = measure_cell(u0, cfg, scheme, h);
            table.rows.push(row);
            failures.extend(fail);
        }
    }
    for &scheme in &cfg.schemes {
        match table.slope(scheme) {
            Some(s) => table.footer.push(format!("slope {scheme} {s:.4}")),
            None => table.footer.push(format!("slope {scheme} NaN")),
        }
    }
    table.footer.extend(failures);
    Ok(table)
}

/// Inversions per trajectory needed by `scheme` to reach `target` mean `|ΔH|`,
/// from a power-law fit of cost against accuracy.
pub fn cost_at_accuracy(table: &ResultTable, scheme: Scheme, target: f64) -> Option<f64> {
    let (acc, cost): (Vec<f64>, Vec<f64>) = table
        .rows_for(scheme)
        .filter(|r| !r.is_failed())
        .map(|r| (r.mean_abs_dh, r.inv_per_traj as f64))
        .unzip();
    let (b, a) = fit_loglog(&acc, &cost)?;
    Some((a + b * target.ln()).exp())
}

/// Cost against achieved accuracy; the footer ranks schemes at each accuracy target.
pub fn cmd_bench_cost(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let u0 = load_start(cfg)?;
    bench_from(&u0, cfg)
}

pub fn bench_from(u0: &GaugeField, cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = sweep_from(u0, cfg)?;
    table.footer.retain(|f| !f.starts_with("slope"));
    // Rows keyed by achieved accuracy within each scheme.
    table.rows.sort_by(|a, b| {
        cfg.schemes
            .iter()
            .position(|s| *s == a.scheme)
            .cmp(&cfg.schemes.iter().position(|s| *s == b.scheme))
            .then(a.mean_abs_dh.total_cmp(&b.mean_abs_dh))
    });
    for &target in &cfg.accuracy_targets {
        let mut costs: Vec<(Scheme, f64)> = cfg
            .schemes
            .iter()
            .filter_map(|&s| cost_at_accuracy(&table, s, target).map(|c| (s, c)))
            .collect();
        costs.sort_by(|a, b| a.1.total_cmp(&b.1));
        let ranking = costs
            .iter()
            .map(|(s, c)| format!("{s}:{c:.0}"))
            .collect::<Vec<_>>()
            .join(" ");
        table.footer.push(format!("rank dH={target:e} {ranking}"));
    }
    for &scheme in &cfg.schemes {
        let (w, c): (Vec<f64>, Vec<f64>) = table
            .rows_for(scheme)
            .filter(|r| !r.is_failed())
            .map(|r| (r.wall_s, r.inv_per_traj as f64))
            .unzip();
        if let Some(rho) = spearman(&w, &c) {
            table.footer.push(format!("spearman wall_s inv_per_traj {scheme} {rho:.3}"));
        }
    }
    Ok(table)
}

/// Per scheme, bisect `log h` until the measured acceptance is within `±0.02` of the target.
pub fn cmd_tune_acceptance(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let u0 = load_start(cfg)?;
    tune_from(&u0, cfg)
}

pub const TUNE_TOLERANCE: f64 = 0.02;
const TUNE_MAX_BISECTIONS: usize = 16;

pub fn tune_from(u0: &GaugeField, cfg: &ExperimentConfig) -> Result<ResultTable> {
    let target = cfg.target_acceptance;
    let mut table = ResultTable::default();
    for &scheme in &cfg.schemes {
        let mut lo = cfg.tune_h_min;
        let mut hi = cfg.tune_h_max;
        let (row_lo, f_lo) = measure_cell(u0, cfg, scheme, lo);
        let (row_hi, f_hi) = measure_cell(u0, cfg, scheme, hi);
        if let Some(f) = f_lo.or(f_hi) {
            table.footer.push(f);
        }
        let mut best = if (row_lo.acceptance - target).abs() <= (row_hi.acceptance - target).abs() {
            row_lo.clone()
        } else {
            row_hi.clone()
        };
        if !(row_lo.acceptance >= target - TUNE_TOLERANCE && row_hi.acceptance <= target + TUNE_TOLERANCE) {
            table.footer.push(format!(
                "not bracketed {scheme}: acceptance {:.3} at h={lo:?}, {:.3} at h={hi:?}",
                row_lo.acceptance, row_hi.acceptance
            ));
            table.rows.push(best);
            continue;
        }
        let mut found = (best.acceptance - target).abs() <= TUNE_TOLERANCE;
        for _ in 0..TUNE_MAX_BISECTIONS {
            if found {
                break;
            }
            let mid = (lo * hi).sqrt();
            let (row, fail) = measure_cell(u0, cfg, scheme, mid);
            if let Some(f) = fail {
                table.footer.push(f);
                hi = mid;
                continue;
            }
            if (row.acceptance - target).abs() < (best.acceptance - target).abs() {
                best = row.clone();
            }
            if (row.acceptance - target).abs() <= TUNE_TOLERANCE {
                found = true;
            } else if row.acceptance > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if !found {
            table.footer.push(format!("not converged {scheme}: closest acceptance {:.3}", best.acceptance));
        }
        table.rows.push(best);
    }
    Ok(table)
}
