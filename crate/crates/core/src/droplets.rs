//! Droplet theory for pure power-law wells `K(r) = r^p - d` (valid while
//! every pair distance stays below the well end `a`).
//!
//! A ball of mass `m` in dimension `n` has energy `g(m) = C m^{2+p/n} - d m²`.
//! Splitting mass over several far-apart balls can lower the total, and the
//! best splits consist of `k - 1` equal balls plus at most one smaller ball.
//! [`optimal_partition`] searches exactly that one-parameter family for
//! each `k`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitDisc};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::numeric::{bisect, scan_minimize, unit_ball_volume, GaussLegendre};

/// Energies closer than this are ties; the smaller droplet count wins.
pub const TIE_TOL: f64 = 1e-9;

const SCAN_SAMPLES: usize = 2000;

/// How to evaluate `C_{n,p}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CnpMethod {
    /// Exact, `p = 2` only.
    ClosedForm,
    MonteCarlo { samples: u64, seed: u64 },
    ProductQuadrature,
}

/// `C_{n,p} = |B_1|^{-(2+p/n)} ∫_{B_1}∫_{B_1} |x - y|^p dx dy`.
pub fn c_np(n: usize, p: f64, method: CnpMethod) -> Result<f64> {
    ensure!(n == 1 || n == 2, InvalidParameter, "dimension {n} unsupported (1 or 2)");
    ensure!(p > 0.0 && p.is_finite(), InvalidParameter, "exponent must be positive, got {p}");
    let vol = unit_ball_volume(n);
    let scale = vol.powf(-(2.0 + p / n as f64));
    match method {
        CnpMethod::ClosedForm => {
            ensure!(p == 2.0, InvalidParameter, "closed form needs p = 2, got {p}");
            // ∫∫|x-y|² = 2|B_1| ∫|x|²
            let second_moment = if n == 1 { 2.0 / 3.0 } else { std::f64::consts::PI / 2.0 };
            Ok(2.0 * vol * second_moment * scale)
        }
        CnpMethod::MonteCarlo { samples, seed } => {
            ensure!(samples > 0, InvalidParameter, "Monte Carlo needs at least one sample");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut acc = 0.0;
            if n == 1 {
                for _ in 0..samples {
                    let x: f64 = rng.random_range(-1.0..1.0);
                    let y: f64 = rng.random_range(-1.0..1.0);
                    acc += (x - y).abs().powf(p);
                }
            } else {
                for _ in 0..samples {
                    let [x0, x1]: [f64; 2] = UnitDisc.sample(&mut rng);
                    let [y0, y1]: [f64; 2] = UnitDisc.sample(&mut rng);
                    acc += ((x0 - y0).powi(2) + (x1 - y1).powi(2)).powf(p / 2.0);
                }
            }
            Ok(acc / samples as f64 * vol * vol * scale)
        }
        CnpMethod::ProductQuadrature => Ok(pair_moment_quadrature(n, p) * scale),
    }
}

/// `∫_{B_1}∫_{B_1} |x - y|^p` by Gauss–Legendre quadrature.
///
/// 1D: nested rule on the triangle `y < x` (the integrand is symmetric).
/// 2D: the pair-distance density of the unit disk, `2πr·A(r)` with `A` the
/// lens area of two unit disks at distance `r`, integrated in `r = 2 sin θ`
/// so the square-root edge at `r = 2` becomes smooth.
fn pair_moment_quadrature(n: usize, p: f64) -> f64 {
    let gl = GaussLegendre::new(64);
    if n == 1 {
        2.0 * gl.integrate(-1.0, 1.0, |x| gl.integrate(-1.0, x, |y| (x - y).powf(p)))
    } else {
        use std::f64::consts::PI;
        gl.integrate(0.0, PI / 2.0, |th| {
            let r = 2.0 * th.sin();
            let lens = PI - 2.0 * th - (2.0 * th).sin();
            2.0 * PI * r.powf(p + 1.0) * lens * 2.0 * th.cos()
        })
    }
}

/// `(n, p, d)` for `K(r) = r^p - d`, with an optional well end `a` used to
/// check that a ball stays inside the power-law region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct PowerLawParams {
    pub n: usize,
    pub p: f64,
    pub d: f64,
    pub well_end: Option<f64>,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    n: usize,
    p: f64,
    d: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    well_end: Option<f64>,
}

impl TryFrom<RawParams> for PowerLawParams {
    type Error = crate::Error;
    fn try_from(r: RawParams) -> Result<Self> {
        let mut p = PowerLawParams::new(r.n, r.p, r.d)?;
        if let Some(a) = r.well_end {
            p = p.with_well_end(a)?;
        }
        Ok(p)
    }
}

impl From<PowerLawParams> for RawParams {
    fn from(p: PowerLawParams) -> Self {
        RawParams { n: p.n, p: p.p, d: p.d, well_end: p.well_end }
    }
}

impl PowerLawParams {
    pub fn new(n: usize, p: f64, d: f64) -> Result<Self> {
        ensure!(n == 1 || n == 2, InvalidParameter, "dimension {n} unsupported (1 or 2)");
        ensure!(p.is_finite() && p > n as f64, InvalidParameter, "need p > n, got p = {p}, n = {n}");
        ensure!(d.is_finite() && d > 0.0, InvalidParameter, "depth must be positive, got {d}");
        let method = if p == 2.0 { CnpMethod::ClosedForm } else { CnpMethod::ProductQuadrature };
        let c = c_np(n, p, method)?;
        Ok(Self { n, p, d, well_end: None, c })
    }

    pub fn with_well_end(mut self, a: f64) -> Result<Self> {
        ensure!(a > 0.0, InvalidParameter, "well end must be positive, got {a}");
        self.well_end = Some(a);
        Ok(self)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `p / n`.
    pub fn q(&self) -> f64 {
        self.p / self.n as f64
    }

    /// Diameter of the ball of mass `m`.
    pub fn ball_diameter(&self, m: f64) -> f64 {
        2.0 * crate::densities::ball_radius(m, self.n)
    }

    /// `g(m)` without the well-end check.
    pub fn g(&self, m: f64) -> f64 {
        self.c * m.powf(2.0 + self.q()) - self.d * m * m
    }

    fn check_ball(&self, m: f64) -> Result<()> {
        if let Some(a) = self.well_end {
            let diam = self.ball_diameter(m);
            ensure!(
                diam <= a * (1.0 + 1e-12),
                InvalidParameter,
                "ball of mass {m} has diameter {diam} > well end {a}; the power-law formula does not apply"
            );
        }
        Ok(())
    }
}

/// `g(m) = C m^{2+p/n} - d m²`, the energy of one ball of mass `m`.
pub fn ball_energy_g(params: &PowerLawParams, m: f64) -> Result<f64> {
    ensure!(m >= 0.0 && m.is_finite(), InvalidParameter, "mass must be non-negative, got {m}");
    params.check_ball(m)?;
    Ok(params.g(m))
}

/// `f(t) = g(tm) + g((1-t)m)` and its first two derivatives in `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitValue {
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

pub fn split_function_f(params: &PowerLawParams, m: f64, t: f64) -> Result<SplitValue> {
    ensure!((0.0..=0.5).contains(&t), InvalidParameter, "t must lie in [0, 1/2], got {t}");
    ensure!(m > 0.0, InvalidParameter, "mass must be positive, got {m}");
    Ok(split_unchecked(params, m, t))
}

fn split_unchecked(params: &PowerLawParams, m: f64, t: f64) -> SplitValue {
    let q = params.q();
    let (c, d) = (params.c, params.d);
    let s = 1.0 - t;
    let mq = m.powf(q);
    SplitValue {
        f: params.g(t * m) + params.g(s * m),
        df: m * m * (c * (2.0 + q) * mq * (t.powf(1.0 + q) - s.powf(1.0 + q)) - 2.0 * d * (2.0 * t - 1.0)),
        d2f: m * m * (c * (2.0 + q) * (1.0 + q) * mq * (t.powf(q) + s.powf(q)) - 4.0 * d),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitThresholds {
    pub m0: f64,
    pub m1: f64,
    pub c_np: f64,
}

/// `m0`: below it one ball beats any two-ball split. `m1`: above it two equal
/// halves are the best two-ball split.
pub fn split_thresholds(params: &PowerLawParams) -> SplitThresholds {
    let q = params.q();
    let (c, d) = (params.c, params.d);
    let m0 = (2.0 * d / (c * (2.0 + q))).powf(1.0 / q);
    let m1 = (2f64.powf(1.0 + q) * d / (c * (2.0 + q) * (1.0 + q))).powf(1.0 / q);
    assert!(m0 < m1, "threshold ordering m0 < m1 failed: {m0} vs {m1}");
    SplitThresholds { m0, m1, c_np: c }
}

/// Minimizer `t*` of `f` on `[0, 1/2]` with `f(t*)`.
pub fn best_two_ball_split(params: &PowerLawParams, m: f64) -> Result<(f64, f64)> {
    ensure!(m > 0.0, InvalidParameter, "mass must be positive, got {m}");
    let th = split_thresholds(params);
    let at = |t: f64| (t, split_unchecked(params, m, t).f);
    if m <= th.m0 {
        return Ok(at(0.0));
    }
    if m >= th.m1 {
        return Ok(at(0.5));
    }
    // f' < 0 at 0, = 0 at 1/2 and concave: its only interior root is where it
    // turns positive. Walk towards 1/2 to find a positive bracket end.
    let df = |t: f64| split_unchecked(params, m, t).df;
    let mut hi = None;
    for k in 2..60 {
        let t = 0.5 - 0.5f64.powi(k);
        if df(t) > 0.0 {
            hi = Some(t);
            break;
        }
    }
    let Some(hi) = hi else { return Ok(at(0.5)) };
    let root = bisect(df, 0.0, hi, 1e-15).expect("sign change bracketed");
    Ok(at(root))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedMinimizer {
    pub m: f64,
    /// Equal masses first, the single smaller one (if any) last.
    pub masses: Vec<f64>,
    pub energies: Vec<f64>,
    pub total_energy: f64,
    pub k: usize,
    pub k_max: usize,
    pub warning: Option<String>,
}

/// Default droplet-count bound `ceil(m / m*) + 2`.
pub fn default_k_max(params: &PowerLawParams, m: f64) -> usize {
    let (m_star, _) = linear_growth_limit(params);
    (m / m_star).ceil() as usize + 2
}

/// Best `Σ g(m_i)` over partitions of `m` into at most `k_max` balls.
pub fn optimal_partition(params: &PowerLawParams, m: f64, k_max: Option<usize>) -> Result<GeneralizedMinimizer> {
    ensure!(m > 0.0 && m.is_finite(), InvalidParameter, "mass must be positive, got {m}");
    let k_max = k_max.unwrap_or_else(|| default_k_max(params, m));
    ensure!(k_max >= 1, InvalidParameter, "k_max must be at least 1");

    let mut best_k = 1;
    let mut best_s = m;
    let mut best_e = params.g(m);
    for k in 2..=k_max {
        let km1 = (k - 1) as f64;
        let family = |s: f64| km1 * params.g((m - s) / km1) + params.g(s);
        let (mut s, mut e) = scan_minimize(family, 0.0, m / k as f64, SCAN_SAMPLES, 1e-13);
        // the equal split is a stationary point of the family, so the scan only
        // locates it to ~sqrt(eps); prefer it exactly when it ties
        let equal = m / k as f64;
        let e_equal = k as f64 * params.g(equal);
        if e_equal <= e + 1e-12 * e.abs().max(1.0) {
            (s, e) = (equal, e_equal);
        }
        if e < best_e - TIE_TOL {
            best_k = k;
            best_s = s;
            best_e = e;
        }
    }

    let mut masses = Vec::with_capacity(best_k);
    if best_k == 1 {
        masses.push(m);
    } else {
        let equal = m / best_k as f64;
        if best_s == equal {
            masses.extend(std::iter::repeat_n(equal, best_k));
        } else {
            let r = (m - best_s) / (best_k - 1) as f64;
            masses.extend(std::iter::repeat_n(r, best_k - 1));
            masses.push(best_s);
        }
    }
    for &mi in &masses {
        params.check_ball(mi)?;
    }
    let energies: Vec<f64> = masses.iter().map(|&mi| params.g(mi)).collect();
    let total_energy = energies.iter().sum();
    let warning = (best_k == k_max && k_max > 1)
        .then(|| format!("best droplet count equals k_max = {k_max}; a larger bound may do better"));
    Ok(GeneralizedMinimizer { m, masses, energies, total_energy, k: best_k, k_max, warning })
}

/// `E(m)`, the infimum of the energy at mass `m`.
pub fn minimal_energy_e(params: &PowerLawParams, m: f64) -> Result<f64> {
    if m == 0.0 {
        return Ok(0.0);
    }
    Ok(optimal_partition(params, m, None)?.total_energy)
}

/// `(m*, g(m*)/m*)`, the limit of `E(m)/m` and the droplet mass attaining it.
pub fn linear_growth_limit(params: &PowerLawParams) -> (f64, f64) {
    let m_star = (params.d / (params.c * (1.0 + params.q()))).powf(1.0 / params.q());
    (m_star, params.g(m_star) / m_star)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubadditivityReport {
    pub m: f64,
    pub n: f64,
    pub e_sum: f64,
    pub e_m: f64,
    pub e_n: f64,
    pub holds: bool,
}

/// Checks `E(m + n) <= E(m) + E(n)` up to `1e-9`.
pub fn subadditivity_probe(params: &PowerLawParams, m: f64, n_mass: f64) -> Result<SubadditivityReport> {
    ensure!(m > 0.0 && n_mass > 0.0, InvalidParameter, "masses must be positive");
    let e_sum = minimal_energy_e(params, m + n_mass)?;
    let e_m = minimal_energy_e(params, m)?;
    let e_n = minimal_energy_e(params, n_mass)?;
    Ok(SubadditivityReport { m, n: n_mass, e_sum, e_m, e_n, holds: e_sum <= e_m + e_n + 1e-9 })
}

/// Summary emitted by the `droplets` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DropletReport {
    pub m: f64,
    pub k: usize,
    pub masses: Vec<f64>,
    pub energies: Vec<f64>,
    pub total: f64,
    pub m0: f64,
    pub m1: f64,
    pub m_star: f64,
    pub lim_e_over_m: f64,
    pub warning: Option<String>,
}

pub fn droplet_report(params: &PowerLawParams, m: f64, k_max: Option<usize>) -> Result<DropletReport> {
    let gm = optimal_partition(params, m, k_max)?;
    let th = split_thresholds(params);
    let (m_star, lim) = linear_growth_limit(params);
    Ok(DropletReport {
        m,
        k: gm.k,
        masses: gm.masses,
        energies: gm.energies,
        total: gm.total_energy,
        m0: th.m0,
        m1: th.m1,
        m_star,
        lim_e_over_m: lim,
        warning: gm.warning,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: f64,
    pub k: usize,
    pub total_energy: f64,
    pub energy_per_mass: f64,
}

/// `E(m)` on `count` log-spaced masses in `[lo, hi]`.
pub fn partition_sweep(params: &PowerLawParams, lo: f64, hi: f64, count: usize) -> Result<Vec<SweepRow>> {
    ensure!(lo > 0.0 && hi >= lo && count >= 1, InvalidParameter, "sweep needs 0 < lo <= hi and count >= 1");
    (0..count)
        .map(|i| {
            let m = if count == 1 { lo } else { lo * (hi / lo).powf(i as f64 / (count - 1) as f64) };
            let m = if i + 1 == count { hi } else { m };
            let gm = optimal_partition(params, m, None)?;
            Ok(SweepRow { m, k: gm.k, total_energy: gm.total_energy, energy_per_mass: gm.total_energy / m })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("m,k,total_energy,energy_per_mass\n");
    for r in rows {
        out.push_str(&format!("{:.16e},{},{:.16e},{:.16e}\n", r.m, r.k, r.total_energy, r.energy_per_mass));
    }
    out
}
