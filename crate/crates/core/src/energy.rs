//! Interaction energies `E[ρ] = ∫∫ K(|x-y|) ρ(x) ρ(y) dx dy`, cross energies,
//! potentials `K*ρ`, and the two variational diagnostics (the multiplier
//! condition and the separation band).
//!
//! Grid densities go through pairwise quadrature over occupied cells, with
//! the diagonal included. Interval unions in 1D are handled exactly for the
//! toy kernel (closed-form strip areas) and by piecewise Gauss–Legendre
//! quadrature of the pair-distance profile for every other kernel.

use serde::{Deserialize, Serialize};

use crate::densities::{point_distance, Ball, DropletConfig, GridDensity, IntervalConfig, ENDPOINT_TOL};
use crate::error::{ensure, Error, Result};
use crate::extended::ExtReal;
use crate::kernels::{Kernel, ToyKernel};
use crate::numeric::GaussLegendre;

/// Forbidden pairs beyond this count are counted but not listed.
pub const MAX_LISTED_PAIRS: usize = 10_000;

/// Cells with `ρ >= 1 - ONE_SET_TOL` belong to the "ρ = 1" set.
pub const ONE_SET_TOL: f64 = 1e-9;

const GL_POINTS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    GridQuadrature,
    ExactInterval,
    IntervalQuadrature,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyResult {
    pub value: ExtReal,
    pub method: Method,
    /// Offending cell (grid) or interval (exact) index pairs when `value` is `+∞`.
    pub forbidden_pairs: Vec<(usize, usize)>,
    /// Total number of forbidden pairs, including unlisted ones.
    pub forbidden_count: usize,
    pub h: Option<f64>,
    pub mass: f64,
}

impl EnergyResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("energy result serializes")
    }
}

// ---------------------------------------------------------------------------
// Grid quadrature
// ---------------------------------------------------------------------------

/// `E[ρ] = h^{2N} Σ_{i,j} K(|x_i - x_j|) ρ_i ρ_j` over occupied cells.
pub fn interaction_energy(kernel: &Kernel, density: &GridDensity) -> EnergyResult {
    let lattice = density.lattice();
    let h = lattice.h;
    let vol = lattice.cell_volume();
    let vals = density.values();
    let occ = density.occupied();
    let k0 = kernel.grid_value(0.0, h).finite().expect("K(0) is finite");

    let mut diag = 0.0;
    for &i in &occ {
        diag += vals[i] * vals[i];
    }
    let mut off = 0.0;
    let mut pairs = Vec::new();
    let mut count = 0usize;
    for (a, &i) in occ.iter().enumerate() {
        let mut row = 0.0;
        for &j in &occ[a + 1..] {
            match kernel.grid_value(lattice.cell_distance(i, j), h) {
                ExtReal::Finite(k) => row += k * vals[j],
                ExtReal::PosInf => {
                    count += 1;
                    if pairs.len() < MAX_LISTED_PAIRS {
                        pairs.push((i, j));
                    }
                }
            }
        }
        off += row * vals[i];
    }
    let value = if count > 0 {
        ExtReal::PosInf
    } else {
        let e = vol * vol * (k0 * diag + 2.0 * off);
        debug_assert!(
            e >= -kernel.depth() * density.mass().powi(2) * (1.0 + 1e-9) - 1e-12,
            "energy {e} below -d·m²"
        );
        ExtReal::Finite(e)
    };
    EnergyResult {
        value,
        method: Method::GridQuadrature,
        forbidden_pairs: pairs,
        forbidden_count: count,
        h: Some(h),
        mass: density.mass(),
    }
}

fn lex_cmp(a: &GridDensity, b: &GridDensity) -> std::cmp::Ordering {
    let la = a.lattice();
    let lb = b.lattice();
    la.origin
        .iter()
        .zip(&lb.origin)
        .map(|(x, y)| x.total_cmp(y))
        .chain(la.shape.iter().zip(&lb.shape).map(|(x, y)| x.cmp(y)))
        .chain(a.values().iter().zip(b.values()).map(|(x, y)| x.total_cmp(y)))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// `E[ρ, η] = h^{2N} Σ_{i,j} K(|x_i - y_j|) ρ_i η_j`. Both densities must use the
/// same spacing and dimension; origins may differ. Symmetric bit-for-bit.
pub fn cross_energy(kernel: &Kernel, rho: &GridDensity, eta: &GridDensity) -> Result<ExtReal> {
    ensure!(
        rho.lattice().compatible(eta.lattice()),
        InvalidDensity,
        "cross energy needs densities with the same spacing and dimension"
    );
    // canonical order makes the summation order independent of argument order
    let (a, b) = if lex_cmp(rho, eta).is_le() { (rho, eta) } else { (eta, rho) };
    let h = a.h();
    let vol = a.lattice().cell_volume();
    let (la, lb) = (a.lattice(), b.lattice());
    // distances from integer offsets plus the origin shift, so that equal
    // origins reproduce `cell_distance` exactly
    let mut shift = [0.0; 2];
    for (k, s) in shift.iter_mut().enumerate().take(la.dim) {
        *s = (la.origin[k] - lb.origin[k]) / h;
    }
    let occ_b = b.occupied();
    let idx_b: Vec<[usize; 2]> = occ_b.iter().map(|&j| lb.multi_index(j)).collect();
    let mut total = 0.0;
    for i in a.occupied() {
        let ia = la.multi_index(i);
        let mut row = 0.0;
        for (&j, ib) in occ_b.iter().zip(&idx_b) {
            let o0 = (ia[0] as f64 - ib[0] as f64) + shift[0];
            let o1 = (ia[1] as f64 - ib[1] as f64) + shift[1];
            let r = if la.dim == 1 { h * o0.abs() } else { h * (o0 * o0 + o1 * o1).sqrt() };
            match kernel.grid_value(r, h) {
                ExtReal::Finite(k) => row += k * b.values()[j],
                ExtReal::PosInf => return Ok(ExtReal::PosInf),
            }
        }
        total += row * a.values()[i];
    }
    Ok(ExtReal::Finite(vol * vol * total))
}

/// `K*ρ(x) = h^N Σ_j K(|x - x_j|) ρ_j`.
pub fn potential(kernel: &Kernel, density: &GridDensity, x: [f64; 2]) -> ExtReal {
    let lattice = density.lattice();
    let mut acc = ExtReal::ZERO;
    for j in density.occupied() {
        let k = kernel.grid_value(point_distance(x, lattice.center(j)), lattice.h);
        acc += k * density.values()[j];
        if acc.is_infinite() {
            return acc;
        }
    }
    acc * lattice.cell_volume()
}

/// `K*ρ` at every cell of the density's lattice.
pub fn potential_field(kernel: &Kernel, density: &GridDensity) -> Vec<ExtReal> {
    let lattice = density.lattice();
    let h = lattice.h;
    let vol = lattice.cell_volume();
    let occ = density.occupied();
    let vals = density.values();
    (0..lattice.len())
        .map(|c| {
            let mut sum = 0.0;
            for &j in &occ {
                match kernel.grid_value(lattice.cell_distance(c, j), h) {
                    ExtReal::Finite(k) => sum += k * vals[j],
                    ExtReal::PosInf => return ExtReal::PosInf,
                }
            }
            ExtReal::Finite(vol * sum)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Exact interval arithmetic (toy kernel)
// ---------------------------------------------------------------------------

fn ramp_sq(t: f64) -> f64 {
    let t = t.max(0.0);
    0.5 * t * t
}

/// Area of `{(x, y) ∈ I × J : y - x <= c}`.
fn area_below(i: (f64, f64), j: (f64, f64), c: f64) -> f64 {
    let (a1, b1) = i;
    let (a2, b2) = j;
    ramp_sq(b1 + c - a2) - ramp_sq(a1 + c - a2) - ramp_sq(b1 + c - b2) + ramp_sq(a1 + c - b2)
}

/// Area of `{(x, y) ∈ I × J : |x - y| <= r}` in closed form.
pub fn strip_area(i: (f64, f64), j: (f64, f64), r: f64) -> f64 {
    (area_below(i, j, r) - area_below(i, j, -r)).max(0.0)
}

/// Range `[lo, hi]` of `|x - y|` over `x ∈ I`, `y ∈ J`.
fn distance_range(i: (f64, f64), j: (f64, f64)) -> (f64, f64) {
    let lo = j.0 - i.1;
    let hi = j.1 - i.0;
    if lo <= 0.0 && hi >= 0.0 {
        (0.0, hi.max(-lo))
    } else {
        (lo.abs().min(hi.abs()), lo.abs().max(hi.abs()))
    }
}

fn overlap(i: (f64, f64), j: (f64, f64)) -> f64 {
    (i.1.min(j.1) - i.0.max(j.0)).max(0.0)
}

/// Whether the pair `(I, J)` realises forbidden distances on a set of positive
/// measure: the open band `(1, 1 + w)` for `w > 0`, or distance exactly 1 on
/// a positive-length set (`(I + 1) ∩ J` or `(J + 1) ∩ I`) for `w = 0`.
fn toy_pair_forbidden(toy: &ToyKernel, i: (f64, f64), j: (f64, f64)) -> bool {
    if toy.w > 0.0 {
        let (lo, hi) = distance_range(i, j);
        lo.max(1.0) < hi.min(1.0 + toy.w)
    } else {
        overlap((i.0 + 1.0, i.1 + 1.0), j) > ENDPOINT_TOL || overlap((j.0 + 1.0, j.1 + 1.0), i) > ENDPOINT_TOL
    }
}

/// Exact `E_w[𝟙_S]` for a union of intervals `S`.
pub fn exact_interval_energy(toy: &ToyKernel, config: &IntervalConfig) -> EnergyResult {
    let ivs = config.intervals();
    let mut pairs = Vec::new();
    let mut area = 0.0;
    for (a, &i) in ivs.iter().enumerate() {
        for (b, &j) in ivs.iter().enumerate().skip(a) {
            if toy_pair_forbidden(toy, i, j) {
                pairs.push((a, b));
                continue;
            }
            let s = strip_area(i, j, 1.0);
            area += if a == b { s } else { 2.0 * s };
        }
    }
    let count = pairs.len();
    pairs.truncate(MAX_LISTED_PAIRS);
    let value = if count > 0 {
        ExtReal::PosInf
    } else {
        let e = -area;
        debug_assert!(e >= -config.mass() - 1e-9, "finite toy energy {e} below -m = {}", -config.mass());
        ExtReal::Finite(e)
    };
    EnergyResult {
        value,
        method: Method::ExactInterval,
        forbidden_pairs: pairs,
        forbidden_count: count,
        h: None,
        mass: config.mass(),
    }
}

fn toy_cross(toy: &ToyKernel, rho: &IntervalConfig, eta: &IntervalConfig) -> ExtReal {
    let mut area = 0.0;
    for &i in rho.intervals() {
        for &j in eta.intervals() {
            if toy_pair_forbidden(toy, i, j) {
                return ExtReal::PosInf;
            }
            area += strip_area(i, j, 1.0);
        }
    }
    ExtReal::Finite(-area)
}

// ---------------------------------------------------------------------------
// Interval quadrature (general kernels)
// ---------------------------------------------------------------------------

/// `∫_I ∫_J K(|x - y|) dy dx` as `∫ K(|s|) T(s) ds`, where `T(s) = |(I + s) ∩ J|`
/// is the trapezoidal pair-offset profile. Pieces are split at the trapezoid
/// corners and at `±` every kernel breakpoint, so polynomial profiles are
/// integrated exactly.
fn interval_pair_integral(kernel: &Kernel, gl: &GaussLegendre, i: (f64, f64), j: (f64, f64)) -> ExtReal {
    let lo = j.0 - i.1;
    let hi = j.1 - i.0;
    let profile = |s: f64| overlap((i.0 + s, i.1 + s), j);
    let mut cuts = vec![lo, hi, j.0 - i.0, j.1 - i.1, 0.0];
    for b in kernel.breakpoints() {
        cuts.push(b);
        cuts.push(-b);
    }
    cuts.retain(|c| *c >= lo && *c <= hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (s0, s1) = (w[0], w[1]);
        if s1 - s0 <= 0.0 {
            continue;
        }
        // interior value decides +∞ on open pieces (discontinuities sit on cuts)
        let mid = 0.5 * (s0 + s1);
        if kernel.eval(mid.abs()).is_infinite() {
            return ExtReal::PosInf;
        }
        let mut piece = 0.0;
        for (s, wt) in gl.mapped(s0, s1) {
            let k = kernel.eval(s.abs()).finite().unwrap_or(0.0);
            piece += wt * k * profile(s);
        }
        total += piece;
    }
    ExtReal::Finite(total)
}

/// `E[𝟙_S]` for any kernel: exact for the toy kernel, piecewise
/// Gauss–Legendre otherwise.
pub fn interval_energy(kernel: &Kernel, config: &IntervalConfig) -> EnergyResult {
    if let Kernel::Toy(toy) = kernel {
        return exact_interval_energy(toy, config);
    }
    let gl = GaussLegendre::new(GL_POINTS);
    let ivs = config.intervals();
    let mut total = ExtReal::ZERO;
    let mut pairs = Vec::new();
    for (a, &i) in ivs.iter().enumerate() {
        for (b, &j) in ivs.iter().enumerate().skip(a) {
            let v = interval_pair_integral(kernel, &gl, i, j);
            if v.is_infinite() {
                pairs.push((a, b));
            }
            total += if a == b { v } else { v * 2.0 };
        }
    }
    let count = pairs.len();
    EnergyResult {
        value: total,
        method: Method::IntervalQuadrature,
        forbidden_pairs: pairs,
        forbidden_count: count,
        h: None,
        mass: config.mass(),
    }
}

/// `E[𝟙_S, 𝟙_T]` for interval unions.
pub fn interval_cross_energy(kernel: &Kernel, rho: &IntervalConfig, eta: &IntervalConfig) -> ExtReal {
    if let Kernel::Toy(toy) = kernel {
        return toy_cross(toy, rho, eta);
    }
    let gl = GaussLegendre::new(GL_POINTS);
    let mut total = ExtReal::ZERO;
    for &i in rho.intervals() {
        for &j in eta.intervals() {
            total += interval_pair_integral(kernel, &gl, i, j);
        }
    }
    total
}

/// `K*𝟙_S(x)` for an interval union. Exact for the toy kernel.
pub fn interval_potential(kernel: &Kernel, config: &IntervalConfig, x: f64) -> ExtReal {
    if let Kernel::Toy(toy) = kernel {
        let near = config.restricted(x - 1.0, x + 1.0).mass();
        let band_hit = if toy.w > 0.0 {
            config.restricted(x + 1.0, x + 1.0 + toy.w).mass() > 0.0
                || config.restricted(x - 1.0 - toy.w, x - 1.0).mass() > 0.0
        } else {
            false
        };
        return if band_hit { ExtReal::PosInf } else { ExtReal::Finite(-near) };
    }
    let gl = GaussLegendre::new(GL_POINTS);
    let mut total = ExtReal::ZERO;
    for &(a, b) in config.intervals() {
        let mut cuts = vec![a, b, x];
        for r in kernel.breakpoints() {
            cuts.push(x - r);
            cuts.push(x + r);
        }
        cuts.retain(|c| *c >= a && *c <= b);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            let (y0, y1) = (w[0], w[1]);
            if kernel.eval((0.5 * (y0 + y1) - x).abs()).is_infinite() {
                return ExtReal::PosInf;
            }
            total += ExtReal::Finite(gl.integrate(y0, y1, |y| kernel.eval((x - y).abs()).finite().unwrap_or(0.0)));
        }
    }
    total
}

// ---------------------------------------------------------------------------
// Ball configurations
// ---------------------------------------------------------------------------

/// `∫_{B_1} ∫_{B_2} K(|x - y|)` for two balls (possibly the same one).
/// Intervals in 1D; polar Gauss–Legendre product rule in 2D.
pub fn ball_pair_energy(kernel: &Kernel, b1: &Ball, b2: &Ball) -> ExtReal {
    match b1.dim() {
        1 => {
            let i = IntervalConfig::new(vec![(b1.center[0] - b1.radius, b1.center[0] + b1.radius)]).unwrap();
            let j = IntervalConfig::new(vec![(b2.center[0] - b2.radius, b2.center[0] + b2.radius)]).unwrap();
            interval_cross_energy(kernel, &i, &j)
        }
        _ => {
            let n1 = disk_nodes(b1);
            let n2 = disk_nodes(b2);
            let mut total = ExtReal::ZERO;
            for &(p, wp) in &n1 {
                let mut row = 0.0;
                for &(q, wq) in &n2 {
                    match kernel.eval(point_distance(p, q)) {
                        ExtReal::Finite(k) => row += k * wq,
                        ExtReal::PosInf => return ExtReal::PosInf,
                    }
                }
                total += ExtReal::Finite(row * wp);
            }
            total
        }
    }
}

fn disk_nodes(b: &Ball) -> Vec<([f64; 2], f64)> {
    let radial = GaussLegendre::new(20);
    let n_theta = 48;
    let mut nodes = Vec::with_capacity(20 * n_theta);
    for (r, wr) in radial.mapped(0.0, b.radius) {
        for k in 0..n_theta {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n_theta as f64;
            let w = wr * r * 2.0 * std::f64::consts::PI / n_theta as f64;
            nodes.push(([b.center[0] + r * t.cos(), b.center[1] + r * t.sin()], w));
        }
    }
    nodes
}

/// Energy of a ball union by pairwise ball integrals.
pub fn droplet_energy(kernel: &Kernel, config: &DropletConfig) -> ExtReal {
    let balls = config.balls();
    let mut total = ExtReal::ZERO;
    for (i, a) in balls.iter().enumerate() {
        total += ball_pair_energy(kernel, a, a);
        for b in &balls[i + 1..] {
            total += ball_pair_energy(kernel, a, b) * 2.0;
        }
    }
    total
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

/// Residuals of the multiplier condition: `K*ρ >= λ` on `{ρ = 0}`,
/// `= λ` on `{0 < ρ < 1}`, `<= λ` on `{ρ = 1}`, for some `λ < 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElReport {
    /// Maximum of `K*ρ` over the `{ρ = 1}` cells.
    pub lambda: f64,
    pub lambda_negative: bool,
    /// Measure of `{ρ = 0}` where `K*ρ < λ - tol`.
    pub violations_on_zero_set: f64,
    /// Measure of `{ρ = 1}` where `K*ρ > λ + tol`.
    pub violations_on_one_set: f64,
    /// Measure of `{0 < ρ < 1}` where `|K*ρ - λ| > tol`.
    pub violations_on_partial_set: f64,
    pub tol: f64,
    pub note: Option<String>,
}

impl ElReport {
    pub fn total_violation(&self) -> f64 {
        self.violations_on_zero_set + self.violations_on_one_set + self.violations_on_partial_set
    }
}

/// Evaluates the multiplier condition on the density's lattice.
pub fn el_check(kernel: &Kernel, density: &GridDensity, tol: f64) -> Result<ElReport> {
    let energy = interaction_energy(kernel, density);
    ensure!(energy.value.is_finite(), InfiniteEnergy, "the multiplier check needs a finite-energy density");
    let vals = density.values();
    ensure!(vals.iter().any(|v| *v > ONE_SET_TOL), InvalidDensity, "density is zero everywhere");
    let field = potential_field(kernel, density);
    let vol = density.lattice().cell_volume();

    let mut note = None;
    let mut on_one: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] >= 1.0 - ONE_SET_TOL).collect();
    if on_one.is_empty() {
        note = Some("no cell at value 1; λ taken over {ρ > 0}".to_string());
        on_one = (0..vals.len()).filter(|&i| vals[i] > ONE_SET_TOL).collect();
    }
    let lambda = on_one
        .iter()
        .map(|&i| field[i].finite().expect("finite energy implies finite potential on the support"))
        .fold(f64::NEG_INFINITY, f64::max);

    let mut zero = 0usize;
    let mut one = 0usize;
    let mut partial = 0usize;
    for (i, (&v, &phi)) in vals.iter().zip(&field).enumerate() {
        let _ = i;
        if v <= ONE_SET_TOL {
            if phi < ExtReal::Finite(lambda - tol) {
                zero += 1;
            }
        } else if v >= 1.0 - ONE_SET_TOL {
            if phi > ExtReal::Finite(lambda + tol) {
                one += 1;
            }
        } else {
            let off = match phi {
                ExtReal::Finite(p) => (p - lambda).abs() > tol,
                ExtReal::PosInf => true,
            };
            if off {
                partial += 1;
            }
        }
    }
    Ok(ElReport {
        lambda,
        lambda_negative: lambda < 0.0,
        violations_on_zero_set: zero as f64 * vol,
        violations_on_one_set: one as f64 * vol,
        violations_on_partial_set: partial as f64 * vol,
        tol,
        note,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationPair {
    pub i: usize,
    pub j: usize,
    pub x_i: Vec<f64>,
    pub x_j: Vec<f64>,
    pub distance: f64,
    pub potential_i: f64,
    pub potential_j: f64,
}

/// Support pairs with `K*ρ <= tol` at both points and distance in
/// `[a + w, a + W - w]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub band: (f64, f64),
    pub offending_pairs: Vec<SeparationPair>,
    pub offending_count: usize,
}

impl SeparationReport {
    pub fn is_empty(&self) -> bool {
        self.offending_count == 0
    }
}

pub fn separation_check(kernel: &Kernel, density: &GridDensity, tol: f64) -> SeparationReport {
    let p = kernel.params();
    let band = p.separation_band();
    let lattice = density.lattice();
    let field = potential_field(kernel, density);
    let low: Vec<(usize, f64)> = density
        .occupied()
        .into_iter()
        .filter_map(|i| field[i].finite().filter(|v| *v <= tol).map(|v| (i, v)))
        .collect();
    let mut pairs = Vec::new();
    let mut count = 0;
    if band.0 <= band.1 {
        let slack = 1e-9 * lattice.h;
        for (a, &(i, pi)) in low.iter().enumerate() {
            for &(j, pj) in &low[a + 1..] {
                let d = lattice.cell_distance(i, j);
                if d >= band.0 - slack && d <= band.1 + slack {
                    count += 1;
                    if pairs.len() < MAX_LISTED_PAIRS {
                        let ci = lattice.center(i);
                        let cj = lattice.center(j);
                        pairs.push(SeparationPair {
                            i,
                            j,
                            x_i: ci[..lattice.dim].to_vec(),
                            x_j: cj[..lattice.dim].to_vec(),
                            distance: d,
                            potential_i: pi,
                            potential_j: pj,
                        });
                    }
                }
            }
        }
    }
    SeparationReport { band, offending_pairs: pairs, offending_count: count }
}

/// Convenience: grid energy as a plain value, erroring on `+∞`.
pub fn finite_energy(kernel: &Kernel, density: &GridDensity) -> Result<f64> {
    let r = interaction_energy(kernel, density);
    r.value
        .finite()
        .ok_or_else(|| Error::InfiniteEnergy(format!("{} forbidden pairs", r.forbidden_count)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{from_droplets_padded, grid_from_indicator_on, Lattice, Region, Shape};
    use crate::kernels::{make_well_barrier, PowerLawKernel, Profile, WellBarrierParams};
    use proptest::prelude::*;

    fn toy(w: f64) -> Kernel {
        ToyKernel::new(w).unwrap().into()
    }

    fn ivs(v: &[(f64, f64)]) -> IntervalConfig {
        IntervalConfig::new(v.to_vec()).unwrap()
    }

    fn set_a(a: f64) -> IntervalConfig {
        ivs(&[(0.0, a), ((1.0 + a) / 2.0, 1.0), (1.0 + a, (3.0 + a) / 2.0), (2.0, 2.0 + a)])
    }

    /// Brute-force strip area on a fine midpoint grid.
    fn strip_area_oracle(i: (f64, f64), j: (f64, f64), r: f64, n: usize) -> f64 {
        let dx = (i.1 - i.0) / n as f64;
        let dy = (j.1 - j.0) / n as f64;
        let mut count = 0usize;
        for p in 0..n {
            let x = i.0 + (p as f64 + 0.5) * dx;
            for q in 0..n {
                let y = j.0 + (q as f64 + 0.5) * dy;
                if (x - y).abs() <= r {
                    count += 1;
                }
            }
        }
        count as f64 * dx * dy
    }

    #[test]
    fn strip_area_matches_brute_force() {
        let cases = [((0.0, 1.0), (1.5, 2.5)), ((0.0, 0.4), (0.6, 1.0)), ((0.0, 2.0), (0.5, 1.7)), ((-1.0, 0.3), (0.9, 4.0))];
        for (i, j) in cases {
            let exact = strip_area(i, j, 1.0);
            let oracle = strip_area_oracle(i, j, 1.0, 2000);
            assert!((exact - oracle).abs() < 2e-3, "{i:?} {j:?}: {exact} vs {oracle}");
        }
        assert_eq!(strip_area((0.0, 1.0), (1.5, 2.5), 1.0), 0.125);
    }

    #[test]
    fn exact_interval_examples() {
        for w in [0.0, 0.5, 1.5] {
            let e = exact_interval_energy(&ToyKernel::new(w).unwrap(), &ivs(&[(0.0, 1.0)]));
            assert_eq!(e.value, ExtReal::Finite(-1.0));
        }
        let a = exact_interval_energy(&ToyKernel::new(0.0).unwrap(), &set_a(0.5));
        assert!((a.value.finite().unwrap() + 1.25).abs() < 1e-12);
        let a = exact_interval_energy(&ToyKernel::new(0.0).unwrap(), &set_a(0.25));
        assert!((a.value.finite().unwrap() + 1.0625).abs() < 1e-12);

        let two = exact_interval_energy(&ToyKernel::new(0.5).unwrap(), &ivs(&[(0.0, 1.0), (2.5, 3.5)]));
        assert_eq!(two.value, ExtReal::Finite(-2.0));

        let bad = exact_interval_energy(&ToyKernel::new(0.75).unwrap(), &ivs(&[(0.0, 1.0), (1.5, 2.5)]));
        assert_eq!(bad.value, ExtReal::PosInf);
        assert_eq!(bad.forbidden_pairs, vec![(0, 1)]);
    }

    #[test]
    fn w_zero_positive_measure_rule() {
        let k = ToyKernel::new(0.0).unwrap();
        // distance exactly 1 only at the single point pair (0, 1): finite
        assert!(exact_interval_energy(&k, &ivs(&[(0.0, 1.0)])).value.is_finite());
        // an interval longer than 1 overlaps its own unit translate
        assert!(exact_interval_energy(&k, &ivs(&[(0.0, 1.2)])).value.is_infinite());
        // cross distances straddling 1
        assert!(exact_interval_energy(&k, &ivs(&[(0.0, 1.0), (1.5, 2.5)])).value.is_infinite());
    }

    #[test]
    fn cross_energy_examples_on_intervals() {
        let k = toy(0.5);
        let i = ivs(&[(0.0, 1.0)]);
        let far = ivs(&[(5.0, 6.0)]);
        assert_eq!(interval_cross_energy(&k, &i, &far), ExtReal::ZERO);
        assert_eq!(interval_cross_energy(&k, &i, &i), interval_energy(&k, &i).value);
        // w = 0: strip area -1/8 over the cross rectangle; the exact path flags
        // the positive-measure set of unit distances instead
        assert_eq!(-strip_area((0.0, 1.0), (1.5, 2.5), 1.0), -0.125);
        assert_eq!(interval_cross_energy(&toy(0.0), &i, &ivs(&[(1.5, 2.5)])), ExtReal::PosInf);
    }

    #[test]
    fn w_zero_grid_cross_energy_converges_to_strip_area() {
        let k = toy(0.0);
        let mut prev = f64::INFINITY;
        for h in [0.1, 0.05, 0.025] {
            let lattice_of = |lo: f64| Lattice::covering(&[lo], &[lo + 1.0], h, 0).unwrap();
            let rho = grid_from_indicator_on(&Region::new(vec![Shape::Interval { lo: 0.0, hi: 1.0 }]), lattice_of(0.0)).unwrap();
            let eta = grid_from_indicator_on(&Region::new(vec![Shape::Interval { lo: 1.5, hi: 2.5 }]), lattice_of(1.5)).unwrap();
            let c = cross_energy(&k, &rho, &eta).unwrap().finite().unwrap();
            let err = (c + 0.125).abs();
            assert!(err <= 2.0 * h, "h={h} cross={c}");
            assert!(err < prev + 1e-15);
            prev = err;
        }
    }

    #[test]
    fn potential_examples() {
        let i = ivs(&[(0.0, 1.0)]);
        assert_eq!(interval_potential(&toy(0.5), &i, 0.5), ExtReal::Finite(-1.0));
        assert_eq!(interval_potential(&toy(0.5), &i, 10.0), ExtReal::ZERO);
        assert_eq!(interval_potential(&toy(0.5), &i, 2.2), ExtReal::PosInf);

        let pl: Kernel = PowerLawKernel::well_only(2.0, 1.0, 2.0).unwrap().into();
        let v = interval_potential(&pl, &ivs(&[(-1.0, 1.0)]), 0.0).finite().unwrap();
        assert!((v + 4.0 / 3.0).abs() < 1e-13, "{v}");

        // the grid route agrees with the exact route up to O(h)
        let lattice = Lattice::covering(&[-1.0], &[1.0], 0.01, 0).unwrap();
        let g = grid_from_indicator_on(&Region::new(vec![Shape::Interval { lo: -1.0, hi: 1.0 }]), lattice).unwrap();
        let gv = potential(&pl, &g, [0.0, 0.0]).finite().unwrap();
        assert!((gv + 4.0 / 3.0).abs() < 1e-3, "{gv}");
    }

    #[test]
    fn general_kernel_interval_energy_is_exact_for_polynomials() {
        let pl: Kernel = PowerLawKernel::well_only(2.0, 1.0, 2.0).unwrap().into();
        // ∫∫_{[0,1]²} ((x-y)² - 1) = 1/6 - 1
        let e = interval_energy(&pl, &ivs(&[(0.0, 1.0)])).value.finite().unwrap();
        assert!((e + 5.0 / 6.0).abs() < 1e-14);
        let lin = make_well_barrier(
            WellBarrierParams { depth: 1.0, well_width: 0.5, well_end: 1.0, barrier_height: 2.0, barrier_width: 2.0 },
            Profile::Linear { intercept: -1.0, slope: 2.0 },
            Profile::Constant { value: 2.0 },
            Profile::Zero,
        )
        .unwrap();
        let lin: Kernel = lin.into();
        let cfg = ivs(&[(0.0, 0.7), (1.9, 2.3), (4.1, 4.2)]);
        let exact = interval_energy(&lin, &cfg).value.finite().unwrap();
        // fine midpoint oracle
        let n = 3000;
        let pts: Vec<(f64, f64)> = cfg
            .intervals()
            .iter()
            .flat_map(|&(a, b)| {
                let dx = (b - a) / n as f64;
                (0..n).map(move |p| (a + (p as f64 + 0.5) * dx, dx))
            })
            .collect();
        let mut oracle = 0.0;
        for &(x, dx) in &pts {
            for &(y, dy) in &pts {
                oracle += lin.eval((x - y).abs()).finite().unwrap() * dx * dy;
            }
        }
        assert!((exact - oracle).abs() < 2e-3, "{exact} vs {oracle}");
    }

    #[test]
    fn grid_energy_detects_forbidden_pairs() {
        let lattice = Lattice::new(1, vec![0.0], 0.5, vec![8]).unwrap();
        let ok = GridDensity::from_occupied(lattice.clone(), &[0, 1, 6]).unwrap();
        assert_eq!(interaction_energy(&toy(1.5), &ok).value, ExtReal::Finite(-0.25 * 5.0));
        let bad = GridDensity::from_occupied(lattice, &[0, 1, 4]).unwrap();
        let r = interaction_energy(&toy(1.5), &bad);
        assert_eq!(r.value, ExtReal::PosInf);
        assert_eq!(r.forbidden_pairs, vec![(0, 4), (1, 4)]);
        assert!(r.to_json().contains("\"+inf\""));
    }

    #[test]
    fn grid_converges_to_exact_at_first_order() {
        // lattice anchored on the endpoints: one extra cell, error 2h + h²
        let k = toy(0.5);
        let exact = exact_interval_energy(&ToyKernel::new(0.5).unwrap(), &ivs(&[(0.0, 1.0)])).value.finite().unwrap();
        let mut errs = Vec::new();
        let mut h: f64 = 0.1;
        for _ in 0..4 {
            let n = (1.0 / h).round() as usize + 1;
            let lattice = Lattice::new(1, vec![0.0], h, vec![n]).unwrap();
            let g = grid_from_indicator_on(&Region::new(vec![Shape::Interval { lo: 0.0, hi: 1.0 }]), lattice).unwrap();
            errs.push((interaction_energy(&k, &g).value.finite().unwrap() - exact).abs());
            h /= 2.0;
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((1.5..=2.5).contains(&ratio), "ratio {ratio} from {errs:?}");
        }
    }

    #[test]
    fn el_check_examples() {
        let pl: Kernel = PowerLawKernel::new(2.0, 1.0, 2.0, 4.0, 5.0, Profile::Zero).unwrap().into();
        // small ball, mass 0.5
        let ball = DropletConfig::new(vec![Ball::new(vec![0.0], 0.25)]).unwrap();
        let g = from_droplets_padded(&ball, 0.01, 150).unwrap();
        let rep = el_check(&pl, &g, 1e-9).unwrap();
        assert!(rep.lambda_negative);
        assert_eq!(rep.total_violation(), 0.0, "{rep:?}");

        // split into two quarter-mass balls inside each other's well
        let split = DropletConfig::new(vec![Ball::new(vec![-0.5], 0.125), Ball::new(vec![0.5], 0.125)]).unwrap();
        let g = from_droplets_padded(&split, 0.01, 150).unwrap();
        let rep = el_check(&pl, &g, 1e-9).unwrap();
        assert!(rep.violations_on_zero_set > 0.0, "{rep:?}");

        // a single occupied cell
        let lattice = Lattice::new(1, vec![0.0], 0.1, vec![41]).unwrap();
        let one = GridDensity::from_occupied(lattice, &[20]).unwrap();
        let rep = el_check(&toy(0.5), &one, 1e-12).unwrap();
        assert!((rep.lambda - (-1.0 * 0.1)).abs() < 1e-15);
        assert_eq!(rep.violations_on_zero_set, 0.0);
    }

    #[test]
    fn el_check_fallback_and_errors() {
        let lattice = Lattice::new(1, vec![0.0], 0.1, vec![5]).unwrap();
        let half = GridDensity::new(lattice.clone(), vec![0.0, 0.5, 0.5, 0.0, 0.0]).unwrap();
        let rep = el_check(&toy(0.5), &half, 1e-9).unwrap();
        assert!(rep.note.is_some());
        let zero = GridDensity::new(lattice.clone(), vec![0.0; 5]).unwrap();
        assert!(el_check(&toy(0.5), &zero, 1e-9).is_err());
        let lattice = Lattice::new(1, vec![0.0], 0.5, vec![8]).unwrap();
        let bad = GridDensity::from_occupied(lattice, &[0, 4]).unwrap();
        assert!(matches!(el_check(&toy(1.5), &bad, 1e-9), Err(Error::InfiniteEnergy(_))));
    }

    fn weak_barrier() -> Kernel {
        // d = 1 > h_bar = 0.2 violates d < h_bar, so the band can be populated
        make_well_barrier(
            WellBarrierParams { depth: 1.0, well_width: 0.5, well_end: 1.0, barrier_height: 0.2, barrier_width: 2.0 },
            Profile::Linear { intercept: -1.0, slope: 2.0 },
            Profile::Constant { value: 0.2 },
            Profile::Zero,
        )
        .unwrap()
        .into()
    }

    #[test]
    fn separation_examples() {
        let k = weak_barrier();
        let p = k.params();
        let d = p.well_end + p.barrier_width / 2.0;
        let two = DropletConfig::new(vec![Ball::new(vec![0.0], 0.25), Ball::new(vec![d], 0.25)]).unwrap();
        let g = from_droplets_padded(&two, 0.05, 4).unwrap();
        let rep = separation_check(&k, &g, 0.0);
        assert!(!rep.is_empty());

        let single = DropletConfig::new(vec![Ball::new(vec![0.0], 0.25)]).unwrap();
        assert!(separation_check(&k, &from_droplets_padded(&single, 0.05, 4).unwrap(), 0.0).is_empty());

        let far = DropletConfig::new(vec![Ball::new(vec![0.0], 0.25), Ball::new(vec![3.0 + 1.0], 0.25)]).unwrap();
        assert!(separation_check(&k, &from_droplets_padded(&far, 0.05, 4).unwrap(), 0.0).is_empty());
    }

    #[test]
    fn ball_pair_energy_matches_closed_forms() {
        let pl: Kernel = PowerLawKernel::well_only(2.0, 1.0, 4.0).unwrap().into();
        // 2D disk of area m: C_{2,2} m^3 - m^2 with C_{2,2} = 1/π
        let r = 0.6f64;
        let m = std::f64::consts::PI * r * r;
        let b = Ball::new(vec![0.3, -0.2], r);
        let e = ball_pair_energy(&pl, &b, &b).finite().unwrap();
        let closed = m.powi(3) / std::f64::consts::PI - m * m;
        assert!((e - closed).abs() < 1e-12, "{e} vs {closed}");
        let b1 = Ball::new(vec![0.0], 0.5);
        assert!((ball_pair_energy(&pl, &b1, &b1).finite().unwrap() + 5.0 / 6.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn cross_energy_symmetric_and_bilinear(
            a in prop::collection::vec(0usize..30, 1..8),
            b in prop::collection::vec(30usize..60, 1..8),
        ) {
            let k: Kernel = PowerLawKernel::new(2.0, 1.0, 1.0, 2.0, 1.0, Profile::InversePower { c: 0.3, q: 2.0 }).unwrap().into();
            let lattice = Lattice::new(1, vec![0.0], 0.1, vec![60]).unwrap();
            let rho = GridDensity::from_occupied(lattice.clone(), &a).unwrap();
            let eta = GridDensity::from_occupied(lattice, &b).unwrap();
            let c1 = cross_energy(&k, &rho, &eta).unwrap();
            let c2 = cross_energy(&k, &eta, &rho).unwrap();
            prop_assert_eq!(c1, c2);
            let sum = rho.add(&eta).unwrap();
            let lhs = interaction_energy(&k, &sum).value.finite().unwrap();
            let rhs = interaction_energy(&k, &rho).value.finite().unwrap()
                + 2.0 * c1.finite().unwrap()
                + interaction_energy(&k, &eta).value.finite().unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1e-300));
            prop_assert!(lhs >= -k.depth() * sum.mass().powi(2));
        }

        #[test]
        fn integer_translation_preserves_energy(cells in prop::collection::vec(0usize..40, 1..10), shift in -50i64..50) {
            let k = toy(0.7);
            let lattice = Lattice::new(1, vec![0.0], 0.25, vec![40]).unwrap();
            let g = GridDensity::from_occupied(lattice, &cells).unwrap();
            let e0 = interaction_energy(&k, &g).value;
            let e1 = interaction_energy(&k, &g.translated(&[shift])).value;
            prop_assert_eq!(e0, e1);
        }

        #[test]
        fn finite_toy_configs_obey_the_minus_m_bound(raw in prop::collection::vec((0.0f64..12.0, 0.05f64..1.0), 1..6), w in 0.0f64..2.0) {
            let cfg = IntervalConfig::new(raw.iter().map(|&(a, l)| (a, a + l)).collect()).unwrap();
            let k = ToyKernel::new(w).unwrap();
            let e = exact_interval_energy(&k, &cfg);
            if let Some(v) = e.value.finite() {
                prop_assert!(v >= -cfg.mass() - 1e-12);
                for i in 0..=60 {
                    let x = -1.0 + 15.0 * i as f64 / 60.0;
                    prop_assert!(interval_potential(&Kernel::Toy(k), &cfg, x) >= ExtReal::Finite(-1.0 - 1e-12));
                }
            }
        }
    }
}
