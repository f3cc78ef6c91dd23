//! Well-barrier interaction kernels.
//!
//! A well-barrier kernel is attractive near the origin (the *well*, depth `d`,
//! first zero crossing at `w`, monotone up to `a`), carries a repulsive
//! *barrier* of height at least `h_bar` on `[a, a + W]`, and has a
//! non-negative decaying *tail* beyond. Three concrete families are provided
//! plus truncation:
//!
//! * [`WellBarrierKernel`] with arbitrary tagged profiles,
//! * [`ToyKernel`] `K_w`: `-1` on `[0, 1]`, `+∞` on `(1, 1 + w)`, `0` beyond,
//! * [`PowerLawKernel`] with well `r^p - d`,
//! * [`TruncatedKernel`], equal to its base up to `R_cut` and zero after.
//!
//! Kernels are immutable after construction and can be shared freely across
//! evaluation threads.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::extended::ExtReal;

/// Relative slack used when snapping lattice distances onto kernel breakpoints.
const LATTICE_SNAP: f64 = 1e-9;

/// A scalar profile `r ↦ value`, evaluated at absolute radius `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    /// `intercept + slope * r`
    Linear { intercept: f64, slope: f64 },
    /// `offset + coef * r^exponent`
    Power { offset: f64, coef: f64, exponent: f64 },
    Constant { value: f64 },
    /// `c / r^q`
    InversePower { c: f64, q: f64 },
    Zero,
}

impl Profile {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Profile::Linear { intercept, slope } => intercept + slope * r,
            Profile::Power { offset, coef, exponent } => offset + coef * r.powf(exponent),
            Profile::Constant { value } => value,
            Profile::InversePower { c, q } => c / r.powf(q),
            Profile::Zero => 0.0,
        }
    }
}

/// Scalar shape parameters shared by every well-barrier kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WellBarrierParams {
    /// Well depth `d = -K(0)`.
    pub depth: f64,
    /// Well width `w`: first zero crossing.
    pub well_width: f64,
    /// End `a` of the monotone well region.
    pub well_end: f64,
    /// Barrier height `h_bar`.
    pub barrier_height: f64,
    /// Barrier width `W`.
    pub barrier_width: f64,
}

impl WellBarrierParams {
    /// `a + W`, the outer edge of the barrier.
    pub fn barrier_end(&self) -> f64 {
        self.well_end + self.barrier_width
    }

    /// Distances `[a + w, a + W - w]` that two support points of a
    /// low-potential density can never realise.
    pub fn separation_band(&self) -> (f64, f64) {
        (
            self.well_end + self.well_width,
            self.well_end + self.barrier_width - self.well_width,
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WellBarrierKernel {
    pub params: WellBarrierParams,
    pub well: Profile,
    pub barrier: Profile,
    pub tail: Profile,
}

impl WellBarrierKernel {
    pub fn eval(&self, r: f64) -> f64 {
        let p = &self.params;
        if r <= p.well_end {
            self.well.eval(r)
        } else if r <= p.barrier_end() {
            self.barrier.eval(r)
        } else {
            self.tail.eval(r)
        }
    }
}

/// `K_w(r) = -1` on `[0, 1]`, `+∞` on `(1, 1 + w)`, `0` on `[1 + w, ∞)`.
///
/// With `w = 0` the band is empty; the "no pair at distance exactly 1"
/// constraint is enforced by the exact interval energy, not by `eval`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToyKernel {
    pub w: f64,
}

impl ToyKernel {
    pub fn new(w: f64) -> Result<Self> {
        ensure!(w >= 0.0 && w.is_finite(), InvalidKernel, "toy band width must be finite and >= 0, got {w}");
        Ok(Self { w })
    }

    pub fn eval(&self, r: f64) -> ExtReal {
        if r <= 1.0 {
            ExtReal::Finite(-1.0)
        } else if r < 1.0 + self.w {
            ExtReal::PosInf
        } else {
            ExtReal::ZERO
        }
    }

    /// Lattice convention: the forbidden band shrinks to `(1 + h/2, 1 + w - h/2)`
    /// so cell-center quantization does not produce false violations.
    pub fn grid_value(&self, r: f64, h: f64) -> ExtReal {
        let eps = 0.5 * h;
        if r <= 1.0 + LATTICE_SNAP {
            ExtReal::Finite(-1.0)
        } else if r > 1.0 + eps && r < 1.0 + self.w - eps {
            ExtReal::PosInf
        } else {
            ExtReal::ZERO
        }
    }
}

/// `K(r) = r^p - d` on `[0, a]`, a constant barrier on `(a, a + W]`, a tail after.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerLawKernel {
    pub exponent: f64,
    pub depth: f64,
    pub well_end: f64,
    pub barrier_height: f64,
    pub barrier_width: f64,
    pub tail: Profile,
}

impl PowerLawKernel {
    pub fn new(
        exponent: f64,
        depth: f64,
        well_end: f64,
        barrier_height: f64,
        barrier_width: f64,
        tail: Profile,
    ) -> Result<Self> {
        ensure!(exponent > 0.0, InvalidKernel, "power-law exponent must be > 0, got {exponent}");
        ensure!(depth > 0.0, InvalidKernel, "depth must be > 0, got {depth}");
        ensure!(
            well_end > 0.0 && well_end.is_finite(),
            InvalidKernel,
            "well end must be finite and > 0, got {well_end}"
        );
        ensure!(barrier_width >= 0.0, InvalidKernel, "barrier width must be >= 0");
        check_tail(&tail, well_end + barrier_width)?;
        Ok(Self { exponent, depth, well_end, barrier_height, barrier_width, tail })
    }

    /// Pure well `r^p - d` on `[0, a]`, zero beyond.
    pub fn well_only(exponent: f64, depth: f64, well_end: f64) -> Result<Self> {
        Self::new(exponent, depth, well_end, 0.0, 0.0, Profile::Zero)
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= self.well_end {
            r.powf(self.exponent) - self.depth
        } else if r <= self.well_end + self.barrier_width {
            self.barrier_height
        } else {
            self.tail.eval(r)
        }
    }

    pub fn params(&self) -> WellBarrierParams {
        WellBarrierParams {
            depth: self.depth,
            well_width: self.depth.powf(1.0 / self.exponent).min(self.well_end),
            well_end: self.well_end,
            barrier_height: self.barrier_height,
            barrier_width: self.barrier_width,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedKernel {
    pub base: Box<Kernel>,
    pub r_cut: f64,
}

/// Any supported kernel.
#[derive(Clone, Debug, PartialEq)]
pub enum Kernel {
    WellBarrier(WellBarrierKernel),
    Toy(ToyKernel),
    PowerLaw(PowerLawKernel),
    Truncated(TruncatedKernel),
}

impl From<WellBarrierKernel> for Kernel {
    fn from(k: WellBarrierKernel) -> Self {
        Kernel::WellBarrier(k)
    }
}
impl From<ToyKernel> for Kernel {
    fn from(k: ToyKernel) -> Self {
        Kernel::Toy(k)
    }
}
impl From<PowerLawKernel> for Kernel {
    fn from(k: PowerLawKernel) -> Self {
        Kernel::PowerLaw(k)
    }
}
impl From<TruncatedKernel> for Kernel {
    fn from(k: TruncatedKernel) -> Self {
        Kernel::Truncated(k)
    }
}

impl Kernel {
    /// `K(r)` for `r >= 0`. Only the toy kernel can return `+∞`.
    pub fn eval(&self, r: f64) -> ExtReal {
        assert!(r >= 0.0, "kernel evaluated at negative distance {r}");
        match self {
            Kernel::WellBarrier(k) => ExtReal::Finite(k.eval(r)),
            Kernel::Toy(k) => k.eval(r),
            Kernel::PowerLaw(k) => ExtReal::Finite(k.eval(r)),
            Kernel::Truncated(t) => {
                if r <= t.r_cut {
                    t.base.eval(r)
                } else {
                    ExtReal::ZERO
                }
            }
        }
    }

    /// Value used for pairs of lattice cells with spacing `h`. Identical to
    /// [`Kernel::eval`] except for the toy kernel's shrunken forbidden band.
    pub fn grid_value(&self, r: f64, h: f64) -> ExtReal {
        match self {
            Kernel::Toy(k) => k.grid_value(r, h),
            Kernel::Truncated(t) => {
                if r <= t.r_cut * (1.0 + LATTICE_SNAP) {
                    t.base.grid_value(r, h)
                } else {
                    ExtReal::ZERO
                }
            }
            _ => self.eval(r),
        }
    }

    pub fn as_toy(&self) -> Option<&ToyKernel> {
        match self {
            Kernel::Toy(k) => Some(k),
            Kernel::Truncated(t) => t.base.as_toy(),
            _ => None,
        }
    }

    /// Shape parameters. For the toy kernel: `d = 1`, `w = a = 1`,
    /// `h_bar = +∞` (as `f64::INFINITY`), `W` = band width.
    pub fn params(&self) -> WellBarrierParams {
        match self {
            Kernel::WellBarrier(k) => k.params,
            Kernel::Toy(k) => WellBarrierParams {
                depth: 1.0,
                well_width: 1.0,
                well_end: 1.0,
                barrier_height: f64::INFINITY,
                barrier_width: k.w,
            },
            Kernel::PowerLaw(k) => k.params(),
            Kernel::Truncated(t) => t.base.params(),
        }
    }

    /// The barrier profile itself at `r`, on the closed interval `[a, a + W]`.
    pub fn barrier_profile_value(&self, r: f64) -> ExtReal {
        match self {
            Kernel::WellBarrier(k) => ExtReal::Finite(k.barrier.eval(r)),
            Kernel::Toy(_) => ExtReal::PosInf,
            Kernel::PowerLaw(k) => ExtReal::Finite(k.barrier_height),
            Kernel::Truncated(t) => t.base.barrier_profile_value(r),
        }
    }

    /// Well depth `d`; `K >= -d` everywhere.
    pub fn depth(&self) -> f64 {
        self.params().depth
    }

    /// Radius beyond which the kernel vanishes identically, if any.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            Kernel::Toy(k) => Some(1.0 + k.w),
            Kernel::Truncated(t) => Some(t.base.support_radius().map_or(t.r_cut, |r| r.min(t.r_cut))),
            Kernel::WellBarrier(k) => (k.tail == Profile::Zero).then(|| k.params.barrier_end()),
            Kernel::PowerLaw(k) => (k.tail == Profile::Zero).then(|| k.well_end + k.barrier_width),
        }
    }

    /// Radii where the kernel may be discontinuous or non-smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = match self {
            Kernel::Toy(k) => vec![1.0, 1.0 + k.w],
            Kernel::Truncated(t) => {
                let mut b = t.base.breakpoints();
                b.push(t.r_cut);
                b
            }
            _ => {
                let p = self.params();
                vec![p.well_width, p.well_end, p.barrier_end()]
            }
        };
        pts.retain(|r| r.is_finite() && *r > 0.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `sup_{r >= radius} K(r)`, sampled on a log grid out to `2^40 · radius`
    /// together with the breakpoints and their one-sided neighbours.
    pub fn sup_beyond(&self, radius: f64) -> ExtReal {
        assert!(radius >= 0.0);
        let mut best = self.eval(radius);
        if let Some(rs) = self.support_radius() {
            if radius > rs {
                return ExtReal::ZERO.max(best);
            }
        }
        let start = radius.max(1e-6);
        let samples = 4000;
        for i in 0..=samples {
            let r = start * 2f64.powf(40.0 * i as f64 / samples as f64);
            best = best.max(self.eval(r));
        }
        for b in self.breakpoints() {
            for r in [b, b * (1.0 + 1e-12)] {
                if r >= radius {
                    best = best.max(self.eval(r));
                }
            }
        }
        best
    }
}

fn check_tail(tail: &Profile, from: f64) -> Result<()> {
    for i in 1..=64 {
        let r = from * (1.0 + i as f64 / 8.0) + 1e-9;
        let v = tail.eval(r);
        ensure!(v.is_finite(), InvalidKernel, "tail profile is not finite at r = {r}");
    }
    Ok(())
}

/// Builds a well-barrier kernel. Checks parameter ranges and that each profile
/// is finite on its domain with `well(0) = -d`; does not check (K4)/(K5).
pub fn make_well_barrier(
    params: WellBarrierParams,
    well: Profile,
    barrier: Profile,
    tail: Profile,
) -> Result<WellBarrierKernel> {
    let WellBarrierParams { depth, well_width, well_end, barrier_height, barrier_width } = params;
    ensure!(depth > 0.0, InvalidKernel, "depth must be > 0, got {depth}");
    ensure!(well_width >= 0.0, InvalidKernel, "well width must be >= 0, got {well_width}");
    ensure!(well_end > 0.0 && well_end.is_finite(), InvalidKernel, "well end must be finite and > 0");
    ensure!(barrier_height > 0.0, InvalidKernel, "barrier height must be > 0");
    ensure!(barrier_width > 0.0 && barrier_width.is_finite(), InvalidKernel, "barrier width must be finite and > 0");

    let at_zero = well.eval(0.0);
    ensure!(
        at_zero.is_finite() && (at_zero + depth).abs() <= 1e-12 * depth.max(1.0),
        InvalidKernel,
        "well profile must equal -d = {} at r = 0, got {at_zero}",
        -depth
    );
    for i in 0..=256 {
        let r = well_end * i as f64 / 256.0;
        ensure!(well.eval(r).is_finite(), InvalidKernel, "well profile not finite at r = {r}");
        let rb = well_end + barrier_width * i as f64 / 256.0;
        ensure!(barrier.eval(rb).is_finite(), InvalidKernel, "barrier profile not finite at r = {rb}");
    }
    check_tail(&tail, well_end + barrier_width)?;
    Ok(WellBarrierKernel { params, well, barrier, tail })
}

/// Truncates `kernel` to `[0, r_cut]`. `r_cut` must not cut into the barrier.
pub fn truncate_kernel(kernel: &Kernel, r_cut: f64) -> Result<TruncatedKernel> {
    let end = kernel.params().barrier_end();
    ensure!(
        r_cut >= end,
        InvalidKernel,
        "truncation radius {r_cut} is inside the barrier (a + W = {end})"
    );
    Ok(TruncatedKernel { base: Box::new(kernel.clone()), r_cut })
}

/// Outcome of one structural condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<ConditionCheck>,
}

impl ValidationReport {
    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(ConditionCheck { name: name.to_string(), passed, detail });
    }

    pub fn get(&self, name: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.get(name).is_some_and(|c| c.passed)
    }

    /// True when (K1)–(K5) and the well-width cross-check all pass. The
    /// structural flag is reported separately.
    pub fn all_passed(&self) -> bool {
        self.checks.iter().filter(|c| c.name != STRUCTURAL).all(|c| c.passed)
    }
}

pub const K1: &str = "K1";
pub const K2: &str = "K2";
pub const K3: &str = "K3";
pub const K4: &str = "K4";
pub const K5: &str = "K5";
pub const STRUCTURAL: &str = "structural";
pub const WELL_WIDTH: &str = "well-width";

/// Checks (K1)–(K5), the structural flag `a + w <= W - 2w` and the
/// consistency of the supplied well width. Monotonicity of the well and the
/// barrier lower bound are sampled on `resolution` uniform points.
pub fn validate_kernel(kernel: &Kernel, resolution: usize, tol: f64) -> ValidationReport {
    let p = kernel.params();
    let mut report = ValidationReport::default();
    let n = resolution.max(2);
    let eval = |r: f64| kernel.eval(r);

    // K1: attractive at the origin, non-decreasing well.
    let k0 = eval(0.0);
    let mut monotone = true;
    let mut prev = k0;
    let mut first_drop = None;
    for i in 1..=n {
        let r = p.well_end * i as f64 / n as f64;
        let v = eval(r);
        if v < prev {
            monotone = false;
            first_drop.get_or_insert(r);
        }
        prev = v;
    }
    let origin_ok = k0 == ExtReal::Finite(-p.depth) && p.depth > 0.0;
    report.push(
        K1,
        origin_ok && monotone,
        match first_drop {
            Some(r) => format!("K(0) = {k0}; well decreases near r = {r}"),
            None => format!("K(0) = {k0}; well non-decreasing on {n} samples"),
        },
    );

    // K2: barrier bounded below by h_bar.
    let mut barrier_min = ExtReal::PosInf;
    for i in 0..=n {
        let r = p.well_end + p.barrier_width * i as f64 / n as f64;
        let v = kernel.barrier_profile_value(r);
        if v < barrier_min {
            barrier_min = v;
        }
    }
    report.push(
        K2,
        barrier_min >= ExtReal::Finite(p.barrier_height),
        format!("min over barrier = {barrier_min}, h_bar = {}", p.barrier_height),
    );

    // K3: non-negative tail whose envelope decays to zero.
    let start = p.barrier_end();
    let mut tail_nonneg = true;
    for i in 1..=n {
        let r = start * (1.0 + 8.0 * i as f64 / n as f64);
        if eval(r) < ExtReal::ZERO {
            tail_nonneg = false;
        }
    }
    let mut envelope = Vec::new();
    let mut radius = start.max(1.0);
    for _ in 0..24 {
        envelope.push(kernel.sup_beyond(radius * (1.0 + 1e-12)));
        radius *= 2.0;
    }
    let envelope_monotone = envelope.windows(2).all(|w| w[1] <= w[0]);
    let last = *envelope.last().unwrap();
    let decays = last <= ExtReal::Finite(tol.max(1e-6));
    report.push(
        K3,
        tail_nonneg && envelope_monotone && decays,
        format!("tail >= 0: {tail_nonneg}; sup beyond 2^23·(a+W) = {last}"),
    );

    report.push(
        K4,
        p.depth < p.barrier_height,
        format!("d = {} vs h_bar = {}", p.depth, p.barrier_height),
    );
    report.push(
        K5,
        2.0 * p.well_width < p.barrier_width,
        format!("2w = {} vs W = {}", 2.0 * p.well_width, p.barrier_width),
    );
    report.push(
        STRUCTURAL,
        p.well_end + p.well_width <= p.barrier_width - 2.0 * p.well_width,
        format!(
            "a + w = {} vs W - 2w = {}",
            p.well_end + p.well_width,
            p.barrier_width - 2.0 * p.well_width
        ),
    );

    // Well width: K(w) ≈ 0, or the sign change is bracketed around w.
    let w = p.well_width;
    let delta = (p.well_end / n as f64).max(1e-12);
    let kw = eval(w);
    let near_zero = kw.finite().is_some_and(|v| v.abs() <= tol);
    let below = eval((w - delta).max(0.0));
    let above = eval(w + delta);
    let bracketed = below <= ExtReal::ZERO && above > ExtReal::ZERO;
    report.push(
        WELL_WIDTH,
        near_zero || bracketed,
        format!("K(w) = {kw}, K(w-δ) = {below}, K(w+δ) = {above}"),
    );
    report
}

// ---------------------------------------------------------------------------
// Text configuration
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    WellBarrier,
    Toy,
    PowerLaw,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum WellProfile {
    /// `-d + slope · r`
    Linear { slope: f64 },
    /// `-d + coef · r^exponent`
    Power {
        exponent: f64,
        #[serde(default = "one")]
        coef: f64,
    },
    /// Flat well at `-d`.
    Constant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum BarrierProfile {
    /// Constant barrier; `value` defaults to the barrier height.
    Constant {
        #[serde(default)]
        value: Option<f64>,
    },
    /// `height + slope · (r - a)`
    Linear { slope: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum TailProfile {
    /// `c / r^q`
    InversePower { c: f64, q: f64 },
    /// Identically zero past the barrier.
    Compact,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WellSection {
    pub depth: f64,
    /// Required for `well-barrier`; derived as `d^{1/p}` for `power-law`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    pub end: f64,
    #[serde(flatten)]
    pub profile: WellProfile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierSection {
    pub height: f64,
    pub width: f64,
    #[serde(flatten)]
    pub profile: BarrierProfile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailSection {
    #[serde(flatten)]
    pub profile: TailProfile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToySection {
    pub w: f64,
}

/// Key/value kernel description with `[well]`, `[barrier]`, `[tail]` (or
/// `[toy]`) sections, read from TOML.
///
/// ```toml
/// kind = "well-barrier"
/// [well]
/// depth = 1.0
/// width = 0.5
/// end = 1.0
/// profile = "linear"
/// slope = 2.0
/// [barrier]
/// height = 2.0
/// width = 2.0
/// profile = "constant"
/// [tail]
/// profile = "inverse-power"
/// c = 0.1
/// q = 2.0
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub kind: KernelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toy: Option<ToySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub well: Option<WellSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barrier: Option<BarrierSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailSection>,
}

impl KernelConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("kernel config is always serializable")
    }

    pub fn build(&self) -> Result<Kernel> {
        let base: Kernel = match self.kind {
            KernelKind::Toy => {
                let toy = self.toy.as_ref().ok_or_else(|| missing("toy"))?;
                ToyKernel::new(toy.w)?.into()
            }
            KernelKind::WellBarrier => {
                let well = self.well.as_ref().ok_or_else(|| missing("well"))?;
                let barrier = self.barrier.as_ref().ok_or_else(|| missing("barrier"))?;
                let width = well
                    .width
                    .ok_or_else(|| Error::Parse("[well] width is required for well-barrier kernels".into()))?;
                let params = WellBarrierParams {
                    depth: well.depth,
                    well_width: width,
                    well_end: well.end,
                    barrier_height: barrier.height,
                    barrier_width: barrier.width,
                };
                let well_profile = match well.profile {
                    WellProfile::Linear { slope } => Profile::Linear { intercept: -well.depth, slope },
                    WellProfile::Power { exponent, coef } => {
                        Profile::Power { offset: -well.depth, coef, exponent }
                    }
                    WellProfile::Constant => Profile::Constant { value: -well.depth },
                };
                let barrier_profile = match barrier.profile {
                    BarrierProfile::Constant { value } => Profile::Constant { value: value.unwrap_or(barrier.height) },
                    BarrierProfile::Linear { slope } => Profile::Linear {
                        intercept: barrier.height - slope * well.end,
                        slope,
                    },
                };
                make_well_barrier(params, well_profile, barrier_profile, self.tail_profile())?.into()
            }
            KernelKind::PowerLaw => {
                let well = self.well.as_ref().ok_or_else(|| missing("well"))?;
                let exponent = match well.profile {
                    WellProfile::Power { exponent, coef } if coef == 1.0 => exponent,
                    _ => {
                        return Err(Error::Parse(
                            "power-law kernels need [well] profile = \"power\" with coef = 1".into(),
                        ))
                    }
                };
                let (height, width) = match &self.barrier {
                    Some(b) => (b.height, b.width),
                    None => (0.0, 0.0),
                };
                PowerLawKernel::new(exponent, well.depth, well.end, height, width, self.tail_profile())?.into()
            }
        };
        match self.truncate {
            Some(r_cut) => Ok(truncate_kernel(&base, r_cut)?.into()),
            None => Ok(base),
        }
    }

    fn tail_profile(&self) -> Profile {
        match self.tail.as_ref().map(|t| &t.profile) {
            Some(TailProfile::InversePower { c, q }) => Profile::InversePower { c: *c, q: *q },
            Some(TailProfile::Compact) | None => Profile::Zero,
        }
    }

    /// Inverse of [`KernelConfig::build`] for kernels whose profiles have a
    /// tagged form.
    pub fn from_kernel(kernel: &Kernel) -> Result<Self> {
        let unsupported = || Error::InvalidKernel("profile has no tagged configuration form".into());
        let tail_of = |p: &Profile| -> Result<Option<TailSection>> {
            Ok(Some(TailSection {
                profile: match *p {
                    Profile::Zero => TailProfile::Compact,
                    Profile::InversePower { c, q } => TailProfile::InversePower { c, q },
                    _ => return Err(unsupported()),
                },
            }))
        };
        match kernel {
            Kernel::Toy(k) => Ok(Self {
                kind: KernelKind::Toy,
                truncate: None,
                toy: Some(ToySection { w: k.w }),
                well: None,
                barrier: None,
                tail: None,
            }),
            Kernel::Truncated(t) => {
                let mut cfg = Self::from_kernel(&t.base)?;
                cfg.truncate = Some(t.r_cut);
                Ok(cfg)
            }
            Kernel::PowerLaw(k) => Ok(Self {
                kind: KernelKind::PowerLaw,
                truncate: None,
                toy: None,
                well: Some(WellSection {
                    depth: k.depth,
                    width: None,
                    end: k.well_end,
                    profile: WellProfile::Power { exponent: k.exponent, coef: 1.0 },
                }),
                barrier: Some(BarrierSection {
                    height: k.barrier_height,
                    width: k.barrier_width,
                    profile: BarrierProfile::Constant { value: None },
                }),
                tail: tail_of(&k.tail)?,
            }),
            Kernel::WellBarrier(k) => {
                let p = k.params;
                let well = match k.well {
                    Profile::Linear { slope, .. } => WellProfile::Linear { slope },
                    Profile::Power { coef, exponent, .. } => WellProfile::Power { exponent, coef },
                    Profile::Constant { .. } => WellProfile::Constant,
                    _ => return Err(unsupported()),
                };
                let barrier = match k.barrier {
                    Profile::Constant { value } => BarrierProfile::Constant {
                        value: (value != p.barrier_height).then_some(value),
                    },
                    Profile::Linear { slope, .. } => BarrierProfile::Linear { slope },
                    _ => return Err(unsupported()),
                };
                Ok(Self {
                    kind: KernelKind::WellBarrier,
                    truncate: None,
                    toy: None,
                    well: Some(WellSection {
                        depth: p.depth,
                        width: Some(p.well_width),
                        end: p.well_end,
                        profile: well,
                    }),
                    barrier: Some(BarrierSection {
                        height: p.barrier_height,
                        width: p.barrier_width,
                        profile: barrier,
                    }),
                    tail: tail_of(&k.tail)?,
                })
            }
        }
    }
}

fn missing(section: &str) -> Error {
    Error::Parse(format!("missing [{section}] section"))
}

/// Reads and builds a kernel from a TOML file.
pub fn load_kernel(path: &std::path::Path) -> Result<Kernel> {
    let text = std::fs::read_to_string(path)?;
    KernelConfig::from_toml(&text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_kernel(d: f64, w: f64, a: f64, h: f64, big_w: f64) -> WellBarrierKernel {
        make_well_barrier(
            WellBarrierParams { depth: d, well_width: w, well_end: a, barrier_height: h, barrier_width: big_w },
            Profile::Linear { intercept: -d, slope: d / w },
            Profile::Constant { value: h },
            Profile::Zero,
        )
        .unwrap()
    }

    #[test]
    fn linear_well_barrier_values() {
        let k = Kernel::from(linear_kernel(1.0, 0.5, 1.0, 2.0, 2.0));
        assert_eq!(k.eval(0.0), ExtReal::Finite(-1.0));
        assert_eq!(k.eval(0.5), ExtReal::ZERO);
        assert_eq!(k.eval(2.0), ExtReal::Finite(2.0));
        assert_eq!(k.eval(3.5), ExtReal::ZERO);
    }

    #[test]
    fn toy_kernel_three_branches() {
        let k = Kernel::from(ToyKernel::new(0.5).unwrap());
        assert_eq!(k.eval(0.5), ExtReal::Finite(-1.0));
        assert_eq!(k.eval(1.0), ExtReal::Finite(-1.0));
        assert_eq!(k.eval(1.0 + 1e-15), ExtReal::PosInf);
        assert_eq!(k.eval(1.1), ExtReal::PosInf);
        assert_eq!(k.eval(1.2), ExtReal::PosInf);
        assert_eq!(k.eval(1.5), ExtReal::ZERO);
        assert_eq!(k.eval(3.0), ExtReal::ZERO);
    }

    #[test]
    fn toy_kernel_w_zero_has_no_band() {
        let k = ToyKernel::new(0.0).unwrap();
        assert_eq!(k.eval(1.0), ExtReal::Finite(-1.0));
        assert_eq!(k.eval(1.0 + 1e-12), ExtReal::ZERO);
        assert_eq!(k.grid_value(1.2, 0.1), ExtReal::ZERO);
    }

    #[test]
    fn toy_grid_band_is_shrunk_by_half_cell() {
        let k = ToyKernel::new(1.5).unwrap();
        // band on the lattice with h = 0.5 is (1.25, 2.25)
        assert_eq!(k.grid_value(1.0, 0.5), ExtReal::Finite(-1.0));
        assert_eq!(k.grid_value(1.25, 0.5), ExtReal::ZERO);
        assert_eq!(k.grid_value(1.5, 0.5), ExtReal::PosInf);
        assert_eq!(k.grid_value(2.0, 0.5), ExtReal::PosInf);
        assert_eq!(k.grid_value(2.5, 0.5), ExtReal::ZERO);
    }

    #[test]
    fn power_law_values() {
        let k = Kernel::from(PowerLawKernel::well_only(2.0, 1.0, 1.0).unwrap());
        assert_eq!(k.eval(0.5), ExtReal::Finite(-0.75));
        assert_eq!(k.eval(0.0), ExtReal::Finite(-1.0));
        assert_eq!(k.params().well_width, 1.0);
        let deep = PowerLawKernel::well_only(2.0, 0.25, 2.0).unwrap();
        assert_eq!(deep.params().well_width, 0.5);
    }

    #[test]
    #[should_panic(expected = "negative distance")]
    fn negative_distance_is_a_bug() {
        Kernel::from(ToyKernel::new(0.5).unwrap()).eval(-0.1);
    }

    #[test]
    fn malformed_profiles_rejected() {
        let params = WellBarrierParams {
            depth: 1.0,
            well_width: 0.5,
            well_end: 1.0,
            barrier_height: 2.0,
            barrier_width: 2.0,
        };
        // singular at the origin
        assert!(make_well_barrier(params, Profile::InversePower { c: 1.0, q: 1.0 }, Profile::Constant { value: 2.0 }, Profile::Zero).is_err());
        // wrong value at the origin
        assert!(make_well_barrier(params, Profile::Linear { intercept: -2.0, slope: 4.0 }, Profile::Constant { value: 2.0 }, Profile::Zero).is_err());
        // bad depth
        let bad = WellBarrierParams { depth: 0.0, ..params };
        assert!(make_well_barrier(bad, Profile::Constant { value: 0.0 }, Profile::Constant { value: 2.0 }, Profile::Zero).is_err());
    }

    #[test]
    fn validation_examples() {
        let ok = validate_kernel(&linear_kernel(1.0, 0.5, 1.0, 2.0, 2.0).into(), 10_000, 1e-9);
        assert!(ok.all_passed(), "{ok:?}");

        let k4 = validate_kernel(&linear_kernel(2.0, 0.5, 1.0, 1.0, 2.0).into(), 10_000, 1e-9);
        assert!(!k4.passed(K4));
        assert!(k4.passed(K5));

        let k5 = validate_kernel(&linear_kernel(1.0, 1.0, 1.0, 2.0, 1.5).into(), 10_000, 1e-9);
        assert!(!k5.passed(K5));
        assert!(k5.passed(K4));
    }

    #[test]
    fn validation_catches_decreasing_well_and_bad_width() {
        let params = WellBarrierParams {
            depth: 1.0,
            well_width: 0.3,
            well_end: 1.0,
            barrier_height: 2.0,
            barrier_width: 3.0,
        };
        let k = make_well_barrier(
            params,
            Profile::Power { offset: -1.0, coef: -1.0, exponent: 2.0 },
            Profile::Constant { value: 2.0 },
            Profile::Zero,
        )
        .unwrap();
        let rep = validate_kernel(&k.into(), 1000, 1e-9);
        assert!(!rep.passed(K1));
        assert!(!rep.passed(WELL_WIDTH));
    }

    #[test]
    fn validation_of_tails() {
        let params = WellBarrierParams {
            depth: 1.0,
            well_width: 0.5,
            well_end: 1.0,
            barrier_height: 2.0,
            barrier_width: 2.0,
        };
        let decaying = make_well_barrier(
            params,
            Profile::Linear { intercept: -1.0, slope: 2.0 },
            Profile::Constant { value: 2.0 },
            Profile::InversePower { c: 0.1, q: 2.0 },
        )
        .unwrap();
        assert!(validate_kernel(&decaying.into(), 1000, 1e-9).passed(K3));
        let stuck = make_well_barrier(
            params,
            Profile::Linear { intercept: -1.0, slope: 2.0 },
            Profile::Constant { value: 2.0 },
            Profile::Constant { value: 0.5 },
        )
        .unwrap();
        assert!(!validate_kernel(&stuck.into(), 1000, 1e-9).passed(K3));
        let negative = make_well_barrier(
            params,
            Profile::Linear { intercept: -1.0, slope: 2.0 },
            Profile::Constant { value: 2.0 },
            Profile::InversePower { c: -0.1, q: 2.0 },
        )
        .unwrap();
        assert!(!validate_kernel(&negative.into(), 1000, 1e-9).passed(K3));
    }

    #[test]
    fn structural_flag() {
        // a + w = 1.5 <= W - 2w = 4 - 1
        let rep = validate_kernel(&linear_kernel(1.0, 0.5, 1.0, 2.0, 4.0).into(), 1000, 1e-9);
        assert!(rep.passed(STRUCTURAL));
        let rep = validate_kernel(&linear_kernel(1.0, 0.5, 1.0, 2.0, 2.0).into(), 1000, 1e-9);
        assert!(!rep.passed(STRUCTURAL));
    }

    #[test]
    fn truncation_examples() {
        let base = make_well_barrier(
            WellBarrierParams { depth: 1.0, well_width: 0.5, well_end: 1.0, barrier_height: 2.0, barrier_width: 4.0 },
            Profile::Linear { intercept: -1.0, slope: 2.0 },
            Profile::Constant { value: 2.0 },
            Profile::InversePower { c: 0.5, q: 2.0 },
        )
        .unwrap();
        let base = Kernel::from(base);
        let t = Kernel::from(truncate_kernel(&base, 5.0).unwrap());
        assert_eq!(t.eval(6.0), ExtReal::ZERO);
        assert_eq!(t.eval(4.0), base.eval(4.0));
        assert_eq!(t.eval(5.0), base.eval(5.0));
        for i in 0..1000 {
            let r = 12.0 * i as f64 / 999.0;
            assert!(t.eval(r) <= base.eval(r));
        }
        assert!(truncate_kernel(&base, 4.0).is_err());
        assert_eq!(t.support_radius(), Some(5.0));
    }

    #[test]
    fn sup_beyond_decreasing_tail() {
        let k = Kernel::from(
            PowerLawKernel::new(2.0, 1.0, 2.0, 4.0, 5.0, Profile::InversePower { c: 0.1, q: 2.0 }).unwrap(),
        );
        let s = k.sup_beyond(8.95).finite().unwrap();
        assert!((s - 0.1 / 8.95f64.powi(2)).abs() < 1e-15);
        // reaching back into the barrier picks up its height
        assert_eq!(k.sup_beyond(3.0), ExtReal::Finite(4.0));
        let toy = Kernel::from(ToyKernel::new(0.5).unwrap());
        assert_eq!(toy.sup_beyond(1.2), ExtReal::PosInf);
        assert_eq!(toy.sup_beyond(2.0), ExtReal::ZERO);
    }

    #[test]
    fn config_round_trip_through_toml() {
        let text = r#"
kind = "well-barrier"
truncate = 5.0

[well]
depth = 1.0
width = 0.5
end = 1.0
profile = "linear"
slope = 2.0

[barrier]
height = 2.0
width = 2.0
profile = "constant"

[tail]
profile = "inverse-power"
c = 0.1
q = 2.0
"#;
        let cfg = KernelConfig::from_toml(text).unwrap();
        let k = cfg.build().unwrap();
        assert_eq!(k.eval(0.25), ExtReal::Finite(-0.5));
        assert_eq!(k.eval(2.0), ExtReal::Finite(2.0));
        assert_eq!(k.eval(4.0), ExtReal::Finite(0.1 / 16.0));
        assert_eq!(k.eval(5.5), ExtReal::ZERO);
        let again = KernelConfig::from_kernel(&k).unwrap();
        assert_eq!(again, cfg);
        let reparsed = KernelConfig::from_toml(&again.to_toml()).unwrap().build().unwrap();
        assert_eq!(reparsed, k);
    }

    #[test]
    fn config_toy_and_power_law() {
        let toy = KernelConfig::from_toml("kind = \"toy\"\n[toy]\nw = 0.5\n").unwrap().build().unwrap();
        assert_eq!(toy.eval(1.2), ExtReal::PosInf);
        let pl = KernelConfig::from_toml(
            "kind = \"power-law\"\n[well]\ndepth = 1.0\nend = 2.0\nprofile = \"power\"\nexponent = 2.0\n\
             [barrier]\nheight = 4.0\nwidth = 5.0\nprofile = \"constant\"\n[tail]\nprofile = \"compact\"\n",
        )
        .unwrap()
        .build()
        .unwrap();
        assert_eq!(pl.eval(1.0), ExtReal::Finite(0.0));
        assert_eq!(pl.eval(3.0), ExtReal::Finite(4.0));
        assert_eq!(pl.support_radius(), Some(7.0));
        assert!(KernelConfig::from_toml("kind = \"toy\"\n").unwrap().build().is_err());
        assert!(KernelConfig::from_toml("kind = \"triangle\"\n").is_err());
    }
}
