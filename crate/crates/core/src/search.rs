//! Simulated annealing over `{0,1}`-valued grid densities, support
//! clustering, and far-apart droplet sequences.
//!
//! A state is a fixed number of occupied cells on a lattice. A move relocates
//! one occupied cell to an empty one, so the mass is an exact integer
//! invariant. The chain keeps `K*ρ` for every cell up to date, which makes a
//! proposal `O(1)` and an accepted move `O(cells in the kernel's reach)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::densities::{ball_radius, Ball, DropletConfig, GridDensity, Lattice};
use crate::droplets::PowerLawParams;
use crate::energy::{droplet_energy, el_check, interaction_energy, ElReport};
use crate::error::{ensure, Error, Result};
use crate::extended::ExtReal;
use crate::kernels::Kernel;
use crate::numeric::unit_ball_volume;

/// Restarts of the random initial placement before giving up.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    /// Initial temperature, in energy units.
    pub t0: f64,
    /// Temperature factor applied after each epoch.
    pub cooling: f64,
    pub epochs: usize,
    pub moves_per_epoch: usize,
    pub seed: u64,
}

impl AnnealSchedule {
    pub fn new(t0: f64, cooling: f64, epochs: usize, moves_per_epoch: usize, seed: u64) -> Result<Self> {
        ensure!(t0 > 0.0 && t0.is_finite(), InvalidParameter, "initial temperature must be positive, got {t0}");
        ensure!(cooling > 0.0 && cooling < 1.0, InvalidParameter, "cooling must lie in (0, 1), got {cooling}");
        Ok(Self { t0, cooling, epochs, moves_per_epoch, seed })
    }

    /// `T0 = d·m·h^N`, cooling 0.95, 200 epochs, 50 moves per occupied cell.
    pub fn default_for(kernel: &Kernel, m: f64, h: f64, dim: usize, seed: u64) -> Self {
        let cells = (m / h.powi(dim as i32)).round().max(1.0) as usize;
        Self {
            t0: kernel.depth() * m * h.powi(dim as i32),
            cooling: 0.95,
            epochs: 200,
            moves_per_epoch: 50 * cells,
            seed,
        }
    }
}

/// Axis-aligned search box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl DomainBox {
    pub fn cube(dim: usize, side: f64) -> Self {
        Self { lo: vec![-side / 2.0; dim], hi: vec![side / 2.0; dim] }
    }

    /// Cube of side `4 (m/|B_1|)^{1/N} + 2(a + W)` centered at the origin.
    pub fn default_for(kernel: &Kernel, m: f64, dim: usize) -> Self {
        let p = kernel.params();
        let reach = p.barrier_end();
        let reach = if reach.is_finite() { reach } else { 1.0 + p.barrier_width };
        let side = 4.0 * (m / unit_ball_volume(dim)).powf(1.0 / dim as f64) + 2.0 * reach;
        Self::cube(dim, side)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub epoch: usize,
    pub temperature: f64,
    pub best_energy: f64,
    pub current_energy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnealResult {
    /// Best state visited.
    pub density: GridDensity,
    /// Energy of `density`, recomputed from scratch.
    pub energy: f64,
    pub trace: Vec<TraceRow>,
    pub proposed: u64,
    pub accepted: u64,
    pub seed: u64,
}

impl AnnealResult {
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("epoch,temperature,best_energy,current_energy\n");
        for r in &self.trace {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e}\n",
                r.epoch, r.temperature, r.best_energy, r.current_energy
            ));
        }
        out
    }
}

/// Kernel values by lattice offset, `None` meaning `+∞`.
struct OffsetTable {
    span: [usize; 2],
    reach: [usize; 2],
    values: Vec<Option<f64>>,
}

impl OffsetTable {
    fn new(kernel: &Kernel, lattice: &Lattice) -> Self {
        let h = lattice.h;
        let n0 = lattice.shape[0];
        let n1 = if lattice.dim == 2 { lattice.shape[1] } else { 1 };
        let span = [2 * n0 - 1, 2 * n1 - 1];
        let mut values = Vec::with_capacity(span[0] * span[1]);
        for a in 0..span[0] {
            let di = (a as i64 - (n0 as i64 - 1)).unsigned_abs() as f64;
            for b in 0..span[1] {
                let dj = (b as i64 - (n1 as i64 - 1)).unsigned_abs() as f64;
                // same expression as Lattice::cell_distance
                let r = if lattice.dim == 1 { h * di } else { h * (di * di + dj * dj).sqrt() };
                values.push(kernel.grid_value(r, h).finite());
            }
        }
        let reach = match kernel.support_radius() {
            Some(rs) => {
                let cells = (rs / h).ceil() as usize + 1;
                [cells.min(n0 - 1), cells.min(n1 - 1)]
            }
            None => [n0 - 1, n1 - 1],
        };
        Self { span, reach, values }
    }

    fn get(&self, n: [usize; 2], a: [usize; 2], b: [usize; 2]) -> Option<f64> {
        let o0 = a[0] + n[0] - 1 - b[0];
        let o1 = a[1] + n[1] - 1 - b[1];
        self.values[o0 * self.span[1] + o1]
    }
}

struct Chain<'a> {
    lattice: &'a Lattice,
    table: OffsetTable,
    n: [usize; 2],
    vol: f64,
    k0: f64,
    occ: Vec<usize>,
    slot: Vec<usize>,
    phi: Vec<f64>,
    inf: Vec<u32>,
}

const EMPTY: usize = usize::MAX;

impl<'a> Chain<'a> {
    fn new(kernel: &Kernel, lattice: &'a Lattice) -> Self {
        let n = [lattice.shape[0], if lattice.dim == 2 { lattice.shape[1] } else { 1 }];
        let len = lattice.len();
        Self {
            lattice,
            table: OffsetTable::new(kernel, lattice),
            n,
            vol: lattice.cell_volume(),
            k0: kernel.grid_value(0.0, lattice.h).finite().expect("K(0) finite"),
            occ: Vec::new(),
            slot: vec![EMPTY; len],
            phi: vec![0.0; len],
            inf: vec![0; len],
        }
    }

    fn clear(&mut self) {
        self.occ.clear();
        self.slot.fill(EMPTY);
        self.phi.fill(0.0);
        self.inf.fill(0);
    }

    /// Adds (`sign = 1`) or removes (`sign = -1`) the contribution of cell `c`.
    fn update(&mut self, c: usize, sign: f64) {
        let mc = self.lattice.multi_index(c);
        let r = self.table.reach;
        let lo0 = mc[0].saturating_sub(r[0]);
        let hi0 = (mc[0] + r[0]).min(self.n[0] - 1);
        let lo1 = mc[1].saturating_sub(r[1]);
        let hi1 = (mc[1] + r[1]).min(self.n[1] - 1);
        for i in lo0..=hi0 {
            for j in lo1..=hi1 {
                let x = i * self.n[1] + j;
                match self.table.get(self.n, [i, j], mc) {
                    Some(k) => self.phi[x] += sign * self.vol * k,
                    None => {
                        if sign > 0.0 {
                            self.inf[x] += 1;
                        } else {
                            self.inf[x] -= 1;
                        }
                    }
                }
            }
        }
    }

    fn insert(&mut self, c: usize) {
        self.slot[c] = self.occ.len();
        self.occ.push(c);
        self.update(c, 1.0);
    }

    fn energy(&self) -> f64 {
        self.vol * self.occ.iter().map(|&c| self.phi[c]).sum::<f64>()
    }

    fn kernel_between(&self, s: usize, t: usize) -> Option<f64> {
        self.table.get(self.n, self.lattice.multi_index(t), self.lattice.multi_index(s))
    }

    /// Energy change of relocating `s` to `t`, or `None` if the result would
    /// contain a forbidden pair.
    fn delta(&self, s: usize, t: usize) -> Option<f64> {
        let kst = self.kernel_between(s, t);
        let blocking = self.inf[t] - u32::from(kst.is_none());
        if blocking > 0 {
            return None;
        }
        let kst = kst.unwrap_or(0.0);
        Some(2.0 * (self.vol * (self.phi[t] - self.phi[s]) - self.vol * self.vol * (kst - self.k0)))
    }

    fn relocate(&mut self, s: usize, t: usize) {
        let idx = self.slot[s];
        self.update(s, -1.0);
        self.slot[s] = EMPTY;
        self.occ[idx] = t;
        self.slot[t] = idx;
        self.update(t, 1.0);
    }

    /// Greedy random placement of `cells` cells avoiding forbidden pairs.
    fn place(&mut self, cells: usize, rng: &mut ChaCha8Rng) -> Result<()> {
        let len = self.lattice.len();
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            self.clear();
            let mut ok = true;
            for _ in 0..cells {
                let feasible: Vec<usize> = (0..len).filter(|&x| self.slot[x] == EMPTY && self.inf[x] == 0).collect();
                if feasible.is_empty() {
                    ok = false;
                    break;
                }
                let c = feasible[rng.random_range(0..feasible.len())];
                self.insert(c);
            }
            if ok {
                return Ok(());
            }
        }
        Err(Error::Infeasible(format!(
            "could not place {cells} cells without a forbidden pair after {MAX_PLACEMENT_ATTEMPTS} attempts"
        )))
    }
}

/// Anneals `cells` occupied cells on a fixed lattice.
pub fn anneal_on_lattice(kernel: &Kernel, lattice: &Lattice, cells: usize, schedule: &AnnealSchedule) -> Result<AnnealResult> {
    ensure!(cells >= 1, InvalidParameter, "at least one occupied cell is needed");
    ensure!(cells <= lattice.len(), InvalidParameter, "{cells} cells do not fit in a lattice of {}", lattice.len());
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);
    let mut chain = Chain::new(kernel, lattice);
    chain.place(cells, &mut rng)?;

    let len = lattice.len();
    let mut current = chain.energy();
    let mut best = current;
    let mut best_occ = chain.occ.clone();
    let mut temperature = schedule.t0;
    let mut trace = Vec::with_capacity(schedule.epochs);
    let (mut proposed, mut accepted) = (0u64, 0u64);
    let movable = cells < len;

    for epoch in 0..schedule.epochs {
        if movable {
            for _ in 0..schedule.moves_per_epoch {
                let s = chain.occ[rng.random_range(0..cells)];
                let t = loop {
                    let t = rng.random_range(0..len);
                    if chain.slot[t] == EMPTY {
                        break t;
                    }
                };
                proposed += 1;
                let Some(de) = chain.delta(s, t) else { continue };
                let accept = de <= 0.0 || rng.random::<f64>() < (-de / temperature).exp();
                if accept {
                    chain.relocate(s, t);
                    accepted += 1;
                    current += de;
                    if current < best {
                        best = current;
                        best_occ.clone_from(&chain.occ);
                    }
                }
            }
        }
        // resynchronise the running energy with the potentials
        current = chain.energy();
        if current < best {
            best = current;
            best_occ.clone_from(&chain.occ);
        }
        trace.push(TraceRow { epoch, temperature, best_energy: best, current_energy: current });
        temperature *= schedule.cooling;
    }

    best_occ.sort_unstable();
    let density = GridDensity::from_occupied(lattice.clone(), &best_occ)?;
    let energy = interaction_energy(kernel, &density)
        .value
        .finite()
        .expect("annealer only visits finite-energy states");
    Ok(AnnealResult { density, energy, trace, proposed, accepted, seed: schedule.seed })
}

/// Number of cells representing mass `m`; must be an integer to `1e-6`.
pub fn cell_count(m: f64, h: f64, dim: usize) -> Result<usize> {
    let c = m / h.powi(dim as i32);
    let r = c.round();
    ensure!(
        r >= 1.0 && (c - r).abs() <= 1e-6 * r.max(1.0),
        InvalidParameter,
        "mass {m} is not an integer number of cells of volume {} (got {c})",
        h.powi(dim as i32)
    );
    Ok(r as usize)
}

/// Anneals mass `m` inside `domain` on a lattice of spacing `h`.
pub fn anneal(kernel: &Kernel, m: f64, domain: &DomainBox, h: f64, schedule: &AnnealSchedule) -> Result<AnnealResult> {
    let cells = cell_count(m, h, domain.dim())?;
    let lattice = Lattice::covering(&domain.lo, &domain.hi, h, 0)?;
    anneal_on_lattice(kernel, &lattice, cells, schedule)
}

/// Independent chains with seeds `seed, seed + 1, ...` on a pool of
/// `workers` threads. The lowest energy wins; ties go to the earlier seed.
pub fn anneal_chains(
    kernel: &Kernel,
    m: f64,
    domain: &DomainBox,
    h: f64,
    schedule: &AnnealSchedule,
    chains: usize,
    workers: usize,
) -> Result<AnnealResult> {
    ensure!(chains >= 1, InvalidParameter, "at least one chain is needed");
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let results: Vec<Result<AnnealResult>> = pool.install(|| {
        (0..chains)
            .into_par_iter()
            .map(|i| {
                let s = AnnealSchedule { seed: schedule.seed.wrapping_add(i as u64), ..*schedule };
                anneal(kernel, m, domain, h, &s)
            })
            .collect()
    });
    let mut best: Option<AnnealResult> = None;
    for r in results {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.energy < b.energy) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one chain"))
}

/// Support clusters of a grid density.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterSet {
    /// Largest mass first.
    pub clusters: Vec<GridDensity>,
    pub masses: Vec<f64>,
    pub gap_threshold: f64,
}

impl ClusterSet {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn summary_json(&self) -> serde_json::Value {
        let centers: Vec<Vec<f64>> = self.clusters.iter().map(center_of_mass).collect();
        serde_json::json!({
            "count": self.clusters.len(),
            "gap_threshold": self.gap_threshold,
            "masses": self.masses,
            "centers": centers,
        })
    }
}

fn center_of_mass(d: &GridDensity) -> Vec<f64> {
    let l = d.lattice();
    let mut c = vec![0.0; l.dim];
    let mut total = 0.0;
    for i in d.occupied() {
        let x = l.center(i);
        let v = d.values()[i];
        for k in 0..l.dim {
            c[k] += v * x[k];
        }
        total += v;
    }
    c.iter().map(|x| x / total).collect()
}

/// Connected components of the occupied cells, two cells being adjacent
/// when their distance is at most `gap_threshold`.
pub fn cluster_decompose(density: &GridDensity, gap_threshold: f64) -> Result<ClusterSet> {
    ensure!(gap_threshold > 0.0, InvalidParameter, "gap threshold must be positive");
    let lattice = density.lattice();
    let occ = density.occupied();
    let mut label = vec![usize::MAX; occ.len()];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for start in 0..occ.len() {
        if label[start] != usize::MAX {
            continue;
        }
        let id = groups.len();
        label[start] = id;
        let mut members = vec![start];
        let mut stack = vec![start];
        while let Some(a) = stack.pop() {
            for b in 0..occ.len() {
                if label[b] == usize::MAX && lattice.cell_distance(occ[a], occ[b]) <= gap_threshold * (1.0 + 1e-12) {
                    label[b] = id;
                    members.push(b);
                    stack.push(b);
                }
            }
        }
        groups.push(members);
    }
    let mut clusters: Vec<GridDensity> = groups
        .into_iter()
        .map(|g| {
            let mut values = vec![0.0; lattice.len()];
            for a in g {
                values[occ[a]] = density.values()[occ[a]];
            }
            GridDensity::from_raw(lattice.clone(), values)
        })
        .collect::<Result<_>>()?;
    clusters.sort_by(|a, b| b.mass().total_cmp(&a.mass()));
    let masses = clusters.iter().map(GridDensity::mass).collect();
    Ok(ClusterSet { clusters, masses, gap_threshold })
}

/// Energies of far-apart droplet configurations against their limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceTrace {
    pub masses: Vec<f64>,
    pub separations: Vec<f64>,
    pub energies: Vec<f64>,
    /// `Σ g(m_i)`.
    pub limit: f64,
    /// `|E - limit|` per separation.
    pub gaps: Vec<f64>,
    /// `Σ_{i≠j} m_i m_j sup_{r >= D_ij - r_i - r_j} K(r)` per separation.
    pub bounds: Vec<f64>,
}

impl SequenceTrace {
    pub fn bounds_hold(&self) -> bool {
        self.gaps.iter().zip(&self.bounds).all(|(g, b)| *g <= *b + 1e-12)
    }

    pub fn monotone(&self) -> bool {
        self.gaps.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Places balls of the given masses with consecutive centers `D` apart
/// along the first axis, and compares their energy with `Σ g(m_i)`.
pub fn minimizing_sequence(
    params: &PowerLawParams,
    masses: &[f64],
    separations: &[f64],
    kernel: &Kernel,
) -> Result<SequenceTrace> {
    ensure!(!masses.is_empty() && masses.iter().all(|m| *m > 0.0), InvalidParameter, "masses must be positive");
    ensure!(separations.windows(2).all(|w| w[1] > w[0]), InvalidParameter, "separations must increase");
    let kp = kernel.params();
    let params = params.clone().with_well_end(kp.well_end)?;
    for &m in masses {
        crate::droplets::ball_energy_g(&params, m)?;
    }
    let n = params.n;
    let radii: Vec<f64> = masses.iter().map(|&m| ball_radius(m, n)).collect();
    let mut widest = 0.0f64;
    for i in 0..radii.len() {
        for j in i + 1..radii.len() {
            widest = widest.max(radii[i] + radii[j]);
        }
    }
    let limit: f64 = masses.iter().map(|&m| params.g(m)).sum();

    let mut energies = Vec::new();
    let mut gaps = Vec::new();
    let mut bounds = Vec::new();
    for &d in separations {
        ensure!(
            d >= widest + kp.barrier_end(),
            InvalidParameter,
            "separation {d} is below r_i + r_j + a + W = {}",
            widest + kp.barrier_end()
        );
        let balls: Vec<Ball> = radii
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let mut c = vec![0.0; n];
                c[0] = i as f64 * d;
                Ball::new(c, r)
            })
            .collect();
        let config = DropletConfig::new(balls.clone())?;
        let e = droplet_energy(kernel, &config)
            .finite()
            .ok_or_else(|| Error::InfiniteEnergy("droplet configuration".into()))?;
        let mut bound = 0.0;
        for i in 0..balls.len() {
            for j in 0..balls.len() {
                if i != j {
                    let dij = (i as f64 - j as f64).abs() * d;
                    let sup = kernel.sup_beyond(dij - radii[i] - radii[j]).to_f64();
                    bound += masses[i] * masses[j] * sup;
                }
            }
        }
        energies.push(e);
        gaps.push((e - limit).abs());
        bounds.push(bound);
    }
    Ok(SequenceTrace { masses: masses.to_vec(), separations: separations.to_vec(), energies, limit, gaps, bounds })
}

/// Multiplier-condition residuals of an annealed state.
pub fn el_residual_of_annealed(kernel: &Kernel, density: &GridDensity, tol: f64) -> Result<ElReport> {
    el_check(kernel, density, tol)
}

/// Grid energy of a density, `+∞` included.
pub fn state_energy(kernel: &Kernel, density: &GridDensity) -> ExtReal {
    interaction_energy(kernel, density).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::from_droplets_padded;
    use crate::energy::cross_energy;
    use crate::kernels::{truncate_kernel, PowerLawKernel, Profile, ToyKernel};

    fn barrier_kernel(tail: Profile) -> Kernel {
        PowerLawKernel::new(2.0, 1.0, 2.0, 4.0, 5.0, tail).unwrap().into()
    }

    fn truncated() -> Kernel {
        truncate_kernel(&barrier_kernel(Profile::Zero), 7.0).unwrap().into()
    }

    fn quick(seed: u64) -> AnnealSchedule {
        AnnealSchedule::new(0.05, 0.9, 40, 400, seed).unwrap()
    }

    #[test]
    fn incremental_energy_matches_recomputation() {
        let k = barrier_kernel(Profile::InversePower { c: 0.1, q: 2.0 });
        let lattice = Lattice::covering(&[-5.0], &[5.0], 0.1, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut chain = Chain::new(&k, &lattice);
        chain.place(12, &mut rng).unwrap();
        let mut e = chain.energy();
        for _ in 0..300 {
            let s = chain.occ[rng.random_range(0..12)];
            let t = rng.random_range(0..lattice.len());
            if chain.slot[t] != EMPTY {
                continue;
            }
            e += chain.delta(s, t).unwrap();
            chain.relocate(s, t);
        }
        let mut occ = chain.occ.clone();
        occ.sort_unstable();
        let exact = interaction_energy(&k, &GridDensity::from_occupied(lattice, &occ).unwrap()).value.finite().unwrap();
        assert!((e - exact).abs() < 1e-10, "{e} vs {exact}");
    }

    #[test]
    fn annealing_is_deterministic_and_conserves_mass() {
        let k = truncated();
        let dom = DomainBox::cube(1, 8.0);
        let a = anneal(&k, 1.0, &dom, 0.1, &quick(11)).unwrap();
        let b = anneal(&k, 1.0, &dom, 0.1, &quick(11)).unwrap();
        assert_eq!(a.density.to_text(), b.density.to_text());
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.density.occupied().len(), 10);
        assert!(a.trace.windows(2).all(|w| w[1].best_energy <= w[0].best_energy));
    }

    #[test]
    fn toy_states_never_contain_forbidden_pairs() {
        let k: Kernel = ToyKernel::new(1.5).unwrap().into();
        let lattice = Lattice::covering(&[0.0], &[8.0], 0.25, 0).unwrap();
        let r = anneal_on_lattice(&k, &lattice, 8, &quick(5)).unwrap();
        assert!(interaction_energy(&k, &r.density).value.is_finite());
        assert!(r.energy <= -1.5);
    }

    #[test]
    fn infeasible_placement_is_reported() {
        // the only pair distance, 3, sits in the grid band (2.5, 4.5)
        let k: Kernel = ToyKernel::new(5.0).unwrap().into();
        let lattice = Lattice::new(1, vec![0.0], 3.0, vec![2]).unwrap();
        let err = anneal_on_lattice(&k, &lattice, 2, &quick(1)).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }

    #[test]
    fn mass_must_be_whole_cells() {
        assert!(cell_count(1.05, 0.1, 1).is_err());
        assert_eq!(cell_count(2.1, 0.05, 1).unwrap(), 42);
    }

    #[test]
    fn clusters_of_two_far_balls() {
        let k = truncated();
        let cfg = DropletConfig::new(vec![Ball::new(vec![0.0], 0.5), Ball::new(vec![21.0], 0.5)]).unwrap();
        let g = from_droplets_padded(&cfg, 0.1, 2).unwrap();
        let cs = cluster_decompose(&g, 7.0).unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cross_energy(&k, &cs.clusters[0], &cs.clusters[1]).unwrap(), ExtReal::ZERO);
        let total: f64 = cs.masses.iter().sum();
        assert!((total - g.mass()).abs() < 1e-12);

        let one = DropletConfig::new(vec![Ball::new(vec![0.0], 0.5)]).unwrap();
        assert_eq!(cluster_decompose(&from_droplets_padded(&one, 0.1, 2).unwrap(), 7.0).unwrap().len(), 1);
    }

    #[test]
    fn sequence_with_decaying_tail() {
        let k = barrier_kernel(Profile::InversePower { c: 0.1, q: 2.0 });
        let p = PowerLawParams::new(1, 2.0, 1.0).unwrap();
        let tr = minimizing_sequence(&p, &[1.05, 1.05], &[10.0, 20.0, 40.0], &k).unwrap();
        assert!(tr.bounds_hold(), "{tr:?}");
        assert!(tr.monotone());
        assert!(tr.gaps[0] > 0.0);
        assert!(minimizing_sequence(&p, &[1.05, 1.05], &[5.0], &k).is_err());
    }

    #[test]
    fn sequence_with_compact_kernel_is_exact() {
        let p = PowerLawParams::new(1, 2.0, 1.0).unwrap();
        let tr = minimizing_sequence(&p, &[1.05, 1.05], &[9.0, 12.0], &truncated()).unwrap();
        for g in &tr.gaps {
            assert!(*g <= 1e-12, "{tr:?}");
        }
    }

    #[test]
    fn chains_pick_the_best_seed() {
        let k = truncated();
        let dom = DomainBox::cube(1, 8.0);
        let best = anneal_chains(&k, 1.0, &dom, 0.1, &quick(20), 3, 2).unwrap();
        for s in 20..23 {
            assert!(best.energy <= anneal(&k, 1.0, &dom, 0.1, &quick(s)).unwrap().energy);
        }
    }
}
