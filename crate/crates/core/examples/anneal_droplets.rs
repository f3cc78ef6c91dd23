//! Simulated annealing on a truncated power-law kernel with a barrier.
//!
//! Masses above the preferred droplet mass split into several clusters that
//! sit beyond the kernel's range of each other.

use wblab::droplets::{optimal_partition, PowerLawParams};
use wblab::kernels::{truncate_kernel, Kernel, PowerLawKernel, Profile};
use wblab::search::{anneal_chains, cluster_decompose, AnnealSchedule, DomainBox};

fn main() -> wblab::Result<()> {
    let base: Kernel = PowerLawKernel::new(2.0, 1.0, 2.0, 4.0, 5.0, Profile::Zero)?.into();
    let kernel: Kernel = truncate_kernel(&base, 7.0)?.into();
    let params = PowerLawParams::new(1, 2.0, 1.0)?.with_well_end(2.0)?;
    let h = 0.05;
    for m in [1.5, 2.1, 4.0] {
        let domain = DomainBox::default_for(&kernel, m, 1);
        let schedule = AnnealSchedule::default_for(&kernel, m, h, 1, 42);
        let r = anneal_chains(&kernel, m, &domain, h, &schedule, 4, 4)?;
        let clusters = cluster_decompose(&r.density, 7.0)?;
        let theory = optimal_partition(&params, m, None)?;
        println!(
            "m={m}: E={:.6} (best seed {}, accepted {}/{}), clusters {:?}; partition {:?} E={:.6}",
            r.energy, r.seed, r.accepted, r.proposed, clusters.masses, theory.masses, theory.total_energy
        );
    }
    Ok(())
}
