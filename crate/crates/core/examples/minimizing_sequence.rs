//! Two droplets drifting apart: the energy approaches `2 g(m)` at the rate of
//! the kernel tail, and exactly once they leave a compact support.

use wblab::droplets::PowerLawParams;
use wblab::kernels::{truncate_kernel, Kernel, PowerLawKernel, Profile};
use wblab::search::minimizing_sequence;

fn main() -> wblab::Result<()> {
    let params = PowerLawParams::new(1, 2.0, 1.0)?;
    let masses = [1.05, 1.05];
    let tailed: Kernel = PowerLawKernel::new(2.0, 1.0, 2.0, 4.0, 5.0, Profile::InversePower { c: 0.1, q: 2.0 })?.into();
    let seq = minimizing_sequence(&params, &masses, &[10.0, 20.0, 40.0, 80.0], &tailed)?;
    println!("limit 2 g(1.05) = {}", seq.limit);
    for ((d, gap), bound) in seq.separations.iter().zip(&seq.gaps).zip(&seq.bounds) {
        println!("  D={d:4}: gap {gap:.3e} <= bound {bound:.3e}");
    }
    println!("bounds hold: {}, monotone: {}", seq.bounds_hold(), seq.monotone());

    let truncated: Kernel = truncate_kernel(&PowerLawKernel::new(2.0, 1.0, 2.0, 4.0, 5.0, Profile::Zero)?.into(), 7.0)?.into();
    let cut = minimizing_sequence(&params, &masses, &[10.1, 15.0], &truncated)?;
    println!("truncated kernel gaps: {:?}", cut.gaps);
    Ok(())
}
