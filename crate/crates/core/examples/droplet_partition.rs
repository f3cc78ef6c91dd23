//! Droplet partitions for the well `r^p - d` in one dimension.

use wblab::droplets::{
    best_two_ball_split, c_np, linear_growth_limit, optimal_partition, split_thresholds, CnpMethod, PowerLawParams,
};

fn main() -> wblab::Result<()> {
    println!("C_1,2 = {}", c_np(1, 2.0, CnpMethod::ClosedForm)?);
    println!("C_2,2 = {} (quadrature), {} (Monte Carlo, 10^6)", c_np(2, 2.0, CnpMethod::ProductQuadrature)?, c_np(2, 2.0, CnpMethod::MonteCarlo { samples: 1_000_000, seed: 7 })?);

    let params = PowerLawParams::new(1, 2.0, 1.0)?;
    let th = split_thresholds(&params);
    let (m_star, slope) = linear_growth_limit(&params);
    println!("m0 = {}, m1 = {}, m* = {m_star}, lim E(m)/m = {slope}", th.m0, th.m1);

    for m in [1.5, 1.9, 2.5] {
        let (t, f) = best_two_ball_split(&params, m)?;
        println!("two-ball split of m={m}: t*={t:.6}, f={f:.6}, one ball {:.6}", params.g(m));
    }

    println!("\n    m   k  masses");
    for m in [0.5, 1.0, 2.1, 4.0, 7.3, 20.0] {
        let gm = optimal_partition(&params, m, None)?;
        let masses: Vec<String> = gm.masses.iter().map(|x| format!("{x:.4}")).collect();
        println!("{m:5} {:3}  [{}]  E={:.6}", gm.k, masses.join(", "), gm.total_energy);
    }
    Ok(())
}
