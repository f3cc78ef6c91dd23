//! Grid energy, multiplier residuals and separation check for sampled balls.

use wblab::densities::{from_droplets_padded, Ball, DropletConfig};
use wblab::energy::{droplet_energy, el_check, interaction_energy, separation_check};
use wblab::kernels::{Kernel, PowerLawKernel, Profile};

fn main() -> wblab::Result<()> {
    let strong: Kernel = PowerLawKernel::new(2.0, 1.0, 2.0, 4.0, 5.0, Profile::Zero)?.into();
    let weak: Kernel = PowerLawKernel::new(2.0, 1.0, 2.0, 0.05, 5.0, Profile::Zero)?.into();

    let cases = [
        ("single ball, m=0.5", &strong, vec![Ball::new(vec![0.0], 0.25)]),
        ("two halves inside the well", &strong, vec![Ball::new(vec![-0.5], 0.125), Ball::new(vec![0.5], 0.125)]),
        ("two balls in the band, weak barrier", &weak, vec![Ball::new(vec![0.0], 0.5), Ball::new(vec![4.5], 0.5)]),
    ];
    for (name, kernel, balls) in cases {
        let config = DropletConfig::new(balls)?;
        let grid = from_droplets_padded(&config, 0.01, 150)?;
        let e = interaction_energy(kernel, &grid);
        let exact = droplet_energy(kernel, &config);
        let el = el_check(kernel, &grid, 1e-9)?;
        let sep = separation_check(kernel, &grid, 0.0);
        println!("{name}");
        println!("  energy: grid {} exact {exact}", e.value);
        println!(
            "  lambda {:.6}, violations zero/one/partial set: {} / {} / {}",
            el.lambda, el.violations_on_zero_set, el.violations_on_one_set, el.violations_on_partial_set
        );
        println!("  separation band {:?}: {} offending pairs", sep.band, sep.offending_count);
    }
    Ok(())
}
