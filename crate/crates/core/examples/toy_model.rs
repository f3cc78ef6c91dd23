//! The toy kernel `-1` on `[0,1]`, `+∞` on `(1, 1+w)`, `0` beyond.
//!
//! Prints closed-form minimal energies with their witnesses, evaluates the
//! witnesses exactly, and compares against exhaustive grid search.

use wblab::energy::exact_interval_energy;
use wblab::kernels::ToyKernel;
use wblab::toy1d::{brute_force_min, toy_minimal_energy, w_zero_example, BruteMode, Witness};

fn main() -> wblab::Result<()> {
    println!("w = 0 example set, energy -1 - a^2:");
    for a in [0.25, 0.5, 0.75] {
        let (set, e) = w_zero_example(a)?;
        println!("  a={a}: E={e}  intervals {:?}", set.intervals());
    }

    println!("\nclosed-form minima:");
    for (m, w) in [(1.0, 0.5), (3.0, 0.5), (1.5, 1.5), (2.5, 1.5), (2.0, 0.0), (2.5, 0.0)] {
        let t = toy_minimal_energy(m, w, 1)?;
        let check = match &t.witness {
            Witness::Intervals(c) => exact_interval_energy(&ToyKernel::new(w)?, c).value.to_string(),
            Witness::Balls(_) => "-".into(),
        };
        let flag = if t.conjecture { " (conjectured)" } else { "" };
        println!("  m={m} w={w}: {:?} E={}{flag}, witness energy {check}", t.regime, t.value);
    }

    println!("\ngrid search on [0, L], w = 1.5:");
    for (length, h, m) in [(6.0, 0.5, 1.0), (8.0, 0.5, 2.0), (8.0, 0.5, 2.5)] {
        let r = brute_force_min(length, h, m, 1.5, BruteMode::Exhaustive, 1)?;
        let theory = toy_minimal_energy(m, 1.5, 1)?.value;
        let cells: Vec<usize> = r.density.occupied();
        println!("  L={length} h={h} m={m}: grid {} vs theory {theory}, cells {cells:?}", r.energy);
    }
    Ok(())
}
