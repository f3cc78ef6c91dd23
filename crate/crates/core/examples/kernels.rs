//! Builds the three kernel families, checks their structural conditions and
//! prints a few values. Also round-trips a kernel through its TOML form.
//!
//! Run with `cargo run --example kernels`.

use wblab::kernels::{
    make_well_barrier, truncate_kernel, validate_kernel, Kernel, KernelConfig, PowerLawKernel, Profile, ToyKernel,
    WellBarrierParams,
};

fn main() -> wblab::Result<()> {
    let linear: Kernel = make_well_barrier(
        WellBarrierParams { depth: 1.0, well_width: 0.5, well_end: 1.0, barrier_height: 2.0, barrier_width: 4.0 },
        Profile::Linear { intercept: -1.0, slope: 2.0 },
        Profile::Constant { value: 2.0 },
        Profile::InversePower { c: 0.1, q: 2.0 },
    )?
    .into();
    let power: Kernel = PowerLawKernel::new(2.0, 1.0, 2.0, 4.0, 5.0, Profile::Zero)?.into();
    let truncated: Kernel = truncate_kernel(&power, 7.0)?.into();
    let toy: Kernel = ToyKernel::new(1.5)?.into();

    for (name, k) in [("linear well", &linear), ("power law", &power), ("truncated", &truncated), ("toy w=1.5", &toy)] {
        let samples: Vec<String> = [0.0, 0.5, 1.2, 2.5, 8.0].iter().map(|&r| format!("K({r})={}", k.eval(r))).collect();
        println!("{name:12} {}", samples.join("  "));
        let report = validate_kernel(k, 2000, 1e-12);
        for c in &report.checks {
            println!("    {:10} {:5} {}", c.name, c.passed, c.detail);
        }
    }

    let cfg = KernelConfig::from_kernel(&linear)?;
    let text = cfg.to_toml();
    println!("\nTOML form of the linear-well kernel:\n{text}");
    let back = KernelConfig::from_toml(&text)?.build()?;
    assert_eq!(back, linear);
    Ok(())
}
