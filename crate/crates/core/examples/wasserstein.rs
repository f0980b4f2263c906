//! Wasserstein-1 distances between equal-weight point clouds.

use hkdelay::meanfield::{
    support_diameter, wasserstein1, wasserstein1_assignment, EmpiricalMeasure,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> hkdelay::Result<()> {
    let a = EmpiricalMeasure::new(vec![vec![0.0], vec![2.0]])?;
    let b = EmpiricalMeasure::new(vec![vec![1.0], vec![3.0]])?;
    println!("W1({{0, 2}}, {{1, 3}}) = {}", wasserstein1(&a, &b)?);

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut cloud = |n: usize, shift: f64| -> hkdelay::Result<EmpiricalMeasure> {
        EmpiricalMeasure::new(
            (0..n)
                .map(|_| vec![rng.gen_range(0.0..1.0) + shift, rng.gen_range(0.0..1.0)])
                .collect(),
        )
    };
    for shift in [0.0, 0.5, 1.0, 2.0] {
        let (p, q) = (cloud(64, 0.0)?, cloud(64, shift)?);
        println!(
            "planar clouds of 64 points, shift {shift}: W1 = {:.4}, diameters {:.3} / {:.3}",
            wasserstein1(&p, &q)?,
            support_diameter(&p)?,
            support_diameter(&q)?
        );
    }

    // sorted matching and the assignment solver agree on the line
    let line = |v: &[f64]| EmpiricalMeasure::new(v.iter().map(|&x| vec![x]).collect());
    let (p, q) = (line(&[0.3, -1.0, 4.0, 2.5])?, line(&[1.0, 1.0, -2.0, 0.0])?);
    println!(
        "sorted {} vs assignment {}",
        wasserstein1(&p, &q)?,
        wasserstein1_assignment(&p, &q)?
    );

    // two measures of different sizes compared through a common multiple
    let coarse = line(&[0.0, 1.0])?;
    let fine = line(&[0.0, 0.25, 0.5, 0.75, 1.0, 1.0])?;
    println!(
        "2 vs 6 points via replication: W1 = {:.4}",
        wasserstein1(&coarse.replicated(3), &fine)?
    );
    Ok(())
}
