// Harnack constants from minimal harmonic functions, and the upper
// envelope of an increasing harmonic sequence.

use harmonica::dirichlet::{harnack_constant, monotone_envelope, solve_dirichlet, Envelope, DEFAULT_ENVELOPE_CAP};
use harmonica::space::{generate, Domain, ExtendedFunction, Geometry};

pub fn run_example() -> harmonica::Result<()> {
    let side = 7;
    let grid = generate(&Geometry::Grid2d(side))?;
    let whole = Domain::whole(&grid);
    for r in 0..3 {
        let k: Vec<usize> = (3 - r..=3 + r).flat_map(|i| (3 - r..=3 + r).map(move |j| i * side + j)).collect();
        let hc = harnack_constant(&grid, &k, &whole)?;
        println!(
            "K = {}x{} center square: C = {:.4}, attained by the exit column of {:?}",
            2 * r + 1,
            2 * r + 1,
            hc.constant,
            hc.boundary_point.map(|b| grid.id(b))
        );
    }

    let path = generate(&Geometry::Path(5))?;
    let u = Domain::whole(&path);
    let seq = |limit: fn(f64) -> f64| -> harmonica::Result<Vec<ExtendedFunction>> {
        (1..=6)
            .map(|j| {
                let t = limit(j as f64);
                solve_dirichlet(&path, &u, &ExtendedFunction::from_pairs([(0, t), (4, 1.0)])?)
            })
            .collect()
    };
    match monotone_envelope(&path, &seq(|j| 1.0 - 1.0 / j)?, &u, DEFAULT_ENVELOPE_CAP)? {
        Envelope::Harmonic { function, residual } => {
            println!("bounded sequence: envelope at 2 is {:.4}, residual {residual:.1e}", function.value(2)?)
        }
        Envelope::Diverges => println!("bounded sequence diverged"),
    }
    match monotone_envelope(&path, &seq(|j| 10f64.powf(2.0 * j))?, &u, DEFAULT_ENVELOPE_CAP)? {
        Envelope::Diverges => println!("unbounded sequence: diverges everywhere (Harnack dichotomy)"),
        Envelope::Harmonic { .. } => println!("unbounded sequence converged"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> harmonica::Result<()> {
    run_example()
}
