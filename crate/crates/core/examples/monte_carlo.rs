// Random-walk estimates of exit distributions and Green values next to
// the exact linear-algebra answers.

use harmonica::martin::green_function;
use harmonica::mc::{mc_green, mc_hitting};
use harmonica::measure::harmonic_measure;
use harmonica::space::{generate, Domain, Geometry};

pub fn run_example() -> harmonica::Result<()> {
    let grid = generate(&Geometry::Grid2d(4))?;
    let whole = Domain::whole(&grid);
    let x = grid.base_point();
    let exact = harmonic_measure(&grid, &whole, x)?;
    let est = mc_hitting(&grid, &whole, x, 100_000, 42)?;
    println!("grid2d(4) from {}: seed {}, {} walks", grid.id(x), est.seed, est.samples);
    for i in 0..exact.weights.len() {
        if exact.weights[i] > 0.0 {
            println!(
                "  {:>4}  exact {:.5}  estimate {:.5} ± {:.5}",
                exact.labels[i], exact.weights[i], est.weights[i], est.stderr[i]
            );
        }
    }
    let g = green_function(&grid)?.value(x, x)?;
    for samples in [10_000, 40_000, 160_000] {
        let e = mc_green(&grid, x, x, samples, 7)?;
        println!("G(x,x) = {g:.5}: {samples:>6} walks give {:.5} ± {:.5}", e.mean, e.stderr);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> harmonica::Result<()> {
    run_example()
}
