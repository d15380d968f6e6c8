// Harmonic measure on a grid, the boundary integral representation of
// harmonic functions, and the Martin representing measure.

use harmonica::dirichlet::solve_dirichlet;
use harmonica::martin::{compactify_absorbing, DEFAULT_MERGE_TOL};
use harmonica::measure::{harmonic_measure, harmonic_measure_adjoint, martin_representation, pushforward_compare, represent};
use harmonica::space::{generate, Domain, ExtendedFunction, Geometry};

pub fn run_example() -> harmonica::Result<()> {
    let grid = generate(&Geometry::Grid2d(5))?;
    let whole = Domain::whole(&grid);
    let x = grid.base_point();
    let omega = harmonic_measure(&grid, &whole, x)?;
    let adjoint = harmonic_measure_adjoint(&grid, &whole, x)?;
    println!("exit distribution from the center of grid2d(5):");
    for ((_, id, w), w2) in omega.iter().zip(&adjoint.weights) {
        if w > 0.0 {
            println!("  {id:>4}  {w:.6}  (adjoint {w2:.6})");
        }
    }

    let g = ExtendedFunction::from_pairs(whole.boundary().iter().map(|&b| (b, (b % 3) as f64)))?;
    let h = solve_dirichlet(&grid, &whole, &g)?;
    println!("∫g dω = {:.12}, h(x) = {:.12}", represent(&grid, &whole, &g, x)?, h.value(x)?);

    let atlas = compactify_absorbing(&grid, DEFAULT_MERGE_TOL)?;
    let positive = ExtendedFunction::from_pairs(whole.boundary().iter().map(|&b| (b, 1.0 + (b % 3) as f64)))?;
    let h = solve_dirichlet(&grid, &whole, &positive)?.restrict_to(&atlas.rows)?;
    let rep = martin_representation(&atlas, &h, 1e-9)?;
    println!(
        "Martin measure: total mass {:.6} = h(base) {:.6}, rank {} of {}, unique: {}",
        rep.measure.total_mass(),
        h.value(atlas.base_point)?,
        rep.rank,
        atlas.class_count(),
        rep.unique
    );
    println!("base-point change law error {:.1e}", pushforward_compare(&grid, &atlas, None)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> harmonica::Result<()> {
    run_example()
}
