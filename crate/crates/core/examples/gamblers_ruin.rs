// Gambler's ruin on a path: the Dirichlet solution is the ruin
// probability, and the Green function counts expected visits.

use harmonica::dirichlet::{harmonicity_residual, solve_dirichlet};
use harmonica::martin::green_function;
use harmonica::space::{generate, Domain, ExtendedFunction, Geometry};

pub fn run_example() -> harmonica::Result<()> {
    let n = 9;
    let space = generate(&Geometry::Path(n))?;
    let whole = Domain::whole(&space);
    let g = ExtendedFunction::from_pairs([(0, 0.0), (n - 1, 1.0)])?;
    let h = solve_dirichlet(&space, &whole, &g)?;
    let green = green_function(&space)?;
    println!("x   P(reach {}) exact     G(x,x)  exact", n - 1);
    for x in 1..n - 1 {
        let win = x as f64 / (n - 1) as f64;
        let visits = 2.0 * x as f64 * (n - 1 - x) as f64 / (n - 1) as f64;
        println!(
            "{x}   {:.6}  {win:.6}  {:.4}  {visits:.4}",
            h.value(x)?,
            green.value(x, x)?
        );
    }
    println!("harmonicity residual {:.2e}", harmonicity_residual(&space, &h, &whole)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> harmonica::Result<()> {
    run_example()
}
