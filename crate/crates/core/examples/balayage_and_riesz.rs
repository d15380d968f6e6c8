// Balayage: the réduite by policy iteration, the plain fixed point, the
// linear-programming oracle, the Dirichlet problem by sweeping, and the
// Riesz split of a superharmonic function.

use harmonica::balayage::{
    dirichlet_via_balayage, reduite, reduite_iterative, reduite_oracle, riesz_decompose, FIXED_POINT_CAP,
    FIXED_POINT_TOL,
};
use harmonica::dirichlet::solve_dirichlet;
use harmonica::space::{generate, random_network, Domain, ExtendedFunction, Geometry};

pub fn run_example() -> harmonica::Result<()> {
    let space = generate(&Geometry::Grid2d(5))?;
    let set = [6, 18];
    let u = ExtendedFunction::from_pairs([(6, 1.0), (18, 2.0)])?;
    let exact = reduite(&space, &u, &set)?;
    let fixed = reduite_iterative(&space, &u, &set, FIXED_POINT_TOL, FIXED_POINT_CAP)?;
    println!(
        "grid2d(5) réduite: fixed point after {} sweeps differs by {:.1e}",
        fixed.iterations,
        exact.max_abs_diff(&fixed.function)?
    );

    let small = random_network(7, 3)?;
    let all: Vec<usize> = (0..small.len()).collect();
    let obstacle = ExtendedFunction::from_dense(&(0..small.len()).map(|x| (x % 3) as f64).collect::<Vec<_>>());
    let lp = reduite_oracle(&small, &obstacle, &all[1..4])?;
    let pi = reduite(&small, &obstacle, &all[1..4])?;
    println!("random network: LP oracle vs policy iteration {:.1e}", lp.max_abs_diff(&pi)?);

    let inner = Domain::new(&space, [6, 7, 8, 11, 12, 13])?;
    let g = ExtendedFunction::from_pairs(inner.boundary().iter().map(|&b| (b, (b % 5) as f64)))?;
    let swept = dirichlet_via_balayage(&space, &inner, &g)?;
    let solved = solve_dirichlet(&space, &inner, &g)?;
    println!("Dirichlet by balayage vs direct solve {:.1e}", swept.max_abs_diff(&solved)?);

    let path = generate(&Geometry::Path(6))?;
    let u = ExtendedFunction::from_dense(&[1.0, 2.0, 2.5, 2.5, 2.0, 1.0]);
    let r = riesz_decompose(&path, &u, 1e-12)?;
    println!("Riesz on path(6): tail {:.1e} after {} steps", r.tail_norm, r.steps);
    for x in 0..6 {
        println!("  x={x} u={:.3} h={:.3} p={:.3}", u.value(x)?, r.harmonic.value(x)?, r.potential.value(x)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> harmonica::Result<()> {
    run_example()
}
