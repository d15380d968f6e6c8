// Functions as sections: restriction, gluing, the min/max lattice and the
// two equivalent superharmonicity tests.

use harmonica::dirichlet::{check_superharmonic_subdomains, solve_dirichlet};
use harmonica::space::{generate, glue, lattice, restrict, Domain, ExtendedFunction, Geometry, LatticeOp};

pub fn run_example() -> harmonica::Result<()> {
    let space = generate(&Geometry::Path(7))?;
    let whole = Domain::whole(&space);
    let left = Domain::new(&space, [1, 2, 3])?;
    let right = Domain::new(&space, [3, 4, 5])?;

    let g = ExtendedFunction::from_pairs([(0, 0.0), (6, 1.0)])?;
    let h = solve_dirichlet(&space, &whole, &g)?;
    let glued = glue(&[(left.clone(), restrict(&h, &left)?), (right.clone(), restrict(&h, &right)?)])?;
    println!("glued sections agree with h: {}", glued.max_abs_diff(&restrict(&h, &whole)?)? == 0.0);

    let bump = ExtendedFunction::from_pairs([(1, 0.2), (2, 0.9), (3, 0.1)])?;
    match glue(&[(left.clone(), bump), (right.clone(), restrict(&h, &right)?)]) {
        Err(e) => println!("incompatible family rejected: {e}"),
        Ok(_) => println!("unexpected gluing"),
    }

    let tent = ExtendedFunction::from_dense(&[0.0, 1.0, 2.0, 3.0, 2.0, 1.0, 0.0]);
    let meet = lattice(&tent, &ExtendedFunction::from_dense(&[1.5; 7]), LatticeOp::Meet)?;
    let check = check_superharmonic_subdomains(&space, &meet, &whole)?;
    println!(
        "min(tent, 1.5): one-step deficiency {:.3}, subdomain deficiency {:.3}, tests agree: {}",
        check.one_step.value, check.subdomain.value, check.agree
    );
    let v = lattice(&tent, &h.to_dense(7, 0.0).map(|d| ExtendedFunction::from_dense(&d))?, LatticeOp::Join)?;
    let check = check_superharmonic_subdomains(&space, &v, &whole)?;
    println!(
        "max(tent, h): one-step deficiency {:.3} at {:?}, tests agree: {}",
        check.one_step.value, check.one_step.witness, check.agree
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> harmonica::Result<()> {
    run_example()
}
