// Capacity and equilibrium potentials: singleton identity, the choice of
// reference measure, and monotonicity on random networks.

use harmonica::balayage::{capacity, capacity_report};
use harmonica::martin::green_function;
use harmonica::space::{generate, random_network, Geometry};

pub fn run_example() -> harmonica::Result<()> {
    let path = generate(&Geometry::Path(5))?;
    let report = capacity_report(&path, &[2], None)?;
    println!("path(5): Cap({{2}}) = {}  (integral of e = {})", report.capacity, report.integral);

    for seed in 0..5 {
        let s = random_network(10, seed)?;
        let a = s.non_absorbing()[1];
        let g = green_function(&s)?;
        println!("seed {seed}: Cap({{{a}}})·G(a,a) = {:.12}", capacity(&s, &[a], None)? * g.value(a, a)?);
    }

    let (mut counting, mut reversible) = (0, 0);
    for seed in 0..100 {
        let s = random_network(8, 100 + seed)?;
        let free = s.non_absorbing();
        let small = &free[..1];
        let m = s.reversible_measure().map(<[f64]>::to_vec);
        if capacity(&s, small, None)? > capacity(&s, &free, None)? + 1e-12 {
            counting += 1;
        }
        if capacity(&s, small, m.as_deref())? > capacity(&s, &free, m.as_deref())? + 1e-12 {
            reversible += 1;
        }
    }
    println!("monotonicity violations over 100 pairs: counting measure {counting}, reversible measure {reversible}");

    let grid = generate(&Geometry::Grid2d(9))?;
    let center = 4 * 9 + 4;
    for r in 0..3usize {
        let ball: Vec<usize> = grid
            .non_absorbing()
            .into_iter()
            .filter(|&v| (v / 9).abs_diff(4).max((v % 9).abs_diff(4)) <= r)
            .collect();
        println!("grid2d(9) square of radius {r} around {center}: Cap = {:.4}", capacity(&grid, &ball, None)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> harmonica::Result<()> {
    run_example()
}
