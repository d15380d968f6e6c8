// Boundary regularity at the tip of a thorn, a cone and a half-space on
// box lattices: regularity gap, thinness and the Wiener series.

use harmonica::polar::{
    default_radii, regularity_test, thin_at, thorn_lattice, wiener_series, ThornVariant, WienerForm, REGULARITY_TOL,
    THIN_THRESHOLD, WIENER_RATIO,
};
use harmonica::space::ExtendedFunction;

pub fn run_example() -> harmonica::Result<()> {
    let shapes = [
        ("thorn", ThornVariant::Thorn),
        ("cone 45°", ThornVariant::Cone { aperture_deg: 45.0 }),
        ("half-space", ThornVariant::Cone { aperture_deg: 90.0 }),
    ];
    for n in [16, 32] {
        for (name, v) in shapes {
            let l = thorn_lattice(n, v)?;
            let f = ExtendedFunction::constant(&l.set, 1.0);
            let reg = regularity_test(&l.space, &l.set, l.tip, &f, REGULARITY_TOL)?;
            let thin = thin_at(&l.space, &l.set, l.tip, &default_radii(n), THIN_THRESHOLD)?;
            println!(
                "n={n:>2} {name:<10} gap {:.3} attained {:<5} thin {:<5} profile {:?}",
                reg.gap,
                reg.attained,
                thin.thin,
                thin.profile.iter().map(|p| (p.1 * 1000.0).round() / 1000.0).collect::<Vec<_>>()
            );
        }
    }
    let n = 32;
    for (name, v) in &shapes[..2] {
        let l = thorn_lattice(n, *v)?;
        let w = wiener_series(&l.space, &l.set, l.tip, 5, WienerForm::Literal)?;
        println!(
            "Wiener {name} n={n}: increments {:?} decays {} bounded below {}",
            w.increments().iter().map(|x| (x * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
            w.decays(WIENER_RATIO),
            w.bounded_below(WIENER_RATIO)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> harmonica::Result<()> {
    run_example()
}
