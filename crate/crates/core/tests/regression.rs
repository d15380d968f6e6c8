//! Values from the first run at n = 16, frozen to catch drift.

use harmonica::balayage::capacity;
use harmonica::polar::{regularity_test, thorn_lattice, ThornVariant, REGULARITY_TOL};
use harmonica::space::ExtendedFunction;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

#[test]
fn regularity_gaps_at_n16() {
    for (variant, gap) in [
        (ThornVariant::Thorn, 0.6848609983862755),
        (ThornVariant::Cone { aperture_deg: 45.0 }, 0.3539565613833612),
        (ThornVariant::Cone { aperture_deg: 90.0 }, 0.15633405765773523),
    ] {
        let l = thorn_lattice(16, variant).unwrap();
        let f = ExtendedFunction::constant(&l.set, 1.0);
        let r = regularity_test(&l.space, &l.set, l.tip, &f, REGULARITY_TOL).unwrap();
        assert!(close(r.gap, gap), "{variant:?}: {} vs {gap}", r.gap);
        assert!(!r.attained);
    }
}

#[test]
fn scaled_capacities_at_n16() {
    let l = thorn_lattice(16, ThornVariant::Thorn).unwrap();
    let h = l.space.spacing().unwrap();
    let segment = capacity(&l.space, &l.axis_segment(0.0, 0.25), None).unwrap() * h;
    let ball = capacity(&l.space, &l.ball([0.0; 3], 0.25), None).unwrap() * h;
    assert!(close(segment, 0.12419180061897851), "{segment}");
    assert!(close(ball, 0.791487658699102), "{ball}");
}
