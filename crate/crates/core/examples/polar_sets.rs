// Polar sets: a segment has vanishing lattice capacity under refinement,
// a ball does not, and the segment carries a superharmonic witness that
// blows up on it while staying bounded away from it.

use harmonica::polar::{polar_flag, polar_witness, thorn_lattice, Refinement, ThornVariant, VanishingRule};

pub fn run_example() -> harmonica::Result<()> {
    let (mut segment, mut ball) = (Vec::new(), Vec::new());
    for n in [16, 32] {
        let l = thorn_lattice(n, ThornVariant::Thorn)?;
        segment.push(Refinement {
            set: l.axis_segment(0.0, 0.25),
            space: l.space.clone(),
        });
        ball.push(Refinement {
            set: l.ball([0.0; 3], 0.25),
            space: l.space,
        });
    }
    for (name, r) in [("segment", &segment), ("ball", &ball)] {
        let p = polar_flag(r, VanishingRule::default())?;
        println!(
            "{name:<8} h·Cap {:?} extrapolated {:.3} -> {:?}",
            p.capacities, p.extrapolated, p.flag
        );
    }
    let w = polar_witness(&segment, [0.25, 0.25, -0.25], [0.0, 0.0, 0.125], VanishingRule::default())?;
    println!("witness on the segment {:?}, at the check point {:?}", w.at_set, w.at_check);
    Ok(())
}

#[allow(dead_code)]
fn main() -> harmonica::Result<()> {
    run_example()
}
