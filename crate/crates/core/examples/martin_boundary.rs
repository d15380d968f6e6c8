// Martin boundary of a binary tree: the absorbing-mode atlas, minimality,
// separation, and the exhaustion of the infinite tree by finite ones.

use harmonica::martin::{
    compactify_absorbing, compactify_exhaustion, kernel_table, minimality_test, separation_check, tree_exhaustion,
    DEFAULT_MERGE_TOL,
};
use harmonica::space::{generate, Geometry};

pub fn run_example() -> harmonica::Result<()> {
    let tree = generate(&Geometry::BinaryTree(4))?;
    let atlas = compactify_absorbing(&tree, DEFAULT_MERGE_TOL)?;
    let minimal = minimality_test(&atlas);
    println!(
        "tree(4): {} boundary points in {} kernel classes, all minimal: {}",
        atlas.len(),
        atlas.class_count(),
        minimal.iter().all(|&m| m)
    );
    let sep = separation_check(&atlas.rows, &atlas.kernels, 1e-9);
    println!("boundary kernels separate interior vertices: {} {:?}", sep.separated, sep.witness);

    let path = generate(&Geometry::Path(5))?;
    let ends = compactify_absorbing(&path, DEFAULT_MERGE_TOL)?;
    let k = kernel_table(&path)?;
    println!(
        "path(5), base point 2: K(·, left end) = {:?}, K(·, 1) = {:?}",
        ends.column(0),
        k.column(1)?
    );

    let (levels, probes) = tree_exhaustion(&[6, 7, 8], 2)?;
    let ex = compactify_exhaustion(&levels, &probes, DEFAULT_MERGE_TOL, 0.05)?;
    println!(
        "exhaustion by trees of depth 6..8: {} clusters, drift {:.3e}",
        ex.len(),
        ex.drift.unwrap_or(0.0)
    );
    for n in &ex.notices {
        println!("  {n}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> harmonica::Result<()> {
    run_example()
}
