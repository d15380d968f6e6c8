// Space files and the command-line driver: write a space, read it back,
// and run commands against it.

use harmonica::cli::{dispatch, parse_space_str, serialize_space};
use harmonica::space::{generate, Geometry};

pub fn run_example() -> harmonica::Result<()> {
    let space = generate(&Geometry::BinaryTree(2))?;
    let text = serialize_space(&space);
    println!("{text}");
    println!("round trip equal: {}", parse_space_str(&text)? == space);

    let dir = std::env::temp_dir().join(format!("harmonica-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let file = dir.join("tree.toml");
    std::fs::write(&file, text)?;
    let out = dir.join("out");
    let run = |args: &[&str]| {
        let mut argv = vec!["harmonica"];
        argv.extend_from_slice(args);
        argv.extend_from_slice(&["--out", out.to_str().unwrap()]);
        dispatch(argv)
    };
    match run(&["capacity", "--space", file.to_str().unwrap(), "--set", "1,2"]) {
        Ok((report, _)) => println!("{}", report.summary()),
        Err(e) => println!("capacity failed: {e:?}"),
    }
    match run(&["dirichlet", "--space", "path5", "--g", "0:0,4:1"]) {
        Ok(_) => print!("{}", std::fs::read_to_string(out.join("dirichlet.csv"))?),
        Err(e) => println!("dirichlet failed: {e:?}"),
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> harmonica::Result<()> {
    run_example()
}
