macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}

example!(gamblers_ruin);
example!(sheaf_and_lattice);
example!(balayage_and_riesz);
example!(capacity);
example!(martin_boundary);
example!(harmonic_measure);
example!(harnack);
example!(lebesgue_thorn);
example!(polar_sets);
example!(monte_carlo);
example!(space_files);
