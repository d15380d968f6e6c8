use proptest::prelude::*;

use harmonica::balayage::{equilibrium_potential, reduite};
use harmonica::cli::space_file::{parse_space_str, serialize_space};
use harmonica::dirichlet::{harmonicity_residual, solve_dirichlet, superharmonic_deficiency};
use harmonica::measure::harmonic_measure;
use harmonica::space::{lattice, random_network, Domain, ExtendedFunction, HarmonicSpace, LatticeOp};

fn network() -> impl Strategy<Value = HarmonicSpace> {
    (2usize..=16, any::<u64>()).prop_map(|(n, seed)| random_network(n, seed).unwrap())
}

fn subset(n: usize, mask: u32) -> Vec<usize> {
    let s: Vec<usize> = (0..n).filter(|&v| mask >> (v % 32) & 1 == 1).collect();
    if s.is_empty() {
        vec![0]
    } else {
        s
    }
}

fn values(n: usize, seed: u64) -> Vec<f64> {
    (0..n as u64).map(|i| ((seed ^ (i * 0x9E37_79B9)) % 1000) as f64 / 500.0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dirichlet_solutions_obey_the_maximum_principle(sp in network(), seed in any::<u64>()) {
        let whole = Domain::whole(&sp);
        prop_assume!(!whole.interior().is_empty());
        let v = values(sp.len(), seed);
        let g = ExtendedFunction::from_pairs(whole.boundary().iter().map(|&b| (b, v[b]))).unwrap();
        let h = solve_dirichlet(&sp, &whole, &g).unwrap();
        let hi = g.max_finite().unwrap();
        for &x in whole.interior() {
            let hx = h.value(x).unwrap();
            prop_assert!(hx >= -1e-12 && hx <= hi + 1e-12);
        }
        prop_assert!(harmonicity_residual(&sp, &h, &whole).unwrap() <= 1e-10);
    }

    #[test]
    fn reduite_is_the_least_superharmonic_majorant_on_the_set(
        sp in network(), seed in any::<u64>(), mask in any::<u32>()
    ) {
        let n = sp.len();
        let set = subset(n, mask);
        let u = ExtendedFunction::from_dense(&values(n, seed));
        let r = reduite(&sp, &u, &set).unwrap();
        // Constants are superharmonic, so max u is a competing majorant.
        let top = u.max_finite().unwrap();
        for x in 0..n {
            prop_assert!(r.value(x).unwrap() <= top + 1e-10);
        }
        for &a in &set {
            prop_assert!(r.value(a).unwrap() >= u.value(a).unwrap() - 1e-10);
        }
        let d = superharmonic_deficiency(&sp, &r, &Domain::whole(&sp)).unwrap();
        prop_assert!(d.value <= 1e-10);
    }

    #[test]
    fn reduite_grows_with_the_set(sp in network(), seed in any::<u64>(), a in any::<u32>(), b in any::<u32>()) {
        let n = sp.len();
        let small = subset(n, a & b);
        let mut large = subset(n, a | b);
        large.extend(&small);
        large.sort_unstable();
        large.dedup();
        let u = ExtendedFunction::from_dense(&values(n, seed));
        let rs = reduite(&sp, &u, &small).unwrap();
        let rl = reduite(&sp, &u, &large).unwrap();
        for x in 0..n {
            prop_assert!(rs.value(x).unwrap() <= rl.value(x).unwrap() + 1e-10);
        }
    }

    #[test]
    fn equilibrium_potential_lies_in_the_unit_interval(sp in network(), mask in any::<u32>()) {
        let free = sp.non_absorbing();
        let set: Vec<usize> = subset(free.len(), mask).into_iter().map(|i| free[i]).collect();
        let e = equilibrium_potential(&sp, &set).unwrap();
        for x in 0..sp.len() {
            let v = e.value(x).unwrap();
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
        }
        for &a in &set {
            prop_assert!((e.value(a).unwrap() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn harmonic_measure_is_a_sub_probability(sp in network(), pick in any::<usize>()) {
        let whole = Domain::whole(&sp);
        prop_assume!(!whole.interior().is_empty());
        let x = whole.interior()[pick % whole.interior().len()];
        let w = harmonic_measure(&sp, &whole, x).unwrap();
        prop_assert!(w.weights.iter().all(|&v| v >= -1e-12));
        prop_assert!(w.total_mass() <= 1.0 + 1e-10);
    }

    #[test]
    fn space_files_round_trip(sp in network()) {
        let back = parse_space_str(&serialize_space(&sp)).unwrap();
        prop_assert_eq!(back.ids(), sp.ids());
        prop_assert_eq!(back.base_point(), sp.base_point());
        for x in 0..sp.len() {
            prop_assert_eq!(back.kernel_row(x), sp.kernel_row(x));
        }
    }

    #[test]
    fn meet_and_join_add_up(a in proptest::collection::vec(-5.0f64..5.0, 1..20), seed in any::<u64>()) {
        let f = ExtendedFunction::from_dense(&a);
        let g = ExtendedFunction::from_dense(&values(a.len(), seed));
        let lo = lattice(&f, &g, LatticeOp::Meet).unwrap();
        let hi = lattice(&f, &g, LatticeOp::Join).unwrap();
        for x in 0..a.len() {
            let (l, h) = (lo.value(x).unwrap(), hi.value(x).unwrap());
            prop_assert!(l <= h);
            prop_assert!((l + h - f.value(x).unwrap() - g.value(x).unwrap()).abs() <= 1e-12);
        }
    }
}
