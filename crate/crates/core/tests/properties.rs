use crossed_cube::diagnosis::{
    self, generate_syndrome, mm_distinguishable, oracle_distinguishable, pmc_distinguishable,
    syndrome_compatible, DiagnosisModel,
};
use crossed_cube::structure::{
    components, is_g_extra_cut, is_g_extra_faulty_set, odd_components, profile, MaskCube,
};
use crossed_cube::topology::{is_adjacent_flat, is_adjacent_recursive};
use crossed_cube::{CrossedCube, Dimension, Vertex, VertexSet};
use proptest::prelude::*;

fn set_strategy(n: u32) -> impl Strategy<Value = VertexSet> {
    let d = Dimension::new(n).unwrap();
    any::<u64>().prop_flat_map(move |bits| {
        (Just(bits), 0u32..=100).prop_map(move |(bits, keep)| {
            let full = if n == 6 { u64::MAX } else { (1u64 << (1 << n)) - 1 };
            // Thin the random word so small and large sets both occur.
            let mut mask = bits & full;
            let mut x = bits.rotate_left(17) ^ 0x9e37_79b9_7f4a_7c15;
            for v in 0..(1u32 << n) {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                if (x >> 33) % 100 >= keep as u64 {
                    mask &= !(1 << v);
                }
            }
            VertexSet::from_mask(d, mask)
        })
    })
}

fn model() -> impl Strategy<Value = DiagnosisModel> {
    prop_oneof![Just(DiagnosisModel::Pmc), Just(DiagnosisModel::MmStar)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn adjacency_symmetric_irreflexive_and_constructions_agree(n in 1u32..=20, a in any::<u32>(), b in any::<u32>()) {
        let d = Dimension::new(n).unwrap();
        let mask = (1u64 << n) - 1;
        let u = Vertex::new((a as u64 & mask) as u32, d).unwrap();
        let v = Vertex::new((b as u64 & mask) as u32, d).unwrap();
        let uv = is_adjacent_flat(u, v, d).unwrap();
        prop_assert_eq!(uv, is_adjacent_flat(v, u, d).unwrap());
        prop_assert!(!is_adjacent_flat(u, u, d).unwrap());
        prop_assert_eq!(uv, is_adjacent_recursive(u, v, d));
        if uv {
            prop_assert_ne!(u.label(), v.label());
        }
    }

    #[test]
    fn components_partition_the_remainder(f in set_strategy(5)) {
        let cube = CrossedCube::new(5).unwrap();
        let comps = components(&cube, &f).unwrap();
        let mut seen = VertexSet::empty(cube.dim());
        for (i, c) in comps.iter().enumerate() {
            prop_assert!(c.is_disjoint(&seen));
            prop_assert!(c.is_disjoint(&f));
            seen.union_with(c);
            for other in &comps[i + 1..] {
                prop_assert!(cube.neighborhood(c).is_disjoint(other));
            }
        }
        prop_assert_eq!(seen, f.complement());
        let mins: Vec<_> = comps.iter().map(|c| c.min_label()).collect();
        prop_assert!(mins.windows(2).all(|w| w[0] < w[1]));
        let p = profile(&cube, &f).unwrap();
        prop_assert_eq!(p.total_order() as usize, 32 - f.len());
        prop_assert_eq!(p.component_count, comps.len());
    }

    #[test]
    fn adding_faults_never_merges_components(f in set_strategy(5), extra in set_strategy(5)) {
        let cube = CrossedCube::new(5).unwrap();
        let bigger = f.union(&extra);
        let before = components(&cube, &f).unwrap();
        for c in components(&cube, &bigger).unwrap() {
            let hosts = before.iter().filter(|b| !b.is_disjoint(&c)).count();
            prop_assert_eq!(hosts, 1);
        }
    }

    #[test]
    fn extra_cut_implies_faulty_set(f in set_strategy(5), g in 0u32..5) {
        let cube = CrossedCube::new(5).unwrap();
        if is_g_extra_cut(&cube, &f, g).unwrap() {
            prop_assert!(is_g_extra_faulty_set(&cube, &f, g).unwrap());
        }
        let disconnects = components(&cube, &f).unwrap().len() >= 2;
        prop_assert_eq!(is_g_extra_cut(&cube, &f, 0).unwrap(), disconnects);
    }

    #[test]
    fn mask_kernel_matches_set_routines(f in set_strategy(6), g in 0u32..5) {
        let cube = CrossedCube::new(6).unwrap();
        let kernel = MaskCube::new(&cube).unwrap();
        let m = f.to_mask().unwrap();
        prop_assert_eq!(kernel.is_extra_cut(m, g), is_g_extra_cut(&cube, &f, g).unwrap());
        prop_assert_eq!(kernel.is_extra_faulty_set(m, g), is_g_extra_faulty_set(&cube, &f, g).unwrap());
        prop_assert_eq!(kernel.profile(m), profile(&cube, &f).unwrap());
        prop_assert_eq!(kernel.odd_components(m), odd_components(&cube, &f).unwrap());
    }

    #[test]
    fn odd_components_at_most_set_size(f in set_strategy(6)) {
        let cube = CrossedCube::new(6).unwrap();
        prop_assert!(odd_components(&cube, &f).unwrap() <= f.len());
    }

    #[test]
    fn distinguishability_is_symmetric_and_oracle_backed(f1 in set_strategy(4), f2 in set_strategy(4), model in model()) {
        prop_assume!(f1 != f2);
        let cube = CrossedCube::new(4).unwrap();
        let forward = diagnosis::distinguishable(&cube, &f1, &f2, model).unwrap();
        prop_assert_eq!(forward, diagnosis::distinguishable(&cube, &f2, &f1, model).unwrap());
        prop_assert_eq!(forward, oracle_distinguishable(&cube, &f1, &f2, model, u64::MAX).unwrap());
        let kernel = MaskCube::new(&cube).unwrap();
        let (a, b) = (f1.to_mask().unwrap(), f2.to_mask().unwrap());
        prop_assert_eq!(forward, diagnosis::mask::distinguishable(&kernel, a, b, model));
    }

    #[test]
    fn pmc_indistinguishable_means_no_escaping_edge(f1 in set_strategy(4), f2 in set_strategy(4)) {
        prop_assume!(f1 != f2);
        let cube = CrossedCube::new(4).unwrap();
        if !pmc_distinguishable(&cube, &f1, &f2).unwrap() {
            let union = f1.union(&f2);
            let diff = f1.symmetric_difference(&f2);
            prop_assert!(cube.neighborhood(&diff).is_subset(&union));
        }
    }

    #[test]
    fn mm_distinguishable_implies_pmc_distinguishable(f1 in set_strategy(4), f2 in set_strategy(4)) {
        prop_assume!(f1 != f2);
        let cube = CrossedCube::new(4).unwrap();
        if mm_distinguishable(&cube, &f1, &f2).unwrap() {
            prop_assert!(pmc_distinguishable(&cube, &f1, &f2).unwrap());
        }
    }

    #[test]
    fn generated_syndromes_are_compatible(f in set_strategy(4), seed in any::<u64>(), model in model()) {
        let cube = CrossedCube::new(4).unwrap();
        let s = generate_syndrome(&cube, &f, model, seed).unwrap();
        prop_assert!(syndrome_compatible(&cube, &f, &s).unwrap());
        prop_assert_eq!(&s, &generate_syndrome(&cube, &f, model, seed).unwrap());
    }
}
