use bgg_workbench::bgg::{default_truncation, regularity_of_dual_via_bgg};
use bgg_workbench::emodule::regularity::default_imax;
use bgg_workbench::emodule::{
    betti_table, betti_table_by_syzygies, direct_sum, dual_module, regularity_definition_route, shift,
    validate_module, ExteriorContext, GradedEModule,
};
use bgg_workbench::filtered::{sum_complexes, SpectralSequence};
use bgg_workbench::format::{self, WorkbenchFile};
use bgg_workbench::linalg::Field;
use bgg_workbench::random::{random_complex, random_module, Entries};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn module(seed: u64, q: usize, field: Field) -> GradedEModule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_module(&mut rng, ExteriorContext::new(q, field), 3)
}

fn fields() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Rationals), Just(Field::prime(5).unwrap())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_modules_are_valid(seed in any::<u64>(), q in 1usize..=3, f in fields()) {
        let m = module(seed, q, f);
        prop_assert!(validate_module(&m.context(), &m).unwrap().is_empty());
    }

    #[test]
    fn tor_is_additive(a in any::<u64>(), b in any::<u64>(), q in 1usize..=2) {
        let (m, n) = (module(a, q, Field::Rationals), module(b, q, Field::Rationals));
        let s = direct_sum(m.context(), &[m.clone(), n.clone()]).unwrap();
        prop_assert_eq!(betti_table(&s, 3), betti_table(&m, 3).sum(&betti_table(&n, 3)));
    }

    #[test]
    fn betti_shifts_with_module(seed in any::<u64>(), q in 1usize..=2, s in -3i64..=3) {
        let m = module(seed, q, Field::Rationals);
        prop_assert_eq!(betti_table(&shift(&m, s), 3), betti_table(&m, 3).shifted(s));
    }

    #[test]
    fn duality_is_an_involution(seed in any::<u64>(), q in 1usize..=3, f in fields()) {
        let m = module(seed, q, f);
        let d = dual_module(&m);
        for j in m.lo() - 1..=m.hi() + 1 {
            prop_assert_eq!(d.dim(-j), m.dim(j));
        }
        prop_assert_eq!(dual_module(&d).trimmed(), m.trimmed());
    }

    #[test]
    fn betti_routes_agree(seed in any::<u64>(), q in 1usize..=3) {
        let m = module(seed, q, Field::Rationals);
        prop_assert_eq!(betti_table(&m, 3), betti_table_by_syzygies(&m, 3));
    }

    #[test]
    fn regularity_routes_agree(seed in any::<u64>(), q in 1usize..=2) {
        let m = module(seed, q, Field::Rationals);
        let top = *m.support().last().unwrap();
        let qm = shift(&m, top);
        let t = default_truncation(&dual_module(&qm));
        let imax = default_imax(&qm).max(t as usize);
        let def = regularity_definition_route(&qm, imax).unwrap();
        let bgg = regularity_of_dual_via_bgg(&qm, t).unwrap();
        prop_assert_eq!(def.regularity, bgg.regularity);
    }

    #[test]
    fn modules_round_trip(seed in any::<u64>(), q in 1usize..=3, f in fields()) {
        let m = module(seed, q, f);
        let text = format::emodule_to_string(&m);
        match format::parse_str(&text, None).unwrap() {
            WorkbenchFile::EModule(back) => prop_assert_eq!(back, m.trimmed()),
            _ => prop_assert!(false),
        }
    }

    #[test]
    fn complexes_round_trip(seed in any::<u64>(), e in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = random_complex(&mut rng, Field::Rationals, e, 4, Entries::Mixed);
        match format::parse_str(&format::rcomplex_to_string(&k), None).unwrap() {
            WorkbenchFile::RComplex(back) => prop_assert_eq!(back, k),
            _ => prop_assert!(false),
        }
    }

    #[test]
    fn pages_are_additive(a in any::<u64>(), b in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(a);
        let k = random_complex(&mut rng, Field::Rationals, 2, 4, Entries::Mixed);
        let mut rng = ChaCha8Rng::seed_from_u64(b);
        let l = random_complex(&mut rng, Field::Rationals, 2, 4, Entries::Mixed);
        let s = sum_complexes(&[k.clone(), l.clone()]).unwrap();
        let (sk, sl, ss) = (
            SpectralSequence::compute(&k).unwrap(),
            SpectralSequence::compute(&l).unwrap(),
            SpectralSequence::compute(&s).unwrap(),
        );
        for r in 1..=5 {
            for n in s.spots() {
                for p in 0..=4 {
                    let part = |c: &SpectralSequence| {
                        if c.complex().spots().contains(&n) { c.dim(r, n, p) } else { 0 }
                    };
                    prop_assert_eq!(ss.dim(r, n, p), part(&sk) + part(&sl), "r={} n={} p={}", r, n, p);
                }
            }
        }
    }
}
