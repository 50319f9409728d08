use bgg_workbench::filtered::{
    check_degeneration_criterion, map_on_page, FilteredFreeComplex, SpectralSequence,
};
use bgg_workbench::linalg::Field;
use bgg_workbench::random::{random_complex, random_homotopy_equivalence, random_null_homotopic, Entries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// rank(F^a K̄^n → K̄^{n+1} / F^b), with F^a = K̄ for a ≤ 0.
fn filtered_rank(k: &FilteredFreeComplex, n: i64, a: i64, b: usize) -> usize {
    if n < k.n_lo() || n >= k.n_hi() {
        return 0;
    }
    let m = k.d_matrix(n);
    let cut_col = k.filt_start(n, a.max(0) as usize);
    let cut_row = k.filt_start(n + 1, b);
    m.select_columns(|j| j >= cut_col).select_rows(|i| i < cut_row).rank()
}

/// dim E_r^p(n) from ranks of truncated differentials alone.
fn oracle_dim(k: &FilteredFreeComplex, r: usize, n: i64, p: usize) -> usize {
    let (pi, ri) = (p as i64, r as i64);
    let v = k.gr_dim(n, p) as i64 - filtered_rank(k, n, pi, p + r) as i64
        + filtered_rank(k, n, pi + 1, p + r) as i64
        + filtered_rank(k, n - 1, pi - ri + 1, p) as i64
        - filtered_rank(k, n - 1, pi - ri + 1, p + 1) as i64;
    v as usize
}

fn sample(rng: &mut ChaCha8Rng, precision: usize, entries: Entries) -> FilteredFreeComplex {
    let e = rng.gen_range(1..=3);
    random_complex(rng, Field::Rationals, e, precision, entries)
}

fn entries(rng: &mut ChaCha8Rng) -> Entries {
    match rng.gen_range(0..3) {
        0 => Entries::Homogeneous(1),
        1 => Entries::Homogeneous(2),
        _ => Entries::Mixed,
    }
}

#[test]
fn pages_match_rank_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..25 {
        let en = entries(&mut rng);
        let k = sample(&mut rng, 4, en);
        let ss = SpectralSequence::compute(&k).unwrap();
        for r in 1..=5 {
            for n in k.spots() {
                for p in 0..=4 {
                    assert_eq!(ss.dim(r, n, p), oracle_dim(&k, r, n, p), "r={r} n={n} p={p} {k:?}");
                }
            }
        }
    }
}

#[test]
fn page_recursion_and_euler_characteristic() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..25 {
        let en = entries(&mut rng);
        let k = sample(&mut rng, 5, en);
        let ss = SpectralSequence::compute(&k).unwrap();
        for r in 1..ss.last_page() {
            for n in k.spots() {
                for p in 0..=k.precision() {
                    let out = ss.differential(r, n, p).rank();
                    let incoming = if p >= r { ss.differential(r, n - 1, p - r).rank() } else { 0 };
                    assert_eq!(ss.dim(r + 1, n, p), ss.dim(r, n, p) - out - incoming);
                }
            }
            // Fix the internal degree p + q·0 ... the alternating sum over n of
            // dims along a fixed antidiagonal shift is page independent.
            let total = |r: usize| -> i64 {
                k.spots()
                    .map(|n| {
                        let s: i64 = (0..=k.precision()).map(|p| ss.dim(r, n, p) as i64).sum();
                        if n.rem_euclid(2) == 0 { s } else { -s }
                    })
                    .sum()
            };
            assert_eq!(total(r), total(r + 1));
        }
    }
}

#[test]
fn criterion_agrees_with_degeneration() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut seen = [0usize; 2];
    for _ in 0..30 {
        let k = sample(&mut rng, 5, Entries::Mixed);
        let ss = SpectralSequence::compute(&k).unwrap();
        for r in 1..=3 {
            let verdict = check_degeneration_criterion(&k, r).unwrap();
            assert_eq!(verdict.holds, ss.degenerates_at(r + 1), "r={r} {k:?}");
            seen[verdict.holds as usize] += 1;
            if let Some(w) = verdict.witness {
                let start = k.filt_start(w.n, w.k);
                assert!(w.dx[..start].iter().all(|x| x.is_zero()));
            }
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

#[test]
fn homogeneous_complexes_degenerate() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for r in 1..=2 {
        for _ in 0..15 {
            let k = sample(&mut rng, 5, Entries::Homogeneous(r));
            assert!(SpectralSequence::compute(&k).unwrap().degenerates_at(r + 1));
        }
    }
}

#[test]
fn null_homotopic_maps_vanish_on_pages() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..10 {
        let en = entries(&mut rng);
        let k = sample(&mut rng, 4, en);
        let l = random_complex(&mut rng, Field::Rationals, k.e(), 4, en);
        let (_, h) = random_null_homotopic(&mut rng, &k, &l);
        let sk = SpectralSequence::compute(&k).unwrap();
        let sl = SpectralSequence::compute(&l).unwrap();
        for r in 1..=sk.last_page() {
            assert!(map_on_page(&h, &sk, &sl, r).unwrap().is_zero());
        }
    }
}

#[test]
fn homotopy_equivalences_induce_isomorphisms() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..8 {
        let en = entries(&mut rng);
        let k = sample(&mut rng, 4, en);
        let eq = random_homotopy_equivalence(&mut rng, &k);
        let id_minus = bgg_workbench::filtered::ChainMap::identity(&eq.target)
            .sub(&eq.g.then(&eq.f).unwrap())
            .unwrap();
        assert!(id_minus.equals(&eq.s_target.boundary()));
        let sk = SpectralSequence::compute(&eq.source).unwrap();
        let sl = SpectralSequence::compute(&eq.target).unwrap();
        for r in 1..=sk.last_page() {
            let f = map_on_page(&eq.f, &sk, &sl, r).unwrap();
            let g = map_on_page(&eq.g, &sl, &sk, r).unwrap();
            assert!(f.then(&g).unwrap().is_identity());
            assert!(g.then(&f).unwrap().is_identity());
        }
    }
}

#[test]
fn e1_bridge_on_random_complexes() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..25 {
        let en = entries(&mut rng);
        let k = sample(&mut rng, 4, en);
        let check = bgg_workbench::filtered::e1_check(&k).unwrap();
        assert!(check.passed, "{check} {k:?}");
    }
}

#[test]
fn vanishing_predictions_are_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let mut nontrivial = 0;
    for _ in 0..25 {
        let k = sample(&mut rng, 6, Entries::Homogeneous(1));
        let v = bgg_workbench::filtered::predict_vanishing(&k, 4).unwrap();
        assert!(v.contradicted.is_empty(), "{v} {k:?}");
        let h = bgg_workbench::filtered::reduce_mod_m(&k).homology;
        nontrivial += v.certified.iter().filter(|&&n| h[(n - k.n_lo()) as usize] > 0).count();
    }
    assert!(nontrivial > 0);
}
