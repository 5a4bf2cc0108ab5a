//! Invariants over randomly drawn planar affine systems.

use iak::boxcount::count_cells;
use iak::hausdorff::series_bounds;
use iak::ifs::{apply, compose, homogeneous_points, iterate_system, ContractionMap, IFSystem, SeparationFlags, Word};
use iak::linalg::{euclidean_distance, Matrix, Vector};
use iak::pressure::upper_lipschitz_dimension;
use iak::stopping::delta_stopping;
use iak::WordBudget;
use proptest::prelude::*;

/// Linear part `R(a)·diag(hi, lo)·R(b)` plus a translation.
#[derive(Debug, Clone)]
struct MapParams {
    a: f64,
    b: f64,
    hi: f64,
    lo_frac: f64,
    tx: f64,
    ty: f64,
}

fn map_params() -> impl Strategy<Value = MapParams> {
    (0.0..6.3f64, 0.0..6.3f64, 0.1..0.55f64, 0.2..1.0f64, 0.0..0.5f64, 0.0..0.5f64)
        .prop_map(|(a, b, hi, lo_frac, tx, ty)| MapParams { a, b, hi, lo_frac, tx, ty })
}

fn build(params: &[MapParams]) -> IFSystem {
    let maps = params
        .iter()
        .map(|p| {
            let rot = |t: f64| Matrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
            let diag = Matrix::from_row_slice(2, 2, &[p.hi, 0.0, 0.0, p.hi * p.lo_frac]);
            ContractionMap::affine(rot(p.a) * diag * rot(p.b), Vector::from_vec(vec![p.tx, p.ty])).unwrap()
        })
        .collect();
    IFSystem::new(maps, 2, SeparationFlags::default()).unwrap()
}

fn system() -> impl Strategy<Value = IFSystem> {
    prop::collection::vec(map_params(), 2..=3).prop_map(|p| build(&p))
}

fn word(n: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(1..=n as u32, 1..=max_len).prop_map(Word::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lipschitz_constants_of_concatenations(ifs in system(), u in word(2, 5), v in word(2, 5)) {
        let mu = compose(&ifs, &u).unwrap();
        let mv = compose(&ifs, &v).unwrap();
        let muv = compose(&ifs, &u.concat(&v)).unwrap();
        prop_assert!(muv.lip_plus() <= mu.lip_plus() * mv.lip_plus() * (1.0 + 1e-12));
        prop_assert!(muv.lip_minus() >= mu.lip_minus() * mv.lip_minus() * (1.0 - 1e-12));
    }

    #[test]
    fn composed_maps_respect_their_lipschitz_bounds(
        ifs in system(),
        w in word(2, 6),
        x in prop::array::uniform2(-1.0..1.0f64),
        y in prop::array::uniform2(-1.0..1.0f64),
    ) {
        let m = compose(&ifs, &w).unwrap();
        let image = euclidean_distance(&apply(&m, &x).unwrap(), &apply(&m, &y).unwrap());
        let d = euclidean_distance(&x, &y);
        prop_assert!(image <= m.lip_plus() * d * (1.0 + 1e-9) + 1e-15);
        prop_assert!(image >= m.lip_minus() * d * (1.0 - 1e-9) - 1e-15);
    }

    #[test]
    fn halving_delta_never_lowers_the_cell_count(ifs in system(), e in 2..8i32) {
        let cloud = homogeneous_points(&ifs, 2f64.powi(-9)).unwrap();
        let delta = 2f64.powi(-e);
        // zero-offset grids at δ and 2δ nest
        prop_assert!(count_cells(&cloud, delta / 2.0, 0, 1) >= count_cells(&cloud, delta, 0, 1));
    }

    #[test]
    fn finer_stopping_has_at_least_as_many_words(ifs in system(), e in 1..9i32) {
        let coarse = delta_stopping(&ifs, 2f64.powi(-e)).unwrap();
        let fine = delta_stopping(&ifs, 2f64.powi(-e - 1)).unwrap();
        prop_assert!(fine.len() >= coarse.len());
    }

    #[test]
    fn doubling_chain_never_increases(ifs in system()) {
        let report = upper_lipschitz_dimension(&ifs, WordBudget(1 << 16), 1e-12);
        for pair in report.s_k_sequence.windows(2) {
            prop_assert!(pair[1].s_k <= pair[0].s_k + 1e-9, "{:?}", report.s_k_sequence);
        }
    }

    #[test]
    fn series_partial_sums_are_monotone_and_ordered(ifs in system(), d in 0.3..2.0f64) {
        let series = series_bounds(&ifs.with_budget(WordBudget(1 << 14)), d, 8).unwrap();
        for pair in series.levels.windows(2) {
            prop_assert!(pair[1].lower_partial >= pair[0].lower_partial);
            prop_assert!(pair[1].upper_partial >= pair[0].upper_partial);
        }
        for level in &series.levels {
            prop_assert!(level.lower_partial <= level.upper_partial);
        }
    }

    #[test]
    fn squared_system_gives_nearby_homogeneous_points(ifs in system(), e in 3..8i32) {
        let delta = 2f64.powi(-e);
        let a = homogeneous_points(&ifs, delta).unwrap();
        let b = homogeneous_points(&iterate_system(&ifs, 2).unwrap(), delta).unwrap();
        // both lie within δ·diam(F_∅ ∪ {x₀}) of F_∅; translations in [0, 0.5]²
        // and ratios below 0.55 keep that set inside [0, 1.12]²
        let bound = 2.0 * delta * 1.12 * 2f64.sqrt();
        prop_assert!(a.hausdorff_distance(&b) <= bound);
    }
}
