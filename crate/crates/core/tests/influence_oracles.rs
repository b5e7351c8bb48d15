mod common;

use common::*;
use rand::Rng;
use spatial_influence::influence::{lag_sum, location_influence};
use spatial_influence::{
    contaminate_exact, contaminated_moran_closed, influence_at, influence_surface, lif_at, lif_map, moran_i,
    standardize, InfluenceForm, InfluenceModel, LifOptions, RationalInfluence, SurfaceSpec,
};

#[test]
fn closed_form_equals_brute_force_on_torus() {
    let mut r = rng(10);
    let w = rook(4, 4, true);
    let d = dense(&w);
    for site in [0, 5, 15] {
        let z = exact_observations(zero_site_field(&mut r, 16, site));
        let mc = moran_i(&z, &w).unwrap();
        for z1 in [-4.0, -2.0, -0.5, 0.7, 2.0, 4.0] {
            let closed = contaminated_moran_closed(&z, &w, site, z1).unwrap();
            let exact = contaminate_exact(&z, &w, site, z1).unwrap();
            assert!((closed - exact).abs() < 1e-10);
            let brute = brute_influence(&z.standardized, &d, site, z1);
            assert!((16.0 * (exact - mc) - brute).abs() < 1e-10);
            // governing form is n (MC_c - MC)
            let ic = influence_at(&z, &w, site, z1).unwrap();
            assert!((ic - brute).abs() < 1e-10, "site {site} z1 {z1}: {ic} vs {brute}");
        }
    }
}

#[test]
fn simplified_form_differs_by_known_term() {
    // Simplified - Recentered = (n - 2) MC z1^2 / D
    let mut r = rng(11);
    let w = rook(6, 6, true);
    let z = exact_observations(zero_site_field(&mut r, 36, 3));
    let mc = moran_i(&z, &w).unwrap();
    let s = lag_sum(&z, &w, 3).unwrap();
    let rec = RationalInfluence::closed(InfluenceForm::Recentered, 36, mc, s);
    let simp = RationalInfluence::closed(InfluenceForm::Simplified, 36, mc, s);
    for z1 in [-3.0, -1.0, 0.5, 2.0] {
        let d = 35.0 / 36.0 * z1 * z1 + 36.0;
        let gap = simp.eval(z1) - rec.eval(z1);
        assert!((gap - 34.0 * mc * z1 * z1 / d).abs() < 1e-12);
    }
}

#[test]
fn non_torus_discrepancy_is_measured() {
    // On asymmetric row-standardized weights the closed form only
    // approximates the exact contamination; report how far off it is.
    let mut r = rng(12);
    let w = rook(6, 6, false);
    let mut worst: f64 = 0.0;
    for site in [0, 1, 14] {
        let z = exact_observations(zero_site_field(&mut r, 36, site));
        for z1 in [-2.0, -1.0, 1.0, 2.0] {
            let closed = contaminated_moran_closed(&z, &w, site, z1).unwrap();
            let exact = contaminate_exact(&z, &w, site, z1).unwrap();
            worst = worst.max((closed - exact).abs());
        }
    }
    eprintln!("closed vs exact contaminated MC on 6x6 rook (non-torus): max |diff| = {worst:.3e}");
    assert!(worst.is_finite());
}

#[test]
fn zero_contamination_and_slope() {
    let mut r = rng(13);
    let w = rook(7, 9, false);
    for _ in 0..5 {
        let z = standardize(&normals(&mut r, 63)).unwrap();
        for _ in 0..10 {
            let k = r.random_range(0..63);
            assert!(influence_at(&z, &w, k, 0.0).unwrap().abs() < 1e-12);
            let h = 1e-5;
            let slope = (influence_at(&z, &w, k, h).unwrap() - influence_at(&z, &w, k, -h).unwrap()) / (2.0 * h);
            assert!((slope - 2.0 * lag_sum(&z, &w, k).unwrap()).abs() < 1e-6);
        }
    }
}

#[test]
fn asymptotes_of_both_forms() {
    // I_c(z1) -> -p2 / q2 as |z1| -> infinity
    let (n, mc, s) = (100usize, 0.3, 0.8);
    let nf = n as f64;
    let rec = RationalInfluence::closed(InfluenceForm::Recentered, n, mc, s);
    let simp = RationalInfluence::closed(InfluenceForm::Simplified, n, mc, s);
    let rec_limit = -(nf / (nf - 1.0)) * (1.0 + (nf - 1.0) * mc);
    let simp_limit = -(nf / (nf - 1.0)) * (mc + 1.0);
    for x in [-1e6, 1e6] {
        assert!((rec.eval(x) - rec_limit).abs() < 1e-3);
        assert!((simp.eval(x) - simp_limit).abs() < 1e-3);
    }
}

#[test]
fn quadrature_matches_dense_trapezoid() {
    let mut r = rng(14);
    let w = rook(10, 10, false);
    let z = standardize(&normals(&mut r, 100)).unwrap();
    for model in [InfluenceModel::default(), InfluenceModel::Closed(InfluenceForm::Simplified), InfluenceModel::Exact] {
        let opts = LifOptions { model, ..Default::default() };
        for k in [0, 37, 99] {
            let f = location_influence(&z, &w, k, model).unwrap();
            let oracle = trapezoid(|x| f.eval(x).abs(), -2.0, 2.0, 1_000_001);
            let lif = lif_at(&z, &w, k, &opts).unwrap();
            assert!(((lif - oracle) / oracle).abs() < 1e-6, "{model:?} {k}: {lif} vs {oracle}");
        }
    }
}

#[test]
fn lif_is_symmetric_in_lag_sum() {
    for form in [InfluenceForm::Recentered, InfluenceForm::Simplified] {
        for s in [0.1, 0.5, 1.0, 2.0] {
            let a = RationalInfluence::<f64>::closed(form, 100, 0.3, s).lif(2.0, 1e-9).unwrap();
            let b = RationalInfluence::closed(form, 100, 0.3, -s).lif(2.0, 1e-9).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn lif_map_extremes_match_exhaustive_trapezoid() {
    let cfg = spatial_influence::SarConfig::new(0.5, rook(10, 10, false), 2024, 1).unwrap();
    let field = spatial_influence::sar_generate(&cfg, 0).unwrap().field;
    let z = standardize(&field).unwrap();
    let scores = lif_map(&z, &cfg.weights, &LifOptions::default()).unwrap();
    let oracle: Vec<f64> = (0..100)
        .map(|k| {
            let f = location_influence(&z, &cfg.weights, k, InfluenceModel::default()).unwrap();
            trapezoid(|x| f.eval(x).abs(), -2.0, 2.0, 200_001)
        })
        .collect();
    let argmax = (0..100).max_by(|&a, &b| oracle[a].total_cmp(&oracle[b])).unwrap();
    let argmin = (0..100).min_by(|&a, &b| oracle[a].total_cmp(&oracle[b])).unwrap();
    assert_eq!(scores.argmax, argmax);
    assert_eq!(scores.argmin, argmin);
}

#[test]
fn extreme_neighbourhood_ranks_in_top_decile() {
    let mut r = rng(15);
    let w = rook(10, 10, false);
    let mut raw = normals(&mut r, 100);
    // cell 44 (row 4, col 4): every neighbour at an extreme
    for nb in w.neighbors(44).to_vec() {
        raw[nb] = 6.0;
    }
    let z = standardize(&raw).unwrap();
    let scores = lif_map(&z, &w, &LifOptions::default()).unwrap();
    assert!(scores.rank[44] <= 10, "rank {}", scores.rank[44]);
}

#[test]
fn lif_map_is_thread_count_independent() {
    let mut r = rng(16);
    let w = rook(12, 12, false);
    let z = standardize(&normals(&mut r, 144)).unwrap();
    let opts = LifOptions { model: InfluenceModel::Exact, ..Default::default() };
    let a = lif_map(&z, &w, &opts).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| lif_map(&z, &w, &opts).unwrap());
    assert_eq!(a, b);
}

#[test]
fn surface_invariants() {
    let levels: Vec<f64> = (0..7).map(|i| -0.7 + 0.7 * i as f64 / 3.0).collect();
    let spec = SurfaceSpec {
        n: 100,
        mc_levels: levels.clone(),
        z1_range: (-3.0, 3.0),
        lag_range: (-2.0, 2.0),
        mc_range: (-0.7, 0.7),
        z1_points: 31,
        lag_points: 21,
        mc_points: 7,
        form: InfluenceForm::Recentered,
    };
    let s = influence_surface(&spec).unwrap();
    assert_eq!(s.lag[10], 0.0);
    assert_eq!(s.z1[15], 0.0);
    for (level, (mc, grid)) in s.by_mc.iter().enumerate() {
        assert!(grid[15].iter().all(|&v| v == 0.0));
        for (i, &x) in s.z1.iter().enumerate() {
            // lag = 0 slice equals the zero-lag surface at the same MC
            assert!((grid[i][10] - s.zero_lag[i][level]).abs() < 1e-12);
            assert!((s.mc_axis[level] - mc).abs() < 1e-12);
            if x > 0.0 {
                assert!(grid[i].windows(2).all(|p| p[1] > p[0]));
            }
        }
    }
    assert!(s.zero_lag[15].iter().all(|&v| v == 0.0));
}
