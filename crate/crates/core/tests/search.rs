use modawgn::analysis::{optimal_map_search, pe_uniform};
use modawgn::WrappedGaussian;

#[test]
fn uniform_prior_search_finds_the_antipodal_ridge() {
    let g = WrappedGaussian::new(5.0, 1.0).unwrap();
    let s = optimal_map_search(&g, 0.5, 5.0 / 200.0).unwrap();
    assert!(s.ridge_confirmed, "{:?}", &s.argmin[..s.argmin.len().min(8)]);
    assert!(s.antipodal_is_power_minimal, "{:?}", s.power_minimal);
    assert!((s.power_minimal_power - 1.5625).abs() < 1e-9);
    // The ±Δ/4 pair sits on the grid, so the minimum is the closed form.
    assert!((s.min_pe - pe_uniform(&g)).abs() < 1e-8, "{} vs {}", s.min_pe, pe_uniform(&g));
    assert!((s.refined_separation - 2.5).abs() < 1e-3 * 5.0, "{}", s.refined_separation);
    assert_eq!(s.surface.len(), 200 * 199);
    // Whole ridge: h1 = h0 ± Δ/2 for every h0 on the grid, both orientations.
    assert_eq!(s.argmin.len(), 200);
}

#[test]
fn skewed_prior_keeps_the_ridge() {
    let g = WrappedGaussian::new(5.0, 1.0).unwrap();
    let s = optimal_map_search(&g, 0.3, 5.0 / 200.0).unwrap();
    assert!(s.ridge_confirmed);
    assert_eq!(s.argmin.len(), 200);
    // With E[x²] = π0·h0² + (1 − π0)·h1² on the ridge h1 = h0 + Δ/2, the
    // minimum sits at h0 = −(1 − π0)·Δ/2 rather than at −Δ/4.
    let m = s.power_minimal;
    assert!((m.h0() + 1.75).abs() < 1e-9 && (m.h1() - 0.75).abs() < 1e-9, "{m:?}");
    assert!((s.power_minimal_power - 1.3125).abs() < 1e-9);
    assert!(!s.antipodal_is_power_minimal);
}

#[test]
fn search_rejects_coarse_grids() {
    let g = WrappedGaussian::new(5.0, 1.0).unwrap();
    assert!(optimal_map_search(&g, 0.5, 0.1).is_err());
    assert!(optimal_map_search(&g, 1.5, 0.01).is_err());
}
