use num_complex::Complex64;
use pathmarker::algebra::{PathBasis, PathPolState};
use pathmarker::polarization::{PolAxis, PolBasis};
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Independent oracle: a state as a plain 4-vector over (path ⊗ {H, V}),
/// index `2·path + pol`, built from hand-written Jones vectors.
mod oracle {
    use super::c;
    use num_complex::Complex64;

    pub fn jones_l() -> [Complex64; 2] {
        let s = 0.5f64.sqrt();
        [c(s, 0.0), c(0.0, -s)]
    }

    pub fn jones_r() -> [Complex64; 2] {
        let s = 0.5f64.sqrt();
        [c(s, 0.0), c(0.0, s)]
    }

    pub fn marked_lens_plane() -> [Complex64; 4] {
        let s = 0.5f64.sqrt();
        let (l, r) = (jones_l(), jones_r());
        [l[0] * s, l[1] * s, r[0] * s, r[1] * s]
    }

    pub fn unmarked_lens_plane() -> [Complex64; 4] {
        let s = 0.5f64.sqrt();
        [c(s, 0.0), c(0.0, 0.0), c(s, 0.0), c(0.0, 0.0)]
    }

    /// (D, V) from the path-reduced density matrix and the marker overlap.
    pub fn duality(psi: &[Complex64; 4]) -> (f64, f64) {
        let mut rho = [[c(0.0, 0.0); 2]; 2];
        for (i, row) in rho.iter_mut().enumerate() {
            for (j, r) in row.iter_mut().enumerate() {
                for p in 0..2 {
                    *r += psi[2 * i + p] * psi[2 * j + p].conj();
                }
            }
        }
        let v = 2.0 * rho[0][1].norm();
        let wa = rho[0][0].re;
        let wb = rho[1][1].re;
        let overlap: Complex64 = (0..2).map(|p| psi[p].conj() * psi[2 + p]).sum();
        let d = (1.0 - overlap.norm_sqr() / (wa * wb)).sqrt();
        (d, v)
    }
}

fn to_linear_vector(s: &PathPolState) -> [Complex64; 4] {
    let s = s.in_pol_basis(PolBasis::Linear);
    [
        s.amplitude(0, 0),
        s.amplitude(0, 1),
        s.amplitude(1, 0),
        s.amplitude(1, 1),
    ]
}

#[test]
fn marked_state_matches_oracle_vector() {
    let v = to_linear_vector(&PathPolState::initial(true));
    for (a, b) in v.iter().zip(oracle::marked_lens_plane()) {
        assert!((a - b).norm() < TOL);
    }
}

#[test]
fn duality_of_marked_state_against_oracle() {
    let (d, v) = oracle::duality(&oracle::marked_lens_plane());
    assert!((d - 1.0).abs() < TOL && v.abs() < TOL);
    let r = PathPolState::initial(true).duality().unwrap();
    assert!((r.distinguishability - d).abs() < TOL);
    assert!((r.visibility - v).abs() < TOL);
}

#[test]
fn duality_of_unmarked_state_against_oracle() {
    let (d, v) = oracle::duality(&oracle::unmarked_lens_plane());
    assert!(d.abs() < TOL && (v - 1.0).abs() < TOL);
    let r = PathPolState::initial(false).duality().unwrap();
    assert!((r.distinguishability - d).abs() < TOL);
    assert!((r.visibility - v).abs() < TOL);
}

#[test]
fn marker_theorem() {
    let s = PathPolState::initial(true).apply_lens().unwrap();
    let j = s.detector_statistics(PolBasis::Circular).unwrap();
    assert_eq!(j.get(0, PolAxis::R).unwrap(), 0.0);
    assert_eq!(j.get(1, PolAxis::L).unwrap(), 0.0);
    assert!((j.get(0, PolAxis::L).unwrap() - 0.5).abs() < TOL);
    assert!((j.get(1, PolAxis::R).unwrap() - 0.5).abs() < TOL);
}

#[test]
fn eraser_theorem() {
    let s = PathPolState::initial(true).apply_lens().unwrap();
    let j = s.detector_statistics(PolBasis::Linear).unwrap();
    for axis in [PolAxis::H, PolAxis::V] {
        let [a, b] = j.conditional_on(axis).unwrap();
        assert!((a - 0.5).abs() < TOL && (b - 0.5).abs() < TOL);
    }
}

#[test]
fn dark_port_theorem() {
    let s = PathPolState::initial(false);
    let pm = s.in_path_basis(PathBasis::PlusMinus).unwrap();
    for col in 0..2 {
        assert!(pm.amplitude(1, col).norm() < TOL);
    }
    let j = s
        .apply_lens()
        .unwrap()
        .detector_statistics(PolBasis::Linear)
        .unwrap();
    let [a, b] = j.detector_marginals();
    assert!((a - 0.5).abs() < TOL && (b - 0.5).abs() < TOL);
    assert!((s.duality().unwrap().visibility - 1.0).abs() < TOL);
}

fn amp() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| c(re, im))
}

fn path_basis() -> impl Strategy<Value = PathBasis> {
    prop_oneof![Just(PathBasis::SlitAB), Just(PathBasis::PlusMinus)]
}

fn pol_basis() -> impl Strategy<Value = PolBasis> {
    prop_oneof![Just(PolBasis::Circular), Just(PolBasis::Linear)]
}

prop_compose! {
    fn state()(a in prop::array::uniform4(amp()), pb in path_basis(), qb in pol_basis())
        -> PathPolState {
        let n = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt().max(1e-3);
        PathPolState::new([[a[0] / n, a[1] / n], [a[2] / n, a[3] / n]], pb, qb)
    }
}

fn other_path(b: PathBasis) -> PathBasis {
    match b {
        PathBasis::SlitAB => PathBasis::PlusMinus,
        _ => PathBasis::SlitAB,
    }
}

fn other_pol(b: PolBasis) -> PolBasis {
    match b {
        PolBasis::Circular => PolBasis::Linear,
        PolBasis::Linear => PolBasis::Circular,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn basis_changes_and_lens_preserve_norm(s in state()) {
        let n = s.norm_sqr();
        prop_assert!((s.in_path_basis(other_path(s.path_basis())).unwrap().norm_sqr() - n).abs() < TOL);
        prop_assert!((s.in_pol_basis(other_pol(s.pol_basis())).norm_sqr() - n).abs() < TOL);
        prop_assert!((s.apply_lens().unwrap().norm_sqr() - n).abs() < TOL);
    }

    #[test]
    fn round_trips_are_identity(s in state()) {
        let p = s.in_path_basis(other_path(s.path_basis())).unwrap()
            .in_path_basis(s.path_basis()).unwrap();
        prop_assert!(p.max_abs_diff(&s).unwrap() < TOL);
        let q = s.in_pol_basis(other_pol(s.pol_basis())).in_pol_basis(s.pol_basis());
        prop_assert!(q.max_abs_diff(&s).unwrap() < TOL);
    }

    #[test]
    fn lens_preserves_inner_products(a in state(), b in state()) {
        let b = b.in_path_basis(a.path_basis()).unwrap();
        let before = a.inner(&b).unwrap();
        let after = a.apply_lens().unwrap().inner(&b.apply_lens().unwrap()).unwrap();
        prop_assert!((before - after).norm() < TOL);
    }

    #[test]
    fn slit_orthogonality_maps_to_detector_orthogonality(
        ma in prop::array::uniform2(amp()),
        mb in prop::array::uniform2(amp()),
    ) {
        let zero = c(0.0, 0.0);
        let a = PathPolState::new([[ma[0], ma[1]], [zero, zero]], PathBasis::SlitAB, PolBasis::Linear);
        let b = PathPolState::new([[zero, zero], [mb[0], mb[1]]], PathBasis::SlitAB, PolBasis::Linear);
        prop_assert_eq!(a.inner(&b).unwrap(), zero);
        let da = a.apply_lens().unwrap();
        let db = b.apply_lens().unwrap();
        prop_assert!(da.inner(&db).unwrap().norm() < TOL);
    }

    #[test]
    fn statistics_sum_to_one(s in state(), basis in pol_basis()) {
        let j = s.apply_lens().unwrap().detector_statistics(basis).unwrap();
        prop_assert!((j.total() - 1.0).abs() < TOL);
    }

    #[test]
    fn complementary_projections_are_complete(s in state(), axis in prop::sample::select(PolAxis::ALL.to_vec())) {
        let p = s.project(axis).probability() + s.project(axis.orthogonal()).probability();
        prop_assert!((p - 1.0).abs() < TOL);
    }

    #[test]
    fn duality_bound_for_product_markers(
        alpha in 0.0f64..std::f64::consts::FRAC_PI_2,
        phase in 0.0f64..std::f64::consts::TAU,
        ma in prop::array::uniform2(amp()),
        mb in prop::array::uniform2(amp()),
    ) {
        let norm = |m: [Complex64; 2]| {
            let n = (m[0].norm_sqr() + m[1].norm_sqr()).sqrt().max(1e-3);
            [m[0] / n, m[1] / n]
        };
        let (ma, mb) = (norm(ma), norm(mb));
        let ca = c(alpha.cos(), 0.0);
        let cb = Complex64::from_polar(alpha.sin(), phase);
        let s = PathPolState::new(
            [[ca * ma[0], ca * ma[1]], [cb * mb[0], cb * mb[1]]],
            PathBasis::SlitAB,
            PolBasis::Linear,
        );
        let r = s.duality().unwrap();
        prop_assert!(r.distinguishability.powi(2) + r.visibility.powi(2) <= 1.0 + 1e-9);
        prop_assert!((0.0..=1.0).contains(&r.distinguishability));
        prop_assert!((0.0..=1.0).contains(&r.visibility));
        let v = [s.amplitude(0, 0), s.amplitude(0, 1), s.amplitude(1, 0), s.amplitude(1, 1)];
        if alpha.sin() * alpha.cos() > 1e-3 {
            let (d, vis) = oracle::duality(&v);
            prop_assert!((d - r.distinguishability).abs() < 1e-9);
            prop_assert!((vis - r.visibility).abs() < 1e-9);
        }
    }
}
