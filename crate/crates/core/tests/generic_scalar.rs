//! The numeric kernel is generic over the scalar; exercise the `f32`
//! instantiation end to end at its own tolerances.

use backflow_core::ctime::ContinuousModel;
use backflow_core::dynamics::{
    eigenvalues_recurrence, eigenvalues_unitary_closed_form, CollisionModel,
};
use backflow_core::env::{build_chain, neighbor_mutual_information, ChainParams};
use backflow_core::pauli::PauliDiagonalMap;
use backflow_core::qmat::{trace_norm, DensityMatrix, HermitianOperator};

#[test]
fn single_precision_trajectories_track_double_precision() {
    let params32 = ChainParams::<f32>::closed(0.3, 0.1, 0.2).unwrap();
    let params64 = ChainParams::<f64>::closed(0.3, 0.1, 0.2).unwrap();
    let model32 = CollisionModel::unitary(build_chain(params32).unwrap());
    let traj32 = eigenvalues_recurrence(&model32, 8);
    for n in 0..=8 {
        let (lam64, lam3_64) = eigenvalues_unitary_closed_form(&params64, n).unwrap();
        assert!((traj32.lam(n) as f64 - lam64).abs() < 1e-5);
        assert!((traj32.lam3(n) as f64 - lam3_64).abs() < 1e-5);
    }
}

#[test]
fn single_precision_spectra_and_norms() {
    let rho = DensityMatrix::<f32>::from_real(
        4,
        &[
            0.25, 0.0, 0.0, 0.125, //
            0.0, 0.25, 0.0, 0.0, //
            0.0, 0.0, 0.25, 0.0, //
            0.125, 0.0, 0.0, 0.25,
        ],
    )
    .unwrap();
    let evs = rho.eigenvalues();
    for (e, x) in evs.iter().zip([0.375f32, 0.25, 0.25, 0.125]) {
        assert!((e - x).abs() < 1e-6);
    }
    assert!((trace_norm(rho.operator()) - 1.0).abs() < 1e-6);

    let map = PauliDiagonalMap::<f32>::new([1.0, 0.5, 0.5, -0.25]).unwrap();
    assert!(map.is_positive(1e-4));
    let op = HermitianOperator::new(backflow_core::pauli::pauli_matrix::<f32>(1)).unwrap();
    let out = map.apply(&op).unwrap();
    assert!((out.matrix().get(0, 1).re - 0.5).abs() < 1e-6);
}

#[test]
fn single_precision_continuous_model_and_chain() {
    let model = ContinuousModel::<f32>::new(1.0, 0.5).unwrap();
    let (lam, lam3) = model.lambda_t(1.0);
    let model64 = ContinuousModel::<f64>::new(1.0, 0.5).unwrap();
    let (lam64, lam3_64) = model64.lambda_t(1.0);
    assert!((lam as f64 - lam64).abs() < 1e-5);
    assert!((lam3 as f64 - lam3_64).abs() < 1e-5);

    let p32 = ChainParams::<f32>::closed(0.4, 0.05, 0.3).unwrap();
    let p64 = ChainParams::<f64>::closed(0.4, 0.05, 0.3).unwrap();
    let i32v = neighbor_mutual_information(&p32).unwrap();
    let i64v = neighbor_mutual_information(&p64).unwrap();
    assert!((i32v as f64 - i64v).abs() < 1e-5);
}
