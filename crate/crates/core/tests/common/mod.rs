use nalgebra::{DMatrix, DVector, SymmetricEigen};
use spherelab::Mesh;

/// `c² = 1 / μ_max` with `μ_max` the largest eigenvalue of `L⁻¹ B L⁻ᵀ`,
/// `L Lᵀ = K + M`, assembled densely from the mesh edges and weights.
pub fn dense_trace_constant(mesh: &Mesh) -> f64 {
    let n = mesh.len();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for e in mesh.edges() {
        a[(e.a, e.a)] += e.weight;
        a[(e.b, e.b)] += e.weight;
        a[(e.a, e.b)] -= e.weight;
        a[(e.b, e.a)] -= e.weight;
    }
    for (k, w) in mesh.area_weights().iter().enumerate() {
        a[(k, k)] += w;
    }
    let l = a.cholesky().expect("K + M is positive definite").l();
    let l_inv = l.try_inverse().unwrap();
    let b = DMatrix::from_diagonal(&DVector::from_column_slice(mesh.arc_weights()));
    let c = &l_inv * b * l_inv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let mu = SymmetricEigen::new(c).eigenvalues.max();
    (1.0 / mu).sqrt()
}
