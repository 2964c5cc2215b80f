use crate::geometry::Point;

use super::equilibrium::EquilibriumSolution;

/// Potential of the equilibrium charges at an arbitrary point:
/// `u(x) = sum_j w_j mu_j k(x, x_j)`.
///
/// A point landing on a node (within 1e-8 cell sizes) uses the same
/// regularized self-cell value as the matrix diagonal, so evaluating at
/// the nodes reproduces the solved system.
pub fn eval_potential_at(sol: &EquilibriumSolution, p: Point) -> f64 {
    let spec = sol.kernel();
    let q = sol.quadrature();
    let snap = 1e-8 * q.cell_size();
    let snap2 = snap * snap;
    let mut acc = 0.0;
    for ((node, charge), weight) in q.nodes().iter().zip(sol.charge()).zip(q.weights()) {
        let dx = p[0] - node[0];
        let dy = p[1] - node[1];
        let dz = p[2] - node[2];
        let r2 = dx * dx + dy * dy + dz * dz;
        if r2 <= snap2 {
            acc += charge * spec.self_cell_diagonal(*weight);
        } else {
            acc += charge * spec.eval(r2.sqrt());
        }
    }
    acc
}

pub fn eval_potential(sol: &EquilibriumSolution, points: &[Point]) -> Vec<f64> {
    points.iter().map(|&p| eval_potential_at(sol, p)).collect()
}
