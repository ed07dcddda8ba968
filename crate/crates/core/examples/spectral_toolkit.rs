//! Signed Laplacians: construction, factorizations, the PSD test,
//! pseudoinverse and effective resistance.

use nalgebra::DVector;
use sis_budget::linalg::max_abs;
use sis_budget::spectral::{
    augment, effective_resistance, incidence_factorization, is_psd_simple_zero, laplacian_from_weights,
    laplacian_pseudoinverse, projected_lambda_min, split_signed, Edge, LoopyLaplacian, Orientation,
    WeightedGraph,
};
use sis_budget::Tolerance;

fn main() {
    let tol = Tolerance::default();

    // unit path 1-2-3: series resistance between the ends is 2
    let path = WeightedGraph::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)]).unwrap();
    let l = laplacian_from_weights(&path);
    let pinv = laplacian_pseudoinverse(&l, tol).unwrap();
    println!("path L =\n{:.3}", l.matrix());
    println!("R(1, 3) = {:.12}", effective_resistance(&pinv, 0, 2));

    // a square with one negative edge
    let g = WeightedGraph::new(
        4,
        vec![
            Edge::new(0, 1, 1.0),
            Edge::new(1, 2, 1.0),
            Edge::new(2, 3, 1.0),
            Edge::new(3, 0, 1.0),
            Edge::new(0, 2, -0.3),
        ],
    )
    .unwrap();
    let l = laplacian_from_weights(&g);
    let f = incidence_factorization(&g, &Orientation::default()).unwrap();
    println!("|E W E^T - L| = {:.1e}", max_abs(&(f.product() - l.matrix())));

    let (pos, neg) = split_signed(&g);
    // negative edges keep their sign
    let split = laplacian_from_weights(&pos).matrix() + laplacian_from_weights(&neg).matrix();
    println!("|L+ + L- - L| = {:.1e}", max_abs(&(split - l.matrix())));

    println!("projected lambda_min = {:.6}", projected_lambda_min(&l).unwrap());
    println!("PSD with simple zero: {}", is_psd_simple_zero(&l, tol).unwrap());

    // push the negative edge past the limit
    let worse = WeightedGraph::new(
        4,
        g.edges()
            .iter()
            .map(|e| if e.w < 0.0 { Edge::new(e.i, e.j, -2.0) } else { *e })
            .collect(),
    )
    .unwrap();
    let l_worse = laplacian_from_weights(&worse);
    println!("with w13 = -2: PSD with simple zero: {}", is_psd_simple_zero(&l_worse, tol).unwrap());
    println!("pseudoinverse: {}", laplacian_pseudoinverse(&l_worse, tol).unwrap_err());

    // loopy Laplacian and its augmentation by a ground node
    let h = LoopyLaplacian::new(laplacian_from_weights(&path), DVector::from_vec(vec![0.5, 0.0, 0.25])).unwrap();
    let aug = augment(&h).unwrap();
    println!("augmented =\n{:.3}", aug.matrix());
    println!("strictly loopy: {}, augmented PSD: {}", h.is_strictly_loopy(), is_psd_simple_zero(&aug, tol).unwrap());
}
