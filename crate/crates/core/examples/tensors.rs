//! Labelled registers, partial traces and the commitment states.
//!
//!     cargo run --example tensors

use cheatlab::catalog::{commit_state, rot_state};
use cheatlab::tensor::{Space, TensorOperator};

fn show(label: &str, op: &TensorOperator) {
    println!("{label} on {}:", op.space());
    let m = op.matrix();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:6.3}", m[(i, j)].re)).collect();
        println!("  {}", row.join(" "));
    }
}

fn main() -> cheatlab::Result<()> {
    // |phi_0> = (|00> + |22>)/sqrt 2 on A ⊗ B.
    let phi = commit_state(0)?;
    let rho = phi.density();
    show("Bob's half of phi_0", &rho.partial_trace(&["A"])?);

    // Reordering registers permutes the matrix, not the physics.
    let swapped = rho.permute(&["B", "A"])?;
    println!("same operator after reorder: {}", swapped.aligned_to(rho.space())?.matrix() == rho.matrix());

    let y = Space::new(&[("Y", 2)])?;
    let joint = TensorOperator::identity(y).scale(0.5).kron(&rot_state(1)?.density())?;
    println!("trace of I/2 ⊗ |psi_1><psi_1|: {:.3}", joint.trace().re);
    println!("is a density operator: {}", joint.is_density(1e-12));
    Ok(())
}
