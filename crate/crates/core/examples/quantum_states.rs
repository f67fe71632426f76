//! Two maximally entangled pairs, reduced states and entropies.
//!
//! ```bash
//! cargo run -p diqkd --example quantum_states
//! ```

use diqkd::games::psi_two;
use diqkd::linalg::{hermitian_eig, pauli_z, QuantumState};
use diqkd::noise::werner;

fn main() -> Result<(), diqkd::error::Error> {
    let psi = psi_two();
    println!("Ψ₂ has dimension {} with factors {:?}", psi.dim(), psi.dims());

    // Alice holds factors 0 and 1; her reduced state is maximally mixed.
    let alice = psi.partial_trace(&[0, 1])?;
    println!("S(ρ_A) = {:.12} bits", alice.von_neumann_entropy()?);
    println!("S(Ψ₂)  = {:.12} bits", psi.von_neumann_entropy()?);

    let phi = QuantumState::phi_plus();
    let zz = diqkd::linalg::kron(&pauli_z(), &pauli_z());
    println!("⟨Z⊗Z⟩ on Ψ⁺ = {:.12}", phi.expectation(&zz)?.re);

    for nu in [1.0, 0.9, 0.5, 0.0] {
        let rho = werner(nu)?;
        let (vals, _) = hermitian_eig(rho.matrix())?;
        println!("ρ_ν at ν = {nu}: eigenvalues {vals:.4?}, entropy {:.6}", rho.von_neumann_entropy()?);
    }
    Ok(())
}
