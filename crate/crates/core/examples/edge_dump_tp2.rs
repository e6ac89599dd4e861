// TP2 nodal error structure (development aid).
use mcfem::problems1d::*;
use mcfem::Formulation;

fn main() {
    for n in [10usize, 40, 160] {
        let cfg = Transport1dConfig::tp2(n, Formulation::WeightedResidual);
        for closure in [AuxClosure::OneSidedLeft, AuxClosure::IntegralRow] {
            let sol = solve_transport1d_with(&cfg, closure).unwrap();
            let psi = sol.psi();
            let flux = sol.flux_nodal().unwrap();
            let zs = sol.node_zs();
            println!("=== TP2 N={n} {closure:?} (psi_scale={:.3e})", 1.6917e-3);
            for i in (0..=n).rev().take(7).collect::<Vec<_>>().into_iter().rev() {
                let ex = analytic_transport(&cfg, zs[i]);
                println!("  z={:.4} psi={:+.6e} err={:+.3e} F={:+.4e}", zs[i], psi[i], psi[i]-ex, flux[i]);
            }
        }
    }
}
