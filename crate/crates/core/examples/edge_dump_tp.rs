// Inspect transport WR errors along the domain (development aid).
use mcfem::problems1d::*;
use mcfem::Formulation;

fn main() {
    for n in [80usize, 320] {
        let cfg = Transport1dConfig::tp1(n, Formulation::WeightedResidual);
        for closure in [AuxClosure::IntegralRow, AuxClosure::OneSidedLeft] {
            let sol = solve_transport1d_with(&cfg, closure).unwrap();
            let psi = sol.psi();
            let flux = sol.flux_nodal().unwrap();
            let zs = sol.node_zs();
            let mut worst = (0usize, 0.0f64);
            for i in 0..=n {
                let e = (psi[i] - analytic_transport(&cfg, zs[i])).abs();
                if e > worst.1 {
                    worst = (i, e);
                }
            }
            println!("=== TP1 N={n} {closure:?}: worst psi err {:.3e} at node {} (z={:.4})", worst.1, worst.0, zs[worst.0]);
            // print a few nodes around the worst and near both ends
            let idxs: Vec<usize> = [0, 1, 2, n/2, worst.0.saturating_sub(2), worst.0.saturating_sub(1), worst.0, (worst.0+1).min(n), n-2, n-1, n].to_vec();
            for &i in idxs.iter() {
                let ex = analytic_transport(&cfg, zs[i]);
                // exact F = psi' = r e^{r(z-1)}(...)/(1-e^{-r}) for TP1
                let r = 400.0;
                let fex = r * (r * (zs[i] - 1.0)).exp() / (1.0 - (-r as f64).exp());
                println!(
                    "  z={:.5} psi={:+.6e} ex={:+.6e} err={:+.2e} | F={:+.5e} Fex={:+.5e}",
                    zs[i], psi[i], ex, psi[i] - ex, flux[i], fex
                );
            }
        }
    }
}
