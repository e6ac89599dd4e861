// Inspect discrete vs exact fields near the source edges (development aid).
use mcfem::problems1d::*;
use mcfem::Formulation;

fn main() {
    let n = 50;
    let cfg = Mc1dConfig {
        n_elems: n,
        formulation: Formulation::WeightedResidual,
        outflow: OutflowBc::Natural,
        ..Default::default()
    };
    for (closure, mode) in [
        (AuxClosure::IntegralRow, SourceMode::SplitQuadrature),
        (AuxClosure::IntegralRow, SourceMode::NodalInterpolation),
    ] {
        let sol = solve_mc1d_with(&cfg, closure, mode).unwrap();
        let a = sol.a_y();
        let b = sol.b_x_nodal().unwrap();
        let zs = sol.node_zs();
        let rec = sol.recovered_b_midpoints();
        println!("=== {closure:?} {mode:?}");
        println!("{:>6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}", "z", "A_h", "A_ex", "b_h", "b_ex", "rec_mid", "bex_mid");
        for i in 16..36 {
            let (a_ex, b_ex) = analytic_mc1d(&cfg, zs[i]);
            let (zm, rm) = if i < n { rec[i] } else { (0.0, 0.0) };
            let (_, bm_ex) = analytic_mc1d(&cfg, zm);
            println!(
                "{:6.3} {:12.5e} {:12.5e} {:12.5e} {:12.5e} {:12.5e} {:12.5e}",
                zs[i], a[i], a_ex, b[i], b_ex, rm, bm_ex
            );
        }
    }
}
