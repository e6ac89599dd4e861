// WR non-oscillation across Pe at N=100 (development aid).
use mcfem::problems1d::*;
use mcfem::Formulation;

fn main() {
    let n = 100usize;
    for pe in [4.0, 40.0, 400.0, 4000.0] {
        let cfg = Mc1dConfig {
            musigma_u: 2.0 * pe * n as f64,
            n_elems: n,
            formulation: Formulation::WeightedResidual,
            outflow: OutflowBc::Natural,
            ..Default::default()
        };
        let h = 1.0 / n as f64;
        for (name, mode) in [("split", SourceMode::SplitQuadrature), ("nodal", SourceMode::NodalInterpolation)] {
            let sol = solve_mc1d_with(&cfg, AuxClosure::IntegralRow, mode).unwrap();
            let rec = sol.recovered_b_midpoints();
            let maxb = rec.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()));
            let c: Vec<usize> = [1e-6, 1e-4, 1e-3, 1e-2]
                .iter()
                .map(|f| sign_alternations(&rec, f * maxb, Some((0.4 - h, 0.6 + h))))
                .collect();
            println!("Pe={pe:6} {name}: counts at floors [1e-6,1e-4,1e-3,1e-2] = {c:?}  max|b|={maxb:.3}");
        }
        let gcfg = Mc1dConfig { formulation: Formulation::Galerkin, ..cfg.clone() };
        let gsol = solve_mc1d_with(&gcfg, AuxClosure::IntegralRow, SourceMode::SplitQuadrature).unwrap();
        let grec = gsol.recovered_b_midpoints();
        let gmax = grec.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()));
        let gc = sign_alternations(&grec, 1e-4 * gmax, Some((0.4 - h, 0.6 + h)));
        println!("               galerkin count at 1e-4 floor = {gc}, max {gmax:.2}");
    }
}
