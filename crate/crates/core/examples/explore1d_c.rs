// Full variant matrix for MC Table I (development aid).
use mcfem::problems1d::*;
use mcfem::report::error_norms;
use mcfem::Formulation;

fn main() {
    let paper = [
        (50usize, 2.49e-3, 2.04e-2),
        (100, 1.76e-3, 1.05e-2),
        (200, 1.21e-3, 5.40e-3),
        (400, 7.84e-4, 2.64e-3),
        (800, 4.50e-4, 1.29e-3),
    ];
    for outflow in [OutflowBc::Natural, OutflowBc::Dirichlet] {
        for closure in [AuxClosure::IntegralRow, AuxClosure::AuxZeroBoth] {
            for mode in [SourceMode::SplitQuadrature, SourceMode::NodalInterpolation] {
                let mut line_aux = format!("{outflow:?}/{closure:?}/{mode:?} aux:");
                let mut line_mid = String::from("   mid:");
                for (n, pl2, pabs) in paper {
                    let cfg = Mc1dConfig { n_elems: n, outflow, ..Default::default() };
                    let sol = match solve_mc1d_with(&cfg, closure, mode) {
                        Ok(s) => s,
                        Err(_) => {
                            line_aux.push_str(" FAIL");
                            continue;
                        }
                    };
                    let zs = sol.node_zs();
                    let aux = sol.b_x_nodal().unwrap();
                    let bex: Vec<f64> = zs.iter().map(|&z| analytic_mc1d(&cfg, z).1).collect();
                    let (l2a, aba) = error_norms(&aux, &bex).unwrap();
                    line_aux.push_str(&format!(" {:.1}/{:.1}", l2a / pl2, aba / pabs));
                    let rec = sol.recovered_b_midpoints();
                    let num: Vec<f64> = rec.iter().map(|&(_, b)| b).collect();
                    let ora: Vec<f64> = rec.iter().map(|&(z, _)| analytic_mc1d(&cfg, z).1).collect();
                    let (l2m, abm) = error_norms(&num, &ora).unwrap();
                    line_mid.push_str(&format!(" {:.1}/{:.1}", l2m / pl2, abm / pabs));
                }
                println!("{line_aux}");
                println!("{line_mid}");
            }
        }
    }
}
