// Scratch explorer for the 1D ladders (development aid).
use mcfem::problems1d::*;
use mcfem::report::error_norms;
use mcfem::Formulation;

fn table1(outflow: OutflowBc, closure: AuxClosure, mode: SourceMode) {
    println!("--- MC1D WR {outflow:?} {closure:?} {mode:?} (ratios vs paper)");
    let paper = [
        (50, 2.49e-3, 2.04e-2),
        (100, 1.76e-3, 1.05e-2),
        (200, 1.21e-3, 5.40e-3),
        (400, 7.84e-4, 2.64e-3),
        (800, 4.50e-4, 1.29e-3),
    ];
    for (n, pl2, pabs) in paper {
        let cfg = Mc1dConfig {
            n_elems: n,
            outflow,
            formulation: Formulation::WeightedResidual,
            ..Default::default()
        };
        let sol = match solve_mc1d_with(&cfg, closure, mode) {
            Ok(s) => s,
            Err(e) => {
                println!("N={n:4}  SOLVE FAILED: {e}");
                continue;
            }
        };
        let rec = sol.recovered_b_midpoints();
        let num: Vec<f64> = rec.iter().map(|&(_, b)| b).collect();
        let ora: Vec<f64> = rec.iter().map(|&(z, _)| analytic_mc1d(&cfg, z).1).collect();
        let (l2a, aba) = error_norms(&num, &ora).unwrap();
        println!("N={n:4}  mid: {l2a:.3e}/{aba:.3e}  (x{:.2}/x{:.2})", l2a / pl2, aba / pabs);
    }
}

fn table2(closure: AuxClosure) {
    println!("--- TP1 {closure:?}");
    let paper1 = [
        (20, 4.15e-3, 2.62e-2),
        (40, 2.53e-3, 1.16e-2),
        (80, 1.31e-3, 4.24e-3),
        (160, 5.08e-4, 1.07e-3),
        (320, 1.55e-4, 2.44e-4),
    ];
    for (n, pl2, pabs) in paper1 {
        let cfg = Transport1dConfig::tp1(n, Formulation::WeightedResidual);
        let sol = match solve_transport1d_with(&cfg, closure) {
            Ok(s) => s,
            Err(e) => {
                println!("N={n:4}  SOLVE FAILED: {e}");
                continue;
            }
        };
        let num = sol.psi();
        let ora: Vec<f64> = sol.node_zs().iter().map(|&z| analytic_transport(&cfg, z)).collect();
        let (l2, ab) = error_norms(&num, &ora).unwrap();
        println!("N={n:4}  {l2:.3e}/{ab:.3e}  (x{:.2}/x{:.2})", l2 / pl2, ab / pabs);
    }
    println!("--- TP2 {closure:?}");
    let paper2 = [
        (10, 1.40e-5, 9.16e-5),
        (20, 8.55e-6, 4.04e-5),
        (40, 4.42e-6, 1.47e-5),
        (80, 1.72e-6, 3.74e-6),
        (160, 5.23e-7, 8.59e-7),
    ];
    for (n, pl2, pabs) in paper2 {
        let cfg = Transport1dConfig::tp2(n, Formulation::WeightedResidual);
        let sol = match solve_transport1d_with(&cfg, closure) {
            Ok(s) => s,
            Err(e) => {
                println!("N={n:4}  SOLVE FAILED: {e}");
                continue;
            }
        };
        let num = sol.psi();
        let ora: Vec<f64> = sol.node_zs().iter().map(|&z| analytic_transport(&cfg, z)).collect();
        let (l2, ab) = error_norms(&num, &ora).unwrap();
        println!("N={n:4}  {l2:.3e}/{ab:.3e}  (x{:.2}/x{:.2})", l2 / pl2, ab / pabs);
    }
}

fn oscillation(closure: AuxClosure, mode: SourceMode) {
    let n = 100;
    let pe = 400.0;
    let cfg = Mc1dConfig {
        musigma_u: 2.0 * pe * n as f64,
        n_elems: n,
        formulation: Formulation::WeightedResidual,
        outflow: OutflowBc::Natural,
        ..Default::default()
    };
    match solve_mc1d_with(&cfg, closure, mode) {
        Ok(sol) => {
            let rec = sol.recovered_b_midpoints();
            let maxb = rec.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()));
            let h = 1.0 / n as f64;
            for floor in [1e-6, 1e-4, 1e-2] {
                let count = sign_alternations(&rec, floor * maxb, Some((0.4 - h, 0.6 + h)));
                print!("floor {floor:.0e}: {count}  ");
            }
            println!("max|b| = {maxb:.3}  [{closure:?} {mode:?}]");
        }
        Err(e) => println!("Pe=400 solve failed: {e} [{closure:?} {mode:?}]"),
    }
}

fn main() {
    for closure in [
        AuxClosure::IntegralRow,
        AuxClosure::OneSidedLeft,
        AuxClosure::OneSided2Both,
        AuxClosure::AuxZeroBoth,
        AuxClosure::AuxZeroLeft,
    ] {
        table1(OutflowBc::Natural, closure, SourceMode::NodalInterpolation);
    }
    for closure in [
        AuxClosure::OneSidedLeft,
        AuxClosure::OneSided2Both,
        AuxClosure::AuxZeroBoth,
        AuxClosure::AuxZeroLeft,
    ] {
        table2(closure);
    }
    println!("--- WR oscillation counts at Pe=400 N=100 by floor");
    for closure in [AuxClosure::IntegralRow, AuxClosure::OneSidedBoth] {
        for mode in [SourceMode::SplitQuadrature, SourceMode::NodalInterpolation] {
            oscillation(closure, mode);
        }
    }
}
