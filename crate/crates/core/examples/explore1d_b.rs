// Sampling-convention scan for the MC Table-I ladder (development aid).
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
    for mode in [SourceMode::NodalMidJump, SourceMode::NodalInterpolation] {
        println!("=== {mode:?}: nodal-aux | nodal-recovered-average | aux-midpoint-avg (ratios)");
        for (n, pl2, pabs) in paper {
            let cfg = Mc1dConfig { n_elems: n, ..Default::default() };
            let sol = solve_mc1d_with(&cfg, AuxClosure::IntegralRow, mode).unwrap();
            let zs = sol.node_zs();
            let aux = sol.b_x_nodal().unwrap();
            let bex: Vec<f64> = zs.iter().map(|&z| analytic_mc1d(&cfg, z).1).collect();
            let (l2a, aba) = error_norms(&aux, &bex).unwrap();
            // nodal recovered: average of adjacent element difference quotients
            let a = sol.a_y();
            let h = 1.0 / n as f64;
            let mut rec_nodal = vec![0.0; n + 1];
            for i in 1..n {
                rec_nodal[i] = -(a[i + 1] - a[i - 1]) / (2.0 * h);
            }
            rec_nodal[0] = -(a[1] - a[0]) / h;
            rec_nodal[n] = -(a[n] - a[n - 1]) / h;
            let (l2r, abr) = error_norms(&rec_nodal, &bex).unwrap();
            // aux sampled at midpoints (avg of ends) vs exact at midpoints
            let mids: Vec<f64> = (0..n).map(|e| 0.5 * (aux[e] + aux[e + 1])).collect();
            let bexm: Vec<f64> =
                (0..n).map(|e| analytic_mc1d(&cfg, (e as f64 + 0.5) * h).1).collect();
            let (l2m, abm) = error_norms(&mids, &bexm).unwrap();
            println!(
                "N={n:4}  aux: x{:.2}/x{:.2}   recn: x{:.2}/x{:.2}   auxmid: x{:.2}/x{:.2}",
                l2a / pl2, aba / pabs, l2r / pl2, abr / pabs, l2m / pl2, abm / pabs
            );
        }
    }
}
