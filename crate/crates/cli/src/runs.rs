//! Config parsing and subcommand implementations.

use mcfem::io::{self, FlatConfig};
use mcfem::problems1d::{
    analytic_mc1d, analytic_transport, sign_alternations, solve_mc1d, solve_transport1d,
    Mc1dConfig, OutflowBc, Transport1dConfig, TransportSource,
};
use mcfem::problems2d::{solve_circ_a, solve_team9a_axi, CircAConfig, Team9aConfig};
use mcfem::problems3d::{solve_team9a_3d, Team9a3dConfig};
use mcfem::report::{circ_a_convergence, mc1d_convergence, transport_convergence, ConvergenceReport};
use mcfem::stability;
use mcfem::{Error, Formulation, Result};
use std::fs;
use std::path::Path;

/// Distinct exit codes: 2 config, 3 solver, 4 io.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::MeshSpec(_) | Error::QuadratureOrder(_) => 2,
        Error::Io(_) => 4,
        _ => 3,
    }
}

fn parse_formulation(s: &str) -> Result<Formulation> {
    Formulation::parse(s).ok_or_else(|| Error::Config(format!("unknown formulation '{s}'")))
}

struct Loaded {
    cfg: FlatConfig,
    problem: String,
    formulation: Formulation,
    provenance: String,
}

fn load(path: &Path, formulation_override: Option<&str>) -> Result<Loaded> {
    let cfg = FlatConfig::load(path)?;
    let problem = cfg.require("problem")?.to_string();
    let formulation = match formulation_override {
        Some(s) => parse_formulation(s)?,
        None => parse_formulation(cfg.str_or("formulation", "wr"))?,
    };
    let provenance = format!("config={} formulation={}", cfg.hash(), formulation.name());
    Ok(Loaded { cfg, problem, formulation, provenance })
}

fn parse_ladder(cfg: &FlatConfig, key: &str, default: &[usize]) -> Result<Vec<usize>> {
    match cfg.get(key) {
        None => Ok(default.to_vec()),
        Some(s) => s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("bad entry in '{key}': {t}")))
            })
            .collect(),
    }
}

const MC1D_KEYS: &[&str] = &[
    "problem", "formulation", "n_elems", "musigma_u", "b_amp", "support_z0", "support_z1",
    "domain_z0", "domain_z1", "outflow", "ladder",
];

fn mc1d_config(l: &Loaded) -> Result<Mc1dConfig> {
    l.cfg.check_keys(MC1D_KEYS)?;
    let d = Mc1dConfig::default();
    Ok(Mc1dConfig {
        musigma_u: l.cfg.f64_or("musigma_u", d.musigma_u)?,
        b_amp: l.cfg.f64_or("b_amp", d.b_amp)?,
        support: (
            l.cfg.f64_or("support_z0", d.support.0)?,
            l.cfg.f64_or("support_z1", d.support.1)?,
        ),
        n_elems: l.cfg.usize_or("n_elems", d.n_elems)?,
        domain: (l.cfg.f64_or("domain_z0", 0.0)?, l.cfg.f64_or("domain_z1", 1.0)?),
        formulation: l.formulation,
        outflow: match l.cfg.str_or("outflow", "natural") {
            "natural" => OutflowBc::Natural,
            "dirichlet" => OutflowBc::Dirichlet,
            other => return Err(Error::Config(format!("unknown outflow '{other}'"))),
        },
    })
}

const TRANSPORT_KEYS: &[&str] = &[
    "problem", "formulation", "case", "n_elems", "u_over_k", "k", "source", "psi_left",
    "psi_right", "ladder",
];

fn transport_config(l: &Loaded) -> Result<Transport1dConfig> {
    l.cfg.check_keys(TRANSPORT_KEYS)?;
    let n = l.cfg.usize_or("n_elems", 320)?;
    let mut cfg = match l.cfg.str_or("case", "tp1") {
        "tp1" => Transport1dConfig::tp1(n, l.formulation),
        "tp2" => Transport1dConfig::tp2(n, l.formulation),
        other => return Err(Error::Config(format!("unknown transport case '{other}'"))),
    };
    cfg.u_over_k = l.cfg.f64_or("u_over_k", cfg.u_over_k)?;
    cfg.k = l.cfg.f64_or("k", cfg.k)?;
    cfg.psi_left = l.cfg.f64_or("psi_left", cfg.psi_left)?;
    cfg.psi_right = l.cfg.f64_or("psi_right", cfg.psi_right)?;
    if let Some(s) = l.cfg.get("source") {
        cfg.source = match s {
            "zero" => TransportSource::Zero,
            "zsquared" => TransportSource::ZSquared,
            other => return Err(Error::Config(format!("unknown source '{other}'"))),
        };
    }
    Ok(cfg)
}

const CIRC_A_KEYS: &[&str] = &[
    "problem", "formulation", "lz", "ly", "nz", "ny", "refine_z", "strip_y0", "strip_y1",
    "sigma", "mu_r", "u_z", "patch_z0", "patch_z1", "patch_y0", "patch_y1", "b_amp", "ladder",
    "ref_extra",
];

fn circ_a_config(l: &Loaded) -> Result<CircAConfig> {
    l.cfg.check_keys(CIRC_A_KEYS)?;
    let d = CircAConfig::default();
    Ok(CircAConfig {
        lz: l.cfg.f64_or("lz", d.lz)?,
        ly: l.cfg.f64_or("ly", d.ly)?,
        nz: l.cfg.usize_or("nz", d.nz)?,
        ny: l.cfg.usize_or("ny", d.ny)?,
        refine_z: l.cfg.usize_or("refine_z", 1)?,
        strip: (l.cfg.f64_or("strip_y0", d.strip.0)?, l.cfg.f64_or("strip_y1", d.strip.1)?),
        sigma: l.cfg.f64_or("sigma", d.sigma)?,
        mu_r: l.cfg.f64_or("mu_r", d.mu_r)?,
        u_z: l.cfg.f64_or("u_z", d.u_z)?,
        patch_z: (l.cfg.f64_or("patch_z0", d.patch_z.0)?, l.cfg.f64_or("patch_z1", d.patch_z.1)?),
        patch_y: (l.cfg.f64_or("patch_y0", d.patch_y.0)?, l.cfg.f64_or("patch_y1", d.patch_y.1)?),
        b_amp: l.cfg.f64_or("b_amp", d.b_amp)?,
        formulation: l.formulation,
    })
}

const TEAM9A_KEYS: &[&str] = &[
    "problem", "formulation", "bore_radius", "loop_radius", "current", "sigma", "mu_r", "u_z",
    "half_z", "outer_r", "nz", "z_ratio", "nr_bore", "nr_out", "r_ratio", "refine", "n_theta",
    "memory_cap_gib", "line_r", "line_z0", "line_z1", "line_n",
];

fn team9a_config(l: &Loaded) -> Result<Team9aConfig> {
    l.cfg.check_keys(TEAM9A_KEYS)?;
    let d = Team9aConfig::default();
    Ok(Team9aConfig {
        bore_radius: l.cfg.f64_or("bore_radius", d.bore_radius)?,
        loop_radius: l.cfg.f64_or("loop_radius", d.loop_radius)?,
        current: l.cfg.f64_or("current", d.current)?,
        sigma: l.cfg.f64_or("sigma", d.sigma)?,
        mu_r: l.cfg.f64_or("mu_r", d.mu_r)?,
        u_z: l.cfg.f64_or("u_z", d.u_z)?,
        half_z: l.cfg.f64_or("half_z", d.half_z)?,
        outer_r: l.cfg.f64_or("outer_r", d.outer_r)?,
        nz: l.cfg.usize_or("nz", d.nz)?,
        z_ratio: l.cfg.f64_or("z_ratio", d.z_ratio)?,
        nr_bore: l.cfg.usize_or("nr_bore", d.nr_bore)?,
        nr_out: l.cfg.usize_or("nr_out", d.nr_out)?,
        r_ratio: l.cfg.f64_or("r_ratio", d.r_ratio)?,
        refine: l.cfg.usize_or("refine", 1)?,
        formulation: l.formulation,
    })
}

fn team9a_3d_config(l: &Loaded) -> Result<Team9a3dConfig> {
    let base = team9a_config(l)?;
    Ok(Team9a3dConfig {
        base,
        n_theta: l.cfg.usize_or("n_theta", 12)?,
        memory_cap_gib: l.cfg.f64_or("memory_cap_gib", 12.0)?,
        formulation: l.formulation,
    })
}

fn write_report_csv(out: &Path, name: &str, prov: &str, rep: &ConvergenceReport) -> Result<()> {
    fs::create_dir_all(out)?;
    let rows: Vec<Vec<f64>> = rep
        .rows
        .iter()
        .map(|r| vec![r.n_elems as f64, r.h, r.l2_error, r.abs_error, r.eoc.unwrap_or(f64::NAN)])
        .collect();
    let f = fs::File::create(out.join(name))?;
    io::write_csv(f, prov, &["n_elems", "h", "l2_error", "abs_error", "eoc"], &rows)
}

fn line_profile_keys(cfg: &FlatConfig, d: &Team9aConfig) -> Result<(f64, f64, f64, usize)> {
    Ok((
        cfg.f64_or("line_r", d.bore_radius * 1.15)?,
        cfg.f64_or("line_z0", -d.half_z * 0.6)?,
        cfg.f64_or("line_z1", d.half_z * 0.6)?,
        cfg.usize_or("line_n", 101)?,
    ))
}

pub fn cmd_solve(path: &Path, out: &Path, formulation: Option<&str>, quiet: bool) -> Result<()> {
    let l = load(path, formulation)?;
    fs::create_dir_all(out)?;
    let say = |msg: String| {
        if !quiet {
            println!("{msg}");
        }
    };
    match l.problem.as_str() {
        "mc1d" => {
            let cfg = mc1d_config(&l)?;
            let sol = solve_mc1d(&cfg)?;
            let zs = sol.node_zs();
            let a = sol.a_y();
            let aux = sol.b_x_nodal();
            let mut rows = Vec::new();
            for (i, &z) in zs.iter().enumerate() {
                let (ae, be) = analytic_mc1d(&cfg, z);
                let mut row = vec![z, a[i]];
                if let Some(b) = &aux {
                    row.push(b[i]);
                }
                row.extend_from_slice(&[ae, be]);
                rows.push(row);
            }
            let header: Vec<&str> = if aux.is_some() {
                vec!["z", "a_y", "b_x", "a_y_exact", "b_x_exact"]
            } else {
                vec!["z", "a_y", "a_y_exact", "b_x_exact"]
            };
            io::write_csv(fs::File::create(out.join("solution.csv"))?, &l.provenance, &header, &rows)?;
            let rec = sol.recovered_b_midpoints();
            let rows: Vec<Vec<f64>> = rec
                .iter()
                .map(|&(z, b)| vec![z, b, analytic_mc1d(&cfg, z).1])
                .collect();
            io::write_csv(
                fs::File::create(out.join("recovered.csv"))?,
                &l.provenance,
                &["z_mid", "b_recovered", "b_exact"],
                &rows,
            )?;
            say(format!("mc1d solved: {} dofs, residual {:.2e}", sol.report.n_dofs, sol.report.residual));
        }
        "transport1d" => {
            let cfg = transport_config(&l)?;
            let sol = solve_transport1d(&cfg)?;
            let zs = sol.node_zs();
            let psi = sol.psi();
            let flux = sol.flux_nodal();
            let mut rows = Vec::new();
            for (i, &z) in zs.iter().enumerate() {
                let mut row = vec![z, psi[i]];
                if let Some(f) = &flux {
                    row.push(f[i]);
                }
                row.push(analytic_transport(&cfg, z));
                rows.push(row);
            }
            let header: Vec<&str> = if flux.is_some() {
                vec!["z", "psi", "f_z", "psi_exact"]
            } else {
                vec!["z", "psi", "psi_exact"]
            };
            io::write_csv(fs::File::create(out.join("solution.csv"))?, &l.provenance, &header, &rows)?;
            say(format!("transport1d solved: residual {:.2e}", sol.report.residual));
        }
        "circ_a" => {
            let cfg = circ_a_config(&l)?;
            let sol = solve_circ_a(&cfg)?;
            io::write_solution_vtk(
                fs::File::create(out.join("fields.vtk"))?,
                &l.provenance,
                &sol.fields,
            )?;
            let centers = sol.recovered_b_centers()?;
            let rows: Vec<Vec<f64>> = centers.iter().map(|&(p, b)| vec![p[0], p[1], b]).collect();
            io::write_csv(
                fs::File::create(out.join("recovered_b.csv"))?,
                &l.provenance,
                &["z", "y", "b_x"],
                &rows,
            )?;
            say(format!(
                "circ_a solved: {} elements, Pe = {:.1}, residual {:.2e}",
                cfg.n_elems(),
                cfg.peclet(),
                sol.report.residual
            ));
        }
        "team9a_axi" => {
            let cfg = team9a_config(&l)?;
            let sol = solve_team9a_axi(&cfg)?;
            io::write_solution_vtk(
                fs::File::create(out.join("fields.vtk"))?,
                &l.provenance,
                &sol.fields,
            )?;
            let (r_line, z0, z1, n) = line_profile_keys(&l.cfg, &cfg)?;
            let mut rows = Vec::new();
            for i in 0..n {
                let z = z0 + (z1 - z0) * i as f64 / (n - 1) as f64;
                let (br, bz) = sol.reaction_b_at(z, r_line)?;
                let (tbr, tbz) = sol.total_b_at(z, r_line)?;
                rows.push(vec![z, r_line, br, bz, tbr, tbz]);
            }
            io::write_csv(
                fs::File::create(out.join("profile.csv"))?,
                &l.provenance,
                &["z", "r", "b_r", "b_z", "b_r_total", "b_z_total"],
                &rows,
            )?;
            let mesh = sol.fields.mesh.clone();
            let (lo, hi) = cfg.peclet_span(&mesh);
            say(format!(
                "team9a_axi solved: {} elements, Pe in [{lo:.1}, {hi:.1}], residual {:.2e}",
                mesh.n_elems(),
                sol.report.residual
            ));
        }
        "team9a_3d" => {
            let cfg = team9a_3d_config(&l)?;
            let sol = solve_team9a_3d(&cfg)?;
            io::write_solution_vtk(
                fs::File::create(out.join("fields.vtk"))?,
                &l.provenance,
                &sol.fields,
            )?;
            let (r_line, z0, z1, n) = line_profile_keys(&l.cfg, &cfg.base)?;
            let pts: Vec<(f64, f64)> = (0..n)
                .map(|i| (z0 + (z1 - z0) * i as f64 / (n - 1) as f64, r_line))
                .collect();
            let slice = sol.extract_slice(&pts)?;
            let rows: Vec<Vec<f64>> =
                slice.iter().map(|s| vec![s.z, s.r, s.b_r, s.b_r_applied]).collect();
            io::write_csv(
                fs::File::create(out.join("slice.csv"))?,
                &l.provenance,
                &["z", "r", "b_r", "b_r_applied"],
                &rows,
            )?;
            let mesh = sol.fields.mesh.clone();
            let (lo, hi) = cfg.base.peclet_span(&mesh);
            fs::write(
                out.join("run.txt"),
                format!(
                    "{}\nelements = {}\nnodes = {}\ndofs = {}\npe_min = {lo:.3}\npe_max = {hi:.3}\nresidual = {:.3e}\n",
                    l.provenance,
                    mesh.n_elems(),
                    mesh.n_nodes(),
                    sol.report.n_dofs,
                    sol.report.residual
                ),
            )?;
            say(format!(
                "team9a_3d solved: {} hexes, {} dofs, residual {:.2e}",
                mesh.n_elems(),
                sol.report.n_dofs,
                sol.report.residual
            ));
        }
        other => return Err(Error::Config(format!("unknown problem '{other}'"))),
    }
    Ok(())
}

pub fn cmd_convergence(
    path: &Path,
    out: &Path,
    formulation: Option<&str>,
    quiet: bool,
) -> Result<()> {
    let l = load(path, formulation)?;
    let rep = match l.problem.as_str() {
        "mc1d" => {
            let cfg = mc1d_config(&l)?;
            let ladder = parse_ladder(&l.cfg, "ladder", &[50, 100, 200, 400, 800])?;
            mc1d_convergence(&cfg, &ladder)?
        }
        "transport1d" => {
            let cfg = transport_config(&l)?;
            let default: Vec<usize> = match l.cfg.str_or("case", "tp1") {
                "tp2" => vec![10, 20, 40, 80, 160],
                _ => vec![20, 40, 80, 160, 320],
            };
            let ladder = parse_ladder(&l.cfg, "ladder", &default)?;
            transport_convergence(&cfg, &ladder)?
        }
        "circ_a" => {
            let cfg = circ_a_config(&l)?;
            let ladder = parse_ladder(&l.cfg, "ladder", &[1, 2, 4, 8])?;
            let ref_extra = l.cfg.usize_or("ref_extra", 2)? as u32;
            circ_a_convergence(&cfg, &ladder, ref_extra)?
        }
        other => return Err(Error::Config(format!("no convergence ladder for '{other}'"))),
    };
    write_report_csv(out, "convergence.csv", &l.provenance, &rep)?;
    if !quiet {
        println!("{:>8} {:>12} {:>12} {:>12} {:>8}", "n_elems", "h", "l2", "abs", "eoc");
        for r in &rep.rows {
            println!(
                "{:>8} {:>12.4e} {:>12.4e} {:>12.4e} {:>8}",
                r.n_elems,
                r.h,
                r.l2_error,
                r.abs_error,
                r.eoc.map_or("-".to_string(), |q| format!("{q:.2}")),
            );
        }
    }
    Ok(())
}

pub fn cmd_stability(
    config: Option<&Path>,
    out: &Path,
    formulation: Option<&str>,
    pe: Option<&str>,
    quiet: bool,
) -> Result<()> {
    let (formulation, pe_list, provenance) = match config {
        Some(path) => {
            let cfg = FlatConfig::load(path)?;
            cfg.check_keys(&["problem", "formulation", "pe_list"])?;
            let f = match formulation {
                Some(s) => parse_formulation(s)?,
                None => parse_formulation(cfg.str_or("formulation", "wr"))?,
            };
            let list: Vec<f64> = cfg
                .str_or("pe_list", "1,10,100,1000,10000")
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Config("bad pe_list".into())))
                .collect::<Result<_>>()?;
            (f, list, format!("config={} formulation={}", cfg.hash(), f.name()))
        }
        None => {
            let f = parse_formulation(formulation.unwrap_or("wr"))?;
            let list: Vec<f64> = match pe {
                Some(s) => s
                    .split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Config("bad --pe".into())))
                    .collect::<Result<_>>()?,
                None => vec![1.0, 10.0, 100.0, 1000.0, 10000.0],
            };
            (f, list, format!("config=cli formulation={}", f.name()))
        }
    };
    if formulation == Formulation::Supg {
        return Err(Error::Config("stability analysis covers galerkin and wr".into()));
    }

    let report = stability::classify(formulation, &pe_list)?;
    fs::create_dir_all(out)?;
    let mut rows = Vec::new();
    for s in &report.samples {
        let mut row = vec![s.pe];
        let osc = matches!(s.verdict, stability::Verdict::Oscillatory);
        row.push(if osc { 1.0 } else { 0.0 });
        for p in s.poles.iter().take(4) {
            row.push(p.re);
            row.push(p.im);
        }
        while row.len() < 10 {
            row.push(f64::NAN);
        }
        rows.push(row);
    }
    io::write_csv(
        fs::File::create(out.join("stability.csv"))?,
        &provenance,
        &["pe", "oscillatory", "p1_re", "p1_im", "p2_re", "p2_im", "p3_re", "p3_im", "p4_re", "p4_im"],
        &rows,
    )?;
    if !quiet {
        for s in &report.samples {
            let poles: Vec<String> = s
                .poles
                .iter()
                .map(|p| {
                    if p.im.abs() < 1e-9 {
                        format!("{:.4}", p.re)
                    } else {
                        format!("{:.4}{:+.4}i", p.re, p.im)
                    }
                })
                .collect();
            println!(
                "Pe = {:>9.3e}: {:?}  poles [{}]  active {}",
                s.pe,
                s.verdict,
                poles.join(", "),
                s.active_poles.len()
            );
        }
        // asymptotic transfer function at the largest sampled Pe
        if let Some(&pe_max) = pe_list.iter().max_by(|a, b| a.partial_cmp(b).unwrap()) {
            if pe_max >= 1e4 {
                let st = stability::extract_stencil(formulation, pe_max)?;
                let tf = stability::transfer_function(&st)?;
                let red = stability::reduced_tf(&tf);
                println!("reduced transfer function at Pe = {pe_max:.1e}:");
                println!("  num {:?}", red.num);
                println!("  den {:?}", red.den);
            }
        }
    }
    Ok(())
}

pub fn cmd_compare(path: &Path, out: &Path, quiet: bool) -> Result<()> {
    let l = load(path, None)?;
    fs::create_dir_all(out)?;
    match l.problem.as_str() {
        "mc1d" => {
            let base = mc1d_config(&l)?;
            let mut rows: Vec<Vec<f64>> = Vec::new();
            let mut counts = Vec::new();
            let h = (base.domain.1 - base.domain.0) / base.n_elems as f64;
            let exclude = (base.support.0 - h, base.support.1 + h);
            for f in [Formulation::Galerkin, Formulation::WeightedResidual] {
                let cfg = Mc1dConfig { formulation: f, ..base.clone() };
                let sol = solve_mc1d(&cfg)?;
                let rec = sol.recovered_b_midpoints();
                let maxb = rec.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()));
                counts.push(sign_alternations(&rec, 1e-4 * maxb, Some(exclude)));
                if rows.is_empty() {
                    rows = rec
                        .iter()
                        .map(|&(z, b)| vec![z, b, 0.0, analytic_mc1d(&base, z).1])
                        .collect();
                } else {
                    for (row, &(_, b)) in rows.iter_mut().zip(rec.iter()) {
                        row[2] = b;
                    }
                }
            }
            io::write_csv(
                fs::File::create(out.join("compare.csv"))?,
                &l.provenance,
                &["z_mid", "b_galerkin", "b_wr", "b_exact"],
                &rows,
            )?;
            if !quiet {
                println!(
                    "oscillation counts outside source support: galerkin {} vs wr {}",
                    counts[0], counts[1]
                );
            }
        }
        "circ_a" => {
            let base = circ_a_config(&l)?;
            let mut counts = Vec::new();
            for f in [Formulation::Galerkin, Formulation::WeightedResidual] {
                let cfg = CircAConfig { formulation: f, ..base.clone() };
                let sol = solve_circ_a(&cfg)?;
                counts.push(sol.oscillation_count(1e-4)?);
                io::write_solution_vtk(
                    fs::File::create(out.join(format!("fields_{}.vtk", f.name())))?,
                    &l.provenance,
                    &sol.fields,
                )?;
            }
            if !quiet {
                println!("oscillation counts along the strip: galerkin {} vs wr {}", counts[0], counts[1]);
            }
        }
        other => return Err(Error::Config(format!("no comparison mode for '{other}'"))),
    }
    Ok(())
}
