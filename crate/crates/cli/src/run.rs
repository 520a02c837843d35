//! Command implementations: each takes the resolved [`Settings`] plus the
//! output directory, writes its artifacts, prints a short deterministic
//! account to stdout, and returns the process exit code (0 pass, 1 domain
//! failure). Usage problems and solver errors bubble up as [`AppError`] and
//! are rendered by `main`.

use std::io;
use std::path::{Path, PathBuf};

use crate::config::{Settings, UsageError};
use crate::output::{f17, write_csv, write_json, Json};
use shearfront_core::conjugate::{
    flow_force_1d, period_limit, period_map, profile_on_grid, solve_c1, u_plus,
};
use shearfront_core::continuation::{continue_branch, ContinuationControls};
use shearfront_core::front::{
    asymptotic_seed, flow_force_2d, max_principle_check, newton_solve, nodal_check, FarFieldBc,
    Grid2D,
};
use shearfront_core::spectrum::{
    assemble_operator, kernel_test_shooting, principal_eigenvalue, sigma0_curve,
};
use shearfront_core::verify;
use shearfront_core::Error as SolverError;

/// Everything that can end a run early, tagged with who is at fault.
#[derive(Debug)]
pub enum AppError {
    /// Caller error: exit 2, plain message.
    Usage(String),
    /// Mathematical or numerical failure inside the solver: exit 1,
    /// machine-readable JSON on stderr.
    Solver(SolverError),
    /// Filesystem failure while writing an artifact: exit 1.
    Io(PathBuf, io::Error),
}

impl From<UsageError> for AppError {
    fn from(e: UsageError) -> Self {
        AppError::Usage(e.0)
    }
}

impl From<SolverError> for AppError {
    fn from(e: SolverError) -> Self {
        AppError::Solver(e)
    }
}

type CmdResult = Result<i32, AppError>;

fn write_json_file(dir: &Path, name: &str, value: &Json) -> Result<(), AppError> {
    let path = dir.join(name);
    write_json(&path, value).map_err(|e| AppError::Io(path, e))?;
    println!("wrote {name}");
    Ok(())
}

fn write_csv_file(
    dir: &Path,
    name: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), AppError> {
    let path = dir.join(name);
    write_csv(&path, header, rows).map_err(|e| AppError::Io(path, e))?;
    println!("wrote {name} ({} rows)", rows.len());
    Ok(())
}

fn model_fields(st: &Settings) -> Vec<(&'static str, Json)> {
    vec![
        ("config_hash", Json::str(st.hash())),
        ("family", Json::str(st.family_name())),
        ("w1", Json::Num(st.w1())),
    ]
}

// ---- material check -------------------------------------------------------

pub fn material_check(st: &Settings, dir: &Path) -> CmdResult {
    let w1 = st.require_w1()?;
    let model = st.model();
    let report = model.check_structural_conditions(st.q_max(), st.kappa_max(), st.lambda_max(), st.samples());

    for check in &report.checks {
        println!(
            "[{}] {} (margin {}): {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            f17(check.margin),
            check.detail
        );
    }

    let mut fields = model_fields(st);
    fields[2].1 = Json::Num(w1);
    fields.extend([
        ("q_max", Json::Num(st.q_max())),
        ("kappa_max", Json::Num(st.kappa_max())),
        ("lambda_max", Json::Num(st.lambda_max())),
        ("samples", Json::Int(st.samples() as i64)),
        ("all_passed", Json::Bool(report.all_passed())),
        (
            "checks",
            Json::List(
                report
                    .checks
                    .iter()
                    .map(|c| {
                        Json::Obj(vec![
                            ("name", Json::str(&c.name)),
                            ("passed", Json::Bool(c.passed)),
                            ("margin", Json::Num(c.margin)),
                            ("detail", Json::str(&c.detail)),
                        ])
                    })
                    .collect(),
            ),
        ),
    ]);
    write_json_file(dir, "report.json", &Json::Obj(fields))?;

    if report.all_passed() {
        Ok(0)
    } else {
        let names: Vec<&str> = report.failures().iter().map(|c| c.name.as_str()).collect();
        eprintln!(
            "{}",
            error_json("conditions_failed", &format!("structural conditions failed: {}", names.join(", ")))
        );
        Ok(1)
    }
}

// ---- conjugate table -------------------------------------------------------

pub fn conjugate_table(st: &Settings, dir: &Path) -> CmdResult {
    let model = st.model();
    let lambdas = st.conjugate_lambda();
    for &l in &lambdas {
        if !(l > 0.0) || !l.is_finite() {
            return Err(SolverError::Domain(format!(
                "conjugate states exist for positive loads only, got lambda = {l}"
            ))
            .into());
        }
    }

    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in &lambdas {
        let c1 = solve_c1(&model, lambda, 1e-11)?;
        let profile = u_plus(&model, lambda)?;
        let s_plus = flow_force_1d(&model, &profile)?;
        let phi_dot = kernel_test_shooting(&model, &profile, st.kernel_steps())?;
        let sampled = profile_on_grid(&model, lambda, st.nodes())?;
        let op = assemble_operator(&model, &sampled, st.nodes())?;
        let sigma0 = principal_eigenvalue(&op)?.sigma0;
        rows.push(vec![
            f17(lambda),
            f17(c1),
            f17(profile.u_at_center()),
            f17(profile.v_max()),
            f17(s_plus),
            f17(phi_dot),
            f17(sigma0),
        ]);
    }

    write_csv_file(
        dir,
        "conjugate.csv",
        &["lambda", "c1", "U_plus_at_0", "Vmax", "S_plus", "phi_dot_end", "sigma0"],
        &rows,
    )?;
    let mut fields = model_fields(st);
    fields.extend([
        ("lambda", Json::List(lambdas.iter().map(|&l| Json::Num(l)).collect())),
        ("nodes", Json::Int(st.nodes() as i64)),
        ("kernel_steps", Json::Int(st.kernel_steps() as i64)),
        ("rows", Json::Int(rows.len() as i64)),
    ]);
    write_json_file(dir, "conjugate.meta.json", &Json::Obj(fields))?;
    Ok(0)
}

// ---- period map ------------------------------------------------------------

pub fn period_map_table(st: &Settings, dir: &Path) -> CmdResult {
    let model = st.model();
    let lambda = st.pm_lambda();
    let cs = st.pm_c();

    let mut rows = Vec::with_capacity(cs.len());
    for &c in &cs {
        let p = period_map(&model, c, lambda, st.quad())?;
        rows.push(vec![f17(c), f17(p)]);
    }

    write_csv_file(dir, "period_map.csv", &["c", "period"], &rows)?;
    let mut fields = model_fields(st);
    fields.extend([
        ("lambda", Json::Num(lambda)),
        ("quad", Json::Int(st.quad() as i64)),
        ("small_amplitude_limit", Json::Num(period_limit(&model, lambda)?)),
        ("rows", Json::Int(rows.len() as i64)),
    ]);
    write_json_file(dir, "period_map.meta.json", &Json::Obj(fields))?;
    Ok(0)
}

// ---- spectrum ----------------------------------------------------------------

pub fn spectrum_table(st: &Settings, dir: &Path) -> CmdResult {
    let model = st.model();
    let eps = st.spectrum_eps();
    let curve = sigma0_curve(&model, &eps, st.nodes())?;

    let rows: Vec<Vec<String>> = curve
        .iter()
        .map(|&(e, s)| vec![f17(e), f17(e * e), f17(s)])
        .collect();
    write_csv_file(dir, "spectrum.csv", &["eps", "lambda", "sigma0"], &rows)?;
    let mut fields = model_fields(st);
    fields.extend([
        ("eps", Json::List(eps.iter().map(|&e| Json::Num(e)).collect())),
        ("nodes", Json::Int(st.nodes() as i64)),
        ("rows", Json::Int(rows.len() as i64)),
    ]);
    write_json_file(dir, "spectrum.meta.json", &Json::Obj(fields))?;
    Ok(0)
}

// ---- front solve -------------------------------------------------------------

pub fn front_solve(st: &Settings, dir: &Path) -> CmdResult {
    let model = st.model();
    let eps = st.front_epsilon();
    let lambda = eps * eps;
    let grid = Grid2D::for_load(lambda, st.n_y())?;
    let seed = asymptotic_seed(&model, eps, &grid)?;
    let (front, info) = newton_solve(&model, &seed, FarFieldBc::Dirichlet, st.tol(), 30)?;

    let nodal = nodal_check(&front);
    let principle = max_principle_check(&model, &front);
    let norms = front.sup_norms();
    let limit_profile = u_plus(&model, lambda)?;
    let s_plus = flow_force_1d(&model, &limit_profile)?;
    let s_center = flow_force_2d(&model, &front, front.grid.i_center())?;
    let s_far = flow_force_2d(&model, &front, 0)?;

    let g = &front.grid;
    let mut rows = Vec::with_capacity(g.n_x * g.n_y);
    for i in 0..g.n_x {
        for j in 0..g.n_y {
            rows.push(vec![f17(g.x(i)), f17(g.y(j)), f17(front.at(i, j))]);
        }
    }
    write_csv_file(dir, "u.csv", &["x", "y", "u"], &rows)?;

    let mut fields = model_fields(st);
    fields.extend([
        ("epsilon", Json::Num(eps)),
        ("lambda", Json::Num(lambda)),
        (
            "grid",
            Json::Obj(vec![
                ("l", Json::Num(g.l)),
                ("n_x", Json::Int(g.n_x as i64)),
                ("n_y", Json::Int(g.n_y as i64)),
                ("h_x", Json::Num(g.h_x)),
                ("h_y", Json::Num(g.h_y)),
            ]),
        ),
        (
            "newton",
            Json::Obj(vec![
                ("iterations", Json::Int(info.iterations as i64)),
                ("residual_sup", Json::Num(info.residual_sup)),
                ("tol", Json::Num(st.tol())),
            ]),
        ),
        (
            "sup_norms",
            Json::Obj(vec![
                ("max_u", Json::Num(norms.max_u)),
                ("max_grad", Json::Num(norms.max_grad)),
                ("max_uy", Json::Num(norms.max_uy)),
                ("max_hess", Json::Num(norms.max_hess)),
            ]),
        ),
        ("nodal_ok", Json::Bool(nodal.pass())),
        (
            "nodal",
            Json::Obj(vec![
                ("u_x_min", Json::Num(nodal.u_x_min)),
                ("u_y_max", Json::Num(nodal.u_y_max)),
                ("u_yy_max", Json::Num(nodal.u_yy_max)),
                ("u_xy_max", Json::Num(nodal.u_xy_max)),
                ("u_xyy_origin", Json::Num(nodal.u_xyy_origin)),
                ("boundary_defect", Json::Num(nodal.boundary_defect)),
            ]),
        ),
        ("max_principle_ok", Json::Bool(principle.pass())),
        (
            "max_principle",
            Json::Obj(vec![
                ("interior_max", Json::Num(principle.interior_max)),
                ("farfield_max", Json::Num(principle.farfield_max)),
                ("max_grad_sq", Json::Num(principle.max_grad_sq)),
                ("coercivity_margin", Json::Num(principle.coercivity_margin)),
                ("slack", Json::Num(principle.slack)),
            ]),
        ),
        (
            "flow_force",
            Json::Obj(vec![
                ("limit_state", Json::Num(s_plus)),
                ("center_column", Json::Num(s_center)),
                ("far_column", Json::Num(s_far)),
            ]),
        ),
    ]);
    write_json_file(dir, "meta.json", &Json::Obj(fields))?;

    println!(
        "front solve: lambda = {}, {} Newton iterations, residual {}, nodal_ok = {}",
        f17(lambda),
        info.iterations,
        f17(info.residual_sup),
        nodal.pass()
    );
    Ok(0)
}

// ---- branch continue -----------------------------------------------------------

pub fn branch_continue(st: &Settings, dir: &Path) -> CmdResult {
    let model = st.model();
    let eps = st.branch_epsilon();
    let controls = ContinuationControls {
        tol: st.tol(),
        ds_max: st.branch_ds_max(),
        n_ceiling: st.branch_n_ceiling(),
        lambda_ceiling: st.branch_lambda_ceiling(),
        ..ContinuationControls::default()
    };
    let grid = Grid2D::for_load(eps * eps, st.n_y())?;
    let seed = asymptotic_seed(&model, eps, &grid)?;
    let branch = continue_branch(&model, &seed, st.branch_ds(), st.branch_steps(), &controls)?;

    let rows: Vec<Vec<String>> = branch
        .points
        .iter()
        .map(|p| {
            let norms = p.front.sup_norms();
            vec![
                f17(p.s),
                f17(p.lambda()),
                f17(norms.max_u),
                f17(norms.max_uy),
                f17(p.sigma0),
                f17(p.s_plus),
                f17(p.n_proxy),
                p.nodal.pass().to_string(),
            ]
        })
        .collect();
    write_csv_file(
        dir,
        "branch.csv",
        &["s", "lambda", "max_u", "max_uy", "sigma0", "S_plus", "N_proxy", "nodal_ok"],
        &rows,
    )?;

    let first = branch.points.first().expect("a traced branch holds its start point");
    let last = branch.points.last().expect("nonempty by the line above");
    let mut fields = model_fields(st);
    fields.extend([
        ("epsilon", Json::Num(eps)),
        ("ds0", Json::Num(st.branch_ds())),
        ("steps_requested", Json::Int(st.branch_steps() as i64)),
        ("points_accepted", Json::Int(branch.points.len() as i64)),
        ("tag", Json::str(branch.tag.as_str())),
        ("diagnostic", Json::str(&branch.diagnostic)),
        ("lambda_first", Json::Num(first.lambda())),
        ("lambda_final", Json::Num(last.lambda())),
        ("s_final", Json::Num(last.s)),
        ("sigma0_final", Json::Num(last.sigma0)),
        ("n_proxy_final", Json::Num(last.n_proxy)),
    ]);
    write_json_file(dir, "summary.json", &Json::Obj(fields))?;

    println!(
        "branch continue: {} points, lambda {} -> {}, tag {}",
        branch.points.len(),
        f17(first.lambda()),
        f17(last.lambda()),
        branch.tag.as_str()
    );
    Ok(0)
}

// ---- verify ---------------------------------------------------------------------

pub fn verify_all() -> CmdResult {
    use std::io::Write;
    let mut failed = Vec::new();
    for id in 1..=verify::N_CRITERIA {
        let report = verify::criterion(id).expect("criterion ids 1..=N_CRITERIA are all defined");
        println!("{}", report.line());
        io::stdout().flush().ok();
        if !report.pass {
            failed.push(format!("{id:02}"));
        }
    }
    let total = verify::N_CRITERIA;
    println!("passed {} of {total} criteria", total - failed.len());
    if failed.is_empty() {
        Ok(0)
    } else {
        eprintln!(
            "{}",
            error_json(
                "verification_failed",
                &format!("{} of {total} criteria failed: {}", failed.len(), failed.join(", "))
            )
        );
        Ok(1)
    }
}

// ---- error rendering ---------------------------------------------------------------

/// One-line machine-readable error for stderr.
pub fn error_json(kind: &str, message: &str) -> String {
    Json::Obj(vec![(
        "error",
        Json::Obj(vec![("kind", Json::str(kind)), ("message", Json::str(message))]),
    )])
    .compact()
}

pub fn solver_error_kind(e: &SolverError) -> &'static str {
    match e {
        SolverError::Domain(_) => "domain",
        SolverError::InvalidInput(_) => "invalid_input",
        SolverError::Ellipticity(_) => "ellipticity",
        SolverError::Divergence(_) => "divergence",
        SolverError::StepCount(_) => "step_count",
        SolverError::NonConvergence(_) => "non_convergence",
        SolverError::Discretization(_) => "discretization",
    }
}
