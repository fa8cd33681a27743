use pampa::basis1d::{build_dual_basis, OperatorSet1D};
use pampa::bp1d::{self, LimiterOptions};
use pampa::field::{Field, Rational, Surd5};
use pampa::linalg::DenseMatrix;
use pampa::mesh1d::Mesh1D;
use pampa::sbp1d::{check_element, check_global, element_sbp, global_periodic_operator, SbpReport};
use pampa::scheme1d::{
    convergence_study, run_simulation, BpMode, FluxSpec, InitialCondition, ProjectionKind,
    ProjectionRule, SimConfig,
};
use pampa::tri2d::{
    self, boundary_lagrange_centroid, run_2d_on, Run2DConfig, TriMesh, TriSolutionQ2, TriVariant,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{write_csv, Cell};
use crate::{
    BasisCheckArgs, BpArg, BpCheckArgs, CaseArg, Command, ConvergenceArgs, FluxArg, IcArg,
    Problem1d, Problem2d, ProjectionArg, Run1dArgs, Run2dArgs, SbpCheckArgs, VariantArg,
};

type Rows = Vec<Vec<Cell>>;

/// Slack on the bounds reported by `run1d` and on random-trial checks.
const BOUND_SLACK: f64 = 1e-12;
const IDENTITY_TOLERANCE: f64 = 1e-13;

pub fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run1d(a) => run1d(&a),
        Command::Run2d(a) => run2d(&a),
        Command::Convergence(a) => convergence(&a),
        Command::SbpCheck(a) => sbp_check(&a),
        Command::BasisCheck(a) => basis_check(&a),
        Command::BpCheck(a) => bp_check(&a),
    }
}

fn echo<T: Serialize>(name: &str, args: &T) -> Value {
    json!({ "subcommand": name, "config": args })
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("--{name} must be positive, got {x}")))
    }
}

impl Problem1d {
    fn domain(&self) -> (f64, f64) {
        let (a, b) = match self.ic {
            IcArg::Cosine | IcArg::Constant => (0.0, 1.0),
            IcArg::Gaussian | IcArg::JiangShu => (-1.0, 1.0),
        };
        (self.x_min.unwrap_or(a), self.x_max.unwrap_or(b))
    }

    fn flux(&self) -> FluxSpec {
        match self.flux {
            FluxArg::Advection => FluxSpec::LinearAdvection(self.a),
            FluxArg::Burgers => FluxSpec::Burgers,
        }
    }

    /// One period for advection, a short time before shocks for Burgers.
    fn t_end(&self) -> f64 {
        let (a, b) = self.domain();
        match self.flux {
            FluxArg::Advection => self.t_end.unwrap_or((b - a) / self.a.abs()),
            FluxArg::Burgers => self.t_end.unwrap_or(0.1),
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let (a, b) = self.domain();
        if !(a < b && a.is_finite() && b.is_finite()) {
            return Err(invalid(format!("empty domain [{a}, {b}]")));
        }
        if self.order < 2 {
            return Err(invalid(format!(
                "--order must be at least 2, got {}",
                self.order
            )));
        }
        if self.flux == FluxArg::Advection && !(self.a != 0.0 && self.a.is_finite()) {
            return Err(invalid("--a must be finite and nonzero"));
        }
        positive("alpha", self.alpha)?;
        if let Some(c) = self.cfl {
            positive("cfl", c)?;
        }
        let t = self.t_end();
        if !(t >= 0.0 && t.is_finite()) {
            return Err(invalid(format!("--t-end must be nonnegative, got {t}")));
        }
        Ok(())
    }

    fn sim_config(&self, mesh: Mesh1D, default_cfl: f64) -> SimConfig {
        let (a, b) = self.domain();
        let initial = match self.ic {
            IcArg::Cosine => InitialCondition::Cosine { period: b - a },
            IcArg::Gaussian => InitialCondition::Gaussian { alpha: self.alpha },
            IcArg::JiangShu => InitialCondition::JiangShu,
            IcArg::Constant => InitialCondition::Constant { value: self.value },
        };
        SimConfig {
            mesh,
            order: self.order,
            flux: self.flux(),
            initial,
            cfl: self.cfl.unwrap_or(default_cfl),
            t_end: self.t_end(),
            projection: ProjectionRule::new(match self.projection {
                ProjectionArg::Central => ProjectionKind::Central,
                ProjectionArg::Upwind => ProjectionKind::Upwind,
                ProjectionArg::LengthWeighted => ProjectionKind::LengthWeighted,
            }),
            bp: match self.bp {
                BpArg::Off => BpMode::Off,
                BpArg::Point => BpMode::Point,
                BpArg::PointAndAverage => BpMode::PointAndAverage,
            },
            snapshot_every: None,
            limiter: LimiterOptions::default(),
        }
    }
}

fn run1d(args: &Run1dArgs) -> Result<(), CliError> {
    let p = &args.problem;
    p.validate()?;
    if args.cells < 2 {
        return Err(invalid("--cells must be at least 2"));
    }
    let (a, b) = p.domain();
    let mesh = Mesh1D::make_random(a, b, args.cells, args.jitter, args.seed, true)?;
    let cfg = p.sim_config(mesh.clone(), 0.1);
    let res = run_simulation(&cfg)?;

    let header = [
        "step",
        "t",
        "dt",
        "min_average",
        "max_average",
        "min_point",
        "max_point",
        "mass",
        "energy_lhs",
        "energy_rhs",
        "limited_cells",
        "theta_min",
    ];
    let rows: Rows = res
        .diagnostics
        .iter()
        .map(|d| {
            vec![
                d.step.into(),
                d.t.into(),
                d.dt.into(),
                d.min_average.into(),
                d.max_average.into(),
                d.min_point.into(),
                d.max_point.into(),
                d.mass.into(),
                d.energy_lhs.into(),
                d.energy_rhs.into(),
                d.limited_cells.into(),
                d.theta_min.into(),
            ]
        })
        .collect();
    let config = echo("run1d", args);
    write_csv(args.output.as_deref(), &config, &header, &rows)?;

    if let Some(path) = &args.state {
        let mut rows: Rows = Vec::new();
        for (i, &v) in res.final_state.point_values.iter().enumerate() {
            rows.push(vec![
                "point".into(),
                i.into(),
                mesh.nodes()[i].into(),
                v.into(),
            ]);
        }
        for (j, v) in res.final_state.averages(&mesh).into_iter().enumerate() {
            let x = 0.5 * (mesh.nodes()[j] + mesh.nodes()[j + 1]);
            rows.push(vec!["average".into(), j.into(), x.into(), v.into()]);
        }
        write_csv(Some(path), &config, &["kind", "index", "x", "value"], &rows)?;
    }

    eprintln!("t = {}, steps = {}", res.t, res.steps);
    if let Some(e) = res.errors {
        eprintln!("L1 = {:e}, L2 = {:e}, Linf = {:e}", e.l1, e.l2, e.linf);
    }
    if cfg.bp != BpMode::Off {
        let outside = res.diagnostics.iter().any(|d| {
            d.min_average < res.bounds.m - BOUND_SLACK
                || d.max_average > res.bounds.big_m + BOUND_SLACK
        });
        eprintln!(
            "averages {} [{}, {}]",
            if outside { "left" } else { "stayed within" },
            res.bounds.m,
            res.bounds.big_m
        );
    }
    Ok(())
}

impl Problem2d {
    fn config(&self, cells: usize) -> Result<Run2DConfig, CliError> {
        let mut cfg = match self.case {
            CaseArg::Translation => Run2DConfig::translation(cells),
            CaseArg::Rotation => Run2DConfig::rotation(cells),
        };
        if let Some(t) = self.t_end {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(invalid(format!("--t-end must be nonnegative, got {t}")));
            }
            cfg.t_end = t;
        }
        positive("dt-fraction", self.dt_fraction)?;
        if self.dt_fraction > 1.0 {
            return Err(invalid("--dt-fraction above 1 leaves the admissible range"));
        }
        cfg.dt_fraction = self.dt_fraction;
        cfg.jitter = self.jitter;
        cfg.seed = self.seed;
        Ok(cfg)
    }
}

fn run2d(args: &Run2dArgs) -> Result<(), CliError> {
    let cfg = args.problem.config(args.cells)?;
    let mesh = match &args.mesh {
        Some(path) => TriMesh::read(path)?,
        None => cfg.mesh()?,
    };
    let summary = run_2d_on(&cfg, mesh.clone())?;
    let res = &summary.result;

    let header = ["step", "t", "dt", "min_average", "max_average", "mass"];
    let rows: Rows = res
        .diagnostics
        .iter()
        .map(|d| {
            vec![
                d.step.into(),
                d.t.into(),
                d.dt.into(),
                d.min_average.into(),
                d.max_average.into(),
                d.mass.into(),
            ]
        })
        .collect();
    let config = echo("run2d", args);
    write_csv(args.output.as_deref(), &config, &header, &rows)?;
    if let Some(path) = &args.state {
        write_csv(
            Some(path),
            &config,
            &["kind", "index", "x", "y", "value"],
            &state_rows_2d(&mesh, &res.final_state),
        )?;
    }
    eprintln!(
        "t = {}, steps = {}, L2 error = {:e}",
        res.t, res.steps, summary.l2_error
    );
    Ok(())
}

fn state_rows_2d(mesh: &TriMesh, u: &TriSolutionQ2) -> Rows {
    let mut pos = vec![None; mesh.n_points()];
    for t in 0..mesh.n_triangles() {
        for n in 0..6 {
            pos[mesh.point_slot(t, n)].get_or_insert_with(|| mesh.node_position(t, n));
        }
    }
    let mut rows = Rows::new();
    for (i, (&v, x)) in u.point_values.iter().zip(pos).enumerate() {
        let x = x.unwrap_or([f64::NAN; 2]);
        rows.push(vec![
            "point".into(),
            i.into(),
            x[0].into(),
            x[1].into(),
            v.into(),
        ]);
    }
    for (t, &v) in u.averages.iter().enumerate() {
        let p = mesh.coords(t);
        let c = [0, 1].map(|d| (p[0][d] + p[1][d] + p[2][d]) / 3.0);
        rows.push(vec![
            "average".into(),
            t.into(),
            c[0].into(),
            c[1].into(),
            v.into(),
        ]);
    }
    rows
}

fn eoc(coarse: f64, fine: f64, h_coarse: f64, h_fine: f64) -> Option<f64> {
    (coarse > 0.0 && fine > 0.0).then(|| (coarse / fine).ln() / (h_coarse / h_fine).ln())
}

fn convergence(args: &ConvergenceArgs) -> Result<(), CliError> {
    let config = echo("convergence", args);
    if args.dim == 1 {
        let p = &args.problem;
        p.validate()?;
        if p.flux != FluxArg::Advection {
            return Err(invalid(
                "convergence needs linear advection (exact solution)",
            ));
        }
        let cells = args.cells.clone().unwrap_or(vec![40, 80, 160, 320]);
        let (a, b) = p.domain();
        let template = p.sim_config(Mesh1D::make_uniform(a, b, cells[0].max(2), true)?, 0.05);
        let table = convergence_study(&template, &cells)?;
        let header = [
            "cells", "h", "l1", "l2", "linf", "eoc_l1", "eoc_l2", "eoc_linf",
        ];
        let rows: Rows = table
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.cells.into(),
                    r.h.into(),
                    r.errors.l1.into(),
                    r.errors.l2.into(),
                    r.errors.linf.into(),
                    r.eoc_l1.into(),
                    r.eoc_l2.into(),
                    r.eoc_linf.into(),
                ]
            })
            .collect();
        return write_csv(args.output.as_deref(), &config, &header, &rows);
    }

    if args.problem.order != 2 {
        return Err(invalid("the triangle solver is quadratic; use --order 2"));
    }
    let cells = args.cells.clone().unwrap_or(vec![20, 40, 80]);
    if cells.len() < 3 {
        return Err(invalid("a convergence study needs at least 3 levels"));
    }
    let problem = Problem2d {
        case: args.case,
        t_end: args.problem.t_end,
        dt_fraction: args.dt_fraction,
        jitter: 0.0,
        seed: 0,
    };
    let mut rows = Rows::new();
    let mut prev: Option<(f64, f64)> = None;
    for &n in &cells {
        let cfg = problem.config(n)?;
        let s = tri2d::run_2d(&cfg)?;
        let rate = prev.and_then(|(h, e)| eoc(e, s.l2_error, h, s.h));
        rows.push(vec![
            n.into(),
            s.h.into(),
            s.result.steps.into(),
            s.l2_error.into(),
            rate.into(),
        ]);
        prev = Some((s.h, s.l2_error));
    }
    write_csv(
        args.output.as_deref(),
        &config,
        &["cells", "h", "steps", "l2", "eoc_l2"],
        &rows,
    )
}

fn report_rows(scope: &str, r: &SbpReport, rows: &mut Rows) {
    for (name, res) in &r.residuals {
        rows.push(vec![
            scope.into(),
            name.as_str().into(),
            (*res).into(),
            r.tolerance.into(),
            (*res <= r.tolerance).into(),
        ]);
    }
}

fn sbp_check(args: &SbpCheckArgs) -> Result<(), CliError> {
    if args.order < 2 {
        return Err(invalid("--order must be at least 2"));
    }
    let mut rows = Rows::new();
    let element = check_element(&element_sbp::<Rational>(args.order)?);
    report_rows(&format!("element k={}", args.order), &element, &mut rows);
    let mut ok = element.passes();
    if args.order == 2 {
        for &n in &args.cells {
            let g = check_global(&global_periodic_operator::<Rational>(
                n,
                Rational::from_int(1),
            )?);
            report_rows(&format!("global cells={n}"), &g, &mut rows);
            ok &= g.passes();
        }
    }
    write_csv(
        args.output.as_deref(),
        &echo("sbp-check", args),
        &["scope", "identity", "residual", "tolerance", "pass"],
        &rows,
    )?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Numerical(
            "summation-by-parts residual above tolerance".into(),
        ))
    }
}

fn parse_fraction(s: &str) -> Result<(i64, i64), CliError> {
    let bad = || invalid(format!("cannot read {s:?} as an integer or fraction"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (
            n.trim().parse().map_err(|_| bad())?,
            d.trim().parse().map_err(|_| bad())?,
        ),
        None => (s.trim().parse().map_err(|_| bad())?, 1),
    };
    if d == 0 {
        return Err(bad());
    }
    Ok((n, d))
}

fn exact_row<T: Field + std::fmt::Display>(name: &str, index: Option<usize>, x: &T) -> Vec<Cell> {
    vec![
        name.into(),
        index.map_or(Cell::Empty, Cell::from),
        x.to_string().into(),
        x.to_f64().into(),
    ]
}

fn matrix_rows(name: &str, m: &DenseMatrix<Rational>, rows: &mut Rows) {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let x = &m[(i, j)];
            rows.push(vec![
                name.into(),
                i.into(),
                j.into(),
                x.to_string().into(),
                x.to_f64().into(),
            ]);
        }
    }
}

fn basis_check(args: &BasisCheckArgs) -> Result<(), CliError> {
    let config = echo("basis-check", args);
    if args.dim == 1 {
        if args.order < 2 {
            return Err(invalid("--order must be at least 2"));
        }
        let basis = build_dual_basis::<Rational>(args.order)?;
        let ops = OperatorSet1D::new(&basis, Rational::from_int(1))?;
        let mut rows = Rows::new();
        for (name, m) in [
            ("M", &ops.m),
            ("M_inv", &ops.m_inv),
            ("Q", &ops.q),
            ("D", &ops.d),
            ("B", &ops.b),
        ] {
            matrix_rows(name, m, &mut rows);
        }
        return write_csv(
            args.output.as_deref(),
            &config,
            &["matrix", "row", "col", "exact", "value"],
            &rows,
        );
    }

    let variant = match (args.order, args.variant) {
        (2, None | Some(VariantArg::Quadratic)) => TriVariant::Quadratic,
        (3, None | Some(VariantArg::CubicMoment)) => TriVariant::CubicMoment,
        (3, Some(VariantArg::Cubic)) => TriVariant::Cubic,
        (k, v) => {
            return Err(invalid(format!(
                "no triangle element of order {k} and variant {v:?}"
            )))
        }
    };
    let (n, d) = parse_fraction(&args.moment_total)?;
    if n <= 0 || d < 0 {
        return Err(invalid("--moment-total must be positive"));
    }
    let basis = variant.basis(Surd5::from_ratio(n, d))?;
    let w = basis.centroid_weights()?;
    let mut rows = Rows::new();
    rows.push(exact_row("omega_K", None, &w.omega));
    for (i, b) in w.boundary.iter().enumerate() {
        rows.push(exact_row("boundary_coefficient", Some(i), b));
    }
    rows.push(exact_row("alpha_K", None, &w.alpha_k));
    for (i, a) in w.alphas.iter().enumerate() {
        rows.push(exact_row("alpha", Some(i), a));
    }
    rows.push(exact_row("weight_sum", None, &w.weight_sum()));
    for (i, x) in basis.moment_coefficients(0).iter().enumerate() {
        rows.push(exact_row("moment_coefficient", Some(i), x));
    }
    if variant == TriVariant::CubicMoment {
        for (i, v) in boundary_lagrange_centroid(3)?.iter().enumerate() {
            rows.push(exact_row("lagrange_at_centroid", Some(i), v));
        }
    }
    let signs = w.sign_pattern_holds();
    rows.push(vec![
        "sign_pattern".into(),
        Cell::Empty,
        signs.into(),
        Cell::Empty,
    ]);
    write_csv(
        args.output.as_deref(),
        &config,
        &["quantity", "index", "exact", "value"],
        &rows,
    )?;
    eprintln!(
        "omega_K = {}, sign pattern {}",
        w.omega,
        if signs { "holds" } else { "fails" }
    );
    Ok(())
}

fn bp_check(args: &BpCheckArgs) -> Result<(), CliError> {
    if args.trials == 0 {
        return Err(invalid("--trials must be positive"));
    }
    let r = match args.dim {
        1 => bp1d::random_average_trials(args.trials, args.seed),
        _ => tri2d::random_average_trials(args.trials, args.seed),
    };
    let identity = (args.dim == 1).then_some(r.max_identity_error);
    let row = vec![
        Cell::from(args.dim as usize),
        r.trials.into(),
        r.violations.into(),
        r.max_excess.into(),
        identity.into(),
    ];
    write_csv(
        args.output.as_deref(),
        &echo("bp-check", args),
        &[
            "dim",
            "trials",
            "violations",
            "max_excess",
            "max_identity_error",
        ],
        &[row],
    )?;
    if r.violations > 0 || r.max_identity_error > IDENTITY_TOLERANCE {
        return Err(CliError::Numerical(format!(
            "{} of {} trials left [m, M] by more than {BOUND_SLACK:e}",
            r.violations, r.trials
        )));
    }
    Ok(())
}
