//! One handler per subcommand.

use anyhow::Result;
use serde::Serialize;
use unitfield::charts::{bending_fd, ChartId, ChartPoint};
use unitfield::fieldlab::{polar_decompose, FieldSpec, PolarAngles};
use unitfield::flowtrace;
use unitfield::pendulum::{self, ClosedForm, PendulumSolution};
use unitfield::repro::{self, CriterionOutcome};
use unitfield::residuals::{self, AxisRange, GridSpec, ResidualReport, Verdict};
use unitfield::stability;

use crate::family::{point, FamilyArgs};
use crate::report::{fmt_num, Emitter, Format, Table};
use crate::{
    CheckCmd, Command, Failed, FieldCmd, FlowCmd, GridArgs, PendulumCmd, PointArgs, ProfileMethod, ReproCmd,
    StabilityCmd, Usage,
};

pub fn run(cmd: &Command, out: &Emitter) -> Result<()> {
    match cmd {
        Command::Field(FieldCmd::Eval { family, points }) => field_eval(family, points, out),
        Command::Field(FieldCmd::Bending { family, points, h }) => field_bending(family, points, *h, out),
        Command::Check(c) => check(c, out),
        Command::Pendulum(PendulumCmd::Solve {
            q,
            r_min,
            r_max,
            n,
            method,
            tol,
        }) => pendulum_solve(*q, *r_min, *r_max, *n, *method, *tol, out),
        Command::Stability(s) => stability_cmd(s, out),
        Command::Flow(FlowCmd::Trace { family, start, step, n }) => flow_trace(family, *start, *step, *n, out),
        Command::Flow(FlowCmd::Diagnose {
            family,
            radii,
            start,
            step,
            n,
        }) => flow_diagnose(family, radii, start, *step, *n, out),
        Command::Repro(ReproCmd::All { only }) => repro_all(only.as_deref(), out),
    }
}

fn positive(name: &str, v: f64) -> Result<(), Usage> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Usage(format!("--{name} must be positive, got {v}")))
    }
}

#[derive(Serialize)]
struct FieldHeader {
    family: String,
    params: Vec<(String, f64)>,
    declared_harmonic: Option<bool>,
}

fn header(spec: &FieldSpec) -> FieldHeader {
    let d = spec.describe();
    FieldHeader {
        family: d.family,
        params: d.params,
        declared_harmonic: spec.declared_harmonic(),
    }
}

fn chart_points(spec: &FieldSpec, args: &PointArgs) -> Result<Vec<ChartPoint>, Usage> {
    args.point.iter().map(|&c| point(spec, args.chart, c)).collect()
}

#[derive(Serialize)]
struct EvalSample {
    chart: ChartId,
    coords: [f64; 3],
    components: [f64; 3],
    /// Absent where σ is vertical.
    polar: Option<PolarAngles>,
}

#[derive(Serialize)]
struct EvalPayload {
    #[serde(flatten)]
    field: FieldHeader,
    samples: Vec<EvalSample>,
}

fn field_eval(family: &FamilyArgs, args: &PointArgs, out: &Emitter) -> Result<()> {
    let spec = family.spec()?;
    let pts = chart_points(&spec, args)?;
    let mut samples = vec![];
    for p in &pts {
        let w = spec.evaluate(p)?;
        samples.push(EvalSample {
            chart: p.chart(),
            coords: p.coords(),
            components: w.0,
            polar: polar_decompose(w).ok(),
        });
    }
    let payload = EvalPayload {
        field: header(&spec),
        samples,
    };
    out.emit("field-eval", &payload, || {
        let mut t = Table::new(&["chart", "c1", "c2", "c3", "a1", "a2", "a3", "u", "v"]);
        for s in &payload.samples {
            let (u, v) = s.polar.map_or((f64::NAN, f64::NAN), |a| (a.u, a.v));
            let [c1, c2, c3] = s.coords;
            let [a1, a2, a3] = s.components;
            t.push(vec![
                s.chart.name().into(),
                c1.into(),
                c2.into(),
                c3.into(),
                a1.into(),
                a2.into(),
                a3.into(),
                u.into(),
                v.into(),
            ]);
        }
        t
    })
}

#[derive(Serialize)]
struct BendingSample {
    chart: ChartId,
    coords: [f64; 3],
    bending: f64,
    bending_fd: f64,
}

#[derive(Serialize)]
struct BendingPayload {
    #[serde(flatten)]
    field: FieldHeader,
    h: f64,
    samples: Vec<BendingSample>,
}

fn field_bending(family: &FamilyArgs, args: &PointArgs, h: f64, out: &Emitter) -> Result<()> {
    positive("h", h)?;
    let spec = family.spec()?;
    let pts = chart_points(&spec, args)?;
    let mut samples = vec![];
    for p in &pts {
        samples.push(BendingSample {
            chart: p.chart(),
            coords: p.coords(),
            bending: spec.bending(p)?.value,
            bending_fd: bending_fd(&spec, p, h)?,
        });
    }
    let payload = BendingPayload {
        field: header(&spec),
        h,
        samples,
    };
    out.emit("field-bending", &payload, || {
        let mut t = Table::new(&["chart", "c1", "c2", "c3", "bending", "bending_fd"]);
        for s in &payload.samples {
            let [c1, c2, c3] = s.coords;
            t.push(vec![
                s.chart.name().into(),
                c1.into(),
                c2.into(),
                c3.into(),
                s.bending.into(),
                s.bending_fd.into(),
            ]);
        }
        t
    })
}

fn grid_for(spec: &FieldSpec, g: &GridArgs) -> Result<GridSpec> {
    positive("h", g.h)?;
    positive("tol", g.tol)?;
    if !(g.margin >= 0.0) {
        return Err(Usage(format!("--margin must be >= 0, got {}", g.margin)).into());
    }
    if g.n < 2 {
        return Err(Usage(format!("--n must be at least 2, got {}", g.n)).into());
    }
    let default = residuals::default_grid(spec, g.margin, g.n)?;
    let Some(chart) = g.grid_chart else {
        return Ok(default);
    };
    if g.axis.len() != 3 {
        return Err(Usage(format!("an explicit grid needs --axis three times, got {}", g.axis.len())).into());
    }
    if chart.ambient() != spec.ambient() {
        return Err(Usage(format!("grid chart {chart} does not belong to the field's space")).into());
    }
    let mut axes = [AxisRange::new(0.0, 1.0, 2); 3];
    for (a, &[min, max, count]) in axes.iter_mut().zip(&g.axis) {
        if count.fract() != 0.0 || count < 2.0 {
            return Err(Usage(format!("axis count must be an integer >= 2, got {count}")).into());
        }
        *a = AxisRange::new(min, max, count as usize);
    }
    GridSpec::new(chart, axes, default.exclusion).map_err(|e| Usage(e.to_string()).into())
}

fn residual_table(r: &ResidualReport) -> Table {
    let mut t = Table::new(&[
        "check",
        "family",
        "channel",
        "max",
        "mean",
        "coarse_max_1",
        "coarse_max_2",
        "order",
        "exact",
        "threshold",
        "pass",
    ]);
    for c in &r.channels {
        t.push(vec![
            r.check.as_str().into(),
            r.family.as_str().into(),
            c.name.as_str().into(),
            c.max.into(),
            c.mean.into(),
            c.coarse_max[0].into(),
            c.coarse_max[1].into(),
            c.order.unwrap_or(f64::NAN).into(),
            c.exact.into(),
            c.threshold.into(),
            c.pass.into(),
        ]);
    }
    t
}

fn check(cmd: &CheckCmd, out: &Emitter) -> Result<()> {
    let (family, g, name) = match cmd {
        CheckCmd::Harmonic { family, grid } => (family, grid, "check-harmonic"),
        CheckCmd::Reduced { family, grid } => (family, grid, "check-reduced"),
        CheckCmd::Map { family, grid } => (family, grid, "check-map"),
    };
    let spec = family.spec()?;
    let grid = grid_for(&spec, g)?;
    let report = match cmd {
        CheckCmd::Harmonic { .. } => residuals::harmonic_section_residual(&spec, &grid, g.h, g.tol)?,
        CheckCmd::Reduced { .. } => residuals::reduced_residual(&spec, &grid, g.h, g.tol)?,
        CheckCmd::Map { .. } => residuals::harmonic_map_test(&spec, &grid, g.h, g.tol)?,
    };
    out.emit(name, &report, || residual_table(&report))?;
    if report.verdict == Verdict::Fail {
        let worst = report
            .channels
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{} max {} > {}", c.name, fmt_num(c.max), fmt_num(c.threshold)))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Failed(format!("{} {}: {worst}", report.check, report.family)).into());
    }
    Ok(())
}

#[derive(Serialize)]
struct PendulumPayload {
    solution: PendulumSolution,
    bending: Vec<f64>,
    /// Radius where v = π/2, if reached.
    crossing_radius: Option<f64>,
    bending_limit_at_zero: f64,
}

fn pendulum_solve(q: f64, r_min: f64, r_max: f64, n: usize, method: ProfileMethod, tol: f64, out: &Emitter) -> Result<()> {
    if !q.is_finite() {
        return Err(Usage(format!("--q must be finite, got {q}")).into());
    }
    positive("r-min", r_min)?;
    positive("tol", tol)?;
    if !(r_max > r_min) || !r_max.is_finite() || n < 2 {
        return Err(Usage("need r_min < r_max and n >= 2".into()).into());
    }
    let radii = pendulum::log_grid(r_min, r_max, n);
    let solution = match method {
        ProfileMethod::ClosedForm => PendulumSolution::closed_form_on(q, &radii),
        ProfileMethod::Shooting => pendulum::solve_shooting_on(q, &radii, tol)?,
    };
    let bending = solution
        .samples
        .iter()
        .map(|s| pendulum::bending_from_profile(s.r, s.v, s.v_prime))
        .collect();
    let crossing_radius = if q == 0.0 {
        None
    } else {
        Some(pendulum::crossing_radius(&ClosedForm { q }, 1e-14)?)
    };
    let limit = pendulum::energy_density_profile(q, &radii[..1])?.limit_at_zero;
    let payload = PendulumPayload {
        solution,
        bending,
        crossing_radius,
        bending_limit_at_zero: limit,
    };
    out.emit("pendulum-solve", &payload, || {
        let mut t = Table::new(&["r", "v", "v_prime", "bending"]);
        for (s, b) in payload.solution.samples.iter().zip(&payload.bending) {
            t.push(vec![s.r.into(), s.v.into(), s.v_prime.into(), (*b).into()]);
        }
        t
    })
}

fn parse_pair(s: &str, name: &str) -> Result<(f64, f64), Usage> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Usage(format!("--{name}: {e}")))?;
    match v[..] {
        [a, b] if a > 0.0 && a < b && b.is_finite() => Ok((a, b)),
        _ => Err(Usage(format!("--{name} must be 'min,max' with 0 < min < max, got '{s}'"))),
    }
}

#[derive(Serialize)]
struct HessianPoint {
    evaluation: stability::HessianEvaluation,
    shell_integrals: stability::ShellIntegrals,
    crude_upper_bound: f64,
}

#[derive(Serialize)]
struct HessianLattice {
    n: usize,
    r_range: (f64, f64),
    delta_range: (f64, f64),
    max_rel_diff: f64,
    max_exact_rel_diff: f64,
    evaluations: Vec<stability::HessianEvaluation>,
}

#[derive(Serialize)]
struct R0Payload {
    thresholds: stability::StabilityThresholds,
    r0: stability::R0Report,
}

fn hessian_table(evals: &[stability::HessianEvaluation]) -> Table {
    let mut t = Table::new(&[
        "r",
        "delta",
        "closed_form",
        "closed_form_exact",
        "quadrature",
        "rel_diff",
        "exact_rel_diff",
    ]);
    for e in evals {
        t.push(vec![
            e.r.into(),
            e.delta.into(),
            e.closed_form.into(),
            e.closed_form_exact.into(),
            e.quadrature.into(),
            e.rel_diff.into(),
            e.exact_rel_diff.into(),
        ]);
    }
    t
}

fn stability_cmd(cmd: &StabilityCmd, out: &Emitter) -> Result<()> {
    match cmd {
        StabilityCmd::Hessian {
            r,
            delta,
            lattice,
            r_range,
            delta_range,
            tol,
        } => {
            positive("tol", *tol)?;
            if let Some(n) = *lattice {
                if n < 2 {
                    return Err(Usage(format!("--lattice must be at least 2, got {n}")).into());
                }
                let rr = parse_pair(r_range, "r-range")?;
                let dr = parse_pair(delta_range, "delta-range")?;
                let evaluations = stability::hessian_lattice(rr, dr, n, *tol)?;
                let payload = HessianLattice {
                    n,
                    r_range: rr,
                    delta_range: dr,
                    max_rel_diff: evaluations.iter().map(|e| e.rel_diff).fold(0.0, f64::max),
                    max_exact_rel_diff: evaluations.iter().map(|e| e.exact_rel_diff).fold(0.0, f64::max),
                    evaluations,
                };
                return out.emit("stability-hessian", &payload, || hessian_table(&payload.evaluations));
            }
            let (Some(r), Some(delta)) = (*r, *delta) else {
                return Err(Usage("give --r and --delta, or --lattice n".into()).into());
            };
            positive("r", r)?;
            positive("delta", delta)?;
            let payload = HessianPoint {
                evaluation: stability::evaluate_hessian(r, delta, *tol)?,
                shell_integrals: stability::shell_integrals(r, delta)?,
                crude_upper_bound: stability::crude_upper_bound(r, delta)?,
            };
            out.emit("stability-hessian", &payload, || hessian_table(&[payload.evaluation]))
        }
        StabilityCmd::Thresholds { tol } => {
            positive("tol", *tol)?;
            let t = stability::find_thresholds(*tol)?;
            out.emit("stability-thresholds", t, || {
                let mut table = Table::new(&["delta_s", "delta_u", "tol", "r_scan_max"]);
                table.push(vec![t.delta_s.into(), t.delta_u.into(), t.tol.into(), t.r_scan_max.into()]);
                table
            })
        }
        StabilityCmd::R0 { delta0, tol } => {
            positive("delta0", *delta0)?;
            positive("tol", *tol)?;
            let thresholds = stability::find_thresholds(1e-6)?;
            let r0 = stability::find_r0(*delta0, *tol, &thresholds)?;
            out.emit("stability-r0", R0Payload { thresholds, r0 }, || {
                let mut table = Table::new(&["delta0", "r0", "support_radius", "confirmed_to"]);
                table.push(vec![
                    r0.delta0.into(),
                    r0.r0.into(),
                    r0.support_radius.into(),
                    r0.confirmed_to.into(),
                ]);
                table
            })
        }
    }
}

fn flow_trace(family: &FamilyArgs, start: [f64; 3], step: f64, n: usize, out: &Emitter) -> Result<()> {
    positive("step", step)?;
    let spec = family.spec()?;
    let p = point(&spec, None, start)?;
    let s = flowtrace::trace(&spec, &p, step, n)?;
    out.emit("flow-trace", &s, || {
        let mut t = Table::new(&["s", "x", "y", "z"]);
        for (k, x) in s.points.iter().enumerate() {
            t.push(vec![s.arc_length(k).into(), x[0].into(), x[1].into(), x[2].into()]);
        }
        t
    })
}

fn flow_diagnose(
    family: &FamilyArgs,
    radii: &[f64],
    starts: &[[f64; 3]],
    step: f64,
    n: usize,
    out: &Emitter,
) -> Result<()> {
    positive("step", step)?;
    let spec = family.spec()?;
    if !matches!(spec, FieldSpec::EuclidPendulum { .. }) {
        return Err(Usage("flow diagnose applies to euclid-pendulum".into()).into());
    }
    let helix = !radii.is_empty();
    let d = match (helix, starts.is_empty()) {
        (true, true) => flowtrace::helix_diagnostics(&spec, radii, step)?,
        (false, false) => flowtrace::fountain_diagnostics(&spec, starts, step, n)?,
        _ => return Err(Usage("give --radii (helix, p = ±π/2) or --start (fountain, p = 0), not both".into()).into()),
    };
    out.emit("flow-diagnose", &d, || {
        if helix {
            let mut t = Table::new(&["r", "slope", "chirality", "vertical"]);
            for s in &d.slope_profile {
                let chir = s.chirality.map_or("none".to_string(), |c| format!("{c:?}").to_lowercase());
                t.push(vec![
                    s.r.into(),
                    s.slope.into(),
                    chir.into(),
                    format!("{:?}", s.vertical).to_lowercase().into(),
                ]);
            }
            t
        } else {
            let mut t = Table::new(&[
                "arc_length",
                "x",
                "y",
                "z",
                "radius",
                "vertical_component",
                "radial_component",
            ]);
            for c in &d.crossings {
                t.push(vec![
                    c.arc_length.into(),
                    c.point[0].into(),
                    c.point[1].into(),
                    c.point[2].into(),
                    c.radius.into(),
                    c.vertical_component.into(),
                    c.radial_component.into(),
                ]);
            }
            t
        }
    })
}

fn text_table(outcomes: &[CriterionOutcome]) -> String {
    let mut s = String::new();
    for o in outcomes {
        s.push_str(&format!(
            "{:<4} {:<3} {} ({:.2} s)\n",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.title,
            o.elapsed_s
        ));
        if let Some(e) = &o.error {
            s.push_str(&format!("       error: {e}\n"));
        }
        for c in o.failures() {
            s.push_str(&format!("       {}: {} vs limit {}\n", c.name, fmt_num(c.value), fmt_num(c.limit)));
        }
        for (name, v) in &o.reported {
            s.push_str(&format!("       {name} = {}\n", fmt_num(*v)));
        }
    }
    s
}

fn repro_all(only: Option<&str>, out: &Emitter) -> Result<()> {
    let outcomes = match only {
        Some(id) => vec![repro::run_one(id).ok_or_else(|| Usage(format!("no reproduction row '{id}'")))?],
        None => repro::run_all(),
    };
    match out.format.unwrap_or(Format::Table) {
        Format::Table => out.sink.write("repro", Format::Table, text_table(&outcomes).as_bytes())?,
        Format::Json => out.sink.write("repro", Format::Json, &out.json_bytes(&outcomes)?)?,
        Format::Csv => {
            let mut t = Table::new(&["id", "check", "value", "relation", "limit", "pass"]);
            for o in &outcomes {
                for c in &o.checks {
                    t.push(vec![
                        o.id.as_str().into(),
                        c.name.as_str().into(),
                        c.value.into(),
                        format!("{:?}", c.relation).into(),
                        c.limit.into(),
                        c.pass.into(),
                    ]);
                }
            }
            out.sink.write("repro", Format::Csv, &t.to_bytes()?)?;
        }
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failed(format!("rows {} did not pass", failed.join(", "))).into())
    }
}
