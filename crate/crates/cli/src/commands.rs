use std::path::Path;

use serde::Serialize;

use lagstab::curvature_flow::{run_flow, FlowConfig, FlowResult, FlowStatus};
use lagstab::mirror::{extension_wall, mirror_map_any, sheaf_stable, WallScenario};
use lagstab::monodromy::{
    family_track, normalize, phase_audit, FamilyKind, FamilyModel, GradedExpression, PairingLattice,
    RewriteStrategy,
};
use lagstab::stability::is_stable;
use lagstab::surgery::{connect_sum_with, grading_compatible, NeckParameters, SumOptions};
use lagstab::{shapes, Class, Curve, Torus};

use crate::output::{to_json, write_json, RunManifest};
use crate::{
    figures, ClassArgs, Cli, CliError, Command, FlowArgs, Model, MonodromyArgs, Outcome, Strategy,
    SurgeryArgs, TwistArgs, EXIT_OK, EXIT_SINGULAR, EXIT_TIMEOUT,
};

type Res<T> = std::result::Result<T, CliError>;

pub(crate) fn run(cli: &Cli, flags: &[String]) -> Res<Outcome> {
    let name = match &cli.command {
        Command::Flow(_) => "flow",
        Command::Phase(_) => "phase",
        Command::Surgery(_) => "surgery",
        Command::Stability(_) => "stability",
        Command::Monodromy(_) => "monodromy",
        Command::Twist(_) => "twist",
        Command::Mirror(_) => "mirror",
        Command::Wall(_) => "wall",
        Command::Figures(_) => "figures",
    };
    let mut m = RunManifest::new(name, flags, cli.seed);
    if let Some(p) = &cli.out {
        m.outputs.push(p.display().to_string());
    }
    match &cli.command {
        Command::Flow(a) => flow(a, m),
        Command::Phase(a) => phase(a, m),
        Command::Surgery(a) => surgery(a, m),
        Command::Stability(a) => stability(&a.class, a.bound, m),
        Command::Monodromy(a) => monodromy(a, m),
        Command::Twist(a) => twist(a, m),
        Command::Mirror(a) => mirror(a, m),
        Command::Wall(a) => wall(a.mu, a.t, m),
        Command::Figures(a) => figures::run(a, m),
    }
}

fn ok(json: String) -> Res<Outcome> {
    Ok(Outcome {
        json,
        report: Vec::new(),
        code: EXIT_OK,
    })
}

pub(crate) fn read_curve(path: &Path) -> Res<Curve> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn graded_class(a: &ClassArgs) -> Res<Class> {
    let g = Torus::standard().with_alpha(a.alpha);
    Ok(Class::with_sheet(a.class[0], a.class[1], a.lift, g)?)
}

#[derive(Serialize)]
pub(crate) struct FlowSummary {
    pub status: FlowStatus,
    pub line_class: Option<[i64; 2]>,
    pub steps: usize,
    pub time: f64,
    pub length: f64,
    pub phase_spread: f64,
    pub moment_norm: f64,
    pub cumulative_flux: f64,
    pub warnings: Vec<String>,
}

impl FlowSummary {
    pub fn of(r: &FlowResult<f64>) -> Self {
        let last = r.diagnostics.samples.last().copied().unwrap_or_default();
        FlowSummary {
            status: r.status,
            line_class: r.line_class,
            steps: r.steps,
            time: last.time,
            length: last.length,
            phase_spread: last.phase_spread,
            moment_norm: last.moment_norm,
            cumulative_flux: last.cumulative_flux,
            warnings: r.warnings.clone(),
        }
    }
}

pub(crate) fn exit_for(status: FlowStatus) -> i32 {
    match status {
        FlowStatus::ConvergedToLine => EXIT_OK,
        FlowStatus::Singular => EXIT_SINGULAR,
        FlowStatus::Timeout => EXIT_TIMEOUT,
    }
}

fn flow(a: &FlowArgs, mut m: RunManifest) -> Res<Outcome> {
    let curve = match (&a.input, a.line) {
        (Some(path), _) => {
            m.inputs.push(path.display().to_string());
            read_curve(path)?
        }
        (None, Some(class)) => {
            shapes::perturbed_line(class, a.points, a.perturb, a.modes, m.seed, Torus::standard())?
        }
        (None, None) => return Err(CliError::Input("need --input or --line".into())),
    };
    let mut cfg = FlowConfig::default();
    if let Some(t) = a.max_time {
        cfg.max_time = t;
    }
    if let Some(t) = a.tol {
        cfg.convergence_phase_spread = t;
    }
    if let Some(s) = a.dt_safety {
        cfg.step_safety = s;
    }
    let r = run_flow(&curve, &cfg)?;
    if let Some(p) = &a.out_csv {
        std::fs::write(p, r.diagnostics.to_csv())?;
        m.outputs.push(p.display().to_string());
    }
    if let Some(p) = &a.out_curve {
        write_json(p, &r.final_curve)?;
        m.outputs.push(p.display().to_string());
    }
    #[derive(Serialize)]
    struct Out {
        manifest: RunManifest,
        config: FlowConfig,
        #[serde(flatten)]
        summary: FlowSummary,
    }
    let summary = FlowSummary::of(&r);
    let report = vec![format!(
        "flow: {:?} after {} steps, t = {:.4}, length {:.6}",
        r.status, r.steps, summary.time, summary.length
    )];
    Ok(Outcome {
        json: to_json(&Out {
            manifest: m,
            config: cfg,
            summary,
        }),
        report,
        code: exit_for(r.status),
    })
}

fn phase(a: &ClassArgs, m: RunManifest) -> Res<Outcome> {
    let c = graded_class(a)?;
    let (phi, mu) = c.phase_and_slope();
    #[derive(Serialize)]
    struct Out {
        manifest: RunManifest,
        p: i64,
        q: i64,
        phi: f64,
        mu: lagstab::Slope<f64>,
    }
    ok(to_json(&Out {
        manifest: m,
        p: c.p(),
        q: c.q(),
        phi,
        mu,
    }))
}

#[derive(Serialize)]
struct WindowCheck {
    theta1: f64,
    theta2: f64,
    compatible: bool,
}

fn surgery(a: &SurgeryArgs, mut m: RunManifest) -> Res<Outcome> {
    let c1 = read_curve(&a.first)?;
    let c2 = read_curve(&a.second)?;
    m.inputs.push(a.first.display().to_string());
    m.inputs.push(a.second.display().to_string());
    let pts = lagstab::surgery::intersections(&c1, &c2)?;
    let necks = match &a.necks {
        Some(s) => NeckParameters { scales: s.clone() },
        None => NeckParameters::uniform(pts.len()),
    };
    let opts = SumOptions {
        radius: a.radius,
        ..SumOptions::default()
    };
    let sum = connect_sum_with(&c1, &c2, &necks, &opts)?;
    let shift = std::f64::consts::TAU * sum.sheet_shift as f64;
    let window: Vec<WindowCheck> = sum
        .points
        .iter()
        .map(|p| {
            let (t1, t2) = (p.local_phases[0], p.local_phases[1] + shift);
            WindowCheck {
                theta1: t1,
                theta2: t2,
                compatible: grading_compatible(t1, t2),
            }
        })
        .collect();
    let curves = if let Some(p) = &a.out_curve {
        match sum.curve() {
            Some(c) => write_json(p, c)?,
            None => write_json(p, &sum.components)?,
        }
        m.outputs.push(p.display().to_string());
        None
    } else {
        Some(&sum.components)
    };
    #[derive(Serialize)]
    struct Out<'a> {
        manifest: RunManifest,
        class: [i64; 2],
        component_count: usize,
        sheet_shift: i64,
        radii: &'a [f64],
        points: &'a [lagstab::surgery::IntersectionPoint<f64>],
        phase_window: Vec<WindowCheck>,
        #[serde(skip_serializing_if = "Option::is_none")]
        components: Option<&'a Vec<Curve>>,
    }
    let report = vec![format!(
        "surgery: {} points, class {:?}, {} component(s)",
        sum.points.len(),
        sum.closure(),
        sum.components.len()
    )];
    Ok(Outcome {
        json: to_json(&Out {
            manifest: m,
            class: sum.closure(),
            component_count: sum.components.len(),
            sheet_shift: sum.sheet_shift,
            radii: &sum.radii,
            points: &sum.points,
            phase_window: window,
            components: curves,
        }),
        report,
        code: EXIT_OK,
    })
}

fn stability(a: &ClassArgs, bound: i64, m: RunManifest) -> Res<Outcome> {
    let c = graded_class(a)?;
    let v = is_stable(&c, bound)?;
    #[derive(Serialize)]
    struct Out {
        manifest: RunManifest,
        p: i64,
        q: i64,
        phase_lift: f64,
        #[serde(flatten)]
        verdict: lagstab::stability::StabilityVerdict<f64>,
    }
    let report = vec![format!("stability: ({}, {}) is {:?}", c.p(), c.q(), v.status)];
    Ok(Outcome {
        json: to_json(&Out {
            manifest: m,
            p: c.p(),
            q: c.q(),
            phase_lift: c.phase_lift(),
            verdict: v,
        }),
        report,
        code: EXIT_OK,
    })
}

pub(crate) fn family_kind(model: Model) -> FamilyKind {
    match model {
        Model::Threefold => FamilyKind::Threefold,
        Model::K3 => FamilyKind::K3BaseChanged,
    }
}

fn monodromy(a: &MonodromyArgs, m: RunManifest) -> Res<Outcome> {
    if !(a.radius > 0.0) || !a.radius.is_finite() {
        return Err(CliError::Input("--radius must be positive".into()));
    }
    let tr = family_track(&FamilyModel::circle(family_kind(a.model), a.radius, a.samples))?;
    #[derive(Serialize)]
    struct Out {
        manifest: RunManifest,
        model: FamilyKind,
        winding: i64,
        monodromy_power: i64,
        walls: Vec<lagstab::monodromy::Wall<f64>>,
        rejected: Vec<lagstab::monodromy::Wall<f64>>,
    }
    ok(to_json(&Out {
        manifest: m,
        model: family_kind(a.model),
        winding: tr.winding,
        monodromy_power: tr.monodromy_power,
        walls: tr.walls,
        rejected: tr.rejected,
    }))
}

fn twist(a: &TwistArgs, m: RunManifest) -> Res<Outcome> {
    let expr: GradedExpression = a.expression.parse()?;
    let lattice = PairingLattice::chain((expr.max_generator() + 1).max(2), a.dimension)?;
    let strategy = match a.strategy {
        Strategy::Contract => RewriteStrategy::Contract,
        Strategy::Distribute => RewriteStrategy::Distribute,
    };
    let normal = normalize(&lattice, &expr, strategy)?;
    let audit = match &a.phases {
        Some(ph) => Some(phase_audit(&normal, ph, a.dimension)?),
        None => None,
    };
    #[derive(Serialize)]
    struct Out {
        manifest: RunManifest,
        input: GradedExpression,
        normal_form: GradedExpression,
        infix: String,
        class: Vec<i64>,
        normal_form_class: Vec<i64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        audit: Option<lagstab::monodromy::PhaseAudit<f64>>,
    }
    let report = vec![format!("twist: {} -> {}", expr.infix(), normal.infix())];
    Ok(Outcome {
        json: to_json(&Out {
            manifest: m,
            class: expr.class(&lattice)?,
            normal_form_class: normal.class(&lattice)?,
            infix: normal.infix(),
            input: expr,
            normal_form: normal,
            audit,
        }),
        report,
        code: EXIT_OK,
    })
}

#[derive(Serialize)]
pub(crate) struct SheafRow {
    pub p: i64,
    pub q: i64,
    pub rank: i64,
    pub degree: i64,
    pub shift: i64,
    pub stable: bool,
    pub slope: Option<f64>,
    pub slope_exact: Option<String>,
}

pub(crate) fn sheaf_row(c: &Class) -> Res<SheafRow> {
    let img = mirror_map_any(c)?;
    let s = img.sheaf;
    let slope = s.slope();
    Ok(SheafRow {
        p: c.p(),
        q: c.q(),
        rank: s.rank(),
        degree: s.degree(),
        shift: img.shift,
        stable: sheaf_stable(&s),
        slope: slope.map(|r| *r.numer() as f64 / *r.denom() as f64),
        slope_exact: slope.map(|r| r.to_string()),
    })
}

fn mirror(a: &ClassArgs, m: RunManifest) -> Res<Outcome> {
    let row = sheaf_row(&graded_class(a)?)?;
    #[derive(Serialize)]
    struct Out {
        manifest: RunManifest,
        #[serde(flatten)]
        row: SheafRow,
    }
    ok(to_json(&Out { manifest: m, row }))
}

fn wall(mu: f64, t: f64, m: RunManifest) -> Res<Outcome> {
    let v = extension_wall(&WallScenario { mu, t })?;
    #[derive(Serialize)]
    struct Out {
        manifest: RunManifest,
        mu: f64,
        t: f64,
        #[serde(flatten)]
        verdict: lagstab::mirror::WallVerdict,
    }
    ok(to_json(&Out {
        manifest: m,
        mu,
        t,
        verdict: v,
    }))
}
