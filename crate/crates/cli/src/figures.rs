//! Data for the three figures, one JSON file per figure plus curve and CSV
//! side files. Figures are independent and run on separate threads.

use std::path::{Path, PathBuf};

use serde::Serialize;

use lagstab::curvature_flow::{run_flow, FlowConfig};
use lagstab::monodromy::{
    family_track, graded_twist_rewrite, phase_audit, FamilyKind, FamilyModel, GradedExpression,
    PairingLattice, PhaseAudit, RewriteStrategy, Wall,
};
use lagstab::surgery::{connect_sum, grading_compatible, NeckParameters};
use lagstab::{shapes, Class, Curve, Point, Torus};

use crate::commands::{sheaf_row, FlowSummary, SheafRow};
use crate::output::{to_json, write_json, RunManifest};
use crate::{CliError, Figure, FiguresArgs, Outcome, EXIT_OK};

type Res<T> = std::result::Result<T, CliError>;

const LOOP_STEPS: usize = 256;

pub(crate) fn run(a: &FiguresArgs, mut m: RunManifest) -> Res<Outcome> {
    std::fs::create_dir_all(&a.out_dir)?;
    let wanted: &[Figure] = match a.which {
        Figure::All => &[Figure::Fig1, Figure::Fig2, Figure::Fig3],
        Figure::Fig1 => &[Figure::Fig1],
        Figure::Fig2 => &[Figure::Fig2],
        Figure::Fig3 => &[Figure::Fig3],
    };
    let dir = a.out_dir.as_path();
    let results: Vec<Res<Vec<PathBuf>>> = std::thread::scope(|s| {
        let handles: Vec<_> = wanted
            .iter()
            .map(|&f| {
                let m = m.clone();
                s.spawn(move || match f {
                    Figure::Fig1 => family_figure(dir, "fig1", FamilyKind::K3BaseChanged, 2, m),
                    Figure::Fig2 => family_figure(dir, "fig2", FamilyKind::Threefold, 3, m),
                    _ => fig3(dir, m),
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("figure thread panicked"))
            .collect()
    });
    let mut report = Vec::new();
    for r in results {
        for p in r? {
            report.push(format!("figures: wrote {}", p.display()));
            m.outputs.push(p.display().to_string());
        }
    }
    #[derive(Serialize)]
    struct Out {
        manifest: RunManifest,
    }
    Ok(Outcome {
        json: to_json(&Out { manifest: m }),
        report,
        code: EXIT_OK,
    })
}

#[derive(Serialize)]
struct Rewrite {
    input: String,
    strategy: &'static str,
    normal_form: String,
    infix: String,
    class: Vec<i64>,
    audit: PhaseAudit<f64>,
}

fn rewrite(
    lattice: &PairingLattice,
    expr: &str,
    twist: usize,
    power: i64,
    strategy: RewriteStrategy,
    phases: &[f64],
) -> Res<Rewrite> {
    let e: GradedExpression = expr.parse()?;
    let r = graded_twist_rewrite(lattice, &e, twist, power, strategy)?;
    Ok(Rewrite {
        input: format!("(T L{} {} {})", twist + 1, power, e),
        strategy: match strategy {
            RewriteStrategy::Contract => "contract",
            RewriteStrategy::Distribute => "distribute",
        },
        normal_form: r.to_string(),
        infix: r.infix(),
        class: r.class(lattice)?,
        audit: phase_audit(&r, phases, lattice.dimension())?,
    })
}

/// Phase of the vanishing cycle in polar form `(R, phi)` around a loop of
/// the parameter, the walls it meets, and the twist identities for the
/// corresponding monodromy.
fn family_figure(
    dir: &Path,
    name: &str,
    kind: FamilyKind,
    dimension: u32,
    manifest: RunManifest,
) -> Res<Vec<PathBuf>> {
    let model = FamilyModel::circle(kind, 1.0, LOOP_STEPS);
    let tr = family_track(&model)?;
    let polar: Vec<[f64; 2]> = model
        .samples
        .iter()
        .zip(&tr.phases)
        .map(|(u, &phi)| [u.norm(), phi])
        .collect();
    let lattice = PairingLattice::two_spheres(dimension)?;
    let eps = 0.01;
    let phases = [eps, 0.0];
    let power = tr.monodromy_power;
    let mut rewrites = vec![rewrite(&lattice, "(sum L1 L2)", 0, power, RewriteStrategy::Contract, &phases)?];
    rewrites.push(rewrite(&lattice, "(sum L1 L2)", 0, power, RewriteStrategy::Distribute, &phases)?);
    #[derive(Serialize)]
    struct Out {
        manifest: RunManifest,
        model: FamilyKind,
        dimension: u32,
        winding: i64,
        monodromy_power: i64,
        /// `[R, phi(L1)]` per sample.
        polar: Vec<[f64; 2]>,
        walls: Vec<Wall<f64>>,
        rejected: Vec<Wall<f64>>,
        rewrites: Vec<Rewrite>,
    }
    let path = dir.join(format!("{name}.json"));
    write_json(
        &path,
        &Out {
            manifest,
            model: kind,
            dimension,
            winding: tr.winding,
            monodromy_power: power,
            polar,
            walls: tr.walls,
            rejected: tr.rejected,
            rewrites,
        },
    )?;
    Ok(vec![path])
}

#[derive(Serialize)]
struct SumCase {
    first: [i64; 2],
    first_phase: f64,
    second: [i64; 2],
    second_phase: f64,
    compatible: bool,
    class: [i64; 2],
    maslov: i64,
    sum_curve: String,
    flow: FlowSummary,
    final_curve: String,
    diagnostics: String,
}

fn line(class: [i64; 2], base: (f64, f64)) -> Res<Curve> {
    Ok(shapes::straight_line(class, 64, Point::new(base.0, base.1), Torus::standard())?)
}

fn sum_case(dir: &Path, tag: &str, c1: &Curve, c2: &Curve, out: &mut Vec<PathBuf>) -> Res<SumCase> {
    let (phi1, phi2) = (c1.average_phase()?, c2.average_phase()?);
    let sum = connect_sum(c1, c2, &NeckParameters::uniform(1))?;
    let curve = sum
        .curve()
        .ok_or_else(|| CliError::Input("figure sum split into several components".into()))?
        .resample(256)?;
    let r = run_flow(&curve, &FlowConfig::default())?;
    let names = [
        format!("fig3_{tag}_sum.json"),
        format!("fig3_{tag}_final.json"),
        format!("fig3_{tag}_flow.csv"),
    ];
    write_json(&dir.join(&names[0]), &curve)?;
    write_json(&dir.join(&names[1]), &r.final_curve)?;
    std::fs::write(dir.join(&names[2]), r.diagnostics.to_csv())?;
    out.extend(names.iter().map(|n| dir.join(n)));
    let [sum_curve, final_curve, diagnostics] = names;
    Ok(SumCase {
        first: c1.closure(),
        first_phase: phi1,
        second: c2.closure(),
        second_phase: phi2,
        compatible: grading_compatible(phi1, phi2),
        class: sum.closure(),
        maslov: curve.maslov(),
        sum_curve,
        flow: FlowSummary::of(&r),
        final_curve,
        diagnostics,
    })
}

/// The two graded sums of a horizontal and a diagonal circle, their flows,
/// and the mirror sheaves of every class involved.
fn fig3(dir: &Path, manifest: RunManifest) -> Res<Vec<PathBuf>> {
    let horizontal = line([1, 0], (0.05, 0.3))?;
    let diagonal = line([1, 1], (0.1, 0.0))?;
    let mut out = Vec::new();
    let cases = vec![
        sum_case(dir, "a", &horizontal, &diagonal, &mut out)?,
        sum_case(dir, "b", &diagonal, &horizontal.shift_grading(1), &mut out)?,
    ];
    let g = Torus::standard();
    let table: Vec<SheafRow> = [(1, 0, 0), (1, 1, 0), (2, 1, 0), (0, 1, 0), (1, 0, 1)]
        .into_iter()
        .map(|(p, q, shift)| sheaf_row(&Class::new(p, q, g)?.shift_grading(shift)))
        .collect::<Res<_>>()?;
    #[derive(Serialize)]
    struct Out {
        manifest: RunManifest,
        reversed_order_compatible: bool,
        sums: Vec<SumCase>,
        mirror: Vec<SheafRow>,
    }
    let path = dir.join("fig3.json");
    write_json(
        &path,
        &Out {
            manifest,
            reversed_order_compatible: grading_compatible(std::f64::consts::FRAC_PI_4, 0.0),
            sums: cases,
            mirror: table,
        },
    )?;
    out.push(path);
    Ok(out)
}
