//! The numerical subcommands: solve for a field, integrate frames, build
//! the surfaces of the spectral family and compare them.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::json;

use super::config::{build_field, FieldError, LabConfig};
use super::report::{Check, Report};
use crate::calapso::{
    check_contact, check_deformation_order2, connection_form, integrate_frame, surface, symbolic_flatness, t_transform_from,
    CalapsoError, CalapsoField, DeformationReport, FrameField, Pattern, SurfacePatch, TTransform,
};
use crate::grid::Mesh;
use crate::liegroup::{random_group_element, GroupElement};
use crate::systems::{Expected, Source};

/// Why a lab run stopped before producing a report.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Numeric(#[from] CalapsoError),
    #[error("symbolic flatness check: {0}")]
    Symbolic(#[from] crate::exterior::Error),
    #[error("writing {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<(), LabError> {
    let path = dir.join(name);
    std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(&path, text))
        .map_err(|source| LabError::Io {
            path: path.display().to_string(),
            source,
        })
}

/// File-name form of a spectral parameter.
pub fn lambda_tag(lambda: f64) -> String {
    format!("{lambda}")
}

pub fn fields_csv(f: &CalapsoField) -> String {
    let mut out = String::from("x,y,k1,k2,psi,u,res_k1,res_k2,res_psi\n");
    let r = &f.residuals;
    for j in 0..f.ny() {
        for i in 0..f.nx() {
            let _ = writeln!(
                out,
                "{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                f.mesh.x(i),
                f.mesh.y(j),
                f.k1.get(i, j),
                f.k2.get(i, j),
                f.psi.get(i, j),
                f.u.get(i, j),
                r.k1,
                r.k2,
                r.psi
            );
        }
    }
    out
}

/// Text mesh: `v v1 v2 v3` per charted node, each followed by a comment
/// line with `v4`, and a quad for every cell whose corners are all charted.
pub fn surface_obj(s: &SurfacePatch, lambda: f64) -> String {
    let mut out = format!("# surface for lambda = {lambda}\n# chart coordinates (v1, v2, v3); v4 in the comment after each vertex\n");
    let mesh = s.mesh;
    let mut index = vec![None; mesh.nx * mesh.ny];
    let mut next = 1usize;
    for j in 0..mesh.ny {
        for i in 0..mesh.nx {
            if let Some(v) = s.chart.get(i, j) {
                let _ = writeln!(out, "v {:e} {:e} {:e}\n# v4 {:e}", v[0], v[1], v[2], v[3]);
                index[j * mesh.nx + i] = Some(next);
                next += 1;
            }
        }
    }
    for j in 0..mesh.ny - 1 {
        for i in 0..mesh.nx - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)].map(|(a, b)| index[b * mesh.nx + a]);
            if let [Some(a), Some(b), Some(c), Some(d)] = corners {
                let _ = writeln!(out, "f {a} {b} {c} {d}");
            }
        }
    }
    out
}

/// Full 4D chart data and the null vector itself, one row per node.
pub fn surface_csv(s: &SurfacePatch) -> String {
    let mut out = String::from("i,j,x,y,charted,v1,v2,v3,v4,F0,F1,F2,F3,F4,F5\n");
    for (i, j, f) in s.points.nodes() {
        let v = s.chart.get(i, j).unwrap_or([f64::NAN; 4]);
        let _ = writeln!(
            out,
            "{i},{j},{},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            s.mesh.x(i),
            s.mesh.y(j),
            s.chart.get(i, j).is_some() as u8,
            v[0],
            v[1],
            v[2],
            v[3],
            f[0],
            f[1],
            f[2],
            f[3],
            f[4],
            f[5]
        );
    }
    out
}

pub fn mc_diff_csv(d: &DeformationReport) -> String {
    let mut out = String::from("entry,matched,sup,relative\n");
    for e in &d.entries {
        let _ = writeln!(out, "{},{},{:e},{:e}", e.entry, e.matched, e.sup, e.relative);
    }
    out
}

/// One member of the spectral family and its checks against `lambda = 0`.
struct Member {
    transform: TTransform,
    surface: SurfacePatch,
    deformation: DeformationReport,
}

struct Lab {
    field: CalapsoField,
    base: FrameField,
    members: Vec<Member>,
}

fn base_frame(cfg: &LabConfig) -> GroupElement {
    cfg.base_frame_seed.map_or_else(GroupElement::identity, random_group_element)
}

fn run_lab(cfg: &LabConfig, report: &mut Report) -> Result<Lab, LabError> {
    let field = build_field(cfg)?;
    let r = field.residuals;
    report.check(Check::new(
        "field residuals",
        field.within_tolerance(),
        format!("k1 {:.3e}, k2 {:.3e}, psi {:.3e}, tolerance {:.1e}", r.k1, r.k2, r.psi, field.tolerance),
    ));
    let corrected = symbolic_flatness(&Pattern::corrected())?;
    report.check(Check::new(
        "connection flat under the Calapso rules",
        corrected.flat,
        format!("{} nonzero entries", corrected.residues.len()),
    ));
    // The pattern as printed is not flat; its residue is reported as data.
    let printed = symbolic_flatness(&Pattern::printed())?;

    let base = integrate_frame(&connection_form(&field, 0.0), &base_frame(cfg), cfg.frame)?;
    let mut members = Vec::new();
    for &lambda in &cfg.lambdas {
        let transform = t_transform_from(&field, &base, lambda, cfg.frame)?;
        let surface = surface(&transform.deformed);
        let deformation = check_deformation_order2(&base, &transform.deformed, cfg.tolerances.deformation)?;
        let tag = lambda_tag(lambda);
        let ff = &transform.deformed;
        report.check(Check::new(
            format!("lambda {tag}: frames stay in the group"),
            ff.drift <= cfg.tolerances.drift,
            format!("drift {:.3e}, path residual {:.3e}", ff.drift, ff.path_residual),
        ));
        report.check(Check::new(
            format!("lambda {tag}: surface lies on the quadric"),
            surface.quadric_defect <= cfg.tolerances.surface && surface.chart_defect <= cfg.tolerances.surface,
            format!(
                "quadric {:.3e}, chart {:.3e}, {} uncharted nodes",
                surface.quadric_defect,
                surface.chart_defect,
                surface.chart_singular.len()
            ),
        ));
        report.check(Check::new(
            format!("lambda {tag}: matched Maurer–Cartan entries agree"),
            deformation.matched_ok,
            format!(
                "max relative {:.3e} (tolerance {:.1e}), max unmatched {:.3e}",
                deformation.max_matched_relative, deformation.tol, deformation.max_unmatched
            ),
        ));
        members.push(Member {
            transform,
            surface,
            deformation,
        });
    }
    report.results = json!({
        "mesh": field.mesh,
        "residuals": field.residuals,
        "flatness": { "corrected": corrected, "printed": printed },
        "base": { "drift": base.drift, "pathResidual": base.path_residual },
        "members": members.iter().map(|m| json!({
            "lambda": m.transform.lambda,
            "drift": m.transform.deformed.drift,
            "pathResidual": m.transform.deformed.path_residual,
            "quadricDefect": m.surface.quadric_defect,
            "chartDefect": m.surface.chart_defect,
            "chartSingular": m.surface.chart_singular,
            "notSpacelike": m.surface.not_spacelike.len(),
            "deformation": m.deformation,
        })).collect::<Vec<_>>(),
    });
    report.provenance = vec![Expected {
        quantity: "matchedRelative",
        value: json!(cfg.tolerances.deformation),
        source: Source::Derived,
    }];
    Ok(Lab { field, base, members })
}

fn write_surfaces(lab: &Lab, dir: &Path) -> Result<(), LabError> {
    write_file(dir, "fields.csv", &fields_csv(&lab.field))?;
    for m in &lab.members {
        let tag = lambda_tag(m.transform.lambda);
        write_file(dir, &format!("surface_lambda_{tag}.obj"), &surface_obj(&m.surface, m.transform.lambda))?;
        write_file(dir, &format!("surface_lambda_{tag}.csv"), &surface_csv(&m.surface))?;
    }
    Ok(())
}

/// Field, frames and surfaces for every configured `lambda`.
pub fn cmd_calapso(cfg: &LabConfig, outdir: &Path) -> Result<Report, LabError> {
    let mut report = Report::new("calapso", serde_json::to_value(cfg).expect("config is serialisable"));
    let lab = run_lab(cfg, &mut report)?;
    write_surfaces(&lab, outdir)?;
    Ok(report)
}

// Evenly spread interior nodes, `n` per axis, away from the stencil edges.
fn contact_points(mesh: Mesh, n: usize) -> Vec<(usize, usize)> {
    let pick = |len: usize, k: usize| (len - 1) * (k + 1) / (n + 1);
    (0..n).flat_map(|a| (0..n).map(move |b| (pick(mesh.nx, a), pick(mesh.ny, b)))).collect()
}

/// As `calapso`, plus per-entry difference tables and jet contact between
/// each member and the displaced base surface.
pub fn cmd_deform(cfg: &LabConfig, outdir: &Path) -> Result<Report, LabError> {
    let mut report = Report::new("deform", serde_json::to_value(cfg).expect("config is serialisable"));
    let lab = run_lab(cfg, &mut report)?;
    write_surfaces(&lab, outdir)?;
    let base_surface = surface(&lab.base);
    let points = contact_points(lab.field.mesh, cfg.contact.points_per_axis);
    let mut contact = Vec::new();
    for m in &lab.members {
        let lambda = m.transform.lambda;
        let tag = lambda_tag(lambda);
        write_file(outdir, &format!("mc_diff_{tag}.csv"), &mc_diff_csv(&m.deformation))?;
        if lambda == 0.0 {
            let d0 = m.transform.identity_defect();
            report.check(Check::new("lambda 0: displacement is the identity", d0 <= 1e-10, format!("{d0:.3e}")));
        } else {
            let w = ["w01", "w02"].map(|e| m.deformation.entry(e).map_or(0.0, |d| d.sup));
            report.check(Check::new(
                format!("lambda {tag}: unmatched entries differ"),
                w[0].max(w[1]) >= lambda.abs() / 4.0,
                format!("w01 {:.3e}, w02 {:.3e}, margin {:.3e}", w[0], w[1], lambda.abs() / 4.0),
            ));
        }
        let mut by_order = Vec::new();
        for &order in &cfg.contact.orders {
            let mut worst: f64 = 0.0;
            let mut skipped = 0usize;
            for &p in &points {
                let d = m.transform.displacement.get(p.0, p.1);
                match check_contact(&base_surface, &m.surface, d, p, order, cfg.contact.accuracy) {
                    Ok(r) => worst = worst.max(r),
                    Err(CalapsoError::ChartSingular { .. }) => skipped += 1,
                    Err(e) => return Err(e.into()),
                }
            }
            by_order.push(json!({ "order": order, "residual": worst, "skipped": skipped }));
        }
        contact.push(json!({ "lambda": lambda, "orders": by_order }));
    }
    report.results["contact"] = json!({ "points": points, "accuracy": cfg.contact.accuracy, "members": contact });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> LabConfig {
        let mut cfg = LabConfig::default();
        cfg.grid.nx = 33;
        cfg.grid.ny = 33;
        cfg.lambdas = vec![0.0, 0.5];
        cfg
    }

    #[test]
    fn calapso_writes_meshes_and_fields() {
        let dir = tempfile::tempdir().unwrap();
        let r = cmd_calapso(&small(), dir.path()).unwrap();
        assert!(r.pass, "{}", r.summary());
        for f in ["fields.csv", "surface_lambda_0.obj", "surface_lambda_0.5.obj", "surface_lambda_0.5.csv"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let obj = std::fs::read_to_string(dir.path().join("surface_lambda_0.obj")).unwrap();
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 33 * 33);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 32 * 32);
        assert_eq!(r.results["flatness"]["printed"]["flat"], json!(false));
    }

    #[test]
    fn deform_writes_tables_and_contact() {
        let dir = tempfile::tempdir().unwrap();
        let r = cmd_deform(&small(), dir.path()).unwrap();
        assert!(r.pass, "{}", r.summary());
        let t = std::fs::read_to_string(dir.path().join("mc_diff_0.5.csv")).unwrap();
        assert_eq!(t.lines().count(), 16);
        assert_eq!(r.results["contact"]["members"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn contact_points_are_interior() {
        let pts = contact_points(Mesh::unit(17), 4);
        assert_eq!(pts.len(), 16);
        assert!(pts.iter().all(|&(i, j)| i > 0 && j > 0 && i < 16 && j < 16));
    }
}
