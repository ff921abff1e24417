//! q (and ψ for filaments) along a stored trajectory.

use std::path::Path;

use dispersive::flows::Trajectory;
use dispersive::frame::{classical_hasimoto, frenet_frame, hasimoto_q, parallel_frame_projected};
use dispersive::geometry::{pointwise_inner, Tangent};
use dispersive::verify::default_reference;
use serde::Serialize;

use crate::error::CliError;
use crate::files::{create_dir, write_json, Run, Table, TrajectoryMeta};

pub const Q_FILE: &str = "q.csv";
pub const PSI_FILE: &str = "psi.csv";
pub const TRANSFORM_FILE: &str = "transform.json";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformFlags {
    /// Every snapshot equals its left-end value on both margins.
    pub decay_margin_satisfied: bool,
    /// The gauge constant cannot be assumed zero.
    pub gauge_uncertain: bool,
    pub margin_width: f64,
    pub margin_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UndefinedFrame {
    pub t: f64,
    /// Grid indices where the curvature vanishes.
    pub points: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiSummary {
    pub written: bool,
    pub snapshots_written: usize,
    /// Snapshots whose ψ is omitted.
    pub undefined: Vec<UndefinedFrame>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformSummary {
    pub snapshots: usize,
    pub points: usize,
    /// Fixed vector whose projection at the left end anchors every frame.
    pub reference: Vec<f64>,
    pub flags: TransformFlags,
    pub modulus_gap: f64,
    pub orthonormality_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<PsiSummary>,
}

fn reference_components(t: Tangent) -> Vec<f64> {
    match t {
        Tangent::Sphere(v) => vec![v.x, v.y, v.z],
        Tangent::Chart(z) => vec![z.re, z.im],
    }
}

fn write_q(path: &Path, tr: &Trajectory) -> Result<(Vec<f64>, f64, f64), CliError> {
    let reference = default_reference(&tr.states[0]);
    let xs = tr.grid().coordinates();
    let mut table = Table::create(path, &["t", "x", "re", "im"])?;
    let (mut gap, mut ortho) = (0.0f64, 0.0f64);
    for (t, u) in tr.times.iter().zip(&tr.states) {
        let frame = parallel_frame_projected(u, reference)?;
        let q = hasimoto_q(&frame)?;
        let ux = u.velocity()?;
        let g = pointwise_inner(u, &ux, &ux)?;
        gap = q.values().iter().zip(&g).map(|(q, g)| (q.norm_sqr() - g).abs()).fold(gap, f64::max);
        ortho = ortho.max(frame.orthonormality_defect());
        for (x, v) in xs.iter().zip(q.values()) {
            table.row(&[*t, *x, v.re, v.im])?;
        }
    }
    table.finish()?;
    Ok((reference_components(reference), gap, ortho))
}

fn margin_flags(tr: &Trajectory, width: f64) -> TransformFlags {
    let dev = tr.states.iter().map(|u| u.margin_deviation(width)).fold(0.0, f64::max);
    let ok = dev <= 1e-10;
    TransformFlags { decay_margin_satisfied: ok, gauge_uncertain: !ok, margin_width: width, margin_deviation: dev }
}

/// Writes q.csv (and psi.csv for filaments) plus transform.json into `out`.
pub fn transform(meta: &TrajectoryMeta, run: &Run, out: &Path) -> Result<TransformSummary, CliError> {
    create_dir(out)?;
    let tangent;
    let tr = match run {
        Run::Map(tr) => tr,
        Run::Filament(f) => {
            tangent = f.tangent_trajectory()?;
            &tangent
        }
    };
    let (reference, modulus_gap, orthonormality_defect) = write_q(&out.join(Q_FILE), tr)?;
    let flags = margin_flags(tr, meta.margin);

    let psi = match run {
        Run::Map(_) => None,
        Run::Filament(f) => {
            let mut undefined = Vec::new();
            let mut rows: Vec<[f64; 4]> = Vec::new();
            let mut written = 0;
            let xs = f.states[0].grid().coordinates();
            for (t, x) in f.times.iter().zip(&f.states) {
                let missing = frenet_frame(x).map(|d| d.undefined()).unwrap_or_else(|_| (0..x.len()).collect());
                if !missing.is_empty() {
                    undefined.push(UndefinedFrame { t: *t, points: missing });
                    continue;
                }
                let psi = classical_hasimoto(x)?;
                rows.extend(xs.iter().zip(psi.values()).map(|(x, v)| [*t, *x, v.re, v.im]));
                written += 1;
            }
            if written > 0 {
                let mut table = Table::create(&out.join(PSI_FILE), &["t", "x", "re", "im"])?;
                for r in &rows {
                    table.row(r)?;
                }
                table.finish()?;
            } else {
                let _ = std::fs::remove_file(out.join(PSI_FILE));
            }
            Some(PsiSummary { written: written > 0, snapshots_written: written, undefined })
        }
    };

    let summary = TransformSummary {
        snapshots: tr.len(),
        points: tr.grid().len(),
        reference,
        flags,
        modulus_gap,
        orthonormality_defect,
        psi,
    };
    write_json(&out.join(TRANSFORM_FILE), &summary)?;
    Ok(summary)
}
