//! Tab-separated text outputs.
//!
//! Every file opens with `#` comment lines naming its content and echoing the
//! resolved run configuration. Reals are printed with 12 significant digits;
//! undefined values are written as explicit tokens, never `NaN`.

use crate::config::RunConfig;
use crate::dynamics::DynamicTexture;
use crate::model::KPoint;
use crate::pulse::{PulseSegment, RabiFit};
use crate::topology::phase_diagram::{CellChern, PhaseDiagramCell};
use crate::topology::spectrum::QuasienergyGrid;
use crate::topology::texture::{swa, Axis, SpinTextureGrid, WindingAngle};
use crate::topology::winding::SingularityRecord;
use crate::vec3::Vec3;
use std::io::{self, Write};

/// Written where an angle is undefined because both components vanish.
pub const SINGULAR_TOKEN: &str = "singular";
/// Written for spin data at nodes where the quasienergy gap closed.
pub const DEGENERATE_TOKEN: &str = "degenerate";
pub const UNRESOLVED_TOKEN: &str = "unresolved";

/// 12 significant digits in scientific notation, with `-0` printed as `0`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "undefined".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    format!("{:.11e}", if x == 0.0 { 0.0 } else { x })
}

pub fn write_header<W: Write>(w: &mut W, title: &str, cfg: &RunConfig) -> io::Result<()> {
    writeln!(w, "# {title}")?;
    for line in cfg.resolved_lines() {
        writeln!(w, "# {line}")?;
    }
    Ok(())
}

pub fn write_spectrum<W: Write>(w: &mut W, cfg: &RunConfig, grid: &QuasienergyGrid) -> io::Result<()> {
    write_header(w, "quasienergy spectrum", cfg)?;
    writeln!(w, "k1\tk2\te_plus\te_minus")?;
    for (idx, &e) in grid.e_plus.iter().enumerate() {
        let k = grid.k(idx);
        writeln!(
            w,
            "{}\t{}\t{}\t{}",
            fmt_num(k.k1),
            fmt_num(k.k2),
            fmt_num(e),
            fmt_num(-e)
        )?;
    }
    Ok(())
}

fn angle_cell(s: Vec3, j: Axis, l: Axis) -> String {
    match swa(s, j, l) {
        Ok(WindingAngle { theta, .. }) => fmt_num(theta),
        Err(_) => SINGULAR_TOKEN.to_string(),
    }
}

fn texture_row(k: KPoint, s: Vec3, degenerate: bool) -> String {
    if degenerate {
        let d = DEGENERATE_TOKEN;
        return format!("{}\t{}\t{d}\t{d}\t{d}\t{d}\t{d}\t{d}", fmt_num(k.k1), fmt_num(k.k2));
    }
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        fmt_num(k.k1),
        fmt_num(k.k2),
        fmt_num(s.x),
        fmt_num(s.y),
        fmt_num(s.z),
        angle_cell(s, Axis::X, Axis::Z),
        angle_cell(s, Axis::Z, Axis::Y),
        angle_cell(s, Axis::Y, Axis::X),
    )
}

const TEXTURE_COLUMNS: &str = "k1\tk2\tsx\tsy\tsz\ttheta_xz\ttheta_zy\ttheta_yx";

/// Texture rows for the nodes selected by `keep`.
pub fn write_texture<W: Write>(
    w: &mut W,
    cfg: &RunConfig,
    title: &str,
    grid: &SpinTextureGrid,
    keep: impl Fn(KPoint) -> bool,
) -> io::Result<()> {
    write_header(w, title, cfg)?;
    writeln!(w, "{TEXTURE_COLUMNS}")?;
    for i1 in 0..grid.n1 {
        for i2 in 0..grid.n2 {
            let k = grid.k(i1, i2);
            if keep(k) {
                let degenerate = grid.degenerate_points.contains(&(i1, i2));
                writeln!(w, "{}", texture_row(k, grid.at(i1, i2), degenerate))?;
            }
        }
    }
    Ok(())
}

/// Averaged texture with the extra `N` and `weight_gap` columns.
pub fn write_dynamic_texture<W: Write>(
    w: &mut W,
    cfg: &RunConfig,
    dynamic: &DynamicTexture,
    keep: impl Fn(KPoint) -> bool,
) -> io::Result<()> {
    let grid = &dynamic.texture;
    write_header(w, "long-time averaged spin texture", cfg)?;
    writeln!(w, "{TEXTURE_COLUMNS}\tN\tweight_gap")?;
    for i1 in 0..grid.n1 {
        for i2 in 0..grid.n2 {
            let k = grid.k(i1, i2);
            if !keep(k) {
                continue;
            }
            let idx = i1 * grid.n2 + i2;
            let degenerate = grid.degenerate_points.contains(&(i1, i2));
            let wg = if degenerate {
                DEGENERATE_TOKEN.to_string()
            } else {
                fmt_num(dynamic.weight_gap[idx])
            };
            writeln!(
                w,
                "{}\t{}\t{}",
                texture_row(k, grid.at(i1, i2), degenerate),
                dynamic.periods,
                wg
            )?;
        }
    }
    Ok(())
}

/// Angle series along a loop: `index, k1, k2, sx, sy, sz, theta, full`.
pub fn write_loop_profile<W: Write>(
    w: &mut W,
    cfg: &RunConfig,
    title: &str,
    samples: &[(KPoint, Vec3, Option<WindingAngle>)],
    winding: Option<i64>,
) -> io::Result<()> {
    write_header(w, title, cfg)?;
    match winding {
        Some(n) => writeln!(w, "# winding = {n}")?,
        None => writeln!(w, "# winding = {UNRESOLVED_TOKEN}")?,
    }
    writeln!(w, "index\tk1\tk2\tsx\tsy\tsz\ttheta\tfull_angle")?;
    for (i, (k, s, a)) in samples.iter().enumerate() {
        let (t, f) = match a {
            Some(a) => (fmt_num(a.theta), fmt_num(a.full)),
            None => (SINGULAR_TOKEN.to_string(), SINGULAR_TOKEN.to_string()),
        };
        writeln!(
            w,
            "{i}\t{}\t{}\t{}\t{}\t{}\t{t}\t{f}",
            fmt_num(k.k1),
            fmt_num(k.k2),
            fmt_num(s.x),
            fmt_num(s.y),
            fmt_num(s.z)
        )?;
    }
    Ok(())
}

pub fn write_phase_diagram<W: Write>(w: &mut W, cfg: &RunConfig, cells: &[PhaseDiagramCell]) -> io::Result<()> {
    write_header(w, "phase diagram", cfg)?;
    writeln!(w, "T1\tT2\tchern\tmin_gap_0\tmin_gap_pi\tgrid")?;
    for c in cells {
        let chern = match c.chern {
            CellChern::Chern(v) => v.to_string(),
            CellChern::DegenerateOnGrid => DEGENERATE_TOKEN.to_string(),
            CellChern::Unresolved => UNRESOLVED_TOKEN.to_string(),
        };
        writeln!(
            w,
            "{}\t{}\t{chern}\t{}\t{}\t{}",
            fmt_num(c.t1),
            fmt_num(c.t2),
            fmt_num(c.min_gap_0),
            fmt_num(c.min_gap_pi),
            c.grid_n
        )?;
    }
    Ok(())
}

/// Structured singularity table: one `singularity` line per record.
pub fn write_singularities<W: Write>(w: &mut W, records: &[SingularityRecord]) -> io::Result<()> {
    writeln!(w, "singularities = {}", records.len())?;
    for r in records {
        writeln!(
            w,
            "singularity k1={} k2={} winding={} weight_sign={} axes={} contribution={}",
            fmt_num(r.k0.k1),
            fmt_num(r.k0.k2),
            r.winding,
            r.weight_sign,
            r.axes,
            fmt_num(r.contribution())
        )?;
    }
    Ok(())
}

pub fn write_pulse_sequence<W: Write>(
    w: &mut W,
    cfg: &RunConfig,
    title: &str,
    segments: &[PulseSegment],
) -> io::Result<()> {
    write_header(w, title, cfg)?;
    writeln!(w, "segment\trabi\tphase\tdetuning\tduration")?;
    for (i, s) in segments.iter().enumerate() {
        writeln!(
            w,
            "{i}\t{}\t{}\t{}\t{}",
            fmt_num(s.rabi),
            fmt_num(s.phase),
            fmt_num(s.detuning),
            fmt_num(s.duration)
        )?;
    }
    Ok(())
}

pub fn write_rabi_fit<W: Write>(w: &mut W, cfg: &RunConfig, fit: &RabiFit, data: &[(f64, f64)]) -> io::Result<()> {
    write_header(w, "rabi calibration fit: omega_R = a exp(-b A) + c", cfg)?;
    writeln!(w, "# a = {}", fmt_num(fit.a))?;
    writeln!(w, "# b = {}", fmt_num(fit.b))?;
    writeln!(w, "# c = {}", fmt_num(fit.c))?;
    writeln!(w, "# residual_norm = {}", fmt_num(fit.residual_norm))?;
    writeln!(w, "# iterations = {}", fit.iterations)?;
    writeln!(w, "amplitude\tomega_R\tfit\tresidual")?;
    for &(x, y) in data {
        let f = fit.eval(x);
        writeln!(w, "{}\t{}\t{}\t{}", fmt_num(x), fmt_num(y), fmt_num(f), fmt_num(f - y))?;
    }
    Ok(())
}
