//! `omc layout`: parametric device layouts.

use std::path::Path;

use anyhow::{anyhow, Context, Result};
use omc_geometry::{
    grating_polygons, layout_to_svg, vertebrae_layout, CellParams, GratingParams, Layout,
    ResonatorParams,
};

use super::{finish_validation, require_file};
use crate::config::{Config, Validation};

pub fn run(params_path: &Path, out: &Path) -> Result<()> {
    require_file(params_path)?;
    let config = Config::load(params_path)?;
    let device = config.get("device").unwrap_or("resonator");
    let layout = match device {
        "resonator" => resonator_layout(&config)?,
        "grating" => grating_layout(&config)?,
        other => {
            return Err(anyhow!(super::ConfigError(format!(
                "device = {other}: expected `resonator` or `grating`"
            ))))
        }
    };
    write_layout(&layout, out)
}

fn resonator_layout(config: &Config) -> Result<Layout> {
    let mut v = Validation::default();
    let pos = Validation::positive;
    let cell = |v: &mut Validation, tag: &str| CellParams {
        q: v.f64_checked(config, &format!("q_{tag}_nm"), None, pos),
        v: v.f64_checked(config, &format!("v_{tag}_nm"), None, pos),
        p: v.f64_checked(config, &format!("p_{tag}_nm"), None, pos),
        u: v.f64_checked(config, &format!("u_{tag}_nm"), None, pos),
    };
    let mut params = ResonatorParams {
        a: v.f64_checked(config, "a_nm", None, pos),
        r: v.f64_checked(config, "r_nm", None, pos),
        w: v.f64_checked(config, "w_nm", None, pos),
        mirror: cell(&mut v, "mirror"),
        defect: cell(&mut v, "defect"),
        d: v.f64_checked(config, "d_nm", None, pos),
        s: v.f64_checked(config, "s_nm", None, pos),
        t: v.f64_checked(config, "t_nm", Some(250.0), pos),
        chamfer: v.f64_checked(config, "c_nm", Some(20.0), Validation::non_negative),
        n_defect: v.usize_checked(config, "n_defect", None),
        n_gradient: v.usize_checked(config, "n_gradient", None),
        n_mirror: v.usize_checked(config, "n_mirror", None),
        n_taper: v.usize_checked(config, "n_taper", None),
        snowflake_rows: v.usize_checked(config, "snowflake_rows", Some(5)),
    };
    let scale = v.f64_checked(config, "scale", Some(1.0), pos);
    if scale != 1.0 {
        params = params.scaled(scale);
    }
    if let Err(e) = params.validate() {
        v.error(e.to_string());
    }
    finish_validation(v)?;
    vertebrae_layout(&params).context("layout generation failed")
}

fn grating_layout(config: &Config) -> Result<Layout> {
    let mut v = Validation::default();
    let pos = Validation::positive;
    let params = GratingParams {
        pitch: v.f64_checked(config, "pitch_nm", None, pos),
        fill: v.f64_checked(config, "fill", None, |x| {
            (!(x > 0.0 && x < 1.0)).then(|| format!("must be in (0,1), got {x}"))
        }),
        b: v.f64_checked(config, "b", None, |x| {
            (!(x.abs() < 1.0)).then(|| format!("|b| must be < 1, got {x}"))
        }),
        n_grates: v.usize_checked(config, "n_grates", None),
        w: v.f64_checked(config, "w_nm", Some(1000.0), pos),
        h: v.f64_checked(config, "h_nm", Some(150.0), pos),
        t: v.f64_checked(config, "t_nm", Some(250.0), pos),
        fan_half_angle_deg: v.f64_checked(config, "fan_half_angle_deg", Some(75.0), pos),
    };
    if let Err(e) = params.validate() {
        v.error(e.to_string());
    }
    finish_validation(v)?;
    let mut layout = Layout::new();
    layout.extend(grating_polygons(&params)?);
    Ok(layout)
}

fn write_layout(layout: &Layout, out: &Path) -> Result<()> {
    match out.extension().and_then(|e| e.to_str()) {
        Some("json") => layout
            .write_json(out)
            .with_context(|| format!("writing {}", out.display())),
        Some("svg") => std::fs::write(out, layout_to_svg(layout))
            .with_context(|| format!("writing {}", out.display())),
        other => Err(anyhow!(super::ConfigError(format!(
            "output extension {:?} not supported (use .json or .svg)",
            other
        )))),
    }
}
