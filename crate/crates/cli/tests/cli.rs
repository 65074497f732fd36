//! End-to-end command-line tests against the built binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn omc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_omc"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("omc_cli_{tag}"));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

const SIM_PARAMS: &str = "\
# Table of simulation dimensions
t_nm = 250
a_nm = 550
r_nm = 245
w_nm = 87
q_mirror_nm = 320
v_mirror_nm = 480
p_mirror_nm = 175
u_mirror_nm = 210
q_defect_nm = 310
v_defect_nm = 470
p_defect_nm = 220
u_defect_nm = 210
d_nm = 80
s_nm = 1503
c_nm = 20
n_defect = 1
n_gradient = 3
n_mirror = 6
n_taper = 0
";

fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn help_exits_zero() {
    let out = omc().arg("--help").output().unwrap();
    assert_exit(&out, 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("layout"));
}

#[test]
fn missing_config_exits_two_with_path() {
    let out = omc()
        .args([
            "layout",
            "--params",
            "/nonexistent/params.cfg",
            "--out",
            "/tmp/x.json",
        ])
        .output()
        .unwrap();
    assert_exit(&out, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/params.cfg"));
}

#[test]
fn layout_emits_schema_json_and_svg() {
    let dir = tmp_dir("layout");
    let params = dir.join("params.cfg");
    write(&params, SIM_PARAMS);
    let json_path = dir.join("layout.json");
    let out = omc()
        .args(["layout", "--params"])
        .arg(&params)
        .arg("--out")
        .arg(&json_path)
        .output()
        .unwrap();
    assert_exit(&out, 0);
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(parsed["units"], "nm");
    let polygons = parsed["polygons"].as_array().unwrap();
    assert!(!polygons.is_empty());
    assert!(polygons[0]["layer"].is_string());
    assert!(polygons[0]["vertices"][0][0].is_number());

    let svg_path = dir.join("layout.svg");
    let out = omc()
        .args(["layout", "--params"])
        .arg(&params)
        .arg("--out")
        .arg(&svg_path)
        .output()
        .unwrap();
    assert_exit(&out, 0);
    assert!(std::fs::read_to_string(&svg_path)
        .unwrap()
        .starts_with("<svg"));
}

#[test]
fn invalid_layout_params_reported_together() {
    let dir = tmp_dir("layout_invalid");
    let params = dir.join("params.cfg");
    // negative pitch AND missing q_mirror: both must be reported
    write(
        &params,
        &SIM_PARAMS
            .replace("a_nm = 550", "a_nm = -5")
            .replace("q_mirror_nm = 320\n", ""),
    );
    let out = omc()
        .args(["layout", "--params"])
        .arg(&params)
        .arg("--out")
        .arg(dir.join("x.json"))
        .output()
        .unwrap();
    assert_exit(&out, 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("a_nm"), "{stderr}");
    assert!(stderr.contains("q_mirror_nm"), "{stderr}");
}

const SIM_SCAN_CONFIG: &str = "\
f_m_hz = 4.488e9
q_m = 600
temperature_k = 295.3
g_om_hz = 649e3
tone_freq_hz = 4.463e9
tone_depth = 0.01
transfer = 3e-22
rbw_hz = 300e3
f_start_hz = 4.438e9
f_stop_hz = 4.538e9
points = 501
noise_rel = 0.3
noise_floor_w = 1e-7
";

#[test]
fn simulate_then_fit_round_trip() {
    let dir = tmp_dir("roundtrip");
    let config = dir.join("sim.cfg");
    write(&config, SIM_SCAN_CONFIG);
    let traces = dir.join("traces");
    let out = omc()
        .args(["simulate", "--config"])
        .arg(&config)
        .args(["--scans", "20", "--seed", "7", "--out"])
        .arg(&traces)
        .output()
        .unwrap();
    assert_exit(&out, 0);
    assert_eq!(std::fs::read_dir(&traces).unwrap().count(), 20);

    let result_path = dir.join("result.json");
    let out = omc()
        .args(["fit", "--traces"])
        .arg(&traces)
        .args([
            "--tone-freq",
            "4.463e9",
            "--tone-depth",
            "0.01",
            "--temp",
            "295.3",
            "--out",
        ])
        .arg(&result_path)
        .output()
        .unwrap();
    assert_exit(&out, 0);
    let result: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&result_path).unwrap()).unwrap();
    let g = result["g_om_hz"].as_f64().unwrap();
    assert!(
        (g - 649e3).abs() < 60e3,
        "recovered g_om {g} Hz too far from the simulated truth"
    );
    assert!(result["provenance"]["config_hash"].is_string());
    assert_eq!(result["scans_used"].as_u64().unwrap(), 20);
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let dir = tmp_dir("determinism");
    let config = dir.join("sim.cfg");
    write(&config, SIM_SCAN_CONFIG);
    let run = |out_dir: &Path| {
        let out = omc()
            .args(["simulate", "--config"])
            .arg(&config)
            .args(["--scans", "3", "--seed", "42", "--out"])
            .arg(out_dir)
            .output()
            .unwrap();
        assert_exit(&out, 0);
        (0..3)
            .map(|i| std::fs::read(out_dir.join(format!("scan_{i:04}.csv"))).unwrap())
            .collect::<Vec<_>>()
    };
    let a = run(&dir.join("a"));
    let b = run(&dir.join("b"));
    assert_eq!(a, b, "same seed must give byte-identical traces");
}

#[test]
fn negative_rbw_rejected_naming_the_field() {
    let dir = tmp_dir("bad_rbw");
    let config = dir.join("sim.cfg");
    write(
        &config,
        &SIM_SCAN_CONFIG.replace("rbw_hz = 300e3", "rbw_hz = -1"),
    );
    let out = omc()
        .args(["simulate", "--config"])
        .arg(&config)
        .args(["--scans", "1", "--out"])
        .arg(dir.join("traces"))
        .output()
        .unwrap();
    assert_exit(&out, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("rbw_hz"));
}

#[test]
fn strong_modulation_warns_but_runs() {
    let dir = tmp_dir("warn_depth");
    let config = dir.join("sim.cfg");
    write(
        &config,
        &SIM_SCAN_CONFIG.replace("tone_depth = 0.01", "tone_depth = 0.5"),
    );
    let out = omc()
        .args(["simulate", "--config"])
        .arg(&config)
        .args(["--scans", "1", "--seed", "1", "--out"])
        .arg(dir.join("traces"))
        .output()
        .unwrap();
    assert_exit(&out, 0);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("warning"), "{stderr}");
    assert!(stderr.contains("weak-modulation"), "{stderr}");
}

#[test]
fn pec_forward_and_correct_flow() {
    let dir = tmp_dir("pec_flow");
    let params = dir.join("params.cfg");
    write(&params, SIM_PARAMS);
    let layout_path = dir.join("layout.json");
    assert_exit(
        &omc()
            .args(["layout", "--params"])
            .arg(&params)
            .arg("--out")
            .arg(&layout_path)
            .output()
            .unwrap(),
        0,
    );
    // trim to a single snowflake for a quick raster
    let mut layout: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&layout_path).unwrap()).unwrap();
    let polys = layout["polygons"].as_array().unwrap();
    let snowflake = polys
        .iter()
        .find(|p| p["layer"] == "snowflake")
        .unwrap()
        .clone();
    layout["polygons"] = serde_json::Value::Array(vec![snowflake]);
    let small_path = dir.join("small.json");
    write(&small_path, &layout.to_string());

    let psf_path = dir.join("psf.json");
    write(
        &psf_path,
        r#"{"terms":[{"weight":0.7,"sigma_nm":4.0,"gamma_nm":0.0,"nu":0.0},
                     {"weight":0.3,"sigma_nm":60.0,"gamma_nm":0.0,"nu":0.0}],
            "cutoff_nm":0.0}"#,
    );
    let dose_path = dir.join("dose.bin");
    let out = omc()
        .args(["pec", "forward", "--layout"])
        .arg(&small_path)
        .arg("--psf")
        .arg(&psf_path)
        .args(["--pixel", "4", "--margin", "200", "--out"])
        .arg(&dose_path)
        .output()
        .unwrap();
    assert_exit(&out, 0);
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert!(report["conservation_error"].as_f64().unwrap() < 1e-3);

    // rasterize the design target, then solve the inverse problem
    let target_path = dir.join("target.bin");
    let out = omc()
        .args(["pec", "raster", "--layout"])
        .arg(&small_path)
        .args(["--pixel", "4", "--margin", "200", "--binary", "--out"])
        .arg(&target_path)
        .output()
        .unwrap();
    assert_exit(&out, 0);
    let corrected_path = dir.join("corrected.bin");
    let out = omc()
        .args(["pec", "correct", "--target"])
        .arg(&target_path)
        .arg("--psf")
        .arg(&psf_path)
        .args(["--tol", "2e-3", "--out"])
        .arg(&corrected_path)
        .output()
        .unwrap();
    assert_exit(&out, 0);
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert!(report["converged"].as_bool().unwrap());
    assert!(corrected_path.is_file());
}

#[test]
fn gom_on_fixture_mesh() {
    use num_complex::Complex64;
    use omc_coupling::{Cell, Facet, FieldMesh, MaterialProps};

    let dir = tmp_dir("gom");
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::default();
    // unit cube, uniform normal displacement, tangential E (slab oracle)
    let nodes = vec![
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [1.0, 0.0, 1.0],
        [1.0, 1.0, 1.0],
        [0.0, 1.0, 1.0],
    ];
    let tets = [
        [0, 1, 2, 6],
        [0, 2, 3, 6],
        [0, 3, 7, 6],
        [0, 7, 4, 6],
        [0, 4, 5, 6],
        [0, 5, 1, 6],
    ];
    let mesh = FieldMesh {
        displacement: vec![[zero, zero, one]; 8],
        e_field: vec![[one, zero, zero]; 8],
        d_field: vec![[zero, zero, zero]; 8],
        strain: vec![[zero; 6]; 6],
        nodes,
        cells: tets
            .iter()
            .map(|&nodes| Cell { nodes, material: 1 })
            .collect(),
        facets: vec![
            Facet {
                nodes: [4, 5, 6],
                normal: [0.0, 0.0, 1.0],
            },
            Facet {
                nodes: [4, 6, 7],
                normal: [0.0, 0.0, 1.0],
            },
        ],
        omega_o: 2.0 * std::f64::consts::PI * 194.5e12,
        omega_m: 2.0 * std::f64::consts::PI * 4.488e9,
    };
    let mesh_path = dir.join("fields.omcf");
    mesh.write_omcf(&mesh_path).unwrap();
    let material_path = dir.join("gaas.json");
    write(&material_path, &MaterialProps::gaas().to_json().unwrap());

    let result_path = dir.join("result.json");
    let out = omc()
        .args(["gom", "--mesh"])
        .arg(&mesh_path)
        .arg("--material")
        .arg(&material_path)
        .arg("--out")
        .arg(&result_path)
        .output()
        .unwrap();
    assert_exit(&out, 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&result_path).unwrap()).unwrap();
    assert!(report["g_om_hz"].as_f64().unwrap() > 0.0);
    assert_eq!(report["mesh"]["solid_cells"].as_u64().unwrap(), 6);
}

#[test]
fn lock_sim_writes_trajectory() {
    let dir = tmp_dir("locksim");
    let config = dir.join("lock.cfg");
    write(
        &config,
        "\
f_o_hz = 194.5e12
q_loaded = 4300
q_intrinsic = 8600
harmonic = 2
side = red
",
    );
    let traj_path = dir.join("traj.csv");
    let out = omc()
        .args(["lock-sim", "--config"])
        .arg(&config)
        .args(["--duration", "6", "--seed", "3", "--out"])
        .arg(&traj_path)
        .output()
        .unwrap();
    assert_exit(&out, 0);
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert!(report["converged"].as_bool().unwrap());
    let traj = std::fs::read_to_string(&traj_path).unwrap();
    assert!(traj.starts_with("t_s,lambda_m,demod,transmission,locked"));
    assert!(traj.lines().count() > 100);
}
