use kmrate::config::{ModulusSpec, ShapeSpec, SpaceSpec, StageSpec, ThetaSpec};
use kmrate::parse_config;
use kmrate_core::iteration::LambdaSchedule;

const MINIMAL: &str = r#"
name = "minimal"
space = "euclidean:2"
operator = "rotation:1.5707963"
schedule = "constant:0.5"
start = [1.0, 0.0]
epsilons = [0.5]

[set]
kind = "ball"
radius = 1.0
"#;

fn errors_of(text: &str) -> kmrate::ConfigError {
    parse_config(text).expect_err("config should be rejected")
}

#[test]
#[allow(clippy::approx_constant)]
fn minimal_rotation_config() {
    let cfg = parse_config(MINIMAL).unwrap();
    assert_eq!(cfg.space, SpaceSpec::Euclidean(2));
    assert_eq!(cfg.operator, [StageSpec::Rotation(1.5707963)]);
    assert_eq!(cfg.schedule, LambdaSchedule::Constant(0.5));
    assert_eq!(cfg.epsilons, [0.5]);
    assert_eq!(cfg.set.as_ref().unwrap().shape, ShapeSpec::Ball { center: None, radius: 1.0 });
    // Defaults.
    assert_eq!(cfg.stop.max_steps, 250);
    assert_eq!(cfg.stop.target_residual, 0.0);
    assert_eq!(cfg.bounds.modulus, ModulusSpec::Cat0);
    assert_eq!(cfg.bounds.theta, ThetaSpec::ClosedForm);
    assert_eq!(cfg.checks.samples, 10_000);
}

#[test]
fn lambda_out_of_range_names_the_key() {
    let e = errors_of(&MINIMAL.replace("constant:0.5", "constant:1.5"));
    assert_eq!(e.errors.len(), 1, "{e}");
    let err = &e.errors[0];
    assert_eq!(err.key, "schedule");
    assert_eq!(err.line, 5);
    assert!(err.message.contains("1.5"), "{err}");
    assert!(e.to_string().starts_with("line 5, column 12: schedule:"), "{e}");
}

#[test]
fn tree_offset_past_the_edge() {
    let text = r#"
name = "t"
space = "star-tree:5,5,5"
operator = "swap:0,1"
schedule = "constant:0.5"
start = [1, 6.5]
"#;
    let e = errors_of(text);
    assert!(e.mentions("start"), "{e}");
    assert_eq!(e.errors[0].line, 6);
    assert!(e.errors[0].message.contains("exceeds"), "{e}");
}

#[test]
fn unknown_kinds() {
    assert!(errors_of(&MINIMAL.replace("euclidean:2", "sphere:2")).mentions("space"));
    assert!(errors_of(&MINIMAL.replace("rotation:1.5707963", "reflect:1")).mentions("operator"));
    assert!(errors_of(&MINIMAL.replace("constant:0.5", "harmonic")).mentions("schedule"));
    assert!(errors_of(&MINIMAL.replace("\"ball\"", "\"simplex\"")).mentions("set.kind"));
    // A stage that exists, in the wrong space.
    assert!(errors_of(&MINIMAL.replace("rotation:1.5707963", "swap:0,1")).mentions("operator"));
}

#[test]
fn unknown_keys_are_rejected_with_a_position() {
    let e = errors_of(&format!("{MINIMAL}colour = \"red\"\n"));
    assert_eq!((e.errors[0].line, e.errors[0].column), (12, 1), "{e}");
    assert!(e.errors[0].message.contains("colour"), "{e}");
}

#[test]
fn syntax_errors_carry_a_line() {
    let e = errors_of("name = \"x\"\nspace = \n");
    assert_eq!(e.errors[0].line, 2, "{e}");
}

#[test]
fn missing_diameter_when_bounds_are_requested() {
    let text = MINIMAL.replace("[set]\nkind = \"ball\"\nradius = 1.0\n", "");
    let e = errors_of(&text);
    assert!(e.mentions("epsilons"), "{e}");
    // Without epsilons nothing needs a diameter.
    parse_config(&text.replace("epsilons = [0.5]\n", "")).unwrap();
    // The approximate-fixed-point radius alone is enough.
    parse_config(&format!("{text}\n[bounds]\nafp_radius_b = 1.0\n")).unwrap();
}

#[test]
fn diameter_needs_a_bounded_set() {
    let text = MINIMAL.replace("kind = \"ball\"\nradius = 1.0", "kind = \"whole\"");
    let e = errors_of(&format!("{text}\n[bounds]\nd_C = 3.0\n"));
    assert!(e.mentions("bounds.d_C"), "{e}");
}

#[test]
fn diameter_bound_below_the_set_diameter() {
    let e = errors_of(&format!("{MINIMAL}\n[bounds]\nd_C = 1.5\n"));
    assert!(e.mentions("bounds.d_C"), "{e}");
    parse_config(&format!("{MINIMAL}\n[bounds]\nd_C = 2.5\n")).unwrap();
}

#[test]
fn every_error_is_reported() {
    let text =
        MINIMAL.replace("constant:0.5", "constant:2").replace("sphere", "x").replace("rotation:1.5707963", "nope");
    let e = errors_of(&text);
    assert!(e.mentions("schedule") && e.mentions("operator"), "{e}");
}

#[test]
fn start_must_lie_in_the_set() {
    let e = errors_of(&MINIMAL.replace("start = [1.0, 0.0]", "start = [1.0, 0.5]"));
    assert!(e.mentions("start"), "{e}");
}

#[test]
fn dimension_mismatch() {
    let e = errors_of(&MINIMAL.replace("start = [1.0, 0.0]", "start = [1.0, 0.0, 0.0]"));
    assert!(e.mentions("start"), "{e}");
}

#[test]
fn approximate_fixed_point_radius() {
    // ρ(start, origin) = 1.
    let e = errors_of(&format!("{MINIMAL}\n[bounds]\nafp_radius_b = 0.5\n"));
    assert!(e.mentions("bounds.afp_radius_b"), "{e}");
    parse_config(&format!("{MINIMAL}\n[bounds]\nafp_radius_b = 1.0\n")).unwrap();
    // A reference that the rotation moves cannot anchor b.
    let moved = MINIMAL.replace("epsilons", "reference = [0.5, 0.0]\nepsilons");
    let e = errors_of(&format!("{moved}\n[bounds]\nafp_radius_b = 3.0\n"));
    assert!(e.mentions("bounds.afp_radius_b"), "{e}");
}

#[test]
fn exponential_bound_needs_weights_inside_its_range() {
    let alt = MINIMAL.replace("constant:0.5", "alternating");
    // λ_0 = 5/6 is outside [1/2, 1/2].
    assert!(errors_of(&format!("{alt}\n[bounds]\nishikawa_k = 2\n")).mentions("bounds.ishikawa_k"));
    parse_config(&format!("{alt}\n[bounds]\nishikawa_k = 6\n")).unwrap();
    assert!(errors_of(&format!("{MINIMAL}\n[bounds]\nishikawa_k = 1\n")).mentions("bounds.ishikawa_k"));
}

#[test]
fn theta_choices() {
    // With λ = ½ the least witness is 4n − 1, so θ(n) = 3n fails at n = 1 … and 4n works.
    assert!(errors_of(&format!("{MINIMAL}\n[bounds]\ntheta = \"linear:3\"\n")).mentions("bounds.theta"));
    let cfg = parse_config(&format!("{MINIMAL}\n[bounds]\ntheta = \"linear:4\"\n")).unwrap();
    assert_eq!(cfg.bounds.theta, ThetaSpec::Linear(4));
    let alt = MINIMAL.replace("constant:0.5", "alternating");
    assert!(errors_of(&format!("{alt}\n[bounds]\ntheta = \"closed-form\"\n")).mentions("bounds.theta"));
    assert_eq!(parse_config(&alt).unwrap().bounds.theta, ThetaSpec::Witness);
}

#[test]
fn projection_needs_a_supported_set() {
    let e = errors_of(
        &MINIMAL
            .replace("operator = \"rotation:1.5707963\"", "operator = \"project\"")
            .replace("[set]\nkind = \"ball\"\nradius = 1.0\n", "")
            .replace("epsilons = [0.5]\n", ""),
    );
    assert!(e.mentions("operator"), "{e}");
    let hyper = r#"
name = "h"
space = "hyperboloid:2"
operator = "project"
schedule = "constant:0.5"
start = [0.0, 0.0]

[set]
kind = "box"
lower = [-1.0, -1.0]
upper = [1.0, 1.0]
"#;
    assert!(errors_of(hyper).mentions("set.kind"));
}

#[test]
fn set_keys_must_match_the_kind() {
    let e = errors_of(&MINIMAL.replace("radius = 1.0", "radius = 1.0\nlimits = [1.0]"));
    assert!(e.mentions("set.limits"), "{e}");
    assert!(errors_of(&MINIMAL.replace("radius = 1.0", "radius = -1.0")).mentions("set.radius"));
}

#[test]
fn custom_constant_modulus() {
    let cfg =
        parse_config(&format!("{MINIMAL}\n[bounds]\nmodulus = \"custom-constant\"\nmodulus_value = 0.01\n")).unwrap();
    assert_eq!(cfg.bounds.modulus, ModulusSpec::Constant(0.01));
    assert!(errors_of(&format!("{MINIMAL}\n[bounds]\nmodulus = \"custom-constant\"\n")).mentions("bounds.modulus"));
    assert!(errors_of(&format!("{MINIMAL}\n[bounds]\nmodulus = \"cat1\"\n")).mentions("bounds.modulus"));
}

#[test]
fn shipped_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(path.file_stem().unwrap().to_str().unwrap(), cfg.name);
        assert_eq!(cfg.stop.target_residual, 0.0);
        assert!(cfg.stop.max_steps >= 200);
        n += 1;
    }
    assert!(n >= 6);
}
