use super::*;

const MINIMAL: &str = "\
[problem]
kind = \"gradient\"
dim = 2
schedule = \"const 1\"

[phi]
type = \"quadratic\"
rows = 2
q = [1, 0, 0, 1]

[psi]
type = \"zero\"

[run]
h = 0.1
t_end = 1
x0 = [1, 0]
";

fn err_lines(text: &str) -> Vec<Diagnostic> {
    parse_scenario(text).unwrap_err().0
}

#[test]
fn minimal_file_parses_with_defaults() {
    let sc = parse_scenario(MINIMAL).unwrap();
    assert_eq!(sc.dim, 2);
    assert_eq!(sc.scheme, Scheme::BackwardEuler);
    assert_eq!(sc.oracle, OracleSpec::None);
    assert_eq!(sc.csv, "trajectory.csv");
    assert!(sc.tags.is_empty());
    assert!(matches!(
        &sc.dynamics,
        Dynamics::Gradient { phi: FunctionSpec::Quadratic { c, r, .. }, parameterization: Parameterization::Beta }
            if c == &vec![0.0, 0.0] && *r == 0.0
    ));
}

#[test]
fn negative_step_names_key_and_line() {
    let d = err_lines(&MINIMAL.replace("h = 0.1", "h = -0.1"));
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].line, 15);
    assert!(d[0].message.contains("run.h"), "{}", d[0]);
}

#[test]
fn unknown_key_and_section_are_reported() {
    let d = err_lines(&MINIMAL.replace("t_end = 1", "t_end = 1\nspeed = 3"));
    assert_eq!(d[0].line, 17);
    assert!(d[0].message.contains("unknown key 'speed'"));
    let d = err_lines(&format!("{MINIMAL}\n[extra]\na = 1\n"));
    assert!(d[0].message.contains("unknown section [extra]"));
}

#[test]
fn non_psd_matrix_is_rejected_at_its_line() {
    let d = err_lines(&MINIMAL.replace("q = [1, 0, 0, 1]", "q = [1, 0, 0, -1]"));
    assert_eq!(d[0].line, 9);
    assert!(d[0].message.contains("positive semidefinite"), "{}", d[0]);
}

#[test]
fn bad_dimension_is_rejected() {
    let d = err_lines(&MINIMAL.replace("x0 = [1, 0]", "x0 = [1, 0, 2]"));
    assert_eq!(d[0].line, 17);
    assert!(d[0].message.contains("x0"));
}

#[test]
fn syntax_errors_are_collected() {
    let text = "[problem]\nkind \"gradient\"\ndim = [1, 2\n[bad\n";
    let d = err_lines(text);
    assert_eq!(d.iter().map(|d| d.line).collect::<Vec<_>>(), vec![2, 3, 4]);
}

#[test]
fn comments_and_multiline_arrays() {
    let text = MINIMAL.replace("q = [1, 0, 0, 1]", "q = [1, 0,   # first row\n     0, 1]");
    let sc = parse_scenario(&text).unwrap();
    let canon = serialize_scenario(&sc);
    assert!(canon.contains("q = [1, 0,\n     0, 1]\n"));
    assert_eq!(parse_scenario(&canon).unwrap(), sc);
}

#[test]
fn canonical_form_is_a_fixed_point() {
    let sc = parse_scenario(MINIMAL).unwrap();
    let canon = serialize_scenario(&sc);
    let again = parse_scenario(&canon).unwrap();
    assert_eq!(again, sc);
    assert_eq!(serialize_scenario(&again), canon);
}

#[test]
fn monotone_scenario_round_trips() {
    let text = "\
[problem]
kind = \"monotone\"
dim = 2
schedule = \"power 1 2\"

[operator]
type = \"affine\"
rows = 2
m = [1, 1, -1, 1]
q = [0.5, 0]

[psi]
type = \"sqdist_affine\"
rows = 1
a = [1, 1]
b = [1]

[run]
h = 0.05
t_end = 2
scheme = \"midpoint\"
x0 = [0, 0]

[probes]
origin = [0, 0]

[oracle]
method = \"solve\"

[output]
tags = \"strong-convergence ergodic-convergence\"
";
    let sc = parse_scenario(text).unwrap();
    assert_eq!(sc.tags, vec![Tag::StrongConvergence, Tag::ErgodicConvergence]);
    assert_eq!(sc.probes, vec![("origin".to_string(), vec![0.0, 0.0])]);
    let canon = serialize_scenario(&sc);
    assert_eq!(serialize_scenario(&parse_scenario(&canon).unwrap()), canon);
}

#[test]
fn eps_schedule_must_match_parameterization() {
    let d = err_lines(&MINIMAL.replace("schedule = \"const 1\"", "schedule = \"const 1\"\nparameterization = \"eps\""));
    assert!(d[0].message.contains("direction"), "{}", d[0]);
    let ok = MINIMAL.replace("schedule = \"const 1\"", "schedule = \"eps power 1 -0.5\"\nparameterization = \"eps\"");
    parse_scenario(&ok).unwrap();
}

#[test]
fn unknown_tag_is_rejected() {
    let d = err_lines(&format!("{MINIMAL}\n[output]\ntags = \"fast\"\n"));
    assert!(d[0].message.contains("unknown property tag"));
}

#[test]
fn output_names_must_be_plain() {
    let d = err_lines(&format!("{MINIMAL}\n[output]\ncsv = \"../x.csv\"\n"));
    assert!(d[0].message.contains("plain file name"));
}
