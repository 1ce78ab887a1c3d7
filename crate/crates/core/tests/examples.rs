#[allow(dead_code)]
mod amplify {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/amplify.rs"));
}

#[test]
fn amplify_runs() {
    amplify::run_example().expect("amplify should run");
}

#[allow(dead_code)]
mod cli_run {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cli_run.rs"));
}

#[test]
fn cli_run_runs() {
    cli_run::run_example().expect("cli_run should run");
}

#[allow(dead_code)]
mod double_filter {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/double_filter.rs"));
}

#[test]
fn double_filter_runs() {
    double_filter::run_example().expect("double_filter should run");
}

#[allow(dead_code)]
mod filtered_visibility {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/filtered_visibility.rs"));
}

#[test]
fn filtered_visibility_runs() {
    filtered_visibility::run_example().expect("filtered_visibility should run");
}

#[allow(dead_code)]
mod injection_distillation {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/injection_distillation.rs"));
}

#[test]
fn injection_distillation_runs() {
    injection_distillation::run_example().expect("injection_distillation should run");
}

#[allow(dead_code)]
mod micro_macro_chsh {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/micro_macro_chsh.rs"));
}

#[test]
fn micro_macro_chsh_runs() {
    micro_macro_chsh::run_example().expect("micro_macro_chsh should run");
}

#[allow(dead_code)]
mod oracle_check {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/oracle_check.rs"));
}

#[test]
fn oracle_check_runs() {
    oracle_check::run_example().expect("oracle_check should run");
}

#[allow(dead_code)]
mod preselection_fringes {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/preselection_fringes.rs"));
}

#[test]
fn preselection_fringes_runs() {
    preselection_fringes::run_example().expect("preselection_fringes should run");
}

#[allow(dead_code)]
mod shutter_activation {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/shutter_activation.rs"));
}

#[test]
fn shutter_activation_runs() {
    shutter_activation::run_example().expect("shutter_activation should run");
}

#[allow(dead_code)]
mod split_and_condition {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/split_and_condition.rs"));
}

#[test]
fn split_and_condition_runs() {
    split_and_condition::run_example().expect("split_and_condition should run");
}

#[allow(dead_code)]
mod three_way_preselection {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/three_way_preselection.rs"));
}

#[test]
fn three_way_preselection_runs() {
    three_way_preselection::run_example().expect("three_way_preselection should run");
}
