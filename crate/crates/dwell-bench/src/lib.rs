//! Shared fixtures for the pipeline benchmarks.

use dwell_core::presets::{preset, ExamplePreset};
use dwell_core::{ImpulseSchedule, SystemDefinition};

pub fn scalar_example() -> (ExamplePreset, SystemDefinition) {
    let p = preset("ex1").expect("built-in preset");
    let sys = p.system.build().expect("buildable system");
    (p, sys)
}

pub fn network_example() -> (ExamplePreset, SystemDefinition) {
    let p = preset("ex3").expect("built-in preset");
    let sys = p.system.build().expect("buildable system");
    (p, sys)
}

pub fn dense_schedule() -> ImpulseSchedule {
    ImpulseSchedule::periodic(vec![0.04, 0.08, 0.12, 0.52], 0.52, 0.0).expect("valid schedule")
}
