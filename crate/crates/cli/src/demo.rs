//! Bundled demonstration scenarios with their reference spectra.
//!
//! The four cases cover a 3-patch mixed predator-prey network (two
//! dispersal-rate sets showing stabilization and destabilization) and a
//! 5-patch network of one oscillatory and four unstable patches. Reference
//! eigenvalues are the values reported for these systems in the source
//! material the scenarios reproduce.

use crate::scenario::ScenarioFile;
use anyhow::bail;

pub struct DemoCase {
    pub name: &'static str,
    pub set: u8,
    pub scenario_json: &'static str,
    /// Reference spectrum, sorted ascending by (re, im).
    pub reference: &'static [(f64, f64)],
    /// Caveat printed under the comparison table, when one applies.
    pub note: Option<&'static str>,
}

const EXAMPLE1_NOTE: &str = "note: the reference list for this 3-patch case is reproducible only by \
inserting a spurious +w23 coupling entry at row 3, column 4 of the system matrix; the computed \
spectrum is the correct one for the system as specified (see README, \"Reference data caveat\").";

pub const DEMO_CASES: [DemoCase; 4] = [
    DemoCase {
        name: "example1",
        set: 1,
        scenario_json: include_str!("../scenarios/example1_set1.json"),
        reference: &[
            (-2.48560848, 0.0),
            (-2.13309217, 0.0),
            (-0.94067664, 0.0),
            (-0.1863, -0.1598),
            (-0.1863, 0.1598),
            (-0.02362, 0.0),
        ],
        note: Some(EXAMPLE1_NOTE),
    },
    DemoCase {
        name: "example1",
        set: 2,
        scenario_json: include_str!("../scenarios/example1_set2.json"),
        reference: &[
            (-2.0956, 0.0),
            (-1.1125, 0.0),
            (-0.8845, 0.0),
            (-0.1364, 0.0),
            (0.0367, -0.1021),
            (0.0367, 0.1021),
        ],
        note: Some(EXAMPLE1_NOTE),
    },
    DemoCase {
        name: "example2",
        set: 1,
        scenario_json: include_str!("../scenarios/example2_set1.json"),
        reference: &[
            (-7.74564305, -0.65231653),
            (-7.74564305, 0.65231653),
            (-5.02531764, -0.51750868),
            (-5.02531764, 0.51750868),
            (-4.98928571, -0.18134278),
            (-4.98928571, 0.18134278),
            (-2.16972237, -0.26192349),
            (-2.16972237, 0.26192349),
            (-0.02717408, -0.39736402),
            (-0.02717408, 0.39736402),
        ],
        note: None,
    },
    DemoCase {
        name: "example2",
        set: 2,
        scenario_json: include_str!("../scenarios/example2_set2.json"),
        reference: &[
            (-3.0076306, -0.18134278),
            (-3.0076306, 0.18134278),
            (-1.00434929, -0.18134278),
            (-1.00434929, 0.18134278),
            (-0.03000593, -1.28425135),
            (-0.03000593, 1.28425135),
            (-0.0192113, -0.18145965),
            (-0.0192113, 0.18145965),
            (0.00405427, -0.18149818),
            (0.00405427, 0.18149818),
        ],
        note: None,
    },
];

pub fn demo_case(name: &str, set: u8) -> anyhow::Result<&'static DemoCase> {
    for case in &DEMO_CASES {
        if case.name == name && case.set == set {
            return Ok(case);
        }
    }
    bail!("unknown demo `{name}` set {set}; available: example1|example2 with --set 1|2")
}

pub fn demo_scenario(case: &DemoCase) -> anyhow::Result<ScenarioFile> {
    ScenarioFile::parse(case.scenario_json)
}
