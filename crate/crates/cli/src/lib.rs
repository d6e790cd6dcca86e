//! Library side of the `netstab` command-line tool: scenario format,
//! report document, analysis pipeline, bundled demos, and text rendering.

pub mod demo;
pub mod output;
pub mod pipeline;
pub mod report;
pub mod scenario;

pub use pipeline::{run_analyze, AnalysisOutcome, ExitClass, Overrides};
pub use report::ReportDocument;
pub use scenario::ScenarioFile;
