pub mod bounds;
pub mod finite;
pub mod infinite;
pub mod rbm;
pub mod tagged;

/// Result of a completed run; `pass` selects exit code 0 or 1.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub summary: String,
}
