use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
}

/// One checked assertion. `measured` and `threshold` are compared through
/// `relation`; non-finite measurements never pass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    pub name: String,
    pub paper_ref: &'static str,
    pub measured: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub pass: bool,
}

impl Entry {
    fn new(name: impl Into<String>, paper_ref: &'static str, measured: f64, relation: Relation, threshold: f64) -> Self {
        let pass = measured.is_finite()
            && match relation {
                Relation::AtMost => measured <= threshold,
                Relation::AtLeast => measured >= threshold,
                Relation::Equal => measured == threshold,
            };
        Self { name: name.into(), paper_ref, measured, relation, threshold, pass }
    }

    pub fn at_most(name: impl Into<String>, paper_ref: &'static str, measured: f64, threshold: f64) -> Self {
        Self::new(name, paper_ref, measured, Relation::AtMost, threshold)
    }

    pub fn at_least(name: impl Into<String>, paper_ref: &'static str, measured: f64, threshold: f64) -> Self {
        Self::new(name, paper_ref, measured, Relation::AtLeast, threshold)
    }

    pub fn equal(name: impl Into<String>, paper_ref: &'static str, measured: f64, expected: f64) -> Self {
        Self::new(name, paper_ref, measured, Relation::Equal, expected)
    }
}

/// A reported quantity with no pass/fail threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observation {
    pub name: String,
    pub paper_ref: &'static str,
    pub value: f64,
}

impl Observation {
    pub fn new(name: impl Into<String>, paper_ref: &'static str, value: f64) -> Self {
        Self { name: name.into(), paper_ref, value }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskFailure {
    pub task: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub mode_count: usize,
    pub entries: Vec<Entry>,
    pub observations: Vec<Observation>,
    pub task_errors: Vec<TaskFailure>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.task_errors.is_empty() && self.entries.iter().all(|e| e.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }
}
