use serde_json::Value;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Key in JSON output.
    pub name: String,
    /// Heading in human output.
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, title: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub seed: Option<u64>,
    pub tool_version: String,
    /// Only set with `--timing`, so default output stays reproducible.
    pub wall_clock_s: Option<f64>,
}

impl Default for Provenance {
    fn default() -> Self {
        Self {
            seed: None,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            wall_clock_s: None,
        }
    }
}

/// Everything a command reports.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    /// The invocation, without the program name.
    pub command: String,
    /// Resolved parameters after merging config file and flags.
    pub parameters: Value,
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

impl RunReport {
    pub fn new(command: impl Into<String>, parameters: Value) -> Self {
        Self {
            command: command.into(),
            parameters,
            tables: Vec::new(),
            notes: Vec::new(),
            provenance: Provenance::default(),
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}
