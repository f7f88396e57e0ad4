//! Per-time CSV rows and the property-suite check table.

use std::io::Write;

pub const HEADER: [&str; 13] = [
    "t",
    "norm_sqrt_a_u_L2",
    "norm_sqrt_a_v_L2",
    "diff_L2_dmu",
    "E1",
    "E2",
    "F",
    "wk0",
    "wk1",
    "wk2",
    "gk0",
    "gk1",
    "gk2",
];

/// One sample time; absent quantities are written as empty fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row {
    pub t: f64,
    pub norm_u: Option<f64>,
    pub norm_v: Option<f64>,
    pub diff: Option<f64>,
    pub e1: Option<f64>,
    pub e2: Option<f64>,
    pub f: Option<f64>,
    pub wk: [Option<f64>; 3],
    pub gk: [Option<f64>; 3],
}

impl Row {
    pub fn at(t: f64) -> Self {
        Row { t, ..Row::default() }
    }

    fn fields(&self) -> [Option<f64>; 13] {
        [
            Some(self.t),
            self.norm_u,
            self.norm_v,
            self.diff,
            self.e1,
            self.e2,
            self.f,
            self.wk[0],
            self.wk[1],
            self.wk[2],
            self.gk[0],
            self.gk[1],
            self.gk[2],
        ]
    }
}

fn number(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

pub fn write_rows<W: Write>(out: W, rows: &[Row]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(row.fields().map(number))?;
    }
    w.flush()?;
    Ok(())
}

/// One elementary check of the property suite.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub check: &'static str,
    pub case: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

pub const CHECK_HEADER: [&str; 5] = ["check", "case", "value", "limit", "passed"];

pub fn write_checks<W: Write>(out: W, checks: &[Check]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CHECK_HEADER)?;
    for c in checks {
        w.write_record([
            c.check.to_string(),
            c.case.clone(),
            format!("{:?}", c.value),
            format!("{:?}", c.limit),
            c.passed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
