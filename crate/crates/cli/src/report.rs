use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Records,
}

#[derive(Debug, Clone)]
pub enum Val {
    F(f64),
    U(u64),
    B(bool),
    S(String),
    Fs(Vec<f64>),
}

impl From<f64> for Val {
    fn from(x: f64) -> Self {
        Val::F(x)
    }
}
impl From<usize> for Val {
    fn from(x: usize) -> Self {
        Val::U(x as u64)
    }
}
impl From<u64> for Val {
    fn from(x: u64) -> Self {
        Val::U(x)
    }
}
impl From<bool> for Val {
    fn from(x: bool) -> Self {
        Val::B(x)
    }
}
impl From<&str> for Val {
    fn from(x: &str) -> Self {
        Val::S(x.to_string())
    }
}
impl From<String> for Val {
    fn from(x: String) -> Self {
        Val::S(x)
    }
}
impl From<Vec<f64>> for Val {
    fn from(x: Vec<f64>) -> Self {
        Val::Fs(x)
    }
}

/// Six significant digits, fixed notation for moderate magnitudes.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..6).contains(&e) {
        format!("{:.*}", (5 - e) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

fn raw(x: f64) -> String {
    format!("{x:?}")
}

impl Val {
    fn short(&self) -> String {
        match self {
            Val::F(x) => sig6(*x),
            Val::U(x) => x.to_string(),
            Val::B(x) => x.to_string(),
            Val::S(s) => s.clone(),
            Val::Fs(v) => v.iter().map(|x| sig6(*x)).collect::<Vec<_>>().join(","),
        }
    }

    fn raw(&self) -> Option<String> {
        match self {
            Val::F(x) => Some(raw(*x)),
            Val::Fs(v) if v.is_empty() => None,
            Val::Fs(v) => Some(v.iter().map(|x| raw(*x)).collect::<Vec<_>>().join(",")),
            _ => None,
        }
    }
}

fn quote(s: String) -> String {
    if s.is_empty() || s.chars().any(|c| c.is_whitespace() || c == '=' || c == '"') {
        format!("{s:?}")
    } else {
        s
    }
}

#[derive(Debug, Clone)]
pub struct Record {
    pub kind: String,
    pub fields: Vec<(String, Val)>,
}

impl Record {
    pub fn new(kind: &str) -> Self {
        Record {
            kind: kind.to_string(),
            fields: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, v: impl Into<Val>) -> Self {
        self.fields.push((key.to_string(), v.into()));
        self
    }

    fn same_shape(&self, other: &Record) -> bool {
        self.kind == other.kind
            && self.fields.len() == other.fields.len()
            && self
                .fields
                .iter()
                .zip(&other.fields)
                .all(|(a, b)| a.0 == b.0)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub records: Vec<Record>,
}

impl Report {
    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Records => self.render_records(),
            Format::Text => self.render_text(),
        }
    }

    fn render_records(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.kind);
            for (k, v) in &r.fields {
                write!(out, " {k}={}", quote(v.short())).unwrap();
                if let Some(raw) = v.raw() {
                    write!(out, " {k}_raw={raw}").unwrap();
                }
            }
            out.push('\n');
        }
        out
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < self.records.len() {
            let mut j = i + 1;
            while j < self.records.len() && self.records[j].same_shape(&self.records[i]) {
                j += 1;
            }
            if !out.is_empty() {
                out.push('\n');
            }
            if j - i >= 2 {
                table(&mut out, &self.records[i..j]);
            } else {
                block(&mut out, &self.records[i]);
            }
            i = j;
        }
        out
    }
}

fn block(out: &mut String, r: &Record) {
    writeln!(out, "[{}]", r.kind).unwrap();
    let w = r.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in &r.fields {
        writeln!(out, "  {k:<w$}  {}", v.short()).unwrap();
    }
}

fn table(out: &mut String, rows: &[Record]) {
    writeln!(out, "[{}]", rows[0].kind).unwrap();
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.fields.iter().map(|(_, v)| v.short()).collect())
        .collect();
    let heads: Vec<&str> = rows[0].fields.iter().map(|(k, _)| k.as_str()).collect();
    let widths: Vec<usize> = (0..heads.len())
        .map(|c| {
            cells
                .iter()
                .map(|r| r[c].len())
                .chain([heads[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |items: Vec<&str>| {
        let padded: Vec<String> = items
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect();
        format!("  {}", padded.join("  ").trim_end())
    };
    writeln!(out, "{}", line(heads.clone())).unwrap();
    for r in &cells {
        writeln!(out, "{}", line(r.iter().map(String::as_str).collect())).unwrap();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(3.012458431), "3.01246");
        assert_eq!(sig6(0.00823004), "0.00823004");
        assert_eq!(sig6(5.31625e-6), "5.31625e-6");
        assert_eq!(sig6(-2.0), "-2.00000");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(1234567.0), "1.23457e6");
    }

    #[test]
    fn records_carry_raw_values() {
        let mut rep = Report::default();
        rep.push(
            Record::new("x")
                .with("mi", 1.0 / 3.0)
                .with("name", "a b")
                .with("ok", true),
        );
        assert_eq!(
            rep.render(Format::Records),
            "x mi=0.333333 mi_raw=0.3333333333333333 name=\"a b\" ok=true\n"
        );
    }

    #[test]
    fn repeated_shapes_become_tables() {
        let mut rep = Report::default();
        rep.push(Record::new("row").with("k", 1usize).with("v", 0.5));
        rep.push(Record::new("row").with("k", 22usize).with("v", 0.25));
        assert_eq!(
            rep.render(Format::Text),
            "[row]\n  k   v\n  1   0.500000\n  22  0.250000\n"
        );
    }
}
