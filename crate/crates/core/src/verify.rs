//! Self-consistency checks built from contiguous relations of the scaled
//! functions:
//!
//! ```text
//! (z M̃(a+1,b+1) + a M̃(a,b)) / (z M̃(a+1,b)) = 1
//! (a Ũ(a+1,b) + z Ũ(a,b-1)) / (z Ũ(a,b))    = 1
//! (a/z) M̃(a,b) Ũ(a+1,b+1) + M̃(a+1,b+1) Ũ(a,b) = 1
//! ```
//!
//! Here `Ũ(a,c,z)` is the scaled `U` with second argument `c`; the evaluator
//! addresses `U(a, b+1, z)`, so `Ũ(a,c,z)` is obtained with `b = c - 1`.
//! Ratios and products are formed from the `exp(E) * rest` split of each
//! scaled value, so no intermediate is ever required to be representable.

use std::fmt::Write as _;

use serde::Serialize;

use crate::coefficients::Which;
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::evaluation::scaled_parts;
use crate::scaling::Parameters;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualKind {
    #[serde(rename = "recurrence_M")]
    RecurrenceM,
    #[serde(rename = "recurrence_U")]
    RecurrenceU,
    Wronskian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    pub kind: ResidualKind,
    pub a: f64,
    pub b: f64,
    pub z: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub residual: f64,
}

/// A scaled value held as `exp(e) * r`.
#[derive(Clone, Copy)]
struct Split {
    e: Dd,
    r: f64,
}

impl Split {
    fn m(a: f64, b: f64, z: f64, n: usize) -> Result<Split> {
        let (e, r) = scaled_parts(Which::M, &Parameters::new(a, b, z)?, n)?;
        Ok(Split { e, r })
    }

    /// `Ũ(a, c, z)`.
    fn u(a: f64, c: f64, z: f64, n: usize) -> Result<Split> {
        let (e, r) = scaled_parts(Which::U, &Parameters::for_u(a, c - 1.0, z)?, n)?;
        Ok(Split { e, r })
    }

    fn ratio(self, other: Split) -> f64 {
        (self.e - other.e).exp().to_f64() * (self.r / other.r)
    }

    fn product(self, other: Split) -> f64 {
        (self.e + other.e).exp().to_f64() * (self.r * other.r)
    }
}

/// Nearest `x'` to `x` for which `x' + 1` is exact, so that contiguous
/// members really are one apart. `x - 1` is already exact for `x >= 1`.
pub(crate) fn unit_shift_base(x: f64) -> f64 {
    (x + 1.0) - 1.0
}

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::numerical(format!("{what} residual is not finite")))
    }
}

/// `|LHS - 1|` of the scaled three-term recurrence for `M̃` or `Ũ`.
///
/// For `U` the members `Ũ(a,b)`, `Ũ(a+1,b)` and `Ũ(a,b-1)` are needed, so
/// `b > 1` is required.
///
/// `a` and `b` are first moved to [`unit_shift_base`]; the report carries the
/// values actually used.
pub fn recurrence_residual(which: Which, p: &Parameters, n: usize) -> Result<ResidualReport> {
    let (a, z) = (unit_shift_base(p.a()), p.z());
    let b = match which {
        Which::M => unit_shift_base(p.b()),
        Which::U => p.b(),
    };
    let (kind, residual) = match which {
        Which::M => {
            let den = Split::m(a + 1.0, b, z, n)?;
            let upper = Split::m(a + 1.0, b + 1.0, z, n)?;
            let base = Split::m(a, b, z, n)?;
            let lhs = upper.ratio(den) + (a / z) * base.ratio(den);
            (ResidualKind::RecurrenceM, (lhs - 1.0).abs())
        }
        Which::U => {
            if b <= 1.0 {
                return Err(Error::domain(format!("U recurrence needs b > 1, got {b}")));
            }
            let den = Split::u(a, b, z, n)?;
            let next = Split::u(a + 1.0, b, z, n)?;
            let lower = Split::u(a, b - 1.0, z, n)?;
            let lhs = (a / z) * next.ratio(den) + lower.ratio(den);
            (ResidualKind::RecurrenceU, (lhs - 1.0).abs())
        }
    };
    Ok(ResidualReport {
        kind,
        a,
        b,
        z,
        n,
        residual: finite(residual, "recurrence")?,
    })
}

/// `|LHS - 1|` of the scaled Wronskian relation, at `a` and `b` moved to
/// [`unit_shift_base`].
pub fn wronskian_residual(p: &Parameters, n: usize) -> Result<ResidualReport> {
    let (a, b, z) = (unit_shift_base(p.a()), unit_shift_base(p.b()), p.z());
    let m0 = Split::m(a, b, z, n)?;
    let m1 = Split::m(a + 1.0, b + 1.0, z, n)?;
    let u1 = Split::u(a + 1.0, b + 1.0, z, n)?;
    let u0 = Split::u(a, b, z, n)?;
    let lhs = (a / z) * m0.product(u1) + m1.product(u0);
    Ok(ResidualReport {
        kind: ResidualKind::Wronskian,
        a,
        b,
        z,
        n,
        residual: finite((lhs - 1.0).abs(), "Wronskian")?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableId {
    Table1,
    Table2,
}

impl std::str::FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(TableId::Table1),
            "table2" => Ok(TableId::Table2),
            _ => Err(Error::usage(format!("unknown table '{s}', expected table1 or table2"))),
        }
    }
}

/// Table selector. Unset fields take the defaults of the chosen table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableSpec {
    pub id: TableId,
    pub z: Option<f64>,
    pub a_list: Option<Vec<f64>>,
    pub b_list: Option<Vec<f64>>,
    pub n_list: Option<Vec<usize>>,
}

impl TableSpec {
    pub fn new(id: TableId) -> Self {
        TableSpec {
            id,
            z: None,
            a_list: None,
            b_list: None,
            n_list: None,
        }
    }
}

pub const TABLE1_A: [f64; 10] = [99.0, 199.0, 299.0, 399.0, 499.0, 501.0, 601.0, 701.0, 801.0, 901.0];
pub const TABLE2_AB: [f64; 5] = [101.0, 301.0, 501.0, 701.0, 901.0];

/// One grid of residuals: rows indexed by `a`, columns by `n` (table1) or
/// `b` (table2).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableBlock {
    pub kind: ResidualKind,
    pub z: f64,
    /// Fixed `b` for table1 blocks, fixed `N` for table2 blocks.
    pub fixed: f64,
    pub columns: Vec<String>,
    pub a: Vec<f64>,
    pub residuals: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorTable {
    pub id: TableId,
    pub blocks: Vec<TableBlock>,
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

fn check_list<T>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::usage(format!("{name} list is empty")));
    }
    Ok(())
}

/// Evaluates the residual grid described by `spec`.
pub fn error_table(spec: &TableSpec) -> Result<ErrorTable> {
    let z = spec.z.unwrap_or(500.0);
    let mut blocks = Vec::new();
    match spec.id {
        TableId::Table1 => {
            let a_list = spec.a_list.clone().unwrap_or_else(|| TABLE1_A.to_vec());
            let b_list = spec.b_list.clone().unwrap_or_else(|| vec![500.0]);
            let n_list = spec.n_list.clone().unwrap_or_else(|| (0..=4).collect());
            check_list("a", &a_list)?;
            check_list("b", &b_list)?;
            check_list("N", &n_list)?;
            for &b in &b_list {
                for which in [Which::M, Which::U] {
                    let mut residuals = Vec::with_capacity(a_list.len());
                    for &a in &a_list {
                        let p = Parameters::new(a, b, z)?;
                        let row = n_list
                            .iter()
                            .map(|&n| recurrence_residual(which, &p, n).map(|r| r.residual))
                            .collect::<Result<Vec<_>>>()?;
                        residuals.push(row);
                    }
                    blocks.push(TableBlock {
                        kind: match which {
                            Which::M => ResidualKind::RecurrenceM,
                            Which::U => ResidualKind::RecurrenceU,
                        },
                        z,
                        fixed: b,
                        columns: n_list.iter().map(|n| format!("n{n}")).collect(),
                        a: a_list.clone(),
                        residuals,
                    });
                }
            }
        }
        TableId::Table2 => {
            let a_list = spec.a_list.clone().unwrap_or_else(|| TABLE2_AB.to_vec());
            let b_list = spec.b_list.clone().unwrap_or_else(|| TABLE2_AB.to_vec());
            let n_list = spec.n_list.clone().unwrap_or_else(|| vec![4]);
            check_list("a", &a_list)?;
            check_list("b", &b_list)?;
            check_list("N", &n_list)?;
            for &n in &n_list {
                let mut residuals = Vec::with_capacity(a_list.len());
                for &a in &a_list {
                    let row = b_list
                        .iter()
                        .map(|&b| wronskian_residual(&Parameters::new(a, b, z)?, n).map(|r| r.residual))
                        .collect::<Result<Vec<_>>>()?;
                    residuals.push(row);
                }
                blocks.push(TableBlock {
                    kind: ResidualKind::Wronskian,
                    z,
                    fixed: n as f64,
                    columns: b_list.iter().map(|b| format!("b{}", fmt_num(*b))).collect(),
                    a: a_list.clone(),
                    residuals,
                });
            }
        }
    }
    Ok(ErrorTable { id: spec.id, blocks })
}

impl TableBlock {
    fn title(&self) -> String {
        match self.kind {
            ResidualKind::RecurrenceM => format!("M~ recurrence, b = {}, z = {}", fmt_num(self.fixed), fmt_num(self.z)),
            ResidualKind::RecurrenceU => format!("U~ recurrence, b = {}, z = {}", fmt_num(self.fixed), fmt_num(self.z)),
            ResidualKind::Wronskian => format!("Wronskian, N = {}, z = {}", fmt_num(self.fixed), fmt_num(self.z)),
        }
    }
}

impl ErrorTable {
    /// Blocks separated by an empty line, each with its own header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push('a');
            for c in &block.columns {
                out.push(',');
                out.push_str(c);
            }
            out.push('\n');
            for (a, row) in block.a.iter().zip(&block.residuals) {
                out.push_str(&fmt_num(*a));
                for r in row {
                    let _ = write!(out, ",{r:.1e}");
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "{}", block.title());
            let _ = write!(out, "{:>8}", "a");
            for c in &block.columns {
                let _ = write!(out, "  {c:>9}");
            }
            out.push('\n');
            for (a, row) in block.a.iter().zip(&block.residuals) {
                let _ = write!(out, "{:>8}", fmt_num(*a));
                for r in row {
                    let _ = write!(out, "  {:>9}", format!("{r:.1e}"));
                }
                out.push('\n');
            }
        }
        out
    }
}
