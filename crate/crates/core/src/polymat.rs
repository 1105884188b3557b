//! Matrices over the group ring and their scalar images.
//!
//! [`PolyphaseMatrix`] holds only zero-or-monomial entries, so every matrix of
//! that type is a candidate phased BIBD by construction. Sums, products and
//! adjoints leave that class and land in [`GroupRingMatrix`]. Evaluating at a
//! character gives a [`ComplexMatrix`]; the filter-bank lift gives 0/1 or
//! integer block-circulant matrices.

use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groupring::{AbelianGroup, Character, GroupError, GroupRingElement, C64};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolymatError {
    #[error("{op}: dimension mismatch {left:?} vs {right:?}")]
    Dimension {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("entry ({row},{col}) is not a valid group element")]
    BadEntry { row: usize, col: usize },
    #[error("line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
}

fn parse_err(line: usize, col: usize, msg: impl Into<String>) -> PolymatError {
    PolymatError::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

fn check_dims(
    op: &'static str,
    left: (usize, usize),
    right: (usize, usize),
    ok: bool,
) -> Result<(), PolymatError> {
    if ok {
        Ok(())
    } else {
        Err(PolymatError::Dimension { op, left, right })
    }
}

/// A `b x v` matrix whose entries are zero or a monomial `z^g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyphaseMatrix {
    rows: usize,
    cols: usize,
    group: AbelianGroup,
    entries: Vec<Option<usize>>,
}

impl PolyphaseMatrix {
    pub fn zeros(rows: usize, cols: usize, group: &AbelianGroup) -> Self {
        Self {
            rows,
            cols,
            group: group.clone(),
            entries: vec![None; rows * cols],
        }
    }

    /// Row-major entries given as group element indices.
    pub fn new(
        rows: usize,
        cols: usize,
        group: &AbelianGroup,
        entries: Vec<Option<usize>>,
    ) -> Result<Self, PolymatError> {
        check_dims(
            "new",
            (rows, cols),
            (entries.len(), 1),
            entries.len() == rows * cols,
        )?;
        for (idx, e) in entries.iter().enumerate() {
            if matches!(e, Some(g) if *g >= group.order()) {
                return Err(PolymatError::BadEntry {
                    row: idx / cols.max(1),
                    col: idx % cols.max(1),
                });
            }
        }
        Ok(Self {
            rows,
            cols,
            group: group.clone(),
            entries,
        })
    }

    pub fn from_rows(
        group: &AbelianGroup,
        rows: Vec<Vec<Option<usize>>>,
    ) -> Result<Self, PolymatError> {
        let b = rows.len();
        let v = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != v) {
            return Err(PolymatError::Dimension {
                op: "from_rows",
                left: (b, v),
                right: (1, bad.len()),
            });
        }
        Self::new(b, v, group, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    /// Group element of the monomial at `(i, j)`, or `None` for a zero entry.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<usize> {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, entry: Option<usize>) -> Result<(), PolymatError> {
        if matches!(entry, Some(g) if g >= self.group.order()) {
            return Err(PolymatError::BadEntry { row: i, col: j });
        }
        self.entries[i * self.cols + j] = entry;
        Ok(())
    }

    pub fn entries(&self) -> &[Option<usize>] {
        &self.entries
    }

    /// Nonzero `(column, group element)` pairs of row `i`.
    pub fn row_support(&self, i: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries[i * self.cols..(i + 1) * self.cols]
            .iter()
            .enumerate()
            .filter_map(|(j, e)| e.map(|g| (j, g)))
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().filter(|e| e.is_some()).count()
    }

    /// The entrywise `|x|^2 = x~ x`, which for a monomial is `delta_0`.
    pub fn modulus_squared(&self) -> IncidenceMatrix {
        IncidenceMatrix::from_supports(
            self.cols,
            (0..self.rows)
                .map(|i| self.row_support(i).map(|(j, _)| j).collect())
                .collect(),
        )
        .expect("supports are in range")
    }

    /// The adjoint of a monomial matrix is again monomial.
    pub fn adjoint(&self) -> PolyphaseMatrix {
        let mut out = PolyphaseMatrix::zeros(self.cols, self.rows, &self.group);
        for i in 0..self.rows {
            for (j, g) in self.row_support(i) {
                out.entries[j * self.rows + i] = Some(self.group.neg(g));
            }
        }
        out
    }

    pub fn to_group_ring(&self) -> GroupRingMatrix {
        let f = self.group.order();
        let mut data = vec![0; self.rows * self.cols * f];
        for (idx, e) in self.entries.iter().enumerate() {
            if let Some(g) = e {
                data[idx * f + g] = 1;
            }
        }
        GroupRingMatrix {
            rows: self.rows,
            cols: self.cols,
            group: self.group.clone(),
            data,
        }
    }

    /// `Phi(gamma)`.
    pub fn evaluate(&self, gamma: &Character) -> Result<ComplexMatrix, PolymatError> {
        if gamma.group() != &self.group {
            return Err(GroupError::GroupMismatch(
                self.group.to_string(),
                gamma.group().to_string(),
            )
            .into());
        }
        let values: Vec<C64> = (0..self.group.order()).map(|g| gamma.value(g)).collect();
        Ok(ComplexMatrix(DMatrix::from_fn(
            self.rows,
            self.cols,
            |i, j| self.get(i, j).map_or(C64::new(0.0, 0.0), |g| values[g]),
        )))
    }

    /// `Phi(T)`: the `bf x vf` 0/1 matrix whose `(i, j)` block is `T^g`
    /// (or zero). Row `(i, a)` has its one in column `(j, a - g)`.
    pub fn filter_bank_lift(&self) -> IncidenceMatrix {
        let f = self.group.order();
        let mut supports = Vec::with_capacity(self.rows * f);
        for i in 0..self.rows {
            for a in 0..f {
                let mut row: Vec<usize> = self
                    .row_support(i)
                    .map(|(j, g)| j * f + self.group.sub(a, g))
                    .collect();
                row.sort_unstable();
                supports.push(row);
            }
        }
        IncidenceMatrix::from_supports(self.cols * f, supports).expect("lift supports are in range")
    }

    /// Bit-exact text form; see [`PolyphaseMatrix::parse_text`].
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "POLYPHASE rows={} cols={} group={}\n",
            self.rows, self.cols, self.group
        );
        for i in 0..self.rows {
            let cells: Vec<String> = (0..self.cols)
                .map(|j| match self.get(i, j) {
                    None => ".".to_string(),
                    Some(g) => {
                        let t: Vec<String> =
                            self.group.decode(g).iter().map(|x| x.to_string()).collect();
                        t.join(",")
                    }
                })
                .collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, PolymatError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, 1, "empty input"))?;
        let mut fields = header.split(' ');
        if fields.next() != Some("POLYPHASE") {
            return Err(parse_err(1, 1, "expected POLYPHASE header"));
        }
        let mut rows = None;
        let mut cols = None;
        let mut group = None;
        let mut col = "POLYPHASE ".len() + 1;
        for field in fields {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| parse_err(1, col, format!("expected key=value, found {field:?}")))?;
            match key {
                "rows" => rows = value.parse::<usize>().ok(),
                "cols" => cols = value.parse::<usize>().ok(),
                "group" => group = AbelianGroup::parse(value).ok(),
                _ => return Err(parse_err(1, col, format!("unknown header key {key:?}"))),
            }
            col += field.len() + 1;
        }
        let (rows, cols, group) = match (rows, cols, group) {
            (Some(r), Some(c), Some(g)) => (r, c, g),
            _ => {
                return Err(parse_err(
                    1,
                    1,
                    "header needs valid rows=, cols= and group=",
                ))
            }
        };
        let mut entries = Vec::with_capacity(rows * cols);
        let mut seen = 0;
        for (lineno, line) in lines {
            let lineno = lineno + 1;
            if seen == rows {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(parse_err(lineno, 1, format!("more than {rows} rows")));
            }
            let mut count = 0;
            let mut col = 1;
            for cell in line.split(' ') {
                if cell.is_empty() {
                    return Err(parse_err(
                        lineno,
                        col,
                        "expected a single space between entries",
                    ));
                }
                let entry = if cell == "." {
                    None
                } else {
                    let tuple = cell
                        .split(',')
                        .map(|t| t.parse::<usize>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| parse_err(lineno, col, format!("bad entry {cell:?}")))?;
                    Some(group.encode(&tuple).map_err(|_| {
                        parse_err(lineno, col, format!("{cell:?} is not in {group}"))
                    })?)
                };
                entries.push(entry);
                count += 1;
                col += cell.len() + 1;
            }
            if count != cols {
                return Err(parse_err(
                    lineno,
                    col,
                    format!("expected {cols} entries, found {count}"),
                ));
            }
            seen += 1;
        }
        if seen != rows {
            return Err(parse_err(
                seen + 2,
                1,
                format!("expected {rows} rows, found {seen}"),
            ));
        }
        Self::new(rows, cols, &group, entries)
    }
}

impl fmt::Display for PolyphaseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Serialize, Deserialize)]
struct PolyphaseWire {
    rows: usize,
    cols: usize,
    group: AbelianGroup,
    /// Row-major; `null` for zero, otherwise the exponent tuple.
    entries: Vec<Vec<Option<Vec<usize>>>>,
}

impl Serialize for PolyphaseMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyphaseWire {
            rows: self.rows,
            cols: self.cols,
            group: self.group.clone(),
            entries: (0..self.rows)
                .map(|i| {
                    (0..self.cols)
                        .map(|j| self.get(i, j).map(|g| self.group.decode(g)))
                        .collect()
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyphaseMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = PolyphaseWire::deserialize(d)?;
        if w.entries.len() != w.rows {
            return Err(D::Error::custom("row count does not match rows"));
        }
        let rows = w
            .entries
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|e| e.map(|t| w.group.encode(&t)).transpose())
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        let m = Self::from_rows(&w.group, rows).map_err(D::Error::custom)?;
        if m.cols != w.cols && m.rows > 0 {
            return Err(D::Error::custom("column count does not match cols"));
        }
        Ok(m)
    }
}

/// Dense matrix over the integer group ring; entry `(i, j)` is stored as
/// `f` consecutive coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRingMatrix {
    rows: usize,
    cols: usize,
    group: AbelianGroup,
    data: Vec<i64>,
}

impl GroupRingMatrix {
    pub fn zeros(rows: usize, cols: usize, group: &AbelianGroup) -> Self {
        Self {
            rows,
            cols,
            group: group.clone(),
            data: vec![0; rows * cols * group.order()],
        }
    }

    pub fn identity(n: usize, group: &AbelianGroup) -> Self {
        Self::scalar_diagonal(n, group, 1)
    }

    /// `c I` with `c` in the integers.
    pub fn scalar_diagonal(n: usize, group: &AbelianGroup, c: i64) -> Self {
        let mut m = Self::zeros(n, n, group);
        let f = group.order();
        for i in 0..n {
            m.data[(i * n + i) * f] = c;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    /// Coefficient slice of entry `(i, j)`.
    #[inline]
    pub fn coeffs(&self, i: usize, j: usize) -> &[i64] {
        let f = self.group.order();
        let at = (i * self.cols + j) * f;
        &self.data[at..at + f]
    }

    #[inline]
    pub fn coeffs_mut(&mut self, i: usize, j: usize) -> &mut [i64] {
        let f = self.group.order();
        let at = (i * self.cols + j) * f;
        &mut self.data[at..at + f]
    }

    pub fn get(&self, i: usize, j: usize) -> GroupRingElement {
        GroupRingElement::from_coeffs(&self.group, self.coeffs(i, j).to_vec())
            .expect("entry length is f")
    }

    pub fn set(&mut self, i: usize, j: usize, x: &GroupRingElement) -> Result<(), PolymatError> {
        if x.group() != &self.group {
            return Err(
                GroupError::GroupMismatch(self.group.to_string(), x.group().to_string()).into(),
            );
        }
        self.coeffs_mut(i, j).copy_from_slice(x.coeffs());
        Ok(())
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> Result<(), PolymatError> {
        if self.group != other.group {
            return Err(
                GroupError::GroupMismatch(self.group.to_string(), other.group.to_string()).into(),
            );
        }
        check_dims(
            op,
            (self.rows, self.cols),
            (other.rows, other.cols),
            self.rows == other.rows && self.cols == other.cols,
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolymatError> {
        self.check_same_shape(other, "add")?;
        Ok(Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolymatError> {
        self.check_same_shape(other, "sub")?;
        Ok(Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
            ..self.clone()
        })
    }

    pub fn scale(&self, c: i64) -> Self {
        Self {
            data: self.data.iter().map(|a| a * c).collect(),
            ..self.clone()
        }
    }

    /// Transpose with the involution applied entrywise.
    pub fn adjoint(&self) -> Self {
        let f = self.group.order();
        let mut out = Self::zeros(self.cols, self.rows, &self.group);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let src = self.coeffs(i, j);
                let dst = out.coeffs_mut(j, i);
                for (g, &c) in src.iter().enumerate() {
                    if c != 0 {
                        dst[self.group.neg(g)] = c;
                    }
                }
            }
        }
        debug_assert_eq!(out.data.len(), self.rows * self.cols * f);
        out
    }

    /// Matrix product over the group ring, parallel over output rows.
    /// Zero entries of the left operand are skipped, so sparse-times-dense
    /// costs only the nonzeros on the left.
    pub fn matmul(&self, other: &Self) -> Result<Self, PolymatError> {
        if self.group != other.group {
            return Err(
                GroupError::GroupMismatch(self.group.to_string(), other.group.to_string()).into(),
            );
        }
        check_dims(
            "matmul",
            (self.rows, self.cols),
            (other.rows, other.cols),
            self.cols == other.rows,
        )?;
        let f = self.group.order();
        let n = other.cols;
        let mut data = vec![0i64; self.rows * n * f];
        if n > 0 && f > 0 {
            data.par_chunks_mut(n * f)
                .enumerate()
                .for_each(|(i, out_row)| {
                    for l in 0..self.cols {
                        for (a, &xa) in self.coeffs(i, l).iter().enumerate() {
                            if xa == 0 {
                                continue;
                            }
                            for j in 0..n {
                                let out = &mut out_row[j * f..(j + 1) * f];
                                for (b, &yb) in other.coeffs(l, j).iter().enumerate() {
                                    if yb != 0 {
                                        out[self.group.add(a, b)] += xa * yb;
                                    }
                                }
                            }
                        }
                    }
                });
        }
        Ok(Self {
            rows: self.rows,
            cols: n,
            group: self.group.clone(),
            data,
        })
    }

    /// Entry `(i, j)` equals the involution of entry `(j, i)`.
    pub fn is_self_adjoint(&self) -> bool {
        self.rows == self.cols && *self == self.adjoint()
    }

    /// Entries that are zero or a single monomial convert back.
    pub fn to_polyphase(&self) -> Option<PolyphaseMatrix> {
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let c = self.coeffs(i, j);
                if c.iter().all(|&x| x == 0) {
                    entries.push(None);
                } else {
                    entries.push(Some(self.get(i, j).as_monomial()?));
                }
            }
        }
        Some(PolyphaseMatrix {
            rows: self.rows,
            cols: self.cols,
            group: self.group.clone(),
            entries,
        })
    }

    pub fn evaluate(&self, gamma: &Character) -> Result<ComplexMatrix, PolymatError> {
        if gamma.group() != &self.group {
            return Err(GroupError::GroupMismatch(
                self.group.to_string(),
                gamma.group().to_string(),
            )
            .into());
        }
        let values: Vec<C64> = (0..self.group.order()).map(|g| gamma.value(g)).collect();
        Ok(ComplexMatrix(DMatrix::from_fn(
            self.rows,
            self.cols,
            |i, j| {
                self.coeffs(i, j)
                    .iter()
                    .zip(&values)
                    .filter(|(&c, _)| c != 0)
                    .map(|(&c, &v)| v * c as f64)
                    .sum()
            },
        )))
    }

    /// Block matrix of translation lifts; block `(i, j)` has `(a, c)` entry
    /// equal to the coefficient of `z^{a-c}`.
    pub fn filter_bank_lift(&self) -> IntMatrix {
        let f = self.group.order();
        let mut out = IntMatrix::zeros(self.rows * f, self.cols * f);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let c = self.coeffs(i, j);
                if c.iter().all(|&x| x == 0) {
                    continue;
                }
                for a in 0..f {
                    for b in 0..f {
                        out.set(i * f + a, j * f + b, c[self.group.sub(a, b)]);
                    }
                }
            }
        }
        out
    }
}

impl From<&PolyphaseMatrix> for GroupRingMatrix {
    fn from(m: &PolyphaseMatrix) -> Self {
        m.to_group_ring()
    }
}

impl fmt::Display for GroupRingMatrix {
    /// One line per row, entries separated by ` | `.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "{}", cells.join(" | "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct GroupRingMatrixWire {
    rows: usize,
    cols: usize,
    group: AbelianGroup,
    /// `entries[i][j]` is the dense coefficient list of entry `(i, j)`.
    entries: Vec<Vec<Vec<i64>>>,
}

impl Serialize for GroupRingMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GroupRingMatrixWire {
            rows: self.rows,
            cols: self.cols,
            group: self.group.clone(),
            entries: (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self.coeffs(i, j).to_vec()).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupRingMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = GroupRingMatrixWire::deserialize(d)?;
        let f = w.group.order();
        let ok = w.entries.len() == w.rows
            && w.entries
                .iter()
                .all(|r| r.len() == w.cols && r.iter().all(|e| e.len() == f));
        if !ok {
            return Err(D::Error::custom(
                "entries do not match rows, cols and group order",
            ));
        }
        Ok(Self {
            rows: w.rows,
            cols: w.cols,
            group: w.group,
            data: w.entries.into_iter().flatten().flatten().collect(),
        })
    }
}

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// All-ones `J`.
    pub fn ones(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![1; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: i64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolymatError> {
        self.zip(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolymatError> {
        self.zip(other, "sub", |a, b| a - b)
    }

    fn zip(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(i64, i64) -> i64,
    ) -> Result<Self, PolymatError> {
        check_dims(
            op,
            (self.rows, self.cols),
            (other.rows, other.cols),
            self.rows == other.rows && self.cols == other.cols,
        )?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: i64) -> Self {
        Self {
            data: self.data.iter().map(|a| a * c).collect(),
            ..self.clone()
        }
    }

    /// Row-parallel product that skips zeros on the left.
    pub fn matmul(&self, other: &Self) -> Result<Self, PolymatError> {
        check_dims(
            "matmul",
            (self.rows, self.cols),
            (other.rows, other.cols),
            self.cols == other.rows,
        )?;
        let n = other.cols;
        let mut data = vec![0i64; self.rows * n];
        if n > 0 {
            data.par_chunks_mut(n).enumerate().for_each(|(i, out)| {
                for (l, &a) in self.row(i).iter().enumerate() {
                    if a != 0 {
                        for (o, &b) in out.iter_mut().zip(other.row(l)) {
                            *o += a * b;
                        }
                    }
                }
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: n,
            data,
        })
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix(DMatrix::from_fn(self.rows, self.cols, |i, j| {
            C64::new(self.get(i, j) as f64, 0.0)
        }))
    }

    /// Converts when every entry is 0 or 1.
    pub fn to_incidence(&self) -> Option<IncidenceMatrix> {
        let mut supports = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut row = Vec::new();
            for (j, &x) in self.row(i).iter().enumerate() {
                match x {
                    0 => {}
                    1 => row.push(j),
                    _ => return None,
                }
            }
            supports.push(row);
        }
        IncidenceMatrix::from_supports(self.cols, supports).ok()
    }
}

/// 0/1 matrix stored by row supports (CSR without values).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IncidenceMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl IncidenceMatrix {
    /// `supports[i]` lists the columns holding a one in row `i`.
    pub fn from_supports(cols: usize, supports: Vec<Vec<usize>>) -> Result<Self, PolymatError> {
        let mut row_ptr = Vec::with_capacity(supports.len() + 1);
        let mut col_idx = Vec::with_capacity(supports.iter().map(Vec::len).sum());
        row_ptr.push(0);
        for (i, mut row) in supports.into_iter().enumerate() {
            row.sort_unstable();
            row.dedup();
            if let Some(&j) = row.last().filter(|&&j| j >= cols) {
                return Err(PolymatError::BadEntry { row: i, col: j });
            }
            col_idx.extend(row);
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            rows: row_ptr.len() - 1,
            cols,
            row_ptr,
            col_idx,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_supports(cols, vec![Vec::new(); rows]).expect("empty rows")
    }

    pub fn identity(n: usize) -> Self {
        Self::from_supports(n, (0..n).map(|i| vec![i]).collect()).expect("diagonal")
    }

    pub fn from_dense(rows: &[Vec<bool>]) -> Result<Self, PolymatError> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(PolymatError::Dimension {
                op: "from_dense",
                left: (rows.len(), cols),
                right: (1, bad.len()),
            });
        }
        Self::from_supports(
            cols,
            rows.iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|(_, &x)| x)
                        .map(|(j, _)| j)
                        .collect()
                })
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Sorted column indices of the ones in row `i`.
    pub fn row(&self, i: usize) -> &[usize] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.row(i).binary_search(&j).is_ok()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        (0..self.rows).map(|i| self.row(i).len()).collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        let mut sums = vec![0; self.cols];
        for &j in &self.col_idx {
            sums[j] += 1;
        }
        sums
    }

    pub fn transpose(&self) -> Self {
        let mut supports = vec![Vec::new(); self.cols];
        for i in 0..self.rows {
            for &j in self.row(i) {
                supports[j].push(i);
            }
        }
        Self::from_supports(self.rows, supports).expect("transpose stays in range")
    }

    /// Stack `self` on top of `other`.
    pub fn vstack(&self, other: &Self) -> Result<Self, PolymatError> {
        check_dims(
            "vstack",
            (self.rows, self.cols),
            (other.rows, other.cols),
            self.cols == other.cols,
        )?;
        let supports = (0..self.rows)
            .map(|i| self.row(i).to_vec())
            .chain((0..other.rows).map(|i| other.row(i).to_vec()))
            .collect();
        Self::from_supports(self.cols, supports)
    }

    /// Rows `start..end`.
    pub fn row_slice(&self, start: usize, end: usize) -> Self {
        Self::from_supports(
            self.cols,
            (start..end).map(|i| self.row(i).to_vec()).collect(),
        )
        .expect("slice stays in range")
    }

    pub fn to_int(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for &j in self.row(i) {
                m.set(i, j, 1);
            }
        }
        m
    }

    /// `self * other` as integers, accumulated through the sparse rows.
    pub fn matmul(&self, other: &Self) -> Result<IntMatrix, PolymatError> {
        check_dims(
            "matmul",
            (self.rows, self.cols),
            (other.rows, other.cols),
            self.cols == other.rows,
        )?;
        let n = other.cols;
        let mut data = vec![0i64; self.rows * n];
        if n > 0 {
            data.par_chunks_mut(n).enumerate().for_each(|(i, out)| {
                for &l in self.row(i) {
                    for &j in other.row(l) {
                        out[j] += 1;
                    }
                }
            });
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: n,
            data,
        })
    }

    /// `self * other` with a dense right operand.
    pub fn matmul_int(&self, other: &IntMatrix) -> Result<IntMatrix, PolymatError> {
        check_dims(
            "matmul",
            (self.rows, self.cols),
            (other.rows, other.cols),
            self.cols == other.rows,
        )?;
        let n = other.cols;
        let mut data = vec![0i64; self.rows * n];
        if n > 0 {
            data.par_chunks_mut(n).enumerate().for_each(|(i, out)| {
                for &l in self.row(i) {
                    for (o, &b) in out.iter_mut().zip(other.row(l)) {
                        *o += b;
                    }
                }
            });
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: n,
            data,
        })
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        self.to_int().to_complex()
    }

    /// Rows of `0`/`1` characters, LF-terminated, no header.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.rows * (self.cols + 1));
        for i in 0..self.rows {
            let mut line = vec![b'0'; self.cols];
            for &j in self.row(i) {
                line[j] = b'1';
            }
            out.push_str(std::str::from_utf8(&line).expect("ascii"));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, PolymatError> {
        let mut cols = None;
        let mut supports = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            if line.is_empty() {
                continue;
            }
            let mut row = Vec::new();
            for (col, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => row.push(col),
                    other => {
                        return Err(parse_err(
                            lineno,
                            col + 1,
                            format!("expected 0 or 1, found {other:?}"),
                        ))
                    }
                }
            }
            let len = line.chars().count();
            match cols {
                None => cols = Some(len),
                Some(c) if c != len => {
                    return Err(parse_err(
                        lineno,
                        len.min(c) + 1,
                        format!("expected {c} columns, found {len}"),
                    ))
                }
                _ => {}
            }
            supports.push(row);
        }
        Self::from_supports(cols.unwrap_or(0), supports)
    }
}

impl fmt::Display for IncidenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Serialize, Deserialize)]
struct IncidenceWire {
    rows: usize,
    cols: usize,
    supports: Vec<Vec<usize>>,
}

impl Serialize for IncidenceMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IncidenceWire {
            rows: self.rows,
            cols: self.cols,
            supports: (0..self.rows).map(|i| self.row(i).to_vec()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IncidenceMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = IncidenceWire::deserialize(d)?;
        if w.supports.len() != w.rows {
            return Err(D::Error::custom("support count does not match rows"));
        }
        Self::from_supports(w.cols, w.supports).map_err(D::Error::custom)
    }
}

/// Complex double matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(pub DMatrix<C64>);

impl ComplexMatrix {
    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, PolymatError> {
        check_dims(
            "matmul",
            (self.rows(), self.cols()),
            (other.rows(), other.cols()),
            self.cols() == other.rows(),
        )?;
        Ok(Self(&self.0 * &other.0))
    }

    /// `Phi* Phi`.
    pub fn gram(&self) -> Self {
        Self(self.0.adjoint() * &self.0)
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.0.shape() != other.0.shape() {
            return f64::INFINITY;
        }
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.0.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Singular values, largest first.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self
            .0
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Rows of comma-separated `re+imi` cells using shortest round-trip
    /// formatting, with `-0` printed as `0`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows() {
            let cells: Vec<String> = (0..self.cols())
                .map(|j| format_complex(self.get(i, j)))
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self, PolymatError> {
        let mut rows: Vec<Vec<C64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            if line.is_empty() {
                continue;
            }
            let mut row = Vec::new();
            let mut col = 1;
            for cell in line.split(',') {
                row.push(parse_complex(cell).ok_or_else(|| {
                    parse_err(lineno, col, format!("bad complex value {cell:?}"))
                })?);
                col += cell.len() + 1;
            }
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(parse_err(
                        lineno,
                        1,
                        format!("expected {} columns, found {}", first.len(), row.len()),
                    ));
                }
            }
            rows.push(row);
        }
        let cols = rows.first().map_or(0, Vec::len);
        Ok(Self(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])))
    }
}

fn clean_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

pub fn format_complex(z: C64) -> String {
    let re = clean_zero(z.re);
    let im = clean_zero(z.im);
    if im.is_sign_negative() {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

pub fn parse_complex(s: &str) -> Option<C64> {
    let body = s.strip_suffix('i')?;
    // the imaginary sign is the last +/- that is not leading
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(_, c)| c == '+' || c == '-')
        .map(|(i, _)| i)
        .last()?;
    let re: f64 = body[..split].parse().ok()?;
    let im: f64 = body[split..].parse().ok()?;
    Some(C64::new(re, im))
}

#[derive(Serialize, Deserialize)]
struct ComplexWire {
    rows: usize,
    cols: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let part = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..self.rows())
                .map(|i| {
                    (0..self.cols())
                        .map(|j| clean_zero(f(&self.get(i, j))))
                        .collect()
                })
                .collect()
        };
        ComplexWire {
            rows: self.rows(),
            cols: self.cols(),
            re: part(|z| z.re),
            im: part(|z| z.im),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = ComplexWire::deserialize(d)?;
        let shaped = |m: &Vec<Vec<f64>>| m.len() == w.rows && m.iter().all(|r| r.len() == w.cols);
        if !shaped(&w.re) || !shaped(&w.im) {
            return Err(D::Error::custom("re/im do not match rows and cols"));
        }
        Ok(Self(DMatrix::from_fn(w.rows, w.cols, |i, j| {
            C64::new(w.re[i][j], w.im[i][j])
        })))
    }
}

pub fn modulus_squared(m: &PolyphaseMatrix) -> IncidenceMatrix {
    m.modulus_squared()
}

pub fn pm_adjoint(m: &GroupRingMatrix) -> GroupRingMatrix {
    m.adjoint()
}

pub fn pm_matmul(
    a: &GroupRingMatrix,
    b: &GroupRingMatrix,
) -> Result<GroupRingMatrix, PolymatError> {
    a.matmul(b)
}

pub fn pm_evaluate(m: &GroupRingMatrix, gamma: &Character) -> Result<ComplexMatrix, PolymatError> {
    m.evaluate(gamma)
}

pub fn filter_bank_lift(m: &PolyphaseMatrix) -> IncidenceMatrix {
    m.filter_bank_lift()
}
