use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{ExactError, LinForm, RatMatrix, Rational};

/// Values for named parameters.
pub type Assignment = BTreeMap<String, Rational>;

/// Matrix of affine-linear forms in named parameters.
///
/// `params` is the ordered declaration list. Every name used by an entry is
/// declared; a product with a constant matrix keeps the declaration list even
/// if some parameter cancels out of every entry.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ParamRepr", into = "ParamRepr")]
pub struct ParamMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<LinForm>,
    params: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamRepr {
    rows: usize,
    cols: usize,
    params: Vec<String>,
    entries: Vec<Vec<LinForm>>,
}

impl From<ParamMatrix> for ParamRepr {
    fn from(p: ParamMatrix) -> Self {
        let cols = p.cols;
        let mut entries = Vec::with_capacity(p.rows);
        let mut it = p.entries.into_iter();
        for _ in 0..p.rows {
            entries.push(it.by_ref().take(cols).collect());
        }
        ParamRepr {
            rows: p.rows,
            cols,
            params: p.params,
            entries,
        }
    }
}

impl TryFrom<ParamRepr> for ParamMatrix {
    type Error = ExactError;

    fn try_from(r: ParamRepr) -> Result<Self, ExactError> {
        if r.entries.len() != r.rows {
            return Err(ExactError::Ragged {
                row: r.entries.len(),
                found: 0,
                expected: r.cols,
            });
        }
        let mut entries = Vec::with_capacity(r.rows * r.cols);
        for (i, row) in r.entries.into_iter().enumerate() {
            if row.len() != r.cols {
                return Err(ExactError::Ragged {
                    row: i,
                    found: row.len(),
                    expected: r.cols,
                });
            }
            entries.extend(row);
        }
        ParamMatrix::new(r.rows, r.cols, entries, r.params)
    }
}

impl ParamMatrix {
    /// Checks that `params` has no duplicates and covers every name used.
    pub fn new(rows: usize, cols: usize, entries: Vec<LinForm>, params: Vec<String>) -> Result<Self, ExactError> {
        if entries.len() != rows * cols {
            return Err(ExactError::Ragged {
                row: 0,
                found: entries.len(),
                expected: rows * cols,
            });
        }
        let declared: BTreeSet<&String> = params.iter().collect();
        if declared.len() != params.len() {
            return Err(ExactError::ParameterMismatch);
        }
        let mut used = BTreeSet::new();
        for e in &entries {
            e.collect_params(&mut used);
        }
        if used.iter().any(|name| !declared.contains(name)) {
            return Err(ExactError::ParameterMismatch);
        }
        Ok(ParamMatrix {
            rows,
            cols,
            entries,
            params,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ParamMatrix {
            rows,
            cols,
            entries: vec![LinForm::zero(); rows * cols],
            params: Vec::new(),
        }
    }

    pub fn from_constant(m: &RatMatrix) -> Self {
        ParamMatrix {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().cloned().map(LinForm::constant).collect(),
            params: Vec::new(),
        }
    }

    /// `sum(name_k * basis_k)` with the names declared in the given order.
    pub fn from_basis(rows: usize, cols: usize, basis: &[(String, RatMatrix)]) -> Self {
        let mut out = ParamMatrix::zeros(rows, cols);
        for (name, m) in basis {
            assert!(m.rows() == rows && m.cols() == cols, "basis matrix has the wrong shape");
            out.declare(name);
            for (slot, v) in out.entries.iter_mut().zip(m.entries()) {
                slot.add_scaled(&LinForm::param(name.clone()), v);
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn get(&self, i: usize, j: usize) -> &LinForm {
        &self.entries[i * self.cols + j]
    }

    /// Overwrites an entry, declaring any new parameter names at the end of
    /// the parameter list.
    pub fn set(&mut self, i: usize, j: usize, value: LinForm) {
        for name in value.params() {
            if !self.params.iter().any(|p| p == name) {
                self.params.push(name.to_string());
            }
        }
        self.entries[i * self.cols + j] = value;
    }

    /// Appends `name` to the declaration list if it is not there yet.
    pub fn declare(&mut self, name: &str) {
        if !self.params.iter().any(|p| p == name) {
            self.params.push(name.to_string());
        }
    }

    pub fn entries(&self) -> &[LinForm] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        ParamMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
            params: self.params.clone(),
        }
    }

    /// `self * rhs`.
    pub fn mul_right(&self, rhs: &RatMatrix) -> Result<Self, ExactError> {
        if self.cols != rhs.rows() {
            return Err(self.shape_error("mat_mul", rhs.rows(), rhs.cols()));
        }
        let mut out = ParamMatrix::zeros(self.rows, rhs.cols());
        out.params = self.params.clone();
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols() {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * out.cols + j].add_scaled(a, b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `lhs * self`.
    pub fn mul_left(&self, lhs: &RatMatrix) -> Result<Self, ExactError> {
        Ok(self.transpose().mul_right(&lhs.transpose())?.transpose())
    }

    fn shape_error(&self, op: &'static str, right_rows: usize, right_cols: usize) -> ExactError {
        ExactError::Shape {
            op,
            left_rows: self.rows,
            left_cols: self.cols,
            right_rows,
            right_cols,
        }
    }

    pub fn checked_add(&self, rhs: &ParamMatrix) -> Result<Self, ExactError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(self.shape_error("add", rhs.rows, rhs.cols));
        }
        let mut params = self.params.clone();
        for p in &rhs.params {
            if !params.contains(p) {
                params.push(p.clone());
            }
        }
        Ok(ParamMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
            params,
        })
    }

    fn check_names(&self, assignment: &Assignment) -> Result<(), ExactError> {
        match assignment.keys().find(|k| !self.params.contains(k)) {
            Some(unknown) => Err(ExactError::UnknownParameter(unknown.clone())),
            None => Ok(()),
        }
    }

    /// Partial evaluation; the assigned names leave the parameter list.
    pub fn substitute(&self, assignment: &Assignment) -> Result<Self, ExactError> {
        self.check_names(assignment)?;
        Ok(ParamMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.substitute(assignment)).collect(),
            params: self
                .params
                .iter()
                .filter(|p| !assignment.contains_key(*p))
                .cloned()
                .collect(),
        })
    }

    /// Full evaluation; every declared parameter must be assigned.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<RatMatrix, ExactError> {
        self.check_names(assignment)?;
        if let Some(missing) = self.params.iter().find(|p| !assignment.contains_key(*p)) {
            return Err(ExactError::UnassignedParameter(missing.clone()));
        }
        let values = self
            .entries
            .iter()
            .map(|e| e.evaluate(assignment))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RatMatrix::from_fn(self.rows, self.cols, |i, j| values[i * self.cols + j].clone()))
    }

    /// Evaluation with unassigned parameters taken as zero.
    pub fn evaluate_or_zero(&self, assignment: &Assignment) -> Result<RatMatrix, ExactError> {
        let mut full = assignment.clone();
        for p in &self.params {
            full.entry(p.clone()).or_insert_with(Rational::zero);
        }
        self.evaluate(&full)
    }

    /// The matrix obtained by setting `name = 1` and every other parameter to 0.
    pub fn basis_matrix(&self, name: &str) -> Result<RatMatrix, ExactError> {
        if !self.params.iter().any(|p| p == name) {
            return Err(ExactError::UnknownParameter(name.to_string()));
        }
        let mut asg = Assignment::new();
        asg.insert(name.to_string(), Rational::one());
        self.evaluate_or_zero(&asg)
    }

    pub fn constant_part(&self) -> RatMatrix {
        RatMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).constant_part().clone())
    }

    /// Linear coefficient matrix of one parameter.
    pub fn coefficient_matrix(&self, name: &str) -> RatMatrix {
        RatMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).coefficient(name))
    }

    pub fn column_is_zero(&self, j: usize) -> bool {
        (0..self.rows).all(|i| self.get(i, j).is_zero())
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        (0..self.cols).all(|j| self.get(i, j).is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LinForm::is_zero)
    }

    /// Entrywise equality with the transpose, as forms.
    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Copies `block` into position `(r0, c0)`, declaring its parameters.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &ParamMatrix) {
        for p in &block.params {
            self.declare(p);
        }
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.entries[(r0 + i) * self.cols + c0 + j] = block.get(i, j).clone();
            }
        }
    }

    pub fn block_diag(blocks: &[ParamMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = ParamMatrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.paste(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }
}

impl fmt::Debug for ParamMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParamMatrix{}x{} {:?} ", self.rows, self.cols, self.params)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ParamMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(ToString::to_string).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for i in 0..self.rows {
            let row: Vec<String> = cells[i * self.cols..(i + 1) * self.cols]
                .iter()
                .map(|c| format!("{c:>width$}"))
                .collect();
            writeln!(f, "[ {} ]", row.join("  "))?;
        }
        Ok(())
    }
}
