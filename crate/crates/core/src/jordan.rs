//! Jordan specifications, their real realization, and conjugation witnesses.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{rat, serde_rational, ExactError, ParamMatrix, RatMatrix, Rational};

pub const SPEC_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("malformed spec at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported spec version {0} (expected {SPEC_VERSION})")]
    UnsupportedVersion(u32),
    #[error("spec has no blocks")]
    Empty,
    #[error("block {block} ({kind}): no sizes given")]
    NoSizes { block: usize, kind: &'static str },
    #[error("block {block} ({kind}): sizes must be at least 1")]
    ZeroSize { block: usize, kind: &'static str },
    #[error("block {block} ({kind}): `{field}` must be positive, got {value}")]
    NotPositive {
        block: usize,
        kind: &'static str,
        field: &'static str,
        value: String,
    },
    #[error("block {block} ({kind}): `{field}` must be nonzero")]
    ZeroValue {
        block: usize,
        kind: &'static str,
        field: &'static str,
    },
    #[error("block {block} ({kind}) repeats the eigenvalue class of block {first}; merge them, or use a pair kind for +/- partners")]
    DuplicateEigenvalue {
        block: usize,
        kind: &'static str,
        first: usize,
    },
    #[error("dimension {dim} exceeds the limit {limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error("conjugation witness does not bring the matrix to the realized spec")]
    NotConjugate,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// One eigenvalue group of the real Jordan form, as written in spec files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BlockSpec {
    /// Nilpotent blocks; size 1 is a plain zero eigenvalue.
    Zero { sizes: Vec<usize> },
    /// Blocks for `lambda` and `-lambda`, `lambda > 0`.
    RealPair {
        #[serde(with = "serde_rational")]
        lambda: Rational,
        #[serde(default)]
        sizes_plus: Vec<usize>,
        #[serde(default)]
        sizes_minus: Vec<usize>,
    },
    /// Blocks for a nonzero `lambda` whose negative is not an eigenvalue.
    RealSingle {
        #[serde(with = "serde_rational")]
        lambda: Rational,
        sizes: Vec<usize>,
    },
    /// Blocks for `+-bi`, `b > 0`; a size `s` is a `2s x 2s` real block.
    Imaginary {
        #[serde(with = "serde_rational")]
        b: Rational,
        sizes: Vec<usize>,
    },
    /// Blocks for `a +- bi` and `-(a +- bi)`, `a, b > 0`.
    ComplexQuad {
        #[serde(with = "serde_rational")]
        a: Rational,
        #[serde(with = "serde_rational")]
        b: Rational,
        #[serde(default)]
        sizes_plus: Vec<usize>,
        #[serde(default)]
        sizes_minus: Vec<usize>,
    },
    /// Blocks for `a +- bi`, `a != 0`, `b > 0`, without the negated partner.
    ComplexSingle {
        #[serde(with = "serde_rational")]
        a: Rational,
        #[serde(with = "serde_rational")]
        b: Rational,
        sizes: Vec<usize>,
    },
}

/// Kind tag without the payload; also the canonical group order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Zero,
    RealPair,
    RealSingle,
    Imaginary,
    ComplexQuad,
    ComplexSingle,
}

impl BlockKind {
    pub fn name(self) -> &'static str {
        match self {
            BlockKind::Zero => "zero",
            BlockKind::RealPair => "real_pair",
            BlockKind::RealSingle => "real_single",
            BlockKind::Imaginary => "imaginary",
            BlockKind::ComplexQuad => "complex_quad",
            BlockKind::ComplexSingle => "complex_single",
        }
    }

    /// Side length of one Jordan cell: 2 for complex kinds.
    pub fn cell(self) -> usize {
        match self {
            BlockKind::Imaginary | BlockKind::ComplexQuad | BlockKind::ComplexSingle => 2,
            _ => 1,
        }
    }

    pub fn is_paired(self) -> bool {
        matches!(self, BlockKind::RealPair | BlockKind::ComplexQuad)
    }
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which size list a Jordan block came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
    Only,
}

impl BlockSpec {
    pub fn kind(&self) -> BlockKind {
        match self {
            BlockSpec::Zero { .. } => BlockKind::Zero,
            BlockSpec::RealPair { .. } => BlockKind::RealPair,
            BlockSpec::RealSingle { .. } => BlockKind::RealSingle,
            BlockSpec::Imaginary { .. } => BlockKind::Imaginary,
            BlockSpec::ComplexQuad { .. } => BlockKind::ComplexQuad,
            BlockSpec::ComplexSingle { .. } => BlockKind::ComplexSingle,
        }
    }

    /// Size lists in realization order, tagged by side.
    pub fn size_lists(&self) -> Vec<(Side, &[usize])> {
        match self {
            BlockSpec::Zero { sizes }
            | BlockSpec::RealSingle { sizes, .. }
            | BlockSpec::Imaginary { sizes, .. }
            | BlockSpec::ComplexSingle { sizes, .. } => vec![(Side::Only, sizes)],
            BlockSpec::RealPair {
                sizes_plus,
                sizes_minus,
                ..
            }
            | BlockSpec::ComplexQuad {
                sizes_plus,
                sizes_minus,
                ..
            } => vec![(Side::Plus, sizes_plus), (Side::Minus, sizes_minus)],
        }
    }

    fn size_lists_mut(&mut self) -> Vec<&mut Vec<usize>> {
        match self {
            BlockSpec::Zero { sizes }
            | BlockSpec::RealSingle { sizes, .. }
            | BlockSpec::Imaginary { sizes, .. }
            | BlockSpec::ComplexSingle { sizes, .. } => vec![sizes],
            BlockSpec::RealPair {
                sizes_plus,
                sizes_minus,
                ..
            }
            | BlockSpec::ComplexQuad {
                sizes_plus,
                sizes_minus,
                ..
            } => vec![sizes_plus, sizes_minus],
        }
    }

    /// Realized dimension of the group.
    pub fn dim(&self) -> usize {
        let cell = self.kind().cell();
        self.size_lists()
            .iter()
            .map(|(_, s)| s.iter().sum::<usize>() * cell)
            .sum()
    }

    /// Eigenvalue `(re, im)` of the blocks on the given side; `im >= 0`.
    pub fn eigenvalue(&self, side: Side) -> (Rational, Rational) {
        let flip = |v: &Rational| if side == Side::Minus { -v } else { v.clone() };
        match self {
            BlockSpec::Zero { .. } => (Rational::zero(), Rational::zero()),
            BlockSpec::RealPair { lambda, .. } | BlockSpec::RealSingle { lambda, .. } => {
                (flip(lambda), Rational::zero())
            }
            BlockSpec::Imaginary { b, .. } => (Rational::zero(), b.clone()),
            BlockSpec::ComplexQuad { a, b, .. } | BlockSpec::ComplexSingle { a, b, .. } => (flip(a), b.clone()),
        }
    }

    /// Class key: two groups clash when their keys coincide.
    fn class_key(&self) -> (u8, Rational, Rational) {
        match self {
            BlockSpec::Zero { .. } => (0, Rational::zero(), Rational::zero()),
            BlockSpec::RealPair { lambda, .. } | BlockSpec::RealSingle { lambda, .. } => {
                (1, lambda.abs(), Rational::zero())
            }
            BlockSpec::Imaginary { b, .. } => (2, Rational::zero(), b.clone()),
            BlockSpec::ComplexQuad { a, b, .. } | BlockSpec::ComplexSingle { a, b, .. } => (3, a.abs(), b.clone()),
        }
    }

    fn check(&self, block: usize) -> Result<(), SpecError> {
        let kind = self.kind().name();
        let lists = self.size_lists();
        if lists.iter().all(|(_, s)| s.is_empty()) {
            return Err(SpecError::NoSizes { block, kind });
        }
        if lists.iter().any(|(_, s)| s.contains(&0)) {
            return Err(SpecError::ZeroSize { block, kind });
        }
        let positive = |field: &'static str, v: &Rational| {
            if v.is_positive() {
                Ok(())
            } else {
                Err(SpecError::NotPositive {
                    block,
                    kind,
                    field,
                    value: v.to_string(),
                })
            }
        };
        let nonzero = |field: &'static str, v: &Rational| {
            if v.is_zero() {
                Err(SpecError::ZeroValue { block, kind, field })
            } else {
                Ok(())
            }
        };
        match self {
            BlockSpec::Zero { .. } => Ok(()),
            BlockSpec::RealPair { lambda, .. } => positive("lambda", lambda),
            BlockSpec::RealSingle { lambda, .. } => nonzero("lambda", lambda),
            BlockSpec::Imaginary { b, .. } => positive("b", b),
            BlockSpec::ComplexQuad { a, b, .. } => {
                positive("a", a)?;
                positive("b", b)
            }
            BlockSpec::ComplexSingle { a, b, .. } => {
                nonzero("a", a)?;
                positive("b", b)
            }
        }
    }
}

/// The spec file format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpec {
    pub version: u32,
    pub blocks: Vec<BlockSpec>,
}

impl RawSpec {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// One realized Jordan block and where it sits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedBlock {
    /// Zero-based index into [`JordanSpec::groups`].
    pub group: usize,
    pub kind: BlockKind,
    pub side: Side,
    /// Jordan size (number of cells).
    pub size: usize,
    /// First realized coordinate (zero-based).
    pub offset: usize,
    /// Index of the group in the input file.
    pub input_block: usize,
    /// Position inside the input size list before sorting.
    pub input_position: usize,
}

impl PlacedBlock {
    pub fn cell(&self) -> usize {
        self.kind.cell()
    }

    pub fn dim(&self) -> usize {
        self.size * self.cell()
    }

    pub fn coords(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.dim()
    }
}

/// A validated Jordan specification in canonical order: groups sorted by
/// kind (stable in input order), sizes ascending within each list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanSpec {
    groups: Vec<BlockSpec>,
    layout: Vec<PlacedBlock>,
    dim: usize,
}

impl JordanSpec {
    pub fn new(blocks: Vec<BlockSpec>) -> Result<Self, SpecError> {
        Self::validate(RawSpec {
            version: SPEC_VERSION,
            blocks,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let raw = RawSpec::from_json(text).map_err(|e| SpecError::Json {
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })?;
        Self::validate(raw)
    }

    pub fn validate(raw: RawSpec) -> Result<Self, SpecError> {
        if raw.version != SPEC_VERSION {
            return Err(SpecError::UnsupportedVersion(raw.version));
        }
        if raw.blocks.is_empty() {
            return Err(SpecError::Empty);
        }
        for (i, b) in raw.blocks.iter().enumerate() {
            b.check(i)?;
        }
        for (i, b) in raw.blocks.iter().enumerate() {
            let key = b.class_key();
            if let Some(first) = raw.blocks[..i].iter().position(|o| o.class_key() == key) {
                return Err(SpecError::DuplicateEigenvalue {
                    block: i,
                    kind: b.kind().name(),
                    first,
                });
            }
        }

        let mut order: Vec<usize> = (0..raw.blocks.len()).collect();
        order.sort_by_key(|&i| raw.blocks[i].kind());

        let mut groups = Vec::with_capacity(order.len());
        let mut layout = Vec::new();
        let mut offset = 0;
        for (g, &input_block) in order.iter().enumerate() {
            let mut spec = raw.blocks[input_block].clone();
            let kind = spec.kind();
            let sides: Vec<Side> = spec.size_lists().iter().map(|(s, _)| *s).collect();
            for (list, side) in spec.size_lists_mut().into_iter().zip(sides) {
                let mut perm: Vec<usize> = (0..list.len()).collect();
                perm.sort_by_key(|&k| list[k]);
                let sorted: Vec<usize> = perm.iter().map(|&k| list[k]).collect();
                for (&input_position, &size) in perm.iter().zip(&sorted) {
                    layout.push(PlacedBlock {
                        group: g,
                        kind,
                        side,
                        size,
                        offset,
                        input_block,
                        input_position,
                    });
                    offset += size * kind.cell();
                }
                *list = sorted;
            }
            groups.push(spec);
        }
        Ok(JordanSpec {
            groups,
            layout,
            dim: offset,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn groups(&self) -> &[BlockSpec] {
        &self.groups
    }

    pub fn layout(&self) -> &[PlacedBlock] {
        &self.layout
    }

    pub fn group_blocks(&self, group: usize) -> impl Iterator<Item = &PlacedBlock> {
        self.layout.iter().filter(move |b| b.group == group)
    }

    /// Coordinates occupied by a group.
    pub fn group_coords(&self, group: usize) -> Vec<usize> {
        self.group_blocks(group).flat_map(PlacedBlock::coords).collect()
    }

    /// The canonical spec in file form.
    pub fn to_raw(&self) -> RawSpec {
        RawSpec {
            version: SPEC_VERSION,
            blocks: self.groups.clone(),
        }
    }

    pub fn ensure_max_dim(&self, limit: usize) -> Result<(), SpecError> {
        if self.dim > limit {
            return Err(SpecError::TooLarge { dim: self.dim, limit });
        }
        Ok(())
    }

    /// The block-diagonal real Jordan matrix.
    pub fn realize(&self) -> RatMatrix {
        let blocks: Vec<RatMatrix> = self
            .layout
            .iter()
            .map(|b| {
                let (re, im) = self.groups[b.group].eigenvalue(b.side);
                if b.cell() == 1 {
                    real_block(&re, b.size)
                } else {
                    complex_block(&re, &im, b.size)
                }
            })
            .collect();
        RatMatrix::block_diag(&blocks)
    }

    /// True iff the realized matrix has no zero eigenvalue.
    pub fn is_invertible(&self) -> bool {
        !self.groups.iter().any(|g| g.kind() == BlockKind::Zero)
    }
}

/// serde_json appends " at line L column C"; the error variant carries those separately.
fn strip_position(message: &str) -> String {
    message.rsplit_once(" at line ").map_or(message, |(head, _)| head).to_string()
}

impl Serialize for JordanSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_raw().serialize(s)
    }
}

impl<'de> Deserialize<'de> for JordanSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawSpec::deserialize(d)?;
        JordanSpec::validate(raw).map_err(serde::de::Error::custom)
    }
}

/// Nilpotent shift with ones on the `k`-th superdiagonal.
pub fn shift(n: usize, k: usize) -> RatMatrix {
    RatMatrix::from_fn(n, n, |i, j| if j == i + k { rat(1) } else { rat(0) })
}

/// `J_s(lambda)`.
pub fn real_block(lambda: &Rational, size: usize) -> RatMatrix {
    let diag = RatMatrix::identity(size).scale(lambda);
    &diag + &shift(size, 1)
}

/// `[[a, b], [-b, a]]`.
pub fn rotation(a: &Rational, b: &Rational) -> RatMatrix {
    RatMatrix::from_rows(vec![vec![a.clone(), b.clone()], vec![-b, a.clone()]]).expect("2x2")
}

/// `J_{2s}(a +- bi)`: rotation cells on the diagonal, `I_2` above.
pub fn complex_block(a: &Rational, b: &Rational, size: usize) -> RatMatrix {
    let mut out = RatMatrix::zeros(2 * size, 2 * size);
    let cell = rotation(a, b);
    let id = RatMatrix::identity(2);
    for k in 0..size {
        out.paste(2 * k, 2 * k, &cell);
        if k + 1 < size {
            out.paste(2 * k, 2 * k + 2, &id);
        }
    }
    out
}

/// An invertible change of variables `u = T v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conjugation {
    t: RatMatrix,
    t_inv: RatMatrix,
}

impl Conjugation {
    pub fn new(t: RatMatrix) -> Result<Self, ExactError> {
        let t_inv = t.inverse()?;
        Ok(Conjugation { t, t_inv })
    }

    pub fn identity(n: usize) -> Self {
        Conjugation {
            t: RatMatrix::identity(n),
            t_inv: RatMatrix::identity(n),
        }
    }

    pub fn t(&self) -> &RatMatrix {
        &self.t
    }

    pub fn t_inv(&self) -> &RatMatrix {
        &self.t_inv
    }

    pub fn inverse(&self) -> Self {
        Conjugation {
            t: self.t_inv.clone(),
            t_inv: self.t.clone(),
        }
    }
}

/// `T^-1 B T`.
pub fn conjugate(b: &RatMatrix, c: &Conjugation) -> Result<RatMatrix, ExactError> {
    c.t_inv.checked_mul(b)?.checked_mul(&c.t)
}

/// `T^t D T`: carries a solution for `B` to a solution for `T^-1 B T`.
pub fn pushforward_d(d: &ParamMatrix, c: &Conjugation) -> Result<ParamMatrix, ExactError> {
    d.mul_left(&c.t.transpose())?.mul_right(&c.t)
}

/// Accepts an arbitrary `B` only together with `T` such that `T^-1 B T` is the
/// realized spec.
pub fn verify_witness(b: &RatMatrix, spec: &JordanSpec, c: &Conjugation) -> Result<(), SpecError> {
    if conjugate(b, c)? == spec.realize() {
        Ok(())
    } else {
        Err(SpecError::NotConjugate)
    }
}
