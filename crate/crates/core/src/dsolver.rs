//! The family of symmetric `D` with `DB` skew-symmetric.
//!
//! Every nonzero block of `D` couples two Jordan blocks whose eigenvalues sum
//! to zero. Within such a coupling the block `Z` solves `H^t Z + Z H = 0`
//! cellwise, so it is constant up to sign along each anti-diagonal and vanishes
//! on the anti-diagonals that reach the first row or first column. Complex
//! couplings use `alpha I + beta K` cells instead of scalars.

use serde::{Deserialize, Serialize};

use crate::exact::{rat, LinForm, ParamMatrix, RatMatrix, Rational};
use crate::jordan::{BlockKind, BlockSpec, JordanSpec, PlacedBlock};

/// A linear family of symmetric solutions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DFamily {
    pub general: ParamMatrix,
    pub basis: Vec<(String, RatMatrix)>,
    pub dim: usize,
}

impl DFamily {
    pub fn from_general(general: ParamMatrix) -> Self {
        let basis: Vec<(String, RatMatrix)> = general
            .params()
            .iter()
            .map(|p| (p.clone(), general.basis_matrix(p).expect("declared parameter")))
            .collect();
        DFamily {
            dim: basis.len(),
            general,
            basis,
        }
    }

    pub fn params(&self) -> &[String] {
        self.general.params()
    }

    /// Basis matrix of a parameter. Panics on unknown names.
    pub fn basis_by_name(&self, name: &str) -> RatMatrix {
        self.basis
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| panic!("no parameter named {name}"))
    }
}

/// One free parameter: an anti-diagonal of one block coupling.
struct FreeParam {
    name: String,
    /// Sort key: global anchor coordinates, then alpha before beta.
    key: (usize, usize, u8),
    /// `(row, col, coefficient)` entries in global coordinates.
    entries: Vec<(usize, usize, Rational)>,
}

fn sign(exp: usize) -> i64 {
    if exp.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Whether two blocks of one group can be coupled by a nonzero block of `D`.
fn coupled(kind: BlockKind, x: &PlacedBlock, y: &PlacedBlock) -> bool {
    match kind {
        BlockKind::Zero | BlockKind::Imaginary => true,
        BlockKind::RealPair | BlockKind::ComplexQuad => x.side != y.side,
        BlockKind::RealSingle | BlockKind::ComplexSingle => false,
    }
}

/// Free parameters for the coupling of blocks `x` (rows) and `y` (columns),
/// with `x` placed no later than `y`.
fn coupling_params(prefix: &str, x: &PlacedBlock, y: &PlacedBlock, out: &mut Vec<FreeParam>) {
    let (p, q) = (x.size, y.size);
    let diagonal = x.offset == y.offset;
    let complex = x.cell() == 2;
    for c in p.max(q) + 1..=p + q {
        // anchor is the entry of this anti-diagonal in the last column
        let anchor = c - q;
        let cells: Vec<(usize, usize, i64)> = (anchor..=p.min(c - 1))
            .map(|k| (k, c - k, sign(k - anchor)))
            .collect();
        if !complex {
            if diagonal && c % 2 == 1 {
                continue;
            }
            let row = x.offset + anchor;
            let col = y.offset + q;
            let mut entries = Vec::new();
            for &(k, l, s) in &cells {
                let (i, j) = (x.offset + k - 1, y.offset + l - 1);
                entries.push((i, j, rat(s)));
                if !diagonal {
                    entries.push((j, i, rat(s)));
                }
            }
            out.push(FreeParam {
                name: format!("{prefix}.d_{row}_{col}"),
                key: (row, col, 0),
                entries,
            });
            continue;
        }
        let row = x.offset + 2 * (anchor - 1) + 1;
        let col = y.offset + 2 * (q - 1) + 1;
        // alpha multiplies I, beta multiplies K = [[0, 1], [-1, 0]]
        let mut parts: Vec<(&str, u8)> = Vec::new();
        if !diagonal || c % 2 == 0 {
            parts.push(("alpha", 0));
        }
        if !diagonal || c % 2 == 1 {
            parts.push(("beta", 1));
        }
        for (label, which) in parts {
            let mut entries = Vec::new();
            for &(k, l, s) in &cells {
                let (i0, j0) = (x.offset + 2 * (k - 1), y.offset + 2 * (l - 1));
                let cell: [(usize, usize, i64); 2] = if which == 0 {
                    [(0, 0, s), (1, 1, s)]
                } else {
                    [(0, 1, s), (1, 0, -s)]
                };
                for (a, b, v) in cell {
                    entries.push((i0 + a, j0 + b, rat(v)));
                    if !diagonal {
                        entries.push((j0 + b, i0 + a, rat(v)));
                    }
                }
            }
            out.push(FreeParam {
                name: format!("{prefix}.{label}_{row}_{col}"),
                key: (row, col, which),
                entries,
            });
        }
    }
}

fn assemble(dim: usize, mut params: Vec<FreeParam>) -> ParamMatrix {
    params.sort_by_key(|p| p.key);
    let mut forms = vec![vec![LinForm::zero(); dim]; dim];
    let mut out = ParamMatrix::zeros(dim, dim);
    for p in &params {
        out.declare(&p.name);
        for (i, j, v) in &p.entries {
            forms[*i][*j].add_scaled(&LinForm::param(p.name.clone()), v);
        }
    }
    for (i, row) in forms.into_iter().enumerate() {
        for (j, f) in row.into_iter().enumerate() {
            if !f.is_zero() {
                out.set(i, j, f);
            }
        }
    }
    out
}

fn group_params(spec: &JordanSpec, group: usize, out: &mut Vec<FreeParam>) {
    let kind = spec.groups()[group].kind();
    let prefix = format!("g{}", group + 1);
    let blocks: Vec<&PlacedBlock> = spec.group_blocks(group).collect();
    for (a, x) in blocks.iter().enumerate() {
        for y in &blocks[a..] {
            if coupled(kind, x, y) {
                coupling_params(&prefix, x, y, out);
            }
        }
    }
}

/// Closed-form family for a whole spec; cross-group blocks vanish.
pub fn solve_family(spec: &JordanSpec) -> DFamily {
    let mut params = Vec::new();
    for g in 0..spec.groups().len() {
        group_params(spec, g, &mut params);
    }
    DFamily::from_general(assemble(spec.dim(), params))
}

fn single_group(block: BlockSpec) -> ParamMatrix {
    let spec = JordanSpec::new(vec![block]).expect("builder arguments must form a valid block");
    solve_family(&spec).general
}

/// Family for the nilpotent group alone (names use group 1).
pub fn build_zero_block(sizes: &[usize]) -> ParamMatrix {
    single_group(BlockSpec::Zero { sizes: sizes.to_vec() })
}

pub fn build_real_pair_block(lambda: &Rational, sizes_plus: &[usize], sizes_minus: &[usize]) -> ParamMatrix {
    single_group(BlockSpec::RealPair {
        lambda: lambda.clone(),
        sizes_plus: sizes_plus.to_vec(),
        sizes_minus: sizes_minus.to_vec(),
    })
}

pub fn build_imaginary_block(b: &Rational, sizes: &[usize]) -> ParamMatrix {
    single_group(BlockSpec::Imaginary {
        b: b.clone(),
        sizes: sizes.to_vec(),
    })
}

pub fn build_complex_block(a: &Rational, b: &Rational, sizes_plus: &[usize], sizes_minus: &[usize]) -> ParamMatrix {
    single_group(BlockSpec::ComplexQuad {
        a: a.clone(),
        b: b.clone(),
        sizes_plus: sizes_plus.to_vec(),
        sizes_minus: sizes_minus.to_vec(),
    })
}

/// Brute-force family: the kernel of `D -> (D - D^t, DB + B^t D)` on all
/// `m^2` entries of `D`. Parameters are named `o1, o2, ...`.
pub fn oracle_family(b: &RatMatrix) -> DFamily {
    assert!(b.is_square(), "oracle_family needs a square matrix");
    let m = b.rows();
    let var = |i: usize, j: usize| i * m + j;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let mut r = vec![rat(0); m * m];
            r[var(i, j)] = rat(1);
            r[var(j, i)] = rat(-1);
            rows.push(r);
        }
    }
    for i in 0..m {
        for j in i..m {
            // (DB)_ij + (B^t D)_ij
            let mut r = vec![rat(0); m * m];
            for k in 0..m {
                r[var(i, k)] += b.get(k, j);
                r[var(k, j)] += b.get(k, i);
            }
            rows.push(r);
        }
    }
    let system = if rows.is_empty() {
        RatMatrix::zeros(0, m * m)
    } else {
        RatMatrix::from_rows(rows).expect("rectangular system")
    };
    let basis: Vec<(String, RatMatrix)> = system
        .kernel_basis()
        .into_iter()
        .enumerate()
        .map(|(n, v)| {
            let d = RatMatrix::from_fn(m, m, |i, j| v.get(var(i, j), 0).clone());
            (format!("o{}", n + 1), d)
        })
        .collect();
    DFamily {
        dim: basis.len(),
        general: ParamMatrix::from_basis(m, m, &basis),
        basis,
    }
}

/// Outcome of checking a closed-form family against the oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub closed_dim: usize,
    pub oracle_dim: usize,
    /// Rank of the closed-form basis (it must equal `closed_dim`).
    pub closed_rank: usize,
    /// Closed-form basis elements outside the oracle span.
    pub outside_span: Vec<String>,
    pub agrees: bool,
}

/// Same dimension, independent closed-form basis, and every closed-form basis
/// matrix inside the oracle span. Together these give equal spans.
pub fn compare_with_oracle(closed: &DFamily, oracle: &DFamily) -> OracleComparison {
    let vecs = |f: &DFamily| -> Vec<RatMatrix> { f.basis.iter().map(|(_, m)| m.vectorize()).collect() };
    let closed_vecs = vecs(closed);
    let oracle_vecs = vecs(oracle);
    let closed_rank = if closed_vecs.is_empty() {
        0
    } else {
        RatMatrix::hstack(&closed_vecs).expect("equal lengths").rank()
    };
    let outside_span = span_misses(&oracle_vecs, &closed_vecs)
        .into_iter()
        .map(|k| closed.basis[k].0.clone())
        .collect::<Vec<_>>();
    let agrees = closed.dim == oracle.dim && closed_rank == closed.dim && outside_span.is_empty();
    OracleComparison {
        closed_dim: closed.dim,
        oracle_dim: oracle.dim,
        closed_rank,
        outside_span,
        agrees,
    }
}

/// Indices of `candidates` (column vectors) outside the span of `span`.
pub(crate) fn span_misses(span: &[RatMatrix], candidates: &[RatMatrix]) -> Vec<usize> {
    if candidates.is_empty() {
        return Vec::new();
    }
    let n = candidates[0].rows();
    let a = if span.is_empty() {
        RatMatrix::zeros(n, 1)
    } else {
        RatMatrix::hstack(span).expect("equal lengths")
    };
    let all = RatMatrix::hstack(candidates).expect("equal lengths");
    if a.solve_linear(&all).expect("row counts match").is_some() {
        return Vec::new();
    }
    candidates
        .iter()
        .enumerate()
        .filter(|(_, v)| a.solve_linear(v).expect("row counts match").is_none())
        .map(|(k, _)| k)
        .collect()
}

/// Membership of `D` (as a concrete matrix) in the closed-form solution set.
pub fn satisfies(b: &RatMatrix, d: &RatMatrix) -> bool {
    d.is_symmetric() && (d * b).is_skew()
}
