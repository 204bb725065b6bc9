//! Integrable systems on the invariant pieces of a Jordan matrix.

use serde::{Deserialize, Serialize};

use crate::exact::{rat, RatMatrix};
use crate::jordan::{rotation, shift, BlockKind, JordanSpec, PlacedBlock, Side};

/// Descending-size matching of the `+` and `-` size lists of a paired group.
/// Entries are indices into the input lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    pub pairs: Vec<(usize, usize)>,
    pub plus_alone: Vec<usize>,
    pub minus_alone: Vec<usize>,
}

pub fn pair_blocks(plus: &[usize], minus: &[usize]) -> Pairing {
    let desc = |sizes: &[usize]| {
        let mut idx: Vec<usize> = (0..sizes.len()).collect();
        idx.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]));
        idx
    };
    let (p, m) = (desc(plus), desc(minus));
    let n = p.len().min(m.len());
    Pairing {
        pairs: p.iter().copied().zip(m.iter().copied()).collect(),
        plus_alone: p[n..].to_vec(),
        minus_alone: m[n..].to_vec(),
    }
}

/// Local data on a set of coordinates invariant under `B`.
#[derive(Debug, Clone)]
pub(crate) struct Unit {
    pub label: String,
    pub coords: Vec<usize>,
    pub d0: RatMatrix,
    /// `(C, Z)` with `BZ = C` and `D0 Z` symmetric; `B` itself first when nonzero.
    pub fields: Vec<(RatMatrix, RatMatrix)>,
    pub quadratic: Vec<RatMatrix>,
    pub linear: Vec<RatMatrix>,
}

/// `p x q` matrix with alternating signs on the anti-diagonal `k + l = c`
/// (1-based), `+1` at column `q`.
pub(crate) fn anti(p: usize, q: usize, c: usize) -> RatMatrix {
    RatMatrix::from_fn(p, q, |i, j| {
        if i + j + 2 == c {
            rat(if (q - 1 - j).is_multiple_of(2) { 1 } else { -1 })
        } else {
            rat(0)
        }
    })
}

/// `[[0, Z], [Z^t, 0]]`.
fn cross(z: &RatMatrix) -> RatMatrix {
    let (p, q) = (z.rows(), z.cols());
    let mut out = RatMatrix::zeros(p + q, p + q);
    out.paste(0, p, z);
    out.paste(p, 0, &z.transpose());
    out
}

fn sum(ms: &[RatMatrix], n: usize) -> RatMatrix {
    ms.iter().fold(RatMatrix::zeros(n, n), |acc, m| &acc + m)
}

fn k2() -> RatMatrix {
    rotation(&rat(0), &rat(1))
}

fn cell_basis(cell: usize) -> Vec<RatMatrix> {
    if cell == 1 {
        vec![RatMatrix::identity(1)]
    } else {
        vec![RatMatrix::identity(2), k2()]
    }
}

fn sign(k: usize) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Invertible `b`: witnesses are `b^-1 C`, and `generators[0]` is replaced by `b`.
fn invertible_fields(b: &RatMatrix, mut generators: Vec<RatMatrix>) -> Vec<(RatMatrix, RatMatrix)> {
    generators[0] = b.clone();
    let inv = b.inverse().expect("invertible unit");
    generators.into_iter().map(|c| { let z = &inv * &c; (c, z) }).collect()
}

fn coords_of(blocks: &[&PlacedBlock]) -> Vec<usize> {
    blocks.iter().flat_map(|b| b.coords()).collect()
}

fn pair_unit(b_full: &RatMatrix, x: &PlacedBlock, y: &PlacedBlock, label: String) -> Unit {
    let coords = coords_of(&[x, y]);
    let b = b_full.restrict(&coords);
    let (xi, chi, cell) = (x.size, y.size, x.cell());
    let ws = cell_basis(cell);
    let mut quadratic = Vec::new();
    for c in xi.max(chi) + 1..=xi + chi {
        for w in &ws {
            quadratic.push(cross(&anti(xi, chi, c).kron(w)));
        }
    }
    let d0 = sum(&quadratic, coords.len());
    // diag(H^k (x) W, (-1)^(k+1) H^k (x) W^t)
    let mut generators = Vec::new();
    for k in 0..xi.max(chi) {
        for w in &ws {
            let top = shift(xi, k).kron(w);
            let bottom = shift(chi, k).kron(&w.transpose().scale(&rat(-sign(k))));
            generators.push(RatMatrix::block_diag(&[top, bottom]));
        }
    }
    Unit {
        label,
        coords,
        fields: invertible_fields(&b, generators),
        d0,
        quadratic,
        linear: Vec::new(),
    }
}

fn single_unit(b_full: &RatMatrix, x: &PlacedBlock, label: String) -> Unit {
    let coords = coords_of(&[x]);
    let b = b_full.restrict(&coords);
    let n = coords.len();
    let mut generators = Vec::new();
    for k in 0..x.size {
        for w in &cell_basis(x.cell()) {
            generators.push(shift(x.size, k).kron(w));
        }
    }
    Unit {
        label,
        coords,
        fields: invertible_fields(&b, generators),
        d0: RatMatrix::zeros(n, n),
        quadratic: Vec::new(),
        linear: Vec::new(),
    }
}

fn imaginary_unit(b_full: &RatMatrix, x: &PlacedBlock, label: String) -> Unit {
    let coords = coords_of(&[x]);
    let b = b_full.restrict(&coords);
    let s = x.size;
    let pick = |odd: bool| if odd { k2() } else { RatMatrix::identity(2) };
    let quadratic: Vec<RatMatrix> = (s + 1..=2 * s).map(|c| anti(s, s, c).kron(&pick(c % 2 == 1))).collect();
    let d0 = sum(&quadratic, 2 * s);
    // H^k (x) K for even k, H^k (x) I for odd k
    let generators = (0..s).map(|k| shift(s, k).kron(&pick(k % 2 == 0))).collect();
    Unit {
        label,
        coords,
        fields: invertible_fields(&b, generators),
        d0,
        quadratic,
        linear: Vec::new(),
    }
}

fn nilpotent_single(x: &PlacedBlock, label: String) -> Unit {
    let coords = coords_of(&[x]);
    let s = x.size;
    let j = shift(s, 1);
    if s == 1 {
        return Unit {
            label,
            coords,
            d0: RatMatrix::identity(1),
            fields: Vec::new(),
            quadratic: Vec::new(),
            linear: vec![RatMatrix::unit_vector(1, 0)],
        };
    }
    // odd: top anti-diagonal, k + 1 integrals; even: next one, k integrals
    let (d0, integrals) = if s % 2 == 1 {
        (anti(s, s, s + 1), s / 2 + 1)
    } else {
        (anti(s, s, s + 2), s / 2)
    };
    let fields = (1..=s / 2)
        .map(|i| (j.pow(2 * i as u32 - 1), j.pow(2 * i as u32 - 2)))
        .collect();
    let quadratic = (0..integrals).map(|i| &d0 * &j.pow(2 * i as u32)).collect();
    Unit {
        label,
        coords,
        d0,
        fields,
        quadratic,
        linear: Vec::new(),
    }
}

fn nilpotent_pair(x: &PlacedBlock, y: &PlacedBlock, label: String) -> Unit {
    let coords = coords_of(&[x, y]);
    let n = x.size;
    let j = shift(n, 1);
    let d0 = cross(&anti(n, n, n + 1));
    let signed = |k: usize, s: i64| RatMatrix::block_diag(&[j.pow(k as u32), j.pow(k as u32).scale(&rat(s))]);
    let fields: Vec<(RatMatrix, RatMatrix)> = (1..n)
        .map(|k| (signed(k, -sign(k)), signed(k - 1, sign(k - 1))))
        .collect();
    let quadratic = fields.iter().map(|(_, z)| &d0 * z).collect();
    Unit {
        label,
        coords,
        d0,
        fields,
        quadratic,
        linear: vec![RatMatrix::unit_vector(2 * n, n - 1), RatMatrix::unit_vector(2 * n, 2 * n - 1)],
    }
}

/// Splits the realized matrix into units. Odd nilpotent blocks stand alone,
/// equal even ones are paired in order, paired kinds follow [`pair_blocks`].
pub(crate) fn units(spec: &JordanSpec) -> Vec<Unit> {
    let b_full = spec.realize();
    let mut out = Vec::new();
    for (g, group) in spec.groups().iter().enumerate() {
        let blocks: Vec<&PlacedBlock> = spec.group_blocks(g).collect();
        let tag = |what: &str| format!("g{}.{}{}", g + 1, group.kind().name(), what);
        match group.kind() {
            BlockKind::Zero => {
                let mut pending: Option<&PlacedBlock> = None;
                for &blk in &blocks {
                    if blk.size % 2 == 1 {
                        out.push(nilpotent_single(blk, tag(&format!("({})", blk.size))));
                        continue;
                    }
                    match pending.take() {
                        Some(prev) if prev.size == blk.size => {
                            out.push(nilpotent_pair(prev, blk, tag(&format!("({},{})", prev.size, blk.size))));
                        }
                        Some(prev) => {
                            out.push(nilpotent_single(prev, tag(&format!("({})", prev.size))));
                            pending = Some(blk);
                        }
                        None => pending = Some(blk),
                    }
                }
                if let Some(prev) = pending {
                    out.push(nilpotent_single(prev, tag(&format!("({})", prev.size))));
                }
            }
            BlockKind::RealPair | BlockKind::ComplexQuad => {
                let plus: Vec<&PlacedBlock> = blocks.iter().copied().filter(|b| b.side == Side::Plus).collect();
                let minus: Vec<&PlacedBlock> = blocks.iter().copied().filter(|b| b.side == Side::Minus).collect();
                let sizes = |bs: &[&PlacedBlock]| bs.iter().map(|b| b.size).collect::<Vec<_>>();
                let pairing = pair_blocks(&sizes(&plus), &sizes(&minus));
                for &(i, k) in &pairing.pairs {
                    let label = tag(&format!("({},{})", plus[i].size, minus[k].size));
                    out.push(pair_unit(&b_full, plus[i], minus[k], label));
                }
                for &i in &pairing.plus_alone {
                    out.push(single_unit(&b_full, plus[i], tag(&format!("(+{})", plus[i].size))));
                }
                for &k in &pairing.minus_alone {
                    out.push(single_unit(&b_full, minus[k], tag(&format!("(-{})", minus[k].size))));
                }
            }
            BlockKind::Imaginary => {
                for &blk in &blocks {
                    out.push(imaginary_unit(&b_full, blk, tag(&format!("({})", blk.size))));
                }
            }
            BlockKind::RealSingle | BlockKind::ComplexSingle => {
                for &blk in &blocks {
                    out.push(single_unit(&b_full, blk, tag(&format!("({})", blk.size))));
                }
            }
        }
    }
    out
}
