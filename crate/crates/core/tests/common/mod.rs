#![allow(dead_code)]

use hamfactor::exact::{ratio, Assignment, Rational};
use hamfactor::jordan::{BlockKind, BlockSpec, JordanSpec};
use hamfactor::sample::RationalSampler;

pub const KINDS: [BlockKind; 6] = [
    BlockKind::Zero,
    BlockKind::RealPair,
    BlockKind::RealSingle,
    BlockKind::Imaginary,
    BlockKind::ComplexQuad,
    BlockKind::ComplexSingle,
];

/// `min + below(spread)` attempts at blocks of dimension `size * cell`,
/// staying within `budget`.
fn sizes(rng: &mut RationalSampler, min: u64, spread: u64, cell: usize, budget: &mut usize) -> Vec<usize> {
    let count = min + rng.below(spread);
    let mut out = Vec::new();
    for _ in 0..count {
        let s = 1 + rng.below(4) as usize;
        if s * cell <= *budget {
            *budget -= s * cell;
            out.push(s);
        }
    }
    out
}

fn group(rng: &mut RationalSampler, kind: BlockKind, label: i64, budget: &mut usize) -> Option<BlockSpec> {
    // distinct positive values keep eigenvalue classes apart
    let v = ratio(2 * label + 1, 2);
    let cell = kind.cell();
    let spec = match kind {
        BlockKind::Zero => BlockSpec::Zero { sizes: sizes(rng, 1, 3, 1, budget) },
        BlockKind::RealPair => BlockSpec::RealPair {
            lambda: v,
            sizes_plus: sizes(rng, 0, 3, 1, budget),
            sizes_minus: sizes(rng, 0, 3, 1, budget),
        },
        BlockKind::RealSingle => BlockSpec::RealSingle {
            lambda: if rng.below(2) == 0 { v } else { -v },
            sizes: sizes(rng, 1, 2, 1, budget),
        },
        BlockKind::Imaginary => BlockSpec::Imaginary { b: v, sizes: sizes(rng, 1, 2, cell, budget) },
        BlockKind::ComplexQuad => BlockSpec::ComplexQuad {
            a: v,
            b: ratio(1 + rng.below(3) as i64, 1),
            sizes_plus: sizes(rng, 0, 2, cell, budget),
            sizes_minus: sizes(rng, 0, 2, cell, budget),
        },
        BlockKind::ComplexSingle => BlockSpec::ComplexSingle {
            a: if rng.below(2) == 0 { v } else { -v },
            b: ratio(1 + rng.below(3) as i64, 1),
            sizes: sizes(rng, 1, 1, cell, budget),
        },
    };
    (spec.dim() > 0).then_some(spec)
}

/// Random valid spec of dimension at most `max_m`; the first group has kind `first`.
pub fn random_spec(rng: &mut RationalSampler, max_m: usize, first: BlockKind) -> JordanSpec {
    loop {
        let mut budget = max_m;
        let mut blocks = Vec::new();
        let mut used = Vec::new();
        let groups = 1 + rng.below(3);
        for g in 0..groups {
            let kind = if g == 0 { first } else { KINDS[rng.below(6) as usize] };
            if kind == BlockKind::Zero && used.contains(&BlockKind::Zero) {
                continue;
            }
            if let Some(b) = group(rng, kind, g as i64, &mut budget) {
                used.push(kind);
                blocks.push(b);
            }
        }
        if used.first() == Some(&first) {
            return JordanSpec::new(blocks).expect("generated spec is valid");
        }
    }
}

/// `count` specs cycling through all six kinds for the first group.
pub fn sweep(seed: u64, count: usize, max_m: usize) -> Vec<JordanSpec> {
    let mut rng = RationalSampler::new(seed);
    (0..count).map(|i| random_spec(&mut rng, max_m, KINDS[i % 6])).collect()
}

pub fn random_assignment(rng: &mut RationalSampler, params: &[String]) -> Assignment {
    params.iter().map(|p| (p.clone(), rng.rational())).collect()
}

pub fn quadratic_form(m: &hamfactor::exact::RatMatrix, u: &hamfactor::exact::RatMatrix) -> Rational {
    (&(&u.transpose() * m) * u).get(0, 0).clone()
}
