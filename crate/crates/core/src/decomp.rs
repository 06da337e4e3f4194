//! Primary decomposition of a similitude and the pairing of primary
//! components into blocks.

use crate::error::{Error, Result};
use crate::field::Tower;
use crate::forms::{GroupElement, HermitianSpace};
use crate::linalg::{minimal_polynomial, Matrix};
use crate::poly::{factorize, tau_star, Poly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimaryComponent {
    pub p: Poly,
    pub e: usize,
    /// Columns spanning `ker p(g)^e`.
    pub basis: Matrix,
}

impl PrimaryComponent {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockVariant {
    SelfDual,
    Paired,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub variant: BlockVariant,
    pub poly: Poly,
    /// `tau_star(poly)`; equal to `poly` for self-dual blocks.
    pub partner: Poly,
    pub exponent: usize,
    /// For paired blocks the columns of the `poly` component come first.
    pub basis: Matrix,
    pub half: usize,
    pub space: HermitianSpace,
    pub g: GroupElement,
}

/// The matrix of `g` on the `g`-invariant subspace spanned by `basis`.
pub fn restrict_endomorphism(g: &Matrix, basis: &Matrix, f: &Tower) -> Result<Matrix> {
    basis
        .solve_matrix(&g.mul(basis, f), f)
        .ok_or_else(|| Error::invariant("subspace is g-invariant", "restriction solve"))
}

pub fn primary_decomposition(
    space: &HermitianSpace,
    g: &GroupElement,
    seed: u64,
) -> Result<Vec<PrimaryComponent>> {
    let f = space.tower();
    let minpoly = minimal_polynomial(&g.g, f);
    let mut factors = factorize(&minpoly, f, seed)?.factors;
    factors.sort();
    let mut out = Vec::with_capacity(factors.len());
    for (p, e) in factors {
        let basis = g.g.eval_poly(&p.pow(e, f), f).kernel(f);
        out.push(PrimaryComponent { p, e, basis });
    }
    let total: usize = out.iter().map(PrimaryComponent::dim).sum();
    if total != space.n() {
        return Err(Error::invariant(
            "V is the direct sum of its primary components",
            format!("{total} != {}", space.n()),
        ));
    }
    Ok(out)
}

pub fn pair_blocks(
    space: &HermitianSpace,
    g: &GroupElement,
    components: &[PrimaryComponent],
) -> Result<Vec<Block>> {
    let f = space.tower();
    let mut used = vec![false; components.len()];
    let mut blocks = Vec::new();
    for (i, comp) in components.iter().enumerate() {
        if used[i] {
            continue;
        }
        let star = tau_star(&comp.p, g.beta, f)?;
        let j = components.iter().position(|c| c.p == star).ok_or_else(|| {
            Error::invariant(
                "tau-star permutes the primary components",
                format!("{star:?}"),
            )
        })?;
        if used[j] || components[j].e != comp.e {
            return Err(Error::invariant(
                "paired components share their exponent",
                "matching",
            ));
        }
        used[i] = true;
        used[j] = true;
        let (variant, basis) = if i == j {
            (BlockVariant::SelfDual, comp.basis.clone())
        } else {
            (
                BlockVariant::Paired,
                comp.basis.hstack(&components[j].basis),
            )
        };
        let restricted = space.restrict(&basis).map_err(|_| {
            Error::invariant(
                "each block is non-degenerate",
                format!("block of {:?}", comp.p),
            )
        })?;
        let local = restrict_endomorphism(&g.g, &basis, f)?;
        let local = GroupElement::new(&restricted, local).map_err(|_| {
            Error::invariant("g restricts to a similitude of each block", "multiplier")
        })?;
        if local.beta != g.beta {
            return Err(Error::invariant(
                "g restricts to a similitude of each block",
                "multiplier changed",
            ));
        }
        if variant == BlockVariant::Paired {
            for half in [&comp.basis, &components[j].basis] {
                if !space.gram_of(half).is_zero() {
                    return Err(Error::invariant(
                        "paired components are totally isotropic",
                        "isotropy",
                    ));
                }
            }
        }
        blocks.push(Block {
            variant,
            poly: comp.p.clone(),
            partner: star,
            exponent: comp.e,
            half: comp.dim(),
            basis,
            space: restricted,
            g: local,
        });
    }
    for (k, a) in blocks.iter().enumerate() {
        for b in &blocks[k + 1..] {
            if !space.pairing(&a.basis, &b.basis).is_zero() {
                return Err(Error::invariant(
                    "distinct blocks are perpendicular",
                    "cross pairing",
                ));
            }
        }
    }
    blocks.sort_by(|a, b| {
        (a.poly.deg(), &a.poly, a.variant).cmp(&(b.poly.deg(), &b.poly, b.variant))
    });
    Ok(blocks)
}
