//! Quantiles of discrete weighted distributions over the extended reals.
//!
//! The convention throughout is the left-continuous generalized inverse
//! `Quantile(beta; F) = inf{z : F(z) >= beta}`. An atom at `+inf` is legal
//! and scanned last, so a target level that the finite mass never reaches
//! yields `+inf`.

use crate::types::CoreError;

/// A point mass of a discrete distribution: a value (possibly `+inf`) and a
/// nonnegative weight. Weights need not be normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedAtom {
    pub value: f64,
    pub mass: f64,
}

impl WeightedAtom {
    pub fn new(value: f64, mass: f64) -> Result<Self, CoreError> {
        if value.is_nan() {
            return Err(CoreError::NanAtomValue);
        }
        if !(mass >= 0.0) || !mass.is_finite() {
            return Err(CoreError::InvalidMass(mass));
        }
        Ok(Self { value, mass })
    }
}

/// `inf{z : F(z) >= beta}` of the discrete distribution carried by `atoms`,
/// with masses normalized internally to sum to one.
///
/// Atoms sharing a value are merged by summing their masses before the
/// scan. Values are visited in ascending order with `+inf` last; if the
/// cumulative finite mass never reaches `beta` the result is `+inf`.
///
/// Errors on an empty atom list, a negative (or non-finite) mass, zero
/// total mass, or `beta` outside `(0, 1]`.
pub fn weighted_quantile(atoms: &[WeightedAtom], beta: f64) -> Result<f64, CoreError> {
    if atoms.is_empty() {
        return Err(CoreError::EmptyAtoms);
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(CoreError::InvalidQuantileLevel(beta));
    }
    let mut merged: Vec<WeightedAtom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        if a.value.is_nan() {
            return Err(CoreError::NanAtomValue);
        }
        if !(a.mass >= 0.0) || !a.mass.is_finite() {
            return Err(CoreError::InvalidMass(a.mass));
        }
        merged.push(*a);
    }
    merged.sort_by(|a, b| a.value.total_cmp(&b.value));
    merged.dedup_by(|next, prev| {
        if next.value == prev.value {
            prev.mass += next.mass;
            true
        } else {
            false
        }
    });

    let total: f64 = merged.iter().map(|a| a.mass).sum();
    if total <= 0.0 {
        return Err(CoreError::ZeroTotalMass);
    }

    // Scanning raw masses against beta * total is the normalized comparison
    // F(z) >= beta without an explicit division; the final cumulative sum
    // equals `total` exactly (same additions in the same order), so beta = 1
    // always resolves to the largest value.
    let target = beta * total;
    let mut acc = 0.0;
    for a in &merged {
        acc += a.mass;
        if acc >= target {
            return Ok(a.value);
        }
    }
    Ok(f64::INFINITY)
}
