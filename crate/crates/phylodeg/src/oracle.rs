//! Brute-force lattice-point counting and exact Ehrhart interpolation.
//!
//! Everything here is deliberately naive: dilation scans enumerate every
//! point of `{0..t}^E` and check every facet inequality, odd subsets are
//! enumerated exhaustively per vertex, and any non-integrality is treated as
//! a bug. Counting the points of `t*P` at `t = 0..n` and interpolating gives
//! a degree-`n` polynomial whose leading coefficient times `n!` is the
//! standard lattice volume — the referee for both volume engines.
//!
//! Scans partition on the first coordinate; with the `parallel` feature the
//! partitions run on rayon workers and partial counts are summed.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Signed;

use crate::arith::{factorial, lagrange_interpolate, Rational, UnivariatePolynomial};
use crate::forest::{EdgeId, Forest, VertexId};
use crate::VolumeError;

/// Default cap on the scan dimension; 8 edges at full dilation range is
/// already ~10^8 membership tests.
pub const DEFAULT_MAX_DIM: usize = 8;

/// `sum of x_e, e in plus` minus `sum of x_e, e in minus`, compared against
/// `bound * t`.
struct LinearCut {
    plus: Vec<usize>,
    minus: Vec<usize>,
    bound: i64,
    at_most: bool,
}

impl LinearCut {
    fn admits(&self, x: &[i64], t: i64) -> bool {
        let mut s = 0;
        for &i in &self.plus {
            s += x[i];
        }
        for &i in &self.minus {
            s -= x[i];
        }
        if self.at_most {
            s <= self.bound * t
        } else {
            s >= self.bound * t
        }
    }
}

fn edge_index(forest: &Forest) -> BTreeMap<EdgeId, usize> {
    forest.edge_ids().enumerate().map(|(i, e)| (e, i)).collect()
}

fn check_dimension(forest: &Forest, max_dim: usize) -> Result<(), VolumeError> {
    if forest.edge_count() > max_dim {
        return Err(VolumeError::DimensionExceedsBound {
            edges: forest.edge_count(),
            bound: max_dim,
        });
    }
    Ok(())
}

/// All odd-cardinality subsets of `items`.
fn odd_subsets(items: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << items.len()) {
        if mask.count_ones() % 2 == 1 {
            out.push(
                items
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect(),
            );
        }
    }
    out
}

fn parity_facets(forest: &Forest, index: &BTreeMap<EdgeId, usize>) -> Vec<LinearCut> {
    let mut cuts = Vec::new();
    for v in forest.inner_vertices() {
        let around: Vec<usize> = forest.incident_edges(v).map(|(e, _)| index[&e]).collect();
        for subset in odd_subsets(&around) {
            let plus: Vec<usize> = around
                .iter()
                .copied()
                .filter(|i| !subset.contains(i))
                .collect();
            cuts.push(LinearCut {
                plus,
                bound: 1 - subset.len() as i64,
                minus: subset,
                at_most: false,
            });
        }
    }
    cuts
}

/// Counts `{0..t}^n` points admitted by every cut, scanning odometer-style
/// with the first coordinate partitioned across workers.
fn count_scan(dimension: usize, t: i64, cuts: &[LinearCut]) -> u64 {
    debug_assert!(t >= 0);
    if dimension == 0 {
        return u64::from(cuts.iter().all(|c| c.admits(&[], t)));
    }
    let per_first = |first: i64| -> u64 {
        let mut x = vec![0i64; dimension];
        x[0] = first;
        let mut count = 0u64;
        loop {
            if cuts.iter().all(|c| c.admits(&x, t)) {
                count += 1;
            }
            // odometer over coordinates 1..
            let mut k = 1;
            loop {
                if k >= dimension {
                    return count;
                }
                if x[k] < t {
                    x[k] += 1;
                    break;
                }
                x[k] = 0;
                k += 1;
            }
        }
    };

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..=t).into_par_iter().map(per_first).sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..=t).map(per_first).sum()
    }
}

/// Single-threaded variant of the same scan, kept for benchmarking the
/// parallel speedup.
fn count_scan_seq(dimension: usize, t: i64, cuts: &[LinearCut]) -> u64 {
    if dimension == 0 {
        return u64::from(cuts.iter().all(|c| c.admits(&[], t)));
    }
    let mut x = vec![0i64; dimension];
    let mut count = 0u64;
    loop {
        if cuts.iter().all(|c| c.admits(&x, t)) {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k >= dimension {
                return count;
            }
            if x[k] < t {
                x[k] += 1;
                break;
            }
            x[k] = 0;
            k += 1;
        }
    }
}

/// Lattice points of the `t`-dilated parity polytope: `0 <= x_e <= t` with
/// `S_{v,A}(x) >= (1-|A|) t` for every inner vertex and odd subset `A`.
pub fn count_points_p(forest: &Forest, t: u32, max_dim: usize) -> Result<u64, VolumeError> {
    check_dimension(forest, max_dim)?;
    let index = edge_index(forest);
    let cuts = parity_facets(forest, &index);
    Ok(count_scan(forest.edge_count(), i64::from(t), &cuts))
}

/// Same count on a single thread.
pub fn count_points_p_seq(forest: &Forest, t: u32, max_dim: usize) -> Result<u64, VolumeError> {
    check_dimension(forest, max_dim)?;
    let index = edge_index(forest);
    let cuts = parity_facets(forest, &index);
    Ok(count_scan_seq(forest.edge_count(), i64::from(t), &cuts))
}

/// Lattice points of the `t`-dilated cut cube: `0 <= x_e <= t` with the
/// edge sums around inner vertices at most `t`.
pub fn count_points_q(forest: &Forest, t: u32, max_dim: usize) -> Result<u64, VolumeError> {
    check_dimension(forest, max_dim)?;
    let index = edge_index(forest);
    let cuts: Vec<LinearCut> = forest
        .inner_vertices()
        .into_iter()
        .map(|v| LinearCut {
            plus: forest.incident_edges(v).map(|(e, _)| index[&e]).collect(),
            minus: Vec::new(),
            bound: 1,
            at_most: true,
        })
        .collect();
    Ok(count_scan(forest.edge_count(), i64::from(t), &cuts))
}

/// An assignment of one odd edge subset `A_v` of the neighborhood to some of
/// the inner vertices, defining the region cut off below the corresponding
/// hyperplanes.
#[derive(Clone, Debug, Default)]
pub struct CutSpec {
    assignments: BTreeMap<VertexId, BTreeSet<EdgeId>>,
}

impl CutSpec {
    pub fn new() -> Self {
        CutSpec::default()
    }

    /// Assigns `subset` to the inner vertex `v`; it must be an odd-size
    /// subset of the edges at `v`, at most one per vertex.
    pub fn assign(
        &mut self,
        forest: &Forest,
        v: VertexId,
        subset: BTreeSet<EdgeId>,
    ) -> Result<(), VolumeError> {
        if !forest.is_inner(v) {
            return Err(crate::ForestError::NotInnerVertex(v).into());
        }
        if subset.len().is_multiple_of(2) {
            return Err(VolumeError::Inconsistency(format!(
                "cut subset at {v} must have odd size, got {}",
                subset.len()
            )));
        }
        let around: BTreeSet<EdgeId> = forest.incident_edges(v).map(|(e, _)| e).collect();
        if !subset.is_subset(&around) {
            return Err(VolumeError::Inconsistency(format!(
                "cut subset at {v} contains a non-incident edge"
            )));
        }
        if self.assignments.insert(v, subset).is_some() {
            return Err(VolumeError::Inconsistency(format!("{v} assigned twice")));
        }
        Ok(())
    }

    pub fn assignments(&self) -> &BTreeMap<VertexId, BTreeSet<EdgeId>> {
        &self.assignments
    }

    /// The inner edges lying in exactly one of the two subsets its endpoints
    /// were assigned; contracting them identifies the cut region with a cut
    /// cube times a smaller cube.
    pub fn contractible_edges(&self, forest: &Forest) -> BTreeSet<EdgeId> {
        forest
            .edge_ids()
            .filter(|&e| {
                let (u, v) = forest.endpoints(e).unwrap();
                match (self.assignments.get(&u), self.assignments.get(&v)) {
                    (Some(a), Some(b)) => a.contains(&e) != b.contains(&e),
                    _ => false,
                }
            })
            .collect()
    }
}

/// Lattice points of the dilated cut region: the box `0 <= x_e <= t`
/// intersected with `S_{v,A_v}(x) <= (1-|A_v|) t` for every assigned vertex.
pub fn count_points_cut(
    forest: &Forest,
    cut: &CutSpec,
    t: u32,
    max_dim: usize,
) -> Result<u64, VolumeError> {
    check_dimension(forest, max_dim)?;
    let index = edge_index(forest);
    let cuts: Vec<LinearCut> = cut
        .assignments
        .iter()
        .map(|(&v, subset)| {
            let around: Vec<usize> = forest.incident_edges(v).map(|(e, _)| index[&e]).collect();
            let minus: Vec<usize> = subset.iter().map(|e| index[e]).collect();
            LinearCut {
                plus: around.into_iter().filter(|i| !minus.contains(i)).collect(),
                bound: 1 - minus.len() as i64,
                minus,
                at_most: true,
            }
        })
        .collect();
    Ok(count_scan(forest.edge_count(), i64::from(t), &cuts))
}

/// The 0/1 points with even edge sums around every inner vertex — exactly
/// the vertices of the parity polytope, `2^(|E| - |I|)` of them.
pub fn enumerate_vertices_p(forest: &Forest, max_dim: usize) -> Result<Vec<Vec<u8>>, VolumeError> {
    check_dimension(forest, max_dim)?;
    let index = edge_index(forest);
    let around: Vec<Vec<usize>> = forest
        .inner_vertices()
        .into_iter()
        .map(|v| forest.incident_edges(v).map(|(e, _)| index[&e]).collect())
        .collect();
    let n = forest.edge_count();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let x: Vec<u8> = (0..n).map(|i| (mask >> i & 1) as u8).collect();
        let even = around
            .iter()
            .all(|edges| edges.iter().map(|&i| u32::from(x[i])).sum::<u32>() % 2 == 0);
        if even {
            out.push(x);
        }
    }
    Ok(out)
}

/// Interpolates dilation counts and extracts the standard lattice volume:
/// `n!` times the coefficient of `t^n`, which must be a nonnegative integer
/// (zero for degenerate polytopes) — anything else is a counting bug.
pub fn oracle_lattice_volume(
    counts: &[(i64, BigInt)],
    dimension: usize,
) -> Result<(UnivariatePolynomial, BigInt), VolumeError> {
    if counts.len() < dimension + 1 {
        return Err(VolumeError::InsufficientSamples {
            have: counts.len(),
            need: dimension + 1,
        });
    }
    let polynomial = lagrange_interpolate(counts)?;
    if polynomial.degree().is_some_and(|d| d > dimension) {
        return Err(VolumeError::Inconsistency(format!(
            "counting function has degree {} in dimension {dimension}",
            polynomial.degree().unwrap()
        )));
    }
    let scaled = &polynomial.coefficient(dimension) * &Rational::from_integer(factorial(dimension));
    let volume = scaled.to_integer().ok_or_else(|| {
        VolumeError::Inconsistency(format!("leading term times {dimension}! is not an integer"))
    })?;
    if volume.is_negative() {
        return Err(VolumeError::Inconsistency(format!(
            "negative lattice volume {volume}"
        )));
    }
    Ok((polynomial, volume))
}

/// Counts of the dilated parity polytope at `t = 0..=|E|`, ready for
/// [`oracle_lattice_volume`].
pub fn ehrhart_samples_p(
    forest: &Forest,
    max_dim: usize,
) -> Result<Vec<(i64, BigInt)>, VolumeError> {
    (0..=forest.edge_count() as u32)
        .map(|t| {
            Ok((
                i64::from(t),
                BigInt::from(count_points_p(forest, t, max_dim)?),
            ))
        })
        .collect()
}

/// Counts of the dilated cut cube at `t = 0..=|E|`.
pub fn ehrhart_samples_q(
    forest: &Forest,
    max_dim: usize,
) -> Result<Vec<(i64, BigInt)>, VolumeError> {
    (0..=forest.edge_count() as u32)
        .map(|t| {
            Ok((
                i64::from(t),
                BigInt::from(count_points_q(forest, t, max_dim)?),
            ))
        })
        .collect()
}
