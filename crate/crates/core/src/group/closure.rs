//! Enumeration of finite matrix groups from generators.
//!
//! Generators whose entries are all small-denominator rationals are closed
//! in exact rational arithmetic. Anything else falls back to floating-point
//! closure with entrywise deduplication at [`DEDUP_TOL`].

use std::collections::{HashMap, HashSet, VecDeque};

use nalgebra::DMatrix;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, One, Zero};

use super::{orthogonality_defect, GroupElement, GroupHandle, ORTHOGONALITY_TOL};
use crate::error::{Error, Result};

pub const DEFAULT_ORDER_CAP: usize = 100_000;

/// Max-norm distance below which two floating elements are identified.
pub const DEDUP_TOL: f64 = 1e-9;

const MAX_DENOMINATOR: i64 = 4096;
const KEY_SCALE: f64 = 1e6;

type Q = Ratio<i64>;

pub(crate) fn enumerate(generators: &[DMatrix<f64>], cap: usize) -> Result<Vec<GroupElement>> {
    let exact: Option<Vec<Vec<Q>>> = generators.iter().map(to_rational).collect();
    match exact {
        Some(gens) => {
            let n = generators[0].nrows();
            for (index, g) in gens.iter().enumerate() {
                if !rational_orthogonal(g, n) {
                    return Err(Error::NonOrthogonalGenerator {
                        index,
                        deviation: orthogonality_defect(&generators[index]),
                    });
                }
            }
            exact_closure(&gens, n, cap)
        }
        None => {
            for (index, g) in generators.iter().enumerate() {
                let deviation = orthogonality_defect(g);
                if deviation > ORTHOGONALITY_TOL {
                    return Err(Error::NonOrthogonalGenerator { index, deviation });
                }
            }
            float_closure(generators, cap)
        }
    }
}

/// Every combination of factor elements, as block-diagonal matrices.
pub(crate) fn block_product(factors: &[GroupHandle], cap: usize) -> Result<Vec<GroupElement>> {
    let mut total: usize = 1;
    for f in factors {
        total = total.saturating_mul(f.order().unwrap_or(usize::MAX));
    }
    if total > cap {
        return Err(Error::GroupTooLarge { cap });
    }
    let mut acc: Vec<Vec<DMatrix<f64>>> = vec![Vec::new()];
    for f in factors {
        let elems = f.elements().expect("finite factor");
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                elems.iter().map(move |e| {
                    let mut next = prefix.clone();
                    next.push(e.matrix().clone());
                    next
                })
            })
            .collect();
    }
    Ok(acc
        .iter()
        .map(|blocks| GroupElement::from_matrix_unchecked(super::block_diag(blocks)))
        .collect())
}

fn to_rational(m: &DMatrix<f64>) -> Option<Vec<Q>> {
    m.transpose().iter().map(|&x| rational_approx(x)).collect()
}

/// The rational p/q (q ≤ 4096) whose double is exactly `x`, if any.
fn rational_approx(x: f64) -> Option<Q> {
    if !x.is_finite() || x.abs() > 1e6 {
        return None;
    }
    (1..=MAX_DENOMINATOR).find_map(|q| {
        let p = (x * q as f64).round();
        (p / q as f64 == x).then(|| Q::new(p as i64, q))
    })
}

fn rational_orthogonal(m: &[Q], n: usize) -> bool {
    (0..n).all(|i| {
        (0..n).all(|j| {
            let mut s = Q::zero();
            for k in 0..n {
                s += m[k * n + i] * m[k * n + j];
            }
            s == if i == j { Q::one() } else { Q::zero() }
        })
    })
}

/// Row-major product; `None` on overflow, which only happens for infinite groups.
fn rational_mul(a: &[Q], b: &[Q], n: usize) -> Option<Vec<Q>> {
    let mut out = vec![Q::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = Q::zero();
            for k in 0..n {
                s = s.checked_add(&a[i * n + k].checked_mul(&b[k * n + j])?)?;
            }
            out[i * n + j] = s;
        }
    }
    Some(out)
}

fn exact_closure(gens: &[Vec<Q>], n: usize, cap: usize) -> Result<Vec<GroupElement>> {
    let identity: Vec<Q> = (0..n * n)
        .map(|idx| if idx / n == idx % n { Q::one() } else { Q::zero() })
        .collect();
    let mut seen: HashSet<Vec<Q>> = HashSet::new();
    let mut order = vec![identity.clone()];
    seen.insert(identity.clone());
    let mut queue = VecDeque::from([identity]);
    while let Some(e) = queue.pop_front() {
        for g in gens {
            let next = rational_mul(g, &e, n).ok_or(Error::GroupTooLarge { cap })?;
            if seen.insert(next.clone()) {
                if seen.len() > cap {
                    return Err(Error::GroupTooLarge { cap });
                }
                order.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(order
        .iter()
        .map(|m| {
            GroupElement::from_matrix_unchecked(DMatrix::from_row_iterator(
                n,
                n,
                m.iter().map(|q| *q.numer() as f64 / *q.denom() as f64),
            ))
        })
        .collect())
}

struct FloatSet {
    elements: Vec<DMatrix<f64>>,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

impl FloatSet {
    fn new() -> Self {
        FloatSet { elements: Vec::new(), buckets: HashMap::new() }
    }

    fn key(m: &DMatrix<f64>) -> (Vec<i64>, bool) {
        let mut near_edge = false;
        let key = m
            .iter()
            .map(|&v| {
                let s = v * KEY_SCALE;
                // a twin within DEDUP_TOL can only land in another bucket near a rounding edge
                if (s - s.floor() - 0.5).abs() < 2.0 * DEDUP_TOL * KEY_SCALE {
                    near_edge = true;
                }
                s.round() as i64
            })
            .collect();
        (key, near_edge)
    }

    fn contains(&self, m: &DMatrix<f64>) -> bool {
        let close = |other: &DMatrix<f64>| (m - other).amax() <= DEDUP_TOL;
        let (key, near_edge) = Self::key(m);
        if near_edge {
            return self.elements.iter().any(close);
        }
        self.buckets
            .get(&key)
            .is_some_and(|idx| idx.iter().any(|&i| close(&self.elements[i])))
    }

    fn insert(&mut self, m: DMatrix<f64>) -> bool {
        if self.contains(&m) {
            return false;
        }
        let (key, _) = Self::key(&m);
        self.buckets.entry(key).or_default().push(self.elements.len());
        self.elements.push(m);
        true
    }
}

fn float_closure(gens: &[DMatrix<f64>], cap: usize) -> Result<Vec<GroupElement>> {
    let n = gens[0].nrows();
    let mut set = FloatSet::new();
    let identity = DMatrix::<f64>::identity(n, n);
    set.insert(identity.clone());
    let mut queue = VecDeque::from([identity]);
    while let Some(e) = queue.pop_front() {
        for g in gens {
            let next = g * &e;
            if set.insert(next.clone()) {
                if set.elements.len() > cap {
                    return Err(Error::GroupTooLarge { cap });
                }
                queue.push_back(next);
            }
        }
    }
    Ok(set.elements.into_iter().map(GroupElement::from_matrix_unchecked).collect())
}
