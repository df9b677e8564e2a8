use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rustc_hash::FxHashSet;

use super::{ResidueMat, ResidueRing, VerifyError};

/// Default bound on the number of stored group elements.
pub const DEFAULT_CLOSURE_CAP: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Surjectivity {
    Yes,
    No,
    /// The element cap was reached first.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureResult {
    /// Exact order, or a lower bound when `surjective` is `Unknown`.
    pub subgroup_order: u64,
    pub ambient_order: BigInt,
    /// `None` when the closure was cut off.
    pub index: Option<BigInt>,
    pub surjective: Surjectivity,
    pub frontier_peak: usize,
    pub elements_visited: u64,
}

impl ClosureResult {
    /// `index * subgroup_order = ambient_order` when the run completed.
    pub fn lagrange_holds(&self) -> bool {
        match &self.index {
            Some(i) => i * BigInt::from(self.subgroup_order) == self.ambient_order,
            None => self.surjective == Surjectivity::Unknown,
        }
    }
}

/// A subgroup of `SL(n, R)` listed by canonical encodings.
pub struct GeneratedGroup {
    pub result: ClosureResult,
    pub elements: FxHashSet<Box<[u8]>>,
    width: usize,
    /// True when the listing stopped because more than half the ambient
    /// group was reached (the subgroup is then everything).
    pub stopped_early: bool,
}

impl GeneratedGroup {
    pub fn contains(&self, m: &ResidueMat) -> bool {
        self.elements.contains(m.encode(self.width).as_slice())
    }
}

/// Breadth-first closure under right multiplication by the generators and
/// their inverses. When the ambient group is larger than `cap`, listing
/// also stops once more than half of it is reached, since a subgroup that
/// large is the whole group.
pub fn closure_elements(
    gens: &[ResidueMat],
    ring: &ResidueRing,
    ambient_order: &BigInt,
    cap: usize,
) -> Result<GeneratedGroup, VerifyError> {
    let n = gens.first().map_or(1, |g| g.n);
    let mut steps = Vec::with_capacity(2 * gens.len());
    for g in gens {
        if g.n != n {
            return Err(VerifyError::NotSpecial);
        }
        let gi = g.inverse_special(ring)?;
        steps.push(g.clone());
        if gi != *g {
            steps.push(gi);
        }
    }
    let width = ring.limb_width();
    let half = ambient_order / 2u32;
    let may_stop_early = *ambient_order > BigInt::from(cap);
    let id = ResidueMat::identity(n);
    let mut seen: FxHashSet<Box<[u8]>> = FxHashSet::default();
    seen.insert(id.encode(width).into_boxed_slice());
    let mut queue = VecDeque::from([id]);
    let mut frontier_peak = 1;
    let mut cut = false;
    let mut early = false;
    'bfs: while let Some(x) = queue.pop_front() {
        for s in &steps {
            let y = x.mul(s, ring);
            let key = y.encode(width).into_boxed_slice();
            if seen.insert(key) {
                if may_stop_early && BigInt::from(seen.len()) > half {
                    early = true;
                    break 'bfs;
                }
                if seen.len() >= cap {
                    cut = true;
                    break 'bfs;
                }
                queue.push_back(y);
            }
        }
        frontier_peak = frontier_peak.max(queue.len());
    }
    let visited = seen.len() as u64;
    let result = if early {
        let order = ambient_order.to_u64().unwrap_or(u64::MAX);
        ClosureResult {
            subgroup_order: order,
            ambient_order: ambient_order.clone(),
            index: Some(BigInt::from(1)),
            surjective: Surjectivity::Yes,
            frontier_peak,
            elements_visited: visited,
        }
    } else if cut {
        ClosureResult {
            subgroup_order: visited,
            ambient_order: ambient_order.clone(),
            index: None,
            surjective: Surjectivity::Unknown,
            frontier_peak,
            elements_visited: visited,
        }
    } else {
        let order = BigInt::from(visited);
        if !(ambient_order % &order).is_zero() {
            return Err(VerifyError::Lagrange);
        }
        let index = ambient_order / &order;
        let surjective = if index == BigInt::from(1) { Surjectivity::Yes } else { Surjectivity::No };
        ClosureResult {
            subgroup_order: visited,
            ambient_order: ambient_order.clone(),
            index: Some(index),
            surjective,
            frontier_peak,
            elements_visited: visited,
        }
    };
    Ok(GeneratedGroup {
        result,
        elements: seen,
        width,
        stopped_early: early,
    })
}

pub fn closure(
    gens: &[ResidueMat],
    ring: &ResidueRing,
    ambient_order: &BigInt,
    cap: usize,
) -> Result<ClosureResult, VerifyError> {
    closure_elements(gens, ring, ambient_order, cap).map(|g| g.result)
}
