use super::{Instance, InstanceError};

/// A node's link to a facility. For `p = 1` the second-nearest slot holds
/// [`Assignment::NONE`] (infinite distance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assignment {
    pub facility: usize,
    pub distance: f64,
}

impl Assignment {
    pub const NONE: Assignment = Assignment {
        facility: usize::MAX,
        distance: f64::INFINITY,
    };

    pub fn is_none(&self) -> bool {
        self.facility == usize::MAX
    }

    /// Strict `(distance, facility id)` order; lower id wins ties.
    #[inline]
    fn precedes(&self, other: &Assignment) -> bool {
        self.distance < other.distance
            || (self.distance == other.distance && self.facility < other.facility)
    }
}

/// A facility set together with nearest and second-nearest facility per node.
///
/// The facility list is kept sorted ascending; cell indices elsewhere in the
/// crate refer to positions in this list.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    facilities: Vec<usize>,
    is_facility: Vec<bool>,
    nearest: Vec<Assignment>,
    second: Vec<Assignment>,
    objective: f64,
}

fn scan(row: &[f64], facilities: &[usize]) -> (Assignment, Assignment) {
    let mut best = Assignment::NONE;
    let mut next = Assignment::NONE;
    for &f in facilities {
        let cand = Assignment {
            facility: f,
            distance: row[f],
        };
        if cand.precedes(&best) {
            next = best;
            best = cand;
        } else if cand.precedes(&next) {
            next = cand;
        }
    }
    (best, next)
}

impl Solution {
    pub fn new(instance: &Instance, facilities: &[usize]) -> Result<Self, InstanceError> {
        let facilities = instance.validate_facilities(facilities)?;
        let n = instance.n();
        let mut is_facility = vec![false; n];
        for &f in &facilities {
            is_facility[f] = true;
        }
        let mut nearest = Vec::with_capacity(n);
        let mut second = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = scan(instance.dist().row(i), &facilities);
            nearest.push(a);
            second.push(b);
        }
        let mut sol = Solution {
            facilities,
            is_facility,
            nearest,
            second,
            objective: 0.0,
        };
        sol.objective = sol.sum_cost(instance);
        Ok(sol)
    }

    fn sum_cost(&self, instance: &Instance) -> f64 {
        instance
            .demand()
            .iter()
            .zip(&self.nearest)
            .map(|(w, a)| w * a.distance)
            .sum()
    }

    pub fn facilities(&self) -> &[usize] {
        &self.facilities
    }

    pub fn p(&self) -> usize {
        self.facilities.len()
    }

    pub fn is_facility(&self, node: usize) -> bool {
        self.is_facility[node]
    }

    pub fn facility_mask(&self) -> &[bool] {
        &self.is_facility
    }

    pub fn nearest(&self) -> &[Assignment] {
        &self.nearest
    }

    pub fn second_nearest(&self) -> &[Assignment] {
        &self.second
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }

    /// Position of `facility` in the sorted facility list.
    pub fn cell_index(&self, facility: usize) -> Option<usize> {
        self.facilities.binary_search(&facility).ok()
    }

    fn check_swap(&self, remove: usize, insert: usize) -> Result<(), InstanceError> {
        let n = self.is_facility.len();
        for node in [remove, insert] {
            if node >= n {
                return Err(InstanceError::NodeOutOfRange { node, n });
            }
        }
        if !self.is_facility[remove] {
            return Err(InstanceError::NotAFacility(remove));
        }
        if self.is_facility[insert] {
            return Err(InstanceError::AlreadyFacility(insert));
        }
        Ok(())
    }

    /// Objective change of replacing `remove` by `insert`, in one pass over the
    /// nodes using the nearest/second-nearest arrays.
    pub fn swap_delta(
        &self,
        instance: &Instance,
        remove: usize,
        insert: usize,
    ) -> Result<f64, InstanceError> {
        self.check_swap(remove, insert)?;
        Ok(self.swap_delta_unchecked(instance, remove, insert))
    }

    pub(crate) fn swap_delta_unchecked(
        &self,
        instance: &Instance,
        remove: usize,
        insert: usize,
    ) -> f64 {
        let to_insert = instance.dist().row(insert);
        let mut delta = 0.0;
        for (i, &w) in instance.demand().iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let near = &self.nearest[i];
            let kept = if near.facility == remove {
                self.second[i].distance
            } else {
                near.distance
            };
            let new = kept.min(to_insert[i]);
            delta += w * (new - near.distance);
        }
        delta
    }

    /// Replaces `remove` by `insert` in place and returns the objective change.
    /// Nearest/second-nearest entries are repaired so they equal a rebuild.
    pub fn apply_swap(
        &mut self,
        instance: &Instance,
        remove: usize,
        insert: usize,
    ) -> Result<f64, InstanceError> {
        self.check_swap(remove, insert)?;
        let before = self.objective;
        let pos = self
            .facilities
            .binary_search(&remove)
            .expect("facility list out of sync");
        self.facilities.remove(pos);
        let at = self.facilities.binary_search(&insert).unwrap_err();
        self.facilities.insert(at, insert);
        self.is_facility[remove] = false;
        self.is_facility[insert] = true;

        for i in 0..self.nearest.len() {
            let row = instance.dist().row(i);
            if self.nearest[i].facility == remove || self.second[i].facility == remove {
                let (a, b) = scan(row, &self.facilities);
                self.nearest[i] = a;
                self.second[i] = b;
                continue;
            }
            let cand = Assignment {
                facility: insert,
                distance: row[insert],
            };
            if cand.precedes(&self.nearest[i]) {
                self.second[i] = self.nearest[i];
                self.nearest[i] = cand;
            } else if cand.precedes(&self.second[i]) {
                self.second[i] = cand;
            }
        }
        self.objective = self.sum_cost(instance);
        Ok(self.objective - before)
    }

    /// Functional form of [`Solution::apply_swap`].
    pub fn swapped(
        &self,
        instance: &Instance,
        remove: usize,
        insert: usize,
    ) -> Result<Self, InstanceError> {
        let mut next = self.clone();
        next.apply_swap(instance, remove, insert)?;
        Ok(next)
    }

    /// Compares against a from-scratch rebuild; returns a description of the
    /// first mismatch.
    pub fn audit(&self, instance: &Instance) -> Result<(), String> {
        let fresh = Solution::new(instance, &self.facilities).map_err(|e| e.to_string())?;
        if fresh.facilities != self.facilities || fresh.is_facility != self.is_facility {
            return Err("facility bookkeeping differs from rebuild".into());
        }
        for i in 0..self.nearest.len() {
            if fresh.nearest[i] != self.nearest[i] {
                return Err(format!(
                    "nearest[{i}] = {:?}, rebuild {:?}",
                    self.nearest[i], fresh.nearest[i]
                ));
            }
            if fresh.second[i] != self.second[i] {
                return Err(format!(
                    "second[{i}] = {:?}, rebuild {:?}",
                    self.second[i], fresh.second[i]
                ));
            }
        }
        if !crate::approx_eq(fresh.objective, self.objective) {
            return Err(format!(
                "objective {} vs rebuild {}",
                self.objective, fresh.objective
            ));
        }
        Ok(())
    }
}
