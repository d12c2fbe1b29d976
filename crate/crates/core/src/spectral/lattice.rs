use std::fmt;
use std::sync::Arc;

/// Which lattice points inside the box `{-m..m}^n` carry coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TruncationShape {
    /// Euclidean ball `|xi| <= m`.
    Ball,
    /// Full box `max_i |xi_i| <= m`. Only used for FFT padding.
    Box,
}

/// Truncated integer frequency lattice.
///
/// Storage is the full box `{-m..m}^n` in lexicographic order with the first
/// axis varying slowest. Slots outside the truncation shape are kept (so that
/// negation stays an index reversal) but flagged absent and always hold zero.
#[derive(Clone)]
pub struct FrequencyLattice {
    n: usize,
    m: usize,
    shape: TruncationShape,
    modes: Arc<[i32]>,
    norm_sq: Arc<[i64]>,
    present: Arc<[bool]>,
}

impl FrequencyLattice {
    pub fn new(n: usize, m: usize) -> Self {
        Self::with_shape(n, m, TruncationShape::Ball)
    }

    pub fn with_shape(n: usize, m: usize, shape: TruncationShape) -> Self {
        assert!(n >= 1, "lattice dimension must be at least 1");
        let side = 2 * m + 1;
        let len = side.pow(n as u32);
        let mut modes = Vec::with_capacity(len * n);
        let mut norm_sq = Vec::with_capacity(len);
        let mut present = Vec::with_capacity(len);
        let mut xi = vec![-(m as i32); n];
        for _ in 0..len {
            let q: i64 = xi.iter().map(|&c| (c as i64) * (c as i64)).sum();
            modes.extend_from_slice(&xi);
            norm_sq.push(q);
            present.push(match shape {
                TruncationShape::Ball => q <= (m * m) as i64,
                TruncationShape::Box => true,
            });
            // odometer increment, last axis fastest
            for axis in (0..n).rev() {
                if xi[axis] < m as i32 {
                    xi[axis] += 1;
                    break;
                }
                xi[axis] = -(m as i32);
            }
        }
        Self {
            n,
            m,
            shape,
            modes: modes.into(),
            norm_sq: norm_sq.into(),
            present: present.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> usize {
        self.m
    }

    pub fn shape(&self) -> TruncationShape {
        self.shape
    }

    pub fn side(&self) -> usize {
        2 * self.m + 1
    }

    /// Number of stored slots (box size).
    pub fn len(&self) -> usize {
        self.norm_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norm_sq.is_empty()
    }

    pub fn mode(&self, slot: usize) -> &[i32] {
        &self.modes[slot * self.n..(slot + 1) * self.n]
    }

    pub fn norm_sq(&self, slot: usize) -> i64 {
        self.norm_sq[slot]
    }

    pub fn is_present(&self, slot: usize) -> bool {
        self.present[slot]
    }

    /// Slot of `-xi` given the slot of `xi`.
    #[inline]
    pub fn negate(&self, slot: usize) -> usize {
        self.len() - 1 - slot
    }

    pub fn zero_slot(&self) -> usize {
        (self.len() - 1) / 2
    }

    /// Box slot of `xi`, or `None` if it lies outside `{-m..m}^n`.
    pub fn slot_of(&self, xi: &[i32]) -> Option<usize> {
        if xi.len() != self.n {
            return None;
        }
        let m = self.m as i32;
        let side = self.side();
        let mut slot = 0usize;
        for &c in xi {
            if c < -m || c > m {
                return None;
            }
            slot = slot * side + (c + m) as usize;
        }
        Some(slot)
    }

    /// Slot of `xi` if it is a stored (present) mode.
    pub fn present_slot(&self, xi: &[i32]) -> Option<usize> {
        self.slot_of(xi).filter(|&s| self.present[s])
    }

    pub fn present_slots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&s| self.present[s])
    }

    /// Number of present modes other than `xi = 0`.
    pub fn nonzero_mode_count(&self) -> usize {
        self.present_slots().count() - 1
    }
}

impl PartialEq for FrequencyLattice {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.m == other.m && self.shape == other.shape
    }
}

impl Eq for FrequencyLattice {}

impl fmt::Debug for FrequencyLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FrequencyLattice(n={}, m={}, {:?})", self.n, self.m, self.shape)
    }
}

impl fmt::Display for FrequencyLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} m={} {:?}", self.n, self.m, self.shape)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_present_once_and_negation_closed() {
        for (n, m) in [(1, 3), (2, 2), (3, 2)] {
            let lat = FrequencyLattice::new(n, m);
            let zeros = lat.present_slots().filter(|&s| lat.norm_sq(s) == 0).count();
            assert_eq!(zeros, 1);
            assert_eq!(lat.mode(lat.zero_slot()), vec![0; n].as_slice());
            for s in 0..lat.len() {
                let neg: Vec<i32> = lat.mode(s).iter().map(|c| -c).collect();
                assert_eq!(lat.slot_of(&neg), Some(lat.negate(s)));
                assert_eq!(lat.is_present(s), lat.is_present(lat.negate(s)));
            }
        }
    }

    #[test]
    fn slot_lookup_is_bijective() {
        let lat = FrequencyLattice::new(3, 2);
        for s in 0..lat.len() {
            assert_eq!(lat.slot_of(lat.mode(s)), Some(s));
        }
        assert_eq!(lat.slot_of(&[3, 0, 0]), None);
    }

    #[test]
    fn ball_masks_corners() {
        let lat = FrequencyLattice::new(2, 1);
        // (±1, ±1) lies outside the unit ball
        assert_eq!(lat.present_slots().count(), 5);
        assert_eq!(lat.nonzero_mode_count(), 4);
        let boxed = FrequencyLattice::with_shape(2, 1, TruncationShape::Box);
        assert_eq!(boxed.present_slots().count(), 9);
    }
}
