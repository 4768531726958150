//! Per-core spike staging memory.
//!
//! A ring of `max_tick_offset` rows, one bit per axon. Row `curr` holds the
//! spikes the core consumes this tick; a delivery at offset `d` sets a bit
//! in row `(curr + d) % max_tick_offset`. Advancing wipes the consumed row
//! and moves `curr` forward, so a row is always clean by the time deliveries
//! can target it again.

use crate::bits::BitRow;
use crate::error::SimError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchedulerSram {
    rows: Vec<BitRow>,
    axons: usize,
    curr: usize,
}

impl SchedulerSram {
    pub fn new(max_tick_offset: u32, axons_per_core: u32) -> Self {
        assert!(max_tick_offset >= 1, "ring needs at least one row");
        Self {
            rows: (0..max_tick_offset)
                .map(|_| BitRow::zeros(axons_per_core as usize))
                .collect(),
            axons: axons_per_core as usize,
            curr: 0,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn curr_index(&self) -> usize {
        self.curr
    }

    /// Spike row consumed at the current tick.
    pub fn current_row(&self) -> &BitRow {
        &self.rows[self.curr]
    }

    /// Row at `offset` ticks ahead of the current one (0 = current).
    pub fn row_at_offset(&self, offset: u32) -> &BitRow {
        &self.rows[(self.curr + offset as usize) % self.rows.len()]
    }

    /// Stage a spike `tick_offset` ticks in the future. Setting a bit twice
    /// is a no-op, so concurrent deliveries to the same slot commute.
    pub fn deliver(&mut self, axon: u32, tick_offset: u32) -> Result<(), SimError> {
        if tick_offset == 0 || tick_offset as usize > self.rows.len() {
            return Err(SimError::TickOffsetOutOfRange {
                offset: tick_offset,
                max: self.rows.len() as u32,
            });
        }
        if axon as usize >= self.axons {
            return Err(SimError::AxonOutOfRange {
                axon,
                axons_per_core: self.axons as u32,
            });
        }
        let row = (self.curr + tick_offset as usize) % self.rows.len();
        self.rows[row].set(axon as usize);
        Ok(())
    }

    /// End-of-tick maintenance: wipe the row just consumed, then step the
    /// ring pointer. Must run exactly once per tick, after the neuron phase.
    pub fn clear_current_and_advance(&mut self) {
        self.rows[self.curr].clear_all();
        self.curr = (self.curr + 1) % self.rows.len();
    }

    /// True when every row in the ring is empty.
    pub fn is_all_clear(&self) -> bool {
        self.rows.iter().all(BitRow::is_all_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_row_ring_pointer_walk() {
        let mut s = SchedulerSram::new(2, 4);
        assert_eq!(s.curr_index(), 0);
        s.clear_current_and_advance();
        assert_eq!(s.curr_index(), 1);
        s.clear_current_and_advance();
        assert_eq!(s.curr_index(), 0);
    }

    #[test]
    fn delivery_lands_at_offset_rows_ahead() {
        let mut s = SchedulerSram::new(4, 8);
        s.deliver(3, 2).unwrap();
        assert!(!s.current_row().get(3));
        s.clear_current_and_advance();
        assert!(!s.current_row().get(3));
        s.clear_current_and_advance();
        assert!(s.current_row().get(3));
    }

    #[test]
    fn consumed_row_is_wiped_before_reuse() {
        let mut s = SchedulerSram::new(2, 4);
        s.deliver(0, 1).unwrap();
        s.clear_current_and_advance();
        assert!(s.current_row().get(0));
        s.clear_current_and_advance();
        // Back at the row that held the spike: it must be clean.
        assert!(!s.current_row().get(0));
        assert!(s.is_all_clear());
    }

    #[test]
    fn deliver_rejects_out_of_range_arguments() {
        let mut s = SchedulerSram::new(4, 8);
        assert!(matches!(
            s.deliver(0, 0),
            Err(SimError::TickOffsetOutOfRange { offset: 0, max: 4 })
        ));
        assert!(matches!(
            s.deliver(0, 5),
            Err(SimError::TickOffsetOutOfRange { offset: 5, max: 4 })
        ));
        assert!(matches!(
            s.deliver(8, 1),
            Err(SimError::AxonOutOfRange {
                axon: 8,
                axons_per_core: 8
            })
        ));
    }

    proptest! {
        /// A spike staged at offset d is invisible for d-1 advances and
        /// visible on the d-th, for any point in the ring's rotation.
        #[test]
        fn spike_becomes_visible_after_exactly_offset_advances(
            rows in 1u32..=16,
            pre_advances in 0u32..48,
            axon in 0u32..32,
            offset_seed in 1u32..=16,
        ) {
            let offset = (offset_seed - 1) % rows + 1;
            let mut s = SchedulerSram::new(rows, 32);
            for _ in 0..pre_advances {
                s.clear_current_and_advance();
            }
            s.deliver(axon, offset).unwrap();
            for _ in 1..offset {
                s.clear_current_and_advance();
                prop_assert!(!s.current_row().get(axon as usize));
            }
            s.clear_current_and_advance();
            // offset == rows lands on the row wiped by that same advance;
            // every shorter offset survives.
            prop_assert_eq!(s.current_row().get(axon as usize), offset < rows);
        }

        /// Delivery order never changes the resulting ring contents.
        #[test]
        fn deliveries_commute(
            mut deliveries in prop::collection::vec((0u32..16, 1u32..=4), 0..24),
        ) {
            let mut a = SchedulerSram::new(4, 16);
            for &(axon, off) in &deliveries {
                a.deliver(axon, off).unwrap();
            }
            deliveries.reverse();
            let mut b = SchedulerSram::new(4, 16);
            for &(axon, off) in &deliveries {
                b.deliver(axon, off).unwrap();
            }
            prop_assert_eq!(a, b);
        }

        /// After consuming every staged spike the ring is all zeros again.
        #[test]
        fn ring_drains_to_all_clear(
            deliveries in prop::collection::vec((0u32..16, 1u32..=8), 0..32),
        ) {
            let mut s = SchedulerSram::new(8, 16);
            for &(axon, off) in &deliveries {
                s.deliver(axon, off).unwrap();
            }
            for _ in 0..8 {
                s.clear_current_and_advance();
            }
            prop_assert!(s.is_all_clear());
        }
    }
}
