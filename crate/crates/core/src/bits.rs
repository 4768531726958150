//! Packed bit vectors for synaptic connection rows and per-tick spike rows.

/// Fixed-length bit vector packed into `u64` words.
///
/// Bits past `len` are kept zero so word-level operations (masking,
/// popcount, equality) never see stray state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitRow {
    len: usize,
    words: Vec<u64>,
}

/// Number of `u64` words needed to hold `bits` bits.
pub const fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut row = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                row.set(i);
            }
        }
        row
    }

    pub fn from_words(len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        let mut row = Self { len, words };
        row.mask_tail();
        row
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range 0..{}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range 0..{}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn clear_all(&mut self) {
        self.words.fill(0);
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_all_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of set bits in ascending order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + bit)
            })
        })
    }

    fn mask_tail(&mut self) {
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_roundtrip() {
        let mut row = BitRow::zeros(70);
        row.set(0);
        row.set(63);
        row.set(64);
        row.set(69);
        assert!(row.get(0) && row.get(63) && row.get(64) && row.get(69));
        assert!(!row.get(1) && !row.get(65));
        assert_eq!(row.count_ones(), 4);
        assert_eq!(row.iter_ones().collect::<Vec<_>>(), vec![0, 63, 64, 69]);
    }

    #[test]
    fn from_words_masks_tail_bits() {
        let row = BitRow::from_words(3, vec![u64::MAX]);
        assert_eq!(row.count_ones(), 3);
        assert_eq!(row, BitRow::from_bools(&[true, true, true]));
    }

    #[test]
    fn clear_all_zeroes_everything() {
        let mut row = BitRow::from_bools(&[true, false, true]);
        row.clear_all();
        assert!(row.is_all_zero());
    }
}
