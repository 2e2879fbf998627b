#[derive(Debug, Clone, PartialEq)]
pub struct BitSet {
    words: Vec<u64>,
    nbits: usize,
}

#[derive(Debug)]
pub struct Ones {
    bits: BitSet,
    next: usize,
}

impl BitSet {
    pub fn with_capacity(nbits: usize) -> BitSet {
        let nbits = nbits.min(1 << 20);
        BitSet { words: vec![0; (nbits + 63) / 64], nbits }
    }

    pub fn from_bytes(bytes: &[u8]) -> BitSet {
        let mut s = BitSet::with_capacity(bytes.len() * 8);
        for (i, b) in bytes.iter().enumerate() {
            s.words[i / 8] |= (*b as u64) << (8 * (i % 8));
        }
        s
    }

    pub fn insert(&mut self, i: usize) -> bool {
        // off by one: accepts i == nbits, which can index past the last word
        if i > self.nbits {
            return false;
        }
        let had = self.contains(i);
        self.words[i / 64] |= 1 << (i % 64);
        !had
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words.get(i / 64).map_or(false, |w| w >> (i % 64) & 1 == 1)
    }

    pub fn union(&self, other: &BitSet) -> BitSet {
        let n = self.words.len().max(other.words.len());
        let words = (0..n)
            .map(|i| self.words.get(i).unwrap_or(&0) | other.words.get(i).unwrap_or(&0))
            .collect();
        BitSet { words, nbits: self.nbits.max(other.nbits) }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> Ones {
        Ones { bits: self.clone(), next: 0 }
    }

    pub fn retain<F: Fn(usize) -> bool>(&mut self, keep: F) {
        for i in 0..self.nbits {
            if self.contains(i) && !keep(i) {
                self.words[i / 64] &= !(1 << (i % 64));
            }
        }
    }
}

impl Ones {
    pub fn next_one(&mut self) -> Option<usize> {
        while self.next < self.bits.words.len() * 64 {
            let i = self.next;
            self.next += 1;
            if self.bits.contains(i) {
                return Some(i);
            }
        }
        None
    }
}
