//! Bit-packed GF(2) row reduction.

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitRow {
    words: Vec<u64>,
}

impl BitRow {
    pub fn zeros(bits: usize) -> BitRow {
        BitRow { words: vec![0; bits.div_ceil(64)] }
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn xor_assign(&mut self, o: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&o.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }
}

/// Incremental echelon basis. Each stored row may carry a tag row recording
/// which inserted rows were combined to produce it.
#[derive(Clone, Debug)]
pub struct Basis {
    cols: usize,
    tags: usize,
    pivots: Vec<Option<usize>>,
    rows: Vec<(BitRow, BitRow)>,
}

impl Basis {
    pub fn new(cols: usize, tags: usize) -> Basis {
        Basis { cols, tags, pivots: vec![None; cols], rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn reduce(&self, mut v: BitRow, mut tag: BitRow) -> (BitRow, BitRow) {
        while let Some(c) = v.first_one() {
            match self.pivots[c] {
                Some(r) => {
                    v.xor_assign(&self.rows[r].0);
                    tag.xor_assign(&self.rows[r].1);
                }
                None => break,
            }
        }
        (v, tag)
    }

    /// Inserts `v` with tag bit `tag_bit`; returns true when the rank grew.
    pub fn insert(&mut self, v: BitRow, tag_bit: Option<usize>) -> bool {
        let mut tag = BitRow::zeros(self.tags);
        if let Some(t) = tag_bit {
            tag.set(t);
        }
        let (v, tag) = self.reduce(v, tag);
        match v.first_one() {
            Some(c) => {
                self.pivots[c] = Some(self.rows.len());
                self.rows.push((v, tag));
                true
            }
            None => false,
        }
    }

    /// Returns the tag combination producing `v`, if `v` is in the span.
    pub fn express(&self, v: &BitRow) -> Option<BitRow> {
        let (rest, tag) = self.reduce(v.clone(), BitRow::zeros(self.tags));
        rest.is_zero().then_some(tag)
    }

    pub fn contains(&self, v: &BitRow) -> bool {
        self.reduce(v.clone(), BitRow::zeros(0)).0.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(bits: usize, ones: &[usize]) -> BitRow {
        let mut r = BitRow::zeros(bits);
        for &i in ones {
            r.set(i);
        }
        r
    }

    #[test]
    fn span_basics() {
        let mut b = Basis::new(130, 3);
        assert!(b.insert(row(130, &[0, 129]), Some(0)));
        assert!(b.insert(row(130, &[129]), Some(1)));
        assert!(!b.insert(row(130, &[0]), Some(2)));
        assert_eq!(b.rank(), 2);
        let t = b.express(&row(130, &[0])).unwrap();
        assert_eq!(t.ones().collect::<Vec<_>>(), vec![0, 1]);
        assert!(!b.contains(&row(130, &[64])));
    }

    proptest! {
        #[test]
        fn express_reconstructs(rows in prop::collection::vec(prop::collection::vec(0usize..70, 0..6), 1..12),
                                pick in prop::collection::vec(any::<bool>(), 12)) {
            let rs: Vec<BitRow> = rows.iter().map(|o| row(70, o)).collect();
            let mut b = Basis::new(70, rs.len());
            for (i, r) in rs.iter().enumerate() {
                b.insert(r.clone(), Some(i));
            }
            let mut target = BitRow::zeros(70);
            for (i, r) in rs.iter().enumerate() {
                if pick[i] {
                    target.xor_assign(r);
                }
            }
            let tag = b.express(&target).expect("combination of inserted rows");
            let mut back = BitRow::zeros(70);
            for i in tag.ones() {
                back.xor_assign(&rs[i]);
            }
            prop_assert_eq!(back, target);
        }
    }
}
