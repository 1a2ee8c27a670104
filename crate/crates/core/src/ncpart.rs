//! Noncrossing partitions of `{1..n}` and star-words.
//!
//! A [`Partition`] stores one block label per element; labels are assigned
//! in order of block minima, which makes the label vector a canonical form.

use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Largest `n` accepted by [`enumerate_nc`].
pub const MAX_ENUM_N: usize = 14;

type Labels = SmallVec<[u8; 16]>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    labels: Labels,
}

impl Partition {
    /// Builds a partition from blocks of 1-based elements. Blocks may be
    /// given in any order; the result is canonical.
    pub fn new(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        if n == 0 || n > u8::MAX as usize {
            return Err(Error::InvalidPartition(format!("unsupported size n = {n}")));
        }
        let mut owner = vec![usize::MAX; n];
        for (bi, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &x in block {
                if x == 0 || x > n {
                    return Err(Error::InvalidPartition(format!("element {x} outside 1..={n}")));
                }
                if owner[x - 1] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("element {x} appears twice")));
                }
                owner[x - 1] = bi;
            }
        }
        if let Some(missing) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::InvalidPartition(format!("element {} not covered", missing + 1)));
        }
        let p = Self::from_owner(&owner);
        if !p.is_noncrossing() {
            return Err(Error::InvalidPartition(format!("{p} is crossing")));
        }
        Ok(p)
    }

    /// Relabels arbitrary block ids into canonical order of first appearance.
    fn from_owner(owner: &[usize]) -> Self {
        let mut map: SmallVec<[(usize, u8); 16]> = SmallVec::new();
        let labels = owner
            .iter()
            .map(|&o| match map.iter().find(|(k, _)| *k == o) {
                Some(&(_, l)) => l,
                None => {
                    let l = map.len() as u8;
                    map.push((o, l));
                    l
                }
            })
            .collect();
        Self { labels }
    }

    /// The one-block partition `1_n`.
    pub fn one(n: usize) -> Self {
        assert!(n >= 1);
        Self {
            labels: SmallVec::from_elem(0, n),
        }
    }

    /// All singletons `0_n`.
    pub fn zero(n: usize) -> Self {
        Self {
            labels: (0..n as u8).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.labels.iter().max().map_or(0, |&m| m as usize + 1)
    }

    /// Block label of the 1-based element `x`.
    pub fn block_of(&self, x: usize) -> usize {
        self.labels[x - 1] as usize
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn is_one(&self) -> bool {
        self.labels.iter().all(|&l| l == 0)
    }

    /// Blocks of 1-based elements, each sorted, ordered by minimum.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(i + 1);
        }
        out
    }

    /// For consecutive elements `i < j` of one block every element strictly
    /// between them must belong to a block lying strictly inside `(i, j)`.
    pub fn is_noncrossing(&self) -> bool {
        let blocks = self.blocks();
        let n = self.n();
        let mut lo = vec![usize::MAX; blocks.len()];
        let mut hi = vec![0; blocks.len()];
        for (b, block) in blocks.iter().enumerate() {
            lo[b] = block[0];
            hi[b] = *block.last().unwrap();
        }
        for block in &blocks {
            for w in block.windows(2) {
                let (i, j) = (w[0], w[1]);
                for k in i + 1..j {
                    let b = self.labels[k - 1] as usize;
                    if lo[b] <= i || hi[b] >= j {
                        return false;
                    }
                }
            }
        }
        debug_assert!(n == self.labels.len());
        true
    }

    /// Whether every block is a contiguous run.
    pub fn is_interval_partition(&self) -> bool {
        self.blocks()
            .iter()
            .all(|b| b.last().unwrap() - b[0] + 1 == b.len())
    }

    /// Removes block `b` and renumbers the remaining elements in order.
    /// Returns `None` when `b` was the only block.
    pub fn remove_block(&self, b: usize) -> Option<Partition> {
        let owner: Vec<usize> = self
            .labels
            .iter()
            .filter(|&&l| l as usize != b)
            .map(|&l| l as usize)
            .collect();
        if owner.is_empty() {
            None
        } else {
            Some(Self::from_owner(&owner))
        }
    }

    /// Applies an element bijection `f` on `1..=n` and re-canonicalizes.
    pub fn map_elements(&self, f: impl Fn(usize) -> usize) -> Partition {
        let n = self.n();
        let mut owner = vec![0usize; n];
        for x in 1..=n {
            owner[f(x) - 1] = self.labels[x - 1] as usize;
        }
        Self::from_owner(&owner)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| {
                let xs: Vec<String> = b.iter().map(ToString::to_string).collect();
                format!("{{{}}}", xs.join(","))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// All noncrossing partitions of `{1..n}` in lexicographic order of their
/// canonical block lists.
pub fn enumerate_nc(n: usize) -> Result<Vec<Partition>> {
    let mut out = Vec::with_capacity(catalan(n).unwrap_or(0) as usize);
    for_each_nc(n, |p| out.push(p.clone()))?;
    Ok(out)
}

/// Streams the partitions of [`enumerate_nc`] without collecting them.
pub fn for_each_nc(n: usize, mut f: impl FnMut(&Partition)) -> Result<()> {
    if !(1..=MAX_ENUM_N).contains(&n) {
        return Err(Error::OutOfRange {
            what: "partition size n",
            value: n,
            min: 1,
            max: MAX_ENUM_N,
        });
    }
    const FREE: u8 = u8::MAX;
    let mut p = Partition {
        labels: SmallVec::from_elem(FREE, n),
    };
    next_block(&mut p, 0, &mut f);
    Ok(())
}

// Opens block `label` at the smallest free element.
fn next_block(p: &mut Partition, label: u8, f: &mut impl FnMut(&Partition)) {
    const FREE: u8 = u8::MAX;
    let Some(m) = p.labels.iter().position(|&l| l == FREE) else {
        f(p);
        return;
    };
    // The block must stay below the next assigned element.
    let bound = (m + 1..p.n())
        .find(|&x| p.labels[x] != FREE)
        .unwrap_or(p.n());
    p.labels[m] = label;
    extend_block(p, label, m, bound, f);
    p.labels[m] = FREE;
}

fn extend_block(p: &mut Partition, label: u8, last: usize, bound: usize, f: &mut impl FnMut(&Partition)) {
    const FREE: u8 = u8::MAX;
    next_block(p, label + 1, f);
    for x in last + 1..bound {
        p.labels[x] = label;
        extend_block(p, label, x, bound, f);
        p.labels[x] = FREE;
    }
}

/// `C_n = binom(2n, n)/(n+1)`, or `None` on overflow.
pub fn catalan(n: usize) -> Option<u64> {
    let mut c: u64 = 1;
    for k in 0..n as u64 {
        c = c.checked_mul(2 * (2 * k + 1))? / (k + 2);
    }
    Some(c)
}

/// Image under `j ↦ j-1`, with `1 ↦ n`.
pub fn rotate_partition(p: &Partition) -> Partition {
    let n = p.n();
    p.map_elements(|j| if j == 1 { n } else { j - 1 })
}

/// Image under `j ↦ n+1-j`.
pub fn reflect_partition(p: &Partition) -> Partition {
    let n = p.n();
    p.map_elements(|j| n + 1 - j)
}

/// Blocks that are contiguous runs, ordered by minimum.
pub fn interval_blocks(p: &Partition) -> Vec<Vec<usize>> {
    p.blocks()
        .into_iter()
        .filter(|b| b.last().unwrap() - b[0] + 1 == b.len())
        .collect()
}

/// A letter of a star-word: `a` or `a*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    AStar,
}

impl Letter {
    /// Label `1` for `a`, `2` for `a*`.
    pub fn label(self) -> usize {
        match self {
            Letter::A => 1,
            Letter::AStar => 2,
        }
    }

    pub fn from_label(l: usize) -> Option<Self> {
        match l {
            1 => Some(Letter::A),
            2 => Some(Letter::AStar),
            _ => None,
        }
    }

    pub fn star(self) -> Self {
        match self {
            Letter::A => Letter::AStar,
            Letter::AStar => Letter::A,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StarWord {
    letters: Vec<Letter>,
}

impl StarWord {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidPartition("empty star-word".into()));
        }
        Ok(Self { letters })
    }

    /// Parses strings such as `"1*1*"`: `1` is `a`, `*` is `a*`.
    pub fn parse(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '1' | 'a' => Ok(Letter::A),
                '*' | '2' => Ok(Letter::AStar),
                other => Err(Error::Parse {
                    location: "star-word".into(),
                    message: format!("unexpected symbol {other:?}"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Labels in `{1, 2}`.
    pub fn labels(&self) -> Vec<usize> {
        self.letters.iter().map(|l| l.label()).collect()
    }
}

impl fmt::Display for StarWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            f.write_str(match l {
                Letter::A => "1",
                Letter::AStar => "*",
            })?;
        }
        Ok(())
    }
}

/// Interval partition cutting exactly where two adjacent letters agree.
pub fn max_alt_interval_partition(eps: &StarWord) -> Partition {
    let mut label = 0u8;
    let mut labels: Labels = SmallVec::with_capacity(eps.len());
    labels.push(0);
    for w in eps.letters.windows(2) {
        if w[0] == w[1] {
            label += 1;
        }
        labels.push(label);
    }
    Partition { labels }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(n: usize, blocks: &[&[usize]]) -> Partition {
        Partition::new(n, &blocks.iter().map(|b| b.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn small_enumerations() {
        let one = enumerate_nc(1).unwrap();
        assert_eq!(one, vec![Partition::one(1)]);
        let three = enumerate_nc(3).unwrap();
        assert_eq!(three.len(), 5);
        assert!(three.contains(&part(3, &[&[1, 3], &[2]])));
        assert_eq!(enumerate_nc(4).unwrap().len(), 14);
    }

    #[test]
    fn enumeration_is_lexicographic_in_block_lists() {
        for n in 1..=7 {
            let all = enumerate_nc(n).unwrap();
            let lists: Vec<_> = all.iter().map(Partition::blocks).collect();
            assert!(lists.windows(2).all(|w| w[0] < w[1]), "n = {n}");
        }
        let three: Vec<String> = enumerate_nc(3).unwrap().iter().map(ToString::to_string).collect();
        assert_eq!(
            three,
            ["{{1},{2},{3}}", "{{1},{2,3}}", "{{1,2},{3}}", "{{1,2,3}}", "{{1,3},{2}}"]
        );
    }

    #[test]
    fn out_of_range_sizes() {
        assert!(enumerate_nc(0).is_err());
        assert!(enumerate_nc(MAX_ENUM_N + 1).is_err());
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(Partition::new(4, &[vec![1, 3], vec![2, 4]]).is_err());
        assert!(Partition::new(3, &[vec![1, 2]]).is_err());
        assert!(Partition::new(3, &[vec![1, 2], vec![2, 3]]).is_err());
        assert!(Partition::new(3, &[vec![1, 2, 3], vec![]]).is_err());
        assert!(Partition::new(2, &[vec![1, 3]]).is_err());
        assert_eq!(part(3, &[&[2], &[3, 1]]), part(3, &[&[1, 3], &[2]]));
    }

    #[test]
    fn rotation_example() {
        let p = part(5, &[&[1, 2], &[3, 4, 5]]);
        assert_eq!(rotate_partition(&p), part(5, &[&[1, 5], &[2, 3, 4]]));
        assert_eq!(rotate_partition(&Partition::one(1)), Partition::one(1));
        let mut q = p.clone();
        for _ in 0..5 {
            q = rotate_partition(&q);
        }
        assert_eq!(q, p);
    }

    #[test]
    fn reflection_example() {
        let p = part(5, &[&[1, 2], &[3, 4, 5]]);
        assert_eq!(reflect_partition(&p), part(5, &[&[1, 2, 3], &[4, 5]]));
        assert_eq!(reflect_partition(&Partition::one(6)), Partition::one(6));
        assert_eq!(reflect_partition(&reflect_partition(&p)), p);
    }

    #[test]
    fn interval_block_examples() {
        assert_eq!(interval_blocks(&part(3, &[&[1, 3], &[2]])), vec![vec![2]]);
        assert_eq!(
            interval_blocks(&part(5, &[&[1, 2], &[3, 4, 5]])),
            vec![vec![1, 2], vec![3, 4, 5]]
        );
        assert_eq!(interval_blocks(&Partition::one(4)), vec![vec![1, 2, 3, 4]]);
    }

    #[test]
    fn alternating_interval_partitions() {
        let sigma = |s: &str| max_alt_interval_partition(&StarWord::parse(s).unwrap()).to_string();
        assert_eq!(sigma("1*1*"), "{{1,2,3,4}}");
        assert_eq!(sigma("11**"), "{{1},{2,3},{4}}");
        assert_eq!(sigma("1"), "{{1}}");
        assert_eq!(sigma("*1**1"), "{{1,2,3},{4,5}}");
        assert!(StarWord::parse("").is_err());
        assert!(StarWord::parse("1x").is_err());
    }

    #[test]
    fn block_removal_renumbers() {
        let p = part(5, &[&[1, 5], &[2, 3], &[4]]);
        let q = p.remove_block(1).unwrap();
        assert_eq!(q, part(3, &[&[1, 3], &[2]]));
        assert!(Partition::one(3).remove_block(0).is_none());
    }

    #[test]
    fn catalan_numbers() {
        let expected = [1u64, 1, 2, 5, 14, 42, 132, 429, 1430, 4862];
        for (n, &c) in expected.iter().enumerate() {
            assert_eq!(catalan(n), Some(c));
        }
        assert_eq!(catalan(14), Some(2_674_440));
    }
}
