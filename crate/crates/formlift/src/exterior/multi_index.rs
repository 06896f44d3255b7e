use super::ExteriorError;

/// Binomial coefficient C(n, k); zero when k > n. Sizes here stay tiny
/// (n <= 7), so a direct product loop is exact in u64.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num: u64 = 1;
    let mut den: u64 = 1;
    for j in 0..k {
        num *= (n - j) as u64;
        den *= (j + 1) as u64;
    }
    (num / den) as usize
}

/// A strictly increasing tuple of 1-based indices selecting a basis form
/// `e^{i1} ^ ... ^ e^{ik}` in dimension `dim`.
///
/// Multi-indices are ordered lexicographically; [`MultiIndex::rank`] and
/// [`MultiIndex::from_rank`] are mutually inverse bijections with
/// `0..C(dim, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    dim: u8,
    indices: Vec<u8>,
}

impl MultiIndex {
    /// Builds a multi-index from strictly increasing indices in `1..=dim`.
    pub fn new(dim: usize, indices: &[u8]) -> Result<Self, ExteriorError> {
        if !(1..=7).contains(&dim) {
            return Err(ExteriorError::UnsupportedDimension(dim));
        }
        let ok = indices.windows(2).all(|w| w[0] < w[1])
            && indices.iter().all(|&i| i >= 1 && i as usize <= dim);
        if !ok {
            return Err(ExteriorError::InvalidMultiIndex {
                dim,
                indices: indices.to_vec(),
            });
        }
        Ok(Self {
            dim: dim as u8,
            indices: indices.to_vec(),
        })
    }

    /// Sorts arbitrary distinct indices into a multi-index, returning the
    /// permutation sign; errors on a repeated index.
    pub fn from_unsorted(dim: usize, indices: &[u8]) -> Result<(Self, f64), ExteriorError> {
        let mut sorted = indices.to_vec();
        // Insertion sort with transposition count: exact for these lengths.
        let mut swaps = 0usize;
        for i in 1..sorted.len() {
            let mut j = i;
            while j > 0 && sorted[j - 1] > sorted[j] {
                sorted.swap(j - 1, j);
                swaps += 1;
                j -= 1;
            }
        }
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(ExteriorError::RepeatedIndex { index: w[0] });
            }
        }
        let sign = if swaps % 2 == 0 { 1.0 } else { -1.0 };
        Ok((Self::new(dim, &sorted)?, sign))
    }

    /// Lexicographic position among all degree-`k` multi-indices.
    pub fn rank(&self) -> usize {
        let n = self.dim as usize;
        let k = self.indices.len();
        let mut rank = 0;
        let mut prev = 0usize;
        for (j, &s) in self.indices.iter().enumerate() {
            for v in (prev + 1)..(s as usize) {
                rank += binomial(n - v, k - j - 1);
            }
            prev = s as usize;
        }
        rank
    }

    /// Inverse of [`MultiIndex::rank`].
    pub fn from_rank(dim: usize, degree: usize, rank: usize) -> Result<Self, ExteriorError> {
        if !(1..=7).contains(&dim) {
            return Err(ExteriorError::UnsupportedDimension(dim));
        }
        if degree > dim || rank >= binomial(dim, degree) {
            return Err(ExteriorError::DegreeOutOfRange { dim, degree });
        }
        let mut rank = rank;
        let mut indices = Vec::with_capacity(degree);
        let mut v = 1usize;
        for j in 0..degree {
            loop {
                let c = binomial(dim - v, degree - j - 1);
                if rank < c {
                    indices.push(v as u8);
                    v += 1;
                    break;
                }
                rank -= c;
                v += 1;
            }
        }
        Ok(Self {
            dim: dim as u8,
            indices,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn degree(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[u8] {
        &self.indices
    }

    /// The complementary multi-index (indices of `1..=dim` not present).
    pub fn complement(&self) -> MultiIndex {
        let indices: Vec<u8> = (1..=self.dim)
            .filter(|i| !self.indices.contains(i))
            .collect();
        MultiIndex {
            dim: self.dim,
            indices,
        }
    }

    /// Merges two disjoint multi-indices, returning the concatenation sign
    /// `e^I ^ e^J = sign * e^{sorted(I u J)}`; `None` if they overlap.
    pub fn merge(&self, other: &MultiIndex) -> Option<(MultiIndex, f64)> {
        debug_assert_eq!(self.dim, other.dim);
        let (a, b) = (&self.indices, &other.indices);
        let mut merged = Vec::with_capacity(a.len() + b.len());
        let mut inversions = 0usize;
        let (mut i, mut j) = (0usize, 0usize);
        while i < a.len() && j < b.len() {
            if a[i] == b[j] {
                return None;
            }
            if a[i] < b[j] {
                merged.push(a[i]);
                i += 1;
            } else {
                // b[j] crosses every element left in a
                inversions += a.len() - i;
                merged.push(b[j]);
                j += 1;
            }
        }
        merged.extend_from_slice(&a[i..]);
        merged.extend_from_slice(&b[j..]);
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        Some((
            MultiIndex {
                dim: self.dim,
                indices: merged,
            },
            sign,
        ))
    }

    /// Sign of `e^I ^ e^{complement(I)}` against the oriented volume.
    pub fn complement_sign(&self) -> f64 {
        let comp = self.complement();
        self.merge(&comp)
            .map(|(_, s)| s)
            .expect("complement is disjoint")
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "e^{{")?;
        for i in &self.indices {
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}
