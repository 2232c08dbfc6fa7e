//! Permutations of `[n] = {1, ..., n}` and the non-crossing machinery built on them.
//!
//! Elements are 1-based at the API surface. A permutation `τ` is non-crossing
//! when `#(τ) + #(τ⁻¹γ_n) = n + 1`, where `γ_n = (1, 2, ..., n)` and `#`
//! counts cycles; for such `τ` the Kreweras complement is `K(τ) = τ⁻¹γ_n`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest `n` accepted by the exhaustive enumerators.
pub const ENUMERATION_CAP: usize = 10;

/// A permutation of `[n]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm {
    // images[a] = τ(a + 1) - 1
    images: Vec<u32>,
}

/// Disjoint cycles of a permutation, each rotated to start at its minimum
/// and listed by increasing minimum. Fixed points are cycles of length 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleDecomposition {
    pub cycles: Vec<Vec<usize>>,
}

impl CycleDecomposition {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.cycles.iter().map(Vec::as_slice)
    }
}

impl fmt::Display for CycleDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cycles.is_empty() {
            return f.write_str("()");
        }
        for c in &self.cycles {
            f.write_str("(")?;
            for (i, a) in c.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Parity behaviour of a permutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    /// `a` and `τ(a)` always have opposite parity.
    Alternating,
    /// `a` and `τ(a)` always have the same parity.
    Preserving,
    Neither,
}

/// Restrictions of a parity-preserving permutation to the odd and even points.
#[derive(Clone, Debug)]
pub struct ParitySplit {
    /// Restriction to `{1, 3, 5, ...}`, relabelled `2j - 1 ↦ j`.
    pub odd: Perm,
    /// Restriction to `{2, 4, 6, ...}`, relabelled `2j ↦ j`.
    pub even: Perm,
    /// Cycles of the odd restriction in the original labels.
    pub odd_cycles: CycleDecomposition,
    /// Cycles of the even restriction in the original labels.
    pub even_cycles: CycleDecomposition,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm {
            images: (0..n as u32).collect(),
        }
    }

    /// Builds a permutation from its 1-based image list.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for &v in images {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::validation(format!("{images:?} is not a permutation of [{n}]")));
            }
            seen[v - 1] = true;
            out.push((v - 1) as u32);
        }
        Ok(Perm { images: out })
    }

    pub(crate) fn from_zero_based(images: Vec<u32>) -> Self {
        debug_assert!({
            let mut s = images.clone();
            s.sort_unstable();
            s.iter().enumerate().all(|(i, &v)| v as usize == i)
        });
        Perm { images }
    }

    /// Builds a permutation of `[n]` from disjoint cycles; unlisted points are fixed.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<u32> = (0..n as u32).collect();
        let mut seen = vec![false; n];
        for c in cycles {
            for (i, &a) in c.iter().enumerate() {
                if a == 0 || a > n || seen[a - 1] {
                    return Err(Error::validation(format!("invalid cycle {c:?} in S_{n}")));
                }
                seen[a - 1] = true;
                images[a - 1] = (c[(i + 1) % c.len()] - 1) as u32;
            }
        }
        Ok(Perm { images })
    }

    /// Parses cycle notation such as `(1,2)(3,4)` into a permutation of `[n]`.
    pub fn parse_cycles(n: usize, text: &str) -> Result<Self> {
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let Some(body) = rest.strip_prefix('(') else {
                return Err(Error::validation(format!("bad cycle notation {text:?}")));
            };
            let close = body
                .find(')')
                .ok_or_else(|| Error::validation(format!("unclosed cycle in {text:?}")))?;
            let inner = body[..close].trim();
            if !inner.is_empty() {
                let cyc = inner
                    .split(',')
                    .map(|t| t.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::validation(format!("bad cycle entry in {text:?}")))?;
                cycles.push(cyc);
            }
            rest = body[close + 1..].trim_start();
        }
        let refs: Vec<&[usize]> = cycles.iter().map(Vec::as_slice).collect();
        Perm::from_cycles(n, &refs)
    }

    /// The full cycle `γ_n = (1, 2, ..., n)`.
    pub fn gamma(n: usize) -> Self {
        Perm {
            images: (0..n as u32).map(|a| (a + 1) % n as u32).collect(),
        }
    }

    /// `γ_{m,n} = (1, ..., m)(m+1, ..., m+n)`.
    pub fn gamma_mn(m: usize, n: usize) -> Self {
        let mut images: Vec<u32> = (0..m as u32).map(|a| (a + 1) % m as u32).collect();
        images.extend((0..n as u32).map(|a| m as u32 + (a + 1) % n as u32));
        Perm { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// `τ(a)` for 1-based `a`.
    pub fn apply(&self, a: usize) -> usize {
        self.images[a - 1] as usize + 1
    }

    /// 1-based image list.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v as usize + 1).collect()
    }

    pub(crate) fn images0(&self) -> &[u32] {
        &self.images
    }

    /// `(self ∘ other)(a) = self(other(a))`.
    pub fn compose(&self, other: &Perm) -> Result<Perm> {
        if self.len() != other.len() {
            return Err(Error::validation(format!(
                "cannot compose permutations of sizes {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Perm {
            images: other.images.iter().map(|&b| self.images[b as usize]).collect(),
        })
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.len()];
        for (a, &b) in self.images.iter().enumerate() {
            inv[b as usize] = a as u32;
        }
        Perm { images: inv }
    }

    /// Number of fixed points.
    pub fn fix_count(&self) -> usize {
        self.images.iter().enumerate().filter(|(a, &b)| *a == b as usize).count()
    }

    pub fn cycles(&self) -> CycleDecomposition {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut a = start;
            while !seen[a] {
                seen[a] = true;
                cyc.push(a + 1);
                a = self.images[a] as usize;
            }
            cycles.push(cyc);
        }
        CycleDecomposition { cycles }
    }

    /// `#(τ)`, the number of cycles including fixed points.
    pub fn cycle_count(&self) -> usize {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut a = start;
            while !seen[a] {
                seen[a] = true;
                a = self.images[a] as usize;
            }
        }
        count
    }

    pub fn is_pairing(&self) -> bool {
        !self.images.is_empty()
            && self
                .images
                .iter()
                .enumerate()
                .all(|(a, &b)| a != b as usize && self.images[b as usize] as usize == a)
    }

    /// `#(τ) + #(τ⁻¹γ_n) = n + 1`.
    pub fn is_noncrossing(&self) -> bool {
        let n = self.len();
        let rest = self.inverse().compose(&Perm::gamma(n)).expect("same size");
        self.cycle_count() + rest.cycle_count() == n + 1
    }

    /// Kreweras complement `K(τ) = τ⁻¹γ_n` of a non-crossing permutation.
    pub fn kreweras(&self) -> Result<Perm> {
        let n = self.len();
        let k = self.inverse().compose(&Perm::gamma(n))?;
        if self.cycle_count() + k.cycle_count() != n + 1 {
            return Err(Error::Domain(format!("{self} is not non-crossing")));
        }
        Ok(k)
    }

    pub fn parity_classify(&self) -> Parity {
        let mut alternating = true;
        let mut preserving = true;
        for (a, &b) in self.images.iter().enumerate() {
            if (a as u32 ^ b) & 1 == 0 {
                alternating = false;
            } else {
                preserving = false;
            }
        }
        match (alternating, preserving) {
            (true, false) => Parity::Alternating,
            (false, true) => Parity::Preserving,
            // Only the empty permutation is both.
            (true, true) => Parity::Preserving,
            (false, false) => Parity::Neither,
        }
    }

    /// Odd and even restrictions of a parity-preserving permutation.
    pub fn parity_split(&self) -> Result<ParitySplit> {
        if self.parity_classify() != Parity::Preserving {
            return Err(Error::Domain(format!("{self} is not parity preserving")));
        }
        // 0-based index a is odd in 1-based terms iff a is even.
        let restrict = |parity: u32| -> Perm {
            let images = self
                .images
                .iter()
                .enumerate()
                .filter(|(a, _)| *a as u32 & 1 == parity)
                .map(|(_, &b)| b / 2)
                .collect();
            Perm { images }
        };
        let odd = restrict(0);
        let even = restrict(1);
        let relabel = |p: &Perm, f: fn(usize) -> usize| CycleDecomposition {
            cycles: p
                .cycles()
                .cycles
                .into_iter()
                .map(|c| c.into_iter().map(f).collect())
                .collect(),
        };
        let odd_cycles = relabel(&odd, |j| 2 * j - 1);
        let even_cycles = relabel(&even, |j| 2 * j);
        Ok(ParitySplit {
            odd,
            even,
            odd_cycles,
            even_cycles,
        })
    }

    /// Whether some orbit edge joins `{1..m}` and `{m+1..m+n}`.
    pub fn is_mn_connected(&self, m: usize, n: usize) -> Result<bool> {
        if self.len() != m + n {
            return Err(Error::validation(format!(
                "permutation of size {} checked against ({m},{n})",
                self.len()
            )));
        }
        let m = m as u32;
        Ok(self
            .images
            .iter()
            .enumerate()
            .any(|(a, &b)| (a as u32) < m && b >= m))
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.cycles().fmt(f)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{}", self.cycles())
    }
}

fn check_cap(n: usize) -> Result<()> {
    if n > ENUMERATION_CAP {
        return Err(Error::budget(
            format!("exhaustive enumeration over [{n}]"),
            format!("n <= {ENUMERATION_CAP}"),
        ));
    }
    Ok(())
}

/// Advances `v` to the next permutation in lexicographic order.
pub(crate) fn next_permutation(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// The `rank`-th permutation of `[n]` in lexicographic order of images (0-based images).
pub(crate) fn unrank_lex(n: usize, mut rank: u64) -> Vec<u32> {
    let mut pool: Vec<u32> = (0..n as u32).collect();
    let mut fact = vec![1u64; n + 1];
    for i in 1..=n {
        fact[i] = fact[i - 1] * i as u64;
    }
    let mut out = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let q = (rank / fact[i]) as usize;
        rank %= fact[i];
        out.push(pool.remove(q));
    }
    out
}

/// Lexicographic stream over `S_n`.
pub struct Permutations {
    current: Option<Vec<u32>>,
}

impl Iterator for Permutations {
    type Item = Perm;

    fn next(&mut self) -> Option<Perm> {
        let cur = self.current.as_mut()?;
        let out = Perm { images: cur.clone() };
        if !next_permutation(cur) {
            self.current = None;
        }
        Some(out)
    }
}

/// Every permutation of `[n]`, lexicographic in the image list.
pub fn enumerate_permutations(n: usize) -> Result<Permutations> {
    check_cap(n)?;
    Ok(Permutations {
        current: Some((0..n as u32).collect()),
    })
}

/// Every pairing of `[n]`, lexicographic in the image list. Empty for odd `n`.
pub fn enumerate_pairings(n: usize) -> Result<std::vec::IntoIter<Perm>> {
    check_cap(n)?;
    let mut out = Vec::new();
    if n > 0 && n % 2 == 0 {
        let mut images = vec![u32::MAX; n];
        pairings_rec(&mut images, &mut out);
    }
    Ok(out.into_iter())
}

fn pairings_rec(images: &mut [u32], out: &mut Vec<Perm>) {
    let Some(a) = images.iter().position(|&v| v == u32::MAX) else {
        out.push(Perm {
            images: images.to_vec(),
        });
        return;
    };
    for b in a + 1..images.len() {
        if images[b] == u32::MAX {
            images[a] = b as u32;
            images[b] = a as u32;
            pairings_rec(images, out);
            images[a] = u32::MAX;
            images[b] = u32::MAX;
        }
    }
}

/// Every non-crossing permutation of `[n]`, lexicographic in the image list.
///
/// Candidates are the set partitions of `[n]` with each block read as an
/// increasing cycle; the non-crossing ones are selected by the cycle-count
/// equality.
pub fn enumerate_noncrossing(n: usize) -> Result<std::vec::IntoIter<Perm>> {
    check_cap(n)?;
    let mut out = Vec::new();
    if n == 0 {
        out.push(Perm::identity(0));
        return Ok(out.into_iter());
    }
    // restricted growth strings
    let mut rgs = vec![0usize; n];
    loop {
        let blocks = rgs.iter().max().map_or(0, |m| m + 1);
        let mut last_in_block = vec![usize::MAX; blocks];
        let mut first_in_block = vec![usize::MAX; blocks];
        let mut images = vec![0u32; n];
        for (a, &b) in rgs.iter().enumerate() {
            if first_in_block[b] == usize::MAX {
                first_in_block[b] = a;
            } else {
                images[last_in_block[b]] = a as u32;
            }
            last_in_block[b] = a;
        }
        for b in 0..blocks {
            images[last_in_block[b]] = first_in_block[b] as u32;
        }
        let p = Perm { images };
        if p.is_noncrossing() {
            out.push(p);
        }
        // advance the growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                out.sort();
                return Ok(out.into_iter());
            }
            let prefix_max = rgs[..i].iter().max().copied().unwrap_or(0);
            if rgs[i] <= prefix_max {
                rgs[i] += 1;
                for x in rgs[i + 1..].iter_mut() {
                    *x = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Every non-crossing pairing of `[n]`, lexicographic in the image list.
pub fn enumerate_nc_pairings(n: usize) -> Result<std::vec::IntoIter<Perm>> {
    let v: Vec<Perm> = enumerate_pairings(n)?.filter(Perm::is_noncrossing).collect();
    Ok(v.into_iter())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, text: &str) -> Perm {
        Perm::parse_cycles(n, text).unwrap()
    }

    #[test]
    fn fix_counts() {
        assert_eq!(Perm::identity(7).fix_count(), 7);
        assert_eq!(p(2, "(1,2)").fix_count(), 0);
        assert_eq!(p(3, "(1,2)(3)").fix_count(), 1);
    }

    #[test]
    fn cycle_decomposition_is_canonical() {
        assert_eq!(Perm::identity(3).to_string(), "(1)(2)(3)");
        assert_eq!(Perm::identity(3).cycle_count(), 3);
        let c = p(3, "(1,3,2)");
        assert_eq!(c.cycles().cycles, vec![vec![1, 3, 2]]);
        assert_eq!(c.cycle_count(), 1);
        let q = Perm::from_images(&[2, 1, 4, 3]).unwrap();
        assert_eq!(q.to_string(), "(1,2)(3,4)");
        assert_eq!(q.cycle_count(), 2);
        // rotation to minimum first
        assert_eq!(p(4, "(3,1,4)").to_string(), "(1,4,3)(2)");
    }

    #[test]
    fn gammas_and_composition() {
        assert_eq!(Perm::gamma(4).to_string(), "(1,2,3,4)");
        assert_eq!(Perm::gamma_mn(2, 2).to_string(), "(1,2)(3,4)");
        let s = p(2, "(1,2)");
        assert_eq!(s.compose(&s).unwrap(), Perm::identity(2));
        assert!(Perm::identity(2).compose(&Perm::identity(3)).is_err());
        // (σ∘ρ)(a) = σ(ρ(a))
        let sigma = p(3, "(1,2)");
        let rho = p(3, "(2,3)");
        assert_eq!(sigma.compose(&rho).unwrap().apply(3), 1);
    }

    #[test]
    fn pairings() {
        assert!(p(4, "(1,2)(3,4)").is_pairing());
        assert!(!Perm::identity(2).is_pairing());
        for q in enumerate_permutations(3).unwrap() {
            assert!(!q.is_pairing());
        }
    }

    #[test]
    fn noncrossing_examples() {
        assert!(p(4, "(1,2)(3,4)").is_noncrossing());
        assert!(!p(4, "(1,3)(2,4)").is_noncrossing());
        for n in 1..6 {
            assert!(Perm::identity(n).is_noncrossing());
        }
        let t = p(4, "(1,3)(2,4)");
        let rest = t.inverse().compose(&Perm::gamma(4)).unwrap();
        assert_eq!(rest.to_string(), "(1,4,3,2)");
    }

    #[test]
    fn kreweras_examples() {
        assert_eq!(p(4, "(1,2)(3,4)").kreweras().unwrap().to_string(), "(1)(2,4)(3)");
        assert_eq!(Perm::identity(5).kreweras().unwrap(), Perm::gamma(5));
        assert_eq!(Perm::gamma(5).kreweras().unwrap(), Perm::identity(5));
        assert!(matches!(p(4, "(1,3)(2,4)").kreweras(), Err(Error::Domain(_))));
    }

    #[test]
    fn parity_examples() {
        assert_eq!(p(4, "(1,2)(3,4)").parity_classify(), Parity::Alternating);
        let k = p(4, "(1)(2,4)(3)");
        assert_eq!(k.parity_classify(), Parity::Preserving);
        let split = k.parity_split().unwrap();
        assert_eq!(split.odd_cycles.to_string(), "(1)(3)");
        assert_eq!(split.even_cycles.to_string(), "(2,4)");
        assert_eq!(split.odd, Perm::identity(2));
        assert_eq!(split.even, p(2, "(1,2)"));
        assert_eq!(split.odd.cycle_count() + split.even.cycle_count(), k.cycle_count());
        assert_eq!(p(3, "(1,2,3)").parity_classify(), Parity::Neither);
        assert!(matches!(p(3, "(1,2,3)").parity_split(), Err(Error::Domain(_))));
    }

    #[test]
    fn mn_connectivity() {
        for (m, n) in [(2, 3), (3, 1), (1, 1)] {
            assert!(!Perm::gamma_mn(m, n).is_mn_connected(m, n).unwrap());
            let t = Perm::from_cycles(m + n, &[&[1, m + 1]]).unwrap();
            assert!(t.is_mn_connected(m, n).unwrap());
        }
        assert!(!p(4, "(1,2)(3,4)").is_mn_connected(2, 2).unwrap());
        assert!(p(4, "(1,2)").is_mn_connected(1, 2).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_pairings(4).unwrap().count(), 3);
        assert_eq!(enumerate_noncrossing(3).unwrap().count(), 5);
        assert_eq!(enumerate_noncrossing(4).unwrap().count(), 14);
        assert_eq!(enumerate_nc_pairings(6).unwrap().count(), 5);
        assert_eq!(enumerate_nc_pairings(3).unwrap().count(), 0);
        assert_eq!(enumerate_permutations(5).unwrap().count(), 120);
        assert!(matches!(enumerate_permutations(11), Err(Error::Budget { .. })));
    }

    #[test]
    fn enumeration_is_lexicographic() {
        for n in 1..=6 {
            let streams: Vec<Vec<Perm>> = vec![
                enumerate_permutations(n).unwrap().collect(),
                enumerate_pairings(n).unwrap().collect(),
                enumerate_noncrossing(n).unwrap().collect(),
                enumerate_nc_pairings(n).unwrap().collect(),
            ];
            for s in streams {
                assert!(s.windows(2).all(|w| w[0].images() < w[1].images()));
            }
        }
    }

    #[test]
    fn unranking_matches_stream() {
        for (rank, q) in enumerate_permutations(5).unwrap().enumerate() {
            assert_eq!(unrank_lex(5, rank as u64), q.images0());
        }
    }
}
