use std::io::{BufRead, Write};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng;

/// A bijection on `0..n`, stored as the image of each index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &x in &map {
            if x >= n {
                return invalid(format!("permutation entry {x} out of range 0..{n}"));
            }
            if seen[x] {
                return invalid(format!("permutation entry {x} repeated"));
            }
            seen[x] = true;
        }
        Ok(Self { map })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
        }
    }

    /// Uniformly random permutation.
    pub fn random(n: usize, rng: &mut impl RngCore) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        rng::shuffle(rng, &mut map);
        Self { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (i, &x) in self.map.iter().enumerate() {
            inv[x] = i;
        }
        Self { map: inv }
    }

    /// Text interchange: the image of each index on its own line, in order.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for x in &self.map {
            writeln!(w, "{x}")?;
        }
        Ok(())
    }

    /// Reads [`Permutation::write_text`] output; blank lines and `#`
    /// comments are skipped.
    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut map = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            map.push(
                line.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?,
            );
        }
        Permutation::new(map)
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Self {
        Self {
            map: other.map.iter().map(|&x| self.map[x]).collect(),
        }
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = crate::Error;

    fn try_from(map: Vec<usize>) -> Result<Self> {
        Permutation::new(map)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.map
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert!(Permutation::new(vec![1, 0]).is_ok());
    }

    #[test]
    fn text_round_trip() {
        let p = Permutation::new(vec![2, 0, 3, 1]).unwrap();
        let mut buf = Vec::new();
        p.write_text(&mut buf).unwrap();
        assert_eq!(buf, b"2\n0\n3\n1\n");
        assert_eq!(Permutation::read_text(&buf[..]).unwrap(), p);
        assert!(Permutation::read_text(&b"0\n0\n"[..]).is_err());
        assert!(Permutation::read_text(&b"x\n"[..]).is_err());
    }

    proptest! {
        #[test]
        fn inverse_round_trip(seed in any::<u64>(), n in 1usize..60) {
            let p = Permutation::random(n, &mut rng::rng_from_seed(seed));
            prop_assert!(Permutation::new(p.as_slice().to_vec()).is_ok());
            prop_assert_eq!(p.compose(&p.inverse()), Permutation::identity(n));
            prop_assert_eq!(p.inverse().compose(&p), Permutation::identity(n));
        }
    }
}
