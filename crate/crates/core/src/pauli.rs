//! Pauli matrices and multi-qubit Pauli words such as `"XXI"` or `"IZZ"`.
//!
//! Qubit 0 is the leftmost letter and the most significant tensor factor.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::operator::{tensor_all, Operator, C64, I, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Operator {
        match self {
            Pauli::I => Operator::identity(&[2]),
            Pauli::X => sigma_x(),
            Pauli::Y => sigma_y(),
            Pauli::Z => sigma_z(),
        }
    }

    /// Symplectic (x, z) bits.
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

pub fn sigma_x() -> Operator {
    Operator::from_rows(2, &[ZERO, ONE, ONE, ZERO]).expect("2x2")
}

pub fn sigma_y() -> Operator {
    Operator::from_rows(2, &[ZERO, -I, I, ZERO]).expect("2x2")
}

pub fn sigma_z() -> Operator {
    Operator::from_rows(2, &[ONE, ZERO, ZERO, C64::new(-1.0, 0.0)]).expect("2x2")
}

/// Single-qubit operator `op` acting on qubit `site` of a `k`-qubit register.
pub fn embed(op: &Operator, site: usize, k: usize) -> Operator {
    let id = Operator::identity(&[2]);
    let factors: Vec<&Operator> = (0..k).map(|i| if i == site { op } else { &id }).collect();
    tensor_all(factors).expect("k >= 1")
}

/// A tensor product of single-qubit Paulis, without phase.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliWord(Vec<Pauli>);

impl PauliWord {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidPauliWord(String::new()));
        }
        Ok(Self(letters))
    }

    pub fn identity(k: usize) -> Self {
        Self(vec![Pauli::I; k])
    }

    /// Same Pauli on every qubit.
    pub fn uniform(p: Pauli, k: usize) -> Self {
        Self(vec![p; k])
    }

    pub fn single(p: Pauli, site: usize, k: usize) -> Self {
        let mut w = vec![Pauli::I; k];
        w[site] = p;
        Self(w)
    }

    pub fn qubits(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    pub fn to_operator(&self) -> Operator {
        let mats: Vec<Operator> = self.0.iter().map(|p| p.matrix()).collect();
        tensor_all(mats.iter()).expect("non-empty word")
    }

    /// Product up to phase.
    pub fn mul_projective(&self, other: &Self) -> Self {
        assert_eq!(self.qubits(), other.qubits());
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| {
                    let (ax, az) = a.bits();
                    let (bx, bz) = b.bits();
                    Pauli::from_bits(ax ^ bx, az ^ bz)
                })
                .collect(),
        )
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        let anti = self
            .0
            .iter()
            .zip(&other.0)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// Packs the word into a symplectic bit index (2 bits per qubit).
    pub fn to_index(&self) -> usize {
        self.0.iter().fold(0usize, |acc, p| {
            let (x, z) = p.bits();
            (acc << 2) | ((x as usize) << 1) | z as usize
        })
    }

    pub fn from_index(index: usize, k: usize) -> Self {
        Self(
            (0..k)
                .map(|i| {
                    let shift = 2 * (k - 1 - i);
                    let bits = (index >> shift) & 0b11;
                    Pauli::from_bits(bits & 0b10 != 0, bits & 0b01 != 0)
                })
                .collect(),
        )
    }

    /// All 4^k words in lexicographic order (I < X < Y < Z).
    pub fn all(k: usize) -> Vec<Self> {
        let mut words: Vec<Self> = (0..1usize << (2 * k)).map(|i| Self::from_index(i, k)).collect();
        words.sort();
        words
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::InvalidPauliWord(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::InvalidPauliWord(s.to_string()));
        }
        Ok(Self(letters))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{distance, Metric};

    #[test]
    fn parse_and_display() {
        let w: PauliWord = "xYz".parse().unwrap();
        assert_eq!(w.to_string(), "XYZ");
        assert!("XQ".parse::<PauliWord>().is_err());
        assert!("".parse::<PauliWord>().is_err());
    }

    #[test]
    fn word_operator_is_tensor_product() {
        let w: PauliWord = "ZI".parse().unwrap();
        let op = w.to_operator();
        assert_eq!(op.dims(), &[2, 2]);
        let expected = sigma_z().tensor(&Operator::identity(&[2]));
        assert_eq!(op, expected);
    }

    #[test]
    fn projective_product_matches_matrices() {
        for a in PauliWord::all(2) {
            for b in PauliWord::all(2) {
                let c = a.mul_projective(&b);
                let prod = &a.to_operator() * &b.to_operator();
                // prod = phase · c
                let phase = c.to_operator().hs_inner(&prod) / 4.0;
                assert!((phase.norm() - 1.0).abs() < 1e-12);
                let resid = distance(&prod, &c.to_operator().scale(phase), Metric::Frobenius).unwrap();
                assert!(resid < 1e-12);
                let commute = prod == &b.to_operator() * &a.to_operator();
                assert_eq!(commute, a.commutes_with(&b), "{a} {b}");
            }
        }
    }

    #[test]
    fn index_round_trip() {
        for w in PauliWord::all(3) {
            assert_eq!(PauliWord::from_index(w.to_index(), 3), w);
        }
    }
}
