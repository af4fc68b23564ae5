use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest party count accepted by the diagonal (label-space) types.
pub const MAX_PARTIES: usize = 20;

pub(crate) fn check_parties(n: usize) -> Result<()> {
    if (2..=MAX_PARTIES).contains(&n) {
        Ok(())
    } else {
        Err(Error::PartyCount {
            n,
            min: 2,
            max: MAX_PARTIES,
        })
    }
}

/// Index `(k, s)` of the GHZ basis state `(|0,k⟩ + (−1)^s |1,k̄⟩)/√2`.
///
/// `k` holds the bits of parties `2..=N`, party 2 in the most significant
/// position, so the computational index of `|0,k⟩` is `k` itself and that of
/// `|1,k̄⟩` is `2^N − 1 − k`. The pair is packed as `(k << 1) | s`, which
/// makes `|φ+⟩` index 0 and its pairing state `|φ−⟩` index 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GhzLabel {
    n_parties: usize,
    index: usize,
}

impl GhzLabel {
    pub fn new(n_parties: usize, k: usize, s: u8) -> Result<Self> {
        check_parties(n_parties)?;
        if k >= 1 << (n_parties - 1) || s > 1 {
            return Err(Error::InvalidWeights(format!(
                "label (k={k}, s={s}) does not exist for N = {n_parties}"
            )));
        }
        Ok(Self {
            n_parties,
            index: (k << 1) | s as usize,
        })
    }

    pub fn from_index(n_parties: usize, index: usize) -> Result<Self> {
        check_parties(n_parties)?;
        if index >= 1 << n_parties {
            return Err(Error::InvalidWeights(format!(
                "label index {index} does not exist for N = {n_parties}"
            )));
        }
        Ok(Self { n_parties, index })
    }

    pub(crate) fn from_index_unchecked(n_parties: usize, index: usize) -> Self {
        debug_assert!(index < 1 << n_parties);
        Self { n_parties, index }
    }

    /// `|φ+⟩`, the purification target.
    pub fn phi_plus(n_parties: usize) -> Result<Self> {
        Self::new(n_parties, 0, 0)
    }

    /// `|φ−⟩`, the pairing state of `|φ+⟩`.
    pub fn phi_minus(n_parties: usize) -> Result<Self> {
        Self::new(n_parties, 0, 1)
    }

    /// All `2^N` labels in index order.
    pub fn all(n_parties: usize) -> Result<impl Iterator<Item = GhzLabel>> {
        check_parties(n_parties)?;
        Ok((0..1usize << n_parties).map(move |index| GhzLabel { n_parties, index }))
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn k(&self) -> usize {
        self.index >> 1
    }

    pub fn s(&self) -> u8 {
        (self.index & 1) as u8
    }

    /// Computational-basis indices of `|0,k⟩` and `|1,k̄⟩`.
    pub fn support(&self) -> (usize, usize) {
        let k = self.k();
        (k, (1 << self.n_parties) - 1 - k)
    }

    /// Mask of the `k` bit that belongs to `party` (1-based, `party ≥ 2`).
    pub(crate) fn party_bit(n_parties: usize, party: usize) -> usize {
        debug_assert!((2..=n_parties).contains(&party));
        1 << (n_parties - party)
    }

    fn with(self, k: usize, s: u8) -> Self {
        Self {
            n_parties: self.n_parties,
            index: (k << 1) | s as usize,
        }
    }
}

impl fmt::Display for GhzLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.n_parties - 1;
        write!(f, "({:0width$b},{})", self.k(), self.s(), width = width)
    }
}

/// Image of `|Ψ_control⟩ ⊗ |Ψ_target⟩` under the multilateral CNOT in which
/// every party applies CNOT from its control-copy qubit to its target-copy
/// qubit.
///
/// `(k1,s1),(k2,s2) → (k1, s1⊕s2),(k1⊕k2, s2)`; no phase is produced.
pub fn mcnot_labels(control: GhzLabel, target: GhzLabel) -> Result<(GhzLabel, GhzLabel)> {
    if control.n_parties != target.n_parties {
        return Err(Error::MismatchedParties(
            control.n_parties,
            target.n_parties,
        ));
    }
    Ok(mcnot_unchecked(control, target))
}

fn mcnot_unchecked(control: GhzLabel, target: GhzLabel) -> (GhzLabel, GhzLabel) {
    let (k1, s1) = (control.k(), control.s());
    let (k2, s2) = (target.k(), target.s());
    (control.with(k1, s1 ^ s2), target.with(k1 ^ k2, s2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn flips_bit(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn flips_sign(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Per-party Pauli string, party 1 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(paulis: Vec<Pauli>) -> Self {
        Self(paulis)
    }

    pub fn identity(n_parties: usize) -> Self {
        Self(vec![Pauli::I; n_parties])
    }

    /// `pauli` on `party` (1-based), identity elsewhere.
    pub fn single(n_parties: usize, party: usize, pauli: Pauli) -> Self {
        let mut v = vec![Pauli::I; n_parties];
        v[party - 1] = pauli;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn paulis(&self) -> &[Pauli] {
        &self.0
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::MalformedPauli(s.to_string()));
        }
        compact
            .chars()
            .map(Pauli::from_char)
            .collect::<Option<Vec<_>>>()
            .map(PauliString)
            .ok_or_else(|| Error::MalformedPauli(s.to_string()))
    }
}

/// Label reached by applying a Pauli string to `|Ψ_label⟩`, global phase dropped.
///
/// X on party 1 complements `k`; X on party `i > 1` toggles that party's bit
/// of `k`; Z on any party flips `s`; Y acts as both.
pub fn pauli_act(label: GhzLabel, paulis: &PauliString) -> Result<GhzLabel> {
    let n = label.n_parties;
    if paulis.len() != n {
        return Err(Error::MalformedPauli(format!(
            "{} Paulis for {n} parties",
            paulis.len()
        )));
    }
    let full = (1usize << (n - 1)) - 1;
    let (mut k, mut s) = (label.k(), label.s());
    for (i, p) in paulis.0.iter().enumerate() {
        let party = i + 1;
        if p.flips_bit() {
            k ^= if party == 1 {
                full
            } else {
                GhzLabel::party_bit(n, party)
            };
        }
        if p.flips_sign() {
            s ^= 1;
        }
    }
    Ok(label.with(k, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(n: usize, k: &str, s: u8) -> GhzLabel {
        let k = if k.is_empty() {
            0
        } else {
            usize::from_str_radix(k, 2).unwrap()
        };
        GhzLabel::new(n, k, s).unwrap()
    }

    #[test]
    fn packing_puts_pairing_state_next_to_target() {
        assert_eq!(GhzLabel::phi_plus(4).unwrap().index(), 0);
        assert_eq!(GhzLabel::phi_minus(4).unwrap().index(), 1);
        assert_eq!(lab(3, "01", 1).to_string(), "(01,1)");
        assert_eq!(lab(3, "01", 1).support(), (1, 6));
    }

    #[test]
    fn rejects_out_of_range_labels() {
        assert!(GhzLabel::new(3, 4, 0).is_err());
        assert!(GhzLabel::new(3, 0, 2).is_err());
        assert!(GhzLabel::new(1, 0, 0).is_err());
        assert!(GhzLabel::from_index(2, 4).is_err());
    }

    #[test]
    fn mcnot_examples() {
        let p = lab(2, "0", 0);
        assert_eq!(mcnot_labels(p, p).unwrap(), (p, p));
        assert_eq!(
            mcnot_labels(lab(2, "1", 0), lab(2, "1", 0)).unwrap(),
            (lab(2, "1", 0), lab(2, "0", 0))
        );
        assert_eq!(
            mcnot_labels(lab(3, "01", 1), lab(3, "11", 1)).unwrap(),
            (lab(3, "01", 0), lab(3, "10", 1))
        );
        assert!(mcnot_labels(lab(2, "0", 0), lab(3, "00", 0)).is_err());
    }

    #[test]
    fn pauli_examples() {
        let phi = lab(3, "00", 0);
        let id: PauliString = "III".parse().unwrap();
        assert_eq!(pauli_act(phi, &id).unwrap(), phi);
        assert_eq!(
            pauli_act(phi, &"ZII".parse().unwrap()).unwrap(),
            lab(3, "00", 1)
        );
        assert_eq!(
            pauli_act(phi, &"XII".parse().unwrap()).unwrap(),
            lab(3, "11", 0)
        );
        assert_eq!(
            pauli_act(phi, &"IXI".parse().unwrap()).unwrap(),
            lab(3, "10", 0)
        );
        assert_eq!(
            pauli_act(phi, &"IIY".parse().unwrap()).unwrap(),
            lab(3, "01", 1)
        );
    }

    #[test]
    fn malformed_pauli_strings() {
        assert!("XQZ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
        let phi = lab(3, "00", 0);
        assert!(pauli_act(phi, &"XX".parse().unwrap()).is_err());
    }

    #[test]
    fn single_x_and_z_are_involutions() {
        for n in 2..=5 {
            for l in GhzLabel::all(n).unwrap() {
                for party in 1..=n {
                    for p in [Pauli::X, Pauli::Z, Pauli::Y] {
                        let ps = PauliString::single(n, party, p);
                        let once = pauli_act(l, &ps).unwrap();
                        assert_eq!(pauli_act(once, &ps).unwrap(), l);
                    }
                }
            }
        }
    }

    #[test]
    fn pauli_orbit_of_phi_plus_covers_basis() {
        use std::collections::HashSet;
        for n in 2..=5 {
            let start = GhzLabel::phi_plus(n).unwrap();
            let mut seen = HashSet::from([start]);
            let mut frontier = vec![start];
            while let Some(l) = frontier.pop() {
                for party in 1..=n {
                    for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                        let next = pauli_act(l, &PauliString::single(n, party, p)).unwrap();
                        if seen.insert(next) {
                            frontier.push(next);
                        }
                    }
                }
            }
            assert_eq!(seen.len(), 1 << n);
        }
    }
}
