//! Sparse state vectors over small registers of labelled polarization qubits.
//!
//! A [`Ket`] stores only non-zero amplitudes, keyed by the basis string of its
//! register. Basis strings are packed into an integer with the first register
//! photon in the most significant bit and `V = 1`, so integer order is the
//! lexicographic `H < V` order of the strings.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Amplitude = Complex64;

/// 2x2 operator acting on the H/V amplitudes of one photon.
pub type Matrix2 = [[Amplitude; 2]; 2];

/// Squared magnitudes below this are dropped from every stored state.
pub const PRUNE_THRESHOLD: f64 = 1e-24;

/// Tolerance used wherever a caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Norms at or below this cannot be normalized.
pub const DEGENERATE_NORM: f64 = 1e-12;

pub const MAX_PHOTONS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhotonId(pub u8);

impl fmt::Display for PhotonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Builds a register from bare photon labels.
pub fn photons(labels: &[u8]) -> Vec<PhotonId> {
    labels.iter().copied().map(PhotonId).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pol {
    H,
    V,
}

impl Pol {
    pub fn bit(self) -> u32 {
        match self {
            Pol::H => 0,
            Pol::V => 1,
        }
    }

    pub fn from_bit(bit: u32) -> Self {
        if bit & 1 == 0 {
            Pol::H
        } else {
            Pol::V
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Pol::H => Pol::V,
            Pol::V => Pol::H,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pol::H => 'H',
            Pol::V => 'V',
        }
    }
}

pub fn identity2() -> Matrix2 {
    let one = Amplitude::new(1.0, 0.0);
    let zero = Amplitude::new(0.0, 0.0);
    [[one, zero], [zero, one]]
}

/// `Z|H> = |H>`, `Z|V> = -|V>`.
pub fn pauli_z() -> Matrix2 {
    let one = Amplitude::new(1.0, 0.0);
    let zero = Amplitude::new(0.0, 0.0);
    [[one, zero], [zero, -one]]
}

/// Renders a packed basis index as its H/V string.
pub fn label_of(index: u32, len: usize) -> String {
    (0..len)
        .map(|pos| Pol::from_bit(index >> (len - 1 - pos)).symbol())
        .collect()
}

fn pack(labels: &[Pol]) -> u32 {
    labels.iter().fold(0, |acc, p| (acc << 1) | p.bit())
}

fn check_register(register: &[PhotonId]) -> Result<()> {
    if register.len() > MAX_PHOTONS {
        return Err(Error::RegisterTooLarge(register.len()));
    }
    for (i, p) in register.iter().enumerate() {
        if register[..i].contains(p) {
            return Err(Error::DuplicatePhoton(register.to_vec()));
        }
    }
    Ok(())
}

/// Pure state of an ordered register of polarization qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    register: Vec<PhotonId>,
    components: BTreeMap<u32, Amplitude>,
}

impl Ket {
    /// The zero vector on `register`.
    pub fn zero(register: &[PhotonId]) -> Result<Self> {
        check_register(register)?;
        Ok(Self {
            register: register.to_vec(),
            components: BTreeMap::new(),
        })
    }

    /// Unit basis vector with one label per register photon.
    pub fn basis(register: &[PhotonId], labels: &[Pol]) -> Result<Self> {
        if register.len() != labels.len() {
            return Err(Error::LengthMismatch {
                register: register.len(),
                labels: labels.len(),
            });
        }
        let mut ket = Self::zero(register)?;
        ket.components
            .insert(pack(labels), Amplitude::new(1.0, 0.0));
        Ok(ket)
    }

    /// Builds a state from explicit `(labels, amplitude)` pairs; repeated labels add up.
    pub fn from_components<'a, I>(register: &[PhotonId], terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [Pol], Amplitude)>,
    {
        let mut ket = Self::zero(register)?;
        for (labels, amp) in terms {
            if labels.len() != register.len() {
                return Err(Error::LengthMismatch {
                    register: register.len(),
                    labels: labels.len(),
                });
            }
            *ket.components.entry(pack(labels)).or_default() += amp;
        }
        ket.prune();
        Ok(ket)
    }

    /// Two-photon state from components in (HH, HV, VH, VV) order.
    pub fn from_pair(register: [PhotonId; 2], comps: [Amplitude; 4]) -> Result<Self> {
        let mut ket = Self::zero(&register)?;
        for (idx, amp) in comps.into_iter().enumerate() {
            ket.components.insert(idx as u32, amp);
        }
        ket.prune();
        Ok(ket)
    }

    /// Components of a two-photon state in (HH, HV, VH, VV) order.
    pub fn to_pair(&self) -> Result<[Amplitude; 4]> {
        if self.register.len() != 2 {
            return Err(Error::LengthMismatch {
                register: self.register.len(),
                labels: 2,
            });
        }
        let mut out = [Amplitude::new(0.0, 0.0); 4];
        for (&idx, &amp) in &self.components {
            out[idx as usize] = amp;
        }
        Ok(out)
    }

    /// Component-wise linear combination of kets sharing one register.
    pub fn superpose(terms: &[(Amplitude, &Ket)]) -> Result<Self> {
        let (_, first) = terms.first().ok_or(Error::EmptySuperposition)?;
        let mut out = Self::zero(&first.register)?;
        for (coeff, ket) in terms {
            if ket.register != out.register {
                return Err(Error::RegisterMismatch {
                    left: out.register.clone(),
                    right: ket.register.clone(),
                });
            }
            for (&idx, &amp) in &ket.components {
                *out.components.entry(idx).or_default() += coeff * amp;
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn register(&self) -> &[PhotonId] {
        &self.register
    }

    pub fn len(&self) -> usize {
        self.register.len()
    }

    pub fn is_empty(&self) -> bool {
        self.register.is_empty()
    }

    /// True when no component survived pruning.
    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn amplitude(&self, labels: &[Pol]) -> Amplitude {
        if labels.len() != self.register.len() {
            return Amplitude::new(0.0, 0.0);
        }
        self.components
            .get(&pack(labels))
            .copied()
            .unwrap_or_default()
    }

    /// Stored components in basis-string order.
    pub fn components(&self) -> impl Iterator<Item = (String, Amplitude)> + '_ {
        let n = self.register.len();
        self.components
            .iter()
            .map(move |(&idx, &amp)| (label_of(idx, n), amp))
    }

    pub fn scale(&self, factor: Amplitude) -> Self {
        let mut out = self.clone();
        for amp in out.components.values_mut() {
            *amp *= factor;
        }
        out.prune();
        out
    }

    /// `self` followed by `other`; the registers must be disjoint.
    pub fn tensor(&self, other: &Ket) -> Result<Self> {
        if let Some(p) = other.register.iter().find(|p| self.register.contains(p)) {
            return Err(Error::OverlappingRegisters(*p));
        }
        let mut register = self.register.clone();
        register.extend_from_slice(&other.register);
        let mut out = Self::zero(&register)?;
        let shift = other.register.len();
        for (&ia, &a) in &self.components {
            for (&ib, &b) in &other.components {
                out.components.insert((ia << shift) | ib, a * b);
            }
        }
        out.prune();
        Ok(out)
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Ket) -> Result<Amplitude> {
        if self.register != other.register {
            return Err(Error::RegisterMismatch {
                left: self.register.clone(),
                right: other.register.clone(),
            });
        }
        Ok(self
            .components
            .iter()
            .filter_map(|(idx, a)| other.components.get(idx).map(|b| a.conj() * b))
            .sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm();
        if norm <= DEGENERATE_NORM {
            return Err(Error::DegenerateState(norm));
        }
        Ok(self.scale(Amplitude::new(1.0 / norm, 0.0)))
    }

    /// Applies `op` to the H/V amplitudes of `photon`.
    pub fn apply_one_photon(&self, op: &Matrix2, photon: PhotonId) -> Result<Self> {
        let pos = self.position(photon).ok_or(Error::UnknownPhoton(photon))?;
        let mask = 1u32 << (self.register.len() - 1 - pos);
        let mut out = Self::zero(&self.register)?;
        for (&idx, &amp) in &self.components {
            let col = usize::from(idx & mask != 0);
            *out.components.entry(idx & !mask).or_default() += op[0][col] * amp;
            *out.components.entry(idx | mask).or_default() += op[1][col] * amp;
        }
        out.prune();
        Ok(out)
    }

    /// The same state with its register listed in `order`.
    pub fn reorder(&self, order: &[PhotonId]) -> Result<Self> {
        let n = self.register.len();
        let same_set = order.len() == n && order.iter().all(|p| self.register.contains(p));
        if !same_set {
            return Err(Error::RegisterMismatch {
                left: self.register.clone(),
                right: order.to_vec(),
            });
        }
        let mut out = Self::zero(order)?;
        let source_pos: Vec<usize> = order
            .iter()
            .map(|p| self.position(*p).expect("checked above"))
            .collect();
        for (&idx, &amp) in &self.components {
            let mut packed = 0u32;
            for &src in &source_pos {
                packed = (packed << 1) | ((idx >> (n - 1 - src)) & 1);
            }
            out.components.insert(packed, amp);
        }
        Ok(out)
    }

    pub fn position(&self, photon: PhotonId) -> Option<usize> {
        self.register.iter().position(|p| *p == photon)
    }

    fn prune(&mut self) {
        self.components
            .retain(|_, a| a.norm_sqr() >= PRUNE_THRESHOLD);
    }
}

impl fmt::Display for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        let subscript: Vec<String> = self.register.iter().map(ToString::to_string).collect();
        for (i, (label, amp)) in self.components().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)|{}>", amp.re, amp.im, label)?;
        }
        write!(f, " [{}]", subscript.join(","))
    }
}

/// Contracts `bra` (on a sub-register of `state`) against `state`.
///
/// The result lives on the photons of `state` not covered by `bra`, keeps
/// their original order, and is not normalized: its squared norm is the
/// probability of finding the normalized `bra` on those photons.
pub fn partial_bra(bra: &Ket, state: &Ket) -> Result<Ket> {
    let n = state.register.len();
    let mut bra_bits = Vec::with_capacity(bra.register.len());
    for p in &bra.register {
        match state.position(*p) {
            Some(pos) => bra_bits.push(n - 1 - pos),
            None => {
                return Err(Error::NotSubset {
                    bra: bra.register.clone(),
                    state: state.register.clone(),
                })
            }
        }
    }
    let rest: Vec<(PhotonId, usize)> = state
        .register
        .iter()
        .enumerate()
        .filter(|(_, p)| !bra.register.contains(p))
        .map(|(pos, p)| (*p, n - 1 - pos))
        .collect();
    let rest_register: Vec<PhotonId> = rest.iter().map(|(p, _)| *p).collect();
    let mut out = Ket::zero(&rest_register)?;
    for (&idx, &amp) in &state.components {
        let bra_idx = bra_bits
            .iter()
            .fold(0u32, |acc, bit| (acc << 1) | ((idx >> bit) & 1));
        let Some(b) = bra.components.get(&bra_idx) else {
            continue;
        };
        let rest_idx = rest
            .iter()
            .fold(0u32, |acc, (_, bit)| (acc << 1) | ((idx >> bit) & 1));
        *out.components.entry(rest_idx).or_default() += b.conj() * amp;
    }
    out.prune();
    Ok(out)
}

/// `|<a/|a|, b/|b|>|`, the overlap of two states modulo global phase.
pub fn fidelity(a: &Ket, b: &Ket) -> Result<f64> {
    let na = a.norm();
    let nb = b.norm();
    if na <= DEGENERATE_NORM {
        return Err(Error::DegenerateState(na));
    }
    if nb <= DEGENERATE_NORM {
        return Err(Error::DegenerateState(nb));
    }
    Ok(a.inner(b)?.norm() / (na * nb))
}

/// Equality up to normalization and global phase.
pub fn phase_equal(a: &Ket, b: &Ket, tol: f64) -> Result<bool> {
    Ok(fidelity(a, b)? >= 1.0 - tol)
}
