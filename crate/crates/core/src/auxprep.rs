//! Auxiliary photon states consumed by the measurement protocol.
//!
//! Photon roles are fixed: 1, 2 carry the input, 3, 4 are the output pair,
//! 5, 6 are Bell-measured together with 1, 2, and 7 (or 7, 8) hold the
//! register that reveals which projector was applied.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::measurement::{ProjectorFamily, TwoPhotonBasis};
use crate::statevec::{Amplitude, Ket, PhotonId, Pol, DEFAULT_TOL};

pub const INPUT: [PhotonId; 2] = [PhotonId(1), PhotonId(2)];
pub const OUTPUT: [PhotonId; 2] = [PhotonId(3), PhotonId(4)];
pub const PARTNERS: [PhotonId; 2] = [PhotonId(5), PhotonId(6)];
pub const REGISTER_PAIR: [PhotonId; 2] = [PhotonId(7), PhotonId(8)];
pub const REGISTER_SINGLE: [PhotonId; 1] = [PhotonId(7)];

/// How the partner state on photons 5, 6 is derived from `|alpha^i>`.
///
/// Only [`PartnerConvention::ConjugateFlip`] teleports through `Psi+` as the
/// identity; the others exist to show that the choice matters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PartnerConvention {
    /// Conjugate every component and swap H and V on both photons.
    #[default]
    ConjugateFlip,
    ConjugateOnly,
    FlipOnly,
}

/// `|alpha^{i*}>` on photons 5, 6.
pub fn conjugate_partner(basis: &TwoPhotonBasis, i: usize) -> Result<Ket> {
    partner_with(basis, i, PartnerConvention::ConjugateFlip)
}

pub fn partner_with(
    basis: &TwoPhotonBasis,
    i: usize,
    convention: PartnerConvention,
) -> Result<Ket> {
    let alpha = basis.state(i)?;
    let mut comps = [Amplitude::new(0.0, 0.0); 4];
    for (k, a) in alpha.iter().enumerate() {
        // index 3 - k flips both photons: HH <-> VV, HV <-> VH
        match convention {
            PartnerConvention::ConjugateFlip => comps[3 - k] = a.conj(),
            PartnerConvention::ConjugateOnly => comps[k] = a.conj(),
            PartnerConvention::FlipOnly => comps[3 - k] = *a,
        }
    }
    Ket::from_pair(PARTNERS, comps)
}

/// Encoding of the subset index `j` on the register photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JEncoding {
    /// `|0> = |HH>78, |1> = |HV>78, |2> = |VH>78, |3> = |VV>78`.
    TwoPhoton,
    /// `|0> = |H>7, |1> = |V>7`.
    OnePhoton,
}

impl JEncoding {
    pub fn register(self) -> &'static [PhotonId] {
        match self {
            JEncoding::TwoPhoton => &REGISTER_PAIR,
            JEncoding::OnePhoton => &REGISTER_SINGLE,
        }
    }

    /// Number of distinct indices the register can hold.
    pub fn capacity(self) -> usize {
        1 << self.register().len()
    }

    /// The basis ket for `j`, which is also the `j`-th register basis state in H-before-V order.
    pub fn encode(self, j: usize) -> Result<Ket> {
        let width = self.register().len();
        if j >= self.capacity() {
            return Err(Error::IndexOutOfRange {
                what: "register index",
                index: j,
                limit: self.capacity(),
            });
        }
        let labels: Vec<Pol> = (0..width)
            .map(|pos| Pol::from_bit((j >> (width - 1 - pos)) as u32))
            .collect();
        Ket::basis(self.register(), &labels)
    }
}

pub fn encode_j_two_photon(j: usize) -> Result<Ket> {
    JEncoding::TwoPhoton.encode(j)
}

pub fn encode_j_one_photon(j: usize) -> Result<Ket> {
    JEncoding::OnePhoton.encode(j)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxVariant {
    /// Photons 3..8, register on 7, 8.
    General,
    /// Photons 3..7, register on 7.
    Parity5,
    /// Photons 3..6, no register; realizes only the even-parity filter.
    Parity4,
}

impl AuxVariant {
    pub fn register(self) -> Vec<PhotonId> {
        let top = match self {
            AuxVariant::General => 8,
            AuxVariant::Parity5 => 7,
            AuxVariant::Parity4 => 6,
        };
        (3..=top).map(PhotonId).collect()
    }

    pub fn encoding(self) -> Option<JEncoding> {
        match self {
            AuxVariant::General => Some(JEncoding::TwoPhoton),
            AuxVariant::Parity5 => Some(JEncoding::OnePhoton),
            AuxVariant::Parity4 => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuxState {
    ket: Ket,
    variant: AuxVariant,
}

impl AuxState {
    /// Wraps `ket` after checking its register and norm against `variant`.
    pub fn from_ket(ket: Ket, variant: AuxVariant) -> Result<Self> {
        if ket.register() != variant.register() {
            return Err(Error::RegisterMismatch {
                left: ket.register().to_vec(),
                right: variant.register(),
            });
        }
        let norm = ket.norm();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { ket, variant })
    }

    pub fn ket(&self) -> &Ket {
        &self.ket
    }

    pub fn variant(&self) -> AuxVariant {
        self.variant
    }

    pub fn into_ket(self) -> Ket {
        self.ket
    }
}

/// `|X> = 1/2 sum_j sum_i pi_i^j |alpha^i>34 |alpha^{i*}>56 |j>78`.
pub fn build_general_aux(family: &ProjectorFamily) -> Result<AuxState> {
    build_aux(
        family,
        JEncoding::TwoPhoton,
        PartnerConvention::ConjugateFlip,
    )
}

/// The general construction with a chosen register encoding and partner convention.
///
/// With [`JEncoding::OnePhoton`] the family may have at most two subsets and
/// the result has the five-photon layout.
pub fn build_aux(
    family: &ProjectorFamily,
    encoding: JEncoding,
    convention: PartnerConvention,
) -> Result<AuxState> {
    let basis = family.basis();
    let assignment = family.assignment();
    let mut terms = Vec::with_capacity(4);
    for i in 0..4 {
        let kept = Ket::from_pair(OUTPUT, *basis.state(i)?)?;
        let partner = partner_with(basis, i, convention)?;
        let register = encoding.encode(assignment.subset_of(i))?;
        terms.push(kept.tensor(&partner)?.tensor(&register)?);
    }
    let half = Amplitude::new(0.5, 0.0);
    let refs: Vec<(Amplitude, &Ket)> = terms.iter().map(|k| (half, k)).collect();
    let variant = match encoding {
        JEncoding::TwoPhoton => AuxVariant::General,
        JEncoding::OnePhoton => AuxVariant::Parity5,
    };
    AuxState::from_ket(Ket::superpose(&refs)?, variant)
}

/// `1/2 [(|HH>34|VV>56 + |VV>34|HH>56)|H>7 + (|HV>34|VH>56 + |VH>34|HV>56)|V>7]`.
pub fn build_parity_aux5() -> Result<AuxState> {
    use Pol::{H, V};
    let register = AuxVariant::Parity5.register();
    let half = Amplitude::new(0.5, 0.0);
    let terms: [(&[Pol], Amplitude); 4] = [
        (&[H, H, V, V, H], half),
        (&[V, V, H, H, H], half),
        (&[H, V, V, H, V], half),
        (&[V, H, H, V, V], half),
    ];
    AuxState::from_ket(Ket::from_components(&register, terms)?, AuxVariant::Parity5)
}

/// `(|HH>34|VV>56 + |VV>34|HH>56) / sqrt 2`.
pub fn build_parity_aux4() -> Result<AuxState> {
    use Pol::{H, V};
    let register = AuxVariant::Parity4.register();
    let s = Amplitude::new(FRAC_1_SQRT_2, 0.0);
    let terms: [(&[Pol], Amplitude); 2] = [(&[H, H, V, V], s), (&[V, V, H, H], s)];
    AuxState::from_ket(Ket::from_components(&register, terms)?, AuxVariant::Parity4)
}
