//! Orthonormal two-photon bases and the projector families built from them.
//!
//! Two-photon components are always ordered (HH, HV, VH, VV).

use crate::error::{Error, GramEntry, Result};
use crate::statevec::{Amplitude, Ket, DEFAULT_TOL};

pub type Vector4 = [Amplitude; 4];
pub type Matrix4 = [[Amplitude; 4]; 4];

const ZERO: Amplitude = Amplitude::new(0.0, 0.0);
const ONE: Amplitude = Amplitude::new(1.0, 0.0);

pub const PAIR_LABELS: [&str; 4] = ["HH", "HV", "VH", "VV"];

pub fn identity4() -> Matrix4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn matmul4(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        for (k, entry) in row.iter_mut().enumerate() {
            *entry = (0..4).map(|l| a[i][l] * b[l][k]).sum();
        }
    }
    m
}

pub fn adjoint4(a: &Matrix4) -> Matrix4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        for (k, entry) in row.iter_mut().enumerate() {
            *entry = a[k][i].conj();
        }
    }
    m
}

pub fn apply4(a: &Matrix4, v: &Vector4) -> Vector4 {
    let mut out = [ZERO; 4];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|k| a[i][k] * v[k]).sum();
    }
    out
}

/// Entrywise max |a - b|.
pub fn max_abs_diff(a: &Matrix4, b: &Matrix4) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn outer(v: &Vector4) -> Matrix4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        for (k, entry) in row.iter_mut().enumerate() {
            *entry = v[i] * v[k].conj();
        }
    }
    m
}

fn dot(a: &Vector4, b: &Vector4) -> Amplitude {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Four orthonormal two-photon states `|alpha^i>`, i = 0..3.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonBasis {
    states: [Vector4; 4],
}

impl TwoPhotonBasis {
    /// Accepts `states` if their Gram matrix is the identity within 1e-10.
    pub fn new(states: [Vector4; 4]) -> Result<Self> {
        let mut bad = Vec::new();
        for i in 0..4 {
            for k in i..4 {
                let g = dot(&states[i], &states[k]);
                let target = if i == k { ONE } else { ZERO };
                if (g - target).norm() >= DEFAULT_TOL {
                    bad.push(GramEntry {
                        row: i,
                        col: k,
                        re: g.re,
                        im: g.im,
                    });
                }
            }
        }
        if bad.is_empty() {
            Ok(Self { states })
        } else {
            Err(Error::NonOrthonormal(bad))
        }
    }

    /// {HH, HV, VH, VV} in component order.
    pub fn computational() -> Self {
        let m = identity4();
        Self { states: m }
    }

    pub fn states(&self) -> &[Vector4; 4] {
        &self.states
    }

    pub fn state(&self, i: usize) -> Result<&Vector4> {
        self.states.get(i).ok_or(Error::IndexOutOfRange {
            what: "basis",
            index: i,
            limit: 4,
        })
    }

    pub fn gram(&self) -> Matrix4 {
        let mut g = [[ZERO; 4]; 4];
        for (i, row) in g.iter_mut().enumerate() {
            for (k, entry) in row.iter_mut().enumerate() {
                *entry = dot(&self.states[i], &self.states[k]);
            }
        }
        g
    }
}

/// Binary assignment of each basis state to exactly one of `subsets` groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    labels: [usize; 4],
    subsets: usize,
}

impl Assignment {
    /// Builds from a 4 x J table of 0/1 entries.
    pub fn from_matrix(rows: &[Vec<u8>]) -> Result<Self> {
        if rows.len() != 4 {
            return Err(Error::AssignmentShape(rows.len()));
        }
        let subsets = rows[0].len();
        if rows.iter().any(|r| r.len() != subsets) {
            return Err(Error::AssignmentShape(rows.len()));
        }
        if !(1..=4).contains(&subsets) {
            return Err(Error::SubsetCount(subsets));
        }
        let mut labels = [0; 4];
        for (row, entries) in rows.iter().enumerate() {
            for (col, &value) in entries.iter().enumerate() {
                if value > 1 {
                    return Err(Error::AssignmentEntry { row, col, value });
                }
            }
            let ones: Vec<usize> = entries
                .iter()
                .enumerate()
                .filter(|(_, &v)| v == 1)
                .map(|(c, _)| c)
                .collect();
            if ones.len() != 1 {
                return Err(Error::AssignmentRow {
                    row,
                    ones: ones.len(),
                });
            }
            labels[row] = ones[0];
        }
        Self::with_subsets(labels, subsets)
    }

    /// Builds from the subset index of each basis state; J is the largest label plus one.
    pub fn from_labels(labels: [usize; 4]) -> Result<Self> {
        let subsets = labels.iter().max().map_or(0, |m| m + 1);
        Self::with_subsets(labels, subsets)
    }

    fn with_subsets(labels: [usize; 4], subsets: usize) -> Result<Self> {
        if !(1..=4).contains(&subsets) {
            return Err(Error::SubsetCount(subsets));
        }
        for j in 0..subsets {
            if !labels.contains(&j) {
                return Err(Error::EmptySubset(j));
            }
        }
        Ok(Self { labels, subsets })
    }

    /// J, the number of projectors.
    pub fn subsets(&self) -> usize {
        self.subsets
    }

    /// The subset `j` that basis state `i` belongs to.
    pub fn subset_of(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> [usize; 4] {
        self.labels
    }

    /// pi_i^j.
    pub fn pi(&self, i: usize, j: usize) -> u8 {
        u8::from(self.labels[i] == j)
    }

    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        (0..4)
            .map(|i| (0..self.subsets).map(|j| self.pi(i, j)).collect())
            .collect()
    }
}

/// Complete family of orthogonal projectors `P_j = sum_i pi_i^j |alpha^i><alpha^i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorFamily {
    basis: TwoPhotonBasis,
    assignment: Assignment,
    projectors: Vec<Matrix4>,
}

impl ProjectorFamily {
    pub fn new(basis: TwoPhotonBasis, assignment: Assignment) -> Result<Self> {
        let mut projectors = vec![[[ZERO; 4]; 4]; assignment.subsets()];
        for (i, state) in basis.states.iter().enumerate() {
            let piece = outer(state);
            let target = &mut projectors[assignment.subset_of(i)];
            for (row, piece_row) in target.iter_mut().zip(piece.iter()) {
                for (t, p) in row.iter_mut().zip(piece_row) {
                    *t += p;
                }
            }
        }
        let family = Self {
            basis,
            assignment,
            projectors,
        };
        family.check_invariants(DEFAULT_TOL)?;
        Ok(family)
    }

    /// The parity operators: `P_0 = |HH><HH| + |VV><VV|`, `P_1 = |HV><HV| + |VH><VH|`,
    /// with alpha^0..3 = HH, VV, HV, VH.
    pub fn parity() -> Self {
        let e = identity4();
        let basis = TwoPhotonBasis {
            states: [e[0], e[3], e[1], e[2]],
        };
        let assignment = Assignment {
            labels: [0, 0, 1, 1],
            subsets: 2,
        };
        Self::new(basis, assignment).expect("parity family is valid")
    }

    pub fn basis(&self) -> &TwoPhotonBasis {
        &self.basis
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn subsets(&self) -> usize {
        self.projectors.len()
    }

    pub fn projectors(&self) -> &[Matrix4] {
        &self.projectors
    }

    pub fn projector(&self, j: usize) -> Result<&Matrix4> {
        self.projectors.get(j).ok_or(Error::IndexOutOfRange {
            what: "projector",
            index: j,
            limit: self.projectors.len(),
        })
    }

    /// True when the projectors coincide with the parity operators.
    pub fn is_parity(&self) -> bool {
        let parity = Self::parity();
        self.projectors.len() == 2
            && self
                .projectors
                .iter()
                .zip(parity.projectors.iter())
                .all(|(a, b)| max_abs_diff(a, b) < DEFAULT_TOL)
    }

    /// Hermiticity, idempotence, mutual orthogonality and completeness.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let zero = [[ZERO; 4]; 4];
        let mut sum = zero;
        for (j, p) in self.projectors.iter().enumerate() {
            let herm = max_abs_diff(p, &adjoint4(p));
            if herm >= tol {
                return Err(Error::FamilyInvariant(format!(
                    "P_{j} not Hermitian (deviation {herm:e})"
                )));
            }
            let idem = max_abs_diff(&matmul4(p, p), p);
            if idem >= tol {
                return Err(Error::FamilyInvariant(format!(
                    "P_{j} not idempotent (deviation {idem:e})"
                )));
            }
            for (k, q) in self.projectors.iter().enumerate().skip(j + 1) {
                let overlap = max_abs_diff(&matmul4(p, q), &zero);
                if overlap >= tol {
                    return Err(Error::FamilyInvariant(format!(
                        "P_{j} P_{k} != 0 (deviation {overlap:e})"
                    )));
                }
            }
            for (row, prow) in sum.iter_mut().zip(p.iter()) {
                for (s, x) in row.iter_mut().zip(prow) {
                    *s += x;
                }
            }
        }
        let complete = max_abs_diff(&sum, &identity4());
        if complete >= tol {
            return Err(Error::FamilyInvariant(format!(
                "sum of projectors != I (deviation {complete:e})"
            )));
        }
        Ok(())
    }

    /// Unnormalized `P_j|beta>`, accumulated from the rank-1 pieces.
    pub fn apply_projector(&self, j: usize, beta: &Ket) -> Result<Ket> {
        self.projector(j)?;
        let register: [_; 2] = match beta.register() {
            [a, b] => [*a, *b],
            other => {
                return Err(Error::LengthMismatch {
                    register: other.len(),
                    labels: 2,
                })
            }
        };
        let mut terms = Vec::new();
        for (i, state) in self.basis.states.iter().enumerate() {
            if self.assignment.subset_of(i) != j {
                continue;
            }
            let alpha = Ket::from_pair(register, *state)?;
            terms.push((alpha.inner(beta)?, alpha));
        }
        let refs: Vec<(Amplitude, &Ket)> = terms.iter().map(|(c, k)| (*c, k)).collect();
        Ket::superpose(&refs)
    }

    /// `<beta|P_j|beta>` for a unit `beta`.
    pub fn expectation(&self, j: usize, beta: &Ket) -> Result<f64> {
        let norm = beta.norm();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(self.apply_projector(j, beta)?.norm_sqr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::{photons, PhotonId, Pol};
    use std::f64::consts::FRAC_1_SQRT_2;

    const PAIR: [PhotonId; 2] = [PhotonId(1), PhotonId(2)];

    fn c(re: f64) -> Amplitude {
        Amplitude::new(re, 0.0)
    }

    fn bell_basis() -> [Vector4; 4] {
        let s = c(FRAC_1_SQRT_2);
        [
            [s, ZERO, ZERO, s],
            [s, ZERO, ZERO, -s],
            [ZERO, s, s, ZERO],
            [ZERO, s, -s, ZERO],
        ]
    }

    #[test]
    fn validates_standard_bases() {
        assert!(TwoPhotonBasis::new(identity4()).is_ok());
        assert!(TwoPhotonBasis::new(bell_basis()).is_ok());
    }

    #[test]
    fn rejects_repeated_state() {
        let e = identity4();
        let err = TwoPhotonBasis::new([e[0], e[0], e[2], e[3]]).unwrap_err();
        match err {
            Error::NonOrthonormal(entries) => {
                assert_eq!(entries.len(), 1);
                assert_eq!((entries[0].row, entries[0].col), (0, 1));
                assert_eq!(entries[0].re, 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn computational_split_gives_diagonal_projector() {
        let a = Assignment::from_labels([0, 0, 1, 1]).unwrap();
        let f = ProjectorFamily::new(TwoPhotonBasis::computational(), a).unwrap();
        let p0 = f.projector(0).unwrap();
        for (i, row) in p0.iter().enumerate() {
            for (k, entry) in row.iter().enumerate() {
                let expected = if i == k && i < 2 { ONE } else { ZERO };
                assert_eq!(*entry, expected);
            }
        }
    }

    #[test]
    fn single_subset_is_identity() {
        let a = Assignment::from_matrix(&[vec![1], vec![1], vec![1], vec![1]]).unwrap();
        let f = ProjectorFamily::new(TwoPhotonBasis::new(bell_basis()).unwrap(), a).unwrap();
        assert!(max_abs_diff(f.projector(0).unwrap(), &identity4()) < 1e-15);
    }

    #[test]
    fn identity_assignment_gives_rank_one_projectors() {
        let basis = TwoPhotonBasis::new(bell_basis()).unwrap();
        let a = Assignment::from_labels([0, 1, 2, 3]).unwrap();
        let f = ProjectorFamily::new(basis.clone(), a).unwrap();
        for j in 0..4 {
            assert!(max_abs_diff(f.projector(j).unwrap(), &outer(&basis.states()[j])) < 1e-15);
        }
    }

    #[test]
    fn assignment_errors() {
        assert_eq!(
            Assignment::from_matrix(&[vec![1, 1], vec![1, 0], vec![0, 1], vec![0, 1]]),
            Err(Error::AssignmentRow { row: 0, ones: 2 })
        );
        assert_eq!(
            Assignment::from_matrix(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![0, 1]]),
            Err(Error::AssignmentRow { row: 0, ones: 0 })
        );
        assert_eq!(
            Assignment::from_matrix(&[vec![1, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 1, 0]]),
            Err(Error::EmptySubset(2))
        );
        assert_eq!(
            Assignment::from_matrix(&[vec![2], vec![1], vec![1], vec![1]]),
            Err(Error::AssignmentEntry {
                row: 0,
                col: 0,
                value: 2
            })
        );
        assert_eq!(
            Assignment::from_matrix(&[vec![1], vec![1], vec![1]]),
            Err(Error::AssignmentShape(3))
        );
        assert_eq!(
            Assignment::from_labels([0, 0, 2, 2]),
            Err(Error::EmptySubset(1))
        );
        assert_eq!(
            Assignment::from_labels([0, 1, 2, 4]),
            Err(Error::SubsetCount(5))
        );
    }

    #[test]
    fn parity_family_acts_as_expected() {
        let f = ProjectorFamily::parity();
        assert!(f.is_parity());
        let hh = Ket::basis(&PAIR, &[Pol::H, Pol::H]).unwrap();
        assert_eq!(f.apply_projector(0, &hh).unwrap(), hh);
        assert!(f.apply_projector(1, &hh).unwrap().is_zero());
        let sum: Matrix4 = {
            let mut s = *f.projector(0).unwrap();
            for (row, prow) in s.iter_mut().zip(f.projector(1).unwrap()) {
                for (x, y) in row.iter_mut().zip(prow) {
                    *x += y;
                }
            }
            s
        };
        assert_eq!(max_abs_diff(&sum, &identity4()), 0.0);
        assert!(!ProjectorFamily::new(
            TwoPhotonBasis::computational(),
            Assignment::from_labels([0, 1, 0, 1]).unwrap()
        )
        .unwrap()
        .is_parity());
    }

    #[test]
    fn projector_on_superposition() {
        let f = ProjectorFamily::parity();
        let s = c(FRAC_1_SQRT_2);
        let beta = Ket::from_pair(PAIR, [s, s, ZERO, ZERO]).unwrap();
        let out = f.apply_projector(0, &beta).unwrap();
        let expected = Ket::from_pair(PAIR, [s, ZERO, ZERO, ZERO]).unwrap();
        assert_eq!(out, expected);
        let e0 = f.expectation(0, &beta).unwrap();
        assert!((e0 - 0.5).abs() < 1e-15);
        assert!((f.expectation(1, &beta).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(
            f.expectation(0, &Ket::basis(&PAIR, &[Pol::H, Pol::H]).unwrap()),
            Ok(1.0)
        );
    }

    #[test]
    fn projector_errors() {
        let f = ProjectorFamily::parity();
        let hh = Ket::basis(&PAIR, &[Pol::H, Pol::H]).unwrap();
        assert!(matches!(
            f.apply_projector(2, &hh),
            Err(Error::IndexOutOfRange { index: 2, .. })
        ));
        let three = Ket::basis(&photons(&[1, 2, 3]), &[Pol::H; 3]).unwrap();
        assert!(f.apply_projector(0, &three).is_err());
        assert!(matches!(
            f.expectation(0, &hh.scale(c(2.0))),
            Err(Error::NotNormalized(_))
        ));
    }
}
