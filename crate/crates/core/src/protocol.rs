//! Exhaustive enumeration of the measurement protocol.
//!
//! The input pair is joined with an auxiliary state, photons (1,5) and (2,6)
//! are projected on every Bell outcome, and accepted outcomes are followed by
//! a register measurement and local Z corrections. Every outcome path is kept
//! as a [`Branch`], including the ones the analyzer rejects.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::auxprep::{
    build_aux, build_general_aux, build_parity_aux4, build_parity_aux5, AuxState, AuxVariant,
    JEncoding, PartnerConvention, INPUT, OUTPUT, REGISTER_SINGLE,
};
use crate::error::{Error, Result};
use crate::measurement::{apply4, ProjectorFamily};
use crate::statevec::{
    fidelity, identity2, partial_bra, pauli_z, Amplitude, Ket, Matrix2, PhotonId, Pol, DEFAULT_TOL,
    DEGENERATE_NORM,
};

/// Branches below this probability are reported as `Zero`.
pub const ZERO_PROBABILITY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BellOutcome {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellOutcome {
    /// Enumeration order used for every report.
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BellOutcome::PsiPlus => "psi+",
            BellOutcome::PsiMinus => "psi-",
            BellOutcome::PhiPlus => "phi+",
            BellOutcome::PhiMinus => "phi-",
        }
    }

    pub fn is_psi(self) -> bool {
        matches!(self, BellOutcome::PsiPlus | BellOutcome::PsiMinus)
    }

    /// `Psi+- = (|HV> +- |VH>)/sqrt2`, `Phi+- = (|HH> +- |VV>)/sqrt2` on `pair`.
    pub fn ket(self, pair: [PhotonId; 2]) -> Result<Ket> {
        self.ket_scaled(pair, FRAC_1_SQRT_2)
    }

    /// The Bell state times sqrt2, with entries +-1.
    fn ket_unscaled(self, pair: [PhotonId; 2]) -> Result<Ket> {
        self.ket_scaled(pair, 1.0)
    }

    fn ket_scaled(self, pair: [PhotonId; 2], s: f64) -> Result<Ket> {
        use Pol::{H, V};
        let (first, second): (&[Pol], &[Pol]) = if self.is_psi() {
            (&[H, V], &[V, H])
        } else {
            (&[H, H], &[V, V])
        };
        let sign = match self {
            BellOutcome::PsiPlus | BellOutcome::PhiPlus => s,
            BellOutcome::PsiMinus | BellOutcome::PhiMinus => -s,
        };
        Ket::from_components(
            &pair,
            [
                (first, Amplitude::new(s, 0.0)),
                (second, Amplitude::new(sign, 0.0)),
            ],
        )
    }
}

impl fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn bell_ket(kind: BellOutcome, pair: [PhotonId; 2]) -> Result<Ket> {
    kind.ket(pair)
}

/// The Bell outcomes a detector setup can tell apart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzerModel {
    distinguishable: Vec<BellOutcome>,
}

impl Default for AnalyzerModel {
    fn default() -> Self {
        Self::linear()
    }
}

impl AnalyzerModel {
    /// Linear optics: only `Psi+` and `Psi-` are identified.
    pub fn linear() -> Self {
        Self::new([BellOutcome::PsiPlus, BellOutcome::PsiMinus])
    }

    pub fn ideal() -> Self {
        Self::new(BellOutcome::ALL)
    }

    pub fn new(kinds: impl IntoIterator<Item = BellOutcome>) -> Self {
        let mut distinguishable: Vec<BellOutcome> = kinds.into_iter().collect();
        distinguishable.sort();
        distinguishable.dedup();
        Self { distinguishable }
    }

    pub fn distinguishes(&self, kind: BellOutcome) -> bool {
        self.distinguishable.contains(&kind)
    }

    pub fn distinguishable(&self) -> &[BellOutcome] {
        &self.distinguishable
    }

    pub fn name(&self) -> &'static str {
        if *self == Self::linear() {
            "linear"
        } else if *self == Self::ideal() {
            "ideal"
        } else {
            "custom"
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Six-photon auxiliary state, any projector family, register on 7, 8.
    General,
    /// Five-photon auxiliary state for the parity family, register on 7.
    Parity5,
    /// Four-photon auxiliary state realizing the even-parity filter alone.
    Parity4,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::General, Mode::Parity5, Mode::Parity4];

    pub fn name(self) -> &'static str {
        match self {
            Mode::General => "general",
            Mode::Parity5 => "parity5",
            Mode::Parity4 => "parity4",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn aux_variant(self) -> AuxVariant {
        match self {
            Mode::General => AuxVariant::General,
            Mode::Parity5 => AuxVariant::Parity5,
            Mode::Parity4 => AuxVariant::Parity4,
        }
    }

    /// Bell pairs this mode can post-select on.
    pub fn admits(self, bell15: BellOutcome, bell26: BellOutcome) -> bool {
        match self {
            Mode::General => bell15 == BellOutcome::PsiPlus && bell26 == BellOutcome::PsiPlus,
            Mode::Parity5 | Mode::Parity4 => bell15.is_psi() && bell26.is_psi(),
        }
    }

    /// Probability of each admitted Bell pair, per unit of `<beta|P_j|beta>`.
    pub fn pair_weight(self) -> f64 {
        match self {
            Mode::General | Mode::Parity5 => 1.0 / 16.0,
            Mode::Parity4 => 1.0 / 8.0,
        }
    }

    /// Projector indices the mode can herald.
    pub fn realized_subsets(self, subsets: usize) -> Vec<usize> {
        match self {
            Mode::General | Mode::Parity5 => (0..subsets).collect(),
            Mode::Parity4 => vec![0],
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionOp {
    Z,
    Identity,
}

impl CorrectionOp {
    pub fn matrix(self) -> Matrix2 {
        match self {
            CorrectionOp::Z => pauli_z(),
            CorrectionOp::Identity => identity2(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CorrectionOp::Z => "Z",
            CorrectionOp::Identity => "I",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Correction {
    pub photon: PhotonId,
    pub op: CorrectionOp,
}

impl Correction {
    pub fn z(photon: u8) -> Self {
        Self {
            photon: PhotonId(photon),
            op: CorrectionOp::Z,
        }
    }
}

/// Local operations applied to photons 3, 4 for each correctable Bell pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionRules {
    rules: Vec<((BellOutcome, BellOutcome), Vec<Correction>)>,
}

impl Default for CorrectionRules {
    fn default() -> Self {
        Self::standard()
    }
}

impl CorrectionRules {
    /// `Psi-` on (1,5) is undone by Z on 3, `Psi-` on (2,6) by Z on 4.
    pub fn standard() -> Self {
        use BellOutcome::{PsiMinus, PsiPlus};
        Self {
            rules: vec![
                ((PsiPlus, PsiPlus), vec![]),
                ((PsiPlus, PsiMinus), vec![Correction::z(4)]),
                ((PsiMinus, PsiPlus), vec![Correction::z(3)]),
                (
                    (PsiMinus, PsiMinus),
                    vec![Correction::z(3), Correction::z(4)],
                ),
            ],
        }
    }

    /// Replaces (or adds) the rule for one Bell pair.
    pub fn with_rule(mut self, pair: (BellOutcome, BellOutcome), ops: Vec<Correction>) -> Self {
        self.rules.retain(|(p, _)| *p != pair);
        self.rules.push((pair, ops));
        self
    }

    pub fn lookup(&self, pair: (BellOutcome, BellOutcome)) -> Option<&[Correction]> {
        self.rules
            .iter()
            .find(|(p, _)| *p == pair)
            .map(|(_, ops)| ops.as_slice())
    }

    pub fn apply(&self, pair: (BellOutcome, BellOutcome), residual: &Ket) -> Result<Ket> {
        for p in OUTPUT {
            if residual.position(p).is_none() {
                return Err(Error::UnknownPhoton(p));
            }
        }
        let ops = self
            .lookup(pair)
            .ok_or_else(|| Error::NoCorrection(format!("({}, {})", pair.0, pair.1)))?;
        ops.iter().try_fold(residual.clone(), |state, c| {
            state.apply_one_photon(&c.op.matrix(), c.photon)
        })
    }
}

/// Applies the standard corrections for the Bell pair `(bell15, bell26)`.
pub fn apply_corrections(pair: (BellOutcome, BellOutcome), residual: &Ket) -> Result<Ket> {
    CorrectionRules::standard().apply(pair, residual)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Heralded `P_j` without corrections.
    Success(usize),
    /// Heralded `P_j` after local corrections.
    Corrected(usize),
    Inconclusive,
    Zero,
}

impl Classification {
    pub fn subset(self) -> Option<usize> {
        match self {
            Classification::Success(j) | Classification::Corrected(j) => Some(j),
            _ => None,
        }
    }

    pub fn is_success(self) -> bool {
        self.subset().is_some()
    }

    pub fn label(self) -> String {
        match self {
            Classification::Success(j) => format!("success:{j}"),
            Classification::Corrected(j) => format!("corrected:{j}"),
            Classification::Inconclusive => "inconclusive".into(),
            Classification::Zero => "zero".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub bell15: BellOutcome,
    pub bell26: BellOutcome,
    /// H/V string observed on the register photons, when they were measured.
    pub register_result: Option<String>,
    pub probability: f64,
    /// Normalized state of the unmeasured photons; absent for zero branches.
    pub residual: Option<Ket>,
    pub corrections: Vec<Correction>,
    pub classification: Classification,
    /// Overlap of the residual with `normalize(P_j beta)` on success branches.
    pub fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Totals {
    pub success_probability: f64,
    /// Distribution of `j` conditioned on success; all zero if nothing succeeds.
    pub conditional_j: Vec<f64>,
    pub inconclusive_probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolReport {
    pub mode: Mode,
    pub analyzer: AnalyzerModel,
    pub input: Ket,
    pub family: ProjectorFamily,
    pub branches: Vec<Branch>,
    pub totals: Totals,
}

impl ProtocolReport {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    pub fn success_branches(&self) -> impl Iterator<Item = &Branch> {
        self.branches
            .iter()
            .filter(|b| b.classification.is_success())
    }

    pub fn branch(
        &self,
        bell15: BellOutcome,
        bell26: BellOutcome,
    ) -> impl Iterator<Item = &Branch> {
        self.branches
            .iter()
            .filter(move |b| b.bell15 == bell15 && b.bell26 == bell26)
    }
}

/// Knobs that replace parts of the standard construction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProtocolOptions {
    pub partner: PartnerConvention,
    pub corrections: CorrectionRules,
}

pub fn run_protocol(
    beta: &Ket,
    family: &ProjectorFamily,
    mode: Mode,
    analyzer: &AnalyzerModel,
) -> Result<ProtocolReport> {
    run_protocol_with(beta, family, mode, analyzer, &ProtocolOptions::default())
}

/// The auxiliary state used by `mode`.
pub fn aux_for_mode(
    family: &ProjectorFamily,
    mode: Mode,
    partner: PartnerConvention,
) -> Result<AuxState> {
    if mode != Mode::General && !family.is_parity() {
        return Err(Error::ModeFamilyMismatch { mode: mode.name() });
    }
    let standard = partner == PartnerConvention::ConjugateFlip;
    match mode {
        Mode::General if standard => build_general_aux(family),
        Mode::General => build_aux(family, JEncoding::TwoPhoton, partner),
        Mode::Parity5 if standard => build_parity_aux5(),
        Mode::Parity5 => build_aux(family, JEncoding::OnePhoton, partner),
        Mode::Parity4 if standard => build_parity_aux4(),
        Mode::Parity4 => {
            // the filter state is the even-parity slice of the five-photon one
            let five = build_aux(family, JEncoding::OnePhoton, partner)?;
            let even = Ket::basis(&REGISTER_SINGLE, &[Pol::H])?;
            let four = partial_bra(&even, five.ket())?.normalize()?;
            AuxState::from_ket(four, AuxVariant::Parity4)
        }
    }
}

pub fn run_protocol_with(
    beta: &Ket,
    family: &ProjectorFamily,
    mode: Mode,
    analyzer: &AnalyzerModel,
    options: &ProtocolOptions,
) -> Result<ProtocolReport> {
    if beta.register() != INPUT {
        return Err(Error::RegisterMismatch {
            left: beta.register().to_vec(),
            right: INPUT.to_vec(),
        });
    }
    let norm = beta.norm();
    if (norm - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let aux = aux_for_mode(family, mode, options.partner)?;
    let total = beta.tensor(aux.ket())?;
    let targets = target_states(beta, family)?;
    let encoding = aux.variant().encoding();

    // The two 1/sqrt2 Bell prefactors are applied together as an exact 1/2,
    // so dyadic inputs give dyadic branch probabilities.
    let half = Amplitude::new(0.5, 0.0);
    let mut branches = Vec::new();
    for bell15 in BellOutcome::ALL {
        let after15 = partial_bra(&bell15.ket_unscaled([PhotonId(1), PhotonId(5)])?, &total)?;
        for bell26 in BellOutcome::ALL {
            let residual =
                partial_bra(&bell26.ket_unscaled([PhotonId(2), PhotonId(6)])?, &after15)?
                    .scale(half);
            let pair = (bell15, bell26);
            let rule = options.corrections.lookup(pair);
            let accepted = mode.admits(bell15, bell26)
                && analyzer.distinguishes(bell15)
                && analyzer.distinguishes(bell26)
                && rule.is_some();
            if !accepted {
                let probability = residual.norm_sqr();
                let (classification, residual) = if probability < ZERO_PROBABILITY {
                    (Classification::Zero, None)
                } else {
                    (Classification::Inconclusive, Some(residual.normalize()?))
                };
                branches.push(Branch {
                    bell15,
                    bell26,
                    register_result: None,
                    probability,
                    residual,
                    corrections: vec![],
                    classification,
                    fidelity: None,
                });
                continue;
            }
            let ctx = Heralded {
                pair,
                rules: &options.corrections,
                targets: &targets,
                subsets: family.subsets(),
            };
            match encoding {
                Some(enc) => {
                    for k in 0..enc.capacity() {
                        let register_ket = enc.encode(k)?;
                        let label: String = register_ket
                            .components()
                            .next()
                            .map(|(l, _)| l)
                            .unwrap_or_default();
                        let projected = partial_bra(&register_ket, &residual)?;
                        branches.push(ctx.branch(projected, Some(label), k)?);
                    }
                }
                None => branches.push(ctx.branch(residual, None, 0)?),
            }
        }
    }

    let totals = totals(&branches, family.subsets());
    Ok(ProtocolReport {
        mode,
        analyzer: analyzer.clone(),
        input: beta.clone(),
        family: family.clone(),
        branches,
        totals,
    })
}

/// `normalize(P_j beta)` relabelled onto the output pair, `None` where `P_j beta = 0`.
fn target_states(beta: &Ket, family: &ProjectorFamily) -> Result<Vec<Option<Ket>>> {
    (0..family.subsets())
        .map(|j| {
            let projected = family.apply_projector(j, beta)?;
            let moved = Ket::from_pair(OUTPUT, projected.to_pair()?)?;
            Ok(if moved.norm() > DEGENERATE_NORM {
                Some(moved.normalize()?)
            } else {
                None
            })
        })
        .collect()
}

struct Heralded<'a> {
    pair: (BellOutcome, BellOutcome),
    rules: &'a CorrectionRules,
    targets: &'a [Option<Ket>],
    subsets: usize,
}

impl Heralded<'_> {
    fn branch(&self, state: Ket, register_result: Option<String>, k: usize) -> Result<Branch> {
        let probability = state.norm_sqr();
        let mut branch = Branch {
            bell15: self.pair.0,
            bell26: self.pair.1,
            register_result,
            probability,
            residual: None,
            corrections: vec![],
            classification: Classification::Zero,
            fidelity: None,
        };
        if probability < ZERO_PROBABILITY {
            return Ok(branch);
        }
        let corrected = self.rules.apply(self.pair, &state)?.normalize()?;
        branch.corrections = self.rules.lookup(self.pair).unwrap_or_default().to_vec();
        if k >= self.subsets {
            branch.classification = Classification::Inconclusive;
        } else {
            branch.classification = if branch.corrections.is_empty() {
                Classification::Success(k)
            } else {
                Classification::Corrected(k)
            };
            branch.fidelity = Some(match &self.targets[k] {
                Some(target) if target.register() == corrected.register() => {
                    fidelity(target, &corrected)?
                }
                _ => 0.0,
            });
        }
        branch.residual = Some(corrected);
        Ok(branch)
    }
}

fn totals(branches: &[Branch], subsets: usize) -> Totals {
    let mut per_j = vec![0.0; subsets];
    let mut success = 0.0;
    let mut inconclusive = 0.0;
    for b in branches {
        match b.classification {
            Classification::Success(j) | Classification::Corrected(j) => {
                per_j[j] += b.probability;
                success += b.probability;
            }
            Classification::Inconclusive => inconclusive += b.probability,
            Classification::Zero => {}
        }
    }
    let conditional_j = per_j
        .iter()
        .map(|p| if success > 0.0 { p / success } else { 0.0 })
        .collect();
    Totals {
        success_probability: success,
        conditional_j,
        inconclusive_probability: inconclusive,
    }
}

/// Measurement statistics computed directly from the projector matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    /// `<beta|P_j|beta>` for each `j`.
    pub probabilities: Vec<f64>,
    /// `normalize(P_j beta)` on photons 3, 4.
    pub states: Vec<Option<Ket>>,
}

pub fn oracle_report(beta: &Ket, family: &ProjectorFamily) -> Result<OracleReport> {
    let norm = beta.norm();
    if (norm - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let v = beta.to_pair()?;
    let mut probabilities = Vec::with_capacity(family.subsets());
    let mut states = Vec::with_capacity(family.subsets());
    for p in family.projectors() {
        let w = apply4(p, &v);
        let prob: f64 = w.iter().map(|a| a.norm_sqr()).sum();
        probabilities.push(prob);
        let ket = Ket::from_pair(OUTPUT, w)?;
        states.push(if prob.sqrt() > DEGENERATE_NORM {
            Some(ket.normalize()?)
        } else {
            None
        });
    }
    Ok(OracleReport {
        probabilities,
        states,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mismatch {
    SuccessProbability {
        reported: f64,
        expected: f64,
    },
    Conditional {
        j: usize,
        reported: f64,
        expected: f64,
    },
    Residual {
        branch: usize,
        bell15: BellOutcome,
        bell26: BellOutcome,
        register_result: Option<String>,
        j: usize,
        fidelity: f64,
    },
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::SuccessProbability { reported, expected } => write!(
                f,
                "success probability {reported} differs from expected {expected}"
            ),
            Mismatch::Conditional {
                j,
                reported,
                expected,
            } => write!(
                f,
                "conditional probability of j={j} is {reported}, oracle gives {expected}"
            ),
            Mismatch::Residual {
                branch,
                bell15,
                bell26,
                register_result,
                j,
                fidelity,
            } => write!(
                f,
                "branch {branch} ({bell15}, {bell26}, register {}) heralds j={j} but has fidelity {fidelity} with the oracle state",
                register_result.as_deref().unwrap_or("-")
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Verdict {
    pub mismatches: Vec<Mismatch>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks a protocol report against the direct projector statistics.
///
/// Passes when the success probability equals the mode's per-pair weight times
/// the number of accepted Bell pairs times the heralded oracle mass, the
/// conditional `j` distribution matches the oracle (restricted to the subsets the
/// mode can herald), and every success residual is phase-equal to the oracle state.
pub fn compare_reports(report: &ProtocolReport, oracle: &OracleReport, tol: f64) -> Verdict {
    let mut mismatches = Vec::new();
    let realized = report.mode.realized_subsets(oracle.probabilities.len());
    let mass: f64 = realized.iter().map(|&j| oracle.probabilities[j]).sum();
    let accepted_pairs = BellOutcome::ALL
        .iter()
        .flat_map(|a| BellOutcome::ALL.iter().map(move |b| (*a, *b)))
        .filter(|(a, b)| {
            report.mode.admits(*a, *b)
                && report.analyzer.distinguishes(*a)
                && report.analyzer.distinguishes(*b)
        })
        .count();
    let expected_success = report.mode.pair_weight() * accepted_pairs as f64 * mass;
    let reported_success = report.totals.success_probability;
    if (reported_success - expected_success).abs() > tol {
        mismatches.push(Mismatch::SuccessProbability {
            reported: reported_success,
            expected: expected_success,
        });
    }

    if expected_success > tol {
        for (j, &reported) in report.totals.conditional_j.iter().enumerate() {
            let expected = if realized.contains(&j) {
                oracle.probabilities[j] / mass
            } else {
                0.0
            };
            if (reported - expected).abs() > tol {
                mismatches.push(Mismatch::Conditional {
                    j,
                    reported,
                    expected,
                });
            }
        }
    }

    for (index, b) in report.branches.iter().enumerate() {
        let Some(j) = b.classification.subset() else {
            continue;
        };
        let fid = match (&b.residual, oracle.states.get(j).and_then(Option::as_ref)) {
            (Some(res), Some(target)) if res.register() == target.register() => {
                fidelity(res, target).unwrap_or(0.0)
            }
            _ => 0.0,
        };
        if fid < 1.0 - tol {
            mismatches.push(Mismatch::Residual {
                branch: index,
                bell15: b.bell15,
                bell26: b.bell26,
                register_result: b.register_result.clone(),
                j,
                fidelity: fid,
            });
        }
    }
    Verdict { mismatches }
}
