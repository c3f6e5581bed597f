//! File schemas shared by the library and the CLI. Rationals travel as
//! `"p/q"` strings everywhere; words as digit strings.

use serde::{Deserialize, Serialize};

use crate::certificates::{
    Certificate, CertificateKind, PairCheck, VerificationRecord, VerifyMode, Witnesses,
};
use crate::hyperspace::FiniteClosedSet;
use crate::measures::DiscreteMeasure;
use crate::rational::{format_rational, parse_rational};
use crate::systems::{CylinderPoint, SymbolicSystem, System};
use crate::{emergence::MeasureEnsemble, Error, Result};

/// System spec file:
/// `{"type":"full_shift"|"sft","m":2,"lambda":"1/2","transitions":[[1,1],[1,0]]?}`
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SystemSpec {
    FullShift {
        m: usize,
        lambda: String,
    },
    Sft {
        m: usize,
        lambda: String,
        transitions: Vec<Vec<u8>>,
    },
}

impl SystemSpec {
    pub fn to_system(&self) -> Result<System> {
        match self {
            SystemSpec::FullShift { m, lambda } => {
                SymbolicSystem::full_shift(*m, parse_rational(lambda)?)
            }
            SystemSpec::Sft {
                m,
                lambda,
                transitions,
            } => {
                let t = transitions
                    .iter()
                    .map(|row| row.iter().map(|&x| x != 0).collect())
                    .collect();
                SymbolicSystem::sft(*m, parse_rational(lambda)?, t)
            }
        }
    }

    pub fn from_system(system: &System) -> Self {
        match system.transitions() {
            None => SystemSpec::FullShift {
                m: system.alphabet_size(),
                lambda: format_rational(system.lambda()),
            },
            Some(t) => SystemSpec::Sft {
                m: system.alphabet_size(),
                lambda: format_rational(system.lambda()),
                transitions: t
                    .iter()
                    .map(|row| row.iter().map(|&x| u8::from(x)).collect())
                    .collect(),
            },
        }
    }
}

/// Measure file: `{"atoms":[{"word":"0110","weight":"1/4"},...]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureFile {
    pub atoms: Vec<AtomSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomSpec {
    pub word: String,
    pub weight: String,
}

impl MeasureFile {
    pub fn to_measure(&self, system: &System) -> Result<DiscreteMeasure> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                Ok((
                    CylinderPoint::parse(system, &a.word)?,
                    parse_rational(&a.weight)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteMeasure::new(system, atoms)
    }

    pub fn from_measure(measure: &DiscreteMeasure) -> Self {
        MeasureFile {
            atoms: measure
                .atoms()
                .iter()
                .map(|(p, w)| AtomSpec {
                    word: p.to_string(),
                    weight: format_rational(w),
                })
                .collect(),
        }
    }
}

/// Set file: `{"points":["0110","1001",...]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetFile {
    pub points: Vec<String>,
}

impl SetFile {
    pub fn to_set(&self, system: &System) -> Result<FiniteClosedSet> {
        let points = self
            .points
            .iter()
            .map(|w| CylinderPoint::parse(system, w))
            .collect::<Result<Vec<_>>>()?;
        FiniteClosedSet::new(system, points)
    }

    pub fn from_set(set: &FiniteClosedSet) -> Self {
        SetFile {
            points: set.points().iter().map(|p| p.to_string()).collect(),
        }
    }
}

/// Ensemble file: weighted list of measures (an element of M(M(X))).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub atoms: Vec<EnsembleAtomSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleAtomSpec {
    pub weight: String,
    pub measure: MeasureFile,
}

impl EnsembleFile {
    pub fn to_ensemble(&self, system: &System) -> Result<MeasureEnsemble> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                Ok((
                    a.measure.to_measure(system)?,
                    parse_rational(&a.weight)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        MeasureEnsemble::new(atoms)
    }

    pub fn from_ensemble(ens: &MeasureEnsemble) -> Self {
        EnsembleFile {
            atoms: ens
                .atoms()
                .iter()
                .map(|(m, w)| EnsembleAtomSpec {
                    weight: format_rational(w),
                    measure: MeasureFile::from_measure(m),
                })
                .collect(),
        }
    }
}

/// Certificate file: kind, scale, embedded system, witnesses and the
/// verification record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateFile {
    pub kind: String,
    pub n: usize,
    pub epsilon: String,
    pub system: SystemSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measures: Option<Vec<MeasureFile>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sets: Option<Vec<SetFile>>,
    /// code-indexed families: base measures plus hex codewords
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code_base: Option<Vec<MeasureFile>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code_bits: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<Vec<String>>,
    pub verification: VerificationSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationSpec {
    /// "full" or "sampled"
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_pairs: Option<usize>,
    pub pairs: Vec<PairSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairSpec {
    pub i: usize,
    pub j: usize,
    pub distance: String,
    pub bound: String,
}

impl CertificateFile {
    pub fn from_certificate(cert: &Certificate, system: &System) -> Self {
        let mut measures = None;
        let mut sets = None;
        let mut code_base = None;
        let mut code_bits = None;
        let mut code = None;
        match &cert.witnesses {
            Witnesses::Measures(ms) => {
                measures = Some(ms.iter().map(MeasureFile::from_measure).collect());
            }
            Witnesses::Sets(ss) => {
                sets = Some(ss.iter().map(SetFile::from_set).collect());
            }
            Witnesses::CodeMeasures {
                base,
                code: vectors,
                n_bits,
            } => {
                code_base = Some(base.iter().map(MeasureFile::from_measure).collect());
                code_bits = Some(*n_bits);
                code = Some(vectors.iter().map(|v| encode_code_word(v)).collect());
            }
        }
        let (mode, seed, sample_pairs) = match cert.verification.mode {
            VerifyMode::Full => ("full".to_string(), None, None),
            VerifyMode::Sampled { seed, pairs } => ("sampled".to_string(), Some(seed), Some(pairs)),
        };
        CertificateFile {
            kind: cert.kind.as_str().to_string(),
            n: cert.n,
            epsilon: format_rational(&cert.epsilon),
            system: SystemSpec::from_system(system),
            measures,
            sets,
            code_base,
            code_bits,
            code,
            verification: VerificationSpec {
                mode,
                seed,
                sample_pairs,
                pairs: cert
                    .verification
                    .checked
                    .iter()
                    .map(|p| PairSpec {
                        i: p.i,
                        j: p.j,
                        distance: format_rational(&p.distance),
                        bound: format_rational(&p.bound),
                    })
                    .collect(),
            },
        }
    }

    pub fn to_certificate(&self) -> Result<(Certificate, System)> {
        let system = self.system.to_system()?;
        let kind = CertificateKind::parse(&self.kind)?;
        let witnesses = match (&self.measures, &self.sets, &self.code) {
            (Some(ms), None, None) => Witnesses::Measures(
                ms.iter()
                    .map(|m| m.to_measure(&system))
                    .collect::<Result<Vec<_>>>()?,
            ),
            (None, Some(ss), None) => Witnesses::Sets(
                ss.iter()
                    .map(|s| s.to_set(&system))
                    .collect::<Result<Vec<_>>>()?,
            ),
            (None, None, Some(code)) => {
                let base = self
                    .code_base
                    .as_ref()
                    .ok_or_else(|| Error::CertificateInvalid("code without base".into()))?
                    .iter()
                    .map(|m| m.to_measure(&system))
                    .collect::<Result<Vec<_>>>()?;
                let n_bits = self
                    .code_bits
                    .ok_or_else(|| Error::CertificateInvalid("code without code_bits".into()))?;
                Witnesses::CodeMeasures {
                    base,
                    code: code
                        .iter()
                        .map(|w| decode_code_word(w, n_bits))
                        .collect::<Result<Vec<_>>>()?,
                    n_bits,
                }
            }
            _ => {
                return Err(Error::CertificateInvalid(
                    "exactly one of measures/sets/code must be present".into(),
                ))
            }
        };
        let mode = match self.verification.mode.as_str() {
            "full" => VerifyMode::Full,
            "sampled" => VerifyMode::Sampled {
                seed: self.verification.seed.unwrap_or(0),
                pairs: self.verification.sample_pairs.unwrap_or(0),
            },
            other => return Err(Error::Parse(format!("unknown verify mode {other:?}"))),
        };
        let checked = self
            .verification
            .pairs
            .iter()
            .map(|p| {
                Ok(PairCheck {
                    i: p.i,
                    j: p.j,
                    distance: parse_rational(&p.distance)?,
                    bound: parse_rational(&p.bound)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((
            Certificate {
                kind,
                n: self.n,
                epsilon: parse_rational(&self.epsilon)?,
                witnesses,
                verification: VerificationRecord { mode, checked },
            },
            system,
        ))
    }
}

fn encode_code_word(v: &[u64]) -> String {
    v.iter().map(|b| format!("{b:016x}")).collect()
}

fn decode_code_word(s: &str, n_bits: usize) -> Result<Vec<u64>> {
    let blocks = n_bits.div_ceil(64);
    if s.len() != blocks * 16 {
        return Err(Error::Parse(format!("codeword {s:?} has wrong length")));
    }
    (0..blocks)
        .map(|b| {
            u64::from_str_radix(&s[b * 16..(b + 1) * 16], 16)
                .map_err(|e| Error::Parse(format!("bad codeword block: {e}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::{apart_measure_family, verify_certificate};
    use crate::rational::ratio;

    #[test]
    fn system_spec_round_trip() {
        let json = r#"{"type":"sft","m":2,"lambda":"1/2","transitions":[[1,1],[1,0]]}"#;
        let spec: SystemSpec = serde_json::from_str(json).unwrap();
        let sys = spec.to_system().unwrap();
        assert!(!sys.is_full_shift());
        let back = SystemSpec::from_system(&sys);
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn measure_file_round_trip() {
        let sys = SymbolicSystem::full_shift(2, ratio(1, 2)).unwrap();
        let json = r#"{"atoms":[{"word":"0110","weight":"1/4"},{"word":"1001","weight":"3/4"}]}"#;
        let file: MeasureFile = serde_json::from_str(json).unwrap();
        let mu = file.to_measure(&sys).unwrap();
        assert_eq!(mu.len(), 2);
        let back = MeasureFile::from_measure(&mu);
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
        // bad sums rejected
        let bad = r#"{"atoms":[{"word":"0110","weight":"1/4"}]}"#;
        let file: MeasureFile = serde_json::from_str(bad).unwrap();
        assert!(file.to_measure(&sys).is_err());
    }

    #[test]
    fn certificate_file_round_trip() {
        let sys = SymbolicSystem::full_shift(2, ratio(1, 2)).unwrap();
        let cert = apart_measure_family(&sys, 2, &ratio(3, 10), 1 << 20).unwrap();
        let file = CertificateFile::from_certificate(&cert, &sys);
        let json = serde_json::to_string_pretty(&file).unwrap();
        let parsed: CertificateFile = serde_json::from_str(&json).unwrap();
        let (cert2, _sys2) = parsed.to_certificate().unwrap();
        verify_certificate(&cert2, 10_000).unwrap();
        assert_eq!(cert2.witnesses.len(), cert.witnesses.len());
    }
}
