//! Random-effects generator for the synthetic segment corpus.
//!
//! Every (participant, question) pair contributes the same number of
//! segments. A segment's continuous features are
//!
//! ```text
//! x = person_effect + class_offset + noise
//! ```
//!
//! where the person effect is a per-participant Gaussian vector (scale
//! `person_effect_scale`), the class offset is ±`class_effect_scale`/2 along
//! one fixed unit direction (+ for deceptive, − for truthful), and the noise
//! is white Gaussian (scale `noise_scale`). One feature column is a binary
//! gender indicator copied from participant metadata. Demographic attributes
//! are carried as metadata only — they never shape the continuous features.
//!
//! Because segments of one participant share the person effect, they are
//! strongly correlated: the corpus has far fewer independent observations
//! than rows, which is exactly the failure mode the evaluation protocols and
//! diagnostics in this crate are built to expose.

use std::collections::BTreeMap;
use std::io;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::ReplicaError;
use crate::seeding::{rng_for, streams};

/// Ground-truth class of a segment (and directed role of a participant).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Truth,
    Deception,
}

impl Label {
    #[must_use]
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Truth => "truth",
            Label::Deception => "deception",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ReplicaError> {
        match s {
            "truth" => Ok(Label::Truth),
            "deception" => Ok(Label::Deception),
            other => Err(ReplicaError::MalformedDataset(format!(
                "unknown label {other:?} (expected \"truth\" or \"deception\")"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gender {
    Male,
    Female,
}

/// Demographic tag mirroring the screened cohorts; metadata only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EthnicGroup {
    AsianArabic,
    WhiteEuropean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Participant {
    pub id: usize,
    /// Directed role: every segment of this participant carries this label.
    pub role: Label,
    pub gender: Gender,
    /// `None` for datasets imported from CSV, which do not carry the tag.
    pub ethnicity: Option<EthnicGroup>,
}

/// One observation: a feature vector cut from one answer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentVector {
    pub participant_id: usize,
    /// 1-based question number.
    pub question: usize,
    pub label: Label,
    pub features: Vec<f64>,
}

/// Shape and generator parameters of a synthetic corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSpec {
    pub n_participants: usize,
    /// How many participants are assigned the deceptive role.
    pub n_deceptive: usize,
    /// Feature count including the binary gender column (the last one).
    pub n_features: usize,
    pub n_questions: usize,
    /// Requested corpus size; the generator rounds to an equal number of
    /// segments per (participant, question) pair.
    pub target_total_vectors: usize,
    /// Scale of the per-participant Gaussian effect.
    pub person_effect_scale: f64,
    /// Separation between the two class means along the class direction.
    pub class_effect_scale: f64,
    /// Scale of the white noise added to every segment.
    pub noise_scale: f64,
    pub seed: u64,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        Self {
            n_participants: 32,
            n_deceptive: 16,
            n_features: 38,
            n_questions: 13,
            target_total_vectors: 86_586,
            person_effect_scale: 1.0,
            class_effect_scale: 2.0,
            noise_scale: 1.0,
            seed: 42,
        }
    }
}

impl DatasetSpec {
    /// Segments generated per (participant, question) pair: the target total
    /// divided by the number of pairs, rounded to the nearest integer.
    #[must_use]
    pub fn segments_per_answer(&self) -> usize {
        let pairs = (self.n_participants * self.n_questions) as f64;
        (self.target_total_vectors as f64 / pairs).round() as usize
    }

    pub fn validate(&self) -> Result<(), ReplicaError> {
        let fail = |msg: String| Err(ReplicaError::InvalidSpec(msg));
        if self.n_participants < 2 {
            return fail("n_participants must be at least 2".into());
        }
        if self.n_deceptive == 0 || self.n_deceptive >= self.n_participants {
            return fail(format!(
                "n_deceptive must leave both roles populated (got {} of {})",
                self.n_deceptive, self.n_participants
            ));
        }
        if self.n_features < 2 {
            return fail("n_features must be at least 2 (one signal + gender)".into());
        }
        if self.n_questions == 0 {
            return fail("n_questions must be at least 1".into());
        }
        if self.segments_per_answer() == 0 {
            return fail(format!(
                "target_total_vectors {} rounds to zero segments per answer",
                self.target_total_vectors
            ));
        }
        for (name, v) in [
            ("person_effect_scale", self.person_effect_scale),
            ("class_effect_scale", self.class_effect_scale),
            ("noise_scale", self.noise_scale),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return fail(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        Ok(())
    }
}

/// A generated (or imported) corpus plus its participant roster.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyntheticDataset {
    /// Spec echo. For imported datasets the shape fields are reconstructed
    /// and the generator parameters (scales, seed) are zeroed.
    pub spec: DatasetSpec,
    pub participants: Vec<Participant>,
    pub segments: Vec<SegmentVector>,
    /// Unit vector the class offset acts along (zero on the gender column).
    pub class_direction: Vec<f64>,
    pub segments_per_answer: usize,
}

impl SyntheticDataset {
    /// Participant ids holding `role`, in ascending id order.
    #[must_use]
    pub fn ids_with_role(&self, role: Label) -> Vec<usize> {
        self.participants
            .iter()
            .filter(|p| p.role == role)
            .map(|p| p.id)
            .collect()
    }

    #[must_use]
    pub fn n_features(&self) -> usize {
        self.spec.n_features
    }

    /// (group id, features) view of every segment, for the diagnostics API.
    #[must_use]
    pub fn grouped_rows(&self) -> Vec<(usize, &[f64])> {
        self.segments
            .iter()
            .map(|s| (s.participant_id, s.features.as_slice()))
            .collect()
    }
}

/// `true` for exactly `count` of the indices `0..n`, evenly spread.
fn spread(i: usize, n: usize, count: usize) -> bool {
    (i + 1) * count / n > i * count / n
}

/// Generate the corpus described by `spec`.
///
/// Deterministic: all draws come from one ChaCha8 stream derived from
/// `spec.seed`, consumed in a fixed order that does not depend on the scale
/// parameters (scales of zero multiply the same draws by zero).
pub fn generate_synthetic_dataset(spec: &DatasetSpec) -> Result<SyntheticDataset, ReplicaError> {
    spec.validate()?;
    let mut rng = rng_for(spec.seed, streams::DATASET);
    let gender_col = spec.n_features - 1;
    let signal_dims = spec.n_features - 1;

    // Fixed unit direction for the class offset, zero on the gender column.
    let mut class_direction: Vec<f64> = (0..signal_dims)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let norm = class_direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-12 {
        class_direction = vec![0.0; signal_dims];
        class_direction[0] = 1.0;
    } else {
        for x in &mut class_direction {
            *x /= norm;
        }
    }
    class_direction.push(0.0); // gender column

    // Roster. Deceptive roles go to the first `n_deceptive` ids; female and
    // Asian/Arabic tags are spread evenly over the roster (the latter from
    // the top end so the two tags do not coincide). Cohort proportions follow
    // the replicated study: 10/32 female, 10/32 Asian/Arabic.
    let n = spec.n_participants;
    let female_count = (n * 10 + 16) / 32; // round(n * 10/32)
    let participants: Vec<Participant> = (0..n)
        .map(|id| Participant {
            id,
            role: if id < spec.n_deceptive {
                Label::Deception
            } else {
                Label::Truth
            },
            gender: if spread(id, n, female_count) {
                Gender::Female
            } else {
                Gender::Male
            },
            ethnicity: Some(if spread(n - 1 - id, n, female_count) {
                EthnicGroup::AsianArabic
            } else {
                EthnicGroup::WhiteEuropean
            }),
        })
        .collect();

    let per_answer = spec.segments_per_answer();
    let mut segments =
        Vec::with_capacity(n * spec.n_questions * per_answer);
    for participant in &participants {
        let person_effect: Vec<f64> = (0..signal_dims)
            .map(|_| {
                let draw: f64 = StandardNormal.sample(&mut rng);
                spec.person_effect_scale * draw
            })
            .collect();
        let offset_sign = match participant.role {
            Label::Deception => 0.5,
            Label::Truth => -0.5,
        };
        let gender_bit = match participant.gender {
            Gender::Female => 1.0,
            Gender::Male => 0.0,
        };
        for question in 1..=spec.n_questions {
            for _ in 0..per_answer {
                let mut features = Vec::with_capacity(spec.n_features);
                for j in 0..signal_dims {
                    let noise: f64 = StandardNormal.sample(&mut rng);
                    features.push(
                        person_effect[j]
                            + offset_sign * spec.class_effect_scale * class_direction[j]
                            + spec.noise_scale * noise,
                    );
                }
                features.push(gender_bit);
                debug_assert_eq!(features.len(), gender_col + 1);
                segments.push(SegmentVector {
                    participant_id: participant.id,
                    question,
                    label: participant.role,
                    features,
                });
            }
        }
    }

    Ok(SyntheticDataset {
        spec: spec.clone(),
        participants,
        segments,
        class_direction,
        segments_per_answer: per_answer,
    })
}

// ────────────────────────────── CSV layout ──────────────────────────────
//
// participant_id,question,label,f1,...,fK — one row per segment, features at
// full precision (round-trips exactly through parse).

impl SyntheticDataset {
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), ReplicaError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![
            "participant_id".to_owned(),
            "question".to_owned(),
            "label".to_owned(),
        ];
        header.extend((1..=self.spec.n_features).map(|i| format!("f{i}")));
        let io_err = |e: csv::Error| ReplicaError::MalformedDataset(e.to_string());
        w.write_record(&header).map_err(io_err)?;
        for s in &self.segments {
            let mut record = vec![
                s.participant_id.to_string(),
                s.question.to_string(),
                s.label.as_str().to_owned(),
            ];
            record.extend(s.features.iter().map(|v| v.to_string()));
            w.write_record(&record).map_err(io_err)?;
        }
        w.flush()
            .map_err(|e| ReplicaError::MalformedDataset(e.to_string()))?;
        Ok(())
    }

    /// Parse a corpus back from [`write_csv`](Self::write_csv) output.
    ///
    /// Roles are recovered from segment labels (which must be consistent per
    /// participant) and gender from the final feature column. Generator
    /// parameters are not recoverable and are zeroed in the spec echo.
    pub fn read_csv<R: io::Read>(input: R) -> Result<Self, ReplicaError> {
        let bad = |msg: String| ReplicaError::MalformedDataset(msg);
        let mut reader = csv::Reader::from_reader(input);
        let headers = reader
            .headers()
            .map_err(|e| bad(e.to_string()))?
            .clone();
        let expected = ["participant_id", "question", "label"];
        if headers.len() < 4 || headers.iter().take(3).ne(expected) {
            return Err(bad(format!(
                "header must start with participant_id,question,label,f1,... (got {:?})",
                headers.iter().take(4).collect::<Vec<_>>()
            )));
        }
        let n_features = headers.len() - 3;

        let mut segments = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            if record.len() != n_features + 3 {
                return Err(bad(format!(
                    "row {} has {} fields, expected {}",
                    line + 2,
                    record.len(),
                    n_features + 3
                )));
            }
            let parse_err = |what: &str| bad(format!("row {}: bad {what}", line + 2));
            let participant_id: usize =
                record[0].parse().map_err(|_| parse_err("participant_id"))?;
            let question: usize = record[1]
                .parse()
                .ok()
                .filter(|q| *q >= 1)
                .ok_or_else(|| parse_err("question (must be a 1-based integer)"))?;
            let label = Label::parse(&record[2])?;
            let features = record
                .iter()
                .skip(3)
                .map(|v| v.parse::<f64>().map_err(|_| parse_err("feature value")))
                .collect::<Result<Vec<f64>, _>>()?;
            segments.push(SegmentVector {
                participant_id,
                question,
                label,
                features,
            });
        }
        if segments.is_empty() {
            return Err(bad("dataset has no segments".into()));
        }

        // Reconstruct the roster, insisting on one label per participant.
        let mut roles: BTreeMap<usize, Label> = BTreeMap::new();
        let mut genders: BTreeMap<usize, f64> = BTreeMap::new();
        let mut max_question = 0;
        for s in &segments {
            max_question = max_question.max(s.question);
            if let Some(prev) = roles.insert(s.participant_id, s.label) {
                if prev != s.label {
                    return Err(bad(format!(
                        "participant {} carries both labels",
                        s.participant_id
                    )));
                }
            }
            genders.insert(s.participant_id, s.features[n_features - 1]);
        }
        let participants: Vec<Participant> = roles
            .iter()
            .map(|(&id, &role)| Participant {
                id,
                role,
                gender: if genders[&id] >= 0.5 {
                    Gender::Female
                } else {
                    Gender::Male
                },
                ethnicity: None,
            })
            .collect();
        let n_deceptive = participants
            .iter()
            .filter(|p| p.role == Label::Deception)
            .count();

        let n_pairs = participants.len() * max_question;
        let spec = DatasetSpec {
            n_participants: participants.len(),
            n_deceptive,
            n_features,
            n_questions: max_question,
            target_total_vectors: segments.len(),
            person_effect_scale: 0.0,
            class_effect_scale: 0.0,
            noise_scale: 0.0,
            seed: 0,
        };
        let segments_per_answer = (segments.len() + n_pairs - 1) / n_pairs.max(1);
        Ok(SyntheticDataset {
            spec,
            participants,
            segments,
            class_direction: vec![0.0; n_features],
            segments_per_answer,
        })
    }
}
