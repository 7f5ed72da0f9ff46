//! Labelled tweet corpus: the nine conspiracy categories, stance labels, the
//! corpus CSV format, class distributions and the seeded train/test split.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use rand::seq::SliceRandom;

/// The nine conspiracy categories, in the row order of the distribution table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConspiracyKind {
    SuppressedCures,
    BehaviorMindControl,
    Antivax,
    FakeVirus,
    IntentionalPandemic,
    HarmfulRadiation,
    PopulationReduction,
    NewWorldOrder,
    Satanism,
}

impl ConspiracyKind {
    pub const ALL: [ConspiracyKind; 9] = [
        ConspiracyKind::SuppressedCures,
        ConspiracyKind::BehaviorMindControl,
        ConspiracyKind::Antivax,
        ConspiracyKind::FakeVirus,
        ConspiracyKind::IntentionalPandemic,
        ConspiracyKind::HarmfulRadiation,
        ConspiracyKind::PopulationReduction,
        ConspiracyKind::NewWorldOrder,
        ConspiracyKind::Satanism,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn slug(self) -> &'static str {
        match self {
            ConspiracyKind::SuppressedCures => "suppressed_cures",
            ConspiracyKind::BehaviorMindControl => "behavior_mind_control",
            ConspiracyKind::Antivax => "antivax",
            ConspiracyKind::FakeVirus => "fake_virus",
            ConspiracyKind::IntentionalPandemic => "intentional_pandemic",
            ConspiracyKind::HarmfulRadiation => "harmful_radiation",
            ConspiracyKind::PopulationReduction => "population_reduction",
            ConspiracyKind::NewWorldOrder => "new_world_order",
            ConspiracyKind::Satanism => "satanism",
        }
    }

    /// Human-readable row name used in rendered tables.
    pub fn display_name(self) -> &'static str {
        match self {
            ConspiracyKind::SuppressedCures => "Suppressed Cures",
            ConspiracyKind::BehaviorMindControl => "Behavior and Mind Control",
            ConspiracyKind::Antivax => "Antivax",
            ConspiracyKind::FakeVirus => "Fake Virus",
            ConspiracyKind::IntentionalPandemic => "Intentional Pandemic",
            ConspiracyKind::HarmfulRadiation => "Harmful Radiation Influence",
            ConspiracyKind::PopulationReduction => "Population Reduction Control",
            ConspiracyKind::NewWorldOrder => "New World Order",
            ConspiracyKind::Satanism => "Satanism",
        }
    }

    pub fn from_slug(slug: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.slug() == slug)
    }
}

impl fmt::Display for ConspiracyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for ConspiracyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_slug(s).ok_or_else(|| Error::InvalidConfig(format!("unknown conspiracy `{s}`")))
    }
}

/// Stance of a tweet towards one conspiracy. Codes are fixed at 0/1/2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum StanceLabel {
    #[default]
    NonConspiracy = 0,
    Discusses = 1,
    Promotes = 2,
}

impl StanceLabel {
    pub const ALL: [StanceLabel; 3] = [
        StanceLabel::NonConspiracy,
        StanceLabel::Discusses,
        StanceLabel::Promotes,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(StanceLabel::NonConspiracy),
            1 => Some(StanceLabel::Discusses),
            2 => Some(StanceLabel::Promotes),
            _ => None,
        }
    }
}

impl fmt::Display for StanceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StanceLabel::NonConspiracy => "non_conspiracy",
            StanceLabel::Discusses => "discusses",
            StanceLabel::Promotes => "promotes",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledTweet {
    pub id: String,
    pub text: String,
    /// One label per [`ConspiracyKind`], indexed by [`ConspiracyKind::index`].
    pub labels: [StanceLabel; 9],
}

impl LabeledTweet {
    pub fn label(&self, kind: ConspiracyKind) -> StanceLabel {
        self.labels[kind.index()]
    }
}

/// An ordered collection of tweets with unique ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Corpus {
    tweets: Vec<LabeledTweet>,
}

pub const ID_COLUMN: &str = "id";
pub const TEXT_COLUMN: &str = "text";

impl Corpus {
    pub fn new(tweets: Vec<LabeledTweet>) -> Result<Self> {
        let mut seen: HashMap<&str, usize> = HashMap::with_capacity(tweets.len());
        for (i, t) in tweets.iter().enumerate() {
            if t.id.is_empty() {
                return Err(Error::EmptyId { row: i + 2 });
            }
            if let Some(first) = seen.insert(t.id.as_str(), i) {
                return Err(Error::DuplicateId {
                    id: t.id.clone(),
                    first: first + 2,
                    second: i + 2,
                });
            }
        }
        Ok(Self { tweets })
    }

    pub fn tweets(&self) -> &[LabeledTweet] {
        &self.tweets
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.tweets.iter().map(|t| t.id.as_str())
    }

    pub fn labels(&self, kind: ConspiracyKind) -> Vec<StanceLabel> {
        self.tweets.iter().map(|t| t.label(kind)).collect()
    }

    fn subset(&self, indices: &[usize]) -> Corpus {
        Corpus {
            tweets: indices.iter().map(|&i| self.tweets[i].clone()).collect(),
        }
    }
}

/// Parses the corpus CSV. Header row is required; column order is free but
/// every one of the eleven columns must be present exactly once.
pub fn parse_corpus<R: Read>(reader: R) -> Result<Corpus> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();

    let mut id_col = None;
    let mut text_col = None;
    let mut label_cols: [Option<usize>; 9] = [None; 9];
    for (pos, name) in headers.iter().enumerate() {
        let slot = match name {
            ID_COLUMN => &mut id_col,
            TEXT_COLUMN => &mut text_col,
            other => match ConspiracyKind::from_slug(other) {
                Some(kind) => &mut label_cols[kind.index()],
                None => return Err(Error::UnknownColumn(other.to_owned())),
            },
        };
        if slot.replace(pos).is_some() {
            return Err(Error::Csv(format!("column `{name}` appears twice")));
        }
    }
    let id_col = id_col.ok_or_else(|| Error::MissingColumn(ID_COLUMN.into()))?;
    let text_col = text_col.ok_or_else(|| Error::MissingColumn(TEXT_COLUMN.into()))?;
    let mut cols = [0usize; 9];
    for kind in ConspiracyKind::ALL {
        cols[kind.index()] =
            label_cols[kind.index()].ok_or_else(|| Error::MissingColumn(kind.slug().into()))?;
    }

    let mut tweets = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 2;
        let mut labels = [StanceLabel::NonConspiracy; 9];
        for kind in ConspiracyKind::ALL {
            let cell = record.get(cols[kind.index()]).unwrap_or("");
            labels[kind.index()] = parse_label(cell).ok_or_else(|| Error::InvalidLabel {
                row,
                column: kind.slug().into(),
                value: cell.into(),
            })?;
        }
        tweets.push(LabeledTweet {
            id: record.get(id_col).unwrap_or("").to_owned(),
            text: record.get(text_col).unwrap_or("").to_owned(),
            labels,
        });
    }
    Corpus::new(tweets)
}

fn parse_label(cell: &str) -> Option<StanceLabel> {
    match cell {
        "0" => Some(StanceLabel::NonConspiracy),
        "1" => Some(StanceLabel::Discusses),
        "2" => Some(StanceLabel::Promotes),
        _ => None,
    }
}

/// The eleven corpus columns in canonical order.
pub fn corpus_header() -> Vec<&'static str> {
    let mut header = vec![ID_COLUMN, TEXT_COLUMN];
    header.extend(ConspiracyKind::ALL.iter().map(|k| k.slug()));
    header
}

pub fn write_corpus<W: Write>(corpus: &Corpus, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(corpus_header())?;
    for t in &corpus.tweets {
        let mut record: Vec<String> = Vec::with_capacity(11);
        record.push(t.id.clone());
        record.push(t.text.clone());
        record.extend(t.labels.iter().map(|l| l.code().to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn serialize_corpus(corpus: &Corpus) -> Vec<u8> {
    let mut buf = Vec::new();
    write_corpus(corpus, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

/// Proportion of each stance, indexed by label code.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassProportions(pub [f64; 3]);

impl ClassProportions {
    pub fn get(&self, label: StanceLabel) -> f64 {
        self.0[label.index()]
    }
}

pub fn label_counts(labels: &[StanceLabel]) -> [usize; 3] {
    let mut counts = [0usize; 3];
    for l in labels {
        counts[l.index()] += 1;
    }
    counts
}

pub fn class_distribution(corpus: &Corpus, kind: ConspiracyKind) -> Result<ClassProportions> {
    if corpus.is_empty() {
        return Err(Error::EmptyInput("class distribution of an empty corpus"));
    }
    let counts = label_counts(&corpus.labels(kind));
    let n = corpus.len() as f64;
    Ok(ClassProportions(counts.map(|c| c as f64 / n)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    pub train_ratio: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            train_ratio: 0.8,
            seed: 0,
        }
    }
}

impl SplitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_ratio > 0.0 && self.train_ratio < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "train_ratio must lie in (0, 1), got {}",
                self.train_ratio
            )));
        }
        Ok(())
    }

    /// `round_half_up(n * train_ratio)`, kept within `[1, n - 1]`.
    pub fn train_size(&self, n: usize) -> usize {
        let raw = (n as f64 * self.train_ratio + 0.5).floor() as usize;
        raw.clamp(1, n.saturating_sub(1).max(1))
    }
}

/// Shuffles row indices with the seeded generator and takes the prefix as the
/// training side. Both halves keep file order.
pub fn split_indices(n: usize, cfg: &SplitConfig) -> Result<(Vec<usize>, Vec<usize>)> {
    cfg.validate()?;
    if n < 2 {
        return Err(Error::SplitTooSmall(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::seeded(cfg.seed));
    let n_train = cfg.train_size(n);
    let mut train = order[..n_train].to_vec();
    let mut test = order[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn train_test_split(corpus: &Corpus, cfg: &SplitConfig) -> Result<(Corpus, Corpus)> {
    let (train, test) = split_indices(corpus.len(), cfg)?;
    Ok((corpus.subset(&train), corpus.subset(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> String {
        corpus_header().join(",")
    }

    fn tweet(id: &str, labels: [u8; 9]) -> LabeledTweet {
        LabeledTweet {
            id: id.into(),
            text: format!("text of {id}"),
            labels: labels.map(|c| StanceLabel::from_code(c).unwrap()),
        }
    }

    #[test]
    fn slugs_are_a_bijection() {
        for kind in ConspiracyKind::ALL {
            assert_eq!(ConspiracyKind::from_slug(kind.slug()), Some(kind));
        }
        let mut slugs: Vec<_> = ConspiracyKind::ALL.iter().map(|k| k.slug()).collect();
        slugs.dedup();
        assert_eq!(slugs.len(), 9);
    }

    #[test]
    fn parses_single_row() {
        let csv = format!("{}\nt1,\"covid is fake\",0,0,0,2,0,0,0,0,0\n", header());
        let corpus = parse_corpus(csv.as_bytes()).unwrap();
        assert_eq!(corpus.len(), 1);
        let t = &corpus.tweets()[0];
        assert_eq!(t.text, "covid is fake");
        for kind in ConspiracyKind::ALL {
            let expected = if kind == ConspiracyKind::FakeVirus {
                StanceLabel::Promotes
            } else {
                StanceLabel::NonConspiracy
            };
            assert_eq!(t.label(kind), expected);
        }
    }

    #[test]
    fn header_only_is_empty_corpus() {
        let corpus = parse_corpus(format!("{}\n", header()).as_bytes()).unwrap();
        assert!(corpus.is_empty());
    }

    #[test]
    fn out_of_range_label_names_row_and_column() {
        let csv = format!("{}\nt1,x,0,0,3,0,0,0,0,0,0\n", header());
        match parse_corpus(csv.as_bytes()) {
            Err(Error::InvalidLabel { row, column, value }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "antivax");
                assert_eq!(value, "3");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_and_unknown_columns() {
        let missing = header().replace(",satanism", "");
        match parse_corpus(format!("{missing}\n").as_bytes()) {
            Err(Error::MissingColumn(c)) => assert_eq!(c, "satanism"),
            other => panic!("unexpected {other:?}"),
        }
        let unknown = format!("{},lizard_people", header());
        match parse_corpus(format!("{unknown}\n").as_bytes()) {
            Err(Error::UnknownColumn(c)) => assert_eq!(c, "lizard_people"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_ids_report_both_rows() {
        let csv = format!(
            "{}\na,x,0,0,0,0,0,0,0,0,0\nb,y,0,0,0,0,0,0,0,0,0\na,z,0,0,0,0,0,0,0,0,0\n",
            header()
        );
        match parse_corpus(csv.as_bytes()) {
            Err(Error::DuplicateId { id, first, second }) => {
                assert_eq!((id.as_str(), first, second), ("a", 2, 4));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn column_order_is_free() {
        let mut cols = corpus_header();
        cols.reverse();
        let row = "0,0,0,0,0,0,0,1,2,hello,t9";
        let corpus = parse_corpus(format!("{}\n{row}\n", cols.join(",")).as_bytes()).unwrap();
        let t = &corpus.tweets()[0];
        assert_eq!(t.id, "t9");
        assert_eq!(
            t.label(ConspiracyKind::SuppressedCures),
            StanceLabel::Promotes
        );
        assert_eq!(
            t.label(ConspiracyKind::BehaviorMindControl),
            StanceLabel::Discusses
        );
    }

    #[test]
    fn uniform_distribution() {
        let corpus = Corpus::new((0..4).map(|i| tweet(&i.to_string(), [0; 9])).collect()).unwrap();
        let d = class_distribution(&corpus, ConspiracyKind::Satanism).unwrap();
        assert_eq!(d.0, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn distribution_at_corpus_scale() {
        // 1740 / 57 / 115 of 1912, counted directly.
        let mut tweets = Vec::new();
        for i in 0..1912 {
            let code = if i < 1740 {
                0
            } else if i < 1797 {
                1
            } else {
                2
            };
            let mut labels = [0u8; 9];
            labels[ConspiracyKind::Antivax.index()] = code;
            tweets.push(tweet(&format!("t{i}"), labels));
        }
        let corpus = Corpus::new(tweets).unwrap();
        let d = class_distribution(&corpus, ConspiracyKind::Antivax).unwrap();
        assert!((d.0[0] - 1740.0 / 1912.0).abs() < 1e-15);
        assert!((d.0[1] - 57.0 / 1912.0).abs() < 1e-15);
        assert!((d.0[2] - 115.0 / 1912.0).abs() < 1e-15);
        assert!((d.0.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((d.0[0] - 0.9100).abs() < 1e-4);
    }

    #[test]
    fn empty_distribution_is_an_error() {
        assert!(matches!(
            class_distribution(&Corpus::default(), ConspiracyKind::Antivax),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn split_sizes() {
        let cfg = SplitConfig {
            train_ratio: 0.8,
            seed: 3,
        };
        assert_eq!(cfg.train_size(1912), 1530);
        assert_eq!(1912 - cfg.train_size(1912), 382);
        let corpus =
            Corpus::new((0..10).map(|i| tweet(&format!("t{i}"), [0; 9])).collect()).unwrap();
        let (train, test) = train_test_split(&corpus, &cfg).unwrap();
        assert_eq!((train.len(), test.len()), (8, 2));
        let mut all: Vec<&str> = train.ids().chain(test.ids()).collect();
        all.sort_unstable();
        let mut expected: Vec<&str> = corpus.ids().collect();
        expected.sort_unstable();
        assert_eq!(all, expected);
        assert_eq!(train_test_split(&corpus, &cfg).unwrap(), (train, test));
    }

    #[test]
    fn split_rejects_tiny_corpora_and_bad_ratios() {
        let one = Corpus::new(vec![tweet("a", [0; 9])]).unwrap();
        assert!(matches!(
            train_test_split(&one, &SplitConfig::default()),
            Err(Error::SplitTooSmall(1))
        ));
        let two = Corpus::new(vec![tweet("a", [0; 9]), tweet("b", [0; 9])]).unwrap();
        for ratio in [0.0, 1.0, -0.5, f64::NAN] {
            let cfg = SplitConfig {
                train_ratio: ratio,
                seed: 0,
            };
            assert!(matches!(
                train_test_split(&two, &cfg),
                Err(Error::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn different_seeds_give_different_partitions() {
        let a = split_indices(
            40,
            &SplitConfig {
                train_ratio: 0.8,
                seed: 1,
            },
        )
        .unwrap();
        let b = split_indices(
            40,
            &SplitConfig {
                train_ratio: 0.8,
                seed: 2,
            },
        )
        .unwrap();
        assert_ne!(a, b);
    }
}
