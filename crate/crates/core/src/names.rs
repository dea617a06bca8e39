//! Hierarchical names for radar data files and protocol control messages.
//!
//! Data files are named explicitly by radar, scan round and sequence number
//! within the round:
//!
//! ```text
//! /data/<radar>/_round=<r>/_seq=<s>[/<YYYYMMDD>/<HHMMSS>][/_segment=<k>]
//! ```
//!
//! Because every radar produces a fixed number of sequences per round, the
//! name of the next file is computable from the current one (see
//! [`next_data_name`]). The older time-based file names used by the legacy
//! distribution system are handled by [`LegacyFileName`].

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DATA_PREFIX: &str = "data";
pub const INIT_PREFIX: &str = "Interest";
const ROUND_MARKER: &str = "_round=";
const SEQ_MARKER: &str = "_seq=";
const SEGMENT_MARKER: &str = "_segment=";
const INIT_SUFFIX: [&str; 3] = ["_current_round", "current_seq", "number_of_files"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("malformed name {input:?}: {reason}")]
    Malformed { input: String, reason: &'static str },
}

fn malformed(input: &str, reason: &'static str) -> NameError {
    NameError::Malformed {
        input: input.to_string(),
        reason,
    }
}

/// An ordered list of non-empty components.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Name {
    components: Vec<String>,
}

impl Name {
    /// Splits on `/`. A single leading `/` is optional; any other empty
    /// component is rejected.
    pub fn parse(s: &str) -> Result<Name, NameError> {
        if s.is_empty() {
            return Err(malformed(s, "empty string"));
        }
        let body = s.strip_prefix('/').unwrap_or(s);
        if body.is_empty() {
            return Err(malformed(s, "no components"));
        }
        let components = body
            .split('/')
            .map(|c| {
                if c.is_empty() {
                    Err(malformed(s, "empty component"))
                } else {
                    Ok(c.to_string())
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Name { components })
    }

    pub fn from_components<I, S>(components: I) -> Result<Name, NameError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let components: Vec<String> = components.into_iter().map(Into::into).collect();
        if components.is_empty() {
            return Err(malformed("", "no components"));
        }
        for c in &components {
            if c.is_empty() {
                return Err(malformed(c, "empty component"));
            }
            if c.contains('/') {
                return Err(malformed(c, "component contains '/'"));
            }
        }
        Ok(Name { components })
    }

    pub fn components(&self) -> &[String] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn starts_with(&self, prefix: &Name) -> bool {
        self.components.starts_with(&prefix.components)
    }

    /// Length in bytes of the canonical string form.
    pub fn encoded_len(&self) -> usize {
        self.components.iter().map(|c| c.len() + 1).sum()
    }

    /// The first `n` components.
    pub fn prefix(&self, n: usize) -> Name {
        Name {
            components: self.components[..n.min(self.len())].to_vec(),
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.components {
            write!(f, "/{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Name {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Name::parse(s)
    }
}

impl TryFrom<String> for Name {
    type Error = NameError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        Name::parse(&s)
    }
}

impl From<Name> for String {
    fn from(n: Name) -> String {
        n.to_string()
    }
}

/// Capture date and time carried by timestamped names and legacy file names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Timestamp {
    /// `YYYYMMDD`
    pub date: u32,
    /// `HHMMSS`
    pub time: u32,
}

impl Timestamp {
    pub fn new(
        year: u32,
        month: u32,
        day: u32,
        hour: u32,
        minute: u32,
        second: u32,
    ) -> Result<Timestamp, NameError> {
        let ts = Timestamp {
            date: year * 10_000 + month * 100 + day,
            time: hour * 10_000 + minute * 100 + second,
        };
        ts.validate().map(|_| ts)
    }

    fn validate(&self) -> Result<(), NameError> {
        let (month, day) = ((self.date / 100) % 100, self.date % 100);
        let (hour, minute, second) = (self.time / 10_000, (self.time / 100) % 100, self.time % 100);
        if self.date > 99_999_999 || !(1..=12).contains(&month) || !(1..=31).contains(&day) {
            return Err(malformed(&self.date.to_string(), "invalid date"));
        }
        if hour > 23 || minute > 59 || second > 60 {
            return Err(malformed(&self.time.to_string(), "invalid time"));
        }
        Ok(())
    }

    pub fn parse_parts(date: &str, time: &str) -> Result<Timestamp, NameError> {
        if date.len() != 8 || !date.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed(date, "date must be YYYYMMDD"));
        }
        if time.len() != 6 || !time.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed(time, "time must be HHMMSS"));
        }
        let ts = Timestamp {
            date: date.parse().expect("digits"),
            time: time.parse().expect("digits"),
        };
        ts.validate().map(|_| ts)
    }

    pub fn date_string(&self) -> String {
        format!("{:08}", self.date)
    }

    pub fn time_string(&self) -> String {
        format!("{:06}", self.time)
    }
}

/// How `_seq=` values are rendered. Parsing accepts either form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeqStyle {
    #[default]
    Numeric,
    /// 1 → A, 26 → Z, 27 → AA.
    Alpha,
}

fn seq_to_alpha(mut seq: u64) -> String {
    debug_assert!(seq >= 1);
    let mut out = Vec::new();
    while seq > 0 {
        seq -= 1;
        out.push(b'A' + (seq % 26) as u8);
        seq /= 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

fn alpha_to_seq(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_uppercase()) {
        return None;
    }
    s.bytes().try_fold(0u64, |acc, b| {
        acc.checked_mul(26)?.checked_add(u64::from(b - b'A') + 1)
    })
}

fn parse_uint(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Name of one radar data file, or of one segment of it.
///
/// Equality, hashing and ordering ignore the timestamp.
#[derive(Debug, Clone)]
pub struct RadarDataName {
    pub radar_id: String,
    pub round: u64,
    /// 1-based within the round.
    pub seq: u64,
    pub timestamp: Option<Timestamp>,
    /// 0-based chunk index.
    pub segment: Option<u64>,
}

impl RadarDataName {
    fn key(&self) -> (&str, u64, u64, Option<u64>) {
        (&self.radar_id, self.round, self.seq, self.segment)
    }

    pub fn file(&self) -> RadarDataName {
        RadarDataName {
            segment: None,
            ..self.clone()
        }
    }

    pub fn with_segment(&self, segment: u64) -> RadarDataName {
        RadarDataName {
            segment: Some(segment),
            ..self.clone()
        }
    }

    pub fn to_name(&self) -> Name {
        self.to_name_with(SeqStyle::Numeric)
    }

    pub fn to_name_with(&self, style: SeqStyle) -> Name {
        let seq = match style {
            SeqStyle::Numeric => self.seq.to_string(),
            SeqStyle::Alpha => seq_to_alpha(self.seq),
        };
        let mut components = vec![
            DATA_PREFIX.to_string(),
            self.radar_id.clone(),
            format!("{ROUND_MARKER}{}", self.round),
            format!("{SEQ_MARKER}{seq}"),
        ];
        if let Some(ts) = self.timestamp {
            components.push(ts.date_string());
            components.push(ts.time_string());
        }
        if let Some(k) = self.segment {
            components.push(format!("{SEGMENT_MARKER}{k}"));
        }
        Name { components }
    }

    pub fn from_name(name: &Name) -> Result<RadarDataName, NameError> {
        let input = name.to_string();
        let c = name.components();
        if c.len() < 4 || c[0] != DATA_PREFIX {
            return Err(malformed(&input, "not a /data name"));
        }
        let radar_id = c[1].clone();
        let round = c[2]
            .strip_prefix(ROUND_MARKER)
            .and_then(parse_uint)
            .ok_or_else(|| malformed(&input, "bad _round component"))?;
        let seq_text = c[3]
            .strip_prefix(SEQ_MARKER)
            .ok_or_else(|| malformed(&input, "bad _seq component"))?;
        let seq = parse_uint(seq_text)
            .or_else(|| alpha_to_seq(seq_text))
            .filter(|&s| s >= 1)
            .ok_or_else(|| malformed(&input, "bad _seq component"))?;

        let mut rest = &c[4..];
        let mut timestamp = None;
        if rest.len() >= 2 && !rest[0].starts_with(SEGMENT_MARKER) {
            timestamp = Some(Timestamp::parse_parts(&rest[0], &rest[1])?);
            rest = &rest[2..];
        }
        let segment = match rest {
            [] => None,
            [seg] => Some(
                seg.strip_prefix(SEGMENT_MARKER)
                    .and_then(parse_uint)
                    .ok_or_else(|| malformed(&input, "bad _segment component"))?,
            ),
            _ => return Err(malformed(&input, "trailing components")),
        };
        Ok(RadarDataName {
            radar_id,
            round,
            seq,
            timestamp,
            segment,
        })
    }
}

impl PartialEq for RadarDataName {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for RadarDataName {}

impl Hash for RadarDataName {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state)
    }
}

impl PartialOrd for RadarDataName {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RadarDataName {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for RadarDataName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_name().fmt(f)
    }
}

impl FromStr for RadarDataName {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RadarDataName::from_name(&Name::parse(s)?)
    }
}

impl Serialize for RadarDataName {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RadarDataName {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn make_data_name(
    radar_id: &str,
    round: u64,
    seq: u64,
    timestamp: Option<Timestamp>,
) -> RadarDataName {
    assert!(seq >= 1, "sequence numbers start at 1");
    RadarDataName {
        radar_id: radar_id.to_string(),
        round,
        seq,
        timestamp,
        segment: None,
    }
}

/// The file a radar produces after `n`: the next sequence of the same round,
/// or sequence 1 of the following round once the round is exhausted.
pub fn next_data_name(n: &RadarDataName, seqs_per_round: u64) -> RadarDataName {
    assert!(seqs_per_round >= 1, "seqs_per_round must be at least 1");
    debug_assert!(n.segment.is_none(), "prediction works on file names");
    let (round, seq) = if n.seq < seqs_per_round {
        (n.round, n.seq + 1)
    } else {
        (n.round + 1, 1)
    };
    RadarDataName {
        radar_id: n.radar_id.clone(),
        round,
        seq,
        timestamp: None,
        segment: None,
    }
}

/// Round number derived from wall-clock seconds, optionally wrapped.
pub fn current_round(epoch_seconds: u64, round_duration_s: u64, modulus: Option<u64>) -> u64 {
    assert!(round_duration_s >= 1, "round duration must be at least 1 s");
    let round = epoch_seconds / round_duration_s;
    match modulus {
        Some(n) if n > 0 => round % n,
        _ => round,
    }
}

/// `/Interest/<radar>/_current_round/current_seq/number_of_files`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InitInterestName {
    pub radar_id: String,
}

impl InitInterestName {
    pub fn new(radar_id: &str) -> Self {
        InitInterestName {
            radar_id: radar_id.to_string(),
        }
    }

    pub fn to_name(&self) -> Name {
        let mut components = vec![INIT_PREFIX.to_string(), self.radar_id.clone()];
        components.extend(INIT_SUFFIX.iter().map(|s| s.to_string()));
        Name { components }
    }

    pub fn from_name(name: &Name) -> Option<InitInterestName> {
        match name.components() {
            [p, radar, a, b, c] if p == INIT_PREFIX && [a, b, c] == INIT_SUFFIX => {
                Some(InitInterestName::new(radar))
            }
            _ => None,
        }
    }
}

impl fmt::Display for InitInterestName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_name().fmt(f)
    }
}

/// `<location>.<state>-<YYYYMMDD>-<HHMMSS>.<suffix>`, e.g.
/// `addison.tx-20200909-000056.netcdf.gz`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LegacyFileName {
    pub location: String,
    pub state: String,
    pub date: String,
    pub time: String,
    pub format_suffix: String,
}

impl LegacyFileName {
    pub fn parse(s: &str) -> Result<LegacyFileName, NameError> {
        let err = || malformed(s, "expected location.state-YYYYMMDD-HHMMSS.suffix");
        let (location, rest) = s.split_once('.').ok_or_else(err)?;
        let (state, rest) = rest.split_once('-').ok_or_else(err)?;
        let (date, rest) = rest.split_once('-').ok_or_else(err)?;
        let (time, suffix) = rest.split_once('.').ok_or_else(err)?;
        if location.is_empty() || state.is_empty() || suffix.is_empty() || state.contains('.') {
            return Err(err());
        }
        Timestamp::parse_parts(date, time).map_err(|_| err())?;
        Ok(LegacyFileName {
            location: location.to_string(),
            state: state.to_string(),
            date: date.to_string(),
            time: time.to_string(),
            format_suffix: suffix.to_string(),
        })
    }

    pub fn timestamp(&self) -> Timestamp {
        Timestamp::parse_parts(&self.date, &self.time).expect("validated at construction")
    }
}

impl fmt::Display for LegacyFileName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{}-{}-{}.{}",
            self.location, self.state, self.date, self.time, self.format_suffix
        )
    }
}

impl FromStr for LegacyFileName {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LegacyFileName::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_examples() {
        let n = Name::parse("/data/radar1/_round=1/_seq=1").unwrap();
        assert_eq!(n.components(), ["data", "radar1", "_round=1", "_seq=1"]);

        let n = Name::parse("/addison/tx/radar1/_round=15/_seq=7/20200909/000056").unwrap();
        assert_eq!(n.len(), 7);

        assert!(matches!(
            Name::parse("//bad"),
            Err(NameError::Malformed { .. })
        ));
        assert!(Name::parse("").is_err());
        assert!(Name::parse("/").is_err());
        assert!(Name::parse("/a/").is_err());
        assert_eq!(Name::parse("a/b").unwrap().to_string(), "/a/b");
    }

    #[test]
    fn make_data_name_examples() {
        assert_eq!(
            make_data_name("radar1", 1, 1, None).to_string(),
            "/data/radar1/_round=1/_seq=1"
        );
        let ts = Timestamp::new(2020, 9, 9, 0, 0, 56).unwrap();
        let n = make_data_name("radar1", 15, 7, Some(ts));
        assert_eq!(
            n.to_string(),
            "/data/radar1/_round=15/_seq=7/20200909/000056"
        );
        let back: RadarDataName = n.to_string().parse().unwrap();
        assert_eq!(back, n);
        assert_eq!(back.timestamp, Some(ts));
        assert_eq!(
            make_data_name("radar2", 0, 1, None).to_string(),
            "/data/radar2/_round=0/_seq=1"
        );
    }

    #[test]
    fn alpha_sequences() {
        let n = make_data_name("radar1", 1, 1, None);
        assert_eq!(
            n.to_name_with(SeqStyle::Alpha).to_string(),
            "/data/radar1/_round=1/_seq=A"
        );
        let parsed: RadarDataName = "/data/radar1/_round=1/_seq=C".parse().unwrap();
        assert_eq!(parsed.seq, 3);
        for seq in [1, 26, 27, 52, 702, 703] {
            assert_eq!(alpha_to_seq(&seq_to_alpha(seq)), Some(seq));
        }
        assert_eq!(seq_to_alpha(27), "AA");
    }

    #[test]
    fn segment_component() {
        let n = make_data_name("r", 2, 3, None).with_segment(0);
        assert_eq!(n.to_string(), "/data/r/_round=2/_seq=3/_segment=0");
        assert_eq!(n.to_string().parse::<RadarDataName>().unwrap(), n);
        assert!("/data/r/_round=2/_seq=0".parse::<RadarDataName>().is_err());
        assert!("/data/r/_round=x/_seq=1".parse::<RadarDataName>().is_err());
        assert!("/data/r/_round=1/_seq=1/_segment=1/extra"
            .parse::<RadarDataName>()
            .is_err());
    }

    #[test]
    fn timestamp_ignored_by_equality() {
        let ts = Timestamp::new(2020, 9, 9, 0, 0, 56).unwrap();
        assert_eq!(
            make_data_name("r", 1, 1, Some(ts)),
            make_data_name("r", 1, 1, None)
        );
    }

    #[test]
    fn next_name_examples() {
        let n = make_data_name("radar1", 1, 2, None);
        assert_eq!(next_data_name(&n, 3), make_data_name("radar1", 1, 3, None));
        let n = make_data_name("radar1", 1, 3, None);
        assert_eq!(next_data_name(&n, 3), make_data_name("radar1", 2, 1, None));
        let n = make_data_name("radar2", 5, 1, None);
        assert_eq!(next_data_name(&n, 1), make_data_name("radar2", 6, 1, None));
    }

    #[test]
    fn next_name_wraps_after_full_round() {
        for spr in 1..=10u64 {
            let start = make_data_name("r", 4, 1, None);
            let mut n = start.clone();
            let mut seen = vec![n.seq];
            for _ in 0..spr {
                n = next_data_name(&n, spr);
                seen.push(n.seq);
            }
            assert_eq!((n.round, n.seq), (5, 1), "spr={spr}");
            // one full round visits every sequence exactly once
            let mut first_round: Vec<u64> = seen[..spr as usize].to_vec();
            first_round.sort_unstable();
            assert_eq!(first_round, (1..=spr).collect::<Vec<_>>());
        }
    }

    fn round_oracle(epoch: u64, duration: u64, modulus: Option<u64>) -> u64 {
        let mut round = 0;
        let mut boundary = duration;
        for t in 0..=epoch {
            if t == boundary {
                round += 1;
                boundary += duration;
            }
        }
        modulus.map_or(round, |m| round % m)
    }

    #[test]
    fn current_round_examples() {
        assert_eq!(current_round(140, 70, None), 2);
        assert_eq!(round_oracle(140, 70, None), 2);
        assert_eq!(current_round(0, 70, None), 0);
        assert_eq!(current_round(150, 50, Some(100)), 3);
        assert_eq!(round_oracle(150, 50, Some(100)), 3);
        for (e, d, m) in [(69, 70, None), (7000, 70, Some(60)), (1234, 55, Some(7))] {
            assert_eq!(current_round(e, d, m), round_oracle(e, d, m));
        }
    }

    #[test]
    fn init_name() {
        let n = InitInterestName::new("radar3").to_name();
        assert_eq!(
            n.to_string(),
            "/Interest/radar3/_current_round/current_seq/number_of_files"
        );
        assert_eq!(InitInterestName::from_name(&n).unwrap().radar_id, "radar3");
        assert!(InitInterestName::from_name(&Name::parse("/Interest/radar3").unwrap()).is_none());
    }

    #[test]
    fn legacy_examples() {
        let l = LegacyFileName::parse("addison.tx-20200909-000056.netcdf.gz").unwrap();
        assert_eq!(
            (
                l.location.as_str(),
                l.state.as_str(),
                l.date.as_str(),
                l.time.as_str()
            ),
            ("addison", "tx", "20200909", "000056")
        );
        assert_eq!(l.format_suffix, "netcdf.gz");
        assert_eq!(l.to_string(), "addison.tx-20200909-000056.netcdf.gz");

        let l = LegacyFileName::parse("x.y-20000101-000000.nc").unwrap();
        assert_eq!(l.format_suffix, "nc");
        assert!(LegacyFileName::parse("noseparator").is_err());
        assert!(LegacyFileName::parse("a.b-2020090-000056.nc").is_err());
    }

    fn component() -> impl Strategy<Value = String> {
        "[A-Za-z0-9_=.\\-]{1,12}"
    }

    fn radar_name() -> impl Strategy<Value = RadarDataName> {
        (
            "[a-z][a-z0-9]{0,8}",
            0u64..1_000_000,
            1u64..100,
            proptest::option::of((
                2000u32..2100,
                1u32..=12,
                1u32..=28,
                0u32..24,
                0u32..60,
                0u32..60,
            )),
            proptest::option::of(0u64..100_000),
        )
            .prop_map(|(radar, round, seq, ts, segment)| RadarDataName {
                radar_id: radar,
                round,
                seq,
                timestamp: ts
                    .map(|(y, mo, d, h, mi, s)| Timestamp::new(y, mo, d, h, mi, s).unwrap()),
                segment,
            })
    }

    proptest! {
        #[test]
        fn name_round_trip(parts in proptest::collection::vec(component(), 1..8), lead in any::<bool>()) {
            let joined = parts.join("/");
            let s = if lead { format!("/{joined}") } else { joined.clone() };
            let n = Name::parse(&s).unwrap();
            prop_assert_eq!(n.to_string(), format!("/{joined}"));
            prop_assert_eq!(n.encoded_len(), joined.len() + 1);
            prop_assert_eq!(Name::parse(&n.to_string()).unwrap(), n);
        }

        #[test]
        fn data_name_round_trip(n in radar_name(), alpha in any::<bool>()) {
            let style = if alpha { SeqStyle::Alpha } else { SeqStyle::Numeric };
            let back = RadarDataName::from_name(&n.to_name_with(style)).unwrap();
            prop_assert_eq!(&back, &n);
            prop_assert_eq!(back.timestamp, n.timestamp);
        }

        #[test]
        fn distinct_triples_format_distinctly(a in radar_name(), b in radar_name()) {
            let (a, b) = (a.file(), b.file());
            if (a.radar_id.as_str(), a.round, a.seq) != (b.radar_id.as_str(), b.round, b.seq) {
                prop_assert_ne!(
                    RadarDataName { timestamp: None, ..a }.to_string(),
                    RadarDataName { timestamp: None, ..b }.to_string()
                );
            }
        }

        #[test]
        fn legacy_round_trip(loc in "[a-z]{1,10}", st in "[a-z]{2}", ts in (2000u32..2100, 1u32..=12, 1u32..=28, 0u32..24, 0u32..60, 0u32..60), suffix in "[a-z]{1,6}(\\.[a-z]{1,3})?") {
            let t = Timestamp::new(ts.0, ts.1, ts.2, ts.3, ts.4, ts.5).unwrap();
            let l = LegacyFileName { location: loc, state: st, date: t.date_string(), time: t.time_string(), format_suffix: suffix };
            prop_assert_eq!(LegacyFileName::parse(&l.to_string()).unwrap(), l);
        }
    }
}
