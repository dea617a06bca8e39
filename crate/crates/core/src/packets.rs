//! Interest and Data messages, file segmentation and integrity digests.
//!
//! Serialized sizes follow a fixed model used by the simulator for link
//! arithmetic: a Data packet costs a 64-byte header plus its payload plus the
//! piggybacked name (if any); an Interest costs the header plus its name.

use std::fmt::Write as _;
use std::time::Duration;

use bytes::Bytes;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::names::{InitInterestName, Name, RadarDataName};

pub const DEFAULT_CHUNK_SIZE: usize = 8192;
pub const HEADER_BYTES: usize = 64;
pub const DEFAULT_INTEREST_LIFETIME: Duration = Duration::from_secs(4);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InterestKind {
    Init,
    Data,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterestPacket {
    pub name: Name,
    pub nonce: u64,
    pub lifetime: Duration,
    pub kind: InterestKind,
}

impl InterestPacket {
    /// The kind is derived from the name: initialization Interests are
    /// exactly the names matching the init grammar.
    pub fn new(name: Name, nonce: u64, lifetime: Duration) -> InterestPacket {
        assert!(!lifetime.is_zero(), "Interest lifetime must be positive");
        let kind = if InitInterestName::from_name(&name).is_some() {
            InterestKind::Init
        } else {
            InterestKind::Data
        };
        InterestPacket {
            name,
            nonce,
            lifetime,
            kind,
        }
    }

    pub fn wire_size(&self) -> usize {
        HEADER_BYTES + self.name.encoded_len()
    }
}

pub type DigestBytes = [u8; 32];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataPacket {
    pub name: Name,
    pub payload: Bytes,
    /// Index of the last segment of the file this packet belongs to.
    pub final_block: Option<u64>,
    /// Name of the next file the producer will serve.
    pub piggyback_next: Option<Name>,
    pub digest: DigestBytes,
}

fn compute_digest(name: &Name, payload: &[u8], piggyback: Option<&Name>) -> DigestBytes {
    let mut h = Sha256::new();
    let name = name.to_string();
    h.update((name.len() as u64).to_be_bytes());
    h.update(name.as_bytes());
    h.update((payload.len() as u64).to_be_bytes());
    h.update(payload);
    match piggyback {
        Some(next) => {
            h.update([1u8]);
            h.update(next.to_string().as_bytes());
        }
        None => h.update([0u8]),
    }
    h.finalize().into()
}

impl DataPacket {
    pub fn new(
        name: Name,
        payload: Bytes,
        final_block: Option<u64>,
        piggyback_next: Option<Name>,
    ) -> DataPacket {
        let digest = compute_digest(&name, &payload, piggyback_next.as_ref());
        DataPacket {
            name,
            payload,
            final_block,
            piggyback_next,
            digest,
        }
    }

    pub fn wire_size(&self) -> usize {
        HEADER_BYTES
            + self.payload.len()
            + self.piggyback_next.as_ref().map_or(0, Name::encoded_len)
    }

    pub fn verify_digest(&self) -> bool {
        compute_digest(&self.name, &self.payload, self.piggyback_next.as_ref()) == self.digest
    }
}

/// Returns `p` carrying `next` as its announced successor, with a fresh
/// digest. Any previous announcement is replaced.
pub fn attach_piggyback(p: DataPacket, next: Name) -> DataPacket {
    DataPacket::new(p.name, p.payload, p.final_block, Some(next))
}

pub fn verify_digest(p: &DataPacket) -> bool {
    p.verify_digest()
}

/// Number of segments a file of `len` bytes occupies. Empty files still
/// occupy one (empty) segment.
pub fn segment_count(len: usize, chunk_size: usize) -> u64 {
    assert!(chunk_size >= 1, "chunk size must be at least 1");
    len.div_ceil(chunk_size).max(1) as u64
}

/// Builds segment `index` of `content`, or `None` past the final block.
pub fn make_segment(
    base: &RadarDataName,
    content: &Bytes,
    chunk_size: usize,
    index: u64,
    piggyback_next: Option<Name>,
) -> Option<DataPacket> {
    let count = segment_count(content.len(), chunk_size);
    if index >= count {
        return None;
    }
    let start = (index as usize) * chunk_size;
    let end = (start + chunk_size).min(content.len());
    Some(DataPacket::new(
        base.with_segment(index).to_name(),
        content.slice(start..end),
        Some(count - 1),
        piggyback_next,
    ))
}

pub fn segment_file(base: &RadarDataName, content: &Bytes, chunk_size: usize) -> Vec<DataPacket> {
    (0..segment_count(content.len(), chunk_size))
        .map(|i| make_segment(base, content, chunk_size, i, None).expect("index in range"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PayloadError {
    #[error("init response payload must be 24 bytes, got {0}")]
    BadInitResponse(usize),
}

/// State a radar reports in reply to an initialization Interest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitResponse {
    pub radar_id: String,
    pub current_round: u64,
    pub current_seq: u64,
    pub number_of_files: u64,
}

impl InitResponse {
    pub fn encode(&self) -> Bytes {
        let mut buf = Vec::with_capacity(24);
        buf.extend_from_slice(&self.current_round.to_be_bytes());
        buf.extend_from_slice(&self.current_seq.to_be_bytes());
        buf.extend_from_slice(&self.number_of_files.to_be_bytes());
        Bytes::from(buf)
    }

    pub fn decode(radar_id: &str, payload: &[u8]) -> Result<InitResponse, PayloadError> {
        if payload.len() != 24 {
            return Err(PayloadError::BadInitResponse(payload.len()));
        }
        let word =
            |i: usize| u64::from_be_bytes(payload[i * 8..i * 8 + 8].try_into().expect("8 bytes"));
        Ok(InitResponse {
            radar_id: radar_id.to_string(),
            current_round: word(0),
            current_seq: word(1),
            number_of_files: word(2),
        })
    }
}

/// One segment of a file pushed by a radar without being requested, as the
/// legacy sender-driven distribution does. Only sizes travel; contents are
/// irrelevant to the push model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushSegment {
    pub file: RadarDataName,
    pub index: u64,
    pub final_block: u64,
    pub payload_len: usize,
    pub file_size: u64,
}

impl PushSegment {
    pub fn wire_size(&self) -> usize {
        HEADER_BYTES + self.payload_len
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Packet {
    Interest(InterestPacket),
    Data(DataPacket),
    Push(PushSegment),
}

impl Packet {
    pub fn wire_size(&self) -> usize {
        match self {
            Packet::Interest(i) => i.wire_size(),
            Packet::Data(d) => d.wire_size(),
            Packet::Push(p) => p.wire_size(),
        }
    }

    /// One tab-separated line describing the packet, for trace dumps.
    pub fn trace_line(&self) -> String {
        match self {
            Packet::Interest(i) => format!(
                "I\t{}\t{:016x}\t{}\t{:?}",
                i.name,
                i.nonce,
                i.lifetime.as_millis(),
                i.kind
            ),
            Packet::Data(d) => {
                let mut digest = String::with_capacity(64);
                for b in d.digest {
                    let _ = write!(digest, "{b:02x}");
                }
                format!(
                    "D\t{}\t{}\t{}\t{}\t{}",
                    d.name,
                    d.payload.len(),
                    d.final_block.map_or("-".to_string(), |b| b.to_string()),
                    d.piggyback_next
                        .as_ref()
                        .map_or("-".to_string(), |n| n.to_string()),
                    digest
                )
            }
            Packet::Push(p) => format!(
                "P\t{}\t{}\t{}\t{}",
                p.file, p.index, p.final_block, p.payload_len
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::names::make_data_name;
    use proptest::prelude::*;

    fn base() -> RadarDataName {
        make_data_name("radar1", 1, 1, None)
    }

    fn content(len: usize) -> Bytes {
        Bytes::from((0..len).map(|i| (i * 31 % 251) as u8).collect::<Vec<_>>())
    }

    #[test]
    fn segment_examples() {
        let segs = segment_file(&base(), &content(20_000), 8192);
        // ceil(20000 / 8192) = 3; 20000 - 2 * 8192 = 3616
        assert_eq!(
            segs.iter().map(|s| s.payload.len()).collect::<Vec<_>>(),
            [8192, 8192, 3616]
        );
        assert!(segs.iter().all(|s| s.final_block == Some(2)));
        for (i, s) in segs.iter().enumerate() {
            let n = RadarDataName::from_name(&s.name).unwrap();
            assert_eq!(n.segment, Some(i as u64));
        }

        let segs = segment_file(&base(), &Bytes::new(), 8192);
        assert_eq!(segs.len(), 1);
        assert!(segs[0].payload.is_empty());
        assert_eq!(segs[0].final_block, Some(0));

        let segs = segment_file(&base(), &content(8192), 8192);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].final_block, Some(0));
        assert!(make_segment(&base(), &content(8192), 8192, 1, None).is_none());
    }

    #[test]
    fn piggyback_examples() {
        let pkt = segment_file(&base(), &content(100), 8192).remove(0);
        let next = Name::parse("/data/radar1/_round=2/_seq=1").unwrap();
        let with = attach_piggyback(pkt.clone(), next.clone());
        assert_eq!(with.piggyback_next.as_ref(), Some(&next));
        assert!(verify_digest(&with));
        assert_ne!(with.digest, pkt.digest);
        assert_eq!(with.wire_size() - pkt.wire_size(), next.encoded_len());
        assert_eq!(next.encoded_len(), next.to_string().len());

        let next2 = Name::parse("/data/radar1/_round=2/_seq=2").unwrap();
        let again = attach_piggyback(with, next2.clone());
        assert_eq!(again.piggyback_next, Some(next2));
        assert!(verify_digest(&again));
    }

    #[test]
    fn tamper_detection() {
        let pkt = segment_file(&base(), &content(500), 8192).remove(0);
        assert!(verify_digest(&pkt));

        let mut flipped = pkt.payload.to_vec();
        flipped[17] ^= 0x01;
        let tampered = DataPacket {
            payload: Bytes::from(flipped),
            ..pkt.clone()
        };
        assert!(!verify_digest(&tampered));

        let with = attach_piggyback(pkt, Name::parse("/data/radar1/_round=1/_seq=2").unwrap());
        let altered = DataPacket {
            piggyback_next: Some(Name::parse("/data/radar1/_round=9/_seq=2").unwrap()),
            ..with.clone()
        };
        // oracle: the stored digest no longer matches a fresh hash of the content
        assert_ne!(
            compute_digest(
                &altered.name,
                &altered.payload,
                altered.piggyback_next.as_ref()
            ),
            altered.digest
        );
        assert!(!verify_digest(&altered));
        let stripped = DataPacket {
            piggyback_next: None,
            ..with
        };
        assert!(!verify_digest(&stripped));
    }

    #[test]
    fn interest_kind_and_size() {
        let init = InitInterestName::new("radar1").to_name();
        let i = InterestPacket::new(init.clone(), 7, DEFAULT_INTEREST_LIFETIME);
        assert_eq!(i.kind, InterestKind::Init);
        assert_eq!(i.wire_size(), 64 + init.to_string().len());
        let d = InterestPacket::new(
            base().with_segment(0).to_name(),
            8,
            DEFAULT_INTEREST_LIFETIME,
        );
        assert_eq!(d.kind, InterestKind::Data);
    }

    #[test]
    fn init_response_codec() {
        let r = InitResponse {
            radar_id: "radar1".into(),
            current_round: 15,
            current_seq: 7,
            number_of_files: 3,
        };
        assert_eq!(InitResponse::decode("radar1", &r.encode()).unwrap(), r);
        assert!(InitResponse::decode("radar1", &[0u8; 5]).is_err());
    }

    #[test]
    fn trace_line_is_tab_separated() {
        let pkt = segment_file(&base(), &content(10), 8192).remove(0);
        let line = Packet::Data(pkt).trace_line();
        assert_eq!(line.split('\t').count(), 6);
        assert!(!line.contains('\n'));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reassembly(
            (len, chunk) in prop_oneof![0usize..100_000, 0usize..=16 * 1024 * 1024]
                .prop_flat_map(|len| (Just(len), (len / 4096).max(1)..65_536)),
            seed in any::<u8>(),
        ) {
            let data = Bytes::from(vec![seed; len]);
            let segs = segment_file(&base(), &data, chunk);
            prop_assert_eq!(segs.len() as u64, segment_count(len, chunk));
            let final_block = segs.len() as u64 - 1;
            let mut joined = Vec::with_capacity(len);
            for s in &segs {
                prop_assert_eq!(s.final_block, Some(final_block));
                prop_assert!(s.payload.len() <= chunk);
                joined.extend_from_slice(&s.payload);
            }
            prop_assert_eq!(joined.len(), len);
            prop_assert!(joined == data);
        }

        #[test]
        fn digest_deterministic(payload in proptest::collection::vec(any::<u8>(), 0..256), seq in 1u64..9) {
            let name = make_data_name("r", 0, seq, None).with_segment(0).to_name();
            let next = Some(make_data_name("r", 0, seq + 1, None).to_name());
            let a = DataPacket::new(name.clone(), Bytes::from(payload.clone()), Some(0), next.clone());
            let b = DataPacket::new(name, Bytes::from(payload), Some(0), next);
            prop_assert_eq!(a.digest, b.digest);
        }
    }
}
