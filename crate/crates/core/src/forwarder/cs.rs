use std::num::NonZeroUsize;

use lru::LruCache;

use crate::names::Name;
use crate::packets::DataPacket;

/// Packet cache with least-recently-used eviction. A capacity of zero
/// disables caching.
#[derive(Debug)]
pub struct ContentStore {
    entries: Option<LruCache<Name, DataPacket>>,
}

impl ContentStore {
    pub fn new(capacity: usize) -> Self {
        ContentStore {
            entries: NonZeroUsize::new(capacity).map(LruCache::new),
        }
    }

    pub fn capacity(&self) -> usize {
        self.entries.as_ref().map_or(0, |c| c.cap().get())
    }

    pub fn len(&self) -> usize {
        self.entries.as_ref().map_or(0, LruCache::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// A hit refreshes the entry's recency.
    pub fn lookup(&mut self, name: &Name) -> Option<DataPacket> {
        self.entries.as_mut()?.get(name).cloned()
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.entries.as_ref().is_some_and(|c| c.contains(name))
    }

    /// Returns the evicted entry, if the insert pushed one out.
    pub fn insert(&mut self, data: DataPacket) -> Option<DataPacket> {
        let cache = self.entries.as_mut()?;
        let name = data.name.clone();
        match cache.push(name.clone(), data) {
            Some((old_name, old)) if old_name != name => Some(old),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bytes::Bytes;
    use proptest::prelude::*;

    fn data(i: u64) -> DataPacket {
        let name = Name::parse(&format!("/data/r/_round=0/_seq=1/_segment={i}")).unwrap();
        DataPacket::new(name, Bytes::from_static(b"x"), Some(100), None)
    }

    #[test]
    fn lru_eviction_at_capacity() {
        let mut cs = ContentStore::new(3);
        for i in 0..3 {
            assert!(cs.insert(data(i)).is_none());
        }
        // touch 0 so 1 becomes least recent
        assert!(cs.lookup(&data(0).name).is_some());
        let evicted = cs.insert(data(3)).unwrap();
        assert_eq!(evicted.name, data(1).name);
        assert_eq!(cs.len(), 3);
        assert!(cs.contains(&data(0).name));
        assert!(!cs.contains(&data(1).name));
    }

    #[test]
    fn reinsert_same_name_does_not_evict() {
        let mut cs = ContentStore::new(2);
        cs.insert(data(0));
        cs.insert(data(1));
        assert!(cs.insert(data(1)).is_none());
        assert_eq!(cs.len(), 2);
    }

    #[test]
    fn zero_capacity_caches_nothing() {
        let mut cs = ContentStore::new(0);
        assert!(cs.insert(data(0)).is_none());
        assert!(cs.lookup(&data(0).name).is_none());
        assert!(cs.is_empty());
    }

    proptest! {
        #[test]
        fn never_exceeds_capacity(cap in 1usize..16, ops in proptest::collection::vec((0u64..40, any::<bool>()), 0..200)) {
            let mut cs = ContentStore::new(cap);
            for (i, is_lookup) in ops {
                if is_lookup {
                    cs.lookup(&data(i).name);
                } else {
                    cs.insert(data(i));
                }
                prop_assert!(cs.len() <= cap);
            }
        }
    }
}
