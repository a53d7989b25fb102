use std::fmt;
use std::sync::{Arc, Mutex};

use super::{Index, Seq};
use crate::error::Result;
use crate::real::Real;

/// A sequence with a shared, grow-only cache of its evaluated prefix.
///
/// Clones share the cache. Evaluation is deterministic, so the cache is
/// invisible to callers apart from speed.
#[derive(Clone)]
pub struct CachedSeq {
    seq: Arc<Seq>,
    prefix: Arc<Mutex<Vec<Real>>>,
}

impl CachedSeq {
    pub fn new(seq: Seq) -> CachedSeq {
        CachedSeq {
            seq: Arc::new(seq),
            prefix: Arc::new(Mutex::new(Vec::new())),
        }
    }

    pub fn seq(&self) -> &Seq {
        &self.seq
    }

    pub fn eval(&self, n: Index) -> Result<Real> {
        let mut cache = self.prefix.lock().unwrap_or_else(|e| e.into_inner());
        let idx = n as usize;
        while cache.len() <= idx {
            let next = cache.len() as Index;
            cache.push(self.seq.eval(next)?);
        }
        Ok(cache[idx].clone())
    }

    /// Values on `lo..=hi`, filling the cache as needed.
    pub fn range(&self, lo: Index, hi: Index) -> Result<Vec<Real>> {
        self.eval(hi)?;
        let cache = self.prefix.lock().unwrap_or_else(|e| e.into_inner());
        Ok(cache[lo as usize..=hi as usize].to_vec())
    }
}

impl fmt::Debug for CachedSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CachedSeq({})", self.seq)
    }
}
