//! Client for a remote encoder speaking a small JSON protocol:
//! `POST /embed` with `{"texts":[..],"granularity":".."}`, answered by
//! `{"dim":D,"results":[{"tokens":[..]|null,"vectors":[[..]]}]}`.

use std::collections::{HashMap, HashSet};
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Mutex, RwLock};
use std::thread;
use std::time::Duration;

use serde::Deserialize;

use super::store::{quantize, record_embedding, EmbeddingStore};
use super::{Embedding, EmbeddingKey, EmbeddingProvider, Granularity};
use crate::error::{Error, Result};
use crate::metrics::TokenEmbeddingSeq;

pub const DEFAULT_TIMEOUT_SECS: u64 = 60;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub url: String,
    pub timeout: Duration,
    /// Extra attempts after the first failed one.
    pub retries: usize,
    pub batch_size: usize,
    /// JSONL file mirroring every fetched embedding. Existing entries are
    /// served without network access.
    pub cache_path: Option<PathBuf>,
}

impl ServiceConfig {
    pub fn new(url: impl Into<String>) -> Self {
        ServiceConfig {
            url: url.into(),
            timeout: Duration::from_secs(DEFAULT_TIMEOUT_SECS),
            retries: 2,
            batch_size: 64,
            cache_path: None,
        }
    }

    fn endpoint(&self) -> String {
        let base = self.url.trim_end_matches('/');
        if base.ends_with("/embed") {
            base.to_string()
        } else {
            format!("{base}/embed")
        }
    }
}

#[derive(Deserialize)]
struct Response {
    dim: usize,
    results: Vec<ResponseItem>,
}

#[derive(Deserialize)]
struct ResponseItem {
    tokens: Option<Vec<String>>,
    vectors: Vec<Vec<f64>>,
}

struct CacheState {
    dim: Option<usize>,
    entries: HashMap<EmbeddingKey, Embedding>,
}

pub struct EmbeddingService {
    config: ServiceConfig,
    agent: ureq::Agent,
    cache: RwLock<CacheState>,
    writer: Mutex<()>,
    provenance: String,
    requests: AtomicUsize,
}

impl EmbeddingService {
    pub fn new(config: ServiceConfig) -> Result<Self> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        let mut state = CacheState {
            dim: None,
            entries: HashMap::new(),
        };
        let mut provenance = format!("service:{}", config.url);
        if let Some(path) = &config.cache_path {
            if path.exists() && fs::metadata(path).map(|m| m.len() > 0).unwrap_or(false) {
                let store = super::load_store(path)?;
                state.dim = Some(store.dim());
                provenance = store.provenance();
                for (k, v) in store.entries() {
                    state.entries.insert(k.clone(), v.clone());
                }
            }
        }
        Ok(EmbeddingService {
            config,
            agent,
            cache: RwLock::new(state),
            writer: Mutex::new(()),
            provenance,
            requests: AtomicUsize::new(0),
        })
    }

    /// Number of HTTP requests issued so far, retries included.
    pub fn request_count(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }

    fn post(&self, body: &str) -> Result<String> {
        let endpoint = self.config.endpoint();
        let mut last = String::new();
        for attempt in 0..=self.config.retries {
            if attempt > 0 {
                thread::sleep(Duration::from_millis(100 * attempt as u64));
            }
            self.requests.fetch_add(1, Ordering::SeqCst);
            let sent = self
                .agent
                .post(&endpoint)
                .header("Content-Type", "application/json")
                .send(body);
            match sent {
                Ok(mut resp) if resp.status().as_u16() == 200 => {
                    match resp.body_mut().with_config().limit(u64::MAX).read_to_string() {
                        Ok(text) => return Ok(text),
                        Err(e) => last = e.to_string(),
                    }
                }
                Ok(resp) => last = format!("HTTP status {}", resp.status().as_u16()),
                Err(e) => last = e.to_string(),
            }
            log::debug!("embedding request attempt {} failed: {last}", attempt + 1);
        }
        Err(Error::Transport {
            retries: self.config.retries,
            message: format!("{endpoint}: {last}"),
        })
    }

    fn fetch(&self, texts: &[&str], granularity: Granularity) -> Result<()> {
        let body = serde_json::json!({ "texts": texts, "granularity": granularity }).to_string();
        let text = self.post(&body)?;
        let resp: Response = serde_json::from_str(&text).map_err(|e| Error::Transport {
            retries: 0,
            message: format!("malformed service response: {e}"),
        })?;
        if resp.results.len() != texts.len() {
            return Err(Error::Transport {
                retries: 0,
                message: format!(
                    "service returned {} results for {} texts",
                    resp.results.len(),
                    texts.len()
                ),
            });
        }

        let mut fetched = Vec::with_capacity(texts.len());
        for (t, item) in texts.iter().zip(resp.results) {
            let vectors = item
                .vectors
                .into_iter()
                .map(|v| v.into_iter().map(quantize).collect())
                .collect();
            let emb = record_embedding(granularity, item.tokens, vectors, resp.dim)?;
            fetched.push((EmbeddingKey::new(*t, granularity)?, emb));
        }

        let _guard = self.writer.lock().expect("cache writer poisoned");
        {
            let state = self.cache.read().expect("cache poisoned");
            if let Some(d) = state.dim {
                if d != resp.dim {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: resp.dim,
                    });
                }
            }
        }
        if let Some(path) = &self.config.cache_path {
            let fresh = !path.exists() || fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| Error::io(path, e))?;
            let mut out = String::new();
            if fresh {
                out.push_str(&EmbeddingStore::header_line(resp.dim, &self.provenance));
                out.push('\n');
            }
            for (k, e) in &fetched {
                out.push_str(&EmbeddingStore::record_line(&k.text, e));
                out.push('\n');
            }
            f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))?;
        }
        let mut state = self.cache.write().expect("cache poisoned");
        state.dim = Some(resp.dim);
        state.entries.extend(fetched);
        Ok(())
    }

    fn cached(&self, key: &EmbeddingKey) -> Option<Embedding> {
        self.cache
            .read()
            .expect("cache poisoned")
            .entries
            .get(key)
            .cloned()
    }

    fn get(&self, key: EmbeddingKey) -> Result<Embedding> {
        if let Some(e) = self.cached(&key) {
            return Ok(e);
        }
        self.fetch(&[&key.text], key.granularity)?;
        self.cached(&key).ok_or_else(|| key.missing())
    }
}

impl EmbeddingProvider for EmbeddingService {
    fn sentence(&self, text: &str) -> Result<Vec<f64>> {
        match self.get(EmbeddingKey::sentence(text)?)? {
            Embedding::Sentence(v) => Ok(v),
            Embedding::Tokens(_) => unreachable!("key granularity matches entry"),
        }
    }

    fn tokens(&self, text: &str) -> Result<TokenEmbeddingSeq> {
        match self.get(EmbeddingKey::tokens(text)?)? {
            Embedding::Tokens(t) => Ok(t),
            Embedding::Sentence(_) => unreachable!("key granularity matches entry"),
        }
    }

    fn provenance(&self) -> String {
        self.provenance.clone()
    }

    fn prefetch(&self, texts: &[&str], granularity: Granularity) -> Result<()> {
        let mut missing: Vec<&str> = Vec::new();
        let mut seen = HashSet::new();
        {
            let state = self.cache.read().expect("cache poisoned");
            for &t in texts {
                if t.is_empty() || !seen.insert(t) {
                    continue;
                }
                let key = EmbeddingKey::new(t, granularity)?;
                if !state.entries.contains_key(&key) {
                    missing.push(t);
                }
            }
        }
        for chunk in missing.chunks(self.config.batch_size.max(1)) {
            self.fetch(chunk, granularity)?;
        }
        Ok(())
    }
}
