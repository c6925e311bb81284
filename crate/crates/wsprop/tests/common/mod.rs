#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use wsprop::transport::{Endpoint, HttpReply, TransportError};

pub const FIXTURE_HOST: &str = "http://fixtures.local/";

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_dir().join(name)).unwrap()
}

/// Serves the fixture directory under `FIXTURE_HOST` and counts fetches.
#[derive(Default)]
pub struct FixtureEndpoint {
    pub fetches: BTreeMap<String, usize>,
}

impl Endpoint for FixtureEndpoint {
    fn fetch(&mut self, url: &str) -> Result<Vec<u8>, TransportError> {
        *self.fetches.entry(url.to_string()).or_default() += 1;
        let rel = url
            .strip_prefix(FIXTURE_HOST)
            .ok_or_else(|| TransportError::ConnectionFailed(url.to_string()))?;
        std::fs::read(fixture_dir().join(rel)).map_err(|_| TransportError::HttpError(404))
    }

    fn post_soap(&mut self, url: &str, _: &str, _: &str) -> Result<HttpReply, TransportError> {
        Err(TransportError::ConnectionFailed(url.to_string()))
    }
}

/// Answers every post with a fixed reply.
pub struct CannedEndpoint {
    pub wsdl: String,
    pub reply: Result<HttpReply, TransportError>,
    pub posts: usize,
}

impl Endpoint for CannedEndpoint {
    fn fetch(&mut self, _: &str) -> Result<Vec<u8>, TransportError> {
        Ok(self.wsdl.clone().into_bytes())
    }

    fn post_soap(&mut self, _: &str, _: &str, _: &str) -> Result<HttpReply, TransportError> {
        self.posts += 1;
        self.reply.clone()
    }
}
