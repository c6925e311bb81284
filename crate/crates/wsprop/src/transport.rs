//! Getting documents and envelopes to and from services.
//!
//! [`HttpEndpoint`] speaks HTTP/1.1 (and reads `file://` URLs and plain
//! paths for local WSDL files); [`FakeEndpoint`](crate::mocks::FakeEndpoint)
//! dispatches to in-process mock services.

use std::io::Read;
use std::time::Duration;

/// Status line and body of an HTTP response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpReply {
    pub status: u16,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    #[error("timed out: {0}")]
    Timeout(String),
    #[error("connection failed: {0}")]
    ConnectionFailed(String),
    #[error("HTTP status {0}")]
    HttpError(u16),
}

/// Something that can fetch documents and accept SOAP posts.
///
/// `post_soap` sends `Content-Type: text/xml; charset=utf-8` and a quoted
/// `SOAPAction` header. A reply with any status, including a 500 carrying a
/// Fault, is returned as an [`HttpReply`]; only failures to get a reply at
/// all are errors.
pub trait Endpoint: Send {
    /// Raw document bytes; non-2xx statuses are errors.
    fn fetch(&mut self, url: &str) -> Result<Vec<u8>, TransportError>;

    fn post_soap(&mut self, url: &str, soap_action: &str, envelope: &str) -> Result<HttpReply, TransportError>;
}

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

/// Upper bound on fetched document and reply sizes.
const MAX_BODY: u64 = 32 * 1024 * 1024;

pub struct HttpEndpoint {
    fetch_agent: ureq::Agent,
    post_agent: ureq::Agent,
}

impl Default for HttpEndpoint {
    fn default() -> Self {
        Self::new(DEFAULT_TIMEOUT)
    }
}

impl HttpEndpoint {
    pub fn new(timeout: Duration) -> Self {
        let agent = |redirects| ureq::AgentBuilder::new().timeout(timeout).redirects(redirects).build();
        HttpEndpoint {
            fetch_agent: agent(5),
            post_agent: agent(0),
        }
    }
}

fn transport_error(err: ureq::Transport) -> TransportError {
    let message = err.to_string();
    let timed_out = matches!(err.kind(), ureq::ErrorKind::Io)
        && std::error::Error::source(&err)
            .and_then(|s| s.downcast_ref::<std::io::Error>())
            .is_some_and(|e| matches!(e.kind(), std::io::ErrorKind::TimedOut | std::io::ErrorKind::WouldBlock));
    if timed_out || message.contains("timed out") {
        TransportError::Timeout(message)
    } else {
        TransportError::ConnectionFailed(message)
    }
}

fn read_body(resp: ureq::Response) -> Result<Vec<u8>, TransportError> {
    let mut body = Vec::new();
    resp.into_reader()
        .take(MAX_BODY)
        .read_to_end(&mut body)
        .map_err(|e| match e.kind() {
            std::io::ErrorKind::TimedOut | std::io::ErrorKind::WouldBlock => TransportError::Timeout(e.to_string()),
            _ => TransportError::ConnectionFailed(e.to_string()),
        })?;
    Ok(body)
}

/// Local file named by a `file://` URL or a path without a scheme.
fn local_path(url: &str) -> Option<std::path::PathBuf> {
    if let Ok(parsed) = url::Url::parse(url) {
        return match parsed.scheme() {
            "file" => parsed.to_file_path().ok(),
            // A Windows drive letter parses as a one-letter scheme.
            s if s.len() == 1 => Some(url.into()),
            _ => None,
        };
    }
    Some(url.into())
}

impl Endpoint for HttpEndpoint {
    fn fetch(&mut self, url: &str) -> Result<Vec<u8>, TransportError> {
        if let Some(path) = local_path(url) {
            return std::fs::read(&path)
                .map_err(|e| TransportError::ConnectionFailed(format!("{}: {e}", path.display())));
        }
        match self.fetch_agent.get(url).call() {
            Ok(resp) => read_body(resp),
            Err(ureq::Error::Status(code, _)) => Err(TransportError::HttpError(code)),
            Err(ureq::Error::Transport(t)) => Err(transport_error(t)),
        }
    }

    fn post_soap(&mut self, url: &str, soap_action: &str, envelope: &str) -> Result<HttpReply, TransportError> {
        let result = self
            .post_agent
            .post(url)
            .set("Content-Type", "text/xml; charset=utf-8")
            .set("SOAPAction", &format!("\"{soap_action}\""))
            .send_string(envelope);
        let resp = match result {
            Ok(resp) | Err(ureq::Error::Status(_, resp)) => resp,
            Err(ureq::Error::Transport(t)) => return Err(transport_error(t)),
        };
        let status = resp.status();
        let body = read_body(resp)?;
        Ok(HttpReply {
            status,
            body: String::from_utf8_lossy(&body).into_owned(),
        })
    }
}
