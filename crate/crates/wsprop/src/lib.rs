//! WSDL-driven property-based testing of SOAP services.
//!
//! Fetches a service description, lowers its message types into generators
//! (see `wsprop_core`), sends random requests and shrinks any request that
//! draws a SOAP Fault or a malformed response.

pub mod mocks;
pub mod runner;
pub mod soap;
pub mod transport;
pub mod wsdl;
mod xml;

pub use runner::{
    response_check, run_property, CheckError, CheckOptions, LoadedService, Property, RunConfig, TestReport,
};
pub use soap::{decode_response, decode_value, encode_request, CodecError, SoapResponseKind, XmlElement};
pub use transport::{Endpoint, HttpEndpoint, HttpReply, TransportError};
pub use wsdl::{parse_wsdl, parse_wsdl_bytes, WsdlError};
