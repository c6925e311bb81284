//! In-process SOAP services used as test targets.
//!
//! Each mock owns a WSDL document (with a `{{LOCATION}}` placeholder for its
//! address) and a handler over decoded request values. The same mock can be
//! reached through [`FakeEndpoint`] without sockets or served over HTTP with
//! [`MockServer`].

use std::sync::Arc;
use std::thread::JoinHandle;

use wsprop_core::shrink::simplest;
use wsprop_core::{lower_operation_input, lower_operation_output, NamedIr, OperationDef, Value, WsdlModel};

use crate::soap::{decode_response, decode_value, encode_envelope, fault_envelope, SoapResponseKind};
use crate::transport::{Endpoint, HttpReply, TransportError};
use crate::wsdl::{parse_wsdl, WsdlError};

pub const LOCATION_PLACEHOLDER: &str = "{{LOCATION}}";

/// Base URL under which [`FakeEndpoint`] exposes its mocks.
pub const FAKE_HOST: &str = "http://mock.local";

pub const CONVERT_COOKING_WSDL: &str = include_str!("../wsdl/convert_cooking.wsdl");
pub const PLACE_ORDER_WSDL: &str = include_str!("../wsdl/place_order.wsdl");
pub const DELETE_WSDL: &str = include_str!("../wsdl/delete.wsdl");

/// Names accepted by [`by_name`].
pub const MOCK_NAMES: [&str; 3] = ["convertcooking", "placeorder", "delete"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fault {
    pub code: String,
    pub string: String,
}

impl Fault {
    pub fn client(string: impl Into<String>) -> Self {
        Fault {
            code: "soap:Client".into(),
            string: string.into(),
        }
    }

    pub fn server(string: impl Into<String>) -> Self {
        Fault {
            code: "soap:Server".into(),
            string: string.into(),
        }
    }
}

type Handler = Box<dyn Fn(&str, &Value) -> Result<Value, Fault> + Send + Sync>;

struct BoundOperation {
    def: OperationDef,
    input: NamedIr,
    output: NamedIr,
}

pub struct MockService {
    name: String,
    wsdl_template: String,
    model: WsdlModel,
    operations: Vec<BoundOperation>,
    handler: Handler,
}

impl std::fmt::Debug for MockService {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MockService")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

struct NoImports;

impl Endpoint for NoImports {
    fn fetch(&mut self, url: &str) -> Result<Vec<u8>, TransportError> {
        Err(TransportError::ConnectionFailed(format!(
            "mock WSDL may not import {url}"
        )))
    }

    fn post_soap(&mut self, url: &str, _: &str, _: &str) -> Result<HttpReply, TransportError> {
        Err(TransportError::ConnectionFailed(url.to_string()))
    }
}

impl MockService {
    /// Operations whose messages cannot be lowered are left out; requests
    /// for them get a Client fault.
    pub fn new(
        name: impl Into<String>,
        wsdl_template: impl Into<String>,
        handler: impl Fn(&str, &Value) -> Result<Value, Fault> + Send + Sync + 'static,
    ) -> Result<Self, WsdlError> {
        let name = name.into();
        let wsdl_template = wsdl_template.into();
        let location = format!("{FAKE_HOST}/{name}");
        let model = parse_wsdl(
            &wsdl_template.replace(LOCATION_PLACEHOLDER, &location),
            &location,
            &mut NoImports,
        )?;
        let operations = model
            .operations
            .iter()
            .filter_map(|def| {
                Some(BoundOperation {
                    def: def.clone(),
                    input: lower_operation_input(&model.schema, def).ok()?,
                    output: lower_operation_output(&model.schema, def).ok()?,
                })
            })
            .collect();
        Ok(MockService {
            name,
            wsdl_template,
            model,
            operations,
            handler: Box::new(handler),
        })
    }

    /// A service that answers every request with the simplest value of the
    /// operation's output type.
    pub fn accepting(name: impl Into<String>, wsdl_template: impl Into<String>) -> Result<Self, WsdlError> {
        let mut mock = MockService::new(name, wsdl_template, |_, _| Err(Fault::server("unset")))?;
        let outputs: Vec<(String, Option<Value>)> = mock
            .operations
            .iter()
            .map(|op| (op.def.name.clone(), simplest(&op.output.ir)))
            .collect();
        mock.handler = Box::new(move |op, _| {
            outputs
                .iter()
                .find(|(name, _)| name == op)
                .and_then(|(_, v)| v.clone())
                .ok_or_else(|| Fault::server(format!("no response value for {op}")))
        });
        Ok(mock)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn model(&self) -> &WsdlModel {
        &self.model
    }

    /// The WSDL document with its service address set to `location`.
    pub fn wsdl(&self, location: &str) -> String {
        self.wsdl_template.replace(LOCATION_PLACEHOLDER, location)
    }

    /// Handles one SOAP request. Faults are sent with status 500.
    pub fn respond(&self, envelope: &str) -> HttpReply {
        let fault = |f: Fault| HttpReply {
            status: 500,
            body: fault_envelope(&f.code, &f.string),
        };
        let body = match decode_response(envelope) {
            SoapResponseKind::Ok { body_element } => body_element,
            SoapResponseKind::Fault { .. } => return fault(Fault::client("request body is a Fault")),
            SoapResponseKind::Malformed { reason } => return fault(Fault::client(reason)),
        };
        let Some(op) = self.operations.iter().find(|op| op.def.input_element == body.name) else {
            return fault(Fault::client(format!("no operation accepts element {}", body.name)));
        };
        let request = match decode_value(&op.input, &body) {
            Ok(v) => v,
            Err(e) => return fault(Fault::client(e.to_string())),
        };
        match (self.handler)(&op.def.name, &request) {
            Ok(answer) => match encode_envelope(&op.output, &answer) {
                Ok(body) => HttpReply { status: 200, body },
                Err(e) => fault(Fault::server(e.to_string())),
            },
            Err(f) => fault(f),
        }
    }
}

fn text_field(v: &Value, name: &str) -> Result<String, Fault> {
    match v.field(name) {
        Some(Value::Text(s)) => Ok(s.clone()),
        Some(chars) => chars
            .as_char_string()
            .ok_or_else(|| Fault::client(format!("{name} is not text"))),
        None => Err(Fault::client(format!("missing {name}"))),
    }
}

/// Millilitres per unit.
const COOKING_UNITS: [(&str, f64); 10] = [
    ("drop", 0.05),
    ("dash", 0.616),
    ("pinch", 0.308),
    ("teaspoon", 4.928_921_593_75),
    ("tablespoon", 14.786_764_781_25),
    ("fluidOunce", 29.573_529_562_5),
    ("cup", 236.588_236_5),
    ("pint", 473.176_473),
    ("quart", 946.352_946),
    ("TenCan", 3_056.0),
];

/// Converts between cooking volume units. Always answers.
pub fn convert_cooking() -> MockService {
    MockService::new("convertcooking", CONVERT_COOKING_WSDL, |_, req| {
        let value = match req.field("CookingValue") {
            Some(Value::Float(v)) => *v,
            Some(Value::Int(v)) => *v as f64,
            _ => return Err(Fault::client("CookingValue is not a number")),
        };
        let factor = |field: &str| -> Result<(String, f64), Fault> {
            let unit = text_field(req, field)?;
            let f = COOKING_UNITS
                .iter()
                .find(|(u, _)| *u == unit)
                .map(|(_, f)| *f)
                .ok_or_else(|| Fault::client(format!("unknown unit {unit}")))?;
            Ok((unit, f))
        };
        let (from, from_ml) = factor("fromCookingUnit")?;
        let (to, to_ml) = factor("toCookingUnit")?;
        let result = if from == to { value } else { value * from_ml / to_ml };
        if !result.is_finite() {
            return Err(Fault::server("conversion overflow"));
        }
        Ok(Value::tuple([("ChangeCookingUnitResult", Value::Float(result))]))
    })
    .expect("bundled WSDL parses")
}

/// Accepts product orders and acknowledges them with an item count and the
/// order total. Rejects orders that break the schema's value constraints.
pub fn place_order() -> MockService {
    MockService::new("placeorder", PLACE_ORDER_WSDL, |_, req| {
        let Some(Value::List(products)) = req.field("products") else {
            return Err(Fault::client("missing products"));
        };
        if products.is_empty() {
            return Err(Fault::client("an order needs at least one product"));
        }
        let mut total: i128 = 0;
        for p in products {
            let Some(Value::Int(price)) = p.field("price") else {
                return Err(Fault::client("price is not an integer"));
            };
            if *price < 1 {
                return Err(Fault::client(format!("price {price} is not positive")));
            }
            total = total.saturating_add(*price);
            let pay = p
                .field("shipInfo")
                .ok_or_else(|| Fault::client("missing shipInfo"))
                .and_then(|s| text_field(s, "paymentInfo"))?;
            if !["visa", "paypal", "deposit"].contains(&pay.as_str()) {
                return Err(Fault::client(format!("unknown payment type {pay}")));
            }
        }
        Ok(Value::tuple([
            ("itemCount", Value::Int(products.len() as i128)),
            ("total", Value::Int(total)),
        ]))
    })
    .expect("bundled WSDL parses")
}

/// Removes the first occurrence of the first character of `c` from `in`.
/// An empty `c` crashes the service, which answers with a Server fault.
pub fn buggy_delete() -> MockService {
    MockService::new("delete", DELETE_WSDL, |_, req| {
        let input = text_field(req, "in")?;
        let c = text_field(req, "c")?;
        let Some(first) = c.chars().next() else {
            return Err(Fault::server(
                "java.lang.StringIndexOutOfBoundsException: String index out of range: 0",
            ));
        };
        let out = match input.find(first) {
            Some(at) => format!("{}{}", &input[..at], &input[at + first.len_utf8()..]),
            None => input,
        };
        Ok(Value::tuple([("deleteReturn", Value::chars(&out))]))
    })
    .expect("bundled WSDL parses")
}

pub fn by_name(name: &str) -> Option<MockService> {
    match name.to_ascii_lowercase().as_str() {
        "convertcooking" => Some(convert_cooking()),
        "placeorder" => Some(place_order()),
        "delete" => Some(buggy_delete()),
        _ => None,
    }
}

/// Dispatches to mocks in-process. Mock `name` lives at
/// `http://mock.local/name`; its WSDL is at that URL with a `?WSDL` query.
#[derive(Debug, Default)]
pub struct FakeEndpoint {
    services: Vec<Arc<MockService>>,
    posts: usize,
}

impl FakeEndpoint {
    pub fn new(services: impl IntoIterator<Item = MockService>) -> Self {
        FakeEndpoint {
            services: services.into_iter().map(Arc::new).collect(),
            posts: 0,
        }
    }

    pub fn url_of(name: &str) -> String {
        format!("{FAKE_HOST}/{name}")
    }

    pub fn wsdl_url_of(name: &str) -> String {
        format!("{FAKE_HOST}/{name}?WSDL")
    }

    /// SOAP posts received so far.
    pub fn posts(&self) -> usize {
        self.posts
    }

    fn service(&self, url: &str) -> Option<&MockService> {
        let path = url.strip_prefix(FAKE_HOST)?.strip_prefix('/')?;
        self.services.iter().map(|s| &**s).find(|s| s.name == path)
    }
}

impl Endpoint for FakeEndpoint {
    fn fetch(&mut self, url: &str) -> Result<Vec<u8>, TransportError> {
        let (base, query) = url.split_once('?').unwrap_or((url, ""));
        match self.service(base) {
            Some(s) if query.eq_ignore_ascii_case("wsdl") => Ok(s.wsdl(base).into_bytes()),
            Some(_) => Err(TransportError::HttpError(404)),
            None => Err(TransportError::ConnectionFailed(format!("no mock at {url}"))),
        }
    }

    fn post_soap(&mut self, url: &str, _soap_action: &str, envelope: &str) -> Result<HttpReply, TransportError> {
        let service = self
            .service(url)
            .ok_or_else(|| TransportError::ConnectionFailed(format!("no mock at {url}")))?;
        let reply = service.respond(envelope);
        self.posts += 1;
        Ok(reply)
    }
}

/// A mock served over HTTP on a background thread until dropped.
pub struct MockServer {
    server: Arc<tiny_http::Server>,
    thread: Option<JoinHandle<()>>,
    url: String,
}

impl MockServer {
    /// Listens on `127.0.0.1:port`; port 0 picks a free one.
    pub fn start(mock: MockService, port: u16) -> std::io::Result<MockServer> {
        let server = tiny_http::Server::http(("127.0.0.1", port)).map_err(std::io::Error::other)?;
        let addr = server
            .server_addr()
            .to_ip()
            .ok_or_else(|| std::io::Error::other("not an IP listener"))?;
        let url = format!("http://{addr}/{}", mock.name);
        let server = Arc::new(server);
        let thread = {
            let server = Arc::clone(&server);
            let url = url.clone();
            std::thread::spawn(move || {
                for request in server.incoming_requests() {
                    serve_one(&mock, &url, request);
                }
            })
        };
        Ok(MockServer {
            server,
            thread: Some(thread),
            url,
        })
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    pub fn wsdl_url(&self) -> String {
        format!("{}?WSDL", self.url)
    }

    /// Blocks until the server thread exits.
    pub fn join(mut self) {
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

fn serve_one(mock: &MockService, url: &str, mut request: tiny_http::Request) {
    let xml = tiny_http::Header::from_bytes(&b"Content-Type"[..], &b"text/xml; charset=utf-8"[..]).unwrap();
    let reply = match request.method() {
        tiny_http::Method::Get if request.url().to_ascii_lowercase().ends_with("?wsdl") => HttpReply {
            status: 200,
            body: mock.wsdl(url),
        },
        tiny_http::Method::Post => {
            let mut body = String::new();
            match std::io::Read::read_to_string(request.as_reader(), &mut body) {
                Ok(_) => mock.respond(&body),
                Err(_) => HttpReply {
                    status: 400,
                    body: String::new(),
                },
            }
        }
        _ => HttpReply {
            status: 404,
            body: String::new(),
        },
    };
    let response = tiny_http::Response::from_string(reply.body)
        .with_status_code(reply.status)
        .with_header(xml);
    let _ = request.respond(response);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soap::encode_request;

    fn call(mock: &MockService, op: &str, v: &Value) -> HttpReply {
        let bound = mock.operations.iter().find(|o| o.def.name == op).unwrap();
        mock.respond(&encode_request(&bound.input, v).unwrap())
    }

    #[test]
    fn delete_removes_first_occurrence_and_crashes_on_empty_c() {
        let mock = buggy_delete();
        let req = |i: &str, c: &str| Value::tuple([("in", Value::chars(i)), ("c", Value::chars(c))]);
        let reply = call(&mock, "delete", &req("banana", "a"));
        assert_eq!(reply.status, 200);
        assert!(
            reply.body.contains("<deleteReturn>bnana</deleteReturn>"),
            "{}",
            reply.body
        );
        let reply = call(&mock, "delete", &req(".", ""));
        assert_eq!(reply.status, 500);
        assert!(matches!(decode_response(&reply.body), SoapResponseKind::Fault { .. }));
    }

    #[test]
    fn cooking_identity_and_conversion() {
        let mock = convert_cooking();
        let req = |v: f64, from: &str, to: &str| {
            Value::tuple([
                ("CookingValue", Value::Float(v)),
                ("fromCookingUnit", Value::Text(from.into())),
                ("toCookingUnit", Value::Text(to.into())),
            ])
        };
        let reply = call(&mock, "ChangeCookingUnit", &req(2.5, "cup", "cup"));
        assert!(reply.body.contains(">2.5<"), "{}", reply.body);
        let reply = call(&mock, "ChangeCookingUnit", &req(1.0, "pint", "cup"));
        assert!(reply.body.contains(">2.0<"), "{}", reply.body);
    }

    #[test]
    fn only_the_soap11_port_is_used() {
        let mock = convert_cooking();
        assert_eq!(mock.model().service_name, "ConvertCooking");
        assert_eq!(mock.model().operations.len(), 1);
        assert_eq!(mock.model().endpoint_url, "http://mock.local/convertcooking");
    }

    #[test]
    fn garbage_requests_get_client_faults() {
        let mock = place_order();
        for body in ["", "<x/>", &fault_envelope("a", "b")] {
            let reply = mock.respond(body);
            assert_eq!(reply.status, 500);
            let SoapResponseKind::Fault { code, .. } = decode_response(&reply.body) else {
                panic!()
            };
            assert_eq!(code, "soap:Client");
        }
    }

    #[test]
    fn fake_endpoint_routes_by_name() {
        let mut ep = FakeEndpoint::new([buggy_delete()]);
        let wsdl = ep.fetch(&FakeEndpoint::wsdl_url_of("delete")).unwrap();
        assert!(String::from_utf8(wsdl).unwrap().contains("http://mock.local/delete"));
        assert!(ep.fetch(&FakeEndpoint::wsdl_url_of("nope")).is_err());
        assert_eq!(ep.posts(), 0);
    }
}
