use super::probe::{ProbeAnswer, ProbeQuestion};
use super::session::SessionError;
use crate::agents::{Plan, PlanRequest};
use crate::simulator::{ActionInvocation, Episode, PropertyChange};
use crate::worldmodel::WorldModel;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

pub const PROTOCOL_VERSION: &str = "1";
pub const MAX_LINE_BYTES: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hello {
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictRequest {
    pub state: WorldModel,
    pub invocation: ActionInvocation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictResponse {
    pub changes: Vec<PropertyChange>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReply {
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Hello(Hello),
    Observe(Episode),
    PlanRequest(PlanRequest),
    PlanResponse(Plan),
    PredictRequest(PredictRequest),
    PredictResponse(PredictResponse),
    Probe(ProbeQuestion),
    ProbeResponse(ProbeAnswer),
    Shutdown,
    Error(ErrorReply),
}

impl Body {
    pub fn kind(&self) -> &'static str {
        match self {
            Body::Hello(_) => "hello",
            Body::Observe(_) => "observe",
            Body::PlanRequest(_) => "plan_request",
            Body::PlanResponse(_) => "plan_response",
            Body::PredictRequest(_) => "predict_request",
            Body::PredictResponse(_) => "predict_response",
            Body::Probe(_) => "probe",
            Body::ProbeResponse(_) => "probe_response",
            Body::Shutdown => "shutdown",
            Body::Error(_) => "error",
        }
    }

    fn payload(&self) -> Json {
        let v = match self {
            Body::Hello(p) => serde_json::to_value(p),
            Body::Observe(p) => serde_json::to_value(p),
            Body::PlanRequest(p) => serde_json::to_value(p),
            Body::PlanResponse(p) => serde_json::to_value(p),
            Body::PredictRequest(p) => serde_json::to_value(p),
            Body::PredictResponse(p) => serde_json::to_value(p),
            Body::Probe(p) => serde_json::to_value(p),
            Body::ProbeResponse(p) => serde_json::to_value(p),
            Body::Shutdown => Ok(Json::Object(Default::default())),
            Body::Error(p) => serde_json::to_value(p),
        };
        v.expect("message payloads serialize")
    }

    fn from_parts(kind: &str, payload: Json) -> Result<Self, String> {
        fn p<T: DeserializeOwned>(v: Json) -> Result<T, String> {
            serde_json::from_value(v).map_err(|e| e.to_string())
        }
        Ok(match kind {
            "hello" => Body::Hello(p(payload)?),
            "observe" => Body::Observe(p(payload)?),
            "plan_request" => Body::PlanRequest(p(payload)?),
            "plan_response" => Body::PlanResponse(p(payload)?),
            "predict_request" => Body::PredictRequest(p(payload)?),
            "predict_response" => Body::PredictResponse(p(payload)?),
            "probe" => Body::Probe(p(payload)?),
            "probe_response" => Body::ProbeResponse(p(payload)?),
            "shutdown" => Body::Shutdown,
            "error" => Body::Error(p(payload)?),
            other => return Err(format!("unknown message type `{other}`")),
        })
    }
}

/// One protocol line: `{"type": ..., "session": ..., "payload": ...}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub session: String,
    pub body: Body,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    #[serde(rename = "type")]
    kind: String,
    session: String,
    #[serde(default)]
    payload: Json,
}

impl Message {
    pub fn new(session: impl Into<String>, body: Body) -> Self {
        Self { session: session.into(), body }
    }

    /// Single-line JSON, without the trailing newline.
    pub fn encode(&self) -> String {
        let env = Envelope { kind: self.body.kind().to_string(), session: self.session.clone(), payload: self.body.payload() };
        serde_json::to_string(&env).expect("envelope serializes")
    }

    pub fn decode(line: &str) -> Result<Self, SessionError> {
        if line.len() > MAX_LINE_BYTES {
            return Err(SessionError::Protocol(format!("line exceeds {MAX_LINE_BYTES} bytes")));
        }
        let env: Envelope = serde_json::from_str(line).map_err(|e| SessionError::Protocol(e.to_string()))?;
        let payload = if env.payload.is_null() { Json::Object(Default::default()) } else { env.payload };
        let body = Body::from_parts(&env.kind, payload).map_err(SessionError::Protocol)?;
        Ok(Self { session: env.session, body })
    }
}
