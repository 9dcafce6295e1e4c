//! Newline-delimited JSON protocol between the harness and black-box agents,
//! and world-model elicitation over it.

mod client;
mod elicit;
mod message;
mod probe;
mod server;
mod session;

pub use client::{Direction, LoopbackTransport, ProtocolClient, StreamTransport, Transport, DEFAULT_PROBE_TIMEOUT};
pub use elicit::{elicit_world_model, Elicitation, ProbePlan};
pub use message::{
    Body, ErrorReply, Hello, Message, PredictRequest, PredictResponse, MAX_LINE_BYTES, PROTOCOL_VERSION,
};
pub use probe::{answer_from_model, ObjectRef, ProbeAnswer, ProbeQuestion};
pub use server::{read_bounded_line, serve_session, Reply, SessionServer};
pub use session::{AgentSession, InProcessSession, SessionError};

use crate::agents::Agent;

/// An in-process agent behind the full message path.
pub fn loopback_session(agent: Box<dyn Agent>, session: &str) -> Result<ProtocolClient<LoopbackTransport>, SessionError> {
    ProtocolClient::connect(LoopbackTransport::new(agent), session, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{Plan, PlanRequest, RandomAgent};
    use crate::simulator::{ActionInvocation, Episode, PropertyChange};
    use crate::worldmodel::WorldModel;

    #[test]
    fn version_mismatch_is_refused() {
        let t = LoopbackTransport::new(Box::new(RandomAgent::new(0, 1)));
        let err = ProtocolClient::connect_with_version(t, "s", None, "2").err().unwrap();
        assert_eq!(err, SessionError::Refused("unsupported version".into()));
    }

    #[test]
    fn shutdown_closes_the_session() {
        let mut server = SessionServer::new(Box::new(RandomAgent::new(0, 1)));
        let hello = Message::new("s", Body::Hello(Hello { version: "1".into(), agent: None })).encode();
        assert!(server.handle(&hello).line.is_some());
        let bye = server.handle(&Message::new("s", Body::Shutdown).encode());
        assert_eq!(bye, Reply { line: None, close: true });
        let after = server.handle(&Message::new("s", Body::Probe(ProbeQuestion::ListModels)).encode());
        assert!(after.line.unwrap().contains("session closed"));

        let mut client = loopback_session(Box::new(RandomAgent::new(0, 1)), "s").unwrap();
        client.shutdown().unwrap();
        assert!(client.probe(&ProbeQuestion::ListModels).is_err());
    }

    #[test]
    fn messages_before_hello_are_violations() {
        let mut server = SessionServer::new(Box::new(RandomAgent::new(0, 1)));
        let r = server.handle(&Message::new("s", Body::Shutdown).encode());
        assert!(r.close);
        assert!(r.line.unwrap().contains("expected hello"));
    }

    struct Liar;

    impl Agent for Liar {
        fn kind(&self) -> &str {
            "liar"
        }
        fn observe(&mut self, _: &Episode) {}
        fn plan_for(&mut self, _: &PlanRequest) -> Plan {
            Plan::new(vec![], 1)
        }
        fn predict(&mut self, _: &WorldModel, _: &ActionInvocation) -> Vec<PropertyChange> {
            vec![]
        }
        fn describe(&self) -> WorldModel {
            WorldModel::new()
        }
        fn answer(&mut self, _: &ProbeQuestion) -> ProbeAnswer {
            ProbeAnswer::Effect { changes: vec![] }
        }
    }

    #[test]
    fn mismatched_probe_answer_fails_the_session() {
        let mut client = loopback_session(Box::new(Liar), "s").unwrap();
        assert!(matches!(client.probe(&ProbeQuestion::ListModels), Err(SessionError::Protocol(_))));
        assert!(client.plan(&PlanRequest { state: WorldModel::new(), goal: WorldModel::new(), options: vec![] }).is_err());
    }

    #[test]
    fn serve_session_over_byte_streams() {
        let input = [
            Message::new("s", Body::Hello(Hello { version: "1".into(), agent: None })).encode(),
            Message::new("s", Body::Probe(ProbeQuestion::ListObjects)).encode(),
            Message::new("s", Body::Shutdown).encode(),
        ]
        .join("\n");
        let mut out = Vec::new();
        serve_session(Box::new(RandomAgent::new(0, 1)), input.as_bytes(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], r#"{"type":"hello","session":"s","payload":{"agent":"random","version":"1"}}"#);
        assert_eq!(lines[1], r#"{"type":"probe_response","session":"s","payload":{"kind":"objects","objects":[]}}"#);
    }

    #[test]
    fn overlong_lines_are_rejected() {
        let long = "x".repeat(MAX_LINE_BYTES + 10);
        let mut out = Vec::new();
        serve_session(Box::new(RandomAgent::new(0, 1)), long.as_bytes(), &mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().contains("exceeds"));
    }
}
