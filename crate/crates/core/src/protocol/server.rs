use super::message::{Body, ErrorReply, Hello, Message, PredictResponse, MAX_LINE_BYTES, PROTOCOL_VERSION};
use super::session::SessionError;
use crate::agents::Agent;
use std::io::{BufRead, Read, Write};

#[derive(Debug, Clone, PartialEq, Eq)]
enum State {
    AwaitingHello,
    Open(String),
    Closed,
}

/// Agent side of the protocol: turns request lines into response lines.
pub struct SessionServer {
    agent: Box<dyn Agent>,
    state: State,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub line: Option<String>,
    /// The session is over; the transport should be closed.
    pub close: bool,
}

impl SessionServer {
    pub fn new(agent: Box<dyn Agent>) -> Self {
        Self { agent, state: State::AwaitingHello }
    }

    pub fn is_closed(&self) -> bool {
        self.state == State::Closed
    }

    fn fail(&mut self, session: &str, reason: impl Into<String>) -> Reply {
        self.state = State::Closed;
        let msg = Message::new(session, Body::Error(ErrorReply { reason: reason.into() }));
        Reply { line: Some(msg.encode()), close: true }
    }

    pub fn handle(&mut self, line: &str) -> Reply {
        let msg = match Message::decode(line) {
            Ok(m) => m,
            Err(e) => return self.fail("", e.to_string()),
        };
        let session = msg.session.clone();
        let respond = |body: Body| Reply { line: Some(Message::new(session.clone(), body).encode()), close: false };
        match (&self.state, msg.body) {
            (State::Closed, _) => self.fail(&msg.session, "session closed"),
            (State::AwaitingHello, Body::Hello(h)) => {
                if h.version != PROTOCOL_VERSION {
                    return self.fail(&msg.session, "unsupported version");
                }
                self.state = State::Open(msg.session.clone());
                let kind = self.agent.kind().to_string();
                respond(Body::Hello(Hello { version: PROTOCOL_VERSION.to_string(), agent: Some(kind) }))
            }
            (State::AwaitingHello, other) => self.fail(&msg.session, format!("expected hello, got {}", other.kind())),
            (State::Open(id), _) if *id != msg.session => self.fail(&msg.session, "session id mismatch"),
            (State::Open(_), body) => match body {
                Body::Observe(ep) => {
                    self.agent.observe(&ep);
                    Reply { line: None, close: false }
                }
                Body::PlanRequest(req) => respond(Body::PlanResponse(self.agent.plan_for(&req))),
                Body::PredictRequest(req) => respond(Body::PredictResponse(PredictResponse {
                    changes: self.agent.predict(&req.state, &req.invocation),
                })),
                Body::Probe(q) => respond(Body::ProbeResponse(self.agent.answer(&q))),
                Body::Shutdown => {
                    self.state = State::Closed;
                    Reply { line: None, close: true }
                }
                other => self.fail(&msg.session, format!("unexpected {} message", other.kind())),
            },
        }
    }
}

/// Reads one line of at most `MAX_LINE_BYTES`, without the newline.
/// `Ok(None)` at end of stream.
pub fn read_bounded_line(reader: &mut impl BufRead) -> Result<Option<String>, SessionError> {
    let mut buf = Vec::new();
    let n = Read::take(&mut *reader, MAX_LINE_BYTES as u64 + 1)
        .read_until(b'\n', &mut buf)
        .map_err(|e| SessionError::Transport(e.to_string()))?;
    if n == 0 {
        return Ok(None);
    }
    if buf.last() == Some(&b'\n') {
        buf.pop();
        if buf.last() == Some(&b'\r') {
            buf.pop();
        }
    } else if buf.len() > MAX_LINE_BYTES {
        return Err(SessionError::Protocol(format!("line exceeds {MAX_LINE_BYTES} bytes")));
    }
    String::from_utf8(buf).map(Some).map_err(|_| SessionError::Protocol("line is not UTF-8".to_string()))
}

/// Serves one session over a byte stream until shutdown or end of input.
pub fn serve_session(agent: Box<dyn Agent>, mut reader: impl BufRead, mut writer: impl Write) -> Result<(), SessionError> {
    let mut server = SessionServer::new(agent);
    let io = |e: std::io::Error| SessionError::Transport(e.to_string());
    loop {
        let reply = match read_bounded_line(&mut reader) {
            Ok(None) => return Ok(()),
            Ok(Some(line)) if line.trim().is_empty() => continue,
            Ok(Some(line)) => server.handle(&line),
            Err(e) => server.fail("", e.to_string()),
        };
        if let Some(line) = reply.line {
            writer.write_all(line.as_bytes()).map_err(io)?;
            writer.write_all(b"\n").map_err(io)?;
            writer.flush().map_err(io)?;
        }
        if reply.close {
            return Ok(());
        }
    }
}
