use super::message::{Body, Hello, Message, PredictRequest, PROTOCOL_VERSION};
use super::probe::{ProbeAnswer, ProbeQuestion};
use super::server::{read_bounded_line, SessionServer};
use super::session::{AgentSession, SessionError};
use crate::agents::{Agent, Plan, PlanRequest};
use crate::simulator::{ActionInvocation, Episode, PropertyChange};
use crate::worldmodel::WorldModel;
use std::collections::VecDeque;
use std::io::{BufReader, Write};
use std::net::TcpStream;
use std::process::{Child, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::Duration;

pub const DEFAULT_PROBE_TIMEOUT: Duration = Duration::from_secs(5);

/// Line-oriented, ordered, reliable message channel.
pub trait Transport: Send {
    fn send(&mut self, line: &str) -> Result<(), SessionError>;
    fn recv(&mut self, timeout: Option<Duration>) -> Result<String, SessionError>;
    fn close(&mut self) {}
}

/// A server in the same process, driven synchronously through the full
/// encode/decode path.
pub struct LoopbackTransport {
    server: SessionServer,
    pending: VecDeque<String>,
}

impl LoopbackTransport {
    pub fn new(agent: Box<dyn Agent>) -> Self {
        Self { server: SessionServer::new(agent), pending: VecDeque::new() }
    }
}

impl Transport for LoopbackTransport {
    fn send(&mut self, line: &str) -> Result<(), SessionError> {
        if self.server.is_closed() {
            return Err(SessionError::Closed);
        }
        if let Some(reply) = self.server.handle(line).line {
            self.pending.push_back(reply);
        }
        Ok(())
    }

    fn recv(&mut self, _timeout: Option<Duration>) -> Result<String, SessionError> {
        self.pending.pop_front().ok_or(SessionError::Closed)
    }
}

/// A byte-stream peer: a child process over stdio, or a TCP connection. A
/// reader thread feeds complete lines into a channel so reads can time out.
pub struct StreamTransport {
    writer: Box<dyn Write + Send>,
    lines: Receiver<Result<String, SessionError>>,
    child: Option<Child>,
}

impl StreamTransport {
    pub fn spawn(command: &[String]) -> Result<Self, SessionError> {
        let (program, args) = command.split_first().ok_or_else(|| SessionError::Transport("empty command".into()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| SessionError::Transport(format!("spawning `{program}`: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let mut t = Self::from_parts(Box::new(stdin), stdout);
        t.child = Some(child);
        Ok(t)
    }

    pub fn connect(address: &str) -> Result<Self, SessionError> {
        let stream = TcpStream::connect(address).map_err(|e| SessionError::Transport(format!("{address}: {e}")))?;
        let read = stream.try_clone().map_err(|e| SessionError::Transport(e.to_string()))?;
        Ok(Self::from_parts(Box::new(stream), read))
    }

    pub fn from_parts(writer: Box<dyn Write + Send>, reader: impl std::io::Read + Send + 'static) -> Self {
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            let mut reader = BufReader::new(reader);
            loop {
                let item = match read_bounded_line(&mut reader) {
                    Ok(Some(line)) => Ok(line),
                    Ok(None) => Err(SessionError::Closed),
                    Err(e) => Err(e),
                };
                let stop = item.is_err();
                if tx.send(item).is_err() || stop {
                    return;
                }
            }
        });
        Self { writer, lines: rx, child: None }
    }
}

impl Transport for StreamTransport {
    fn send(&mut self, line: &str) -> Result<(), SessionError> {
        let io = |e: std::io::Error| SessionError::Transport(e.to_string());
        self.writer.write_all(line.as_bytes()).map_err(io)?;
        self.writer.write_all(b"\n").map_err(io)?;
        self.writer.flush().map_err(io)
    }

    fn recv(&mut self, timeout: Option<Duration>) -> Result<String, SessionError> {
        match timeout {
            Some(t) => match self.lines.recv_timeout(t) {
                Ok(item) => item,
                Err(RecvTimeoutError::Timeout) => Err(SessionError::Timeout),
                Err(RecvTimeoutError::Disconnected) => Err(SessionError::Closed),
            },
            None => self.lines.recv().unwrap_or(Err(SessionError::Closed)),
        }
    }

    fn close(&mut self) {
        if let Some(mut child) = self.child.take() {
            for _ in 0..50 {
                if let Ok(Some(_)) = child.try_wait() {
                    return;
                }
                std::thread::sleep(Duration::from_millis(10));
            }
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

impl Drop for StreamTransport {
    fn drop(&mut self) {
        self.close();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Sent,
    Received,
}

/// Harness side of the protocol. Any failure other than a probe timeout
/// marks the session failed; later calls return the same error.
pub struct ProtocolClient<T: Transport> {
    transport: T,
    session: String,
    kind: String,
    probe_timeout: Option<Duration>,
    /// Responses still owed for probes that timed out; discarded on arrival.
    stale: usize,
    failed: Option<SessionError>,
    transcript: Option<Vec<(Direction, String)>>,
}

impl<T: Transport> ProtocolClient<T> {
    pub fn connect(transport: T, session: impl Into<String>, probe_timeout: Option<Duration>) -> Result<Self, SessionError> {
        Self::connect_with_version(transport, session, probe_timeout, PROTOCOL_VERSION)
    }

    pub fn connect_with_version(
        transport: T,
        session: impl Into<String>,
        probe_timeout: Option<Duration>,
        version: &str,
    ) -> Result<Self, SessionError> {
        let mut client = Self {
            transport,
            session: session.into(),
            kind: String::new(),
            probe_timeout,
            stale: 0,
            failed: None,
            transcript: None,
        };
        let hello = Body::Hello(Hello { version: version.to_string(), agent: None });
        match client.request(hello, "hello", None)? {
            Body::Hello(h) if h.version == PROTOCOL_VERSION => {
                client.kind = h.agent.unwrap_or_else(|| "remote".to_string());
                Ok(client)
            }
            Body::Hello(h) => Err(SessionError::Refused(format!("agent speaks version {}", h.version))),
            _ => unreachable!("request checks the response type"),
        }
    }

    /// Starts recording every line sent and received.
    pub fn record(&mut self) {
        self.transcript.get_or_insert_with(Vec::new);
    }

    pub fn transcript(&self) -> &[(Direction, String)] {
        self.transcript.as_deref().unwrap_or(&[])
    }

    fn log(&mut self, dir: Direction, line: &str) {
        if let Some(t) = &mut self.transcript {
            t.push((dir, line.to_string()));
        }
    }

    fn fail(&mut self, e: SessionError) -> SessionError {
        self.failed = Some(e.clone());
        self.transport.close();
        e
    }

    fn send(&mut self, body: Body) -> Result<(), SessionError> {
        if let Some(e) = &self.failed {
            return Err(e.clone());
        }
        let line = Message::new(self.session.clone(), body).encode();
        self.log(Direction::Sent, &line);
        self.transport.send(&line).map_err(|e| self.fail(e))
    }

    fn receive(&mut self, expected: &str, timeout: Option<Duration>) -> Result<Body, SessionError> {
        loop {
            let line = self.transport.recv(timeout)?;
            self.log(Direction::Received, &line);
            let msg = Message::decode(&line)?;
            if msg.session != self.session {
                return Err(SessionError::Protocol(format!("response for session `{}`", msg.session)));
            }
            if let Body::Error(e) = &msg.body {
                return Err(if e.reason == "unsupported version" {
                    SessionError::Refused(e.reason.clone())
                } else {
                    SessionError::Protocol(e.reason.clone())
                });
            }
            if self.stale > 0 && msg.body.kind() == "probe_response" {
                self.stale -= 1;
                continue;
            }
            if msg.body.kind() != expected {
                return Err(SessionError::Protocol(format!("expected {expected}, got {}", msg.body.kind())));
            }
            return Ok(msg.body);
        }
    }

    fn request(&mut self, body: Body, expected: &str, timeout: Option<Duration>) -> Result<Body, SessionError> {
        self.send(body)?;
        self.receive(expected, timeout).map_err(|e| self.fail(e))
    }
}

impl<T: Transport> AgentSession for ProtocolClient<T> {
    fn kind(&self) -> String {
        self.kind.clone()
    }

    fn observe(&mut self, episode: &Episode) -> Result<(), SessionError> {
        self.send(Body::Observe(episode.clone()))
    }

    fn plan(&mut self, request: &PlanRequest) -> Result<Plan, SessionError> {
        match self.request(Body::PlanRequest(request.clone()), "plan_response", None)? {
            Body::PlanResponse(p) => Ok(p),
            _ => unreachable!(),
        }
    }

    fn predict(&mut self, state: &WorldModel, invocation: &ActionInvocation) -> Result<Vec<PropertyChange>, SessionError> {
        let body = Body::PredictRequest(PredictRequest { state: state.clone(), invocation: invocation.clone() });
        match self.request(body, "predict_response", None)? {
            Body::PredictResponse(p) => Ok(p.changes),
            _ => unreachable!(),
        }
    }

    /// A probe that times out is answered as unknown; its late response is
    /// skipped when it eventually arrives.
    fn probe(&mut self, question: &ProbeQuestion) -> Result<ProbeAnswer, SessionError> {
        self.send(Body::Probe(question.clone()))?;
        match self.receive("probe_response", self.probe_timeout) {
            Ok(Body::ProbeResponse(a)) if a.answers(question) => Ok(a),
            Ok(_) => Err(self.fail(SessionError::Protocol("probe answer does not match the question".into()))),
            Err(SessionError::Timeout) => {
                self.stale += 1;
                Ok(ProbeAnswer::Unknown)
            }
            Err(e) => Err(self.fail(e)),
        }
    }

    fn shutdown(&mut self) -> Result<(), SessionError> {
        let r = self.send(Body::Shutdown);
        self.transport.close();
        self.failed = Some(SessionError::Closed);
        r
    }
}
