use super::probe::{ProbeAnswer, ProbeQuestion};
use crate::agents::{Agent, Plan, PlanRequest};
use crate::simulator::{ActionInvocation, Episode, PropertyChange};
use crate::worldmodel::WorldModel;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionError {
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("session refused: {0}")]
    Refused(String),
    #[error("session closed")]
    Closed,
    #[error("timed out waiting for the agent")]
    Timeout,
    #[error("transport error: {0}")]
    Transport(String),
}

/// The harness's view of an agent: every call may fail, because the agent
/// may live behind a wire.
pub trait AgentSession: Send {
    fn kind(&self) -> String;
    fn observe(&mut self, episode: &Episode) -> Result<(), SessionError>;
    fn plan(&mut self, request: &PlanRequest) -> Result<Plan, SessionError>;
    fn predict(&mut self, state: &WorldModel, invocation: &ActionInvocation) -> Result<Vec<PropertyChange>, SessionError>;
    fn probe(&mut self, question: &ProbeQuestion) -> Result<ProbeAnswer, SessionError>;
    fn shutdown(&mut self) -> Result<(), SessionError>;
}

/// Direct calls into an agent in the same process.
pub struct InProcessSession {
    agent: Box<dyn Agent>,
    closed: bool,
}

impl InProcessSession {
    pub fn new(agent: Box<dyn Agent>) -> Self {
        Self { agent, closed: false }
    }

    fn live(&mut self) -> Result<&mut dyn Agent, SessionError> {
        if self.closed {
            Err(SessionError::Closed)
        } else {
            Ok(self.agent.as_mut())
        }
    }
}

impl AgentSession for InProcessSession {
    fn kind(&self) -> String {
        self.agent.kind().to_string()
    }

    fn observe(&mut self, episode: &Episode) -> Result<(), SessionError> {
        self.live()?.observe(episode);
        Ok(())
    }

    fn plan(&mut self, request: &PlanRequest) -> Result<Plan, SessionError> {
        Ok(self.live()?.plan_for(request))
    }

    fn predict(&mut self, state: &WorldModel, invocation: &ActionInvocation) -> Result<Vec<PropertyChange>, SessionError> {
        Ok(self.live()?.predict(state, invocation))
    }

    fn probe(&mut self, question: &ProbeQuestion) -> Result<ProbeAnswer, SessionError> {
        Ok(self.live()?.answer(question))
    }

    fn shutdown(&mut self) -> Result<(), SessionError> {
        self.closed = true;
        Ok(())
    }
}
