//! Newline-delimited JSON service exposing a teacher to an external
//! student.
//!
//! Each line carries one JSON object tagged by `type`:
//!
//! ```text
//! -> {"type":"hello"}
//! <- {"type":"hello","dims":2,"lower":[0.0,0.0],"upper":[1.0,1.0],"protocol_version":1}
//! -> {"type":"param_request"}
//! <- {"type":"param","id":0,"values":[0.42,0.17]}
//! -> {"type":"result","id":0,"reward":42.0}
//! <- {"type":"ack","id":0}
//! ```
//!
//! At most one parameter is outstanding; every failure is answered with an
//! `error` message and leaves the teacher untouched.

use std::io::{self, BufRead, BufReader, Write};
use std::net::TcpListener;

use curriculum::{Teacher, TeacherSession};
use serde::{Deserialize, Serialize};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    Hello {},
    ParamRequest {},
    Result { id: u64, reward: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Hello {
        dims: usize,
        lower: Vec<f64>,
        upper: Vec<f64>,
        protocol_version: u32,
    },
    Param {
        id: u64,
        values: Vec<f64>,
    },
    Ack {
        id: u64,
    },
    Error {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<u64>,
        message: String,
    },
}

impl ServerMessage {
    fn error(id: Option<u64>, message: impl Into<String>) -> Self {
        ServerMessage::Error {
            id,
            message: message.into(),
        }
    }
}

pub struct Bridge {
    session: TeacherSession,
    next_id: u64,
    outstanding: Option<u64>,
}

impl Bridge {
    pub fn new(teacher: Box<dyn Teacher>) -> Self {
        Self {
            session: TeacherSession::new(teacher),
            next_id: 0,
            outstanding: None,
        }
    }

    pub fn session(&self) -> &TeacherSession {
        &self.session
    }

    pub fn outstanding(&self) -> Option<u64> {
        self.outstanding
    }

    pub fn handle(&mut self, msg: ClientMessage) -> ServerMessage {
        match msg {
            ClientMessage::Hello {} => {
                let space = self.session.space();
                ServerMessage::Hello {
                    dims: space.dims(),
                    lower: space.lower().to_vec(),
                    upper: space.upper().to_vec(),
                    protocol_version: PROTOCOL_VERSION,
                }
            }
            ClientMessage::ParamRequest {} => {
                if let Some(id) = self.outstanding {
                    return ServerMessage::error(
                        Some(id),
                        format!("parameter {id} is still awaiting its result"),
                    );
                }
                match self.session.propose() {
                    Ok(p) => {
                        let id = self.next_id;
                        self.next_id += 1;
                        self.outstanding = Some(id);
                        ServerMessage::Param {
                            id,
                            values: p.into_inner(),
                        }
                    }
                    Err(e) => ServerMessage::error(None, e.to_string()),
                }
            }
            ClientMessage::Result { id, reward } => {
                match self.outstanding {
                    Some(expected) if expected == id => {}
                    _ if id < self.next_id => {
                        return ServerMessage::error(
                            Some(id),
                            format!("parameter {id} already has a result"),
                        )
                    }
                    None if self.next_id == 0 => {
                        return ServerMessage::error(Some(id), "no parameter has been issued")
                    }
                    _ => {
                        return ServerMessage::error(Some(id), format!("unknown parameter id {id}"))
                    }
                }
                match self.session.observe(reward) {
                    Ok(_) => {
                        self.outstanding = None;
                        ServerMessage::Ack { id }
                    }
                    Err(e) => ServerMessage::error(Some(id), e.to_string()),
                }
            }
        }
    }

    pub fn handle_line(&mut self, line: &str) -> ServerMessage {
        match serde_json::from_str::<ClientMessage>(line) {
            Ok(msg) => self.handle(msg),
            Err(e) => ServerMessage::error(None, format!("malformed message: {e}")),
        }
    }

    /// Answers every non-blank input line until end of input. Input that is
    /// not UTF-8 is answered with an error like any other malformed line.
    pub fn serve<R: BufRead, W: Write>(&mut self, mut input: R, mut output: W) -> io::Result<()> {
        let mut buf = Vec::new();
        loop {
            buf.clear();
            if input.read_until(b'\n', &mut buf)? == 0 {
                return Ok(());
            }
            let line = String::from_utf8_lossy(&buf);
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let reply = self.handle_line(line);
            serde_json::to_writer(&mut output, &reply)?;
            output.write_all(b"\n")?;
            output.flush()?;
        }
    }

    /// Serves clients one at a time; the teacher state carries over between
    /// connections.
    pub fn serve_tcp(&mut self, listener: TcpListener) -> io::Result<()> {
        for stream in listener.incoming() {
            let stream = stream?;
            stream.set_nodelay(true)?;
            let reader = BufReader::new(stream.try_clone()?);
            if let Err(e) = self.serve(reader, stream) {
                eprintln!("connection closed: {e}");
            }
        }
        Ok(())
    }
}
