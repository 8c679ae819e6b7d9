//! An agent that asks an external policy server for each swap.
//!
//! The agent sends `act` requests carrying the current observation and
//! expects an `action` reply naming `(u1, u2)`. Every proposal is applied.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::Duration;

use super::{Action, SwapAgent, SwapContext, SwapError};
use crate::rlenv::observe;
use crate::rlenv::protocol::{act_request, parse_action};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

/// Accepts `tcp://host:port` or `host:port`.
pub fn parse_endpoint(endpoint: &str) -> Result<String, SwapError> {
    let addr = endpoint.strip_prefix("tcp://").unwrap_or(endpoint);
    match addr.rsplit_once(':') {
        Some((host, port)) if !host.is_empty() && port.parse::<u16>().is_ok() => {
            Ok(addr.to_string())
        }
        _ => Err(SwapError::Protocol(format!(
            "endpoint {endpoint:?} is not of the form tcp://host:port"
        ))),
    }
}

pub struct PolicyAgent<R, W> {
    reader: R,
    writer: W,
    line: String,
}

impl PolicyAgent<BufReader<TcpStream>, TcpStream> {
    pub fn connect(endpoint: &str, timeout: Duration) -> Result<Self, SwapError> {
        let addr = parse_endpoint(endpoint)?;
        let connect_err = |source| SwapError::Connect {
            endpoint: endpoint.to_string(),
            source,
        };
        let sock = addr
            .to_socket_addrs()
            .map_err(connect_err)?
            .next()
            .ok_or_else(|| connect_err(io::Error::new(io::ErrorKind::NotFound, "no address")))?;
        let stream = TcpStream::connect_timeout(&sock, timeout).map_err(connect_err)?;
        stream.set_read_timeout(Some(timeout))?;
        stream.set_write_timeout(Some(timeout))?;
        stream.set_nodelay(true)?;
        Ok(Self::new(BufReader::new(stream.try_clone()?), stream))
    }
}

impl<R: BufRead, W: Write> PolicyAgent<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        Self {
            reader,
            writer,
            line: String::new(),
        }
    }

    fn request(&mut self, ctx: &SwapContext<'_>) -> Result<(usize, usize), SwapError> {
        let obs = observe(
            ctx.instance,
            ctx.solution,
            ctx.step,
            ctx.budget,
            ctx.current_q(),
        );
        let msg = act_request(&obs);
        writeln!(self.writer, "{msg}")?;
        self.writer.flush()?;
        self.line.clear();
        match self.reader.read_line(&mut self.line) {
            Ok(0) => Err(SwapError::Protocol(
                "policy server closed the connection".into(),
            )),
            Ok(_) => parse_action(self.line.trim_end()).map_err(SwapError::Protocol),
            Err(e)
                if matches!(
                    e.kind(),
                    io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut
                ) =>
            {
                Err(SwapError::Protocol(
                    "timed out waiting for the policy server".into(),
                ))
            }
            Err(e) => Err(e.into()),
        }
    }
}

impl<R: BufRead, W: Write> SwapAgent for PolicyAgent<R, W> {
    fn name(&self) -> &str {
        "policy"
    }

    fn act(&mut self, ctx: &SwapContext<'_>) -> Result<Action, SwapError> {
        let (u1, u2) = self.request(ctx)?;
        let n = ctx.instance.n();
        let reason = if u1 >= n || u2 >= n {
            Some(format!("node out of range (n = {n})"))
        } else if !ctx.solution.is_facility(u1) {
            Some(format!("u1 = {u1} is not a facility"))
        } else if ctx.solution.is_facility(u2) {
            Some(format!("u2 = {u2} is already a facility"))
        } else {
            None
        };
        match reason {
            Some(r) => Err(SwapError::Protocol(format!(
                "invalid action in reply {:?}: {r}",
                self.line.trim_end()
            ))),
            None => Ok(Action::Swap {
                remove: u1,
                insert: u2,
            }),
        }
    }

    fn update_criterion(&self, _delta: f64, _ctx: &SwapContext<'_>) -> bool {
        true
    }
}
