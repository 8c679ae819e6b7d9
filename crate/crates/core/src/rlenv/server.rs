//! Transports for the environment protocol: TCP and standard streams.

use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

use super::protocol::{code, error_body, Control, Session, MAX_LINE_BYTES};

/// Reads one `\n`-terminated line of at most `limit` bytes into `buf`.
/// Returns `None` at end of stream and `Some(false)` when the line was too
/// long (the rest of it is discarded).
fn read_bounded_line<R: BufRead>(
    reader: &mut R,
    buf: &mut Vec<u8>,
    limit: usize,
) -> io::Result<Option<bool>> {
    buf.clear();
    let n = reader
        .by_ref()
        .take(limit as u64 + 1)
        .read_until(b'\n', buf)?;
    if n == 0 {
        return Ok(None);
    }
    if buf.last() == Some(&b'\n') {
        buf.pop();
        if buf.last() == Some(&b'\r') {
            buf.pop();
        }
        return Ok(Some(true));
    }
    if buf.len() <= limit {
        // Final line without a newline.
        return Ok(Some(true));
    }
    // Oversized: skip to the end of the line.
    let mut sink = Vec::new();
    loop {
        sink.clear();
        let m = reader.by_ref().take(1 << 16).read_until(b'\n', &mut sink)?;
        if m == 0 || sink.last() == Some(&b'\n') {
            break;
        }
    }
    Ok(Some(false))
}

/// Runs one protocol session until the peer closes the stream or sends
/// `shutdown`. Returns how the session ended.
pub fn serve_session<R: BufRead, W: Write>(mut reader: R, mut writer: W) -> io::Result<Control> {
    let mut session = Session::new();
    let mut buf = Vec::new();
    loop {
        let reply = match read_bounded_line(&mut reader, &mut buf, MAX_LINE_BYTES)? {
            None => return Ok(Control::CloseSession),
            Some(false) => {
                let body = error_body(
                    None,
                    code::LIMIT,
                    format!("line exceeds {MAX_LINE_BYTES} bytes"),
                );
                writeln!(writer, "{body}")?;
                writer.flush()?;
                continue;
            }
            Some(true) => match std::str::from_utf8(&buf) {
                Ok(line) if line.trim().is_empty() => continue,
                Ok(line) => session.handle_line(line),
                Err(_) => {
                    let body = error_body(None, code::MALFORMED, "line is not valid UTF-8");
                    writeln!(writer, "{body}")?;
                    writer.flush()?;
                    continue;
                }
            },
        };
        writeln!(writer, "{}", reply.line())?;
        writer.flush()?;
        if reply.control != Control::Continue {
            return Ok(reply.control);
        }
    }
}

/// Serves the protocol over standard input and output.
pub fn serve_stdio() -> io::Result<()> {
    let stdin = io::stdin();
    let stdout = io::stdout();
    serve_session(stdin.lock(), stdout.lock()).map(|_| ())
}

/// A TCP server running on a background thread.
pub struct EnvServer {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl EnvServer {
    /// Binds `addr` (port 0 picks a free port) and starts accepting
    /// sessions, one thread per connection.
    pub fn bind(addr: impl ToSocketAddrs) -> io::Result<Self> {
        let listener = TcpListener::bind(addr)?;
        listener.set_nonblocking(true)?;
        let addr = listener.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let flag = stop.clone();
        let handle = thread::spawn(move || accept_loop(listener, flag));
        Ok(Self {
            addr,
            stop,
            handle: Some(handle),
        })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn is_stopped(&self) -> bool {
        self.stop.load(Ordering::SeqCst)
    }

    /// Blocks until a client requests `shutdown` with `server: true`.
    pub fn wait(mut self) {
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }

    pub fn stop(mut self) {
        self.stop.store(true, Ordering::SeqCst);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

impl Drop for EnvServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn accept_loop(listener: TcpListener, stop: Arc<AtomicBool>) {
    while !stop.load(Ordering::SeqCst) {
        match listener.accept() {
            Ok((stream, _)) => {
                let stop = stop.clone();
                thread::spawn(move || {
                    if let Ok(Control::StopServer) = handle_connection(stream) {
                        stop.store(true, Ordering::SeqCst);
                    }
                });
            }
            Err(e) if e.kind() == io::ErrorKind::WouldBlock => {
                thread::sleep(Duration::from_millis(10))
            }
            Err(e) => eprintln!("swapfl env server: accept failed: {e}"),
        }
    }
}

fn handle_connection(stream: TcpStream) -> io::Result<Control> {
    stream.set_nonblocking(false)?;
    stream.set_nodelay(true)?;
    let reader = BufReader::new(stream.try_clone()?);
    serve_session(reader, stream)
}
