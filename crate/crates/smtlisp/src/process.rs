//! The solver child process and a form-at-a-time reader over its stdout.

use std::io::{self, Read, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use smtlisp_core::sexpr::{ByteSource, FormReader, ReadError, SExpr};

#[derive(Debug)]
pub(crate) enum WireError {
    Timeout,
    Closed,
    Io(io::Error),
    Syntax(String),
}

/// Bytes forwarded from the stdout reader thread, with a per-read deadline.
pub(crate) struct ChannelSource {
    rx: Receiver<Vec<u8>>,
    chunk: Vec<u8>,
    pos: usize,
    deadline: Option<Instant>,
    transcript: Vec<u8>,
}

impl ByteSource for ChannelSource {
    type Error = WireError;

    fn next_byte(&mut self) -> Result<Option<u8>, WireError> {
        while self.pos >= self.chunk.len() {
            let received = match self.deadline {
                Some(d) => self.rx.recv_timeout(d.saturating_duration_since(Instant::now())),
                None => self.rx.recv().map_err(|_| RecvTimeoutError::Disconnected),
            };
            match received {
                Ok(chunk) => {
                    self.chunk = chunk;
                    self.pos = 0;
                }
                Err(RecvTimeoutError::Timeout) => return Err(WireError::Timeout),
                Err(RecvTimeoutError::Disconnected) => return Ok(None),
            }
        }
        let b = self.chunk[self.pos];
        self.pos += 1;
        self.transcript.push(b);
        Ok(Some(b))
    }
}

pub(crate) struct SolverProcess {
    child: Child,
    stdin: Option<ChildStdin>,
    reader: FormReader<ChannelSource>,
    stderr: Arc<Mutex<String>>,
}

impl SolverProcess {
    pub fn spawn(command: &[String]) -> io::Result<Self> {
        let (program, args) = command.split_first().ok_or_else(|| io::Error::from(io::ErrorKind::NotFound))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()?;
        let stdin = child.stdin.take();
        let mut stdout = child.stdout.take().expect("piped stdout");
        let mut err_pipe = child.stderr.take().expect("piped stderr");

        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            let mut buf = [0u8; 8192];
            loop {
                match stdout.read(&mut buf) {
                    Ok(0) | Err(_) => break,
                    Ok(n) => {
                        if tx.send(buf[..n].to_vec()).is_err() {
                            break;
                        }
                    }
                }
            }
        });
        let stderr = Arc::new(Mutex::new(String::new()));
        let sink = Arc::clone(&stderr);
        thread::spawn(move || {
            let mut buf = [0u8; 4096];
            while let Ok(n) = err_pipe.read(&mut buf) {
                if n == 0 {
                    break;
                }
                let text = String::from_utf8_lossy(&buf[..n]);
                log::debug!("solver stderr: {}", text.trim_end());
                sink.lock().unwrap().push_str(&text);
            }
        });

        let source = ChannelSource { rx, chunk: Vec::new(), pos: 0, deadline: None, transcript: Vec::new() };
        Ok(SolverProcess { child, stdin, reader: FormReader::new(source), stderr })
    }

    pub fn send(&mut self, command: &str) -> Result<(), WireError> {
        log::debug!("-> {command}");
        let stdin = self.stdin.as_mut().ok_or(WireError::Closed)?;
        stdin
            .write_all(command.as_bytes())
            .and_then(|()| stdin.write_all(b"\n"))
            .and_then(|()| stdin.flush())
            .map_err(|e| if e.kind() == io::ErrorKind::BrokenPipe { WireError::Closed } else { WireError::Io(e) })
    }

    /// Reads one response form. The raw bytes are kept for
    /// [`SolverProcess::last_text`].
    pub fn read(&mut self, timeout: Duration) -> Result<SExpr, WireError> {
        let source = self.reader.source_mut();
        source.deadline = Instant::now().checked_add(timeout);
        source.transcript.clear();
        let form = match self.reader.try_read_form() {
            Ok(Some(form)) => form,
            Ok(None) | Err(ReadError::StreamClosed) => return Err(WireError::Closed),
            Err(ReadError::Source(e)) => return Err(e),
            Err(ReadError::Syntax(e)) => return Err(WireError::Syntax(e.to_string())),
        };
        log::debug!("<- {form}");
        Ok(form)
    }

    /// Raw text of the most recent response.
    pub fn last_text(&self) -> String {
        String::from_utf8_lossy(&self.reader.source().transcript).trim().to_owned()
    }

    pub fn stderr_text(&self) -> String {
        self.stderr.lock().unwrap().clone()
    }

    /// Closes stdin and waits up to `grace` for the process to exit,
    /// killing it afterwards.
    pub fn shutdown(&mut self, grace: Duration) {
        self.stdin = None;
        let until = Instant::now() + grace;
        loop {
            match self.child.try_wait() {
                Ok(Some(_)) => return,
                Ok(None) if Instant::now() < until => thread::sleep(Duration::from_millis(5)),
                _ => break,
            }
        }
        if let Err(e) = self.child.kill() {
            log::warn!("could not kill solver process: {e}");
        }
        let _ = self.child.wait();
    }
}

impl Drop for SolverProcess {
    fn drop(&mut self) {
        if matches!(self.child.try_wait(), Ok(None)) {
            let _ = self.child.kill();
            let _ = self.child.wait();
        }
    }
}
