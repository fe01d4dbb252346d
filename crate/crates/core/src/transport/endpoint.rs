use std::io::{self, BufRead, BufReader, ErrorKind, Write};
use std::net::TcpStream;
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::time::Duration;

use crate::error::{Error, Result};

use super::wire::{decode, encode, ClassicalMessage, Frame};

/// An ordered, reliable duplex line port. Lines carry no trailing newline.
pub trait Endpoint {
    fn send_line(&mut self, line: &str) -> Result<()>;
    /// Blocks up to the endpoint's timeout.
    fn recv_line(&mut self) -> Result<String>;

    fn send(&mut self, frame: &Frame) -> Result<()> {
        self.send_line(&encode(frame)?)
    }

    fn recv(&mut self) -> Result<Frame> {
        decode(&self.recv_line()?)
    }
}

impl<E: Endpoint + ?Sized> Endpoint for &mut E {
    fn send_line(&mut self, line: &str) -> Result<()> {
        (**self).send_line(line)
    }

    fn recv_line(&mut self) -> Result<String> {
        (**self).recv_line()
    }
}

#[derive(Debug)]
pub struct TcpEndpoint {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl TcpEndpoint {
    pub fn new(stream: TcpStream, timeout: Duration) -> Result<Self> {
        stream.set_read_timeout(Some(timeout))?;
        stream.set_write_timeout(Some(timeout))?;
        stream.set_nodelay(true)?;
        let writer = stream.try_clone()?;
        Ok(TcpEndpoint {
            reader: BufReader::new(stream),
            writer,
        })
    }
}

fn io_error(e: io::Error) -> Error {
    match e.kind() {
        ErrorKind::WouldBlock | ErrorKind::TimedOut => Error::Timeout,
        ErrorKind::UnexpectedEof
        | ErrorKind::BrokenPipe
        | ErrorKind::ConnectionReset
        | ErrorKind::ConnectionAborted => Error::Closed,
        _ => Error::Io(e),
    }
}

impl Endpoint for TcpEndpoint {
    fn send_line(&mut self, line: &str) -> Result<()> {
        self.writer
            .write_all(format!("{line}\n").as_bytes())
            .and_then(|()| self.writer.flush())
            .map_err(io_error)
    }

    fn recv_line(&mut self) -> Result<String> {
        let mut line = String::new();
        match self.reader.read_line(&mut line) {
            Ok(0) => Err(Error::Closed),
            Ok(_) => {
                if line.ends_with('\n') {
                    line.pop();
                    Ok(line)
                } else {
                    Err(Error::Closed)
                }
            }
            Err(e) => Err(io_error(e)),
        }
    }
}

/// One side of an in-process queue pair.
#[derive(Debug)]
pub struct MemoryEndpoint {
    tx: Sender<String>,
    rx: Receiver<String>,
    timeout: Duration,
}

pub fn memory_pair(timeout: Duration) -> (MemoryEndpoint, MemoryEndpoint) {
    let (atx, brx) = mpsc::channel();
    let (btx, arx) = mpsc::channel();
    (
        MemoryEndpoint {
            tx: atx,
            rx: arx,
            timeout,
        },
        MemoryEndpoint {
            tx: btx,
            rx: brx,
            timeout,
        },
    )
}

impl Endpoint for MemoryEndpoint {
    fn send_line(&mut self, line: &str) -> Result<()> {
        self.tx.send(line.to_owned()).map_err(|_| Error::Closed)
    }

    fn recv_line(&mut self) -> Result<String> {
        self.rx.recv_timeout(self.timeout).map_err(|e| match e {
            RecvTimeoutError::Timeout => Error::Timeout,
            RecvTimeoutError::Disconnected => Error::Closed,
        })
    }
}

/// Toggles one KEEP/FLIP signal in every outgoing list. Models a forged
/// classical message on a channel without authentication.
#[derive(Debug)]
pub struct TamperEndpoint<E> {
    inner: E,
    position: usize,
}

impl<E: Endpoint> TamperEndpoint<E> {
    pub fn new(inner: E, position: usize) -> Self {
        TamperEndpoint { inner, position }
    }
}

impl<E: Endpoint> Endpoint for TamperEndpoint<E> {
    fn send_line(&mut self, line: &str) -> Result<()> {
        if let Ok(Frame::Classical(ClassicalMessage::KeepFlipList {
            session,
            mut signals,
        })) = decode(line)
        {
            if let Some(sig) = signals.get_mut(self.position) {
                *sig = sig.toggled();
            }
            let forged = ClassicalMessage::KeepFlipList { session, signals };
            return self.inner.send_line(&encode(&forged.into())?);
        }
        self.inner.send_line(line)
    }

    fn recv_line(&mut self) -> Result<String> {
        self.inner.recv_line()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::Signal;
    use std::net::TcpListener;
    use std::thread;

    #[test]
    fn memory_pair_is_ordered_duplex() {
        let (mut a, mut b) = memory_pair(Duration::from_secs(1));
        a.send_line("one").unwrap();
        a.send_line("two").unwrap();
        assert_eq!(b.recv_line().unwrap(), "one");
        assert_eq!(b.recv_line().unwrap(), "two");
        b.send_line("back").unwrap();
        assert_eq!(a.recv_line().unwrap(), "back");
    }

    #[test]
    fn memory_timeout_and_close() {
        let (mut a, b) = memory_pair(Duration::from_millis(20));
        assert!(matches!(a.recv_line(), Err(Error::Timeout)));
        drop(b);
        assert!(matches!(a.recv_line(), Err(Error::Closed)));
        assert!(matches!(a.send_line("x"), Err(Error::Closed)));
    }

    #[test]
    fn tcp_lines_and_eof() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let h = thread::spawn(move || {
            let (s, _) = listener.accept().unwrap();
            let mut ep = TcpEndpoint::new(s, Duration::from_secs(5)).unwrap();
            let got = ep.recv_line().unwrap();
            ep.send_line(&got.to_uppercase()).unwrap();
        });
        let mut ep =
            TcpEndpoint::new(TcpStream::connect(addr).unwrap(), Duration::from_secs(5)).unwrap();
        ep.send_line("hello").unwrap();
        assert_eq!(ep.recv_line().unwrap(), "HELLO");
        h.join().unwrap();
        assert!(matches!(ep.recv_line(), Err(Error::Closed)));
    }

    #[test]
    fn tcp_read_timeout() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let _client = TcpStream::connect(addr).unwrap();
        let (s, _) = listener.accept().unwrap();
        let mut ep = TcpEndpoint::new(s, Duration::from_millis(30)).unwrap();
        assert!(matches!(ep.recv_line(), Err(Error::Timeout)));
    }

    #[test]
    fn tamper_flips_only_the_chosen_signal() {
        let (a, mut b) = memory_pair(Duration::from_secs(1));
        let mut a = TamperEndpoint::new(a, 1);
        let list = ClassicalMessage::KeepFlipList {
            session: 3,
            signals: vec![Signal::Keep; 3],
        };
        a.send(&list.into()).unwrap();
        a.send(&ClassicalMessage::Done { session: 3 }.into())
            .unwrap();
        let Frame::Classical(ClassicalMessage::KeepFlipList { signals, .. }) = b.recv().unwrap()
        else {
            panic!("expected list");
        };
        assert_eq!(signals, vec![Signal::Keep, Signal::Flip, Signal::Keep]);
        assert_eq!(b.recv().unwrap().kind(), "done");
    }
}
