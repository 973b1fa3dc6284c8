//! Two-server, one-client simulator of the retrieval protocol.
//!
//! Servers are stateless: each QUERY frame carries a whole query and gets one
//! ANSWER frame back. The two servers share nothing but a replica of the store.

pub mod frame;

use std::io::{self, Read, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{channel, Receiver, Sender};
use std::sync::Arc;
use std::thread::{self, JoinHandle};

use crate::error::{Error, Result};
use crate::privacy::synthesize_code;
use crate::retrieve::{answer_query, decode_demand, AnswerVector, DecodeTrace, MessageStore, SideInfo};
use crate::types::{Code, Query, SchemeParams};

use frame::{decode_answer_payload, encode_answer_payload, read_frame, write_frame, ReadError};
pub use frame::{ErrorReason, Frame, MsgType, QueryPayload};

/// One end of an in-memory byte pipe pair.
pub struct DuplexStream {
    tx: Option<Sender<Vec<u8>>>,
    rx: Receiver<Vec<u8>>,
    buf: Vec<u8>,
    pos: usize,
}

pub fn duplex() -> (DuplexStream, DuplexStream) {
    let (a_tx, b_rx) = channel();
    let (b_tx, a_rx) = channel();
    (
        DuplexStream { tx: Some(a_tx), rx: a_rx, buf: Vec::new(), pos: 0 },
        DuplexStream { tx: Some(b_tx), rx: b_rx, buf: Vec::new(), pos: 0 },
    )
}

impl DuplexStream {
    /// Closes the sending half; the peer then reads end of stream.
    pub fn close_write(&mut self) {
        self.tx = None;
    }
}

impl Read for DuplexStream {
    fn read(&mut self, out: &mut [u8]) -> io::Result<usize> {
        if out.is_empty() {
            return Ok(0);
        }
        while self.pos == self.buf.len() {
            match self.rx.recv() {
                Ok(chunk) => {
                    self.buf = chunk;
                    self.pos = 0;
                }
                Err(_) => return Ok(0),
            }
        }
        let n = out.len().min(self.buf.len() - self.pos);
        out[..n].copy_from_slice(&self.buf[self.pos..self.pos + n]);
        self.pos += n;
        Ok(n)
    }
}

impl Write for DuplexStream {
    fn write(&mut self, data: &[u8]) -> io::Result<usize> {
        let tx = self.tx.as_ref().ok_or_else(|| io::Error::new(io::ErrorKind::BrokenPipe, "write half closed"))?;
        if !data.is_empty() {
            tx.send(data.to_vec()).map_err(|_| io::Error::new(io::ErrorKind::BrokenPipe, "peer gone"))?;
        }
        Ok(data.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

fn respond(store: &MessageStore, f: &Frame) -> Frame {
    if f.msg_type != MsgType::Query as u8 {
        return Frame::error(ErrorReason::BadPayload);
    }
    let p = match QueryPayload::decode(&f.payload) {
        Ok(p) => p,
        Err(r) => return Frame::error(r),
    };
    if p.k != store.k() {
        return Frame::error(ErrorReason::BadPayload);
    }
    let in_bounds = |b: &crate::types::BitRef| b.msg >= 1 && b.msg <= store.k() && b.index >= 1 && b.index <= store.message_len();
    if !p.codewords.iter().flatten().all(in_bounds) {
        return Frame::error(ErrorReason::OutOfBounds);
    }
    let Ok(query) = p.to_query() else { return Frame::error(ErrorReason::BadPayload) };
    match answer_query(store, &query).and_then(|a| encode_answer_payload(&a)) {
        Ok(bytes) => Frame::new(MsgType::Answer, bytes),
        Err(_) => Frame::error(ErrorReason::OutOfBounds),
    }
}

/// Serves frames on one connection until the peer closes it. A bad magic
/// leaves the stream unsynchronized, so the connection is dropped after
/// replying.
pub fn handle_connection<S: Read + Write>(store: &MessageStore, mut stream: S) -> io::Result<()> {
    loop {
        let reply = match read_frame(&mut stream) {
            Ok(f) => respond(store, &f),
            Err(ReadError::Eof) => return Ok(()),
            Err(ReadError::Io(e)) => return Err(e),
            Err(ReadError::Reason(r)) => {
                write_frame(&mut stream, &Frame::error(r))?;
                if r == ErrorReason::BadMagic {
                    return Ok(());
                }
                continue;
            }
        };
        write_frame(&mut stream, &reply)?;
    }
}

/// Starts a server thread on an in-memory pipe and returns the client end.
pub fn serve_in_memory(store: Arc<MessageStore>) -> (DuplexStream, JoinHandle<io::Result<()>>) {
    let (client, server) = duplex();
    let h = thread::spawn(move || handle_connection(&store, server));
    (client, h)
}

/// A TCP server answering each connection on its own thread.
pub struct Server {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    accept: Option<JoinHandle<()>>,
}

impl Server {
    pub fn bind<A: ToSocketAddrs>(store: Arc<MessageStore>, addr: A) -> Result<Server> {
        let listener = TcpListener::bind(addr)?;
        let addr = listener.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let flag = stop.clone();
        let accept = thread::spawn(move || {
            for conn in listener.incoming() {
                if flag.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(conn) = conn else { continue };
                let store = store.clone();
                thread::spawn(move || {
                    let _ = handle_connection(&store, &conn);
                    let _ = conn.shutdown(Shutdown::Both);
                });
            }
        });
        Ok(Server { addr, stop, accept: Some(accept) })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Blocks until `shutdown` is called from another thread, or forever.
    pub fn wait(mut self) {
        if let Some(h) = self.accept.take() {
            let _ = h.join();
        }
    }

    pub fn shutdown(mut self) {
        self.stop_accepting();
    }

    fn stop_accepting(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.accept.take() {
            let _ = h.join();
        }
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        if self.accept.is_some() {
            self.stop_accepting();
        }
    }
}

/// Sends one query and waits for its answer.
pub fn request<S: Read + Write>(stream: &mut S, k: u8, query: &Query) -> Result<AnswerVector> {
    let payload = QueryPayload::from_query(k, query).encode()?;
    write_frame(stream, &Frame::new(MsgType::Query, payload))?;
    let f = match read_frame(stream) {
        Ok(f) => f,
        Err(ReadError::Eof) => return Err(Error::Protocol("server closed the connection".into())),
        Err(ReadError::Io(e)) => return Err(e.into()),
        Err(ReadError::Reason(r)) => return Err(Error::Protocol(format!("malformed reply ({r:?})"))),
    };
    match f.msg_type {
        t if t == MsgType::Answer as u8 => {
            let a = decode_answer_payload(&f.payload)?;
            if a.bits.len() != query.len() {
                return Err(Error::Protocol(format!("answer has {} bits for {} codewords", a.bits.len(), query.len())));
            }
            Ok(a)
        }
        t if t == MsgType::Error as u8 => Err(Error::Remote(f.payload.first().copied().unwrap_or(0))),
        t => Err(Error::Protocol(format!("unexpected frame type {t}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FetchOutcome {
    pub demand: Vec<bool>,
    pub trace: DecodeTrace,
    pub downloaded_bits: usize,
}

/// Queries both servers concurrently and decodes. Nothing is returned unless
/// both answers arrive.
pub fn fetch_code<S1, S2>(n1: &mut S1, n2: &mut S2, code: &Code, si: &SideInfo) -> Result<FetchOutcome>
where
    S1: Read + Write + Send,
    S2: Read + Write + Send,
{
    let k = code.params.k;
    let (a1, a2) = thread::scope(|s| {
        let h1 = s.spawn(|| request(n1, k, &code.query_n1));
        let h2 = s.spawn(|| request(n2, k, &code.query_n2));
        (h1.join().expect("client thread"), h2.join().expect("client thread"))
    });
    let (a1, a2) = (a1?, a2?);
    let (demand, trace) = decode_demand(code, &a1, &a2, si)?;
    Ok(FetchOutcome { demand, trace, downloaded_bits: a1.bits.len() + a2.bits.len() })
}

pub fn fetch_streams<S1, S2>(n1: &mut S1, n2: &mut S2, params: &SchemeParams, si: &SideInfo) -> Result<FetchOutcome>
where
    S1: Read + Write + Send,
    S2: Read + Write + Send,
{
    let code = synthesize_code(params.k, params.demand, params.si())?;
    fetch_code(n1, n2, &code, si)
}

/// Connects to both endpoints over TCP and retrieves the demand.
pub fn fetch<A: ToSocketAddrs>(endpoints: [A; 2], params: &SchemeParams, si: &SideInfo) -> Result<FetchOutcome> {
    let [e1, e2] = endpoints;
    let mut s1 = TcpStream::connect(e1)?;
    let mut s2 = TcpStream::connect(e2)?;
    fetch_streams(&mut s1, &mut s2, params, si)
}
