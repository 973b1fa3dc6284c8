//! Wire format. Header: magic `PPSI`, version byte, type byte, 32-bit payload length.

use std::io::{self, Read, Write};

use crate::error::{Error, Result};
use crate::retrieve::AnswerVector;
use crate::storage::{decode_answer, encode_answer};
use crate::types::{BitRef, Codeword, Query};

pub const MAGIC: &[u8; 4] = b"PPSI";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 10;
pub const MAX_PAYLOAD: u32 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum MsgType {
    Query = 1,
    Answer = 2,
    Error = 3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum ErrorReason {
    BadMagic = 1,
    BadVersion = 2,
    BadPayload = 3,
    OutOfBounds = 4,
}

impl ErrorReason {
    pub fn from_u8(v: u8) -> Option<ErrorReason> {
        Some(match v {
            1 => ErrorReason::BadMagic,
            2 => ErrorReason::BadVersion,
            3 => ErrorReason::BadPayload,
            4 => ErrorReason::OutOfBounds,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub version: u8,
    pub msg_type: u8,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(t: MsgType, payload: Vec<u8>) -> Frame {
        Frame { version: VERSION, msg_type: t as u8, payload }
    }

    pub fn error(reason: ErrorReason) -> Frame {
        Frame::new(MsgType::Error, vec![reason as u8])
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        out.extend_from_slice(MAGIC);
        out.push(self.version);
        out.push(self.msg_type);
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn decode(bytes: &[u8]) -> std::result::Result<Frame, ErrorReason> {
        let mut cur = bytes;
        let f = read_frame(&mut cur).map_err(|e| match e {
            ReadError::Reason(r) => r,
            ReadError::Eof | ReadError::Io(_) => ErrorReason::BadPayload,
        })?;
        if !cur.is_empty() {
            return Err(ErrorReason::BadPayload);
        }
        Ok(f)
    }
}

#[derive(Debug)]
pub enum ReadError {
    /// Clean end of stream before any header byte.
    Eof,
    Io(io::Error),
    /// The header was read but is unacceptable. For `BadVersion` and
    /// `BadPayload` the payload has been consumed, so the stream stays in sync.
    Reason(ErrorReason),
}

impl From<io::Error> for ReadError {
    fn from(e: io::Error) -> Self {
        ReadError::Io(e)
    }
}

pub fn read_frame<R: Read>(r: &mut R) -> std::result::Result<Frame, ReadError> {
    let mut head = [0u8; HEADER_LEN];
    let mut got = 0;
    while got < HEADER_LEN {
        let n = r.read(&mut head[got..])?;
        if n == 0 {
            return Err(if got == 0 { ReadError::Eof } else { ReadError::Reason(ErrorReason::BadPayload) });
        }
        got += n;
    }
    if &head[..4] != MAGIC {
        return Err(ReadError::Reason(ErrorReason::BadMagic));
    }
    let len = u32::from_be_bytes([head[6], head[7], head[8], head[9]]);
    if len > MAX_PAYLOAD {
        return Err(ReadError::Reason(ErrorReason::BadPayload));
    }
    let mut payload = vec![0u8; len as usize];
    r.read_exact(&mut payload).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => ReadError::Reason(ErrorReason::BadPayload),
        _ => ReadError::Io(e),
    })?;
    if head[4] != VERSION {
        return Err(ReadError::Reason(ErrorReason::BadVersion));
    }
    Ok(Frame { version: head[4], msg_type: head[5], payload })
}

pub fn write_frame<W: Write>(w: &mut W, f: &Frame) -> io::Result<()> {
    w.write_all(&f.encode())?;
    w.flush()
}

/// A query as it travels: codewords of raw (message id, bit index) terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryPayload {
    pub k: u8,
    pub codewords: Vec<Vec<BitRef>>,
}

impl QueryPayload {
    pub fn from_query(k: u8, q: &Query) -> QueryPayload {
        QueryPayload { k, codewords: q.codewords().iter().map(|c| c.terms().to_vec()).collect() }
    }

    pub fn encode(&self) -> Result<Vec<u8>> {
        let n = u16::try_from(self.codewords.len()).map_err(|_| Error::Protocol("too many codewords".into()))?;
        let mut out = vec![self.k];
        out.extend_from_slice(&n.to_be_bytes());
        for cw in &self.codewords {
            let t = u8::try_from(cw.len()).map_err(|_| Error::Protocol("codeword too wide".into()))?;
            out.push(t);
            for b in cw {
                out.push(b.msg);
                out.extend_from_slice(&b.index.to_be_bytes());
            }
        }
        Ok(out)
    }

    pub fn decode(bytes: &[u8]) -> std::result::Result<QueryPayload, ErrorReason> {
        let bad = ErrorReason::BadPayload;
        let (&k, rest) = bytes.split_first().ok_or(bad)?;
        let (n, mut rest) = rest.split_at_checked(2).ok_or(bad)?;
        let n = u16::from_be_bytes([n[0], n[1]]);
        let mut codewords = Vec::with_capacity(n as usize);
        for _ in 0..n {
            let (&t, r) = rest.split_first().ok_or(bad)?;
            if t == 0 {
                return Err(bad);
            }
            let mut terms = Vec::with_capacity(t as usize);
            let mut r = r;
            for _ in 0..t {
                let (term, tail) = r.split_at_checked(5).ok_or(bad)?;
                terms.push(BitRef::new(term[0], u32::from_be_bytes([term[1], term[2], term[3], term[4]])));
                r = tail;
            }
            codewords.push(terms);
            rest = r;
        }
        if !rest.is_empty() {
            return Err(bad);
        }
        Ok(QueryPayload { k, codewords })
    }

    pub fn to_query(&self) -> Result<Query> {
        let cws = self.codewords.iter().map(|t| Codeword::new(t.clone())).collect::<Result<Vec<_>>>()?;
        Query::new(cws)
    }
}

pub fn encode_answer_payload(ans: &AnswerVector) -> Result<Vec<u8>> {
    encode_answer(ans)
}

pub fn decode_answer_payload(bytes: &[u8]) -> Result<AnswerVector> {
    decode_answer(bytes).map_err(|e| Error::Protocol(e.to_string()))
}
