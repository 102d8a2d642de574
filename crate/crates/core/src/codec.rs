//! Canonical byte encoding.
//!
//! Every value that is committed to, signed, hashed, secret-shared or sent
//! over a simulated channel goes through this module. The format has two
//! building blocks:
//!
//! * a byte string is an 8-byte big-endian length followed by the raw bytes;
//! * a list is an 8-byte big-endian item count followed by the item encodings.
//!
//! Optional fields carry an explicit presence flag byte (`0x00` absent,
//! `0x01` present) followed by a byte string, which is empty when absent.
//! An empty-but-present field therefore never collides with an absent one.

use thiserror::Error;

// Lengths are written as u64; larger sizes cannot occur on supported targets.
const _: () = assert!(usize::BITS <= 64);

/// Errors raised while decoding.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("unexpected end of input at offset {0}")]
    Truncated(usize),
    #[error("declared length {0} exceeds the remaining input")]
    Length(u64),
    #[error("{0} trailing bytes after the value")]
    Trailing(usize),
    #[error("unknown operation byte {0:#04x}")]
    UnknownOp(u8),
    #[error("invalid presence flag {0:#04x}")]
    BadFlag(u8),
    #[error("malformed {0}")]
    Malformed(&'static str),
}

/// An encoded value.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Encoded(Vec<u8>);

impl Encoded {
    /// Wraps bytes that are already in canonical form.
    pub fn from_raw(bytes: Vec<u8>) -> Self {
        Encoded(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl AsRef<[u8]> for Encoded {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

/// Values with a canonical encoding.
pub trait Encode {
    fn encode_to(&self, out: &mut Vec<u8>);

    fn encode(&self) -> Encoded {
        let mut out = Vec::new();
        self.encode_to(&mut out);
        Encoded(out)
    }

    fn encoded_len(&self) -> usize {
        self.encode().len()
    }
}

/// Values that can be read back from their canonical encoding.
pub trait Decode: Sized {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, CodecError>;

    /// Decodes a complete buffer, rejecting trailing bytes.
    fn decode(bytes: &[u8]) -> Result<Self, CodecError> {
        let mut r = Reader::new(bytes);
        let v = Self::decode_from(&mut r)?;
        r.finish()?;
        Ok(v)
    }
}

impl Encode for Encoded {
    fn encode_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.0);
    }
}

pub fn put_count(out: &mut Vec<u8>, n: usize) {
    out.extend_from_slice(&(n as u64).to_be_bytes());
}

pub fn put_bytes(out: &mut Vec<u8>, b: &[u8]) {
    put_count(out, b.len());
    out.extend_from_slice(b);
}

/// A u64 is carried as an 8-byte string.
pub fn put_u64(out: &mut Vec<u8>, v: u64) {
    put_bytes(out, &v.to_be_bytes());
}

pub fn put_optional<T: Encode>(out: &mut Vec<u8>, v: Option<&T>) {
    match v {
        None => {
            out.push(0);
            put_count(out, 0);
        }
        Some(v) => {
            out.push(1);
            let inner = v.encode();
            put_bytes(out, inner.as_bytes());
        }
    }
}

/// Length-prefixed byte string.
pub fn encode_bytes(b: &[u8]) -> Encoded {
    let mut out = Vec::with_capacity(8 + b.len());
    put_bytes(&mut out, b);
    Encoded(out)
}

/// Count-prefixed concatenation of already encoded items.
pub fn encode_list(items: &[Encoded]) -> Encoded {
    let mut out = Vec::with_capacity(8 + items.iter().map(Encoded::len).sum::<usize>());
    put_count(&mut out, items.len());
    for item in items {
        out.extend_from_slice(item.as_bytes());
    }
    Encoded(out)
}

pub fn encode_u64(v: u64) -> Encoded {
    encode_bytes(&v.to_be_bytes())
}

/// Cursor over an encoded buffer.
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        if self.remaining() < n {
            return Err(CodecError::Truncated(self.pos));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }

    /// Reads a raw 8-byte big-endian prefix (length or count).
    pub fn count(&mut self) -> Result<u64, CodecError> {
        let b = self.take(8)?;
        Ok(u64::from_be_bytes(b.try_into().expect("8 bytes")))
    }

    /// Reads a list count and checks it is plausible for the remaining input.
    pub fn list_len(&mut self) -> Result<usize, CodecError> {
        let n = self.count()?;
        // every item occupies at least one byte
        if n > self.remaining() as u64 {
            return Err(CodecError::Length(n));
        }
        Ok(n as usize)
    }

    pub fn bytes(&mut self) -> Result<&'a [u8], CodecError> {
        let n = self.count()?;
        if n > self.remaining() as u64 {
            return Err(CodecError::Length(n));
        }
        self.take(n as usize)
    }

    pub fn u64(&mut self) -> Result<u64, CodecError> {
        let b = self.bytes()?;
        let arr: [u8; 8] = b.try_into().map_err(|_| CodecError::Malformed("u64 field"))?;
        Ok(u64::from_be_bytes(arr))
    }

    pub fn optional<T: Decode>(&mut self) -> Result<Option<T>, CodecError> {
        let flag = self.u8()?;
        let inner = self.bytes()?;
        match flag {
            0 if inner.is_empty() => Ok(None),
            0 => Err(CodecError::Malformed("absent field with payload")),
            1 => Ok(Some(T::decode(inner)?)),
            f => Err(CodecError::BadFlag(f)),
        }
    }

    pub fn finish(&self) -> Result<(), CodecError> {
        match self.remaining() {
            0 => Ok(()),
            n => Err(CodecError::Trailing(n)),
        }
    }
}

/// Decodes a top-level byte string.
pub fn decode_bytes(bytes: &[u8]) -> Result<Vec<u8>, CodecError> {
    let mut r = Reader::new(bytes);
    let v = r.bytes()?.to_vec();
    r.finish()?;
    Ok(v)
}

/// Splits a top-level list into its raw item encodings.
///
/// Items must themselves be byte strings; this is the shape used for
/// generic `[bytes, bytes, ...]` messages.
pub fn decode_byte_list(bytes: &[u8]) -> Result<Vec<Vec<u8>>, CodecError> {
    let mut r = Reader::new(bytes);
    let n = r.list_len()?;
    let mut items = Vec::with_capacity(n);
    for _ in 0..n {
        items.push(r.bytes()?.to_vec());
    }
    r.finish()?;
    Ok(items)
}
