#[derive(Debug, Default)]
pub struct Buf {
    data: Vec<u8>,
    pos: usize,
}

#[derive(Debug, Clone)]
pub struct Frozen {
    data: std::rc::Rc<Vec<u8>>,
    start: usize,
    end: usize,
}

impl Buf {
    pub fn new() -> Buf {
        Buf::default()
    }

    pub fn with_capacity(cap: usize) -> Buf {
        Buf { data: Vec::with_capacity(cap.min(1 << 16)), pos: 0 }
    }

    pub fn from_slice(bytes: &[u8]) -> Buf {
        Buf { data: bytes.to_vec(), pos: 0 }
    }

    pub fn put_u8(&mut self, b: u8) {
        self.data.push(b);
    }

    pub fn put_slice(&mut self, bytes: &[u8]) {
        self.data.extend_from_slice(bytes);
    }

    pub fn get_u8(&mut self) -> Option<u8> {
        let b = *self.data.get(self.pos)?;
        self.pos += 1;
        Some(b)
    }

    pub fn split_off(&mut self, at: usize) -> Buf {
        // no bounds check: panics when at > len
        let tail = self.data.split_off(at);
        Buf { data: tail, pos: 0 }
    }

    pub fn freeze(self) -> Frozen {
        let end = self.data.len();
        Frozen { data: std::rc::Rc::new(self.data), start: self.pos, end }
    }

    pub fn read_into(&mut self, out: &mut [u8; 8]) -> usize {
        let n = (self.data.len() - self.pos).min(8);
        out[..n].copy_from_slice(&self.data[self.pos..self.pos + n]);
        self.pos += n;
        n
    }
}

impl Frozen {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn slice(&self, from: usize, to: usize) -> Option<Frozen> {
        if from > to || to > self.len() {
            return None;
        }
        Some(Frozen { data: self.data.clone(), start: self.start + from, end: self.start + to })
    }

    pub fn to_vec(&self) -> Vec<u8> {
        self.data[self.start..self.end].to_vec()
    }
}
