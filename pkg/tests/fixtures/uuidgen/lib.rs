#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uuid {
    bytes: [u8; 16],
}

#[derive(Debug)]
pub struct Builder {
    uuid: Uuid,
}

impl Uuid {
    pub fn nil() -> Uuid {
        Uuid { bytes: [0; 16] }
    }

    pub fn from_slice(b: &[u8]) -> Option<Uuid> {
        let bytes: [u8; 16] = b.try_into().ok()?;
        Some(Uuid { bytes })
    }

    pub fn from_u64_pair(hi: u64, lo: u64) -> Uuid {
        let mut bytes = [0u8; 16];
        bytes[..8].copy_from_slice(&hi.to_be_bytes());
        bytes[8..].copy_from_slice(&lo.to_be_bytes());
        Uuid { bytes }
    }

    pub fn from_fields(d1: u32, d2: u16, d3: u16, d4: &[u8; 8]) -> Uuid {
        let mut bytes = [0u8; 16];
        bytes[..4].copy_from_slice(&d1.to_be_bytes());
        bytes[4..6].copy_from_slice(&d2.to_be_bytes());
        bytes[6..8].copy_from_slice(&d3.to_be_bytes());
        bytes[8..].copy_from_slice(d4);
        Uuid { bytes }
    }

    pub fn parse_str(s: &str) -> Result<Uuid, String> {
        let hex: String = s.chars().filter(|&c| c != '-').collect();
        if hex.len() != 32 {
            return Err(format!("bad length {}", hex.len()));
        }
        let mut bytes = [0u8; 16];
        for i in 0..16 {
            // byte slicing panics on multi-byte characters
            bytes[i] = u8::from_str_radix(&hex[2 * i..2 * i + 2], 16).map_err(|e| e.to_string())?;
        }
        Ok(Uuid { bytes })
    }

    pub fn version(&self) -> u8 {
        self.bytes[6] >> 4
    }

    pub fn hyphenated(&self) -> String {
        let h: String = self.bytes.iter().map(|b| format!("{:02x}", b)).collect();
        format!("{}-{}-{}-{}-{}", &h[..8], &h[8..12], &h[12..16], &h[16..20], &h[20..])
    }
}

impl Builder {
    pub fn new(uuid: Uuid) -> Builder {
        Builder { uuid }
    }

    pub fn set_version(&mut self, v: u8) {
        self.uuid.bytes[6] = (self.uuid.bytes[6] & 0x0f) | (v << 4);
    }

    pub fn build(self) -> Uuid {
        self.uuid
    }
}
