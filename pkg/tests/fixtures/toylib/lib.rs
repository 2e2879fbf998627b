pub struct S1 {
    pub val: u8,
}

pub struct S2 {
    pub text: String,
}

pub fn f1(x: u8) -> S1 {
    S1 { val: x }
}

pub fn f2(s: &str) -> S2 {
    S2 { text: s.to_string() }
}

pub fn f3(x: u8) -> S2 {
    S2 { text: x.to_string() }
}

pub fn f4(s1: S1, s2: &mut S2) {
    s2.text.push(char::from(s1.val));
}

pub fn f5(s2: &S2, s: &str) -> u8 {
    // Indexes past the end when the needle is longer than the text.
    s2.text.as_bytes()[s.len()]
}
