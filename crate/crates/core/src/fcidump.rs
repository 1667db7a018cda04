//! FCIDUMP ingestion.
//!
//! Layout: a `&FCI ... &END` (or `/`) namelist header with `NORB`, `NELEC`,
//! `MS2`, `ORBSYM` and `ISYM`, followed by lines `value i j k l` with 1-based
//! indices. `i j k l` nonzero is `(ij|kl)`, `i j 0 0` is `h_ij` and `0 0 0 0`
//! is the core energy. Lines `i 0 0 0` (orbital energies) are accepted and
//! ignored.

use crate::error::{Error, Result};

/// Spatial-orbital integrals in chemist notation, 0-based.
#[derive(Clone, Debug, PartialEq)]
pub struct MolecularIntegrals {
    pub norb: usize,
    pub nelec: usize,
    pub ms2: i64,
    pub orbsym: Vec<i64>,
    pub isym: i64,
    pub core_energy: f64,
    one_body: Vec<f64>,
    two_body: Vec<f64>,
}

/// Orbital count above which the parser refuses the header (JW needs 2 modes per orbital).
pub const MAX_ORBITALS: usize = 32;

impl MolecularIntegrals {
    pub fn zeros(norb: usize, nelec: usize) -> Self {
        MolecularIntegrals {
            norb,
            nelec,
            ms2: 0,
            orbsym: vec![1; norb],
            isym: 1,
            core_energy: 0.0,
            one_body: vec![0.0; norb * norb],
            two_body: vec![0.0; norb.pow(4)],
        }
    }

    pub fn one_body(&self, p: usize, q: usize) -> f64 {
        self.one_body[p * self.norb + q]
    }

    pub fn two_body(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.two_body[self.idx4(p, q, r, s)]
    }

    /// Sets `h_pq` and `h_qp`.
    pub fn set_one_body(&mut self, p: usize, q: usize, value: f64) {
        let n = self.norb;
        self.one_body[p * n + q] = value;
        self.one_body[q * n + p] = value;
    }

    /// Sets `(pq|rs)` and its seven permutation images.
    pub fn set_two_body(&mut self, p: usize, q: usize, r: usize, s: usize, value: f64) {
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            let i = self.idx4(a, b, c, d);
            self.two_body[i] = value;
        }
    }

    fn idx4(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        let n = self.norb;
        ((p * n + q) * n + r) * n + s
    }

    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.norb
    }
}

struct Header {
    norb: Option<usize>,
    nelec: Option<usize>,
    ms2: i64,
    orbsym: Vec<i64>,
    isym: i64,
}

/// Parses FCIDUMP text. Errors carry the offending 1-based line number.
pub fn parse_fcidump(text: &str) -> Result<MolecularIntegrals> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let mut body = Vec::new();
    let mut start_line = 0;
    let mut closed = false;
    for (line_no, line) in lines.by_ref() {
        let trimmed = line.trim();
        if body.is_empty() && trimmed.is_empty() {
            continue;
        }
        if body.is_empty() {
            let upper = trimmed.to_ascii_uppercase();
            let Some(rest) = upper.strip_prefix("&FCI") else {
                return Err(Error::parse(line_no, "expected '&FCI' namelist header"));
            };
            start_line = line_no;
            body.push((line_no, rest.to_string()));
        } else {
            body.push((line_no, trimmed.to_ascii_uppercase()));
        }
        let last = &mut body.last_mut().expect("just pushed").1;
        if let Some(pos) = last.find("&END").or_else(|| last.find('/')) {
            last.truncate(pos);
            closed = true;
            break;
        }
    }
    if body.is_empty() {
        return Err(Error::parse(1, "empty input, expected '&FCI' header"));
    }
    if !closed {
        return Err(Error::parse(start_line, "namelist header is not terminated by '&END' or '/'"));
    }
    let header = parse_header(&body)?;
    let norb = header
        .norb
        .ok_or_else(|| Error::parse(start_line, "header is missing NORB"))?;
    let nelec = header
        .nelec
        .ok_or_else(|| Error::parse(start_line, "header is missing NELEC"))?;
    if norb == 0 {
        return Err(Error::parse(start_line, "NORB must be at least 1"));
    }
    if norb > MAX_ORBITALS {
        return Err(Error::parse(start_line, format!("NORB={norb} exceeds the limit of {MAX_ORBITALS}")));
    }
    if nelec > 2 * norb {
        return Err(Error::parse(start_line, format!("NELEC={nelec} exceeds 2*NORB")));
    }

    let mut ints = MolecularIntegrals::zeros(norb, nelec);
    ints.ms2 = header.ms2;
    ints.isym = header.isym;
    if !header.orbsym.is_empty() {
        ints.orbsym = header.orbsym;
    }

    for (line_no, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 5 {
            return Err(Error::parse(
                line_no,
                format!("expected 'value i j k l', found {} fields", tokens.len()),
            ));
        }
        let value = parse_real(tokens[0])
            .ok_or_else(|| Error::parse(line_no, format!("non-numeric value '{}'", tokens[0])))?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&tokens[1..]) {
            let v: i64 = tok
                .parse()
                .map_err(|_| Error::parse(line_no, format!("non-integer index '{tok}'")))?;
            if v < 0 || v as usize > norb {
                return Err(Error::parse(line_no, format!("index {v} out of range 0..={norb}")));
            }
            *slot = v as usize;
        }
        match idx {
            [0, 0, 0, 0] => ints.core_energy = value,
            [i, 0, 0, 0] if i > 0 => {}
            [i, j, 0, 0] if i > 0 && j > 0 => ints.set_one_body(i - 1, j - 1, value),
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                ints.set_two_body(i - 1, j - 1, k - 1, l - 1, value)
            }
            _ => {
                return Err(Error::parse(
                    line_no,
                    format!("unsupported index pattern {idx:?}"),
                ))
            }
        }
    }
    Ok(ints)
}

fn parse_real(tok: &str) -> Option<f64> {
    let v: f64 = tok.replace(['D', 'd'], "E").parse().ok()?;
    v.is_finite().then_some(v)
}

fn parse_header(body: &[(usize, String)]) -> Result<Header> {
    let mut header = Header {
        norb: None,
        nelec: None,
        ms2: 0,
        orbsym: Vec::new(),
        isym: 1,
    };
    let mut key: Option<(String, usize)> = None;
    let mut values: Vec<(i64, usize)> = Vec::new();

    let mut flush = |key: Option<(String, usize)>, values: &mut Vec<(i64, usize)>| -> Result<()> {
        let Some((name, line)) = key else {
            if let Some(&(_, l)) = values.first() {
                return Err(Error::parse(l, "value without a key in header"));
            }
            return Ok(());
        };
        let scalar = |values: &[(i64, usize)]| -> Result<i64> {
            match values {
                [(v, _)] => Ok(*v),
                _ => Err(Error::parse(line, format!("{name} expects exactly one value"))),
            }
        };
        let unsigned = |v: i64| -> Result<usize> {
            usize::try_from(v).map_err(|_| Error::parse(line, format!("{name} must be non-negative")))
        };
        match name.as_str() {
            "NORB" => header.norb = Some(unsigned(scalar(values)?)?),
            "NELEC" => header.nelec = Some(unsigned(scalar(values)?)?),
            "MS2" => header.ms2 = scalar(values)?,
            "ISYM" => header.isym = scalar(values)?,
            "ORBSYM" => header.orbsym = values.iter().map(|&(v, _)| v).collect(),
            // Other namelist entries (UHF, IUHF, ...) are irrelevant here.
            _ => {}
        }
        values.clear();
        Ok(())
    };

    for (line_no, text) in body {
        let spaced = text.replace('=', " = ").replace(',', " ");
        let mut tokens = spaced.split_whitespace().peekable();
        while let Some(tok) = tokens.next() {
            if tokens.peek() == Some(&"=") {
                tokens.next();
                flush(key.take(), &mut values)?;
                key = Some((tok.to_string(), *line_no));
            } else if tok == "=" {
                return Err(Error::parse(*line_no, "'=' without a key in header"));
            } else {
                let v: i64 = tok
                    .parse()
                    .map_err(|_| Error::parse(*line_no, format!("malformed header token '{tok}'")))?;
                values.push((v, *line_no));
            }
        }
    }
    flush(key.take(), &mut values)?;
    Ok(header)
}
