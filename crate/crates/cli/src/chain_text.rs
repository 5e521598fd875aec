//! Chains written as `-(1,4) + 2(1,3)`.

pub type Terms = Vec<(i64, Vec<String>)>;

pub fn parse(text: &str) -> Result<Terms, String> {
    let mut terms = Vec::new();
    let mut rest = text.trim();
    let mut first = true;
    while !rest.is_empty() {
        let mut sign = 1;
        if let Some(r) = rest.strip_prefix('+') {
            rest = r.trim_start();
        } else if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r.trim_start();
        } else if !first {
            return Err(format!("expected `+` or `-` before `{rest}`"));
        }
        first = false;
        let digits = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        let coef: i64 = if digits == 0 {
            1
        } else {
            rest[..digits].parse().map_err(|e| format!("bad coefficient: {e}"))?
        };
        rest = rest[digits..].trim_start();
        rest = rest.strip_prefix('*').unwrap_or(rest).trim_start();
        let body = rest.strip_prefix('(').ok_or_else(|| format!("expected `(` at `{rest}`"))?;
        let close = body.find(')').ok_or("unclosed `(`")?;
        let names: Vec<String> = body[..close].split(',').map(|s| s.trim().to_string()).collect();
        if names.iter().any(String::is_empty) {
            return Err(format!("empty element name in `({})`", &body[..close]));
        }
        if let Some((_, w)) = terms.first() {
            let w: &Vec<String> = w;
            if w.len() != names.len() {
                return Err("all tuples of a chain must have the same length".into());
            }
        }
        terms.push((sign * coef, names));
        rest = body[close + 1..].trim_start();
    }
    Ok(terms)
}
