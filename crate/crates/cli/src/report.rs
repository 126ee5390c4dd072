use std::fmt::Write;

use awtp_core::protocols::SessionTranscript;

fn positions(p: &[usize]) -> String {
    let mut v = p.to_vec();
    v.sort_unstable();
    let shown: Vec<String> = v.iter().take(16).map(|x| x.to_string()).collect();
    let more = if v.len() > 16 { format!(", ... ({} total)", v.len()) } else { String::new() };
    format!("[{}{more}]", shown.join(", "))
}

fn key(k: &Option<Vec<u32>>) -> String {
    match k {
        None => "⊥".into(),
        Some(k) => {
            let head: Vec<String> = k.iter().take(8).map(|x| x.to_string()).collect();
            let tail = if k.len() > 8 { ", ..." } else { "" };
            format!("{} elements [{}{tail}]", k.len(), head.join(", "))
        }
    }
}

pub fn render(t: &SessionTranscript) -> String {
    let c = &t.config;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "variant {}  q = {}  u = {}  n1 = {}  (rho_r, rho_w, rho) = ({}, {}, {})  l = {}",
        c.variant.as_str(),
        c.q,
        c.u,
        c.n1,
        c.rho_r,
        c.rho_w,
        c.rho,
        c.key_len
    );
    let seed = t.seed.map_or("-".to_string(), |s| s.to_string());
    let _ = writeln!(s, "strategy {}  seed {seed}", t.strategy);
    for r in &t.rounds {
        let _ = writeln!(
            s,
            "round {} {:?} {:?}: {} symbols, read {} {}, wrote {} {}",
            r.round,
            r.channel,
            r.direction,
            r.sent.len(),
            r.read_set.len(),
            positions(&r.read_set),
            r.write_set.len(),
            positions(&r.write_set)
        );
    }
    let o = &t.outcome;
    let _ = writeln!(s, "k_A: {}", key(&o.k_a));
    let _ = writeln!(s, "k_B: {}", key(&o.k_b));
    let _ = writeln!(
        s,
        "keys equal: {}  accepted components: {}  secrecy void: {}",
        o.agreed, o.accepted, o.secrecy_void
    );
    s
}
