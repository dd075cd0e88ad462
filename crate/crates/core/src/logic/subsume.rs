use super::constraint::Denial;
use super::term::Literal;
use super::unify::{match_atom, Matching};

/// θ-subsumption between denials: some θ over the variables of `general`
/// maps its body onto a sub-multiset of the body of `specific`.
///
/// When it holds, every violation of `specific` is also one of `general`.
pub fn subsumes(general: &Denial, specific: &Denial) -> bool {
    if general.body.len() > specific.body.len() {
        return false;
    }
    let mut used = vec![false; specific.body.len()];
    search(
        &general.body,
        &specific.body,
        &mut used,
        Matching::default(),
    )
}

fn search(rest: &[Literal], target: &[Literal], used: &mut [bool], theta: Matching) -> bool {
    let Some((lit, rest)) = rest.split_first() else {
        return true;
    };
    for (i, t) in target.iter().enumerate() {
        if used[i] {
            continue;
        }
        if let Some(next) = match_literal(lit, t, &theta) {
            used[i] = true;
            if search(rest, target, used, next) {
                return true;
            }
            used[i] = false;
        }
    }
    false
}

fn match_literal(p: &Literal, t: &Literal, theta: &Matching) -> Option<Matching> {
    match (p, t) {
        (Literal::Pos(a), Literal::Pos(b)) | (Literal::Neg(a), Literal::Neg(b)) => {
            match_atom(a, b, theta)
        }
        (Literal::Cmp(op1, l1, r1), Literal::Cmp(op2, l2, r2)) if op1 == op2 => {
            let mut m = theta.clone();
            if m.match_term(l1, l2) && m.match_term(r1, r2) {
                return Some(m);
            }
            // both comparisons are symmetric
            let mut m = theta.clone();
            (m.match_term(l1, r2) && m.match_term(r1, l2)).then_some(m)
        }
        _ => None,
    }
}
