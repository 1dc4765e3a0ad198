//! Minimal-parenthesis printing, inverse to the parser.

use super::{Connective, Formula, FormulaKind};

pub(crate) enum View<'a, T> {
    Atom(String),
    Neg(&'a T),
    Bin(Connective, &'a T, &'a T),
}

/// Tree shape shared by Epstein formulas and classical translations.
pub(crate) trait TreeView: Sized {
    fn view(&self) -> View<'_, Self>;
}

pub(crate) fn letter_name(index: u32) -> String {
    match index {
        1 => "p".into(),
        2 => "q".into(),
        3 => "r".into(),
        4 => "s".into(),
        5 => "t".into(),
        i => format!("p{i}"),
    }
}

impl TreeView for Formula {
    fn view(&self) -> View<'_, Self> {
        match self.kind() {
            FormulaKind::Letter(i) => View::Atom(letter_name(*i)),
            FormulaKind::Neg(x) => View::Neg(x),
            FormulaKind::Bin(op, l, r) => View::Bin(*op, l, r),
        }
    }
}

// Binding strength; higher binds tighter.
fn tier(op: Connective) -> u8 {
    match op {
        Connective::Iff => 1,
        Connective::Imp | Connective::RelImp => 2,
        Connective::Or => 3,
        Connective::And | Connective::RelConj => 4,
    }
}

const ATOMIC: u8 = 5;

fn strength<T: TreeView>(t: &T) -> (u8, Option<Connective>) {
    match t.view() {
        View::Atom(_) | View::Neg(_) => (ATOMIC, None),
        View::Bin(op, _, _) => (tier(op), Some(op)),
    }
}

pub(crate) fn render<T: TreeView>(t: &T) -> String {
    let mut out = String::new();
    write_tree(t, &mut out);
    out
}

fn write_tree<T: TreeView>(t: &T, out: &mut String) {
    match t.view() {
        View::Atom(name) => out.push_str(&name),
        View::Neg(inner) => {
            out.push('!');
            write_child(inner, strength(inner).0 < ATOMIC, out);
        }
        View::Bin(op, l, r) => {
            let my = tier(op);
            let (ls, _) = strength(l);
            let (rs, rop) = strength(r);
            let (left_parens, right_parens) = match op {
                // right-associative; mixed `->`/`~>` chains are always bracketed
                Connective::Imp | Connective::RelImp => {
                    (ls <= my, rs < my || (rs == my && rop != Some(op)))
                }
                // left-associative tiers
                _ => (ls < my, rs <= my),
            };
            write_child(l, left_parens, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_child(r, right_parens, out);
        }
    }
}

fn write_child<T: TreeView>(t: &T, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
        write_tree(t, out);
        out.push(')');
    } else {
        write_tree(t, out);
    }
}

/// Renders `phi` with the fewest parentheses that parse back to `phi`.
pub fn print(phi: &Formula) -> String {
    render(phi)
}
