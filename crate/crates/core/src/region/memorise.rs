use crate::model::{ClockId, ClockSet, Edge, Guard, LocId, ModelError, TimedAutomaton};

/// Result of clock memorisation.
///
/// The derived automaton has clocks `x_1..x_n, x_1'..x_n', z` (in that order)
/// and one fresh location that guesses an initial valuation: a self-loop per
/// clock resets `{x, x'}`, and a single exit edge resets `z` and enters the
/// original start location. Afterwards `x' - z` holds the guessed value of `x`.
#[derive(Debug, Clone)]
pub struct Memorised {
    pub automaton: TimedAutomaton,
    /// The fresh location.
    pub start: LocId,
    pub original: Vec<ClockId>,
    pub primed: Vec<ClockId>,
    pub reference: ClockId,
}

fn fresh(base: String, taken: &[String]) -> String {
    let mut name = base;
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

pub fn memorise(ta: &TimedAutomaton, start: LocId) -> Result<Memorised, ModelError> {
    ta.check_location(start)?;
    let n = ta.num_clocks();
    let mut clocks: Vec<String> = ta.clocks().to_vec();
    for i in 0..n {
        let name = fresh(format!("{}'", ta.clocks()[i]), &clocks);
        clocks.push(name);
    }
    let z = fresh("z".into(), &clocks);
    clocks.push(z);

    let mut locations = ta.locations().to_vec();
    let init_name = fresh(format!("{}'", ta.location_name(start)), &locations);
    locations.push(init_name);
    let init = LocId(locations.len() - 1);

    let mut edges = ta.edges().to_vec();
    for i in 0..n {
        let mut resets = ClockSet::EMPTY;
        resets.insert(ClockId(i));
        resets.insert(ClockId(n + i));
        edges.push(Edge {
            source: init,
            guard: Guard::tt(),
            resets,
            target: init,
        });
    }
    edges.push(Edge {
        source: init,
        guard: Guard::tt(),
        resets: ClockSet::singleton(ClockId(2 * n)),
        target: start,
    });
    Ok(Memorised {
        automaton: TimedAutomaton::new_unchecked(locations, clocks, edges),
        start: init,
        original: (0..n).map(ClockId).collect(),
        primed: (n..2 * n).map(ClockId).collect(),
        reference: ClockId(2 * n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_automaton;

    #[test]
    fn counts_for_one_clock() {
        let ta = parse_automaton(r#"{"clocks":["x"],"locations":["l0"],"edges":[]}"#).unwrap();
        let m = memorise(&ta, LocId(0)).unwrap();
        assert_eq!(m.automaton.num_locations(), 2);
        assert_eq!(m.automaton.num_clocks(), 3);
        assert_eq!(m.automaton.edges().len(), 2);
        assert_eq!(m.automaton.clocks(), &["x", "x'", "z"]);
        assert_eq!(m.automaton.location_name(m.start), "l0'");
    }

    #[test]
    fn counts_for_two_clocks_and_c_max() {
        let ta = parse_automaton(
            r#"{"clocks":["x","y"],"locations":["a","b"],"edges":[
              {"source":"a","guard":[{"clock":"x","op":"<","const":2}],"resets":["x"],"target":"b"},
              {"source":"b","guard":[],"resets":[],"target":"a"},
              {"source":"b","guard":[{"clock":"y","op":"=","const":1}],"resets":["y"],"target":"b"}]}"#,
        )
        .unwrap();
        let m = memorise(&ta, LocId(0)).unwrap();
        assert_eq!(m.automaton.num_clocks(), 5);
        assert_eq!(m.automaton.edges().len(), 6);
        assert_eq!(m.automaton.c_max(), ta.c_max());
        assert_eq!(&m.automaton.edges()[..3], ta.edges());
        let exit = m.automaton.edges().last().unwrap();
        assert_eq!(exit.resets, ClockSet::singleton(m.reference));
        assert_eq!(exit.target, LocId(0));
    }

    #[test]
    fn names_stay_unique() {
        let ta = parse_automaton(r#"{"clocks":["z","x"],"locations":["l","l'"],"edges":[]}"#).unwrap();
        let m = memorise(&ta, LocId(0)).unwrap();
        let mut names = m.automaton.clocks().to_vec();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 5);
        assert_eq!(m.automaton.location_name(m.start), "l''");
        assert!(memorise(&ta, LocId(7)).is_err());
    }
}
