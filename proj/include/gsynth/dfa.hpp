#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <sstream>

#include "gsynth/core.hpp"

namespace gsynth {

// Partial deterministic automaton in incomplete form: missing transitions
// are shorthand for edges into an implicit sink-reject state.
struct Dfa {
    std::set<Token> alphabet;
    std::set<StateId> states;
    StateId initial = 0;
    std::set<StateId> accepting;
    TransitionMap transitions;

    bool operator==(const Dfa&) const = default;
};

inline std::optional<StateId> target(const Dfa& d, StateId q, const Token& t) {
    auto it = d.transitions.find(q);
    if (it == d.transitions.end()) return std::nullopt;
    auto jt = it->second.find(t);
    if (jt == it->second.end()) return std::nullopt;
    return jt->second;
}

inline void add_transition(Dfa& d, StateId from, const Token& t, StateId to) {
    auto& row = d.transitions[from];
    auto [it, inserted] = row.emplace(t, to);
    if (!inserted && it->second != to)
        throw Error("add_transition: determinism violated at state " + std::to_string(from) +
                    " on token '" + t + "'");
    d.states.insert(from);
    d.states.insert(to);
    d.alphabet.insert(t);
}

inline void check_well_formed(const Dfa& d) {
    if (!d.states.count(d.initial)) throw Error("dfa: initial state not in state set");
    for (StateId q : d.accepting)
        if (!d.states.count(q)) throw Error("dfa: accepting state not in state set");
    for (const auto& [from, row] : d.transitions) {
        if (!d.states.count(from)) throw Error("dfa: transition source not in state set");
        for (const auto& [tok, to] : row) {
            if (!d.states.count(to)) throw Error("dfa: transition target not in state set");
            if (!d.alphabet.count(tok)) throw Error("dfa: transition token not in alphabet");
        }
    }
}

inline std::set<StateId> reachable_states(const Dfa& d) {
    std::set<StateId> seen{d.initial};
    std::deque<StateId> queue{d.initial};
    while (!queue.empty()) {
        StateId q = queue.front();
        queue.pop_front();
        auto it = d.transitions.find(q);
        if (it == d.transitions.end()) continue;
        for (const auto& [tok, to] : it->second)
            if (seen.insert(to).second) queue.push_back(to);
    }
    return seen;
}

// Maximal set of states from which no accepting state is reachable.
inline std::set<StateId> sink_reject_states(const Dfa& d) {
    std::map<StateId, std::set<StateId>> reverse;
    for (const auto& [from, row] : d.transitions)
        for (const auto& [tok, to] : row) reverse[to].insert(from);
    std::set<StateId> alive(d.accepting.begin(), d.accepting.end());
    std::deque<StateId> queue(d.accepting.begin(), d.accepting.end());
    while (!queue.empty()) {
        StateId q = queue.front();
        queue.pop_front();
        auto it = reverse.find(q);
        if (it == reverse.end()) continue;
        for (StateId p : it->second)
            if (alive.insert(p).second) queue.push_back(p);
    }
    std::set<StateId> sinks;
    for (StateId q : d.states)
        if (!alive.count(q)) sinks.insert(q);
    return sinks;
}

// Completion: route every missing transition into a sink-reject state,
// reusing an existing one when present.
inline Dfa complete(const Dfa& d) {
    Dfa out = d;
    std::set<StateId> sinks = sink_reject_states(out);
    bool missing = false;
    for (StateId q : out.states) {
        for (const Token& t : out.alphabet)
            if (!target(out, q, t)) missing = true;
        if (missing) break;
    }
    if (!missing) return out;
    StateId sink;
    if (!sinks.empty()) {
        sink = *sinks.begin();
    } else {
        sink = fresh_state_id();
        out.states.insert(sink);
    }
    for (StateId q : out.states)
        for (const Token& t : out.alphabet)
            if (!target(out, q, t)) out.transitions[q][t] = sink;
    return out;
}

// def(A,q): tokens whose transition leaves the sink-reject region.
inline std::set<Token> defined_tokens(const Dfa& d, StateId q) {
    if (!d.states.count(q)) throw Error("defined_tokens: unknown state id " + std::to_string(q));
    std::set<StateId> sinks = sink_reject_states(d);
    std::set<Token> out;
    auto it = d.transitions.find(q);
    if (it == d.transitions.end()) return out;
    for (const auto& [tok, to] : it->second)
        if (!sinks.count(to)) out.insert(tok);
    return out;
}

// delta[q <- q_n]: redirect all transitions into or out of q to q_n.
inline TransitionMap replace_state(const TransitionMap& transitions, StateId q, StateId q_n) {
    bool saw_q = false;
    for (const auto& [from, row] : transitions) {
        if (from == q_n) throw Error("replace_state: replacement state already present");
        if (from == q) saw_q = true;
        for (const auto& [tok, to] : row) {
            if (to == q_n) throw Error("replace_state: replacement state already present");
            if (to == q) saw_q = true;
        }
    }
    if (!saw_q) throw Error("replace_state: state not present in transition set");
    TransitionMap out;
    for (const auto& [from, row] : transitions) {
        StateId f = (from == q) ? q_n : from;
        for (const auto& [tok, to] : row) out[f][tok] = (to == q) ? q_n : to;
    }
    return out;
}

inline bool membership(const Dfa& d, const Word& w) {
    StateId q = d.initial;
    for (const Token& t : w) {
        auto next = target(d, q, t);
        if (!next) return false;  // unknown tokens and missing edges reject
        q = *next;
    }
    return d.accepting.count(q) > 0;
}

// All accepted words of length <= max_len, by breadth-first traversal.
// The expansion count is capped; overflowing the budget is an error.
inline std::set<Word> enumerate_language(const Dfa& d, std::size_t max_len,
                                         std::size_t node_budget = 1000000) {
    std::set<StateId> sinks = sink_reject_states(d);
    std::set<Word> out;
    if (sinks.count(d.initial)) return out;
    std::deque<std::pair<StateId, Word>> queue;
    queue.emplace_back(d.initial, Word{});
    std::size_t expanded = 0;
    while (!queue.empty()) {
        auto [q, w] = std::move(queue.front());
        queue.pop_front();
        if (++expanded > node_budget)
            throw BudgetExceededError("enumerate_language: node budget exhausted");
        if (d.accepting.count(q)) out.insert(w);
        if (w.size() == max_len) continue;
        auto it = d.transitions.find(q);
        if (it == d.transitions.end()) continue;
        for (const auto& [tok, to] : it->second) {
            if (sinks.count(to)) continue;
            Word next = w;
            next.push_back(tok);
            queue.emplace_back(to, std::move(next));
        }
    }
    return out;
}

struct MinimizeResult {
    Dfa dfa;
    std::map<StateId, StateId> state_map;  // old reachable non-sink state -> new state
};

// Partition refinement on the completed DFA, then sink-reject states are
// stripped so the result is back in incomplete form. Fresh state ids.
inline MinimizeResult minimize_with_map(const Dfa& d) {
    Dfa c = complete(d);
    std::set<StateId> reach = reachable_states(c);

    std::map<StateId, int> cls;
    for (StateId q : reach) cls[q] = c.accepting.count(q) ? 1 : 0;
    bool changed = true;
    while (changed) {
        changed = false;
        std::map<std::vector<int>, int> sig_to_class;
        std::map<StateId, int> next_cls;
        for (StateId q : reach) {
            std::vector<int> sig{cls[q]};
            for (const Token& t : c.alphabet) {
                auto to = target(c, q, t);
                sig.push_back(to ? cls[*to] : -1);  // -1 unreachable only if alphabet empty
            }
            auto [it, inserted] = sig_to_class.emplace(sig, static_cast<int>(sig_to_class.size()));
            next_cls[q] = it->second;
        }
        if (next_cls != cls) {
            changed = true;
            cls = std::move(next_cls);
        }
    }

    // quotient in BFS order from the initial class
    std::map<int, StateId> class_state;
    std::map<int, StateId> representative;
    for (auto it = reach.rbegin(); it != reach.rend(); ++it) representative[cls[*it]] = *it;

    Dfa q;
    q.alphabet = d.alphabet;
    std::deque<int> queue{cls[c.initial]};
    class_state[cls[c.initial]] = fresh_state_id();
    std::vector<std::tuple<int, Token, int>> edges;
    std::set<int> visited{cls[c.initial]};
    while (!queue.empty()) {
        int k = queue.front();
        queue.pop_front();
        StateId rep = representative[k];
        for (const Token& t : c.alphabet) {
            auto to = target(c, rep, t);
            if (!to) continue;
            int k2 = cls[*to];
            if (!visited.count(k2)) {
                visited.insert(k2);
                class_state[k2] = fresh_state_id();
                queue.push_back(k2);
            }
            edges.emplace_back(k, t, k2);
        }
    }
    q.initial = class_state[cls[c.initial]];
    q.states.insert(q.initial);
    for (int k : visited) q.states.insert(class_state[k]);
    for (StateId s : c.accepting)
        if (reach.count(s) && visited.count(cls[s])) q.accepting.insert(class_state[cls[s]]);
    for (auto& [from, tok, to] : edges) q.transitions[class_state[from]][tok] = class_state[to];

    // strip sink-reject states (keep the initial state even when dead)
    std::set<StateId> sinks = sink_reject_states(q);
    Dfa out;
    out.alphabet = d.alphabet;
    out.initial = q.initial;
    out.states.insert(q.initial);
    for (StateId s : q.states)
        if (!sinks.count(s)) out.states.insert(s);
    for (StateId s : q.accepting)
        if (!sinks.count(s)) out.accepting.insert(s);
    for (const auto& [from, row] : q.transitions) {
        if (sinks.count(from) || !out.states.count(from)) continue;
        for (const auto& [tok, to] : row)
            if (!sinks.count(to)) out.transitions[from][tok] = to;
    }

    std::map<StateId, StateId> smap;
    std::set<StateId> dsinks = sink_reject_states(d);
    for (StateId s : d.states) {
        if (!reach.count(s) || dsinks.count(s)) continue;
        auto it = class_state.find(cls[s]);
        if (it != class_state.end() && out.states.count(it->second)) smap[s] = it->second;
    }
    return {std::move(out), std::move(smap)};
}

inline Dfa minimize(const Dfa& d) { return minimize_with_map(d).dfa; }

// Deterministic DFAs admit at most one isomorphism candidate, found by a
// parallel traversal from the initial states. Compares used structure only.
inline std::optional<std::map<StateId, StateId>> isomorphism(const Dfa& d1, const Dfa& d2) {
    if (d1.states.size() != d2.states.size()) return std::nullopt;
    if (d1.accepting.size() != d2.accepting.size()) return std::nullopt;
    std::map<StateId, StateId> fwd, bwd;
    std::deque<std::pair<StateId, StateId>> queue;
    fwd[d1.initial] = d2.initial;
    bwd[d2.initial] = d1.initial;
    queue.emplace_back(d1.initial, d2.initial);
    while (!queue.empty()) {
        auto [a, b] = queue.front();
        queue.pop_front();
        if (d1.accepting.count(a) != d2.accepting.count(b)) return std::nullopt;
        auto ita = d1.transitions.find(a);
        auto itb = d2.transitions.find(b);
        std::size_t na = (ita == d1.transitions.end()) ? 0 : ita->second.size();
        std::size_t nb = (itb == d2.transitions.end()) ? 0 : itb->second.size();
        if (na != nb) return std::nullopt;
        if (na == 0) continue;
        for (const auto& [tok, to_a] : ita->second) {
            auto jt = itb->second.find(tok);
            if (jt == itb->second.end()) return std::nullopt;
            StateId to_b = jt->second;
            auto fa = fwd.find(to_a);
            auto fb = bwd.find(to_b);
            if (fa != fwd.end() || fb != bwd.end()) {
                if (fa == fwd.end() || fb == bwd.end()) return std::nullopt;
                if (fa->second != to_b || fb->second != to_a) return std::nullopt;
                continue;
            }
            fwd[to_a] = to_b;
            bwd[to_b] = to_a;
            queue.emplace_back(to_a, to_b);
        }
    }
    // traversal must cover everything for a bijection on the full state sets
    if (fwd.size() != d1.states.size()) return std::nullopt;
    return fwd;
}

struct ParallelMap {
    std::map<StateId, StateId> next_to_prev;
    std::map<StateId, StateId> prev_to_next;
    bool conflict = false;  // some state admitted two parallels (not PRS-generated)
};

// Def-style parallel state map between consecutive DFAs: q' in next maps to
// q in prev iff some word reaches both with neither in a sink-reject state.
// One simultaneous traversal covers all prev states.
inline ParallelMap parallel_state_map(const Dfa& prev, const Dfa& next) {
    ParallelMap pm;
    std::set<StateId> sink_p = sink_reject_states(prev);
    std::set<StateId> sink_n = sink_reject_states(next);
    if (sink_p.count(prev.initial) || sink_n.count(next.initial)) return pm;
    std::set<std::pair<StateId, StateId>> seen;
    std::deque<std::pair<StateId, StateId>> queue;
    auto visit = [&](StateId p, StateId n) {
        auto itn = pm.next_to_prev.find(n);
        if (itn != pm.next_to_prev.end() && itn->second != p) pm.conflict = true;
        auto itp = pm.prev_to_next.find(p);
        if (itp != pm.prev_to_next.end() && itp->second != n) pm.conflict = true;
        pm.next_to_prev.emplace(n, p);
        pm.prev_to_next.emplace(p, n);
        if (seen.emplace(p, n).second) queue.emplace_back(p, n);
    };
    visit(prev.initial, next.initial);
    while (!queue.empty()) {
        auto [p, n] = queue.front();
        queue.pop_front();
        auto itp = prev.transitions.find(p);
        if (itp == prev.transitions.end()) continue;
        for (const auto& [tok, p2] : itp->second) {
            if (sink_p.count(p2)) continue;
            auto n2 = target(next, n, tok);
            if (!n2 || sink_n.count(*n2)) continue;
            visit(p2, *n2);
        }
    }
    return pm;
}

// Shortest word length from `from` to `to`; min_steps=1 asks for a
// non-empty path (used for circular loop lengths). Returns nullopt if none.
inline std::optional<std::size_t> shortest_path_length(const Dfa& d, StateId from, StateId to,
                                                       std::size_t min_steps = 0) {
    std::deque<std::pair<StateId, std::size_t>> queue{{from, 0}};
    std::map<StateId, std::size_t> best;
    while (!queue.empty()) {
        auto [q, len] = queue.front();
        queue.pop_front();
        if (q == to && len >= min_steps) return len;
        auto it = d.transitions.find(q);
        if (it == d.transitions.end()) continue;
        for (const auto& [tok, q2] : it->second) {
            std::size_t nl = len + 1;
            auto b = best.find(q2);
            if (b != best.end() && b->second <= nl) continue;
            best[q2] = nl;
            queue.emplace_back(q2, nl);
        }
    }
    return std::nullopt;
}

}  // namespace gsynth
