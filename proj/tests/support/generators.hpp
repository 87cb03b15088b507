#pragma once

// Random term generators shared by the property suites.

#include <random>
#include <string>
#include <vector>

#include "unexpand/term.hpp"

namespace unexpand::testing {

class TermGenerator {
public:
    explicit TermGenerator(std::uint32_t seed, std::size_t var_pool = 4) : rng_(seed) {
        for (std::size_t i = 0; i < var_pool; ++i)
            vars_.push_back(Term::var(global_var_source().next_id(), std::string(1, char('A' + i))));
    }

    const std::vector<Term>& vars() const { return vars_; }

    /// Plain first-order terms over a small signature, for unification.
    Term plain(int depth) {
        int pick = uniform(0, depth <= 0 ? 2 : 5);
        switch (pick) {
            case 0: return vars_[uniform(0, int(vars_.size()) - 1)];
            case 1: return Term::atom(atoms_[uniform(0, 2)]);
            case 2: return Term::integer(uniform(0, 3));
            default: {
                static const char* functors[] = {"f", "g", "h"};
                int arity = uniform(1, 3);
                std::vector<Term> args;
                for (int i = 0; i < arity; ++i) args.push_back(plain(depth - 1));
                return Term::compound(functors[uniform(0, 2)], std::move(args));
            }
        }
    }

    /// Terms using the operators of the default table, lists, negative
    /// numbers and quoted atoms, for reader/writer round trips.
    Term syntax(int depth) {
        int pick = uniform(0, depth <= 0 ? 3 : 10);
        switch (pick) {
            case 0: return vars_[uniform(0, int(vars_.size()) - 1)];
            case 1: return Term::atom(syntax_atoms_[uniform(0, int(syntax_atoms_.size()) - 1)]);
            case 2: return Term::integer(uniform(-20, 20));
            case 3: return Term::atom("[]");
            case 4:
            case 5: {
                static const char* infix[] = {"+", "-", "*", "//", "mod", "=", "<", "is", ",", ":-", ":"};
                const char* op = infix[uniform(0, 10)];
                return Term::compound(op, {syntax(depth - 1), syntax(depth - 1)});
            }
            case 6: return Term::compound("-", {syntax(depth - 1)});
            case 7: {
                std::vector<Term> items;
                int n = uniform(1, 3);
                for (int i = 0; i < n; ++i) items.push_back(syntax(depth - 1));
                Term tail = uniform(0, 3) == 0 ? vars_[0] : Term::atom("[]");
                return make_list(items, tail);
            }
            case 8: return Term::compound("{}", {syntax(depth - 1)});
            default: {
                static const char* functors[] = {"f", "g", "point", "hello world"};
                int arity = uniform(1, 3);
                std::vector<Term> args;
                for (int i = 0; i < arity; ++i) args.push_back(syntax(depth - 1));
                return Term::compound(functors[uniform(0, 3)], std::move(args));
            }
        }
    }

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    std::mt19937& rng() { return rng_; }

private:
    std::mt19937 rng_;
    std::vector<Term> vars_;
    std::vector<std::string> atoms_{"a", "b", "c"};
    std::vector<std::string> syntax_atoms_{"a", "nil", "x1", "Hello", "it's", "[]", "{}", "!"};
};

}  // namespace unexpand::testing
