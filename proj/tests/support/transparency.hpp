#pragma once

// Solutions of the same query over differently expanded copies of a program.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <regex>

#include "programs.hpp"
#include "unexpand/solver.hpp"

namespace unexpand::testing {

// Answers of one query as a sorted list; errors count as an answer kind.
inline std::vector<std::string> solutions(const Database& db, const Program& p, const Term& q) {
    SolverOptions so;
    so.module = p.module;
    so.step_limit = 3000;
    std::vector<std::string> out;
    try {
        Solver s(db, q, nullptr, so);
        while (out.size() < 25 && s.next()) {
            // _G numbers depend on clause shapes; keep only their pattern
            std::string a = format_answer(s, p.ops);
            std::map<std::string, int> seen;
            std::string norm;
            std::regex re("_G[0-9]+");
            auto it = std::sregex_iterator(a.begin(), a.end(), re);
            std::size_t pos = 0;
            for (; it != std::sregex_iterator(); ++it) {
                norm += a.substr(pos, it->position() - pos);
                auto [m, fresh] = seen.emplace(it->str(), int(seen.size()));
                norm += "_V" + std::to_string(m->second);
                pos = it->position() + it->length();
            }
            norm += a.substr(pos);
            out.push_back(norm);
        }
    } catch (const resource_error&) {
        out.push_back("<resource>");
    } catch (const error&) {
        out.push_back(std::string("<error>"));
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct Variants {
    Program annotated, stripped, plain, reread;
    Database db_annotated, db_stripped, db_plain, db_reread;
};

inline Variants variants(const std::string& file) {
    LoadOptions strip;
    strip.mode = ExtractMode::strip;
    LoadOptions plain;
    plain.plain_packages = true;
    Program a = load_example(file);
    Program s = load_example(file, strip);
    Program pl = load_example(file, plain);
    Program rr = load_program(dump_program(s, ExtractMode::strip), a.module, strip);
    Database da = Database::consult(a.clauses), ds = Database::consult(s.clauses),
             dp = Database::consult(pl.clauses), dr = Database::consult(rr.clauses);
    return {std::move(a), std::move(s), std::move(pl), std::move(rr),
            std::move(da), std::move(ds), std::move(dp), std::move(dr)};
}

// Random small queries over the predicates a program defines. Variables are
// never repeated: greeting(L,L) would build a cyclic term without the occurs
// check.
class QueryGen {
public:
    QueryGen(std::uint32_t seed, std::vector<PredicateKey> preds, std::vector<Term> pool)
        : rng_(seed), preds_(std::move(preds)), pool_(std::move(pool)) {}

    Term next() {
        const auto& k = preds_[pick(preds_.size())];
        vars_.clear();
        if (k.arity == 0) return Term::atom(k.name);
        std::vector<Term> args;
        for (std::size_t i = 0; i < k.arity; ++i) args.push_back(arg());
        return Term::compound(k.name, std::move(args));
    }

private:
    Term arg() {
        if (pick(3) == 0) {
            vars_.push_back(global_var_source().fresh(std::string(1, char('A' + vars_.size()))));
            return vars_.back();
        }
        return pool_[pick(pool_.size())];
    }
    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

    std::mt19937 rng_;
    std::vector<PredicateKey> preds_;
    std::vector<Term> pool_;
    std::vector<Term> vars_;
};

inline std::vector<Term> pool_of(const std::string& text, const OperatorTable& ops) {
    Term l = read_term(text, ops).term;
    std::vector<Term> out;
    for (; l.has_functor(".", 2); l = l.arg(1)) out.push_back(l.arg(0));
    return out;
}

inline std::vector<PredicateKey> user_preds(const Database& db) {
    std::vector<PredicateKey> out;
    for (const auto& k : db.predicates())
        if (db.module_of(k) != std::optional<std::string>("dcg")) out.push_back(k);
    return out;
}

/// Compares every variant against the stripped program on the fixed queries
/// and `random` generated ones. Returns a description of the first mismatch.
inline std::optional<std::string> transparency_mismatch(const std::string& file, const std::string& pool_text,
                                                        const std::vector<std::string>& fixed, std::uint32_t seed,
                                                        int random = 200) {
    Variants v = variants(file);
    std::vector<Term> queries;
    for (const auto& text : fixed) queries.push_back(read_term(text, v.annotated.ops).term);
    QueryGen gen(seed, user_preds(v.db_stripped), pool_of(pool_text, v.annotated.ops));
    for (int i = 0; i < random; ++i) queries.push_back(gen.next());
    for (const auto& q : queries) {
        auto want = solutions(v.db_stripped, v.stripped, q);
        if (solutions(v.db_annotated, v.annotated, q) != want) return "annotated: " + write_term(q);
        if (solutions(v.db_plain, v.plain, q) != want) return "plain translation: " + write_term(q);
        if (solutions(v.db_reread, v.reread, q) != want) return "re-read dump: " + write_term(q);
    }
    return std::nullopt;
}

}  // namespace unexpand::testing
