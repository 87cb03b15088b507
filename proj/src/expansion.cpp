#include "unexpand/expansion.hpp"

#include <filesystem>
#include <sstream>

#include "unexpand/writer.hpp"

namespace unexpand {

namespace {

std::string where(const SourceSpan& s) {
    return s.module + ":" + std::to_string(s.start_line) + ":" + std::to_string(s.start_col);
}

bool reserved_head(const Term& head) {
    static const char* reserved[] = {",", ";", "->", "!", ":-", "$clause_info", "$goal_info", "$gmark"};
    for (const char* r : reserved)
        if (head.name() == r) return true;
    return false;
}

}  // namespace

translation_error::translation_error(const SourceSpan& span, const std::string& message)
    : error(where(span) + ": translation error: " + message), span_(span) {}

void PackageRegistry::add(Package p) {
    if (packages_.contains(p.name)) throw error("package already registered: " + p.name);
    auto name = p.name;
    packages_.emplace(std::move(name), std::make_shared<const Package>(std::move(p)));
}

const Package* PackageRegistry::find(const std::string& name) const {
    auto it = packages_.find(name);
    return it == packages_.end() ? nullptr : it->second.get();
}

std::vector<std::string> PackageRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : packages_) out.push_back(name);
    return out;
}

std::vector<AnnotatedClause> source_items(const std::vector<Sentence>& sentences) {
    std::vector<AnnotatedClause> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) out.push_back({s.term, s.span, {}, true, s.subterm_spans});
    return out;
}

SourceSpan AnnotatedClause::span_of(const TermPath& path) const {
    TermPath p = path;
    for (;;) {
        auto it = subterm_spans.find(p);
        if (it != subterm_spans.end()) return it->second;
        if (p.empty()) return span;
        p.pop_back();
    }
}

std::vector<AnnotatedClause> expand_program(const std::vector<AnnotatedClause>& items,
                                            const std::vector<const Package*>& pkgs) {
    std::vector<AnnotatedClause> current = items;
    for (const Package* pkg : pkgs) {
        if (!pkg->make_rule) continue;
        SentenceRule rule = pkg->make_rule(current);
        std::vector<AnnotatedClause> next;
        next.reserve(current.size());
        for (auto& item : current) {
            if (!item.source) {
                next.push_back(std::move(item));
                continue;
            }
            auto translated = rule(item);
            if (!translated) {
                next.push_back(std::move(item));
                continue;
            }
            for (auto& t : *translated) next.push_back(std::move(t));
        }
        current = std::move(next);
    }
    return current;
}

Term Clause::term() const {
    if (body.is_atom("true")) return head;
    return Term::compound(":-", {head, body});
}

Clause make_clause(const Term& t, ClauseId id) {
    Term head = t, body = Term::atom("true");
    if (t.has_functor(":-", 2)) {
        head = t.arg(0);
        body = t.arg(1);
    }
    if (!head.is_callable()) throw load_error("clause head is not callable");
    if (reserved_head(head))
        throw load_error("cannot define control construct " + predicate_key(head)->str());
    if (body.is_var() || body.is_integer()) throw load_error("clause body is not callable");
    return {head, body, std::move(id)};
}

const SourceInfo* SymbolTable::lookup_clause(const ClauseId& id) const {
    auto it = clause_entries.find(id);
    return it == clause_entries.end() ? nullptr : &it->second;
}

const SourceInfo* SymbolTable::lookup_goal(const GoalId& id) const {
    auto it = goal_entries.find(id);
    return it == goal_entries.end() ? nullptr : &it->second;
}

std::string SymbolTable::dump(const OperatorTable& ops) const {
    WriteOptions o;
    o.ops = &ops;
    o.var_naming = VarNaming::canonical;
    std::ostringstream out;
    auto line = [&](const std::string& id, const SourceInfo& info) {
        out << id << '\t' << info.span.start_line << '\t'
            << (info.si ? write_term(*info.si, o) : std::string("-")) << '\n';
    };
    for (const auto& [id, info] : clause_entries) line(id.str(), info);
    for (const auto& [id, info] : goal_entries) line(id.str(), info);
    return out.str();
}

Term goal_id_term(const GoalId& id) {
    return Term::compound("$gid", {Term::atom(id.module), Term::integer(id.ordinal)});
}

std::optional<GoalId> goal_id_from(const Term& t) {
    if (!t.has_functor("$gid", 2) || !t.arg(0).is_atom() || !t.arg(1).is_integer()) return std::nullopt;
    return GoalId{t.arg(0).name(), t.arg(1).value().convert_to<std::uint32_t>()};
}

namespace {

class Extractor {
public:
    Extractor(const std::string& module, ExtractMode mode) : module_(module), mode_(mode) {}

    void add(const AnnotatedClause& item) {
        item_ = &item;
        next_span_ = 0;
        const Term& p = item.payload;
        if (p.has_functor("$clause_info", 2)) {
            auto clauses = list_elements(p.arg(0));
            if (!clauses || clauses->empty())
                throw extraction_error(where(item.span) + ": '$clause_info' needs a non-empty clause list");
            std::vector<ClauseId> group;
            for (std::size_t i = 0; i < clauses->size(); ++i) group.push_back({module_, next_clause_ + 1 + std::uint32_t(i)});
            std::optional<Term> si = checked_si(p.arg(1), "'$clause_info'");
            for (std::size_t i = 0; i < clauses->size(); ++i) {
                ++next_clause_;
                Clause c = make_clause((*clauses)[i], group[i]);
                c.body = rewrite(c.body, group);
                out_.clauses.push_back(c);
                if (mode_ == ExtractMode::annotate)
                    out_.symtab.clause_entries.emplace(group[i], SourceInfo{si, item.span, group});
            }
            return;
        }
        if (p.is_callable() && p.name() == "$clause_info")
            throw extraction_error(where(item.span) + ": malformed '$clause_info'");
        Clause c = make_clause(p, {module_, ++next_clause_});
        c.body = rewrite(c.body, {c.id});
        out_.clauses.push_back(c);
    }

    Extraction take() {
        if (mode_ == ExtractMode::strip) out_.symtab = {};
        return std::move(out_);
    }

private:
    std::optional<Term> checked_si(const Term& si, const char* what) {
        if (!si.is_var()) return si;
        out_.warnings.push_back(where(item_->span) + ": warning: unbound symbolic information in " + what +
                                "; using the source position only");
        return std::nullopt;
    }

    Term rewrite(const Term& body, const std::vector<ClauseId>& group) {
        if (body.has_functor(",", 2)) {
            Term a = rewrite(body.arg(0), group);
            Term b = rewrite(body.arg(1), group);
            if (a.identity() == body.arg(0).identity() && b.identity() == body.arg(1).identity()) return body;
            return Term::compound(",", {a, b});
        }
        if (body.is_compound() && body.name() == "$goal_info") {
            if (body.arity() != 2)
                throw extraction_error(where(item_->span) + ": malformed '$goal_info'");
            GoalId gid{module_, ++next_goal_};
            SourceSpan span = next_span_ < item_->goal_spans.size() ? item_->goal_spans[next_span_] : item_->span;
            ++next_span_;
            std::optional<Term> si = checked_si(body.arg(1), "'$goal_info'");
            Term inner = rewrite(body.arg(0), group);
            if (mode_ == ExtractMode::strip) return inner;
            out_.symtab.goal_entries.emplace(gid, SourceInfo{si, span, group});
            return Term::compound("$gmark", {goal_id_term(gid), inner});
        }
        return body;
    }

    std::string module_;
    ExtractMode mode_;
    Extraction out_;
    const AnnotatedClause* item_ = nullptr;
    std::size_t next_span_ = 0;
    std::uint32_t next_clause_ = 0;
    std::uint32_t next_goal_ = 0;
};

}  // namespace

Extraction extract_annotations(const std::vector<AnnotatedClause>& items, const std::string& module,
                               ExtractMode mode) {
    Extractor x(module, mode);
    for (const auto& item : items) {
        try {
            x.add(item);
        } catch (const load_error& e) {
            throw load_error(where(item.span) + ": " + e.what());
        }
    }
    return x.take();
}

namespace {

std::vector<std::string> atom_list(const Term& t, const SourceSpan& span, const char* what) {
    if (t.is_atom() && !t.is_atom("[]")) return {t.name()};
    auto items = list_elements(t);
    if (!items) throw load_error(where(span) + ": " + what + " expects an atom or a list of atoms");
    std::vector<std::string> out;
    for (const auto& i : *items) {
        if (!i.is_atom()) throw load_error(where(span) + ": " + what + " expects an atom or a list of atoms");
        out.push_back(i.name());
    }
    return out;
}

std::vector<Clause> runtime_clauses(const Package& pkg) {
    if (pkg.runtime_source.empty()) return {};
    OperatorTable ops = default_ops();
    for (const auto& d : pkg.operators) ops.add(d.priority, d.type, d.name);
    Reader r(pkg.runtime_source, ops, pkg.name);
    std::vector<AnnotatedClause> items;
    while (auto s = r.next()) items.push_back({s->term, s->span, {}, true});
    return extract_annotations(items, pkg.name).clauses;
}

}  // namespace

Program load_program(std::string_view text, const std::string& module, const LoadOptions& opts,
                     const PackageRegistry* registry) {
    if (!registry) registry = &standard_registry(!opts.plain_packages);
    Program prog;
    prog.module = module;
    prog.ops = default_ops();
    std::vector<const Package*> pkgs;
    std::vector<AnnotatedClause> items;

    Reader reader(text, prog.ops, module);
    while (auto s = reader.next()) {
        if (!s->term.has_functor(":-", 1)) {
            items.push_back({s->term, s->span, {}, true, std::move(s->subterm_spans)});
            continue;
        }
        const Term& d = s->term.arg(0);
        if (d.has_functor("use_package", 1)) {
            if (!items.empty())
                throw load_error(where(s->span) + ": use_package must come before the first clause");
            for (const auto& name : atom_list(d.arg(0), s->span, "use_package")) {
                const Package* pkg = registry->find(name);
                if (!pkg) throw load_error(where(s->span) + ": unknown package " + name);
                bool seen = false;
                for (const Package* q : pkgs) seen = seen || q == pkg;
                if (seen) continue;
                pkgs.push_back(pkg);
                prog.packages.push_back(name);
                for (const auto& op : pkg->operators) prog.ops.add(op.priority, op.type, op.name);
            }
        } else if (d.has_functor("op", 3)) {
            const Term &p = d.arg(0), &t = d.arg(1);
            auto type = t.is_atom() ? parse_op_type(t.name()) : std::nullopt;
            if (!p.is_integer() || !type) throw load_error(where(s->span) + ": malformed op/3 directive");
            int prio = p.value().convert_to<int>();
            for (const auto& name : atom_list(d.arg(2), s->span, "op/3")) {
                try {
                    prog.ops.add(prio, *type, name);
                } catch (const error& e) {
                    throw load_error(where(s->span) + ": " + e.what());
                }
            }
        } else {
            throw load_error(where(s->span) + ": unsupported directive");
        }
    }

    prog.expanded = expand_program(items, pkgs);
    Extraction ex = extract_annotations(prog.expanded, module, opts.mode);
    prog.clauses = std::move(ex.clauses);
    prog.symtab = std::move(ex.symtab);
    prog.warnings = std::move(ex.warnings);
    for (const Package* pkg : pkgs)
        for (auto& c : runtime_clauses(*pkg)) prog.clauses.push_back(std::move(c));
    return prog;
}

std::string module_name_for(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

std::string dump_program(const Program& p, ExtractMode mode) {
    std::ostringstream out;
    WriteOptions o;
    o.ops = &p.ops;
    o.var_naming = VarNaming::canonical;
    o.spacing_threshold = 500;
    for (const auto& name : p.packages) out << ":- use_package(" << quote_atom(name) << ").\n";
    if (!p.packages.empty()) out << '\n';
    if (mode == ExtractMode::annotate) {
        for (const auto& item : p.expanded) {
            WriteOptions top = o;
            top.max_priority = 1199;
            out << write_term(item.payload, top) << ".\n";
        }
    } else {
        for (const auto& c : extract_annotations(p.expanded, p.module, ExtractMode::strip).clauses)
            out << format_clause(c.term(), o);
    }
    std::istringstream table(p.symtab.dump(p.ops));
    std::string line;
    bool first = true;
    while (std::getline(table, line)) {
        if (first) out << "\n% symbol table\n";
        first = false;
        out << "% " << line << '\n';
    }
    return out.str();
}

}  // namespace unexpand
