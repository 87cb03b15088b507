#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace unexpand {

using Integer = boost::multiprecision::cpp_int;
using VarId = std::uint64_t;

class Term;

namespace detail {
struct VarNode {
    VarId id;
    std::string name;
};
struct AtomNode {
    std::string name;
};
struct IntNode {
    Integer value;
};
struct CompoundNode {
    std::string functor;
    std::vector<Term> args;
};
using Node = std::variant<VarNode, AtomNode, IntNode, CompoundNode>;
}  // namespace detail

/// Immutable first-order term with cheap copies.
///
/// Variables are identified by their id alone; the display name is carried
/// for printing and never takes part in comparisons.
class Term {
public:
    enum class Kind { var, atom, integer, compound };

    static Term var(VarId id, std::string name = {});
    static Term atom(std::string name);
    static Term integer(Integer value);
    /// Throws std::invalid_argument when `args` is empty; zero-arity
    /// symbols are atoms.
    static Term compound(std::string functor, std::vector<Term> args);

    Kind kind() const { return static_cast<Kind>(node_->index()); }
    bool is_var() const { return kind() == Kind::var; }
    bool is_atom() const { return kind() == Kind::atom; }
    bool is_integer() const { return kind() == Kind::integer; }
    bool is_compound() const { return kind() == Kind::compound; }
    bool is_callable() const { return is_atom() || is_compound(); }
    bool is_atomic() const { return is_atom() || is_integer(); }

    VarId var_id() const;
    const std::string& var_name() const;
    /// Atom name or compound functor.
    const std::string& name() const;
    const Integer& value() const;
    std::size_t arity() const;
    std::span<const Term> args() const;
    const Term& arg(std::size_t i) const { return args()[i]; }

    bool is_atom(std::string_view name) const { return is_atom() && this->name() == name; }
    bool has_functor(std::string_view name, std::size_t arity) const;

    /// Address of the shared node; equal for copies of the same term.
    const void* identity() const { return node_.get(); }

    friend bool operator==(const Term& a, const Term& b);

private:
    explicit Term(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const detail::Node> node_;
};

/// Functor identity of a predicate: f/1 and f/2 are distinct.
struct PredicateKey {
    std::string name;
    std::size_t arity = 0;

    friend bool operator==(const PredicateKey&, const PredicateKey&) = default;
    friend auto operator<=>(const PredicateKey&, const PredicateKey&) = default;
    std::string str() const { return name + "/" + std::to_string(arity); }
};

struct PredicateKeyHash {
    std::size_t operator()(const PredicateKey& k) const {
        return std::hash<std::string>{}(k.name) * 31 + k.arity;
    }
};

/// Predicate key of a callable term; nullopt for variables and integers.
std::optional<PredicateKey> predicate_key(const Term& t);

/// Hands out unique variable ids.
class VarSource {
public:
    explicit VarSource(VarId first = 1) : next_(first) {}
    VarId next_id() { return next_.fetch_add(1, std::memory_order_relaxed); }
    Term fresh(std::string name = {}) { return Term::var(next_id(), std::move(name)); }

private:
    std::atomic<VarId> next_;
};

/// Process-wide source used by readers and translators. Its ids start far
/// above the ranges used by per-query solver sources so the two never mix.
VarSource& global_var_source();

inline constexpr VarId global_var_base = VarId{1} << 32;

// Construction helpers.
Term make_list(const std::vector<Term>& items, Term tail = Term::atom("[]"));
/// Elements of a proper list, or nullopt.
std::optional<std::vector<Term>> list_elements(const Term& t);
/// Right-nested ','/2 chain; `true` for an empty list.
Term make_conjunction(const std::vector<Term>& goals);
/// Flattens nested ','/2 into a goal list; `true` contributes nothing.
std::vector<Term> conjunction_goals(const Term& t);

/// Distinct variables of `t` in depth-first, left-to-right order.
std::vector<Term> term_variables(const Term& t);

/// True when a and b are equal up to a consistent bijective variable renaming.
bool is_variant(const Term& a, const Term& b);

}  // namespace unexpand
