#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace unexpand {

enum class OpType { xfx, xfy, yfx, fy, fx, xf, yf };
enum class Fixity { prefix, infix, postfix };

struct OpDef {
    int priority = 0;
    OpType type = OpType::xfx;

    friend bool operator==(const OpDef&, const OpDef&) = default;
};

Fixity fixity_of(OpType type);
std::string_view to_string(OpType type);
std::optional<OpType> parse_op_type(std::string_view text);

/// Operator declarations keyed by (name, fixity). Each name has at most one
/// prefix, one infix and one postfix entry; a later declaration replaces an
/// earlier one of the same fixity.
class OperatorTable {
public:
    /// Throws unexpand::error for priorities outside 1..1200.
    void add(int priority, OpType type, const std::string& name);
    std::optional<OpDef> lookup(std::string_view name, Fixity fixity) const;
    bool is_operator(std::string_view name) const;

    /// All entries as (name, definition), prefix first, then infix, postfix.
    std::map<std::string, OpDef, std::less<>> const& entries(Fixity fixity) const;

private:
    std::map<std::string, OpDef, std::less<>> prefix_, infix_, postfix_;
};

/// The standard table the reader starts from before any package is loaded.
OperatorTable default_ops();

}  // namespace unexpand
