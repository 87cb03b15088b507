#include "unexpand/operators.hpp"

#include "unexpand/error.hpp"

namespace unexpand {

Fixity fixity_of(OpType type) {
    switch (type) {
        case OpType::fy:
        case OpType::fx: return Fixity::prefix;
        case OpType::xf:
        case OpType::yf: return Fixity::postfix;
        default: return Fixity::infix;
    }
}

std::string_view to_string(OpType type) {
    switch (type) {
        case OpType::xfx: return "xfx";
        case OpType::xfy: return "xfy";
        case OpType::yfx: return "yfx";
        case OpType::fy: return "fy";
        case OpType::fx: return "fx";
        case OpType::xf: return "xf";
        case OpType::yf: return "yf";
    }
    return "xfx";
}

std::optional<OpType> parse_op_type(std::string_view text) {
    for (auto t : {OpType::xfx, OpType::xfy, OpType::yfx, OpType::fy, OpType::fx, OpType::xf,
                   OpType::yf})
        if (to_string(t) == text) return t;
    return std::nullopt;
}

void OperatorTable::add(int priority, OpType type, const std::string& name) {
    if (priority < 1 || priority > 1200)
        throw error("operator priority out of range 1..1200: " + std::to_string(priority));
    switch (fixity_of(type)) {
        case Fixity::prefix: prefix_[name] = {priority, type}; break;
        case Fixity::infix: infix_[name] = {priority, type}; break;
        case Fixity::postfix: postfix_[name] = {priority, type}; break;
    }
}

std::optional<OpDef> OperatorTable::lookup(std::string_view name, Fixity fixity) const {
    const auto& m = entries(fixity);
    auto it = m.find(name);
    if (it == m.end()) return std::nullopt;
    return it->second;
}

bool OperatorTable::is_operator(std::string_view name) const {
    return prefix_.contains(name) || infix_.contains(name) || postfix_.contains(name);
}

std::map<std::string, OpDef, std::less<>> const& OperatorTable::entries(Fixity fixity) const {
    switch (fixity) {
        case Fixity::prefix: return prefix_;
        case Fixity::postfix: return postfix_;
        default: return infix_;
    }
}

OperatorTable default_ops() {
    OperatorTable ops;
    ops.add(1200, OpType::xfx, ":-");
    ops.add(1200, OpType::fx, ":-");
    ops.add(1100, OpType::xfy, ";");
    ops.add(1050, OpType::xfy, "->");
    ops.add(1000, OpType::xfy, ",");
    for (const char* name : {"=", "\\=", "==", "\\==", "<", ">", "=<", ">=", "=:=", "=\\=", "is"})
        ops.add(700, OpType::xfx, name);
    ops.add(500, OpType::yfx, "+");
    ops.add(500, OpType::yfx, "-");
    ops.add(400, OpType::yfx, "*");
    ops.add(400, OpType::yfx, "//");
    ops.add(400, OpType::yfx, "mod");
    ops.add(200, OpType::xfy, ":");
    ops.add(200, OpType::fy, "-");
    return ops;
}

}  // namespace unexpand
