#pragma once

// Loading the shipped example programs and driving the debugger from tests.

#include <deque>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "unexpand/debugger.hpp"
#include "unexpand/expansion.hpp"
#include "unexpand/reader.hpp"
#include "unexpand/writer.hpp"

namespace unexpand::testing {

inline std::string program_path(const std::string& name) { return std::string(UNEXPAND_PROGRAMS_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Program load_example(const std::string& name, LoadOptions opts = {}) {
    return load_program(slurp(program_path(name)), module_name_for(name), opts);
}

inline std::string show(const Term& t, const OperatorTable& ops, int threshold = 700) {
    WriteOptions o;
    o.ops = &ops;
    o.spacing_threshold = threshold;
    return write_term(t, o);
}

inline Term parse(const std::string& text, const OperatorTable& ops) { return read_term(text, ops).term; }

/// Feeds scripted commands and keeps everything written.
class ScriptChannel : public LineChannel {
public:
    explicit ScriptChannel(std::vector<std::string> script = {}) : script_(script.begin(), script.end()) {}
    std::optional<std::string> read_line() override {
        if (script_.empty()) return std::nullopt;
        std::string s = script_.front();
        script_.pop_front();
        return s;
    }
    void write(std::string_view text) override { out_ += text; }
    const std::string& output() const { return out_; }
    std::vector<std::string> lines() const {
        std::vector<std::string> out;
        std::istringstream in(out_);
        for (std::string l; std::getline(in, l);) out.push_back(l);
        return out;
    }

private:
    std::deque<std::string> script_;
    std::string out_;
};

}  // namespace unexpand::testing
