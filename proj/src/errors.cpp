#include "storygen/errors.hpp"

namespace storygen {

namespace {

std::string describe(const SourcePosition& pos, const std::string& message) {
    if (pos.rule.empty()) {
        return "parse error at offset " + std::to_string(pos.offset) + ": " + message;
    }
    return "parse error in rule '" + pos.rule + "' alternative " + std::to_string(pos.alternative) +
           " at offset " + std::to_string(pos.offset) + ": " + message;
}

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
        if (!out.empty()) out += ", ";
        out += n;
    }
    return out;
}

}  // namespace

ParseError::ParseError(SourcePosition pos, const std::string& message)
    : Error(describe(pos, message)), pos_(std::move(pos)) {}

DanglingSymbol::DanglingSymbol(std::vector<std::string> names)
    : Error("dangling symbol reference(s): " + join_names(names)), names_(std::move(names)) {}

}  // namespace storygen
