#pragma once

#include <string>

#include <json.hpp>

#include "framegate/groups.hpp"
#include "framegate/linalg.hpp"

namespace framegate::cli {

using Report = nlohmann::ordered_json;

/// Report skeleton with "command" and "schema_version".
Report make_report(const std::string& command);

/// Numbers go through %.12g so text and JSON reports are stable across runs.
double rounded(double x);

Report to_json(const ComplexMatrix& m);
Report to_json(const RealMatrix& m);
Report to_json(const GLParityElement& g);
Report to_json(const PUAElement& g);

/// Canonical JSON (two-space indent, trailing newline).
std::string render_json(const Report& r);

/// Indented `key: value` text. Arrays of numbers stay inline, arrays of
/// arrays print one row per line and arrays of flat objects print as a table.
std::string render_text(const Report& r);

/// Writes to `path`, or stdout when empty.
void emit(const std::string& text, const std::string& path);

}  // namespace framegate::cli
