#pragma once

// Text serialization shared by the engines and the CLI. Numbers use the
// shortest round-trip decimal form, '.' separator, LF line endings.

#include "sddelab/integrator.hpp"

#include <string>

namespace sddelab {

std::string format_double(double v);

/// `t,x` rows, then `# event=<label>,t=<time>` (faults add `,reason=...`).
std::string trajectory_csv(const PathResult& path);

/// Event comment line without the trailing newline.
std::string event_comment(const Outcome& outcome);

} // namespace sddelab
